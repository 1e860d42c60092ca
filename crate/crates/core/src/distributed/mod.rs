//! Deterministic server/clients simulation of the solver.
//!
//! The points are split over `k` clients. The server samples the coordinate,
//! keeps its own copy of `w` and reduces the clients' partial values; no
//! client ever sends a point or a full weight vector during the iterations.
//! Every iteration runs these rounds:
//!
//! 1. `PickIndex` down, local `δ⁺, δ⁻` up,
//! 2. summed `δ` down (everyone updates `w_i`), local log-normalizers up,
//! 3. global log-normalizers down; in ν mode, local clip masses up,
//! 4. ν mode only: summed clip masses down and fresh masses up, repeated
//!    until a broadcast carries no excess.
//!
//! That is `9k` scalars per iteration in hard-margin mode and `9k + 8kP`
//! in ν mode, where `P` counts the clip broadcasts including the final empty
//! one. All reductions run in ascending client order starting from zero, so
//! a single client reproduces the centralized solver exactly.

mod client;
mod partition;
mod protocol;

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::dot;
use crate::preprocess::{apply_transform, TransformedData};
use crate::rng::{self, Stream};
use crate::solver::objective::{dual_from_products, hyperplane_from_sums};
use crate::solver::projection::CLIP_TOL;
use crate::solver::{
    combine_log_norms, coordinate_step, derive_params, final_outcome, ordered_sum, Checkpoint,
    Evaluation, ProjectionRule, Solution, SolverConfig, SolverParams, StopMonitor,
};

pub use client::Client;
pub use partition::{partition, PartitionScheme, Share};
pub use protocol::{CommStats, Envelope, Message, Network, NodeId};

/// Largest disagreement tolerated between the `w` replicas.
pub const REPLICA_TOL: f64 = 1e-12;

/// Traffic of one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationReport {
    pub coordinate: usize,
    pub scalars_up: u64,
    pub scalars_down: u64,
    pub rounds: u64,
    /// Clip broadcasts; zero in hard-margin mode.
    pub clip_broadcasts: u64,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    params: SolverParams,
    w: Vec<f64>,
    rng: ChaCha8Rng,
    clients: Vec<Client>,
    net: Network,
    n1: usize,
    n2: usize,
    t: usize,
    max_clip_passes: usize,
}

impl Simulation {
    /// Sets up `k` clients over already transformed data. The ν-mode
    /// projection always uses the clamp-and-rescale loop.
    pub fn new(data: &TransformedData, k: usize, config: &SolverConfig, scheme: PartitionScheme) -> Result<Self> {
        let params = derive_params(
            config.epsilon,
            config.beta,
            config.mode,
            data.n1(),
            data.n2(),
            data.d_pad(),
            ProjectionRule::Loop,
        )?;
        let shares = partition(data.n1(), data.n2(), k, scheme, config.seed)?;
        let clients = shares
            .into_iter()
            .enumerate()
            .map(|(id, share)| Client::new(id, share, &data.xp, &data.xm))
            .collect();
        Ok(Simulation {
            w: vec![0.0; data.d_pad()],
            rng: rng::stream(config.seed, Stream::Sampling),
            clients,
            net: Network::new(k),
            n1: data.n1(),
            n2: data.n2(),
            t: 0,
            max_clip_passes: 0,
            params,
        })
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    pub fn clients(&self) -> &[Client] {
        &self.clients
    }

    pub fn k(&self) -> usize {
        self.clients.len()
    }

    pub fn iterations(&self) -> usize {
        self.t
    }

    /// The server's copy of `w`.
    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn stats(&self) -> CommStats {
        self.net.stats
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    /// Keeps a log of every message sent from now on.
    pub fn record_messages(&mut self) {
        self.net.record();
    }

    /// The clients' dual weights put back in class order. This reads the
    /// clients directly and costs no traffic.
    pub fn eta(&self) -> Vec<f64> {
        let mut eta = vec![0.0; self.n1];
        for c in &self.clients {
            for (&j, &v) in c.pos_index.iter().zip(c.eta()) {
                eta[j] = v;
            }
        }
        eta
    }

    pub fn xi(&self) -> Vec<f64> {
        let mut xi = vec![0.0; self.n2];
        for c in &self.clients {
            for (&j, &v) in c.neg_index.iter().zip(c.xi()) {
                xi[j] = v;
            }
        }
        xi
    }

    fn broadcast(&mut self, msg: Message) -> Result<()> {
        for c in 0..self.clients.len() {
            self.net.send(NodeId::Server, NodeId::Client(c), msg.clone());
        }
        for client in &mut self.clients {
            client.drain(&mut self.net, &self.params)?;
        }
        Ok(())
    }

    /// One reply from every client, ordered by client id.
    fn gather(&mut self) -> Result<Vec<Message>> {
        let mut replies: Vec<Option<Message>> = vec![None; self.clients.len()];
        while let Some(env) = self.net.next_for_server() {
            let NodeId::Client(c) = env.from else {
                return Err(Error::Simulation("server received its own message".into()));
            };
            if replies[c].replace(env.msg).is_some() {
                return Err(Error::Simulation(format!("client {c} replied twice")));
            }
        }
        replies
            .into_iter()
            .enumerate()
            .map(|(c, r)| r.ok_or_else(|| Error::Simulation(format!("client {c} did not reply"))))
            .collect()
    }

    fn gather_pairs(&mut self, expect: &'static str) -> Result<Vec<(f64, f64)>> {
        self.gather()?
            .into_iter()
            .map(|m| match m {
                Message::ClientDelta { pos, neg } if expect == "ClientDelta" => Ok((pos, neg)),
                Message::ClientNorm { pos, neg } if expect == "ClientNorm" => Ok((pos, neg)),
                other => Err(Error::Simulation(format!("expected {expect}, got {}", other.tag()))),
            })
            .collect()
    }

    fn gather_clip(&mut self) -> Result<[f64; 4]> {
        let parts: Vec<[f64; 4]> = self
            .gather()?
            .into_iter()
            .map(|m| match m {
                Message::ClientClip {
                    excess_pos,
                    excess_neg,
                    below_pos,
                    below_neg,
                } => Ok([excess_pos, excess_neg, below_pos, below_neg]),
                other => Err(Error::Simulation(format!("expected ClientClip, got {}", other.tag()))),
            })
            .collect::<Result<_>>()?;
        Ok(std::array::from_fn(|j| ordered_sum(parts.iter().map(|p| p[j]))))
    }

    /// Runs one iteration of the protocol.
    pub fn run_iteration(&mut self) -> Result<IterationReport> {
        let before = self.net.stats;
        let i = self.rng.gen_range(0..self.params.d_pad);

        self.broadcast(Message::PickIndex(i))?;
        let deltas = self.gather_pairs("ClientDelta")?;
        let pos = ordered_sum(deltas.iter().map(|d| d.0));
        let neg = ordered_sum(deltas.iter().map(|d| d.1));
        self.w[i] = coordinate_step(self.w[i], pos, neg, self.params.sigma);

        self.broadcast(Message::DeltaBroadcast { pos, neg })?;
        let norms = self.gather_pairs("ClientNorm")?;
        let lz_p = combine_log_norms(&norms.iter().map(|n| n.0).collect::<Vec<_>>());
        let lz_m = combine_log_norms(&norms.iter().map(|n| n.1).collect::<Vec<_>>());
        if !(lz_p.is_finite() && lz_m.is_finite()) {
            return Err(Error::Numerical(format!("dual normalizer is not finite at iteration {}", self.t)));
        }

        self.broadcast(Message::NormBroadcast { pos: lz_p, neg: lz_m })?;
        let mut rounds = 3;
        let mut clip_broadcasts = 0;
        if self.params.nu < 1.0 {
            loop {
                let [excess_pos, excess_neg, below_pos, below_neg] = self.gather_clip()?;
                self.broadcast(Message::ClipBroadcast {
                    excess_pos,
                    excess_neg,
                    below_pos,
                    below_neg,
                })?;
                clip_broadcasts += 1;
                rounds += 1;
                if excess_pos <= CLIP_TOL && excess_neg <= CLIP_TOL {
                    break;
                }
            }
            self.max_clip_passes = self.max_clip_passes.max(clip_broadcasts as usize - 1);
        }
        if self.net.next_for_server().is_some() {
            return Err(Error::Simulation("unexpected message after the iteration".into()));
        }
        self.check_coordinate(i)?;

        self.t += 1;
        self.net.stats.iterations += 1;
        self.net.stats.rounds += rounds;
        self.net.stats.clip_passes += clip_broadcasts;
        Ok(IterationReport {
            coordinate: i,
            scalars_up: self.net.stats.scalars_up - before.scalars_up,
            scalars_down: self.net.stats.scalars_down - before.scalars_down,
            rounds,
            clip_broadcasts,
        })
    }

    fn check_coordinate(&self, i: usize) -> Result<()> {
        for c in &self.clients {
            if (c.w[i] - self.w[i]).abs() > REPLICA_TOL {
                return Err(Error::Simulation(format!(
                    "client {} holds w[{i}] = {} but the server holds {}",
                    c.id, c.w[i], self.w[i]
                )));
            }
        }
        Ok(())
    }

    /// Compares every replica of `w` with the server's.
    pub fn check_replicas(&self) -> Result<()> {
        (0..self.w.len()).try_for_each(|i| self.check_coordinate(i))
    }

    /// Objective values, computed from the clients' partial reports.
    pub fn checkpoint(&mut self) -> Result<Evaluation> {
        self.check_replicas()?;
        self.broadcast(Message::CheckpointRequest)?;
        let d = self.w.len();
        let mut z = vec![0.0; d];
        let mut p = vec![0.0; d];
        let mut low_pos = Vec::new();
        let mut high_neg = Vec::new();
        for msg in self.gather()? {
            let Message::CheckpointReport {
                diff,
                sum,
                low_pos: lp,
                high_neg: hn,
            } = msg
            else {
                return Err(Error::Simulation(format!("expected CheckpointReport, got {}", msg.tag())));
            };
            if diff.len() != d || sum.len() != d {
                return Err(Error::Simulation("checkpoint report has the wrong length".into()));
            }
            z.iter_mut().zip(&diff).for_each(|(a, b)| *a += b);
            p.iter_mut().zip(&sum).for_each(|(a, b)| *a += b);
            low_pos.extend(lp);
            high_neg.extend(hn);
        }
        Ok(Evaluation {
            primal: 0.5 * dot(&z, &z),
            dual: dual_from_products(&low_pos, &high_neg, dot(&self.w, &self.w), self.params.nu),
            b: hyperplane_from_sums(&self.w, &z, &p).b,
        })
    }

    /// Collects the dual weights through the network and stops the clients.
    pub fn finish(&mut self) -> Result<(Vec<f64>, Vec<f64>)> {
        self.broadcast(Message::FinalRequest)?;
        let mut eta = vec![0.0; self.n1];
        let mut xi = vec![0.0; self.n2];
        for (c, msg) in self.gather()?.into_iter().enumerate() {
            let Message::FinalReport { eta: e, xi: x, w } = msg else {
                return Err(Error::Simulation(format!("expected FinalReport, got {}", msg.tag())));
            };
            let client = &self.clients[c];
            if e.len() != client.pos_index.len() || x.len() != client.neg_index.len() {
                return Err(Error::Simulation(format!("client {c} reported the wrong number of weights")));
            }
            client.pos_index.iter().zip(e).for_each(|(&j, v)| eta[j] = v);
            client.neg_index.iter().zip(x).for_each(|(&j, v)| xi[j] = v);
            if let Some(w) = w {
                if w.iter().zip(&self.w).any(|(a, b)| (a - b).abs() > REPLICA_TOL) {
                    return Err(Error::Simulation("final w disagrees with the server".into()));
                }
            }
        }
        self.broadcast(Message::Stop)?;
        Ok((eta, xi))
    }
}

/// Transforms `data` and runs the simulation with the same stopping logic
/// as [`crate::solver::solve`].
pub fn run_simulation(
    data: &Dataset,
    k: usize,
    config: &SolverConfig,
    scheme: PartitionScheme,
) -> Result<(Solution, CommStats)> {
    let td = apply_transform(data, config.seed)?;
    run_simulation_transformed(&td, k, config, scheme)
}

pub fn run_simulation_transformed(
    data: &TransformedData,
    k: usize,
    config: &SolverConfig,
    scheme: PartitionScheme,
) -> Result<(Solution, CommStats)> {
    let start = Instant::now();
    let mut sim = Simulation::new(data, k, config, scheme)?;
    let params = sim.params.clone();
    let mut trace = Vec::new();
    let record = |sim: &mut Simulation, trace: &mut Vec<Checkpoint>| -> Result<Evaluation> {
        let eval = sim.checkpoint()?;
        if !(eval.primal.is_finite() && eval.dual.is_finite()) {
            return Err(Error::Numerical(format!(
                "objective became non-finite at iteration {}",
                sim.t
            )));
        }
        let stats = sim.stats();
        trace.push(Checkpoint {
            iteration: sim.t,
            primal: eval.primal,
            dual: eval.dual,
            gap: eval.primal - eval.dual,
            b: eval.b,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            scalars_up: stats.scalars_up,
            scalars_down: stats.scalars_down,
        });
        Ok(eval)
    };

    let mut eval = record(&mut sim, &mut trace)?;
    let mut stop = StopMonitor::new(config.stop, params.epsilon, data.spec.scale, &eval);
    let mut converged = false;
    let mut blocks = 0;
    while blocks < config.max_blocks {
        for _ in 0..params.block_len {
            sim.run_iteration()?;
        }
        blocks += 1;
        eval = record(&mut sim, &mut trace)?;
        if stop.check(&eval) {
            converged = true;
            break;
        }
    }
    let (eta, xi) = sim.finish()?;

    let distance = (2.0 * eval.primal).max(0.0).sqrt();
    let solution = Solution {
        w: sim.w.clone(),
        b: eval.b,
        eta,
        xi,
        primal: eval.primal,
        dual: eval.dual,
        gap: eval.primal - eval.dual,
        distance,
        distance_original: distance / data.spec.scale,
        margin: distance / 2.0,
        iterations: sim.t,
        blocks,
        outcome: final_outcome(converged, params.mode, &eval, params.epsilon),
        max_clip_passes: sim.max_clip_passes,
        wall_time_s: start.elapsed().as_secs_f64(),
        params,
        spec: data.spec.clone(),
        trace,
    };
    Ok((solution, sim.stats()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::solver::{Mode, SaddleState};

    fn tiny() -> TransformedData {
        TransformedData::untransformed(
            Matrix::from_columns(4, &[vec![0.5, 0.1, 0.0, 0.2], vec![0.3, -0.2, 0.1, 0.0], vec![0.4, 0.4, -0.1, 0.1]]),
            Matrix::from_columns(4, &[vec![-0.3, 0.0, 0.2, 0.1], vec![-0.1, -0.4, 0.0, 0.3], vec![0.0, -0.2, -0.3, 0.0]]),
        )
    }

    #[test]
    fn hard_margin_traffic() {
        let config = SolverConfig::default();
        let mut sim = Simulation::new(&tiny(), 3, &config, PartitionScheme::RoundRobin).unwrap();
        let r = sim.run_iteration().unwrap();
        assert_eq!((r.scalars_up, r.scalars_down, r.rounds), (12, 15, 3));
    }

    #[test]
    fn single_client_matches_the_state() {
        let data = tiny();
        let config = SolverConfig {
            mode: Mode::Nu(0.5),
            ..SolverConfig::default()
        };
        let mut sim = Simulation::new(&data, 1, &config, PartitionScheme::RoundRobin).unwrap();
        let params = sim.params().clone();
        let mut state = SaddleState::new(3, 3, 4);
        let mut rng = rng::stream(config.seed, Stream::Sampling);
        for _ in 0..200 {
            sim.run_iteration().unwrap();
            state.iterate(&data, &params, &mut rng);
            assert_eq!(sim.w(), state.w.as_slice());
            assert_eq!(sim.eta(), state.eta());
            assert_eq!(sim.xi(), state.xi());
        }
        assert_eq!(sim.checkpoint().unwrap(), state.evaluate(&data, params.nu));
    }

    #[test]
    fn diverged_replica_is_reported() {
        let mut sim = Simulation::new(&tiny(), 2, &SolverConfig::default(), PartitionScheme::Contiguous).unwrap();
        sim.run_iteration().unwrap();
        sim.clients[1].w[0] += 1e-9;
        assert!(matches!(sim.check_replicas(), Err(Error::Simulation(_))));
    }

    #[test]
    fn out_of_turn_message_is_a_fault() {
        let mut sim = Simulation::new(&tiny(), 2, &SolverConfig::default(), PartitionScheme::RoundRobin).unwrap();
        let err = sim.broadcast(Message::NormBroadcast { pos: 0.0, neg: 0.0 }).unwrap_err();
        assert!(matches!(err, Error::Simulation(_)));
    }
}
