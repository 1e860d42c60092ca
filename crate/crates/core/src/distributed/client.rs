//! A client holds a subset of the points, their dual weights and a replica
//! of `w`. It only reacts to messages from the server.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::solver::objective::support_size;
use crate::solver::projection::CLIP_TOL;
use crate::solver::{coordinate_step, DualBlock, SolverParams};

use super::partition::Share;
use super::protocol::{Message, Network, NodeId};

/// Where the client is inside the current iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Phase {
    Idle,
    Picked { i: usize },
    Proposed { i: usize, dw: f64 },
    Clipping,
    Stopped,
}

#[derive(Debug, Clone)]
pub struct Client {
    pub id: usize,
    /// Class indices of the local points, ascending.
    pub pos_index: Vec<usize>,
    pub neg_index: Vec<usize>,
    xp: Matrix,
    xm: Matrix,
    pub(crate) w: Vec<f64>,
    pos: DualBlock,
    neg: DualBlock,
    t: usize,
    phase: Phase,
}

impl Client {
    pub(crate) fn new(id: usize, share: Share, xp: &Matrix, xm: &Matrix) -> Self {
        let (n1, n2) = (xp.cols(), xm.cols());
        Client {
            id,
            xp: xp.select_columns(&share.pos),
            xm: xm.select_columns(&share.neg),
            w: vec![0.0; xp.rows()],
            pos: DualBlock::uniform(1.0, share.pos.len(), n1),
            neg: DualBlock::uniform(-1.0, share.neg.len(), n2),
            pos_index: share.pos,
            neg_index: share.neg,
            t: 0,
            phase: Phase::Idle,
        }
    }

    pub fn eta(&self) -> &[f64] {
        &self.pos.weights
    }

    pub fn xi(&self) -> &[f64] {
        &self.neg.weights
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// Reads its inbox until it is empty.
    pub(crate) fn drain(&mut self, net: &mut Network, params: &SolverParams) -> Result<()> {
        while let Some(env) = net.next_for_client(self.id) {
            let reply = self.handle(env.msg, params)?;
            if let Some(msg) = reply {
                net.send(NodeId::Client(self.id), NodeId::Server, msg);
            }
        }
        Ok(())
    }

    fn handle(&mut self, msg: Message, params: &SolverParams) -> Result<Option<Message>> {
        let me = self.id;
        let unexpected = |msg: &Message, phase: Phase| {
            Error::Simulation(format!("client {me} got {} while {phase:?}", msg.tag()))
        };
        let reply = match (msg, self.phase) {
            (Message::PickIndex(i), Phase::Idle) => {
                if i >= self.w.len() {
                    return Err(Error::Simulation(format!("client {me} got coordinate {i} out of range")));
                }
                self.phase = Phase::Picked { i };
                Some(Message::ClientDelta {
                    pos: self.pos.delta(self.xp.row(i), params.theta),
                    neg: self.neg.delta(self.xm.row(i), params.theta),
                })
            }
            (Message::DeltaBroadcast { pos, neg }, Phase::Picked { i }) => {
                let old = self.w[i];
                let new = coordinate_step(old, pos, neg, params.sigma);
                self.w[i] = new;
                let dw = new - old;
                let d = params.d_pad as f64;
                let c = params.dual_weight();
                self.phase = Phase::Proposed { i, dw };
                Some(Message::ClientNorm {
                    pos: self.pos.propose(self.xp.row(i), dw, d, c, params.gamma),
                    neg: self.neg.propose(self.xm.row(i), dw, d, c, params.gamma),
                })
            }
            (Message::NormBroadcast { pos, neg }, Phase::Proposed { i, dw }) => {
                self.pos.commit(pos, self.xp.row(i), dw);
                self.neg.commit(neg, self.xm.row(i), dw);
                if params.nu < 1.0 {
                    self.phase = Phase::Clipping;
                    Some(self.clip_report(params.nu))
                } else {
                    self.finish(params);
                    None
                }
            }
            (
                Message::ClipBroadcast {
                    excess_pos,
                    excess_neg,
                    below_pos,
                    below_neg,
                },
                Phase::Clipping,
            ) => {
                if excess_pos <= CLIP_TOL && excess_neg <= CLIP_TOL {
                    self.finish(params);
                    None
                } else {
                    if excess_pos > CLIP_TOL {
                        self.pos.apply_clip(params.nu, 1.0 + excess_pos / below_pos);
                    }
                    if excess_neg > CLIP_TOL {
                        self.neg.apply_clip(params.nu, 1.0 + excess_neg / below_neg);
                    }
                    Some(self.clip_report(params.nu))
                }
            }
            (Message::CheckpointRequest, Phase::Idle) => Some(self.checkpoint_report(params.nu)),
            (Message::FinalRequest, Phase::Idle | Phase::Stopped) => Some(Message::FinalReport {
                eta: self.pos.weights.clone(),
                xi: self.neg.weights.clone(),
                w: (self.id == 0).then(|| self.w.clone()),
            }),
            (Message::Stop, _) => {
                self.phase = Phase::Stopped;
                None
            }
            (msg, phase) => return Err(unexpected(&msg, phase)),
        };
        Ok(reply)
    }

    fn clip_report(&self, nu: f64) -> Message {
        let (excess_pos, below_pos) = self.pos.clip_mass(nu);
        let (excess_neg, below_neg) = self.neg.clip_mass(nu);
        Message::ClientClip {
            excess_pos,
            excess_neg,
            below_pos,
            below_neg,
        }
    }

    fn finish(&mut self, params: &SolverParams) {
        self.t += 1;
        if self.t.is_multiple_of(10 * params.d_pad) {
            self.pos.refresh_ip(&self.xp, &self.w);
            self.neg.refresh_ip(&self.xm, &self.w);
        }
        self.phase = Phase::Idle;
    }

    /// Partial sums over the local points and the inner products that may
    /// carry weight in the capped min (positives) and max (negatives).
    fn checkpoint_report(&self, nu: f64) -> Message {
        let ep = self.xp.mul(&self.pos.weights);
        let em = self.xm.mul(&self.neg.weights);
        let diff = ep.iter().zip(&em).map(|(a, b)| a - b).collect();
        let sum = ep.iter().zip(&em).map(|(a, b)| a + b).collect();
        let m = support_size(nu);
        let mut low_pos = self.xp.transpose_mul(&self.w);
        low_pos.sort_by(f64::total_cmp);
        low_pos.truncate(m);
        let mut high_neg = self.xm.transpose_mul(&self.w);
        high_neg.sort_by(|a, b| b.total_cmp(a));
        high_neg.truncate(m);
        Message::CheckpointReport {
            diff,
            sum,
            low_pos,
            high_neg,
        }
    }
}
