//! Messages, the in-process network and the traffic meter.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeId {
    Server,
    Client(usize),
}

/// Protocol payloads. The per-iteration variants carry a fixed number of
/// scalars; the checkpoint and final variants carry vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Message {
    /// Round 1, server → clients: the sampled coordinate.
    PickIndex(usize),
    /// Round 1 reply: local `δ⁺`, `δ⁻`.
    ClientDelta { pos: f64, neg: f64 },
    /// Round 2, server → clients: summed `δ⁺`, `δ⁻`.
    DeltaBroadcast { pos: f64, neg: f64 },
    /// Round 2 reply: local log-normalizers of the proposed dual weights.
    ClientNorm { pos: f64, neg: f64 },
    /// Round 3, server → clients: global log-normalizers.
    NormBroadcast { pos: f64, neg: f64 },
    /// ν-mode reply: local excess above the cap and mass below it.
    ClientClip {
        excess_pos: f64,
        excess_neg: f64,
        below_pos: f64,
        below_neg: f64,
    },
    /// ν-mode, server → clients: the summed clip masses. Both excesses at
    /// zero end the iteration.
    ClipBroadcast {
        excess_pos: f64,
        excess_neg: f64,
        below_pos: f64,
        below_neg: f64,
    },
    /// End of the run.
    Stop,
    /// Objective check request.
    CheckpointRequest,
    /// Partial `X⁺η − X⁻ξ` and `X⁺η + X⁻ξ` over the client's points, plus
    /// the inner products that can enter the capped min/max of the dual.
    CheckpointReport {
        diff: Vec<f64>,
        sum: Vec<f64>,
        low_pos: Vec<f64>,
        high_neg: Vec<f64>,
    },
    /// Request for the final dual weights.
    FinalRequest,
    /// Local dual weights; the first client also sends `w`.
    FinalReport {
        eta: Vec<f64>,
        xi: Vec<f64>,
        w: Option<Vec<f64>>,
    },
}

impl Message {
    /// Number of real values carried.
    pub fn scalars(&self) -> usize {
        match self {
            Message::PickIndex(_) => 1,
            Message::ClientDelta { .. }
            | Message::DeltaBroadcast { .. }
            | Message::ClientNorm { .. }
            | Message::NormBroadcast { .. } => 2,
            Message::ClientClip { .. } | Message::ClipBroadcast { .. } => 4,
            Message::Stop | Message::CheckpointRequest | Message::FinalRequest => 0,
            Message::CheckpointReport {
                diff,
                sum,
                low_pos,
                high_neg,
            } => diff.len() + sum.len() + low_pos.len() + high_neg.len(),
            Message::FinalReport { eta, xi, w } => {
                eta.len() + xi.len() + w.as_ref().map_or(0, Vec::len)
            }
        }
    }

    /// Traffic of the objective checks and the final collection, metered
    /// apart from the per-iteration protocol.
    pub fn is_checkpoint_traffic(&self) -> bool {
        matches!(
            self,
            Message::CheckpointRequest
                | Message::CheckpointReport { .. }
                | Message::FinalRequest
                | Message::FinalReport { .. }
        )
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Message::PickIndex(_) => "PickIndex",
            Message::ClientDelta { .. } => "ClientDelta",
            Message::DeltaBroadcast { .. } => "DeltaBroadcast",
            Message::ClientNorm { .. } => "ClientNorm",
            Message::NormBroadcast { .. } => "NormBroadcast",
            Message::ClientClip { .. } => "ClientClip",
            Message::ClipBroadcast { .. } => "ClipBroadcast",
            Message::Stop => "Stop",
            Message::CheckpointRequest => "CheckpointRequest",
            Message::CheckpointReport { .. } => "CheckpointReport",
            Message::FinalRequest => "FinalRequest",
            Message::FinalReport { .. } => "FinalReport",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub from: NodeId,
    pub to: NodeId,
    pub msg: Message,
}

/// Scalar counts. `scalars_up`/`scalars_down` cover the per-iteration
/// protocol only; objective checks and the final collection go to the
/// `checkpoint_*` counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommStats {
    pub scalars_up: u64,
    pub scalars_down: u64,
    pub checkpoint_up: u64,
    pub checkpoint_down: u64,
    /// Broadcast-and-gather rounds of the per-iteration protocol.
    pub rounds: u64,
    pub iterations: u64,
    /// ν-mode clip broadcasts, including the final all-zero one.
    pub clip_passes: u64,
    pub messages: u64,
}

impl CommStats {
    pub fn protocol_total(&self) -> u64 {
        self.scalars_up + self.scalars_down
    }

    pub fn total(&self) -> u64 {
        self.protocol_total() + self.checkpoint_up + self.checkpoint_down
    }
}

/// Synchronous, lossless, in-order mailboxes with metering.
#[derive(Debug, Clone)]
pub struct Network {
    server_inbox: VecDeque<Envelope>,
    client_inboxes: Vec<VecDeque<Envelope>>,
    pub stats: CommStats,
    log: Option<Vec<Envelope>>,
}

impl Network {
    pub fn new(k: usize) -> Self {
        Network {
            server_inbox: VecDeque::new(),
            client_inboxes: vec![VecDeque::new(); k],
            stats: CommStats::default(),
            log: None,
        }
    }

    /// Keeps a copy of every message from now on.
    pub fn record(&mut self) {
        self.log.get_or_insert_with(Vec::new);
    }

    pub fn log(&self) -> &[Envelope] {
        self.log.as_deref().unwrap_or(&[])
    }

    pub fn send(&mut self, from: NodeId, to: NodeId, msg: Message) {
        let n = msg.scalars() as u64;
        let up = to == NodeId::Server;
        match (msg.is_checkpoint_traffic(), up) {
            (false, true) => self.stats.scalars_up += n,
            (false, false) => self.stats.scalars_down += n,
            (true, true) => self.stats.checkpoint_up += n,
            (true, false) => self.stats.checkpoint_down += n,
        }
        self.stats.messages += 1;
        let env = Envelope { from, to, msg };
        if let Some(log) = &mut self.log {
            log.push(env.clone());
        }
        match to {
            NodeId::Server => self.server_inbox.push_back(env),
            NodeId::Client(c) => self.client_inboxes[c].push_back(env),
        }
    }

    pub fn next_for_client(&mut self, c: usize) -> Option<Envelope> {
        self.client_inboxes[c].pop_front()
    }

    pub fn next_for_server(&mut self) -> Option<Envelope> {
        self.server_inbox.pop_front()
    }
}
