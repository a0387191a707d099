use crate::atom_structure::{AtomId, AtomStructure};

use super::{initial_response, Column, ExistsStrategy, ForallMove, NetRound, Network, StrategyFailure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetBudget {
    pub max_nodes: usize,
    /// Positions at which ∀ moves are enumerated. Final positions are checked but not counted.
    pub max_states: u64,
}

impl Default for NetBudget {
    fn default() -> Self {
        NetBudget { max_nodes: 12, max_states: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExistsVerifyOptions {
    /// Total rounds, counting the opening.
    pub rounds: usize,
    pub budget: NetBudget,
    pub check_invariants: bool,
    /// Restrict ∀'s opening atoms; `None` means all atoms.
    pub openings: Option<Vec<AtomId>>,
}

impl ExistsVerifyOptions {
    pub fn new(rounds: usize) -> Self {
        ExistsVerifyOptions { rounds, budget: NetBudget::default(), check_invariants: false, openings: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetLoss {
    Incoherent(String),
    Failure(StrategyFailure),
    Invariant(String),
    WrongWitness,
}

impl std::fmt::Display for NetLoss {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NetLoss::Incoherent(d) => write!(f, "incoherent network: {d}"),
            NetLoss::Failure(e) => write!(f, "strategy failure: {e}"),
            NetLoss::Invariant(d) => write!(f, "invariant violated: {d}"),
            NetLoss::WrongWitness => write!(f, "reply does not witness the move"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetVerdict {
    Verified { states: u64, leaves: u64 },
    Losing { transcript: Vec<NetRound>, reason: NetLoss },
    Inconclusive { states: u64, reason: String },
}

enum Stop {
    Lost(NetLoss),
    Budget(String),
}

struct Search<'a, S: ExistsStrategy> {
    s: &'a AtomStructure,
    strategy: &'a S,
    opts: &'a ExistsVerifyOptions,
    /// Non-identity `(a, b)` with `(a, b, c)` consistent, indexed by `c`.
    pairs: Vec<Vec<(AtomId, AtomId)>>,
    states: u64,
    leaves: u64,
    trail: Vec<NetRound>,
}

impl<S: ExistsStrategy> Search<'_, S> {
    fn reply(&mut self, net: &Network, mem: &S::Memory, m: ForallMove) -> Result<(Column, S::Delta), Stop> {
        let (col, delta) = self.strategy.respond(net, mem, m).map_err(|e| Stop::Lost(NetLoss::Failure(e)))?;
        if col[m.x] != m.a || col[m.y] != self.s.conv(m.b) {
            return Err(Stop::Lost(NetLoss::WrongWitness));
        }
        if let Err(inc) = net.extension_coherent(self.s, &col) {
            let full = net.extend(self.s, &col).expect("size checked");
            return Err(Stop::Lost(NetLoss::Incoherent(inc.describe(&full, self.s))));
        }
        Ok((col, delta))
    }

    fn record(&mut self, net: &Network, m: ForallMove, col: &Column) {
        let z = net.len();
        self.trail.push(NetRound::Move { round: self.trail.len(), m, z, edges: (0..z).map(|w| (w, col[w])).collect() });
    }

    fn record_failed(&mut self, net: &Network, mem: &S::Memory, m: ForallMove) {
        match self.strategy.respond(net, mem, m) {
            Ok((col, _)) => self.record(net, m, &col),
            Err(_) => self.trail.push(NetRound::Unanswered { round: self.trail.len(), m }),
        }
    }

    fn explore(&mut self, net: &Network, mem: &S::Memory, moves_left: usize) -> Result<(), Stop> {
        if moves_left == 0 {
            self.leaves += 1;
            return Ok(());
        }
        self.states += 1;
        if self.states > self.opts.budget.max_states {
            return Err(Stop::Budget(format!("more than {} states", self.opts.budget.max_states)));
        }
        if net.len() >= self.opts.budget.max_nodes.min(super::MAX_NODES) {
            return Err(Stop::Budget(format!("network would exceed {} nodes", self.opts.budget.max_nodes)));
        }
        let symmetric = self.strategy.converse_symmetric();
        let n = net.len();
        for x in 0..n {
            for y in if symmetric { x..n } else { 0..n } {
                let c = net.label(x, y);
                for i in 0..self.pairs[c.index()].len() {
                    let (a, b) = self.pairs[c.index()][i];
                    let m = ForallMove { x, y, a, b };
                    if net.is_trivial(m) {
                        continue;
                    }
                    let (col, delta) = match self.reply(net, mem, m) {
                        Ok(r) => r,
                        Err(stop) => {
                            self.record_failed(net, mem, m);
                            return Err(stop);
                        }
                    };
                    if moves_left == 1 && !self.opts.check_invariants {
                        self.leaves += 1;
                        continue;
                    }
                    let next = net.extend(self.s, &col).expect("size checked");
                    let mut next_mem = mem.clone();
                    self.strategy.commit(&mut next_mem, delta);
                    self.record(net, m, &col);
                    if self.opts.check_invariants {
                        if let Err(e) = self.strategy.check_invariants(&next, &next_mem, m) {
                            return Err(Stop::Lost(NetLoss::Invariant(e)));
                        }
                    }
                    self.explore(&next, &next_mem, moves_left - 1)?;
                    self.trail.pop();
                }
            }
        }
        Ok(())
    }
}

/// Plays `strategy` against every opening atom and every legal non-trivial
/// ∀ move for `opts.rounds` rounds, checking coherence after each reply.
///
/// If the strategy is converse symmetric only moves with `x ≤ y` are tried.
pub fn verify_exists_strategy<S: ExistsStrategy>(
    s: &AtomStructure,
    strategy: &S,
    opts: &ExistsVerifyOptions,
) -> NetVerdict {
    let n = s.len();
    let mut pairs = vec![Vec::new(); n];
    let non_id: Vec<AtomId> = s.atoms().filter(|&a| !s.identity().contains(a)).collect();
    for c in s.atoms() {
        for &a in &non_id {
            for &b in &non_id {
                if s.consistent(a, b, c) {
                    pairs[c.index()].push((a, b));
                }
            }
        }
    }
    let mut search = Search { s, strategy, opts, pairs, states: 0, leaves: 0, trail: vec![] };
    let openings = opts.openings.clone().unwrap_or_else(|| s.atoms().collect());
    for a in openings {
        let net = initial_response(s, a);
        search.trail = vec![NetRound::Opening { atom: a, net: net.clone() }];
        if let Err(inc) = net.coherent(s) {
            return NetVerdict::Losing {
                transcript: std::mem::take(&mut search.trail),
                reason: NetLoss::Incoherent(inc.describe(&net, s)),
            };
        }
        let mem = strategy.start(&net);
        match search.explore(&net, &mem, opts.rounds.saturating_sub(1)) {
            Ok(()) => {}
            Err(Stop::Lost(reason)) => {
                return NetVerdict::Losing { transcript: std::mem::take(&mut search.trail), reason }
            }
            Err(Stop::Budget(reason)) => return NetVerdict::Inconclusive { states: search.states, reason },
        }
    }
    NetVerdict::Verified { states: search.states, leaves: search.leaves }
}
