//! ∀'s strategy for rainbow structures with `|S| > |T|`: open with `w`, then
//! demand `z_i` with `N(x, z_i) = g_i` and `N(z_i, y) = y` for each `i`.

use crate::atom_structure::{AtomId, AtomStructure};
use crate::rainbow::{RainbowParams, IDENTITY, WHITE, YELLOW};

use super::{initial_response, Column, ExistsStrategy, ForallMove, NetLoss, NetRound, Network, MAX_NODES};

/// A fixed ∀ line: an opening atom and a move for each later round.
pub trait Refuter {
    fn opening(&self) -> AtomId;
    /// The move for `round ≥ 1`, or `None` once the line is exhausted.
    fn next_move(&self, round: usize, net: &Network) -> Option<ForallMove>;
}

#[derive(Debug, Clone, Copy)]
pub struct RainbowRefuter {
    pub p: RainbowParams,
}

impl Refuter for RainbowRefuter {
    fn opening(&self) -> AtomId {
        WHITE
    }

    fn next_move(&self, round: usize, _net: &Network) -> Option<ForallMove> {
        (round >= 1 && round <= self.p.s).then(|| ForallMove { x: 0, y: 1, a: self.p.green(round - 1), b: YELLOW })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefutationVerdict {
    /// Every ∃ line died; `last_round` is the latest round at which one did.
    Refuted { lines: u64, last_round: usize },
    /// An ∃ line stayed coherent through `rounds` rounds or past the end of ∀'s line.
    Survived { transcript: Vec<NetRound> },
}

struct Enumerator<'a, R: Refuter> {
    s: &'a AtomStructure,
    refuter: &'a R,
    rounds: usize,
    atoms: Vec<AtomId>,
    lines: u64,
    last_round: usize,
    trail: Vec<NetRound>,
}

impl<R: Refuter> Enumerator<'_, R> {
    /// Returns `true` if some ∃ line survives from `net` at `round`.
    fn survive(&mut self, net: &Network, round: usize) -> bool {
        if round >= self.rounds {
            return true;
        }
        let Some(m) = self.refuter.next_move(round, net) else { return true };
        if net.is_trivial(m) {
            self.trail.push(NetRound::Trivial { round, m });
            if self.survive(net, round + 1) {
                return true;
            }
            self.trail.pop();
            return false;
        }
        let mut col = [IDENTITY; MAX_NODES];
        col[m.x] = m.a;
        col[m.y] = self.s.conv(m.b);
        if m.x == m.y && m.a != self.s.conv(m.b) {
            return self.dead(round);
        }
        let free: Vec<usize> = (0..net.len()).filter(|&w| w != m.x && w != m.y).collect();
        let fixed: Vec<usize> = if m.x == m.y { vec![m.x] } else { vec![m.x, m.y] };
        let mut found_any = false;
        let survived = self.fill(net, m, round, &mut col, &fixed, &free, 0, &mut found_any);
        if !found_any {
            self.dead(round);
        }
        survived
    }

    fn dead(&mut self, round: usize) -> bool {
        self.lines += 1;
        self.last_round = self.last_round.max(round);
        false
    }

    /// Whether the labels chosen so far at positions `assigned` are coherent with each other.
    fn partial_ok(&self, net: &Network, col: &Column, assigned: &[usize], w: usize) -> bool {
        let e = col[w];
        if !self.s.consistent(net.label(w, w), e, e) {
            return false;
        }
        assigned.iter().all(|&u| self.s.consistent(net.label(u, w), e, col[u]))
    }

    #[allow(clippy::too_many_arguments)]
    fn fill(
        &mut self,
        net: &Network,
        m: ForallMove,
        round: usize,
        col: &mut Column,
        fixed: &[usize],
        free: &[usize],
        k: usize,
        found_any: &mut bool,
    ) -> bool {
        let mut assigned: Vec<usize> = fixed.to_vec();
        assigned.extend_from_slice(&free[..k]);
        if k == 0 {
            for (idx, &u) in fixed.iter().enumerate() {
                if !self.partial_ok(net, col, &fixed[..idx], u) {
                    return false;
                }
            }
        }
        if k == free.len() {
            if net.extension_coherent(self.s, col).is_err() {
                return false;
            }
            *found_any = true;
            let next = net.extend(self.s, col).expect("within node limit");
            self.trail.push(NetRound::Move { round, m, z: net.len(), edges: next.last_column() });
            if self.survive(&next, round + 1) {
                return true;
            }
            self.trail.pop();
            return false;
        }
        let w = free[k];
        for i in 0..self.atoms.len() {
            col[w] = self.atoms[i];
            if self.partial_ok(net, col, &assigned, w) && self.fill(net, m, round, col, fixed, free, k + 1, found_any) {
                return true;
            }
        }
        false
    }
}

/// Checks that `refuter` beats every coherent ∃ line within `rounds` rounds.
///
/// ∃ replies add exactly one node. Extra nodes never help her: restricting a
/// coherent network to the witnesses of ∀'s moves keeps it coherent.
pub fn verify_forall_refutation<R: Refuter>(s: &AtomStructure, refuter: &R, rounds: usize) -> RefutationVerdict {
    let net = initial_response(s, refuter.opening());
    let mut e = Enumerator {
        s,
        refuter,
        rounds,
        atoms: s.atoms().collect(),
        lines: 0,
        last_round: 0,
        trail: vec![NetRound::Opening { atom: refuter.opening(), net: net.clone() }],
    };
    if net.coherent(s).is_err() {
        return RefutationVerdict::Refuted { lines: 1, last_round: 0 };
    }
    if e.survive(&net, 1) {
        RefutationVerdict::Survived { transcript: e.trail }
    } else {
        RefutationVerdict::Refuted { lines: e.lines, last_round: e.last_round }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefuterPlay {
    pub transcript: Vec<NetRound>,
    /// `None` if ∃ survived every round of ∀'s line.
    pub loss: Option<NetLoss>,
}

/// Plays `refuter` against an ∃ strategy for up to `rounds` rounds.
pub fn play_refuter<R: Refuter, S: ExistsStrategy>(
    s: &AtomStructure,
    refuter: &R,
    strategy: &S,
    rounds: usize,
) -> RefuterPlay {
    let mut net = initial_response(s, refuter.opening());
    let mut transcript = vec![NetRound::Opening { atom: refuter.opening(), net: net.clone() }];
    let mut mem = strategy.start(&net);
    for round in 1..rounds {
        let Some(m) = refuter.next_move(round, &net) else { break };
        if net.is_trivial(m) {
            transcript.push(NetRound::Trivial { round, m });
            continue;
        }
        let (col, delta) = match strategy.respond(&net, &mem, m) {
            Ok(r) => r,
            Err(e) => {
                transcript.push(NetRound::Unanswered { round, m });
                return RefuterPlay { transcript, loss: Some(NetLoss::Failure(e)) };
            }
        };
        let next = match net.extend(s, &col) {
            Ok(n) => n,
            Err(e) => return RefuterPlay { transcript, loss: Some(NetLoss::Failure(super::StrategyFailure::Other(e.to_string()))) },
        };
        transcript.push(NetRound::Move { round, m, z: net.len(), edges: next.last_column() });
        if let Err(inc) = next.coherent(s) {
            return RefuterPlay { transcript, loss: Some(NetLoss::Incoherent(inc.describe(&next, s))) };
        }
        strategy.commit(&mut mem, delta);
        net = next;
    }
    RefuterPlay { transcript, loss: None }
}
