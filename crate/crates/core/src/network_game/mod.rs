//! Atomic networks and the atomic network game.
//!
//! A network is a complete labelling of `nodes × nodes` by atoms. In each
//! round ∀ names two nodes `x, y` and atoms `a, b` with `(a, b, N(x,y))`
//! consistent; ∃ must extend the network with a node `z` where
//! `N(x,z) = a` and `N(z,y) = b`. ∀ wins as soon as the labelling is
//! incoherent.
//!
//! Round 0 is ∀'s opening atom, so a game of `K` rounds has `K - 1` moves.

mod rainbow_strategy;
mod refuter;
mod verify;

use std::fmt;

use thiserror::Error;

use crate::atom_structure::{AtomId, AtomStructure};

pub use rainbow_strategy::{least_injection, red_clique, CliqueEntry, RainbowStrategy, RedCliqueBook};
pub use refuter::{
    play_refuter, verify_forall_refutation, RainbowRefuter, RefutationVerdict, Refuter, RefuterPlay,
};
pub use verify::{verify_exists_strategy, ExistsVerifyOptions, NetBudget, NetLoss, NetVerdict};

/// Hard limit on network size.
pub const MAX_NODES: usize = 16;

/// Labels `N(w, z)` of the edges from every existing node `w` to a new node `z`.
pub type Column = [AtomId; MAX_NODES];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("networks are limited to {MAX_NODES} nodes")]
    TooManyNodes,
    #[error("node {0} does not exist")]
    UnknownNode(usize),
    #[error("atom {0} is outside the structure")]
    UnknownAtom(u8),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Network {
    n: usize,
    lab: [[AtomId; MAX_NODES]; MAX_NODES],
}

impl Network {
    /// Builds a network from a full labelling function. Coherence is not checked.
    pub fn from_labels(n: usize, label: impl Fn(usize, usize) -> AtomId) -> Result<Self, NetworkError> {
        if n > MAX_NODES {
            return Err(NetworkError::TooManyNodes);
        }
        let mut lab = [[AtomId(0); MAX_NODES]; MAX_NODES];
        for (x, row) in lab.iter_mut().enumerate().take(n) {
            for (y, l) in row.iter_mut().enumerate().take(n) {
                *l = label(x, y);
            }
        }
        Ok(Network { n, lab })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> AtomId {
        debug_assert!(x < self.n && y < self.n);
        self.lab[x][y]
    }

    /// Adds node `z = len()` with `N(w, z) = column[w]`, converse edges, and the
    /// identity loop matching the labels.
    pub fn extend(&self, s: &AtomStructure, column: &Column) -> Result<Network, NetworkError> {
        let z = self.n;
        if z >= MAX_NODES {
            return Err(NetworkError::TooManyNodes);
        }
        let mut next = self.clone();
        next.n = z + 1;
        for w in 0..z {
            next.lab[w][z] = column[w];
            next.lab[z][w] = s.conv(column[w]);
        }
        next.lab[z][z] = match z {
            0 => s.identity().first().unwrap_or(AtomId(0)),
            _ => left_identity(s, s.conv(column[0])),
        };
        Ok(next)
    }

    /// First coherence failure, scanning loops, converse pairs, then triangles.
    pub fn coherent(&self, s: &AtomStructure) -> Result<(), Incoherence> {
        let n = self.n;
        for x in 0..n {
            if !s.identity().contains(self.lab[x][x]) {
                return Err(Incoherence::Loop(x));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if self.lab[y][x] != s.conv(self.lab[x][y]) {
                    return Err(Incoherence::Converse(x, y));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if !s.consistent(self.lab[x][y], self.lab[y][z], self.lab[x][z]) {
                        return Err(Incoherence::Triangle(x, y, z));
                    }
                }
            }
        }
        Ok(())
    }

    /// Coherence of `self` extended by `column`, assuming `self` is coherent.
    ///
    /// Only triangles through the new node are checked, one orientation per
    /// pair of old nodes; the others follow by Peircean closure.
    #[inline]
    pub fn extension_coherent(&self, s: &AtomStructure, column: &Column) -> Result<(), Incoherence> {
        let n = self.n;
        let z = n;
        if n == 0 {
            return Ok(());
        }
        let e = left_identity(s, s.conv(column[0]));
        if !s.identity().contains(e) {
            return Err(Incoherence::Loop(z));
        }
        for u in 0..n {
            let cu = column[u];
            if !s.consistent(self.lab[u][u], cu, cu) {
                return Err(Incoherence::Triangle(u, u, z));
            }
            if !s.consistent(cu, e, cu) {
                return Err(Incoherence::Triangle(u, z, z));
            }
            for v in u + 1..n {
                if !s.consistent(self.lab[u][v], column[v], cu) {
                    return Err(Incoherence::Triangle(u, v, z));
                }
            }
        }
        Ok(())
    }

    pub fn is_trivial(&self, m: ForallMove) -> bool {
        (0..self.n).any(|z| self.lab[m.x][z] == m.a && self.lab[z][m.y] == m.b)
    }

    pub fn is_legal(&self, s: &AtomStructure, m: ForallMove) -> bool {
        m.x < self.n && m.y < self.n && s.consistent(m.a, m.b, self.lab[m.x][m.y])
    }

    /// Edges `(w, z, N(w,z))` into the last node.
    pub fn last_column(&self) -> Vec<(usize, AtomId)> {
        match self.n {
            0 => vec![],
            n => (0..n - 1).map(|w| (w, self.lab[w][n - 1])).collect(),
        }
    }
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<u8>> = (0..self.n).map(|x| (0..self.n).map(|y| self.lab[x][y].0).collect()).collect();
        f.debug_struct("Network").field("nodes", &self.n).field("labels", &rows).finish()
    }
}

/// The identity atom `e` with `(e, a, a)` consistent, or atom 0 if none.
fn left_identity(s: &AtomStructure, a: AtomId) -> AtomId {
    s.identity().atoms().find(|&e| s.consistent(e, a, a)).unwrap_or(AtomId(0))
}

/// The identity atom `e` with `(a, e, a)` consistent, or atom 0 if none.
fn right_identity(s: &AtomStructure, a: AtomId) -> AtomId {
    s.identity().atoms().find(|&e| s.consistent(a, e, a)).unwrap_or(AtomId(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Incoherence {
    Loop(usize),
    Converse(usize, usize),
    Triangle(usize, usize, usize),
}

impl Incoherence {
    pub fn describe(&self, net: &Network, s: &AtomStructure) -> String {
        let l = |x, y| s.name(net.label(x, y)).to_string();
        match *self {
            Incoherence::Loop(x) => format!("loop at node {x} is not an identity atom"),
            Incoherence::Converse(x, y) => {
                format!("edge ({x},{y}) and its reverse are not converse ({} vs {})", l(x, y), l(y, x))
            }
            Incoherence::Triangle(x, y, z) => {
                format!("triangle ({x},{y},{z}) labelled ({}, {}, {}) is forbidden", l(x, y), l(y, z), l(x, z))
            }
        }
    }
}

/// ∀'s move `(x, y, a, b)`: demand a node `z` with `N(x,z) = a`, `N(z,y) = b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ForallMove {
    pub x: usize,
    pub y: usize,
    pub a: AtomId,
    pub b: AtomId,
}

impl ForallMove {
    /// The equivalent move `(y, x, b˘, a˘)`.
    pub fn swapped(self, s: &AtomStructure) -> ForallMove {
        ForallMove { x: self.y, y: self.x, a: s.conv(self.b), b: s.conv(self.a) }
    }

    pub fn render(&self, s: &AtomStructure) -> String {
        format!("({},{},{},{})", self.x, self.y, s.name(self.a), s.name(self.b))
    }
}

/// ∃'s reply to the opening atom `a`.
pub fn initial_response(s: &AtomStructure, a: AtomId) -> Network {
    if s.identity().contains(a) {
        return Network::from_labels(1, |_, _| a).expect("one node");
    }
    let (ex, ey) = (left_identity(s, a), right_identity(s, a));
    Network::from_labels(2, |x, y| match (x, y) {
        (0, 0) => ex,
        (1, 1) => ey,
        (0, 1) => a,
        _ => s.conv(a),
    })
    .expect("two nodes")
}

/// Legal non-trivial moves without identity atoms, in `(x, y, a, b)` order.
pub fn legal_moves(net: &Network, s: &AtomStructure) -> Vec<ForallMove> {
    let non_id: Vec<AtomId> = s.atoms().filter(|&a| !s.identity().contains(a)).collect();
    let mut out = Vec::new();
    for x in 0..net.len() {
        for y in 0..net.len() {
            for &a in &non_id {
                for &b in &non_id {
                    let m = ForallMove { x, y, a, b };
                    if net.is_legal(s, m) && !net.is_trivial(m) {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// Why a strategy could not answer a move.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyFailure {
    #[error("no injection S -> T exists (|S| = {s} > |T| = {t}); pigeonhole")]
    NoInjection { s: usize, t: usize },
    #[error("move {0} is trivial")]
    TrivialMove(String),
    #[error("{0}")]
    Other(String),
}

/// A deterministic ∃-strategy for the network game.
///
/// `Memory` is carried along a play (e.g. the injections of the rainbow
/// strategy); `respond` returns the new column and a `Delta` that `commit`
/// folds into the memory, so leaves of a search never clone the memory.
pub trait ExistsStrategy {
    type Memory: Clone;
    type Delta;

    fn start(&self, net: &Network) -> Self::Memory;

    fn respond(
        &self,
        net: &Network,
        mem: &Self::Memory,
        m: ForallMove,
    ) -> Result<(Column, Self::Delta), StrategyFailure>;

    fn commit(&self, mem: &mut Self::Memory, delta: Self::Delta);

    /// Whether `m` and `m.swapped()` always get the same reply.
    fn converse_symmetric(&self) -> bool {
        false
    }

    /// Extra checks on the network after a reply to `m`; the new node is last.
    fn check_invariants(&self, _net: &Network, _mem: &Self::Memory, _m: ForallMove) -> Result<(), String> {
        Ok(())
    }
}

/// One line of a network-game transcript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetRound {
    Opening { atom: AtomId, net: Network },
    Move { round: usize, m: ForallMove, z: usize, edges: Vec<(usize, AtomId)> },
    /// ∃ had no reply to `m`.
    Unanswered { round: usize, m: ForallMove },
    /// `m` was already witnessed, so the network is unchanged.
    Trivial { round: usize, m: ForallMove },
}

impl NetRound {
    pub fn render(&self, s: &AtomStructure) -> String {
        match self {
            NetRound::Opening { atom, net } => {
                let nodes: Vec<String> = (0..net.len()).map(|i| i.to_string()).collect();
                let edges = if net.len() == 2 { format!("0→1:{}", s.name(net.label(0, 1))) } else { String::new() };
                format!("round 0 | forall: atom {} | exists: nodes {}, edges {{{edges}}}", s.name(*atom), nodes.join(","))
            }
            NetRound::Move { round, m, z, edges } => {
                let e: Vec<String> = edges.iter().map(|(w, l)| format!("{w}→{z}:{}", s.name(*l))).collect();
                format!("round {round} | forall: {} | exists: +node {z}, edges {{{}}}", m.render(s), e.join(", "))
            }
            NetRound::Unanswered { round, m } => format!("round {round} | forall: {} | exists: no reply", m.render(s)),
            NetRound::Trivial { round, m } => format!("round {round} | forall: {} | exists: unchanged (trivial move)", m.render(s)),
        }
    }
}

pub fn render_transcript(t: &[NetRound], s: &AtomStructure) -> String {
    t.iter().map(|r| r.render(s) + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rainbow::{build_rainbow, RainbowParams, BLACK, IDENTITY, WHITE, YELLOW};

    fn b22() -> (RainbowParams, AtomStructure) {
        let p = RainbowParams::new(2, 2).unwrap();
        (p, build_rainbow(p).unwrap())
    }

    #[test]
    fn coherence_basics() {
        let (_, s) = b22();
        let one = initial_response(&s, IDENTITY);
        assert_eq!(one.len(), 1);
        assert_eq!(one.coherent(&s), Ok(()));
        let two = initial_response(&s, WHITE);
        assert_eq!(two.len(), 2);
        assert_eq!(two.coherent(&s), Ok(()));
        let tri = Network::from_labels(3, |x, y| if x == y { IDENTITY } else { YELLOW }).unwrap();
        assert!(matches!(tri.coherent(&s), Err(Incoherence::Triangle(..))));
        let bad = Network::from_labels(2, |x, y| if x == y { IDENTITY } else if x < y { WHITE } else { BLACK }).unwrap();
        assert_eq!(bad.coherent(&s), Err(Incoherence::Converse(0, 1)));
    }

    #[test]
    fn reds_get_converse_edges() {
        let (p, s) = b22();
        let n = initial_response(&s, p.red(0, 1));
        assert_eq!(n.label(1, 0), p.red(1, 0));
        assert_eq!(n.coherent(&s), Ok(()));
    }

    #[test]
    fn legal_move_filtering() {
        let (p, s) = b22();
        let one = initial_response(&s, IDENTITY);
        let moves = legal_moves(&one, &s);
        assert!(moves.iter().all(|m| m.a != IDENTITY && m.b != IDENTITY));
        assert!(moves.contains(&ForallMove { x: 0, y: 0, a: WHITE, b: WHITE }));
        assert!(moves.iter().all(|m| m.b == s.conv(m.a)));
        let two = initial_response(&s, WHITE);
        let moves = legal_moves(&two, &s);
        assert!(moves.contains(&ForallMove { x: 0, y: 1, a: p.green(0), b: YELLOW }));
        // (0,1,w,·) would be witnessed by node 1 only for b = 1'.
        let witnessed = Network::from_labels(3, |x, y| if x == y { IDENTITY } else { WHITE }).unwrap();
        assert!(witnessed.is_trivial(ForallMove { x: 0, y: 1, a: WHITE, b: WHITE }));
        assert!(!legal_moves(&witnessed, &s).contains(&ForallMove { x: 0, y: 1, a: WHITE, b: WHITE }));
    }

    #[test]
    fn extension_check_agrees_with_full_check() {
        let (p, s) = b22();
        let base = initial_response(&s, WHITE);
        let atoms: Vec<AtomId> = s.atoms().collect();
        for &c0 in &atoms {
            for &c1 in &atoms {
                let mut col = [IDENTITY; MAX_NODES];
                col[0] = c0;
                col[1] = c1;
                let full = base.extend(&s, &col).unwrap().coherent(&s).is_ok();
                assert_eq!(base.extension_coherent(&s, &col).is_ok(), full, "{c0:?} {c1:?}");
            }
        }
        let _ = p;
    }

    #[test]
    fn transcript_lines() {
        let (p, s) = b22();
        let net = initial_response(&s, WHITE);
        assert_eq!(
            NetRound::Opening { atom: WHITE, net }.render(&s),
            "round 0 | forall: atom w | exists: nodes 0,1, edges {0→1:w}"
        );
        let m = ForallMove { x: 0, y: 1, a: p.green(0), b: YELLOW };
        let line = NetRound::Move { round: 1, m, z: 2, edges: vec![(0, p.green(0)), (1, YELLOW)] }.render(&s);
        assert_eq!(line, "round 1 | forall: (0,1,g0,y) | exists: +node 2, edges {0→2:g0, 1→2:y}");
    }
}
