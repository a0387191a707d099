//! The n-round game `Γ_n(A, B)` on two complex algebras.
//!
//! Each round ∀ picks an element of either algebra and ∃ answers with an
//! element of the other. ∀ wins at a position `q = ((a_0,b_0), …)` when the
//! map `a_i ↦ b_i` does not extend to an isomorphism of the generated
//! subalgebras.
//!
//! The extension is computed as a *paired partition*: a list of block pairs
//! `(α, β)` with the `α` partitioning `1_A` and the `β` partitioning `1_B`.
//! Starting from `(1_A, 1_B)`, blocks are split by the constant `1'`, by the
//! chosen pairs, and then by converses and pairwise compositions of block
//! pairs until stable. The closure of `q` under the operations is then the
//! set of paired unions of blocks, so `q` is good exactly when no split ever
//! leaves one side non-empty and the other empty.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complex_algebra::ComplexAlgebra;
use crate::element::Element;
use crate::rainbow::RainbowParams;
use crate::seurat_game::{self, Lemma43, SeuratPosition, SeuratStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// Evidence that `⟨q⟩` is not a well-defined bijection: the non-zero
/// `element` of `side` is paired with `0` of the other algebra, which is
/// already paired with `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clash {
    pub side: Side,
    pub element: Element,
    /// The operation whose split produced the clash.
    pub via: String,
}

impl fmt::Display for Clash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-element {} is paired with 0 (via {})",
            self.side,
            self.element.to_hex(),
            self.via
        )
    }
}

/// The closure of a position, as paired blocks. Sorted by first component.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairClosure {
    blocks: Vec<(Element, Element)>,
}

impl PairClosure {
    /// Closes `pairs` together with the constants.
    pub fn compute(a: &ComplexAlgebra, b: &ComplexAlgebra, pairs: &[(Element, Element)]) -> Result<Self, Clash> {
        let mut c = PairClosure { blocks: vec![] };
        match (a.one().is_zero(), b.one().is_zero()) {
            (true, true) => return Ok(c),
            (false, false) => c.blocks.push((a.one(), b.one())),
            (za, _) => {
                let (side, element) = if za { (Side::B, b.one()) } else { (Side::A, a.one()) };
                return Err(Clash { side, element, via: "the constant 1".into() });
            }
        }
        c.refine((a.identity(), b.identity()), "the constant 1'")?;
        for (i, &p) in pairs.iter().enumerate() {
            c.refine(p, &format!("pair {i}"))?;
        }
        c.saturate(a, b)?;
        c.blocks.sort();
        Ok(c)
    }

    /// Adds one more pair to an already closed position.
    pub fn extend(&self, a: &ComplexAlgebra, b: &ComplexAlgebra, p: (Element, Element)) -> Result<Self, Clash> {
        let mut c = self.clone();
        if c.refine(p, "the new pair")? {
            c.saturate(a, b)?;
            c.blocks.sort();
        }
        Ok(c)
    }

    fn saturate(&mut self, a: &ComplexAlgebra, b: &ComplexAlgebra) -> Result<(), Clash> {
        loop {
            let snapshot = self.blocks.clone();
            let mut changed = false;
            for &(x, y) in &snapshot {
                changed |= self.refine((a.converse(x), b.converse(y)), "converse")?;
            }
            for &(x1, y1) in &snapshot {
                for &(x2, y2) in &snapshot {
                    changed |= self.refine((a.compose(x1, x2), b.compose(y1, y2)), "composition")?;
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    fn refine(&mut self, (g, h): (Element, Element), via: &str) -> Result<bool, Clash> {
        let mut changed = false;
        for i in 0..self.blocks.len() {
            let (x, y) = self.blocks[i];
            let (xi, yi) = (x & g, y & h);
            let (xo, yo) = (Element(x.bits() & !g.bits()), Element(y.bits() & !h.bits()));
            for (p, q) in [(xi, yi), (xo, yo)] {
                if p.is_zero() != q.is_zero() {
                    let (side, element) = if p.is_zero() { (Side::B, q) } else { (Side::A, p) };
                    return Err(Clash { side, element, via: via.to_string() });
                }
            }
            if !xi.is_zero() && !xo.is_zero() {
                self.blocks[i] = (xi, yi);
                self.blocks.push((xo, yo));
                changed = true;
            }
        }
        Ok(changed)
    }

    /// The paired atoms of the two generated subalgebras.
    pub fn blocks(&self) -> &[(Element, Element)] {
        &self.blocks
    }

    /// The image of `x` under the isomorphism, if `x` is in the closure.
    pub fn image(&self, side: Side, x: Element) -> Option<Element> {
        let mut out = Element::ZERO;
        let mut covered = Element::ZERO;
        for &(p, q) in &self.blocks {
            let (from, to) = if side == Side::A { (p, q) } else { (q, p) };
            let meet = from & x;
            if meet.is_zero() {
                continue;
            }
            if meet != from {
                return None;
            }
            covered |= from;
            out |= to;
        }
        (covered == x).then_some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PositionStatus {
    ExistsOk(PairClosure),
    ForallWin(Clash),
}

impl PositionStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, PositionStatus::ExistsOk(_))
    }
}

/// Decides whether `q` is still good for ∃.
pub fn position_winner(a: &ComplexAlgebra, b: &ComplexAlgebra, q: &[(Element, Element)]) -> PositionStatus {
    match PairClosure::compute(a, b, q) {
        Ok(c) => PositionStatus::ExistsOk(c),
        Err(w) => PositionStatus::ForallWin(w),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EfError {
    #[error("exhaustive search is limited to n <= 1 and algebras with at most 2^13 elements")]
    ExhaustiveTooLarge,
    #[error("solver budget of {0} positions exceeded")]
    Budget(u64),
    #[error("the algebras are not rainbow algebras over the same red index set")]
    NotRainbowPair,
    #[error("{0}")]
    Strategy(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Winner {
    Exists,
    Forall,
}

/// Exact value of `Γ_n(A, B, q)` by minimax.
///
/// Positions are memoised on their closure plus rounds left: the closure
/// determines both the current status and every future one. Moves already
/// inside the closure are skipped, since they leave the closure unchanged.
pub fn brute_force_winner(
    a: &ComplexAlgebra,
    b: &ComplexAlgebra,
    q: &[(Element, Element)],
    n: usize,
    budget: u64,
) -> Result<Winner, EfError> {
    let Ok(c) = PairClosure::compute(a, b, q) else { return Ok(Winner::Forall) };
    let mut solver = Solver { a, b, memo: HashMap::new(), budget, visited: 0 };
    Ok(if solver.exists_wins(&c, n)? { Winner::Exists } else { Winner::Forall })
}

struct Solver<'a> {
    a: &'a ComplexAlgebra,
    b: &'a ComplexAlgebra,
    memo: HashMap<(PairClosure, usize), bool>,
    budget: u64,
    visited: u64,
}

impl Solver<'_> {
    fn exists_wins(&mut self, c: &PairClosure, left: usize) -> Result<bool, EfError> {
        if left == 0 {
            return Ok(true);
        }
        let key = (c.clone(), left);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.visited += 1;
        if self.visited > self.budget {
            return Err(EfError::Budget(self.budget));
        }
        let mut win = true;
        'moves: for side in [Side::A, Side::B] {
            let (from, to) = if side == Side::A { (self.a, self.b) } else { (self.b, self.a) };
            for x in from.elements() {
                if c.image(side, x).is_some() {
                    continue;
                }
                let mut answered = false;
                for y in to.elements() {
                    let p = if side == Side::A { (x, y) } else { (y, x) };
                    if let Ok(next) = c.extend(self.a, self.b, p) {
                        if self.exists_wins(&next, left - 1)? {
                            answered = true;
                            break;
                        }
                    }
                }
                if !answered {
                    win = false;
                    break 'moves;
                }
            }
        }
        self.memo.insert(key, win);
        Ok(win)
    }
}

/// A deterministic ∃-strategy for `Γ_n`, with state carried along a play.
pub trait EfStrategy {
    type State: Clone;
    fn start(&self) -> Self::State;
    fn respond(&self, state: &Self::State, side: Side, x: Element) -> Result<(Element, Self::State), EfError>;
}

/// Answers every move with the same element; for `A = B`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Mirror;

impl EfStrategy for Mirror {
    type State = ();
    fn start(&self) {}
    fn respond(&self, _: &(), _: Side, x: Element) -> Result<(Element, ()), EfError> {
        Ok((x, ()))
    }
}

/// ∃'s strategy for `Γ_n(B_{T,S}, B_{T',S})` that keeps non-green parts and
/// plays the green parts through the splitting strategy [`Lemma43`] in `G_n(T, T')`.
#[derive(Debug, Clone, Copy)]
pub struct Prop44 {
    pa: RainbowParams,
    pb: RainbowParams,
    rounds: usize,
}

impl Prop44 {
    /// For rainbow parameters sharing the red index set, over `rounds` rounds.
    pub fn new(pa: RainbowParams, pb: RainbowParams, rounds: usize) -> Result<Self, EfError> {
        if pa.t != pb.t || pa.s > seurat_game::MAX_POINTS || pb.s > seurat_game::MAX_POINTS {
            return Err(EfError::NotRainbowPair);
        }
        Ok(Prop44 { pa, pb, rounds })
    }

    fn params(&self, side: Side) -> RainbowParams {
        if side == Side::A {
            self.pa
        } else {
            self.pb
        }
    }

    /// Non-green part of `x ∈ side`, moved to the other algebra by atom name.
    pub fn transfer_non_green(&self, side: Side, x: Element) -> Element {
        let (from, to) = (self.params(side), self.params(side.other()));
        let low = x.bits() & 0xf;
        let reds = x.bits() >> (4 + from.s);
        Element(low | reds << (4 + to.s))
    }
}

impl EfStrategy for Prop44 {
    type State = SeuratPosition;

    fn start(&self) -> SeuratPosition {
        SeuratPosition::new(self.pa.s, self.pb.s, self.rounds).expect("sizes checked")
    }

    fn respond(&self, pos: &SeuratPosition, side: Side, x: Element) -> Result<(Element, SeuratPosition), EfError> {
        let fail = |e: String| EfError::Strategy(e);
        let chosen = self.params(side).green_indices(x);
        let sside = if side == Side::A { seurat_game::Side::T } else { seurat_game::Side::TPrime };
        let reply = Lemma43.respond(pos, sside, chosen).map_err(|e| fail(e.to_string()))?;
        let (tr, t2r) = if side == Side::A { (chosen, reply) } else { (reply, chosen) };
        let next = pos.apply_round(tr, t2r).map_err(|e| fail(e.to_string()))?;
        let y = self.transfer_non_green(side, x) | Element(reply << 4);
        Ok((y, next))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfRound {
    pub round: usize,
    pub side: Side,
    pub forall: Element,
    pub exists: Element,
    pub status: String,
}

impl fmt::Display for EfRound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "round {} | forall: side={} elem={} | exists: elem={} | {}",
            self.round,
            self.side,
            self.forall.to_hex(),
            self.exists.to_hex(),
            self.status
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EfMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EfVerdict {
    /// Every reached position was good for ∃.
    Verified { exhaustive: bool, plays: u64, positions: u64 },
    Losing { transcript: Vec<EfRound>, reason: String },
}

struct EfWalk<'a, S: EfStrategy> {
    a: &'a ComplexAlgebra,
    b: &'a ComplexAlgebra,
    strategy: &'a S,
    plays: u64,
    positions: u64,
    trail: Vec<EfRound>,
}

impl<S: EfStrategy> EfWalk<'_, S> {
    fn step(
        &mut self,
        closure: &PairClosure,
        state: &S::State,
        side: Side,
        x: Element,
    ) -> Result<(PairClosure, S::State), String> {
        let round = self.trail.len() + 1;
        let (y, next_state) = match self.strategy.respond(state, side, x) {
            Ok(r) => r,
            Err(e) => {
                self.trail.push(EfRound { round, side, forall: x, exists: Element::ZERO, status: "no reply".into() });
                return Err(e.to_string());
            }
        };
        let p = if side == Side::A { (x, y) } else { (y, x) };
        self.positions += 1;
        let (ok, status, next) = match closure.extend(self.a, self.b, p) {
            Ok(c) => (true, "ok".to_string(), Some(c)),
            Err(w) => (false, format!("forall wins: {w}"), None),
        };
        self.trail.push(EfRound { round, side, forall: x, exists: y, status: status.clone() });
        if ok {
            Ok((next.expect("ok"), next_state))
        } else {
            Err(status)
        }
    }

    fn exhaust(&mut self, closure: &PairClosure, state: &S::State, left: usize) -> Result<(), String> {
        if left == 0 {
            self.plays += 1;
            return Ok(());
        }
        for side in [Side::A, Side::B] {
            let alg = if side == Side::A { self.a } else { self.b };
            for x in alg.elements() {
                let (c, st) = self.step(closure, state, side, x)?;
                self.exhaust(&c, &st, left - 1)?;
                self.trail.pop();
            }
        }
        Ok(())
    }
}

/// Plays `strategy` against all (or random) ∀ lines of `Γ_n(A, B)`, checking
/// every reached position with [`position_winner`].
pub fn verify_ef_strategy<S: EfStrategy>(
    a: &ComplexAlgebra,
    b: &ComplexAlgebra,
    strategy: &S,
    n: usize,
    mode: EfMode,
) -> Result<EfVerdict, EfError> {
    let start = match PairClosure::compute(a, b, &[]) {
        Ok(c) => c,
        Err(w) => return Ok(EfVerdict::Losing { transcript: vec![], reason: format!("forall wins: {w}") }),
    };
    let mut walk = EfWalk { a, b, strategy, plays: 0, positions: 1, trail: vec![] };
    match mode {
        EfMode::Exhaustive => {
            if n > 1 || a.atom_count() > 13 || b.atom_count() > 13 {
                return Err(EfError::ExhaustiveTooLarge);
            }
            if let Err(reason) = walk.exhaust(&start, &strategy.start(), n) {
                return Ok(EfVerdict::Losing { transcript: walk.trail, reason });
            }
            Ok(EfVerdict::Verified { exhaustive: true, plays: walk.plays, positions: walk.positions })
        }
        EfMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                walk.trail.clear();
                let (mut c, mut st) = (start.clone(), strategy.start());
                for _ in 0..n {
                    let side = if rng.gen::<bool>() { Side::A } else { Side::B };
                    let alg = if side == Side::A { a } else { b };
                    let x = Element(rng.gen::<u64>() & alg.one().bits());
                    match walk.step(&c, &st, side, x) {
                        Ok(next) => (c, st) = next,
                        Err(reason) => return Ok(EfVerdict::Losing { transcript: walk.trail, reason }),
                    }
                }
                walk.plays += 1;
            }
            Ok(EfVerdict::Verified { exhaustive: false, plays: walk.plays, positions: walk.positions })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom_structure::StructureBuilder;
    use crate::rainbow::build_rainbow;

    fn rainbow(s: usize, t: usize) -> (RainbowParams, ComplexAlgebra) {
        let p = RainbowParams::new(s, t).unwrap();
        (p, ComplexAlgebra::new(build_rainbow(p).unwrap()))
    }

    /// The boolean structure with `k` atoms, each its own identity.
    fn boolean(k: usize) -> ComplexAlgebra {
        let mut b = StructureBuilder::new();
        let atoms: Vec<_> = (0..k).map(|i| b.atom(&format!("e{i}")).unwrap()).collect();
        for &a in &atoms {
            b.identity(a).unwrap();
        }
        ComplexAlgebra::new(b.build().unwrap())
    }

    #[test]
    fn identity_pairs_are_good() {
        let (_, a) = rainbow(2, 2);
        for x in a.elements().step_by(97) {
            assert!(position_winner(&a, &a, &[(x, x)]).is_ok());
        }
    }

    #[test]
    fn constants_clash() {
        let (_, a) = rainbow(2, 2);
        assert!(matches!(position_winner(&a, &a, &[(a.one(), a.zero())]), PositionStatus::ForallWin(_)));
    }

    #[test]
    fn green_vs_black_fails() {
        let (pa, a) = rainbow(2, 2);
        let (_, b) = rainbow(3, 2);
        let g0 = Element::atom(pa.green(0));
        let black = Element::atom(crate::rainbow::BLACK);
        assert!(matches!(position_winner(&a, &b, &[(g0, black)]), PositionStatus::ForallWin(_)));
    }

    #[test]
    fn closure_matches_generated_subalgebras() {
        let (pa, a) = rainbow(2, 2);
        let (_, b) = rainbow(3, 2);
        let st = Prop44::new(pa, RainbowParams::new(3, 2).unwrap(), 1).unwrap();
        for x in a.elements().step_by(13) {
            let (y, _) = st.respond(&st.start(), Side::A, x).unwrap();
            if let PositionStatus::ExistsOk(c) = position_winner(&a, &b, &[(x, y)]) {
                let mut left: Vec<Element> = c.blocks().iter().map(|p| p.0).collect();
                let mut right: Vec<Element> = c.blocks().iter().map(|p| p.1).collect();
                left.sort();
                right.sort();
                assert_eq!(left, a.generate_subalgebra(&[x]).atoms());
                assert_eq!(right, b.generate_subalgebra(&[y]).atoms());
                assert_eq!(c.image(Side::A, x), Some(y));
            }
        }
    }

    #[test]
    fn solver_on_boolean_algebras() {
        let (b2, b3) = (boolean(2), boolean(3));
        assert_eq!(brute_force_winner(&b2, &b2, &[], 3, 1 << 20), Ok(Winner::Exists));
        assert_eq!(brute_force_winner(&b2, &b3, &[], 0, 1 << 20), Ok(Winner::Exists));
        assert_eq!(brute_force_winner(&b2, &b3, &[], 3, 1 << 20), Ok(Winner::Forall));
    }

    #[test]
    fn prop44_examples() {
        let pa = RainbowParams::new(4, 2).unwrap();
        let pb = RainbowParams::new(5, 2).unwrap();
        let st = Prop44::new(pa, pb, 1).unwrap();
        let s0 = st.start();
        let white = Element::atom(crate::rainbow::WHITE) | Element::atom(pa.red(1, 0));
        assert_eq!(st.respond(&s0, Side::A, white).unwrap().0, Element::atom(crate::rainbow::WHITE) | Element::atom(pb.red(1, 0)));
        let one_a = Element::full(pa.atom_count());
        assert_eq!(st.respond(&s0, Side::A, one_a).unwrap().0, Element::full(pb.atom_count()));
        let y = st.respond(&s0, Side::A, Element::atom(pa.green(0))).unwrap().0;
        assert_eq!(y.count(), 1);
        assert_eq!(pb.green_indices(y).count_ones(), 1);
    }

    #[test]
    fn mirror_and_sampling() {
        let (_, a) = rainbow(2, 2);
        let v = verify_ef_strategy(&a, &a, &Mirror, 3, EfMode::Sampled { samples: 200, seed: 7 }).unwrap();
        assert!(matches!(v, EfVerdict::Verified { exhaustive: false, plays: 200, .. }));
        assert_eq!(verify_ef_strategy(&a, &a, &Mirror, 2, EfMode::Exhaustive), Err(EfError::ExhaustiveTooLarge));
    }
}
