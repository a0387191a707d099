//! The n-round colouring game `G_n(T, T')` on two finite sets.
//!
//! Points of `T` and `T'` are `0..|T|` and `0..|T'|`, and subsets are `u64`
//! bitmasks. After `r` rounds a palette only matters through its trace on
//! the colours `0..r`, so a position stores one cell pair per *effective*
//! palette: the `2^r` subsets of `{0..r-1}`, encoded as bitmasks.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest supported set size.
pub const MAX_POINTS: usize = 64;

/// Most rounds a game may have; palettes are stored as `u64` bitsets.
pub const MAX_ROUNDS: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeuratError {
    #[error("all {0} rounds have been played")]
    RoundOverflow(usize),
    #[error("set size {0} exceeds {MAX_POINTS}")]
    TooLarge(usize),
    #[error("at most {MAX_ROUNDS} rounds are supported (got {0})")]
    TooManyRounds(usize),
    #[error("subset {subset:#x} is not contained in a set of size {size}")]
    OutOfRange { subset: u64, size: usize },
}

/// The set a player paints in a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    T,
    TPrime,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::T => Side::TPrime,
            Side::TPrime => Side::T,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::T => "T",
            Side::TPrime => "T'",
        })
    }
}

fn mask(size: usize) -> u64 {
    if size == 64 {
        u64::MAX
    } else {
        (1u64 << size) - 1
    }
}

fn size_of(x: u64) -> usize {
    x.count_ones() as usize
}

/// Formats a subset as `{0,2,5}`.
pub struct SetDisplay(pub u64);

impl fmt::Display for SetDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        let mut x = self.0;
        while x != 0 {
            let i = x.trailing_zeros();
            x &= x - 1;
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeuratPosition {
    n: usize,
    t_size: usize,
    t2_size: usize,
    history: Vec<(u64, u64)>,
    /// `cells[m]` is `(π_T, π_{T'})` for palettes whose trace on `0..r` is `m`.
    cells: Vec<(u64, u64)>,
}

impl SeuratPosition {
    /// The initial position `p_0` of `G_n(T, T')`.
    pub fn new(t_size: usize, t2_size: usize, n: usize) -> Result<Self, SeuratError> {
        for s in [t_size, t2_size] {
            if s > MAX_POINTS {
                return Err(SeuratError::TooLarge(s));
            }
        }
        if n > MAX_ROUNDS {
            return Err(SeuratError::TooManyRounds(n));
        }
        Ok(SeuratPosition { n, t_size, t2_size, history: vec![], cells: vec![(mask(t_size), mask(t2_size))] })
    }

    pub fn rounds(&self) -> usize {
        self.n
    }

    pub fn played(&self) -> usize {
        self.history.len()
    }

    pub fn is_final(&self) -> bool {
        self.played() == self.n
    }

    pub fn size(&self, side: Side) -> usize {
        match side {
            Side::T => self.t_size,
            Side::TPrime => self.t2_size,
        }
    }

    pub fn history(&self) -> &[(u64, u64)] {
        &self.history
    }

    /// `(π_T, π_{T'})` for the palette `pi` (a bitmask over `0..n`).
    pub fn cell(&self, pi: u64) -> (u64, u64) {
        self.cells[(pi & mask(self.played())) as usize]
    }

    /// Cells indexed by effective palette.
    pub fn cells(&self) -> &[(u64, u64)] {
        &self.cells
    }

    pub fn apply_round(&self, tr: u64, t2r: u64) -> Result<SeuratPosition, SeuratError> {
        if self.is_final() {
            return Err(SeuratError::RoundOverflow(self.n));
        }
        for (s, size) in [(tr, self.t_size), (t2r, self.t2_size)] {
            if s & !mask(size) != 0 {
                return Err(SeuratError::OutOfRange { subset: s, size });
            }
        }
        let mut cells = Vec::with_capacity(self.cells.len() * 2);
        cells.extend(self.cells.iter().map(|&(a, b)| (a & !tr, b & !t2r)));
        cells.extend(self.cells.iter().map(|&(a, b)| (a & tr, b & t2r)));
        let mut history = self.history.clone();
        history.push((tr, t2r));
        Ok(SeuratPosition { n: self.n, t_size: self.t_size, t2_size: self.t2_size, history, cells })
    }

    /// The least palette satisfying the ∀-win condition, if any.
    pub fn forall_wins(&self) -> Option<u64> {
        self.cells.iter().position(|&(a, b)| cell_loses(size_of(a), size_of(b))).map(|m| m as u64)
    }

    /// The invariant maintained by the splitting strategy: every cell pair
    /// with a side smaller than `2^{n+1-r}` has equal sizes.
    pub fn dagger(&self) -> bool {
        let theta = 1u128 << (self.n + 1 - self.played());
        self.cells.iter().all(|&(a, b)| {
            let (a, b) = (size_of(a), size_of(b));
            !((a as u128) < theta || (b as u128) < theta) || a == b
        })
    }

    /// Cells as `(palette, |π_T|, |π_{T'}|)`.
    pub fn cell_sizes(&self) -> Vec<(u64, usize, usize)> {
        self.cells.iter().enumerate().map(|(m, &(a, b))| (m as u64, size_of(a), size_of(b))).collect()
    }
}

#[inline]
fn cell_loses(a: usize, b: usize) -> bool {
    a != b && (a < 2 || b < 2)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("strategy failure in round {round}: {reason}")]
pub struct StrategyFailure {
    pub round: usize,
    pub reason: String,
}

/// An ∃-strategy: given ∀'s subset of `side`, choose a subset of the other side.
pub trait SeuratStrategy {
    fn respond(&self, pos: &SeuratPosition, side: Side, chosen: u64) -> Result<u64, StrategyFailure>;
}

/// The splitting strategy for ∃: split each cell so that small cells stay equal.
///
/// Free choices take the lowest-numbered points.
#[derive(Debug, Clone, Copy, Default)]
pub struct Lemma43;

fn lowest(set: u64, k: usize) -> u64 {
    let mut out = 0;
    let mut x = set;
    for _ in 0..k {
        let b = x & x.wrapping_neg();
        out |= b;
        x &= x - 1;
    }
    out
}

impl SeuratStrategy for Lemma43 {
    fn respond(&self, pos: &SeuratPosition, side: Side, chosen: u64) -> Result<u64, StrategyFailure> {
        let r = pos.played();
        if r >= pos.n {
            return Err(StrategyFailure { round: r, reason: "no rounds left".into() });
        }
        let theta = 1usize << (pos.n - r);
        let mut out = 0;
        for (m, &(a, b)) in pos.cells.iter().enumerate() {
            let (own, other) = if side == Side::T { (a, b) } else { (b, a) };
            let inside = size_of(own & chosen);
            let outside = size_of(own & !chosen);
            let avail = size_of(other);
            let want = match (inside < theta, outside < theta) {
                (true, _) => Some(inside),
                (false, true) => avail.checked_sub(outside),
                (false, false) => Some(theta),
            };
            match want {
                Some(k) if k <= avail => out |= lowest(other, k),
                _ => {
                    return Err(StrategyFailure {
                        round: r,
                        reason: format!(
                            "palette {} needs a split ({inside}, {outside}) of a cell with {avail} points",
                            SetDisplay(m as u64)
                        ),
                    })
                }
            }
        }
        Ok(out)
    }
}

/// Solves `G_n` exactly by minimax over cell sizes.
///
/// The state is the sorted multiset of `(|π_T|, |π_{T'}|)` plus rounds left;
/// every move and the win condition depend on nothing else.
pub fn brute_force_winner(t_size: usize, t2_size: usize, n: usize) -> Winner {
    let mut memo = HashMap::new();
    if exists_wins(vec![(t_size, t2_size)], n, &mut memo) {
        Winner::Exists
    } else {
        Winner::Forall
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Winner {
    Exists,
    Forall,
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Winner::Exists => "exists",
            Winner::Forall => "forall",
        })
    }
}

type SizeState = Vec<(usize, usize)>;

fn canonical(mut cells: SizeState) -> SizeState {
    cells.retain(|&c| c != (0, 0));
    cells.sort_unstable();
    cells
}

fn exists_wins(cells: SizeState, left: usize, memo: &mut HashMap<(SizeState, usize), bool>) -> bool {
    let cells = canonical(cells);
    if cells.iter().any(|&(a, b)| cell_loses(a, b)) {
        return false;
    }
    if left == 0 {
        return true;
    }
    let key = (cells, left);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let cells = &key.0;
    let mut win = true;
    'sides: for swap in [false, true] {
        let oriented: Vec<(usize, usize)> = cells.iter().map(|&(a, b)| if swap { (b, a) } else { (a, b) }).collect();
        let mut xs = vec![0usize; oriented.len()];
        loop {
            if !exists_reply(&oriented, &xs, swap, left, memo) {
                win = false;
                break 'sides;
            }
            if !next_vector(&mut xs, oriented.iter().map(|c| c.0)) {
                break;
            }
        }
    }
    memo.insert(key, win);
    win
}

fn exists_reply(
    oriented: &[(usize, usize)],
    xs: &[usize],
    swap: bool,
    left: usize,
    memo: &mut HashMap<(SizeState, usize), bool>,
) -> bool {
    let mut ys = vec![0usize; oriented.len()];
    loop {
        let mut next = Vec::with_capacity(oriented.len() * 2);
        for ((&(a, b), &x), &y) in oriented.iter().zip(xs).zip(&ys) {
            for (p, q) in [(x, y), (a - x, b - y)] {
                next.push(if swap { (q, p) } else { (p, q) });
            }
        }
        if exists_wins(next, left - 1, memo) {
            return true;
        }
        if !next_vector(&mut ys, oriented.iter().map(|c| c.1)) {
            return false;
        }
    }
}

/// Advances `v` as a mixed-radix counter with digit bounds `bounds` (inclusive).
fn next_vector(v: &mut [usize], bounds: impl Iterator<Item = usize>) -> bool {
    for (d, hi) in v.iter_mut().zip(bounds) {
        if *d < hi {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: usize,
    pub side: Side,
    pub forall_set: u64,
    pub exists_set: u64,
    pub cells: Vec<(u64, usize, usize)>,
}

impl fmt::Display for RoundRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "round {} | forall side={} set={} | exists set={} | cells:",
            self.round,
            self.side,
            SetDisplay(self.forall_set),
            SetDisplay(self.exists_set)
        )?;
        for &(pi, a, b) in &self.cells {
            write!(f, " {}→({a},{b})", SetDisplay(pi))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every ∀ move in every round; gives up after `budget` plays.
    Exhaustive { budget: u64 },
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LossReason {
    ForallWin { palette: u64 },
    Failure(StrategyFailure),
    DaggerBroken,
}

impl fmt::Display for LossReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossReason::ForallWin { palette } => write!(f, "forall wins on palette {}", SetDisplay(*palette)),
            LossReason::Failure(e) => write!(f, "{e}"),
            LossReason::DaggerBroken => write!(f, "invariant (†) broken"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeuratVerdict {
    Verified { exhaustive: bool, plays: u64, positions: u64 },
    Losing { transcript: Vec<RoundRecord>, reason: LossReason },
    Inconclusive { plays: u64 },
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub mode: VerifyMode,
    /// Also require `dagger()` at every reached position.
    pub check_dagger: bool,
}

struct Walk<'a, S: SeuratStrategy> {
    strategy: &'a S,
    check_dagger: bool,
    plays: u64,
    positions: u64,
    budget: u64,
    trail: Vec<RoundRecord>,
}

enum Stop {
    Lost(LossReason),
    Budget,
}

impl<S: SeuratStrategy> Walk<'_, S> {
    fn check(&mut self, pos: &SeuratPosition) -> Result<(), Stop> {
        self.positions += 1;
        if let Some(palette) = pos.forall_wins() {
            return Err(Stop::Lost(LossReason::ForallWin { palette }));
        }
        if self.check_dagger && !pos.dagger() {
            return Err(Stop::Lost(LossReason::DaggerBroken));
        }
        Ok(())
    }

    fn step(&mut self, pos: &SeuratPosition, side: Side, chosen: u64) -> Result<SeuratPosition, Stop> {
        let reply = self.strategy.respond(pos, side, chosen).map_err(|e| Stop::Lost(LossReason::Failure(e)))?;
        let (tr, t2r) = if side == Side::T { (chosen, reply) } else { (reply, chosen) };
        let next = pos.apply_round(tr, t2r).map_err(|e| {
            Stop::Lost(LossReason::Failure(StrategyFailure { round: pos.played(), reason: e.to_string() }))
        })?;
        self.trail.push(RoundRecord {
            round: pos.played(),
            side,
            forall_set: chosen,
            exists_set: reply,
            cells: next.cell_sizes(),
        });
        Ok(next)
    }

    fn exhaust(&mut self, pos: &SeuratPosition) -> Result<(), Stop> {
        self.check(pos)?;
        if pos.is_final() {
            if self.plays >= self.budget {
                return Err(Stop::Budget);
            }
            self.plays += 1;
            return Ok(());
        }
        for side in [Side::T, Side::TPrime] {
            for chosen in 0..=mask(pos.size(side)) {
                let next = self.step(pos, side, chosen)?;
                self.exhaust(&next)?;
                self.trail.pop();
            }
        }
        Ok(())
    }
}

/// Plays `strategy` against every (or randomly sampled) ∀ line of `G_n(T, T')`.
pub fn verify_seurat_strategy<S: SeuratStrategy>(
    t_size: usize,
    t2_size: usize,
    n: usize,
    strategy: &S,
    opts: VerifyOptions,
) -> Result<SeuratVerdict, SeuratError> {
    let start = SeuratPosition::new(t_size, t2_size, n)?;
    let mut walk = Walk { strategy, check_dagger: opts.check_dagger, plays: 0, positions: 0, budget: u64::MAX, trail: vec![] };
    let lost = |walk: &mut Walk<S>, reason| SeuratVerdict::Losing { transcript: std::mem::take(&mut walk.trail), reason };
    match opts.mode {
        VerifyMode::Exhaustive { budget } => {
            walk.budget = budget;
            match walk.exhaust(&start) {
                Ok(()) => Ok(SeuratVerdict::Verified { exhaustive: true, plays: walk.plays, positions: walk.positions }),
                Err(Stop::Budget) => Ok(SeuratVerdict::Inconclusive { plays: walk.plays }),
                Err(Stop::Lost(r)) => Ok(lost(&mut walk, r)),
            }
        }
        VerifyMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                walk.trail.clear();
                let mut pos = start.clone();
                let r = (|| {
                    walk.check(&pos)?;
                    while !pos.is_final() {
                        let side = if rng.gen::<bool>() { Side::T } else { Side::TPrime };
                        let chosen = rng.gen::<u64>() & mask(pos.size(side));
                        pos = walk.step(&pos, side, chosen)?;
                        walk.check(&pos)?;
                    }
                    Ok(())
                })();
                match r {
                    Ok(()) => walk.plays += 1,
                    Err(Stop::Lost(reason)) => return Ok(lost(&mut walk, reason)),
                    Err(Stop::Budget) => unreachable!("sampling has no budget"),
                }
            }
            Ok(SeuratVerdict::Verified { exhaustive: false, plays: walk.plays, positions: walk.positions })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_rounds() {
        let p = SeuratPosition::new(3, 4, 1).unwrap();
        let full = p.apply_round(0b111, 0b1111).unwrap();
        assert_eq!(full.cell(1), (0b111, 0b1111));
        assert_eq!(full.cell(0), (0, 0));
        let empty = p.apply_round(0, 0).unwrap();
        assert_eq!(empty.cell(0), (0b111, 0b1111));
        assert_eq!(empty.cell(1), (0, 0));
        assert_eq!(full.apply_round(0, 0), Err(SeuratError::RoundOverflow(1)));
        assert!(p.apply_round(0b1000, 0).is_err());
    }

    #[test]
    fn split_example() {
        let p = SeuratPosition::new(2, 3, 1).unwrap();
        assert_eq!(p.forall_wins(), None);
        let q = p.apply_round(0b1, 0b1).unwrap();
        assert_eq!(q.cell(1), (0b1, 0b1));
        assert_eq!(q.cell(0), (0b10, 0b110));
        assert_eq!(q.forall_wins(), Some(0));
    }

    #[test]
    fn initial_wins() {
        assert_eq!(SeuratPosition::new(1, 2, 0).unwrap().forall_wins(), Some(0));
        assert_eq!(SeuratPosition::new(5, 7, 0).unwrap().forall_wins(), None);
    }

    #[test]
    fn strategy_cases() {
        let p = SeuratPosition::new(4, 4, 1).unwrap();
        // Both parts below 2.
        assert_eq!(Lemma43.respond(&p, Side::T, 0b0001).unwrap().count_ones(), 1);
        // Both parts at least 2: exactly 2.
        assert_eq!(Lemma43.respond(&p, Side::T, 0b0011).unwrap(), 0b0011);
        // Outside part below 2: complement sizes match.
        assert_eq!(Lemma43.respond(&p, Side::TPrime, 0b1110).unwrap(), 0b0111);
        assert_eq!(Lemma43.respond(&p, Side::T, 0).unwrap(), 0);
    }

    #[test]
    fn strategy_failure_is_reported() {
        // A one-point T' cannot answer an even split of four points.
        let p = SeuratPosition::new(4, 1, 1).unwrap();
        assert!(Lemma43.respond(&p, Side::T, 0b0011).is_err());
    }

    #[test]
    fn solver_small_values() {
        assert_eq!(brute_force_winner(2, 3, 1), Winner::Forall);
        assert_eq!(brute_force_winner(4, 4, 1), Winner::Exists);
        assert_eq!(brute_force_winner(1, 1, 3), Winner::Exists);
        assert_eq!(brute_force_winner(0, 1, 0), Winner::Forall);
    }

    #[test]
    fn exhaustive_small_verification() {
        let opts = VerifyOptions { mode: VerifyMode::Exhaustive { budget: u64::MAX }, check_dagger: true };
        let v = verify_seurat_strategy(4, 4, 1, &Lemma43, opts).unwrap();
        assert!(matches!(v, SeuratVerdict::Verified { exhaustive: true, plays: 32, .. }), "{v:?}");
        let v = verify_seurat_strategy(2, 3, 1, &Lemma43, opts).unwrap();
        assert!(matches!(v, SeuratVerdict::Losing { .. }));
    }

    #[test]
    fn budget_gives_inconclusive() {
        let opts = VerifyOptions { mode: VerifyMode::Exhaustive { budget: 5 }, check_dagger: false };
        let v = verify_seurat_strategy(4, 4, 1, &Lemma43, opts).unwrap();
        assert_eq!(v, SeuratVerdict::Inconclusive { plays: 5 });
    }

    #[test]
    fn transcript_format() {
        let p = SeuratPosition::new(2, 3, 1).unwrap();
        let q = p.apply_round(0b1, 0b1).unwrap();
        let rec = RoundRecord { round: 0, side: Side::T, forall_set: 1, exists_set: 1, cells: q.cell_sizes() };
        assert_eq!(rec.to_string(), "round 0 | forall side=T set={0} | exists set={0} | cells: {}→(1,2) {0}→(1,1)");
    }
}
