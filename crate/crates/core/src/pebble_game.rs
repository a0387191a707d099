//! The `c`-pebble game on two atom structures read as relational structures
//! over `{Id, Cv, Cs, =}`.
//!
//! Each round ∀ takes pebble `k` (placed or not), puts it on an atom of
//! either structure, and ∃ puts its partner on an atom of the other. ∀ wins
//! as soon as the pebbled pairs stop being a partial isomorphism.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::atom_structure::{AtomId, AtomStructure};
use crate::rainbow::{Colour, RainbowParams};

/// Most pebbles a game may use.
pub const MAX_PEBBLES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PebbleError {
    #[error("pebble count must be between 1 and {MAX_PEBBLES} (got {0})")]
    PebbleCount(usize),
    #[error("both structures must be rainbow structures with the same red index set")]
    NotRainbowPair,
}

/// One of the two structures. `L` is the first argument of every function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::L => "L",
            Side::R => "R",
        })
    }
}

/// An atom structure seen as a relational structure: unary `Id`, binary
/// `Cv` (`b = a˘`) and ternary `Cs` (consistent triples).
#[derive(Debug, Clone, Copy)]
pub struct AtomRelStructure<'a> {
    s: &'a AtomStructure,
}

impl<'a> AtomRelStructure<'a> {
    pub fn new(s: &'a AtomStructure) -> Self {
        AtomRelStructure { s }
    }

    pub fn structure(&self) -> &'a AtomStructure {
        self.s
    }

    pub fn id(&self, a: AtomId) -> bool {
        self.s.identity().contains(a)
    }

    pub fn cv(&self, a: AtomId, b: AtomId) -> bool {
        self.s.conv(a) == b
    }

    pub fn cs(&self, a: AtomId, b: AtomId, c: AtomId) -> bool {
        self.s.consistent(a, b, c)
    }
}

/// Pebble `k` sits on `(left atom, right atom)` when `pairs[k]` is set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PebblePosition {
    pairs: Vec<Option<(AtomId, AtomId)>>,
}

impl PebblePosition {
    pub fn new(c: usize) -> Result<Self, PebbleError> {
        if c == 0 || c > MAX_PEBBLES {
            return Err(PebbleError::PebbleCount(c));
        }
        Ok(PebblePosition { pairs: vec![None; c] })
    }

    pub fn pebbles(&self) -> usize {
        self.pairs.len()
    }

    pub fn get(&self, k: usize) -> Option<(AtomId, AtomId)> {
        self.pairs[k]
    }

    pub fn placed(&self) -> impl Iterator<Item = (usize, (AtomId, AtomId))> + '_ {
        self.pairs.iter().enumerate().filter_map(|(k, p)| p.map(|p| (k, p)))
    }

    /// The atom under pebble `k` on `side`.
    pub fn atom(&self, k: usize, side: Side) -> Option<AtomId> {
        self.pairs[k].map(|(a, b)| if side == Side::L { a } else { b })
    }

    pub fn place(&mut self, k: usize, left: AtomId, right: AtomId) {
        self.pairs[k] = Some((left, right));
    }
}

/// Checks that the pebbled pairs form a partial isomorphism. On failure the
/// error names the first relation that disagrees.
pub fn partial_iso(l: AtomRelStructure, r: AtomRelStructure, pos: &PebblePosition) -> Result<(), String> {
    let pairs: Vec<(AtomId, AtomId)> = pos.placed().map(|(_, p)| p).collect();
    check_pairs(l, r, &pairs)
}

fn check_pairs(l: AtomRelStructure, r: AtomRelStructure, pairs: &[(AtomId, AtomId)]) -> Result<(), String> {
    let (ln, rn) = (|a: AtomId| l.s.name(a).to_string(), |b: AtomId| r.s.name(b).to_string());
    let show = |p: (AtomId, AtomId)| format!("{}↦{}", ln(p.0), rn(p.1));
    for (i, &p) in pairs.iter().enumerate() {
        if l.id(p.0) != r.id(p.1) {
            return Err(format!("Id disagrees on {}", show(p)));
        }
        for &q in &pairs[..=i] {
            if (p.0 == q.0) != (p.1 == q.1) {
                return Err(format!("= disagrees on {}, {}", show(q), show(p)));
            }
        }
    }
    for &p in pairs {
        for &q in pairs {
            if l.cv(p.0, q.0) != r.cv(p.1, q.1) {
                return Err(format!("Cv disagrees on {}, {}", show(p), show(q)));
            }
            for &u in pairs {
                if l.cs(p.0, q.0, u.0) != r.cs(p.1, q.1, u.1) {
                    return Err(format!(
                        "Cs disagrees on ({}, {}, {}) vs ({}, {}, {})",
                        ln(p.0),
                        ln(q.0),
                        ln(u.0),
                        rn(p.1),
                        rn(q.1),
                        rn(u.1)
                    ));
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PebbleMove {
    pub pebble: usize,
    pub side: Side,
    pub atom: AtomId,
}

/// An ∃-strategy: the atom for pebble `m.pebble` on the other side.
pub trait PebbleStrategy {
    fn respond(&self, pos: &PebblePosition, m: PebbleMove) -> Result<AtomId, String>;
}

/// Plays the same atom index; for identical structures.
#[derive(Debug, Clone, Copy, Default)]
pub struct MirrorPebbles;

impl PebbleStrategy for MirrorPebbles {
    fn respond(&self, _: &PebblePosition, m: PebbleMove) -> Result<AtomId, String> {
        Ok(m.atom)
    }
}

/// Green-matching strategy for two rainbow structures over the same reds:
/// copy a pebbled atom's partner, copy non-green atoms by name, and answer a
/// fresh green with the least green not under another pebble.
#[derive(Debug, Clone, Copy)]
pub struct Cor33 {
    pl: RainbowParams,
    pr: RainbowParams,
}

impl Cor33 {
    pub fn new(l: &AtomStructure, r: &AtomStructure) -> Result<Self, PebbleError> {
        match (RainbowParams::recognize(l), RainbowParams::recognize(r)) {
            (Some(pl), Some(pr)) if pl.t == pr.t => Ok(Cor33 { pl, pr }),
            _ => Err(PebbleError::NotRainbowPair),
        }
    }

    fn params(&self, side: Side) -> RainbowParams {
        if side == Side::L {
            self.pl
        } else {
            self.pr
        }
    }
}

impl PebbleStrategy for Cor33 {
    fn respond(&self, pos: &PebblePosition, m: PebbleMove) -> Result<AtomId, String> {
        let other = m.side.other();
        if let Some((k, _)) = pos.placed().find(|&(k, _)| pos.atom(k, m.side) == Some(m.atom)) {
            return Ok(pos.atom(k, other).expect("placed"));
        }
        let (from, to) = (self.params(m.side), self.params(other));
        match from.colour(m.atom) {
            Colour::Green(_) => {
                let used: Vec<AtomId> =
                    pos.placed().filter(|&(k, _)| k != m.pebble).filter_map(|(k, _)| pos.atom(k, other)).collect();
                (0..to.s)
                    .map(|i| to.green(i))
                    .find(|g| !used.contains(g))
                    .ok_or_else(|| format!("no free green atom among {} on side {other}", to.s))
            }
            Colour::Red(j, j2) => Ok(to.red(j as usize, j2 as usize)),
            _ => Ok(m.atom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PebbleRound {
    pub round: usize,
    pub side: Side,
    pub pebble: usize,
    pub forall: String,
    pub exists: Option<String>,
    pub status: String,
}

impl fmt::Display for PebbleRound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "round {} | forall: struct={} pebble={} atom={} | exists: ", self.round, self.side, self.pebble, self.forall)?;
        match &self.exists {
            Some(a) => write!(f, "atom={a}")?,
            None => f.write_str("no reply")?,
        }
        write!(f, " | {}", self.status)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PebbleMode {
    Exhaustive { budget: u64 },
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PebbleVerdict {
    /// No ∀ line tried won within `rounds` rounds.
    Verified { exhaustive: bool, plays: u64 },
    Losing { transcript: Vec<PebbleRound>, reason: String },
    Inconclusive { plays: u64 },
}

struct Walk<'a, S: PebbleStrategy> {
    l: AtomRelStructure<'a>,
    r: AtomRelStructure<'a>,
    strategy: &'a S,
    trail: Vec<PebbleRound>,
    plays: u64,
}

impl<'a, S: PebbleStrategy> Walk<'a, S> {
    fn structure(&self, side: Side) -> &'a AtomStructure {
        if side == Side::L {
            self.l.s
        } else {
            self.r.s
        }
    }

    fn step(&mut self, pos: &PebblePosition, m: PebbleMove) -> Result<PebblePosition, String> {
        let round = self.trail.len() + 1;
        let forall = self.structure(m.side).name(m.atom).to_string();
        let mut rec = PebbleRound { round, side: m.side, pebble: m.pebble, forall, exists: None, status: String::new() };
        let reply = match self.strategy.respond(pos, m) {
            Ok(a) if a.index() < self.structure(m.side.other()).len() => a,
            Ok(a) => Err(format!("reply {a} is not an atom"))?,
            Err(e) => {
                rec.status = e.clone();
                self.trail.push(rec);
                return Err(e);
            }
        };
        rec.exists = Some(self.structure(m.side.other()).name(reply).to_string());
        let mut next = pos.clone();
        match m.side {
            Side::L => next.place(m.pebble, m.atom, reply),
            Side::R => next.place(m.pebble, reply, m.atom),
        }
        let res = partial_iso(self.l, self.r, &next);
        rec.status = match &res {
            Ok(()) => "ok".into(),
            Err(e) => format!("forall wins: {e}"),
        };
        self.trail.push(rec);
        res.map(|()| next)
    }

    fn exhaust(&mut self, pos: &PebblePosition, left: usize, budget: u64) -> Result<bool, String> {
        if left == 0 {
            self.plays += 1;
            return Ok(self.plays <= budget);
        }
        for pebble in 0..pos.pebbles() {
            for side in [Side::L, Side::R] {
                for atom in self.structure(side).atoms() {
                    let next = self.step(pos, PebbleMove { pebble, side, atom })?;
                    if !self.exhaust(&next, left - 1, budget)? {
                        return Ok(false);
                    }
                    self.trail.pop();
                }
            }
        }
        Ok(true)
    }
}

/// Plays `strategy` for `rounds` rounds with `c` pebbles against all (or
/// random) ∀ lines.
pub fn verify_pebble_strategy<S: PebbleStrategy>(
    l: &AtomStructure,
    r: &AtomStructure,
    strategy: &S,
    c: usize,
    rounds: usize,
    mode: PebbleMode,
) -> Result<PebbleVerdict, PebbleError> {
    let start = PebblePosition::new(c)?;
    let mut walk = Walk { l: AtomRelStructure::new(l), r: AtomRelStructure::new(r), strategy, trail: vec![], plays: 0 };
    match mode {
        PebbleMode::Exhaustive { budget } => match walk.exhaust(&start, rounds, budget) {
            Ok(true) => Ok(PebbleVerdict::Verified { exhaustive: true, plays: walk.plays }),
            Ok(false) => Ok(PebbleVerdict::Inconclusive { plays: budget }),
            Err(reason) => Ok(PebbleVerdict::Losing { transcript: walk.trail, reason }),
        },
        PebbleMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                walk.trail.clear();
                let mut pos = start.clone();
                for _ in 0..rounds {
                    let side = if rng.gen::<bool>() { Side::L } else { Side::R };
                    let n = walk.structure(side).len();
                    let m = PebbleMove { pebble: rng.gen_range(0..c), side, atom: AtomId(rng.gen_range(0..n) as u8) };
                    match walk.step(&pos, m) {
                        Ok(next) => pos = next,
                        Err(reason) => return Ok(PebbleVerdict::Losing { transcript: walk.trail, reason }),
                    }
                }
                walk.plays += 1;
            }
            Ok(PebbleVerdict::Verified { exhaustive: false, plays: walk.plays })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Winner {
    Exists,
    Forall,
}

/// Exact winner of the `rounds`-round `c`-pebble game from the empty position.
///
/// Positions are memoised as sorted pair lists: pebbles are interchangeable,
/// so only the multiset of pebbled pairs matters. Returns `None` once more
/// than `budget` positions have been expanded.
pub fn pebble_winner(l: &AtomStructure, r: &AtomStructure, c: usize, rounds: usize, budget: u64) -> Option<Winner> {
    let mut solver = Solver { l: AtomRelStructure::new(l), r: AtomRelStructure::new(r), c, memo: HashMap::new(), budget };
    solver.exists_wins(&[], rounds).map(|w| if w { Winner::Exists } else { Winner::Forall })
}

struct Solver<'a> {
    l: AtomRelStructure<'a>,
    r: AtomRelStructure<'a>,
    c: usize,
    memo: HashMap<(Vec<(AtomId, AtomId)>, usize), bool>,
    budget: u64,
}

impl Solver<'_> {
    fn exists_wins(&mut self, pairs: &[(AtomId, AtomId)], left: usize) -> Option<bool> {
        if left == 0 {
            return Some(true);
        }
        let mut key = pairs.to_vec();
        key.sort();
        key.dedup();
        if let Some(&v) = self.memo.get(&(key.clone(), left)) {
            return Some(v);
        }
        if self.memo.len() as u64 >= self.budget {
            return None;
        }
        // Lifting nothing when a pebble is free, otherwise each placed pebble.
        let lifts: Vec<Option<usize>> =
            if pairs.len() < self.c { vec![None] } else { (0..pairs.len()).map(Some).collect() };
        let mut win = true;
        'forall: for lift in lifts {
            let mut base = pairs.to_vec();
            if let Some(i) = lift {
                base.swap_remove(i);
            }
            for side in [Side::L, Side::R] {
                let (from, to) = if side == Side::L { (self.l.s, self.r.s) } else { (self.r.s, self.l.s) };
                for x in from.atoms() {
                    let mut answered = false;
                    for y in to.atoms() {
                        let p = if side == Side::L { (x, y) } else { (y, x) };
                        base.push(p);
                        let ok = check_pairs(self.l, self.r, &base).is_ok() && self.exists_wins(&base, left - 1)?;
                        base.pop();
                        if ok {
                            answered = true;
                            break;
                        }
                    }
                    if !answered {
                        win = false;
                        break 'forall;
                    }
                }
            }
        }
        self.memo.insert((key, left), win);
        Some(win)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rainbow::{build_rainbow, BLACK, WHITE, YELLOW};

    fn rb(s: usize, t: usize) -> (RainbowParams, AtomStructure) {
        let p = RainbowParams::new(s, t).unwrap();
        (p, build_rainbow(p).unwrap())
    }

    #[test]
    fn partial_iso_examples() {
        let (pa, a) = rb(2, 2);
        let (_, b) = rb(3, 2);
        let (l, r) = (AtomRelStructure::new(&a), AtomRelStructure::new(&b));
        let mut pos = PebblePosition::new(2).unwrap();
        pos.place(0, BLACK, BLACK);
        pos.place(1, WHITE, WHITE);
        assert_eq!(partial_iso(l, r, &pos), Ok(()));
        pos.place(0, pa.green(0), pa.green(0));
        pos.place(1, pa.green(1), pa.green(0));
        assert!(partial_iso(l, r, &pos).unwrap_err().starts_with("="));
        let mut pos = PebblePosition::new(1).unwrap();
        pos.place(0, YELLOW, BLACK);
        assert!(partial_iso(l, r, &pos).unwrap_err().starts_with("Cs"));
    }

    #[test]
    fn cor33_moves() {
        let (pl, l) = rb(2, 2);
        let (pr, r) = rb(6, 2);
        let st = Cor33::new(&l, &r).unwrap();
        let mut pos = PebblePosition::new(2).unwrap();
        let red = PebbleMove { pebble: 0, side: Side::R, atom: pr.red(0, 1) };
        assert_eq!(st.respond(&pos, red), Ok(pl.red(0, 1)));
        pos.place(0, pl.green(0), pr.green(3));
        let fresh = PebbleMove { pebble: 1, side: Side::R, atom: pr.green(5) };
        assert_eq!(st.respond(&pos, fresh), Ok(pl.green(1)));
        let again = PebbleMove { pebble: 1, side: Side::R, atom: pr.green(3) };
        assert_eq!(st.respond(&pos, again), Ok(pl.green(0)));
    }

    #[test]
    fn green_red_triangles() {
        for (p, s) in [rb(2, 2), rb(3, 2)] {
            let rel = AtomRelStructure::new(&s);
            for i in 0..p.s {
                for i2 in 0..p.s {
                    for j in 0..p.t {
                        for j2 in 0..p.t {
                            let cs = rel.cs(p.green(i), p.green(i2), p.red(j, j2));
                            assert_eq!(cs, i != i2 && j != j2);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mirror_wins_on_equal_structures() {
        let (_, a) = rb(2, 2);
        let v = verify_pebble_strategy(&a, &a, &MirrorPebbles, 3, 4, PebbleMode::Sampled { samples: 500, seed: 1 });
        assert_eq!(v, Ok(PebbleVerdict::Verified { exhaustive: false, plays: 500 }));
        assert_eq!(pebble_winner(&a, &a, 2, 2, 1 << 20), Some(Winner::Exists));
    }

    #[test]
    fn too_many_pebbles_lose() {
        let (_, l) = rb(2, 2);
        let (_, r) = rb(3, 2);
        let st = Cor33::new(&l, &r).unwrap();
        let v = verify_pebble_strategy(&l, &r, &st, 3, 3, PebbleMode::Exhaustive { budget: u64::MAX }).unwrap();
        match v {
            PebbleVerdict::Losing { transcript, .. } => assert_eq!(transcript.len(), 3),
            v => panic!("{v:?}"),
        }
    }
}
