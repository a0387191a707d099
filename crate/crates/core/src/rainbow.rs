//! The rainbow atom structure with `s` green atoms and `t × t` red atoms.
//!
//! Atoms are laid out as `1', b, w, y, g0 … g(s-1), r0_0 … r(t-1)_(t-1)`,
//! with red atoms in row-major order of their two indices.

use thiserror::Error;

use crate::atom_structure::{AtomId, AtomStructure, StructureBuilder, StructureError, Triple};
use crate::element::{Element, MAX_ATOMS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RainbowError {
    #[error("rainbow index sets must be non-empty (got s = {s}, t = {t})")]
    EmptyIndexSet { s: usize, t: usize },
    #[error("rainbow structure with s = {s}, t = {t} has {atoms} atoms, more than {MAX_ATOMS}")]
    TooLarge { s: usize, t: usize, atoms: usize },
    #[error("representability prediction needs at least two green atoms (got s = {0})")]
    OutsideHypothesis(usize),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Sizes of the green index set (`s`) and the red index set (`t`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RainbowParams {
    pub s: usize,
    pub t: usize,
}

/// Colour class of a rainbow atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Colour {
    Identity,
    Black,
    White,
    Yellow,
    Green(u8),
    Red(u8, u8),
}

impl Colour {
    pub fn is_green(self) -> bool {
        matches!(self, Colour::Green(_))
    }

    pub fn is_red(self) -> bool {
        matches!(self, Colour::Red(..))
    }
}

pub const IDENTITY: AtomId = AtomId(0);
pub const BLACK: AtomId = AtomId(1);
pub const WHITE: AtomId = AtomId(2);
pub const YELLOW: AtomId = AtomId(3);

impl RainbowParams {
    pub fn new(s: usize, t: usize) -> Result<Self, RainbowError> {
        if s == 0 || t == 0 {
            return Err(RainbowError::EmptyIndexSet { s, t });
        }
        let atoms = 4 + s + t * t;
        if atoms > MAX_ATOMS {
            return Err(RainbowError::TooLarge { s, t, atoms });
        }
        Ok(RainbowParams { s, t })
    }

    pub fn atom_count(self) -> usize {
        4 + self.s + self.t * self.t
    }

    #[inline]
    pub fn green(self, i: usize) -> AtomId {
        debug_assert!(i < self.s);
        AtomId((4 + i) as u8)
    }

    #[inline]
    pub fn red(self, j: usize, j2: usize) -> AtomId {
        debug_assert!(j < self.t && j2 < self.t);
        AtomId((4 + self.s + j * self.t + j2) as u8)
    }

    /// Colour of an atom of `build_rainbow(self)`.
    #[inline]
    pub fn colour(self, a: AtomId) -> Colour {
        match a.index() {
            0 => Colour::Identity,
            1 => Colour::Black,
            2 => Colour::White,
            3 => Colour::Yellow,
            i if i < 4 + self.s => Colour::Green((i - 4) as u8),
            i => {
                let r = i - 4 - self.s;
                Colour::Red((r / self.t) as u8, (r % self.t) as u8)
            }
        }
    }

    /// All green atoms as one element.
    pub fn greens(self) -> Element {
        Element(((1u64 << self.s) - 1) << 4)
    }

    /// Indices `i` with `g_i ≤ x`.
    pub fn green_indices(self, x: Element) -> u64 {
        (x.bits() >> 4) & ((1u64 << self.s) - 1)
    }

    /// Predicted representability: representable iff `s ≤ t`, stated for `s ≥ 2` only.
    pub fn predicted_representable(self) -> Result<bool, RainbowError> {
        if self.s < 2 {
            return Err(RainbowError::OutsideHypothesis(self.s));
        }
        Ok(self.s <= self.t)
    }

    /// Recovers the parameters of a structure that is exactly a rainbow structure.
    pub fn recognize(s: &AtomStructure) -> Option<RainbowParams> {
        let names = s.names();
        if names.len() < 6 || names[..4] != ["1'", "b", "w", "y"] {
            return None;
        }
        let greens = names[4..].iter().take_while(|n| n.starts_with('g')).count();
        let reds = names.len() - 4 - greens;
        let t = (reds as f64).sqrt().round() as usize;
        if t * t != reds {
            return None;
        }
        let p = RainbowParams::new(greens, t).ok()?;
        match build_rainbow(p) {
            Ok(r) if &r == s => Some(p),
            _ => None,
        }
    }
}

pub fn atom_name(p: RainbowParams, a: AtomId) -> String {
    match p.colour(a) {
        Colour::Identity => "1'".to_string(),
        Colour::Black => "b".to_string(),
        Colour::White => "w".to_string(),
        Colour::Yellow => "y".to_string(),
        Colour::Green(i) => format!("g{i}"),
        Colour::Red(j, j2) => format!("r{j}_{j2}"),
    }
}

/// The forbidden-triple generators (I)–(V) of the rainbow structure.
pub fn forbidden_generators(p: RainbowParams) -> Vec<Triple> {
    let n = p.atom_count();
    let atoms = || (0..n).map(|i| AtomId(i as u8));
    let greens = || (0..p.s).map(move |i| p.green(i));
    let mut out = Vec::new();
    // (I)
    for a in atoms() {
        for b in atoms() {
            if a != b {
                out.push(Triple(IDENTITY, a, b));
            }
        }
    }
    // (II)
    for g in greens() {
        for g2 in greens() {
            for g3 in greens() {
                out.push(Triple(g, g2, g3));
            }
            out.push(Triple(g, g2, WHITE));
        }
    }
    // (III)
    out.push(Triple(YELLOW, YELLOW, YELLOW));
    out.push(Triple(YELLOW, YELLOW, BLACK));
    // (IV)
    let t = p.t;
    for j1 in 0..t {
        for j2 in 0..t {
            for j2b in 0..t {
                for j3b in 0..t {
                    for j1s in 0..t {
                        for j3s in 0..t {
                            if !(j1 == j1s && j2 == j2b && j3b == j3s) {
                                out.push(Triple(p.red(j1, j2), p.red(j2b, j3b), p.red(j1s, j3s)));
                            }
                        }
                    }
                }
            }
        }
    }
    // (V)
    for i in 0..p.s {
        for i2 in 0..p.s {
            for j in 0..t {
                for j2 in 0..t {
                    out.push(Triple(p.green(i), p.green(i), p.red(j, j2)));
                }
                out.push(Triple(p.green(i), p.green(i2), p.red(j, j)));
            }
        }
    }
    out
}

/// Builds the rainbow atom structure for `p`.
pub fn build_rainbow(p: RainbowParams) -> Result<AtomStructure, RainbowError> {
    let p = RainbowParams::new(p.s, p.t)?;
    let mut b = StructureBuilder::new();
    for i in 0..p.atom_count() {
        b.atom(&atom_name(p, AtomId(i as u8)))?;
    }
    b.identity(IDENTITY)?;
    for j in 0..p.t {
        for j2 in j + 1..p.t {
            b.converse_pair(p.red(j, j2), p.red(j2, j))?;
        }
    }
    for t in forbidden_generators(p) {
        b.forbid(t)?;
    }
    Ok(b.build()?.validated()?)
}
