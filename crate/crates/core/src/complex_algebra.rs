//! The complex algebra over a finite atom structure.
//!
//! Elements are atom sets; converse and composition are the atomwise lifts
//! of the structure's tables. Axioms are checked at atom level, which is
//! enough because both operators are completely additive.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::atom_structure::{AtomId, AtomStructure, Triple};
pub use crate::element::Element;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("element {bits:#x} has bits outside a {atoms}-atom structure")]
    Width { bits: u64, atoms: usize },
}

/// A complex algebra: an atom structure plus lifted operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexAlgebra {
    structure: AtomStructure,
    one: Element,
}

impl ComplexAlgebra {
    pub fn new(structure: AtomStructure) -> Self {
        let one = Element::full(structure.len());
        ComplexAlgebra { structure, one }
    }

    pub fn structure(&self) -> &AtomStructure {
        &self.structure
    }

    pub fn atom_count(&self) -> usize {
        self.structure.len()
    }

    /// Wraps raw bits, rejecting bits beyond the atom count.
    pub fn element(&self, bits: u64) -> Result<Element, AlgebraError> {
        if bits & !self.one.bits() != 0 {
            Err(AlgebraError::Width { bits, atoms: self.atom_count() })
        } else {
            Ok(Element(bits))
        }
    }

    #[inline]
    pub fn zero(&self) -> Element {
        Element::ZERO
    }

    #[inline]
    pub fn one(&self) -> Element {
        self.one
    }

    #[inline]
    pub fn identity(&self) -> Element {
        self.structure.identity()
    }

    #[inline]
    pub fn complement(&self, x: Element) -> Element {
        Element(!x.bits() & self.one.bits())
    }

    #[inline]
    pub fn join(&self, x: Element, y: Element) -> Element {
        x | y
    }

    #[inline]
    pub fn meet(&self, x: Element, y: Element) -> Element {
        x & y
    }

    #[inline]
    pub fn converse(&self, x: Element) -> Element {
        x.atoms().fold(Element::ZERO, |acc, a| acc | Element::atom(self.structure.conv(a)))
    }

    /// `x ; y` = set of `c` with `(a, b, c)` consistent for some `a ≤ x`, `b ≤ y`.
    #[inline]
    pub fn compose(&self, x: Element, y: Element) -> Element {
        let mut acc = Element::ZERO;
        for a in x.atoms() {
            for b in y.atoms() {
                acc |= self.structure.product(a, b);
            }
            if acc == self.one {
                break;
            }
        }
        acc
    }

    /// Number of elements, `2^k`, when it fits in a `u64`.
    pub fn size(&self) -> Option<u64> {
        1u64.checked_shl(self.atom_count() as u32)
    }

    /// Every element in increasing numeric order. Only sensible for small algebras.
    pub fn elements(&self) -> impl Iterator<Item = Element> {
        (0..=self.one.bits()).map(Element)
    }

    /// The subalgebra generated by `gens`.
    ///
    /// Computed as a partition of the atoms: the blocks are the atoms of the
    /// subalgebra and it consists of all unions of blocks. Boolean closure is
    /// implicit in the partition; the worklist then splits blocks by every
    /// converse and pairwise composition of blocks until stable.
    pub fn generate_subalgebra(&self, gens: &[Element]) -> Subalgebra {
        let mut blocks: Vec<Element> = if self.one.is_zero() { vec![] } else { vec![self.one] };
        refine(&mut blocks, self.identity());
        for &g in gens {
            refine(&mut blocks, g);
        }
        loop {
            let snapshot = blocks.clone();
            let mut changed = false;
            for &b in &snapshot {
                changed |= refine(&mut blocks, self.converse(b));
            }
            for &b1 in &snapshot {
                for &b2 in &snapshot {
                    changed |= refine(&mut blocks, self.compose(b1, b2));
                }
            }
            if !changed {
                break;
            }
        }
        blocks.sort();
        Subalgebra { blocks }
    }
}

/// Splits every block of `blocks` by `by`. Returns whether anything split.
fn refine(blocks: &mut Vec<Element>, by: Element) -> bool {
    let mut changed = false;
    let n = blocks.len();
    for i in 0..n {
        let b = blocks[i];
        let inside = b & by;
        if !inside.is_zero() && inside != b {
            blocks[i] = inside;
            blocks.push(Element(b.bits() & !by.bits()));
            changed = true;
        }
    }
    changed
}

/// A subalgebra of a complex algebra, given by its atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subalgebra {
    blocks: Vec<Element>,
}

impl Subalgebra {
    /// The atoms of the subalgebra, sorted.
    pub fn atoms(&self) -> &[Element] {
        &self.blocks
    }

    /// Number of elements (`2^atoms`).
    pub fn len(&self) -> u128 {
        1u128 << self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: Element) -> bool {
        let covered = self.blocks.iter().fold(Element::ZERO, |acc, &b| acc | b);
        x.is_below(covered) && self.blocks.iter().all(|&b| (b & x).is_zero() || b.is_below(x))
    }

    /// All elements, as unions of blocks, in block-mask order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        assert!(self.blocks.len() < 32, "subalgebra too large to enumerate");
        (0u64..1 << self.blocks.len()).map(move |mask| {
            self.blocks
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(Element::ZERO, |acc, (_, &b)| acc | b)
        })
    }
}

/// Which relation-algebra law an [`AxiomViolation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    LeftIdentity,
    RightIdentity,
    ConverseInvolution,
    ConverseOfComposition,
    Associativity,
    PeirceanClosure,
}

impl Law {
    pub fn name(self) -> &'static str {
        match self {
            Law::LeftIdentity => "left identity",
            Law::RightIdentity => "right identity",
            Law::ConverseInvolution => "converse involution",
            Law::ConverseOfComposition => "converse of composition",
            Law::Associativity => "associativity",
            Law::PeirceanClosure => "Peircean closure",
        }
    }
}

/// First witness of a failed law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomViolation {
    pub law: Law,
    pub witness: Vec<AtomId>,
    pub detail: String,
}

/// Checks the relation-algebra axioms on atoms; one witness per failed law.
pub fn check_axioms(s: &AtomStructure) -> Result<(), Vec<AxiomViolation>> {
    let alg = ComplexAlgebra::new(s.clone());
    let id = s.identity();
    let mut out: Vec<AxiomViolation> = Vec::new();
    let mut report = |law: Law, witness: Vec<AtomId>, detail: String| {
        if !out.iter().any(|v| v.law == law) {
            out.push(AxiomViolation { law, witness, detail });
        }
    };
    let names = |w: &[AtomId]| w.iter().map(|&a| s.name(a)).collect::<Vec<_>>().join(", ");

    for a in s.atoms() {
        let ea = Element::atom(a);
        if alg.compose(id, ea) != ea {
            report(Law::LeftIdentity, vec![a], format!("1' ; {} != {}", s.name(a), s.name(a)));
        }
        if alg.compose(ea, id) != ea {
            report(Law::RightIdentity, vec![a], format!("{} ; 1' != {}", s.name(a), s.name(a)));
        }
        if s.conv(s.conv(a)) != a {
            report(Law::ConverseInvolution, vec![a], format!("converse twice of {}", s.name(a)));
        }
    }
    for a in s.atoms() {
        for b in s.atoms() {
            let ab = s.product(a, b);
            if alg.converse(ab) != s.product(s.conv(b), s.conv(a)) {
                let w = vec![a, b];
                let d = format!("(a;b)˘ != b˘;a˘ at {}", names(&w));
                report(Law::ConverseOfComposition, w, d);
            }
            for c in s.atoms() {
                let left = alg.compose(ab, Element::atom(c));
                let right = alg.compose(Element::atom(a), s.product(b, c));
                if left != right {
                    let w = vec![a, b, c];
                    let d = format!("(a;b);c != a;(b;c) at {}", names(&w));
                    report(Law::Associativity, w, d);
                }
            }
        }
    }
    for t in s.consistent_triples() {
        if let Some(bad) = s.transforms(t).into_iter().find(|u| !s.consistent(u.0, u.1, u.2)) {
            let d = format!("{} consistent, {} forbidden", s.triple_name(t), s.triple_name(bad));
            report(Law::PeirceanClosure, vec![t.0, t.1, t.2], d);
            break;
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepresentationError {
    #[error("point {0} outside a base of {1} points")]
    PointOutOfRange(usize, usize),
    #[error("relation is not an equivalence: {0}")]
    NotEquivalence(String),
    #[error("{got} atom images given for {atoms} atoms")]
    ImageCount { got: usize, atoms: usize },
}

pub type Pair = (usize, usize);

/// The proper relation algebra over an equivalence relation `E` on `0..points`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperAlgebra {
    points: usize,
    relation: BTreeSet<Pair>,
}

impl ProperAlgebra {
    pub fn new(points: usize, relation: BTreeSet<Pair>) -> Result<Self, RepresentationError> {
        for &(x, y) in &relation {
            for p in [x, y] {
                if p >= points {
                    return Err(RepresentationError::PointOutOfRange(p, points));
                }
            }
            if !relation.contains(&(x, x)) || !relation.contains(&(y, y)) {
                return Err(RepresentationError::NotEquivalence(format!("({x},{y}) without loops")));
            }
            if !relation.contains(&(y, x)) {
                return Err(RepresentationError::NotEquivalence(format!("({x},{y}) without ({y},{x})")));
            }
        }
        for &(x, y) in &relation {
            for &(_, z) in relation.range((y, 0)..(y + 1, 0)) {
                if !relation.contains(&(x, z)) {
                    return Err(RepresentationError::NotEquivalence(format!(
                        "({x},{y}), ({y},{z}) without ({x},{z})"
                    )));
                }
            }
        }
        Ok(ProperAlgebra { points, relation })
    }

    /// The full relation `X × X`.
    pub fn square(points: usize) -> Self {
        let relation = (0..points).flat_map(|x| (0..points).map(move |y| (x, y))).collect();
        ProperAlgebra { points, relation }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn relation(&self) -> &BTreeSet<Pair> {
        &self.relation
    }
}

/// Candidate atomic representation: one relation per atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    pub target: ProperAlgebra,
    pub images: Vec<BTreeSet<Pair>>,
}

impl Representation {
    /// Reads a total atom labelling of `0..points` as atom images over `X × X`.
    pub fn from_labels(atoms: usize, points: usize, label: impl Fn(usize, usize) -> AtomId) -> Self {
        let mut images = vec![BTreeSet::new(); atoms];
        for x in 0..points {
            for y in 0..points {
                images[label(x, y).index()].insert((x, y));
            }
        }
        Representation { target: ProperAlgebra::square(points), images }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepresentationViolation {
    EmptyImage { atom: AtomId },
    Overlap { a: AtomId, b: AtomId, pair: Pair },
    OutsideRelation { atom: AtomId, pair: Pair },
    Uncovered { pair: Pair },
    Identity { pair: Pair },
    Converse { atom: AtomId, pair: Pair },
    Soundness { triple: Triple, x: usize, z: usize, y: usize },
    Saturation { triple: Triple, pair: Pair },
}

impl RepresentationViolation {
    pub fn kind(&self) -> &'static str {
        match self {
            RepresentationViolation::EmptyImage { .. } => "atom image empty",
            RepresentationViolation::Overlap { .. } => "images overlap",
            RepresentationViolation::OutsideRelation { .. } => "image outside E",
            RepresentationViolation::Uncovered { .. } => "pair of E uncovered",
            RepresentationViolation::Identity { .. } => "identity image",
            RepresentationViolation::Converse { .. } => "converse image",
            RepresentationViolation::Soundness { .. } => "composition soundness",
            RepresentationViolation::Saturation { .. } => "composition saturation",
        }
    }

    pub fn is_soundness(&self) -> bool {
        !matches!(self, RepresentationViolation::Saturation { .. } | RepresentationViolation::EmptyImage { .. })
    }
}

/// Checks that `rep` is an atomic representation of the complex algebra of `s`.
///
/// Returns every violation found, at most one saturation witness per triple.
pub fn check_representation(
    s: &AtomStructure,
    rep: &Representation,
) -> Result<Vec<RepresentationViolation>, RepresentationError> {
    use RepresentationViolation as V;
    let k = s.len();
    if rep.images.len() != k {
        return Err(RepresentationError::ImageCount { got: rep.images.len(), atoms: k });
    }
    let n = rep.target.points;
    for img in &rep.images {
        for &(x, y) in img {
            if x >= n || y >= n {
                return Err(RepresentationError::PointOutOfRange(x.max(y), n));
            }
        }
    }
    let e = &rep.target.relation;
    let mut out = Vec::new();
    let mut label: Vec<Option<AtomId>> = vec![None; n * n];
    for a in s.atoms() {
        let img = &rep.images[a.index()];
        if img.is_empty() {
            out.push(V::EmptyImage { atom: a });
        }
        for &(x, y) in img {
            if !e.contains(&(x, y)) {
                out.push(V::OutsideRelation { atom: a, pair: (x, y) });
            }
            match label[x * n + y] {
                Some(b) => out.push(V::Overlap { a: b, b: a, pair: (x, y) }),
                None => label[x * n + y] = Some(a),
            }
            let is_id = s.identity().contains(a);
            if is_id != (x == y) {
                out.push(V::Identity { pair: (x, y) });
            }
            if !rep.images[s.conv(a).index()].contains(&(y, x)) {
                out.push(V::Converse { atom: a, pair: (x, y) });
            }
        }
    }
    for &(x, y) in e {
        if label[x * n + y].is_none() {
            out.push(V::Uncovered { pair: (x, y) });
        }
    }
    let lab = |x: usize, y: usize| label[x * n + y];
    for x in 0..n {
        for z in 0..n {
            let Some(a) = lab(x, z) else { continue };
            for y in 0..n {
                let (Some(b), Some(c)) = (lab(z, y), lab(x, y)) else { continue };
                if !s.consistent(a, b, c) {
                    out.push(V::Soundness { triple: Triple(a, b, c), x, z, y });
                }
            }
        }
    }
    for t in s.consistent_triples() {
        let Triple(a, b, c) = t;
        for &(x, y) in &rep.images[c.index()] {
            let witnessed = (0..n).any(|z| lab(x, z) == Some(a) && lab(z, y) == Some(b));
            if !witnessed {
                out.push(V::Saturation { triple: t, pair: (x, y) });
                break;
            }
        }
    }
    Ok(out)
}
