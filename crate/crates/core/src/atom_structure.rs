//! Finite relation-algebra atom structures.
//!
//! An atom structure is a set of atoms together with the identity atoms, the
//! converse involution and the consistent triples. A triple `(a, b, c)` is
//! consistent when `a ; b ≥ c`. The consistent set is stored as a `k × k`
//! table of [`Element`]s so that `a ; b` is one lookup.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::element::{Element, MAX_ATOMS};

/// Index of an atom within one structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(pub u8);

impl AtomId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// An ordered triple of atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple(pub AtomId, pub AtomId, pub AtomId);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("unknown atom {0}")]
    UnknownAtom(AtomId),
    #[error("unknown atom name `{0}`")]
    UnknownName(String),
    #[error("duplicate atom name `{0}`")]
    DuplicateName(String),
    #[error("invalid atom name `{0}`")]
    InvalidName(String),
    #[error("{0} atoms requested, at most {MAX_ATOMS} supported")]
    TooManyAtoms(usize),
    #[error("converse table has {got} entries for {atoms} atoms")]
    ConverseLength { got: usize, atoms: usize },
    #[error("structure fails validation: {0}")]
    Invalid(String),
}

/// One broken atom-structure invariant, with its witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `converse(converse(a)) != a`.
    Involution { atom: AtomId },
    /// An identity atom whose converse is not an identity atom.
    IdentityConverse { atom: AtomId },
    /// `triple` is consistent but its transform is not.
    PeirceanClosure { triple: Triple, transform: Triple },
    /// `(e, a, b)` consistent with `e` an identity atom and `a != b`.
    IdentityCoherence { triple: Triple },
    /// No identity atom `e` makes `(e, a, a)` consistent.
    IdentityWitness { atom: AtomId },
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::Involution { .. } => "involution",
            Violation::IdentityConverse { .. } => "identity converse",
            Violation::PeirceanClosure { .. } => "Peircean closure",
            Violation::IdentityCoherence { .. } => "identity coherence",
            Violation::IdentityWitness { .. } => "identity witness",
        }
    }
}

/// A finite atom structure with at most 64 atoms.
#[derive(Clone, PartialEq, Eq)]
pub struct AtomStructure {
    names: Vec<String>,
    by_name: HashMap<String, AtomId>,
    identity: Element,
    converse: Vec<AtomId>,
    /// `products[a * k + b]` = set of `c` with `(a, b, c)` consistent.
    products: Vec<Element>,
}

impl fmt::Debug for AtomStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AtomStructure")
            .field("atoms", &self.names)
            .field("consistent", &self.consistent_triples().count())
            .finish()
    }
}

fn check_name(name: &str) -> Result<(), StructureError> {
    let bad = name.is_empty()
        || name.starts_with('#')
        || name.chars().any(|c| c.is_whitespace() || c.is_control());
    if bad {
        Err(StructureError::InvalidName(name.to_string()))
    } else {
        Ok(())
    }
}

impl AtomStructure {
    /// Assembles a structure from raw tables. The result is not validated.
    pub fn from_parts<I>(
        names: Vec<String>,
        identity: Element,
        converse: Vec<AtomId>,
        consistent: I,
    ) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = Triple>,
    {
        let k = names.len();
        if k > MAX_ATOMS {
            return Err(StructureError::TooManyAtoms(k));
        }
        if converse.len() != k {
            return Err(StructureError::ConverseLength { got: converse.len(), atoms: k });
        }
        let mut by_name = HashMap::with_capacity(k);
        for (i, n) in names.iter().enumerate() {
            check_name(n)?;
            if by_name.insert(n.clone(), AtomId(i as u8)).is_some() {
                return Err(StructureError::DuplicateName(n.clone()));
            }
        }
        let full = Element::full(k);
        if !identity.is_below(full) {
            return Err(StructureError::UnknownAtom(AtomId(63 - identity.bits().leading_zeros() as u8)));
        }
        if let Some(bad) = converse.iter().find(|a| a.index() >= k) {
            return Err(StructureError::UnknownAtom(*bad));
        }
        let mut products = vec![Element::ZERO; k * k];
        for Triple(a, b, c) in consistent {
            for x in [a, b, c] {
                if x.index() >= k {
                    return Err(StructureError::UnknownAtom(x));
                }
            }
            products[a.index() * k + b.index()] |= Element::atom(c);
        }
        Ok(AtomStructure { names, by_name, identity, converse, products })
    }

    /// Number of atoms.
    #[inline]
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        (0..self.len()).map(|i| AtomId(i as u8))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Display name of an atom. Panics on an out-of-range id.
    pub fn name(&self, a: AtomId) -> &str {
        &self.names[a.index()]
    }

    pub fn atom(&self, name: &str) -> Result<AtomId, StructureError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| StructureError::UnknownName(name.to_string()))
    }

    fn check(&self, a: AtomId) -> Result<AtomId, StructureError> {
        if a.index() < self.len() {
            Ok(a)
        } else {
            Err(StructureError::UnknownAtom(a))
        }
    }

    /// The identity atoms as one element.
    #[inline]
    pub fn identity(&self) -> Element {
        self.identity
    }

    pub fn is_identity_atom(&self, a: AtomId) -> Result<bool, StructureError> {
        self.check(a).map(|a| self.identity.contains(a))
    }

    pub fn converse_of(&self, a: AtomId) -> Result<AtomId, StructureError> {
        self.check(a).map(|a| self.converse[a.index()])
    }

    /// Unchecked converse, for inner loops.
    #[inline]
    pub fn conv(&self, a: AtomId) -> AtomId {
        self.converse[a.index()]
    }

    /// Set of `c` such that `(a, b, c)` is consistent, i.e. `a ; b` on atoms.
    #[inline]
    pub fn product(&self, a: AtomId, b: AtomId) -> Element {
        self.products[a.index() * self.len() + b.index()]
    }

    /// Unchecked consistency test, for inner loops.
    #[inline]
    pub fn consistent(&self, a: AtomId, b: AtomId, c: AtomId) -> bool {
        self.product(a, b).contains(c)
    }

    pub fn is_consistent(&self, t: Triple) -> Result<bool, StructureError> {
        self.check(t.0)?;
        self.check(t.1)?;
        self.check(t.2)?;
        Ok(self.consistent(t.0, t.1, t.2))
    }

    /// The six Peircean transforms of `t`, in the fixed order
    /// `(a,b,c) (a˘,c,b) (c,b˘,a) (b,c˘,a˘) (c˘,a,b˘) (b˘,a˘,c˘)`.
    pub fn peircean_transforms(&self, t: Triple) -> Result<[Triple; 6], StructureError> {
        self.check(t.0)?;
        self.check(t.1)?;
        self.check(t.2)?;
        Ok(self.transforms(t))
    }

    #[inline]
    pub(crate) fn transforms(&self, Triple(a, b, c): Triple) -> [Triple; 6] {
        let cv = |x: AtomId| self.converse[x.index()];
        [
            Triple(a, b, c),
            Triple(cv(a), c, b),
            Triple(c, cv(b), a),
            Triple(b, cv(c), cv(a)),
            Triple(cv(c), a, cv(b)),
            Triple(cv(b), cv(a), cv(c)),
        ]
    }

    /// All consistent triples in lexicographic order.
    pub fn consistent_triples(&self) -> impl Iterator<Item = Triple> + '_ {
        let k = self.len();
        (0..k).flat_map(move |a| {
            (0..k).flat_map(move |b| {
                let (a, b) = (AtomId(a as u8), AtomId(b as u8));
                self.product(a, b).atoms().map(move |c| Triple(a, b, c))
            })
        })
    }

    /// All forbidden triples in lexicographic order.
    pub fn forbidden_triples(&self) -> impl Iterator<Item = Triple> + '_ {
        let k = self.len();
        let full = Element::full(k);
        (0..k).flat_map(move |a| {
            (0..k).flat_map(move |b| {
                let (a, b) = (AtomId(a as u8), AtomId(b as u8));
                Element(full.bits() & !self.product(a, b).bits())
                    .atoms()
                    .map(move |c| Triple(a, b, c))
            })
        })
    }

    /// A minimal list of forbidden triples whose Peircean closure is the full
    /// forbidden set: the lexicographically least member of each orbit.
    pub fn forbidden_generators(&self) -> Vec<Triple> {
        let mut covered = std::collections::HashSet::new();
        let mut out = Vec::new();
        for t in self.forbidden_triples() {
            if covered.contains(&t) {
                continue;
            }
            out.push(t);
            let mut stack = vec![t];
            while let Some(u) = stack.pop() {
                if covered.insert(u) {
                    stack.extend(self.transforms(u));
                }
            }
        }
        out
    }

    pub fn triple_name(&self, Triple(a, b, c): Triple) -> String {
        format!("({}, {}, {})", self.name(a), self.name(b), self.name(c))
    }

    /// Checks every structural invariant and returns all violations found.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        for a in self.atoms() {
            if self.conv(self.conv(a)) != a {
                out.push(Violation::Involution { atom: a });
            }
            if self.identity.contains(a) && !self.identity.contains(self.conv(a)) {
                out.push(Violation::IdentityConverse { atom: a });
            }
        }
        for t in self.consistent_triples() {
            if let Some(&bad) = self.transforms(t).iter().find(|u| !self.consistent(u.0, u.1, u.2)) {
                out.push(Violation::PeirceanClosure { triple: t, transform: bad });
            }
        }
        for e in self.identity.atoms() {
            for a in self.atoms() {
                for b in self.product(e, a).atoms() {
                    if a != b {
                        out.push(Violation::IdentityCoherence { triple: Triple(e, a, b) });
                    }
                }
            }
        }
        for a in self.atoms() {
            if !self.identity.atoms().any(|e| self.consistent(e, a, a)) {
                out.push(Violation::IdentityWitness { atom: a });
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub fn describe(&self, v: &Violation) -> String {
        match v {
            Violation::Involution { atom } => format!(
                "involution: converse of converse of {} is {}",
                self.name(*atom),
                self.name(self.conv(self.conv(*atom)))
            ),
            Violation::IdentityConverse { atom } => {
                format!("identity converse: {} is an identity atom but its converse is not", self.name(*atom))
            }
            Violation::PeirceanClosure { triple, transform } => format!(
                "Peircean closure: {} consistent but transform {} is not",
                self.triple_name(*triple),
                self.triple_name(*transform)
            ),
            Violation::IdentityCoherence { triple } => {
                format!("identity coherence: {} is consistent", self.triple_name(*triple))
            }
            Violation::IdentityWitness { atom } => {
                format!("identity witness: no identity atom e with (e, {0}, {0}) consistent", self.name(*atom))
            }
        }
    }

    /// Returns `self` if it validates, otherwise an error naming the first violation.
    pub fn validated(self) -> Result<Self, StructureError> {
        match self.validate() {
            Ok(()) => Ok(self),
            Err(v) => Err(StructureError::Invalid(self.describe(&v[0]))),
        }
    }
}

/// Incremental construction from names, converse pairs and forbidden generators.
///
/// [`StructureBuilder::build`] closes the forbidden list under the Peircean
/// transforms and takes the complement as the consistent set.
#[derive(Debug, Default, Clone)]
pub struct StructureBuilder {
    names: Vec<String>,
    by_name: HashMap<String, AtomId>,
    identity: Element,
    converse: Vec<AtomId>,
    forbidden: Vec<Triple>,
}

impl StructureBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an atom, self-converse until told otherwise.
    pub fn atom(&mut self, name: &str) -> Result<AtomId, StructureError> {
        check_name(name)?;
        if self.names.len() >= MAX_ATOMS {
            return Err(StructureError::TooManyAtoms(self.names.len() + 1));
        }
        if self.by_name.contains_key(name) {
            return Err(StructureError::DuplicateName(name.to_string()));
        }
        let id = AtomId(self.names.len() as u8);
        self.names.push(name.to_string());
        self.by_name.insert(name.to_string(), id);
        self.converse.push(id);
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Result<AtomId, StructureError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| StructureError::UnknownName(name.to_string()))
    }

    fn check(&self, a: AtomId) -> Result<(), StructureError> {
        if a.index() < self.names.len() {
            Ok(())
        } else {
            Err(StructureError::UnknownAtom(a))
        }
    }

    pub fn identity(&mut self, a: AtomId) -> Result<&mut Self, StructureError> {
        self.check(a)?;
        self.identity |= Element::atom(a);
        Ok(self)
    }

    /// Declares `a˘ = b` and `b˘ = a`.
    pub fn converse_pair(&mut self, a: AtomId, b: AtomId) -> Result<&mut Self, StructureError> {
        self.check(a)?;
        self.check(b)?;
        self.converse[a.index()] = b;
        self.converse[b.index()] = a;
        Ok(self)
    }

    pub fn forbid(&mut self, t: Triple) -> Result<&mut Self, StructureError> {
        self.check(t.0)?;
        self.check(t.1)?;
        self.check(t.2)?;
        self.forbidden.push(t);
        Ok(self)
    }

    /// Closes the forbidden generators and complements. Not validated.
    pub fn build(self) -> Result<AtomStructure, StructureError> {
        let k = self.names.len();
        // Closure runs over an empty-consistency shell to reuse `transforms`.
        let shell = AtomStructure::from_parts(self.names.clone(), self.identity, self.converse.clone(), [])?;
        let mut forbidden = vec![Element::ZERO; k * k];
        let mut stack = self.forbidden;
        while let Some(t) = stack.pop() {
            let slot = &mut forbidden[t.0.index() * k + t.1.index()];
            if slot.contains(t.2) {
                continue;
            }
            *slot |= Element::atom(t.2);
            stack.extend(shell.transforms(t));
        }
        let full = Element::full(k);
        let mut s = shell;
        for (p, f) in s.products.iter_mut().zip(&forbidden) {
            *p = Element(full.bits() & !f.bits());
        }
        Ok(s)
    }
}
