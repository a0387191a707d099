//! Fixed-width atom sets.
//!
//! Every structure in this crate has at most [`MAX_ATOMS`] atoms, so a set of
//! atoms (an element of the complex algebra) is a single `u64`.

use std::fmt;

use crate::atom_structure::AtomId;

/// Largest supported atom count.
pub const MAX_ATOMS: usize = 64;

/// A set of atoms, i.e. one element of a complex algebra.
///
/// Bit `i` is set iff atom `i` lies below the element.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(pub u64);

impl Element {
    pub const ZERO: Element = Element(0);

    /// The element with every one of the first `width` atoms.
    pub fn full(width: usize) -> Element {
        if width >= 64 {
            Element(u64::MAX)
        } else {
            Element((1u64 << width) - 1)
        }
    }

    pub fn atom(a: AtomId) -> Element {
        Element(1u64 << a.index())
    }

    pub fn from_atoms<I: IntoIterator<Item = AtomId>>(atoms: I) -> Element {
        atoms.into_iter().fold(Element::ZERO, |acc, a| acc | Element::atom(a))
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, a: AtomId) -> bool {
        self.0 >> a.index() & 1 == 1
    }

    #[inline]
    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    /// `self ≤ other` in the boolean order.
    #[inline]
    pub fn is_below(self, other: Element) -> bool {
        self.0 & !other.0 == 0
    }

    /// Atoms below this element in increasing index order.
    pub fn atoms(self) -> Atoms {
        Atoms(self.0)
    }

    /// Lowest atom, if any.
    pub fn first(self) -> Option<AtomId> {
        if self.0 == 0 {
            None
        } else {
            Some(AtomId(self.0.trailing_zeros() as u8))
        }
    }

    /// Lowercase hexadecimal rendering used in transcripts.
    pub fn to_hex(self) -> String {
        format!("{:x}", self.0)
    }
}

impl std::ops::BitOr for Element {
    type Output = Element;
    #[inline]
    fn bitor(self, rhs: Element) -> Element {
        Element(self.0 | rhs.0)
    }
}

impl std::ops::BitOrAssign for Element {
    #[inline]
    fn bitor_assign(&mut self, rhs: Element) {
        self.0 |= rhs.0;
    }
}

impl std::ops::BitAnd for Element {
    type Output = Element;
    #[inline]
    fn bitand(self, rhs: Element) -> Element {
        Element(self.0 & rhs.0)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({:#x})", self.0)
    }
}

/// Iterator over the atoms of an [`Element`].
#[derive(Clone)]
pub struct Atoms(u64);

impl Iterator for Atoms {
    type Item = AtomId;

    #[inline]
    fn next(&mut self) -> Option<AtomId> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(AtomId(i as u8))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Atoms {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_widths() {
        assert_eq!(Element::full(0), Element::ZERO);
        assert_eq!(Element::full(3).bits(), 0b111);
        assert_eq!(Element::full(64).bits(), u64::MAX);
    }

    #[test]
    fn atoms_iterate_in_order() {
        let e = Element(0b1010_0110);
        let v: Vec<u8> = e.atoms().map(|a| a.0).collect();
        assert_eq!(v, vec![1, 2, 5, 7]);
        assert_eq!(e.atoms().len(), 4);
        assert_eq!(e.first(), Some(AtomId(1)));
    }
}
