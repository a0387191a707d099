//! First-order formulas over the relation-algebra signature.
//!
//! Terms are built from variables, the constants `0`, `1`, `1'`, and the
//! operations `-`, `˘`, `+`, `·`, `;`. Formulas use equality only; `≤` and
//! `<` are sugar.

mod eval;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

pub use eval::{evaluate, EvalError, MAX_QUANTIFIED_ATOMS};
pub use parse::{parse_formula, parse_term, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Zero,
    One,
    Identity,
    Complement(Box<Term>),
    Converse(Box<Term>),
    Join(Box<Term>, Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Compose(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn complement(self) -> Term {
        Term::Complement(Box::new(self))
    }

    pub fn converse(self) -> Term {
        Term::Converse(Box::new(self))
    }

    pub fn join(self, other: Term) -> Term {
        Term::Join(Box::new(self), Box::new(other))
    }

    pub fn meet(self, other: Term) -> Term {
        Term::Meet(Box::new(self), Box::new(other))
    }

    pub fn compose(self, other: Term) -> Term {
        Term::Compose(Box::new(self), Box::new(other))
    }

    /// Number of symbols in the term.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Zero | Term::One | Term::Identity => 1,
            Term::Complement(t) | Term::Converse(t) => 1 + t.size(),
            Term::Join(a, b) | Term::Meet(a, b) | Term::Compose(a, b) => 1 + a.size() + b.size(),
        }
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Var(v) => {
                out.insert(v);
            }
            Term::Zero | Term::One | Term::Identity => {}
            Term::Complement(t) | Term::Converse(t) => t.collect_vars(out),
            Term::Join(a, b) | Term::Meet(a, b) | Term::Compose(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn rename(&self, from: &str, to: &str) -> Term {
        match self {
            Term::Var(v) if v == from => Term::Var(to.to_string()),
            Term::Var(_) | Term::Zero | Term::One | Term::Identity => self.clone(),
            Term::Complement(t) => t.rename(from, to).complement(),
            Term::Converse(t) => t.rename(from, to).converse(),
            Term::Join(a, b) => a.rename(from, to).join(b.rename(from, to)),
            Term::Meet(a, b) => a.rename(from, to).meet(b.rename(from, to)),
            Term::Compose(a, b) => a.rename(from, to).compose(b.rename(from, to)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    /// `a ≤ b`, i.e. `a + b = b`.
    pub fn le(a: Term, b: Term) -> Formula {
        Formula::Eq(a.join(b.clone()), b)
    }

    /// `a < b`, i.e. `a ≤ b ∧ ¬(a = b)`.
    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::le(a.clone(), b.clone()).and(Formula::eq(a, b).not())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn exists(var: &str, body: Formula) -> Formula {
        Formula::Exists(var.to_string(), Box::new(body))
    }

    pub fn forall(var: &str, body: Formula) -> Formula {
        Formula::Forall(var.to_string(), Box::new(body))
    }

    /// Maximum nesting of quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Eq(..) => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_depth(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(a, b) => {
                let mut vs = BTreeSet::new();
                a.collect_vars(&mut vs);
                b.collect_vars(&mut vs);
                out.extend(vs.into_iter().filter(|v| !bound.iter().any(|b| b == v)).map(String::from));
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_all(&mut out);
        out
    }

    fn collect_all(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(a, b) => {
                let mut vs = BTreeSet::new();
                a.collect_vars(&mut vs);
                b.collect_vars(&mut vs);
                out.extend(vs.into_iter().map(String::from));
            }
            Formula::Not(f) => f.collect_all(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_all(out);
                b.collect_all(out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                out.insert(v.clone());
                f.collect_all(out);
            }
        }
    }

    /// Renames every occurrence of `from`, bound or free, to `to`.
    ///
    /// Renaming to a fresh name is capture free.
    pub fn rename(&self, from: &str, to: &str) -> Formula {
        let v = |s: &String| if s == from { to.to_string() } else { s.clone() };
        match self {
            Formula::Eq(a, b) => Formula::Eq(a.rename(from, to), b.rename(from, to)),
            Formula::Not(f) => f.rename(from, to).not(),
            Formula::And(a, b) => a.rename(from, to).and(b.rename(from, to)),
            Formula::Or(a, b) => a.rename(from, to).or(b.rename(from, to)),
            Formula::Exists(x, f) => Formula::Exists(v(x), Box::new(f.rename(from, to))),
            Formula::Forall(x, f) => Formula::Forall(v(x), Box::new(f.rename(from, to))),
        }
    }

    /// Swaps two variable names throughout.
    pub fn swap_vars(&self, x: &str, y: &str) -> Formula {
        let tmp = "\u{0}swap";
        self.rename(x, tmp).rename(y, x).rename(tmp, y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("phi_k is defined for k >= 1")]
pub struct ZeroCardinality;

/// `φ_k(x)`: "x is above at least k atoms", using only the variables `x`, `y`.
///
/// `φ_1(x)` is `¬(x = 0)` and `φ_{k+1}(x)` is `∃y(y < x ∧ φ_k(y))`, where
/// `φ_k(y)` is `φ_k(x)` with `x` and `y` swapped.
pub fn build_phi_k(k: usize) -> Result<Formula, ZeroCardinality> {
    if k == 0 {
        return Err(ZeroCardinality);
    }
    let mut phi = Formula::eq(Term::var("x"), Term::Zero).not();
    for _ in 1..k {
        let inner = phi.swap_vars("x", "y");
        phi = Formula::exists("y", Formula::lt(Term::var("y"), Term::var("x")).and(inner));
    }
    Ok(phi)
}

/// `∃x φ_k(x)`: the algebra has at least `k` atoms.
pub fn cardinality_sentence(k: usize) -> Result<Formula, ZeroCardinality> {
    Ok(Formula::exists("x", build_phi_k(k)?))
}

// Printing produces the CLI syntax; `parse_formula(f.to_string())` gives back `f`.

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Zero => write!(f, "0"),
            Term::One => write!(f, "1"),
            Term::Identity => write!(f, "id"),
            Term::Complement(t) => write!(f, "-{}", Atomic(t)),
            Term::Converse(t) => write!(f, "{}^", Atomic(t)),
            Term::Join(a, b) => write!(f, "({a} + {b})"),
            Term::Meet(a, b) => write!(f, "({a} . {b})"),
            Term::Compose(a, b) => write!(f, "({a} ; {b})"),
        }
    }
}

/// Wraps unary operands in parentheses unless already atomic or parenthesised.
struct Atomic<'a>(&'a Term);

impl fmt::Display for Atomic<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Term::Complement(_) | Term::Converse(_) => write!(f, "({})", self.0),
            t => write!(f, "{t}"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Not(g) => write!(f, "~({g})"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Exists(v, g) => write!(f, "(E {v} . {g})"),
            Formula::Forall(v, g) => write!(f, "(A {v} . {g})"),
        }
    }
}
