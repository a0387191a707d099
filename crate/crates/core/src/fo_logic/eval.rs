use std::collections::HashMap;

use thiserror::Error;

use super::{Formula, Term};
use crate::complex_algebra::ComplexAlgebra;
use crate::element::Element;

/// Quantifiers enumerate `2^k` elements; refuse beyond this many atoms.
pub const MAX_QUANTIFIED_ATOMS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is free and unbound")]
    UnboundVariable(String),
    #[error("cannot quantify over a {0}-atom algebra (limit {MAX_QUANTIFIED_ATOMS})")]
    DomainTooLarge(usize),
}

#[derive(Clone, Copy)]
enum TNode {
    Var(usize),
    Zero,
    One,
    Identity,
    Complement(usize),
    Converse(usize),
    Join(usize, usize),
    Meet(usize, usize),
    Compose(usize, usize),
}

#[derive(Clone, Copy)]
enum FNode {
    Eq(usize, usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Exists(usize, usize),
    Forall(usize, usize),
}

const MEMO_VARS: usize = 4;
type MemoKey = [u64; MEMO_VARS];

/// A formula flattened into arenas, with variables as slots.
struct Compiled {
    terms: Vec<TNode>,
    formulas: Vec<FNode>,
    /// Free-variable slots per formula node, sorted.
    free: Vec<Vec<usize>>,
    quantified: Vec<bool>,
    slots: Vec<String>,
}

impl Compiled {
    fn new(f: &Formula) -> (Self, usize) {
        let mut c = Compiled { terms: vec![], formulas: vec![], free: vec![], quantified: vec![], slots: vec![] };
        let root = c.formula(f);
        (c, root)
    }

    fn slot(&mut self, v: &str) -> usize {
        match self.slots.iter().position(|s| s == v) {
            Some(i) => i,
            None => {
                self.slots.push(v.to_string());
                self.slots.len() - 1
            }
        }
    }

    fn term(&mut self, t: &Term, vars: &mut Vec<usize>) -> usize {
        let node = match t {
            Term::Var(v) => {
                let s = self.slot(v);
                vars.push(s);
                TNode::Var(s)
            }
            Term::Zero => TNode::Zero,
            Term::One => TNode::One,
            Term::Identity => TNode::Identity,
            Term::Complement(a) => TNode::Complement(self.term(a, vars)),
            Term::Converse(a) => TNode::Converse(self.term(a, vars)),
            Term::Join(a, b) => TNode::Join(self.term(a, vars), self.term(b, vars)),
            Term::Meet(a, b) => TNode::Meet(self.term(a, vars), self.term(b, vars)),
            Term::Compose(a, b) => TNode::Compose(self.term(a, vars), self.term(b, vars)),
        };
        self.terms.push(node);
        self.terms.len() - 1
    }

    fn push(&mut self, node: FNode, mut free: Vec<usize>, quantified: bool) -> usize {
        free.sort_unstable();
        free.dedup();
        self.formulas.push(node);
        self.free.push(free);
        self.quantified.push(quantified);
        self.formulas.len() - 1
    }

    fn formula(&mut self, f: &Formula) -> usize {
        match f {
            Formula::Eq(a, b) => {
                let mut vars = vec![];
                let (ta, tb) = (self.term(a, &mut vars), self.term(b, &mut vars));
                self.push(FNode::Eq(ta, tb), vars, false)
            }
            Formula::Not(g) => {
                let i = self.formula(g);
                let (free, q) = (self.free[i].clone(), self.quantified[i]);
                self.push(FNode::Not(i), free, q)
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let (i, j) = (self.formula(a), self.formula(b));
                let mut free = self.free[i].clone();
                free.extend(&self.free[j]);
                let q = self.quantified[i] || self.quantified[j];
                let node = if matches!(f, Formula::And(..)) { FNode::And(i, j) } else { FNode::Or(i, j) };
                self.push(node, free, q)
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let s = self.slot(v);
                let i = self.formula(g);
                let free = self.free[i].iter().copied().filter(|&x| x != s).collect();
                let node = if matches!(f, Formula::Exists(..)) { FNode::Exists(s, i) } else { FNode::Forall(s, i) };
                self.push(node, free, true)
            }
        }
    }
}

struct Evaluator<'a> {
    c: &'a Compiled,
    alg: &'a ComplexAlgebra,
    env: Vec<Option<Element>>,
    memo: Vec<HashMap<MemoKey, bool>>,
}

impl Evaluator<'_> {
    fn term(&self, i: usize) -> Element {
        let a = self.alg;
        match self.c.terms[i] {
            TNode::Var(s) => self.env[s].expect("bound by construction"),
            TNode::Zero => a.zero(),
            TNode::One => a.one(),
            TNode::Identity => a.identity(),
            TNode::Complement(x) => a.complement(self.term(x)),
            TNode::Converse(x) => a.converse(self.term(x)),
            TNode::Join(x, y) => a.join(self.term(x), self.term(y)),
            TNode::Meet(x, y) => a.meet(self.term(x), self.term(y)),
            TNode::Compose(x, y) => a.compose(self.term(x), self.term(y)),
        }
    }

    fn key(&self, i: usize) -> Option<MemoKey> {
        let free = &self.c.free[i];
        if !self.c.quantified[i] || free.len() > MEMO_VARS {
            return None;
        }
        let mut k = [0u64; MEMO_VARS];
        for (slot, &v) in k.iter_mut().zip(free) {
            *slot = self.env[v].expect("bound by construction").bits();
        }
        Some(k)
    }

    fn formula(&mut self, i: usize) -> bool {
        let key = self.key(i);
        if let Some(k) = key {
            if let Some(&v) = self.memo[i].get(&k) {
                return v;
            }
        }
        let v = match self.c.formulas[i] {
            FNode::Eq(a, b) => self.term(a) == self.term(b),
            FNode::Not(g) => !self.formula(g),
            FNode::And(a, b) => self.formula(a) && self.formula(b),
            FNode::Or(a, b) => self.formula(a) || self.formula(b),
            FNode::Exists(s, g) => self.quantify(s, g, true),
            FNode::Forall(s, g) => !self.quantify(s, g, false),
        };
        if let Some(k) = key {
            self.memo[i].insert(k, v);
        }
        v
    }

    /// True iff some element makes the body evaluate to `want`.
    fn quantify(&mut self, slot: usize, body: usize, want: bool) -> bool {
        let saved = self.env[slot];
        let mut found = false;
        for x in 0..=self.alg.one().bits() {
            self.env[slot] = Some(Element(x));
            if self.formula(body) == want {
                found = true;
                break;
            }
        }
        self.env[slot] = saved;
        found
    }
}

/// Evaluates `f` in the complex algebra under `env`.
///
/// Quantifiers range over every element in increasing numeric order and
/// short-circuit. Subformulas containing quantifiers are memoised on the
/// values of their own free variables only.
pub fn evaluate(f: &Formula, alg: &ComplexAlgebra, env: &HashMap<String, Element>) -> Result<bool, EvalError> {
    for v in f.free_vars() {
        if !env.contains_key(&v) {
            return Err(EvalError::UnboundVariable(v));
        }
    }
    if f.quantifier_depth() > 0 && alg.atom_count() > MAX_QUANTIFIED_ATOMS {
        return Err(EvalError::DomainTooLarge(alg.atom_count()));
    }
    let (c, root) = Compiled::new(f);
    let env_slots = c.slots.iter().map(|s| env.get(s).copied()).collect();
    let mut ev = Evaluator { memo: vec![HashMap::new(); c.formulas.len()], c: &c, alg, env: env_slots };
    Ok(ev.formula(root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fo_logic::{build_phi_k, cardinality_sentence};
    use crate::rainbow::{build_rainbow, RainbowParams};

    fn b22() -> ComplexAlgebra {
        ComplexAlgebra::new(build_rainbow(RainbowParams::new(2, 2).unwrap()).unwrap())
    }

    #[test]
    fn simple_sentences() {
        let a = b22();
        let b = a.structure().atom("b").unwrap();
        let env = HashMap::from([("x".to_string(), Element::atom(b))]);
        let f = Formula::eq(Term::var("x"), Term::Zero).not();
        assert_eq!(evaluate(&f, &a, &env), Ok(true));
        let g = Formula::exists("x", Formula::eq(Term::var("x"), Term::Identity));
        assert_eq!(evaluate(&g, &a, &HashMap::new()), Ok(true));
    }

    #[test]
    fn unbound_variable() {
        let a = b22();
        let f = Formula::eq(Term::var("z"), Term::Zero);
        assert_eq!(evaluate(&f, &a, &HashMap::new()), Err(EvalError::UnboundVariable("z".into())));
    }

    #[test]
    fn phi_matches_popcount_small_k() {
        let a = b22();
        for k in 1..=4 {
            let phi = build_phi_k(k).unwrap();
            for x in a.elements().step_by(37) {
                let env = HashMap::from([("x".to_string(), x)]);
                assert_eq!(evaluate(&phi, &a, &env).unwrap(), x.count() as usize >= k, "k={k} x={x:?}");
            }
        }
    }

    #[test]
    fn degenerate_algebra_has_no_atoms() {
        let s = crate::AtomStructure::from_parts(vec![], Element::ZERO, vec![], []).unwrap();
        let a = ComplexAlgebra::new(s);
        assert_eq!(evaluate(&cardinality_sentence(1).unwrap(), &a, &HashMap::new()), Ok(false));
    }
}
