//! ∃'s strategy for rainbow structures with `|S| ≤ |T|`.
//!
//! Every reply adds one node `z`. Edges from the other nodes to `z` are
//! white unless a green–green pair forces black or red; red labels are read
//! off an injection `h_xy : S → T` recorded for each red clique
//! `R(x, y) = { z : N(x,z) green, N(y,z) = y }` of size at least two.

use crate::atom_structure::{AtomId, AtomStructure};
use crate::rainbow::{Colour, RainbowParams, BLACK, IDENTITY, WHITE, YELLOW};

use super::{Column, ExistsStrategy, ForallMove, Network, StrategyFailure, MAX_NODES};

/// The injection for the red clique `R(green_end, yellow_end)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueEntry {
    pub green_end: usize,
    pub yellow_end: usize,
    /// `h[i]` is the red index assigned to green index `i`.
    pub h: Vec<u8>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RedCliqueBook {
    entries: Vec<CliqueEntry>,
}

impl RedCliqueBook {
    pub fn get(&self, green_end: usize, yellow_end: usize) -> Option<&[u8]> {
        self.entries.iter().find(|e| e.green_end == green_end && e.yellow_end == yellow_end).map(|e| &e.h[..])
    }

    pub fn entries(&self) -> &[CliqueEntry] {
        &self.entries
    }
}

/// Nodes `z` with `N(x,z)` green and `N(y,z) = y`.
pub fn red_clique(p: RainbowParams, net: &Network, x: usize, y: usize) -> Vec<usize> {
    (0..net.len()).filter(|&z| p.colour(net.label(x, z)).is_green() && net.label(y, z) == YELLOW).collect()
}

/// The lexicographically least injection `0..s → 0..t` extending `fixed`.
pub fn least_injection(s: usize, t: usize, fixed: &[(usize, usize)]) -> Option<Vec<u8>> {
    if s > t {
        return None;
    }
    let mut h = vec![u8::MAX; s];
    let mut used = vec![false; t];
    for &(i, j) in fixed {
        if i >= s || j >= t || (h[i] != u8::MAX && h[i] as usize != j) || (used[j] && h[i] as usize != j) {
            return None;
        }
        h[i] = j as u8;
        used[j] = true;
    }
    let mut next = 0;
    for slot in h.iter_mut().filter(|v| **v == u8::MAX) {
        while used[next] {
            next += 1;
        }
        *slot = next as u8;
        used[next] = true;
    }
    Some(h)
}

#[derive(Debug, Clone)]
pub struct RainbowStrategy {
    p: RainbowParams,
    s: AtomStructure,
}

impl RainbowStrategy {
    pub fn new(p: RainbowParams, s: AtomStructure) -> Self {
        RainbowStrategy { p, s }
    }

    pub fn params(&self) -> RainbowParams {
        self.p
    }

    fn green(&self, a: AtomId) -> Option<usize> {
        match self.p.colour(a) {
            Colour::Green(i) => Some(i as usize),
            _ => None,
        }
    }

    fn red(&self, a: AtomId) -> Option<(usize, usize)> {
        match self.p.colour(a) {
            Colour::Red(j, j2) => Some((j as usize, j2 as usize)),
            _ => None,
        }
    }

    fn injection(&self, fixed: &[(usize, usize)]) -> Result<Vec<u8>, StrategyFailure> {
        let (s, t) = (self.p.s, self.p.t);
        least_injection(s, t, fixed).ok_or(if s > t {
            StrategyFailure::NoInjection { s, t }
        } else {
            StrategyFailure::Other(format!("no injection extends {fixed:?}"))
        })
    }

    /// A new clique on `{x, y}` whose ends see them through greens `i`, `i2`.
    fn pair_injection(&self, net: &Network, m: &ForallMove, i: usize, i2: usize) -> Result<Vec<u8>, StrategyFailure> {
        match self.red(net.label(m.x, m.y)) {
            Some((j, j2)) if j != j2 && i != i2 => self.injection(&[(i, j), (i2, j2)]),
            _ => Err(StrategyFailure::Other(format!(
                "move {} needs a red edge with distinct indices",
                m.render(&self.s)
            ))),
        }
    }
}

impl ExistsStrategy for RainbowStrategy {
    type Memory = RedCliqueBook;
    type Delta = Vec<CliqueEntry>;

    fn start(&self, _net: &Network) -> RedCliqueBook {
        RedCliqueBook::default()
    }

    fn respond(
        &self,
        net: &Network,
        book: &RedCliqueBook,
        m: ForallMove,
    ) -> Result<(Column, Vec<CliqueEntry>), StrategyFailure> {
        // A yellow-then-green move is the green-then-yellow move seen from y.
        let m = if m.a == YELLOW && self.green(m.b).is_some() { m.swapped(&self.s) } else { m };
        let ForallMove { x, y, a, b } = m;
        let z = net.len();
        let mut col = [IDENTITY; MAX_NODES];
        col[x] = a;
        col[y] = self.s.conv(b);
        let (ga, gb) = (self.green(a), self.green(b));
        let mut created = Vec::new();
        let mut fresh_h: Option<Vec<u8>> = None;
        for w in 0..z {
            if w == x || w == y {
                continue;
            }
            let (lx, ly) = (net.label(w, x), net.label(w, y));
            let gx = ga.is_some() && self.green(lx).is_some();
            let gy = gb.is_some() && self.green(ly).is_some();
            if !gx && !gy {
                col[w] = WHITE;
                continue;
            }
            let yx = lx == YELLOW && a == YELLOW;
            let yy = ly == YELLOW && b == YELLOW;
            if (gx && !yy) || (gy && !yx) {
                col[w] = BLACK;
                continue;
            }
            // w ∈ R(x, y) and z joins it.
            let (i, i2) = (self.green(lx).expect("green"), ga.expect("green"));
            if i == i2 {
                return Err(StrategyFailure::TrivialMove(m.render(&self.s)));
            }
            let h = match book.get(x, y) {
                Some(h) => h,
                None => {
                    if fresh_h.is_none() {
                        if red_clique(self.p, net, x, y).len() != 1 {
                            return Err(StrategyFailure::Other(format!("clique R({x},{y}) has no injection")));
                        }
                        fresh_h = Some(self.injection(&[])?);
                    }
                    fresh_h.as_deref().expect("just set")
                }
            };
            col[w] = self.p.red(h[i] as usize, h[i2] as usize);
        }
        if let Some(h) = fresh_h {
            created.push(CliqueEntry { green_end: x, yellow_end: y, h });
        }
        if x != y && a == YELLOW && b == YELLOW {
            for w in 0..z {
                if let (Some(i), Some(i2)) = (self.green(net.label(w, x)), self.green(net.label(w, y))) {
                    let h = self.pair_injection(net, &m, i, i2)?;
                    created.push(CliqueEntry { green_end: w, yellow_end: z, h });
                }
            }
        }
        if let (true, Some(i), Some(i2)) = (x != y, ga, gb) {
            for w in 0..z {
                if net.label(w, x) == YELLOW && net.label(w, y) == YELLOW {
                    let h = self.pair_injection(net, &m, i, i2)?;
                    created.push(CliqueEntry { green_end: z, yellow_end: w, h });
                }
            }
        }
        Ok((col, created))
    }

    fn commit(&self, book: &mut RedCliqueBook, delta: Vec<CliqueEntry>) {
        book.entries.extend(delta);
    }

    fn converse_symmetric(&self) -> bool {
        true
    }

    fn check_invariants(&self, net: &Network, book: &RedCliqueBook, m: ForallMove) -> Result<(), String> {
        let z = net.len() - 1;
        for w in 0..z {
            if w == m.x || w == m.y {
                continue;
            }
            let c = self.p.colour(net.label(w, z));
            if c.is_green() || c == Colour::Yellow {
                return Err(format!("edge ({w},{z}) got a green or yellow label"));
            }
        }
        let mut homes = 0;
        for gx in 0..net.len() {
            for yx in 0..net.len() {
                let r = red_clique(self.p, net, gx, yx);
                if r.contains(&z) {
                    homes += 1;
                }
                if r.len() < 2 {
                    continue;
                }
                let h = book.get(gx, yx).ok_or(format!("clique R({gx},{yx}) of size {} has no injection", r.len()))?;
                let mut seen = vec![false; self.p.t];
                for &v in h {
                    if std::mem::replace(&mut seen[v as usize], true) {
                        return Err(format!("injection for R({gx},{yx}) is not injective"));
                    }
                }
                for &w in &r {
                    for &w2 in &r {
                        if w == w2 {
                            continue;
                        }
                        let i = self.green(net.label(gx, w)).expect("green");
                        let i2 = self.green(net.label(gx, w2)).expect("green");
                        if i == i2 || net.label(w, w2) != self.p.red(h[i] as usize, h[i2] as usize) {
                            return Err(format!("clique R({gx},{yx}) breaks its injection at ({w},{w2})"));
                        }
                    }
                }
            }
        }
        if homes > 1 {
            return Err(format!("node {z} lies in {homes} red cliques"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network_game::{initial_response, legal_moves};
    use crate::rainbow::build_rainbow;

    fn strategy(s: usize, t: usize) -> RainbowStrategy {
        let p = RainbowParams::new(s, t).unwrap();
        RainbowStrategy::new(p, build_rainbow(p).unwrap())
    }

    #[test]
    fn injections() {
        assert_eq!(least_injection(2, 3, &[]), Some(vec![0, 1]));
        assert_eq!(least_injection(3, 2, &[]), None);
        assert_eq!(least_injection(3, 4, &[(1, 0), (2, 3)]), Some(vec![1, 0, 3]));
        assert_eq!(least_injection(2, 3, &[(0, 1), (1, 1)]), None);
    }

    #[test]
    fn two_greens_make_a_red_edge() {
        let st = strategy(2, 2);
        let (p, s) = (st.p, st.s.clone());
        let net = initial_response(&s, WHITE);
        let mut book = st.start(&net);
        let m0 = ForallMove { x: 0, y: 1, a: p.green(0), b: YELLOW };
        let (col, d) = st.respond(&net, &book, m0).unwrap();
        assert_eq!(&col[..2], &[p.green(0), YELLOW]);
        assert!(d.is_empty());
        let net = net.extend(&s, &col).unwrap();
        let m1 = ForallMove { x: 0, y: 1, a: p.green(1), b: YELLOW };
        let (col, d) = st.respond(&net, &book, m1).unwrap();
        assert_eq!(col[2], p.red(0, 1));
        assert_eq!(d, vec![CliqueEntry { green_end: 0, yellow_end: 1, h: vec![0, 1] }]);
        st.commit(&mut book, d);
        let net = net.extend(&s, &col).unwrap();
        assert_eq!(net.coherent(&s), Ok(()));
        assert_eq!(st.check_invariants(&net, &book, m1), Ok(()));
    }

    #[test]
    fn no_injection_when_s_exceeds_t() {
        let st = strategy(3, 2);
        let (p, s) = (st.p, st.s.clone());
        let net = initial_response(&s, WHITE);
        let book = st.start(&net);
        let (col, _) = st.respond(&net, &book, ForallMove { x: 0, y: 1, a: p.green(0), b: YELLOW }).unwrap();
        let net = net.extend(&s, &col).unwrap();
        let r = st.respond(&net, &book, ForallMove { x: 0, y: 1, a: p.green(1), b: YELLOW });
        assert_eq!(r.unwrap_err(), StrategyFailure::NoInjection { s: 3, t: 2 });
    }

    /// Every reply equals the reply to the swapped move, over all moves of two-round plays.
    #[test]
    fn replies_are_converse_symmetric() {
        for (si, ti) in [(2, 2), (2, 3)] {
            let st = strategy(si, ti);
            let s = st.s.clone();
            for a in s.atoms() {
                let net = initial_response(&s, a);
                let book = st.start(&net);
                for m in legal_moves(&net, &s) {
                    let (col, d) = st.respond(&net, &book, m).unwrap();
                    let (col2, d2) = st.respond(&net, &book, m.swapped(&s)).unwrap();
                    assert_eq!((col, &d), (col2, &d2), "{m:?}");
                    let mut book2 = book.clone();
                    st.commit(&mut book2, d);
                    let next = net.extend(&s, &col).unwrap();
                    for m2 in legal_moves(&next, &s) {
                        let r = st.respond(&next, &book2, m2).unwrap();
                        assert_eq!(r, st.respond(&next, &book2, m2.swapped(&s)).unwrap(), "{m:?} {m2:?}");
                    }
                }
            }
        }
    }
}
