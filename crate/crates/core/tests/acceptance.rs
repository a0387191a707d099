//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Pass criterion numbers as arguments to run a
//! subset, e.g. `cargo test --test acceptance -- 3 7`.

use std::collections::{HashMap, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rainbow_games::complex_algebra::{check_axioms, ComplexAlgebra};
use rainbow_games::ef_game::{self, EfMode, EfVerdict, PairClosure, Prop44};
use rainbow_games::fo_logic::{cardinality_sentence, evaluate, Formula, Term};
use rainbow_games::network_game::{
    play_refuter, verify_exists_strategy, verify_forall_refutation, ExistsVerifyOptions, NetLoss, NetVerdict,
    RainbowRefuter, RainbowStrategy, RefutationVerdict, StrategyFailure,
};
use rainbow_games::pebble_game::{self, Cor33, PebbleMode, PebbleVerdict};
use rainbow_games::seurat_game::{self, Lemma43, SeuratPosition, SeuratVerdict, VerifyMode, VerifyOptions};
use rainbow_games::{build_rainbow, AtomStructure, Element, RainbowParams, Triple};

type Check = Result<String, String>;
type Criterion = (usize, &'static str, fn() -> Check);

fn params(s: usize, t: usize) -> RainbowParams {
    RainbowParams::new(s, t).unwrap()
}

fn structure(s: usize, t: usize) -> AtomStructure {
    build_rainbow(params(s, t)).unwrap()
}

fn algebra(s: usize, t: usize) -> ComplexAlgebra {
    ComplexAlgebra::new(structure(s, t))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn axiom_soundness() -> Check {
    let start = Instant::now();
    for s in 2..=4 {
        for t in 2..=4 {
            if let Err(vs) = check_axioms(&structure(s, t)) {
                return Err(format!("B({s},{t}): {} broken: {}", vs[0].law.name(), vs[0].detail));
            }
        }
    }
    let el = start.elapsed();
    ensure(el < Duration::from_secs(5), || format!("took {}", secs(el)))?;
    Ok(format!("axioms hold for B(s,t), 2 <= s,t <= 4, in {}", secs(el)))
}

fn exists_strategy_positive() -> Check {
    let mut out = vec![];
    for (s, t) in [(2, 2), (2, 3)] {
        let st = structure(s, t);
        let strategy = RainbowStrategy::new(params(s, t), st.clone());
        let start = Instant::now();
        match verify_exists_strategy(&st, &strategy, &ExistsVerifyOptions::new(4)) {
            NetVerdict::Verified { states, leaves } => {
                out.push(format!("B({s},{t}) K=4: {states} states, {leaves} leaves, {}", secs(start.elapsed())))
            }
            v => return Err(format!("B({s},{t}): {v:?}")),
        }
    }
    Ok(out.join("; "))
}

fn refuter_negative() -> Check {
    let mut out = vec![];
    for (s, t, rounds) in [(3, 2, 5), (4, 3, 6)] {
        let st = structure(s, t);
        let p = params(s, t);
        let start = Instant::now();
        let lines = match verify_forall_refutation(&st, &RainbowRefuter { p }, rounds) {
            RefutationVerdict::Refuted { lines, last_round } => {
                ensure(last_round < rounds, || format!("B({s},{t}): refuted only at round {last_round}"))?;
                lines
            }
            RefutationVerdict::Survived { .. } => return Err(format!("B({s},{t}): an ∃ line survived")),
        };
        let play = play_refuter(&st, &RainbowRefuter { p }, &RainbowStrategy::new(p, st.clone()), rounds);
        let cites = play.loss == Some(NetLoss::Failure(StrategyFailure::NoInjection { s, t }));
        ensure(cites, || format!("B({s},{t}): rainbow strategy lost with {:?}", play.loss))?;
        out.push(format!("B({s},{t}) within {rounds}: {lines} ∃ lines beaten, {}", secs(start.elapsed())));
    }
    Ok(format!("{}; the strategy fails with no injection S -> T", out.join("; ")))
}

fn refuter_cross_check() -> Check {
    let st = structure(2, 2);
    let p = params(2, 2);
    let play = play_refuter(&st, &RainbowRefuter { p }, &RainbowStrategy::new(p, st.clone()), 6);
    ensure(play.loss.is_none(), || format!("∃ lost: {:?}", play.loss))?;
    let survived = matches!(verify_forall_refutation(&st, &RainbowRefuter { p }, 6), RefutationVerdict::Survived { .. });
    ensure(survived, || "enumeration found no surviving ∃ line".into())?;
    Ok(format!("B(2,2): ∃ survives all {} rounds of the refuter's line", play.transcript.len()))
}

fn seurat_lemma43() -> Check {
    let mut out = vec![];
    let runs = [
        (4, 1, VerifyMode::Exhaustive { budget: u64::MAX }),
        (8, 2, VerifyMode::Exhaustive { budget: u64::MAX }),
        (16, 3, VerifyMode::Sampled { samples: 100_000, seed: 0x5e0a7 }),
    ];
    for (size, n, mode) in runs {
        let opts = VerifyOptions { mode, check_dagger: true };
        match seurat_game::verify_seurat_strategy(size, size, n, &Lemma43, opts).map_err(|e| e.to_string())? {
            SeuratVerdict::Verified { exhaustive, plays, .. } => {
                let kind = if exhaustive { "exhaustive" } else { "sampled" };
                out.push(format!("G_{n}({size},{size}) {kind} {plays} plays"))
            }
            v => return Err(format!("G_{n}({size},{size}): {v:?}")),
        }
    }
    Ok(out.join("; "))
}

fn seurat_oracle() -> Check {
    use seurat_game::Winner;
    ensure(seurat_game::brute_force_winner(2, 3, 1) == Winner::Forall, || "G_1(2,3) is not forall".into())?;
    ensure(seurat_game::brute_force_winner(4, 4, 1) == Winner::Exists, || "G_1(4,4) is not exists".into())?;
    for t in 0..=6 {
        for t2 in 0..=6 {
            let expected = if t == t2 || (t >= 2 && t2 >= 2) { Winner::Exists } else { Winner::Forall };
            let got = seurat_game::brute_force_winner(t, t2, 0);
            ensure(got == expected, || format!("G_0({t},{t2}) = {got}, expected {expected}"))?;
        }
    }
    Ok("G_1(2,3)=forall, G_1(4,4)=exists, G_0 matches the closed form for sizes <= 6".into())
}

fn ef_prop44() -> Check {
    let (a, b) = (algebra(4, 2), algebra(5, 2));
    let st = Prop44::new(params(4, 2), params(5, 2), 1).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let first = match ef_game::verify_ef_strategy(&a, &b, &st, 1, EfMode::Exhaustive).map_err(|e| e.to_string())? {
        EfVerdict::Verified { exhaustive: true, plays, positions } => {
            format!("B(4,2)/B(5,2) n=1 exhaustive: {plays} plays, {positions} positions, {}", secs(start.elapsed()))
        }
        v => return Err(format!("n=1: {v:?}")),
    };
    let (a, b) = (algebra(8, 2), algebra(9, 2));
    let st = Prop44::new(params(8, 2), params(9, 2), 2).map_err(|e| e.to_string())?;
    let mode = EfMode::Sampled { samples: 10_000, seed: 44 };
    match ef_game::verify_ef_strategy(&a, &b, &st, 2, mode).map_err(|e| e.to_string())? {
        EfVerdict::Verified { plays, .. } => Ok(format!("{first}; B(8,2)/B(9,2) n=2 sampled {plays} plays")),
        v => Err(format!("n=2: {v:?}")),
    }
}

fn desk_instance() -> Check {
    let rep = |s, t| params(s, t).predicted_representable().unwrap();
    ensure(rep(4, 4) && !rep(5, 4), || "predictions for B(4,4)/B(5,4) are wrong".into())?;
    // The strategy only touches green parts, so the red count is irrelevant
    // to it; the exhaustive t = 2 run carries over and is spot-checked at t = 4.
    let (a, b) = (algebra(4, 4), algebra(5, 4));
    let st = Prop44::new(params(4, 4), params(5, 4), 1).map_err(|e| e.to_string())?;
    let mode = EfMode::Sampled { samples: 2000, seed: 46 };
    match ef_game::verify_ef_strategy(&a, &b, &st, 1, mode).map_err(|e| e.to_string())? {
        EfVerdict::Verified { plays, .. } => Ok(format!(
            "B(4,4) representable, B(5,4) not; Γ_1 strategy verified (exhaustive at t=2, {plays} sampled plays at t=4)"
        )),
        v => Err(format!("B(4,4)/B(5,4): {v:?}")),
    }
}

fn phi_k_sentences() -> Check {
    let b22 = algebra(2, 2);
    let start = Instant::now();
    for k in 1..=11 {
        let got = evaluate(&cardinality_sentence(k).unwrap(), &b22, &HashMap::new()).map_err(|e| e.to_string())?;
        let oracle = b22.elements().any(|x| x.count() as usize >= k);
        ensure(got == oracle, || format!("k={k}: evaluator {got}, popcount {oracle}"))?;
    }
    let b22_time = start.elapsed();
    let start = Instant::now();
    let on_b32 = evaluate(&cardinality_sentence(11).unwrap(), &algebra(3, 2), &HashMap::new()).map_err(|e| e.to_string())?;
    ensure(on_b32, || "∃xφ_11 false on B(3,2)".into())?;
    Ok(format!(
        "k=1..11 agree on B(2,2) ({}); ∃xφ_11 true on B(3,2) ({}), false on B(2,2)",
        secs(b22_time),
        secs(start.elapsed())
    ))
}

fn pebble_cor33() -> Check {
    let (l, r) = (structure(2, 2), structure(3, 2));
    let st = Cor33::new(&l, &r).map_err(|e| e.to_string())?;
    let exhaustive = PebbleMode::Exhaustive { budget: u64::MAX };
    let plays = match pebble_game::verify_pebble_strategy(&l, &r, &st, 2, 4, exhaustive).map_err(|e| e.to_string())? {
        PebbleVerdict::Verified { exhaustive: true, plays } => plays,
        v => return Err(format!("2 pebbles: {v:?}")),
    };
    let placements = match pebble_game::verify_pebble_strategy(&l, &r, &st, 3, 3, exhaustive).map_err(|e| e.to_string())? {
        PebbleVerdict::Losing { transcript, .. } => transcript.len(),
        v => return Err(format!("3 pebbles: {v:?}")),
    };
    use pebble_game::Winner;
    let solve = |c, rounds| pebble_game::pebble_winner(&l, &r, c, rounds, 50_000_000);
    ensure(solve(3, 3) == Some(Winner::Forall), || "solver: 3 pebbles, 3 rounds is not forall".into())?;
    for rounds in [5, 6] {
        ensure(solve(2, rounds) == Some(Winner::Exists), || format!("solver: 2 pebbles, {rounds} rounds not exists"))?;
    }
    Ok(format!(
        "B(2,2)/B(3,2): 2 pebbles exhaustive to 4 rounds ({plays} plays), solver agrees to 6; \
         3 pebbles lose after {placements} placements"
    ))
}

fn invariant_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut notes = vec![];

    for (s, t) in [(2, 2), (3, 2), (2, 3)] {
        let st = structure(s, t);
        for a in st.atoms() {
            for b in st.atoms() {
                for c in st.atoms() {
                    let orbit: HashSet<Triple> = st.peircean_transforms(Triple(a, b, c)).unwrap().into_iter().collect();
                    for &u in &orbit {
                        let again: HashSet<Triple> = st.peircean_transforms(u).unwrap().into_iter().collect();
                        ensure(again == orbit, || format!("B({s},{t}): orbit of {} not closed", st.triple_name(u)))?;
                        ensure(st.is_consistent(u).unwrap() == st.consistent(a, b, c), || {
                            format!("B({s},{t}): consistency differs on {}", st.triple_name(u))
                        })?;
                    }
                }
            }
        }
    }
    notes.push("Peircean orbits closed and consistency-invariant");

    let alg = algebra(3, 3);
    let one = alg.one().bits();
    for _ in 0..2000 {
        let [x, y, z] = [0; 3].map(|_| Element(rng.gen::<u64>() & one));
        ensure(alg.compose(x | y, z) == alg.compose(x, z) | alg.compose(y, z), || format!("additivity fails at {x:?}"))?;
        let atomwise = x.atoms().flat_map(|a| y.atoms().map(move |b| (a, b))).fold(Element(0), |acc, (a, b)| {
            acc | alg.compose(Element::atom(a), Element::atom(b))
        });
        ensure(alg.compose(x, y) == atomwise, || format!("composition is not atomwise at {x:?}, {y:?}"))?;
        ensure(alg.converse(alg.converse(x)) == x, || format!("converse not involutive at {x:?}"))?;
        ensure(alg.converse(alg.compose(x, y)) == alg.compose(alg.converse(y), alg.converse(x)), || {
            format!("converse does not reverse composition at {x:?}, {y:?}")
        })?;
    }
    notes.push("additivity and converse involution on 2000 samples");

    let st = structure(2, 2);
    let strategy = RainbowStrategy::new(params(2, 2), st.clone());
    let opts = ExistsVerifyOptions { check_invariants: true, ..ExistsVerifyOptions::new(4) };
    match verify_exists_strategy(&st, &strategy, &opts) {
        NetVerdict::Verified { .. } => notes.push("network strategy invariants hold on B(2,2) to depth 4"),
        v => return Err(format!("network invariants: {v:?}")),
    }

    for _ in 0..500 {
        let (t, t2) = (rng.gen_range(1..=12), rng.gen_range(1..=12));
        let mut pos = SeuratPosition::new(t, t2, 3).unwrap();
        for _ in 0..3 {
            pos = pos.apply_round(rng.gen::<u64>() & ((1 << t) - 1), rng.gen::<u64>() & ((1 << t2) - 1)).unwrap();
            let (mut ua, mut ub) = (0u64, 0u64);
            for &(a, b) in pos.cells() {
                ensure(ua & a == 0 && ub & b == 0, || "Seurat cells overlap".into())?;
                (ua, ub) = (ua | a, ub | b);
            }
            ensure(ua == (1 << t) - 1 && ub == (1 << t2) - 1, || "Seurat cells do not cover".into())?;
        }
    }
    notes.push("Seurat cells partition after every round");

    let b22 = algebra(2, 2);
    let one = b22.one().bits();
    for _ in 0..300 {
        let gens: Vec<Element> = (0..rng.gen_range(0..3)).map(|_| Element(rng.gen::<u64>() & one)).collect();
        let pairs: Vec<_> = gens.iter().map(|&g| (g, g)).collect();
        let closure = PairClosure::compute(&b22, &b22, &pairs).map_err(|c| format!("identity pairs clash: {c}"))?;
        let mut blocks: Vec<Element> = closure.blocks().iter().map(|&(x, y)| if x == y { Ok(x) } else { Err(()) }).collect::<Result<_, _>>().map_err(|_| "identity pairs split unevenly".to_string())?;
        blocks.sort();
        ensure(blocks == b22.generate_subalgebra(&gens).atoms(), || format!("closure differs from subalgebra for {gens:?}"))?;
    }
    notes.push("EF closure equals the generated subalgebra");

    notes.push(depth_one_pool()?);
    Ok(notes.join("; "))
}

/// Terms of size at most 4 over `x`, the constants and the operations, as a
/// DAG in size order so children are evaluated first.
#[derive(Clone, Copy)]
enum Node {
    X,
    Zero,
    One,
    Id,
    Complement(usize),
    Converse(usize),
    Join(usize, usize),
    Meet(usize, usize),
    Compose(usize, usize),
}

fn term_pool() -> Vec<Node> {
    let mut by_size: Vec<Vec<usize>> = vec![vec![], vec![0, 1, 2, 3]];
    let mut nodes = vec![Node::X, Node::Zero, Node::One, Node::Id];
    for size in 2..=4 {
        let mut level = vec![];
        for &c in &by_size[size - 1] {
            level.extend([Node::Complement(c), Node::Converse(c)]);
        }
        for left in 1..size - 1 {
            for &a in &by_size[left] {
                for &b in &by_size[size - 1 - left] {
                    level.extend([Node::Join(a, b), Node::Meet(a, b), Node::Compose(a, b)]);
                }
            }
        }
        let first = nodes.len();
        nodes.extend(level);
        by_size.push((first..nodes.len()).collect());
    }
    nodes
}

fn to_term(nodes: &[Node], i: usize) -> Term {
    match nodes[i] {
        Node::X => Term::var("x"),
        Node::Zero => Term::Zero,
        Node::One => Term::One,
        Node::Id => Term::Identity,
        Node::Complement(c) => to_term(nodes, c).complement(),
        Node::Converse(c) => to_term(nodes, c).converse(),
        Node::Join(a, b) => to_term(nodes, a).join(to_term(nodes, b)),
        Node::Meet(a, b) => to_term(nodes, a).meet(to_term(nodes, b)),
        Node::Compose(a, b) => to_term(nodes, a).compose(to_term(nodes, b)),
    }
}

/// For each `x`, which pool terms take equal values, as first-equal indices.
fn equality_patterns(alg: &ComplexAlgebra, nodes: &[Node]) -> HashSet<Vec<u16>> {
    let mut out = HashSet::new();
    let mut vals = vec![Element(0); nodes.len()];
    for x in alg.elements() {
        for i in 0..nodes.len() {
            vals[i] = match nodes[i] {
                Node::X => x,
                Node::Zero => alg.zero(),
                Node::One => alg.one(),
                Node::Id => alg.identity(),
                Node::Complement(c) => alg.complement(vals[c]),
                Node::Converse(c) => alg.converse(vals[c]),
                Node::Join(a, b) => alg.join(vals[a], vals[b]),
                Node::Meet(a, b) => alg.meet(vals[a], vals[b]),
                Node::Compose(a, b) => alg.compose(vals[a], vals[b]),
            };
        }
        let mut first = HashMap::new();
        out.insert(vals.iter().enumerate().map(|(i, v)| *first.entry(*v).or_insert(i as u16)).collect());
    }
    out
}

/// A depth-≤1 sentence over equations is a boolean combination of closed
/// equations and `∃x ψ(x)` with `ψ` quantifier-free, so two algebras agree on
/// all of them iff they realise the same equality patterns of the pool.
fn depth_one_pool() -> Result<&'static str, String> {
    let (a, b) = (algebra(4, 2), algebra(5, 2));
    let nodes = term_pool();
    let (pa, pb) = (equality_patterns(&a, &nodes), equality_patterns(&b, &nodes));
    ensure(pa == pb, || {
        let only: Vec<_> = pa.symmetric_difference(&pb).take(1).collect();
        format!("depth-1 pool distinguishes B(4,2) from B(5,2): pattern {only:?}")
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..25 {
        let (i, j) = (rng.gen_range(0..nodes.len()), rng.gen_range(0..nodes.len()));
        let f = Formula::exists("x", Formula::eq(to_term(&nodes, i), to_term(&nodes, j)));
        let predicted = pa.iter().any(|p| p[i] == p[j]);
        for alg in [&a, &b] {
            let got = evaluate(&f, alg, &HashMap::new()).map_err(|e| e.to_string())?;
            ensure(got == predicted, || format!("evaluator disagrees with pattern table on {f}"))?;
        }
    }
    Ok("no depth-1 sentence over terms of size <= 4 separates B(4,2) from B(5,2)")
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "axiom soundness", axiom_soundness),
        (2, "rainbow ∃-strategy wins when |S| <= |T|", exists_strategy_positive),
        (3, "∀-refuter wins when |S| > |T|", refuter_negative),
        (4, "refuter against the ∃-strategy", refuter_cross_check),
        (5, "Seurat strategy", seurat_lemma43),
        (6, "Seurat solver", seurat_oracle),
        (7, "EF strategy on rainbow pairs", ef_prop44),
        (8, "indistinguishable pair differing in representability", desk_instance),
        (9, "cardinality sentences", phi_k_sentences),
        (10, "pebble strategy", pebble_cor33),
        (11, "invariant suites", invariant_suites),
    ];
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, check) in criteria {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("PASS criterion {n}: {name}: {detail} [{}]", secs(start.elapsed())),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {n}: {name}: {detail} [{}]", secs(start.elapsed()));
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
