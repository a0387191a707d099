use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rainbow_games::complex_algebra::{check_axioms, ComplexAlgebra};
use rainbow_games::ef_game::{self, EfMode, EfVerdict, Mirror, Prop44};
use rainbow_games::fo_logic::{cardinality_sentence, evaluate, parse_formula};
use rainbow_games::network_game::{
    play_refuter, render_transcript, verify_exists_strategy, verify_forall_refutation, ExistsVerifyOptions,
    NetBudget, NetVerdict, RainbowRefuter, RainbowStrategy, RefutationVerdict,
};
use rainbow_games::pebble_game::{self, Cor33, MirrorPebbles, PebbleMode, PebbleVerdict};
use rainbow_games::ras::{load_ras, write_ras};
use rainbow_games::rainbow::{build_rainbow, RainbowParams};
use rainbow_games::seurat_game::{self, Lemma43, SeuratVerdict, VerifyMode, VerifyOptions};
use rainbow_games::AtomStructure;

/// Exit status: verdicts first, then usage errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Ok,
    Counterexample,
    Usage,
    Inconclusive,
}

impl From<Outcome> for ExitCode {
    fn from(o: Outcome) -> ExitCode {
        ExitCode::from(match o {
            Outcome::Ok => 0,
            Outcome::Counterexample => 1,
            Outcome::Usage => 2,
            Outcome::Inconclusive => 3,
        })
    }
}

#[derive(Parser)]
#[command(name = "rainbow-games", version, about = "Rainbow relation algebras and their games")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EfStrategyName {
    Prop44,
    Mirror,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PebbleStrategyName {
    Cor33,
    Mirror,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the rainbow atom structure with `s` greens and `t` red indices.
    Rainbow {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the relation-algebra axioms of a structure.
    Axioms { file: PathBuf },
    /// Print the representability prediction for a rainbow structure.
    Predict { file: PathBuf },
    /// Verify the rainbow ∃-strategy or the ∀-refuter in the network game.
    Netgame {
        file: PathBuf,
        /// Rounds, counting ∀'s opening.
        #[arg(long)]
        rounds: usize,
        #[arg(long, conflicts_with = "verify_refuter")]
        verify_exists: bool,
        #[arg(long)]
        verify_refuter: bool,
        /// Maximum number of positions to expand.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        max_nodes: Option<usize>,
    },
    /// Verify an ∃-strategy in the n-round equivalence game on two algebras.
    Efgame {
        a: PathBuf,
        b: PathBuf,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long, value_enum, default_value = "sampled")]
        mode: Mode,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Required with `--mode sampled`.
        #[arg(long)]
        seed: Option<u64>,
        /// Defaults to mirror for identical structures and prop44 otherwise.
        #[arg(long, value_enum)]
        strategy: Option<EfStrategyName>,
    },
    /// Verify the splitting strategy in the Seurat game G_n(T, T').
    Seurat {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        t2: usize,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: Mode,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Required with `--mode sampled`.
        #[arg(long)]
        seed: Option<u64>,
        /// Maximum number of complete plays in exhaustive mode.
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
    },
    /// Solve G_n(T, T') by brute force.
    SeuratSolve {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        t2: usize,
        #[arg(short = 'n')]
        n: usize,
    },
    /// Verify an ∃-strategy in the pebble game on two atom structures.
    Pebble {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        pebbles: usize,
        #[arg(long)]
        rounds: usize,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: Mode,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Required with `--mode sampled`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        /// Defaults to mirror for identical structures and cor33 otherwise.
        #[arg(long, value_enum)]
        strategy: Option<PebbleStrategyName>,
    },
    /// Evaluate a first-order sentence in the complex algebra.
    Eval {
        file: PathBuf,
        #[arg(long, required_unless_present = "atleast", conflicts_with = "atleast")]
        formula: Option<String>,
        /// Evaluate "there is an element above at least K atoms".
        #[arg(long)]
        atleast: Option<usize>,
    },
}

fn usage(msg: impl std::fmt::Display) -> Outcome {
    eprintln!("error: {msg}");
    Outcome::Usage
}

fn load(path: &Path) -> Result<AtomStructure, Outcome> {
    load_ras(path).map_err(usage)
}

fn rainbow_params(path: &Path, s: &AtomStructure) -> Result<RainbowParams, Outcome> {
    RainbowParams::recognize(s).ok_or_else(|| usage(format!("{} is not a rainbow structure", path.display())))
}

fn require_seed(seed: Option<u64>) -> Result<u64, Outcome> {
    seed.ok_or_else(|| usage("--mode sampled needs an explicit --seed"))
}

fn sampled_label(exhaustive: bool) -> &'static str {
    if exhaustive {
        "verified (exhaustive)"
    } else {
        "verified (sampled)"
    }
}

fn run(cmd: Cmd) -> Result<Outcome, Outcome> {
    match cmd {
        Cmd::Rainbow { s, t, out } => {
            let p = RainbowParams::new(s, t).map_err(usage)?;
            let st = build_rainbow(p).map_err(usage)?;
            std::fs::write(&out, write_ras(&st)).map_err(|e| usage(format!("{}: {e}", out.display())))?;
            println!("wrote {} ({} atoms, s = {s}, t = {t})", out.display(), st.len());
            Ok(Outcome::Ok)
        }
        Cmd::Axioms { file } => {
            let s = load(&file)?;
            match check_axioms(&s) {
                Ok(()) => {
                    println!("axioms hold: {} ({} atoms)", file.display(), s.len());
                    Ok(Outcome::Ok)
                }
                Err(vs) => {
                    for v in vs {
                        println!("violation: {}: {}", v.law.name(), v.detail);
                    }
                    Ok(Outcome::Counterexample)
                }
            }
        }
        Cmd::Predict { file } => {
            let s = load(&file)?;
            let p = rainbow_params(&file, &s)?;
            match p.predicted_representable() {
                Ok(true) => println!("s = {}, t = {}: predicted representable (s <= t)", p.s, p.t),
                Ok(false) => println!("s = {}, t = {}: predicted not representable (s > t)", p.s, p.t),
                Err(e) => {
                    println!("no prediction: {e}");
                    return Ok(Outcome::Inconclusive);
                }
            }
            Ok(Outcome::Ok)
        }
        Cmd::Netgame { file, rounds, verify_exists: _, verify_refuter, budget, max_nodes } => {
            let s = load(&file)?;
            let p = rainbow_params(&file, &s)?;
            if verify_refuter {
                netgame_refuter(&s, p, rounds)
            } else {
                let mut opts = ExistsVerifyOptions::new(rounds);
                let d = NetBudget::default();
                opts.budget = NetBudget { max_nodes: max_nodes.unwrap_or(d.max_nodes), max_states: budget.unwrap_or(d.max_states) };
                opts.check_invariants = true;
                let strategy = RainbowStrategy::new(p, s.clone());
                match verify_exists_strategy(&s, &strategy, &opts) {
                    NetVerdict::Verified { states, leaves } => {
                        println!(
                            "verified (exhaustive): the rainbow ∃-strategy keeps every network coherent through {rounds} rounds \
                             ({states} states, {leaves} final positions)"
                        );
                        Ok(Outcome::Ok)
                    }
                    NetVerdict::Losing { transcript, reason } => {
                        print!("{}", render_transcript(&transcript, &s));
                        println!("counterexample: {reason}");
                        Ok(Outcome::Counterexample)
                    }
                    NetVerdict::Inconclusive { states, reason } => {
                        println!("inconclusive after {states} states: {reason}");
                        Ok(Outcome::Inconclusive)
                    }
                }
            }
        }
        Cmd::Efgame { a, b, n, mode, samples, seed, strategy } => {
            let (sa, sb) = (load(&a)?, load(&b)?);
            let (alg_a, alg_b) = (ComplexAlgebra::new(sa.clone()), ComplexAlgebra::new(sb.clone()));
            let mode = match mode {
                Mode::Exhaustive => EfMode::Exhaustive,
                Mode::Sampled => EfMode::Sampled { samples, seed: require_seed(seed)? },
            };
            let strategy = strategy.unwrap_or(if sa == sb { EfStrategyName::Mirror } else { EfStrategyName::Prop44 });
            let verdict = match strategy {
                EfStrategyName::Mirror => ef_game::verify_ef_strategy(&alg_a, &alg_b, &Mirror, n, mode),
                EfStrategyName::Prop44 => {
                    let st = Prop44::new(rainbow_params(&a, &sa)?, rainbow_params(&b, &sb)?, n).map_err(usage)?;
                    ef_game::verify_ef_strategy(&alg_a, &alg_b, &st, n, mode)
                }
            }
            .map_err(usage)?;
            match verdict {
                EfVerdict::Verified { exhaustive, plays, positions } => {
                    println!("{}: ∃ keeps ⟨q⟩ an isomorphism through n = {n} ({plays} plays, {positions} positions)", sampled_label(exhaustive));
                    Ok(Outcome::Ok)
                }
                EfVerdict::Losing { transcript, reason } => {
                    for r in transcript {
                        println!("{r}");
                    }
                    println!("counterexample: {reason}");
                    Ok(Outcome::Counterexample)
                }
            }
        }
        Cmd::Seurat { t, t2, n, mode, samples, seed, budget } => {
            let mode = match mode {
                Mode::Exhaustive => VerifyMode::Exhaustive { budget },
                Mode::Sampled => VerifyMode::Sampled { samples, seed: require_seed(seed)? },
            };
            let opts = VerifyOptions { mode, check_dagger: true };
            match seurat_game::verify_seurat_strategy(t, t2, n, &Lemma43, opts).map_err(usage)? {
                SeuratVerdict::Verified { exhaustive, plays, positions } => {
                    println!(
                        "{}: the splitting strategy wins G_{n}({t}, {t2}) with (†) at every position ({plays} plays, {positions} positions)",
                        sampled_label(exhaustive)
                    );
                    Ok(Outcome::Ok)
                }
                SeuratVerdict::Losing { transcript, reason } => {
                    for r in transcript {
                        println!("{r}");
                    }
                    println!("counterexample: {reason}");
                    Ok(Outcome::Counterexample)
                }
                SeuratVerdict::Inconclusive { plays } => {
                    println!("inconclusive: budget exhausted after {plays} plays");
                    Ok(Outcome::Inconclusive)
                }
            }
        }
        Cmd::SeuratSolve { t, t2, n } => {
            seurat_game::SeuratPosition::new(t, t2, n).map_err(usage)?;
            println!("{}", seurat_game::brute_force_winner(t, t2, n));
            Ok(Outcome::Ok)
        }
        Cmd::Pebble { a, b, pebbles, rounds, mode, samples, seed, budget, strategy } => {
            let (sa, sb) = (load(&a)?, load(&b)?);
            let mode = match mode {
                Mode::Exhaustive => PebbleMode::Exhaustive { budget },
                Mode::Sampled => PebbleMode::Sampled { samples, seed: require_seed(seed)? },
            };
            let strategy = strategy.unwrap_or(if sa == sb { PebbleStrategyName::Mirror } else { PebbleStrategyName::Cor33 });
            let verdict = match strategy {
                PebbleStrategyName::Mirror => pebble_game::verify_pebble_strategy(&sa, &sb, &MirrorPebbles, pebbles, rounds, mode),
                PebbleStrategyName::Cor33 => {
                    let st = Cor33::new(&sa, &sb).map_err(usage)?;
                    pebble_game::verify_pebble_strategy(&sa, &sb, &st, pebbles, rounds, mode)
                }
            }
            .map_err(usage)?;
            match verdict {
                PebbleVerdict::Verified { exhaustive, plays } => {
                    println!("{} to depth {rounds} with {pebbles} pebbles ({plays} plays)", sampled_label(exhaustive));
                    Ok(Outcome::Ok)
                }
                PebbleVerdict::Losing { transcript, reason } => {
                    for r in transcript {
                        println!("{r}");
                    }
                    println!("counterexample: {reason}");
                    Ok(Outcome::Counterexample)
                }
                PebbleVerdict::Inconclusive { plays } => {
                    println!("inconclusive: budget exhausted after {plays} plays");
                    Ok(Outcome::Inconclusive)
                }
            }
        }
        Cmd::Eval { file, formula, atleast } => {
            let s = load(&file)?;
            let f = match (formula, atleast) {
                (Some(src), _) => parse_formula(&src).map_err(|e| usage(format!("{e}")))?,
                (None, Some(k)) => cardinality_sentence(k).map_err(|_| usage("--atleast needs K >= 1"))?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            let v = evaluate(&f, &ComplexAlgebra::new(s), &HashMap::new()).map_err(usage)?;
            println!("{v}");
            Ok(Outcome::Ok)
        }
    }
}

fn netgame_refuter(s: &AtomStructure, p: RainbowParams, rounds: usize) -> Result<Outcome, Outcome> {
    let refuter = RainbowRefuter { p };
    match verify_forall_refutation(s, &refuter, rounds) {
        RefutationVerdict::Refuted { lines, last_round } => {
            let play = play_refuter(s, &refuter, &RainbowStrategy::new(p, s.clone()), rounds);
            print!("{}", render_transcript(&play.transcript, s));
            if let Some(loss) = play.loss {
                println!("rainbow ∃-strategy: {loss}");
            }
            println!(
                "non-representable witness (|S| = {} > |T| = {}): ∀ wins by round {last_round} against every coherent \
                 ∃ reply ({lines} ∃ lines); the greens force a red clique with no injection S -> T (pigeonhole)",
                p.s, p.t
            );
            Ok(Outcome::Ok)
        }
        RefutationVerdict::Survived { transcript } => {
            print!("{}", render_transcript(&transcript, s));
            println!("counterexample: ∃ survives the refuter for {rounds} rounds along the line above");
            Ok(Outcome::Counterexample)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(o) | Err(o) => o.into(),
    }
}
