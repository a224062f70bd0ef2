//! One line per acceptance criterion, run exactly as stated. Exits nonzero
//! if any criterion fails.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use mksys_core::laws::{absorbing_chain, enumerate_paths, joint_table, run_suite_cases};
use mksys_core::model::ModelFile;
use mksys_core::rational::{format_q, q};
use mksys_core::time::{unroll_trajectory, InputPolicy};
use mksys_core::Morphism;

const SEED: u64 = 0;

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Result<String, String>,
}

/// Runs each suite with exactly `cases` cases and requires zero failures.
fn suites(list: &[(&str, usize)]) -> Result<String, String> {
    let mut notes = Vec::new();
    for &(name, cases) in list {
        let r = run_suite_cases(name, SEED, cases).map_err(|e| e.to_string())?;
        if let Some(f) = r.first_failure {
            return Err(format!("{name}: {} of {cases} failed, first {f}", r.failures));
        }
        notes.push(format!("{name} {cases}/{cases}"));
    }
    Ok(notes.join(", "))
}

fn conditional_reconstruction() -> Result<String, String> {
    suites(&[("conditional-reconstruction", 400)])
}

fn conditional_product() -> Result<String, String> {
    suites(&[("conditional-product", 300)])
}

fn semigraphoid() -> Result<String, String> {
    suites(&[("semigraphoid", 200)])
}

fn almost_sure() -> Result<String, String> {
    suites(&[("as-trivial-products", 200), ("as-copy-function", 200)])
}

fn lens_and_chart_associativity() -> Result<String, String> {
    suites(&[("lens-associativity", 64), ("chart-associativity", 100)])
}

fn interchange() -> Result<String, String> {
    suites(&[("arena-interchange", 50), ("arenasys-interchange", 50)])
}

fn y_associativity() -> Result<String, String> {
    suites(&[("y-associativity", 50)])
}

fn trajectory_oracle() -> Result<String, String> {
    let notes = suites(&[("trajectory-oracle", 21)])?;
    let (step, init) = absorbing_chain().map_err(|e| e.to_string())?;
    let sys = step.unroll(2).map_err(|e| e.to_string())?;
    let traj = unroll_trajectory(&sys, &init, &InputPolicy::Closed).map_err(|e| e.to_string())?;
    let got = joint_table(&traj.phi[2]);
    let want = [(vec![0, 0, 0], q(1, 4)), (vec![0, 0, 1], q(1, 4)), (vec![0, 1, 1], q(1, 2))].into_iter().collect();
    if got != want {
        return Err(format!("absorbing chain phi^2 = {got:?}"));
    }
    Ok(format!("{notes}, absorbing chain phi^2 exact"))
}

fn time_coherence() -> Result<String, String> {
    suites(&[("time-coherence", 21)])
}

fn factorization() -> Result<String, String> {
    suites(&[("factorization", 20)])
}

fn nabla_recovery() -> Result<String, String> {
    suites(&[("nabla-recovery", 20)])
}

fn uniformization() -> Result<String, String> {
    suites(&[("uniformization", 100)])
}

fn mealy() -> Result<String, String> {
    suites(&[("mealy", 18)])
}

fn bundled() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models/chain.json")
}

fn mksys(args: &[&str]) -> Result<String, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_mksys"))
        .args(args)
        .env_remove("MKSYS_COLOR")
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("mksys {args:?} exited {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)));
    }
    String::from_utf8(o.stdout).map_err(|e| e.to_string())
}

fn cli() -> Result<String, String> {
    let a = mksys(&["laws", "--suite", "all", "--cases", "3", "--seed", "11"])?;
    let b = mksys(&["laws", "--suite", "all", "--cases", "3", "--seed", "11"])?;
    if a != b {
        return Err("two seeded laws runs differ".into());
    }
    let text = std::fs::read_to_string(bundled()).map_err(|e| e.to_string())?;
    let saved = ModelFile::parse(&text).map_err(|e| e.to_string())?.to_canonical_string();
    if saved != text {
        return Err("bundled model does not round-trip byte for byte".into());
    }
    let csv = mksys(&["unroll", bundled().to_str().unwrap(), "--horizon", "3"])?;
    let (step, init) = absorbing_chain().map_err(|e| e.to_string())?;
    let closed = Morphism::discard(&step.output);
    let mut expected = 0;
    for n in 0..=3 {
        let cols: Vec<String> = (0..=n).map(|k| format!("s{k}")).collect();
        for (path, w) in enumerate_paths(&step, &init, &closed, n) {
            let labels: Vec<String> = path.iter().map(|i| i.to_string()).collect();
            let line = format!("phi,{n},\"({})\",\"({})\",{},", cols.join(","), labels.join(","), format_q(&w));
            let line = if n == 0 { line.replace('"', "") } else { line };
            if !csv.lines().any(|l| l.starts_with(&line)) {
                return Err(format!("unroll output lacks {line}"));
            }
            expected += 1;
        }
    }
    let printed = csv.lines().filter(|l| l.starts_with("phi,")).count();
    if printed != expected {
        return Err(format!("unroll printed {printed} phi rows, the oracle has {expected}"));
    }
    Ok(format!("laws reproducible, round-trip exact, {expected} phi rows match"))
}

const CRITERIA: &[Criterion] = &[
    Criterion { name: "conditional reconstruction", budget: Some(Duration::from_secs(5)), run: conditional_reconstruction },
    Criterion { name: "conditional product", budget: Some(Duration::from_secs(5)), run: conditional_product },
    Criterion { name: "semigraphoid suite", budget: None, run: semigraphoid },
    Criterion { name: "almost-sure suites", budget: None, run: almost_sure },
    Criterion { name: "lens and chart associativity", budget: None, run: lens_and_chart_associativity },
    Criterion { name: "xy-interchange in Arena and ArenaSys", budget: Some(Duration::from_secs(60)), run: interchange },
    Criterion { name: "y-composition associativity", budget: None, run: y_associativity },
    Criterion { name: "trajectory oracle", budget: None, run: trajectory_oracle },
    Criterion { name: "time coherence", budget: None, run: time_coherence },
    Criterion { name: "factorization", budget: None, run: factorization },
    Criterion { name: "nabla recovery", budget: None, run: nabla_recovery },
    Criterion { name: "uniformization", budget: None, run: uniformization },
    Criterion { name: "mealy associativity and interchange", budget: None, run: mealy },
    Criterion { name: "cli", budget: None, run: cli },
];

fn main() -> ExitCode {
    let mut failed = 0;
    for c in CRITERIA {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.budget) {
            (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:.2?}, budget {b:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(note) => println!("PASS {:40} {:>9.2?}  {note}", c.name, elapsed),
            Err(why) => {
                failed += 1;
                println!("FAIL {:40} {:>9.2?}  {why}", c.name, elapsed);
            }
        }
    }
    println!("{} of {} criteria pass", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
