use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mksys_core::laws::{default_cases, run_suite_cases, suites, SuiteReport};
use mksys_core::model::{tables_json, ModelFile, Table};
use mksys_core::time::{
    check_time_coherence, compose_system_with_lens, factorization_check, nabla_trajectory, unroll_trajectory,
    InputPolicy, Wiring,
};
use mksys_core::Error;

#[derive(Parser)]
#[command(name = "mksys", version, about = "Check, unroll and compose finite stochastic system models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate every object, kernel, system and wiring in a model.
    Check { model: PathBuf },
    /// Write the joint tables phi^n, s^n and p^n of the model's run.
    Unroll {
        model: PathBuf,
        /// Defaults to the model's horizon, then to 1.
        #[arg(long)]
        horizon: Option<usize>,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Wire a system through a wiring, or pair two systems with --nabla, and
    /// write the model back with the result under a new name.
    Compose {
        model: PathBuf,
        system: String,
        /// Required unless --nabla is given.
        wiring: Option<String>,
        /// Second system of a joint behavior.
        #[arg(long, conflicts_with = "wiring")]
        nabla: Option<String>,
        /// System whose first lens drives both sides of --nabla; the clock
        /// by default.
        #[arg(long, requires = "nabla")]
        driver: Option<String>,
        /// Horizon over which --nabla builds the joint trajectory.
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        name: Option<String>,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run seeded law suites.
    Laws {
        /// A suite name, `interchange` for both interchange suites, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Defaults to each suite's own count.
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// List the suites and exit.
        #[arg(long)]
        list: bool,
    },
    /// Check time coherence of the model's run and, given a wiring, whether
    /// the wired run factorizes through the inner one.
    TrajectoryDiagnose {
        model: PathBuf,
        #[arg(long)]
        wiring: Option<String>,
        #[arg(long)]
        horizon: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// A failure with its exit code: 1 for validation and law failures, 2 for
/// unreadable or unresolvable input.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Parse(_)) { 2 } else { 1 };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<(), Failure>;

struct Style {
    color: bool,
}

impl Style {
    fn from_env() -> Self {
        let color = std::env::var("MKSYS_COLOR").is_ok_and(|v| matches!(v.as_str(), "1" | "always" | "true" | "yes"));
        Style { color }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    fn pass(&self) -> String {
        self.paint("32", "PASS")
    }

    fn fail(&self) -> String {
        self.paint("31", "FAIL")
    }

    fn error(&self) -> String {
        self.paint("31", "error")
    }

    fn warning(&self) -> String {
        self.paint("33", "warning")
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let style = Style::from_env();
    let outcome = match cli.command {
        Command::Check { model } => check(&style, &model),
        Command::Unroll { model, horizon, out, format } => unroll(&model, horizon, out.as_deref(), format),
        Command::Compose { model, system, wiring, nabla, driver, horizon, name, out } => {
            compose(&model, &system, wiring.as_deref(), nabla.as_deref(), driver.as_deref(), horizon, name, out.as_deref())
        }
        Command::Laws { suite, cases, seed, list } => laws(&style, &suite, cases, seed, list),
        Command::TrajectoryDiagnose { model, wiring, horizon } => diagnose(&style, &model, wiring.as_deref(), horizon),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("{}: {}", style.error(), f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path) -> Result<ModelFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure { code: 2, message: format!("cannot read {}: {e}", path.display()) })?;
    Ok(ModelFile::parse(&text)?)
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure { code: 2, message: format!("cannot write {}: {e}", p.display()) }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure { code: 2, message: format!("cannot write output: {e}") })
        }
    }
}

fn check(style: &Style, path: &Path) -> Outcome {
    let model = load(path)?;
    let issues = model.check();
    if issues.is_empty() {
        println!(
            "ok: {} objects, {} kernels, {} systems, {} wirings",
            model.objects.len(),
            model.kernels.len(),
            model.systems.len(),
            model.wirings.len()
        );
        return Ok(());
    }
    for issue in &issues {
        eprintln!("{}: {}: {}", style.error(), issue.entity, issue.error);
    }
    let code = if issues.iter().any(|i| i.is_parse()) { 2 } else { 1 };
    Err(Failure { code, message: format!("{} check(s) failed", issues.len()) })
}

fn unroll(path: &Path, horizon: Option<usize>, out: Option<&Path>, format: Format) -> Outcome {
    let model = load(path)?;
    let tables = model.unroll_tables(horizon)?;
    let system = model.run_system()?;
    let n = tables.iter().filter(|t| t.name == "phi").count() - 1;
    let text = match format {
        Format::Json => mksys_core::model::canonical_json(&tables_json(system, n, &tables)),
        Format::Csv => tables_csv(&tables)?,
    };
    emit(out, &text)
}

fn tuple(items: &[String]) -> String {
    format!("({})", items.join(","))
}

fn tables_csv(tables: &[Table]) -> Result<String, Failure> {
    let io = |e: csv::Error| Failure { code: 2, message: format!("csv: {e}") };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["table", "n", "columns", "path", "value", "decimal"]).map_err(io)?;
    for t in tables {
        for r in &t.rows {
            let decimal = r.decimal.map(|d| d.to_string()).unwrap_or_default();
            w.write_record([t.name, &t.n.to_string(), &tuple(&t.columns), &tuple(&r.path), &r.value, &decimal])
                .map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Failure { code: 2, message: format!("csv: {e}") })?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

#[allow(clippy::too_many_arguments)]
fn compose(
    path: &Path,
    system: &str,
    wiring: Option<&str>,
    nabla: Option<&str>,
    driver: Option<&str>,
    horizon: Option<usize>,
    name: Option<String>,
    out: Option<&Path>,
) -> Outcome {
    let mut model = load(path)?;
    let step = model.step_system(system)?;
    let (state, input, output) = model.system_objects(system)?;
    let (name, composed, objects) = match (wiring, nabla) {
        (Some(w), None) => {
            let lens = model.lens(w)?;
            let outer = model.wiring_outer(w)?;
            let name = name.unwrap_or_else(|| format!("{system}_{w}"));
            (name, step.wire(&lens)?, (state, outer.input, outer.output))
        }
        (None, Some(other)) => {
            let step2 = model.step_system(other)?;
            let horizon = horizon.or(model.horizon).unwrap_or(1).max(1);
            let (sys1, sys2) = (step.unroll(horizon)?, step2.unroll(horizon)?);
            let traj1 = unroll_trajectory(&sys1, &model.initial_law(system)?, &InputPolicy::Closed)?;
            let traj2 = unroll_trajectory(&sys2, &model.initial_law(other)?, &InputPolicy::Closed)?;
            let lens = match driver {
                Some(d) => Some(model.step_system(d)?.unroll(1)?.lens(0)),
                None => None,
            };
            nabla_trajectory(&sys1, &traj1, &sys2, &traj2, lens.as_ref())?;
            let (s2, i2, o2) = model.system_objects(other)?;
            let cat = |a: Vec<String>, b: Vec<String>| a.into_iter().chain(b).collect::<Vec<_>>();
            let name = name.unwrap_or_else(|| format!("{system}_nabla_{other}"));
            (name, step.tensor(&step2)?, (cat(state, s2), cat(input, i2), cat(output, o2)))
        }
        _ => {
            return Err(Failure { code: 2, message: "give either a wiring or --nabla SYSTEM".into() });
        }
    };
    let (s, i, o) = objects;
    model.put_system(&name, s, i, o, &composed);
    let issues = model.check();
    if let Some(issue) = issues.first() {
        return Err(Failure { code: 1, message: format!("composed model fails its check: {}: {}", issue.entity, issue.error) });
    }
    emit(out, &model.to_canonical_string())
}

fn report_line(style: &Style, r: &SuiteReport) -> String {
    let verdict = if r.passed() { style.pass() } else { style.fail() };
    format!("{verdict} {} cases={} failures={} seed={} digest={:016x}", r.name, r.cases, r.failures, r.seed, r.digest)
}

fn laws(style: &Style, suite: &str, cases: Option<usize>, seed: u64, list: bool) -> Outcome {
    if list {
        for (name, about) in suites() {
            println!("{name:28} {about}");
        }
        return Ok(());
    }
    let names: Vec<&str> = match suite {
        "all" => suites().into_iter().map(|(n, _)| n).collect(),
        "interchange" => vec!["arena-interchange", "arenasys-interchange"],
        other => vec![other],
    };
    for name in &names {
        default_cases(name).map_err(|e| Failure { code: 2, message: e.to_string() })?;
    }
    if cases == Some(0) {
        eprintln!("{}: 0 cases requested, the suites pass trivially", style.warning());
    }
    let mut failed = 0;
    for name in names {
        let n = match cases {
            Some(n) => n,
            None => default_cases(name)?,
        };
        let r = run_suite_cases(name, seed, n)?;
        println!("{}", report_line(style, &r));
        if let Some(first) = &r.first_failure {
            println!("  first counterexample: {first}");
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(Failure { code: 1, message: format!("{failed} suite(s) failed") });
    }
    Ok(())
}

fn diagnose(style: &Style, path: &Path, wiring: Option<&str>, horizon: Option<usize>) -> Outcome {
    let model = load(path)?;
    let name = model.run_system()?;
    let step = model.step_system(name)?;
    let horizon = horizon.or(model.horizon).unwrap_or(1).max(1);
    let sys = step.unroll(horizon)?;
    let init = model.initial_law(name)?;
    let mut ok = true;
    let verdict = |b: bool| if b { style.pass() } else { style.fail() };
    match wiring {
        None => {
            let policy = match model.policy_step(&step)? {
                None => InputPolicy::Closed,
                Some(k) => InputPolicy::from_step(&sys, &k)?,
            };
            let traj = unroll_trajectory(&sys, &init, &policy)?;
            for (n, c) in check_time_coherence(&traj, &sys)?.into_iter().enumerate() {
                println!("{} time coherence s^{} -> s^{}", verdict(c), n + 1, n);
                ok &= c;
            }
        }
        Some(w) => {
            let lens = model.lens(w)?;
            let wiring = Wiring::from_step(&lens, horizon)?;
            let composed = compose_system_with_lens(&sys, &wiring)?;
            let policy = match model.policy_step(&step.wire(&lens)?)? {
                None => InputPolicy::Closed,
                Some(k) => InputPolicy::from_step(&composed, &k)?,
            };
            let tprime = unroll_trajectory(&composed, &init, &policy)?;
            for (n, c) in check_time_coherence(&tprime, &composed)?.into_iter().enumerate() {
                println!("{} time coherence s^{} -> s^{}", verdict(c), n + 1, n);
                ok &= c;
            }
            let report = factorization_check(&tprime, &sys, &wiring)?;
            for n in 0..report.factorizes.len() {
                println!(
                    "edge {n}: generated={} independent={} factorizes={}",
                    report.generated[n], report.independent[n], report.factorizes[n]
                );
            }
            println!("{} factorization holds wherever both hypotheses do", verdict(report.consistent()));
            ok &= report.consistent();
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure { code: 1, message: String::new() })
    }
}
