//! Batch front end: classify, run, verify, extract intersection numbers and
//! diff against the d = 1 oracle. Exit code 0 means every check passed.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use singular_tr::closedform::{check_closed_forms, predict_symmetry};
use singular_tr::curve::{classify, load_curve_file, SpectralCurveLocal};
use singular_tr::exactnum::{format_rational, int, Rational};
use singular_tr::intersect::extract_descendants;
use singular_tr::recursion::{run, CorrelatorStore, EngineOptions, RunResult};
use singular_tr::verify::{check_dilaton, check_homogeneity, check_string, loop_suite, RelationReport};
use singular_tr::walgebra::airy_oracle_d1;
use singular_tr::Error;

#[derive(Parser)]
#[command(name = "singular-tr", version, about = "Exact topological recursion on local spectral curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Largest 2g - 2 + n computed.
    #[arg(long, default_value_t = 2)]
    chi_max: u32,
    /// Run non-admissible curves; asymmetric levels are kept but quarantined.
    #[arg(long)]
    force: bool,
    /// Worker threads inside each level (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl RunFlags {
    fn options(&self) -> EngineOptions {
        EngineOptions { force: self.force, workers: self.workers, ..EngineOptions::default() }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print the admissibility report.
    Classify { curve: PathBuf },
    /// Compute correlators and write the store as JSON.
    Run {
        curve: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symmetry, loop equations, relations and closed forms.
    Verify {
        curve: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
        /// Check a previously written store instead of the fresh one.
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Descendant intersection numbers of the r-spin curve.
    Intersect {
        curve: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare against the normal-form oracle (one monomial component).
    Oracle {
        curve: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
        #[arg(long)]
        store: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            let tail = if text.ends_with('\n') { "" } else { "\n" };
            match out.write_all(text.as_bytes()).and_then(|_| out.write_all(tail.as_bytes())) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

fn load_store(path: &Path) -> Result<CorrelatorStore, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    CorrelatorStore::from_json(&text)
}

fn compute(curve: &SpectralCurveLocal, flags: &RunFlags) -> Result<RunResult, Error> {
    let result = run(curve, flags.chi_max, &flags.options())?;
    if result.quarantined {
        eprintln!("warning: {} asymmetric entries; output quarantined", result.asymmetries.len());
    }
    Ok(result)
}

struct Row {
    name: String,
    checked: usize,
    failed: usize,
    status: &'static str,
    note: String,
}

impl Row {
    fn new(name: &str, checked: usize, failed: usize, note: String) -> Self {
        let status = if failed == 0 { "pass" } else { "FAIL" };
        Row { name: name.into(), checked, failed, status, note }
    }

    fn skipped(name: &str, why: String) -> Self {
        Row { name: name.into(), checked: 0, failed: 0, status: "n/a", note: why }
    }
}

fn relation_row(name: &str, r: Result<RelationReport, Error>) -> Result<Row, Error> {
    match r {
        Ok(rep) => {
            let note = rep
                .failures
                .first()
                .map(|f| format!("first: (2g={}, n={}) {:?}: {} != {}", f.g2, f.n, f.legs, f.lhs, f.rhs))
                .unwrap_or_default();
            Ok(Row::new(name, rep.checked, rep.failures.len(), note))
        }
        Err(Error::ShapeMismatch(why)) => Ok(Row::skipped(name, why)),
        Err(e) => Err(e),
    }
}

/// F_{1,1}[s] on every branch point carrying one string-type component
/// (s = r + 1) next to components with s = infinity, against the dilaton
/// constant sum_mu ((r^2 - 1)/24 + Q^2/2) / r divided by t.
fn dilaton_constant_rows(curve: &SpectralCurveLocal, store: &CorrelatorStore) -> Vec<Row> {
    let mut rows = Vec::new();
    if !store.has_level(2, 1) || !curve.has_standard_polarization() || curve.has_crosscap_tail() {
        return rows;
    }
    for bp in &curve.branch_points {
        let finite: Vec<_> = bp.components.iter().filter(|c| c.s().is_some()).collect();
        let [c] = finite.as_slice() else { continue };
        let (Some(s), Some(t)) = (c.s(), c.t()) else { continue };
        if s != c.r + 1 || !c.is_monomial() || bp.components.iter().any(|m| m.s().is_none() && !m.f01.is_empty()) {
            continue;
        }
        let observed = store.get(2, 1, &[(c.id, s)]);
        let constant: Rational = bp
            .components
            .iter()
            .map(|m| {
                let r = int(m.r as i64);
                ((&r * &r - int(1)) / int(24) + &m.q * &m.q / int(2)) / &r
            })
            .sum();
        let expected = constant / &t;
        let failed = (observed != expected) as usize;
        let note = format!(
            "(g,n)=(1,1) bp {}: F_{{1,1}}[{s}] = {}, expected {}",
            bp.id,
            format_rational(&observed),
            format_rational(&expected)
        );
        rows.push(Row::new("dilaton constant", 1, failed, note));
    }
    rows
}

fn verify(curve: &SpectralCurveLocal, flags: &RunFlags, store_path: Option<&Path>) -> Result<bool, Error> {
    let result = compute(curve, flags)?;
    let store = match store_path {
        Some(p) => load_store(p)?,
        None => result.store.clone(),
    };
    let mut rows = Vec::new();
    let predicted_symmetric = predict_symmetry(curve).iter().all(|p| p.all_pass);
    let observed_symmetric = result.asymmetries.is_empty();
    rows.push(Row::new(
        "symmetric levels",
        store.levels().map(|(_, l)| l.len()).sum(),
        result.asymmetries.len(),
        result.asymmetries.first().map(|a| format!("first: (2g={}, n={}) {:?}", a.g2, a.n, a.legs)).unwrap_or_default(),
    ));
    let mismatch = (predicted_symmetric && !observed_symmetric) as usize;
    rows.push(Row::new(
        "symmetry predictor",
        curve.branch_points.len(),
        mismatch,
        format!("predicted {}", if predicted_symmetric { "symmetric" } else { "asymmetric" }),
    ));
    let loops = loop_suite(curve, &store, flags.chi_max, 1)?;
    let failed = loops.iter().filter(|r| !r.pass).count();
    let note = loops
        .iter()
        .find(|r| !r.pass)
        .map(|r| format!("first: bp {} i={:?} (2g={}, n={}) {:?}", r.branch_point, r.i, r.g2, r.n, r.spectators))
        .unwrap_or_default();
    rows.push(Row::new("loop equations", loops.len(), failed, note));
    rows.push(relation_row("dilaton", check_dilaton(curve, &store))?);
    rows.extend(dilaton_constant_rows(curve, &store));
    rows.push(relation_row("string", check_string(curve, &store))?);
    rows.push(relation_row("homogeneity", check_homogeneity(curve, &store))?);
    match check_closed_forms(curve, &store) {
        Ok(rep) => {
            let note = rep
                .mismatches
                .first()
                .map(|m| format!("first: 2g={} {:?}: engine {} closed {}", m.g2, m.legs, m.engine, m.closed))
                .unwrap_or_else(|| format!("{} without closed form", rep.skipped));
            rows.push(Row::new("closed forms", rep.checked, rep.mismatches.len(), note));
        }
        Err(e @ (Error::NotApplicable(_) | Error::NotSymmetricCase(_))) => {
            rows.push(Row::skipped("closed forms", e.to_string()))
        }
        Err(e) => return Err(e),
    }
    println!("{:<20} {:>8} {:>7}  {:<6} note", "check", "checked", "failed", "status");
    for r in &rows {
        println!("{:<20} {:>8} {:>7}  {:<6} {}", r.name, r.checked, r.failed, r.status, r.note);
    }
    Ok(rows.iter().all(|r| r.failed == 0))
}

fn oracle(curve: &SpectralCurveLocal, flags: &RunFlags, store_path: Option<&Path>) -> Result<bool, Error> {
    let comps: Vec<_> = curve.components().collect();
    let [c] = comps.as_slice() else {
        return Err(Error::ShapeMismatch("the oracle needs a single component".into()));
    };
    let (Some(s), Some(t)) = (c.s(), c.t()) else {
        return Err(Error::ShapeMismatch("the oracle needs finite s".into()));
    };
    if !c.is_monomial() || !curve.has_standard_polarization() || c.q != int(0) || curve.has_crosscap_tail() {
        return Err(Error::ShapeMismatch("the oracle needs a monomial curve without crosscap".into()));
    }
    let engine = match store_path {
        Some(p) => load_store(p)?,
        None => compute(curve, flags)?.store,
    };
    let mut reference = airy_oracle_d1(c.r, s, t, flags.chi_max)?;
    if c.id != singular_tr::walgebra::ORACLE_COMPONENT {
        reference = relabel(&reference, c.id);
    }
    let diffs = reference.diff(&engine);
    let levels = reference.shared_levels(&engine);
    let entries: usize = levels.iter().map(|&(g2, n)| reference.level(g2, n).map_or(0, |l| l.len())).sum();
    println!("levels compared: {}, nonzero oracle entries: {entries}, mismatches: {}", levels.len(), diffs.len());
    for d in diffs.iter().take(10) {
        println!(
            "  (2g={}, n={}) {:?}: oracle {} engine {}",
            d.g2,
            d.n,
            d.legs,
            format_rational(&d.left),
            format_rational(&d.right)
        );
    }
    Ok(diffs.is_empty() && !levels.is_empty())
}

fn relabel(store: &CorrelatorStore, id: u32) -> CorrelatorStore {
    let mut out = CorrelatorStore::new();
    for (&(g2, n), level) in store.levels() {
        let level = level
            .iter()
            .map(|(legs, v)| {
                let mut l: Vec<_> = legs.iter().map(|&(_, k)| (id, k)).collect();
                l.sort_unstable();
                (l, v.clone())
            })
            .collect();
        out.insert_level(g2, n, level);
    }
    out
}

fn dispatch(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Classify { curve } => {
            let curve = load_curve_file(&curve)?;
            let report = classify(&curve);
            print!("{report}");
            Ok(report.admissible())
        }
        Command::Run { curve, flags, out } => {
            let curve = load_curve_file(&curve)?;
            let result = compute(&curve, &flags)?;
            emit(&result.store.to_json(), out.as_deref())?;
            Ok(!result.quarantined)
        }
        Command::Verify { curve, flags, store } => {
            let curve = load_curve_file(&curve)?;
            verify(&curve, &flags, store.as_deref())
        }
        Command::Intersect { curve, flags, format, out } => {
            let curve = load_curve_file(&curve)?;
            let result = compute(&curve, &flags)?;
            let table = extract_descendants(&curve, &result.store)?;
            let text = match format {
                Format::Csv => table.to_csv()?,
                Format::Json => table.to_json(),
            };
            emit(&text, out.as_deref())?;
            Ok(table.dimension_violations().is_empty() && table.divisible_violations().is_empty())
        }
        Command::Oracle { curve, flags, store } => {
            let curve = load_curve_file(&curve)?;
            oracle(&curve, &flags, store.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
