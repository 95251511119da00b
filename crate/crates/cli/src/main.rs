use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qgraph_core::graph::{self, Beta, GraphSpec};
use qgraph_core::ring::{self, FormFactorTable, FormValue, Method};
use qgraph_core::suite::{self, SuiteConfig};

#[derive(Parser, Debug)]
#[command(name = "qgraph", version, about = "Quantum-graph form factors and their combinatorial identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the exact identity suites; exit status 0 iff all pass.
    VerifyIdentities(VerifyArgs),
    /// Ring form factor at eta = pi/4: exact, orbit sum, asymptotic and CUE.
    FormFactor(FormFactorArgs),
    /// Monte Carlo form factor over random bond phases.
    Mc(McArgs),
    /// Abel-regularised trace sums against A(nu, kappa).
    TraceIdentity(TraceArgs),
    /// Periodic-orbit families and the form factor they give.
    Famsum(FamsumArgs),
    /// Monte Carlo form factors of complete graphs next to the COE/CUE curves.
    Conjecture(ConjectureArgs),
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 40)]
    max_n: u32,
    #[arg(long, default_value_t = 30)]
    order: usize,
    #[arg(long, default_value_t = 20)]
    m_max: u32,
    #[arg(long, hide = true)]
    corrupt_rhs: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct FormFactorArgs {
    #[arg(long, default_value = "ring")]
    graph: String,
    /// `N` or inclusive range `A..B`.
    #[arg(long, default_value = "1..40")]
    n: NRange,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct McArgs {
    #[arg(long, default_value = "ring")]
    graph: String,
    #[arg(long, default_value_t = 2)]
    beta: u8,
    #[arg(long, default_value = "1..10")]
    n: NRange,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct TraceArgs {
    #[arg(long)]
    nu: i64,
    #[arg(long)]
    kappa: i64,
    /// Comma-separated epsilon ladder, largest first.
    #[arg(long, value_delimiter = ',', default_values_t = suite::EPSILON_LADDER.to_vec())]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    n0: i64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct FamsumArgs {
    #[arg(long, default_value = "ring")]
    graph: String,
    #[arg(long, default_value_t = 2)]
    beta: u8,
    #[arg(long)]
    n: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ConjectureArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![4usize, 5])]
    vertices: Vec<usize>,
    /// Largest tau = n / 2B to sample.
    #[arg(long, default_value_t = 2.0)]
    max_tau: f64,
    #[arg(long, default_value_t = 5000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

/// Inclusive range of orbit lengths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct NRange {
    start: u32,
    end: u32,
}

impl std::str::FromStr for NRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("invalid n '{s}'"));
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if start > end {
            return Err(format!("empty range '{s}'"));
        }
        Ok(NRange { start, end })
    }
}

impl NRange {
    fn iter(self) -> std::ops::RangeInclusive<u32> {
        self.start..=self.end
    }
}

/// Rows rendered as CSV or JSON, plus trailing `#` comment lines in CSV.
fn render<T: Serialize>(rows: &[T], trailer: &[(&str, String)], format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            for row in rows {
                writer.serialize(row)?;
            }
            let mut text = String::from_utf8(writer.into_inner()?)?;
            for (key, value) in trailer {
                text.push_str(&format!("# {key},{value}\n"));
            }
            Ok(text)
        }
        Format::Json => {
            let mut object = serde_json::Map::new();
            object.insert("rows".into(), serde_json::to_value(rows)?);
            for (key, value) in trailer {
                let parsed = value
                    .parse::<f64>()
                    .ok()
                    .and_then(serde_json::Number::from_f64)
                    .map(serde_json::Value::Number)
                    .unwrap_or_else(|| serde_json::Value::String(value.clone()));
                object.insert((*key).into(), parsed);
            }
            Ok(serde_json::to_string_pretty(&object)? + "\n")
        }
    }
}

/// Writes via a temporary sibling and a rename so partial output never lands.
fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            let mut tmp = path.as_os_str().to_owned();
            tmp.push(".tmp");
            let tmp = PathBuf::from(tmp);
            std::fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
            std::fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct IdentityRow {
    identity: &'static str,
    passed: bool,
    cases: u64,
    counterexample: Option<String>,
}

fn verify_identities(args: VerifyArgs) -> Result<bool> {
    ensure!(args.max_n >= 2 && args.max_n <= 200, "--max-n must be in 2..=200");
    ensure!(args.order <= 60, "--order must be at most 60");
    ensure!(args.m_max >= 1, "--m-max must be at least 1");
    let report = suite::run(&SuiteConfig {
        max_n: args.max_n,
        order: args.order,
        m_max: args.m_max,
        corrupt_rhs: args.corrupt_rhs,
    });
    let text = match args.output.format {
        Format::Csv => report.identities.iter().map(|r| format!("{r}\n")).collect(),
        Format::Json => {
            let rows: Vec<IdentityRow> = report
                .identities
                .iter()
                .map(|r| IdentityRow {
                    identity: r.name,
                    passed: r.passed(),
                    cases: r.cases,
                    counterexample: r.counterexample.clone(),
                })
                .collect();
            render(&rows, &[], Format::Json)?
        }
    };
    emit(&text, args.output.out.as_deref())?;
    Ok(report.passed())
}

#[derive(Serialize)]
struct FormFactorCsvRow {
    n: u32,
    #[serde(rename = "K_exact")]
    k_exact: f64,
    #[serde(rename = "K_po")]
    k_po: f64,
    #[serde(rename = "K_approx")]
    k_approx: f64,
    #[serde(rename = "K_cue")]
    k_cue: f64,
    #[serde(rename = "K_exact_rational")]
    k_exact_rational: String,
    #[serde(rename = "K_po_rational")]
    k_po_rational: String,
    #[serde(rename = "K_cue_rational")]
    k_cue_rational: String,
}

fn rational_string(value: &FormValue) -> String {
    match value {
        FormValue::Exact(r) => r.to_string(),
        FormValue::Real(x) => x.to_string(),
    }
}

fn form_factor(args: FormFactorArgs) -> Result<bool> {
    let spec = GraphSpec::parse(&args.graph)?;
    ensure!(
        matches!(spec, GraphSpec::Ring { eta } if (eta - std::f64::consts::FRAC_PI_4).abs() < 1e-15),
        "form-factor covers the eta = pi/4 ring only; use `mc` for other graphs"
    );
    ensure!(args.n.start >= 1, "--n must start at 1 or later");
    let table = FormFactorTable::ring_quarter(args.n.iter());
    let value = |n, method| table.get(n, method).expect("row present");
    let rows: Vec<FormFactorCsvRow> = args
        .n
        .iter()
        .map(|n| FormFactorCsvRow {
            n,
            k_exact: value(n, Method::Exact).value.to_f64(),
            k_po: value(n, Method::Po).value.to_f64(),
            k_approx: value(n, Method::Approx).value.to_f64(),
            k_cue: value(n, Method::Cue).value.to_f64(),
            k_exact_rational: rational_string(&value(n, Method::Exact).value),
            k_po_rational: rational_string(&value(n, Method::Po).value),
            k_cue_rational: rational_string(&value(n, Method::Cue).value),
        })
        .collect();
    emit(&render(&rows, &[], args.output.format)?, args.output.out.as_deref())?;
    Ok(table.exact_matches_po())
}

#[derive(Serialize)]
struct McRow {
    n: u32,
    estimate: f64,
    stderr: f64,
    exact_if_known: Option<f64>,
}

/// Exact form factor where one is available: the closed form on the
/// eta = pi/4 ring, grid quadrature for up to three free phases.
fn exact_if_known(spec: &GraphSpec, system: &graph::ScatteringSystem, beta: Beta, n: u32) -> Option<f64> {
    match spec {
        GraphSpec::Ring { eta } if beta == Beta::Unitary => Some(ring::k_po_eta(n, *eta)),
        _ => graph::quadrature_form_factor(system, beta, n).ok(),
    }
}

fn mc(args: McArgs) -> Result<bool> {
    let spec = GraphSpec::parse(&args.graph)?;
    let system = spec.system()?;
    let beta = Beta::try_from(args.beta)?;
    ensure!(args.n.start >= 1, "--n must start at 1 or later");
    let estimates = graph::mc_form_factor_range(&system, beta, args.n.end, args.samples, args.seed)?;
    let rows: Vec<McRow> = args
        .n
        .iter()
        .map(|n| {
            let e = estimates[n as usize - 1];
            McRow {
                n,
                estimate: e.estimate,
                stderr: e.stderr,
                exact_if_known: exact_if_known(&spec, &system, beta, n),
            }
        })
        .collect();
    emit(&render(&rows, &[], args.output.format)?, args.output.out.as_deref())?;
    Ok(true)
}

#[derive(Serialize)]
struct TraceRow {
    epsilon: f64,
    sum: f64,
    target: f64,
    abs_error: f64,
}

fn trace_identity(args: TraceArgs) -> Result<bool> {
    ensure!(!args.eps.is_empty(), "--eps needs at least one value");
    if args.nu < 0 || args.kappa < 0 || args.kappa > args.nu {
        bail!("need 0 <= kappa <= nu");
    }
    let target = ring::amplitude_table(args.nu as u32)?
        .get(args.kappa as u32)
        .expect("kappa <= nu")
        .to_f64();
    let mut rows = Vec::new();
    for &epsilon in &args.eps {
        let sum = ring::trace_identity_sum(args.nu, args.kappa, epsilon, args.n0)?;
        rows.push(TraceRow {
            epsilon,
            sum,
            target,
            abs_error: (sum - target).abs(),
        });
    }
    emit(&render(&rows, &[], args.output.format)?, args.output.out.as_deref())?;
    let mut by_eps: Vec<&TraceRow> = rows.iter().collect();
    by_eps.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    Ok(by_eps.windows(2).all(|w| w[1].abs_error < w[0].abs_error))
}

#[derive(Serialize)]
struct FamilyRow {
    family_key: String,
    orbit_count: u64,
    amp_re: f64,
    amp_im: f64,
}

fn famsum(args: FamsumArgs) -> Result<bool> {
    let system = GraphSpec::parse(&args.graph)?.system()?;
    let beta = Beta::try_from(args.beta)?;
    let table = graph::enumerate_families(&system, beta, args.n)?;
    let rows: Vec<FamilyRow> = table
        .families
        .iter()
        .map(|(key, entry)| FamilyRow {
            family_key: key.to_string(),
            orbit_count: entry.orbit_count,
            amp_re: entry.amplitude.re,
            amp_im: entry.amplitude.im,
        })
        .collect();
    let k = graph::famsum_form_factor(&table);
    emit(
        &render(&rows, &[("form_factor", k.to_string())], args.output.format)?,
        args.output.out.as_deref(),
    )?;
    Ok(true)
}

#[derive(Serialize)]
struct ConjectureRow {
    graph: String,
    beta: u8,
    n: u32,
    tau: f64,
    estimate: f64,
    stderr: f64,
    rmt: f64,
}

fn conjecture(args: ConjectureArgs) -> Result<bool> {
    ensure!(args.max_tau > 0.0, "--max-tau must be positive");
    let mut rows = Vec::new();
    for &v in &args.vertices {
        let system = GraphSpec::Complete { vertices: v }.system()?;
        let dim = system.dimension();
        let max_n = ((args.max_tau * dim as f64).floor() as u32).max(1);
        for beta in [Beta::Orthogonal, Beta::Unitary] {
            let estimates = graph::mc_form_factor_range(&system, beta, max_n, args.samples, args.seed)?;
            for (i, e) in estimates.iter().enumerate() {
                let n = i as u32 + 1;
                let tau = n as f64 / dim as f64;
                rows.push(ConjectureRow {
                    graph: format!("complete:{v}"),
                    beta: beta.value(),
                    n,
                    tau,
                    estimate: e.estimate,
                    stderr: e.stderr,
                    rmt: graph::rmt_reference(tau, beta),
                });
            }
        }
    }
    emit(&render(&rows, &[], args.output.format)?, args.output.out.as_deref())?;
    Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::VerifyIdentities(a) => verify_identities(a),
        Command::FormFactor(a) => form_factor(a),
        Command::Mc(a) => mc(a),
        Command::TraceIdentity(a) => trace_identity(a),
        Command::Famsum(a) => famsum(a),
        Command::Conjecture(a) => conjecture(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_range_parsing() {
        assert_eq!("5".parse::<NRange>().unwrap(), NRange { start: 5, end: 5 });
        assert_eq!("1..20".parse::<NRange>().unwrap(), NRange { start: 1, end: 20 });
        assert_eq!("1..=3".parse::<NRange>().unwrap(), NRange { start: 1, end: 3 });
        assert!("4..2".parse::<NRange>().is_err());
        assert!("x".parse::<NRange>().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
