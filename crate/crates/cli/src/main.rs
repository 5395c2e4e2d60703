//! `varextropy`: measures, system formulas, estimators and the reciprocal
//! goodness-of-fit test from the command line.
//!
//! Exit status: 0 on success, 1 on usage or input errors, 2 when the
//! numerical machinery fails.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use varextropy::dist::Family;
use varextropy::estimators::{estimate, EstimatorConfig, EstimatorKind, KernelScale};
use varextropy::inference::{
    self, fmt_sig, gof_test, CriticalSource, SimConfig, SimulationReport, Statistic,
};
use varextropy::measures::{self, WeightFunction};
use varextropy::parse::{catalog, parse_bivariate_spec, parse_model_spec, parse_sample_text, parse_signature};
use varextropy::reliability::{self, SignatureVector, SystemModel};
use varextropy::{DistributionModel, Error, QuadratureConfig, SampleData};

/// Environment variable consulted for the seed when `--seed` is absent.
const SEED_ENV: &str = "VAREXTROPY_SEED";
const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "varextropy", version, about = "Weighted varextropy: measures, estimators and tests")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to FILE instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Maximum number of worker threads for simulations.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Measure {
    Extropy,
    Wextropy,
    Varextropy,
    Wvarextropy,
    Residual,
    Past,
    Equilibrium,
    Bivariate,
    Bounds,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Phi {
    One,
    X,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Scale {
    StdDev,
    HalfWidth,
}

impl From<Scale> for KernelScale {
    fn from(s: Scale) -> Self {
        match s {
            Scale::StdDev => KernelScale::StdDev,
            Scale::HalfWidth => KernelScale::HalfWidth,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a measure for a catalogue model.
    Compute {
        #[arg(long)]
        model: String,
        #[arg(long, value_enum)]
        measure: Measure,
        #[arg(long, value_enum, default_value_t = Phi::X)]
        phi: Phi,
        /// Time point for residual, past and MRL-bound measures.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Lifetime measures of a coherent system with i.i.d. components.
    System {
        #[arg(long)]
        signature: String,
        #[arg(long)]
        model: String,
        /// Also report the Hardy-type bounds.
        #[arg(long)]
        bounds: bool,
    },
    /// Estimate VJ^w from a data file.
    Estimate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        estimator: EstimatorKind,
        #[arg(long)]
        bandwidth: Option<f64>,
        #[arg(long, value_enum, default_value_t = Scale::StdDev)]
        kernel_scale: Scale,
    },
    /// Goodness-of-fit test of the reciprocal law on [a, b].
    Gof {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        estimator: Statistic,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 100_000)]
        reps: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// JSON file of cached critical values, read and updated.
        #[arg(long)]
        crit_cache: Option<PathBuf>,
    },
    /// Bias/MSE study: table 1 (gamma(2,1)) or table 2 (beta(2,1)).
    Simulate {
        #[arg(long)]
        table: u32,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated sample sizes.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
    },
    /// Critical values and powers: scenario 1 (A_k, b = 1) or 2 (truncated lognormal, b = 10).
    Power {
        #[arg(long)]
        scenario: u32,
        /// Replications per power cell.
        #[arg(long, default_value_t = 20_000)]
        reps: usize,
        /// Replications per critical value.
        #[arg(long, default_value_t = 100_000)]
        crit_reps: usize,
        /// Use 100000 replications for power cells too.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated sample sizes for the power table.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
    },
    /// List the catalogue models and their parameters.
    Catalog,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Named scalar results, printed in order.
struct Record {
    fields: Vec<(String, Value)>,
}

impl Record {
    fn new() -> Self {
        Record { fields: Vec::new() }
    }

    fn num(&mut self, k: &str, v: f64) -> &mut Self {
        self.fields.push((k.into(), json!(v)));
        self
    }

    fn int(&mut self, k: &str, v: usize) -> &mut Self {
        self.fields.push((k.into(), json!(v)));
        self
    }

    fn text(&mut self, k: &str, v: impl Into<String>) -> &mut Self {
        self.fields.push((k.into(), Value::String(v.into())));
        self
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let m: Map<String, Value> = self.fields.iter().cloned().collect();
                format!("{}\n", serde_json::to_string_pretty(&Value::Object(m)).expect("json"))
            }
            Format::Csv => {
                let mut s = String::from("quantity,value\n");
                for (k, v) in &self.fields {
                    let cell = match v {
                        Value::Number(n) if n.is_f64() => format!("{:?}", n.as_f64().unwrap_or(f64::NAN)),
                        Value::String(t) => t.clone(),
                        other => other.to_string(),
                    };
                    s.push_str(&format!("{k},{}\n", csv_field(&cell)));
                }
                s
            }
            Format::Text => {
                let w = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                let mut s = String::new();
                for (k, v) in &self.fields {
                    let cell = match v {
                        Value::Number(n) if n.is_f64() => fmt_sig(n.as_f64().unwrap_or(f64::NAN), 6),
                        Value::String(t) => t.clone(),
                        other => other.to_string(),
                    };
                    s.push_str(&format!("{k:<w$}  {cell}\n"));
                }
                s
            }
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn resolve_seed(seed: Option<u64>) -> Outcome<u64> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn read_sample(path: &PathBuf) -> Outcome<SampleData> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read data file `{}`: {e}", path.display())))?;
    Ok(parse_sample_text(&text)?)
}

fn phi_of(p: Phi) -> WeightFunction {
    match p {
        Phi::One => WeightFunction::One,
        Phi::X => WeightFunction::Identity,
    }
}

fn need_t(t: Option<f64>, measure: &str) -> Outcome<f64> {
    t.ok_or_else(|| Failure::Usage(format!("--measure {measure} requires --t")))
}

fn compute(model: &str, measure: Measure, phi: Phi, t: Option<f64>) -> Outcome<Record> {
    let cfg = QuadratureConfig::default();
    let w = phi_of(phi);
    let mut r = Record::new();
    if measure == Measure::Bivariate {
        let joint = parse_bivariate_spec(model)?;
        r.text("model", joint.name());
        r.num("weighted_varextropy", measures::bivariate_weighted_varextropy(&joint, &cfg)?.value);
        return Ok(r);
    }
    let m = parse_model_spec(model)?;
    r.text("model", m.to_string());
    match measure {
        Measure::Extropy => {
            r.num("extropy", measures::extropy(&m, &cfg)?.value);
        }
        Measure::Wextropy => {
            r.num("weighted_extropy", measures::weighted_extropy(&m, &w, &cfg)?.value);
        }
        Measure::Varextropy => {
            r.num("varextropy", measures::varextropy(&m, &cfg)?.value);
        }
        Measure::Wvarextropy => {
            r.num("weighted_varextropy", measures::weighted_varextropy(&m, &w, &cfg)?.value);
        }
        Measure::Residual => {
            let t = need_t(t, "residual")?;
            r.num("t", t);
            r.num("residual_weighted_varextropy", measures::residual_weighted_varextropy(&m, &w, t, &cfg)?.value);
        }
        Measure::Past => {
            let t = need_t(t, "past")?;
            r.num("t", t);
            r.num("past_weighted_varextropy", measures::past_weighted_varextropy(&m, &w, t, &cfg)?.value);
        }
        Measure::Equilibrium => {
            r.num("equilibrium_weighted_varextropy", measures::equilibrium_weighted_varextropy(&m, &cfg)?.value);
        }
        Measure::Bounds => bounds(&m, &w, t, &cfg, &mut r)?,
        Measure::Bivariate => unreachable!(),
    }
    Ok(r)
}

fn bounds(m: &DistributionModel, w: &WeightFunction, t: Option<f64>, cfg: &QuadratureConfig, r: &mut Record) -> Outcome<()> {
    if let Some(t) = t {
        r.num("t", t);
        r.num("residual_weighted_varextropy", measures::residual_weighted_varextropy(m, w, t, cfg)?.value);
        r.num("mrl_upper_bound", measures::residual_mrl_upper_bound(m, w, t, cfg)?.value);
        return Ok(());
    }
    let exact = measures::weighted_varextropy(m, &WeightFunction::Identity, cfg)?.value;
    let lower = match m.family() {
        Family::Normal { mean, sd } => measures::normal_lower_bound(*mean, *sd)?,
        Family::InvGamma { shape, scale } => measures::invgamma_lower_bound(*shape, *scale)?,
        _ => {
            return Err(Failure::Usage(format!(
                "no lower bound for `{}`; bounds without --t support normal and invgamma",
                m.name()
            )))
        }
    };
    r.num("lower_bound", lower);
    r.num("weighted_varextropy", exact);
    Ok(())
}

fn system(signature: &str, model: &str, with_bounds: bool) -> Outcome<Record> {
    let cfg = QuadratureConfig::default();
    let s = SignatureVector::new(parse_signature(signature)?)?;
    let comp = parse_model_spec(model)?;
    let sys = SystemModel::new(s, comp);
    let v = reliability::system_varextropy(&sys, &cfg)?;
    let mut r = Record::new();
    r.text("signature", signature.trim());
    r.text("component", sys.component.to_string());
    r.num("extropy", v.extropy.value);
    r.num("varextropy", v.varextropy.value);
    r.num("weighted_varextropy", v.weighted_varextropy.value);
    if with_bounds {
        // A divergent Hardy integral leaves the bound undefined, not the system measures.
        match reliability::hardy_extropy_bound(&sys, &cfg) {
            Ok(b) => r.num("extropy_bound", b.value),
            Err(Error::Domain(msg)) => r.text("extropy_bound", format!("undefined ({msg})")),
            Err(e) => return Err(e.into()),
        };
        match reliability::hardy_varextropy_bound(&sys, &cfg) {
            Ok(b) => r.num("varextropy_bound", b.value),
            Err(Error::Domain(msg)) => r.text("varextropy_bound", format!("undefined ({msg})")),
            Err(e) => return Err(e.into()),
        };
    }
    Ok(r)
}

fn estimate_cmd(data: &PathBuf, kind: EstimatorKind, bandwidth: Option<f64>, scale: Scale) -> Outcome<Record> {
    let sample = read_sample(data)?;
    let cfg = EstimatorConfig {
        scale: scale.into(),
        bandwidth,
        ..Default::default()
    };
    let e = estimate(&sample, kind, &cfg)?;
    let mut r = Record::new();
    r.text("estimator", kind.as_str());
    r.int("n", e.n);
    r.num("bandwidth", e.bandwidth_used);
    r.num("kernel_half_width", e.kernel_half_width);
    r.num("estimate", e.value);
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
fn gof(
    data: &PathBuf,
    a: f64,
    b: f64,
    stat: Statistic,
    alpha: f64,
    reps: usize,
    seed: u64,
    cache: Option<PathBuf>,
) -> Outcome<Record> {
    let sample = read_sample(data)?;
    let cfg = SimConfig::new(reps, seed);
    let source = match cache {
        Some(p) => CriticalSource::Cache(cfg, p),
        None => CriticalSource::Simulate(cfg),
    };
    let g = gof_test(&sample, stat, alpha, a, b, &source)?;
    let mut r = Record::new();
    r.text(
        "decision",
        if g.reject { "reject the reciprocal null" } else { "do not reject the reciprocal null" },
    );
    r.text("estimator", stat.as_str());
    r.int("n", g.n);
    r.num("statistic", g.statistic);
    r.num("critical_value", g.critical_value);
    r.num("alpha", alpha);
    Ok(r)
}

fn render_report(rep: &SimulationReport, format: Format) -> String {
    match format {
        Format::Text => rep.to_text(),
        Format::Csv => rep.to_csv(),
        Format::Json => format!("{}\n", rep.to_json()),
    }
}

fn catalog_text(format: Format) -> String {
    match format {
        Format::Json => {
            let v: Vec<Value> = catalog()
                .iter()
                .map(|e| {
                    let params: Vec<Value> = e
                        .params
                        .iter()
                        .map(|(k, d)| json!({ "name": k, "default": d }))
                        .collect();
                    json!({ "name": e.name, "params": params, "description": e.description })
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
        }
        _ => {
            let mut s = String::new();
            for e in catalog() {
                let p: Vec<String> = e
                    .params
                    .iter()
                    .map(|(k, d)| match d {
                        Some(v) => format!("{k}={v}"),
                        None => format!("{k}=<required>"),
                    })
                    .collect();
                if format == Format::Csv {
                    s.push_str(&format!("{},{},{}\n", e.name, p.join(" "), csv_field(e.description)));
                } else {
                    s.push_str(&format!("{:<12} {:<28} {}\n", e.name, p.join(" "), e.description));
                }
            }
            s
        }
    }
}

fn dispatch(cli: Cli) -> Outcome<String> {
    let f = cli.format;
    Ok(match cli.command {
        Command::Compute { model, measure, phi, t } => compute(&model, measure, phi, t)?.render(f),
        Command::System { signature, model, bounds } => system(&signature, &model, bounds)?.render(f),
        Command::Estimate { data, estimator, bandwidth, kernel_scale } => {
            estimate_cmd(&data, estimator, bandwidth, kernel_scale)?.render(f)
        }
        Command::Gof { data, a, b, estimator, alpha, reps, seed, crit_cache } => {
            let seed = resolve_seed(seed)?;
            gof(&data, a, b, estimator, alpha, reps, seed, crit_cache)?.render(f)
        }
        Command::Simulate { table, reps, seed, n } => {
            let seed = resolve_seed(seed)?;
            let sizes = n.unwrap_or_else(|| inference::BIAS_SIZES.to_vec());
            let rep = inference::bias_table(table, &sizes, &SimConfig::new(reps, seed))?;
            render_report(&rep, f)
        }
        Command::Power { scenario, reps, crit_reps, full, seed, n } => {
            let seed = resolve_seed(seed)?;
            let reps = if full { 100_000 } else { reps };
            let sizes = n.unwrap_or_else(|| inference::POWER_SIZES.to_vec());
            let (rep, _, _) = inference::power_tables(
                scenario,
                &inference::CRIT_SIZES,
                &sizes,
                &SimConfig::new(crit_reps, seed),
                &SimConfig::new(reps, seed),
            )?;
            render_report(&rep, f)
        }
        Command::Catalog => catalog_text(f),
    })
}

fn run() -> Outcome<()> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            eprint!("{e}");
            return Err(Failure::Usage(String::new()));
        }
    };
    let output = cli.output.clone();
    let threads = cli.threads;
    let text = inference::with_threads(threads, || dispatch(cli))??;
    match output {
        Some(p) => std::fs::write(&p, text)
            .map_err(|e| Failure::Usage(format!("cannot write `{}`: {e}", p.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            // A closed pipe is not worth a failure status.
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
