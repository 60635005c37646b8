#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bweibull::dataset::{bundled, load_dataset, DataFormat};
use bweibull::estimate::{fit, select_q, HarmonyConfig, DEFAULT_Q_GRID};
use bweibull::gof::gof;
use bweibull::modality::classify;
use bweibull::report::{EntropySummary, Report, Timing};
use bweibull::{BWeibull, Convention, Dataset, Error, Exec, GofResult};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "bweibull", version, about = "Bimodal Weibull fitting and diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit by maximum (q-)likelihood and report estimates, goodness of fit, modality and entropies.
    Fit(FitArgs),
    /// Same as `fit --q scan`.
    Qscan(FitOpts),
    /// Tabulate pdf, cdf and hazard on a grid.
    Describe(DescribeArgs),
    /// Draw a seeded sample.
    Sample(SampleArgs),
    /// KS and CVM statistics of data against a given θ.
    Gof(GofArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Standard,
    Paper,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Standard => Convention::Standard,
            ConventionArg::Paper => Convention::PaperCompat,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Csv,
    Whitespace,
}

#[derive(Clone, Copy, Debug)]
enum QFlag {
    Value(f64),
    Scan,
}

fn parse_q(s: &str) -> Result<QFlag, String> {
    if s.eq_ignore_ascii_case("scan") {
        return Ok(QFlag::Scan);
    }
    let q: f64 = s.parse().map_err(|_| format!("'{s}' is neither a number nor 'scan'"))?;
    if q > 0.0 && q <= 1.0 {
        Ok(QFlag::Value(q))
    } else {
        Err(format!("q = {q} must lie in (0, 1]"))
    }
}

fn parse_bounds(s: &str) -> Result<Vec<(f64, f64)>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number")))
        .collect::<Result<_, _>>()?;
    if v.len() != 6 {
        return Err(format!("expected 6 comma-separated values, got {}", v.len()));
    }
    let b = vec![(v[0], v[1]), (v[2], v[3]), (v[4], v[5])];
    for (name, (lo, hi)) in ["alpha", "beta", "delta"].iter().zip(&b) {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(format!("{name} bounds need finite low < high"));
        }
    }
    if !(b[0].0 > 0.0 && b[1].0 > 0.0) {
        return Err("alpha and beta lower bounds must be positive".into());
    }
    Ok(b)
}

fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| match parse_q(t.trim())? {
            QFlag::Value(q) => Ok(q),
            QFlag::Scan => Err("grid entries must be numbers".into()),
        })
        .collect()
}

#[derive(Args)]
struct OutputOpts {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct Theta {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    delta: f64,
}

impl Theta {
    fn distribution(&self) -> Result<BWeibull, CliError> {
        BWeibull::new(self.alpha, self.beta, self.delta).map_err(CliError::input)
    }
}

#[derive(Args)]
struct DataOpts {
    /// Data file, or the name of a bundled sample (carbon_fibers, wheaton_river).
    data: PathBuf,
    /// Defaults to csv for `.csv` files and whitespace otherwise.
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
}

#[derive(Args)]
struct FitOpts {
    #[command(flatten)]
    data: DataOpts,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// a_lo,a_hi,b_lo,b_hi,d_lo,d_hi
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
    bounds: Option<::std::vec::Vec<(f64, f64)>>,
    /// Convention used to pick q and for csv output; json reports both.
    #[arg(long, value_enum, default_value_t = ConventionArg::Paper)]
    convention: ConventionArg,
    /// Harmony Search iterations.
    #[arg(long, default_value_t = 10_000)]
    iterations: usize,
    /// Comma-separated q values scanned by `--q scan`.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<::std::vec::Vec<f64>>,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct FitArgs {
    /// A value in (0, 1], or `scan`.
    #[arg(long, value_parser = parse_q, default_value = "1")]
    q: QFlag,
    #[command(flatten)]
    opts: FitOpts,
}

#[derive(Args)]
struct DescribeArgs {
    #[command(flatten)]
    theta: Theta,
    #[arg(long, default_value_t = 0.0)]
    from: f64,
    /// Defaults to the 0.995 quantile.
    #[arg(long)]
    to: Option<f64>,
    #[arg(long, default_value_t = 600)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    theta: Theta,
    #[arg(short = 'n', long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GofArgs {
    #[command(flatten)]
    data: DataOpts,
    #[command(flatten)]
    theta: Theta,
    /// Both conventions when omitted.
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
    #[command(flatten)]
    output: OutputOpts,
}

enum CliError {
    Input(String),
    Fit(String),
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Fit(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

fn fit_error(e: Error) -> CliError {
    match e {
        Error::Dataset(_) | Error::Parse { .. } | Error::Io(_) | Error::InvalidParameters(_) => CliError::input(e),
        e => CliError::Fit(e.to_string()),
    }
}

fn load(opts: &DataOpts) -> Result<Dataset, CliError> {
    let path = &opts.data;
    let format = match opts.input_format {
        Some(InputFormat::Csv) => DataFormat::Csv,
        Some(InputFormat::Whitespace) => DataFormat::Whitespace,
        None => DataFormat::from_path(path),
    };
    if !path.exists() {
        if let Some(d) = path.file_stem().and_then(|s| s.to_str()).and_then(bundled) {
            return Ok(d);
        }
        return Err(CliError::Input(format!("{}: no such file", path.display())));
    }
    load_dataset(path, format).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(CliError::input),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn report_csv(r: &Report) -> String {
    let mut s = String::from(
        "model,q,alpha,beta,delta,se_alpha,se_beta,se_delta,scaled_se_alpha,scaled_se_beta,scaled_se_delta,\
         log_likelihood,objective,ks,p_ks,cvm,p_cvm,convention,selected\n",
    );
    for (i, m) in r.models.iter().enumerate() {
        let f = &m.fit;
        let t = f.theta_hat;
        let g = m.gof_for(r.convention).expect("both conventions are reported");
        let se: Vec<String> = f
            .standard_errors
            .iter()
            .chain(&f.paper_scale_standard_errors)
            .map(|v| cell(*v))
            .collect();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{:?},{}",
            m.model,
            f.q,
            t.alpha(),
            t.beta(),
            t.delta(),
            se.join(","),
            f.log_likelihood,
            f.objective_value,
            g.ks_stat,
            g.ks_pvalue,
            g.cvm_stat,
            g.cvm_pvalue,
            g.convention,
            i == r.selected
        );
    }
    s
}

fn cmd_fit(q: QFlag, o: &FitOpts) -> Result<(), CliError> {
    let start = Instant::now();
    let data = load(&o.data)?;
    let mut config = HarmonyConfig::with_bounds(
        o.bounds
            .clone()
            .unwrap_or_else(|| HarmonyConfig::DEFAULT_BOUNDS.to_vec()),
    )
    .seed(o.seed);
    config.max_iterations = o.iterations;
    config.validate().map_err(CliError::input)?;
    let convention = Convention::from(o.convention);
    let mut report = match q {
        QFlag::Value(q) => {
            let f = fit(&data, q, &config).map_err(fit_error)?;
            Report::single(&data, f, o.seed, convention)
        }
        QFlag::Scan => {
            let grid = o.grid.clone().unwrap_or_else(|| DEFAULT_Q_GRID.to_vec());
            let sel = select_q(&data, &grid, &config, convention, Exec::default()).map_err(fit_error)?;
            Report::scan(&data, sel, o.seed, convention)
        }
    }
    .map_err(fit_error)?;
    let chosen = &report.selected_model().fit;
    if chosen.polish_failed {
        eprintln!(
            "warning: local polish did not reach stationarity (|score| = {:e})",
            chosen.score_norm
        );
    }
    if o.timing {
        report.timing = Some(Timing {
            wall_seconds: start.elapsed().as_secs_f64(),
        });
    }
    let text = match o.output.format {
        Format::Json => to_json(&report),
        Format::Csv => report_csv(&report),
    };
    emit(o.output.out.as_deref(), &text)
}

#[derive(Serialize)]
struct GridRow {
    x: f64,
    pdf: Option<f64>,
    cdf: Option<f64>,
    hazard: Option<f64>,
    weibull_pdf: Option<f64>,
    weibull_cdf: Option<f64>,
}

#[derive(Serialize)]
struct Description {
    alpha: f64,
    beta: f64,
    delta: f64,
    modality: bweibull::modality::ModalityReport,
    mean: f64,
    variance: f64,
    entropies: EntropySummary,
    grid: Vec<GridRow>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn cmd_describe(a: &DescribeArgs) -> Result<(), CliError> {
    let d = a.theta.distribution()?;
    let to = match a.to {
        Some(t) => t,
        None => d.quantile(0.995).map_err(CliError::input)?,
    };
    if !(a.from >= 0.0 && to > a.from) || a.points < 2 {
        return Err(CliError::Input(
            "grid needs 0 <= from < to and at least 2 points".into(),
        ));
    }
    let (alpha, beta) = (d.alpha(), d.beta());
    let grid = (0..a.points)
        .map(|i| {
            let x = a.from + (to - a.from) * i as f64 / (a.points - 1) as f64;
            let u = (x / beta).powf(alpha);
            GridRow {
                x,
                pdf: d.pdf(x).ok().and_then(finite),
                cdf: d.cdf(x).ok(),
                hazard: d.hazard(x).ok().and_then(finite),
                weibull_pdf: finite(alpha / beta * (x / beta).powf(alpha - 1.0) * (-u).exp()),
                weibull_cdf: Some(-(-u).exp_m1()),
            }
        })
        .collect();
    let desc = Description {
        alpha,
        beta,
        delta: d.delta(),
        modality: classify(d.params()),
        mean: d.mean(),
        variance: d.variance(),
        entropies: EntropySummary::of(&d, 2.0),
        grid,
    };
    let text = match a.format {
        Format::Json => to_json(&desc),
        Format::Csv => describe_csv(&desc),
    };
    emit(a.out.as_deref(), &text)
}

fn describe_csv(d: &Description) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# alpha={} beta={} delta={}", d.alpha, d.beta, d.delta);
    let maxima: Vec<String> = d.modality.maxima().map(|x| x.to_string()).collect();
    let _ = writeln!(
        s,
        "# classification={:?} method={:?} maxima={}",
        d.modality.classification,
        d.modality.method,
        maxima.join(";")
    );
    let _ = writeln!(s, "# mean={} variance={}", d.mean, d.variance);
    let e = &d.entropies;
    let _ = writeln!(
        s,
        "# shannon={} quadratic={} tsallis_2={}",
        cell(e.shannon.map(|v| v.value)),
        cell(e.quadratic.map(|v| v.value)),
        cell(e.tsallis.map(|v| v.value))
    );
    s.push_str("x,pdf,cdf,hazard,weibull_pdf,weibull_cdf\n");
    for r in &d.grid {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.x,
            cell(r.pdf),
            cell(r.cdf),
            cell(r.hazard),
            cell(r.weibull_pdf),
            cell(r.weibull_cdf)
        );
    }
    s
}

fn cmd_sample(a: &SampleArgs) -> Result<(), CliError> {
    let d = a.theta.distribution()?;
    let mut s = String::new();
    for x in d.sample(a.seed, a.n as usize) {
        let _ = writeln!(s, "{x}");
    }
    emit(a.out.as_deref(), &s)
}

fn cmd_gof(a: &GofArgs) -> Result<(), CliError> {
    let data = load(&a.data)?;
    let d = a.theta.distribution()?;
    let conventions = match a.convention {
        Some(c) => vec![Convention::from(c)],
        None => vec![Convention::PaperCompat, Convention::Standard],
    };
    let cdf = |x: f64| d.cdf(x).unwrap_or(if x > 0.0 { 1.0 } else { 0.0 });
    let results: Vec<GofResult> = conventions
        .into_iter()
        .map(|c| gof(data.values(), cdf, c))
        .collect::<Result<_, _>>()
        .map_err(fit_error)?;
    let text = match a.output.format {
        Format::Json => to_json(&results),
        Format::Csv => {
            let mut s = String::from("convention,ks,p_ks,cvm,p_cvm\n");
            for g in &results {
                let _ = writeln!(
                    s,
                    "{:?},{},{},{},{}",
                    g.convention, g.ks_stat, g.ks_pvalue, g.cvm_stat, g.cvm_pvalue
                );
            }
            s
        }
    };
    emit(a.output.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fit(a) => cmd_fit(a.q, &a.opts),
        Command::Qscan(o) => cmd_fit(QFlag::Scan, o),
        Command::Describe(a) => cmd_describe(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Gof(a) => cmd_gof(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Input(m) | CliError::Fit(m)) = &e;
            eprintln!("error: {m}");
            ExitCode::from(e.code())
        }
    }
}
