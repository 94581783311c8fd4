//! `orthofit` command-line front end.

mod manifest;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use orthofit::bench::experiment::{
    default_rtilde, paper_degrees, paper_rtildes, write_cubature_csv, DEFAULT_SAMPLE_SEED, DEFAULT_TEST_POINTS,
    DEFAULT_TEST_SEED, DESK_N, PAPER_N,
};
use orthofit::bench::plot::{experiment_svg, log_plot_svg, Series};
use orthofit::bench::{
    error_metrics, preset, run_cubature_table, run_experiment, CubatureTableConfig, ExperimentConfig, Sweep,
    TestFunctionId,
};
use orthofit::io::{read_table, write_points, write_rule, write_table};
use orthofit::sampling::uniform_points;
use orthofit::solver::{build_design_from_points, evaluate_operator};
use orthofit::{
    domain_rule, fit, integrate, integrate_operator, mock_optimal_select, optimal_nodes, uniform_sample, BasisVariant,
    Basis, Domain, Model, Point,
};

use manifest::RunManifest;

#[derive(Parser, Debug)]
#[command(name = "orthofit", version, about = "Mapped Zernike interpolation-regression and cubature on planar domains")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Manifest path (default: `<first output>.manifest.json`, or
    /// `orthofit.manifest.json` when everything went to stdout).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal interpolation nodes mapped onto a domain.
    Nodes(NodesArgs),
    /// Uniform random sample of (n+1)^2 points.
    Sample(SampleArgs),
    /// Fit the interpolation-regression operator and save it as JSON.
    Fit(FitArgs),
    /// Evaluate a saved model at points.
    Eval(EvalArgs),
    /// Integrate a test function or a saved model with the mapped product rule.
    Cubature(CubatureArgs),
    /// Error sweeps and cubature tables as CSV.
    Bench(BenchArgs),
    /// Log-scale SVG of the four error curves from a bench CSV.
    Plot(PlotArgs),
}

#[derive(Args, Debug, Serialize)]
struct NodesArgs {
    /// Domain as inline JSON (e.g. '{"tag":"polygon","p":12}') or @file.json.
    #[arg(long)]
    domain: String,
    /// Interpolation degree.
    #[arg(long)]
    m: usize,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    /// Domain as inline JSON or @file.json.
    #[arg(long)]
    domain: String,
    /// Grid parameter; the sample has (n+1)^2 points.
    #[arg(long)]
    n: usize,
    /// Sample seed.
    #[arg(long, env = "ORTHOFIT_SEED", default_value_t = DEFAULT_SAMPLE_SEED)]
    seed: u64,
    /// Attach values of test function f<id> as a third column.
    #[arg(long)]
    function: Option<u8>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
enum VariantArg {
    /// Orthonormal under the pulled-back Jacobian weight.
    Plain,
    /// Orthonormal under the plain area measure.
    JacobianWeighted,
}

impl From<VariantArg> for BasisVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Plain => BasisVariant::Plain,
            VariantArg::JacobianWeighted => BasisVariant::JacobianWeighted,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct FitArgs {
    /// Domain as inline JSON or @file.json (default: the sample file's domain).
    #[arg(long)]
    domain: Option<String>,
    /// Interpolation degree.
    #[arg(long)]
    m: usize,
    /// Regression degree (default: m + floor(sqrt(m))).
    #[arg(long)]
    rtilde: Option<usize>,
    /// Sample file (`x y` or `x y f`). Without it a uniform sample is drawn.
    #[arg(long)]
    sample: Option<PathBuf>,
    /// Grid parameter for a drawn sample.
    #[arg(long, default_value_t = DESK_N)]
    n: usize,
    /// Seed for a drawn sample.
    #[arg(long, env = "ORTHOFIT_SEED", default_value_t = DEFAULT_SAMPLE_SEED)]
    seed: u64,
    /// Test function id, or a file whose last column holds one value per
    /// sample point. Defaults to the sample file's third column.
    #[arg(long)]
    function: Option<String>,
    /// Basis variant.
    #[arg(long, value_enum, default_value_t = VariantArg::Plain)]
    variant: VariantArg,
    /// Model output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct EvalArgs {
    /// Model JSON written by `fit`.
    #[arg(long)]
    model: PathBuf,
    /// Point file (`x y` per line). Without it uniform test points are drawn.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Number of drawn test points.
    #[arg(long, default_value_t = DEFAULT_TEST_POINTS)]
    test_points: usize,
    /// Seed for drawn test points.
    #[arg(long, env = "ORTHOFIT_SEED", default_value_t = DEFAULT_TEST_SEED)]
    seed: u64,
    /// Compare against test function f<id> and report the error metrics.
    #[arg(long)]
    function: Option<u8>,
    /// Error report JSON (needs --function; default: stderr summary).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Output file for `x y value` rows (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CubatureArgs {
    /// Domain as inline JSON or @file.json (default: the model's domain).
    #[arg(long)]
    domain: Option<String>,
    /// Exactness degree of the product rule.
    #[arg(long)]
    degree: usize,
    /// Integrate test function f<id> directly.
    #[arg(long, conflicts_with = "model")]
    function: Option<u8>,
    /// Integrate a fitted model.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Weight ω: `none` for ω ≡ 1, or a test function such as `f3`.
    #[arg(long, default_value = "none")]
    weight_spec: String,
    /// Also write the rule as `x y w` rows.
    #[arg(long)]
    rule_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
enum SweepKind {
    /// Vary m with r̃ = m + floor(sqrt(m)).
    Degree,
    /// Fix m and vary r̃.
    Regression,
}

#[derive(Args, Debug, Serialize)]
struct BenchArgs {
    /// Paper configuration `paper-f<k>-<ellipse|annulus|polygon|disk>`.
    #[arg(long)]
    preset: Option<String>,
    /// Domain as inline JSON or @file.json (overrides the preset's).
    #[arg(long)]
    domain: Option<String>,
    /// Test function id (overrides the preset's).
    #[arg(long)]
    function: Option<u8>,
    /// Rerun the configuration stored in a manifest or plan JSON.
    #[arg(long, conflicts_with_all = ["preset", "domain", "function"])]
    config: Option<PathBuf>,
    /// Basis variant.
    #[arg(long, value_enum, default_value_t = VariantArg::Plain)]
    variant: VariantArg,
    /// Grid parameter (default 40, or 100 with --paper-scale).
    #[arg(long)]
    n: Option<usize>,
    /// Interpolation degrees, comma separated.
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    /// Regression degrees, comma separated. Implies a regression sweep.
    #[arg(long, value_delimiter = ',')]
    rtilde: Vec<usize>,
    /// Sweep family.
    #[arg(long, value_enum)]
    sweep: Option<SweepKind>,
    /// Use n = 100 and the published degree lists.
    #[arg(long)]
    paper_scale: bool,
    /// Test set size.
    #[arg(long, default_value_t = DEFAULT_TEST_POINTS)]
    test_points: usize,
    /// Sample seed.
    #[arg(long, env = "ORTHOFIT_SEED", default_value_t = DEFAULT_SAMPLE_SEED)]
    seed: u64,
    /// Test-set seed.
    #[arg(long, default_value_t = DEFAULT_TEST_SEED)]
    test_seed: u64,
    /// Run the sweep this many times with consecutive seeds.
    #[arg(long, default_value_t = 1)]
    repeat: u64,
    /// Produce the cubature table at this rule degree instead of an error sweep.
    #[arg(long)]
    cubature: Option<usize>,
    /// CSV output (default: stdout). With --repeat k > 1, run i goes to `<stem>.run<i>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot of the error curves.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct PlotArgs {
    /// CSV written by `bench`.
    #[arg(long)]
    csv: PathBuf,
    /// Plot title (default: the CSV file name).
    #[arg(long)]
    title: Option<String>,
    /// SVG output (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Everything needed to reproduce a bench run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "plan", rename_all = "snake_case")]
enum BenchPlan {
    Sweep { experiment: ExperimentConfig, repeat: u64 },
    CubatureTable { table: CubatureTableConfig },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    let numerical = e
        .chain()
        .filter_map(|c| c.downcast_ref::<orthofit::Error>())
        .any(orthofit::Error::is_numerical);
    if numerical {
        2
    } else {
        1
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global()?;
    }
    let argv: Vec<String> = std::env::args().collect();
    let mut man = match &cli.command {
        Command::Nodes(a) => nodes(a, argv)?,
        Command::Sample(a) => sample(a, argv)?,
        Command::Fit(a) => fit_cmd(a, argv)?,
        Command::Eval(a) => eval(a, argv)?,
        Command::Cubature(a) => cubature(a, argv)?,
        Command::Bench(a) => bench(a, argv)?,
        Command::Plot(a) => plot(a, argv)?,
    };
    man.outputs.dedup();
    man.write(cli.manifest.as_deref())?;
    Ok(())
}

fn parse_domain(spec: &str) -> Result<Domain> {
    let text = match spec.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading domain file {path}"))?,
        None => spec.to_string(),
    };
    let dom: Domain = serde_json::from_str(&text).with_context(|| format!("malformed domain spec {text:?}"))?;
    dom.validate()?;
    Ok(dom)
}

fn function_id(id: u8) -> Result<TestFunctionId> {
    Ok(TestFunctionId::new(id)?)
}

/// Writes `body` to `path` (recorded in the manifest) or to stdout.
fn emit<F>(path: Option<&Path>, man: &mut RunManifest, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?);
            body(&mut w)?;
            w.flush()?;
            man.outputs.push(p.to_path_buf());
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn read_text_table(path: &Path, min_cols: usize) -> Result<orthofit::io::TextTable> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_table(BufReader::new(f), min_cols).with_context(|| format!("reading {}", path.display()))
}

fn nodes(a: &NodesArgs, argv: Vec<String>) -> Result<RunManifest> {
    let mut man = RunManifest::new("nodes", argv);
    man.config = serde_json::to_value(a)?;
    let dom = parse_domain(&a.domain)?;
    let pts = optimal_nodes(&dom, a.m);
    let header = [("domain", serde_json::to_string(&dom)?), ("m", a.m.to_string())];
    emit(a.out.as_deref(), &mut man, |w| write_points(w, &header, &pts))?;
    Ok(man)
}

fn sample(a: &SampleArgs, argv: Vec<String>) -> Result<RunManifest> {
    let mut man = RunManifest::new("sample", argv);
    man.config = serde_json::to_value(a)?;
    man.seeds.push(a.seed);
    let dom = parse_domain(&a.domain)?;
    let s = uniform_sample(&dom, a.n, a.seed);
    let mut header = vec![
        ("domain", serde_json::to_string(&dom)?),
        ("n", a.n.to_string()),
        ("seed", a.seed.to_string()),
    ];
    match a.function {
        Some(id) => {
            let f = function_id(id)?;
            header.push(("function", f.to_string()));
            let rows: Vec<Vec<f64>> = s.points.iter().map(|&p| vec![p.x, p.y, f.eval(p)]).collect();
            emit(a.out.as_deref(), &mut man, |w| write_table(w, &header, &rows))?;
        }
        None => emit(a.out.as_deref(), &mut man, |w| write_points(w, &header, &s.points))?,
    }
    Ok(man)
}

fn fit_cmd(a: &FitArgs, argv: Vec<String>) -> Result<RunManifest> {
    let mut man = RunManifest::new("fit", argv);
    man.config = serde_json::to_value(a)?;

    let table = a.sample.as_deref().map(|p| read_text_table(p, 2)).transpose()?;
    let dom = match (&a.domain, &table) {
        (Some(d), _) => parse_domain(d)?,
        (None, Some(t)) => parse_domain(t.get("domain").ok_or_else(|| anyhow!("sample file has no domain header; pass --domain"))?)?,
        (None, None) => bail!("--domain is required when no --sample file is given"),
    };
    let points: Vec<Point> = match &table {
        Some(t) => t.points(),
        None => {
            man.seeds.push(a.seed);
            uniform_sample(&dom, a.n, a.seed).points
        }
    };
    if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| !dom.contains(**p)) {
        return Err(orthofit::Error::OutsideDomainAt { index: i, radius: p.radius() }.into());
    }

    let values: Vec<f64> = match a.function.as_deref() {
        Some(spec) => match spec.parse::<u8>() {
            Ok(id) => {
                let f = function_id(id)?;
                points.iter().map(|&p| f.eval(p)).collect()
            }
            Err(_) => {
                let vt = read_text_table(Path::new(spec), 1)?;
                vt.rows.iter().map(|r| r[r.len() - 1]).collect()
            }
        },
        None => table
            .as_ref()
            .and_then(|t| t.column(2))
            .ok_or_else(|| anyhow!("no function values: pass --function or a sample file with an `x y f` column"))?,
    };
    if values.len() != points.len() {
        bail!("{} values for {} sample points", values.len(), points.len());
    }

    let r_tilde = a.rtilde.unwrap_or_else(|| default_rtilde(a.m));
    let mock = mock_optimal_select(&points, &optimal_nodes(&dom, a.m))?;
    let basis = Basis::new(dom, a.variant.into());
    let sys = build_design_from_points(basis, r_tilde, &points, &values, &mock)?;
    let model = fit(&sys)?;
    if model.is_ill_conditioned() {
        eprintln!(
            "warning: ill-conditioned system (cond R11 = {:e}, cond V1'V1 = {:e})",
            model.diagnostics.cond_r11, model.diagnostics.cond_v1tv1
        );
    }
    let json = serde_json::to_string_pretty(&model)?;
    emit(a.out.as_deref(), &mut man, |w| writeln!(w, "{json}"))?;
    Ok(man)
}

fn load_model(path: &Path) -> Result<Model> {
    let text = fs::read_to_string(path).with_context(|| format!("reading model {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("malformed model {}", path.display()))
}

fn eval(a: &EvalArgs, argv: Vec<String>) -> Result<RunManifest> {
    let mut man = RunManifest::new("eval", argv);
    man.config = serde_json::to_value(a)?;
    let model = load_model(&a.model)?;
    let pts = match &a.points {
        Some(p) => read_text_table(p, 2)?.points(),
        None => {
            man.seeds.push(a.seed);
            uniform_points(&model.basis.domain, a.test_points, a.seed)
        }
    };
    let timed = evaluate_operator(&model, &pts)?;
    let rows: Vec<Vec<f64>> = pts.iter().zip(&timed.values).map(|(p, &v)| vec![p.x, p.y, v]).collect();
    let header = [("domain", serde_json::to_string(&model.basis.domain)?), ("points", pts.len().to_string())];
    emit(a.out.as_deref(), &mut man, |w| write_table(w, &header, &rows))?;

    if let Some(id) = a.function {
        let f = function_id(id)?;
        let truth: Vec<f64> = pts.iter().map(|&p| f.eval(p)).collect();
        let report = error_metrics(&truth, &timed.values, timed.elapsed)?;
        match &a.report {
            Some(path) => {
                let json = serde_json::to_string_pretty(&report)?;
                emit(Some(path), &mut man, |w| writeln!(w, "{json}"))?;
            }
            None => eprintln!(
                "{f}: mse {:e} max_ae {:e} mre {:e} max_re {:e} ex_time {:e}",
                report.mse, report.max_ae, report.mre, report.max_re, report.ex_time
            ),
        }
    } else if a.report.is_some() {
        bail!("--report needs --function");
    }
    Ok(man)
}

fn parse_weight(spec: &str) -> Result<Option<TestFunctionId>> {
    if spec == "none" {
        return Ok(None);
    }
    let id = spec
        .strip_prefix('f')
        .unwrap_or(spec)
        .parse::<u8>()
        .map_err(|_| anyhow!("unknown weight spec {spec:?} (expected `none` or f<id>)"))?;
    Ok(Some(function_id(id)?))
}

fn cubature(a: &CubatureArgs, argv: Vec<String>) -> Result<RunManifest> {
    let mut man = RunManifest::new("cubature", argv);
    man.config = serde_json::to_value(a)?;
    let model = a.model.as_deref().map(load_model).transpose()?;
    let dom = match (&a.domain, &model) {
        (Some(d), _) => parse_domain(d)?,
        (None, Some(m)) => m.basis.domain,
        (None, None) => bail!("--domain is required without --model"),
    };
    let weight = parse_weight(&a.weight_spec)?;
    let rule = domain_rule(&dom, a.degree)?;
    let value = match (&model, a.function) {
        (Some(m), _) => match weight {
            Some(w) => integrate_operator(&rule, m, Some(&move |p: Point| w.eval(p)))?,
            None => integrate_operator(&rule, m, None)?,
        },
        (None, Some(id)) => {
            let f = function_id(id)?;
            integrate(&rule, |p| f.eval(p) * weight.map_or(1.0, |w| w.eval(p)))
        }
        (None, None) => bail!("pass --function <id> or --model <file>"),
    };
    if let Some(p) = &a.rule_out {
        emit(Some(p), &mut man, |w| write_rule(w, &rule))?;
    }
    println!("{value:.17e}");
    Ok(man)
}

fn load_plan(path: &Path) -> Result<BenchPlan> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut v: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("malformed JSON in {}", path.display()))?;
    if let Some(cfg) = v.get_mut("config") {
        v = cfg.take();
    }
    serde_json::from_value(v).with_context(|| format!("{} holds no bench plan", path.display()))
}

fn bench_plan(a: &BenchArgs) -> Result<BenchPlan> {
    if let Some(p) = &a.config {
        return load_plan(p);
    }
    let (mut domain, mut function) = match &a.preset {
        Some(name) => {
            let (d, f) = preset(name)?;
            (Some(d), Some(f))
        }
        None => (None, None),
    };
    if let Some(d) = &a.domain {
        domain = Some(parse_domain(d)?);
    }
    if let Some(id) = a.function {
        function = Some(function_id(id)?);
    }
    let domain = domain.ok_or_else(|| anyhow!("pass --preset, --domain or --config"))?;
    let n = a.n.unwrap_or(if a.paper_scale { PAPER_N } else { DESK_N });
    let variant = a.variant.into();

    if let Some(degree) = a.cubature {
        let m = a.m.first().copied().unwrap_or(n / 5);
        let r_tilde = a.rtilde.first().copied().unwrap_or_else(|| default_rtilde(m));
        let functions = match function {
            Some(f) if a.function.is_some() => vec![f],
            _ => TestFunctionId::all().collect(),
        };
        let table = CubatureTableConfig { domain, variant, functions, degree, m, r_tilde, n, sample_seed: a.seed };
        return Ok(BenchPlan::CubatureTable { table });
    }

    let function = function.ok_or_else(|| anyhow!("pass --function or a --preset"))?;
    let kind = a.sweep.unwrap_or(if a.rtilde.is_empty() { SweepKind::Degree } else { SweepKind::Regression });
    let sweep = match kind {
        SweepKind::Degree => {
            if !a.rtilde.is_empty() {
                bail!("--rtilde is fixed by m in a degree sweep");
            }
            let ms = if !a.m.is_empty() {
                a.m.clone()
            } else if a.paper_scale {
                paper_degrees()
            } else {
                vec![5, 10, 15, 20]
            };
            Sweep::Degree { ms }
        }
        SweepKind::Regression => {
            let m = match a.m.as_slice() {
                [] => n / 5,
                [m] => *m,
                _ => bail!("a regression sweep takes a single --m"),
            };
            let rtildes = if !a.rtilde.is_empty() {
                a.rtilde.clone()
            } else if a.paper_scale {
                paper_rtildes()
            } else {
                vec![m + 2, m + 4, m + 6]
            };
            Sweep::Regression { m, rtildes }
        }
    };
    let experiment = ExperimentConfig {
        domain,
        variant,
        function,
        n,
        sweep,
        test_points: a.test_points,
        sample_seed: a.seed,
        test_seed: a.test_seed,
    };
    Ok(BenchPlan::Sweep { experiment, repeat: a.repeat.max(1) })
}

fn repeat_path(out: &Path, i: u64) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    out.with_file_name(format!("{stem}.run{i}.{ext}"))
}

fn bench(a: &BenchArgs, argv: Vec<String>) -> Result<RunManifest> {
    let mut man = RunManifest::new("bench", argv);
    let plan = bench_plan(a)?;
    man.config = serde_json::to_value(&plan)?;

    match &plan {
        BenchPlan::CubatureTable { table } => {
            man.seeds.push(table.sample_seed);
            if a.plot.is_some() {
                bail!("--plot applies to error sweeps only");
            }
            let rows = run_cubature_table(table)?;
            emit(a.out.as_deref(), &mut man, |w| write_cubature_csv(&rows, w))?;
        }
        BenchPlan::Sweep { experiment, repeat } => {
            if *repeat > 1 && a.out.is_none() {
                bail!("--repeat needs --out");
            }
            for i in 0..*repeat {
                let mut cfg = experiment.clone();
                cfg.sample_seed = cfg.sample_seed.wrapping_add(i);
                cfg.test_seed = cfg.test_seed.wrapping_add(i);
                man.seeds.extend([cfg.sample_seed, cfg.test_seed]);
                let table = run_experiment(&cfg)?;
                for (m, r, msg) in table.failures() {
                    eprintln!("warning: row m={m} rtilde={r} failed: {msg}");
                }
                let out = match (&a.out, *repeat) {
                    (Some(p), 1) => Some(p.clone()),
                    (Some(p), _) => Some(repeat_path(p, i)),
                    (None, _) => None,
                };
                emit(out.as_deref(), &mut man, |w| table.write_csv(w))?;
                if let Some(svg) = &a.plot {
                    let path = if *repeat == 1 { svg.clone() } else { repeat_path(svg, i) };
                    let body = experiment_svg(&table);
                    emit(Some(&path), &mut man, |w| w.write_all(body.as_bytes()))?;
                }
            }
        }
    }
    Ok(man)
}

/// Parses a bench CSV into x values (m or rtilde) and the four error columns.
fn read_bench_csv(text: &str) -> Result<(String, Vec<f64>, Vec<Series>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| anyhow!("empty CSV"))?.split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let x_name = if col("m").is_some() { "m" } else { "rtilde" };
    let xi = col(x_name).ok_or_else(|| anyhow!("CSV has neither an m nor an rtilde column"))?;
    let names = ["mse", "max_ae", "mre", "max_re"];
    let idx: Vec<usize> = names
        .iter()
        .map(|n| col(n).ok_or_else(|| anyhow!("CSV lacks column {n}")))
        .collect::<Result<_>>()?;
    let mut xs = Vec::new();
    let mut series: Vec<Series> = names.iter().map(|n| Series { label: n.to_uppercase(), values: Vec::new() }).collect();
    for (k, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        let num = |i: usize| -> Result<f64> {
            let c = cells.get(i).ok_or_else(|| anyhow!("row {} is short", k + 2))?;
            c.trim().parse::<f64>().with_context(|| format!("row {}: bad number {c:?}", k + 2))
        };
        xs.push(num(xi)?);
        for (s, &i) in series.iter_mut().zip(&idx) {
            s.values.push(num(i)?);
        }
    }
    Ok((x_name.to_string(), xs, series))
}

fn plot(a: &PlotArgs, argv: Vec<String>) -> Result<RunManifest> {
    let mut man = RunManifest::new("plot", argv);
    man.config = serde_json::to_value(a)?;
    let text = fs::read_to_string(&a.csv).with_context(|| format!("reading {}", a.csv.display()))?;
    let (x_name, xs, series) = read_bench_csv(&text)?;
    let title = a
        .title
        .clone()
        .unwrap_or_else(|| a.csv.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    let svg = log_plot_svg(&title, &x_name, &xs, &series);
    emit(a.out.as_deref(), &mut man, |w| w.write_all(svg.as_bytes()))?;
    Ok(man)
}
