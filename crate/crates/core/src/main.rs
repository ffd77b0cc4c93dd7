use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use circrobust::circular::{frechet_median, summarize};
use circrobust::data::{AngleUnit, DataSource};
use circrobust::detect::{detect, CutoffRule, DetectionConfig};
use circrobust::dispersion::{classical_estimate, estimate_parameter, DispersionKind};
use circrobust::distributions::{CircularModel, ModelKind};
use circrobust::output::{csv_document, fmt_num, json_document, Provenance};
use circrobust::robustness::bias::{bias_curves, BiasConfig, ContaminationType};
use circrobust::robustness::efficiency::are_curve;
use circrobust::robustness::influence::if_curve;
use circrobust::robustness::study::{contamination_study, StudyConfig};
use circrobust::violin::{build_violin, default_bandwidth, render_svg, ClipMode, KdeSpec, SvgStyle, ViolinOptions};
use circrobust::{Error, Result};

#[derive(Parser)]
#[command(name = "circrobust", version, about = "Robust statistics for circular data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate κ or σ from a sample through a robust dispersion measure.
    Estimate(EstimateArgs),
    /// Flag outlying angles.
    Detect(DetectArgs),
    /// Monte Carlo relative-bias curves (CSV).
    Bias(BiasArgs),
    /// Asymptotic relative efficiency against maximum likelihood (CSV).
    Are(AreArgs),
    /// Contamination simulation study (CSV).
    Study(StudyArgs),
    /// Circular violin plot (SVG).
    Violin(ViolinArgs),
    /// Influence function of a dispersion measure (CSV).
    IfCurve(IfCurveArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum Model {
    Vm,
    Wn,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Vm => ModelKind::VonMises,
            Model::Wn => ModelKind::WrappedNormal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum Unit {
    Radians,
    Degrees,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum Rule {
    UpperTail,
    TwoSided,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum Contamination {
    PointMass,
    MeanShift,
}

impl From<Contamination> for ContaminationType {
    fn from(c: Contamination) -> Self {
        match c {
            Contamination::PointMass => ContaminationType::PointMass,
            Contamination::MeanShift => ContaminationType::MeanShift,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum Clip {
    Angular,
    Height,
}

fn parse_kind(s: &str) -> std::result::Result<DispersionKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Serialize)]
struct Common {
    /// Output file (standard output when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, env = "CIRCROBUST_SEED", default_value_t = 42, global = true)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct DataArgs {
    /// Bundled dataset (frogs, seastars, larva) or path to an angle file.
    #[arg(long)]
    data: String,
    /// Unit of the file's angles; overrides a `# unit:` comment.
    #[arg(long, value_enum)]
    unit: Option<Unit>,
}

impl DataArgs {
    fn load(&self) -> Result<circrobust::AngleSample> {
        let unit = self.unit.map(|u| match u {
            Unit::Radians => AngleUnit::Radians,
            Unit::Degrees => AngleUnit::Degrees,
        });
        DataSource::parse(&self.data).load(unit)
    }
}

#[derive(Args, Serialize)]
struct EstimateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "clms", value_parser = parse_kind)]
    kind: DispersionKind,
    #[arg(long, value_enum, default_value = "vm")]
    model: Model,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Args, Serialize)]
struct DetectOpts {
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, default_value = "clms", value_parser = parse_kind)]
    kind: DispersionKind,
    #[arg(long, value_enum, default_value = "vm")]
    model: Model,
    /// Use the circular mean and the classical estimate.
    #[arg(long)]
    baseline: bool,
    #[arg(long, value_enum, default_value = "upper-tail")]
    rule: Rule,
}

impl DetectOpts {
    fn config(&self) -> DetectionConfig {
        DetectionConfig {
            model: self.model.into(),
            alpha: self.alpha,
            kind: self.kind,
            baseline: self.baseline,
            rule: match self.rule {
                Rule::UpperTail => CutoffRule::UpperTail,
                Rule::TwoSided => CutoffRule::TwoSided,
            },
        }
    }
}

#[derive(Args, Serialize)]
struct DetectArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    opts: DetectOpts,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Args, Serialize)]
struct BiasArgs {
    #[arg(long, value_enum, default_value = "vm")]
    model: Model,
    /// κ or σ of the clean model.
    #[arg(long, visible_aliases = ["kappa", "sigma"], default_value_t = 5.0)]
    param: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "point-mass")]
    contamination: Contamination,
    #[arg(long, default_value_t = 181)]
    grid: usize,
    #[arg(long = "n", default_value_t = 5000)]
    sample_size: usize,
    #[arg(long, value_delimiter = ',', default_value = "csd,cmad,clms,clts", value_parser = parse_kind)]
    kinds: Vec<DispersionKind>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Args, Serialize)]
struct AreArgs {
    #[arg(long, value_enum, default_value = "vm")]
    model: Model,
    #[arg(long, default_value = "clms", value_parser = parse_kind)]
    kind: DispersionKind,
    /// Comma-separated κ or σ values.
    #[arg(long, visible_aliases = ["kappa", "sigma"], value_delimiter = ',', required = true)]
    param: Vec<f64>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Args, Serialize)]
struct StudyArgs {
    #[arg(long, value_enum, default_value = "vm")]
    model: Model,
    /// Comma-separated κ or σ values (defaults to the reference design).
    #[arg(long, visible_aliases = ["kappa", "sigma"], value_delimiter = ',')]
    param: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2")]
    epsilon: Vec<f64>,
    #[arg(long = "n", default_value_t = 200)]
    sample_size: usize,
    #[arg(long, default_value_t = 500)]
    reps: usize,
    #[arg(long, value_enum, default_value = "mean-shift")]
    contamination: Contamination,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Args, Serialize)]
struct ViolinArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    opts: DetectOpts,
    /// Kernel concentration; plug-in rule on the robust κ̂ when omitted.
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long, default_value_t = 512)]
    grid: usize,
    #[arg(long, value_enum, default_value = "angular")]
    clip: Clip,
    #[arg(long, default_value_t = 0.35)]
    density_scale: f64,
    #[arg(long, default_value_t = 480)]
    size: u32,
    #[arg(long, default_value = "#9ecae1")]
    ring_fill: String,
    #[arg(long, default_value = "#3182bd")]
    ring_stroke: String,
    #[arg(long, default_value_t = 1.0)]
    stroke_width: f64,
    #[arg(long, default_value = "#08306b")]
    box_color: String,
    #[arg(long, default_value = "#de2d26")]
    outlier_color: String,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Args, Serialize)]
struct IfCurveArgs {
    #[arg(long, value_enum, default_value = "vm")]
    model: Model,
    #[arg(long, visible_aliases = ["kappa", "sigma"], default_value_t = 0.5)]
    param: f64,
    #[arg(long, default_value = "clms", value_parser = parse_kind)]
    kind: DispersionKind,
    #[arg(long, default_value_t = 361)]
    grid: usize,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Serialize)]
struct EstimateOutput {
    n: usize,
    median: Option<f64>,
    mean: Option<f64>,
    csd: f64,
    classical: Option<f64>,
    estimate: circrobust::dispersion::EstimateReport,
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn estimate_cmd(a: &EstimateArgs) -> Result<String> {
    let s = a.data.load()?;
    let model: ModelKind = a.model.into();
    let summary = summarize(&s);
    let out = EstimateOutput {
        n: s.len(),
        median: summary.median,
        mean: summary.mean,
        csd: summary.csd,
        classical: classical_estimate(&s, model).ok(),
        estimate: estimate_parameter(&s, a.kind, model)?,
    };
    json_document(&Provenance::new("estimate", a.common.seed, a)?, &out)
}

fn detect_cmd(a: &DetectArgs) -> Result<String> {
    let s = a.data.load()?;
    let report = detect(&s, &a.opts.config())?;
    json_document(&Provenance::new("detect", a.common.seed, a)?, &report)
}

fn bias_cmd(a: &BiasArgs) -> Result<String> {
    let model = CircularModel::new(a.model.into(), 0.0, a.param)?;
    let cfg = BiasConfig {
        grid_size: a.grid,
        sample_size: a.sample_size,
        seed: a.common.seed,
        ..BiasConfig::new(model, a.epsilon, a.contamination.into())
    };
    let curves = bias_curves(&cfg, &a.kinds)?;
    let mut rows = Vec::new();
    for c in &curves {
        for p in &c.points {
            rows.push(vec![
                fmt_num(p.theta),
                fmt_num(p.rel_bias),
                c.kind.to_string(),
                fmt_num(c.epsilon),
                c.contamination.to_string(),
                c.seed.to_string(),
            ]);
        }
    }
    let header = ["theta", "relBias", "kind", "epsilon", "type", "seed"];
    csv_document(&Provenance::new("bias", a.common.seed, a)?, &header, &rows)
}

fn are_cmd(a: &AreArgs) -> Result<String> {
    let curve = are_curve(a.model.into(), a.kind, &a.param)?;
    let rows: Vec<Vec<String>> = curve
        .points
        .iter()
        .map(|p| vec![fmt_num(p.param), a.kind.to_string(), fmt_num(p.are)])
        .collect();
    csv_document(&Provenance::new("are", a.common.seed, a)?, &["param", "kind", "are"], &rows)
}

fn study_cmd(a: &StudyArgs) -> Result<String> {
    let family: ModelKind = a.model.into();
    let mut cfg = StudyConfig {
        epsilons: a.epsilon.clone(),
        sample_size: a.sample_size,
        replications: a.reps,
        contamination: a.contamination.into(),
        seed: a.common.seed,
        ..StudyConfig::standard(family)
    };
    if !a.param.is_empty() {
        cfg.params = a.param.clone();
    }
    eprintln!(
        "study: {} parameter(s) x {} fraction(s) x {} replications",
        cfg.params.len(),
        cfg.epsilons.len(),
        cfg.replications
    );
    let table = contamination_study(&cfg)?;
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            let f = |g: fn(&circrobust::robustness::study::FiveNumber) -> f64| {
                r.summary.as_ref().map_or("nan".to_string(), |s| fmt_num(g(s)))
            };
            vec![
                fmt_num(r.param),
                fmt_num(r.epsilon),
                r.estimator.label(family).to_string(),
                f(|s| s.min),
                f(|s| s.q1),
                f(|s| s.median),
                f(|s| s.q3),
                f(|s| s.max),
                r.failures.to_string(),
            ]
        })
        .collect();
    let header = ["param", "epsilon", "estimator", "min", "q1", "median", "q3", "max", "failures"];
    csv_document(&Provenance::new("study", a.common.seed, a)?, &header, &rows)
}

fn violin_cmd(a: &ViolinArgs) -> Result<String> {
    let s = a.data.load()?;
    frechet_median(&s)?;
    let report = detect(&s, &a.opts.config())?;
    let nu = match a.bandwidth {
        Some(v) => v,
        None => {
            let kappa = match a.opts.model {
                Model::Vm => report.parameter,
                Model::Wn => estimate_parameter(&s, a.opts.kind, ModelKind::VonMises)?.parameter,
            };
            default_bandwidth(s.len(), kappa)?
        }
    };
    let spec = KdeSpec { concentration: nu, grid_size: a.grid };
    let opts = ViolinOptions {
        density_scale: a.density_scale,
        clip: match a.clip {
            Clip::Angular => ClipMode::Angular,
            Clip::Height => ClipMode::Height,
        },
        ..ViolinOptions::default()
    };
    let g = build_violin(&s, &report, &spec, &opts)?;
    let style = SvgStyle {
        size: a.size,
        ring_fill: a.ring_fill.clone(),
        ring_stroke: a.ring_stroke.clone(),
        stroke_width: a.stroke_width,
        box_color: a.box_color.clone(),
        outlier_color: a.outlier_color.clone(),
        ..SvgStyle::default()
    };
    let prov = Provenance::new("violin", a.common.seed, a)?;
    let svg = render_svg(&g, &style);
    // provenance as an XML comment after the declaration
    let comment = format!(
        "<!-- command: {} version: {} seed: {} config_hash: {} -->\n",
        prov.command, prov.version, prov.seed, prov.config_hash
    );
    Ok(match svg.split_once('\n') {
        Some((decl, rest)) => format!("{decl}\n{comment}{rest}"),
        None => svg,
    })
}

fn if_curve_cmd(a: &IfCurveArgs) -> Result<String> {
    let model = CircularModel::new(a.model.into(), 0.0, a.param)?;
    let curve = if_curve(&model, a.kind, a.grid)?;
    let rows: Vec<Vec<String>> = curve
        .points
        .iter()
        .map(|p| vec![fmt_num(p.y), fmt_num(p.raw), fmt_num(p.transformed), a.kind.to_string()])
        .collect();
    let header = ["y", "influence", "transformed", "kind"];
    csv_document(&Provenance::new("if-curve", a.common.seed, a)?, &header, &rows)
}

fn run(cli: &Cli) -> Result<()> {
    let (common, text) = match &cli.command {
        Command::Estimate(a) => (&a.common, estimate_cmd(a)?),
        Command::Detect(a) => (&a.common, detect_cmd(a)?),
        Command::Bias(a) => (&a.common, bias_cmd(a)?),
        Command::Are(a) => (&a.common, are_cmd(a)?),
        Command::Study(a) => (&a.common, study_cmd(a)?),
        Command::Violin(a) => (&a.common, violin_cmd(a)?),
        Command::IfCurve(a) => (&a.common, if_curve_cmd(a)?),
    };
    emit(common, &text)
}

fn report_error(kind: &str, code: u8, message: &str) -> ExitCode {
    let body = serde_json::json!({ "error": { "kind": kind, "code": code, "message": message } });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error("usage", 2, e.render().to_string().trim()),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(e.kind(), e.code() as u8, &e.to_string()),
    }
}
