//! Command-line front end: `simulate`, `analyze`, `verify` and `report`.
//!
//! Exit statuses: 0 on success, 1 when a check fails, 2 for bad input.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use bispec_core::bispec::{
    analytic_bispectrum, correspondence_error, correspondence_min_grid,
};
use bispec_core::cumulant::{model_cumulant_table, sample_cumulant_table};
use bispec_core::diagnose::{
    causality_verdict, diagnose_min_grid, diagnose_model, diagnose_series,
    empirical_reversibility_probe, third_order_reversibility_check, SeriesThresholds, PHASE_FLOOR,
};
use bispec_core::linmodel::simulate;
use bispec_core::phase::{extract_phase, fit_best_decomposition, slope_bound};
use bispec_core::{
    BifrequencyField, EstimationPlan, Error as CoreError, LinearModel, Taper, TimeSeriesSample,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, CliResult};
use crate::formats::{
    cumulants_to_csv, field_from_csv, field_metadata_to_toml, field_to_csv, phase_to_text,
    read_text, sample_from_csv, sample_to_csv, write_atomic,
};
use crate::model_file::{parse_inline_model, parse_model};
use crate::report::{
    CorrespondenceSection, ReportDocument, SampleSection, ThirdOrderSection,
};
use crate::svg::{heatmap, Layer};
use crate::verify::{run_battery, BatteryConfig};

#[derive(Debug, Parser)]
#[command(name = "bispec", version, about = "Bispectral reversibility diagnostics for linear processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a model and write the path as CSV.
    Simulate(SimulateArgs),
    /// Diagnose a model (analytically) or a sample (by estimation).
    Analyze(AnalyzeArgs),
    /// Run the invariant battery.
    Verify(VerifyArgs),
    /// Re-emit a saved report, or draw heatmaps of a saved field.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaperArg {
    None,
    Hann,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model description file (TOML).
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Inline model in the file grammar, `;` separating lines.
    #[arg(long, value_name = "TEXT", conflicts_with = "model")]
    pub inline: Option<String>,
}

impl ModelArgs {
    fn load(&self) -> CliResult<Option<LinearModel>> {
        match (&self.model, &self.inline) {
            (Some(path), _) => {
                let text = read_text(path)?;
                parse_model(&text, &path.display().to_string()).map(Some)
            }
            (None, Some(text)) => parse_inline_model(text).map(Some),
            (None, None) => Ok(None),
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    /// Output directory; the sample goes to `sample.csv`.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Sample CSV (header `x`) to estimate from.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["model", "inline"])]
    pub sample: Option<PathBuf>,
    /// Simulate this many values from the model and analyse the sample.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Frequency grid size for analytic fields.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub segments: Option<usize>,
    #[arg(long, default_value_t = 128)]
    pub segment_len: usize,
    #[arg(long, value_enum, default_value_t = TaperArg::None)]
    pub taper: TaperArg,
    #[arg(long, default_value = "bispec-out")]
    pub out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Emit::Csv, Emit::Json])]
    pub emit: Vec<Emit>,
    /// `name=value`; names: correspondence, realness, spectrum_floor.
    #[arg(long = "tolerance", value_name = "NAME=VALUE")]
    pub tolerances: Vec<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Additional model files to include.
    #[arg(long = "model", value_name = "PATH")]
    pub models: Vec<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Random filters in the pathway battery.
    #[arg(long, default_value_t = 500)]
    pub filters: usize,
    #[arg(long, default_value_t = 128)]
    pub grid: usize,
    /// Directory for `verify.log`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `name=value`; names: correspondence, realness_zero, realness_gap,
    /// equality, phase_residual, nonsymmetric_residual, cocycle, cocycle_gap.
    #[arg(long = "tolerance", value_name = "NAME=VALUE")]
    pub tolerances: Vec<String>,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Saved report (`.json` or `.toml`).
    #[arg(long, value_name = "PATH", required_unless_present = "field")]
    pub input: Option<PathBuf>,
    /// Saved field CSV; its metadata is read from the same stem with `.toml`.
    #[arg(long, value_name = "PATH", conflicts_with = "input")]
    pub field: Option<PathBuf>,
    #[arg(long, default_value = "bispec-out")]
    pub out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Emit::Json])]
    pub emit: Vec<Emit>,
}

/// Parses `name=value` overrides against the allowed names.
pub fn parse_tolerances(items: &[String], allowed: &[&str]) -> CliResult<Vec<(String, f64)>> {
    items
        .iter()
        .map(|item| {
            let (name, value) = item.split_once('=').ok_or_else(|| {
                CliError::Input(format!("tolerance `{item}` must look like name=value"))
            })?;
            let name = name.trim();
            if !allowed.contains(&name) {
                return Err(CliError::Input(format!(
                    "unknown tolerance `{name}`; expected one of {}",
                    allowed.join(", ")
                )));
            }
            let v: f64 = value.trim().parse().map_err(|_| {
                CliError::Input(format!("tolerance `{name}`: `{value}` is not a number"))
            })?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::Input(format!(
                    "tolerance `{name}` must be finite and non-negative"
                )));
            }
            Ok((name.to_string(), v))
        })
        .collect()
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Writes a file into `dir` and remembers its path for the listing.
struct Outputs<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl<'a> Outputs<'a> {
    fn new(dir: &'a Path) -> CliResult<Self> {
        ensure_dir(dir)?;
        Ok(Outputs {
            dir,
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        write_atomic(&path, contents.as_bytes())?;
        self.written.push(path);
        Ok(())
    }

    fn listing(&self) -> String {
        self.written
            .iter()
            .map(|p| format!("wrote {}\n", p.display()))
            .collect()
    }
}

/// Mean, variance and skewness with `1/N` normalisation.
pub fn summary_statistics(x: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3) = (0.0, 0.0);
    for v in x {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    let skew = if m2 > 0.0 { m3 / (m2 * m2.sqrt()) } else { 0.0 };
    (mean, m2, skew)
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<String> {
    let model = args
        .model
        .load()?
        .ok_or_else(|| CliError::Input("simulate needs --model or --inline".into()))?;
    if args.n == 0 {
        return Err(CliError::Input("--n must be positive".into()));
    }
    let sample = simulate(&model, args.n, args.seed)?;
    let mut out = Outputs::new(&args.out)?;
    out.write("sample.csv", &sample_to_csv(&sample))?;
    let (mean, variance, skewness) = summary_statistics(sample.values());
    let mut s = String::new();
    let _ = writeln!(s, "model: {}", model.identifier());
    let _ = writeln!(s, "n: {}\nseed: {}", args.n, args.seed);
    let _ = writeln!(s, "mean: {mean}\nvariance: {variance}\nskewness: {skewness}");
    s.push_str(&out.listing());
    Ok(s)
}

fn emit_field(out: &mut Outputs<'_>, field: &BifrequencyField, emit: &[Emit]) -> CliResult<()> {
    if emit.contains(&Emit::Csv) {
        out.write("field.csv", &field_to_csv(field))?;
        out.write("field.toml", &field_metadata_to_toml(field)?)?;
    }
    if emit.contains(&Emit::Svg) {
        for layer in Layer::ALL {
            out.write(&format!("field_{}.svg", layer.file_stem()), &heatmap(field, layer))?;
        }
    }
    Ok(())
}

fn emit_report(out: &mut Outputs<'_>, doc: &ReportDocument, emit: &[Emit]) -> CliResult<()> {
    out.write("report.toml", &doc.to_toml()?)?;
    if emit.contains(&Emit::Json) {
        out.write("report.json", &doc.to_json()?)?;
    }
    Ok(())
}

fn analyze_model(args: &AnalyzeArgs, model: &LinearModel) -> CliResult<(String, bool)> {
    let tol = parse_tolerances(&args.tolerances, &["correspondence", "realness", "spectrum_floor"])?;
    let correspondence_tol = tol
        .iter()
        .find(|(n, _)| n == "correspondence")
        .map_or(1e-9, |t| t.1);
    if tol.iter().any(|(n, _)| n != "correspondence") {
        return Err(CliError::Input(
            "realness and spectrum_floor overrides apply to sample analysis only".into(),
        ));
    }
    let max_lag = model.filter.width();
    let required = diagnose_min_grid(&model.filter).max(correspondence_min_grid(model, max_lag));
    let grid = args.grid.unwrap_or(required.max(128));
    if grid < required {
        return Err(CoreError::GridTooCoarse { grid, required }.into());
    }
    let diagnosis = diagnose_model(model, grid)?;
    let field = analytic_bispectrum(model, grid)?;
    let error = correspondence_error(&field, model, max_lag);
    let passed = error <= correspondence_tol;
    let third = third_order_reversibility_check(model, max_lag)?;
    let doc = ReportDocument {
        causality: causality_verdict(&diagnosis).into(),
        third_order: Some(ThirdOrderSection::new(max_lag, &third)),
        correspondence: Some(CorrespondenceSection {
            max_lag,
            max_error: error,
            tolerance: correspondence_tol,
            passed,
        }),
        sample: None,
        diagnosis,
    };
    let mut out = Outputs::new(&args.out)?;
    emit_report(&mut out, &doc, &args.emit)?;
    emit_field(&mut out, &field, &args.emit)?;
    if args.emit.contains(&Emit::Csv) {
        out.write("cumulants.csv", &cumulants_to_csv(&model_cumulant_table(model, max_lag)?))?;
        let phase = extract_phase(&model.filter, grid, PHASE_FLOOR)?;
        out.write(
            "phase.toml",
            &phase_to_text(&fit_best_decomposition(&phase, slope_bound(&model.filter)))?,
        )?;
    }
    let mut s = doc.summary();
    let _ = writeln!(
        s,
        "correspondence max error: {error:e} (tolerance {correspondence_tol:e})"
    );
    s.push_str(&out.listing());
    Ok((s, passed))
}

const SAMPLE_MAX_LAG: usize = 5;

fn analyze_sample(
    args: &AnalyzeArgs,
    sample: &TimeSeriesSample,
    simulated: bool,
) -> CliResult<String> {
    let tol = parse_tolerances(&args.tolerances, &["correspondence", "realness", "spectrum_floor"])?;
    let mut thresholds = SeriesThresholds::default();
    for (name, v) in &tol {
        match name.as_str() {
            "realness" => thresholds.realness = Some(*v),
            "spectrum_floor" => thresholds.spectrum_floor = *v,
            _ => {
                return Err(CliError::Input(
                    "the correspondence tolerance applies to model analysis only".into(),
                ))
            }
        }
    }
    let taper = match args.taper {
        TaperArg::None => Taper::None,
        TaperArg::Hann => Taper::Hann,
    };
    let plan = match args.segments {
        Some(m) => EstimationPlan::new(args.segment_len, m, taper)?,
        None => EstimationPlan::for_length(sample.len(), args.segment_len, taper)?,
    };
    let diagnosis = diagnose_series(sample, &plan, &thresholds)?;
    let field = bispec_core::bispec::estimate_bispectrum(sample, &plan)?;
    let (mean, variance, skewness) = summary_statistics(sample.values());
    let probe_lag = SAMPLE_MAX_LAG.min(sample.len().saturating_sub(1) / 10);
    let probe = if probe_lag >= 1 {
        empirical_reversibility_probe(sample.values(), probe_lag)?
    } else {
        0.0
    };
    let doc = ReportDocument {
        causality: causality_verdict(&diagnosis).into(),
        third_order: None,
        correspondence: None,
        sample: Some(SampleSection {
            n: sample.len(),
            seed: sample.seed(),
            mean,
            variance,
            skewness,
            probe_max_lag: probe_lag,
            reversibility_probe: probe,
        }),
        diagnosis,
    };
    let mut out = Outputs::new(&args.out)?;
    emit_report(&mut out, &doc, &args.emit)?;
    emit_field(&mut out, &field, &args.emit)?;
    if args.emit.contains(&Emit::Csv) {
        if simulated {
            out.write("sample.csv", &sample_to_csv(sample))?;
        }
        if sample.len() > 2 * SAMPLE_MAX_LAG {
            out.write(
                "cumulants.csv",
                &cumulants_to_csv(&sample_cumulant_table(sample.values(), SAMPLE_MAX_LAG)?),
            )?;
        }
    }
    let mut s = doc.summary();
    s.push_str(&out.listing());
    Ok(s)
}

/// Returns the printed output and whether every embedded check passed.
pub fn cmd_analyze(args: &AnalyzeArgs) -> CliResult<(String, bool)> {
    if let Some(path) = &args.sample {
        let text = read_text(path)?;
        let sample = sample_from_csv(&text, &path.display().to_string())?;
        return Ok((analyze_sample(args, &sample, false)?, true));
    }
    let model = args.model.load()?.ok_or_else(|| {
        CliError::Input("analyze needs --model, --inline or --sample".into())
    })?;
    match args.n {
        Some(n) => {
            let sample = simulate(&model, n, args.seed)?;
            Ok((analyze_sample(args, &sample, true)?, true))
        }
        None => analyze_model(args, &model),
    }
}

pub fn battery_config(args: &VerifyArgs) -> CliResult<BatteryConfig> {
    let mut cfg = BatteryConfig {
        seed: args.seed,
        pathway_filters: args.filters,
        grid: args.grid,
        inject_fault: args.inject_fault,
        ..BatteryConfig::default()
    };
    for path in &args.models {
        let text = read_text(path)?;
        cfg.models.push(parse_model(&text, &path.display().to_string())?);
    }
    let names = [
        "correspondence",
        "realness_zero",
        "realness_gap",
        "equality",
        "phase_residual",
        "nonsymmetric_residual",
        "cocycle",
        "cocycle_gap",
    ];
    for (name, v) in parse_tolerances(&args.tolerances, &names)? {
        let slot = match name.as_str() {
            "correspondence" => &mut cfg.correspondence_tol,
            "realness_zero" => &mut cfg.realness_zero_tol,
            "realness_gap" => &mut cfg.realness_gap,
            "equality" => &mut cfg.equality_tol,
            "phase_residual" => &mut cfg.phase_residual_tol,
            "nonsymmetric_residual" => &mut cfg.nonsymmetric_residual_min,
            "cocycle" => &mut cfg.cocycle_tol,
            _ => &mut cfg.cocycle_gap,
        };
        *slot = v;
    }
    if cfg.grid < 8 {
        return Err(CoreError::GridTooCoarse {
            grid: cfg.grid,
            required: 8,
        }
        .into());
    }
    Ok(cfg)
}

/// Returns the log and whether every check passed.
pub fn cmd_verify(args: &VerifyArgs) -> CliResult<(String, bool)> {
    let cfg = battery_config(args)?;
    let outcomes = run_battery(&cfg);
    let mut log = String::new();
    for o in &outcomes {
        let _ = writeln!(log, "{o}");
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
    if failed.is_empty() {
        let _ = writeln!(log, "all {} checks passed", outcomes.len());
    } else {
        let _ = writeln!(log, "failed checks: {}", failed.join(", "));
    }
    if let Some(dir) = &args.out {
        let mut out = Outputs::new(dir)?;
        out.write("verify.log", &log)?;
        log.push_str(&out.listing());
    }
    Ok((log, failed.is_empty()))
}

pub fn cmd_report(args: &ReportArgs) -> CliResult<String> {
    let mut out = Outputs::new(&args.out)?;
    if let Some(path) = &args.field {
        let meta_path = path.with_extension("toml");
        let field = field_from_csv(
            &read_text(path)?,
            &read_text(&meta_path)?,
            &path.display().to_string(),
        )?;
        let mut emit = args.emit.clone();
        emit.retain(|e| *e == Emit::Svg);
        if emit.is_empty() {
            emit.push(Emit::Svg);
        }
        emit_field(&mut out, &field, &emit)?;
        return Ok(out.listing());
    }
    let path = args
        .input
        .as_ref()
        .ok_or_else(|| CliError::Input("report needs --input or --field".into()))?;
    let text = read_text(path)?;
    let origin = path.display().to_string();
    let doc = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => ReportDocument::from_json(&text, &origin)?,
        Some("toml") => ReportDocument::from_toml(&text, &origin)?,
        _ => {
            return Err(CliError::Input(format!(
                "{origin}: report files must end in .json or .toml"
            )))
        }
    };
    emit_report(&mut out, &doc, &args.emit)?;
    let mut s = doc.summary();
    s.push_str(&out.listing());
    Ok(s)
}

/// Runs a parsed command and maps the outcome to an exit status.
pub fn run(cli: &Cli) -> (String, Option<CliError>, u8) {
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a).map(|s| (s, true)),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Report(a) => cmd_report(a).map(|s| (s, true)),
    };
    match result {
        Ok((s, true)) => (s, None, 0),
        Ok((s, false)) => (s, None, 1),
        Err(e) => {
            let code = e.exit_code();
            (String::new(), Some(e), code)
        }
    }
}
