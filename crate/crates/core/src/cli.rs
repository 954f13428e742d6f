//! The `durasim` command line: `predict`, `compare`, `heatmap`, `fit` and
//! `reassess`.
//!
//! Scenario commands read one JSON config (see [`ScenarioConfig`]); the
//! estimator flags override the config. Exit codes: 0 success,
//! 2 invalid input, 3 numeric failure, 4 I/O failure. `DURASIM_THREADS` caps
//! the worker pool.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::design_compare::{compare_designs, heatmap, Difference, HeatmapBase, HeatmapParam};
use crate::distributions::{EnrollmentBeta, SurvivalModel};
use crate::duration::{
    order_statistic_cdf, order_statistic_quantile, DurationEstimate, Estimator, TrialSpec,
    DEFAULT_LEVEL, DEFAULT_REPS,
};
use crate::error::Error;
use crate::event_time::SubgroupArm;
use crate::fitting::{fit_design, hypothetical_trial, read_patient_csv, reassess, write_reassess_csv};
use crate::heterogeneity::{build_allcomers_spec, build_enrichment_spec, BiomarkerSpec};
use crate::numfmt::fmt_sig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const THREADS_ENV: &str = "DURASIM_THREADS";
const CURVE_POINTS: usize = 501;

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }

    fn at(path: &str, e: Error) -> Self {
        let mut err = Self::from(e);
        err.message = format!("{path}: {}", err.message);
        err
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Numeric { .. } => EXIT_NUMERIC,
            _ => EXIT_VALIDATION,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "durasim", version, about = "Event-driven trial duration prediction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Predict the study duration of one design.
    Predict {
        #[command(flatten)]
        common: ScenarioArgs,
        /// Write the grid (t, F_T(t), P(T(d) <= t)) as CSV.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Compare the all-comers design with its biomarker enrichment.
    Compare {
        #[command(flatten)]
        common: ScenarioArgs,
    },
    /// Duration differences over a two-parameter grid (CSV plus JSON).
    Heatmap {
        #[command(flatten)]
        common: ScenarioArgs,
    },
    /// Fit Weibull cells and Beta enrollment to patient data.
    Fit {
        #[command(flatten)]
        data: DataArgs,
        /// Enrollment period in months (default: last enrollment + 1e-6 relative).
        #[arg(long)]
        period_a: Option<f64>,
        /// Only the first N patients (after filtering) by enrollment time.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Actual versus calculated duration for a range of event targets.
    Reassess {
        #[command(flatten)]
        data: DataArgs,
        /// Sample size of the hypothetical trial.
        #[arg(long)]
        n: usize,
        /// Event targets: `30..88`, `10,20,40`, or a mix.
        #[arg(long)]
        d: String,
    },
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Monte Carlo replicates.
    #[arg(long)]
    reps: Option<usize>,
    /// Monte Carlo master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Interval level: the interval covers 1 - level.
    #[arg(long)]
    level: Option<f64>,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Patient CSV: enroll_time,followup_time,event,arm,subgroup.
    csv: PathBuf,
    /// Keep only this subgroup label.
    #[arg(long)]
    subgroup: Option<String>,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Percentile,
    Exact,
    Mc,
}

/// Scenario file.
///
/// Exactly one of `enroll_rate` (patients/month) or `period_a` (months).
/// Cells come either from explicit `arms`, or from scenario mode: `mst_pbo`
/// with optional `treatment_hr` (default 0.5) and `biomarker`, which builds
/// a 1:1 placebo/treatment trial split by a prognostic biomarker.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: u64,
    pub d: u64,
    pub enroll_rate: Option<f64>,
    pub period_a: Option<f64>,
    /// Beta(1, β) enrollment shape; 1 (uniform) when absent.
    pub enrollment_beta: Option<f64>,
    pub arms: Option<Vec<ArmConfig>>,
    pub mst_pbo: Option<f64>,
    pub treatment_hr: Option<f64>,
    pub biomarker: Option<BiomarkerConfig>,
    /// Scenario-mode drop-out hazard applied to every cell.
    pub dropout_rate: Option<f64>,
    pub method: Option<MethodArg>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub level: Option<f64>,
    pub heatmap: Option<HeatmapConfig>,
}

/// One cell: weight plus exactly one event model (`median`, `hazard`, or
/// `weibull_shape` with `weibull_scale`), and an optional drop-out hazard
/// or median.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ArmConfig {
    pub label: Option<String>,
    pub weight: f64,
    pub median: Option<f64>,
    pub hazard: Option<f64>,
    pub weibull_shape: Option<f64>,
    pub weibull_scale: Option<f64>,
    pub dropout_rate: Option<f64>,
    pub dropout_median: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BiomarkerConfig {
    pub prevalence: f64,
    pub hazard_ratio: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HeatmapConfig {
    pub x: AxisConfig,
    pub y: AxisConfig,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub param: String,
    pub values: Vec<f64>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                CliError::validation(format!("config: {inner}"))
            } else {
                CliError::validation(format!("config.{path}: {inner}"))
            }
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    /// All-comers accrual in patients per month.
    pub fn enroll_rate(&self) -> CliResult<f64> {
        match (self.enroll_rate, self.period_a) {
            (Some(r), None) => positive("config.enroll_rate", r),
            (None, Some(a)) => Ok(self.n as f64 / positive("config.period_a", a)?),
            (Some(_), Some(_)) => Err(CliError::validation(
                "config: give exactly one of enroll_rate and period_a, not both",
            )),
            (None, None) => Err(CliError::validation(
                "config: one of enroll_rate or period_a is required",
            )),
        }
    }

    fn check_counts(&self) -> CliResult<()> {
        if self.n == 0 {
            return Err(CliError::validation("config.n: must be positive"));
        }
        if self.d == 0 || self.d > self.n {
            return Err(CliError::validation(format!(
                "config.d: must satisfy 1 <= d <= n, got d={} with n={}",
                self.d, self.n
            )));
        }
        Ok(())
    }

    fn enrollment_beta(&self) -> CliResult<f64> {
        positive("config.enrollment_beta", self.enrollment_beta.unwrap_or(1.0))
    }

    fn scenario_dropout(&self) -> CliResult<Option<SurvivalModel>> {
        self.dropout_rate
            .map(|r| SurvivalModel::exponential_rate(r).map_err(|e| CliError::at("config.dropout_rate", e)))
            .transpose()
    }

    fn biomarker(&self) -> CliResult<BiomarkerSpec> {
        match &self.biomarker {
            Some(b) => BiomarkerSpec::new(b.prevalence, b.hazard_ratio)
                .map_err(|e| CliError::at("config.biomarker", e)),
            None => Ok(BiomarkerSpec::null(1.0)?),
        }
    }

    fn treatment_hr(&self) -> f64 {
        self.treatment_hr
            .unwrap_or(crate::heterogeneity::DEFAULT_TREATMENT_HR)
    }

    fn mst_pbo(&self) -> CliResult<f64> {
        let mst = self.mst_pbo.ok_or_else(|| {
            CliError::validation("config: scenario mode needs mst_pbo (or give explicit arms)")
        })?;
        positive("config.mst_pbo", mst)
    }

    /// The all-comers heatmap base.
    pub fn heatmap_base(&self) -> CliResult<HeatmapBase> {
        self.check_counts()?;
        let b = self.biomarker()?;
        Ok(HeatmapBase {
            n: self.n,
            d: self.d,
            enroll_rate: self.enroll_rate()?,
            mst_pbo: self.mst_pbo()?,
            treatment_hr: positive("config.treatment_hr", self.treatment_hr())?,
            prevalence: b.prevalence(),
            hazard_ratio: b.hazard_ratio(),
        })
    }

    /// The design described by the file: explicit arms, or the all-comers
    /// trial of scenario mode.
    pub fn trial_spec(&self) -> CliResult<TrialSpec> {
        self.check_counts()?;
        match &self.arms {
            Some(arms) => {
                if self.mst_pbo.is_some() || self.biomarker.is_some() || self.treatment_hr.is_some() {
                    return Err(CliError::validation(
                        "config: explicit arms exclude mst_pbo, treatment_hr and biomarker",
                    ));
                }
                if self.dropout_rate.is_some() {
                    return Err(CliError::validation(
                        "config.dropout_rate: with explicit arms, set drop-out per arm",
                    ));
                }
                if arms.is_empty() {
                    return Err(CliError::validation("config.arms: at least one arm is required"));
                }
                let period_a = self.n as f64 / self.enroll_rate()?;
                let enrollment = EnrollmentBeta::new(period_a, self.enrollment_beta()?)
                    .map_err(|e| CliError::at("config", e))?;
                let cells = arms
                    .iter()
                    .enumerate()
                    .map(|(i, arm)| arm.build(&format!("config.arms[{i}]"), enrollment))
                    .collect::<CliResult<Vec<_>>>()?;
                TrialSpec::new(self.n, self.d, cells).map_err(|e| CliError::at("config.arms", e))
            }
            None => Ok(self.scenario_specs()?.0),
        }
    }

    /// (all-comers, enrichment) in scenario mode.
    pub fn scenario_specs(&self) -> CliResult<(TrialSpec, TrialSpec)> {
        if self.arms.is_some() {
            return Err(CliError::validation(
                "config.arms: the all-comers/enrichment pair needs scenario mode (mst_pbo, biomarker)",
            ));
        }
        let base = self.heatmap_base()?;
        let b = self.biomarker()?;
        let all = build_allcomers_spec(base.n, base.d, base.enroll_rate, base.mst_pbo, base.treatment_hr, &b)?;
        let enr = build_enrichment_spec(base.n, base.d, base.enroll_rate, base.mst_pbo, base.treatment_hr, &b)?;
        let beta = self.enrollment_beta()?;
        let dropout = self.scenario_dropout()?;
        if beta == 1.0 && dropout.is_none() {
            return Ok((all, enr));
        }
        Ok((restyle(&all, beta, dropout)?, restyle(&enr, beta, dropout)?))
    }

    /// Estimator from the config, overridden by any given flags.
    fn estimator(&self, args: &ScenarioArgs) -> CliResult<Estimator> {
        let level = args.level.or(self.level).unwrap_or(DEFAULT_LEVEL);
        if !(level > 0.0 && level < 1.0) {
            return Err(CliError::validation(format!("level: must lie in (0, 1), got {level}")));
        }
        Ok(match args.method.or(self.method).unwrap_or(MethodArg::Exact) {
            MethodArg::Percentile => Estimator::Percentile,
            MethodArg::Exact => Estimator::ExactMedian { level },
            MethodArg::Mc => Estimator::MonteCarlo {
                reps: args.reps.or(self.reps).unwrap_or(DEFAULT_REPS),
                level,
                seed: args.seed.or(self.seed).unwrap_or(0),
            },
        })
    }
}

impl ArmConfig {
    fn build(&self, path: &str, enrollment: EnrollmentBeta) -> CliResult<SubgroupArm> {
        let event = match (self.median, self.hazard, self.weibull_shape, self.weibull_scale) {
            (Some(m), None, None, None) => SurvivalModel::exponential_median(m),
            (None, Some(h), None, None) => SurvivalModel::exponential_rate(h),
            (None, None, Some(k), Some(s)) => SurvivalModel::weibull(k, s),
            _ => {
                return Err(CliError::validation(format!(
                    "{path}: give exactly one event model: median, hazard, or weibull_shape with weibull_scale"
                )))
            }
        }
        .map_err(|e| CliError::at(path, e))?;
        let dropout = match (self.dropout_rate, self.dropout_median) {
            (None, None) => None,
            (Some(r), None) => Some(SurvivalModel::exponential_rate(r)),
            (None, Some(m)) => Some(SurvivalModel::exponential_median(m)),
            _ => {
                return Err(CliError::validation(format!(
                    "{path}: give at most one of dropout_rate and dropout_median"
                )))
            }
        }
        .transpose()
        .map_err(|e| CliError::at(path, e))?;
        let arm = SubgroupArm::new(self.weight, enrollment, event, dropout)
            .map_err(|e| CliError::at(path, e))?;
        Ok(match &self.label {
            Some(l) => arm.with_label(l.clone()),
            None => arm,
        })
    }
}

fn positive(path: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::validation(format!("{path}: must be positive and finite, got {v}")))
    }
}

/// Same cells with a different enrollment shape and drop-out.
fn restyle(spec: &TrialSpec, beta: f64, dropout: Option<SurvivalModel>) -> CliResult<TrialSpec> {
    let arms = spec
        .arms()
        .iter()
        .map(|arm| {
            let enrollment = EnrollmentBeta::new(arm.enrollment().period_a(), beta)?;
            let mut cell = SubgroupArm::new(arm.weight(), enrollment, arm.event().clone(), dropout)?;
            if let Some(l) = arm.label() {
                cell = cell.with_label(l);
            }
            Ok(cell)
        })
        .collect::<crate::error::Result<Vec<_>>>()?;
    Ok(TrialSpec::new(spec.n(), spec.d(), arms)?)
}

/// Writes `bytes` to `path` via a temporary sibling and a rename, so readers
/// never see a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| CliError::validation(format!("{}: not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(bytes)?;
            f.sync_all()
        })
        .and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::io(path, e));
    }
    Ok(())
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, bytes),
        None => stdout
            .write_all(bytes)
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report types serialize");
    bytes.push(b'\n');
    bytes
}

#[derive(Serialize)]
struct PredictReport<'a> {
    n: u64,
    d: u64,
    estimate: &'a DurationEstimate,
    /// `F_T(+inf)`: probability that a patient's event is ever observed.
    observed_event_mass: f64,
    arms: &'a [SubgroupArm],
}

#[derive(Serialize)]
struct CompareReport {
    n: u64,
    d: u64,
    prevalence: f64,
    hazard_ratio: f64,
    allcomers: DurationEstimate,
    enrichment: DurationEstimate,
    /// All-comers minus enrichment, months; positive: enrichment finishes first.
    difference_months: Difference,
    enrichment_faster: Option<bool>,
}

fn curve_csv(spec: &TrialSpec) -> CliResult<Vec<u8>> {
    let cdf = spec.event_time_cdf();
    let t_max = match order_statistic_quantile(spec, 0.999)?.0.finite() {
        Some(t) => 1.25 * t,
        None => 4.0 * cdf.support_hint(),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |e: csv::Error| CliError::io(Path::new("<curve>"), e);
    w.write_record(["t", "event_time_cdf", "duration_cdf"]).map_err(wrap)?;
    for i in 0..CURVE_POINTS {
        let t = t_max * i as f64 / (CURVE_POINTS - 1) as f64;
        w.write_record([fmt_sig(t), fmt_sig(cdf.eval(t)?), fmt_sig(order_statistic_cdf(spec, t)?)])
            .map_err(wrap)?;
    }
    w.into_inner().map_err(|e| CliError::io(Path::new("<curve>"), e))
}

fn cmd_predict(common: &ScenarioArgs, curve: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    let config = ScenarioConfig::load(&common.config)?;
    let spec = config.trial_spec()?;
    let estimator = config.estimator(common)?;
    let estimate = estimator.estimate(&spec)?;
    if let Some(path) = curve {
        write_atomic(path, &curve_csv(&spec)?)?;
    }
    let report = PredictReport {
        n: spec.n(),
        d: spec.d(),
        estimate: &estimate,
        observed_event_mass: spec.event_time_cdf().total_mass(),
        arms: spec.arms(),
    };
    emit(common.out.as_deref(), stdout, &to_json(&report))
}

fn cmd_compare(common: &ScenarioArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let config = ScenarioConfig::load(&common.config)?;
    let (all, enr) = config.scenario_specs()?;
    let b = config.biomarker()?;
    let cmp = compare_designs(&all, &enr, config.estimator(common)?)?;
    let report = CompareReport {
        n: all.n(),
        d: all.d(),
        prevalence: b.prevalence(),
        hazard_ratio: b.hazard_ratio(),
        enrichment_faster: cmp.difference.months().map(|v| v > 0.0),
        difference_months: cmp.difference,
        allcomers: cmp.allcomers,
        enrichment: cmp.enrichment,
    };
    emit(common.out.as_deref(), stdout, &to_json(&report))
}

fn cmd_heatmap(common: &ScenarioArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let config = ScenarioConfig::load(&common.config)?;
    if config.arms.is_some() {
        return Err(CliError::validation("config.arms: heatmaps need scenario mode"));
    }
    if config.enrollment_beta.is_some_and(|b| b != 1.0) || config.dropout_rate.is_some() {
        return Err(CliError::validation(
            "config: heatmaps use uniform enrollment without drop-out; remove enrollment_beta/dropout_rate",
        ));
    }
    let axes = config
        .heatmap
        .as_ref()
        .ok_or_else(|| CliError::validation("config.heatmap: required (x and y axes)"))?;
    let parse_axis = |name: &str, axis: &AxisConfig| -> CliResult<HeatmapParam> {
        if axis.values.is_empty() {
            return Err(CliError::validation(format!("config.heatmap.{name}.values: must be nonempty")));
        }
        axis.param
            .parse::<HeatmapParam>()
            .map_err(|e| CliError::at(&format!("config.heatmap.{name}.param"), e))
    };
    let xp = parse_axis("x", &axes.x)?;
    let yp = parse_axis("y", &axes.y)?;
    let base = config.heatmap_base()?;
    let grid = heatmap(&base, xp, &axes.x.values, yp, &axes.y.values, config.estimator(common)?)?;
    let mut csv_bytes = Vec::new();
    grid.write_csv(&mut csv_bytes)?;
    match &common.out {
        Some(path) => {
            write_atomic(path, &csv_bytes)?;
            write_atomic(&path.with_extension("json"), &to_json(&grid))
        }
        None => emit(None, stdout, &csv_bytes),
    }
}

fn load_records(data: &DataArgs) -> CliResult<Vec<crate::fitting::PatientRecord>> {
    let file = fs::File::open(&data.csv).map_err(|e| CliError::io(&data.csv, e))?;
    read_patient_csv(io::BufReader::new(file)).map_err(|e| CliError::at(&data.csv.display().to_string(), e))
}

fn cmd_fit(data: &DataArgs, period_a: Option<f64>, n: Option<usize>, stdout: &mut dyn Write) -> CliResult<()> {
    let records = load_records(data)?;
    let filter = data.subgroup.as_deref();
    let n = n.unwrap_or_else(|| records.iter().filter(|r| filter.is_none_or(|s| r.subgroup == s)).count());
    let trial = hypothetical_trial(&records, filter, n)?;
    let design = fit_design(&trial, period_a)?;
    emit(data.out.as_deref(), stdout, &to_json(&design))
}

/// Parses `30..88`, `10,20,40` or combinations such as `5,10..12`.
pub fn parse_d_values(s: &str) -> CliResult<Vec<u64>> {
    let bad = || CliError::validation(format!("--d: expected e.g. `30..88` or `10,20,40`, got `{s}`"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad())?;
                let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn cmd_reassess(data: &DataArgs, n: usize, d: &str, stdout: &mut dyn Write) -> CliResult<()> {
    let d_values = parse_d_values(d)?;
    let records = load_records(data)?;
    let rows = reassess(&records, data.subgroup.as_deref(), n, &d_values)?;
    let mut bytes = Vec::new();
    write_reassess_csv(&rows, &mut bytes)?;
    emit(data.out.as_deref(), stdout, &bytes)
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::validation(format!("{THREADS_ENV}: expected a positive integer, got `{raw}`")))?;
    // a second initialisation in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `stdout` unless `--out` is given. Returns the exit code;
/// diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_VALIDATION;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Predict { common, curve } => cmd_predict(common, curve.as_deref(), stdout),
        Command::Compare { common } => cmd_compare(common, stdout),
        Command::Heatmap { common } => cmd_heatmap(common, stdout),
        Command::Fit { data, period_a, n } => cmd_fit(data, *period_a, *n, stdout),
        Command::Reassess { data, n, d } => cmd_reassess(data, *n, d, stdout),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}
