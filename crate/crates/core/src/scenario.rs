//! Monte-Carlo experiments: TOML configuration, presets, seeded trial
//! execution and CSV / plot-data output.
//!
//! Configs use nanoseconds and MHz; everything internal is seconds and
//! radians. See `presets/*.toml` for the schema.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bias::{build_perturbation, predict_bias};
use crate::error::{Error, Result};
use crate::metrics::{crlb_phase_variance, ErrorAccumulator, MetricPoint, MetricSeries, TrialEstimate};
use crate::model::{synthesize_snapshots, BandPlan, ClusteredChannel, GainPhaseMode};
use crate::subspace::BlockHankelConfig;
use crate::wsf::{estimate_delays, WeightingMode};

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "sweep,rmse_emp_ns,rmse_pred_ns,bias_pred_ns,crlb_std_ns,excluded";

const PRESETS: [(&str, &str); 3] = [
    ("scenario1", include_str!("../presets/scenario1.toml")),
    ("scenario2", include_str!("../presets/scenario2.toml")),
    ("scenario3", include_str!("../presets/scenario3.toml")),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub name: String,
    pub band: BandConfig,
    pub channel: ChannelConfig,
    pub sweep: SweepConfig,
    pub run: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    pub subcarriers: usize,
    pub bandwidth_mhz: f64,
    pub centers_mhz: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub gain_phases: GainPhaseMode,
    pub clusters: Vec<ClusterConfig>,
}

/// `powers` are `|alpha|^2`; the first component is the cluster anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterConfig {
    pub powers: Vec<f64>,
    pub delays_ns: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// SNR against the LOS-cluster power, dB.
    SnrDb,
    /// Delay of the target component, ns.
    DelayNs,
    /// Power of the target component relative to the LOS component.
    Power,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::SnrDb => "snr_db",
            Self::DelayNs => "delay_ns",
            Self::Power => "power",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    /// `[cluster, component]` edited by delay and power sweeps.
    #[serde(default = "default_target")]
    pub target: [usize; 2],
    /// Fixed SNR; required exactly when no axis sweeps the SNR.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    /// Optional outer axis; one table per value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesConfig>,
}

fn default_target() -> [usize; 2] {
    [0, 1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub snapshots: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub weighting: WeightingMode,
    /// Hankel rows per band; default picks the smallest valid size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hankel_rows: Option<usize>,
}

/// Names of the built-in presets.
pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

/// Raw TOML of a preset.
pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let src = preset_source(name).ok_or_else(|| {
        Error::Config(format!(
            "unknown preset '{name}' (expected one of {})",
            preset_names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    parse_config(src, name)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text, &path.display().to_string())
}

/// Parses and validates; `origin` prefixes diagnostics.
pub fn parse_config(text: &str, origin: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig =
        toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))?;
    cfg.validate().map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{origin}: {m}")),
        other => Error::Config(format!("{origin}: {other}")),
    })?;
    Ok(cfg)
}

impl ScenarioConfig {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn band_plan(&self) -> Result<BandPlan> {
        BandPlan::from_centers_mhz(
            self.band.subcarriers,
            self.band.bandwidth_mhz,
            &self.band.centers_mhz,
        )
        .map_err(|e| Error::Config(format!("band: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::Config(format!("{field}: {msg}")));
        if self.schema_version != SCHEMA_VERSION {
            return bad(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            );
        }
        self.band_plan()?;
        if self.channel.clusters.is_empty() {
            return bad("channel.clusters", "at least one cluster is required".into());
        }
        for (i, c) in self.channel.clusters.iter().enumerate() {
            let field = format!("channel.clusters[{i}]");
            if c.powers.is_empty() {
                return bad(&format!("{field}.powers"), "empty".into());
            }
            if c.powers.len() != c.delays_ns.len() {
                return bad(
                    &format!("{field}.delays_ns"),
                    format!("{} delays for {} powers", c.delays_ns.len(), c.powers.len()),
                );
            }
            if let Some(p) = c.powers.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
                return bad(&format!("{field}.powers"), format!("power {p} is not positive"));
            }
            if let Some(d) = c.delays_ns.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
                return bad(&format!("{field}.delays_ns"), format!("delay {d} is not a nonnegative number"));
            }
        }
        let axes = self.axes();
        let sweeps_snr = axes.iter().any(|(v, _)| *v == SweepVariable::SnrDb);
        match (sweeps_snr, self.sweep.snr_db) {
            (false, None) => return bad("sweep.snr_db", "required when no axis sweeps the SNR".into()),
            (true, Some(_)) => {
                return bad("sweep.snr_db", "conflicts with an snr_db sweep axis".into())
            }
            _ => {}
        }
        if let Some(s) = self.sweep.snr_db {
            if !s.is_finite() {
                return bad("sweep.snr_db", format!("{s} is not finite"));
            }
        }
        for (var, field) in axes {
            let values = match field {
                "sweep" => &self.sweep.values,
                _ => &self.sweep.series.as_ref().expect("series axis").values,
            };
            if values.is_empty() {
                return bad(&format!("{field}.values"), "empty".into());
            }
            if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                return bad(&format!("{field}.values"), format!("{v} is not finite"));
            }
            if var != SweepVariable::SnrDb {
                let [c, k] = self.sweep.target;
                let ok = self.channel.clusters.get(c).is_some_and(|cl| k < cl.powers.len());
                if !ok {
                    return bad("sweep.target", format!("no component [{c}, {k}] in the channel"));
                }
            }
        }
        if let Some(s) = &self.sweep.series {
            if s.variable == self.sweep.variable {
                return bad("sweep.series.variable", "must differ from sweep.variable".into());
            }
        }
        if self.run.snapshots == 0 {
            return bad("run.snapshots", "must be at least 1".into());
        }
        for point in self.points() {
            self.point_setup(&point).map_err(|e| {
                Error::Config(format!("sweep point {}: {e}", point.describe()))
            })?;
        }
        Ok(())
    }

    fn axes(&self) -> Vec<(SweepVariable, &'static str)> {
        let mut v = vec![(self.sweep.variable, "sweep")];
        if let Some(s) = &self.sweep.series {
            v.push((s.variable, "sweep.series"));
        }
        v
    }

    /// `(series index, series value)` pairs; a single unlabeled entry without
    /// a series axis.
    fn series_values(&self) -> Vec<Option<f64>> {
        match &self.sweep.series {
            Some(s) => s.values.iter().copied().map(Some).collect(),
            None => vec![None],
        }
    }

    fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::new();
        for (si, sv) in self.series_values().into_iter().enumerate() {
            for (i, &x) in self.sweep.values.iter().enumerate() {
                out.push(SweepPoint {
                    index: si * self.sweep.values.len() + i,
                    sweep: (self.sweep.variable, x),
                    series: sv.map(|v| (self.sweep.series.as_ref().expect("series").variable, v)),
                });
            }
        }
        out
    }

    /// Channel and SNR at a sweep point.
    fn point_setup(&self, point: &SweepPoint) -> Result<PointSetup> {
        let mut clusters = self.channel.clusters.clone();
        let mut snr = self.sweep.snr_db;
        for (var, value) in point.assignments() {
            let [c, k] = self.sweep.target;
            match var {
                SweepVariable::SnrDb => snr = Some(value),
                SweepVariable::DelayNs => clusters[c].delays_ns[k] = value,
                SweepVariable::Power => {
                    if value.is_nan() || value <= 0.0 {
                        return Err(Error::Config(format!("power ratio {value} is not positive")));
                    }
                    clusters[c].powers[k] = value * self.channel.clusters[0].powers[0];
                }
            }
        }
        let layout: Vec<(Vec<f64>, Vec<f64>)> = clusters
            .iter()
            .map(|c| (c.powers.clone(), c.delays_ns.iter().map(|d| d * 1e-9).collect()))
            .collect();
        let channel = ClusteredChannel::from_powers(&layout)?;
        let plan = self.band_plan()?;
        let warnings = channel.check(&plan)?.iter().map(|w| w.to_string()).collect();
        let hankel = match self.run.hankel_rows {
            Some(m) => BlockHankelConfig::new(
                plan.num_subcarriers(),
                m,
                channel.num_components(),
                channel.num_clusters(),
            )?,
            None => BlockHankelConfig::with_default_rows(
                plan.num_subcarriers(),
                channel.num_components(),
                channel.num_clusters(),
            )?,
        };
        let snr_db = snr.expect("validated snr");
        let noise_power = channel.clusters()[0].power() / 10f64.powf(snr_db / 10.0);
        Ok(PointSetup {
            channel,
            plan,
            hankel,
            noise_power,
            warnings,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct SweepPoint {
    index: usize,
    sweep: (SweepVariable, f64),
    series: Option<(SweepVariable, f64)>,
}

impl SweepPoint {
    fn assignments(&self) -> impl Iterator<Item = (SweepVariable, f64)> {
        self.series.into_iter().chain(std::iter::once(self.sweep))
    }

    fn describe(&self) -> String {
        self.assignments()
            .map(|(v, x)| format!("{}={x}", v.as_str()))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

struct PointSetup {
    channel: ClusteredChannel,
    plan: BandPlan,
    hankel: BlockHankelConfig,
    noise_power: f64,
    warnings: Vec<String>,
}

/// Results along one sweep (one series value).
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub label: String,
    pub sweep_variable: SweepVariable,
    pub series: Option<(SweepVariable, f64)>,
    pub metrics: MetricSeries,
    /// Channel warnings, deduplicated.
    pub warnings: Vec<String>,
}

impl ResultTable {
    pub fn rows(&self) -> &[MetricPoint] {
        &self.metrics.points
    }
}

/// Trial scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    /// Single thread, in trial order.
    Serial,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed, a pure function of its coordinates.
pub fn trial_seed(master: u64, sweep_index: usize, trial_index: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ sweep_index as u64) ^ trial_index as u64)
}

fn recoverable(e: &Error) -> bool {
    matches!(
        e,
        Error::Eigen(_)
            | Error::RankDeficient(_)
            | Error::DuplicatePhases(_)
            | Error::Singular(_)
            | Error::Initializer(_)
    )
}

/// Analytic bias and CRLB plus `trials` Monte-Carlo fits per sweep point.
/// One table per series value. Fits that fail numerically count as
/// non-converged.
pub fn run_scenario(config: &ScenarioConfig, execution: Execution) -> Result<Vec<ResultTable>> {
    config.validate()?;
    let trials = config.run.trials;
    let mode = config.run.weighting;
    let mut tables: Vec<ResultTable> = config
        .series_values()
        .into_iter()
        .map(|sv| {
            let series = sv.map(|v| (config.sweep.series.as_ref().expect("series").variable, v));
            ResultTable {
                label: match series {
                    Some((var, v)) => format!("{}_{}_{}", config.name, var.as_str(), v),
                    None => config.name.clone(),
                },
                sweep_variable: config.sweep.variable,
                series,
                metrics: MetricSeries {
                    points: Vec::new(),
                    trials,
                },
                warnings: Vec::new(),
            }
        })
        .collect();
    let per_series = config.sweep.values.len();
    for point in config.points() {
        let setup = config.point_setup(&point)?;
        let table = &mut tables[point.index / per_series];
        for w in &setup.warnings {
            if !table.warnings.contains(w) {
                table.warnings.push(w.clone());
            }
        }
        let mut row = analytic_point(&setup, point.sweep.1, mode, config.run.snapshots)?;
        if trials > 0 {
            let truth = setup.channel.anchor_delays();
            let run = |t: usize| -> Result<TrialEstimate> {
                let seed = trial_seed(config.run.seed, point.index, t);
                let wrap = |e: Error| Error::Trial {
                    sweep_index: point.index,
                    trial_index: t,
                    source: Box::new(e),
                };
                let snaps = synthesize_snapshots(
                    &setup.channel,
                    &setup.plan,
                    config.run.snapshots,
                    setup.noise_power,
                    seed,
                    config.channel.gain_phases,
                )
                .map_err(wrap)?;
                match estimate_delays(&snaps, &setup.hankel, mode, None) {
                    Ok(fit) => Ok(TrialEstimate::from(&fit)),
                    Err(e) if recoverable(&e) => Ok(TrialEstimate {
                        delays: Vec::new(),
                        converged: false,
                    }),
                    Err(e) => Err(wrap(e)),
                }
            };
            let estimates: Vec<TrialEstimate> = match execution {
                Execution::Serial => (0..trials).map(run).collect::<Result<_>>()?,
                Execution::Parallel => (0..trials).into_par_iter().map(run).collect::<Result<_>>()?,
            };
            let mut acc = ErrorAccumulator::default();
            for est in &estimates {
                acc.push(est, &truth, 0);
            }
            let emp = acc.finish().map_err(|e| Error::Trial {
                sweep_index: point.index,
                trial_index: trials,
                source: Box::new(e),
            })?;
            row = row.with_empirical(&emp);
        }
        table.metrics.points.push(row);
    }
    Ok(tables)
}

/// Predicted bias, CRLB and predicted RMSE of the LOS delay.
fn analytic_point(
    setup: &PointSetup,
    sweep: f64,
    mode: WeightingMode,
    snapshots: usize,
) -> Result<MetricPoint> {
    let approx = setup.channel.cluster_approx(&setup.plan);
    let model = build_perturbation(&approx, &setup.plan, &setup.hankel, setup.noise_power)?;
    let decomp = model.reference_decomposition()?;
    let report = predict_bias(&model, &decomp, mode)?;
    let t = (snapshots * setup.hankel.cols()) as f64;
    let var_phase = crlb_phase_variance(
        &model.steering,
        &model.derivative,
        &model.cluster_powers,
        setup.noise_power,
        t,
    )?;
    let ws = setup.plan.subcarrier_spacing();
    Ok(MetricPoint::analytic(
        sweep,
        report.bias_delay[0],
        var_phase[0] / (ws * ws),
    ))
}

/// Rounds to 6 significant digits and prints the shortest exact form.
pub fn format_sig6(x: f64) -> String {
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float");
    format!("{rounded}")
}

fn ns(x: f64) -> String {
    format_sig6(x * 1e9)
}

pub fn csv_string(table: &ResultTable) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in table.rows() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_sig6(p.sweep),
            p.rmse_empirical.map(ns).unwrap_or_default(),
            ns(p.rmse_predicted),
            ns(p.bias_predicted),
            ns(p.crlb_std),
            p.excluded.map(format_sig6).unwrap_or_default(),
        );
    }
    out
}

pub fn emit_csv(table: &ResultTable, path: impl AsRef<Path>) -> Result<()> {
    if table.rows().is_empty() {
        return Err(Error::Empty("result table has no rows".into()));
    }
    std::fs::write(path, csv_string(table))?;
    Ok(())
}

/// Parses CSV text written by [`emit_csv`] back into points (seconds).
pub fn parse_csv(text: &str) -> Result<Vec<MetricPoint>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::Config(format!("unexpected CSV header {other:?}")));
        }
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(Error::Config(format!("CSV line {}: {} fields", i + 2, f.len())));
            }
            let num = |s: &str| -> Result<f64> {
                s.parse()
                    .map_err(|_| Error::Config(format!("CSV line {}: bad number '{s}'", i + 2)))
            };
            let opt = |s: &str| -> Result<Option<f64>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    num(s).map(Some)
                }
            };
            Ok(MetricPoint {
                sweep: num(f[0])?,
                rmse_empirical: opt(f[1])?.map(|v| v * 1e-9),
                bias_empirical: None,
                rmse_predicted: num(f[2])? * 1e-9,
                bias_predicted: num(f[3])? * 1e-9,
                crlb_std: num(f[4])? * 1e-9,
                excluded: opt(f[5])?,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct PlotSeries<'a> {
    label: &'a str,
    series_variable: Option<&'static str>,
    series_value: Option<f64>,
    trials: usize,
    x: Vec<f64>,
    rmse_emp_ns: Vec<Option<f64>>,
    bias_emp_ns: Vec<Option<f64>>,
    rmse_pred_ns: Vec<f64>,
    bias_pred_ns: Vec<f64>,
    crlb_std_ns: Vec<f64>,
    excluded: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct PlotData<'a> {
    sweep_variable: &'static str,
    series: Vec<PlotSeries<'a>>,
}

/// JSON with one entry per series, columns as arrays.
pub fn plotdata_string(tables: &[ResultTable]) -> Result<String> {
    let first = tables.first().ok_or_else(|| Error::Empty("no result tables".into()))?;
    let data = PlotData {
        sweep_variable: first.sweep_variable.as_str(),
        series: tables
            .iter()
            .map(|t| {
                let rows = t.rows();
                PlotSeries {
                    label: &t.label,
                    series_variable: t.series.map(|(v, _)| v.as_str()),
                    series_value: t.series.map(|(_, x)| x),
                    trials: t.metrics.trials,
                    x: rows.iter().map(|p| p.sweep).collect(),
                    rmse_emp_ns: rows.iter().map(|p| p.rmse_empirical.map(|v| v * 1e9)).collect(),
                    bias_emp_ns: rows.iter().map(|p| p.bias_empirical.map(|v| v * 1e9)).collect(),
                    rmse_pred_ns: rows.iter().map(|p| p.rmse_predicted * 1e9).collect(),
                    bias_pred_ns: rows.iter().map(|p| p.bias_predicted * 1e9).collect(),
                    crlb_std_ns: rows.iter().map(|p| p.crlb_std * 1e9).collect(),
                    excluded: rows.iter().map(|p| p.excluded).collect(),
                }
            })
            .collect(),
    };
    serde_json::to_string_pretty(&data).map_err(|e| Error::Config(e.to_string()))
}

pub fn emit_plotdata(tables: &[ResultTable], path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, plotdata_string(tables)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_encode_the_experiments() {
        let s1 = preset("scenario1").unwrap();
        assert_eq!(s1.band.subcarriers, 12);
        assert_eq!(s1.band.bandwidth_mhz, 12.0);
        assert_eq!(s1.band.centers_mhz, vec![10.0, 50.0, 80.0, 150.0]);
        assert_eq!(s1.run.snapshots, 32);
        assert_eq!(s1.channel.clusters.len(), 3);
        assert_eq!(s1.sweep.series.as_ref().unwrap().values, vec![6.0, 6.5, 7.0, 8.0]);

        let s2 = preset("scenario2").unwrap();
        assert_eq!(s2.channel.clusters[0].powers, vec![1.0, 0.5, 0.37]);
        assert_eq!(s2.channel.clusters[0].delays_ns[2], 8.0);

        let s3 = preset("scenario3").unwrap();
        assert_eq!(s3.sweep.snr_db, Some(10.0));
        assert_eq!(s3.channel.clusters[0].delays_ns, vec![5.0, 10.0]);
        assert_eq!(s3.sweep.values.len(), 10);
        assert!(preset("scenario4").is_err());
    }

    #[test]
    fn seeds_depend_on_every_coordinate() {
        let a = trial_seed(1, 2, 3);
        assert_eq!(a, trial_seed(1, 2, 3));
        assert_ne!(a, trial_seed(2, 2, 3));
        assert_ne!(a, trial_seed(1, 3, 3));
        assert_ne!(a, trial_seed(1, 2, 4));
        assert_ne!(trial_seed(0, 1, 0), trial_seed(0, 0, 1));
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(0.123456789), "0.123457");
        assert_eq!(format_sig6(1234567.0), "1234570");
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(-2.5), "-2.5");
    }
}
