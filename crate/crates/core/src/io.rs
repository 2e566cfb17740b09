//! Configuration files, CSV outputs and run manifests.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::antenna::{ElementPattern, ReflectorAntenna};
use crate::channel::LargeScaleState;
use crate::error::{Error, Result};
use crate::experiment::{AggregateStats, Comparison, DropResult, DropState, HeatmapGrid, SweepPoint};
use crate::geometry::Layout;
use crate::scenario::{DeploymentKind, ScenarioConfig};

/// Formats a number with six significant digits, C `%g` style.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (5 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn config_keys() -> BTreeSet<String> {
    match serde_json::to_value(ScenarioConfig::default()) {
        Ok(Value::Object(m)) => m.keys().cloned().collect(),
        _ => unreachable!("config serializes to an object"),
    }
}

fn line_of_key(text: &str, key: &str) -> (usize, usize) {
    let needle = format!("\"{key}\"");
    for (i, line) in text.lines().enumerate() {
        if let Some(col) = line.find(&needle) {
            return (i + 1, col + 1);
        }
    }
    (0, 0)
}

/// Parses a JSON config. Omitted keys take the defaults of the file's
/// `deployment_kind` (NTN5G when absent); unknown keys are rejected.
pub fn parse_config_str(text: &str) -> Result<ScenarioConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Object(map) = value else {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "expected a JSON object".into(),
        });
    };
    let known = config_keys();
    if let Some(k) = map.keys().find(|k| !known.contains(*k)) {
        return Err(Error::UnknownKey(k.clone()));
    }
    let kind = match map.get("deployment_kind") {
        Some(v) => serde_json::from_value::<DeploymentKind>(v.clone()).map_err(|e| {
            let (line, column) = line_of_key(text, "deployment_kind");
            Error::Parse {
                line,
                column,
                message: format!("deployment_kind: {e}"),
            }
        })?,
        None => DeploymentKind::Ntn5g,
    };
    let Value::Object(mut merged) = serde_json::to_value(ScenarioConfig::for_kind(kind))? else {
        unreachable!("config serializes to an object");
    };
    for (k, v) in &map {
        // Type-check key by key so errors point at the offending line.
        merged.insert(k.clone(), v.clone());
        if let Err(e) = serde_json::from_value::<ScenarioConfig>(Value::Object(merged.clone())) {
            let (line, column) = line_of_key(text, k);
            return Err(Error::Parse {
                line,
                column,
                message: format!("{k}: {e}"),
            });
        }
    }
    Ok(serde_json::from_value(Value::Object(merged))?)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    parse_config_str(&fs::read_to_string(path)?)
}

pub fn config_to_json(cfg: &ScenarioConfig) -> Result<String> {
    Ok(serde_json::to_string_pretty(cfg)?)
}

/// Fails with [`Error::OutputExists`] if any of `names` exists in `dir`
/// and `force` is not set; creates `dir` otherwise.
pub fn prepare_output_dir(dir: &Path, names: &[&str], force: bool) -> Result<()> {
    if !force {
        for n in names {
            let p = dir.join(n);
            if p.exists() {
                return Err(Error::OutputExists(p));
            }
        }
    }
    fs::create_dir_all(dir)?;
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(File::create(path)?)))
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub const SWEEP_HEADER: [&str; 11] = [
    "altitude_m",
    "aperture_wl",
    "mean_sinr_db",
    "mean_tput_mbps",
    "median_tput_mbps",
    "p5_tput_mbps",
    "mean_se_bpshz",
    "median_sinr_db",
    "p5_sinr_db",
    "median_se_bpshz",
    "n_samples",
];

fn sweep_row(p: &SweepPoint) -> Vec<String> {
    let s = &p.stats;
    vec![
        fmt_g(p.altitude_m),
        fmt_g(p.aperture_wl),
        fmt_g(s.mean_sinr_db),
        fmt_g(s.mean_tput_mbps),
        fmt_g(s.median_tput_mbps),
        fmt_g(s.p5_tput_mbps),
        fmt_g(s.mean_se_bpshz),
        fmt_g(s.median_sinr_db),
        fmt_g(s.p5_sinr_db),
        fmt_g(s.median_se_bpshz),
        s.n_samples.to_string(),
    ]
}

/// Appends sweep points one row at a time, flushing after each so an
/// interrupted sweep leaves a valid partial file.
pub struct SweepCsvWriter {
    inner: csv::Writer<BufWriter<File>>,
}

impl SweepCsvWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut inner = csv_writer(path)?;
        inner.write_record(SWEEP_HEADER)?;
        inner.flush()?;
        Ok(Self { inner })
    }

    pub fn push(&mut self, p: &SweepPoint) -> Result<()> {
        self.inner.write_record(sweep_row(p))?;
        self.inner.flush()?;
        Ok(())
    }
}

pub fn write_sweep_csv(path: &Path, points: &[SweepPoint]) -> Result<()> {
    write_rows(path, &SWEEP_HEADER, points.iter().map(sweep_row))
}

fn parse_f64(s: &str, line: usize, column: usize) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse {
        line,
        column,
        message: format!("not a number: {s:?}"),
    })
}

/// Reads back a (possibly partial) sweep file.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepPoint>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != SWEEP_HEADER {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "unexpected sweep header".into(),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let f = |c: usize| parse_f64(&rec[c], line, c + 1);
        out.push(SweepPoint {
            altitude_m: f(0)?,
            aperture_wl: f(1)?,
            stats: AggregateStats {
                mean_sinr_db: f(2)?,
                mean_tput_mbps: f(3)?,
                median_tput_mbps: f(4)?,
                p5_tput_mbps: f(5)?,
                mean_se_bpshz: f(6)?,
                median_sinr_db: f(7)?,
                p5_sinr_db: f(8)?,
                median_se_bpshz: f(9)?,
                n_samples: f(10)? as usize,
            },
        });
    }
    Ok(out)
}

pub const UE_RESULTS_HEADER: [&str; 6] = ["drop", "ue", "cell", "eff_sinr_db", "rate_mbps", "se_bpshz"];

pub fn write_ue_results(path: &Path, drops: &[DropResult]) -> Result<()> {
    write_rows(
        path,
        &UE_RESULTS_HEADER,
        drops.iter().flat_map(|d| {
            d.ues.iter().map(move |u| {
                vec![
                    d.drop_index.to_string(),
                    u.ue.to_string(),
                    u.serving_cell.to_string(),
                    fmt_g(u.eff_sinr_db()),
                    fmt_g(u.rate_mbps()),
                    fmt_g(u.se_bps_hz),
                ]
            })
        }),
    )
}

pub const HEATMAP_HEADER: [&str; 5] = ["x_m", "y_m", "sinr_db", "useful_dbm", "interference_dbm"];

pub fn write_heatmap(path: &Path, grid: &HeatmapGrid) -> Result<()> {
    write_rows(
        path,
        &HEATMAP_HEADER,
        grid.pixels.iter().map(|p| {
            vec![
                fmt_g(p.x_m),
                fmt_g(p.y_m),
                fmt_g(p.sinr_db),
                fmt_g(p.useful_dbm),
                fmt_g(p.interference_dbm),
            ]
        }),
    )
}

/// One row of a heatmap file.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct HeatmapRow {
    pub x_m: f64,
    pub y_m: f64,
    pub sinr_db: f64,
    pub useful_dbm: f64,
    pub interference_dbm: f64,
}

pub fn read_heatmap(path: &Path) -> Result<Vec<HeatmapRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn write_sites(path: &Path, layout: &Layout) -> Result<()> {
    write_rows(
        path,
        &["site_id", "x", "y"],
        layout.sites.iter().enumerate().map(|(i, s)| vec![i.to_string(), fmt_g(s[0]), fmt_g(s[1])]),
    )
}

pub fn write_ues(path: &Path, drops: &[DropResult]) -> Result<()> {
    write_rows(
        path,
        &["drop", "ue_id", "cell_id", "x", "y"],
        drops.iter().flat_map(|d| {
            d.positions.iter().enumerate().map(move |(i, u)| {
                vec![d.drop_index.to_string(), i.to_string(), u.region_cell.to_string(), fmt_g(u.x), fmt_g(u.y)]
            })
        }),
    )
}

/// Per-link large-scale dump of one drop.
pub fn write_links(path: &Path, state: &DropState) -> Result<()> {
    let n = state.n_cells();
    write_rows(
        path,
        &["ue", "cell", "los", "pl_db", "sf_db", "gain_dbi", "beta"],
        state.large.iter().enumerate().map(|(i, s): (usize, &LargeScaleState)| {
            vec![
                (i / n).to_string(),
                (i % n).to_string(),
                fmt_g(s.los_weight),
                fmt_g(s.pathloss_db),
                fmt_g(s.shadowing_db),
                fmt_g(s.antenna_gain_dbi),
                fmt_g(s.beta),
            ]
        }),
    )
}

pub const COMPARE_HEADER: [&str; 10] = [
    "kind",
    "mean_sinr_db",
    "median_sinr_db",
    "p5_sinr_db",
    "mean_tput_mbps",
    "median_tput_mbps",
    "p5_tput_mbps",
    "mean_se_bpshz",
    "median_se_bpshz",
    "n_samples",
];

pub fn write_compare(path: &Path, cmp: &Comparison) -> Result<()> {
    write_rows(
        path,
        &COMPARE_HEADER,
        cmp.rows.iter().map(|(k, s)| {
            vec![
                k.label().to_string(),
                fmt_g(s.mean_sinr_db),
                fmt_g(s.median_sinr_db),
                fmt_g(s.p5_sinr_db),
                fmt_g(s.mean_tput_mbps),
                fmt_g(s.median_tput_mbps),
                fmt_g(s.p5_tput_mbps),
                fmt_g(s.mean_se_bpshz),
                fmt_g(s.median_se_bpshz),
                s.n_samples.to_string(),
            ]
        }),
    )
}

/// Which antenna a pattern cut samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    Reflector { radius_wavelengths: f64, efficiency: f64 },
    /// Horizontal cut of the terrestrial element.
    ElementHorizontal,
    /// Vertical cut of the terrestrial element.
    ElementVertical,
}

/// Pattern cut from 0 to `max_deg` in steps of `step_deg`.
pub fn pattern_cut(kind: PatternKind, max_deg: f64, step_deg: f64) -> Result<Vec<(f64, f64)>> {
    if !(step_deg > 0.0) || !(max_deg >= 0.0) {
        return Err(Error::Range {
            field: "step_deg",
            value: step_deg,
            expected: "> 0 with max_deg >= 0",
        });
    }
    let n = (max_deg / step_deg + 1e-9).floor() as usize;
    let element = ElementPattern::default();
    Ok((0..=n)
        .map(|i| {
            let t = i as f64 * step_deg;
            let g = match kind {
                PatternKind::Reflector {
                    radius_wavelengths,
                    efficiency,
                } => ReflectorAntenna::new(radius_wavelengths, efficiency).gain_dbi(t),
                PatternKind::ElementHorizontal => element.gain_dbi(90.0, t),
                PatternKind::ElementVertical => element.gain_dbi(90.0 + t, 0.0),
            };
            (t, g)
        })
        .collect())
}

pub fn write_pattern(path: &Path, cut: &[(f64, f64)]) -> Result<()> {
    write_rows(path, &["theta_deg", "gain_dbi"], cut.iter().map(|(t, g)| vec![fmt_g(*t), fmt_g(*g)]))
}

/// The experiment a manifest records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Experiment {
    Run {
        config: ScenarioConfig,
        dump_links: bool,
    },
    Sweep {
        config: ScenarioConfig,
        altitudes_m: Vec<f64>,
        apertures_wl: Vec<f64>,
    },
    Heatmap {
        config: ScenarioConfig,
        resolution_m: f64,
        extent_m: f64,
    },
    Compare {
        configs: Vec<ScenarioConfig>,
    },
    Pattern {
        kind: PatternKind,
        max_deg: f64,
        step_deg: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub experiment: Experiment,
    pub threads: usize,
    pub wall_clock_s: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(experiment: Experiment, threads: usize, wall_clock_s: f64, outputs: Vec<String>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            experiment,
            threads,
            wall_clock_s,
            outputs,
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    /// Writes through a temporary file and a rename so readers never see a
    /// partial manifest.
    pub fn write_atomic(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let tmp = dir.join(".manifest.json.tmp");
        {
            let mut f = BufWriter::new(File::create(&tmp)?);
            serde_json::to_writer_pretty(&mut f, self)?;
            f.write_all(b"\n")?;
            f.flush()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::LosMode;
    use proptest::prelude::*;

    #[test]
    fn g_format() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(49.4113), "49.4113");
        assert_eq!(fmt_g(123456.7), "123457");
        assert_eq!(fmt_g(1234567.0), "1.23457e+06");
        assert_eq!(fmt_g(0.0001234567), "0.000123457");
        assert_eq!(fmt_g(0.00001234567), "1.23457e-05");
        assert_eq!(fmt_g(-2.5), "-2.5");
        assert_eq!(fmt_g(999999.6), "1e+06");
        assert_eq!(fmt_g(1e-10), "1e-10");
    }

    proptest! {
        #[test]
        fn g_format_round_trips_to_six_digits(x in -1e12f64..1e12) {
            let s = fmt_g(x);
            let y: f64 = s.parse().unwrap();
            prop_assert!((x - y).abs() <= 5e-6 * x.abs().max(1e-300));
            prop_assert_eq!(fmt_g(y), s);
        }
    }

    #[test]
    fn minimal_ntn_file() {
        let cfg = parse_config_str(r#"{"deployment_kind": "NTN5G", "h_ntn_m": 5000, "aperture_radius_wavelengths": 15}"#).unwrap();
        assert_eq!(cfg.h_ntn_m, 5000.0);
        assert_eq!(cfg.aperture_radius_wavelengths, 15.0);
        assert_eq!(cfg.isd_m, 500.0);
        assert_eq!(cfg.tx_power_dbm, 43.0);
    }

    #[test]
    fn kind_defaults_follow_file() {
        let cfg = parse_config_str(r#"{"deployment_kind": "TN4G"}"#).unwrap();
        assert_eq!(cfg.carrier_hz, 2e9);
        assert_eq!(cfg.tx_power_dbm, 46.0);
    }

    #[test]
    fn typo_rejected() {
        match parse_config_str(r#"{"apreture_radius": 15}"#) {
            Err(Error::UnknownKey(k)) => assert_eq!(k, "apreture_radius"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_value_points_at_line() {
        let text = "{\n  \"isd_m\": 500,\n  \"n_ue\": \"many\"\n}";
        match parse_config_str(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse_config_str("{\n \"isd_m\": ,\n}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn defaults_round_trip() {
        for kind in DeploymentKind::ALL {
            let mut cfg = ScenarioConfig::for_kind(kind);
            cfg.los_mode = LosMode::Expectation;
            let text = config_to_json(&cfg).unwrap();
            assert_eq!(parse_config_str(&text).unwrap(), cfg);
        }
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sweep.csv");
        write_sweep_csv(&p, &[]).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), SWEEP_HEADER.join(",") + "\n");
        assert!(read_sweep_csv(&p).unwrap().is_empty());
    }

    #[test]
    fn refuses_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("sweep.csv"), "x").unwrap();
        assert!(matches!(prepare_output_dir(dir.path(), &["sweep.csv"], false), Err(Error::OutputExists(_))));
        prepare_output_dir(dir.path(), &["sweep.csv"], true).unwrap();
    }

    #[test]
    fn pattern_cut_rows() {
        let cut = pattern_cut(PatternKind::Reflector { radius_wavelengths: 25.0, efficiency: 1.0 }, 5.0, 0.5).unwrap();
        assert_eq!(cut.len(), 11);
        assert_eq!(cut[0].0, 0.0);
        let cut = pattern_cut(PatternKind::ElementHorizontal, 180.0, 65.0).unwrap();
        assert_eq!(cut[1], (65.0, -4.0));
    }
}
