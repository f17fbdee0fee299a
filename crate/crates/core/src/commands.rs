//! Command runs behind the `uav-backhaul` binary.
//!
//! Each run produces a [`ResultRecord`]: a table written as
//! `<out>/<command>.csv` and a JSON summary written as
//! `<out>/<command>.meta.json`. Tables contain only values that are fixed by
//! the scenario and seed, so reruns produce byte-identical CSV files at any
//! thread count. The wall-clock timestamp lives in the JSON file only.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::atmosphere::{oxygen_attn_sea_level, water_attn_sea_level};
use crate::config::{ConfigError, ScenarioConfig};
use crate::error::Error;
use crate::montecarlo::{max_link_length_from, ElevationModel, EstimatorResult, HopEnsemble, RelayEnsemble};
use crate::optimizer::{optimize, sweep_vs_flight_angle, sweep_vs_ls, DesignPoint, SweepCurve};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "UAV_BACKHAUL_OUT_DIR";

/// Runnable commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    AtmosTable,
    SweepLs,
    SweepTheta,
    OutageMap,
    MaxLength,
    Optimize,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::AtmosTable,
        Command::SweepLs,
        Command::SweepTheta,
        Command::OutageMap,
        Command::MaxLength,
        Command::Optimize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::AtmosTable => "atmos-table",
            Command::SweepLs => "sweep-ls",
            Command::SweepTheta => "sweep-theta",
            Command::OutageMap => "outage-map",
            Command::MaxLength => "max-length",
            Command::Optimize => "optimize",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// Failure of a command run, mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid scenario: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("cannot write results: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write results: {0}")]
    Csv(#[from] csv::Error),
}

impl RunError {
    /// 2 for invalid input, 3 for an infeasible search, 4 for numerical
    /// failures, 1 for I/O errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Model(e) => e.exit_code(),
            RunError::Io(_) | RunError::Csv(_) => 1,
        }
    }

    /// Machine-readable description printed on failure.
    pub fn payload(&self) -> Value {
        let detail = match self {
            RunError::Config(e) => json!({ "key": e.key, "expected": e.expected, "line": e.line }),
            RunError::Model(Error::NoFeasibleDesign(report)) => serde_json::to_value(report).unwrap_or(Value::Null),
            RunError::Model(_) | RunError::Io(_) | RunError::Csv(_) => Value::Null,
        };
        let kind = match self {
            RunError::Config(_) => "config",
            RunError::Model(e) => e.kind(),
            RunError::Io(_) | RunError::Csv(_) => "io",
        };
        json!({
            "error": kind,
            "message": self.to_string(),
            "exit_code": self.exit_code(),
            "detail": detail,
        })
    }
}

/// Rows of a result table, already formatted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Value of `column` in every row.
    pub fn column(&self, column: &str) -> Option<Vec<&str>> {
        let i = self.header.iter().position(|h| h == column)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    /// CSV text with a trailing `config_hash` column.
    pub fn to_csv(&self, config_hash: &str) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = self.header.clone();
        header.push("config_hash".into());
        w.write_record(&header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(String::as_str).chain([config_hash]))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields is UTF-8"))
    }
}

/// Output of one command run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub command: Command,
    pub config_hash: String,
    pub seed: u64,
    pub samples: usize,
    pub timestamp_unix_s: u64,
    pub tool_version: String,
    #[serde(skip)]
    pub table: Table,
    /// Command-specific scalar results.
    pub summary: Value,
}

impl ResultRecord {
    /// Write `<command>.csv` and `<command>.meta.json` under `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf), RunError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.command));
        let meta_path = dir.join(format!("{}.meta.json", self.command));
        std::fs::write(&csv_path, self.table.to_csv(&self.config_hash)?)?;
        let mut meta = serde_json::to_value(self).expect("record serialises");
        meta["rows"] = json!(self.table.rows.len());
        meta["columns"] = json!(self.table.header);
        std::fs::write(&meta_path, serde_json::to_string_pretty(&meta).expect("JSON value serialises") + "\n")?;
        Ok((csv_path, meta_path))
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt_num(x: Option<f64>) -> Value {
    x.map(Value::from).unwrap_or(Value::Null)
}

fn estimate(e: &EstimatorResult) -> Value {
    json!({ "mean": e.mean, "std_error": e.std_error, "n_samples": e.n_samples })
}

/// Run `command` on a validated scenario.
pub fn run_command(command: Command, cfg: &ScenarioConfig) -> Result<ResultRecord, RunError> {
    cfg.validate()?;
    let (table, summary) = match command {
        Command::AtmosTable => atmos_table(cfg)?,
        Command::SweepLs => sweep_ls(cfg)?,
        Command::SweepTheta => sweep_theta(cfg)?,
        Command::OutageMap => outage_map(cfg)?,
        Command::MaxLength => max_length(cfg)?,
        Command::Optimize => optimize_design(cfg)?,
    };
    Ok(ResultRecord {
        command,
        config_hash: cfg.hash(),
        seed: cfg.montecarlo.seed,
        samples: cfg.montecarlo.samples,
        timestamp_unix_s: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        table,
        summary,
    })
}

type Output = (Table, Value);

fn atmos_table(cfg: &ScenarioConfig) -> Result<Output, RunError> {
    let atm = cfg.atmosphere()?;
    let mut t = Table::new(&["f_ghz", "oxygen_db_per_km", "water_db_per_km", "total_db_per_km"]);
    let mut peak = (f64::NAN, f64::NEG_INFINITY);
    for f in cfg.frequency_grid() {
        let ox = oxygen_attn_sea_level(f)?;
        let wa = water_attn_sea_level(f, atm.rho0)?;
        if ox + wa > peak.1 {
            peak = (f, ox + wa);
        }
        t.push(vec![num(f), num(ox), num(wa), num(ox + wa)]);
    }
    let summary = json!({ "peak_f_ghz": peak.0, "peak_total_db_per_km": peak.1, "rho0_g_per_m3": atm.rho0 });
    Ok((t, summary))
}

fn sweep_table(curve: &SweepCurve, x_name: &str) -> Table {
    let mut t = Table::new(&[
        x_name, "l_s_m", "l_d_m", "c_su", "c_su_se", "c_du", "c_du_se", "c_e2e", "c_e2e_se", "p_out_su",
        "p_out_du", "p_out_e2e", "c_path_avg", "c_path_avg_se",
    ]);
    for p in &curve.points {
        let (avg, avg_se) = p
            .path_avg
            .map(|c| (num(c.mean), num(c.std_error)))
            .unwrap_or_default();
        t.push(vec![
            num(p.x),
            num(p.l_s),
            num(p.l_d),
            num(p.c_su.mean),
            num(p.c_su.std_error),
            num(p.c_du.mean),
            num(p.c_du.std_error),
            num(p.c_e2e.mean),
            num(p.c_e2e.std_error),
            num(p.p_out_su),
            num(p.p_out_du),
            num(p.p_out_e2e),
            avg,
            avg_se,
        ]);
    }
    t
}

fn sweep_ls(cfg: &ScenarioConfig) -> Result<Output, RunError> {
    let grid = cfg.l_sc_grid();
    let path_points = cfg.sweep.with_path_average.then_some(cfg.montecarlo.path_points);
    let curve = sweep_vs_ls(&cfg.geometry()?, &cfg.hops()?, &grid, cfg.gamma_th(), path_points, &cfg.mc())?;
    let mut t = sweep_table(&curve, "l_sc_m");
    for (row, &l_sc) in t.rows.iter_mut().zip(&grid) {
        row[0] = num(l_sc);
    }
    let summary = json!({
        "crossing_l_s_m": opt_num(curve.crossing()),
        "argmax_e2e_l_s_m": opt_num(curve.argmax_e2e()),
        "argmax_path_avg_l_s_m": opt_num(curve.argmax_path_avg()),
        "l_sc_step_m": cfg.sweep.l_sc_step_m,
    });
    Ok((t, summary))
}

fn sweep_theta(cfg: &ScenarioConfig) -> Result<Output, RunError> {
    let (curve, path) = sweep_vs_flight_angle(
        &cfg.geometry()?,
        &cfg.hops()?,
        cfg.montecarlo.path_points,
        cfg.gamma_th(),
        &cfg.mc(),
    )?;
    let mut t = sweep_table(&curve, "theta_rad");
    t.header.truncate(12);
    for row in &mut t.rows {
        row.truncate(12);
    }
    let summary = json!({
        "curve_trapezoid_mean": curve.trapezoid_mean(),
        "e2e_avg_capacity": estimate(&path.e2e),
        "avg_of_min": estimate(&path.avg_of_min),
        "c_su_path_average": estimate(&path.su_average),
        "c_du_path_average": estimate(&path.du_average),
        "crossing_theta_rad": opt_num(curve.crossing()),
    });
    Ok((t, summary))
}

fn outage_map(cfg: &ScenarioConfig) -> Result<Output, RunError> {
    let geom = cfg.geometry()?;
    let hops = cfg.hops()?;
    let gamma_th = cfg.gamma_th();
    let ensemble = RelayEnsemble::draw(&hops, &cfg.mc())?;
    let mut t = Table::new(&["l_sc_m", "theta_rad", "l_s_m", "l_d_m", "p_out_su", "p_out_du", "p_out_e2e"]);
    let mut worst = 0.0f64;
    for l_sc in cfg.l_sc_grid() {
        let g = geom.with_l_sc(l_sc);
        g.validate()?;
        for p in g.profile(cfg.sweep.outage_map_theta_points)? {
            let a_s = hops.cu.snr_scale(p.l_s, p.psi_s)?;
            let a_d = hops.ur.snr_scale(p.l_d, p.psi_d)?;
            let e2e = ensemble.outage_at(&hops, &p, gamma_th)?.probability;
            worst = worst.max(e2e);
            t.push(vec![
                num(l_sc),
                num(p.theta),
                num(p.l_s),
                num(p.l_d),
                num(ensemble.cu.outage(a_s, gamma_th).probability),
                num(ensemble.ur.outage(a_d, gamma_th).probability),
                num(e2e),
            ]);
        }
    }
    let summary = json!({ "max_p_out_e2e": worst, "gamma_th_db": cfg.link.gamma_th_db });
    Ok((t, summary))
}

fn max_length(cfg: &ScenarioConfig) -> Result<Output, RunError> {
    let geom = cfg.geometry()?;
    let hops = cfg.hops()?;
    let mc = cfg.mc();
    let elevation = ElevationModel::FixedAltitude(geom.h_u);
    let mut t = Table::new(&["hop", "l_max_m", "outage_at_l_max", "path_max_l_m", "within_limit"]);
    let mut summary = serde_json::Map::new();
    for (hop, path_max) in [(&hops.cu, geom.max_path_l_s()), (&hops.ur, geom.max_path_l_d())] {
        let sorted = HopEnsemble::draw(hop, &mc)?.sorted_gains();
        let l_max = max_link_length_from(
            hop,
            &sorted,
            cfg.gamma_th(),
            cfg.link.p_out_target,
            elevation,
            cfg.length_bounds(),
        )?;
        let psi = (geom.h_u / l_max).asin();
        let outage = sorted.outage(hop.snr_scale(l_max, psi)?, cfg.gamma_th()).probability;
        t.push(vec![
            hop.side.label().to_string(),
            num(l_max),
            num(outage),
            num(path_max),
            (path_max <= l_max).to_string(),
        ]);
        summary.insert(format!("l_max_{}_m", hop.side.label()), json!(l_max));
    }
    Ok((t, Value::Object(summary)))
}

fn design_row(rank: usize, d: &DesignPoint) -> Vec<String> {
    let a = &d.arrays;
    let (cap, cap_se) = d
        .avg_capacity
        .map(|c| (num(c.mean), num(c.std_error)))
        .unwrap_or_default();
    let violations: Vec<&str> = d.violations.iter().map(|v| v.name()).collect();
    vec![
        rank.to_string(),
        d.feasible.to_string(),
        a.n_sx.to_string(),
        a.n_sy.to_string(),
        a.n_dx.to_string(),
        a.n_dy.to_string(),
        a.n_usx.to_string(),
        a.n_usy.to_string(),
        a.n_udx.to_string(),
        a.n_udy.to_string(),
        num(d.h_u_m),
        num(d.l_sc_m),
        cap,
        cap_se,
        num(d.worst_outage),
        num(d.l_s_max),
        num(d.l_d_max),
        num(d.h_u_min),
        violations.join(";"),
    ]
}

fn optimize_design(cfg: &ScenarioConfig) -> Result<Output, RunError> {
    let report = optimize(
        &cfg.design_space(),
        &cfg.geometry()?,
        &cfg.hops()?,
        &cfg.optimizer_options(),
    )?;
    let mut t = Table::new(&[
        "rank",
        "feasible",
        "n_sx",
        "n_sy",
        "n_dx",
        "n_dy",
        "n_usx",
        "n_usy",
        "n_udx",
        "n_udy",
        "h_u_m",
        "l_sc_m",
        "avg_capacity",
        "avg_capacity_se",
        "worst_outage",
        "l_s_max_m",
        "l_d_max_m",
        "h_u_min_m",
        "violations",
    ]);
    for (i, d) in report.ranked.iter().enumerate() {
        t.push(design_row(i + 1, d));
    }
    let summary = json!({
        "best": report.best,
        "evaluated": report.ranked.len(),
        "feasible": report.ranked.iter().filter(|d| d.feasible).count(),
        "pruned": report.pruned.len(),
        "axis_pruning_disabled": report.axis_pruning_disabled,
    });
    Ok((t, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScenarioConfig {
        let mut cfg = ScenarioConfig::default();
        cfg.montecarlo.samples = 2_000;
        cfg.montecarlo.path_points = 21;
        cfg.sweep.l_sc_step_m = 1_000.0;
        cfg.sweep.outage_map_theta_points = 5;
        cfg
    }

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("plot".parse::<Command>().is_err());
    }

    #[test]
    fn atmos_table_covers_grid() {
        let rec = run_command(Command::AtmosTable, &small()).unwrap();
        assert_eq!(rec.table.rows.len(), 100);
        let peak = rec.summary["peak_f_ghz"].as_f64().unwrap();
        assert!((57.0..=63.0).contains(&peak), "{peak}");
    }

    #[test]
    fn csv_carries_hash_column() {
        let cfg = small();
        let rec = run_command(Command::MaxLength, &cfg).unwrap();
        let csv = rec.table.to_csv(&rec.config_hash).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "hop,l_max_m,outage_at_l_max,path_max_l_m,within_limit,config_hash"
        );
        assert!(lines.all(|l| l.ends_with(&cfg.hash())));
    }

    #[test]
    fn outage_map_shape() {
        let cfg = small();
        let rec = run_command(Command::OutageMap, &cfg).unwrap();
        assert_eq!(rec.table.rows.len(), cfg.l_sc_grid().len() * 5);
        let e2e: Vec<f64> = rec.table.column("p_out_e2e").unwrap().iter().map(|s| s.parse().unwrap()).collect();
        let su: Vec<f64> = rec.table.column("p_out_su").unwrap().iter().map(|s| s.parse().unwrap()).collect();
        assert!(e2e.iter().zip(&su).all(|(e, s)| e >= s));
    }

    #[test]
    fn infeasible_search_exits_with_3() {
        let mut cfg = small();
        cfg.link.gamma_th_db = 40.0;
        cfg.optimizer.n_usx = vec![12];
        cfg.optimizer.n_usy = vec![18];
        cfg.optimizer.l_sc_m = vec![9_500.0];
        let err = run_command(Command::Optimize, &cfg).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        let payload = err.payload();
        assert_eq!(payload["error"], "no_feasible_design");
        assert_eq!(payload["detail"]["evaluated"], 1);
    }

    #[test]
    fn invalid_config_exits_with_2() {
        let mut cfg = small();
        cfg.arrays.ud.sigma_y_deg = 0.0;
        let err = run_command(Command::SweepTheta, &cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert_eq!(err.payload()["detail"]["key"], "arrays.ud.sigma_y_deg");
    }
}
