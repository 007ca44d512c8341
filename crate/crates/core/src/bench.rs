//! Monte-Carlo experiment driver: sweeps instance sizes and SNRs, runs the
//! configured detectors on identical per-trial instances, and streams one
//! CSV row per (trial, method) plus aggregate summary rows at the end.
//!
//! Output is deterministic apart from the wall-time column: per-trial seeds
//! derive from `base_seed + trial`, trials run in parallel batches whose
//! results are written back in trial order, and float formatting is fixed.

use crate::abb::AbbParams;
use crate::bnb::SolverOptions;
use crate::detectors::{detect, DetectOpts, DetectionResult, Method};
use crate::model::{generate_instance, RealInstance};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::io::Write as _;
use std::path::PathBuf;
use std::time::Duration;

pub use crate::plot::{emit_svg_plot, PlotError, PlotSpec};

/// Trials dispatched to the worker pool between CSV flushes.
const BATCH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Fraction of rows with bᵢᵀx < 0, per method and for the true vector.
    Signflip,
    /// Bit-error rate vs SNR.
    Ber,
    /// Wall time across instance sizes.
    RuntimeSize,
    /// Wall time across SNRs at a fixed size.
    RuntimeSnr,
    /// Collected-cut fraction |S|/(M·2ᴺ) across sizes.
    CutRatio,
    /// A single configured cell, any methods.
    SolveOne,
}

impl ExperimentKind {
    pub fn tag(self) -> &'static str {
        match self {
            ExperimentKind::Signflip => "signflip",
            ExperimentKind::Ber => "ber",
            ExperimentKind::RuntimeSize => "runtime_size",
            ExperimentKind::RuntimeSnr => "runtime_snr",
            ExperimentKind::CutRatio => "cutratio",
            ExperimentKind::SolveOne => "solve_one",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        [
            ExperimentKind::Signflip,
            ExperimentKind::Ber,
            ExperimentKind::RuntimeSize,
            ExperimentKind::RuntimeSnr,
            ExperimentKind::CutRatio,
            ExperimentKind::SolveOne,
        ]
        .into_iter()
        .find(|k| k.tag() == tag)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Paired with `n_tilde` (either list may be length 1 to broadcast).
    pub m_tilde: Vec<usize>,
    pub n_tilde: Vec<usize>,
    pub snr_db_list: Vec<f64>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub base_seed: u64,
    pub output_path: PathBuf,
    pub solver: SolverOptions,
    pub abb: Option<AbbParams>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::Ber,
            m_tilde: vec![8],
            n_tilde: vec![3],
            snr_db_list: vec![10.0],
            trials: 500,
            methods: vec![Method::Gml],
            base_seed: 0,
            output_path: PathBuf::from("results.csv"),
            solver: SolverOptions::default(),
            abb: None,
        }
    }
}

impl ExperimentConfig {
    /// Size cells after broadcasting the two lists against each other.
    pub fn cells(&self) -> Result<Vec<(usize, usize)>, BenchError> {
        let (ms, ns) = (&self.m_tilde, &self.n_tilde);
        let len = ms.len().max(ns.len());
        if (ms.len() != len && ms.len() != 1) || (ns.len() != len && ns.len() != 1) {
            return Err(BenchError::Config(format!(
                "m_tilde ({}) and n_tilde ({}) lists must match or broadcast",
                ms.len(),
                ns.len()
            )));
        }
        Ok((0..len)
            .map(|i| (ms[i % ms.len()], ns[i % ns.len()]))
            .collect())
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.trials == 0 {
            return Err(BenchError::Config("trials must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(BenchError::Config("at least one method required".into()));
        }
        if self.snr_db_list.is_empty() {
            return Err(BenchError::Config("snr_db list must be non-empty".into()));
        }
        let cells = self.cells()?;
        let max_n = cells.iter().map(|&(_, n)| 2 * n).max().unwrap_or(0);
        if self.methods.contains(&Method::Exhaustive) && max_n > 24 {
            return Err(BenchError::Config(format!(
                "exhaustive search caps at N=24 sign variables, config reaches {max_n}"
            )));
        }
        let global = [Method::Gml, Method::ArL1, Method::ArL2, Method::Alg1Gml];
        if self.methods.iter().any(|m| global.contains(m)) && max_n > 64 {
            return Err(BenchError::Config(format!(
                "global solvers cap at N=64 sign variables, config reaches {max_n}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// One CSV row. Summary rows reuse the shape with trial = −1 and sums in
/// the bit fields, so mean BER is exactly recomputable from them.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: i64,
    pub method: String,
    pub snr_db: f64,
    pub m_tilde: usize,
    pub n_tilde: usize,
    pub bit_errors: u64,
    pub bits: u64,
    pub wall_time_us: u64,
    pub objective: f64,
    pub status: String,
    pub extra_json: String,
}

/// Bit errors between two sign vectors (one bit per real coordinate).
pub fn ber(x_hat: &[f64], x_true: &[f64]) -> (u64, u64) {
    assert_eq!(
        x_hat.len(),
        x_true.len(),
        "sign vectors differ in length: {} vs {}",
        x_hat.len(),
        x_true.len()
    );
    let errors = x_hat.iter().zip(x_true).filter(|(a, b)| a != b).count() as u64;
    (errors, x_hat.len() as u64)
}

/// Fraction of measurement rows whose sign the candidate x flips.
pub fn signflip_ratio(inst: &RealInstance, x: &[f64]) -> f64 {
    let t = inst.b.matvec(x);
    t.iter().filter(|&&ti| ti < 0.0).count() as f64 / inst.m() as f64
}

fn extra_map(res: &DetectionResult) -> Map<String, Value> {
    let mut map = Map::new();
    match res.method {
        Method::Gml | Method::ArL1 | Method::ArL2 | Method::Alg1Gml => {
            map.insert("nodes".into(), json!(res.stats.nodes));
            map.insert("lp_solves".into(), json!(res.stats.lp_solves));
            map.insert("cuts".into(), json!(res.stats.cuts));
            map.insert("cut_pool_ratio".into(), json!(res.stats.cut_pool_ratio));
            map.insert("proven_optimal".into(), json!(res.stats.proven_optimal));
            if res.method == Method::Alg1Gml {
                map.insert("outer_iterations".into(), json!(res.stats.outer_iterations));
            }
        }
        Method::ArL1Abb => {
            map.insert("inner_iterations".into(), json!(res.stats.inner_iterations));
            map.insert("stages".into(), json!(res.stats.stages));
            map.insert(
                "stage_iteration_limit_hits".into(),
                json!(res.stats.stage_iteration_limit_hits),
            );
            map.insert(
                "backtrack_exhausted".into(),
                json!(res.stats.backtrack_exhausted),
            );
        }
        Method::QuantZf | Method::Exhaustive => {}
    }
    map
}

fn run_one_trial(cfg: &ExperimentConfig, cell: (usize, usize), snr: f64, trial: usize) -> Vec<TrialRecord> {
    let (m_tilde, n_tilde) = cell;
    let seed = cfg.base_seed.wrapping_add(trial as u64);
    let inst = generate_instance(m_tilde, n_tilde, snr, seed);
    let x_true = inst.x_true.clone().expect("generated instances carry x_true");
    let want_flip = cfg.experiment == ExperimentKind::Signflip;
    let mut rows = Vec::with_capacity(cfg.methods.len() + 1);
    if want_flip {
        let mut extra = Map::new();
        extra.insert("signflip_ratio".into(), json!(signflip_ratio(&inst, &x_true)));
        rows.push(TrialRecord {
            trial: trial as i64,
            method: "x_true".into(),
            snr_db: snr,
            m_tilde,
            n_tilde,
            bit_errors: 0,
            bits: x_true.len() as u64,
            wall_time_us: 0,
            objective: f64::NAN,
            status: "ok".into(),
            extra_json: Value::Object(extra).to_string(),
        });
    }
    let opts = DetectOpts {
        solver: cfg.solver.clone(),
        abb: cfg.abb.clone(),
        init_seed: seed,
    };
    for &method in &cfg.methods {
        let row = match detect(&inst, method, &opts) {
            Ok(res) => {
                let (errors, bits) = ber(&res.x_hat, &x_true);
                let mut extra = extra_map(&res);
                if want_flip {
                    extra.insert(
                        "signflip_ratio".into(),
                        json!(signflip_ratio(&inst, &res.x_hat)),
                    );
                }
                TrialRecord {
                    trial: trial as i64,
                    method: method.tag().into(),
                    snr_db: snr,
                    m_tilde,
                    n_tilde,
                    bit_errors: errors,
                    bits,
                    wall_time_us: res.stats.wall_time.as_micros() as u64,
                    objective: res.objective,
                    status: "ok".into(),
                    extra_json: Value::Object(extra).to_string(),
                }
            }
            Err(err) => TrialRecord {
                trial: trial as i64,
                method: method.tag().into(),
                snr_db: snr,
                m_tilde,
                n_tilde,
                bit_errors: 0,
                bits: x_true.len() as u64,
                wall_time_us: 0,
                objective: f64::NAN,
                status: format!("error: {err}"),
                extra_json: "{}".into(),
            },
        };
        rows.push(row);
    }
    rows
}

/// Aggregates ok-rows per (method, size, snr) group, in first-appearance
/// order. Bit fields carry sums; the means live in extra_json.
fn summarize(records: &[TrialRecord]) -> Vec<TrialRecord> {
    #[derive(Default)]
    struct Acc {
        errors: u64,
        bits: u64,
        wall: u128,
        obj: f64,
        ok: u64,
        failed: u64,
        flip_sum: f64,
        flip_n: u64,
        ratio_sum: f64,
        ratio_n: u64,
    }
    let mut order: Vec<(String, usize, usize, u64)> = Vec::new();
    let mut accs: Vec<Acc> = Vec::new();
    for rec in records {
        let key = (rec.method.clone(), rec.m_tilde, rec.n_tilde, rec.snr_db.to_bits());
        let idx = match order.iter().position(|k| *k == key) {
            Some(i) => i,
            None => {
                order.push(key);
                accs.push(Acc::default());
                order.len() - 1
            }
        };
        let acc = &mut accs[idx];
        if rec.status != "ok" {
            acc.failed += 1;
            continue;
        }
        acc.ok += 1;
        acc.errors += rec.bit_errors;
        acc.bits += rec.bits;
        acc.wall += rec.wall_time_us as u128;
        if rec.objective.is_finite() {
            acc.obj += rec.objective;
        }
        if let Ok(Value::Object(map)) = serde_json::from_str::<Value>(&rec.extra_json) {
            if let Some(v) = map.get("signflip_ratio").and_then(Value::as_f64) {
                acc.flip_sum += v;
                acc.flip_n += 1;
            }
            if let Some(v) = map.get("cut_pool_ratio").and_then(Value::as_f64) {
                acc.ratio_sum += v;
                acc.ratio_n += 1;
            }
        }
    }
    order
        .into_iter()
        .zip(accs)
        .map(|((method, m_tilde, n_tilde, snr_bits), acc)| {
            let mut extra = Map::new();
            let mean_ber = if acc.bits > 0 {
                acc.errors as f64 / acc.bits as f64
            } else {
                f64::NAN
            };
            extra.insert("mean_ber".into(), json!(mean_ber));
            if acc.ok > 0 {
                extra.insert(
                    "mean_wall_time_us".into(),
                    json!(acc.wall as f64 / acc.ok as f64),
                );
                extra.insert("mean_objective".into(), json!(acc.obj / acc.ok as f64));
            }
            if acc.flip_n > 0 {
                extra.insert(
                    "mean_signflip_ratio".into(),
                    json!(acc.flip_sum / acc.flip_n as f64),
                );
            }
            if acc.ratio_n > 0 {
                extra.insert(
                    "mean_cut_pool_ratio".into(),
                    json!(acc.ratio_sum / acc.ratio_n as f64),
                );
            }
            extra.insert("trials_ok".into(), json!(acc.ok));
            extra.insert("trials_error".into(), json!(acc.failed));
            TrialRecord {
                trial: -1,
                method,
                snr_db: f64::from_bits(snr_bits),
                m_tilde,
                n_tilde,
                bit_errors: acc.errors,
                bits: acc.bits,
                wall_time_us: if acc.ok > 0 {
                    (acc.wall / acc.ok as u128) as u64
                } else {
                    0
                },
                objective: if acc.ok > 0 { acc.obj / acc.ok as f64 } else { f64::NAN },
                status: "summary".into(),
                extra_json: Value::Object(extra).to_string(),
            }
        })
        .collect()
}

/// Runs the full sweep, streaming CSV to `config.output_path` (created,
/// parents included) and returning every record including the summaries.
/// Per-trial solver failures become error rows; they never abort the sweep.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<TrialRecord>, BenchError> {
    config.validate()?;
    if let Some(parent) = config.output_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let file = std::fs::File::create(&config.output_path)?;
    let mut writer = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let mut all = Vec::new();
    for cell in config.cells()? {
        for &snr in &config.snr_db_list {
            let mut trial = 0usize;
            while trial < config.trials {
                let hi = (trial + BATCH).min(config.trials);
                let batch: Vec<Vec<TrialRecord>> = (trial..hi)
                    .into_par_iter()
                    .map(|t| run_one_trial(config, cell, snr, t))
                    .collect();
                for rows in batch {
                    for row in rows {
                        writer.serialize(&row)?;
                        all.push(row);
                    }
                }
                writer.flush()?;
                trial = hi;
            }
        }
    }
    let summaries = summarize(&all);
    for row in &summaries {
        writer.serialize(row)?;
    }
    writer.flush()?;
    writer.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?.flush()?;
    all.extend(summaries);
    Ok(all)
}

fn parse_list<T: std::str::FromStr>(v: &str, key: &str) -> Result<Vec<T>, BenchError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| BenchError::Config(format!("bad value {s:?} for {key}")))
        })
        .collect()
}

/// Flat `key = value` config format. `#` starts a comment; lists are
/// comma-separated. Unknown keys are rejected so typos surface as config
/// errors rather than silently running defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, BenchError> {
    let mut cfg = ExperimentConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            BenchError::Config(format!("line {}: expected key = value", lineno + 1))
        })?;
        apply_config_key(&mut cfg, key.trim(), value.trim())?;
    }
    Ok(cfg)
}

/// Applies a single `key = value` override (shared by the file parser and
/// the CLI flag passthrough).
pub fn apply_config_key(
    cfg: &mut ExperimentConfig,
    key: &str,
    value: &str,
) -> Result<(), BenchError> {
    match key {
        "experiment" => {
            cfg.experiment = ExperimentKind::from_tag(value).ok_or_else(|| {
                BenchError::Config(format!("unknown experiment {value:?}"))
            })?;
        }
        "m_tilde" => cfg.m_tilde = parse_list(value, key)?,
        "n_tilde" => cfg.n_tilde = parse_list(value, key)?,
        "snr_db" | "snr_db_list" => cfg.snr_db_list = parse_list(value, key)?,
        "trials" => {
            cfg.trials = value
                .parse()
                .map_err(|_| BenchError::Config(format!("bad value {value:?} for trials")))?;
        }
        "methods" => {
            cfg.methods = value
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    Method::from_tag(s)
                        .ok_or_else(|| BenchError::Config(format!("unknown method {s:?}")))
                })
                .collect::<Result<_, _>>()?;
        }
        "base_seed" => {
            cfg.base_seed = value
                .parse()
                .map_err(|_| BenchError::Config(format!("bad value {value:?} for base_seed")))?;
        }
        "output" | "output_path" => cfg.output_path = PathBuf::from(value),
        "node_limit" => {
            cfg.solver.node_limit = value
                .parse()
                .map_err(|_| BenchError::Config(format!("bad value {value:?} for node_limit")))?;
        }
        "time_limit_ms" => {
            let ms: u64 = value.parse().map_err(|_| {
                BenchError::Config(format!("bad value {value:?} for time_limit_ms"))
            })?;
            cfg.solver.time_limit = Some(Duration::from_millis(ms));
        }
        other => {
            return Err(BenchError::Config(format!("unknown config key {other:?}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn ber_counting() {
        let a = vec![1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0];
        assert_eq!(ber(&a, &a), (0, 8));
        let flipped: Vec<f64> = a.iter().map(|v| -v).collect();
        assert_eq!(ber(&flipped, &a), (8, 8));
        let mut two = a.clone();
        two[1] = -two[1];
        two[4] = -two[4];
        assert_eq!(ber(&two, &a), (2, 8));
    }

    #[test]
    #[should_panic(expected = "differ in length")]
    fn ber_length_mismatch_panics() {
        ber(&[1.0], &[1.0, -1.0]);
    }

    #[test]
    fn signflip_ratio_extremes() {
        let inst = generate_instance(8, 2, 80.0, 3);
        let x_true = inst.x_true.clone().unwrap();
        assert_eq!(signflip_ratio(&inst, &x_true), 0.0);
        let neg: Vec<f64> = x_true.iter().map(|v| -v).collect();
        assert_eq!(signflip_ratio(&inst, &neg), 1.0);
    }

    #[test]
    fn record_accounting_single_method() {
        let dir = tempdir().unwrap();
        let cfg = ExperimentConfig {
            experiment: ExperimentKind::Ber,
            m_tilde: vec![4, 6],
            n_tilde: vec![2],
            snr_db_list: vec![0.0, 10.0],
            trials: 1,
            methods: vec![Method::QuantZf],
            base_seed: 7,
            output_path: dir.path().join("out.csv"),
            ..ExperimentConfig::default()
        };
        let records = run_experiment(&cfg).unwrap();
        let data: Vec<_> = records.iter().filter(|r| r.trial >= 0).collect();
        // 2 cells × 2 SNRs × 1 trial × 1 method.
        assert_eq!(data.len(), 4);
        let summaries: Vec<_> = records.iter().filter(|r| r.trial < 0).collect();
        assert_eq!(summaries.len(), 4);
        assert!(summaries.iter().all(|r| r.status == "summary"));
    }

    #[test]
    fn csv_deterministic_modulo_wall_time() {
        let dir = tempdir().unwrap();
        let mut cfg = ExperimentConfig {
            experiment: ExperimentKind::Signflip,
            m_tilde: vec![6],
            n_tilde: vec![2],
            snr_db_list: vec![5.0],
            trials: 4,
            methods: vec![Method::Gml, Method::QuantZf, Method::ArL1Abb],
            base_seed: 11,
            output_path: dir.path().join("a.csv"),
            ..ExperimentConfig::default()
        };
        let a = run_experiment(&cfg).unwrap();
        cfg.output_path = dir.path().join("b.csv");
        let b = run_experiment(&cfg).unwrap();
        let normalize = |s: &std::path::Path| {
            let text = std::fs::read_to_string(s).unwrap();
            text.lines()
                .map(|line| {
                    // Blank out the wall-time column (8th field; extra_json
                    // is quoted so naive splitting stops before it).
                    let mut parts: Vec<&str> = line.splitn(9, ',').collect();
                    if parts.len() == 9 {
                        parts[7] = "_";
                    }
                    parts.join(",")
                })
                .collect::<Vec<_>>()
                .join("\n")
        };
        // In-memory records agree field-by-field apart from timing.
        assert_eq!(a.len(), b.len());
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!(ra.method, rb.method);
            assert_eq!(ra.trial, rb.trial);
            assert_eq!(ra.bit_errors, rb.bit_errors);
            assert_eq!(ra.objective.to_bits(), rb.objective.to_bits());
        }
        let na = normalize(&dir.path().join("a.csv"));
        let nb = normalize(&dir.path().join("b.csv"));
        // The only tolerated differences live in wall-time fields, which
        // also appear inside summary extra_json; compare data rows strictly.
        for (la, lb) in na.lines().zip(nb.lines()) {
            if la.contains("summary") {
                continue;
            }
            assert_eq!(la, lb);
        }
    }

    #[test]
    fn summary_mean_ber_matches_raw_records() {
        let dir = tempdir().unwrap();
        let cfg = ExperimentConfig {
            experiment: ExperimentKind::Ber,
            m_tilde: vec![6],
            n_tilde: vec![2],
            snr_db_list: vec![5.0],
            trials: 8,
            methods: vec![Method::QuantZf, Method::ArL1Abb],
            base_seed: 23,
            output_path: dir.path().join("out.csv"),
            ..ExperimentConfig::default()
        };
        let records = run_experiment(&cfg).unwrap();
        for method in ["quantZF", "AR-L1-ABB"] {
            let raw: Vec<_> = records
                .iter()
                .filter(|r| r.trial >= 0 && r.method == method)
                .collect();
            let errors: u64 = raw.iter().map(|r| r.bit_errors).sum();
            let bits: u64 = raw.iter().map(|r| r.bits).sum();
            let summary = records
                .iter()
                .find(|r| r.trial < 0 && r.method == method)
                .unwrap();
            assert_eq!(summary.bit_errors, errors);
            assert_eq!(summary.bits, bits);
            let extra: Value = serde_json::from_str(&summary.extra_json).unwrap();
            let mean = extra["mean_ber"].as_f64().unwrap();
            assert!((mean - errors as f64 / bits as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn per_trial_oracle_agreement_in_sweep() {
        let dir = tempdir().unwrap();
        let cfg = ExperimentConfig {
            experiment: ExperimentKind::Ber,
            m_tilde: vec![8],
            n_tilde: vec![3],
            snr_db_list: vec![10.0],
            trials: 10,
            methods: vec![Method::Gml, Method::Exhaustive],
            base_seed: 40,
            output_path: dir.path().join("out.csv"),
            ..ExperimentConfig::default()
        };
        let records = run_experiment(&cfg).unwrap();
        for t in 0..10 {
            let of = |tag: &str| {
                records
                    .iter()
                    .find(|r| r.trial == t && r.method == tag)
                    .unwrap()
                    .objective
            };
            assert!((of("gML") - of("exhaustive")).abs() < 1e-8, "trial {t}");
        }
        // Identical per-trial objectives force identical summary BERs.
        let summary_ber = |tag: &str| {
            let r = records
                .iter()
                .find(|r| r.trial < 0 && r.method == tag)
                .unwrap();
            (r.bit_errors, r.bits)
        };
        assert_eq!(summary_ber("gML"), summary_ber("exhaustive"));
    }

    #[test]
    fn config_parsing_round_trip() {
        let text = "
            # sweep shape
            experiment = signflip
            m_tilde = 64
            n_tilde = 4, 6, 8
            snr_db = 0, 10, 20, 30
            trials = 12
            methods = gML, AR-L1, quantZF
            base_seed = 99
            output = runs/flip.csv
            node_limit = 1000
            time_limit_ms = 2500
        ";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::Signflip);
        assert_eq!(cfg.m_tilde, vec![64]);
        assert_eq!(cfg.n_tilde, vec![4, 6, 8]);
        assert_eq!(cfg.snr_db_list, vec![0.0, 10.0, 20.0, 30.0]);
        assert_eq!(cfg.trials, 12);
        assert_eq!(cfg.methods, vec![Method::Gml, Method::ArL1, Method::QuantZf]);
        assert_eq!(cfg.base_seed, 99);
        assert_eq!(cfg.output_path, PathBuf::from("runs/flip.csv"));
        assert_eq!(cfg.solver.node_limit, 1000);
        assert_eq!(cfg.solver.time_limit, Some(Duration::from_millis(2500)));
        assert_eq!(
            cfg.cells().unwrap(),
            vec![(64, 4), (64, 6), (64, 8)]
        );
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_values() {
        assert!(matches!(
            parse_config("experimnt = ber"),
            Err(BenchError::Config(_))
        ));
        assert!(matches!(
            parse_config("trials = many"),
            Err(BenchError::Config(_))
        ));
        assert!(matches!(
            parse_config("methods = gML, warp-drive"),
            Err(BenchError::Config(_))
        ));
        assert!(matches!(
            parse_config("no equals sign here"),
            Err(BenchError::Config(_))
        ));
    }

    #[test]
    fn config_validation_catches_impossible_sweeps() {
        let mut cfg = ExperimentConfig::default();
        cfg.methods = vec![Method::Exhaustive];
        cfg.n_tilde = vec![13];
        assert!(matches!(cfg.validate(), Err(BenchError::Config(_))));
        let mut cfg = ExperimentConfig::default();
        cfg.m_tilde = vec![4, 6];
        cfg.n_tilde = vec![2, 3, 4];
        assert!(matches!(cfg.validate(), Err(BenchError::Config(_))));
        let mut cfg = ExperimentConfig::default();
        cfg.trials = 0;
        assert!(matches!(cfg.validate(), Err(BenchError::Config(_))));
    }
}
