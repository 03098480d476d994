//! Seeded Monte Carlo sweeps over {aggregation level} x {bundle size} x
//! {SNR point}.
//!
//! One master seed expands into per-trial random streams keyed by the trial
//! coordinates (see [`crate::rng`]), so a sweep produces the same rows on
//! any worker count and trials can run in any order. Channel draws are
//! keyed without the bundle size: all bundle sizes of a comparison see the
//! same channels, which sharpens ranking comparisons considerably.
//!
//! The SNR axis is the SINR of non-boosted RBs: a trial at `snr_db` uses a
//! base noise variance of `10^(-snr_db/10)` against unit signal power per
//! pilot, and boosted RBs sit `boost_db` above that.
//!
//! Results serialize to CSV with the fixed header
//! `scenario,al,regb_size,snr_db,mean_eesm_db,linear_mean_eesm_db,stderr_db,n_trials,master_seed`
//! and floats printed with 6 significant digits.

use crate::channel_estimation::{
    build_regb_correlation, estimate_noise_variance, estimate_snr, ls_estimate, mmse_estimate,
    mmse_estimate_with_variance, RegbCorrelation,
};
use crate::channel_model::{draw_realization, load_pdp_file, OfdmNumerology, PowerDelayProfile};
use crate::error::{LinkSimError, Result};
use crate::link_abstraction::{combine_mrc, eesm, EesmRecord, SnrGrid};
use crate::resource_map::{
    allocate_pdcch, CoresetConfig, ALLOWED_AGGREGATION_LEVELS, ALLOWED_REGB_SIZES,
};
use crate::rng::{RngStream, StreamRole};
use crate::signal_synthesis::{
    build_interference_profile, draw_precoders, effective_channel, generate_dmrs,
    synthesize_observation,
};
use crate::{db_to_linear, linear_to_db};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Exact CSV header emitted by [`csv_string`].
pub const CSV_HEADER: &str =
    "scenario,al,regb_size,snr_db,mean_eesm_db,linear_mean_eesm_db,stderr_db,n_trials,master_seed";

/// Environment variable that locates PDP data files.
pub const DATA_DIR_ENV: &str = "LINKSIM_DATA_DIR";

/// Keys understood by the config parser and `--set` overrides.
pub const VALID_KEYS: [&str; 17] = [
    "name",
    "n_rb",
    "n_symbols",
    "pdp",
    "n_tx",
    "n_rx",
    "boosted_rbs",
    "boost_db",
    "snr_points_db",
    "aggregation_levels",
    "regb_sizes",
    "lambda",
    "n_trials",
    "master_seed",
    "estimation",
    "subcarrier_spacing_hz",
    "fft_size",
];

/// Whether the MMSE stage is fed true statistics or LS-derived estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimationMode {
    /// True correlation and noise variance (reproduction baseline).
    Genie,
    /// True correlation structure, LS-based noise-variance estimate with a
    /// genie fallback when the correlation has no noise subspace.
    Estimated,
}

/// EESM scaling factor, either global or per aggregation level.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaConfig {
    Scalar(f64),
    PerAl(BTreeMap<u32, f64>),
}

impl LambdaConfig {
    pub fn lambda_for(&self, al: u32) -> Option<f64> {
        match self {
            LambdaConfig::Scalar(v) => Some(*v),
            LambdaConfig::PerAl(map) => map.get(&al).copied(),
        }
    }
}

/// Full description of one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub n_rb: u32,
    pub n_symbols: u32,
    /// PDP file path, resolved against `LINKSIM_DATA_DIR`, the config file
    /// directory, and the working directory in that order.
    pub pdp: String,
    pub n_tx: usize,
    pub n_rx: usize,
    /// 1-based RBs with boosted interference.
    pub boosted_rbs: Vec<u32>,
    pub boost_db: f64,
    pub snr_points_db: Vec<f64>,
    pub aggregation_levels: Vec<u32>,
    pub regb_sizes: Vec<u32>,
    pub lambda: LambdaConfig,
    pub n_trials: u64,
    pub master_seed: u64,
    pub estimation: EstimationMode,
    pub subcarrier_spacing_hz: f64,
    pub fft_size: usize,
    /// Directory of the config file this was loaded from, if any.
    pub config_dir: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            name: "scenario".into(),
            n_rb: 48,
            n_symbols: 1,
            pdp: String::new(),
            n_tx: 2,
            n_rx: 1,
            boosted_rbs: Vec::new(),
            boost_db: 3.0,
            snr_points_db: default_snr_points(),
            aggregation_levels: vec![1, 2, 4, 8],
            regb_sizes: vec![2, 3, 6],
            lambda: LambdaConfig::Scalar(1.0),
            n_trials: 5000,
            master_seed: 1,
            estimation: EstimationMode::Genie,
            subcarrier_spacing_hz: 15e3,
            fft_size: 2048,
            config_dir: None,
        }
    }
}

/// Default SNR axis: -10 dB to 20 dB in 2 dB steps.
pub fn default_snr_points() -> Vec<f64> {
    (-10..=20).step_by(2).map(f64::from).collect()
}

impl ScenarioConfig {
    /// Parse a flat `key = value` config file. Blank lines and `#` comments
    /// are skipped; every faulty line is reported.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LinkSimError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = ScenarioConfig {
            name: path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into()),
            config_dir: path.parent().map(|p| p.to_path_buf()),
            ..ScenarioConfig::default()
        };
        let mut errors = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                errors.push(format!("line {}: expected 'key = value', got '{line}'", idx + 1));
                continue;
            };
            if let Err(e) = cfg.set(key, value) {
                errors.push(format!("line {}: {}", idx + 1, flatten_error(e)));
            }
        }
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(LinkSimError::Config(errors))
        }
    }

    /// Apply one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let v = value.trim();
        match key {
            "name" => self.name = v.to_string(),
            "n_rb" => self.n_rb = parse_scalar(key, v)?,
            "n_symbols" => self.n_symbols = parse_scalar(key, v)?,
            "pdp" => self.pdp = v.to_string(),
            "n_tx" => self.n_tx = parse_scalar(key, v)?,
            "n_rx" => self.n_rx = parse_scalar(key, v)?,
            "boosted_rbs" => self.boosted_rbs = parse_rb_set(key, v)?,
            "boost_db" => self.boost_db = parse_scalar(key, v)?,
            "snr_points_db" => self.snr_points_db = parse_snr_points(key, v)?,
            "aggregation_levels" => self.aggregation_levels = parse_u32_list(key, v)?,
            "regb_sizes" => self.regb_sizes = parse_u32_list(key, v)?,
            "lambda" => self.lambda = parse_lambda(key, v)?,
            "n_trials" => self.n_trials = parse_scalar(key, v)?,
            "master_seed" => self.master_seed = parse_scalar(key, v)?,
            "estimation" => {
                self.estimation = match v.to_ascii_lowercase().as_str() {
                    "genie" => EstimationMode::Genie,
                    "estimated" => EstimationMode::Estimated,
                    _ => {
                        return Err(LinkSimError::config(format!(
                            "estimation: '{v}' is not one of genie, estimated"
                        )))
                    }
                }
            }
            "subcarrier_spacing_hz" => self.subcarrier_spacing_hz = parse_scalar(key, v)?,
            "fft_size" => self.fft_size = parse_scalar(key, v)?,
            other => {
                return Err(LinkSimError::config(format!(
                    "unknown key '{other}'; valid keys: {}",
                    VALID_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Validate all fields, reporting every violation with its field name.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.pdp.is_empty() {
            errs.push("pdp: path to a power-delay-profile file is required".into());
        }
        if self.n_symbols != 1 {
            errs.push(format!(
                "n_symbols: {} not supported; bundle placement is defined for 1 symbol",
                self.n_symbols
            ));
        }
        if self.n_rb == 0 || !self.n_rb.is_multiple_of(6) {
            errs.push(format!("n_rb: {} is not a positive multiple of 6", self.n_rb));
        }
        if self.regb_sizes.is_empty() {
            errs.push("regb_sizes: at least one bundle size is required".into());
        }
        for &r in &self.regb_sizes {
            if !ALLOWED_REGB_SIZES.contains(&r) {
                errs.push(format!("regb_sizes: {r} not in allowed set {{2, 3, 6}}"));
            }
        }
        if self.aggregation_levels.is_empty() {
            errs.push("aggregation_levels: at least one level is required".into());
        }
        for &al in &self.aggregation_levels {
            if !ALLOWED_AGGREGATION_LEVELS.contains(&al) {
                errs.push(format!(
                    "aggregation_levels: {al} not in allowed set {{1, 2, 4, 8}}"
                ));
            } else if al * 6 > self.n_rb * self.n_symbols {
                errs.push(format!(
                    "aggregation_levels: level {al} needs {} REGs but the CORESET has {}",
                    al * 6,
                    self.n_rb * self.n_symbols
                ));
            }
        }
        for &rb in &self.boosted_rbs {
            if rb == 0 || rb > self.n_rb {
                errs.push(format!("boosted_rbs: RB {rb} outside [1:{}]", self.n_rb));
            }
        }
        // boosted region must cover whole bundles for every bundle size
        for &r in &self.regb_sizes {
            if !ALLOWED_REGB_SIZES.contains(&r) || !self.n_rb.is_multiple_of(r) {
                continue;
            }
            for bundle in 0..self.n_rb / r {
                let rbs: Vec<u32> = (1..=r).map(|i| bundle * r + i).collect();
                let boosted = rbs
                    .iter()
                    .filter(|rb| self.boosted_rbs.contains(rb))
                    .count();
                if boosted != 0 && boosted != rbs.len() {
                    errs.push(format!(
                        "boosted_rbs: boundary splits bundle {bundle} of size {r} (RBs {}..{})",
                        rbs[0],
                        rbs[rbs.len() - 1]
                    ));
                }
            }
        }
        if self.snr_points_db.is_empty() {
            errs.push("snr_points_db: at least one SNR point is required".into());
        }
        if self.snr_points_db.iter().any(|v| !v.is_finite()) {
            errs.push("snr_points_db: values must be finite".into());
        }
        if !self.boost_db.is_finite() {
            errs.push(format!("boost_db: {} must be finite", self.boost_db));
        }
        if self.n_trials == 0 {
            errs.push("n_trials: must be at least 1".into());
        }
        if self.n_tx == 0 {
            errs.push("n_tx: must be at least 1".into());
        }
        if self.n_rx == 0 {
            errs.push("n_rx: must be at least 1".into());
        }
        match &self.lambda {
            LambdaConfig::Scalar(l) => {
                if *l <= 0.0 || !l.is_finite() {
                    errs.push(format!("lambda: {l} must be positive"));
                }
            }
            LambdaConfig::PerAl(map) => {
                for (al, l) in map {
                    if *l <= 0.0 || !l.is_finite() {
                        errs.push(format!("lambda: value {l} for AL {al} must be positive"));
                    }
                }
                for al in &self.aggregation_levels {
                    if !map.contains_key(al) {
                        errs.push(format!("lambda: no value for aggregation level {al}"));
                    }
                }
            }
        }
        if !self.fft_size.is_power_of_two() {
            errs.push(format!("fft_size: {} is not a power of two", self.fft_size));
        }
        if self.subcarrier_spacing_hz <= 0.0 || !self.subcarrier_spacing_hz.is_finite() {
            errs.push(format!(
                "subcarrier_spacing_hz: {} must be positive",
                self.subcarrier_spacing_hz
            ));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(LinkSimError::Config(errs))
        }
    }

    /// Locate the PDP file. Absolute paths are used as-is; relative paths
    /// are tried under `LINKSIM_DATA_DIR`, next to the config file, and
    /// relative to the working directory.
    pub fn resolve_pdp_path(&self) -> Result<PathBuf> {
        let p = Path::new(&self.pdp);
        if p.is_absolute() {
            if p.exists() {
                return Ok(p.to_path_buf());
            }
            return Err(LinkSimError::config(format!(
                "pdp: file '{}' does not exist",
                self.pdp
            )));
        }
        let mut candidates = Vec::new();
        if let Ok(dir) = std::env::var(DATA_DIR_ENV) {
            candidates.push(Path::new(&dir).join(p));
        }
        if let Some(dir) = &self.config_dir {
            candidates.push(dir.join(p));
        }
        candidates.push(p.to_path_buf());
        for c in &candidates {
            if c.exists() {
                return Ok(c.clone());
            }
        }
        Err(LinkSimError::config(format!(
            "pdp: file '{}' not found; tried {}; set {} or use an absolute path",
            self.pdp,
            candidates
                .iter()
                .map(|c| format!("'{}'", c.display()))
                .collect::<Vec<_>>()
                .join(", "),
            DATA_DIR_ENV
        )))
    }
}

fn flatten_error(e: LinkSimError) -> String {
    match e {
        LinkSimError::Config(msgs) => msgs.join("; "),
        other => other.to_string(),
    }
}

fn parse_scalar<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| LinkSimError::config(format!("{key}: cannot parse '{v}'")))
}

fn parse_u32_list(key: &str, v: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for part in v.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(parse_scalar::<u32>(key, part)?);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// RB sets accept `lo:hi` inclusive ranges or comma lists; empty means none.
fn parse_rb_set(key: &str, v: &str) -> Result<Vec<u32>> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((lo, hi)) = v.split_once(':') {
        let lo: u32 = parse_scalar(key, lo.trim())?;
        let hi: u32 = parse_scalar(key, hi.trim())?;
        if lo > hi {
            return Err(LinkSimError::config(format!(
                "{key}: range {lo}:{hi} is reversed"
            )));
        }
        return Ok((lo..=hi).collect());
    }
    parse_u32_list(key, v)
}

/// SNR axes accept `lo:hi:step` or comma lists.
fn parse_snr_points(key: &str, v: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    if v.matches(':').count() == 2 {
        let parts: Vec<&str> = v.split(':').collect();
        let lo: f64 = parse_scalar(key, parts[0].trim())?;
        let hi: f64 = parse_scalar(key, parts[1].trim())?;
        let step: f64 = parse_scalar(key, parts[2].trim())?;
        if step <= 0.0 || step.is_nan() || hi < lo {
            return Err(LinkSimError::config(format!(
                "{key}: bad range '{v}' (need lo <= hi and step > 0)"
            )));
        }
        let mut x = lo;
        while x <= hi + 1e-9 {
            out.push(x);
            x += step;
        }
    } else {
        for part in v.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            out.push(parse_scalar::<f64>(key, part)?);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

/// Lambda accepts a scalar or per-AL pairs like `1:0.6,2:0.8,4:1.0,8:1.3`.
fn parse_lambda(key: &str, v: &str) -> Result<LambdaConfig> {
    if !v.contains(':') {
        return Ok(LambdaConfig::Scalar(parse_scalar(key, v)?));
    }
    let mut map = BTreeMap::new();
    for part in v.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((al, l)) = part.split_once(':') else {
            return Err(LinkSimError::config(format!(
                "{key}: expected 'al:lambda', got '{part}'"
            )));
        };
        map.insert(
            parse_scalar::<u32>(key, al.trim())?,
            parse_scalar::<f64>(key, l.trim())?,
        );
    }
    Ok(LambdaConfig::PerAl(map))
}

/// One aggregated CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResultRow {
    pub scenario: String,
    pub al: u32,
    pub regb_size: u32,
    pub snr_db: f64,
    /// Mean over trials of the per-trial effective SNR in dB.
    pub mean_eesm_db: f64,
    /// Linear-domain trial mean, expressed in dB.
    pub linear_mean_eesm_db: f64,
    /// Standard error of the per-trial dB values.
    pub stderr_db: f64,
    pub n_trials: u64,
    pub master_seed: u64,
}

/// Prepared, validated sweep state shared by all trials.
pub struct TrialContext {
    pub cfg: ScenarioConfig,
    pub pdp: PowerDelayProfile,
    pub num: OfdmNumerology,
    correlations: BTreeMap<u32, RegbCorrelation>,
}

impl TrialContext {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let pdp = load_pdp_file(cfg.resolve_pdp_path()?)?;
        let num = OfdmNumerology::new(cfg.subcarrier_spacing_hz, cfg.fft_size)?;
        let mut correlations = BTreeMap::new();
        for regb in ALLOWED_REGB_SIZES {
            let pattern = crate::resource_map::dmrs_pattern(regb)?;
            correlations.insert(regb, build_regb_correlation(&pdp, &num, &pattern));
        }
        Ok(TrialContext {
            cfg: cfg.clone(),
            pdp,
            num,
            correlations,
        })
    }

    pub fn correlation(&self, regb_size: u32) -> Result<&RegbCorrelation> {
        self.correlations
            .get(&regb_size)
            .ok_or(LinkSimError::InvalidRegbSize(regb_size))
    }
}

fn trial_stream(
    cfg: &ScenarioConfig,
    role: StreamRole,
    al: u32,
    regb_size: u32,
    snr_db: f64,
    trial_index: u64,
) -> RngStream {
    // channel draws are shared across bundle sizes
    let regb_word = if role == StreamRole::Channel {
        0
    } else {
        regb_size as u64
    };
    RngStream::derive(
        cfg.master_seed,
        &[
            role as u64,
            al as u64,
            regb_word,
            snr_db.to_bits(),
            trial_index,
        ],
    )
}

/// Per-pilot combined SNRs of one trial.
pub fn trial_snr_grid(
    ctx: &TrialContext,
    al: u32,
    regb_size: u32,
    snr_db: f64,
    trial_index: u64,
) -> Result<SnrGrid> {
    let cfg = &ctx.cfg;
    let coreset = CoresetConfig::new(cfg.n_rb, cfg.n_symbols, regb_size)?;
    let alloc = allocate_pdcch(&coreset, al, 0)?;
    let base_variance = db_to_linear(-snr_db);
    let profile =
        build_interference_profile(cfg.n_rb, base_variance, &cfg.boosted_rbs, cfg.boost_db)?;
    let corr = ctx.correlation(regb_size)?;

    let mut channel_rng = trial_stream(cfg, StreamRole::Channel, al, regb_size, snr_db, trial_index);
    let realization = draw_realization(&ctx.pdp, &ctx.num, cfg.n_tx, cfg.n_rx, &mut channel_rng);
    let mut precoder_rng =
        trial_stream(cfg, StreamRole::Precoder, al, regb_size, snr_db, trial_index);
    let schedule = draw_precoders(alloc.n_bundles(), cfg.n_tx, &mut precoder_rng);
    let mut pilot_rng = trial_stream(cfg, StreamRole::Pilot, al, regb_size, snr_db, trial_index);
    let mut noise_rng = trial_stream(cfg, StreamRole::Noise, al, regb_size, snr_db, trial_index);

    let d = alloc.dmrs_per_bundle();
    let mut values = Vec::with_capacity(alloc.n_bundles() * d);
    let mut per_antenna: Vec<Vec<f64>> = Vec::with_capacity(cfg.n_rx);
    for m in 0..alloc.n_bundles() {
        let sigma2 = profile.bundle_variance(&alloc, m)?;
        let pilots = generate_dmrs(&alloc, m, &mut pilot_rng)?;
        per_antenna.clear();
        for rx in 0..cfg.n_rx {
            let effective = effective_channel(&realization, &alloc, &schedule, m, rx)?;
            let obs = synthesize_observation(
                alloc.regb_positions[m],
                rx,
                &effective,
                &pilots,
                sigma2,
                &mut noise_rng,
            )?;
            let est = match cfg.estimation {
                EstimationMode::Genie => mmse_estimate(&obs, corr)?,
                EstimationMode::Estimated => {
                    let ls = ls_estimate(&obs);
                    let sigma_hat = estimate_noise_variance(&ls, &obs, corr).unwrap_or(sigma2);
                    mmse_estimate_with_variance(&obs, corr, sigma_hat)?
                }
            };
            per_antenna.push(estimate_snr(&obs, &est));
        }
        for j in 0..d {
            let across: Vec<f64> = per_antenna.iter().map(|snrs| snrs[j]).collect();
            values.push(combine_mrc(&across)?);
        }
    }
    SnrGrid::from_values(alloc.n_bundles(), d, values)
}

/// Run one trial end to end. Fully determined by the configuration's master
/// seed and the (al, regb_size, snr_db, trial_index) coordinates.
pub fn run_trial(
    ctx: &TrialContext,
    al: u32,
    regb_size: u32,
    snr_db: f64,
    trial_index: u64,
) -> Result<EesmRecord> {
    let grid = trial_snr_grid(ctx, al, regb_size, snr_db, trial_index)?;
    let lambda = ctx.cfg.lambda.lambda_for(al).ok_or_else(|| {
        LinkSimError::config(format!("lambda: no value for aggregation level {al}"))
    })?;
    let gamma_eff = eesm(&grid, lambda)?;
    Ok(EesmRecord {
        gamma_eff,
        lambda,
        scenario: ctx.cfg.name.clone(),
        aggregation_level: al,
        regb_size,
        snr_db,
        trial_index,
        master_seed: ctx.cfg.master_seed,
    })
}

/// Aggregate per-trial effective SNRs into one row.
fn summarize(
    cfg: &ScenarioConfig,
    al: u32,
    regb_size: u32,
    snr_db: f64,
    gammas: &[f64],
) -> SweepResultRow {
    let n = gammas.len() as f64;
    let db: Vec<f64> = gammas.iter().map(|&g| linear_to_db(g)).collect();
    let mean_db = db.iter().sum::<f64>() / n;
    let stderr_db = if gammas.len() > 1 {
        let var = db.iter().map(|d| (d - mean_db).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    let linear_mean = gammas.iter().sum::<f64>() / n;
    SweepResultRow {
        scenario: cfg.name.clone(),
        al,
        regb_size,
        snr_db,
        mean_eesm_db: mean_db,
        linear_mean_eesm_db: linear_to_db(linear_mean),
        stderr_db,
        n_trials: gammas.len() as u64,
        master_seed: cfg.master_seed,
    }
}

/// Run the full sweep. Rows come out sorted by (al, regb_size, snr_db) and
/// are identical for any worker count.
pub fn run_sweep(cfg: &ScenarioConfig) -> Result<Vec<SweepResultRow>> {
    let ctx = TrialContext::new(cfg)?;
    let mut rows = Vec::new();
    for &al in &ctx.cfg.aggregation_levels {
        for &regb_size in &ctx.cfg.regb_sizes {
            for &snr_db in &ctx.cfg.snr_points_db {
                let gammas: Vec<f64> = (0..ctx.cfg.n_trials)
                    .into_par_iter()
                    .map(|trial| {
                        run_trial(&ctx, al, regb_size, snr_db, trial).map(|r| r.gamma_eff)
                    })
                    .collect::<Result<Vec<f64>>>()?;
                rows.push(summarize(&ctx.cfg, al, regb_size, snr_db, &gammas));
            }
        }
    }
    Ok(rows)
}

/// [`run_sweep`] on a dedicated worker pool. `None` or `Some(0)` use the
/// global default.
pub fn run_sweep_with_workers(
    cfg: &ScenarioConfig,
    workers: Option<usize>,
) -> Result<Vec<SweepResultRow>> {
    match workers {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| LinkSimError::WorkerPool(e.to_string()))?;
            pool.install(|| run_sweep(cfg))
        }
        _ => run_sweep(cfg),
    }
}

/// Format with 6 significant digits, fixed-point.
fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (5 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Serialize rows to CSV with the exact [`CSV_HEADER`].
pub fn csv_string(rows: &[SweepResultRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.scenario,
            r.al,
            r.regb_size,
            fmt_sig6(r.snr_db),
            fmt_sig6(r.mean_eesm_db),
            fmt_sig6(r.linear_mean_eesm_db),
            fmt_sig6(r.stderr_db),
            r.n_trials,
            r.master_seed
        ));
    }
    out
}

/// Write rows to a CSV file.
pub fn write_csv_file(rows: &[SweepResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut f = std::fs::File::create(path).map_err(|source| LinkSimError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    f.write_all(csv_string(rows).as_bytes())
        .map_err(|source| LinkSimError::Io {
            path: path.to_path_buf(),
            source,
        })
}
