//! Tapped-delay-line channel statistics and random realizations.
//!
//! A power delay profile (PDP) lists taps as (delay, mean power) pairs with
//! the powers normalized to unit total. The frequency autocorrelation of
//! such a channel is available in closed form,
//!
//! ```text
//! R(dk) = E[h_k conj(h_{k-dk})] = sum_l p_l * exp(-j*2*pi*dk*tau_l / (K*t_s))
//! ```
//!
//! where `K` is the FFT size and `t_s` the sample duration, so `K*t_s` is
//! the inverse subcarrier spacing. Tap delays are kept as exact (possibly
//! fractional-sample) times; nothing is quantized to the sample grid.
//!
//! Realizations draw every tap of every (tx, rx) antenna pair as an
//! independent circular complex Gaussian with the tap's mean power.

use crate::error::{LinkSimError, Result};
use crate::linalg::C64;
use crate::rng::RngStream;
use std::f64::consts::TAU;
use std::io::Read;
use std::path::{Path, PathBuf};

/// One channel tap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    /// Absolute delay in seconds.
    pub delay_s: f64,
    /// Mean linear power after normalization.
    pub power: f64,
}

/// Normalized power delay profile.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    pub name: String,
    taps: Vec<Tap>,
}

impl PowerDelayProfile {
    /// Build a profile from (delay seconds, linear power) pairs. Taps are
    /// sorted by delay and powers are normalized to unit total.
    pub fn new(name: impl Into<String>, taps: &[(f64, f64)]) -> Result<Self> {
        let name = name.into();
        if taps.is_empty() {
            return Err(LinkSimError::PdpFormat {
                path: PathBuf::from(&name),
                reason: "profile has no taps".into(),
            });
        }
        let mut out = Vec::with_capacity(taps.len());
        let mut total = 0.0;
        for &(delay_s, power) in taps {
            if power <= 0.0 || !power.is_finite() {
                return Err(LinkSimError::PdpFormat {
                    path: PathBuf::from(&name),
                    reason: format!("non-positive tap power {power}"),
                });
            }
            if delay_s < 0.0 || !delay_s.is_finite() {
                return Err(LinkSimError::PdpFormat {
                    path: PathBuf::from(&name),
                    reason: format!("negative tap delay {delay_s}"),
                });
            }
            total += power;
            out.push(Tap { delay_s, power });
        }
        out.sort_by(|a, b| a.delay_s.total_cmp(&b.delay_s));
        for tap in &mut out {
            tap.power /= total;
        }
        Ok(PowerDelayProfile { name, taps: out })
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    pub fn n_taps(&self) -> usize {
        self.taps.len()
    }
}

/// OFDM sampling parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmNumerology {
    pub subcarrier_spacing_hz: f64,
    pub fft_size: usize,
    pub sample_rate_hz: f64,
    pub sample_duration_s: f64,
}

impl OfdmNumerology {
    pub fn new(subcarrier_spacing_hz: f64, fft_size: usize) -> Result<Self> {
        if !fft_size.is_power_of_two() {
            return Err(LinkSimError::InvalidNumerology(format!(
                "fft_size {fft_size} is not a power of two"
            )));
        }
        if subcarrier_spacing_hz <= 0.0 || !subcarrier_spacing_hz.is_finite() {
            return Err(LinkSimError::InvalidNumerology(format!(
                "subcarrier spacing {subcarrier_spacing_hz} Hz must be positive"
            )));
        }
        let sample_rate_hz = fft_size as f64 * subcarrier_spacing_hz;
        Ok(OfdmNumerology {
            subcarrier_spacing_hz,
            fft_size,
            sample_rate_hz,
            sample_duration_s: 1.0 / sample_rate_hz,
        })
    }
}

/// Closed-form frequency autocorrelation `R(dk)` of the channel at a
/// subcarrier separation of `delta_k`.
pub fn freq_autocorrelation(
    pdp: &PowerDelayProfile,
    num: &OfdmNumerology,
    delta_k: i64,
) -> C64 {
    // K * t_s = 1 / subcarrier spacing
    let rate = delta_k as f64 * num.subcarrier_spacing_hz;
    pdp.taps
        .iter()
        .map(|tap| C64::from_polar(tap.power, -TAU * rate * tap.delay_s))
        .sum()
}

/// One random draw of all tap coefficients for every antenna pair.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    n_tx: usize,
    n_rx: usize,
    /// Gains indexed `[(tx * n_rx + rx) * n_taps + tap]`.
    gains: Vec<C64>,
    /// Tap delays in seconds, shared by all antenna pairs.
    delays_s: Vec<f64>,
    subcarrier_spacing_hz: f64,
    fft_size: usize,
}

impl ChannelRealization {
    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_taps(&self) -> usize {
        self.delays_s.len()
    }

    /// Tap coefficients of one antenna pair.
    pub fn tap_gains(&self, tx: usize, rx: usize) -> Result<&[C64]> {
        if tx >= self.n_tx || rx >= self.n_rx {
            return Err(LinkSimError::IndexOutOfRange {
                what: "antenna pair",
                index: tx * self.n_rx + rx,
                limit: self.n_tx * self.n_rx,
            });
        }
        let n_taps = self.delays_s.len();
        let base = (tx * self.n_rx + rx) * n_taps;
        Ok(&self.gains[base..base + n_taps])
    }

    /// Complex channel frequency coefficient at a grid subcarrier.
    pub fn freq_response(&self, tx: usize, rx: usize, subcarrier: usize) -> Result<C64> {
        if tx >= self.n_tx {
            return Err(LinkSimError::IndexOutOfRange {
                what: "tx antenna",
                index: tx,
                limit: self.n_tx,
            });
        }
        if rx >= self.n_rx {
            return Err(LinkSimError::IndexOutOfRange {
                what: "rx antenna",
                index: rx,
                limit: self.n_rx,
            });
        }
        if subcarrier >= self.fft_size {
            return Err(LinkSimError::IndexOutOfRange {
                what: "subcarrier",
                index: subcarrier,
                limit: self.fft_size,
            });
        }
        let n_taps = self.delays_s.len();
        let base = (tx * self.n_rx + rx) * n_taps;
        let rate = subcarrier as f64 * self.subcarrier_spacing_hz;
        let mut sum = C64::new(0.0, 0.0);
        for (l, &delay) in self.delays_s.iter().enumerate() {
            sum += self.gains[base + l] * C64::from_polar(1.0, -TAU * rate * delay);
        }
        Ok(sum)
    }
}

/// Draw tap gains `a_l ~ CN(0, p_l)`, independently per antenna pair.
pub fn draw_realization(
    pdp: &PowerDelayProfile,
    num: &OfdmNumerology,
    n_tx: usize,
    n_rx: usize,
    rng: &mut RngStream,
) -> ChannelRealization {
    assert!(n_tx >= 1 && n_rx >= 1);
    let n_taps = pdp.n_taps();
    let mut gains = Vec::with_capacity(n_tx * n_rx * n_taps);
    for _tx in 0..n_tx {
        for _rx in 0..n_rx {
            for tap in pdp.taps() {
                gains.push(rng.complex_normal() * tap.power.sqrt());
            }
        }
    }
    ChannelRealization {
        n_tx,
        n_rx,
        gains,
        delays_s: pdp.taps().iter().map(|t| t.delay_s).collect(),
        subcarrier_spacing_hz: num.subcarrier_spacing_hz,
        fft_size: num.fft_size,
    }
}

/// Load a PDP from a text file.
///
/// Format: optional header lines `# name <label>` and
/// `# delay_scaling_ns <real>`, other `#` lines are comments, then one tap
/// per line as `<normalized_delay> <power_dB>`. Delays are multiplied by
/// the scaling factor (default 1 ns) on load; powers are converted from dB
/// and normalized to unit total.
pub fn load_pdp_file(path: impl AsRef<Path>) -> Result<PowerDelayProfile> {
    let path = path.as_ref();
    let mut text = String::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| LinkSimError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    parse_pdp(&text, path)
}

fn parse_pdp(text: &str, path: &Path) -> Result<PowerDelayProfile> {
    let bad = |line_no: usize, reason: String| LinkSimError::PdpFormat {
        path: path.to_path_buf(),
        reason: format!("line {line_no}: {reason}"),
    };
    let mut name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "pdp".into());
    let mut delay_scaling_ns = 1.0f64;
    let mut taps: Vec<(f64, f64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("name ") {
                name = v.trim().to_string();
            } else if let Some(v) = rest.strip_prefix("delay_scaling_ns ") {
                delay_scaling_ns = v.trim().parse().map_err(|_| {
                    bad(line_no, format!("bad delay_scaling_ns value '{}'", v.trim()))
                })?;
            }
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(d), Some(p)) = (fields.next(), fields.next()) else {
            return Err(bad(line_no, format!("expected '<delay> <power_dB>', got '{line}'")));
        };
        if fields.next().is_some() {
            return Err(bad(line_no, format!("trailing fields in '{line}'")));
        }
        let delay_norm: f64 = d
            .parse()
            .map_err(|_| bad(line_no, format!("bad delay '{d}'")))?;
        let power_db: f64 = p
            .parse()
            .map_err(|_| bad(line_no, format!("bad power '{p}'")))?;
        taps.push((
            delay_norm * delay_scaling_ns * 1e-9,
            crate::db_to_linear(power_db),
        ));
    }
    if taps.is_empty() {
        return Err(LinkSimError::PdpFormat {
            path: path.to_path_buf(),
            reason: "no tap lines found".into(),
        });
    }
    PowerDelayProfile::new(name, &taps)
}
