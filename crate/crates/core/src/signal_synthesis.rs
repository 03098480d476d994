//! Pilot transmission through the channel.
//!
//! Each REG bundle is precoded with its own random unit-norm vector, the
//! DMRS pilots are unit-modulus QPSK symbols, and the received pilot vector
//! per (bundle, rx antenna) is `y = X h + z` where `h` is the precoded
//! effective channel at the bundle's DMRS subcarriers. Interference from
//! neighbour cells enters purely as per-RB extra noise variance.

use crate::channel_model::ChannelRealization;
use crate::error::{LinkSimError, Result};
use crate::linalg::C64;
use crate::resource_map::PdcchAllocation;
use crate::rng::RngStream;
use std::f64::consts::FRAC_1_SQRT_2;

/// Per-bundle precoding vectors, each unit-norm of length `n_tx`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderSchedule {
    vectors: Vec<Vec<C64>>,
}

impl PrecoderSchedule {
    pub fn n_bundles(&self) -> usize {
        self.vectors.len()
    }

    pub fn precoder(&self, bundle_ordinal: usize) -> Result<&[C64]> {
        self.vectors
            .get(bundle_ordinal)
            .map(|v| v.as_slice())
            .ok_or(LinkSimError::IndexOutOfRange {
                what: "bundle",
                index: bundle_ordinal,
                limit: self.vectors.len(),
            })
    }
}

/// Draw one isotropic unit-norm precoder per bundle (CN(0, I) normalized).
pub fn draw_precoders(n_bundles: usize, n_tx: usize, rng: &mut RngStream) -> PrecoderSchedule {
    assert!(n_tx >= 1);
    let vectors = (0..n_bundles)
        .map(|_| loop {
            let v: Vec<C64> = (0..n_tx).map(|_| rng.complex_normal()).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            // a zero draw has probability zero but would break the invariant
            if norm > 0.0 {
                break v.into_iter().map(|z| z / norm).collect::<Vec<_>>();
            }
        })
        .collect();
    PrecoderSchedule { vectors }
}

/// Per-RB noise-plus-interference variances over the CORESET.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceProfile {
    /// Variance per RB; index 0 is RB 1.
    variances: Vec<f64>,
    pub base_variance: f64,
    pub boosted_rbs: Vec<u32>,
    pub boost_db: f64,
}

impl InterferenceProfile {
    /// Variance of a 1-based RB index.
    pub fn rb_variance(&self, rb: u32) -> Result<f64> {
        if rb == 0 || rb as usize > self.variances.len() {
            return Err(LinkSimError::IndexOutOfRange {
                what: "resource block",
                index: rb as usize,
                limit: self.variances.len(),
            });
        }
        Ok(self.variances[rb as usize - 1])
    }

    /// Common noise variance across the RBs of the `ordinal`-th bundle of
    /// an allocation. The shipped scenarios keep whole bundles on one side
    /// of the boost boundary; a bundle mixing variances is rejected.
    pub fn bundle_variance(&self, alloc: &PdcchAllocation, ordinal: usize) -> Result<f64> {
        let rbs = alloc.bundle_rbs(ordinal)?;
        let first = self.rb_variance(rbs[0])?;
        for &rb in &rbs[1..] {
            if self.rb_variance(rb)? != first {
                return Err(LinkSimError::HeterogeneousBundleNoise(
                    alloc.regb_positions[ordinal],
                ));
            }
        }
        Ok(first)
    }
}

/// Build a profile with `base_variance` everywhere and `boost_db` extra
/// noise on the listed 1-based RBs.
pub fn build_interference_profile(
    n_rb: u32,
    base_variance: f64,
    boosted_rbs: &[u32],
    boost_db: f64,
) -> Result<InterferenceProfile> {
    if base_variance <= 0.0 || !base_variance.is_finite() {
        return Err(LinkSimError::InterferenceProfile(format!(
            "base variance {base_variance} must be positive"
        )));
    }
    let mut variances = vec![base_variance; n_rb as usize];
    let boost = crate::db_to_linear(boost_db);
    for &rb in boosted_rbs {
        if rb == 0 || rb > n_rb {
            return Err(LinkSimError::InterferenceProfile(format!(
                "boosted RB {rb} outside [1:{n_rb}]"
            )));
        }
        variances[rb as usize - 1] = base_variance * boost;
    }
    Ok(InterferenceProfile {
        variances,
        base_variance,
        boosted_rbs: boosted_rbs.to_vec(),
        boost_db,
    })
}

/// Received pilots of one (bundle, rx antenna) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DmrsObservation {
    /// Bundle index within the CORESET.
    pub regb_position: u32,
    pub rx_antenna: usize,
    /// Received vector, length D.
    pub received: Vec<C64>,
    /// Diagonal of the pilot matrix, unit-modulus entries.
    pub pilots: Vec<C64>,
    /// Noise variance per entry.
    pub noise_variance: f64,
    /// True effective channel, retained for genie diagnostics only.
    pub true_channel: Vec<C64>,
}

impl DmrsObservation {
    pub fn dmrs_per_bundle(&self) -> usize {
        self.received.len()
    }
}

/// Effective precoded channel of one bundle at one rx antenna: the channel
/// frequency response at the bundle's DMRS subcarriers, combined across tx
/// antennas by the bundle's precoder.
pub fn effective_channel(
    realization: &ChannelRealization,
    alloc: &PdcchAllocation,
    schedule: &PrecoderSchedule,
    bundle_ordinal: usize,
    rx: usize,
) -> Result<Vec<C64>> {
    let precoder = schedule.precoder(bundle_ordinal)?;
    let subcarriers = alloc.absolute_dmrs_subcarriers(bundle_ordinal)?;
    let mut out = Vec::with_capacity(subcarriers.len());
    for &sc in &subcarriers {
        let mut v = C64::new(0.0, 0.0);
        for (tx, g) in precoder.iter().enumerate() {
            v += realization.freq_response(tx, rx, sc as usize)? * g;
        }
        out.push(v);
    }
    Ok(out)
}

/// Random QPSK pilot diagonal for one bundle, entries in {(+-1 +-j)/sqrt(2)}.
pub fn generate_dmrs(
    alloc: &PdcchAllocation,
    bundle_ordinal: usize,
    rng: &mut RngStream,
) -> Result<Vec<C64>> {
    if bundle_ordinal >= alloc.n_bundles() {
        return Err(LinkSimError::IndexOutOfRange {
            what: "bundle",
            index: bundle_ordinal,
            limit: alloc.n_bundles(),
        });
    }
    Ok((0..alloc.dmrs_per_bundle())
        .map(|_| {
            let bits = rng.next_u64();
            let re = if bits & 1 == 0 { 1.0 } else { -1.0 };
            let im = if bits & 2 == 0 { 1.0 } else { -1.0 };
            C64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
        })
        .collect())
}

/// Received pilot vector `y = X h + z` with white circular noise.
pub fn synthesize_observation(
    regb_position: u32,
    rx_antenna: usize,
    effective: &[C64],
    pilots: &[C64],
    noise_variance: f64,
    rng: &mut RngStream,
) -> Result<DmrsObservation> {
    let per_re = vec![noise_variance; effective.len()];
    synthesize_observation_per_re(regb_position, rx_antenna, effective, pilots, &per_re, rng)
}

/// Per-RE diagonal noise variant; the scalar path goes through here.
fn synthesize_observation_per_re(
    regb_position: u32,
    rx_antenna: usize,
    effective: &[C64],
    pilots: &[C64],
    noise_variances: &[f64],
    rng: &mut RngStream,
) -> Result<DmrsObservation> {
    assert_eq!(effective.len(), pilots.len());
    assert_eq!(effective.len(), noise_variances.len());
    for &v in noise_variances {
        if v < 0.0 || !v.is_finite() {
            return Err(LinkSimError::NegativeNoiseVariance(v));
        }
    }
    let received: Vec<C64> = effective
        .iter()
        .zip(pilots)
        .zip(noise_variances)
        .map(|((h, x), v)| x * h + rng.complex_normal() * v.sqrt())
        .collect();
    let noise_variance = noise_variances[0];
    Ok(DmrsObservation {
        regb_position,
        rx_antenna,
        received,
        pilots: pilots.to_vec(),
        noise_variance,
        true_channel: effective.to_vec(),
    })
}
