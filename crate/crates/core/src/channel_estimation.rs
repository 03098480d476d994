//! Per-bundle LS and MMSE channel estimation and pilot-SNR estimation.
//!
//! With unit-norm precoding, the covariance of the effective channel at
//! the bundle's DMRS subcarriers collapses to the scalar frequency
//! autocorrelation at the index differences, `R[u][v] = R(r_u - r_v)`.
//! The MMSE (Wiener) estimate is then
//!
//! ```text
//! h_mmse = R X^H (X R X^H + sigma^2 I)^{-1} y
//! ```
//!
//! realized as a Hermitian positive-definite solve. The per-pilot SNR
//! estimate divides the instantaneous estimate power by the bundle-average
//! residual power.

use crate::channel_model::{freq_autocorrelation, OfdmNumerology, PowerDelayProfile};
use crate::error::{LinkSimError, Result};
use crate::linalg::{self, C64, CMatrix};
use crate::signal_synthesis::DmrsObservation;

/// Ridge added to the inverted matrix when the noise variance underflows.
const NOISE_FLOOR: f64 = 1e-12;

/// Relative eigenvalue threshold separating signal and noise subspaces in
/// the projection noise estimator.
const SUBSPACE_THRESHOLD: f64 = 1e-3;

/// Residual-power floor in the SNR estimate denominator.
const RESIDUAL_FLOOR: f64 = 1e-12;

/// Channel correlation matrix of one bundle's DMRS subcarriers.
#[derive(Debug, Clone, PartialEq)]
pub struct RegbCorrelation {
    pub matrix: CMatrix,
}

impl RegbCorrelation {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// Build `R[u][v] = R(r_u - r_v)` from the closed-form autocorrelation.
pub fn build_regb_correlation(
    pdp: &PowerDelayProfile,
    num: &OfdmNumerology,
    dmrs_subcarriers: &[u32],
) -> RegbCorrelation {
    let d = dmrs_subcarriers.len();
    let mut matrix = CMatrix::zeros(d, d);
    for u in 0..d {
        for v in 0..d {
            let dk = dmrs_subcarriers[u] as i64 - dmrs_subcarriers[v] as i64;
            matrix[(u, v)] = freq_autocorrelation(pdp, num, dk);
        }
    }
    RegbCorrelation { matrix }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimationMethod {
    Ls,
    Mmse,
}

/// Channel estimate for one (bundle, rx antenna) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub estimate: Vec<C64>,
    pub method: EstimationMethod,
    /// Per-DMRS-subcarrier SNR estimates; filled by [`estimate_snr`].
    pub snr_estimates: Vec<f64>,
}

impl EstimationResult {
    pub fn with_snr(mut self, snr: Vec<f64>) -> Self {
        debug_assert_eq!(snr.len(), self.estimate.len());
        debug_assert!(snr.iter().all(|&g| g >= 0.0));
        self.snr_estimates = snr;
        self
    }
}

/// Least-squares estimate: pilot inversion, `h_ls = X^H y` for unit-modulus
/// pilots.
pub fn ls_estimate(obs: &DmrsObservation) -> EstimationResult {
    let estimate = obs
        .received
        .iter()
        .zip(&obs.pilots)
        .map(|(y, x)| y * x.conj() / x.norm_sqr())
        .collect();
    EstimationResult {
        estimate,
        method: EstimationMethod::Ls,
        snr_estimates: Vec::new(),
    }
}

/// Wiener solve with an explicit noise variance. Returns the estimate and
/// the innovation weights `w` satisfying `(X R X^H + sigma^2 I) w = y`.
pub fn wiener_solve(
    corr: &RegbCorrelation,
    pilots: &[C64],
    noise_variance: f64,
    received: &[C64],
) -> Result<(Vec<C64>, Vec<C64>)> {
    if noise_variance < 0.0 || !noise_variance.is_finite() {
        return Err(LinkSimError::NegativeNoiseVariance(noise_variance));
    }
    let d = corr.dim();
    assert_eq!(pilots.len(), d);
    assert_eq!(received.len(), d);
    let sigma2 = if noise_variance < NOISE_FLOOR {
        noise_variance + NOISE_FLOOR
    } else {
        noise_variance
    };
    // A = X R X^H + sigma^2 I, entrywise for diagonal X
    let mut a = CMatrix::zeros(d, d);
    for u in 0..d {
        for v in 0..d {
            a[(u, v)] = pilots[u] * corr.matrix[(u, v)] * pilots[v].conj();
        }
        a[(u, u)] += sigma2;
    }
    let w = linalg::solve_hermitian_pd(&a, received)?;
    // h = R X^H w
    let xhw: Vec<C64> = pilots.iter().zip(&w).map(|(x, wv)| x.conj() * wv).collect();
    let estimate = corr.matrix.mat_vec(&xhw);
    Ok((estimate, w))
}

/// MMSE estimate using the observation's own noise variance.
pub fn mmse_estimate(obs: &DmrsObservation, corr: &RegbCorrelation) -> Result<EstimationResult> {
    mmse_estimate_with_variance(obs, corr, obs.noise_variance)
}

/// MMSE estimate with an externally supplied (e.g. estimated) variance.
pub fn mmse_estimate_with_variance(
    obs: &DmrsObservation,
    corr: &RegbCorrelation,
    noise_variance: f64,
) -> Result<EstimationResult> {
    let (estimate, _w) = wiener_solve(corr, &obs.pilots, noise_variance, &obs.received)?;
    Ok(EstimationResult {
        estimate,
        method: EstimationMethod::Mmse,
        snr_estimates: Vec::new(),
    })
}

/// Noise-variance estimate from an LS estimate: project the LS vector on
/// the dominant eigen-subspace of the correlation matrix and attribute the
/// residual power outside that subspace to noise. Requires the correlation
/// to be rank deficient at the eigenvalue threshold.
pub fn estimate_noise_variance(
    ls: &EstimationResult,
    obs: &DmrsObservation,
    corr: &RegbCorrelation,
) -> Result<f64> {
    let d = corr.dim();
    debug_assert_eq!(ls.estimate.len(), d);
    debug_assert_eq!(obs.received.len(), d);
    let eig = linalg::hermitian_eigen(&corr.matrix)?;
    let max = eig.values.last().copied().unwrap_or(0.0);
    let rank = eig
        .values
        .iter()
        .filter(|&&v| v >= SUBSPACE_THRESHOLD * max)
        .count();
    if rank >= d {
        return Err(LinkSimError::NoNoiseSubspace);
    }
    // residual = (I - P) h_ls with P the dominant-subspace projector
    let mut residual = ls.estimate.clone();
    for k in (d - rank)..d {
        let vk = eig.vectors.column(k);
        let coeff: C64 = vk
            .iter()
            .zip(&ls.estimate)
            .map(|(v, h)| v.conj() * h)
            .sum();
        for (r, v) in residual.iter_mut().zip(&vk) {
            *r -= v * coeff;
        }
    }
    let residual_power: f64 = residual.iter().map(|z| z.norm_sqr()).sum();
    Ok(residual_power / (d - rank) as f64)
}

/// Per-pilot SNR estimate: instantaneous estimate power over the
/// bundle-averaged residual power, floored to avoid division by zero.
pub fn estimate_snr(obs: &DmrsObservation, est: &EstimationResult) -> Vec<f64> {
    let d = obs.dmrs_per_bundle();
    debug_assert_eq!(est.estimate.len(), d);
    let residual: f64 = obs
        .received
        .iter()
        .zip(&obs.pilots)
        .zip(&est.estimate)
        .map(|((y, x), h)| (y - x * h).norm_sqr())
        .sum::<f64>()
        / d as f64;
    let denom = residual.max(RESIDUAL_FLOOR);
    est.estimate.iter().map(|h| h.norm_sqr() / denom).collect()
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::resource_map::{allocate_pdcch, dmrs_pattern, CoresetConfig};
    use crate::rng::RngStream;
    use crate::signal_synthesis::{generate_dmrs, synthesize_observation};

    fn numerology() -> OfdmNumerology {
        OfdmNumerology::new(15e3, 2048).unwrap()
    }

    fn flat_pdp() -> PowerDelayProfile {
        PowerDelayProfile::new("flat", &[(0.0, 1.0)]).unwrap()
    }

    fn spread_pdp() -> PowerDelayProfile {
        PowerDelayProfile::new(
            "spread",
            &[
                (0.0, 0.3),
                (1.15e-7, 0.25),
                (3.8e-7, 0.2),
                (9.6e-7, 0.15),
                (2.1e-6, 0.1),
            ],
        )
        .unwrap()
    }

    fn observation(
        d: usize,
        corr: &RegbCorrelation,
        sigma2: f64,
        rng: &mut RngStream,
    ) -> DmrsObservation {
        // draw a channel with exactly the bundle statistics via the matrix
        // square root from the eigendecomposition
        let eig = linalg::hermitian_eigen(&corr.matrix).unwrap();
        let white: Vec<C64> = (0..d).map(|_| rng.complex_normal()).collect();
        let mut h = vec![C64::new(0.0, 0.0); d];
        for k in 0..d {
            let lambda = eig.values[k].max(0.0).sqrt();
            let vk = eig.vectors.column(k);
            for (hi, v) in h.iter_mut().zip(&vk) {
                *hi += v * (lambda * white[k]);
            }
        }
        let alloc = allocate_pdcch(
            &CoresetConfig::new(48, 1, (d / 3) as u32).unwrap(),
            1,
            0,
        )
        .unwrap();
        let x = generate_dmrs(&alloc, 0, rng).unwrap();
        synthesize_observation(0, 0, &h[..], &x[..d], sigma2, rng).unwrap()
    }

    #[test]
    fn correlation_single_tap_is_all_ones() {
        let corr = build_regb_correlation(&flat_pdp(), &numerology(), &dmrs_pattern(2).unwrap());
        for u in 0..6 {
            for v in 0..6 {
                assert!((corr.matrix[(u, v)] - C64::new(1.0, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn correlation_diagonal_is_unit() {
        let corr = build_regb_correlation(&spread_pdp(), &numerology(), &dmrs_pattern(6).unwrap());
        for u in 0..18 {
            assert!((corr.matrix[(u, u)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn correlation_matches_elementwise_oracle() {
        let num = numerology();
        let pdp = spread_pdp();
        let pattern = dmrs_pattern(3).unwrap();
        let corr = build_regb_correlation(&pdp, &num, &pattern);
        for u in 0..pattern.len() {
            for v in 0..pattern.len() {
                // brute-force re-evaluation of the closed form
                let dk = pattern[u] as f64 - pattern[v] as f64;
                let mut want = C64::new(0.0, 0.0);
                for tap in pdp.taps() {
                    let phase = -std::f64::consts::TAU * dk * num.subcarrier_spacing_hz * tap.delay_s;
                    want += tap.power * C64::new(phase.cos(), phase.sin());
                }
                assert!((corr.matrix[(u, v)] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn correlation_depends_only_on_index_differences() {
        // shifting all DMRS subcarriers by a constant leaves R unchanged
        let num = numerology();
        let pdp = spread_pdp();
        let pattern = dmrs_pattern(2).unwrap();
        let shifted: Vec<u32> = pattern.iter().map(|r| r + 240).collect();
        let a = build_regb_correlation(&pdp, &num, &pattern);
        let b = build_regb_correlation(&pdp, &num, &shifted);
        assert_eq!(a, b);
    }

    #[test]
    fn correlation_is_positive_semidefinite() {
        let num = numerology();
        for regb in [2u32, 3, 6] {
            let corr = build_regb_correlation(&spread_pdp(), &num, &dmrs_pattern(regb).unwrap());
            let eig = linalg::hermitian_eigen(&corr.matrix).unwrap();
            assert!(eig.values[0] >= -1e-9, "regb {regb}: {:?}", eig.values[0]);
        }
    }

    #[test]
    fn ls_recovers_noiseless_channel() {
        let mut rng = RngStream::from_seed(60);
        let corr = build_regb_correlation(&spread_pdp(), &numerology(), &dmrs_pattern(2).unwrap());
        let obs = observation(6, &corr, 0.0, &mut rng);
        let ls = ls_estimate(&obs);
        for j in 0..6 {
            assert!((ls.estimate[j] - obs.true_channel[j]).norm() < 1e-12);
        }
    }

    #[test]
    fn ls_of_zero_is_zero() {
        let obs = DmrsObservation {
            regb_position: 0,
            rx_antenna: 0,
            received: vec![C64::new(0.0, 0.0); 6],
            pilots: vec![C64::new(1.0, 0.0); 6],
            noise_variance: 1.0,
            true_channel: vec![C64::new(0.0, 0.0); 6],
        };
        let ls = ls_estimate(&obs);
        assert!(ls.estimate.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn ls_error_power_equals_noise_variance() {
        let mut rng = RngStream::from_seed(61);
        let corr = build_regb_correlation(&spread_pdp(), &numerology(), &dmrs_pattern(2).unwrap());
        let sigma2 = 0.42;
        let n = 100_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let obs = observation(6, &corr, sigma2, &mut rng);
            let ls = ls_estimate(&obs);
            acc += ls
                .estimate
                .iter()
                .zip(&obs.true_channel)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                / 6.0;
        }
        let emp = acc / n as f64;
        assert!((emp / sigma2 - 1.0).abs() < 0.02, "emp {emp}");
    }

    #[test]
    fn mmse_matches_ls_as_noise_vanishes() {
        // full-rank correlation: identity (white channel)
        let corr = RegbCorrelation {
            matrix: CMatrix::identity(6),
        };
        let mut rng = RngStream::from_seed(62);
        let obs = observation(6, &corr, 1e-12, &mut rng);
        let ls = ls_estimate(&obs);
        let mmse = mmse_estimate(&obs, &corr).unwrap();
        let max_diff = ls
            .estimate
            .iter()
            .zip(&mmse.estimate)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-6, "diff {max_diff}");
    }

    #[test]
    fn mmse_shrinks_to_zero_under_infinite_noise() {
        let corr = build_regb_correlation(&spread_pdp(), &numerology(), &dmrs_pattern(2).unwrap());
        let mut rng = RngStream::from_seed(63);
        let mut obs = observation(6, &corr, 1.0, &mut rng);
        obs.noise_variance = 1e12;
        let mmse = mmse_estimate(&obs, &corr).unwrap();
        let norm_h: f64 = mmse.estimate.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let norm_y: f64 = obs.received.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm_h < 1e-6 * norm_y);
    }

    #[test]
    fn mmse_matches_dense_oracle() {
        // independently coded dense Wiener solve via Gaussian elimination
        let num = numerology();
        let corr = build_regb_correlation(&spread_pdp(), &num, &dmrs_pattern(2).unwrap());
        let mut rng = RngStream::from_seed(64);
        let obs = observation(6, &corr, 0.3, &mut rng);
        let mmse = mmse_estimate(&obs, &corr).unwrap();
        let oracle = dense_wiener_oracle(&corr, &obs.pilots, 0.3, &obs.received);
        for j in 0..6 {
            assert!((mmse.estimate[j] - oracle[j]).norm() < 1e-10);
        }
    }

    #[test]
    fn mmse_satisfies_normal_equations() {
        let corr = build_regb_correlation(&spread_pdp(), &numerology(), &dmrs_pattern(6).unwrap());
        let mut rng = RngStream::from_seed(65);
        let obs = observation(18, &corr, 0.2, &mut rng);
        let (_h, w) = wiener_solve(&corr, &obs.pilots, obs.noise_variance, &obs.received).unwrap();
        let d = 18;
        let mut a = CMatrix::zeros(d, d);
        for u in 0..d {
            for v in 0..d {
                a[(u, v)] = obs.pilots[u] * corr.matrix[(u, v)] * obs.pilots[v].conj();
            }
            a[(u, u)] += obs.noise_variance;
        }
        let aw = a.mat_vec(&w);
        let res: f64 = aw
            .iter()
            .zip(&obs.received)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let norm_y: f64 = obs.received.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(res < 1e-9 * norm_y, "residual {res}");
    }

    #[test]
    fn mmse_beats_ls_in_mean_square_error() {
        let corr = build_regb_correlation(&spread_pdp(), &numerology(), &dmrs_pattern(2).unwrap());
        for sigma2 in [0.01, 0.1, 1.0, 10.0] {
            let mut rng = RngStream::from_seed(66);
            let n = 10_000;
            let (mut mse_ls, mut mse_mmse) = (0.0, 0.0);
            for _ in 0..n {
                let obs = observation(6, &corr, sigma2, &mut rng);
                let ls = ls_estimate(&obs);
                let mm = mmse_estimate(&obs, &corr).unwrap();
                mse_ls += error_power(&ls.estimate, &obs.true_channel);
                mse_mmse += error_power(&mm.estimate, &obs.true_channel);
            }
            assert!(
                mse_mmse <= mse_ls,
                "sigma2={sigma2}: mmse {mse_mmse} > ls {mse_ls}"
            );
        }
    }

    #[test]
    fn noise_estimate_zero_for_noiseless() {
        // rank-2 correlation with a clean eigen-gap: two equal taps
        let num = numerology();
        let pdp = PowerDelayProfile::new("two", &[(0.0, 0.5), (8e-7, 0.5)]).unwrap();
        let corr = build_regb_correlation(&pdp, &num, &dmrs_pattern(2).unwrap());
        let mut rng = RngStream::from_seed(67);
        let obs = observation(6, &corr, 0.0, &mut rng);
        let ls = ls_estimate(&obs);
        let est = estimate_noise_variance(&ls, &obs, &corr).unwrap();
        assert!(est.abs() < 1e-12, "est {est}");
    }

    #[test]
    fn noise_estimate_calibrated_on_single_tap() {
        let num = numerology();
        let corr = build_regb_correlation(&flat_pdp(), &num, &dmrs_pattern(2).unwrap());
        let sigma2 = 0.5;
        let mut rng = RngStream::from_seed(68);
        let n = 10_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let obs = observation(6, &corr, sigma2, &mut rng);
            let ls = ls_estimate(&obs);
            acc += estimate_noise_variance(&ls, &obs, &corr).unwrap();
        }
        let mean = acc / n as f64;
        assert!((mean / sigma2 - 1.0).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn noise_estimate_rejects_full_rank_correlation() {
        let corr = RegbCorrelation {
            matrix: CMatrix::identity(6),
        };
        let mut rng = RngStream::from_seed(69);
        let obs = observation(6, &corr, 0.1, &mut rng);
        let ls = ls_estimate(&obs);
        assert!(matches!(
            estimate_noise_variance(&ls, &obs, &corr),
            Err(LinkSimError::NoNoiseSubspace)
        ));
    }

    #[test]
    fn snr_estimate_converges_to_true_snr() {
        // perfect estimate, sigma^2 = 1, flat |h|^2 = 4: the pooled residual
        // power converges to sigma^2, so the SNR estimate converges to 4
        let alloc = allocate_pdcch(&CoresetConfig::new(48, 1, 2).unwrap(), 1, 0).unwrap();
        let mut rng = RngStream::from_seed(70);
        let h = vec![C64::new(2.0, 0.0); 6];
        let n = 10_000;
        let mut residual_acc = 0.0;
        for _ in 0..n {
            let x = generate_dmrs(&alloc, 0, &mut rng).unwrap();
            let obs = synthesize_observation(0, 0, &h, &x, 1.0, &mut rng).unwrap();
            let perfect = EstimationResult {
                estimate: h.clone(),
                method: EstimationMethod::Mmse,
                snr_estimates: Vec::new(),
            };
            let snrs = estimate_snr(&obs, &perfect);
            // back out the residual this draw used: gamma = 4 / residual
            residual_acc += 4.0 / snrs[0];
        }
        let mean_residual = residual_acc / n as f64;
        let gamma = 4.0 / mean_residual;
        assert!((gamma / 4.0 - 1.0).abs() < 0.05, "gamma {gamma}");
    }

    #[test]
    fn snr_estimate_zero_for_zero_estimate() {
        let mut rng = RngStream::from_seed(71);
        let corr = build_regb_correlation(&spread_pdp(), &numerology(), &dmrs_pattern(2).unwrap());
        let obs = observation(6, &corr, 0.5, &mut rng);
        let zero = EstimationResult {
            estimate: vec![C64::new(0.0, 0.0); 6],
            method: EstimationMethod::Ls,
            snr_estimates: Vec::new(),
        };
        assert!(estimate_snr(&obs, &zero).iter().all(|&g| g == 0.0));
    }

    #[test]
    fn snr_estimate_floors_noiseless_residual() {
        let alloc = allocate_pdcch(&CoresetConfig::new(48, 1, 2).unwrap(), 1, 0).unwrap();
        let mut rng = RngStream::from_seed(72);
        let h: Vec<C64> = (0..6).map(|_| rng.complex_normal()).collect();
        let x = generate_dmrs(&alloc, 0, &mut rng).unwrap();
        let obs = synthesize_observation(0, 0, &h, &x, 0.0, &mut rng).unwrap();
        let perfect = EstimationResult {
            estimate: h.clone(),
            method: EstimationMethod::Mmse,
            snr_estimates: Vec::new(),
        };
        let snrs = estimate_snr(&obs, &perfect);
        for (g, hv) in snrs.iter().zip(&h) {
            assert!(*g >= 1e12 * hv.norm_sqr() * 0.999);
        }
    }

    #[test]
    fn snr_estimate_invariant_to_pilot_phase() {
        // rotating pilots and received samples by a common phase leaves
        // the estimate-derived SNRs unchanged
        let corr = build_regb_correlation(&spread_pdp(), &numerology(), &dmrs_pattern(2).unwrap());
        let mut rng = RngStream::from_seed(73);
        let obs = observation(6, &corr, 0.3, &mut rng);
        let est = mmse_estimate(&obs, &corr).unwrap();
        let base = estimate_snr(&obs, &est);
        let phase = C64::from_polar(1.0, 1.234);
        let rotated = DmrsObservation {
            regb_position: obs.regb_position,
            rx_antenna: obs.rx_antenna,
            received: obs.received.iter().map(|y| y * phase).collect(),
            pilots: obs.pilots.iter().map(|x| x * phase).collect(),
            noise_variance: obs.noise_variance,
            true_channel: obs.true_channel.clone(),
        };
        let est_rot = mmse_estimate(&rotated, &corr).unwrap();
        let snrs_rot = estimate_snr(&rotated, &est_rot);
        for (a, b) in base.iter().zip(&snrs_rot) {
            assert!((a - b).abs() < 1e-9 * a.max(1.0));
        }
    }

    fn error_power(est: &[C64], truth: &[C64]) -> f64 {
        est.iter()
            .zip(truth)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum()
    }

    /// Independent dense Wiener oracle: build the full system and solve it
    /// with Gauss-Jordan elimination with partial pivoting.
    fn dense_wiener_oracle(
        corr: &RegbCorrelation,
        pilots: &[C64],
        sigma2: f64,
        received: &[C64],
    ) -> Vec<C64> {
        let d = corr.dim();
        let mut a = vec![vec![C64::new(0.0, 0.0); d + 1]; d];
        for u in 0..d {
            for v in 0..d {
                a[u][v] = pilots[u] * corr.matrix[(u, v)] * pilots[v].conj();
            }
            a[u][u] += sigma2;
            a[u][d] = received[u];
        }
        // forward elimination with partial pivoting
        for col in 0..d {
            let piv = (col..d)
                .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
                .unwrap();
            a.swap(col, piv);
            let diag = a[col][col];
            for k in col..=d {
                a[col][k] /= diag;
            }
            for row in 0..d {
                if row != col {
                    let f = a[row][col];
                    for k in col..=d {
                        let v = a[col][k];
                        a[row][k] -= f * v;
                    }
                }
            }
        }
        let w: Vec<C64> = (0..d).map(|u| a[u][d]).collect();
        // h = R X^H w
        let xhw: Vec<C64> = pilots.iter().zip(&w).map(|(x, wv)| x.conj() * wv).collect();
        corr.matrix.mat_vec(&xhw)
    }
}
