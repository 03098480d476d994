//! Receive combining and effective-SNR mapping.
//!
//! Per-pilot SNRs add across receive antennas (maximum-ratio combining).
//! The SNR collection of the whole PDCCH is compressed into one effective
//! SNR via the exponential map
//!
//! ```text
//! g_eff = -lambda * ln( (1/N) * sum_i exp(-g_i / lambda) )
//! ```
//!
//! evaluated in log-sum-exp form so that large SNRs cannot overflow. The
//! map is bounded by the smallest and largest entry and approaches the
//! minimum as lambda goes to 0 and the arithmetic mean as lambda grows.

use crate::error::{LinkSimError, Result};

/// Combined per-pilot SNRs of one PDCCH: one entry per (bundle, DMRS
/// subcarrier), bundle-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrGrid {
    values: Vec<f64>,
    n_bundles: usize,
    dmrs_per_bundle: usize,
}

impl SnrGrid {
    pub fn from_values(n_bundles: usize, dmrs_per_bundle: usize, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(LinkSimError::EmptySnrGrid);
        }
        if values.len() != n_bundles * dmrs_per_bundle {
            return Err(LinkSimError::SnrGridShape(format!(
                "{} bundles x {} pilots != {} values",
                n_bundles,
                dmrs_per_bundle,
                values.len()
            )));
        }
        if let Some(&bad) = values.iter().find(|&&g| g < 0.0 || g.is_nan()) {
            return Err(LinkSimError::NegativeSnr(bad));
        }
        Ok(SnrGrid {
            values,
            n_bundles,
            dmrs_per_bundle,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_bundles(&self) -> usize {
        self.n_bundles
    }

    pub fn dmrs_per_bundle(&self) -> usize {
        self.dmrs_per_bundle
    }

    /// Total DMRS subcarriers of the PDCCH.
    pub fn n_rs(&self) -> usize {
        self.values.len()
    }
}

/// One trial's effective SNR plus the sweep coordinates it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct EesmRecord {
    /// Effective SNR, linear.
    pub gamma_eff: f64,
    pub lambda: f64,
    pub scenario: String,
    pub aggregation_level: u32,
    pub regb_size: u32,
    pub snr_db: f64,
    pub trial_index: u64,
    pub master_seed: u64,
}

/// Maximum-ratio combining: per-pilot SNRs add across receive antennas.
pub fn combine_mrc(per_antenna_snrs: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for &g in per_antenna_snrs {
        if g < 0.0 || g.is_nan() {
            return Err(LinkSimError::NegativeSnr(g));
        }
        sum += g;
    }
    Ok(sum)
}

/// Effective SNR of the grid under the exponential map.
pub fn eesm(grid: &SnrGrid, lambda: f64) -> Result<f64> {
    if lambda <= 0.0 || !lambda.is_finite() {
        return Err(LinkSimError::NonPositiveLambda(lambda));
    }
    let values = grid.values();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    // log-sum-exp around the minimum: each exponent is <= 0, the minimum
    // contributes exactly 1, so the sum lies in [1, N]
    let sum: f64 = values.iter().map(|g| (-(g - min) / lambda).exp()).sum();
    Ok(min - lambda * (sum / values.len() as f64).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn grid(values: Vec<f64>) -> SnrGrid {
        let n = values.len();
        SnrGrid::from_values(1, n, values).unwrap()
    }

    #[test]
    fn grid_shape_checks() {
        assert!(matches!(
            SnrGrid::from_values(1, 0, vec![]),
            Err(LinkSimError::EmptySnrGrid)
        ));
        assert!(SnrGrid::from_values(2, 3, vec![1.0; 5]).is_err());
        assert!(SnrGrid::from_values(1, 2, vec![1.0, -0.5]).is_err());
        let g = SnrGrid::from_values(2, 3, vec![1.0; 6]).unwrap();
        assert_eq!(g.n_rs(), 6);
    }

    #[test]
    fn mrc_sums_antennas() {
        assert_eq!(combine_mrc(&[1.5]).unwrap(), 1.5);
        assert_eq!(combine_mrc(&[2.0, 2.0]).unwrap(), 4.0);
        assert_eq!(combine_mrc(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!(combine_mrc(&[1.0, -0.1]).is_err());
    }

    #[test]
    fn eesm_identity_on_constant_grid() {
        for lambda in [0.25, 1.0, 7.0] {
            let g = eesm(&grid(vec![3.7; 12]), lambda).unwrap();
            assert_eq!(g, 3.7);
        }
    }

    #[test]
    fn eesm_two_point_value() {
        // -ln((e^-1 + e^-3)/2), evaluated independently
        let want = -(((-1.0f64).exp() + (-3.0f64).exp()) / 2.0).ln();
        let got = eesm(&grid(vec![1.0, 3.0]), 1.0).unwrap();
        assert!((got - want).abs() < 1e-12);
        assert!((got - 1.5662).abs() < 1e-4);
    }

    #[test]
    fn eesm_penalizes_weak_entries() {
        let want = -(((-0.1f64).exp() + (-100.0f64).exp()) / 2.0).ln();
        let got = eesm(&grid(vec![0.1, 100.0]), 1.0).unwrap();
        assert!((got - want).abs() < 1e-12);
        // close to 0.1 + ln(2): the strong entry contributes nothing
        assert!((got - 0.793147).abs() < 1e-4);
        // far below the arithmetic mean
        assert!(got < 1.0 && 50.05 - got > 49.0);
    }

    #[test]
    fn eesm_rejects_bad_lambda() {
        assert!(eesm(&grid(vec![1.0]), 0.0).is_err());
        assert!(eesm(&grid(vec![1.0]), -1.0).is_err());
    }

    #[test]
    fn eesm_survives_huge_snrs() {
        // would overflow a naive implementation
        let g = eesm(&grid(vec![1e15, 2e15, 3e15]), 1.0).unwrap();
        assert!(g.is_finite());
        assert!((1e15..=3e15).contains(&g));
    }

    #[test]
    fn eesm_properties_random_grids() {
        let mut rng = RngStream::from_seed(314);
        for _ in 0..10_000 {
            let n = 2 + (rng.next_u64() % 143) as usize;
            let values: Vec<f64> = (0..n).map(|_| rng.uniform() * 100.0).collect();
            let g = grid(values.clone());
            let eff = eesm(&g, 1.0).unwrap();
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(eff >= min - 1e-12 && eff <= max + 1e-12);

            // permutation invariance
            let mut shuffled = values.clone();
            shuffled.reverse();
            shuffled.swap(0, n / 2);
            let eff_shuffled = eesm(&grid(shuffled), 1.0).unwrap();
            assert!((eff - eff_shuffled).abs() <= 1e-12 * eff.abs().max(1.0));
        }
    }

    #[test]
    fn eesm_strictly_increasing_per_entry() {
        // keep the spread below ~20*lambda so the weakest entry's weight
        // stays resolvable in double precision
        let mut rng = RngStream::from_seed(315);
        for _ in 0..10_000 {
            let n = 2 + (rng.next_u64() % 143) as usize;
            let values: Vec<f64> = (0..n).map(|_| rng.uniform() * 20.0).collect();
            let eff = eesm(&grid(values.clone()), 1.0).unwrap();
            let mut bumped = values.clone();
            let idx = (rng.next_u64() % n as u64) as usize;
            bumped[idx] += 3.0;
            let eff_bumped = eesm(&grid(bumped), 1.0).unwrap();
            assert!(eff_bumped > eff, "n={n} idx={idx}");
        }
    }

    #[test]
    fn eesm_lambda_limits() {
        let mut rng = RngStream::from_seed(2718);
        for _ in 0..1_000 {
            let n = 2 + (rng.next_u64() % 34) as usize;
            // well-separated grids: offset consecutive draws
            let values: Vec<f64> = (0..n)
                .map(|i| 0.5 + i as f64 * 0.05 + rng.uniform() * 0.04)
                .collect();
            let g = grid(values.clone());
            let mean = values.iter().sum::<f64>() / n as f64;
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let near_mean = eesm(&g, 1e6).unwrap();
            assert!(
                (near_mean - mean).abs() <= 1e-3 * mean,
                "mean limit: {near_mean} vs {mean}"
            );
            let near_min = eesm(&g, 1e-6).unwrap();
            assert!(
                (near_min - min).abs() <= 1e-3 * min.abs().max(1e-6),
                "min limit: {near_min} vs {min}"
            );
        }
    }
}
