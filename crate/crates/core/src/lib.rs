//! Link-level Monte Carlo simulator for distributed 5G NR PDCCH.
//!
//! The physical downlink control channel can bundle 2, 3 or 6 consecutive
//! REGs (one REG = 12 subcarriers in one OFDM symbol) under a common
//! precoder. Larger bundles give the receiver more pilots per coherent
//! segment and therefore better MMSE channel estimates; smaller bundles
//! spread the same payload over more distinct chunks of the CORESET and
//! therefore collect more frequency diversity. This crate quantifies that
//! trade-off:
//!
//! 1. [`resource_map`] places the REG bundles of a PDCCH in the CORESET
//!    and attaches the DMRS pilot pattern.
//! 2. [`channel_model`] draws tapped-delay-line channel realizations and
//!    evaluates the closed-form frequency autocorrelation.
//! 3. [`signal_synthesis`] precodes the pilots through the channel and adds
//!    scenario-dependent noise/interference per bundle.
//! 4. [`channel_estimation`] runs LS/MMSE estimation per bundle and derives
//!    per-pilot SNR estimates from the estimate and its residual.
//! 5. [`link_abstraction`] combines SNRs across receive antennas and
//!    compresses the per-pilot SNRs of the whole PDCCH into one effective
//!    SNR (EESM).
//! 6. [`sim_harness`] sweeps {aggregation level} x {bundle size} x {SNR}
//!    with deterministic per-trial random streams and writes CSV.
//!
//! The `linksim` binary (see [`cli`]) exposes sweeps and a canned
//! three-scenario comparison preset on the command line.

pub mod channel_estimation;
pub mod channel_model;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod link_abstraction;
pub mod resource_map;
pub mod rng;
pub mod signal_synthesis;
pub mod sim_harness;

pub use error::{LinkSimError, Result};
pub use linalg::C64;

/// Convert a decibel power value to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Convert a linear power value to decibels.
pub fn linear_to_db(p: f64) -> f64 {
    10.0 * p.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_round_trip() {
        assert!((db_to_linear(3.0) - 1.995_262_314_968_879_6).abs() < 1e-12);
        assert!((linear_to_db(db_to_linear(-7.3)) + 7.3).abs() < 1e-12);
        assert_eq!(db_to_linear(0.0), 1.0);
    }
}
