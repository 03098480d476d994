//! CORESET geometry and deterministic REG-bundle placement.
//!
//! A CCE is 6 REGs; with a bundle size of `regb_size` REGs it is split into
//! `6 / regb_size` bundles. Bundles of one CCE are spread over the CORESET
//! with maximal, even spacing: with `B = n_rb / regb_size` bundles in total
//! and a capacity of `C = n_rb / 6` CCEs, CCE `c` occupies bundle indices
//! `{ c + j*C : j = 0 .. 6/regb_size - 1 }`. The bundles of all `C` CCEs
//! tile the CORESET exactly.
//!
//! Every REG carries 3 DMRS subcarriers at 1-based positions {2, 6, 10}
//! within the REG, so a bundle has `D = 3 * regb_size` pilots.

use crate::error::{LinkSimError, Result};

/// Subcarriers in one resource block / REG.
pub const SUBCARRIERS_PER_RB: u32 = 12;

/// REGs per CCE (fixed by the channel structure).
pub const REGS_PER_CCE: u32 = 6;

/// Bundle sizes supported by the control channel.
pub const ALLOWED_REGB_SIZES: [u32; 3] = [2, 3, 6];

/// Aggregation levels supported by the control channel.
pub const ALLOWED_AGGREGATION_LEVELS: [u32; 4] = [1, 2, 4, 8];

/// Static CORESET geometry plus the configured REG-bundle size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoresetConfig {
    /// Resource blocks in the CORESET.
    pub n_rb: u32,
    /// OFDM symbols occupied by the CORESET (placement is defined for 1).
    pub n_symbols: u32,
    /// Subcarriers per resource block.
    pub subcarriers_per_rb: u32,
    /// REGs per REG bundle.
    pub regb_size: u32,
}

impl CoresetConfig {
    pub fn new(n_rb: u32, n_symbols: u32, regb_size: u32) -> Result<Self> {
        if !ALLOWED_REGB_SIZES.contains(&regb_size) {
            return Err(LinkSimError::InvalidRegbSize(regb_size));
        }
        if n_symbols != 1 {
            return Err(LinkSimError::UnsupportedCoresetDuration(n_symbols));
        }
        if n_rb == 0 || !n_rb.is_multiple_of(REGS_PER_CCE) {
            return Err(LinkSimError::config(format!(
                "n_rb: {n_rb} is not a positive multiple of {REGS_PER_CCE}"
            )));
        }
        // regb_size divides 6 and 6 divides n_rb, so bundles tile exactly
        debug_assert_eq!(n_rb % regb_size, 0);
        Ok(CoresetConfig {
            n_rb,
            n_symbols,
            subcarriers_per_rb: SUBCARRIERS_PER_RB,
            regb_size,
        })
    }

    /// Total REG bundles in the CORESET.
    pub fn n_bundles(&self) -> u32 {
        self.n_rb / self.regb_size
    }

    /// CCE capacity of the CORESET.
    pub fn cce_capacity(&self) -> u32 {
        self.n_rb / REGS_PER_CCE
    }

    /// Bundles forming one CCE.
    pub fn bundles_per_cce(&self) -> u32 {
        REGS_PER_CCE / self.regb_size
    }

    /// Whether a PDCCH of the given aggregation level fits at all.
    pub fn supports_aggregation_level(&self, aggregation_level: u32) -> bool {
        aggregation_level * REGS_PER_CCE <= self.n_rb * self.n_symbols
    }
}

/// Resource footprint of one PDCCH candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdcchAllocation {
    /// CCEs used by the PDCCH.
    pub aggregation_level: u32,
    /// The CCE indices, ascending.
    pub cce_indices: Vec<u32>,
    /// Occupied bundle indices, ascending. Bundle `b` covers resource
    /// blocks `b*regb_size .. (b+1)*regb_size` (0-based).
    pub regb_positions: Vec<u32>,
    /// DMRS subcarrier indices within each bundle, 1-based, strictly
    /// increasing. The same pattern applies to every bundle.
    pub dmrs_subcarriers: Vec<u32>,
    /// REGs per bundle, copied from the CORESET configuration.
    pub regb_size: u32,
}

impl PdcchAllocation {
    /// Number of REG bundles carrying this PDCCH.
    pub fn n_bundles(&self) -> usize {
        self.regb_positions.len()
    }

    /// DMRS subcarriers per bundle.
    pub fn dmrs_per_bundle(&self) -> usize {
        self.dmrs_subcarriers.len()
    }

    /// Absolute 0-based grid subcarriers of the DMRS in the `ordinal`-th
    /// occupied bundle. RB 1 of the CORESET maps to grid subcarrier 0.
    pub fn absolute_dmrs_subcarriers(&self, ordinal: usize) -> Result<Vec<u32>> {
        let bundle = *self.regb_positions.get(ordinal).ok_or({
            LinkSimError::IndexOutOfRange {
                what: "bundle",
                index: ordinal,
                limit: self.regb_positions.len(),
            }
        })?;
        let base = bundle * self.regb_size * SUBCARRIERS_PER_RB;
        Ok(self
            .dmrs_subcarriers
            .iter()
            .map(|r| base + r - 1)
            .collect())
    }

    /// 1-based resource blocks covered by the `ordinal`-th occupied bundle.
    pub fn bundle_rbs(&self, ordinal: usize) -> Result<Vec<u32>> {
        let bundle = *self.regb_positions.get(ordinal).ok_or({
            LinkSimError::IndexOutOfRange {
                what: "bundle",
                index: ordinal,
                limit: self.regb_positions.len(),
            }
        })?;
        Ok((0..self.regb_size)
            .map(|i| bundle * self.regb_size + i + 1)
            .collect())
    }
}

/// Bundle indices occupied by one CCE under the even-spread placement rule.
pub fn place_cce(config: &CoresetConfig, cce_index: u32) -> Result<Vec<u32>> {
    let capacity = config.cce_capacity();
    if cce_index >= capacity {
        return Err(LinkSimError::CceOutOfRange {
            cce: cce_index,
            capacity,
        });
    }
    Ok((0..config.bundles_per_cce())
        .map(|j| cce_index + j * capacity)
        .collect())
}

/// DMRS subcarrier pattern for a bundle: 1-based positions {2, 6, 10} in
/// each REG, shifted by 12 per REG.
pub fn dmrs_pattern(regb_size: u32) -> Result<Vec<u32>> {
    if !ALLOWED_REGB_SIZES.contains(&regb_size) {
        return Err(LinkSimError::InvalidRegbSize(regb_size));
    }
    let mut out = Vec::with_capacity(3 * regb_size as usize);
    for reg in 0..regb_size {
        for offset in [2u32, 6, 10] {
            out.push(reg * SUBCARRIERS_PER_RB + offset);
        }
    }
    Ok(out)
}

/// Place a PDCCH of the given aggregation level on consecutive CCEs
/// starting at `first_cce`.
pub fn allocate_pdcch(
    config: &CoresetConfig,
    aggregation_level: u32,
    first_cce: u32,
) -> Result<PdcchAllocation> {
    if !ALLOWED_AGGREGATION_LEVELS.contains(&aggregation_level) {
        return Err(LinkSimError::InvalidAggregationLevel(aggregation_level));
    }
    let capacity = config.cce_capacity();
    if first_cce + aggregation_level > capacity {
        return Err(LinkSimError::PdcchCapacity {
            first_cce,
            aggregation_level,
            capacity,
        });
    }
    let cce_indices: Vec<u32> = (first_cce..first_cce + aggregation_level).collect();
    let mut regb_positions = Vec::new();
    for &cce in &cce_indices {
        regb_positions.extend(place_cce(config, cce)?);
    }
    regb_positions.sort_unstable();
    debug_assert!(regb_positions.windows(2).all(|w| w[0] < w[1]));
    Ok(PdcchAllocation {
        aggregation_level,
        cce_indices,
        regb_positions,
        dmrs_subcarriers: dmrs_pattern(config.regb_size)?,
        regb_size: config.regb_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coreset(regb_size: u32) -> CoresetConfig {
        CoresetConfig::new(48, 1, regb_size).unwrap()
    }

    #[test]
    fn place_cce_single_bundle_for_size_six() {
        assert_eq!(place_cce(&coreset(6), 0).unwrap(), vec![0]);
    }

    #[test]
    fn place_cce_even_spread_size_two() {
        // B=24, C=8, three bundles per CCE
        assert_eq!(place_cce(&coreset(2), 0).unwrap(), vec![0, 8, 16]);
    }

    #[test]
    fn place_cce_even_spread_size_three() {
        // B=16, C=8, two bundles per CCE; bundle 5 = RBs 16..18, bundle 13 = RBs 40..42
        assert_eq!(place_cce(&coreset(3), 5).unwrap(), vec![5, 13]);
    }

    #[test]
    fn place_cce_rejects_out_of_range() {
        let err = place_cce(&coreset(2), 8).unwrap_err();
        assert!(err.to_string().contains("cce index exceeds CORESET capacity"));
    }

    #[test]
    fn allocate_full_coreset_at_al8() {
        let alloc = allocate_pdcch(&coreset(6), 8, 0).unwrap();
        assert_eq!(alloc.regb_positions, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn allocate_al1_size_two_spans_six_rbs() {
        let alloc = allocate_pdcch(&coreset(2), 1, 0).unwrap();
        assert_eq!(alloc.regb_positions, vec![0, 8, 16]);
        let rbs: usize = (0..alloc.n_bundles())
            .map(|m| alloc.bundle_rbs(m).unwrap().len())
            .sum();
        assert_eq!(rbs, 6);
    }

    #[test]
    fn allocate_al2_size_three() {
        let alloc = allocate_pdcch(&coreset(3), 2, 0).unwrap();
        assert_eq!(alloc.regb_positions, vec![0, 1, 8, 9]);
    }

    #[test]
    fn allocate_rejects_capacity_overflow() {
        assert!(allocate_pdcch(&coreset(2), 8, 1).is_err());
        assert!(allocate_pdcch(&coreset(2), 4, 5).is_err());
    }

    #[test]
    fn allocate_rejects_bad_aggregation_level() {
        assert!(matches!(
            allocate_pdcch(&coreset(2), 3, 0),
            Err(LinkSimError::InvalidAggregationLevel(3))
        ));
    }

    #[test]
    fn dmrs_pattern_size_two() {
        assert_eq!(dmrs_pattern(2).unwrap(), vec![2, 6, 10, 14, 18, 22]);
    }

    #[test]
    fn dmrs_pattern_size_six_ends() {
        let p = dmrs_pattern(6).unwrap();
        assert_eq!(p.len(), 18);
        assert_eq!(&p[..3], &[2, 6, 10]);
        assert_eq!(&p[15..], &[62, 66, 70]);
    }

    #[test]
    fn dmrs_pattern_density_and_bounds() {
        for size in ALLOWED_REGB_SIZES {
            let p = dmrs_pattern(size).unwrap();
            assert_eq!(p.len(), 3 * size as usize);
            assert!(p.windows(2).all(|w| w[0] < w[1]));
            assert!(p.iter().all(|&r| (1..=12 * size).contains(&r)));
        }
        assert!(dmrs_pattern(4).is_err());
    }

    #[test]
    fn bundles_of_all_cces_tile_the_coreset() {
        for size in ALLOWED_REGB_SIZES {
            let cfg = coreset(size);
            let mut seen = vec![0u32; cfg.n_bundles() as usize];
            for cce in 0..cfg.cce_capacity() {
                for b in place_cce(&cfg, cce).unwrap() {
                    seen[b as usize] += 1;
                }
            }
            assert!(seen.iter().all(|&c| c == 1), "regb_size {size}");
        }
    }

    #[test]
    fn no_bundle_straddles_boost_boundaries() {
        // shipped scenarios boost RBs [1:12] or [1:24]
        for size in ALLOWED_REGB_SIZES {
            let cfg = coreset(size);
            for boundary in [12u32, 24] {
                for bundle in 0..cfg.n_bundles() {
                    let first_rb = bundle * size + 1;
                    let last_rb = (bundle + 1) * size;
                    assert!(
                        last_rb <= boundary || first_rb > boundary,
                        "regb_size {size} bundle {bundle} straddles RB {boundary}"
                    );
                }
            }
        }
    }

    #[test]
    fn dmrs_count_per_pdcch_is_18_per_cce() {
        for size in ALLOWED_REGB_SIZES {
            for al in ALLOWED_AGGREGATION_LEVELS {
                let alloc = allocate_pdcch(&coreset(size), al, 0).unwrap();
                let total = alloc.n_bundles() * alloc.dmrs_per_bundle();
                assert_eq!(total as u32, 18 * al);
            }
        }
    }

    #[test]
    fn allocation_is_deterministic() {
        let a = allocate_pdcch(&coreset(3), 4, 1).unwrap();
        let b = allocate_pdcch(&coreset(3), 4, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn absolute_dmrs_mapping() {
        let alloc = allocate_pdcch(&coreset(2), 1, 0).unwrap();
        // bundle ordinal 1 is bundle index 8, covering RBs 17..18,
        // so its grid subcarriers start at 8*2*12 = 192
        let abs = alloc.absolute_dmrs_subcarriers(1).unwrap();
        assert_eq!(abs, vec![193, 197, 201, 205, 209, 213]);
        assert!(alloc.absolute_dmrs_subcarriers(3).is_err());
    }

    #[test]
    fn coreset_rejects_multi_symbol() {
        assert!(matches!(
            CoresetConfig::new(48, 2, 2),
            Err(LinkSimError::UnsupportedCoresetDuration(2))
        ));
    }
}
