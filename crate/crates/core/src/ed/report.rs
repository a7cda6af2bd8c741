//! Bundled fragmentation diagnostics and the CSV/JSON emitters.

use std::io::Write;

use serde::Serialize;

use super::basis::SectorBasis;
use super::floquet::floquet_operator;
use super::spectrum::{quasispectrum, QuasiSpectrum};
use super::stats::{spacing_ratios, SpacingStats};
use super::EdError;
use crate::ca::{enumerate_frozen, make_rule_table, ModelKind, DEFAULT_SECTOR_GUARD};
use crate::lattice::{build_chain, Boundary};
use crate::pairdyn::DriveParams;

/// Cross-module fragmentation summary for one chain sector.
#[derive(Debug, Clone, Serialize)]
pub struct FragmentationReport {
    pub n: usize,
    pub k: usize,
    pub v: f64,
    pub tau: f64,
    pub boundary: Boundary,
    pub dim: usize,
    pub ca_frozen_count: usize,
    pub ed_frozen_count: usize,
    pub frozen_counts_agree: bool,
    /// Frozen states missing from either census (bitstrings), for forensics.
    pub census_mismatches: Vec<String>,
    pub max_frozen_entropy: f64,
    pub mean_nonfrozen_entropy: Option<f64>,
    pub spacing: Option<SpacingStats>,
    /// Dimension of the non-frozen (quantum) block.
    pub quantum_block_dim: usize,
    /// Per-eigenstate scatter data: (quasienergy, entropy, frozen flag).
    pub eigenstates: Vec<(f64, f64, bool)>,
}

/// Runs ED and the CA census on one chain sector and bundles the comparison.
pub fn fragmentation_report(
    n: usize,
    k: usize,
    v: f64,
    tau: f64,
    boundary: Boundary,
) -> Result<FragmentationReport, EdError> {
    let basis = SectorBasis::new(n, k)?;
    let op = floquet_operator(&basis, v, tau, boundary, None)?;
    let spec = quasispectrum(&op, &basis, None)?;

    let (lattice, schedule) = build_chain(n, boundary).expect("chain construction");
    let params = DriveParams::new(v, tau);
    let rules = make_rule_table(ModelKind::NnChain, &params, 1e-9);
    let ca_frozen = enumerate_frozen(&lattice, &schedule, &rules, k, DEFAULT_SECTOR_GUARD)
        .map_err(|e| EdError::SectorTooLarge {
            dim: basis.dim() as u128,
            max: match e {
                crate::ca::CaError::SectorTooLarge { max, .. } => max,
                _ => 0,
            },
        })?;

    let mut ed_frozen = spec.census.clone();
    ed_frozen.sort_unstable();
    let mut ca_sorted = ca_frozen.clone();
    ca_sorted.sort_unstable();
    let census_mismatches: Vec<String> = ca_sorted
        .iter()
        .filter(|s| !ed_frozen.contains(s))
        .chain(ed_frozen.iter().filter(|s| !ca_sorted.contains(s)))
        .map(|s| s.to_bitstring())
        .collect();

    let max_frozen_entropy = spec
        .entropies
        .iter()
        .zip(&spec.frozen)
        .filter(|&(_, &f)| f)
        .map(|(&s, _)| s)
        .fold(0.0, f64::max);
    let nonfrozen: Vec<f64> = spec
        .entropies
        .iter()
        .zip(&spec.frozen)
        .filter(|&(_, &f)| !f)
        .map(|(&s, _)| s)
        .collect();
    let mean_nonfrozen_entropy = if nonfrozen.is_empty() {
        None
    } else {
        Some(nonfrozen.iter().sum::<f64>() / nonfrozen.len() as f64)
    };
    let spacing = spacing_ratios(&spec, true).ok();
    let quantum_block_dim = nonfrozen.len();
    let eigenstates = spec
        .quasienergies
        .iter()
        .zip(&spec.entropies)
        .zip(&spec.frozen)
        .map(|((&e, &s), &f)| (e, s, f))
        .collect();

    Ok(FragmentationReport {
        n,
        k,
        v,
        tau,
        boundary,
        dim: basis.dim(),
        ca_frozen_count: ca_sorted.len(),
        ed_frozen_count: ed_frozen.len(),
        frozen_counts_agree: ca_sorted == ed_frozen,
        census_mismatches,
        max_frozen_entropy,
        mean_nonfrozen_entropy,
        spacing,
        quantum_block_dim,
        eigenstates,
    })
}

/// Writes the per-eigenstate table: `index,quasienergy,entropy,frozen`.
pub fn write_eigenstate_csv<W: Write>(out: &mut W, spec: &QuasiSpectrum) -> std::io::Result<()> {
    writeln!(out, "index,quasienergy,entropy,frozen")?;
    for (i, ((&e, &s), &f)) in spec
        .quasienergies
        .iter()
        .zip(&spec.entropies)
        .zip(&spec.frozen)
        .enumerate()
    {
        writeln!(out, "{},{:.12e},{:.12e},{}", i, e, s, u8::from(f))?;
    }
    Ok(())
}

/// Writes the spacing-ratio list, one `r` per row.
pub fn write_ratio_csv<W: Write>(out: &mut W, stats: &SpacingStats) -> std::io::Result<()> {
    writeln!(out, "r")?;
    for &r in &stats.ratios {
        writeln!(out, "{:.12e}", r)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn small_sector_report_is_consistent() {
        let r = fragmentation_report(8, 4, 12f64.sqrt(), PI / 2.0, Boundary::Open).unwrap();
        assert_eq!(r.dim, 70);
        assert!(r.frozen_counts_agree, "mismatches: {:?}", r.census_mismatches);
        assert!(r.ca_frozen_count >= 2);
        assert!(r.max_frozen_entropy < 1e-8);
        assert_eq!(r.quantum_block_dim + r.ed_frozen_count, r.dim);
    }

    #[test]
    fn empty_sector_report() {
        let r = fragmentation_report(6, 0, 1.0, 1.0, Boundary::Open).unwrap();
        assert_eq!(r.dim, 1);
        assert_eq!(r.ed_frozen_count, 1);
        assert!(r.spacing.is_none());
    }

    #[test]
    fn frozen_count_grows_with_system_size() {
        let counts: Vec<usize> = [(8, 4), (10, 5), (12, 6)]
            .iter()
            .map(|&(n, k)| {
                fragmentation_report(n, k, 12f64.sqrt(), PI / 2.0, Boundary::Open)
                    .unwrap()
                    .ed_frozen_count
            })
            .collect();
        assert!(counts[0] < counts[1] && counts[1] < counts[2], "{counts:?}");
    }

    #[test]
    fn csv_emitters_have_expected_shape() {
        let basis = SectorBasis::new(6, 3).unwrap();
        let op = floquet_operator(&basis, 12f64.sqrt(), PI / 2.0, Boundary::Open, None).unwrap();
        let spec = quasispectrum(&op, &basis, None).unwrap();
        let mut buf = Vec::new();
        write_eigenstate_csv(&mut buf, &spec).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), basis.dim() + 1);
        assert!(text.starts_with("index,quasienergy,entropy,frozen"));

        if let Ok(stats) = spacing_ratios(&spec, true) {
            let mut buf = Vec::new();
            write_ratio_csv(&mut buf, &stats).unwrap();
            assert_eq!(
                String::from_utf8(buf).unwrap().lines().count(),
                stats.ratios.len() + 1
            );
        }
    }
}
