//! Quasienergies, eigenvectors, half-chain entanglement entropy, and the
//! frozen-state census.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, SVD};
use num_complex::Complex64 as C64;

use super::basis::SectorBasis;
use super::floquet::FloquetOperator;
use super::EdError;
use crate::lattice::FockState;

/// Default tolerance of the direct frozen test `|<s|U|s>| > 1 - tol`.
pub const FROZEN_TOL: f64 = 1e-8;

/// Spectrum of a Floquet operator with per-eigenstate diagnostics.
#[derive(Debug, Clone)]
pub struct QuasiSpectrum {
    /// Quasienergies in (-pi, pi], ascending.
    pub quasienergies: Vec<f64>,
    /// Eigenvectors as columns, ordered like `quasienergies`.
    pub eigenvectors: Array2<C64>,
    /// Half-chain entanglement entropy (natural log) per eigenstate.
    pub entropies: Vec<f64>,
    /// Whether the eigenstate lies in the span of the frozen Fock states.
    pub frozen: Vec<bool>,
    /// The censused frozen Fock states themselves.
    pub census: Vec<FockState>,
    pub cut: usize,
}

/// Fock states `s` with `|<s|U|s>| > 1 - tol`; since `U` is unitary this
/// means `U|s>` equals `|s>` up to phase.
pub fn frozen_census(op: &FloquetOperator, basis: &SectorBasis, tol: f64) -> Vec<FockState> {
    (0..basis.dim())
        .filter(|&i| op.u[[i, i]].norm() > 1.0 - tol)
        .map(|i| basis.state(i))
        .collect()
}

/// Precomputed Schmidt-block layout of a sector for one bipartition cut.
struct SchmidtLayout {
    /// Per basis index: (block id, row, column).
    slots: Vec<(usize, usize, usize)>,
    /// Per block: (rows, cols).
    shapes: Vec<(usize, usize)>,
}

fn schmidt_layout(basis: &SectorBasis, cut: usize) -> SchmidtLayout {
    use std::collections::HashMap;
    let mask: u64 = if cut == 64 { u64::MAX } else { (1u64 << cut) - 1 };
    // block per k_left; rows indexed by left pattern, cols by right pattern
    let mut block_of_kl: HashMap<u32, usize> = HashMap::new();
    let mut left_index: Vec<HashMap<u64, usize>> = Vec::new();
    let mut right_index: Vec<HashMap<u64, usize>> = Vec::new();
    let mut slots = Vec::with_capacity(basis.dim());
    for bits in basis.iter_bits() {
        let left = bits & mask;
        let right = bits >> cut;
        let kl = left.count_ones();
        let b = *block_of_kl.entry(kl).or_insert_with(|| {
            left_index.push(HashMap::new());
            right_index.push(HashMap::new());
            left_index.len() - 1
        });
        let nl = left_index[b].len();
        let r = *left_index[b].entry(left).or_insert(nl);
        let nr = right_index[b].len();
        let c = *right_index[b].entry(right).or_insert(nr);
        slots.push((b, r, c));
    }
    let shapes = left_index
        .iter()
        .zip(&right_index)
        .map(|(l, r)| (l.len(), r.len()))
        .collect();
    SchmidtLayout { slots, shapes }
}

/// Entanglement entropy of one sector vector across the precomputed cut.
fn entropy_of_vector(
    amplitudes: &Array1<C64>,
    layout: &SchmidtLayout,
) -> Result<f64, EdError> {
    let mut blocks: Vec<Array2<C64>> = layout
        .shapes
        .iter()
        .map(|&(r, c)| Array2::zeros((r, c)))
        .collect();
    for (i, &(b, r, c)) in layout.slots.iter().enumerate() {
        blocks[b][[r, c]] = amplitudes[i];
    }
    let mut s = 0.0;
    for block in &blocks {
        let (_, sv, _) = block.svd(false, false).map_err(|e| EdError::DiagonalizationFailure {
            context: "schmidt block svd".into(),
            message: e.to_string(),
        })?;
        for sigma in sv.iter() {
            let p = sigma * sigma;
            if p > 1e-300 {
                s -= p * p.ln();
            }
        }
    }
    Ok(s.max(0.0))
}

/// Diagonalizes the Floquet operator and attaches per-eigenstate entropy and
/// frozen flags.
///
/// Every censused Fock state is an eigenstate of `U`, so its span and the
/// span of the remaining Fock states are both invariant subspaces (for `x`
/// outside the census, `<s|U|x> = conj(<x|U^dag|s>) = conj(lambda_s) <x|s>^*
/// = 0`). The spectrum is therefore assembled block-wise: the census states
/// enter as exact Fock eigenpairs with quasienergy `-arg(U_ss)` and zero
/// entropy, and only the complement block is handed to the general
/// eigensolver. This keeps degenerate frozen families from being returned
/// as arbitrary entangled superpositions — the exact analogue of splitting
/// the degeneracy with infinitesimal diagonal disorder.
pub fn quasispectrum(
    op: &FloquetOperator,
    basis: &SectorBasis,
    cut: Option<usize>,
) -> Result<QuasiSpectrum, EdError> {
    let cut = cut.unwrap_or(basis.n / 2);
    assert!(cut <= basis.n);
    let dim = basis.dim();
    let wrap = |e: f64| {
        if e <= -std::f64::consts::PI { e + 2.0 * std::f64::consts::PI } else { e }
    };

    let census = frozen_census(op, basis, FROZEN_TOL);
    let census_idx: Vec<usize> =
        census.iter().map(|s| basis.index_of(s.bits).unwrap()).collect();
    let in_census = {
        let mut mask = vec![false; dim];
        for &i in &census_idx {
            mask[i] = true;
        }
        mask
    };
    let rest_idx: Vec<usize> = (0..dim).filter(|&i| !in_census[i]).collect();

    // eigenpairs as (quasienergy, vector, frozen flag)
    let mut pairs: Vec<(f64, Array1<C64>, bool)> = Vec::with_capacity(dim);
    for &i in &census_idx {
        let mut v = Array1::<C64>::zeros(dim);
        v[i] = C64::new(1.0, 0.0);
        pairs.push((wrap(-op.u[[i, i]].arg()), v, true));
    }
    if !rest_idx.is_empty() {
        let nq = rest_idx.len();
        let mut block = Array2::<C64>::zeros((nq, nq));
        for (r, &i) in rest_idx.iter().enumerate() {
            for (c, &j) in rest_idx.iter().enumerate() {
                block[[r, c]] = op.u[[i, j]];
            }
        }
        let (vals, vecs) = block.eig().map_err(|e| EdError::DiagonalizationFailure {
            context: format!("floquet operator n={} k={}", op.n, op.k),
            message: e.to_string(),
        })?;
        for (j, l) in vals.iter().enumerate() {
            let col = vecs.column(j);
            // renormalize defensively so entropies are scale-free
            let norm = col.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let mut v = Array1::<C64>::zeros(dim);
            for (r, &i) in rest_idx.iter().enumerate() {
                v[i] = col[r] / norm;
            }
            pairs.push((wrap(-l.arg()), v, false));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let layout = schmidt_layout(basis, cut);
    let mut quasienergies = Vec::with_capacity(dim);
    let mut eigenvectors = Array2::<C64>::zeros((dim, dim));
    let mut entropies = Vec::with_capacity(dim);
    let mut frozen = Vec::with_capacity(dim);
    for (out, (e, v, f)) in pairs.into_iter().enumerate() {
        quasienergies.push(e);
        frozen.push(f);
        entropies.push(entropy_of_vector(&v, &layout)?);
        for i in 0..dim {
            eigenvectors[[i, out]] = v[i];
        }
    }
    Ok(QuasiSpectrum { quasienergies, eigenvectors, entropies, frozen, census, cut })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ed::floquet::floquet_operator;
    use crate::lattice::Boundary;
    use ndarray::array;
    use std::f64::consts::PI;

    fn layout_for(n: usize, k: usize, cut: usize) -> (SectorBasis, SchmidtLayout) {
        let basis = SectorBasis::new(n, k).unwrap();
        let layout = schmidt_layout(&basis, cut);
        (basis, layout)
    }

    #[test]
    fn product_state_has_zero_entropy() {
        let (basis, layout) = layout_for(4, 2, 2);
        for i in 0..basis.dim() {
            let mut v = Array1::<C64>::zeros(basis.dim());
            v[i] = C64::new(1.0, 0.0);
            assert!(entropy_of_vector(&v, &layout).unwrap() < 1e-12);
        }
    }

    #[test]
    fn bell_like_state_has_ln2_entropy() {
        let basis = SectorBasis::new(4, 2).unwrap();
        let layout = schmidt_layout(&basis, 2);
        // (|1001> + |0110>)/sqrt(2): both have one particle per half and
        // orthogonal left (and right) factors
        let a = basis.index_of(0b1001).unwrap();
        let b = basis.index_of(0b0110).unwrap();
        let mut v = Array1::<C64>::zeros(basis.dim());
        let amp = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[a] = amp;
        v[b] = amp;
        let s = entropy_of_vector(&v, &layout).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-12, "{s}");
    }

    #[test]
    fn entropy_is_phase_invariant() {
        let basis = SectorBasis::new(6, 3).unwrap();
        let layout = schmidt_layout(&basis, 3);
        let mut v = Array1::<C64>::zeros(basis.dim());
        for i in 0..basis.dim() {
            v[i] = C64::from_polar(1.0 / (basis.dim() as f64).sqrt(), 0.31 * i as f64);
        }
        let s1 = entropy_of_vector(&v, &layout).unwrap();
        let rot = v.mapv(|x| x * C64::from_polar(1.0, 1.234));
        let s2 = entropy_of_vector(&rot, &layout).unwrap();
        assert!((s1 - s2).abs() < 1e-12);
    }

    #[test]
    fn census_on_trivial_sectors() {
        let basis = SectorBasis::new(4, 0).unwrap();
        let op = floquet_operator(&basis, 1.0, 1.0, Boundary::Open, None).unwrap();
        assert_eq!(frozen_census(&op, &basis, FROZEN_TOL).len(), 1);
    }

    #[test]
    fn clustered_state_is_frozen_at_sqrt12_pi_half() {
        let basis = SectorBasis::new(8, 4).unwrap();
        let op =
            floquet_operator(&basis, 12f64.sqrt(), PI / 2.0, Boundary::Open, None).unwrap();
        let census = frozen_census(&op, &basis, FROZEN_TOL);
        let target = FockState::from_bitstring("11110000").unwrap();
        assert!(census.contains(&target));
        // a generic (V, tau) does not freeze the alternating state
        let op2 = floquet_operator(&basis, 1.0, 1.0, Boundary::Open, None).unwrap();
        let alternating = FockState::from_bitstring("10101010").unwrap();
        let i = basis.index_of(alternating.bits).unwrap();
        assert!(op2.u[[i, i]].norm() < 1.0 - 1e-3);
    }

    #[test]
    fn quasienergies_match_eigenvalues_and_sorting() {
        let basis = SectorBasis::new(6, 3).unwrap();
        let op = floquet_operator(&basis, 0.7, 1.1, Boundary::Open, None).unwrap();
        let spec = quasispectrum(&op, &basis, None).unwrap();
        for w in spec.quasienergies.windows(2) {
            assert!(w[0] <= w[1]);
        }
        for (j, &eps) in spec.quasienergies.iter().enumerate() {
            assert!(eps > -PI - 1e-12 && eps <= PI + 1e-12);
            // U v = e^{-i eps} v
            let v = spec.eigenvectors.column(j);
            let uv = op.u.dot(&v);
            let lambda = C64::from_polar(1.0, -eps);
            let diff = uv
                .iter()
                .zip(v.iter())
                .map(|(a, b)| (a - lambda * b).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-8, "eigenpair residual {diff}");
        }
    }

    #[test]
    fn frozen_flags_cover_census_span() {
        let basis = SectorBasis::new(8, 4).unwrap();
        let op =
            floquet_operator(&basis, 12f64.sqrt(), PI / 2.0, Boundary::Open, None).unwrap();
        let spec = quasispectrum(&op, &basis, None).unwrap();
        let n_frozen_flags = spec.frozen.iter().filter(|&&f| f).count();
        assert_eq!(n_frozen_flags, spec.census.len());
        // frozen census states are product states: as eigenstates they carry
        // no entropy, and any frozen-flagged eigenvector stays in the span
        for (j, &flag) in spec.frozen.iter().enumerate() {
            if !flag {
                continue;
            }
            let v = spec.eigenvectors.column(j);
            let w: f64 = spec
                .census
                .iter()
                .map(|s| v[basis.index_of(s.bits).unwrap()].norm_sqr())
                .sum();
            assert!(w > 1.0 - 1e-8, "frozen eigenvector leaks weight: {w}");
        }
    }

    #[test]
    fn two_level_layout_example() {
        // sanity on the block bookkeeping itself
        let basis = SectorBasis::new(2, 1).unwrap();
        let layout = schmidt_layout(&basis, 1);
        assert_eq!(layout.shapes.len(), 2); // k_left = 0 and 1
        let v = array![
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
        ];
        let s = entropy_of_vector(&v, &layout).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-12);
    }
}
