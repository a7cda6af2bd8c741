//! Fixed-particle-number occupancy basis with stable lexicographic ordering.

use super::EdError;
use crate::ca::sector_states;
use crate::lattice::FockState;

/// Default cap on sector dimension for dense diagonalization.
pub const DEFAULT_DIM_GUARD: u128 = 40_000;

/// The `k`-particle sector of an `n`-site chain, ordered lexicographically
/// (ascending as integers) so indices are stable across runs.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    pub n: usize,
    pub k: usize,
    states: Vec<u64>,
}

impl SectorBasis {
    pub fn new(n: usize, k: usize) -> Result<Self, EdError> {
        Self::with_guard(n, k, DEFAULT_DIM_GUARD)
    }

    pub fn with_guard(n: usize, k: usize, guard: u128) -> Result<Self, EdError> {
        assert!(k <= n && n <= 64);
        let dim = binomial(n, k);
        if dim > guard {
            return Err(EdError::SectorTooLarge { dim, max: guard });
        }
        let states: Vec<u64> = sector_states(n, k).collect();
        debug_assert_eq!(states.len() as u128, dim);
        Ok(SectorBasis { n, k, states })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> FockState {
        FockState { n_sites: self.n, bits: self.states[i] }
    }

    pub fn bits(&self, i: usize) -> u64 {
        self.states[i]
    }

    pub fn index_of(&self, bits: u64) -> Option<usize> {
        self.states.binary_search(&bits).ok()
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = u64> + '_ {
        self.states.iter().copied()
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sector_size() {
        let b = SectorBasis::new(4, 2).unwrap();
        assert_eq!(b.dim(), 6);
        assert_eq!(b.bits(0), 0b0011);
        assert_eq!(b.bits(5), 0b1100);
    }

    #[test]
    fn paper_sector_size() {
        let b = SectorBasis::new(16, 8).unwrap();
        assert_eq!(b.dim(), 12870);
    }

    #[test]
    fn index_round_trips() {
        let b = SectorBasis::new(10, 4).unwrap();
        for i in 0..b.dim() {
            assert_eq!(b.index_of(b.bits(i)), Some(i));
        }
        assert_eq!(b.index_of(0b11111), None);
    }

    #[test]
    fn guard_rejects_large_sectors() {
        assert!(matches!(
            SectorBasis::with_guard(20, 10, 1000),
            Err(EdError::SectorTooLarge { dim: 184756, .. })
        ));
    }
}
