//! Closed-form two-site step unitaries and the Frozen / Swap / Quantum
//! classifier built on them.
//!
//! Basis conventions are load-bearing for everything downstream and are fixed
//! here once:
//!
//! * Hubbard pair, 2-particle opposite-spin sector, basis order
//!   `{updown|-, -|updown, up|down, down|up}` (indices 0..3).
//! * Nearest-neighbour pair, 1-particle sector: site 1 is the first tensor
//!   factor, so index 0 = particle on site 1, index 1 = particle on site 2.
//!
//! Units: `t_hop = 1`, `hbar = 1`.

use ndarray::{array, Array2};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

/// Default tolerance for permutation detection; residuals at exact
/// Diophantine points sit at floating-point noise level (~1e-12).
pub const DEFAULT_TOL: f64 = 1e-9;

/// Interaction strength, with the hard-core limit as a distinguished value.
///
/// The infinite limit is only meaningful to the classifiers; no finite matrix
/// represents it and the matrix constructors reject it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Interaction {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriveParams {
    pub v: Interaction,
    pub tau: f64,
}

impl DriveParams {
    pub fn new(v: f64, tau: f64) -> Self {
        assert!(tau >= 0.0 && tau.is_finite());
        Self { v: Interaction::Finite(v), tau }
    }

    pub fn hard_core(tau: f64) -> Self {
        Self { v: Interaction::Infinite, tau }
    }

    pub fn finite_v(&self) -> Option<f64> {
        match self.v {
            Interaction::Finite(v) => Some(v),
            Interaction::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ActionTag {
    Frozen,
    Swap,
    Quantum,
}

/// Classification of one pair evolution. Two actions compare equal when their
/// tags agree; the phase is unobservable on Fock states but kept for
/// eigenphase cross-checks.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairAction {
    pub tag: ActionTag,
    pub phase: Option<C64>,
    /// Distance (max matrix-element magnitude) from the nearest permutation
    /// pattern up to phase.
    pub residual: f64,
}

impl PartialEq for PairAction {
    fn eq(&self, other: &Self) -> bool {
        self.tag == other.tag
    }
}

/// Occupancy class of a spinful two-site pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum HubbardClass {
    Empty,
    Single,
    OppositePair,
    SameSpinFull,
    Triple,
    Full,
}

/// Occupied static neighbours of the two pair sites (pair sites excluded).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NeighborContext {
    pub n1: u32,
    pub n2: u32,
}

impl NeighborContext {
    /// Signed imbalance `N1 - N2`.
    pub fn imbalance(&self) -> i32 {
        self.n1 as i32 - self.n2 as i32
    }

    /// `Delta = |N1 - N2|`.
    pub fn delta(&self) -> u32 {
        self.imbalance().unsigned_abs()
    }
}

/// Closed-form evolution of a Hubbard pair in the 2-particle opposite-spin
/// sector, `exp(-i tau H)` with
/// `H = [[V,0,-1,-1],[0,V,-1,-1],[-1,-1,0,0],[-1,-1,0,0]]`.
pub fn hubbard_pair_unitary(v: f64, tau: f64) -> Array2<C64> {
    let s = (16.0 + v * v).sqrt();
    let theta = 0.5 * tau * s;
    let a = 0.5
        * C64::from_polar(1.0, 0.5 * v * tau)
        * C64::new(theta.cos(), -(v / s) * theta.sin());
    let b = C64::new(0.0, 2.0 * theta.sin() / s);
    let q = C64::from_polar(1.0, -0.5 * v * tau);
    let qb = q.conj();
    let half = C64::new(0.5, 0.0);
    let pre = q;
    array![
        [pre * q * (half + a), pre * q * (-half + a), pre * b, pre * b],
        [pre * q * (-half + a), pre * q * (half + a), pre * b, pre * b],
        [pre * b, pre * b, pre * qb * (half + a.conj()), pre * qb * (-half + a.conj())],
        [pre * b, pre * b, pre * qb * (-half + a.conj()), pre * qb * (half + a.conj())],
    ]
}

/// Closed-form evolution of a nearest-neighbour pair in the 1-particle
/// sector, `exp(-i tau H)` with `H = [[N1 V, -1], [-1, N2 V]]`, including the
/// global phase `exp(-i (N1 + N2) V tau / 2)`.
pub fn nn_pair_unitary(v: f64, tau: f64, ctx: NeighborContext) -> Array2<C64> {
    let delta_v = ctx.imbalance() as f64 * v;
    let c = (4.0 + delta_v * delta_v).sqrt();
    let theta = 0.5 * c * tau;
    let phase = C64::from_polar(1.0, -0.5 * (ctx.n1 + ctx.n2) as f64 * v * tau);
    let cos = C64::new(c * theta.cos(), 0.0);
    let isin = C64::new(0.0, theta.sin());
    let scale = phase / c;
    array![
        [scale * (cos - delta_v * isin), scale * 2.0 * isin],
        [scale * 2.0 * isin, scale * (cos + delta_v * isin)],
    ]
}

/// Classifies a nearest-neighbour pair by the magnitudes of the closed-form
/// matrix elements. Swapping is only reachable at `Delta = 0`.
pub fn classify_nn(p: &DriveParams, delta: u32, tol: f64) -> PairAction {
    match p.v {
        Interaction::Infinite if delta > 0 => PairAction {
            tag: ActionTag::Frozen,
            phase: None,
            residual: 0.0,
        },
        _ => {
            // Delta = 0 evolution is V-independent, so the finite formula
            // with v = 0 also covers the hard-core limit.
            let v = p.finite_v().unwrap_or(0.0);
            let u = nn_pair_unitary(v, p.tau, NeighborContext { n1: delta, n2: 0 });
            let off = u[[0, 1]].norm();
            let diag = u[[0, 0]].norm().max(u[[1, 1]].norm());
            if off < tol {
                PairAction { tag: ActionTag::Frozen, phase: Some(u[[0, 0]]), residual: off }
            } else if diag < tol {
                PairAction { tag: ActionTag::Swap, phase: Some(u[[0, 1]]), residual: diag }
            } else {
                PairAction { tag: ActionTag::Quantum, phase: None, residual: off.min(diag) }
            }
        }
    }
}

/// Classifies a Hubbard pair in the given occupancy class.
pub fn classify_hubbard(p: &DriveParams, cls: HubbardClass, tol: f64) -> PairAction {
    let frozen = |phase| PairAction { tag: ActionTag::Frozen, phase, residual: 0.0 };
    match cls {
        HubbardClass::Empty => frozen(Some(C64::new(1.0, 0.0))),
        HubbardClass::SameSpinFull => frozen(Some(C64::new(1.0, 0.0))),
        HubbardClass::Full => frozen(match p.v {
            Interaction::Finite(v) => Some(C64::from_polar(1.0, -2.0 * v * p.tau)),
            Interaction::Infinite => None,
        }),
        HubbardClass::Single | HubbardClass::Triple => {
            // interaction is constant in these sectors: bare two-site hopping
            let stay = p.tau.cos();
            let hop = p.tau.sin();
            let sector_phase = match (cls, p.v) {
                (HubbardClass::Triple, Interaction::Finite(v)) => {
                    C64::from_polar(1.0, -v * p.tau)
                }
                (HubbardClass::Triple, Interaction::Infinite) => C64::new(1.0, 0.0),
                _ => C64::new(1.0, 0.0),
            };
            if hop.abs() < tol {
                PairAction {
                    tag: ActionTag::Frozen,
                    phase: Some(sector_phase * stay.signum()),
                    residual: hop.abs(),
                }
            } else if stay.abs() < tol {
                PairAction {
                    tag: ActionTag::Swap,
                    phase: Some(sector_phase * C64::new(0.0, hop.signum())),
                    residual: stay.abs(),
                }
            } else {
                PairAction {
                    tag: ActionTag::Quantum,
                    phase: None,
                    residual: hop.abs().min(stay.abs()),
                }
            }
        }
        HubbardClass::OppositePair => match p.v {
            Interaction::Infinite => frozen(None),
            Interaction::Finite(v) => {
                let u = hubbard_pair_unitary(v, p.tau);
                let mut res_frozen = 0f64;
                let mut res_swap = 0f64;
                for i in 0..4 {
                    for j in 0..4 {
                        let mag = u[[i, j]].norm();
                        if i != j {
                            res_frozen = res_frozen.max(mag);
                        }
                        if !is_swap_slot(i, j) {
                            res_swap = res_swap.max(mag);
                        }
                    }
                }
                if res_frozen < tol {
                    PairAction {
                        tag: ActionTag::Frozen,
                        phase: Some(u[[0, 0]]),
                        residual: res_frozen,
                    }
                } else if res_swap < tol {
                    PairAction {
                        tag: ActionTag::Swap,
                        phase: Some(u[[0, 1]]),
                        residual: res_swap,
                    }
                } else {
                    PairAction {
                        tag: ActionTag::Quantum,
                        phase: None,
                        residual: res_frozen.min(res_swap),
                    }
                }
            }
        },
    }
}

fn is_swap_slot(i: usize, j: usize) -> bool {
    matches!((i, j), (0, 1) | (1, 0) | (2, 3) | (3, 2))
}

/// Weighted neighbour imbalance `Delta_ij = sum_k V_ik n_k - sum_k V_jk n_k`
/// for bond-dependent interaction strengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveDelta(pub f64);

impl EffectiveDelta {
    /// Weighted imbalance from the two sites' interaction rows and the
    /// occupancies of their static neighbours.
    pub fn from_weights(vi: &[f64], vj: &[f64], occ_i: &[bool], occ_j: &[bool]) -> Self {
        let dot = |w: &[f64], o: &[bool]| {
            w.iter().zip(o).map(|(v, &n)| if n { *v } else { 0.0 }).sum::<f64>()
        };
        EffectiveDelta(dot(vi, occ_i) - dot(vj, occ_j))
    }
}

/// Freezing condition for generalized bond-dependent interactions:
/// `tau sqrt(4 + Delta_ij^2) = 2 pi m` within `tol` of an integer `m`.
pub fn generalized_freeze_check(dij: EffectiveDelta, tau: f64, tol: f64) -> bool {
    let x = tau * (4.0 + dij.0 * dij.0).sqrt() / (2.0 * PI);
    (x - x.round()).abs() < tol
}
