//! Exact-integer solutions of the freeze/swap conditions.
//!
//! Every family of solvable drive points is the integer solution set of a
//! homogeneous quadratic Diophantine equation. Solutions are generated from a
//! particular solution by intersecting rational lines with the null surface of
//! the form; all arithmetic here is `i128` and the derived `(tau, V)` values
//! are the only floating-point outputs.

use num_integer::{Integer, Roots};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

/// All Diophantine arithmetic is done in 128-bit signed integers.
pub type Int = i128;

/// Inputs are capped so that every intermediate product (degree 4 in the
/// inputs at worst) stays well inside `i128` range.
const INPUT_BOUND: Int = 1 << 30;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiophError {
    #[error("quadratic form must have a nonzero coefficient")]
    ZeroForm,
    #[error("particular solution does not satisfy the form")]
    NotASolution,
    #[error("(w1, w2) = ({0}, {1}) are not coprime")]
    NotCoprime(Int, Int),
    #[error("direction scale d must be nonzero")]
    ZeroScale,
    #[error("zero direction (w1, w2) = (0, 0)")]
    ZeroDirection,
    #[error("w1^2 = w2^2 makes V singular")]
    SingularParams,
    #[error("degenerate solution: {0}")]
    DegenerateSolution(&'static str),
    #[error("4 m1^2 < m0^2 gives imaginary V")]
    ImaginaryV,
    #[error("delta values must be pairwise distinct and nonnegative")]
    BadDeltas,
    #[error("input magnitude exceeds the exact-arithmetic bound")]
    OutOfRange,
}

fn check_range(values: &[Int]) -> Result<(), DiophError> {
    if values.iter().any(|v| v.abs() >= INPUT_BOUND) {
        Err(DiophError::OutOfRange)
    } else {
        Ok(())
    }
}

/// Diagonal ternary quadratic form `Q = diag(a, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadForm3 {
    pub a: Int,
    pub b: Int,
    pub c: Int,
}

impl QuadForm3 {
    pub fn new(a: Int, b: Int, c: Int) -> Result<Self, DiophError> {
        if a == 0 && b == 0 && c == 0 {
            return Err(DiophError::ZeroForm);
        }
        check_range(&[a, b, c])?;
        Ok(Self { a, b, c })
    }

    /// Evaluates `X^T Q X` exactly.
    pub fn eval(&self, x: &DiophTriple) -> Int {
        self.a * x.x0 * x.x0 + self.b * x.x1 * x.x1 + self.c * x.x2 * x.x2
    }
}

/// Integer triple, possibly 128-bit when produced by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiophTriple {
    pub x0: Int,
    pub x1: Int,
    pub x2: Int,
}

impl DiophTriple {
    pub fn new(x0: Int, x1: Int, x2: Int) -> Self {
        Self { x0, x1, x2 }
    }
}

/// Rational line direction `(w1, w2)` with overall integer scale `d`.
///
/// `w1` and `w2` are kept coprime; [`Direction::normalized`] rescales
/// `W -> W/gcd` and `d -> d gcd^2` so the generated solution is unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Direction {
    pub w1: Int,
    pub w2: Int,
    pub d: Int,
}

impl Direction {
    /// Requires `(w1, w2)` already coprime and `d != 0`.
    pub fn new(w1: Int, w2: Int, d: Int) -> Result<Self, DiophError> {
        check_range(&[w1, w2, d])?;
        if d == 0 {
            return Err(DiophError::ZeroScale);
        }
        if w1 == 0 && w2 == 0 {
            return Err(DiophError::ZeroDirection);
        }
        if w1.gcd(&w2) != 1 {
            return Err(DiophError::NotCoprime(w1, w2));
        }
        Ok(Self { w1, w2, d })
    }

    /// Divides out the gcd and absorbs it into `d`.
    pub fn normalized(w1: Int, w2: Int, d: Int) -> Result<Self, DiophError> {
        check_range(&[w1, w2, d])?;
        if w1 == 0 && w2 == 0 {
            return Err(DiophError::ZeroDirection);
        }
        let g = w1.gcd(&w2);
        Self::new(w1 / g, w2 / g, d.checked_mul(g * g).ok_or(DiophError::OutOfRange)?)
    }
}

/// Frozen (identity) vs perfect-swapping classification of a solvable point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Frozen,
    Swap,
}

/// A solvable point of the Hubbard drive: integers plus derived `(tau, V)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HubbardPoint {
    pub ell: Int,
    pub n: Int,
    pub m: Int,
    /// Evolution time per step, units of hbar / t_hop; reported nonnegative.
    pub tau: f64,
    /// Hubbard interaction, units of t_hop; signed like `w1 w2`.
    pub v: f64,
    pub parity: Parity,
}

/// A solvable point of a nearest-neighbour drive with maximum degree
/// `m.len()`; `V` is the nonnegative root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NNPoint {
    pub m: Vec<Int>,
    pub tau: f64,
    pub v: f64,
}

impl NNPoint {
    pub fn d_max(&self) -> usize {
        self.m.len()
    }
}

/// Second intersection of the rational line `u X0 + v W` with the null
/// surface of `Q`, scaled by `dir.d`.
pub fn solve_quadratic_diophantine(
    q: &QuadForm3,
    x0: &DiophTriple,
    dir: &Direction,
) -> Result<DiophTriple, DiophError> {
    check_range(&[x0.x0, x0.x1, x0.x2])?;
    if q.eval(x0) != 0 {
        return Err(DiophError::NotASolution);
    }
    let (a, b) = (q.a, q.b);
    let (w1, w2, d) = (dir.w1, dir.w2, dir.d);
    let p = a * w1 * w1 - b * w2 * w2;
    let s = a * w1 * w1 + b * w2 * w2;
    Ok(DiophTriple::new(
        d * (-p * x0.x0 - 2 * b * w1 * w2 * x0.x1),
        d * (p * x0.x1 - 2 * a * w1 * w2 * x0.x0),
        d * (s * x0.x2),
    ))
}

/// Full integer solution family of `l^2 + n^2 = 2 m n`.
pub fn hubbard_solution(dir: &Direction) -> (Int, Int, Int) {
    let (w1, w2, d) = (dir.w1, dir.w2, dir.d);
    let ell = d * (w1 * w1 - w2 * w2);
    let n = d * (w1 + w2) * (w1 + w2);
    let m = d * (w1 * w1 + w2 * w2);
    (ell, n, m)
}

/// Derived drive parameters for a Hubbard solution.
pub fn hubbard_params(dir: &Direction) -> Result<HubbardPoint, DiophError> {
    let (ell, n, m) = hubbard_solution(dir);
    let disc = dir.w1 * dir.w1 - dir.w2 * dir.w2;
    if disc == 0 {
        return Err(DiophError::SingularParams);
    }
    let tau = PI / 2.0 * ell.unsigned_abs() as f64;
    let v = 8.0 * (dir.w1 * dir.w2) as f64 / disc.unsigned_abs() as f64;
    let parity = if ell.is_even() { Parity::Frozen } else { Parity::Swap };
    Ok(HubbardPoint { ell, n, m, tau, v, parity })
}

/// Closed-form solution family of the degree-3 nearest-neighbour tower
/// (`Delta = 0, 1, 2` simultaneously frozen); `m0` is always even.
pub fn nn_dmax3_solution(dir: &Direction) -> Result<(Int, Int, Int), DiophError> {
    let (w1, w2, d) = (dir.w1, dir.w2, dir.d);
    if w1 * w2 == 0 {
        return Err(DiophError::DegenerateSolution("w1 w2 = 0 gives m0 = 0"));
    }
    Ok((
        d * (-32 * w1 * w2),
        d * (-3 * w1 * w1 - 16 * w2 * w2),
        d * 2 * (-3 * w1 * w1 + 16 * w2 * w2),
    ))
}

/// `(tau, V)` fixed by the first two tower equations.
pub fn nn_params(m0: Int, m1: Int) -> Result<NNPoint, DiophError> {
    if m0 == 0 {
        return Err(DiophError::DegenerateSolution("m0 = 0"));
    }
    check_range(&[m0, m1])?;
    if 4 * m1 * m1 < m0 * m0 {
        return Err(DiophError::ImaginaryV);
    }
    let tau = PI / 2.0 * m0.unsigned_abs() as f64;
    let ratio = m1 as f64 / m0 as f64;
    let v = 2.0 * (4.0 * ratio * ratio - 1.0).sqrt();
    Ok(NNPoint { m: vec![m0, m1], tau, v })
}

/// The unique nonnegative `m_l` with `4 m_l^2 = (1 - l^2) m0^2 + 4 l^2 m1^2`,
/// if the right-hand side is four times a perfect square.
pub fn nn_tower_extend(m0: Int, m1: Int, l: u32) -> Option<Int> {
    assert!(l >= 2, "tower starts at l = 2");
    let l = l as Int;
    let rhs = (1 - l * l) * m0 * m0 + 4 * l * l * m1 * m1;
    if rhs < 0 || rhs % 4 != 0 {
        return None;
    }
    let square = rhs / 4;
    let root = square.sqrt();
    (root * root == square).then_some(root)
}

/// Exact-arithmetic verdict on the degree-4 tower equation
/// `m3^2 = 81 w1^4 + 2304 w2^4 - 1184 w1^2 w2^2`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Dmax4Certificate {
    pub w1: Int,
    pub w2: Int,
    pub rhs: Int,
    /// Integer square root of `rhs` when `rhs` is a nonnegative perfect square.
    pub m3: Option<Int>,
    /// `w1 w2 = 0` makes `m0 = 0`: the certified tuple is unphysical.
    pub degenerate: bool,
    /// `4 m1^2 = m0^2` makes `V = 0`: the tuple certifies only the
    /// non-interacting family (happens exactly at `|w1| = 4|w2|` and
    /// `3|w1| = 4|w2|`).
    pub trivial_v: bool,
}

pub fn dmax4_certificate(w1: Int, w2: Int) -> Result<Dmax4Certificate, DiophError> {
    check_range(&[w1, w2])?;
    let (s1, s2) = (w1 * w1, w2 * w2);
    let rhs = 81 * s1 * s1 + 2304 * s2 * s2 - 1184 * s1 * s2;
    let m3 = if rhs >= 0 {
        let root = rhs.sqrt();
        (root * root == rhs).then_some(root)
    } else {
        None
    };
    let m0 = -32 * w1 * w2;
    let m1 = -(3 * s1 + 16 * s2);
    Ok(Dmax4Certificate {
        w1,
        w2,
        rhs,
        m3,
        degenerate: w1 * w2 == 0,
        trivial_v: 4 * m1 * m1 == m0 * m0,
    })
}

/// Exhaustive certified search over `1 <= w1 <= w1_max`, `1 <= w2 <= w2_max`
/// with `gcd(w1, w2) = 1`, ascending in `(w1, w2)`.
pub fn search_dmax4(w1_max: Int, w2_max: Int) -> Result<Vec<Dmax4Certificate>, DiophError> {
    check_range(&[w1_max, w2_max])?;
    let mut out = Vec::new();
    for w1 in 1..=w1_max {
        for w2 in 1..=w2_max {
            if w1.gcd(&w2) != 1 {
                continue;
            }
            let cert = dmax4_certificate(w1, w2)?;
            if cert.m3.is_some() && !cert.degenerate && !cert.trivial_v {
                out.push(cert);
            }
        }
    }
    Ok(out)
}

/// Solution family of the general three-delta equation
/// `m0^2 (D1^2 - D2^2) + m1^2 (D2^2 - D0^2) + m2^2 (D0^2 - D1^2) = 0`,
/// with `m_i -> m_i / 2` understood wherever `D_i = 0`.
pub fn general_nn_solution(
    deltas: [Int; 3],
    dir: &Direction,
) -> Result<(Int, Int, Int), DiophError> {
    let [d0, d1, d2] = deltas;
    if d0 < 0 || d1 < 0 || d2 < 0 || d0 == d1 || d1 == d2 || d0 == d2 {
        return Err(DiophError::BadDeltas);
    }
    check_range(&deltas)?;
    // A zero delta replaces m_i by m_i / 2 in the equation; clearing the
    // denominator scales the whole form by 4 and the particular solution's
    // i-th entry by 2. At most one delta can be zero.
    let s = [scale_of(d0), scale_of(d1), scale_of(d2)];
    let lcm = s[0] * s[0] * s[1] * s[1] * s[2] * s[2];
    let a = lcm * (d1 * d1 - d2 * d2) / (s[0] * s[0]);
    let b = lcm * (d2 * d2 - d0 * d0) / (s[1] * s[1]);
    let c = lcm * (d0 * d0 - d1 * d1) / (s[2] * s[2]);
    let q = QuadForm3::new(a, b, c)?;
    let particular = DiophTriple::new(s[0] * d0, s[1] * d1, s[2] * d2);
    let x = solve_quadratic_diophantine(&q, &particular, dir)?;
    Ok((x.x0, x.x1, x.x2))
}

fn scale_of(delta: Int) -> Int {
    if delta == 0 {
        2
    } else {
        1
    }
}
