//! Lattices, drive schedules, and Fock-state representations for the three
//! model families: 1D even-odd chain, square RLBL, and the 8-step Lieb
//! protocol.
//!
//! Conventions (load-bearing, referenced throughout the crate and docs):
//!
//! * Sites are indexed row-major over integer coordinates; bit `i` of a
//!   bitset is site `i`.
//! * Square RLBL: the A sublattice is the set of sites with `x + y` even.
//!   Step `k` (k = 0..3) activates, for every A site `a`, the bond from `a`
//!   to its neighbour in direction R, U, L, D respectively. At the
//!   non-interacting point (V = 0, tau = pi/2) a lone particle then traverses
//!   a single plaquette (right, down, left, up) and returns within one
//!   period.
//! * Lieb: corners sit at even-even coordinates, edge centres between them.
//!   Steps 0..3 activate, for corners with even checkerboard parity, the
//!   bond toward R, U, L, D; steps 4..7 repeat for odd-parity corners. Each
//!   step's active pairs are mutually non-adjacent, so nearest-neighbour
//!   interactions never couple two active pairs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pairdyn::HubbardClass;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice must have at least {0} sites")]
    TooSmall(usize),
    #[error("dimension must be even for this drive: {0}")]
    OddDimension(usize),
    #[error("bitset-backed Fock states support at most 64 sites, got {0}")]
    TooManySites(usize),
    #[error("occupancy count mismatch: expected {expected}, got {got}")]
    BadParticleCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Undirected lattice graph with coordinates kept for reporting.
#[derive(Debug, Clone, Serialize)]
pub struct Lattice {
    pub n_sites: usize,
    pub adjacency: Vec<Vec<usize>>,
    pub degree: Vec<usize>,
    pub coords: Vec<(i64, i64)>,
}

impl Lattice {
    fn from_edges(n_sites: usize, coords: Vec<(i64, i64)>, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![Vec::new(); n_sites];
        for &(a, b) in edges {
            assert_ne!(a, b);
            if !adjacency[a].contains(&b) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let degree = adjacency.iter().map(Vec::len).collect();
        Lattice { n_sites, adjacency, degree, coords }
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Maximum degree, which bounds the neighbour imbalance as
    /// `Delta <= D_max - 1`.
    pub fn d_max(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0)
    }

    /// All undirected edges, each listed once with the smaller index first.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, nbrs) in self.adjacency.iter().enumerate() {
            for &b in nbrs {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// One drive period: an ordered list of steps, each activating a set of
/// disjoint site pairs.
#[derive(Debug, Clone, Serialize)]
pub struct DriveSchedule {
    pub steps: Vec<Vec<(usize, usize)>>,
    /// Within every step, no site appears in two pairs.
    pub pairs_disjoint_per_step: bool,
    /// Whether distinct active pairs in the same step are mutually
    /// non-adjacent, so nearest-neighbour interactions never couple two
    /// active pairs and the pair evolutions factorize exactly.
    pub neighborhoods_disjoint: bool,
}

impl DriveSchedule {
    fn new(steps: Vec<Vec<(usize, usize)>>, lattice: &Lattice) -> Self {
        let pairs_disjoint_per_step = audit_pairs_disjoint(&steps);
        let neighborhoods_disjoint = audit_neighborhoods_disjoint(&steps, lattice);
        DriveSchedule { steps, pairs_disjoint_per_step, neighborhoods_disjoint }
    }
}

/// True iff within every step no site belongs to two pairs.
pub fn audit_pairs_disjoint(steps: &[Vec<(usize, usize)>]) -> bool {
    steps.iter().all(|step| {
        let mut seen = std::collections::HashSet::new();
        step.iter().all(|&(a, b)| a != b && seen.insert(a) && seen.insert(b))
    })
}

/// True iff, in every step, no site of one active pair is adjacent to a site
/// of another active pair (which also implies no third site is a nearest
/// neighbour of two active pairs on these bipartite-bond lattices).
pub fn audit_neighborhoods_disjoint(steps: &[Vec<(usize, usize)>], lattice: &Lattice) -> bool {
    steps.iter().all(|step| {
        for (i, &(a1, b1)) in step.iter().enumerate() {
            for &(a2, b2) in &step[i + 1..] {
                for s in [a1, b1] {
                    for t in [a2, b2] {
                        if s == t || lattice.are_adjacent(s, t) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    })
}

/// Spinless Fock state: bit `i` is the occupancy of site `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FockState {
    pub n_sites: usize,
    pub bits: u64,
}

impl FockState {
    pub fn empty(n_sites: usize) -> Result<Self, LatticeError> {
        if n_sites > 64 {
            return Err(LatticeError::TooManySites(n_sites));
        }
        Ok(FockState { n_sites, bits: 0 })
    }

    pub fn from_sites(n_sites: usize, occupied: &[usize]) -> Result<Self, LatticeError> {
        let mut s = Self::empty(n_sites)?;
        for &i in occupied {
            assert!(i < n_sites);
            s.bits |= 1 << i;
        }
        Ok(s)
    }

    /// Parses a bitstring like "11010" with site 0 leftmost.
    pub fn from_bitstring(text: &str) -> Result<Self, LatticeError> {
        if text.len() > 64 {
            return Err(LatticeError::TooManySites(text.len()));
        }
        let mut s = Self::empty(text.len())?;
        for (i, c) in text.chars().enumerate() {
            match c {
                '1' => s.bits |= 1 << i,
                '0' => {}
                _ => panic!("bitstring must contain only 0 and 1"),
            }
        }
        Ok(s)
    }

    /// Renders the state with site 0 leftmost, inverse of `from_bitstring`.
    pub fn to_bitstring(&self) -> String {
        (0..self.n_sites)
            .map(|i| if self.occupied(i) { '1' } else { '0' })
            .collect()
    }

    pub fn occupied(&self, site: usize) -> bool {
        debug_assert!(site < self.n_sites);
        self.bits >> site & 1 == 1
    }

    pub fn set(&mut self, site: usize, value: bool) {
        debug_assert!(site < self.n_sites);
        if value {
            self.bits |= 1 << site;
        } else {
            self.bits &= !(1 << site);
        }
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn swap_pair(&mut self, a: usize, b: usize) {
        let va = self.occupied(a);
        let vb = self.occupied(b);
        self.set(a, vb);
        self.set(b, va);
    }

    /// Occupancy of the pair: 0, 1 or 2 particles.
    pub fn pair_count(&self, pair: (usize, usize)) -> usize {
        self.occupied(pair.0) as usize + self.occupied(pair.1) as usize
    }
}

/// Spinful Fock state as two independent occupancy bitsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinfulFock {
    pub n_sites: usize,
    pub up: u64,
    pub down: u64,
}

impl SpinfulFock {
    pub fn empty(n_sites: usize) -> Result<Self, LatticeError> {
        if n_sites > 64 {
            return Err(LatticeError::TooManySites(n_sites));
        }
        Ok(SpinfulFock { n_sites, up: 0, down: 0 })
    }

    pub fn occupied_up(&self, site: usize) -> bool {
        self.up >> site & 1 == 1
    }

    pub fn occupied_down(&self, site: usize) -> bool {
        self.down >> site & 1 == 1
    }

    pub fn set_up(&mut self, site: usize, value: bool) {
        if value {
            self.up |= 1 << site;
        } else {
            self.up &= !(1 << site);
        }
    }

    pub fn set_down(&mut self, site: usize, value: bool) {
        if value {
            self.down |= 1 << site;
        } else {
            self.down &= !(1 << site);
        }
    }

    pub fn count(&self) -> usize {
        (self.up.count_ones() + self.down.count_ones()) as usize
    }

    /// Hubbard occupancy class of a two-site pair from its four bits.
    pub fn pair_class(&self, pair: (usize, usize)) -> HubbardClass {
        let (i, j) = pair;
        let bits = [
            self.occupied_up(i),
            self.occupied_down(i),
            self.occupied_up(j),
            self.occupied_down(j),
        ];
        let n = bits.iter().filter(|&&b| b).count();
        match n {
            0 => HubbardClass::Empty,
            1 => HubbardClass::Single,
            3 => HubbardClass::Triple,
            4 => HubbardClass::Full,
            2 => {
                let ups = self.occupied_up(i) as usize + self.occupied_up(j) as usize;
                if ups == 1 {
                    // one up and one down, anywhere on the pair
                    HubbardClass::OppositePair
                } else {
                    HubbardClass::SameSpinFull
                }
            }
            _ => unreachable!(),
        }
    }

    /// Swaps the full (up, down) occupancy between the two sites.
    pub fn swap_pair(&mut self, a: usize, b: usize) {
        let (ua, ub) = (self.occupied_up(a), self.occupied_up(b));
        let (da, db) = (self.occupied_down(a), self.occupied_down(b));
        self.set_up(a, ub);
        self.set_up(b, ua);
        self.set_down(a, db);
        self.set_down(b, da);
    }
}

/// Occupied static neighbours of the two sites of an activated pair; see
/// `pairdyn::NeighborContext`.
pub use crate::pairdyn::NeighborContext;

/// Counts occupied neighbours of each pair site, excluding the pair sites
/// themselves.
pub fn delta_of_pair(state: &FockState, pair: (usize, usize), lattice: &Lattice) -> NeighborContext {
    let count = |site: usize| {
        lattice.adjacency[site]
            .iter()
            .filter(|&&n| n != pair.0 && n != pair.1 && state.occupied(n))
            .count() as u32
    };
    NeighborContext { n1: count(pair.0), n2: count(pair.1) }
}

/// 1D chain with the two-step even/odd drive.
pub fn build_chain(n: usize, boundary: Boundary) -> Result<(Lattice, DriveSchedule), LatticeError> {
    if n < 2 {
        return Err(LatticeError::TooSmall(2));
    }
    if n > 64 {
        return Err(LatticeError::TooManySites(n));
    }
    let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Periodic && n > 2 {
        edges.push((n - 1, 0));
    }
    let coords = (0..n).map(|i| (i as i64, 0)).collect();
    let lattice = Lattice::from_edges(n, coords, &edges);

    let even: Vec<_> = (0..n - 1).step_by(2).map(|i| (i, i + 1)).collect();
    let mut odd: Vec<_> = (1..n - 1).step_by(2).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Periodic && n > 2 && n.is_multiple_of(2) {
        odd.push((n - 1, 0));
    }
    let schedule = DriveSchedule::new(vec![even, odd], &lattice);
    Ok((lattice, schedule))
}

/// Periodic square lattice with the four-step RLBL bond cycle.
pub fn build_square_rlbl(lx: usize, ly: usize) -> Result<(Lattice, DriveSchedule), LatticeError> {
    if lx < 2 || ly < 2 {
        return Err(LatticeError::TooSmall(2));
    }
    if !lx.is_multiple_of(2) {
        return Err(LatticeError::OddDimension(lx));
    }
    if !ly.is_multiple_of(2) {
        return Err(LatticeError::OddDimension(ly));
    }
    let n = lx * ly;
    if n > 64 {
        return Err(LatticeError::TooManySites(n));
    }
    let idx = |x: usize, y: usize| y * lx + x;
    let mut edges = Vec::new();
    let coords: Vec<(i64, i64)> =
        (0..n).map(|i| ((i % lx) as i64, (i / lx) as i64)).collect();
    for y in 0..ly {
        for x in 0..lx {
            edges.push((idx(x, y), idx((x + 1) % lx, y)));
            edges.push((idx(x, y), idx(x, (y + 1) % ly)));
        }
    }
    let lattice = Lattice::from_edges(n, coords, &edges);

    // direction order R, U, L, D from every A-sublattice site (x + y even)
    let dirs: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    let steps = dirs
        .iter()
        .map(|&(dx, dy)| {
            let mut step = Vec::new();
            for y in 0..ly {
                for x in 0..lx {
                    if (x + y) % 2 == 0 {
                        let nx = (x as i64 + dx).rem_euclid(lx as i64) as usize;
                        let ny = (y as i64 + dy).rem_euclid(ly as i64) as usize;
                        step.push((idx(x, y), idx(nx, ny)));
                    }
                }
            }
            step
        })
        .collect();
    let schedule = DriveSchedule::new(steps, &lattice);
    Ok((lattice, schedule))
}

/// Lieb lattice of `lx` by `ly` unit cells with the 8-step chiral drive.
///
/// Open boundary gives the (2lx+1) x (2ly+1) coordinate patch including the
/// closing row and column of corners (so `lx = ly = 2` is the 21-site "5x5
/// patch"); periodic identifies coordinates modulo (2lx, 2ly).
pub fn build_lieb(
    lx: usize,
    ly: usize,
    boundary: Boundary,
) -> Result<(Lattice, DriveSchedule), LatticeError> {
    if lx < 1 || ly < 1 {
        return Err(LatticeError::TooSmall(1));
    }
    if boundary == Boundary::Periodic {
        // the corner checkerboard parity must be consistent across the wrap
        if !lx.is_multiple_of(2) {
            return Err(LatticeError::OddDimension(lx));
        }
        if !ly.is_multiple_of(2) {
            return Err(LatticeError::OddDimension(ly));
        }
    }
    let (width, height) = match boundary {
        Boundary::Open => (2 * lx as i64 + 1, 2 * ly as i64 + 1),
        Boundary::Periodic => (2 * lx as i64, 2 * ly as i64),
    };
    // Sites are all coordinates that are not odd-odd, in row-major order.
    let mut coords = Vec::new();
    for y in 0..height {
        for x in 0..width {
            if x % 2 == 1 && y % 2 == 1 {
                continue;
            }
            coords.push((x, y));
        }
    }
    let n = coords.len();
    if n > 64 {
        return Err(LatticeError::TooManySites(n));
    }
    let site_at = |x: i64, y: i64| -> Option<usize> {
        let (x, y) = match boundary {
            Boundary::Open => {
                if x < 0 || y < 0 || x >= width || y >= height {
                    return None;
                }
                (x, y)
            }
            Boundary::Periodic => (x.rem_euclid(width), y.rem_euclid(height)),
        };
        if x % 2 == 1 && y % 2 == 1 {
            return None;
        }
        coords.binary_search_by(|&(cx, cy)| (cy, cx).cmp(&(y, x))).ok()
    };
    let mut edges = Vec::new();
    for (i, &(x, y)) in coords.iter().enumerate() {
        for (dx, dy) in [(1i64, 0i64), (0, 1)] {
            if let Some(j) = site_at(x + dx, y + dy) {
                if j != i {
                    edges.push((i, j));
                }
            }
        }
    }
    let lattice = Lattice::from_edges(n, coords.clone(), &edges);

    // Steps 0..3: even-parity corners toward R, U, L, D; steps 4..7 the same
    // for odd-parity corners. Corner parity is the checkerboard parity of the
    // unit-cell index (x/2 + y/2).
    let dirs: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    let mut steps = Vec::with_capacity(8);
    for parity in [0i64, 1] {
        for &(dx, dy) in &dirs {
            let mut step = Vec::new();
            for (i, &(x, y)) in coords.iter().enumerate() {
                if x % 2 != 0 || y % 2 != 0 {
                    continue; // not a corner
                }
                if (x / 2 + y / 2).rem_euclid(2) != parity {
                    continue;
                }
                if let Some(j) = site_at(x + dx, y + dy) {
                    step.push((i, j));
                }
            }
            steps.push(step);
        }
    }
    let schedule = DriveSchedule::new(steps, &lattice);
    Ok((lattice, schedule))
}
