//! Graph families and their compressed Laplacian spectra.
//!
//! All families use the convention `L = A - D`, so the spectrum of `-L` is
//! non-negative with the uniform state at energy zero. Each family is
//! vertex-transitive with a plane-wave-like eigenbasis, which means every
//! eigenvector of `-L` has squared overlap `1/N` on any single vertex. The
//! spectrum can therefore be stored as distinct levels with multiplicities.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The search domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphFamily {
    /// Complete graph on `num_vertices` vertices.
    Complete { num_vertices: usize },
    /// Hypercube on `2^num_bits` vertices.
    Hypercube { num_bits: u32 },
    /// Periodic `dim`-dimensional cubic lattice with `side^dim` vertices.
    Lattice { dim: u32, side: usize },
}

impl GraphFamily {
    pub fn complete(num_vertices: usize) -> Result<Self> {
        let g = GraphFamily::Complete { num_vertices };
        g.validate()?;
        Ok(g)
    }

    pub fn hypercube(num_bits: u32) -> Result<Self> {
        let g = GraphFamily::Hypercube { num_bits };
        g.validate()?;
        Ok(g)
    }

    pub fn lattice(dim: u32, side: usize) -> Result<Self> {
        let g = GraphFamily::Lattice { dim, side };
        g.validate()?;
        Ok(g)
    }

    /// Checks `N >= 2`, `L >= 2` and that `N` fits in memory-addressable range.
    pub fn validate(&self) -> Result<()> {
        match *self {
            GraphFamily::Complete { num_vertices } => {
                if num_vertices < 2 {
                    return Err(Error::InvalidFamily(format!(
                        "complete graph needs N >= 2, got {num_vertices}"
                    )));
                }
            }
            GraphFamily::Hypercube { num_bits } => {
                if num_bits == 0 || num_bits > 40 {
                    return Err(Error::InvalidFamily(format!(
                        "hypercube needs 1 <= n <= 40 bits, got {num_bits}"
                    )));
                }
            }
            GraphFamily::Lattice { dim, side } => {
                if side < 2 {
                    return Err(Error::SideTooSmall(side));
                }
                if dim == 0 {
                    return Err(Error::InvalidFamily("lattice needs d >= 1".into()));
                }
                let n = (side as f64).powi(dim as i32);
                if n > 1e12 {
                    return Err(Error::InvalidFamily(format!(
                        "lattice {dim}:{side} has too many vertices"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        match *self {
            GraphFamily::Complete { num_vertices } => num_vertices,
            GraphFamily::Hypercube { num_bits } => 1usize << num_bits,
            GraphFamily::Lattice { dim, side } => side.pow(dim),
        }
    }

    pub fn max_degree(&self) -> usize {
        match *self {
            GraphFamily::Complete { num_vertices } => num_vertices - 1,
            GraphFamily::Hypercube { num_bits } => num_bits as usize,
            GraphFamily::Lattice { dim, .. } => 2 * dim as usize,
        }
    }

    /// The `complete:N` / `hypercube:n` / `lattice:d:L` label.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GraphFamily::Complete { num_vertices } => write!(f, "complete:{num_vertices}"),
            GraphFamily::Hypercube { num_bits } => write!(f, "hypercube:{num_bits}"),
            GraphFamily::Lattice { dim, side } => write!(f, "lattice:{dim}:{side}"),
        }
    }
}

/// Integer momentum label `m` on a torus of side `L`; the wavenumber is `2 pi m / L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MomentumVector {
    components: Vec<i64>,
    side: usize,
}

impl MomentumVector {
    /// Validates each component against the parity-dependent range for `side`.
    pub fn new(components: Vec<i64>, side: usize) -> Result<Self> {
        if side < 2 {
            return Err(Error::SideTooSmall(side));
        }
        let l = side as i64;
        let (lo, hi) = if l % 2 == 1 {
            (-(l - 1) / 2, (l - 1) / 2)
        } else {
            (-(l - 2) / 2, l / 2)
        };
        if let Some(&bad) = components.iter().find(|&&m| m < lo || m > hi) {
            return Err(Error::InvalidParameter(format!(
                "momentum component {bad} outside [{lo}, {hi}] for side {side}"
            )));
        }
        Ok(MomentumVector { components, side })
    }

    pub fn components(&self) -> &[i64] {
        &self.components
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        self.components
            .iter()
            .map(|&m| 2.0 * PI * m as f64 / self.side as f64)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&m| m == 0)
    }
}

/// Lattice dispersion `E(k) = 2 (d - sum_j cos k_j)`, with `d` the length of `k`.
pub fn dispersion(k: &MomentumVector) -> f64 {
    let d = k.dim() as f64;
    2.0 * (d - k.wavenumbers().iter().map(|x| x.cos()).sum::<f64>())
}

/// Allowed integer momenta along one axis, in the order `0, 1, -1, 2, -2, ...`.
fn axis_momenta(side: usize) -> Vec<i64> {
    let l = side as i64;
    let mut out = vec![0];
    let half = if l % 2 == 1 { (l - 1) / 2 } else { (l - 2) / 2 };
    for m in 1..=half {
        out.push(m);
        out.push(-m);
    }
    if l % 2 == 0 {
        out.push(l / 2);
    }
    out
}

/// All `L^d` momentum vectors of the `d`-dimensional torus of side `L`.
pub fn momentum_grid(dim: u32, side: usize) -> Result<Vec<MomentumVector>> {
    if side < 2 {
        return Err(Error::SideTooSmall(side));
    }
    let axis = axis_momenta(side);
    let d = dim as usize;
    let total = side.pow(dim);
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        out.push(MomentumVector {
            components: idx.iter().map(|&i| axis[i]).collect(),
            side,
        });
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < side {
                break;
            }
            *slot = 0;
        }
    }
    Ok(out)
}

/// One distinct eigenvalue of `-L` and its degeneracy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: u64,
}

/// Distinct eigenvalues of `-L` with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSpectrum {
    levels: Vec<Level>,
    num_vertices: usize,
}

impl LevelSpectrum {
    /// Builds a spectrum after checking ordering, the zero ground level and the
    /// multiplicity count.
    pub fn new(levels: Vec<Level>, num_vertices: usize) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::InvalidParameter(
                "a level spectrum needs at least two distinct levels".into(),
            ));
        }
        if levels[0].energy != 0.0 || levels[0].multiplicity != 1 {
            return Err(Error::InvalidParameter(
                "the lowest level must be 0 with multiplicity 1".into(),
            ));
        }
        if levels.windows(2).any(|w| w[1].energy <= w[0].energy) {
            return Err(Error::InvalidParameter(
                "level energies must be strictly increasing".into(),
            ));
        }
        if levels.iter().any(|l| l.multiplicity == 0) {
            return Err(Error::InvalidParameter("zero multiplicity".into()));
        }
        let total: u64 = levels.iter().map(|l| l.multiplicity).sum();
        if total != num_vertices as u64 {
            return Err(Error::InvalidParameter(format!(
                "multiplicities sum to {total}, expected {num_vertices}"
            )));
        }
        Ok(LevelSpectrum {
            levels,
            num_vertices,
        })
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// `|<phi|w>|^2`, identical for every eigenvector.
    pub fn marked_overlap_sq(&self) -> f64 {
        1.0 / self.num_vertices as f64
    }

    /// `(1/N) sum_{E != 0} mult / E^j`, the finite-size analogue of `I_{j,d}`.
    pub fn inverse_moment(&self, j: i32) -> f64 {
        let mut acc = crate::numeric::KahanSum::default();
        for l in self.levels.iter().skip(1).rev() {
            acc.add(l.multiplicity as f64 / l.energy.powi(j));
        }
        acc.value() / self.num_vertices as f64
    }
}

/// Grouping tolerance for lattice levels, `1e-9 * 4d`.
pub fn lattice_level_tolerance(dim: u32) -> f64 {
    1e-9 * 4.0 * dim as f64
}

/// Sorts `(energy, count)` pairs and merges neighbours closer than `tol`.
/// Each merged level keeps the smallest energy of its group.
pub(crate) fn group_levels(mut raw: Vec<(f64, u64)>, tol: f64) -> Vec<Level> {
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<Level> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for (e, c) in raw {
        match out.last_mut() {
            Some(level) if e - last <= tol => level.multiplicity += c,
            _ => out.push(Level {
                energy: e,
                multiplicity: c,
            }),
        }
        last = e;
    }
    out
}

/// Distinct one-dimensional levels `2(1 - cos k)` of a ring of side `L`.
pub fn ring_levels(side: usize, tol: f64) -> Vec<Level> {
    let raw = axis_momenta(side)
        .into_iter()
        .map(|m| {
            let k = 2.0 * PI * m as f64 / side as f64;
            let e = if m == 0 { 0.0 } else { 2.0 * (1.0 - k.cos()) };
            (e, 1)
        })
        .collect();
    group_levels(raw, tol)
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Compressed spectrum of `-L` for a graph family.
pub fn level_spectrum(g: &GraphFamily) -> Result<LevelSpectrum> {
    g.validate()?;
    let n = g.num_vertices();
    let levels = match *g {
        GraphFamily::Complete { num_vertices } => vec![
            Level {
                energy: 0.0,
                multiplicity: 1,
            },
            Level {
                energy: num_vertices as f64,
                multiplicity: num_vertices as u64 - 1,
            },
        ],
        GraphFamily::Hypercube { num_bits } => (0..=num_bits as u64)
            .map(|r| Level {
                energy: 2.0 * r as f64,
                multiplicity: binomial(num_bits as u64, r),
            })
            .collect(),
        GraphFamily::Lattice { dim, side } => {
            // Sum the ring spectrum over axes, regrouping after each axis.
            let tol = lattice_level_tolerance(dim);
            let ring = ring_levels(side, tol);
            let mut acc = vec![Level {
                energy: 0.0,
                multiplicity: 1,
            }];
            for _ in 0..dim {
                let mut raw = Vec::with_capacity(acc.len() * ring.len());
                for a in &acc {
                    for r in &ring {
                        raw.push((a.energy + r.energy, a.multiplicity * r.multiplicity));
                    }
                }
                acc = group_levels(raw, tol);
            }
            acc
        }
    };
    LevelSpectrum::new(levels, n)
}

/// Dense `-L` for a family, with vertex 0 as the canonical origin.
///
/// Lattice vertices are indexed as `sum_j x_j L^j`; for `L = 2` the two
/// neighbours along an axis coincide and contribute a double edge, which
/// matches the dispersion relation. Hypercube vertices are bit strings.
pub fn negative_laplacian_dense(g: &GraphFamily) -> Result<DMatrix<f64>> {
    g.validate()?;
    let n = g.num_vertices();
    let deg = g.max_degree() as f64;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = deg;
    }
    match *g {
        GraphFamily::Complete { .. } => {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        m[(i, j)] = -1.0;
                    }
                }
            }
        }
        GraphFamily::Hypercube { num_bits } => {
            for x in 0..n {
                for b in 0..num_bits {
                    m[(x, x ^ (1 << b))] -= 1.0;
                }
            }
        }
        GraphFamily::Lattice { dim, side } => {
            for x in 0..n {
                let mut stride = 1;
                for _ in 0..dim {
                    let coord = (x / stride) % side;
                    let up = x - coord * stride + ((coord + 1) % side) * stride;
                    let down = x - coord * stride + ((coord + side - 1) % side) * stride;
                    m[(x, up)] -= 1.0;
                    m[(x, down)] -= 1.0;
                    stride *= side;
                }
            }
        }
    }
    Ok(m)
}
