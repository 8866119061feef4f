//! Brute-force reference: build `H` explicitly and diagonalize it in full.

use nalgebra::DMatrix;
use num_complex::Complex64;

#[link(name = "lapack")]
extern "C" {}

use crate::error::{Error, Result};
use crate::graph::{negative_laplacian_dense, GraphFamily};
use crate::numeric::KahanSum;

pub const DEFAULT_ORACLE_CAP: usize = 4096;

/// Eigenvalues (ascending) and column-major eigenvectors from LAPACK `dsyevd`.
fn symmetric_eigen(mut h: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = h.nrows();
    let ni = n as i32;
    let mut w = vec![0.0; n];
    let mut info = 0;
    let (mut lwork, mut liwork) = (-1i32, -1i32);
    let mut work_q = [0.0f64];
    let mut iwork_q = [0i32];
    // SAFETY: `h` is an n x n column-major buffer; the first call only
    // queries workspace sizes.
    unsafe {
        lapack_sys::dsyevd_(
            &(b'V' as _),
            &(b'L' as _),
            &ni,
            h.as_mut_slice().as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work_q.as_mut_ptr(),
            &lwork,
            iwork_q.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::InvalidParameter(format!(
            "dsyevd workspace query: info {info}"
        )));
    }
    lwork = work_q[0] as i32;
    liwork = iwork_q[0];
    let mut work = vec![0.0f64; lwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    // SAFETY: buffers sized as reported by the query above.
    unsafe {
        lapack_sys::dsyevd_(
            &(b'V' as _),
            &(b'L' as _),
            &ni,
            h.as_mut_slice().as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::InvalidParameter(format!(
            "dsyevd failed: info {info}"
        )));
    }
    Ok((w, h))
}

/// Full eigendecomposition of `H = -gamma L - |w><w|` reduced to what the
/// success amplitude needs: eigenvalues and the `w` and `s` components of
/// each eigenvector.
#[derive(Debug, Clone)]
pub struct DenseOracle {
    pub eigenvalues: Vec<f64>,
    /// `<w|v_i>` for each eigenvector.
    pub w_components: Vec<f64>,
    /// `<s|v_i>` for each eigenvector.
    pub s_components: Vec<f64>,
}

impl DenseOracle {
    pub fn new(g: &GraphFamily, gamma: f64, w_index: usize, cap: usize) -> Result<Self> {
        let n = g.num_vertices();
        if n > cap {
            return Err(Error::OracleCapExceeded { n, cap });
        }
        if w_index >= n {
            return Err(Error::InvalidParameter(format!(
                "marked vertex {w_index} out of range for N = {n}"
            )));
        }
        let mut h = negative_laplacian_dense(g)? * gamma;
        h[(w_index, w_index)] -= 1.0;
        let (eigenvalues, vectors) = symmetric_eigen(h)?;
        let inv_sqrt_n = 1.0 / (n as f64).sqrt();
        let mut w_components = Vec::with_capacity(n);
        let mut s_components = Vec::with_capacity(n);
        for v in vectors.column_iter() {
            w_components.push(v[w_index]);
            s_components.push(v.iter().copied().collect::<KahanSum>().value() * inv_sqrt_n);
        }
        Ok(DenseOracle {
            eigenvalues,
            w_components,
            s_components,
        })
    }

    pub fn amplitude(&self, t: f64) -> Complex64 {
        let mut re = KahanSum::default();
        let mut im = KahanSum::default();
        for ((e, w), s) in self
            .eigenvalues
            .iter()
            .zip(&self.w_components)
            .zip(&self.s_components)
        {
            let c = w * s;
            let (sn, cs) = (e * t).sin_cos();
            re.add(c * cs);
            im.add(-c * sn);
        }
        Complex64::new(re.value(), im.value())
    }

    pub fn w_weights(&self) -> Vec<f64> {
        self.w_components.iter().map(|c| c * c).collect()
    }

    pub fn s_weights(&self) -> Vec<f64> {
        self.s_components.iter().map(|c| c * c).collect()
    }
}

/// `<w| e^{-iHt} |s>` from a dense diagonalization of `H` with the marked
/// vertex at `w_index`, for `N` up to [`DEFAULT_ORACLE_CAP`].
pub fn dense_oracle(g: &GraphFamily, gamma: f64, w_index: usize, t: f64) -> Result<Complex64> {
    Ok(DenseOracle::new(g, gamma, w_index, DEFAULT_ORACLE_CAP)?.amplitude(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::amplitude;
    use crate::graph::level_spectrum;
    use crate::secular::solve_spectrum;
    use std::f64::consts::PI;

    #[test]
    fn initial_amplitude_is_uniform_overlap() {
        let g = GraphFamily::lattice(2, 4).unwrap();
        let a = dense_oracle(&g, 1.0, 0, 0.0).unwrap();
        assert!((a.re - 0.25).abs() < 1e-12 && a.im.abs() < 1e-12);
    }

    #[test]
    fn complete_graph_search_at_small_size() {
        let g = GraphFamily::complete(64).unwrap();
        let a = dense_oracle(&g, 1.0 / 64.0, 7, PI * 8.0 / 2.0).unwrap();
        assert!(a.norm() >= 0.9, "{a}");
    }

    #[test]
    fn cap_and_index_are_enforced() {
        let g = GraphFamily::lattice(2, 10).unwrap();
        assert!(matches!(
            DenseOracle::new(&g, 1.0, 0, 50),
            Err(Error::OracleCapExceeded { n: 100, cap: 50 })
        ));
        assert!(DenseOracle::new(&g, 1.0, 100, 4096).is_err());
    }

    #[test]
    fn small_lattice_matches_spectral_path() {
        let g = GraphFamily::lattice(2, 4).unwrap();
        let spec = solve_spectrum(&level_spectrum(&g).unwrap(), 1.0).unwrap();
        let dense = dense_oracle(&g, 1.0, 0, 1.0).unwrap();
        let fast = amplitude(&spec, 1.0).unwrap();
        assert!((dense - fast).norm() < 1e-10, "{dense} vs {fast}");
    }

    #[test]
    fn clustered_spectrum_keeps_degenerate_block_orthogonal_to_w() {
        // At this coupling a relevant root sits 6e-3 from a sixfold pole.
        let g = GraphFamily::lattice(3, 8).unwrap();
        let gamma = 0.297_405_251_543_952_3;
        let oracle = DenseOracle::new(&g, gamma, 0, DEFAULT_ORACLE_CAP).unwrap();
        let pole = gamma * 2.0 * (5.0 + 0.5f64.sqrt());
        let (mut count, mut worst) = (0, 0.0f64);
        for (e, w) in oracle.eigenvalues.iter().zip(oracle.w_weights()) {
            if (e - pole).abs() < 1e-9 {
                count += 1;
                worst = worst.max(w);
            }
        }
        assert_eq!(count, 5);
        assert!(worst < 1e-20, "{worst}");
    }

    #[test]
    fn hypercube_ground_weight_near_criticality() {
        let g = GraphFamily::hypercube(8).unwrap();
        let gamma = 0.090_840_997_426_163_14;
        let oracle = DenseOracle::new(&g, gamma, 0, DEFAULT_ORACLE_CAP).unwrap();
        let ls = level_spectrum(&g).unwrap();
        let root = crate::secular::solve_lowest(&ls, gamma, 1).unwrap()[0];
        assert!((oracle.eigenvalues[0] - root.energy).abs() < 1e-12);
        assert!((oracle.w_weights()[0] - root.w_overlap_sq).abs() < 1e-10);
    }

    #[test]
    fn marked_vertex_choice_is_irrelevant() {
        let g = GraphFamily::hypercube(6).unwrap();
        let spec = solve_spectrum(&level_spectrum(&g).unwrap(), 0.2).unwrap();
        for w in [0, 5, 33, 63] {
            for t in [2.0, 11.0] {
                let dense = dense_oracle(&g, 0.2, w, t).unwrap();
                let fast = amplitude(&spec, t).unwrap();
                assert!((dense - fast).norm() < 1e-10);
            }
        }
    }
}
