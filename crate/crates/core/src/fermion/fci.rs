use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::operator::{Determinant, FermionOperator};
use crate::error::{Error, Result};

/// Largest sector dimension accepted by default.
pub const DEFAULT_SECTOR_CAP: usize = 2_000_000;
/// Sectors smaller than this are diagonalized densely.
pub const DENSE_BELOW: usize = 2_000;

#[derive(Debug, Clone, Copy)]
pub struct FciOptions {
    pub max_dim: usize,
    pub dense_below: usize,
    /// Residual norm target for the iterative solver.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FciOptions {
    fn default() -> Self {
        Self {
            max_dim: DEFAULT_SECTOR_CAP,
            dense_below: DENSE_BELOW,
            tol: 1e-10,
            max_iter: 100,
        }
    }
}

/// Lowest eigenpair of an operator restricted to one sector.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub determinants: Vec<Determinant>,
    pub vector: Vec<Complex64>,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn combinations(modes: &[usize], k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    fn rec(modes: &[usize], k: usize, start: usize, acc: u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..modes.len() {
            if modes.len() - i < k {
                break;
            }
            rec(modes, k - 1, i + 1, acc | (1u64 << modes[i]), out);
        }
    }
    rec(modes, k, 0, 0, &mut out);
    out
}

/// Determinants over `n_modes` spin orbitals with the given electron count
/// and `2 Sz`, in ascending bitmask order.
pub fn sector_determinants(n_modes: usize, n_electrons: usize, ms2: i32, cap: usize) -> Result<Vec<Determinant>> {
    let empty = Error::EmptySector { n_electrons, ms2 };
    let ne = n_electrons as i32;
    if (ne + ms2) % 2 != 0 || ms2.abs() > ne {
        return Err(empty);
    }
    let n_alpha = ((ne + ms2) / 2) as usize;
    let n_beta = ((ne - ms2) / 2) as usize;
    let alpha_modes: Vec<usize> = (0..n_modes).step_by(2).collect();
    let beta_modes: Vec<usize> = (1..n_modes).step_by(2).collect();
    let dim = binomial(alpha_modes.len(), n_alpha).saturating_mul(binomial(beta_modes.len(), n_beta));
    if dim == 0 {
        return Err(empty);
    }
    if dim > cap {
        return Err(Error::SectorTooLarge { dim, cap });
    }
    let alphas = combinations(&alpha_modes, n_alpha);
    let betas = combinations(&beta_modes, n_beta);
    let mut dets: Vec<Determinant> = alphas
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| Determinant(a | b)))
        .collect();
    dets.sort_unstable();
    Ok(dets)
}

/// Sector Hamiltonian in coordinate form (row, col, value).
struct SparseMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMatrix {
    fn build(op: &FermionOperator, dets: &[Determinant]) -> Self {
        let index: HashMap<Determinant, usize> = dets.iter().enumerate().map(|(i, &d)| (d, i)).collect();
        let terms: Vec<_> = op.terms().collect();
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dets.len()];
        for (col, det) in dets.iter().enumerate() {
            let mut acc: HashMap<usize, Complex64> = HashMap::new();
            for (s, c) in &terms {
                if let Some((sign, out)) = det.apply(s) {
                    if let Some(&row) = index.get(&out) {
                        *acc.entry(row).or_default() += c * sign;
                    }
                }
            }
            let mut entries: Vec<_> = acc.into_iter().collect();
            entries.sort_by_key(|e| e.0);
            for (row, v) in entries {
                rows[row].push((col, v));
            }
        }
        Self { dim: dets.len(), rows }
    }

    fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (row, entries) in self.rows.iter().enumerate() {
            y[row] = entries.iter().map(|(c, v)| v * x[*c]).sum();
        }
    }

    fn dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (row, entries) in self.rows.iter().enumerate() {
            for &(col, v) in entries {
                m[(row, col)] = v;
            }
        }
        m
    }

    fn is_real(&self) -> bool {
        self.rows.iter().flatten().all(|(_, v)| v.im.abs() < 1e-14)
    }

    fn diagonal(&self) -> Vec<f64> {
        self.rows
            .iter()
            .enumerate()
            .map(|(r, e)| e.iter().find(|(c, _)| *c == r).map(|(_, v)| v.re).unwrap_or(0.0))
            .collect()
    }
}

/// Lowest eigenvalue and eigenvector of `op` in the (`n_electrons`, `ms2`)
/// sector. Dense below `opts.dense_below`, Lanczos above.
pub fn exact_ground_state(op: &FermionOperator, n_electrons: usize, ms2: i32, opts: &FciOptions) -> Result<GroundState> {
    let dets = sector_determinants(op.n_modes(), n_electrons, ms2, opts.max_dim)?;
    let h = SparseMatrix::build(op, &dets);
    let (energy, vector) = if h.dim < opts.dense_below {
        dense_lowest(&h)
    } else {
        lanczos_lowest(&h, opts)?
    };
    Ok(GroundState {
        energy,
        determinants: dets,
        vector,
    })
}

fn dense_lowest(h: &SparseMatrix) -> (f64, Vec<Complex64>) {
    if h.is_real() {
        let m = h.dense().map(|c| c.re);
        let m = (&m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(m);
        let (idx, &e) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let v = eig.eigenvectors.column(idx).iter().map(|&x| Complex64::new(x, 0.0)).collect();
        (e, v)
    } else {
        let m = h.dense();
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(m);
        let (idx, &e) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        (e, eig.eigenvectors.column(idx).iter().copied().collect())
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Restarted Lanczos with full reorthogonalization. Each restart begins from
/// the current Ritz vector.
fn lanczos_lowest(h: &SparseMatrix, opts: &FciOptions) -> Result<(f64, Vec<Complex64>)> {
    let n = h.dim;
    let krylov = n.min(60);
    // start from the lowest-diagonal determinant, lightly mixed
    let diag = h.diagonal();
    let start = diag
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut v0 = vec![Complex64::new(1e-3, 0.0); n];
    for (i, x) in v0.iter_mut().enumerate() {
        *x = Complex64::new(1e-3 * ((i % 7) as f64 - 3.0) / 3.0, 0.0);
    }
    v0[start] = Complex64::new(1.0, 0.0);
    let nv = norm(&v0);
    v0.iter_mut().for_each(|x| *x /= nv);

    let mut residual = f64::INFINITY;
    let mut w = vec![Complex64::default(); n];
    for _ in 0..opts.max_iter {
        let mut basis: Vec<Vec<Complex64>> = vec![v0.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for k in 0..krylov {
            h.matvec(&basis[k], &mut w);
            let a = dot(&basis[k], &w).re;
            alpha.push(a);
            for _ in 0..2 {
                for b in &basis {
                    let proj = dot(b, &w);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
                }
            }
            let bnorm = norm(&w);
            if k + 1 == krylov || bnorm < 1e-12 {
                break;
            }
            beta.push(bnorm);
            basis.push(w.iter().map(|x| x / bnorm).collect());
        }
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (idx, &e) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let y: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
        let mut ritz = vec![Complex64::default(); n];
        for (k, b) in basis.iter().take(m).enumerate() {
            ritz.iter_mut().zip(b).for_each(|(r, x)| *r += x * y[k]);
        }
        let rn = norm(&ritz);
        ritz.iter_mut().for_each(|x| *x /= rn);
        h.matvec(&ritz, &mut w);
        residual = w.iter().zip(&ritz).map(|(hw, r)| (hw - r * e).norm_sqr()).sum::<f64>().sqrt();
        v0 = ritz;
        if residual < opts.tol {
            return Ok((e, v0));
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        residual,
    })
}
