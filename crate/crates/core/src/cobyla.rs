//! Derivative-free minimization by linear approximations over a simplex
//! with a shrinking trust region (COBYLA without constraints).

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CobylaOptions {
    pub rhobeg: f64,
    pub rhoend: f64,
    pub max_evals: usize,
}

impl Default for CobylaOptions {
    fn default() -> Self {
        Self {
            rhobeg: 0.1,
            rhoend: 1e-6,
            max_evals: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CobylaResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub n_evals: usize,
    /// `(evaluation index, best value seen so far)` after every evaluation.
    pub trace: Vec<(usize, f64)>,
    pub converged: bool,
}

const ALPHA: f64 = 0.25;
const BETA: f64 = 2.1;
const GAMMA: f64 = 0.5;
const DELTA: f64 = 1.1;

struct Tracker<'a, F> {
    f: &'a mut F,
    n_evals: usize,
    max_evals: usize,
    best_x: Vec<f64>,
    best_f: f64,
    trace: Vec<(usize, f64)>,
}

impl<F: FnMut(&[f64]) -> f64> Tracker<'_, F> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.n_evals >= self.max_evals {
            return None;
        }
        let v = (self.f)(x);
        self.n_evals += 1;
        // strict comparison: the first of equal values wins
        if v < self.best_f || self.n_evals == 1 {
            self.best_f = v;
            self.best_x = x.to_vec();
        }
        self.trace.push((self.n_evals, self.best_f));
        Some(v)
    }
}

fn finish<F>(tr: Tracker<'_, F>, converged: bool) -> CobylaResult {
    CobylaResult {
        x: tr.best_x,
        f: tr.best_f,
        n_evals: tr.n_evals,
        trace: tr.trace,
        converged,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimize `f` from `x0`. Non-finite objective values are treated as
/// `+inf`.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &CobylaOptions) -> Result<CobylaResult> {
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("initial point is not finite".into()));
    }
    if !(opts.rhobeg > 0.0 && opts.rhoend > 0.0 && opts.rhoend <= opts.rhobeg) {
        return Err(Error::Invalid("need 0 < rhoend <= rhobeg".into()));
    }
    let n = x0.len();
    let mut g = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut tr = Tracker {
        f: &mut g,
        n_evals: 0,
        max_evals: opts.max_evals.max(1),
        best_x: x0.to_vec(),
        best_f: f64::INFINITY,
        trace: Vec::new(),
    };

    let mut rho = opts.rhobeg;
    let mut pole = x0.to_vec();
    let Some(mut fpole) = tr.eval(&pole) else {
        return Ok(finish(tr, false));
    };
    if n == 0 {
        return Ok(finish(tr, true));
    }
    // sim[j] is the displacement of vertex j from the pole; simi is its
    // inverse, stored by rows so that simi[j] . sim[k] = delta_jk.
    let mut sim: Vec<Vec<f64>> = (0..n).map(|j| unit(n, j, rho)).collect();
    let mut simi: Vec<Vec<f64>> = (0..n).map(|j| unit(n, j, 1.0 / rho)).collect();
    let mut fval = vec![0.0; n];
    for j in 0..n {
        let x: Vec<f64> = pole.iter().zip(&sim[j]).map(|(p, d)| p + d).collect();
        match tr.eval(&x) {
            Some(v) => fval[j] = v,
            None => return Ok(finish(tr, false)),
        }
    }

    let mut ibrnch = false;
    loop {
        // make the pole the best vertex
        if let Some(l) = (0..n).filter(|&j| fval[j] < fpole).min_by(|&a, &b| fval[a].total_cmp(&fval[b])) {
            let shift = sim[l].clone();
            for (p, d) in pole.iter_mut().zip(&shift) {
                *p += d;
            }
            std::mem::swap(&mut fpole, &mut fval[l]);
            for (k, col) in sim.iter_mut().enumerate() {
                if k == l {
                    col.iter_mut().for_each(|v| *v = -*v);
                } else {
                    col.iter_mut().zip(&shift).for_each(|(v, s)| *v -= s);
                }
            }
            let mut row = vec![0.0; n];
            for r in &simi {
                row.iter_mut().zip(r).for_each(|(a, b)| *a -= b);
            }
            simi[l] = row;
        }

        // linear model gradient and simplex shape
        let mut grad = vec![0.0; n];
        for j in 0..n {
            let df = fval[j] - fpole;
            grad.iter_mut().zip(&simi[j]).for_each(|(g, s)| *g += df * s);
        }
        let vsig: Vec<f64> = simi.iter().map(|r| 1.0 / dot(r, r).sqrt()).collect();
        let veta: Vec<f64> = sim.iter().map(|c| dot(c, c).sqrt()).collect();
        let acceptable = (0..n).all(|j| vsig[j] >= ALPHA * rho && veta[j] <= BETA * rho);

        if !ibrnch && !acceptable {
            // geometry step: replace the worst-shaped vertex
            let jdrop = match (0..n).filter(|&j| veta[j] > BETA * rho).max_by(|&a, &b| veta[a].total_cmp(&veta[b])) {
                Some(j) => j,
                None => (0..n).min_by(|&a, &b| vsig[a].total_cmp(&vsig[b])).unwrap(),
            };
            let scale = GAMMA * rho * vsig[jdrop];
            let mut dx: Vec<f64> = simi[jdrop].iter().map(|s| scale * s).collect();
            if dot(&grad, &dx) > 0.0 {
                dx.iter_mut().for_each(|v| *v = -*v);
            }
            let x: Vec<f64> = pole.iter().zip(&dx).map(|(p, d)| p + d).collect();
            let Some(v) = tr.eval(&x) else {
                return Ok(finish(tr, false));
            };
            replace_vertex(&mut sim, &mut simi, jdrop, &dx);
            fval[jdrop] = v;
            ibrnch = true;
            continue;
        }
        ibrnch = false;

        let gnorm = dot(&grad, &grad).sqrt();
        let mut improved = false;
        if gnorm > 0.0 && gnorm.is_finite() {
            let dx: Vec<f64> = grad.iter().map(|g| -rho * g / gnorm).collect();
            let x: Vec<f64> = pole.iter().zip(&dx).map(|(p, d)| p + d).collect();
            let Some(fnew) = tr.eval(&x) else {
                return Ok(finish(tr, false));
            };
            let prerem = rho * gnorm;
            let trured = fpole - fnew;

            let mut ratio = if trured <= 0.0 { 1.0 } else { 0.0 };
            let mut jdrop = None;
            let mut sigbar = vec![0.0; n];
            for j in 0..n {
                let temp = dot(&simi[j], &dx).abs();
                if temp > ratio {
                    jdrop = Some(j);
                    ratio = temp;
                }
                sigbar[j] = temp * vsig[j];
            }
            let mut edgmax = DELTA * rho;
            let mut l = None;
            for j in 0..n {
                if sigbar[j] >= ALPHA * rho || sigbar[j] >= vsig[j] {
                    let temp = if trured > 0.0 {
                        dx.iter().zip(&sim[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
                    } else {
                        veta[j]
                    };
                    if temp > edgmax {
                        l = Some(j);
                        edgmax = temp;
                    }
                }
            }
            if l.is_some() {
                jdrop = l;
            }
            if let Some(j) = jdrop {
                replace_vertex(&mut sim, &mut simi, j, &dx);
                fval[j] = fnew;
                improved = trured > 0.0 && trured >= 0.1 * prerem;
            }
        }
        if improved {
            continue;
        }
        if !acceptable {
            continue;
        }
        if rho <= opts.rhoend {
            return Ok(finish(tr, true));
        }
        rho *= 0.5;
        if rho <= 1.5 * opts.rhoend {
            rho = opts.rhoend;
        }
    }
}

fn unit(n: usize, j: usize, v: f64) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[j] = v;
    e
}

/// Replace vertex `l` by displacement `dx` and update the inverse rows.
fn replace_vertex(sim: &mut [Vec<f64>], simi: &mut [Vec<f64>], l: usize, dx: &[f64]) {
    sim[l] = dx.to_vec();
    let pivot = dot(&simi[l], dx);
    let row_l: Vec<f64> = simi[l].iter().map(|v| v / pivot).collect();
    for (k, row) in simi.iter_mut().enumerate() {
        if k != l {
            let t = dot(row, dx);
            row.iter_mut().zip(&row_l).for_each(|(r, s)| *r -= t * s);
        }
    }
    simi[l] = row_l;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let r = minimize(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2), &[0.0, 0.0], &CobylaOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] + 0.5).abs() < 1e-4, "{:?}", r.x);
        assert!(r.trace.windows(2).all(|w| w[1].1 <= w[0].1));
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let opts = CobylaOptions {
            rhobeg: 0.5,
            ..Default::default()
        };
        let r = minimize(f, &[-1.2, 1.0], &opts).unwrap();
        assert!(r.f < 1e-6, "{r:?}");
    }

    #[test]
    fn evaluation_budget() {
        let opts = CobylaOptions {
            max_evals: 5,
            ..Default::default()
        };
        let r = minimize(|x| x.iter().map(|v| (v - 3.0).powi(2)).sum(), &[0.0; 3], &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.n_evals, 5);
    }

    #[test]
    fn constant_function_stops_immediately() {
        let r = minimize(|_| 0.0, &[0.3, 0.2], &CobylaOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.n_evals <= 20, "{}", r.n_evals);
        assert_eq!(r.x, vec![0.3, 0.2]);
    }
}
