//! Minimization of `φ(Y) = max_i c_i ‖(A_0 + Y K^*) E_i‖_F`, where `E_i` selects
//! a group of columns and `K` is an orthonormal basis of the free directions.
//!
//! A subgradient phase runs first. An optional barrier-Newton phase then
//! solves the epigraph form `min t s.t. c_i² ‖A_i(Y)‖_F² ≤ t` to high accuracy.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, max_imag, re, Mat, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Step length numerator, as a fraction of `‖A_0‖_F`.
    pub step_scale: f64,
    /// Relative improvement of the best value over `patience` iterations
    /// below which the subgradient phase counts as converged.
    pub tol: f64,
    pub patience: usize,
    /// Refine with the barrier-Newton phase.
    pub polish: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 50_000,
            step_scale: 0.1,
            tol: 1e-10,
            patience: 5_000,
            polish: true,
        }
    }
}

impl SolverConfig {
    pub fn subgradient_only() -> Self {
        Self {
            polish: false,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverDiagnostics {
    pub iterations: usize,
    pub converged: bool,
    /// Relative improvement of the best value over the last `patience` iterations.
    pub improvement: f64,
    pub phi_start: f64,
    pub phi_subgradient: f64,
    pub phi_final: f64,
    pub polished: bool,
    pub newton_steps: usize,
}

#[derive(Clone, Debug)]
pub struct MinimaxProblem {
    pub a0: Mat,
    pub kernel: Mat,
    /// `(first column, column count, c_i)` for each group.
    pub groups: Vec<(usize, usize, f64)>,
}

#[derive(Clone, Debug)]
pub struct MinimaxSolution {
    pub a: Mat,
    pub phi: f64,
    pub diagnostics: SolverDiagnostics,
}

impl MinimaxProblem {
    pub fn member(&self, y: &Mat) -> Mat {
        &self.a0 + y * self.kernel.adjoint()
    }

    /// `c_i ‖A E_i‖_F` for each group.
    pub fn group_values(&self, a: &Mat) -> Vec<f64> {
        self.groups
            .iter()
            .map(|&(o, n, c)| c * frobenius_norm(&a.columns(o, n).into_owned()))
            .collect()
    }

    pub fn objective(&self, a: &Mat) -> f64 {
        self.group_values(a).into_iter().fold(0.0, f64::max)
    }

    fn is_real(&self) -> bool {
        max_imag(&self.a0) == 0.0 && max_imag(&self.kernel) == 0.0
    }
}

fn first_argmax(values: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

struct Subgradient {
    y: Mat,
    phi: f64,
    iterations: usize,
    converged: bool,
    improvement: f64,
}

fn subgradient(problem: &MinimaxProblem, cfg: &SolverConfig) -> Subgradient {
    let d = problem.a0.nrows();
    let k = problem.kernel.ncols();
    let mut y = Mat::zeros(d, k);
    let mut best_y = y.clone();
    let mut best = problem.objective(&problem.a0);
    let scale = cfg.step_scale * frobenius_norm(&problem.a0);
    let patience = cfg.patience.max(1);
    let mut history = std::collections::VecDeque::with_capacity(patience + 1);
    let mut improvement = f64::INFINITY;

    for iter in 1..=cfg.max_iters {
        let a = problem.member(&y);
        let values = problem.group_values(&a);
        let (i, phi) = first_argmax(&values);
        if phi < best {
            best = phi;
            best_y = y.clone();
        }
        history.push_back(best);
        if history.len() > patience {
            let old = history.pop_front().unwrap_or(best);
            improvement = if best > 0.0 { (old - best) / best } else { 0.0 };
            if improvement <= cfg.tol {
                return Subgradient {
                    y: best_y,
                    phi: best,
                    iterations: iter,
                    converged: true,
                    improvement,
                };
            }
        }
        let (o, n, c) = problem.groups[i];
        let block = a.columns(o, n).into_owned();
        let norm = frobenius_norm(&block);
        if norm == 0.0 {
            return Subgradient {
                y: best_y,
                phi: best,
                iterations: iter,
                converged: true,
                improvement: 0.0,
            };
        }
        let g = block * problem.kernel.rows(o, n) * re(c / norm);
        let gnorm = frobenius_norm(&g);
        if gnorm <= 1e-15 * c {
            // zero is a subgradient: the current point is optimal
            return Subgradient {
                y: best_y,
                phi: best,
                iterations: iter,
                converged: true,
                improvement: 0.0,
            };
        }
        y -= g * re(scale / ((iter as f64).sqrt() * gnorm));
    }
    Subgradient {
        y: best_y,
        phi: best,
        iterations: cfg.max_iters,
        converged: false,
        improvement,
    }
}

/// Real parametrization of `Y` together with the quadratic model of each
/// squared group norm: `q_i(y) = c_i² (κ_i + 2 g_iᵀ y + yᵀ H_i y)`.
struct Epigraph {
    real: bool,
    d: usize,
    k: usize,
    kappa: Vec<f64>,
    g: Vec<DVector<f64>>,
    h: Vec<DMatrix<f64>>,
    c2: Vec<f64>,
}

impl Epigraph {
    fn n(&self) -> usize {
        if self.real {
            self.d * self.k
        } else {
            2 * self.d * self.k
        }
    }

    /// `(row a, column b, unit s)` for each real variable.
    fn var(&self, idx: usize) -> (usize, usize, C64) {
        let dk = self.d * self.k;
        let (base, s) = if idx < dk {
            (idx, C64::new(1.0, 0.0))
        } else {
            (idx - dk, C64::new(0.0, 1.0))
        };
        (base / self.k, base % self.k, s)
    }

    fn build(problem: &MinimaxProblem) -> Self {
        let d = problem.a0.nrows();
        let k = problem.kernel.ncols();
        let mut e = Epigraph {
            real: problem.is_real(),
            d,
            k,
            kappa: Vec::new(),
            g: Vec::new(),
            h: Vec::new(),
            c2: Vec::new(),
        };
        let n = e.n();
        for &(o, len, c) in &problem.groups {
            let a0i = problem.a0.columns(o, len).into_owned();
            let ki = problem.kernel.rows(o, len).into_owned();
            let m = &a0i * &ki;
            let gram = ki.adjoint() * &ki;
            let mut g = DVector::zeros(n);
            let mut h = DMatrix::zeros(n, n);
            for p in 0..n {
                let (a, b, s) = e.var(p);
                g[p] = (m[(a, b)].conj() * s).re;
                for q in 0..n {
                    let (a2, b2, s2) = e.var(q);
                    if a == a2 {
                        h[(p, q)] = (s * gram[(b, b2)] * s2.conj()).re;
                    }
                }
            }
            e.kappa.push(frobenius_norm(&a0i).powi(2));
            e.g.push(g);
            e.h.push(h);
            e.c2.push(c * c);
        }
        e
    }

    fn to_y(&self, x: &DVector<f64>) -> Mat {
        let mut y = Mat::zeros(self.d, self.k);
        for p in 0..self.n() {
            let (a, b, s) = self.var(p);
            y[(a, b)] += s * x[p];
        }
        y
    }

    fn flatten(&self, y: &Mat) -> DVector<f64> {
        let dk = self.d * self.k;
        DVector::from_fn(self.n(), |p, _| {
            let (a, b, _) = self.var(p);
            if p < dk {
                y[(a, b)].re
            } else {
                y[(a, b)].im
            }
        })
    }

    fn q(&self, i: usize, x: &DVector<f64>) -> f64 {
        self.c2[i] * (self.kappa[i] + 2.0 * self.g[i].dot(x) + x.dot(&(&self.h[i] * x)))
    }

    fn grad_q(&self, i: usize, x: &DVector<f64>) -> DVector<f64> {
        (&self.g[i] + &self.h[i] * x) * (2.0 * self.c2[i])
    }
}

/// Largest number of real variables for which the Newton phase is attempted.
const POLISH_MAX_VARS: usize = 1500;

/// Barrier method on `min t s.t. q_i(x) ≤ t`. Returns the refined point and
/// the number of Newton steps, or `None` if the phase broke down.
fn polish(problem: &MinimaxProblem, y0: &Mat) -> Option<(Mat, usize)> {
    let e = Epigraph::build(problem);
    let n = e.n();
    if n == 0 || n > POLISH_MAX_VARS {
        return None;
    }
    let m = problem.groups.len();
    let mut x = e.flatten(y0);
    let qmax = |x: &DVector<f64>| (0..m).map(|i| e.q(i, x)).fold(f64::NEG_INFINITY, f64::max);
    let q0 = qmax(&x);
    let scale = q0.max(1e-300);
    let mut t = q0 + 1e-2 * scale;
    let mut tau = m as f64 / (1e-2 * scale);
    let mut steps = 0;

    let barrier = |x: &DVector<f64>, t: f64, tau: f64| -> f64 {
        let mut f = tau * t;
        for i in 0..m {
            let s = t - e.q(i, x);
            if s <= 0.0 {
                return f64::INFINITY;
            }
            f -= s.ln();
        }
        f
    };

    for _outer in 0..60 {
        for _inner in 0..100 {
            let mut grad = DVector::<f64>::zeros(n + 1);
            let mut hess = DMatrix::<f64>::zeros(n + 1, n + 1);
            grad[n] = tau;
            for i in 0..m {
                let s = t - e.q(i, &x);
                let gq = e.grad_q(i, &x);
                let inv = 1.0 / s;
                let inv2 = inv * inv;
                grad.rows_mut(0, n).axpy(inv, &gq, 1.0);
                grad[n] -= inv;
                {
                    let mut hy = hess.view_mut((0, 0), (n, n));
                    hy += &e.h[i] * (2.0 * e.c2[i] * inv);
                    hy.ger(inv2, &gq, &gq, 1.0);
                }
                for p in 0..n {
                    hess[(p, n)] -= gq[p] * inv2;
                    hess[(n, p)] -= gq[p] * inv2;
                }
                hess[(n, n)] += inv2;
            }
            let step = match hess.clone().cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => hess.clone().lu().solve(&(-&grad))?,
            };
            let decrement = -grad.dot(&step);
            if !decrement.is_finite() {
                return None;
            }
            if decrement / 2.0 <= 1e-14 {
                break;
            }
            let f0 = barrier(&x, t, tau);
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let xn = &x + step.rows(0, n) * alpha;
                let tn = t + step[n] * alpha;
                let f1 = barrier(&xn, tn, tau);
                if f1 <= f0 - 0.25 * alpha * decrement {
                    x = xn;
                    t = tn;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            steps += 1;
            if !accepted {
                break;
            }
        }
        if (m as f64) / tau < 1e-15 * scale {
            break;
        }
        tau *= 10.0;
    }
    Some((e.to_y(&x), steps))
}

pub fn solve(problem: &MinimaxProblem, cfg: &SolverConfig) -> Result<MinimaxSolution> {
    let phi_start = problem.objective(&problem.a0);
    if problem.kernel.ncols() == 0 {
        return Ok(MinimaxSolution {
            a: problem.a0.clone(),
            phi: phi_start,
            diagnostics: SolverDiagnostics {
                iterations: 0,
                converged: true,
                improvement: 0.0,
                phi_start,
                phi_subgradient: phi_start,
                phi_final: phi_start,
                polished: false,
                newton_steps: 0,
            },
        });
    }
    let sg = subgradient(problem, cfg);
    let mut y = sg.y.clone();
    let mut phi = sg.phi;
    let mut polished = false;
    let mut newton_steps = 0;
    if cfg.polish {
        if let Some((yp, steps)) = polish(problem, &sg.y) {
            newton_steps = steps;
            let phi_p = problem.objective(&problem.member(&yp));
            if phi_p <= phi * (1.0 + 1e-12) {
                y = yp;
                phi = phi_p;
                polished = true;
            }
        }
    }
    let converged = sg.converged || polished;
    if !converged {
        return Err(Error::NonConvergence {
            iterations: sg.iterations,
            improvement: sg.improvement,
        });
    }
    Ok(MinimaxSolution {
        a: problem.member(&y),
        phi,
        diagnostics: SolverDiagnostics {
            iterations: sg.iterations,
            converged,
            improvement: sg.improvement,
            phi_start,
            phi_subgradient: sg.phi,
            phi_final: phi,
            polished,
            newton_steps,
        },
    })
}
