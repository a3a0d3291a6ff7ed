use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::gen_gaussian::TailRegime;
use crate::prior::{Posterior, Residual};

/// Posterior with `K = σ⁻¹ A B⁻¹` materialized as a dense `m × n` matrix.
#[derive(Clone, Debug)]
pub struct DenseModel {
    posterior: Posterior,
    k: Mat<f64>,
    y_scaled: Vec<f64>,
}

impl DenseModel {
    pub fn new(posterior: &Posterior) -> Result<Self> {
        let (m, n) = posterior.shape();
        let cols = posterior.scaled_forward_matrix()?;
        let k = Mat::from_fn(m, n, |i, j| cols[j * m + i]);
        let y_scaled = posterior.data().iter().map(|v| v / posterior.sigma()).collect();
        Ok(Self {
            posterior: posterior.clone(),
            k,
            y_scaled,
        })
    }

    pub fn posterior(&self) -> &Posterior {
        &self.posterior
    }

    /// `K = σ⁻¹ A B⁻¹`.
    pub fn k(&self) -> MatRef<'_, f64> {
        self.k.as_ref()
    }

    /// `y / σ`.
    pub fn y_scaled(&self) -> &[f64] {
        &self.y_scaled
    }

    /// `(m, n)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.k.nrows(), self.k.ncols())
    }

    /// `F(h)` using the dense `K`.
    pub fn residual(&self, h: &[f64]) -> Result<Residual> {
        let (_, n) = self.shape();
        if h.len() != n {
            return Err(Error::Dimension(format!("state has {} entries, expected {n}", h.len())));
        }
        let (g, g_deriv, regime) = self.posterior.prior().transform().evaluate(h)?;
        let kg = mat_vec(self.k.as_ref(), &g);
        let data = kg.iter().zip(&self.y_scaled).map(|(a, y)| a - y).collect();
        Ok(Residual {
            prior: h.to_vec(),
            data,
            g_deriv,
            regime,
        })
    }

    /// `½ ‖F(h)‖²`, the negative log posterior in `h` up to a constant.
    pub fn objective(&self, h: &[f64]) -> Result<f64> {
        Ok(0.5 * self.residual(h)?.norm_sq())
    }

    /// Dense `(m + n) × n` Jacobian `[I; K diag(g'(h))]`.
    pub fn jacobian(&self, h: &[f64]) -> Result<Mat<f64>> {
        let d = self.posterior.prior().transform().jacobian_diag(h)?;
        Ok(self.jacobian_from_diag(&d))
    }

    pub(crate) fn jacobian_from_diag(&self, d: &[f64]) -> Mat<f64> {
        let (m, n) = self.shape();
        Mat::from_fn(m + n, n, |i, j| {
            if i < n {
                if i == j {
                    1.0
                } else {
                    0.0
                }
            } else {
                self.k[(i - n, j)] * d[j]
            }
        })
    }
}

/// Result of the MAP optimization.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MapEstimate {
    pub h: Vec<f64>,
    pub objective: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub regime: TailRegime,
}

/// Tolerances for the MAP solve.
///
/// The gradient test is `‖JᵀF‖ < grad_tol · max(1, ‖F‖)`: rounding in `JᵀF`
/// grows with the residual, so a purely absolute tolerance can be
/// unreachable for large or noisy problems.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MapOptions {
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for MapOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-8,
            max_iter: 500,
        }
    }
}

/// Minimizes `½ ‖F(h)‖²` by Levenberg-damped Gauss-Newton.
///
/// The damping `μ` starts at `1e-4`, is divided by 10 after an accepted
/// step and multiplied by 10 after a rejected one. Fails with
/// [`Error::MapNotConverged`] (carrying the best iterate) if the gradient
/// test of [`MapOptions`] is not met within `max_iter` iterations.
pub fn solve_map(model: &DenseModel, opts: &MapOptions, h_init: Option<&[f64]>) -> Result<MapEstimate> {
    let (_, n) = model.shape();
    let mut h = match h_init {
        Some(h0) if h0.len() != n => {
            return Err(Error::Dimension(format!("initial state has {} entries, expected {n}", h0.len())))
        }
        Some(h0) if h0.iter().any(|v| !v.is_finite()) => {
            return Err(Error::Domain("initial state must be finite".into()))
        }
        Some(h0) => h0.to_vec(),
        None => vec![0.0; n],
    };
    let ktk = model.k().transpose() * model.k();
    let mut res = model.residual(&h)?;
    let mut obj = 0.5 * res.norm_sq();
    let mut mu = 1e-4;
    let mut iterations = 0;
    let mut grad = gradient(model, &res);
    let mut grad_norm = norm(&grad);
    let tol = |obj: f64| opts.grad_tol * (2.0 * obj).sqrt().max(1.0);

    while grad_norm >= tol(obj) {
        if iterations >= opts.max_iter {
            log::warn!("MAP solve stopped after {iterations} iterations, gradient norm {grad_norm:.3e}");
            return Err(Error::MapNotConverged {
                iterations,
                grad_norm,
                best: h,
            });
        }
        iterations += 1;
        let d = &res.g_deriv;
        // Gauss-Newton matrix I + D KᵀK D.
        let gn = Mat::from_fn(n, n, |i, j| {
            d[i] * ktk[(i, j)] * d[j] + if i == j { 1.0 } else { 0.0 }
        });
        let mut accepted = false;
        while mu < 1e12 {
            let mut damped = gn.clone();
            for i in 0..n {
                damped[(i, i)] += mu;
            }
            let Ok(chol) = damped.llt(Side::Lower) else {
                mu *= 10.0;
                continue;
            };
            let rhs = Mat::from_fn(n, 1, |i, _| -grad[i]);
            let step = chol.solve(&rhs);
            let trial: Vec<f64> = (0..n).map(|i| h[i] + step[(i, 0)]).collect();
            let trial_res = model.residual(&trial)?;
            let trial_obj = 0.5 * trial_res.norm_sq();
            // Near the optimum the decrease can fall below rounding in the
            // objective; there a smaller gradient decides.
            let trial_grad = gradient(model, &trial_res);
            let decrease = trial_obj < obj
                || (trial_obj <= obj + 16.0 * f64::EPSILON * obj && norm(&trial_grad) < grad_norm);
            if trial_obj.is_finite() && decrease {
                h = trial;
                res = trial_res;
                obj = trial_obj;
                grad = trial_grad;
                mu = (mu / 10.0).max(1e-12);
                accepted = true;
                break;
            }
            let step_norm = (0..n).map(|i| step[(i, 0)].powi(2)).sum::<f64>().sqrt();
            if step_norm <= f64::EPSILON * (1.0 + norm(&h)) {
                break;
            }
            mu *= 10.0;
        }
        grad_norm = norm(&grad);
        if !accepted {
            // No descent is possible at working precision.
            log::debug!("MAP solve stalled at gradient norm {grad_norm:.3e}");
            if grad_norm < tol(obj) {
                break;
            }
            return Err(Error::MapNotConverged {
                iterations,
                grad_norm,
                best: h,
            });
        }
    }
    log::info!("MAP solve: {iterations} iterations, objective {obj:.6e}, gradient norm {grad_norm:.3e}");
    Ok(MapEstimate {
        h,
        objective: obj,
        grad_norm,
        iterations,
        regime: res.regime,
    })
}

/// `Jᵀ F = h + D Kᵀ r_data`.
fn gradient(model: &DenseModel, res: &Residual) -> Vec<f64> {
    let ktr = mat_t_vec(model.k(), &res.data);
    res.prior
        .iter()
        .zip(&res.g_deriv)
        .zip(&ktr)
        .map(|((h, d), k)| h + d * k)
        .collect()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn column(a: MatRef<'_, f64>, j: usize) -> &[f64] {
    a.col(j)
        .try_as_col_major()
        .expect("dense matrices are column-major")
        .as_slice()
}

pub(crate) fn mat_vec(a: MatRef<'_, f64>, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        if xj == 0.0 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(column(a, j)) {
            *o += v * xj;
        }
    }
    out
}

pub(crate) fn mat_t_vec(a: MatRef<'_, f64>, x: &[f64]) -> Vec<f64> {
    (0..a.ncols())
        .map(|j| column(a, j).iter().zip(x).map(|(v, w)| v * w).sum())
        .collect()
}
