//! Randomize-then-optimize proposals with a Metropolis-Hastings correction.
//!
//! In the whitened variable `h` (with `f = B⁻¹ g(h)`) the posterior is
//! `π(h) ∝ exp(-½ ‖F(h)‖²)` with `F(h) = [h; K g(h) - y/σ]` and
//! `K = σ⁻¹ A B⁻¹`. Each proposal solves `Qᵀ(F(h) - v) = 0` for a fresh
//! `v ~ N(0, I)`, where `Q` is the thin-QR factor of the Jacobian at the MAP
//! point. The proposal density is corrected with the weight
//! `c(h) = |det QᵀJ(h)| exp(½‖F(h)‖² - ½‖QᵀF(h)‖²)`.

mod model;

use std::time::Instant;

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gen_gaussian::TailRegime;
use crate::prior::Posterior;

pub use model::{solve_map, DenseModel, MapEstimate, MapOptions};

use model::{column, mat_t_vec, mat_vec, norm};

/// Where the Metropolis-Hastings chain starts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// The first valid proposal, which counts as accepted.
    #[default]
    FirstProposal,
    /// The MAP point. Its weight is typically far smaller than that of any
    /// proposal, so the chain can stay there for many steps.
    Map,
}

/// Sampler settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RtoConfig {
    pub n_samples: usize,
    /// Upper bound on the proposal cost `e = ‖Qᵀ(F(h) - v)‖²`. Defaults to
    /// `max(1e-8, 1e3 · step_tol)`.
    pub eta: Option<f64>,
    pub map: MapOptions,
    /// Relative step size at which a proposal solve is considered converged.
    pub step_tol: f64,
    /// Newton iterations allowed per proposal.
    pub max_iter: usize,
    pub seed: u64,
    /// Threads used for proposal generation; 0 means all available cores.
    pub workers: usize,
    pub initial_state: InitialState,
}

impl Default for RtoConfig {
    fn default() -> Self {
        Self {
            n_samples: 1000,
            eta: None,
            map: MapOptions::default(),
            step_tol: 1e-11,
            max_iter: 100,
            seed: 0,
            workers: 0,
            initial_state: InitialState::default(),
        }
    }
}

impl RtoConfig {
    pub fn eta(&self) -> f64 {
        self.eta.unwrap_or_else(|| (1e3 * self.step_tol).max(1e-8))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Parameter("n_samples must be positive".into()));
        }
        if !(self.step_tol > 0.0) || !(self.map.grad_tol > 0.0) {
            return Err(Error::Parameter("optimizer tolerances must be positive".into()));
        }
        let eta = self.eta();
        if !(eta > self.step_tol) || !eta.is_finite() {
            return Err(Error::Parameter(format!(
                "eta = {eta} must be finite and exceed the step tolerance {}",
                self.step_tol
            )));
        }
        if self.max_iter == 0 || self.map.max_iter == 0 {
            return Err(Error::Parameter("iteration limits must be positive".into()));
        }
        Ok(())
    }
}

/// Thin QR factor of `J(h_MAP)` and the quantities derived from it that
/// every proposal reuses.
#[derive(Clone, Debug)]
pub struct RtoState {
    map: MapEstimate,
    /// `(m + n) × n`, orthonormal columns.
    q: Mat<f64>,
    /// `QᵀJ(h_MAP)`, upper triangular.
    r: Mat<f64>,
    /// `Q₂ᵀ K` where `Q₂` is the data block of `Q`.
    qk: Mat<f64>,
    /// `Q₂ᵀ y / σ`.
    qy: Vec<f64>,
    /// `G = KᵀK`.
    gram: Mat<f64>,
    /// `g'(h_MAP)`.
    d_map: Vec<f64>,
    /// `ln |det R|`.
    log_det_r: f64,
    log_c_map: f64,
}

/// Thin QR factorization `J = Q R` of a tall Jacobian.
pub fn compute_q(jacobian: MatRef<'_, f64>) -> Result<(Mat<f64>, Mat<f64>)> {
    let qr = jacobian.qr();
    let r = qr.thin_R().to_owned();
    let n = r.ncols();
    let max = (0..n).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if let Some(i) = (0..n).find(|&i| !(r[(i, i)].abs() >= 1e-12 * max)) {
        return Err(Error::Singular(format!(
            "Jacobian is rank deficient: |R[{i},{i}]| = {:.3e}, max {max:.3e}",
            r[(i, i)].abs()
        )));
    }
    Ok((qr.compute_thin_Q(), r))
}

impl RtoState {
    pub fn new(model: &DenseModel, map: MapEstimate) -> Result<Self> {
        let (_, n) = model.shape();
        let jac = model.jacobian(&map.h)?;
        let (q, r) = compute_q(jac.as_ref())?;
        let q2 = q.as_ref().subrows(n, q.nrows() - n);
        let qk = q2.transpose() * model.k();
        let qy = mat_t_vec(q2, model.y_scaled());
        let gram = model.k().transpose() * model.k();
        let d_map = model.posterior().prior().transform().jacobian_diag(&map.h)?;
        let log_det_r = (0..n).map(|i| r[(i, i)].abs().ln()).sum();
        let mut state = Self {
            map,
            q,
            r,
            qk,
            qy,
            gram,
            d_map,
            log_det_r,
            log_c_map: 0.0,
        };
        let h = state.map.h.clone();
        let eval = state.evaluate(model, &h, &vec![0.0; n])?;
        state.log_c_map = state.log_weight(model, &h, &eval)?;
        Ok(state)
    }

    pub fn map(&self) -> &MapEstimate {
        &self.map
    }

    pub fn q(&self) -> MatRef<'_, f64> {
        self.q.as_ref()
    }

    pub fn log_c_map(&self) -> f64 {
        self.log_c_map
    }

    fn n(&self) -> usize {
        self.q.ncols()
    }

    fn q1(&self) -> MatRef<'_, f64> {
        self.q.as_ref().subrows(0, self.n())
    }

    /// Projected residual `r(h) = Qᵀ F(h) - target` and its pieces.
    fn evaluate(&self, model: &DenseModel, h: &[f64], target: &[f64]) -> Result<Projected> {
        let (g, g_deriv, regime) = model.posterior().prior().transform().evaluate(h)?;
        let mut r = mat_t_vec(self.q1(), h);
        let qkg = mat_vec(self.qk.as_ref(), &g);
        for i in 0..r.len() {
            r[i] += qkg[i] - self.qy[i] - target[i];
        }
        Ok(Projected {
            r,
            g,
            g_deriv,
            regime,
        })
    }

    /// `QᵀJ(h) = Q₁ᵀ + Q₂ᵀ K diag(g'(h))`.
    fn projected_jacobian(&self, g_deriv: &[f64]) -> Mat<f64> {
        let q1 = self.q1();
        Mat::from_fn(self.n(), self.n(), |i, j| q1[(j, i)] + self.qk[(i, j)] * g_deriv[j])
    }

    /// `I + E^½ G E^½` with `E = diag(g'(h_MAP) g'(h))`.
    ///
    /// Since `J(h_MAP) = [I; K D₀] = QR`, the projected Jacobian factors as
    /// `QᵀJ(h) = R⁻ᵀ (I + D₀ G D)`, and `D₀ G D` is similar to `E^½ G E^½`.
    /// This makes every determinant and Newton solve a Cholesky problem.
    fn symmetric_core(&self, g_deriv: &[f64]) -> Mat<f64> {
        let e: Vec<f64> = self.d_map.iter().zip(g_deriv).map(|(a, b)| (a * b).sqrt()).collect();
        let mut c = self.gram.clone();
        for j in 0..self.n() {
            let col = c.col_mut(j).try_as_col_major_mut().expect("dense matrices are column-major").as_slice_mut();
            for (i, v) in col.iter_mut().enumerate() {
                *v *= e[i] * e[j];
            }
            col[j] += 1.0;
        }
        c
    }

    /// `ln |det QᵀJ(h)|`.
    fn log_det_projected(&self, g_deriv: &[f64]) -> f64 {
        match self.symmetric_core(g_deriv).llt(Side::Lower) {
            Ok(llt) => {
                let l = llt.L();
                2.0 * (0..self.n()).map(|i| l[(i, i)].ln()).sum::<f64>() - self.log_det_r
            }
            Err(_) => {
                let lu = self.projected_jacobian(g_deriv).partial_piv_lu();
                let u = lu.U();
                (0..self.n()).map(|i| u[(i, i)].abs().ln()).sum()
            }
        }
    }

    /// Solves `QᵀJ(h) x = rhs` in place.
    fn newton_solve(&self, g_deriv: &[f64], rhs: &mut Mat<f64>) {
        let positive = g_deriv.iter().chain(&self.d_map).all(|d| *d > 0.0 && d.is_finite());
        if positive {
            if let Ok(llt) = self.symmetric_core(g_deriv).llt(Side::Lower) {
                // x = P C⁻¹ P⁻¹ Rᵀ rhs with P = diag(√(d₀ / d)).
                let n = self.n();
                let mut z = self.r.transpose() * &*rhs;
                for i in 0..n {
                    z[(i, 0)] *= (g_deriv[i] / self.d_map[i]).sqrt();
                }
                llt.solve_in_place(&mut z);
                for i in 0..n {
                    rhs[(i, 0)] = z[(i, 0)] * (self.d_map[i] / g_deriv[i]).sqrt();
                }
                return;
            }
        }
        self.projected_jacobian(g_deriv).partial_piv_lu().solve_in_place(rhs);
    }

    /// `ln c(h) = ln |det QᵀJ(h)| + ½ ‖(I - QQᵀ) F(h)‖²`.
    fn log_weight(&self, model: &DenseModel, h: &[f64], eval: &Projected) -> Result<f64> {
        let log_det = self.log_det_projected(&eval.g_deriv);

        let kg = mat_vec(model.k(), &eval.g);
        let f: Vec<f64> = h
            .iter()
            .copied()
            .chain(kg.iter().zip(model.y_scaled()).map(|(a, y)| a - y))
            .collect();
        let qtf = mat_t_vec(self.q.as_ref(), &f);
        let proj = mat_vec(self.q.as_ref(), &qtf);
        let perp_sq: f64 = f.iter().zip(&proj).map(|(a, b)| (a - b).powi(2)).sum();
        Ok(log_det + 0.5 * perp_sq)
    }
}

struct Projected {
    r: Vec<f64>,
    g: Vec<f64>,
    g_deriv: Vec<f64>,
    regime: TailRegime,
}

/// Why a proposal was excluded from the Metropolis-Hastings step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposalStatus {
    Valid,
    /// The solve finished but `e >= η`.
    CostAboveThreshold,
    SolverFailed,
    NonFiniteWeight,
}

/// One RTO proposal.
#[derive(Clone, Debug, PartialEq)]
pub struct Proposal {
    pub h: Vec<f64>,
    /// `e = ‖Qᵀ(F(h) - v)‖²`.
    pub cost: f64,
    pub log_c: f64,
    pub status: ProposalStatus,
    pub iterations: usize,
    /// Whether the solve needed full Newton steps.
    pub newton_fallback: bool,
    pub regime: TailRegime,
}

impl Proposal {
    pub fn is_valid(&self) -> bool {
        self.status == ProposalStatus::Valid
    }
}

/// Seeded generator for proposal `index`; each proposal owns a stream.
fn proposal_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws `v ~ N(0, I_{n+m})` and solves `Qᵀ(F(h) - v) = 0` starting from
/// `h_MAP`.
///
/// Iterations first reuse the factor `R = QᵀJ(h_MAP)` (chord steps) and
/// switch to Newton steps with a fresh LU factorization and backtracking
/// when the residual stops contracting.
pub fn rto_propose(state: &RtoState, model: &DenseModel, config: &RtoConfig, index: u64) -> Result<Proposal> {
    let (m, n) = model.shape();
    let mut rng = proposal_rng(config.seed, index);
    let v: Vec<f64> = (0..n + m).map(|_| rng.sample(StandardNormal)).collect();
    let target = mat_t_vec(state.q.as_ref(), &v);

    let mut h = state.map.h.clone();
    let mut eval = state.evaluate(model, &h, &target)?;
    let mut r_norm = norm(&eval.r);
    let mut iterations = 0;
    let mut converged = false;
    let mut newton = false;
    let mut worst = eval.regime;

    while iterations < config.max_iter {
        iterations += 1;
        let mut step = Mat::from_fn(n, 1, |i, _| eval.r[i]);
        if newton {
            state.newton_solve(&eval.g_deriv, &mut step);
        } else {
            state.r.solve_upper_triangular_in_place(&mut step);
        }
        let step = column(step.as_ref(), 0).to_vec();
        let step_norm = norm(&step);
        if step_norm <= config.step_tol * (1.0 + norm(&h)) {
            // Final correction at round-off level.
            h.iter_mut().zip(&step).for_each(|(a, s)| *a -= s);
            eval = state.evaluate(model, &h, &target)?;
            r_norm = norm(&eval.r);
            worst = worst.max(eval.regime);
            converged = true;
            break;
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..if newton { 30 } else { 1 } {
            let trial: Vec<f64> = h.iter().zip(&step).map(|(a, s)| a - t * s).collect();
            let trial_eval = state.evaluate(model, &trial, &target)?;
            let trial_norm = norm(&trial_eval.r);
            let enough = if newton {
                trial_norm <= (1.0 - 1e-4 * t) * r_norm
            } else {
                trial_norm <= 0.5 * r_norm
            };
            if enough && trial_norm.is_finite() {
                accepted = Some((trial, trial_eval, trial_norm));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, trial_eval, trial_norm)) => {
                h = trial;
                eval = trial_eval;
                r_norm = trial_norm;
                worst = worst.max(eval.regime);
            }
            None if !newton => newton = true,
            None => break,
        }
    }

    let cost = r_norm * r_norm;
    let (log_c, status) = if !converged && !(cost < config.eta()) {
        (f64::NAN, ProposalStatus::SolverFailed)
    } else {
        let log_c = state.log_weight(model, &h, &eval)?;
        let status = if !(cost < config.eta()) {
            ProposalStatus::CostAboveThreshold
        } else if !log_c.is_finite() {
            ProposalStatus::NonFiniteWeight
        } else {
            ProposalStatus::Valid
        };
        (log_c, status)
    };
    Ok(Proposal {
        h,
        cost,
        log_c,
        status,
        iterations,
        newton_fallback: newton,
        regime: worst,
    })
}

/// Serial Metropolis-Hastings pass over `proposals`, starting from state
/// `start` (0 for the MAP point, `i + 1` for proposal `i`) with log-weight
/// `log_c_start`.
///
/// Returns the acceptance flags and the state index after every step. The
/// uniforms come from their own stream of `seed`.
pub fn metropolis_sweep(
    proposals: &[Proposal],
    start: usize,
    log_c_start: f64,
    seed: u64,
) -> (Vec<bool>, Vec<usize>) {
    let mut uniforms = proposal_rng(seed, u64::MAX);
    let mut current = start;
    let mut log_c_current = log_c_start;
    let mut accepted = Vec::with_capacity(proposals.len());
    let mut chain = Vec::with_capacity(proposals.len());
    for (i, p) in proposals.iter().enumerate() {
        let u: f64 = uniforms.random();
        // Accept with probability min(1, c(current) / c(proposal)).
        let accept = p.is_valid() && u.ln() < log_c_current - p.log_c;
        if accept {
            current = i + 1;
            log_c_current = p.log_c;
        }
        accepted.push(accept);
        chain.push(current);
    }
    (accepted, chain)
}

/// Output of [`run_chain`].
#[derive(Clone, Debug)]
pub struct ChainResult {
    pub map: MapEstimate,
    pub f_map: Vec<f64>,
    pub log_c_map: f64,
    pub initial_state: InitialState,
    pub proposals: Vec<Proposal>,
    /// `f = T(h)` for every accepted proposal.
    proposal_f: Vec<Option<Vec<f64>>>,
    pub accepted: Vec<bool>,
    /// State index after each MH step: 0 is the MAP point, `i + 1` is
    /// proposal `i`.
    pub chain: Vec<usize>,
    pub eta: f64,
    pub map_seconds: f64,
    pub proposal_seconds: f64,
    pub total_seconds: f64,
}

impl ChainResult {
    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn n_accepted(&self) -> usize {
        self.accepted.iter().filter(|&&a| a).count()
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.n_accepted() as f64 / self.len() as f64
    }

    pub fn n_invalid(&self) -> usize {
        self.proposals.iter().filter(|p| !p.is_valid()).count()
    }

    fn state_h(&self, state: usize) -> &[f64] {
        if state == 0 {
            &self.map.h
        } else {
            &self.proposals[state - 1].h
        }
    }

    fn state_f(&self, state: usize) -> &[f64] {
        if state == 0 {
            &self.f_map
        } else {
            self.proposal_f[state - 1]
                .as_deref()
                .expect("accepted proposals are back-transformed")
        }
    }

    /// `h` after MH step `i`.
    pub fn h_sample(&self, i: usize) -> &[f64] {
        self.state_h(self.chain[i])
    }

    /// `f = T(h)` after MH step `i`.
    pub fn f_sample(&self, i: usize) -> &[f64] {
        self.state_f(self.chain[i])
    }

    pub fn h_samples(&self) -> impl Iterator<Item = &[f64]> {
        self.chain.iter().map(move |&s| self.state_h(s))
    }

    pub fn f_samples(&self) -> impl Iterator<Item = &[f64]> {
        self.chain.iter().map(move |&s| self.state_f(s))
    }

    /// Counts of proposals by tail regime (central, log tail, asymptotic).
    pub fn regime_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for p in &self.proposals {
            counts[p.regime as usize] += 1;
        }
        counts
    }
}

/// Runs MAP estimation, proposal generation, the MH sweep and the
/// back-transform.
pub fn run_chain(posterior: &Posterior, config: &RtoConfig) -> Result<ChainResult> {
    config.validate()?;
    let start = Instant::now();
    let model = DenseModel::new(posterior)?;
    let map = solve_map(&model, &config.map, None)?;
    let state = RtoState::new(&model, map)?;
    let map_seconds = start.elapsed().as_secs_f64();
    let mut result = run_chain_from(&model, &state, config)?;
    result.map_seconds = map_seconds;
    result.total_seconds = start.elapsed().as_secs_f64();
    Ok(result)
}

/// Runs the sampler from a precomputed MAP state.
pub fn run_chain_from(model: &DenseModel, state: &RtoState, config: &RtoConfig) -> Result<ChainResult> {
    config.validate()?;
    let start = Instant::now();
    let eta = config.eta();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let proposals: Vec<Proposal> = pool.install(|| {
        (0..config.n_samples as u64)
            .into_par_iter()
            .map(|i| rto_propose(state, model, config, i))
            .collect::<Result<_>>()
    })?;
    let proposal_seconds = start.elapsed().as_secs_f64();

    let invalid = proposals.iter().filter(|p| !p.is_valid()).count();
    if invalid == proposals.len() {
        let reason = proposals
            .last()
            .map(|p| format!("{:?}, cost {:.3e}", p.status, p.cost))
            .unwrap_or_default();
        return Err(Error::AllProposalsInvalid {
            invalid,
            total: proposals.len(),
            reason,
        });
    }
    if invalid > 0 {
        log::warn!("{invalid} of {} proposals were invalid", proposals.len());
    }

    let (start_index, log_c_start) = match config.initial_state {
        InitialState::Map => (0, state.log_c_map),
        InitialState::FirstProposal => {
            let first = proposals
                .iter()
                .position(Proposal::is_valid)
                .expect("at least one proposal is valid");
            (first + 1, proposals[first].log_c)
        }
    };
    let (accepted, chain) = metropolis_sweep(&proposals, start_index, log_c_start, config.seed);

    let transform = model.posterior().prior().transform();
    let f_map = transform.apply(&state.map.h)?;
    let proposal_f = pool.install(|| {
        proposals
            .par_iter()
            .zip(&accepted)
            .map(|(p, &a)| if a { transform.apply(&p.h).map(Some) } else { Ok(None) })
            .collect::<Result<Vec<_>>>()
    })?;

    let result = ChainResult {
        map: state.map.clone(),
        f_map,
        log_c_map: state.log_c_map,
        initial_state: config.initial_state,
        proposals,
        proposal_f,
        accepted,
        chain,
        eta,
        map_seconds: 0.0,
        proposal_seconds,
        total_seconds: start.elapsed().as_secs_f64(),
    };
    log::info!(
        "RTO-MH: {} proposals, {} accepted ({:.3}), {} invalid, {:.2}s",
        result.len(),
        result.n_accepted(),
        result.acceptance_rate(),
        invalid,
        proposal_seconds
    );
    Ok(result)
}
