//! Experiment orchestration: configuration, problem assembly, sampling and
//! the files a run leaves behind.
//!
//! A run directory holds
//!
//! | file | contents |
//! |------|----------|
//! | `manifest.json` | [`RunManifest`] |
//! | `samples_f.bin`, `samples_h.bin` | chain states as little-endian `f64`, sample-major |
//! | `diagnostics.json` | [`ChainStats`] of the `f` chain |
//! | `mean.csv`, `ci_lower.csv`, `ci_upper.csv`, `truth.csv`, `map.csv` | per-pixel summaries |
//! | `acf_<index>.csv` | autocorrelation at each probe coordinate (1D problems) |
//! | `sinogram.csv` | observed data (CT) |
//! | `coeff_level<j>_or<l>.csv`, `coeff_sparsity.csv` | wavelet coefficients of the posterior mean (CT) |

mod output;
mod sweep;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{acf, summarize, ChainStats, SampleSet};
use crate::error::{Error, Result};
use crate::forward::{
    make_data_with, nested_white_noise, phantom_1d, shepp_logan, Convolution, Inpainting, LinearForward,
    OperatorDescriptor, Radon,
};
use crate::prior::{BesovPrior, Posterior};
use crate::rto::{run_chain, ChainResult, InitialState, MapOptions, RtoConfig};
use crate::wavelet::{WaveletFamily, WaveletSystem};

pub use output::{read_csv, SampleFile};
pub use sweep::{discretization_sweep, SweepReport};

/// Mixed into the run seed to seed the observation noise.
const NOISE_SEED_MIX: u64 = 0x6e6f_6973_655f_7365;

/// Which inverse problem to solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    /// 1D signal with intervals removed from the observation.
    Inpainting,
    /// 1D periodic Gaussian blur.
    Deconvolution,
    /// 2D parallel-beam tomography of the Shepp-Logan phantom.
    Ct,
}

impl Problem {
    pub fn is_1d(&self) -> bool {
        !matches!(self, Problem::Ct)
    }
}

impl std::str::FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inpainting" => Ok(Problem::Inpainting),
            "deconvolution" => Ok(Problem::Deconvolution),
            "ct" => Ok(Problem::Ct),
            other => Err(Error::Config(format!("unknown problem '{other}'"))),
        }
    }
}

/// Everything needed to reproduce a run. Missing JSON fields take the
/// defaults below, and the filled-in config is echoed to the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Problem,
    /// Signal length for 1D problems, image side for CT.
    pub n: usize,
    pub wavelet: WaveletFamily,
    pub s: f64,
    pub p: f64,
    pub lambda: f64,
    /// Noise standard deviation relative to `‖f_true‖ / √m`.
    pub relative_noise: f64,
    pub n_samples: usize,
    pub eta: Option<f64>,
    pub seed: u64,
    /// Seed of the observation noise; derived from `seed` when absent.
    pub noise_seed: Option<u64>,
    /// Grid on which 1D noise is drawn before block averaging to `n`.
    /// Runs sharing it see the same underlying noise realization.
    pub noise_grid: Option<usize>,
    pub output_dir: PathBuf,
    /// 0 means all cores.
    pub workers: usize,
    pub initial_state: InitialState,
    pub map: MapOptions,
    pub step_tol: f64,
    pub max_iter: usize,
    /// Physical positions in `[0, 1)` whose chains get ACF files.
    pub probe_positions: Vec<f64>,
    pub acf_max_lag: usize,
    pub credible_level: f64,
    pub removed_intervals: Vec<[f64; 2]>,
    pub sigma_ker: f64,
    pub ct_angles: usize,
    pub ct_detectors: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let rto = RtoConfig::default();
        Self {
            problem: Problem::Deconvolution,
            n: 128,
            wavelet: WaveletFamily::Haar,
            s: 1.0,
            p: 1.5,
            lambda: 1.0,
            relative_noise: 0.02,
            n_samples: rto.n_samples,
            eta: None,
            seed: 0,
            noise_seed: None,
            noise_grid: None,
            output_dir: PathBuf::from("besov-rto-output"),
            workers: 0,
            initial_state: rto.initial_state,
            map: rto.map,
            step_tol: rto.step_tol,
            max_iter: rto.max_iter,
            probe_positions: vec![0.2, 0.6, 0.75],
            acf_max_lag: 100,
            credible_level: 0.95,
            removed_intervals: vec![[0.1, 0.15], [0.425, 0.475]],
            sigma_ker: 0.02,
            ct_angles: 15,
            ct_detectors: 45,
        }
    }
}

impl RunConfig {
    /// Reads a JSON config; absent fields keep their defaults.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn sampler(&self) -> RtoConfig {
        RtoConfig {
            n_samples: self.n_samples,
            eta: self.eta,
            map: self.map,
            step_tol: self.step_tol,
            max_iter: self.max_iter,
            seed: self.seed,
            workers: self.workers,
            initial_state: self.initial_state,
        }
    }

    pub fn noise_seed(&self) -> u64 {
        self.noise_seed.unwrap_or(self.seed ^ NOISE_SEED_MIX)
    }

    /// Cheap checks of every module precondition, run before any work.
    pub fn validate(&self) -> Result<()> {
        self.sampler().validate()?;
        if self.n < 2 || !self.n.is_power_of_two() {
            return Err(Error::Parameter(format!("n must be a power of two >= 2, got {}", self.n)));
        }
        if !self.problem.is_1d() && self.n > 256 {
            return Err(Error::Parameter(format!(
                "CT side {} is too large for dense linear algebra",
                self.n
            )));
        }
        for (name, v) in [("s", self.s), ("p", self.p), ("lambda", self.lambda)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.relative_noise > 0.0 && self.relative_noise.is_finite()) {
            return Err(Error::Parameter(format!(
                "relative_noise must be positive, got {}",
                self.relative_noise
            )));
        }
        if !(self.credible_level > 0.0 && self.credible_level < 1.0) {
            return Err(Error::Parameter(format!(
                "credible_level must lie in (0, 1), got {}",
                self.credible_level
            )));
        }
        if let Some(g) = self.noise_grid {
            if g < self.n || g % self.n != 0 {
                return Err(Error::Parameter(format!("noise_grid {g} does not refine n = {}", self.n)));
            }
        }
        if self.problem.is_1d() {
            probe_indices(&self.probe_positions, self.n)?;
        }
        if self.problem == Problem::Ct && (self.ct_angles == 0 || self.ct_detectors == 0) {
            return Err(Error::Parameter("CT needs at least one angle and one detector".into()));
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(Error::Config("output_dir is empty".into()));
        }
        Ok(())
    }
}

/// Grid indices nearest to physical positions on the periodic grid
/// `x_i = i / n`: `round(x n) mod n`.
pub fn probe_indices(positions: &[f64], n: usize) -> Result<Vec<usize>> {
    positions
        .iter()
        .map(|&x| {
            if !(0.0..1.0).contains(&x) {
                return Err(Error::Parameter(format!("probe position {x} is outside [0, 1)")));
            }
            Ok((x * n as f64).round() as usize % n)
        })
        .collect()
}

/// Probe indices of a 1D run configuration.
pub fn probe_coordinates(config: &RunConfig) -> Result<Vec<usize>> {
    if !config.problem.is_1d() {
        return Err(Error::Parameter("probe coordinates need a 1D problem".into()));
    }
    probe_indices(&config.probe_positions, config.n)
}

/// Quantities derived from the configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub sigma: f64,
    pub kappa: f64,
    pub tau: f64,
    pub alpha: f64,
    /// Number of observations.
    pub m: usize,
    /// Number of unknowns.
    pub n_unknowns: usize,
    /// Number of wavelet levels.
    pub j_max: usize,
    pub eta: f64,
    pub noise_seed: u64,
    pub operator: OperatorDescriptor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSummary {
    pub iterations: usize,
    pub objective: f64,
    pub grad_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub map_seconds: f64,
    pub proposal_seconds: f64,
    pub sampler_seconds: f64,
    pub total_seconds: f64,
}

/// A probe coordinate and its ACF file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub position: f64,
    pub index: usize,
    pub file: String,
}

/// Record of a finished run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config: RunConfig,
    pub derived: Derived,
    pub realized_noise_level: f64,
    pub acceptance_rate: f64,
    pub n_accepted: usize,
    pub n_invalid: usize,
    pub newton_fallbacks: usize,
    /// Proposals by worst tail regime hit: central, log tail, asymptotic.
    pub regime_counts: [usize; 3],
    pub map: MapSummary,
    pub timing: Timing,
    pub samples_f: SampleFile,
    pub samples_h: SampleFile,
    pub probes: Vec<Probe>,
    /// Relative L² error of the posterior mean against the truth.
    pub mean_relative_error: f64,
}

impl RunManifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join("manifest.json");
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// What a finished run returns besides its files.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub stats: ChainStats,
    pub truth: Vec<f64>,
    pub mean: Vec<f64>,
}

/// Assembled inverse problem.
pub struct ProblemSetup {
    pub truth: Vec<f64>,
    pub forward: Arc<dyn LinearForward>,
    pub posterior: Posterior,
    pub realized_noise_level: f64,
}

/// Builds truth, forward operator, noisy data and posterior.
pub fn build_problem(config: &RunConfig) -> Result<ProblemSetup> {
    config.validate()?;
    let n = config.n;
    let (truth, forward, wavelet, obs_grid): (Vec<f64>, Arc<dyn LinearForward>, _, Option<Vec<usize>>) =
        match config.problem {
            Problem::Inpainting => {
                let op = Inpainting::new(n, &config.removed_intervals)?;
                let kept = op.kept().to_vec();
                (phantom_1d(n)?, Arc::new(op), WaveletSystem::for_signal(config.wavelet, n)?, Some(kept))
            }
            Problem::Deconvolution => (
                phantom_1d(n)?,
                Arc::new(Convolution::new(n, config.sigma_ker)?),
                WaveletSystem::for_signal(config.wavelet, n)?,
                Some((0..n).collect()),
            ),
            Problem::Ct => (
                shepp_logan(n)?,
                Arc::new(Radon::new(n, config.ct_angles, config.ct_detectors)?),
                WaveletSystem::for_image(config.wavelet, n)?,
                None,
            ),
        };
    let prior = BesovPrior::new(config.s, config.p, config.lambda, wavelet)?;
    let (m, _) = forward.shape();
    let z = match obs_grid {
        Some(indices) => {
            let field = nested_white_noise(config.noise_seed(), config.noise_grid.unwrap_or(n), n)?;
            indices.iter().map(|&i| field[i]).collect()
        }
        None => nested_white_noise(config.noise_seed(), m, m)?,
    };
    let data = make_data_with(forward.as_ref(), &truth, config.relative_noise, &z)?;
    let posterior = Posterior::new(prior, forward.clone(), data.y, data.noise.sigma)?;
    Ok(ProblemSetup {
        truth,
        forward,
        posterior,
        realized_noise_level: data.realized_level,
    })
}

fn relative_l2(a: &[f64], reference: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(reference).map(|(x, y)| (x - y).powi(2)).sum();
    let norm: f64 = reference.iter().map(|y| y * y).sum();
    (diff / norm).sqrt()
}

/// Runs one experiment and writes its files to `config.output_dir`.
///
/// On error every file written so far is removed again.
pub fn run_experiment(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let start = std::time::Instant::now();
    let setup = build_problem(config)?;
    let sampler = config.sampler();
    log::info!(
        "{:?}: n = {}, m = {}, {} proposals",
        config.problem,
        config.n,
        setup.posterior.shape().0,
        config.n_samples
    );
    let chain = run_chain(&setup.posterior, &sampler)?;
    log::info!(
        "acceptance rate {:.4} ({} invalid proposals)",
        chain.acceptance_rate(),
        chain.n_invalid()
    );

    let dim = setup.truth.len();
    let samples = SampleSet::from_rows(chain.f_samples())?;
    let stats = summarize(
        &samples,
        config.credible_level,
        Some(chain.acceptance_rate()),
        Some(chain.total_seconds),
    )?;

    let mut out = output::OutputGuard::create(&config.output_dir)?;
    let samples_f = out.write_samples("samples_f.bin", dim, chain.f_samples())?;
    let samples_h = out.write_samples("samples_h.bin", dim, chain.h_samples())?;
    out.write_json("diagnostics.json", &stats)?;

    let grid = Grid::new(config.problem, config.n);
    grid.write(&mut out, "mean.csv", "mean", &stats.mean)?;
    grid.write(&mut out, "ci_lower.csv", "ci_lower", &stats.ci_lower)?;
    grid.write(&mut out, "ci_upper.csv", "ci_upper", &stats.ci_upper)?;
    grid.write(&mut out, "truth.csv", "truth", &setup.truth)?;
    grid.write(&mut out, "map.csv", "map", &chain.f_map)?;

    let mut probes = Vec::new();
    if config.problem.is_1d() {
        for (&position, index) in config.probe_positions.iter().zip(probe_coordinates(config)?) {
            let file = format!("acf_{index}.csv");
            let rows = match acf(&samples.column(index), config.acf_max_lag) {
                Ok(r) => r.into_iter().enumerate().map(|(t, v)| vec![t as f64, v]).collect(),
                Err(Error::DegenerateChain(_)) => {
                    log::warn!("chain at index {index} is constant; writing an empty ACF");
                    Vec::new()
                }
                Err(e) => return Err(e),
            };
            out.write_csv(&file, &["lag", "acf"], &rows)?;
            probes.push(Probe { position, index, file });
        }
    } else {
        write_ct_extras(&mut out, config, &setup, &stats.mean)?;
    }

    let prior = setup.posterior.prior();
    let (m, n_unknowns) = setup.posterior.shape();
    let manifest = RunManifest {
        version: format!("besov-rto {}", env!("CARGO_PKG_VERSION")),
        config: config.clone(),
        derived: Derived {
            sigma: setup.posterior.sigma(),
            kappa: prior.kappa(),
            tau: prior.tau(),
            alpha: prior.alpha(),
            m,
            n_unknowns,
            j_max: prior.wavelet().levels(),
            eta: sampler.eta(),
            noise_seed: config.noise_seed(),
            operator: setup.forward.descriptor(),
        },
        realized_noise_level: setup.realized_noise_level,
        acceptance_rate: chain.acceptance_rate(),
        n_accepted: chain.n_accepted(),
        n_invalid: chain.n_invalid(),
        newton_fallbacks: chain.proposals.iter().filter(|p| p.newton_fallback).count(),
        regime_counts: chain.regime_counts(),
        map: MapSummary {
            iterations: chain.map.iterations,
            objective: chain.map.objective,
            grad_norm: chain.map.grad_norm,
        },
        timing: timing(&chain, start.elapsed().as_secs_f64()),
        samples_f,
        samples_h,
        probes,
        mean_relative_error: relative_l2(&stats.mean, &setup.truth),
    };
    out.write_json("manifest.json", &manifest)?;
    out.commit();
    Ok(RunOutcome {
        manifest,
        truth: setup.truth,
        mean: stats.mean.clone(),
        stats,
    })
}

fn timing(chain: &ChainResult, total: f64) -> Timing {
    Timing {
        map_seconds: chain.map_seconds,
        proposal_seconds: chain.proposal_seconds,
        sampler_seconds: chain.total_seconds,
        total_seconds: total,
    }
}

/// Recomputes the chain summary from the files of a finished run.
pub fn diagnose(dir: &Path) -> Result<ChainStats> {
    let manifest = RunManifest::read(dir)?;
    let data = manifest.samples_f.read(dir)?;
    let samples = SampleSet::new(manifest.samples_f.cols, data)?;
    summarize(
        &samples,
        manifest.config.credible_level,
        Some(manifest.acceptance_rate),
        Some(manifest.timing.sampler_seconds),
    )
}

/// Pixel coordinates for CSV output.
struct Grid {
    problem: Problem,
    n: usize,
}

impl Grid {
    fn new(problem: Problem, n: usize) -> Self {
        Self { problem, n }
    }

    fn write(&self, out: &mut output::OutputGuard, file: &str, name: &str, values: &[f64]) -> Result<()> {
        let n = self.n;
        if self.problem.is_1d() {
            let rows: Vec<Vec<f64>> = values
                .iter()
                .enumerate()
                .map(|(i, &v)| vec![i as f64, i as f64 / n as f64, v])
                .collect();
            out.write_csv(file, &["index", "x", name], &rows)
        } else {
            let rows: Vec<Vec<f64>> = values
                .iter()
                .enumerate()
                .map(|(i, &v)| vec![(i / n) as f64, (i % n) as f64, v])
                .collect();
            out.write_csv(file, &["row", "col", name], &rows)
        }
    }
}

/// Near-zero threshold for coefficient sparsity, relative to the largest
/// coefficient magnitude.
pub const SPARSITY_THRESHOLD: f64 = 1e-3;

/// Fraction of coefficients at each level with `|w| < SPARSITY_THRESHOLD · max|w|`.
pub fn near_zero_fractions(wavelet: &WaveletSystem, coeffs: &[f64]) -> Vec<f64> {
    let max = coeffs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let layout = wavelet.layout();
    (0..wavelet.levels())
        .map(|j| {
            let band = &coeffs[layout.level_range(j)];
            band.iter().filter(|v| v.abs() < SPARSITY_THRESHOLD * max).count() as f64 / band.len() as f64
        })
        .collect()
}

fn write_ct_extras(
    out: &mut output::OutputGuard,
    config: &RunConfig,
    setup: &ProblemSetup,
    mean: &[f64],
) -> Result<()> {
    let radon = Radon::new(config.n, config.ct_angles, config.ct_detectors)?;
    let (angles, detectors) = (radon.angles(), radon.detectors());
    let y = setup.posterior.data();
    let rows: Vec<Vec<f64>> = y
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let (a, d) = (k / detectors.len(), k % detectors.len());
            vec![a as f64, d as f64, angles[a], detectors[d], v]
        })
        .collect();
    out.write_csv(
        "sinogram.csv",
        &["angle_index", "detector_index", "angle", "detector", "value"],
        &rows,
    )?;

    let wavelet = setup.posterior.prior().wavelet();
    let coeffs = wavelet.analyze(mean)?;
    let layout = wavelet.layout();
    let max = coeffs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut summary = Vec::new();
    for j in 0..wavelet.levels() {
        let side = 1usize << j;
        for orientation in 1..=layout.orientations() {
            let band = &coeffs[layout.band_range(j, orientation)];
            let rows: Vec<Vec<f64>> = band
                .iter()
                .enumerate()
                .map(|(k, &v)| vec![(k / side) as f64, (k % side) as f64, v])
                .collect();
            out.write_csv(&format!("coeff_level{j}_or{orientation}.csv"), &["row", "col", "value"], &rows)?;
            let near_zero = band.iter().filter(|v| v.abs() < SPARSITY_THRESHOLD * max).count();
            summary.push(vec![
                j as f64,
                orientation as f64,
                band.len() as f64,
                near_zero as f64 / band.len() as f64,
            ]);
        }
    }
    out.write_csv(
        "coeff_sparsity.csv",
        &["level", "orientation", "count", "near_zero_fraction"],
        &summary,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_positions_round_to_the_grid() {
        assert_eq!(probe_indices(&[0.2, 0.0, 0.75], 512).unwrap(), vec![102, 0, 384]);
        assert_eq!(probe_indices(&[0.9999], 512).unwrap(), vec![0]);
        assert!(probe_indices(&[1.0], 512).is_err());
        assert!(probe_indices(&[-0.1], 512).is_err());
    }

    #[test]
    fn ct_has_no_probe_coordinates() {
        let config = RunConfig {
            problem: Problem::Ct,
            n: 16,
            ..RunConfig::default()
        };
        assert!(matches!(probe_coordinates(&config), Err(Error::Parameter(_))));
    }

    #[test]
    fn config_defaults_fill_missing_fields() {
        let config: RunConfig = serde_json::from_str(r#"{"problem": "inpainting", "n": 512, "wavelet": "db8"}"#).unwrap();
        assert_eq!(config.problem, Problem::Inpainting);
        assert_eq!(config.wavelet, WaveletFamily::Daubechies(8));
        assert_eq!(config.relative_noise, 0.02);
        assert_eq!(config.probe_positions, vec![0.2, 0.6, 0.75]);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        let ok = RunConfig::default();
        ok.validate().unwrap();
        for bad in [
            RunConfig { n: 100, ..ok.clone() },
            RunConfig { p: 0.0, ..ok.clone() },
            RunConfig { lambda: f64::NAN, ..ok.clone() },
            RunConfig { relative_noise: 0.0, ..ok.clone() },
            RunConfig { n_samples: 0, ..ok.clone() },
            RunConfig { probe_positions: vec![1.5], ..ok.clone() },
            RunConfig { noise_grid: Some(96), ..ok.clone() },
            RunConfig { credible_level: 1.0, ..ok.clone() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn inpainting_setup_has_461_observations() {
        let config = RunConfig {
            problem: Problem::Inpainting,
            n: 512,
            wavelet: WaveletFamily::Daubechies(8),
            s: 1.2,
            lambda: 0.025,
            ..RunConfig::default()
        };
        let setup = build_problem(&config).unwrap();
        assert_eq!(setup.posterior.shape(), (461, 512));
    }

    #[test]
    fn shared_noise_grid_nests_observations() {
        let coarse = RunConfig {
            n: 32,
            noise_grid: Some(64),
            ..RunConfig::default()
        };
        let fine = RunConfig { n: 64, ..coarse.clone() };
        let a = build_problem(&coarse).unwrap();
        let b = build_problem(&fine).unwrap();
        let sigma = a.posterior.sigma();
        assert!((sigma - b.posterior.sigma()).abs() < 0.05 * sigma);
        let na: Vec<f64> = (0..32)
            .map(|i| a.posterior.data()[i] - a.forward.apply(&a.truth).unwrap()[i])
            .collect();
        let nb: Vec<f64> = (0..64)
            .map(|i| b.posterior.data()[i] - b.forward.apply(&b.truth).unwrap()[i])
            .collect();
        for i in 0..32 {
            let pair = (nb[2 * i] / b.posterior.sigma() + nb[2 * i + 1] / b.posterior.sigma()) / 2f64.sqrt();
            assert!((na[i] / sigma - pair).abs() < 1e-9);
        }
    }
}
