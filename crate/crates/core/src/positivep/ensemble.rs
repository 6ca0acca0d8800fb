//! Fixed-step Euler–Maruyama ensembles and the integrator self-check.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::accumulator::{EnsembleAccumulator, MomentSums};
use num_complex::Complex64 as C64;

use super::state::{draw_wiener, drift, euler_step, PPState};
use crate::criteria::{epr_one_mode, epr_two_mode, vlf_triplet, Combo, Sign};
use crate::error::{Error, Result};

/// Fraction of diverged trajectories above which a run is flagged.
pub const DIVERGENCE_FLAG_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Nonlinearity.
    pub chi: f64,
    /// Initial real pump amplitude, equal on all three pumps.
    pub beta0: f64,
    /// Initial real signal amplitude (0 for vacuum signals).
    pub alpha0: f64,
    pub n_traj: usize,
    /// Step in scaled time `zeta = chi beta0 t`.
    pub dt: f64,
    pub zeta_max: f64,
    pub seed: u64,
    pub batch_count: usize,
    /// Number of output intervals; the series has `output_intervals + 1` points.
    pub output_intervals: usize,
    pub noise: bool,
    /// A trajectory with any `|variable| > divergence_factor * beta0` is dropped.
    pub divergence_factor: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            chi: 1e-2,
            beta0: 1e3,
            alpha0: 0.0,
            n_traj: 10_000,
            dt: 1e-4,
            zeta_max: 0.5,
            seed: 0,
            batch_count: 32,
            output_intervals: 25,
            noise: true,
            divergence_factor: 1e6,
        }
    }
}

impl SimConfig {
    /// Number of integration steps and steps between output samples.
    pub fn steps(&self) -> Result<(usize, usize)> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.chi.is_finite() && self.chi >= 0.0) {
            return bad("chi must be finite and non-negative");
        }
        if !(self.beta0.is_finite() && self.beta0 > 0.0) {
            return bad("beta0 must be positive");
        }
        if !self.alpha0.is_finite() {
            return bad("alpha0 must be finite");
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if !(self.zeta_max.is_finite() && self.zeta_max > 0.0) {
            return bad("zeta_max must be positive");
        }
        if self.batch_count < 2 || self.n_traj < self.batch_count {
            return bad("need n_traj >= batch_count >= 2");
        }
        if self.output_intervals == 0 {
            return bad("output_intervals must be at least 1");
        }
        if !(self.divergence_factor > 0.0) {
            return bad("divergence_factor must be positive");
        }
        let steps = (self.zeta_max / self.dt).round() as usize;
        if steps == 0 || ((steps as f64) * self.dt - self.zeta_max).abs() > 1e-9 * self.zeta_max {
            return bad("zeta_max must be a whole number of steps");
        }
        if !steps.is_multiple_of(self.output_intervals) {
            return bad("step count must be divisible by output_intervals");
        }
        Ok((steps, steps / self.output_intervals))
    }

    /// Physical time step corresponding to `dt` in scaled time.
    fn time_step(&self) -> f64 {
        self.dt / (self.chi * self.beta0)
    }

    pub fn zeta_grid(&self) -> Vec<f64> {
        (0..=self.output_intervals)
            .map(|k| self.zeta_max * k as f64 / self.output_intervals as f64)
            .collect()
    }
}

/// Independent random stream for one trajectory, fixed by `(seed, index)`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Integrates one trajectory, returning its samples on the output grid, or
/// `None` if it diverged.
pub fn run_trajectory(cfg: &SimConfig, index: u64) -> Result<Option<Vec<PPState>>> {
    let (steps, stride) = cfg.steps()?;
    let h = cfg.time_step();
    let limit_sqr = (cfg.divergence_factor * cfg.beta0).powi(2);
    let mut rng = trajectory_rng(cfg.seed, index);
    let mut s = PPState::coherent(cfg.beta0, cfg.alpha0);
    let mut samples = Vec::with_capacity(cfg.output_intervals + 1);
    samples.push(s);
    for step in 1..=steps {
        if cfg.noise {
            let dw = draw_wiener(&mut rng, h);
            euler_step(&mut s, cfg.chi, h, &dw);
        } else {
            euler_step(&mut s, cfg.chi, h, &[C64::new(0.0, 0.0); 6]);
        }
        if !(s.max_norm_sqr() <= limit_sqr) {
            return Ok(None);
        }
        if step % stride == 0 {
            samples.push(s);
        }
    }
    Ok(Some(samples))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Pooled value with the standard error of the batch values.
    pub fn from_batches(value: f64, batch_values: &[f64]) -> Self {
        let b = batch_values.len() as f64;
        let mean = batch_values.iter().sum::<f64>() / b;
        let var = batch_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1.0);
        Self { value, stderr: (var / b).sqrt() }
    }

    /// True if `|value - target| <= k * stderr`.
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub zeta: f64,
    /// Mean of the three VLF values.
    pub v3: Estimate,
    pub v12: Estimate,
    pub v13: Estimate,
    pub v23: Estimate,
    /// `Q_2 + Q_3` inferred from mode 1.
    pub epr_one: Estimate,
    /// Mode 1 inferred from `Q_2 + Q_3`.
    pub epr_two: Estimate,
    /// `epr_one - 4 epr_two`.
    pub epr_gap: Estimate,
    /// Real and imaginary parts of `<alpha_j+> - conj(<alpha_j>)`.
    pub conjugacy_gap: [[Estimate; 2]; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub points: Vec<SeriesPoint>,
    pub accepted: usize,
    pub diverged: usize,
    pub divergence_fraction: f64,
    /// Divergence fraction above [`DIVERGENCE_FLAG_FRACTION`].
    pub divergence_flagged: bool,
}

struct Observables {
    v: [f64; 3],
    epr_one: f64,
    epr_two: f64,
    gap: [[f64; 2]; 3],
}

fn observables(sums: &MomentSums) -> Result<Observables> {
    let t = sums.table()?;
    let vlf = vlf_triplet(&t)?;
    let combo = Combo::new(1, 2, Sign::Plus);
    let (a, ap) = (sums.mean_alpha(), sums.mean_alpha_plus());
    Ok(Observables {
        v: vlf.values(),
        epr_one: epr_one_mode(&t, combo, 0)?.product,
        epr_two: epr_two_mode(&t, 0, combo)?.product,
        gap: std::array::from_fn(|j| {
            let g = ap[j] - a[j].conj();
            [g.re, g.im]
        }),
    })
}

/// Runs the ensemble. Batch `b` owns a contiguous block of trajectory
/// indices and is summed sequentially, so results depend only on `cfg`.
pub fn run_ensemble(cfg: &SimConfig) -> Result<EnsembleResult> {
    cfg.steps()?;
    let grid = cfg.output_intervals + 1;
    let nb = cfg.batch_count;
    let per_batch: Vec<Result<(Vec<MomentSums>, usize)>> = (0..nb)
        .into_par_iter()
        .map(|b| {
            let start = b * cfg.n_traj / nb;
            let end = (b + 1) * cfg.n_traj / nb;
            let mut sums = vec![MomentSums::default(); grid];
            let mut diverged = 0;
            for idx in start..end {
                match run_trajectory(cfg, idx as u64)? {
                    Some(samples) => {
                        for (acc, s) in sums.iter_mut().zip(&samples) {
                            acc.add_sample(s);
                        }
                    }
                    None => diverged += 1,
                }
            }
            Ok((sums, diverged))
        })
        .collect();

    let mut acc = EnsembleAccumulator::new(nb, grid);
    let mut diverged = 0;
    for (b, r) in per_batch.into_iter().enumerate() {
        let (sums, d) = r?;
        acc.set_batch(b, sums);
        diverged += d;
    }
    if diverged == cfg.n_traj {
        return Err(Error::AllDiverged(diverged));
    }
    let usable: Vec<usize> = (0..nb).filter(|&b| acc.batch(b, 0).count > 0).collect();
    if usable.len() < 2 {
        return Err(Error::InvalidConfig("fewer than two batches with surviving trajectories".into()));
    }

    let zetas = cfg.zeta_grid();
    let mut points = Vec::with_capacity(grid);
    for (p, &zeta) in zetas.iter().enumerate() {
        let pooled = observables(&acc.pooled(p))?;
        let batches = usable.iter().map(|&b| observables(acc.batch(b, p))).collect::<Result<Vec<_>>>()?;
        let est = |f: &dyn Fn(&Observables) -> f64| {
            Estimate::from_batches(f(&pooled), &batches.iter().map(f).collect::<Vec<_>>())
        };
        let mean3 = |o: &Observables| (o.v[0] + o.v[1] + o.v[2]) / 3.0;
        points.push(SeriesPoint {
            zeta,
            v3: est(&mean3),
            v12: est(&|o| o.v[0]),
            v13: est(&|o| o.v[1]),
            v23: est(&|o| o.v[2]),
            epr_one: est(&|o| o.epr_one),
            epr_two: est(&|o| o.epr_two),
            epr_gap: est(&|o| o.epr_one - 4.0 * o.epr_two),
            conjugacy_gap: std::array::from_fn(|j| std::array::from_fn(|c| est(&|o| o.gap[j][c]))),
        });
    }
    let fraction = diverged as f64 / cfg.n_traj as f64;
    Ok(EnsembleResult {
        points,
        accepted: cfg.n_traj - diverged,
        diverged,
        divergence_fraction: fraction,
        divergence_flagged: fraction > DIVERGENCE_FLAG_FRACTION,
    })
}

/// Integrates one noiseless trajectory from conjugate-pair initial data and
/// returns the largest relative change of `sum |beta|^2 + sum |alpha|^2 / 2`.
pub fn deterministic_invariant_check(cfg: &SimConfig) -> Result<f64> {
    if cfg.noise {
        return Err(Error::InvalidConfig("invariant check needs noise disabled".into()));
    }
    let (steps, _) = cfg.steps()?;
    let h = cfg.time_step();
    let mut s = PPState::coherent(cfg.beta0, cfg.alpha0);
    let e0 = s.energy();
    let mut worst = 0.0_f64;
    for _ in 0..steps {
        let d = drift(&s, cfg.chi);
        s.add_scaled(&d, h);
        worst = worst.max((s.energy() - e0).abs() / e0);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimConfig {
        SimConfig { n_traj: 64, batch_count: 4, dt: 1e-3, zeta_max: 0.1, output_intervals: 5, ..Default::default() }
    }

    #[test]
    fn config_validation() {
        assert!(small().steps().is_ok());
        assert_eq!(small().steps().unwrap(), (100, 20));
        let bad = [
            SimConfig { dt: 0.0, ..small() },
            SimConfig { batch_count: 1, ..small() },
            SimConfig { n_traj: 3, ..small() },
            SimConfig { output_intervals: 7, ..small() },
            SimConfig { zeta_max: 0.10005, ..small() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.steps(), Err(Error::InvalidConfig(_))), "{cfg:?}");
        }
    }

    #[test]
    fn zeta_zero_is_exact() {
        let r = run_ensemble(&small()).unwrap();
        let p0 = r.points[0];
        assert_eq!(p0.zeta, 0.0);
        assert_eq!(p0.v3.value, 5.0);
        assert_eq!(p0.v3.stderr, 0.0);
        assert_eq!(p0.epr_two.value, 1.0);
        assert_eq!(p0.epr_one.value, 4.0);
        assert_eq!(r.points.len(), 6);
        assert_eq!(r.diverged, 0);
    }

    #[test]
    fn seed_determinism() {
        let a = run_ensemble(&small()).unwrap();
        let b = run_ensemble(&small()).unwrap();
        assert_eq!(a, b);
        let c = run_ensemble(&SimConfig { seed: 9, ..small() }).unwrap();
        assert_ne!(a.points[5].v3.value, c.points[5].v3.value);
    }

    #[test]
    fn worker_count_does_not_matter() {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_ensemble(&small())).unwrap();
        let b = four.install(|| run_ensemble(&small())).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn divergence_is_counted() {
        // a tiny limit makes every trajectory "diverge"
        let cfg = SimConfig { divergence_factor: 1e-9, ..small() };
        assert_eq!(run_ensemble(&cfg), Err(Error::AllDiverged(64)));
    }

    #[test]
    fn invariant_check_needs_noise_off() {
        assert!(deterministic_invariant_check(&small()).is_err());
        let cfg = SimConfig { noise: false, alpha0: 0.0, ..small() };
        assert_eq!(deterministic_invariant_check(&cfg).unwrap(), 0.0);
    }
}
