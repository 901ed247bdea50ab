//! Parallel trajectory ensembles with deterministic seeding.
//!
//! Work is partitioned into fixed-size chunks that do not depend on the
//! worker count, each trajectory draws from its own counter-derived RNG
//! stream, and chunk results are merged in index order. The totals are
//! therefore bit-identical for a given master seed whether the ensemble
//! runs on one thread or many.

use phasespace_core::error::{Error, Result};
use phasespace_core::estimators::{witness_point, WitnessReport, DEFAULT_PHI, DEFAULT_THETA};
use phasespace_core::moments::{CheckpointAccumulator, MomentAccumulator};
use phasespace_core::params::PhysicalParams;
use phasespace_core::pulse::{GainProfile, PulseEnvelope};
use phasespace_core::rng::trajectory_rng;
use phasespace_core::sde::{run_trajectory, IntegratorConfig, Representation};
use rayon::prelude::*;
use std::time::{Duration, Instant};

/// Trajectories per parallel work unit. Fixed, rather than derived from
/// the thread count, so the partition (and with it every floating-point
/// summation order) is scheduling-independent.
const CHUNK: u64 = 256;

/// Default ensemble size for production runs.
pub const DEFAULT_N_TRAJ: u64 = 80_000;

/// A run fails once more than this fraction of trajectories diverges.
pub const DIVERGENCE_BUDGET: f64 = 1e-4;

/// RNG stream domain per representation, so a run that evaluates both
/// methods uses independent noise for each.
pub fn rng_domain(repr: Representation) -> u64 {
    match repr {
        Representation::PositiveP => 1,
        Representation::Wigner => 2,
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub n_traj: u64,
    pub n_batches: u64,
    pub master_seed: u64,
    pub representation: Representation,
    pub integrator: IntegratorConfig,
}

impl EnsembleConfig {
    pub fn validate(&self, params: &PhysicalParams) -> Result<()> {
        if self.n_traj == 0 {
            return Err(Error::InvalidConfig("n_traj must be positive"));
        }
        if self.n_batches < 10 {
            return Err(Error::InvalidConfig(
                "standard-error estimation needs at least 10 batches",
            ));
        }
        if self.n_traj % self.n_batches != 0 {
            return Err(Error::InvalidConfig("n_traj must be divisible by n_batches"));
        }
        self.integrator.validate(params)
    }
}

/// Per-batch accumulators plus run metadata. Batches are the
/// sub-ensembles used for standard-error estimation.
#[derive(Debug, Clone)]
pub struct EnsembleResult {
    /// Accumulators indexed `[batch][checkpoint]`.
    pub batches: Vec<Vec<CheckpointAccumulator>>,
    pub diverged: u64,
    pub n_traj: u64,
    pub representation: Representation,
    pub wall_time: Duration,
}

impl EnsembleResult {
    pub fn n_checkpoints(&self) -> usize {
        self.batches.first().map_or(0, |b| b.len())
    }

    /// Merge of all batches at every checkpoint.
    pub fn pooled(&self) -> Vec<CheckpointAccumulator> {
        let mut out = vec![CheckpointAccumulator::default(); self.n_checkpoints()];
        for batch in &self.batches {
            for (acc, cp) in out.iter_mut().zip(batch) {
                acc.merge(cp);
            }
        }
        out
    }

    pub fn batch_outputs(&self, checkpoint: usize) -> Vec<MomentAccumulator> {
        self.batches.iter().map(|b| b[checkpoint].output.clone()).collect()
    }

    pub fn batch_intracavity(&self, checkpoint: usize) -> Vec<MomentAccumulator> {
        self.batches.iter().map(|b| b[checkpoint].intracavity.clone()).collect()
    }
}

/// Run `cfg.n_traj` independent trajectories and fold them into
/// per-batch checkpoint accumulators.
///
/// Trajectory `j` always draws from `trajectory_rng(master_seed,
/// domain(representation), j)` regardless of which worker executes it.
/// Diverged trajectories (escaping positive-P samples) are counted and
/// excluded; the run fails if their fraction exceeds
/// [`DIVERGENCE_BUDGET`].
pub fn run_ensemble(
    cfg: &EnsembleConfig,
    params: &PhysicalParams,
    env: &PulseEnvelope,
) -> Result<EnsembleResult> {
    cfg.validate(params)?;
    let start = Instant::now();
    let profile = GainProfile::build(params, env, cfg.integrator.dt, cfg.integrator.n_steps);
    let per_batch = cfg.n_traj / cfg.n_batches;
    let n_cp = cfg.integrator.checkpoint_steps.len();
    let domain = rng_domain(cfg.representation);

    let mut items = Vec::new();
    for b in 0..cfg.n_batches {
        let mut k = 0;
        while k < per_batch {
            let len = CHUNK.min(per_batch - k);
            items.push((b as usize, b * per_batch + k, len));
            k += len;
        }
    }

    let chunk_results: Result<Vec<(usize, Vec<CheckpointAccumulator>, u64)>> = items
        .par_iter()
        .map(|&(batch, first, len)| {
            let mut accs = vec![CheckpointAccumulator::default(); n_cp];
            let mut scratch = vec![CheckpointAccumulator::default(); n_cp];
            let mut diverged = 0u64;
            for j in first..first + len {
                for s in scratch.iter_mut() {
                    *s = CheckpointAccumulator::default();
                }
                let mut rng = trajectory_rng(cfg.master_seed, domain, j);
                match run_trajectory(
                    cfg.representation,
                    params,
                    env,
                    &cfg.integrator,
                    &profile,
                    &mut rng,
                    &mut scratch,
                ) {
                    Ok(()) => {
                        for (a, s) in accs.iter_mut().zip(&scratch) {
                            a.merge(s);
                        }
                    }
                    // A trajectory recorded into `scratch` only, so a
                    // divergence at any point discards it wholesale and
                    // every checkpoint sees a consistent ensemble.
                    Err(Error::Divergence { .. }) => diverged += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok((batch, accs, diverged))
        })
        .collect();
    let chunk_results = chunk_results?;

    let mut batches = vec![vec![CheckpointAccumulator::default(); n_cp]; cfg.n_batches as usize];
    let mut diverged = 0u64;
    // `collect` preserved item order, so this merge is deterministic.
    for (batch, accs, d) in &chunk_results {
        diverged += d;
        for (a, s) in batches[*batch].iter_mut().zip(accs) {
            a.merge(s);
        }
    }

    if diverged as f64 > DIVERGENCE_BUDGET * cfg.n_traj as f64 {
        return Err(Error::DivergenceBudgetExceeded { diverged, total: cfg.n_traj });
    }
    Ok(EnsembleResult {
        batches,
        diverged,
        n_traj: cfg.n_traj,
        representation: cfg.representation,
        wall_time: start.elapsed(),
    })
}

/// Witness reports for every checkpoint of an ensemble, tagged with the
/// accumulated squeeze parameter `r(t)`.
pub fn witness_table(
    result: &EnsembleResult,
    params: &PhysicalParams,
    env: &PulseEnvelope,
    integrator: &IntegratorConfig,
) -> Result<Vec<WitnessReport>> {
    let profile = GainProfile::build(params, env, integrator.dt, integrator.n_steps);
    let pooled = result.pooled();
    let mut reports = Vec::with_capacity(pooled.len());
    for (ci, &step) in integrator.checkpoint_steps.iter().enumerate() {
        let t = step as f64 * integrator.dt;
        let r = profile.r[step];
        let batches = result.batch_outputs(ci);
        reports.push(witness_point(
            &pooled[ci].output,
            &batches,
            result.representation,
            DEFAULT_THETA,
            DEFAULT_PHI,
            t,
            r,
        )?);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use phasespace_core::sde::Scheme;

    fn small() -> (PhysicalParams, PulseEnvelope, IntegratorConfig) {
        let p = PhysicalParams {
            omega_m: 6.0,
            gamma_a: 1.0,
            gamma_b: 1e-3,
            chi0: 0.1,
            delta: -6.0,
            n_b0: 0.3,
            n_th_a: 0.0,
            n_th_b: 0.3,
            n_ph: 10.0,
            tau: 1.0,
        };
        let env = PulseEnvelope::square(p.tau).unwrap();
        let cfg = IntegratorConfig::for_pulse(p.tau, 0.005, 2, Scheme::RotatingEuler);
        (p, env, cfg)
    }

    #[test]
    fn zero_trajectories_rejected() {
        let (p, env, integrator) = small();
        let cfg = EnsembleConfig {
            n_traj: 0,
            n_batches: 10,
            master_seed: 1,
            representation: Representation::Wigner,
            integrator,
        };
        assert!(matches!(run_ensemble(&cfg, &p, &env), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn batch_count_invariants_enforced() {
        let (p, _env, integrator) = small();
        let mut cfg = EnsembleConfig {
            n_traj: 100,
            n_batches: 9,
            master_seed: 1,
            representation: Representation::Wigner,
            integrator,
        };
        assert!(cfg.validate(&p).is_err(), "9 batches accepted");
        cfg.n_batches = 11; // 100 not divisible by 11
        assert!(cfg.validate(&p).is_err(), "indivisible split accepted");
        cfg.n_batches = 10;
        cfg.validate(&p).unwrap();
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let (p, env, integrator) = small();
        let cfg = EnsembleConfig {
            n_traj: 600,
            n_batches: 10,
            master_seed: 7,
            representation: Representation::PositiveP,
            integrator,
        };
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let r1 = pool1.install(|| run_ensemble(&cfg, &p, &env)).unwrap();
        let r4 = pool4.install(|| run_ensemble(&cfg, &p, &env)).unwrap();
        assert_eq!(r1.diverged, r4.diverged);
        assert_eq!(r1.batches, r4.batches);
    }

    #[test]
    fn uncoupled_wigner_matches_ou_relaxation() {
        // chi0 = 0, no drive: <|beta|^2> - 1/2 relaxes from n_b0 with
        // rate 2 gamma_b (Ornstein-Uhlenbeck closed form).
        let p = PhysicalParams {
            omega_m: 6.0,
            gamma_a: 1.0,
            gamma_b: 0.2,
            chi0: 0.0,
            delta: -6.0,
            n_b0: 0.7,
            n_th_a: 0.0,
            n_th_b: 0.0,
            n_ph: 0.0,
            tau: 2.0,
        };
        p.validate().unwrap();
        let env = PulseEnvelope::square(p.tau).unwrap();
        let integrator = IntegratorConfig::for_pulse(p.tau, 0.002, 1, Scheme::RotatingEuler);
        let cfg = EnsembleConfig {
            n_traj: 40_000,
            n_batches: 10,
            master_seed: 11,
            representation: Representation::Wigner,
            integrator: integrator.clone(),
        };
        let res = run_ensemble(&cfg, &p, &env).unwrap();
        assert_eq!(res.diverged, 0);
        let pooled = res.pooled();
        use phasespace_core::moments::cav_var::{BETA, BETA_PLUS};
        let mean_sq = pooled[0].intracavity.raw_second(BETA, BETA_PLUS).re;
        let expect = p.n_b0 * (-2.0 * p.gamma_b * p.tau).exp() + 0.5;
        let se = (p.n_b0 + 0.5) * (2.0 / cfg.n_traj as f64).sqrt();
        assert!(
            (mean_sq - expect).abs() < 3.0 * se,
            "<|beta|^2> = {mean_sq}, expected {expect}"
        );
    }

    #[test]
    fn witness_table_covers_all_checkpoints() {
        let (p, env, integrator) = small();
        let cfg = EnsembleConfig {
            n_traj: 2_000,
            n_batches: 10,
            master_seed: 3,
            representation: Representation::Wigner,
            integrator: integrator.clone(),
        };
        let res = run_ensemble(&cfg, &p, &env).unwrap();
        let reports = witness_table(&res, &p, &env, &integrator).unwrap();
        assert_eq!(reports.len(), integrator.checkpoint_steps.len());
        for (rep, &step) in reports.iter().zip(&integrator.checkpoint_steps) {
            assert!((rep.t - step as f64 * integrator.dt).abs() < 1e-12);
            assert!(rep.r >= 0.0);
            assert!(rep.delta_ent.is_finite() && rep.delta_ent > 0.0);
        }
    }
}
