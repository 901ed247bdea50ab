//! Cross-validation of the stochastic representations against the
//! dense master-equation integrator on a truncated Fock basis.
//!
//! Only intracavity moments are compared; the filtered output mode is
//! not part of the reduced density operator.

use crate::ensemble::{run_ensemble, EnsembleConfig, EnsembleResult};
use crate::report::MomentComparison;
use phasespace_core::error::Result;
use phasespace_core::estimators::{batch_standard_error, cavity_moments};
use phasespace_core::oracle::{evolve_me, FockConfig};
use phasespace_core::params::PhysicalParams;
use phasespace_core::pulse::PulseEnvelope;
use phasespace_core::sde::{IntegratorConfig, Representation};

pub struct CompareOutcome {
    pub rows: Vec<MomentComparison>,
    /// Largest positive-P z-score across all compared moments.
    pub max_pp_z: f64,
    pub pp: EnsembleResult,
    pub wigner: EnsembleResult,
}

/// Moment mean and per-component batch standard errors at the final
/// checkpoint of one ensemble.
fn component_stats(
    result: &EnsembleResult,
    repr: Representation,
) -> Result<Vec<(&'static str, f64, f64)>> {
    let checkpoint = result.n_checkpoints() - 1;
    let pooled = result.pooled();
    let point = cavity_moments(&pooled[checkpoint].intracavity, repr).components();
    let batch_components: Vec<_> = result
        .batch_intracavity(checkpoint)
        .iter()
        .map(|acc| cavity_moments(acc, repr).components())
        .collect();
    let mut out = Vec::with_capacity(point.len());
    for (ci, &(label, value)) in point.iter().enumerate() {
        let values: Vec<f64> = batch_components.iter().map(|c| c[ci].1).collect();
        let (_, err) = batch_standard_error(&values)?;
        out.push((label, value, err));
    }
    Ok(out)
}

/// Run both representations and the master equation on the same
/// instance and tabulate every first and second intracavity moment.
pub fn oracle_compare(
    params: &PhysicalParams,
    env: &PulseEnvelope,
    integrator: &IntegratorConfig,
    fock: &FockConfig,
    n_traj: u64,
    n_batches: u64,
    seed: u64,
) -> Result<CompareOutcome> {
    let times = integrator.checkpoint_times();
    let me = evolve_me(params, env, fock, &times)?;
    let me_components = me.last().expect("at least one checkpoint").moments.components();

    let make = |repr| {
        run_ensemble(
            &EnsembleConfig {
                n_traj,
                n_batches,
                master_seed: seed,
                representation: repr,
                integrator: integrator.clone(),
            },
            params,
            env,
        )
    };
    let pp = make(Representation::PositiveP)?;
    let wigner = make(Representation::Wigner)?;
    let pp_stats = component_stats(&pp, Representation::PositiveP)?;
    let wig_stats = component_stats(&wigner, Representation::Wigner)?;

    let mut rows = Vec::with_capacity(me_components.len());
    let mut max_pp_z: f64 = 0.0;
    for (i, &(label, me_value)) in me_components.iter().enumerate() {
        let (_, pp_value, pp_err) = pp_stats[i];
        let (_, wigner_value, wigner_err) = wig_stats[i];
        let diff = (pp_value - me_value).abs();
        let scale = 1.0 + me_value.abs();
        // A (near-)zero spread across batches means the component is
        // noise-free in the stochastic method (for example the optical
        // amplitude when chi0 = 0 with a vacuum bath). Such components
        // carry only the first-order weak discretization bias, so they
        // are compared against an O(dt) allowance instead of a
        // meaningless spread; any larger deviation is infinitely
        // significant.
        let z_score = if pp_err > 1e-9 * scale {
            diff / pp_err
        } else if diff <= 5.0 * integrator.dt * scale {
            0.0
        } else {
            f64::INFINITY
        };
        max_pp_z = max_pp_z.max(z_score);
        rows.push(MomentComparison {
            moment: label,
            me_value,
            pp_value,
            pp_err,
            wigner_value,
            wigner_err,
            z_score,
        });
    }
    Ok(CompareOutcome { rows, max_pp_z, pp, wigner })
}

#[cfg(test)]
mod tests {
    use super::*;
    use phasespace_core::sde::Scheme;

    #[test]
    fn linear_instance_matches_oracle() {
        // chi0 = 0 keeps both methods exactly Gaussian; a modest
        // ensemble already reproduces every moment.
        let p = PhysicalParams {
            omega_m: 6.0,
            gamma_a: 1.0,
            gamma_b: 1e-3,
            chi0: 0.0,
            delta: -6.0,
            n_b0: 0.3,
            n_th_a: 0.0,
            n_th_b: 0.3,
            n_ph: 2.0,
            tau: 1.5,
        };
        let env = PulseEnvelope::square(p.tau).unwrap();
        let integrator = IntegratorConfig::for_pulse(p.tau, 0.001, 1, Scheme::RotatingEuler);
        // dim_b is generous: the truncated thermal ladder at n_b0 = 0.3
        // carries ~1e-6 population at level 9 already.
        let fock = FockConfig { dim_a: 8, dim_b: 16, dt: 0.002 };
        let out = oracle_compare(&p, &env, &integrator, &fock, 20_000, 10, 12).unwrap();
        assert_eq!(out.rows.len(), 12);
        assert!(out.max_pp_z < 4.0, "max positive-P z-score {}", out.max_pp_z);
        for row in &out.rows {
            assert!(
                (row.wigner_value - row.me_value).abs()
                    < 5.0 * row.wigner_err.max(0.01),
                "{}: wigner {} vs oracle {}",
                row.moment,
                row.wigner_value,
                row.me_value
            );
        }
    }
}
