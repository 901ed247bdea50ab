//! Stochastic integration of the positive-P and truncated Wigner equations,
//! with co-integration of the filtered output light mode.
//!
//! The positive-P variables `(alpha, alpha+, beta, beta+)` are four
//! independent complex amplitudes; normally ordered operator moments equal
//! stochastic moments. The Wigner variables `(alpha, beta)` carry
//! symmetrically ordered moments. Both sets obey Ito equations and are
//! stepped with explicit Euler-Maruyama, optionally with the stiff linear
//! phases removed exactly each step (`RotatingEuler`).

use crate::error::{Error, Result};
use crate::moments::{CheckpointAccumulator, N_VARS};
use crate::params::PhysicalParams;
use crate::pulse::{drive_amplitude, GainProfile, PulseEnvelope};
use crate::rng::{complex_normal, normal_pair};
use crate::C64;
use alloc::vec::Vec;
use rand::Rng;
// f64 math methods for no_std builds; unused when std is linked in
// test builds, hence the allow.
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    PositiveP,
    Wigner,
}

impl Representation {
    pub fn label(&self) -> &'static str {
        match self {
            Representation::PositiveP => "pp",
            Representation::Wigner => "wigner",
        }
    }
}

/// Positive-P trajectory state. `out_raw` and `out_raw_plus` are the
/// unnormalized running integrals of the output mode and its dagger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PPState {
    pub alpha: C64,
    pub alpha_plus: C64,
    pub beta: C64,
    pub beta_plus: C64,
    pub out_raw: C64,
    pub out_raw_plus: C64,
    pub t: f64,
}

/// Truncated Wigner trajectory state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerState {
    pub alpha: C64,
    pub beta: C64,
    pub out_raw: C64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    EulerMaruyama,
    /// Exact exponential factors for the linear diagonal terms
    /// `(i Delta + gamma_a)` and `(i omega_m + gamma_b)` each step,
    /// explicit Euler for the rest.
    RotatingEuler,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub n_steps: usize,
    /// Step indices (1..=n_steps) at which moments are recorded.
    pub checkpoint_steps: Vec<usize>,
    pub divergence_threshold: f64,
    pub scheme: Scheme,
}

pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1e6;

impl IntegratorConfig {
    /// Uniform grid over `[0, tau]` with `dt <= dt_max` and evenly spaced
    /// checkpoints ending at `tau`.
    pub fn for_pulse(tau: f64, dt_max: f64, n_checkpoints: usize, scheme: Scheme) -> Self {
        let n_steps = (tau / dt_max).ceil().max(1.0) as usize;
        let checkpoint_steps = (1..=n_checkpoints)
            .map(|i| (i * n_steps) / n_checkpoints)
            .filter(|&s| s >= 1)
            .collect();
        IntegratorConfig {
            dt: tau / n_steps as f64,
            n_steps,
            checkpoint_steps,
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
            scheme,
        }
    }

    pub fn validate(&self, params: &PhysicalParams) -> Result<()> {
        if !(self.dt > 0.0) || self.n_steps == 0 {
            return Err(Error::InvalidConfig("dt and n_steps must be positive"));
        }
        if !(self.divergence_threshold > 0.0) {
            return Err(Error::InvalidConfig("divergence threshold must be positive"));
        }
        if self.checkpoint_steps.is_empty() {
            return Err(Error::InvalidConfig("at least one checkpoint is required"));
        }
        let mut prev = 0;
        for &s in &self.checkpoint_steps {
            if s <= prev || s > self.n_steps {
                return Err(Error::InvalidConfig(
                    "checkpoints must be strictly increasing within (0, n_steps]",
                ));
            }
            prev = s;
        }
        if self.scheme == Scheme::EulerMaruyama {
            let fast = params.omega_m.max(params.delta.abs());
            if self.dt * fast > 0.1 + 1e-12 {
                return Err(Error::InvalidConfig(
                    "dt * max(omega_m, |Delta|) must not exceed 0.1 for Euler-Maruyama",
                ));
            }
        }
        Ok(())
    }

    pub fn checkpoint_times(&self) -> Vec<f64> {
        self.checkpoint_steps.iter().map(|&s| s as f64 * self.dt).collect()
    }
}

/// Deterministic part of the positive-P equations:
/// `[d alpha, d alpha+, d beta, d beta+] / dt`.
pub fn pp_drift(s: &PPState, t: f64, params: &PhysicalParams, env: &PulseEnvelope) -> [C64; 4] {
    let e = drive_amplitude(params, env, t);
    let i = C64::i();
    let b_sum = s.beta + s.beta_plus;
    let d_alpha =
        e - (i * params.delta + i * params.chi0 * b_sum + params.gamma_a) * s.alpha;
    let d_alpha_plus =
        e + (i * params.delta + i * params.chi0 * b_sum - params.gamma_a) * s.alpha_plus;
    let pair = s.alpha * s.alpha_plus;
    let d_beta = -(i * params.omega_m + params.gamma_b) * s.beta - i * params.chi0 * pair;
    let d_beta_plus = (i * params.omega_m - params.gamma_b) * s.beta_plus + i * params.chi0 * pair;
    [d_alpha, d_alpha_plus, d_beta, d_beta_plus]
}

/// Deterministic part of the truncated Wigner equations: `[d alpha, d beta] / dt`.
pub fn wigner_drift(
    s: &WignerState,
    t: f64,
    params: &PhysicalParams,
    env: &PulseEnvelope,
) -> [C64; 2] {
    let e = drive_amplitude(params, env, t);
    let i = C64::i();
    let b_sum = s.beta + s.beta.conj();
    let d_alpha =
        e - (i * params.delta + i * params.chi0 * b_sum + params.gamma_a) * s.alpha;
    // Weyl symbol of a^dag a is |alpha|^2 - 1/2, so the symmetric-ordering
    // shift enters the radiation-pressure force on the mirror.
    let d_beta = -(i * params.omega_m + params.gamma_b) * s.beta
        - i * params.chi0 * (s.alpha.norm_sqr() - 0.5);
    [d_alpha, d_beta]
}

/// One step's noise increments for the positive-P equations.
///
/// The raw cavity input realizations are retained so the output-mode
/// integral can subtract exactly the noise that entered the cavity.
#[derive(Debug, Clone, Copy)]
pub struct PPNoise {
    /// Increments for `(alpha, alpha+, beta, beta+)`.
    pub dw: [C64; 4],
    /// Raw `dW_a^in` (thermal cavity input; zero for a vacuum bath).
    pub cavity_in: C64,
    /// Raw `dW_a^{in+}`.
    pub cavity_in_plus: C64,
}

/// Construct positive-P noise increments with the correlations
/// `<dW_a^chi dW_b^chi> = -i chi0 alpha dt`,
/// `<dW_a^{chi+} dW_b^{chi+}> = +i chi0 alpha+ dt`,
/// `<dW_i^in dW_i^{in+}> = n_th dt`, all squares vanishing.
pub fn pp_noise<R: Rng + ?Sized>(
    s: &PPState,
    params: &PhysicalParams,
    dt: f64,
    rng: &mut R,
) -> PPNoise {
    let i = C64::i();
    // Nonlinear (radiation pressure) part, factorized over a shared pair of
    // real normals; principal branch of the complex square root.
    let s_chi = (-i * params.chi0 * s.alpha * (0.5 * dt)).sqrt();
    let (x1, x2) = normal_pair(rng);
    let dw_a_chi = s_chi * C64::new(x1, x2);
    let dw_b_chi = s_chi * C64::new(x1, -x2);
    let s_chi_plus = (i * params.chi0 * s.alpha_plus * (0.5 * dt)).sqrt();
    let (x3, x4) = normal_pair(rng);
    let dw_a_chi_plus = s_chi_plus * C64::new(x3, x4);
    let dw_b_chi_plus = s_chi_plus * C64::new(x3, -x4);
    // Thermal inputs; the daggered increment is the conjugate realization.
    let zeta_a = complex_normal(rng, dt);
    let zeta_b = complex_normal(rng, dt);
    let cavity_in = params.n_th_a.sqrt() * zeta_a;
    let cavity_in_plus = params.n_th_a.sqrt() * zeta_a.conj();
    let mech_in = params.n_th_b.sqrt() * zeta_b;
    let mech_in_plus = params.n_th_b.sqrt() * zeta_b.conj();
    let root_2ga = (2.0 * params.gamma_a).sqrt();
    let root_2gb = (2.0 * params.gamma_b).sqrt();
    PPNoise {
        dw: [
            dw_a_chi + root_2ga * cavity_in,
            dw_a_chi_plus + root_2ga * cavity_in_plus,
            dw_b_chi + root_2gb * mech_in,
            dw_b_chi_plus + root_2gb * mech_in_plus,
        ],
        cavity_in,
        cavity_in_plus,
    }
}

/// One step's noise increments for the truncated Wigner equations.
#[derive(Debug, Clone, Copy)]
pub struct WignerNoise {
    pub dw_alpha: C64,
    pub dw_beta: C64,
    /// Raw `dW_a^in` including the vacuum half-quantum,
    /// `<dW_a^in dW_a^in*> = (n_th_a + 1/2) dt`.
    pub cavity_in: C64,
}

pub fn wigner_noise<R: Rng + ?Sized>(
    params: &PhysicalParams,
    dt: f64,
    rng: &mut R,
) -> WignerNoise {
    let cavity_in = complex_normal(rng, (params.n_th_a + 0.5) * dt);
    let mech_in = complex_normal(rng, (params.n_th_b + 0.5) * dt);
    WignerNoise {
        dw_alpha: (2.0 * params.gamma_a).sqrt() * cavity_in,
        dw_beta: (2.0 * params.gamma_b).sqrt() * mech_in,
        cavity_in,
    }
}

/// Sample the initial state: optical vacuum, mechanical thermal state with
/// mean occupation `n_b0`.
pub fn sample_initial_pp<R: Rng + ?Sized>(params: &PhysicalParams, rng: &mut R) -> PPState {
    let beta = complex_normal(rng, params.n_b0);
    PPState {
        alpha: C64::default(),
        alpha_plus: C64::default(),
        beta,
        beta_plus: beta.conj(),
        out_raw: C64::default(),
        out_raw_plus: C64::default(),
        t: 0.0,
    }
}

pub fn sample_initial_wigner<R: Rng + ?Sized>(params: &PhysicalParams, rng: &mut R) -> WignerState {
    WignerState {
        alpha: complex_normal(rng, 0.5),
        beta: complex_normal(rng, params.n_b0 + 0.5),
        out_raw: C64::default(),
        t: 0.0,
    }
}

/// Amplitudes in the frame rotating at the mechanical frequency:
/// `alpha^r = alpha e^{-i omega_m t}`, `beta^r = beta e^{+i omega_m t}`.
pub fn rotate_to_frame(alpha: C64, beta: C64, omega_m: f64, t: f64) -> (C64, C64) {
    let phase = C64::from_polar(1.0, -omega_m * t);
    (alpha * phase, beta * phase.conj())
}

fn check_finite(components: &[C64], threshold: f64, t: f64) -> Result<()> {
    for c in components {
        let m = c.norm_sqr();
        if !m.is_finite() || m > threshold * threshold {
            return Err(Error::Divergence { t, magnitude: m.sqrt() });
        }
    }
    Ok(())
}

/// Advance a positive-P state by one step using the given noise increments.
pub fn pp_step(
    s: &mut PPState,
    t: f64,
    cfg: &IntegratorConfig,
    params: &PhysicalParams,
    env: &PulseEnvelope,
    noise: &PPNoise,
) -> Result<()> {
    let dt = cfg.dt;
    match cfg.scheme {
        Scheme::EulerMaruyama => {
            let d = pp_drift(s, t, params, env);
            s.alpha += d[0] * dt + noise.dw[0];
            s.alpha_plus += d[1] * dt + noise.dw[1];
            s.beta += d[2] * dt + noise.dw[2];
            s.beta_plus += d[3] * dt + noise.dw[3];
        }
        Scheme::RotatingEuler => {
            let i = C64::i();
            let fa = (-(i * params.delta + params.gamma_a) * dt).exp();
            let fb = (-(i * params.omega_m + params.gamma_b) * dt).exp();
            let fa_plus = ((i * params.delta - params.gamma_a) * dt).exp();
            let fb_plus = ((i * params.omega_m - params.gamma_b) * dt).exp();
            let a = s.alpha * fa;
            let ap = s.alpha_plus * fa_plus;
            let b = s.beta * fb;
            let bp = s.beta_plus * fb_plus;
            let e = drive_amplitude(params, env, t);
            let b_sum = b + bp;
            let pair = a * ap;
            s.alpha = a + (e - i * params.chi0 * b_sum * a) * dt + noise.dw[0];
            s.alpha_plus = ap + (e + i * params.chi0 * b_sum * ap) * dt + noise.dw[1];
            s.beta = b - i * params.chi0 * pair * dt + noise.dw[2];
            s.beta_plus = bp + i * params.chi0 * pair * dt + noise.dw[3];
        }
    }
    s.t = t + dt;
    check_finite(
        &[s.alpha, s.alpha_plus, s.beta, s.beta_plus],
        cfg.divergence_threshold,
        s.t,
    )
}

pub fn wigner_step(
    s: &mut WignerState,
    t: f64,
    cfg: &IntegratorConfig,
    params: &PhysicalParams,
    env: &PulseEnvelope,
    noise: &WignerNoise,
) -> Result<()> {
    let dt = cfg.dt;
    match cfg.scheme {
        Scheme::EulerMaruyama => {
            let d = wigner_drift(s, t, params, env);
            s.alpha += d[0] * dt + noise.dw_alpha;
            s.beta += d[1] * dt + noise.dw_beta;
        }
        Scheme::RotatingEuler => {
            let i = C64::i();
            let fa = (-(i * params.delta + params.gamma_a) * dt).exp();
            let fb = (-(i * params.omega_m + params.gamma_b) * dt).exp();
            let a = s.alpha * fa;
            let b = s.beta * fb;
            let e = drive_amplitude(params, env, t);
            let b_sum = b + b.conj();
            s.alpha = a + (e - i * params.chi0 * b_sum * a) * dt + noise.dw_alpha;
            s.beta = b - i * params.chi0 * (a.norm_sqr() - 0.5) * dt + noise.dw_beta;
        }
    }
    s.t = t + dt;
    check_finite(&[s.alpha, s.beta], cfg.divergence_threshold, s.t)
}

/// Accumulate one Ito increment of the unnormalized output integral
/// `S += e^{r(t)} (sqrt(2 gamma_a) alpha^r dt - dW_a^{in,r})`, using the
/// same cavity input realization as the state update of this step.
pub fn accumulate_output_pp(
    s: &mut PPState,
    t: f64,
    dt: f64,
    exp_r: f64,
    noise: &PPNoise,
    params: &PhysicalParams,
) {
    let phase = C64::from_polar(1.0, -params.omega_m * t);
    let root_2ga = (2.0 * params.gamma_a).sqrt();
    s.out_raw += exp_r * phase * (root_2ga * s.alpha * dt - noise.cavity_in);
    s.out_raw_plus +=
        exp_r * phase.conj() * (root_2ga * s.alpha_plus * dt - noise.cavity_in_plus);
}

pub fn accumulate_output_wigner(
    s: &mut WignerState,
    t: f64,
    dt: f64,
    exp_r: f64,
    noise: &WignerNoise,
    params: &PhysicalParams,
) {
    let phase = C64::from_polar(1.0, -params.omega_m * t);
    let root_2ga = (2.0 * params.gamma_a).sqrt();
    s.out_raw += exp_r * phase * (root_2ga * s.alpha * dt - noise.cavity_in);
}

fn record_checkpoint(
    acc: &mut CheckpointAccumulator,
    alpha: C64,
    alpha_plus: C64,
    beta: C64,
    beta_plus: C64,
    out: C64,
    out_plus: C64,
    norm: f64,
    lo: C64,
    omega_m: f64,
    t: f64,
) {
    let mech_phase = C64::from_polar(1.0, omega_m * t);
    let inv_root_n = 1.0 / norm.sqrt();
    let out_block: [C64; N_VARS] = [
        beta * mech_phase,
        beta_plus * mech_phase.conj(),
        out * inv_root_n * lo,
        out_plus * inv_root_n * lo.conj(),
    ];
    acc.output.record(&out_block);
    acc.intracavity.record(&[alpha, alpha_plus, beta, beta_plus]);
}

/// Run one trajectory, recording moments into `accumulators` (one entry per
/// checkpoint, in the order of `cfg.checkpoint_steps`).
pub fn run_trajectory<R: Rng + ?Sized>(
    representation: Representation,
    params: &PhysicalParams,
    env: &PulseEnvelope,
    cfg: &IntegratorConfig,
    profile: &GainProfile,
    rng: &mut R,
    accumulators: &mut [CheckpointAccumulator],
) -> Result<()> {
    debug_assert_eq!(accumulators.len(), cfg.checkpoint_steps.len());
    debug_assert_eq!(profile.r.len(), cfg.n_steps + 1);
    // Local-oscillator reference for the output quadratures: the phase of
    // the driven cavity response 1/(gamma_a + i Delta), so that theta = 0
    // is the quadrature aligned with the mean intracavity field. On
    // resonance with the red sideband (Delta = -omega_m >> gamma_a) this
    // rotates the output by nearly -pi/2.
    let lo = C64::from_polar(1.0, -(-params.delta).atan2(params.gamma_a));
    let mut next_cp = 0;
    match representation {
        Representation::PositiveP => {
            let mut s = sample_initial_pp(params, rng);
            for k in 0..cfg.n_steps {
                let t = k as f64 * cfg.dt;
                let noise = pp_noise(&s, params, cfg.dt, rng);
                accumulate_output_pp(&mut s, t, cfg.dt, profile.r[k].exp(), &noise, params);
                pp_step(&mut s, t, cfg, params, env, &noise)?;
                if next_cp < cfg.checkpoint_steps.len() && cfg.checkpoint_steps[next_cp] == k + 1 {
                    record_checkpoint(
                        &mut accumulators[next_cp],
                        s.alpha,
                        s.alpha_plus,
                        s.beta,
                        s.beta_plus,
                        s.out_raw,
                        s.out_raw_plus,
                        profile.n[k + 1],
                        lo,
                        params.omega_m,
                        s.t,
                    );
                    next_cp += 1;
                }
            }
        }
        Representation::Wigner => {
            let mut s = sample_initial_wigner(params, rng);
            for k in 0..cfg.n_steps {
                let t = k as f64 * cfg.dt;
                let noise = wigner_noise(params, cfg.dt, rng);
                accumulate_output_wigner(&mut s, t, cfg.dt, profile.r[k].exp(), &noise, params);
                wigner_step(&mut s, t, cfg, params, env, &noise)?;
                if next_cp < cfg.checkpoint_steps.len() && cfg.checkpoint_steps[next_cp] == k + 1 {
                    record_checkpoint(
                        &mut accumulators[next_cp],
                        s.alpha,
                        s.alpha.conj(),
                        s.beta,
                        s.beta.conj(),
                        s.out_raw,
                        s.out_raw.conj(),
                        profile.n[k + 1],
                        lo,
                        params.omega_m,
                        s.t,
                    );
                    next_cp += 1;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trajectory_rng;
    use approx::assert_relative_eq;

    fn zero_params() -> PhysicalParams {
        PhysicalParams {
            omega_m: 6.0,
            gamma_a: 1.0,
            gamma_b: 1e-3,
            chi0: 0.3,
            delta: -6.0,
            n_b0: 0.0,
            n_th_a: 0.0,
            n_th_b: 0.0,
            n_ph: 0.0,
            tau: 2.0,
        }
    }

    fn zero_pp_state() -> PPState {
        PPState {
            alpha: C64::default(),
            alpha_plus: C64::default(),
            beta: C64::default(),
            beta_plus: C64::default(),
            out_raw: C64::default(),
            out_raw_plus: C64::default(),
            t: 0.0,
        }
    }

    #[test]
    fn vacuum_is_a_drift_fixed_point() {
        let p = zero_params();
        let env = PulseEnvelope::square(p.tau).unwrap();
        let d = pp_drift(&zero_pp_state(), 1.0, &p, &env);
        assert!(d.iter().all(|c| c.norm() == 0.0));
        let w = WignerState {
            alpha: C64::default(),
            beta: C64::default(),
            out_raw: C64::default(),
            t: 0.0,
        };
        let dw = wigner_drift(&w, 1.0, &p, &env);
        // The phase-space origin is not a Wigner fixed point: the ordering
        // shift leaves a residual force +i chi0 / 2 on the mirror. Vacuum is
        // only stationary on average over its half-quantum of sampled noise.
        assert_eq!(dw[0], C64::default());
        assert_relative_eq!(dw[1].re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(dw[1].im, 0.5 * p.chi0, max_relative = 1e-12);
    }

    #[test]
    fn drift_preserves_conjugate_pairing() {
        let mut p = zero_params();
        p.n_ph = 25.0;
        let env = PulseEnvelope::square(p.tau).unwrap();
        let mut rng = trajectory_rng(11, 0, 3);
        for _ in 0..50 {
            let alpha = complex_normal(&mut rng, 2.0);
            let beta = complex_normal(&mut rng, 2.0);
            let s = PPState {
                alpha,
                alpha_plus: alpha.conj(),
                beta,
                beta_plus: beta.conj(),
                ..zero_pp_state()
            };
            let d = pp_drift(&s, 0.7, &p, &env);
            assert_relative_eq!(d[1].re, d[0].conj().re, max_relative = 1e-12);
            assert_relative_eq!(d[1].im, d[0].conj().im, max_relative = 1e-12);
            assert_relative_eq!(d[3].re, d[2].conj().re, max_relative = 1e-12);
            assert_relative_eq!(d[3].im, d[2].conj().im, max_relative = 1e-12);
            // Wigner drift is the conjugate-pair restriction of pp_drift, up
            // to the symmetric-ordering shift +i chi0 / 2 on the mirror.
            let w = WignerState { alpha, beta, out_raw: C64::default(), t: 0.0 };
            let dw = wigner_drift(&w, 0.7, &p, &env);
            let shift = C64::i() * (0.5 * p.chi0);
            assert_relative_eq!(dw[0].re, d[0].re, max_relative = 1e-12);
            assert_relative_eq!(dw[0].im, d[0].im, max_relative = 1e-12);
            assert_relative_eq!(dw[1].re, (d[2] + shift).re, max_relative = 1e-12);
            assert_relative_eq!(dw[1].im, (d[2] + shift).im, max_relative = 1e-12);
        }
    }

    #[test]
    fn pp_vacuum_has_no_noise() {
        let mut p = zero_params();
        p.chi0 = 0.0;
        let mut rng = trajectory_rng(3, 0, 0);
        let n = pp_noise(&zero_pp_state(), &p, 0.01, &mut rng);
        assert!(n.dw.iter().all(|c| c.norm() == 0.0));
        assert_eq!(n.cavity_in, C64::default());
    }

    #[test]
    fn wigner_zero_damping_zero_increment() {
        let mut p = zero_params();
        p.gamma_a = 0.0;
        p.gamma_b = 0.0;
        let mut rng = trajectory_rng(4, 0, 0);
        let n = wigner_noise(&p, 0.01, &mut rng);
        assert_eq!(n.dw_alpha, C64::default());
        assert_eq!(n.dw_beta, C64::default());
    }

    #[test]
    fn rotate_to_frame_identities() {
        let alpha = C64::new(1.3, -0.4);
        let beta = C64::new(-0.2, 0.9);
        let omega = 6.0;
        let (a0, b0) = rotate_to_frame(alpha, beta, omega, 0.0);
        assert_eq!((a0, b0), (alpha, beta));
        let period = core::f64::consts::TAU / omega;
        let (a1, b1) = rotate_to_frame(alpha, beta, omega, period);
        assert!((a1 - alpha).norm() < 1e-12);
        assert!((b1 - beta).norm() < 1e-12);
        let (_, b2) = rotate_to_frame(alpha, beta, omega, 0.37);
        assert_relative_eq!(b2.norm(), beta.norm(), max_relative = 1e-12);
    }

    #[test]
    fn zero_state_stays_zero() {
        let p = zero_params();
        let env = PulseEnvelope::square(p.tau).unwrap();
        let cfg = IntegratorConfig::for_pulse(p.tau, 0.01, 4, Scheme::EulerMaruyama);
        cfg.validate(&p).unwrap();
        let mut rng = trajectory_rng(6, 0, 0);
        let mut s = zero_pp_state();
        for k in 0..cfg.n_steps {
            let t = k as f64 * cfg.dt;
            let noise = pp_noise(&s, &p, cfg.dt, &mut rng);
            pp_step(&mut s, t, &cfg, &p, &env, &noise).unwrap();
        }
        assert_eq!(s.alpha, C64::default());
        assert_eq!(s.beta, C64::default());
    }

    #[test]
    fn rotating_euler_conserves_modulus_without_damping() {
        let mut p = zero_params();
        p.gamma_a = 0.0;
        p.gamma_b = 0.0;
        p.chi0 = 0.0;
        let env = PulseEnvelope::square(p.tau).unwrap();
        let cfg = IntegratorConfig {
            dt: 0.05,
            n_steps: 40,
            checkpoint_steps: alloc::vec![40],
            divergence_threshold: 1e6,
            scheme: Scheme::RotatingEuler,
        };
        let mut s = WignerState {
            alpha: C64::new(0.8, 0.3),
            beta: C64::new(-0.1, 0.6),
            out_raw: C64::default(),
            t: 0.0,
        };
        let start = s.alpha.norm();
        let mut rng = trajectory_rng(7, 0, 0);
        for k in 0..cfg.n_steps {
            let noise = wigner_noise(&p, cfg.dt, &mut rng);
            wigner_step(&mut s, k as f64 * cfg.dt, &cfg, &p, &env, &noise).unwrap();
        }
        assert_relative_eq!(s.alpha.norm(), start, max_relative = 1e-12);
    }

    #[test]
    fn divergence_is_reported() {
        let p = zero_params();
        let env = PulseEnvelope::square(p.tau).unwrap();
        let cfg = IntegratorConfig {
            dt: 0.01,
            n_steps: 1,
            checkpoint_steps: alloc::vec![1],
            divergence_threshold: 1.0,
            scheme: Scheme::EulerMaruyama,
        };
        let mut s = zero_pp_state();
        s.alpha = C64::new(5.0, 0.0);
        let noise = PPNoise {
            dw: [C64::default(); 4],
            cavity_in: C64::default(),
            cavity_in_plus: C64::default(),
        };
        let err = pp_step(&mut s, 0.0, &cfg, &p, &env, &noise).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    #[test]
    fn em_stiffness_bound_enforced() {
        let p = zero_params(); // omega_m = 6
        let cfg = IntegratorConfig {
            dt: 0.05,
            n_steps: 40,
            checkpoint_steps: alloc::vec![40],
            divergence_threshold: 1e6,
            scheme: Scheme::EulerMaruyama,
        };
        assert!(cfg.validate(&p).is_err());
        let ok = IntegratorConfig { scheme: Scheme::RotatingEuler, ..cfg };
        assert!(ok.validate(&p).is_ok());
    }
}
