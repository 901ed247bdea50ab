//! Drive pulse envelopes and the derived gain functions.
//!
//! Every envelope satisfies the normalization `int_0^tau |eps(t)|^2 dt = 1`,
//! so that the drive `E(t) = sqrt(2 gamma_a N_ph) eps(t)` delivers exactly
//! `N_ph` photons over the pulse.

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use alloc::vec::Vec;
// f64 math methods for no_std builds; unused when std is linked in
// test builds, hence the allow.
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, PartialEq)]
pub enum EnvelopeKind {
    /// Flat top, `eps(t) = 1/sqrt(tau)` on `[0, tau]`.
    Square,
    /// Truncated Gaussian centred at `center` with rms width `width`,
    /// renormalized over `[0, tau]`.
    Gaussian { center: f64, width: f64, amplitude: f64 },
    /// Uniform-grid samples over `[0, tau]`, linearly interpolated and
    /// renormalized on construction.
    Tabulated { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseEnvelope {
    kind: EnvelopeKind,
    tau: f64,
}

impl PulseEnvelope {
    pub fn square(tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParams("tau must be strictly positive"));
        }
        Ok(PulseEnvelope { kind: EnvelopeKind::Square, tau })
    }

    pub fn gaussian(tau: f64, center: f64, width: f64) -> Result<Self> {
        if !(tau > 0.0 && width > 0.0) {
            return Err(Error::InvalidParams("tau and width must be strictly positive"));
        }
        // int_0^tau exp(-(t-c)^2 / (2 w^2)) dt via the error function.
        let s = width * core::f64::consts::SQRT_2;
        let integral = width
            * (core::f64::consts::PI / 2.0).sqrt()
            * (libm::erf((tau - center) / s) - libm::erf(-center / s));
        if !(integral > 0.0) {
            return Err(Error::InvalidParams("gaussian envelope has no support on [0, tau]"));
        }
        let amplitude = 1.0 / integral.sqrt();
        Ok(PulseEnvelope {
            kind: EnvelopeKind::Gaussian { center, width, amplitude },
            tau,
        })
    }

    pub fn tabulated(tau: f64, samples: &[f64]) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParams("tau must be strictly positive"));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidParams("tabulated envelope needs >= 2 samples"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("tabulated envelope samples must be finite"));
        }
        // Exact integral of the squared linear interpolant per segment:
        // int_0^h (a + (b-a) x/h)^2 dx = h (a^2 + a b + b^2) / 3.
        let h = tau / (samples.len() - 1) as f64;
        let mut norm = 0.0;
        for w in samples.windows(2) {
            norm += h * (w[0] * w[0] + w[0] * w[1] + w[1] * w[1]) / 3.0;
        }
        if !(norm > 0.0) {
            return Err(Error::InvalidParams("tabulated envelope is identically zero"));
        }
        let scale = 1.0 / norm.sqrt();
        let values = samples.iter().map(|v| v * scale).collect();
        Ok(PulseEnvelope { kind: EnvelopeKind::Tabulated { values }, tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn kind(&self) -> &EnvelopeKind {
        &self.kind
    }

    /// Envelope value `eps(t)`; zero outside `[0, tau]`.
    pub fn value(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.tau {
            return 0.0;
        }
        match &self.kind {
            EnvelopeKind::Square => 1.0 / self.tau.sqrt(),
            EnvelopeKind::Gaussian { center, width, amplitude } => {
                let u = (t - center) / width;
                amplitude * (-0.25 * u * u).exp()
            }
            EnvelopeKind::Tabulated { values } => {
                let h = self.tau / (values.len() - 1) as f64;
                let x = t / h;
                let i = (x as usize).min(values.len() - 2);
                let f = x - i as f64;
                values[i] * (1.0 - f) + values[i + 1] * f
            }
        }
    }

    /// Same pulse with times expressed in units of `1/gamma_a`.
    pub fn scaled(&self, gamma_a: f64) -> PulseEnvelope {
        let tau = self.tau * gamma_a;
        match &self.kind {
            EnvelopeKind::Square => PulseEnvelope { kind: EnvelopeKind::Square, tau },
            EnvelopeKind::Gaussian { center, width, .. } => {
                PulseEnvelope::gaussian(tau, center * gamma_a, width * gamma_a)
                    .expect("scaling preserves envelope validity")
            }
            EnvelopeKind::Tabulated { values } => {
                // The samples rescale by 1/sqrt(gamma_a); renormalization
                // over the stretched grid produces exactly that.
                PulseEnvelope::tabulated(tau, values)
                    .expect("scaling preserves envelope validity")
            }
        }
    }
}

/// Drive amplitude `E(t) = sqrt(2 gamma_a N_ph) eps(t)`.
///
/// Real and nonnegative for the supported envelopes; zero outside the pulse.
pub fn drive_amplitude(params: &PhysicalParams, env: &PulseEnvelope, t: f64) -> f64 {
    (2.0 * params.gamma_a * params.n_ph).sqrt() * env.value(t)
}

/// Effective optomechanical coupling
/// `G(t) = sqrt(chi0^2 E(t) / (gamma_a (Delta^2 + gamma_a^2)))`.
pub fn coupling_gain(params: &PhysicalParams, env: &PulseEnvelope, t: f64) -> f64 {
    let e = drive_amplitude(params, env, t);
    let denom = params.gamma_a * (params.delta * params.delta + params.gamma_a * params.gamma_a);
    (params.chi0 * params.chi0 * e / denom).sqrt()
}

/// Precomputed gain profile on the integrator's time grid.
///
/// `r[k]` and `n[k]` are the integrated gain and output-mode normalization
/// at grid time `k*dt`. Within each step `G` is frozen at the midpoint, and
/// the `exp(2r)` integral is done in closed form, so for a square pulse both
/// profiles are exact to rounding.
#[derive(Debug, Clone)]
pub struct GainProfile {
    pub dt: f64,
    pub r: Vec<f64>,
    pub n: Vec<f64>,
}

impl GainProfile {
    pub fn build(params: &PhysicalParams, env: &PulseEnvelope, dt: f64, n_steps: usize) -> Self {
        let mut r = Vec::with_capacity(n_steps + 1);
        let mut n = Vec::with_capacity(n_steps + 1);
        r.push(0.0);
        n.push(0.0);
        let mut r_acc = 0.0;
        let mut n_acc = 0.0;
        for k in 0..n_steps {
            let tm = (k as f64 + 0.5) * dt;
            let g = coupling_gain(params, env, tm);
            let r_next = r_acc + g * dt;
            // int_{t_k}^{t_k+dt} e^{2r} dt with r linear in t over the step.
            n_acc += if g * dt > 1e-8 {
                ((2.0 * r_next).exp() - (2.0 * r_acc).exp()) / (2.0 * g)
            } else {
                (2.0 * r_acc).exp() * dt * (1.0 + g * dt)
            };
            r_acc = r_next;
            r.push(r_acc);
            n.push(n_acc);
        }
        GainProfile { dt, r, n }
    }
}

/// Integrated gain `r(t)` and normalization `N(t)` by quadrature on a fine
/// internal grid (exact for square pulses).
pub fn integrated_gain(params: &PhysicalParams, env: &PulseEnvelope, t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    let n_steps = 1 << 17;
    let profile = GainProfile::build(params, env, t / n_steps as f64, n_steps);
    (profile.r[n_steps], profile.n[n_steps])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn preset() -> (PhysicalParams, PulseEnvelope) {
        let p = PhysicalParams::si_crystal_preset();
        let env = PulseEnvelope::square(p.tau).unwrap();
        (p, env)
    }

    fn quadrature_norm(env: &PulseEnvelope) -> f64 {
        // Simpson over a fine grid.
        let n = 200_000;
        let h = env.tau() / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let a = env.value(i as f64 * h);
            let m = env.value((i as f64 + 0.5) * h);
            let b = env.value((i + 1) as f64 * h);
            acc += h / 6.0 * (a * a + 4.0 * m * m + b * b);
        }
        acc
    }

    #[test]
    fn envelopes_are_normalized() {
        let tau = 3.0;
        let square = PulseEnvelope::square(tau).unwrap();
        let gauss = PulseEnvelope::gaussian(tau, 1.5, 0.4).unwrap();
        let samples: alloc::vec::Vec<f64> =
            (0..101).map(|i| 1.0 + (i as f64 * 0.13).sin().abs()).collect();
        let tab = PulseEnvelope::tabulated(tau, &samples).unwrap();
        for env in [square, gauss, tab] {
            let norm = quadrature_norm(&env);
            assert_relative_eq!(norm, 1.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn drive_amplitude_at_preset() {
        let (p, env) = preset();
        let expected = (2.0 * p.gamma_a * p.n_ph).sqrt() / p.tau.sqrt();
        assert_relative_eq!(drive_amplitude(&p, &env, p.tau / 2.0), expected);
        assert_eq!(drive_amplitude(&p, &env, p.tau * 1.01), 0.0);
        let mut dark = p;
        dark.n_ph = 0.0;
        assert_eq!(drive_amplitude(&dark, &env, p.tau / 2.0), 0.0);
    }

    #[test]
    fn coupling_gain_scales_and_lands_in_fig2_range() {
        let (p, env) = preset();
        let sp = p.scaled();
        let senv = env.scaled(p.gamma_a);
        let g = coupling_gain(&sp.params, &senv, sp.params.tau / 2.0);
        assert!(g > 0.0);
        // Square pulse: constant over the pulse.
        let g2 = coupling_gain(&sp.params, &senv, sp.params.tau / 4.0);
        assert_relative_eq!(g, g2, max_relative = 1e-12);
        // r(tau) = G*tau must sit in the swept range of the witness plots.
        let r_tau = g * sp.params.tau;
        assert!(r_tau > 0.1 && r_tau < 0.6, "r(tau) = {r_tau}");
        // G is proportional to chi0.
        let mut p2 = sp.params;
        p2.chi0 *= 2.0;
        assert_relative_eq!(
            coupling_gain(&p2, &senv, 1.0),
            2.0 * g,
            max_relative = 1e-12
        );
        // Zero drive.
        let mut dark = sp.params;
        dark.n_ph = 0.0;
        assert_eq!(coupling_gain(&dark, &senv, 1.0), 0.0);
    }

    #[test]
    fn integrated_gain_square_closed_form() {
        let (p, env) = preset();
        let sp = p.scaled();
        let senv = env.scaled(p.gamma_a);
        let g = coupling_gain(&sp.params, &senv, sp.params.tau / 2.0);
        for frac in [0.25, 0.5, 1.0] {
            let t = sp.params.tau * frac;
            let (r, n) = integrated_gain(&sp.params, &senv, t);
            assert_relative_eq!(r, g * t, max_relative = 1e-10);
            assert_relative_eq!(
                n,
                ((2.0 * g * t).exp() - 1.0) / (2.0 * g),
                max_relative = 1e-10
            );
        }
        assert_eq!(integrated_gain(&sp.params, &senv, 0.0), (0.0, 0.0));
        // Zero gain: N(t) = t.
        let mut dark = sp.params;
        dark.n_ph = 0.0;
        let (r, n) = integrated_gain(&dark, &senv, 2.0);
        assert_eq!(r, 0.0);
        assert_relative_eq!(n, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn gain_profile_monotone() {
        let (p, env) = preset();
        let sp = p.scaled();
        let senv = env.scaled(p.gamma_a);
        let prof = GainProfile::build(&sp.params, &senv, sp.params.tau / 500.0, 500);
        for w in prof.r.windows(2) {
            assert!(w[1] >= w[0]);
        }
        for w in prof.n.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn gaussian_tail_cases() {
        assert!(PulseEnvelope::gaussian(1.0, 0.5, -1.0).is_err());
        assert!(PulseEnvelope::tabulated(1.0, &[0.0, 0.0]).is_err());
        assert!(PulseEnvelope::tabulated(1.0, &[1.0]).is_err());
    }
}
