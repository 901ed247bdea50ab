//! Physical parameters of the optomechanical model and unit scaling.

use crate::error::{Error, Result};
// f64 math methods for no_std builds; unused when std is linked in
// test builds, hence the allow.
#[allow(unused_imports)]
use num_traits::Float;

/// Reduced Planck constant, J s (CODATA, exact since the SI redefinition).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (CODATA, exact).
pub const K_B: f64 = 1.380_649e-23;

/// Parameters of the standard single-mode optomechanical model.
///
/// All rates and frequencies are angular (rad/s) and `tau` is in seconds
/// when the record describes a physical system; the same struct is used
/// for the scaled system where `gamma_a = 1` and times are dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Mechanical angular frequency.
    pub omega_m: f64,
    /// Cavity amplitude decay rate.
    pub gamma_a: f64,
    /// Mechanical dissipation rate.
    pub gamma_b: f64,
    /// Single-photon optomechanical coupling.
    pub chi0: f64,
    /// Laser detuning, cavity resonance minus laser carrier.
    pub delta: f64,
    /// Initial mechanical occupation.
    pub n_b0: f64,
    /// Optical reservoir occupation.
    pub n_th_a: f64,
    /// Mechanical reservoir occupation.
    pub n_th_b: f64,
    /// Total photon number of the drive pulse.
    pub n_ph: f64,
    /// Pulse duration.
    pub tau: f64,
}

impl PhysicalParams {
    /// Experimental preset for a Si optomechanical crystal cavity.
    pub fn si_crystal_preset() -> Self {
        const TWO_PI: f64 = core::f64::consts::TAU;
        let omega_m = TWO_PI * 3.7e9;
        PhysicalParams {
            omega_m,
            gamma_a: TWO_PI * 0.26e9,
            gamma_b: TWO_PI * 37e3,
            chi0: TWO_PI * 910e3,
            delta: -omega_m,
            n_b0: 0.7,
            n_th_a: 0.0,
            n_th_b: 0.7,
            n_ph: 8.2e6,
            tau: 0.04e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_m > 0.0 && self.gamma_a > 0.0 && self.gamma_b > 0.0) {
            return Err(Error::InvalidParams("rates must be strictly positive"));
        }
        if !(self.tau > 0.0) {
            return Err(Error::InvalidParams("tau must be strictly positive"));
        }
        if !(self.chi0 >= 0.0) {
            return Err(Error::InvalidParams("chi0 must be nonnegative"));
        }
        if !(self.n_b0 >= 0.0 && self.n_th_a >= 0.0 && self.n_th_b >= 0.0) {
            return Err(Error::InvalidParams("occupations must be nonnegative"));
        }
        if !(self.n_ph >= 0.0) {
            return Err(Error::InvalidParams("pulse photon number must be nonnegative"));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidParams("detuning must be finite"));
        }
        Ok(())
    }

    /// Rescale so that `gamma_a = 1` and time is measured in `1/gamma_a`.
    pub fn scaled(&self) -> ScaledParams {
        let g = self.gamma_a;
        ScaledParams {
            params: PhysicalParams {
                omega_m: self.omega_m / g,
                gamma_a: 1.0,
                gamma_b: self.gamma_b / g,
                chi0: self.chi0 / g,
                delta: self.delta / g,
                n_b0: self.n_b0,
                n_th_a: self.n_th_a,
                n_th_b: self.n_th_b,
                n_ph: self.n_ph,
                tau: self.tau * g,
            },
            gamma_a_si: g,
        }
    }
}

/// Parameters in scaled units, remembering the original `gamma_a` so the
/// rescaling can be undone exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledParams {
    pub params: PhysicalParams,
    pub gamma_a_si: f64,
}

impl ScaledParams {
    pub fn to_physical(&self) -> PhysicalParams {
        let g = self.gamma_a_si;
        let p = &self.params;
        PhysicalParams {
            omega_m: p.omega_m * g,
            gamma_a: p.gamma_a * g,
            gamma_b: p.gamma_b * g,
            chi0: p.chi0 * g,
            delta: p.delta * g,
            n_b0: p.n_b0,
            n_th_a: p.n_th_a,
            n_th_b: p.n_th_b,
            n_ph: p.n_ph,
            tau: p.tau / g,
        }
    }
}

/// Bose-Einstein occupation of a reservoir mode at temperature `t_kelvin`.
pub fn thermal_occupation(t_kelvin: f64, omega: f64) -> f64 {
    assert!(t_kelvin >= 0.0 && omega > 0.0);
    if t_kelvin == 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (K_B * t_kelvin);
    1.0 / (x.exp() - 1.0)
}
