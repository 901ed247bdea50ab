//! Brute-force master-equation integrator on a truncated two-mode Fock
//! space. Ground truth for small-instance verification of the stochastic
//! representations; intracavity moments only (the filtered output field is
//! not part of the reduced density operator).

use crate::error::{Error, Result};
use crate::estimators::CavityMoments;
use crate::params::PhysicalParams;
use crate::pulse::{drive_amplitude, PulseEnvelope};
use crate::C64;
use alloc::vec;
use alloc::vec::Vec;
// f64 math methods for no_std builds; unused when std is linked in
// test builds, hence the allow.
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockConfig {
    pub dim_a: usize,
    pub dim_b: usize,
    /// Target RK4 step (each checkpoint segment is subdivided evenly).
    pub dt: f64,
}

impl FockConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim_a < 2 || self.dim_b < 2 {
            return Err(Error::InvalidConfig("Fock dimensions must be >= 2"));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidConfig("oracle dt must be positive"));
        }
        Ok(())
    }
}

/// Dense two-mode density operator, row-major over the composite index
/// `(n_a * dim_b + n_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    pub rho: Vec<C64>,
    pub dim_a: usize,
    pub dim_b: usize,
    pub t: f64,
}

impl DensityState {
    fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    /// Vacuum (optical) times truncated, renormalized thermal (mechanical).
    pub fn initial(dim_a: usize, dim_b: usize, n_b0: f64) -> Self {
        let n = dim_a * dim_b;
        let mut rho = vec![C64::default(); n * n];
        let q = n_b0 / (1.0 + n_b0);
        let mut weights = Vec::with_capacity(dim_b);
        let mut norm = 0.0;
        for nb in 0..dim_b {
            let w = if n_b0 == 0.0 {
                if nb == 0 { 1.0 } else { 0.0 }
            } else {
                q.powi(nb as i32)
            };
            norm += w;
            weights.push(w);
        }
        for (nb, w) in weights.iter().enumerate() {
            rho[nb * n + nb] = C64::new(w / norm, 0.0);
        }
        DensityState { rho, dim_a, dim_b, t: 0.0 }
    }

    pub fn trace(&self) -> C64 {
        let n = self.dim();
        (0..n).map(|r| self.rho[r * n + r]).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.rho[r * n + c] - self.rho[c * n + r].conj()).norm());
            }
        }
        worst
    }

    /// Total population of the top Fock level of each mode.
    pub fn top_level_population(&self) -> (f64, f64) {
        let n = self.dim();
        let mut top_a = 0.0;
        let mut top_b = 0.0;
        for nb in 0..self.dim_b {
            let r = (self.dim_a - 1) * self.dim_b + nb;
            top_a += self.rho[r * n + r].re;
        }
        for na in 0..self.dim_a {
            let r = na * self.dim_b + (self.dim_b - 1);
            top_b += self.rho[r * n + r].re;
        }
        (top_a, top_b)
    }

    pub fn moments(&self) -> CavityMoments {
        let (da, db, n) = (self.dim_a, self.dim_b, self.dim());
        let at = |ia: usize, ib: usize, ja: usize, jb: usize| {
            self.rho[(ia * db + ib) * n + (ja * db + jb)]
        };
        let mut m = CavityMoments {
            mean_a: C64::default(),
            mean_b: C64::default(),
            n_a: 0.0,
            n_b: 0.0,
            ab: C64::default(),
            ab_dag: C64::default(),
            aa: C64::default(),
            bb: C64::default(),
        };
        for ia in 0..da {
            for ib in 0..db {
                let fa = ia as f64;
                let fb = ib as f64;
                m.n_a += fa * at(ia, ib, ia, ib).re;
                m.n_b += fb * at(ia, ib, ia, ib).re;
                // Tr(a rho): <n_a, n_b| a rho |n_a, n_b> picks rho[(na+1, nb), (na, nb)].
                if ia + 1 < da {
                    m.mean_a += (fa + 1.0).sqrt() * at(ia + 1, ib, ia, ib);
                    if ia + 2 < da {
                        m.aa += ((fa + 1.0) * (fa + 2.0)).sqrt() * at(ia + 2, ib, ia, ib);
                    }
                    if ib + 1 < db {
                        m.ab += ((fa + 1.0) * (fb + 1.0)).sqrt() * at(ia + 1, ib + 1, ia, ib);
                    }
                    if ib > 0 {
                        m.ab_dag += ((fa + 1.0) * fb).sqrt() * at(ia + 1, ib - 1, ia, ib);
                    }
                }
                if ib + 1 < db {
                    m.mean_b += (fb + 1.0).sqrt() * at(ia, ib + 1, ia, ib);
                    if ib + 2 < db {
                        m.bb += ((fb + 1.0) * (fb + 2.0)).sqrt() * at(ia, ib + 2, ia, ib);
                    }
                }
            }
        }
        m
    }
}

/// Intracavity 4x4 quadrature covariance `(X_a, P_a, X_b, P_b)` from
/// quantum-ordered moments, symmetrized ordering, hbar = 1/2.
pub fn quantum_quad_covariance(m: &CavityMoments) -> [[f64; 4]; 4] {
    let a = m.mean_a;
    let b = m.mean_b;
    // Central quantum moments.
    let caa = m.aa - a * a;
    let cbb = m.bb - b * b;
    let cnna = m.n_a - a.norm_sqr(); // <a+ a> central
    let cnnb = m.n_b - b.norm_sqr();
    let cab = m.ab - a * b;
    let cabd = m.ab_dag - a * b.conj();
    // Mode a block: Var X = (2<a+a> + 2Re<a^2> + 1)/4 centrally.
    let vxa = (2.0 * cnna + 2.0 * caa.re + 1.0) / 4.0;
    let vpa = (2.0 * cnna - 2.0 * caa.re + 1.0) / 4.0;
    let cxpa = caa.im / 2.0;
    let vxb = (2.0 * cnnb + 2.0 * cbb.re + 1.0) / 4.0;
    let vpb = (2.0 * cnnb - 2.0 * cbb.re + 1.0) / 4.0;
    let cxpb = cbb.im / 2.0;
    // Cross blocks from <ab> and <ab+> (cross-mode operators commute).
    let xx = (cab.re + cabd.re) / 2.0;
    let pp = (-cab.re + cabd.re) / 2.0;
    let xp = (cab.im - cabd.im) / 2.0;
    let px = (cab.im + cabd.im) / 2.0;
    [
        [vxa, cxpa, xx, xp],
        [cxpa, vpa, px, pp],
        [xx, px, vxb, cxpb],
        [xp, pp, cxpb, vpb],
    ]
}

/// Right-hand side of the master equation (commutator plus the two thermal
/// dissipators), evaluated for a Hermitian `rho`.
///
/// `scratch` must have the same length as `rho`.
pub fn liouvillian_apply(
    st: &DensityState,
    t: f64,
    params: &PhysicalParams,
    env: &PulseEnvelope,
    out: &mut [C64],
    scratch: &mut [C64],
) {
    rhs_raw(&st.rho, st.dim_a, st.dim_b, t, params, env, out, scratch);
}

#[allow(clippy::too_many_arguments)]
fn rhs_raw(
    rho: &[C64],
    da: usize,
    db: usize,
    t: f64,
    params: &PhysicalParams,
    env: &PulseEnvelope,
    out: &mut [C64],
    scratch: &mut [C64],
) {
    let n = da * db;
    let e = drive_amplitude(params, env, t);
    // scratch <- H(t) rho, built from shift/scale passes over the left index.
    scratch.fill(C64::default());
    for ia in 0..da {
        for ib in 0..db {
            let r = ia * db + ib;
            let fa = ia as f64;
            let fb = ib as f64;
            for c in 0..n {
                let mut acc = (params.delta * fa + params.omega_m * fb) * rho[r * n + c];
                // chi0 a+a (b + b+)
                if params.chi0 != 0.0 && fa > 0.0 {
                    let mut radp = C64::default();
                    if ib + 1 < db {
                        radp += (fb + 1.0).sqrt() * rho[(r + 1) * n + c];
                    }
                    if ib > 0 {
                        radp += fb.sqrt() * rho[(r - 1) * n + c];
                    }
                    acc += params.chi0 * fa * radp;
                }
                // i E(t) (a+ - a)
                if e != 0.0 {
                    let mut drive = C64::default();
                    if ia > 0 {
                        drive += fa.sqrt() * rho[(r - db) * n + c];
                    }
                    if ia + 1 < da {
                        drive -= (fa + 1.0).sqrt() * rho[(r + db) * n + c];
                    }
                    acc += C64::i() * e * drive;
                }
                scratch[r * n + c] += acc;
            }
        }
    }
    // out <- -i [H, rho] = -i (H rho - (H rho)^dagger) for Hermitian rho.
    for r in 0..n {
        for c in 0..n {
            out[r * n + c] =
                -C64::i() * (scratch[r * n + c] - scratch[c * n + r].conj());
        }
    }
    // Thermal dissipators, amplitude-decay convention:
    // gamma (nth+1) (2 L rho L+ - L+L rho - rho L+L) with L = a,
    // gamma nth (2 L+ rho L - L L+ rho - rho L L+).
    let diss = [
        (params.gamma_a, params.n_th_a, db, da, true),
        (params.gamma_b, params.n_th_b, 1usize, db, false),
    ];
    for (gamma, nth, stride, dim, is_a) in diss {
        if gamma == 0.0 {
            continue;
        }
        let down = gamma * (nth + 1.0);
        let up = gamma * nth;
        for ia in 0..da {
            for ib in 0..db {
                let r = ia * db + ib;
                let ri = if is_a { ia } else { ib };
                for ja in 0..da {
                    for jb in 0..db {
                        let c = ja * db + jb;
                        let ci = if is_a { ja } else { jb };
                        let mut acc = C64::default();
                        // 2 a rho a+
                        if ri + 1 < dim && ci + 1 < dim {
                            acc += 2.0 * down
                                * (((ri + 1) * (ci + 1)) as f64).sqrt()
                                * rho[(r + stride) * n + (c + stride)];
                        }
                        acc -= down * (ri + ci) as f64 * rho[r * n + c];
                        if up != 0.0 {
                            // 2 a+ rho a
                            if ri > 0 && ci > 0 {
                                acc += 2.0 * up
                                    * ((ri * ci) as f64).sqrt()
                                    * rho[(r - stride) * n + (c - stride)];
                            }
                            acc -= up * (ri + ci + 2) as f64 * rho[r * n + c];
                        }
                        out[r * n + c] += acc;
                    }
                }
            }
        }
    }
}

/// Moments and quadrature covariance extracted at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCheckpoint {
    pub t: f64,
    pub moments: CavityMoments,
    pub covariance: [[f64; 4]; 4],
}

const TRUNCATION_TOL: f64 = 1e-6;
const TRACE_TOL: f64 = 1e-6;

/// Classic RK4 evolution of the master equation, extracting moments at the
/// requested checkpoint times.
pub fn evolve_me(
    params: &PhysicalParams,
    env: &PulseEnvelope,
    fock: &FockConfig,
    checkpoint_times: &[f64],
) -> Result<Vec<OracleCheckpoint>> {
    fock.validate()?;
    params.validate()?;
    let mut st = DensityState::initial(fock.dim_a, fock.dim_b, params.n_b0);
    let len = st.rho.len();
    let mut k1 = vec![C64::default(); len];
    let mut k2 = vec![C64::default(); len];
    let mut k3 = vec![C64::default(); len];
    let mut k4 = vec![C64::default(); len];
    let mut tmp = vec![C64::default(); len];
    let mut scratch = vec![C64::default(); len];
    let mut out = Vec::with_capacity(checkpoint_times.len());
    let mut t_prev = 0.0;
    for &t_cp in checkpoint_times {
        if t_cp < t_prev {
            return Err(Error::InvalidConfig("oracle checkpoints must be nondecreasing"));
        }
        let span = t_cp - t_prev;
        let n_sub = (span / fock.dt).ceil().max(1.0) as usize;
        let h = span / n_sub as f64;
        let (da, db) = (fock.dim_a, fock.dim_b);
        for sub in 0..n_sub {
            // Stage times are computed from the segment start, not by
            // accumulation, so the last stage hits t_cp exactly even after
            // thousands of substeps (the envelope is discontinuous at the
            // pulse edge, and drift past it would drop the k4 drive term).
            let t = t_prev + sub as f64 * h;
            let t_end = if sub + 1 == n_sub { t_cp } else { t + h };
            rhs_raw(&st.rho, da, db, t, params, env, &mut k1, &mut scratch);
            stage(&st.rho, &k1, 0.5 * h, &mut tmp);
            rhs_raw(&tmp, da, db, t + 0.5 * h, params, env, &mut k2, &mut scratch);
            stage(&st.rho, &k2, 0.5 * h, &mut tmp);
            rhs_raw(&tmp, da, db, t + 0.5 * h, params, env, &mut k3, &mut scratch);
            stage(&st.rho, &k3, h, &mut tmp);
            rhs_raw(&tmp, da, db, t_end, params, env, &mut k4, &mut scratch);
            for i in 0..len {
                st.rho[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        st.t = t_cp;
        let trace_err = (st.trace() - C64::new(1.0, 0.0)).norm();
        if trace_err > TRACE_TOL {
            return Err(Error::StepSize { trace_error: trace_err });
        }
        let (top_a, top_b) = st.top_level_population();
        if top_a > TRUNCATION_TOL || top_b > TRUNCATION_TOL {
            return Err(Error::Truncation { top_population: top_a.max(top_b) });
        }
        let moments = st.moments();
        out.push(OracleCheckpoint { t: st.t, moments, covariance: quantum_quad_covariance(&moments) });
        t_prev = t_cp;
    }
    Ok(out)
}

fn stage(rho: &[C64], k: &[C64], h: f64, out: &mut [C64]) {
    for i in 0..rho.len() {
        out[i] = rho[i] + h * k[i];
    }
}
