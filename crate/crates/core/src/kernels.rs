//! Memory kernels of the excited-state amplitude equation.
//!
//! The band-edge reservoir has density of modes `Theta(w - w_g) / (pi sqrt(w - w_g))`,
//! which gives
//!
//! ```text
//! K(tau)  = beta^{3/2} e^{-i pi/4} e^{-i delta' tau} / sqrt(pi tau)
//! K~(s)   = beta^{3/2} e^{-i pi/4} / sqrt(s + i delta')
//! ```
//!
//! The flat (Markovian) reservoir is the distribution `(Gamma/2) delta(tau)`
//! with transform `Gamma/2`; it exists as an exactly solvable reference.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::quad::GaussLegendre;
use crate::specfun::principal_sqrt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    InverseSqrtEdge { beta: f64, delta_prime: f64 },
    MarkovianFlat { gamma_flat: f64 },
}

impl KernelSpec {
    /// The band-edge kernel seen by the given parameters.
    pub fn from_params(params: &SystemParams) -> Self {
        KernelSpec::InverseSqrtEdge {
            beta: params.beta,
            delta_prime: params.delta_g - params.delta,
        }
    }

    pub fn kernel_time(&self, tau: f64) -> Result<Complex64> {
        match *self {
            KernelSpec::InverseSqrtEdge { beta, delta_prime } => {
                if tau.is_nan() || tau <= 0.0 {
                    return Err(Error::SingularAtZero(tau));
                }
                let phase = Complex64::from_polar(1.0, -FRAC_PI_4 - delta_prime * tau);
                Ok(beta.powf(1.5) * phase / (PI * tau).sqrt())
            }
            KernelSpec::MarkovianFlat { .. } => Err(Error::NotPointwise),
        }
    }

    pub fn kernel_laplace(&self, s: Complex64) -> Result<Complex64> {
        match *self {
            KernelSpec::InverseSqrtEdge { beta, delta_prime } => {
                let shifted = s + Complex64::new(0.0, delta_prime);
                if shifted.im.abs() <= 1e-12 && shifted.re <= 1e-12 {
                    return Err(Error::BranchCut(s));
                }
                let root = principal_sqrt(shifted).value;
                Ok(edge_coefficient(beta) / root)
            }
            KernelSpec::MarkovianFlat { gamma_flat } => Ok(Complex64::new(0.5 * gamma_flat, 0.0)),
        }
    }
}

/// `beta^{3/2} e^{-i pi/4}`, the strength of the `1/sqrt(pi tau)` singularity.
pub(crate) fn edge_coefficient(beta: f64) -> Complex64 {
    beta.powf(1.5) * Complex64::from_polar(1.0, -FRAC_PI_4)
}

/// `int_0^T e^{-s t} K(t) dt` by Gauss-Legendre after the substitution `t = u^2`,
/// which removes the `1/sqrt(t)` endpoint singularity.
pub fn laplace_by_quadrature(beta: f64, delta_prime: f64, s: Complex64, t_trunc: f64) -> Complex64 {
    let gl = GaussLegendre::new(20);
    let coeff = edge_coefficient(beta);
    let rate = s + Complex64::new(0.0, delta_prime);
    let u_max = t_trunc.sqrt();
    // phase and decay both vary like |rate| u^2; keep panels well resolved
    let panels = 64 + (rate.norm() * t_trunc).ceil() as usize;
    let integral = gl.integrate(|u| (-rate * u * u).exp(), 0.0, u_max, panels);
    coeff * 2.0 / PI.sqrt() * integral
}

/// `beta^{3/2} int rho(w) e^{-i (w - w_12 - delta) tau} dw` over the band window
/// `[w_g, w_g + bandwidth]`, plus the leading asymptotic tail beyond it.
///
/// With `w = w_g + v^2` the integral becomes `(2/pi) int_0^V e^{-i tau v^2} dv`,
/// `V = sqrt(bandwidth)`. The remainder `int_V^inf e^{-i tau v^2} dv` is
/// `e^{-i tau V^2} [1/(2 i tau V) + 1/(4 tau^2 V^3)] + O(V^-5)`.
pub fn kernel_by_dom_quadrature(
    beta: f64,
    delta_prime: f64,
    tau: f64,
    bandwidth: f64,
) -> Complex64 {
    let gl = GaussLegendre::new(16);
    let v_max = bandwidth.sqrt();
    let panels = 200 + (tau * bandwidth).ceil() as usize;
    let window = gl.integrate(
        |v| Complex64::from_polar(1.0, -tau * v * v),
        0.0,
        v_max,
        panels,
    );
    let edge_phase = Complex64::from_polar(1.0, -tau * bandwidth);
    let tail = edge_phase
        * (1.0 / Complex64::new(0.0, 2.0 * tau * v_max) + 1.0 / (4.0 * tau * tau * v_max.powi(3)));
    let detuning = Complex64::from_polar(1.0, -delta_prime * tau);
    beta.powf(1.5) * detuning * (2.0 / PI) * (window + tail)
}
