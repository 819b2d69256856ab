//! Direct time stepping of the weakly singular amplitude equation
//!
//! ```text
//! db1/dt = -i Omega b0 + (i delta - gamma/2) b1 - int_0^t K(t - t') b1(t') dt'
//! db0/dt = -i Omega b1                    (full system only; else b0 = 1)
//! ```
//!
//! The memory integral is handled by product integration: with
//! `K(tau) = c e^{-i delta' tau} / sqrt(pi tau)` the smooth part
//! `g(t') = c e^{-i delta' (t - t')} b1(t')` is interpolated piecewise linearly and
//! the moments of `1/sqrt(tau)` are integrated exactly on each subinterval.
//! On `[(k-1)h, kh]` the hat-function moments are, with `a = sqrt(k-1)`,
//! `b = sqrt(k)`:
//!
//! ```text
//! A_k = int (u - (k-1)) u^{-1/2} du = (2/3) (b - a)^2 (b + 2a)
//! B_k = int (k - u) u^{-1/2} du     = (2/3) (b - a)^2 (2b + a)
//! ```
//!
//! with `b - a = 1/(a + b)` evaluated without cancellation. The local terms
//! are advanced with the trapezoidal rule and the current node (weight
//! `B_1 = 4/3`) is treated implicitly, one small linear solve per step.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::closedform::{AmplitudeTrace, Method};
use crate::error::{Error, Result};
use crate::kernels::{edge_coefficient, KernelSpec};
use crate::params::{SystemParams, TimeGrid};

/// Largest step for which the accuracy contract applies.
pub const MAX_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    ProductTrapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Ground state held at `b0 = 1`.
    Perturbative,
    /// `b0` and `b1` advanced together.
    FullSystem,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub grid: TimeGrid,
    pub scheme: Scheme,
    pub mode: Mode,
}

impl SolverConfig {
    pub fn perturbative(grid: TimeGrid) -> Self {
        Self {
            grid,
            scheme: Scheme::ProductTrapezoid,
            mode: Mode::Perturbative,
        }
    }

    pub fn full_system(grid: TimeGrid) -> Self {
        Self {
            grid,
            scheme: Scheme::ProductTrapezoid,
            mode: Mode::FullSystem,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        let h = self.grid.step();
        if h > MAX_STEP {
            return Err(Error::StepTooLarge { h, limit: MAX_STEP });
        }
        Ok(())
    }
}

/// Solve in whichever mode `cfg` selects.
pub fn solve(
    params: &SystemParams,
    spec: &KernelSpec,
    cfg: &SolverConfig,
) -> Result<AmplitudeTrace> {
    match cfg.mode {
        Mode::Perturbative => solve_perturbative(params, spec, cfg),
        Mode::FullSystem => solve_full_system(params, spec, cfg),
    }
}

pub fn solve_perturbative(
    params: &SystemParams,
    spec: &KernelSpec,
    cfg: &SolverConfig,
) -> Result<AmplitudeTrace> {
    if cfg.mode != Mode::Perturbative {
        return Err(Error::ModeMismatch);
    }
    integrate(params, spec, cfg, false)
}

pub fn solve_full_system(
    params: &SystemParams,
    spec: &KernelSpec,
    cfg: &SolverConfig,
) -> Result<AmplitudeTrace> {
    if cfg.mode != Mode::FullSystem {
        return Err(Error::ModeMismatch);
    }
    integrate(params, spec, cfg, true)
}

/// Convolution weights for the memory integral on a grid with `n` steps.
struct MemoryWeights {
    /// `sqrt(h/pi) * c`.
    scale: Complex64,
    /// `omega[m]` multiplies `b1_{n-m}` for `1 <= m < n`; `omega[0]` is the
    /// implicit current-node weight.
    omega: Vec<Complex64>,
    /// `A_m` phase-shifted, for the `t' = 0` endpoint.
    first: Vec<Complex64>,
}

impl MemoryWeights {
    fn new(coefficient: Complex64, delta_prime: f64, h: f64, n: usize) -> Self {
        let moments = |k: usize| -> (f64, f64) {
            let a = ((k - 1) as f64).sqrt();
            let b = (k as f64).sqrt();
            let d = 1.0 / (a + b);
            let d2 = d * d * (2.0 / 3.0);
            (d2 * (b + 2.0 * a), d2 * (2.0 * b + a))
        };
        let phase = |m: usize| Complex64::from_polar(1.0, -delta_prime * h * m as f64);
        let mut omega = Vec::with_capacity(n + 1);
        let mut first = Vec::with_capacity(n + 1);
        omega.push(Complex64::new(moments(1).1, 0.0));
        first.push(Complex64::new(0.0, 0.0));
        for m in 1..=n {
            let (a_m, _) = moments(m);
            let (_, b_next) = moments(m + 1);
            omega.push((a_m + b_next) * phase(m));
            first.push(a_m * phase(m));
        }
        Self {
            scale: coefficient * (h / PI).sqrt(),
            omega,
            first,
        }
    }

    /// History part of the memory integral at step `n` (everything but `b1_n`).
    fn history(&self, b1: &[Complex64], n: usize) -> Complex64 {
        let mut acc = self.first[n] * b1[0];
        for (w, b) in self.omega[1..n].iter().zip(b1[1..n].iter().rev()) {
            acc += w * b;
        }
        self.scale * acc
    }

    fn current(&self) -> Complex64 {
        self.scale * self.omega[0]
    }
}

fn integrate(
    params: &SystemParams,
    spec: &KernelSpec,
    cfg: &SolverConfig,
    full: bool,
) -> Result<AmplitudeTrace> {
    params.validate()?;
    cfg.validate()?;
    let grid = cfg.grid;
    let n_steps = grid.n_steps;
    let h = grid.step();
    let half = 0.5 * h;

    let zero = Complex64::new(0.0, 0.0);
    let i_omega = Complex64::new(0.0, params.omega_rabi);
    let mut local = Complex64::new(-0.5 * params.gamma, params.delta);

    let memory = match *spec {
        KernelSpec::InverseSqrtEdge { beta, delta_prime } => {
            if h * delta_prime.abs() > 0.3 {
                log::warn!(
                    "h * |delta'| = {} exceeds 0.3; the grouped oscillatory factor is under-resolved",
                    h * delta_prime.abs()
                );
            }
            Some(MemoryWeights::new(
                edge_coefficient(beta),
                delta_prime,
                h,
                n_steps,
            ))
        }
        KernelSpec::MarkovianFlat { gamma_flat } => {
            local -= 0.5 * gamma_flat;
            None
        }
    };
    let kappa = memory.as_ref().map_or(zero, |m| m.current());

    let mut b0 = vec![Complex64::new(1.0, 0.0); n_steps + 1];
    let mut b1 = vec![zero; n_steps + 1];
    // right-hand sides at the previous node
    let mut f0_prev = zero;
    let mut f1_prev = -i_omega;

    let diag = 1.0 - half * (local - kappa);
    for n in 1..=n_steps {
        let hist = memory.as_ref().map_or(zero, |m| m.history(&b1, n));
        let r1 = b1[n - 1] + half * (f1_prev - hist);
        if full {
            // [ 1            half*i*Omega ] [b0_n]   [ b0_{n-1} + half*f0_prev ]
            // [ half*i*Omega diag         ] [b1_n] = [ r1                      ]
            let off = half * i_omega;
            let r0 = b0[n - 1] + half * f0_prev;
            let det = diag - off * off;
            b1[n] = (r1 - off * r0) / det;
            b0[n] = r0 - off * b1[n];
        } else {
            b1[n] = (r1 - half * i_omega) / diag;
        }
        if !(b1[n].re.is_finite()
            && b1[n].im.is_finite()
            && b0[n].re.is_finite()
            && b0[n].im.is_finite())
        {
            return Err(Error::NonFinite { step: n });
        }
        f0_prev = -i_omega * b1[n];
        f1_prev = -i_omega * b0[n] + (local - kappa) * b1[n] - hist;
    }

    Ok(AmplitudeTrace {
        grid,
        b1,
        b0,
        method: if full {
            Method::VolterraFull
        } else {
            Method::VolterraPerturbative
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Exact solution of db/dt = -i Omega + i Delta b, b(0) = 0.
    fn relaxation(omega: f64, delta: Complex64, t: f64) -> Complex64 {
        omega / delta * (1.0 - (Complex64::i() * delta * t).exp())
    }

    #[test]
    fn moments_sum_to_full_interval() {
        let w = MemoryWeights::new(c(1.0, 0.0), 0.0, 1.0, 50);
        // A_k + B_k = 2 (sqrt k - sqrt(k-1))
        let b1 = 4.0 / 3.0;
        assert!((w.omega[0].re - b1).abs() < 1e-15);
        assert!((w.first[1].re - 2.0 / 3.0).abs() < 1e-15);
        let total: f64 =
            w.omega[0].re + w.omega[1..50].iter().map(|x| x.re).sum::<f64>() + w.first[50].re;
        assert!((total - 2.0 * 50f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn first_step_slope() {
        let p = SystemParams::default();
        let cfg = SolverConfig::perturbative(TimeGrid::new(0.01, 10).unwrap());
        let amp = solve_perturbative(&p, &KernelSpec::from_params(&p), &cfg).unwrap();
        assert_eq!(amp.b1[0], c(0.0, 0.0));
        let h = cfg.grid.step();
        assert!((amp.b1[1] - c(0.0, -p.omega_rabi * h)).norm() < 2.0 * p.omega_rabi * h * h);
    }

    #[test]
    fn markovian_flat_kernel_is_exponential_relaxation() {
        let p = SystemParams {
            gamma: 0.2,
            delta: 0.3,
            ..Default::default()
        };
        let gamma_flat = 1.0;
        let cfg = SolverConfig::perturbative(TimeGrid::with_step(20.0, 0.001).unwrap());
        let amp = solve_perturbative(&p, &KernelSpec::MarkovianFlat { gamma_flat }, &cfg).unwrap();
        let delta = c(p.delta, 0.5 * (p.gamma + gamma_flat));
        let err = cfg
            .grid
            .times()
            .zip(&amp.b1)
            .map(|(t, b)| (b - relaxation(p.omega_rabi, delta, t)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "max error {err}");
    }

    #[test]
    fn kernel_off_is_bare_two_level_relaxation() {
        let p = SystemParams {
            gamma: 1.0,
            ..Default::default()
        };
        let cfg = SolverConfig::perturbative(TimeGrid::with_step(20.0, 0.001).unwrap());
        let amp =
            solve_perturbative(&p, &KernelSpec::MarkovianFlat { gamma_flat: 0.0 }, &cfg).unwrap();
        let delta = c(0.0, 0.5);
        for (t, b) in cfg.grid.times().zip(&amp.b1) {
            assert!((b - relaxation(p.omega_rabi, delta, t)).norm() < 1e-8);
        }
    }

    #[test]
    fn step_limit() {
        let p = SystemParams::default();
        let cfg = SolverConfig::perturbative(TimeGrid::new(50.0, 500).unwrap());
        assert!(matches!(
            solve_perturbative(&p, &KernelSpec::from_params(&p), &cfg),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn mode_must_match() {
        let p = SystemParams::default();
        let cfg = SolverConfig::perturbative(TimeGrid::new(1.0, 100).unwrap());
        assert_eq!(
            solve_full_system(&p, &KernelSpec::from_params(&p), &cfg),
            Err(Error::ModeMismatch)
        );
    }

    #[test]
    fn no_probe_keeps_ground_state() {
        for gamma in [0.2, 0.0] {
            let p = SystemParams {
                gamma,
                omega_rabi: 0.0,
                ..Default::default()
            };
            let cfg = SolverConfig::full_system(TimeGrid::new(10.0, 1000).unwrap());
            let amp = solve_full_system(&p, &KernelSpec::from_params(&p), &cfg).unwrap();
            assert!(amp.b0.iter().all(|b| *b == c(1.0, 0.0)));
            assert!(amp.b1.iter().all(|b| *b == c(0.0, 0.0)));
        }
    }

    #[test]
    fn full_system_stays_perturbative_for_weak_probe() {
        let p = SystemParams::default();
        let spec = KernelSpec::from_params(&p);
        let grid = TimeGrid::new(50.0, 5000).unwrap();
        let full = solve_full_system(&p, &spec, &SolverConfig::full_system(grid)).unwrap();
        let pert = solve_perturbative(&p, &spec, &SolverConfig::perturbative(grid)).unwrap();
        assert!(full.max_ground_depletion() < 1e-3);
        assert!(full.max_abs_diff(&pert) < 1e-3 * pert.max_abs_b1());
    }

    #[test]
    fn exactly_linear_in_probe() {
        let p = SystemParams {
            gamma: 0.5,
            delta: 0.2,
            ..Default::default()
        };
        let p2 = SystemParams {
            omega_rabi: 2.0 * p.omega_rabi,
            ..p
        };
        let spec = KernelSpec::from_params(&p);
        let cfg = SolverConfig::perturbative(TimeGrid::new(10.0, 1000).unwrap());
        let a = solve_perturbative(&p, &spec, &cfg).unwrap();
        let b = solve_perturbative(&p2, &spec, &cfg).unwrap();
        for (x, y) in a.b1.iter().zip(&b.b1) {
            assert_eq!(2.0 * x, *y);
        }
    }
}
