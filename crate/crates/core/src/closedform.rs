//! Closed-form transient solution of the weak-probe amplitude equation.
//!
//! With `x = sqrt(s + i delta')` the Laplace-domain amplitude becomes
//! `b~(s) = -i Omega x / P(x)`, where `P` is the characteristic quintic with
//! roots `x_i`. Partial fractions give `b~ = -sum_i alpha_i / (x - x_i)` with
//! `alpha_i = i Omega x_i / prod_{j != i} (x_i - x_j)`, and term-by-term
//! inversion (using `sum_i alpha_i = 0` to cancel the `1/sqrt(pi t)` pieces)
//! yields
//!
//! ```text
//! b1(t) = -e^{-i delta' t} sum_i alpha_i x_i e^{x_i^2 t} erfc(-x_i sqrt(t)).
//! ```
//!
//! The leading `-e^{-i delta' t}` comes from the frequency shift in `x` and the
//! sign of the resolvent; without it the initial slope would be `+i Omega`
//! instead of `-i Omega`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::params::{SystemParams, TimeGrid};
use crate::polyroots::{build_quintic, find_roots};
use crate::specfun::erfcx;

const ZERO_ROOT_TOLERANCE: f64 = 1e-12;
const DEGENERACY_TOLERANCE: f64 = 1e-6;

/// Quintic roots with their branch-resolved partners and expansion weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSystem {
    pub x: [Complex64; 5],
    /// `y_i = +-x_i`, the principal square root of `x_i^2`.
    pub y: [Complex64; 5],
    pub alpha: [Complex64; 5],
    /// False for (numerically) zero roots, whose weight is pinned to 0.
    pub contributing: [bool; 5],
    pub delta_prime: f64,
    pub omega_rabi: f64,
    /// Relative residual of each root in the quintic.
    pub residuals: [f64; 5],
}

impl RootSystem {
    pub fn contributing_count(&self) -> usize {
        self.contributing.iter().filter(|c| **c).count()
    }

    /// `sum_i alpha_i x_i`, which equals `-b1(0)` and vanishes identically.
    pub fn initial_value_defect(&self) -> Complex64 {
        self.alpha.iter().zip(&self.x).map(|(a, x)| a * x).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    VolterraPerturbative,
    VolterraFull,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::VolterraPerturbative => "volterra_perturbative",
            Method::VolterraFull => "volterra_full",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrace {
    pub grid: TimeGrid,
    pub b1: Vec<Complex64>,
    /// Ground-state amplitude; identically 1 unless the full system was solved.
    pub b0: Vec<Complex64>,
    pub method: Method,
}

impl AmplitudeTrace {
    pub fn max_abs_b1(&self) -> f64 {
        self.b1.iter().map(|b| b.norm()).fold(0.0, f64::max)
    }

    /// `max_t |1 - b0(t)|`.
    pub fn max_ground_depletion(&self) -> f64 {
        self.b0.iter().map(|b| (1.0 - b).norm()).fold(0.0, f64::max)
    }

    /// `max_t |b1(t) - other.b1(t)|` over a common grid.
    pub fn max_abs_diff(&self, other: &AmplitudeTrace) -> f64 {
        assert_eq!(self.b1.len(), other.b1.len(), "traces on different grids");
        self.b1
            .iter()
            .zip(&other.b1)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SusceptibilityTrace {
    pub grid: TimeGrid,
    pub chi: Vec<Complex64>,
    /// `-Im chi`; positive is absorption, negative is gain.
    pub neg_im_chi: Vec<f64>,
    /// `|b1|^2`.
    pub population1: Vec<f64>,
}

/// `y = x` for `Re x > 0`, `y = -x` for `Re x < 0`. On the imaginary axis the
/// choice `y = x` for `Im x >= 0` (else `-x`) keeps `y` the principal root of
/// `x^2`, i.e. `arg(x^2)` in `(-pi, pi]`.
pub fn branch_partner(x: Complex64) -> Complex64 {
    if x.re > 0.0 || (x.re == 0.0 && x.im >= 0.0) {
        x
    } else {
        -x
    }
}

pub fn build_root_system(params: &SystemParams) -> Result<RootSystem> {
    params.validate()?;
    let quintic = build_quintic(params);
    let found = find_roots(&quintic)?;

    let coeff_scale = quintic
        .coefficients()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let zero_threshold = ZERO_ROOT_TOLERANCE * (1.0 + coeff_scale);

    let mut x = [Complex64::new(0.0, 0.0); 5];
    let mut residuals = [0.0; 5];
    x.copy_from_slice(&found.roots);
    residuals.copy_from_slice(&found.residuals);

    let contributing = x.map(|r| r.norm() > zero_threshold);

    let scale = x.iter().map(|r| r.norm()).fold(1.0, f64::max);
    for i in 0..5 {
        for j in i + 1..5 {
            if contributing[i]
                && contributing[j]
                && (x[i] - x[j]).norm() < DEGENERACY_TOLERANCE * scale
            {
                return Err(Error::DegenerateRoots { i, j });
            }
        }
    }

    let i_omega = Complex64::new(0.0, params.omega_rabi);
    let mut alpha = [Complex64::new(0.0, 0.0); 5];
    for i in 0..5 {
        if !contributing[i] {
            continue;
        }
        let denom: Complex64 = (0..5).filter(|&j| j != i).map(|j| x[i] - x[j]).product();
        alpha[i] = i_omega * x[i] / denom;
    }

    Ok(RootSystem {
        x,
        y: x.map(branch_partner),
        alpha,
        contributing,
        delta_prime: params.delta_g - params.delta,
        omega_rabi: params.omega_rabi,
        residuals,
    })
}

/// `b1(t)` at a single time.
///
/// Each root contributes `alpha x e^{x^2 t} erfc(-x sqrt t)`. Written with the
/// branch partner `y` this is
///
/// ```text
/// alpha [ (x + y) e^{x^2 t} - y erfcx(y sqrt t) ]
/// ```
///
/// which is the same quantity for either sign of `y` because
/// `erfc(-u) = 2 - erfc(u)`. Choosing `Re y >= 0` keeps `erfcx` on its bounded
/// half plane, and the exponential is only kept when `y = x`, where
/// `x^2 - i delta'` is a resolvent pole on the physical sheet and cannot grow.
/// For `y = -x` the `(x + y)` factor is exactly zero and the possibly huge
/// `e^{x^2 t}` is never formed.
pub fn b1_at(rs: &RootSystem, t: f64) -> Complex64 {
    if t == 0.0 {
        // the sum reduces to -sum alpha x, zero up to rounding
        return Complex64::new(0.0, 0.0);
    }
    let detuning = Complex64::new(0.0, -rs.delta_prime);
    let sqrt_t = t.sqrt();
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..5 {
        if !rs.contributing[i] {
            continue;
        }
        let (x, y, a) = (rs.x[i], rs.y[i], rs.alpha[i]);
        let mut term = -y * erfcx(y * sqrt_t) * (detuning * t).exp();
        if y == x {
            term += 2.0 * x * ((x * x + detuning) * t).exp();
        }
        sum += a * term;
    }
    -sum
}

pub fn eval_b1(rs: &RootSystem, grid: &TimeGrid) -> Result<AmplitudeTrace> {
    grid.validate()?;
    let mut b1 = Vec::with_capacity(grid.len());
    for t in grid.times() {
        let v = b1_at(rs, t);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::OverflowDetected { t });
        }
        b1.push(v);
    }
    Ok(AmplitudeTrace {
        grid: *grid,
        b0: vec![Complex64::new(1.0, 0.0); b1.len()],
        b1,
        method: Method::ClosedForm,
    })
}

/// Convenience: roots plus trace.
pub fn solve_closed_form(params: &SystemParams, grid: &TimeGrid) -> Result<AmplitudeTrace> {
    eval_b1(&build_root_system(params)?, grid)
}

/// `chi(t) = -(chi_prefactor / Omega) b0(t) conj(b1(t))`. With the probe off
/// (`Omega = 0`) there is no induced polarization and `chi` is reported as 0.
pub fn eval_susceptibility(params: &SystemParams, amp: &AmplitudeTrace) -> SusceptibilityTrace {
    let chi: Vec<Complex64> = if params.omega_rabi == 0.0 {
        vec![Complex64::new(0.0, 0.0); amp.b1.len()]
    } else {
        let scale = -params.chi_prefactor / params.omega_rabi;
        amp.b0
            .iter()
            .zip(&amp.b1)
            .map(|(b0, b1)| scale * b0 * b1.conj())
            .collect()
    };
    SusceptibilityTrace {
        grid: amp.grid,
        neg_im_chi: chi.iter().map(|c| -c.im).collect(),
        population1: amp.b1.iter().map(|b| b.norm_sqr()).collect(),
        chi,
    }
}

/// `lim_{t -> inf} b1(t)`, the residue of the resolvent at `s = 0`:
/// `Omega / (delta + i gamma/2 + i K~(0))`.
///
/// On the transparency line `delta' = 0` the kernel transform diverges at
/// `s = 0` and the limit is 0. Bound states with purely imaginary poles, if
/// present, add undamped oscillations that this value does not include.
pub fn steady_state_value(params: &SystemParams) -> Result<Complex64> {
    params.validate()?;
    let dp = params.delta_g - params.delta;
    if dp == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let k0 = KernelSpec::from_params(params).kernel_laplace(Complex64::new(0.0, 0.0))?;
    let denom = Complex64::new(params.delta, params.gamma / 2.0) + Complex64::i() * k0;
    if denom.norm() <= f64::EPSILON * (1.0 + params.delta.abs() + params.gamma + k0.norm()) {
        return Err(Error::UndefinedLimit);
    }
    Ok(params.omega_rabi / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn family(gamma: f64) -> SystemParams {
        SystemParams {
            gamma,
            ..Default::default()
        }
    }

    #[test]
    fn three_contributing_roots_on_transparency_line() {
        let rs = build_root_system(&family(1.0)).unwrap();
        assert_eq!(rs.contributing_count(), 3);
        for i in 0..5 {
            if !rs.contributing[i] {
                assert_eq!(rs.alpha[i], c(0.0, 0.0));
                assert_eq!(rs.x[i], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn all_five_contribute_off_transparency() {
        let rs = build_root_system(&SystemParams {
            delta_g: 1.0,
            gamma: 1.0,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(rs.contributing_count(), 5);
    }

    #[test]
    fn weights_cancel_at_t0() {
        for p in [
            family(5.0),
            family(0.2),
            SystemParams {
                delta: 0.3,
                gamma: 0.7,
                ..Default::default()
            },
        ] {
            let rs = build_root_system(&p).unwrap();
            assert!(rs.initial_value_defect().norm() < 1e-12 * p.omega_rabi);
            assert!(b1_at(&rs, 0.0).norm() < 1e-12 * p.omega_rabi);
        }
    }

    #[test]
    fn branch_rule() {
        assert_eq!(branch_partner(c(0.5, -2.0)), c(0.5, -2.0));
        assert_eq!(branch_partner(c(-0.5, 2.0)), c(0.5, -2.0));
        assert_eq!(branch_partner(c(0.0, 1.0)), c(0.0, 1.0));
        assert_eq!(branch_partner(c(0.0, -1.0)), c(-0.0, 1.0));
        for x in [
            c(0.3, 0.4),
            c(-1.2, 0.1),
            c(0.0, 1.0),
            c(0.0, -2.0),
            c(-0.7, -0.7),
        ] {
            let y = branch_partner(x);
            assert_eq!(y * y, x * x);
            let root = crate::specfun::principal_sqrt(x * x).value;
            assert!((y - root).norm() < 1e-15, "{x}");
        }
    }

    #[test]
    fn initial_slope_is_minus_i_omega() {
        let p = family(0.2);
        let rs = build_root_system(&p).unwrap();
        for h in [1e-4, 1e-6] {
            let slope = (b1_at(&rs, h) - b1_at(&rs, 0.0)) / h;
            let want = c(0.0, -p.omega_rabi);
            assert!(
                (slope - want).norm() < 10.0 * h.sqrt() * p.omega_rabi,
                "h = {h}: {slope}"
            );
        }
    }

    #[test]
    fn zero_probe_gives_zero_response() {
        let p = SystemParams {
            omega_rabi: 0.0,
            ..Default::default()
        };
        let grid = TimeGrid::new(10.0, 100).unwrap();
        let amp = solve_closed_form(&p, &grid).unwrap();
        assert!(amp.b1.iter().all(|b| *b == c(0.0, 0.0)));
        let sus = eval_susceptibility(&p, &amp);
        assert!(sus.chi.iter().all(|x| *x == c(0.0, 0.0)));
    }

    #[test]
    fn susceptibility_is_probe_independent() {
        let grid = TimeGrid::new(20.0, 400).unwrap();
        let p1 = family(0.5);
        let p2 = SystemParams {
            omega_rabi: 2.0 * p1.omega_rabi,
            ..p1
        };
        let s1 = eval_susceptibility(&p1, &solve_closed_form(&p1, &grid).unwrap());
        let s2 = eval_susceptibility(&p2, &solve_closed_form(&p2, &grid).unwrap());
        assert_eq!(s1.chi, s2.chi);
    }

    #[test]
    fn susceptibility_fields_are_consistent() {
        let p = family(0.2);
        let sus = eval_susceptibility(
            &p,
            &solve_closed_form(&p, &TimeGrid::new(5.0, 50).unwrap()).unwrap(),
        );
        for k in 0..sus.chi.len() {
            assert_eq!(sus.neg_im_chi[k], -sus.chi[k].im);
            assert!(sus.population1[k] >= 0.0);
        }
    }

    #[test]
    fn strong_background_decay_gives_pure_absorption() {
        let p = family(5.0);
        let sus = eval_susceptibility(&p, &solve_closed_form(&p, &TimeGrid::default()).unwrap());
        let max = sus.neg_im_chi.iter().cloned().fold(f64::MIN, f64::max);
        assert!(sus.neg_im_chi.iter().all(|v| *v >= -1e-6 * max));
    }

    #[test]
    fn steady_state_examples() {
        assert_eq!(
            steady_state_value(&SystemParams {
                delta: 0.5,
                delta_g: 0.5,
                ..Default::default()
            })
            .unwrap(),
            c(0.0, 0.0)
        );
        // vanishing reservoir coupling leaves the bare two-level response
        let p = SystemParams {
            beta: 1e-12,
            gamma: 1.0,
            delta: 0.4,
            delta_g: 1.0,
            ..Default::default()
        };
        let want = p.omega_rabi / c(0.4, 0.5);
        assert!((steady_state_value(&p).unwrap() - want).norm() < 1e-12);
    }

    #[test]
    fn steady_state_matches_long_time_closed_form() {
        let p = SystemParams {
            gamma: 1.0,
            delta_g: 1.0,
            ..Default::default()
        };
        let rs = build_root_system(&p).unwrap();
        let ss = steady_state_value(&p).unwrap();
        assert!((b1_at(&rs, 400.0) - ss).norm() < 1e-3 * ss.norm());
    }

    #[test]
    fn closed_form_stays_finite_for_long_times() {
        let grid = TimeGrid::new(1000.0, 2000).unwrap();
        for gamma in [5.0, 1.0, 0.5, 0.2] {
            let amp = solve_closed_form(&family(gamma), &grid).unwrap();
            assert!(amp.b1.iter().all(|b| b.re.is_finite() && b.im.is_finite()));
        }
    }
}
