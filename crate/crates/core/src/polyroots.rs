//! Roots of complex polynomials by Aberth-Ehrlich simultaneous iteration.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::SystemParams;

const MAX_ITERATIONS: usize = 500;
const RESIDUAL_LIMIT: f64 = 1e-10;
const DEGENERACY_TOLERANCE: f64 = 1e-6;

/// Polynomial with coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coefficients: Vec<Complex64>,
}

impl ComplexPolynomial {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        match coefficients.last() {
            Some(lead) if *lead != Complex64::new(0.0, 0.0) => Ok(Self { coefficients }),
            _ => Err(Error::LeadingZero),
        }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    /// `(p(x), p'(x))` by Horner.
    pub fn eval_with_derivative(&self, x: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        self.coefficients
            .iter()
            .rev()
            .fold((zero, zero), |(p, dp), c| (p * x + c, dp * x + p))
    }

    /// `|p(x)| / sum_k |c_k| |x|^k`: backward-error style residual, 0 at an exact root.
    pub fn relative_residual(&self, x: Complex64) -> f64 {
        let value = self.eval(x).norm();
        if value == 0.0 {
            return 0.0;
        }
        let r = x.norm();
        let scale = self
            .coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm());
        value / scale
    }

    pub fn mul(&self, other: &ComplexPolynomial) -> ComplexPolynomial {
        let mut out =
            vec![Complex64::new(0.0, 0.0); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPolynomial { coefficients: out }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootList {
    /// Roots with multiplicity, sorted by real then imaginary part.
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    /// Index pairs closer than `1e-6 * max(1, max |root|)`.
    pub degenerate_pairs: Vec<(usize, usize)>,
}

impl RootList {
    pub fn worst_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// `x^5 + c3 x^3 + c2 x^2 + c1 x + c0` for the given system.
pub fn build_quintic(params: &SystemParams) -> ComplexPolynomial {
    let d = params.derive();
    let i = Complex64::i();
    let dp = d.delta_prime;
    let c3 = Complex64::new(params.gamma / 2.0, -(params.delta_g + dp));
    let c2 = -i * d.k0;
    let c1 = -dp * Complex64::new(params.delta_g, params.gamma / 2.0);
    let c0 = -d.k0 * dp;
    let zero = Complex64::new(0.0, 0.0);
    ComplexPolynomial {
        coefficients: vec![c0, c1, c2, c3, zero, Complex64::new(1.0, 0.0)],
    }
}

/// The cubic factor `x^3 + (gamma/2 - i delta_g) x - i K0`, whose roots are
/// the resolvent poles; the quintic is this times `x^2 - i delta'`.
pub fn build_cubic(params: &SystemParams) -> ComplexPolynomial {
    let d = params.derive();
    let zero = Complex64::new(0.0, 0.0);
    ComplexPolynomial {
        coefficients: vec![
            -Complex64::i() * d.k0,
            Complex64::new(params.gamma / 2.0, -params.delta_g),
            zero,
            Complex64::new(1.0, 0.0),
        ],
    }
}

pub fn find_roots(p: &ComplexPolynomial) -> Result<RootList> {
    let zero = Complex64::new(0.0, 0.0);
    if p.degree() == 0 {
        return Ok(RootList {
            roots: vec![],
            residuals: vec![],
            degenerate_pairs: vec![],
        });
    }

    // Exact zero roots are split off; simultaneous iteration only converges
    // linearly onto a multiple root.
    let zeros = p.coefficients.iter().take_while(|c| **c == zero).count();
    let lead = *p.coefficients.last().unwrap();
    let reduced: Vec<Complex64> = p.coefficients[zeros..].iter().map(|c| c / lead).collect();
    let reduced = ComplexPolynomial {
        coefficients: reduced,
    };

    let mut roots = vec![zero; zeros];
    roots.extend(aberth(&reduced));

    for r in roots.iter_mut().skip(zeros) {
        *r = polish(&reduced, *r);
    }

    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let residuals: Vec<f64> = roots.iter().map(|r| p.relative_residual(*r)).collect();

    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if worst.is_nan() || worst >= RESIDUAL_LIMIT {
        return Err(Error::NonConvergence {
            worst_residual: worst,
            roots,
        });
    }

    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let mut degenerate_pairs = Vec::new();
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < DEGENERACY_TOLERANCE * scale {
                degenerate_pairs.push((i, j));
            }
        }
    }
    Ok(RootList {
        roots,
        residuals,
        degenerate_pairs,
    })
}

/// Aberth-Ehrlich iteration on a monic polynomial with nonzero constant term.
fn aberth(p: &ComplexPolynomial) -> Vec<Complex64> {
    let n = p.degree();
    if n == 0 {
        return vec![];
    }
    if n == 1 {
        return vec![-p.coefficients[0]];
    }
    let radius = 1.0
        + p.coefficients[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();

    for _ in 0..MAX_ITERATIONS {
        let mut converged = true;
        for i in 0..n {
            let (value, slope) = p.eval_with_derivative(z[i]);
            if value == Complex64::new(0.0, 0.0) {
                continue;
            }
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let denom = slope - value * repulsion;
            if denom == Complex64::new(0.0, 0.0) || !denom.is_finite() {
                converged = false;
                continue;
            }
            let step = value / denom;
            if !step.is_finite() {
                converged = false;
                continue;
            }
            z[i] -= step;
            if step.norm() > 4.0 * f64::EPSILON * z[i].norm() {
                converged = false;
            }
        }
        if converged {
            break;
        }
    }
    z
}

/// A few Newton steps, kept only while they reduce the residual.
fn polish(p: &ComplexPolynomial, mut x: Complex64) -> Complex64 {
    let mut best = p.eval(x).norm();
    for _ in 0..3 {
        let (value, slope) = p.eval_with_derivative(x);
        if value == Complex64::new(0.0, 0.0) || slope == Complex64::new(0.0, 0.0) {
            break;
        }
        let candidate = x - value / slope;
        let r = p.eval(candidate).norm();
        if r < best {
            best = r;
            x = candidate;
        } else {
            break;
        }
    }
    x
}
