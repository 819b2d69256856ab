//! Complex special functions: principal square root with explicit branch
//! bookkeeping and the scaled complementary error function
//! `erfcx(z) = exp(z^2) erfc(z)`.
//!
//! `erfcx` is split into two regions:
//!
//! * `|z| < ERFCX_SERIES_RADIUS`: the entire power series
//!   `erfcx(z) = sum_n (-z)^n / Gamma(n/2 + 1)`, summed in double-double
//!   arithmetic. In the right half plane the terms grow to `~exp(|z|^2)`
//!   while the sum stays O(1/|z|); the extra ~32 bits absorb that
//!   cancellation (about `exp(36) ~ 4e15` at the boundary).
//! * `|z| >= ERFCX_SERIES_RADIUS`, `Re z >= 0`: the Laplace continued fraction
//!   `erfcx(z) = 1/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))`.
//!   Near the imaginary axis the truncated fraction drops a term of size
//!   `|exp(z^2)| <= exp(-36)`, below double precision at this radius.
//! * `|z| >= ERFCX_SERIES_RADIUS`, `Re z < 0`: reflection,
//!   `erfcx(z) = 2 exp(z^2) - erfcx(-z)`, which overflows to infinity once
//!   `Re(z^2) > ~709`. That case is reported through [`ErfcxStatus`].

use num_complex::Complex64;
use std::f64::consts::PI;

/// Region boundary between the series and the continued fraction.
pub const ERFCX_SERIES_RADIUS: f64 = 6.0;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// A square root together with the phase of its argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedSqrt {
    pub value: Complex64,
    /// `arg(z)` normalised to `(-pi, pi]`.
    pub phase_of_square: f64,
}

/// Principal square root, `arg(result)` in `(-pi/2, pi/2]`.
///
/// Unlike `Complex64::sqrt`, a negative real argument with a negative-zero
/// imaginary part still maps to the positive imaginary axis.
pub fn principal_sqrt(z: Complex64) -> BranchedSqrt {
    let mut phase = z.arg();
    if phase <= -PI {
        phase = PI;
    }
    let value = if z.im == 0.0 && z.re < 0.0 {
        Complex64::new(0.0, (-z.re).sqrt())
    } else {
        let r = z.sqrt();
        // Complex64::sqrt keeps the sign of a zero real part; pin it to +0.
        if r.re == 0.0 {
            Complex64::new(0.0, r.im.abs())
        } else {
            r
        }
    };
    BranchedSqrt {
        value,
        phase_of_square: phase,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErfcxStatus {
    Ok,
    /// Left-half-plane argument whose `2 exp(z^2)` term overflowed.
    Overflow,
}

/// `erfcx(z) = exp(z^2) erfc(z)` for complex `z`.
pub fn erfcx(z: Complex64) -> Complex64 {
    erfcx_with_status(z).0
}

pub fn erfcx_with_status(z: Complex64) -> (Complex64, ErfcxStatus) {
    if z.norm() < ERFCX_SERIES_RADIUS {
        return (erfcx_series(z), ErfcxStatus::Ok);
    }
    if z.re >= 0.0 {
        return (erfcx_continued_fraction(z), ErfcxStatus::Ok);
    }
    let big = 2.0 * (z * z).exp();
    if !(big.re.is_finite() && big.im.is_finite()) {
        let inf = Complex64::new(f64::INFINITY, f64::INFINITY);
        return (inf, ErfcxStatus::Overflow);
    }
    (big - erfcx_continued_fraction(-z), ErfcxStatus::Ok)
}

/// Power series evaluated in double-double arithmetic. Accurate to near
/// machine precision for `|z| <= 6`; usable (with growing cancellation loss)
/// somewhat beyond.
pub fn erfcx_series(z: Complex64) -> Complex64 {
    // 2 / sqrt(pi) as a double-double.
    const TWO_OVER_SQRT_PI: Dd = Dd {
        hi: std::f64::consts::FRAC_2_SQRT_PI,
        lo: 1.533_545_961_316_588e-17,
    };

    let zz = CDd::square_of(z);
    let r2 = z.norm_sqr();

    let mut even = CDd::ONE;
    let mut odd = CDd::from_c64(-z).scale_dd(TWO_OVER_SQRT_PI);
    let mut sum = even.add(odd);
    let mut n = 0usize;
    loop {
        // T_{n+2} = T_n * z^2 * 2 / (n + 2)
        even = even.mul(zz).mul_f64(2.0).div_f64((n + 2) as f64);
        odd = odd.mul(zz).mul_f64(2.0).div_f64((n + 3) as f64);
        sum = sum.add(even).add(odd);
        n += 2;
        let tail = even.approx_norm() + odd.approx_norm();
        let past_peak = (n as f64) > 2.0 * r2;
        if past_peak && tail <= 1e-22 * sum.approx_norm() {
            break;
        }
        if n > 4000 {
            break;
        }
    }
    sum.to_c64()
}

/// Laplace continued fraction, modified Lentz evaluation. Valid for
/// `Re z >= 0`; converges quickly for `|z| >~ 4`.
pub fn erfcx_continued_fraction(z: Complex64) -> Complex64 {
    const TINY: f64 = 1e-300;
    const MAX_TERMS: usize = 20_000;
    let tiny = Complex64::new(TINY, 0.0);
    let mut f = if z == Complex64::new(0.0, 0.0) {
        tiny
    } else {
        z
    };
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..=MAX_TERMS {
        let a = 0.5 * k as f64;
        d = z + a * d;
        if d.norm() < TINY {
            d = tiny;
        }
        c = z + a / c;
        if c.norm() < TINY {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    FRAC_1_SQRT_PI / f
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn neg(self) -> Self {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let r = self.sub(Dd::from_f64(b).mul_f64(q1));
        let q2 = r.hi / b;
        let r = r.sub(Dd::from_f64(b).mul_f64(q2));
        let q3 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }
}

#[derive(Debug, Clone, Copy)]
struct CDd {
    re: Dd,
    im: Dd,
}

impl CDd {
    const ONE: CDd = CDd {
        re: Dd { hi: 1.0, lo: 0.0 },
        im: Dd::ZERO,
    };

    fn from_c64(z: Complex64) -> Self {
        CDd {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    /// Exact square of a double-precision complex number.
    fn square_of(z: Complex64) -> Self {
        let (xx, exx) = two_prod(z.re, z.re);
        let (yy, eyy) = two_prod(z.im, z.im);
        let (xy, exy) = two_prod(z.re, z.im);
        let re = Dd { hi: xx, lo: exx }.sub(Dd { hi: yy, lo: eyy });
        let im = Dd {
            hi: 2.0 * xy,
            lo: 2.0 * exy,
        };
        CDd { re, im }
    }

    fn add(self, o: CDd) -> CDd {
        CDd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    fn mul(self, o: CDd) -> CDd {
        CDd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    fn scale_dd(self, s: Dd) -> CDd {
        CDd {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    fn mul_f64(self, s: f64) -> CDd {
        CDd {
            re: self.re.mul_f64(s),
            im: self.im.mul_f64(s),
        }
    }

    fn div_f64(self, s: f64) -> CDd {
        CDd {
            re: self.re.div_f64(s),
            im: self.im.div_f64(s),
        }
    }

    fn approx_norm(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.hi + self.re.lo, self.im.hi + self.im.lo)
    }
}
