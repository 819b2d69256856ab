//! Physical parameters, derived constants and the uniform time grid.
//!
//! Every rate and detuning is expressed in units of the reservoir coupling
//! `beta`; times are in units of `1/beta`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};

/// Parameters of the probe-driven three-level emitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Atom-reservoir resonant coupling.
    pub beta: f64,
    /// Background (Markovian) decay rate of the excited level.
    pub gamma: f64,
    /// Probe detuning from the |0> <-> |1> transition.
    pub delta: f64,
    /// Detuning of the band edge from the |1> <-> |2> transition.
    pub delta_g: f64,
    /// Probe Rabi frequency. Zero switches the probe off.
    pub omega_rabi: f64,
    /// Lumped susceptibility normalization (arbitrary units).
    pub chi_prefactor: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            beta: 1.0,
            gamma: 0.2,
            delta: 0.0,
            delta_g: 0.0,
            omega_rabi: 0.01,
            chi_prefactor: 1.0,
        }
    }
}

/// Constants that enter the characteristic quintic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// `delta_g - delta`.
    pub delta_prime: f64,
    /// `i beta^{3/2} e^{-i pi/4}`, which equals `beta^{3/2} e^{i pi/4}`.
    pub k0: Complex64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        fn finite(name: &'static str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParams {
                    name,
                    reason: format!("{v} is not finite"),
                })
            }
        }
        finite("beta", self.beta)?;
        finite("gamma", self.gamma)?;
        finite("delta", self.delta)?;
        finite("delta_g", self.delta_g)?;
        finite("omega_rabi", self.omega_rabi)?;
        finite("chi_prefactor", self.chi_prefactor)?;
        if self.beta <= 0.0 {
            return Err(Error::InvalidParams {
                name: "beta",
                reason: "must be > 0".into(),
            });
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidParams {
                name: "gamma",
                reason: "must be >= 0".into(),
            });
        }
        if self.omega_rabi < 0.0 {
            return Err(Error::InvalidParams {
                name: "omega_rabi",
                reason: "must be >= 0".into(),
            });
        }
        if self.chi_prefactor <= 0.0 {
            return Err(Error::InvalidParams {
                name: "chi_prefactor",
                reason: "must be > 0".into(),
            });
        }
        Ok(())
    }

    pub fn derive(&self) -> DerivedParams {
        let k0 = Complex64::i() * self.beta.powf(1.5) * Complex64::from_polar(1.0, -FRAC_PI_4);
        DerivedParams {
            delta_prime: self.delta_g - self.delta,
            k0,
        }
    }

    /// `Some(message)` when the probe is too strong for the weak-probe
    /// approximation (`omega <= 0.1 min(beta, gamma)`).
    pub fn perturbative_warning(&self) -> Option<String> {
        let bound = if self.gamma > 0.0 {
            0.1 * self.beta.min(self.gamma)
        } else {
            0.1 * self.beta
        };
        (self.omega_rabi > bound).then(|| {
            format!(
                "omega_rabi = {} exceeds the weak-probe bound {bound}; \
                 closed-form and perturbative results may be inaccurate",
                self.omega_rabi
            )
        })
    }
}

/// Uniform grid `t_k = k * t_max / n_steps`, `k = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_steps: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            t_max: 50.0,
            n_steps: 5000,
        }
    }
}

impl TimeGrid {
    pub fn new(t_max: f64, n_steps: usize) -> Result<Self> {
        let grid = Self { t_max, n_steps };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid with step `h` covering `[0, t_max]`; `t_max / h` is rounded to the
    /// nearest integer.
    pub fn with_step(t_max: f64, h: f64) -> Result<Self> {
        if h.is_nan() || h <= 0.0 {
            return Err(Error::InvalidGrid(format!("step {h} must be > 0")));
        }
        Self::new(t_max, (t_max / h).round() as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "t_max = {} must be > 0",
                self.t_max
            )));
        }
        if self.n_steps < 2 {
            return Err(Error::InvalidGrid(format!(
                "n_steps = {} must be >= 2",
                self.n_steps
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.t_max
        } else {
            k as f64 * self.step()
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.t(k))
    }
}
