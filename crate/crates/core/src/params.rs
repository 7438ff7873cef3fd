use crate::fmath::{coth, exp};
use crate::Error;

/// Bath temperature. `Zero` is a dedicated path where `coth(βω/2) ≡ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    Zero,
    /// Finite temperature `T > 0` in units of `ω_l`.
    Finite(f64),
}

impl Temperature {
    /// `T = 0` maps to [`Temperature::Zero`]; negative or non-finite values are
    /// rejected.
    pub fn new(t: f64) -> Result<Self, Error> {
        if t == 0.0 {
            Ok(Temperature::Zero)
        } else if t > 0.0 && t.is_finite() {
            Ok(Temperature::Finite(t))
        } else {
            Err(Error::Domain("temperature must be finite and non-negative"))
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Temperature::Zero => 0.0,
            Temperature::Finite(t) => t,
        }
    }

    /// Inverse temperature, `None` at `T = 0`.
    pub fn beta(&self) -> Option<f64> {
        match *self {
            Temperature::Zero => None,
            Temperature::Finite(t) => Some(1.0 / t),
        }
    }

    /// `coth(βω/2)` for `ω > 0`. Uses the Laurent series `2/x + x/6` for
    /// `x = βω < 1e-6`.
    pub fn coth_half(&self, omega: f64) -> f64 {
        match *self {
            Temperature::Zero => 1.0,
            Temperature::Finite(t) => {
                let x = omega / t;
                if x < 1e-6 {
                    2.0 / x + x / 6.0
                } else {
                    coth(0.5 * x)
                }
            }
        }
    }

    /// Bose occupation `n(ω) = 1/(e^{βω} − 1)`.
    pub fn bose(&self, omega: f64) -> f64 {
        match *self {
            Temperature::Zero => 0.0,
            Temperature::Finite(_) => 0.5 * (self.coth_half(omega) - 1.0).max(0.0),
        }
    }

    /// `1/(1 + e^{−βω})`, saturating cleanly for large `|βω|`. At `T = 0` this
    /// is the step function with value 1/2 at `ω = 0`.
    pub fn upper_fraction(&self, omega: f64) -> f64 {
        match *self {
            Temperature::Zero => {
                if omega > 0.0 {
                    1.0
                } else if omega < 0.0 {
                    0.0
                } else {
                    0.5
                }
            }
            Temperature::Finite(t) => {
                let x = omega / t;
                if x >= 0.0 {
                    1.0 / (1.0 + exp(-x))
                } else {
                    let e = exp(x);
                    e / (1.0 + e)
                }
            }
        }
    }
}

/// Qubit (A) and fluctuator (B) parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Qubit splitting `Δ_A`.
    pub delta_a: f64,
    /// Fluctuator splitting `Δ_B`.
    pub delta_b: f64,
    /// Qubit–fluctuator coupling `g₀`.
    pub g0: f64,
    pub temperature: Temperature,
}

impl SystemParams {
    pub fn new(delta_a: f64, delta_b: f64, g0: f64, temperature: Temperature) -> Result<Self, Error> {
        let p = Self {
            delta_a,
            delta_b,
            g0,
            temperature,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.delta_a > 0.0 && self.delta_a.is_finite()) {
            return Err(Error::Domain("delta_A must be positive"));
        }
        if !(self.delta_b > 0.0 && self.delta_b.is_finite()) {
            return Err(Error::Domain("delta_B must be positive"));
        }
        if !(self.g0 >= 0.0 && self.g0.is_finite()) {
            return Err(Error::Domain("g0 must be non-negative"));
        }
        Ok(())
    }

    /// True when `g₀ > 0.3·min(Δ_A, Δ_B)`, outside the second-order regime the
    /// method assumes. Results are still computed.
    pub fn outside_perturbative_regime(&self) -> bool {
        self.g0 > 0.3 * self.delta_a.min(self.delta_b)
    }

    pub fn detuning(&self) -> f64 {
        self.delta_a - self.delta_b
    }
}
