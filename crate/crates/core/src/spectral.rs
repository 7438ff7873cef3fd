//! Bath spectral densities.

use crate::fmath::{atan, exp, ln, sin};
use crate::numerics::{integrate_with_breaks, QuadratureSpec};
use crate::Error;

/// A bath spectral density `ω ↦ J(ω)` on `ω ≥ 0`.
pub trait SpectralDensity {
    /// `J(ω)`. Callers guarantee `ω ≥ 0`; use [`SpectralDensity::try_eval`]
    /// for checked evaluation.
    fn eval(&self, omega: f64) -> f64;

    fn name(&self) -> &'static str;

    /// Frequencies where the density changes character; quadratures split
    /// there.
    fn breakpoints(&self) -> &[f64] {
        &[]
    }

    fn try_eval(&self, omega: f64) -> Result<f64, Error> {
        if omega < 0.0 || omega.is_nan() {
            return Err(Error::Domain("spectral density evaluated at negative frequency"));
        }
        Ok(self.eval(omega))
    }
}

impl<T: SpectralDensity + ?Sized> SpectralDensity for &T {
    fn eval(&self, omega: f64) -> f64 {
        (**self).eval(omega)
    }
    fn name(&self) -> &'static str {
        (**self).name()
    }
    fn breakpoints(&self) -> &[f64] {
        (**self).breakpoints()
    }
}

/// Parameters of the piezoelectric density
/// `J(ω) = α·ω·(1 − (ω_d/ω)·sin(ω/ω_d))·exp(−ω²/2ω_l²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDensityParams {
    pub alpha_pz: f64,
    pub omega_d: f64,
    /// Fixed to 1: all energies are measured in units of `ω_l`.
    pub omega_l: f64,
}

impl SpectralDensityParams {
    pub fn new(alpha_pz: f64, omega_d: f64) -> Result<Self, Error> {
        let p = Self {
            alpha_pz,
            omega_d,
            omega_l: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.alpha_pz >= 0.0 && self.alpha_pz.is_finite()) {
            return Err(Error::Domain("alpha_pz must be non-negative"));
        }
        if !(self.omega_d > 0.0 && self.omega_d.is_finite()) {
            return Err(Error::Domain("omega_d must be positive"));
        }
        if self.omega_l != 1.0 {
            return Err(Error::Domain("omega_l is the energy unit and must equal 1"));
        }
        Ok(())
    }
}

/// Below this value of `ω/ω_d` the cubic series replaces the direct formula.
pub const SERIES_SWITCH: f64 = 1e-3;

/// `1 − sin(x)/x`, summing the Taylor series for small `x` where the direct
/// difference cancels.
fn one_minus_sinc(x: f64) -> f64 {
    if x < 0.5 {
        let x2 = x * x;
        // Σ_{n≥1} (−1)^{n+1} x^{2n}/(2n+1)!
        let mut term = x2 / 6.0;
        let mut sum = term;
        let mut n = 1.0;
        while term.abs() > 1e-18 * sum {
            term *= -x2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
            sum += term;
            n += 1.0;
        }
        sum
    } else {
        1.0 - sin(x) / x
    }
}

/// Piezoelectric (GaAs double-dot) spectral density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piezoelectric {
    params: SpectralDensityParams,
    breaks: [f64; 4],
}

impl Piezoelectric {
    pub fn new(params: SpectralDensityParams) -> Result<Self, Error> {
        params.validate()?;
        let wd = params.omega_d;
        Ok(Self {
            params,
            breaks: [wd, 4.0 * wd, 1.0, 4.0],
        })
    }

    pub fn params(&self) -> &SpectralDensityParams {
        &self.params
    }
}

impl SpectralDensity for Piezoelectric {
    fn eval(&self, omega: f64) -> f64 {
        let SpectralDensityParams {
            alpha_pz,
            omega_d,
            omega_l,
        } = self.params;
        if alpha_pz == 0.0 || omega <= 0.0 {
            return 0.0;
        }
        let cutoff = exp(-omega * omega / (2.0 * omega_l * omega_l));
        let x = omega / omega_d;
        if x < SERIES_SWITCH {
            // cubic law with its first correction: 1 − sin(x)/x = x²/6 − x⁴/120 + …
            alpha_pz * omega * (x * x / 6.0) * (1.0 - x * x / 20.0) * cutoff
        } else {
            alpha_pz * omega * one_minus_sinc(x) * cutoff
        }
    }

    fn name(&self) -> &'static str {
        "piezoelectric"
    }

    fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }
}

/// Single Lorentzian `J(ω) = A·(w/π)/((ω − c)² + w²)`, shipped for testing the
/// principal-value machinery: its Hilbert transform over any finite interval
/// is known in closed form. It does not vanish at `ω = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianDensity {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl LorentzianDensity {
    pub fn new(amplitude: f64, center: f64, width: f64) -> Result<Self, Error> {
        if !(amplitude >= 0.0 && width > 0.0 && center.is_finite()) {
            return Err(Error::Domain("Lorentzian needs amplitude ≥ 0 and width > 0"));
        }
        Ok(Self {
            amplitude,
            center,
            width,
        })
    }

    /// Exact `∫_a^b J(x) dx`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let w = self.width;
        self.amplitude / core::f64::consts::PI
            * (atan((b - self.center) / w) - atan((a - self.center) / w))
    }

    /// Exact principal value `℘∫_a^b J(x)/(ω − x) dx`.
    ///
    /// At `ω = a` or `ω = b` the endpoint logarithm `ln|ω − x|` is taken as
    /// zero, the same convention as [`crate::numerics::linear_hilbert`], so
    /// that sums of the two stay finite when the total density vanishes there.
    pub fn hilbert(&self, omega: f64, a: f64, b: f64) -> f64 {
        let w = self.width;
        let d = omega - self.center;
        // 1/((u² + w²)(d − u)) = [(u + d)/(u² + w²) + 1/(d − u)] / (d² + w²)
        let antiderivative = |x: f64| {
            let u = x - self.center;
            let gap = (d - u).abs();
            let log_gap = if gap == 0.0 { 0.0 } else { ln(gap) };
            0.5 * ln(u * u + w * w) + (d / w) * atan(u / w) - log_gap
        };
        self.amplitude * w / core::f64::consts::PI / (d * d + w * w)
            * (antiderivative(b) - antiderivative(a))
    }
}

impl SpectralDensity for LorentzianDensity {
    fn eval(&self, omega: f64) -> f64 {
        let d = omega - self.center;
        self.amplitude * self.width / core::f64::consts::PI / (d * d + self.width * self.width)
    }

    fn name(&self) -> &'static str {
        "lorentzian"
    }
}

/// `∫₀^{Ω_max} J(ω) dω` by adaptive quadrature, with `Ω_max` taken from
/// `spec.omega_max`.
pub fn total_weight<J: SpectralDensity + ?Sized>(j: &J, spec: &QuadratureSpec) -> Result<f64, Error> {
    Ok(integrate_with_breaks(|w| j.eval(w), 0.0, spec.omega_max, j.breakpoints(), spec)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> Piezoelectric {
        Piezoelectric::new(SpectralDensityParams::new(0.3, 0.05).unwrap()).unwrap()
    }

    #[test]
    fn vanishes_at_origin_and_in_the_tail() {
        let j = reference();
        assert_eq!(j.eval(0.0), 0.0);
        assert!(j.eval(10.0) < 1e-21);
    }

    #[test]
    fn regression_value_at_point_one() {
        // 0.3·0.1·(1 − sin(2)/2)·exp(−0.005) in 40-digit arithmetic
        let v = reference().eval(0.1);
        assert!((v / 0.016_278_940_070_940_247 - 1.0).abs() < 1e-14, "{v:.17e}");
    }

    #[test]
    fn negative_frequency_is_a_domain_error() {
        assert!(matches!(reference().try_eval(-1e-3), Err(Error::Domain(_))));
    }

    #[test]
    fn small_frequency_cubic_law() {
        let j = reference();
        let limit = 0.3 / (6.0 * 0.05 * 0.05);
        for &w in &[1e-3, 1e-4] {
            assert!((j.eval(w) / (w * w * w) / limit - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn continuous_across_series_switch() {
        let j = reference();
        let x = SERIES_SWITCH * 0.05;
        let lo = j.eval(x * (1.0 - 1e-12));
        let hi = j.eval(x * (1.0 + 1e-12));
        assert!(((lo - hi) / hi).abs() < 1e-10);
    }

    #[test]
    fn zero_coupling_has_zero_weight() {
        let j = Piezoelectric::new(SpectralDensityParams::new(0.0, 0.05).unwrap()).unwrap();
        assert_eq!(total_weight(&j, &QuadratureSpec::default()).unwrap(), 0.0);
    }

    #[test]
    fn lorentzian_weight_matches_closed_form() {
        let l = LorentzianDensity::new(1.3, 0.4, 0.05).unwrap();
        let spec = QuadratureSpec::default().with_tolerances(1e-14, 1e-12);
        let got = total_weight(&l, &spec).unwrap();
        assert!((got - l.integral(0.0, 10.0)).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(SpectralDensityParams::new(-0.1, 0.05).is_err());
        assert!(SpectralDensityParams::new(0.1, 0.0).is_err());
        let mut p = SpectralDensityParams::new(0.1, 0.05).unwrap();
        p.omega_l = 2.0;
        assert!(Piezoelectric::new(p).is_err());
    }

    #[test]
    fn reference_density_total_weight_is_stable_under_tightening() {
        let j = reference();
        let a = total_weight(&j, &QuadratureSpec::default()).unwrap();
        let b = total_weight(&j, &QuadratureSpec::default().with_tolerances(1e-16, 1e-13)).unwrap();
        assert!(((a - b) / b).abs() < 1e-8);
        // 40-digit quadrature of the same integral
        assert!((a / 0.299_248_110_758_571_4 - 1.0).abs() < 1e-8, "{a:.17e}");
    }
}
