//! Dressed fluctuator correlator.
//!
//! In the transformed frame the fluctuator couples to the bath through
//! `V_k = g_k·ηΔ_B/(ω_k + ηΔ_B)`, which enters only via the weight
//!
//! ```text
//! F(ω) = (ηΔ_B)²·J(ω)·coth(βω/2)/(ω + ηΔ_B)².
//! ```
//!
//! Damping and level shift are `γ(ω) = π·F(ω)` and `R(ω) = ℘∫F(ω')/(ω − ω')`;
//! the correlator spectral function is
//!
//! ```text
//! G(ω) = (γ(|ω|)/π) / ([|ω| − ηΔ_B − R(|ω|)]² + γ(|ω|)²),
//! ```
//!
//! split by detailed balance into `G₁ = G/(1 + e^{−βω})` and
//! `G₂ = G/(1 + e^{βω})`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::grid::{GridSpec, Refinement};
use crate::numerics::{bracketed_root, principal_value_with_breaks, QuadratureSpec};
use crate::spectral::SpectralDensity;
use crate::{Error, SystemParams, Temperature};

/// Lower end of the bracket searched for `ω_B`.
pub const OMEGA_B_FLOOR: f64 = 1e-6;

/// Quadrature settings for the level shift. Tight enough that `ω_B` can be
/// located to `|f| < 1e-10`.
pub fn shift_quadrature() -> QuadratureSpec {
    QuadratureSpec::default().with_tolerances(1e-14, 1e-11)
}

/// `F(ω) = (ηΔ_B)² J(ω) coth(βω/2)/(ω + ηΔ_B)²`, zero for `ω ≤ 0`.
pub fn tlf_weight<J: SpectralDensity + ?Sized>(omega: f64, eta: f64, params: &SystemParams, j: &J) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    let s = eta * params.delta_b;
    let d = omega + s;
    s * s / (d * d) * j.eval(omega) * params.temperature.coth_half(omega)
}

/// Damping `γ(ω) = π·F(ω)`. For `ω ≤ 0` returns the `ω → 0` limit, 0.
pub fn gamma_of<J: SpectralDensity + ?Sized>(omega: f64, eta: f64, params: &SystemParams, j: &J) -> f64 {
    PI * tlf_weight(omega, eta, params, j)
}

/// `℘∫₀^{Ω_max} f(x)/(ω − x) dx` with breakpoints.
pub fn hilbert_of<F: FnMut(f64) -> f64>(
    f: F,
    omega: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64, Error> {
    principal_value_with_breaks(f, omega, 0.0, spec.omega_max, breaks, spec)
        .map(|v| -v)
        .map_err(|e| Error::at(omega, e))
}

fn shift_breaks<J: SpectralDensity + ?Sized>(eta: f64, params: &SystemParams, j: &J) -> Vec<f64> {
    let mut b = j.breakpoints().to_vec();
    b.push(eta * params.delta_b);
    b
}

/// Level shift `R(ω) = ℘∫ F(ω')/(ω − ω') dω'`.
pub fn r_of<J: SpectralDensity + ?Sized>(
    omega: f64,
    eta: f64,
    params: &SystemParams,
    j: &J,
    spec: &QuadratureSpec,
) -> Result<f64, Error> {
    let breaks = shift_breaks(eta, params, j);
    hilbert_of(|w| tlf_weight(w, eta, params, j), omega, &breaks, spec)
}

/// `G` from `R(|ω|)` and `γ(|ω|)`.
pub fn g_of(omega: f64, r: f64, gamma: f64, eta: f64, delta_b: f64) -> f64 {
    if gamma <= 0.0 {
        return 0.0;
    }
    let d = libm::fabs(omega) - eta * delta_b - r;
    gamma / PI / (d * d + gamma * gamma)
}

/// Detailed-balance split `(G₁, G₂)`.
pub fn split_g(omega: f64, g: f64, temperature: Temperature) -> (f64, f64) {
    (g * temperature.upper_fraction(omega), g * temperature.upper_fraction(-omega))
}

/// Root of `ω − ηΔ_B − R(ω)` in `(OMEGA_B_FLOOR, Δ_B]`.
pub fn solve_omega_b<J: SpectralDensity + ?Sized>(eta: f64, params: &SystemParams, j: &J) -> Result<f64, Error> {
    let spec = shift_quadrature();
    let (lo, hi) = (OMEGA_B_FLOOR, params.delta_b);
    let err = core::cell::RefCell::new(None);
    let f = |w: f64| match r_of(w, eta, params, j, &spec) {
        Ok(r) => w - eta * params.delta_b - r,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    const SCAN: usize = 40;
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=SCAN {
        let b = lo + (hi - lo) * i as f64 / SCAN as f64;
        let fb = f(b);
        if let Some(e) = err.take() {
            return Err(e);
        }
        if fa < 0.0 && fb >= 0.0 {
            let root = bracketed_root(f, a, b, 1e-12);
            if let Some(e) = err.take() {
                return Err(e);
            }
            return root;
        }
        a = b;
        fa = fb;
    }
    Err(Error::NoSignChange { lo, hi })
}

/// Lorentzian `g₀²·(γ_B/π)/((ω − ω_B)² + γ_B²)`.
pub fn lorentzian_jprime(omega: f64, g0: f64, omega_b: f64, gamma_b: f64) -> f64 {
    let d = omega - omega_b;
    g0 * g0 * gamma_b / PI / (d * d + gamma_b * gamma_b)
}

/// Grid layout for [`TlfGreenTable::build`].
#[derive(Debug, Clone, PartialEq)]
pub struct GreenOptions {
    pub coarse_points: usize,
    pub growth: f64,
    /// Dense patch around `ω_B` spans this many `γ(ω_B)` on each side.
    pub omega_b_widths: f64,
    pub omega_b_points_per_width: f64,
    /// Dense patch around `Δ_A` spans this many `g₀` on each side.
    pub delta_a_widths: f64,
    pub delta_a_points_per_width: f64,
    /// Multiplies every density above.
    pub density: usize,
    pub quadrature: QuadratureSpec,
}

impl Default for GreenOptions {
    fn default() -> Self {
        Self {
            coarse_points: 401,
            growth: 1.02,
            omega_b_widths: 10.0,
            omega_b_points_per_width: 20.0,
            delta_a_widths: 3.0,
            delta_a_points_per_width: 20.0,
            density: 1,
            quadrature: shift_quadrature(),
        }
    }
}

impl GreenOptions {
    /// The positive-frequency grid for the given features.
    pub fn grid_spec(&self, params: &SystemParams, omega_b: f64, gamma_b: f64) -> GridSpec {
        let omega_max = self.quadrature.omega_max;
        let mut spec = GridSpec::new(0.0, omega_max, self.coarse_points);
        spec.growth = self.growth;
        if gamma_b > 0.0 {
            spec = spec.refine(Refinement::around(
                omega_b,
                gamma_b,
                self.omega_b_widths,
                self.omega_b_points_per_width,
            ));
        }
        if params.g0 > 0.0 {
            spec = spec.refine(Refinement::around(
                params.delta_a,
                params.g0,
                self.delta_a_widths,
                self.delta_a_points_per_width,
            ));
        }
        spec.densified(self.density)
    }
}

/// `R`, `γ`, `G`, `G₁`, `G₂` tabulated on a grid symmetric about zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TlfGreenTable {
    pub omega_grid: Vec<f64>,
    pub r_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub g_values: Vec<f64>,
    pub g1_values: Vec<f64>,
    pub g2_values: Vec<f64>,
    pub omega_b: f64,
    pub gamma_at_omega_b: f64,
    /// `γ₀ = π(ηΔ_B)²J(ω_B)/(ω_B + ηΔ_B)²`, the zero-temperature damping at
    /// `ω_B`.
    pub gamma0: f64,
    pub eta: f64,
    pub params: SystemParams,
    zero_index: usize,
}

impl TlfGreenTable {
    pub fn build<J: SpectralDensity + ?Sized>(
        j: &J,
        params: &SystemParams,
        eta: f64,
        opts: &GreenOptions,
    ) -> Result<Self, Error> {
        params.validate()?;
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::Domain("eta must lie in (0, 1]"));
        }
        let omega_b = solve_omega_b(eta, params, j)?;
        let gamma_b = gamma_of(omega_b, eta, params, j);
        let positive = opts.grid_spec(params, omega_b, gamma_b).build()?;

        let breaks = shift_breaks(eta, params, j);
        let mut r_pos = Vec::with_capacity(positive.len());
        let mut gamma_pos = Vec::with_capacity(positive.len());
        for &w in &positive {
            gamma_pos.push(gamma_of(w, eta, params, j));
            r_pos.push(hilbert_of(|x| tlf_weight(x, eta, params, j), w, &breaks, &opts.quadrature)?);
        }

        let n = positive.len();
        let mirror = |v: &[f64], sign: f64| -> Vec<f64> {
            v[1..].iter().rev().map(|&x| sign * x).chain(v.iter().copied()).collect()
        };
        let omega_grid = mirror(&positive, -1.0);
        let r_values = mirror(&r_pos, 1.0);
        let gamma_values = mirror(&gamma_pos, 1.0);
        let g_values: Vec<f64> = omega_grid
            .iter()
            .zip(r_values.iter().zip(&gamma_values))
            .map(|(&w, (&r, &g))| g_of(w, r, g, eta, params.delta_b))
            .collect();
        let (g1_values, g2_values) = omega_grid
            .iter()
            .zip(&g_values)
            .map(|(&w, &g)| split_g(w, g, params.temperature))
            .unzip();

        let s = eta * params.delta_b;
        let gamma0 = PI * s * s * j.eval(omega_b) / ((omega_b + s) * (omega_b + s));
        Ok(Self {
            omega_grid,
            r_values,
            gamma_values,
            g_values,
            g1_values,
            g2_values,
            omega_b,
            gamma_at_omega_b: gamma_b,
            gamma0,
            eta,
            params: *params,
            zero_index: n - 1,
        })
    }

    pub fn len(&self) -> usize {
        self.omega_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega_grid.is_empty()
    }

    /// Nodes with `ω ≥ 0`, starting at 0.
    pub fn positive_grid(&self) -> &[f64] {
        &self.omega_grid[self.zero_index..]
    }

    pub fn positive_g(&self) -> &[f64] {
        &self.g_values[self.zero_index..]
    }

    /// Trapezoid estimate of `∫ G dω` over the whole grid.
    pub fn sum_rule(&self) -> f64 {
        self.omega_grid
            .windows(2)
            .zip(self.g_values.windows(2))
            .map(|(w, g)| 0.5 * (w[1] - w[0]) * (g[0] + g[1]))
            .sum()
    }

    /// Node of the maximum of `G` on `ω > 0`.
    pub fn peak_omega(&self) -> f64 {
        let (i, _) = self
            .positive_g()
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &g)| if g > acc.1 { (i, g) } else { acc });
        self.positive_grid()[i]
    }

    /// `γ(Δ_A) = γ₀·coth(βΔ_A/2)` as used by the Markov estimate.
    pub fn gamma_at_delta_a_markov(&self) -> f64 {
        self.gamma0 * self.params.temperature.coth_half(self.params.delta_a)
    }

    /// Largest relative violation of `G₁ + G₂ = G` and of
    /// `G₁ = e^{βω}G₂` over the grid, as `(additivity, detailed_balance)`.
    /// Detailed balance is skipped at `T = 0` and where `e^{βω}` overflows.
    pub fn split_residuals(&self) -> (f64, f64) {
        let mut add = 0.0f64;
        let mut bal = 0.0f64;
        for i in 0..self.len() {
            let (g, g1, g2) = (self.g_values[i], self.g1_values[i], self.g2_values[i]);
            if g > 0.0 {
                add = add.max(libm::fabs(g1 + g2 - g) / g);
            }
            if let Some(beta) = self.params.temperature.beta() {
                let x = beta * self.omega_grid[i];
                if g1 > 0.0 && libm::fabs(x) < 700.0 {
                    bal = bal.max(libm::fabs(g1 - libm::exp(x) * g2) / g1);
                }
            }
        }
        (add, bal)
    }
}
