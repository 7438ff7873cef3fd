//! Qubit self-energies, population difference `P(t)` and its spectrum.
//!
//! The fluctuator correlator acts on the qubit as the structured density
//! `J′(ω) = g₀²·G(ω)·θ(ω)`, with `Γ = πJ′` and `Σ(ω) = ℘∫J′(ω')/(ω − ω')`.
//! The full propagator uses `Σ_F(ω) = Σ(ω) − Σ(−ω)` and
//! `Γ_F(ω) = Γ(ω) + Γ(−ω)`.
//!
//! Inverting the Laplace transform of `⟨σ_z^A⟩` along the real axis gives
//! `P(t) = ∫₀^∞ A(ω) cos(ωt) dω` with
//!
//! ```text
//! A_full(ω) = (4Δ_A²/π)·Γ_F / [(ω² − 2ωΣ_F − Δ_A²)² + 4ω²Γ_F²]
//! A_rwa(ω)  = (1/π)·Γ / [(ω − Δ_A − Σ)² + Γ²]
//! ```
//!
//! Both integrate to one. `A` is sampled adaptively between table nodes, with
//! `Σ_F`, `Γ_F` interpolated linearly and the rational kernel evaluated
//! exactly, and `P(t)` is the exact cosine integral of the sampled profile.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::fmath::{abs, cos, sqrt};
use crate::grid::interp_linear;
use crate::numerics::{cosine_transform, linear_cosine_sweep, linear_hilbert, Window};
use crate::spectral::{LorentzianDensity, SpectralDensity};
use crate::tlfgreen::TlfGreenTable;
use crate::Error;

/// Which propagator produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Full,
    Rwa,
    PoleApprox,
    Oracle,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Full => "full",
            Method::Rwa => "rwa",
            Method::PoleApprox => "pole-approx",
            Method::Oracle => "oracle",
        }
    }
}

/// Qubit self-energies on the fluctuator table's grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfEnergyTable {
    /// Symmetric grid shared with the fluctuator table.
    pub omega_grid: Vec<f64>,
    pub jprime_values: Vec<f64>,
    pub sigma_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub sigma_f_values: Vec<f64>,
    pub gamma_f_values: Vec<f64>,
    pub g0: f64,
    zero_index: usize,
    peak: Option<LorentzianDensity>,
    remainder: Vec<f64>,
    omega_max: f64,
}

/// `Σ`, `Γ`, `Σ_F`, `Γ_F` from `J′ = g₀²Gθ(ω)`.
///
/// `J′` is split into the Lorentzian that matches its peak at `ω_B` plus a
/// remainder. The Lorentzian part of `Σ` is transformed in closed form and the
/// remainder, which is smooth on the scale of `γ(ω_B)`, by the exact
/// transform of its piecewise-linear interpolant.
pub fn build_self_energy(g0: f64, green: &TlfGreenTable) -> Result<SelfEnergyTable, Error> {
    if !(g0 >= 0.0 && g0.is_finite()) {
        return Err(Error::Domain("g0 must be non-negative"));
    }
    let n = green.len();
    let zero_index = n - green.positive_grid().len();
    let pos = green.positive_grid();
    let jp_pos: Vec<f64> = green.positive_g().iter().map(|&g| g0 * g0 * g).collect();
    if g0 > 0.0 && (jp_pos.iter().all(|&v| v == 0.0) || !(green.gamma_at_omega_b > 0.0)) {
        return Err(Error::Degenerate(
            "fluctuator correlator vanishes on the grid (undamped fluctuator); the qubit density is a delta function",
        ));
    }
    let peak = if g0 > 0.0 {
        Some(LorentzianDensity::new(g0 * g0, green.omega_b, green.gamma_at_omega_b)?)
    } else {
        None
    };
    let remainder: Vec<f64> = match &peak {
        Some(l) => pos.iter().zip(&jp_pos).map(|(&w, &j)| j - l.eval(w)).collect(),
        None => alloc::vec![0.0; pos.len()],
    };
    let mut jprime_values = alloc::vec![0.0; n];
    jprime_values[zero_index..].copy_from_slice(&jp_pos);
    let mut table = SelfEnergyTable {
        omega_grid: green.omega_grid.clone(),
        jprime_values,
        sigma_values: Vec::new(),
        gamma_values: Vec::new(),
        sigma_f_values: alloc::vec![0.0; n],
        gamma_f_values: alloc::vec![0.0; n],
        g0,
        zero_index,
        peak,
        remainder,
        omega_max: pos[pos.len() - 1],
    };
    table.sigma_values = table.omega_grid.iter().map(|&w| table.sigma_at(w)).collect();
    table.gamma_values = table.jprime_values.iter().map(|&j| PI * j).collect();
    for i in 0..n {
        let m = n - 1 - i;
        table.sigma_f_values[i] = table.sigma_values[i] - table.sigma_values[m];
        table.gamma_f_values[i] = table.gamma_values[i] + table.gamma_values[m];
    }
    Ok(table)
}

impl SelfEnergyTable {
    pub fn positive_grid(&self) -> &[f64] {
        &self.omega_grid[self.zero_index..]
    }

    fn positive(&self, v: &[f64]) -> Vec<f64> {
        v[self.zero_index..].to_vec()
    }

    pub fn positive_jprime(&self) -> &[f64] {
        &self.jprime_values[self.zero_index..]
    }

    /// `Σ(ω)` at any `ω`.
    pub fn sigma_at(&self, omega: f64) -> f64 {
        match &self.peak {
            None => 0.0,
            Some(l) => {
                l.hilbert(omega, 0.0, self.omega_max) + linear_hilbert(self.positive_grid(), &self.remainder, omega)
            }
        }
    }

    /// `Γ(ω) = πJ′(ω)`, interpolated, zero for `ω ≤ 0`.
    pub fn gamma_at(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        PI * interp_linear(self.positive_grid(), self.positive_jprime(), omega)
    }

    /// Largest violation of `Σ_F(−ω) = −Σ_F(ω)` and `Γ_F(−ω) = Γ_F(ω)`.
    pub fn symmetry_residuals(&self) -> (f64, f64) {
        let n = self.omega_grid.len();
        let mut odd = 0.0f64;
        let mut even = 0.0f64;
        for i in 0..n {
            let m = n - 1 - i;
            odd = odd.max(abs(self.sigma_f_values[i] + self.sigma_f_values[m]));
            even = even.max(abs(self.gamma_f_values[i] - self.gamma_f_values[m]));
        }
        (odd, even)
    }
}

/// Adaptive sampling of `A(ω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingOptions {
    /// Relative midpoint deviation from linearity that triggers a split.
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            rel_tol: 2e-4,
            abs_tol: 1e-7,
            max_depth: 60,
        }
    }
}

/// `A(ω)` sampled on `[0, Ω_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitSpectrum {
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
    pub method: Method,
}

impl QubitSpectrum {
    /// `∫A dω` of the sampled profile.
    pub fn weight(&self) -> f64 {
        trapezoid(&self.omega, &self.values)
    }

    /// Location and height of the global maximum.
    pub fn peak(&self) -> (f64, f64) {
        let i = argmax(&self.values);
        (self.omega[i], self.values[i])
    }

    /// Half-width at half maximum of the dominant peak.
    pub fn hwhm(&self) -> f64 {
        half_width(&self.omega, &self.values, argmax(&self.values))
    }

    /// `P(t)` on `t = n·dt`, `n = 0..count`.
    pub fn population(&self, dt: f64, count: usize) -> Vec<f64> {
        linear_cosine_sweep(&self.omega, &self.values, dt, count)
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(w, v)| 0.5 * (w[1] - w[0]) * (v[0] + v[1]))
        .sum()
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc })
        .0
}

/// Kernel of the real-frequency inversion for interpolated `(σ, γ)`.
fn kernel(method: Method, omega: f64, sigma: f64, gamma: f64, delta_a: f64) -> f64 {
    match method {
        Method::Rwa => {
            let d = omega - delta_a - sigma;
            gamma / PI / (d * d + gamma * gamma)
        }
        _ => {
            let re = omega * omega - 2.0 * omega * sigma - delta_a * delta_a;
            let im = 2.0 * omega * gamma;
            4.0 * delta_a * delta_a / PI * gamma / (re * re + im * im)
        }
    }
}

/// Samples `A(ω)` for the full or rotating-wave propagator.
pub fn qubit_spectrum(
    se: &SelfEnergyTable,
    delta_a: f64,
    method: Method,
    opts: &SamplingOptions,
) -> Result<QubitSpectrum, Error> {
    if !matches!(method, Method::Full | Method::Rwa) {
        return Err(Error::Domain("qubit spectrum needs the full or rotating-wave method"));
    }
    if se.g0 == 0.0 {
        return Err(Error::Degenerate("g0 = 0: the qubit spectrum is a delta function at Δ_A"));
    }
    let x = se.positive_grid();
    let (sig, gam) = match method {
        Method::Rwa => (se.positive(&se.sigma_values), se.positive(&se.gamma_values)),
        _ => (se.positive(&se.sigma_f_values), se.positive(&se.gamma_f_values)),
    };
    let mut omega = Vec::with_capacity(4 * x.len());
    let mut values = Vec::with_capacity(4 * x.len());
    omega.push(x[0]);
    values.push(kernel(method, x[0], sig[0], gam[0], delta_a));
    let mut seeds: Vec<f64> = Vec::new();
    for i in 0..x.len() - 1 {
        let (x0, x1) = (x[i], x[i + 1]);
        let h = x1 - x0;
        if h <= 0.0 {
            continue;
        }
        let b_s = (sig[i + 1] - sig[i]) / h;
        let a_s = sig[i] - b_s * x0;
        let b_g = (gam[i + 1] - gam[i]) / h;
        let a_g = gam[i] - b_g * x0;
        let eval = |w: f64| kernel(method, w, a_s + b_s * w, a_g + b_g * w, delta_a);

        // Zeros of the real part of the denominator carry the narrow peaks;
        // seed them with a graded cluster so bisection cannot step over them.
        seeds.clear();
        let roots: [Option<f64>; 2] = match method {
            Method::Rwa => {
                let den = 1.0 - b_s;
                [if den != 0.0 { Some((delta_a + a_s) / den) } else { None }, None]
            }
            _ => quadratic_roots(1.0 - 2.0 * b_s, -2.0 * a_s, -delta_a * delta_a),
        };
        for r in roots.into_iter().flatten() {
            if !(r > x0 && r < x1) {
                continue;
            }
            let g = a_g + b_g * r;
            let slope = match method {
                Method::Rwa => 1.0 - b_s,
                _ => 2.0 * (1.0 - 2.0 * b_s) * r - 2.0 * a_s,
            };
            let im = match method {
                Method::Rwa => g,
                _ => 2.0 * r * g,
            };
            let width = abs(im / slope);
            seeds.push(r);
            if width > 0.0 && width.is_finite() {
                let mut d = 0.125 * width;
                while d < h {
                    for s in [r - d, r + d] {
                        if s > x0 && s < x1 {
                            seeds.push(s);
                        }
                    }
                    d *= 1.5;
                }
            }
        }
        seeds.push(x1);
        seeds.sort_by(f64::total_cmp);

        let mut left = x0;
        let mut a_left = *values.last().unwrap();
        for &s in seeds.iter() {
            if s <= left {
                continue;
            }
            let a_right = eval(s);
            refine(&eval, left, a_left, s, a_right, opts, 0, &mut omega, &mut values);
            left = s;
            a_left = a_right;
        }
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("qubit spectral function"));
    }
    Ok(QubitSpectrum { omega, values, method })
}

/// Real roots of `a·x² + b·x + c`.
fn quadratic_roots(a: f64, b: f64, c: f64) -> [Option<f64>; 2] {
    if a == 0.0 {
        return [if b != 0.0 { Some(-c / b) } else { None }, None];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return [None, None];
    }
    let q = -0.5 * (b + b.signum() * sqrt(disc));
    let r1 = q / a;
    let r2 = if q != 0.0 { c / q } else { r1 };
    [Some(r1), Some(r2)]
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    eval: &F,
    l: f64,
    al: f64,
    r: f64,
    ar: f64,
    opts: &SamplingOptions,
    depth: u32,
    omega: &mut Vec<f64>,
    values: &mut Vec<f64>,
) {
    let m = 0.5 * (l + r);
    if depth < opts.max_depth && m > l && m < r {
        let am = eval(m);
        let dev = abs(am - 0.5 * (al + ar));
        let scale = am.max(al).max(ar);
        if dev > opts.rel_tol * scale + opts.abs_tol {
            refine(eval, l, al, m, am, opts, depth + 1, omega, values);
            refine(eval, m, am, r, ar, opts, depth + 1, omega, values);
            return;
        }
    }
    omega.push(r);
    values.push(ar);
}

/// Time grid and record length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeOptions {
    pub samples: usize,
    /// Fixed record length; when `None` it is `decay_widths/hwhm` capped at
    /// `tmax_cap`.
    pub tmax: Option<f64>,
    pub tmax_cap: f64,
    pub decay_widths: f64,
}

impl Default for TimeOptions {
    fn default() -> Self {
        Self {
            samples: 4096,
            tmax: None,
            tmax_cap: 5e4,
            decay_widths: 12.0,
        }
    }
}

impl TimeOptions {
    /// Record length for a spectrum of half-width `hwhm`.
    pub fn horizon(&self, hwhm: f64) -> f64 {
        match self.tmax {
            Some(t) => t,
            None if hwhm > 0.0 => (self.decay_widths / hwhm).min(self.tmax_cap),
            None => self.tmax_cap,
        }
    }

    /// Samples on `[0, tmax]`, raised if needed so that frequencies up to
    /// `omega_top` stay below the Nyquist limit with a 1.5 margin.
    pub fn sample_count(&self, tmax: f64, omega_top: f64) -> usize {
        let nyquist = libm::ceil(1.5 * tmax * omega_top / PI) as usize + 1;
        self.samples.max(nyquist).max(2)
    }
}

/// Uniform grid `t = n·tmax/(count − 1)`.
pub fn time_grid(tmax: f64, count: usize) -> Vec<f64> {
    let dt = tmax / (count - 1) as f64;
    (0..count).map(|n| n as f64 * dt).collect()
}

/// `P(t)` on a uniform grid, tagged with its method.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub method: Method,
    /// `∫A dω` of the spectral function behind the trace (1 in exact
    /// arithmetic); `None` when the trace was not built from one.
    pub weight: Option<f64>,
}

impl PopulationTrace {
    pub fn tmax(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(abs(*v)))
    }
}

fn free_qubit(delta_a: f64, times: &[f64], method: Method) -> PopulationTrace {
    PopulationTrace {
        times: times.to_vec(),
        values: times.iter().map(|&t| cos(delta_a * t)).collect(),
        method,
        weight: Some(1.0),
    }
}

fn check_times(times: &[f64]) -> Result<f64, Error> {
    if times.len() < 2 {
        return Err(Error::Domain("need at least two time samples"));
    }
    if times[0] != 0.0 {
        return Err(Error::Domain("time grid must start at t = 0"));
    }
    let n = times.len();
    let dt = times[n - 1] / (n - 1) as f64;
    for (i, &t) in times.iter().enumerate() {
        if abs(t - dt * i as f64) > 1e-9 * (t + dt) {
            return Err(Error::NonUniformGrid { index: i });
        }
    }
    Ok(dt)
}

fn population(
    se: &SelfEnergyTable,
    delta_a: f64,
    times: &[f64],
    method: Method,
    opts: &SamplingOptions,
) -> Result<(PopulationTrace, Option<QubitSpectrum>), Error> {
    let dt = check_times(times)?;
    if se.g0 == 0.0 {
        return Ok((free_qubit(delta_a, times, method), None));
    }
    let spec = qubit_spectrum(se, delta_a, method, opts)?;
    let values = spec.population(dt, times.len());
    Ok((
        PopulationTrace {
            times: times.to_vec(),
            values,
            method,
            weight: Some(spec.weight()),
        },
        Some(spec),
    ))
}

/// `P(t)` from the full propagator.
pub fn population_full(se: &SelfEnergyTable, delta_a: f64, times: &[f64]) -> Result<PopulationTrace, Error> {
    Ok(population(se, delta_a, times, Method::Full, &SamplingOptions::default())?.0)
}

/// `P(t)` from the rotating-wave propagator.
pub fn population_rwa(se: &SelfEnergyTable, delta_a: f64, times: &[f64]) -> Result<PopulationTrace, Error> {
    Ok(population(se, delta_a, times, Method::Rwa, &SamplingOptions::default())?.0)
}

/// Like [`population_full`]/[`population_rwa`] but also returns the sampled
/// spectral function.
pub fn population_with_spectrum(
    se: &SelfEnergyTable,
    delta_a: f64,
    times: &[f64],
    method: Method,
    opts: &SamplingOptions,
) -> Result<(PopulationTrace, Option<QubitSpectrum>), Error> {
    population(se, delta_a, times, method, opts)
}

/// Frequency window and window function for [`spectrum_of`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub window: Window,
    /// Reject records whose last sample exceeds 0.05 in magnitude.
    pub require_decay: bool,
}

impl SpectrumOptions {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            points: 4001,
            window: Window::CosineTaper { fraction: 0.1 },
            require_decay: true,
        }
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.points - 1) as f64
    }
}

/// Normalized spectrum of a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
    pub hwhm: f64,
    /// Location of the dominant peak (vertex of the parabola through the
    /// three highest nodes).
    pub peak: f64,
    /// `∫S dω` over the window before clipping and renormalization.
    pub raw_weight: f64,
}

impl Spectrum {
    pub fn weight(&self) -> f64 {
        trapezoid(&self.omega, &self.values)
    }

    pub fn step(&self) -> f64 {
        if self.omega.len() < 2 {
            0.0
        } else {
            self.omega[1] - self.omega[0]
        }
    }

    /// Local maxima above `min_fraction` of the global maximum, highest
    /// first, as `(position, height)` with parabolic vertex refinement.
    pub fn peaks(&self, min_fraction: f64) -> Vec<(f64, f64)> {
        local_peaks(&self.omega, &self.values, min_fraction)
    }
}

/// Local maxima of sampled data above `min_fraction` of the global maximum,
/// highest first.
pub fn local_peaks(x: &[f64], y: &[f64], min_fraction: f64) -> Vec<(f64, f64)> {
    let n = y.len();
    if n < 3 {
        return Vec::new();
    }
    let top = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<(f64, f64)> = (1..n - 1)
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] >= min_fraction * top)
        .map(|i| (vertex(x, y, i), y[i]))
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    out
}

fn vertex(x: &[f64], y: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= x.len() {
        return x[i];
    }
    let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    let d1 = (y1 - y0) / (x1 - x0);
    let d2 = (y2 - y1) / (x2 - x1);
    let curv = (d2 - d1) / (x2 - x0);
    if curv >= 0.0 {
        return x1;
    }
    // q(x) = y1 + slope·(x − x1) + curv·(x − x1)²
    let slope = d1 + curv * (x1 - x0);
    let v = x1 - slope / (2.0 * curv);
    v.clamp(x0, x2)
}

/// Half-width at half maximum around the peak at index `p`; each crossing is
/// located on the parabola through the three nodes nearest to it.
pub fn half_width(x: &[f64], y: &[f64], p: usize) -> f64 {
    let n = y.len();
    let half = 0.5 * y[p];
    let crossing = |i: usize, j: usize| -> f64 {
        // half-max crossing between neighbours i and j
        let k = if i.max(j) + 1 < n { i.max(j) + 1 } else { i.min(j).saturating_sub(1) };
        let mut idx = [i, j, k];
        idx.sort_unstable();
        let (xa, xb) = (x[i].min(x[j]), x[i].max(x[j]));
        let pts = idx.map(|m| (x[m], y[m] - half));
        if let Some(r) = parabola_root(pts, xa, xb) {
            return r;
        }
        let (yi, yj) = (y[i] - half, y[j] - half);
        x[i] + (x[j] - x[i]) * yi / (yi - yj)
    };
    let right = (p + 1..n).find(|&i| y[i] <= half).map(|i| crossing(i - 1, i));
    let left = (0..p).rev().find(|&i| y[i] <= half).map(|i| crossing(i + 1, i));
    match (left, right) {
        (Some(l), Some(r)) => 0.5 * (r - l),
        (Some(l), None) => x[p] - l,
        (None, Some(r)) => r - x[p],
        (None, None) => f64::NAN,
    }
}

fn parabola_root(pts: [(f64, f64); 3], lo: f64, hi: f64) -> Option<f64> {
    let [(x0, y0), (x1, y1), (x2, y2)] = pts;
    if x0 == x1 || x1 == x2 {
        return None;
    }
    // Newton form around x1.
    let d1 = (y1 - y0) / (x1 - x0);
    let d2 = (y2 - y1) / (x2 - x1);
    let c = (d2 - d1) / (x2 - x0);
    let b = d1 + c * (x1 - x0);
    let a = y1;
    for r in quadratic_roots(c, b, a).into_iter().flatten() {
        let x = x1 + r;
        if x >= lo && x <= hi {
            return Some(x);
        }
    }
    None
}

/// One-sided cosine transform of a trace, clipped at zero and normalized to
/// unit integral over the window.
pub fn spectrum_of(trace: &PopulationTrace, opts: &SpectrumOptions) -> Result<Spectrum, Error> {
    if !(opts.hi > opts.lo && opts.points >= 3) {
        return Err(Error::Domain("spectrum window needs lo < hi and at least 3 points"));
    }
    if opts.require_decay {
        let tail = abs(*trace.values.last().unwrap_or(&0.0));
        if tail > 0.05 {
            return Err(Error::TraceTooShort { tail });
        }
    }
    let step = opts.step();
    let omega: Vec<f64> = (0..opts.points).map(|i| opts.lo + step * i as f64).collect();
    let raw = cosine_transform(&trace.times, &trace.values, opts.window, &omega)?;
    let raw_weight = trapezoid(&omega, &raw);
    let mut values: Vec<f64> = raw.iter().map(|&s| s.max(0.0)).collect();
    let w = trapezoid(&omega, &values);
    if !(w > 0.0) {
        return Err(Error::Degenerate("spectrum vanishes on the window"));
    }
    for v in values.iter_mut() {
        *v /= w;
    }
    let p = argmax(&values);
    Ok(Spectrum {
        hwhm: half_width(&omega, &values, p),
        peak: vertex(&omega, &values, p),
        omega,
        values,
        raw_weight,
    })
}
