//! Numerical kernels shared by the whole pipeline.
//!
//! Everything here is deterministic: no randomized algorithms, and the
//! adaptive schemes always bisect the interval with the largest error estimate
//! (ties broken by position), so identical inputs give bit-identical outputs.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::fmath::{abs, cos, ln, sin};
use crate::Error;

/// Tolerances and limits for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Upper cutoff used wherever a semi-infinite integral over a bath
    /// spectral density appears.
    pub omega_max: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
            omega_max: crate::OMEGA_MAX,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(self, abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..self
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.omega_max > 0.0) {
            return Err(Error::Domain("quadrature tolerances and cutoff must be positive"));
        }
        Ok(())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_168_700,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Apply the Gauss–Kronrod pair on `[a, b]`, returning the Kronrod value and
/// the QUADPACK-style error estimate.
fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = abs(kronrod);
    let mut fvals = [(0.0f64, 0.0f64); 10];
    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fvals[j] = (f1, f2);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (abs(f1) + abs(f2));
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * abs(fc - mean);
    for (j, &(f1, f2)) in fvals.iter().enumerate() {
        asc += WGK[j] * (abs(f1 - mean) + abs(f2 - mean));
    }
    let value = kronrod * half;
    let res_abs = abs_sum * abs(half);
    let res_asc = asc * abs(half);
    let mut err = abs((kronrod - gauss) * half);
    if res_asc != 0.0 && err != 0.0 {
        let scale = crate::fmath::powf(200.0 * err / res_asc, 1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Converges when the summed error estimate drops below
/// `max(abs_tol, rel_tol * |value|)`. Reversed limits are handled by sign.
pub fn adaptive_integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Integral, Error> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration limits must be finite"));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if b < a {
        let r = adaptive_integrate(f, b, a, spec)?;
        return Ok(Integral {
            value: -r.value,
            ..r
        });
    }

    let (v0, e0) = gauss_kronrod(&mut f, a, b);
    let mut evaluations = 21;
    let mut total = v0;
    let mut total_err = e0;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v0,
        error: e0,
    });

    let mut subdivisions = 0;
    loop {
        if !total.is_finite() {
            return Err(Error::NonFinite("integrand produced a non-finite value"));
        }
        let target = spec.abs_tol.max(spec.rel_tol * abs(total));
        if total_err <= target {
            break;
        }
        if subdivisions >= spec.max_subdivisions {
            let worst = heap.peek().copied().expect("heap is never empty");
            return Err(Error::QuadratureBudget {
                value: total,
                error: total_err,
                worst_lo: worst.a,
                worst_hi: worst.b,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision; accept what we have
            heap.push(Panel {
                error: 0.0,
                ..worst
            });
            total_err -= worst.error;
            subdivisions += 1;
            continue;
        }
        let (v1, e1) = gauss_kronrod(&mut f, worst.a, mid);
        let (v2, e2) = gauss_kronrod(&mut f, mid, worst.b);
        evaluations += 42;
        subdivisions += 1;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        if total_err <= spec.abs_tol.max(spec.rel_tol * abs(total)) {
            // confirm with a fresh ordered sum before accepting
            let mut panels: Vec<Panel> = heap.iter().copied().collect();
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            total = panels.iter().map(|p| p.value).sum();
            total_err = panels.iter().map(|p| p.error).sum();
        }
    }

    Ok(Integral {
        value: total,
        error: total_err,
        evaluations,
    })
}

/// Integrate over `[a, b]` split at the given interior breakpoints.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral, Error> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut lo = a;
    let mut out = Integral {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    for hi in pts.into_iter().chain(core::iter::once(b)) {
        let r = adaptive_integrate(&mut f, lo, hi, spec)?;
        out.value += r.value;
        out.error += r.error;
        out.evaluations += r.evaluations;
        lo = hi;
    }
    Ok(out)
}

/// Cauchy principal value of `∫ f(x)/(x − x0) dx` over `[a, b]` by singularity
/// subtraction:
///
/// `∫ [f(x) − f(x0)]/(x − x0) dx + f(x0)·ln|(b − x0)/(x0 − a)|`.
///
/// If `x0` lies outside `(a, b)` the integral is regular and is evaluated
/// directly.
pub fn principal_value<F: FnMut(f64) -> f64>(
    mut f: F,
    x0: f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, Error> {
    principal_value_with_breaks(&mut f, x0, a, b, &[], spec)
}

/// [`principal_value`] with extra interior breakpoints for the regular part.
pub fn principal_value_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    x0: f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64, Error> {
    if !(x0 > a && x0 < b) {
        return Ok(integrate_with_breaks(|x| f(x) / (x - x0), a, b, breaks, spec)?.value);
    }
    let f0 = f(x0);
    if !f0.is_finite() {
        return Err(Error::NonFinite("principal value: f(x0) is not finite"));
    }
    let mut pts: Vec<f64> = breaks.to_vec();
    pts.push(x0);
    let regular = integrate_with_breaks(
        |x| {
            let d = x - x0;
            if d == 0.0 {
                0.0
            } else {
                (f(x) - f0) / d
            }
        },
        a,
        b,
        &pts,
        spec,
    )?;
    Ok(regular.value + f0 * ln(abs((b - x0) / (x0 - a))))
}

/// Independent principal-value scheme: excise `(x0 − ε, x0 + ε)`, integrate the
/// remainder, and Richardson-extrapolate `ε → 0`.
///
/// For smooth `f` the excised integral has an expansion in odd powers of `ε`,
/// so a two-stage Richardson table on ε, ε/2, ε/4 removes the `ε` and `ε³`
/// terms.
pub fn principal_value_excision<F: FnMut(f64) -> f64>(
    mut f: F,
    x0: f64,
    a: f64,
    b: f64,
    epsilon: f64,
    spec: &QuadratureSpec,
) -> Result<f64, Error> {
    if !(x0 > a && x0 < b) {
        return Err(Error::Domain("excision requires a < x0 < b"));
    }
    let eps_max = 0.5 * (x0 - a).min(b - x0);
    if !(epsilon > 0.0 && epsilon <= eps_max) {
        return Err(Error::Domain("excision width must lie in (0, min distance to the ends / 2]"));
    }
    let mut excised = |eps: f64| -> Result<f64, Error> {
        let left = adaptive_integrate(|x| f(x) / (x - x0), a, x0 - eps, spec)?;
        let right = adaptive_integrate(|x| f(x) / (x - x0), x0 + eps, b, spec)?;
        Ok(left.value + right.value)
    };
    let i1 = excised(epsilon)?;
    let i2 = excised(0.5 * epsilon)?;
    let i4 = excised(0.25 * epsilon)?;
    // I(ε) = PV + c1 ε + c3 ε³ + …
    let r12 = 2.0 * i2 - i1;
    let r24 = 2.0 * i4 - i2;
    Ok((8.0 * r24 - r12) / 7.0)
}

/// Brent's method (bisection/secant/inverse-quadratic hybrid) on a bracket with
/// a sign change. Stops when `|f(x)| < tol` or the bracket collapses to
/// machine precision.
pub fn bracketed_root<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, Error> {
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::NonFinite("root bracket endpoint is not finite"));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if abs(fc) < abs(fb) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let xtol = 2.0 * f64::EPSILON * abs(b);
        let m = 0.5 * (c - b);
        if abs(fb) < tol || abs(m) <= xtol {
            return Ok(b);
        }
        if abs(e) >= xtol && abs(fa) > abs(fb) {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - abs(xtol * q)).min(abs(e * q)) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if abs(d) > xtol {
            d
        } else if m > 0.0 {
            xtol
        } else {
            -xtol
        };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NonFinite("root function returned a non-finite value"));
        }
    }
    Ok(b)
}

/// Step-size policy for [`damped_fixed_point`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxation {
    /// Mixing weight `w` in `x ← (1 − w)·x + w·M(x)`.
    pub weight: f64,
    /// Once the residual drops below this, take full steps (`w = 1`).
    pub full_step_below: f64,
}

impl Relaxation {
    pub const fn fixed(weight: f64) -> Self {
        Self {
            weight,
            full_step_below: 0.0,
        }
    }
}

impl Default for Relaxation {
    fn default() -> Self {
        Self {
            weight: 0.5,
            full_step_below: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub value: f64,
    pub iterations: usize,
    /// `|M(x*) − x*|` at the returned point.
    pub residual: f64,
}

/// Under-relaxed fixed-point iteration `x_{n+1} = (1 − w)·x_n + w·M(x_n)`.
///
/// Returns the first iterate whose residual `|M(x) − x|` is below `tol`. The
/// map is fallible so that quadrature failures inside `M` propagate.
pub fn damped_fixed_point<M>(
    mut map: M,
    x0: f64,
    relax: Relaxation,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPoint, Error>
where
    M: FnMut(f64) -> Result<f64, Error>,
{
    if !(relax.weight > 0.0 && relax.weight <= 1.0) {
        return Err(Error::Domain("relaxation weight must lie in (0, 1]"));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("fixed-point tolerance must be positive"));
    }
    let mut x = x0;
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let mx = map(x)?;
        if !mx.is_finite() {
            return Err(Error::NonFinite("fixed-point map returned a non-finite value"));
        }
        residual = abs(mx - x);
        if residual < tol {
            return Ok(FixedPoint {
                value: x,
                iterations: it,
                residual,
            });
        }
        let w = if residual < relax.full_step_below {
            1.0
        } else {
            relax.weight
        };
        x = (1.0 - w) * x + w * mx;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        last: x,
        residual,
    })
}

/// Time-domain window applied before a cosine transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    Rectangular,
    /// Half-cosine taper over the final `fraction` of the record.
    CosineTaper { fraction: f64 },
}

impl Window {
    /// Window weight at `t` for a record spanning `[t0, t_end]`.
    pub fn weight(&self, t: f64, t0: f64, t_end: f64) -> f64 {
        match *self {
            Window::Rectangular => 1.0,
            Window::CosineTaper { fraction } => {
                let len = t_end - t0;
                let start = t_end - fraction * len;
                if t <= start || fraction <= 0.0 {
                    1.0
                } else {
                    let u = (t - start) / (t_end - start);
                    0.5 * (1.0 + cos(core::f64::consts::PI * u))
                }
            }
        }
    }
}

/// One-sided cosine transform `S(ω) = (1/π) Σ w(tᵢ) P(tᵢ) cos(ω tᵢ) Δt` with
/// trapezoid end weights. The time grid must be uniform.
pub fn cosine_transform(
    times: &[f64],
    values: &[f64],
    window: Window,
    omega_grid: &[f64],
) -> Result<Vec<f64>, Error> {
    if times.len() != values.len() {
        return Err(Error::Domain("times and values must have equal length"));
    }
    if times.len() < 2 {
        return Ok(omega_grid.iter().map(|_| 0.0).collect());
    }
    let n = times.len();
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Domain("time grid must be increasing"));
    }
    for (i, &t) in times.iter().enumerate() {
        let expect = times[0] + dt * i as f64;
        if abs(t - expect) > 1e-9 * (abs(expect) + dt) {
            return Err(Error::NonUniformGrid { index: i });
        }
    }
    let t0 = times[0];
    let t_end = times[n - 1];
    let weighted: Vec<f64> = times
        .iter()
        .zip(values)
        .enumerate()
        .map(|(i, (&t, &p))| {
            let end = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            end * window.weight(t, t0, t_end) * p * dt
        })
        .collect();
    let inv_pi = 1.0 / core::f64::consts::PI;
    Ok(omega_grid
        .iter()
        .map(|&w| {
            // cos(ω tᵢ) via a stable rotation recurrence would drift over
            // thousands of steps; evaluate directly.
            inv_pi
                * times
                    .iter()
                    .zip(&weighted)
                    .map(|(&t, &c)| c * cos(w * t))
                    .sum::<f64>()
        })
        .collect())
}

/// Exact integral of the piecewise-linear interpolant of `(x, y)` against
/// `cos(t·x)` (Filon-type product rule). Accurate for any `t` as long as the
/// interpolant resolves `y`.
pub fn linear_cosine_integral(x: &[f64], y: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..x.len().saturating_sub(1) {
        let (x0, x1) = (x[i], x[i + 1]);
        let h = x1 - x0;
        if h <= 0.0 {
            continue;
        }
        let (y0, y1) = (y[i], y[i + 1]);
        let th = t * h;
        if abs(th) < 1e-3 {
            // Taylor expansion of the segment integral in th.
            let c0 = cos(t * x0);
            let s0 = sin(t * x0);
            // ∫0^h (y0 + s u) cos(t(x0+u)) du with s = (y1−y0)/h
            let s = (y1 - y0) / h;
            let th2 = th * th;
            let i_cos = h * (1.0 - th2 / 6.0 + th2 * th2 / 120.0); // ∫ cos(tu)
            let i_sin = h * (th / 2.0 - th * th2 / 24.0); // ∫ sin(tu)
            let iu_cos = h * h * (0.5 - th2 / 8.0 + th2 * th2 / 144.0); // ∫ u cos(tu)
            let iu_sin = h * h * (th / 3.0 - th * th2 / 30.0); // ∫ u sin(tu)
            acc += y0 * (c0 * i_cos - s0 * i_sin) + s * (c0 * iu_cos - s0 * iu_sin);
        } else {
            let (s0, s1) = (sin(t * x0), sin(t * x1));
            let (c0, c1) = (cos(t * x0), cos(t * x1));
            let slope = (y1 - y0) / h;
            acc += (y1 * s1 - y0 * s0) / t + slope * (c1 - c0) / (t * t);
        }
    }
    acc
}

/// Below this value of `t·h` the segment moments are summed as power series.
const SWEEP_SERIES_BELOW: f64 = 0.1;

/// `Σ_k (−1)^k θ^{2k}/(2k+2)!`, `Σ_k (−1)^k θ^{2k}/((2k)!(2k+2))`,
/// `Σ_k (−1)^k θ^{2k+1}/(2k+3)!` and `Σ_k (−1)^k θ^{2k+1}/((2k+1)!(2k+3))`:
/// the moments `∫₀¹ (1−u)cos θu`, `∫₀¹ u cos θu`, `∫₀¹ (1−u) sin θu`,
/// `∫₀¹ u sin θu`.
fn segment_moments(th: f64) -> [f64; 4] {
    const C0: [f64; 6] = [
        1.0 / 2.0,
        -1.0 / 24.0,
        1.0 / 720.0,
        -1.0 / 40320.0,
        1.0 / 3628800.0,
        -1.0 / 479001600.0,
    ];
    const C1: [f64; 6] = [
        1.0 / 2.0,
        -1.0 / 8.0,
        1.0 / 144.0,
        -1.0 / 5760.0,
        1.0 / 403200.0,
        -1.0 / 43545600.0,
    ];
    const S0: [f64; 6] = [
        1.0 / 6.0,
        -1.0 / 120.0,
        1.0 / 5040.0,
        -1.0 / 362880.0,
        1.0 / 39916800.0,
        -1.0 / 6227020800.0,
    ];
    const S1: [f64; 6] = [
        1.0 / 3.0,
        -1.0 / 30.0,
        1.0 / 840.0,
        -1.0 / 45360.0,
        1.0 / 3991680.0,
        -1.0 / 518918400.0,
    ];
    let z = th * th;
    let horner = |c: &[f64; 6]| c.iter().rev().fold(0.0, |acc, &k| acc * z + k);
    [horner(&C0), horner(&C1), th * horner(&S0), th * horner(&S1)]
}

/// [`linear_cosine_integral`] on the uniform time grid `t = n·dt`,
/// `n = 0..count`.
///
/// The phases `cos(t·xᵢ)`, `sin(t·xᵢ)` advance by a per-node rotation and are
/// re-seeded exactly every 64 steps, so the cost is one pass over the nodes per
/// time point.
pub fn linear_cosine_sweep(x: &[f64], y: &[f64], dt: f64, count: usize) -> Vec<f64> {
    let m = x.len().min(y.len());
    if m < 2 {
        return alloc::vec![0.0; count];
    }
    let rc: Vec<f64> = x[..m].iter().map(|&xi| cos(xi * dt)).collect();
    let rs: Vec<f64> = x[..m].iter().map(|&xi| sin(xi * dt)).collect();
    let mut c = alloc::vec![1.0; m];
    let mut s = alloc::vec![0.0; m];
    let mut out = Vec::with_capacity(count);
    for n in 0..count {
        let t = n as f64 * dt;
        if n % 64 == 0 {
            for i in 0..m {
                c[i] = cos(t * x[i]);
                s[i] = sin(t * x[i]);
            }
        }
        let mut acc = 0.0;
        for i in 0..m - 1 {
            let h = x[i + 1] - x[i];
            if h <= 0.0 {
                continue;
            }
            let (y0, y1) = (y[i], y[i + 1]);
            let th = t * h;
            if th < SWEEP_SERIES_BELOW {
                let [c0, c1, s0, s1] = segment_moments(th);
                acc += h * (c[i] * (y0 * c0 + y1 * c1) - s[i] * (y0 * s0 + y1 * s1));
            } else {
                let slope = (y1 - y0) / h;
                acc += (y1 * s[i + 1] - y0 * s[i]) / t + slope * (c[i + 1] - c[i]) / (t * t);
            }
        }
        out.push(acc);
        for i in 0..m {
            let (ci, si) = (c[i], s[i]);
            c[i] = ci * rc[i] - si * rs[i];
            s[i] = si * rc[i] + ci * rs[i];
        }
    }
    out
}

/// Principal value of `∫ y(x)/(ω − x) dx` for the piecewise-linear
/// interpolant of `(x, y)`, evaluated exactly segment by segment.
///
/// When `ω` coincides with a node the logarithms of adjacent segments cancel
/// and the node is skipped consistently, giving the symmetric principal value.
pub fn linear_hilbert(x: &[f64], y: &[f64], omega: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..x.len().saturating_sub(1) {
        let (x0, x1) = (x[i], x[i + 1]);
        let h = x1 - x0;
        if h <= 0.0 {
            continue;
        }
        let slope = (y[i + 1] - y[i]) / h;
        let y_at = y[i] + slope * (omega - x0);
        let d0 = omega - x0;
        let d1 = omega - x1;
        // ∫ (y_at − slope·(ω − x))/(ω − x) dx = y_at·ln|d0/d1| − slope·h; a
        // vanishing distance contributes a log singularity that cancels
        // against the neighbouring segment, so it is dropped on both sides.
        let l0 = if d0 == 0.0 { 0.0 } else { ln(abs(d0)) };
        let l1 = if d1 == 0.0 { 0.0 } else { ln(abs(d1)) };
        acc += y_at * (l0 - l1) - slope * h;
    }
    acc
}
