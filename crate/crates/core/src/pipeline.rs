//! One parameter point end to end: `η → G → Σ, Γ → A(ω) → P(t) → S(ω)`, plus
//! the two-pole analysis.

use alloc::vec::Vec;

use crate::dynamics::{
    build_self_energy, population_with_spectrum, spectrum_of, time_grid, Method, PopulationTrace, QubitSpectrum,
    SamplingOptions, SelfEnergyTable, Spectrum, SpectrumOptions, TimeOptions,
};
use crate::fmath::abs;
use crate::oracle::{
    discretize_bath, dominant_line, formula_on_discrete_modes, population_lines, strongest_lines,
    tlf_correlator_lines, DiscretizedBath, Line,
};
use crate::poles::{analyze, PoleAnalysis};
use crate::renorm::{solve_eta_with, RenormOptions, RenormalizationResult};
use crate::spectral::{Piezoelectric, SpectralDensityParams};
use crate::tlfgreen::{solve_omega_b, GreenOptions, TlfGreenTable};
use crate::{Error, SystemParams};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub renorm: RenormOptions,
    pub green: GreenOptions,
    pub sampling: SamplingOptions,
    pub time: TimeOptions,
    pub spectrum_points: usize,
    /// The spectrum window extends this many half-widths of `A(ω)` beyond
    /// `[min(Δ_A, ω_B) − 3g₀, max(Δ_A, ω_B) + 3g₀]`.
    pub window_widths: f64,
    pub require_decay: bool,
    /// Largest relative change of the peak of `A(ω)` accepted under a 2×
    /// grid refinement.
    pub drift_tol: f64,
    /// Number of grid doublings tried before giving up; 0 skips the check.
    pub max_refinements: usize,
    /// Record length for an uncoupled qubit, in units of `1/Δ_A`.
    pub free_periods: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            renorm: RenormOptions::default(),
            green: GreenOptions::default(),
            sampling: SamplingOptions::default(),
            time: TimeOptions::default(),
            spectrum_points: 4001,
            window_widths: 20.0,
            require_decay: true,
            drift_tol: 0.01,
            max_refinements: 2,
            free_periods: 50.0,
        }
    }
}

/// Trace, spectral function and spectrum of one propagator.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRun {
    pub trace: PopulationTrace,
    /// `A(ω)`; absent for an uncoupled qubit.
    pub spectral_function: Option<QubitSpectrum>,
    /// Spectrum of the trace; absent for an uncoupled qubit.
    pub spectrum: Option<Spectrum>,
}

impl MethodRun {
    pub fn hwhm(&self) -> Option<f64> {
        self.spectrum.as_ref().map(|s| s.hwhm)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub params: SystemParams,
    pub bath: SpectralDensityParams,
    pub renorm: RenormalizationResult,
    pub green: TlfGreenTable,
    pub self_energy: SelfEnergyTable,
    /// Grid density multiplier finally used.
    pub density: usize,
    /// Relative peak drift of `A(ω)` at the last refinement step.
    pub drift: Option<f64>,
    pub window: (f64, f64),
    pub full: MethodRun,
    pub rwa: MethodRun,
    pub poles: PoleAnalysis,
}

impl PointResult {
    /// Half-width of the full-propagator spectrum, the decoherence rate
    /// proxy.
    pub fn hwhm(&self) -> Option<f64> {
        self.full.hwhm()
    }

    pub fn times(&self) -> &[f64] {
        &self.full.trace.times
    }
}

/// `η`, the fluctuator table and the qubit self-energies at grid density
/// `density`.
pub fn build_tables(
    params: &SystemParams,
    bath: &SpectralDensityParams,
    opts: &PipelineOptions,
    density: usize,
) -> Result<(RenormalizationResult, TlfGreenTable, SelfEnergyTable), Error> {
    params.validate()?;
    let j = Piezoelectric::new(*bath)?;
    let renorm = solve_eta_with(&j, params, &opts.renorm)?;
    let green_opts = GreenOptions {
        density,
        ..opts.green.clone()
    };
    let green = TlfGreenTable::build(&j, params, renorm.eta, &green_opts)?;
    let se = build_self_energy(params.g0, &green)?;
    Ok((renorm, green, se))
}

/// Renormalized fluctuator frequency `ω_B` at the given temperature.
pub fn omega_b(params: &SystemParams, bath: &SpectralDensityParams, opts: &PipelineOptions) -> Result<f64, Error> {
    let j = Piezoelectric::new(*bath)?;
    let eta = solve_eta_with(&j, params, &opts.renorm)?.eta;
    solve_omega_b(eta, params, &j)
}

/// `params` with `Δ_A` moved onto `ω_B`.
pub fn at_resonance(
    params: &SystemParams,
    bath: &SpectralDensityParams,
    opts: &PipelineOptions,
) -> Result<SystemParams, Error> {
    let wb = omega_b(params, bath, opts)?;
    SystemParams::new(wb, params.delta_b, params.g0, params.temperature)
}

fn relative_drift(a: &QubitSpectrum, b: &QubitSpectrum) -> f64 {
    let (ha, hb) = (a.peak().1, b.peak().1);
    abs(ha - hb) / hb
}

pub fn run_point(
    params: &SystemParams,
    bath: &SpectralDensityParams,
    opts: &PipelineOptions,
) -> Result<PointResult, Error> {
    let delta_a = params.delta_a;
    let mut density = opts.green.density.max(1);
    let (mut renorm, mut green, mut se) = build_tables(params, bath, opts, density)?;

    if params.g0 == 0.0 {
        let tmax = opts.time.tmax.unwrap_or(opts.free_periods / delta_a);
        let times = time_grid(tmax, opts.time.sample_count(tmax, delta_a));
        let run = |method| -> Result<MethodRun, Error> {
            let (trace, _) = population_with_spectrum(&se, delta_a, &times, method, &opts.sampling)?;
            Ok(MethodRun {
                trace,
                spectral_function: None,
                spectrum: None,
            })
        };
        let (full, rwa) = (run(Method::Full)?, run(Method::Rwa)?);
        let poles = analyze(&se, &green, bath)?;
        return Ok(PointResult {
            params: *params,
            bath: *bath,
            renorm,
            green,
            self_energy: se,
            density,
            drift: None,
            window: (delta_a, delta_a),
            full,
            rwa,
            poles,
        });
    }

    let sample = |se: &SelfEnergyTable, method| crate::dynamics::qubit_spectrum(se, delta_a, method, &opts.sampling);
    let mut a_full = sample(&se, Method::Full)?;
    let mut drift = None;
    if opts.max_refinements > 0 {
        let mut ok = false;
        for _ in 0..opts.max_refinements {
            let (r2, g2, se2) = build_tables(params, bath, opts, 2 * density)?;
            let a2 = sample(&se2, Method::Full)?;
            let d = relative_drift(&a_full, &a2);
            drift = Some(d);
            (renorm, green, se, a_full) = (r2, g2, se2, a2);
            density *= 2;
            if d <= opts.drift_tol {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::GridTooCoarse { drift: drift.unwrap_or(f64::NAN) });
        }
    }

    let width = a_full.hwhm();
    let tmax = opts.time.horizon(width);
    let edge = 3.0 * params.g0 + opts.window_widths * width;
    let lo = (delta_a.min(green.omega_b) - edge).max(0.0);
    let hi = delta_a.max(green.omega_b) + edge;
    let times = time_grid(tmax, opts.time.sample_count(tmax, hi));
    let spec_opts = SpectrumOptions {
        points: opts.spectrum_points,
        require_decay: opts.require_decay,
        ..SpectrumOptions::new(lo, hi)
    };

    let run = |method| -> Result<MethodRun, Error> {
        let (trace, a) = population_with_spectrum(&se, delta_a, &times, method, &opts.sampling)?;
        let spectrum = spectrum_of(&trace, &spec_opts)?;
        Ok(MethodRun {
            trace,
            spectral_function: a,
            spectrum: Some(spectrum),
        })
    };
    let full = run(Method::Full)?;
    let rwa = run(Method::Rwa)?;
    let poles = analyze(&se, &green, bath)?;
    Ok(PointResult {
        params: *params,
        bath: *bath,
        renorm,
        green,
        self_energy: se,
        density,
        drift,
        window: (lo, hi),
        full,
        rwa,
        poles,
    })
}

/// Exact diagonalization against the continuum pipeline at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub bath: DiscretizedBath,
    /// The two strongest lines of the exact `P(t)`, ascending.
    pub exact_peaks: Vec<Line>,
    /// The two highest peaks of the full-propagator spectrum, ascending, as
    /// `(position, height)`.
    pub full_peaks: Vec<(f64, f64)>,
    /// Largest relative offset between paired peak positions.
    pub peak_discrepancy: f64,
    /// Relative difference of the peak splittings (beat frequencies).
    pub splitting_discrepancy: f64,
    /// Dominant line of the exact fluctuator correlator.
    pub correlator_peak: Line,
    /// Dominant pole of the discrete-mode Green's function.
    pub formula_pole: Line,
    pub pole_discrepancy: f64,
}

fn splitting<T>(v: &[T], pos: impl Fn(&T) -> f64) -> f64 {
    if v.len() < 2 {
        0.0
    } else {
        pos(&v[v.len() - 1]) - pos(&v[0])
    }
}

/// Compare the exact `P(t)` on `modes` discrete bath modes with the
/// continuum result `point`.
pub fn compare_with_oracle(point: &PointResult, modes: usize, n_max: usize) -> Result<OracleComparison, Error> {
    let j = Piezoelectric::new(point.bath)?;
    let bath = discretize_bath(&j, modes, point.green.omega_grid[point.green.len() - 1], n_max)?;
    let mut exact_peaks = strongest_lines(&population_lines(&bath, &point.params)?, 2);
    exact_peaks.retain(|l| l.omega > 0.0);
    let spectrum = point
        .full
        .spectrum
        .as_ref()
        .ok_or(Error::Degenerate("comparison needs a coupled qubit"))?;
    let mut full_peaks: Vec<(f64, f64)> = spectrum.peaks(0.05).into_iter().take(exact_peaks.len()).collect();
    full_peaks.sort_by(|a, b| a.0.total_cmp(&b.0));
    let peak_discrepancy = exact_peaks
        .iter()
        .zip(&full_peaks)
        .map(|(e, f)| abs(f.0 / e.omega - 1.0))
        .fold(0.0, f64::max);
    let (se, sf) = (splitting(&exact_peaks, |l| l.omega), splitting(&full_peaks, |p| p.0));
    let splitting_discrepancy = if se > 0.0 { abs(sf / se - 1.0) } else { 0.0 };

    let correlator = tlf_correlator_lines(&bath, point.params.delta_b, point.params.temperature)?;
    let correlator_peak = dominant_line(&correlator).ok_or(Error::Degenerate("empty correlator"))?;
    let formula_pole = formula_on_discrete_modes(&bath, &point.params)?.dominant();
    Ok(OracleComparison {
        bath,
        exact_peaks,
        full_peaks,
        peak_discrepancy,
        splitting_discrepancy,
        pole_discrepancy: abs(formula_pole.omega / correlator_peak.omega - 1.0),
        correlator_peak,
        formula_pole,
    })
}

/// `+1`, `−1` or `0` if `values` is strictly increasing, strictly
/// decreasing, or neither.
pub fn monotonicity(values: &[f64]) -> i32 {
    if values.len() < 2 {
        return 0;
    }
    let w: Vec<_> = values.windows(2).collect();
    if w.iter().all(|p| p[1] > p[0]) {
        1
    } else if w.iter().all(|p| p[1] < p[0]) {
        -1
    } else {
        0
    }
}
