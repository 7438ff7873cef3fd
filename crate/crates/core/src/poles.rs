//! Two-pole analysis of the rotating-wave propagator.
//!
//! The real roots of `ω − Δ_A − Σ(ω) = 0` with positive slope give the
//! oscillation frequencies `ω±`. With weights `a₊ = (Δ_A − ω₋)/(ω₊ − ω₋)`,
//! `a₋ = (ω₊ − Δ_A)/(ω₊ − ω₋)` and `γ_p = Γ(ω_p)` the population is
//! approximately `Σ_p a_p e^{−a_p γ_p t} cos ω_p t`.
//!
//! In the Markov limit the decoherence rate reduces to
//! `γ_A = g₀²γ(Δ_A)/(g₀² + γ(Δ_A)²)` with `γ(Δ_A) = γ₀·coth(βΔ_A/2)`.

use alloc::vec::Vec;

use crate::dynamics::{Method, PopulationTrace, SelfEnergyTable};
use crate::fmath::{abs, cos, exp};
use crate::numerics::bracketed_root;
use crate::spectral::SpectralDensityParams;
use crate::tlfgreen::TlfGreenTable;
use crate::{Error, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    MarkovReduction,
    NonMarkovEnhancement,
    Crossover,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::MarkovReduction => "markov_reduction",
            Regime::NonMarkovEnhancement => "nonmarkov_enhancement",
            Regime::Crossover => "crossover",
        }
    }

    pub fn predicted_trend(&self) -> Trend {
        match self {
            Regime::MarkovReduction => Trend::DecreasesWithT,
            Regime::NonMarkovEnhancement => Trend::IncreasesWithT,
            Regime::Crossover => Trend::Indeterminate,
        }
    }
}

/// Predicted response of the decoherence rate to temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Trend {
    DecreasesWithT,
    IncreasesWithT,
    Indeterminate,
}

impl Trend {
    pub fn as_str(&self) -> &'static str {
        match self {
            Trend::DecreasesWithT => "decoherence_decreases_with_T",
            Trend::IncreasesWithT => "decoherence_increases_with_T",
            Trend::Indeterminate => "indeterminate",
        }
    }
}

/// Margin standing in for "much less than" in the regime classifier.
pub const REGIME_MARGIN: f64 = 3.0;

/// Markov reduction if `g₀ < α·Δ_A/3`, non-Markov enhancement if
/// `g₀ > 3·α·Δ_A`, crossover in between.
pub fn classify_regime(params: &SystemParams, bath: &SpectralDensityParams) -> (Regime, Trend) {
    let scale = bath.alpha_pz * params.delta_a;
    let regime = if params.g0 == 0.0 || params.g0 < scale / REGIME_MARGIN {
        Regime::MarkovReduction
    } else if params.g0 > REGIME_MARGIN * scale {
        Regime::NonMarkovEnhancement
    } else {
        Regime::Crossover
    };
    (regime, regime.predicted_trend())
}

/// `γ_A = g₀²γ/(g₀² + γ²)`.
pub fn gamma_a_markov(g0: f64, gamma: f64) -> Result<f64, Error> {
    if !(g0 >= 0.0 && gamma >= 0.0) {
        return Err(Error::Domain("g0 and γ must be non-negative"));
    }
    if g0 == 0.0 && gamma == 0.0 {
        return Err(Error::Degenerate("γ_A is undefined for g0 = γ = 0"));
    }
    Ok(g0 * g0 * gamma / (g0 * g0 + gamma * gamma))
}

/// `(a₋, a₊)`; they sum to one.
pub fn pole_weights(omega_minus: f64, omega_plus: f64, delta_a: f64) -> Result<(f64, f64), Error> {
    if !(omega_plus > omega_minus) {
        return Err(Error::Degenerate("pole weights need ω₋ < ω₊"));
    }
    let span = omega_plus - omega_minus;
    let a_plus = (delta_a - omega_minus) / span;
    Ok((1.0 - a_plus, a_plus))
}

/// All roots of `ω − Δ_A − Σ(ω)` with positive slope, ascending.
pub fn pole_roots(se: &SelfEnergyTable, delta_a: f64) -> Result<Vec<f64>, Error> {
    let f = |w: f64| w - delta_a - se.sigma_at(w);
    let x = se.positive_grid();
    let mut scan: Vec<f64> = x[1..x.len() - 1].to_vec();
    if se.g0 > 0.0 {
        let step = se.g0 / 50.0;
        let n = 500;
        for k in 0..=n {
            let w = delta_a - 5.0 * se.g0 + step * k as f64;
            if w > 0.0 {
                scan.push(w);
            }
        }
    }
    scan.push(delta_a);
    scan.sort_by(f64::total_cmp);
    scan.dedup();
    let mut roots = Vec::new();
    let mut prev = (scan[0], f(scan[0]));
    for &w in &scan[1..] {
        let fw = f(w);
        if fw == 0.0 && prev.1 < 0.0 {
            roots.push(w);
        } else if prev.1 < 0.0 && fw > 0.0 {
            roots.push(bracketed_root(f, prev.0, w, 1e-15)?);
        }
        prev = (w, fw);
    }
    if roots.is_empty() {
        return Err(Error::NoSignChange {
            lo: scan[0],
            hi: scan[scan.len() - 1],
        });
    }
    Ok(roots)
}

/// `(ω₋, ω₊)`: the two rising roots nearest to `Δ_A`, or the single root
/// twice.
pub fn solve_poles(se: &SelfEnergyTable, delta_a: f64) -> Result<(f64, f64), Error> {
    let mut roots = pole_roots(se, delta_a)?;
    roots.sort_by(|a, b| abs(a - delta_a).total_cmp(&abs(b - delta_a)));
    roots.truncate(2);
    roots.sort_by(f64::total_cmp);
    Ok((roots[0], roots[roots.len() - 1]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleAnalysis {
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub a_minus: f64,
    pub a_plus: f64,
    pub gamma_p_minus: f64,
    pub gamma_p_plus: f64,
    /// Markov estimate of the decoherence rate.
    pub gamma_a: f64,
    pub regime: Regime,
    pub trend: Trend,
    /// Number of distinct rising roots found.
    pub root_count: usize,
}

impl PoleAnalysis {
    /// A single root carries all the weight (`a₊ = 1`).
    pub fn single_root(&self) -> bool {
        self.omega_minus == self.omega_plus
    }
}

pub fn analyze(
    se: &SelfEnergyTable,
    green: &TlfGreenTable,
    bath: &SpectralDensityParams,
) -> Result<PoleAnalysis, Error> {
    let params = &green.params;
    let delta_a = params.delta_a;
    let root_count = pole_roots(se, delta_a)?.len();
    let (om, op) = solve_poles(se, delta_a)?;
    let (a_minus, a_plus) = if om == op { (0.0, 1.0) } else { pole_weights(om, op, delta_a)? };
    let gamma_a = gamma_a_markov(params.g0, green.gamma_at_delta_a_markov()).unwrap_or(0.0);
    let (regime, trend) = classify_regime(params, bath);
    Ok(PoleAnalysis {
        omega_minus: om,
        omega_plus: op,
        a_minus,
        a_plus,
        gamma_p_minus: se.gamma_at(om),
        gamma_p_plus: se.gamma_at(op),
        gamma_a,
        regime,
        trend,
        root_count,
    })
}

/// `Σ_p a_p e^{−a_p γ_p t} cos ω_p t`.
pub fn pole_approx_trace(analysis: &PoleAnalysis, times: &[f64]) -> PopulationTrace {
    let mut terms = alloc::vec![(analysis.a_plus, analysis.gamma_p_plus, analysis.omega_plus)];
    if !analysis.single_root() {
        terms.push((analysis.a_minus, analysis.gamma_p_minus, analysis.omega_minus));
    }
    let values = times
        .iter()
        .map(|&t| terms.iter().map(|&(a, g, w)| a * exp(-a * g * t) * cos(w * t)).sum())
        .collect();
    PopulationTrace {
        times: times.to_vec(),
        values,
        method: Method::PoleApprox,
        weight: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::build_self_energy;
    use crate::renorm::solve_eta;
    use crate::spectral::Piezoelectric;
    use crate::tlfgreen::{solve_omega_b, GreenOptions};
    use crate::Temperature;

    fn bath(alpha: f64) -> SpectralDensityParams {
        SpectralDensityParams::new(alpha, 0.05).unwrap()
    }

    fn sys(delta_a: f64, g0: f64, t: f64) -> SystemParams {
        SystemParams::new(delta_a, 0.1, g0, Temperature::new(t).unwrap()).unwrap()
    }

    fn tables(alpha: f64, p: &SystemParams) -> (TlfGreenTable, SelfEnergyTable) {
        let j = Piezoelectric::new(bath(alpha)).unwrap();
        let eta = solve_eta(&j, p, 1e-10).unwrap().eta;
        let tb = TlfGreenTable::build(&j, p, eta, &GreenOptions::default()).unwrap();
        let se = build_self_energy(p.g0, &tb).unwrap();
        (tb, se)
    }

    /// `Δ_A` placed on the renormalized fluctuator frequency.
    fn resonant(alpha: f64, g0: f64, t: f64) -> SystemParams {
        let j = Piezoelectric::new(bath(alpha)).unwrap();
        let p = sys(0.1, g0, t);
        let eta = solve_eta(&j, &p, 1e-10).unwrap().eta;
        let wb = solve_omega_b(eta, &p, &j).unwrap();
        sys(wb, g0, t)
    }

    #[test]
    fn weights() {
        let (m, p) = pole_weights(0.09, 0.11, 0.1).unwrap();
        assert!((m - 0.5).abs() < 1e-12 && (p - 0.5).abs() < 1e-12);
        let (m, p) = pole_weights(0.09, 0.11, 0.11).unwrap();
        assert_eq!((m, p), (0.0, 1.0));
        let (m, p) = pole_weights(0.0731, 0.1612, 0.15).unwrap();
        assert!(m != p && (m + p - 1.0).abs() < 1e-15);
        assert!(pole_weights(0.1, 0.1, 0.1).is_err());
    }

    #[test]
    fn markov_rate_limits() {
        let g0 = 0.01;
        let strong = gamma_a_markov(g0, 100.0 * g0).unwrap();
        assert!((strong / (g0 * g0 / (100.0 * g0)) - 1.0).abs() < 0.01);
        let weak = gamma_a_markov(g0, g0 / 100.0).unwrap();
        assert!((weak / (g0 / 100.0) - 1.0).abs() < 0.01);
        assert!((gamma_a_markov(g0, g0).unwrap() - g0 / 2.0).abs() < 1e-15);
        assert!(gamma_a_markov(0.0, 0.0).is_err());
        // maximum at γ = g₀
        let best = (1..400)
            .map(|k| k as f64 * 1e-4)
            .max_by(|a, b| gamma_a_markov(g0, *a).unwrap().total_cmp(&gamma_a_markov(g0, *b).unwrap()))
            .unwrap();
        assert!((best - g0).abs() < 1.5e-4);
    }

    #[test]
    fn regimes() {
        let (r, t) = classify_regime(&sys(0.1, 0.01, 0.0), &bath(0.3));
        assert_eq!((r, t), (Regime::Crossover, Trend::Indeterminate));
        let (r, _) = classify_regime(&sys(0.1, 0.01, 0.0), &bath(0.01));
        assert_eq!(r, Regime::NonMarkovEnhancement);
        let (r, _) = classify_regime(&sys(0.1, 0.0, 0.0), &bath(0.01));
        assert_eq!(r, Regime::MarkovReduction);
        let (r, t) = classify_regime(&sys(0.1, 0.003, 0.0), &bath(0.3));
        assert_eq!((r, t), (Regime::MarkovReduction, Trend::DecreasesWithT));
    }

    #[test]
    fn markov_rate_follows_regime_over_temperature() {
        let rate = |alpha: f64, g0: f64, t: f64| {
            let p = sys(0.1, g0, t);
            let (tb, _) = tables(alpha, &p);
            gamma_a_markov(g0, tb.gamma_at_delta_a_markov()).unwrap()
        };
        let ts = [0.02, 0.05, 0.1, 0.2];
        for w in ts.windows(2) {
            assert!(rate(0.01, 0.01, w[1]) > rate(0.01, 0.01, w[0]));
        }
        // At T = 0.2 the shrinking γ₀ wins over coth and the trend reverses.
        for w in ts[..3].windows(2) {
            assert!(rate(0.3, 0.003, w[1]) < rate(0.3, 0.003, w[0]));
        }
    }

    #[test]
    fn free_qubit_has_one_pole_at_delta_a() {
        let p = sys(0.1, 0.0, 0.0);
        let (tb, _) = tables(0.3, &p);
        let se = build_self_energy(0.0, &tb).unwrap();
        let (m, q) = solve_poles(&se, 0.1).unwrap();
        assert_eq!(m, q);
        assert!((m - 0.1).abs() < 1e-15);
        let a = analyze(&se, &tb, &bath(0.3)).unwrap();
        let tr = pole_approx_trace(&a, &[0.0, 10.0, 123.0]);
        for (t, v) in tr.times.iter().zip(&tr.values) {
            assert!((v - (0.1 * t).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn weak_bath_resonance_gives_vacuum_rabi_pair() {
        let g0 = 0.01;
        let p = resonant(1e-4, g0, 0.0);
        let (_, se) = tables(1e-4, &p);
        let (m, q) = solve_poles(&se, p.delta_a).unwrap();
        assert!((m - (p.delta_a - g0)).abs() < 1e-3 * g0, "{}", (m - p.delta_a + g0) / g0);
        assert!((q - (p.delta_a + g0)).abs() < 1e-3 * g0, "{}", (q - p.delta_a - g0) / g0);
        let (am, ap) = pole_weights(m, q, p.delta_a).unwrap();
        assert!((am - 0.5).abs() < 1e-3 && (ap - 0.5).abs() < 1e-3);
    }

    #[test]
    fn weak_bath_poles_straddle_qubit() {
        let p = sys(0.1, 0.01, 0.0);
        let (tb, se) = tables(0.01, &p);
        let a = analyze(&se, &tb, &bath(0.01)).unwrap();
        assert!(a.omega_minus < 0.1 && a.omega_plus > 0.1);
        assert!((a.a_minus + a.a_plus - 1.0).abs() < 1e-15);
        assert_eq!(a.regime, Regime::NonMarkovEnhancement);
    }
}
