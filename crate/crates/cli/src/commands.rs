//! Subcommands. Each writes its files under the output directory and returns
//! a short human-readable report.

use std::path::Path;

use rayon::prelude::*;
use serde_json::json;
use tlfdeco_core::dynamics::{population_full, population_rwa, time_grid};
use tlfdeco_core::oracle::exact_population;
use tlfdeco_core::pipeline::{at_resonance, compare_with_oracle, monotonicity, run_point, PointResult};
use tlfdeco_core::tlfgreen::lorentzian_jprime;
use tlfdeco_core::{SystemParams, Temperature};

use crate::config::RunConfig;
use crate::output::{num, write_columns, write_csv, write_json, Metadata};
use crate::CliError;

/// Settings shared by all subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunFlags {
    pub timestamp: bool,
}

/// System parameters with `Δ_A` moved onto `ω_B(T)` when requested.
pub fn effective_params(cfg: &RunConfig) -> Result<SystemParams, CliError> {
    let p = cfg.system_params()?;
    if cfg.system.resonance {
        Ok(at_resonance(&p, &cfg.bath_params()?, &cfg.pipeline_options())?)
    } else {
        Ok(p)
    }
}

/// Run the pipeline for the configured point.
pub fn compute(cfg: &RunConfig) -> Result<PointResult, CliError> {
    let p = effective_params(cfg)?;
    Ok(run_point(&p, &cfg.bath_params()?, &cfg.pipeline_options())?)
}

fn point_stats(meta: Metadata, r: &PointResult) -> Metadata {
    let mut m = meta
        .stat("delta_A", num(r.params.delta_a))
        .stat("eta", num(r.renorm.eta))
        .stat("omega_B", num(r.green.omega_b))
        .stat("gamma_B", num(r.green.gamma_at_omega_b))
        .stat("grid_points", r.green.len())
        .stat("grid_density", r.density)
        .stat("time_samples", r.times().len())
        .stat("tmax", num(r.full.trace.tmax()));
    if let Some(d) = r.drift {
        m = m.stat("refinement_drift", num(d));
    }
    if let Some(w) = r.full.trace.weight {
        m = m.stat("spectral_weight_full", num(w));
    }
    if let Some(w) = r.rwa.trace.weight {
        m = m.stat("spectral_weight_rwa", num(w));
    }
    m
}

fn write_dynamics(dir: &Path, meta: &Metadata, r: &PointResult) -> Result<(), CliError> {
    write_columns(
        &dir.join("dynamics.csv"),
        meta,
        &[
            ("t", r.times()),
            ("P_full", &r.full.trace.values),
            ("P_rwa", &r.rwa.trace.values),
        ],
    )
}

fn write_spectrum(dir: &Path, meta: &Metadata, r: &PointResult) -> Result<(), CliError> {
    if let (Some(f), Some(w)) = (&r.full.spectrum, &r.rwa.spectrum) {
        let meta = meta
            .clone()
            .stat("hwhm_full", num(f.hwhm))
            .stat("hwhm_rwa", num(w.hwhm))
            .stat("peak_full", num(f.peak))
            .stat("peak_rwa", num(w.peak));
        write_columns(
            &dir.join("qubit_spectrum.csv"),
            &meta,
            &[("omega", &f.omega), ("S_full", &f.values), ("S_rwa", &w.values)],
        )?;
    }
    Ok(())
}

pub fn spectrum(cfg: &RunConfig, out: &Path, flags: RunFlags) -> Result<String, CliError> {
    let r = compute(cfg)?;
    let meta = point_stats(Metadata::new("spectrum", cfg, flags.timestamp), &r);
    let g = &r.green;
    let lorentz: Vec<f64> = g
        .omega_grid
        .iter()
        .map(|&w| lorentzian_jprime(w, r.params.g0, g.omega_b, g.gamma_at_omega_b))
        .collect();
    write_columns(
        &out.join("tlf_table.csv"),
        &meta.clone().stat("sum_rule", num(g.sum_rule())),
        &[
            ("omega", &g.omega_grid),
            ("R", &g.r_values),
            ("gamma", &g.gamma_values),
            ("G", &g.g_values),
            ("G1", &g.g1_values),
            ("G2", &g.g2_values),
            ("Jprime_exact", &r.self_energy.jprime_values),
            ("Jprime_lorentzian", &lorentz),
        ],
    )?;
    write_spectrum(out, &meta, &r)?;
    Ok(match r.hwhm() {
        Some(h) => format!(
            "eta = {:.10}  omega_B = {:.10}  hwhm = {:.6e}  sum rule = {:.6}",
            r.renorm.eta,
            g.omega_b,
            h,
            g.sum_rule()
        ),
        None => format!("eta = {:.10}  omega_B = {:.10}  (uncoupled qubit)", r.renorm.eta, g.omega_b),
    })
}

pub fn dynamics(cfg: &RunConfig, out: &Path, flags: RunFlags) -> Result<String, CliError> {
    let r = compute(cfg)?;
    let meta = point_stats(Metadata::new("dynamics", cfg, flags.timestamp), &r);
    write_dynamics(out, &meta, &r)?;
    Ok(format!(
        "{} samples to t = {:.6e}; P_full(0) = {:.12}, P_rwa(0) = {:.12}",
        r.times().len(),
        r.full.trace.tmax(),
        r.full.trace.values[0],
        r.rwa.trace.values[0]
    ))
}

pub fn poles(cfg: &RunConfig, out: &Path, _flags: RunFlags) -> Result<String, CliError> {
    let r = compute(cfg)?;
    let a = &r.poles;
    let value = json!({
        "command": "poles",
        "config": cfg.flat_lines(),
        "delta_A": r.params.delta_a,
        "g0": r.params.g0,
        "omega_B": r.green.omega_b,
        "omega_minus": a.omega_minus,
        "omega_plus": a.omega_plus,
        "a_minus": a.a_minus,
        "a_plus": a.a_plus,
        "gamma_p_minus": a.gamma_p_minus,
        "gamma_p_plus": a.gamma_p_plus,
        "gamma_A_markov": a.gamma_a,
        "regime": a.regime.as_str(),
        "trend": a.trend.as_str(),
        "root_count": a.root_count,
        "single_root": a.single_root(),
    });
    write_json(&out.join("poles.json"), &value)?;
    Ok(format!(
        "omega- = {:.10} (a = {:.4})  omega+ = {:.10} (a = {:.4})  gamma_A = {:.4e}  {} / {}",
        a.omega_minus,
        a.a_minus,
        a.omega_plus,
        a.a_plus,
        a.gamma_a,
        a.regime.as_str(),
        a.trend.as_str()
    ))
}

/// Variable swept by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Temperature,
    Alpha,
    G0,
    Detuning,
}

impl SweepVar {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "T" => Ok(Self::Temperature),
            "alpha_pz" => Ok(Self::Alpha),
            "g0" => Ok(Self::G0),
            "detuning" => Ok(Self::Detuning),
            _ => Err(CliError::Config(format!(
                "unknown sweep variable `{s}` (T, alpha_pz, g0, detuning)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Temperature => "T",
            Self::Alpha => "alpha_pz",
            Self::G0 => "g0",
            Self::Detuning => "detuning",
        }
    }

    /// Config for one sweep value.
    pub fn apply(&self, cfg: &RunConfig, v: f64) -> Result<RunConfig, CliError> {
        let o = match self {
            Self::Temperature => format!("system.T={v:?}"),
            Self::Alpha => format!("bath.alpha_pz={v:?}"),
            Self::G0 => format!("system.g0={v:?}"),
            Self::Detuning => format!("system.delta_A={:?}", cfg.system.delta_b + v),
        };
        cfg.with_overrides(&[o])
    }
}

/// Parsed `VAR=START:STOP:STEPS`; `STEPS` is the number of points.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub var: SweepVar,
    pub values: Vec<f64>,
}

impl SweepSpec {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("sweep `{s}` is not VAR=START:STOP:STEPS"));
        let (var, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if steps == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        let values = if steps == 1 {
            vec![start]
        } else {
            (0..steps)
                .map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64)
                .collect()
        };
        Ok(Self {
            var: SweepVar::parse(var.trim())?,
            values,
        })
    }

    /// The sweep described by the config's `sweep` section.
    pub fn from_config(cfg: &RunConfig) -> Result<Self, CliError> {
        let var = SweepVar::parse(&cfg.sweep.variable)?;
        let values = if cfg.sweep.values.is_empty() && var == SweepVar::Temperature {
            cfg.sweep.temperatures.clone()
        } else {
            cfg.sweep.values.clone()
        };
        Ok(Self { var, values })
    }
}

/// One row of the sweep summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: Result<SweepPoint, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub delta_a: f64,
    pub hwhm: f64,
    pub gamma_a: f64,
    pub regime: &'static str,
}

/// Verdict on the hwhm sequence of the successful points.
pub fn verdict(rows: &[SweepRow]) -> &'static str {
    if rows.iter().any(|r| r.outcome.is_err()) {
        return "incomplete";
    }
    let h: Vec<f64> = rows.iter().filter_map(|r| r.outcome.as_ref().ok().map(|p| p.hwhm)).collect();
    match monotonicity(&h) {
        1 => "hwhm strictly increasing",
        -1 => "hwhm strictly decreasing",
        _ => "hwhm not monotonic",
    }
}

pub fn sweep(cfg: &RunConfig, spec: &SweepSpec, out: &Path, flags: RunFlags) -> Result<String, CliError> {
    let rows: Vec<SweepRow> = spec
        .values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let run = || -> Result<SweepPoint, CliError> {
                let pc = spec.var.apply(cfg, v)?;
                let r = compute(&pc)?;
                let meta = point_stats(Metadata::new("sweep", &pc, flags.timestamp), &r);
                let dir = out.join(format!("point_{i:03}"));
                write_dynamics(&dir, &meta, &r)?;
                write_spectrum(&dir, &meta, &r)?;
                Ok(SweepPoint {
                    delta_a: r.params.delta_a,
                    hwhm: r.hwhm().unwrap_or(f64::NAN),
                    gamma_a: r.poles.gamma_a,
                    regime: r.poles.regime.as_str(),
                })
            };
            SweepRow {
                value: v,
                outcome: run().map_err(|e| e.to_string()),
            }
        })
        .collect();

    let verdict = verdict(&rows);
    let meta = Metadata::new("sweep", cfg, flags.timestamp)
        .stat("variable", spec.var.name())
        .stat("points", rows.len())
        .stat("verdict", verdict);
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| match &r.outcome {
            Ok(p) => vec![
                num(r.value),
                num(p.hwhm),
                num(p.gamma_a),
                p.regime.to_string(),
                num(p.delta_a),
                "ok".to_string(),
            ],
            Err(e) => vec![
                num(r.value),
                num(f64::NAN),
                num(f64::NAN),
                String::new(),
                num(f64::NAN),
                format!("\"{}\"", e.replace('"', "'")),
            ],
        })
        .collect();
    write_csv(
        &out.join("summary.csv"),
        &meta,
        &["value", "hwhm", "gamma_A_markov", "regime", "delta_A", "status"],
        &table,
    )?;

    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    let mut report = String::new();
    for r in &rows {
        match &r.outcome {
            Ok(p) => report.push_str(&format!(
                "{} = {:<10} hwhm = {:.6e}  gamma_A = {:.6e}  {}\n",
                spec.var.name(),
                r.value,
                p.hwhm,
                p.gamma_a,
                p.regime
            )),
            Err(e) => report.push_str(&format!("{} = {:<10} FAILED: {e}\n", spec.var.name(), r.value)),
        }
    }
    report.push_str(&format!("verdict: {verdict}"));
    if failed == rows.len() {
        return Err(CliError::Numeric(tlfdeco_core::Error::Degenerate("every sweep point failed")));
    }
    if failed > 0 {
        eprintln!("{report}");
        return Err(CliError::PartialSweep {
            failed,
            total: rows.len(),
        });
    }
    Ok(report)
}

pub fn oracle(cfg: &RunConfig, out: &Path, flags: RunFlags) -> Result<String, CliError> {
    if cfg.system.temperature != 0.0 {
        return Err(CliError::Config("the oracle runs at system.T = 0 only".into()));
    }
    let r = compute(cfg)?;
    let cmp = compare_with_oracle(&r, cfg.oracle.modes, cfg.oracle.n_max)?;
    let p = r.params;
    let tmax = if p.g0 > 0.0 {
        10.0 * std::f64::consts::PI / p.g0
    } else {
        50.0 / p.delta_a
    };
    let times = time_grid(tmax, cfg.grid.samples);
    let exact = exact_population(&cmp.bath, &p, &times)?;
    let full = population_full(&r.self_energy, p.delta_a, &times)?;
    let rwa = population_rwa(&r.self_energy, p.delta_a, &times)?;
    let max_dev = exact
        .values
        .iter()
        .zip(&full.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    debug_assert_eq!(p.temperature, Temperature::Zero);

    let meta = point_stats(Metadata::new("oracle", cfg, flags.timestamp), &r)
        .stat("modes", cfg.oracle.modes)
        .stat("n_max", cfg.oracle.n_max)
        .stat("peak_discrepancy", num(cmp.peak_discrepancy))
        .stat("splitting_discrepancy", num(cmp.splitting_discrepancy))
        .stat("pole_discrepancy", num(cmp.pole_discrepancy))
        .stat("max_abs_deviation_full", num(max_dev));
    write_columns(
        &out.join("oracle.csv"),
        &meta,
        &[
            ("t", &times),
            ("P_oracle", &exact.values),
            ("P_full", &full.values),
            ("P_rwa", &rwa.values),
        ],
    )?;
    let value = json!({
        "command": "oracle",
        "config": cfg.flat_lines(),
        "modes": cmp.bath.modes,
        "exact_peaks": cmp.exact_peaks.iter().map(|l| json!({"omega": l.omega, "weight": l.weight})).collect::<Vec<_>>(),
        "full_peaks": cmp.full_peaks.iter().map(|&(w, h)| json!({"omega": w, "height": h})).collect::<Vec<_>>(),
        "peak_discrepancy": cmp.peak_discrepancy,
        "splitting_discrepancy": cmp.splitting_discrepancy,
        "correlator_peak": cmp.correlator_peak.omega,
        "formula_pole": cmp.formula_pole.omega,
        "pole_discrepancy": cmp.pole_discrepancy,
        "max_abs_deviation_full": max_dev,
    });
    write_json(&out.join("oracle_summary.json"), &value)?;
    Ok(format!(
        "peak discrepancy {:.3e}, splitting discrepancy {:.3e}, pole discrepancy {:.3e}, max |P_oracle − P_full| = {:.3e}",
        cmp.peak_discrepancy, cmp.splitting_discrepancy, cmp.pole_discrepancy, max_dev
    ))
}
