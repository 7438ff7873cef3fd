//! Exact diagonalization of the untransformed model with a few discrete bath
//! modes.
//!
//! ```text
//! H = Δ_A/2 σx^A + g₀ σz^A σz^B + Δ_B/2 σx^B
//!     + Σ_k ω_k b_k†b_k + σz^B/2 Σ_k g_k (b_k + b_k†)
//! ```
//!
//! Each mode keeps occupations `0..=n_max`. Basis index is
//! `(2a + b)·(n_max + 1)^K + m` with `a, b = 0` for `σz = +1` and `m` the
//! mixed-radix occupation number of the modes.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dynamics::{Method, PopulationTrace};
use crate::fmath::{abs, cos, exp, sin, sqrt};
use crate::numerics::{bracketed_root, integrate_with_breaks, QuadratureSpec};
use crate::renorm::solve_eta_discrete;
use crate::spectral::SpectralDensity;
use crate::{Error, SystemParams, Temperature};

/// Largest Hilbert space the oracle will build.
pub const DIMENSION_LIMIT: usize = 200_000;

/// Largest dimension for the finite-temperature correlator.
pub const THERMAL_DIMENSION_LIMIT: usize = 4096;

/// Discrete bath: `(ω_k, g_k)` pairs and the occupation cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedBath {
    pub modes: Vec<(f64, f64)>,
    pub n_max: usize,
}

impl DiscretizedBath {
    pub fn new(modes: Vec<(f64, f64)>, n_max: usize) -> Result<Self, Error> {
        if modes.iter().any(|&(w, g)| !(w > 0.0 && w.is_finite() && g.is_finite())) {
            return Err(Error::Domain("bath modes need finite ω_k > 0 and finite g_k"));
        }
        Ok(Self { modes, n_max })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// `Σ g_k²`.
    pub fn total_weight(&self) -> f64 {
        self.modes.iter().map(|&(_, g)| g * g).sum()
    }

    /// Hilbert space dimension with (`4·(n_max+1)^K`) or without
    /// (`2·(n_max+1)^K`) the qubit.
    pub fn dimension(&self, with_qubit: bool) -> Result<usize, Error> {
        let spins = if with_qubit { 4 } else { 2 };
        let dim = (self.n_max + 1)
            .checked_pow(self.modes.len() as u32)
            .and_then(|d| d.checked_mul(spins))
            .unwrap_or(usize::MAX);
        if dim > DIMENSION_LIMIT {
            return Err(Error::DimensionGuard {
                dim,
                limit: DIMENSION_LIMIT,
            });
        }
        Ok(dim)
    }

    fn bath_dimension(&self) -> usize {
        (self.n_max + 1).pow(self.modes.len() as u32)
    }
}

/// Split `[0, Ω_max]` into `k` cells of equal `∫J`; each cell becomes one
/// mode at its weight centroid with `g² = ` cell weight.
pub fn discretize_bath<J: SpectralDensity + ?Sized>(
    j: &J,
    k: usize,
    omega_max: f64,
    n_max: usize,
) -> Result<DiscretizedBath, Error> {
    if k == 0 {
        return Err(Error::Domain("need at least one bath mode"));
    }
    if !(omega_max > 0.0) {
        return Err(Error::Domain("cutoff must be positive"));
    }
    let spec = QuadratureSpec::default().with_tolerances(1e-15, 1e-12);
    let breaks = j.breakpoints();
    let weight = |a: f64, b: f64| integrate_with_breaks(|w| j.eval(w), a, b, breaks, &spec).map(|r| r.value);
    let total = weight(0.0, omega_max)?;
    if !(total > 0.0) {
        return Err(Error::Degenerate("spectral density has zero total weight"));
    }
    let mut edges = alloc::vec![0.0];
    for i in 1..k {
        let target = total * i as f64 / k as f64;
        let mut err = None;
        let x = bracketed_root(
            |x| match weight(0.0, x) {
                Ok(v) => v - target,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            0.0,
            omega_max,
            1e-14 * total,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        edges.push(x);
    }
    edges.push(omega_max);
    let mut modes = Vec::with_capacity(k);
    for w in edges.windows(2) {
        let cell = weight(w[0], w[1])?;
        let first = integrate_with_breaks(|x| x * j.eval(x), w[0], w[1], breaks, &spec)?.value;
        modes.push((first / cell, sqrt(cell)));
    }
    DiscretizedBath::new(modes, n_max)
}

/// A spectral line: frequency and weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub omega: f64,
    pub weight: f64,
}

/// Sort by frequency and merge lines closer than `tol·(1 + |ω|)`; lines with
/// `|weight| < cutoff` are dropped afterwards.
pub fn merge_lines(mut lines: Vec<Line>, tol: f64, cutoff: f64) -> Vec<Line> {
    lines.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    let mut out: Vec<Line> = Vec::with_capacity(lines.len());
    for l in lines {
        match out.last_mut() {
            Some(last) if l.omega - last.omega < tol * (1.0 + abs(last.omega)) => {
                last.weight += l.weight;
            }
            _ => out.push(l),
        }
    }
    out.retain(|l| abs(l.weight) >= cutoff);
    out
}

/// The line of largest weight.
pub fn dominant_line(lines: &[Line]) -> Option<Line> {
    lines.iter().copied().max_by(|a, b| a.weight.total_cmp(&b.weight))
}

/// The `n` heaviest lines, ascending in frequency.
pub fn strongest_lines(lines: &[Line], n: usize) -> Vec<Line> {
    let mut v = lines.to_vec();
    v.sort_by(|a, b| b.weight.total_cmp(&a.weight));
    v.truncate(n);
    v.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    v
}

/// Real Hamiltonian on the truncated space; the qubit is included when
/// `qubit = Some((Δ_A, g₀))`.
pub fn hamiltonian(
    bath: &DiscretizedBath,
    delta_b: f64,
    qubit: Option<(f64, f64)>,
) -> Result<DMatrix<f64>, Error> {
    let dim = bath.dimension(qubit.is_some())?;
    let nb = bath.bath_dimension();
    let radix = bath.n_max + 1;
    let spins = dim / nb;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let z = |bit: usize| if bit == 0 { 1.0 } else { -1.0 };
    for s in 0..spins {
        let (a, b) = (s / 2, s % 2);
        let zb = z(b);
        let zz = match qubit {
            Some((_, g0)) => g0 * z(a) * zb,
            None => 0.0,
        };
        for m in 0..nb {
            let i = s * nb + m;
            let mut diag = zz;
            let mut stride = 1;
            for &(w, g) in &bath.modes {
                let n = (m / stride) % radix;
                diag += w * n as f64;
                if n < bath.n_max {
                    let jdx = i + stride;
                    let v = 0.5 * zb * g * sqrt((n + 1) as f64);
                    h[(i, jdx)] += v;
                    h[(jdx, i)] += v;
                }
                stride *= radix;
            }
            h[(i, i)] = diag;
            // σx^B flips b, σx^A flips a; fill the upper triangle pairs once
            if b == 0 {
                let jdx = (s + 1) * nb + m;
                h[(i, jdx)] = 0.5 * delta_b;
                h[(jdx, i)] = 0.5 * delta_b;
            }
            if let Some((delta_a, _)) = qubit {
                if a == 0 {
                    let jdx = (s + 2) * nb + m;
                    h[(i, jdx)] = 0.5 * delta_a;
                    h[(jdx, i)] = 0.5 * delta_a;
                }
            }
        }
    }
    Ok(h)
}

/// A diagonalized Hamiltonian.
#[derive(Debug, Clone)]
pub struct ExactModel {
    pub hamiltonian: DMatrix<f64>,
    pub energies: DVector<f64>,
    /// Eigenvectors as columns, in the order of `energies`.
    pub vectors: DMatrix<f64>,
}

impl ExactModel {
    pub fn new(hamiltonian: DMatrix<f64>) -> Self {
        let eig = hamiltonian.clone().symmetric_eigen();
        Self {
            hamiltonian,
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    pub fn dimension(&self) -> usize {
        self.energies.len()
    }

    pub fn ground_index(&self) -> usize {
        self.energies.imin()
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[self.ground_index()]
    }

    pub fn ground_state(&self) -> DVector<f64> {
        self.vectors.column(self.ground_index()).into_owned()
    }

    /// `e^{−iHt}ψ₀` for a real initial state.
    pub fn evolve(&self, psi0: &DVector<f64>, t: f64) -> Vec<Complex64> {
        let c = self.vectors.tr_mul(psi0);
        let re = DVector::from_iterator(c.len(), c.iter().zip(self.energies.iter()).map(|(c, e)| c * cos(e * t)));
        let im = DVector::from_iterator(c.len(), c.iter().zip(self.energies.iter()).map(|(c, e)| -c * sin(e * t)));
        let re = &self.vectors * re;
        let im = &self.vectors * im;
        re.iter().zip(im.iter()).map(|(&r, &i)| Complex64::new(r, i)).collect()
    }

    /// `⟨ψ|H|ψ⟩` evaluated in the original basis.
    pub fn energy_of(&self, psi: &[Complex64]) -> f64 {
        let re = DVector::from_iterator(psi.len(), psi.iter().map(|c| c.re));
        let im = DVector::from_iterator(psi.len(), psi.iter().map(|c| c.im));
        re.dot(&(&self.hamiltonian * &re)) + im.dot(&(&self.hamiltonian * &im))
    }
}

const MERGE_TOL: f64 = 1e-10;
const LINE_CUTOFF: f64 = 1e-14;

fn sigma_z_on(vec: &DVector<f64>, block: usize) -> DVector<f64> {
    // blocks of `block` entries alternate σz = +1, −1
    DVector::from_iterator(
        vec.len(),
        vec.iter()
            .enumerate()
            .map(|(i, v)| if (i / block).is_multiple_of(2) { *v } else { -*v }),
    )
}

/// Lines of the fluctuator correlator `⟨σz^B(t)σz^B⟩ = Σ w e^{−iωt}` for the
/// fluctuator and bath alone.
pub fn tlf_correlator_lines(
    bath: &DiscretizedBath,
    delta_b: f64,
    temperature: Temperature,
) -> Result<Vec<Line>, Error> {
    let model = ExactModel::new(hamiltonian(bath, delta_b, None)?);
    let nb = bath.bath_dimension();
    let e0 = model.ground_energy();
    let mut lines = Vec::new();
    let mut push_from = |m: usize, p: f64| {
        let zv = sigma_z_on(&model.vectors.column(m).into_owned(), nb);
        let amp = model.vectors.tr_mul(&zv);
        for (n, a) in amp.iter().enumerate() {
            lines.push(Line {
                omega: model.energies[n] - model.energies[m],
                weight: p * a * a,
            });
        }
    };
    match temperature.beta() {
        None => push_from(model.ground_index(), 1.0),
        Some(beta) => {
            if model.dimension() > THERMAL_DIMENSION_LIMIT {
                return Err(Error::DimensionGuard {
                    dim: model.dimension(),
                    limit: THERMAL_DIMENSION_LIMIT,
                });
            }
            let boltz: Vec<f64> = model.energies.iter().map(|e| exp(-beta * (e - e0))).collect();
            let z: f64 = boltz.iter().sum();
            for (m, b) in boltz.iter().enumerate() {
                let p = b / z;
                if p > LINE_CUTOFF {
                    push_from(m, p);
                }
            }
        }
    }
    Ok(merge_lines(lines, MERGE_TOL, LINE_CUTOFF))
}

/// Exact fluctuator correlator at the given times.
pub fn exact_tlf_correlator(
    bath: &DiscretizedBath,
    delta_b: f64,
    temperature: Temperature,
    times: &[f64],
) -> Result<Vec<Complex64>, Error> {
    let lines = tlf_correlator_lines(bath, delta_b, temperature)?;
    Ok(times
        .iter()
        .map(|&t| {
            lines
                .iter()
                .map(|l| Complex64::new(l.weight * cos(l.omega * t), -l.weight * sin(l.omega * t)))
                .sum()
        })
        .collect())
}

/// Full model and its initial state `|↑z⟩_A ⊗ |ground of fluctuator + bath⟩`.
pub fn qubit_model(bath: &DiscretizedBath, params: &SystemParams) -> Result<(ExactModel, DVector<f64>), Error> {
    params.validate()?;
    if params.temperature != Temperature::Zero {
        return Err(Error::Domain("exact population is only defined at T = 0"));
    }
    let full = hamiltonian(bath, params.delta_b, Some((params.delta_a, params.g0)))?;
    let sub = ExactModel::new(hamiltonian(bath, params.delta_b, None)?);
    let g = sub.ground_state();
    let mut psi0 = DVector::<f64>::zeros(full.nrows());
    psi0.rows_mut(0, g.len()).copy_from(&g);
    Ok((ExactModel::new(full), psi0))
}

/// Lines of `P(t) = ⟨σz^A(t)⟩ = Σ w cos ωt`, with `ω ≥ 0`.
pub fn population_lines(bath: &DiscretizedBath, params: &SystemParams) -> Result<Vec<Line>, Error> {
    let (model, psi0) = qubit_model(bath, params)?;
    let block = 2 * bath.bath_dimension();
    let c = model.vectors.tr_mul(&psi0);
    let active: Vec<usize> = (0..c.len()).filter(|&m| abs(c[m]) > 1e-12).collect();
    let mut lines = Vec::with_capacity(active.len() * active.len());
    for (i, &m) in active.iter().enumerate() {
        let zv = sigma_z_on(&model.vectors.column(m).into_owned(), block);
        for &n in &active[i..] {
            let mz = model.vectors.column(n).dot(&zv);
            let w = c[m] * c[n] * mz;
            let factor = if m == n { 1.0 } else { 2.0 };
            lines.push(Line {
                omega: abs(model.energies[m] - model.energies[n]),
                weight: factor * w,
            });
        }
    }
    Ok(merge_lines(lines, MERGE_TOL, LINE_CUTOFF))
}

/// `P(t)` by exact unitary evolution.
pub fn exact_population(bath: &DiscretizedBath, params: &SystemParams, times: &[f64]) -> Result<PopulationTrace, Error> {
    let lines = population_lines(bath, params)?;
    let values = times
        .iter()
        .map(|&t| lines.iter().map(|l| l.weight * cos(l.omega * t)).sum())
        .collect();
    Ok(PopulationTrace {
        times: times.to_vec(),
        values,
        method: Method::Oracle,
        weight: None,
    })
}

/// Poles of the fluctuator Green's function with the mode sums kept
/// discrete.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePoles {
    pub eta: f64,
    /// Pole positions with their residues `1/(1 + Σ V_k²c_k/(ω − ω_k)²)`.
    pub poles: Vec<Line>,
}

impl DiscretePoles {
    pub fn dominant(&self) -> Line {
        dominant_line(&self.poles).expect("at least one pole")
    }
}

/// Roots of `ω − ηΔ_B − Σ_k V_k² coth(βω_k/2)/(ω − ω_k)` with
/// `V_k = g_k ηΔ_B/(ω_k + ηΔ_B)`, one per interval between the mode
/// frequencies.
pub fn formula_on_discrete_modes(bath: &DiscretizedBath, params: &SystemParams) -> Result<DiscretePoles, Error> {
    let eta = solve_eta_discrete(&bath.modes, params, 1e-13)?.eta;
    let shift = eta * params.delta_b;
    let mut terms: Vec<(f64, f64)> = bath
        .modes
        .iter()
        .filter(|&&(_, g)| g != 0.0)
        .map(|&(w, g)| {
            let v = g * shift / (w + shift);
            (w, v * v * params.temperature.coth_half(w))
        })
        .collect();
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let f = |x: f64| x - shift - terms.iter().map(|&(w, s)| s / (x - w)).sum::<f64>();
    let residue = |x: f64| {
        let d: f64 = terms.iter().map(|&(w, s)| s / ((x - w) * (x - w))).sum();
        1.0 / (1.0 + d)
    };

    let mut edges: Vec<Option<f64>> = alloc::vec![None];
    edges.extend(terms.iter().map(|&(w, _)| Some(w)));
    edges.push(None);
    let mut poles = Vec::new();
    for pair in edges.windows(2) {
        let lo = match pair[0] {
            Some(w) => w + 1e-12 * (1.0 + w),
            None => {
                let base = pair[1].unwrap_or(shift).min(shift);
                let mut s = 1.0;
                while f(base - s) >= 0.0 {
                    s *= 2.0;
                }
                base - s
            }
        };
        let hi = match pair[1] {
            Some(w) => w - 1e-12 * (1.0 + w),
            None => {
                let base = pair[0].unwrap_or(shift).max(shift);
                let mut s = 1.0;
                while f(base + s) <= 0.0 {
                    s *= 2.0;
                }
                base + s
            }
        };
        if f(lo) < 0.0 && f(hi) > 0.0 {
            let x = bracketed_root(f, lo, hi, 1e-15)?;
            poles.push(Line {
                omega: x,
                weight: residue(x),
            });
        }
    }
    Ok(DiscretePoles { eta, poles })
}
