//! Quantized spectra of the particle in the box.
//!
//! The spatial eigenvalue problem `HΨ = EΨ` with
//! `H = −iħc σz ∂x + mc² σx` reduces to `Ψ' = (i/ħc) Q Ψ`,
//! `Q = E σz − i mc² σy`, whose propagator across the box is the transfer
//! matrix `T(L; E)`. An energy is an eigenvalue iff `det(M − T(L; E)) = 0`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Complex2Matrix, Complex2Vector, PhysicalParams};
use crate::boundary::{is_self_adjoint, BoundaryCondition, MatrixBC, PhaseBC};
use crate::error::{Error, Result};
use crate::evolution::GridWaveFunction;

/// Refined roots must reach `|det(M − T)|` below this.
pub const ROOT_TOL: f64 = 1e-10;
/// Both singular values of `M − T` below this mark a two-dimensional null space.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Roots closer than this (in units of ħc/L) are the same eigenvalue.
pub const CLUSTER_TOL: f64 = 1e-9;

// Below this |w| the series forms of C(w), S(w) are used.
const SERIES_SWITCH: f64 = 1e-2;
const SERIES_TERMS: usize = 12;
const BISECTION_STEPS: usize = 200;
const GOLDEN_STEPS: usize = 200;
const MODULUS_ACCEPT: f64 = 1e-6;
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Energy range searched for eigenvalues, with the coarse-scan resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyWindow {
    pub e_min: f64,
    pub e_max: f64,
    pub scan_points: usize,
}

impl EnergyWindow {
    pub fn new(e_min: f64, e_max: f64, scan_points: usize) -> Result<Self> {
        let w = Self { e_min, e_max, scan_points };
        w.validate()?;
        Ok(w)
    }

    /// `[−half_width, half_width]`.
    pub fn symmetric(half_width: f64, scan_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, scan_points)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_min.is_finite() && self.e_max.is_finite() && self.e_min < self.e_max) {
            return Err(Error::InvalidWindow(format!("need E_min < E_max, got [{}, {}]", self.e_min, self.e_max)));
        }
        if self.scan_points < 64 {
            return Err(Error::InvalidWindow(format!("need at least 64 scan points, got {}", self.scan_points)));
        }
        Ok(())
    }

    pub fn contains(&self, e: f64) -> bool {
        e >= self.e_min && e <= self.e_max
    }

    pub fn grid_step(&self) -> f64 {
        (self.e_max - self.e_min) / (self.scan_points - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    /// Wavenumber carrying the sign of E: `E/ħc` when massless,
    /// `sign(E)·√(E² − m²c⁴)/ħc` otherwise (0 inside the gap).
    pub k: f64,
    pub energy: f64,
    /// `Ψ(0)`; the eigenfunction is `T(x; E)·amplitude`.
    pub amplitude: Complex2Vector,
    pub degeneracy_index: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumWarning {
    /// Two distinct roots lie closer than two grid steps.
    WindowTooCoarse { lower: f64, upper: f64, grid_step: f64 },
    /// Refinement stopped above [`ROOT_TOL`].
    UnconvergedRoot { energy: f64, residual: f64 },
    /// The caller solved a condition that failed the self-adjointness check.
    NotSelfAdjoint { residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Ascending in energy; degenerate partners are adjacent.
    pub pairs: Vec<Eigenpair>,
    pub window: EnergyWindow,
    pub bc: BoundaryCondition,
    pub params: PhysicalParams,
    pub warnings: Vec<SpectrumWarning>,
}

impl Spectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.energy).collect()
    }

    /// Distinct levels with their multiplicities.
    pub fn levels(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for p in &self.pairs {
            match out.last_mut() {
                Some((e, n)) if p.degeneracy_index > 0 && (*e - p.energy).abs() <= f64::EPSILON * e.abs().max(1.0) => {
                    *n += 1
                }
                _ => out.push((p.energy, 1)),
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Solve conditions that fail the self-adjointness check instead of
    /// rejecting them; a warning is attached to the spectrum.
    pub allow_non_self_adjoint: bool,
}

// C(w) = cos √w, S(w) = sin √w / √w, continued analytically to w < 0.
fn cs(w: f64) -> (f64, f64) {
    if w.abs() < SERIES_SWITCH {
        let (mut c, mut s) = (0.0, 0.0);
        let mut term_c = 1.0; // (−w)^n / (2n)!
        let mut term_s = 1.0; // (−w)^n / (2n+1)!
        for n in 0..SERIES_TERMS {
            c += term_c;
            s += term_s;
            let n = n as f64;
            term_c *= -w / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
            term_s *= -w / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
        }
        (c, s)
    } else if w > 0.0 {
        let r = w.sqrt();
        (r.cos(), r.sin() / r)
    } else {
        let r = (-w).sqrt();
        (r.cosh(), r.sinh() / r)
    }
}

// dC/dw and dS/dw.
fn cs_derivative(w: f64) -> (f64, f64) {
    let (c, s) = cs(w);
    let dc = -0.5 * s;
    let ds = if w.abs() < SERIES_SWITCH {
        // Σ_{n≥1} n (−1)^n w^{n−1} / (2n+1)!
        let mut sum = 0.0;
        let mut term = -1.0 / 6.0;
        for n in 1..SERIES_TERMS {
            sum += term;
            let nf = n as f64;
            term *= -w * (nf + 1.0) / (nf * (2.0 * nf + 2.0) * (2.0 * nf + 3.0));
        }
        sum
    } else {
        (c - s) / (2.0 * w)
    };
    (dc, ds)
}

fn generator(energy: f64, params: &PhysicalParams) -> Complex2Matrix {
    let mc2 = params.rest_energy();
    Complex2Matrix::sigma_z().scale_real(energy) - Complex2Matrix::sigma_y().scale(I * mc2)
}

/// `exp[(i x/ħc) Q]`, the propagator from 0 to x at energy E.
pub fn propagator(x: f64, energy: f64, params: &PhysicalParams) -> Complex2Matrix {
    if params.mass == 0.0 {
        let phase = energy * x / params.hbar_c();
        return Complex2Matrix::diag(Complex64::from_polar(1.0, phase), Complex64::from_polar(1.0, -phase));
    }
    let mc2 = params.rest_energy();
    let scale = x / params.hbar_c();
    let w = (energy * energy - mc2 * mc2) * scale * scale;
    let (c, s) = cs(w);
    Complex2Matrix::identity().scale_real(c) + generator(energy, params).scale(I * (scale * s))
}

/// `∂/∂E exp[(i x/ħc) Q]`.
pub fn propagator_energy_derivative(x: f64, energy: f64, params: &PhysicalParams) -> Complex2Matrix {
    let scale = x / params.hbar_c();
    if params.mass == 0.0 {
        let phase = energy * scale;
        return Complex2Matrix::diag(
            I * scale * Complex64::from_polar(1.0, phase),
            -I * scale * Complex64::from_polar(1.0, -phase),
        );
    }
    let mc2 = params.rest_energy();
    let w = (energy * energy - mc2 * mc2) * scale * scale;
    let dw = 2.0 * energy * scale * scale;
    let (_, s) = cs(w);
    let (dc, ds) = cs_derivative(w);
    Complex2Matrix::identity().scale_real(dc * dw)
        + generator(energy, params).scale(I * (scale * ds * dw))
        + Complex2Matrix::sigma_z().scale(I * (scale * s))
}

/// The transfer matrix `T(L; E)` across the whole box.
pub fn transfer_matrix(energy: f64, params: &PhysicalParams) -> Complex2Matrix {
    propagator(params.length, energy, params)
}

/// `det(M − T(L; E))`; zero exactly at eigenvalues.
pub fn quantization_residual(energy: f64, bc: &MatrixBC, params: &PhysicalParams) -> Complex64 {
    (*bc.matrix() - transfer_matrix(energy, params)).det()
}

fn quantization_residual_derivative(energy: f64, bc: &MatrixBC, params: &PhysicalParams) -> Complex64 {
    let a = *bc.matrix() - transfer_matrix(energy, params);
    let da = -propagator_energy_derivative(params.length, energy, params);
    da.m11 * a.m22 + a.m11 * da.m22 - da.m12 * a.m21 - a.m12 * da.m21
}

/// Signed wavenumber associated with an energy (see [`Eigenpair::k`]).
pub fn wavenumber(energy: f64, params: &PhysicalParams) -> f64 {
    if params.mass == 0.0 {
        return energy / params.hbar_c();
    }
    let mc2 = params.rest_energy();
    let q = (energy * energy - mc2 * mc2).max(0.0).sqrt();
    q.copysign(energy) / params.hbar_c()
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_STEPS {
        if b - a <= f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Finds the eigenvalues of `bc` inside `window`; rejects conditions that are
/// not self-adjoint.
pub fn solve_spectrum(bc: &MatrixBC, window: &EnergyWindow, params: &PhysicalParams) -> Result<Spectrum> {
    solve_spectrum_with(bc, window, params, &SolveOptions::default())
}

pub fn solve_spectrum_with(
    bc: &MatrixBC,
    window: &EnergyWindow,
    params: &PhysicalParams,
    options: &SolveOptions,
) -> Result<Spectrum> {
    window.validate()?;
    params.validate()?;
    let sa = is_self_adjoint(bc);
    let mut warnings = Vec::new();
    if !sa.passed {
        if !options.allow_non_self_adjoint {
            return Err(Error::NotSelfAdjoint { residual: sa.residual });
        }
        warnings.push(SpectrumWarning::NotSelfAdjoint { residual: sa.residual });
    }

    let step = window.grid_step();
    let grid: Vec<f64> = (0..window.scan_points)
        .map(|j| if j + 1 == window.scan_points { window.e_max } else { window.e_min + j as f64 * step })
        .collect();
    let candidates =
        if sa.passed { real_root_candidates(bc, params, &grid) } else { modulus_root_candidates(bc, params, &grid) };

    let cluster = CLUSTER_TOL * params.energy_unit();
    let mut roots: Vec<(f64, f64)> = candidates
        .into_iter()
        .filter(|&e| window.contains(e))
        .map(|e| (e, quantization_residual(e, bc, params).norm()))
        .collect();
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (e, r) in roots {
        match merged.last_mut() {
            Some(last) if e - last.0 <= cluster => {
                if r < last.1 {
                    *last = (e, r);
                }
            }
            _ => merged.push((e, r)),
        }
    }

    let mut pairs = Vec::new();
    for (energy, residual) in &merged {
        if *residual >= ROOT_TOL {
            warnings.push(SpectrumWarning::UnconvergedRoot { energy: *energy, residual: *residual });
        }
        pairs.extend(eigenpairs_at(*energy, bc, params));
    }
    for w in merged.windows(2) {
        if w[1].0 - w[0].0 < 2.0 * step {
            warnings.push(SpectrumWarning::WindowTooCoarse { lower: w[0].0, upper: w[1].0, grid_step: step });
        }
    }

    Ok(Spectrum { pairs, window: *window, bc: BoundaryCondition::Matrix(*bc), params: *params, warnings })
}

// For self-adjoint M both M and T lie in U(1,1), so e^{−iα/2} det(M − T) is
// real with α = arg det M. Simple roots are sign changes of that function;
// double roots are tangent zeros, found as sign changes of its derivative.
fn real_root_candidates(bc: &MatrixBC, params: &PhysicalParams, grid: &[f64]) -> Vec<f64> {
    let rot = Complex64::from_polar(1.0, -0.5 * bc.matrix().det().arg());
    let g = |e: f64| (rot * quantization_residual(e, bc, params)).re;
    let dg = |e: f64| (rot * quantization_residual_derivative(e, bc, params)).re;
    let node_tol = 1e-3 * ROOT_TOL;

    let gv: Vec<f64> = grid.iter().map(|&e| g(e)).collect();
    let dv: Vec<f64> = grid.iter().map(|&e| dg(e)).collect();
    let mut out = Vec::new();
    for j in 0..grid.len() {
        if quantization_residual(grid[j], bc, params).norm() < node_tol {
            out.push(grid[j]);
        }
        if j + 1 == grid.len() {
            break;
        }
        let (a, b) = (grid[j], grid[j + 1]);
        if dv[j] * dv[j + 1] < 0.0 {
            // An extremum inside the cell: either a tangent zero, or it
            // separates up to two simple roots that the nodes cannot see.
            let e = bisect(dg, a, b);
            if quantization_residual(e, bc, params).norm() < ROOT_TOL {
                out.push(e);
            } else {
                let ge = g(e);
                if gv[j] * ge < 0.0 {
                    out.push(bisect(g, a, e));
                }
                if ge * gv[j + 1] < 0.0 {
                    out.push(bisect(g, e, b));
                }
            }
        } else if gv[j] * gv[j + 1] < 0.0 {
            out.push(bisect(g, a, b));
        }
    }
    out
}

fn modulus_root_candidates(bc: &MatrixBC, params: &PhysicalParams, grid: &[f64]) -> Vec<f64> {
    let f = |e: f64| quantization_residual(e, bc, params).norm();
    let fv: Vec<f64> = grid.iter().map(|&e| f(e)).collect();
    let mut out = Vec::new();
    for j in 0..grid.len() {
        let left = if j == 0 { f64::INFINITY } else { fv[j - 1] };
        let right = if j + 1 == grid.len() { f64::INFINITY } else { fv[j + 1] };
        if fv[j] <= left && fv[j] <= right {
            let lo = grid[j.saturating_sub(1)];
            let hi = grid[(j + 1).min(grid.len() - 1)];
            let e = golden_min(f, lo, hi);
            // Golden section only locates the minimum to ~√ε, so accept a
            // looser residual here and let the caller see the warning.
            if f(e) < MODULUS_ACCEPT {
                out.push(e);
            }
        }
    }
    out
}

// Null space of M − T(L; E) at a refined root.
fn eigenpairs_at(energy: f64, bc: &MatrixBC, params: &PhysicalParams) -> Vec<Eigenpair> {
    let a = *bc.matrix() - transfer_matrix(energy, params);
    let k = wavenumber(energy, params);
    let (hi, _) = a.singular_values();
    if hi < DEGENERACY_TOL {
        return [Complex2Vector::from_real(1.0, 0.0), Complex2Vector::from_real(0.0, 1.0)]
            .into_iter()
            .enumerate()
            .map(|(i, amplitude)| Eigenpair { k, energy, amplitude, degeneracy_index: i as u8 })
            .collect();
    }
    // The row with the larger norm spans the row space; (−b, a) annihilates it.
    let row1 = a.m11.norm_sqr() + a.m12.norm_sqr();
    let row2 = a.m21.norm_sqr() + a.m22.norm_sqr();
    let (r1, r2) = if row1 >= row2 { (a.m11, a.m12) } else { (a.m21, a.m22) };
    let amplitude =
        Complex2Vector::new(-r2, r1).normalized_canonical(1e-12).expect("nonzero row gives a nonzero null vector");
    vec![Eigenpair { k, energy, amplitude, degeneracy_index: 0 }]
}

/// Spectrum of a single Weyl component `h_a = −iħc(−1)^{a−1}∂x` under
/// `φ_a(L) = e^{iθ} φ_a(0)`: `E_n = (−1)^{a−1} ħc (θ + 2πn)/L`, all simple.
pub fn weyl_spectrum(pbc: &PhaseBC, window: &EnergyWindow, params: &PhysicalParams) -> Result<Spectrum> {
    window.validate()?;
    params.validate()?;
    let sign = pbc.branch().sign();
    let unit = params.energy_unit();
    let theta = pbc.theta();
    // E_n/unit = sign·(θ + 2πn) ∈ [e_min, e_max] / unit.
    let (lo, hi) = if sign > 0.0 {
        (window.e_min / unit, window.e_max / unit)
    } else {
        (-window.e_max / unit, -window.e_min / unit)
    };
    let n_lo = ((lo - theta) / TAU).floor() as i64 - 1;
    let n_hi = ((hi - theta) / TAU).ceil() as i64 + 1;
    let amplitude = match pbc.branch() {
        crate::boundary::WeylBranch::Upper => Complex2Vector::from_real(1.0, 0.0),
        crate::boundary::WeylBranch::Lower => Complex2Vector::from_real(0.0, 1.0),
    };
    let mut pairs: Vec<Eigenpair> = (n_lo..=n_hi)
        .map(|n| sign * unit * (theta + TAU * n as f64))
        .filter(|&e| window.contains(e))
        .map(|energy| Eigenpair { k: energy / params.hbar_c(), energy, amplitude, degeneracy_index: 0 })
        .collect();
    pairs.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(Spectrum { pairs, window: *window, bc: BoundaryCondition::Phase(*pbc), params: *params, warnings: Vec::new() })
}

/// Samples `Ψ(x) = T(x; E)·amplitude` on `grid_points + 1` nodes covering
/// `[0, L]` and normalizes it by trapezoid quadrature. Phase conditions use
/// the massless propagator since Weyl components carry no mass.
pub fn eigenfunction(
    pair: &Eigenpair,
    bc: &BoundaryCondition,
    params: &PhysicalParams,
    grid_points: usize,
) -> Result<GridWaveFunction> {
    let prop_params = match bc {
        BoundaryCondition::Matrix(_) => *params,
        BoundaryCondition::Phase(_) => params.with_mass(0.0),
    };
    let h = params.length / grid_points as f64;
    let samples: Vec<Complex2Vector> = (0..=grid_points)
        .map(|j| {
            let x = if j == grid_points { params.length } else { j as f64 * h };
            propagator(x, pair.energy, &prop_params) * pair.amplitude
        })
        .collect();
    GridWaveFunction::new(samples, *params)?.normalized()
}
