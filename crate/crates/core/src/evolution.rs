//! Sampled states on the box, Majorana-constrained state construction,
//! eigenbasis time evolution and observables.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{charge_conjugate, Complex2Vector, PhysicalParams};
use crate::boundary::{is_chirality_preserving, is_majorana_compatible, is_self_adjoint, BoundaryCondition, MatrixBC};
use crate::error::{Error, Result};
use crate::spectral::{eigenfunction, solve_spectrum, EnergyWindow, Spectrum};

pub const MIN_GRID: usize = 16;
pub const DEFAULT_GRID: usize = 256;
/// Default mode window half-width in units of ħc/L.
pub const DEFAULT_MODE_WINDOW: f64 = 40.0;
pub const DEFAULT_SCAN_POINTS: usize = 8000;
/// Expansions losing more norm than this carry a warning.
pub const TRUNCATION_WARN: f64 = 1e-6;
/// Slack added to the truncation error when judging conservation laws.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Two-component wave function sampled at `x_j = jL/N`, `j = 0..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridWaveFunction {
    samples: Vec<Complex2Vector>,
    params: PhysicalParams,
}

impl GridWaveFunction {
    pub fn new(samples: Vec<Complex2Vector>, params: PhysicalParams) -> Result<Self> {
        params.validate()?;
        if samples.len() < MIN_GRID + 1 {
            return Err(Error::InvalidGrid(format!(
                "need N >= {MIN_GRID} intervals, got {}",
                samples.len().saturating_sub(1)
            )));
        }
        if !samples.iter().all(Complex2Vector::is_finite) {
            return Err(Error::InvalidGrid("samples must be finite".into()));
        }
        Ok(Self { samples, params })
    }

    /// Samples `f(x)` on the uniform grid with `grid_points` intervals.
    pub fn from_fn<F: Fn(f64) -> Complex2Vector>(grid_points: usize, params: PhysicalParams, f: F) -> Result<Self> {
        let h = params.length / grid_points as f64;
        let samples =
            (0..=grid_points).map(|j| f(if j == grid_points { params.length } else { j as f64 * h })).collect();
        Self::new(samples, params)
    }

    pub fn samples(&self) -> &[Complex2Vector] {
        &self.samples
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    /// Number of intervals N.
    pub fn grid_size(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn spacing(&self) -> f64 {
        self.params.length / self.grid_size() as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..=self.grid_size()).map(|j| j as f64 * h).collect()
    }

    fn weight(&self, j: usize) -> f64 {
        let h = self.spacing();
        if j == 0 || j == self.grid_size() {
            0.5 * h
        } else {
            h
        }
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.samples.len() == other.samples.len() && self.params.length == other.params.length
    }

    /// `⟨self, other⟩ = ∫ self† other dx` by the trapezoid rule.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if !self.same_grid(other) {
            return Err(Error::Incompatible("inner product of states on different grids".into()));
        }
        Ok(self.samples.iter().zip(&other.samples).enumerate().map(|(j, (a, b))| a.dot(b) * self.weight(j)).sum())
    }

    /// Trapezoid approximation of `∫ f(x) dx` for per-sample values.
    pub fn integrate(&self, values: impl Iterator<Item = f64>) -> f64 {
        values.enumerate().map(|(j, v)| v * self.weight(j)).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.integrate(self.samples.iter().map(Complex2Vector::norm_sqr))
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::ZeroState);
        }
        Ok(self.map(|s| s.scale(Complex64::new(1.0 / n, 0.0))))
    }

    pub fn map<F: Fn(&Complex2Vector) -> Complex2Vector>(&self, f: F) -> Self {
        Self { samples: self.samples.iter().map(f).collect(), params: self.params }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|v| v.scale(s))
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, s: Complex64, other: &Self) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::Incompatible("sum of states on different grids".into()));
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| *a + b.scale(s)).collect();
        Ok(Self { samples, params: self.params })
    }

    pub fn zeros_like(&self) -> Self {
        self.map(|_| Complex2Vector::zero())
    }

    /// Pointwise `S_C Ψ*`.
    pub fn charge_conjugate(&self, nu: f64) -> Self {
        self.map(|s| charge_conjugate(s, nu))
    }

    /// Endpoint mismatch of the boundary condition: `‖Ψ(L) − MΨ(0)‖` or the
    /// one-component analogue on the conditioned branch.
    pub fn boundary_residual(&self, bc: &BoundaryCondition) -> f64 {
        let first = self.samples[0];
        let last = self.samples[self.grid_size()];
        match bc {
            BoundaryCondition::Matrix(m) => (last - *m.matrix() * first).norm(),
            BoundaryCondition::Phase(p) => {
                let (a, b) = match p.branch() {
                    crate::boundary::WeylBranch::Upper => (first.c1, last.c1),
                    crate::boundary::WeylBranch::Lower => (first.c2, last.c2),
                };
                (b - p.factor() * a).norm()
            }
        }
    }
}

/// `φ1 = e^{iν/2} u`, `φ2 = e^{i(ν+π)/2} v` for real samples u, v, normalized
/// to unit L² norm. Such a state equals its charge conjugate `e^{iν}σz Ψ*`.
pub fn make_majorana_state(u: &[f64], v: &[f64], nu: f64, params: &PhysicalParams) -> Result<GridWaveFunction> {
    if u.len() != v.len() {
        return Err(Error::InvalidGrid(format!("u has {} samples, v has {}", u.len(), v.len())));
    }
    if u.iter().chain(v).all(|&x| x == 0.0) {
        return Err(Error::ZeroState);
    }
    let p1 = Complex64::from_polar(1.0, 0.5 * nu);
    let p2 = Complex64::from_polar(1.0, 0.5 * (nu + std::f64::consts::PI));
    let samples = u.iter().zip(v).map(|(&a, &b)| Complex2Vector::new(p1 * a, p2 * b)).collect();
    GridWaveFunction::new(samples, *params)?.normalized()
}

/// `(Ψ + S_C Ψ*)/2`, the Majorana part of a state.
pub fn majorana_part(state: &GridWaveFunction, nu: f64) -> GridWaveFunction {
    let conj = state.charge_conjugate(nu);
    let samples =
        state.samples.iter().zip(&conj.samples).map(|(a, b)| (*a + *b).scale(Complex64::new(0.5, 0.0))).collect();
    GridWaveFunction { samples, params: state.params }
}

/// The real data `(u, v)` with `φ1 = e^{iν/2}u`, `φ2 = e^{i(ν+π)/2}v`; exact
/// for Majorana states, the Majorana part otherwise.
pub fn majorana_components(state: &GridWaveFunction, nu: f64) -> (Vec<f64>, Vec<f64>) {
    let back = Complex64::from_polar(1.0, -0.5 * nu);
    state.samples.iter().map(|s| ((back * s.c1).re, (back * s.c2).im)).unzip()
}

/// Which chiral part of a generated state to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiralContent {
    Both,
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExpansionWarning {
    /// More than [`TRUNCATION_WARN`] of the norm lies outside the mode window.
    WindowTooSmall { truncation_error: f64 },
}

/// A state written in the eigenbasis of a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeExpansion {
    pub coefficients: Vec<Complex64>,
    pub spectrum: Spectrum,
    /// Relative norm deficit `1 − Σ|c_n|²/‖Ψ‖²`.
    pub truncation_error: f64,
    pub warnings: Vec<ExpansionWarning>,
    modes: Vec<GridWaveFunction>,
}

impl ModeExpansion {
    /// Wraps explicit coefficients, e.g. to synthesize a band-limited state.
    pub fn from_coefficients(spectrum: Spectrum, coefficients: Vec<Complex64>, grid_points: usize) -> Result<Self> {
        if coefficients.len() != spectrum.len() {
            return Err(Error::Incompatible(format!(
                "{} coefficients for {} modes",
                coefficients.len(),
                spectrum.len()
            )));
        }
        let modes = mode_basis(&spectrum, grid_points)?;
        Ok(Self { coefficients, spectrum, truncation_error: 0.0, warnings: Vec::new(), modes })
    }

    /// The orthonormalized mode functions aligned with `coefficients`.
    pub fn modes(&self) -> &[GridWaveFunction] {
        &self.modes
    }

    pub fn weight(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Eigenfunctions on the grid with degenerate partners Gram–Schmidt
/// orthonormalized in spectrum order.
pub fn mode_basis(spectrum: &Spectrum, grid_points: usize) -> Result<Vec<GridWaveFunction>> {
    let mut modes: Vec<GridWaveFunction> = Vec::with_capacity(spectrum.len());
    let mut group_start = 0;
    for (i, pair) in spectrum.pairs.iter().enumerate() {
        if pair.degeneracy_index == 0 {
            group_start = i;
        }
        let mut psi = eigenfunction(pair, &spectrum.bc, &spectrum.params, grid_points)?;
        for prev in &modes[group_start..i] {
            let overlap = prev.inner(&psi)?;
            psi = psi.add_scaled(-overlap, prev)?;
        }
        modes.push(psi.normalized()?);
    }
    Ok(modes)
}

/// `c_n = ⟨Ψ_n, Ψ⟩` over the spectrum's modes.
pub fn expand(state: &GridWaveFunction, spectrum: &Spectrum) -> Result<ModeExpansion> {
    if let BoundaryCondition::Matrix(bc) = &spectrum.bc {
        let sa = is_self_adjoint(bc);
        if !sa.passed {
            return Err(Error::NotSelfAdjoint { residual: sa.residual });
        }
    }
    if state.params.length != spectrum.params.length {
        return Err(Error::Incompatible(format!(
            "state box length {} differs from spectrum box length {}",
            state.params.length, spectrum.params.length
        )));
    }
    let modes = mode_basis(spectrum, state.grid_size())?;
    let coefficients = modes.iter().map(|m| m.inner(state)).collect::<Result<Vec<_>>>()?;
    let total = state.norm_sqr();
    if !(total > 0.0) {
        return Err(Error::ZeroState);
    }
    let captured: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
    let truncation_error = 1.0 - captured / total;
    let mut warnings = Vec::new();
    if truncation_error > TRUNCATION_WARN {
        warnings.push(ExpansionWarning::WindowTooSmall { truncation_error });
    }
    Ok(ModeExpansion { coefficients, spectrum: spectrum.clone(), truncation_error, warnings, modes })
}

/// `Ψ(x, t) = Σ c_n e^{−iE_n t/ħ} Ψ_n(x)`.
pub fn evolve(expansion: &ModeExpansion, t: f64) -> GridWaveFunction {
    let hbar = expansion.spectrum.params.hbar;
    let first = &expansion.modes[0];
    let mut samples = vec![Complex2Vector::zero(); first.samples.len()];
    for ((c, pair), mode) in expansion.coefficients.iter().zip(&expansion.spectrum.pairs).zip(&expansion.modes) {
        let amp = c * Complex64::from_polar(1.0, -pair.energy * t / hbar);
        for (acc, s) in samples.iter_mut().zip(&mode.samples) {
            *acc = *acc + s.scale(amp);
        }
    }
    GridWaveFunction { samples, params: first.params }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub norm: f64,
    pub j_at_0: f64,
    pub j_at_l: f64,
    /// `c(|φ1|² − |φ2|²)` at every grid node.
    pub j_profile: Vec<f64>,
    /// `⟨Ψ, Γ^5 Ψ⟩/‖Ψ‖²`.
    pub chirality: f64,
    /// `‖Ψ − S_C Ψ*‖/‖Ψ‖`.
    pub majorana_residual: f64,
}

pub fn observables(state: &GridWaveFunction, nu: f64) -> Observables {
    let c = state.params.c;
    let j_profile: Vec<f64> = state.samples.iter().map(|s| c * (s.c1.norm_sqr() - s.c2.norm_sqr())).collect();
    let norm_sqr = state.norm_sqr();
    let norm = norm_sqr.sqrt();
    let chirality_num = state.integrate(state.samples.iter().map(|s| s.c1.norm_sqr() - s.c2.norm_sqr()));
    let conj = state.charge_conjugate(nu);
    let diff = state.integrate(state.samples.iter().zip(&conj.samples).map(|(a, b)| (*a - *b).norm_sqr()));
    let (chirality, majorana_residual) =
        if norm > 0.0 { (chirality_num / norm_sqr, diff.sqrt() / norm) } else { (0.0, 0.0) };
    Observables {
        norm,
        j_at_0: j_profile[0],
        j_at_l: j_profile[j_profile.len() - 1],
        j_profile,
        chirality,
        majorana_residual,
    }
}

/// Random band-limited Majorana state conforming to the spectrum's boundary
/// condition: a seeded superposition of the modes with `|E| <= band`,
/// optionally restricted to one chirality, reduced to its Majorana part and
/// rebuilt through [`make_majorana_state`].
pub fn random_majorana_state(
    spectrum: &Spectrum,
    band: f64,
    content: ChiralContent,
    nu: f64,
    grid_points: usize,
    seed: u64,
) -> Result<GridWaveFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coefficients: Vec<Complex64> = spectrum
        .pairs
        .iter()
        .map(|p| {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if p.energy.abs() <= band {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let expansion = ModeExpansion::from_coefficients(spectrum.clone(), coefficients, grid_points)?;
    let state = evolve(&expansion, 0.0);
    let state = match content {
        ChiralContent::Both => state,
        ChiralContent::Plus => state.map(|s| Complex2Vector::new(s.c1, Complex64::new(0.0, 0.0))),
        ChiralContent::Minus => state.map(|s| Complex2Vector::new(Complex64::new(0.0, 0.0), s.c2)),
    };
    let (u, v) = majorana_components(&majorana_part(&state, nu), nu);
    make_majorana_state(&u, &v, nu, &spectrum.params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub sample_times: Vec<f64>,
    pub truncation_error: f64,
    pub max_norm_drift: f64,
    pub initial_majorana_residual: f64,
    pub max_majorana_residual: f64,
    pub max_majorana_growth: f64,
    pub max_current_mismatch: f64,
    /// Present when the condition preserves chirality.
    pub max_chirality_drift: Option<f64>,
    pub warnings: Vec<ExpansionWarning>,
    pub passed: bool,
}

/// Evolves Majorana initial data under `bc` with the default mode window
/// `|E| <= 40 ħc/L` and checks the conservation laws at `steps` times.
pub fn dynamical_consistency_check(
    bc: &MatrixBC,
    initial: &GridWaveFunction,
    nu: f64,
    t_final: f64,
    steps: usize,
) -> Result<ConsistencyReport> {
    let p = initial.params;
    let window = EnergyWindow::symmetric(DEFAULT_MODE_WINDOW * p.energy_unit(), DEFAULT_SCAN_POINTS)?;
    let spectrum = solve_spectrum(bc, &window, &p)?;
    dynamical_consistency_check_with(&spectrum, initial, nu, t_final, steps)
}

/// As [`dynamical_consistency_check`] with a precomputed spectrum.
pub fn dynamical_consistency_check_with(
    spectrum: &Spectrum,
    initial: &GridWaveFunction,
    nu: f64,
    t_final: f64,
    steps: usize,
) -> Result<ConsistencyReport> {
    let BoundaryCondition::Matrix(bc) = spectrum.bc else {
        return Err(Error::Incompatible("consistency check needs a two-component condition".into()));
    };
    let mc = is_majorana_compatible(&bc);
    if !mc.passed {
        return Err(Error::Incompatible(format!("condition is not Majorana compatible (residual {:e})", mc.residual)));
    }
    if steps == 0 {
        return Err(Error::InvalidGrid("need at least one sample time".into()));
    }
    let expansion = expand(initial, spectrum)?;
    let start = observables(initial, nu);
    let track_chirality = is_chirality_preserving(&bc).passed;

    let sample_times: Vec<f64> = (1..=steps).map(|i| t_final * i as f64 / steps as f64).collect();
    let (mut norm_drift, mut maj, mut current, mut chir) = (0.0_f64, start.majorana_residual, 0.0_f64, 0.0_f64);
    for &t in &sample_times {
        let obs = observables(&evolve(&expansion, t), nu);
        norm_drift = norm_drift.max((obs.norm - start.norm).abs());
        maj = maj.max(obs.majorana_residual);
        current = current.max((obs.j_at_l - obs.j_at_0).abs());
        chir = chir.max((obs.chirality - start.chirality).abs());
    }
    let bound = expansion.truncation_error.max(0.0) + CONSISTENCY_TOL;
    let max_chirality_drift = track_chirality.then_some(chir);
    let passed = norm_drift < bound && maj < bound && current < bound && max_chirality_drift.is_none_or(|d| d < bound);
    Ok(ConsistencyReport {
        sample_times,
        truncation_error: expansion.truncation_error,
        max_norm_drift: norm_drift,
        initial_majorana_residual: start.majorana_residual,
        max_majorana_residual: maj,
        max_majorana_growth: maj - start.majorana_residual,
        max_current_mismatch: current,
        max_chirality_drift,
        warnings: expansion.warnings,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{PI, TAU};

    use super::*;
    use crate::boundary::{family_one, NamedBC};

    fn natural() -> PhysicalParams {
        PhysicalParams::default()
    }

    fn periodic_spectrum(p: &PhysicalParams) -> Spectrum {
        let w = EnergyWindow::symmetric(DEFAULT_MODE_WINDOW, 4000).unwrap();
        solve_spectrum(&MatrixBC::named(NamedBC::Periodic), &w, p).unwrap()
    }

    #[test]
    fn grid_validation() {
        let p = natural();
        assert!(GridWaveFunction::new(vec![Complex2Vector::zero(); 16], p).is_err());
        assert!(GridWaveFunction::new(vec![Complex2Vector::zero(); 17], p).is_ok());
        let mut bad = vec![Complex2Vector::zero(); 17];
        bad[3].c1 = Complex64::new(f64::NAN, 0.0);
        assert!(GridWaveFunction::new(bad, p).is_err());
    }

    #[test]
    fn majorana_constant_upper() {
        let p = natural();
        let u = vec![2.0; 33];
        let v = vec![0.0; 33];
        let psi = make_majorana_state(&u, &v, 0.0, &p).unwrap();
        for s in psi.samples() {
            assert!(s.approx_eq(&Complex2Vector::from_real(1.0, 0.0), 1e-15));
        }
        assert_eq!(observables(&psi, 0.0).majorana_residual, 0.0);
    }

    #[test]
    fn majorana_constant_lower_is_imaginary() {
        let p = natural();
        let psi = make_majorana_state(&vec![0.0; 33], &vec![1.0; 33], 0.0, &p).unwrap();
        for s in psi.samples() {
            assert!(s.c2.re.abs() < 1e-16 && (s.c2.im - 1.0).abs() < 1e-15);
            assert!((s.c2 + s.c2.conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn majorana_random_data_with_reference_phase() {
        let p = natural();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u: Vec<f64> = (0..65).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..65).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let psi = make_majorana_state(&u, &v, 1.5 * PI, &p).unwrap();
        // Direct ‖Ψ − S_CΨ*‖ with S_C = diag(−i, i).
        let mut worst = 0.0_f64;
        for s in psi.samples() {
            let conj =
                Complex2Vector::new(Complex64::new(0.0, -1.0) * s.c1.conj(), Complex64::new(0.0, 1.0) * s.c2.conj());
            worst = worst.max((*s - conj).norm());
        }
        assert!(worst < 1e-14);
        assert!(observables(&psi, 1.5 * PI).majorana_residual < 1e-14);
        let (u2, v2) = majorana_components(&psi, 1.5 * PI);
        let scale = u2[0] / u[0];
        for j in 0..65 {
            assert!((u2[j] - scale * u[j]).abs() < 1e-13 && (v2[j] - scale * v[j]).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_majorana_data_rejected() {
        assert_eq!(make_majorana_state(&[0.0; 20], &[0.0; 20], 0.0, &natural()), Err(Error::ZeroState));
    }

    #[test]
    fn expansion_of_an_eigenfunction() {
        let p = natural();
        let s = periodic_spectrum(&p);
        let target = 5;
        let psi = mode_basis(&s, 128).unwrap()[target].clone();
        let e = expand(&psi, &s).unwrap();
        for (i, c) in e.coefficients.iter().enumerate() {
            let expect = if i == target { 1.0 } else { 0.0 };
            assert!((c.norm() - expect).abs() < 1e-10, "mode {i}: {c}");
        }
        assert!(e.truncation_error.abs() < 1e-10);
    }

    #[test]
    fn constant_majorana_state_populates_zero_modes() {
        let p = natural();
        let s = periodic_spectrum(&p);
        let psi = make_majorana_state(&vec![1.0; 129], &vec![0.5; 129], p.nu, &p).unwrap();
        let e = expand(&psi, &s).unwrap();
        for (c, pair) in e.coefficients.iter().zip(&s.pairs) {
            if pair.energy.abs() > 1e-9 {
                assert!(c.norm() < 1e-12);
            }
        }
        assert!(e.truncation_error.abs() < 1e-12);
    }

    #[test]
    fn superposition_of_two_modes() {
        let p = natural();
        let s = periodic_spectrum(&p);
        let modes = mode_basis(&s, 128).unwrap();
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let psi = modes[2].scale(r).add_scaled(r, &modes[9]).unwrap();
        let e = expand(&psi, &s).unwrap();
        for (i, c) in e.coefficients.iter().enumerate() {
            let expect = if i == 2 || i == 9 { std::f64::consts::FRAC_1_SQRT_2 } else { 0.0 };
            assert!((c.norm() - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn evolve_at_zero_and_stationary_mode() {
        let p = natural();
        let s = periodic_spectrum(&p);
        let psi = random_majorana_state(&s, 15.0, ChiralContent::Both, p.nu, 128, 3).unwrap();
        let e = expand(&psi, &s).unwrap();
        let back = evolve(&e, 0.0);
        for (a, b) in back.samples().iter().zip(psi.samples()) {
            assert!(a.approx_eq(b, 1e-12));
        }
        let mode = expand(&mode_basis(&s, 128).unwrap()[7], &s).unwrap();
        let d0 = observables(&evolve(&mode, 0.0), p.nu).j_profile;
        let d1 = observables(&evolve(&mode, 3.7), p.nu).j_profile;
        for (a, b) in d0.iter().zip(&d1) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn observables_of_simple_states() {
        let p = PhysicalParams { length: 2.0, ..natural() };
        let amp = 1.0 / p.length.sqrt();
        let right = GridWaveFunction::from_fn(64, p, |_| Complex2Vector::from_real(amp, 0.0)).unwrap();
        let o = observables(&right, 0.0);
        assert!((o.chirality - 1.0).abs() < 1e-14);
        assert!(o.j_profile.iter().all(|j| (j - p.c / p.length).abs() < 1e-14));
        assert!((o.norm - 1.0).abs() < 1e-14);
        let mixed = GridWaveFunction::from_fn(64, p, |_| Complex2Vector::from_real(1.0, 1.0)).unwrap();
        assert!(observables(&mixed, 0.0).chirality.abs() < 1e-15);
    }

    #[test]
    fn endpoint_currents_match_for_family_states() {
        let p = natural();
        let w = EnergyWindow::symmetric(DEFAULT_MODE_WINDOW, 4000).unwrap();
        let s = solve_spectrum(&family_one(0.6, 0.8).unwrap(), &w, &p).unwrap();
        let psi = random_majorana_state(&s, 20.0, ChiralContent::Both, p.nu, 256, 11).unwrap();
        let o = observables(&psi, p.nu);
        assert!((o.j_at_l - o.j_at_0).abs() < 1e-12);
    }

    #[test]
    fn rigid_transport_for_periodic_massless() {
        let p = natural();
        let s = periodic_spectrum(&p);
        // Band-limited data given in closed form so the oracle can shift it.
        let f1 = |x: f64| Complex64::new((TAU * x).cos() + 0.3, 0.4 * (2.0 * TAU * x).sin());
        let f2 = |x: f64| Complex64::new(0.2 * (3.0 * TAU * x).sin(), (TAU * x).cos() - 0.1);
        let psi = GridWaveFunction::from_fn(256, p, |x| Complex2Vector::new(f1(x), f2(x))).unwrap();
        let e = expand(&psi, &s).unwrap();
        for t in [0.13, 0.5, 1.0] {
            let evolved = evolve(&e, t);
            for (x, v) in evolved.positions().iter().zip(evolved.samples()) {
                assert!((v.c1 - f1(x - t)).norm() < 1e-8);
                assert!((v.c2 - f2(x + t)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn consistency_check_for_periodic_majorana_state() {
        let p = natural();
        let s = periodic_spectrum(&p);
        let psi = random_majorana_state(&s, 20.0, ChiralContent::Both, p.nu, 256, 5).unwrap();
        let r = dynamical_consistency_check_with(&s, &psi, p.nu, 10.0, 50).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.max_majorana_residual < 1e-10);
        assert!(r.max_chirality_drift.unwrap() < 1e-10);
    }

    #[test]
    fn consistency_check_rejects_non_majorana_conditions() {
        let p = natural();
        let bc = MatrixBC::new(crate::algebra::Complex2Matrix::diag(
            Complex64::from_polar(1.0, 0.5),
            Complex64::from_polar(1.0, -0.5),
        ))
        .unwrap();
        let psi = GridWaveFunction::from_fn(32, p, |_| Complex2Vector::from_real(1.0, 0.0)).unwrap();
        assert!(matches!(dynamical_consistency_check(&bc, &psi, p.nu, 1.0, 4), Err(Error::Incompatible(_))));
    }
}
