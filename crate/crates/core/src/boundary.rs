//! Boundary conditions for the particle in the box `[0, L]`.
//!
//! Two shapes are supported: the one-component phase condition
//! `φ_a(L) = e^{iθ} φ_a(0)` of a single Weyl component, and the two-component
//! matrix condition `Ψ(L) = M Ψ(0)`. For the Dirac Hamiltonian
//! `H = −iħc σz ∂x` the boundary form vanishes on the domain exactly when
//! `M† σz M = σz`; the domain is closed under charge conjugation exactly when
//! `σz M* σz = M`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{charge_conjugation_matrix, weyl_gamma_set, Complex2Matrix, DEFAULT_TOL};
use crate::error::{Error, Result};

/// Roots of the phase filter closer than this to 0 or π are reported exactly.
const SNAP_TOL: f64 = 1e-12;
const BISECTION_STEPS: usize = 200;

/// Which Weyl component a one-component condition acts on.
///
/// `Upper` is φ1 with `h_1 = −iħc ∂x`; `Lower` is φ2 with `h_2 = +iħc ∂x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeylBranch {
    Upper,
    Lower,
}

impl WeylBranch {
    pub const ALL: [WeylBranch; 2] = [WeylBranch::Upper, WeylBranch::Lower];

    /// The index a ∈ {1, 2}.
    pub fn index(self) -> u8 {
        match self {
            WeylBranch::Upper => 1,
            WeylBranch::Lower => 2,
        }
    }

    pub fn from_index(a: u8) -> Option<Self> {
        match a {
            1 => Some(WeylBranch::Upper),
            2 => Some(WeylBranch::Lower),
            _ => None,
        }
    }

    /// (−1)^{a−1}.
    pub fn sign(self) -> f64 {
        match self {
            WeylBranch::Upper => 1.0,
            WeylBranch::Lower => -1.0,
        }
    }
}

/// `φ_a(L) = e^{iθ} φ_a(0)` with θ kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseBC {
    branch: WeylBranch,
    theta: f64,
}

impl PhaseBC {
    pub fn new(branch: WeylBranch, theta: f64) -> Self {
        Self { branch, theta: normalize_phase(theta) }
    }

    pub fn periodic(branch: WeylBranch) -> Self {
        Self::new(branch, 0.0)
    }

    pub fn antiperiodic(branch: WeylBranch) -> Self {
        Self::new(branch, PI)
    }

    pub fn branch(&self) -> WeylBranch {
        self.branch
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn factor(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }
}

fn normalize_phase(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// `Ψ(L) = M Ψ(0)` with an invertible M.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixBC {
    matrix: Complex2Matrix,
}

impl MatrixBC {
    pub fn new(matrix: Complex2Matrix) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::SingularBoundaryMatrix { det_abs: f64::NAN });
        }
        let det_abs = matrix.det().norm();
        if det_abs <= DEFAULT_TOL {
            return Err(Error::SingularBoundaryMatrix { det_abs });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &Complex2Matrix {
        &self.matrix
    }

    pub fn named(name: NamedBC) -> Self {
        Self { matrix: name.matrix() }
    }
}

/// Either boundary-condition shape; spectra record which one they solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    Matrix(MatrixBC),
    Phase(PhaseBC),
}

impl From<MatrixBC> for BoundaryCondition {
    fn from(bc: MatrixBC) -> Self {
        BoundaryCondition::Matrix(bc)
    }
}

impl From<PhaseBC> for BoundaryCondition {
    fn from(bc: PhaseBC) -> Self {
        BoundaryCondition::Phase(bc)
    }
}

/// The four chirality-preserving Majorana conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedBC {
    /// Ψ(L) = Ψ(0).
    Periodic,
    /// Ψ(L) = −Ψ(0).
    Antiperiodic,
    /// Ψ(L) = Γ^5 Ψ(0).
    PlusGamma5,
    /// Ψ(L) = −Γ^5 Ψ(0).
    MinusGamma5,
}

impl NamedBC {
    pub const ALL: [NamedBC; 4] = [NamedBC::MinusGamma5, NamedBC::PlusGamma5, NamedBC::Periodic, NamedBC::Antiperiodic];

    pub fn matrix(self) -> Complex2Matrix {
        let g5 = weyl_gamma_set().gamma5;
        match self {
            NamedBC::Periodic => Complex2Matrix::identity(),
            NamedBC::Antiperiodic => -Complex2Matrix::identity(),
            NamedBC::PlusGamma5 => g5,
            NamedBC::MinusGamma5 => -g5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NamedBC::Periodic => "periodic",
            NamedBC::Antiperiodic => "antiperiodic",
            NamedBC::PlusGamma5 => "plus_gamma5",
            NamedBC::MinusGamma5 => "minus_gamma5",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|n| n.as_str() == s)
    }
}

impl fmt::Display for NamedBC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of a tolerance-based test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub passed: bool,
    pub residual: f64,
}

impl Check {
    pub fn new(residual: f64, tol: f64) -> Self {
        Self { passed: residual < tol, residual }
    }
}

/// Membership in one of the two self-adjoint Majorana families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `(1/m2)·[[−1, −i m0], [−i m0, 1]]`, m0² + m2² = 1.
    #[serde(rename = "family_i")]
    FamilyI {
        m0: f64,
        m2: f64,
    },
    /// `(1/m1)·[[1, −i m3], [i m3, 1]]`, m1² + m3² = 1.
    #[serde(rename = "family_ii")]
    FamilyII {
        m1: f64,
        m3: f64,
    },
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BCClassification {
    pub self_adjoint: Check,
    pub majorana_compatible: Check,
    pub chirality_preserving: Check,
    pub family: Family,
}

fn unit_circle_defect(a: f64, b: f64) -> f64 {
    a * a + b * b - 1.0
}

/// Family I: `Ψ(L) = (1/m2)·[[−1, −i m0], [−i m0, +1]] Ψ(0)`.
pub fn family_one(m0: f64, m2: f64) -> Result<MatrixBC> {
    let defect = unit_circle_defect(m0, m2);
    if !(defect.abs() < DEFAULT_TOL) {
        return Err(Error::FamilyConstraint { a: m0, b: m2, defect });
    }
    if m2.abs() <= DEFAULT_TOL {
        return Err(Error::SingularFamily { family: "I", divisor: m2 });
    }
    let off = Complex64::new(0.0, -m0);
    let m = Complex2Matrix::new(Complex64::new(-1.0, 0.0), off, off, Complex64::new(1.0, 0.0));
    MatrixBC::new(m.scale_real(1.0 / m2))
}

/// Family II: `Ψ(L) = (1/m1)·[[+1, −i m3], [+i m3, +1]] Ψ(0)`.
pub fn family_two(m1: f64, m3: f64) -> Result<MatrixBC> {
    let defect = unit_circle_defect(m1, m3);
    if !(defect.abs() < DEFAULT_TOL) {
        return Err(Error::FamilyConstraint { a: m1, b: m3, defect });
    }
    if m1.abs() <= DEFAULT_TOL {
        return Err(Error::SingularFamily { family: "II", divisor: m1 });
    }
    let m = Complex2Matrix::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -m3),
        Complex64::new(0.0, m3),
        Complex64::new(1.0, 0.0),
    );
    MatrixBC::new(m.scale_real(1.0 / m1))
}

/// `‖M† σz M − σz‖_max`.
pub fn self_adjointness_residual(bc: &MatrixBC) -> f64 {
    let sz = Complex2Matrix::sigma_z();
    (bc.matrix.adjoint() * sz * bc.matrix - sz).norm_max()
}

pub fn is_self_adjoint(bc: &MatrixBC) -> Check {
    Check::new(self_adjointness_residual(bc), DEFAULT_TOL)
}

/// The condition obeyed by `Ψ_C = S_C Ψ*` when Ψ obeys `bc`:
/// `Ψ_C(L) = S_C M* S_C^{-1} Ψ_C(0)`.
pub fn conjugated_bc(bc: &MatrixBC, nu: f64) -> MatrixBC {
    let s = charge_conjugation_matrix(nu);
    let s_inv = s.inverse(DEFAULT_TOL).expect("S_C is unitary");
    // det is preserved in modulus, so the result stays invertible.
    MatrixBC { matrix: s * bc.matrix.conj() * s_inv }
}

pub fn majorana_compatibility_residual(bc: &MatrixBC) -> f64 {
    (conjugated_bc(bc, 0.0).matrix - bc.matrix).norm_max()
}

/// True when the domain is invariant under charge conjugation.
pub fn is_majorana_compatible(bc: &MatrixBC) -> Check {
    is_majorana_compatible_with(bc, DEFAULT_TOL)
}

pub fn is_majorana_compatible_with(bc: &MatrixBC, tol: f64) -> Check {
    Check::new(majorana_compatibility_residual(bc), tol)
}

/// A condition decouples Ψ+ from Ψ− iff M commutes with Γ^5 = σz.
pub fn is_chirality_preserving(bc: &MatrixBC) -> Check {
    Check::new(bc.matrix.m12.norm().max(bc.matrix.m21.norm()), DEFAULT_TOL)
}

/// The phase condition obeyed by `(−1)^{a−1} e^{iν} φ_a*` when φ_a obeys `pbc`.
pub fn conjugated_phase_bc(pbc: &PhaseBC, nu: f64) -> PhaseBC {
    let s = Complex64::from_polar(pbc.branch.sign(), nu);
    // χ(L)/χ(0) = s·conj(φ(L)) / (s·conj(φ(0))) with φ(L) = e^{iθ} φ(0).
    let ratio = (s * pbc.factor().conj()) / s;
    PhaseBC::new(pbc.branch, ratio.arg())
}

/// `e^{iθ} − e^{iθ'}` where θ' is the phase of the conjugated condition. It
/// vanishes exactly when the Majorana constraint fits inside the domain.
pub fn phase_majorana_defect(pbc: &PhaseBC, nu: f64) -> Complex64 {
    pbc.factor() - conjugated_phase_bc(pbc, nu).factor()
}

fn snap_phase(theta: f64) -> f64 {
    let t = normalize_phase(theta);
    if t < SNAP_TOL || TAU - t < SNAP_TOL {
        0.0
    } else if (t - PI).abs() < SNAP_TOL {
        PI
    } else {
        t
    }
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

fn push_unique(out: &mut Vec<f64>, theta: f64) {
    let dist = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(TAU);
        d.min(TAU - d)
    };
    if !out.iter().any(|&t| dist(t, theta) < SNAP_TOL) {
        out.push(theta);
    }
}

/// Phases θ on a uniform grid of `[0, 2π)`, refined by bisection, for which a
/// Weyl component obeying `φ_a(L) = e^{iθ} φ_a(0)` can also satisfy its
/// Majorana condition. Uses the default phase ν = 3π/2.
pub fn majorana_phase_scan(branch: WeylBranch, grid_points: usize) -> Result<Vec<f64>> {
    majorana_phase_scan_with(branch, grid_points, 1.5 * PI, DEFAULT_TOL)
}

pub fn majorana_phase_scan_with(branch: WeylBranch, grid_points: usize, nu: f64, tol: f64) -> Result<Vec<f64>> {
    if grid_points < 8 {
        return Err(Error::InvalidGrid(format!("phase scan needs at least 8 points, got {grid_points}")));
    }
    let defect = |theta: f64| phase_majorana_defect(&PhaseBC { branch, theta }, nu);
    let f = |theta: f64| defect(theta).im;
    let step = TAU / grid_points as f64;
    let mut roots = Vec::new();
    for j in 0..grid_points {
        let a = j as f64 * step;
        let b = if j + 1 == grid_points { TAU } else { (j + 1) as f64 * step };
        if defect(a).norm() < tol {
            push_unique(&mut roots, snap_phase(a));
            continue;
        }
        let (fa, fb) = (f(a), f(b));
        if fa * fb < 0.0 && defect(b).norm() >= tol {
            push_unique(&mut roots, snap_phase(bisect(f, a, b)));
        }
    }
    roots.retain(|&t| defect(t).norm() < tol);
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Builds `Ψ(L) = diag(e^{iθ+}, e^{iθ−}) Ψ(0)` from a condition on Ψ+ = [φ1, 0]
/// and one on Ψ− = [0, φ2]. Only periodic and antiperiodic phases are accepted.
pub fn compose_from_chiral(plus: &PhaseBC, minus: &PhaseBC) -> Result<MatrixBC> {
    let sign = |p: &PhaseBC| -> Result<f64> {
        match snap_phase(p.theta) {
            t if t == 0.0 => Ok(1.0),
            t if t == PI => Ok(-1.0),
            _ => Err(Error::NonMajoranaPhase { theta: p.theta }),
        }
    };
    let (a, b) = (sign(plus)?, sign(minus)?);
    MatrixBC::new(Complex2Matrix::from_real(a, 0.0, 0.0, b))
}

/// One of the four composite conditions together with its chiral origin and
/// its location inside the self-adjoint families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiralMajoranaBC {
    pub name: NamedBC,
    pub plus: PhaseBC,
    pub minus: PhaseBC,
    pub bc: MatrixBC,
    pub family: Family,
}

/// All four conditions obtainable from periodic/antiperiodic chiral parts.
pub fn enumerate_chiral_majorana_bcs() -> Vec<ChiralMajoranaBC> {
    let phases = [0.0, PI];
    let mut out = Vec::with_capacity(4);
    for &tp in &phases {
        for &tm in &phases {
            let plus = PhaseBC::new(WeylBranch::Upper, tp);
            let minus = PhaseBC::new(WeylBranch::Lower, tm);
            let bc = compose_from_chiral(&plus, &minus).expect("phases are 0 or π");
            let name = NamedBC::ALL
                .into_iter()
                .find(|n| n.matrix().approx_eq(bc.matrix(), 0.0))
                .expect("diag(±1, ±1) is one of the named conditions");
            let family = classify(&bc).family;
            out.push(ChiralMajoranaBC { name, plus, minus, bc, family });
        }
    }
    out
}

/// Brute-force search over diagonal unit-modulus conditions
/// `diag(e^{iα}, e^{iβ})` on a `grid_points × grid_points` phase grid.
///
/// Grid-local minima of the Majorana residual are refined coordinate-wise by
/// bisection and kept when they pass the self-adjointness and Majorana
/// checks at the default tolerance.
pub fn scan_diagonal_majorana_bcs(grid_points: usize) -> Result<Vec<MatrixBC>> {
    if grid_points < 8 {
        return Err(Error::InvalidGrid(format!("diagonal scan needs at least 8 points, got {grid_points}")));
    }
    let n = grid_points;
    let step = TAU / n as f64;
    let build = |a: f64, b: f64| {
        MatrixBC::new(Complex2Matrix::diag(Complex64::from_polar(1.0, a), Complex64::from_polar(1.0, b)))
            .expect("unit-modulus diagonal is invertible")
    };
    let residual: Vec<f64> = (0..n * n)
        .map(|idx| majorana_compatibility_residual(&build((idx / n) as f64 * step, (idx % n) as f64 * step)))
        .collect();
    let at = |i: usize, j: usize| residual[(i % n) * n + (j % n)];

    let mut found: Vec<MatrixBC> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let r = at(i, j);
            let is_min =
                (0..3).all(|di| (0..3).all(|dj| (di == 1 && dj == 1) || at(i + n + di - 1, j + n + dj - 1) >= r));
            if !is_min {
                continue;
            }
            let a = refine_diagonal_phase(i as f64 * step, step, |t| build(t, j as f64 * step).matrix.m11);
            let b = refine_diagonal_phase(j as f64 * step, step, |t| build(a, t).matrix.m22);
            let bc = build(a, b);
            let bc = MatrixBC::new(snap_matrix(bc.matrix)).expect("still unit modulus");
            if !(is_self_adjoint(&bc).passed && is_majorana_compatible(&bc).passed) {
                continue;
            }
            if !found.iter().any(|f| f.matrix.approx_eq(&bc.matrix, DEFAULT_TOL)) {
                found.push(bc);
            }
        }
    }
    Ok(found)
}

// Bisection on Im of the entry's Majorana defect e^{iθ} − e^{−iθ} around a
// grid node; nodes that are already exact roots are kept.
fn refine_diagonal_phase<F: Fn(f64) -> Complex64>(node: f64, step: f64, entry: F) -> f64 {
    let f = |t: f64| {
        let z = entry(t);
        (z - z.conj()).im
    };
    if f(node) == 0.0 {
        return snap_phase(node);
    }
    for (lo, hi) in [(node - step, node), (node, node + step)] {
        if f(lo) * f(hi) < 0.0 {
            return snap_phase(bisect(f, lo, hi));
        }
    }
    snap_phase(node)
}

// Rounds entries that are within the snapping tolerance of ±1 onto ±1.
fn snap_matrix(m: Complex2Matrix) -> Complex2Matrix {
    let snap = |z: Complex64| {
        for target in [1.0, -1.0] {
            if (z - target).norm() < SNAP_TOL {
                return Complex64::new(target, 0.0);
            }
        }
        z
    };
    Complex2Matrix::new(snap(m.m11), snap(m.m12), snap(m.m21), snap(m.m22))
}

/// Fills every flag and solves for membership in family I or II.
pub fn classify(bc: &MatrixBC) -> BCClassification {
    let self_adjoint = is_self_adjoint(bc);
    let majorana_compatible = is_majorana_compatible(bc);
    let chirality_preserving = is_chirality_preserving(bc);
    let family = if self_adjoint.passed && majorana_compatible.passed { match_family(bc) } else { Family::None };
    BCClassification { self_adjoint, majorana_compatible, chirality_preserving, family }
}

fn match_family(bc: &MatrixBC) -> Family {
    let m = bc.matrix;
    let tol = DEFAULT_TOL;
    let is_real = |z: Complex64| z.im.abs() < tol;
    let is_imag = |z: Complex64| z.re.abs() < tol;

    // Family I: M11 = −M22 = −1/m2 real, M12 = M21 = −i m0/m2.
    if is_real(m.m11) && (m.m11 + m.m22).norm() < tol && is_imag(m.m12) && (m.m12 - m.m21).norm() < tol {
        let m2 = -1.0 / m.m11.re;
        let m0 = -m.m12.im * m2;
        if let Ok(rebuilt) = family_one(m0, m2) {
            if rebuilt.matrix.approx_eq(&m, tol) {
                return Family::FamilyI { m0, m2 };
            }
        }
    }
    // Family II: M11 = M22 = 1/m1 real, M12 = −i m3/m1, M21 = +i m3/m1.
    if is_real(m.m11) && (m.m11 - m.m22).norm() < tol && is_imag(m.m12) && (m.m12 + m.m21).norm() < tol {
        let m1 = 1.0 / m.m11.re;
        let m3 = -m.m12.im * m1;
        if let Ok(rebuilt) = family_two(m1, m3) {
            if rebuilt.matrix.approx_eq(&m, tol) {
                return Family::FamilyII { m1, m3 };
            }
        }
    }
    Family::None
}
