//! Complex 2×2 kernel and the representation-level objects of the (1+1)D
//! Dirac equation: gamma matrices, chirality matrix, chiral projectors and
//! the charge-conjugation matrix, all in the Weyl representation.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute entrywise tolerance for matrix and vector comparisons.
pub const DEFAULT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A two-component spinor `[c1, c2]^T`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Complex2Vector {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl Complex2Vector {
    pub const fn new(c1: Complex64, c2: Complex64) -> Self {
        Self { c1, c2 }
    }

    pub fn from_real(c1: f64, c2: f64) -> Self {
        Self::new(Complex64::new(c1, 0.0), Complex64::new(c2, 0.0))
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.c1.conj(), self.c2.conj())
    }

    /// Hermitian inner product `self† · other`.
    pub fn dot(&self, other: &Self) -> Complex64 {
        self.c1.conj() * other.c1 + self.c2.conj() * other.c2
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_max(&self) -> f64 {
        self.c1.norm().max(self.c2.norm())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.c1 * s, self.c2 * s)
    }

    pub fn is_finite(&self) -> bool {
        self.c1.is_finite() && self.c2.is_finite()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (*self - *other).norm_max() <= tol
    }

    /// Rescales to unit Euclidean norm and fixes the global phase so that the
    /// first component with modulus above `tol` is real and positive.
    pub fn normalized_canonical(&self, tol: f64) -> Option<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return None;
        }
        let v = self.scale(Complex64::new(1.0 / n, 0.0));
        let lead = if v.c1.norm() > tol { v.c1 } else { v.c2 };
        let phase = lead.conj() / lead.norm();
        let mut out = v.scale(phase);
        // The leading component is real by construction; drop rounding noise.
        if v.c1.norm() > tol {
            out.c1 = Complex64::new(out.c1.norm(), 0.0);
        } else {
            out.c2 = Complex64::new(out.c2.norm(), 0.0);
        }
        Some(out)
    }
}

impl Add for Complex2Vector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.c1 + rhs.c1, self.c2 + rhs.c2)
    }
}

impl Sub for Complex2Vector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.c1 - rhs.c1, self.c2 - rhs.c2)
    }
}

impl Neg for Complex2Vector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.c1, -self.c2)
    }
}

/// A complex 2×2 matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Complex2Matrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl Complex2Matrix {
    pub const fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn from_real(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self::new(
            Complex64::new(m11, 0.0),
            Complex64::new(m12, 0.0),
            Complex64::new(m21, 0.0),
            Complex64::new(m22, 0.0),
        )
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn diag(a: Complex64, b: Complex64) -> Self {
        Self::new(a, ZERO, ZERO, b)
    }

    pub const fn sigma_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma_y() -> Self {
        Self::new(ZERO, -I, I, ZERO)
    }

    pub fn sigma_z() -> Self {
        Self::new(ONE, ZERO, ZERO, -ONE)
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }

    pub fn conj(&self) -> Self {
        Self::new(self.m11.conj(), self.m12.conj(), self.m21.conj(), self.m22.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m11, self.m21, self.m12, self.m22)
    }

    pub fn adjoint(&self) -> Self {
        self.conj().transpose()
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> Complex64 {
        self.m11 + self.m22
    }

    /// Inverse by the adjugate formula; `None` when `|det| <= tol`.
    pub fn inverse(&self, tol: f64) -> Option<Self> {
        let d = self.det();
        if d.norm() <= tol {
            return None;
        }
        let inv = ONE / d;
        Some(Self::new(self.m22 * inv, -self.m12 * inv, -self.m21 * inv, self.m11 * inv))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        self.entries().iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.is_finite())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (*self - *other).norm_max() <= tol
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    /// `‖self†·self − I‖_max`.
    pub fn unitarity_residual(&self) -> f64 {
        (self.adjoint() * *self - Self::identity()).norm_max()
    }

    /// The two singular values, largest first.
    pub fn singular_values(&self) -> (f64, f64) {
        // Eigenvalues of the Hermitian Gram matrix A†A in closed form.
        let g = self.adjoint() * *self;
        let a = g.m11.re;
        let d = g.m22.re;
        let b = g.m12.norm();
        let half_tr = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        let hi = (half_tr + disc).max(0.0);
        // det(A†A) = |det A|² gives the small eigenvalue without cancellation.
        let lo = if hi > 0.0 { self.det().norm_sqr() / hi } else { 0.0 };
        (hi.sqrt(), lo.max(0.0).sqrt())
    }
}

impl Add for Complex2Matrix {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(self.m11 + r.m11, self.m12 + r.m12, self.m21 + r.m21, self.m22 + r.m22)
    }
}

impl Sub for Complex2Matrix {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(self.m11 - r.m11, self.m12 - r.m12, self.m21 - r.m21, self.m22 - r.m22)
    }
}

impl Neg for Complex2Matrix {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-1.0)
    }
}

impl Mul for Complex2Matrix {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.m11 * r.m11 + self.m12 * r.m21,
            self.m11 * r.m12 + self.m12 * r.m22,
            self.m21 * r.m11 + self.m22 * r.m21,
            self.m21 * r.m12 + self.m22 * r.m22,
        )
    }
}

impl Mul<Complex2Vector> for Complex2Matrix {
    type Output = Complex2Vector;
    fn mul(self, v: Complex2Vector) -> Complex2Vector {
        Complex2Vector::new(self.m11 * v.c1 + self.m12 * v.c2, self.m21 * v.c1 + self.m22 * v.c2)
    }
}

impl fmt::Display for Complex2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.m11, self.m12, self.m21, self.m22)
    }
}

/// Dirac matrices γ^0, γ^1 together with the chirality matrix Γ^5 = γ^0γ^1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaSet {
    pub gamma0: Complex2Matrix,
    pub gamma1: Complex2Matrix,
    pub gamma5: Complex2Matrix,
}

impl GammaSet {
    /// Builds a set from γ^0 and γ^1, deriving Γ^5 = γ^0γ^1.
    pub fn from_pair(gamma0: Complex2Matrix, gamma1: Complex2Matrix) -> Self {
        Self { gamma0, gamma1, gamma5: gamma0 * gamma1 }
    }

    fn gamma(&self, mu: usize) -> Complex2Matrix {
        if mu == 0 {
            self.gamma0
        } else {
            self.gamma1
        }
    }
}

/// γ^0 = σx, γ^1 = −iσy, Γ^5 = σz.
pub fn weyl_gamma_set() -> GammaSet {
    GammaSet::from_pair(Complex2Matrix::sigma_x(), Complex2Matrix::sigma_y().scale(-I))
}

/// Maximum violation of the Clifford relations with metric diag(1, −1),
/// plus the adjoint relation (γ^μ)† = γ^0γ^μγ^0 and the Γ^5 properties.
pub fn clifford_residual(g: &GammaSet) -> f64 {
    let metric = [1.0, -1.0];
    let id = Complex2Matrix::identity();
    let mut r = 0.0_f64;
    for mu in 0..2 {
        for nu in 0..2 {
            let expected = if mu == nu { id.scale_real(2.0 * metric[mu]) } else { Complex2Matrix::zero() };
            r = r.max((g.gamma(mu).anticommutator(&g.gamma(nu)) - expected).norm_max());
        }
    }
    let mut adjoint = 0.0_f64;
    for mu in 0..2 {
        let gm = g.gamma(mu);
        adjoint = adjoint.max((gm.adjoint() - g.gamma0 * gm * g.gamma0).norm_max());
    }
    let g5 = g.gamma5;
    let chirality = [
        (g5 - g.gamma0 * g.gamma1).norm_max(),
        (g5 * g5 - id).norm_max(),
        (g5.adjoint() - g5).norm_max(),
        g5.anticommutator(&g.gamma0).norm_max(),
        g5.anticommutator(&g.gamma1).norm_max(),
    ]
    .into_iter()
    .fold(0.0_f64, f64::max);
    r + adjoint + chirality
}

/// Returns `(P+, P−) = ((I + Γ^5)/2, (I − Γ^5)/2)`.
pub fn chiral_projectors(g: &GammaSet) -> Result<(Complex2Matrix, Complex2Matrix)> {
    let residual = clifford_residual(g);
    if residual > DEFAULT_TOL {
        return Err(Error::InvalidGammaSet { residual });
    }
    let id = Complex2Matrix::identity();
    Ok(((id + g.gamma5).scale_real(0.5), (id - g.gamma5).scale_real(0.5)))
}

/// S_C = e^{iν} σz.
pub fn charge_conjugation_matrix(nu: f64) -> Complex2Matrix {
    Complex2Matrix::sigma_z().scale(Complex64::from_polar(1.0, nu))
}

/// Residual of `S_C (iγ^μ)* S_C^{-1} = iγ^μ` (μ = 0, 1) together with
/// `S_C (iΓ^5)* S_C^{-1} = −iΓ^5`.
pub fn conjugation_identity_residual(g: &GammaSet, nu: f64) -> f64 {
    let s = charge_conjugation_matrix(nu);
    let s_inv = s.inverse(DEFAULT_TOL).expect("S_C is unitary");
    let conj = |m: Complex2Matrix| s * m.scale(I).conj() * s_inv;
    let r0 = (conj(g.gamma0) - g.gamma0.scale(I)).norm_max();
    let r1 = (conj(g.gamma1) - g.gamma1.scale(I)).norm_max();
    let r5 = (conj(g.gamma5) + g.gamma5.scale(I)).norm_max();
    r0.max(r1).max(r5)
}

/// The charge-conjugate spinor `S_C ψ*`.
pub fn charge_conjugate(psi: &Complex2Vector, nu: f64) -> Complex2Vector {
    charge_conjugation_matrix(nu) * psi.conj()
}

/// Splits ψ into its right-chiral (Γ^5 = +1) and left-chiral (Γ^5 = −1) parts.
pub fn chirality_split(psi: &Complex2Vector) -> (Complex2Vector, Complex2Vector) {
    let (p_plus, p_minus) =
        chiral_projectors(&weyl_gamma_set()).expect("the Weyl set satisfies the Clifford relations");
    (p_plus * *psi, p_minus * *psi)
}

/// Physical constants and box data. All formulas keep ħ, c and L symbolic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub c: f64,
    /// Box length L.
    pub length: f64,
    pub mass: f64,
    /// Majorana phase ν of the charge-conjugation matrix.
    pub nu: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self { hbar: 1.0, c: 1.0, length: 1.0, mass: 0.0, nu: 1.5 * PI }
    }
}

impl PhysicalParams {
    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, value: v, reason: "must be finite and strictly positive" })
            }
        };
        positive("hbar", self.hbar)?;
        positive("c", self.c)?;
        positive("length", self.length)?;
        if !(self.mass.is_finite() && self.mass >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "mass",
                value: self.mass,
                reason: "must be finite and non-negative",
            });
        }
        if !(self.nu >= 0.0 && self.nu < 2.0 * PI) {
            return Err(Error::InvalidParameter { name: "nu", value: self.nu, reason: "must lie in [0, 2π)" });
        }
        Ok(())
    }

    /// ħc, the conversion between wavenumber and massless energy.
    pub fn hbar_c(&self) -> f64 {
        self.hbar * self.c
    }

    /// Rest energy mc².
    pub fn rest_energy(&self) -> f64 {
        self.mass * self.c * self.c
    }

    /// Natural energy scale ħc/L.
    pub fn energy_unit(&self) -> f64 {
        self.hbar_c() / self.length
    }
}
