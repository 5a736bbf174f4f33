//! Exact-size complex Hermitian algebra on the two-level system.
//!
//! Matrices are written in the fixed basis `(|e⟩, |g⟩)`. Only the upper
//! triangle of a [`Hermitian2`] is stored, so Hermiticity holds by
//! construction.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalue pairs whose sum falls at or below this value make the
/// symmetric product equation ill-posed.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

/// A 2×2 complex Hermitian matrix `[[ee, eg], [eg*, gg]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hermitian2 {
    pub ee: f64,
    pub gg: f64,
    pub eg: Complex64,
}

/// Spectral decomposition of a [`Hermitian2`].
///
/// Eigenvalues are ascending. Each eigenvector has unit norm and its first
/// nonzero component is real and positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub values: [f64; 2],
    pub vectors: [[Complex64; 2]; 2],
}

/// General complex 2×2 matrix, row-major. Used for intermediate products.
pub type Mat2 = [[Complex64; 2]; 2];

impl Hermitian2 {
    pub const ZERO: Hermitian2 = Hermitian2 {
        ee: 0.0,
        gg: 0.0,
        eg: Complex64::new(0.0, 0.0),
    };

    pub fn new(ee: f64, gg: f64, eg: Complex64) -> Self {
        Self { ee, gg, eg }
    }

    pub fn diag(ee: f64, gg: f64) -> Self {
        Self::new(ee, gg, Complex64::new(0.0, 0.0))
    }

    pub fn identity() -> Self {
        Self::diag(1.0, 1.0)
    }

    pub fn scaled_identity(s: f64) -> Self {
        Self::diag(s, s)
    }

    pub fn ge(&self) -> Complex64 {
        self.eg.conj()
    }

    pub fn trace(&self) -> f64 {
        self.ee + self.gg
    }

    pub fn det(&self) -> f64 {
        self.ee * self.gg - self.eg.norm_sqr()
    }

    pub fn is_diagonal(&self) -> bool {
        self.eg == Complex64::new(0.0, 0.0)
    }

    pub fn to_mat(&self) -> Mat2 {
        [
            [Complex64::new(self.ee, 0.0), self.eg],
            [self.ge(), Complex64::new(self.gg, 0.0)],
        ]
    }

    /// Hermitian part `(m + m†)/2` of a general matrix.
    pub fn from_mat_hermitian_part(m: &Mat2) -> Self {
        Self {
            ee: m[0][0].re,
            gg: m[1][1].re,
            eg: (m[0][1] + m[1][0].conj()) * 0.5,
        }
    }

    pub fn max_abs_diff(&self, other: &Hermitian2) -> f64 {
        (self.ee - other.ee)
            .abs()
            .max((self.gg - other.gg).abs())
            .max((self.eg - other.eg).norm())
    }

    /// `Tr(self · other)`, real for two Hermitian matrices.
    pub fn trace_product(&self, other: &Hermitian2) -> f64 {
        self.ee * other.ee + self.gg * other.gg + 2.0 * (self.eg * other.ge()).re
    }

    /// `self²`, Hermitian.
    pub fn square(&self) -> Hermitian2 {
        let n = self.eg.norm_sqr();
        Hermitian2 {
            ee: self.ee * self.ee + n,
            gg: self.gg * self.gg + n,
            eg: self.eg * (self.ee + self.gg),
        }
    }

    /// `self · other · self`, Hermitian when both factors are.
    pub fn sandwich(&self, other: &Hermitian2) -> Hermitian2 {
        let p = mat_mul(&mat_mul(&self.to_mat(), &other.to_mat()), &self.to_mat());
        Hermitian2::from_mat_hermitian_part(&p)
    }

    /// `⟨v|self|v⟩` for a complex 2-vector.
    pub fn expectation(&self, v: &[Complex64; 2]) -> f64 {
        let w0 = Complex64::new(self.ee, 0.0) * v[0] + self.eg * v[1];
        let w1 = self.ge() * v[0] + Complex64::new(self.gg, 0.0) * v[1];
        (v[0].conj() * w0 + v[1].conj() * w1).re
    }

    /// `u† · self · u` for a unitary given by its columns.
    pub fn conjugate_by(&self, columns: &[[Complex64; 2]; 2]) -> Hermitian2 {
        let u: Mat2 = [[columns[0][0], columns[1][0]], [columns[0][1], columns[1][1]]];
        let p = mat_mul(&mat_mul(&adjoint(&u), &self.to_mat()), &u);
        Hermitian2::from_mat_hermitian_part(&p)
    }

    /// `u · self · u†` for a unitary given by its columns.
    pub fn unconjugate_by(&self, columns: &[[Complex64; 2]; 2]) -> Hermitian2 {
        let u: Mat2 = [[columns[0][0], columns[1][0]], [columns[0][1], columns[1][1]]];
        let p = mat_mul(&mat_mul(&u, &self.to_mat()), &adjoint(&u));
        Hermitian2::from_mat_hermitian_part(&p)
    }

    /// Closed-form eigendecomposition.
    pub fn eigendecompose(&self) -> Eigen2 {
        let mean = 0.5 * (self.ee + self.gg);
        let half = 0.5 * (self.ee - self.gg);
        let off = self.eg.norm();
        let radius = half.hypot(off);

        // The eigenvalue of larger magnitude is formed directly, the other
        // from the determinant, so a near-zero eigenvalue keeps its relative
        // accuracy.
        let (lo, hi) = if radius == 0.0 {
            (mean, mean)
        } else if mean >= 0.0 {
            let hi = mean + radius;
            (self.det() / hi, hi)
        } else {
            let lo = mean - radius;
            (lo, self.det() / lo)
        };
        let lo = lo.min(hi);

        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let v_lo = if off == 0.0 {
            if self.ee <= self.gg {
                [one, zero]
            } else {
                [zero, one]
            }
        } else if half >= 0.0 {
            // null vector of the first row of (m - λ_lo)
            normalized([self.eg, Complex64::new(-(half + radius), 0.0)])
        } else {
            normalized([Complex64::new(radius - half, 0.0), -self.ge()])
        };
        let v_lo = fix_phase(v_lo);
        let v_hi = fix_phase([-v_lo[1].conj(), v_lo[0].conj()]);

        Eigen2 {
            values: [lo, hi],
            vectors: [v_lo, v_hi],
        }
    }
}

impl Eigen2 {
    /// `Σ λᵢ vᵢ vᵢ†`.
    pub fn reconstruct(&self) -> Hermitian2 {
        let mut out = Hermitian2::ZERO;
        for (lambda, v) in self.values.iter().zip(self.vectors.iter()) {
            out = out + projector(v) * *lambda;
        }
        out
    }
}

/// Rank-one projector `|v⟩⟨v|`.
pub fn projector(v: &[Complex64; 2]) -> Hermitian2 {
    Hermitian2 {
        ee: v[0].norm_sqr(),
        gg: v[1].norm_sqr(),
        eg: v[0] * v[1].conj(),
    }
}

fn normalized(v: [Complex64; 2]) -> [Complex64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

fn fix_phase(v: [Complex64; 2]) -> [Complex64; 2] {
    let pivot = if v[0].norm() > 1e-300 { v[0] } else { v[1] };
    let phase = pivot.conj() / pivot.norm();
    [v[0] * phase, v[1] * phase]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn adjoint(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

impl Add for Hermitian2 {
    type Output = Hermitian2;
    fn add(self, rhs: Hermitian2) -> Hermitian2 {
        Hermitian2 {
            ee: self.ee + rhs.ee,
            gg: self.gg + rhs.gg,
            eg: self.eg + rhs.eg,
        }
    }
}

impl Sub for Hermitian2 {
    type Output = Hermitian2;
    fn sub(self, rhs: Hermitian2) -> Hermitian2 {
        Hermitian2 {
            ee: self.ee - rhs.ee,
            gg: self.gg - rhs.gg,
            eg: self.eg - rhs.eg,
        }
    }
}

impl Neg for Hermitian2 {
    type Output = Hermitian2;
    fn neg(self) -> Hermitian2 {
        self * -1.0
    }
}

impl Mul<f64> for Hermitian2 {
    type Output = Hermitian2;
    fn mul(self, s: f64) -> Hermitian2 {
        Hermitian2 {
            ee: self.ee * s,
            gg: self.gg * s,
            eg: self.eg * s,
        }
    }
}

/// A validated two-level density matrix: unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    matrix: Hermitian2,
}

impl QubitState {
    pub const TRACE_TOLERANCE: f64 = 1e-12;
    pub const PSD_TOLERANCE: f64 = 1e-12;

    pub fn new(matrix: Hermitian2) -> Result<Self> {
        let tr = matrix.trace();
        if (tr - 1.0).abs() > Self::TRACE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let lo = matrix.eigendecompose().values[0];
        if lo < -Self::PSD_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo:e}")));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn new_unchecked(matrix: Hermitian2) -> Self {
        debug_assert!((matrix.trace() - 1.0).abs() < 1e-9, "trace {}", matrix.trace());
        Self { matrix }
    }

    pub fn excited() -> Self {
        Self::new_unchecked(Hermitian2::diag(1.0, 0.0))
    }

    pub fn ground() -> Self {
        Self::new_unchecked(Hermitian2::diag(0.0, 1.0))
    }

    pub fn matrix(&self) -> &Hermitian2 {
        &self.matrix
    }

    /// Excited-state population `⟨e|ρ|e⟩`.
    pub fn excited_population(&self) -> f64 {
        self.matrix.ee
    }

    pub fn ground_population(&self) -> f64 {
        self.matrix.gg
    }

    pub fn coherence(&self) -> Complex64 {
        self.matrix.eg
    }
}

/// Solves `Γ0·M + M·Γ0 = 2Γ1` for Hermitian `M`.
///
/// The equation is diagonal in the eigenbasis of `Γ0`, where
/// `M̃ᵢⱼ = 2(Γ̃1)ᵢⱼ/(λᵢ+λⱼ)`.
pub fn solve_symmetric_product(gamma0: &Hermitian2, gamma1: &Hermitian2) -> Result<Hermitian2> {
    let eig = gamma0.eigendecompose();
    let [l0, l1] = eig.values;
    let min_pair_sum = (2.0 * l0).min(l0 + l1).min(2.0 * l1);
    if min_pair_sum <= DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateGamma0 { min_pair_sum });
    }
    let g1 = gamma1.conjugate_by(&eig.vectors);
    let m_tilde = Hermitian2 {
        ee: g1.ee / l0,
        gg: g1.gg / l1,
        eg: g1.eg * (2.0 / (l0 + l1)),
    };
    Ok(m_tilde.unconjugate_by(&eig.vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(g0: &Hermitian2, m: &Hermitian2, g1: &Hermitian2) -> f64 {
        let a = mat_mul(&g0.to_mat(), &m.to_mat());
        let b = mat_mul(&m.to_mat(), &g0.to_mat());
        let mut worst: f64 = 0.0;
        let two_g1 = g1.to_mat();
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((a[i][j] + b[i][j] - two_g1[i][j] * 2.0).norm());
            }
        }
        worst
    }

    #[test]
    fn identity_spectrum() {
        let e = Hermitian2::identity().eigendecompose();
        assert_eq!(e.values, [1.0, 1.0]);
        assert!(e.reconstruct().max_abs_diff(&Hermitian2::identity()) < 1e-15);
    }

    #[test]
    fn diagonal_is_sorted_ascending() {
        let e = Hermitian2::diag(0.7, 0.3).eigendecompose();
        assert_eq!(e.values, [0.3, 0.7]);
        assert_eq!(e.vectors[0], [c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(e.vectors[1], [c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = Hermitian2::new(0.0, 0.0, c(1.0, 0.0));
        let e = x.eigendecompose();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
        for v in e.vectors {
            assert!(v[0].im == 0.0 && v[0].re > 0.0);
        }
    }

    #[test]
    fn tiny_eigenvalue_keeps_relative_accuracy() {
        let m = Hermitian2::new(1.0, 2e-10, c(1e-12, 0.0));
        let e = m.eigendecompose();
        // λ_hi = 1 + 1e-24 / (1 - 2e-10) to leading order
        let exact_lo = 2e-10 - 1e-24;
        assert!((e.values[0] - exact_lo).abs() < 1e-25);
    }

    #[test]
    fn scalar_gamma0_doubles_gamma1() {
        let g1 = Hermitian2::new(0.3, -1.2, c(0.4, -0.9));
        let m = solve_symmetric_product(&Hermitian2::scaled_identity(0.5), &g1).unwrap();
        assert!(m.max_abs_diff(&(g1 * 2.0)) < 1e-14);
    }

    #[test]
    fn diagonal_moments_give_ratio_estimator() {
        let (a, b, g0, d) = (0.37, 0.21, 1.3, (-0.4f64).exp());
        let gamma0 = Hermitian2::diag(a * d, 1.0 - a * d);
        let gamma1 = Hermitian2::diag(b * d, g0 - b * d);
        let m = solve_symmetric_product(&gamma0, &gamma1).unwrap();
        let expected = Hermitian2::diag(b / a, (g0 - b * d) / (1.0 - a * d));
        assert!(m.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn degenerate_gamma0_is_reported() {
        let err = solve_symmetric_product(&Hermitian2::diag(1.0, 0.0), &Hermitian2::diag(1.0, 0.0));
        assert!(matches!(err, Err(Error::DegenerateGamma0 { .. })));
    }

    #[test]
    fn state_validation() {
        assert!(QubitState::new(Hermitian2::diag(0.4, 0.6)).is_ok());
        assert!(QubitState::new(Hermitian2::diag(0.4, 0.5)).is_err());
        assert!(QubitState::new(Hermitian2::new(0.5, 0.5, c(0.6, 0.0))).is_err());
    }

    fn hermitian() -> impl Strategy<Value = Hermitian2> {
        (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64)
            .prop_map(|(a, b, re, im)| Hermitian2::new(a, b, c(re, im)))
    }

    fn psd() -> impl Strategy<Value = Hermitian2> {
        (hermitian(), 1e-6..2.0f64).prop_map(|(h, shift)| {
            // h² is PSD; shifting keeps the minimum eigenvalue above 1e-6
            let s = h.square();
            let tr = s.trace() + 2.0 * shift;
            (s + Hermitian2::scaled_identity(shift)) * (1.0 / tr)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn eigendecomposition_reconstructs(m in hermitian()) {
            let e = m.eigendecompose();
            prop_assert!(e.values[0] <= e.values[1]);
            prop_assert!(e.reconstruct().max_abs_diff(&m) < 1e-12 * (1.0 + m.ee.abs() + m.gg.abs() + m.eg.norm()));
            for v in e.vectors {
                prop_assert!(((v[0].norm_sqr() + v[1].norm_sqr()).sqrt() - 1.0).abs() < 1e-12);
            }
            let overlap = e.vectors[0][0].conj() * e.vectors[1][0] + e.vectors[0][1].conj() * e.vectors[1][1];
            prop_assert!(overlap.norm() < 1e-12);
        }

        #[test]
        fn symmetric_product_residual(g0 in psd(), g1 in hermitian()) {
            let m = solve_symmetric_product(&g0, &g1).unwrap();
            let scale = 1.0 + m.ee.abs() + m.gg.abs() + m.eg.norm();
            prop_assert!(residual(&g0, &m, &g1) < 1e-10 * scale);
        }
    }
}
