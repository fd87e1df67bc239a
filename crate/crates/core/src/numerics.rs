//! Small dense complex linear algebra and power-of-two FFTs.
//!
//! Everything here is 2×2: the network has two antennas per node, so the
//! eigen- and singular-value problems never get bigger than that. Every
//! eigen/singular vector returned is unit-norm with its first non-negligible
//! component rotated onto the positive real axis, which makes the outputs
//! bit-reproducible.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Relative eigenvalue gap below which an eigenbasis is treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Components with modulus below this (on a unit vector) are skipped by the
/// phase canonicalization.
const CANON_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("eigenvalues coincide; eigenvectors are not unique")]
    DegenerateEigenbasis,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("generalized eigenvalues coincide")]
    DegeneratePencil,
    #[error("matrix is numerically zero")]
    ZeroMatrix,
    #[error("matrix is singular")]
    Singular,
    #[error("bad length: expected {expected}, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("FFT size {0} is not a power of two")]
    NotPowerOfTwo(usize),
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A complex 2-vector.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct CVec2(pub [C64; 2]);

impl CVec2 {
    pub const ZERO: CVec2 = CVec2([C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);

    pub fn new(a: C64, b: C64) -> Self {
        CVec2([a, b])
    }

    pub fn e1() -> Self {
        CVec2([c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn e2() -> Self {
        CVec2([c(0.0, 0.0), c(1.0, 0.0)])
    }

    /// Unit basis vector for antenna `idx` (0 or 1).
    pub fn basis(idx: usize) -> Self {
        if idx == 0 {
            Self::e1()
        } else {
            Self::e2()
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Inner product `selfᴴ other`.
    pub fn dot(&self, other: &CVec2) -> C64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn conj(&self) -> Self {
        CVec2([self.0[0].conj(), self.0[1].conj()])
    }

    pub fn scale(&self, s: C64) -> Self {
        CVec2([self.0[0] * s, self.0[1] * s])
    }

    pub fn scale_re(&self, s: f64) -> Self {
        CVec2([self.0[0] * s, self.0[1] * s])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Unit-norm copy; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self.scale_re(1.0 / n))
        } else {
            None
        }
    }

    /// Rotates the vector so its first non-negligible component is real and
    /// positive. Assumes a (near) unit-norm input.
    pub fn canonical_phase(&self) -> Self {
        let scale = self.norm().max(f64::MIN_POSITIVE);
        for (idx, z) in self.0.iter().enumerate() {
            let m = z.norm();
            if m > CANON_TOL * scale {
                let mut out = self.scale(z.conj() / m);
                // Pin the leading entry exactly onto the real axis.
                out.0[idx] = c(out.0[idx].norm(), 0.0);
                return out;
            }
        }
        *self
    }

    /// Normalizes and canonicalizes.
    pub fn canonical_unit(&self) -> Option<Self> {
        self.normalized().map(|v| v.canonical_phase())
    }

    /// Chordal distance `sqrt(1 - |aᴴb|²)` between two unit vectors.
    pub fn chordal_distance(&self, other: &CVec2) -> f64 {
        (1.0 - self.dot(other).norm_sqr()).max(0.0).sqrt()
    }

    /// Vector orthogonal to `self` with the same norm.
    pub fn orthogonal(&self) -> Self {
        CVec2([-self.0[1].conj(), self.0[0].conj()])
    }
}

impl Add for CVec2 {
    type Output = CVec2;
    fn add(self, o: CVec2) -> CVec2 {
        CVec2([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl Sub for CVec2 {
    type Output = CVec2;
    fn sub(self, o: CVec2) -> CVec2 {
        CVec2([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

impl Neg for CVec2 {
    type Output = CVec2;
    fn neg(self) -> CVec2 {
        CVec2([-self.0[0], -self.0[1]])
    }
}

/// A complex 2×2 matrix, row-major.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct CMat2(pub [[C64; 2]; 2]);

impl fmt::Debug for CMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.0[0][0], self.0[0][1], self.0[1][0], self.0[1][1]
        )
    }
}

impl CMat2 {
    pub const ZERO: CMat2 = CMat2([[C64::new(0.0, 0.0); 2]; 2]);

    pub fn new(a: C64, b: C64, c_: C64, d: C64) -> Self {
        CMat2([[a, b], [c_, d]])
    }

    pub fn identity() -> Self {
        Self::diag(c(1.0, 0.0), c(1.0, 0.0))
    }

    pub fn diag(a: C64, d: C64) -> Self {
        CMat2([[a, c(0.0, 0.0)], [c(0.0, 0.0), d]])
    }

    pub fn from_real(a: f64, b: f64, c_: f64, d: f64) -> Self {
        Self::new(c(a, 0.0), c(b, 0.0), c(c_, 0.0), c(d, 0.0))
    }

    /// Matrix with columns `a` and `b`.
    pub fn from_cols(a: CVec2, b: CVec2) -> Self {
        CMat2([[a.0[0], b.0[0]], [a.0[1], b.0[1]]])
    }

    /// Rank-one outer product `a bᴴ`.
    pub fn outer(a: &CVec2, b: &CVec2) -> Self {
        CMat2([
            [a.0[0] * b.0[0].conj(), a.0[0] * b.0[1].conj()],
            [a.0[1] * b.0[0].conj(), a.0[1] * b.0[1].conj()],
        ])
    }

    pub fn col(&self, j: usize) -> CVec2 {
        CVec2([self.0[0][j], self.0[1][j]])
    }

    pub fn row(&self, i: usize) -> CVec2 {
        CVec2(self.0[i])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        CMat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        CMat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn norm_fro_sqr(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_fro_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn mul_vec(&self, v: &CVec2) -> CVec2 {
        let m = &self.0;
        CVec2([
            m[0][0] * v.0[0] + m[0][1] * v.0[1],
            m[1][0] * v.0[0] + m[1][1] * v.0[1],
        ])
    }

    /// Row vector product `uᴴ M`, returned as the column vector `Mᴴ u`.
    pub fn adjoint_mul_vec(&self, u: &CVec2) -> CVec2 {
        self.adjoint().mul_vec(u)
    }

    /// Bilinear form `uᴴ M v`.
    pub fn sandwich(&self, u: &CVec2, v: &CVec2) -> C64 {
        u.dot(&self.mul_vec(v))
    }

    pub fn inverse(&self) -> Result<Self, NumericsError> {
        let d = self.det();
        if d.norm() <= f64::MIN_POSITIVE * 1e4 || !d.is_finite() {
            return Err(NumericsError::Singular);
        }
        let m = &self.0;
        let inv = CMat2([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]).scale(d.inv());
        if inv.is_finite() {
            Ok(inv)
        } else {
            Err(NumericsError::Singular)
        }
    }

    /// Solves `M x = b`.
    pub fn solve(&self, b: &CVec2) -> Result<CVec2, NumericsError> {
        Ok(self.inverse()?.mul_vec(b))
    }

    /// Spectral condition number `σ_max / σ_min`; infinite when singular.
    pub fn condition_number(&self) -> f64 {
        let (lo, hi) = singular_values(self);
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        let diff = *self - self.adjoint();
        diff.norm() <= rel_tol * self.norm().max(f64::MIN_POSITIVE)
    }
}

impl Add for CMat2 {
    type Output = CMat2;
    fn add(self, o: CMat2) -> CMat2 {
        let (a, b) = (&self.0, &o.0);
        CMat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for CMat2 {
    type Output = CMat2;
    fn sub(self, o: CMat2) -> CMat2 {
        self + o.scale(c(-1.0, 0.0))
    }
}

impl Mul for CMat2 {
    type Output = CMat2;
    fn mul(self, o: CMat2) -> CMat2 {
        let (a, b) = (&self.0, &o.0);
        CMat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Mul<CVec2> for CMat2 {
    type Output = CVec2;
    fn mul(self, v: CVec2) -> CVec2 {
        self.mul_vec(&v)
    }
}

/// An eigenvalue together with its unit eigenvector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenPair {
    pub value: C64,
    pub vector: CVec2,
}

/// Null-space direction of `M - λI` for a 2×2 `M`, picked from the two
/// candidate rows so that cancellation is avoided.
fn eigvec_for(m: &CMat2, lambda: C64) -> Option<CVec2> {
    let [[a, b], [c_, d]] = m.0;
    let c1 = CVec2([b, lambda - a]);
    let c2 = CVec2([lambda - d, c_]);
    let pick = if c1.norm_sqr() >= c2.norm_sqr() { c1 } else { c2 };
    pick.canonical_unit()
}

/// Full eigendecomposition of a general complex 2×2 matrix.
///
/// Eigenvalues come back in descending modulus (ties broken by descending
/// real part). Coincident eigenvalues are rejected because the eigenvectors
/// are then not unique.
pub fn eig2x2(m: &CMat2) -> Result<[EigenPair; 2], NumericsError> {
    let scale = m.norm();
    if !m.is_finite() {
        return Err(NumericsError::DegenerateEigenbasis);
    }
    let half = m.trace() * 0.5;
    let det = m.det();
    let disc = (half * half - det).sqrt();
    let (p, q) = (half + disc, half - disc);
    let big = if p.norm() >= q.norm() { p } else { q };
    // Product form for the small root avoids cancellation.
    let small = if big.norm() > 0.0 { det / big } else { half * 2.0 - big };
    if (big - small).norm() <= DEGENERACY_TOL * scale || scale == 0.0 {
        return Err(NumericsError::DegenerateEigenbasis);
    }
    let (mut l1, mut l2) = (big, small);
    let (n1, n2) = (l1.norm(), l2.norm());
    let tie = (n1 - n2).abs() <= DEGENERACY_TOL * n1.max(n2);
    if (tie && l2.re > l1.re) || (!tie && n2 > n1) {
        std::mem::swap(&mut l1, &mut l2);
    }
    let v1 = eigvec_for(m, l1).ok_or(NumericsError::DegenerateEigenbasis)?;
    let v2 = eigvec_for(m, l2).ok_or(NumericsError::DegenerateEigenbasis)?;
    Ok([
        EigenPair { value: l1, vector: v1 },
        EigenPair { value: l2, vector: v2 },
    ])
}

/// Eigendecomposition of a Hermitian 2×2 matrix: `(values, vectors)` in
/// ascending order. `None` when the two eigenvalues coincide to within
/// [`DEGENERACY_TOL`].
pub(crate) fn hermitian_eig2(h: &CMat2) -> Option<([f64; 2], [CVec2; 2])> {
    let a = h.0[0][0].re;
    let d = h.0[1][1].re;
    let b = (h.0[0][1] + h.0[1][0].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let radius = (0.5 * (a - d)).hypot(b.norm());
    let scale = h.norm().max(f64::MIN_POSITIVE);
    if radius <= DEGENERACY_TOL * scale {
        return None;
    }
    let lo = mean - radius;
    let hi = mean + radius;
    let herm = CMat2([[c(a, 0.0), b], [b.conj(), c(d, 0.0)]]);
    let v_hi = eigvec_for(&herm, c(hi, 0.0))?;
    // Orthogonal complement is exact for Hermitian matrices.
    let v_lo = v_hi.orthogonal().canonical_phase();
    Some(([lo, hi], [v_lo, v_hi]))
}

/// Largest and smallest singular values `(σ_min, σ_max)`.
pub fn singular_values(m: &CMat2) -> (f64, f64) {
    let fro2 = m.norm_fro_sqr();
    let det = m.det().norm();
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    let hi2 = 0.5 * (fro2 + disc);
    let hi = hi2.sqrt();
    let lo = if hi > 0.0 { det / hi } else { 0.0 };
    (lo, hi)
}

/// Generalized eigenvector with maximum eigenvalue of the Hermitian pencil
/// `(a, b)`, i.e. the maximizer of the Rayleigh quotient `vᴴAv / vᴴBv`.
///
/// `b` must be Hermitian positive definite. Solved by Cholesky whitening of
/// `b` followed by a Hermitian eigenproblem.
pub fn gen_eig_max(a: &CMat2, b: &CMat2) -> Result<(f64, CVec2), NumericsError> {
    let bn = b.norm();
    let b_eigs = hermitian_eig2(b)
        .map(|(vals, _)| vals[0])
        .unwrap_or_else(|| 0.5 * b.trace().re);
    if !(bn > 0.0) || b_eigs <= 1e-14 * bn || !b.is_finite() {
        return Err(NumericsError::NotPositiveDefinite);
    }
    // B = L Lᴴ, L lower triangular.
    let l11 = b.0[0][0].re.sqrt();
    let l21 = b.0[1][0] / l11;
    let l22_sq = b.0[1][1].re - l21.norm_sqr();
    if !(l22_sq > 0.0) {
        return Err(NumericsError::NotPositiveDefinite);
    }
    let l22 = l22_sq.sqrt();
    let zero = c(0.0, 0.0);
    let l_inv = CMat2([
        [c(1.0 / l11, 0.0), zero],
        [-l21 / (l11 * l22), c(1.0 / l22, 0.0)],
    ]);
    let whitened = l_inv * *a * l_inv.adjoint();
    let (vals, vecs) = hermitian_eig2(&whitened).ok_or(NumericsError::DegeneratePencil)?;
    let v = l_inv
        .adjoint()
        .mul_vec(&vecs[1])
        .canonical_unit()
        .ok_or(NumericsError::DegeneratePencil)?;
    Ok((vals[1], v))
}

/// Dominant singular triple `(σ_max, right, left)` with `M·right = σ_max·left`.
///
/// When both singular values coincide the right vector defaults to `e₁`.
pub fn dominant_singular_pair(m: &CMat2) -> Result<(f64, CVec2, CVec2), NumericsError> {
    if !(m.norm() > 1e-300) {
        return Err(NumericsError::ZeroMatrix);
    }
    let gram = m.adjoint() * *m;
    let right = match hermitian_eig2(&gram) {
        Some((_, vecs)) => vecs[1],
        None => CVec2::e1(),
    };
    let mv = m.mul_vec(&right);
    let sigma = mv.norm();
    let left = if sigma > 0.0 {
        mv.scale_re(1.0 / sigma)
    } else {
        CVec2::e1()
    };
    Ok((sigma, right, left))
}

/// Length-`n` spectrum produced by [`fft`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumVec {
    pub bins: Vec<C64>,
}

impl SpectrumVec {
    pub fn n_fft(&self) -> usize {
        self.bins.len()
    }
}

/// Power-of-two FFT plan backed by `rustfft`.
///
/// The forward transform is unnormalized; the inverse carries the `1/n`.
#[derive(Clone)]
pub struct FftPlan {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FftPlan").field("n", &self.n).finish()
    }
}

impl FftPlan {
    pub fn new(n: usize) -> Result<Self, NumericsError> {
        if n == 0 || !n.is_power_of_two() {
            return Err(NumericsError::NotPowerOfTwo(n));
        }
        let mut planner = FftPlanner::new();
        Ok(FftPlan {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn check(&self, len: usize) -> Result<(), NumericsError> {
        if len != self.n {
            return Err(NumericsError::BadLength {
                expected: self.n,
                got: len,
            });
        }
        Ok(())
    }

    /// In-place forward transform.
    pub fn forward(&self, buf: &mut [C64]) -> Result<(), NumericsError> {
        self.check(buf.len())?;
        self.fwd.process(buf);
        Ok(())
    }

    /// In-place inverse transform, scaled by `1/n`.
    pub fn inverse(&self, buf: &mut [C64]) -> Result<(), NumericsError> {
        self.check(buf.len())?;
        self.inv.process(buf);
        let s = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|z| *z *= s);
        Ok(())
    }
}

thread_local! {
    static PLANS: RefCell<HashMap<usize, Rc<FftPlan>>> = RefCell::new(HashMap::new());
}

/// Cached plan for size `n` on the current thread.
pub fn plan(n: usize) -> Result<Rc<FftPlan>, NumericsError> {
    PLANS.with(|p| {
        if let Some(pl) = p.borrow().get(&n) {
            return Ok(pl.clone());
        }
        let pl = Rc::new(FftPlan::new(n)?);
        p.borrow_mut().insert(n, pl.clone());
        Ok(pl)
    })
}

/// Forward `n`-point FFT (unnormalized).
pub fn fft(x: &[C64], n: usize) -> Result<SpectrumVec, NumericsError> {
    let p = plan(n)?;
    let mut bins = x.to_vec();
    p.forward(&mut bins)?;
    Ok(SpectrumVec { bins })
}

/// Inverse `n`-point FFT, scaled by `1/n`.
pub fn ifft(x: &[C64], n: usize) -> Result<Vec<C64>, NumericsError> {
    let p = plan(n)?;
    let mut out = x.to_vec();
    p.inverse(&mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_c(rng: &mut ChaCha8Rng) -> C64 {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }

    fn rand_mat(rng: &mut ChaCha8Rng) -> CMat2 {
        CMat2::new(rand_c(rng), rand_c(rng), rand_c(rng), rand_c(rng))
    }

    fn rand_hpd(rng: &mut ChaCha8Rng) -> CMat2 {
        let g = rand_mat(rng);
        g * g.adjoint() + CMat2::identity().scale(c(0.05, 0.0))
    }

    #[test]
    fn identity_is_degenerate() {
        assert_eq!(
            eig2x2(&CMat2::identity()),
            Err(NumericsError::DegenerateEigenbasis)
        );
    }

    #[test]
    fn diagonal_eigenpairs() {
        let [p1, p2] = eig2x2(&CMat2::from_real(2.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(p1.value, c(2.0, 0.0));
        assert_eq!(p1.vector, CVec2::e1());
        assert_eq!(p2.value, c(1.0, 0.0));
        assert_eq!(p2.vector, CVec2::e2());
    }

    #[test]
    fn equal_modulus_orders_by_real_part() {
        let [p1, p2] = eig2x2(&CMat2::from_real(-1.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(p1.value.re, 1.0);
        assert_eq!(p2.value.re, -1.0);
    }

    #[test]
    fn eig_matches_characteristic_polynomial_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let m = rand_mat(&mut rng);
            let pairs = eig2x2(&m).unwrap();
            let scale = m.norm();
            // Oracle: textbook quadratic formula on det(M - λI).
            let tr = m.trace();
            let det = m.det();
            let s = (tr * tr - det * 4.0).sqrt();
            let roots = [(tr + s) * 0.5, (tr - s) * 0.5];
            for p in &pairs {
                let r = m.mul_vec(&p.vector) - p.vector.scale(p.value);
                assert!(r.norm() <= 1e-10 * scale, "residual {}", r.norm());
                assert!((p.vector.norm() - 1.0).abs() < 1e-12);
                let nearest = roots
                    .iter()
                    .map(|r| (r - p.value).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(nearest <= 1e-9 * scale);
            }
            assert!(pairs[0].value.norm() >= pairs[1].value.norm());
            assert!((pairs[0].value + pairs[1].value - tr).norm() <= 1e-10 * scale);
            assert!((pairs[0].value * pairs[1].value - det).norm() <= 1e-10 * scale * scale);
            // First non-negligible component is real positive.
            let v = pairs[0].vector;
            let lead = if v.0[0].norm() > CANON_TOL { v.0[0] } else { v.0[1] };
            assert!(lead.im == 0.0 && lead.re > 0.0);
        }
    }

    #[test]
    fn gen_eig_reduces_to_standard_problem() {
        let a = CMat2::from_real(4.0, 0.0, 0.0, 1.0);
        let (l, v) = gen_eig_max(&a, &CMat2::identity()).unwrap();
        assert!((l - 4.0).abs() < 1e-14);
        assert_eq!(v, CVec2::e1());
        let (l, v) = gen_eig_max(&a, &CMat2::identity().scale(c(2.0, 0.0))).unwrap();
        assert!((l - 2.0).abs() < 1e-14);
        assert_eq!(v, CVec2::e1());
    }

    #[test]
    fn gen_eig_rejects_indefinite() {
        let a = CMat2::identity();
        let b = CMat2::from_real(1.0, 0.0, 0.0, -1.0);
        assert_eq!(gen_eig_max(&a, &b), Err(NumericsError::NotPositiveDefinite));
        assert_eq!(
            gen_eig_max(&a, &CMat2::ZERO),
            Err(NumericsError::NotPositiveDefinite)
        );
    }

    #[test]
    fn gen_eig_against_inverse_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let g = rand_mat(&mut rng);
            let a = g + g.adjoint();
            let b = rand_hpd(&mut rng);
            let (l, v) = gen_eig_max(&a, &b).unwrap();
            let r = a.mul_vec(&v) - b.mul_vec(&v).scale_re(l);
            assert!(r.norm() <= 1e-10 * (a.norm() + b.norm()));
            // Oracle: eigenvalues of B⁻¹A via the general solver.
            let oracle = eig2x2(&(b.inverse().unwrap() * a)).unwrap();
            let lmax = oracle
                .iter()
                .map(|p| p.value.re)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((l - lmax).abs() <= 1e-9 * (1.0 + lmax.abs()));
            let ov = oracle.iter().find(|p| (p.value.re - lmax).abs() < 1e-12).unwrap();
            assert!(v.chordal_distance(&ov.vector) < 1e-7);
            // Rayleigh quotient bound.
            for _ in 0..100 {
                let x = CVec2::new(rand_c(&mut rng), rand_c(&mut rng));
                let q = a.sandwich(&x, &x).re / b.sandwich(&x, &x).re;
                assert!(l >= q - 1e-10 * l.abs().max(1.0));
            }
        }
    }

    #[test]
    fn dominant_pair_cases() {
        let (s, r, l) = dominant_singular_pair(&CMat2::from_real(2.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!((s, r, l), (2.0, CVec2::e1(), CVec2::e1()));
        let (s, r, _) = dominant_singular_pair(&CMat2::identity()).unwrap();
        assert_eq!((s, r), (1.0, CVec2::e1()));
        assert_eq!(
            dominant_singular_pair(&CMat2::ZERO),
            Err(NumericsError::ZeroMatrix)
        );
    }

    #[test]
    fn dominant_pair_against_gram_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let m = rand_mat(&mut rng);
            let (s, r, l) = dominant_singular_pair(&m).unwrap();
            let gram = eig2x2(&(m.adjoint() * m)).unwrap();
            let lmax = gram[0].value.re;
            assert!((s * s - lmax).abs() <= 1e-10 * lmax);
            assert!((m.mul_vec(&r).norm() - s).abs() <= 1e-10 * m.norm());
            assert!((m.mul_vec(&r) - l.scale_re(s)).norm() <= 1e-10 * m.norm());
            // Dominates every entry.
            assert!(s >= m.0[0][0].norm() - 1e-12);
        }
    }

    #[test]
    fn deterministic_outputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = rand_mat(&mut rng);
        let a = eig2x2(&m).unwrap();
        let b = eig2x2(&m).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn fft_impulse_and_tone() {
        let mut x = vec![c(0.0, 0.0); 64];
        x[0] = c(1.0, 0.0);
        let s = fft(&x, 64).unwrap();
        assert!(s.bins.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-14));
        let k = 5;
        let tone: Vec<C64> = (0..64)
            .map(|n| C64::from_polar(1.0, 2.0 * PI * (k * n) as f64 / 64.0))
            .collect();
        let s = fft(&tone, 64).unwrap();
        for (i, z) in s.bins.iter().enumerate() {
            let want = if i == k { 64.0 } else { 0.0 };
            assert!((z - c(want, 0.0)).norm() < 1e-11);
        }
    }

    #[test]
    fn fft_bad_length() {
        assert!(matches!(
            fft(&[c(0.0, 0.0); 3], 4),
            Err(NumericsError::BadLength { .. })
        ));
        assert!(matches!(fft(&[], 6), Err(NumericsError::NotPowerOfTwo(6))));
    }

    #[test]
    fn fft_matches_naive_dft() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<C64> = (0..32).map(|_| rand_c(&mut rng)).collect();
        let s = fft(&x, 32).unwrap();
        for k in 0..32 {
            let want: C64 = x
                .iter()
                .enumerate()
                .map(|(n, v)| v * C64::from_polar(1.0, -2.0 * PI * (k * n) as f64 / 32.0))
                .sum();
            assert!((s.bins[k] - want).norm() < 1e-12);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn cvec(n: usize) -> impl Strategy<Value = Vec<C64>> {
            prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), n)
                .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
        }

        proptest! {
            #[test]
            fn round_trip_and_parseval(x in cvec(64)) {
                let s = fft(&x, 64).unwrap();
                let back = ifft(&s.bins, 64).unwrap();
                let e: f64 = x.iter().map(|z| z.norm_sqr()).sum();
                for (a, b) in x.iter().zip(&back) {
                    prop_assert!((a - b).norm() <= 1e-12 * e.sqrt().max(1.0));
                }
                let es: f64 = s.bins.iter().map(|z| z.norm_sqr()).sum::<f64>() / 64.0;
                prop_assert!((e - es).abs() <= 1e-10 * e.max(1e-300));
            }
        }
    }
}
