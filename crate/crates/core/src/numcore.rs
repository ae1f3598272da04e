//! Dense complex arithmetic, Fubini-Study sampling and exact sphere moments.
//!
//! Everything above this module (orbits, frame potentials, averages) works
//! with the small dense types defined here. Matrices are at most a few dozen
//! rows, so a plain row-major `Vec` is all that is needed.

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Tolerance on `|<v|v> - 1|` accepted for unit vectors on ingestion.
pub const UNIT_TOL: f64 = 1e-12;

/// A vector in `C^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector {
    entries: Vec<Complex64>,
}

impl CVector {
    /// Wraps raw components without any normalization check.
    pub fn new(entries: Vec<Complex64>) -> Self {
        assert!(!entries.is_empty(), "CVector must have dim >= 1");
        Self { entries }
    }

    /// Builds a unit vector. Components within [`UNIT_TOL`] of unit norm are
    /// silently renormalized; anything further off is rejected.
    pub fn unit(entries: Vec<Complex64>) -> Result<Self> {
        let v = Self::new(entries);
        v.check_unit()?;
        Ok(v.normalized())
    }

    /// Builds a vector from real components.
    pub fn from_real(re: &[f64]) -> Self {
        Self::new(re.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Standard basis vector `|a>`.
    pub fn basis(dim: usize, a: usize) -> Self {
        let mut entries = vec![Complex64::zero(); dim];
        entries[a] = Complex64::one();
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![Complex64::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Fails with [`Error::Norm`] when `|<v|v> - 1| > UNIT_TOL`.
    pub fn check_unit(&self) -> Result<()> {
        let deviation = (self.norm_sqr() - 1.0).abs();
        if deviation > UNIT_TOL || !deviation.is_finite() {
            return Err(Error::Norm { deviation });
        }
        Ok(())
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scale(Complex64::new(1.0 / n, 0.0))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.entries.iter().map(|z| z * c).collect())
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &CVector) -> Self {
        Self::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b * t)
                .collect(),
        )
    }

    /// Real part of `<self|other>`: the Euclidean inner product on `R^{2 dim}`.
    pub fn real_dot(&self, other: &CVector) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// Largest componentwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CVector) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for CVector {
    type Output = Complex64;

    fn index(&self, a: usize) -> &Complex64 {
        &self.entries[a]
    }
}

/// `<u|v> = sum_a conj(u_a) v_a`.
pub fn inner(u: &CVector, v: &CVector) -> Result<Complex64> {
    if u.dim() != v.dim() {
        return Err(Error::Dimension {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    Ok(inner_unchecked(u.entries(), v.entries()))
}

#[inline]
pub(crate) fn inner_unchecked(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::one()
            } else {
                Complex64::zero()
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Permutation matrix sending `|a>` to `|perm(a)>`.
    pub fn permutation(n: usize, perm: impl Fn(usize) -> usize) -> Self {
        let mut m = Self::zeros(n, n);
        for a in 0..n {
            m.set(perm(a), a, Complex64::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, z: Complex64) {
        self.data[r * self.cols + c] = z;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == Complex64::zero() {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &CVector) -> Result<CVector> {
        if self.cols != v.dim() {
            return Err(Error::Dimension {
                expected: self.cols,
                found: v.dim(),
            });
        }
        Ok(CVector::new(
            (0..self.rows)
                .map(|r| inner_unconj(&self.data[r * self.cols..(r + 1) * self.cols], v.entries()))
                .collect(),
        ))
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn pow(&self, k: u32) -> CMatrix {
        assert_eq!(self.rows, self.cols, "pow needs a square matrix");
        let mut out = CMatrix::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self).expect("square");
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|a| self.get(a, a)).sum()
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// `max |A_rc - B_rc|`; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.adjoint().mul(self).expect("shapes agree");
        prod.max_abs_diff(&CMatrix::identity(self.cols))
    }
}

#[inline]
fn inner_unconj(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// If `a = w * b` for a unit-modulus `w` (within `tol`, entrywise), returns `w`.
pub fn phase_ratio(a: &CMatrix, b: &CMatrix, tol: f64) -> Option<Complex64> {
    if a.rows != b.rows || a.cols != b.cols {
        return None;
    }
    let (pivot, bmax) = b
        .data
        .iter()
        .enumerate()
        .map(|(i, z)| (i, z.norm()))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if bmax == 0.0 {
        return None;
    }
    let w = a.data[pivot] / b.data[pivot];
    if (w.norm() - 1.0).abs() > tol {
        return None;
    }
    (a.max_abs_diff(&b.scale(w)) <= tol).then_some(w)
}

/// Independently seeded random stream. Each worker owns one; streams with the
/// same `(seed, stream)` pair always produce the same draws.
#[derive(Clone, Debug)]
pub struct RngStream {
    rng: ChaCha8Rng,
    seed: u64,
    stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, seed, stream }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

/// Draws a unit vector from the Fubini-Study measure on `C^dim`: a complex
/// Gaussian vector, normalized.
pub fn sample_fs(dim: usize, rng: &mut RngStream) -> CVector {
    assert!(dim >= 1, "dimension must be positive");
    loop {
        let entries: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.normal(), rng.normal()))
            .collect();
        let v = CVector::new(entries);
        // zero norm has probability zero but would poison the normalization
        if v.norm_sqr() > 0.0 {
            return v.normalized();
        }
    }
}

/// Exponents `m_a` of the monomial `prod_a |Z_a|^{2 m_a}` on the unit sphere of `C^dim`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MomentKey {
    dim: usize,
    exponents: Vec<u32>,
}

impl MomentKey {
    /// `exponents` may be shorter than `dim`; missing entries are zero.
    pub fn new(dim: usize, exponents: Vec<u32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "moment dimension must be >= 1".into(),
            ));
        }
        let nonzero = exponents.iter().filter(|&&m| m > 0).count();
        if nonzero > dim {
            return Err(Error::Dimension {
                expected: dim,
                found: exponents.len(),
            });
        }
        Ok(Self { dim, exponents })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn total_degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// An exact rational together with its nearest double.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exact(pub BigRational);

impl Exact {
    pub fn new(num: i64, den: i64) -> Self {
        Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.0)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl From<BigRational> for Exact {
    fn from(r: BigRational) -> Self {
        Exact(r)
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Fubini-Study average of `prod_a |Z_a|^{2 m_a}` over unit vectors in `C^d`:
/// `(d-1)! prod_a m_a! / (d-1+M)!` with `M = sum_a m_a`.
pub fn fs_moment(key: &MomentKey) -> Exact {
    let d = key.dim as u32;
    let num = key
        .exponents
        .iter()
        .fold(factorial(d - 1), |acc, &m| acc * factorial(m));
    let den = factorial(d - 1 + key.total_degree());
    Exact(BigRational::new(num, den))
}
