//! Weyl-Heisenberg group in `C^N`, its orbits, and the two Clifford elements
//! used to cut out special subspaces.
//!
//! Coordinates are fixed by `sigma|a> = q^a |a>` and `tau|a> = |a+1 mod N>`
//! with `q = exp(2 pi i / N)`. Displacements are `D_ij = tau^i sigma^j` with
//! no further phase convention; every downstream quantity is a modulus.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numcore::{CMatrix, CVector};

/// Label `(i, j)` of the displacement `D_ij`, both taken mod `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitIndex {
    pub i: usize,
    pub j: usize,
}

impl OrbitIndex {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }

    /// All `N^2` labels in row-major `(i, j)` order.
    pub fn all(n: usize) -> impl Iterator<Item = OrbitIndex> {
        (0..n).flat_map(move |i| (0..n).map(move |j| OrbitIndex { i, j }))
    }

    pub fn add(self, other: OrbitIndex, n: usize) -> OrbitIndex {
        OrbitIndex::new((self.i + other.i) % n, (self.j + other.j) % n)
    }

    pub fn neg(self, n: usize) -> OrbitIndex {
        OrbitIndex::new((n - self.i % n) % n, (n - self.j % n) % n)
    }
}

/// Clock and shift matrices for dimension `N >= 2`.
#[derive(Clone, Debug)]
pub struct HWGroup {
    dim: usize,
    /// `q^k` for `k = 0..N`, computed from the reduced exponent.
    roots: Vec<Complex64>,
    sigma: CMatrix,
    tau: CMatrix,
}

impl HWGroup {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension {
                dim,
                reason: "the Weyl-Heisenberg group needs N >= 2",
            });
        }
        let roots: Vec<Complex64> = (0..dim)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / dim as f64))
            .collect();
        let sigma = CMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                roots[r]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let tau = CMatrix::permutation(dim, |a| (a + 1) % dim);
        Ok(Self {
            dim,
            roots,
            sigma,
            tau,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `q = exp(2 pi i / N)`.
    pub fn q(&self) -> Complex64 {
        self.roots[1]
    }

    /// `q^k` for any integer `k`.
    pub fn q_pow(&self, k: i64) -> Complex64 {
        self.roots[k.rem_euclid(self.dim as i64) as usize]
    }

    pub fn sigma(&self) -> &CMatrix {
        &self.sigma
    }

    pub fn tau(&self) -> &CMatrix {
        &self.tau
    }

    /// The matrix `tau^i sigma^j`: column `b` holds `q^{jb}` in row `b+i`.
    pub fn displacement(&self, idx: OrbitIndex) -> CMatrix {
        let n = self.dim;
        let (i, j) = (idx.i % n, idx.j % n);
        let mut m = CMatrix::zeros(n, n);
        for b in 0..n {
            m.set((b + i) % n, b, self.roots[(j * b) % n]);
        }
        m
    }

    /// `D_ij |v>` without forming the matrix.
    pub fn displace(&self, idx: OrbitIndex, v: &CVector) -> Result<CVector> {
        let n = self.dim;
        if v.dim() != n {
            return Err(Error::Dimension {
                expected: n,
                found: v.dim(),
            });
        }
        let (i, j) = (idx.i % n, idx.j % n);
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for b in 0..n {
            out[(b + i) % n] = self.roots[(j * b) % n] * v[b];
        }
        Ok(CVector::new(out))
    }

    /// The orbit `[D_ij |psi_0>]` in row-major `(i, j)` order.
    pub fn orbit(&self, fiducial: &CVector) -> Result<Vec<CVector>> {
        if fiducial.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: fiducial.dim(),
            });
        }
        fiducial.check_unit()?;
        OrbitIndex::all(self.dim)
            .map(|idx| self.displace(idx, fiducial))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffordKind {
    /// `A|a> = |-a mod N>`, odd `N`.
    Parity,
    /// `U|a> = |2a mod 7>`, the order-3 permutation for `N = 7`.
    ZaunerPermutation7,
}

/// A Clifford group element together with its order.
#[derive(Clone, Debug)]
pub struct CliffordElement {
    dim: usize,
    matrix: CMatrix,
    order: u32,
    kind: CliffordKind,
}

impl CliffordElement {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn kind(&self) -> CliffordKind {
        self.kind
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        self.matrix.mul_vec(v)
    }

    /// `U M U^dagger`.
    pub fn conjugate(&self, m: &CMatrix) -> Result<CMatrix> {
        self.matrix.mul(m)?.mul(&self.matrix.adjoint())
    }

    /// `exp(2 pi i k / order)`, the `k`-th candidate eigenvalue.
    pub fn eigenvalue(&self, k: u32) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * k as f64 / self.order as f64)
    }

    /// Multiplicity of each eigenvalue `exp(2 pi i k / order)`, `k = 0..order`,
    /// from the character formula `(1/r) sum_s conj(lambda)^s tr(U^s)`.
    pub fn eigenspace_dims(&self) -> Vec<usize> {
        let r = self.order;
        let traces: Vec<Complex64> = (0..r).map(|s| self.matrix.pow(s).trace()).collect();
        (0..r)
            .map(|k| {
                let lambda = self.eigenvalue(k);
                let sum: Complex64 = traces
                    .iter()
                    .enumerate()
                    .map(|(s, t)| lambda.conj().powu(s as u32) * t)
                    .sum();
                (sum.re / r as f64).round() as usize
            })
            .collect()
    }
}

/// The order-2 element `A|a> = |-a mod N>` for odd `N >= 3`.
pub fn parity_operator(dim: usize) -> Result<CliffordElement> {
    if dim < 3 || dim.is_multiple_of(2) {
        return Err(Error::UnsupportedDimension {
            dim,
            reason: "the parity operator is only built for odd N >= 3",
        });
    }
    Ok(CliffordElement {
        dim,
        matrix: CMatrix::permutation(dim, |a| (dim - a) % dim),
        order: 2,
        kind: CliffordKind::Parity,
    })
}

/// The order-3 permutation `U|a> = |2a mod 7>`.
pub fn zauner7_operator() -> CliffordElement {
    CliffordElement {
        dim: 7,
        matrix: CMatrix::permutation(7, |a| (2 * a) % 7),
        order: 3,
        kind: CliffordKind::ZaunerPermutation7,
    }
}
