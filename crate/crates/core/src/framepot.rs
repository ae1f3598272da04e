//! Frame potentials `F_1`, `F_2`, the SIC distance `f`, and its orbit form `f_H`.
//!
//! `f_H` has two evaluation routes that are kept independent: the direct sum
//! over orbit overlaps ([`f_h_direct`]) and the `O(N^3)` quartic form
//!
//! ```text
//! f_H = (N^3/2) ( sum_{i,k} |S_ik|^2 - 2/(N+1) ),
//! S_ik = sum_a conj(Z_a) conj(Z_{a+k-i}) Z_{a+k} Z_{a-i}
//! ```
//!
//! used by [`f_h_fast`] and [`f_h_gradient`].

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heisenberg::{HWGroup, OrbitIndex};
use crate::numcore::{inner_unchecked, CVector};

fn check_same_dim(vectors: &[CVector]) -> Result<usize> {
    let dim = vectors.first().map(CVector::dim).ok_or(Error::Count {
        expected: 1,
        found: 0,
    })?;
    for v in vectors {
        if v.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: v.dim(),
            });
        }
    }
    Ok(dim)
}

/// All `|<psi_I|psi_J>|^2`, row-major, diagonal included.
fn overlap_table(vectors: &[CVector]) -> Vec<f64> {
    let m = vectors.len();
    let mut out = vec![0.0; m * m];
    for a in 0..m {
        out[a * m + a] = vectors[a].norm_sqr().powi(2);
        for b in a + 1..m {
            let o = inner_unchecked(vectors[a].entries(), vectors[b].entries()).norm_sqr();
            out[a * m + b] = o;
            out[b * m + a] = o;
        }
    }
    out
}

/// `F_t = sum_{I,J} |<psi_I|psi_J>|^{2t}` for `t` in `{1, 2}`, diagonal terms included.
pub fn frame_potential(vectors: &[CVector], t: u32) -> Result<f64> {
    if t != 1 && t != 2 {
        return Err(Error::UnsupportedOrder(t));
    }
    check_same_dim(vectors)?;
    for v in vectors {
        v.check_unit()?;
    }
    Ok(overlap_table(vectors)
        .iter()
        .map(|o| o.powi(t as i32))
        .sum())
}

fn check_sic_count(vectors: &[CVector]) -> Result<usize> {
    let n = check_same_dim(vectors)?;
    if vectors.len() != n * n {
        return Err(Error::Count {
            expected: n * n,
            found: vectors.len(),
        });
    }
    for v in vectors {
        v.check_unit()?;
    }
    Ok(n)
}

/// `f = (1/2) sum_{I != J} (|<psi_I|psi_J>|^2 - 1/(N+1))^2` over exactly `N^2`
/// unit vectors. Zero exactly on a SIC.
pub fn f_general(vectors: &[CVector]) -> Result<f64> {
    let n = check_sic_count(vectors)?;
    let m = vectors.len();
    let target = 1.0 / (n as f64 + 1.0);
    let table = overlap_table(vectors);
    let mut sum = 0.0;
    for a in 0..m {
        for b in 0..m {
            if a != b {
                sum += (table[a * m + b] - target).powi(2);
            }
        }
    }
    Ok(0.5 * sum)
}

/// `F_1`, `F_2` and `f` for a set of `N^2` vectors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameReport {
    pub f1: f64,
    pub f2: f64,
    pub f: f64,
    pub n_vectors: usize,
    pub dim: usize,
}

impl FrameReport {
    pub fn from_vectors(vectors: &[CVector]) -> Result<Self> {
        let dim = check_sic_count(vectors)?;
        let table = overlap_table(vectors);
        Ok(Self {
            f1: table.iter().sum(),
            f2: table.iter().map(|o| o * o).sum(),
            f: f_general(vectors)?,
            n_vectors: vectors.len(),
            dim,
        })
    }

    /// The same quantity with roundoff below zero clamped away.
    pub fn f_clamped(&self) -> f64 {
        clamp_roundoff(self.f)
    }
}

/// Maps values in `[-1e-10, 0)` to zero; leaves everything else alone.
pub fn clamp_roundoff(x: f64) -> f64 {
    if (-1e-10..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

/// `|<psi_0|D_ij psi_0>|^2` for all `(i, j)`, row-major.
pub fn orbit_overlaps(g: &HWGroup, fiducial: &CVector) -> Result<Vec<f64>> {
    let orbit = g.orbit(fiducial)?;
    Ok(orbit
        .iter()
        .map(|v| inner_unchecked(fiducial.entries(), v.entries()).norm_sqr())
        .collect())
}

/// `f_H = (N^2/2) sum_{(i,j) != (0,0)} (|<psi_0|D_ij psi_0>|^2 - 1/(N+1))^2`.
pub fn f_h_direct(g: &HWGroup, fiducial: &CVector) -> Result<f64> {
    let n = g.dim();
    let target = 1.0 / (n as f64 + 1.0);
    let overlaps = orbit_overlaps(g, fiducial)?;
    let sum: f64 = overlaps
        .iter()
        .zip(OrbitIndex::all(n))
        .filter(|(_, idx)| idx.i != 0 || idx.j != 0)
        .map(|(o, _)| (o - target).powi(2))
        .sum();
    Ok(0.5 * (n * n) as f64 * sum)
}

/// Cyclic index helpers for the quartic form.
struct Cyclic {
    n: usize,
}

impl Cyclic {
    #[inline]
    fn at(&self, a: usize, plus: usize, minus: usize) -> usize {
        (a + plus + self.n - minus % self.n) % self.n
    }
}

/// `S_ik` for all `(i, k)`, row-major in `i`.
fn s_table(z: &[Complex64]) -> Vec<Complex64> {
    let n = z.len();
    let cy = Cyclic { n };
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for a in 0..n {
                let left = z[a] * z[cy.at(a, k, i)];
                let right = z[cy.at(a, k, 0)] * z[cy.at(a, 0, i)];
                s += left.conj() * right;
            }
            out.push(s);
        }
    }
    out
}

/// The quartic form evaluated on raw components, without any norm check.
/// Agrees with `f_H` on unit vectors.
pub fn f_h_polynomial(z: &[Complex64]) -> f64 {
    let n = z.len() as f64;
    let sigma: f64 = s_table(z).iter().map(|s| s.norm_sqr()).sum();
    0.5 * n.powi(3) * (sigma - 2.0 / (n + 1.0))
}

/// `f_H` through the `O(N^3)` quartic form.
pub fn f_h_fast(fiducial: &CVector) -> Result<f64> {
    fiducial.check_unit()?;
    Ok(f_h_polynomial(fiducial.entries()))
}

/// Wirtinger derivative `d f_H / d conj(Z_c)` of the quartic form, with `Z`
/// and `conj(Z)` treated as independent. The Euclidean gradient in real
/// coordinates `Z = x + iy` is `(2 Re g, 2 Im g)`.
pub fn f_h_gradient(fiducial: &CVector) -> Result<CVector> {
    fiducial.check_unit()?;
    Ok(f_h_gradient_raw(fiducial.entries()))
}

pub(crate) fn f_h_gradient_raw(z: &[Complex64]) -> CVector {
    let n = z.len();
    let cy = Cyclic { n };
    let s = s_table(z);
    let scale = 0.5 * (n as f64).powi(3);
    let mut grad = vec![Complex64::new(0.0, 0.0); n];
    for (c, g) in grad.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                let sik = s[i * n + k];
                // d S_ik / d conj(Z_c): a = c and a = c - k + i
                let ds = z[cy.at(c, k, i)].conj() * z[cy.at(c, k, 0)] * z[cy.at(c, 0, i)]
                    + z[cy.at(c, i, k)].conj() * z[cy.at(c, i, 0)] * z[cy.at(c, 0, k)];
                // d conj(S_ik) / d conj(Z_c): a = c - k and a = c + i
                let dsbar = z[cy.at(c, 0, k)] * z[cy.at(c, 0, i)] * z[cy.at(c, 0, k + i)].conj()
                    + z[cy.at(c, i, 0)] * z[cy.at(c, k, 0)] * z[cy.at(c, i + k, 0)].conj();
                acc += ds * sik.conj() + sik * dsbar;
            }
        }
        *g = acc * scale;
    }
    CVector::new(grad)
}

/// Projects a real-coordinate gradient onto the tangent space of the unit
/// sphere at `x`.
pub fn tangent_projection(x: &CVector, grad: &CVector) -> CVector {
    let radial = x.real_dot(grad);
    grad.axpy(-radial, x)
}
