//! Monomial isometries `C^d -> C^N` onto Clifford eigenspaces.
//!
//! Each ambient coordinate is either zero or a single scaled subspace
//! coordinate, `Z_a = c_a x_{pi(a)}`. That shape is what lets the exact
//! averaging code push moments through the embedding. Coefficients are kept
//! exactly as `sqrt(r) * exp(i pi k / 3)` with rational `r`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numcore::{inner_unchecked, ratio_to_f64, sample_fs, CMatrix, CVector, RngStream};

/// Exact coefficient `sqrt(mag_sq) * exp(i pi phase / 3)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactCoef {
    pub mag_sq: BigRational,
    /// Sixth-root-of-unity exponent, `0..6`.
    pub phase: u8,
}

impl ExactCoef {
    pub fn new(mag_sq: BigRational, phase: u8) -> Self {
        Self {
            mag_sq,
            phase: phase % 6,
        }
    }

    fn frac(num: i64, den: i64, phase: u8) -> Self {
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            phase,
        )
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(
            ratio_to_f64(&self.mag_sq).sqrt(),
            std::f64::consts::PI * self.phase as f64 / 3.0,
        )
    }
}

/// One ambient row of an embedding: `Z_row = coef * x_col`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingEntry {
    pub col: usize,
    pub coef: ExactCoef,
    value: Complex64,
}

impl EmbeddingEntry {
    pub fn new(col: usize, coef: ExactCoef) -> Self {
        let value = coef.to_complex();
        Self { col, coef, value }
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubspaceLabel {
    HPlus,
    HMinus,
    Zauner1,
    ZaunerAlpha,
    ZaunerAlphaSq,
    Custom,
}

impl SubspaceLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SubspaceLabel::HPlus => "hplus",
            SubspaceLabel::HMinus => "hminus",
            SubspaceLabel::Zauner1 => "zauner1",
            SubspaceLabel::ZaunerAlpha => "zauner-alpha",
            SubspaceLabel::ZaunerAlphaSq => "zauner-alpha2",
            SubspaceLabel::Custom => "custom",
        }
    }
}

/// The space a fiducial is drawn from: all of `C^N` or a labelled subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Full,
    Sub(SubspaceLabel),
}

impl Space {
    pub const CLI_LABELS: [&'static str; 6] = [
        "full",
        "hplus",
        "hminus",
        "zauner1",
        "zauner-alpha",
        "zauner-alpha2",
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Space::Full => "full",
            Space::Sub(l) => l.as_str(),
        }
    }

    /// Builds the embedding for dimension `n`; `None` for the full space.
    pub fn build(&self, n: usize) -> Result<Option<SubspaceEmbedding>> {
        let sub = match self {
            Space::Full => return Ok(None),
            Space::Sub(label) => *label,
        };
        let zauner_dim = |label| {
            if n == 7 {
                Ok(())
            } else {
                Err(Error::UnsupportedSubspace(format!(
                    "{} is only built for N = 7, not N = {n}",
                    Space::Sub(label)
                )))
            }
        };
        let built = match sub {
            SubspaceLabel::HPlus => build_parity_subspaces(n).map(|p| p.0),
            SubspaceLabel::HMinus => build_parity_subspaces(n).map(|p| p.1),
            SubspaceLabel::Zauner1 => zauner_dim(sub).map(|_| build_zauner7_subspaces().0),
            SubspaceLabel::ZaunerAlpha => zauner_dim(sub).map(|_| build_zauner7_subspaces().1),
            SubspaceLabel::ZaunerAlphaSq => zauner_dim(sub).map(|_| build_zauner7_subspaces().2),
            SubspaceLabel::Custom => {
                return Err(Error::UnsupportedSubspace(
                    "custom embeddings must be constructed explicitly".into(),
                ))
            }
        };
        built.map(Some).map_err(|e| match e {
            Error::UnsupportedDimension { dim, reason } => {
                Error::UnsupportedSubspace(format!("{sub:?} at N = {dim}: {reason}"))
            }
            other => other,
        })
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "full" => Space::Full,
            "hplus" => Space::Sub(SubspaceLabel::HPlus),
            "hminus" => Space::Sub(SubspaceLabel::HMinus),
            "zauner1" => Space::Sub(SubspaceLabel::Zauner1),
            "zauner-alpha" => Space::Sub(SubspaceLabel::ZaunerAlpha),
            "zauner-alpha2" => Space::Sub(SubspaceLabel::ZaunerAlphaSq),
            other => {
                return Err(Error::UnsupportedSubspace(format!(
                    "unknown space label {other:?}; expected one of {}",
                    Space::CLI_LABELS.join(", ")
                )))
            }
        })
    }
}

/// Isometric monomial map `C^d -> C^N`.
#[derive(Clone, Debug)]
pub struct SubspaceEmbedding {
    ambient_dim: usize,
    sub_dim: usize,
    rows: Vec<Option<EmbeddingEntry>>,
    label: SubspaceLabel,
}

impl SubspaceEmbedding {
    fn build(
        sub_dim: usize,
        rows: Vec<Option<EmbeddingEntry>>,
        label: SubspaceLabel,
    ) -> Result<Self> {
        let e = Self {
            ambient_dim: rows.len(),
            sub_dim,
            rows,
            label,
        };
        if let Some(bad) = e.rows.iter().flatten().find(|r| r.col >= sub_dim) {
            return Err(Error::Dimension {
                expected: sub_dim,
                found: bad.col + 1,
            });
        }
        let defect = e.isometry_defect();
        if defect > 1e-12 {
            return Err(Error::UnsupportedSubspace(format!(
                "embedding is not an isometry (defect {defect:e})"
            )));
        }
        Ok(e)
    }

    /// A user-supplied embedding. Row `a` is `Some((c, coef))` for `Z_a = coef x_c`.
    pub fn custom(sub_dim: usize, rows: Vec<Option<(usize, ExactCoef)>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| r.map(|(col, coef)| EmbeddingEntry::new(col, coef)))
            .collect();
        Self::build(sub_dim, rows, SubspaceLabel::Custom)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn sub_dim(&self) -> usize {
        self.sub_dim
    }

    pub fn label(&self) -> SubspaceLabel {
        self.label
    }

    pub fn rows(&self) -> &[Option<EmbeddingEntry>] {
        &self.rows
    }

    /// The `N x d` matrix `E`.
    pub fn matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.ambient_dim, self.sub_dim);
        for (a, row) in self.rows.iter().enumerate() {
            if let Some(r) = row {
                m.set(a, r.col, r.value);
            }
        }
        m
    }

    /// `‖E^dagger E − I_d‖_max`.
    pub fn isometry_defect(&self) -> f64 {
        let m = self.matrix();
        m.adjoint()
            .mul(&m)
            .expect("shapes agree")
            .max_abs_diff(&CMatrix::identity(self.sub_dim))
    }

    pub fn embed(&self, x: &CVector) -> Result<CVector> {
        if x.dim() != self.sub_dim {
            return Err(Error::Dimension {
                expected: self.sub_dim,
                found: x.dim(),
            });
        }
        Ok(self.embed_unchecked(x.entries()))
    }

    pub(crate) fn embed_unchecked(&self, x: &[Complex64]) -> CVector {
        CVector::new(
            self.rows
                .iter()
                .map(|row| match row {
                    Some(r) => r.value * x[r.col],
                    None => Complex64::zero(),
                })
                .collect(),
        )
    }

    /// `E^dagger v`, pulling an ambient (co)vector back to subspace coordinates.
    pub fn pull_back(&self, v: &CVector) -> CVector {
        let mut out = vec![Complex64::zero(); self.sub_dim];
        for (a, row) in self.rows.iter().enumerate() {
            if let Some(r) = row {
                out[r.col] += r.value.conj() * v[a];
            }
        }
        CVector::new(out)
    }

    /// Fubini-Study sample within the subspace, in ambient coordinates.
    pub fn sample(&self, rng: &mut RngStream) -> CVector {
        self.embed_unchecked(sample_fs(self.sub_dim, rng).entries())
    }
}

/// Convenience wrapper matching [`SubspaceEmbedding::sample`].
pub fn sample_subspace(e: &SubspaceEmbedding, rng: &mut RngStream) -> CVector {
    e.sample(rng)
}

pub fn embed(e: &SubspaceEmbedding, x: &CVector) -> Result<CVector> {
    e.embed(x)
}

/// `(H+, H-)`, the `+1` and `-1` eigenspaces of `a -> -a mod N` for odd `N = 2n - 1`:
///
/// ```text
/// H+:  Z_0 = x_0,  Z_k = Z_{N-k} = x_k / sqrt(2)        (dim n)
/// H-:  Z_0 = 0,    Z_k = -Z_{N-k} = x_k / sqrt(2)       (dim n - 1)
/// ```
///
/// In `H-` the coordinates are relabelled `x_k -> x_{k-1}` so they start at 0.
pub fn build_parity_subspaces(dim: usize) -> Result<(SubspaceEmbedding, SubspaceEmbedding)> {
    if dim < 3 || dim.is_multiple_of(2) {
        return Err(Error::UnsupportedDimension {
            dim,
            reason: "parity subspaces exist only for odd N >= 3",
        });
    }
    let n = dim.div_ceil(2);
    let mut plus = vec![None; dim];
    let mut minus = vec![None; dim];
    plus[0] = Some(EmbeddingEntry::new(0, ExactCoef::frac(1, 1, 0)));
    for k in 1..n {
        plus[k] = Some(EmbeddingEntry::new(k, ExactCoef::frac(1, 2, 0)));
        plus[dim - k] = Some(EmbeddingEntry::new(k, ExactCoef::frac(1, 2, 0)));
        minus[k] = Some(EmbeddingEntry::new(k - 1, ExactCoef::frac(1, 2, 0)));
        minus[dim - k] = Some(EmbeddingEntry::new(k - 1, ExactCoef::frac(1, 2, 3)));
    }
    Ok((
        SubspaceEmbedding::build(n, plus, SubspaceLabel::HPlus)?,
        SubspaceEmbedding::build(n - 1, minus, SubspaceLabel::HMinus)?,
    ))
}

/// `(H_1, H_alpha, H_alpha^2)` for `N = 7`, the eigenspaces of `a -> 2a mod 7`
/// for eigenvalues `1`, `alpha`, `alpha^2` with `alpha = exp(2 pi i / 3)`.
///
/// The doubling map has orbits `{0}`, `{1, 2, 4}`, `{3, 6, 5}`; along each
/// orbit the components pick up powers of the eigenvalue's conjugate.
pub fn build_zauner7_subspaces() -> (SubspaceEmbedding, SubspaceEmbedding, SubspaceEmbedding) {
    let third = |col, phase| Some(EmbeddingEntry::new(col, ExactCoef::frac(1, 3, phase)));
    let h1 = vec![
        Some(EmbeddingEntry::new(0, ExactCoef::frac(1, 1, 0))),
        third(1, 0),
        third(1, 0),
        third(2, 0),
        third(1, 0),
        third(2, 0),
        third(2, 0),
    ];
    // alpha = omega^2, alpha^2 = omega^4 with omega = exp(i pi / 3)
    let alpha_rows = |a1: u8, a2: u8| {
        vec![
            None,
            third(0, 0),
            third(0, a2),
            third(1, 0),
            third(0, a1),
            third(1, a1),
            third(1, a2),
        ]
    };
    let build = |d, rows, label| SubspaceEmbedding::build(d, rows, label).expect("fixed isometry");
    (
        build(3, h1, SubspaceLabel::Zauner1),
        build(2, alpha_rows(2, 4), SubspaceLabel::ZaunerAlpha),
        build(2, alpha_rows(4, 2), SubspaceLabel::ZaunerAlphaSq),
    )
}

/// `<embed(x)|embed(y)>`, for checking the isometry on concrete vectors.
pub fn embedded_inner(e: &SubspaceEmbedding, x: &CVector, y: &CVector) -> Result<Complex64> {
    let (u, v) = (e.embed(x)?, e.embed(y)?);
    Ok(inner_unchecked(u.entries(), v.entries()))
}

impl ExactCoef {
    pub fn one() -> Self {
        Self::new(BigRational::one(), 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{parity_operator, zauner7_operator};
    use crate::numcore::inner;

    fn alpha() -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0)
    }

    #[test]
    fn parity_dims_and_examples() {
        let (p3, m3) = build_parity_subspaces(3).unwrap();
        assert_eq!((p3.sub_dim(), m3.sub_dim()), (2, 1));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = m3.embed(&CVector::basis(1, 0)).unwrap();
        assert!(v.max_abs_diff(&CVector::from_real(&[0.0, s, -s])) < 1e-15);

        let (p7, m7) = build_parity_subspaces(7).unwrap();
        assert_eq!((p7.sub_dim(), m7.sub_dim()), (4, 3));

        let (p5, _) = build_parity_subspaces(5).unwrap();
        assert_eq!(
            p5.embed(&CVector::basis(3, 0)).unwrap(),
            CVector::basis(5, 0)
        );

        assert!(matches!(
            build_parity_subspaces(6),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn parity_eigenspaces() {
        let mut rng = RngStream::new(2, 0);
        for n in [3, 5, 7, 9] {
            let a = parity_operator(n).unwrap();
            let (p, m) = build_parity_subspaces(n).unwrap();
            for _ in 0..5 {
                let v = p.sample(&mut rng);
                assert!(a.apply(&v).unwrap().max_abs_diff(&v) < 1e-12);
                let w = m.sample(&mut rng);
                assert!(a.apply(&w).unwrap().max_abs_diff(&w.scale((-1.0).into())) < 1e-12);
                assert!(inner(&v, &w).unwrap().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn zauner_examples() {
        let (h1, ha, ha2) = build_zauner7_subspaces();
        assert_eq!((h1.sub_dim(), ha.sub_dim(), ha2.sub_dim()), (3, 2, 2));
        assert_eq!(
            h1.embed(&CVector::basis(3, 0)).unwrap(),
            CVector::basis(7, 0)
        );

        let v = ha.embed(&CVector::basis(2, 0)).unwrap();
        let r = 1.0 / 3f64.sqrt();
        let a = alpha();
        let zero = Complex64::zero();
        let one = Complex64::new(r, 0.0);
        let expect = CVector::new(vec![zero, one, a * a * r, zero, a * r, zero, zero]);
        assert!(v.max_abs_diff(&expect) < 1e-15);

        let u = zauner7_operator();
        let mut rng = RngStream::new(9, 9);
        for (e, lambda) in [(&h1, Complex64::new(1.0, 0.0)), (&ha, a), (&ha2, a * a)] {
            for _ in 0..5 {
                let v = e.sample(&mut rng);
                assert!(u.apply(&v).unwrap().max_abs_diff(&v.scale(lambda)) < 1e-12);
            }
        }
    }

    #[test]
    fn isometries() {
        let (p, m) = build_parity_subspaces(9).unwrap();
        let (h1, ha, ha2) = build_zauner7_subspaces();
        let mut rng = RngStream::new(4, 4);
        for e in [&p, &m, &h1, &ha, &ha2] {
            assert!(e.isometry_defect() < 1e-12);
            let x = sample_fs(e.sub_dim(), &mut rng);
            let y = sample_fs(e.sub_dim(), &mut rng);
            let lhs = embedded_inner(e, &x, &y).unwrap();
            assert!((lhs - inner(&x, &y).unwrap()).norm() < 1e-12);
            assert!(matches!(
                e.embed(&CVector::basis(e.sub_dim() + 1, 0)),
                Err(Error::Dimension { .. })
            ));
        }
    }

    #[test]
    fn custom_rejects_non_isometry() {
        let rows = vec![Some((0, ExactCoef::one())), Some((0, ExactCoef::one()))];
        assert!(SubspaceEmbedding::custom(1, rows).is_err());
        let half = ExactCoef::new(BigRational::new(1.into(), 2.into()), 0);
        let rows = vec![Some((0, half.clone())), Some((0, half))];
        assert!(SubspaceEmbedding::custom(1, rows).is_ok());
    }

    #[test]
    fn labels_round_trip() {
        for s in Space::CLI_LABELS {
            assert_eq!(s.parse::<Space>().unwrap().as_str(), s);
        }
        assert!("nope".parse::<Space>().is_err());
        assert!(Space::Sub(SubspaceLabel::Zauner1).build(5).is_err());
        assert!(Space::Sub(SubspaceLabel::HPlus).build(4).is_err());
        assert!(Space::Full.build(4).unwrap().is_none());
    }
}
