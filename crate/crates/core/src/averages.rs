//! Fubini-Study averages of `f` and `f_H`, computed three independent ways.
//!
//! * closed forms ([`analytic_avg_f`], [`analytic_avg_fh`], [`analytic_avg_fh_subspace`]);
//! * an exact oracle ([`exact_avg_fh`]) that expands `sum_{i,k} |S_ik|^2`
//!   into monomials, pushes them through a monomial embedding, drops the
//!   phase-unbalanced ones and integrates the rest with [`fs_moment`];
//! * Monte Carlo ([`mc_avg`], [`mc_avg_f`]) over sharded, seeded streams.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::Eisenstein;
use crate::error::{Error, Result};
use crate::framepot::f_h_polynomial;
use crate::numcore::{fs_moment, ratio_to_f64, sample_fs, CVector, Exact, MomentKey, RngStream};
use crate::subspace::{EmbeddingEntry, ExactCoef, Space, SubspaceEmbedding, SubspaceLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    ExactOracle,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::ExactOracle => "exact",
            Method::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An average together with how it was obtained.
#[derive(Clone, Debug, PartialEq)]
pub struct AverageResult {
    pub value: f64,
    pub exact: Option<Exact>,
    pub method: Method,
    pub space: Space,
    pub dim: usize,
}

impl AverageResult {
    fn exact(r: BigRational, method: Method, space: Space, dim: usize) -> Self {
        let exact = Exact(r);
        Self {
            value: exact.to_f64(),
            exact: Some(exact),
            method,
            space,
            dim,
        }
    }
}

/// Sample mean and standard error of a Monte Carlo run.
#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    /// `(seed, shard size)`: together they fix every draw.
    pub seed: (u64, u64),
    /// Sample standard deviation.
    pub std_dev: f64,
}

impl McEstimate {
    /// `|mean - target|` in units of the standard error (0 when both vanish).
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.mean - target).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::UnsupportedDimension {
            dim: n,
            reason: "averages need N >= 2",
        });
    }
    Ok(())
}

/// `<f> = (N^2/2) (N-1)/(N+1)`.
pub fn analytic_avg_f(n: usize) -> Result<AverageResult> {
    check_dim(n)?;
    let n = n as i64;
    Ok(AverageResult::exact(
        rat(n * n * (n - 1), 2 * (n + 1)),
        Method::Analytic,
        Space::Full,
        n as usize,
    ))
}

/// `<f>` from the single-overlap reduction
/// `N^2 (N^2-1)/2 < (|<e_0|psi>|^2 - 1/(N+1))^2 >` with the moments of `|Z_0|^2`.
pub fn moment_avg_f(n: usize) -> Result<AverageResult> {
    check_dim(n)?;
    let t1 = fs_moment(&MomentKey::new(n, vec![1])?).0;
    let t2 = fs_moment(&MomentKey::new(n, vec![2])?).0;
    let c = rat(1, n as i64 + 1);
    let var = t2 - t1 * &c * BigRational::from_integer(2.into()) + &c * &c;
    let ni = n as i64;
    Ok(AverageResult::exact(
        var * rat(ni * ni * (ni * ni - 1), 2),
        Method::ExactOracle,
        Space::Full,
        n,
    ))
}

/// Odd `N`: `(N^2/2) N(N-1)/((N+2)(N+1))`; even `N`: `(N^2/2) N^2/((N+3)(N+1))`.
pub fn analytic_avg_fh(n: usize) -> Result<AverageResult> {
    check_dim(n)?;
    let m = n as i64;
    let value = if n % 2 == 1 {
        rat(m * m * m * (m - 1), 2 * (m + 2) * (m + 1))
    } else {
        rat(m * m * m * m, 2 * (m + 3) * (m + 1))
    };
    Ok(AverageResult::exact(
        value,
        Method::Analytic,
        Space::Full,
        n,
    ))
}

/// Tabulated subspace averages. Anything outside the known cases is
/// [`Error::NotTabulated`]; use [`exact_avg_fh`] there.
pub fn analytic_avg_fh_subspace(label: SubspaceLabel, n: usize) -> Result<AverageResult> {
    let m = n as i64;
    let value = match (label, n) {
        (SubspaceLabel::HPlus, 3) => Some(rat(81, 40)),
        (SubspaceLabel::HPlus | SubspaceLabel::HMinus, _) if n > 3 && n % 2 == 1 => {
            Some(rat(m * m * m * (m - 1), (m + 3) * (m + 1)))
        }
        (SubspaceLabel::Zauner1, 7) => Some(rat(151 * 343, 5 * 81 * 8)),
        (SubspaceLabel::ZaunerAlpha | SubspaceLabel::ZaunerAlphaSq, 7) => {
            Some(rat(37 * 343, 5 * 27 * 8))
        }
        _ => None,
    };
    value
        .map(|v| AverageResult::exact(v, Method::Analytic, Space::Sub(label), n))
        .ok_or_else(|| Error::NotTabulated {
            space: label.as_str().into(),
            dim: n,
        })
}

/// Closed form for any space, dispatching on [`Space`].
pub fn analytic_avg(space: Space, n: usize) -> Result<AverageResult> {
    match space {
        Space::Full => analytic_avg_fh(n),
        Space::Sub(label) => analytic_avg_fh_subspace(label, n),
    }
}

/// A term `coef * prod_c x_c^{z_c} conj(x_c)^{zbar_c}` in subspace coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialPattern {
    pub z_exponents: Vec<u32>,
    pub zbar_exponents: Vec<u32>,
    /// Product of the squared magnitudes of the eight substituted coefficients.
    pub coef_mag_sq: BigRational,
    /// Sixth-root exponent of the coefficient phase.
    pub coef_phase: u8,
}

impl MonomialPattern {
    /// Non-zero FS average requires equal `Z` and `conj(Z)` exponents everywhere.
    pub fn is_balanced(&self) -> bool {
        self.z_exponents == self.zbar_exponents
    }

    pub fn degree(&self) -> (u32, u32) {
        (
            self.z_exponents.iter().sum(),
            self.zbar_exponents.iter().sum(),
        )
    }

    /// Exponent multiset, largest first: `[4]` is `|x|^8`, `[2, 1, 1]` is
    /// `|x_1|^4 |x_2|^2 |x_3|^2`, and so on.
    pub fn moment_type(&self) -> Vec<u32> {
        let mut t: Vec<u32> = self
            .z_exponents
            .iter()
            .copied()
            .filter(|&m| m > 0)
            .collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// The exact coefficient `sqrt(coef_mag_sq) * exp(i pi phase / 3)`, if the
    /// square root is rational.
    pub fn coefficient(&self) -> Option<Eisenstein> {
        let root = rational_sqrt(&self.coef_mag_sq)?;
        Some(Eisenstein::sixth_root(self.coef_phase).scale(&root))
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
}

/// Indices `(Z side, conj(Z) side)` of the `(a, b)` term of `|S_ik|^2`:
///
/// ```text
/// S_ik conj(S_ik) = sum_{a,b} conj(Z_a) conj(Z_{a+k-i}) Z_{a+k} Z_{a-i}
///                             Z_b Z_{b+k-i} conj(Z_{b+k}) conj(Z_{b-i})
/// ```
fn term_indices(n: usize, i: usize, k: usize, a: usize, b: usize) -> ([usize; 4], [usize; 4]) {
    let m = |x: usize| x % n;
    let z = [m(a + k), m(a + n - i), b, m(b + k + n - i)];
    let zbar = [a, m(a + k + n - i), m(b + k), m(b + n - i)];
    (z, zbar)
}

struct Substitution<'a> {
    rows: Vec<Option<EmbeddingEntry>>,
    sub_dim: usize,
    _space: Option<&'a SubspaceEmbedding>,
}

impl<'a> Substitution<'a> {
    fn new(n: usize, space: Option<&'a SubspaceEmbedding>) -> Result<Self> {
        match space {
            None => Ok(Self {
                rows: (0..n)
                    .map(|a| Some(EmbeddingEntry::new(a, ExactCoef::one())))
                    .collect(),
                sub_dim: n,
                _space: None,
            }),
            Some(e) => {
                if e.ambient_dim() != n {
                    return Err(Error::Dimension {
                        expected: n,
                        found: e.ambient_dim(),
                    });
                }
                Ok(Self {
                    rows: e.rows().to_vec(),
                    sub_dim: e.sub_dim(),
                    _space: Some(e),
                })
            }
        }
    }

    /// The `(a, b)` term of `|S_ik|^2` after substitution, with its complex
    /// coefficient; `None` when a factor vanishes identically.
    fn pattern(
        &self,
        n: usize,
        i: usize,
        k: usize,
        a: usize,
        b: usize,
    ) -> Option<(MonomialPattern, Complex64)> {
        let (z, zbar) = term_indices(n, i, k, a, b);
        let mut z_exp = vec![0u32; self.sub_dim];
        let mut zbar_exp = vec![0u32; self.sub_dim];
        let mut mag = BigRational::one();
        let mut phase: i32 = 0;
        let mut value = Complex64::new(1.0, 0.0);
        for &row in &z {
            let e = self.rows[row].as_ref()?;
            z_exp[e.col] += 1;
            mag *= &e.coef.mag_sq;
            phase += e.coef.phase as i32;
            value *= e.value();
        }
        for &row in &zbar {
            let e = self.rows[row].as_ref()?;
            zbar_exp[e.col] += 1;
            mag *= &e.coef.mag_sq;
            phase -= e.coef.phase as i32;
            value *= e.value().conj();
        }
        Some((
            MonomialPattern {
                z_exponents: z_exp,
                zbar_exponents: zbar_exp,
                coef_mag_sq: mag,
                coef_phase: phase.rem_euclid(6) as u8,
            },
            value,
        ))
    }
}

/// Expands `sum_{i,k} |S_ik|^2` into its `N^4` raw terms, substituted into the
/// given subspace. Terms killed by a zero row are omitted.
pub fn expand_sigma(n: usize, space: Option<&SubspaceEmbedding>) -> Result<Vec<MonomialPattern>> {
    check_dim(n)?;
    let sub = Substitution::new(n, space)?;
    let mut out = Vec::new();
    for i in 0..n {
        for k in 0..n {
            for a in 0..n {
                for b in 0..n {
                    if let Some((p, _)) = sub.pattern(n, i, k, a, b) {
                        out.push(p);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Balanced terms of one moment type.
#[derive(Clone, Debug, PartialEq)]
pub struct CensusEntry {
    /// Number of raw terms of this type.
    pub count: u64,
    /// Sum of their exact coefficients.
    pub weight: Eisenstein,
}

/// Balanced monomials of `sum_{i,k} |S_ik|^2`, grouped by moment type.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaCensus {
    pub dim: usize,
    /// Dimension the moments are taken in (`d` for a subspace).
    pub effective_dim: usize,
    pub by_type: BTreeMap<Vec<u32>, CensusEntry>,
    /// Terms dropped for phase imbalance.
    pub unbalanced: u64,
    /// Sum of the balanced terms' floating-point coefficients times moments,
    /// evaluated independently of the exact path.
    float_sigma: Complex64,
}

impl SigmaCensus {
    /// `count` for a moment type, e.g. `&[2, 2]` for `|Z_1|^4 |Z_2|^4`.
    pub fn count(&self, moment_type: &[u32]) -> u64 {
        self.by_type.get(moment_type).map_or(0, |e| e.count)
    }

    /// `<sum_{i,k} |S_ik|^2>` in `Q(alpha)`.
    pub fn sigma_average(&self) -> Eisenstein {
        let mut total = Eisenstein::zero();
        for (t, entry) in &self.by_type {
            let moment =
                fs_moment(&MomentKey::new(self.effective_dim, t.clone()).expect("type fits"));
            total += &entry.weight.scale(&moment.0);
        }
        total
    }

    pub fn float_sigma(&self) -> Complex64 {
        self.float_sigma
    }
}

#[derive(Default)]
struct PartialCensus {
    by_type: BTreeMap<Vec<u32>, (u64, Eisenstein)>,
    unbalanced: u64,
    float_sigma: Complex64,
}

/// Builds the census for `(N, space)`. Parallel over `i`; the merge is exact,
/// so the result does not depend on the thread count.
pub fn sigma_census(n: usize, space: Option<&SubspaceEmbedding>) -> Result<SigmaCensus> {
    check_dim(n)?;
    let sub = Substitution::new(n, space)?;
    let d = sub.sub_dim;
    let partials: Vec<Result<PartialCensus>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut part = PartialCensus::default();
            for k in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let Some((p, value)) = sub.pattern(n, i, k, a, b) else {
                            continue;
                        };
                        if !p.is_balanced() {
                            part.unbalanced += 1;
                            continue;
                        }
                        let coef = p.coefficient().ok_or_else(|| {
                            Error::UnsupportedSubspace(
                                "coefficient products are not rational multiples of sixth roots of unity".into(),
                            )
                        })?;
                        let t = p.moment_type();
                        let moment = fs_moment(&MomentKey::new(d, t.clone())?).to_f64();
                        part.float_sigma += value * moment;
                        let slot = part
                            .by_type
                            .entry(t)
                            .or_insert_with(|| (0, Eisenstein::zero()));
                        slot.0 += 1;
                        slot.1 += &coef;
                    }
                }
            }
            Ok(part)
        })
        .collect();

    let mut by_type: BTreeMap<Vec<u32>, CensusEntry> = BTreeMap::new();
    let mut unbalanced = 0;
    let mut float_sigma = Complex64::zero();
    for part in partials {
        let part = part?;
        unbalanced += part.unbalanced;
        float_sigma += part.float_sigma;
        for (t, (count, weight)) in part.by_type {
            let slot = by_type.entry(t).or_insert_with(|| CensusEntry {
                count: 0,
                weight: Eisenstein::zero(),
            });
            slot.count += count;
            slot.weight += &weight;
        }
    }
    Ok(SigmaCensus {
        dim: n,
        effective_dim: d,
        by_type,
        unbalanced,
        float_sigma,
    })
}

/// Exact `<f_H>` over the full space (`space = None`) or a monomial subspace.
pub fn exact_avg_fh(n: usize, space: Option<&SubspaceEmbedding>) -> Result<AverageResult> {
    let census = sigma_census(n, space)?;
    let sigma = census.sigma_average();
    let sigma = sigma.as_rational().cloned().ok_or_else(|| {
        Error::UnsupportedSubspace(format!(
            "average has an irrational part {:?}; the embedding is not conjugation-closed",
            sigma.b
        ))
    })?;
    let residue = census.float_sigma.im.abs();
    assert!(
        residue <= 1e-12 && (census.float_sigma.re - ratio_to_f64(&sigma)).abs() <= 1e-9,
        "floating-point cross-evaluation disagrees: {} vs {}",
        census.float_sigma,
        ratio_to_f64(&sigma)
    );
    let m = n as i64;
    let value = (sigma - rat(2, m + 1)) * rat(m * m * m, 2);
    let space_label = space.map_or(Space::Full, |e| Space::Sub(e.label()));
    Ok(AverageResult::exact(
        value,
        Method::ExactOracle,
        space_label,
        n,
    ))
}

/// Samples per shard; each shard owns the stream `(seed, shard index)`.
pub const SHARD_SIZE: usize = 8192;

#[derive(Clone, Copy)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Moments { n, mean, m2 }
    }
}

/// Generic sharded Monte Carlo mean of `draw(rng)`. The shard plan depends only
/// on `n_samples`, and shards are merged in index order, so the result is
/// identical for any number of worker threads.
pub fn mc_estimate<F>(n_samples: usize, seed: u64, draw: F) -> Result<McEstimate>
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let shards = n_samples.div_ceil(SHARD_SIZE);
    let parts: Vec<Moments> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = RngStream::new(seed, s as u64);
            let len = SHARD_SIZE.min(n_samples - s * SHARD_SIZE);
            let mut acc = Moments {
                n: 0,
                mean: 0.0,
                m2: 0.0,
            };
            for _ in 0..len {
                acc.push(draw(&mut rng));
            }
            acc
        })
        .collect();
    let total = parts.into_iter().fold(
        Moments {
            n: 0,
            mean: 0.0,
            m2: 0.0,
        },
        Moments::merge,
    );
    let std_dev = (total.m2.max(0.0) / (total.n - 1) as f64).sqrt();
    Ok(McEstimate {
        mean: total.mean,
        std_error: std_dev / (total.n as f64).sqrt(),
        n_samples: total.n,
        seed: (seed, SHARD_SIZE as u64),
        std_dev,
    })
}

fn check_samples(n_samples: usize) -> Result<()> {
    if n_samples < 100 {
        return Err(Error::InvalidArgument(format!(
            "Monte Carlo needs at least 100 samples, got {n_samples}"
        )));
    }
    Ok(())
}

/// Monte Carlo `<f_H>` over FS-random fiducials, optionally inside a subspace.
pub fn mc_avg(
    n: usize,
    space: Option<&SubspaceEmbedding>,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_dim(n)?;
    check_samples(n_samples)?;
    if let Some(e) = space {
        if e.ambient_dim() != n {
            return Err(Error::Dimension {
                expected: n,
                found: e.ambient_dim(),
            });
        }
    }
    mc_estimate(n_samples, seed, |rng| {
        let v: CVector = match space {
            Some(e) => e.sample(rng),
            None => sample_fs(n, rng),
        };
        f_h_polynomial(v.entries())
    })
}

/// Monte Carlo `<f>` through `N^2 (N^2-1)/2 < (|<e_0|psi>|^2 - 1/(N+1))^2 >`.
pub fn mc_avg_f(n: usize, n_samples: usize, seed: u64) -> Result<McEstimate> {
    check_dim(n)?;
    check_samples(n_samples)?;
    let nf = n as f64;
    let scale = nf * nf * (nf * nf - 1.0) / 2.0;
    let target = 1.0 / (nf + 1.0);
    mc_estimate(n_samples, seed, |rng| {
        let t = sample_fs(n, rng)[0].norm_sqr();
        scale * (t - target).powi(2)
    })
}
