//! Exact arithmetic in the cyclotomic field `Q(alpha)`, `alpha = exp(2 pi i / 3)`.
//!
//! Elements are `a + b alpha` with rational `a`, `b`, reduced with
//! `alpha^2 = -1 - alpha`. The sixth roots of unity all live here, which is
//! enough for every coefficient the subspace embeddings use.

use std::ops::{Add, AddAssign, Mul, Neg};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::numcore::ratio_to_f64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Eisenstein {
    /// Coefficient of `1`.
    pub a: BigRational,
    /// Coefficient of `alpha`.
    pub b: BigRational,
}

impl Eisenstein {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Self { a, b }
    }

    pub fn rational(a: BigRational) -> Self {
        Self::new(a, BigRational::zero())
    }

    pub fn from_int(a: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(a)))
    }

    pub fn alpha() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    /// `exp(i pi k / 3)`, the `k`-th sixth root of unity.
    pub fn sixth_root(k: u8) -> Self {
        let int = |x: i64| BigRational::from_integer(BigInt::from(x));
        // omega = exp(i pi / 3) = 1 + alpha
        let (a, b) = match k % 6 {
            0 => (1, 0),
            1 => (1, 1),
            2 => (0, 1),
            3 => (-1, 0),
            4 => (-1, -1),
            _ => (0, -1),
        };
        Self::new(int(a), int(b))
    }

    /// Complex conjugate: `conj(alpha) = alpha^2 = -1 - alpha`.
    pub fn conj(&self) -> Self {
        Self::new(&self.a - &self.b, -self.b.clone())
    }

    /// `Some(a)` when the element is rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.b.is_zero().then_some(&self.a)
    }

    pub fn to_complex(&self) -> Complex64 {
        let alpha = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
        Complex64::new(ratio_to_f64(&self.a), 0.0) + alpha * ratio_to_f64(&self.b)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(&self.a * r, &self.b * r)
    }
}

impl Zero for Eisenstein {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl Add for Eisenstein {
    type Output = Eisenstein;

    fn add(self, rhs: Eisenstein) -> Eisenstein {
        Eisenstein::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl AddAssign<&Eisenstein> for Eisenstein {
    fn add_assign(&mut self, rhs: &Eisenstein) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl Neg for Eisenstein {
    type Output = Eisenstein;

    fn neg(self) -> Eisenstein {
        Eisenstein::new(-self.a, -self.b)
    }
}

impl Mul for &Eisenstein {
    type Output = Eisenstein;

    fn mul(self, rhs: &Eisenstein) -> Eisenstein {
        // (a + b alpha)(c + d alpha) = (ac - bd) + (ad + bc - bd) alpha
        let bd = &self.b * &rhs.b;
        Eisenstein::new(
            &self.a * &rhs.a - &bd,
            &self.a * &rhs.b + &self.b * &rhs.a - bd,
        )
    }
}
