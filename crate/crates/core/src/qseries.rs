//! Truncated q-expansions with exact integer coefficients, and the generators
//! of the level-one graded ring: E4, E6 and the discriminant form.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::divisor_power_sum;

/// Power series `sum_{m < prec} a_m q^m`, known exactly up to `q^prec`.
///
/// Binary operations never extend precision: the result has the smaller of
/// the two operand precisions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QExpansion {
    coeffs: Vec<BigInt>,
}

impl QExpansion {
    /// Panics if `coeffs` is empty; a series always carries at least `q^0`.
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "q-expansion precision must be positive");
        Self { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(prec: usize) -> Self {
        Self::new(vec![BigInt::zero(); prec])
    }

    pub fn one(prec: usize) -> Self {
        let mut s = Self::zero(prec);
        s.coeffs[0] = BigInt::one();
        s
    }

    /// The monomial `q^e` truncated at `prec`.
    pub fn monomial(e: usize, prec: usize) -> Self {
        let mut s = Self::zero(prec);
        if e < prec {
            s.coeffs[e] = BigInt::one();
        }
        s
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `q^m`, or `None` beyond the known precision.
    pub fn coeff(&self, m: usize) -> Option<&BigInt> {
        self.coeffs.get(m)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, prec: usize) -> Self {
        let prec = prec.min(self.prec());
        Self::new(self.coeffs[..prec].to_vec())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `self -= c * other` in place over the common precision.
    pub(crate) fn sub_scaled(&mut self, c: &BigInt, other: &QExpansion) {
        if c.is_zero() {
            return;
        }
        self.coeffs.truncate(other.prec());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a -= c * b;
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec().min(other.prec());
        let mut out = vec![BigInt::zero(); prec];
        for (i, a) in self.coeffs[..prec].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..prec - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(self.prec());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl fmt::Debug for QExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QExpansion[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "; O(q^{})]", self.prec())
    }
}

impl Add for &QExpansion {
    type Output = QExpansion;
    fn add(self, rhs: Self) -> QExpansion {
        QExpansion::new(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &QExpansion {
    type Output = QExpansion;
    fn sub(self, rhs: Self) -> QExpansion {
        QExpansion::new(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Neg for &QExpansion {
    type Output = QExpansion;
    fn neg(self) -> QExpansion {
        QExpansion::new(self.coeffs.iter().map(|a| -a).collect())
    }
}

impl Mul for &QExpansion {
    type Output = QExpansion;
    fn mul(self, rhs: Self) -> QExpansion {
        QExpansion::mul(self, rhs)
    }
}

fn eisenstein(prec: usize, scale: i64, exponent: u32) -> QExpansion {
    assert!(prec >= 1);
    let scale = BigInt::from(scale);
    let mut coeffs = Vec::with_capacity(prec);
    coeffs.push(BigInt::one());
    for n in 1..prec {
        coeffs.push(&scale * divisor_power_sum(n as u64, exponent));
    }
    QExpansion::new(coeffs)
}

/// `E4 = 1 + 240 sum sigma_3(n) q^n`.
pub fn eisenstein4(prec: usize) -> QExpansion {
    eisenstein(prec, 240, 3)
}

/// `E6 = 1 - 504 sum sigma_5(n) q^n`.
pub fn eisenstein6(prec: usize) -> QExpansion {
    eisenstein(prec, -504, 5)
}

/// `Delta = q prod_{n >= 1} (1 - q^n)^24`, coefficients tau(n).
pub fn delta(prec: usize) -> QExpansion {
    assert!(prec >= 1);
    if prec == 1 {
        return QExpansion::zero(1);
    }
    // Only prec - 1 coefficients of the product are needed after the shift by q.
    let inner = prec - 1;
    let mut euler = vec![0i64; inner];
    euler[0] = 1;
    for n in 1..inner {
        for m in (n..inner).rev() {
            euler[m] -= euler[m - n];
        }
    }
    let product = QExpansion::from_i64s(&euler).pow(24);
    let mut coeffs = Vec::with_capacity(prec);
    coeffs.push(BigInt::zero());
    coeffs.extend(product.into_coeffs());
    QExpansion::new(coeffs)
}
