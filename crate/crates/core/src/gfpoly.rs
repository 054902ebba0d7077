//! Polynomials over a prime field `F_l` and their complete factorization
//! (squarefree decomposition, distinct-degree split, Cantor-Zassenhaus).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{big_mod, inv_mod, mul_mod, prime_divisors};
use crate::error::{Error, Result};
use crate::hecke::{fmt_descending, IntPoly};

/// Default seed for the randomized equal-degree splitting.
pub const DEFAULT_SEED: u64 = 0;

/// Dense polynomial over `F_modulus`, ascending coefficients, reduced residues
/// and no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpPoly {
    modulus: u64,
    coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn new(modulus: u64, coeffs: Vec<u64>) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2");
        let mut p = Self {
            modulus,
            coeffs: coeffs.into_iter().map(|c| c % modulus).collect(),
        };
        p.trim();
        p
    }

    pub fn from_i64s(modulus: u64, coeffs: &[i64]) -> Self {
        Self::new(
            modulus,
            coeffs
                .iter()
                .map(|&c| c.rem_euclid(modulus as i64) as u64)
                .collect(),
        )
    }

    pub fn zero(modulus: u64) -> Self {
        Self::new(modulus, Vec::new())
    }

    pub fn one(modulus: u64) -> Self {
        Self::new(modulus, vec![1])
    }

    /// The polynomial `x`.
    pub fn x(modulus: u64) -> Self {
        Self::new(modulus, vec![0, 1])
    }

    /// `x - root`.
    pub fn linear(modulus: u64, root: u64) -> Self {
        Self::new(modulus, vec![(modulus - root % modulus) % modulus, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    fn same_field(&self, other: &Self) {
        assert_eq!(self.modulus, other.modulus, "mixed moduli");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_field(other);
        let m = self.modulus;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                (a + b) % m
            })
            .collect();
        Self::new(m, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus;
        Self::new(m, self.coeffs.iter().map(|&c| (m - c) % m).collect())
    }

    pub fn scale(&self, c: u64) -> Self {
        let m = self.modulus;
        Self::new(m, self.coeffs.iter().map(|&a| mul_mod(a, c, m)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_field(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.modulus);
        }
        let m = self.modulus;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, m)) % m;
            }
        }
        Self::new(m, out)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.modulus);
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

    /// Scale to leading coefficient 1; the zero polynomial is returned as is.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.leading(), self.modulus))
    }

    pub fn derivative(&self) -> Self {
        let m = self.modulus;
        Self::new(
            m,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mul_mod(c, i as u64 % m, m))
                .collect(),
        )
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        self.same_field(divisor);
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let m = self.modulus;
        if self.coeffs.len() < divisor.coeffs.len() {
            return (Self::zero(m), self.clone());
        }
        let inv_lead = inv_mod(divisor.leading(), m);
        let dd = divisor.deg();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = mul_mod(rem[i + dd], inv_lead, m);
            quot[i] = c;
            if c == 0 {
                continue;
            }
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                let t = mul_mod(c, b, m);
                rem[i + j] = (rem[i + j] + m - t) % m;
            }
        }
        rem.truncate(dd);
        (Self::new(m, quot), Self::new(m, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// `self / divisor`, failing with the remainder when the division is inexact.
    pub fn divide_exact(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(divisor);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InexactDivision {
                modulus: self.modulus,
                remainder: r,
            })
        }
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn mul_mod(&self, other: &Self, modulus: &Self) -> Self {
        self.mul(other).rem(modulus)
    }

    /// `self^e mod modulus` for an arbitrary-size exponent.
    pub fn pow_mod_big(&self, e: &BigUint, modulus: &Self) -> Self {
        let mut acc = Self::one(self.modulus).rem(modulus);
        let base = self.rem(modulus);
        for i in (0..e.bits()).rev() {
            acc = acc.mul_mod(&acc, modulus);
            if e.bit(i) {
                acc = acc.mul_mod(&base, modulus);
            }
        }
        acc
    }

    pub fn pow_mod(&self, e: u64, modulus: &Self) -> Self {
        self.pow_mod_big(&BigUint::from(e), modulus)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let m = self.modulus;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| (mul_mod(acc, x, m) + c) % m)
    }

    /// Squarefree means `gcd(f, f') = 1`.
    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).is_one()
    }

    /// Rabin's test: `x^{l^d} = x mod f` and `gcd(x^{l^{d/r}} - x, f) = 1`
    /// for every prime `r | d`.
    pub fn is_irreducible(&self) -> bool {
        let Some(d) = self.degree() else {
            return false;
        };
        if d == 0 {
            return false;
        }
        let f = self.monic();
        let x = Self::x(self.modulus);
        let frob = |k: usize| -> Self {
            let mut h = x.rem(&f);
            for _ in 0..k {
                h = h.pow_mod(self.modulus, &f);
            }
            h
        };
        if frob(d) != x.rem(&f) {
            return false;
        }
        prime_divisors(d as u64)
            .into_iter()
            .all(|r| frob(d / r as usize).sub(&x).gcd(&f).is_one())
    }
}

impl PartialOrd for FpPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: degree first, then coefficients from the constant term up.
impl Ord for FpPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.modulus
            .cmp(&other.modulus)
            .then(self.coeffs.len().cmp(&other.coeffs.len()))
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_descending(
            f,
            self.coeffs
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (i, c, false)),
        )
    }
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpPoly({self} mod {})", self.modulus)
    }
}

/// Coefficient-wise reduction of an integer polynomial.
pub fn reduce_mod(f: &IntPoly, ell: u64) -> FpPoly {
    FpPoly::new(ell, f.coeffs().iter().map(|c| big_mod(c, ell)).collect())
}

/// A factorization `unit * prod factor^multiplicity` over `F_l`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FactorMultiset {
    pub modulus: u64,
    pub unit: u64,
    /// Monic irreducible factors in canonical order, pairwise distinct.
    pub factors: Vec<(FpPoly, usize)>,
}

impl FactorMultiset {
    pub fn degree(&self) -> usize {
        self.factors.iter().map(|(f, e)| f.deg() * e).sum()
    }

    pub fn expand(&self) -> FpPoly {
        self.factors
            .iter()
            .fold(FpPoly::new(self.modulus, vec![self.unit]), |acc, (f, e)| {
                acc.mul(&f.pow(*e as u64))
            })
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    pub fn splits_completely(&self) -> bool {
        self.factors.iter().all(|(f, _)| f.deg() == 1)
    }

    /// Degrees of the irreducible factors, repeated by multiplicity, descending.
    pub fn degree_partition(&self) -> Vec<usize> {
        let mut parts: Vec<usize> = self
            .factors
            .iter()
            .flat_map(|(f, e)| std::iter::repeat_n(f.deg(), *e))
            .collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts
    }

    /// Roots in `F_l` with multiplicity, ascending.
    pub fn roots(&self) -> Vec<u64> {
        let m = self.modulus;
        let mut out: Vec<u64> = self
            .factors
            .iter()
            .filter(|(f, _)| f.deg() == 1)
            .flat_map(|(f, e)| std::iter::repeat_n((m - f.coeffs()[0]) % m, *e))
            .collect();
        out.sort_unstable();
        out
    }
}

impl fmt::Display for FactorMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unit != 1 || self.factors.is_empty() {
            write!(f, "{}", self.unit)?;
        }
        for (g, e) in &self.factors {
            write!(f, "({g})")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Squarefree decomposition of a monic polynomial: pairs `(g, i)` with `g`
/// squarefree and pairwise coprime, `f = prod g^i`.
fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.modulus();
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let c0 = f.gcd(&f.derivative());
    let mut w = f.divide_exact(&c0).expect("gcd divides");
    let mut c = c0;
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.divide_exact(&y).expect("gcd divides");
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.divide_exact(&w).expect("gcd divides");
        i += 1;
    }
    if !c.is_one() {
        // c is a p-th power: c(x) = h(x^p), and over F_p, h(x^p) = h(x)^p.
        let root = FpPoly::new(p, c.coeffs().iter().step_by(p as usize).copied().collect());
        for (g, e) in squarefree_decomposition(&root) {
            out.push((g, e * p as usize));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into products of irreducibles of
/// equal degree: pairs `(d, g)` with every factor of `g` of degree `d`.
fn distinct_degree(f: &FpPoly) -> Vec<(usize, FpPoly)> {
    let p = f.modulus();
    let x = FpPoly::x(p);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = x.rem(&rest);
    let mut d = 0;
    while rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(p, &rest);
        let g = h.sub(&x).gcd(&rest);
        if !g.is_one() {
            rest = rest.divide_exact(&g).expect("gcd divides");
            h = h.rem(&rest);
            out.push((d, g));
        }
    }
    if rest.deg() > 0 {
        out.push((rest.deg(), rest));
    }
    out
}

fn random_poly(rng: &mut ChaCha8Rng, modulus: u64, below_degree: usize) -> FpPoly {
    FpPoly::new(
        modulus,
        (0..below_degree).map(|_| rng.next_u64() % modulus).collect(),
    )
}

/// Equal-degree splitting of a squarefree monic `f` whose irreducible
/// factors all have degree `d`.
fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<FpPoly>) {
    let n = f.deg();
    if n == d {
        out.push(f.clone());
        return;
    }
    let p = f.modulus();
    loop {
        let a = random_poly(rng, p, n);
        if a.deg() == 0 {
            continue;
        }
        let candidate = if p == 2 {
            // Trace map F_{2^d} -> F_2: a + a^2 + ... + a^{2^{d-1}}.
            let mut term = a.rem(f);
            let mut acc = term.clone();
            for _ in 1..d {
                term = term.mul_mod(&term, f);
                acc = acc.add(&term);
            }
            acc
        } else {
            let e = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
            a.pow_mod_big(&e, f).sub(&FpPoly::one(p))
        };
        let g = candidate.gcd(f);
        if !g.is_one() && g.deg() < n {
            let other = f.divide_exact(&g).expect("gcd divides");
            equal_degree(&g, d, rng, out);
            equal_degree(&other, d, rng, out);
            return;
        }
    }
}

/// Complete factorization over `F_l` into monic irreducibles.
///
/// The randomized splitting is driven by a generator seeded with `seed`; the
/// result is sorted canonically and so does not depend on the seed.
pub fn factor(f: &FpPoly, seed: u64) -> Result<FactorMultiset> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let modulus = f.modulus();
    let unit = f.leading();
    let monic = f.monic();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: BTreeMap<FpPoly, usize> = BTreeMap::new();
    for (part, mult) in squarefree_decomposition(&monic) {
        for (d, block) in distinct_degree(&part) {
            let mut pieces = Vec::new();
            equal_degree(&block, d, &mut rng, &mut pieces);
            for g in pieces {
                *found.entry(g).or_insert(0) += mult;
            }
        }
    }
    Ok(FactorMultiset {
        modulus,
        unit,
        factors: found.into_iter().collect(),
    })
}

/// Roots in `F_l` with multiplicity, ascending.
pub fn roots(f: &FpPoly) -> Result<Vec<u64>> {
    Ok(factor(f, DEFAULT_SEED)?.roots())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fp(m: u64, c: &[i64]) -> FpPoly {
        FpPoly::from_i64s(m, c)
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_mod(&IntPoly::from_i64s(&[24, 1]), 13), fp(13, &[11, 1]));
        assert_eq!(
            reduce_mod(&IntPoly::from_i64s(&[-20468736, -1080, 1]), 5),
            fp(5, &[4, 0, 1])
        );
        assert_eq!(reduce_mod(&IntPoly::one(), 7), FpPoly::one(7));
    }

    #[test]
    fn factor_examples() {
        let f = factor(&fp(5, &[4, 0, 1]), 0).unwrap();
        assert_eq!(f.factors, vec![(fp(5, &[1, 1]), 1), (fp(5, &[4, 1]), 1)]);
        assert_eq!(f.roots(), vec![1, 4]);
        let g = factor(&fp(5, &[1, 1, 1]), 0).unwrap();
        assert_eq!(g.factors, vec![(fp(5, &[1, 1, 1]), 1)]);
        let h = factor(&fp(7, &[0, 0, 1]), 0).unwrap();
        assert_eq!(h.factors, vec![(FpPoly::x(7), 2)]);
        assert!(matches!(factor(&FpPoly::zero(3), 0), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn root_examples() {
        assert_eq!(roots(&fp(5, &[4, 0, 1])).unwrap(), vec![1, 4]);
        assert!(roots(&fp(5, &[1, 1, 1])).unwrap().is_empty());
        assert_eq!(roots(&fp(2, &[0, 0, 0, 1])).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn divide_exact_examples() {
        let a = fp(5, &[4, 0, 1]); // (x-1)(x-4)
        assert_eq!(a.divide_exact(&FpPoly::linear(5, 1)).unwrap(), FpPoly::linear(5, 4));
        match fp(5, &[1, 0, 1]).divide_exact(&FpPoly::linear(5, 1)) {
            Err(Error::InexactDivision { remainder, .. }) => assert_eq!(remainder, fp(5, &[2])),
            other => panic!("expected inexact division, got {other:?}"),
        }
        assert_eq!(a.divide_exact(&FpPoly::one(5)).unwrap(), a);
    }

    #[test]
    fn display_is_descending() {
        assert_eq!(fp(5, &[4, 0, 1]).to_string(), "x^2 + 4");
        assert_eq!(fp(13, &[11, 1]).to_string(), "x + 11");
        let f = factor(&fp(5, &[4, 0, 1]), 0).unwrap();
        assert_eq!(f.to_string(), "(x + 1)(x + 4)");
    }

    #[test]
    fn frobenius_root_extraction() {
        // (x + 1)^6 over F_3 = ((x+1)^2)^3
        let f = fp(3, &[1, 1]).pow(6);
        let fac = factor(&f, 0).unwrap();
        assert_eq!(fac.factors, vec![(fp(3, &[1, 1]), 6)]);
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 over F_2
        let g = fp(2, &[1, 0, 1, 0, 1]);
        assert_eq!(factor(&g, 0).unwrap().factors, vec![(fp(2, &[1, 1, 1]), 2)]);
    }

    /// All monic polynomials of a given degree.
    fn monics(m: u64, deg: usize) -> Vec<FpPoly> {
        let count = m.pow(deg as u32);
        (0..count)
            .map(|mut idx| {
                let mut c = Vec::with_capacity(deg + 1);
                for _ in 0..deg {
                    c.push(idx % m);
                    idx /= m;
                }
                c.push(1);
                FpPoly::new(m, c)
            })
            .collect()
    }

    /// Irreducible monics of degree <= 3 via "no factor of degree <= deg/2".
    fn brute_irreducibles(m: u64, deg: usize) -> Vec<FpPoly> {
        monics(m, deg)
            .into_iter()
            .filter(|f| {
                (1..=deg / 2).all(|d| monics(m, d).iter().all(|g| !f.rem(g).is_zero()))
            })
            .collect()
    }

    /// Factor by trial division against enumerated irreducibles.
    fn brute_factor(f: &FpPoly) -> Vec<(FpPoly, usize)> {
        let m = f.modulus();
        let mut rest = f.monic();
        let mut out = Vec::new();
        for d in 1..=f.deg() {
            for g in brute_irreducibles(m, d) {
                let mut e = 0;
                while rest.deg() >= d && rest.rem(&g).is_zero() {
                    rest = rest.divide_exact(&g).unwrap();
                    e += 1;
                }
                if e > 0 {
                    out.push((g, e));
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn agrees_with_brute_force_small_fields() {
        for m in [2u64, 3, 5, 7] {
            for deg in 1..=3 {
                for f in monics(m, deg) {
                    let fac = factor(&f, 0).unwrap();
                    assert_eq!(fac.factors, brute_factor(&f), "{f:?}");
                }
            }
        }
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // number of monic irreducibles of degree 4 over F_3 is (81 - 9) / 4 = 18
        let irreducible = monics(3, 4).into_iter().filter(|f| f.is_irreducible()).count();
        assert_eq!(irreducible, 18);
        let over_two = monics(2, 6).into_iter().filter(|f| f.is_irreducible()).count();
        assert_eq!(over_two, 9);
    }

    fn poly_strategy() -> impl Strategy<Value = FpPoly> {
        (prop::sample::select(vec![2u64, 3, 5, 7, 13, 101]), 1usize..14)
            .prop_flat_map(|(m, n)| {
                (Just(m), proptest::collection::vec(0..m, n), 1..m)
            })
            .prop_map(|(m, mut c, lead)| {
                c.push(lead);
                FpPoly::new(m, c)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn factorization_reassembles(f in poly_strategy(), seed in any::<u64>()) {
            let fac = factor(&f, seed).unwrap();
            prop_assert_eq!(fac.expand(), f);
        }

        #[test]
        fn factors_are_irreducible_and_seed_free(f in poly_strategy(), s1 in any::<u64>(), s2 in any::<u64>()) {
            let a = factor(&f, s1).unwrap();
            for (g, e) in &a.factors {
                prop_assert!(*e >= 1);
                prop_assert!(g.is_irreducible(), "{:?}", g);
                prop_assert_eq!(g.leading(), 1);
            }
            prop_assert_eq!(a, factor(&f, s2).unwrap());
        }
    }

    #[test]
    fn repeated_reducible_products() {
        // Exercise every branch with products of known irreducibles.
        for m in [2u64, 3, 5, 7, 13] {
            let irr = |d: usize| brute_irreducibles(m, d).into_iter().take(2).collect::<Vec<_>>();
            let mut parts = Vec::new();
            for d in 1..=3 {
                parts.extend(irr(d));
            }
            let mut f = FpPoly::new(m, vec![3 % m + (3 % m == 0) as u64]);
            let mut expected = Vec::new();
            for (i, g) in parts.iter().enumerate() {
                let e = 1 + (i % 3);
                f = f.mul(&g.pow(e as u64));
                expected.push((g.clone(), e));
            }
            expected.sort();
            let fac = factor(&f, 42).unwrap();
            assert_eq!(fac.factors, expected, "F_{m}");
            assert_eq!(fac.expand(), f);
        }
    }
}
