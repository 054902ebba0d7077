//! Eichler-Selberg trace formula for `T_n` on `S_k(1)`:
//!
//! ```text
//! tr T_n = -1/2 sum_{t^2 <= 4n} U_{k-1}(t, n) H(4n - t^2) - 1/2 sum_{dd' = n} min(d, d')^{k-1}
//! ```
//!
//! where `U_j` is the Lucas sequence `U_0 = 0, U_1 = 1, U_j = t U_{j-1} - n U_{j-2}`
//! and `H` is the Hurwitz class number with `H(0) = -1/12`.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, inv_mod, mul_mod, pow_mod, signed_mod};
use crate::error::{Error, Result};

/// Hurwitz class number `H(N)`: classes of positive definite binary quadratic
/// forms of discriminant `-N`, forms equivalent to multiples of `x^2 + y^2`
/// weighted `1/2` and of `x^2 + xy + y^2` weighted `1/3`.
pub fn hurwitz_class_number(n: u64) -> Ratio<i64> {
    if n == 0 {
        return Ratio::new(-1, 12);
    }
    // 12 * H(N) is an integer; count in twelfths.
    Ratio::new(hurwitz_twelfths(n), 12)
}

/// `12 H(N)` as an exact integer.
pub fn hurwitz_twelfths(n: u64) -> i64 {
    if n == 0 {
        return -1;
    }
    if n % 4 == 1 || n % 4 == 2 {
        return 0;
    }
    let n = n as i64;
    let mut total = 0i64;
    // Reduced forms: |b| <= a <= c, b^2 - 4ac = -N, so 3a^2 <= N.
    let mut a = 1i64;
    while 3 * a * a <= n {
        for b in -a..=a {
            let num = b * b + n;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (-b == a || a == c) {
                continue;
            }
            total += if a == b && b == c {
                4
            } else if b == 0 && a == c {
                6
            } else {
                12
            };
        }
        a += 1;
    }
    total
}

/// `U_{k-1}(t, n) = (eta^{k-1} - conj(eta)^{k-1}) / (eta - conj(eta))` with
/// `eta` a root of `x^2 - t x + n`, via the integer recursion.
pub fn weight_poly(k: u32, t: i64, n: u64) -> BigInt {
    assert!(k >= 2);
    let t = BigInt::from(t);
    let n = BigInt::from(n);
    let mut prev = BigInt::zero();
    let mut cur = BigInt::one();
    for _ in 1..k - 1 {
        let next = &t * &cur - &n * &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// The two pieces of the trace formula before the final `-1/2` scaling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceTerms {
    /// `sum_{t^2 <= 4n} U_{k-1}(t, n) H(4n - t^2)`
    pub elliptic: BigRational,
    /// `sum_{dd' = n} min(d, d')^{k-1}`
    pub hyperbolic: BigInt,
}

impl TraceTerms {
    pub fn new(n: u64, k: u32) -> Self {
        let mut elliptic = BigRational::zero();
        let four_n = 4 * n as i64;
        let mut t = 0i64;
        while t * t <= four_n {
            let h = hurwitz_class_number((four_n - t * t) as u64);
            let h = BigRational::new(BigInt::from(*h.numer()), BigInt::from(*h.denom()));
            let u = BigRational::from_integer(weight_poly(k, t, n));
            let mult = if t == 0 { 1 } else { 2 }; // t and -t agree for even k
            elliptic += u * h * BigRational::from_integer(BigInt::from(mult));
            t += 1;
        }
        let hyperbolic = divisors(n)
            .into_iter()
            .map(|d| BigInt::from(d.min(n / d)).pow(k - 1))
            .sum();
        Self {
            elliptic,
            hyperbolic,
        }
    }

    pub fn total(&self) -> BigRational {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        -(&self.elliptic * &half) - BigRational::from_integer(self.hyperbolic.clone()) * half
    }
}

fn check_weight(k: u32) -> Result<()> {
    if k % 2 == 1 {
        return Err(Error::OddWeight(k));
    }
    if k < 4 {
        return Err(Error::WeightTooSmall { weight: k, min: 4 });
    }
    Ok(())
}

/// Trace of `T_n` on `S_k(1)` from the trace formula.
pub fn trace(n: u64, k: u32) -> Result<BigInt> {
    check_weight(k)?;
    assert!(n >= 1);
    let total = TraceTerms::new(n, k).total();
    if !total.is_integer() {
        return Err(Error::NonIntegralTrace(total.to_string()));
    }
    Ok(total.to_integer())
}

/// `trace(n, k) mod ell`, evaluated entirely in `F_ell` (needs `ell >= 5`
/// so that the denominators 2 and 3 are invertible).
pub fn trace_mod(n: u64, k: u32, ell: u64) -> Result<u64> {
    check_weight(k)?;
    if ell < 5 {
        return Err(Error::UnsupportedModulus {
            ell,
            expected: "primes >= 5",
        });
    }
    let lucas = |t: i64| -> u64 {
        let tm = signed_mod(t, ell);
        let nm = n % ell;
        let (mut prev, mut cur) = (0u64, 1u64);
        for _ in 1..k - 1 {
            let next = (mul_mod(tm, cur, ell) + ell - mul_mod(nm, prev, ell)) % ell;
            prev = cur;
            cur = next;
        }
        cur
    };
    let four_n = 4 * n as i64;
    // 24 * trace = -sum U * (12 H) * mult - 12 * hyperbolic
    let mut acc = 0u64;
    let mut t = 0i64;
    while t * t <= four_n {
        let h12 = signed_mod(hurwitz_twelfths((four_n - t * t) as u64), ell);
        let mult = if t == 0 { 1 } else { 2 };
        acc = (acc + mul_mod(mul_mod(lucas(t), h12, ell), mult, ell)) % ell;
        t += 1;
    }
    let hyperbolic = divisors(n)
        .into_iter()
        .fold(0u64, |s, d| (s + pow_mod(d.min(n / d), (k - 1) as u64, ell)) % ell);
    let scaled = (2 * ell - acc - mul_mod(12, hyperbolic, ell)) % ell;
    Ok(mul_mod(scaled, inv_mod(24 % ell, ell), ell))
}

/// Result of a period search on `trace(n, k) mod ell` along one weight class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracePeriod {
    pub n: u64,
    pub ell: u64,
    pub kclass: u32,
    /// Period in weight units, a multiple of `ell - 1`.
    pub period: u32,
    /// Largest weight whose trace was compared.
    pub verified_to_weight: u32,
}

/// Upper bound on the weight period of `trace(n, k) mod ell`: the Lucas
/// sequences in `F_ell` have period dividing `ell^2 - 1`, `ell - 1` or
/// `ell (ell - 1)`, so `ell (ell^2 - 1)` covers every case.
pub fn trace_period_bound(ell: u64) -> u64 {
    ell * (ell * ell - 1)
}

/// Least `L`, a multiple of `ell - 1`, with `trace(n, k) = trace(n, k + L) mod ell`
/// for every sampled weight `k = kclass mod (ell - 1)`.
///
/// Weights from the first one `>= 4` in the class are scanned over three
/// bound-lengths, so every candidate is checked across at least two full
/// periods.
pub fn trace_mod_periodicity(n: u64, ell: u64, kclass: u32) -> Result<TracePeriod> {
    if ell < 5 || !crate::arith::is_prime(ell) {
        return Err(Error::UnsupportedModulus {
            ell,
            expected: "primes >= 5",
        });
    }
    if n % ell == 0 {
        return Err(Error::IndexEqualsModulus { p: n, ell });
    }
    if kclass % 2 == 1 {
        return Err(Error::OddWeight(kclass));
    }
    let step = (ell - 1) as u32;
    let kclass = kclass % step;
    let mut k0 = kclass;
    while k0 < 4 {
        k0 += step;
    }
    let bound_steps = (trace_period_bound(ell) / (ell - 1)) as usize;
    let samples = 3 * bound_steps;
    let values: Vec<u64> = (0..samples)
        .map(|i| trace_mod(n, k0 + i as u32 * step, ell))
        .collect::<Result<_>>()?;
    for period in 1..=bound_steps {
        if (0..samples - period).all(|i| values[i] == values[i + period]) {
            return Ok(TracePeriod {
                n,
                ell,
                kclass,
                period: period as u32 * step,
                verified_to_weight: k0 + (samples as u32 - 1) * step,
            });
        }
    }
    Err(Error::PeriodNotFound {
        what: format!("trace of T_{n} mod {ell}, weights {kclass} mod {step}"),
        searched: bound_steps,
    })
}
