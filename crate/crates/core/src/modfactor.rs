//! Factorizations of `T_{p,k}(x) mod l` as the weight walks through a
//! residue class mod `l - 1`.
//!
//! Multiplication by `E_{l-1} = 1 mod l` embeds `S_k` into `S_{k+l-1}` mod `l`
//! compatibly with `T_p`, so `T_{p,k} | T_{p,k+l-1} mod l`. The successive
//! quotients form a periodic sequence; for `l` in `{5, 7, 13}` each quotient
//! has degree at most one and the tables reduce to a periodic sequence of
//! roots `a_j`.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, pow_mod};
use crate::cache::CharpolyCache;
use crate::error::{Error, Result};
use crate::gfpoly::{factor, reduce_mod, FactorMultiset, FpPoly, DEFAULT_SEED};
use crate::hecke::{dim_cusp, IntPoly};

/// Row representatives for the `l = 5` table, in printed order (classes 1, 2, 3, 4 mod 5).
pub const ROWS_MOD_5: [u64; 4] = [11, 2, 3, 19];
/// Row representatives for the `l = 7` table, in printed order
/// (classes 1, 2, 3, 4, 5, 6 mod 7).
pub const ROWS_MOD_7: [u64; 6] = [29, 2, 3, 11, 5, 13];

/// Moduli for which every dimension step along a class is at most one, so
/// that the root sequence is well defined.
pub const ROOT_SEQUENCE_MODULI: [u64; 3] = [5, 7, 13];

/// Shared state for mod-`l` computations: the characteristic polynomial
/// cache and the seed used by the randomized factorization.
#[derive(Debug)]
pub struct Engine {
    cache: CharpolyCache,
    seed: u64,
}

impl Default for Engine {
    fn default() -> Self {
        Self::new(CharpolyCache::in_memory())
    }
}

impl Engine {
    pub fn new(cache: CharpolyCache) -> Self {
        Self {
            cache,
            seed: DEFAULT_SEED,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cache(&self) -> &CharpolyCache {
        &self.cache
    }

    /// Exact `T_{p,k}(x)`.
    pub fn charpoly(&self, p: u64, k: u32) -> Result<Arc<IntPoly>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k % 2 == 1 {
            return Err(Error::OddWeight(k));
        }
        self.cache.charpoly(p, k)
    }

    /// Computes the characteristic polynomials for all `(p, k)` pairs,
    /// in parallel when the `parallel` feature is on.
    pub fn prefetch(&self, keys: &[(u64, u32)]) -> Result<()> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            // largest first: they dominate the wall time
            let mut keys = keys.to_vec();
            keys.sort_by_key(|&(p, k)| std::cmp::Reverse(p * dim_cusp(k as i64) as u64));
            keys.par_iter()
                .map(|&(p, k)| self.charpoly(p, k).map(|_| ()))
                .collect::<Result<Vec<()>>>()?;
        }
        #[cfg(not(feature = "parallel"))]
        for &(p, k) in keys {
            self.charpoly(p, k)?;
        }
        Ok(())
    }

    /// `T_{p,k}(x) mod l` for a prime `p != l`.
    pub fn charpoly_mod(&self, p: u64, k: u32, ell: u64) -> Result<FpPoly> {
        check_modulus(ell)?;
        if p == ell {
            return Err(Error::IndexEqualsModulus { p, ell });
        }
        Ok(reduce_mod(&*self.charpoly(p, k)?, ell))
    }

    pub fn factor_mod(&self, p: u64, k: u32, ell: u64) -> Result<FactorMultiset> {
        factor(&self.charpoly_mod(p, k, ell)?, self.seed)
    }

    /// The quotient `g` with `T_{p,k+l-1} = g T_{p,k} mod l`.
    pub fn divisibility_check(&self, p: u64, ell: u64, k: u32) -> Result<FpPoly> {
        if ell < 5 {
            return Err(Error::UnsupportedModulus {
                ell,
                expected: "primes >= 5",
            });
        }
        let next = k + ell as u32 - 1;
        let small = self.charpoly_mod(p, k, ell)?;
        let big = self.charpoly_mod(p, next, ell)?;
        let (q, r) = big.div_rem(&small);
        if !r.is_zero() {
            return Err(Error::DivisibilityViolation {
                p,
                ell,
                k,
                next,
                remainder: r,
            });
        }
        Ok(q)
    }

    /// Quotients `f_j = T_{p,k0+j(l-1)} / T_{p,k0+(j-1)(l-1)} mod l` for all
    /// weights up to `max_weight`, with `k0` the least weight `>= 12` in the class.
    pub fn quotient_sequence(
        &self,
        p: u64,
        ell: u64,
        kclass: u32,
        max_weight: u32,
    ) -> Result<QuotientSequence> {
        if ell < 5 {
            return Err(Error::UnsupportedModulus {
                ell,
                expected: "primes >= 5",
            });
        }
        let step = ell as u32 - 1;
        let kclass = normalize_class(kclass, step)?;
        let mut k0 = kclass;
        while k0 < 12 {
            k0 += step;
        }
        let weights: Vec<u32> = (k0..=max_weight.max(k0)).step_by(step as usize).collect();
        self.prefetch(&weights.iter().map(|&k| (p, k)).collect::<Vec<_>>())?;
        let base = self.charpoly_mod(p, k0, ell)?;
        let bound = max_dimension_jump(ell);
        let mut terms = Vec::new();
        for &k in weights.iter().skip(1) {
            let f = self.divisibility_check(p, ell, k - step)?;
            let jump = dim_cusp(k as i64) - dim_cusp((k - step) as i64);
            debug_assert_eq!(f.degree(), Some(jump));
            if jump > bound {
                return Err(Error::SplittingViolation {
                    p,
                    k,
                    ell,
                    detail: format!("quotient degree {jump} exceeds the bound {bound}"),
                });
            }
            terms.push(f);
        }
        Ok(QuotientSequence {
            p,
            ell,
            k0,
            base,
            terms,
        })
    }

    /// Root sequence `a_1, a_2, ...` of `T_{p,k} mod l` along the weights
    /// `k = kclass mod (l - 1)` up to `max_weight`, with its detected period.
    ///
    /// Fails if some weight does not split completely, if a dimension step
    /// adds more than one root, or if fewer than two full periods are seen.
    pub fn root_sequence(
        &self,
        p: u64,
        ell: u64,
        kclass: u32,
        max_weight: u32,
    ) -> Result<RootSequence> {
        let terms = self.root_terms(p, ell, kclass, max_weight)?;
        let period = detect_period(&terms.terms, max_period_steps(ell)).ok_or_else(|| {
            Error::PeriodNotFound {
                what: format!(
                    "roots of T_{{{p},k}} mod {ell}, k = {} mod {}",
                    terms.kclass,
                    ell - 1
                ),
                searched: terms.terms.len() / 2,
            }
        })?;
        Ok(RootSequence {
            period: Some(period),
            ..terms
        })
    }

    /// The same walk as [`Engine::root_sequence`] without period detection.
    pub fn root_terms(
        &self,
        p: u64,
        ell: u64,
        kclass: u32,
        max_weight: u32,
    ) -> Result<RootSequence> {
        if !ROOT_SEQUENCE_MODULI.contains(&ell) {
            return Err(Error::UnsupportedModulus {
                ell,
                expected: "5, 7 or 13",
            });
        }
        let seq = self.quotient_sequence(p, ell, kclass, max_weight)?;
        let step = ell as u32 - 1;
        let mut terms = Vec::new();
        let base_roots = self.split_roots(p, seq.k0, ell, &seq.base)?;
        if base_roots.len() > 1 {
            return Err(Error::SplittingViolation {
                p,
                k: seq.k0,
                ell,
                detail: "first weight of the class already has several roots".into(),
            });
        }
        terms.extend(base_roots);
        for (j, f) in seq.terms.iter().enumerate() {
            let k = seq.k0 + (j as u32 + 1) * step;
            terms.extend(self.split_roots(p, k, ell, f)?);
        }
        let verified_to_weight = seq.k0 + seq.terms.len() as u32 * step;
        Ok(RootSequence {
            p,
            ell,
            kclass: seq.k0 % step,
            terms,
            period: None,
            verified_to_weight,
        })
    }

    fn split_roots(&self, p: u64, k: u32, ell: u64, f: &FpPoly) -> Result<Vec<u64>> {
        let fac = factor(f, self.seed)?;
        if !fac.splits_completely() {
            return Err(Error::SplittingViolation {
                p,
                k,
                ell,
                detail: format!("factor {fac} is not a product of linear terms"),
            });
        }
        Ok(fac.roots())
    }

    /// Checks that the roots of `T_{p,k} mod l` are the first `d_k` terms of
    /// `seq` for every weight of the class up to `seq.verified_to_weight`.
    pub fn verify_prefixes(&self, seq: &RootSequence) -> Result<bool> {
        let step = seq.ell as u32 - 1;
        let mut k = seq.kclass;
        while k <= seq.verified_to_weight {
            let d = dim_cusp(k as i64);
            if d > 0 {
                let mut expected = seq.terms[..d].to_vec();
                expected.sort_unstable();
                if self.factor_mod(seq.p, k, seq.ell)?.roots() != expected {
                    return Ok(false);
                }
            }
            k += step;
        }
        Ok(true)
    }

    /// Root-sequence table for `l` in `{5, 7}` (rows by residue class of `p`,
    /// columns by `k mod (l - 1)`) or `l = 13` (`p = 2`, rows by `k mod 12`).
    pub fn period_table(&self, ell: u64, window: Window) -> Result<PeriodTable> {
        let step = match ell {
            5 | 7 | 13 => ell as u32 - 1,
            _ => {
                return Err(Error::UnsupportedModulus {
                    ell,
                    expected: "5, 7 or 13",
                })
            }
        };
        let classes: Vec<u32> = (0..step).step_by(2).collect();
        let row_primes: Vec<u64> = match ell {
            5 => ROWS_MOD_5.to_vec(),
            7 => ROWS_MOD_7.to_vec(),
            _ => vec![2],
        };
        let bound = |c: u32| window.max_weight(ell, c);
        let cell = |p: u64, c: u32| match window {
            Window::SinglePeriod => self.root_terms(p, ell, c, bound(c)),
            _ => self.root_sequence(p, ell, c, bound(c)),
        };
        let mut keys = Vec::new();
        for &p in &row_primes {
            for &c in &classes {
                let mut k = c;
                while k <= bound(c) {
                    keys.push((p, k));
                    k += step;
                }
            }
        }
        self.prefetch(&keys)?;
        let rows = if ell == 13 {
            classes
                .iter()
                .map(|&c| {
                    Ok(TableRow {
                        label: RowLabel::WeightClass(c),
                        cells: vec![cell(2, c)?],
                    })
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            row_primes
                .iter()
                .map(|&p| {
                    Ok(TableRow {
                        label: RowLabel::Prime(p),
                        cells: classes
                            .iter()
                            .map(|&c| cell(p, c))
                            .collect::<Result<Vec<_>>>()?,
                    })
                })
                .collect::<Result<Vec<_>>>()?
        };
        Ok(PeriodTable {
            ell,
            classes,
            rows,
        })
    }

    /// Does `T_{p,k} = T_{q,k} mod l`?
    pub fn congruence_class_invariance(&self, p: u64, q: u64, ell: u64, k: u32) -> Result<bool> {
        Ok(self.charpoly_mod(p, k, ell)? == self.charpoly_mod(q, k, ell)?)
    }

    /// Every root of `T_{p,k} mod l` lies in `{p^m + p^n mod l}`.
    pub fn serre_classification_check(&self, ell: u64, p: u64, k: u32) -> Result<bool> {
        let allowed = serre_values(ell, p);
        Ok(self
            .factor_mod(p, k, ell)?
            .roots()
            .iter()
            .all(|r| allowed.contains(r)))
    }

    /// Compares [`small_ell_rule`] with the direct reduction.
    pub fn small_ell_rule_holds(&self, p: u64, k: u32, ell: u64) -> Result<bool> {
        Ok(small_ell_rule(p, k, ell)? == self.charpoly_mod(p, k, ell)?)
    }
}

fn check_modulus(ell: u64) -> Result<()> {
    if is_prime(ell) {
        Ok(())
    } else {
        Err(Error::NotPrime(ell))
    }
}

fn normalize_class(kclass: u32, step: u32) -> Result<u32> {
    if kclass % 2 == 1 {
        return Err(Error::OddWeight(kclass));
    }
    Ok(kclass % step)
}

/// How far along each weight class a table is computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Window {
    /// [`default_max_weight`]: two full periods, period detected.
    #[default]
    Default,
    /// Up to the given weight, period detected.
    MaxWeight(u32),
    /// [`single_period_max_weight`]: one period's worth of terms, no detection.
    SinglePeriod,
}

impl Window {
    pub fn max_weight(self, ell: u64, kclass: u32) -> u32 {
        match self {
            Window::Default => default_max_weight(ell, kclass),
            Window::MaxWeight(k) => k,
            Window::SinglePeriod => single_period_max_weight(ell, kclass),
        }
    }
}

/// Largest `d_{k+l-1} - d_k` over all even `k`.
pub fn max_dimension_jump(ell: u64) -> usize {
    let step = ell as i64 - 1;
    // d_k is periodic-plus-linear with period 12, so two periods suffice.
    (0..48i64)
        .step_by(2)
        .map(|k| dim_cusp(k + step) - dim_cusp(k))
        .max()
        .unwrap_or(0)
}

/// Search cutoff for the root-sequence period: `4 (l^2 - 1)` dimension steps.
pub fn max_period_steps(ell: u64) -> usize {
    4 * (ell * ell - 1) as usize
}

/// Default last weight of a table cell: two twelve-step dimension cycles per
/// step of `l - 1` for `l` in `{5, 7}`, and enough weights for 28 terms
/// (two periods of 14) for `l = 13`.
pub fn default_max_weight(ell: u64, kclass: u32) -> u32 {
    let step = ell as u32 - 1;
    if ell == 13 {
        let mut k = kclass % step;
        while dim_cusp(k as i64) < 28 {
            k += step;
        }
        k
    } else {
        2 * 12 * step + kclass % step
    }
}

/// Last weight needed for a single period: half the default window for
/// `l` in `{5, 7}`, and 14 terms for `l = 13`. Periods found in such a
/// window are not confirmed by a second repetition.
pub fn single_period_max_weight(ell: u64, kclass: u32) -> u32 {
    let step = ell as u32 - 1;
    if ell == 13 {
        let mut k = kclass % step;
        while dim_cusp(k as i64) < 14 {
            k += step;
        }
        k
    } else {
        12 * step + kclass % step
    }
}

/// Least `P <= cutoff` such that `terms` has period `P` and spans at least
/// two full periods.
pub fn detect_period<T: PartialEq>(terms: &[T], cutoff: usize) -> Option<usize> {
    (1..=cutoff.min(terms.len() / 2))
        .find(|&p| (0..terms.len() - p).all(|i| terms[i] == terms[i + p]))
}

/// `{p^m + p^n mod l : 0 <= m <= n < l - 1}`.
pub fn serre_values(ell: u64, p: u64) -> BTreeSet<u64> {
    let order = ell - 1;
    let mut out = BTreeSet::new();
    for m in 0..order {
        for n in m..order {
            out.insert((pow_mod(p, m, ell) + pow_mod(p, n, ell)) % ell);
        }
    }
    out
}

/// Closed forms for `l` in `{2, 3}`: `x^{d_k} mod 2` for odd `p`;
/// mod 3, `(x - 2)^{d_k}` when `p = 1 mod 3` and `x^{d_k}` when `p = 2 mod 3`.
pub fn small_ell_rule(p: u64, k: u32, ell: u64) -> Result<FpPoly> {
    if k % 2 == 1 {
        return Err(Error::OddWeight(k));
    }
    let d = dim_cusp(k as i64) as u64;
    let root = match (ell, p % ell) {
        (_, 0) => return Err(Error::IndexEqualsModulus { p, ell }),
        (2, _) => 0,
        (3, 1) => 2,
        (3, 2) => 0,
        _ => {
            return Err(Error::UnsupportedModulus {
                ell,
                expected: "2 or 3",
            })
        }
    };
    Ok(FpPoly::linear(ell, root).pow(d))
}

/// `T_{p,k} = base * prod_j f_j mod l` along one weight class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientSequence {
    pub p: u64,
    pub ell: u64,
    pub k0: u32,
    /// `T_{p,k0} mod l`.
    pub base: FpPoly,
    /// `f_1, f_2, ...`; `f_j` lives at weight `k0 + j (l - 1)`.
    pub terms: Vec<FpPoly>,
}

impl QuotientSequence {
    /// Period of `f_j` in steps of `l - 1`, if two full periods are present.
    pub fn period(&self) -> Option<usize> {
        detect_period(&self.terms, self.terms.len())
    }

    /// Reassembles `T_{p,k} mod l` for `k = k0 + j (l - 1)`.
    pub fn product_up_to(&self, j: usize) -> FpPoly {
        self.terms[..j]
            .iter()
            .fold(self.base.clone(), |acc, f| acc.mul(f))
    }
}

/// The roots `a_j` of `T_{p,k} mod l` along a weight class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSequence {
    pub p: u64,
    pub ell: u64,
    /// `k mod (l - 1)`.
    pub kclass: u32,
    pub terms: Vec<u64>,
    pub period: Option<usize>,
    /// Last weight whose factorization contributed to `terms`.
    pub verified_to_weight: u32,
}

impl RootSequence {
    /// One period of the sequence, or every term if no period is known.
    pub fn one_period(&self) -> &[u64] {
        match self.period {
            Some(p) => &self.terms[..p],
            None => &self.terms,
        }
    }

    /// Multiset of the first `d` terms, ascending.
    pub fn prefix_roots(&self, d: usize) -> Vec<u64> {
        let mut v = self.terms[..d.min(self.terms.len())].to_vec();
        v.sort_unstable();
        v
    }

    /// Human form of one period, e.g. `(1, 4)`.
    pub fn period_string(&self) -> String {
        let parts: Vec<String> = self.one_period().iter().map(u64::to_string).collect();
        format!("({})", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowLabel {
    /// Representative prime of a residue class mod `l`.
    Prime(u64),
    /// Residue of the weight mod `l - 1` (used when `p` is fixed).
    WeightClass(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: RowLabel,
    pub cells: Vec<RootSequence>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodTable {
    pub ell: u64,
    /// Weight classes of the columns (for `l = 13` they label rows instead).
    pub classes: Vec<u32>,
    pub rows: Vec<TableRow>,
}

impl PeriodTable {
    pub fn cell(&self, p: u64, kclass: u32) -> Option<&RootSequence> {
        self.rows
            .iter()
            .flat_map(|r| &r.cells)
            .find(|s| s.p == p && s.kclass == kclass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(m: u64, c: &[i64]) -> FpPoly {
        FpPoly::from_i64s(m, c)
    }

    #[test]
    fn charpoly_mod_examples() {
        let e = Engine::default();
        assert_eq!(e.charpoly_mod(2, 12, 13).unwrap(), fp(13, &[11, 1]));
        assert_eq!(e.charpoly_mod(2, 24, 5).unwrap(), fp(5, &[4, 0, 1]));
        assert_eq!(e.charpoly_mod(2, 10, 7).unwrap(), FpPoly::one(7));
        assert!(matches!(
            e.charpoly_mod(5, 12, 5),
            Err(Error::IndexEqualsModulus { p: 5, ell: 5 })
        ));
        assert!(matches!(e.charpoly_mod(4, 12, 5), Err(Error::NotPrime(4))));
        assert!(matches!(e.charpoly_mod(2, 13, 5), Err(Error::OddWeight(13))));
    }

    #[test]
    fn divisibility_examples() {
        let e = Engine::default();
        assert_eq!(e.divisibility_check(2, 5, 20).unwrap(), FpPoly::linear(5, 4));
        assert_eq!(e.divisibility_check(2, 5, 12).unwrap(), FpPoly::one(5));
        assert_eq!(e.divisibility_check(3, 7, 12).unwrap().degree(), Some(0));
    }

    #[test]
    fn root_sequence_examples() {
        let e = Engine::default();
        let s = e.root_sequence(2, 5, 0, 110).unwrap();
        assert_eq!(s.one_period(), &[1, 4]);
        assert_eq!(s.period, Some(2));
        let s = e.root_sequence(3, 7, 0, 200).unwrap();
        assert_eq!(s.one_period(), &[0, 1, 0, 6]);
        assert!(e.verify_prefixes(&s).unwrap());
    }

    #[test]
    fn quotient_sequence_reassembles() {
        let e = Engine::default();
        let q = e.quotient_sequence(2, 7, 2, 150).unwrap();
        assert_eq!(q.k0, 14);
        for j in 0..=q.terms.len() {
            let k = q.k0 + j as u32 * 6;
            assert_eq!(q.product_up_to(j), e.charpoly_mod(2, k, 7).unwrap());
        }
        assert!(q.terms.iter().all(|f| f.degree().unwrap() <= 1));
        assert!(q.period().is_some());
    }

    #[test]
    fn period_detection() {
        assert_eq!(detect_period(&[1, 4, 1, 4], 10), Some(2));
        assert_eq!(detect_period(&[1, 4, 1], 10), None);
        assert_eq!(detect_period(&[2, 2], 10), Some(1));
        assert_eq!(detect_period(&[0, 1, 0, 6, 0, 1, 0, 6, 0], 10), Some(4));
        assert_eq!(detect_period::<u64>(&[], 10), None);
    }

    #[test]
    fn small_ell_examples() {
        assert_eq!(small_ell_rule(7, 24, 3).unwrap(), fp(3, &[1, 2, 1]));
        assert_eq!(small_ell_rule(5, 12, 2).unwrap(), FpPoly::x(2));
        assert_eq!(small_ell_rule(5, 10, 2).unwrap(), FpPoly::one(2));
        assert!(small_ell_rule(3, 12, 3).is_err());
    }

    #[test]
    fn congruence_examples() {
        let e = Engine::default();
        assert!(e.congruence_class_invariance(2, 7, 5, 24).unwrap());
        assert!(e.congruence_class_invariance(3, 13, 5, 24).unwrap());
        assert!(e.congruence_class_invariance(2, 2, 13, 40).unwrap());
    }

    #[test]
    fn serre_examples() {
        let e = Engine::default();
        assert_eq!(serre_values(5, 2), BTreeSet::from([0, 1, 2, 3, 4]));
        assert!(e.serre_classification_check(5, 2, 24).unwrap());
        assert!(e.serre_classification_check(3, 7, 12).unwrap());
        assert!(e.serre_classification_check(7, 13, 12).unwrap());
        // p = 1 mod 3 allows only the root 2
        assert_eq!(serre_values(3, 7), BTreeSet::from([2]));
    }

    #[test]
    fn dimension_jumps_are_bounded_for_table_moduli() {
        for ell in [5, 7, 13] {
            assert_eq!(max_dimension_jump(ell), 1, "ell={ell}");
        }
        assert_eq!(max_dimension_jump(29), 3);
    }

    #[test]
    fn default_windows() {
        assert_eq!(default_max_weight(5, 2), 98);
        let k = default_max_weight(13, 2);
        assert_eq!(k % 12, 2);
        assert_eq!(dim_cusp(k as i64), 28);
    }
}
