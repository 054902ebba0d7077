//! Certificates of irreducibility and of full symmetric Galois group, built
//! from factorizations modulo small primes, and the deductions that transfer
//! such properties from one Hecke polynomial to another.
//!
//! A squarefree reduction mod `l` of a monic integer polynomial gives the
//! cycle type of a Frobenius element (Dedekind). Irreducibility follows from
//! one irreducible reduction or from a sieve on the possible degrees of a
//! rational factor. The full symmetric group follows from transitivity, a
//! transposition, and a prime cycle longer than half the degree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, is_prime, primes_up_to, signed_mod};
use crate::error::{Error, Result};
use crate::gfpoly::{factor, reduce_mod, FactorMultiset, FpPoly};
use crate::hecke::{dim_cusp, IntPoly};
use crate::modfactor::{default_max_weight, Engine, ROWS_MOD_5, ROWS_MOD_7};

/// Constant terms up to this size are factored to sharpen the degree sieve.
const CONSTANT_TERM_LIMIT: u64 = 1_000_000_000_000;

/// Degrees of the irreducible factors of a squarefree reduction, descending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleType {
    pub ell: u64,
    pub parts: Vec<usize>,
}

impl CycleType {
    pub fn degree(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Some power of the permutation is a transposition: exactly one part
    /// equals 2 and every other part is odd.
    pub fn yields_transposition(&self) -> bool {
        self.parts.iter().filter(|&&c| c == 2).count() == 1
            && self.parts.iter().all(|&c| c == 2 || c % 2 == 1)
    }

    /// A prime part `q > d/2`. Every other part is shorter than `q`, so a
    /// power of the permutation is a pure `q`-cycle.
    pub fn long_prime_cycle(&self) -> Option<usize> {
        let d = self.degree();
        self.parts
            .iter()
            .copied()
            .find(|&q| 2 * q > d && is_prime(q as u64))
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(usize::to_string).collect();
        write!(f, "[{}] mod {}", parts.join(","), self.ell)
    }
}

/// The reduction mod `ell` has a repeated factor, so it carries no cycle type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeFailure {
    pub ell: u64,
    pub factors: FactorMultiset,
}

/// Cycle type of Frobenius at `ell` for a monic nonconstant `f`.
pub fn cycle_type(f: &IntPoly, ell: u64, seed: u64) -> Result<CycleType, SquarefreeFailure> {
    assert!(f.is_monic(), "cycle types need a monic polynomial");
    let factors = factor(&reduce_mod(f, ell), seed).expect("monic polynomial is nonzero mod ell");
    if factors.is_squarefree() {
        Ok(CycleType {
            ell,
            parts: factors.degree_partition(),
        })
    } else {
        Err(SquarefreeFailure { ell, factors })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    Hecke { p: u64, k: u32 },
    Polynomial { coeffs: IntPoly },
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Hecke { p, k } => write!(f, "T_{{{p},{k}}}(x)"),
            Subject::Polynomial { coeffs } => write!(f, "{coeffs}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Irreducible,
    FullSymmetricGroup,
    PowerOfIrreducible(usize),
    LinearPower(usize),
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Claim::Irreducible => write!(f, "irreducible"),
            Claim::FullSymmetricGroup => write!(f, "irreducible with full symmetric Galois group"),
            Claim::PowerOfIrreducible(r) => write!(f, "an irreducible polynomial to the power {r}"),
            Claim::LinearPower(d) => write!(f, "(x - a)^{d}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Degree one.
    Trivial,
    IrreducibleModEll,
    DegreeSetSieve,
    /// Degree two or three: irreducible, plus a transposition when `d = 3`.
    SmallDegree,
    /// Transitive, with a transposition and a prime cycle of length `> d/2`.
    Jordan,
    /// Two distinct roots mod 5 or 7 exclude the linear-power branch.
    DistinctRootTransfer,
    /// Odd dimension: root multiplicities exclude every proper power.
    OddDimensionTransfer,
    /// Dimension `2 mod 4` and `p = 3, 5 mod 7`.
    TwoModFourTransfer,
    /// Dimension not a multiple of 14 (via `T_2 mod 13`) or of 28 (via `T_3`).
    /// Rests on the period-14 sequence beyond the verified weights.
    Mod13Period,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption {
    IrreducibleForSomeN { k: u32 },
    FullGaloisForSomeN { k: u32 },
}

impl Assumption {
    fn discharged_by(&self, witness: &Certificate) -> bool {
        let Subject::Hecke { k, .. } = witness.subject else {
            return false;
        };
        if !witness.is_unconditional() || witness.provisional {
            return false;
        }
        match *self {
            Assumption::IrreducibleForSomeN { k: want } => {
                want == k
                    && matches!(witness.claim, Claim::Irreducible | Claim::FullSymmetricGroup)
            }
            Assumption::FullGaloisForSomeN { k: want } => {
                want == k && witness.claim == Claim::FullSymmetricGroup
            }
        }
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assumption::IrreducibleForSomeN { k } => {
                write!(f, "T_{{n,{k}}}(x) is irreducible for some n")
            }
            Assumption::FullGaloisForSomeN { k } => write!(
                f,
                "T_{{n,{k}}}(x) is irreducible and has full Galois group for some n"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    /// Factorization of the subject mod `ell`.
    Factorization { ell: u64, factors: FactorMultiset },
    CycleType(CycleType),
    /// Leading terms of a root sequence from a table row; `extended` is set
    /// when the prefix runs past the computed terms and uses the period.
    RootPrefix {
        ell: u64,
        row_prime: u64,
        kclass: u32,
        terms: Vec<u64>,
        extended: bool,
    },
    Shape(ShapeVerdict),
    Certificate(Box<Certificate>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discharge {
    pub assumption: Assumption,
    pub witness: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: Claim,
    pub subject: Subject,
    pub rule: Rule,
    pub evidence: Vec<Evidence>,
    /// Hypotheses still open.
    pub assumptions: Vec<Assumption>,
    /// Hypotheses closed by an unconditional certificate.
    pub discharged: Vec<Discharge>,
    /// The rule extrapolates a sequence past the weights actually computed.
    pub provisional: bool,
}

impl Certificate {
    fn new(claim: Claim, subject: Subject, rule: Rule, evidence: Vec<Evidence>) -> Self {
        Self {
            claim,
            subject,
            rule,
            evidence,
            assumptions: Vec::new(),
            discharged: Vec::new(),
            provisional: false,
        }
    }

    pub fn is_unconditional(&self) -> bool {
        self.assumptions.is_empty()
    }

    /// Closes every open assumption that `witness` proves. Returns whether
    /// anything changed.
    pub fn discharge(&mut self, witness: &Certificate) -> bool {
        let (closed, open): (Vec<_>, Vec<_>) = self
            .assumptions
            .iter()
            .partition(|a| a.discharged_by(witness));
        self.assumptions = open;
        for assumption in &closed {
            self.discharged.push(Discharge {
                assumption: *assumption,
                witness: witness.clone(),
            });
        }
        !closed.is_empty()
    }

    /// Recomputes every piece of evidence from scratch and re-checks the rule.
    pub fn verify(&self, engine: &Engine) -> Result<bool> {
        let poly = match &self.subject {
            Subject::Hecke { p, k } => (*engine.charpoly(*p, *k)?).clone(),
            Subject::Polynomial { coeffs } => coeffs.clone(),
        };
        let d = poly.degree().unwrap_or(0);
        let mut cycle_types = Vec::new();
        let mut factorizations = Vec::new();
        for ev in &self.evidence {
            match ev {
                Evidence::Factorization { ell, factors } => {
                    if factor(&reduce_mod(&poly, *ell), engine.seed())? != *factors {
                        return Ok(false);
                    }
                    factorizations.push(factors.clone());
                }
                Evidence::CycleType(ct) => {
                    if cycle_type(&poly, ct.ell, engine.seed()).as_ref() != Ok(ct) {
                        return Ok(false);
                    }
                    cycle_types.push(ct.clone());
                }
                Evidence::RootPrefix {
                    ell,
                    row_prime,
                    kclass,
                    terms,
                    ..
                } => {
                    let (again, _) = row_prefix(engine, *row_prime, *ell, *kclass, terms.len())?;
                    if again != *terms {
                        return Ok(false);
                    }
                }
                Evidence::Shape(shape) => {
                    if shape_filter(shape.degree, &factorizations) != *shape {
                        return Ok(false);
                    }
                }
                Evidence::Certificate(inner) => {
                    if !inner.verify(engine)? {
                        return Ok(false);
                    }
                }
            }
        }
        for dis in &self.discharged {
            if !dis.assumption.discharged_by(&dis.witness) || !dis.witness.verify(engine)? {
                return Ok(false);
            }
        }
        let nested_irreducible = || {
            self.evidence.iter().any(|e| {
                matches!(e, Evidence::Certificate(c)
                    if c.subject == self.subject && c.claim == Claim::Irreducible)
            })
        };
        Ok(match self.rule {
            Rule::Trivial => d == 1,
            Rule::IrreducibleModEll => factorizations
                .iter()
                .any(|f| f.factors.len() == 1 && f.factors[0].1 == 1),
            Rule::DegreeSetSieve => {
                let mut sieve = Sieve::new(&poly);
                for f in &factorizations {
                    sieve.refine(f);
                }
                sieve.is_empty()
            }
            Rule::SmallDegree => {
                nested_irreducible()
                    && (d == 2 || (d == 3 && cycle_types.iter().any(|c| c.yields_transposition())))
            }
            Rule::Jordan => {
                nested_irreducible()
                    && cycle_types.iter().any(|c| c.yields_transposition())
                    && cycle_types.iter().any(|c| c.long_prime_cycle().is_some())
            }
            Rule::DistinctRootTransfer => self.evidence.iter().any(|e| {
                matches!(e, Evidence::Shape(s) if s.full_galois_under_assumption())
            }),
            Rule::OddDimensionTransfer | Rule::TwoModFourTransfer | Rule::Mod13Period => {
                self.evidence.iter().any(|e| {
                    matches!(e, Evidence::Shape(s) if s.irreducible_under_assumption())
                })
            }
        })
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} is {} [{:?}", self.subject, self.claim, self.rule)?;
        if self.provisional {
            write!(f, ", provisional")?;
        }
        write!(f, "]")?;
        for a in &self.assumptions {
            write!(f, "\n  assuming {a}")?;
        }
        for dis in &self.discharged {
            write!(f, "\n  {}: witnessed by {}", dis.assumption, dis.witness.subject)?;
        }
        for ev in &self.evidence {
            match ev {
                Evidence::Factorization { ell, factors } => {
                    write!(f, "\n  mod {ell}: {factors}")?
                }
                Evidence::CycleType(ct) => write!(f, "\n  cycle type {ct}")?,
                Evidence::RootPrefix {
                    ell,
                    row_prime,
                    kclass,
                    terms,
                    extended,
                } => {
                    let t: Vec<String> = terms.iter().map(u64::to_string).collect();
                    write!(
                        f,
                        "\n  mod {ell} roots ({}) from row p = {row_prime}, k = {kclass} mod {}",
                        t.join(","),
                        ell - 1
                    )?;
                    if *extended {
                        write!(f, " (extended by periodicity)")?;
                    }
                }
                Evidence::Shape(s) => write!(f, "\n  shape: {s}")?,
                Evidence::Certificate(c) => {
                    for line in c.to_string().lines() {
                        write!(f, "\n  | {line}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Reductions of one polynomial over a range of primes.
struct Scan {
    reductions: Vec<(u64, FactorMultiset)>,
}

impl Scan {
    fn new(f: &IntPoly, bound: u64, exclude: Option<u64>, seed: u64) -> Self {
        let primes: Vec<u64> = primes_up_to(bound)
            .into_iter()
            .filter(|&l| Some(l) != exclude)
            .collect();
        let run = |&ell: &u64| {
            let fac = factor(&reduce_mod(f, ell), seed).expect("monic polynomial is nonzero mod ell");
            (ell, fac)
        };
        #[cfg(feature = "parallel")]
        let reductions = {
            use rayon::prelude::*;
            primes.par_iter().map(run).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let reductions = primes.iter().map(run).collect();
        Self { reductions }
    }

    fn squarefree(&self) -> impl Iterator<Item = &(u64, FactorMultiset)> {
        self.reductions.iter().filter(|(_, f)| f.is_squarefree())
    }

    fn cycle_types(&self) -> impl Iterator<Item = CycleType> + '_ {
        self.squarefree().map(|(ell, f)| CycleType {
            ell: *ell,
            parts: f.degree_partition(),
        })
    }
}

/// Candidate `(degree, constant term)` pairs of a monic rational factor.
/// Constant terms are tracked only when `f(0)` is small and nonzero.
struct Sieve {
    degree: usize,
    alive: BTreeSet<(usize, Option<i64>)>,
}

impl Sieve {
    fn new(f: &IntPoly) -> Self {
        let degree = f.degree().unwrap_or(0);
        let c0 = &f.coeffs()[0];
        let constants: Option<Vec<i64>> = c0
            .abs()
            .to_u64()
            .filter(|&c| c != 0 && c <= CONSTANT_TERM_LIMIT)
            .map(|c| {
                divisors(c)
                    .into_iter()
                    .flat_map(|e| [e as i64, -(e as i64)])
                    .collect()
            });
        let mut alive = BTreeSet::new();
        for e in 1..degree {
            match &constants {
                Some(cs) => alive.extend(cs.iter().map(|&c| (e, Some(c)))),
                None => {
                    alive.insert((e, None));
                }
            }
        }
        Self { degree, alive }
    }

    fn is_empty(&self) -> bool {
        self.alive.is_empty()
    }

    /// Drops candidates not realizable as a product of the factors mod `l`.
    /// Returns whether any candidate was dropped.
    fn refine(&mut self, fac: &FactorMultiset) -> bool {
        if !fac.is_squarefree() {
            return false;
        }
        let ell = fac.modulus;
        // reachable[e] = constant terms (mod l) of the degree-e subproducts
        let mut reachable = vec![BTreeSet::new(); self.degree + 1];
        reachable[0].insert(1u64);
        for (g, _) in &fac.factors {
            let dg = g.degree().unwrap_or(0);
            let cg = g.coeffs()[0];
            for e in (0..=self.degree - dg).rev() {
                let next: Vec<u64> = reachable[e]
                    .iter()
                    .map(|&c| ((c as u128 * cg as u128) % ell as u128) as u64)
                    .collect();
                reachable[e + dg].extend(next);
            }
        }
        let before = self.alive.len();
        self.alive.retain(|&(e, c)| match c {
            Some(c) => reachable[e].contains(&signed_mod(c, ell)),
            None => !reachable[e].is_empty(),
        });
        self.alive.len() < before
    }
}

/// Irreducibility from the reductions in `scan`, with the evidence used.
fn irreducibility(f: &IntPoly, scan: &Scan) -> Option<(Rule, Vec<Evidence>)> {
    let d = f.degree()?;
    if d == 0 {
        return None;
    }
    if d == 1 {
        return Some((Rule::Trivial, Vec::new()));
    }
    if let Some((ell, fac)) = scan
        .reductions
        .iter()
        .find(|(_, fac)| fac.factors.len() == 1 && fac.factors[0].1 == 1)
    {
        let ev = Evidence::Factorization {
            ell: *ell,
            factors: fac.clone(),
        };
        return Some((Rule::IrreducibleModEll, vec![ev]));
    }
    let mut sieve = Sieve::new(f);
    let mut evidence = Vec::new();
    for (ell, fac) in scan.squarefree() {
        if sieve.refine(fac) {
            evidence.push(Evidence::Factorization {
                ell: *ell,
                factors: fac.clone(),
            });
        }
        if sieve.is_empty() {
            return Some((Rule::DegreeSetSieve, evidence));
        }
    }
    None
}

fn full_symmetric(
    f: &IntPoly,
    subject: &Subject,
    scan: &Scan,
) -> Option<Certificate> {
    let d = f.degree()?;
    let (rule, evidence) = irreducibility(f, scan)?;
    let irreducible = Certificate::new(Claim::Irreducible, subject.clone(), rule, evidence);
    if d == 1 {
        return Some(Certificate::new(
            Claim::FullSymmetricGroup,
            subject.clone(),
            Rule::Trivial,
            Vec::new(),
        ));
    }
    let mut evidence = vec![Evidence::Certificate(Box::new(irreducible))];
    if d == 2 {
        return Some(Certificate::new(
            Claim::FullSymmetricGroup,
            subject.clone(),
            Rule::SmallDegree,
            evidence,
        ));
    }
    let transposition = scan.cycle_types().find(CycleType::yields_transposition)?;
    evidence.push(Evidence::CycleType(transposition));
    if d == 3 {
        return Some(Certificate::new(
            Claim::FullSymmetricGroup,
            subject.clone(),
            Rule::SmallDegree,
            evidence,
        ));
    }
    let long = scan.cycle_types().find(|c| c.long_prime_cycle().is_some())?;
    evidence.push(Evidence::CycleType(long));
    Some(Certificate::new(
        Claim::FullSymmetricGroup,
        subject.clone(),
        Rule::Jordan,
        evidence,
    ))
}

fn monic_nonconstant(f: &IntPoly) -> Result<()> {
    match f.degree() {
        None => Err(Error::ZeroPolynomial),
        Some(0) => Err(Error::EmptySpace(0)),
        Some(_) if !f.is_monic() => Err(Error::NotMonic),
        Some(_) => Ok(()),
    }
}

/// Irreducibility certificate for a monic integer polynomial, scanning
/// primes up to `bound`. `None` means nothing was found, not reducibility.
pub fn certify_irreducible_poly(f: &IntPoly, bound: u64, seed: u64) -> Result<Option<Certificate>> {
    monic_nonconstant(f)?;
    let scan = Scan::new(f, bound, None, seed);
    let subject = Subject::Polynomial { coeffs: f.clone() };
    Ok(irreducibility(f, &scan)
        .map(|(rule, evidence)| Certificate::new(Claim::Irreducible, subject, rule, evidence)))
}

pub fn certify_full_symmetric_poly(
    f: &IntPoly,
    bound: u64,
    seed: u64,
) -> Result<Option<Certificate>> {
    monic_nonconstant(f)?;
    let scan = Scan::new(f, bound, None, seed);
    Ok(full_symmetric(f, &Subject::Polynomial { coeffs: f.clone() }, &scan))
}

fn hecke_poly(engine: &Engine, p: u64, k: u32) -> Result<IntPoly> {
    if dim_cusp(k as i64) == 0 && k % 2 == 0 {
        return Err(Error::EmptySpace(k));
    }
    Ok((*engine.charpoly(p, k)?).clone())
}

/// Irreducibility of `T_{p,k}` from reductions mod primes `l <= bound`, `l != p`.
pub fn certify_irreducible(engine: &Engine, p: u64, k: u32, bound: u64) -> Result<Option<Certificate>> {
    let f = hecke_poly(engine, p, k)?;
    let scan = Scan::new(&f, bound, Some(p), engine.seed());
    Ok(irreducibility(&f, &scan).map(|(rule, evidence)| {
        Certificate::new(Claim::Irreducible, Subject::Hecke { p, k }, rule, evidence)
    }))
}

pub fn certify_full_symmetric(
    engine: &Engine,
    p: u64,
    k: u32,
    bound: u64,
) -> Result<Option<Certificate>> {
    let f = hecke_poly(engine, p, k)?;
    let scan = Scan::new(&f, bound, Some(p), engine.seed());
    Ok(full_symmetric(&f, &Subject::Hecke { p, k }, &scan))
}

/// What the mod-`l` shapes say about `T_{m,k} = f^r` (under irreducibility
/// of some `T_{n,k}`) and about `T_{m,k} = (x - a)^d` (under full Galois
/// group of some `T_{n,k}`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeVerdict {
    pub degree: usize,
    /// Exponents `r | d` not excluded by the multiplicities; always has 1.
    pub surviving_powers: Vec<usize>,
    pub linear_power_excluded: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeConclusion {
    IrreducibleAndFullGalois,
    Irreducible,
    Inconclusive,
}

impl ShapeVerdict {
    pub fn irreducible_under_assumption(&self) -> bool {
        self.surviving_powers == [1]
    }

    pub fn full_galois_under_assumption(&self) -> bool {
        self.degree <= 1 || self.linear_power_excluded
    }

    pub fn conclusion(&self) -> ShapeConclusion {
        if self.full_galois_under_assumption() {
            ShapeConclusion::IrreducibleAndFullGalois
        } else if self.irreducible_under_assumption() {
            ShapeConclusion::Irreducible
        } else {
            ShapeConclusion::Inconclusive
        }
    }
}

impl fmt::Display for ShapeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: Vec<String> = self.surviving_powers.iter().map(usize::to_string).collect();
        write!(
            f,
            "d = {}, surviving r in {{{}}}, linear power {}",
            self.degree,
            r.join(","),
            if self.linear_power_excluded {
                "excluded"
            } else {
                "possible"
            }
        )
    }
}

/// Applies the two branches of the shape dichotomy to factorizations of a
/// degree-`d` polynomial modulo several primes.
pub fn shape_filter(degree: usize, evidence: &[FactorMultiset]) -> ShapeVerdict {
    let surviving_powers = (1..=degree.max(1))
        .filter(|r| degree % r == 0)
        .filter(|&r| {
            r == 1
                || evidence
                    .iter()
                    .all(|fac| fac.factors.iter().all(|(_, m)| m % r == 0))
        })
        .collect();
    let linear_power_excluded = degree <= 1
        || evidence.iter().any(|fac| {
            fac.factors.len() > 1 || fac.factors.iter().any(|(g, _)| g.degree() != Some(1))
        });
    ShapeVerdict {
        degree,
        surviving_powers,
        linear_power_excluded,
    }
}

/// The modulus used for `p` by the transfer rule, if any: 5 when
/// `p != +-1 mod 5`, else 7 when `p != +-1 mod 7`. The prime `p` itself is
/// never used as the modulus.
pub fn transfer_modulus(p: u64) -> Option<u64> {
    [5u64, 7]
        .into_iter()
        .find(|&ell| p != ell && p % ell != 1 && p % ell != ell - 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferVerdict {
    Applicable(Box<Certificate>),
    NotApplicable { p: u64, mod5: u64, mod7: u64 },
}

/// First `len` roots from the table row for `row_prime`, extended by the
/// period when the computed window is shorter.
fn row_prefix(engine: &Engine, row_prime: u64, ell: u64, kclass: u32, len: usize) -> Result<(Vec<u64>, bool)> {
    let seq = engine.root_sequence(row_prime, ell, kclass, default_max_weight(ell, kclass))?;
    let period = seq.period.expect("root_sequence sets the period");
    let terms = (0..len)
        .map(|i| {
            if i < seq.terms.len() {
                seq.terms[i]
            } else {
                seq.terms[i % period]
            }
        })
        .collect();
    Ok((terms, len > seq.terms.len()))
}

fn table_row_prime(p: u64, ell: u64) -> u64 {
    let r = (p % ell) as usize;
    match ell {
        5 => ROWS_MOD_5[r - 1],
        _ => ROWS_MOD_7[r - 1],
    }
}

fn multiset_from_roots(ell: u64, roots: &[u64]) -> FactorMultiset {
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for &r in roots {
        *counts.entry(r).or_default() += 1;
    }
    let mut factors: Vec<(FpPoly, usize)> = counts
        .into_iter()
        .map(|(r, m)| (FpPoly::linear(ell, r), m))
        .collect();
    factors.sort();
    FactorMultiset {
        modulus: ell,
        unit: 1,
        factors,
    }
}

fn check_against_table(p: u64, k: u32, ell: u64, fac: &FactorMultiset, prefix: &[u64]) -> Result<()> {
    let mut sorted = prefix.to_vec();
    sorted.sort_unstable();
    if fac.roots() != sorted || !fac.splits_completely() {
        return Err(Error::EvidenceMismatch {
            p,
            k,
            ell,
            detail: format!("direct factorization {fac}, table roots {prefix:?}"),
        });
    }
    Ok(())
}

/// If `p != +-1 mod 5` or `p != +-1 mod 7`, then `T_{p,k}` is irreducible
/// with full Galois group whenever some `T_{n,k}` is.
pub fn transfer_conclusion(engine: &Engine, p: u64, k: u32) -> Result<TransferVerdict> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let d = dim_cusp(k as i64);
    if k % 2 == 1 {
        return Err(Error::OddWeight(k));
    }
    if d == 0 {
        return Err(Error::EmptySpace(k));
    }
    let Some(ell) = transfer_modulus(p) else {
        return Ok(TransferVerdict::NotApplicable {
            p,
            mod5: p % 5,
            mod7: p % 7,
        });
    };
    let kclass = k % (ell as u32 - 1);
    let row_prime = table_row_prime(p, ell);
    let (terms, extended) = row_prefix(engine, row_prime, ell, kclass, d)?;
    let fac = engine.factor_mod(p, k, ell)?;
    check_against_table(p, k, ell, &fac, &terms)?;
    let shape = shape_filter(d, std::slice::from_ref(&fac));
    if !shape.full_galois_under_assumption() {
        return Err(Error::EvidenceMismatch {
            p,
            k,
            ell,
            detail: format!("a single root mod {ell} leaves the linear-power branch open"),
        });
    }
    let mut cert = Certificate::new(
        Claim::FullSymmetricGroup,
        Subject::Hecke { p, k },
        Rule::DistinctRootTransfer,
        vec![
            Evidence::RootPrefix {
                ell,
                row_prime,
                kclass,
                terms,
                extended,
            },
            Evidence::Factorization { ell, factors: fac },
            Evidence::Shape(shape),
        ],
    );
    cert.assumptions.push(Assumption::FullGaloisForSomeN { k });
    Ok(TransferVerdict::Applicable(Box::new(cert)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionCase {
    /// `d_k` odd and `p` admissible for the transfer rule.
    OddDimension,
    /// `d_k = 2 mod 4` and `p = 3, 5 mod 7`.
    TwoModFour,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionVerdict {
    Applicable {
        case: DimensionCase,
        certificate: Box<Certificate>,
    },
    NotApplicable,
}

/// If some `T_{n,k}` is irreducible, so is `T_{p,k}` in the two cases of
/// [`DimensionCase`]. The evidence is the factorization mod 5 and mod 7.
pub fn dimension_conclusion(engine: &Engine, p: u64, k: u32) -> Result<DimensionVerdict> {
    let d = dim_cusp(k as i64);
    if k % 2 == 1 {
        return Err(Error::OddWeight(k));
    }
    let case = if d % 2 == 1 && transfer_modulus(p).is_some() {
        DimensionCase::OddDimension
    } else if d % 4 == 2 && matches!(p % 7, 3 | 5) {
        DimensionCase::TwoModFour
    } else {
        return Ok(DimensionVerdict::NotApplicable);
    };
    let mut evidence = Vec::new();
    let mut factorizations = Vec::new();
    for ell in [5u64, 7].into_iter().filter(|&l| l != p) {
        let fac = engine.factor_mod(p, k, ell)?;
        factorizations.push(fac.clone());
        evidence.push(Evidence::Factorization { ell, factors: fac });
    }
    let shape = shape_filter(d, &factorizations);
    if !shape.irreducible_under_assumption() {
        return Err(Error::EvidenceMismatch {
            p,
            k,
            ell: 7,
            detail: format!("multiplicities leave proper powers open: {shape}"),
        });
    }
    evidence.push(Evidence::Shape(shape));
    let rule = match case {
        DimensionCase::OddDimension => Rule::OddDimensionTransfer,
        DimensionCase::TwoModFour => Rule::TwoModFourTransfer,
    };
    let mut cert = Certificate::new(Claim::Irreducible, Subject::Hecke { p, k }, rule, evidence);
    cert.assumptions.push(Assumption::IrreducibleForSomeN { k });
    Ok(DimensionVerdict::Applicable {
        case,
        certificate: Box::new(cert),
    })
}

/// If some `T_{n,k}` is irreducible: `T_{2,k}` is irreducible when `14 ∤ d_k`
/// (root multiplicities of the period-14 sequence mod 13), and otherwise
/// `T_{3,k}` is when `28 ∤ d_k`. Flagged provisional: the mod-13 sequence is
/// extended by its period past the computed weights.
pub fn mod13_period_conclusion(engine: &Engine, k: u32) -> Result<Option<Certificate>> {
    let d = dim_cusp(k as i64);
    if k % 2 == 1 {
        return Err(Error::OddWeight(k));
    }
    if d == 0 {
        return Err(Error::EmptySpace(k));
    }
    let mut cert = if d % 14 != 0 {
        let kclass = k % 12;
        let (terms, extended) = row_prefix(engine, 2, 13, kclass, d)?;
        let fac = multiset_from_roots(13, &terms);
        let shape = shape_filter(d, std::slice::from_ref(&fac));
        if !shape.irreducible_under_assumption() {
            return Err(Error::EvidenceMismatch {
                p: 2,
                k,
                ell: 13,
                detail: format!("multiplicities leave proper powers open: {shape}"),
            });
        }
        let mut evidence = vec![Evidence::RootPrefix {
            ell: 13,
            row_prime: 2,
            kclass,
            terms,
            extended,
        }];
        if !extended {
            let direct = engine.factor_mod(2, k, 13)?;
            if direct != fac {
                return Err(Error::EvidenceMismatch {
                    p: 2,
                    k,
                    ell: 13,
                    detail: format!("direct factorization {direct}, table gives {fac}"),
                });
            }
            evidence.push(Evidence::Factorization {
                ell: 13,
                factors: direct,
            });
        }
        evidence.push(Evidence::Shape(shape));
        Certificate::new(
            Claim::Irreducible,
            Subject::Hecke { p: 2, k },
            Rule::Mod13Period,
            evidence,
        )
    } else if d % 28 != 0 {
        match dimension_conclusion(engine, 3, k)? {
            DimensionVerdict::Applicable { certificate, .. } => {
                let mut c = *certificate;
                c.assumptions.clear();
                Certificate {
                    rule: Rule::Mod13Period,
                    ..c
                }
            }
            DimensionVerdict::NotApplicable => return Ok(None),
        }
    } else {
        return Ok(None);
    };
    cert.assumptions = vec![Assumption::IrreducibleForSomeN { k }];
    cert.provisional = true;
    Ok(Some(cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x4_plus_1() -> IntPoly {
        IntPoly::from_i64s(&[1, 0, 0, 0, 1])
    }

    #[test]
    fn cycle_type_examples() {
        let t224 = IntPoly::from_i64s(&[-20468736, -1080, 1]);
        assert_eq!(cycle_type(&t224, 7, 0).unwrap().parts, vec![1, 1]);
        let lin = IntPoly::from_i64s(&[24, 1]);
        assert_eq!(cycle_type(&lin, 5, 0).unwrap().parts, vec![1]);
        let sq = IntPoly::from_i64s(&[0, 0, 1]);
        assert!(cycle_type(&sq, 3, 0).is_err());
    }

    #[test]
    fn transposition_and_long_cycle_detection() {
        let ct = |parts: Vec<usize>| CycleType { ell: 0, parts };
        assert!(ct(vec![2, 1, 1]).yields_transposition());
        assert!(ct(vec![3, 2]).yields_transposition());
        assert!(!ct(vec![2, 2]).yields_transposition());
        assert!(!ct(vec![4, 2]).yields_transposition());
        assert_eq!(ct(vec![3, 1]).long_prime_cycle(), Some(3));
        assert_eq!(ct(vec![2, 2]).long_prime_cycle(), None);
        assert_eq!(ct(vec![5, 1, 1, 1]).long_prime_cycle(), Some(5));
        assert_eq!(ct(vec![4, 3, 1]).long_prime_cycle(), None);
    }

    #[test]
    fn x4_plus_1_only_by_sieve() {
        let f = x4_plus_1();
        let c = certify_irreducible_poly(&f, 500, 0).unwrap().unwrap();
        assert_eq!(c.rule, Rule::DegreeSetSieve);
        assert!(c.verify(&Engine::default()).unwrap());
        assert!(certify_full_symmetric_poly(&f, 500, 0).unwrap().is_none());
    }

    #[test]
    fn reducible_polynomials_are_never_certified() {
        // (x^2 + 1)(x^2 + 2), (x^2 - 2)(x^2 - 3), x^2 (x + 1)
        for c in [&[2, 0, 3, 0, 1][..], &[6, 0, -5, 0, 1], &[0, 0, 1, 1]] {
            let f = IntPoly::from_i64s(c);
            assert!(certify_irreducible_poly(&f, 300, 0).unwrap().is_none(), "{f}");
        }
    }

    #[test]
    fn hecke_examples() {
        let e = Engine::default();
        let c = certify_irreducible(&e, 2, 12, 50).unwrap().unwrap();
        assert_eq!(c.rule, Rule::Trivial);
        let c = certify_irreducible(&e, 2, 24, 100).unwrap().unwrap();
        assert!(c.verify(&e).unwrap());
        let c = certify_full_symmetric(&e, 2, 24, 100).unwrap().unwrap();
        assert_eq!(c.rule, Rule::SmallDegree);
        let c = certify_full_symmetric(&e, 2, 48, 200).unwrap().unwrap();
        assert_eq!(c.rule, Rule::Jordan);
        assert!(c.verify(&e).unwrap());
        assert!(matches!(certify_irreducible(&e, 2, 10, 50), Err(Error::EmptySpace(10))));
    }

    fn fm(ell: u64, roots: &[u64]) -> FactorMultiset {
        multiset_from_roots(ell, roots)
    }

    #[test]
    fn shape_filter_examples() {
        let v = shape_filter(2, &[fm(5, &[1, 4])]);
        assert_eq!(v.conclusion(), ShapeConclusion::IrreducibleAndFullGalois);
        assert_eq!(v.surviving_powers, vec![1]);
        let v = shape_filter(2, &[fm(5, &[2, 2])]);
        assert_eq!(v.conclusion(), ShapeConclusion::Inconclusive);
        assert_eq!(v.surviving_powers, vec![1, 2]);
        let v = shape_filter(1, &[fm(5, &[2])]);
        assert_eq!(v.conclusion(), ShapeConclusion::IrreducibleAndFullGalois);
        // (x)^2 (x-1)^2: two roots, but r = 2 survives
        let v = shape_filter(4, &[fm(7, &[0, 0, 1, 1])]);
        assert_eq!(v.surviving_powers, vec![1, 2]);
        assert!(v.linear_power_excluded);
    }

    #[test]
    fn transfer_density() {
        let units: Vec<u64> = (1..35).filter(|a| a % 5 != 0 && a % 7 != 0).collect();
        assert_eq!(units.len(), 24);
        let applicable = units.iter().filter(|&&a| transfer_modulus(a).is_some()).count();
        assert_eq!(applicable, 20);
        assert_eq!(transfer_modulus(29), None);
        assert_eq!(transfer_modulus(2), Some(5));
        assert_eq!(transfer_modulus(5), Some(7));
        assert_eq!(transfer_modulus(7), Some(5));
        assert_eq!(transfer_modulus(11), Some(7));
    }

    #[test]
    fn transfer_and_discharge() {
        let e = Engine::default();
        let TransferVerdict::Applicable(mut c) = transfer_conclusion(&e, 3, 24).unwrap() else {
            panic!("p = 3 qualifies");
        };
        assert!(!c.is_unconditional());
        assert!(matches!(&c.evidence[0], Evidence::RootPrefix { ell: 5, terms, .. } if terms == &[2, 3]));
        let witness = certify_full_symmetric(&e, 2, 24, 100).unwrap().unwrap();
        assert!(c.discharge(&witness));
        assert!(c.is_unconditional());
        assert!(c.verify(&e).unwrap());
        // a witness at another weight does not apply
        let mut c2 = match transfer_conclusion(&e, 3, 24).unwrap() {
            TransferVerdict::Applicable(c) => c,
            _ => unreachable!(),
        };
        let other = certify_full_symmetric(&e, 2, 36, 100).unwrap().unwrap();
        assert!(!c2.discharge(&other));
        assert!(matches!(
            transfer_conclusion(&e, 29, 24).unwrap(),
            TransferVerdict::NotApplicable { p: 29, mod5: 4, mod7: 1 }
        ));
    }

    #[test]
    fn dimension_examples() {
        let e = Engine::default();
        for (p, k) in [(2, 36), (3, 50)] {
            match dimension_conclusion(&e, p, k).unwrap() {
                DimensionVerdict::Applicable { case, certificate } => {
                    assert_eq!(case, DimensionCase::OddDimension);
                    assert!(certificate.verify(&e).unwrap());
                }
                DimensionVerdict::NotApplicable => panic!("({p},{k})"),
            }
        }
        assert_eq!(dimension_conclusion(&e, 11, 24).unwrap(), DimensionVerdict::NotApplicable);
        assert!(matches!(
            dimension_conclusion(&e, 3, 24).unwrap(),
            DimensionVerdict::Applicable { case: DimensionCase::TwoModFour, .. }
        ));
    }

    #[test]
    fn mod13_period_rule_is_provisional() {
        let e = Engine::default();
        let c = mod13_period_conclusion(&e, 60).unwrap().unwrap();
        assert!(c.provisional);
        assert_eq!(c.rule, Rule::Mod13Period);
        assert!(c.verify(&e).unwrap());
        // provisional certificates never discharge anything
        let mut t = match transfer_conclusion(&e, 3, 60).unwrap() {
            TransferVerdict::Applicable(c) => c,
            _ => unreachable!(),
        };
        assert!(!t.discharge(&c));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn cycle_types_come_from_irreducible_factors(
            coeffs in prop::collection::vec(-20i64..20, 1..=6),
            ell in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]),
        ) {
            let mut c = coeffs;
            c.push(1);
            let f = IntPoly::from_i64s(&c);
            if let Ok(ct) = cycle_type(&f, ell, 0) {
                prop_assert_eq!(ct.degree(), f.degree().unwrap());
                let fac = factor(&reduce_mod(&f, ell), 0).unwrap();
                prop_assert!(fac.factors.iter().all(|(g, _)| g.is_irreducible()));
                prop_assert_eq!(fac.degree_partition(), ct.parts);
            }
        }

        #[test]
        fn certified_products_never_exist(
            a in prop::collection::vec(-9i64..9, 1..=3),
            b in prop::collection::vec(-9i64..9, 1..=3),
        ) {
            let mut a = a; a.push(1);
            let mut b = b; b.push(1);
            let prod: Vec<i64> = (0..a.len() + b.len() - 1)
                .map(|i| (0..=i).filter(|&j| j < a.len() && i - j < b.len()).map(|j| a[j] * b[i - j]).sum())
                .collect();
            let h = IntPoly::from_i64s(&prod);
            prop_assert!(certify_irreducible_poly(&h, 100, 0).unwrap().is_none());
        }
    }
}
