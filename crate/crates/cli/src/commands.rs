use std::io::Write;

use hecke_core::arith::{is_prime, primes_up_to};
use hecke_core::galois::{
    certify_full_symmetric, certify_full_symmetric_poly, certify_irreducible,
    certify_irreducible_poly, dimension_conclusion, transfer_conclusion, Certificate,
    DimensionVerdict, TransferVerdict,
};
use hecke_core::modfactor::{default_max_weight, Window};
use hecke_core::traceformula::{trace, trace_mod, trace_mod_periodicity, TracePeriod};
use hecke_core::{dim_cusp, Engine, FactorMultiset, IntPoly, PeriodTable, RootSequence};
use num_bigint::BigInt;
use rayon::prelude::*;

use crate::render::emit;
use crate::{CertifyArgs, CharpolyArgs, Cli, CliError, Command, DeduceArgs, PeriodArgs, TableArgs, TraceArgs};

pub(crate) struct CharpolyReport {
    pub p: u64,
    pub k: u32,
    pub dim: usize,
    pub poly: IntPoly,
    pub reduction: Option<FactorMultiset>,
}

pub(crate) struct TableReport {
    pub table: PeriodTable,
    pub single_period: bool,
}

pub(crate) struct TraceReport {
    pub n: u64,
    pub k: u32,
    pub trace: BigInt,
    pub residue: Option<(u64, u64)>,
}

pub(crate) struct PeriodReport {
    pub sequence: RootSequence,
    pub trace_period: Option<TracePeriod>,
}

pub(crate) struct CertifyReport {
    pub subject: String,
    pub bound: u64,
    pub certificate: Option<Certificate>,
}

pub(crate) struct DeduceReport {
    pub p: u64,
    pub k: u32,
    pub transfer: TransferVerdict,
    pub dimension_rule: DimensionVerdict,
}

pub(crate) enum Report {
    Charpoly(CharpolyReport),
    Table(TableReport),
    Trace(TraceReport),
    Period(PeriodReport),
    Certify(CertifyReport),
    Deduce {
        witness: Option<Certificate>,
        verdicts: Vec<DeduceReport>,
    },
}

/// Runs the parsed command and writes its output in the chosen format.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let engine = cli.engine()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs as usize)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let report = pool.install(|| compute(&cli.command, &engine))?;
    emit(&report, cli.format, out)
}

fn compute(command: &Command, engine: &Engine) -> Result<Report, CliError> {
    match command {
        Command::Charpoly(a) => charpoly(a, engine),
        Command::Table(a) => table(a, engine),
        Command::Trace(a) => trace_cmd(a),
        Command::Period(a) => period(a, engine),
        Command::Certify(a) => certify(a, engine),
        Command::Deduce(a) => deduce(a, engine),
    }
}

fn charpoly(a: &CharpolyArgs, engine: &Engine) -> Result<Report, CliError> {
    let poly = (*engine.charpoly(a.prime, a.weight)?).clone();
    let reduction = a
        .ell
        .map(|ell| engine.factor_mod(a.prime, a.weight, ell))
        .transpose()?;
    Ok(Report::Charpoly(CharpolyReport {
        p: a.prime,
        k: a.weight,
        dim: dim_cusp(a.weight as i64),
        poly,
        reduction,
    }))
}

fn table(a: &TableArgs, engine: &Engine) -> Result<Report, CliError> {
    let window = match (a.max_weight, a.single_period) {
        (_, true) => Window::SinglePeriod,
        (Some(k), false) => Window::MaxWeight(k),
        (None, false) => Window::Default,
    };
    Ok(Report::Table(TableReport {
        table: engine.period_table(a.ell, window)?,
        single_period: a.single_period,
    }))
}

fn trace_cmd(a: &TraceArgs) -> Result<Report, CliError> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let residue = a
        .ell
        .map(|ell| trace_mod(a.n, a.weight, ell).map(|r| (ell, r)))
        .transpose()?;
    Ok(Report::Trace(TraceReport {
        n: a.n,
        k: a.weight,
        trace: trace(a.n, a.weight)?,
        residue,
    }))
}

fn period(a: &PeriodArgs, engine: &Engine) -> Result<Report, CliError> {
    let max_weight = a
        .max_weight
        .unwrap_or_else(|| default_max_weight(a.ell, a.kclass));
    let sequence = engine.root_sequence(a.prime, a.ell, a.kclass, max_weight)?;
    let trace_period = a
        .trace
        .then(|| trace_mod_periodicity(a.prime, a.ell, a.kclass))
        .transpose()?;
    Ok(Report::Period(PeriodReport {
        sequence,
        trace_period,
    }))
}

fn parse_poly(text: &str) -> Result<IntPoly, CliError> {
    let coeffs = text
        .split(',')
        .map(|c| c.trim().parse::<BigInt>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("bad --poly coefficient: {e}")))?;
    Ok(IntPoly::new(coeffs))
}

fn certify(a: &CertifyArgs, engine: &Engine) -> Result<Report, CliError> {
    let (subject, certificate) = match (&a.poly, a.prime, a.weight) {
        (Some(text), _, _) => {
            let f = parse_poly(text)?;
            let c = if a.irreducible_only {
                certify_irreducible_poly(&f, a.bound, engine.seed())?
            } else {
                certify_full_symmetric_poly(&f, a.bound, engine.seed())?
            };
            (f.to_string(), c)
        }
        (None, Some(p), Some(k)) => {
            let c = if a.irreducible_only {
                certify_irreducible(engine, p, k, a.bound)?
            } else {
                certify_full_symmetric(engine, p, k, a.bound)?
            };
            (format!("T_{{{p},{k}}}(x)"), c)
        }
        _ => return Err(CliError::Usage("give --prime and --weight, or --poly".into())),
    };
    Ok(Report::Certify(CertifyReport {
        subject,
        bound: a.bound,
        certificate,
    }))
}

fn deduce(a: &DeduceArgs, engine: &Engine) -> Result<Report, CliError> {
    let targets: Vec<u64> = match (a.target_prime, a.below) {
        (Some(p), _) => {
            if !is_prime(p) {
                return Err(hecke_core::Error::NotPrime(p).into());
            }
            vec![p]
        }
        (None, Some(b)) => primes_up_to(b.saturating_sub(1)),
        (None, None) => return Err(CliError::Usage("give --target-prime or --below".into())),
    };
    let witness = if a.no_discharge {
        None
    } else {
        match certify_full_symmetric(engine, a.witness, a.weight, a.bound)? {
            Some(c) => Some(c),
            None => certify_irreducible(engine, a.witness, a.weight, a.bound)?,
        }
    };
    let verdicts = targets
        .par_iter()
        .map(|&p| {
            let mut transfer = transfer_conclusion(engine, p, a.weight)?;
            let mut dimension_rule = dimension_conclusion(engine, p, a.weight)?;
            if let Some(w) = &witness {
                if let TransferVerdict::Applicable(c) = &mut transfer {
                    c.discharge(w);
                }
                if let DimensionVerdict::Applicable { certificate, .. } = &mut dimension_rule {
                    certificate.discharge(w);
                }
            }
            Ok(DeduceReport {
                p,
                k: a.weight,
                transfer,
                dimension_rule,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Report::Deduce { witness, verdicts })
}
