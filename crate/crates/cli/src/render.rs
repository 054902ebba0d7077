use std::io::Write;

use hecke_core::galois::{Certificate, DimensionVerdict, Evidence, TransferVerdict};
use hecke_core::modfactor::RowLabel;
use hecke_core::{FactorMultiset, RootSequence};
use serde_json::{json, Value};

use crate::commands::{
    CertifyReport, CharpolyReport, DeduceReport, PeriodReport, Report, TableReport, TraceReport,
};
use crate::{CliError, Format};

pub(crate) fn emit(report: &Report, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Text => out.write_all(text(report).as_bytes())?,
        Format::Json => {
            // serde_json's map is ordered by key, so every object comes out sorted
            let mut s = serde_json::to_string_pretty(&json_value(report)?)?;
            s.push('\n');
            out.write_all(s.as_bytes())?;
        }
        Format::Csv => {
            let (header, rows) = csv_rows(report);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header)?;
            for r in rows {
                w.write_record(&r)?;
            }
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            out.write_all(&bytes)?;
        }
    }
    Ok(())
}

fn seq_string(terms: &[u64]) -> String {
    let parts: Vec<String> = terms.iter().map(u64::to_string).collect();
    format!("({})", parts.join(", "))
}

fn factors_json(f: &FactorMultiset) -> Value {
    json!({
        "ell": f.modulus,
        "factorization": f.to_string(),
        "factors": f.factors.iter().map(|(g, m)| json!({
            "coeffs": g.coeffs(),
            "multiplicity": m,
        })).collect::<Vec<_>>(),
        "roots": f.roots(),
        "unit": f.unit,
    })
}

fn sequence_json(s: &RootSequence) -> Value {
    json!({
        "ell": s.ell,
        "kclass": s.kclass,
        "one_period": s.one_period(),
        "p": s.p,
        "period": s.period,
        "terms": s.terms,
        "verified_to_weight": s.verified_to_weight,
    })
}

fn table_cells(t: &TableReport) -> impl Iterator<Item = &RootSequence> {
    t.table.rows.iter().flat_map(|r| &r.cells)
}

fn json_value(report: &Report) -> Result<Value, CliError> {
    Ok(match report {
        Report::Charpoly(r) => json!({
            "coeffs": r.poly.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "dim": r.dim,
            "k": r.k,
            "p": r.p,
            "polynomial": r.poly.to_string(),
            "reduction": r.reduction.as_ref().map(factors_json),
        }),
        Report::Table(t) => json!({
            "cells": table_cells(t).map(sequence_json).collect::<Vec<_>>(),
            "ell": t.table.ell,
            "single_period": t.single_period,
        }),
        Report::Trace(r) => json!({
            "k": r.k,
            "n": r.n,
            "residue": r.residue.map(|(ell, v)| json!({"ell": ell, "value": v})),
            "trace": r.trace.to_string(),
        }),
        Report::Period(r) => {
            let mut v = sequence_json(&r.sequence);
            v["trace_period"] = match &r.trace_period {
                Some(tp) => json!({
                    "period_in_weight": tp.period,
                    "verified_to_weight": tp.verified_to_weight,
                }),
                None => Value::Null,
            };
            v
        }
        Report::Certify(r) => json!({
            "bound": r.bound,
            "certificate": r.certificate.as_ref().map(serde_json::to_value).transpose()?,
            "subject": r.subject,
        }),
        Report::Deduce { witness, verdicts } => json!({
            "verdicts": verdicts.iter().map(|d| -> Result<Value, CliError> {
                Ok(json!({
                    "dimension_rule": serde_json::to_value(&d.dimension_rule)?,
                    "k": d.k,
                    "p": d.p,
                    "transfer": serde_json::to_value(&d.transfer)?,
                    "unconditional": unconditional(d),
                }))
            }).collect::<Result<Vec<_>, _>>()?,
            "witness": witness.as_ref().map(serde_json::to_value).transpose()?,
        }),
    })
}

fn unconditional(d: &DeduceReport) -> bool {
    matches!(&d.transfer, TransferVerdict::Applicable(c) if c.is_unconditional())
}

/// `(ell, roots)` of the table-row evidence in a transfer certificate.
fn row_evidence(c: &Certificate) -> Option<(u64, &[u64])> {
    c.evidence.iter().find_map(|e| match e {
        Evidence::RootPrefix { ell, terms, .. } => Some((*ell, terms.as_slice())),
        _ => None,
    })
}

fn text(report: &Report) -> String {
    match report {
        Report::Charpoly(r) => charpoly_text(r),
        Report::Table(t) => table_text(t),
        Report::Trace(r) => trace_text(r),
        Report::Period(r) => period_text(r),
        Report::Certify(r) => certify_text(r),
        Report::Deduce { witness, verdicts } => deduce_text(witness.as_ref(), verdicts),
    }
}

fn charpoly_text(r: &CharpolyReport) -> String {
    let mut s = match &r.reduction {
        Some(f) => format!("{f} over F_{}", f.modulus),
        None => r.poly.to_string(),
    };
    if r.dim == 0 {
        s.push_str(" (dim 0)");
    }
    s.push('\n');
    s
}

fn table_text(t: &TableReport) -> String {
    let ell = t.table.ell;
    let step = ell - 1;
    let mut lines: Vec<Vec<String>> = Vec::new();
    if ell == 13 {
        lines.push(vec![format!("l = {ell}"), "a_1 ... a_14".into()]);
        for cell in table_cells(t) {
            lines.push(vec![
                format!("k = {} mod {step}", cell.kclass),
                seq_string(cell.one_period()),
            ]);
        }
    } else {
        let mut header = vec![format!("l = {ell}")];
        header.extend(t.table.classes.iter().map(|c| format!("k = {c} mod {step}")));
        lines.push(header);
        for row in &t.table.rows {
            let label = match row.label {
                RowLabel::Prime(p) => format!("p = {p}"),
                RowLabel::WeightClass(c) => format!("k = {c} mod {step}"),
            };
            let mut line = vec![label];
            line.extend(row.cells.iter().map(|c| seq_string(c.one_period())));
            lines.push(line);
        }
    }
    let ncols = lines.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncols)
        .map(|i| lines.iter().filter_map(|l| l.get(i)).map(String::len).max().unwrap_or(0))
        .collect();
    let mut s = String::new();
    for line in &lines {
        let cells: Vec<String> = line
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{c:<w$}", w = widths[i]))
            .collect();
        s.push_str(cells.join("   ").trim_end());
        s.push('\n');
    }
    if t.single_period {
        s.push_str("(single period, not confirmed by repetition)\n");
    }
    s
}

fn trace_text(r: &TraceReport) -> String {
    match r.residue {
        Some((ell, v)) => format!("{} = {v} mod {ell}\n", r.trace),
        None => format!("{}\n", r.trace),
    }
}

fn period_text(r: &PeriodReport) -> String {
    let mut s = match r.sequence.period {
        Some(p) => format!("{p}\n"),
        None => "none\n".to_string(),
    };
    if let Some(tp) = &r.trace_period {
        s.push_str(&format!(
            "trace period {} in the weight (checked to k = {})\n",
            tp.period, tp.verified_to_weight
        ));
    }
    s
}

fn certify_text(r: &CertifyReport) -> String {
    match &r.certificate {
        Some(c) => format!("{c}\n"),
        None => format!("no certificate for {} with l <= {}\n", r.subject, r.bound),
    }
}

fn deduce_text(witness: Option<&Certificate>, verdicts: &[DeduceReport]) -> String {
    let mut s = String::new();
    if let Some(w) = witness {
        s.push_str(&format!("witness: {w}\n"));
    }
    for d in verdicts {
        match &d.transfer {
            TransferVerdict::Applicable(c) => {
                let status = if c.is_unconditional() {
                    "unconditional"
                } else {
                    "conditional"
                };
                s.push_str(&format!("{status}: {c}\n"));
            }
            TransferVerdict::NotApplicable { p, mod5, mod7 } => s.push_str(&format!(
                "T_{{{p},{}}}(x): no transfer ({p} = {mod5} mod 5, {mod7} mod 7)\n",
                d.k
            )),
        }
        if let DimensionVerdict::Applicable { case, certificate } = &d.dimension_rule {
            s.push_str(&format!("  dimension rule {case:?}: {}\n", certificate.claim));
        }
    }
    s
}

type Rows = (Vec<&'static str>, Vec<Vec<String>>);

fn csv_rows(report: &Report) -> Rows {
    match report {
        Report::Charpoly(r) => (
            vec!["p", "k", "dim", "polynomial", "ell", "factorization"],
            vec![vec![
                r.p.to_string(),
                r.k.to_string(),
                r.dim.to_string(),
                r.poly.to_string(),
                r.reduction.as_ref().map(|f| f.modulus.to_string()).unwrap_or_default(),
                r.reduction.as_ref().map(|f| f.to_string()).unwrap_or_default(),
            ]],
        ),
        Report::Table(t) => (
            vec!["ell", "p", "kclass", "period", "one_period", "verified_to_weight"],
            table_cells(t)
                .map(|c| {
                    vec![
                        c.ell.to_string(),
                        c.p.to_string(),
                        c.kclass.to_string(),
                        c.period.map(|p| p.to_string()).unwrap_or_default(),
                        seq_string(c.one_period()),
                        c.verified_to_weight.to_string(),
                    ]
                })
                .collect(),
        ),
        Report::Trace(r) => (
            vec!["n", "k", "trace", "ell", "trace_mod"],
            vec![vec![
                r.n.to_string(),
                r.k.to_string(),
                r.trace.to_string(),
                r.residue.map(|(l, _)| l.to_string()).unwrap_or_default(),
                r.residue.map(|(_, v)| v.to_string()).unwrap_or_default(),
            ]],
        ),
        Report::Period(r) => {
            let s = &r.sequence;
            (
                vec!["p", "ell", "kclass", "period", "one_period", "verified_to_weight", "trace_period"],
                vec![vec![
                    s.p.to_string(),
                    s.ell.to_string(),
                    s.kclass.to_string(),
                    s.period.map(|p| p.to_string()).unwrap_or_default(),
                    seq_string(s.one_period()),
                    s.verified_to_weight.to_string(),
                    r.trace_period.as_ref().map(|t| t.period.to_string()).unwrap_or_default(),
                ]],
            )
        }
        Report::Certify(r) => (
            vec!["subject", "bound", "found", "claim", "rule", "unconditional"],
            vec![vec![
                r.subject.clone(),
                r.bound.to_string(),
                r.certificate.is_some().to_string(),
                r.certificate.as_ref().map(|c| c.claim.to_string()).unwrap_or_default(),
                r.certificate.as_ref().map(|c| format!("{:?}", c.rule)).unwrap_or_default(),
                r.certificate.as_ref().map(|c| c.is_unconditional().to_string()).unwrap_or_default(),
            ]],
        ),
        Report::Deduce { verdicts, .. } => (
            vec!["p", "k", "transfer", "unconditional", "ell", "roots", "dimension_rule"],
            verdicts
                .iter()
                .map(|d| {
                    let (applicable, ell, roots) = match &d.transfer {
                        TransferVerdict::Applicable(c) => {
                            let (ell, roots) = row_evidence(c).unwrap_or((0, &[]));
                            ("applicable", ell.to_string(), seq_string(roots))
                        }
                        TransferVerdict::NotApplicable { .. } => {
                            ("not_applicable", String::new(), String::new())
                        }
                    };
                    let dimension_rule = match &d.dimension_rule {
                        DimensionVerdict::Applicable { case, .. } => format!("{case:?}"),
                        DimensionVerdict::NotApplicable => String::new(),
                    };
                    vec![
                        d.p.to_string(),
                        d.k.to_string(),
                        applicable.to_string(),
                        unconditional(d).to_string(),
                        ell,
                        roots,
                        dimension_rule,
                    ]
                })
                .collect(),
        ),
    }
}
