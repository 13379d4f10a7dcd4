//! Bundled table of identities with exact checks.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{eval_str, parse_relation, EvalContext, ExprError, Value};
use crate::forms::sigma;
use crate::fraction::{certify_sigma_identity_at, sigma_certification_order, sigma_degree_bound, sigma_rational, PolyFraction};
use crate::kernel::verify_poly_relation;
use crate::ring::PrimeModulus;
use crate::series::TruncSeries;

const BUILTIN: &str = include_str!("../data/golden.toml");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("entry `{id}`: {reason}")]
    Invalid { id: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityKind {
    SigmaInvPoly,
    SigmaInvFrac,
    IterationTable,
    AlgebraicRelation,
    VariantSigmaTilde,
    FixedPoint,
    SeriesIdentity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenIdentity {
    pub id: String,
    pub p: u32,
    pub kind: IdentityKind,
    pub input: String,
    pub expected: String,
    pub anchor: String,
    /// Iteration index for `iteration_table`.
    #[serde(default)]
    pub n: i64,
    /// Series order for the non-rational kinds.
    #[serde(default)]
    pub order: Option<usize>,
    /// `expected` is only the denominator of the result.
    #[serde(default)]
    pub denominator_only: bool,
}

#[derive(Debug, Deserialize)]
struct CorpusFile {
    identity: Vec<GoldenIdentity>,
}

pub fn parse_corpus(text: &str) -> Result<Vec<GoldenIdentity>, CorpusError> {
    let file: CorpusFile = toml::from_str(text)?;
    for e in &file.identity {
        if PrimeModulus::new(e.p).is_err() {
            return Err(CorpusError::Invalid { id: e.id.clone(), reason: format!("{} is not a supported prime", e.p) });
        }
        let needs_order = !matches!(e.kind, IdentityKind::SigmaInvPoly | IdentityKind::SigmaInvFrac | IdentityKind::IterationTable);
        if needs_order && e.order.is_none() {
            return Err(CorpusError::Invalid { id: e.id.clone(), reason: "missing order".into() });
        }
    }
    Ok(file.identity)
}

pub fn builtin_corpus() -> Vec<GoldenIdentity> {
    parse_corpus(BUILTIN).expect("bundled corpus parses")
}

/// First coefficient where two series disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub index: usize,
    pub expected: i64,
    pub got: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: String,
    pub passed: bool,
    /// `degree-bound` for rational identities, `truncated` otherwise.
    pub method: &'static str,
    pub order_checked: usize,
    pub bound_used: Option<u128>,
    pub detail: String,
    pub divergence: Option<Divergence>,
    #[serde(skip)]
    pub elapsed: Duration,
}

fn divergence(expected: &TruncSeries, got: &TruncSeries) -> Option<Divergence> {
    expected.first_difference(got).map(|i| Divergence {
        index: i,
        expected: expected.ring().signed(expected.coeff(i)),
        got: got.ring().signed(got.coeff(i)),
    })
}

struct Verdict {
    passed: bool,
    method: &'static str,
    order_checked: usize,
    bound_used: Option<u128>,
    detail: String,
    divergence: Option<Divergence>,
}

/// Runs one entry. Evaluation errors count as failures.
pub fn verify(entry: &GoldenIdentity) -> CheckOutcome {
    let start = Instant::now();
    let v = check(entry).unwrap_or_else(|e| Verdict {
        passed: false,
        method: "error",
        order_checked: 0,
        bound_used: None,
        detail: e.to_string(),
        divergence: None,
    });
    CheckOutcome {
        id: entry.id.clone(),
        passed: v.passed,
        method: v.method,
        order_checked: v.order_checked,
        bound_used: v.bound_used,
        detail: v.detail,
        divergence: v.divergence,
        elapsed: start.elapsed(),
    }
}

fn fraction(src: &str, ctx: &EvalContext) -> Result<PolyFraction, ExprError> {
    Ok(eval_str(src, ctx)?.as_fraction()?.clone())
}

fn series(src: &str, ctx: &EvalContext) -> Result<TruncSeries, ExprError> {
    eval_str(src, ctx)?.to_series(ctx.order)
}

/// `σ(a) = b`, certified; on failure the expansions are compared to locate
/// the first wrong coefficient.
fn certify(a: &PolyFraction, b: &PolyFraction) -> Result<Verdict, ExprError> {
    let m = sigma_certification_order(a.prime(), a.degree().unwrap_or(0), b.degree().unwrap_or(0))?;
    let bound = sigma_degree_bound(a.prime(), a.degree().unwrap_or(0));
    let ok = certify_sigma_identity_at(a, b)?;
    let divergence = if ok.is_none() { divergence(&b.expand(m), &sigma(&a.expand(m))?) } else { None };
    Ok(Verdict {
        passed: ok.is_some(),
        method: "degree-bound",
        order_checked: m,
        bound_used: Some(bound),
        detail: String::new(),
        divergence,
    })
}

fn check(e: &GoldenIdentity) -> Result<Verdict, ExprError> {
    let p = PrimeModulus::new(e.p).map_err(|err| ExprError::Type(err.to_string()))?;
    let ctx = EvalContext::new(p, e.order.unwrap_or(64));
    match e.kind {
        IdentityKind::SigmaInvPoly | IdentityKind::SigmaInvFrac => {
            let a = fraction(&e.input, &ctx)?;
            let b = fraction(&e.expected, &ctx)?;
            certify(&b, &a)
        }
        IdentityKind::IterationTable => iteration(e, &ctx),
        IdentityKind::AlgebraicRelation => {
            let z = series(&e.input, &ctx)?;
            let rel = parse_relation(&e.expected, p)?;
            let residual = rel.evaluate(&z)?;
            Ok(Verdict {
                passed: verify_poly_relation(&z, &rel)?,
                method: "truncated",
                order_checked: z.order(),
                bound_used: None,
                detail: String::new(),
                divergence: divergence(&TruncSeries::zero(z.ring(), z.order()), &residual),
            })
        }
        IdentityKind::FixedPoint | IdentityKind::VariantSigmaTilde | IdentityKind::SeriesIdentity => {
            let got = if e.kind == IdentityKind::FixedPoint {
                sigma(&series(&e.input, &ctx)?)?
            } else {
                series(&e.input, &ctx)?
            };
            let want = series(&e.expected, &ctx)?;
            let n = got.order().min(want.order());
            let (got, want) = (got.truncate(n), want.truncate(n));
            Ok(Verdict {
                passed: got == want,
                method: "truncated",
                order_checked: n,
                bound_used: None,
                detail: String::new(),
                divergence: divergence(&want, &got),
            })
        }
    }
}

/// `σ^n(A) = B`. Forward steps are computed as certified fractions; for
/// negative `n` the chain starts at `B` and must land on `A`.
fn iteration(e: &GoldenIdentity, ctx: &EvalContext) -> Result<Verdict, ExprError> {
    let a = fraction(&e.input, ctx)?;
    let b = fraction(&e.expected, ctx)?;
    let (mut cur, target) = if e.n >= 0 { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    let mut max_order = 0;
    let mut max_bound = 0;
    let steps = e.n.unsigned_abs();
    for step in 0..steps {
        if e.n < 0 && step + 1 == steps {
            // the last step lands on a known fraction: certify it directly
            let v = certify(&cur, &target)?;
            max_order = max_order.max(v.order_checked);
            max_bound = max_bound.max(v.bound_used.unwrap_or(0));
            return Ok(Verdict { order_checked: max_order, bound_used: Some(max_bound), ..v });
        }
        max_bound = max_bound.max(sigma_degree_bound(cur.prime(), cur.degree().unwrap_or(0)));
        let c = sigma_rational(&cur)?;
        max_order = max_order.max(c.order_checked);
        cur = c.fraction;
    }
    if e.denominator_only {
        // `expected` is a denominator D; the claim is σ^n(A)·D is a polynomial
        let scaled = cur.mul(&PolyFraction::from_poly(b.num().clone()))?;
        let passed = scaled.is_polynomial() && b.is_polynomial();
        return Ok(Verdict {
            passed,
            method: "degree-bound",
            order_checked: max_order,
            bound_used: Some(max_bound),
            detail: format!("numerator has degree {}", scaled.num().degree_or_zero()),
            divergence: None,
        });
    }
    let passed = cur == target;
    let divergence = if passed {
        None
    } else {
        let m = max_order.max(64);
        divergence(&target.expand(m), &cur.expand(m))
    };
    Ok(Verdict { passed, method: "degree-bound", order_checked: max_order, bound_used: Some(max_bound), detail: String::new(), divergence })
}

/// Outcome table for a set of entries, in input order.
pub fn verify_all(entries: &[GoldenIdentity]) -> Vec<CheckOutcome> {
    entries.iter().map(verify).collect()
}

/// Value of an entry's expected side, for display.
pub fn expected_value(e: &GoldenIdentity) -> Result<Value, ExprError> {
    let p = PrimeModulus::new(e.p).map_err(|err| ExprError::Type(err.to_string()))?;
    eval_str(&e.expected, &EvalContext::new(p, e.order.unwrap_or(64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_parses_with_unique_ids() {
        let c = builtin_corpus();
        let mut ids: Vec<&str> = c.iter().map(|e| e.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), c.len());
        assert!(c.iter().any(|e| e.id == "sigma_inv_1px"));
    }

    #[test]
    fn small_entries_pass() {
        for e in builtin_corpus().iter().filter(|e| ["sigma_inv_1px", "iter_1px_m3", "p3_sigma_inv_1px", "tilde_one_plus_x"].contains(&e.id.as_str())) {
            let out = verify(e);
            assert!(out.passed, "{}: {}", e.id, out.detail);
        }
    }

    #[test]
    fn corrupted_entry_reports_the_first_divergence() {
        let mut e = builtin_corpus().into_iter().find(|e| e.id == "sigma_inv_1px").unwrap();
        e.expected = "1/(1+X+X^3)".into();
        let out = verify(&e);
        assert!(!out.passed);
        let d = out.divergence.unwrap();
        // σ(1/(1+X+X^3)) = 1+X+X^3+… while 1+X stops at X
        assert_eq!((d.index, d.expected, d.got), (3, 0, 1));
    }
}
