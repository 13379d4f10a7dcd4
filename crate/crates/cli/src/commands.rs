use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value as Json};

use shuffle_core::corpus::{builtin_corpus, verify};
use shuffle_core::expr::{eval_str, EvalContext, Value};
use shuffle_core::forms::{builtin_forms, builtin_solvers, invert_with, Form};
use shuffle_core::fraction::{reconstruct, sigma_degree_bound, sigma_inv_rational, sigma_rational, PolyFraction};
use shuffle_core::hankel::{hankel_rank, recursive_closure, stabilized_hankel_rank};
use shuffle_core::kernel::{classify, kernel_closure, Classification, ClassifyCaps, ClosureStop, RationalEvidence};
use shuffle_core::nc::NCSeries;
use shuffle_core::orbit::{degree_growth, orbit_cardinality, OrbitStatus};
use shuffle_core::ring::PrimeModulus;
use shuffle_core::series::TruncSeries;

use crate::report::{Certification, Report, Status};
use crate::{Cmd, Opts};

/// σ of a fraction is computed exactly when its degree bound is at most this.
const AUTO_EXACT_BOUND: u128 = 1024;

const DEFAULT_RECONSTRUCT_CAP: usize = 16;

pub fn context(o: &Opts) -> Result<EvalContext> {
    let p = PrimeModulus::new(o.p).with_context(|| format!("--p {}", o.p))?;
    if o.order == 0 {
        bail!("--order must be at least 1");
    }
    let mut ctx = EvalContext::new(p, o.order);
    ctx.nc_order = o.nc_order;
    ctx.nc_vars = o.vars;
    Ok(ctx)
}

fn eval(src: &str, ctx: &EvalContext) -> Result<Value> {
    eval_str(src, ctx).with_context(|| format!("in `{src}`"))
}

fn nc(src: &str, ctx: &EvalContext) -> Result<NCSeries> {
    Ok(eval(src, ctx)?.as_nc()?.clone())
}

fn stop_name(s: ClosureStop) -> &'static str {
    match s {
        ClosureStop::Closed => "closed",
        ClosureStop::CapExceeded => "cap exceeded",
        ClosureStop::OrderExhausted => "order exhausted",
    }
}

struct Outcome {
    text: String,
    result: Json,
    details: Vec<String>,
    certification: Certification,
    status: Status,
}

impl Outcome {
    fn series(s: &TruncSeries) -> Self {
        Outcome {
            text: s.to_string(),
            result: json!({ "series": s.to_string() }),
            details: Vec::new(),
            certification: Certification::truncated(s.order()),
            status: Status::Ok,
        }
    }

    fn plain(text: String, result: Json, order: usize) -> Self {
        Outcome { text, result, details: Vec::new(), certification: Certification::truncated(order), status: Status::Ok }
    }
}

pub fn run(o: &Opts, cmd: &Cmd) -> Result<Report> {
    let ctx = context(o)?;
    let start = Instant::now();
    let (job, exprs, out) = match cmd {
        Cmd::Sigma { expr } => ("sigma", vec![expr], form_job(o, &ctx, o.form.as_deref().unwrap_or("sigma"), false, expr)?),
        Cmd::SigmaInv { expr } => {
            ("sigma-inv", vec![expr], form_job(o, &ctx, o.form.as_deref().unwrap_or("sigma"), true, expr)?)
        }
        Cmd::SigmaTilde { expr } => ("sigma-tilde", vec![expr], form_job(o, &ctx, "sigma-tilde", false, expr)?),
        Cmd::SigmaTildeInv { expr } => ("sigma-tilde-inv", vec![expr], form_job(o, &ctx, "sigma-tilde", true, expr)?),
        Cmd::Psi { expr } => ("psi", vec![expr], form_job(o, &ctx, "psi", false, expr)?),
        Cmd::PsiInv { expr } => ("psi-inv", vec![expr], form_job(o, &ctx, "psi", true, expr)?),
        Cmd::Shuffle { a, b } => {
            let x = eval(a, &ctx)?.to_series(o.order)?;
            let y = eval(b, &ctx)?.to_series(o.order)?;
            ("shuffle", vec![a, b], with_reconstruct(o, x.shuffle_mul(&y)?)?)
        }
        Cmd::ShuffleInv { expr } => {
            let x = eval(expr, &ctx)?.to_series(o.order)?;
            ("shuffle-inv", vec![expr], with_reconstruct(o, x.shuffle_inv()?)?)
        }
        Cmd::Expand { expr } => {
            let v = eval(expr, &ctx)?;
            let out = match &v {
                Value::Nc(a) => Outcome::plain(a.to_string(), json!({ "nc_series": a.to_string() }), a.order()),
                _ => {
                    let s = v.to_series(o.order)?;
                    let mut out = Outcome::series(&s);
                    if let Value::Fraction(f) = &v {
                        out.result["fraction"] = json!(f.to_string());
                    }
                    out
                }
            };
            ("expand", vec![expr], out)
        }
        Cmd::Reconstruct { expr } => {
            let s = eval(expr, &ctx)?.to_series(o.order)?;
            let cap = o.reconstruct.unwrap_or(DEFAULT_RECONSTRUCT_CAP);
            let f = reconstruct(&s, cap)?;
            let out = match f {
                Some(f) => Outcome::plain(f.to_string(), json!({ "fraction": f.to_string() }), s.order()),
                None => Outcome {
                    status: Status::NotFound,
                    ..Outcome::plain(format!("no fraction of degree ≤ {cap}"), json!({ "fraction": null, "cap": cap }), s.order())
                },
            };
            ("reconstruct", vec![expr], out)
        }
        Cmd::Orbit { poly, budget } => ("orbit", vec![poly], orbit_job(&ctx, poly, *budget)?),
        Cmd::Growth { expr, from, to, cap } => {
            let f = eval(expr, &ctx)?.as_fraction()?.clone();
            let rows = degree_growth(&f, *from, *to, *cap);
            let details: Vec<String> = rows
                .iter()
                .map(|r| match (&r.fraction, r.log_ratio) {
                    (Some(f), Some(l)) => format!("n={:>3}  deg={:<5} ln(deg)/|n|={l:.4}  {f}", r.n, r.degree.unwrap_or(0)),
                    (Some(f), None) => format!("n={:>3}  deg={:<5} {f}", r.n, r.degree.unwrap_or(0)),
                    (None, _) => format!("n={:>3}  not found within cap {cap}", r.n),
                })
                .collect();
            let result = json!(rows
                .iter()
                .map(|r| json!({
                    "n": r.n,
                    "fraction": r.fraction.as_ref().map(|f| f.to_string()),
                    "degree": r.degree,
                    "log_ratio": r.log_ratio,
                }))
                .collect::<Vec<_>>());
            let complete = rows.iter().all(|r| r.fraction.is_some());
            let out = Outcome {
                text: format!("{} steps", rows.len()),
                result,
                details,
                certification: Certification { method: "degree-bound", order_checked: 0, bound_used: None },
                status: if complete { Status::Ok } else { Status::NotFound },
            };
            ("growth", vec![expr], out)
        }
        Cmd::Kernel { expr, cap } => {
            let s = eval(expr, &ctx)?.to_series(o.order)?;
            let k = kernel_closure(&s, *cap);
            let text = format!("dimension {} ({})", k.dim, stop_name(k.stop));
            let result = json!({ "dim": k.dim, "saturated": k.saturated, "stop": stop_name(k.stop), "common_order": k.common_order });
            let out = Outcome { certification: Certification::truncated(k.common_order), ..Outcome::plain(text, result, 0) };
            ("kernel", vec![expr], out)
        }
        Cmd::Classify { expr, kernel_cap, degree_cap } => {
            let s = eval(expr, &ctx)?.to_series(o.order)?;
            let c = classify(&s, ClassifyCaps { kernel_dim: *kernel_cap, degree: *degree_cap })?;
            let (text, result) = match c {
                Classification::RationalCandidate(RationalEvidence::Periodic { preperiod, period }) => (
                    format!("rational candidate: periodic from {preperiod} with period {period}"),
                    json!({ "class": "rational", "preperiod": preperiod, "period": period }),
                ),
                Classification::RationalCandidate(RationalEvidence::Fraction(f)) => {
                    (format!("rational candidate: {f}"), json!({ "class": "rational", "fraction": f.to_string() }))
                }
                Classification::AlgebraicCandidate { kernel_dim } => (
                    format!("algebraic candidate: kernel dimension {kernel_dim}"),
                    json!({ "class": "algebraic", "kernel_dim": kernel_dim }),
                ),
                Classification::Unknown { kernel_dim } => (
                    format!("unknown: kernel dimension at least {kernel_dim}"),
                    json!({ "class": "unknown", "kernel_dim": kernel_dim }),
                ),
            };
            ("classify", vec![expr], Outcome::plain(text, result, s.order()))
        }
        Cmd::NcSigma { expr } => {
            let a = nc(expr, &ctx)?.sigma()?;
            ("nc-sigma", vec![expr], nc_outcome(&a))
        }
        Cmd::NcSigmaInv { expr } => {
            let a = nc(expr, &ctx)?.sigma_inv()?;
            let mut out = nc_outcome(&a);
            out.certification.method = "round-trip";
            ("nc-sigma-inv", vec![expr], out)
        }
        Cmd::NcShuffle { a, b } => {
            // both operands must agree on the number of variables
            let vars = o.vars.or_else(|| {
                let k1 = eval(a, &ctx).ok()?.as_nc().ok()?.vars();
                let k2 = eval(b, &ctx).ok()?.as_nc().ok()?.vars();
                Some(k1.max(k2))
            });
            let ctx = EvalContext { nc_vars: vars, ..ctx };
            let s = nc(a, &ctx)?.shuffle(&nc(b, &ctx)?)?;
            ("nc-shuffle", vec![a, b], nc_outcome(&s))
        }
        Cmd::NcShuffleInv { expr } => {
            let a = nc(expr, &ctx)?.shuffle_inv()?;
            ("nc-shuffle-inv", vec![expr], nc_outcome(&a))
        }
        Cmd::NcClosure { expr, cap } => {
            let a = nc(expr, &ctx)?;
            let c = recursive_closure(&a, *cap);
            let text = format!("dimension {} ({})", c.dim, stop_name(c.stop));
            let details = c.elements.iter().map(|e| format!("ρ({}) A", e.shift)).collect();
            let result = json!({
                "dim": c.dim,
                "saturated": c.saturated,
                "stop": stop_name(c.stop),
                "shifts": c.elements.iter().map(|e| e.shift.to_string()).collect::<Vec<_>>(),
            });
            let out = Outcome { details, certification: Certification::truncated(c.compared_below), ..Outcome::plain(text, result, 0) };
            ("nc-closure", vec![expr], out)
        }
        Cmd::NcHankel { expr, rows, cols } => {
            let a = nc(expr, &ctx)?;
            let out = match (rows, cols) {
                (Some(r), Some(c)) => {
                    let h = hankel_rank(&a, *r, *c)?;
                    let details = h
                        .rows
                        .iter()
                        .zip(&h.matrix)
                        .map(|(w, row)| format!("{w:>8} | {}", row.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")))
                        .collect();
                    let result = json!({ "rank": h.rank, "rows": r, "cols": c, "matrix": h.matrix });
                    Outcome { details, ..Outcome::plain(format!("rank {}", h.rank), result, r + c + 1) }
                }
                _ => {
                    let prof = stabilized_hankel_rank(&a)?;
                    let text = format!("rank {}{}", prof.rank, if prof.stabilized { "" } else { " (not stabilized)" });
                    let result = json!({ "rank": prof.rank, "stabilized": prof.stabilized, "ranks": prof.ranks });
                    Outcome::plain(text, result, a.order())
                }
            };
            ("nc-hankel", vec![expr], out)
        }
        Cmd::VerifyCorpus { id } => ("verify-corpus", Vec::new(), verify_job(o, id.as_deref())?),
        Cmd::Forms => ("forms", Vec::new(), forms_job()),
        Cmd::Scan(_) => unreachable!("scan streams its own output"),
    };
    let mut inputs = json!({ "p": o.p, "order": o.order, "expressions": exprs });
    if let Some(cap) = o.reconstruct {
        inputs["reconstruct"] = json!(cap);
    }
    if job.starts_with("nc-") {
        inputs["nc_order"] = json!(o.nc_order);
    }
    if let Cmd::VerifyCorpus { id: Some(id) } = cmd {
        inputs["id"] = json!(id);
    }
    Ok(Report {
        job: job.to_string(),
        inputs,
        result: out.result,
        text: out.text,
        details: out.details,
        certification: out.certification,
        timing_ms: (!o.no_timing).then(|| start.elapsed().as_secs_f64() * 1e3),
        status: out.status,
    })
}

fn nc_outcome(a: &NCSeries) -> Outcome {
    Outcome::plain(a.to_string(), json!({ "nc_series": a.to_string() }), a.order())
}

fn lookup_form(name: &str) -> Result<std::sync::Arc<dyn Form>> {
    let reg = builtin_forms();
    reg.get(name).ok_or_else(|| anyhow!("unknown form `{name}`; known: {}", reg.names().collect::<Vec<_>>().join(", ")))
}

/// Applies or inverts a registered form, exactly on fractions where possible.
fn form_job(o: &Opts, ctx: &EvalContext, form_name: &str, inverse: bool, expr: &str) -> Result<Outcome> {
    let form = lookup_form(form_name)?;
    let value = eval(expr, ctx)?;
    let series = value.to_series(o.order)?;
    // every σ path computes the same map, so exact fraction methods apply to all of them
    let exact_sigma = form_name.starts_with("sigma") && form_name != "sigma-tilde";
    let fraction = match &value {
        Value::Fraction(f) if exact_sigma => Some(f),
        _ => None,
    };
    if !inverse {
        let image = form.apply(&series)?;
        let mut out = Outcome::series(&image);
        if let Some(f) = fraction {
            let bound = sigma_degree_bound(f.prime(), f.degree().unwrap_or(0));
            if o.reconstruct.is_some() || bound <= AUTO_EXACT_BOUND {
                let c = sigma_rational(f)?;
                set_fraction(&mut out, &c.fraction, Certification { method: "degree-bound", order_checked: c.order_checked, bound_used: Some(bound) });
            }
            return Ok(out);
        }
        return reconstruct_into(o, out, &image);
    }
    let solver_name = o.solver.as_deref();
    let solvers = builtin_solvers();
    let solver = match solver_name {
        Some(n) => solvers
            .get(n)
            .ok_or_else(|| anyhow!("unknown solver `{n}`; known: {}", solvers.names().collect::<Vec<_>>().join(", ")))?,
        None => solvers.default_entry(),
    };
    let inv = invert_with(form.as_ref(), solver.as_ref(), &series)?;
    let mut out = Outcome::series(&inv.series);
    out.certification.method = "round-trip";
    out.result["iterations"] = json!(inv.iterations);
    match (fraction, o.reconstruct) {
        (Some(f), Some(cap)) => {
            match sigma_inv_rational(f, cap)? {
                Some(c) => {
                    let bound = sigma_degree_bound(f.prime(), c.fraction.degree().unwrap_or(0));
                    set_fraction(&mut out, &c.fraction, Certification { method: "degree-bound", order_checked: c.order_checked, bound_used: Some(bound) });
                }
                None => not_found(&mut out, cap),
            }
            Ok(out)
        }
        _ => reconstruct_into(o, out, &inv.series),
    }
}

fn set_fraction(out: &mut Outcome, f: &PolyFraction, cert: Certification) {
    out.text = f.to_string();
    out.result["fraction"] = json!(f.to_string());
    out.details.push(format!("series: {}", out.result["series"].as_str().unwrap_or_default()));
    out.certification = cert;
}

fn not_found(out: &mut Outcome, cap: usize) {
    out.result["fraction"] = Json::Null;
    out.details.push(format!("no fraction of degree ≤ {cap}"));
    out.status = Status::NotFound;
}

/// Truncated reconstruction when `--reconstruct` is given.
fn reconstruct_into(o: &Opts, mut out: Outcome, s: &TruncSeries) -> Result<Outcome> {
    if let Some(cap) = o.reconstruct {
        match reconstruct(s, cap)? {
            Some(f) => {
                let cert = Certification::truncated(s.order());
                set_fraction(&mut out, &f, cert);
            }
            None => not_found(&mut out, cap),
        }
    }
    Ok(out)
}

fn with_reconstruct(o: &Opts, s: TruncSeries) -> Result<Outcome> {
    reconstruct_into(o, Outcome::series(&s), &s)
}

fn orbit_job(ctx: &EvalContext, poly: &str, budget: usize) -> Result<Outcome> {
    let f = eval(poly, ctx)?.as_fraction()?.clone();
    if !f.is_polynomial() {
        bail!("orbit needs a polynomial, got {f}");
    }
    let r = orbit_cardinality(f.num(), budget)?;
    let (text, size, status) = match r.status {
        OrbitStatus::Finite(c) => (format!("finite orbit of size {c}"), json!(c), Status::Ok),
        OrbitStatus::InfiniteCertified => ("infinite orbit (has a monomial X^(2^k))".to_string(), json!("infinite"), Status::Ok),
        OrbitStatus::Exhausted(n) => (format!("no return within {n} steps"), Json::Null, Status::NotFound),
    };
    let details = if r.trace.len() <= 64 { r.trace.iter().map(|p| p.to_string()).collect() } else { Vec::new() };
    Ok(Outcome {
        text,
        result: json!({ "size": size, "trace": r.trace.iter().take(64).map(|p| p.to_string()).collect::<Vec<_>>() }),
        details,
        certification: Certification { method: "exact", order_checked: 0, bound_used: None },
        status,
    })
}

fn verify_job(o: &Opts, id: Option<&str>) -> Result<Outcome> {
    let entries: Vec<_> = builtin_corpus().into_iter().filter(|e| id.is_none_or(|id| e.id == id)).collect();
    if entries.is_empty() {
        bail!("no corpus entry `{}`", id.unwrap_or_default());
    }
    let outcomes: Vec<_> = entries.iter().map(verify).collect();
    let failed = outcomes.iter().filter(|c| !c.passed).count();
    let details = outcomes
        .iter()
        .map(|c| {
            let mut line = format!("{} {:<36} {:<12} order {:<7}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.method, c.order_checked);
            if !o.no_timing {
                line.push_str(&format!(" {:>9.1} ms", c.elapsed.as_secs_f64() * 1e3));
            }
            if let Some(d) = &c.divergence {
                line.push_str(&format!("  first difference at X^{}: expected {}, got {}", d.index, d.expected, d.got));
            }
            if !c.detail.is_empty() {
                line.push_str(&format!("  {}", c.detail));
            }
            line
        })
        .collect();
    let result = json!(outcomes
        .iter()
        .map(|c| {
            let mut v = serde_json::to_value(c).expect("outcome serializes");
            if !o.no_timing {
                v["timing_ms"] = json!(c.elapsed.as_secs_f64() * 1e3);
            }
            v
        })
        .collect::<Vec<_>>());
    Ok(Outcome {
        text: format!("{} of {} identities verified", outcomes.len() - failed, outcomes.len()),
        result,
        details,
        certification: Certification {
            method: "per-entry",
            order_checked: outcomes.iter().map(|c| c.order_checked).max().unwrap_or(0),
            bound_used: outcomes.iter().filter_map(|c| c.bound_used).max(),
        },
        status: if failed == 0 { Status::Ok } else { Status::Failed },
    })
}

fn forms_job() -> Outcome {
    let forms = builtin_forms();
    let solvers = builtin_solvers();
    let mut details = Vec::new();
    for (name, f) in forms.iter() {
        let mark = if name == forms.default_name() { " (default)" } else { "" };
        details.push(format!("form   {name:<12} {}{mark}", f.description()));
    }
    for (name, s) in solvers.iter() {
        let mark = if name == solvers.default_name() { " (default)" } else { "" };
        details.push(format!("solver {name:<12} {}{mark}", s.description()));
    }
    let result = json!({
        "forms": forms.iter().map(|(n, f)| json!({ "name": n, "description": f.description() })).collect::<Vec<_>>(),
        "solvers": solvers.iter().map(|(n, s)| json!({ "name": n, "description": s.description() })).collect::<Vec<_>>(),
    });
    Outcome {
        details,
        certification: Certification { method: "none", order_checked: 0, bound_used: None },
        ..Outcome::plain(format!("{} forms, {} solvers", forms.names().count(), solvers.names().count()), result, 0)
    }
}
