use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value as Json};

use shuffle_core::ring::PrimeModulus;
use shuffle_core::scan::{scan_item, Generator};

use crate::report::{Certification, Format, Report, Status};
use crate::Opts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Polynomials,
    Fractions,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Family of inputs, all with constant term 1.
    #[arg(long, value_enum, default_value_t = Family::Polynomials)]
    pub generator: Family,
    /// Largest degree of the generated polynomials, numerators and denominators.
    #[arg(long, default_value_t = 4)]
    pub max_degree: usize,
    /// Number of inputs for the random family.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Degree caps tried in turn.
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32])]
    pub caps: Vec<usize>,
    /// Progress file: finished records are appended here and skipped on rerun.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

/// Records finished by an earlier run, by index.
fn load_progress(path: &PathBuf) -> Result<BTreeMap<usize, Json>> {
    let mut done = BTreeMap::new();
    let Ok(file) = File::open(path) else {
        return Ok(done);
    };
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        // a torn last line from an interrupted run is recomputed
        let Ok(record) = serde_json::from_str::<Json>(&line) else {
            continue;
        };
        let index = record["index"].as_u64().with_context(|| format!("{}:{}: record without index", path.display(), n + 1))?;
        done.insert(index as usize, record);
    }
    Ok(done)
}

fn emit(format: Format, record: &Json, out: &mut impl Write) -> Result<()> {
    let s = |k: &str| record[k].as_str().unwrap_or_default().to_string();
    let n = |k: &str| record[k].as_u64().map(|v| v.to_string()).unwrap_or_default();
    let conforms = record["shape"]["conforms"].as_bool();
    match format {
        Format::Json => writeln!(out, "{record}")?,
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut *out);
            w.write_record([
                n("index"),
                s("input"),
                s("status"),
                s("fraction"),
                n("cap"),
                n("order_checked"),
                conforms.map(|c| c.to_string()).unwrap_or_default(),
            ])?;
            w.flush()?;
        }
        Format::Human => {
            let body = match s("status").as_str() {
                "certified" => format!("{} (cap {}, order {})", s("fraction"), n("cap"), n("order_checked")),
                "not_found" => format!("not found up to degree {}", n("max_cap")),
                _ => format!("error: {}", s("message")),
            };
            let shape = match conforms {
                Some(true) => "  shape ok",
                Some(false) => "  SHAPE MISMATCH",
                None => "",
            };
            writeln!(out, "{:>6}  σ⁻¹({}) = {body}{shape}", n("index"), s("input"))?;
        }
    }
    Ok(())
}

pub fn run(o: &Opts, args: &ScanArgs, out: &mut impl Write) -> Result<Status> {
    let start = Instant::now();
    let p = PrimeModulus::new(o.p).with_context(|| format!("--p {}", o.p))?;
    let generator = match args.generator {
        Family::Polynomials => Generator::Polynomials { p, max_degree: args.max_degree },
        Family::Fractions => Generator::Fractions { p, max_degree: args.max_degree },
        Family::Random => Generator::Random { p, max_degree: args.max_degree, count: args.count, seed: o.seed },
    };
    let items = generator.items();
    let mut done = match &args.resume {
        Some(path) => load_progress(path)?,
        None => BTreeMap::new(),
    };
    let mut progress = match &args.resume {
        Some(path) => Some(OpenOptions::new().create(true).append(true).open(path).with_context(|| path.display().to_string())?),
        None => None,
    };
    if let (Some(file), Some(path)) = (progress.as_mut(), &args.resume) {
        // start on a fresh line after a torn record
        let text = std::fs::read(path)?;
        if text.last().is_some_and(|&b| b != b'\n') {
            writeln!(file)?;
        }
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build()?;
    if o.format == Format::Csv {
        writeln!(out, "index,input,status,fraction,cap,order_checked,shape_conforms")?;
    }

    let (mut certified, mut not_found, mut errors, mut mismatched) = (0usize, 0usize, 0usize, 0usize);
    let mut tally = |r: &Json| {
        match r["status"].as_str() {
            Some("certified") => certified += 1,
            Some("not_found") => not_found += 1,
            _ => errors += 1,
        }
        if r["shape"]["conforms"] == json!(false) {
            mismatched += 1;
        }
    };

    // chunks keep memory bounded and let the progress file advance in order
    let chunk = 4 * pool.current_num_threads().max(1);
    let mut next = 0;
    while next < items.len() {
        let end = (next + chunk).min(items.len());
        let todo: Vec<usize> = (next..end).filter(|i| !done.contains_key(i)).collect();
        let fresh: Vec<Json> = pool.install(|| {
            todo.par_iter().map(|&i| serde_json::to_value(scan_item(i, &items[i], &args.caps)).expect("record serializes")).collect()
        });
        if let Some(file) = progress.as_mut() {
            for r in &fresh {
                writeln!(file, "{r}")?;
            }
            file.flush()?;
        }
        for (i, r) in todo.into_iter().zip(fresh) {
            done.insert(i, r);
        }
        for i in next..end {
            let r = &done[&i];
            tally(r);
            emit(o.format, r, out)?;
        }
        next = end;
    }

    let status = if errors > 0 {
        Status::Failed
    } else if not_found > 0 {
        Status::NotFound
    } else {
        Status::Ok
    };
    let summary = Report {
        job: "scan".into(),
        inputs: json!({
            "p": o.p,
            "generator": format!("{:?}", args.generator).to_lowercase(),
            "max_degree": args.max_degree,
            "count": items.len(),
            "caps": args.caps,
            "seed": o.seed,
        }),
        result: json!({ "certified": certified, "not_found": not_found, "errors": errors, "shape_mismatches": mismatched }),
        text: format!(
            "{} inputs: {certified} certified, {not_found} not found, {errors} errors, {mismatched} shape mismatches",
            items.len()
        ),
        details: Vec::new(),
        certification: Certification { method: "degree-bound", order_checked: 0, bound_used: None },
        timing_ms: (!o.no_timing).then(|| start.elapsed().as_secs_f64() * 1e3),
        status,
    };
    match o.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&summary.to_json())?)?,
        Format::Human => summary.render(Format::Human, out)?,
        // the csv stream holds only records
        Format::Csv => {}
    }
    Ok(status)
}
