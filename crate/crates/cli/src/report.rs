use std::io::Write;

use clap::ValueEnum;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

/// How a result was established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certification {
    /// `degree-bound`, `truncated`, `round-trip` or `none`.
    pub method: &'static str,
    pub order_checked: usize,
    pub bound_used: Option<u128>,
}

impl Certification {
    pub fn truncated(order: usize) -> Self {
        Certification { method: "truncated", order_checked: order, bound_used: None }
    }

    pub fn to_json(&self) -> Value {
        json!({ "method": self.method, "order_checked": self.order_checked, "bound_used": self.bound_used.map(|b| b as u64) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A search came back empty; exit code 2.
    NotFound,
    /// A check failed; exit code 1.
    Failed,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::NotFound => 2,
            Status::Failed => 1,
        }
    }
}

pub struct Report {
    pub job: String,
    pub inputs: Value,
    /// Structured result for json.
    pub result: Value,
    /// One-line result for human and csv output.
    pub text: String,
    /// Extra lines for human output.
    pub details: Vec<String>,
    pub certification: Certification,
    pub timing_ms: Option<f64>,
    pub status: Status,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "job": self.job,
            "inputs": self.inputs,
            "result": self.result,
            "certification": self.certification.to_json(),
            "timing_ms": self.timing_ms,
        })
    }

    pub fn render(&self, format: Format, out: &mut impl Write) -> anyhow::Result<()> {
        match format {
            Format::Human => {
                writeln!(out, "{}", self.text)?;
                for line in &self.details {
                    writeln!(out, "  {line}")?;
                }
                let c = &self.certification;
                if c.method != "none" {
                    write!(out, "  [{}", c.method)?;
                    if c.order_checked > 0 {
                        write!(out, " to order {}", c.order_checked)?;
                    }
                    if let Some(b) = c.bound_used {
                        write!(out, ", degree bound {b}")?;
                    }
                    writeln!(out, "]")?;
                }
                if let Some(ms) = self.timing_ms {
                    writeln!(out, "  {ms:.1} ms")?;
                }
            }
            Format::Json => writeln!(out, "{}", serde_json::to_string(&self.to_json())?)?,
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["job", "inputs", "result", "method", "order_checked", "bound_used", "timing_ms"])?;
                let c = &self.certification;
                w.write_record([
                    self.job.clone(),
                    self.inputs.to_string(),
                    self.text.clone(),
                    c.method.to_string(),
                    c.order_checked.to_string(),
                    c.bound_used.map(|b| b.to_string()).unwrap_or_default(),
                    self.timing_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
                ])?;
                w.flush()?;
            }
        }
        Ok(())
    }
}
