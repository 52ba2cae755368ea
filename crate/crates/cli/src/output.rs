use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use musielak::report::Report;

use crate::verify::Theorem;
use crate::{CliResult, Failure, Format};

/// Buffered stdout or file.
pub struct Sink(Box<dyn Write>);

impl Sink {
    pub fn open(path: Option<&Path>) -> CliResult<Self> {
        let w: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Sink(w))
    }

    pub fn line(&mut self, text: &str) -> CliResult<()> {
        writeln!(self.0, "{text}")?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.0.flush()?;
        Ok(())
    }
}

/// `v` with 12 significant digits, e.g. `5.00000000000`.
pub fn sig12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0.00000000000".into() } else { v.to_string() };
    }
    // the exponent after rounding to 12 digits, so carries are accounted for
    let sci = format!("{v:.11e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if !(-5..=15).contains(&exp) {
        return sci;
    }
    format!("{:.*}", (11 - exp).max(0) as usize, v)
}

#[derive(Serialize)]
struct Summary<'a> {
    summary: bool,
    theorem: &'a str,
    instances: usize,
    passed: usize,
    pass: bool,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    index: usize,
    theorem: &'a str,
    n: usize,
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "L")]
    l: f64,
    c_low: f64,
    c_high: f64,
    pass: bool,
    method: &'a str,
    seed: Option<u64>,
}

pub fn write_reports(sink: &mut Sink, format: Format, theorem: Theorem, reports: &[Report]) -> CliResult<()> {
    let passed = reports.iter().filter(|r| r.pass).count();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink.0);
            for (index, r) in reports.iter().enumerate() {
                w.serialize(CsvRow {
                    index,
                    theorem: &r.theorem,
                    n: r.n,
                    a: r.a,
                    l: r.l,
                    c_low: r.c_low,
                    c_high: r.c_high,
                    pass: r.pass,
                    method: &r.method,
                    seed: r.seed,
                })?;
            }
            w.flush()?;
        }
        Format::Json | Format::Text => {
            for r in reports {
                sink.line(&serde_json::to_string(r)?)?;
            }
            sink.line(&serde_json::to_string(&Summary {
                summary: true,
                theorem: theorem.name(),
                instances: reports.len(),
                passed,
                pass: passed == reports.len(),
            })?)?;
        }
    }
    Ok(())
}
