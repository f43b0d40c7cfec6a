mod args;
mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use kramers_core::Error;

use args::{Cli, Format};
use commands::{Output, Tolerances};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;

    if let Some(n) = g.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    }

    let tol = Tolerances {
        rel_tol: g.rel_tol,
        abs_tol: g.abs_tol,
    };
    let result = match commands::run(&cli.command, tol) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::InvalidConfig(_) | Error::OutOfRange { .. } => EXIT_USAGE,
                _ => EXIT_FAILURE,
            };
            return ExitCode::from(code);
        }
    };

    let precision = g.precision as usize;
    let failed = matches!(&result, Output::Report(r) if !r.passed());
    if let Err(e) = emit(&result, g.format, g.out.as_deref(), precision) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_FAILURE);
    }
    if failed {
        ExitCode::from(EXIT_FAILURE)
    } else {
        ExitCode::SUCCESS
    }
}

fn emit(result: &Output, format: Option<Format>, path: Option<&std::path::Path>, precision: usize) -> io::Result<()> {
    let mut out: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match result {
        Output::Table(t) => match format.unwrap_or(Format::Csv) {
            Format::Csv => t.write_csv(&mut out, precision)?,
            Format::Json => output::write_json(&mut out, &t.to_json(precision))?,
        },
        Output::Json(v) => match format.unwrap_or(Format::Json) {
            Format::Json => output::write_json(&mut out, &output::round_json(v.clone(), precision))?,
            Format::Csv => json_as_csv(&mut out, v, precision)?,
        },
        Output::Report(r) => match format {
            None => out.write_all(r.render(precision).as_bytes())?,
            Some(Format::Json) => {
                let v = serde_json::to_value(r).map_err(io::Error::other)?;
                output::write_json(&mut out, &output::round_json(v, precision))?
            }
            Some(Format::Csv) => {
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(["name", "value", "reference", "deviation", "tolerance", "passed"])?;
                for c in &r.checks {
                    w.write_record([
                        c.name.clone(),
                        output::fmt_sig(c.value, precision),
                        output::fmt_sig(c.reference, precision),
                        output::fmt_sig(c.deviation, precision),
                        output::fmt_sig(c.tolerance, precision),
                        c.passed.to_string(),
                    ])?;
                }
                w.flush()?;
            }
        },
    }
    out.flush()
}

/// The oracle comparison rows as CSV.
fn json_as_csv<W: Write>(out: &mut W, v: &serde_json::Value, precision: usize) -> io::Result<()> {
    let rows = v["profile_comparison"]["rows"].as_array().cloned().unwrap_or_default();
    writeln!(out, "# x: distance from the wall")?;
    writeln!(out, "# oracle: discrete-ordinates U(x)/G_v")?;
    writeln!(out, "# analytic: U(x)/G_v from the closed-form solution")?;
    writeln!(out, "# relative_deviation: |oracle - analytic|/|analytic|")?;
    let mut w = csv::Writer::from_writer(out);
    let names = ["x", "oracle", "analytic", "relative_deviation"];
    w.write_record(names)?;
    for r in rows {
        w.write_record(names.map(|k| output::fmt_sig(r[k].as_f64().unwrap_or(f64::NAN), precision)))?;
    }
    w.flush()
}
