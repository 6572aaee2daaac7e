use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use syntomic_core::chart::{
    compute, export_json, parse_json, render, Axis, ChartDocument, ComputeRequest, FieldSpec, Format, Frame,
    ObjectKind,
};
use syntomic_core::verify::{run_suite, Suite};
use syntomic_core::Error;

/// Compute, export, render and verify charts for k(n).
#[derive(Parser)]
#[command(name = "kn-chart", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the class table of one pipeline stage.
    Compute(ComputeArgs),
    /// Write the chart document as JSON.
    Export(ComputeArgs),
    /// Draw a chart as SVG or TikZ, from flags or from a JSON document.
    Render {
        #[command(flatten)]
        args: ComputeArgs,
        #[arg(long, default_value = "svg")]
        format: String,
        /// Read the document from this JSON file instead of computing it.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run verification suites; exits 1 if any check fails.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value = "figures")]
        fixtures: PathBuf,
        /// Print one JSON object per check instead of text lines.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct ComputeArgs {
    /// thh, hodge-tate, tp, tcminus, tc, k1-tc or k1-k.
    #[arg(default_value = "tc")]
    object: String,
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long)]
    ideal: Option<String>,
    /// Stem range smin:smax.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Range of the plotted y coordinate ymin:ymax.
    #[arg(long, allow_hyphen_values = true)]
    yrange: Option<String>,
    /// Residue field degree m, or "closed".
    #[arg(long)]
    field: Option<String>,
    /// adams_weight or nygaard.
    #[arg(long)]
    axis: Option<String>,
    /// Drop the A01 part of TC^-.
    #[arg(long)]
    exclude_a01: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str, flag: &str) -> Result<(i64, i64), Error> {
    let bad = || Error::Invalid(format!("--{flag} expects lo:hi, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let (a, b) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

impl ComputeArgs {
    fn request(&self) -> Result<ComputeRequest, Error> {
        let mut req = ComputeRequest::new(ObjectKind::parse(&self.object)?, self.p, self.n);
        req.ideal = self.ideal.clone();
        req.window = self.window.as_deref().map(|s| parse_range(s, "window")).transpose()?;
        req.yrange = self.yrange.as_deref().map(|s| parse_range(s, "yrange")).transpose()?;
        req.field = self.field.as_deref().map(FieldSpec::parse).transpose()?;
        req.axis = self.axis.as_deref().map(Axis::parse).transpose()?;
        req.exclude_a01 = self.exclude_a01;
        Ok(req)
    }

    fn frame(&self, doc: &ChartDocument) -> Result<Frame, Error> {
        let fit = Frame::fit(doc)?;
        Ok(Frame {
            stems: self.window.as_deref().map(|s| parse_range(s, "window")).transpose()?.unwrap_or(fit.stems),
            ys: self.yrange.as_deref().map(|s| parse_range(s, "yrange")).transpose()?.unwrap_or(fit.ys),
        })
    }

    fn emit(&self, text: &str) -> Result<(), Error> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display()))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Error::Invalid(format!("stdout: {e}"))),
        }
    }
}

fn table_text(doc: &ChartDocument) -> Result<String, Error> {
    let mut out = format!(
        "# {} p={} n={} mod {}: {} classes\n# stem\tweight\tnygaard\tcoeff\tlabel\n",
        doc.object.name(),
        doc.p,
        doc.n,
        doc.ideal,
        doc.entries.len()
    );
    for e in &doc.entries {
        let ny = e.nygaard.map_or("-".to_string(), |k| k.to_string());
        out.push_str(&format!("{}\t{}\t{ny}\t{}\t{}\n", e.stem, e.weight, e.coeff.tag(), e.label));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Compute(args) => {
            let doc = compute(&args.request()?)?;
            args.emit(&table_text(&doc)?)?;
        }
        Command::Export(args) => {
            let doc = compute(&args.request()?)?;
            args.emit(&export_json(&doc))?;
        }
        Command::Render { args, format, input } => {
            let format = Format::parse(&format)?;
            let doc = match input {
                Some(path) => parse_json(
                    &std::fs::read_to_string(&path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?,
                )?,
                None => compute(&args.request()?)?,
            };
            args.emit(&render(&doc, format, Some(args.frame(&doc)?))?)?;
        }
        Command::Verify { suite, fixtures, json } => {
            let reports = run_suite(Suite::parse(&suite)?, &fixtures);
            let mut first_failure = None;
            for r in &reports {
                if json {
                    println!("{}", serde_json::to_string(r).expect("reports serialize"));
                } else {
                    let status = if r.passed { "PASS" } else { "FAIL" };
                    println!("{status} [{}] {} ({} ms): {}", r.suite, r.name, r.millis, r.detail);
                }
                if !r.passed && first_failure.is_none() {
                    first_failure = Some(r);
                }
            }
            if let Some(r) = first_failure {
                eprintln!("first failure: [{}] {}: {}", r.suite, r.name, r.detail);
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("kn-chart: {e}");
            match e {
                Error::Invalid(_) | Error::NotPrime(_) | Error::Unbounded(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
