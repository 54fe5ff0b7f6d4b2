//! Command-line front end.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use crate::bounds::{best_desperate_lower_bound, exponential_bounds, powerlaw_bounds, regret_upper_bound, BoundReport};
use crate::codec::{decode_bytes, encode_to_bytes, CodecParams};
use crate::envelope::{Envelope, EnvelopeTable};
use crate::error::{Error, Result};
use crate::sim::{empirical_redundancy, Comparator, SourceKind, SourceSpec, CSV_HEADER};

#[derive(Debug, Parser)]
#[command(
    name = "envcode",
    version,
    about = "Censoring codes and redundancy bounds for integer sources"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress a list of positive integers into a container file.
    Encode {
        #[command(flatten)]
        codec: CodecArgs,
        /// Read raw little-endian u32 values instead of text.
        #[arg(long)]
        binary: bool,
        input: PathBuf,
        output: PathBuf,
    },
    /// Restore the integer list from a container file.
    Decode {
        /// Write raw little-endian u32 values instead of text.
        #[arg(long)]
        binary: bool,
        input: PathBuf,
        /// Defaults to standard output.
        output: Option<PathBuf>,
    },
    /// Evaluate redundancy and regret bounds for an envelope class.
    Bounds(BoundsArgs),
    /// Measure redundancy over a range of lengths.
    Simulate(SimArgs),
    /// Measure redundancy at one length and report the elapsed time.
    Bench(SimArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CodecKind {
    Fixed,
    Adaptive,
}

#[derive(Debug, Args)]
pub struct CodecArgs {
    #[arg(long, value_enum, default_value = "fixed")]
    pub codec: CodecKind,
    /// Envelope exponent of the fixed cutoff schedule.
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Envelope constant of the fixed cutoff schedule.
    #[arg(long, default_value_t = 1.0)]
    pub c_env: f64,
    /// Multiplier of the adaptive cutoff.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
}

impl CodecArgs {
    fn params(&self) -> Result<CodecParams> {
        match self.codec {
            CodecKind::Fixed => CodecParams::fixed(self.alpha, self.c_env),
            CodecKind::Adaptive => CodecParams::adaptive(self.mu),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnvelopeKind {
    Powerlaw,
    Exponential,
    Uniform,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Csv,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub envelope: EnvelopeKind,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_env: f64,
    /// Alphabet size of the uniform envelope.
    #[arg(long, default_value_t = 2)]
    pub m: u64,
    /// Envelope table file with `k value` lines.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_enum, default_value = "human")]
    pub format: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SourceName {
    Zipf,
    Geometric,
    Theta,
    Sparse,
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundChoice {
    /// Censoring bound for the fixed codec, nothing for the adaptive one.
    Auto,
    None,
    Censoring,
    Regret,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long, value_enum)]
    pub source: SourceName,
    /// Source exponent or rate; also the default schedule exponent.
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Block width of the theta source or size of the uniform source.
    #[arg(long, default_value_t = 16)]
    pub m: u64,
    #[arg(long, default_value_t = 0)]
    pub theta_seed: u64,
    #[arg(long, value_enum, default_value = "fixed")]
    pub codec: CodecKind,
    /// Exponent of the fixed schedule; defaults to the source exponent.
    #[arg(long)]
    pub codec_alpha: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub c_env: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Lengths to measure; `simulate` also accepts `--n-max` for a doubling sweep.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Extend the lengths by doubling the last one up to this value.
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "auto")]
    pub bound: BoundChoice,
}

impl SimArgs {
    fn source(&self) -> Result<SourceSpec> {
        let kind = match self.source {
            SourceName::Zipf => SourceKind::Zipf { alpha: self.alpha },
            SourceName::Geometric => SourceKind::Geometric { alpha: self.alpha },
            SourceName::Theta => SourceKind::ThetaShifted {
                alpha: self.alpha,
                m: self.m,
                theta_seed: self.theta_seed,
            },
            SourceName::Sparse => SourceKind::SparseGeometric { alpha: self.alpha },
            SourceName::Uniform => SourceKind::FiniteUniform { m: self.m },
        };
        kind.validate()?;
        Ok(SourceSpec { kind, seed: self.seed })
    }

    fn codec(&self) -> Result<CodecParams> {
        CodecArgs {
            codec: self.codec,
            alpha: self.codec_alpha.unwrap_or(self.alpha),
            c_env: self.c_env,
            mu: self.mu,
        }
        .params()
    }

    fn comparator(&self) -> Comparator {
        let alpha = self.codec_alpha.unwrap_or(self.alpha);
        let censoring = Comparator::Censoring { alpha, c: self.c_env };
        match (self.bound, self.codec) {
            (BoundChoice::Auto, CodecKind::Fixed) | (BoundChoice::Censoring, _) => censoring,
            (BoundChoice::Auto, CodecKind::Adaptive) | (BoundChoice::None, _) => Comparator::None,
            (BoundChoice::Regret, _) => Comparator::Regret(Envelope::PowerLaw { alpha, c: self.c_env }),
        }
    }

    fn lengths(&self) -> Result<Vec<usize>> {
        let mut lengths = self.n.clone();
        if let (Some(max), Some(&last)) = (self.n_max, self.n.last()) {
            if last == 0 {
                return Err(Error::Domain("cannot double a zero length".into()));
            }
            let mut next = last * 2;
            while next <= max {
                lengths.push(next);
                next *= 2;
            }
        }
        Ok(lengths)
    }
}

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 2,
        Error::Decode(_) | Error::Format(_) => 3,
        Error::Domain(_) | Error::Resource(_) => 4,
    }
}

/// Exit status for command-line usage errors.
pub const USAGE_EXIT: u8 = 1;

/// Whitespace-separated positive integers.
pub fn parse_text(text: &str) -> Result<Vec<u64>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<u64>()
                .map_err(|e| Error::Format(format!("bad integer {tok:?}: {e}")))
        })
        .collect()
}

pub fn parse_binary(bytes: &[u8]) -> Result<Vec<u64>> {
    if !bytes.len().is_multiple_of(4) {
        return Err(Error::Format(format!(
            "binary input length {} is not a multiple of 4",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| u64::from(u32::from_le_bytes([c[0], c[1], c[2], c[3]])))
        .collect())
}

fn render(values: &[u64], binary: bool) -> Result<Vec<u8>> {
    if binary {
        let mut out = Vec::with_capacity(values.len() * 4);
        for &v in values {
            let v = u32::try_from(v).map_err(|_| Error::Domain(format!("{v} does not fit in 32 bits")))?;
            out.extend_from_slice(&v.to_le_bytes());
        }
        Ok(out)
    } else {
        let mut out = String::with_capacity(values.len() * 4);
        for v in values {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        Ok(out.into_bytes())
    }
}

fn bound_reports(args: &BoundsArgs) -> Result<Vec<BoundReport>> {
    let n = args.n;
    let envelope = match args.envelope {
        EnvelopeKind::Powerlaw => Envelope::PowerLaw {
            alpha: args.alpha,
            c: args.c_env,
        },
        EnvelopeKind::Exponential => Envelope::Exponential {
            alpha: args.alpha,
            c: args.c_env,
        },
        EnvelopeKind::Uniform => Envelope::FiniteUniform { m: args.m },
        EnvelopeKind::Table => {
            let path = args
                .table
                .as_ref()
                .ok_or_else(|| Error::Domain("--table is required for a table envelope".into()))?;
            Envelope::Table(fs::read_to_string(path)?.parse::<EnvelopeTable>()?)
        }
    };
    envelope.validate()?;
    let mut reports = Vec::new();
    match args.envelope {
        EnvelopeKind::Powerlaw => {
            let (lower, upper) = powerlaw_bounds(args.alpha, args.c_env, n)?;
            reports.extend([lower, upper]);
        }
        EnvelopeKind::Exponential => {
            let (lower, upper) = exponential_bounds(args.alpha, args.c_env, n)?;
            reports.extend([lower, upper]);
        }
        EnvelopeKind::Uniform | EnvelopeKind::Table => {}
    }
    reports.push(regret_upper_bound(&envelope, n)?);
    reports.push(best_desperate_lower_bound(&envelope, n, 0.5, 0.5)?);
    Ok(reports)
}

fn simulate(args: &SimArgs, lengths: &[usize], out: &mut dyn Write) -> Result<()> {
    let spec = args.source()?;
    let params = args.codec()?;
    let comparator = args.comparator();
    writeln!(out, "{CSV_HEADER}")?;
    for &n in lengths {
        let started = Instant::now();
        let report = empirical_redundancy(&spec, &params, n, args.trials, &comparator)?;
        info!(
            "{} n={n} trials={} c1={:.1} c2={:.1} censored={:.1} elapsed={:.3}s",
            spec.kind,
            args.trials,
            report.mean_c1_bits,
            report.mean_c2_bits,
            report.mean_censored,
            started.elapsed().as_secs_f64()
        );
        writeln!(out, "{}", report.csv_row())?;
    }
    Ok(())
}

/// Executes one command, writing primary output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Encode {
            codec,
            binary,
            input,
            output,
        } => {
            let params = codec.params()?;
            let raw = fs::read(input)?;
            let values = if *binary {
                parse_binary(&raw)?
            } else {
                parse_text(std::str::from_utf8(&raw).map_err(|e| Error::Format(e.to_string()))?)?
            };
            let bytes = encode_to_bytes(&values, &params)?;
            info!("encoded {} values into {} bytes", values.len(), bytes.len());
            fs::write(output, bytes)?;
        }
        Command::Decode { binary, input, output } => {
            let values = decode_bytes(&fs::read(input)?)?;
            let rendered = render(&values, *binary)?;
            match output {
                Some(path) => fs::write(path, rendered)?,
                None => out.write_all(&rendered)?,
            }
        }
        Command::Bounds(args) => {
            let reports = bound_reports(args)?;
            match args.format {
                OutputFormat::Human => {
                    for r in &reports {
                        writeln!(out, "{r}")?;
                    }
                }
                OutputFormat::Csv => {
                    writeln!(out, "name,value,valid")?;
                    for r in &reports {
                        writeln!(out, "{},{:.6},{}", r.name, r.value, r.valid)?;
                    }
                }
            }
        }
        Command::Simulate(args) => simulate(args, &args.lengths()?, out)?,
        Command::Bench(args) => {
            if args.n.len() != 1 || args.n_max.is_some() {
                return Err(Error::Domain("bench takes exactly one length".into()));
            }
            simulate(args, &args.n, out)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { USAGE_EXIT } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("envcode: {err}");
            exit_code(&err)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_binary_parsing() {
        assert_eq!(parse_text(" 1\n2\t30 \n").unwrap(), vec![1, 2, 30]);
        assert!(matches!(parse_text("1 x"), Err(Error::Format(_))));
        assert!(matches!(parse_text("-3"), Err(Error::Format(_))));
        assert_eq!(parse_binary(&[1, 0, 0, 0, 0, 1, 0, 0]).unwrap(), vec![1, 256]);
        assert!(matches!(parse_binary(&[1, 0]), Err(Error::Format(_))));
        assert_eq!(render(&[5, 6], false).unwrap(), b"5\n6\n");
        assert_eq!(render(&[1], true).unwrap(), vec![1, 0, 0, 0]);
        assert!(render(&[1 << 40], true).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Io(io::Error::other("x"))), 2);
        assert_eq!(exit_code(&Error::Format("x".into())), 3);
        assert_eq!(exit_code(&Error::Decode("x".into())), 3);
        assert_eq!(exit_code(&Error::Domain("x".into())), 4);
        assert_eq!(main_with_args(["envcode", "frobnicate"]), USAGE_EXIT);
        assert_eq!(
            main_with_args([
                "envcode",
                "bounds",
                "--envelope",
                "powerlaw",
                "--alpha",
                "0.5",
                "--n",
                "10"
            ]),
            4
        );
    }

    #[test]
    fn doubling_sweep() {
        let cli = Cli::try_parse_from([
            "envcode", "simulate", "--source", "zipf", "--n", "100,1000", "--n-max", "5000",
        ])
        .unwrap();
        let Command::Simulate(args) = cli.command else { panic!() };
        assert_eq!(args.lengths().unwrap(), vec![100, 1000, 2000, 4000]);
    }
}
