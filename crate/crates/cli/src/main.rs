//! `musielak` command-line tool.
//!
//! Exit status: 0 when every check passes, 1 on a verification failure, 2 on
//! invalid input.

mod output;
mod verify;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use musielak::combinat::{self, AverageRequest, Method};
use musielak::generation::{Side, Variant};
use musielak::instance::{self, Instance, Kind};
use musielak::musielak::MusielakSpace;
use musielak::orlicz::PowerOrlicz;

use output::{sig12, Sink};
use verify::Theorem;

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Verification,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, Failure>;

#[derive(Parser, Debug)]
#[command(name = "musielak", version, about = "Musielak-Orlicz norms from permutation averages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated instance as JSON.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a theorem on one instance file or a generated campaign.
    Verify {
        #[arg(value_enum)]
        theorem: Theorem,
        #[arg(long, conflicts_with = "count")]
        instance: Option<PathBuf>,
        /// Number of generated instances
        #[arg(long)]
        count: Option<usize>,
        #[command(flatten)]
        gen: GenArgs,
        #[command(flatten)]
        avg: AverageArgs,
        #[arg(long, value_enum, default_value_t = SideArg::Primal)]
        side: SideArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Luxemburg norm of a vector.
    Norm {
        /// Space JSON file
        #[arg(long, conflicts_with = "power", required_unless_present = "power")]
        space: Option<PathBuf>,
        /// Use M_i(t) = t^p in every coordinate
        #[arg(long)]
        power: Option<f64>,
        /// Comma-separated coordinates
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        /// Also print the dual-norm interval
        #[arg(long)]
        dual: bool,
    },
    /// Permutation average of an instance.
    Average {
        #[arg(long)]
        instance: Option<PathBuf>,
        #[command(flatten)]
        gen: GenArgs,
        #[command(flatten)]
        avg: AverageArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(clap::Args, Debug, Clone)]
struct GenArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Number of columns, defaults to n
    #[arg(long = "N")]
    big_n: Option<usize>,
    #[arg(long, value_parser = parse_kind)]
    kind: Option<Kind>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long, default_value_t = 1.0)]
    p_min: f64,
    #[arg(long, default_value_t = 4.0)]
    p_max: f64,
}

impl GenArgs {
    fn generate(&self, kind: Kind, variant: Variant, seed: u64) -> CliResult<Instance> {
        let big_n = self.big_n.unwrap_or(self.n);
        Ok(instance::generate(self.n, big_n, kind, seed, variant, (self.p_min, self.p_max))?)
    }
}

#[derive(clap::Args, Debug, Clone)]
struct AverageArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    method: MethodArg,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
}

impl AverageArgs {
    fn request(&self, seed: u64) -> AverageRequest {
        match self.method {
            MethodArg::Exact => AverageRequest::Exact,
            MethodArg::Mc => AverageRequest::MonteCarlo {
                trials: self.trials,
                seed,
            },
            MethodArg::Bounds => AverageRequest::Bounds,
        }
    }
}

fn parse_kind(s: &str) -> Result<Kind, String> {
    s.parse().map_err(|e: musielak::Error| e.to_string())
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum MethodArg {
    Exact,
    Mc,
    Bounds,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum VariantArg {
    Rowsum,
    Scaled,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Rowsum => Variant::RowsumNormalized,
            VariantArg::Scaled => Variant::ScaledByN,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SideArg {
    Primal,
    Dual,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

fn read_instance(path: &PathBuf) -> CliResult<Instance> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Instance::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen { gen, out } => {
            let kind = gen.kind.unwrap_or(Kind::RandomNormalized);
            let variant = gen.variant.map_or(Variant::RowsumNormalized, Variant::from);
            let inst = gen.generate(kind, variant, gen.seed)?;
            let mut sink = Sink::open(out.as_deref())?;
            sink.line(&inst.to_json())?;
            sink.finish()
        }
        Command::Verify {
            theorem,
            instance,
            count,
            gen,
            avg,
            side,
            out,
            format,
        } => {
            let side = match side {
                SideArg::Primal => Side::Primal,
                SideArg::Dual => Side::Dual,
            };
            let instances = match (instance, count) {
                (Some(path), _) => vec![read_instance(&path)?],
                (None, count) => {
                    let kind = gen.kind.unwrap_or(theorem.default_kind());
                    let variant = gen.variant.map_or(theorem.default_variant(), Variant::from);
                    let count = count.unwrap_or(1);
                    (0..count)
                        .map(|i| gen.generate(kind, variant, instance::derive_seed(gen.seed, i as u64)))
                        .collect::<CliResult<Vec<_>>>()?
                }
            };
            let opts = verify::Options {
                theorem,
                side,
                average: avg,
            };
            let reports = verify::campaign(&opts, &instances)?;
            let passed = reports.iter().filter(|r| r.pass).count();
            let mut sink = Sink::open(out.as_deref())?;
            output::write_reports(&mut sink, format, theorem, &reports)?;
            sink.finish()?;
            eprintln!("{}: {passed}/{} passed", theorem.name(), reports.len());
            outcome(&reports)
        }
        Command::Norm { space, power, x, dual } => {
            let space = match (space, power) {
                (Some(path), _) => {
                    let text = fs::read_to_string(&path)
                        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    serde_json::from_str::<MusielakSpace>(&text)
                        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
                }
                (None, Some(p)) => MusielakSpace::uniform(PowerOrlicz::new(p, 1.0)?, x.len())?,
                (None, None) => return Err(Failure::Input("need --space or --power".into())),
            };
            println!("{}", sig12(space.luxemburg_norm(&x)?));
            if dual {
                let d = space.dual_norm_estimate(&x)?;
                println!("{} {}", sig12(d.lower), sig12(d.upper));
            }
            Ok(())
        }
        Command::Average {
            instance,
            gen,
            avg,
            format,
        } => {
            let inst = match instance {
                Some(path) => read_instance(&path)?,
                None => gen.generate(
                    gen.kind.unwrap_or(Kind::RandomNormalized),
                    gen.variant.map_or(Variant::RowsumNormalized, Variant::from),
                    gen.seed,
                )?,
            };
            let y = inst.weight_matrix()?;
            let estimate = avg.request(inst.seed).estimate(&inst.x, &y)?;
            if format == Format::Json {
                println!("{}", serde_json::to_string(&estimate)?);
                return Ok(());
            }
            match estimate.method {
                Method::Exact => println!("{}", sig12(estimate.value)),
                Method::MonteCarlo => println!("{} {}", sig12(estimate.value), sig12(estimate.half_width)),
                Method::Bounds => {
                    let b = combinat::ks_bounds(&inst.x, &y)?;
                    println!("{} {}", sig12(b.lower), sig12(b.upper));
                }
            }
            Ok(())
        }
    }
}

fn outcome(reports: &[musielak::report::Report]) -> CliResult<()> {
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn exit_code(result: CliResult<()>) -> ExitCode {
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    exit_code(run(cli))
}

#[cfg(test)]
mod tests {
    use super::*;
    use musielak::report::Report;

    fn report(pass: bool) -> Report {
        Report {
            theorem: "thm3.2".into(),
            n: 2,
            a: 1.0,
            l: 1.0,
            c_low: 1.0 / 12.0,
            c_high: 1.0,
            pass,
            method: "exact".into(),
            seed: Some(1),
            detail: None,
        }
    }

    #[test]
    fn exit_statuses() {
        assert!(outcome(&[report(true), report(true)]).is_ok());
        assert!(matches!(outcome(&[report(true), report(false)]), Err(Failure::Verification)));
        assert_eq!(exit_code(Ok(())), ExitCode::SUCCESS);
        assert_eq!(exit_code(Err(Failure::Verification)), ExitCode::from(1));
        assert_eq!(exit_code(Err(Failure::Input("bad".into()))), ExitCode::from(2));
    }
}
