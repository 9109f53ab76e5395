//! Batch command-line interface: parse objects, run operations, emit
//! canonical text (or JSON) output and certificates.
//!
//! Exit codes: 0 success, 1 mathematical failure (validator, certificate,
//! support condition), 2 parse or usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mfcalc::acceptance;
use mfcalc::convolution::{convolve_kernel_module, convolve_kernels};
use mfcalc::error::Error;
use mfcalc::koszul::{build_koszul_complex, default_t_names, kappa};
use mfcalc::mf::MatrixFactorization;
use mfcalc::reduce::{equiv_check_seeded, split_contractibles, EquivResult, ReductionTrace};
use mfcalc::ring::{Poly, Ring};
use mfcalc::scenario::{Kernel, ModuleObject, Scenario};
use mfcalc::textio::{self, InputObject};

#[derive(Parser)]
#[command(
    name = "mfcalc",
    about = "Exact calculus for matrix factorizations: tensor, pullback, pushforward, Koszul duality, convolution, and homotopy certificates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct OutputOpts {
    /// Output file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a matrix factorization or DG-module file.
    Validate { file: PathBuf },
    /// Tensor product of two factorizations over one ring.
    Tensor {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Pull a factorization back along a ring map.
    Pullback {
        mf: PathBuf,
        /// Ring map file (`ringmap` format).
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Push a factorization forward along a finite free monomial ring map.
    Pushforward {
        mf: PathBuf,
        #[arg(long)]
        map: PathBuf,
        /// Comma-separated monomial basis of the extension, e.g. `1, x`.
        #[arg(long)]
        basis: String,
        /// Potential on the target whose pullback is the input's potential.
        #[arg(long)]
        target_potential: String,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Build the folded Koszul complex of ρ♯ generators over a base ring.
    Koszul {
        /// Base ring declaration, e.g. `y:0 y':0`.
        #[arg(long)]
        base: String,
        /// One ρ♯ polynomial per exterior generator.
        #[arg(long = "rho", required = true)]
        rho: Vec<String>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Apply the Koszul duality functor κ to a DG-module file.
    Kappa {
        dgmodule: PathBuf,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Convolve two kernels over a scenario.
    Convolve {
        scenario: PathBuf,
        k1: PathBuf,
        k2: PathBuf,
        /// Write the reduction trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Act by a kernel on a module object over a scenario.
    Act {
        scenario: PathBuf,
        kernel: PathBuf,
        module: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Split off all contractible summands.
    Reduce {
        mf: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Decide homotopy equivalence; writes a certificate when one is found.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        /// Weight/degree bound for the search.
        #[arg(long, default_value = "6")]
        bound: i64,
        /// Seed for the randomized completion of the search.
        #[arg(long, default_value_t = acceptance::DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Verify the two potential identities of a scenario.
    CheckPotentials { scenario: PathBuf },
    /// Run the full acceptance suite.
    Selftest {
        #[arg(long, default_value_t = acceptance::DEFAULT_SEED)]
        seed: u64,
    },
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &OutputOpts, text: String, json: serde_json::Value) -> Result<(), Error> {
    let body = match out.format {
        Format::Text => text,
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&json).unwrap()),
    };
    match &out.output {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn load_mf(path: &PathBuf) -> Result<MatrixFactorization, Error> {
    match textio::parse_any(&read(path)?)? {
        InputObject::Mf(m) => Ok(m),
        _ => Err(Error::Parse(format!(
            "{} is not a matrix factorization",
            path.display()
        ))),
    }
}

fn load_scenario(path: &PathBuf) -> Result<Scenario, Error> {
    match textio::parse_any(&read(path)?)? {
        InputObject::Scen(s) => Ok(*s),
        _ => Err(Error::Parse(format!(
            "{} is not a scenario",
            path.display()
        ))),
    }
}

fn write_trace(path: &Option<PathBuf>, trace: &ReductionTrace) -> Result<(), Error> {
    if let Some(p) = path {
        std::fs::write(p, textio::format_trace(trace))
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Validate { file } => {
            match textio::parse_any(&read(&file)?)? {
                InputObject::Mf(m) => m.validate()?,
                InputObject::Dg(d) => d.validate()?,
                InputObject::Scen(s) => s.check_potential_identities()?,
                InputObject::Map(_) => {}
            }
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
        Command::Tensor { a, b, out } => {
            let t = load_mf(&a)?.tensor(&load_mf(&b)?)?;
            emit(&out, textio::format_mf(&t), textio::mf_to_json(&t))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Pullback { mf, map, out } => {
            let m = load_mf(&mf)?;
            let InputObject::Map(phi) = textio::parse_any(&read(&map)?)? else {
                return Err(Error::Parse("map file is not a ringmap".into()));
            };
            let r = m.pullback(&phi)?;
            emit(&out, textio::format_mf(&r), textio::mf_to_json(&r))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Pushforward {
            mf,
            map,
            basis,
            target_potential,
            out,
        } => {
            let m = load_mf(&mf)?;
            let InputObject::Map(phi) = textio::parse_any(&read(&map)?)? else {
                return Err(Error::Parse("map file is not a ringmap".into()));
            };
            let basis = textio::parse_basis(phi.target(), &basis)?;
            let pot = Poly::parse(phi.source(), &target_potential)?;
            let r = m.pushforward_finite(&phi, &basis, &pot)?;
            emit(&out, textio::format_mf(&r), textio::mf_to_json(&r))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Koszul { base, rho, out } => {
            let tokens: Vec<&str> = base.split_whitespace().collect();
            let ring = Ring::parse_decl(&tokens)?;
            let rho = rho
                .iter()
                .map(|s| Poly::parse(&ring, s))
                .collect::<Result<Vec<_>, _>>()?;
            let k = build_koszul_complex(&ring, &rho, &default_t_names(rho.len()))?;
            emit(&out, textio::format_mf(&k.mf), textio::mf_to_json(&k.mf))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Kappa { dgmodule, out } => {
            let InputObject::Dg(d) = textio::parse_any(&read(&dgmodule)?)? else {
                return Err(Error::Parse("input is not a dgmodule".into()));
            };
            let k = kappa(&d, &default_t_names(d.ext().n()))?;
            emit(&out, textio::format_mf(&k), textio::mf_to_json(&k))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Convolve {
            scenario,
            k1,
            k2,
            trace,
            out,
        } => {
            let s = load_scenario(&scenario)?;
            let a = Kernel::new(&s, load_mf(&k1)?)?;
            let b = Kernel::new(&s, load_mf(&k2)?)?;
            let (res, tr) = convolve_kernels(&s, &a, &b)?;
            write_trace(&trace, &tr)?;
            emit(&out, textio::format_mf(&res.mf), textio::mf_to_json(&res.mf))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Act {
            scenario,
            kernel,
            module,
            trace,
            out,
        } => {
            let s = load_scenario(&scenario)?;
            let k = Kernel::new(&s, load_mf(&kernel)?)?;
            let m = ModuleObject::new(&s, load_mf(&module)?)?;
            let (res, tr) = convolve_kernel_module(&s, &k, &m)?;
            write_trace(&trace, &tr)?;
            emit(&out, textio::format_mf(&res.mf), textio::mf_to_json(&res.mf))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce { mf, trace, out } => {
            let m = load_mf(&mf)?;
            let (red, tr) = split_contractibles(&m)?;
            write_trace(&trace, &tr)?;
            emit(&out, textio::format_mf(&red), textio::mf_to_json(&red))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Equiv {
            a,
            b,
            bound,
            seed,
            out,
        } => {
            let m = load_mf(&a)?;
            let n = load_mf(&b)?;
            let result = equiv_check_seeded(&m, &n, bound, seed)?;
            let json = textio::equiv_result_to_json(&result);
            match &result {
                EquivResult::Equivalent(cert) => {
                    emit(&out, textio::format_certificate(cert), json)?;
                    eprintln!("equivalent");
                    Ok(ExitCode::SUCCESS)
                }
                EquivResult::DefinitelyDistinct(reason) => {
                    emit(&out, format!("definitely-distinct\n{reason}\n"), json)?;
                    Ok(ExitCode::from(1))
                }
                EquivResult::NotFound(bound) => {
                    emit(&out, format!("not-found (bound {bound})\n"), json)?;
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::CheckPotentials { scenario } => {
            let s = load_scenario(&scenario)?;
            s.check_potential_identities()?;
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { seed } => {
            let results = acceptance::run_all(seed);
            let mut all_pass = true;
            for r in &results {
                let status = if r.pass { "PASS" } else { "FAIL" };
                println!("criterion {:>2} [{status}] {} — {}", r.id, r.name, r.detail);
                all_pass &= r.pass;
            }
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e @ Error::Parse(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
