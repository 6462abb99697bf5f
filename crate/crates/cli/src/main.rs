use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde_json::json;

use fqsolve_core::analysis::{exponent_table_csv, zeta};
use fqsolve_core::oracle::count_common_roots;
use fqsolve_core::pes::{parse_pes, write_pes, write_polynomial};
use fqsolve_core::reduction::{parse_dimacs, reduce_cnf};
use fqsolve_core::{full_sum, partial_sum, selftest, solve_pes, PolySystem, RngStream, SolverParams};

/// Exact solver for polynomial equation systems over finite fields.
///
/// Systems are read in the PES text format:
///
///   pes <q> <n> <m>
///   poly <t>
///   <coeff> <e1> ... <en>    (t lines per polynomial, m polynomials)
///
/// Field elements are decimal indices 0..q-1; `#` starts a comment line.
#[derive(Parser, Debug)]
#[command(name = "fqsolve", version, verbatim_doc_comment)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Worker threads (0 = one per core); output does not depend on it
    #[arg(long, default_value_t = 0, global = true)]
    threads: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    JsonLines,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Random seed
    #[arg(long, env = "FQSOLVE_SEED", default_value_t = 0)]
    seed: u64,

    /// Fraction of variables summed by the partial sum, 0 < kappa < 1/(2d-1)
    /// (decimal or p/q; default 0.9/(2d-1))
    #[arg(long, value_parser = parse_rational)]
    kappa: Option<Rational64>,

    /// Fraction of variables peeled per recursion level, 0 < lambda <= kappa
    /// (default kappa/2)
    #[arg(long, value_parser = parse_rational)]
    lambda: Option<Rational64>,

    /// Repetitions per recursion level (default ceil(96 n ln q))
    #[arg(long)]
    t: Option<usize>,

    /// Isolation trials for `solve` (default 9n)
    #[arg(long)]
    outer_reps: Option<usize>,
}

impl SolverArgs {
    fn params(&self, system: &PolySystem) -> Result<SolverParams, String> {
        let mut p = SolverParams::for_degree(system.degree());
        if let Some(k) = self.kappa {
            p.kappa = k;
            if self.lambda.is_none() {
                p.lambda = k / 2;
            }
        }
        if let Some(l) = self.lambda {
            p.lambda = l;
        }
        p.t_override = self.t;
        p.outer_reps = self.outer_reps;
        p.seed = self.seed;
        p.validate(system.degree()).map_err(|e| e.to_string())?;
        Ok(p)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the system has a common root; prints SAT (exit 10) or UNSAT (exit 20)
    Solve {
        /// Input system (PES format)
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Count common roots by exhaustive enumeration
    CountRoots {
        /// Input system (PES format)
        input: PathBuf,
    },
    /// Sum of the indicator polynomial over all points (the root count mod p)
    FullSum {
        /// Input system (PES format)
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Indicator summed over the last BETA variables, printed as a one-polynomial PES file
    PartialSum {
        /// Number of trailing variables to sum out
        #[arg(long)]
        beta: usize,
        /// Input system (PES format)
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Reduce a DIMACS CNF formula to a polynomial system
    ReduceCnf {
        /// Field order
        #[arg(long)]
        q: u32,
        /// Slack parameter, larger means fewer Boolean variables per block (decimal or p/q)
        #[arg(long, value_parser = parse_rational)]
        delta: Rational64,
        /// Preserve the number of solutions exactly
        #[arg(long)]
        parsimonious: bool,
        /// Input formula (DIMACS CNF)
        input: PathBuf,
        /// Output system (PES format)
        output: PathBuf,
    },
    /// Running-time exponents for every prime power q <= QMAX and degree d <= DMAX
    ExponentTable {
        #[arg(long, default_value_t = 9)]
        qmax: u32,
        #[arg(long, default_value_t = 6)]
        dmax: u32,
    },
    /// Run the built-in comparison against exhaustive oracles
    Selftest {
        /// Random seed
        #[arg(long, env = "FQSOLVE_SEED", default_value_t = 0)]
        seed: u64,
    },
}

fn parse_rational(s: &str) -> Result<Rational64, String> {
    let s = s.trim();
    if s.contains('/') {
        return s.parse().map_err(|_| format!("invalid fraction `{s}`"));
    }
    let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 12 || whole.starts_with('-') {
        return Err(format!("invalid number `{s}`"));
    }
    let digits = format!("{whole}{frac}");
    let numer: i64 = digits.parse().map_err(|_| format!("invalid number `{s}`"))?;
    Ok(Rational64::new(numer, 10i64.pow(frac.len() as u32)))
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<PolySystem, String> {
    parse_pes(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

/// Prints a single named value in the chosen format.
fn emit(format: Format, key: &str, value: &str) {
    match format {
        Format::Text => println!("{value}"),
        Format::Csv => println!("{key}\n{value}"),
        Format::JsonLines => println!("{}", json!({ key: value })),
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let format = cli.format;
    match cli.command {
        Command::Solve { input, solver } => {
            let system = load(&input)?;
            let verdict = solve_pes(&system, &solver.params(&system)?).map_err(|e| e.to_string())?;
            emit(format, "verdict", &verdict.to_string());
            Ok(ExitCode::from(verdict.exit_code() as u8))
        }
        Command::CountRoots { input } => {
            let system = load(&input)?;
            let count = count_common_roots(&system).map_err(|e| e.to_string())?;
            emit(format, "count", &count.count.to_string());
            Ok(ExitCode::SUCCESS)
        }
        Command::FullSum { input, solver } => {
            let system = load(&input)?;
            let params = solver.params(&system)?;
            let z = full_sum(&system, &params, &RngStream::new(params.seed)).map_err(|e| e.to_string())?;
            emit(format, "sum", &z.to_string());
            Ok(ExitCode::SUCCESS)
        }
        Command::PartialSum { beta, input, solver } => {
            let system = load(&input)?;
            let params = solver.params(&system)?;
            let z = partial_sum(&system, beta, &params, &RngStream::new(params.seed)).map_err(|e| e.to_string())?;
            match format {
                Format::JsonLines => {
                    let terms: Vec<_> = z
                        .terms()
                        .map(|(m, c)| json!({ "coeff": c.index(), "exponents": m.exponents() }))
                        .collect();
                    println!(
                        "{}",
                        json!({ "q": z.field().order(), "n": z.nvars(), "beta": beta, "terms": terms })
                    );
                }
                Format::Csv => {
                    let header: Vec<String> = (1..=z.nvars()).map(|i| format!("e{i}")).collect();
                    println!("coeff{}{}", if header.is_empty() { "" } else { "," }, header.join(","));
                    for (m, c) in z.terms() {
                        let mut row = vec![c.to_string()];
                        row.extend(m.exponents().iter().map(u16::to_string));
                        println!("{}", row.join(","));
                    }
                }
                Format::Text => print!("{}", write_polynomial(&z)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ReduceCnf {
            q,
            delta,
            parsimonious,
            input,
            output,
        } => {
            let cnf = parse_dimacs(&read(&input)?).map_err(|e| format!("{}: {e}", input.display()))?;
            let (system, plan) = reduce_cnf(&cnf, q, delta, parsimonious).map_err(|e| e.to_string())?;
            let header = format!(
                "# reduced from {} ({} variables, {} clauses): q={}, delta={}, vars1={}, vars2={}, blocks={}{}\n",
                input.display(),
                cnf.n_vars,
                cnf.clauses.len(),
                plan.q,
                plan.delta,
                plan.vars1,
                plan.vars2,
                plan.blocks,
                if parsimonious { ", parsimonious" } else { "" }
            );
            fs::write(&output, header + &write_pes(&system)).map_err(|e| format!("{}: {e}", output.display()))?;
            let summary = format!(
                "{} variables, {} polynomials, degree {}",
                system.nvars(),
                system.len(),
                system.degree()
            );
            match format {
                Format::JsonLines => println!(
                    "{}",
                    json!({ "variables": system.nvars(), "polynomials": system.len(), "degree": system.degree(),
                            "vars1": plan.vars1, "vars2": plan.vars2, "blocks": plan.blocks })
                ),
                Format::Csv => println!(
                    "variables,polynomials,degree,vars1,vars2,blocks\n{},{},{},{},{},{}",
                    system.nvars(),
                    system.len(),
                    system.degree(),
                    plan.vars1,
                    plan.vars2,
                    plan.blocks
                ),
                Format::Text => println!("{summary}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ExponentTable { qmax, dmax } => {
            match format {
                Format::JsonLines => {
                    for q in 2..=qmax {
                        if fqsolve_core::field::prime_power(q as u64).is_none() {
                            continue;
                        }
                        for d in 1..=dmax {
                            let r = zeta(q, d).map_err(|e| e.to_string())?;
                            let kappa = *r.kappa_star.numer() as f64 / *r.kappa_star.denom() as f64;
                            println!(
                                "{}",
                                json!({ "q": q, "d": d, "kappa_star": format!("{kappa:.6}"),
                                        "zeta": format!("{:.6}", r.zeta),
                                        "theorem1_bound": format!("{:.6}", r.guaranteed_bound) })
                            );
                        }
                    }
                }
                _ => print!("{}", exponent_table_csv(qmax, dmax).map_err(|e| e.to_string())?),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { seed } => {
            let checks = selftest::run(seed);
            let mut ok = true;
            for c in &checks {
                ok &= c.passed;
                match format {
                    Format::JsonLines => {
                        println!("{}", json!({ "check": c.name, "passed": c.passed, "detail": c.detail }))
                    }
                    _ => println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail),
                }
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("fqsolve: error: {msg}");
            ExitCode::FAILURE
        }
    }
}
