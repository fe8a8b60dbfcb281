//! Command-line front end: estimator evaluation, independence tests,
//! moment tables, enumeration cross-checks, and figure-ready simulation
//! CSV. All stochastic commands take (or default) a --seed and echo it, so
//! every output is reproducible byte for byte. The simulation commands
//! parallelize internally; set RAYON_NUM_THREADS to bound the thread count.

mod io;

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use xisym::{
    asymptotic_test, cov_sqrtn_xi, enumerate_null, finite_moments, finite_sample_test, mc_moments,
    permutation_test, xi_sym, BiasRecord, Direction, Error as XiError, Scenario, SimConfig,
    TestResult, TiePolicy,
};

use io::{fmt12, read_dataset, sig12, write_output};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit codes: 0 success, 2 input or flag error, 3 tie rejection,
/// 4 domain error (e.g. n too small for the requested method).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Ties(XiError),
    Domain(String),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) | CliError::Domain(msg) => {
                write!(f, "{msg}")
            }
            CliError::Ties(e) => write!(f, "{e} (re-run with --ties random to break ties)"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<XiError> for CliError {
    fn from(e: XiError) -> Self {
        match e {
            XiError::TiesPresent { .. } => CliError::Ties(e),
            XiError::NonFiniteValue { .. } | XiError::LengthMismatch { .. } => {
                CliError::Data(e.to_string())
            }
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Data(_) | CliError::Io(_) => 2,
            CliError::Ties(_) => 3,
            CliError::Domain(_) => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Xy,
    Yx,
}

impl DirectionArg {
    fn to_direction(self) -> Direction {
        match self {
            DirectionArg::Xy => Direction::XY,
            DirectionArg::Yx => Direction::YX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TiesArg {
    Reject,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Asymptotic,
    Finite,
    Permutation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Independent,
    Linear,
    Quadratic,
    Sinusoid,
    Wshaped,
}

impl ScenarioArg {
    fn to_scenario(self) -> Scenario {
        match self {
            ScenarioArg::Independent => Scenario::Independent,
            ScenarioArg::Linear => Scenario::Linear,
            ScenarioArg::Quadratic => Scenario::Quadratic,
            ScenarioArg::Sinusoid => Scenario::Sinusoid,
            ScenarioArg::Wshaped => Scenario::WShaped,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ScenarioArg::Independent => "independent",
            ScenarioArg::Linear => "linear",
            ScenarioArg::Quadratic => "quadratic",
            ScenarioArg::Sinusoid => "sinusoid",
            ScenarioArg::Wshaped => "wshaped",
        }
    }
}

#[derive(Parser)]
#[command(
    name = "xisym",
    version,
    about = "Symmetrized rank correlation: estimators, independence tests, exact null moments and simulation studies",
    long_about = None
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the rank correlation of a two-column CSV (use '-' for stdin).
    Xi {
        input: String,
        /// Report a single direction in addition to both and their maximum.
        #[arg(long, value_enum)]
        direction: Option<DirectionArg>,
        #[arg(long, value_enum, default_value = "reject")]
        ties: TiesArg,
        /// Seed for random tie breaking (only with --ties random).
        #[arg(long, default_value_t = 0)]
        tie_seed: u64,
        /// Treat the first row as data even if it does not parse.
        #[arg(long)]
        no_header: bool,
    },
    /// Run an independence test on a two-column CSV.
    Test {
        input: String,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Replicates for --method permutation.
        #[arg(long, default_value_t = 5000)]
        permutations: usize,
        /// RNG seed (echoed in the output envelope).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "reject")]
        ties: TiesArg,
        #[arg(long, default_value_t = 0)]
        tie_seed: u64,
        #[arg(long)]
        no_header: bool,
    },
    /// Emit the exact per-n null moment table as CSV.
    Moments {
        #[arg(long = "n-min")]
        n_min: usize,
        #[arg(long = "n-max")]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo moment estimates next to the closed forms, as CSV.
    SimulateMoments {
        /// Comma-separated sample sizes.
        #[arg(long = "n", value_delimiter = ',', default_values_t = vec![4usize, 6, 10, 20, 50])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 100_000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// P-value bias study against a permutation reference, as CSV.
    SimulateBias {
        #[arg(long, value_enum, default_value = "independent")]
        scenario: ScenarioArg,
        /// Comma-separated sample sizes.
        #[arg(long = "n", value_delimiter = ',', default_values_t = vec![10usize, 20, 30, 40, 50])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        #[arg(long, default_value_t = 5000)]
        permutations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare closed-form moments against exhaustive enumeration (n <= 8).
    Oracle {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Serialize)]
struct Envelope<I: Serialize, R: Serialize> {
    command: &'static str,
    inputs: I,
    result: R,
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

fn print_envelope<I: Serialize, R: Serialize>(envelope: &Envelope<I, R>) {
    println!(
        "{}",
        serde_json::to_string_pretty(envelope).expect("envelope serializes")
    );
}

#[derive(Serialize)]
struct DataInputs {
    path: String,
    n: usize,
    ties: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    direction: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    permutations: Option<usize>,
}

#[derive(Serialize)]
struct XiResultJson {
    xi_xy: f64,
    xi_yx: f64,
    xi_sym: f64,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    xi: Option<f64>,
}

#[derive(Serialize)]
struct NullParamsJson {
    location: f64,
    scale: f64,
    shape: f64,
}

#[derive(Serialize)]
struct TestResultJson {
    statistic: f64,
    xi_xy: f64,
    xi_yx: f64,
    xi_sym: f64,
    n: usize,
    method: &'static str,
    p_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    null_params: Option<NullParamsJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    permutations: Option<usize>,
}

fn ties_label(ties: TiesArg) -> &'static str {
    match ties {
        TiesArg::Reject => "reject",
        TiesArg::Random => "random",
    }
}

fn tie_policy(ties: TiesArg, tie_seed: u64) -> TiePolicy {
    match ties {
        TiesArg::Reject => TiePolicy::Reject,
        TiesArg::Random => TiePolicy::RandomBreak { seed: tie_seed },
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Xi {
            input,
            direction,
            ties,
            tie_seed,
            no_header,
        } => cmd_xi(&input, direction, ties, tie_seed, no_header),
        Command::Test {
            input,
            method,
            permutations,
            seed,
            ties,
            tie_seed,
            no_header,
        } => cmd_test(&input, method, permutations, seed, ties, tie_seed, no_header),
        Command::Moments { n_min, n_max, out } => cmd_moments(n_min, n_max, &out),
        Command::SimulateMoments { n, reps, seed, out } => {
            cmd_simulate_moments(&n, reps, seed, &out)
        }
        Command::SimulateBias {
            scenario,
            n,
            runs,
            permutations,
            seed,
            out,
        } => cmd_simulate_bias(scenario, &n, runs, permutations, seed, &out),
        Command::Oracle { n } => cmd_oracle(n),
    }
}

fn cmd_xi(
    input: &str,
    direction: Option<DirectionArg>,
    ties: TiesArg,
    tie_seed: u64,
    no_header: bool,
) -> Result<(), CliError> {
    let sample = read_dataset(input, no_header)?;
    let policy = tie_policy(ties, tie_seed);
    let sym = xi_sym(&sample, policy)?;
    let xi = direction.map(|d| match d.to_direction() {
        Direction::XY => sym.xi_xy,
        Direction::YX => sym.xi_yx,
    });
    print_envelope(&Envelope {
        command: "xi",
        inputs: DataInputs {
            path: input.to_string(),
            n: sample.n(),
            ties: ties_label(ties),
            direction: direction.map(|d| match d {
                DirectionArg::Xy => "xy",
                DirectionArg::Yx => "yx",
            }),
            method: None,
            permutations: None,
        },
        result: XiResultJson {
            xi_xy: sig12(sym.xi_xy),
            xi_yx: sig12(sym.xi_yx),
            xi_sym: sig12(sym.value),
            n: sym.n,
            xi: xi.map(sig12),
        },
        version: VERSION,
        seed: match ties {
            TiesArg::Random => Some(tie_seed),
            TiesArg::Reject => None,
        },
    });
    Ok(())
}

fn test_result_json(result: &TestResult, n: usize) -> TestResultJson {
    TestResultJson {
        statistic: sig12(result.statistic),
        xi_xy: sig12(result.xi_sym.xi_xy),
        xi_yx: sig12(result.xi_sym.xi_yx),
        xi_sym: sig12(result.xi_sym.value),
        n,
        method: match result.method {
            xisym::Method::Asymptotic => "asymptotic",
            xisym::Method::FiniteSample => "finite",
            xisym::Method::Permutation => "permutation",
        },
        p_value: sig12(result.p_value),
        null_params: result.null_params.map(|p| NullParamsJson {
            location: sig12(p.location()),
            scale: sig12(p.scale()),
            shape: sig12(p.shape()),
        }),
        permutations: result.permutations,
    }
}

fn cmd_test(
    input: &str,
    method: MethodArg,
    permutations: usize,
    seed: u64,
    ties: TiesArg,
    tie_seed: u64,
    no_header: bool,
) -> Result<(), CliError> {
    let sample = read_dataset(input, no_header)?;
    let policy = tie_policy(ties, tie_seed);
    let (result, method_name) = match method {
        MethodArg::Asymptotic => (asymptotic_test(&sample, policy)?, "asymptotic"),
        MethodArg::Finite => {
            let r = finite_sample_test(&sample, policy).map_err(|e| match e {
                XiError::SampleTooSmall { n, min } => CliError::Domain(format!(
                    "finite-sample test needs n >= {min}, got n = {n}; use --method permutation instead"
                )),
                other => CliError::from(other),
            })?;
            (r, "finite")
        }
        MethodArg::Permutation => {
            if permutations < 1 {
                return Err(CliError::Usage(
                    "--permutations must be at least 1".to_string(),
                ));
            }
            (
                permutation_test(&sample, permutations, seed, policy)?,
                "permutation",
            )
        }
    };
    print_envelope(&Envelope {
        command: "test",
        inputs: DataInputs {
            path: input.to_string(),
            n: sample.n(),
            ties: ties_label(ties),
            direction: None,
            method: Some(method_name),
            permutations: result.permutations,
        },
        result: test_result_json(&result, sample.n()),
        version: VERSION,
        seed: result.seed,
    });
    Ok(())
}

fn cmd_moments(n_min: usize, n_max: usize, out: &Option<PathBuf>) -> Result<(), CliError> {
    if n_min < 4 || n_min > n_max {
        return Err(CliError::Usage(format!(
            "need 4 <= n-min <= n-max, got n-min = {n_min}, n-max = {n_max}"
        )));
    }
    let mut csv = String::from("n,var,cov,rho,alpha\n");
    for n in n_min..=n_max {
        let m = finite_moments(n).map_err(|e| CliError::Domain(e.to_string()))?;
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            n,
            fmt12(m.var),
            fmt12(m.cov),
            fmt12(m.rho),
            fmt12(m.alpha)
        ));
    }
    write_output(out, &csv)
}

fn cmd_simulate_moments(
    sizes: &[usize],
    reps: usize,
    seed: u64,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    if reps < 2 {
        return Err(CliError::Usage("--reps must be at least 2".to_string()));
    }
    for &n in sizes {
        if n < 4 {
            return Err(CliError::Usage(format!(
                "--n values must be at least 4 (covariance closed form), got {n}"
            )));
        }
    }
    let mut csv = String::from("n,var_hat,se_var,cov_hat,se_cov,var_closed,cov_closed\n");
    for &n in sizes {
        let est = mc_moments(n, reps, seed);
        let m = finite_moments(n).map_err(|e| CliError::Domain(e.to_string()))?;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            n,
            fmt12(est.var_hat),
            fmt12(est.se_var),
            fmt12(est.cov_hat),
            fmt12(est.se_cov),
            fmt12(m.var),
            fmt12(m.cov)
        ));
    }
    write_output(out, &csv)?;
    eprintln!("seed: {seed}");
    Ok(())
}

fn bias_rows(csv: &mut String, scenario: &str, n: usize, records: &[BiasRecord]) {
    for r in records {
        csv.push_str(&format!(
            "run,{scenario},{n},{},{},{},{},{},{}\n",
            r.run_index,
            fmt12(r.p_asymptotic),
            fmt12(r.p_finite),
            fmt12(r.p_permutation),
            fmt12(r.bias_asymptotic),
            fmt12(r.bias_finite)
        ));
    }
    let collect = |f: fn(&BiasRecord) -> f64| -> Vec<f64> { records.iter().map(f).collect() };
    csv.push_str(&format!(
        "median,{scenario},{n},,{},{},{},{},{}\n",
        fmt12(xisym::median(&collect(|r| r.p_asymptotic))),
        fmt12(xisym::median(&collect(|r| r.p_finite))),
        fmt12(xisym::median(&collect(|r| r.p_permutation))),
        fmt12(xisym::median(&collect(|r| r.bias_asymptotic))),
        fmt12(xisym::median(&collect(|r| r.bias_finite)))
    ));
}

fn cmd_simulate_bias(
    scenario: ScenarioArg,
    sizes: &[usize],
    runs: usize,
    permutations: usize,
    seed: u64,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    if runs < 1 || permutations < 1 {
        return Err(CliError::Usage(
            "--runs and --permutations must be at least 1".to_string(),
        ));
    }
    for &n in sizes {
        if n < 4 {
            return Err(CliError::Usage(format!(
                "--n values must be at least 4 (finite-sample test), got {n}"
            )));
        }
    }
    let mut csv = String::from(
        "kind,scenario,n,run_index,p_asymptotic,p_finite,p_permutation,bias_asymptotic,bias_finite\n",
    );
    for &n in sizes {
        let config = SimConfig {
            scenario: scenario.to_scenario(),
            n,
            runs,
            permutations,
            seed,
        };
        let records = xisym::bias_study(&config).map_err(|e| CliError::Domain(e.to_string()))?;
        bias_rows(&mut csv, scenario.name(), n, &records);
    }
    write_output(out, &csv)?;
    eprintln!("seed: {seed}");
    Ok(())
}

fn cmd_oracle(n: usize) -> Result<(), CliError> {
    if !(2..=8).contains(&n) {
        return Err(CliError::Usage(format!(
            "--n must be between 2 and 8 for exhaustive enumeration, got {n}"
        )));
    }
    let summary = enumerate_null(n).map_err(|e| CliError::Domain(e.to_string()))?;
    let enum_mean = summary.mean_xi_f64();
    let enum_var = summary.var_sqrtn_f64();
    let enum_cov = summary.cov_sqrtn_f64();

    let closed_var = xisym::var_sqrtn_xi(n).map_err(|e| CliError::Domain(e.to_string()))?;
    let closed_cov = if n >= 4 { Some(cov_sqrtn_xi(n).unwrap()) } else { None };

    let mut table = format!(
        "closed form vs enumeration over all {n}! = {} permutations\n",
        (1..=n as u64).product::<u64>()
    );
    table.push_str(&format!(
        "{:<14} {:>22} {:>22} {:>22}\n",
        "quantity", "closed_form", "enumeration", "abs_delta"
    ));
    let mut push_row = |name: &str, closed: Option<f64>, enumerated: f64| match closed {
        Some(c) => table.push_str(&format!(
            "{:<14} {:>22} {:>22} {:>22}\n",
            name,
            fmt12(c),
            fmt12(enumerated),
            fmt12((c - enumerated).abs())
        )),
        None => table.push_str(&format!(
            "{:<14} {:>22} {:>22} {:>22}\n",
            name,
            "n/a",
            fmt12(enumerated),
            "n/a"
        )),
    };
    push_row("mean_xi", Some(0.0), enum_mean);
    push_row("var_sqrtn_xi", Some(closed_var), enum_var);
    push_row("cov_sqrtn_xi", closed_cov, enum_cov);
    print!("{table}");
    Ok(())
}
