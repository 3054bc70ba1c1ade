use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use geosep::bench::{run_bench, BenchConfig, Classifier};
use geosep::instances::{gen_cholesky_pair, InstancePair};
use geosep::io::read_cloud;
use geosep::oracle::{align_exhaustive, align_frames, AlignmentResult, MAX_EXHAUSTIVE_N};
use geosep::selftest::{run_selftest, SelftestOptions};
use geosep::test_kind::{FeatureMap, TestKind};
use geosep::{GeoError, GroupKind, PsiKind, Seed};

const EXIT_USAGE: u8 = 1;
const EXIT_COMPUTE: u8 = 2;
const EXIT_SELFTEST: u8 = 3;

/// Separating invariants, congruence oracle and hard-pair benchmark for point clouds.
#[derive(Parser, Debug)]
#[command(name = "geosep", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Scalar multiset map inside every embedding
    #[arg(long, global = true, default_value = "sort", value_parser = parse_from_str::<PsiKind>)]
    psi: PsiKind,
    /// Root seed for embedding parameters and sampling
    #[arg(long, global = true, env = "GEOSEP_SEED", default_value_t = 0)]
    seed: u64,
    /// Relative feature gap above which two clouds count as separated
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Worker threads (default: all cores); results do not depend on it
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a benchmark pair
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Compute the invariant feature of one cloud
    Feature {
        /// Cloud file
        input: PathBuf,
        #[command(flatten)]
        test: TestArgs,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a test separates the two clouds of a pair
    Compare {
        /// Pair file
        pair: PathBuf,
        #[command(flatten)]
        test: TestArgs,
    },
    /// Exact congruence check by explicit alignment
    Oracle {
        /// Pair file
        pair: PathBuf,
        /// Symmetry group
        #[arg(long, default_value = "so", value_parser = parse_from_str::<GroupKind>)]
        group: GroupKind,
        /// Search strategy; auto uses exhaustive for n ≤ 8 and frames otherwise
        #[arg(long, default_value = "auto", value_parser = ["auto", "exhaustive", "frames"])]
        method: String,
    },
    /// Noisy-sample classification benchmark against the two prototypes
    Bench {
        /// Pair file
        pair: PathBuf,
        #[command(flatten)]
        test: TestArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Standard deviation of the per-coordinate noise
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
        /// Also translate every sample
        #[arg(long)]
        translate: bool,
        #[arg(long, default_value = "lda", value_parser = parse_from_str::<Classifier>)]
        classifier: Classifier,
        /// Calibration samples per class for the lda classifier
        #[arg(long, default_value_t = 50)]
        calibration: usize,
        /// Write the report here as well as to stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run reduced invariant suites
    Selftest {
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Override the invariance tolerance (for checking that failures are reported)
        #[arg(long, hide = true)]
        debug_invariance_tol: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
enum GenFamily {
    /// One 2N-cycle versus two N-cycles, factored into point clouds
    Cholesky {
        /// N; the clouds have d = n = 2N
        #[arg(long)]
        half: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct TestArgs {
    /// 1geo, 2geo-so, 2geo-o, dgeo, 3wl or geoegnn
    #[arg(long, value_parser = parse_from_str::<TestKind>)]
    test: TestKind,
    /// Group for dgeo, geoegnn and bench sampling
    #[arg(long, alias = "variant", default_value = "so", value_parser = parse_from_str::<GroupKind>)]
    group: GroupKind,
}

fn parse_from_str<T>(s: &str) -> Result<T, String>
where
    T: std::str::FromStr<Err = GeoError>,
{
    s.parse().map_err(|e: GeoError| e.to_string())
}

fn read_pair_file(path: &Path) -> geosep::Result<InstancePair> {
    let text = std::fs::read_to_string(path)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("pair");
    InstancePair::from_text(&text, stem)
}

fn emit(text: &str, out: Option<&Path>) -> geosep::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn describe(r: &AlignmentResult, method: &str) -> String {
    let mut s = format!(
        "{}\nmethod: {method}\nresidual: {:e}\n",
        if r.equivalent {
            "EQUIVALENT"
        } else {
            "INEQUIVALENT"
        },
        r.residual
    );
    if let Some(w) = &r.witness {
        let det = if w.rotation().determinant() > 0.0 {
            "+1"
        } else {
            "-1"
        };
        s.push_str(&format!(
            "witness: det {det}, perm {:?}, translation {:?}\n",
            w.perm(),
            w.translation()
        ));
    }
    s
}

fn run(cli: Cli) -> Result<ExitCode, GeoError> {
    let g = &cli.global;
    let seed = Seed(g.seed);
    match cli.command {
        Command::Gen {
            family: GenFamily::Cholesky { half, out },
        } => {
            let pair = gen_cholesky_pair(half)?;
            let text = pair.to_text(&[
                format!("generator: cholesky half={half}"),
                format!("seed: {}", g.seed),
            ]);
            std::fs::write(&out, text)?;
            eprintln!(
                "wrote {} ({}×{} clouds)",
                out.display(),
                pair.x.dim(),
                pair.x.len()
            );
        }
        Command::Feature { input, test, out } => {
            let x = read_cloud(&input)?;
            let map = FeatureMap::new(test.test, x.dim(), x.len(), test.group, g.psi, seed)?;
            emit(&map.compute(&x)?.to_text(), out.as_deref())?;
        }
        Command::Compare { pair, test } => {
            let pair = read_pair_file(&pair)?;
            let map = FeatureMap::new(
                test.test,
                pair.x.dim(),
                pair.x.len(),
                test.group,
                g.psi,
                seed,
            )?;
            let gap = map.compute(&pair.x)?.relative_gap(&map.compute(&pair.y)?);
            let verdict = if gap > g.tol {
                "SEPARATED"
            } else {
                "NOT-SEPARATED"
            };
            println!("{verdict}\nrelative_gap: {gap:e}");
        }
        Command::Oracle {
            pair,
            group,
            method,
        } => {
            let pair = read_pair_file(&pair)?;
            let method = match method.as_str() {
                "auto" if pair.x.len() <= MAX_EXHAUSTIVE_N => "exhaustive",
                "auto" => "frames",
                m => m,
            };
            let r = if method == "exhaustive" {
                align_exhaustive(&pair.x, &pair.y, group, g.tol)?
            } else {
                align_frames(&pair.x, &pair.y, group, g.tol)?
            };
            print!("{}", describe(&r, method));
        }
        Command::Bench {
            pair,
            test,
            samples,
            sigma,
            translate,
            classifier,
            calibration,
            out,
        } => {
            let pair = read_pair_file(&pair)?;
            let cfg = BenchConfig {
                test: test.test,
                samples,
                sigma,
                seed,
                tol: g.tol,
                psi: g.psi,
                group: test.group,
                translate,
                classifier,
                calibration,
            };
            let report = format!("{}\n", run_bench(&pair, &cfg)?);
            print!("{report}");
            if let Some(p) = out {
                std::fs::write(p, &report)?;
            }
        }
        Command::Selftest {
            trials,
            debug_invariance_tol,
        } => {
            let mut opts = SelftestOptions {
                seed,
                trials,
                separation_tol: g.tol,
                ..Default::default()
            };
            if let Some(t) = debug_invariance_tol {
                opts.invariance_tol = t;
            }
            let report = run_selftest(&opts)?;
            println!("{report}");
            if !report.passed() {
                return Ok(ExitCode::from(EXIT_SELFTEST));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.global.threads {
        if n == 0 {
            eprintln!("error: --threads must be ≥ 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_COMPUTE);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_COMPUTE)
        }
    }
}
