use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mwpam_core::pam::{self, ClusterSpec, Clustering};
use mwpam_core::synth::{self, MembershipLayout, SyntheticSpec};
use mwpam_core::tbm::{self, TbmConfig};
use mwpam_core::report;

use crate::error::{exit, CliError};
use crate::format::{format_labels, read_labels, read_tensor, write_tensor};
use crate::run_report::{Method, ReportInputs, RunReport};

#[derive(Debug, Parser)]
#[command(name = "mwpam", version, about = "Medoid-based multiway clustering of dense tensors")]
pub struct Cli {
    /// Worker threads for swap scoring (default: all cores). Results do not
    /// depend on this.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a tensor and write a JSON run report.
    Fit(FitArgs),
    /// Generate a planted-block tensor with its labels and block means.
    Synth(SynthArgs),
    /// Check that a run report is a local optimum of the swap search.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Tensor file.
    #[arg(long)]
    pub input: PathBuf,
    /// Clusters per mode, e.g. `5,5,5`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub clusters: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Method::Pam)]
    pub method: Method,
    /// Seed for the TBM k-means initialization.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Label file for one mode, as `MODE=PATH`. Repeatable.
    #[arg(long = "labels", value_parser = parse_label_arg)]
    pub labels: Vec<(usize, PathBuf)>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include the swap trace (and TBM repairs) in the report.
    #[arg(long)]
    pub trace: bool,
    /// TBM refinement pass cap.
    #[arg(long, default_value_t = TbmConfig::default().max_iters)]
    pub tbm_max_iters: usize,
    /// TBM k-means restarts per mode.
    #[arg(long, default_value_t = TbmConfig::default().kmeans_restarts)]
    pub kmeans_restarts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    Balanced,
    Random,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Tensor dimensions, e.g. `50,50,50`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    /// Clusters per mode.
    #[arg(long, value_delimiter = ',', required = true)]
    pub clusters: Vec<usize>,
    /// Standard deviation of the Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output files are `<prefix>.tensor.txt`, `<prefix>.mode<k>.labels.txt`
    /// and `<prefix>.means.txt`.
    #[arg(long)]
    pub out_prefix: PathBuf,
    /// Tensor file of block means with dims equal to the cluster counts.
    /// Without it the mean of block (l1,..,lK) is (l1+..+lK) * spacing.
    #[arg(long)]
    pub means: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub spacing: f64,
    #[arg(long, value_enum, default_value_t = Layout::Random)]
    pub layout: Layout,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Tensor file the report was computed from.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub clusters: Vec<usize>,
    /// Run report to check.
    #[arg(long)]
    pub report: PathBuf,
    /// Also compare against the exhaustive global optimum.
    #[arg(long)]
    pub global: bool,
    /// Maximum number of configurations the global search may visit.
    #[arg(long, default_value_t = synth::DEFAULT_ENUMERATION_BUDGET)]
    pub budget: u128,
}

fn parse_label_arg(s: &str) -> Result<(usize, PathBuf), String> {
    let (mode, path) = s.split_once('=').ok_or("expected MODE=PATH")?;
    let mode = mode
        .trim()
        .parse()
        .map_err(|_| format!("invalid mode `{mode}`"))?;
    if path.is_empty() {
        return Err("empty path".into());
    }
    Ok((mode, PathBuf::from(path)))
}

/// Runs the parsed command line and returns the process exit code.
/// Diagnostics go to stderr.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.into()).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(CliError::Input(format!("cannot start thread pool: {e}"))),
        },
        None => dispatch(cli.command),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Fit(a) => cmd_fit(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::Verify(a) => cmd_verify(&a),
    }
}

pub fn cmd_fit(a: &FitArgs) -> Result<i32, CliError> {
    let y = read_tensor(&a.input)?;
    let c = ClusterSpec::new(a.clusters.clone())?;
    c.check(y.dims())?;

    let mut labels: Vec<Option<Vec<String>>> = vec![None; y.order()];
    for (mode, path) in &a.labels {
        let Some(slot) = labels.get_mut(*mode) else {
            return Err(CliError::Input(format!(
                "--labels mode {mode} out of range for an order-{} tensor",
                y.order()
            )));
        };
        *slot = Some(read_labels(path, y.dims()[*mode])?);
    }

    let started = Instant::now();
    let cl = match a.method {
        Method::Pam => pam::fit(&y, &c)?,
        Method::Tbm => {
            let cfg = TbmConfig {
                max_iters: a.tbm_max_iters,
                seed: a.seed,
                kmeans_restarts: a.kmeans_restarts,
                ..TbmConfig::default()
            };
            tbm::tbm_fit(&y, &c, &cfg)?
        }
    };
    let eval = report::evaluate(&y, &cl)?;
    let finite = [cl.objective, eval.rmse_m, eval.rmse_c]
        .into_iter()
        .chain(eval.blocks.iter().map(|b| b.centroid_score))
        .all(f64::is_finite);
    if !finite {
        return Err(CliError::Input(format!(
            "{}: values too large, the fit's error metrics overflow f64",
            a.input.display()
        )));
    }
    let wall_time_ms = u64::try_from(started.elapsed().as_millis()).unwrap_or(u64::MAX);

    let rep = RunReport::new(ReportInputs {
        method: a.method,
        dims: y.dims(),
        clustering: &cl,
        eval: &eval,
        with_trace: a.trace,
        labels: &labels,
        seed: a.seed,
        wall_time_ms,
    });
    let json = rep.to_json();
    match &a.out {
        Some(path) => fs::write(path, json).map_err(|e| CliError::io(path, e))?,
        None => std::io::stdout()
            .lock()
            .write_all(json.as_bytes())
            .map_err(|e| CliError::Input(format!("stdout: {e}")))?,
    }
    Ok(exit::OK)
}

/// Paths written by `synth` for a given prefix.
pub fn synth_paths(prefix: &Path, order: usize) -> (PathBuf, Vec<PathBuf>, PathBuf) {
    let with = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    let labels = (0..order).map(|k| with(&format!(".mode{k}.labels.txt"))).collect();
    (with(".tensor.txt"), labels, with(".means.txt"))
}

pub fn cmd_synth(a: &SynthArgs) -> Result<i32, CliError> {
    // every spec problem is an input error here, including bad cluster counts
    let invalid = |e: mwpam_core::Error| CliError::Input(e.to_string());
    let clusters = ClusterSpec::new(a.clusters.clone()).map_err(invalid)?;
    let block_means = match &a.means {
        Some(path) => read_tensor(path)?,
        None => synth::auto_block_means(clusters.counts(), a.spacing).map_err(invalid)?,
    };
    let spec = SyntheticSpec {
        dims: a.dims.clone(),
        clusters,
        block_means,
        noise_sigma: a.sigma,
        seed: a.seed,
        layout: match a.layout {
            Layout::Balanced => MembershipLayout::Balanced,
            Layout::Random => MembershipLayout::Random,
        },
    };
    let planted = synth::generate(&spec).map_err(invalid)?;

    let (tensor_path, label_paths, means_path) = synth_paths(&a.out_prefix, a.dims.len());
    write_tensor(&tensor_path, &planted.tensor)?;
    for (path, labels) in label_paths.iter().zip(&planted.labels) {
        let text = format_labels(&labels.iter().map(usize::to_string).collect::<Vec<_>>());
        fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    }
    write_tensor(&means_path, &spec.block_means)?;
    eprintln!("wrote {}", tensor_path.display());
    Ok(exit::OK)
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<i32, CliError> {
    let y = read_tensor(&a.input)?;
    let c = ClusterSpec::new(a.clusters.clone())?;
    c.check(y.dims())?;
    let text = fs::read_to_string(&a.report).map_err(|e| CliError::io(&a.report, e))?;
    let rep = RunReport::from_json(&text).map_err(|e| {
        CliError::parse(&a.report.display().to_string(), e.line(), e.to_string())
    })?;
    if rep.dims != y.dims() {
        return Err(CliError::Input(format!(
            "report dims {:?} do not match tensor dims {:?}",
            rep.dims,
            y.dims()
        )));
    }
    if rep.c != c.counts() {
        return Err(CliError::Input(format!(
            "report cluster counts {:?} do not match --clusters {:?}",
            rep.c,
            c.counts()
        )));
    }
    let cl = Clustering::from_parts(&y, rep.medoids, rep.memberships)
        .map_err(|e| CliError::Input(format!("{}: {e}", a.report.display())))?;

    let check = synth::verify_local_optimum(&y, &c, &cl)?;
    println!("objective: {}", check.objective);
    if check.objective != rep.objective {
        println!("reported objective: {} (differs from recomputed)", rep.objective);
    }
    println!("swap candidates: {}", check.candidates);
    match &check.best_violation {
        None => println!("local optimum: yes"),
        Some(v) => {
            println!("local optimum: no ({} improving swaps)", check.violations);
            println!(
                "best swap: mode {} out {} in {} objective {}",
                v.mode, v.swapped_out, v.swapped_in, v.objective
            );
        }
    }

    if a.global {
        let g = synth::exhaustive_global_optimum(&y, &c, a.budget)?;
        println!("D_final: {}", check.objective);
        println!("D_global: {}", g.objective);
        println!("gap: {}", check.objective - g.objective);
        println!("configurations: {}", g.configurations);
    }

    Ok(if check.is_local_optimum {
        exit::OK
    } else {
        exit::NOT_LOCAL_OPTIMUM
    })
}
