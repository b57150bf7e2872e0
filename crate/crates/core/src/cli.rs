//! The `cablekin` command-line tool: dataset generation, training,
//! quantization, C emission, inference and kinematics checks as one binary.
//!
//! Exit codes: 0 on success, 2 for usage, I/O and parse problems (including
//! out-of-workspace inputs), 3 for numeric failures such as training
//! divergence or inconsistent cable lengths. `roundtrip` exits 1 when the
//! forward/inverse error exceeds its tolerance.
//!
//! `CABLEKIN_THREADS` caps the number of worker threads for dataset
//! generation; 0 or 1 keeps everything on one thread. Output bytes are
//! identical for any setting.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::datagen::{
    self, Dataset, DatagenError, GridSpec, DEFAULT_SPLIT_SEED, DEFAULT_TEST_FRACTION,
};
use crate::eval::{self, Candidate, EvalError, ModelKind};
use crate::kinematics::{KinematicsError, Point3, Rig, RobotBox, DEFAULT_FK_TOL};
use crate::model::{self, ModelError, TrainConfig};
use crate::quant::{self, AnyModel, ModelBlob, QuantError};

pub const THREADS_ENV: &str = "CABLEKIN_THREADS";

/// Parses the process arguments and runs the selected subcommand.
pub fn run() -> i32 {
    run_with_args(std::env::args_os())
}

/// Same as [`run`] but with explicit arguments, for tests.
pub fn run_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Train(args) => cmd_train(args),
        Command::Quantize(args) => cmd_quantize(args),
        Command::EmitC(args) => cmd_emit_c(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Infer(args) => cmd_infer(args),
        Command::Roundtrip(args) => cmd_roundtrip(args),
    }
}

#[derive(Parser)]
#[command(
    name = "cablekin",
    version,
    about = "Four-cable suspended robot: kinematics, data generation, training, quantization and edge-style inference"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the grid dataset and write it as CSV.
    Generate(GenerateArgs),
    /// Print per-output distribution statistics of a dataset.
    Stats(StatsArgs),
    /// Train the network (or the linear baseline) on a dataset.
    Train(TrainArgs),
    /// Quantize a float model blob to 8-bit weights.
    Quantize(QuantizeArgs),
    /// Render a model blob as a C byte-array source file.
    EmitC(EmitCArgs),
    /// Compare model blobs on a test split and write a report.
    Eval(EvalArgs),
    /// Predict the four motor rotations for one target position.
    Infer(InferArgs),
    /// Check the forward/inverse kinematics round trip on random rigs.
    Roundtrip(RoundtripArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// First cube side length (B = D = H) of the half-open side range.
    #[arg(long, default_value_t = 1.0)]
    side_start: f64,
    /// End of the side range (excluded).
    #[arg(long, default_value_t = 4.0)]
    side_stop: f64,
    /// Side range step.
    #[arg(long, default_value_t = 0.5)]
    side_step: f64,
    /// Winch radii; the full point grid is generated once per radius.
    #[arg(long = "R", value_delimiter = ',', default_values_t = [0.008, 0.010])]
    radii: Vec<f64>,
    /// Grid step for x, y and z.
    #[arg(long = "step", default_value_t = 0.5)]
    point_step: f64,
    /// Use the full-size grid (sides 1..7 step 0.5, radii 8/9/10 mm).
    #[arg(long, conflicts_with_all = ["side_start", "side_stop", "side_step", "radii", "point_step"])]
    full_scale: bool,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 20)]
    bins: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Baseline {
    Linear,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    /// Where to write the trained float model blob.
    #[arg(long, required_unless_present = "baseline")]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 256)]
    batch_size: usize,
    #[arg(long = "lr", default_value_t = 1e-3)]
    learning_rate: f64,
    /// Seed for the train/test split, weight init and batch shuffling.
    #[arg(long, default_value_t = DEFAULT_SPLIT_SEED)]
    seed: u64,
    /// Hidden layer widths.
    #[arg(long, value_delimiter = ',', default_values_t = [64usize, 64, 64])]
    hidden: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_TEST_FRACTION)]
    test_fraction: f64,
    /// Fit a closed-form baseline instead of the network and print its
    /// metrics; no blob is written.
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
}

#[derive(Args)]
struct QuantizeArgs {
    #[arg(long)]
    model_in: PathBuf,
    #[arg(long)]
    model_out: PathBuf,
}

#[derive(Args)]
struct EmitCArgs {
    #[arg(long)]
    model_in: PathBuf,
    /// C identifier for the emitted array.
    #[arg(long, default_value = "g_cablekin_model")]
    symbol: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Model blobs to evaluate next to the reference rows.
    #[arg(long = "models", num_args = 1.., required = true)]
    models: Vec<PathBuf>,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TEST_FRACTION)]
    test_fraction: f64,
    #[arg(long, default_value_t = DEFAULT_SPLIT_SEED)]
    seed: u64,
    /// Also fit and evaluate the linear baseline on the same split.
    #[arg(long)]
    with_linear: bool,
    /// Where to write the machine-readable comparison.
    #[arg(long, default_value = "comparison.csv")]
    out: PathBuf,
    /// Directory for residual scatter and error histogram files.
    #[arg(long)]
    residuals_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    bins: usize,
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    model: PathBuf,
    /// Also print the exact rotations from the kinematics and the
    /// absolute prediction errors.
    #[arg(long)]
    exact: bool,
    x: f64,
    y: f64,
    z: f64,
    #[arg(value_name = "B")]
    breadth: f64,
    #[arg(value_name = "D")]
    depth: f64,
    #[arg(value_name = "H")]
    height: f64,
    #[arg(value_name = "R")]
    radius: f64,
}

#[derive(Args)]
struct RoundtripArgs {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

/// A command failure carrying its process exit code.
struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<KinematicsError> for Failure {
    fn from(e: KinematicsError) -> Self {
        let code = match e {
            KinematicsError::InfeasibleRotation { .. }
            | KinematicsError::InconsistentLengths(_)
            | KinematicsError::SingularGeometry(_) => 3,
            _ => 2,
        };
        fail(code, e.to_string())
    }
}

impl From<DatagenError> for Failure {
    fn from(e: DatagenError) -> Self {
        match e {
            DatagenError::Kinematics(k) => k.into(),
            other => fail(2, other.to_string()),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let code = match e {
            ModelError::Divergence { .. }
            | ModelError::SingularFit
            | ModelError::UndefinedR2 { .. } => 3,
            _ => 2,
        };
        fail(code, e.to_string())
    }
}

impl From<QuantError> for Failure {
    fn from(e: QuantError) -> Self {
        fail(2, e.to_string())
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Model(m) => m.into(),
            other => fail(2, other.to_string()),
        }
    }
}

fn worker_threads() -> Result<usize, Failure> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|n| n.max(1))
            .map_err(|_| fail(2, format!("{THREADS_ENV}='{v}' is not a thread count"))),
        Err(_) => Ok(1),
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Failure> {
    let spec = if args.full_scale {
        GridSpec::full_scale()
    } else {
        GridSpec {
            side_start: args.side_start,
            side_stop: args.side_stop,
            side_step: args.side_step,
            radii: args.radii,
            point_step: args.point_step,
        }
    };
    let threads = worker_threads()?;
    let ds = datagen::generate_with_threads(&spec, threads)?;
    ds.save(&args.out)?;
    println!("wrote {} rows to {}", ds.len(), args.out.display());
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<(), Failure> {
    let ds = Dataset::load(&args.data)?;
    let report = datagen::stats(&ds, args.bins)?;
    print!("{report}");
    Ok(())
}

fn load_and_split(
    data: &Path,
    test_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset), Failure> {
    let ds = Dataset::load(data)?;
    Ok(datagen::split(&ds, test_fraction, seed)?)
}

fn cmd_train(args: TrainArgs) -> Result<(), Failure> {
    let (train_set, test_set) = load_and_split(&args.data, args.test_fraction, args.seed)?;
    println!(
        "{} train rows, {} test rows",
        train_set.len(),
        test_set.len()
    );

    if args.baseline == Some(Baseline::Linear) {
        let lin = model::fit_linear(&train_set)?;
        let train_metrics = model::evaluate(|f| lin.predict(f), &train_set)?;
        let test_metrics = model::evaluate(|f| lin.predict(f), &test_set)?;
        println!("linear baseline, train split:\n{train_metrics}");
        println!("linear baseline, test split:\n{test_metrics}");
        return Ok(());
    }

    let cfg = TrainConfig {
        epochs: args.epochs,
        batch_size: args.batch_size,
        learning_rate: args.learning_rate,
        seed: args.seed,
        hidden_dims: args.hidden.clone(),
    };
    let mut net = model::init_mlp(&cfg.hidden_dims, cfg.seed)?;
    let report = model::train(&mut net, &train_set, &cfg)?;
    println!(
        "trained {} epochs, final train loss {:.6}",
        report.epoch_loss.len(),
        report.epoch_loss.last().unwrap()
    );
    let train_metrics = model::evaluate(|f| net.forward(f), &train_set)?;
    let test_metrics = model::evaluate(|f| net.forward(f), &test_set)?;
    println!("train split:\n{train_metrics}");
    println!("test split:\n{test_metrics}");

    let out = args.out.expect("clap enforces --out without --baseline");
    let blob = quant::serialize_float(&net);
    blob.write_file(&out)?;
    println!("wrote float model blob ({} bytes) to {}", blob.len(), out.display());
    Ok(())
}

fn cmd_quantize(args: QuantizeArgs) -> Result<(), Failure> {
    let blob_in = ModelBlob::read_file(&args.model_in)?;
    let model = quant::deserialize(&blob_in)?;
    let blob_out = match model {
        AnyModel::Quantized(_) => {
            println!("input is already quantized; copying unchanged");
            blob_in.clone()
        }
        AnyModel::Float(m) => quant::serialize_quantized(&quant::quantize(&m)?),
    };
    blob_out.write_file(&args.model_out)?;
    println!(
        "input blob {} bytes, output blob {} bytes ({:.2}x smaller)",
        blob_in.len(),
        blob_out.len(),
        blob_in.len() as f64 / blob_out.len() as f64
    );
    Ok(())
}

fn cmd_emit_c(args: EmitCArgs) -> Result<(), Failure> {
    let blob = ModelBlob::read_file(&args.model_in)?;
    quant::deserialize(&blob)?; // reject non-model bytes before emitting
    let text = quant::emit_c_source(&blob, &args.symbol)?;
    std::fs::write(&args.out, &text).map_err(QuantError::from)?;
    println!(
        "emitted {} bytes as '{}' to {}",
        blob.len(),
        args.symbol,
        args.out.display()
    );
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), Failure> {
    let (train_set, test_set) = load_and_split(&args.data, args.test_fraction, args.seed)?;

    let mut loaded: Vec<(String, AnyModel)> = Vec::new();
    for path in &args.models {
        let blob = ModelBlob::read_file(path)?;
        let model = quant::deserialize(&blob)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        loaded.push((name, model));
    }
    let linear = if args.with_linear {
        Some(model::fit_linear(&train_set)?)
    } else {
        None
    };

    let mut candidates: Vec<Candidate> = loaded
        .iter()
        .map(|(name, model)| {
            let kind = if model.is_quantized() {
                ModelKind::NnQuantized
            } else {
                ModelKind::NnFloat
            };
            Candidate::new(name, kind, move |f| model.predict(f))
        })
        .collect();
    if let Some(lin) = &linear {
        candidates.push(Candidate::new(
            "linear regression",
            ModelKind::LinearRegression,
            move |f| lin.predict(f),
        ));
    }

    let (report, metrics) = eval::compare(&candidates, &test_set)?;
    print!("{report}");
    report.write_csv(&args.out)?;
    println!("wrote comparison to {}", args.out.display());

    if let Some(dir) = &args.residuals_dir {
        std::fs::create_dir_all(dir).map_err(EvalError::from)?;
        for (candidate, m) in candidates.iter().zip(&metrics) {
            let prefix: String = candidate
                .name
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
                .collect();
            let summary = eval::error_report(m, args.bins, dir, &prefix)?;
            println!(
                "{}: error mean {:?}, stddev {:?}",
                candidate.name, summary.mean, summary.stddev
            );
        }
        println!("wrote residual reports to {}", dir.display());
    }
    Ok(())
}

fn cmd_infer(args: InferArgs) -> Result<(), Failure> {
    let blob = ModelBlob::read_file(&args.model)?;
    let model = quant::deserialize(&blob)?;
    let rig = Rig::with_uniform_radius(args.breadth, args.depth, args.height, args.radius)?;
    let target = Point3::new(args.x, args.y, args.z);
    // Validates the target against the workspace whether or not the exact
    // column was requested.
    let exact = rig.target_to_rotations(target)?;

    let features = [
        args.x,
        args.y,
        args.z,
        args.breadth,
        args.depth,
        args.height,
        args.radius,
    ];
    let predicted = model.predict(&features);

    if args.exact {
        println!("{:<8} {:>14} {:>14} {:>12}", "output", "predicted", "exact", "|error|");
        for (j, (p, e)) in predicted.iter().zip(exact.values()).enumerate() {
            println!(
                "theta{j:<3} {p:>14.6} {e:>14.6} {:>12.6}",
                (p - e).abs()
            );
        }
    } else {
        println!("{:<8} {:>14}", "output", "predicted");
        for (j, p) in predicted.iter().enumerate() {
            println!("theta{j:<3} {p:>14.6}");
        }
    }
    Ok(())
}

fn cmd_roundtrip(args: RoundtripArgs) -> Result<(), Failure> {
    if args.trials == 0 {
        return Err(fail(2, "--trials must be at least 1"));
    }
    let max_err = roundtrip_max_error(args.trials, args.seed)?;
    println!(
        "max forward/inverse round-trip error over {} trials (point + box): {max_err:.3e}",
        args.trials
    );
    if max_err > 1e-9 {
        return Err(fail(1, format!("round-trip error {max_err:.3e} exceeds 1e-9")));
    }
    Ok(())
}

/// Worst per-coordinate round-trip error over seeded random rigs, for both
/// the point robot and a random box robot. Targets keep a small margin below
/// the top plane, where height recovery degenerates for any solver.
pub fn roundtrip_max_error(trials: usize, seed: u64) -> Result<f64, KinematicsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err = 0.0f64;
    for _ in 0..trials {
        let b = rng.random_range(1.0..7.0);
        let d = rng.random_range(1.0..7.0);
        let h = rng.random_range(1.0..7.0);
        let radius = rng.random_range(0.005..0.02);
        let rig = Rig::with_uniform_radius(b, d, h, radius)?;

        let p = Point3::new(
            rng.random_range(0.0..b),
            rng.random_range(0.0..d),
            rng.random_range(0.0..0.999 * h),
        );
        let lengths = rig.inverse_lengths(p)?;
        let back = rig.forward_position(lengths, DEFAULT_FK_TOL)?;
        max_err = max_err
            .max((back.x - p.x).abs())
            .max((back.y - p.y).abs())
            .max((back.z - p.z).abs());

        let bx = RobotBox::new(
            rng.random_range(0.0..0.2 * b),
            rng.random_range(0.0..0.2 * d),
            rng.random_range(0.0..0.2 * h),
        )?;
        let q = Point3::new(
            rng.random_range(bx.half_breadth()..b - bx.half_breadth()),
            rng.random_range(bx.half_depth()..d - bx.half_depth()),
            rng.random_range(0.0..0.999 * (h - bx.height())),
        );
        let lengths = rig.box_inverse_lengths(&bx, q)?;
        let back = rig.box_forward_position(&bx, lengths, DEFAULT_FK_TOL)?;
        max_err = max_err
            .max((back.x - q.x).abs())
            .max((back.y - q.y).abs())
            .max((back.z - q.z).abs());
    }
    Ok(max_err)
}
