use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "unso", version, about = "Unified Newton-Schulz orthogonalization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit UNSO coefficients (or a root-form step schedule) and write them to a file.
    Train(TrainArgs),
    /// Orthogonalize a matrix file.
    Ortho(OrthoArgs),
    /// Emit scalar curves of methods or of the term family as CSV.
    Curve(CurveArgs),
    /// Error/FLOPs table over shapes, methods and seeds as CSV.
    Bench(BenchArgs),
    /// Measured FLOPs next to the closed-form model for one method and shape.
    Flops(FlopsArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Polynomial order N.
    #[arg(long, default_value_t = 14)]
    pub n: usize,
    #[arg(long, default_value_t = 20_000)]
    pub epochs: usize,
    /// Initial learning rate [default: 0.1, or 0.001 with --schedule-steps].
    #[arg(long)]
    pub lr: Option<f64>,
    /// Overridden by UNSO_SEED when set.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// exact | approx | alg1-abs
    #[arg(long = "b-rule", default_value = "exact")]
    pub b_rule: String,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Lower end of the open sampling interval.
    #[arg(long = "sample-low", default_value_t = 0.0)]
    pub sample_low: f64,
    /// Train T root-form quintic steps instead of UNSO coefficients.
    #[arg(long = "schedule-steps")]
    pub schedule_steps: Option<usize>,
    /// Coefficient (or schedule) file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Loss history CSV [default: <out>.loss.csv].
    #[arg(long = "loss-csv")]
    pub loss_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MethodOpts {
    /// Iterations for original/muon (defaults 8 and 5).
    #[arg(long)]
    pub iters: Option<usize>,
    /// gram | plain | gelfand:K [default: gram for unso, plain otherwise].
    #[arg(long)]
    pub scaling: Option<String>,
    /// Quintic step evaluation: expanded | gram.
    #[arg(long, default_value = "expanded")]
    pub grouping: String,
}

#[derive(Debug, Args)]
pub struct OrthoArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output matrix file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// name[:paramfile] with name in unso, original, muon, cesista, external.
    #[arg(long, default_value = "unso")]
    pub method: String,
    /// Coefficient or schedule file, same as the method's :paramfile.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    #[command(flatten)]
    pub opts: MethodOpts,
    /// Check the scaled spectrum with the SVD oracle and warn if out of range.
    #[arg(long)]
    pub validate: bool,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Comma-separated methods, each name[:paramfile].
    #[arg(long, default_value = "original,muon,cesista,unso")]
    pub methods: String,
    #[arg(long, default_value_t = 2000)]
    pub points: usize,
    #[arg(long, default_value_t = 0.0005)]
    pub low: f64,
    /// Emit the term family k=1..N instead of method curves.
    #[arg(long)]
    pub terms: Option<u32>,
    /// Term exponent growth: exp | linear.
    #[arg(long, default_value = "exp")]
    pub growth: String,
    /// Divide each term column by its peak value.
    #[arg(long)]
    pub normalized: bool,
    #[command(flatten)]
    pub opts: MethodOpts,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated HxW shapes.
    #[arg(long, default_value = "128x128,128x512,128x1024")]
    pub shapes: String,
    #[arg(long, default_value = "original,muon,cesista,unso")]
    pub methods: String,
    /// Number of seeds per cell.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    /// First seed; overridden by UNSO_SEED when set.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub opts: MethodOpts,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FlopsArgs {
    #[arg(long, default_value = "unso")]
    pub method: String,
    #[arg(long, default_value = "128x512")]
    pub shape: String,
    /// UNSO order when no coefficient file is given.
    #[arg(long, default_value_t = 14)]
    pub n: usize,
    /// Overridden by UNSO_SEED when set.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub opts: MethodOpts,
}
