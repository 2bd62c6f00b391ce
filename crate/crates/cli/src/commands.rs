use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use unso_core::bench::{
    flops_model, gaussian_matrix, ortho_error, run_table, sample_curves, sample_term_curves, uniform_grid,
    write_reports_csv, Growth,
};
use unso_core::densemat::{read_matrix_file, write_matrix};
use unso_core::train::{train as fit, train_cesista, write_loss_csv};
use unso_core::{orthogonalize, BRule, Schedule, TrainConfig};

use crate::args::{BenchArgs, CurveArgs, FlopsArgs, OrthoArgs, TrainArgs};
use crate::methods::{parse_method, parse_methods, parse_shape, parse_shapes};
use crate::Failure;

type CmdResult = Result<(), Failure>;

/// `UNSO_SEED` wins over the flag when set.
fn effective_seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var("UNSO_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("UNSO_SEED={v:?} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

/// Opens `path`, or stdout when absent.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn default_loss_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".loss.csv");
    PathBuf::from(name)
}

pub fn train(a: TrainArgs) -> CmdResult {
    let rule: BRule = a
        .b_rule
        .parse()
        .map_err(|e: unso_core::Error| Failure::usage(e.to_string()))?;
    let base = if a.schedule_steps.is_some() {
        TrainConfig::schedule_defaults()
    } else {
        TrainConfig::default()
    };
    let config = TrainConfig {
        order: a.n,
        rule,
        learning_rate: a.lr.unwrap_or(base.learning_rate),
        epochs: a.epochs,
        samples_per_step: a.samples,
        sample_low: a.sample_low,
        seed: effective_seed(a.seed)?,
        ..base
    };
    config.validate().map_err(|e| Failure::usage(e.to_string()))?;
    let loss_path = a.loss_csv.clone().unwrap_or_else(|| default_loss_path(&a.out));

    let history = match a.schedule_steps {
        Some(0) => return Err(Failure::usage("--schedule-steps must be at least 1")),
        Some(t) => {
            let fit = train_cesista(t, &config)?;
            Schedule::Cesista(fit.params).write_file(&a.out)?;
            fit.loss_history
        }
        None => {
            let state = fit(&config)?;
            state.coeffs.write_file(&a.out)?;
            state.loss_history
        }
    };
    write_loss_csv(BufWriter::new(File::create(&loss_path)?), &config, &history)?;
    if let Some(last) = history.last() {
        eprintln!("trained {} steps, final batch loss {last:.6e}", history.len());
    }
    Ok(())
}

pub fn ortho(a: OrthoArgs) -> CmdResult {
    let m = read_matrix_file(&a.input)?;
    let spec = parse_method(&a.method, a.coeffs.as_deref(), &a.opts, None)?.with_validation(a.validate);
    let r = orthogonalize(&m, &spec)?;
    let oriented = if r.y.rows() > r.y.cols() {
        r.y.transpose()
    } else {
        r.y.clone()
    };
    let err = ortho_error(&oriented)?;
    write_matrix(sink(a.out.as_deref())?, &r.y)?;
    eprintln!(
        "method={} shape={}x{} error={err:.6e} flops={}",
        spec.name(),
        m.rows(),
        m.cols(),
        r.flops
    );
    Ok(())
}

pub fn curve(a: CurveArgs) -> CmdResult {
    let grid = uniform_grid(a.low, 1.0, a.points).map_err(|e| Failure::usage(e.to_string()))?;
    let table = match a.terms {
        Some(order) => {
            let growth = match a.growth.as_str() {
                "exp" => Growth::Exponential,
                "linear" => Growth::Linear,
                g => return Err(Failure::usage(format!("unknown growth {g:?} (exp or linear)"))),
            };
            let terms = sample_term_curves(order, growth, &grid).map_err(|e| Failure::usage(e.to_string()))?;
            if a.normalized {
                terms.normalized()
            } else {
                terms.table
            }
        }
        None => sample_curves(&parse_methods(&a.methods, &a.opts)?, &grid)?,
    };
    table.write_csv(sink(a.out.as_deref())?)?;
    Ok(())
}

pub fn bench(a: BenchArgs) -> CmdResult {
    if a.seeds == 0 {
        return Err(Failure::usage("--seeds must be at least 1"));
    }
    let shapes = parse_shapes(&a.shapes)?;
    if shapes.is_empty() {
        return Err(Failure::usage("no shapes given"));
    }
    let methods = parse_methods(&a.methods, &a.opts)?;
    let first = effective_seed(a.seed)?;
    let seeds: Vec<u64> = (first..first + a.seeds).collect();
    let reports = run_table(&shapes, &methods, &seeds)?;
    write_reports_csv(sink(a.out.as_deref())?, &reports)?;
    Ok(())
}

pub fn flops(a: FlopsArgs) -> CmdResult {
    let (h, w) = parse_shape(&a.shape)?;
    let spec = parse_method(&a.method, None, &a.opts, Some(a.n))?;
    let m = gaussian_matrix(h, w, effective_seed(a.seed)?);
    let measured = orthogonalize(&m, &spec)?.flops;
    let analytic = flops_model(&spec, h, w);
    let mut out = sink(None)?;
    writeln!(out, "method,rows,cols,measured,analytic")?;
    writeln!(out, "{},{h},{w},{measured},{analytic}", spec.name())?;
    out.flush()?;
    if measured != analytic {
        eprintln!("warning: measured FLOPs differ from the model");
    }
    Ok(())
}
