//! Flag grammars: `name[:paramfile]` methods, `HxW` shapes and scalings.

use std::path::Path;

use unso_core::defaults::{cesista_schedule, unso_coefficients};
use unso_core::ortho::{MUON_ITERATIONS, ORIGINAL_NS_ITERATIONS};
use unso_core::{BRule, CoefficientSet, Grouping, MethodSpec, Scaling, Schedule};

use crate::args::MethodOpts;
use crate::Failure;

pub fn parse_shape(s: &str) -> Result<(usize, usize), Failure> {
    let (h, w) = s
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(|| Failure::usage(format!("shape {s:?} is not HxW")))?;
    match (h.parse::<usize>(), w.parse::<usize>()) {
        (Ok(h), Ok(w)) if h > 0 && w > 0 => Ok((h, w)),
        _ => Err(Failure::usage(format!("shape {s:?} is not HxW with positive sizes"))),
    }
}

pub fn parse_shapes(s: &str) -> Result<Vec<(usize, usize)>, Failure> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(parse_shape).collect()
}

pub fn parse_scaling(s: &str) -> Result<Scaling, Failure> {
    match s {
        "gram" => Ok(Scaling::FrobeniusGram),
        "plain" => Ok(Scaling::FrobeniusPlain),
        _ => s
            .strip_prefix("gelfand:")
            .and_then(|k| k.parse::<u32>().ok())
            .filter(|&k| k > 0)
            .map(|power| Scaling::Gelfand { power })
            .ok_or_else(|| Failure::usage(format!("unknown scaling {s:?} (gram, plain or gelfand:K)"))),
    }
}

fn parse_grouping(s: &str) -> Result<Grouping, Failure> {
    match s {
        "expanded" => Ok(Grouping::Expanded),
        "gram" => Ok(Grouping::GramPolynomial),
        _ => Err(Failure::usage(format!("unknown grouping {s:?} (expanded or gram)"))),
    }
}

/// Builds a method from `name[:paramfile]`; `param_override` stands in for a
/// missing `:paramfile`. `unso_order` picks the constant-coefficient fallback
/// when no file is given and the order differs from the shipped set.
pub fn parse_method(
    text: &str,
    param_override: Option<&Path>,
    opts: &MethodOpts,
    unso_order: Option<usize>,
) -> Result<MethodSpec, Failure> {
    let (name, file) = match text.split_once(':') {
        Some((n, f)) => (n.trim(), Some(Path::new(f.trim()))),
        None => (text.trim(), param_override),
    };
    let iters = opts.iters;
    if iters == Some(0) {
        return Err(Failure::usage("--iters must be at least 1"));
    }
    let spec = match name {
        "unso" => {
            let coeffs = match (file, unso_order) {
                (Some(f), _) => CoefficientSet::read_file(f)?,
                (None, Some(n)) if n != unso_coefficients().order() => {
                    CoefficientSet::constant(n, unso_core::train::INIT_COEFFICIENT, BRule::Exact)
                        .map_err(|e| Failure::usage(e.to_string()))?
                }
                (None, _) => unso_coefficients(),
            };
            MethodSpec::unso(coeffs)
        }
        "original" => MethodSpec::original_ns(iters.unwrap_or(ORIGINAL_NS_ITERATIONS)),
        "muon" => MethodSpec::muon(iters.unwrap_or(MUON_ITERATIONS)),
        "cesista" => match file {
            None => MethodSpec::cesista(cesista_schedule()),
            Some(f) => match Schedule::read_file(f)? {
                Schedule::Cesista(p) => MethodSpec::cesista(p),
                Schedule::Quintic(q) => MethodSpec::external(q),
            },
        },
        "external" => {
            let f = file.ok_or_else(|| Failure::usage("external needs a schedule file (external:FILE)"))?;
            MethodSpec::external(Schedule::read_file(f)?.to_quintics())
        }
        other => {
            return Err(Failure::usage(format!(
                "unknown method {other:?} (unso, original, muon, cesista, external)"
            )))
        }
    };
    let mut spec = spec.with_grouping(parse_grouping(&opts.grouping)?);
    if let Some(s) = &opts.scaling {
        spec = spec.with_scaling(parse_scaling(s)?);
    }
    Ok(spec)
}

pub fn parse_methods(list: &str, opts: &MethodOpts) -> Result<Vec<MethodSpec>, Failure> {
    let specs: Vec<MethodSpec> = list
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|m| parse_method(m, None, opts, None))
        .collect::<Result<_, _>>()?;
    if specs.is_empty() {
        return Err(Failure::usage("no methods given"));
    }
    Ok(specs)
}
