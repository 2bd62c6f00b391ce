//! Per-step coefficient schedules for the iterative baselines and their
//! text format.
//!
//! A schedule file starts with `cesista <T>` or `quintic <T>` and carries `T`
//! lines of three decimals: `gamma r l` for the root parameterization,
//! `a b c` for raw quintic coefficients.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::poly::{QuinticStep, MUON_STEP};

/// Root parameterization of one quintic step:
/// `g(x) = x + gamma * x (x^2 - (1+r)^2)(x^2 - (1-l)^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CesistaStep {
    pub gamma: f64,
    pub r: f64,
    pub l: f64,
}

impl CesistaStep {
    pub const IDENTITY: CesistaStep = CesistaStep {
        gamma: 0.0,
        r: 0.0,
        l: 0.0,
    };

    pub fn new(gamma: f64, r: f64, l: f64) -> Self {
        Self { gamma, r, l }
    }

    /// Expands to `a = 1 + gamma (1+r)^2 (1-l)^2`,
    /// `b = -gamma ((1+r)^2 + (1-l)^2)`, `c = gamma`.
    pub fn to_quintic(&self) -> QuinticStep {
        let hi = (1.0 + self.r) * (1.0 + self.r);
        let lo = (1.0 - self.l) * (1.0 - self.l);
        QuinticStep::new(1.0 + self.gamma * hi * lo, -self.gamma * (hi + lo), self.gamma)
    }

    /// Direct product form of the step, independent of [`Self::to_quintic`].
    pub fn eval(&self, x: f64) -> f64 {
        let hi = 1.0 + self.r;
        let lo = 1.0 - self.l;
        x + self.gamma * (x + hi) * (x + lo) * x * (x - lo) * (x - hi)
    }

    /// Inverse of [`Self::to_quintic`] when `g(x) - x` has real roots
    /// `x^2 = (1+r)^2 >= (1-l)^2 > 0` and `c != 0`.
    pub fn from_quintic(q: QuinticStep) -> Option<Self> {
        if q.c == 0.0 {
            return None;
        }
        let disc = q.b * q.b - 4.0 * q.c * (q.a - 1.0);
        if disc < 0.0 {
            return None;
        }
        let root = disc.sqrt();
        let u1 = (-q.b + root) / (2.0 * q.c);
        let u2 = (-q.b - root) / (2.0 * q.c);
        let (big, small) = if u1 >= u2 { (u1, u2) } else { (u2, u1) };
        if small <= 0.0 {
            return None;
        }
        Some(Self::new(q.c, big.sqrt() - 1.0, 1.0 - small.sqrt()))
    }

    /// Muon's fixed step in root form.
    pub fn muon() -> Self {
        Self::from_quintic(MUON_STEP).expect("Muon step has real positive roots")
    }
}

/// `T >= 1` root-parameterized steps.
#[derive(Clone, Debug, PartialEq)]
pub struct CesistaStepParams {
    steps: Vec<CesistaStep>,
}

impl CesistaStepParams {
    pub fn new(steps: Vec<CesistaStep>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidArgument("a schedule needs at least one step".into()));
        }
        if steps
            .iter()
            .any(|s| !(s.gamma.is_finite() && s.r.is_finite() && s.l.is_finite()))
        {
            return Err(Error::InvalidArgument("schedule parameters must be finite".into()));
        }
        Ok(Self { steps })
    }

    pub fn repeated(step: CesistaStep, t: usize) -> Result<Self> {
        Self::new(vec![step; t])
    }

    pub fn steps(&self) -> &[CesistaStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn to_quintics(&self) -> Vec<QuinticStep> {
        self.steps.iter().map(CesistaStep::to_quintic).collect()
    }

    pub(crate) fn to_flat(&self) -> Vec<f64> {
        self.steps.iter().flat_map(|s| [s.gamma, s.r, s.l]).collect()
    }

    pub(crate) fn from_flat(flat: &[f64]) -> Self {
        let steps = flat
            .chunks_exact(3)
            .map(|c| CesistaStep::new(c[0], c[1], c[2]))
            .collect();
        Self { steps }
    }
}

/// Contents of a schedule file.
#[derive(Clone, Debug, PartialEq)]
pub enum Schedule {
    Cesista(CesistaStepParams),
    Quintic(Vec<QuinticStep>),
}

impl Schedule {
    pub fn to_quintics(&self) -> Vec<QuinticStep> {
        match self {
            Schedule::Cesista(p) => p.to_quintics(),
            Schedule::Quintic(q) => q.clone(),
        }
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        match self {
            Schedule::Cesista(p) => {
                writeln!(w, "cesista {}", p.len())?;
                for s in p.steps() {
                    writeln!(w, "{} {} {}", s.gamma, s.r, s.l)?;
                }
            }
            Schedule::Quintic(q) => {
                writeln!(w, "quintic {}", q.len())?;
                for s in q {
                    writeln!(w, "{} {} {}", s.a, s.b, s.c)?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(r: R) -> Result<Self> {
        let mut header: Option<(String, usize)> = None;
        let mut triples: Vec<[f64; 3]> = Vec::new();
        let mut last_line = 0;
        for (idx, line) in BufReader::new(r).lines().enumerate() {
            let line = line?;
            let text = line.trim();
            last_line = idx + 1;
            if text.is_empty() {
                continue;
            }
            let parts: Vec<&str> = text.split_whitespace().collect();
            if header.is_none() {
                match parts.as_slice() {
                    [kind @ ("cesista" | "quintic"), n] => {
                        let n: usize = n
                            .parse()
                            .ok()
                            .filter(|&n| n > 0)
                            .ok_or_else(|| Error::parse(idx + 1, "step count must be a positive integer"))?;
                        header = Some((kind.to_string(), n));
                    }
                    _ => {
                        return Err(Error::parse(
                            idx + 1,
                            "expected header \"cesista <T>\" or \"quintic <T>\"",
                        ))
                    }
                }
                continue;
            }
            if parts.len() != 3 {
                return Err(Error::parse(
                    idx + 1,
                    format!("expected 3 values, found {}", parts.len()),
                ));
            }
            let mut t = [0.0; 3];
            for (slot, tok) in t.iter_mut().zip(&parts) {
                *slot = tok
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(idx + 1, format!("invalid value {tok:?}")))?;
            }
            triples.push(t);
        }
        let (kind, n) = header.ok_or_else(|| Error::parse(1, "empty schedule file"))?;
        if triples.len() != n {
            return Err(Error::parse(
                last_line.max(1),
                format!("expected {n} steps, found {}", triples.len()),
            ));
        }
        Ok(if kind == "cesista" {
            Schedule::Cesista(CesistaStepParams::new(
                triples.iter().map(|t| CesistaStep::new(t[0], t[1], t[2])).collect(),
            )?)
        } else {
            Schedule::Quintic(triples.iter().map(|t| QuinticStep::new(t[0], t[1], t[2])).collect())
        })
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::read(std::fs::File::open(path)?)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_matches_product_form() {
        let steps = [
            CesistaStep::new(1.0, 0.0, 0.0),
            CesistaStep::new(2.0315, 0.26, 0.13),
            CesistaStep::new(-0.7, 0.5, -0.2),
        ];
        for s in steps {
            let q = s.to_quintic();
            for i in 0..20 {
                let x = i as f64 / 19.0;
                assert!((q.eval(x) - s.eval(x)).abs() < 1e-12, "{s:?} at {x}");
            }
        }
    }

    #[test]
    fn identity_and_unit_step() {
        let q = CesistaStep::IDENTITY.to_quintic();
        assert_eq!((q.a, q.b, q.c), (1.0, 0.0, 0.0));
        let s = CesistaStep::new(1.0, 0.0, 0.0);
        assert_eq!(s.eval(1.0), 1.0);
        assert_eq!(s.eval(0.0), 0.0);
    }

    #[test]
    fn muon_round_trip() {
        let q = CesistaStep::muon().to_quintic();
        assert!((q.a - MUON_STEP.a).abs() < 1e-12);
        assert!((q.b - MUON_STEP.b).abs() < 1e-12);
        assert!((q.c - MUON_STEP.c).abs() < 1e-12);
    }

    #[test]
    fn file_round_trip() {
        let sched = Schedule::Cesista(
            CesistaStepParams::new(vec![
                CesistaStep::new(2.0, 0.25, 0.125),
                CesistaStep::new(1.5, 0.1, -0.3),
            ])
            .unwrap(),
        );
        let mut buf = Vec::new();
        sched.write(&mut buf).unwrap();
        assert_eq!(Schedule::read(buf.as_slice()).unwrap(), sched);

        let q = Schedule::Quintic(vec![MUON_STEP; 3]);
        let mut buf = Vec::new();
        q.write(&mut buf).unwrap();
        assert_eq!(Schedule::read(buf.as_slice()).unwrap(), q);
    }

    #[test]
    fn file_errors() {
        for bad in [
            "",
            "cesista 0\n",
            "cesista 2\n1 2 3\n",
            "poly 1\n1 2 3\n",
            "quintic 1\n1 2\n",
            "quintic 1\n1 2 inf\n",
        ] {
            assert!(Schedule::read(bad.as_bytes()).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn empty_params_rejected() {
        assert!(CesistaStepParams::new(vec![]).is_err());
    }
}
