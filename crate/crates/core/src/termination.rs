//! Checking that every rule decreases under an interpretation.
//!
//! A rule `f => g` decreases when, for all boundary currents, the
//! descending and ascending currents of `f` dominate those of `g` pointwise
//! and the heat of `f` is strictly greater than the heat of `g`. If every
//! rule decreases, rewriting terminates.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::Circuit;
use crate::interp::{InterpError, InterpretationAssignment};
use crate::multiset::mcompare;
use crate::rewrite::{Polygraph, ReductionTrace, Rule};

/// Grid bound used for heat strictness in [`VerificationMode::AffineExact`].
pub const AFFINE_HEAT_BOUND: u64 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("rule `{0}` uses non-affine currents; exact mode needs affine ones")]
    NonAffine(String),
    #[error("grid bound must be at least 1")]
    ZeroBound,
    #[error(transparent)]
    Interp(#[from] InterpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerificationMode {
    /// Every point of `{min..=min+bound}^(m+n)`.
    BoundedGrid { bound: u64 },
    /// Symbolic comparison of affine current maps; heat on the grid of
    /// [`AFFINE_HEAT_BOUND`].
    AffineExact,
}

impl fmt::Display for VerificationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerificationMode::BoundedGrid { bound } => write!(f, "grid:{bound}"),
            VerificationMode::AffineExact => f.write_str("affine"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    Down,
    Up,
    Heat,
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Inequality::Down => "descending currents",
            Inequality::Up => "ascending currents",
            Inequality::Heat => "heat",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub x: Vec<u64>,
    pub y: Vec<u64>,
    pub failed: Inequality,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={:?} y={:?} ({} fails)", self.x, self.y, self.failed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleVerdict {
    pub rule: String,
    pub down_ok: bool,
    pub up_ok: bool,
    pub heat_strict: bool,
    pub mode: VerificationMode,
    pub counterexample: Option<Counterexample>,
}

impl RuleVerdict {
    pub fn pass(&self) -> bool {
        self.down_ok && self.up_ok && self.heat_strict
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Overall {
    Certified,
    CertifiedUpToBound { bound: u64 },
    Refuted {
        rule: String,
        counterexample: Counterexample,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub mode: VerificationMode,
    pub min: u64,
    pub verdicts: Vec<RuleVerdict>,
    pub overall: Overall,
}

impl VerificationReport {
    pub fn caveats(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self.mode {
            VerificationMode::BoundedGrid { bound } => out.push(format!(
                "all inequalities checked only for currents in {}..={}",
                self.min,
                self.min + bound
            )),
            VerificationMode::AffineExact => out.push(format!(
                "current inequalities decided exactly; heat checked only for currents in {}..={}",
                self.min,
                self.min + AFFINE_HEAT_BOUND
            )),
        }
        out
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |b: bool| if b { "ok" } else { "FAIL" };
        for v in &self.verdicts {
            write!(
                f,
                "rule {}: down {}, up {}, heat {}",
                v.rule,
                mark(v.down_ok),
                mark(v.up_ok),
                mark(v.heat_strict)
            )?;
            match &v.counterexample {
                Some(c) => writeln!(f, " -- refuted at {c}")?,
                None => writeln!(f, " -- pass")?,
            }
        }
        writeln!(f, "mode: {} (currents >= {})", self.mode, self.min)?;
        for c in self.caveats() {
            writeln!(f, "caveat: {c}")?;
        }
        match &self.overall {
            Overall::Certified => writeln!(f, "overall: certified"),
            Overall::CertifiedUpToBound { bound } => {
                writeln!(f, "overall: certified up to bound {bound}")
            }
            Overall::Refuted { rule, .. } => writeln!(f, "overall: refuted by rule {rule}"),
        }
    }
}

/// The point with index `i` of `{min..=min+bound}^dims` in lexicographic
/// order.
fn grid_point(mut i: u64, dims: usize, min: u64, bound: u64) -> Vec<u64> {
    let base = bound + 1;
    let mut p = vec![min; dims];
    for slot in p.iter_mut().rev() {
        *slot = min + i % base;
        i /= base;
    }
    p
}

#[derive(Default, Clone, Copy)]
struct PointResult {
    down: bool,
    up: bool,
    heat: bool,
}

fn check_point(
    r: &Rule,
    a: &InterpretationAssignment,
    x: &[u64],
    y: &[u64],
    currents: bool,
) -> Result<PointResult, InterpError> {
    let (f, g) = (r.lhs(), r.rhs());
    let ge = |u: &[u64], v: &[u64]| u.iter().zip(v).all(|(p, q)| p >= q);
    let mut res = PointResult {
        down: true,
        up: true,
        heat: true,
    };
    if currents {
        res.down = ge(&a.eval_down(f, x)?, &a.eval_down(g, x)?);
        res.up = ge(&a.eval_up(f, y)?, &a.eval_up(g, y)?);
    }
    res.heat = mcompare(&a.eval_heat(f, x, y)?, &a.eval_heat(g, x, y)?).is_gt();
    Ok(res)
}

struct GridOutcome {
    down_ok: bool,
    up_ok: bool,
    heat_ok: bool,
    first: Option<Counterexample>,
}

fn sweep(
    r: &Rule,
    a: &InterpretationAssignment,
    bound: u64,
    currents: bool,
) -> Result<GridOutcome, InterpError> {
    let (m, n) = (r.lhs().inputs(), r.lhs().outputs());
    let dims = m + n;
    let total = (bound + 1).pow(dims as u32);
    let results: Vec<PointResult> = (0..total)
        .into_par_iter()
        .map(|i| {
            let p = grid_point(i, dims, a.min, bound);
            check_point(r, a, &p[..m], &p[m..], currents)
        })
        .collect::<Result<_, _>>()?;
    let first = results.iter().enumerate().find_map(|(i, res)| {
        let failed = if !res.down {
            Inequality::Down
        } else if !res.up {
            Inequality::Up
        } else if !res.heat {
            Inequality::Heat
        } else {
            return None;
        };
        let p = grid_point(i as u64, dims, a.min, bound);
        Some(Counterexample {
            x: p[..m].to_vec(),
            y: p[m..].to_vec(),
            failed,
        })
    });
    Ok(GridOutcome {
        down_ok: results.iter().all(|r| r.down),
        up_ok: results.iter().all(|r| r.up),
        heat_ok: results.iter().all(|r| r.heat),
        first,
    })
}

/// Exact check of one side's current maps; the lexicographically least
/// failing point over all output components, if any.
fn affine_currents(
    r: &Rule,
    a: &InterpretationAssignment,
    up: bool,
) -> Result<Option<Vec<u64>>, CheckError> {
    let non_affine = || CheckError::NonAffine(r.name().to_string());
    let (f, g): (&Circuit, &Circuit) = (r.lhs(), r.rhs());
    let (lf, lg, nvars) = if up {
        (a.affine_up(f), a.affine_up(g), f.outputs())
    } else {
        (a.affine_down(f), a.affine_down(g), f.inputs())
    };
    let (lf, lg) = (lf.ok_or_else(non_affine)?, lg.ok_or_else(non_affine)?);
    Ok(lf
        .iter()
        .zip(&lg)
        .filter_map(|(p, q)| p.dominates(q, nvars, a.min).err())
        .min())
}

pub fn check_rule(
    r: &Rule,
    a: &InterpretationAssignment,
    mode: VerificationMode,
) -> Result<RuleVerdict, CheckError> {
    match mode {
        VerificationMode::BoundedGrid { bound } => {
            if bound == 0 {
                return Err(CheckError::ZeroBound);
            }
            let out = sweep(r, a, bound, true)?;
            Ok(RuleVerdict {
                rule: r.name().to_string(),
                down_ok: out.down_ok,
                up_ok: out.up_ok,
                heat_strict: out.heat_ok,
                mode,
                counterexample: out.first,
            })
        }
        VerificationMode::AffineExact => {
            let (m, n) = (r.lhs().inputs(), r.lhs().outputs());
            let down = affine_currents(r, a, false)?;
            let up = affine_currents(r, a, true)?;
            let heat = sweep(r, a, AFFINE_HEAT_BOUND, false)?;
            let mut candidates = Vec::new();
            if let Some(x) = &down {
                candidates.push(Counterexample {
                    x: x.clone(),
                    y: vec![a.min; n],
                    failed: Inequality::Down,
                });
            }
            if let Some(y) = &up {
                candidates.push(Counterexample {
                    x: vec![a.min; m],
                    y: y.clone(),
                    failed: Inequality::Up,
                });
            }
            candidates.extend(heat.first);
            let counterexample = candidates
                .into_iter()
                .min_by(|p, q| (&p.x, &p.y).cmp(&(&q.x, &q.y)));
            Ok(RuleVerdict {
                rule: r.name().to_string(),
                down_ok: down.is_none(),
                up_ok: up.is_none(),
                heat_strict: heat.heat_ok,
                mode,
                counterexample,
            })
        }
    }
}

pub fn check_polygraph(
    p: &Polygraph,
    a: &InterpretationAssignment,
    mode: VerificationMode,
) -> Result<VerificationReport, CheckError> {
    a.check_total(&p.signature)?;
    let verdicts = p
        .rules()
        .iter()
        .map(|r| check_rule(r, a, mode))
        .collect::<Result<Vec<_>, _>>()?;
    let overall = match verdicts.iter().find(|v| !v.pass()) {
        Some(v) => Overall::Refuted {
            rule: v.rule.clone(),
            counterexample: v.counterexample.clone().expect("failing verdicts carry a point"),
        },
        None if verdicts.is_empty() => Overall::Certified,
        None => match mode {
            VerificationMode::BoundedGrid { bound } => Overall::CertifiedUpToBound { bound },
            VerificationMode::AffineExact => Overall::Certified,
        },
    };
    Ok(VerificationReport {
        mode,
        min: a.min,
        verdicts,
        overall,
    })
}

/// Whether the heat strictly decreases along every step of the trace at
/// the given boundary currents.
pub fn audit_heat_descent(
    trace: &ReductionTrace,
    a: &InterpretationAssignment,
    x: &[u64],
    y: &[u64],
) -> Result<bool, InterpError> {
    let heats = trace
        .circuits()
        .map(|c| a.eval_heat(c, x, y))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(heats.windows(2).all(|w| mcompare(&w[0], &w[1]).is_gt()))
}
