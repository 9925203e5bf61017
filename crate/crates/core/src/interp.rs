//! Current and heat interpretations of circuits.
//!
//! Every generator `m -> n` is given a descending map `N^m -> N^n`, an
//! ascending map `N^n -> N^m`, and a heat `N^m x N^n -> M`. They extend to
//! all circuits: descending currents flow top to bottom, ascending currents
//! bottom to top, and the heat of a circuit is the sum of the heats of its
//! generators, each evaluated at the currents reaching it.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Circuit, GenId, Signature};
use crate::multiset::Multiset;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("no interpretation for generator `{0}`")]
    Missing(String),
    #[error("generator `{name}`: expected {expected} {what} expressions, found {found}")]
    Arity {
        name: String,
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("generator `{name}`: variable {var} out of range in {what}")]
    Variable {
        name: String,
        var: Var,
        what: &'static str,
    },
    #[error("expected {expected} currents, got {found}")]
    Length { expected: usize, found: usize },
    #[error("current minimum must be 0 or 1, got {0}")]
    Minimum(u64),
}

/// `x_i` is the i-th descending current entering a generator from above,
/// `y_j` the j-th ascending current entering it from below (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    X(usize),
    Y(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{i}"),
            Var::Y(i) => write!(f, "y{i}"),
        }
    }
}

/// Monotone expressions over naturals. Arithmetic saturates at `u64::MAX`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurrentExpr {
    Var(Var),
    Const(u64),
    Add(Box<CurrentExpr>, Box<CurrentExpr>),
    Max(Box<CurrentExpr>, Box<CurrentExpr>),
    Scale(u64, Box<CurrentExpr>),
}

impl CurrentExpr {
    pub fn x(i: usize) -> Self {
        CurrentExpr::Var(Var::X(i))
    }

    pub fn y(i: usize) -> Self {
        CurrentExpr::Var(Var::Y(i))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: CurrentExpr) -> Self {
        CurrentExpr::Add(Box::new(self), Box::new(other))
    }

    pub fn max(self, other: CurrentExpr) -> Self {
        CurrentExpr::Max(Box::new(self), Box::new(other))
    }

    pub fn scale(self, k: u64) -> Self {
        CurrentExpr::Scale(k, Box::new(self))
    }

    pub fn eval(&self, x: &[u64], y: &[u64]) -> u64 {
        match self {
            CurrentExpr::Var(Var::X(i)) => x[i - 1],
            CurrentExpr::Var(Var::Y(i)) => y[i - 1],
            CurrentExpr::Const(c) => *c,
            CurrentExpr::Add(a, b) => a.eval(x, y).saturating_add(b.eval(x, y)),
            CurrentExpr::Max(a, b) => a.eval(x, y).max(b.eval(x, y)),
            CurrentExpr::Scale(k, a) => a.eval(x, y).saturating_mul(*k),
        }
    }

    pub fn vars(&self, out: &mut Vec<Var>) {
        match self {
            CurrentExpr::Var(v) => out.push(*v),
            CurrentExpr::Const(_) => {}
            CurrentExpr::Add(a, b) | CurrentExpr::Max(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            CurrentExpr::Scale(_, a) => a.vars(out),
        }
    }

    pub fn is_affine(&self) -> bool {
        match self {
            CurrentExpr::Var(_) | CurrentExpr::Const(_) => true,
            CurrentExpr::Add(a, b) => a.is_affine() && b.is_affine(),
            CurrentExpr::Max(..) => false,
            CurrentExpr::Scale(_, a) => a.is_affine(),
        }
    }

    /// Substitutes affine forms for the variables; `None` if `max` occurs.
    pub fn affine(&self, x: &[Affine], y: &[Affine]) -> Option<Affine> {
        match self {
            CurrentExpr::Var(Var::X(i)) => Some(x[i - 1].clone()),
            CurrentExpr::Var(Var::Y(i)) => Some(y[i - 1].clone()),
            CurrentExpr::Const(c) => Some(Affine::constant(*c)),
            CurrentExpr::Add(a, b) => Some(a.affine(x, y)?.plus(&b.affine(x, y)?)),
            CurrentExpr::Max(..) => None,
            CurrentExpr::Scale(k, a) => Some(a.affine(x, y)?.times(*k)),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, tight: bool) -> fmt::Result {
        match self {
            CurrentExpr::Var(v) => write!(f, "{v}"),
            CurrentExpr::Const(c) => write!(f, "{c}"),
            CurrentExpr::Add(a, b) => {
                if tight {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, false)?;
                f.write_str(" + ")?;
                b.fmt_prec(f, true)?;
                if tight {
                    f.write_str(")")?;
                }
                Ok(())
            }
            CurrentExpr::Max(a, b) => {
                f.write_str("max(")?;
                a.fmt_prec(f, false)?;
                f.write_str(", ")?;
                b.fmt_prec(f, false)?;
                f.write_str(")")
            }
            CurrentExpr::Scale(k, a) => {
                write!(f, "{k}*")?;
                a.fmt_prec(f, true)
            }
        }
    }
}

impl fmt::Display for CurrentExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

/// A formal sum of atoms; atom `<e>` contributes the single element `e`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeatExpr {
    pub atoms: Vec<CurrentExpr>,
}

impl HeatExpr {
    pub fn eval_into(&self, x: &[u64], y: &[u64], out: &mut Multiset) {
        for a in &self.atoms {
            out.insert(a.eval(x, y));
        }
    }

    pub fn eval(&self, x: &[u64], y: &[u64]) -> Multiset {
        let mut m = Multiset::new();
        self.eval_into(x, y, &mut m);
        m
    }
}

impl fmt::Display for HeatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("0");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "<{a}>")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorInterpretation {
    pub down: Vec<CurrentExpr>,
    pub up: Vec<CurrentExpr>,
    pub heat: HeatExpr,
}

impl GeneratorInterpretation {
    /// Checks the expression counts and variable ranges against `m -> n`.
    pub fn validate(&self, name: &str, m: usize, n: usize) -> Result<(), InterpError> {
        let arity = |what, expected, found| {
            if expected == found {
                Ok(())
            } else {
                Err(InterpError::Arity {
                    name: name.to_string(),
                    what,
                    expected,
                    found,
                })
            }
        };
        arity("down", n, self.down.len())?;
        arity("up", m, self.up.len())?;
        let check = |e: &CurrentExpr, what, xs: usize, ys: usize| {
            let mut vars = Vec::new();
            e.vars(&mut vars);
            for var in vars {
                let ok = match var {
                    Var::X(i) => i >= 1 && i <= xs,
                    Var::Y(j) => j >= 1 && j <= ys,
                };
                if !ok {
                    return Err(InterpError::Variable {
                        name: name.to_string(),
                        var,
                        what,
                    });
                }
            }
            Ok(())
        };
        for e in &self.down {
            check(e, "down", m, 0)?;
        }
        for e in &self.up {
            check(e, "up", 0, n)?;
        }
        for e in &self.heat.atoms {
            check(e, "heat", m, n)?;
        }
        Ok(())
    }

    pub fn is_affine(&self) -> bool {
        self.down.iter().chain(&self.up).all(CurrentExpr::is_affine)
    }
}

/// Interpretations for every generator of a signature, with the least
/// current value (0 or 1) shared by descending and ascending currents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpretationAssignment {
    pub min: u64,
    generators: BTreeMap<GenId, GeneratorInterpretation>,
}

impl InterpretationAssignment {
    pub fn new(min: u64) -> Result<Self, InterpError> {
        if min > 1 {
            return Err(InterpError::Minimum(min));
        }
        Ok(InterpretationAssignment {
            min,
            generators: BTreeMap::new(),
        })
    }

    pub fn set(
        &mut self,
        sig: &Signature,
        id: GenId,
        gi: GeneratorInterpretation,
    ) -> Result<(), InterpError> {
        let d = sig.decl(id);
        gi.validate(&d.name, d.inputs, d.outputs)?;
        self.generators.insert(id, gi);
        Ok(())
    }

    pub fn get(&self, id: GenId) -> Option<&GeneratorInterpretation> {
        self.generators.get(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (GenId, &GeneratorInterpretation)> {
        self.generators.iter().map(|(&id, gi)| (id, gi))
    }

    /// Every generator of the signature is interpreted.
    pub fn check_total(&self, sig: &Signature) -> Result<(), InterpError> {
        match sig.iter().find(|(id, _)| !self.generators.contains_key(id)) {
            Some((_, d)) => Err(InterpError::Missing(d.name.clone())),
            None => Ok(()),
        }
    }

    pub fn is_affine(&self) -> bool {
        self.generators.values().all(GeneratorInterpretation::is_affine)
    }

    fn gen(&self, id: GenId) -> &GeneratorInterpretation {
        self.generators
            .get(&id)
            .expect("assignment checked total on the signature")
    }

    /// Descending currents at every level of `f`, top to bottom.
    pub fn down_levels(&self, f: &Circuit, x: &[u64]) -> Result<Vec<Vec<u64>>, InterpError> {
        expect_len(f.inputs(), x)?;
        let mut levels = Vec::with_capacity(f.len() + 1);
        let mut cur = x.to_vec();
        levels.push(cur.clone());
        for s in f.slices() {
            let g = self.gen(s.gen);
            let seg = &cur[s.pad..s.pad + s.inputs];
            let out: Vec<u64> = g.down.iter().map(|e| e.eval(seg, &[])).collect();
            cur.splice(s.pad..s.pad + s.inputs, out);
            levels.push(cur.clone());
        }
        Ok(levels)
    }

    /// Ascending currents at every level of `f`, top to bottom.
    pub fn up_levels(&self, f: &Circuit, y: &[u64]) -> Result<Vec<Vec<u64>>, InterpError> {
        expect_len(f.outputs(), y)?;
        let mut levels = vec![Vec::new(); f.len() + 1];
        let mut cur = y.to_vec();
        levels[f.len()] = cur.clone();
        for (k, s) in f.slices().iter().enumerate().rev() {
            let g = self.gen(s.gen);
            let seg = &cur[s.pad..s.pad + s.outputs];
            let out: Vec<u64> = g.up.iter().map(|e| e.eval(&[], seg)).collect();
            cur.splice(s.pad..s.pad + s.outputs, out);
            levels[k] = cur.clone();
        }
        Ok(levels)
    }

    pub fn eval_down(&self, f: &Circuit, x: &[u64]) -> Result<Vec<u64>, InterpError> {
        Ok(self.down_levels(f, x)?.pop().unwrap())
    }

    pub fn eval_up(&self, f: &Circuit, y: &[u64]) -> Result<Vec<u64>, InterpError> {
        Ok(self.up_levels(f, y)?.swap_remove(0))
    }

    pub fn eval_heat(&self, f: &Circuit, x: &[u64], y: &[u64]) -> Result<Multiset, InterpError> {
        let down = self.down_levels(f, x)?;
        let up = self.up_levels(f, y)?;
        let mut heat = Multiset::new();
        for (k, s) in f.slices().iter().enumerate() {
            let xs = &down[k][s.pad..s.pad + s.inputs];
            let ys = &up[k + 1][s.pad..s.pad + s.outputs];
            self.gen(s.gen).heat.eval_into(xs, ys, &mut heat);
        }
        Ok(heat)
    }

    /// Descending map of `f` as affine forms in its inputs.
    pub fn affine_down(&self, f: &Circuit) -> Option<Vec<Affine>> {
        let mut cur: Vec<Affine> = (0..f.inputs()).map(|i| Affine::var(f.inputs(), i)).collect();
        for s in f.slices() {
            let seg = cur[s.pad..s.pad + s.inputs].to_vec();
            let out = self
                .gen(s.gen)
                .down
                .iter()
                .map(|e| e.affine(&seg, &[]))
                .collect::<Option<Vec<_>>>()?;
            cur.splice(s.pad..s.pad + s.inputs, out);
        }
        Some(cur)
    }

    /// Ascending map of `f` as affine forms in its outputs.
    pub fn affine_up(&self, f: &Circuit) -> Option<Vec<Affine>> {
        let mut cur: Vec<Affine> = (0..f.outputs())
            .map(|i| Affine::var(f.outputs(), i))
            .collect();
        for s in f.slices().iter().rev() {
            let seg = cur[s.pad..s.pad + s.outputs].to_vec();
            let out = self
                .gen(s.gen)
                .up
                .iter()
                .map(|e| e.affine(&[], &seg))
                .collect::<Option<Vec<_>>>()?;
            cur.splice(s.pad..s.pad + s.outputs, out);
        }
        Some(cur)
    }
}

fn expect_len(expected: usize, v: &[u64]) -> Result<(), InterpError> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(InterpError::Length {
            expected,
            found: v.len(),
        })
    }
}

/// `c + sum a_i v_i` with natural coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Affine {
    pub coeffs: Vec<u64>,
    pub constant: u64,
}

impl Affine {
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut coeffs = vec![0; nvars];
        coeffs[i] = 1;
        Affine {
            coeffs,
            constant: 0,
        }
    }

    /// A constant; its coefficient vector is empty and grows on demand.
    pub fn constant(c: u64) -> Self {
        Affine {
            coeffs: Vec::new(),
            constant: c,
        }
    }

    pub fn plus(&self, other: &Affine) -> Affine {
        let n = self.coeffs.len().max(other.coeffs.len());
        let at = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
        Affine {
            coeffs: (0..n)
                .map(|i| at(&self.coeffs, i).saturating_add(at(&other.coeffs, i)))
                .collect(),
            constant: self.constant.saturating_add(other.constant),
        }
    }

    pub fn times(&self, k: u64) -> Affine {
        Affine {
            coeffs: self.coeffs.iter().map(|c| c.saturating_mul(k)).collect(),
            constant: self.constant.saturating_mul(k),
        }
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn eval(&self, v: &[u64]) -> u64 {
        self.coeffs
            .iter()
            .zip(v)
            .fold(self.constant, |acc, (a, x)| acc.saturating_add(a.saturating_mul(*x)))
    }

    /// Whether `self >= other` for every assignment with all variables at
    /// least `min`; otherwise the lexicographically least failing point.
    ///
    /// The difference is `d + sum e_i (v_i - min)` where `d` is its value at
    /// the all-min point, so it stays nonnegative exactly when `d >= 0` and
    /// every `e_i >= 0`.
    pub fn dominates(&self, other: &Affine, nvars: usize, min: u64) -> Result<(), Vec<u64>> {
        let mut point = vec![min; nvars];
        let d = self.eval(&point) as i128 - other.eval(&point) as i128;
        let e: Vec<i128> = (0..nvars)
            .map(|i| self.coeff(i) as i128 - other.coeff(i) as i128)
            .collect();
        if d < 0 {
            return Err(point);
        }
        // raise only the last deficient variable, just enough
        match (0..nvars).rev().find(|&i| e[i] < 0) {
            None => Ok(()),
            Some(i) => {
                point[i] = min + (d / -e[i] + 1) as u64;
                Err(point)
            }
        }
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if c == 1 {
                write!(f, "v{}", i + 1)?;
            } else {
                write!(f, "{c}*v{}", i + 1)?;
            }
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant > 0 {
            write!(f, " + {}", self.constant)
        } else {
            Ok(())
        }
    }
}
