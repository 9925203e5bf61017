#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet, VecDeque};

use polygraph::diagram::{exchange_pairs, word_widths, Circuit, GenId, Signature, Slice};
use polygraph::interp::{CurrentExpr, GeneratorInterpretation, HeatExpr, InterpretationAssignment};
use polygraph::multiset::Multiset;
use rand::Rng;

pub fn signature(gens: &[(&str, usize, usize)]) -> Signature {
    let mut s = Signature::new();
    for &(name, m, n) in gens {
        s.add(name, m, n).unwrap();
    }
    s
}

/// Every word isotopic to `w`, each paired with the original index of
/// every slice. Returns `None` past `cap` words.
pub fn exchange_class(w: &[Slice], cap: usize) -> Option<Vec<(Vec<Slice>, Vec<usize>)>> {
    let start = (w.to_vec(), (0..w.len()).collect::<Vec<usize>>());
    let mut seen = HashSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    let mut out = Vec::new();
    while let Some((word, labels)) = queue.pop_front() {
        for i in 0..word.len().saturating_sub(1) {
            for (u, l) in exchange_pairs(word[i], word[i + 1]) {
                let mut w2 = word.clone();
                let mut l2 = labels.clone();
                w2[i] = u;
                w2[i + 1] = l;
                l2.swap(i, i + 1);
                if seen.insert((w2.clone(), l2.clone())) {
                    if seen.len() > cap {
                        return None;
                    }
                    queue.push_back((w2, l2));
                }
            }
        }
        out.push((word, labels));
    }
    Some(out)
}

/// A random well-formed word.
pub fn random_word<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    inputs: usize,
    max_slices: usize,
) -> Vec<Slice> {
    let ids: Vec<_> = sig.ids().collect();
    let n = rng.gen_range(0..=max_slices);
    let mut width = inputs;
    let mut w = Vec::new();
    let mut tries = 0;
    while w.len() < n && tries < 20 * n + 20 {
        tries += 1;
        let g = ids[rng.gen_range(0..ids.len())];
        let d = sig.decl(g);
        if d.inputs > width {
            continue;
        }
        let pad = rng.gen_range(0..=width - d.inputs);
        w.push(sig.slice(g, pad));
        width = width - d.inputs + d.outputs;
    }
    w
}

/// Random legal exchange moves applied to a word.
pub fn exchange_walk<R: Rng>(rng: &mut R, w: &[Slice], steps: usize) -> Vec<Slice> {
    let mut w = w.to_vec();
    for _ in 0..steps {
        if w.len() < 2 {
            break;
        }
        let i = rng.gen_range(0..w.len() - 1);
        let options = exchange_pairs(w[i], w[i + 1]);
        if !options.is_empty() {
            let (u, l) = options[rng.gen_range(0..options.len())];
            w[i] = u;
            w[i + 1] = l;
        }
    }
    w
}

/// Every circuit up to isotopy with at most `max_slices` slices, at most
/// `max_inputs` inputs, and every level at most `max_width` wide.
pub fn all_circuits(
    sig: &Signature,
    max_slices: usize,
    max_inputs: usize,
    max_width: usize,
) -> Vec<Circuit> {
    let mut all: BTreeSet<(usize, Vec<Slice>)> = BTreeSet::new();
    for m in 0..=max_inputs {
        let mut layer: HashSet<Circuit> = HashSet::from([Circuit::identity(m)]);
        for _ in 0..=max_slices {
            let mut next = HashSet::new();
            for c in &layer {
                all.insert((c.inputs(), c.slices().to_vec()));
                if c.len() == max_slices {
                    continue;
                }
                let w = c.outputs();
                for (g, d) in sig.iter() {
                    if d.inputs > w || w - d.inputs + d.outputs > max_width {
                        continue;
                    }
                    for pad in 0..=w - d.inputs {
                        let mut word = c.slices().to_vec();
                        word.push(sig.slice(g, pad));
                        next.insert(Circuit::from_slices(m, word).unwrap());
                    }
                }
            }
            layer = next;
        }
    }
    all.into_iter()
        .map(|(m, w)| Circuit::from_slices(m, w).unwrap())
        .collect()
}

/// Node sets of all windows, over all isotopic words, reading as
/// `id:p * pattern * id:q`.
pub fn brute_force_matches(f: &Circuit, pattern: &Circuit) -> BTreeSet<Vec<usize>> {
    let mut found = BTreeSet::new();
    let len = pattern.len();
    let m = pattern.inputs();
    let class = exchange_class(f.slices(), usize::MAX).unwrap();
    for (word, labels) in class {
        let widths = word_widths(f.inputs(), &word);
        for start in 0..=word.len().saturating_sub(len) {
            if start + len > word.len() {
                break;
            }
            let w = widths[start];
            if w < m {
                continue;
            }
            for left in 0..=w - m {
                let window = &word[start..start + len];
                if window.iter().any(|s| s.pad < left) {
                    continue;
                }
                let inner: Vec<Slice> = window
                    .iter()
                    .map(|s| Slice { pad: s.pad - left, ..*s })
                    .collect();
                if let Ok(c) = Circuit::from_slices(m, inner) {
                    if &c == pattern {
                        let mut set = labels[start..start + len].to_vec();
                        set.sort_unstable();
                        found.insert(set);
                    }
                }
            }
        }
    }
    found
}

/// A circuit expression tree, kept for oracles that recurse on structure
/// rather than on slices.
#[derive(Debug, Clone)]
pub enum Term {
    Id(usize),
    Gen(GenId),
    /// Juxtaposition.
    H(Box<Term>, Box<Term>),
    /// Plugging: the first term on top of the second.
    V(Box<Term>, Box<Term>),
}

impl Term {
    pub fn inputs(&self, sig: &Signature) -> usize {
        match self {
            Term::Id(n) => *n,
            Term::Gen(g) => sig.decl(*g).inputs,
            Term::H(a, b) => a.inputs(sig) + b.inputs(sig),
            Term::V(a, _) => a.inputs(sig),
        }
    }

    pub fn outputs(&self, sig: &Signature) -> usize {
        match self {
            Term::Id(n) => *n,
            Term::Gen(g) => sig.decl(*g).outputs,
            Term::H(a, b) => a.outputs(sig) + b.outputs(sig),
            Term::V(_, b) => b.outputs(sig),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Id(_) => 0,
            Term::Gen(_) => 1,
            Term::H(a, b) | Term::V(a, b) => a.size() + b.size(),
        }
    }

    pub fn build(&self, sig: &Signature) -> Circuit {
        match self {
            Term::Id(n) => Circuit::identity(*n),
            Term::Gen(g) => sig.circuit_of(*g),
            Term::H(a, b) => a.build(sig).hcomp(&b.build(sig)),
            Term::V(a, b) => a.build(sig).vcomp(&b.build(sig)).unwrap(),
        }
    }

    pub fn down(&self, sig: &Signature, a: &InterpretationAssignment, x: &[u64]) -> Vec<u64> {
        match self {
            Term::Id(_) => x.to_vec(),
            Term::Gen(g) => a.get(*g).unwrap().down.iter().map(|e| e.eval(x, &[])).collect(),
            Term::H(l, r) => {
                let k = l.inputs(sig);
                let mut out = l.down(sig, a, &x[..k]);
                out.extend(r.down(sig, a, &x[k..]));
                out
            }
            Term::V(t, b) => b.down(sig, a, &t.down(sig, a, x)),
        }
    }

    pub fn up(&self, sig: &Signature, a: &InterpretationAssignment, y: &[u64]) -> Vec<u64> {
        match self {
            Term::Id(_) => y.to_vec(),
            Term::Gen(g) => a.get(*g).unwrap().up.iter().map(|e| e.eval(&[], y)).collect(),
            Term::H(l, r) => {
                let k = l.outputs(sig);
                let mut out = l.up(sig, a, &y[..k]);
                out.extend(r.up(sig, a, &y[k..]));
                out
            }
            Term::V(t, b) => t.up(sig, a, &b.up(sig, a, y)),
        }
    }

    pub fn heat(
        &self,
        sig: &Signature,
        a: &InterpretationAssignment,
        x: &[u64],
        y: &[u64],
    ) -> Multiset {
        match self {
            Term::Id(_) => Multiset::new(),
            Term::Gen(g) => a.get(*g).unwrap().heat.eval(x, y),
            Term::H(l, r) => {
                let (i, o) = (l.inputs(sig), l.outputs(sig));
                l.heat(sig, a, &x[..i], &y[..o]) + r.heat(sig, a, &x[i..], &y[o..])
            }
            Term::V(t, b) => {
                let mid_down = t.down(sig, a, x);
                let mid_up = b.up(sig, a, y);
                t.heat(sig, a, x, &mid_up) + b.heat(sig, a, &mid_down, y)
            }
        }
    }
}

/// A random expression tree with `inputs` inputs and at most `fuel`
/// generators.
pub fn random_term<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    inputs: usize,
    fuel: &mut usize,
    depth: usize,
) -> Term {
    if depth == 0 || *fuel == 0 {
        return Term::Id(inputs);
    }
    match rng.gen_range(0..10) {
        0 => Term::Id(inputs),
        1..=3 => {
            let fits: Vec<GenId> = sig.ids().filter(|&g| sig.decl(g).inputs == inputs).collect();
            if fits.is_empty() {
                return Term::Id(inputs);
            }
            *fuel -= 1;
            Term::Gen(fits[rng.gen_range(0..fits.len())])
        }
        4..=5 => {
            let k = rng.gen_range(0..=inputs);
            let l = random_term(rng, sig, k, fuel, depth - 1);
            let r = random_term(rng, sig, inputs - k, fuel, depth - 1);
            Term::H(Box::new(l), Box::new(r))
        }
        _ => {
            let t = random_term(rng, sig, inputs, fuel, depth - 1);
            let b = random_term(rng, sig, t.outputs(sig), fuel, depth - 1);
            Term::V(Box::new(t), Box::new(b))
        }
    }
}

/// Up to `max_gens` generators with arities in `0..=max_arity`.
pub fn random_signature<R: Rng>(rng: &mut R, max_gens: usize, max_arity: usize) -> Signature {
    let mut s = Signature::new();
    for i in 0..rng.gen_range(1..=max_gens) {
        let m = rng.gen_range(0..=max_arity);
        let n = rng.gen_range(0..=max_arity);
        s.add(format!("g{i}"), m, n).unwrap();
    }
    s
}

/// A random monotone expression over `x1..=xs` and `y1..=ys`.
pub fn random_expr<R: Rng>(rng: &mut R, xs: usize, ys: usize, depth: usize, affine: bool) -> CurrentExpr {
    let leaf = |rng: &mut R| {
        let k = rng.gen_range(0..=xs + ys);
        if k == 0 || xs + ys == 0 {
            CurrentExpr::Const(rng.gen_range(0..3))
        } else if k <= xs {
            CurrentExpr::x(k)
        } else {
            CurrentExpr::y(k - xs)
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..if affine { 4 } else { 5 }) {
        0 | 1 => leaf(rng),
        2 => random_expr(rng, xs, ys, depth - 1, affine).add(random_expr(rng, xs, ys, depth - 1, affine)),
        3 => random_expr(rng, xs, ys, depth - 1, affine).scale(rng.gen_range(0..4)),
        _ => random_expr(rng, xs, ys, depth - 1, affine).max(random_expr(rng, xs, ys, depth - 1, affine)),
    }
}

pub fn random_interpretation<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    min: u64,
    affine: bool,
) -> InterpretationAssignment {
    let mut a = InterpretationAssignment::new(min).unwrap();
    for (g, d) in sig.iter() {
        let gi = GeneratorInterpretation {
            down: (0..d.outputs).map(|_| random_expr(rng, d.inputs, 0, 2, affine)).collect(),
            up: (0..d.inputs).map(|_| random_expr(rng, 0, d.outputs, 2, affine)).collect(),
            heat: HeatExpr {
                atoms: (0..rng.gen_range(0..3))
                    .map(|_| random_expr(rng, d.inputs, d.outputs, 2, affine))
                    .collect(),
            },
        };
        a.set(sig, g, gi).unwrap();
    }
    a
}

pub fn random_currents<R: Rng>(rng: &mut R, n: usize, lo: u64, hi: u64) -> Vec<u64> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// A random rule whose sides share an interface, or `None` after a few
/// attempts.
pub fn random_rule<R: Rng>(rng: &mut R, sig: &Signature, name: &str) -> Option<polygraph::rewrite::Rule> {
    for _ in 0..50 {
        let m = rng.gen_range(0..3);
        let mut fuel = 3;
        let lhs = random_term(rng, sig, m, &mut fuel, 4).build(sig);
        if lhs.is_identity() {
            continue;
        }
        for _ in 0..20 {
            let mut fuel = 3;
            let rhs = random_term(rng, sig, m, &mut fuel, 4).build(sig);
            if rhs.outputs() == lhs.outputs() {
                return polygraph::rewrite::Rule::new(name, lhs, rhs).ok();
            }
        }
    }
    None
}

/// Dershowitz-Manna: `a > b` iff `a != b` and every element that `b` has
/// in excess is dominated by some element that `a` has in excess.
pub fn dm_greater(a: &[u64], b: &[u64]) -> bool {
    let count = |v: &[u64], n: u64| v.iter().filter(|&&x| x == n).count();
    let support: Vec<u64> = a.iter().chain(b).copied().collect();
    let a_excess: Vec<u64> = support.iter().copied().filter(|&n| count(a, n) > count(b, n)).collect();
    let b_excess: Vec<u64> = support.iter().copied().filter(|&n| count(b, n) > count(a, n)).collect();
    if a_excess.is_empty() && b_excess.is_empty() {
        return false;
    }
    b_excess.iter().all(|&y| a_excess.iter().any(|&x| x > y))
}

pub fn dm_compare(a: &[u64], b: &[u64]) -> Ordering {
    if dm_greater(a, b) {
        Ordering::Greater
    } else if dm_greater(b, a) {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// Compares `find_pattern` with the brute-force oracle for every target
/// with at most `max_slices` slices and every pattern with at most two.
/// Returns the number of occurrences seen and the number of mismatching
/// (target, pattern) pairs.
pub fn matching_mismatches(gens: &[(&str, usize, usize)], max_slices: usize, max_width: usize) -> (usize, usize) {
    let sig = signature(gens);
    let targets = all_circuits(&sig, max_slices, 2, max_width);
    let patterns: Vec<Circuit> = all_circuits(&sig, 2, 2, 3)
        .into_iter()
        .filter(|c| !c.is_identity())
        .collect();
    let mut total = 0;
    let mut bad = 0;
    for f in &targets {
        for p in &patterns {
            let found = polygraph::rewrite::find_pattern(f, p);
            let got: BTreeSet<Vec<usize>> = found.iter().map(|o| o.nodes.clone()).collect();
            let want = brute_force_matches(f, p);
            total += want.len();
            let sound = found.iter().all(|o| &o.rebuild(p).unwrap() == f);
            if got != want || !sound {
                bad += 1;
                if bad <= 5 {
                    eprintln!("{} in {}: got {got:?}, want {want:?}", p.display(&sig), f.display(&sig));
                }
            }
        }
    }
    (total, bad)
}
