//! Rules, occurrences modulo isotopy, and reduction.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{exchange_pairs, word_widths, Circuit, DiagramError, Interface, Signature, Slice};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("rule `{0}` has an identity left-hand side")]
    IdentityLhs(String),
    #[error("rule sides not parallel in `{rule}`: {lhs} vs {rhs}")]
    NotParallel {
        rule: String,
        lhs: Interface,
        rhs: Interface,
    },
    #[error("duplicate rule `{0}`")]
    DuplicateRule(String),
    #[error("occurrence does not rebuild the circuit")]
    StaleOccurrence,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    name: String,
    lhs: Circuit,
    rhs: Circuit,
}

impl Rule {
    pub fn new(name: impl Into<String>, lhs: Circuit, rhs: Circuit) -> Result<Self, RewriteError> {
        let name = name.into();
        if lhs.is_identity() {
            return Err(RewriteError::IdentityLhs(name));
        }
        if !lhs.is_parallel(&rhs) {
            return Err(RewriteError::NotParallel {
                rule: name,
                lhs: lhs.interface(),
                rhs: rhs.interface(),
            });
        }
        Ok(Rule { name, lhs, rhs })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lhs(&self) -> &Circuit {
        &self.lhs
    }

    pub fn rhs(&self) -> &Circuit {
        &self.rhs
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Polygraph {
    pub signature: Signature,
    rules: Vec<Rule>,
}

impl Polygraph {
    pub fn new(signature: Signature) -> Self {
        Polygraph {
            signature,
            rules: Vec::new(),
        }
    }

    pub fn add_rule(&mut self, rule: Rule) -> Result<(), RewriteError> {
        if self.rule(rule.name()).is_some() {
            return Err(RewriteError::DuplicateRule(rule.name));
        }
        self.rules.push(rule);
        Ok(())
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }
}

/// A decomposition `f = h ; (id:p * lhs * id:q) ; k`.
///
/// `nodes` lists the slices of the canonical form of `f` covered by the
/// left-hand side; two occurrences are the same up to isotopy exactly when
/// they cover the same nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Occurrence {
    pub above: Circuit,
    pub below: Circuit,
    pub left: usize,
    pub right: usize,
    pub nodes: Vec<usize>,
}

impl Occurrence {
    /// `h ; (id:p * middle * id:q) ; k`.
    pub fn rebuild(&self, middle: &Circuit) -> Result<Circuit, DiagramError> {
        self.above
            .vcomp(&middle.whisker(self.left, self.right))?
            .vcomp(&self.below)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Source {
    Input,
    Node(usize, usize),
}

/// Source of every input wire of every slice.
fn sources(inputs: usize, slices: &[Slice]) -> Vec<Vec<Source>> {
    let mut wires: Vec<Source> = vec![Source::Input; inputs];
    let mut out = Vec::with_capacity(slices.len());
    for (k, s) in slices.iter().enumerate() {
        let consumed: Vec<Source> = wires
            .splice(s.pad..s.pad + s.inputs, (0..s.outputs).map(|i| Source::Node(k, i)))
            .collect();
        out.push(consumed);
    }
    out
}

/// Searches for node embeddings of the pattern into the target, respecting
/// every internal wire of the pattern and adding no extra ones.
fn embeddings(target: &Circuit, pattern: &Circuit) -> Vec<Vec<usize>> {
    let ts = sources(target.inputs(), target.slices());
    let ps = sources(pattern.inputs(), pattern.slices());
    let tw = target.slices();
    let pw = pattern.slices();
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut map = Vec::with_capacity(pw.len());

    fn go(
        b: usize,
        map: &mut Vec<usize>,
        tw: &[Slice],
        pw: &[Slice],
        ts: &[Vec<Source>],
        ps: &[Vec<Source>],
        found: &mut BTreeSet<Vec<usize>>,
    ) {
        if b == pw.len() {
            let in_set = |x: usize| map.contains(&x);
            for (pb, &tb) in map.iter().enumerate() {
                for (j, src) in ps[pb].iter().enumerate() {
                    if *src == Source::Input {
                        if let Source::Node(x, _) = ts[tb][j] {
                            if in_set(x) {
                                return;
                            }
                        }
                    }
                }
            }
            let mut set = map.clone();
            set.sort_unstable();
            found.insert(set);
            return;
        }
        for cand in 0..tw.len() {
            if tw[cand].gen != pw[b].gen || map.contains(&cand) {
                continue;
            }
            let ok = ps[b].iter().enumerate().all(|(j, src)| match *src {
                Source::Node(a, i) => ts[cand][j] == Source::Node(map[a], i),
                Source::Input => true,
            });
            if ok {
                map.push(cand);
                go(b + 1, map, tw, pw, ts, ps, found);
                map.pop();
            }
        }
    }

    go(0, &mut map, tw, pw, &ts, &ps, &mut found);
    found.into_iter().collect()
}

/// Upper bound on the number of words explored when the direct search for
/// a contiguous placement of an embedding fails.
pub const SEARCH_LIMIT: usize = 20_000;

struct Window {
    word: Vec<Slice>,
    labels: Vec<usize>,
    start: usize,
    left: usize,
}

/// If the nodes in `set` occupy a contiguous window of `word` that reads
/// as the pattern whiskered on both sides, returns the window start and the
/// left whisker.
fn window_at(
    inputs: usize,
    word: &[Slice],
    labels: &[usize],
    set: &[usize],
    pattern: &Circuit,
) -> Option<(usize, usize)> {
    let pos: Vec<usize> = (0..word.len()).filter(|&t| set.contains(&labels[t])).collect();
    let start = pos[0];
    if pos[pos.len() - 1] - start + 1 != pos.len() {
        return None;
    }
    let widths = word_widths(inputs, word);
    let window = &word[start..start + pos.len()];
    let max_left = window.iter().map(|s| s.pad).min()?;
    let max_right = window
        .iter()
        .zip(&widths[start..])
        .map(|(s, w)| w - s.pad - s.inputs)
        .min()?;
    let w = widths[start];
    let m = pattern.inputs();
    if w < m {
        return None;
    }
    for left in (w - m).saturating_sub(max_right)..=max_left.min(w - m) {
        let inner: Vec<Slice> = window
            .iter()
            .map(|s| Slice {
                pad: s.pad - left,
                ..*s
            })
            .collect();
        if let Ok(c) = Circuit::from_slices(m, inner) {
            if &c == pattern {
                return Some((start, left));
            }
        }
    }
    None
}

fn reachable(succ: &[Vec<usize>], from: &[usize]) -> HashSet<usize> {
    let mut seen = HashSet::new();
    let mut stack: Vec<usize> = from.to_vec();
    while let Some(x) = stack.pop() {
        for &y in &succ[x] {
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen
}

/// Reorders the word by exchanges so that nodes of smaller class come
/// first, as far as exchanges allow.
fn class_sort(word: &mut [Slice], labels: &mut [usize], class: &[u8]) {
    let n = word.len();
    let mut changed = true;
    let mut rounds = 0;
    while changed && rounds <= n * n + 1 {
        changed = false;
        rounds += 1;
        for i in 0..n.saturating_sub(1) {
            if class[labels[i + 1]] < class[labels[i]] {
                if let Some(&(u, l)) = exchange_pairs(word[i], word[i + 1]).first() {
                    word[i] = u;
                    word[i + 1] = l;
                    labels.swap(i, i + 1);
                    changed = true;
                }
            }
        }
    }
}

fn place(target: &Circuit, pattern: &Circuit, set: &[usize]) -> Option<Window> {
    let word = target.slices();
    let n = word.len();
    let src = sources(target.inputs(), word);
    let mut succ = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    for (k, ss) in src.iter().enumerate() {
        for s in ss {
            if let Source::Node(x, _) = *s {
                succ[x].push(k);
                pred[k].push(x);
            }
        }
    }
    let anc = reachable(&pred, set);
    let desc = reachable(&succ, set);
    if anc.iter().any(|x| desc.contains(x) && !set.contains(x)) {
        return None;
    }

    let labels: Vec<usize> = (0..n).collect();
    let attempts: [fn(&Slice) -> u8; 2] = [
        |s| if s.outputs == 0 { 0 } else { 2 },
        |s| if s.inputs == 0 { 2 } else { 0 },
    ];
    for free in attempts {
        let class: Vec<u8> = (0..n)
            .map(|x| {
                if set.contains(&x) {
                    1
                } else if anc.contains(&x) {
                    0
                } else if desc.contains(&x) {
                    2
                } else {
                    free(&word[x])
                }
            })
            .collect();
        let mut w = word.to_vec();
        let mut l = labels.clone();
        class_sort(&mut w, &mut l, &class);
        if let Some((start, left)) = window_at(target.inputs(), &w, &l, set, pattern) {
            return Some(Window {
                word: w,
                labels: l,
                start,
                left,
            });
        }
    }

    // Closed pieces and nodes without inputs or outputs can block the
    // greedy order; explore the exchange class directly.
    if word.iter().all(|s| s.inputs > 0 && s.outputs > 0) {
        return None;
    }
    let mut seen: HashSet<(Vec<Slice>, Vec<usize>)> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert((word.to_vec(), labels.clone()));
    queue.push_back((word.to_vec(), labels));
    while let Some((w, l)) = queue.pop_front() {
        if let Some((start, left)) = window_at(target.inputs(), &w, &l, set, pattern) {
            return Some(Window {
                word: w,
                labels: l,
                start,
                left,
            });
        }
        for i in 0..n.saturating_sub(1) {
            for (u, lo) in exchange_pairs(w[i], w[i + 1]) {
                let mut w2 = w.clone();
                let mut l2 = l.clone();
                w2[i] = u;
                w2[i + 1] = lo;
                l2.swap(i, i + 1);
                if seen.len() < SEARCH_LIMIT && seen.insert((w2.clone(), l2.clone())) {
                    queue.push_back((w2, l2));
                }
            }
        }
    }
    None
}

/// Every occurrence of the rule's left-hand side in `f`, ordered by the
/// topmost, then leftmost, covered node.
pub fn find_matches(f: &Circuit, rule: &Rule) -> Vec<Occurrence> {
    find_pattern(f, rule.lhs())
}

pub fn find_pattern(f: &Circuit, pattern: &Circuit) -> Vec<Occurrence> {
    if pattern.is_identity() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for set in embeddings(f, pattern) {
        let Some(win) = place(f, pattern, &set) else {
            continue;
        };
        let len = set.len();
        let widths = word_widths(f.inputs(), &win.word);
        let above = Circuit::from_slices(f.inputs(), win.word[..win.start].to_vec())
            .expect("prefix of a well-formed word");
        let below = Circuit::from_slices(widths[win.start + len], win.word[win.start + len..].to_vec())
            .expect("suffix of a well-formed word");
        let right = widths[win.start] - win.left - pattern.inputs();
        debug_assert_eq!(win.labels.len(), win.word.len());
        out.push(Occurrence {
            above,
            below,
            left: win.left,
            right,
            nodes: set,
        });
    }
    let pads: Vec<usize> = f.slices().iter().map(|s| s.pad).collect();
    out.sort_by_key(|o| (o.nodes[0], pads[o.nodes[0]], o.nodes.clone()));
    out
}

/// Replaces the left-hand side at `occ` by the right-hand side.
pub fn apply_at(f: &Circuit, occ: &Occurrence, rule: &Rule) -> Result<Circuit, RewriteError> {
    match occ.rebuild(rule.lhs()) {
        Ok(c) if &c == f => Ok(occ.rebuild(rule.rhs())?),
        _ => Err(RewriteError::StaleOccurrence),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub rule: String,
    pub occurrence: Occurrence,
    pub result: Circuit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceStatus {
    Normalized,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub start: Circuit,
    pub steps: Vec<Step>,
    pub status: TraceStatus,
}

impl ReductionTrace {
    pub fn last(&self) -> &Circuit {
        self.steps.last().map_or(&self.start, |s| &s.result)
    }

    /// The start circuit followed by every intermediate result.
    pub fn circuits(&self) -> impl Iterator<Item = &Circuit> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|s| &s.result))
    }
}

/// Applies the first rule that matches, at its first occurrence.
pub fn rewrite_once(f: &Circuit, p: &Polygraph) -> Option<(String, Occurrence, Circuit)> {
    for rule in p.rules() {
        if let Some(occ) = find_matches(f, rule).into_iter().next() {
            let g = apply_at(f, &occ, rule).expect("fresh occurrence");
            return Some((rule.name().to_string(), occ, g));
        }
    }
    None
}

pub fn normalize(f: &Circuit, p: &Polygraph, budget: usize) -> ReductionTrace {
    let mut steps: Vec<Step> = Vec::new();
    let mut cur = f.clone();
    loop {
        if steps.len() == budget {
            let status = if rewrite_once(&cur, p).is_some() {
                TraceStatus::BudgetExhausted
            } else {
                TraceStatus::Normalized
            };
            return ReductionTrace {
                start: f.clone(),
                steps,
                status,
            };
        }
        match rewrite_once(&cur, p) {
            None => {
                return ReductionTrace {
                    start: f.clone(),
                    steps,
                    status: TraceStatus::Normalized,
                }
            }
            Some((rule, occurrence, next)) => {
                cur = next.clone();
                steps.push(Step {
                    rule,
                    occurrence,
                    result: next,
                });
            }
        }
    }
}
