mod common;

use std::collections::{BTreeSet, HashMap};

use common::*;
use polygraph::diagram::{Circuit, Signature};
use polygraph::format::parse;
use polygraph::rewrite::{
    apply_at, find_matches, find_pattern, normalize, rewrite_once, Occurrence, Polygraph,
    RewriteError, Rule, TraceStatus,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assoc() -> (Signature, Rule) {
    let file = parse("gen mu : 2 -> 1\nrule assoc : (mu * id:1) ; mu => (id:1 * mu) ; mu").unwrap();
    let rule = file.polygraph.rules()[0].clone();
    (file.polygraph.signature, rule)
}

fn assoc_polygraph() -> Polygraph {
    let (sig, rule) = assoc();
    let mut p = Polygraph::new(sig);
    p.add_rule(rule).unwrap();
    p
}

/// `mu` applied to the first two of `n` wires, `n - 1` times.
fn left_comb(sig: &Signature, n: usize) -> Circuit {
    let mu = sig.generator("mu").unwrap();
    (2..=n).rev().fold(Circuit::identity(n), |acc, w| {
        acc.vcomp(&mu.hcomp(&Circuit::identity(w - 2))).unwrap()
    })
}

fn right_comb(sig: &Signature, n: usize) -> Circuit {
    let mu = sig.generator("mu").unwrap();
    (2..=n).rev().fold(Circuit::identity(n), |acc, w| {
        acc.vcomp(&Circuit::identity(w - 2).hcomp(&mu)).unwrap()
    })
}

#[test]
fn trivial_occurrence() {
    let (_, r) = assoc();
    let occs = find_matches(r.lhs(), &r);
    let trivial = occs
        .iter()
        .find(|o| o.left == 0 && o.right == 0 && o.above.is_identity() && o.below.is_identity())
        .expect("self-match");
    assert_eq!(trivial.above, Circuit::identity(3));
    assert_eq!(trivial.below, Circuit::identity(1));
    assert_eq!(&apply_at(r.lhs(), trivial, &r).unwrap(), r.rhs());
    assert!(find_matches(&Circuit::identity(5), &r).is_empty());
}

#[test]
fn single_generator_occurs_twice_in_a_comb() {
    let (sig, _) = assoc();
    let mu = sig.generator("mu").unwrap();
    let f = left_comb(&sig, 3);
    let occs = find_pattern(&f, &mu);
    assert_eq!(occs.len(), 2);
    assert_eq!(brute_force_matches(&f, &mu).len(), 2);
    for o in &occs {
        assert_eq!(o.rebuild(&mu).unwrap(), f);
    }
}

#[test]
fn rewriting_under_a_whisker() {
    let (sig, r) = assoc();
    let f = left_comb(&sig, 3).hcomp(&Circuit::identity(1));
    let occs: Vec<Occurrence> = find_matches(&f, &r).into_iter().filter(|o| o.right == 1).collect();
    assert_eq!(occs.len(), 1);
    let g = apply_at(&f, &occs[0], &r).unwrap();
    assert_eq!(g, right_comb(&sig, 3).hcomp(&Circuit::identity(1)));
    assert_eq!(g.interface(), f.interface());
}

#[test]
fn stale_occurrences_are_refused() {
    let (sig, r) = assoc();
    let f = left_comb(&sig, 3);
    let occ = find_matches(&f, &r).remove(0);
    let other = left_comb(&sig, 3).hcomp(&Circuit::identity(1));
    assert_eq!(apply_at(&other, &occ, &r), Err(RewriteError::StaleOccurrence));
}

#[test]
fn rules_are_checked() {
    let (sig, r) = assoc();
    let mu = sig.generator("mu").unwrap();
    assert!(matches!(
        Rule::new("x", Circuit::identity(2), Circuit::identity(2)),
        Err(RewriteError::IdentityLhs(_))
    ));
    assert!(matches!(
        Rule::new("x", mu.clone(), Circuit::identity(2)),
        Err(RewriteError::NotParallel { .. })
    ));
    let mut p = Polygraph::new(sig);
    p.add_rule(r.clone()).unwrap();
    assert_eq!(p.add_rule(r), Err(RewriteError::DuplicateRule("assoc".into())));
}

#[test]
fn single_steps() {
    let p = assoc_polygraph();
    let r = &p.rules()[0];
    assert!(rewrite_once(r.rhs(), &p).is_none());
    let (name, _, g) = rewrite_once(r.lhs(), &p).unwrap();
    assert_eq!((name.as_str(), &g), ("assoc", r.rhs()));
    let f = left_comb(&p.signature, 5);
    assert_eq!(rewrite_once(&f, &p), rewrite_once(&f.clone(), &p));
}

#[test]
fn normalizing() {
    let p = assoc_polygraph();
    let r = &p.rules()[0];
    let t = normalize(r.rhs(), &p, 10);
    assert_eq!((t.steps.len(), t.status), (0, TraceStatus::Normalized));
    let t = normalize(r.lhs(), &p, 10);
    assert_eq!((t.steps.len(), t.status), (1, TraceStatus::Normalized));
    let t = normalize(&left_comb(&p.signature, 6), &p, 2);
    assert_eq!((t.steps.len(), t.status), (2, TraceStatus::BudgetExhausted));
    let t = normalize(r.lhs(), &p, 0);
    assert_eq!((t.steps.len(), t.status), (0, TraceStatus::BudgetExhausted));
}

/// Every reduct of `f`, computed from all occurrences.
fn successors(f: &Circuit, p: &Polygraph) -> Vec<Circuit> {
    p.rules()
        .iter()
        .flat_map(|r| find_matches(f, r).into_iter().map(move |o| apply_at(f, &o, r).unwrap()))
        .collect()
}

/// Longest reduction from `f`, and the set of normal forms it can reach.
fn explore(
    f: &Circuit,
    p: &Polygraph,
    memo: &mut HashMap<Circuit, (usize, BTreeSet<Vec<u8>>)>,
) -> (usize, BTreeSet<Vec<u8>>) {
    if let Some(v) = memo.get(f) {
        return v.clone();
    }
    let next = successors(f, p);
    let out = if next.is_empty() {
        (0, BTreeSet::from([serde_json::to_vec(f).unwrap()]))
    } else {
        let mut longest = 0;
        let mut normal = BTreeSet::new();
        for g in next {
            let (l, n) = explore(&g, p, memo);
            longest = longest.max(l + 1);
            normal.extend(n);
        }
        (longest, normal)
    };
    memo.insert(f.clone(), out.clone());
    out
}

#[test]
fn left_comb_of_four_inputs_reaches_the_right_comb() {
    let p = assoc_polygraph();
    let sig = &p.signature;
    let mut memo = HashMap::new();
    let (longest, normal) = explore(&left_comb(sig, 4), &p, &mut memo);
    assert_eq!(longest, 3);
    assert_eq!(normal, BTreeSet::from([serde_json::to_vec(&right_comb(sig, 4)).unwrap()]));
    // The five bracketings of four inputs.
    assert_eq!(memo.len(), 5);
    let t = normalize(&left_comb(sig, 4), &p, 100);
    assert!(t.steps.len() <= 3);
    assert_eq!(t.last(), &right_comb(sig, 4));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// A rule applies inside any context, and rewriting there yields the
    /// same context around the right-hand side.
    #[test]
    fn closure_under_contexts(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = signature(&[("mu", 2, 1), ("delta", 1, 2), ("eta", 0, 1), ("eps", 1, 0)]);
        let text = "gen mu : 2 -> 1\ngen delta : 1 -> 2\ngen eta : 0 -> 1\ngen eps : 1 -> 0\n\
                    rule r : delta ; mu => eps ; eta\nrule s : eta ; delta => eta * eta";
        let p = parse(text).unwrap().polygraph;
        let r = &p.rules()[rng.gen_range(0..2)];
        let mut fuel = 3;
        let k = rng.gen_range(0..3);
        let mut above = random_term(&mut rng, &sig, k, &mut fuel, 4).build(&sig);
        let need = r.lhs().inputs();
        if above.outputs() < need {
            above = above.hcomp(&Circuit::identity(need - above.outputs()));
        }
        let spare = above.outputs() - need;
        let pl = rng.gen_range(0..=spare);
        let ql = spare - pl;
        let mut fuel = 3;
        let below = random_term(&mut rng, &sig, r.lhs().outputs() + spare, &mut fuel, 4).build(&sig);
        let ctx = |mid: &Circuit| above.vcomp(&mid.whisker(pl, ql)).unwrap().vcomp(&below).unwrap();
        let (f, g) = (ctx(r.lhs()), ctx(r.rhs()));
        let results: Vec<Circuit> = find_matches(&f, r)
            .into_iter()
            .map(|o| {
                assert_eq!(o.rebuild(r.lhs()).unwrap(), f);
                apply_at(&f, &o, r).unwrap()
            })
            .collect();
        prop_assert!(results.contains(&g));
        for c in &results {
            prop_assert_eq!(c.interface(), f.interface());
        }
    }
}
