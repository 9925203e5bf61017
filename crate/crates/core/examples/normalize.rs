//! Normalizing combs of merges with the associativity rule.

use polygraph::diagram::Circuit;
use polygraph::format::parse;
use polygraph::rewrite::normalize;

const ASSOC: &str = include_str!("assoc.poly");

fn main() {
    let file = parse(ASSOC).unwrap();
    let sig = file.signature();
    let mu = sig.generator("mu").unwrap();
    for n in 2..=6 {
        let comb = (2..=n).rev().fold(Circuit::identity(n), |acc, w| {
            acc.vcomp(&mu.hcomp(&Circuit::identity(w - 2))).unwrap()
        });
        let trace = normalize(&comb, &file.polygraph, 100);
        println!("{n} inputs: {:?} after {} steps", trace.status, trace.steps.len());
        println!("  {}", trace.last().display(sig));
    }
}
