//! The L(Z2) interpretation: verify the bundled rules, then rewrite random
//! circuits to normal form while auditing the heat at every step.

use polygraph::diagram::Circuit;
use polygraph::format::parse;
use polygraph::rewrite::normalize;
use polygraph::termination::{audit_heat_descent, check_polygraph, VerificationMode};

fn main() {
    let file = parse(include_str!("lz2.poly")).unwrap();
    let sig = file.signature();
    let a = file.interpretation.as_ref().unwrap();
    let report = check_polygraph(&file.polygraph, a, VerificationMode::BoundedGrid { bound: 3 }).unwrap();
    print!("{report}");

    for term in [
        "delta ; (delta * id:1) ; (id:1 * tau) ; (mu * id:1) ; mu",
        "(eta * id:1) ; tau ; (delta * eps)",
        "(delta * delta) ; (id:1 * tau * id:1) ; (mu * mu)",
    ] {
        let f: Circuit = file.term(term).unwrap();
        let trace = normalize(&f, &file.polygraph, 1000);
        let x = vec![1; f.inputs()];
        let y = vec![1; f.outputs()];
        let descends = audit_heat_descent(&trace, a, &x, &y).unwrap();
        println!("\n{}", f.display(sig));
        for s in &trace.steps {
            println!("  {:>14} -> {}", s.rule, s.result.display(sig));
        }
        println!("  {:?} in {} steps, heat descends: {descends}", trace.status, trace.steps.len());
    }
}
