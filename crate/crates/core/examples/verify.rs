//! Certifying termination of the bundled polygraphs.

use polygraph::format::parse;
use polygraph::termination::{check_polygraph, VerificationMode};

fn main() {
    for (name, text) in [
        ("assoc.poly", include_str!("assoc.poly")),
        ("bialgebra.poly", include_str!("bialgebra.poly")),
        ("reflexive.poly", include_str!("reflexive.poly")),
    ] {
        let file = parse(text).unwrap();
        let a = file.interpretation.as_ref().unwrap();
        for mode in [VerificationMode::BoundedGrid { bound: 4 }, VerificationMode::AffineExact] {
            println!("== {name} in {mode}");
            match check_polygraph(&file.polygraph, a, mode) {
                Ok(report) => print!("{report}"),
                Err(e) => println!("error: {e}"),
            }
        }
    }
}
