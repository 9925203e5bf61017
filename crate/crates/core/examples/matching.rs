//! Finding every occurrence of a rule's left-hand side in a circuit.

use polygraph::format::parse;
use polygraph::rewrite::{apply_at, find_matches};

fn main() {
    let file = parse(
        "gen mu : 2 -> 1
         rule assoc : (mu * id:1) ; mu => (id:1 * mu) ; mu",
    )
    .unwrap();
    let sig = file.signature();
    let rule = file.polygraph.rule("assoc").unwrap();
    let f = file.term("(mu * mu * id:1) ; (mu * id:1) ; mu").unwrap();
    println!("target: {}", f.display(sig));
    for occ in find_matches(&f, rule) {
        println!(
            "nodes {:?}: above {} | left {} right {} | below {}",
            occ.nodes,
            occ.above.display(sig),
            occ.left,
            occ.right,
            occ.below.display(sig)
        );
        println!("  rewrites to {}", apply_at(&f, &occ, rule).unwrap().display(sig));
    }
}
