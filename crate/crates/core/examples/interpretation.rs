//! Descending currents, ascending currents and heat of a circuit.

use polygraph::format::parse;

const ASSOC: &str = include_str!("assoc.poly");

fn main() {
    let file = parse(ASSOC).unwrap();
    let a = file.interpretation.as_ref().unwrap();
    for term in ["(mu * id:1) ; mu", "(id:1 * mu) ; mu"] {
        let f = file.term(term).unwrap();
        let x = [1, 2, 3];
        let y = [1];
        println!("{term}");
        println!("  down levels {:?}", a.down_levels(&f, &x).unwrap());
        println!("  up levels   {:?}", a.up_levels(&f, &y).unwrap());
        println!("  heat        {}", a.eval_heat(&f, &x, &y).unwrap());
    }
    for (id, gi) in a.iter() {
        let name = &file.signature().decl(id).name;
        println!("{name}: down {:?} heat {}", gi.down.iter().map(|e| e.to_string()).collect::<Vec<_>>(), gi.heat);
    }
}
