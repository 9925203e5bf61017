//! Building circuits and comparing them up to isotopy.

use polygraph::diagram::{to_dot, Circuit, Signature};

fn main() {
    let mut sig = Signature::new();
    sig.add("mu", 2, 1).unwrap();
    sig.add("phi", 1, 1).unwrap();
    sig.add("psi", 1, 1).unwrap();
    let mu = sig.generator("mu").unwrap();
    let phi = sig.generator("phi").unwrap();
    let psi = sig.generator("psi").unwrap();
    let id1 = Circuit::identity(1);

    // Sliding two independent boxes past each other gives the same circuit.
    let first = phi.hcomp(&id1).vcomp(&id1.hcomp(&psi)).unwrap();
    let second = id1.hcomp(&psi).vcomp(&phi.hcomp(&id1)).unwrap();
    println!("{}", first.display(&sig));
    println!("{}", second.display(&sig));
    println!("isotopic: {}", first == second);

    let swapped = psi.hcomp(&phi);
    println!("phi * psi == psi * phi: {}", phi.hcomp(&psi) == swapped);

    let comb = mu.hcomp(&id1).vcomp(&mu).unwrap();
    println!("left comb {} has {} slices, widths {:?}", comb.interface(), comb.len(), comb.widths());
    print!("{}", to_dot(&comb, &sig));
}
