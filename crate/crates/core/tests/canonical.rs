mod common;

use std::collections::HashSet;

use common::*;
use polygraph::diagram::{Circuit, Signature};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rich_signature() -> Signature {
    signature(&[
        ("eta", 0, 1),
        ("eps", 1, 0),
        ("mu", 2, 1),
        ("delta", 1, 2),
        ("phi", 1, 1),
        ("s", 0, 0),
        ("t", 0, 0),
    ])
}

/// Every word of an exchange class must canonicalize to one circuit, and
/// that circuit's word must belong to the class.
#[test]
fn canonical_form_is_a_class_invariant() {
    let sig = rich_signature();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 3000 {
        let inputs = rng.gen_range(0..4);
        let w = random_word(&mut rng, &sig, inputs, 8);
        let Some(class) = exchange_class(&w, 2000) else {
            continue;
        };
        checked += 1;
        let words: HashSet<_> = class.into_iter().map(|(w, _)| w).collect();
        let forms: HashSet<Circuit> = words
            .iter()
            .map(|w| Circuit::from_slices(inputs, w.clone()).unwrap())
            .collect();
        assert_eq!(forms.len(), 1, "several canonical forms for {w:?}");
        let c = forms.into_iter().next().unwrap();
        assert!(words.contains(c.slices()), "canonical word left the class of {w:?}");
    }
}

#[test]
fn closed_components_nest() {
    let sig = rich_signature();
    let g = |n: &str| sig.generator(n).unwrap();
    let (s, id1) = (g("s"), Circuit::identity(1));
    // A path does not separate the plane: both sides are one face.
    let path_left = g("eta").vcomp(&s.hcomp(&g("phi"))).unwrap().vcomp(&g("eps")).unwrap();
    let path_right = g("eta").vcomp(&g("phi").hcomp(&s)).unwrap().vcomp(&g("eps")).unwrap();
    assert_eq!(path_left, path_right);
    // A loop does: inside and outside differ.
    let ring = |middle: &Circuit| {
        g("eta")
            .vcomp(&g("delta"))
            .unwrap()
            .vcomp(middle)
            .unwrap()
            .vcomp(&g("mu"))
            .unwrap()
            .vcomp(&g("eps"))
            .unwrap()
    };
    let inside = ring(&id1.hcomp(&s).hcomp(&id1));
    let outside = ring(&Circuit::identity(2)).hcomp(&s);
    assert_ne!(inside, outside);
    assert_eq!(outside, s.hcomp(&ring(&Circuit::identity(2))));
    assert_eq!(outside, s.vcomp(&ring(&Circuit::identity(2))).unwrap());
    assert_eq!(inside.len(), 5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_walks_keep_the_form(seed in any::<u64>(), inputs in 0usize..4) {
        let sig = rich_signature();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_word(&mut rng, &sig, inputs, 10);
        let c = Circuit::from_slices(inputs, w.clone()).unwrap();
        let walked = exchange_walk(&mut rng, &w, 40);
        prop_assert_eq!(Circuit::from_slices(inputs, walked).unwrap(), c.clone());
        prop_assert_eq!(Circuit::from_slices(inputs, c.slices().to_vec()).unwrap(), c);
    }

    #[test]
    fn composition_laws(seed in any::<u64>()) {
        let sig = rich_signature();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pick = |m: usize| {
            let mut fuel = 4;
            random_term(&mut rng, &sig, m, &mut fuel, 4).build(&sig)
        };
        let f = pick(1);
        let g = pick(f.outputs());
        let h = pick(g.outputs());
        let k = pick(2);
        prop_assert_eq!(f.vcomp(&g).unwrap().vcomp(&h).unwrap(), f.vcomp(&g.vcomp(&h).unwrap()).unwrap());
        prop_assert_eq!(f.hcomp(&k).hcomp(&h), f.hcomp(&k.hcomp(&h)));
        prop_assert_eq!(Circuit::identity(f.inputs()).vcomp(&f).unwrap(), f.clone());
        prop_assert_eq!(f.hcomp(&Circuit::identity(0)), f.clone());
        // Interchange: (f * k) ; (g * k') = (f ; g) * (k ; k').
        let k2 = {
            let mut fuel = 3;
            random_term(&mut ChaCha8Rng::seed_from_u64(seed ^ 7), &sig, k.outputs(), &mut fuel, 3).build(&sig)
        };
        prop_assert_eq!(
            f.hcomp(&k).vcomp(&g.hcomp(&k2)).unwrap(),
            f.vcomp(&g).unwrap().hcomp(&k.vcomp(&k2).unwrap())
        );
        prop_assert_eq!(f.whisker(1, 2), Circuit::identity(1).hcomp(&f).hcomp(&Circuit::identity(2)));
    }
}
