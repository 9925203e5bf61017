//! The multiset order used to compare heats.

use polygraph::multiset::{mcompare, msum, Multiset};

fn main() {
    let three_ones: Multiset = [1, 1, 1].into_iter().collect();
    let two = Multiset::singleton(2);
    println!("{three_ones} vs {two}: {:?}", mcompare(&three_ones, &two));

    let a: Multiset = [3, 1].into_iter().collect();
    let b: Multiset = [2, 2].into_iter().collect();
    println!("{a} vs {b}: {:?}", mcompare(&a, &b));

    let c: Multiset = [5, 0].into_iter().collect();
    println!("{} vs {}: {:?}", msum(&a, &c), msum(&b, &c), mcompare(&msum(&a, &c), &msum(&b, &c)));

    // A descending chain: each step trades the largest element for two
    // copies of its predecessor.
    let mut m = Multiset::singleton(3);
    for _ in 0..5 {
        let top = m.descending().next().unwrap_or(0);
        if top == 0 {
            break;
        }
        let mut next: Multiset = m.descending().skip(1).collect();
        next.insert_many(top - 1, 2);
        println!("{m} > {next}: {}", m > next);
        m = next;
    }
}
