//! Parsing, rendering and the provenance notes of `.poly` files.

use polygraph::format::{parse, render};

fn main() {
    let file = parse(include_str!("lz2.poly")).unwrap();
    for (key, tag) in &file.provenance {
        println!("{key:20} {tag}");
    }
    let text = render(&file);
    assert_eq!(parse(&text).unwrap(), file);
    println!("\n{text}");

    match parse("gen mu : 2 -> 1\nrule bad : mu => mu * mu") {
        Ok(_) => unreachable!(),
        Err(e) => println!("error at {e}"),
    }
}
