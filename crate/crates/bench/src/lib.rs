//! Fixtures shared by the benchmarks in `benches/`.

use restrule::deduction::DeductiveSystem;
use restrule::diagrams::{diagram, Theory, ThetaSet};
use restrule::structures::{defining_formula, Structure};
use restrule::universe::{GenOptions, SentenceUniverse};
use restrule::{Term, Vocabulary};

pub fn vocabulary() -> Vocabulary {
    Vocabulary::new()
        .with_relation("<", 2)
        .with_relation("P", 1)
        .with_constant("c")
}

/// A strict linear order on `n` elements with `P` on the even ones and
/// `c` naming the least element.
pub fn chain(n: usize) -> Structure {
    let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut b = Structure::builder(&format!("chain{n}"), vocabulary()).elements(&names);
    for i in 0..n {
        for j in i + 1..n {
            b = b.tuple("<", &[&names[i], &names[j]]);
        }
        if i % 2 == 0 {
            b = b.tuple("P", &[&names[i]]);
        }
    }
    b.constant("c", &names[0])
        .build()
        .expect("well-formed chain")
}

pub fn thetas(a: &Structure) -> ThetaSet {
    ThetaSet::new(
        a.elements()
            .map(|e| defining_formula(a, e).expect("rigid"))
            .collect(),
    )
}

pub fn universe(depth: usize) -> SentenceUniverse {
    SentenceUniverse::generate(&vocabulary(), depth, &GenOptions::default())
}

/// Dg of a chain named by fresh constants, with the matching S-rule.
pub fn named_chain(n: usize) -> (Theory, DeductiveSystem, SentenceUniverse) {
    let names: Vec<String> = (0..n).map(|i| format!("k{i}")).collect();
    let mut v = vocabulary();
    for k in &names {
        v.add_constant(k).expect("fresh");
    }
    let elems: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut b = Structure::builder("named", v.clone())
        .elements(&elems)
        .constant("c", &elems[0]);
    for i in 0..n {
        b = b.constant(&names[i], &elems[i]);
        for j in i + 1..n {
            b = b.tuple("<", &[&elems[i], &elems[j]]);
        }
    }
    let a = b.build().expect("well-formed");
    let terms = names.iter().map(|k| Term::constant(k)).collect();
    let opts = GenOptions {
        max_sentences: 300,
        ..GenOptions::default()
    };
    (
        diagram(&a).expect("named"),
        DeductiveSystem::s_rule(terms),
        SentenceUniverse::generate(&v, 2, &opts),
    )
}
