use super::{EvalError, Structure};
use crate::syntax::{Formula, Term};
use std::collections::BTreeSet;

/// Every element is the value of some term in `s`.
pub fn is_s_model(a: &Structure, s: &[Term]) -> Result<bool, EvalError> {
    let mut covered = BTreeSet::new();
    for t in s {
        covered.insert(a.eval_term(t, &Default::default())?);
    }
    Ok(covered.len() == a.size())
}

/// The first candidate that is a model of `theory` and an S-model.
pub fn is_s_satisfiable<'a>(
    theory: &[Formula],
    s: &[Term],
    candidates: &'a [Structure],
) -> Result<Option<&'a Structure>, EvalError> {
    for a in candidates {
        if !is_s_model(a, s)? {
            continue;
        }
        let mut all = true;
        for sigma in theory {
            if !a.eval_sentence(sigma)? {
                all = false;
                break;
            }
        }
        if all {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// Agreement on every sentence of `sentences`.
pub fn bounded_elementary_equiv(
    a: &Structure,
    b: &Structure,
    sentences: &[Formula],
) -> Result<bool, EvalError> {
    for sigma in sentences {
        if a.eval_sentence(sigma)? != b.eval_sentence(sigma)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Vocabulary};

    fn named_two_chain() -> Structure {
        let v = Vocabulary::new()
            .with_relation("<", 2)
            .with_constant("c_a")
            .with_constant("c_b");
        Structure::builder("A2", v)
            .elements(["a", "b"])
            .tuple("<", &["a", "b"])
            .constant("c_a", "a")
            .constant("c_b", "b")
            .build()
            .unwrap()
    }

    #[test]
    fn s_models() {
        let a = named_two_chain();
        assert_eq!(
            is_s_model(&a, &[Term::constant("c_a"), Term::constant("c_b")]),
            Ok(true)
        );
        assert_eq!(is_s_model(&a, &[Term::constant("c_a")]), Ok(false));
        assert_eq!(is_s_model(&a, &[]), Ok(false));
    }

    #[test]
    fn s_satisfiability_with_one_constant() {
        let v = Vocabulary::new().with_constant("c");
        let one = Structure::builder("one", v.clone())
            .element("a")
            .constant("c", "a")
            .build()
            .unwrap();
        let two = Structure::builder("two", v.clone())
            .elements(["a", "b"])
            .constant("c", "a")
            .build()
            .unwrap();
        let t = vec![parse_formula("exists x y . ~(x = y)", &v).unwrap()];
        let cands = [one.clone(), two];
        assert_eq!(
            is_s_satisfiable(&t, &[Term::constant("c")], &cands),
            Ok(None)
        );
        assert_eq!(
            is_s_satisfiable(&[], &[Term::constant("c")], &cands),
            Ok(Some(&one))
        );
    }

    #[test]
    fn elementary_equivalence_is_bounded_by_the_sentences() {
        let v = Vocabulary::new().with_relation("<", 2);
        let a = Structure::builder("A2", v.clone())
            .elements(["a", "b"])
            .tuple("<", &["a", "b"])
            .build()
            .unwrap();
        let pair = Structure::builder("pair", v.clone())
            .elements(["a", "b"])
            .build()
            .unwrap();
        let s = vec![parse_formula("exists x y . x < y", &v).unwrap()];
        assert_eq!(bounded_elementary_equiv(&a, &a, &s), Ok(true));
        assert_eq!(bounded_elementary_equiv(&a, &pair, &s), Ok(false));
        assert_eq!(
            bounded_elementary_equiv(&a, &a.relabel(&[1, 0]), &s),
            Ok(true)
        );
    }
}
