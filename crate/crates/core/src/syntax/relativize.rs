use super::{Formula, Symbol, Term, Vocabulary, VocabularyError};

/// `U(x)` for one variable, `And[U(x0); ...]` for a block.
pub fn guard(vars: &[Symbol], u: &Symbol) -> Formula {
    let mut atoms: Vec<Formula> = vars
        .iter()
        .map(|v| Formula::Atom(u.clone(), vec![Term::Var(v.clone())]))
        .collect();
    if atoms.len() == 1 {
        atoms.pop().unwrap()
    } else {
        Formula::And(atoms)
    }
}

/// Bounds every quantifier block by `u`. Terms (including iota bodies) are
/// left as they are.
pub fn relativize(f: &Formula, u: &Symbol) -> Formula {
    match f {
        Formula::Atom(..) | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => Formula::not(relativize(g, u)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| relativize(g, u)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| relativize(g, u)).collect()),
        Formula::Imp(a, b) => Formula::imp(relativize(a, u), relativize(b, u)),
        Formula::Forall(vs, g) => {
            Formula::forall(vs.clone(), Formula::imp(guard(vs, u), relativize(g, u)))
        }
        Formula::Exists(vs, g) => Formula::exists(vs.clone(), guarded_and(vs, u, relativize(g, u))),
    }
}

/// `And[U(x0); ...; U(xn); body]`.
pub(crate) fn guarded_and(vars: &[Symbol], u: &Symbol, body: Formula) -> Formula {
    let mut parts: Vec<Formula> = vars
        .iter()
        .map(|v| Formula::Atom(u.clone(), vec![Term::Var(v.clone())]))
        .collect();
    parts.push(body);
    Formula::And(parts)
}

/// Splits `And[U(x0); ...; U(xn); body]` into `body` when the guards match `vars`.
pub(crate) fn strip_guarded_and<'a>(
    f: &'a Formula,
    vars: &[Symbol],
    u: &Symbol,
) -> Option<&'a Formula> {
    match f {
        Formula::And(parts) if parts.len() == vars.len() + 1 => {
            let ok = vars.iter().zip(parts).all(|(v, p)| is_guard_atom(p, v, u));
            ok.then(|| &parts[vars.len()])
        }
        _ => None,
    }
}

/// Splits `guard(vars) -> body` into `body`.
pub(crate) fn strip_guarded_imp<'a>(
    f: &'a Formula,
    vars: &[Symbol],
    u: &Symbol,
) -> Option<&'a Formula> {
    match f {
        Formula::Imp(g, body) if **g == guard(vars, u) => Some(body),
        _ => None,
    }
}

fn is_guard_atom(f: &Formula, v: &Symbol, u: &Symbol) -> bool {
    matches!(f, Formula::Atom(r, args) if r == u && args.len() == 1 && args[0] == Term::Var(v.clone()))
}

pub fn relativize_checked(
    f: &Formula,
    u: &Symbol,
    vocab: &Vocabulary,
) -> Result<Formula, VocabularyError> {
    vocab.require_unary(u)?;
    Ok(relativize(f, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn vocab() -> Vocabulary {
        Vocabulary::new()
            .with_relation("<", 2)
            .with_relation("P", 1)
            .with_predicate("U")
            .with_constant("c")
    }

    fn rel(s: &str) -> String {
        let v = vocab();
        relativize_checked(&parse_formula(s, &v).unwrap(), &Symbol::new("U"), &v)
            .unwrap()
            .to_string()
    }

    #[test]
    fn universal_gets_implication_guard() {
        assert_eq!(rel("forall x . P(x)"), "forall x . (U(x) -> P(x))");
    }

    #[test]
    fn atoms_are_fixed() {
        assert_eq!(rel("P(c)"), "P(c)");
    }

    #[test]
    fn existential_gets_conjunction_guard() {
        assert_eq!(rel("exists x . x < c"), "exists x . (U(x) & x < c)");
    }

    #[test]
    fn blocks_guard_every_variable() {
        assert_eq!(
            rel("forall x y . x < y"),
            "forall x y . ((U(x) & U(y)) -> x < y)"
        );
        assert_eq!(
            rel("exists x y . x < y"),
            "exists x y . And[U(x); U(y); x < y]"
        );
    }

    #[test]
    fn rejects_non_unary_predicate() {
        let v = vocab();
        let f = parse_formula("P(c)", &v).unwrap();
        assert!(relativize_checked(&f, &Symbol::new("<"), &v).is_err());
    }
}
