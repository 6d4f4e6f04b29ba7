use super::{Formula, Symbol, Term};
use std::collections::{BTreeMap, BTreeSet};

pub type Substitution = BTreeMap<Symbol, Term>;

/// A variant of `base` (by appending primes) not contained in `avoid`.
pub fn fresh_var(base: &Symbol, avoid: &BTreeSet<Symbol>) -> Symbol {
    let mut name = base.as_str().to_string();
    loop {
        name.push('\'');
        let candidate = Symbol::new(&name);
        if !avoid.contains(&candidate) {
            return candidate;
        }
    }
}

/// Simultaneous capture-avoiding substitution of terms for free variables.
pub fn substitute(f: &Formula, map: &Substitution) -> Formula {
    if map.is_empty() {
        return f.clone();
    }
    subst_formula(f, map)
}

fn subst_term(t: &Term, map: &Substitution) -> Term {
    match t {
        Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Const(_) => t.clone(),
        Term::App(g, args) => {
            Term::App(g.clone(), args.iter().map(|a| subst_term(a, map)).collect())
        }
        Term::Iota(v, body) => {
            let (vars, body) = subst_binder(std::slice::from_ref(v), body, map);
            Term::Iota(vars.into_iter().next().unwrap(), Box::new(body))
        }
    }
}

fn subst_formula(f: &Formula, map: &Substitution) -> Formula {
    match f {
        Formula::Atom(r, args) => {
            Formula::Atom(r.clone(), args.iter().map(|a| subst_term(a, map)).collect())
        }
        Formula::Eq(a, b) => Formula::Eq(subst_term(a, map), subst_term(b, map)),
        Formula::Not(g) => Formula::not(subst_formula(g, map)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| subst_formula(g, map)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| subst_formula(g, map)).collect()),
        Formula::Imp(a, b) => Formula::imp(subst_formula(a, map), subst_formula(b, map)),
        Formula::Forall(vs, g) => {
            let (vs, g) = subst_binder(vs, g, map);
            Formula::forall(vs, g)
        }
        Formula::Exists(vs, g) => {
            let (vs, g) = subst_binder(vs, g, map);
            Formula::exists(vs, g)
        }
    }
}

fn subst_binder(vars: &[Symbol], body: &Formula, map: &Substitution) -> (Vec<Symbol>, Formula) {
    let body_free = body.free_vars();
    let inner: Substitution = map
        .iter()
        .filter(|(k, _)| !vars.contains(k) && body_free.contains(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if inner.is_empty() {
        return (vars.to_vec(), body.clone());
    }
    let incoming: BTreeSet<Symbol> = inner.values().flat_map(Term::free_vars).collect();
    if vars.iter().all(|v| !incoming.contains(v)) {
        return (vars.to_vec(), subst_formula(body, &inner));
    }
    let mut avoid: BTreeSet<Symbol> = body_free;
    avoid.extend(incoming.iter().cloned());
    avoid.extend(vars.iter().cloned());
    let mut renamed = Vec::with_capacity(vars.len());
    let mut full = inner;
    for v in vars {
        if incoming.contains(v) {
            let nv = fresh_var(v, &avoid);
            avoid.insert(nv.clone());
            full.insert(v.clone(), Term::Var(nv.clone()));
            renamed.push(nv);
        } else {
            renamed.push(v.clone());
        }
    }
    (renamed, subst_formula(body, &full))
}

/// Renames every bound variable to a name determined by its binding
/// depth. Two formulas are alpha-equivalent iff their canonical forms are
/// equal.
pub fn canonical(f: &Formula) -> Formula {
    canon_formula(f, &mut Vec::new())
}

pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    a == b || canonical(a) == canonical(b)
}

fn level_name(k: usize) -> Symbol {
    Symbol::from(format!("%{k}"))
}

fn lookup(env: &[(Symbol, Symbol)], v: &Symbol) -> Option<Symbol> {
    env.iter()
        .rev()
        .find(|(o, _)| o == v)
        .map(|(_, n)| n.clone())
}

fn canon_term(t: &Term, env: &mut Vec<(Symbol, Symbol)>) -> Term {
    match t {
        Term::Var(v) => Term::Var(lookup(env, v).unwrap_or_else(|| v.clone())),
        Term::Const(_) => t.clone(),
        Term::App(g, args) => {
            Term::App(g.clone(), args.iter().map(|a| canon_term(a, env)).collect())
        }
        Term::Iota(v, body) => {
            let n = level_name(env.len());
            env.push((v.clone(), n.clone()));
            let body = canon_formula(body, env);
            env.pop();
            Term::Iota(n, Box::new(body))
        }
    }
}

fn canon_formula(f: &Formula, env: &mut Vec<(Symbol, Symbol)>) -> Formula {
    match f {
        Formula::Atom(r, args) => {
            Formula::Atom(r.clone(), args.iter().map(|a| canon_term(a, env)).collect())
        }
        Formula::Eq(a, b) => Formula::Eq(canon_term(a, env), canon_term(b, env)),
        Formula::Not(g) => Formula::not(canon_formula(g, env)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| canon_formula(g, env)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| canon_formula(g, env)).collect()),
        Formula::Imp(a, b) => Formula::imp(canon_formula(a, env), canon_formula(b, env)),
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let depth = env.len();
            let names: Vec<Symbol> = (0..vs.len()).map(|i| level_name(depth + i)).collect();
            env.extend(vs.iter().cloned().zip(names.iter().cloned()));
            let body = canon_formula(g, env);
            env.truncate(depth);
            if matches!(f, Formula::Forall(..)) {
                Formula::forall(names, body)
            } else {
                Formula::exists(names, body)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lt(a: Term, b: Term) -> Formula {
        Formula::atom("<", vec![a, b])
    }

    #[test]
    fn substitutes_single_occurrence() {
        let f = lt(Term::var("x"), Term::constant("c"));
        let map = Substitution::from([(Symbol::new("x"), Term::constant("t_a"))]);
        assert_eq!(
            substitute(&f, &map),
            lt(Term::constant("t_a"), Term::constant("c"))
        );
    }

    #[test]
    fn renames_to_avoid_capture() {
        let f = Formula::forall1("x", lt(Term::var("x"), Term::var("y")));
        let map = Substitution::from([(Symbol::new("y"), Term::var("x"))]);
        let g = substitute(&f, &map);
        assert_eq!(
            g,
            Formula::forall1("x'", lt(Term::var("x'"), Term::var("x")))
        );
    }

    #[test]
    fn bound_variables_are_untouched() {
        let f = Formula::forall1("x", lt(Term::var("x"), Term::var("y")));
        let map = Substitution::from([(Symbol::new("x"), Term::constant("c"))]);
        assert_eq!(substitute(&f, &map), f);
    }

    #[test]
    fn simultaneous_substitution_reproduces_tuple_instance() {
        let f = lt(Term::var("x0"), Term::var("x1"));
        let map = Substitution::from([
            (Symbol::new("x0"), Term::var("x1")),
            (Symbol::new("x1"), Term::constant("c_b")),
        ]);
        assert_eq!(
            substitute(&f, &map),
            lt(Term::var("x1"), Term::constant("c_b"))
        );
    }

    #[test]
    fn alpha_equivalence() {
        let a = Formula::forall1("x", lt(Term::var("x"), Term::var("z")));
        let b = Formula::forall1("y", lt(Term::var("y"), Term::var("z")));
        let c = Formula::forall1("y", lt(Term::var("y"), Term::var("w")));
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &c));
    }
}
