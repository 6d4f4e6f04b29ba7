//! Uniqueness prefixes `exists x0..xn (psi & theta0(x0) & ... & thetan(xn))`
//! and the rewrites that move them through connectives and quantifiers.

use super::relativize::{guard, guarded_and, relativize, strip_guarded_and, strip_guarded_imp};
use super::subst::{alpha_eq, canonical, fresh_var, substitute, Substitution};
use super::{Formula, Symbol, Term};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UniquenessError {
    #[error("theta `{body}` must have at most `{var}` free")]
    ThetaFreeVariables { var: Symbol, body: Formula },
    #[error("expected {expected} thetas for the free variables, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("`{0}` is not atomic")]
    NotAtomic(Formula),
    #[error("`{0}` does not have a uniqueness prefix")]
    NotAPrefix(Formula),
    #[error("cannot push a uniqueness prefix into the atomic body `{0}`")]
    AtomicBody(Formula),
    #[error("`{0}` is not a combination of matching uniqueness prefixes")]
    NotPullable(Formula),
}

/// A formula in one distinguished variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Theta {
    pub var: Symbol,
    pub body: Formula,
}

impl Theta {
    pub fn new(var: Symbol, body: Formula) -> Result<Theta, UniquenessError> {
        if body.free_vars().iter().any(|v| *v != var) {
            return Err(UniquenessError::ThetaFreeVariables { var, body });
        }
        Ok(Theta { var, body })
    }

    /// `x = t`.
    pub fn of_term(var: &str, t: Term) -> Theta {
        Theta {
            var: Symbol::new(var),
            body: Formula::Eq(Term::var(var), t),
        }
    }

    pub fn apply(&self, t: &Term) -> Formula {
        if *t == Term::Var(self.var.clone()) {
            return self.body.clone();
        }
        substitute(
            &self.body,
            &Substitution::from([(self.var.clone(), t.clone())]),
        )
    }

    pub fn apply_var(&self, x: &Symbol) -> Formula {
        self.apply(&Term::Var(x.clone()))
    }

    /// `iota x . theta(x)`.
    pub fn to_term(&self) -> Term {
        Term::Iota(self.var.clone(), Box::new(self.body.clone()))
    }
}

impl std::fmt::Display for Theta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} . {}", self.var, self.body)
    }
}

/// Where the body sits among the conjuncts of a prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PrefixOrder {
    /// `And[psi; theta0(x0); ...]`
    #[default]
    BodyFirst,
    /// `And[theta0(x0); ...; psi]`
    ThetaFirst,
}

/// `exists x0..xn And[body; theta0(x0); ...]`. An empty binding list
/// returns `body` itself.
pub fn theta_prefix(bindings: &[(Symbol, &Theta)], body: Formula) -> Formula {
    theta_prefix_with(bindings, body, PrefixOrder::BodyFirst)
}

pub fn theta_prefix_with(
    bindings: &[(Symbol, &Theta)],
    body: Formula,
    order: PrefixOrder,
) -> Formula {
    if bindings.is_empty() {
        return body;
    }
    let vars = bindings.iter().map(|(x, _)| x.clone()).collect();
    let instances = bindings.iter().map(|(x, th)| th.apply_var(x)).collect();
    Formula::exists(vars, assemble(instances, body, order))
}

fn assemble(instances: Vec<Formula>, body: Formula, order: PrefixOrder) -> Formula {
    let mut parts = Vec::with_capacity(instances.len() + 1);
    match order {
        PrefixOrder::BodyFirst => {
            parts.push(body);
            parts.extend(instances);
        }
        PrefixOrder::ThetaFirst => {
            parts.extend(instances);
            parts.push(body);
        }
    }
    Formula::And(parts)
}

/// The Θ-atomic sentence for an atom whose free variables (in order of
/// first occurrence) are bound to `thetas` in turn.
pub fn theta_atomic(atom: &Formula, thetas: &[Theta]) -> Result<Formula, UniquenessError> {
    if !atom.is_atomic() {
        return Err(UniquenessError::NotAtomic(atom.clone()));
    }
    let vars = atom.free_vars_ordered();
    if vars.len() != thetas.len() {
        return Err(UniquenessError::Arity {
            expected: vars.len(),
            found: thetas.len(),
        });
    }
    let bindings: Vec<(Symbol, &Theta)> = vars.into_iter().zip(thetas).collect();
    Ok(theta_prefix(&bindings, atom.clone()))
}

/// A decomposed prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixMatch {
    pub vars: Vec<Symbol>,
    /// Index into the theta list for each variable.
    pub theta_idx: Vec<usize>,
    /// The conjuncts as they occur (relativized when `guarded`).
    pub instances: Vec<Formula>,
    pub body: Formula,
    pub order: PrefixOrder,
    pub guarded: bool,
}

impl PrefixMatch {
    fn same_shape(&self, other: &PrefixMatch) -> bool {
        self.vars == other.vars
            && self.theta_idx == other.theta_idx
            && self.order == other.order
            && self.guarded == other.guarded
    }

    /// Rebuilds the prefix around a new body.
    pub fn rebuild(&self, body: Formula, u: Option<&Symbol>) -> Formula {
        let inner = assemble(self.instances.clone(), body, self.order);
        match (self.guarded, u) {
            (true, Some(u)) => {
                Formula::exists(self.vars.clone(), guarded_and(&self.vars, u, inner))
            }
            _ => Formula::exists(self.vars.clone(), inner),
        }
    }
}

fn find_theta(
    candidate: &Formula,
    x: &Symbol,
    thetas: &[Theta],
    u: Option<&Symbol>,
) -> Option<usize> {
    let instance = |th: &Theta| {
        let inst = th.apply_var(x);
        match u {
            Some(u) => relativize(&inst, u),
            None => inst,
        }
    };
    let insts: Vec<Formula> = thetas.iter().map(instance).collect();
    if let Some(i) = insts.iter().position(|i| i == candidate) {
        return Some(i);
    }
    let key = canonical(candidate);
    insts.iter().position(|i| canonical(i) == key)
}

fn match_inner(
    vars: &[Symbol],
    inner: &Formula,
    thetas: &[Theta],
    u: Option<&Symbol>,
) -> Option<(Vec<usize>, Vec<Formula>, Formula, PrefixOrder)> {
    let Formula::And(parts) = inner else {
        return None;
    };
    let n = vars.len();
    if parts.len() != n + 1 {
        return None;
    }
    for order in [PrefixOrder::BodyFirst, PrefixOrder::ThetaFirst] {
        let (body, insts) = match order {
            PrefixOrder::BodyFirst => (&parts[0], &parts[1..]),
            PrefixOrder::ThetaFirst => (&parts[n], &parts[..n]),
        };
        let idx: Option<Vec<usize>> = vars
            .iter()
            .zip(insts)
            .map(|(x, q)| find_theta(q, x, thetas, u))
            .collect();
        if let Some(idx) = idx {
            return Some((idx, insts.to_vec(), body.clone(), order));
        }
    }
    None
}

/// Recognizes a uniqueness prefix over `thetas`. With `u` set, only the
/// relativized shape `exists x And[U(x0); ...; And[psi^U; theta^U...]]`
/// counts.
pub fn match_prefix(f: &Formula, thetas: &[Theta], u: Option<&Symbol>) -> Option<PrefixMatch> {
    let Formula::Exists(vars, body) = f else {
        return None;
    };
    if let Some(u) = u {
        let inner = strip_guarded_and(body, vars, u)?;
        let (theta_idx, instances, body, order) = match_inner(vars, inner, thetas, Some(u))?;
        return Some(PrefixMatch {
            vars: vars.clone(),
            theta_idx,
            instances,
            body,
            order,
            guarded: true,
        });
    }
    let (theta_idx, instances, body, order) = match_inner(vars, body, thetas, None)?;
    Some(PrefixMatch {
        vars: vars.clone(),
        theta_idx,
        instances,
        body,
        order,
        guarded: false,
    })
}

/// Renames `vars` away from `avoid` inside `body`.
fn rename_block(
    vars: &[Symbol],
    body: &Formula,
    avoid: &BTreeSet<Symbol>,
) -> (Vec<Symbol>, Formula) {
    if vars.iter().all(|v| !avoid.contains(v)) {
        return (vars.to_vec(), body.clone());
    }
    let mut taken = avoid.clone();
    body.collect_all_vars(&mut taken);
    taken.extend(vars.iter().cloned());
    let mut map = Substitution::new();
    let mut out = Vec::with_capacity(vars.len());
    for v in vars {
        if avoid.contains(v) {
            let nv = fresh_var(v, &taken);
            taken.insert(nv.clone());
            map.insert(v.clone(), Term::Var(nv.clone()));
            out.push(nv);
        } else {
            out.push(v.clone());
        }
    }
    (out, substitute(body, &map))
}

/// One step of the commutation rewrites: the prefix moves below the
/// outermost connective or quantifier block of its body.
pub fn push_uniqueness(
    f: &Formula,
    thetas: &[Theta],
    u: Option<&Symbol>,
) -> Result<Formula, UniquenessError> {
    let m = match_prefix(f, thetas, u).ok_or_else(|| UniquenessError::NotAPrefix(f.clone()))?;
    let gu = if m.guarded { u } else { None };
    let wrap = |body: Formula| m.rebuild(body, u);
    let prefix_vars: BTreeSet<Symbol> = m.vars.iter().cloned().collect();
    Ok(match &m.body {
        Formula::Atom(..) | Formula::Eq(..) => {
            return Err(UniquenessError::AtomicBody(m.body.clone()))
        }
        Formula::Not(g) => Formula::not(wrap((**g).clone())),
        Formula::And(gs) => Formula::And(gs.iter().cloned().map(wrap).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().cloned().map(wrap).collect()),
        Formula::Imp(a, b) => Formula::imp(wrap((**a).clone()), wrap((**b).clone())),
        Formula::Forall(ys, g) => {
            let (ys, g) = rename_block(ys, g, &prefix_vars);
            match gu.and_then(|u| strip_guarded_imp(&g, &ys, u).map(|inner| (u, inner))) {
                Some((u, inner)) => {
                    Formula::forall(ys.clone(), Formula::imp(guard(&ys, u), wrap(inner.clone())))
                }
                None => Formula::forall(ys, wrap(g)),
            }
        }
        Formula::Exists(ys, g) => {
            let (ys, g) = rename_block(ys, g, &prefix_vars);
            match gu.and_then(|u| strip_guarded_and(&g, &ys, u).map(|inner| (u, inner))) {
                Some((u, inner)) => {
                    Formula::exists(ys.clone(), guarded_and(&ys, u, wrap(inner.clone())))
                }
                None => Formula::exists(ys, wrap(g)),
            }
        }
    })
}

/// Inverse of [`push_uniqueness`].
pub fn pull_uniqueness(
    f: &Formula,
    thetas: &[Theta],
    u: Option<&Symbol>,
) -> Result<Formula, UniquenessError> {
    let fail = || UniquenessError::NotPullable(f.clone());
    let one = |g: &Formula| match_prefix(g, thetas, u).ok_or_else(fail);
    let many = |gs: &[&Formula]| -> Result<(PrefixMatch, Vec<Formula>), UniquenessError> {
        let first = one(gs[0])?;
        let mut bodies = vec![first.body.clone()];
        for g in &gs[1..] {
            let m = one(g)?;
            if !first.same_shape(&m) {
                return Err(fail());
            }
            bodies.push(m.body);
        }
        Ok((first, bodies))
    };
    match f {
        Formula::Not(g) => {
            let m = one(g)?;
            Ok(m.rebuild(Formula::not(m.body.clone()), u))
        }
        Formula::And(gs) | Formula::Or(gs) if !gs.is_empty() => {
            let refs: Vec<&Formula> = gs.iter().collect();
            let (m, bodies) = many(&refs)?;
            let body = if matches!(f, Formula::And(_)) {
                Formula::And(bodies)
            } else {
                Formula::Or(bodies)
            };
            Ok(m.rebuild(body, u))
        }
        Formula::Imp(a, b) => {
            let (m, mut bodies) = many(&[a, b])?;
            let b = bodies.pop().unwrap();
            let a = bodies.pop().unwrap();
            Ok(m.rebuild(Formula::imp(a, b), u))
        }
        Formula::Forall(ys, g) | Formula::Exists(ys, g) => {
            let universal = matches!(f, Formula::Forall(..));
            let stripped = u.and_then(|u| {
                if universal {
                    strip_guarded_imp(g, ys, u)
                } else {
                    strip_guarded_and(g, ys, u)
                }
            });
            let (inner, guarded) = match stripped {
                Some(inner) if match_prefix(inner, thetas, u).is_some_and(|m| m.guarded) => {
                    (inner, true)
                }
                _ => (&**g, false),
            };
            let m = one(inner)?;
            let m = separate(m, ys);
            let body = match (guarded, u) {
                (true, Some(u)) if universal => Formula::imp(guard(ys, u), m.body.clone()),
                (true, Some(u)) => guarded_and(ys, u, m.body.clone()),
                _ => m.body.clone(),
            };
            let body = if universal {
                Formula::forall(ys.clone(), body)
            } else {
                Formula::exists(ys.clone(), body)
            };
            Ok(m.rebuild(body, u))
        }
        _ => Err(fail()),
    }
}

/// Renames prefix variables that would be captured by the block `ys`.
fn separate(m: PrefixMatch, ys: &[Symbol]) -> PrefixMatch {
    if m.vars.iter().all(|x| !ys.contains(x)) {
        return m;
    }
    let mut taken: BTreeSet<Symbol> = ys.iter().cloned().collect();
    m.body.collect_all_vars(&mut taken);
    taken.extend(m.vars.iter().cloned());
    let mut map = Substitution::new();
    let mut vars = Vec::with_capacity(m.vars.len());
    for x in &m.vars {
        if ys.contains(x) {
            let nx = fresh_var(x, &taken);
            taken.insert(nx.clone());
            map.insert(x.clone(), Term::Var(nx.clone()));
            vars.push(nx);
        } else {
            vars.push(x.clone());
        }
    }
    PrefixMatch {
        body: substitute(&m.body, &map),
        instances: m.instances.iter().map(|i| substitute(i, &map)).collect(),
        vars,
        ..m
    }
}

/// Eliminates every recognizable prefix by substituting the definite
/// description `iota x . theta(x)` (inside `U` when relativized) for its
/// variable, both before and after normalizing the body. Each step is an
/// equivalence wherever each theta has exactly one satisfier, so formulas
/// with alpha-equal normal forms are equivalent there.
pub fn uniqueness_normal_form(f: &Formula, thetas: &[Theta], u: Option<&Symbol>) -> Formula {
    canonical(&nf(f, thetas, u))
}

pub fn nf_equivalent(a: &Formula, b: &Formula, thetas: &[Theta], u: Option<&Symbol>) -> bool {
    alpha_eq(a, b) || uniqueness_normal_form(a, thetas, u) == uniqueness_normal_form(b, thetas, u)
}

/// `iota x . theta(x)`, or `iota x . And[U(x); theta^U(x)]`.
pub fn description(theta: &Theta, u: Option<&Symbol>) -> Term {
    match u {
        Some(u) => Term::Iota(
            theta.var.clone(),
            Box::new(guarded_and(
                std::slice::from_ref(&theta.var),
                u,
                relativize(&theta.body, u),
            )),
        ),
        None => theta.to_term(),
    }
}

fn eliminate(f: &Formula, thetas: &[Theta], u: Option<&Symbol>) -> Option<Formula> {
    let m = match_prefix(f, thetas, u)?;
    let map: Substitution = m
        .vars
        .iter()
        .zip(&m.theta_idx)
        .map(|(x, i)| (x.clone(), description(&thetas[*i], u)))
        .collect();
    Some(substitute(&m.body, &map))
}

fn nf(f: &Formula, thetas: &[Theta], u: Option<&Symbol>) -> Formula {
    if let Some(g) = eliminate(f, thetas, u) {
        return nf(&g, thetas, u);
    }
    let out = match f {
        Formula::Atom(..) | Formula::Eq(..) => return f.clone(),
        Formula::Not(g) => Formula::not(nf(g, thetas, u)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| nf(g, thetas, u)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| nf(g, thetas, u)).collect()),
        Formula::Imp(a, b) => Formula::imp(nf(a, thetas, u), nf(b, thetas, u)),
        Formula::Forall(ys, g) => Formula::forall(ys.clone(), nf(g, thetas, u)),
        Formula::Exists(ys, g) => {
            let out = Formula::exists(ys.clone(), nf(g, thetas, u));
            return match eliminate(&out, thetas, u) {
                Some(g) => nf(&g, thetas, u),
                None => out,
            };
        }
    };
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Vocabulary};

    fn vocab() -> Vocabulary {
        Vocabulary::new()
            .with_relation("<", 2)
            .with_relation("P", 1)
            .with_relation("Q", 1)
            .with_predicate("U")
            .with_constant("c")
            .with_constant("d")
    }

    fn f(s: &str) -> Formula {
        parse_formula(s, &vocab()).unwrap()
    }

    fn th(var: &str, s: &str) -> Theta {
        Theta::new(Symbol::new(var), f(s)).unwrap()
    }

    #[test]
    fn theta_atomic_single_variable() {
        let out = theta_atomic(&f("P(x0)"), &[th("x", "x = c")]).unwrap();
        assert_eq!(out, f("exists x0 . (P(x0) & x0 = c)"));
        assert!(out.is_sentence());
    }

    #[test]
    fn theta_atomic_order_sentence() {
        let min = th("z", "forall y . ~(y < z)");
        let max = th("z", "forall y . ~(z < y)");
        let out = theta_atomic(&f("x0 < x1"), &[min, max]).unwrap();
        assert_eq!(
            out.to_string(),
            "exists x0 x1 . And[x0 < x1; forall y . ~(y < x0); forall y . ~(x1 < y)]"
        );
    }

    #[test]
    fn theta_atomic_arity_mismatch() {
        let err = theta_atomic(&f("x0 < x1"), &[th("x", "x = c")]).unwrap_err();
        assert_eq!(
            err,
            UniquenessError::Arity {
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn push_through_negation() {
        let thetas = [th("x", "x = c")];
        let out = push_uniqueness(&f("exists x . (x = c & ~P(x))"), &thetas, None).unwrap();
        assert_eq!(out, f("~exists x . (x = c & P(x))"));
    }

    #[test]
    fn push_through_wide_conjunction() {
        let thetas = [th("x", "x = c")];
        let out = push_uniqueness(
            &f("exists x . (And[P(x); Q(x); x < d] & x = c)"),
            &thetas,
            None,
        )
        .unwrap();
        assert_eq!(
            out,
            f("And[exists x . (P(x) & x = c); exists x . (Q(x) & x = c); exists x . (x < d & x = c)]")
        );
    }

    #[test]
    fn push_through_universal_renames_clashing_block() {
        let thetas = [th("x", "x = c")];
        let src = f("exists x . ((forall x . P(x)) & x = c)");
        let out = push_uniqueness(&src, &thetas, None).unwrap();
        assert_eq!(out, f("forall x' . exists x . (P(x') & x = c)"));
        assert!(alpha_eq(
            &pull_uniqueness(&out, &thetas, None).unwrap(),
            &src
        ));
    }

    #[test]
    fn atomic_body_is_rejected() {
        let thetas = [th("x", "x = c")];
        let err = push_uniqueness(&f("exists x . (P(x) & x = c)"), &thetas, None).unwrap_err();
        assert!(matches!(err, UniquenessError::AtomicBody(_)));
    }

    #[test]
    fn relativized_push_pull_round_trip() {
        let thetas = [th("x", "x = c")];
        let u = Symbol::new("U");
        let src = relativize(&f("exists x . ((forall y . x < y) & x = c)"), &u);
        let pushed = push_uniqueness(&src, &thetas, Some(&u)).unwrap();
        assert_eq!(
            pushed,
            relativize(&f("forall y . exists x . (x < y & x = c)"), &u)
        );
        assert!(alpha_eq(
            &pull_uniqueness(&pushed, &thetas, Some(&u)).unwrap(),
            &src
        ));
    }

    #[test]
    fn normal_form_ignores_prefix_placement() {
        let thetas = [th("x", "x = c")];
        let a = f("exists x . ((forall y . (P(x) | Q(y))) & x = c)");
        let b = f("forall y . ((exists x . (P(x) & x = c)) | Q(y))");
        assert!(nf_equivalent(&a, &b, &thetas, None));
        let c = f("forall y . ((exists x . (Q(x) & x = c)) | Q(y))");
        assert!(!nf_equivalent(&a, &c, &thetas, None));
    }

    #[test]
    fn relativized_normal_form_keeps_guards() {
        let thetas = [th("x", "exists y . (P(y) & x = y)")];
        let u = Symbol::new("U");
        let guarded = relativize(&f("exists x . (~Q(x) & exists y . (P(y) & x = y))"), &u);
        let pushed = relativize(&f("~exists x . (Q(x) & exists y . (P(y) & x = y))"), &u);
        assert!(nf_equivalent(&guarded, &pushed, &thetas, Some(&u)));
        let bare = f("exists x . (~Q(x) & exists y . (P(y) & x = y))");
        let inst = relativize(&thetas[0].apply_var(&Symbol::new("x")), &u);
        let unguarded =
            Formula::exists(vec![Symbol::new("x")], Formula::And(vec![f("~Q(x)"), inst]));
        assert!(!nf_equivalent(&unguarded, &guarded, &thetas, Some(&u)));
        assert!(!nf_equivalent(&bare, &guarded, &thetas, Some(&u)));
    }
}
