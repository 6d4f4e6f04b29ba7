use super::{Elem, Structure};
use crate::syntax::{Formula, Symbol, Term};
use std::collections::BTreeMap;

pub type Assignment = BTreeMap<Symbol, Elem>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("variable `{0}` is unassigned")]
    Unassigned(Symbol),
    #[error("`{term}` has {count} satisfiers, expected exactly one")]
    Iota { term: String, count: usize },
    #[error("relation `{0}` is not interpreted")]
    UnknownRelation(Symbol),
    #[error("function `{0}` is not interpreted")]
    UnknownFunction(Symbol),
    #[error("constant `{0}` is not interpreted")]
    UnknownConstant(Symbol),
    #[error("`{0}` applied to the wrong number of arguments")]
    Arity(Symbol),
}

type Env = Vec<(Symbol, Elem)>;

impl Structure {
    pub fn eval(&self, f: &Formula, asg: &Assignment) -> Result<bool, EvalError> {
        let mut env: Env = asg.iter().map(|(k, v)| (k.clone(), *v)).collect();
        self.eval_in(f, &mut env)
    }

    pub fn eval_sentence(&self, f: &Formula) -> Result<bool, EvalError> {
        self.eval_in(f, &mut Vec::new())
    }

    pub fn eval_term(&self, t: &Term, asg: &Assignment) -> Result<Elem, EvalError> {
        let mut env: Env = asg.iter().map(|(k, v)| (k.clone(), *v)).collect();
        self.term_in(t, &mut env)
    }

    /// Elements `b` with `body[var := b]` true.
    pub fn satisfiers(&self, var: &Symbol, body: &Formula) -> Result<Vec<Elem>, EvalError> {
        let mut env = vec![(var.clone(), 0)];
        let mut out = Vec::new();
        for e in self.elements() {
            env[0].1 = e;
            if self.eval_in(body, &mut env)? {
                out.push(e);
            }
        }
        Ok(out)
    }

    fn term_in(&self, t: &Term, env: &mut Env) -> Result<Elem, EvalError> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(k, _)| k == v)
                .map(|(_, e)| *e)
                .ok_or_else(|| EvalError::Unassigned(v.clone())),
            Term::Const(c) => self
                .constant(c)
                .ok_or_else(|| EvalError::UnknownConstant(c.clone())),
            Term::App(g, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.term_in(a, env))
                    .collect::<Result<Vec<_>, _>>()?;
                if !self.functions.contains_key(g) {
                    return Err(EvalError::UnknownFunction(g.clone()));
                }
                self.apply(g, &vals)
                    .ok_or_else(|| EvalError::Arity(g.clone()))
            }
            Term::Iota(v, body) => {
                let mut found = Vec::new();
                for e in self.elements() {
                    env.push((v.clone(), e));
                    let r = self.eval_in(body, env);
                    env.pop();
                    if r? {
                        found.push(e);
                    }
                }
                match found.as_slice() {
                    [e] => Ok(*e),
                    _ => Err(EvalError::Iota {
                        term: t.to_string(),
                        count: found.len(),
                    }),
                }
            }
        }
    }

    fn eval_in(&self, f: &Formula, env: &mut Env) -> Result<bool, EvalError> {
        match f {
            Formula::Atom(r, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.term_in(a, env))
                    .collect::<Result<Vec<_>, _>>()?;
                if !self.relations.contains_key(r) {
                    return Err(EvalError::UnknownRelation(r.clone()));
                }
                self.holds(r, &vals)
                    .ok_or_else(|| EvalError::Arity(r.clone()))
            }
            Formula::Eq(a, b) => Ok(self.term_in(a, env)? == self.term_in(b, env)?),
            Formula::Not(g) => Ok(!self.eval_in(g, env)?),
            Formula::And(gs) => {
                for g in gs {
                    if !self.eval_in(g, env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(gs) => {
                for g in gs {
                    if self.eval_in(g, env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Imp(a, b) => Ok(!self.eval_in(a, env)? || self.eval_in(b, env)?),
            Formula::Forall(vs, g) => self.block(vs, g, env, true),
            Formula::Exists(vs, g) => self.block(vs, g, env, false),
        }
    }

    /// Iterated quantification: for `forall`, true iff no assignment of the
    /// block falsifies the body; dually for `exists`.
    fn block(
        &self,
        vs: &[Symbol],
        body: &Formula,
        env: &mut Env,
        universal: bool,
    ) -> Result<bool, EvalError> {
        let Some((v, rest)) = vs.split_first() else {
            return self.eval_in(body, env);
        };
        for e in self.elements() {
            env.push((v.clone(), e));
            let r = self.block(rest, body, env, universal);
            env.pop();
            if r? != universal {
                return Ok(!universal);
            }
        }
        Ok(universal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Vocabulary};

    fn two_chain() -> Structure {
        let v = Vocabulary::new().with_relation("<", 2);
        Structure::builder("A2", v)
            .elements(["a", "b"])
            .tuple("<", &["a", "b"])
            .build()
            .unwrap()
    }

    fn holds(a: &Structure, s: &str) -> Result<bool, EvalError> {
        a.eval_sentence(&parse_formula(s, a.vocab()).unwrap())
    }

    #[test]
    fn two_chain_examples() {
        let a = two_chain();
        assert_eq!(holds(&a, "exists x . forall y . ~(y < x)"), Ok(true));
        assert_eq!(holds(&a, "forall x . x = x"), Ok(true));
        assert_eq!(holds(&a, "forall x . exists y . x < y"), Ok(false));
        assert_eq!(
            holds(&a, "exists x y . And[x < y; ~(y < x); ~(x = y)]"),
            Ok(true)
        );
    }

    #[test]
    fn iota_resolution() {
        let a = two_chain();
        assert_eq!(
            holds(
                &a,
                "(iota x . forall y . ~(y < x)) < (iota x . forall y . ~(x < y))"
            ),
            Ok(true)
        );
        assert!(matches!(
            holds(&a, "(iota x . x = x) = (iota x . x = x)"),
            Err(EvalError::Iota { count: 2, .. })
        ));
        assert!(matches!(
            holds(&a, "(iota x . ~(x = x)) = (iota x . x = x)"),
            Err(EvalError::Iota { count: 0, .. })
        ));
    }

    #[test]
    fn unassigned_variable_is_an_error() {
        let a = two_chain();
        let f = parse_formula("x < y", a.vocab()).unwrap();
        let asg = Assignment::from([(Symbol::new("x"), 0)]);
        assert_eq!(
            a.eval(&f, &asg),
            Err(EvalError::Unassigned(Symbol::new("y")))
        );
    }
}
