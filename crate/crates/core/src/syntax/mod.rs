//! First-order syntax with wide connectives, quantifier blocks and
//! definite descriptions.

mod parse;
mod print;
pub mod prop;
pub(crate) mod relativize;
mod subst;
pub mod uniqueness;
mod vocab;

pub use parse::{parse_formula, parse_term, ParseError};
pub use relativize::{relativize, relativize_checked};
pub use subst::{alpha_eq, canonical, fresh_var, substitute, Substitution};
pub use uniqueness::{
    pull_uniqueness, push_uniqueness, theta_atomic, theta_prefix, PrefixOrder, Theta,
    UniquenessError,
};
pub use vocab::{Vocabulary, VocabularyError};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// An interned-by-refcount name for variables and vocabulary symbols.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(s: &str) -> Self {
        Symbol(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol(Arc::from(s))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Symbol),
    Const(Symbol),
    App(Symbol, Vec<Term>),
    /// `iota x . body`: the unique element satisfying `body`.
    Iota(Symbol, Box<Formula>),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    Atom(Symbol, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(Vec<Symbol>, Box<Formula>),
    Exists(Vec<Symbol>, Box<Formula>),
}

/// Errors for malformed abstract syntax built outside the parser.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("empty {0} connective")]
    EmptyConnective(&'static str),
    #[error("empty quantifier block")]
    EmptyBlock,
    #[error("variable `{0}` bound twice in one block")]
    RepeatedBlockVariable(Symbol),
    #[error("iota body must have exactly `{0}` free, found {1:?}")]
    IotaFreeVariables(Symbol, Vec<Symbol>),
    #[error("expected a sentence, found free variables {0:?}")]
    NotASentence(Vec<Symbol>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Symbol::new(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(Symbol::new(name))
    }

    /// Builds an iota term, checking that `body` has exactly `var` free.
    pub fn iota(var: Symbol, body: Formula) -> Result<Term, SyntaxError> {
        let free = body.free_vars();
        if free.len() != 1 || !free.contains(&var) {
            return Err(SyntaxError::IotaFreeVariables(
                var,
                free.into_iter().collect(),
            ));
        }
        Ok(Term::Iota(var, Box::new(body)))
    }

    pub fn is_closed(&self) -> bool {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out.is_empty()
    }

    pub fn free_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Symbol>, out: &mut BTreeSet<Symbol>) {
        match self {
            Term::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            Term::Iota(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    fn collect_free_ordered(&self, bound: &mut Vec<Symbol>, out: &mut Vec<Symbol>) {
        match self {
            Term::Var(v) => {
                if !bound.contains(v) && !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_free_ordered(bound, out)),
            Term::Iota(v, body) => {
                bound.push(v.clone());
                body.collect_free_ordered(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub(crate) fn collect_all_vars(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_all_vars(out)),
            Term::Iota(v, body) => {
                out.insert(v.clone());
                body.collect_all_vars(out);
            }
        }
    }

    pub fn contains_iota(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(Term::contains_iota),
            Term::Iota(..) => true,
        }
    }
}

impl Formula {
    pub fn atom(rel: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(Symbol::new(rel), args)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn and2(a: Formula, b: Formula) -> Formula {
        Formula::And(vec![a, b])
    }

    pub fn or2(a: Formula, b: Formula) -> Formula {
        Formula::Or(vec![a, b])
    }

    pub fn forall(vars: Vec<Symbol>, body: Formula) -> Formula {
        Formula::Forall(vars, Box::new(body))
    }

    pub fn exists(vars: Vec<Symbol>, body: Formula) -> Formula {
        Formula::Exists(vars, Box::new(body))
    }

    pub fn forall1(var: &str, body: Formula) -> Formula {
        Formula::forall(vec![Symbol::new(var)], body)
    }

    pub fn exists1(var: &str, body: Formula) -> Formula {
        Formula::exists(vec![Symbol::new(var)], body)
    }

    /// Negation that strips an outer `~` instead of stacking a second one.
    pub fn negated(&self) -> Formula {
        match self {
            Formula::Not(inner) => (**inner).clone(),
            other => Formula::not(other.clone()),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars_ordered(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.collect_free_ordered(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn has_free(&self, v: &Symbol) -> bool {
        self.free_vars().contains(v)
    }

    fn collect_free(&self, bound: &mut Vec<Symbol>, out: &mut BTreeSet<Symbol>) {
        match self {
            Formula::Atom(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            Formula::Eq(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().for_each(|f| f.collect_free(bound, out))
            }
            Formula::Imp(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(vs, f) | Formula::Exists(vs, f) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                f.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    fn collect_free_ordered(&self, bound: &mut Vec<Symbol>, out: &mut Vec<Symbol>) {
        match self {
            Formula::Atom(_, args) => args.iter().for_each(|a| a.collect_free_ordered(bound, out)),
            Formula::Eq(a, b) => {
                a.collect_free_ordered(bound, out);
                b.collect_free_ordered(bound, out);
            }
            Formula::Not(f) => f.collect_free_ordered(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().for_each(|f| f.collect_free_ordered(bound, out))
            }
            Formula::Imp(a, b) => {
                a.collect_free_ordered(bound, out);
                b.collect_free_ordered(bound, out);
            }
            Formula::Forall(vs, f) | Formula::Exists(vs, f) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                f.collect_free_ordered(bound, out);
                bound.truncate(n);
            }
        }
    }

    pub(crate) fn collect_all_vars(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Formula::Atom(_, args) => args.iter().for_each(|a| a.collect_all_vars(out)),
            Formula::Eq(a, b) => {
                a.collect_all_vars(out);
                b.collect_all_vars(out);
            }
            Formula::Not(f) => f.collect_all_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_all_vars(out)),
            Formula::Imp(a, b) => {
                a.collect_all_vars(out);
                b.collect_all_vars(out);
            }
            Formula::Forall(vs, f) | Formula::Exists(vs, f) => {
                out.extend(vs.iter().cloned());
                f.collect_all_vars(out);
            }
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(..) | Formula::Eq(..))
    }

    /// Nesting depth of connectives and quantifier blocks; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Eq(..) => 0,
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.depth(),
            Formula::And(fs) | Formula::Or(fs) => {
                1 + fs.iter().map(Formula::depth).max().unwrap_or(0)
            }
            Formula::Imp(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Largest connective width and largest quantifier block, as `(width, block)`.
    pub fn widths(&self) -> (usize, usize) {
        match self {
            Formula::Atom(..) | Formula::Eq(..) => (0, 0),
            Formula::Not(f) => f.widths(),
            Formula::And(fs) | Formula::Or(fs) => fs
                .iter()
                .map(Formula::widths)
                .fold((fs.len(), 0), |(w, b), (w2, b2)| (w.max(w2), b.max(b2))),
            Formula::Imp(a, b) => {
                let (w1, b1) = a.widths();
                let (w2, b2) = b.widths();
                (w1.max(w2).max(2), b1.max(b2))
            }
            Formula::Forall(vs, f) | Formula::Exists(vs, f) => {
                let (w, b) = f.widths();
                (w, b.max(vs.len()))
            }
        }
    }

    /// All connective widths ≤ 2 and all quantifier blocks of length 1.
    pub fn is_finitary(&self) -> bool {
        let (w, b) = self.widths();
        w <= 2 && b <= 1
    }

    pub fn contains_iota(&self) -> bool {
        match self {
            Formula::Atom(_, args) => args.iter().any(Term::contains_iota),
            Formula::Eq(a, b) => a.contains_iota() || b.contains_iota(),
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => f.contains_iota(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::contains_iota),
            Formula::Imp(a, b) => a.contains_iota() || b.contains_iota(),
        }
    }

    /// Checks the structural invariants that the constructors do not enforce.
    pub fn validate(&self) -> Result<(), SyntaxError> {
        match self {
            Formula::Atom(_, args) => args.iter().try_for_each(validate_term),
            Formula::Eq(a, b) => {
                validate_term(a)?;
                validate_term(b)
            }
            Formula::Not(f) => f.validate(),
            Formula::And(fs) | Formula::Or(fs) => {
                if fs.is_empty() {
                    let kind = if matches!(self, Formula::And(_)) {
                        "And"
                    } else {
                        "Or"
                    };
                    return Err(SyntaxError::EmptyConnective(kind));
                }
                fs.iter().try_for_each(Formula::validate)
            }
            Formula::Imp(a, b) => {
                a.validate()?;
                b.validate()
            }
            Formula::Forall(vs, f) | Formula::Exists(vs, f) => {
                if vs.is_empty() {
                    return Err(SyntaxError::EmptyBlock);
                }
                for (i, v) in vs.iter().enumerate() {
                    if vs[..i].contains(v) {
                        return Err(SyntaxError::RepeatedBlockVariable(v.clone()));
                    }
                }
                f.validate()
            }
        }
    }

    pub fn require_sentence(&self) -> Result<(), SyntaxError> {
        let free = self.free_vars();
        if free.is_empty() {
            Ok(())
        } else {
            Err(SyntaxError::NotASentence(free.into_iter().collect()))
        }
    }
}

fn validate_term(t: &Term) -> Result<(), SyntaxError> {
    match t {
        Term::Var(_) | Term::Const(_) => Ok(()),
        Term::App(_, args) => args.iter().try_for_each(validate_term),
        Term::Iota(v, body) => {
            let free = body.free_vars();
            if free.len() != 1 || !free.contains(v) {
                return Err(SyntaxError::IotaFreeVariables(
                    v.clone(),
                    free.into_iter().collect(),
                ));
            }
            body.validate()
        }
    }
}
