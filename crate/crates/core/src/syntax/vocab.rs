use super::{Formula, Symbol, Term};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VocabularyError {
    #[error("symbol `{0}` declared twice")]
    Duplicate(Symbol),
    #[error("symbol `{0}` must have positive arity")]
    ZeroArity(Symbol),
    #[error("unknown relation `{0}`")]
    UnknownRelation(Symbol),
    #[error("unknown function `{0}`")]
    UnknownFunction(Symbol),
    #[error("`{name}` expects {expected} arguments, found {found}")]
    Arity {
        name: Symbol,
        expected: usize,
        found: usize,
    },
    #[error("`{0}` is not a unary relation")]
    NotUnary(Symbol),
}

/// Relation, function and constant symbols with their arities.
///
/// Unary relations declared with `predicate` are remembered as candidates
/// for relativization; they are ordinary unary relations otherwise.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    relations: BTreeMap<Symbol, usize>,
    functions: BTreeMap<Symbol, usize>,
    constants: Vec<Symbol>,
    predicates: Vec<Symbol>,
    order: Vec<Symbol>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    fn claim(&mut self, name: &Symbol) -> Result<(), VocabularyError> {
        if self.order.contains(name) {
            return Err(VocabularyError::Duplicate(name.clone()));
        }
        self.order.push(name.clone());
        Ok(())
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<(), VocabularyError> {
        let name = Symbol::new(name);
        if arity == 0 {
            return Err(VocabularyError::ZeroArity(name));
        }
        self.claim(&name)?;
        self.relations.insert(name, arity);
        Ok(())
    }

    pub fn add_predicate(&mut self, name: &str) -> Result<(), VocabularyError> {
        self.add_relation(name, 1)?;
        self.predicates.push(Symbol::new(name));
        Ok(())
    }

    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<(), VocabularyError> {
        let name = Symbol::new(name);
        if arity == 0 {
            return Err(VocabularyError::ZeroArity(name));
        }
        self.claim(&name)?;
        self.functions.insert(name, arity);
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str) -> Result<(), VocabularyError> {
        let name = Symbol::new(name);
        self.claim(&name)?;
        self.constants.push(name);
        Ok(())
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Self {
        self.add_relation(name, arity).expect("valid relation");
        self
    }

    pub fn with_predicate(mut self, name: &str) -> Self {
        self.add_predicate(name).expect("valid predicate");
        self
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Self {
        self.add_function(name, arity).expect("valid function");
        self
    }

    pub fn with_constant(mut self, name: &str) -> Self {
        self.add_constant(name).expect("valid constant");
        self
    }

    pub fn relation_arity(&self, name: &Symbol) -> Option<usize> {
        self.relations.get(name).copied()
    }

    pub fn function_arity(&self, name: &Symbol) -> Option<usize> {
        self.functions.get(name).copied()
    }

    pub fn is_constant(&self, name: &Symbol) -> bool {
        self.constants.contains(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&Symbol, usize)> {
        self.relations.iter().map(|(k, v)| (k, *v))
    }

    pub fn functions(&self) -> impl Iterator<Item = (&Symbol, usize)> {
        self.functions.iter().map(|(k, v)| (k, *v))
    }

    pub fn constants(&self) -> &[Symbol] {
        &self.constants
    }

    pub fn predicates(&self) -> &[Symbol] {
        &self.predicates
    }

    pub fn max_relation_arity(&self) -> usize {
        self.relations.values().copied().max().unwrap_or(0)
    }

    /// Number of non-logical symbols.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// A binary relation whose name is not an identifier is written infix.
    pub fn is_infix(&self, name: &Symbol) -> bool {
        self.relations.get(name) == Some(&2) && !is_identifier(name.as_str())
    }

    pub fn require_unary(&self, name: &Symbol) -> Result<(), VocabularyError> {
        match self.relations.get(name) {
            Some(1) => Ok(()),
            _ => Err(VocabularyError::NotUnary(name.clone())),
        }
    }

    pub fn check_term(&self, t: &Term) -> Result<(), VocabularyError> {
        match t {
            Term::Var(_) | Term::Const(_) => Ok(()),
            Term::App(f, args) => {
                let expected = self
                    .function_arity(f)
                    .ok_or_else(|| VocabularyError::UnknownFunction(f.clone()))?;
                if expected != args.len() {
                    return Err(VocabularyError::Arity {
                        name: f.clone(),
                        expected,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
            Term::Iota(_, body) => self.check_formula(body),
        }
    }

    /// Checks that every symbol is declared with the arity it is used at.
    pub fn check_formula(&self, f: &Formula) -> Result<(), VocabularyError> {
        match f {
            Formula::Atom(r, args) => {
                let expected = self
                    .relation_arity(r)
                    .ok_or_else(|| VocabularyError::UnknownRelation(r.clone()))?;
                if expected != args.len() {
                    return Err(VocabularyError::Arity {
                        name: r.clone(),
                        expected,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
            Formula::Eq(a, b) => {
                self.check_term(a)?;
                self.check_term(b)
            }
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => {
                self.check_formula(g)
            }
            Formula::And(gs) | Formula::Or(gs) => gs.iter().try_for_each(|g| self.check_formula(g)),
            Formula::Imp(a, b) => {
                self.check_formula(a)?;
                self.check_formula(b)
            }
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}
