//! Finite structures, Tarski evaluation, automorphisms and the pointwise
//! definable part.

mod automorphism;
mod eval;
mod models;

pub use automorphism::{automorphisms, defining_formula, pd, DefinabilityError, DefinablePart};
pub use eval::{Assignment, EvalError};
pub use models::{bounded_elementary_equiv, is_s_model, is_s_satisfiable};

use crate::syntax::{Symbol, Vocabulary, VocabularyError};
use std::collections::BTreeMap;
use std::fmt;

/// Index of an element in the universe.
pub type Elem = usize;

/// Tables larger than this are refused.
const MAX_TABLE: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("the universe is empty")]
    EmptyUniverse,
    #[error("element `{0}` listed twice")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error(transparent)]
    Vocabulary(#[from] VocabularyError),
    #[error("`{0}` is not a constant of the vocabulary")]
    UnknownConstant(Symbol),
    #[error("constant `{0}` has no interpretation")]
    UninterpretedConstant(Symbol),
    #[error("function `{name}` is undefined at ({args})")]
    PartialFunction { name: Symbol, args: String },
    #[error("function `{name}` is given two values at ({args})")]
    FunctionClash { name: Symbol, args: String },
    #[error("interpretation of `{0}` would need more than {MAX_TABLE} entries")]
    TooLarge(Symbol),
}

/// A finite structure with dense interpretation tables.
#[derive(Clone, PartialEq, Eq)]
pub struct Structure {
    name: String,
    vocab: Vocabulary,
    elements: Vec<String>,
    relations: BTreeMap<Symbol, Table<bool>>,
    functions: BTreeMap<Symbol, Table<Elem>>,
    constants: BTreeMap<Symbol, Elem>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct Table<T> {
    arity: usize,
    cells: Vec<T>,
}

impl<T: Copy> Table<T> {
    fn new(name: &Symbol, arity: usize, n: usize, fill: T) -> Result<Self, StructureError> {
        let size = n
            .checked_pow(arity as u32)
            .filter(|s| *s <= MAX_TABLE)
            .ok_or_else(|| StructureError::TooLarge(name.clone()))?;
        Ok(Table {
            arity,
            cells: vec![fill; size],
        })
    }

    fn index(&self, n: usize, args: &[Elem]) -> usize {
        args.iter().fold(0, |acc, a| acc * n + a)
    }
}

/// Every tuple of length `k` over `0..n`, in lexicographic order.
pub fn tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<Elem>> {
    let total = n.pow(k as u32);
    (0..total).map(move |mut i| {
        let mut t = vec![0; k];
        for slot in t.iter_mut().rev() {
            *slot = i % n;
            i /= n;
        }
        t
    })
}

impl Structure {
    pub fn builder(name: &str, vocab: Vocabulary) -> StructureBuilder {
        StructureBuilder {
            name: name.to_string(),
            vocab,
            elements: Vec::new(),
            relations: Vec::new(),
            functions: Vec::new(),
            constants: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.elements.len()
    }

    pub fn element_name(&self, e: Elem) -> &str {
        &self.elements[e]
    }

    pub fn element(&self, name: &str) -> Option<Elem> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn holds(&self, rel: &Symbol, args: &[Elem]) -> Option<bool> {
        let t = self.relations.get(rel)?;
        (t.arity == args.len()).then(|| t.cells[t.index(self.size(), args)])
    }

    pub fn apply(&self, f: &Symbol, args: &[Elem]) -> Option<Elem> {
        let t = self.functions.get(f)?;
        (t.arity == args.len()).then(|| t.cells[t.index(self.size(), args)])
    }

    pub fn constant(&self, c: &Symbol) -> Option<Elem> {
        self.constants.get(c).copied()
    }

    pub fn constants(&self) -> impl Iterator<Item = (&Symbol, Elem)> {
        self.constants.iter().map(|(k, v)| (k, *v))
    }

    /// Tuples in the interpretation of `rel`.
    pub fn relation_tuples(&self, rel: &Symbol) -> Vec<Vec<Elem>> {
        match self.relations.get(rel) {
            Some(t) => tuples(self.size(), t.arity)
                .filter(|args| t.cells[t.index(self.size(), args)])
                .collect(),
            None => Vec::new(),
        }
    }

    /// The same structure with elements renamed by `perm` (element `e`
    /// becomes `perm[e]`).
    pub fn relabel(&self, perm: &[Elem]) -> Structure {
        let n = self.size();
        let mut elements = vec![String::new(); n];
        for e in 0..n {
            elements[perm[e]] = self.elements[e].clone();
        }
        let map_args = |args: &[Elem]| -> Vec<Elem> { args.iter().map(|a| perm[*a]).collect() };
        let relations = self
            .relations
            .iter()
            .map(|(name, t)| {
                let mut out = t.clone();
                for args in tuples(n, t.arity) {
                    let v = t.cells[t.index(n, &args)];
                    let i = t.index(n, &map_args(&args));
                    out.cells[i] = v;
                }
                (name.clone(), out)
            })
            .collect();
        let functions = self
            .functions
            .iter()
            .map(|(name, t)| {
                let mut out = t.clone();
                for args in tuples(n, t.arity) {
                    let v = t.cells[t.index(n, &args)];
                    let i = t.index(n, &map_args(&args));
                    out.cells[i] = perm[v];
                }
                (name.clone(), out)
            })
            .collect();
        let constants = self
            .constants
            .iter()
            .map(|(c, e)| (c.clone(), perm[*e]))
            .collect();
        Structure {
            name: self.name.clone(),
            vocab: self.vocab.clone(),
            elements,
            relations,
            functions,
            constants,
        }
    }

    /// Adds fresh constants naming the given elements.
    pub fn with_constants(&self, names: &[(Symbol, Elem)]) -> Result<Structure, StructureError> {
        let mut out = self.clone();
        for (c, e) in names {
            out.vocab.add_constant(c.as_str())?;
            if *e >= self.size() {
                return Err(StructureError::UnknownElement(e.to_string()));
            }
            out.constants.insert(c.clone(), *e);
        }
        Ok(out)
    }

    /// Adds a fresh unary relation holding exactly on `members`.
    pub fn with_unary(&self, name: &Symbol, members: &[Elem]) -> Result<Structure, StructureError> {
        let mut out = self.clone();
        out.vocab.add_relation(name.as_str(), 1)?;
        let mut t = Table::new(name, 1, self.size(), false)?;
        for e in members {
            *t.cells
                .get_mut(*e)
                .ok_or_else(|| StructureError::UnknownElement(e.to_string()))? = true;
        }
        out.relations.insert(name.clone(), t);
        Ok(out)
    }

    /// The substructure induced on `keep`, which must be closed under the
    /// functions and contain every constant.
    pub fn induced(&self, keep: &[Elem]) -> Option<Structure> {
        let n = self.size();
        let mut index = vec![None; n];
        for (i, e) in keep.iter().enumerate() {
            index[*e] = Some(i);
        }
        if keep.is_empty() || self.constants.values().any(|e| index[*e].is_none()) {
            return None;
        }
        let m = keep.len();
        let lift = |args: &[Elem]| -> Vec<Elem> { args.iter().map(|a| keep[*a]).collect() };
        let mut functions = BTreeMap::new();
        for (name, t) in &self.functions {
            let mut out = Table {
                arity: t.arity,
                cells: vec![0; m.pow(t.arity as u32)],
            };
            for args in tuples(m, t.arity) {
                let v = t.cells[t.index(n, &lift(&args))];
                let i = out.index(m, &args);
                out.cells[i] = index[v]?;
            }
            functions.insert(name.clone(), out);
        }
        let relations = self
            .relations
            .iter()
            .map(|(name, t)| {
                let mut out = Table {
                    arity: t.arity,
                    cells: vec![false; m.pow(t.arity as u32)],
                };
                for args in tuples(m, t.arity) {
                    let i = out.index(m, &args);
                    out.cells[i] = t.cells[t.index(n, &lift(&args))];
                }
                (name.clone(), out)
            })
            .collect();
        let constants = self
            .constants
            .iter()
            .map(|(c, e)| (c.clone(), index[*e].unwrap()))
            .collect();
        Some(Structure {
            name: format!("{}|pd", self.name),
            vocab: self.vocab.clone(),
            elements: keep.iter().map(|e| self.elements[*e].clone()).collect(),
            relations,
            functions,
            constants,
        })
    }
}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Renders in the structure file format (without the header's vocabulary path).
impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "structure {}", self.name)?;
        writeln!(f, "universe {}", self.elements.join(" "))?;
        for name in self.relations.keys() {
            let tuples: Vec<String> = self
                .relation_tuples(name)
                .iter()
                .map(|t| {
                    format!(
                        "({})",
                        t.iter()
                            .map(|e| self.elements[*e].as_str())
                            .collect::<Vec<_>>()
                            .join(",")
                    )
                })
                .collect();
            writeln!(f, "relation {name} : {}", tuples.join(" "))?;
        }
        for (name, t) in &self.functions {
            let entries: Vec<String> = tuples(self.size(), t.arity)
                .map(|args| {
                    let v = t.cells[t.index(self.size(), &args)];
                    let a: Vec<&str> = args.iter().map(|e| self.elements[*e].as_str()).collect();
                    format!("{}->{}", a.join(","), self.elements[v])
                })
                .collect();
            writeln!(f, "function {name} : {}", entries.join(" "))?;
        }
        for (c, e) in &self.constants {
            writeln!(f, "constant {c} = {}", self.elements[*e])?;
        }
        Ok(())
    }
}

pub struct StructureBuilder {
    name: String,
    vocab: Vocabulary,
    elements: Vec<String>,
    relations: Vec<(Symbol, Vec<String>)>,
    functions: Vec<(Symbol, Vec<String>, String)>,
    constants: Vec<(Symbol, String)>,
}

impl StructureBuilder {
    pub fn element(mut self, name: &str) -> Self {
        self.elements.push(name.to_string());
        self
    }

    pub fn elements<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, names: I) -> Self {
        self.elements
            .extend(names.into_iter().map(|s| s.as_ref().to_string()));
        self
    }

    pub fn tuple(mut self, rel: &str, args: &[&str]) -> Self {
        self.relations.push((
            Symbol::new(rel),
            args.iter().map(|s| s.to_string()).collect(),
        ));
        self
    }

    pub fn map(mut self, f: &str, args: &[&str], value: &str) -> Self {
        self.functions.push((
            Symbol::new(f),
            args.iter().map(|s| s.to_string()).collect(),
            value.to_string(),
        ));
        self
    }

    pub fn constant(mut self, c: &str, value: &str) -> Self {
        self.constants.push((Symbol::new(c), value.to_string()));
        self
    }

    pub fn build(self) -> Result<Structure, StructureError> {
        let n = self.elements.len();
        if n == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        for (i, e) in self.elements.iter().enumerate() {
            if self.elements[..i].contains(e) {
                return Err(StructureError::DuplicateElement(e.clone()));
            }
        }
        let lookup = |s: &str| {
            self.elements
                .iter()
                .position(|e| e == s)
                .ok_or_else(|| StructureError::UnknownElement(s.to_string()))
        };
        let lookup_all =
            |xs: &[String]| xs.iter().map(|s| lookup(s)).collect::<Result<Vec<_>, _>>();

        let mut relations = BTreeMap::new();
        for (r, k) in self.vocab.relations() {
            relations.insert(r.clone(), Table::new(r, k, n, false)?);
        }
        for (r, args) in &self.relations {
            let t = relations
                .get_mut(r)
                .ok_or_else(|| VocabularyError::UnknownRelation(r.clone()))?;
            if t.arity != args.len() {
                return Err(VocabularyError::Arity {
                    name: r.clone(),
                    expected: t.arity,
                    found: args.len(),
                }
                .into());
            }
            let i = t.index(n, &lookup_all(args)?);
            t.cells[i] = true;
        }

        let mut functions = BTreeMap::new();
        for (g, k) in self.vocab.functions() {
            functions.insert(g.clone(), Table::new(g, k, n, Elem::MAX)?);
        }
        for (g, args, v) in &self.functions {
            let t = functions
                .get_mut(g)
                .ok_or_else(|| VocabularyError::UnknownFunction(g.clone()))?;
            if t.arity != args.len() {
                return Err(VocabularyError::Arity {
                    name: g.clone(),
                    expected: t.arity,
                    found: args.len(),
                }
                .into());
            }
            let i = t.index(n, &lookup_all(args)?);
            let v = lookup(v)?;
            if t.cells[i] != Elem::MAX && t.cells[i] != v {
                return Err(StructureError::FunctionClash {
                    name: g.clone(),
                    args: args.join(","),
                });
            }
            t.cells[i] = v;
        }
        for (g, t) in &functions {
            if let Some(i) = t.cells.iter().position(|v| *v == Elem::MAX) {
                let args = tuples(n, t.arity).nth(i).unwrap();
                let names: Vec<&str> = args.iter().map(|e| self.elements[*e].as_str()).collect();
                return Err(StructureError::PartialFunction {
                    name: g.clone(),
                    args: names.join(","),
                });
            }
        }

        let mut constants = BTreeMap::new();
        for (c, v) in &self.constants {
            if !self.vocab.is_constant(c) {
                return Err(StructureError::UnknownConstant(c.clone()));
            }
            constants.insert(c.clone(), lookup(v)?);
        }
        if let Some(c) = self
            .vocab
            .constants()
            .iter()
            .find(|c| !constants.contains_key(*c))
        {
            return Err(StructureError::UninterpretedConstant(c.clone()));
        }

        Ok(Structure {
            name: self.name,
            vocab: self.vocab,
            elements: self.elements,
            relations,
            functions,
            constants,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_rejects_partial_functions() {
        let v = Vocabulary::new().with_function("s", 1);
        let err = Structure::builder("z", v)
            .elements(["0", "1"])
            .map("s", &["0"], "1")
            .build()
            .unwrap_err();
        assert!(matches!(err, StructureError::PartialFunction { .. }));
    }

    #[test]
    fn builder_rejects_unknown_elements_and_missing_constants() {
        let v = Vocabulary::new().with_relation("<", 2).with_constant("c");
        let b = Structure::builder("a", v.clone())
            .elements(["a"])
            .tuple("<", &["a", "b"])
            .constant("c", "a");
        assert_eq!(
            b.build().unwrap_err(),
            StructureError::UnknownElement("b".into())
        );
        let b = Structure::builder("a", v).elements(["a"]);
        assert!(matches!(
            b.build().unwrap_err(),
            StructureError::UninterpretedConstant(_)
        ));
    }

    #[test]
    fn relabel_moves_tuples() {
        let v = Vocabulary::new().with_relation("<", 2);
        let a = Structure::builder("two", v)
            .elements(["a", "b"])
            .tuple("<", &["a", "b"])
            .build()
            .unwrap();
        let b = a.relabel(&[1, 0]);
        assert_eq!(b.relation_tuples(&Symbol::new("<")), vec![vec![1, 0]]);
        assert_eq!(b.element_name(1), "a");
    }
}
