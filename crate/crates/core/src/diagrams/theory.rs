use crate::syntax::{
    canonical, relativize, Formula, Symbol, SyntaxError, Vocabulary, VocabularyError,
};
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TheoryError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Vocabulary(#[from] VocabularyError),
}

/// A finite set of sentences over a vocabulary, kept in insertion order
/// and deduplicated up to alpha-equivalence.
#[derive(Debug, Clone)]
pub struct Theory {
    name: String,
    vocab: Vocabulary,
    sentences: Vec<Formula>,
    index: HashSet<Formula>,
}

impl PartialEq for Theory {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index
    }
}

impl Theory {
    pub fn new(name: &str, vocab: Vocabulary) -> Self {
        Theory {
            name: name.to_string(),
            vocab,
            sentences: Vec::new(),
            index: HashSet::new(),
        }
    }

    pub fn from_sentences<I: IntoIterator<Item = Formula>>(
        name: &str,
        vocab: Vocabulary,
        sentences: I,
    ) -> Self {
        let mut t = Theory::new(name, vocab);
        t.extend(sentences);
        t
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Inserts without validation; returns false for a duplicate.
    pub fn insert(&mut self, f: Formula) -> bool {
        if self.index.insert(canonical(&f)) {
            self.sentences.push(f);
            true
        } else {
            false
        }
    }

    /// Inserts after checking the sentence against the vocabulary.
    pub fn add(&mut self, f: Formula) -> Result<bool, TheoryError> {
        f.validate()?;
        f.require_sentence()?;
        self.vocab.check_formula(&f)?;
        Ok(self.insert(f))
    }

    pub fn extend<I: IntoIterator<Item = Formula>>(&mut self, fs: I) {
        for f in fs {
            self.insert(f);
        }
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.index.contains(&canonical(f))
    }

    pub fn sentences(&self) -> &[Formula] {
        &self.sentences
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Formula> {
        self.sentences.iter()
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn relativized(&self, u: &Symbol) -> Theory {
        Theory::from_sentences(
            &format!("{}^{u}", self.name),
            self.vocab.clone(),
            self.iter().map(|f| relativize(f, u)),
        )
    }

    pub fn union(&self, other: &Theory) -> Theory {
        let mut t = self.clone();
        t.extend(other.iter().cloned());
        t
    }

    pub fn is_subset(&self, other: &Theory) -> bool {
        self.index.is_subset(&other.index)
    }
}

impl<'a> IntoIterator for &'a Theory {
    type Item = &'a Formula;
    type IntoIter = std::slice::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.sentences.iter()
    }
}
