//! Line-oriented input files: vocabularies, structures, theories, theta
//! sets and term lists.
//!
//! ```text
//! relation < 2            structure A over order.voc     theory T over order.voc
//! function s 1            universe a b c                 forall x . ~(x < x)
//! constant c0             relation < : (a,b) (b,c)       # comment
//! predicate U             function s : a->b b->c c->c
//!                         constant c0 = a
//! ```

use crate::diagrams::{Theory, ThetaSet};
use crate::structures::Structure;
use crate::syntax::uniqueness::Theta;
use crate::syntax::{parse_formula, parse_term, Formula, Term, Vocabulary};
use std::collections::HashSet;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{file}: {source}")]
    Io {
        file: String,
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    At {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}: {message}")]
    Invalid { file: String, message: String },
}

fn at(file: &str, line: usize, message: impl ToString) -> FormatError {
    FormatError::At {
        file: file.to_string(),
        line,
        message: message.to_string(),
    }
}

/// Non-blank lines with `#` comments removed, numbered from 1.
fn content(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// `<kind> <name> [over <vocabfile>]` on the first content line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub name: String,
    pub vocab: Option<String>,
    pub line: usize,
}

pub fn header(text: &str, kinds: &[&str]) -> Option<Header> {
    let (line, l) = content(text).next()?;
    let words: Vec<&str> = l.split_whitespace().collect();
    match words.as_slice() {
        [k, name] if kinds.contains(k) => Some(Header {
            name: name.to_string(),
            vocab: None,
            line,
        }),
        [k, name, "over", path] if kinds.contains(k) => Some(Header {
            name: name.to_string(),
            vocab: Some(path.to_string()),
            line,
        }),
        _ => None,
    }
}

pub fn parse_vocabulary(text: &str, file: &str) -> Result<Vocabulary, FormatError> {
    let mut v = Vocabulary::new();
    for (line, l) in content(text) {
        let words: Vec<&str> = l.split_whitespace().collect();
        let arity = |w: &str| {
            w.parse::<usize>()
                .map_err(|_| at(file, line, format!("bad arity `{w}`")))
        };
        let r = match words.as_slice() {
            ["relation", name, n] => v.add_relation(name, arity(n)?),
            ["function", name, n] => v.add_function(name, arity(n)?),
            ["predicate", names @ ..] if !names.is_empty() => {
                names.iter().try_for_each(|n| v.add_predicate(n))
            }
            ["constant", names @ ..] if !names.is_empty() => {
                names.iter().try_for_each(|n| v.add_constant(n))
            }
            _ => {
                return Err(at(
                    file,
                    line,
                    format!("expected a declaration, found `{l}`"),
                ))
            }
        };
        r.map_err(|e| at(file, line, e))?;
    }
    Ok(v)
}

fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        file: path.display().to_string(),
        source,
    })
}

pub fn load_vocabulary(path: &Path) -> Result<Vocabulary, FormatError> {
    parse_vocabulary(&read(path)?, &path.display().to_string())
}

/// `given`, or the vocabulary named by the header, relative to `path`.
fn resolve_vocab(
    path: &Path,
    h: Option<&Header>,
    given: Option<&Vocabulary>,
) -> Result<Vocabulary, FormatError> {
    if let Some(v) = given {
        return Ok(v.clone());
    }
    match h.and_then(|h| h.vocab.as_ref()) {
        Some(rel) => load_vocabulary(&path.parent().unwrap_or(Path::new(".")).join(rel)),
        None => Err(FormatError::Invalid {
            file: path.display().to_string(),
            message: "no vocabulary: add `over <file>` to the header or pass one explicitly".into(),
        }),
    }
}

fn tuples_of(text: &str) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        if let Some(body) = rest.strip_prefix('(') {
            let end = body.find(')').unwrap_or(body.len());
            out.push(
                body[..end]
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect(),
            );
            rest = body.get(end + 1..).unwrap_or("").trim_start();
        } else {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            out.push(vec![rest[..end].to_string()]);
            rest = rest[end..].trim_start();
        }
    }
    out
}

pub fn parse_structure(
    text: &str,
    file: &str,
    vocab: &Vocabulary,
) -> Result<Structure, FormatError> {
    let h = header(text, &["structure"]);
    let name = h.as_ref().map_or("A", |h| h.name.as_str());
    let mut b = Structure::builder(name, vocab.clone());
    let mut elems: HashSet<String> = HashSet::new();
    let skip = h.as_ref().map_or(0, |h| h.line);
    for (line, l) in content(text).filter(|(n, _)| *n != skip) {
        let (head, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let known = |e: &String| {
            if elems.contains(e) {
                Ok(())
            } else {
                Err(at(file, line, format!("unknown element `{e}`")))
            }
        };
        match head {
            "universe" => {
                for e in rest.split_whitespace() {
                    if !elems.insert(e.to_string()) {
                        return Err(at(file, line, format!("element `{e}` listed twice")));
                    }
                    b = b.element(e);
                }
            }
            "relation" | "predicate" => {
                let (rel, text) = rest
                    .split_once(':')
                    .ok_or_else(|| at(file, line, "expected `relation R : (a,b) ...`"))?;
                let rel = rel.trim();
                let arity = vocab
                    .relation_arity(&rel.into())
                    .ok_or_else(|| at(file, line, format!("unknown relation `{rel}`")))?;
                for t in tuples_of(text) {
                    if t.len() != arity {
                        return Err(at(file, line, format!("`{rel}` expects {arity}-tuples")));
                    }
                    t.iter().try_for_each(known)?;
                    b = b.tuple(rel, &t.iter().map(String::as_str).collect::<Vec<_>>());
                }
            }
            "function" => {
                let (fun, text) = rest
                    .split_once(':')
                    .ok_or_else(|| at(file, line, "expected `function f : a->b ...`"))?;
                let fun = fun.trim();
                let arity = vocab
                    .function_arity(&fun.into())
                    .ok_or_else(|| at(file, line, format!("unknown function `{fun}`")))?;
                for entry in text.split_whitespace() {
                    let (args, value) = entry
                        .split_once("->")
                        .ok_or_else(|| at(file, line, format!("bad entry `{entry}`")))?;
                    let args: Vec<String> = args
                        .trim_matches(|c| c == '(' || c == ')')
                        .split(',')
                        .map(|s| s.trim().to_string())
                        .collect();
                    if args.len() != arity {
                        return Err(at(file, line, format!("`{fun}` expects {arity} arguments")));
                    }
                    args.iter().try_for_each(known)?;
                    known(&value.to_string())?;
                    b = b.map(
                        fun,
                        &args.iter().map(String::as_str).collect::<Vec<_>>(),
                        value,
                    );
                }
            }
            "constant" => {
                let (c, e) = rest
                    .split_once('=')
                    .ok_or_else(|| at(file, line, "expected `constant c = e`"))?;
                let e = e.trim().to_string();
                known(&e)?;
                b = b.constant(c.trim(), &e);
            }
            _ => return Err(at(file, line, format!("unknown directive `{head}`"))),
        }
    }
    b.build().map_err(|e| FormatError::Invalid {
        file: file.to_string(),
        message: e.to_string(),
    })
}

pub fn load_structure(path: &Path, vocab: Option<&Vocabulary>) -> Result<Structure, FormatError> {
    let text = read(path)?;
    let v = resolve_vocab(path, header(&text, &["structure"]).as_ref(), vocab)?;
    parse_structure(&text, &path.display().to_string(), &v)
}

/// Formulas one per line after an optional header.
fn formulas(
    text: &str,
    file: &str,
    kinds: &[&str],
    vocab: &Vocabulary,
) -> Result<Vec<(usize, Formula)>, FormatError> {
    let skip = header(text, kinds).map_or(0, |h| h.line);
    content(text)
        .filter(|(n, _)| *n != skip)
        .map(|(line, l)| {
            let f = parse_formula(l, vocab).map_err(|e| at(file, line, e))?;
            vocab.check_formula(&f).map_err(|e| at(file, line, e))?;
            Ok((line, f))
        })
        .collect()
}

pub fn parse_theory(text: &str, file: &str, vocab: &Vocabulary) -> Result<Theory, FormatError> {
    let name = header(text, &["theory"]).map_or_else(|| "T".to_string(), |h| h.name);
    let mut t = Theory::new(&name, vocab.clone());
    for (line, f) in formulas(text, file, &["theory"], vocab)? {
        t.add(f).map_err(|e| at(file, line, e))?;
    }
    Ok(t)
}

pub fn load_theory(path: &Path, vocab: Option<&Vocabulary>) -> Result<Theory, FormatError> {
    let text = read(path)?;
    let v = resolve_vocab(path, header(&text, &["theory"]).as_ref(), vocab)?;
    parse_theory(&text, &path.display().to_string(), &v)
}

/// One formula per line, each with exactly one free variable.
pub fn parse_thetas(text: &str, file: &str, vocab: &Vocabulary) -> Result<ThetaSet, FormatError> {
    let mut out = Vec::new();
    for (line, f) in formulas(text, file, &["theory", "thetas"], vocab)? {
        let free: Vec<_> = f.free_vars().into_iter().collect();
        let [var] = free.as_slice() else {
            return Err(at(
                file,
                line,
                format!(
                    "a theta needs exactly one free variable, found {}",
                    free.len()
                ),
            ));
        };
        out.push(Theta::new(var.clone(), f).map_err(|e| at(file, line, e))?);
    }
    Ok(ThetaSet::new(out))
}

pub fn load_thetas(path: &Path, vocab: &Vocabulary) -> Result<ThetaSet, FormatError> {
    parse_thetas(&read(path)?, &path.display().to_string(), vocab)
}

/// Closed terms, one per line or whitespace separated.
pub fn parse_terms(text: &str, file: &str, vocab: &Vocabulary) -> Result<Vec<Term>, FormatError> {
    let mut out = Vec::new();
    for (line, l) in content(text) {
        let parsed = match parse_term(l, vocab) {
            Ok(t) => vec![t],
            Err(e) => l
                .split_whitespace()
                .map(|w| parse_term(w, vocab))
                .collect::<Result<_, _>>()
                .map_err(|_| at(file, line, e))?,
        };
        for t in parsed {
            if !t.is_closed() {
                return Err(at(file, line, format!("`{t}` is not closed")));
            }
            vocab.check_term(&t).map_err(|e| at(file, line, e))?;
            out.push(t);
        }
    }
    Ok(out)
}

pub fn load_terms(path: &Path, vocab: &Vocabulary) -> Result<Vec<Term>, FormatError> {
    parse_terms(&read(path)?, &path.display().to_string(), vocab)
}

/// The vocabulary file a structure or theory header points to.
pub fn header_vocab_path(path: &Path) -> Result<Option<PathBuf>, FormatError> {
    let text = read(path)?;
    Ok(header(&text, &["structure", "theory", "thetas"])
        .and_then(|h| h.vocab)
        .map(|rel| path.parent().unwrap_or(Path::new(".")).join(rel)))
}

/// Writes a theory in the format read by [`parse_theory`].
pub fn render_theory(t: &Theory, vocab_file: Option<&str>) -> String {
    let mut s = match vocab_file {
        Some(v) => format!("theory {} over {v}\n", t.name()),
        None => format!("theory {}\n", t.name()),
    };
    for f in t {
        s.push_str(&f.to_string());
        s.push('\n');
    }
    s
}
