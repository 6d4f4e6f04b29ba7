use super::{Formula, Symbol, SyntaxError, Term, Vocabulary, VocabularyError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at column {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("at column {pos}: {source}")]
    Vocabulary { pos: usize, source: VocabularyError },
    #[error("at column {pos}: {source}")]
    Invalid { pos: usize, source: SyntaxError },
}

impl ParseError {
    pub fn pos(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::Vocabulary { pos, .. }
            | ParseError::Invalid { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Dot,
    Tilde,
    Amp,
    Bar,
    Arrow,
    Equals,
}

const SYMBOLIC: &str = "<>=!+*/^%@$?";

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let col = pos + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            '.' => Some(Tok::Dot),
            '~' => Some(Tok::Tilde),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Bar),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            i += 1;
            continue;
        }
        if c == '-' {
            if chars.get(i + 1).map(|p| p.1) == Some('>') {
                out.push((Tok::Arrow, col));
                i += 2;
                continue;
            }
            return Err(ParseError::Syntax {
                pos: col,
                message: "stray `-`".into(),
            });
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].1.is_ascii_alphanumeric() || matches!(chars[i].1, '_' | '\''))
            {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|p| p.1).collect();
            out.push((Tok::Ident(s), col));
            continue;
        }
        if SYMBOLIC.contains(c) {
            let start = i;
            while i < chars.len() && SYMBOLIC.contains(chars[i].1) {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|p| p.1).collect();
            out.push((if s == "=" { Tok::Equals } else { Tok::Sym(s) }, col));
            continue;
        }
        return Err(ParseError::Syntax {
            pos: col,
            message: format!("unexpected character `{c}`"),
        });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    vocab: &'a Vocabulary,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.col(),
            message: message.into(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn expr(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.expr()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut items = vec![self.conj()?];
        while self.eat(&Tok::Bar) {
            items.push(self.conj()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::Or(items)
        })
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut items = vec![self.unary()?];
        while self.eat(&Tok::Amp) {
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::And(items)
        })
    }

    fn binder(&mut self) -> Result<Vec<Symbol>, ParseError> {
        let col = self.col();
        let mut vars: Vec<Symbol> = Vec::new();
        while let Some(Tok::Ident(_)) = self.peek() {
            let v = Symbol::from(self.ident()?);
            if vars.contains(&v) {
                return Err(ParseError::Invalid {
                    pos: col,
                    source: SyntaxError::RepeatedBlockVariable(v),
                });
            }
            vars.push(v);
        }
        if vars.is_empty() {
            return self.err("expected bound variable");
        }
        self.expect(&Tok::Dot, "`.`")?;
        Ok(vars)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Ident(s)) if s == "forall" || s == "exists" => {
                let universal = s == "forall";
                self.pos += 1;
                let vars = self.binder()?;
                let body = self.expr()?;
                Ok(if universal {
                    Formula::forall(vars, body)
                } else {
                    Formula::exists(vars, body)
                })
            }
            Some(Tok::Ident(s))
                if (s == "And" || s == "Or") && self.peek_at(1) == Some(&Tok::LBracket) =>
            {
                let conj = s == "And";
                self.pos += 2;
                let mut items = vec![self.expr()?];
                while self.eat(&Tok::Semi) || self.eat(&Tok::Comma) {
                    items.push(self.expr()?);
                }
                self.expect(&Tok::RBracket, "`]`")?;
                Ok(if conj {
                    Formula::And(items)
                } else {
                    Formula::Or(items)
                })
            }
            Some(Tok::LParen) => {
                let save = self.pos;
                self.pos += 1;
                let first = match self.expr() {
                    Ok(f) if self.eat(&Tok::RParen) && !self.at_infix() => return Ok(f),
                    Ok(_) => self.err::<()>("expected `)`").unwrap_err(),
                    Err(e) => e,
                };
                self.pos = save;
                self.atom()
                    .map_err(|e| if first.pos() >= e.pos() { first } else { e })
            }
            _ => self.atom(),
        }
    }

    fn at_infix(&self) -> bool {
        matches!(self.peek(), Some(Tok::Equals) | Some(Tok::Sym(_)))
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let col = self.col();
        if let (Some(Tok::Ident(name)), Some(Tok::LParen)) = (self.peek(), self.peek_at(1)) {
            let sym = Symbol::new(name);
            if self.vocab.relation_arity(&sym).is_some() {
                self.pos += 2;
                let args = self.term_list()?;
                let f = Formula::Atom(sym, args);
                self.vocab
                    .check_formula(&f)
                    .map_err(|source| ParseError::Vocabulary { pos: col, source })?;
                return Ok(f);
            }
        }
        let lhs = self.term()?;
        match self.peek().cloned() {
            Some(Tok::Equals) => {
                self.pos += 1;
                let rhs = self.term()?;
                Ok(Formula::Eq(lhs, rhs))
            }
            Some(Tok::Sym(s)) => {
                let sym = Symbol::new(&s);
                let pos = self.col();
                self.pos += 1;
                let rhs = self.term()?;
                let f = Formula::Atom(sym, vec![lhs, rhs]);
                self.vocab
                    .check_formula(&f)
                    .map_err(|source| ParseError::Vocabulary { pos, source })?;
                Ok(f)
            }
            _ => self.err("expected `=` or an infix relation after term"),
        }
    }

    fn term_list(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            args.push(self.term()?);
        }
        self.expect(&Tok::RParen, "`)`")?;
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some(Tok::Ident(s)) if s == "iota" => {
                self.pos += 1;
                let vars = self.binder()?;
                if vars.len() != 1 {
                    return Err(ParseError::Syntax {
                        pos: col,
                        message: "iota binds one variable".into(),
                    });
                }
                let body = self.expr()?;
                let v = vars.into_iter().next().unwrap();
                Term::iota(v, body).map_err(|source| ParseError::Invalid { pos: col, source })
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                let sym = Symbol::from(s);
                if self.eat(&Tok::LParen) {
                    let args = self.term_list()?;
                    let t = Term::App(sym, args);
                    self.vocab
                        .check_term(&t)
                        .map_err(|source| ParseError::Vocabulary { pos: col, source })?;
                    Ok(t)
                } else if self.vocab.is_constant(&sym) {
                    Ok(Term::Const(sym))
                } else if self.vocab.relation_arity(&sym).is_some()
                    || self.vocab.function_arity(&sym).is_some()
                {
                    self.err(format!("`{sym}` is not a term"))
                } else {
                    Ok(Term::Var(sym))
                }
            }
            _ => self.err("expected term"),
        }
    }
}

/// Parses a formula over `vocab`. Identifiers that are not declared
/// constants are variables.
pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len() + 1,
        vocab,
    };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    f.validate()
        .map_err(|source| ParseError::Invalid { pos: 1, source })?;
    Ok(f)
}

pub fn parse_term(text: &str, vocab: &Vocabulary) -> Result<Term, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len() + 1,
        vocab,
    };
    let t = p.term()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order() -> Vocabulary {
        Vocabulary::new()
            .with_relation("<", 2)
            .with_predicate("P")
            .with_constant("c")
            .with_function("s", 1)
    }

    #[test]
    fn parses_universal_negation() {
        let f = parse_formula("forall x . ~(x < x)", &order()).unwrap();
        let x = Term::var("x");
        assert_eq!(
            f,
            Formula::forall1("x", Formula::not(Formula::atom("<", vec![x.clone(), x])))
        );
    }

    #[test]
    fn parses_wide_conjunction_with_commas() {
        let f = parse_formula("And[P(c), ~P(c)]", &order()).unwrap();
        let pc = Formula::atom("P", vec![Term::constant("c")]);
        assert_eq!(f, Formula::And(vec![pc.clone(), Formula::not(pc)]));
    }

    #[test]
    fn parses_iota_term() {
        let f = parse_formula("exists x . x = iota y . forall z . ~(z < y)", &order()).unwrap();
        match f {
            Formula::Exists(vs, body) => {
                assert_eq!(vs, vec![Symbol::new("x")]);
                assert!(matches!(*body, Formula::Eq(Term::Var(_), Term::Iota(..))));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reports_errors() {
        assert!(matches!(
            parse_formula("Q(c)", &order()),
            Err(ParseError::Syntax { .. }) | Err(ParseError::Vocabulary { .. })
        ));
        assert!(matches!(
            parse_formula("P(c, c)", &order()),
            Err(ParseError::Vocabulary {
                source: VocabularyError::Arity { .. },
                ..
            })
        ));
        assert!(matches!(
            parse_formula("forall x x . P(x)", &order()),
            Err(ParseError::Invalid { .. })
        ));
        assert!(matches!(
            parse_formula("(P(c) & ", &order()),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_formula("x = iota y . P(x)", &order()),
            Err(ParseError::Invalid { .. })
        ));
        assert!(matches!(
            parse_formula("s(c, c) = c", &order()),
            Err(ParseError::Vocabulary { .. })
        ));
    }

    #[test]
    fn print_round_trips() {
        let v = order();
        for text in [
            "forall x . ~(x < x)",
            "(P(c) & ~P(c))",
            "And[P(c); P(s(c)); ~(c = c)]",
            "exists x y . (x < y -> ~(y < x))",
            "x = (iota y . forall z . ~(z < y))",
            "((forall x . P(x)) | Or[P(c)])",
        ] {
            let f = parse_formula(text, &v).unwrap();
            assert_eq!(f.to_string(), text);
            assert_eq!(parse_formula(&f.to_string(), &v).unwrap(), f);
        }
    }

    #[test]
    fn precedence_without_parentheses() {
        let v = order();
        let f = parse_formula("P(c) & P(c) | P(c) -> P(c)", &v).unwrap();
        assert!(matches!(f, Formula::Imp(..)));
        assert_eq!(f.to_string(), "(((P(c) & P(c)) | P(c)) -> P(c))");
    }
}
