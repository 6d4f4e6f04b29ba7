//! Polymodal provability logic: formulas, axiom schemas, Hilbert proofs and
//! interpretation into saturation towers.

mod axioms;
mod interp;
mod proof;

pub use axioms::{is_tautology, recognize_axiom, Schema, TAUTOLOGY_LETTERS};
pub use interp::{interpret, translate, StageInterpretation};
pub use proof::{
    check_modal_proof, gl_transitivity_proof, Justification, ModalProof, ModalProofError, ProofLine,
};

use std::fmt;

/// Default number of modalities.
pub const DEFAULT_DELTA: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModalFormula {
    Var(String),
    Bot,
    Top,
    Not(Box<ModalFormula>),
    And(Box<ModalFormula>, Box<ModalFormula>),
    Or(Box<ModalFormula>, Box<ModalFormula>),
    Imp(Box<ModalFormula>, Box<ModalFormula>),
    Box(usize, Box<ModalFormula>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GlpError {
    #[error("column {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("{0} distinct letters exceed the tautology limit of {TAUTOLOGY_LETTERS}")]
    TooManyLetters(usize),
    #[error("modality [{alpha}] is out of range for delta = {delta}")]
    StageOutOfRange { alpha: usize, delta: usize },
    #[error("stage {alpha} was not computed (tower has {computed} stages)")]
    StageNotComputed { alpha: usize, computed: usize },
    #[error("no sentence assigned to `{0}`")]
    Unmapped(String),
    #[error("`{0}` is not in the sentence universe")]
    OutsideUniverse(String),
    #[error("nested modality in `{0}` has no first-order translation")]
    Nested(String),
    #[error("top and bottom have no first-order translation")]
    Constant,
    #[error(transparent)]
    Eval(#[from] crate::structures::EvalError),
}

impl ModalFormula {
    pub fn var(name: &str) -> Self {
        ModalFormula::Var(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: ModalFormula) -> Self {
        ModalFormula::Not(Box::new(f))
    }

    pub fn and(a: ModalFormula, b: ModalFormula) -> Self {
        ModalFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: ModalFormula, b: ModalFormula) -> Self {
        ModalFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: ModalFormula, b: ModalFormula) -> Self {
        ModalFormula::Imp(Box::new(a), Box::new(b))
    }

    pub fn boxed(alpha: usize, f: ModalFormula) -> Self {
        ModalFormula::Box(alpha, Box::new(f))
    }

    /// `~[alpha]~f`.
    pub fn diamond(alpha: usize, f: ModalFormula) -> Self {
        Self::not(Self::boxed(alpha, Self::not(f)))
    }

    /// The body of `<alpha> f` written as `~[alpha]~f`.
    pub fn as_diamond(&self) -> Option<(usize, &ModalFormula)> {
        match self {
            ModalFormula::Not(b) => match &**b {
                ModalFormula::Box(a, n) => match &**n {
                    ModalFormula::Not(f) => Some((*a, f)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    pub fn max_stage(&self) -> Option<usize> {
        match self {
            ModalFormula::Var(_) | ModalFormula::Bot | ModalFormula::Top => None,
            ModalFormula::Not(f) => f.max_stage(),
            ModalFormula::And(a, b) | ModalFormula::Or(a, b) | ModalFormula::Imp(a, b) => {
                a.max_stage().max(b.max_stage())
            }
            ModalFormula::Box(k, f) => Some(f.max_stage().map_or(*k, |m| m.max(*k))),
        }
    }

    pub fn check_delta(&self, delta: usize) -> Result<(), GlpError> {
        match self.max_stage() {
            Some(alpha) if alpha >= delta => Err(GlpError::StageOutOfRange { alpha, delta }),
            _ => Ok(()),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            ModalFormula::Imp(..) => 1,
            ModalFormula::Or(..) => 2,
            ModalFormula::And(..) => 3,
            _ => 4,
        }
    }

    fn write(&self, out: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.prec() < min;
        if paren {
            out.write_str("(")?;
        }
        if let Some((a, f)) = self.as_diamond() {
            write!(out, "<>{a} ")?;
            f.write(out, 4)?;
        } else {
            match self {
                ModalFormula::Var(p) => out.write_str(p)?,
                ModalFormula::Bot => out.write_str("bot")?,
                ModalFormula::Top => out.write_str("top")?,
                ModalFormula::Not(f) => {
                    out.write_str("~")?;
                    f.write(out, 4)?;
                }
                ModalFormula::Box(a, f) => {
                    write!(out, "[]{a} ")?;
                    f.write(out, 4)?;
                }
                ModalFormula::And(a, b) => {
                    a.write(out, 3)?;
                    out.write_str(" & ")?;
                    b.write(out, 4)?;
                }
                ModalFormula::Or(a, b) => {
                    a.write(out, 2)?;
                    out.write_str(" | ")?;
                    b.write(out, 3)?;
                }
                ModalFormula::Imp(a, b) => {
                    a.write(out, 2)?;
                    out.write_str(" -> ")?;
                    b.write(out, 1)?;
                }
            }
        }
        if paren {
            out.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for ModalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

impl std::str::FromStr for ModalFormula {
    type Err = GlpError;

    fn from_str(s: &str) -> Result<Self, GlpError> {
        parse_modal(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Box(usize),
    Dia(usize),
    Not,
    And,
    Or,
    Imp,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, GlpError> {
    let chars: Vec<char> = s.chars().collect();
    let err = |pos: usize, m: &str| GlpError::Parse {
        pos: pos + 1,
        message: m.to_string(),
    };
    let mut out = Vec::new();
    let mut i = 0;
    let index = |i: &mut usize| -> Option<usize> {
        let start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        chars[start..*i].iter().collect::<String>().parse().ok()
    };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let two = chars.get(i + 1).copied();
        match c {
            _ if c.is_whitespace() => i += 1,
            '(' => {
                out.push((start, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((start, Tok::RParen));
                i += 1;
            }
            '~' | '¬' => {
                out.push((start, Tok::Not));
                i += 1;
            }
            '&' | '∧' => {
                out.push((start, Tok::And));
                i += 1;
            }
            '|' | '∨' => {
                out.push((start, Tok::Or));
                i += 1;
            }
            '→' => {
                out.push((start, Tok::Imp));
                i += 1;
            }
            '-' if two == Some('>') => {
                out.push((start, Tok::Imp));
                i += 2;
            }
            '[' | '<' => {
                let (close, diamond) = if c == '[' { (']', false) } else { ('>', true) };
                i += 1;
                let alpha = if chars.get(i) == Some(&close) {
                    i += 1;
                    index(&mut i)
                } else {
                    let a = index(&mut i);
                    if chars.get(i) != Some(&close) {
                        return Err(err(start, "unterminated modality"));
                    }
                    i += 1;
                    a
                };
                let alpha = alpha.ok_or_else(|| err(start, "modality needs a stage index"))?;
                out.push((
                    start,
                    if diamond {
                        Tok::Dia(alpha)
                    } else {
                        Tok::Box(alpha)
                    },
                ));
            }
            _ if c.is_alphabetic() || c == '_' => {
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(chars[start..i].iter().collect())));
            }
            '⊥' => {
                out.push((start, Tok::Ident("bot".into())));
                i += 1;
            }
            '⊤' => {
                out.push((start, Tok::Ident("top".into())));
                i += 1;
            }
            _ => return Err(err(start, &format!("unexpected `{c}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(c, _)| c + 1)
    }

    fn fail<T>(&self, m: &str) -> Result<T, GlpError> {
        Err(GlpError::Parse {
            pos: self.col(),
            message: m.to_string(),
        })
    }

    fn imp(&mut self) -> Result<ModalFormula, GlpError> {
        let a = self.or()?;
        if self.peek() == Some(&Tok::Imp) {
            self.pos += 1;
            return Ok(ModalFormula::imp(a, self.imp()?));
        }
        Ok(a)
    }

    fn or(&mut self) -> Result<ModalFormula, GlpError> {
        let mut a = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            a = ModalFormula::or(a, self.and()?);
        }
        Ok(a)
    }

    fn and(&mut self) -> Result<ModalFormula, GlpError> {
        let mut a = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            a = ModalFormula::and(a, self.unary()?);
        }
        Ok(a)
    }

    fn unary(&mut self) -> Result<ModalFormula, GlpError> {
        let Some(tok) = self.peek().cloned() else {
            return self.fail("unexpected end of input");
        };
        self.pos += 1;
        match tok {
            Tok::Not => Ok(ModalFormula::not(self.unary()?)),
            Tok::Box(a) => Ok(ModalFormula::boxed(a, self.unary()?)),
            Tok::Dia(a) => Ok(ModalFormula::diamond(a, self.unary()?)),
            Tok::Ident(name) => Ok(match name.as_str() {
                "bot" => ModalFormula::Bot,
                "top" => ModalFormula::Top,
                _ => ModalFormula::Var(name),
            }),
            Tok::LParen => {
                let f = self.imp()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.fail("expected `)`");
                }
                self.pos += 1;
                Ok(f)
            }
            _ => {
                self.pos -= 1;
                self.fail("expected a formula")
            }
        }
    }
}

pub fn parse_modal(s: &str) -> Result<ModalFormula, GlpError> {
    let mut p = Parser {
        toks: lex(s)?,
        pos: 0,
        end: s.chars().count() + 1,
    };
    let f = p.imp()?;
    if p.pos < p.toks.len() {
        return p.fail("trailing input");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> ModalFormula {
        parse_modal(s).unwrap()
    }

    #[test]
    fn grammar_and_printing() {
        let f = m("[]0 p -> <>1 q");
        assert_eq!(
            f,
            ModalFormula::imp(
                ModalFormula::boxed(0, ModalFormula::var("p")),
                ModalFormula::diamond(1, ModalFormula::var("q"))
            )
        );
        assert_eq!(f.to_string(), "[]0 p -> <>1 q");
        assert_eq!(
            m("[1]([1]p -> p) -> [1]p").to_string(),
            "[]1 ([]1 p -> p) -> []1 p"
        );
        assert_eq!(m("a -> b -> c"), m("a -> (b -> c)"));
        assert_eq!(m("~a & b | c").to_string(), "~a & b | c");
        for s in [
            "(a -> b) -> c",
            "a & (b | c)",
            "~(a & b)",
            "[]2 ~<>0 bot",
            "a | b | c",
            "a | (b | c)",
        ] {
            assert_eq!(m(&m(s).to_string()), m(s), "{s}");
        }
    }

    #[test]
    fn parse_errors_carry_columns() {
        assert!(matches!(
            parse_modal("p &"),
            Err(GlpError::Parse { pos: 4, .. })
        ));
        assert!(matches!(
            parse_modal("[]x p"),
            Err(GlpError::Parse { pos: 1, .. })
        ));
        assert!(parse_modal("(p").is_err());
    }

    #[test]
    fn stage_range() {
        assert_eq!(m("[]0 []2 p").max_stage(), Some(2));
        assert!(m("[]2 p").check_delta(3).is_ok());
        assert_eq!(
            m("[]3 p").check_delta(3),
            Err(GlpError::StageOutOfRange { alpha: 3, delta: 3 })
        );
    }
}
