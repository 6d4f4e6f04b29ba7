use super::vocab::is_identifier;
use super::{Formula, Term};
use std::fmt::{self, Display, Formatter, Write};

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => write!(f, "{v}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                write_list(f, args, ", ")?;
                f.write_char(')')
            }
            Term::Iota(v, body) => write!(f, "(iota {v} . {body})"),
        }
    }
}

fn write_list<T: Display>(f: &mut Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

/// Wraps formulas that would otherwise swallow or split their context.
struct Operand<'a>(&'a Formula);

impl Display for Operand<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            Formula::Forall(..) | Formula::Exists(..) => write!(f, "({})", self.0),
            other => write!(f, "{other}"),
        }
    }
}

/// Operand of `~`: infix atoms need parentheses as well.
struct NegOperand<'a>(&'a Formula);

impl Display for NegOperand<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            Formula::Eq(..) => write!(f, "({})", self.0),
            Formula::Atom(r, args) if args.len() == 2 && !is_identifier(r.as_str()) => {
                write!(f, "({})", self.0)
            }
            other => write!(f, "{}", Operand(other)),
        }
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(r, args) => {
                if args.len() == 2 && !is_identifier(r.as_str()) {
                    write!(f, "{} {r} {}", args[0], args[1])
                } else {
                    write!(f, "{r}(")?;
                    write_list(f, args, ", ")?;
                    f.write_char(')')
                }
            }
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Not(g) => write!(f, "~{}", NegOperand(g)),
            Formula::And(gs) | Formula::Or(gs) => {
                let (name, op) = if matches!(self, Formula::And(_)) {
                    ("And", " & ")
                } else {
                    ("Or", " | ")
                };
                if gs.len() == 2 {
                    write!(f, "({}{op}{})", Operand(&gs[0]), Operand(&gs[1]))
                } else {
                    write!(f, "{name}[")?;
                    write_list(f, gs, "; ")?;
                    f.write_char(']')
                }
            }
            Formula::Imp(a, b) => write!(f, "({} -> {})", Operand(a), Operand(b)),
            Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                let q = if matches!(self, Formula::Forall(..)) {
                    "forall"
                } else {
                    "exists"
                };
                write!(f, "{q} ")?;
                write_list(f, vs, " ")?;
                write!(f, " . {g}")
            }
        }
    }
}
