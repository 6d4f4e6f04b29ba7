use super::{GlpError, ModalFormula};
use std::collections::BTreeMap;
use std::fmt;

/// Letter limit for the truth-table check.
pub const TAUTOLOGY_LETTERS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Schema {
    Tautology,
    /// `[a](p -> q) -> ([a]p -> [a]q)`
    Distribution,
    /// `[a]([a]p -> p) -> [a]p`
    Lob,
    /// `[a]p -> [b]p` for `a < b`
    Monotonicity,
    /// `<a>p -> [b]<a>p` for `a < b`
    Stability,
}

impl Schema {
    pub const MODAL: [Schema; 4] = [
        Schema::Distribution,
        Schema::Lob,
        Schema::Monotonicity,
        Schema::Stability,
    ];

    /// `taut`, `i`, `ii`, `iii`, `iv`.
    pub fn label(self) -> &'static str {
        match self {
            Schema::Tautology => "taut",
            Schema::Distribution => "i",
            Schema::Lob => "ii",
            Schema::Monotonicity => "iii",
            Schema::Stability => "iv",
        }
    }

    pub fn from_label(s: &str) -> Option<Schema> {
        [Schema::Tautology]
            .into_iter()
            .chain(Schema::MODAL)
            .find(|k| k.label() == s)
    }

    /// Whether `f` is an instance of this schema with every index below `delta`.
    pub fn matches(self, f: &ModalFormula, delta: usize) -> bool {
        if f.check_delta(delta).is_err() {
            return false;
        }
        use ModalFormula as M;
        let M::Imp(lhs, rhs) = f else {
            return self == Schema::Tautology && is_tautology(f).unwrap_or(false);
        };
        match self {
            Schema::Tautology => is_tautology(f).unwrap_or(false),
            Schema::Distribution => match (&**lhs, &**rhs) {
                (M::Box(a, inner), M::Imp(l, r)) => match (&**inner, &**l, &**r) {
                    (M::Imp(p, q), M::Box(b, p2), M::Box(c, q2)) => {
                        a == b && a == c && p == p2 && q == q2
                    }
                    _ => false,
                },
                _ => false,
            },
            Schema::Lob => match (&**lhs, &**rhs) {
                (M::Box(a, inner), M::Box(b, p)) => match &**inner {
                    M::Imp(l, p2) => a == b && p == p2 && **l == M::Box(*a, p.clone()),
                    _ => false,
                },
                _ => false,
            },
            Schema::Monotonicity => match (&**lhs, &**rhs) {
                (M::Box(a, p), M::Box(b, q)) => a < b && p == q,
                _ => false,
            },
            Schema::Stability => match (lhs.as_diamond(), &**rhs) {
                (Some((a, p)), M::Box(b, inner)) => a < *b && inner.as_diamond() == Some((a, p)),
                _ => false,
            },
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The first matching schema, modal schemas before tautologies.
pub fn recognize_axiom(f: &ModalFormula, delta: usize) -> Option<Schema> {
    Schema::MODAL
        .into_iter()
        .chain([Schema::Tautology])
        .find(|s| s.matches(f, delta))
}

#[derive(Debug)]
enum Skel {
    Letter(usize),
    Const(bool),
    Not(Box<Skel>),
    And(Box<Skel>, Box<Skel>),
    Or(Box<Skel>, Box<Skel>),
    Imp(Box<Skel>, Box<Skel>),
}

impl Skel {
    fn eval(&self, bits: u32) -> bool {
        match self {
            Skel::Letter(i) => bits >> i & 1 == 1,
            Skel::Const(b) => *b,
            Skel::Not(a) => !a.eval(bits),
            Skel::And(a, b) => a.eval(bits) && b.eval(bits),
            Skel::Or(a, b) => a.eval(bits) || b.eval(bits),
            Skel::Imp(a, b) => !a.eval(bits) || b.eval(bits),
        }
    }
}

fn skeleton<'a>(f: &'a ModalFormula, letters: &mut BTreeMap<&'a ModalFormula, usize>) -> Skel {
    use ModalFormula as M;
    let bin = |a: &'a M, b: &'a M, letters: &mut BTreeMap<&'a M, usize>| {
        (
            Box::new(skeleton(a, letters)),
            Box::new(skeleton(b, letters)),
        )
    };
    match f {
        M::Bot => Skel::Const(false),
        M::Top => Skel::Const(true),
        M::Not(a) => Skel::Not(Box::new(skeleton(a, letters))),
        M::And(a, b) => {
            let (a, b) = bin(a, b, letters);
            Skel::And(a, b)
        }
        M::Or(a, b) => {
            let (a, b) = bin(a, b, letters);
            Skel::Or(a, b)
        }
        M::Imp(a, b) => {
            let (a, b) = bin(a, b, letters);
            Skel::Imp(a, b)
        }
        M::Var(_) | M::Box(..) => {
            let next = letters.len();
            Skel::Letter(*letters.entry(f).or_insert(next))
        }
    }
}

/// Truth-table check treating variables and boxed subformulas as letters.
pub fn is_tautology(f: &ModalFormula) -> Result<bool, GlpError> {
    let mut letters = BTreeMap::new();
    let sk = skeleton(f, &mut letters);
    if letters.len() > TAUTOLOGY_LETTERS {
        return Err(GlpError::TooManyLetters(letters.len()));
    }
    Ok((0..1u32 << letters.len()).all(|bits| sk.eval(bits)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glp::parse_modal;

    fn rec(s: &str) -> Option<Schema> {
        recognize_axiom(&parse_modal(s).unwrap(), 3)
    }

    #[test]
    fn schema_instances() {
        assert_eq!(rec("[1]([1]p -> p) -> [1]p"), Some(Schema::Lob));
        assert_eq!(rec("[0]p -> [1]p"), Some(Schema::Monotonicity));
        assert_eq!(rec("[1]p -> [0]p"), None);
        assert_eq!(rec("<0>p -> [1]<0>p"), Some(Schema::Stability));
        assert_eq!(rec("<1>p -> [0]<1>p"), None);
        assert_eq!(
            rec("[2](p -> q) -> ([2]p -> [2]q)"),
            Some(Schema::Distribution)
        );
        assert_eq!(rec("[2](p -> q) -> ([1]p -> [2]q)"), None);
        assert_eq!(rec("[0]p -> [0]p"), Some(Schema::Tautology));
        assert_eq!(rec("[0]p -> [3]p"), None);
    }

    #[test]
    fn tautology_limit() {
        assert_eq!(is_tautology(&parse_modal("p | ~p").unwrap()), Ok(true));
        assert_eq!(is_tautology(&parse_modal("[0]p -> p").unwrap()), Ok(false));
        let wide = parse_modal("a | b | c | d | e | f | g | ~a").unwrap();
        assert_eq!(is_tautology(&wide), Err(GlpError::TooManyLetters(7)));
    }
}
