//! Formulas of GLP: variables, falsum, implication and the boxes `[i]`.
//!
//! Every other connective is an abbreviation and is expanded at parse time,
//! so the rest of the crate only ever sees the four constructors below.
//!
//! The ASCII grammar accepted by [`parse`]:
//!
//! ```text
//! fml   := 'F' | 'T' | ident | '~' fml | '[' nat ']' fml | '<' nat '>' fml
//!        | '(' fml ('->' | '&' | '|' | '<->') fml ')'
//! ident := [a-z][a-zA-Z0-9_]*
//! ```
//!
//! Parentheses around the outermost binary connective are optional.

use std::collections::btree_set;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(Arc<str>),
    Bot,
    Imp(Arc<Formula>, Arc<Formula>),
    Box(u32, Arc<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(Arc::from(name))
    }

    pub fn bot() -> Formula {
        Formula::Bot
    }

    /// `T`, i.e. `F -> F`.
    pub fn top() -> Formula {
        Formula::imp(Formula::Bot, Formula::Bot)
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Arc::new(a), Arc::new(b))
    }

    pub fn boxed(index: u32, body: Formula) -> Formula {
        Formula::Box(index, Arc::new(body))
    }

    pub fn not(a: Formula) -> Formula {
        Formula::imp(a, Formula::Bot)
    }

    /// `a & b := ~(a -> ~b)`
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::imp(a, Formula::not(b)))
    }

    /// `a | b := ~a -> b`
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::imp(Formula::not(a), b)
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    /// `<i>a := ~[i]~a`
    pub fn diamond(index: u32, a: Formula) -> Formula {
        Formula::not(Formula::boxed(index, Formula::not(a)))
    }

    /// Right-nested conjunction in the given order; the empty conjunction is `T`.
    pub fn conj<I>(items: I) -> Formula
    where
        I: IntoIterator<Item = Formula>,
        I::IntoIter: DoubleEndedIterator,
    {
        let mut iter = items.into_iter().rev();
        match iter.next() {
            None => Formula::top(),
            Some(last) => iter.fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    pub fn as_imp(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Imp(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_box(&self) -> Option<(u32, &Formula)> {
        match self {
            Formula::Box(i, b) => Some((*i, b)),
            _ => None,
        }
    }

    /// Matches `~a`, i.e. `a -> F`.
    pub fn as_not(&self) -> Option<&Formula> {
        match self.as_imp() {
            Some((a, Formula::Bot)) => Some(a),
            _ => None,
        }
    }

    /// Matches the desugared form of `a & b`.
    pub fn as_and(&self) -> Option<(&Formula, &Formula)> {
        let (a, nb) = self.as_not()?.as_imp()?;
        Some((a, nb.as_not()?))
    }

    /// Matches the desugared form of `<i>a`.
    pub fn as_diamond(&self) -> Option<(u32, &Formula)> {
        let (i, body) = self.as_not()?.as_box()?;
        Some((i, body.as_not()?))
    }

    pub fn is_top(&self) -> bool {
        matches!(self.as_not(), Some(Formula::Bot))
    }

    /// Number of constructor occurrences.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Bot => 1,
            Formula::Imp(a, b) => 1 + a.size() + b.size(),
            Formula::Box(_, b) => 1 + b.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Bot => 0,
            Formula::Imp(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Box(_, b) => 1 + b.depth(),
        }
    }

    /// Propositional variables occurring in the formula.
    pub fn vars(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::Var(n) => {
                out.insert(n.clone());
            }
            Formula::Bot => {}
            Formula::Imp(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Box(_, b) => b.collect_vars(out),
        }
    }

    /// Largest box index occurring in the formula, if any.
    pub fn max_box_index(&self) -> Option<u32> {
        match self {
            Formula::Var(_) | Formula::Bot => None,
            Formula::Imp(a, b) => a.max_box_index().max(b.max_box_index()),
            Formula::Box(i, b) => Some((*i).max(b.max_box_index().unwrap_or(0))),
        }
    }

    pub fn is_subformula_of(&self, other: &Formula) -> bool {
        if self == other {
            return true;
        }
        match other {
            Formula::Var(_) | Formula::Bot => false,
            Formula::Imp(a, b) => self.is_subformula_of(a) || self.is_subformula_of(b),
            Formula::Box(_, b) => self.is_subformula_of(b),
        }
    }

    /// Maximal subformulas that are variables or boxed formulas. The formula is
    /// a pure Boolean combination of these.
    pub fn modal_atoms(&self) -> FormulaSet {
        let mut out = FormulaSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut FormulaSet) {
        match self {
            Formula::Var(_) | Formula::Box(..) => {
                out.insert(self.clone());
            }
            Formula::Bot => {}
            Formula::Imp(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Canonical fully parenthesized text. Round-trips through [`parse`].
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write_canonical(&mut s);
        s
    }

    fn write_canonical(&self, out: &mut String) {
        match self {
            Formula::Var(n) => out.push_str(n),
            Formula::Bot => out.push('F'),
            Formula::Imp(a, b) => {
                out.push('(');
                a.write_canonical(out);
                out.push_str(" -> ");
                b.write_canonical(out);
                out.push(')');
            }
            Formula::Box(i, b) => {
                out.push('[');
                out.push_str(&i.to_string());
                out.push(']');
                b.write_canonical(out);
            }
        }
    }

    /// Human-oriented text that folds `T`, `~`, `&`, `<->` and `<i>` back in.
    /// Parses to the same formula as [`Formula::render`].
    pub fn sugared(&self) -> String {
        let mut s = String::new();
        self.write_sugared(&mut s, true);
        s
    }

    fn write_sugared(&self, out: &mut String, outer: bool) {
        let open = |out: &mut String| {
            if !outer {
                out.push('(')
            }
        };
        let close = |out: &mut String| {
            if !outer {
                out.push(')')
            }
        };
        if self.is_top() {
            out.push('T');
            return;
        }
        if let Some((a, b)) = self.as_and() {
            if let (Some((x1, y1)), Some((y2, x2))) = (a.as_imp(), b.as_imp()) {
                if x1 == x2 && y1 == y2 {
                    open(out);
                    x1.write_sugared(out, false);
                    out.push_str(" <-> ");
                    y1.write_sugared(out, false);
                    close(out);
                    return;
                }
            }
            open(out);
            a.write_sugared(out, false);
            out.push_str(" & ");
            b.write_sugared(out, false);
            close(out);
            return;
        }
        if let Some((i, a)) = self.as_diamond() {
            out.push_str(&format!("<{i}>"));
            a.write_sugared(out, false);
            return;
        }
        if let Some(a) = self.as_not() {
            out.push('~');
            a.write_sugared(out, false);
            return;
        }
        match self {
            Formula::Var(n) => out.push_str(n),
            Formula::Bot => out.push('F'),
            Formula::Box(i, b) => {
                out.push_str(&format!("[{i}]"));
                b.write_sugared(out, false);
            }
            Formula::Imp(a, b) => {
                open(out);
                a.write_sugared(out, false);
                out.push_str(" -> ");
                b.write_sugared(out, false);
                close(out);
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.sugared())
    }
}

/// A duplicate-free finite set of formulas under structural equality.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormulaSet(BTreeSet<Formula>);

impl FormulaSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses a comma-separated list. The empty string is the empty set.
    pub fn parse_list(text: &str) -> Result<Self, ParseError> {
        let mut set = FormulaSet::new();
        let mut offset = 0;
        for piece in text.split(',') {
            if !piece.trim().is_empty() {
                let f = parse(piece).map_err(|e| ParseError {
                    pos: e.pos + offset,
                    msg: e.msg,
                })?;
                set.insert(f);
            }
            offset += piece.len() + 1;
        }
        Ok(set)
    }

    pub fn insert(&mut self, f: Formula) -> bool {
        self.0.insert(f)
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.0.contains(f)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> btree_set::Iter<'_, Formula> {
        self.0.iter()
    }

    pub fn is_subset(&self, other: &FormulaSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &FormulaSet) -> FormulaSet {
        FormulaSet(self.0.union(&other.0).cloned().collect())
    }
}

impl FromIterator<Formula> for FormulaSet {
    fn from_iter<T: IntoIterator<Item = Formula>>(iter: T) -> Self {
        FormulaSet(iter.into_iter().collect())
    }
}

impl IntoIterator for FormulaSet {
    type Item = Formula;
    type IntoIter = btree_set::IntoIter<Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a FormulaSet {
    type Item = &'a Formula;
    type IntoIter = btree_set::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for FormulaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for FormulaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", x.sugared())?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {pos}: {msg}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok<'a> {
    False,
    True,
    Ident(&'a str),
    Nat(&'a str),
    Tilde,
    LBrack,
    RBrack,
    LAngle,
    RAngle,
    LParen,
    RParen,
    Arrow,
    And,
    Or,
    Iff,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok<'_>)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'F' => Tok::False,
            b'T' => Tok::True,
            b'~' => Tok::Tilde,
            b'[' => Tok::LBrack,
            b']' => Tok::RBrack,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'>' => Tok::RAngle,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                out.push((start, Tok::Arrow));
                continue;
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 3;
                out.push((start, Tok::Iff));
                continue;
            }
            b'<' => Tok::LAngle,
            b'a'..=b'z' => {
                i += 1;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(&text[start..i])));
                continue;
            }
            b'0'..=b'9' => {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Nat(&text[start..i])));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    pos: i,
                    msg: format!("unexpected character '{ch}'"),
                });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok<'a>)>,
    at: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<Tok<'a>> {
        self.toks.get(self.at).map(|t| t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok<'a>> {
        let t = self.peek();
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok<'a>, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(want) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn binop(&mut self) -> Option<fn(Formula, Formula) -> Formula> {
        let op: fn(Formula, Formula) -> Formula = match self.peek()? {
            Tok::Arrow => Formula::imp,
            Tok::And => Formula::and,
            Tok::Or => Formula::or,
            Tok::Iff => Formula::iff,
            _ => return None,
        };
        self.at += 1;
        Some(op)
    }

    /// `unary (binop unary)?`
    fn binary(&mut self) -> Result<Formula, ParseError> {
        let left = self.unary()?;
        match self.binop() {
            Some(op) => {
                let right = self.unary()?;
                Ok(op(left, right))
            }
            None => Ok(left),
        }
    }

    fn index(&mut self) -> Result<u32, ParseError> {
        match self.peek() {
            Some(Tok::Nat(digits)) => {
                let value = digits.parse::<u32>().or_else(|_| self.err("box index out of range"))?;
                self.at += 1;
                Ok(value)
            }
            _ => self.err("box index must be a natural number"),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.bump() {
            Some(Tok::False) => Ok(Formula::Bot),
            Some(Tok::True) => Ok(Formula::top()),
            Some(Tok::Ident(name)) => Ok(Formula::var(name)),
            Some(Tok::Tilde) => Ok(Formula::not(self.unary()?)),
            Some(Tok::LBrack) => {
                let i = self.index()?;
                self.expect(Tok::RBrack, "']'")?;
                Ok(Formula::boxed(i, self.unary()?))
            }
            Some(Tok::LAngle) => {
                let i = self.index()?;
                self.expect(Tok::RAngle, "'>'")?;
                Ok(Formula::diamond(i, self.unary()?))
            }
            Some(Tok::LParen) => {
                let inner = self.binary()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(_) => {
                self.at -= 1;
                self.err("expected a formula")
            }
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses and fully desugars a formula.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
    };
    let f = p.binary()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// Parses a formula, panicking on malformed input. Intended for literals in
/// tests and examples.
pub fn fml(text: &str) -> Formula {
    parse(text).unwrap_or_else(|e| panic!("bad formula literal {text:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::var("p")
    }

    fn q() -> Formula {
        Formula::var("q")
    }

    #[test]
    fn parses_distribution_axiom_shape() {
        let f = parse("[0](p -> q) -> ([0]p -> [0]q)").unwrap();
        let expected = Formula::imp(
            Formula::boxed(0, Formula::imp(p(), q())),
            Formula::imp(Formula::boxed(0, p()), Formula::boxed(0, q())),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn diamond_and_top_are_expanded() {
        assert_eq!(
            parse("<1>p").unwrap(),
            Formula::imp(Formula::boxed(1, Formula::imp(p(), Formula::Bot)), Formula::Bot)
        );
        assert_eq!(parse("T").unwrap(), Formula::imp(Formula::Bot, Formula::Bot));
    }

    #[test]
    fn other_abbreviations() {
        assert_eq!(fml("~p"), Formula::imp(p(), Formula::Bot));
        assert_eq!(fml("p & q"), Formula::not(Formula::imp(p(), Formula::not(q()))));
        assert_eq!(fml("p | q"), Formula::imp(Formula::not(p()), q()));
        assert_eq!(
            fml("p <-> q"),
            Formula::and(Formula::imp(p(), q()), Formula::imp(q(), p()))
        );
        assert_eq!(fml("(p)"), p());
        assert_eq!(fml("((p -> q))"), Formula::imp(p(), q()));
    }

    #[test]
    fn render_examples() {
        assert_eq!(Formula::Bot.render(), "F");
        assert_eq!(Formula::boxed(2, p()).render(), "[2]p");
        assert_eq!(Formula::top().render(), "(F -> F)");
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse("[x]p").unwrap_err();
        assert_eq!(e.pos, 1);
        assert!(e.msg.contains("natural number"));
        let e = parse("p -> ").unwrap_err();
        assert_eq!(e.pos, 5);
        assert!(parse("p -> q -> r").is_err());
        assert!(parse("(p -> q").is_err());
        assert!(parse("P").is_err());
        assert!(parse("[99999999999]p").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn modal_atoms_examples() {
        let atoms: Vec<_> = fml("[0]p -> (q -> [1][0]p)").modal_atoms().into_iter().collect();
        let mut expected = vec![fml("[0]p"), q(), fml("[1][0]p")];
        expected.sort();
        assert_eq!(atoms, expected);
        assert!(fml("F").modal_atoms().is_empty());
        let atoms: Vec<_> = fml("[0]([0]p -> p)").modal_atoms().into_iter().collect();
        assert_eq!(atoms, vec![fml("[0]([0]p -> p)")]);
    }

    #[test]
    fn conj_is_right_nested() {
        assert_eq!(Formula::conj(Vec::new()), Formula::top());
        assert_eq!(Formula::conj(vec![p()]), p());
        assert_eq!(
            Formula::conj(vec![p(), q(), Formula::Bot]),
            Formula::and(p(), Formula::and(q(), Formula::Bot))
        );
    }

    #[test]
    fn sugared_output_reparses() {
        for text in ["<1>p -> [2]<1>p", "(p & q) -> p", "T", "~~p", "(p <-> q) & r", "[0](p | q)"] {
            let f = fml(text);
            assert_eq!(fml(&f.sugared()), f, "{text}");
        }
        assert_eq!(fml("<1>p -> [2]<1>p").sugared(), "<1>p -> [2]<1>p");
    }

    #[test]
    fn formula_set_parsing() {
        let s = FormulaSet::parse_list("p, [0]p -> p, p").unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.contains(&fml("[0]p -> p")));
        assert!(FormulaSet::parse_list("").unwrap().is_empty());
        let e = FormulaSet::parse_list("p, [x]q").unwrap_err();
        assert_eq!(e.pos, 4);
    }
}
