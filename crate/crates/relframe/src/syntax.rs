//! Abstract syntax, parser, printer, and desugaring for the predicate
//! language.
//!
//! Predicates are terms of the calculus of relations built from named
//! atoms and the identity constant `1'` with the core operators
//! join (`+`), complement (`-`), relative product (`;`), and converse
//! (postfix `^`).  On top of the core signature the language provides
//! derived Boolean constants (`0`, `1`, `0'`), Boolean meet (`.`) and
//! dual product (`!`), and the relevance-logic operators: disjunction
//! (`|`), conjunction (`&`), De Morgan negation (`~`), Boolean negation
//! (`not`), implication (`->`), fusion (`o`), the Routley star (postfix
//! `*`), and the truth constant `t`.
//!
//! Every derived operator [desugars](desugar) into the core signature:
//!
//! | derived | core definition |
//! |---------|-----------------|
//! | `A . B` | `-(-A + -B)` |
//! | `A ! B` | `-(-A ; -B)` |
//! | `1`     | `1' + -1'` |
//! | `0`     | `-(1' + -1')` |
//! | `0'`    | `-1'` |
//! | `A \| B` | `A + B` |
//! | `A & B` | `-(-A + -B)` |
//! | `~A`    | `-(A^)` |
//! | `not A` | `-A` |
//! | `A -> B`| `-(A^ ; -B)` |
//! | `A o B` | `B ; A` |
//! | `A*`    | `A^` |
//! | `t`     | `1'` |
//!
//! The concrete grammar is described in [`parse_predicate`].

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// A term of the predicate language.
///
/// The first six constructors (plus [`Identity`](PredicateTerm::Identity))
/// form the core signature; the remainder are derived operators that are
/// kept in the tree so printing and vocabulary classification can reflect
/// the user's input.  Use [`desugar`] to reduce a term to the core
/// signature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PredicateTerm {
    /// A named atomic predicate.
    Atom(String),
    /// The identity constant `1'`.
    Identity,
    /// Boolean join `l + r`.
    Join(Box<PredicateTerm>, Box<PredicateTerm>),
    /// Boolean complement `-p`.
    Complement(Box<PredicateTerm>),
    /// Relative product `l ; r`.
    RelProd(Box<PredicateTerm>, Box<PredicateTerm>),
    /// Converse `p^`.
    Converse(Box<PredicateTerm>),

    /// Boolean meet `l . r`, defined as `-(-l + -r)`.
    Meet(Box<PredicateTerm>, Box<PredicateTerm>),
    /// Dual relative product `l ! r`, defined as `-(-l ; -r)`.
    Dagger(Box<PredicateTerm>, Box<PredicateTerm>),
    /// The empty relation `0`, defined as `-1`.
    Zero,
    /// The universal relation `1`, defined as `1' + -1'`.
    One,
    /// The diversity relation `0'`, defined as `-1'`.
    Diversity,

    /// Relevance disjunction `l | r`, defined as `l + r`.
    Or(Box<PredicateTerm>, Box<PredicateTerm>),
    /// Relevance conjunction `l & r`, defined as `l . r`.
    And(Box<PredicateTerm>, Box<PredicateTerm>),
    /// Boolean negation `not p`, defined as `-p`.
    BoolNeg(Box<PredicateTerm>),
    /// De Morgan negation `~p`, defined as `-(p^)`.
    DeMorganNeg(Box<PredicateTerm>),
    /// Relevant implication `l -> r`, defined as `-(l^ ; -r)`.
    Implies(Box<PredicateTerm>, Box<PredicateTerm>),
    /// Fusion `l o r`, defined as `r ; l`.
    Fusion(Box<PredicateTerm>, Box<PredicateTerm>),
    /// The Routley star `p*`, defined as `p^`.
    Star(Box<PredicateTerm>),
    /// The truth constant `t`, defined as `1'`.
    Truth,
}

use PredicateTerm::*;

impl PredicateTerm {
    /// Convenience constructor for a named atom.
    pub fn atom(name: &str) -> Self {
        Atom(name.to_string())
    }
}

/// Which operator vocabulary a term is written in (before desugaring).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VocabularyClass {
    /// Uses at least one core or derived-Boolean relational operator
    /// (`+`, `-`, `;`, `^`, `1'`, `.`, `!`, `0`, `1`, `0'`).
    Core,
    /// Uses only relevance operators plus Boolean negation and/or the
    /// Routley star.
    ClassicalRelevant,
    /// Uses only the relevance operators `|`, `&`, `~`, `->`, `o`, `t`
    /// over atoms.
    RelevanceOnly,
}

/// Error produced by [`parse_predicate`].
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("syntax error at byte {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the input where the error was detected.
    pub position: usize,
    /// Human-readable description of what went wrong.
    pub message: String,
}

/// Reduce a term to the core signature (`Atom`, `Identity`, `Join`,
/// `Complement`, `RelProd`, `Converse`).
///
/// Desugaring is idempotent and preserves the semantics of every
/// operation in the complex-algebra evaluator.
pub fn desugar(p: &PredicateTerm) -> PredicateTerm {
    fn j(l: PredicateTerm, r: PredicateTerm) -> PredicateTerm {
        Join(Box::new(l), Box::new(r))
    }
    fn c(p: PredicateTerm) -> PredicateTerm {
        Complement(Box::new(p))
    }
    fn rp(l: PredicateTerm, r: PredicateTerm) -> PredicateTerm {
        RelProd(Box::new(l), Box::new(r))
    }
    fn cv(p: PredicateTerm) -> PredicateTerm {
        Converse(Box::new(p))
    }
    match p {
        Atom(_) | Identity => p.clone(),
        Join(l, r) => j(desugar(l), desugar(r)),
        Complement(q) => c(desugar(q)),
        RelProd(l, r) => rp(desugar(l), desugar(r)),
        Converse(q) => cv(desugar(q)),
        Meet(l, r) | And(l, r) => c(j(c(desugar(l)), c(desugar(r)))),
        Dagger(l, r) => c(rp(c(desugar(l)), c(desugar(r)))),
        One => j(Identity, c(Identity)),
        Zero => c(j(Identity, c(Identity))),
        Diversity => c(Identity),
        Or(l, r) => j(desugar(l), desugar(r)),
        BoolNeg(q) => c(desugar(q)),
        DeMorganNeg(q) => c(cv(desugar(q))),
        Implies(l, r) => c(rp(cv(desugar(l)), c(desugar(r)))),
        Fusion(l, r) => rp(desugar(r), desugar(l)),
        Star(q) => cv(desugar(q)),
        Truth => Identity,
    }
}

/// Classify which operator vocabulary `p` is written in.
///
/// The classification looks at the constructors actually present, not at
/// the desugared form: `Core` if any core/derived-Boolean operator occurs,
/// otherwise `ClassicalRelevant` if Boolean negation or the Routley star
/// occurs, otherwise `RelevanceOnly`.
pub fn vocabulary_class(p: &PredicateTerm) -> VocabularyClass {
    fn scan(p: &PredicateTerm, core: &mut bool, classical: &mut bool) {
        match p {
            Atom(_) => {}
            Identity | Zero | One | Diversity => *core = true,
            Join(l, r) | RelProd(l, r) | Meet(l, r) | Dagger(l, r) => {
                *core = true;
                scan(l, core, classical);
                scan(r, core, classical);
            }
            Complement(q) | Converse(q) => {
                *core = true;
                scan(q, core, classical);
            }
            BoolNeg(q) | Star(q) => {
                *classical = true;
                scan(q, core, classical);
            }
            Or(l, r) | And(l, r) | Implies(l, r) | Fusion(l, r) => {
                scan(l, core, classical);
                scan(r, core, classical);
            }
            DeMorganNeg(q) => scan(q, core, classical),
            Truth => {}
        }
    }
    let (mut core, mut classical) = (false, false);
    scan(p, &mut core, &mut classical);
    if core {
        VocabularyClass::Core
    } else if classical {
        VocabularyClass::ClassicalRelevant
    } else {
        VocabularyClass::RelevanceOnly
    }
}

/// Collect the atom names occurring in `p` (constants excluded).
pub fn variables_of(p: &PredicateTerm) -> BTreeSet<String> {
    fn walk(p: &PredicateTerm, out: &mut BTreeSet<String>) {
        match p {
            Atom(name) => {
                out.insert(name.clone());
            }
            Identity | Zero | One | Diversity | Truth => {}
            Join(l, r)
            | RelProd(l, r)
            | Meet(l, r)
            | Dagger(l, r)
            | Or(l, r)
            | And(l, r)
            | Implies(l, r)
            | Fusion(l, r) => {
                walk(l, out);
                walk(r, out);
            }
            Complement(q) | Converse(q) | BoolNeg(q) | Star(q) | DeMorganNeg(q) => walk(q, out),
        }
    }
    let mut out = BTreeSet::new();
    walk(p, &mut out);
    out
}

/// Collect the atom names of `p` in order of first occurrence (left to
/// right).  Used by the validity sweeps, whose cache layout depends on
/// occurrence order.
pub fn variables_in_order(p: &PredicateTerm) -> Vec<String> {
    fn walk(p: &PredicateTerm, out: &mut Vec<String>) {
        match p {
            Atom(name) => {
                if !out.iter().any(|n| n == name) {
                    out.push(name.clone());
                }
            }
            Identity | Zero | One | Diversity | Truth => {}
            Join(l, r)
            | RelProd(l, r)
            | Meet(l, r)
            | Dagger(l, r)
            | Or(l, r)
            | And(l, r)
            | Implies(l, r)
            | Fusion(l, r) => {
                walk(l, out);
                walk(r, out);
            }
            Complement(q) | Converse(q) | BoolNeg(q) | Star(q) | DeMorganNeg(q) => walk(q, out),
        }
    }
    let mut out = Vec::new();
    walk(p, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    IdentityConst, // 1'
    ZeroConst,     // 0
    OneConst,      // 1
    DiversityConst, // 0'
    TruthConst,    // t
    Not,           // not
    Plus,
    Bar,
    Semi,
    CircleO,
    Amp,
    Dot,
    Bang,
    Arrow,
    Minus,
    Tilde,
    Caret,
    Asterisk,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    tokens: Vec<(Token, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Token, usize)>, ParseError> {
        let mut lx = Lexer {
            src,
            pos: 0,
            tokens: Vec::new(),
        };
        lx.scan()?;
        Ok(lx.tokens)
    }

    fn scan(&mut self) -> Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            let start = self.pos;
            let ch = bytes[self.pos] as char;
            match ch {
                ' ' | '\t' | '\n' | '\r' => {
                    self.pos += 1;
                }
                '+' => self.push(Token::Plus),
                '|' => self.push(Token::Bar),
                ';' => self.push(Token::Semi),
                '&' => self.push(Token::Amp),
                '.' => self.push(Token::Dot),
                '!' => self.push(Token::Bang),
                '~' => self.push(Token::Tilde),
                '^' => self.push(Token::Caret),
                '*' => self.push(Token::Asterisk),
                '(' => self.push(Token::LParen),
                ')' => self.push(Token::RParen),
                '-' => {
                    if bytes.get(self.pos + 1) == Some(&b'>') {
                        self.tokens.push((Token::Arrow, start));
                        self.pos += 2;
                    } else {
                        self.push(Token::Minus);
                    }
                }
                '0' => {
                    if bytes.get(self.pos + 1) == Some(&b'\'') {
                        self.tokens.push((Token::DiversityConst, start));
                        self.pos += 2;
                    } else {
                        self.push(Token::ZeroConst);
                    }
                }
                '1' => {
                    if bytes.get(self.pos + 1) == Some(&b'\'') {
                        self.tokens.push((Token::IdentityConst, start));
                        self.pos += 2;
                    } else {
                        self.push(Token::OneConst);
                    }
                }
                c if c.is_ascii_alphabetic() => {
                    let mut end = self.pos + 1;
                    while end < bytes.len()
                        && ((bytes[end] as char).is_ascii_alphanumeric() || bytes[end] == b'_')
                    {
                        end += 1;
                    }
                    let word = &self.src[self.pos..end];
                    let tok = match word {
                        "t" => Token::TruthConst,
                        "o" => Token::CircleO,
                        "not" => Token::Not,
                        _ => Token::Ident(word.to_string()),
                    };
                    self.tokens.push((tok, start));
                    self.pos = end;
                }
                other => {
                    return Err(ParseError {
                        position: start,
                        message: format!("unexpected character {other:?}"),
                    })
                }
            }
        }
        Ok(())
    }

    fn push(&mut self, tok: Token) {
        self.tokens.push((tok, self.pos));
        self.pos += 1;
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.idx).map(|&(_, p)| p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.idx).map(|(t, _)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, tok: &Token) -> Result<(), ParseError> {
        if self.peek() == Some(tok) {
            self.idx += 1;
            Ok(())
        } else {
            Err(ParseError {
                position: self.pos(),
                message: format!("expected {tok:?}"),
            })
        }
    }

    /// implication level: left-associative `->`
    fn parse_implies(&mut self) -> Result<PredicateTerm, ParseError> {
        let mut acc = self.parse_join()?;
        while self.peek() == Some(&Token::Arrow) {
            self.idx += 1;
            let rhs = self.parse_join()?;
            acc = Implies(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    /// join level: `+` and `|`
    fn parse_join(&mut self) -> Result<PredicateTerm, ParseError> {
        let mut acc = self.parse_dagger()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.idx += 1;
                    let rhs = self.parse_dagger()?;
                    acc = Join(Box::new(acc), Box::new(rhs));
                }
                Some(Token::Bar) => {
                    self.idx += 1;
                    let rhs = self.parse_dagger()?;
                    acc = Or(Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    /// dagger level: `!`
    fn parse_dagger(&mut self) -> Result<PredicateTerm, ParseError> {
        let mut acc = self.parse_meet()?;
        while self.peek() == Some(&Token::Bang) {
            self.idx += 1;
            let rhs = self.parse_meet()?;
            acc = Dagger(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    /// meet level: `&` and `.`
    fn parse_meet(&mut self) -> Result<PredicateTerm, ParseError> {
        let mut acc = self.parse_product()?;
        loop {
            match self.peek() {
                Some(Token::Amp) => {
                    self.idx += 1;
                    let rhs = self.parse_product()?;
                    acc = And(Box::new(acc), Box::new(rhs));
                }
                Some(Token::Dot) => {
                    self.idx += 1;
                    let rhs = self.parse_product()?;
                    acc = Meet(Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    /// product level: `;` and `o`
    fn parse_product(&mut self) -> Result<PredicateTerm, ParseError> {
        let mut acc = self.parse_unary()?;
        loop {
            match self.peek() {
                Some(Token::Semi) => {
                    self.idx += 1;
                    let rhs = self.parse_unary()?;
                    acc = RelProd(Box::new(acc), Box::new(rhs));
                }
                Some(Token::CircleO) => {
                    self.idx += 1;
                    let rhs = self.parse_unary()?;
                    acc = Fusion(Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    /// unary level: prefix `-`, `~`, `not`; postfix `^`, `*`
    fn parse_unary(&mut self) -> Result<PredicateTerm, ParseError> {
        match self.peek() {
            Some(Token::Minus) => {
                self.idx += 1;
                let inner = self.parse_unary()?;
                Ok(Complement(Box::new(inner)))
            }
            Some(Token::Tilde) => {
                self.idx += 1;
                let inner = self.parse_unary()?;
                Ok(DeMorganNeg(Box::new(inner)))
            }
            Some(Token::Not) => {
                self.idx += 1;
                let inner = self.parse_unary()?;
                Ok(BoolNeg(Box::new(inner)))
            }
            _ => {
                let mut acc = self.parse_atom()?;
                loop {
                    match self.peek() {
                        Some(Token::Caret) => {
                            self.idx += 1;
                            acc = Converse(Box::new(acc));
                        }
                        Some(Token::Asterisk) => {
                            self.idx += 1;
                            acc = Star(Box::new(acc));
                        }
                        _ => return Ok(acc),
                    }
                }
            }
        }
    }

    fn parse_atom(&mut self) -> Result<PredicateTerm, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Token::Ident(name)) => Ok(Atom(name)),
            Some(Token::IdentityConst) => Ok(Identity),
            Some(Token::ZeroConst) => Ok(Zero),
            Some(Token::OneConst) => Ok(One),
            Some(Token::DiversityConst) => Ok(Diversity),
            Some(Token::TruthConst) => Ok(Truth),
            Some(Token::LParen) => {
                let inner = self.parse_implies()?;
                self.expect(&Token::RParen)?;
                Ok(inner)
            }
            other => Err(ParseError {
                position: pos,
                message: match other {
                    Some(t) => format!("unexpected token {t:?}"),
                    None => "unexpected end of input".to_string(),
                },
            }),
        }
    }
}

/// Parse a predicate from its concrete syntax.
///
/// Grammar (loosest binding first; binary operators at the same level
/// associate to the left):
///
/// ```text
/// implies := join ('->' join)*
/// join    := dagger (('+' | '|') dagger)*
/// dagger  := meet ('!' meet)*
/// meet    := prod (('&' | '.') prod)*
/// prod    := unary ((';' | 'o') unary)*
/// unary   := ('-' | '~' | 'not') unary | atom ('^' | '*')*
/// atom    := IDENT | "1'" | "0'" | '0' | '1' | 't' | '(' implies ')'
/// ```
///
/// Atom names match `[A-Za-z][A-Za-z0-9_]*` except the reserved words
/// `t`, `o`, and `not`.
pub fn parse_predicate(text: &str) -> Result<PredicateTerm, ParseError> {
    let tokens = Lexer::run(text)?;
    let mut parser = Parser {
        tokens,
        idx: 0,
        end: text.len(),
    };
    let term = parser.parse_implies()?;
    if parser.idx != parser.tokens.len() {
        return Err(ParseError {
            position: parser.pos(),
            message: "trailing input after predicate".to_string(),
        });
    }
    Ok(term)
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

/// Binding strength used by the printer; larger binds tighter.
fn level(p: &PredicateTerm) -> u8 {
    match p {
        Implies(..) => 0,
        Join(..) | Or(..) => 1,
        Dagger(..) => 2,
        Meet(..) | And(..) => 3,
        RelProd(..) | Fusion(..) => 4,
        Complement(..) | Converse(..) | BoolNeg(..) | DeMorganNeg(..) | Star(..) => 5,
        Atom(_) | Identity | Zero | One | Diversity | Truth => 6,
    }
}

fn fmt_term(p: &PredicateTerm, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // Wraps `child` in parentheses when its binding strength is too weak
    // for the hole it appears in.
    fn child(
        p: &PredicateTerm,
        min_level: u8,
        f: &mut fmt::Formatter<'_>,
    ) -> fmt::Result {
        if level(p) < min_level {
            write!(f, "(")?;
            fmt_term(p, f)?;
            write!(f, ")")
        } else {
            fmt_term(p, f)
        }
    }
    let lvl = level(p);
    match p {
        Atom(name) => write!(f, "{name}"),
        Identity => write!(f, "1'"),
        Zero => write!(f, "0"),
        One => write!(f, "1"),
        Diversity => write!(f, "0'"),
        Truth => write!(f, "t"),
        Implies(l, r) => {
            // left-associative: the right operand needs strictly tighter level
            child(l, lvl, f)?;
            write!(f, " -> ")?;
            child(r, lvl + 1, f)
        }
        Join(l, r) => {
            child(l, lvl, f)?;
            write!(f, " + ")?;
            child(r, lvl + 1, f)
        }
        Or(l, r) => {
            child(l, lvl, f)?;
            write!(f, " | ")?;
            child(r, lvl + 1, f)
        }
        Dagger(l, r) => {
            child(l, lvl, f)?;
            write!(f, " ! ")?;
            child(r, lvl + 1, f)
        }
        Meet(l, r) => {
            child(l, lvl, f)?;
            write!(f, " . ")?;
            child(r, lvl + 1, f)
        }
        And(l, r) => {
            child(l, lvl, f)?;
            write!(f, " & ")?;
            child(r, lvl + 1, f)
        }
        RelProd(l, r) => {
            child(l, lvl, f)?;
            write!(f, " ; ")?;
            child(r, lvl + 1, f)
        }
        Fusion(l, r) => {
            child(l, lvl, f)?;
            write!(f, " o ")?;
            child(r, lvl + 1, f)
        }
        Complement(q) => {
            write!(f, "-")?;
            child(q, 5, f)
        }
        BoolNeg(q) => {
            write!(f, "not ")?;
            child(q, 5, f)
        }
        DeMorganNeg(q) => {
            write!(f, "~")?;
            child(q, 5, f)
        }
        Converse(q) => {
            child(q, 6, f)?;
            write!(f, "^")
        }
        Star(q) => {
            child(q, 6, f)?;
            write!(f, "*")
        }
    }
}

impl fmt::Display for PredicateTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, f)
    }
}

/// Render a predicate in the concrete syntax accepted by
/// [`parse_predicate`]; round-trips structurally.
pub fn print_predicate(p: &PredicateTerm) -> String {
    p.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(text: &str) -> PredicateTerm {
        let p = parse_predicate(text).unwrap();
        let printed = print_predicate(&p);
        let again = parse_predicate(&printed).unwrap();
        assert_eq!(p, again, "round trip failed for {text} -> {printed}");
        p
    }

    #[test]
    fn parses_basic_operators() {
        assert_eq!(
            roundtrip("A + B"),
            Join(Box::new(Atom("A".into())), Box::new(Atom("B".into())))
        );
        assert_eq!(
            roundtrip("A -> B"),
            Implies(Box::new(Atom("A".into())), Box::new(Atom("B".into())))
        );
        let t = roundtrip("(A o B) & C");
        assert_eq!(
            t,
            And(
                Box::new(Fusion(Box::new(Atom("A".into())), Box::new(Atom("B".into())))),
                Box::new(Atom("C".into()))
            )
        );
    }

    #[test]
    fn precedence_matches_grammar() {
        // unary > product > meet > dagger > join > implies
        let p = parse_predicate("A ; B & C ! D + E -> F").unwrap();
        assert!(matches!(p, Implies(..)));
        let p = parse_predicate("-A ; B").unwrap();
        assert_eq!(
            p,
            RelProd(
                Box::new(Complement(Box::new(Atom("A".into())))),
                Box::new(Atom("B".into()))
            )
        );
        let p = parse_predicate("A^ ; B*").unwrap();
        assert_eq!(
            p,
            RelProd(
                Box::new(Converse(Box::new(Atom("A".into())))),
                Box::new(Star(Box::new(Atom("B".into()))))
            )
        );
        // left associativity
        let p = parse_predicate("A -> B -> C").unwrap();
        assert_eq!(
            p,
            Implies(
                Box::new(Implies(Box::new(Atom("A".into())), Box::new(Atom("B".into())))),
                Box::new(Atom("C".into()))
            )
        );
    }

    #[test]
    fn parses_constants() {
        assert_eq!(roundtrip("1'"), Identity);
        assert_eq!(roundtrip("0'"), Diversity);
        assert_eq!(roundtrip("0"), Zero);
        assert_eq!(roundtrip("1"), One);
        assert_eq!(roundtrip("t"), Truth);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_predicate("").is_err());
        assert!(parse_predicate("A +").is_err());
        assert!(parse_predicate("(A").is_err());
        assert!(parse_predicate("A ? B").is_err());
        let err = parse_predicate("A @ B").unwrap_err();
        assert_eq!(err.position, 2);
    }

    #[test]
    fn desugar_core_definitions() {
        let a = || Box::new(Atom("A".into()));
        let b = || Box::new(Atom("B".into()));
        assert_eq!(
            desugar(&Implies(a(), b())),
            Complement(Box::new(RelProd(
                Box::new(Converse(a())),
                Box::new(Complement(b()))
            )))
        );
        assert_eq!(desugar(&Fusion(a(), b())), RelProd(b(), a()));
        assert_eq!(desugar(&Truth), Identity);
        assert_eq!(desugar(&Star(a())), Converse(a()));
        assert_eq!(
            desugar(&DeMorganNeg(a())),
            Complement(Box::new(Converse(a())))
        );
    }

    #[test]
    fn desugar_is_idempotent() {
        for text in [
            "A -> (B o C) & ~D",
            "t | A* ! 0'",
            "not (A & B) -> A . B + 1",
        ] {
            let p = parse_predicate(text).unwrap();
            let once = desugar(&p);
            assert_eq!(desugar(&once), once);
        }
    }

    #[test]
    fn vocabulary_classes() {
        let p = parse_predicate("A -> (B o C)").unwrap();
        assert_eq!(vocabulary_class(&p), VocabularyClass::RelevanceOnly);
        let p = parse_predicate("not A").unwrap();
        assert_eq!(vocabulary_class(&p), VocabularyClass::ClassicalRelevant);
        let p = parse_predicate("A*").unwrap();
        assert_eq!(vocabulary_class(&p), VocabularyClass::ClassicalRelevant);
        let p = parse_predicate("A ; B").unwrap();
        assert_eq!(vocabulary_class(&p), VocabularyClass::Core);
        let p = parse_predicate("t & A").unwrap();
        assert_eq!(vocabulary_class(&p), VocabularyClass::RelevanceOnly);
    }

    #[test]
    fn variables_are_collected() {
        let p = parse_predicate("(A -> B) & (C o A) | t").unwrap();
        let vars: Vec<_> = variables_of(&p).into_iter().collect();
        assert_eq!(vars, ["A", "B", "C"]);
        assert_eq!(variables_in_order(&p), ["A", "B", "C"]);
        let p = parse_predicate("B ; A ; B").unwrap();
        assert_eq!(variables_in_order(&p), ["B", "A"]);
        assert!(variables_of(&Truth).is_empty());
    }
}
