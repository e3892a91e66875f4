//! First-order formulas over binary relation symbols, the translation
//! mappings between the formula and predicate languages, and a direct
//! finite-model evaluator used as a semantic oracle.
//!
//! Formulas are built from atomic formulas `vI A vJ` (the pair of the
//! values of `vI` and `vJ` stands in the relation denoted by the
//! predicate `A`) and equations `A == B`, with implication, negation,
//! and universal quantification as the core connectives (disjunction,
//! conjunction, equivalence, and existential quantification derived).
//!
//! Three translations are provided:
//!
//! * `G` rewrites predicate structure into quantifier structure, so the
//!   result contains only atomic predicates;
//! * `J` normalizes a three-variable formula into a conjunction of
//!   clauses `0 R_i v2 ∨ v2 S_i v1 ∨ 0 T_i v1`;
//! * `H` turns a three-variable sentence into a single equation via `J`.
//!
//! The evaluator ([`denote`], [`satisfies`]) interprets predicates and
//! formulas directly over small finite structures and is used to verify
//! the translations on concrete models.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{desugar, parse_predicate, PredicateTerm};

/// Errors from formula/structure parsing and evaluation.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("formula syntax error at offset {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("structure file error at line {line}: {message}")]
    StructureParse { line: usize, message: String },
    #[error("atom {0:?} has no interpretation in the structure")]
    UninterpretedAtom(String),
    #[error("variable v{0} is not assigned")]
    UnassignedVariable(usize),
    #[error("variable index v{0} out of range for a three-variable translation")]
    VariableOutOfRange(usize),
    #[error("H is defined on sentences only; v{0} occurs free")]
    FreeVariable(usize),
    #[error("structure base size {0} exceeds the cap of {MAX_BASE}")]
    BaseTooLarge(usize),
}

/// First-order formulas with indexed variables `v0, v1, …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    /// `vI A vJ`
    AtomFml(usize, PredicateTerm, usize),
    /// `A == B`
    Equation(PredicateTerm, PredicateTerm),
    Implies(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    ForAll(usize, Box<Formula>),
    // derived connectives
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(usize, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }
    pub fn forall(v: usize, f: Formula) -> Formula {
        Formula::ForAll(v, Box::new(f))
    }
    pub fn exists(v: usize, f: Formula) -> Formula {
        Formula::Exists(v, Box::new(f))
    }

    /// Rewrite the derived connectives into the core
    /// implication/negation/universal fragment.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::AtomFml(x, p, y) => Formula::AtomFml(*x, p.clone(), *y),
            Formula::Equation(a, b) => Formula::Equation(a.clone(), b.clone()),
            Formula::Implies(a, b) => Formula::implies(a.desugar(), b.desugar()),
            Formula::Not(a) => Formula::not(a.desugar()),
            Formula::ForAll(v, a) => Formula::forall(*v, a.desugar()),
            Formula::Or(a, b) => Formula::implies(Formula::not(a.desugar()), b.desugar()),
            Formula::And(a, b) => {
                Formula::not(Formula::implies(a.desugar(), Formula::not(b.desugar())))
            }
            Formula::Iff(a, b) => {
                let (da, db) = (a.desugar(), b.desugar());
                // (a ⇒ b) ∧ (b ⇒ a), expressed in the core fragment
                Formula::not(Formula::implies(
                    Formula::implies(da.clone(), db.clone()),
                    Formula::not(Formula::implies(db, da)),
                ))
            }
            Formula::Exists(v, a) => {
                Formula::not(Formula::forall(*v, Formula::not(a.desugar())))
            }
        }
    }

    /// Free variable indices, ascending.
    pub fn free_vars(&self) -> Vec<usize> {
        fn go(f: &Formula, bound: &mut Vec<usize>, out: &mut std::collections::BTreeSet<usize>) {
            match f {
                Formula::AtomFml(x, _, y) => {
                    if !bound.contains(x) {
                        out.insert(*x);
                    }
                    if !bound.contains(y) {
                        out.insert(*y);
                    }
                }
                Formula::Equation(_, _) => {}
                Formula::Implies(a, b)
                | Formula::Or(a, b)
                | Formula::And(a, b)
                | Formula::Iff(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Not(a) => go(a, bound, out),
                Formula::ForAll(v, a) | Formula::Exists(v, a) => {
                    bound.push(*v);
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = std::collections::BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out.into_iter().collect()
    }

    /// Highest variable index occurring at all (free or bound), if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Formula::AtomFml(x, _, y) => Some(*x.max(y)),
            Formula::Equation(_, _) => None,
            Formula::Implies(a, b) | Formula::Or(a, b) | Formula::And(a, b) | Formula::Iff(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Formula::Not(a) => a.max_var(),
            Formula::ForAll(v, a) | Formula::Exists(v, a) => {
                Some(a.max_var().map_or(*v, |m| m.max(*v)))
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        // precedence: <=> (0) < => (1) < || (2) < && (3) < prefix (4)
        fn go(f: &Formula, level: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
            let paren = |need: u8, out: &mut fmt::Formatter<'_>,
                         body: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
                if level > need {
                    write!(out, "(")?;
                    body(out)?;
                    write!(out, ")")
                } else {
                    body(out)
                }
            };
            match f {
                Formula::AtomFml(x, p, y) => write!(out, "v{x} {p} v{y}"),
                Formula::Equation(a, b) => paren(1, out, &|o| write!(o, "{a} == {b}")),
                Formula::Iff(a, b) => paren(0, out, &|o| {
                    go(a, 1, o)?;
                    write!(o, " <=> ")?;
                    go(b, 1, o)
                }),
                Formula::Implies(a, b) => paren(1, out, &|o| {
                    go(a, 2, o)?;
                    write!(o, " => ")?;
                    go(b, 1, o)
                }),
                Formula::Or(a, b) => paren(2, out, &|o| {
                    go(a, 2, o)?;
                    write!(o, " || ")?;
                    go(b, 3, o)
                }),
                Formula::And(a, b) => paren(3, out, &|o| {
                    go(a, 3, o)?;
                    write!(o, " && ")?;
                    go(b, 4, o)
                }),
                Formula::Not(a) => {
                    write!(out, "!")?;
                    go(a, 4, out)
                }
                Formula::ForAll(v, a) => {
                    write!(out, "forall v{v} (")?;
                    go(a, 0, out)?;
                    write!(out, ")")
                }
                Formula::Exists(v, a) => {
                    write!(out, "exists v{v} (")?;
                    go(a, 0, out)?;
                    write!(out, ")")
                }
            }
        }
        go(self, 0, out)
    }
}

// ---------------------------------------------------------------------------
// Formula parser
// ---------------------------------------------------------------------------

struct FmlParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> FmlParser<'a> {
    fn err<T>(&self, message: &str) -> Result<T, TranslateError> {
        Err(TranslateError::Parse {
            position: self.pos,
            message: message.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        let mut end = start;
        while end < self.src.len()
            && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
        {
            end += 1;
        }
        if end == start {
            None
        } else {
            Some(std::str::from_utf8(&self.src[start..end]).unwrap())
        }
    }

    fn var_index(&mut self) -> Result<usize, TranslateError> {
        self.skip_ws();
        let save = self.pos;
        match self.word() {
            Some(w) if w.len() >= 2 && w.starts_with('v') && w[1..].chars().all(|c| c.is_ascii_digit()) => {
                self.pos = save + w.len();
                Ok(w[1..].parse().unwrap())
            }
            _ => {
                self.pos = save;
                self.err("expected a variable v0, v1, …")
            }
        }
    }

    fn iff(&mut self) -> Result<Formula, TranslateError> {
        let mut left = self.implication()?;
        loop {
            self.skip_ws();
            if self.src[self.pos..].starts_with(b"<=>") {
                self.pos += 3;
                let right = self.implication()?;
                left = Formula::iff(left, right);
            } else {
                return Ok(left);
            }
        }
    }

    fn implication(&mut self) -> Result<Formula, TranslateError> {
        let left = self.disjunction()?;
        self.skip_ws();
        if self.src[self.pos..].starts_with(b"=>") {
            self.pos += 2;
            let right = self.implication()?;
            Ok(Formula::implies(left, right))
        } else {
            Ok(left)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, TranslateError> {
        let mut left = self.conjunction()?;
        while {
            self.skip_ws();
            self.src[self.pos..].starts_with(b"||")
        } {
            self.pos += 2;
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, TranslateError> {
        let mut left = self.primary()?;
        while {
            self.skip_ws();
            self.src[self.pos..].starts_with(b"&&")
        } {
            self.pos += 2;
            let right = self.primary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn quantifier(&mut self, existential: bool) -> Result<Formula, TranslateError> {
        let v = self.var_index()?;
        if !self.eat("(") {
            return self.err("expected ( after quantifier variable");
        }
        let body = self.iff()?;
        if !self.eat(")") {
            return self.err("expected ) closing quantifier body");
        }
        Ok(if existential {
            Formula::exists(v, body)
        } else {
            Formula::forall(v, body)
        })
    }

    fn primary(&mut self) -> Result<Formula, TranslateError> {
        self.skip_ws();
        let save = self.pos;
        if let Some(w) = self.word() {
            if w == "forall" {
                self.pos = save + w.len();
                return self.quantifier(false);
            }
            if w == "exists" {
                self.pos = save + w.len();
                return self.quantifier(true);
            }
        }
        self.pos = save;
        if self.peek() == Some(b'!') {
            self.pos += 1;
            let inner = self.primary()?;
            return Ok(Formula::not(inner));
        }
        if self.peek() == Some(b'(') {
            // could be a parenthesized formula or a parenthesized
            // predicate inside an atomic chunk; try the formula reading
            let open = self.pos;
            self.pos += 1;
            if let Ok(inner) = self.iff() {
                if self.eat(")") {
                    // accept only if what follows cannot continue a
                    // predicate chunk
                    let after = self.pos;
                    self.skip_ws();
                    let rest = &self.src[self.pos..];
                    let formula_boundary = rest.is_empty()
                        || rest.starts_with(b"&&")
                        || rest.starts_with(b"||")
                        || rest.starts_with(b"=>")
                        || rest.starts_with(b"<=>")
                        || rest.starts_with(b")");
                    if formula_boundary {
                        self.pos = after;
                        return Ok(inner);
                    }
                }
            }
            self.pos = open;
        }
        self.chunk()
    }

    /// Parse an atomic formula `vI <pred> vJ` or an equation `A == B`
    /// by scanning up to the next formula-level operator at paren
    /// depth zero.
    fn chunk(&mut self) -> Result<Formula, TranslateError> {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0i32;
        let mut end = self.pos;
        while end < self.src.len() {
            let rest = &self.src[end..];
            if depth == 0
                && (rest.starts_with(b"&&")
                    || rest.starts_with(b"||")
                    || rest.starts_with(b"=>")
                    || rest.starts_with(b"<=>"))
            {
                break;
            }
            match self.src[end] {
                b'(' => depth += 1,
                b')' => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                }
                _ => {}
            }
            end += 1;
        }
        let text = std::str::from_utf8(&self.src[start..end]).unwrap().trim();
        if text.is_empty() {
            return self.err("expected a formula");
        }
        self.pos = end;
        // equation?
        if let Some(split) = find_depth0(text, "==") {
            let lhs = text[..split].trim();
            let rhs = text[split + 2..].trim();
            let a = parse_predicate(lhs).map_err(|e| TranslateError::Parse {
                position: start,
                message: format!("bad left-hand predicate: {e}"),
            })?;
            let b = parse_predicate(rhs).map_err(|e| TranslateError::Parse {
                position: start,
                message: format!("bad right-hand predicate: {e}"),
            })?;
            return Ok(Formula::Equation(a, b));
        }
        // atomic formula: vI <pred> vJ
        let (i, after_i) = lead_var(text).ok_or_else(|| TranslateError::Parse {
            position: start,
            message: "atomic formula must start with a variable".to_string(),
        })?;
        let (j, before_j) = trail_var(text).ok_or_else(|| TranslateError::Parse {
            position: start,
            message: "atomic formula must end with a variable".to_string(),
        })?;
        if after_i > before_j {
            return Err(TranslateError::Parse {
                position: start,
                message: "atomic formula needs a predicate between its variables".to_string(),
            });
        }
        let body = text[after_i..before_j].trim();
        let p = parse_predicate(body).map_err(|e| TranslateError::Parse {
            position: start,
            message: format!("bad predicate: {e}"),
        })?;
        Ok(Formula::AtomFml(i, p, j))
    }
}

fn find_depth0(text: &str, needle: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut depth = 0i32;
    for i in 0..bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => depth -= 1,
            _ => {}
        }
        if depth == 0 && text[i..].starts_with(needle) {
            return Some(i);
        }
    }
    None
}

fn lead_var(text: &str) -> Option<(usize, usize)> {
    let bytes = text.as_bytes();
    if bytes.first() != Some(&b'v') {
        return None;
    }
    let mut end = 1;
    while end < bytes.len() && bytes[end].is_ascii_digit() {
        end += 1;
    }
    if end == 1 {
        return None;
    }
    // must be a standalone token
    if end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
        return None;
    }
    Some((text[1..end].parse().unwrap(), end))
}

fn trail_var(text: &str) -> Option<(usize, usize)> {
    let bytes = text.as_bytes();
    let mut start = bytes.len();
    while start > 0 && bytes[start - 1].is_ascii_digit() {
        start -= 1;
    }
    if start == bytes.len() || start == 0 || bytes[start - 1] != b'v' {
        return None;
    }
    // must be a standalone token
    if start >= 2 && (bytes[start - 2].is_ascii_alphanumeric() || bytes[start - 2] == b'_') {
        return None;
    }
    Some((text[start..].parse().unwrap(), start - 1))
}

/// Parse a formula in the grammar
/// `v0 A v1`, `A == B`, `forall vI (…)`, `exists vI (…)`,
/// `!φ`, `φ && ψ`, `φ || ψ`, `φ => ψ`, `φ <=> ψ`.
pub fn parse_formula(src: &str) -> Result<Formula, TranslateError> {
    let mut p = FmlParser {
        src: src.as_bytes(),
        pos: 0,
    };
    let f = p.iff()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("unexpected trailing input");
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// Closure and the translation mappings
// ---------------------------------------------------------------------------

/// Universally quantify the free variables of `φ`, the highest-indexed
/// free variable innermost.
pub fn closure(phi: &Formula) -> Formula {
    let mut out = phi.clone();
    for v in phi.free_vars().into_iter().rev() {
        out = Formula::forall(v, out);
    }
    out
}

/// The translation `G`: eliminate predicate structure in favor of
/// quantifiers, leaving only atomic predicates in atomic formulas.
/// Derived predicate operators are desugared first; the existential
/// variable for a relative product is the first index distinct from the
/// two endpoints.
pub fn translate_G(phi: &Formula) -> Formula {
    fn atom(x: usize, p: &PredicateTerm, y: usize) -> Formula {
        use PredicateTerm::*;
        match p {
            Atom(_) | Identity => Formula::AtomFml(x, p.clone(), y),
            Join(a, b) => Formula::or(atom(x, a, y), atom(x, b, y)),
            Complement(a) => Formula::not(atom(x, a, y)),
            RelProd(a, b) => {
                let z = (0..).find(|v| *v != x && *v != y).unwrap();
                Formula::exists(z, Formula::and(atom(x, a, z), atom(z, b, y)))
            }
            Converse(a) => atom(y, a, x),
            other => unreachable!("desugar left a derived operator: {other:?}"),
        }
    }
    match phi {
        Formula::AtomFml(x, p, y) => atom(*x, &desugar(p), *y),
        Formula::Equation(a, b) => {
            let left = atom(0, &desugar(a), 1);
            let right = atom(0, &desugar(b), 1);
            closure(&Formula::iff(left, right))
        }
        Formula::Implies(a, b) => Formula::implies(translate_G(a), translate_G(b)),
        Formula::Not(a) => Formula::not(translate_G(a)),
        Formula::ForAll(v, a) => Formula::forall(*v, translate_G(a)),
        Formula::Or(a, b) => Formula::or(translate_G(a), translate_G(b)),
        Formula::And(a, b) => Formula::and(translate_G(a), translate_G(b)),
        Formula::Iff(a, b) => Formula::iff(translate_G(a), translate_G(b)),
        Formula::Exists(v, a) => Formula::exists(*v, translate_G(a)),
    }
}

/// Conjunction of clauses `0 R_i v2 ∨ v2 S_i v1 ∨ 0 T_i v1`, kept as the
/// list of `(R_i, S_i, T_i)` triples.
pub type ClauseForm = Vec<(PredicateTerm, PredicateTerm, PredicateTerm)>;

/// The formula reading of a clause form, with variables `v0, v2, v1`
/// exactly as displayed.
pub fn clause_form_formula(cf: &ClauseForm) -> Formula {
    let clause = |(r, s, t): &(PredicateTerm, PredicateTerm, PredicateTerm)| {
        Formula::or(
            Formula::or(
                Formula::AtomFml(0, r.clone(), 2),
                Formula::AtomFml(2, s.clone(), 1),
            ),
            Formula::AtomFml(0, t.clone(), 1),
        )
    };
    let mut it = cf.iter();
    let first = clause(it.next().expect("clause forms are nonempty"));
    it.fold(first, |acc, c| Formula::and(acc, clause(c)))
}

fn meet(a: PredicateTerm, b: PredicateTerm) -> PredicateTerm {
    PredicateTerm::Meet(Box::new(a), Box::new(b))
}
fn join(a: PredicateTerm, b: PredicateTerm) -> PredicateTerm {
    PredicateTerm::Join(Box::new(a), Box::new(b))
}
fn comp(a: PredicateTerm) -> PredicateTerm {
    PredicateTerm::Complement(Box::new(a))
}
fn relprod(a: PredicateTerm, b: PredicateTerm) -> PredicateTerm {
    PredicateTerm::RelProd(Box::new(a), Box::new(b))
}
fn conv(a: PredicateTerm) -> PredicateTerm {
    PredicateTerm::Converse(Box::new(a))
}
fn dagger(a: PredicateTerm, b: PredicateTerm) -> PredicateTerm {
    PredicateTerm::Dagger(Box::new(a), Box::new(b))
}

/// Sum of a list of predicates; the empty sum is the zero predicate.
fn sum(terms: Vec<PredicateTerm>) -> PredicateTerm {
    let mut it = terms.into_iter();
    match it.next() {
        None => PredicateTerm::Zero,
        Some(first) => it.fold(first, join),
    }
}

/// The translation `J`: normalize a three-variable formula into clause
/// form.  Derived formula connectives are desugared first.
pub fn translate_J(phi: &Formula) -> Result<ClauseForm, TranslateError> {
    if let Some(m) = phi.max_var() {
        if m > 2 {
            return Err(TranslateError::VariableOutOfRange(m));
        }
    }
    Ok(j_core(&phi.desugar()))
}

fn j_core(phi: &Formula) -> ClauseForm {
    use PredicateTerm::{Identity, One, Zero};
    match phi {
        Formula::AtomFml(x, a, y) => {
            let a = a.clone();
            let one_case = |t: PredicateTerm| vec![(Zero, Zero, t)];
            match (x, y) {
                (0, 1) => one_case(a),
                (1, 0) => one_case(conv(a)),
                (1, 2) => vec![(Zero, conv(a), Zero)],
                (2, 1) => vec![(Zero, a, Zero)],
                (0, 2) => vec![(a, Zero, Zero)],
                (2, 0) => vec![(conv(a), Zero, Zero)],
                (0, 0) => one_case(relprod(meet(a, Identity), One)),
                (1, 1) => one_case(relprod(One, meet(a, Identity))),
                (2, 2) => vec![(relprod(One, meet(a, Identity)), Zero, Zero)],
                _ => unreachable!("indices checked before translation"),
            }
        }
        Formula::Equation(a, b) => {
            let body = join(
                meet(a.clone(), b.clone()),
                meet(comp(a.clone()), comp(b.clone())),
            );
            vec![(Zero, Zero, dagger(dagger(Zero, body), Zero))]
        }
        Formula::Not(inner) => {
            let cf = j_core(inner);
            let k = cf.len();
            let mut out = ClauseForm::new();
            let mut f = vec![0usize; k];
            loop {
                let r = sum(
                    (0..k)
                        .filter(|&i| f[i] == 0)
                        .map(|i| comp(cf[i].0.clone()))
                        .collect(),
                );
                let s = sum(
                    (0..k)
                        .filter(|&i| f[i] == 1)
                        .map(|i| comp(cf[i].1.clone()))
                        .collect(),
                );
                let t = sum(
                    (0..k)
                        .filter(|&i| f[i] == 2)
                        .map(|i| comp(cf[i].2.clone()))
                        .collect(),
                );
                out.push((r, s, t));
                if !advance3(&mut f) {
                    break;
                }
            }
            out
        }
        Formula::Implies(lhs, rhs) => {
            let cf = j_core(lhs);
            let cf2 = j_core(rhs);
            let k = cf.len();
            let mut out = ClauseForm::new();
            let mut f = vec![0usize; k];
            loop {
                for (r2, s2, t2) in &cf2 {
                    let r = join(
                        sum(
                            (0..k)
                                .filter(|&i| f[i] == 0)
                                .map(|i| comp(cf[i].0.clone()))
                                .collect(),
                        ),
                        r2.clone(),
                    );
                    let s = join(
                        sum(
                            (0..k)
                                .filter(|&i| f[i] == 1)
                                .map(|i| comp(cf[i].1.clone()))
                                .collect(),
                        ),
                        s2.clone(),
                    );
                    let t = join(
                        sum(
                            (0..k)
                                .filter(|&i| f[i] == 2)
                                .map(|i| comp(cf[i].2.clone()))
                                .collect(),
                        ),
                        t2.clone(),
                    );
                    out.push((r, s, t));
                }
                if !advance3(&mut f) {
                    break;
                }
            }
            out
        }
        Formula::ForAll(v, inner) => {
            let cf = j_core(inner);
            cf.into_iter()
                .map(|(r, s, t)| match v {
                    0 => (Zero, join(dagger(conv(r), t), s), Zero),
                    1 => (join(dagger(t, conv(s)), r), Zero, Zero),
                    2 => (Zero, Zero, join(dagger(r, s), t)),
                    _ => unreachable!("indices checked before translation"),
                })
                .collect()
        }
        other => unreachable!("desugared formulas are core-only: {other:?}"),
    }
}

/// Ternary odometer over the choice functions `f ∈ 3^k`.
fn advance3(f: &mut [usize]) -> bool {
    for d in f.iter_mut() {
        *d += 1;
        if *d < 3 {
            return true;
        }
        *d = 0;
    }
    false
}

/// The translation `H` on three-variable sentences: apply `J` to
/// `∀v2 φ` and conjoin the resulting clause predicates into one
/// equation `1 == ((R_0†S_0)+T_0)·…·((R_{k−1}†S_{k−1})+T_{k−1})`.
#[allow(non_snake_case)]
pub fn translate_H(phi: &Formula) -> Result<Formula, TranslateError> {
    if let Some(&v) = phi.free_vars().first() {
        return Err(TranslateError::FreeVariable(v));
    }
    let cf = translate_J(&Formula::forall(2, phi.clone()))?;
    let factors: Vec<PredicateTerm> = cf.into_iter().map(|(_, _, t)| t).collect();
    let mut it = factors.into_iter();
    let first = it.next().expect("clause forms are nonempty");
    let product = it.fold(first, meet);
    Ok(Formula::Equation(PredicateTerm::One, product))
}

// ---------------------------------------------------------------------------
// Finite structures, denotation, and satisfaction
// ---------------------------------------------------------------------------

/// Cap on structure base size (the oracle is for finite spot checks).
pub const MAX_BASE: usize = 6;

/// A binary relation over a base of size `m`, as a bit mask with bit
/// `i·m + j` set when `(i, j)` is in the relation.
pub type Rel = u64;

/// A finite relational structure: base `{0,…,m−1}` and an
/// interpretation of atom names as binary relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    pub base: usize,
    pub interp: BTreeMap<String, Rel>,
}

impl Structure {
    pub fn new(base: usize) -> Result<Structure, TranslateError> {
        if base > MAX_BASE {
            return Err(TranslateError::BaseTooLarge(base));
        }
        Ok(Structure {
            base,
            interp: BTreeMap::new(),
        })
    }

    pub fn full(&self) -> Rel {
        if self.base == 0 {
            0
        } else {
            (1u64 << (self.base * self.base)) - 1
        }
    }

    pub fn diagonal(&self) -> Rel {
        (0..self.base).fold(0, |acc, i| acc | 1 << (i * self.base + i))
    }

    pub fn contains(&self, rel: Rel, i: usize, j: usize) -> bool {
        rel >> (i * self.base + j) & 1 == 1
    }

    /// Parse the structure file format:
    ///
    /// ```text
    /// base <m>
    /// rel <Atom>: (i,j) (k,l) …
    /// ```
    pub fn from_file_string(text: &str) -> Result<Structure, TranslateError> {
        let mut base: Option<usize> = None;
        let mut interp = BTreeMap::new();
        let err = |line: usize, message: &str| TranslateError::StructureParse {
            line,
            message: message.to_string(),
        };
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("base ") {
                let m: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| err(lineno, "bad base size"))?;
                if m > MAX_BASE {
                    return Err(TranslateError::BaseTooLarge(m));
                }
                base = Some(m);
            } else if let Some(rest) = line.strip_prefix("rel ") {
                let m = base.ok_or_else(|| err(lineno, "base must come before rel"))?;
                let (name, pairs) = rest
                    .split_once(':')
                    .ok_or_else(|| err(lineno, "rel needs `name: pairs`"))?;
                let mut bits: Rel = 0;
                for tok in pairs.split_whitespace() {
                    let inner = tok
                        .strip_prefix('(')
                        .and_then(|t| t.strip_suffix(')'))
                        .ok_or_else(|| err(lineno, "pairs look like (i,j)"))?;
                    let (i, j) = inner
                        .split_once(',')
                        .ok_or_else(|| err(lineno, "pairs look like (i,j)"))?;
                    let i: usize = i.trim().parse().map_err(|_| err(lineno, "bad pair"))?;
                    let j: usize = j.trim().parse().map_err(|_| err(lineno, "bad pair"))?;
                    if i >= m || j >= m {
                        return Err(err(lineno, "pair element out of range"));
                    }
                    bits |= 1 << (i * m + j);
                }
                interp.insert(name.trim().to_string(), bits);
            } else {
                return Err(err(lineno, "unknown directive"));
            }
        }
        let base = base.ok_or_else(|| err(0, "missing base directive"))?;
        Ok(Structure { base, interp })
    }

    pub fn to_file_string(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        writeln!(out, "base {}", self.base).unwrap();
        for (name, &rel) in &self.interp {
            let mut pairs = Vec::new();
            for i in 0..self.base {
                for j in 0..self.base {
                    if self.contains(rel, i, j) {
                        pairs.push(format!("({i},{j})"));
                    }
                }
            }
            writeln!(out, "rel {}: {}", name, pairs.join(" ")).unwrap();
        }
        out
    }
}

/// The binary relation denoted by a predicate in a structure:
/// atoms via the interpretation, identity as the diagonal, and the
/// operations as union, complement, relational composition, and
/// converse (derived operators via desugaring).
pub fn denote(s: &Structure, p: &PredicateTerm) -> Result<Rel, TranslateError> {
    fn core(s: &Structure, p: &PredicateTerm) -> Result<Rel, TranslateError> {
        use PredicateTerm::*;
        Ok(match p {
            Atom(name) => *s
                .interp
                .get(name)
                .ok_or_else(|| TranslateError::UninterpretedAtom(name.clone()))?,
            Identity => s.diagonal(),
            Join(a, b) => core(s, a)? | core(s, b)?,
            Complement(a) => !core(s, a)? & s.full(),
            Converse(a) => {
                let r = core(s, a)?;
                let mut out = 0;
                for i in 0..s.base {
                    for j in 0..s.base {
                        if s.contains(r, i, j) {
                            out |= 1 << (j * s.base + i);
                        }
                    }
                }
                out
            }
            RelProd(a, b) => {
                let (ra, rb) = (core(s, a)?, core(s, b)?);
                let mut out = 0;
                for i in 0..s.base {
                    for k in 0..s.base {
                        if !s.contains(ra, i, k) {
                            continue;
                        }
                        for j in 0..s.base {
                            if s.contains(rb, k, j) {
                                out |= 1 << (i * s.base + j);
                            }
                        }
                    }
                }
                out
            }
            other => unreachable!("desugar left a derived operator: {other:?}"),
        })
    }
    core(s, &desugar(p))
}

/// Variable assignments into the base of a structure.
pub type VarAssignment = BTreeMap<usize, usize>;

/// The satisfaction relation: whether the structure satisfies the
/// formula under the assignment.  Equations hold exactly when both
/// sides denote the same relation, independently of the assignment.
pub fn satisfies(s: &Structure, phi: &Formula, va: &VarAssignment) -> Result<bool, TranslateError> {
    fn go(s: &Structure, phi: &Formula, va: &mut VarAssignment) -> Result<bool, TranslateError> {
        Ok(match phi {
            Formula::AtomFml(x, p, y) => {
                let i = *va
                    .get(x)
                    .ok_or(TranslateError::UnassignedVariable(*x))?;
                let j = *va
                    .get(y)
                    .ok_or(TranslateError::UnassignedVariable(*y))?;
                let r = denote(s, p)?;
                s.contains(r, i, j)
            }
            Formula::Equation(a, b) => denote(s, a)? == denote(s, b)?,
            Formula::Implies(a, b) => !go(s, a, va)? || go(s, b, va)?,
            Formula::Not(a) => !go(s, a, va)?,
            Formula::Or(a, b) => go(s, a, va)? || go(s, b, va)?,
            Formula::And(a, b) => go(s, a, va)? && go(s, b, va)?,
            Formula::Iff(a, b) => go(s, a, va)? == go(s, b, va)?,
            Formula::ForAll(v, a) => {
                let saved = va.get(v).copied();
                let mut all = true;
                for u in 0..s.base {
                    va.insert(*v, u);
                    if !go(s, a, va)? {
                        all = false;
                        break;
                    }
                }
                restore(va, *v, saved);
                all
            }
            Formula::Exists(v, a) => {
                let saved = va.get(v).copied();
                let mut any = false;
                for u in 0..s.base {
                    va.insert(*v, u);
                    if go(s, a, va)? {
                        any = true;
                        break;
                    }
                }
                restore(va, *v, saved);
                any
            }
        })
    }
    fn restore(va: &mut VarAssignment, v: usize, saved: Option<usize>) {
        match saved {
            Some(u) => {
                va.insert(v, u);
            }
            None => {
                va.remove(&v);
            }
        }
    }
    let mut va = va.clone();
    go(s, phi, &mut va)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn structure(m: usize, rels: &[(&str, &[(usize, usize)])]) -> Structure {
        let mut s = Structure::new(m).unwrap();
        for &(name, pairs) in rels {
            let mut bits: Rel = 0;
            for &(i, j) in pairs {
                bits |= 1 << (i * m + j);
            }
            s.interp.insert(name.to_string(), bits);
        }
        s
    }

    /// all assignments of v0..v_{k-1} into the base
    fn assignments(m: usize, k: usize) -> Vec<VarAssignment> {
        let mut out = vec![VarAssignment::new()];
        for v in 0..k {
            let mut next = Vec::new();
            for a in &out {
                for u in 0..m {
                    let mut b = a.clone();
                    b.insert(v, u);
                    next.push(b);
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn parses_and_prints_formulas() {
        for src in [
            "v0 A v1",
            "A + B == C",
            "forall v0 (exists v1 (v0 A;B v1))",
            "v0 A v1 && v1 B v0 => !(v0 (A . B) v1)",
            "(v0 A v1 || v1 A v0) <=> v0 A+A^ v1",
        ] {
            let f = parse_formula(src).unwrap();
            let printed = f.to_string();
            assert_eq!(parse_formula(&printed).unwrap(), f, "{src} -> {printed}");
        }
        assert!(parse_formula("v0 A").is_err());
        assert!(parse_formula("forall x (v0 A v1)").is_err());
    }

    #[test]
    fn closure_examples() {
        let f = parse_formula("v0 A v1").unwrap();
        assert_eq!(closure(&f).to_string(), "forall v0 (forall v1 (v0 A v1))");
        let sentence = parse_formula("forall v0 (forall v1 (v0 A v1))").unwrap();
        assert_eq!(closure(&sentence), sentence);
        let one = parse_formula("v0 A v0").unwrap();
        assert_eq!(closure(&one).to_string(), "forall v0 (v0 A v0)");
    }

    #[test]
    fn g_on_operator_examples() {
        let f = parse_formula("v0 A + B v1").unwrap();
        assert_eq!(translate_G(&f).to_string(), "v0 A v1 || v0 B v1");
        let f = parse_formula("v0 A ; B v1").unwrap();
        assert_eq!(
            translate_G(&f).to_string(),
            "exists v2 (v0 A v2 && v2 B v1)"
        );
        let f = parse_formula("v0 A^ v1").unwrap();
        assert_eq!(translate_G(&f).to_string(), "v1 A v0");
    }

    #[test]
    fn g_preserves_satisfaction() {
        let s = structure(3, &[("A", &[(0, 1), (2, 2)]), ("B", &[(1, 2), (0, 0)])]);
        let formulas = [
            "v0 A;B v1",
            "v0 -(A + B) v1",
            "v0 (A;B)^ v1",
            "A ; B == B ; A",
            "forall v0 (v0 A + -A v1)",
            "v0 A -> B v2",
        ];
        for src in formulas {
            let f = parse_formula(src).unwrap();
            let g = translate_G(&f);
            for va in assignments(3, 3) {
                assert_eq!(
                    satisfies(&s, &f, &va).unwrap(),
                    satisfies(&s, &g, &va).unwrap(),
                    "{src} under {va:?}"
                );
            }
        }
    }

    #[test]
    fn j_atomic_shape() {
        let f = parse_formula("v0 A v1").unwrap();
        let cf = translate_J(&f).unwrap();
        assert_eq!(
            cf,
            vec![(
                PredicateTerm::Zero,
                PredicateTerm::Zero,
                PredicateTerm::atom("A")
            )]
        );
        let f = parse_formula("!(v0 A v1)").unwrap();
        assert_eq!(translate_J(&f).unwrap().len(), 3);
    }

    #[test]
    fn j_preserves_satisfaction() {
        let s = structure(3, &[("A", &[(0, 1), (1, 2)]), ("B", &[(2, 0), (1, 1)])]);
        let formulas = [
            "v0 A v1",
            "v1 A v2",
            "v2 A v2",
            "A == B",
            "!(v0 A v1)",
            "v0 A v1 => v2 B v0",
            "forall v2 (v0 A v2)",
            "forall v0 (v0 A v1 => v1 B v2)",
        ];
        for src in formulas {
            let f = parse_formula(src).unwrap();
            let j = clause_form_formula(&translate_J(&f).unwrap());
            for va in assignments(3, 3) {
                assert_eq!(
                    satisfies(&s, &f, &va).unwrap(),
                    satisfies(&s, &j, &va).unwrap(),
                    "{src} under {va:?}"
                );
            }
        }
    }

    #[test]
    fn j_rejects_high_variables() {
        let f = parse_formula("v0 A v3").unwrap();
        assert_eq!(
            translate_J(&f),
            Err(TranslateError::VariableOutOfRange(3))
        );
    }

    #[test]
    fn h_preserves_satisfaction_on_sentences() {
        let structures = [
            structure(1, &[("A", &[(0, 0)]), ("B", &[])]),
            structure(2, &[("A", &[(0, 1)]), ("B", &[(1, 0), (1, 1)])]),
            structure(3, &[("A", &[(0, 1), (2, 1)]), ("B", &[(1, 1)])]),
        ];
        let sentences = [
            "forall v0 (forall v1 (v0 A + -A v1))",
            "forall v0 (exists v1 (v0 A v1))",
            "A == B",
            "forall v0 (forall v1 (v0 A v1 => v1 A^ v0))",
        ];
        for src in sentences {
            let f = parse_formula(src).unwrap();
            let h = translate_H(&f).unwrap();
            for s in &structures {
                assert_eq!(
                    satisfies(s, &f, &VarAssignment::new()).unwrap(),
                    satisfies(s, &h, &VarAssignment::new()).unwrap(),
                    "{src} on base {}",
                    s.base
                );
            }
        }
        let open = parse_formula("v0 A v1").unwrap();
        assert_eq!(translate_H(&open), Err(TranslateError::FreeVariable(0)));
    }

    #[test]
    fn denote_examples() {
        let s = structure(3, &[("A", &[(0, 1), (1, 2)])]);
        assert_eq!(
            denote(&s, &PredicateTerm::Identity).unwrap(),
            s.diagonal()
        );
        let conv_a = parse_predicate("A^").unwrap();
        let expected = {
            let mut bits: Rel = 0;
            for (i, j) in [(1usize, 0usize), (2, 1)] {
                bits |= 1 << (i * 3 + j);
            }
            bits
        };
        assert_eq!(denote(&s, &conv_a).unwrap(), expected);
        let lem = parse_predicate("A + -A").unwrap();
        assert_eq!(denote(&s, &lem).unwrap(), s.full());
        assert_eq!(
            denote(&s, &PredicateTerm::atom("C")),
            Err(TranslateError::UninterpretedAtom("C".to_string()))
        );
    }

    #[test]
    fn structure_file_round_trip() {
        let s = structure(3, &[("A", &[(0, 1), (2, 2)]), ("B", &[])]);
        let text = s.to_file_string();
        assert_eq!(Structure::from_file_string(&text).unwrap(), s);
        assert!(Structure::from_file_string("rel A: (0,0)").is_err());
        assert!(Structure::from_file_string("base 2\nrel A: (0,5)").is_err());
    }

    #[test]
    fn denotation_matches_pair_frame_eval() {
        use crate::frames::make_pair_frame;
        use crate::validity;
        let m = 3;
        let s = structure(m, &[("A", &[(0, 1), (1, 2), (2, 2)]), ("B", &[(0, 0), (2, 1)])]);
        let frame = make_pair_frame(m).unwrap();
        // pair (i,j) of the base is element i*m+j of the pair frame
        let h: validity::Assignment = s
            .interp
            .iter()
            .map(|(name, &rel)| {
                let mut mask = 0u32;
                for i in 0..m {
                    for j in 0..m {
                        if s.contains(rel, i, j) {
                            mask |= 1 << (i * m + j);
                        }
                    }
                }
                (name.clone(), mask)
            })
            .collect();
        for src in ["A ; B", "-(A + B^)", "A -> B", "(A . B) ! A*"] {
            let p = parse_predicate(src).unwrap();
            let r = denote(&s, &p).unwrap();
            let mut mask = 0u32;
            for i in 0..m {
                for j in 0..m {
                    if s.contains(r, i, j) {
                        mask |= 1 << (i * m + j);
                    }
                }
            }
            assert_eq!(validity::eval(&frame, &h, &p).unwrap(), mask, "{src}");
        }
    }
}
