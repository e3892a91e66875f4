//! Evaluation of predicates in complex algebras and validity decisions.
//!
//! A predicate is *valid* in a frame when the identity subset is
//! contained in its value under every assignment of subsets to its
//! atoms.  The module provides a structural evaluator, a bit-parallel
//! exhaustive sweep with subterm caching, counterexample search
//! strategies, and validity grids over frame × predicate matrices.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::frames::{Frame, SubsetValue};
use crate::syntax::PredicateTerm;

/// A map from atom names to subset values over a fixed frame.
pub type Assignment = BTreeMap<String, SubsetValue>;

/// Errors from evaluation and search budgets.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ValidityError {
    #[error("assignment is missing a value for atom {0:?}")]
    MissingAssignment(String),
    #[error("sweep of 2^{0} assignments exceeds the bit budget")]
    Budget(u32),
}

/// Outcome of a validity decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidityVerdict {
    /// the identity subset is below the value under every assignment
    Valid,
    /// a specific assignment whose value does not include the identity
    Invalid(Assignment),
    /// the sweep was refused: it would need `required_bits` bits
    BudgetExceeded { required_bits: u32 },
}

/// Evaluate a predicate under an assignment.  Derived operators are
/// evaluated directly with the same semantics as their desugarings.
pub fn eval(f: &Frame, h: &Assignment, p: &PredicateTerm) -> Result<SubsetValue, ValidityError> {
    use PredicateTerm::*;
    Ok(match p {
        Atom(name) => *h
            .get(name)
            .ok_or_else(|| ValidityError::MissingAssignment(name.clone()))?,
        Identity | Truth => f.identity_set(),
        One => f.universe(),
        Zero => 0,
        Diversity => f.complement(f.identity_set()),
        Join(a, b) | Or(a, b) => eval(f, h, a)? | eval(f, h, b)?,
        Meet(a, b) | And(a, b) => eval(f, h, a)? & eval(f, h, b)?,
        Complement(a) | BoolNeg(a) => f.complement(eval(f, h, a)?),
        DeMorganNeg(a) => f.complement(f.converse(eval(f, h, a)?)),
        RelProd(a, b) => f.compose(eval(f, h, a)?, eval(f, h, b)?),
        Fusion(a, b) => {
            let (va, vb) = (eval(f, h, a)?, eval(f, h, b)?);
            f.compose(vb, va)
        }
        Dagger(a, b) => {
            let (va, vb) = (eval(f, h, a)?, eval(f, h, b)?);
            f.complement(f.compose(f.complement(va), f.complement(vb)))
        }
        Implies(a, b) => {
            let (va, vb) = (eval(f, h, a)?, eval(f, h, b)?);
            f.complement(f.compose(f.converse(va), f.complement(vb)))
        }
        Converse(a) | Star(a) => f.converse(eval(f, h, a)?),
    })
}

/// Whether the identity subset is contained in the predicate's value
/// under the assignment.
pub fn holds(f: &Frame, h: &Assignment, p: &PredicateTerm) -> Result<bool, ValidityError> {
    let v = eval(f, h, p)?;
    Ok(f.identity_set() & v == f.identity_set())
}

/// Render an assignment with frame element names: `A={a,c} B={}`.
pub fn format_assignment(f: &Frame, h: &Assignment) -> String {
    h.iter()
        .map(|(name, &v)| format!("{name}={}", f.subset_name(v)))
        .collect::<Vec<_>>()
        .join(" ")
}

// ---------------------------------------------------------------------------
// Compiled evaluator for exhaustive sweeps
// ---------------------------------------------------------------------------

/// Core operations after desugaring, over interned node indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    Var(usize),
    Const(SubsetValue),
    Join(usize, usize),
    Complement(usize),
    RelProd(usize, usize),
    Converse(usize),
}

/// A predicate compiled to a post-order node list with shared subterms.
/// `max_rank[i]` is the highest variable rank a node depends on (or
/// `usize::MAX` for constants), so a sweep that increments variable `j`
/// re-evaluates only nodes with `max_rank ≥ j`.
struct Compiled {
    nodes: Vec<Node>,
    max_rank: Vec<usize>,
    vars: Vec<String>,
}

const NO_VAR: usize = usize::MAX;

fn compile(f: &Frame, p: &PredicateTerm) -> Compiled {
    let core = crate::syntax::desugar(p);
    let vars = crate::syntax::variables_in_order(p);
    let rank: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut nodes: Vec<Node> = Vec::new();
    let mut max_rank: Vec<usize> = Vec::new();
    let mut interned: HashMap<Node, usize> = HashMap::new();

    fn intern(
        node: Node,
        mr: usize,
        nodes: &mut Vec<Node>,
        max_rank: &mut Vec<usize>,
        interned: &mut HashMap<Node, usize>,
    ) -> usize {
        if let Some(&i) = interned.get(&node) {
            return i;
        }
        let i = nodes.len();
        nodes.push(node.clone());
        max_rank.push(mr);
        interned.insert(node, i);
        i
    }

    fn go(
        t: &PredicateTerm,
        f: &Frame,
        rank: &HashMap<&str, usize>,
        nodes: &mut Vec<Node>,
        max_rank: &mut Vec<usize>,
        interned: &mut HashMap<Node, usize>,
    ) -> usize {
        use PredicateTerm::*;
        let comb = |a: usize, b: usize, mra: usize, mrb: usize| -> usize {
            let _ = (a, b);
            if mra == NO_VAR {
                mrb
            } else if mrb == NO_VAR {
                mra
            } else {
                mra.max(mrb)
            }
        };
        match t {
            Atom(name) => {
                let r = rank[name.as_str()];
                intern(Node::Var(r), r, nodes, max_rank, interned)
            }
            Identity => intern(
                Node::Const(f.identity_set()),
                NO_VAR,
                nodes,
                max_rank,
                interned,
            ),
            Join(a, b) => {
                let ia = go(a, f, rank, nodes, max_rank, interned);
                let ib = go(b, f, rank, nodes, max_rank, interned);
                let mr = comb(ia, ib, max_rank[ia], max_rank[ib]);
                intern(Node::Join(ia.min(ib), ia.max(ib)), mr, nodes, max_rank, interned)
            }
            RelProd(a, b) => {
                let ia = go(a, f, rank, nodes, max_rank, interned);
                let ib = go(b, f, rank, nodes, max_rank, interned);
                let mr = comb(ia, ib, max_rank[ia], max_rank[ib]);
                intern(Node::RelProd(ia, ib), mr, nodes, max_rank, interned)
            }
            Complement(a) => {
                let ia = go(a, f, rank, nodes, max_rank, interned);
                let mr = max_rank[ia];
                intern(Node::Complement(ia), mr, nodes, max_rank, interned)
            }
            Converse(a) => {
                let ia = go(a, f, rank, nodes, max_rank, interned);
                let mr = max_rank[ia];
                intern(Node::Converse(ia), mr, nodes, max_rank, interned)
            }
            other => unreachable!("desugar left a derived operator: {other:?}"),
        }
    }

    go(&core, f, &rank, &mut nodes, &mut max_rank, &mut interned);
    Compiled {
        nodes,
        max_rank,
        vars,
    }
}

impl Compiled {
    /// Re-evaluate all nodes depending on variables of rank ≥ `from`.
    fn recompute(&self, f: &Frame, var_vals: &[SubsetValue], vals: &mut [SubsetValue], from: usize) {
        for (i, node) in self.nodes.iter().enumerate() {
            let mr = self.max_rank[i];
            if mr == NO_VAR || mr < from {
                continue;
            }
            vals[i] = match *node {
                Node::Var(r) => var_vals[r],
                Node::Const(c) => c,
                Node::Join(a, b) => vals[a] | vals[b],
                Node::Complement(a) => f.complement(vals[a]),
                Node::RelProd(a, b) => f.compose(vals[a], vals[b]),
                Node::Converse(a) => f.converse(vals[a]),
            };
        }
    }

    /// Evaluate all nodes once (constants included).
    fn full_eval(&self, f: &Frame, var_vals: &[SubsetValue], vals: &mut [SubsetValue]) {
        for (i, node) in self.nodes.iter().enumerate() {
            vals[i] = match *node {
                Node::Var(r) => var_vals[r],
                Node::Const(c) => c,
                Node::Join(a, b) => vals[a] | vals[b],
                Node::Complement(a) => f.complement(vals[a]),
                Node::RelProd(a, b) => f.compose(vals[a], vals[b]),
                Node::Converse(a) => f.converse(vals[a]),
            };
        }
    }
}

/// Default bit budget for exhaustive sweeps: `n · |vars| ≤ 30`.
pub const DEFAULT_BIT_BUDGET: u32 = 30;

/// Decide validity by exhaustive sweep over all `(2ⁿ)^|vars|`
/// assignments.  The sweep is partitioned over the first variable's
/// values across worker threads; the first counterexample cancels the
/// remaining work.
pub fn decide_valid(f: &Frame, p: &PredicateTerm, bit_budget: u32) -> ValidityVerdict {
    let compiled = compile(f, p);
    let m = compiled.vars.len();
    let bits = (f.n() * m) as u32;
    if bits > bit_budget {
        return ValidityVerdict::BudgetExceeded {
            required_bits: bits,
        };
    }
    let id = f.identity_set();
    let root = compiled.nodes.len() - 1;
    if m == 0 {
        let mut vals = vec![0; compiled.nodes.len()];
        compiled.full_eval(f, &[], &mut vals);
        return if id & vals[root] == id {
            ValidityVerdict::Valid
        } else {
            ValidityVerdict::Invalid(Assignment::new())
        };
    }
    let top = f.universe();
    let found = AtomicBool::new(false);
    let witness: Mutex<Option<Assignment>> = Mutex::new(None);
    (0..=top).into_par_iter().for_each(|first| {
        if found.load(Ordering::Relaxed) {
            return;
        }
        let mut var_vals = vec![0 as SubsetValue; m];
        var_vals[0] = first;
        let mut vals = vec![0 as SubsetValue; compiled.nodes.len()];
        compiled.full_eval(f, &var_vals, &mut vals);
        let mut counter = 0u64;
        loop {
            if id & vals[root] != id {
                let h: Assignment = compiled
                    .vars
                    .iter()
                    .cloned()
                    .zip(var_vals.iter().copied())
                    .collect();
                let mut w = witness.lock().unwrap();
                if w.is_none() {
                    *w = Some(h);
                }
                found.store(true, Ordering::Relaxed);
                return;
            }
            // odometer over variables 1..m, innermost last
            let mut j = m;
            loop {
                if j == 1 {
                    return; // this partition is exhausted
                }
                j -= 1;
                if var_vals[j] < top {
                    var_vals[j] += 1;
                    for v in var_vals.iter_mut().skip(j + 1) {
                        *v = 0;
                    }
                    compiled.recompute(f, &var_vals, &mut vals, j);
                    break;
                }
                var_vals[j] = 0;
            }
            counter += 1;
            if counter % 4096 == 0 && found.load(Ordering::Relaxed) {
                return;
            }
        }
    });
    match witness.into_inner().unwrap() {
        Some(h) => ValidityVerdict::Invalid(h),
        None => ValidityVerdict::Valid,
    }
}

/// Counterexample search strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStrategy {
    /// every atom ranges over singleton subsets only (incomplete)
    Singletons,
    /// full sweep via [`decide_valid`] with the given bit budget
    Exhaustive { bit_budget: u32 },
    /// random assignments, deterministic under the seed
    Random { seed: u64, tries: u64 },
}

/// Search for an assignment under which the predicate fails to hold.
/// `None` is a validity certificate only for a completed exhaustive
/// strategy.
pub fn find_invalidating(
    f: &Frame,
    p: &PredicateTerm,
    strategy: SearchStrategy,
) -> Result<Option<Assignment>, ValidityError> {
    let vars = crate::syntax::variables_in_order(p);
    match strategy {
        SearchStrategy::Singletons => {
            let m = vars.len();
            let mut choice = vec![0usize; m];
            loop {
                let h: Assignment = vars
                    .iter()
                    .cloned()
                    .zip(choice.iter().map(|&e| (1 << e) as SubsetValue))
                    .collect();
                if !holds(f, &h, p)? {
                    return Ok(Some(h));
                }
                let mut j = m;
                loop {
                    if j == 0 {
                        return Ok(None);
                    }
                    j -= 1;
                    choice[j] += 1;
                    if choice[j] < f.n() {
                        break;
                    }
                    choice[j] = 0;
                }
                if m == 0 {
                    return Ok(None);
                }
            }
        }
        SearchStrategy::Exhaustive { bit_budget } => match decide_valid(f, p, bit_budget) {
            ValidityVerdict::Valid => Ok(None),
            ValidityVerdict::Invalid(h) => Ok(Some(h)),
            ValidityVerdict::BudgetExceeded { required_bits } => {
                Err(ValidityError::Budget(required_bits))
            }
        },
        SearchStrategy::Random { seed, tries } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let top = f.universe();
            for _ in 0..tries {
                let h: Assignment = vars
                    .iter()
                    .cloned()
                    .map(|v| (v, rng.gen_range(0..=top)))
                    .collect();
                if !holds(f, &h, p)? {
                    return Ok(Some(h));
                }
            }
            Ok(None)
        }
    }
}

/// Validity verdicts for every frame × predicate pair.
pub fn census_validity(
    frames: &[Frame],
    preds: &[PredicateTerm],
    bit_budget: u32,
) -> Vec<Vec<ValidityVerdict>> {
    frames
        .iter()
        .map(|f| {
            preds
                .iter()
                .map(|p| decide_valid(f, p, bit_budget))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::builtin_frame;
    use crate::syntax::parse_predicate;

    fn h(pairs: &[(&str, SubsetValue)]) -> Assignment {
        pairs
            .iter()
            .map(|&(k, v)| (k.to_string(), v))
            .collect()
    }

    #[test]
    fn eval_matches_desugar_semantics() {
        let f = builtin_frame("k2").unwrap();
        let terms = [
            "A -> B",
            "~(A o B)",
            "A & (B | not C)",
            "(A* ; B^) ! -C",
            "t | 0 | 1 | 0'",
            "A . B",
        ];
        let assign = h(&[("A", 0b0101), ("B", 0b0011), ("C", 0b1110)]);
        for t in terms {
            let p = parse_predicate(t).unwrap();
            let d = crate::syntax::desugar(&p);
            assert_eq!(
                eval(&f, &assign, &p).unwrap(),
                eval(&f, &assign, &d).unwrap(),
                "{t}"
            );
        }
    }

    #[test]
    fn fusion_flips_composition() {
        let f = builtin_frame("k1").unwrap();
        let p = parse_predicate("A o B").unwrap();
        let assign = h(&[("A", 0b0010), ("B", 0b0100)]);
        // {b};{a} = {c}
        assert_eq!(eval(&f, &assign, &p).unwrap(), 0b1000);
    }

    #[test]
    fn truth_always_holds() {
        for name in ["k1", "k2", "k3", "k4", "k5"] {
            let f = builtin_frame(name).unwrap();
            assert!(holds(&f, &Assignment::new(), &PredicateTerm::Truth).unwrap());
            assert_eq!(
                decide_valid(&f, &PredicateTerm::Truth, DEFAULT_BIT_BUDGET),
                ValidityVerdict::Valid
            );
        }
    }

    #[test]
    fn missing_assignment_is_an_error() {
        let f = builtin_frame("k1").unwrap();
        let p = parse_predicate("A -> B").unwrap();
        assert_eq!(
            eval(&f, &Assignment::new(), &p),
            Err(ValidityError::MissingAssignment("A".to_string()))
        );
    }

    #[test]
    fn reductio_fails_in_k3() {
        let f = builtin_frame("k3").unwrap();
        let p = parse_predicate("(A -> ~A) -> ~A").unwrap();
        let assign = h(&[("A", 0b10)]);
        assert!(!holds(&f, &assign, &p).unwrap());
        let found = find_invalidating(&f, &p, SearchStrategy::Singletons)
            .unwrap()
            .expect("singleton witness exists");
        assert!(!holds(&f, &found, &p).unwrap());
    }

    #[test]
    fn mp_invalid_in_k2_with_singletons() {
        let f = builtin_frame("k2").unwrap();
        let p = parse_predicate("A -> ((A -> B) -> B)").unwrap();
        let found = find_invalidating(&f, &p, SearchStrategy::Singletons)
            .unwrap()
            .expect("witness exists");
        assert!(!holds(&f, &found, &p).unwrap());
        // the first singleton witness in sweep order maps both atoms to {a}
        assert_eq!(found["A"], 0b0010);
        assert_eq!(found["B"], 0b0010);
    }

    #[test]
    fn decide_valid_budget() {
        let f = builtin_frame("k1").unwrap();
        let p = parse_predicate("A").unwrap();
        assert_eq!(
            decide_valid(&f, &p, 3),
            ValidityVerdict::BudgetExceeded { required_bits: 4 }
        );
        match decide_valid(&f, &p, 30) {
            ValidityVerdict::Invalid(w) => {
                assert!(!holds(&f, &w, &p).unwrap());
            }
            other => panic!("expected Invalid, got {other:?}"),
        }
    }

    #[test]
    fn random_search_is_deterministic() {
        let f = builtin_frame("k2").unwrap();
        let p = parse_predicate("A -> ((A -> B) -> B)").unwrap();
        let s = SearchStrategy::Random {
            seed: 7,
            tries: 500,
        };
        let a = find_invalidating(&f, &p, s).unwrap();
        let b = find_invalidating(&f, &p, s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn format_assignment_uses_element_names() {
        let f = builtin_frame("k1").unwrap();
        let assign = h(&[("A", 0b1010), ("B", 0)]);
        assert_eq!(format_assignment(&f, &assign), "A={a,c} B={}");
    }
}
