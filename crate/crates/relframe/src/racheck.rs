//! Direct equational checks on complex algebras: the relation-algebra
//! axioms and algebra properties, existence of d-dimensional relational
//! bases, and the diamond property.
//!
//! These checks evaluate equations over *all* subset values of the
//! complex algebra, independently of the frame-condition
//! characterizations in [`crate::frames`]; the two routes are
//! cross-tested against each other.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::census::cycle;
use crate::frames::{Frame, SubsetValue};

/// Errors from the axiom and basis checks.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RaError {
    #[error("axiom sweep of 2^{0} assignments exceeds the budget")]
    Budget(u32),
    #[error("unknown axiom or property name {0:?}")]
    UnknownAxiom(String),
    #[error("basis check requires a frame whose complex algebra is semi-associative")]
    NotSemiAssociative,
}

/// Names of the equational axioms and algebra properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxiomName {
    /// A+B = B+A
    R1,
    /// A+(B+C) = (A+B)+C
    R2,
    /// −(−A+−B)+−(−A+B) = A
    R3,
    /// A;(B;C) = (A;B);C
    R4,
    /// A;(B;1) = (A;B);1
    R4Prime,
    /// (A+B);C = A;C+B;C
    R5,
    /// A;1′ = A
    R6,
    /// A˘˘ = A
    R7,
    /// (A+B)˘ = A˘+B˘
    R8,
    /// (A;B)˘ = B˘;A˘
    R9,
    /// A˘;−(A;B)+−B = −B
    R10,
    /// x ≤ x;x
    Dense,
    /// x;y = y;x
    Commutative,
    /// x˘ = x
    Symmetric,
    /// 0 ≠ 1 and x;y = 0 implies x = 0 or y = 0
    Integral,
}

/// All axiom/property names in display order.
pub const ALL_AXIOMS: [AxiomName; 15] = [
    AxiomName::R1,
    AxiomName::R2,
    AxiomName::R3,
    AxiomName::R4,
    AxiomName::R4Prime,
    AxiomName::R5,
    AxiomName::R6,
    AxiomName::R7,
    AxiomName::R8,
    AxiomName::R9,
    AxiomName::R10,
    AxiomName::Dense,
    AxiomName::Commutative,
    AxiomName::Symmetric,
    AxiomName::Integral,
];

impl AxiomName {
    pub fn from_str_name(s: &str) -> Option<Self> {
        Some(match s {
            "R1" | "r1" => Self::R1,
            "R2" | "r2" => Self::R2,
            "R3" | "r3" => Self::R3,
            "R4" | "r4" => Self::R4,
            "R4'" | "r4'" | "R4prime" | "r4prime" => Self::R4Prime,
            "R5" | "r5" => Self::R5,
            "R6" | "r6" => Self::R6,
            "R7" | "r7" => Self::R7,
            "R8" | "r8" => Self::R8,
            "R9" | "r9" => Self::R9,
            "R10" | "r10" => Self::R10,
            "dense" => Self::Dense,
            "commutative" => Self::Commutative,
            "symmetric" => Self::Symmetric,
            "integral" => Self::Integral,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::R1 => "R1",
            Self::R2 => "R2",
            Self::R3 => "R3",
            Self::R4 => "R4",
            Self::R4Prime => "R4'",
            Self::R5 => "R5",
            Self::R6 => "R6",
            Self::R7 => "R7",
            Self::R8 => "R8",
            Self::R9 => "R9",
            Self::R10 => "R10",
            Self::Dense => "dense",
            Self::Commutative => "commutative",
            Self::Symmetric => "symmetric",
            Self::Integral => "integral",
        }
    }

    fn variable_count(self) -> u32 {
        match self {
            Self::R6 | Self::R7 | Self::Dense | Self::Symmetric => 1,
            Self::R1
            | Self::R3
            | Self::R4Prime
            | Self::R8
            | Self::R9
            | Self::R10
            | Self::Commutative
            | Self::Integral => 2,
            Self::R2 | Self::R4 | Self::R5 => 3,
        }
    }
}

/// Default budget on the number of assignments swept by [`check_axiom`].
pub const AXIOM_BUDGET_BITS: u32 = 27;

/// Check an axiom or property on the complex algebra of `f` by
/// exhaustive evaluation over all subset tuples.
pub fn check_axiom(f: &Frame, a: AxiomName) -> Result<bool, RaError> {
    let bits = a.variable_count() * f.n() as u32;
    if bits > AXIOM_BUDGET_BITS {
        return Err(RaError::Budget(bits));
    }
    let top = f.universe();
    let id = f.identity_set();
    let all = 0..=top;
    let ok = match a {
        AxiomName::R1 => all_pairs(top, |x, y| x | y == y | x),
        AxiomName::R2 => all_triples(top, |x, y, z| x | (y | z) == (x | y) | z),
        AxiomName::R3 => all_pairs(top, |x, y| {
            let c = |v: SubsetValue| f.complement(v);
            c(c(x) | c(y)) | c(c(x) | y) == x
        }),
        AxiomName::R4 => all_triples(top, |x, y, z| {
            f.compose(x, f.compose(y, z)) == f.compose(f.compose(x, y), z)
        }),
        AxiomName::R4Prime => all_pairs(top, |x, y| {
            f.compose(x, f.compose(y, top)) == f.compose(f.compose(x, y), top)
        }),
        AxiomName::R5 => all_triples(top, |x, y, z| {
            f.compose(x | y, z) == f.compose(x, z) | f.compose(y, z)
        }),
        AxiomName::R6 => all.clone().all(|x| f.compose(x, id) == x),
        AxiomName::R7 => all.clone().all(|x| f.converse(f.converse(x)) == x),
        AxiomName::R8 => all_pairs(top, |x, y| f.converse(x | y) == f.converse(x) | f.converse(y)),
        AxiomName::R9 => all_pairs(top, |x, y| {
            f.converse(f.compose(x, y)) == f.compose(f.converse(y), f.converse(x))
        }),
        AxiomName::R10 => all_pairs(top, |x, y| {
            let ny = f.complement(y);
            f.compose(f.converse(x), f.complement(f.compose(x, y))) | ny == ny
        }),
        AxiomName::Dense => all.clone().all(|x| x & f.compose(x, x) == x),
        AxiomName::Commutative => all_pairs(top, |x, y| f.compose(x, y) == f.compose(y, x)),
        AxiomName::Symmetric => all.clone().all(|x| f.converse(x) == x),
        AxiomName::Integral => {
            top != 0 && all_pairs(top, |x, y| f.compose(x, y) != 0 || x == 0 || y == 0)
        }
    };
    Ok(ok)
}

fn all_pairs(top: SubsetValue, mut p: impl FnMut(SubsetValue, SubsetValue) -> bool) -> bool {
    for x in 0..=top {
        for y in 0..=top {
            if !p(x, y) {
                return false;
            }
        }
    }
    true
}

fn all_triples(
    top: SubsetValue,
    mut p: impl FnMut(SubsetValue, SubsetValue, SubsetValue) -> bool,
) -> bool {
    for x in 0..=top {
        for y in 0..=top {
            for z in 0..=top {
                if !p(x, y, z) {
                    return false;
                }
            }
        }
    }
    true
}

/// A d×d matrix of atom indices (atoms of the complex algebra are the
/// carrier elements).  Diagonal entries lie in the identity subset; the
/// lower triangle is the converse image of the upper triangle.
pub type BasisMatrix = Vec<usize>;

/// Result of the relational-basis fixpoint computation.
#[derive(Debug, Clone)]
pub struct BasisResult {
    /// whether a basis exists
    pub exists: bool,
    /// the greatest fixpoint (the witness basis when `exists`, the
    /// maximal surviving candidate set otherwise)
    pub basis: Vec<BasisMatrix>,
    /// atoms with no surviving matrix at position (0,1)
    pub uncovered_atoms: Vec<usize>,
    /// number of deletion rounds performed
    pub rounds: usize,
}

/// Decide whether the complex algebra of `f` has a `d`-dimensional
/// relational basis, by greatest fixpoint: start from all atom matrices
/// satisfying the coherence condition
/// (`x_ii ∈ I`, `x_ji = ⋆x_ij`, `⟨x_ij, x_jk, x_ik⟩ ∈ R`),
/// repeatedly delete matrices lacking a required amalgamation witness,
/// then test that the survivors cover every atom at position (0,1).
///
/// The frame must be an SA-frame (the ambient class of the definition).
pub fn relational_basis_exists(f: &Frame, d: usize) -> Result<BasisResult, RaError> {
    assert!(d >= 3, "basis dimension must be at least 3");
    if !f.classify().sa_frame {
        return Err(RaError::NotSemiAssociative);
    }
    let n = f.n();
    let star = f.star();
    let id_atoms: Vec<usize> = (0..n).filter(|&e| f.identity_set() >> e & 1 == 1).collect();

    // enumerate candidates by diagonal (identity atoms) and strict upper
    // triangle (arbitrary atoms); lower triangle forced by converse.
    // The coherence condition is checked incrementally so that most
    // partial assignments are pruned early.
    let upper: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
        .collect();
    let mut candidates: Vec<BasisMatrix> = Vec::new();
    let mut diag_choice = vec![0usize; d];
    loop {
        let mut m = vec![usize::MAX; d * d];
        for i in 0..d {
            m[i * d + i] = id_atoms[diag_choice[i]];
        }
        fill_upper(f, d, star, &upper, 0, &mut m, &mut candidates);
        if !advance(&mut diag_choice, id_atoms.len()) {
            break;
        }
    }

    // greatest fixpoint: delete matrices missing an amalgamation witness
    let mut rounds = 0;
    loop {
        rounds += 1;
        // group by (k, off-k part): map to list of row-k profiles
        let mut groups: Vec<HashMap<Vec<usize>, Vec<usize>>> = vec![HashMap::new(); d];
        for (idx, m) in candidates.iter().enumerate() {
            for (k, group) in groups.iter_mut().enumerate() {
                group.entry(off_key(d, m, k)).or_default().push(idx);
            }
        }
        let mut keep = vec![true; candidates.len()];
        let mut removed = false;
        for (idx, m) in candidates.iter().enumerate() {
            'check: for i in 0..d {
                for j in 0..d {
                    if i == j {
                        continue;
                    }
                    let xij = m[i * d + j];
                    for a in 0..n {
                        for b in 0..n {
                            if !f.has(a, b, xij) {
                                continue;
                            }
                            for k in 0..d {
                                if k == i || k == j {
                                    continue;
                                }
                                let peers = &groups[k][&off_key(d, m, k)];
                                let found = peers.iter().any(|&p| {
                                    let y = &candidates[p];
                                    y[i * d + k] == a && y[k * d + j] == b
                                });
                                if !found {
                                    keep[idx] = false;
                                    removed = true;
                                    break 'check;
                                }
                            }
                        }
                    }
                }
            }
        }
        if !removed {
            break;
        }
        let mut next = Vec::with_capacity(candidates.len());
        for (idx, m) in candidates.into_iter().enumerate() {
            if keep[idx] {
                next.push(m);
            }
        }
        candidates = next;
        if candidates.is_empty() {
            break;
        }
    }

    let covered: BTreeSet<usize> = candidates.iter().map(|m| m[1]).collect();
    let uncovered_atoms: Vec<usize> = (0..n).filter(|a| !covered.contains(a)).collect();
    Ok(BasisResult {
        exists: uncovered_atoms.is_empty() && !candidates.is_empty(),
        basis: candidates,
        uncovered_atoms,
        rounds,
    })
}

/// Recursively assign upper-triangle entries, pruning any partial matrix
/// that already violates the coherence condition
/// (`⟨m_pq, m_qr, m_pr⟩ ∈ R` for all index triples with all three
/// entries assigned).
fn fill_upper(
    f: &Frame,
    d: usize,
    star: &[usize],
    upper: &[(usize, usize)],
    t: usize,
    m: &mut [usize],
    out: &mut Vec<BasisMatrix>,
) {
    if t == upper.len() {
        out.push(m.to_vec());
        return;
    }
    let (i, j) = upper[t];
    for a in 0..f.n() {
        m[i * d + j] = a;
        m[j * d + i] = star[a];
        if partial_coherent(f, d, m, i, j) {
            fill_upper(f, d, star, upper, t + 1, m, out);
        }
    }
    m[i * d + j] = usize::MAX;
    m[j * d + i] = usize::MAX;
}

/// Check every fully assigned coherence triple that involves entry
/// `(i,j)` or `(j,i)` of the matrix.
fn partial_coherent(f: &Frame, d: usize, m: &[usize], i: usize, j: usize) -> bool {
    let set = |p: usize, q: usize| m[p * d + q] != usize::MAX;
    for p in 0..d {
        for q in 0..d {
            for r in 0..d {
                let touches = (p == i && q == j)
                    || (q == i && r == j)
                    || (p == i && r == j)
                    || (p == j && q == i)
                    || (q == j && r == i)
                    || (p == j && r == i);
                if !touches || !set(p, q) || !set(q, r) || !set(p, r) {
                    continue;
                }
                if !f.has(m[p * d + q], m[q * d + r], m[p * d + r]) {
                    return false;
                }
            }
        }
    }
    true
}

/// The entries of `m` outside row/column `k`, as a grouping key.
fn off_key(d: usize, m: &[usize], k: usize) -> Vec<usize> {
    let mut key = Vec::with_capacity((d - 1) * (d - 1));
    for i in 0..d {
        if i == k {
            continue;
        }
        for j in 0..d {
            if j == k {
                continue;
            }
            key.push(m[i * d + j]);
        }
    }
    key
}

/// Odometer-style advance of a mixed-radix counter; false on wraparound.
fn advance(digits: &mut [usize], radix: usize) -> bool {
    for digit in digits.iter_mut() {
        *digit += 1;
        if *digit < radix {
            return true;
        }
        *digit = 0;
    }
    false
}

/// The diamond property D(t): for all nonzero `x₁..x_t, y₁..y_t` there
/// is a nonzero `z` such that every cycle `C(x_i, y_i, z)` is contained
/// in `R`.  "Nonzero" means outside the identity subset.  Returns false
/// when the frame has no nonzero elements at all (no completion exists).
pub fn diamond(f: &Frame, t: usize) -> bool {
    assert!(t >= 1, "diamond arity must be at least 1");
    let nonzero: Vec<usize> = (0..f.n())
        .filter(|&e| f.identity_set() >> e & 1 == 0)
        .collect();
    if nonzero.is_empty() {
        return false;
    }
    let works = |xs: &[usize], ys: &[usize], z: usize| {
        xs.iter().zip(ys).all(|(&x, &y)| {
            cycle(f.star(), (x, y, z))
                .iter()
                .all(|&(a, b, c)| f.has(a, b, c))
        })
    };
    // iterate all t-tuples of nonzero pairs with an odometer
    let m = nonzero.len();
    let mut choice = vec![0usize; 2 * t];
    loop {
        let xs: Vec<usize> = (0..t).map(|i| nonzero[choice[i]]).collect();
        let ys: Vec<usize> = (0..t).map(|i| nonzero[choice[t + i]]).collect();
        if !nonzero.iter().any(|&z| works(&xs, &ys, z)) {
            return false;
        }
        if !advance(&mut choice, m) {
            return true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{builtin_frame, make_cyclic_group_frame, make_pair_frame, ConditionName};

    #[test]
    fn axioms_on_builtin_frames() {
        let k1 = builtin_frame("k1").unwrap();
        for a in [AxiomName::R1, AxiomName::R2, AxiomName::R3, AxiomName::R5] {
            assert!(check_axiom(&k1, a).unwrap());
        }
        assert!(check_axiom(&k1, AxiomName::R4Prime).unwrap());
        assert!(!check_axiom(&k1, AxiomName::R4).unwrap());
        assert!(check_axiom(&k1, AxiomName::Dense).unwrap());
        assert!(check_axiom(&k1, AxiomName::Commutative).unwrap());
        assert!(check_axiom(&k1, AxiomName::Symmetric).unwrap());
        assert!(check_axiom(&k1, AxiomName::Integral).unwrap());

        let k2 = builtin_frame("k2").unwrap();
        assert!(check_axiom(&k2, AxiomName::R4).unwrap());
        assert!(check_axiom(&k2, AxiomName::Dense).unwrap());
        assert!(!check_axiom(&k2, AxiomName::Commutative).unwrap());

        let k3 = builtin_frame("k3").unwrap();
        assert!(!check_axiom(&k3, AxiomName::Dense).unwrap());

        let k4 = builtin_frame("k4").unwrap();
        assert!(!check_axiom(&k4, AxiomName::R9).unwrap());

        let k5 = builtin_frame("k5").unwrap();
        for a in ALL_AXIOMS {
            assert!(check_axiom(&k5, a).unwrap(), "k5 fails {}", a.name());
        }
    }

    #[test]
    fn classify_agrees_with_axiom_checks() {
        let frames = [
            builtin_frame("k1").unwrap(),
            builtin_frame("k2").unwrap(),
            builtin_frame("k3").unwrap(),
            builtin_frame("k4").unwrap(),
            builtin_frame("k5").unwrap(),
            make_pair_frame(2).unwrap(),
            make_cyclic_group_frame(4).unwrap(),
        ];
        for f in &frames {
            let report = f.classify();
            let na_axioms = [
                AxiomName::R1,
                AxiomName::R2,
                AxiomName::R3,
                AxiomName::R5,
                AxiomName::R6,
                AxiomName::R7,
                AxiomName::R8,
                AxiomName::R9,
                AxiomName::R10,
            ]
            .iter()
            .all(|&a| check_axiom(f, a).unwrap());
            assert_eq!(report.na_frame, na_axioms, "{:?}", f.name);
            if report.na_frame {
                assert_eq!(
                    report.sa_frame,
                    check_axiom(f, AxiomName::R4Prime).unwrap(),
                    "{:?}",
                    f.name
                );
                assert_eq!(
                    report.ra_frame,
                    check_axiom(f, AxiomName::R4).unwrap(),
                    "{:?}",
                    f.name
                );
            }
        }
    }

    #[test]
    fn basis_existence_matches_known_classes() {
        let k1 = builtin_frame("k1").unwrap();
        assert!(relational_basis_exists(&k1, 3).unwrap().exists);
        assert!(!relational_basis_exists(&k1, 4).unwrap().exists);
        let k2 = builtin_frame("k2").unwrap();
        assert!(relational_basis_exists(&k2, 4).unwrap().exists);
        let k4 = builtin_frame("k4").unwrap();
        assert!(relational_basis_exists(&k4, 3).is_err());
    }

    #[test]
    fn diamond_examples() {
        let k5 = builtin_frame("k5").unwrap();
        assert!(diamond(&k5, 1));
        let trivial = make_cyclic_group_frame(1).unwrap();
        assert!(!diamond(&trivial, 1));
        // in the two-element group frame the only nonzero completion of
        // (a, a) would be z = a, but ⟨a,a,a⟩ is not in R
        let k3 = builtin_frame("k3").unwrap();
        assert!(!diamond(&k3, 1));
    }

    #[test]
    fn diamond_implies_basis_on_small_frames() {
        for name in ["k1", "k2", "k5"] {
            let f = builtin_frame(name).unwrap();
            for d in [3usize, 4] {
                if f.classify().sa_frame && diamond(&f, d - 2) {
                    assert!(
                        relational_basis_exists(&f, d).unwrap().exists,
                        "{name} d={d}"
                    );
                }
            }
        }
    }

    #[test]
    fn pasch_agrees_with_basis_4_on_sa_frames() {
        let k1 = builtin_frame("k1").unwrap();
        assert_eq!(
            relational_basis_exists(&k1, 4).unwrap().exists,
            k1.check_condition(ConditionName::Pasch)
        );
        let k2 = builtin_frame("k2").unwrap();
        assert_eq!(
            relational_basis_exists(&k2, 4).unwrap().exists,
            k2.check_condition(ConditionName::Pasch)
        );
    }
}
