//! Finite frames, frame conditions, complex-algebra operations, and
//! frame classification.
//!
//! A frame is a structure `⟨K, R, ⋆, I⟩` with a finite carrier `K =
//! {0, …, n−1}`, a ternary relation `R ⊆ K³`, an involution `⋆` of the
//! carrier, and an identity subset `I ⊆ K`.  Its complex algebra has as
//! elements all subsets of the carrier ([`SubsetValue`] bit masks), with
//! union and complement as the Boolean operations and
//!
//! * composition `X ; Y = {z : (x,y,z) ∈ R for some x ∈ X, y ∈ Y}`,
//! * converse `X˘ = {⋆z : z ∈ X}`,
//! * identity element `I`.
//!
//! The module also provides the standard first-order frame conditions
//! (rotations, reflections, identity, Pasch laws, density, commutativity,
//! symmetry, and the `p1`–`p5` postulate set), the classification of a
//! frame by which algebra class its complex algebra belongs to, and the
//! constructors for pair frames, cyclic-group frames, and the built-in
//! example frames `k1`–`k5`.

use std::fmt::Write as _;

use thiserror::Error;

/// Maximum carrier size; keeps every [`SubsetValue`] in one machine word.
pub const MAX_CARRIER: usize = 30;

/// A subset of a frame's carrier, encoded as a bit mask (bit `i` set iff
/// element `i` is in the subset).
pub type SubsetValue = u32;

/// Errors produced by frame constructors and parsers.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FrameError {
    #[error("carrier size {0} exceeds the maximum of {MAX_CARRIER}")]
    TooLarge(usize),
    #[error("carrier must be nonempty")]
    Empty,
    #[error("star map is not an involution of the carrier")]
    BadStar,
    #[error("element index {0} out of range")]
    BadElement(usize),
    #[error("unknown builtin frame name {0:?}")]
    UnknownBuiltin(String),
    #[error("frame file error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// First-order conditions on frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionName {
    /// `Rxyz ⟹ R y ⋆z ⋆x`
    LeftRotation,
    /// `Rxyz ⟹ R ⋆z x ⋆y`
    RightRotation,
    /// `Rxyz ⟹ R ⋆y ⋆x ⋆z`
    CenterReflection,
    /// `Rxyz ⟹ R ⋆x z y`
    LeftReflection,
    /// `Rxyz ⟹ R z ⋆y x`
    RightReflection,
    /// `x = y ⟺ ∃u (u ∈ I and Rxuy)`
    Identity,
    /// `⋆⋆x = x`
    Involution,
    /// `∃x (Rvwx and Rxyz) ⟹ ∃u Rvuz`
    SemiPasch,
    /// `∃x (Rvwx and Rxyz) ⟹ ∃u (Rvuz and Rwyu)`
    Pasch,
    /// `Rxxx`
    Dense,
    /// `Rxyz ⟺ Ryxz`
    Comm,
    /// `⋆x = x`
    Symm,
    /// `R0ab ⟺ a = b` (requires `I = {0}`)
    P1,
    /// `∃x (Rabx and Rxcd) ⟺ ∃y (Racy and Rybd)`
    P2,
    /// `Raaa`
    P3,
    /// `⋆⋆a = a`
    P4,
    /// `Rabc ⟺ R a ⋆c ⋆b`
    P5,
}

/// All condition names, in display order.
pub const ALL_CONDITIONS: [ConditionName; 17] = [
    ConditionName::LeftRotation,
    ConditionName::RightRotation,
    ConditionName::CenterReflection,
    ConditionName::LeftReflection,
    ConditionName::RightReflection,
    ConditionName::Identity,
    ConditionName::Involution,
    ConditionName::SemiPasch,
    ConditionName::Pasch,
    ConditionName::Dense,
    ConditionName::Comm,
    ConditionName::Symm,
    ConditionName::P1,
    ConditionName::P2,
    ConditionName::P3,
    ConditionName::P4,
    ConditionName::P5,
];

impl ConditionName {
    /// Parse a condition name as used on the CLI (`left-reflection`, …).
    pub fn from_str_name(s: &str) -> Option<Self> {
        Some(match s {
            "left-rotation" => Self::LeftRotation,
            "right-rotation" => Self::RightRotation,
            "center-reflection" => Self::CenterReflection,
            "left-reflection" => Self::LeftReflection,
            "right-reflection" => Self::RightReflection,
            "identity" => Self::Identity,
            "involution" => Self::Involution,
            "semi-pasch" => Self::SemiPasch,
            "pasch" => Self::Pasch,
            "dense" => Self::Dense,
            "comm" => Self::Comm,
            "symm" => Self::Symm,
            "p1" => Self::P1,
            "p2" => Self::P2,
            "p3" => Self::P3,
            "p4" => Self::P4,
            "p5" => Self::P5,
            _ => return None,
        })
    }

    /// CLI name of the condition.
    pub fn name(self) -> &'static str {
        match self {
            Self::LeftRotation => "left-rotation",
            Self::RightRotation => "right-rotation",
            Self::CenterReflection => "center-reflection",
            Self::LeftReflection => "left-reflection",
            Self::RightReflection => "right-reflection",
            Self::Identity => "identity",
            Self::Involution => "involution",
            Self::SemiPasch => "semi-pasch",
            Self::Pasch => "pasch",
            Self::Dense => "dense",
            Self::Comm => "comm",
            Self::Symm => "symm",
            Self::P1 => "p1",
            Self::P2 => "p2",
            Self::P3 => "p3",
            Self::P4 => "p4",
            Self::P5 => "p5",
        }
    }
}

/// Classification of a frame by the algebra class of its complex algebra
/// and by the individual frame conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassReport {
    /// complex algebra is a non-associative relation algebra
    pub na_frame: bool,
    /// complex algebra is a semi-associative relation algebra
    pub sa_frame: bool,
    /// complex algebra is a relation algebra
    pub ra_frame: bool,
    /// satisfies postulates p1–p5 with `I = {0}`
    pub cr_frame: bool,
    /// RA-frame + dense + symmetric with singleton identity
    pub kr_frame: bool,
    /// RA-frame + dense + commutative
    pub tr_frame: bool,
    /// per-condition truth values, indexed like [`ALL_CONDITIONS`]
    pub conditions: Vec<(ConditionName, bool)>,
}

/// A finite frame together with precomputed composition tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    n: usize,
    star: Vec<usize>,
    identity: SubsetValue,
    triples: Vec<(usize, usize, usize)>,
    /// cube[x][y][z] flattened to x*n*n + y*n + z
    cube: Vec<bool>,
    /// compose_table[x][y] = mask of all z with (x,y,z) in R
    compose_table: Vec<Vec<SubsetValue>>,
    /// full_compose[X][Y] for small carriers (n ≤ 10); empty otherwise
    full_compose: Vec<SubsetValue>,
    /// converse_table[X] for small carriers; empty otherwise
    converse_table: Vec<SubsetValue>,
    /// element display names (defaults to decimal indices)
    names: Vec<String>,
    /// optional frame name
    pub name: Option<String>,
}

impl Frame {
    /// Build a frame from its parts. Element names default to indices.
    pub fn new(
        n: usize,
        star: Vec<usize>,
        identity: &[usize],
        triples: Vec<(usize, usize, usize)>,
    ) -> Result<Frame, FrameError> {
        let names = (0..n).map(|i| i.to_string()).collect();
        Frame::with_names(n, star, identity, triples, names, None)
    }

    /// Build a frame with explicit element display names.
    pub fn with_names(
        n: usize,
        star: Vec<usize>,
        identity: &[usize],
        triples: Vec<(usize, usize, usize)>,
        names: Vec<String>,
        name: Option<String>,
    ) -> Result<Frame, FrameError> {
        if n == 0 {
            return Err(FrameError::Empty);
        }
        if n > MAX_CARRIER {
            return Err(FrameError::TooLarge(n));
        }
        if star.len() != n || star.iter().any(|&s| s >= n) {
            return Err(FrameError::BadStar);
        }
        for x in 0..n {
            if star[star[x]] != x {
                return Err(FrameError::BadStar);
            }
        }
        let mut id_mask: SubsetValue = 0;
        for &e in identity {
            if e >= n {
                return Err(FrameError::BadElement(e));
            }
            id_mask |= 1 << e;
        }
        let mut cube = vec![false; n * n * n];
        let mut compose_table = vec![vec![0 as SubsetValue; n]; n];
        let mut dedup = Vec::new();
        for &(x, y, z) in &triples {
            if x >= n || y >= n || z >= n {
                return Err(FrameError::BadElement(x.max(y).max(z)));
            }
            let idx = (x * n + y) * n + z;
            if !cube[idx] {
                cube[idx] = true;
                compose_table[x][y] |= 1 << z;
                dedup.push((x, y, z));
            }
        }
        dedup.sort_unstable();
        let (full_compose, converse_table) = if n <= 10 {
            let size = 1usize << n;
            let mut full = vec![0 as SubsetValue; size * size];
            for xm in 0..size {
                for ym in 0..size {
                    let mut acc: SubsetValue = 0;
                    let mut xs = xm;
                    while xs != 0 {
                        let x = xs.trailing_zeros() as usize;
                        xs &= xs - 1;
                        let mut ys = ym;
                        while ys != 0 {
                            let y = ys.trailing_zeros() as usize;
                            ys &= ys - 1;
                            acc |= compose_table[x][y];
                        }
                    }
                    full[xm * size + ym] = acc;
                }
            }
            let mut conv = vec![0 as SubsetValue; size];
            for xm in 0..size {
                let mut acc: SubsetValue = 0;
                let mut xs = xm;
                while xs != 0 {
                    let x = xs.trailing_zeros() as usize;
                    xs &= xs - 1;
                    acc |= 1 << star[x];
                }
                conv[xm] = acc;
            }
            (full, conv)
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(Frame {
            n,
            star,
            identity: id_mask,
            triples: dedup,
            cube,
            compose_table,
            full_compose,
            converse_table,
            names,
            name,
        })
    }

    /// Carrier size.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Mask covering the whole carrier.
    pub fn universe(&self) -> SubsetValue {
        if self.n == 32 {
            !0
        } else {
            (1 << self.n) - 1
        }
    }

    /// The identity subset `I` as a mask.
    pub fn identity_set(&self) -> SubsetValue {
        self.identity
    }

    /// The star involution.
    pub fn star(&self) -> &[usize] {
        &self.star
    }

    /// The triples of `R`, sorted.
    pub fn triples(&self) -> &[(usize, usize, usize)] {
        &self.triples
    }

    /// Whether `(x,y,z) ∈ R`.
    pub fn has(&self, x: usize, y: usize, z: usize) -> bool {
        self.cube[(x * self.n + y) * self.n + z]
    }

    /// Composition mask of the singletons `{x} ; {y}`.
    pub fn comp1(&self, x: usize, y: usize) -> SubsetValue {
        self.compose_table[x][y]
    }

    /// Element display name.
    pub fn element_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    /// Look up an element by display name or decimal index.
    pub fn element_by_name(&self, s: &str) -> Option<usize> {
        if let Some(i) = self.names.iter().position(|n| n == s) {
            return Some(i);
        }
        s.parse::<usize>().ok().filter(|&i| i < self.n)
    }

    /// Render a subset mask with element names, e.g. `{a,c}`.
    pub fn subset_name(&self, mask: SubsetValue) -> String {
        let mut out = String::from("{");
        let mut first = true;
        for i in 0..self.n {
            if mask >> i & 1 == 1 {
                if !first {
                    out.push(',');
                }
                first = false;
                out.push_str(&self.names[i]);
            }
        }
        out.push('}');
        out
    }

    // -- complex-algebra operations --------------------------------------

    /// `X ∪ Y`.
    #[inline]
    pub fn union(&self, x: SubsetValue, y: SubsetValue) -> SubsetValue {
        x | y
    }

    /// Complement relative to the carrier.
    #[inline]
    pub fn complement(&self, x: SubsetValue) -> SubsetValue {
        !x & self.universe()
    }

    /// `X ; Y = {z : (x,y,z) ∈ R, x ∈ X, y ∈ Y}`.
    #[inline]
    pub fn compose(&self, x: SubsetValue, y: SubsetValue) -> SubsetValue {
        if !self.full_compose.is_empty() {
            return self.full_compose[(x as usize) << self.n | y as usize];
        }
        let mut acc: SubsetValue = 0;
        let mut xs = x;
        while xs != 0 {
            let xe = xs.trailing_zeros() as usize;
            xs &= xs - 1;
            let row = &self.compose_table[xe];
            let mut ys = y;
            while ys != 0 {
                let ye = ys.trailing_zeros() as usize;
                ys &= ys - 1;
                acc |= row[ye];
            }
        }
        acc
    }

    /// `X˘ = {⋆z : z ∈ X}`.
    #[inline]
    pub fn converse(&self, x: SubsetValue) -> SubsetValue {
        if !self.converse_table.is_empty() {
            return self.converse_table[x as usize];
        }
        let mut acc: SubsetValue = 0;
        let mut xs = x;
        while xs != 0 {
            let xe = xs.trailing_zeros() as usize;
            xs &= xs - 1;
            acc |= 1 << self.star[xe];
        }
        acc
    }

    // -- frame conditions -------------------------------------------------

    /// Check one of the universally quantified frame conditions.
    pub fn check_condition(&self, c: ConditionName) -> bool {
        let n = self.n;
        let st = |x: usize| self.star[x];
        match c {
            ConditionName::LeftRotation => self
                .triples
                .iter()
                .all(|&(x, y, z)| self.has(y, st(z), st(x))),
            ConditionName::RightRotation => self
                .triples
                .iter()
                .all(|&(x, y, z)| self.has(st(z), x, st(y))),
            ConditionName::CenterReflection => self
                .triples
                .iter()
                .all(|&(x, y, z)| self.has(st(y), st(x), st(z))),
            ConditionName::LeftReflection => self
                .triples
                .iter()
                .all(|&(x, y, z)| self.has(st(x), z, y)),
            ConditionName::RightReflection => self
                .triples
                .iter()
                .all(|&(x, y, z)| self.has(z, st(y), x)),
            ConditionName::Identity => {
                // x = y iff R x u y for some u in I
                for x in 0..n {
                    for y in 0..n {
                        let witnessed = (self.compose_table[x].iter().enumerate())
                            .any(|(u, _)| self.identity >> u & 1 == 1 && self.has(x, u, y));
                        if witnessed != (x == y) {
                            return false;
                        }
                    }
                }
                true
            }
            ConditionName::Involution | ConditionName::P4 => {
                (0..n).all(|x| st(st(x)) == x)
            }
            ConditionName::SemiPasch => {
                for v in 0..n {
                    for w in 0..n {
                        for y in 0..n {
                            for z in 0..n {
                                let hyp = (0..n).any(|x| self.has(v, w, x) && self.has(x, y, z));
                                if hyp && !(0..n).any(|u| self.has(v, u, z)) {
                                    return false;
                                }
                            }
                        }
                    }
                }
                true
            }
            ConditionName::Pasch => {
                for v in 0..n {
                    for w in 0..n {
                        for y in 0..n {
                            for z in 0..n {
                                let hyp = (0..n).any(|x| self.has(v, w, x) && self.has(x, y, z));
                                if hyp
                                    && !(0..n).any(|u| self.has(v, u, z) && self.has(w, y, u))
                                {
                                    return false;
                                }
                            }
                        }
                    }
                }
                true
            }
            ConditionName::Dense | ConditionName::P3 => (0..n).all(|x| self.has(x, x, x)),
            ConditionName::Comm => self
                .triples
                .iter()
                .all(|&(x, y, z)| self.has(y, x, z)),
            ConditionName::Symm => (0..n).all(|x| st(x) == x),
            ConditionName::P1 => {
                if self.identity != 1 {
                    return false;
                }
                (0..n).all(|a| (0..n).all(|b| self.has(0, a, b) == (a == b)))
            }
            ConditionName::P2 => {
                for a in 0..n {
                    for b in 0..n {
                        for cc in 0..n {
                            for d in 0..n {
                                let lhs =
                                    (0..n).any(|x| self.has(a, b, x) && self.has(x, cc, d));
                                let rhs =
                                    (0..n).any(|y| self.has(a, cc, y) && self.has(y, b, d));
                                if lhs != rhs {
                                    return false;
                                }
                            }
                        }
                    }
                }
                true
            }
            ConditionName::P5 => self.triples.iter().all(|&(a, b, c)| {
                self.has(a, st(c), st(b))
            }) && (0..n).all(|a| {
                (0..n).all(|b| {
                    (0..n).all(|c| !self.has(a, st(c), st(b)) || self.has(a, b, c))
                })
            }),
        }
    }

    /// Classify the frame by algebra class and per-condition results.
    pub fn classify(&self) -> ClassReport {
        let conditions: Vec<(ConditionName, bool)> = ALL_CONDITIONS
            .iter()
            .map(|&c| (c, self.check_condition(c)))
            .collect();
        let get = |c: ConditionName| {
            conditions
                .iter()
                .find(|(name, _)| *name == c)
                .map(|&(_, v)| v)
                .unwrap()
        };
        let na = get(ConditionName::LeftReflection)
            && get(ConditionName::RightReflection)
            && get(ConditionName::Identity);
        let sa = na && get(ConditionName::SemiPasch);
        let ra = na && get(ConditionName::Pasch);
        let cr = self.identity == 1
            && get(ConditionName::P1)
            && get(ConditionName::P2)
            && get(ConditionName::P3)
            && get(ConditionName::P4)
            && get(ConditionName::P5);
        let kr = ra
            && get(ConditionName::Dense)
            && get(ConditionName::Symm)
            && self.identity.count_ones() == 1;
        let tr = ra && get(ConditionName::Dense) && get(ConditionName::Comm);
        ClassReport {
            na_frame: na,
            sa_frame: sa,
            ra_frame: ra,
            cr_frame: cr,
            kr_frame: kr,
            tr_frame: tr,
            conditions,
        }
    }

    // -- serialization ----------------------------------------------------

    /// Serialize to the text frame-file format.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "frame {}", self.name.as_deref().unwrap_or("unnamed")).unwrap();
        writeln!(out, "elements {}", self.n).unwrap();
        let star: Vec<String> = self.star.iter().map(|s| s.to_string()).collect();
        writeln!(out, "star {}", star.join(" ")).unwrap();
        let ids: Vec<String> = (0..self.n)
            .filter(|&i| self.identity >> i & 1 == 1)
            .map(|i| i.to_string())
            .collect();
        writeln!(out, "identity {}", ids.join(" ")).unwrap();
        writeln!(out, "triples").unwrap();
        for &(x, y, z) in &self.triples {
            writeln!(out, "{x} {y} {z}").unwrap();
        }
        writeln!(out, "end").unwrap();
        out
    }

    /// Parse the text frame-file format:
    ///
    /// ```text
    /// frame <name>
    /// elements <n>
    /// star <img0> <img1> ... <img(n-1)>
    /// identity <e0> [e1 ...]
    /// triples
    /// <x> <y> <z>
    /// ...
    /// end
    /// ```
    ///
    /// Blank lines and `#` comments are permitted anywhere.
    pub fn from_file_string(text: &str) -> Result<Frame, FrameError> {
        let mut name = None;
        let mut n: Option<usize> = None;
        let mut star: Option<Vec<usize>> = None;
        let mut identity: Option<Vec<usize>> = None;
        let mut triples: Vec<(usize, usize, usize)> = Vec::new();
        let mut in_triples = false;
        let mut ended = false;
        let err = |line: usize, message: &str| FrameError::Parse {
            line,
            message: message.to_string(),
        };
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if ended {
                return Err(err(lineno, "content after end directive"));
            }
            let mut words = line.split_whitespace();
            let head = words.next().unwrap();
            if in_triples {
                if head == "end" {
                    in_triples = false;
                    ended = true;
                    continue;
                }
                let x: usize = head.parse().map_err(|_| err(lineno, "bad triple"))?;
                let y: usize = words
                    .next()
                    .ok_or_else(|| err(lineno, "triple needs three indices"))?
                    .parse()
                    .map_err(|_| err(lineno, "bad triple"))?;
                let z: usize = words
                    .next()
                    .ok_or_else(|| err(lineno, "triple needs three indices"))?
                    .parse()
                    .map_err(|_| err(lineno, "bad triple"))?;
                if words.next().is_some() {
                    return Err(err(lineno, "triple has extra fields"));
                }
                triples.push((x, y, z));
                continue;
            }
            match head {
                "frame" => name = Some(words.collect::<Vec<_>>().join(" ")),
                "elements" => {
                    let v = words
                        .next()
                        .ok_or_else(|| err(lineno, "elements needs a count"))?
                        .parse()
                        .map_err(|_| err(lineno, "bad element count"))?;
                    n = Some(v);
                }
                "star" => {
                    let v: Result<Vec<usize>, _> = words.map(|w| w.parse()).collect();
                    star = Some(v.map_err(|_| err(lineno, "bad star image"))?);
                }
                "identity" => {
                    let v: Result<Vec<usize>, _> = words.map(|w| w.parse()).collect();
                    identity = Some(v.map_err(|_| err(lineno, "bad identity element"))?);
                }
                "triples" => in_triples = true,
                other => {
                    return Err(FrameError::Parse {
                        line: lineno,
                        message: format!("unknown directive {other:?}"),
                    })
                }
            }
        }
        let n = n.ok_or_else(|| err(0, "missing elements directive"))?;
        let star = star.ok_or_else(|| err(0, "missing star directive"))?;
        let identity = identity.ok_or_else(|| err(0, "missing identity directive"))?;
        let mut frame = Frame::new(n, star, &identity, triples)?;
        frame.name = name;
        Ok(frame)
    }

    /// Render the composition table of singletons, in the style of the
    /// printed example tables: one row per pair of non-identity-row
    /// elements plus the identity rows.
    pub fn composition_table_string(&self) -> String {
        let mut out = String::new();
        for x in 0..self.n {
            for y in 0..self.n {
                writeln!(
                    out,
                    "{{{}}};{{{}}} = {}",
                    self.names[x],
                    self.names[y],
                    self.subset_name(self.compose_table[x][y])
                )
                .unwrap();
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

/// The pair frame on a base of size `m`: carrier = ordered pairs over the
/// base, `R = {((x,y),(y,z),(x,z))}`, star swaps pair coordinates, and the
/// identity subset is the diagonal.  Its complex algebra is the algebra of
/// all binary relations on the base.
pub fn make_pair_frame(m: usize) -> Result<Frame, FrameError> {
    if m == 0 {
        return Err(FrameError::Empty);
    }
    let n = m * m;
    if n > MAX_CARRIER {
        return Err(FrameError::TooLarge(n));
    }
    let enc = |x: usize, y: usize| x * m + y;
    let mut triples = Vec::new();
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                triples.push((enc(x, y), enc(y, z), enc(x, z)));
            }
        }
    }
    let mut star = vec![0; n];
    let mut names = vec![String::new(); n];
    for x in 0..m {
        for y in 0..m {
            star[enc(x, y)] = enc(y, x);
            names[enc(x, y)] = format!("{x}{y}");
        }
    }
    let identity: Vec<usize> = (0..m).map(|x| enc(x, x)).collect();
    Frame::with_names(n, star, &identity, triples, names, Some(format!("pair{m}")))
}

/// The frame of the cyclic group of order `m`: carrier `Z_m`,
/// `R = {(x, y, x+y mod m)}`, star = negation, identity subset `{0}`.
pub fn make_cyclic_group_frame(m: usize) -> Result<Frame, FrameError> {
    if m == 0 {
        return Err(FrameError::Empty);
    }
    if m > MAX_CARRIER {
        return Err(FrameError::TooLarge(m));
    }
    let mut triples = Vec::new();
    for x in 0..m {
        for y in 0..m {
            triples.push((x, y, (x + y) % m));
        }
    }
    let star: Vec<usize> = (0..m).map(|x| (m - x) % m).collect();
    let mut f = Frame::new(m, star, &[0], triples)?;
    f.name = Some(format!("z{m}"));
    Ok(f)
}

/// Build a frame from a symmetric description: element names, star map
/// given by name, and the composition of non-identity singletons given as
/// `(x, y, result-set)` entries by name.  Identity rows (`{0};{x}={x}` and
/// `{x};{0}={x}`) are added automatically, with element `0` the identity.
fn frame_from_table(
    frame_name: &str,
    names: &[&str],
    star_pairs: &[(usize, usize)],
    table: &[(usize, usize, &[usize])],
) -> Frame {
    let n = names.len();
    let mut star: Vec<usize> = (0..n).collect();
    for &(a, b) in star_pairs {
        star[a] = b;
        star[b] = a;
    }
    let mut triples = Vec::new();
    for x in 0..n {
        triples.push((0, x, x));
        triples.push((x, 0, x));
    }
    for &(x, y, zs) in table {
        for &z in zs {
            triples.push((x, y, z));
        }
    }
    Frame::with_names(
        n,
        star,
        &[0],
        triples,
        names.iter().map(|s| s.to_string()).collect(),
        Some(frame_name.to_string()),
    )
    .expect("builtin frame table is well-formed")
}

/// Return one of the built-in example frames `k1`–`k5`.
///
/// * `k1` — four elements `{0,a,b,c}`, star = identity; a dense symmetric
///   frame whose complex algebra is semi-associative but not associative.
/// * `k2` — four elements `{0,a,b,b*}` with `b˘ = b*`; its complex algebra
///   is a dense representable relation algebra that is not commutative.
/// * `k3` — the frame of the two-element cyclic group (not dense).
/// * `k4` — three elements `{0,a,a*}` with `a˘ = a*`; satisfies p1–p5 but
///   fails the reflection conditions, so its complex algebra is not
///   semi-associative.
/// * `k5` — four elements `{0,a,b,c}`, star = identity, 28 triples; the
///   smallest dense symmetric associative frame that invalidates the
///   six-variable and seven-variable test predicates used by the census
///   commands.
pub fn builtin_frame(name: &str) -> Result<Frame, FrameError> {
    match name {
        "k1" => {
            // star = identity, symmetric composition:
            // a;a={0,a}  a;b={c}  a;c={b}  b;b={0,b}  b;c={a}  c;c={0,c}
            const A: usize = 1;
            const B: usize = 2;
            const C: usize = 3;
            Ok(frame_from_table(
                "k1",
                &["0", "a", "b", "c"],
                &[],
                &[
                    (A, A, &[0, A]),
                    (A, B, &[C]),
                    (B, A, &[C]),
                    (A, C, &[B]),
                    (C, A, &[B]),
                    (B, B, &[0, B]),
                    (B, C, &[A]),
                    (C, B, &[A]),
                    (C, C, &[0, C]),
                ],
            ))
        }
        "k2" => {
            // star fixes 0 and a, swaps b and b*.
            const A: usize = 1;
            const B: usize = 2;
            const BS: usize = 3;
            Ok(frame_from_table(
                "k2",
                &["0", "a", "b", "b*"],
                &[(B, BS)],
                &[
                    (A, A, &[0, A, B, BS]),
                    (A, B, &[A, B]),
                    (A, BS, &[A]),
                    (B, A, &[A]),
                    (B, B, &[B]),
                    (B, BS, &[0, A, B, BS]),
                    (BS, A, &[A, BS]),
                    (BS, B, &[0, B, BS]),
                    (BS, BS, &[BS]),
                ],
            ))
        }
        "k3" => {
            let mut f = make_cyclic_group_frame(2)?;
            f.name = Some("k3".to_string());
            Ok(Frame::with_names(
                2,
                f.star.clone(),
                &[0],
                f.triples.clone(),
                vec!["0".to_string(), "a".to_string()],
                Some("k3".to_string()),
            )?)
        }
        "k4" => {
            // star fixes 0, swaps a and a*.
            const A: usize = 1;
            const AS: usize = 2;
            Ok(frame_from_table(
                "k4",
                &["0", "a", "a*"],
                &[(A, AS)],
                &[
                    (A, A, &[A, AS]),
                    (A, AS, &[0, A, AS]),
                    (AS, A, &[0, A, AS]),
                    (AS, AS, &[AS]),
                ],
            ))
        }
        "k5" => {
            // star = identity, symmetric composition:
            // a;a={0,a,c} a;b={b,c} a;c={a,b} b;b={0,a,b} b;c={a,c} c;c={0,b,c}
            const A: usize = 1;
            const B: usize = 2;
            const C: usize = 3;
            Ok(frame_from_table(
                "k5",
                &["0", "a", "b", "c"],
                &[],
                &[
                    (A, A, &[0, A, C]),
                    (A, B, &[B, C]),
                    (B, A, &[B, C]),
                    (A, C, &[A, B]),
                    (C, A, &[A, B]),
                    (B, B, &[0, A, B]),
                    (B, C, &[A, C]),
                    (C, B, &[A, C]),
                    (C, C, &[0, B, C]),
                ],
            ))
        }
        other => Err(FrameError::UnknownBuiltin(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_frame_shapes() {
        let f = make_pair_frame(1).unwrap();
        assert_eq!(f.n(), 1);
        assert_eq!(f.triples().len(), 1);
        assert_eq!(f.star(), &[0]);

        let f = make_pair_frame(3).unwrap();
        assert_eq!(f.n(), 9);
        assert_eq!(f.triples().len(), 27);
        for c in [
            ConditionName::LeftRotation,
            ConditionName::RightRotation,
            ConditionName::CenterReflection,
            ConditionName::LeftReflection,
            ConditionName::RightReflection,
            ConditionName::Identity,
            ConditionName::Involution,
            ConditionName::SemiPasch,
            ConditionName::Pasch,
        ] {
            assert!(f.check_condition(c), "pair frame fails {c:?}");
        }
    }

    #[test]
    fn cyclic_group_frames() {
        let f = make_cyclic_group_frame(1).unwrap();
        assert!(f.check_condition(ConditionName::Dense));
        let f = make_cyclic_group_frame(2).unwrap();
        // {a};{a} = {0}
        assert_eq!(f.comp1(1, 1), 1);
        assert!(!f.check_condition(ConditionName::Dense));
        let f = make_cyclic_group_frame(3).unwrap();
        assert_eq!(f.star(), &[0, 2, 1]);
        assert!(f.check_condition(ConditionName::Comm));
        assert!(!f.check_condition(ConditionName::Symm));
        for m in 1..=12 {
            let f = make_cyclic_group_frame(m).unwrap();
            for c in [
                ConditionName::LeftRotation,
                ConditionName::RightRotation,
                ConditionName::CenterReflection,
                ConditionName::LeftReflection,
                ConditionName::RightReflection,
                ConditionName::Identity,
                ConditionName::Involution,
                ConditionName::SemiPasch,
                ConditionName::Pasch,
            ] {
                assert!(f.check_condition(c), "group frame {m} fails {c:?}");
            }
        }
    }

    #[test]
    fn k1_table_and_class() {
        let f = builtin_frame("k1").unwrap();
        let a = 0b0010;
        let b = 0b0100;
        let c = 0b1000;
        assert_eq!(f.compose(a, b), c);
        assert!(f.check_condition(ConditionName::SemiPasch));
        assert!(!f.check_condition(ConditionName::Pasch));
        let report = f.classify();
        assert!(report.sa_frame && !report.ra_frame);
        assert!(f.check_condition(ConditionName::Dense));
        assert!(f.check_condition(ConditionName::Symm));
    }

    #[test]
    fn k2_is_noncommutative_ra_frame() {
        let f = builtin_frame("k2").unwrap();
        let a = 0b0010;
        let b = 0b0100;
        assert_eq!(f.compose(a, b), 0b0110); // {a,b}
        assert_eq!(f.compose(b, a), 0b0010); // {a}
        let report = f.classify();
        assert!(report.ra_frame);
        assert!(!f.check_condition(ConditionName::Comm));
        assert!(f.check_condition(ConditionName::Dense));
    }

    #[test]
    fn k4_fails_reflections() {
        let f = builtin_frame("k4").unwrap();
        assert!(!f.check_condition(ConditionName::LeftReflection));
        assert!(!f.check_condition(ConditionName::RightReflection));
        assert!(!f.check_condition(ConditionName::CenterReflection));
        let report = f.classify();
        assert!(report.cr_frame);
        assert!(!report.sa_frame);
    }

    #[test]
    fn k5_shape() {
        let f = builtin_frame("k5").unwrap();
        assert_eq!(f.triples().len(), 28);
        let report = f.classify();
        assert!(report.kr_frame && report.tr_frame);
    }

    #[test]
    fn frame_file_round_trip() {
        let f = builtin_frame("k2").unwrap();
        let text = f.to_file_string();
        let g = Frame::from_file_string(&text).unwrap();
        assert_eq!(f.n(), g.n());
        assert_eq!(f.star(), g.star());
        assert_eq!(f.identity_set(), g.identity_set());
        assert_eq!(f.triples(), g.triples());
    }

    #[test]
    fn frame_file_rejects_malformed() {
        assert!(Frame::from_file_string("frame x\nelements 2\n").is_err());
        let bad = "frame x\nelements 2\nstar 1 0\nidentity 0\ntriples\n0 0\nend\n";
        assert!(matches!(
            Frame::from_file_string(bad),
            Err(FrameError::Parse { line: 6, .. })
        ));
    }

    #[test]
    fn compose_with_empty_is_empty() {
        for name in ["k1", "k2", "k3", "k4", "k5"] {
            let f = builtin_frame(name).unwrap();
            assert_eq!(f.compose(f.universe(), 0), 0);
            assert_eq!(f.compose(0, f.universe()), 0);
        }
    }
}
