//! L-topological systems built from formulas, their L-topologies, and the
//! propositional theory of a finite L-topological space.
//!
//! Formula classes are represented by their extents: the vector of grades a
//! formula receives at each point of a finite [`PointSet`]. Two formulas are
//! identified exactly when their extents agree, and the classes are ordered
//! pointwise. Starting from a finite list of generators, the extents are
//! closed under pointwise meet and join; the resulting vector set is the
//! algebra of the system and, read column-wise, its L-topology.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::frame::{build_frame_with, Elem, FiniteFrame, FrameConfig, FrameError};
use crate::semantics::{tuples, Assignment, Interpretation, SemanticsError};
use crate::syntax::{lex, Formula, SyntaxError, Tok, Var};

/// Default cap on the number of vectors in a closure.
pub const DEFAULT_CLOSURE_CAP: usize = 10_000;

/// Up to this many algebra elements or opens, subset-indexed checks and
/// axioms range over every subset.
pub const FULL_SUBSET_BOUND: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LindenbaumError {
    #[error("a point set must be nonempty")]
    EmptyPointSet,
    #[error("at least one generator is required")]
    NoGenerators,
    #[error("closure exceeded {cap} vectors")]
    ClosureOverflow { cap: usize },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("closure is not a frame: {0}")]
    Frame(#[from] FrameError),
}

/// The points `X`: a nonempty list of assignments over one interpretation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<Assignment>,
}

impl PointSet {
    pub fn new(points: Vec<Assignment>) -> Result<Self, LindenbaumError> {
        if points.is_empty() {
            return Err(LindenbaumError::EmptyPointSet);
        }
        Ok(PointSet { points })
    }

    /// Every assignment of the free variables of `formulas` into the domain,
    /// with the default fixed at the first element, in lexicographic order.
    pub fn over_free_vars(interp: &Interpretation, formulas: &[Formula]) -> PointSet {
        let vars: Vec<Var> = formulas
            .iter()
            .flat_map(Formula::free_vars)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let points = tuples(interp.domain_size(), vars.len())
            .map(|values| {
                vars.iter()
                    .zip(values)
                    .fold(interp.base_assignment(), |s, (&v, d)| s.with(v, d))
            })
            .collect();
        PointSet { points }
    }

    pub fn points(&self) -> &[Assignment] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A function from points to frame elements, stored in point order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtVector(pub Vec<Elem>);

impl ExtVector {
    pub fn constant(len: usize, value: Elem) -> Self {
        ExtVector(vec![value; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn meet(&self, other: &ExtVector, frame: &FiniteFrame) -> ExtVector {
        ExtVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| frame.meet(a, b))
                .collect(),
        )
    }

    pub fn join(&self, other: &ExtVector, frame: &FiniteFrame) -> ExtVector {
        ExtVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| frame.join(a, b))
                .collect(),
        )
    }

    pub fn leq(&self, other: &ExtVector, frame: &FiniteFrame) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| frame.leq(a, b))
    }

    /// `(h,1)`-style rendering with frame ids.
    pub fn render(&self, frame: &FiniteFrame) -> String {
        let ids: Vec<&str> = self.0.iter().map(|&e| frame.id(e)).collect();
        format!("({})", ids.join(","))
    }
}

/// `ext([phi])`: the grade of `phi` at each point.
pub fn extent(
    interp: &Interpretation,
    points: &PointSet,
    phi: &Formula,
) -> Result<ExtVector, SemanticsError> {
    points
        .points
        .iter()
        .map(|s| interp.eval(s, phi))
        .collect::<Result<Vec<_>, _>>()
        .map(ExtVector)
}

/// Closes `seeds` together with the constant top and bottom vectors under
/// pointwise binary meet and join. In a finite set, closure under binary
/// joins plus the empty join is closure under all joins.
pub fn close_vectors(
    frame: &FiniteFrame,
    len: usize,
    seeds: impl IntoIterator<Item = ExtVector>,
    cap: usize,
) -> Result<BTreeSet<ExtVector>, LindenbaumError> {
    let mut set: BTreeSet<ExtVector> = seeds.into_iter().collect();
    set.insert(ExtVector::constant(len, frame.top()));
    set.insert(ExtVector::constant(len, frame.bot()));
    if set.len() > cap {
        return Err(LindenbaumError::ClosureOverflow { cap });
    }
    let mut frontier: Vec<ExtVector> = set.iter().cloned().collect();
    while !frontier.is_empty() {
        let snapshot: Vec<ExtVector> = set.iter().cloned().collect();
        let mut fresh = Vec::new();
        for new in &frontier {
            for old in &snapshot {
                for v in [new.meet(old, frame), new.join(old, frame)] {
                    if !set.contains(&v) {
                        set.insert(v.clone());
                        if set.len() > cap {
                            return Err(LindenbaumError::ClosureOverflow { cap });
                        }
                        fresh.push(v);
                    }
                }
            }
        }
        frontier = fresh;
    }
    Ok(set)
}

/// A concrete system `(X, |=, A)`: `rel(x, a)` is the grade in `L` with which
/// point `x` satisfies algebra element `a`. Stored as a dense grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopoSystem {
    point_ids: Vec<String>,
    value_frame: FiniteFrame,
    alg: FiniteFrame,
    rel: Vec<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("system needs at least one point")]
    NoPoints,
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("relation has {found} cells, expected {expected}")]
    Shape { expected: usize, found: usize },
    #[error("relation value #{0} is not in the value frame")]
    BadValue(usize),
}

impl TopoSystem {
    /// `rel` is row-major: `rel[x * |alg| + a]`.
    pub fn new(
        point_ids: Vec<String>,
        value_frame: FiniteFrame,
        alg: FiniteFrame,
        rel: Vec<Elem>,
    ) -> Result<Self, SystemError> {
        if point_ids.is_empty() {
            return Err(SystemError::NoPoints);
        }
        let mut seen = BTreeSet::new();
        for p in &point_ids {
            if !seen.insert(p) {
                return Err(SystemError::DuplicatePoint(p.clone()));
            }
        }
        let expected = point_ids.len() * alg.len();
        if rel.len() != expected {
            return Err(SystemError::Shape {
                expected,
                found: rel.len(),
            });
        }
        if let Some(bad) = rel.iter().find(|e| e.index() >= value_frame.len()) {
            return Err(SystemError::BadValue(bad.index()));
        }
        Ok(TopoSystem {
            point_ids,
            value_frame,
            alg,
            rel,
        })
    }

    pub fn point_ids(&self) -> &[String] {
        &self.point_ids
    }

    pub fn value_frame(&self) -> &FiniteFrame {
        &self.value_frame
    }

    pub fn alg(&self) -> &FiniteFrame {
        &self.alg
    }

    pub fn rel(&self, point: usize, a: Elem) -> Elem {
        self.rel[point * self.alg.len() + a.index()]
    }

    /// `rel(., a)`: the extent of an algebra element.
    pub fn column(&self, a: Elem) -> ExtVector {
        ExtVector((0..self.point_ids.len()).map(|x| self.rel(x, a)).collect())
    }
}

/// Output of [`build_lindenbaum`].
#[derive(Clone, Debug)]
pub struct Lindenbaum {
    pub system: TopoSystem,
    pub points: PointSet,
    /// Generator `i` and the algebra element of its class.
    pub class_map: Vec<(Formula, Elem)>,
}

/// Builds `(X, |=', A/~)` restricted to the subframe generated by
/// `generators`. Algebra elements are named `a0, a1, ...` in vector order;
/// points are named `s0, s1, ...`.
pub fn build_lindenbaum(
    interp: &Interpretation,
    points: &PointSet,
    generators: &[Formula],
    cap: usize,
) -> Result<Lindenbaum, LindenbaumError> {
    if generators.is_empty() {
        return Err(LindenbaumError::NoGenerators);
    }
    let frame = interp.frame();
    let extents = generators
        .iter()
        .map(|g| extent(interp, points, g))
        .collect::<Result<Vec<_>, _>>()?;
    let closure: Vec<ExtVector> = close_vectors(frame, points.len(), extents.iter().cloned(), cap)?
        .into_iter()
        .collect();

    let ids: Vec<String> = (0..closure.len()).map(|i| format!("a{i}")).collect();
    let mut pairs = Vec::new();
    for (i, u) in closure.iter().enumerate() {
        for (j, v) in closure.iter().enumerate() {
            if i != j && u.leq(v, frame) {
                pairs.push((ids[i].clone(), ids[j].clone()));
            }
        }
    }
    let config = FrameConfig {
        size_cap: cap.max(2),
        ..FrameConfig::default()
    };
    let alg = build_frame_with(&ids, &pairs, &config)?;

    let k = closure.len();
    let mut rel = vec![frame.bot(); points.len() * k];
    for (a, v) in closure.iter().enumerate() {
        for (x, &g) in v.0.iter().enumerate() {
            rel[x * k + a] = g;
        }
    }
    let point_ids = (0..points.len()).map(|i| format!("s{i}")).collect();
    let system = TopoSystem::new(point_ids, frame.clone(), alg, rel).expect("shape is consistent");

    let index: BTreeMap<&ExtVector, usize> =
        closure.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let class_map = generators
        .iter()
        .zip(&extents)
        .map(|(g, v)| (g.clone(), Elem::new(index[v])))
        .collect();
    Ok(Lindenbaum {
        system,
        points: points.clone(),
        class_map,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    Meet,
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub clause: Clause,
    pub point: String,
    pub subset: Vec<String>,
    /// `rel(x, meet S)` or `rel(x, join S)`.
    pub found: String,
    /// The meet or join of the `rel(x, s)`.
    pub expected: String,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.clause {
            Clause::Meet => "meet",
            Clause::Join => "join",
        };
        write!(
            f,
            "{op} clause fails at point {} for S={{{}}}: rel gives {} but the {op} of grades is {}",
            self.point,
            self.subset.join(","),
            self.found,
            self.expected
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    /// Whether every subset of the algebra was examined.
    pub exhaustive: bool,
    pub checked: usize,
    pub violation: Option<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Index subsets of `0..n`: all of them when `n <= FULL_SUBSET_BOUND`,
/// otherwise every subset of size at most 3 plus the full set.
fn policy_subsets(n: usize) -> (bool, Vec<Vec<usize>>) {
    if n <= FULL_SUBSET_BOUND {
        let all = (0..(1usize << n))
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
            .collect();
        return (true, all);
    }
    let mut out = vec![vec![]];
    for a in 0..n {
        out.push(vec![a]);
        for b in (a + 1)..n {
            out.push(vec![a, b]);
            for c in (b + 1)..n {
                out.push(vec![a, b, c]);
            }
        }
    }
    out.push((0..n).collect());
    (false, out)
}

/// Checks that `rel` turns finite meets into meets and joins into joins at
/// every point.
pub fn check_system_axioms(sys: &TopoSystem) -> AxiomReport {
    let alg = &sys.alg;
    let l = &sys.value_frame;
    let (exhaustive, subsets) = policy_subsets(alg.len());
    let mut checked = 0;
    for subset in &subsets {
        let elems: Vec<Elem> = subset.iter().map(|&i| Elem::new(i)).collect();
        let met = alg.meet_all(elems.iter().copied());
        let joined = alg.join_all(elems.iter().copied());
        for x in 0..sys.point_ids.len() {
            for (clause, target) in [(Clause::Meet, met), (Clause::Join, joined)] {
                checked += 1;
                let grades = elems.iter().map(|&s| sys.rel(x, s));
                let expected = match clause {
                    Clause::Meet => l.meet_all(grades),
                    Clause::Join => l.join_all(grades),
                };
                let found = sys.rel(x, target);
                if found != expected {
                    return AxiomReport {
                        exhaustive,
                        checked,
                        violation: Some(AxiomViolation {
                            clause,
                            point: sys.point_ids[x].clone(),
                            subset: elems.iter().map(|&e| alg.id(e).to_string()).collect(),
                            found: l.id(found).to_string(),
                            expected: l.id(expected).to_string(),
                        }),
                    };
                }
            }
        }
    }
    AxiomReport {
        exhaustive,
        checked,
        violation: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpatialReport {
    pub spatial: bool,
    /// Two distinct algebra elements no point tells apart.
    pub witness: Option<(String, String)>,
}

/// A system is spatial when distinct algebra elements always differ at some
/// point.
pub fn is_spatial(sys: &TopoSystem) -> SpatialReport {
    let mut seen: BTreeMap<ExtVector, Elem> = BTreeMap::new();
    for a in sys.alg.elements() {
        if let Some(&b) = seen.get(&sys.column(a)) {
            return SpatialReport {
                spatial: false,
                witness: Some((sys.alg.id(b).to_string(), sys.alg.id(a).to_string())),
            };
        }
        seen.insert(sys.column(a), a);
    }
    SpatialReport {
        spatial: true,
        witness: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("not closed under {op}: {left} {op} {right} = {result} is not open")]
    NotClosed {
        op: &'static str,
        left: String,
        right: String,
        result: String,
    },
    #[error("the constant {0} vector is not open")]
    MissingConstant(&'static str),
    #[error("ext is not a homomorphism: ext({a} {op} {b}) = {found}, expected {expected}")]
    NotHomomorphic {
        op: &'static str,
        a: String,
        b: String,
        found: String,
        expected: String,
    },
    #[error("open `{0}` is listed twice or duplicates another open")]
    DuplicateOpen(String),
    #[error("open `{0}` has the wrong number of points")]
    BadShape(String),
    #[error("open id `{0}` must be an identifier")]
    BadOpenId(String),
    #[error("space needs at least one point")]
    NoPoints,
}

/// A finite L-topological space: L-valued subsets of the points, containing
/// the constant vectors and closed under pointwise meet and join.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LSpace {
    point_ids: Vec<String>,
    value_frame: FiniteFrame,
    opens: Vec<(String, ExtVector)>,
}

fn is_open_id(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphanumeric() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl LSpace {
    pub fn new(
        point_ids: Vec<String>,
        value_frame: FiniteFrame,
        opens: Vec<(String, ExtVector)>,
    ) -> Result<Self, TopologyError> {
        if point_ids.is_empty() {
            return Err(TopologyError::NoPoints);
        }
        let n = point_ids.len();
        let mut ids = BTreeSet::new();
        let mut vectors = BTreeSet::new();
        for (id, v) in &opens {
            if !is_open_id(id) {
                return Err(TopologyError::BadOpenId(id.clone()));
            }
            if v.len() != n || v.0.iter().any(|e| e.index() >= value_frame.len()) {
                return Err(TopologyError::BadShape(id.clone()));
            }
            if !ids.insert(id.clone()) || !vectors.insert(v.clone()) {
                return Err(TopologyError::DuplicateOpen(id.clone()));
            }
        }
        if !vectors.contains(&ExtVector::constant(n, value_frame.bot())) {
            return Err(TopologyError::MissingConstant("bottom"));
        }
        if !vectors.contains(&ExtVector::constant(n, value_frame.top())) {
            return Err(TopologyError::MissingConstant("top"));
        }
        for (_, u) in &opens {
            for (_, v) in &opens {
                for (op, w) in [
                    ("meet", u.meet(v, &value_frame)),
                    ("join", u.join(v, &value_frame)),
                ] {
                    if !vectors.contains(&w) {
                        return Err(TopologyError::NotClosed {
                            op,
                            left: u.render(&value_frame),
                            right: v.render(&value_frame),
                            result: w.render(&value_frame),
                        });
                    }
                }
            }
        }
        Ok(LSpace {
            point_ids,
            value_frame,
            opens,
        })
    }

    pub fn point_ids(&self) -> &[String] {
        &self.point_ids
    }

    pub fn value_frame(&self) -> &FiniteFrame {
        &self.value_frame
    }

    pub fn opens(&self) -> &[(String, ExtVector)] {
        &self.opens
    }

    pub fn open(&self, id: &str) -> Option<&ExtVector> {
        self.opens.iter().find(|(k, _)| k == id).map(|(_, v)| v)
    }

    pub fn vectors(&self) -> BTreeSet<ExtVector> {
        self.opens.iter().map(|(_, v)| v.clone()).collect()
    }
}

/// Reads the L-topology `ext(A)` off a system: one open per distinct
/// column, named `T0, T1, ...`. Also checks that `ext` carries algebra meets
/// and joins to pointwise ones.
pub fn extract_topology(sys: &TopoSystem) -> Result<LSpace, TopologyError> {
    let alg = &sys.alg;
    let l = &sys.value_frame;
    let name = |e: Elem| alg.id(e).to_string();
    for a in alg.elements() {
        for b in alg.elements() {
            let (ca, cb) = (sys.column(a), sys.column(b));
            for (op, combined, expected) in [
                ("meet", alg.meet(a, b), ca.meet(&cb, l)),
                ("join", alg.join(a, b), ca.join(&cb, l)),
            ] {
                let found = sys.column(combined);
                if found != expected {
                    return Err(TopologyError::NotHomomorphic {
                        op,
                        a: name(a),
                        b: name(b),
                        found: found.render(l),
                        expected: expected.render(l),
                    });
                }
            }
        }
    }
    let columns: BTreeSet<ExtVector> = alg.elements().map(|a| sys.column(a)).collect();
    let opens = columns
        .into_iter()
        .enumerate()
        .map(|(i, v)| (format!("T{i}"), v))
        .collect();
    LSpace::new(sys.point_ids.clone(), l.clone(), opens)
}

/// Propositional formula over the atoms `P_T` of a theory.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PropFormula {
    Top,
    Atom(String),
    And(
        alloc::boxed::Box<PropFormula>,
        alloc::boxed::Box<PropFormula>,
    ),
    Join(Vec<PropFormula>),
}

impl PropFormula {
    /// Left-folded conjunction; `top` for an empty list.
    pub fn conjunction(mut items: Vec<PropFormula>) -> PropFormula {
        if items.is_empty() {
            return PropFormula::Top;
        }
        let first = items.remove(0);
        items.into_iter().fold(first, |acc, f| {
            PropFormula::And(alloc::boxed::Box::new(acc), alloc::boxed::Box::new(f))
        })
    }

    fn grade(&self, value: &dyn Fn(&str) -> Option<Elem>, l: &FiniteFrame) -> Option<Elem> {
        Some(match self {
            PropFormula::Top => l.top(),
            PropFormula::Atom(a) => value(a)?,
            PropFormula::And(x, y) => l.meet(x.grade(value, l)?, y.grade(value, l)?),
            PropFormula::Join(ms) => {
                let mut acc = l.bot();
                for m in ms {
                    acc = l.join(acc, m.grade(value, l)?);
                }
                acc
            }
        })
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropFormula::Top => f.write_str("top"),
            PropFormula::Atom(a) => f.write_str(a),
            PropFormula::And(x, y) => write!(f, "({x} /\\ {y})"),
            PropFormula::Join(ms) => {
                f.write_str("\\/[")?;
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{m}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PropSequent {
    pub antecedent: PropFormula,
    pub consequent: PropFormula,
}

impl fmt::Display for PropSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |- {}", self.antecedent, self.consequent)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomPolicy {
    /// Union and intersection axioms for every subset of opens.
    Full,
    /// Subsets of size at most 3, plus the set of all opens.
    Bounded,
}

impl fmt::Display for AxiomPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxiomPolicy::Full => "full",
            AxiomPolicy::Bounded => "bounded",
        })
    }
}

/// Propositional geometric theory of a space: one atom per open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropTheory {
    pub policy: AxiomPolicy,
    pub propositions: Vec<String>,
    pub axioms: Vec<PropSequent>,
}

/// Atom name for an open id.
pub fn proposition_name(open_id: &str) -> String {
    format!("P_{open_id}")
}

/// Emits the inclusion, union and intersection axioms of `space`.
pub fn space_to_theory(space: &LSpace) -> PropTheory {
    let l = &space.value_frame;
    let opens = &space.opens;
    let atom = |i: usize| PropFormula::Atom(proposition_name(&opens[i].0));
    let by_vector: BTreeMap<&ExtVector, usize> =
        opens.iter().enumerate().map(|(i, (_, v))| (v, i)).collect();
    let n_points = space.point_ids.len();

    let mut axioms = Vec::new();
    for (i, (_, u)) in opens.iter().enumerate() {
        for (j, (_, v)) in opens.iter().enumerate() {
            if u.leq(v, l) {
                axioms.push(PropSequent {
                    antecedent: atom(i),
                    consequent: atom(j),
                });
            }
        }
    }
    let (exhaustive, subsets) = policy_subsets(opens.len());
    for subset in &subsets {
        let union = subset
            .iter()
            .fold(ExtVector::constant(n_points, l.bot()), |acc, &i| {
                acc.join(&opens[i].1, l)
            });
        axioms.push(PropSequent {
            antecedent: atom(by_vector[&union]),
            consequent: PropFormula::Join(subset.iter().map(|&i| atom(i)).collect()),
        });
    }
    for subset in &subsets {
        let inter = subset
            .iter()
            .fold(ExtVector::constant(n_points, l.top()), |acc, &i| {
                acc.meet(&opens[i].1, l)
            });
        axioms.push(PropSequent {
            antecedent: PropFormula::conjunction(subset.iter().map(|&i| atom(i)).collect()),
            consequent: atom(by_vector[&inter]),
        });
    }
    PropTheory {
        policy: if exhaustive {
            AxiomPolicy::Full
        } else {
            AxiomPolicy::Bounded
        },
        propositions: opens.iter().map(|(id, _)| proposition_name(id)).collect(),
        axioms,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomFailure {
    pub axiom: usize,
    pub text: String,
    pub antecedent: String,
    pub consequent: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointVerdict {
    pub point: String,
    pub failure: Option<AxiomFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelReport {
    pub points: Vec<PointVerdict>,
    /// Atoms of the theory that name no open of the space.
    pub unknown_atoms: Vec<String>,
}

impl ModelReport {
    pub fn all_ok(&self) -> bool {
        self.unknown_atoms.is_empty() && self.points.iter().all(|p| p.failure.is_none())
    }
}

/// Interprets `P_T` as `T(x)` at each point `x` and checks that every axiom
/// holds as a graded sequent there.
pub fn induced_model_check(space: &LSpace, theory: &PropTheory) -> ModelReport {
    let l = &space.value_frame;
    let by_name: BTreeMap<String, &ExtVector> = space
        .opens
        .iter()
        .map(|(id, v)| (proposition_name(id), v))
        .collect();
    let unknown_atoms: Vec<String> = theory
        .propositions
        .iter()
        .filter(|p| !by_name.contains_key(*p))
        .cloned()
        .collect();
    let points = space
        .point_ids
        .iter()
        .enumerate()
        .map(|(x, point)| {
            let value = |name: &str| by_name.get(name).map(|v| v.0[x]);
            let failure = theory.axioms.iter().enumerate().find_map(|(k, ax)| {
                let a = ax.antecedent.grade(&value, l);
                let c = ax.consequent.grade(&value, l);
                match (a, c) {
                    (Some(a), Some(c)) if l.leq(a, c) => None,
                    (a, c) => Some(AxiomFailure {
                        axiom: k,
                        text: ax.to_string(),
                        antecedent: a.map_or("?".into(), |e| l.id(e).to_string()),
                        consequent: c.map_or("?".into(), |e| l.id(e).to_string()),
                    }),
                }
            });
            PointVerdict {
                point: point.clone(),
                failure,
            }
        })
        .collect();
    ModelReport {
        points,
        unknown_atoms,
    }
}

impl fmt::Display for PropTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# policy: {}", self.policy)?;
        writeln!(f, "# propositions: {}", self.propositions.join(", "))?;
        for ax in &self.axioms {
            writeln!(f, "{ax}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TheoryParseError {
    #[error("line {line}: {message}")]
    Header { line: usize, message: String },
    #[error("line {line}: {source}")]
    Syntax { line: usize, source: SyntaxError },
    #[error("line {line}: undeclared proposition `{name}`")]
    Undeclared { line: usize, name: String },
}

/// Parses the text produced by [`PropTheory`]'s `Display`.
pub fn parse_theory(text: &str) -> Result<PropTheory, TheoryParseError> {
    let mut policy = None;
    let mut propositions: Option<Vec<String>> = None;
    let mut axioms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(p) = comment.strip_prefix("policy:") {
                policy = Some(match p.trim() {
                    "full" => AxiomPolicy::Full,
                    "bounded" => AxiomPolicy::Bounded,
                    other => {
                        return Err(TheoryParseError::Header {
                            line: line_no,
                            message: format!("unknown policy `{other}`"),
                        })
                    }
                });
            } else if let Some(list) = comment.strip_prefix("propositions:") {
                propositions = Some(
                    list.split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(String::from)
                        .collect(),
                );
            }
            continue;
        }
        let declared = propositions
            .as_ref()
            .ok_or_else(|| TheoryParseError::Header {
                line: line_no,
                message: "axiom before the propositions header".into(),
            })?;
        axioms.push(parse_prop_sequent(line, declared, line_no)?);
    }
    let policy = policy.ok_or(TheoryParseError::Header {
        line: 1,
        message: "missing `# policy:` header".into(),
    })?;
    Ok(PropTheory {
        policy,
        propositions: propositions.unwrap_or_default(),
        axioms,
    })
}

fn parse_prop_sequent(
    line: &str,
    declared: &[String],
    line_no: usize,
) -> Result<PropSequent, TheoryParseError> {
    let syntax = |source| TheoryParseError::Syntax {
        line: line_no,
        source,
    };
    let toks = lex(line).map_err(syntax)?;
    let mut pos = 0;
    let antecedent = prop_formula(&toks, &mut pos, declared, line_no)?;
    expect_tok(&toks, &mut pos, &Tok::Turnstile, "`|-`").map_err(syntax)?;
    let consequent = prop_formula(&toks, &mut pos, declared, line_no)?;
    expect_tok(&toks, &mut pos, &Tok::End, "end of line").map_err(syntax)?;
    Ok(PropSequent {
        antecedent,
        consequent,
    })
}

fn expect_tok(
    toks: &[(usize, Tok)],
    pos: &mut usize,
    tok: &Tok,
    name: &'static str,
) -> Result<(), SyntaxError> {
    if toks[*pos].1 == *tok {
        if *pos + 1 < toks.len() {
            *pos += 1;
        }
        Ok(())
    } else {
        Err(SyntaxError::Parse {
            pos: toks[*pos].0,
            expected: vec![name],
            found: toks[*pos].1.describe(),
        })
    }
}

fn prop_formula(
    toks: &[(usize, Tok)],
    pos: &mut usize,
    declared: &[String],
    line_no: usize,
) -> Result<PropFormula, TheoryParseError> {
    let syntax = |source| TheoryParseError::Syntax {
        line: line_no,
        source,
    };
    let (at, tok) = toks[*pos].clone();
    match tok {
        Tok::Ident(word) if word == "top" => {
            *pos += 1;
            Ok(PropFormula::Top)
        }
        Tok::Ident(word) => {
            *pos += 1;
            if declared.contains(&word) {
                Ok(PropFormula::Atom(word))
            } else {
                Err(TheoryParseError::Undeclared {
                    line: line_no,
                    name: word,
                })
            }
        }
        Tok::Vee => {
            *pos += 1;
            expect_tok(toks, pos, &Tok::LBrack, "`[`").map_err(syntax)?;
            let mut members = Vec::new();
            if toks[*pos].1 != Tok::RBrack {
                members.push(prop_formula(toks, pos, declared, line_no)?);
                while toks[*pos].1 == Tok::Comma {
                    *pos += 1;
                    members.push(prop_formula(toks, pos, declared, line_no)?);
                }
            }
            expect_tok(toks, pos, &Tok::RBrack, "`]`").map_err(syntax)?;
            Ok(PropFormula::Join(members))
        }
        Tok::LParen => {
            *pos += 1;
            let lhs = prop_formula(toks, pos, declared, line_no)?;
            let op = toks[*pos].1.clone();
            if op != Tok::Wedge && op != Tok::Vee {
                return Err(syntax(SyntaxError::Parse {
                    pos: toks[*pos].0,
                    expected: vec!["`/\\`", "`\\/`"],
                    found: op.describe(),
                }));
            }
            *pos += 1;
            let rhs = prop_formula(toks, pos, declared, line_no)?;
            expect_tok(toks, pos, &Tok::RParen, "`)`").map_err(syntax)?;
            Ok(if op == Tok::Wedge {
                PropFormula::And(alloc::boxed::Box::new(lhs), alloc::boxed::Box::new(rhs))
            } else {
                PropFormula::Join(vec![lhs, rhs])
            })
        }
        other => Err(syntax(SyntaxError::Parse {
            pos: at,
            expected: vec!["proposition", "top", "`(`", "`\\/[`"],
            found: other.describe(),
        })),
    }
}
