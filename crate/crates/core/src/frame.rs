//! Finite frames: complete lattices in which binary meet distributes over
//! arbitrary joins. A [`FiniteFrame`] is the truth-value object used by every
//! other module, and also the algebra of a topological system.
//!
//! Elements are addressed by [`Elem`], a dense index into the frame's element
//! list. Identity across frames is never implied: an `Elem` only means
//! something relative to the frame that produced it.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Index of an element inside one [`FiniteFrame`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(u32);

impl Elem {
    pub const fn new(index: usize) -> Self {
        Elem(index as u32)
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

/// Which bound was missing when a relation failed to be a lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Meet,
    Join,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Meet => f.write_str("greatest lower bound"),
            Bound::Join => f.write_str("least upper bound"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("a frame needs at least one element")]
    Empty,
    #[error("duplicate element id `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("not a poset: `{a}` <= `{b}` and `{b}` <= `{a}` after closure")]
    NotAPoset { a: String, b: String },
    #[error("not a lattice: `{a}` and `{b}` have no {missing}")]
    NotALattice {
        a: String,
        b: String,
        missing: Bound,
    },
    #[error(
        "not a frame: meet({x}, join{{{}}}) = {lhs} but join of meets = {rhs}",
        subset.join(",")
    )]
    NotAFrame {
        x: String,
        subset: Vec<String>,
        lhs: String,
        rhs: String,
    },
    #[error("frame would have {size} elements, cap is {cap}")]
    SizeLimit { size: usize, cap: usize },
}

/// Knobs for frame validation and construction.
#[derive(Clone, Debug)]
pub struct FrameConfig {
    /// Up to this many elements the frame law is checked over every subset.
    pub exhaustive_bound: usize,
    /// Random subsets checked beyond the pairwise pass for larger frames.
    pub random_subsets: usize,
    pub seed: u64,
    /// Largest frame [`StandardFrame::build`] will produce.
    pub size_cap: usize,
}

impl Default for FrameConfig {
    fn default() -> Self {
        FrameConfig {
            exhaustive_bound: 12,
            random_subsets: 10_000,
            seed: 0,
            size_cap: 64,
        }
    }
}

/// A validated finite frame with precomputed order, meet and join tables.
///
/// Immutable after construction.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteFrame {
    ids: Vec<String>,
    index: BTreeMap<String, Elem>,
    leq: Vec<bool>,
    meet: Vec<Elem>,
    join: Vec<Elem>,
    top: Elem,
    bot: Elem,
}

impl fmt::Debug for FiniteFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteFrame")
            .field("elements", &self.ids)
            .field("top", &self.id(self.top))
            .field("bot", &self.id(self.bot))
            .finish()
    }
}

/// Builds a frame with the default [`FrameConfig`].
pub fn build_frame<S: AsRef<str>>(
    elements: &[S],
    leq_pairs: &[(S, S)],
) -> Result<FiniteFrame, FrameError> {
    build_frame_with(elements, leq_pairs, &FrameConfig::default())
}

/// Builds and validates a frame from element ids and a generating order
/// relation. The reflexive-transitive closure of `leq_pairs` is taken first.
pub fn build_frame_with<S: AsRef<str>>(
    elements: &[S],
    leq_pairs: &[(S, S)],
    config: &FrameConfig,
) -> Result<FiniteFrame, FrameError> {
    if elements.is_empty() {
        return Err(FrameError::Empty);
    }
    let n = elements.len();
    if n > config.size_cap {
        return Err(FrameError::SizeLimit {
            size: n,
            cap: config.size_cap,
        });
    }
    let mut ids = Vec::with_capacity(n);
    let mut index = BTreeMap::new();
    for (i, e) in elements.iter().enumerate() {
        let id = e.as_ref().to_string();
        if index.insert(id.clone(), Elem::new(i)).is_some() {
            return Err(FrameError::DuplicateElement(id));
        }
        ids.push(id);
    }

    let lookup = |s: &str| {
        index
            .get(s)
            .copied()
            .ok_or_else(|| FrameError::UnknownElement(s.to_string()))
    };
    let mut leq = vec![false; n * n];
    for i in 0..n {
        leq[i * n + i] = true;
    }
    for (a, b) in leq_pairs {
        let a = lookup(a.as_ref())?;
        let b = lookup(b.as_ref())?;
        leq[a.index() * n + b.index()] = true;
    }
    // Warshall
    for k in 0..n {
        for i in 0..n {
            if leq[i * n + k] {
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if leq[i * n + j] && leq[j * n + i] {
                return Err(FrameError::NotAPoset {
                    a: ids[i].clone(),
                    b: ids[j].clone(),
                });
            }
        }
    }

    let mut meet = vec![Elem(0); n * n];
    let mut join = vec![Elem(0); n * n];
    for i in 0..n {
        for j in i..n {
            let glb =
                extremal_bound(&leq, n, i, j, true).ok_or_else(|| FrameError::NotALattice {
                    a: ids[i].clone(),
                    b: ids[j].clone(),
                    missing: Bound::Meet,
                })?;
            let lub =
                extremal_bound(&leq, n, i, j, false).ok_or_else(|| FrameError::NotALattice {
                    a: ids[i].clone(),
                    b: ids[j].clone(),
                    missing: Bound::Join,
                })?;
            meet[i * n + j] = glb;
            meet[j * n + i] = glb;
            join[i * n + j] = lub;
            join[j * n + i] = lub;
        }
    }

    // A finite lattice has a maximum and minimum; fold the tables to find them.
    let mut top = Elem(0);
    let mut bot = Elem(0);
    for i in 1..n {
        top = join[top.index() * n + i];
        bot = meet[bot.index() * n + i];
    }

    let frame = FiniteFrame {
        ids,
        index,
        leq,
        meet,
        join,
        top,
        bot,
    };
    frame.verify_frame_law(config)?;
    Ok(frame)
}

/// Greatest lower bound (`lower = true`) or least upper bound of `i` and `j`.
fn extremal_bound(leq: &[bool], n: usize, i: usize, j: usize, lower: bool) -> Option<Elem> {
    let below = |a: usize, b: usize| leq[a * n + b];
    let is_bound = |c: usize| {
        if lower {
            below(c, i) && below(c, j)
        } else {
            below(i, c) && below(j, c)
        }
    };
    let candidates: Vec<usize> = (0..n).filter(|&c| is_bound(c)).collect();
    candidates
        .iter()
        .copied()
        .find(|&c| {
            candidates
                .iter()
                .all(|&d| if lower { below(d, c) } else { below(c, d) })
        })
        .map(Elem::new)
}

impl FiniteFrame {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.ids.len()).map(Elem::new)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, e: Elem) -> &str {
        &self.ids[e.index()]
    }

    pub fn elem(&self, id: &str) -> Option<Elem> {
        self.index.get(id).copied()
    }

    pub fn lookup(&self, id: &str) -> Result<Elem, FrameError> {
        self.elem(id)
            .ok_or_else(|| FrameError::UnknownElement(id.to_string()))
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn bot(&self) -> Elem {
        self.bot
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a.index() * self.len() + b.index()]
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a.index() * self.len() + b.index()]
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a.index() * self.len() + b.index()]
    }

    /// Greatest lower bound of a finite family; `top` for the empty family.
    pub fn meet_all<I: IntoIterator<Item = Elem>>(&self, xs: I) -> Elem {
        xs.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// Least upper bound of a finite family; `bot` for the empty family.
    pub fn join_all<I: IntoIterator<Item = Elem>>(&self, xs: I) -> Elem {
        xs.into_iter().fold(self.bot, |acc, x| self.join(acc, x))
    }

    /// [`meet_all`](Self::meet_all) over element ids.
    pub fn meet_ids<S: AsRef<str>>(&self, xs: &[S]) -> Result<Elem, FrameError> {
        let elems = xs
            .iter()
            .map(|x| self.lookup(x.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.meet_all(elems))
    }

    /// [`join_all`](Self::join_all) over element ids.
    pub fn join_ids<S: AsRef<str>>(&self, xs: &[S]) -> Result<Elem, FrameError> {
        let elems = xs
            .iter()
            .map(|x| self.lookup(x.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.join_all(elems))
    }

    pub fn is_chain(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.leq(a, b) || self.leq(b, a)))
    }

    /// Covering pairs `(a, b)`: `a < b` with nothing strictly between.
    /// Their reflexive-transitive closure is the full order.
    pub fn covers(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if a == b || !self.leq(a, b) {
                    continue;
                }
                let between = self
                    .elements()
                    .any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b));
                if !between {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn not_a_frame(&self, x: Elem, subset: &[Elem], lhs: Elem, rhs: Elem) -> FrameError {
        FrameError::NotAFrame {
            x: self.id(x).to_string(),
            subset: subset.iter().map(|&e| self.id(e).to_string()).collect(),
            lhs: self.id(lhs).to_string(),
            rhs: self.id(rhs).to_string(),
        }
    }

    fn verify_frame_law(&self, config: &FrameConfig) -> Result<(), FrameError> {
        let n = self.len();
        if n <= config.exhaustive_bound && n < 64 {
            let subsets = 1usize << n;
            let mut join_of = vec![self.bot; subsets];
            let mut meets_joined = vec![self.bot; subsets];
            for x in self.elements() {
                for mask in 1..subsets {
                    let low = mask.trailing_zeros() as usize;
                    let rest = mask & (mask - 1);
                    let y = Elem::new(low);
                    join_of[mask] = self.join(join_of[rest], y);
                    meets_joined[mask] = self.join(meets_joined[rest], self.meet(x, y));
                    let lhs = self.meet(x, join_of[mask]);
                    if lhs != meets_joined[mask] {
                        let subset: Vec<Elem> = (0..n)
                            .filter(|i| mask & (1 << i) != 0)
                            .map(Elem::new)
                            .collect();
                        return Err(self.not_a_frame(x, &subset, lhs, meets_joined[mask]));
                    }
                }
            }
            return Ok(());
        }

        for x in self.elements() {
            for y in self.elements() {
                for z in self.elements() {
                    let lhs = self.meet(x, self.join(y, z));
                    let rhs = self.join(self.meet(x, y), self.meet(x, z));
                    if lhs != rhs {
                        return Err(self.not_a_frame(x, &[y, z], lhs, rhs));
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for _ in 0..config.random_subsets {
            let x = Elem::new(rng.gen_range(0..n));
            let subset: Vec<Elem> = self.elements().filter(|_| rng.gen_bool(0.5)).collect();
            let lhs = self.meet(x, self.join_all(subset.iter().copied()));
            let rhs = self.join_all(subset.iter().map(|&y| self.meet(x, y)));
            if lhs != rhs {
                return Err(self.not_a_frame(x, &subset, lhs, rhs));
            }
        }
        Ok(())
    }
}

/// Canonical frames with fixed element ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardFrame {
    /// Total order `0 < 1 < ... < n-1`.
    Chain(usize),
    /// Subsets of `{0..n-1}` under inclusion, ids like `{}` and `{0,2}`.
    Powerset(usize),
    /// Componentwise order, ids like `(a,b)`.
    Product(Box<StandardFrame>, Box<StandardFrame>),
}

impl StandardFrame {
    pub fn size(&self) -> Option<usize> {
        match self {
            StandardFrame::Chain(n) => Some(*n),
            StandardFrame::Powerset(n) => 1usize.checked_shl(u32::try_from(*n).ok()?),
            StandardFrame::Product(a, b) => a.size()?.checked_mul(b.size()?),
        }
    }

    pub fn build(&self) -> Result<FiniteFrame, FrameError> {
        self.build_with(&FrameConfig::default())
    }

    pub fn build_with(&self, config: &FrameConfig) -> Result<FiniteFrame, FrameError> {
        let size = self.size().unwrap_or(usize::MAX);
        if size > config.size_cap {
            return Err(FrameError::SizeLimit {
                size,
                cap: config.size_cap,
            });
        }
        match self {
            StandardFrame::Chain(n) => {
                if *n == 0 {
                    return Err(FrameError::Empty);
                }
                let ids: Vec<String> = (0..*n).map(|i| format!("{i}")).collect();
                let pairs: Vec<(String, String)> = ids
                    .windows(2)
                    .map(|w| (w[0].clone(), w[1].clone()))
                    .collect();
                build_frame_with(&ids, &pairs, config)
            }
            StandardFrame::Powerset(n) => {
                let count = 1usize << n;
                let ids: Vec<String> = (0..count).map(|mask| subset_id(mask, *n)).collect();
                let mut pairs = Vec::new();
                for mask in 0..count {
                    for bit in 0..*n {
                        if mask & (1 << bit) == 0 {
                            pairs.push((ids[mask].clone(), ids[mask | (1 << bit)].clone()));
                        }
                    }
                }
                build_frame_with(&ids, &pairs, config)
            }
            StandardFrame::Product(a, b) => {
                let fa = a.build_with(config)?;
                let fb = b.build_with(config)?;
                product_with(&fa, &fb, config)
            }
        }
    }
}

fn subset_id(mask: usize, n: usize) -> String {
    let members: Vec<String> = (0..n)
        .filter(|bit| mask & (1 << bit) != 0)
        .map(|bit| format!("{bit}"))
        .collect();
    format!("{{{}}}", members.join(","))
}

/// Convenience for [`StandardFrame::Chain`].
pub fn chain(n: usize) -> Result<FiniteFrame, FrameError> {
    StandardFrame::Chain(n).build()
}

/// Convenience for [`StandardFrame::Powerset`].
pub fn powerset(n: usize) -> Result<FiniteFrame, FrameError> {
    StandardFrame::Powerset(n).build()
}

/// Product of two already-built frames under the componentwise order.
pub fn product(a: &FiniteFrame, b: &FiniteFrame) -> Result<FiniteFrame, FrameError> {
    product_with(a, b, &FrameConfig::default())
}

pub fn product_with(
    a: &FiniteFrame,
    b: &FiniteFrame,
    config: &FrameConfig,
) -> Result<FiniteFrame, FrameError> {
    let size = a.len().saturating_mul(b.len());
    if size > config.size_cap {
        return Err(FrameError::SizeLimit {
            size,
            cap: config.size_cap,
        });
    }
    let id = |x: Elem, y: Elem| format!("({},{})", a.id(x), b.id(y));
    let mut ids = Vec::with_capacity(size);
    for x in a.elements() {
        for y in b.elements() {
            ids.push(id(x, y));
        }
    }
    let mut pairs = Vec::new();
    for (lo, hi) in a.covers() {
        for y in b.elements() {
            pairs.push((id(lo, y), id(hi, y)));
        }
    }
    for (lo, hi) in b.covers() {
        for x in a.elements() {
            pairs.push((id(x, lo), id(x, hi)));
        }
    }
    build_frame_with(&ids, &pairs, config)
}

/// Finds an order isomorphism `a -> b` if one exists, as the image of each
/// element of `a`. Brute-force backtracking; intended for small frames.
pub fn order_isomorphism(a: &FiniteFrame, b: &FiniteFrame) -> Option<Vec<Elem>> {
    if a.len() != b.len() {
        return None;
    }
    let n = a.len();
    let mut image: Vec<Option<Elem>> = vec![None; n];
    let mut used = vec![false; n];

    fn extend(
        a: &FiniteFrame,
        b: &FiniteFrame,
        next: usize,
        image: &mut Vec<Option<Elem>>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = a.len();
        if next == n {
            return true;
        }
        let x = Elem::new(next);
        for cand in 0..n {
            if used[cand] {
                continue;
            }
            let y = Elem::new(cand);
            let consistent = (0..next).all(|prev| {
                let px = Elem::new(prev);
                let py = image[prev].expect("assigned");
                a.leq(px, x) == b.leq(py, y) && a.leq(x, px) == b.leq(y, py)
            });
            if !consistent {
                continue;
            }
            image[next] = Some(y);
            used[cand] = true;
            if extend(a, b, next + 1, image, used) {
                return true;
            }
            image[next] = None;
            used[cand] = false;
        }
        false
    }

    if extend(a, b, 0, &mut image, &mut used) {
        Some(image.into_iter().map(|e| e.expect("complete")).collect())
    } else {
        None
    }
}
