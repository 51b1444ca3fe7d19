//! Seeded generators for interpretations, terms and formulas. Used by the
//! soundness fuzzer and by property tests; every generator is a pure
//! function of the RNG state.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::frame::{Elem, FiniteFrame};
use crate::semantics::Interpretation;
use crate::syntax::{Formula, Signature, Term, Var};

/// Shape limits for random formulas.
#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_depth: usize,
    pub max_join_width: usize,
    /// How many `exists` may be nested along one branch.
    pub max_quantifier_nesting: usize,
    /// Variables are drawn from `x1..=x{max_var}`.
    pub max_var: Var,
    pub max_term_depth: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 4,
            max_join_width: 3,
            max_quantifier_nesting: 2,
            max_var: 3,
            max_term_depth: 1,
        }
    }
}

pub const DOMAIN_NAMES: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

fn domain_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| match DOMAIN_NAMES.get(i) {
            Some(s) => String::from(*s),
            None => format!("d{i}"),
        })
        .collect()
}

/// Constants `c1, c2`, function `f.g/1`, predicates `p/1`, `q/1`, `r/2`.
pub fn fuzz_signature() -> Signature {
    let mut s = Signature::new();
    s.add_constant("c1").expect("valid");
    s.add_constant("c2").expect("valid");
    s.add_function("g", 1).expect("valid");
    s.add_predicate("p", 1).expect("valid");
    s.add_predicate("q", 1).expect("valid");
    s.add_predicate("r", 2).expect("valid");
    s
}

fn random_elem<R: Rng + ?Sized>(rng: &mut R, frame: &FiniteFrame) -> Elem {
    // Bias towards top and bottom so crisp values show up often.
    match rng.gen_range(0..6) {
        0 => frame.top(),
        1 => frame.bot(),
        _ => Elem::new(rng.gen_range(0..frame.len())),
    }
}

/// Random interpretation of [`fuzz_signature`] over `domain_size` elements.
pub fn random_interpretation<R: Rng + ?Sized>(
    rng: &mut R,
    frame: &FiniteFrame,
    domain_size: usize,
) -> Interpretation {
    let names = domain_names(domain_size.max(1));
    let mut interp = Interpretation::new(frame.clone(), &names).expect("distinct names");
    let n = names.len();
    for c in ["c1", "c2"] {
        interp.set_constant(c, rng.gen_range(0..n)).expect("valid");
    }
    let g: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    interp
        .set_function_with("g", 1, |a| g[a[0]])
        .expect("valid");
    for (name, arity) in [("p", 1usize), ("q", 1), ("r", 2)] {
        let cells: Vec<Elem> = (0..n.pow(arity as u32))
            .map(|_| random_elem(rng, frame))
            .collect();
        interp
            .set_predicate_with(name, arity, |a| {
                let idx = a.iter().fold(0, |acc, &x| acc * n + x);
                cells[idx]
            })
            .expect("valid");
    }
    interp
}

pub fn random_var<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Var {
    rng.gen_range(1..=cfg.max_var.max(1))
}

/// Random term over [`fuzz_signature`].
pub fn random_term<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Term {
    term_at(rng, cfg, cfg.max_term_depth)
}

fn term_at<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig, depth: usize) -> Term {
    let roll = rng.gen_range(0..10);
    if depth > 0 && roll < 2 {
        Term::app("g", alloc::vec![term_at(rng, cfg, depth - 1)])
    } else if roll < 4 {
        Term::constant(if rng.gen_bool(0.5) { "c1" } else { "c2" })
    } else {
        Term::Var(random_var(rng, cfg))
    }
}

pub fn random_atom<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Formula {
    match rng.gen_range(0..10) {
        0 => Formula::Top,
        1 => Formula::Bot,
        2 | 3 => Formula::pred("p", alloc::vec![random_term(rng, cfg)]),
        4 | 5 => Formula::pred("q", alloc::vec![random_term(rng, cfg)]),
        6 | 7 => Formula::pred(
            "r",
            alloc::vec![random_term(rng, cfg), random_term(rng, cfg)],
        ),
        _ => Formula::Eq(random_term(rng, cfg), random_term(rng, cfg)),
    }
}

/// Random formula within the depth, width and nesting limits of `cfg`.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Formula {
    formula_at(rng, cfg, cfg.max_depth, cfg.max_quantifier_nesting)
}

/// Random formula of at most the given depth.
pub fn random_formula_depth<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &GenConfig,
    depth: usize,
) -> Formula {
    formula_at(rng, cfg, depth, cfg.max_quantifier_nesting)
}

fn formula_at<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &GenConfig,
    depth: usize,
    quant: usize,
) -> Formula {
    if depth == 0 {
        return random_atom(rng, cfg);
    }
    match rng.gen_range(0..20) {
        0..=6 => random_atom(rng, cfg),
        7..=10 => Formula::and(
            formula_at(rng, cfg, depth - 1, quant),
            formula_at(rng, cfg, depth - 1, quant),
        ),
        11..=14 => {
            let width = rng.gen_range(0..=cfg.max_join_width);
            Formula::Join(
                (0..width)
                    .map(|_| formula_at(rng, cfg, depth - 1, quant))
                    .collect(),
            )
        }
        _ if quant > 0 => {
            let v = random_var(rng, cfg);
            Formula::exists(v, formula_at(rng, cfg, depth - 1, quant - 1))
        }
        _ => Formula::and(
            formula_at(rng, cfg, depth - 1, quant),
            random_atom(rng, cfg),
        ),
    }
}

/// `n` random formulas, each with depth below the configured maximum.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig, n: usize) -> Vec<Formula> {
    let depth = cfg.max_depth.saturating_sub(1);
    (0..n)
        .map(|_| random_formula_depth(rng, cfg, depth))
        .collect()
}

/// Picks one element of a nonempty slice.
pub fn pick<'a, T, R: Rng + ?Sized>(rng: &mut R, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("nonempty")
}
