//! Acceptance gate. Each criterion prints one PASS or FAIL line; the
//! process exits nonzero if any criterion fails.
//!
//! Oracles here are computed without the library's lattice operations
//! wherever the criterion allows: meets and joins are recomputed from the
//! order relation by scanning, and closures by iterating over all subsets.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use gglogic_core::frame::{chain, powerset, product};
use gglogic_core::lindenbaum::{
    build_lindenbaum, check_system_axioms, extent, extract_topology, induced_model_check,
    is_spatial, space_to_theory, ExtVector, PointSet, DEFAULT_CLOSURE_CAP,
};
use gglogic_core::proofs::{counterexample_frobenius, fuzz_soundness, FuzzConfig, RuleId};
use gglogic_core::random::{random_formula_depth, random_interpretation, random_term, GenConfig};
use gglogic_core::{
    build_frame, Assignment, Elem, FiniteFrame, Formula, FrameError, Interpretation, Term, Var,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(rel)
}

// ---------------------------------------------------------------------------
// Order-only lattice oracle

struct OrderOracle {
    n: usize,
    leq: Vec<Vec<bool>>,
}

impl OrderOracle {
    fn of(frame: &FiniteFrame) -> Self {
        let n = frame.len();
        let leq = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| frame.leq(Elem::new(a), Elem::new(b)))
                    .collect()
            })
            .collect();
        OrderOracle { n, leq }
    }

    fn lub(&self, xs: &[usize]) -> Option<usize> {
        let ubs: Vec<usize> = (0..self.n)
            .filter(|&u| xs.iter().all(|&x| self.leq[x][u]))
            .collect();
        ubs.iter()
            .copied()
            .find(|&u| ubs.iter().all(|&v| self.leq[u][v]))
    }

    fn glb(&self, xs: &[usize]) -> Option<usize> {
        let lbs: Vec<usize> = (0..self.n)
            .filter(|&l| xs.iter().all(|&x| self.leq[l][x]))
            .collect();
        lbs.iter()
            .copied()
            .find(|&l| lbs.iter().all(|&v| self.leq[v][l]))
    }

    /// First `(x, S)` where `x /\ \/S != \/(x /\ s)`, over every subset.
    fn distributivity_failure(&self) -> Option<(usize, Vec<usize>)> {
        for mask in 0u64..(1u64 << self.n) {
            let s: Vec<usize> = (0..self.n).filter(|i| mask & (1 << i) != 0).collect();
            for x in 0..self.n {
                let lhs = self.glb(&[x, self.lub(&s)?])?;
                let meets: Vec<usize> = s.iter().map(|&t| self.glb(&[x, t]).unwrap()).collect();
                if lhs != self.lub(&meets)? {
                    return Some((x, s));
                }
            }
        }
        None
    }
}

fn pentagon() -> Result<FiniteFrame, FrameError> {
    build_frame(
        &["0", "a", "b", "c", "1"],
        &[("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
    )
}

fn diamond() -> Result<FiniteFrame, FrameError> {
    build_frame(
        &["0", "a", "b", "c", "1"],
        &[
            ("0", "a"),
            ("0", "b"),
            ("0", "c"),
            ("a", "1"),
            ("b", "1"),
            ("c", "1"),
        ],
    )
}

/// The frame as an unchecked lattice, for recomputing a rejection witness.
fn unchecked_order(elements: &[&str], covers: &[(&str, &str)]) -> OrderOracle {
    let n = elements.len();
    let idx = |s: &str| elements.iter().position(|e| *e == s).unwrap();
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for (a, b) in covers {
        leq[idx(a)][idx(b)] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if leq[i][k] && leq[k][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
    OrderOracle { n, leq }
}

fn criterion_1() -> Check {
    let mut accepted = Vec::new();
    for n in 2..=6 {
        accepted.push((format!("chain({n})"), chain(n)));
    }
    for n in 2..=3 {
        accepted.push((format!("powerset({n})"), powerset(n)));
    }
    let c2 = chain(2).map_err(|e| e.to_string())?;
    let c3 = chain(3).map_err(|e| e.to_string())?;
    accepted.push(("product(chain(2),chain(3))".into(), product(&c2, &c3)));
    for (name, built) in &accepted {
        let frame = built
            .as_ref()
            .map_err(|e| format!("{name} rejected: {e}"))?;
        let oracle = OrderOracle::of(frame);
        if let Some((x, s)) = oracle.distributivity_failure() {
            return Err(format!(
                "{name} accepted but oracle finds failure at x={x} S={s:?}"
            ));
        }
        for a in frame.elements() {
            for b in frame.elements() {
                let (i, j) = (a.index(), b.index());
                if Some(frame.meet(a, b).index()) != oracle.glb(&[i, j])
                    || Some(frame.join(a, b).index()) != oracle.lub(&[i, j])
                {
                    return Err(format!("{name}: meet/join disagree with order scan"));
                }
            }
        }
    }

    let rejected: [(
        &str,
        Result<FiniteFrame, FrameError>,
        &[&str],
        &[(&str, &str)],
    ); 2] = [
        (
            "N5",
            pentagon(),
            &["0", "a", "b", "c", "1"],
            &[("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
        ),
        (
            "M3",
            diamond(),
            &["0", "a", "b", "c", "1"],
            &[
                ("0", "a"),
                ("0", "b"),
                ("0", "c"),
                ("a", "1"),
                ("b", "1"),
                ("c", "1"),
            ],
        ),
    ];
    let mut witnesses = Vec::new();
    for (name, built, elements, covers) in rejected {
        match built {
            Ok(_) => return Err(format!("{name} accepted")),
            Err(FrameError::NotAFrame {
                x,
                subset,
                lhs,
                rhs,
            }) => {
                let oracle = unchecked_order(elements, covers);
                let idx = |s: &str| elements.iter().position(|e| *e == s).unwrap();
                let s: Vec<usize> = subset.iter().map(|t| idx(t)).collect();
                let xi = idx(&x);
                let want_lhs = oracle.glb(&[xi, oracle.lub(&s).unwrap()]).unwrap();
                let meets: Vec<usize> = s.iter().map(|&t| oracle.glb(&[xi, t]).unwrap()).collect();
                let want_rhs = oracle.lub(&meets).unwrap();
                if want_lhs == want_rhs || elements[want_lhs] != lhs || elements[want_rhs] != rhs {
                    return Err(format!(
                        "{name}: witness x={x} S={subset:?} does not check out"
                    ));
                }
                witnesses.push(format!(
                    "{name}: x={x} S={{{}}} {lhs}!={rhs}",
                    subset.join(",")
                ));
            }
            Err(e) => {
                return Err(format!(
                    "{name} rejected without a distributivity witness: {e}"
                ))
            }
        }
    }
    Ok(format!("9 frames accepted; {}", witnesses.join("; ")))
}

fn criterion_2() -> Check {
    let config = FuzzConfig::standard(0, 200).map_err(|e| e.to_string())?;
    let mut total = 0;
    for rule in RuleId::ALL {
        let r = fuzz_soundness(rule, &config).map_err(|e| e.to_string())?;
        if r.cases < 200 {
            return Err(format!("{rule}: only {} cases", r.cases));
        }
        if r.failed != 0 || !r.violations.is_empty() {
            return Err(format!(
                "{rule}: {} violations, first: {}",
                r.failed, r.violations[0].instance
            ));
        }
        if rule.premise_count() != Some(0) && r.retained < 30 {
            return Err(format!("{rule}: only {} retained cases", r.retained));
        }
        total += r.cases;
    }
    Ok(format!("14 rules, {total} cases, 0 violations"))
}

fn criterion_3() -> Check {
    let (interp, inst, report) = counterexample_frobenius();
    let w = report.witness.ok_or("reported VALID")?;
    let rendered = interp.render_assignment(&w.assignment);
    let f = interp.frame();
    let (lhs, rhs) = (f.id(w.antecedent), f.id(w.consequent));

    // Hand evaluation at x1=a: p(a) /\ (q(a) \/ q(b)) against (p(a)/\q(a)) \/ (p(b)/\q(b)).
    let p = [true, false];
    let q = [false, true];
    let hand_lhs = p[0] && (q[0] || q[1]);
    let hand_rhs = (p[0] && q[0]) || (p[1] && q[1]);
    let bit = |b: bool| if b { "1" } else { "0" };
    if report.valid
        || rendered != "x1=a"
        || lhs != bit(hand_lhs)
        || rhs != bit(hand_rhs)
        || (lhs, rhs) != ("1", "0")
    {
        return Err(format!("got witness={rendered} grades {lhs} vs {rhs}"));
    }
    if gglogic_core::proofs::match_rule(&inst).is_ok() {
        return Err("side-condition-violating instance accepted by match_rule".into());
    }

    let out = Command::new(env!("CARGO_BIN_EXE_gglogic"))
        .args(["sequent", "check"])
        .arg(data("frobenius.json"))
        .arg("(p(x1) /\\ exists x1 . q(x1)) |- exists x1 . (p(x1) /\\ q(x1))")
        .output()
        .map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&out.stdout);
    if out.status.code() != Some(1)
        || text.trim() != "INVALID witness=x1=a antecedent=1 consequent=0"
    {
        return Err(format!("CLI printed `{}`", text.trim()));
    }
    Ok(format!("INVALID witness={rendered} grades {lhs} vs {rhs}"))
}

// ---------------------------------------------------------------------------
// Criterion 4: substitution theorem

const SUBST_VARS: [Var; 3] = [1, 2, 3];

fn small_terms() -> Vec<Term> {
    let mut base: Vec<Term> = SUBST_VARS.iter().map(|&v| Term::Var(v)).collect();
    base.push(Term::constant("c1"));
    base.push(Term::constant("c2"));
    let mut all = base.clone();
    all.extend(base.into_iter().map(|t| Term::app("g", vec![t])));
    all
}

fn atoms() -> Vec<Formula> {
    let args: Vec<Term> = vec![Term::Var(1), Term::Var(2), Term::constant("c1")];
    let mut out = vec![Formula::Top, Formula::Bot];
    for a in &args {
        out.push(Formula::pred("p", vec![a.clone()]));
        out.push(Formula::pred("q", vec![Term::app("g", vec![a.clone()])]));
        for b in &args {
            out.push(Formula::pred("r", vec![a.clone(), b.clone()]));
            out.push(Formula::Eq(a.clone(), b.clone()));
        }
    }
    out
}

/// Every formula of depth at most 1 over [`atoms`].
fn exhaustive_depth_one() -> Vec<Formula> {
    let atoms = atoms();
    let mut out = atoms.clone();
    out.push(Formula::Join(vec![]));
    for a in &atoms {
        out.push(Formula::Join(vec![a.clone()]));
        for v in SUBST_VARS {
            out.push(Formula::exists(v, a.clone()));
        }
        for b in &atoms {
            out.push(Formula::and(a.clone(), b.clone()));
            out.push(Formula::Join(vec![a.clone(), b.clone()]));
        }
    }
    out
}

fn assignments(d: usize) -> Vec<Assignment> {
    let mut out = Vec::new();
    for default in 0..d {
        for code in 0..d.pow(SUBST_VARS.len() as u32) {
            let mut s = Assignment::constant(default);
            let mut c = code;
            for &v in &SUBST_VARS {
                s = s.with(v, c % d);
                c /= d;
            }
            out.push(s);
        }
    }
    out
}

fn criterion_4() -> Check {
    let frames = [chain(3), powerset(2)];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let gen = GenConfig {
        max_var: 3,
        ..GenConfig::default()
    };
    let mut formulas = exhaustive_depth_one();
    let exhaustive = formulas.len();
    for _ in 0..300 {
        formulas.push(random_formula_depth(&mut rng, &gen, 3));
    }
    let terms = small_terms();
    let (mut compared, mut captures) = (0usize, 0usize);
    for frame in &frames {
        let frame = frame.as_ref().map_err(|e| e.to_string())?;
        for _ in 0..2 {
            let interp = random_interpretation(&mut rng, frame, 2);
            let points = assignments(2);
            for phi in &formulas {
                if phi.depth() > 3 {
                    return Err(format!("generated formula too deep: {phi}"));
                }
                for t in &terms {
                    for &x in &SUBST_VARS {
                        let substituted = match phi.substitute(x, t) {
                            Ok(f) => f,
                            Err(_) => {
                                captures += 1;
                                continue;
                            }
                        };
                        for s in &points {
                            let left = interp.eval(s, &substituted).map_err(|e| e.to_string())?;
                            let d = interp.eval_term(s, t).map_err(|e| e.to_string())?;
                            let right =
                                interp.eval(&s.with(x, d), phi).map_err(|e| e.to_string())?;
                            compared += 1;
                            if left != right {
                                return Err(format!(
                                    "{phi} [{t}/x{x}] at {}: {} vs {}",
                                    interp.render_assignment(s),
                                    frame.id(left),
                                    frame.id(right)
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{compared} comparisons ({exhaustive} exhaustive + 300 random formulas), {captures} capture cases excluded, 0 mismatches"
    ))
}

// ---------------------------------------------------------------------------
// Criterion 5: agreement

/// An assignment that agrees with `s` on `keep` and is random elsewhere,
/// including a random default.
fn perturb(
    rng: &mut ChaCha8Rng,
    s: &Assignment,
    keep: &BTreeSet<Var>,
    d: usize,
    max_var: Var,
) -> Assignment {
    let mut t = Assignment::constant(rng.gen_range(0..d));
    for v in 1..=max_var + 2 {
        let value = if keep.contains(&v) {
            s.get(v)
        } else {
            rng.gen_range(0..d)
        };
        t = t.with(v, value);
    }
    t
}

fn random_assignment(rng: &mut ChaCha8Rng, d: usize, max_var: Var) -> Assignment {
    let mut s = Assignment::constant(rng.gen_range(0..d));
    for v in 1..=max_var {
        s = s.with(v, rng.gen_range(0..d));
    }
    s
}

fn criterion_5() -> Check {
    let frames: Vec<FiniteFrame> = [chain(2), chain(3), powerset(2)]
        .into_iter()
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let gen = GenConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut terms, mut formulas) = (0, 0);
    for i in 0..1000 {
        let frame = &frames[i % frames.len()];
        let d = rng.gen_range(1..=3);
        let interp = random_interpretation(&mut rng, frame, d);
        let s = random_assignment(&mut rng, d, gen.max_var);
        if i % 2 == 0 {
            let t = random_term(
                &mut rng,
                &GenConfig {
                    max_term_depth: 3,
                    ..gen.clone()
                },
            );
            let s2 = perturb(&mut rng, &s, &t.vars(), d, gen.max_var);
            let (a, b) = (interp.eval_term(&s, &t), interp.eval_term(&s2, &t));
            if a != b {
                return Err(format!("term {t}: {a:?} vs {b:?}"));
            }
            terms += 1;
        } else {
            let phi = random_formula_depth(&mut rng, &gen, 4);
            let s2 = perturb(&mut rng, &s, &phi.free_vars(), d, gen.max_var);
            let (a, b) = (interp.eval(&s, &phi), interp.eval(&s2, &phi));
            if a != b {
                return Err(format!("formula {phi}: {a:?} vs {b:?}"));
            }
            formulas += 1;
        }
    }
    Ok(format!(
        "{terms} term pairs and {formulas} formula pairs agree"
    ))
}

// ---------------------------------------------------------------------------
// Criterion 6: Lindenbaum pipeline

fn c3_interp(frame: &FiniteFrame) -> Result<Interpretation, String> {
    let h = frame.lookup("h").map_err(|e| e.to_string())?;
    let (one, zero) = (frame.top(), frame.bot());
    let mut i = Interpretation::new(frame.clone(), &["a", "b"]).map_err(|e| e.to_string())?;
    i.set_predicate_with("p", 1, |a| if a[0] == 0 { h } else { one })
        .map_err(|e| e.to_string())?;
    i.set_predicate_with("q", 1, |a| if a[0] == 0 { one } else { zero })
        .map_err(|e| e.to_string())?;
    Ok(i)
}

/// Closure by brute force: every round adds the pointwise meet and join of
/// every subset of the current set, using only the order relation.
fn brute_force_closure(order: &OrderOracle, seeds: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
    let width = seeds[0].len();
    let mut set: BTreeSet<Vec<usize>> = seeds.iter().cloned().collect();
    loop {
        let current: Vec<Vec<usize>> = set.iter().cloned().collect();
        let mut next = set.clone();
        for mask in 0u64..(1u64 << current.len()) {
            let members: Vec<&Vec<usize>> = (0..current.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| &current[i])
                .collect();
            let column = |x: usize| members.iter().map(|v| v[x]).collect::<Vec<usize>>();
            next.insert((0..width).map(|x| order.glb(&column(x)).unwrap()).collect());
            next.insert((0..width).map(|x| order.lub(&column(x)).unwrap()).collect());
        }
        if next == set {
            return set;
        }
        set = next;
    }
}

fn criterion_6() -> Check {
    let frame =
        build_frame(&["0", "h", "1"], &[("0", "h"), ("h", "1")]).map_err(|e| e.to_string())?;
    let interp = c3_interp(&frame)?;
    let sig = interp.signature();
    let gens: Vec<Formula> = ["p(x1)", "q(x1)"]
        .iter()
        .map(|t| gglogic_core::parse_formula(t, sig).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let x = PointSet::over_free_vars(&interp, &gens);

    // Oracle first: extents from the tables, closure by subsets.
    let id = |s: &str| frame.lookup(s).unwrap().index();
    let seeds = vec![vec![id("h"), id("1")], vec![id("1"), id("0")]];
    let order = OrderOracle::of(&frame);
    let oracle = brute_force_closure(&order, &seeds);
    let expected: BTreeSet<Vec<usize>> =
        [["0", "0"], ["h", "0"], ["h", "1"], ["1", "0"], ["1", "1"]]
            .iter()
            .map(|r| r.iter().map(|s| id(s)).collect())
            .collect();
    if oracle != expected {
        return Err(format!("brute-force closure has {} vectors", oracle.len()));
    }
    for (g, seed) in gens.iter().zip(&seeds) {
        let v = extent(&interp, &x, g).map_err(|e| e.to_string())?;
        if v.0.iter().map(|e| e.index()).collect::<Vec<_>>() != *seed {
            return Err(format!("extent of {g} is {}", v.render(&frame)));
        }
    }

    let lb =
        build_lindenbaum(&interp, &x, &gens, DEFAULT_CLOSURE_CAP).map_err(|e| e.to_string())?;
    let sys = &lb.system;
    let as_indices = |v: &ExtVector| v.0.iter().map(|e| e.index()).collect::<Vec<_>>();
    let alg_vectors: BTreeSet<Vec<usize>> = sys
        .alg()
        .elements()
        .map(|a| as_indices(&sys.column(a)))
        .collect();
    if sys.alg().len() != 5 || alg_vectors != oracle {
        return Err(format!("alg_size={}", sys.alg().len()));
    }
    for a in sys.alg().elements() {
        for b in sys.alg().elements() {
            let pointwise = sys
                .column(a)
                .0
                .iter()
                .zip(&sys.column(b).0)
                .all(|(u, v)| order.leq[u.index()][v.index()]);
            if sys.alg().leq(a, b) != pointwise {
                return Err("algebra order is not the pointwise order".into());
            }
        }
    }
    let axioms = check_system_axioms(sys);
    if !axioms.passed() || !axioms.exhaustive {
        return Err(format!("system axioms: {:?}", axioms.violation));
    }
    if !is_spatial(sys).spatial {
        return Err("not spatial".into());
    }
    let space = extract_topology(sys).map_err(|e| e.to_string())?;
    let opens: BTreeSet<Vec<usize>> = space.opens().iter().map(|(_, v)| as_indices(v)).collect();
    if opens != oracle {
        return Err("extracted opens differ from the closure".into());
    }
    let theory = space_to_theory(&space);
    let comparable = oracle
        .iter()
        .flat_map(|u| oracle.iter().map(move |v| (u, v)))
        .filter(|(u, v)| u.iter().zip(v.iter()).all(|(&a, &b)| order.leq[a][b]))
        .count();
    let inclusions = theory
        .axioms
        .iter()
        .filter(|a| {
            matches!(
                (&a.antecedent, &a.consequent),
                (
                    gglogic_core::lindenbaum::PropFormula::Atom(_),
                    gglogic_core::lindenbaum::PropFormula::Atom(_)
                )
            )
        })
        .count();
    // Atom |- atom also arises as the one-element intersection axioms.
    let singleton_intersections = space.opens().len();
    if inclusions != comparable + singleton_intersections {
        return Err(format!("{inclusions} atom-to-atom axioms, expected {comparable} inclusions + {singleton_intersections}"));
    }
    let report = induced_model_check(&space, &theory);
    if !report.all_ok() || report.points.len() != 2 {
        return Err("induced model check failed".into());
    }
    Ok(format!(
        "alg_size=5, {} system checks, spatial, 5 opens, {} axioms ({comparable} inclusions) hold at 2 points",
        axioms.checked,
        theory.axioms.len()
    ))
}

fn criterion_7() -> Check {
    let c2 = chain(2).map_err(|e| e.to_string())?;
    let c3 = chain(3).map_err(|e| e.to_string())?;
    let frames = [
        c2.clone(),
        c3.clone(),
        powerset(2).map_err(|e| e.to_string())?,
        product(&c2, &c3).map_err(|e| e.to_string())?,
    ];
    let gen = GenConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..100 {
        let frame = &frames[rng.gen_range(0..frames.len())];
        let order = OrderOracle::of(frame);
        let d = rng.gen_range(1..=3);
        let interp = random_interpretation(&mut rng, frame, d);
        let phi = random_formula_depth(&mut rng, &gen, 3);
        let psi = random_formula_depth(&mut rng, &gen, 3);
        let x = PointSet::over_free_vars(&interp, &[phi.clone(), psi.clone()]);
        let ext = |f: &Formula| extent(&interp, &x, f).map_err(|e| e.to_string());
        let (a, b) = (ext(&phi)?, ext(&psi)?);
        let meet: Vec<usize> =
            a.0.iter()
                .zip(&b.0)
                .map(|(u, v)| order.glb(&[u.index(), v.index()]).unwrap())
                .collect();
        let join: Vec<usize> =
            a.0.iter()
                .zip(&b.0)
                .map(|(u, v)| order.lub(&[u.index(), v.index()]).unwrap())
                .collect();
        let got_meet: Vec<usize> = ext(&Formula::and(phi.clone(), psi.clone()))?
            .0
            .iter()
            .map(|e| e.index())
            .collect();
        let got_join: Vec<usize> = ext(&Formula::or(phi.clone(), psi.clone()))?
            .0
            .iter()
            .map(|e| e.index())
            .collect();
        if got_meet != meet || got_join != join {
            return Err(format!("pair {i}: {phi} and {psi}"));
        }
    }
    Ok("100 pairs: extents of /\\ and \\/ are pointwise meets and joins".into())
}

fn criterion_8() -> Check {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_gglogic"))
            .args(["rules", "fuzz", "--seed", "17", "--cases", "200"])
            .output()
    };
    let (a, b) = (
        run().map_err(|e| e.to_string())?,
        run().map_err(|e| e.to_string())?,
    );
    if a.status.code() != Some(0) || b.status.code() != Some(0) {
        return Err(format!(
            "exit codes {:?} {:?}",
            a.status.code(),
            b.status.code()
        ));
    }
    if a.stdout != b.stdout {
        return Err("reports differ".into());
    }
    let text = String::from_utf8_lossy(&a.stdout);
    let rows = RuleId::ALL
        .iter()
        .filter(|r| text.lines().any(|l| l.starts_with(&format!("{r} pass="))))
        .count();
    if rows != 14 || !text.contains("R9-unconditioned: COUNTEREXAMPLE") {
        return Err(format!("{rows} rule rows"));
    }
    Ok(format!(
        "two runs with seed 17 are byte-identical ({} bytes)",
        a.stdout.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 8] = [
        ("frame law suite", criterion_1, Duration::from_secs(1)),
        ("soundness fuzz", criterion_2, Duration::from_secs(60)),
        (
            "Frobenius countermodel",
            criterion_3,
            Duration::from_secs(1),
        ),
        ("substitution theorem", criterion_4, Duration::from_secs(30)),
        ("agreement theorems", criterion_5, Duration::from_secs(10)),
        ("Lindenbaum pipeline", criterion_6, Duration::from_secs(1)),
        ("ext homomorphism", criterion_7, Duration::from_secs(10)),
        ("determinism", criterion_8, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > *limit => {
                Err(format!("{detail}, but took {elapsed:?} (limit {limit:?})"))
            }
            other => other,
        };
        match result {
            Ok(detail) => println!(
                "PASS [{}] {name} ({} ms): {detail}",
                i + 1,
                elapsed.as_millis()
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "FAIL [{}] {name} ({} ms): {why}",
                    i + 1,
                    elapsed.as_millis()
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
