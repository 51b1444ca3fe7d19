//! Inference rules of frame-valued geometric logic.
//!
//! [`match_rule`] checks that a [`RuleInstance`] is a correct instantiation of
//! its rule schema, [`check_derivation`] checks whole proof trees, and
//! [`fuzz_soundness`] tests each rule against random finite interpretations:
//! whenever every premise is valid, the conclusion must be too.
//!
//! The Frobenius rule `phi /\ exists y . psi |- exists y . (phi /\ psi)` is
//! only sound when `y` is not free in `phi`; [`match_rule`] enforces that
//! and [`counterexample_frobenius`] shows what goes wrong without it.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::frame::{FiniteFrame, FrameError, StandardFrame};
use crate::random::{self, GenConfig};
use crate::semantics::{Interpretation, SemanticsError, ValidityReport};
use crate::syntax::{tuple_equality, Formula, Sequent, SubstError, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    /// `phi |- phi`
    R1,
    /// cut
    R2,
    /// `phi |- top`
    R3i,
    /// `phi /\ psi |- phi`
    R3ii,
    /// `phi /\ psi |- psi`
    R3iii,
    /// conjunction introduction
    R3iv,
    /// `phi |- \/S` for `phi` in `S`
    R4i,
    /// join elimination
    R4ii,
    /// `phi /\ \/S |- \/{phi /\ psi | psi in S}`
    R5,
    /// `top |- x = x`
    R6,
    /// equality substitution
    R7,
    /// existential introduction
    R8i,
    /// existential elimination
    R8ii,
    /// Frobenius
    R9,
}

impl RuleId {
    pub const ALL: [RuleId; 14] = [
        RuleId::R1,
        RuleId::R2,
        RuleId::R3i,
        RuleId::R3ii,
        RuleId::R3iii,
        RuleId::R3iv,
        RuleId::R4i,
        RuleId::R4ii,
        RuleId::R5,
        RuleId::R6,
        RuleId::R7,
        RuleId::R8i,
        RuleId::R8ii,
        RuleId::R9,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::R1 => "R1",
            RuleId::R2 => "R2",
            RuleId::R3i => "R3i",
            RuleId::R3ii => "R3ii",
            RuleId::R3iii => "R3iii",
            RuleId::R3iv => "R3iv",
            RuleId::R4i => "R4i",
            RuleId::R4ii => "R4ii",
            RuleId::R5 => "R5",
            RuleId::R6 => "R6",
            RuleId::R7 => "R7",
            RuleId::R8i => "R8i",
            RuleId::R8ii => "R8ii",
            RuleId::R9 => "R9",
        }
    }

    /// Fixed premise count; `None` for join elimination, which takes one
    /// premise per member of `S`.
    pub fn premise_count(self) -> Option<usize> {
        match self {
            RuleId::R2 | RuleId::R3iv => Some(2),
            RuleId::R8i | RuleId::R8ii => Some(1),
            RuleId::R4ii => None,
            _ => Some(0),
        }
    }

    fn position(self) -> usize {
        RuleId::ALL.iter().position(|&r| r == self).expect("listed")
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown rule `{0}`")]
pub struct UnknownRule(pub String);

impl FromStr for RuleId {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL
            .iter()
            .copied()
            .find(|r| r.name() == s)
            .ok_or_else(|| UnknownRule(s.to_string()))
    }
}

/// Rule-specific data a schema needs materialized.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Witnesses {
    /// The finite set `S` for R4i, R4ii and R5. Order is irrelevant.
    pub set: Option<Vec<Formula>>,
    /// `(x_i, y_i)` pairs for R7: `x_i` is replaced by `y_i`.
    pub pairs: Option<Vec<(Var, Var)>>,
    /// The variable substituted in R8i/R8ii, or the one in R6.
    pub x: Option<Var>,
    /// The quantified variable in R8i/R8ii/R9.
    pub y: Option<Var>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub premises: Vec<Sequent>,
    pub conclusion: Sequent,
    pub witnesses: Witnesses,
}

impl RuleInstance {
    pub fn new(rule: RuleId, premises: Vec<Sequent>, conclusion: Sequent) -> Self {
        RuleInstance {
            rule,
            premises,
            conclusion,
            witnesses: Witnesses::default(),
        }
    }

    pub fn with_witnesses(mut self, witnesses: Witnesses) -> Self {
        self.witnesses = witnesses;
        self
    }
}

impl fmt::Display for RuleInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.rule)?;
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                f.write_str(" ; ")?;
            }
            write!(f, "{p}")?;
        }
        if !self.premises.is_empty() {
            f.write_str(" ==> ")?;
        }
        write!(f, "{}", self.conclusion)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("{rule}: schema mismatch: {reason}")]
    SchemaMismatch { rule: RuleId, reason: String },
    #[error("{rule}: side condition violated: {reason}")]
    SideConditionViolated { rule: RuleId, reason: String },
}

fn as_set(items: &[Formula]) -> BTreeSet<&Formula> {
    items.iter().collect()
}

/// Checks that `inst` instantiates its rule schema.
pub fn match_rule(inst: &RuleInstance) -> Result<(), RuleError> {
    let rule = inst.rule;
    let mismatch = |reason: String| RuleError::SchemaMismatch { rule, reason };
    let side = |reason: String| RuleError::SideConditionViolated { rule, reason };
    let concl = &inst.conclusion;
    let prem = &inst.premises;
    let w = &inst.witnesses;

    if let Some(n) = rule.premise_count() {
        if prem.len() != n {
            return Err(mismatch(format!(
                "expected {n} premise(s), got {}",
                prem.len()
            )));
        }
    }
    let set = || {
        w.set
            .as_deref()
            .ok_or_else(|| mismatch("witness set S is required".into()))
    };
    let join_members = |phi: &Formula, what: &str| match phi {
        Formula::Join(ms) => Ok(ms.clone()),
        _ => Err(mismatch(format!("{what} must be a join"))),
    };
    let check_y = |y: Var| match w.y {
        Some(wy) if wy != y => Err(mismatch(format!(
            "witness y = x{wy} but the rule binds x{y}"
        ))),
        _ => Ok(()),
    };
    let subst_err = |e: SubstError| side(e.to_string());

    match rule {
        RuleId::R1 => {
            if concl.antecedent != concl.consequent {
                return Err(mismatch("antecedent and consequent differ".into()));
            }
        }
        RuleId::R2 => {
            if prem[0].antecedent != concl.antecedent {
                return Err(mismatch(
                    "first premise antecedent differs from conclusion".into(),
                ));
            }
            if prem[0].consequent != prem[1].antecedent {
                return Err(mismatch("premises do not share the cut formula".into()));
            }
            if prem[1].consequent != concl.consequent {
                return Err(mismatch(
                    "second premise consequent differs from conclusion".into(),
                ));
            }
        }
        RuleId::R3i => {
            if concl.consequent != Formula::Top {
                return Err(mismatch("consequent must be top".into()));
            }
        }
        RuleId::R3ii | RuleId::R3iii => {
            let Formula::And(l, r) = &concl.antecedent else {
                return Err(mismatch("antecedent must be a conjunction".into()));
            };
            let expected = if rule == RuleId::R3ii { l } else { r };
            if **expected != concl.consequent {
                return Err(mismatch("consequent is not the selected conjunct".into()));
            }
        }
        RuleId::R3iv => {
            if prem[0].antecedent != concl.antecedent || prem[1].antecedent != concl.antecedent {
                return Err(mismatch(
                    "premise antecedents must equal the conclusion's".into(),
                ));
            }
            let expected = Formula::and(prem[0].consequent.clone(), prem[1].consequent.clone());
            if concl.consequent != expected {
                return Err(mismatch(
                    "consequent must conjoin the premise consequents".into(),
                ));
            }
        }
        RuleId::R4i => {
            let s = set()?;
            let ms = join_members(&concl.consequent, "consequent")?;
            if as_set(&ms) != as_set(s) {
                return Err(mismatch("consequent join does not range over S".into()));
            }
            if !s.contains(&concl.antecedent) {
                return Err(mismatch("antecedent is not a member of S".into()));
            }
        }
        RuleId::R4ii => {
            let s = set()?;
            let ms = join_members(&concl.antecedent, "antecedent")?;
            if as_set(&ms) != as_set(s) {
                return Err(mismatch("antecedent join does not range over S".into()));
            }
            let distinct = as_set(s);
            if prem.len() != distinct.len() {
                return Err(mismatch(format!(
                    "expected one premise per member of S ({}), got {}",
                    distinct.len(),
                    prem.len()
                )));
            }
            let antecedents: BTreeSet<&Formula> = prem.iter().map(|p| &p.antecedent).collect();
            if antecedents != distinct {
                return Err(mismatch(
                    "premise antecedents are not the members of S".into(),
                ));
            }
            if prem.iter().any(|p| p.consequent != concl.consequent) {
                return Err(mismatch(
                    "premise consequents must equal the conclusion's".into(),
                ));
            }
        }
        RuleId::R5 => {
            let s = set()?;
            let Formula::And(phi, joined) = &concl.antecedent else {
                return Err(mismatch("antecedent must be phi /\\ \\/S".into()));
            };
            let ms = join_members(joined, "right conjunct of the antecedent")?;
            if as_set(&ms) != as_set(s) {
                return Err(mismatch("antecedent join does not range over S".into()));
            }
            let ns = join_members(&concl.consequent, "consequent")?;
            let expected: Vec<Formula> = s
                .iter()
                .map(|psi| Formula::and((**phi).clone(), psi.clone()))
                .collect();
            if as_set(&ns) != as_set(&expected) {
                return Err(mismatch(
                    "consequent must be the join of phi /\\ psi over S".into(),
                ));
            }
        }
        RuleId::R6 => {
            if concl.antecedent != Formula::Top {
                return Err(mismatch("antecedent must be top".into()));
            }
            match &concl.consequent {
                Formula::Eq(Term::Var(a), Term::Var(b)) if a == b => {
                    if let Some(x) = w.x {
                        if x != *a {
                            return Err(mismatch(format!(
                                "witness x = x{x} but equation uses x{a}"
                            )));
                        }
                    }
                }
                _ => return Err(mismatch("consequent must be x = x for a variable x".into())),
            }
        }
        RuleId::R7 => {
            let pairs = w
                .pairs
                .as_deref()
                .filter(|p| !p.is_empty())
                .ok_or_else(|| mismatch("nonempty substitution pairs are required".into()))?;
            let eqs = tuple_equality(pairs).expect("nonempty");
            let Formula::And(lhs, phi) = &concl.antecedent else {
                return Err(mismatch(
                    "antecedent must be (tuple equality) /\\ phi".into(),
                ));
            };
            if **lhs != eqs {
                return Err(mismatch(
                    "antecedent equalities do not match the pairs".into(),
                ));
            }
            let expected = phi.substitute_vars(pairs).map_err(|e| match e {
                SubstError::DuplicateTarget(_) => mismatch(e.to_string()),
                SubstError::Capture { .. } => side(e.to_string()),
            })?;
            if concl.consequent != expected {
                return Err(mismatch("consequent is not the substituted formula".into()));
            }
        }
        RuleId::R8i => {
            let (x, y) =
                var_pair(w).ok_or_else(|| mismatch("witnesses x and y are required".into()))?;
            let Formula::Exists(bound, psi) = &concl.consequent else {
                return Err(mismatch("consequent must be exists y . psi".into()));
            };
            if *bound != y {
                return Err(mismatch(format!(
                    "consequent binds x{bound}, witness y is x{y}"
                )));
            }
            if prem[0].antecedent != concl.antecedent {
                return Err(mismatch(
                    "premise antecedent differs from conclusion".into(),
                ));
            }
            let expected = psi.substitute(y, &Term::Var(x)).map_err(subst_err)?;
            if prem[0].consequent != expected {
                return Err(mismatch("premise consequent is not psi[x/y]".into()));
            }
        }
        RuleId::R8ii => {
            let (x, y) =
                var_pair(w).ok_or_else(|| mismatch("witnesses x and y are required".into()))?;
            let Formula::Exists(bound, phi) = &prem[0].antecedent else {
                return Err(mismatch("premise antecedent must be exists y . phi".into()));
            };
            if *bound != y {
                return Err(mismatch(format!(
                    "premise binds x{bound}, witness y is x{y}"
                )));
            }
            if prem[0].consequent != concl.consequent {
                return Err(mismatch(
                    "premise consequent differs from conclusion".into(),
                ));
            }
            let expected = phi.substitute(y, &Term::Var(x)).map_err(subst_err)?;
            if concl.antecedent != expected {
                return Err(mismatch("conclusion antecedent is not phi[x/y]".into()));
            }
        }
        RuleId::R9 => {
            let Formula::And(phi, ex) = &concl.antecedent else {
                return Err(mismatch("antecedent must be phi /\\ exists y . psi".into()));
            };
            let Formula::Exists(y, psi) = &**ex else {
                return Err(mismatch("antecedent must be phi /\\ exists y . psi".into()));
            };
            check_y(*y)?;
            let expected = Formula::exists(*y, Formula::and((**phi).clone(), (**psi).clone()));
            if concl.consequent != expected {
                return Err(mismatch(
                    "consequent must be exists y . (phi /\\ psi)".into(),
                ));
            }
            if phi.free_vars().contains(y) {
                return Err(side(format!("x{y} is free in {phi}")));
            }
        }
    }
    Ok(())
}

fn var_pair(w: &Witnesses) -> Option<(Var, Var)> {
    Some((w.x?, w.y?))
}

/// A proof tree. The children supply the node's premises, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub node: RuleInstance,
    pub children: Vec<Derivation>,
}

impl Derivation {
    pub fn leaf(node: RuleInstance) -> Self {
        Derivation {
            node,
            children: Vec::new(),
        }
    }

    pub fn new(node: RuleInstance, children: Vec<Derivation>) -> Self {
        Derivation { node, children }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeFailureKind {
    Rule(RuleError),
    ChildCount {
        expected: usize,
        found: usize,
    },
    PremiseMismatch {
        index: usize,
        premise: Sequent,
        child: Sequent,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeFailure {
    /// Child indices from the root.
    pub path: Vec<usize>,
    pub kind: NodeFailureKind,
}

impl fmt::Display for NodeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("root")?;
        for i in &self.path {
            write!(f, "/{i}")?;
        }
        match &self.kind {
            NodeFailureKind::Rule(e) => write!(f, ": {e}"),
            NodeFailureKind::ChildCount { expected, found } => {
                write!(f, ": node needs {expected} subderivation(s), has {found}")
            }
            NodeFailureKind::PremiseMismatch {
                index,
                premise,
                child,
            } => write!(
                f,
                ": premise {index} is `{premise}` but the subderivation proves `{child}`"
            ),
        }
    }
}

/// Checks every node of the tree. On success returns the derivable root
/// sequent; otherwise every failing node with its path.
pub fn check_derivation(d: &Derivation) -> Result<Sequent, Vec<NodeFailure>> {
    let mut failures = Vec::new();
    let mut path = Vec::new();
    check_node(d, &mut path, &mut failures);
    if failures.is_empty() {
        Ok(d.node.conclusion.clone())
    } else {
        Err(failures)
    }
}

fn check_node(d: &Derivation, path: &mut Vec<usize>, failures: &mut Vec<NodeFailure>) {
    let here = |kind| NodeFailure {
        path: path.clone(),
        kind,
    };
    if let Err(e) = match_rule(&d.node) {
        failures.push(here(NodeFailureKind::Rule(e)));
    }
    if d.children.len() != d.node.premises.len() {
        failures.push(here(NodeFailureKind::ChildCount {
            expected: d.node.premises.len(),
            found: d.children.len(),
        }));
    } else {
        for (index, (premise, child)) in d.node.premises.iter().zip(&d.children).enumerate() {
            if *premise != child.node.conclusion {
                failures.push(here(NodeFailureKind::PremiseMismatch {
                    index,
                    premise: premise.clone(),
                    child: child.node.conclusion.clone(),
                }));
            }
        }
    }
    for (i, child) in d.children.iter().enumerate() {
        path.push(i);
        check_node(child, path, failures);
        path.pop();
    }
}

// ---------------------------------------------------------------------------
// Soundness fuzzing

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub frames: Vec<FiniteFrame>,
    pub domain_sizes: Vec<usize>,
    pub cases: usize,
    pub seed: u64,
    pub gen: GenConfig,
    /// Multi-premise rules keep generating past `cases` until this many
    /// cases had all premises valid.
    pub retained_floor: usize,
    /// Fresh instances tried per case when looking for valid premises.
    pub premise_tries: usize,
}

impl FuzzConfig {
    /// chain(2), chain(3), powerset(2) with domain sizes 1 to 3.
    pub fn standard(seed: u64, cases: usize) -> Result<Self, FrameError> {
        Ok(FuzzConfig {
            frames: vec![
                StandardFrame::Chain(2).build()?,
                StandardFrame::Chain(3).build()?,
                StandardFrame::Powerset(2).build()?,
            ],
            domain_sizes: vec![1, 2, 3],
            cases,
            seed,
            gen: GenConfig::default(),
            retained_floor: 30,
            premise_tries: 8,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub interpretation: Interpretation,
    pub instance: RuleInstance,
    pub report: ValidityReport,
}

#[derive(Clone, Debug)]
pub struct SoundnessReport {
    pub rule: RuleId,
    pub seed: u64,
    pub cases: usize,
    /// Cases where every premise was valid.
    pub retained: usize,
    pub passed: usize,
    pub failed: usize,
    pub violations: Vec<Violation>,
}

impl SoundnessReport {
    pub fn is_sound(&self) -> bool {
        self.failed == 0
    }
}

impl fmt::Display for SoundnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} pass={} fail={} cases={} retained={} seed={}",
            self.rule, self.passed, self.failed, self.cases, self.retained, self.seed
        )
    }
}

/// Runs seeded random instances of `rule` against random interpretations.
/// The result depends only on `(rule, config)`.
pub fn fuzz_soundness(
    rule: RuleId,
    config: &FuzzConfig,
) -> Result<SoundnessReport, SemanticsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(rule.position() as u64);
    let mut report = SoundnessReport {
        rule,
        seed: config.seed,
        cases: 0,
        retained: 0,
        passed: 0,
        failed: 0,
        violations: Vec::new(),
    };
    let has_premises = rule.premise_count() != Some(0);
    let floor = if has_premises {
        config.retained_floor.min(config.cases.max(1))
    } else {
        0
    };
    let max_cases = config.cases.max(1).saturating_mul(20);
    if config.frames.is_empty() || config.domain_sizes.is_empty() {
        return Ok(report);
    }

    while (report.cases < config.cases || report.retained < floor) && report.cases < max_cases {
        let frame = random::pick(&mut rng, &config.frames);
        let size = *random::pick(&mut rng, &config.domain_sizes);
        let interp = random::random_interpretation(&mut rng, frame, size);
        let tries = if has_premises {
            config.premise_tries.max(1)
        } else {
            1
        };

        let mut chosen = None;
        for _ in 0..tries {
            let inst = generate_instance(&mut rng, rule, &config.gen);
            let mut premises_valid = true;
            for p in &inst.premises {
                if !interp.valid_in(p)?.valid {
                    premises_valid = false;
                    break;
                }
            }
            let done = premises_valid;
            chosen = Some((inst, premises_valid));
            if done {
                break;
            }
        }
        let (inst, premises_valid) = chosen.expect("at least one try");
        report.cases += 1;
        if !premises_valid {
            report.passed += 1;
            continue;
        }
        report.retained += 1;
        let verdict = interp.valid_in(&inst.conclusion)?;
        if verdict.valid {
            report.passed += 1;
        } else {
            report.failed += 1;
            report.violations.push(Violation {
                interpretation: interp,
                instance: inst,
                report: verdict,
            });
        }
    }
    Ok(report)
}

/// Random well-formed instance of `rule`. Premise-carrying rules are built
/// so that their premises are often valid (a weakened or strengthened copy
/// of a formula) and otherwise random.
pub fn generate_instance<R: Rng + ?Sized>(
    rng: &mut R,
    rule: RuleId,
    cfg: &GenConfig,
) -> RuleInstance {
    loop {
        let inst = try_generate(rng, rule, cfg);
        if let Some(inst) = inst {
            if match_rule(&inst).is_ok() {
                return inst;
            }
        }
    }
}

fn weaken<R: Rng + ?Sized>(rng: &mut R, phi: &Formula, cfg: &GenConfig) -> Formula {
    match rng.gen_range(0..4) {
        0 => phi.clone(),
        1 => Formula::Top,
        _ => Formula::or(phi.clone(), small(rng, cfg)),
    }
}

fn small<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Formula {
    random::random_formula_depth(rng, cfg, cfg.max_depth.saturating_sub(2))
}

fn try_generate<R: Rng + ?Sized>(
    rng: &mut R,
    rule: RuleId,
    cfg: &GenConfig,
) -> Option<RuleInstance> {
    let any = |rng: &mut R| random::random_formula_depth(rng, cfg, cfg.max_depth.saturating_sub(1));
    let seq = Sequent::new;
    let inst = match rule {
        RuleId::R1 => {
            let phi = any(rng);
            RuleInstance::new(rule, vec![], seq(phi.clone(), phi))
        }
        RuleId::R2 => {
            let phi = any(rng);
            let psi = if rng.gen_bool(0.6) {
                weaken(rng, &phi, cfg)
            } else {
                any(rng)
            };
            let chi = if rng.gen_bool(0.6) {
                weaken(rng, &psi, cfg)
            } else {
                any(rng)
            };
            RuleInstance::new(
                rule,
                vec![seq(phi.clone(), psi.clone()), seq(psi, chi.clone())],
                seq(phi, chi),
            )
        }
        RuleId::R3i => RuleInstance::new(rule, vec![], seq(any(rng), Formula::Top)),
        RuleId::R3ii | RuleId::R3iii => {
            let phi = any(rng);
            let psi = any(rng);
            let picked = if rule == RuleId::R3ii {
                phi.clone()
            } else {
                psi.clone()
            };
            RuleInstance::new(rule, vec![], seq(Formula::and(phi, psi), picked))
        }
        RuleId::R3iv => {
            let phi = any(rng);
            let psi = if rng.gen_bool(0.7) {
                weaken(rng, &phi, cfg)
            } else {
                any(rng)
            };
            let chi = if rng.gen_bool(0.7) {
                weaken(rng, &phi, cfg)
            } else {
                any(rng)
            };
            RuleInstance::new(
                rule,
                vec![seq(phi.clone(), psi.clone()), seq(phi.clone(), chi.clone())],
                seq(phi, Formula::and(psi, chi)),
            )
        }
        RuleId::R4i => {
            let n = rng.gen_range(1..=cfg.max_join_width.max(1));
            let s = random::random_family(rng, cfg, n);
            let phi = random::pick(rng, &s).clone();
            RuleInstance::new(rule, vec![], seq(phi, Formula::Join(s.clone()))).with_witnesses(
                Witnesses {
                    set: Some(s),
                    ..Witnesses::default()
                },
            )
        }
        RuleId::R4ii => {
            let n = rng.gen_range(0..=cfg.max_join_width);
            let s = random::random_family(rng, cfg, n);
            let psi = if rng.gen_bool(0.6) {
                let mut members = s.clone();
                members.push(small(rng, cfg));
                Formula::Join(members)
            } else {
                any(rng)
            };
            let distinct: Vec<Formula> = as_set(&s).into_iter().cloned().collect();
            let premises = distinct
                .iter()
                .map(|m| seq(m.clone(), psi.clone()))
                .collect();
            RuleInstance::new(rule, premises, seq(Formula::Join(s.clone()), psi)).with_witnesses(
                Witnesses {
                    set: Some(s),
                    ..Witnesses::default()
                },
            )
        }
        RuleId::R5 => {
            let phi = any(rng);
            let n = rng.gen_range(0..=cfg.max_join_width);
            let s = random::random_family(rng, cfg, n);
            let distributed = s
                .iter()
                .map(|psi| Formula::and(phi.clone(), psi.clone()))
                .collect();
            RuleInstance::new(
                rule,
                vec![],
                seq(
                    Formula::and(phi, Formula::Join(s.clone())),
                    Formula::Join(distributed),
                ),
            )
            .with_witnesses(Witnesses {
                set: Some(s),
                ..Witnesses::default()
            })
        }
        RuleId::R6 => {
            let x = random::random_var(rng, cfg);
            RuleInstance::new(
                rule,
                vec![],
                seq(Formula::Top, Formula::Eq(Term::Var(x), Term::Var(x))),
            )
            .with_witnesses(Witnesses {
                x: Some(x),
                ..Witnesses::default()
            })
        }
        RuleId::R7 => {
            let n = rng.gen_range(1..=cfg.max_var.min(3) as usize);
            let mut targets: Vec<Var> = (1..=cfg.max_var).collect();
            // partial Fisher-Yates for distinct targets
            for i in 0..n {
                let j = rng.gen_range(i..targets.len());
                targets.swap(i, j);
            }
            let pairs: Vec<(Var, Var)> = targets[..n]
                .iter()
                .map(|&t| (t, random::random_var(rng, cfg)))
                .collect();
            let phi = any(rng);
            let substituted = phi.substitute_vars(&pairs).ok()?;
            let eqs = tuple_equality(&pairs)?;
            RuleInstance::new(rule, vec![], seq(Formula::and(eqs, phi), substituted))
                .with_witnesses(Witnesses {
                    pairs: Some(pairs),
                    ..Witnesses::default()
                })
        }
        RuleId::R8i => {
            let x = random::random_var(rng, cfg);
            let y = random::random_var(rng, cfg);
            let psi = any(rng);
            let instantiated = psi.substitute(y, &Term::Var(x)).ok()?;
            let phi = if rng.gen_bool(0.6) {
                Formula::and(instantiated.clone(), small(rng, cfg))
            } else {
                any(rng)
            };
            RuleInstance::new(
                rule,
                vec![seq(phi.clone(), instantiated)],
                seq(phi, Formula::exists(y, psi)),
            )
            .with_witnesses(Witnesses {
                x: Some(x),
                y: Some(y),
                ..Witnesses::default()
            })
        }
        RuleId::R8ii => {
            let x = random::random_var(rng, cfg);
            let y = random::random_var(rng, cfg);
            let phi = any(rng);
            let instantiated = phi.substitute(y, &Term::Var(x)).ok()?;
            let quantified = Formula::exists(y, phi);
            let psi = if rng.gen_bool(0.6) {
                weaken(rng, &quantified, cfg)
            } else {
                any(rng)
            };
            RuleInstance::new(
                rule,
                vec![seq(quantified, psi.clone())],
                seq(instantiated, psi),
            )
            .with_witnesses(Witnesses {
                x: Some(x),
                y: Some(y),
                ..Witnesses::default()
            })
        }
        RuleId::R9 => {
            let phi = any(rng);
            let free = phi.free_vars();
            let candidates: Vec<Var> = (1..=cfg.max_var + 1)
                .filter(|v| !free.contains(v))
                .collect();
            let y = *random::pick(rng, &candidates);
            let psi = any(rng);
            frobenius_instance(phi, y, psi)
        }
    };
    Some(inst)
}

/// `phi /\ exists y . psi |- exists y . (phi /\ psi)`, whether or not the
/// side condition holds.
pub fn frobenius_instance(phi: Formula, y: Var, psi: Formula) -> RuleInstance {
    RuleInstance::new(
        RuleId::R9,
        vec![],
        Sequent::new(
            Formula::and(phi.clone(), Formula::exists(y, psi.clone())),
            Formula::exists(y, Formula::and(phi, psi)),
        ),
    )
    .with_witnesses(Witnesses {
        y: Some(y),
        ..Witnesses::default()
    })
}

/// The interpretation used by [`counterexample_frobenius`] over any frame:
/// `D = {a, b}`, `p = (top, bot)`, `q = (bot, top)`.
pub fn frobenius_interpretation(frame: &FiniteFrame) -> Interpretation {
    let (top, bot) = (frame.top(), frame.bot());
    let mut i = Interpretation::new(frame.clone(), &["a", "b"]).expect("distinct");
    i.set_predicate_with("p", 1, |a| if a[0] == 0 { top } else { bot })
        .expect("valid");
    i.set_predicate_with("q", 1, |a| if a[0] == 0 { bot } else { top })
        .expect("valid");
    i
}

/// Frobenius without its side condition: over chain(2) with the tables of
/// [`frobenius_interpretation`], the instance
/// `(p(x1) /\ exists x1 . q(x1)) |- exists x1 . (p(x1) /\ q(x1))`
/// fails at `x1 = a` (grade 1 against 0).
pub fn counterexample_frobenius() -> (Interpretation, RuleInstance, ValidityReport) {
    let frame = StandardFrame::Chain(2)
        .build()
        .expect("chain(2) is a frame");
    let interp = frobenius_interpretation(&frame);
    let p = Formula::pred("p", vec![Term::Var(1)]);
    let q = Formula::pred("q", vec![Term::Var(1)]);
    let inst = frobenius_instance(p, 1, q);
    let report = interp
        .valid_in(&inst.conclusion)
        .expect("symbols are declared");
    (interp, inst, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::fuzz_signature;
    use crate::syntax::{parse_formula, parse_sequent};

    fn f(text: &str) -> Formula {
        parse_formula(text, &fuzz_signature()).unwrap()
    }

    fn s(text: &str) -> Sequent {
        parse_sequent(text, &fuzz_signature()).unwrap()
    }

    #[test]
    fn rule_names_round_trip() {
        for r in RuleId::ALL {
            assert_eq!(r.name().parse::<RuleId>().unwrap(), r);
        }
        assert!("R10".parse::<RuleId>().is_err());
    }

    #[test]
    fn identity_and_projections() {
        assert!(match_rule(&RuleInstance::new(RuleId::R1, vec![], s("p(x1) |- p(x1)"))).is_ok());
        assert!(match_rule(&RuleInstance::new(RuleId::R1, vec![], s("p(x1) |- q(x1)"))).is_err());
        let conj = s("(p(x1) /\\ q(x1)) |- p(x1)");
        assert!(match_rule(&RuleInstance::new(RuleId::R3ii, vec![], conj.clone())).is_ok());
        assert!(match_rule(&RuleInstance::new(RuleId::R3iii, vec![], conj)).is_err());
        assert!(match_rule(&RuleInstance::new(RuleId::R3i, vec![], s("p(x1) |- top"))).is_ok());
        assert!(match_rule(&RuleInstance::new(RuleId::R6, vec![], s("top |- x2 = x2"))).is_ok());
        assert!(match_rule(&RuleInstance::new(RuleId::R6, vec![], s("top |- x2 = x1"))).is_err());
        assert!(match_rule(&RuleInstance::new(RuleId::R6, vec![], s("top |- c1 = c1"))).is_err());
    }

    #[test]
    fn premise_counts_are_checked() {
        let err =
            match_rule(&RuleInstance::new(RuleId::R2, vec![], s("p(x1) |- p(x1)"))).unwrap_err();
        assert!(matches!(err, RuleError::SchemaMismatch { .. }));
    }

    #[test]
    fn cut_and_conjunction_intro() {
        let cut = RuleInstance::new(
            RuleId::R2,
            vec![s("p(x1) |- q(x1)"), s("q(x1) |- top")],
            s("p(x1) |- top"),
        );
        assert!(match_rule(&cut).is_ok());
        let bad = RuleInstance::new(
            RuleId::R2,
            vec![s("p(x1) |- q(x1)"), s("p(x1) |- top")],
            s("p(x1) |- top"),
        );
        assert!(match_rule(&bad).is_err());
        let intro = RuleInstance::new(
            RuleId::R3iv,
            vec![s("p(x1) |- q(x1)"), s("p(x1) |- top")],
            s("p(x1) |- (q(x1) /\\ top)"),
        );
        assert!(match_rule(&intro).is_ok());
    }

    #[test]
    fn join_rules_are_order_insensitive() {
        let set = Some(vec![f("q(x1)"), f("p(x1)")]);
        let w = Witnesses {
            set: set.clone(),
            ..Witnesses::default()
        };
        let intro = RuleInstance::new(RuleId::R4i, vec![], s("p(x1) |- \\/[p(x1), q(x1)]"))
            .with_witnesses(w.clone());
        assert!(match_rule(&intro).is_ok());
        let not_member =
            RuleInstance::new(RuleId::R4i, vec![], s("r(x1, x1) |- \\/[p(x1), q(x1)]"))
                .with_witnesses(w.clone());
        assert!(match_rule(&not_member).is_err());
        let missing = RuleInstance::new(RuleId::R4i, vec![], s("p(x1) |- \\/[p(x1), q(x1)]"));
        assert!(match_rule(&missing).is_err());

        let elim = RuleInstance::new(
            RuleId::R4ii,
            vec![s("q(x1) |- top"), s("p(x1) |- top")],
            s("\\/[p(x1), q(x1)] |- top"),
        )
        .with_witnesses(w.clone());
        assert!(match_rule(&elim).is_ok());
        let short = RuleInstance::new(
            RuleId::R4ii,
            vec![s("q(x1) |- top")],
            s("\\/[p(x1), q(x1)] |- top"),
        )
        .with_witnesses(w.clone());
        assert!(match_rule(&short).is_err());
        let empty = RuleInstance::new(RuleId::R4ii, vec![], s("\\/[] |- p(x1)")).with_witnesses(
            Witnesses {
                set: Some(vec![]),
                ..Witnesses::default()
            },
        );
        assert!(match_rule(&empty).is_ok());

        let dist = RuleInstance::new(
            RuleId::R5,
            vec![],
            s("(r(x1, x2) /\\ \\/[p(x1), q(x1)]) |- \\/[(r(x1, x2) /\\ q(x1)), (r(x1, x2) /\\ p(x1))]"),
        )
        .with_witnesses(w);
        assert!(match_rule(&dist).is_ok());
    }

    #[test]
    fn equality_substitution_rule() {
        let w = |pairs: Vec<(Var, Var)>| Witnesses {
            pairs: Some(pairs),
            ..Witnesses::default()
        };
        let inst = RuleInstance::new(
            RuleId::R7,
            vec![],
            s("((x1 = x2 /\\ x2 = x1) /\\ r(x1, x2)) |- r(x2, x1)"),
        )
        .with_witnesses(w(vec![(1, 2), (2, 1)]));
        assert!(match_rule(&inst).is_ok());
        let identity = RuleInstance::new(RuleId::R7, vec![], s("(x1 = x1 /\\ p(x1)) |- p(x1)"))
            .with_witnesses(w(vec![(1, 1)]));
        assert!(match_rule(&identity).is_ok());
        let capture = RuleInstance::new(
            RuleId::R7,
            vec![],
            s("(x1 = x2 /\\ exists x2 . r(x1, x2)) |- exists x2 . r(x2, x2)"),
        )
        .with_witnesses(w(vec![(1, 2)]));
        assert!(matches!(
            match_rule(&capture),
            Err(RuleError::SideConditionViolated { .. })
        ));
    }

    #[test]
    fn existential_rules() {
        let w = Witnesses {
            x: Some(2),
            y: Some(1),
            ..Witnesses::default()
        };
        let intro = RuleInstance::new(
            RuleId::R8i,
            vec![s("q(x3) |- r(x2, x3)")],
            s("q(x3) |- exists x1 . r(x1, x3)"),
        )
        .with_witnesses(w.clone());
        assert!(match_rule(&intro).is_ok());
        let elim = RuleInstance::new(
            RuleId::R8ii,
            vec![s("exists x1 . p(x1) |- top")],
            s("p(x2) |- top"),
        )
        .with_witnesses(w.clone());
        assert!(match_rule(&elim).is_ok());
        // general terms are not variable substitutions
        let term = RuleInstance::new(
            RuleId::R8ii,
            vec![s("exists x1 . p(x1) |- top")],
            s("p(c1) |- top"),
        )
        .with_witnesses(w);
        assert!(match_rule(&term).is_err());
    }

    #[test]
    fn frobenius_side_condition() {
        let bad = frobenius_instance(f("p(x2)"), 2, f("q(x2)"));
        assert!(matches!(
            match_rule(&bad),
            Err(RuleError::SideConditionViolated { .. })
        ));
        let good = frobenius_instance(f("p(x1)"), 2, f("q(x2)"));
        assert!(match_rule(&good).is_ok());
    }

    #[test]
    fn frobenius_counterexample() {
        let (interp, inst, report) = counterexample_frobenius();
        assert!(!report.valid);
        let w = report.witness.unwrap();
        assert_eq!(interp.render_assignment(&w.assignment), "x1=a");
        assert_eq!(interp.frame().id(w.antecedent), "1");
        assert_eq!(interp.frame().id(w.consequent), "0");
        assert!(match_rule(&inst).is_err());

        let fixed = frobenius_instance(f("p(x2)"), 1, f("q(x1)"));
        assert!(interp.valid_in(&fixed.conclusion).unwrap().valid);

        let c3 = StandardFrame::Chain(3).build().unwrap();
        let bigger = frobenius_interpretation(&c3);
        assert!(!bigger.valid_in(&inst.conclusion).unwrap().valid);
    }

    #[test]
    fn derivations() {
        let leaf = Derivation::leaf(RuleInstance::new(RuleId::R1, vec![], s("p(x1) |- p(x1)")));
        assert_eq!(check_derivation(&leaf).unwrap(), s("p(x1) |- p(x1)"));

        let left = Derivation::leaf(RuleInstance::new(
            RuleId::R3ii,
            vec![],
            s("(p(x1) /\\ q(x1)) |- p(x1)"),
        ));
        let right = Derivation::leaf(RuleInstance::new(
            RuleId::R3iii,
            vec![],
            s("(p(x1) /\\ q(x1)) |- q(x1)"),
        ));
        let root = RuleInstance::new(
            RuleId::R3iv,
            vec![
                s("(p(x1) /\\ q(x1)) |- p(x1)"),
                s("(p(x1) /\\ q(x1)) |- q(x1)"),
            ],
            s("(p(x1) /\\ q(x1)) |- (p(x1) /\\ q(x1))"),
        );
        let tree = Derivation::new(root.clone(), vec![left.clone(), right.clone()]);
        assert_eq!(
            check_derivation(&tree).unwrap(),
            s("(p(x1) /\\ q(x1)) |- (p(x1) /\\ q(x1))")
        );

        let wrong_child = Derivation::leaf(RuleInstance::new(
            RuleId::R3i,
            vec![],
            s("(p(x1) /\\ q(x1)) |- top"),
        ));
        let broken = Derivation::new(root, vec![left, wrong_child]);
        let failures = check_derivation(&broken).unwrap_err();
        assert_eq!(failures.len(), 1);
        assert_eq!(failures[0].path, Vec::<usize>::new());
        assert!(matches!(
            failures[0].kind,
            NodeFailureKind::PremiseMismatch { index: 1, .. }
        ));
        assert!(failures[0].to_string().starts_with("root: premise 1"));
    }

    #[test]
    fn failures_in_subtrees_carry_paths() {
        let bad_leaf = Derivation::leaf(RuleInstance::new(RuleId::R1, vec![], s("p(x1) |- q(x1)")));
        let root = Derivation::new(
            RuleInstance::new(
                RuleId::R2,
                vec![s("p(x1) |- q(x1)"), s("q(x1) |- q(x1)")],
                s("p(x1) |- q(x1)"),
            ),
            vec![
                bad_leaf,
                Derivation::leaf(RuleInstance::new(RuleId::R1, vec![], s("q(x1) |- q(x1)"))),
            ],
        );
        let failures = check_derivation(&root).unwrap_err();
        assert_eq!(failures.len(), 1);
        assert_eq!(failures[0].path, vec![0]);
        assert_eq!(failures[0].to_string().split(':').next().unwrap(), "root/0");
    }

    #[test]
    fn generated_instances_match() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = GenConfig::default();
        for rule in RuleId::ALL {
            for _ in 0..20 {
                let inst = generate_instance(&mut rng, rule, &cfg);
                assert_eq!(match_rule(&inst), Ok(()), "{inst}");
                fuzz_signature()
                    .check_formula(&inst.conclusion.antecedent)
                    .unwrap();
            }
        }
    }

    #[test]
    fn small_fuzz_runs() {
        let mut cfg = FuzzConfig::standard(0, 100).unwrap();
        cfg.frames = vec![StandardFrame::Chain(2).build().unwrap()];
        cfg.domain_sizes = vec![2];
        let r = fuzz_soundness(RuleId::R3iv, &cfg).unwrap();
        assert_eq!(r.failed, 0);
        assert_eq!(r.passed, r.cases);
        assert!(r.cases >= 100);
        assert!(r.retained >= 30);

        cfg.frames = vec![StandardFrame::Powerset(2).build().unwrap()];
        let r = fuzz_soundness(RuleId::R5, &cfg).unwrap();
        assert_eq!((r.passed, r.failed), (100, 0));

        cfg.frames = vec![StandardFrame::Chain(3).build().unwrap()];
        let r = fuzz_soundness(RuleId::R9, &cfg).unwrap();
        assert_eq!((r.passed, r.failed), (100, 0));
    }
}
