//! One function per subcommand. Each returns the text for stdout and
//! stderr plus an exit code, and never prints directly.

use std::fmt::Write as _;
use std::path::Path;

use gglogic_core::lindenbaum::{
    build_lindenbaum, check_system_axioms, extract_topology, induced_model_check, is_spatial,
    parse_theory, space_to_theory, LSpace, ModelReport, PointSet, DEFAULT_CLOSURE_CAP,
};
use gglogic_core::proofs::{
    check_derivation, counterexample_frobenius, fuzz_soundness, FuzzConfig, RuleId,
};
use gglogic_core::{parse_formula, parse_sequent, FrameConfig, Interpretation};

use crate::error::CliError;
use crate::formats::{
    derivation_from_file, interpretation_to_file, load_frame, load_interpretation, read_json,
    read_text, space_from_file, space_to_file, system_from_file, system_to_file, to_json,
    write_text, DerivationFile, SpaceFile, SystemFile,
};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn failed(stdout: String) -> Self {
        Outcome {
            code: 1,
            stdout,
            stderr: String::new(),
        }
    }
}

/// Writes `document` to `out`, or returns it as stdout with the summary
/// moved to stderr.
fn emit(
    document: String,
    summary: String,
    out: Option<&Path>,
    code: u8,
) -> Result<Outcome, CliError> {
    match out {
        Some(path) => {
            write_text(path, &document)?;
            Ok(Outcome {
                code,
                stdout: summary,
                stderr: String::new(),
            })
        }
        None => Ok(Outcome {
            code,
            stdout: document,
            stderr: summary,
        }),
    }
}

pub fn frame_check(path: &Path, cap: usize) -> Result<Outcome, CliError> {
    let config = FrameConfig {
        size_cap: cap,
        ..FrameConfig::default()
    };
    match load_frame(path, &config) {
        Ok(frame) => Ok(Outcome::ok(format!(
            "OK n_elements={} top={} bot={}\n",
            frame.len(),
            frame.id(frame.top()),
            frame.id(frame.bot())
        ))),
        Err(CliError::Semantic(msg)) => Ok(Outcome::failed(format!("INVALID {msg}\n"))),
        Err(e) => Err(e),
    }
}

pub fn eval(interp_path: &Path, assign: &str, formula: &str) -> Result<Outcome, CliError> {
    let interp = load_interpretation(interp_path)?;
    let s = interp.parse_assignment(assign)?;
    let phi = parse_formula(formula, interp.signature())?;
    let grade = interp.eval(&s, &phi)?;
    Ok(Outcome::ok(format!("{}\n", interp.frame().id(grade))))
}

pub fn sequent_check(interp_path: &Path, sequent: &str) -> Result<Outcome, CliError> {
    let interp = load_interpretation(interp_path)?;
    let seq = parse_sequent(sequent, interp.signature())?;
    let report = interp.valid_in(&seq)?;
    Ok(match report.witness {
        None => Outcome::ok("VALID\n".into()),
        Some(w) => Outcome::failed(format!(
            "INVALID witness={} antecedent={} consequent={}\n",
            interp.render_assignment(&w.assignment),
            interp.frame().id(w.antecedent),
            interp.frame().id(w.consequent)
        )),
    })
}

fn describe_interpretation(interp: &Interpretation) -> String {
    serde_json::to_string(&interpretation_to_file(interp)).expect("plain data serializes")
}

/// The full soundness report. Byte-identical for equal `(seed, cases)`.
pub fn fuzz_report(seed: u64, cases: usize) -> Result<(String, bool), CliError> {
    let config = FuzzConfig::standard(seed, cases)?;
    let mut out = String::new();
    writeln!(
        out,
        "# soundness fuzz seed={seed} cases={cases} frames=chain(2),chain(3),powerset(2) domain_sizes=1,2,3"
    )
    .unwrap();
    let mut violations = Vec::new();
    for rule in RuleId::ALL {
        let report = fuzz_soundness(rule, &config)?;
        writeln!(out, "{report}").unwrap();
        violations.extend(report.violations);
    }
    writeln!(out, "violations={}", violations.len()).unwrap();
    for (i, v) in violations.iter().enumerate() {
        writeln!(out, "## violation {i}").unwrap();
        writeln!(out, "instance: {}", v.instance).unwrap();
        if let Some(w) = &v.report.witness {
            let f = v.interpretation.frame();
            writeln!(
                out,
                "witness={} antecedent={} consequent={}",
                v.interpretation.render_assignment(&w.assignment),
                f.id(w.antecedent),
                f.id(w.consequent)
            )
            .unwrap();
        }
        writeln!(
            out,
            "interpretation: {}",
            describe_interpretation(&v.interpretation)
        )
        .unwrap();
    }

    let (interp, inst, report) = counterexample_frobenius();
    writeln!(out).unwrap();
    writeln!(
        out,
        "R9-unconditioned: {}",
        if report.valid {
            "NO COUNTEREXAMPLE"
        } else {
            "COUNTEREXAMPLE"
        }
    )
    .unwrap();
    writeln!(out, "instance: {}", inst.conclusion).unwrap();
    writeln!(out, "side condition: x1 is free in p(x1)").unwrap();
    match &report.witness {
        Some(w) => {
            let f = interp.frame();
            writeln!(
                out,
                "verdict: INVALID witness={} antecedent={} consequent={}",
                interp.render_assignment(&w.assignment),
                f.id(w.antecedent),
                f.id(w.consequent)
            )
            .unwrap();
        }
        None => writeln!(out, "verdict: VALID").unwrap(),
    }
    writeln!(out, "interpretation: {}", describe_interpretation(&interp)).unwrap();
    Ok((out, violations.is_empty()))
}

pub fn rules_fuzz(seed: u64, cases: usize, out: Option<&Path>) -> Result<Outcome, CliError> {
    let (report, sound) = fuzz_report(seed, cases)?;
    let code = if sound { 0 } else { 1 };
    let summary = format!("rules=14 sound={sound}\n");
    emit(report, summary, out, code)
}

fn read_generators(
    path: &Path,
    interp: &Interpretation,
) -> Result<Vec<gglogic_core::Formula>, CliError> {
    read_text(path)?
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(n, l)| {
            parse_formula(l, interp.signature())
                .map_err(|e| CliError::from(e).context(&format!("{}:{n}", path.display())))
        })
        .collect()
}

pub fn lindenbaum_build(
    interp_path: &Path,
    generators_path: &Path,
    points: &[String],
    cap: usize,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let interp = load_interpretation(interp_path)?;
    let generators = read_generators(generators_path, &interp)?;
    let x = if points.is_empty() {
        PointSet::over_free_vars(&interp, &generators)
    } else {
        let assignments = points
            .iter()
            .map(|p| interp.parse_assignment(p).map_err(CliError::from))
            .collect::<Result<Vec<_>, _>>()?;
        PointSet::new(assignments)?
    };
    let lb = build_lindenbaum(&interp, &x, &generators, cap)?;
    let axioms = check_system_axioms(&lb.system);
    let spatial = is_spatial(&lb.system);
    let code = if axioms.passed() && spatial.spatial {
        0
    } else {
        1
    };
    let summary = format!(
        "alg_size={} spatial={} axioms={}\n",
        lb.system.alg().len(),
        spatial.spatial,
        if axioms.passed() { "ok" } else { "violated" }
    );
    emit(to_json(&system_to_file(&lb, &interp)), summary, out, code)
}

fn load_system(path: &Path) -> Result<gglogic_core::lindenbaum::TopoSystem, CliError> {
    let file: SystemFile = read_json(path)?;
    let config = FrameConfig {
        size_cap: DEFAULT_CLOSURE_CAP,
        ..FrameConfig::default()
    };
    system_from_file(&file, &config)
}

pub fn system_check(path: &Path) -> Result<Outcome, CliError> {
    let sys = load_system(path)?;
    let report = check_system_axioms(&sys);
    Ok(match report.violation {
        None => Outcome::ok(format!(
            "OK checks={} exhaustive={}\n",
            report.checked, report.exhaustive
        )),
        Some(v) => Outcome::failed(format!("VIOLATION {v}\n")),
    })
}

pub fn system_spatial(path: &Path) -> Result<Outcome, CliError> {
    let sys = load_system(path)?;
    let report = is_spatial(&sys);
    Ok(match report.witness {
        None => Outcome::ok("spatial=true\n".into()),
        Some((a, b)) => Outcome::failed(format!("spatial=false pair={a},{b}\n")),
    })
}

pub fn topology_extract(path: &Path, out: Option<&Path>) -> Result<Outcome, CliError> {
    let sys = load_system(path)?;
    if let Some(v) = check_system_axioms(&sys).violation {
        return Ok(Outcome::failed(format!("VIOLATION {v}\n")));
    }
    match extract_topology(&sys) {
        Ok(space) => {
            let summary = format!("opens={}\n", space.opens().len());
            emit(to_json(&space_to_file(&space)), summary, out, 0)
        }
        Err(e) => Ok(Outcome::failed(format!("NOT A TOPOLOGY {e}\n"))),
    }
}

fn render_model_report(report: &ModelReport) -> String {
    let mut out = String::new();
    for name in &report.unknown_atoms {
        writeln!(out, "unknown proposition: {name}").unwrap();
    }
    for p in &report.points {
        match &p.failure {
            None => writeln!(out, "{}: OK", p.point).unwrap(),
            Some(f) => writeln!(
                out,
                "{}: FAIL axiom {} `{}` grades {} > {}",
                p.point, f.axiom, f.text, f.antecedent, f.consequent
            )
            .unwrap(),
        }
    }
    if report.all_ok() {
        writeln!(out, "all points: OK").unwrap();
    } else {
        let failing = report.points.iter().filter(|p| p.failure.is_some()).count();
        writeln!(out, "all points: FAIL ({failing} failing)").unwrap();
    }
    out
}

fn load_space(path: &Path) -> Result<LSpace, CliError> {
    let file: SpaceFile = read_json(path)?;
    space_from_file(&file, &FrameConfig::default())
}

pub fn space_theorize(path: &Path, out: Option<&Path>) -> Result<Outcome, CliError> {
    let space = match load_space(path) {
        Ok(s) => s,
        Err(CliError::Semantic(msg)) => {
            return Ok(Outcome::failed(format!("NOT A TOPOLOGY {msg}\n")))
        }
        Err(e) => return Err(e),
    };
    let theory = space_to_theory(&space);
    let report = induced_model_check(&space, &theory);
    let summary = format!(
        "propositions={} axioms={} policy={}\n{}",
        theory.propositions.len(),
        theory.axioms.len(),
        theory.policy,
        render_model_report(&report)
    );
    let code = if report.all_ok() { 0 } else { 1 };
    emit(theory.to_string(), summary, out, code)
}

pub fn theory_check(space_path: &Path, theory_path: &Path) -> Result<Outcome, CliError> {
    let space = load_space(space_path)?;
    let theory = parse_theory(&read_text(theory_path)?)?;
    let report = induced_model_check(&space, &theory);
    let text = render_model_report(&report);
    Ok(if report.all_ok() {
        Outcome::ok(text)
    } else {
        Outcome::failed(text)
    })
}

pub fn derivation_check(path: &Path) -> Result<Outcome, CliError> {
    let file: DerivationFile = read_json(path)?;
    let d = derivation_from_file(&file)?;
    Ok(match check_derivation(&d) {
        Ok(root) => Outcome::ok(format!("OK proves {root}\n")),
        Err(failures) => {
            let mut out = String::new();
            for f in &failures {
                writeln!(out, "FAIL {f}").unwrap();
            }
            writeln!(out, "INVALID failures={}", failures.len()).unwrap();
            Outcome::failed(out)
        }
    })
}
