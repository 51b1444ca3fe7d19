//! JSON and text file formats, and their conversion to library values.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use gglogic_core::frame::build_frame_with;
use gglogic_core::lindenbaum::{ExtVector, LSpace, Lindenbaum, TopoSystem};
use gglogic_core::proofs::{Derivation, RuleId, RuleInstance, Witnesses};
use gglogic_core::{
    parse_formula, parse_sequent, Elem, FiniteFrame, FrameConfig, FrameError, Interpretation,
    Sequent, Signature, Var,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// `{ "elements": [...], "leq": [[a, b], ...] }`. Top and bottom are derived.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    pub elements: Vec<String>,
    #[serde(default)]
    pub leq: Vec<(String, String)>,
}

impl FrameFile {
    /// Lists the covering pairs of `frame`, which is enough to rebuild it.
    pub fn from_frame(frame: &FiniteFrame) -> Self {
        FrameFile {
            elements: frame.ids().to_vec(),
            leq: frame
                .covers()
                .into_iter()
                .map(|(a, b)| (frame.id(a).to_string(), frame.id(b).to_string()))
                .collect(),
        }
    }

    pub fn build(&self, config: &FrameConfig) -> Result<FiniteFrame, FrameError> {
        build_frame_with(&self.elements, &self.leq, config)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrameRef {
    Path(String),
    Inline(FrameFile),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableFile {
    pub arity: usize,
    /// Keys are comma-joined domain ids; `"..."` covers every unlisted tuple.
    pub table: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpretationFile {
    pub frame: FrameRef,
    pub domain: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functions: BTreeMap<String, TableFile>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub predicates: BTreeMap<String, TableFile>,
}

pub const FALLBACK_KEY: &str = "...";

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub value_frame: FrameFile,
    pub alg_frame: FrameFile,
    pub points: Vec<String>,
    pub rel: BTreeMap<String, BTreeMap<String, String>>,
    /// Assignment behind each point, when the system came from formulas.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub assignments: BTreeMap<String, String>,
    /// Algebra element of each generator.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub classes: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub value_frame: FrameFile,
    pub points: Vec<String>,
    pub opens: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureFile {
    #[serde(default)]
    pub constants: Vec<String>,
    #[serde(default)]
    pub functions: BTreeMap<String, usize>,
    #[serde(default)]
    pub predicates: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    #[serde(default)]
    pub set: Option<Vec<String>>,
    #[serde(default)]
    pub pairs: Option<Vec<(String, String)>>,
    #[serde(default)]
    pub x: Option<String>,
    #[serde(default)]
    pub y: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeFile {
    pub rule: String,
    /// Indices of earlier nodes proving this node's premises, in order.
    #[serde(default)]
    pub premises: Vec<usize>,
    /// Premise sequents, in order. Taken from the referenced nodes when omitted.
    #[serde(default)]
    pub premise_sequents: Option<Vec<String>>,
    pub conclusion: String,
    #[serde(default)]
    pub witnesses: WitnessFile,
}

/// The last node is the root.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivationFile {
    #[serde(default)]
    pub signature: SignatureFile,
    pub nodes: Vec<NodeFile>,
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn load_frame(path: &Path, config: &FrameConfig) -> Result<FiniteFrame, CliError> {
    let file: FrameFile = read_json(path)?;
    file.build(config).map_err(CliError::from)
}

fn resolve_frame(frame: &FrameRef, base: &Path) -> Result<FiniteFrame, CliError> {
    match frame {
        FrameRef::Inline(file) => file.build(&FrameConfig::default()).map_err(CliError::from),
        FrameRef::Path(p) => {
            let path = base.join(p);
            load_frame(&path, &FrameConfig::default())
        }
    }
}

pub fn load_interpretation(path: &Path) -> Result<Interpretation, CliError> {
    let file: InterpretationFile = read_json(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    interpretation_from_file(&file, &base)
}

fn parse_key(interp: &Interpretation, key: &str) -> Result<Vec<usize>, CliError> {
    key.split(',')
        .map(|d| interp.domain_element(d.trim()).map_err(CliError::from))
        .collect()
}

/// Builds an interpretation; relative frame paths resolve against `base`.
pub fn interpretation_from_file(
    file: &InterpretationFile,
    base: &Path,
) -> Result<Interpretation, CliError> {
    let frame = resolve_frame(&file.frame, base)?;
    let mut interp = Interpretation::new(frame, &file.domain)?;
    for (name, value) in &file.constants {
        let d = interp.domain_element(value)?;
        interp.set_constant(name, d)?;
    }
    for (name, spec) in &file.functions {
        let mut entries = BTreeMap::new();
        let mut fallback = None;
        for (key, value) in &spec.table {
            let d = interp.domain_element(value)?;
            if key == FALLBACK_KEY {
                fallback = Some(d);
            } else {
                entries.insert(parse_key(&interp, key)?, d);
            }
        }
        interp.set_function_entries(name, spec.arity, &entries, fallback)?;
    }
    for (name, spec) in &file.predicates {
        let mut entries = BTreeMap::new();
        let mut fallback = None;
        for (key, value) in &spec.table {
            let g = interp.frame().lookup(value).map_err(|_| {
                CliError::Symbol(format!(
                    "unknown frame element `{value}` in table for `{name}`"
                ))
            })?;
            if key == FALLBACK_KEY {
                fallback = Some(g);
            } else {
                entries.insert(parse_key(&interp, key)?, g);
            }
        }
        interp.set_predicate_entries(name, spec.arity, &entries, fallback)?;
    }
    Ok(interp)
}

fn all_tuples(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |d| {
                    let mut t = t.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    out
}

/// Serializes an interpretation with an inline frame and fully listed tables.
pub fn interpretation_to_file(interp: &Interpretation) -> InterpretationFile {
    let domain = interp.domain();
    let key = |t: &[usize]| {
        t.iter()
            .map(|&d| domain[d].as_str())
            .collect::<Vec<_>>()
            .join(",")
    };
    let sig = interp.signature();
    let constants = sig
        .constants()
        .filter_map(|c| {
            interp
                .constant_value(c)
                .map(|d| (c.to_string(), domain[d].clone()))
        })
        .collect();
    let functions = sig
        .functions()
        .map(|(name, arity)| {
            let table = all_tuples(domain.len(), arity)
                .into_iter()
                .filter_map(|t| {
                    interp
                        .function_value(name, &t)
                        .map(|d| (key(&t), domain[d].clone()))
                })
                .collect();
            (name.to_string(), TableFile { arity, table })
        })
        .collect();
    let predicates = sig
        .predicates()
        .map(|(name, arity)| {
            let table = all_tuples(domain.len(), arity)
                .into_iter()
                .filter_map(|t| {
                    interp
                        .predicate_value(name, &t)
                        .map(|g| (key(&t), interp.frame().id(g).to_string()))
                })
                .collect();
            (name.to_string(), TableFile { arity, table })
        })
        .collect();
    InterpretationFile {
        frame: FrameRef::Inline(FrameFile::from_frame(interp.frame())),
        domain: domain.to_vec(),
        constants,
        functions,
        predicates,
    }
}

pub fn system_to_file(lb: &Lindenbaum, interp: &Interpretation) -> SystemFile {
    let mut file = topo_system_to_file(&lb.system);
    let ids = lb.system.point_ids();
    file.assignments = ids
        .iter()
        .zip(lb.points.points())
        .map(|(id, s)| (id.clone(), interp.render_assignment(s)))
        .collect();
    file.classes = lb
        .class_map
        .iter()
        .map(|(phi, a)| (phi.to_string(), lb.system.alg().id(*a).to_string()))
        .collect();
    file
}

pub fn topo_system_to_file(sys: &TopoSystem) -> SystemFile {
    let l = sys.value_frame();
    let alg = sys.alg();
    let rel = sys
        .point_ids()
        .iter()
        .enumerate()
        .map(|(x, id)| {
            let row = alg
                .elements()
                .map(|a| (alg.id(a).to_string(), l.id(sys.rel(x, a)).to_string()))
                .collect();
            (id.clone(), row)
        })
        .collect();
    SystemFile {
        value_frame: FrameFile::from_frame(l),
        alg_frame: FrameFile::from_frame(alg),
        points: sys.point_ids().to_vec(),
        rel,
        assignments: BTreeMap::new(),
        classes: BTreeMap::new(),
    }
}

fn grade_vector(
    l: &FiniteFrame,
    points: &[String],
    row: &BTreeMap<String, String>,
    what: &str,
) -> Result<ExtVector, CliError> {
    if let Some(extra) = row.keys().find(|k| !points.contains(k)) {
        return Err(CliError::Symbol(format!(
            "unknown point `{extra}` in {what}"
        )));
    }
    points
        .iter()
        .map(|p| {
            let v = row
                .get(p)
                .ok_or_else(|| CliError::Parse(format!("{what} has no value for point `{p}`")))?;
            l.lookup(v)
                .map_err(|_| CliError::Symbol(format!("unknown frame element `{v}` in {what}")))
        })
        .collect::<Result<Vec<Elem>, _>>()
        .map(ExtVector)
}

pub fn system_from_file(file: &SystemFile, config: &FrameConfig) -> Result<TopoSystem, CliError> {
    let l = file.value_frame.build(config)?;
    let alg = file.alg_frame.build(config)?;
    if let Some(extra) = file.rel.keys().find(|k| !file.points.contains(k)) {
        return Err(CliError::Symbol(format!("unknown point `{extra}` in rel")));
    }
    let mut cells = Vec::with_capacity(file.points.len() * alg.len());
    for p in &file.points {
        let row = file
            .rel
            .get(p)
            .ok_or_else(|| CliError::Parse(format!("rel has no row for point `{p}`")))?;
        if let Some(extra) = row.keys().find(|k| alg.elem(k).is_none()) {
            return Err(CliError::Symbol(format!(
                "unknown algebra element `{extra}` in rel row `{p}`"
            )));
        }
        for a in alg.ids() {
            let v = row
                .get(a)
                .ok_or_else(|| CliError::Parse(format!("rel row `{p}` has no value for `{a}`")))?;
            cells.push(l.lookup(v).map_err(|_| {
                CliError::Symbol(format!("unknown frame element `{v}` in rel row `{p}`"))
            })?);
        }
    }
    TopoSystem::new(file.points.clone(), l, alg, cells).map_err(|e| CliError::Parse(e.to_string()))
}

pub fn space_to_file(space: &LSpace) -> SpaceFile {
    let l = space.value_frame();
    let opens = space
        .opens()
        .iter()
        .map(|(id, v)| {
            let row = space
                .point_ids()
                .iter()
                .zip(&v.0)
                .map(|(p, &g)| (p.clone(), l.id(g).to_string()))
                .collect();
            (id.clone(), row)
        })
        .collect();
    SpaceFile {
        value_frame: FrameFile::from_frame(l),
        points: space.point_ids().to_vec(),
        opens,
    }
}

/// Builds the space; a failed space invariant is a semantic failure.
pub fn space_from_file(file: &SpaceFile, config: &FrameConfig) -> Result<LSpace, CliError> {
    let l = file.value_frame.build(config)?;
    let opens = file
        .opens
        .iter()
        .map(|(id, row)| {
            Ok((
                id.clone(),
                grade_vector(&l, &file.points, row, &format!("open `{id}`"))?,
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    LSpace::new(file.points.clone(), l, opens).map_err(|e| CliError::Semantic(e.to_string()))
}

pub fn signature_from_file(file: &SignatureFile) -> Result<Signature, CliError> {
    let mut sig = Signature::new();
    for c in &file.constants {
        sig.add_constant(c)?;
    }
    for (f, &n) in &file.functions {
        sig.add_function(f, n)?;
    }
    for (p, &n) in &file.predicates {
        sig.add_predicate(p, n)?;
    }
    Ok(sig)
}

fn parse_var(text: &str) -> Result<Var, CliError> {
    text.trim()
        .strip_prefix('x')
        .and_then(|n| n.parse::<Var>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Parse(format!("`{text}` is not a variable")))
}

fn witnesses_from_file(file: &WitnessFile, sig: &Signature) -> Result<Witnesses, CliError> {
    Ok(Witnesses {
        set: file
            .set
            .as_ref()
            .map(|fs| {
                fs.iter()
                    .map(|f| parse_formula(f, sig))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?,
        pairs: file
            .pairs
            .as_ref()
            .map(|ps| {
                ps.iter()
                    .map(|(a, b)| Ok((parse_var(a)?, parse_var(b)?)))
                    .collect::<Result<Vec<_>, CliError>>()
            })
            .transpose()?,
        x: file.x.as_deref().map(parse_var).transpose()?,
        y: file.y.as_deref().map(parse_var).transpose()?,
    })
}

/// Unfolds the node list into a tree rooted at the last node. Premise
/// indices must point at earlier nodes.
pub fn derivation_from_file(file: &DerivationFile) -> Result<Derivation, CliError> {
    let sig = signature_from_file(&file.signature)?;
    if file.nodes.is_empty() {
        return Err(CliError::Parse("derivation has no nodes".into()));
    }
    let mut built: Vec<Derivation> = Vec::with_capacity(file.nodes.len());
    for (i, node) in file.nodes.iter().enumerate() {
        let rule: RuleId = node
            .rule
            .parse()
            .map_err(|e: gglogic_core::proofs::UnknownRule| {
                CliError::Parse(format!("node {i}: unknown rule `{}`", e.0))
            })?;
        if let Some(&bad) = node.premises.iter().find(|&&p| p >= i) {
            return Err(CliError::Parse(format!(
                "node {i}: premise index {bad} does not refer to an earlier node"
            )));
        }
        let children: Vec<Derivation> = node.premises.iter().map(|&p| built[p].clone()).collect();
        let premises: Vec<Sequent> = match &node.premise_sequents {
            Some(texts) => texts
                .iter()
                .map(|t| parse_sequent(t, &sig))
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::from(e).context(&format!("node {i}")))?,
            None => children.iter().map(|c| c.node.conclusion.clone()).collect(),
        };
        let conclusion = parse_sequent(&node.conclusion, &sig)
            .map_err(|e| CliError::from(e).context(&format!("node {i}")))?;
        let witnesses = witnesses_from_file(&node.witnesses, &sig)
            .map_err(|e| e.context(&format!("node {i}")))?;
        let instance = RuleInstance::new(rule, premises, conclusion).with_witnesses(witnesses);
        built.push(Derivation::new(instance, children));
    }
    Ok(built.pop().expect("nonempty"))
}
