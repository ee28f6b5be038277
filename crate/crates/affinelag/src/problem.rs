//! The problem file format: one JSON document with `complex`, `system`,
//! `affine`, `chern` and `tasks` sections.
//!
//! All matrices are row-major arrays of integer strings and all rationals
//! are "p/q" strings, so exactness survives serialization. The complex
//! lists every simplex of every dimension; the system and affine sections
//! list only the edges carrying a non-identity transport or a nonzero
//! translation. Edge data is stored in the engine convention: the matrix on
//! [i,j] transports the stalk at j to the stalk at i, and the translation
//! vector is the twisted cocycle value on [i,j].

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::affine::{AffineError, IntegralAffineData, ModelSpec};
use crate::linalg::{format_rational, parse_rational, IntMatrix, Rational};
use crate::local_system::LocalSystem;
use crate::simplicial::SimplicialComplex;
use crate::twisted::{Ring, TwistedCochain};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProblemFile {
    pub complex: ComplexSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub affine: Option<AffineSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chern: Option<ChernSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tasks: Vec<TaskSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ComplexSection {
    pub vertices: usize,
    /// simplices[p] lists the p-simplices as increasing vertex tuples
    pub simplices: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SystemSection {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<EdgeMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EdgeMatrix {
    pub edge: Vec<usize>,
    /// row-major rank x rank integer strings
    pub matrix: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AffineSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub translations: Vec<EdgeVector>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EdgeVector {
    pub edge: Vec<usize>,
    /// rationals as "p/q" strings
    pub vector: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ChernSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<Vec<SimplexVector>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<CoordinateSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SimplexVector {
    pub simplex: Vec<usize>,
    pub vector: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CoordinateSpec {
    pub free: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub torsion: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TaskSpec {
    pub task: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ring: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_basis: Option<bool>,
}

pub const TASK_NAMES: &[&str] = &[
    "validate",
    "cohomology",
    "radiance",
    "obstruction",
    "realizable",
    "d2",
];

/// Problem file errors, split by exit-code category: syntax errors come
/// from the JSON layer with a location, semantic errors name the offending
/// field, and validation errors are engine invariant violations.
#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("semantic error: {0}")]
    Semantic(String),
    #[error("validation error: {0}")]
    Validation(String),
}

/// Engine-level data built from a problem file.
#[derive(Debug)]
pub struct BuiltProblem {
    pub complex: Arc<SimplicialComplex>,
    pub system: Option<Arc<LocalSystem>>,
    pub affine: Option<IntegralAffineData>,
}

pub fn parse_str(text: &str) -> Result<ProblemFile, ProblemError> {
    let file: ProblemFile = serde_json::from_str(text)
        .map_err(|e| ProblemError::Syntax(format!("{e}")))?;
    for t in &file.tasks {
        if !TASK_NAMES.contains(&t.task.as_str()) {
            return Err(ProblemError::Semantic(format!(
                "unknown task `{}`",
                t.task
            )));
        }
        if let Some(r) = &t.ring {
            parse_ring(r)?;
        }
    }
    Ok(file)
}

pub fn parse_ring(s: &str) -> Result<Ring, ProblemError> {
    match s {
        "Z" => Ok(Ring::Z),
        "Q" => Ok(Ring::Q),
        other => Err(ProblemError::Semantic(format!(
            "ring must be Z or Q, got `{other}`"
        ))),
    }
}

fn parse_bigint(s: &str, what: &str) -> Result<BigInt, ProblemError> {
    s.trim()
        .parse()
        .map_err(|_| ProblemError::Semantic(format!("{what}: invalid integer `{s}`")))
}

fn parse_rat(s: &str, what: &str) -> Result<Rational, ProblemError> {
    parse_rational(s).map_err(|e| ProblemError::Semantic(format!("{what}: {e}")))
}

impl ProblemFile {
    /// Build and validate the engine objects this file describes.
    pub fn build(&self) -> Result<BuiltProblem, ProblemError> {
        let complex = SimplicialComplex::from_simplices(
            self.complex.vertices,
            self.complex.simplices.clone(),
        );
        complex
            .validate()
            .map_err(|v| ProblemError::Validation(format!("complex: {v}")))?;
        let complex = Arc::new(complex);

        let system = match &self.system {
            None => None,
            Some(sec) => {
                if sec.rank == 0 {
                    return Err(ProblemError::Semantic("system rank must be >= 1".into()));
                }
                let mut edges = Vec::new();
                for em in &sec.edges {
                    if em.matrix.len() != sec.rank * sec.rank {
                        return Err(ProblemError::Semantic(format!(
                            "edge {:?}: matrix needs {} entries, got {}",
                            em.edge,
                            sec.rank * sec.rank,
                            em.matrix.len()
                        )));
                    }
                    let entries = em
                        .matrix
                        .iter()
                        .map(|s| parse_bigint(s, &format!("edge {:?}", em.edge)))
                        .collect::<Result<Vec<_>, _>>()?;
                    let m = IntMatrix::new(sec.rank, sec.rank, entries)
                        .expect("length checked above");
                    edges.push((em.edge.clone(), m));
                }
                let sys = LocalSystem::from_edges(Arc::clone(&complex), sec.rank, &edges)
                    .map_err(|e| ProblemError::Semantic(format!("system: {e}")))?;
                sys.validate_cocycle()
                    .map_err(|v| ProblemError::Validation(format!("system: {v}")))?;
                Some(Arc::new(sys))
            }
        };

        let affine = match &self.affine {
            None => None,
            Some(sec) => {
                let system = system.as_ref().ok_or_else(|| {
                    ProblemError::Semantic("affine section requires a system section".into())
                })?;
                let rank = system.rank();
                let mut cochain = TwistedCochain::zero(Arc::clone(system), 1, Ring::Q);
                for ev in &sec.translations {
                    if ev.vector.len() != rank {
                        return Err(ProblemError::Semantic(format!(
                            "edge {:?}: translation vector needs {rank} entries, got {}",
                            ev.edge,
                            ev.vector.len()
                        )));
                    }
                    let v = ev
                        .vector
                        .iter()
                        .map(|s| parse_rat(s, &format!("edge {:?}", ev.edge)))
                        .collect::<Result<Vec<_>, _>>()?;
                    cochain.set_value(&ev.edge, v).map_err(|e| {
                        ProblemError::Semantic(format!("affine: {e}"))
                    })?;
                }
                let data = IntegralAffineData::new(Arc::clone(system), cochain).map_err(
                    |e| match e {
                        AffineError::AffineCocycle(_) | AffineError::Linear(_) => {
                            ProblemError::Validation(format!("affine: {e}"))
                        }
                        other => ProblemError::Semantic(format!("affine: {other}")),
                    },
                )?;
                Some(data)
            }
        };

        Ok(BuiltProblem {
            complex,
            system,
            affine,
        })
    }

    /// Parse the chern section into an explicit cocycle over the dual
    /// system, when present.
    pub fn chern_cochain(
        &self,
        dual: &Arc<LocalSystem>,
    ) -> Result<Option<TwistedCochain>, ProblemError> {
        let Some(sec) = &self.chern else {
            return Ok(None);
        };
        let Some(entries) = &sec.cocycle else {
            return Ok(None);
        };
        let mut c = TwistedCochain::zero(Arc::clone(dual), 2, Ring::Z);
        for sv in entries {
            let v = sv
                .vector
                .iter()
                .map(|s| parse_rat(s, &format!("chern simplex {:?}", sv.simplex)))
                .collect::<Result<Vec<_>, _>>()?;
            c.set_value(&sv.simplex, v)
                .map_err(|e| ProblemError::Semantic(format!("chern: {e}")))?;
        }
        Ok(Some(c))
    }

    pub fn chern_coordinates(&self) -> Result<Option<(Vec<Rational>, Vec<BigInt>)>, ProblemError> {
        let Some(sec) = &self.chern else {
            return Ok(None);
        };
        let Some(spec) = &sec.coordinates else {
            return Ok(None);
        };
        let free = spec
            .free
            .iter()
            .map(|s| parse_rat(s, "chern coordinates"))
            .collect::<Result<Vec<_>, _>>()?;
        let torsion = spec
            .torsion
            .iter()
            .map(|s| parse_bigint(s, "chern coordinates"))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some((free, torsion)))
    }
}

/// Serialize an affine datum (and optional task list) into a problem file.
pub fn problem_from_data(data: &IntegralAffineData, tasks: Vec<TaskSpec>) -> ProblemFile {
    let base = data.base();
    let simplices: Vec<Vec<Vec<usize>>> = (0..=base.dimension())
        .map(|p| base.simplices(p).to_vec())
        .collect();
    let rank = data.rank();
    let identity = IntMatrix::identity(rank);
    let mut edges = Vec::new();
    let mut translations = Vec::new();
    for (i, edge) in base.simplices(1).iter().enumerate() {
        let m = data.linear().transport_by_index(i);
        if m != &identity {
            edges.push(EdgeMatrix {
                edge: edge.clone(),
                matrix: m.entries().iter().map(|e| e.to_string()).collect(),
            });
        }
        let t = &data.translations().values()[i];
        if !t.iter().all(Zero::is_zero) {
            translations.push(EdgeVector {
                edge: edge.clone(),
                vector: t.iter().map(format_rational).collect(),
            });
        }
    }
    ProblemFile {
        complex: ComplexSection {
            vertices: base.vertex_count(),
            simplices,
        },
        system: Some(SystemSection { rank, edges }),
        affine: Some(AffineSection { translations }),
        chern: None,
        tasks,
    }
}

/// Parse a model expression such as `circle(1/2)`,
/// `holonomy_circle([[1,0],[-1,1]])`, `product(circle(1),circle(2))`,
/// `standard_torus(3)` or the shorthands `zn(1,1,1)` and `hyperbolic_y`.
pub fn parse_model(text: &str) -> Result<ModelSpec, ProblemError> {
    let text = text.trim();
    let (name, args) = split_call(text)?;
    match name {
        "circle" => {
            let scale = parse_rat(args_one(args, "circle")?, "circle scale")?;
            Ok(ModelSpec::Circle { scale })
        }
        "holonomy_circle" => {
            let m = parse_int_matrix(args_one(args, "holonomy_circle")?)?;
            Ok(ModelSpec::HolonomyCircle { matrix: m })
        }
        "product" => {
            let parts = split_args(args.ok_or_else(|| {
                ProblemError::Semantic("product needs at least one factor".into())
            })?)?;
            let models = parts
                .iter()
                .map(|p| parse_model(p))
                .collect::<Result<Vec<_>, _>>()?;
            if models.is_empty() {
                return Err(ProblemError::Semantic(
                    "product needs at least one factor".into(),
                ));
            }
            Ok(ModelSpec::Product(models))
        }
        "standard_torus" => {
            let parts = split_args(args.ok_or_else(|| {
                ProblemError::Semantic("standard_torus needs a dimension".into())
            })?)?;
            if parts.is_empty() || parts.len() > 2 {
                return Err(ProblemError::Semantic(
                    "standard_torus takes a dimension and optional translation rows".into(),
                ));
            }
            let dim: usize = parts[0].trim().parse().map_err(|_| {
                ProblemError::Semantic(format!("invalid torus dimension `{}`", parts[0]))
            })?;
            let translations = if parts.len() == 2 {
                parse_rational_rows(&parts[1])?
            } else {
                vec![]
            };
            Ok(ModelSpec::StandardTorus { dim, translations })
        }
        "zn" => {
            let parts = split_args(
                args.ok_or_else(|| ProblemError::Semantic("zn needs indices".into()))?,
            )?;
            let mut factors = Vec::new();
            for p in parts {
                let n: i64 = p.trim().parse().map_err(|_| {
                    ProblemError::Semantic(format!("invalid zn index `{p}`"))
                })?;
                factors.push(ModelSpec::HolonomyCircle {
                    matrix: IntMatrix::from_rows(&[vec![1, 0], vec![-n, 1]]),
                });
            }
            if factors.is_empty() {
                return Err(ProblemError::Semantic("zn needs indices".into()));
            }
            Ok(ModelSpec::Product(factors))
        }
        "hyperbolic_y" => {
            if args.is_some() {
                return Err(ProblemError::Semantic(
                    "hyperbolic_y takes no arguments".into(),
                ));
            }
            let m = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
            Ok(ModelSpec::Product(vec![
                ModelSpec::HolonomyCircle { matrix: m.clone() },
                ModelSpec::HolonomyCircle { matrix: m.clone() },
                ModelSpec::HolonomyCircle { matrix: m },
            ]))
        }
        other => Err(ProblemError::Semantic(format!("unknown model `{other}`"))),
    }
}

fn split_call(text: &str) -> Result<(&str, Option<&str>), ProblemError> {
    match text.find('(') {
        None => Ok((text, None)),
        Some(open) => {
            if !text.ends_with(')') {
                return Err(ProblemError::Semantic(format!(
                    "unbalanced parentheses in `{text}`"
                )));
            }
            Ok((&text[..open], Some(&text[open + 1..text.len() - 1])))
        }
    }
}

fn args_one<'a>(args: Option<&'a str>, what: &str) -> Result<&'a str, ProblemError> {
    args.map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| ProblemError::Semantic(format!("{what} needs one argument")))
}

/// Split on commas at bracket depth zero.
fn split_args(args: &str) -> Result<Vec<String>, ProblemError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in args.chars() {
        match ch {
            '(' | '[' => {
                depth += 1;
                cur.push(ch);
            }
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(ProblemError::Semantic(format!(
                        "unbalanced brackets in `{args}`"
                    )));
                }
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err(ProblemError::Semantic(format!(
            "unbalanced brackets in `{args}`"
        )));
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    Ok(out)
}

fn parse_rational_rows(text: &str) -> Result<Vec<Vec<Rational>>, ProblemError> {
    let text = text.trim();
    let inner = text
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| ProblemError::Semantic(format!("expected [[..],[..]] in `{text}`")))?;
    let rows = split_args(inner)?;
    rows.iter()
        .map(|row| {
            let inner = row
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| ProblemError::Semantic(format!("expected [..] row in `{row}`")))?;
            split_args(inner)?
                .iter()
                .map(|s| parse_rat(s, "matrix entry"))
                .collect()
        })
        .collect()
}

fn parse_int_matrix(text: &str) -> Result<IntMatrix, ProblemError> {
    let rows = parse_rational_rows(text)?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(ProblemError::Semantic(format!(
            "expected a square matrix, got `{text}`"
        )));
    }
    let mut entries = Vec::with_capacity(n * n);
    for r in &rows {
        for x in r {
            if !x.is_integer() {
                return Err(ProblemError::Semantic(format!(
                    "matrix entries must be integers, got `{x}`"
                )));
            }
            entries.push(x.numer().clone());
        }
    }
    Ok(IntMatrix::new(n, n, entries).expect("square by construction"))
}

/// Canonical pretty-printed JSON for files and reports.
pub fn to_json_string(file: &ProblemFile) -> String {
    let mut out = serde_json::to_string_pretty(file).expect("serializable");
    out.push('\n');
    out
}

impl Default for TaskSpec {
    fn default() -> Self {
        Self {
            task: "validate".into(),
            ring: None,
            degree: None,
            witness: None,
            all_basis: None,
        }
    }
}

impl TaskSpec {
    pub fn named(task: &str) -> Self {
        Self {
            task: task.into(),
            ..Self::default()
        }
    }
}

/// True when the matrix string list encodes the identity (used by tests).
pub fn is_identity_strings(rank: usize, entries: &[String]) -> bool {
    entries.len() == rank * rank
        && entries.iter().enumerate().all(|(i, s)| {
            let expect = if i / rank == i % rank {
                BigInt::one()
            } else {
                BigInt::zero()
            };
            s.parse::<BigInt>().map(|v| v == expect).unwrap_or(false)
        })
}
