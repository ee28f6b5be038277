//! Batch driver: parse a problem file, run the requested tasks, emit a
//! deterministic report.
//!
//! Exit codes: 0 on success, 2 for parse errors, 3 for validation errors,
//! 4 for task errors. A subcommand runs the matching entries of the file's
//! task list in file order, or a single task synthesized from the flags
//! when the file lists none.

use num_traits::Zero;
use std::sync::Arc;

use crate::affine::{generate, is_radiant, is_strongly_integral, radiance_class};
use crate::linalg::format_rational;
use crate::local_system::LocalSystem;
use crate::obstruction::{
    chern_group, d2_differential, dazord_delzant, generator_coordinate, realizable_subgroup,
    ChernClass,
};
use crate::problem::{
    parse_model, parse_ring, parse_str, problem_from_data, to_json_string, BuiltProblem,
    ProblemError, ProblemFile, TaskSpec,
};
use crate::report::{
    format_int_vector, format_vector, CoordinatesReport, D2Entry, GroupReport, ObstructionEntry,
    Report, TaskReport, WitnessEntry,
};
use crate::simplicial::SimplicialComplex;
use crate::twisted::{cohomology, ClassCoordinates, Ring, TwistedCochain};

/// Error category determines the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Task(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Task(_) => 4,
        }
    }
}

impl From<ProblemError> for CliError {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::Syntax(m) => CliError::Parse(format!("syntax error: {m}")),
            ProblemError::Semantic(m) => CliError::Parse(format!("semantic error: {m}")),
            ProblemError::Validation(m) => CliError::Validation(m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Validate,
    Cohomology,
    Radiance,
    Obstruction,
    Realizable,
    D2,
}

impl Subcommand {
    fn name(&self) -> &'static str {
        match self {
            Subcommand::Validate => "validate",
            Subcommand::Cohomology => "cohomology",
            Subcommand::Radiance => "radiance",
            Subcommand::Obstruction => "obstruction",
            Subcommand::Realizable => "realizable",
            Subcommand::D2 => "d2",
        }
    }
}

/// Global flags; file task entries may override per task.
#[derive(Debug, Clone)]
pub struct Flags {
    pub ring: Ring,
    pub witness: bool,
    pub all_basis: bool,
}

impl Default for Flags {
    fn default() -> Self {
        Self {
            ring: Ring::Z,
            witness: false,
            all_basis: false,
        }
    }
}

/// Parse a problem file from text.
pub fn parse(text: &str) -> Result<ProblemFile, CliError> {
    Ok(parse_str(text)?)
}

/// Run one subcommand against a parsed file.
pub fn run(
    subcommand: Subcommand,
    file: &ProblemFile,
    flags: &Flags,
) -> Result<Report, CliError> {
    let built = file.build()?;
    let mut tasks: Vec<TaskSpec> = file
        .tasks
        .iter()
        .filter(|t| t.task == subcommand.name())
        .cloned()
        .collect();
    if tasks.is_empty() {
        tasks.push(TaskSpec::named(subcommand.name()));
    }
    let mut reports = Vec::with_capacity(tasks.len());
    for t in &tasks {
        reports.push(run_task(subcommand, t, file, &built, flags)?);
    }
    Ok(Report { tasks: reports })
}

fn run_task(
    subcommand: Subcommand,
    spec: &TaskSpec,
    file: &ProblemFile,
    built: &BuiltProblem,
    flags: &Flags,
) -> Result<TaskReport, CliError> {
    let ring = match &spec.ring {
        Some(r) => parse_ring(r)?,
        None => flags.ring,
    };
    let witness = spec.witness.unwrap_or(flags.witness);
    let all_basis = spec.all_basis.unwrap_or(flags.all_basis);
    match subcommand {
        Subcommand::Validate => {
            let k = &built.complex;
            let counts = (0..=k.dimension()).map(|p| k.simplex_count(p)).collect();
            Ok(TaskReport::Validate {
                ok: true,
                vertices: k.vertex_count(),
                simplex_counts: counts,
                euler_characteristic: k.euler_characteristic(),
                system_rank: built.system.as_ref().map(|s| s.rank()),
                affine_present: built.affine.is_some(),
            })
        }
        Subcommand::Cohomology => {
            let system = built
                .system
                .as_ref()
                .ok_or_else(|| CliError::Task("cohomology needs a system section".into()))?;
            let degrees: Vec<usize> = match spec.degree {
                Some(d) => vec![d],
                None => (0..=system.base().dimension()).collect(),
            };
            let groups = degrees
                .iter()
                .map(|&p| GroupReport::from_shape(&cohomology(system, p, ring).shape()))
                .collect();
            Ok(TaskReport::Cohomology { groups })
        }
        Subcommand::Radiance => {
            let data = built
                .affine
                .as_ref()
                .ok_or_else(|| CliError::Task("radiance needs an affine section".into()))?;
            let cls = radiance_class(data);
            let (radiant, rebasing) = is_radiant(data);
            let witness_entries = if witness {
                rebasing.map(|w| witness_entries(&w))
            } else {
                None
            };
            Ok(TaskReport::Radiance {
                group: GroupReport::from_shape(&cls.group.shape()),
                coordinates: CoordinatesReport::from_coordinates(&cls.coordinates),
                is_radiant: radiant,
                is_strongly_integral: is_strongly_integral(data),
                witness: witness_entries,
            })
        }
        Subcommand::Obstruction => {
            let data = built
                .affine
                .as_ref()
                .ok_or_else(|| CliError::Task("obstruction needs an affine section".into()))?;
            let h2 = chern_group(data);
            let classes = select_chern_classes(file, data.linear(), &h2, all_basis)?;
            let mut entries = Vec::with_capacity(classes.len());
            let mut h3_shape = None;
            for c in &classes {
                let report = dazord_delzant(data, c)
                    .map_err(|e| CliError::Task(format!("obstruction: {e}")))?;
                h3_shape.get_or_insert(report.h3_group.clone());
                entries.push(ObstructionEntry {
                    class: CoordinatesReport::from_coordinates(c.coordinates()),
                    dd_class: CoordinatesReport::from_coordinates(&report.dd_class),
                    is_lagrangian: report.is_lagrangian,
                });
            }
            let h3_shape = h3_shape.expect("at least one class");
            Ok(TaskReport::Obstruction {
                h2_group: GroupReport::from_shape(&h2.shape()),
                h3_group: GroupReport::from_shape(&h3_shape),
                classes: entries,
            })
        }
        Subcommand::Realizable => {
            let data = built
                .affine
                .as_ref()
                .ok_or_else(|| CliError::Task("realizable needs an affine section".into()))?;
            let sub = realizable_subgroup(data);
            let entire = sub.corank == 0;
            Ok(TaskReport::Realizable {
                h2_group: GroupReport::from_shape(&sub.h2_group),
                h3_group: GroupReport::from_shape(&sub.h3_group),
                corank: sub.corank,
                kernel_rank: sub.kernel_basis.len(),
                kernel_basis: sub
                    .kernel_basis
                    .iter()
                    .map(|v| format_int_vector(v))
                    .collect(),
                includes_all_torsion: sub.includes_all_torsion,
                entire_group: entire,
            })
        }
        Subcommand::D2 => {
            let data = built
                .affine
                .as_ref()
                .ok_or_else(|| CliError::Task("d2 needs an affine section".into()))?;
            let x = data
                .translations()
                .to_ring_z()
                .map_err(|_| {
                    CliError::Task(
                        "d2 uses the translation cocycle as the E_2^{1,1} class; it must be integral"
                            .into(),
                    )
                })?;
            let h2 = chern_group(data);
            let classes = select_chern_classes(file, data.linear(), &h2, all_basis)?;
            let trivial = Arc::new(
                LocalSystem::trivial(Arc::clone(data.base()), 1).expect("rank 1 is valid"),
            );
            let target = cohomology(&trivial, 3, Ring::Z);
            let mut entries = Vec::with_capacity(classes.len());
            for c in &classes {
                let d2 = d2_differential(&x, c)
                    .map_err(|e| CliError::Task(format!("d2: {e}")))?;
                let dd = dazord_delzant(data, c)
                    .map_err(|e| CliError::Task(format!("d2: {e}")))?;
                let matches = minus_equals(&d2, &dd.dd_class);
                entries.push(D2Entry {
                    class: CoordinatesReport::from_coordinates(c.coordinates()),
                    d2_class: CoordinatesReport::from_coordinates(&d2),
                    matches_minus_dd: matches,
                });
            }
            Ok(TaskReport::D2 {
                degree: 1,
                target_group: GroupReport::from_shape(&target.shape()),
                classes: entries,
            })
        }
    }
}

/// The Hopf model built-in: S^2 base, trivial rank-1 system, c a generator
/// of H^2(S^2; Z), checked to map a generator of E_2^{0,1} to a generator.
pub fn run_hopf() -> Report {
    let base = Arc::new(SimplicialComplex::sphere2());
    let sys = Arc::new(LocalSystem::trivial(base, 1).expect("rank 1 is valid"));
    let h2 = cohomology(&sys, 2, Ring::Z);
    let c = ChernClass::from_cocycle(&h2, h2.basis_cocycles()[0].clone())
        .expect("generator is a class");
    let h0 = cohomology(&sys, 0, Ring::Z);
    let image = d2_differential(&h0.basis_cocycles()[0], &c).expect("dual systems");
    let coordinate = generator_coordinate(&image);
    let iso = coordinate.as_ref().is_some_and(|g| {
        g == &num_bigint::BigInt::from(1)
    });
    Report {
        tasks: vec![TaskReport::Hopf {
            generator_image: image
                .free
                .first()
                .map(format_rational)
                .unwrap_or_else(|| "0".into()),
            isomorphism: iso,
        }],
    }
}

/// Generate a problem file for a named model expression.
pub fn run_generate(model: &str) -> Result<String, CliError> {
    let spec = parse_model(model)?;
    let data =
        generate(&spec).map_err(|e| CliError::Task(format!("generate: {e}")))?;
    let tasks = vec![
        TaskSpec::named("validate"),
        TaskSpec::named("radiance"),
        TaskSpec::named("realizable"),
    ];
    Ok(to_json_string(&problem_from_data(&data, tasks)))
}

fn witness_entries(w: &TwistedCochain) -> Vec<WitnessEntry> {
    let base = w.system().base();
    base.simplices(w.degree())
        .iter()
        .zip(w.values())
        .map(|(s, v)| WitnessEntry {
            simplex: s.clone(),
            vector: format_vector(v),
        })
        .collect()
}

fn minus_equals(a: &ClassCoordinates, b: &ClassCoordinates) -> bool {
    a.free.len() == b.free.len()
        && a.free
            .iter()
            .zip(&b.free)
            .all(|(x, y)| (x + y).is_zero())
}

fn select_chern_classes(
    file: &ProblemFile,
    linear: &Arc<LocalSystem>,
    h2: &crate::twisted::CohomologyGroup,
    all_basis: bool,
) -> Result<Vec<ChernClass>, CliError> {
    let mut out = Vec::new();
    if all_basis {
        for b in h2.basis_cocycles() {
            out.push(
                ChernClass::from_cocycle(h2, b.clone())
                    .map_err(|e| CliError::Task(format!("basis class: {e}")))?,
            );
        }
        if out.is_empty() {
            return Err(CliError::Task(
                "the chern group is trivial; there are no basis classes".into(),
            ));
        }
        return Ok(out);
    }
    let dual = Arc::new(linear.dual_system());
    if let Some(c) = file.chern_cochain(&dual)? {
        out.push(
            ChernClass::from_cocycle(h2, c)
                .map_err(|e| CliError::Task(format!("chern cocycle: {e}")))?,
        );
    } else if let Some((free, torsion)) = file.chern_coordinates()? {
        let coords = ClassCoordinates { free, torsion };
        out.push(
            ChernClass::from_coordinates(h2, coords)
                .map_err(|e| CliError::Task(format!("chern coordinates: {e}")))?,
        );
    }
    if out.is_empty() {
        return Err(CliError::Task(
            "this task needs a chern section or --all-basis".into(),
        ));
    }
    Ok(out)
}
