//! Deterministic reports: one entry per executed task, renderable both as
//! a human-readable table and as JSON. Both renderings are derived from the
//! same value, and identical inputs produce byte-identical output.

use serde::Serialize;

use crate::linalg::{format_rational, Rational};
use crate::twisted::{ClassCoordinates, GroupShape};
use num_bigint::BigInt;
use std::fmt::Write as _;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub tasks: Vec<TaskReport>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct GroupReport {
    pub degree: usize,
    pub ring: String,
    pub free_rank: usize,
    pub torsion: Vec<String>,
}

impl GroupReport {
    pub fn from_shape(s: &GroupShape) -> Self {
        Self {
            degree: s.degree,
            ring: s.ring.to_string(),
            free_rank: s.free_rank,
            torsion: s.torsion.iter().map(|t| t.to_string()).collect(),
        }
    }

    fn render(&self) -> String {
        let torsion = if self.torsion.is_empty() {
            "[]".to_string()
        } else {
            format!("[{}]", self.torsion.join(", "))
        };
        format!(
            "H^{}({}): free rank {}, torsion {}",
            self.degree, self.ring, self.free_rank, torsion
        )
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CoordinatesReport {
    pub free: Vec<String>,
    pub torsion: Vec<String>,
}

impl CoordinatesReport {
    pub fn from_coordinates(c: &ClassCoordinates) -> Self {
        Self {
            free: c.free.iter().map(format_rational).collect(),
            torsion: c.torsion.iter().map(|t| t.to_string()).collect(),
        }
    }

    fn render(&self) -> String {
        let free = format!("[{}]", self.free.join(", "));
        if self.torsion.is_empty() {
            free
        } else {
            format!("{} torsion [{}]", free, self.torsion.join(", "))
        }
    }
}

pub fn format_vector(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

pub fn format_int_vector(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct WitnessEntry {
    pub simplex: Vec<usize>,
    pub vector: Vec<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ObstructionEntry {
    pub class: CoordinatesReport,
    pub dd_class: CoordinatesReport,
    pub is_lagrangian: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct D2Entry {
    pub class: CoordinatesReport,
    pub d2_class: CoordinatesReport,
    pub matches_minus_dd: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum TaskReport {
    Validate {
        ok: bool,
        vertices: usize,
        simplex_counts: Vec<usize>,
        euler_characteristic: i64,
        system_rank: Option<usize>,
        affine_present: bool,
    },
    Cohomology {
        groups: Vec<GroupReport>,
    },
    Radiance {
        group: GroupReport,
        coordinates: CoordinatesReport,
        is_radiant: bool,
        is_strongly_integral: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<Vec<WitnessEntry>>,
    },
    Obstruction {
        h2_group: GroupReport,
        h3_group: GroupReport,
        classes: Vec<ObstructionEntry>,
    },
    Realizable {
        h2_group: GroupReport,
        h3_group: GroupReport,
        corank: usize,
        kernel_rank: usize,
        kernel_basis: Vec<Vec<String>>,
        includes_all_torsion: bool,
        entire_group: bool,
    },
    D2 {
        degree: usize,
        target_group: GroupReport,
        classes: Vec<D2Entry>,
    },
    Hopf {
        generator_image: String,
        isomorphism: bool,
    },
}

impl Report {
    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for task in &self.tasks {
            match task {
                TaskReport::Validate {
                    ok,
                    vertices,
                    simplex_counts,
                    euler_characteristic,
                    system_rank,
                    affine_present,
                } => {
                    let _ = writeln!(out, "task: validate");
                    let _ = writeln!(out, "  ok: {ok}");
                    let _ = writeln!(out, "  vertices: {vertices}");
                    let counts: Vec<String> =
                        simplex_counts.iter().map(|c| c.to_string()).collect();
                    let _ = writeln!(out, "  simplex counts: [{}]", counts.join(", "));
                    let _ = writeln!(out, "  euler characteristic: {euler_characteristic}");
                    match system_rank {
                        Some(r) => {
                            let _ = writeln!(out, "  system: rank {r}, cocycle ok");
                        }
                        None => {
                            let _ = writeln!(out, "  system: none");
                        }
                    }
                    let _ = writeln!(out, "  affine: {}", if *affine_present { "ok" } else { "none" });
                }
                TaskReport::Cohomology { groups } => {
                    let _ = writeln!(out, "task: cohomology");
                    for g in groups {
                        let _ = writeln!(out, "  {}", g.render());
                    }
                }
                TaskReport::Radiance {
                    group,
                    coordinates,
                    is_radiant,
                    is_strongly_integral,
                    witness,
                } => {
                    let _ = writeln!(out, "task: radiance");
                    let _ = writeln!(out, "  group {}", group.render());
                    let _ = writeln!(out, "  class coordinates: {}", coordinates.render());
                    let _ = writeln!(out, "  is_radiant: {is_radiant}");
                    let _ = writeln!(out, "  is_strongly_integral: {is_strongly_integral}");
                    if let Some(w) = witness {
                        let _ = writeln!(out, "  witness:");
                        for e in w {
                            let _ = writeln!(
                                out,
                                "    {:?} -> [{}]",
                                e.simplex,
                                e.vector.join(", ")
                            );
                        }
                    }
                }
                TaskReport::Obstruction {
                    h2_group,
                    h3_group,
                    classes,
                } => {
                    let _ = writeln!(out, "task: obstruction");
                    let _ = writeln!(out, "  chern group {}", h2_group.render());
                    let _ = writeln!(out, "  target {}", h3_group.render());
                    for c in classes {
                        let _ = writeln!(
                            out,
                            "  class {} -> D = {}, is_lagrangian: {}",
                            c.class.render(),
                            c.dd_class.render(),
                            c.is_lagrangian
                        );
                    }
                }
                TaskReport::Realizable {
                    h2_group,
                    h3_group,
                    corank,
                    kernel_rank,
                    kernel_basis,
                    includes_all_torsion,
                    entire_group,
                } => {
                    let _ = writeln!(out, "task: realizable");
                    let _ = writeln!(out, "  chern group {}", h2_group.render());
                    let _ = writeln!(out, "  target {}", h3_group.render());
                    let _ = writeln!(out, "  corank: {corank}");
                    let _ = writeln!(out, "  kernel rank: {kernel_rank}");
                    let _ = writeln!(out, "  includes all torsion: {includes_all_torsion}");
                    if *entire_group {
                        let _ = writeln!(out, "  realizable: entire group");
                    } else {
                        let _ = writeln!(out, "  kernel basis:");
                        for b in kernel_basis {
                            let _ = writeln!(out, "    [{}]", b.join(", "));
                        }
                    }
                }
                TaskReport::D2 {
                    degree,
                    target_group,
                    classes,
                } => {
                    let _ = writeln!(out, "task: d2");
                    let _ = writeln!(out, "  degree: {degree}");
                    let _ = writeln!(out, "  target {}", target_group.render());
                    for c in classes {
                        let _ = writeln!(
                            out,
                            "  class {} -> d2 = {}, matches -D: {}",
                            c.class.render(),
                            c.d2_class.render(),
                            c.matches_minus_dd
                        );
                    }
                }
                TaskReport::Hopf {
                    generator_image,
                    isomorphism,
                } => {
                    let _ = writeln!(out, "task: d2 (hopf model)");
                    let _ = writeln!(out, "  generator image coordinate: {generator_image}");
                    let _ = writeln!(out, "  isomorphism: {isomorphism}");
                }
            }
        }
        out
    }
}
