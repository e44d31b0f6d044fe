//! Geometric types with cycles: a type together with a finite set of closed
//! rectangle paths, structural checks on those paths, and equivalence.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::equivalence::{canonical_witnesses, for_each_witness, EquivalenceWitness};
use crate::error::PathError;
use crate::model::{GeometricType, Kind};
use crate::paths::{transport, GPath};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeometricTypeWithCycles {
    pub g: GeometricType,
    pub cycles: BTreeSet<GPath>,
}

impl GeometricTypeWithCycles {
    /// Checks that every path is valid over `g` and closed. Duplicates collapse.
    pub fn new(g: GeometricType, cycles: impl IntoIterator<Item = GPath>) -> Result<Self, PathError> {
        let cycles: BTreeSet<GPath> = cycles.into_iter().collect();
        for c in &cycles {
            c.validate(&g)?;
            if !c.is_closed() {
                return Err(PathError::NotClosed);
            }
        }
        Ok(GeometricTypeWithCycles { g, cycles })
    }

    /// Pushes the type and every cycle through `w`.
    pub fn transported(&self, w: &EquivalenceWitness) -> Self {
        GeometricTypeWithCycles {
            g: w.apply(&self.g),
            cycles: self.cycles.iter().map(|c| transport(w, &self.g, c)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CompareMode {
    /// Closed paths are equal up to cyclic rotation.
    #[default]
    Rotation,
    /// Closed paths must match step for step, basepoint included.
    Raw,
}

impl CompareMode {
    fn key(self, p: &GPath) -> GPath {
        match self {
            CompareMode::Rotation => p.rotation_canonical(),
            CompareMode::Raw => p.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleStats {
    pub length: usize,
    /// Maximal runs of steps of one kind, counted cyclically on closed paths.
    pub runs: usize,
    pub canonical: GPath,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleReport {
    pub closed: bool,
    pub valid: bool,
    pub cycle_shaped: bool,
    pub stats: CycleStats,
    pub problems: Vec<String>,
}

fn count_runs(q: &GPath) -> usize {
    let kinds: Vec<Kind> = q.steps().map(|(s, _)| s.kind).collect();
    if kinds.is_empty() {
        return 0;
    }
    let changes = kinds.windows(2).filter(|w| w[0] != w[1]).count();
    if q.is_closed() {
        // A closed path wraps around: count changes cyclically, at least one run.
        let wrap = usize::from(kinds[0] != kinds[kinds.len() - 1]);
        (changes + wrap).max(1)
    } else {
        changes + 1
    }
}

/// Necessary conditions for `q` to be the cycle of some pre-cycle: closed,
/// valid over `g`, and made of an even, positive number of alternating runs
/// of predecessor steps and successor steps.
pub fn check_cycle(g: &GeometricType, q: &GPath) -> CycleReport {
    let mut problems = Vec::new();
    let closed = q.is_closed();
    if !closed {
        problems.push("not closed".to_string());
    }
    let valid = match q.validate(g) {
        Ok(()) => true,
        Err(e) => {
            problems.push(e.to_string());
            false
        }
    };
    let runs = count_runs(q);
    if runs == 0 {
        problems.push("no steps".to_string());
    } else if closed && runs % 2 == 1 {
        problems.push(format!("{runs} monotone runs, expected an even number"));
    }
    let cycle_shaped = closed && valid && runs > 0 && runs.is_multiple_of(2);
    CycleReport {
        closed,
        valid,
        cycle_shaped,
        stats: CycleStats { length: q.len(), runs, canonical: q.rotation_canonical() },
        problems,
    }
}

fn keyed(cycles: &BTreeSet<GPath>, mode: CompareMode) -> BTreeSet<GPath> {
    cycles.iter().map(|c| mode.key(c)).collect()
}

/// A witness between the underlying types that carries one cycle set onto
/// the other, if any.
pub fn cycles_equivalent(
    a1: &GeometricTypeWithCycles,
    a2: &GeometricTypeWithCycles,
    mode: CompareMode,
) -> Option<EquivalenceWitness> {
    let target = keyed(&a2.cycles, mode);
    if keyed(&a1.cycles, mode).len() != target.len() {
        return None;
    }
    let mut found = None;
    for_each_witness(&a1.g, &a2.g, false, &mut |w| {
        let image: BTreeSet<GPath> = a1.cycles.iter().map(|c| mode.key(&transport(&w, &a1.g, c))).collect();
        if image == target {
            found = Some(w);
            false
        } else {
            true
        }
    });
    found
}

/// Canonical underlying type with the smallest transported, rotation-canonical cycle set.
pub fn canonical_with_cycles(a: &GeometricTypeWithCycles) -> GeometricTypeWithCycles {
    let (canon, witnesses) = canonical_witnesses(&a.g);
    let cycles = witnesses
        .iter()
        .map(|w| {
            a.cycles
                .iter()
                .map(|c| transport(w, &a.g, c).rotation_canonical())
                .collect::<BTreeSet<GPath>>()
        })
        .min()
        .expect("the canonical form has a witness");
    GeometricTypeWithCycles { g: canon, cycles }
}
