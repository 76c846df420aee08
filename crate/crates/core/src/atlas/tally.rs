use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::expr::BooleanExpr;
use super::AtlasError;
use crate::criteria::{FlagEvaluator, Predicate, Thresholds};
use crate::parallel;
use crate::quasirandom::{FeasibleStream, SequenceSpec};
use crate::states::Family;

/// Counts of feasible points per truth assignment of a predicate list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomTally {
    pub family: Family,
    pub predicates: Vec<Predicate>,
    /// Indexed by assignment `Σ bitⱼ·2ʲ`.
    pub counts: Vec<u64>,
    pub raw_total: u64,
    pub feasible_total: u64,
    pub spec: SequenceSpec,
    /// First raw index not yet consumed.
    pub next_index: u64,
    pub thresholds: Thresholds,
}

impl AtomTally {
    pub fn new(family: Family, predicates: &[Predicate], spec: SequenceSpec, thresholds: Thresholds) -> Self {
        Self {
            family,
            predicates: predicates.to_vec(),
            counts: vec![0; 1 << predicates.len()],
            raw_total: 0,
            feasible_total: 0,
            spec: SequenceSpec {
                dim: family.n_coords(),
                ..spec
            },
            next_index: spec.start_index,
            thresholds,
        }
    }

    fn same_setup(&self, other: &Self) -> bool {
        self.family == other.family
            && self.predicates == other.predicates
            && self.spec == other.spec
            && self.thresholds == other.thresholds
    }

    /// Adds the counts of a tally over a disjoint index range.
    pub fn merge(&mut self, other: &AtomTally) -> Result<(), AtlasError> {
        if !self.same_setup(other) {
            return Err(AtlasError::IncompatibleTallies);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.raw_total += other.raw_total;
        self.feasible_total += other.feasible_total;
        self.next_index = self.next_index.max(other.next_index);
        Ok(())
    }

    /// Per-assignment probabilities.
    pub fn probabilities(&self) -> Result<Vec<f64>, AtlasError> {
        if self.feasible_total == 0 {
            return Err(AtlasError::EmptyTally);
        }
        let n = self.feasible_total as f64;
        Ok(self.counts.iter().map(|&c| c as f64 / n).collect())
    }

    /// Counts in canonical atom order.
    pub fn atom_counts(&self) -> Vec<u64> {
        canonical_atom_order(self.predicates.len())
            .into_iter()
            .map(|a| self.counts[a])
            .collect()
    }

    /// Probabilities in canonical atom order (see [`canonical_atom_order`]).
    pub fn atom_probabilities(&self) -> Result<Vec<f64>, AtlasError> {
        let p = self.probabilities()?;
        Ok(canonical_atom_order(self.predicates.len()).into_iter().map(|a| p[a]).collect())
    }

    /// Marginal tally over a sub-list of the predicates.
    pub fn project(&self, predicates: &[Predicate]) -> Result<AtomTally, AtlasError> {
        let pos: Vec<usize> = predicates
            .iter()
            .map(|p| {
                self.predicates
                    .iter()
                    .position(|x| x == p)
                    .ok_or(AtlasError::Expr(super::ExprError::NotInTally(*p)))
            })
            .collect::<Result<_, _>>()?;
        let mut counts = vec![0u64; 1 << predicates.len()];
        for (a, &c) in self.counts.iter().enumerate() {
            let b = pos.iter().enumerate().fold(0, |acc, (k, &j)| acc | ((a >> j & 1) << k));
            counts[b] += c;
        }
        Ok(AtomTally {
            predicates: predicates.to_vec(),
            counts,
            ..self.clone()
        })
    }

    /// Number of feasible points satisfying `expr`.
    pub fn eval_count(&self, expr: &BooleanExpr) -> Result<u64, AtlasError> {
        let table = expr.truth_table(&self.predicates)?;
        Ok(self.counts.iter().zip(table).filter(|(_, t)| *t).map(|(c, _)| c).sum())
    }

    /// Estimated probability of `expr`.
    pub fn eval(&self, expr: &BooleanExpr) -> Result<f64, AtlasError> {
        if self.feasible_total == 0 {
            return Err(AtlasError::EmptyTally);
        }
        Ok(self.eval_count(expr)? as f64 / self.feasible_total as f64)
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.feasible_total as f64 / self.raw_total.max(1) as f64
    }
}

/// Sums `masses` (indexed by assignment over `predicates`) where `expr` holds.
pub fn eval_masses(expr: &BooleanExpr, predicates: &[Predicate], masses: &[f64]) -> Result<f64, AtlasError> {
    let table = expr.truth_table(predicates)?;
    Ok(masses.iter().zip(table).filter(|(_, t)| *t).map(|(m, _)| m).sum())
}

/// Assignment indices in atom order: fewest negations first, ties broken
/// lexicographically by the set of negated predicate positions.
///
/// For `[P, S, PPT]` this is P∧S∧PPT, ¬P∧S∧PPT, P∧¬S∧PPT, P∧S∧¬PPT,
/// ¬P∧¬S∧PPT, ¬P∧S∧¬PPT, P∧¬S∧¬PPT, ¬P∧¬S∧¬PPT.
pub fn canonical_atom_order(k: usize) -> Vec<usize> {
    let full = (1usize << k) - 1;
    let negated = |a: usize| -> Vec<usize> { (0..k).filter(|j| (full ^ a) >> j & 1 == 1).collect() };
    let mut order: Vec<usize> = (0..=full).collect();
    order.sort_by_key(|&a| {
        let n = negated(a);
        (n.len(), n)
    });
    order
}

/// Label such as `¬P∧S∧PPT` for an assignment.
pub fn assignment_label(predicates: &[Predicate], assignment: usize) -> String {
    predicates
        .iter()
        .enumerate()
        .map(|(j, p)| {
            if assignment >> j & 1 == 1 {
                p.name().to_string()
            } else {
                format!("¬{}", p.name())
            }
        })
        .collect::<Vec<_>>()
        .join("∧")
}

/// Catalog-style name such as `atom_notP_S_PPT`.
pub fn assignment_name(predicates: &[Predicate], assignment: usize) -> String {
    let parts: Vec<String> = predicates
        .iter()
        .enumerate()
        .map(|(j, p)| {
            if assignment >> j & 1 == 1 {
                p.name().to_string()
            } else {
                format!("not{}", p.name())
            }
        })
        .collect();
    format!("atom_{}", parts.join("_"))
}

fn tally_chunk(ev: &FlagEvaluator, spec: SequenceSpec, range: Range<u64>) -> (Vec<u64>, u64, u64) {
    let mut counts = vec![0u64; 1 << ev.predicates().len()];
    let mut stream = FeasibleStream::new(spec, ev.family(), range).expect("spec validated by caller");
    for (_, q) in stream.by_ref() {
        counts[ev.evaluate(&q).0] += 1;
    }
    (counts, stream.raw_count(), stream.accepted_count())
}

/// Extends `tally` with the raw indices `[next_index, next_index + budget)`.
pub fn extend(tally: &mut AtomTally, budget: u64, workers: usize) -> Result<(), AtlasError> {
    tally.spec.validate()?;
    let ev = FlagEvaluator::new(tally.family, &tally.predicates, tally.thresholds)?;
    let start = tally.next_index;
    let end = start.checked_add(budget).ok_or(AtlasError::IndexOverflow)?;
    let spec = tally.spec;
    let merged = parallel::map_reduce(
        start..end,
        workers,
        |r| tally_chunk(&ev, spec, r),
        |(mut c, r, a), (c2, r2, a2)| {
            for (x, y) in c.iter_mut().zip(c2) {
                *x += y;
            }
            (c, r + r2, a + a2)
        },
    );
    if let Some((counts, raw, acc)) = merged {
        for (x, y) in tally.counts.iter_mut().zip(counts) {
            *x += y;
        }
        tally.raw_total += raw;
        tally.feasible_total += acc;
    }
    tally.next_index = end;
    Ok(())
}

/// Tally of `budget` raw indices starting at `spec.start_index`.
pub fn tally(
    family: Family,
    predicates: &[Predicate],
    thresholds: Thresholds,
    spec: SequenceSpec,
    budget: u64,
    workers: usize,
) -> Result<AtomTally, AtlasError> {
    let mut t = AtomTally::new(family, predicates, spec, thresholds);
    extend(&mut t, budget, workers)?;
    Ok(t)
}
