use std::io::{self, Write};

use serde::Serialize;

use super::reference::{reference_table, RefKind};
use super::tally::{assignment_label, assignment_name, canonical_atom_order, AtomTally};
use super::AtlasError;

/// One comparison between a sampled estimate and a catalog value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub name: String,
    pub set: String,
    pub kind: RefKind,
    pub estimate: f64,
    pub exact: f64,
    pub abs_err: f64,
    /// `(estimate - exact)` in units of the binomial standard error.
    pub z: f64,
}

/// Binomial standard error at probability `v`, with `v` kept inside
/// `[1/n, 1 - 1/n]` so that rows with exact value 0 or 1 stay finite.
pub fn binomial_se(v: f64, n: u64) -> f64 {
    let n = n.max(1) as f64;
    let v = v.clamp(1.0 / n, 1.0 - 1.0 / n);
    (v * (1.0 - v) / n).sqrt()
}

/// One row per catalog entry of the tally's family whose predicates the
/// tally covers.
pub fn compare_report(t: &AtomTally) -> Result<Vec<ReportRow>, AtlasError> {
    let mut rows = Vec::new();
    for r in reference_table().iter().filter(|r| r.family == t.family) {
        let expr = r.expression();
        if !expr.leaves().iter().all(|p| t.predicates.contains(p)) {
            continue;
        }
        let est = t.eval(&expr)?;
        rows.push(ReportRow {
            name: r.name.to_string(),
            set: r.set.to_string(),
            kind: r.kind,
            estimate: est,
            exact: r.value,
            abs_err: (est - r.value).abs(),
            z: (est - r.value) / binomial_se(r.value, t.feasible_total),
        });
    }
    Ok(rows)
}

/// Whether every closed-form row (exact or near-identity) has `|z| < z_max`.
pub fn closed_forms_within(rows: &[ReportRow], z_max: f64) -> bool {
    rows.iter()
        .filter(|r| r.kind != RefKind::Estimate)
        .all(|r| r.z.abs() < z_max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomRow {
    pub name: String,
    pub set: String,
    pub count: u64,
    pub probability: f64,
}

/// Atoms in canonical order with counts and probabilities.
pub fn atom_rows(t: &AtomTally) -> Result<Vec<AtomRow>, AtlasError> {
    let p = t.probabilities()?;
    Ok(canonical_atom_order(t.predicates.len())
        .into_iter()
        .map(|a| AtomRow {
            name: assignment_name(&t.predicates, a),
            set: assignment_label(&t.predicates, a),
            count: t.counts[a],
            probability: p[a],
        })
        .collect())
}

/// Writes `name,estimate,exact,abs_err,z`.
pub fn write_csv(rows: &[ReportRow], mut w: impl Write) -> io::Result<()> {
    writeln!(w, "name,estimate,exact,abs_err,z")?;
    for r in rows {
        writeln!(w, "{},{:e},{:e},{:e},{:e}", r.name, r.estimate, r.exact, r.abs_err, r.z)?;
    }
    Ok(())
}

/// Full estimate report as JSON.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub family_dim: usize,
    pub predicates: Vec<String>,
    pub offset: f64,
    pub start_index: u64,
    pub next_index: u64,
    pub thresholds: crate::criteria::Thresholds,
    pub raw_total: u64,
    pub feasible_total: u64,
    pub acceptance_rate: f64,
    pub atoms: Vec<AtomRow>,
    pub rows: Vec<ReportRow>,
}

impl EstimateReport {
    pub fn new(t: &AtomTally, atoms_over: &[crate::criteria::Predicate]) -> Result<Self, AtlasError> {
        Ok(Self {
            family_dim: t.family.local_dim(),
            predicates: t.predicates.iter().map(|p| p.name().to_string()).collect(),
            offset: t.spec.offset,
            start_index: t.spec.start_index,
            next_index: t.next_index,
            thresholds: t.thresholds,
            raw_total: t.raw_total,
            feasible_total: t.feasible_total,
            acceptance_rate: t.acceptance_rate(),
            atoms: atom_rows(&t.project(atoms_over)?)?,
            rows: compare_report(t)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{Predicate, Thresholds};
    use crate::quasirandom::SequenceSpec;
    use crate::states::Family;

    #[test]
    fn se_is_clamped() {
        assert!(binomial_se(0.0, 100) > 0.0);
        assert!((binomial_se(0.0, 100) - binomial_se(1.0, 100)).abs() < 1e-15);
        assert!((binomial_se(0.5, 100) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn rows_follow_tally_predicates() {
        let mut t = AtomTally::new(Family::Qutrit, &[Predicate::Ppt], SequenceSpec::new(3), Thresholds::qutrit());
        t.counts = vec![46, 54];
        t.feasible_total = 100;
        t.raw_total = 3600;
        let rows = compare_report(&t).unwrap();
        let names: Vec<_> = rows.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["unit_d3", "ppt_d3"]);
        assert!((rows[1].estimate - 0.54).abs() < 1e-15);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("name,estimate,exact,abs_err,z\nunit_d3,1e0,1e0,0e0,0e0\n"));
    }
}
