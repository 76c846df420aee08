//! Sweeps that compare the closed forms against the matrix oracles over the
//! first feasible quasirandom points.

use serde::Serialize;

use crate::criteria::{self, Thresholds, BOUNDARY_BAND, ORACLE_BAND};
use crate::quasirandom::{FeasibleStream, SequenceError, SequenceSpec};
use crate::states::{Family, QPoint};

/// Examples kept per disagreement kind.
const EXAMPLES: usize = 5;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Tally {
    /// Verdicts that differ with both sides outside their tolerance band.
    pub disagreements: u64,
    /// Points skipped because one side sat inside its band.
    pub in_band: u64,
    pub examples: Vec<String>,
}

impl Tally {
    fn record(&mut self, in_band: bool, agree: bool, q: &QPoint) {
        if in_band {
            self.in_band += 1;
        } else if !agree {
            self.disagreements += 1;
            if self.examples.len() < EXAMPLES {
                self.examples.push(q.to_string());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSweep {
    pub family: Family,
    pub points: u64,
    pub raw_scanned: u64,
    /// Closed-form PPT against the sign of the smallest PT eigenvalue.
    pub ppt: Tally,
    /// Largest `|closed - oracle| / max(|closed|, |oracle|)` for `s`.
    pub s_max_rel: f64,
    /// Same for `p`.
    pub p_max_rel: f64,
    /// Closed-form realignment criterion against `s > s_threshold` (qutrits).
    pub ccnr_vs_s: Option<Tally>,
    /// Closed-form realignment criterion against the trace norm (qutrits).
    pub ccnr_vs_trace_norm: Option<Tally>,
}

impl OracleSweep {
    pub fn disagreements(&self) -> u64 {
        self.ppt.disagreements
            + self.ccnr_vs_s.as_ref().map_or(0, |t| t.disagreements)
            + self.ccnr_vs_trace_norm.as_ref().map_or(0, |t| t.disagreements)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Checks the first `count` feasible points of `spec`, or fewer if
/// `max_raw` indices run out first.
pub fn oracle_sweep(
    family: Family,
    thresholds: &Thresholds,
    spec: SequenceSpec,
    count: u64,
    max_raw: u64,
) -> Result<OracleSweep, SequenceError> {
    let qutrit = family == Family::Qutrit;
    let mut stream = FeasibleStream::new(spec, family, spec.start_index..spec.start_index.saturating_add(max_raw))?;
    let mut out = OracleSweep {
        family,
        points: 0,
        raw_scanned: 0,
        ppt: Tally::default(),
        s_max_rel: 0.0,
        p_max_rel: 0.0,
        ccnr_vs_s: qutrit.then(Tally::default),
        ccnr_vs_trace_norm: qutrit.then(Tally::default),
    };
    for (_, q) in stream.by_ref().take(count as usize) {
        out.points += 1;
        let margin = criteria::ppt_margin(&q);
        let o = criteria::ppt_oracle(&q);
        out.ppt.record(margin.abs() <= BOUNDARY_BAND || o.boundary, (margin > 0.0) == o.ppt, &q);

        let closed = criteria::sp_values(&q);
        let oracle = criteria::sp_oracle(&q);
        out.s_max_rel = out.s_max_rel.max(rel(closed.s, oracle.s));
        out.p_max_rel = out.p_max_rel.max(rel(closed.p, oracle.p));

        if qutrit {
            let m = criteria::ccnr_closed_margin(&q);
            let c = m > 0.0;
            let c_band = m.abs() <= ORACLE_BAND;
            let s_band = (closed.s - thresholds.s).abs() <= BOUNDARY_BAND * thresholds.s;
            let s_flag = closed.s > thresholds.s;
            if let Some(t) = out.ccnr_vs_s.as_mut() {
                t.record(c_band || s_band, c == s_flag, &q);
            }
            let tn = criteria::ccnr_oracle(&q);
            if let Some(t) = out.ccnr_vs_trace_norm.as_mut() {
                t.record(c_band || tn.boundary, c == tn.ccnr, &q);
            }
        }
    }
    out.raw_scanned = stream.raw_count();
    Ok(out)
}
