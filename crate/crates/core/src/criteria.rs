//! Entanglement predicates for the magic-simplex families.
//!
//! Each predicate has a closed-form route (polynomial inequalities in the Q
//! coordinates) and, where it makes sense, a matrix route through
//! [`crate::linalg`]. The matrix route is the oracle: [`profile`] in
//! [`Mode::Both`] evaluates both and reports any disagreement that falls
//! outside the tolerance band as an error.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, Subsystem};
use crate::states::{self, Family, QPoint};

/// Half-width of the band around a decision boundary inside which a verdict
/// is reported as "boundary" rather than trusted.
pub const BOUNDARY_BAND: f64 = 1e-12;

/// Relative band used when comparing closed-form and oracle values.
pub const ORACLE_BAND: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriteriaError {
    #[error("{predicate} is only defined for two qutrits, got {family}")]
    WrongDimension { predicate: Predicate, family: Family },
    #[error(
        "closed form and oracle disagree on {predicate} at {q}: closed={closed} (margin {closed_margin:e}), \
         oracle={oracle} (margin {oracle_margin:e})"
    )]
    OracleDisagreement {
        predicate: Predicate,
        q: String,
        closed: String,
        oracle: String,
        closed_margin: f64,
        oracle_margin: f64,
    },
    #[error("unknown predicate {0:?}")]
    UnknownPredicate(String),
}

/// A named entanglement (or PPT) predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Predicate {
    #[serde(rename = "PPT")]
    Ppt,
    #[serde(rename = "MUB")]
    Mub,
    #[serde(rename = "Choi")]
    Choi,
    #[serde(rename = "CCNR")]
    Ccnr,
    P,
    S,
}

impl Predicate {
    pub const ALL: [Predicate; 6] = [
        Predicate::Ppt,
        Predicate::Mub,
        Predicate::Choi,
        Predicate::Ccnr,
        Predicate::P,
        Predicate::S,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Predicate::Ppt => "PPT",
            Predicate::Mub => "MUB",
            Predicate::Choi => "Choi",
            Predicate::Ccnr => "CCNR",
            Predicate::P => "P",
            Predicate::S => "S",
        }
    }

    /// MUB and Choi witnesses exist only for the qutrit family.
    pub fn defined_for(self, family: Family) -> bool {
        !matches!((self, family), (Predicate::Mub | Predicate::Choi, Family::Ququart))
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Predicate {
    type Err = CriteriaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Predicate::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| CriteriaError::UnknownPredicate(s.to_string()))
    }
}

/// Entanglement thresholds on the squared Ky Fan norm `s` and the squared
/// singular-value product `p`. Both comparisons are strict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub s: f64,
    pub p: f64,
}

impl Thresholds {
    /// `s > 16/9`, `p > 2²⁷/(3¹⁸·7¹⁵·13)`.
    pub fn qutrit() -> Self {
        Self {
            s: 16.0 / 9.0,
            p: 2f64.powi(27) / (3f64.powi(18) * 7f64.powi(15) * 13.0),
        }
    }

    /// `s > 9/4`, `p > 3²⁴/2¹³⁴`.
    pub fn ququart() -> Self {
        Self {
            s: 9.0 / 4.0,
            p: 3f64.powi(24) / 2f64.powi(134),
        }
    }

    /// The tentative lower product bound `10⁻³⁰` for two ququarts.
    pub fn ququart_lowered() -> Self {
        Self {
            p: 1e-30,
            ..Self::ququart()
        }
    }

    pub fn for_family(family: Family) -> Self {
        match family {
            Family::Qutrit => Self::qutrit(),
            Family::Ququart => Self::ququart(),
        }
    }
}

fn strict_all(margins: &[f64]) -> bool {
    margins.iter().all(|&m| m > 0.0)
}

fn min_margin(margins: &[f64]) -> f64 {
    margins.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Slacks of the positivity conditions (all must be > 0).
pub fn feasibility_margins(q: &QPoint) -> Vec<f64> {
    let c = q.coords();
    match q.family() {
        Family::Qutrit => vec![c[0], c[1], c[2], 1.0 - (c[0] + 3.0 * c[1] + 2.0 * c[2])],
        Family::Ququart => vec![
            c[0],
            c[1],
            c[2],
            c[3],
            1.0 - (c[0] + 4.0 * (c[1] + c[2]) + 3.0 * c[3]),
        ],
    }
}

/// Whether `q` parameterises a positive-definite density matrix.
pub fn feasibility(q: &QPoint) -> bool {
    strict_all(&feasibility_margins(q))
}

/// Slacks of the closed-form PPT conditions.
pub fn ppt_margins(q: &QPoint) -> Vec<f64> {
    let c = q.coords();
    match q.family() {
        Family::Qutrit => {
            let (q1, q2, q3) = (c[0], c[1], c[2]);
            vec![
                q1,
                q3,
                1.0 - (q1 + 3.0 * q2 + 2.0 * q3),
                3.0 * q2 + 2.0 * q1 * q3 - (q1 * q1 + 3.0 * q2 * q1 + (3.0 * q2 + q3).powi(2)),
            ]
        }
        Family::Ququart => {
            let (q1, q2, q3, q4) = (c[0], c[1], c[2], c[3]);
            vec![
                q3,
                q1 + 3.0 * q4,
                1.0 - (q1 + 4.0 * (q2 + q3) + 3.0 * q4),
                4.0 * q2 + 2.0 * q1 * q4
                    - (q1 * q1 + 4.0 * q2 * q1 + q4 * q4 + 16.0 * q2 * (q2 + q3) + 12.0 * q2 * q4),
                16.0 * q3 * q3 - (q1 - q4).powi(2),
            ]
        }
    }
}

/// Positive partial transpose, closed form.
pub fn ppt_closed(q: &QPoint) -> bool {
    strict_all(&ppt_margins(q))
}

/// Closed-form PPT margin: the smallest slack.
pub fn ppt_margin(q: &QPoint) -> f64 {
    min_margin(&ppt_margins(q))
}

/// PPT verdict from the spectrum of the partial transpose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptOracle {
    pub ppt: bool,
    pub min_eigenvalue: f64,
    /// `|min eigenvalue| ≤ BOUNDARY_BAND·‖ρ‖`
    pub boundary: bool,
}

pub fn ppt_oracle(q: &QPoint) -> PptOracle {
    let rho = states::build_density(q);
    let d = q.family().local_dim();
    let pt = linalg::partial_transpose(&rho, (d, d), Subsystem::B).expect("square bipartite density");
    let min = linalg::eigenvalues_hermitian(&pt).expect("partial transpose is Hermitian").min();
    let band = BOUNDARY_BAND * rho.max_abs();
    PptOracle {
        ppt: min > -band,
        min_eigenvalue: min,
        boundary: min.abs() <= band,
    }
}

fn require_qutrit(q: &QPoint, predicate: Predicate) -> Result<(), CriteriaError> {
    match q.family() {
        Family::Qutrit => Ok(()),
        family => Err(CriteriaError::WrongDimension { predicate, family }),
    }
}

/// Mutually-unbiased-bases witness: `Q₁ > 3Q₂ + 4Q₃`.
pub fn mub(q: &QPoint) -> Result<bool, CriteriaError> {
    require_qutrit(q, Predicate::Mub)?;
    Ok(mub_margin(q) > 0.0)
}

fn mub_margin(q: &QPoint) -> f64 {
    q.q(1) - 3.0 * q.q(2) - 4.0 * q.q(3)
}

/// Choi witness: `2Q₃ + 1 - 2Q₁ - 3Q₂ < 0`.
pub fn choi(q: &QPoint) -> Result<bool, CriteriaError> {
    require_qutrit(q, Predicate::Choi)?;
    Ok(choi_margin(q) > 0.0)
}

fn choi_margin(q: &QPoint) -> f64 {
    -(2.0 * q.q(3) + 1.0 - 2.0 * q.q(1) - 3.0 * q.q(2))
}

/// The radicand `ζ` shared by the realignment and singular-value formulas.
pub fn zeta(q: &QPoint) -> f64 {
    let (q1, q2, q3) = (q.q(1), q.q(2), q.q(3));
    -9.0 * q2 - 6.0 * q3
        + 3.0 * (q1 * q1 + (3.0 * q2 + 4.0 * q3 - 1.0) * q1 + 9.0 * q2 * q2 + 4.0 * q3 * q3 + 6.0 * q2 * q3)
        + 1.0
}

/// `√ζ + 3|Q₁ - Q₃| - 1` (two qutrits only).
pub fn ccnr_closed_margin(q: &QPoint) -> f64 {
    zeta(q).max(0.0).sqrt() + 3.0 * (q.q(1) - q.q(3)).abs() - 1.0
}

/// Realignment (CCNR) criterion, closed form: `√ζ + 3|Q₁ - Q₃| > 1`.
pub fn ccnr_closed(q: &QPoint) -> Result<bool, CriteriaError> {
    require_qutrit(q, Predicate::Ccnr)?;
    Ok(ccnr_closed_margin(q) > 0.0)
}

/// CCNR verdict from the trace norm of the realigned density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcnrOracle {
    pub ccnr: bool,
    pub trace_norm: f64,
    pub boundary: bool,
}

pub fn ccnr_oracle(q: &QPoint) -> CcnrOracle {
    let rho = states::build_density(q);
    let d = q.family().local_dim();
    let tn = linalg::trace_norm(&linalg::realign(&rho, (d, d)).expect("square bipartite density"));
    CcnrOracle {
        ccnr: tn > 1.0,
        trace_norm: tn,
        boundary: (tn - 1.0).abs() <= ORACLE_BAND,
    }
}

/// Singular-value functionals of the correlation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpValues {
    /// Squared sum of singular values.
    pub s: f64,
    /// Squared product of singular values.
    pub p: f64,
    /// Qutrit radicand; absent for ququarts.
    pub zeta: Option<f64>,
}

/// Closed forms for two qutrits. For two ququarts the correlation matrix
/// splits into twelve singular values `|Q₁ - Q₄|/2` (one per off-diagonal
/// generator) and the 3×3 block of the diagonal generators, whose singular
/// values come from SVD.
pub fn sp_values(q: &QPoint) -> SpValues {
    match q.family() {
        Family::Qutrit => {
            let delta = q.q(1) - q.q(3);
            let z = zeta(q);
            let root = z.max(0.0).sqrt();
            let s = (4.0 * delta.abs() + 4.0 / 3.0 * root).powi(2);
            let p = (2.0f64 / 3.0).powi(16) * delta.powi(12) * z * z;
            SpValues { s, p, zeta: Some(z) }
        }
        Family::Ququart => {
            let off = 0.5 * (q.q(1) - q.q(4)).abs();
            let block = linalg::singular_values(&cartan_block(q));
            SpValues {
                s: (12.0 * off + block.sum()).powi(2),
                p: (off.powi(12) * block.product()).powi(2),
                zeta: None,
            }
        }
    }
}

/// `Tr[ρ hᵢ⊗hⱼ]` over the diagonal generators `hᵢ`; only the diagonal of ρ
/// contributes.
fn cartan_block(q: &QPoint) -> linalg::RMatrix {
    let d = q.family().local_dim();
    let basis = crate::su_basis::generators(d).expect("family dimension is supported");
    let diag: Vec<Vec<f64>> = basis
        .cartan_indices()
        .into_iter()
        .map(|i| (0..d).map(|k| basis.get(i)[(k, k)].re).collect())
        .collect();
    let rho = states::build_density(q);
    let w: Vec<f64> = (0..d * d).map(|k| rho[(k, k)].re).collect();
    let n = diag.len();
    linalg::RMatrix::from_fn(n, n, |i, j| {
        let mut acc = 0.0;
        for k in 0..d {
            for l in 0..d {
                acc += w[k * d + l] * diag[i][k] * diag[j][l];
            }
        }
        acc
    })
}

/// `(Σσ)²` and `(Πσ)²` from the SVD of the Bloch correlation matrix.
pub fn sp_oracle(q: &QPoint) -> SpValues {
    let d = q.family().local_dim();
    let dec = states::bloch_decompose(&states::build_density(q), d).expect("family density has matching dims");
    let sv = linalg::singular_values(&dec.correlation);
    SpValues {
        s: sv.sum().powi(2),
        p: sv.product().powi(2),
        zeta: None,
    }
}

/// Which evaluation routes [`profile`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Closed,
    Oracle,
    Both,
}

/// Signed distances to each decision boundary; positive means "predicate true".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub feasibility: f64,
    pub ppt: f64,
    pub mub: Option<f64>,
    pub choi: Option<f64>,
    pub ccnr: f64,
    /// `s - s_threshold`
    pub s: f64,
    /// `p / p_threshold - 1`
    pub p: f64,
}

/// Every predicate and numeric diagnostic for one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaProfile {
    pub family: Family,
    pub q: Vec<f64>,
    pub mode: Mode,
    pub feasible: bool,
    pub ppt: bool,
    pub mub: Option<bool>,
    pub choi: Option<bool>,
    pub ccnr: bool,
    #[serde(rename = "P")]
    pub p_entangled: bool,
    #[serde(rename = "S")]
    pub s_entangled: bool,
    pub s: f64,
    pub p: f64,
    pub zeta: Option<f64>,
    pub min_pt_eigenvalue: Option<f64>,
    pub realigned_trace_norm: Option<f64>,
    pub margins: Margins,
    pub thresholds: Thresholds,
    /// Predicates whose verdict lies within the tolerance band.
    pub boundary: Vec<Predicate>,
}

impl CriteriaProfile {
    pub fn get(&self, predicate: Predicate) -> Option<bool> {
        match predicate {
            Predicate::Ppt => Some(self.ppt),
            Predicate::Mub => self.mub,
            Predicate::Choi => self.choi,
            Predicate::Ccnr => Some(self.ccnr),
            Predicate::P => Some(self.p_entangled),
            Predicate::S => Some(self.s_entangled),
        }
    }
}

/// Relative agreement, with an absolute floor tied to the threshold so that
/// values far below it are not compared digit by digit.
fn close_to(a: f64, b: f64, floor: f64) -> bool {
    (a - b).abs() <= ORACLE_BAND * (a.abs().max(b.abs()) + floor)
}

fn disagreement(predicate: Predicate, q: &QPoint, closed: impl fmt::Display, oracle: impl fmt::Display, cm: f64, om: f64) -> CriteriaError {
    CriteriaError::OracleDisagreement {
        predicate,
        q: q.to_string(),
        closed: closed.to_string(),
        oracle: oracle.to_string(),
        closed_margin: cm,
        oracle_margin: om,
    }
}

/// Evaluates every predicate at `q`.
pub fn profile(q: &QPoint, thresholds: &Thresholds, mode: Mode) -> Result<CriteriaProfile, CriteriaError> {
    let family = q.family();
    let qutrit = family == Family::Qutrit;
    let mut boundary = Vec::new();

    let feas_margin = min_margin(&feasibility_margins(q));

    // PPT
    let closed_ppt_margin = ppt_margin(q);
    let closed_ppt_boundary = closed_ppt_margin.abs() <= BOUNDARY_BAND;
    let oracle_ppt = (mode != Mode::Closed).then(|| ppt_oracle(q));
    if let Some(o) = oracle_ppt {
        if mode == Mode::Both
            && !closed_ppt_boundary
            && !o.boundary
            && (closed_ppt_margin > 0.0) != o.ppt
        {
            return Err(disagreement(Predicate::Ppt, q, closed_ppt_margin > 0.0, o.ppt, closed_ppt_margin, o.min_eigenvalue));
        }
    }
    let (ppt, ppt_boundary) = match (mode, oracle_ppt) {
        (Mode::Oracle, Some(o)) => (o.ppt, o.boundary),
        (_, o) => (closed_ppt_margin > 0.0, closed_ppt_boundary || o.is_some_and(|o| o.boundary)),
    };
    if ppt_boundary {
        boundary.push(Predicate::Ppt);
    }

    // s, p
    let closed_sp = sp_values(q);
    let oracle_sp = (mode != Mode::Closed).then(|| sp_oracle(q));
    if let (Mode::Both, Some(o)) = (mode, oracle_sp) {
        if !close_to(closed_sp.s, o.s, thresholds.s) {
            return Err(disagreement(Predicate::S, q, closed_sp.s, o.s, closed_sp.s - thresholds.s, o.s - thresholds.s));
        }
        if !close_to(closed_sp.p, o.p, thresholds.p) {
            return Err(disagreement(Predicate::P, q, closed_sp.p, o.p, closed_sp.p - thresholds.p, o.p - thresholds.p));
        }
    }
    let sp = match (mode, oracle_sp) {
        (Mode::Oracle, Some(o)) => SpValues { zeta: closed_sp.zeta, ..o },
        _ => closed_sp,
    };
    let s_margin = sp.s - thresholds.s;
    let p_margin = sp.p / thresholds.p - 1.0;
    if s_margin.abs() <= BOUNDARY_BAND * thresholds.s.max(1.0) {
        boundary.push(Predicate::S);
    }
    if p_margin.abs() <= BOUNDARY_BAND {
        boundary.push(Predicate::P);
    }

    // CCNR
    let need_ccnr_oracle = mode != Mode::Closed || !qutrit;
    let oracle_ccnr = need_ccnr_oracle.then(|| ccnr_oracle(q));
    let (ccnr, ccnr_margin, ccnr_boundary) = if qutrit {
        let m = ccnr_closed_margin(q);
        let cb = m.abs() <= ORACLE_BAND;
        if let (Mode::Both, Some(o)) = (mode, oracle_ccnr) {
            if !cb && !o.boundary && (m > 0.0) != o.ccnr {
                return Err(disagreement(Predicate::Ccnr, q, m > 0.0, o.ccnr, m, o.trace_norm - 1.0));
            }
        }
        match (mode, oracle_ccnr) {
            (Mode::Oracle, Some(o)) => (o.ccnr, o.trace_norm - 1.0, o.boundary),
            (_, o) => (m > 0.0, m, cb || o.is_some_and(|o| o.boundary)),
        }
    } else {
        let o = oracle_ccnr.expect("ququart CCNR always uses the oracle");
        (o.ccnr, o.trace_norm - 1.0, o.boundary)
    };
    if ccnr_boundary {
        boundary.push(Predicate::Ccnr);
    }

    let (mub_v, choi_v, mub_m, choi_m) = if qutrit {
        let (mm, cm) = (mub_margin(q), choi_margin(q));
        if mm.abs() <= BOUNDARY_BAND {
            boundary.push(Predicate::Mub);
        }
        if cm.abs() <= BOUNDARY_BAND {
            boundary.push(Predicate::Choi);
        }
        (Some(mm > 0.0), Some(cm > 0.0), Some(mm), Some(cm))
    } else {
        (None, None, None, None)
    };
    boundary.sort();

    Ok(CriteriaProfile {
        family,
        q: q.coords().to_vec(),
        mode,
        feasible: feas_margin > 0.0,
        ppt,
        mub: mub_v,
        choi: choi_v,
        ccnr,
        p_entangled: sp.p > thresholds.p,
        s_entangled: sp.s > thresholds.s,
        s: sp.s,
        p: sp.p,
        zeta: sp.zeta,
        min_pt_eigenvalue: oracle_ppt.map(|o| o.min_eigenvalue),
        realigned_trace_norm: oracle_ccnr.map(|o| o.trace_norm),
        margins: Margins {
            feasibility: feas_margin,
            ppt: closed_ppt_margin,
            mub: mub_m,
            choi: choi_m,
            ccnr: ccnr_margin,
            s: s_margin,
            p: p_margin,
        },
        thresholds: *thresholds,
        boundary,
    })
}

/// Fast evaluator for streaming: computes only the requested predicates with
/// the cheapest available route and packs them into an assignment index
/// `Σ bitⱼ·2ʲ` over the predicate list.
#[derive(Debug, Clone)]
pub struct FlagEvaluator {
    family: Family,
    predicates: Vec<Predicate>,
    thresholds: Thresholds,
    needs_sp: bool,
}

impl FlagEvaluator {
    pub fn new(family: Family, predicates: &[Predicate], thresholds: Thresholds) -> Result<Self, CriteriaError> {
        if let Some(&p) = predicates.iter().find(|p| !p.defined_for(family)) {
            return Err(CriteriaError::WrongDimension { predicate: p, family });
        }
        Ok(Self {
            family,
            predicates: predicates.to_vec(),
            thresholds,
            needs_sp: predicates.iter().any(|p| matches!(p, Predicate::P | Predicate::S)),
        })
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.thresholds
    }

    /// Assignment index for `q`, plus the `s` value when it was computed.
    pub fn evaluate(&self, q: &QPoint) -> (usize, Option<f64>) {
        let sp = self.needs_sp.then(|| sp_values(q));
        let mut idx = 0usize;
        for (bit, pred) in self.predicates.iter().enumerate() {
            let v = match pred {
                Predicate::Ppt => ppt_closed(q),
                Predicate::Mub => mub_margin(q) > 0.0,
                Predicate::Choi => choi_margin(q) > 0.0,
                Predicate::Ccnr => match self.family {
                    Family::Qutrit => ccnr_closed_margin(q) > 0.0,
                    Family::Ququart => ccnr_oracle(q).ccnr,
                },
                Predicate::P => sp.is_some_and(|sp| sp.p > self.thresholds.p),
                Predicate::S => sp.is_some_and(|sp| sp.s > self.thresholds.s),
            };
            if v {
                idx |= 1 << bit;
            }
        }
        (idx, sp.map(|sp| sp.s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn thresholds_match_exact_rationals() {
        let t = Thresholds::qutrit();
        assert!(rel(t.p, 5.61323656347753e-15) < 1e-13);
        let t4 = Thresholds::ququart();
        assert!(rel(t4.p, 1.2968528306202057e-29) < 1e-14);
        assert_eq!(t4.s, 2.25);
        assert_eq!(Thresholds::ququart_lowered().p, 1e-30);
    }

    #[test]
    fn feasibility_examples() {
        assert!(feasibility(&QPoint::qutrit(1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0)));
        assert!(!feasibility(&QPoint::qutrit(0.5, 0.5, 0.5)));
        // 3/16 + 4·(9/64 + 3/64) = 15/16 < 1, but Q₄ = 0 sits on the face.
        let q = QPoint::ququart(3.0 / 16.0, 9.0 / 64.0, 3.0 / 64.0, 0.0);
        let m = feasibility_margins(&q);
        assert!((m[4] - 1.0 / 16.0).abs() < 1e-16);
        assert_eq!(m[3], 0.0);
        assert!(!feasibility(&q));
        assert!(feasibility(&QPoint::ququart(3.0 / 16.0, 9.0 / 64.0, 3.0 / 64.0, 1e-3)));
    }

    #[test]
    fn witness_examples() {
        let mm = QPoint::qutrit(1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0);
        assert!(!mub(&mm).unwrap());
        assert!(!choi(&mm).unwrap());
        let q = QPoint::qutrit(0.5, 0.01, 0.01);
        assert!(mub(&q).unwrap());
        assert!(choi(&q).unwrap());
        let q4 = QPoint::ququart(0.1, 0.1, 0.1, 0.1);
        assert!(matches!(mub(&q4), Err(CriteriaError::WrongDimension { .. })));
        assert!(choi(&q4).is_err());
        assert!(ccnr_closed(&q4).is_err());
    }

    #[test]
    fn ppt_examples() {
        let mm = QPoint::qutrit(1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0);
        assert!(ppt_closed(&mm));
        let o = ppt_oracle(&mm);
        assert!(o.ppt && (o.min_eigenvalue - 1.0 / 9.0).abs() < 1e-15);

        let pocu = QPoint::qutrit(201.0 / 634.0, 1.0 / 148.0, 69.0 / 305.0);
        assert!(!ppt_closed(&pocu));
        let o = ppt_oracle(&pocu);
        assert!(!o.ppt && o.min_eigenvalue < 0.0 && !o.boundary);

        // The product maximiser sits on the PPT boundary: Q₃ = 0 and the
        // quadratic condition is saturated.
        let edge = QPoint::qutrit(2.0 / 7.0, 4.0 / 21.0, 0.0);
        assert!(ppt_margin(&edge).abs() <= BOUNDARY_BAND);
        let o = ppt_oracle(&edge);
        assert!(o.min_eigenvalue >= -1e-12 && o.ppt && o.boundary);
        let prof = profile(&edge, &Thresholds::qutrit(), Mode::Both).unwrap();
        assert!(prof.boundary.contains(&Predicate::Ppt));
    }

    #[test]
    fn ccnr_examples() {
        let mm = QPoint::qutrit(1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0);
        assert!(!ccnr_closed(&mm).unwrap());
        assert!((ccnr_oracle(&mm).trace_norm - 1.0 / 3.0).abs() < 1e-14);
        let edge = QPoint::qutrit(2.0 / 7.0, 4.0 / 21.0, 0.0);
        assert!(ccnr_closed(&edge).unwrap());
        assert!(ccnr_oracle(&edge).ccnr);
    }

    #[test]
    fn sp_point_values() {
        let v = sp_values(&QPoint::qutrit(1.0 / 3.0, 0.0, 1.0 / 3.0));
        assert!(rel(v.s, 16.0 / 9.0) < 1e-12);
        assert_eq!(v.p, 0.0);

        let edge = QPoint::qutrit(2.0 / 7.0, 4.0 / 21.0, 0.0);
        let v = sp_values(&edge);
        let p_exact = 2f64.powi(28) / (3f64.powi(16) * 7f64.powi(14));
        assert!(rel(v.p, p_exact) < 1e-12);
        // ζ = 1/7 here, so s = (8/7 + 4/(3√7))².
        assert!(rel(v.zeta.unwrap(), 1.0 / 7.0) < 1e-13);
        let s_exact = (8.0 / 7.0 + 4.0 / (3.0 * 7f64.sqrt())).powi(2);
        assert!(rel(v.s, s_exact) < 1e-12);

        let v = sp_values(&QPoint::ququart(3.0 / 16.0, 9.0 / 64.0, 3.0 / 64.0, 0.0));
        assert!(rel(v.s, 49.0 / 16.0) < 1e-12, "s={}", v.s);
        assert!(rel(v.p, 3f64.powi(24) / 2f64.powi(134)) < 1e-12, "p={}", v.p);
        let v = sp_values(&QPoint::ququart(0.0, 0.25, 0.0, 0.0));
        assert!(rel(v.s, 2.25) < 1e-12);
    }

    #[test]
    fn ququart_block_route_matches_full_svd() {
        let mut seq = crate::quasirandom::feasible_stream(
            crate::quasirandom::SequenceSpec::new(4),
            Family::Ququart,
            400_000,
        )
        .unwrap();
        let mut n = 0;
        for (_, q) in seq.by_ref().take(200) {
            let (a, b) = (sp_values(&q), sp_oracle(&q));
            assert!(rel(a.s, b.s) < 1e-10, "{q}: {} vs {}", a.s, b.s);
            assert!(rel(a.p, b.p) < 1e-10, "{q}: {:e} vs {:e}", a.p, b.p);
            n += 1;
        }
        assert_eq!(n, 200);
    }

    #[test]
    fn p_vanishes_on_diagonal_states() {
        for k in 1..50 {
            let x = k as f64 / 200.0;
            assert_eq!(sp_values(&QPoint::qutrit(x, 0.1 * x, x)).p, 0.0);
        }
    }

    #[test]
    fn profile_examples() {
        let t = Thresholds::qutrit();
        let p = profile(&QPoint::qutrit(1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0), &t, Mode::Both).unwrap();
        assert!(p.feasible && p.ppt);
        assert_eq!((p.mub, p.choi), (Some(false), Some(false)));
        assert!(!p.ccnr && !p.p_entangled && !p.s_entangled);
        assert!(p.s < 1e-14 && p.p < 1e-60);

        let p = profile(&QPoint::qutrit(201.0 / 634.0, 1.0 / 148.0, 69.0 / 305.0), &t, Mode::Both).unwrap();
        assert!(p.feasible && !p.ppt && !p.p_entangled && !p.s_entangled);

        let q4 = QPoint::ququart(5.0 / 806.0, 100.0 / 407.0, 64.0 / 36743.0, 8.0 / 18805.0);
        let p = profile(&q4, &Thresholds::ququart(), Mode::Both).unwrap();
        assert!(p.feasible && p.ppt && p.s_entangled && !p.p_entangled);
        assert!((p.s - 2.2508113649).abs() < 1e-9, "s={}", p.s);
        assert!(rel(p.p, 1.553764401e-63) < 1e-6, "p={:e}", p.p);
        assert_eq!(p.mub, None);
    }

    #[test]
    fn flag_evaluator_rejects_witnesses_for_ququarts() {
        assert!(FlagEvaluator::new(Family::Ququart, &[Predicate::Mub], Thresholds::ququart()).is_err());
        let ev = FlagEvaluator::new(Family::Qutrit, &[Predicate::P, Predicate::S, Predicate::Ppt], Thresholds::qutrit()).unwrap();
        let (idx, _) = ev.evaluate(&QPoint::qutrit(1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0));
        assert_eq!(idx, 0b100);
    }

    #[test]
    fn predicate_names_round_trip() {
        for p in Predicate::ALL {
            assert_eq!(p.name().parse::<Predicate>().unwrap(), p);
        }
        assert!("XYZ".parse::<Predicate>().is_err());
    }
}
