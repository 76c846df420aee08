//! Best separable approximation `ρ = (1-B)·ρ_sep + B·ρ_ent` with both sides
//! in the two-qutrit family.
//!
//! The family is affine in Q, so the split is done in Q-space:
//! `q_sep = (q - B·q_ent)/(1-B)`. For a given `q_ent` the smallest admissible
//! `B` is found by a scan followed by bisection; `q_ent` is optimised by
//! multi-start Nelder-Mead over the closed feasible simplex.

use serde::Serialize;

use super::LiqiaoError;
use crate::criteria::{self, Thresholds};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::quasirandom::{Sequence, SequenceSpec};
use crate::states::{self, Family, QPoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsaOptions {
    pub restarts: usize,
    /// Bisection tolerance on B.
    pub b_tol: f64,
    /// Grid cells of the initial scan in B.
    pub scan: usize,
    pub nelder_mead: NelderMeadOptions,
}

impl Default for BsaOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            b_tol: 1e-6,
            scan: 256,
            nelder_mead: NelderMeadOptions {
                max_evals: 600,
                f_tol: 1e-9,
                x_tol: 1e-9,
                step: 0.05,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BsaResult {
    #[serde(rename = "B")]
    pub b: f64,
    pub q_ent: Vec<f64>,
    pub q_sep: Vec<f64>,
    /// `‖(1-B)ρ(q_sep) + Bρ(q_ent) - ρ(q)‖∞`
    pub residual: f64,
    pub restarts_used: usize,
}

/// `q_sep` is feasible, PPT, and neither P nor S.
pub fn split_is_separable(q_sep: &QPoint, thresholds: &Thresholds) -> bool {
    if !criteria::feasibility(q_sep) || !criteria::ppt_closed(q_sep) {
        return false;
    }
    let v = criteria::sp_values(q_sep);
    v.s <= thresholds.s && v.p <= thresholds.p
}

fn separated(q: &QPoint, q_ent: &QPoint, b: f64) -> QPoint {
    let c: Vec<f64> = q
        .coords()
        .iter()
        .zip(q_ent.coords())
        .map(|(x, e)| (x - b * e) / (1.0 - b))
        .collect();
    QPoint::new(Family::Qutrit, &c).expect("three coordinates")
}

/// Smallest admissible B for a fixed `q_ent`, or `None`.
fn min_b(q: &QPoint, q_ent: &QPoint, t: &Thresholds, opts: &BsaOptions) -> Option<f64> {
    let ok = |b: f64| split_is_separable(&separated(q, q_ent, b), t);
    let n = opts.scan;
    let k = (1..n).find(|&k| ok(k as f64 / n as f64))?;
    let (mut lo, mut hi) = ((k - 1) as f64 / n as f64, k as f64 / n as f64);
    while hi - lo > opts.b_tol {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Vertices of the closed feasible simplex.
const VERTICES: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0 / 3.0, 0.0], [0.0, 0.0, 0.5]];

/// Maps unconstrained `x ∈ R³` onto the closed simplex: `|xᵢ|` are the
/// barycentric weights of the non-origin vertices, renormalised when their
/// sum exceeds one.
fn to_simplex(x: &[f64]) -> QPoint {
    let mut w: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let sum: f64 = w.iter().sum();
    if sum > 1.0 {
        w.iter_mut().for_each(|v| *v /= sum);
    }
    let c: Vec<f64> = (0..3).map(|j| (0..3).map(|i| w[i] * VERTICES[i][j]).sum()).collect();
    QPoint::new(Family::Qutrit, &c).expect("three coordinates")
}

/// Minimises B over `q_ent` for the entangled two-qutrit state `q`.
///
/// A state that is already separable (feasible, PPT, neither P nor S)
/// returns `B = 0` with `q_sep = q_ent = q`.
pub fn bsa(q: &QPoint, thresholds: &Thresholds, opts: &BsaOptions) -> Result<BsaResult, LiqiaoError> {
    if q.family() != Family::Qutrit {
        return Err(LiqiaoError::WrongDimension("bsa"));
    }
    if split_is_separable(q, thresholds) {
        return Ok(BsaResult {
            b: 0.0,
            q_ent: q.coords().to_vec(),
            q_sep: q.coords().to_vec(),
            residual: 0.0,
            restarts_used: 0,
        });
    }
    let objective = |x: &[f64]| min_b(q, &to_simplex(x), thresholds, opts).unwrap_or(2.0);
    let seeds = Sequence::new(SequenceSpec::new(3)).expect("valid spec");
    let mut best: Option<(f64, Vec<f64>)> = None;
    for r in 0..opts.restarts {
        // The first starts sit at the simplex vertices, the rest are quasirandom.
        let x0: Vec<f64> = match r {
            0..=2 => (0..3).map(|i| f64::from(u8::from(i == r))).collect(),
            _ => seeds.point(r as u64),
        };
        let m = nelder_mead(objective, &x0, &opts.nelder_mead);
        if m.f <= 1.0 && best.as_ref().is_none_or(|(f, _)| m.f < *f) {
            best = Some((m.f, m.x));
        }
    }
    let Some((b, x)) = best else {
        return Err(LiqiaoError::NoSeparableSplit { restarts: opts.restarts });
    };
    let q_ent = to_simplex(&x);
    let q_sep = separated(q, &q_ent, b);
    let mixed = &states::build_density(&q_sep).scaled(1.0 - b) + &states::build_density(&q_ent).scaled(b);
    let residual = mixed.max_abs_diff(&states::build_density(q));
    Ok(BsaResult {
        b,
        q_ent: q_ent.coords().to_vec(),
        q_sep: q_sep.coords().to_vec(),
        residual,
        restarts_used: opts.restarts,
    })
}
