//! Figure datasets: labelled point clouds for boolean regions, the
//! NPT-but-undetected candidate layer, and saturation curves of the `s` and
//! `p` constraints.

use std::collections::HashMap;
use std::io::{self, Write};
use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

use crate::atlas::{AtlasError, BooleanExpr};
use crate::criteria::{self, CriteriaError, FlagEvaluator, Mode, Predicate, Thresholds};
use crate::parallel;
use crate::quasirandom::{FeasibleStream, Sequence, SequenceError, SequenceSpec};
use crate::states::{Family, QPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("no point satisfying {expr} among {raw} raw indices")]
    RegionEmpty { expr: String, raw: u64 },
    #[error("f - target has the same sign at both ends of the segment ({lo:e}, {hi:e})")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("{0} requires the two-qutrit family")]
    WrongDimension(&'static str),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

impl From<crate::atlas::ExprError> for GeometryError {
    fn from(e: crate::atlas::ExprError) -> Self {
        GeometryError::Atlas(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    /// PPT, and neither P nor S.
    Separable,
    /// PPT, and P or S.
    Bound,
    /// Not PPT, and P or S.
    Free,
    /// Not PPT, yet neither P nor S.
    PocuCandidate,
    /// On a constraint surface (saturation datasets).
    Boundary,
}

impl Label {
    pub fn from_flags(ppt: bool, p: bool, s: bool) -> Self {
        match (ppt, p || s) {
            (true, false) => Label::Separable,
            (true, true) => Label::Bound,
            (false, true) => Label::Free,
            (false, false) => Label::PocuCandidate,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Separable => "separable",
            Label::Bound => "bound",
            Label::Free => "free",
            Label::PocuCandidate => "pocu-candidate",
            Label::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRow {
    /// Quasirandom index of the point (or of the seed it was solved from).
    pub index: u64,
    pub q: Vec<f64>,
    pub s: f64,
    pub p: f64,
    pub feasible: bool,
    pub ppt: bool,
    pub mub: Option<bool>,
    pub choi: Option<bool>,
    pub ccnr: bool,
    #[serde(rename = "P")]
    pub p_flag: bool,
    #[serde(rename = "S")]
    pub s_flag: bool,
    pub label: Label,
}

impl PointRow {
    pub fn new(index: u64, q: &QPoint, thresholds: &Thresholds) -> Result<Self, GeometryError> {
        let pr = criteria::profile(q, thresholds, Mode::Closed)?;
        Ok(Self {
            index,
            q: pr.q.clone(),
            s: pr.s,
            p: pr.p,
            feasible: pr.feasible,
            ppt: pr.ppt,
            mub: pr.mub,
            choi: pr.choi,
            ccnr: pr.ccnr,
            p_flag: pr.p_entangled,
            s_flag: pr.s_entangled,
            label: Label::from_flags(pr.ppt, pr.p_entangled, pr.s_entangled),
        })
    }

    pub fn point(&self) -> QPoint {
        let family = Family::from_dim(if self.q.len() == 3 { 3 } else { 4 }).expect("3 or 4 coordinates");
        QPoint::new(family, &self.q).expect("row coordinates match family")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCloud {
    pub family: Family,
    pub rows: Vec<PointRow>,
    /// Raw quasirandom indices (or seeds) examined.
    pub raw_scanned: u64,
}

fn opt_bool(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    }
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `index,Q1,Q2,Q3[,Q4],s,p,feasible,ppt,mub,choi,ccnr,P,S,label`.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        let qs: Vec<String> = (1..=self.family.n_coords()).map(|i| format!("Q{i}")).collect();
        writeln!(w, "index,{},s,p,feasible,ppt,mub,choi,ccnr,P,S,label", qs.join(","))?;
        for r in &self.rows {
            let q: Vec<String> = r.q.iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(
                w,
                "{},{},{:.16e},{:.16e},{},{},{},{},{},{},{},{}",
                r.index,
                q.join(","),
                r.s,
                r.p,
                r.feasible,
                r.ppt,
                opt_bool(r.mub),
                opt_bool(r.choi),
                r.ccnr,
                r.p_flag,
                r.s_flag,
                r.label.name()
            )?;
        }
        Ok(())
    }

    /// Single-linkage cluster sizes at `radius`, largest first.
    pub fn cluster_sizes(&self, radius: f64) -> Vec<usize> {
        let pts: Vec<&[f64]> = self.rows.iter().map(|r| r.q.as_slice()).collect();
        cluster_sizes(&pts, radius)
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Connected components of the graph joining points at distance ≤ `radius`,
/// returned as sizes, largest first.
pub fn cluster_sizes(points: &[&[f64]], radius: f64) -> Vec<usize> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let cell = |p: &[f64]| -> Vec<i64> { p.iter().map(|x| (x / radius).floor() as i64).collect() };
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        grid.entry(cell(p)).or_default().push(i);
    }
    let r2 = radius * radius;
    for (i, p) in points.iter().enumerate() {
        let base = cell(p);
        let dim = base.len();
        for code in 0..3usize.pow(dim as u32) {
            let mut key = base.clone();
            let mut c = code;
            for k in key.iter_mut() {
                *k += (c % 3) as i64 - 1;
                c /= 3;
            }
            let Some(bucket) = grid.get(&key) else { continue };
            for &j in bucket {
                if j <= i {
                    continue;
                }
                let d2: f64 = p.iter().zip(points[j]).map(|(a, b)| (a - b).powi(2)).sum();
                if d2 <= r2 {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
    }
    let mut sizes: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        *sizes.entry(find(&mut parent, i)).or_default() += 1;
    }
    let mut out: Vec<usize> = sizes.into_values().collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// First `count` feasible quasirandom points satisfying `expr`, scanning at
/// most `max_raw` raw indices.
pub fn region_cloud(
    expr: &BooleanExpr,
    count: usize,
    family: Family,
    thresholds: &Thresholds,
    spec: SequenceSpec,
    max_raw: u64,
) -> Result<PointCloud, GeometryError> {
    let leaves = expr.leaves();
    let table = expr.truth_table(&leaves)?;
    let ev = FlagEvaluator::new(family, &leaves, *thresholds)?;
    let mut stream = FeasibleStream::new(spec, family, spec.start_index..spec.start_index.saturating_add(max_raw))?;
    let mut rows = Vec::with_capacity(count);
    while rows.len() < count {
        let Some((n, q)) = stream.next() else { break };
        if table[ev.evaluate(&q).0] {
            rows.push(PointRow::new(n, &q, thresholds)?);
        }
    }
    if rows.is_empty() {
        return Err(GeometryError::RegionEmpty {
            expr: expr.to_string(),
            raw: stream.raw_count(),
        });
    }
    Ok(PointCloud {
        family,
        rows,
        raw_scanned: stream.raw_count(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PocuReport {
    /// The first `keep` candidates as labelled rows.
    pub cloud: PointCloud,
    /// Candidates examined for the minimum (exactly the requested count when
    /// the raw budget allowed it).
    pub candidates: u64,
    /// Feasible points in the scanned range.
    pub feasible: u64,
    /// Candidates among those feasible points (may exceed `candidates`).
    pub candidates_in_range: u64,
    /// `candidates_in_range / feasible`
    pub probability: f64,
    pub min_s: f64,
    pub argmin: Vec<f64>,
    pub argmin_index: u64,
}

#[derive(Debug, Clone)]
struct PocuChunk {
    feasible: u64,
    hits: Vec<(u64, f64)>,
}

fn pocu_chunk(ev: &FlagEvaluator, spec: SequenceSpec, range: Range<u64>) -> PocuChunk {
    let mut stream = FeasibleStream::new(spec, Family::Qutrit, range).expect("spec validated by caller");
    let mut hits = Vec::new();
    for (n, q) in stream.by_ref() {
        let (a, s) = ev.evaluate(&q);
        if a == 0 {
            hits.push((n, s.expect("S is evaluated")));
        }
    }
    PocuChunk {
        feasible: stream.accepted_count(),
        hits,
    }
}

/// Scans until `count` candidates (feasible, not PPT, neither P nor S) have
/// been seen or `max_raw` indices are exhausted. Reports the minimum `s`
/// over exactly the first `count` candidates.
pub fn pocu_candidates(
    count: u64,
    keep: usize,
    thresholds: &Thresholds,
    spec: SequenceSpec,
    max_raw: u64,
    workers: usize,
) -> Result<PocuReport, GeometryError> {
    let spec = SequenceSpec { dim: 3, ..spec };
    spec.validate()?;
    let ev = FlagEvaluator::new(Family::Qutrit, &[Predicate::Ppt, Predicate::P, Predicate::S], *thresholds)?;
    let wave = (parallel::CHUNK * 4 * workers.max(1) as u64).max(parallel::CHUNK);
    let end = spec.start_index.saturating_add(max_raw);
    let mut next = spec.start_index;
    let mut feasible = 0u64;
    let mut hits: Vec<(u64, f64)> = Vec::new();
    while (hits.len() as u64) < count && next < end {
        let hi = next.saturating_add(wave).min(end);
        let part = parallel::map_reduce(
            next..hi,
            workers,
            |r| pocu_chunk(&ev, spec, r),
            |mut a, b| {
                a.feasible += b.feasible;
                a.hits.extend(b.hits);
                a
            },
        );
        if let Some(part) = part {
            feasible += part.feasible;
            hits.extend(part.hits);
        }
        next = hi;
    }
    let in_range = hits.len() as u64;
    let used = &hits[..hits.len().min(count as usize)];
    let (argmin_index, min_s) = used
        .iter()
        .copied()
        .fold((0, f64::INFINITY), |best, h| if h.1 < best.1 { h } else { best });
    let seq = Sequence::new(spec)?;
    let rows = used
        .iter()
        .take(keep)
        .map(|&(n, _)| PointRow::new(n, &QPoint::new(Family::Qutrit, &seq.point(n)).expect("three coords"), thresholds))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PocuReport {
        cloud: PointCloud {
            family: Family::Qutrit,
            rows,
            raw_scanned: next - spec.start_index,
        },
        candidates: used.len() as u64,
        feasible,
        candidates_in_range: in_range,
        probability: if feasible == 0 { 0.0 } else { in_range as f64 / feasible as f64 },
        min_s,
        argmin: if used.is_empty() { Vec::new() } else { seq.point(argmin_index) },
        argmin_index,
    })
}

/// Root of `f(q) = target` on the segment from `lo` to `hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentRoot {
    pub q: QPoint,
    /// Position along the segment in `[0, 1]`.
    pub t: f64,
    pub residual: f64,
}

/// Bisection on the straight segment `lo → hi`.
pub fn solve_on_segment(
    f: impl Fn(&QPoint) -> f64,
    target: f64,
    lo: &QPoint,
    hi: &QPoint,
) -> Result<SegmentRoot, GeometryError> {
    let g = |t: f64| f(&lo.mix(hi, t)) - target;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let (mut ga, gb) = (g(a), g(b));
    if ga == 0.0 {
        return Ok(SegmentRoot { q: *lo, t: 0.0, residual: 0.0 });
    }
    if gb == 0.0 {
        return Ok(SegmentRoot { q: *hi, t: 1.0, residual: 0.0 });
    }
    if ga.signum() == gb.signum() || ga.is_nan() || gb.is_nan() {
        return Err(GeometryError::NoSignChange { lo: ga, hi: gb });
    }
    let tol = 1e-12 * target.abs().max(1.0);
    let mut best = (f64::INFINITY, 0.5);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm.abs() < best.0 {
            best = (gm.abs(), m);
        }
        if gm == 0.0 || best.0 <= tol && (b - a) < 1e-15 {
            break;
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    let t = best.1;
    Ok(SegmentRoot {
        q: lo.mix(hi, t),
        t,
        residual: best.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    S,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Locus {
    /// Strictly inside the PPT region.
    InteriorPpt,
    /// On the PPT boundary surface.
    PptBoundary,
}

/// Signed residual of the constraint; `p` is compared in log space.
fn constraint_residual(c: Constraint, target: f64, q: &QPoint) -> f64 {
    let v = criteria::sp_values(q);
    match c {
        Constraint::S => v.s - target,
        Constraint::P => {
            if v.p > 0.0 {
                v.p.ln() - target.ln()
            } else {
                -1e3
            }
        }
    }
}

/// Whether a point meets the postcondition `|constraint - target| ≤ 1e-10`
/// (relative for `p`).
fn constraint_ok(c: Constraint, target: f64, q: &QPoint) -> bool {
    let v = criteria::sp_values(q);
    match c {
        Constraint::S => (v.s - target).abs() <= 1e-10,
        Constraint::P => (v.p / target - 1.0).abs() <= 1e-10,
    }
}

/// The two roots in Q₃ of the quadratic PPT condition at fixed (Q₁, Q₂).
pub fn ppt_boundary_q3(q1: f64, q2: f64) -> Option<[f64; 2]> {
    let disc = 3.0 * q2 * (1.0 - 3.0 * q1);
    if disc < 0.0 {
        return None;
    }
    let r = disc.sqrt();
    Some([q1 - 3.0 * q2 - r, q1 - 3.0 * q2 + r])
}

fn bisect(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Sign-change brackets of `g` on a uniform grid over `[lo, hi]`.
fn brackets(g: &impl Fn(f64) -> f64, lo: f64, hi: f64, cells: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let h = (hi - lo) / cells as f64;
    let mut x0 = lo;
    let mut g0 = g(x0);
    for k in 1..=cells {
        let x1 = lo + h * k as f64;
        let g1 = g(x1);
        if g0.is_finite() && g1.is_finite() && g0.signum() != g1.signum() {
            out.push((x0, x1));
        }
        x0 = x1;
        g0 = g1;
    }
    out
}

/// Newton step on the pair (quadratic PPT condition, constraint) in
/// (Q₂, Q₃) at fixed Q₁.
fn polish_pair(c: Constraint, target: f64, q1: f64, mut q2: f64, mut q3: f64) -> (f64, f64) {
    let eqs = |q2: f64, q3: f64| {
        let q = QPoint::qutrit(q1, q2, q3);
        let m = criteria::ppt_margins(&q);
        (m[3], constraint_residual(c, target, &q))
    };
    for _ in 0..3 {
        let (f1, f2) = eqs(q2, q3);
        let h = 1e-7;
        let (a1, a2) = eqs(q2 + h, q3);
        let (b1, b2) = eqs(q2, q3 + h);
        let j = [[(a1 - f1) / h, (b1 - f1) / h], [(a2 - f2) / h, (b2 - f2) / h]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let d2 = (f1 * j[1][1] - f2 * j[0][1]) / det;
        let d3 = (j[0][0] * f2 - j[1][0] * f1) / det;
        let (n2, n3) = (q2 - d2, q3 - d3);
        let (g1, g2) = eqs(n2, n3);
        if g1.abs() + g2.abs() < f1.abs() + f2.abs() {
            q2 = n2;
            q3 = n3;
        } else {
            break;
        }
    }
    (q2, q3)
}

#[derive(Debug, Clone, Serialize)]
pub struct SaturationReport {
    pub constraint: Constraint,
    pub target: f64,
    pub locus: Locus,
    pub cloud: PointCloud,
    /// Seeds examined.
    pub seeds: u64,
    /// Largest constraint residual among returned points.
    pub max_residual: f64,
}

/// Points of the two-qutrit family where `constraint = target`, either
/// strictly inside the PPT region or on its boundary.
///
/// Seeds come from a 2D quasirandom scan over (Q₁, Q₂) rescaled to the
/// feasible triangle. For the interior locus the constraint is root-solved
/// along Q₃ for every seed. For the boundary locus Q₃ is pinned to a root of
/// the quadratic PPT condition, the constraint is root-solved along Q₂ near
/// the seed, and the pair is polished by Newton steps.
pub fn saturation_points(
    constraint: Constraint,
    target: f64,
    locus: Locus,
    count: usize,
    thresholds: &Thresholds,
    max_seeds: u64,
) -> Result<SaturationReport, GeometryError> {
    let seq = Sequence::new(SequenceSpec::new(2))?;
    let mut rows = Vec::new();
    let mut max_residual = 0.0f64;
    let mut seeds = 0;
    let mut xy = [0.0; 2];
    for n in 1..=max_seeds {
        if rows.len() >= count {
            break;
        }
        seeds = n;
        seq.point_into(n, &mut xy);
        let q1 = xy[0];
        let q2 = xy[1] * (1.0 - q1) / 3.0;
        let found: Vec<QPoint> = match locus {
            Locus::InteriorPpt => {
                let hi3 = (1.0 - q1 - 3.0 * q2) / 2.0;
                let g = |q3: f64| constraint_residual(constraint, target, &QPoint::qutrit(q1, q2, q3));
                brackets(&g, 0.0, hi3, 32)
                    .into_iter()
                    .map(|(a, b)| QPoint::qutrit(q1, q2, bisect(g, a, b)))
                    .filter(|q| criteria::ppt_margin(q) > criteria::BOUNDARY_BAND)
                    .collect()
            }
            Locus::PptBoundary => {
                let mut out = Vec::new();
                for branch in 0..2 {
                    let q3_of = |q2: f64| ppt_boundary_q3(q1, q2).map(|r| r[branch]);
                    let g = |q2: f64| match q3_of(q2) {
                        Some(q3) => constraint_residual(constraint, target, &QPoint::qutrit(q1, q2, q3)),
                        None => f64::NAN,
                    };
                    let span = (1.0 - q1) / 3.0;
                    let w = 0.02 * span;
                    let (lo, hi) = ((q2 - w).max(0.0), (q2 + w).min(span));
                    for (a, b) in brackets(&g, lo, hi, 8) {
                        let r2 = bisect(g, a, b);
                        let Some(r3) = q3_of(r2) else { continue };
                        let (p2, p3) = polish_pair(constraint, target, q1, r2, r3);
                        out.push(QPoint::qutrit(q1, p2, p3));
                    }
                }
                out
            }
        };
        for q in found {
            if !criteria::feasibility(&q) || !constraint_ok(constraint, target, &q) {
                continue;
            }
            if locus == Locus::PptBoundary {
                let o = criteria::ppt_oracle(&q);
                let scale = crate::states::build_density(&q).max_abs();
                if o.min_eigenvalue.abs() > 1e-10 * scale {
                    continue;
                }
            }
            max_residual = max_residual.max(constraint_residual(constraint, target, &q).abs());
            let mut row = PointRow::new(n, &q, thresholds)?;
            row.label = Label::Boundary;
            rows.push(row);
            if rows.len() >= count {
                break;
            }
        }
    }
    Ok(SaturationReport {
        constraint,
        target,
        locus,
        cloud: PointCloud {
            family: Family::Qutrit,
            rows,
            raw_scanned: seeds,
        },
        seeds,
        max_residual,
    })
}
