//! Additive-recurrence low-discrepancy sequence based on the generalised
//! golden ratio, and a rejection sampler onto the feasible Q region.
//!
//! Coordinates are carried as 64-bit fixed-point fractions. Because
//! `αᵢ = φ⁻ⁱ` is a double with at most 53 significant bits, `αᵢ·2⁶⁴` is an
//! exact integer, and `frac(offset + n·αᵢ)` is computed exactly modulo 2⁶⁴
//! by wrapping integer arithmetic. The streaming recurrence and the closed
//! form therefore agree bit for bit at every index.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::states::{Family, QPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SequenceError {
    #[error("offset must lie in [0, 1), got {0}")]
    Offset(f64),
    #[error("sequence dimension must be at least 1")]
    Dimension,
}

/// Generalised golden ratio: the positive root of `x^(d+1) = x + 1`.
pub fn phi(d: usize) -> f64 {
    assert!(d >= 1, "phi requires d >= 1");
    let k = (d + 1) as i32;
    let mut x = 1.5_f64;
    for _ in 0..100 {
        let f = x.powi(k) - x - 1.0;
        let df = k as f64 * x.powi(k - 1) - 1.0;
        let next = x - f / df;
        if next == x {
            break;
        }
        x = next;
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub dim: usize,
    pub offset: f64,
    pub start_index: u64,
}

impl SequenceSpec {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            offset: 0.5,
            start_index: 1,
        }
    }

    pub fn validate(&self) -> Result<(), SequenceError> {
        if self.dim == 0 {
            return Err(SequenceError::Dimension);
        }
        if !(0.0..1.0).contains(&self.offset) {
            return Err(SequenceError::Offset(self.offset));
        }
        Ok(())
    }
}

const TWO_64: f64 = 18446744073709551616.0;
const TWO_M53: f64 = 1.0 / 9007199254740992.0;

#[inline]
fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * TWO_M53
}

/// The sequence for one [`SequenceSpec`], with the increments precomputed.
#[derive(Debug, Clone)]
pub struct Sequence {
    spec: SequenceSpec,
    alpha: Vec<u64>,
    offset: u64,
}

impl Sequence {
    pub fn new(spec: SequenceSpec) -> Result<Self, SequenceError> {
        spec.validate()?;
        let g = phi(spec.dim);
        let alpha = (1..=spec.dim as i32).map(|i| (g.powi(-i) * TWO_64) as u64).collect();
        Ok(Self {
            spec,
            alpha,
            offset: (spec.offset * TWO_64) as u64,
        })
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    /// Increments `αᵢ` as doubles.
    pub fn alpha(&self) -> Vec<f64> {
        self.alpha.iter().map(|&a| a as f64 / TWO_64).collect()
    }

    #[inline]
    fn raw(&self, n: u64, i: usize) -> u64 {
        self.offset.wrapping_add(n.wrapping_mul(self.alpha[i]))
    }

    /// Writes point `n` into `out[..dim]`.
    #[inline]
    pub fn point_into(&self, n: u64, out: &mut [f64]) {
        for (i, o) in out.iter_mut().take(self.spec.dim).enumerate() {
            *o = to_unit(self.raw(n, i));
        }
    }

    /// `frac(offset + n·αᵢ)` for `i = 1..=dim`.
    pub fn point(&self, n: u64) -> Vec<f64> {
        let mut v = vec![0.0; self.spec.dim];
        self.point_into(n, &mut v);
        v
    }

    /// Streams points `start, start+1, ...` using the additive recurrence.
    pub fn iter_from(&self, start: u64) -> SequenceIter<'_> {
        SequenceIter {
            seq: self,
            next: start,
            state: (0..self.spec.dim).map(|i| self.raw(start, i)).collect(),
        }
    }
}

/// Recurrence-form iterator over `(index, point)`.
#[derive(Debug, Clone)]
pub struct SequenceIter<'a> {
    seq: &'a Sequence,
    next: u64,
    state: Vec<u64>,
}

impl SequenceIter<'_> {
    /// Advances one step, writing the point into `out`. Returns its index.
    #[inline]
    pub fn next_into(&mut self, out: &mut [f64]) -> u64 {
        for ((s, a), o) in self.state.iter_mut().zip(&self.seq.alpha).zip(out.iter_mut()) {
            *o = to_unit(*s);
            *s = s.wrapping_add(*a);
        }
        self.next += 1;
        self.next - 1
    }
}

impl Iterator for SequenceIter<'_> {
    type Item = (u64, Vec<f64>);
    fn next(&mut self) -> Option<Self::Item> {
        let mut v = vec![0.0; self.state.len()];
        let n = self.next_into(&mut v);
        Some((n, v))
    }
}

/// Convenience wrapper for a single closed-form point.
pub fn point(n: u64, spec: &SequenceSpec) -> Result<Vec<f64>, SequenceError> {
    Ok(Sequence::new(*spec)?.point(n))
}

/// Feasible points among the raw indices `range`, in index order.
#[derive(Debug, Clone)]
pub struct FeasibleStream {
    seq: Sequence,
    family: Family,
    next: u64,
    end: u64,
    state: Vec<u64>,
    raw: u64,
    accepted: u64,
}

impl FeasibleStream {
    pub fn new(spec: SequenceSpec, family: Family, range: Range<u64>) -> Result<Self, SequenceError> {
        let spec = SequenceSpec {
            dim: family.n_coords(),
            ..spec
        };
        let seq = Sequence::new(spec)?;
        let state = (0..spec.dim).map(|i| seq.raw(range.start, i)).collect();
        Ok(Self {
            seq,
            family,
            next: range.start,
            end: range.end.max(range.start),
            state,
            raw: 0,
            accepted: 0,
        })
    }

    /// Raw indices consumed so far.
    pub fn raw_count(&self) -> u64 {
        self.raw
    }

    /// Feasible points yielded so far.
    pub fn accepted_count(&self) -> u64 {
        self.accepted
    }

    /// First raw index not yet consumed.
    pub fn next_index(&self) -> u64 {
        self.next
    }

    pub fn family(&self) -> Family {
        self.family
    }
}

#[inline]
fn feasible_coords(family: Family, c: &[f64; 4]) -> bool {
    // Coordinates come from [0,1); positivity and the linear bound are all
    // that remain.
    let pos = c[..family.n_coords()].iter().all(|&x| x > 0.0);
    pos && match family {
        Family::Qutrit => c[0] + 3.0 * c[1] + 2.0 * c[2] < 1.0,
        Family::Ququart => c[0] + 4.0 * (c[1] + c[2]) + 3.0 * c[3] < 1.0,
    }
}

impl Iterator for FeasibleStream {
    type Item = (u64, QPoint);

    fn next(&mut self) -> Option<Self::Item> {
        let mut c = [0.0f64; 4];
        while self.next < self.end {
            for ((s, a), o) in self.state.iter_mut().zip(&self.seq.alpha).zip(c.iter_mut()) {
                *o = to_unit(*s);
                *s = s.wrapping_add(*a);
            }
            let n = self.next;
            self.next += 1;
            self.raw += 1;
            if feasible_coords(self.family, &c) {
                self.accepted += 1;
                let q = QPoint::new(self.family, &c[..self.family.n_coords()]).expect("coordinate count matches family");
                return Some((n, q));
            }
        }
        None
    }
}

/// Feasible points among `[spec.start_index, spec.start_index + budget)`.
pub fn feasible_stream(spec: SequenceSpec, family: Family, budget: u64) -> Result<FeasibleStream, SequenceError> {
    FeasibleStream::new(spec, family, spec.start_index..spec.start_index.saturating_add(budget))
}

/// Splits `range` into at most `parts` contiguous, ordered, non-empty pieces.
pub fn partition(range: Range<u64>, parts: usize) -> Vec<Range<u64>> {
    let len = range.end.saturating_sub(range.start);
    let parts = (parts.max(1) as u64).min(len.max(1));
    let base = len / parts;
    let extra = len % parts;
    let mut out = Vec::with_capacity(parts as usize);
    let mut lo = range.start;
    for k in 0..parts {
        let hi = lo + base + u64::from(k < extra);
        if hi > lo {
            out.push(lo..hi);
        }
        lo = hi;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_values() {
        assert_eq!(phi(1), 1.618033988749895);
        assert!((phi(2) - 1.324717957244746).abs() < 1e-15);
        assert!((phi(3) - 1.22074408460576).abs() < 1e-15);
        for d in 1..12 {
            let g = phi(d);
            assert!((g.powi(d as i32 + 1) - g - 1.0).abs() < 1e-14);
            assert!(phi(d + 1) < g);
        }
    }

    #[test]
    fn zero_index_without_offset_is_origin() {
        let spec = SequenceSpec {
            dim: 3,
            offset: 0.0,
            start_index: 0,
        };
        assert_eq!(point(0, &spec).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn first_point_matches_direct_evaluation() {
        let g = phi(3);
        let p = point(1, &SequenceSpec::new(3)).unwrap();
        for (i, x) in p.iter().enumerate() {
            let want = (0.5 + g.powi(-(i as i32 + 1))).fract();
            assert!((x - want).abs() < 1e-15, "{x} vs {want}");
        }
    }

    #[test]
    fn recurrence_equals_closed_form() {
        let seq = Sequence::new(SequenceSpec::new(4)).unwrap();
        let start = (1u64 << 40) + 12345;
        for (n, p) in seq.iter_from(start).take(5000) {
            assert_eq!(p, seq.point(n));
        }
    }

    #[test]
    fn consecutive_points_differ_by_alpha() {
        let seq = Sequence::new(SequenceSpec::new(3)).unwrap();
        let alpha = seq.alpha();
        for n in [1u64, 77, 10_000_000_000] {
            let (a, b) = (seq.point(n), seq.point(n + 1));
            for i in 0..3 {
                let d = (b[i] - a[i] - alpha[i]).rem_euclid(1.0);
                assert!(d.min(1.0 - d) < 1e-15);
            }
        }
    }

    #[test]
    fn invalid_specs() {
        let mut s = SequenceSpec::new(3);
        s.offset = 1.0;
        assert!(Sequence::new(s).is_err());
        s.offset = 0.5;
        s.dim = 0;
        assert_eq!(Sequence::new(s).unwrap_err(), SequenceError::Dimension);
    }

    #[test]
    fn partitions_cover_range() {
        let parts = partition(10..107, 4);
        assert_eq!(parts.len(), 4);
        assert_eq!(parts[0].start, 10);
        assert_eq!(parts[3].end, 107);
        for w in parts.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
        assert_eq!(partition(0..3, 8).len(), 3);
        assert_eq!(partition(5..5, 2).len(), 0);
    }

    #[test]
    fn stream_counts() {
        let mut s = feasible_stream(SequenceSpec::new(3), Family::Qutrit, 36_000).unwrap();
        let n = s.by_ref().count() as u64;
        assert_eq!(s.raw_count(), 36_000);
        assert_eq!(s.accepted_count(), n);
        assert!((n as f64 - 1000.0).abs() < 30.0, "accepted {n}");
        assert_eq!(s.next_index(), 36_001);
    }
}
