//! Generalised Gell-Mann generators of SU(d).
//!
//! The ordering is the standard recursive one: the SU(d-1) generators embedded
//! in the upper-left block, followed by the symmetric/antisymmetric pair for
//! each entry `(j, d-1)` with `j < d-1`, followed by the new diagonal generator.
//! For d = 3 this gives the textbook λ₁..λ₈ with λ₃ = diag(1,-1,0) and
//! λ₈ = diag(1,1,-2)/√3; for d = 2 it gives the Pauli matrices.

use std::sync::OnceLock;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::CMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BasisError {
    #[error("unsupported local dimension {0} (expected 2, 3 or 4)")]
    UnsupportedDimension(usize),
}

/// Ordered traceless Hermitian generators with `Tr[λᵢλⱼ] = 2δᵢⱼ`.
#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    dim: usize,
    generators: Vec<CMatrix>,
}

impl GeneratorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Generator by zero-based index.
    pub fn get(&self, i: usize) -> &CMatrix {
        &self.generators[i]
    }

    /// Zero-based indices of the diagonal (Cartan) generators.
    pub fn cartan_indices(&self) -> Vec<usize> {
        (2..=self.dim).map(|k| k * k - 2).collect()
    }
}

fn build(d: usize) -> Vec<CMatrix> {
    if d == 1 {
        return Vec::new();
    }
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut out: Vec<CMatrix> = build(d - 1)
        .into_iter()
        .map(|m| {
            let mut e = CMatrix::zeros(d, d);
            for r in 0..d - 1 {
                for c in 0..d - 1 {
                    e[(r, c)] = m[(r, c)];
                }
            }
            e
        })
        .collect();
    let last = d - 1;
    for j in 0..last {
        let mut sym = CMatrix::zeros(d, d);
        sym[(j, last)] = one;
        sym[(last, j)] = one;
        out.push(sym);
        let mut anti = CMatrix::zeros(d, d);
        anti[(j, last)] = -i;
        anti[(last, j)] = i;
        out.push(anti);
    }
    let norm = (2.0 / (d * (d - 1)) as f64).sqrt();
    let mut diag = CMatrix::zeros(d, d);
    for k in 0..last {
        diag[(k, k)] = Complex64::new(norm, 0.0);
    }
    diag[(last, last)] = Complex64::new(-(last as f64) * norm, 0.0);
    out.push(diag);
    out
}

/// Generator basis for local dimension `d ∈ {2, 3, 4}`.
///
/// Bases are built once per dimension and shared.
pub fn generators(d: usize) -> Result<&'static GeneratorBasis, BasisError> {
    static CACHE: [OnceLock<GeneratorBasis>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if !(2..=4).contains(&d) {
        return Err(BasisError::UnsupportedDimension(d));
    }
    Ok(CACHE[d - 2].get_or_init(|| GeneratorBasis {
        dim: d,
        generators: build(d),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram(basis: &GeneratorBasis) -> (f64, f64) {
        let mut off = 0.0_f64;
        let mut diag = 0.0_f64;
        for (a, la) in basis.generators().iter().enumerate() {
            for (b, lb) in basis.generators().iter().enumerate() {
                let t = la.matmul(lb).trace();
                if a == b {
                    diag = diag.max((t - 2.0).norm());
                } else {
                    off = off.max(t.norm());
                }
            }
        }
        (off, diag)
    }

    #[test]
    fn pauli_for_d2() {
        let b = generators(2).unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.get(0)[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(b.get(1)[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(b.get(2)[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(b.get(2)[(1, 1)], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn gell_mann_for_d3() {
        let b = generators(3).unwrap();
        assert_eq!(b.len(), 8);
        let l3 = b.get(2);
        let l8 = b.get(7);
        let s3 = 1.0 / 3f64.sqrt();
        for (k, (v3, v8)) in [(1.0, s3), (-1.0, s3), (0.0, -2.0 * s3)].into_iter().enumerate() {
            assert_eq!(l3[(k, k)].re, v3);
            assert!((l8[(k, k)].re - v8).abs() < 1e-15);
        }
        assert_eq!(b.cartan_indices(), vec![2, 7]);
        // Diagonal generators are exactly the Cartan pair.
        for (idx, g) in b.generators().iter().enumerate() {
            let off_diag = (0..3).flat_map(|r| (0..3).map(move |c| (r, c))).any(|(r, c)| r != c && g[(r, c)].norm() > 0.0);
            assert_eq!(!off_diag, idx == 2 || idx == 7, "generator {idx}");
        }
    }

    #[test]
    fn orthogonality_all_dims() {
        for d in 2..=4 {
            let b = generators(d).unwrap();
            assert_eq!(b.len(), d * d - 1);
            let (off, diag) = gram(b);
            assert!(off < 1e-14, "d={d} off={off}");
            assert!(diag < 1e-14, "d={d} diag={diag}");
            for g in b.generators() {
                assert_eq!(g.hermiticity_defect(), 0.0);
                assert!(g.trace().norm() < 1e-15);
            }
        }
    }

    #[test]
    fn unsupported_dimensions() {
        assert_eq!(generators(1).unwrap_err(), BasisError::UnsupportedDimension(1));
        assert!(generators(5).is_err());
    }
}
