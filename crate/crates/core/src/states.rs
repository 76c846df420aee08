//! Magic-simplex state families and their Bloch decomposition.
//!
//! A [`QPoint`] carries the simplex coordinates `Q₁..Q₃` (two qutrits) or
//! `Q₁..Q₄` (two ququarts). The map from coordinates to density matrix is
//! affine, which is what lets Lebesgue volume in Q-space play the role of
//! Hilbert-Schmidt measure on the family.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{CMatrix, HermitianMatrix, LinalgError, RMatrix};
use crate::su_basis;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("family {family} takes {expected} coordinates, got {got}")]
    CoordinateCount { family: Family, expected: usize, got: usize },
    #[error("unsupported family dimension {0} (expected 3 or 4)")]
    UnsupportedFamily(usize),
    #[error("cannot parse coordinate {0:?}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Which magic-simplex family a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub enum Family {
    /// Two qutrits, 9×9 density matrices, three coordinates.
    Qutrit,
    /// Two ququarts, 16×16 density matrices, four coordinates.
    Ququart,
}

impl Family {
    pub fn from_dim(d: usize) -> Result<Self, StateError> {
        match d {
            3 => Ok(Family::Qutrit),
            4 => Ok(Family::Ququart),
            other => Err(StateError::UnsupportedFamily(other)),
        }
    }

    /// Local dimension d.
    pub fn local_dim(self) -> usize {
        match self {
            Family::Qutrit => 3,
            Family::Ququart => 4,
        }
    }

    /// Number of Q coordinates, which happens to equal d.
    pub fn n_coords(self) -> usize {
        self.local_dim()
    }

    /// Dimension of the bipartite Hilbert space.
    pub fn hilbert_dim(self) -> usize {
        self.local_dim() * self.local_dim()
    }

    /// Lebesgue volume of the feasible region inside the unit cube.
    pub fn feasible_volume(self) -> f64 {
        match self {
            Family::Qutrit => 1.0 / 36.0,
            Family::Ququart => 1.0 / 1152.0,
        }
    }
}

impl TryFrom<usize> for Family {
    type Error = StateError;
    fn try_from(d: usize) -> Result<Self, StateError> {
        Family::from_dim(d)
    }
}

impl From<Family> for usize {
    fn from(f: Family) -> usize {
        f.local_dim()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={}", self.local_dim())
    }
}

/// Simplex coordinates of one family member. Infeasible coordinates are
/// representable; feasibility is a predicate evaluated elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QPoint {
    family: Family,
    coords: [f64; 4],
}

impl QPoint {
    pub fn new(family: Family, coords: &[f64]) -> Result<Self, StateError> {
        if coords.len() != family.n_coords() {
            return Err(StateError::CoordinateCount {
                family,
                expected: family.n_coords(),
                got: coords.len(),
            });
        }
        let mut c = [0.0; 4];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Self { family, coords: c })
    }

    pub fn qutrit(q1: f64, q2: f64, q3: f64) -> Self {
        Self {
            family: Family::Qutrit,
            coords: [q1, q2, q3, 0.0],
        }
    }

    pub fn ququart(q1: f64, q2: f64, q3: f64, q4: f64) -> Self {
        Self {
            family: Family::Ququart,
            coords: [q1, q2, q3, q4],
        }
    }

    /// Parses a comma-separated coordinate list; each entry may be a decimal,
    /// scientific literal or an exact ratio such as `4/21`.
    pub fn parse(family: Family, text: &str) -> Result<Self, StateError> {
        let values = text
            .split(',')
            .map(|s| parse_real(s.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(family, &values)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.family.n_coords()]
    }

    /// One-based coordinate accessor matching the usual `Q₁..Q₄` labels.
    pub fn q(&self, i: usize) -> f64 {
        assert!(i >= 1 && i <= self.family.n_coords(), "coordinate Q{i} out of range");
        self.coords[i - 1]
    }

    /// Affine combination `(1-w)·self + w·other`.
    pub fn mix(&self, other: &QPoint, w: f64) -> QPoint {
        assert_eq!(self.family, other.family);
        let mut c = [0.0; 4];
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = (1.0 - w) * self.coords[k] + w * other.coords[k];
        }
        QPoint { family: self.family, coords: c }
    }
}

impl fmt::Display for QPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords().iter().map(|x| format!("{x}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Parses `"0.25"`, `"1e-3"` or `"p/q"` into a double.
pub fn parse_real(s: &str) -> Result<f64, StateError> {
    let bad = || StateError::Parse(s.to_string());
    let s = s.trim();
    if s.is_empty() {
        return Err(bad());
    }
    match s.split_once('/') {
        Some((num, den)) => {
            let n = f64::from_str(num.trim()).map_err(|_| bad())?;
            let d = f64::from_str(den.trim()).map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            Ok(n / d)
        }
        None => f64::from_str(s).map_err(|_| bad()),
    }
}

/// The three independent entries of the density matrix: `(γ₁, γ₂, γ₃)` for
/// two qutrits and `(κ₁, κ₂, κ₃)` for two ququarts.
pub fn coefficients(q: &QPoint) -> [f64; 3] {
    let c = &q.coords;
    match q.family {
        Family::Qutrit => [
            (c[0] + 2.0 * c[2]) / 3.0,
            (c[0] - c[2]) / 3.0,
            (1.0 - c[0] - 3.0 * c[1] - 2.0 * c[2]) / 3.0,
        ],
        Family::Ququart => [
            (c[0] + 3.0 * c[3]) / 4.0,
            (c[0] - c[3]) / 4.0,
            (1.0 - c[0] - 4.0 * c[1] - 4.0 * c[2] - 3.0 * c[3]) / 4.0,
        ],
    }
}

/// Diagonal weights of basis state `|i, i+k mod d⟩` as a function of the shift `k`.
fn shift_weights(q: &QPoint) -> [f64; 4] {
    let [c1, _, c3] = coefficients(q);
    let c = &q.coords;
    match q.family {
        // |ii⟩ → γ₁, |i,i+1⟩ → Q₂, |i,i+2⟩ → γ₃
        Family::Qutrit => [c1, c[1], c3, 0.0],
        // |ii⟩ → κ₁, |i,i+1⟩ → Q₂, |i,i+2⟩ → Q₃, |i,i+3⟩ → κ₃
        Family::Ququart => [c1, c[1], c[2], c3],
    }
}

/// Density matrix of the family member at `q`.
pub fn build_density(q: &QPoint) -> HermitianMatrix {
    let d = q.family.local_dim();
    let n = d * d;
    let [_, coherence, _] = coefficients(q);
    let weights = shift_weights(q);
    let mut rho = CMatrix::zeros(n, n);
    for i in 0..d {
        for k in 0..d {
            let j = (i + k) % d;
            rho[(i * d + j, i * d + j)] = Complex64::new(weights[k], 0.0);
        }
        for j in 0..d {
            if i != j {
                rho[(i * d + i, j * d + j)] = Complex64::new(coherence, 0.0);
            }
        }
    }
    rho
}

/// Local Bloch vectors and correlation matrix of a bipartite state.
#[derive(Debug, Clone)]
pub struct BlochDecomposition {
    /// `aᵢ = Tr[ρ (λᵢ ⊗ I)]`
    pub vec_a: Vec<f64>,
    /// `bⱼ = Tr[ρ (I ⊗ λⱼ)]`
    pub vec_b: Vec<f64>,
    /// `Tᵢⱼ = Tr[ρ (λᵢ ⊗ λⱼ)]`
    pub correlation: RMatrix,
}

/// Expands `rho` over products of generalised Gell-Mann generators.
///
/// With the normalisation `Tr[λᵢλⱼ] = 2δᵢⱼ` the state reads
/// `ρ = I/d² + (1/2d)(Σ aᵢ λᵢ⊗I + Σ bⱼ I⊗λⱼ) + (1/4) Σ Tᵢⱼ λᵢ⊗λⱼ`.
/// Only nonzero entries of `rho` are visited, so the HL families (28 nonzeros
/// at d = 4) decompose cheaply.
pub fn bloch_decompose(rho: &HermitianMatrix, d: usize) -> Result<BlochDecomposition, StateError> {
    let n = d * d;
    if rho.rows() != n || rho.cols() != n {
        return Err(StateError::Linalg(LinalgError::DimensionMismatch {
            expected: format!("{n}x{n}"),
            got: format!("{}x{}", rho.rows(), rho.cols()),
        }));
    }
    let basis = su_basis::generators(d).map_err(|_| StateError::UnsupportedFamily(d))?;
    let gens = basis.generators();
    let m = gens.len();
    let mut t = RMatrix::zeros(m, m);
    let mut a = vec![0.0; m];
    let mut b = vec![0.0; m];
    // Tr[ρ (X⊗Y)] = Σ ρ[(i,j),(k,l)] X[k,i] Y[l,j]
    for (r, c, v) in rho.nonzeros() {
        let (i, j) = (r / d, r % d);
        let (k, l) = (c / d, c % d);
        for (p, lp) in gens.iter().enumerate() {
            let x = lp[(k, i)];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            if l == j {
                a[p] += (v * x).re;
            }
            for (s, ls) in gens.iter().enumerate() {
                let y = ls[(l, j)];
                if y.re == 0.0 && y.im == 0.0 {
                    continue;
                }
                t[(p, s)] += (v * x * y).re;
            }
        }
        if k == i {
            for (s, ls) in gens.iter().enumerate() {
                b[s] += (v * ls[(l, j)]).re;
            }
        }
    }
    Ok(BlochDecomposition {
        vec_a: a,
        vec_b: b,
        correlation: t,
    })
}

/// Rebuilds a state from its Bloch decomposition.
pub fn bloch_reconstruct(dec: &BlochDecomposition, d: usize) -> Result<HermitianMatrix, StateError> {
    let basis = su_basis::generators(d).map_err(|_| StateError::UnsupportedFamily(d))?;
    let gens = basis.generators();
    let id = CMatrix::identity(d);
    let mut rho = CMatrix::identity(d * d).scaled(1.0 / (d * d) as f64);
    let local = 1.0 / (2.0 * d as f64);
    for (p, lp) in gens.iter().enumerate() {
        if dec.vec_a[p] != 0.0 {
            rho = &rho + &lp.kron(&id).scaled(local * dec.vec_a[p]);
        }
        if dec.vec_b[p] != 0.0 {
            rho = &rho + &id.kron(lp).scaled(local * dec.vec_b[p]);
        }
        for (s, ls) in gens.iter().enumerate() {
            let tv = dec.correlation[(p, s)];
            if tv != 0.0 {
                rho = &rho + &lp.kron(ls).scaled(0.25 * tv);
            }
        }
    }
    Ok(rho)
}

/// Qutrit correlation coefficients from the closed forms, using the trace
/// definition for the Cartan entries.
///
/// Returns `(t, t₃, t₉)` where `t = (2/3)(Q₁-Q₃)` is the common value on the
/// symmetric generators (it enters with a minus sign on the antisymmetric
/// ones), `t₃ = t₈ = Q₁ + 2Q₃ - 1/3` and `t₉ = -t₁₀ = (Q₁+6Q₂+2Q₃-1)/√3`.
pub fn qutrit_correlation_closed_form(q: &QPoint) -> (f64, f64, f64) {
    let (q1, q2, q3) = (q.q(1), q.q(2), q.q(3));
    (
        2.0 / 3.0 * (q1 - q3),
        q1 + 2.0 * q3 - 1.0 / 3.0,
        (q1 + 6.0 * q2 + 2.0 * q3 - 1.0) / 3f64.sqrt(),
    )
}
