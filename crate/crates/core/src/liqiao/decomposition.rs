use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LiqiaoError;
use crate::linalg::{self, CMatrix};
use crate::states::{self, Family, QPoint};

/// Reconstruction tolerance for a valid certificate (max-abs entry).
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
/// Smallest factor eigenvalue accepted as positive semidefinite.
pub const FACTOR_EIG_TOL: f64 = -1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateTerm {
    pub w: f64,
    pub a: CMatrix,
    pub b: CMatrix,
}

/// A claimed decomposition `ρ(q) = Σ wₘ Aₘ⊗Bₘ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub q: QPoint,
    pub terms: Vec<CertificateTerm>,
}

type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Serialize, Deserialize)]
struct TermFile {
    w: f64,
    #[serde(rename = "A")]
    a: JsonMatrix,
    #[serde(rename = "B")]
    b: JsonMatrix,
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    q: Vec<f64>,
    terms: Vec<TermFile>,
}

fn to_json_matrix(m: &CMatrix) -> JsonMatrix {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

fn from_json_matrix(m: &JsonMatrix, what: &str) -> Result<CMatrix, LiqiaoError> {
    if m.len() != 3 || m.iter().any(|r| r.len() != 3) {
        return Err(LiqiaoError::MalformedCertificate(format!("{what} is not 3x3")));
    }
    Ok(CMatrix::from_fn(3, 3, |i, j| Complex64::new(m[i][j][0], m[i][j][1])))
}

impl Certificate {
    pub fn to_json(&self) -> String {
        let file = CertificateFile {
            q: self.q.coords().to_vec(),
            terms: self
                .terms
                .iter()
                .map(|t| TermFile {
                    w: t.w,
                    a: to_json_matrix(&t.a),
                    b: to_json_matrix(&t.b),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("certificate serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, LiqiaoError> {
        let file: CertificateFile =
            serde_json::from_str(text).map_err(|e| LiqiaoError::MalformedCertificate(e.to_string()))?;
        let q = QPoint::new(Family::Qutrit, &file.q).map_err(|e| LiqiaoError::MalformedCertificate(e.to_string()))?;
        let terms = file
            .terms
            .iter()
            .enumerate()
            .map(|(m, t)| {
                Ok(CertificateTerm {
                    w: t.w,
                    a: from_json_matrix(&t.a, &format!("A of term {m}"))?,
                    b: from_json_matrix(&t.b, &format!("B of term {m}"))?,
                })
            })
            .collect::<Result<_, LiqiaoError>>()?;
        Ok(Self { q, terms })
    }

    fn check_well_formed(&self) -> Result<(), LiqiaoError> {
        let bad = |m: String| Err(LiqiaoError::MalformedCertificate(m));
        if self.terms.is_empty() {
            return bad("no terms".into());
        }
        let mut sum = 0.0;
        for (m, t) in self.terms.iter().enumerate() {
            if !(t.w > 0.0) {
                return bad(format!("weight of term {m} is not positive"));
            }
            sum += t.w;
            for (name, f) in [("A", &t.a), ("B", &t.b)] {
                if (f.rows(), f.cols()) != (3, 3) {
                    return bad(format!("{name} of term {m} is not 3x3"));
                }
                if !f.is_hermitian(1e-12) {
                    return bad(format!("{name} of term {m} is not Hermitian"));
                }
                if (f.trace() - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
                    return bad(format!("{name} of term {m} does not have unit trace"));
                }
            }
        }
        if (sum - 1.0).abs() > 1e-12 {
            return bad(format!("weights sum to {sum}"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    /// `‖Σ wₘ Aₘ⊗Bₘ - ρ(q)‖∞` (largest entry magnitude).
    pub reconstruction_error: f64,
    pub min_factor_eigenvalue: f64,
    /// Terms having a factor with an eigenvalue below tolerance.
    pub negative_terms: Vec<usize>,
    pub valid: bool,
}

/// Checks a certificate against the density matrix of `q`.
pub fn verify_decomposition(q: &QPoint, cert: &Certificate) -> Result<DecompositionReport, LiqiaoError> {
    if q.family() != Family::Qutrit {
        return Err(LiqiaoError::WrongDimension("verify_decomposition"));
    }
    cert.check_well_formed()?;
    let rho = states::build_density(q);
    let mut sum = CMatrix::zeros(9, 9);
    let mut min_eig = f64::INFINITY;
    let mut negative_terms = Vec::new();
    for (m, t) in cert.terms.iter().enumerate() {
        sum = &sum + &t.a.kron(&t.b).scaled(t.w);
        let ea = linalg::eigenvalues_hermitian(&t.a).map_err(|e| LiqiaoError::MalformedCertificate(e.to_string()))?;
        let eb = linalg::eigenvalues_hermitian(&t.b).map_err(|e| LiqiaoError::MalformedCertificate(e.to_string()))?;
        let lo = ea.min().min(eb.min());
        min_eig = min_eig.min(lo);
        if lo < FACTOR_EIG_TOL {
            negative_terms.push(m);
        }
    }
    let err = sum.max_abs_diff(&rho);
    Ok(DecompositionReport {
        reconstruction_error: err,
        min_factor_eigenvalue: min_eig,
        valid: err <= RECONSTRUCTION_TOL && negative_terms.is_empty(),
        negative_terms,
    })
}

/// Product decomposition of a diagonal family member (`Q₁ = Q₃`):
/// one term `|k⟩⟨k|⊗|l⟩⟨l|` per nonzero diagonal weight.
pub fn diagonal_certificate(q: &QPoint) -> Option<Certificate> {
    if q.family() != Family::Qutrit || q.q(1) != q.q(3) {
        return None;
    }
    let rho = states::build_density(q);
    let proj = |k: usize| CMatrix::from_fn(3, 3, |i, j| Complex64::new(f64::from(u8::from(i == k && j == k)), 0.0));
    let terms = (0..9)
        .filter(|&n| rho[(n, n)].re > 0.0)
        .map(|n| CertificateTerm {
            w: rho[(n, n)].re,
            a: proj(n / 3),
            b: proj(n % 3),
        })
        .collect();
    Some(Certificate { q: *q, terms })
}
