//! Correlation-matrix parameters, separable-decomposition certificates and
//! the best separable approximation within the two-qutrit family.

mod bsa;
mod decomposition;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bsa::{bsa, split_is_separable, BsaOptions, BsaResult};
pub use decomposition::{
    diagonal_certificate, verify_decomposition, Certificate, CertificateTerm, DecompositionReport,
};

use crate::states::{Family, QPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiqiaoError {
    #[error("alpha_{0} is zero")]
    ZeroAlpha(usize),
    #[error("{0} requires the two-qutrit family")]
    WrongDimension(&'static str),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("no separable split found after {restarts} restarts")]
    NoSeparableSplit { restarts: usize },
}

/// Ten `αᵢ` and ten `βᵢ` with `tᵢ = αᵢβᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiQiaoParams {
    pub alphas: [f64; 10],
    pub betas: [f64; 10],
}

impl LiQiaoParams {
    pub fn products(&self) -> [f64; 10] {
        std::array::from_fn(|i| self.alphas[i] * self.betas[i])
    }
}

/// `βᵢ` solving `αᵢβᵢ = tᵢ` for the correlation entries of the family:
///
/// - `i ∈ {1,4,6}`: `2(Q₁-Q₃)/(3αᵢ)`; `i ∈ {2,5,7}`: the negative of that
/// - `i ∈ {3,8}`: `(-1+3Q₁+6Q₃)/(3αᵢ)`
/// - `i ∈ {9,10}`: `(-1+Q₁+6Q₂+2Q₃)/(3αᵢ)`
///
/// The last pair follows the published expansion; the Gell-Mann correlation
/// entries `T(3,8)` and `T(8,3)` are `±(-1+Q₁+6Q₂+2Q₃)/√3` instead.
pub fn beta_from_alpha(q: &QPoint, alphas: &[f64; 10]) -> Result<[f64; 10], LiqiaoError> {
    if q.family() != Family::Qutrit {
        return Err(LiqiaoError::WrongDimension("beta_from_alpha"));
    }
    if let Some(i) = alphas.iter().position(|&a| a == 0.0) {
        return Err(LiqiaoError::ZeroAlpha(i + 1));
    }
    let (q1, q2, q3) = (q.q(1), q.q(2), q.q(3));
    let off = 2.0 * (q1 - q3) / 3.0;
    let diag = (-1.0 + 3.0 * q1 + 6.0 * q3) / 3.0;
    let cross = (-1.0 + q1 + 6.0 * q2 + 2.0 * q3) / 3.0;
    let t = [off, -off, diag, off, -off, off, -off, diag, cross, cross];
    Ok(std::array::from_fn(|i| t[i] / alphas[i]))
}

/// The published example parameter lists for
/// `Q = (136847/1179648, 256369/2359296, 136847/1179648)`.
///
/// Their products `αᵢβᵢ` do not match the `tᵢ` of that state (for instance
/// `α₁β₁ ≠ 0` although `Q₁ = Q₃`); they are kept as a format fixture only.
pub fn published_example() -> (QPoint, LiQiaoParams) {
    let q = QPoint::qutrit(136847.0 / 1179648.0, 256369.0 / 2359296.0, 136847.0 / 1179648.0);
    let params = LiQiaoParams {
        alphas: [
            25.0 / 256.0,
            75.0 / 512.0,
            35.0 / 256.0,
            171.0 / 10.0,
            15.0 / 128.0,
            -103.0 / 5.0,
            -5.0 / 256.0,
            55.0 / 512.0,
            25.0 / 512.0,
            -15.0 / 512.0,
        ],
        betas: [
            -15.0 / 2.0,
            -31.0 / 2.0,
            55.0 / 512.0,
            -5.0 / 64.0,
            4.0 / 5.0,
            -5.0 / 256.0,
            187.0 / 10.0,
            29.0 / 5.0,
            0.0,
            -101.0 / 10.0,
        ],
    };
    (q, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_q1_q3_kills_off_diagonal_betas() {
        let q = QPoint::qutrit(0.2, 0.1, 0.2);
        let b = beta_from_alpha(&q, &[1.5; 10]).unwrap();
        for i in [0, 1, 3, 4, 5, 6] {
            assert_eq!(b[i], 0.0);
        }
    }

    #[test]
    fn substitution_example() {
        let q = QPoint::qutrit(0.25, (3.0 - 5f64.sqrt()) / 24.0, 0.0);
        let b = beta_from_alpha(&q, &[1.0; 10]).unwrap();
        assert!((b[0] - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn products_do_not_depend_on_alpha() {
        let q = QPoint::qutrit(0.1, 0.05, 0.3);
        let a1 = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        let a2 = [-0.5; 10];
        let p1 = LiQiaoParams { alphas: a1, betas: beta_from_alpha(&q, &a1).unwrap() }.products();
        let p2 = LiQiaoParams { alphas: a2, betas: beta_from_alpha(&q, &a2).unwrap() }.products();
        for (x, y) in p1.iter().zip(p2) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn products_match_correlation_entries() {
        let q = QPoint::qutrit(0.15, 0.07, 0.21);
        let (t, t3, t9) = crate::states::qutrit_correlation_closed_form(&q);
        let p = LiQiaoParams { alphas: [1.0; 10], betas: beta_from_alpha(&q, &[1.0; 10]).unwrap() }.products();
        assert!((p[0] - t).abs() < 1e-15 && (p[1] + t).abs() < 1e-15);
        assert!((p[2] - t3).abs() < 1e-15 && (p[7] - t3).abs() < 1e-15);
        // The published cross terms differ from the Gell-Mann ones by √3.
        assert!((p[8] * 3f64.sqrt() - t9).abs() < 1e-15);
    }

    #[test]
    fn zero_alpha_rejected() {
        let mut a = [1.0; 10];
        a[6] = 0.0;
        assert_eq!(beta_from_alpha(&QPoint::qutrit(0.1, 0.1, 0.1), &a), Err(LiqiaoError::ZeroAlpha(7)));
        assert!(beta_from_alpha(&QPoint::ququart(0.1, 0.1, 0.1, 0.1), &[1.0; 10]).is_err());
    }

    #[test]
    fn published_fixture_is_not_a_product_solution() {
        let (q, params) = published_example();
        assert_eq!(q.q(1), q.q(3));
        let t = params.products();
        assert!(t[0].abs() > 0.1, "fixture kept as published");
    }
}
