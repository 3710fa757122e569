//! `E[max(0, X, Y)]` for a bivariate normal pair, in closed form.
//!
//! With full-rank covariance the expectation splits over the events
//! `{X > 0, X > Y}` and `{Y > 0, Y > X}`. For the first event, with
//! `U = X` and `V = X − Y`,
//!
//! ```text
//! E[X; U>0, V>0] = μx·Φ₂(α, β; r)
//!                + σx·φ(α)·Φ((β − rα)/√(1−r²))
//!                + σx·r·φ(β)·Φ((α − rβ)/√(1−r²))
//! ```
//!
//! where `α = μx/σx`, `β = (μx − μy)/θ`, `θ² = Var(X − Y)` and
//! `r = Corr(U, V)`. The second event is the mirror image. When the
//! covariance has rank ≤ 1 both components are affine in one standard normal
//! `Z`, and the expectation of the upper envelope of three lines is integrated
//! exactly segment by segment.

use alloc::vec::Vec;

use super::bvn::bvn_cdf;
use super::normal::{std_normal_cdf, std_normal_pdf, std_normal_sf};
use crate::{Error, Result};

/// Parameters of a bivariate normal pair `(X, Y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BvnParams {
    pub mu1: f64,
    pub mu2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
}

impl BvnParams {
    pub fn new(mu1: f64, mu2: f64, sigma1: f64, sigma2: f64, rho: f64) -> Result<Self> {
        if ![mu1, mu2, sigma1, sigma2, rho].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("bivariate normal parameters"));
        }
        if sigma1 < 0.0 || sigma2 < 0.0 {
            return Err(Error::invalid("standard deviations must be nonnegative"));
        }
        if rho.abs() > 1.0 {
            return Err(Error::invalid("correlation must lie in [-1, 1]"));
        }
        Ok(Self {
            mu1,
            mu2,
            sigma1,
            sigma2,
            rho,
        })
    }

    /// Builds parameters from means and a (PSD) covariance matrix. A zero
    /// variance makes the correlation irrelevant and it is set to 0.
    pub fn from_moments(mean1: f64, mean2: f64, var1: f64, var2: f64, cov: f64) -> Result<Self> {
        if var1 < 0.0 || var2 < 0.0 {
            return Err(Error::invalid("variances must be nonnegative"));
        }
        let (s1, s2) = (libm::sqrt(var1), libm::sqrt(var2));
        let rho = if s1 > 0.0 && s2 > 0.0 {
            (cov / (s1 * s2)).clamp(-1.0, 1.0)
        } else {
            0.0
        };
        Self::new(mean1, mean2, s1, s2, rho)
    }

    fn swapped(&self) -> Self {
        Self {
            mu1: self.mu2,
            mu2: self.mu1,
            sigma1: self.sigma2,
            sigma2: self.sigma1,
            rho: self.rho,
        }
    }

    /// Affine representation `(X, Y) = (a₁ + b₁Z, a₂ + b₂Z)` when the
    /// covariance has rank ≤ 1.
    fn rank_one(&self) -> Option<[(f64, f64); 2]> {
        let q = libm::sqrt((1.0 - self.rho) * (1.0 + self.rho));
        if self.sigma1 == 0.0 {
            Some([(self.mu1, 0.0), (self.mu2, self.sigma2)])
        } else if self.sigma2 == 0.0 {
            Some([(self.mu1, self.sigma1), (self.mu2, 0.0)])
        } else if q == 0.0 {
            Some([(self.mu1, self.sigma1), (self.mu2, self.rho * self.sigma2)])
        } else {
            None
        }
    }

    /// Standard deviation of `X − Y`, computed without cancellation near ρ = 1.
    fn diff_sd(&self) -> f64 {
        let (s1, s2) = (self.sigma1, self.sigma2);
        libm::sqrt((s1 - s2) * (s1 - s2) + 2.0 * s1 * s2 * (1.0 - self.rho))
    }
}

/// `E[max(0, X, Y)]`. Never below `max(0, μ₁, μ₂)`.
pub fn e_max_zero_bvn(p: &BvnParams) -> f64 {
    let floor = 0.0_f64.max(p.mu1).max(p.mu2);
    let value = match p.rank_one() {
        Some([x, y]) => expected_envelope(&[(0.0, 0.0), x, y]),
        None => positive_max_part(p) + positive_max_part(&p.swapped()),
    };
    value.max(floor)
}

/// `P(X > 0, X > Y)`: the probability that the first component is the
/// strict, positive maximum.
pub fn p_first_is_positive_max(p: &BvnParams) -> f64 {
    match p.rank_one() {
        Some([(a1, b1), (a2, b2)]) => prob_all_positive(&[(a1, b1), (a1 - a2, b1 - b2)]),
        None => {
            let (alpha, beta, r, _) = standardized(p);
            bvn_cdf(alpha, beta, r).unwrap_or(0.0)
        }
    }
}

/// `(α, β, r, √(1 − r²))` for the event `{X > 0, X − Y > 0}`.
fn standardized(p: &BvnParams) -> (f64, f64, f64, f64) {
    let theta = p.diff_sd();
    let q = libm::sqrt((1.0 - p.rho) * (1.0 + p.rho));
    let alpha = p.mu1 / p.sigma1;
    let beta = (p.mu1 - p.mu2) / theta;
    let r = ((p.sigma1 - p.rho * p.sigma2) / theta).clamp(-1.0, 1.0);
    let r_comp = p.sigma2 * q / theta;
    (alpha, beta, r, r_comp)
}

/// `E[X · 1{X > 0, X > Y}]` for full-rank covariance.
fn positive_max_part(p: &BvnParams) -> f64 {
    let (alpha, beta, r, r_comp) = standardized(p);
    let orthant = bvn_cdf(alpha, beta, r).unwrap_or(0.0);
    p.mu1 * orthant
        + p.sigma1 * std_normal_pdf(alpha) * cdf_ratio(beta - r * alpha, r_comp)
        + p.sigma1 * r * std_normal_pdf(beta) * cdf_ratio(alpha - r * beta, r_comp)
}

fn cdf_ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        std_normal_cdf(num / den)
    } else if num > 0.0 {
        1.0
    } else if num < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// `Φ(u) − Φ(l)` computed on the side of zero that avoids cancellation.
fn normal_mass(l: f64, u: f64) -> f64 {
    if l >= 0.0 {
        std_normal_sf(l) - std_normal_sf(u)
    } else {
        std_normal_cdf(u) - std_normal_cdf(l)
    }
}

fn pdf_or_zero(z: f64) -> f64 {
    if z.is_finite() {
        std_normal_pdf(z)
    } else {
        0.0
    }
}

/// `E[max_k (a_k + b_k Z)]` for standard normal `Z`, exact.
pub(crate) fn expected_envelope(lines: &[(f64, f64)]) -> f64 {
    let mut cuts: Vec<f64> = Vec::new();
    for (i, &(ai, bi)) in lines.iter().enumerate() {
        for &(aj, bj) in &lines[i + 1..] {
            if bi != bj {
                let z = (ai - aj) / (bj - bi);
                if z.is_finite() {
                    cuts.push(z);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut bounds = Vec::with_capacity(cuts.len() + 2);
    bounds.push(f64::NEG_INFINITY);
    bounds.extend_from_slice(&cuts);
    bounds.push(f64::INFINITY);

    bounds
        .windows(2)
        .map(|w| {
            let (l, u) = (w[0], w[1]);
            let probe = match (l.is_finite(), u.is_finite()) {
                (false, false) => 0.0,
                (false, true) => u - 1.0,
                (true, false) => l + 1.0,
                (true, true) => 0.5 * (l + u),
            };
            let (a, b) = lines
                .iter()
                .copied()
                .max_by(|x, y| (x.0 + x.1 * probe).total_cmp(&(y.0 + y.1 * probe)))
                .unwrap_or((0.0, 0.0));
            let mass = normal_mass(l, u);
            let mut part = 0.0;
            if a != 0.0 {
                part += a * mass;
            }
            if b != 0.0 {
                part += b * (pdf_or_zero(l) - pdf_or_zero(u));
            }
            part
        })
        .sum()
}

/// `P(a_k + b_k Z > 0 for all k)`, exact.
fn prob_all_positive(constraints: &[(f64, f64)]) -> f64 {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for &(a, b) in constraints {
        if b > 0.0 {
            lo = lo.max(-a / b);
        } else if b < 0.0 {
            hi = hi.min(-a / b);
        } else if a <= 0.0 {
            return 0.0;
        }
    }
    if hi > lo {
        normal_mass(lo, hi)
    } else {
        0.0
    }
}
