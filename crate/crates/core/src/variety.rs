//! Counting functions and the two interpolating-variety tests.

use rayon::prelude::*;
use serde::Serialize;

use crate::entire::{factorial, EntireFunctionSpec, MultiplicityVariety};
use crate::error::{Error, Result};
use crate::growth::{additive_constant, fit_growth_bound, GrowthBound, YoungSpec};
use crate::C64;

/// Relative change of `A` tolerated between the last two truncations.
pub const STABILITY_TOL: f64 = 0.1;
/// `|Φ^{(m_k)}(α_k)|` below this contradicts the multiplicity.
pub const DERIVATIVE_FLOOR: f64 = 1e-14;

/// Finite data can support the property but never refute it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Inconclusive,
}

/// `n(z, r) = Σ_{|z−α_k|≤r} m_k`.
pub fn little_n(v: &MultiplicityVariety, z: C64, r: f64) -> usize {
    v.points()
        .iter()
        .filter(|p| (z - p.alpha).norm() <= r)
        .map(|p| p.mult)
        .sum()
}

/// `N(z, r) = Σ_{0<|z−α_k|≤r} m_k ln(r/|z−α_k|) + n(z,0) ln r`.
pub fn big_n(v: &MultiplicityVariety, z: C64, r: f64) -> f64 {
    let mut acc = 0.0;
    for p in v.points() {
        let d = (z - p.alpha).norm();
        if d == 0.0 {
            acc += p.mult as f64 * r.ln();
        } else if d <= r {
            acc += p.mult as f64 * (r / d).ln();
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountingSample {
    pub r: f64,
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingProfile {
    pub center: [f64; 2],
    pub samples: Vec<CountingSample>,
}

impl CountingProfile {
    pub fn new(v: &MultiplicityVariety, z: C64, radii: &[f64]) -> Self {
        let mut radii = radii.to_vec();
        radii.sort_by(f64::total_cmp);
        Self {
            center: [z.re, z.im],
            samples: radii
                .into_iter()
                .map(|r| CountingSample {
                    r,
                    n: little_n(v, z, r),
                    big_n: big_n(v, z, r),
                })
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,n,N\n");
        for s in &self.samples {
            out.push_str(&format!("{},{},{}\n", s.r, s.n, s.big_n));
        }
        out
    }
}

/// Radii for `N(0, R)`: 1, the distinct positive moduli and the geometric
/// midpoints between consecutive ones.
pub fn origin_radii(v: &MultiplicityVariety) -> Vec<f64> {
    let mut moduli: Vec<f64> = v.points().iter().map(|p| p.alpha.norm()).filter(|r| *r > 0.0).collect();
    moduli.dedup();
    let mut radii = vec![1.0];
    for (i, r) in moduli.iter().enumerate() {
        if i > 0 {
            radii.push((moduli[i - 1] * r).sqrt());
        }
        radii.push(*r);
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    radii
}

fn origin_points(v: &MultiplicityVariety) -> Vec<(f64, f64)> {
    origin_radii(v)
        .into_iter()
        .map(|r| (r, big_n(v, C64::new(0.0, 0.0), r)))
        .collect()
}

fn self_points(v: &MultiplicityVariety) -> Vec<(f64, f64)> {
    v.points()
        .par_iter()
        .filter(|p| p.alpha.norm() > 0.0)
        .map(|p| {
            let r = p.alpha.norm();
            (r, big_n(v, p.alpha, r))
        })
        .collect()
}

/// `A` for a fixed `m` on one truncation of the variety.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationFit {
    pub radius: f64,
    pub a: f64,
}

/// A fitted bound `y ≤ A + θ(m r)` and its behaviour under truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthEvidence {
    pub criterion: String,
    pub bound: Option<GrowthBound>,
    pub truncations: Vec<TruncationFit>,
    pub stable: bool,
    pub samples: Vec<(f64, f64)>,
}

/// JSON shape `{criterion, fitted_m, fitted_A_or_eps, samples}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub criterion: String,
    pub fitted_m: Option<f64>,
    #[serde(rename = "fitted_A_or_eps")]
    pub fitted_a_or_eps: Option<f64>,
    pub verdict: Verdict,
    pub samples: Vec<(f64, f64)>,
}

/// Radii `R/4, R/2, R` with `R` the largest modulus.
fn truncation_radii(v: &MultiplicityVariety) -> Vec<f64> {
    let full = v.points().iter().map(|p| p.alpha.norm()).fold(0.0, f64::max);
    vec![full / 4.0, full / 2.0, full]
}

fn stable(fits: &[TruncationFit]) -> bool {
    match fits {
        [.., prev, last] => (last.a - prev.a).abs() <= STABILITY_TOL * prev.a.abs().max(1.0),
        _ => true,
    }
}

fn evidence<F>(
    criterion: &str,
    v: &MultiplicityVariety,
    theta: &YoungSpec,
    m_grid: &[f64],
    points_of: F,
) -> GrowthEvidence
where
    F: Fn(&MultiplicityVariety) -> Vec<(f64, f64)>,
{
    let samples = points_of(v);
    let bound = fit_growth_bound(&samples, theta, m_grid);
    let mut truncations = Vec::new();
    if let Some(b) = bound {
        for radius in truncation_radii(v) {
            let sub = v.within(radius);
            if sub.is_empty() {
                continue;
            }
            let pts = points_of(&sub);
            if let Some(a) = additive_constant(&pts, theta, b.m) {
                truncations.push(TruncationFit { radius, a });
            }
        }
    }
    GrowthEvidence {
        criterion: criterion.into(),
        stable: bound.is_some() && stable(&truncations),
        bound,
        truncations,
        samples,
    }
}

impl GrowthEvidence {
    pub fn report(&self) -> CriterionReport {
        CriterionReport {
            criterion: self.criterion.clone(),
            fitted_m: self.bound.map(|b| b.m),
            fitted_a_or_eps: self.bound.map(|b| b.a),
            verdict: if self.stable {
                Verdict::Pass
            } else {
                Verdict::Inconclusive
            },
            samples: self.samples.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometricReport {
    pub n0: GrowthEvidence,
    pub nzz: GrowthEvidence,
    pub verdict: Verdict,
}

/// Fits `N(0,R) ≤ A + θ(mR)` and `N(α_k,|α_k|) ≤ A + θ(m|α_k|)`.
pub fn geometric_test(v: &MultiplicityVariety, theta: &YoungSpec, m_grid: &[f64]) -> Result<GeometricReport> {
    if v.is_empty() {
        return Err(Error::EmptyVariety);
    }
    let n0 = evidence("N(0,R)", v, theta, m_grid, origin_points);
    let mut nzz = evidence("N(z,z)", v, theta, m_grid, self_points);
    if nzz.samples.is_empty() {
        // only the origin: the condition is vacuous
        nzz.stable = true;
    }
    let verdict = if n0.stable && nzz.stable {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(GeometricReport { n0, nzz, verdict })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticReport {
    /// `ε = e^{−A}`.
    pub eps: f64,
    pub m: f64,
    pub evidence: GrowthEvidence,
    /// Fit of `ln m_k ≤ A + θ(m|α_k|)`, a necessary condition for
    /// interpolating varieties.
    pub multiplicity_bound: Option<GrowthBound>,
    pub verdict: Verdict,
}

impl AnalyticReport {
    pub fn report(&self) -> CriterionReport {
        CriterionReport {
            criterion: "analytic".into(),
            fitted_m: Some(self.m),
            fitted_a_or_eps: Some(self.eps),
            verdict: self.verdict,
            samples: self.evidence.samples.clone(),
        }
    }
}

/// Fits `−ln(|Φ^{(m_k)}(α_k)|/m_k!) ≤ −ln ε + θ(m|α_k|)`.
pub fn analytic_test(
    phi: &EntireFunctionSpec,
    v: &MultiplicityVariety,
    theta: &YoungSpec,
    m_grid: &[f64],
) -> Result<AnalyticReport> {
    if v.is_empty() {
        return Err(Error::EmptyVariety);
    }
    let ys: Vec<(f64, f64)> = v
        .points()
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            let top = phi.jet(p.alpha, p.mult + 1)[p.mult].norm();
            let value = top * factorial(p.mult);
            if value < DERIVATIVE_FLOOR {
                return Err(Error::DerivativeVanishes {
                    k,
                    order: p.mult,
                    value,
                });
            }
            Ok((p.alpha.norm(), -top.ln()))
        })
        .collect::<Result<_>>()?;
    let lookup = |sub: &MultiplicityVariety| -> Vec<(f64, f64)> {
        // a prefix of the ordered variety
        ys[..sub.len()].to_vec()
    };
    let evidence = evidence("analytic", v, theta, m_grid, lookup);
    let bound = evidence
        .bound
        .ok_or_else(|| Error::InvalidYoung("no admissible m in the grid".into()))?;
    let mults: Vec<(f64, f64)> = v
        .points()
        .iter()
        .map(|p| (p.alpha.norm(), (p.mult as f64).ln()))
        .collect();
    Ok(AnalyticReport {
        eps: (-bound.a).exp(),
        m: bound.m,
        multiplicity_bound: fit_growth_bound(&mults, theta, m_grid),
        verdict: if evidence.stable {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        },
        evidence,
    })
}
