//! Analytic functionals given by their Fourier–Borel transforms.
//!
//! The pairing `⟨S, f⟩` is realised as `Σ n!·g_n·f_n`, where `g_n` are the
//! Taylor coefficients of `𝓛(S)` and `f_n` those of `f`. Point masses,
//! segment averages and exponential-polynomial arguments use exact
//! shortcuts with the same value.

use crate::entire::{factorial, EntireFunctionSpec, MultiplicityVariety, TaylorStream};
use crate::error::{Error, Result};
use crate::jet;
use crate::quadrature;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Starting truncation for [`pair_auto`].
pub const DEFAULT_N_MAX: usize = 128;
/// Largest truncation reached by doubling.
pub const N_MAX_CAP: usize = 1024;
/// Nodes of the Gauss–Legendre rule for segment averages.
pub const SEGMENT_NODES: usize = 64;
/// Relative residual allowed at each synthetic division.
pub const DEFLATION_TOL: f64 = 1e-8;

/// `φ(ξ)/(ξ − α)^power · Σ_r poly_r (ξ − α)^r`, kept in closed form so that
/// jets can be evaluated away from the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientForm {
    pub phi: EntireFunctionSpec,
    pub alpha: C64,
    pub power: usize,
    pub poly: Vec<C64>,
}

impl QuotientForm {
    pub fn jet(&self, at: C64, len: usize) -> Vec<C64> {
        let h = at - self.alpha;
        let poly = jet::recentre(&self.poly, h, len);
        let quotient = if h.norm() < 0.5 {
            // φ vanishes to order `power` at α: shift its jet there
            let j = self.phi.jet(self.alpha, len + self.power + 48);
            jet::recentre(&j[self.power..], h, len)
        } else {
            let num = self.phi.jet(at, len);
            jet::div(&num, &jet::linear_power(h, self.power, len), len)
        };
        jet::mul(&quotient, &poly, len)
    }
}

/// Explicit Taylor coefficients `g_0..g_N` with a declared tail bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSeries {
    pub coeffs: Vec<C64>,
    pub tail_bound: f64,
    pub closed: Option<QuotientForm>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FourierBorel {
    Catalog(EntireFunctionSpec),
    /// Monic `Π (ξ − β)^e`, evaluated in product form.
    Roots(Vec<(C64, usize)>),
    Series(SyntheticSeries),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticFunctional {
    pub fb: FourierBorel,
    pub label: String,
}

/// Result of a truncated pairing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pairing {
    pub value: C64,
    pub tail: f64,
    /// Truncation used; 0 for exact routes.
    pub n_max: usize,
    /// Set when the cap was reached without meeting the tail target.
    pub flagged: bool,
}

impl AnalyticFunctional {
    pub fn new(fb: FourierBorel, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if label != "zero" {
            let nonzero = match &fb {
                FourierBorel::Catalog(s) => {
                    s.validate()?;
                    true
                }
                FourierBorel::Roots(_) => true,
                FourierBorel::Series(s) => s.coeffs.iter().any(|c| *c != ZERO),
            };
            if !nonzero {
                return Err(Error::InvalidSpec(format!("functional {label} has zero transform")));
            }
        }
        Ok(Self { fb, label })
    }

    /// The functional whose transform is `phi`.
    pub fn from_spec(phi: EntireFunctionSpec) -> Result<Self> {
        Self::new(FourierBorel::Catalog(phi), "T")
    }

    /// Point evaluation at `a`.
    pub fn dirac(a: C64) -> Self {
        Self {
            fb: FourierBorel::Catalog(EntireFunctionSpec::ExpSum(vec![(ONE, a)])),
            label: format!("delta({a})"),
        }
    }

    pub fn zero() -> Self {
        Self {
            fb: FourierBorel::Catalog(EntireFunctionSpec::Polynomial(vec![ZERO])),
            label: "zero".into(),
        }
    }

    /// Degree of a polynomial transform.
    pub fn degree(&self) -> Option<usize> {
        match &self.fb {
            FourierBorel::Catalog(EntireFunctionSpec::Polynomial(c)) => Some(c.len().saturating_sub(1)),
            FourierBorel::Roots(f) => Some(f.iter().map(|(_, e)| e).sum()),
            _ => None,
        }
    }

    /// Taylor coefficients of `𝓛(S)` at the origin up to index `n_max`.
    pub fn taylor(&self, n_max: usize) -> Vec<C64> {
        match &self.fb {
            FourierBorel::Catalog(s) => s.taylor(n_max),
            FourierBorel::Roots(f) => {
                let mut out = vec![ZERO; n_max + 1];
                let p = roots_to_monomial(f);
                for (o, c) in out.iter_mut().zip(p) {
                    *o = c;
                }
                out
            }
            FourierBorel::Series(s) => {
                let mut out = vec![ZERO; n_max + 1];
                for (o, c) in out.iter_mut().zip(&s.coeffs) {
                    *o = *c;
                }
                out
            }
        }
    }

    /// Jet `𝓛(S)^{(j)}(at)/j!`, `j < len`.
    pub fn fb_jet(&self, at: C64, len: usize) -> Vec<C64> {
        match &self.fb {
            FourierBorel::Catalog(s) => s.jet(at, len),
            FourierBorel::Roots(f) => {
                let mut acc = vec![ZERO; len];
                acc[0] = ONE;
                for &(beta, e) in f {
                    acc = jet::mul(&acc, &jet::linear_power(at - beta, e, len), len);
                }
                acc
            }
            FourierBorel::Series(s) => match &s.closed {
                Some(q) => q.jet(at, len),
                None => jet::recentre(&s.coeffs, at, len),
            },
        }
    }

    /// `𝓛(S)(ξ)`.
    pub fn fb_value(&self, xi: C64) -> C64 {
        self.fb_jet(xi, 1)[0]
    }
}

/// Monomial coefficients of `Π (ξ − β)^e` by exact convolution.
pub fn roots_to_monomial(factors: &[(C64, usize)]) -> Vec<C64> {
    let mut p = vec![ONE];
    for &(beta, e) in factors {
        for _ in 0..e {
            let mut next = vec![ZERO; p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * beta;
            }
            p = next;
        }
    }
    p
}

/// `n!·g·f` without overflowing for large `n`.
fn factorial_term(n: usize, g: C64, f: C64, ln_fact: f64) -> C64 {
    if g == ZERO || f == ZERO {
        return ZERO;
    }
    if n <= 170 {
        let t = g * f * factorial(n);
        if t.is_finite() && t != ZERO {
            return t;
        }
    }
    let mag = (g.norm().ln() + f.norm().ln() + ln_fact).exp();
    let phase = (g / g.norm()) * (f / f.norm());
    phase * mag
}

/// Geometric tail from the nonzero terms among the last five.
fn tail_estimate(terms: &[C64]) -> Result<f64> {
    let start = terms.len().saturating_sub(5);
    let nz: Vec<(usize, f64)> = terms[start..]
        .iter()
        .enumerate()
        .filter(|(_, t)| t.norm() > 0.0)
        .map(|(i, t)| (i, t.norm()))
        .collect();
    match nz.as_slice() {
        [] => Ok(0.0),
        [(_, m)] => Ok(*m),
        _ => {
            let (a, ma) = nz[0];
            let (b, mb) = nz[nz.len() - 1];
            let ratio = (mb / ma).powf(1.0 / (b - a) as f64);
            if ratio >= 1.0 {
                return Err(Error::Divergent {
                    ratio,
                    terms: terms.len(),
                });
            }
            Ok(mb * ratio / (1.0 - ratio))
        }
    }
}

/// Truncated Taylor pairing `Σ_{n≤n_max} n!·g_n·f_n` with its tail.
pub fn taylor_pairing(s: &AnalyticFunctional, f: &TaylorStream, n_max: usize) -> Result<(C64, f64)> {
    let n = match (s.degree(), f.finite_len()) {
        (Some(d), _) => d.min(n_max),
        (None, Some(len)) => len.saturating_sub(1).min(n_max),
        _ => n_max,
    };
    let g = s.taylor(n);
    let fc = f.coeffs(n);
    let mut ln_fact = 0.0;
    let mut terms = Vec::with_capacity(n + 1);
    for i in 0..=n {
        if i > 0 {
            ln_fact += (i as f64).ln();
        }
        terms.push(factorial_term(i, g[i], fc[i], ln_fact));
    }
    let exact = s.degree().is_some_and(|d| d <= n_max) || f.finite_len().is_some_and(|l| l <= n_max + 1);
    let tail = if exact {
        0.0
    } else if let FourierBorel::Series(series) = &s.fb {
        tail_estimate(&terms)?.max(series.tail_bound * fc.last().map_or(0.0, |c| c.norm()))
    } else {
        tail_estimate(&terms)?
    };
    let mut sorted = terms;
    Ok((jet::sum_by_magnitude(&mut sorted), tail))
}

/// `⟨S, f⟩` at truncation `n_max`, returning `(value, tail_estimate)`.
pub fn pair(s: &AnalyticFunctional, f: &TaylorStream, n_max: usize) -> Result<(C64, f64)> {
    if let Some(v) = pair_exact(s, f)? {
        return Ok((v, 0.0));
    }
    taylor_pairing(s, f, n_max)
}

fn pair_exact(s: &AnalyticFunctional, f: &TaylorStream) -> Result<Option<C64>> {
    match &s.fb {
        FourierBorel::Catalog(EntireFunctionSpec::ExpSum(terms)) => {
            let mut acc = ZERO;
            for &(w, lambda) in terms {
                acc += w * f.eval(lambda, 0)?;
            }
            Ok(Some(acc))
        }
        FourierBorel::Catalog(EntireFunctionSpec::SegmentAverage(t)) => {
            let half = 0.5 * t;
            let mut err = None;
            let v = quadrature::integrate(
                |s| match f.eval(C64::new(s, 0.0), 0) {
                    Ok(v) => v,
                    Err(e) => {
                        err = Some(e);
                        ZERO
                    }
                },
                -half,
                half,
                SEGMENT_NODES,
            );
            match err {
                Some(e) => Err(e),
                None => Ok(Some(v / *t)),
            }
        }
        // finite Taylor pairing is already exact
        FourierBorel::Catalog(EntireFunctionSpec::Polynomial(_)) => Ok(None),
        _ => Ok(f.spec().and_then(|spec| spec.exp_poly_terms()).map(|terms| {
            // ⟨S, z^i e^{λz}⟩ = 𝓛(S)^{(i)}(λ)
            let mut acc = ZERO;
            for t in terms {
                let j = s.fb_jet(t.lambda, t.poly.len());
                let mut fact = 1.0;
                for (i, p) in t.poly.iter().enumerate() {
                    if i > 0 {
                        fact *= i as f64;
                    }
                    acc += p * j[i] * fact;
                }
            }
            acc
        })),
    }
}

/// `⟨S, f⟩` with `n_max` doubled from 128 until the tail falls below
/// `1e−10·(1+|value|)` or the cap is reached.
pub fn pair_auto(s: &AnalyticFunctional, f: &TaylorStream) -> Result<Pairing> {
    if let Some(value) = pair_exact(s, f)? {
        return Ok(Pairing {
            value,
            tail: 0.0,
            n_max: 0,
            flagged: false,
        });
    }
    let mut n = DEFAULT_N_MAX;
    loop {
        match taylor_pairing(s, f, n) {
            Ok((value, tail)) => {
                if tail < 1e-10 * (1.0 + value.norm()) {
                    return Ok(Pairing {
                        value,
                        tail,
                        n_max: n,
                        flagged: false,
                    });
                }
                if n >= N_MAX_CAP {
                    return Ok(Pairing {
                        value,
                        tail,
                        n_max: n,
                        flagged: true,
                    });
                }
            }
            Err(e) if n >= N_MAX_CAP => return Err(e),
            Err(_) => {}
        }
        n *= 2;
    }
}

/// `S_{k,l}` with `𝓛(S_{k,l})(ξ) = (ξ−α_k)^l Π_{n<k}(ξ−α_n)^{m_n}`.
pub fn s_functional(v: &MultiplicityVariety, k: usize, l: usize) -> Result<AnalyticFunctional> {
    if k >= v.len() || l >= v.mult(k) {
        return Err(Error::Index(format!("S_(k={k}, l={l}) on {} points", v.len())));
    }
    let mut factors: Vec<(C64, usize)> = v.points()[..k].iter().map(|p| (p.alpha, p.mult)).collect();
    if l > 0 {
        factors.push((v.alpha(k), l));
    }
    Ok(AnalyticFunctional {
        fb: FourierBorel::Roots(factors),
        label: format!("S_{k},{l}"),
    })
}

/// Value of the truncated series at `alpha` and the sum of term moduli.
fn truncated_value(coeffs: &[C64], alpha: C64) -> (C64, f64) {
    let value = jet::eval_at(coeffs, alpha);
    let r = alpha.norm();
    let mut scale = 0.0;
    let mut pow = 1.0;
    for c in coeffs {
        scale += c.norm() * pow;
        pow *= r;
        if !pow.is_finite() {
            break;
        }
    }
    (value, scale)
}

/// Quotient of `Σ φ_n ξ^n` by `(ξ − α)`, assuming the remainder vanishes.
/// Low-order coefficients are built upwards and high-order ones downwards,
/// splitting where `|φ_n||α|^n` peaks.
pub fn deflate(coeffs: &[C64], alpha: C64) -> Vec<C64> {
    let n = coeffs.len();
    if n <= 1 {
        return Vec::new();
    }
    if alpha == ZERO {
        return coeffs[1..].to_vec();
    }
    let r = alpha.norm();
    let mut best = 0;
    let mut best_mag = f64::NEG_INFINITY;
    for (i, c) in coeffs.iter().enumerate() {
        if *c == ZERO {
            continue;
        }
        let mag = c.norm().ln() + i as f64 * r.ln();
        if mag > best_mag {
            best_mag = mag;
            best = i;
        }
    }
    let mut q = vec![ZERO; n - 1];
    // q_i = −α^{−i−1} Σ_{j≤i} φ_j α^j
    let mut h = ZERO;
    for i in 0..best.min(n - 1) {
        h = (h - coeffs[i]) / alpha;
        q[i] = h;
    }
    // q_{i−1} = φ_i + α q_i, q_{n−1} = 0
    let mut t = ZERO;
    for i in (best.max(1)..n).rev() {
        t = coeffs[i] + alpha * t;
        q[i - 1] = t;
    }
    q
}

/// `T_{k,l}`, dual to the monomial `z^l e^{α_k z}/l!` among the exponential
/// monomials of the variety.
///
/// `𝓛(T_{k,l})(ξ) = Φ(ξ)/(ξ−α_k)^{m_k} · [h^l / G(h) mod h^{m_k}]`, where
/// `h = ξ − α_k` and `G` is the jet of `Φ/(ξ−α_k)^{m_k}` at `α_k`. Its leading
/// term is `m_k!/Φ^{(m_k)}(α_k) · Φ(ξ)/(ξ−α_k)^{m_k−l}`; the remaining terms
/// vanish when `m_k = 1` or `l = m_k − 1`.
pub fn t_functional(
    phi: &EntireFunctionSpec,
    v: &MultiplicityVariety,
    k: usize,
    l: usize,
    n_max: usize,
) -> Result<AnalyticFunctional> {
    if k >= v.len() || l >= v.mult(k) {
        return Err(Error::Index(format!("T_(k={k}, l={l}) on {} points", v.len())));
    }
    let alpha = v.alpha(k);
    let m = v.mult(k);
    let g = phi.jet(alpha, 2 * m + 1);
    let top = g[m];
    if top.norm() * factorial(m) < 1e-14 {
        return Err(Error::DerivativeVanishes {
            k,
            order: m,
            value: top.norm() * factorial(m),
        });
    }
    let mut unit = vec![ZERO; m];
    unit[0] = ONE;
    let inv = jet::div(&unit, &g[m..], m);
    let mut poly = vec![ZERO; m];
    poly[l..].copy_from_slice(&inv[..m - l]);
    // q_j = Φ/(ξ−α)^j for j ≤ m − l; 𝓛(T) = Σ_{r≥l} poly_r q_{m−r}
    let depth = m - l;
    let mut coeffs = phi.taylor(n_max + depth);
    let mut series = vec![ZERO; n_max + 1];
    for j in 1..=depth {
        let (value, size) = truncated_value(&coeffs, alpha);
        let residual = if size > 0.0 { value.norm() / size } else { 0.0 };
        if residual > DEFLATION_TOL {
            return Err(Error::DeflationResidual { k, residual });
        }
        coeffs = deflate(&coeffs, alpha);
        let w = poly[m - j];
        for (s, c) in series.iter_mut().zip(&coeffs) {
            *s += w * c;
        }
    }
    let tail_bound = series.last().map_or(0.0, |c| c.norm());
    Ok(AnalyticFunctional {
        fb: FourierBorel::Series(SyntheticSeries {
            coeffs: series,
            tail_bound,
            closed: Some(QuotientForm {
                phi: phi.clone(),
                alpha,
                power: m,
                poly,
            }),
        }),
        label: format!("T_{k},{l}"),
    })
}

/// The functional with transform `𝓛(S₁)·𝓛(S₂)`, by coefficient convolution.
pub fn product(s1: &AnalyticFunctional, s2: &AnalyticFunctional, n_max: usize) -> AnalyticFunctional {
    let a = s1.taylor(n_max);
    let b = s2.taylor(n_max);
    let coeffs = jet::mul(&a, &b, n_max + 1);
    AnalyticFunctional {
        fb: FourierBorel::Series(SyntheticSeries {
            tail_bound: coeffs.last().map_or(0.0, |c| c.norm()),
            coeffs,
            closed: None,
        }),
        label: format!("{}*{}", s1.label, s2.label),
    }
}

/// `(T ⋆ f)(z) = ⟨T, τ_z f⟩`.
pub fn convolve(t: &AnalyticFunctional, f: &TaylorStream, z: C64) -> Result<C64> {
    if let FourierBorel::Catalog(EntireFunctionSpec::ExpSum(terms)) = &t.fb {
        let mut acc = ZERO;
        for &(w, lambda) in terms {
            acc += w * f.eval(z + lambda, 0)?;
        }
        return Ok(acc);
    }
    Ok(pair_auto(t, &f.translate(z))?.value)
}

/// `|⟨T, z^l e^{ξz}⟩ − Φ^{(l)}(ξ)|`.
pub fn verify_monomial_identity(t: &AnalyticFunctional, phi: &EntireFunctionSpec, xi: C64, l: usize) -> Result<f64> {
    let mut poly = vec![ZERO; l + 1];
    poly[l] = ONE;
    let monomial = TaylorStream::catalog(EntireFunctionSpec::PolyExpSum(vec![crate::entire::ExpPolyTerm {
        poly,
        lambda: xi,
    }]));
    let lhs = pair_auto(t, &monomial)?.value;
    Ok((lhs - phi.eval(xi, l)?).norm())
}
