//! Catalog of entire functions with exact derivatives and Taylor
//! coefficients, plus the multiplicity variety type.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::growth::YoungSpec;
use crate::jet;
use crate::C64;

/// Largest derivative order accepted by [`EntireFunctionSpec::eval`].
pub const MAX_ORDER: usize = 64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// One term `p(ξ) e^{λξ}` of an exponential polynomial; `poly` holds
/// monomial coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPolyTerm {
    pub poly: Vec<C64>,
    pub lambda: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EntireFunctionSpec {
    /// `Σ w e^{λξ}` as `(w, λ)` pairs.
    ExpSum(Vec<(C64, C64)>),
    /// `Σ p(ξ) e^{λξ}`.
    PolyExpSum(Vec<ExpPolyTerm>),
    /// Monomial coefficients, increasing degree.
    Polynomial(Vec<C64>),
    /// `(e^{tξ/2} − e^{−tξ/2}) / (tξ)`, equal to 1 at the origin.
    SegmentAverage(f64),
}

impl EntireFunctionSpec {
    pub fn exp_sum(terms: Vec<(C64, C64)>) -> Result<Self> {
        let s = Self::ExpSum(terms);
        s.validate()?;
        Ok(s)
    }

    pub fn polynomial(coeffs: Vec<C64>) -> Result<Self> {
        let s = Self::Polynomial(coeffs);
        s.validate()?;
        Ok(s)
    }

    pub fn poly_exp_sum(terms: Vec<ExpPolyTerm>) -> Result<Self> {
        let s = Self::PolyExpSum(terms);
        s.validate()?;
        Ok(s)
    }

    pub fn segment_average(t: f64) -> Result<Self> {
        let s = Self::SegmentAverage(t);
        s.validate()?;
        Ok(s)
    }

    /// `e^ξ − 1`, the transform of `δ_1 − δ_0`.
    pub fn unit_shift_difference() -> Self {
        Self::ExpSum(vec![(ONE, ONE), (-ONE, ZERO)])
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |c: &C64| c.is_finite();
        match self {
            Self::ExpSum(terms) => {
                if terms.is_empty() || terms.iter().all(|(w, _)| *w == ZERO) {
                    return Err(Error::InvalidSpec("exp-sum needs a nonzero weight".into()));
                }
                if !terms.iter().all(|(w, l)| finite(w) && finite(l)) {
                    return Err(Error::InvalidSpec("non-finite exp-sum term".into()));
                }
            }
            Self::PolyExpSum(terms) => {
                if terms.is_empty() || terms.iter().all(|t| t.poly.iter().all(|c| *c == ZERO)) {
                    return Err(Error::InvalidSpec("poly-exp-sum is identically zero".into()));
                }
                if !terms.iter().all(|t| finite(&t.lambda) && t.poly.iter().all(finite)) {
                    return Err(Error::InvalidSpec("non-finite poly-exp-sum term".into()));
                }
            }
            Self::Polynomial(c) => {
                match c.last() {
                    Some(l) if *l != ZERO => {}
                    _ => {
                        return Err(Error::InvalidSpec(
                            "polynomial needs a nonzero leading coefficient".into(),
                        ))
                    }
                }
                if !c.iter().all(finite) {
                    return Err(Error::InvalidSpec("non-finite polynomial coefficient".into()));
                }
            }
            Self::SegmentAverage(t) => {
                if !(*t > 0.0) || !t.is_finite() {
                    return Err(Error::InvalidSpec(format!("segment length {t} must be positive")));
                }
            }
        }
        Ok(())
    }

    /// `Φ^{(order)}(ξ)`.
    pub fn eval(&self, xi: C64, order: usize) -> Result<C64> {
        if order > MAX_ORDER {
            return Err(Error::OrderTooLarge { order, max: MAX_ORDER });
        }
        let j = self.jet(xi, order + 1);
        Ok(j[order] * factorial(order))
    }

    pub fn value(&self, xi: C64) -> C64 {
        self.jet(xi, 1)[0]
    }

    /// Taylor coefficients `Φ^{(j)}(at)/j!`, `j < len`.
    pub fn jet(&self, at: C64, len: usize) -> Vec<C64> {
        match self {
            Self::ExpSum(terms) => {
                let mut out = vec![ZERO; len];
                for &(w, lambda) in terms {
                    for (o, e) in out.iter_mut().zip(jet::exponential(lambda, at, len)) {
                        *o += w * e;
                    }
                }
                out
            }
            Self::PolyExpSum(terms) => {
                let mut out = vec![ZERO; len];
                for t in terms {
                    let p = jet::recentre(&t.poly, at, len);
                    let e = jet::exponential(t.lambda, at, len);
                    for (o, v) in out.iter_mut().zip(jet::mul(&p, &e, len)) {
                        *o += v;
                    }
                }
                out
            }
            Self::Polynomial(c) => jet::recentre(c, at, len),
            Self::SegmentAverage(t) => segment_average_jet(*t, at, len),
        }
    }

    /// Taylor coefficients at the origin up to index `n_max`.
    pub fn taylor(&self, n_max: usize) -> Vec<C64> {
        match self {
            Self::SegmentAverage(t) => {
                // sinh(u)/u with u = tξ/2: coefficients (t/2)^n/(n+1)! for even n
                let half = 0.5 * t;
                let mut out = vec![ZERO; n_max + 1];
                let mut c = 1.0;
                for (n, slot) in out.iter_mut().enumerate() {
                    if n > 0 {
                        c *= half / (n + 1) as f64;
                    }
                    if n % 2 == 0 {
                        *slot = C64::new(c, 0.0);
                    }
                }
                out
            }
            _ => self.jet(ZERO, n_max + 1),
        }
    }

    /// The function as a sum of `p(ξ) e^{λξ}` terms, when it is one.
    pub fn exp_poly_terms(&self) -> Option<Vec<ExpPolyTerm>> {
        match self {
            Self::ExpSum(terms) => Some(
                terms
                    .iter()
                    .map(|&(w, lambda)| ExpPolyTerm { poly: vec![w], lambda })
                    .collect(),
            ),
            Self::PolyExpSum(terms) => Some(terms.clone()),
            Self::Polynomial(c) => Some(vec![ExpPolyTerm {
                poly: c.clone(),
                lambda: ZERO,
            }]),
            Self::SegmentAverage(_) => None,
        }
    }

    /// `ξ ↦ Φ(ξ + z)` when it stays in the catalog.
    pub fn translate(&self, z: C64) -> Option<Self> {
        Some(match self {
            Self::ExpSum(terms) => Self::ExpSum(terms.iter().map(|&(w, l)| (w * (l * z).exp(), l)).collect()),
            Self::PolyExpSum(terms) => Self::PolyExpSum(
                terms
                    .iter()
                    .map(|t| ExpPolyTerm {
                        poly: jet::recentre(&t.poly, z, t.poly.len())
                            .into_iter()
                            .map(|c| c * (t.lambda * z).exp())
                            .collect(),
                        lambda: t.lambda,
                    })
                    .collect(),
            ),
            Self::Polynomial(c) => Self::Polynomial(jet::recentre(c, z, c.len())),
            Self::SegmentAverage(_) => return None,
        })
    }
}

fn segment_average_jet(t: f64, at: C64, len: usize) -> Vec<C64> {
    // h(u) = sinh(u)/u, u = tξ/2; the ξ-jet is the u-jet scaled by (t/2)^j.
    let half = 0.5 * t;
    let u0 = at * half;
    let ujet = if u0.norm() < 1.0 {
        // recentre the everywhere-convergent series at 0
        let n = len + 40;
        let mut series = vec![ZERO; n];
        let mut c = 1.0;
        for (k, slot) in series.iter_mut().enumerate() {
            if k > 0 {
                c /= (k + 1) as f64;
            }
            if k % 2 == 0 {
                *slot = C64::new(c, 0.0);
            }
        }
        jet::recentre(&series, u0, len)
    } else {
        let (sh, ch) = (u0.sinh(), u0.cosh());
        let mut num = Vec::with_capacity(len);
        let mut f = 1.0;
        for j in 0..len {
            if j > 0 {
                f /= j as f64;
            }
            num.push(if j % 2 == 0 { sh } else { ch } * f);
        }
        jet::div(&num, &[u0, ONE], len)
    };
    let mut scale = 1.0;
    ujet.into_iter()
        .map(|c| {
            let v = c * scale;
            scale *= half;
            v
        })
        .collect()
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// A zero `α` of multiplicity `mult`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroPoint {
    pub alpha: C64,
    pub mult: usize,
}

impl ZeroPoint {
    pub fn new(alpha: C64, mult: usize) -> Self {
        Self { alpha, mult }
    }
}

/// Principal argument in `[0, 2π)`.
pub fn principal_arg(z: C64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

/// Relative tolerance under which two moduli count as tied.
const MODULUS_TIE: f64 = 1e-12;

fn in_order(a: &ZeroPoint, b: &ZeroPoint) -> bool {
    let (ra, rb) = (a.alpha.norm(), b.alpha.norm());
    if (ra - rb).abs() <= MODULUS_TIE * ra.max(rb).max(1.0) {
        principal_arg(a.alpha) <= principal_arg(b.alpha)
    } else {
        ra < rb
    }
}

/// Zeros `{(α_k, m_k)}` ordered by modulus, ties by principal argument.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityVariety {
    points: Vec<ZeroPoint>,
}

impl MultiplicityVariety {
    pub fn new(mut points: Vec<ZeroPoint>) -> Result<Self> {
        if points.iter().any(|p| p.mult == 0) {
            return Err(Error::InvalidVariety("multiplicities must be ≥ 1".into()));
        }
        if points.iter().any(|p| !p.alpha.is_finite()) {
            return Err(Error::InvalidVariety("non-finite node".into()));
        }
        points.sort_by(|a, b| a.alpha.norm().total_cmp(&b.alpha.norm()));
        // runs of tied moduli are ordered by argument
        let mut start = 0;
        while start < points.len() {
            let r0 = points[start].alpha.norm();
            let mut end = start + 1;
            while end < points.len() && points[end].alpha.norm() - r0 <= MODULUS_TIE * r0.max(1.0) {
                end += 1;
            }
            points[start..end].sort_by(|a, b| principal_arg(a.alpha).total_cmp(&principal_arg(b.alpha)));
            start = end;
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i].alpha == points[j].alpha {
                    return Err(Error::InvalidVariety(format!("repeated node {}", points[i].alpha)));
                }
            }
        }
        Ok(Self { points })
    }

    pub fn from_pairs(pairs: &[(C64, usize)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(a, m)| ZeroPoint::new(a, m)).collect())
    }

    pub fn points(&self) -> &[ZeroPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn alpha(&self, k: usize) -> C64 {
        self.points[k].alpha
    }

    pub fn mult(&self, k: usize) -> usize {
        self.points[k].mult
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.mult).collect()
    }

    /// The first `count` points.
    pub fn prefix(&self, count: usize) -> Self {
        Self {
            points: self.points[..count.min(self.len())].to_vec(),
        }
    }

    /// Points with `|α| ≤ radius`.
    pub fn within(&self, radius: f64) -> Self {
        Self {
            points: self
                .points
                .iter()
                .copied()
                .filter(|p| p.alpha.norm() <= radius)
                .collect(),
        }
    }

    /// Whether the stored order satisfies the modulus/argument invariant.
    pub fn is_ordered(&self) -> bool {
        self.points.windows(2).all(|w| in_order(&w[0], &w[1]))
    }

    /// `Σ m_n` over `n < k`.
    pub fn prefix_multiplicity(&self, k: usize) -> usize {
        self.points[..k].iter().map(|p| p.mult).sum()
    }

    /// CSV rows `k,re,im,m` with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,re,im,m\n");
        for (k, p) in self.points.iter().enumerate() {
            out.push_str(&format!("{k},{},{},{}\n", p.alpha.re, p.alpha.im, p.mult));
        }
        out
    }
}

/// Where a [`TaylorStream`] gets its coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum StreamSource {
    Catalog(EntireFunctionSpec),
    /// Explicit coefficients; later ones are zero.
    Series(Vec<C64>),
}

/// On-demand Taylor coefficients of an entire function `f` at the origin,
/// with optional growth metadata `(θ, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorStream {
    source: StreamSource,
    growth: Option<(YoungSpec, f64)>,
}

impl TaylorStream {
    pub fn series(coeffs: Vec<C64>) -> Self {
        Self {
            source: StreamSource::Series(coeffs),
            growth: None,
        }
    }

    pub fn catalog(spec: EntireFunctionSpec) -> Self {
        Self {
            source: StreamSource::Catalog(spec),
            growth: None,
        }
    }

    pub fn source(&self) -> &StreamSource {
        &self.source
    }

    pub fn growth(&self) -> Option<&(YoungSpec, f64)> {
        self.growth.as_ref()
    }

    pub fn spec(&self) -> Option<&EntireFunctionSpec> {
        match &self.source {
            StreamSource::Catalog(s) => Some(s),
            StreamSource::Series(_) => None,
        }
    }

    /// Coefficients `f_0..=f_n_max`.
    pub fn coeffs(&self, n_max: usize) -> Vec<C64> {
        match &self.source {
            StreamSource::Catalog(s) => s.taylor(n_max),
            StreamSource::Series(c) => {
                let mut out = vec![ZERO; n_max + 1];
                for (o, v) in out.iter_mut().zip(c) {
                    *o = *v;
                }
                out
            }
        }
    }

    pub fn coeff(&self, n: usize) -> C64 {
        match &self.source {
            StreamSource::Series(c) => c.get(n).copied().unwrap_or(ZERO),
            StreamSource::Catalog(_) => self.coeffs(n)[n],
        }
    }

    /// Number of nonzero-capable coefficients, `None` for infinite streams.
    pub fn finite_len(&self) -> Option<usize> {
        match &self.source {
            StreamSource::Series(c) => Some(c.len()),
            StreamSource::Catalog(EntireFunctionSpec::Polynomial(c)) => Some(c.len()),
            StreamSource::Catalog(_) => None,
        }
    }

    /// `f^{(order)}(z)`: closed form for catalog streams, otherwise the
    /// differentiated Taylor series summed until the terms die out.
    pub fn eval(&self, z: C64, order: usize) -> Result<C64> {
        match &self.source {
            StreamSource::Catalog(s) => Ok(s.jet(z, order + 1)[order] * factorial(order)),
            StreamSource::Series(c) => {
                let shifted = jet::recentre(c, z, order + 1);
                Ok(shifted[order] * factorial(order))
            }
        }
    }

    /// The stream of `w ↦ f(w + z)`.
    pub fn translate(&self, z: C64) -> Self {
        let source = match &self.source {
            StreamSource::Catalog(s) => match s.translate(z) {
                Some(t) => StreamSource::Catalog(t),
                None => StreamSource::Series(jet::recentre(&s.taylor(RECENTRE_TERMS), z, RECENTRE_TERMS)),
            },
            StreamSource::Series(c) => StreamSource::Series(jet::recentre(c, z, c.len())),
        };
        Self {
            source,
            growth: self.growth.clone(),
        }
    }
}

/// Source terms used when a stream must be re-centred numerically.
pub const RECENTRE_TERMS: usize = 256;

/// Wrap a catalog function as a coefficient stream carrying growth metadata.
pub fn taylor_stream_of(spec: EntireFunctionSpec, growth: (YoungSpec, f64)) -> TaylorStream {
    TaylorStream {
        source: StreamSource::Catalog(spec),
        growth: Some(growth),
    }
}
