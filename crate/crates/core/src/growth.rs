//! Young functions, their Legendre transforms, and the weighted sup norms
//! `sup |f(z)| e^{-θ(m|z|)}` built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

const CONVEXITY_TOL: f64 = 1e-9;

/// A Young function θ, or the limit case θ(x) = x.
#[derive(Debug, Clone, PartialEq)]
pub enum YoungSpec {
    Linear,
    Power(f64),
    Tabulated(Tabulated),
}

/// Monotone convex table, interpolated piecewise linearly. The domain is
/// `[0, r_max]` with `r_max` the last abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    points: Vec<(f64, f64)>,
}

impl Tabulated {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.iter().any(|(r, y)| !r.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidYoung("non-finite table entry".into()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.first().map(|p| p.0) != Some(0.0) {
            points.insert(0, (0.0, 0.0));
        }
        if points[0].1 != 0.0 {
            return Err(Error::InvalidYoung("θ(0) must be 0".into()));
        }
        if points.len() < 3 {
            return Err(Error::InvalidYoung(
                "a table needs at least two positive abscissae".into(),
            ));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidYoung("duplicate abscissa".into()));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidYoung("table is not nondecreasing".into()));
            }
        }
        for w in points.windows(3) {
            let s0 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            let s1 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
            if s1 < s0 - CONVEXITY_TOL * (1.0 + s0.abs()) {
                return Err(Error::InvalidYoung(format!("table is not convex near r = {}", w[1].0)));
            }
        }
        let n = points.len();
        let (r1, y1) = points[n - 2];
        let (r2, y2) = points[n - 1];
        if r1 > 0.0 && y2 / r2 <= y1 / r1 {
            return Err(Error::InvalidYoung(
                "θ(r)/r must increase at the two largest abscissae".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn r_max(&self) -> f64 {
        self.points.last().map(|p| p.0).unwrap_or(0.0)
    }

    fn eval(&self, x: f64) -> f64 {
        let i = self.points.partition_point(|p| p.0 <= x);
        if i == 0 {
            return self.points[0].1;
        }
        if i >= self.points.len() {
            return self.points[self.points.len() - 1].1;
        }
        let (r0, y0) = self.points[i - 1];
        let (r1, y1) = self.points[i];
        y0 + (y1 - y0) * (x - r0) / (r1 - r0)
    }
}

impl YoungSpec {
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidYoung(format!("power exponent {p} must exceed 1")));
        }
        Ok(Self::Power(p))
    }

    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        Tabulated::new(points).map(Self::Tabulated)
    }

    /// Upper end of the evaluation domain (infinite except for tables).
    pub fn r_max(&self) -> f64 {
        match self {
            Self::Tabulated(t) => t.r_max(),
            _ => f64::INFINITY,
        }
    }

    /// θ(x).
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) || x > self.r_max() {
            return Err(Error::Domain {
                value: x,
                cap: self.r_max(),
            });
        }
        Ok(match self {
            Self::Linear => x,
            Self::Power(p) => x.powf(*p),
            Self::Tabulated(t) => t.eval(x),
        })
    }

    /// θ*(x) = sup_{t ≥ 0} (t x − θ(t)). For tables the sup runs over the
    /// tabulated domain.
    pub fn legendre(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain {
                value: x,
                cap: f64::INFINITY,
            });
        }
        match self {
            Self::Linear => Err(Error::LinearCase),
            Self::Power(p) => {
                // bracket around the maximiser (x/p)^(1/(p-1))
                let t_star = (x / p).powf(1.0 / (p - 1.0));
                let hi = 2.0 * t_star + 1.0;
                Ok(legendre_on(|t| t.powf(*p), x, hi))
            }
            Self::Tabulated(t) => Ok(legendre_on(|s| t.eval(s), x, t.r_max())),
        }
    }
}

/// sup_{0 ≤ t ≤ hi} (t x − f(t)) for convex `f`, by ternary search.
pub fn legendre_on<F: Fn(f64) -> f64>(f: F, x: f64, hi: f64) -> f64 {
    let g = |t: f64| t * x - f(t);
    let (mut lo, mut hi) = (0.0_f64, hi);
    let stop = 1e-12 * (1.0 + x);
    while hi - lo > stop {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if g(a) < g(b) {
            lo = a;
        } else {
            hi = b;
        }
        if hi - lo <= stop {
            break;
        }
    }
    g(0.5 * (lo + hi)).max(g(0.0)).max(0.0)
}

/// Sample-based `max |v| e^{−θ(m|z|)}`: a lower bound for `‖f‖_{θ,m}`.
pub fn theta_norm(values: &[(C64, C64)], theta: &YoungSpec, m: f64) -> Result<f64> {
    values.iter().try_fold(0.0_f64, |acc, (z, v)| {
        let w = theta.eval(m * z.norm())?;
        Ok(acc.max(v.norm() * (-w).exp()))
    })
}

/// Evidence that `y ≤ A + θ(m r)` on a sample set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthBound {
    pub m: f64,
    pub a: f64,
}

/// `A(m) = max_i (y_i − θ(m r_i))` for one scale.
pub fn additive_constant(points: &[(f64, f64)], theta: &YoungSpec, m: f64) -> Option<f64> {
    let mut a = f64::NEG_INFINITY;
    for &(r, y) in points {
        let t = theta.eval(m * r).ok()?;
        a = a.max(y - t);
    }
    a.is_finite().then_some(a)
}

/// Fit `y ≤ A + θ(m r)` over `m_grid`: the `(m, A)` with the smallest finite
/// `A`, ties going to the smaller `m`.
pub fn fit_growth_bound(points: &[(f64, f64)], theta: &YoungSpec, m_grid: &[f64]) -> Option<GrowthBound> {
    if points.is_empty() {
        return None;
    }
    let mut best: Option<GrowthBound> = None;
    for &m in m_grid {
        if !(m > 0.0) {
            continue;
        }
        let Some(a) = additive_constant(points, theta, m) else {
            continue;
        };
        let better = match best {
            None => true,
            Some(b) => a < b.a || (a == b.a && m < b.m),
        };
        if better {
            best = Some(GrowthBound { m, a });
        }
    }
    best
}
