//! Zero location with multiplicities.
//!
//! Catalog kinds with a known zero set (polynomials, two-exponential sums,
//! segment averages) use closed forms. Everything else goes through a
//! recursive rectangle search: each rectangle is scored by its winding
//! number, empty rectangles are dropped, and isolated candidates are
//! polished by Newton's method.

use std::f64::consts::{PI, TAU};

use crate::entire::{EntireFunctionSpec, MultiplicityVariety, ZeroPoint};
use crate::error::{Error, Result};
use crate::C64;

/// Largest multiplicity reported before [`Error::MultiplicityTooLarge`].
pub const MULTIPLICITY_CAP: usize = 8;

const MAX_RETRIES: usize = 5;
const BASE_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroMethod {
    /// Closed form when the catalog kind has one, otherwise the search.
    #[default]
    Auto,
    /// Always run the argument-principle search.
    ArgumentPrinciple,
}

/// All zeros of `phi` with `|α| ≤ radius`, with multiplicities.
pub fn find_zeros(phi: &EntireFunctionSpec, radius: f64, tol: f64) -> Result<MultiplicityVariety> {
    find_zeros_with(phi, radius, tol, ZeroMethod::Auto)
}

pub fn find_zeros_with(
    phi: &EntireFunctionSpec,
    radius: f64,
    tol: f64,
    method: ZeroMethod,
) -> Result<MultiplicityVariety> {
    phi.validate()?;
    if !(radius > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidSpec("radius and tolerance must be positive".into()));
    }
    let closed = match method {
        ZeroMethod::Auto => closed_form_zeros(phi, radius)?,
        ZeroMethod::ArgumentPrinciple => None,
    };
    let raw = match closed {
        Some(z) => z,
        None => subdivision_zeros(phi, radius, tol)?,
    };
    let points: Vec<ZeroPoint> = raw.into_iter().filter(|p| p.alpha.norm() <= radius).collect();
    if let Some(p) = points.iter().find(|p| p.mult > MULTIPLICITY_CAP) {
        return Err(Error::MultiplicityTooLarge {
            alpha: p.alpha.to_string(),
            mult: p.mult,
            cap: MULTIPLICITY_CAP,
        });
    }
    if points.is_empty() {
        return Err(Error::NoZeros { radius });
    }
    MultiplicityVariety::new(points)
}

fn closed_form_zeros(phi: &EntireFunctionSpec, radius: f64) -> Result<Option<Vec<ZeroPoint>>> {
    Ok(match phi {
        EntireFunctionSpec::Polynomial(c) => Some(polynomial_zeros(c)),
        EntireFunctionSpec::PolyExpSum(terms) => {
            // a single exponential rate: zeros are those of the summed polynomial
            let lambda = terms[0].lambda;
            if terms.iter().all(|t| t.lambda == lambda) {
                let len = terms.iter().map(|t| t.poly.len()).max().unwrap_or(0);
                let mut poly = vec![C64::new(0.0, 0.0); len];
                for t in terms {
                    for (p, c) in poly.iter_mut().zip(&t.poly) {
                        *p += c;
                    }
                }
                while poly.last() == Some(&C64::new(0.0, 0.0)) {
                    poly.pop();
                }
                Some(polynomial_zeros(&poly))
            } else {
                None
            }
        }
        EntireFunctionSpec::ExpSum(terms) => {
            let merged = merge_rates(terms);
            match merged.len() {
                0 | 1 => Some(Vec::new()),
                2 => Some(two_exponential_zeros(merged[0], merged[1], radius)),
                _ => None,
            }
        }
        EntireFunctionSpec::SegmentAverage(t) => {
            let step = TAU / t;
            let kmax = (radius / step).floor() as i64 + 1;
            let mut out = Vec::new();
            for k in -kmax..=kmax {
                if k != 0 {
                    out.push(ZeroPoint::new(C64::new(0.0, step * k as f64), 1));
                }
            }
            Some(out)
        }
    })
}

fn merge_rates(terms: &[(C64, C64)]) -> Vec<(C64, C64)> {
    let mut merged: Vec<(C64, C64)> = Vec::new();
    for &(w, l) in terms {
        match merged.iter_mut().find(|(_, ml)| *ml == l) {
            Some(slot) => slot.0 += w,
            None => merged.push((w, l)),
        }
    }
    merged.retain(|(w, _)| *w != C64::new(0.0, 0.0));
    merged
}

/// Zeros of `w1 e^{λ1 ξ} + w0 e^{λ0 ξ}`: `ξ = (Log(−w0/w1) + 2πik)/(λ1 − λ0)`.
fn two_exponential_zeros(a: (C64, C64), b: (C64, C64), radius: f64) -> Vec<ZeroPoint> {
    let (w1, l1) = a;
    let (w0, l0) = b;
    let d = l1 - l0;
    let base = (-w0 / w1).ln() / d;
    let step = C64::new(0.0, TAU) / d;
    let kmax = ((radius + base.norm()) / step.norm()).ceil() as i64 + 1;
    (-kmax..=kmax)
        .map(|k| {
            let num = (-w0 / w1).ln() + C64::new(0.0, TAU * k as f64);
            ZeroPoint::new(num / d, 1)
        })
        .collect()
}

/// Roots of a polynomial with multiplicities: zeros at the origin are read
/// off the low coefficients, the rest come from Laguerre iteration with
/// deflation, polished on the original polynomial and clustered.
pub fn polynomial_zeros(coeffs: &[C64]) -> Vec<ZeroPoint> {
    let zero = C64::new(0.0, 0.0);
    let origin = coeffs.iter().take_while(|c| **c == zero).count();
    let mut out = Vec::new();
    if origin > 0 {
        out.push(ZeroPoint::new(zero, origin));
    }
    let reduced: Vec<C64> = coeffs[origin..].to_vec();
    if reduced.len() <= 1 {
        return out;
    }
    let mut work = reduced.clone();
    let mut roots = Vec::new();
    while work.len() > 1 {
        let r = laguerre(&work, C64::new(0.0, 0.0));
        let r = polish(&reduced, r);
        roots.push(r);
        work = deflate_once(&work, r);
    }
    // cluster numerically repeated roots
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![roots[i]];
        used[i] = true;
        for j in i + 1..roots.len() {
            if !used[j] && (roots[j] - roots[i]).norm() < 1e-3 * scale {
                members.push(roots[j]);
                used[j] = true;
            }
        }
        let m = members.len();
        let mut centre = members.iter().sum::<C64>() / m as f64;
        if m > 1 {
            // the (m−1)-th derivative has a simple zero at a root of order m
            let deriv = derivative_coeffs(&reduced, m - 1);
            centre = polish(&deriv, centre);
        }
        out.push(ZeroPoint::new(centre, m));
    }
    out
}

fn derivative_coeffs(c: &[C64], order: usize) -> Vec<C64> {
    let mut d = c.to_vec();
    for _ in 0..order {
        d = d.iter().enumerate().skip(1).map(|(i, v)| v * i as f64).collect();
    }
    d
}

fn horner3(c: &[C64], x: C64) -> (C64, C64, C64) {
    let zero = C64::new(0.0, 0.0);
    let (mut p, mut dp, mut ddp) = (zero, zero, zero);
    for &a in c.iter().rev() {
        ddp = ddp * x + dp;
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp, 2.0 * ddp)
}

fn laguerre(c: &[C64], start: C64) -> C64 {
    let n = (c.len() - 1) as f64;
    let mut x = start;
    for iter in 0..200 {
        let (p, dp, ddp) = horner3(c, x);
        if p.norm() == 0.0 {
            return x;
        }
        let g = dp / p;
        let h = g * g - ddp / p;
        let sq = ((n - 1.0) * (n * h - g * g)).sqrt();
        let (d1, d2) = (g + sq, g - sq);
        let denom = if d1.norm() >= d2.norm() { d1 } else { d2 };
        let step = if denom.norm() > 0.0 {
            n / denom
        } else {
            C64::from_polar(1.0 + x.norm(), iter as f64)
        };
        // break limit cycles with an occasional fractional step
        let step = if iter % 20 == 19 { step * 0.618 } else { step };
        x -= step;
        if step.norm() <= 1e-15 * (1.0 + x.norm()) {
            break;
        }
    }
    x
}

fn polish(c: &[C64], mut x: C64) -> C64 {
    for _ in 0..20 {
        let (p, dp, _) = horner3(c, x);
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        let next = x - step;
        let (pn, _, _) = horner3(c, next);
        if pn.norm() >= p.norm() {
            break;
        }
        x = next;
        if step.norm() <= 1e-16 * (1.0 + x.norm()) {
            break;
        }
    }
    x
}

fn deflate_once(c: &[C64], r: C64) -> Vec<C64> {
    let n = c.len() - 1;
    let mut q = vec![C64::new(0.0, 0.0); n];
    let mut acc = c[n];
    for i in (0..n).rev() {
        q[i] = acc;
        acc = c[i] + acc * r;
    }
    q
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    lo: C64,
    hi: C64,
}

impl Rect {
    fn centre(&self) -> C64 {
        (self.lo + self.hi) * 0.5
    }

    fn diam(&self) -> f64 {
        (self.hi - self.lo).norm()
    }

    fn contains(&self, z: C64, margin: f64) -> bool {
        z.re >= self.lo.re - margin
            && z.re <= self.hi.re + margin
            && z.im >= self.lo.im - margin
            && z.im <= self.hi.im + margin
    }

    fn corners(&self) -> [C64; 4] {
        [
            self.lo,
            C64::new(self.hi.re, self.lo.im),
            self.hi,
            C64::new(self.lo.re, self.hi.im),
        ]
    }
}

/// Principal-argument increment of `phi` along the segment `[a, b]`, with
/// adaptive bisection wherever consecutive samples turn by more than π/4.
fn arg_increment(phi: &EntireFunctionSpec, a: C64, b: C64, samples: usize) -> Result<f64> {
    let mut total = 0.0;
    let mut prev_z = a;
    let mut prev = phi.value(a);
    check_nonzero(prev)?;
    for i in 1..=samples {
        let z = a + (b - a) * (i as f64 / samples as f64);
        let v = phi.value(z);
        check_nonzero(v)?;
        total += refine(phi, prev_z, prev, z, v, 0)?;
        prev_z = z;
        prev = v;
    }
    Ok(total)
}

fn check_nonzero(v: C64) -> Result<()> {
    if v.norm() == 0.0 || !v.is_finite() {
        return Err(Error::ContourThroughZero { retries: 0 });
    }
    Ok(())
}

fn refine(phi: &EntireFunctionSpec, za: C64, fa: C64, zb: C64, fb: C64, depth: usize) -> Result<f64> {
    let d = (fb / fa).arg();
    if d.abs() <= PI / 4.0 {
        return Ok(d);
    }
    if depth >= 40 {
        return Err(Error::ContourThroughZero { retries: 0 });
    }
    let zm = (za + zb) * 0.5;
    let fm = phi.value(zm);
    check_nonzero(fm)?;
    Ok(refine(phi, za, fa, zm, fm, depth + 1)? + refine(phi, zm, fm, zb, fb, depth + 1)?)
}

/// Winding estimate `(1/2π) Δ arg φ` around a closed polygon.
fn polygon_winding(phi: &EntireFunctionSpec, vertices: &[C64], samples: usize) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..vertices.len() {
        let a = vertices[i];
        let b = vertices[(i + 1) % vertices.len()];
        total += arg_increment(phi, a, b, samples)?;
    }
    Ok(total / TAU)
}

/// Zero count inside a polygon: sample counts double until two successive
/// estimates round to the same integer within 0.05.
fn count_in_polygon(phi: &EntireFunctionSpec, vertices: &[C64]) -> Result<usize> {
    let mut samples = BASE_SAMPLES;
    let mut prev = polygon_winding(phi, vertices, samples)?;
    for _ in 0..4 {
        samples *= 2;
        let next = polygon_winding(phi, vertices, samples)?;
        if (next - prev).abs() < 0.05 && (next - next.round()).abs() < 0.05 {
            return Ok(next.round().max(0.0) as usize);
        }
        prev = next;
    }
    Err(Error::ContourThroughZero { retries: 0 })
}

fn count_in_rect(phi: &EntireFunctionSpec, r: &Rect) -> Result<usize> {
    count_in_polygon(phi, &r.corners())
}

/// Zero count inside the circle `|ξ − centre| = radius`.
pub fn count_in_circle(phi: &EntireFunctionSpec, centre: C64, radius: f64) -> Result<usize> {
    let verts: Vec<C64> = (0..64)
        .map(|i| centre + C64::from_polar(radius, TAU * i as f64 / 64.0))
        .collect();
    count_in_polygon(phi, &verts)
}

/// `(1/2πi) ∮ φ'/φ` over a circle by the trapezoid rule with `n` nodes.
pub fn argument_principle_integral(phi: &EntireFunctionSpec, centre: C64, radius: f64, n: usize) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        let u = C64::from_polar(1.0, TAU * i as f64 / n as f64);
        let z = centre + u * radius;
        let j = phi.jet(z, 2);
        // dξ = i r u dθ
        acc += j[1] / j[0] * u * radius;
    }
    (acc / n as f64).re
}

/// Newton iteration on `φ^{(order)}`, which has a simple zero at a zero of
/// `φ` of multiplicity `order + 1`.
fn newton(phi: &EntireFunctionSpec, start: C64, order: usize) -> Option<C64> {
    let mut x = start;
    for _ in 0..80 {
        let j = phi.jet(x, order + 2);
        let (f, df) = (j[order], j[order + 1] * (order + 1) as f64);
        if f.norm() == 0.0 {
            return Some(x);
        }
        if df.norm() == 0.0 || !df.is_finite() {
            return None;
        }
        let step = f / df;
        x -= step;
        if !x.is_finite() {
            return None;
        }
        if step.norm() <= 1e-14 * (1.0 + x.norm()) {
            return Some(x);
        }
    }
    None
}

struct Search<'a> {
    phi: &'a EntireFunctionSpec,
    tol: f64,
    min_leaf: f64,
    found: Vec<ZeroPoint>,
}

impl Search<'_> {
    fn multiplicity_radius(&self, alpha: C64) -> f64 {
        self.tol.max(1e-6) * (1.0 + alpha.norm())
    }

    /// Accept a Newton candidate for a rectangle holding `count` zeros if
    /// it lands inside and a small circle around it winds `count` times.
    fn try_accept(&mut self, rect: &Rect, count: usize) -> Result<bool> {
        let Some(root) = newton(self.phi, rect.centre(), count - 1) else {
            return Ok(false);
        };
        if !rect.contains(root, 0.05 * rect.diam()) {
            return Ok(false);
        }
        let rho = self
            .multiplicity_radius(root)
            .min(0.25 * rect.diam().max(self.min_leaf));
        let m = match count_in_circle(self.phi, root, rho) {
            Ok(m) => m,
            Err(_) => return Ok(false),
        };
        if m == count {
            self.found.push(ZeroPoint::new(root, m));
            return Ok(true);
        }
        Ok(false)
    }

    fn search(&mut self, rect: Rect, count: usize, depth: usize) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        if (count == 1 || rect.diam() < 1e-2 * (1.0 + rect.centre().norm())) && self.try_accept(&rect, count)? {
            return Ok(());
        }
        if rect.diam() < self.min_leaf || depth > 60 {
            // unresolved cluster: report it as one zero of the full count
            let root = newton(self.phi, rect.centre(), count - 1).unwrap_or(rect.centre());
            self.found.push(ZeroPoint::new(root, count));
            return Ok(());
        }
        for attempt in 0..=MAX_RETRIES {
            let shift = 0.5 + 0.0731 * attempt as f64 * if attempt % 2 == 0 { 1.0 } else { -1.0 };
            let mid = C64::new(
                rect.lo.re + shift * (rect.hi.re - rect.lo.re),
                rect.lo.im + (1.0 - shift) * (rect.hi.im - rect.lo.im),
            );
            let kids = [
                Rect { lo: rect.lo, hi: mid },
                Rect {
                    lo: C64::new(mid.re, rect.lo.im),
                    hi: C64::new(rect.hi.re, mid.im),
                },
                Rect {
                    lo: C64::new(rect.lo.re, mid.im),
                    hi: C64::new(mid.re, rect.hi.im),
                },
                Rect { lo: mid, hi: rect.hi },
            ];
            let counts: Result<Vec<usize>> = kids.iter().map(|k| count_in_rect(self.phi, k)).collect();
            match counts {
                Ok(c) if c.iter().sum::<usize>() == count => {
                    for (k, n) in kids.iter().zip(c) {
                        self.search(*k, n, depth + 1)?;
                    }
                    return Ok(());
                }
                _ => continue,
            }
        }
        Err(Error::ContourThroughZero { retries: MAX_RETRIES })
    }
}

fn subdivision_zeros(phi: &EntireFunctionSpec, radius: f64, tol: f64) -> Result<Vec<ZeroPoint>> {
    let mut last_err = None;
    for attempt in 0..=MAX_RETRIES {
        let half = radius * (1.0 + 1e-3 + 0.0137 * attempt as f64) + tol;
        let outer = Rect {
            lo: C64::new(-half, -half * (1.0 + 0.0011 * attempt as f64)),
            hi: C64::new(half * (1.0 + 0.0007 * attempt as f64), half),
        };
        let count = match count_in_rect(phi, &outer) {
            Ok(c) => c,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let mut search = Search {
            phi,
            tol,
            min_leaf: 1e-9 * (1.0 + radius),
            found: Vec::new(),
        };
        match search.search(outer, count, 0) {
            Ok(()) => return Ok(dedupe(search.found)),
            Err(e) => last_err = Some(e),
        }
    }
    Err(match last_err {
        Some(Error::ContourThroughZero { .. }) | None => Error::ContourThroughZero { retries: MAX_RETRIES },
        Some(e) => e,
    })
}

fn dedupe(mut pts: Vec<ZeroPoint>) -> Vec<ZeroPoint> {
    let mut out: Vec<ZeroPoint> = Vec::new();
    pts.sort_by(|a, b| a.alpha.re.total_cmp(&b.alpha.re));
    for p in pts {
        if let Some(q) = out
            .iter_mut()
            .find(|q| (q.alpha - p.alpha).norm() <= 1e-8 * (1.0 + p.alpha.norm()))
        {
            q.mult = q.mult.max(p.mult);
        } else {
            out.push(p);
        }
    }
    out
}

/// Checks `|φ^{(m_k)}(α_k)| > tol` for every reported zero.
pub fn certify_multiplicities(phi: &EntireFunctionSpec, v: &MultiplicityVariety, tol: f64) -> bool {
    v.points().iter().all(|p| {
        let j = phi.jet(p.alpha, p.mult + 1);
        (j[p.mult] * crate::entire::factorial(p.mult)).norm() > tol
    })
}
