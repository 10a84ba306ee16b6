//! Truncated Taylor series ("jets") at a point.
//!
//! A jet of length `n` at `x` holds `f^(j)(x) / j!` for `j < n`. All the
//! Hermite and Newton computations work on jets, so derivatives never go
//! through finite differences.

use crate::C64;

/// Truncated product of two jets, keeping `len` terms.
pub fn mul(a: &[C64], b: &[C64], len: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); len];
    for (i, &ai) in a.iter().enumerate().take(len) {
        if ai == C64::new(0.0, 0.0) {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Truncated quotient `a / b`; `b[0]` must be nonzero.
pub fn div(a: &[C64], b: &[C64], len: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); len];
    let inv = b[0].inv();
    for n in 0..len {
        let mut acc = a.get(n).copied().unwrap_or_default();
        for j in 1..=n.min(b.len().saturating_sub(1)) {
            acc -= b[j] * out[n - j];
        }
        out[n] = acc * inv;
    }
    out
}

/// Jet of `(delta + h)^e` in `h`, i.e. `(x - a)^e` at `x` with `delta = x - a`.
pub fn linear_power(delta: C64, e: usize, len: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); len];
    // binomial(e, j) * delta^(e-j)
    let mut binom = 1.0;
    for (j, slot) in out.iter_mut().enumerate().take(e.min(len - 1) + 1) {
        *slot = delta.powu((e - j) as u32) * binom;
        binom = binom * (e - j) as f64 / (j + 1) as f64;
    }
    out
}

/// Jet of `exp(lambda * x)` at `x`.
pub fn exponential(lambda: C64, x: C64, len: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(len);
    let mut term = (lambda * x).exp();
    for j in 0..len {
        out.push(term);
        term = term * lambda / (j + 1) as f64;
    }
    out
}

/// Re-centre a jet at `x` to `x + h`: `out_i = sum_{j>=i} c_j C(j,i) h^(j-i)`.
///
/// Terms of each output coefficient are added in increasing order of
/// magnitude.
pub fn recentre(coeffs: &[C64], h: C64, len: usize) -> Vec<C64> {
    let n = coeffs.len();
    let mut out = vec![C64::new(0.0, 0.0); len];
    if h == C64::new(0.0, 0.0) {
        for (o, c) in out.iter_mut().zip(coeffs) {
            *o = *c;
        }
        return out;
    }
    let mut terms: Vec<C64> = Vec::with_capacity(n);
    for (i, slot) in out.iter_mut().enumerate().take(n.min(len)) {
        terms.clear();
        // C(j, i) h^(j - i) built incrementally in j
        let mut weight = C64::new(1.0, 0.0);
        for j in i..n {
            if j > i {
                weight = weight * h * (j as f64) / ((j - i) as f64);
            }
            let t = coeffs[j] * weight;
            if !t.is_finite() {
                break;
            }
            terms.push(t);
        }
        *slot = sum_by_magnitude(&mut terms);
    }
    out
}

/// Sum complex terms in increasing order of modulus.
pub fn sum_by_magnitude(terms: &mut [C64]) -> C64 {
    terms.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    terms.iter().fold(C64::new(0.0, 0.0), |acc, t| acc + t)
}

/// Evaluate a jet (as a polynomial in `h`) at `h`.
pub fn eval_at(coeffs: &[C64], h: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * h + c)
}
