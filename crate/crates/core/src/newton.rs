//! Hermite divided differences on a multiplicity variety.
//!
//! For jet data `a_{k,l} = g^{(l)}(α_k)/l!` the divided differences
//! `b_{k,l}` are the coefficients of the Newton-form interpolant
//!
//! ```text
//! Q_q(ξ) = Σ_{k≤q} Π_{k−1}(ξ) Σ_{l<m_k} b_{k,l} (ξ − α_k)^l,
//! Π_k(ξ) = Π_{n≤k} (ξ − α_n)^{m_n}.
//! ```

use serde::Serialize;

use crate::entire::MultiplicityVariety;
use crate::error::{Error, Result};
use crate::jet;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Tables whose condition estimate exceeds this are flagged: round trips
/// through the Newton form may then lose more than eight digits.
pub const CONDITION_FLAG: f64 = 1e8;

/// Complex values indexed by `(k, l)` with row `k` of length `m_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublyIndexed {
    rows: Vec<Vec<C64>>,
}

impl DoublyIndexed {
    pub fn new(rows: Vec<Vec<C64>>) -> Self {
        Self { rows }
    }

    pub fn zeros(v: &MultiplicityVariety) -> Self {
        Self {
            rows: v.points().iter().map(|p| vec![ZERO; p.mult]).collect(),
        }
    }

    pub fn rows(&self) -> &[Vec<C64>] {
        &self.rows
    }

    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.rows[k][l]
    }

    pub fn set(&mut self, k: usize, l: usize, value: C64) {
        self.rows[k][l] = value;
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Iterates `(k, l, value)` in increasing `k`, then `l`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(k, r)| r.iter().enumerate().map(move |(l, v)| (k, l, *v)))
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    /// First `count` rows.
    pub fn truncate(&self, count: usize) -> Self {
        Self {
            rows: self.rows[..count.min(self.rows.len())].to_vec(),
        }
    }

    /// Checks that the rows match the multiplicities of a variety prefix.
    pub fn check_shape(&self, v: &MultiplicityVariety) -> Result<()> {
        if self.rows.len() > v.len() {
            return Err(Error::Shape(format!(
                "{} rows for a variety of {} points",
                self.rows.len(),
                v.len()
            )));
        }
        for (k, r) in self.rows.iter().enumerate() {
            if r.len() != v.mult(k) {
                return Err(Error::Shape(format!(
                    "row {k} has {} entries, multiplicity is {}",
                    r.len(),
                    v.mult(k)
                )));
            }
        }
        Ok(())
    }
}

/// Jet data `ρ(g) = {g^{(l)}(α_k)/l!}` on a variety prefix.
pub type ValueSet = DoublyIndexed;

/// Divided differences with a conditioning estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DividedDifferenceTable {
    pub b: DoublyIndexed,
    /// `max_k Σ_{j≤k,l} |b_{j,l}| |Π_{j−1}(α_k)| |α_k−α_j|^l / max|a|`: the
    /// growth of the Newton sum at the nodes. Reconstructing `a` from `b`
    /// loses about this factor times the unit roundoff.
    pub condition: f64,
    pub flagged: bool,
}

impl DividedDifferenceTable {
    pub fn from_values(b: DoublyIndexed) -> Self {
        Self {
            b,
            condition: 0.0,
            flagged: false,
        }
    }

    /// CSV rows `k,l,re,im,condition_flag`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,l,re,im,condition_flag\n");
        for (k, l, v) in self.b.iter() {
            out.push_str(&format!("{k},{l},{},{},{}\n", v.re, v.im, self.flagged as u8));
        }
        out
    }
}

/// Jet of `Π_{n<upto}(ξ − α_n)^{m_n}` at `at`.
pub fn pi_jet(v: &MultiplicityVariety, upto: usize, at: C64, len: usize) -> Vec<C64> {
    let mut acc = vec![ZERO; len];
    acc[0] = C64::new(1.0, 0.0);
    for p in &v.points()[..upto] {
        let f = jet::linear_power(at - p.alpha, p.mult, len);
        acc = jet::mul(&acc, &f, len);
    }
    acc
}

/// Jet at `at` of the Newton polynomial `Q_q` built from rows `0..=q`.
pub fn newton_jet(v: &MultiplicityVariety, b: &DoublyIndexed, q: usize, at: C64, len: usize) -> Vec<C64> {
    let inner = |k: usize| -> Vec<C64> {
        // Σ_l b_{k,l} (ξ − α_k)^l as a jet at `at`
        jet::recentre(&b.rows[k], at - v.alpha(k), len)
    };
    let mut acc = inner(q);
    for k in (0..q).rev() {
        let factor = jet::linear_power(at - v.alpha(k), v.mult(k), len);
        let prod = jet::mul(&factor, &acc, len);
        acc = inner(k).into_iter().zip(prod).map(|(a, p)| a + p).collect();
    }
    acc
}

/// `Q_q^{(order)}(ξ) / order!`.
pub fn newton_eval(v: &MultiplicityVariety, b: &DividedDifferenceTable, q: usize, xi: C64, order: usize) -> C64 {
    newton_jet(v, &b.b, q, xi, order + 1)[order]
}

/// Ψ: jet data to divided differences.
pub fn psi_forward(v: &MultiplicityVariety, a: &ValueSet) -> Result<DividedDifferenceTable> {
    a.check_shape(v)?;
    let mut rows: Vec<Vec<C64>> = Vec::with_capacity(a.len());
    for (k, ak) in a.rows.iter().enumerate() {
        if k == 0 {
            rows.push(ak.clone());
            continue;
        }
        let m = ak.len();
        let alpha = v.alpha(k);
        let partial = DoublyIndexed { rows };
        let q = newton_jet(v, &partial, k - 1, alpha, m);
        rows = partial.rows;
        let pi = pi_jet(v, k, alpha, m);
        let p0 = pi[0];
        if p0.norm() < 1e-300 {
            return Err(Error::CoincidentNodes { k });
        }
        let mut bk = Vec::with_capacity(m);
        for l in 0..m {
            let mut num = ak[l] - q[l];
            for (n, bkn) in bk.iter().enumerate() {
                num -= pi[l - n] * bkn;
            }
            bk.push(num / p0);
        }
        rows.push(bk);
    }
    let b = DoublyIndexed { rows };
    let condition = newton_growth(v, &b) / a.max_abs().max(f64::MIN_POSITIVE);
    Ok(DividedDifferenceTable {
        b,
        condition,
        flagged: condition > CONDITION_FLAG,
    })
}

fn newton_growth(v: &MultiplicityVariety, b: &DoublyIndexed) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..b.len() {
        let x = v.alpha(k);
        let mut pi = 1.0;
        let mut sum = 0.0;
        for j in 0..=k {
            let d = (x - v.alpha(j)).norm();
            let mut pow = 1.0;
            for c in &b.rows[j] {
                sum += c.norm() * pi * pow;
                pow *= d;
            }
            pi *= d.powi(v.mult(j) as i32);
        }
        worst = worst.max(sum);
    }
    worst
}

/// Ψ⁻¹: `a_{k,l} = Q_K^{(l)}(α_k)/l!`.
pub fn psi_inverse(v: &MultiplicityVariety, b: &DividedDifferenceTable) -> Result<ValueSet> {
    b.b.check_shape(v)?;
    if b.b.is_empty() {
        return Ok(DoublyIndexed { rows: Vec::new() });
    }
    let q = b.b.len() - 1;
    let rows = (0..=q).map(|k| newton_jet(v, &b.b, q, v.alpha(k), v.mult(k))).collect();
    Ok(DoublyIndexed { rows })
}

/// Taylor coefficients at `x = at` of `Π (x − β)^{−e}` over `factors`,
/// from the exponential recurrence on the logarithmic derivative.
pub fn inverse_power_product_jet(at: C64, factors: &[(C64, usize)], len: usize) -> Vec<C64> {
    // L(h) = −Σ e ln(δ + h): L_r = −Σ e (−1)^{r−1} / (r δ^r) for r ≥ 1
    let mut log = vec![ZERO; len];
    let mut f0 = C64::new(1.0, 0.0);
    for &(beta, e) in factors {
        let delta = at - beta;
        f0 /= delta.powu(e as u32);
        let inv = delta.inv();
        let mut pow = inv;
        for (r, slot) in log.iter_mut().enumerate().skip(1) {
            let sign = if r % 2 == 1 { 1.0 } else { -1.0 };
            *slot -= pow * (e as f64 * sign / r as f64);
            pow *= inv;
        }
    }
    // F = exp(L): F_r = (1/r) Σ_{i=1}^r i L_i F_{r−i}
    let mut out = vec![ZERO; len];
    if len == 0 {
        return out;
    }
    out[0] = f0;
    for r in 1..len {
        let mut acc = ZERO;
        for i in 1..=r {
            acc += log[i] * out[r - i] * i as f64;
        }
        out[r] = acc / r as f64;
    }
    out
}

/// Monomial coefficients of `P_{k,j,l}(z)`, a polynomial of degree `< m_j`.
pub fn expansion_poly(v: &MultiplicityVariety, k: usize, j: usize, l: usize) -> Result<Vec<C64>> {
    if k >= v.len() || j > k || l >= v.mult(k) {
        return Err(Error::Index(format!(
            "P_(k={k}, j={j}, l={l}) on a variety of {} points",
            v.len()
        )));
    }
    let alpha_j = v.alpha(j);
    let mut factors: Vec<(C64, usize)> = (0..k).filter(|&n| n != j).map(|n| (v.alpha(n), v.mult(n))).collect();
    let top = if j < k {
        factors.push((v.alpha(k), l + 1));
        v.mult(j) - 1
    } else {
        l
    };
    let f = inverse_power_product_jet(alpha_j, &factors, top + 1);
    // P(z) = Σ_{i ≤ top} z^i / i! · F_{top − i}
    let mut inv_fact = 1.0;
    Ok((0..=top)
        .map(|i| {
            if i > 0 {
                inv_fact /= i as f64;
            }
            f[top - i] * inv_fact
        })
        .collect())
}

/// Jet data of `g_z(ξ) = e^{zξ}` on the first `count` points.
pub fn exponential_values(v: &MultiplicityVariety, count: usize, z: C64) -> ValueSet {
    DoublyIndexed {
        rows: v.points()[..count]
            .iter()
            .map(|p| jet::exponential(z, p.alpha, p.mult))
            .collect(),
    }
}

/// All `b_{k,l}(z)` for `k < count`, by the Ψ recursion.
pub fn exponential_divided_differences(
    v: &MultiplicityVariety,
    count: usize,
    z: C64,
) -> Result<DividedDifferenceTable> {
    psi_forward(v, &exponential_values(v, count, z))
}

/// `b_{k,l}(z)`: divided difference of `e^{zξ}` by the Ψ recursion.
pub fn divided_diff_exponential(v: &MultiplicityVariety, k: usize, l: usize, z: C64) -> Result<C64> {
    if k >= v.len() || l >= v.mult(k) {
        return Err(Error::Index(format!("b_(k={k}, l={l})")));
    }
    Ok(exponential_divided_differences(v, k + 1, z)?.b.get(k, l))
}

/// `b_{k,l}(z) = Σ_{j≤k} e^{zα_j} P_{k,j,l}(z)`, the closed form used to
/// cross-check the recursion.
pub fn divided_diff_exponential_closed(v: &MultiplicityVariety, k: usize, l: usize, z: C64) -> Result<C64> {
    let mut acc = ZERO;
    for j in 0..=k {
        let p = expansion_poly(v, k, j, l)?;
        acc += (z * v.alpha(j)).exp() * jet::eval_at(&p, z);
    }
    Ok(acc)
}

/// Magnitude of the summands of the closed form, `Σ_j |e^{zα_j}| Σ_i |p_i||z|^i`.
pub fn closed_form_scale(v: &MultiplicityVariety, k: usize, l: usize, z: C64) -> Result<f64> {
    let mut acc = 0.0;
    for j in 0..=k {
        let p = expansion_poly(v, k, j, l)?;
        let mut pz = 0.0;
        let mut zp = 1.0;
        for c in &p {
            pz += c.norm() * zp;
            zp *= z.norm();
        }
        acc += (z * v.alpha(j)).exp().norm() * pz;
    }
    Ok(acc)
}
