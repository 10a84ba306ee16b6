//! Coefficient extraction and series synthesis for both expansions, the
//! sequence norms, and the change of coefficients between them.
//!
//! General flavour: `f(z) = Σ_k Σ_l c_{k,l} [Σ_{j≤k} e^{zα_j} P_{k,j,l}(z)]`.
//! Interpolating flavour: `f(z) = Σ_k e^{zα_k} Σ_l d_{k,l} z^l/l!`.

use rayon::prelude::*;
use serde::Serialize;

use crate::entire::{factorial, EntireFunctionSpec, ExpPolyTerm, MultiplicityVariety, TaylorStream};
use crate::error::{Error, Result};
use crate::functionals::{self, AnalyticFunctional, N_MAX_CAP};
use crate::growth::YoungSpec;
use crate::newton::{self, DoublyIndexed};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Relative size of the last packet above which `c_to_d` warns.
pub const TRUNCATION_WARN: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Flavor {
    General,
    Interpolating,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoefficients {
    flavor: Flavor,
    values: DoublyIndexed,
    variety: MultiplicityVariety,
    /// Relative size of the last packet's contribution, when it exceeded
    /// [`TRUNCATION_WARN`] during a change of coefficients.
    pub truncation_warning: Option<f64>,
}

impl ExpansionCoefficients {
    /// `values` must match the multiplicities of a prefix of `variety`.
    pub fn new(flavor: Flavor, values: DoublyIndexed, variety: &MultiplicityVariety) -> Result<Self> {
        values.check_shape(variety)?;
        Ok(Self {
            flavor,
            variety: variety.prefix(values.len()),
            values,
            truncation_warning: None,
        })
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn values(&self) -> &DoublyIndexed {
        &self.values
    }

    pub fn variety(&self) -> &MultiplicityVariety {
        &self.variety
    }

    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.values.get(k, l)
    }

    /// Number of packets.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The first `count` packets.
    pub fn truncate(&self, count: usize) -> Self {
        let values = self.values.truncate(count);
        Self {
            flavor: self.flavor,
            variety: self.variety.prefix(values.len()),
            values,
            truncation_warning: None,
        }
    }

    /// Weight of `(k, l)` in the sequence norm.
    pub fn norm_weight(&self, k: usize, l: usize, theta: &YoungSpec, p: f64) -> Result<f64> {
        let r = self.variety.alpha(k).norm();
        let w = theta.eval(p * r)?.exp();
        Ok(match self.flavor {
            Flavor::General => {
                let e = self.variety.prefix_multiplicity(k) + l;
                w * (r + 1.0).powi(-(e as i32))
            }
            Flavor::Interpolating => w,
        })
    }

    /// CSV rows `k,l,re,im,|alpha_k|,norm_weight`.
    pub fn to_csv(&self, theta: &YoungSpec, p: f64) -> Result<String> {
        let mut out = String::from("k,l,re,im,abs_alpha,norm_weight\n");
        for (k, l, v) in self.values.iter() {
            let w = self.norm_weight(k, l, theta, p)?;
            out.push_str(&format!(
                "{k},{l},{},{},{},{}\n",
                v.re,
                v.im,
                self.variety.alpha(k).norm(),
                w
            ));
        }
        Ok(out)
    }
}

fn check_truncation(v: &MultiplicityVariety, k_max: usize) -> Result<()> {
    if v.is_empty() {
        return Err(Error::EmptyVariety);
    }
    if k_max >= v.len() {
        return Err(Error::Index(format!("truncation {k_max} beyond {} points", v.len())));
    }
    Ok(())
}

fn index_pairs(v: &MultiplicityVariety, k_max: usize) -> Vec<(usize, usize)> {
    (0..=k_max).flat_map(|k| (0..v.mult(k)).map(move |l| (k, l))).collect()
}

fn collect(v: &MultiplicityVariety, k_max: usize, flat: Vec<C64>) -> DoublyIndexed {
    let mut it = flat.into_iter();
    DoublyIndexed::new((0..=k_max).map(|k| it.by_ref().take(v.mult(k)).collect()).collect())
}

/// `c_{k,l} = ⟨S_{k,l}, f⟩` for `k ≤ k_max`.
pub fn extract_general(v: &MultiplicityVariety, f: &TaylorStream, k_max: usize) -> Result<ExpansionCoefficients> {
    check_truncation(v, k_max)?;
    let flat = index_pairs(v, k_max)
        .into_par_iter()
        .map(|(k, l)| Ok(functionals::pair_auto(&functionals::s_functional(v, k, l)?, f)?.value))
        .collect::<Result<Vec<C64>>>()?;
    ExpansionCoefficients::new(Flavor::General, collect(v, k_max, flat), v)
}

/// `d_{k,l} = ⟨T_{k,l}, f⟩` for `k ≤ k_max`.
pub fn extract_interpolating(
    phi: &EntireFunctionSpec,
    v: &MultiplicityVariety,
    f: &TaylorStream,
    k_max: usize,
) -> Result<ExpansionCoefficients> {
    check_truncation(v, k_max)?;
    let flat = index_pairs(v, k_max)
        .into_par_iter()
        .map(|(k, l)| {
            let t = functionals::t_functional(phi, v, k, l, N_MAX_CAP)?;
            Ok(functionals::pair_auto(&t, f)?.value)
        })
        .collect::<Result<Vec<C64>>>()?;
    ExpansionCoefficients::new(Flavor::Interpolating, collect(v, k_max, flat), v)
}

fn expect(c: &ExpansionCoefficients, flavor: Flavor) -> Result<()> {
    if c.flavor != flavor {
        return Err(Error::Shape(format!(
            "expected {flavor:?} coefficients, got {:?}",
            c.flavor
        )));
    }
    Ok(())
}

/// Value at `z` and the running sum after each packet.
pub fn synthesize_general(c: &ExpansionCoefficients, z: C64) -> Result<(C64, Vec<C64>)> {
    expect(c, Flavor::General)?;
    if c.is_empty() {
        return Ok((ZERO, Vec::new()));
    }
    let b = newton::exponential_divided_differences(&c.variety, c.len(), z)?;
    let mut acc = ZERO;
    let mut partials = Vec::with_capacity(c.len());
    for (k, row) in c.values.rows().iter().enumerate() {
        for (l, ckl) in row.iter().enumerate() {
            acc += ckl * b.b.get(k, l);
        }
        partials.push(acc);
    }
    Ok((acc, partials))
}

/// `Σ_k e^{zα_k} Σ_l d_{k,l} z^l/l!`.
pub fn synthesize_interpolating(d: &ExpansionCoefficients, z: C64) -> Result<C64> {
    expect(d, Flavor::Interpolating)?;
    Ok(to_exp_poly(d)?.value(z))
}

/// The synthesised function as an exponential polynomial, one term per
/// node of the variety prefix.
pub fn to_exp_poly(coeffs: &ExpansionCoefficients) -> Result<EntireFunctionSpec> {
    let v = &coeffs.variety;
    let terms = match coeffs.flavor {
        Flavor::Interpolating => coeffs
            .values
            .rows()
            .iter()
            .enumerate()
            .map(|(k, row)| ExpPolyTerm {
                poly: row.iter().enumerate().map(|(l, d)| d / factorial(l)).collect(),
                lambda: v.alpha(k),
            })
            .collect(),
        Flavor::General => {
            let d = c_to_d(coeffs)?;
            return to_exp_poly(&d);
        }
    };
    Ok(EntireFunctionSpec::PolyExpSum(terms))
}

/// Exact coefficient stream of the synthesised function.
pub fn synthesized_stream(coeffs: &ExpansionCoefficients) -> Result<TaylorStream> {
    Ok(TaylorStream::catalog(to_exp_poly(coeffs)?))
}

/// `Σ_k e^{θ(p|α_k|)} Σ_l |c_{k,l}| (|α_k|+1)^{−(m_0+⋯+m_{k−1}+l)}`.
pub fn coeff_norm_general(c: &ExpansionCoefficients, theta: &YoungSpec, p: f64) -> Result<f64> {
    expect(c, Flavor::General)?;
    weighted_norm(c, theta, p)
}

/// `Σ_k e^{θ(p|α_k|)} Σ_l |d_{k,l}|`.
pub fn coeff_norm_interpolating(d: &ExpansionCoefficients, theta: &YoungSpec, p: f64) -> Result<f64> {
    expect(d, Flavor::Interpolating)?;
    weighted_norm(d, theta, p)
}

fn weighted_norm(c: &ExpansionCoefficients, theta: &YoungSpec, p: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (k, l, v) in c.values.iter() {
        if v != ZERO {
            acc += v.norm() * c.norm_weight(k, l, theta, p)?;
        }
    }
    Ok(acc)
}

/// `d_{j,i} = i!·Σ_{k≥j} Σ_l c_{k,l} [z^i] P_{k,j,l}(z)`, the regrouping
/// of the general expansion by exponential.
pub fn c_to_d(c: &ExpansionCoefficients) -> Result<ExpansionCoefficients> {
    expect(c, Flavor::General)?;
    let v = &c.variety;
    let count = c.len();
    let mut d = DoublyIndexed::zeros(&v.prefix(count));
    let mut last = vec![0.0; count];
    for (k, row) in c.values.rows().iter().enumerate() {
        for (l, ckl) in row.iter().enumerate() {
            if *ckl == ZERO {
                continue;
            }
            for j in 0..=k {
                let p = newton::expansion_poly(v, k, j, l)?;
                for (i, pi) in p.iter().enumerate() {
                    let term = ckl * pi * factorial(i);
                    d.set(j, i, d.get(j, i) + term);
                    if k + 1 == count {
                        last[j] += term.norm();
                    }
                }
            }
        }
    }
    let mut out = ExpansionCoefficients::new(Flavor::Interpolating, d, v)?;
    out.truncation_warning = truncation_ratio(&out.values, &last);
    Ok(out)
}

fn truncation_ratio(d: &DoublyIndexed, last: &[f64]) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for (j, row) in d.rows().iter().enumerate() {
        let size: f64 = row.iter().map(|x| x.norm()).sum();
        if last[j] > 0.0 {
            worst = worst.max(last[j] / size.max(f64::MIN_POSITIVE));
        }
    }
    (worst > TRUNCATION_WARN).then_some(worst)
}

/// Simple-zero form `d_k = Σ_{j≥k} c_j Π_{n≤j, n≠k} (α_k − α_n)^{−1}`.
pub fn c_to_d_simple(c: &ExpansionCoefficients) -> Result<ExpansionCoefficients> {
    expect(c, Flavor::General)?;
    let v = &c.variety;
    if v.points().iter().any(|p| p.mult != 1) {
        return Err(Error::InvalidVariety("simple-zero form needs multiplicity 1".into()));
    }
    let count = c.len();
    let mut rows = Vec::with_capacity(count);
    let mut last = vec![0.0; count];
    for k in 0..count {
        let mut acc = ZERO;
        let mut weight = C64::new(1.0, 0.0);
        for n in 0..k {
            weight /= v.alpha(k) - v.alpha(n);
        }
        for j in k..count {
            if j > k {
                weight /= v.alpha(k) - v.alpha(j);
            }
            let term = c.get(j, 0) * weight;
            acc += term;
            if j + 1 == count {
                last[k] = term.norm();
            }
        }
        rows.push(vec![acc]);
    }
    let mut out = ExpansionCoefficients::new(Flavor::Interpolating, DoublyIndexed::new(rows), v)?;
    out.truncation_warning = truncation_ratio(&out.values, &last);
    Ok(out)
}

/// `max_{z ∈ grid} |(T ⋆ f)(z)|`.
pub fn residual_mean_periodic(t: &AnalyticFunctional, f: &TaylorStream, grid: &[C64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::Shape("empty residual grid".into()));
    }
    let values = grid
        .par_iter()
        .map(|z| functionals::convolve(t, f, *z).map(|v| v.norm()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

/// Norms over a sequence of truncations and whether they settle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummabilityReport {
    /// `(packets, norm)` pairs.
    pub norms: Vec<(usize, f64)>,
    pub last_change: f64,
    pub tolerance: f64,
    pub flagged: bool,
}

/// Compares the sequence norm on the first `counts[i]` packets; flags a
/// change above `tolerance` between the last two.
pub fn summability_diagnostic(
    coeffs: &ExpansionCoefficients,
    theta: &YoungSpec,
    p: f64,
    counts: &[usize],
    tolerance: f64,
) -> Result<SummabilityReport> {
    let mut norms = Vec::with_capacity(counts.len());
    for &n in counts {
        let t = coeffs.truncate(n);
        norms.push((t.len(), weighted_norm(&t, theta, p)?));
    }
    let last_change = match norms.as_slice() {
        [.., (_, a), (_, b)] => (b - a).abs(),
        _ => 0.0,
    };
    Ok(SummabilityReport {
        flagged: !(last_change < tolerance),
        norms,
        last_change,
        tolerance,
    })
}

/// Per-packet convergence of the general expansion at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub z: [f64; 2],
    /// `|partial_k − partial_{k−1}|`.
    pub packet_magnitudes: Vec<f64>,
    /// Least-squares slope of `ln |packet|` against `k`; negative when the
    /// packets decay.
    pub fitted_decay: Option<f64>,
}

pub fn convergence_report(z: C64, partials: &[C64]) -> ConvergenceReport {
    let mags: Vec<f64> = partials
        .iter()
        .enumerate()
        .map(|(k, p)| if k == 0 { p.norm() } else { (p - partials[k - 1]).norm() })
        .collect();
    let pts: Vec<(f64, f64)> = mags
        .iter()
        .enumerate()
        .filter(|(_, m)| **m > 0.0)
        .map(|(k, m)| (k as f64, m.ln()))
        .collect();
    let fitted_decay = (pts.len() >= 2).then(|| {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    ConvergenceReport {
        z: [z.re, z.im],
        packet_magnitudes: mags,
        fitted_decay,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::find_zeros;
    use proptest::prelude::*;
    use std::f64::consts::{E, TAU};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ode() -> (EntireFunctionSpec, MultiplicityVariety) {
        let phi = EntireFunctionSpec::Polynomial(vec![c(-1.0, 0.0), ZERO, c(1.0, 0.0)]);
        let v = MultiplicityVariety::from_pairs(&[(c(1.0, 0.0), 1), (c(-1.0, 0.0), 1)]).unwrap();
        (phi, v)
    }

    fn two_exp(a: C64, b: C64) -> TaylorStream {
        TaylorStream::catalog(EntireFunctionSpec::ExpSum(vec![(a, c(1.0, 0.0)), (b, c(-1.0, 0.0))]))
    }

    #[test]
    fn extract_general_examples() {
        let (_, v) = ode();
        let (a, b) = (c(1.5, -0.5), c(0.25, 2.0));
        let cs = extract_general(&v, &two_exp(a, b), 1).unwrap();
        assert!((cs.get(0, 0) - (a + b)).norm() < 1e-14);
        assert!((cs.get(1, 0) + b * 2.0).norm() < 1e-14);

        let zero = TaylorStream::series(vec![ZERO]);
        assert!(extract_general(&v, &zero, 1).unwrap().values().max_abs() == 0.0);

        let phi = EntireFunctionSpec::unit_shift_difference();
        let v = find_zeros(&phi, 20.0, 1e-12).unwrap();
        let one = TaylorStream::catalog(EntireFunctionSpec::Polynomial(vec![c(1.0, 0.0)]));
        let cs = extract_general(&v, &one, v.len() - 1).unwrap();
        assert!((cs.get(0, 0) - 1.0).norm() < 1e-15);
        for k in 1..v.len() {
            assert!(cs.get(k, 0).norm() < 1e-15);
        }
        assert!(matches!(extract_general(&v, &one, v.len()), Err(Error::Index(_))));
    }

    #[test]
    fn extract_interpolating_examples() {
        let phi = EntireFunctionSpec::unit_shift_difference();
        let v = find_zeros(&phi, 20.0, 1e-12).unwrap();
        let f = TaylorStream::catalog(EntireFunctionSpec::ExpSum(vec![(c(1.0, 0.0), c(0.0, TAU))]));
        let d = extract_interpolating(&phi, &v, &f, v.len() - 1).unwrap();
        for k in 0..v.len() {
            let want = if (v.alpha(k) - c(0.0, TAU)).norm() < 1e-9 {
                1.0
            } else {
                0.0
            };
            assert!((d.get(k, 0) - want).norm() < 1e-12, "k={k}: {}", d.get(k, 0));
        }

        let (phi, v) = ode();
        let (a, b) = (c(3.0, 0.0), c(2.0, 0.0));
        let d = extract_interpolating(&phi, &v, &two_exp(a, b), 1).unwrap();
        assert!((d.get(0, 0) - a).norm() < 1e-14 && (d.get(1, 0) - b).norm() < 1e-14);

        let zero = TaylorStream::series(vec![ZERO]);
        assert_eq!(
            extract_interpolating(&phi, &v, &zero, 1).unwrap().values().max_abs(),
            0.0
        );
    }

    #[test]
    fn synthesize_general_examples() {
        let (_, v) = ode();
        let (a, b) = (c(3.0, 1.0), c(-2.0, 0.5));
        let f = two_exp(a, b);
        let cs = extract_general(&v, &f, 1).unwrap();
        for z in [ZERO, c(1.0, 1.0), c(-2.0, 0.3)] {
            let (val, partials) = synthesize_general(&cs, z).unwrap();
            assert_eq!(partials.len(), 2);
            assert!((val - f.eval(z, 0).unwrap()).norm() < 1e-13 * (1.0 + val.norm()));
        }
        let one = ExpansionCoefficients::new(Flavor::General, DoublyIndexed::new(vec![vec![c(1.0, 0.0)]]), &v).unwrap();
        let z = c(0.4, -0.7);
        assert!((synthesize_general(&one, z).unwrap().0 - z.exp()).norm() < 1e-15);
    }

    #[test]
    fn synthesize_interpolating_examples() {
        let (_, v) = ode();
        let d = ExpansionCoefficients::new(
            Flavor::Interpolating,
            DoublyIndexed::new(vec![vec![c(2.0, 0.0)], vec![c(-1.0, 0.0)]]),
            &v,
        )
        .unwrap();
        let z = c(0.5, 0.5);
        assert!((synthesize_interpolating(&d, z).unwrap() - (z.exp() * 2.0 - (-z).exp())).norm() < 1e-14);

        let v0 = MultiplicityVariety::from_pairs(&[(ZERO, 1)]).unwrap();
        let d = ExpansionCoefficients::new(Flavor::Interpolating, DoublyIndexed::new(vec![vec![c(1.0, 0.0)]]), &v0)
            .unwrap();
        assert_eq!(synthesize_interpolating(&d, c(3.0, 3.0)).unwrap(), c(1.0, 0.0));

        // sin(2πz) from its two Fourier coefficients
        let v = MultiplicityVariety::from_pairs(&[(c(0.0, TAU), 1), (c(0.0, -TAU), 1)]).unwrap();
        let d = ExpansionCoefficients::new(
            Flavor::Interpolating,
            DoublyIndexed::new(vec![vec![c(0.0, -0.5)], vec![c(0.0, 0.5)]]),
            &v,
        )
        .unwrap();
        for z in [c(0.3, 0.0), c(0.0, 0.9), c(-0.5, 0.5)] {
            assert!((synthesize_interpolating(&d, z).unwrap() - (z * TAU).sin()).norm() < 1e-9);
        }
        assert!(synthesize_general(&d, z).is_err());
    }

    #[test]
    fn norm_examples() {
        let v = MultiplicityVariety::from_pairs(&[(ZERO, 1), (c(1.0, 0.0), 1)]).unwrap();
        let lin = YoungSpec::Linear;
        let c0 = ExpansionCoefficients::new(Flavor::General, DoublyIndexed::new(vec![vec![c(1.0, 0.0)]]), &v).unwrap();
        assert_eq!(coeff_norm_general(&c0, &lin, 1.0).unwrap(), 1.0);
        let c1 = ExpansionCoefficients::new(
            Flavor::General,
            DoublyIndexed::new(vec![vec![ZERO], vec![c(1.0, 0.0)]]),
            &v,
        )
        .unwrap();
        assert!((coeff_norm_general(&c1, &lin, 1.0).unwrap() - E / 2.0).abs() < 1e-15);
        let z = ExpansionCoefficients::new(Flavor::General, DoublyIndexed::zeros(&v), &v).unwrap();
        assert_eq!(coeff_norm_general(&z, &lin, 1.0).unwrap(), 0.0);

        let d =
            ExpansionCoefficients::new(Flavor::Interpolating, DoublyIndexed::new(vec![vec![c(1.0, 0.0)]]), &v).unwrap();
        assert_eq!(coeff_norm_interpolating(&d, &lin, 1.0).unwrap(), 1.0);
        let w = MultiplicityVariety::from_pairs(&[(c(0.0, TAU), 1)]).unwrap();
        let d =
            ExpansionCoefficients::new(Flavor::Interpolating, DoublyIndexed::new(vec![vec![c(1.0, 0.0)]]), &w).unwrap();
        assert!((coeff_norm_interpolating(&d, &lin, 1.0).unwrap() - TAU.exp()).abs() < 1e-10);
        let d = ExpansionCoefficients::new(Flavor::Interpolating, DoublyIndexed::zeros(&w), &w).unwrap();
        assert_eq!(coeff_norm_interpolating(&d, &lin, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn c_to_d_examples() {
        let (_, v) = ode();
        let (a, b) = (c(3.0, -1.0), c(2.0, 0.25));
        let cs = ExpansionCoefficients::new(
            Flavor::General,
            DoublyIndexed::new(vec![vec![a + b], vec![b * -2.0]]),
            &v,
        )
        .unwrap();
        for d in [c_to_d(&cs).unwrap(), c_to_d_simple(&cs).unwrap()] {
            assert!((d.get(0, 0) - a).norm() < 1e-15 && (d.get(1, 0) - b).norm() < 1e-15);
        }
        let one = cs.truncate(1);
        assert_eq!(c_to_d(&one).unwrap().get(0, 0), a + b);
        let z = ExpansionCoefficients::new(Flavor::General, DoublyIndexed::zeros(&v), &v).unwrap();
        assert_eq!(c_to_d(&z).unwrap().values().max_abs(), 0.0);
    }

    #[test]
    fn c_to_d_multiple_zero() {
        // f = (1 + 2z) e^{z} + 3 on V = {(0,1), (1,2)}
        let v = MultiplicityVariety::from_pairs(&[(ZERO, 1), (c(1.0, 0.0), 2)]).unwrap();
        let f = TaylorStream::catalog(EntireFunctionSpec::PolyExpSum(vec![
            ExpPolyTerm {
                poly: vec![c(1.0, 0.0), c(2.0, 0.0)],
                lambda: c(1.0, 0.0),
            },
            ExpPolyTerm {
                poly: vec![c(3.0, 0.0)],
                lambda: ZERO,
            },
        ]));
        let cs = extract_general(&v, &f, 1).unwrap();
        let d = c_to_d(&cs).unwrap();
        assert!((d.get(0, 0) - 3.0).norm() < 1e-13);
        assert!((d.get(1, 0) - 1.0).norm() < 1e-13);
        assert!((d.get(1, 1) - 2.0).norm() < 1e-13);
        let phi = EntireFunctionSpec::Polynomial(vec![ZERO, c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)]);
        let d2 = extract_interpolating(&phi, &v, &f, 1).unwrap();
        for (k, l, x) in d2.values().iter() {
            assert!((x - d.get(k, l)).norm() < 1e-12);
        }
    }

    #[test]
    fn truncation_warning_on_cut_series() {
        let phi = EntireFunctionSpec::unit_shift_difference();
        let v = find_zeros(&phi, 20.0, 1e-12).unwrap();
        let f = TaylorStream::catalog(EntireFunctionSpec::ExpSum(vec![(c(1.0, 0.0), c(0.0, 3.0 * TAU))]));
        let cs = extract_general(&v, &f, v.len() - 1).unwrap();
        assert!(c_to_d(&cs).unwrap().truncation_warning.is_none());
        // dropping the packet that carries e^{6πiz} leaves a large last term
        let cut = cs.truncate(5);
        assert!(c_to_d(&cut).unwrap().truncation_warning.is_some());
    }

    #[test]
    fn residual_examples() {
        let (phi, v) = ode();
        let t = AnalyticFunctional::from_spec(phi).unwrap();
        let cs = extract_general(&v, &two_exp(c(3.0, 0.0), c(2.0, 0.0)), 1).unwrap();
        let grid = [ZERO, c(1.0, 1.0), c(-1.5, 0.5), c(0.0, 2.0)];
        let f = synthesized_stream(&cs).unwrap();
        assert!(residual_mean_periodic(&t, &f, &grid).unwrap() < 1e-12);

        let t = AnalyticFunctional::from_spec(EntireFunctionSpec::unit_shift_difference()).unwrap();
        let per = TaylorStream::catalog(EntireFunctionSpec::ExpSum(vec![(c(1.0, 0.0), c(0.0, TAU))]));
        assert!(residual_mean_periodic(&t, &per, &grid).unwrap() < 1e-10);
        let zero = TaylorStream::series(vec![ZERO]);
        assert_eq!(residual_mean_periodic(&t, &zero, &grid).unwrap(), 0.0);
        assert!(residual_mean_periodic(&t, &zero, &[]).is_err());
    }

    #[test]
    fn summability_flags_corruption() {
        let phi = EntireFunctionSpec::unit_shift_difference();
        let v = find_zeros(&phi, 20.0, 1e-12).unwrap();
        let f = TaylorStream::catalog(EntireFunctionSpec::ExpSum(vec![
            (c(0.0, -0.5), c(0.0, TAU)),
            (c(0.0, 0.5), c(0.0, -TAU)),
        ]));
        let d = extract_interpolating(&phi, &v, &f, 6).unwrap();
        let lin = YoungSpec::Linear;
        let ok = summability_diagnostic(&d, &lin, 1.0, &[4, 7], 1e-6).unwrap();
        assert!(!ok.flagged, "{ok:?}");
        let mut bad = d.values().clone();
        let boost = (TAU * v.alpha(6).norm()).exp();
        bad.set(6, 0, c(1e-3, 0.0) * boost);
        let bad = ExpansionCoefficients::new(Flavor::Interpolating, bad, &v).unwrap();
        assert!(summability_diagnostic(&bad, &lin, 1.0, &[4, 7], 1e-6).unwrap().flagged);
    }

    #[test]
    fn convergence_report_decay() {
        let partials: Vec<C64> = (0..6).map(|k| c(1.0 - 0.5f64.powi(k + 1), 0.0)).collect();
        let r = convergence_report(ZERO, &partials);
        assert!((r.fitted_decay.unwrap() - 0.5f64.ln()).abs() < 1e-12);
    }

    proptest! {
        // synthesising from arbitrary coefficients on a finite variety gives
        // a mean-periodic function whose coefficients are recovered
        #[test]
        fn converse_and_uniqueness(
            raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 7),
        ) {
            let phi = EntireFunctionSpec::unit_shift_difference();
            let v = find_zeros(&phi, 20.0, 1e-12).unwrap();
            let vals = DoublyIndexed::new(raw.iter().take(v.len()).map(|&(a, b)| vec![c(a, b)]).collect());
            // hard truncation of the summability condition: scale by e^{−|α_k|}
            let mut scaled = vals.clone();
            for k in 0..v.len() {
                scaled.set(k, 0, vals.get(k, 0) * (-v.alpha(k).norm()).exp());
            }
            let cs = ExpansionCoefficients::new(Flavor::General, scaled, &v).unwrap();
            let f = synthesized_stream(&cs).unwrap();
            let t = AnalyticFunctional::from_spec(phi).unwrap();
            let grid = [ZERO, c(0.5, 0.2), c(-0.3, -0.4)];
            prop_assert!(residual_mean_periodic(&t, &f, &grid).unwrap() < 1e-8);
            let back = extract_general(&v, &f, v.len() - 1).unwrap();
            for (k, l, x) in cs.values().iter() {
                prop_assert!((back.get(k, l) - x).norm() <= 1e-8 * (1.0 + x.norm()));
            }
        }
    }
}
