//! Convex feasibility for one shattering subset.
//!
//! For signs `sᵢ = ±1`, witnesses `αᵢ` and margin `ε`, find `E ∈ C` with
//! `sᵢ(⟨E, xᵢ⟩ − αᵢ) ≥ ε` for all `i`. Two solvers are available:
//!
//! * Dykstra alternating projections between `C` and the half-spaces.
//! * A log-barrier method that maximizes the smallest margin `t` over `C`.
//!
//! Infeasibility is only reported through weak duality: for any
//! `μ ≥ 0` with `Σμᵢ = 1`,
//! `g(μ) = h_C(Σ μᵢ sᵢ xᵢ) − Σ μᵢ sᵢ αᵢ` bounds the best achievable margin
//! from above, so `g(μ) < ε − slack` rules the subset out.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{support_of_values, HypothesisClass};
use crate::error::{Error, Result};
use crate::linalg::regularized_solve;
use crate::matrix::hs_inner;
use crate::scalar::tolerance;
use crate::{ComplexMatrix, HermitianMatrix};

type C64 = Complex<f64>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityMethod {
    /// A short run of alternating projections, then the barrier solver.
    #[default]
    Auto,
    AlternatingProjections,
    InteriorPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityConfig {
    pub method: FeasibilityMethod,
    /// Cycle cap for alternating projections.
    pub max_iters: usize,
    /// Alternating-projection cycles tried before the barrier under `Auto`.
    pub warm_iters: usize,
    /// Margins within `slack` of `ε` count as achieved.
    pub slack: f64,
}

impl Default for FeasibilityConfig {
    fn default() -> Self {
        Self {
            method: FeasibilityMethod::Auto,
            max_iters: 50_000,
            warm_iters: 100,
            slack: tolerance::MARGIN_SLACK,
        }
    }
}

impl FeasibilityConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be positive".into()));
        }
        if !(self.slack >= 0.0) || !self.slack.is_finite() {
            return Err(Error::InvalidParameter(format!("slack {}", self.slack)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub(crate) enum SubsetResult {
    Feasible {
        effect: HermitianMatrix,
        margins: Vec<f64>,
    },
    Infeasible {
        best_margin: f64,
        dual_bound: f64,
        multipliers: Vec<f64>,
    },
    Undecided {
        best_margin: f64,
        iterations: usize,
    },
}

/// Point set data shared by every subset.
pub(crate) struct Prepared<'a> {
    pub class: HypothesisClass,
    pub dim: usize,
    pub points: &'a [HermitianMatrix],
    pub alpha: &'a [f64],
    pub epsilon: f64,
    center: HermitianMatrix,
    /// `⟨center, xᵢ⟩`.
    center_values: Vec<f64>,
    /// Orthonormal basis of the class's affine hull, as sparse entries.
    basis: Vec<Vec<(usize, usize, C64)>>,
    /// `coords[i][j] = ⟨B_j, xᵢ⟩`.
    coords: Vec<Vec<f64>>,
    norms_sq: Vec<f64>,
}

impl<'a> Prepared<'a> {
    pub fn new(
        class: HypothesisClass,
        points: &'a [HermitianMatrix],
        alpha: &'a [f64],
        epsilon: f64,
    ) -> Result<Self> {
        let dim = points[0].dim();
        class.validate(dim)?;
        let center = class.center(dim);
        let center_values = points
            .iter()
            .map(|x| hs_inner(&center, x))
            .collect::<Result<Vec<_>>>()?;
        let basis = hull_basis(class, dim);
        let coords = points
            .iter()
            .map(|x| {
                basis
                    .iter()
                    .map(|b| b.iter().map(|&(p, q, v)| (v * x.get(p, q).conj()).re).sum())
                    .collect()
            })
            .collect();
        let norms_sq = points
            .iter()
            .map(|x| {
                let f = x.frobenius_norm();
                f * f
            })
            .collect();
        Ok(Self {
            class,
            dim,
            points,
            alpha,
            epsilon,
            center,
            center_values,
            basis,
            coords,
            norms_sq,
        })
    }

    fn single_point(&self) -> bool {
        self.basis.is_empty()
    }

    /// `sᵢ(⟨E, xᵢ⟩ − αᵢ)` for an explicit matrix.
    pub fn margins_of(&self, e: &HermitianMatrix, signs: &[f64]) -> Result<Vec<f64>> {
        self.points
            .iter()
            .zip(signs)
            .zip(self.alpha)
            .map(|((x, s), a)| Ok(s * (hs_inner(e, x)? - a)))
            .collect()
    }

    /// Upper bound `g(μ)` on the best margin; `μ` is normalized here.
    pub fn dual_bound(&self, signs: &[f64], mu: &[f64]) -> Result<f64> {
        let total: f64 = mu.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Ok(f64::INFINITY);
        }
        let mut m = HermitianMatrix::zeros(self.dim);
        let mut offset = 0.0;
        for ((x, &s), (&a, &w)) in self.points.iter().zip(signs).zip(self.alpha.iter().zip(mu)) {
            let w = w / total;
            if w != 0.0 {
                m.axpy(w * s, x)?;
                offset += w * s * a;
            }
        }
        Ok(support_of_values(self.class, &m.eig()?.eigenvalues) - offset)
    }

    fn effect_at(&self, c: &[f64]) -> HermitianMatrix {
        let d = self.dim;
        let mut data = self.center.entries().to_vec();
        for (b, &cj) in self.basis.iter().zip(c) {
            for &(p, q, v) in b {
                data[p * d + q] += v * cj;
            }
        }
        HermitianMatrix::from_raw(d, data)
    }

    fn margins_at(&self, c: &[f64], signs: &[f64]) -> Vec<f64> {
        (0..self.points.len())
            .map(|i| {
                let v: f64 = self.coords[i].iter().zip(c).map(|(g, c)| g * c).sum();
                signs[i] * (self.center_values[i] + v - self.alpha[i])
            })
            .collect()
    }
}

/// Orthonormal (Hilbert–Schmidt) basis of the directions the class can move
/// in: traceless Hermitian matrices, plus `I/√d` when the trace is free.
fn hull_basis(class: HypothesisClass, d: usize) -> Vec<Vec<(usize, usize, C64)>> {
    let fixed_trace = matches!(
        class,
        HypothesisClass::StateSpace | HypothesisClass::RankK { .. }
    );
    if let HypothesisClass::RankK { k } = class {
        if k == 0 || k == d {
            return Vec::new();
        }
    }
    let mut out = Vec::new();
    if !fixed_trace {
        let s = 1.0 / (d as f64).sqrt();
        out.push((0..d).map(|i| (i, i, C64::new(s, 0.0))).collect());
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            out.push(vec![(j, k, C64::new(h, 0.0)), (k, j, C64::new(h, 0.0))]);
            out.push(vec![(j, k, C64::new(0.0, -h)), (k, j, C64::new(0.0, h))]);
        }
    }
    for l in 1..d {
        let s = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut b: Vec<_> = (0..l).map(|m| (m, m, C64::new(s, 0.0))).collect();
        b.push((l, l, C64::new(-s * l as f64, 0.0)));
        out.push(b);
    }
    out
}

/// Linear matrix inequality blocks `offset·I + σE ⪰ 0` describing the class.
fn lmi_blocks(class: HypothesisClass) -> Option<&'static [(f64, f64)]> {
    match class {
        HypothesisClass::EffectSpace | HypothesisClass::RankK { .. } => {
            Some(&[(1.0, 0.0), (-1.0, 1.0)])
        }
        HypothesisClass::StateSpace => Some(&[(1.0, 0.0)]),
        HypothesisClass::SymmetrizedSInf => Some(&[(1.0, 1.0), (-1.0, 1.0)]),
        HypothesisClass::SymmetrizedS1 => None,
    }
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

pub(crate) fn solve_subset(
    prep: &Prepared<'_>,
    signs: &[f64],
    cfg: &FeasibilityConfig,
) -> Result<SubsetResult> {
    let eps = prep.epsilon;
    if prep.single_point() {
        let e = prep.center.clone();
        let margins = prep.margins_of(&e, signs)?;
        let best = min_of(&margins);
        if best >= eps - cfg.slack {
            return Ok(SubsetResult::Feasible { effect: e, margins });
        }
        let mut mu = vec![0.0; margins.len()];
        let arg = margins.iter().position(|&m| m == best).unwrap_or(0);
        mu[arg] = 1.0;
        return Ok(SubsetResult::Infeasible {
            best_margin: best,
            dual_bound: best,
            multipliers: mu,
        });
    }
    // a single constraint can already be out of reach
    for i in 0..signs.len() {
        let mut mu = vec![0.0; signs.len()];
        mu[i] = 1.0;
        let g = prep.dual_bound(signs, &mu)?;
        if g < eps - cfg.slack {
            let best = min_of(&prep.margins_of(&prep.center, signs)?);
            return Ok(SubsetResult::Infeasible {
                best_margin: best,
                dual_bound: g,
                multipliers: mu,
            });
        }
    }
    let barrier_ok = lmi_blocks(prep.class).is_some();
    match cfg.method {
        FeasibilityMethod::AlternatingProjections => dykstra(prep, signs, cfg, cfg.max_iters),
        FeasibilityMethod::InteriorPoint => {
            if !barrier_ok {
                return Err(Error::UnsupportedClass(prep.class.name()));
            }
            barrier(prep, signs, cfg)
        }
        FeasibilityMethod::Auto => {
            if !barrier_ok {
                return dykstra(prep, signs, cfg, cfg.max_iters);
            }
            let warm = dykstra(prep, signs, cfg, cfg.warm_iters.max(1))?;
            match warm {
                SubsetResult::Undecided { iterations, .. } => {
                    let mut r = barrier(prep, signs, cfg)?;
                    if let SubsetResult::Undecided { iterations: it, .. } = &mut r {
                        *it += iterations;
                    }
                    Ok(r)
                }
                done => Ok(done),
            }
        }
    }
}

/// Dykstra's method between the class and the half-spaces
/// `{E : ⟨E, sᵢxᵢ⟩ ≥ sᵢαᵢ + ε}`.
fn dykstra(
    prep: &Prepared<'_>,
    signs: &[f64],
    cfg: &FeasibilityConfig,
    cap: usize,
) -> Result<SubsetResult> {
    let n = signs.len();
    let eps = prep.epsilon;
    let mut x = prep.center.clone();
    let mut p_class = HermitianMatrix::zeros(prep.dim);
    // half-space increments are −μᵢ sᵢ xᵢ
    let mut mu = vec![0.0; n];
    let mut best = f64::NEG_INFINITY;
    for iter in 1..=cap {
        let y = x.add_scaled(1.0, &p_class)?;
        let spec = y.eig()?;
        x = spec.with_eigenvalues(&prep.class.project_values(&spec.eigenvalues));
        p_class = y.add_scaled(-1.0, &x)?;

        let margins = prep.margins_of(&x, signs)?;
        let m = min_of(&margins);
        best = best.max(m);
        if m >= eps - cfg.slack {
            return Ok(SubsetResult::Feasible { effect: x, margins });
        }

        for i in 0..n {
            let nsq = prep.norms_sq[i];
            if nsq == 0.0 {
                continue;
            }
            let s = signs[i];
            // y = x + increment; ⟨y, s xᵢ⟩ = s⟨x, xᵢ⟩ − μᵢ ‖xᵢ‖²
            let val = s * hs_inner(&x, &prep.points[i])? - mu[i] * nsq;
            let rhs = s * prep.alpha[i] + eps;
            let r = (rhs - val).max(0.0) / nsq;
            // x_new = y + r s xᵢ = x + (r − μᵢ) s xᵢ
            x.axpy((r - mu[i]) * s, &prep.points[i])?;
            mu[i] = r;
        }

        if iter % 50 == 0 || iter == cap {
            let g = prep.dual_bound(signs, &mu)?;
            if g < eps - cfg.slack {
                return Ok(SubsetResult::Infeasible {
                    best_margin: best,
                    dual_bound: g,
                    multipliers: normalized(&mu),
                });
            }
        }
    }
    Ok(SubsetResult::Undecided {
        best_margin: best,
        iterations: cap,
    })
}

fn normalized(mu: &[f64]) -> Vec<f64> {
    let s: f64 = mu.iter().sum();
    if s > 0.0 {
        mu.iter().map(|m| m / s).collect()
    } else {
        mu.to_vec()
    }
}

struct BarrierState {
    c: Vec<f64>,
    t: f64,
}

/// Max-margin log-barrier method:
/// maximize `t` subject to `marginᵢ(E) ≥ t` and the class's LMIs.
fn barrier(prep: &Prepared<'_>, signs: &[f64], cfg: &FeasibilityConfig) -> Result<SubsetResult> {
    let blocks = lmi_blocks(prep.class).ok_or_else(|| Error::UnsupportedClass(prep.class.name()))?;
    let n = signs.len();
    let m = prep.basis.len();
    let d = prep.dim;
    let eps = prep.epsilon;
    let nu = (n + blocks.len() * d) as f64;

    let mut z = BarrierState {
        c: vec![0.0; m],
        t: 0.0,
    };
    let a0 = prep.margins_at(&z.c, signs);
    z.t = min_of(&a0) - 1.0;
    let mut best = min_of(&a0);
    let mut tau = 1.0;
    let mut newton_steps = 0usize;

    let phi = |c: &[f64], t: f64, tau: f64| -> Result<Option<f64>> {
        let a = prep.margins_at(c, signs);
        let mut v = -tau * t;
        for ai in &a {
            let s = ai - t;
            if !(s > 0.0) {
                return Ok(None);
            }
            v -= s.ln();
        }
        let lam = prep.effect_at(c).eig()?.eigenvalues;
        for &(sigma, off) in blocks {
            for &l in &lam {
                let b = off + sigma * l;
                if !(b > 0.0) {
                    return Ok(None);
                }
                v -= b.ln();
            }
        }
        Ok(Some(v))
    };

    loop {
        // centering
        for _ in 0..100 {
            let a = prep.margins_at(&z.c, signs);
            let cur = min_of(&a);
            best = best.max(cur);
            if cur >= eps - cfg.slack {
                let effect = prep.effect_at(&z.c);
                let margins = prep.margins_of(&effect, signs)?;
                if min_of(&margins) >= eps - cfg.slack {
                    return Ok(SubsetResult::Feasible { effect, margins });
                }
            }
            let (grad, hess) = newton_system(prep, signs, blocks, &z, &a, tau)?;
            let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
            let step = regularized_solve(&hess, &rhs);
            let dec: f64 = -grad.iter().zip(&step).map(|(g, s)| g * s).sum::<f64>();
            newton_steps += 1;
            if !(dec > 1e-12) {
                break;
            }
            let f0 = phi(&z.c, z.t, tau)?.expect("iterate stays strictly feasible");
            let mut s = 1.0;
            let mut moved = false;
            while s > 1e-20 {
                let c1: Vec<f64> = z.c.iter().zip(&step).map(|(c, dc)| c + s * dc).collect();
                let t1 = z.t + s * step[m];
                if let Some(f1) = phi(&c1, t1, tau)? {
                    if f1 <= f0 - 0.25 * s * dec {
                        z.c = c1;
                        z.t = t1;
                        moved = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            if !moved || dec < 2e-10 {
                break;
            }
        }

        // dual certificate from the central-path multipliers
        let a = prep.margins_at(&z.c, signs);
        let mu: Vec<f64> = a.iter().map(|ai| 1.0 / (ai - z.t)).collect();
        let g = prep.dual_bound(signs, &mu)?;
        if g < eps - cfg.slack {
            return Ok(SubsetResult::Infeasible {
                best_margin: best,
                dual_bound: g,
                multipliers: normalized(&mu),
            });
        }
        if nu / tau <= 1e-11 {
            break;
        }
        tau *= 10.0;
    }
    Ok(SubsetResult::Undecided {
        best_margin: best,
        iterations: newton_steps,
    })
}

/// Gradient and Hessian of `−τt − Σ log(aᵢ − t) − Σ log det(blocks)` in
/// the variables `(c, t)`.
fn newton_system(
    prep: &Prepared<'_>,
    signs: &[f64],
    blocks: &[(f64, f64)],
    z: &BarrierState,
    a: &[f64],
    tau: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = prep.basis.len();
    let d = prep.dim;
    let dim = m + 1;
    let mut grad = vec![0.0; dim];
    let mut hess = vec![0.0; dim * dim];

    grad[m] = -tau;
    for (i, ai) in a.iter().enumerate() {
        let u = 1.0 / (ai - z.t);
        let g: Vec<f64> = prep.coords[i].iter().map(|x| signs[i] * x).collect();
        for j in 0..m {
            grad[j] -= u * g[j];
            for l in j..m {
                hess[j * dim + l] += u * u * g[j] * g[l];
            }
            hess[j * dim + m] -= u * u * g[j];
        }
        grad[m] += u;
        hess[m * dim + m] += u * u;
    }

    let spec = prep.effect_at(&z.c).eig()?;
    let v: &ComplexMatrix = &spec.eigenvectors;
    // B̃_j = V† B_j V
    let rotated: Vec<Vec<C64>> = prep
        .basis
        .iter()
        .map(|b| {
            let mut out = vec![C64::new(0.0, 0.0); d * d];
            for &(p, q, val) in b {
                for x in 0..d {
                    let left = v.get(p, x).conj() * val;
                    for y in 0..d {
                        out[x * d + y] += left * v.get(q, y);
                    }
                }
            }
            out
        })
        .collect();
    let inv: Vec<Vec<f64>> = blocks
        .iter()
        .map(|&(sigma, off)| {
            spec.eigenvalues
                .iter()
                .map(|&l| 1.0 / (off + sigma * l))
                .collect()
        })
        .collect();
    let mut w = vec![0.0; d * d];
    for iv in &inv {
        for x in 0..d {
            for y in 0..d {
                w[x * d + y] += iv[x] * iv[y];
            }
        }
    }
    for j in 0..m {
        let bj = &rotated[j];
        for (&(sigma, _), iv) in blocks.iter().zip(&inv) {
            let tr: f64 = (0..d).map(|x| bj[x * d + x].re * iv[x]).sum();
            grad[j] -= sigma * tr;
        }
        for l in j..m {
            let bl = &rotated[l];
            let h: f64 = (0..d * d)
                .map(|k| w[k] * (bj[k] * bl[k].conj()).re)
                .sum();
            hess[j * dim + l] += h;
        }
    }
    for j in 0..dim {
        for l in 0..j {
            hess[j * dim + l] = hess[l * dim + j];
        }
    }
    Ok((grad, hess))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::State;

    fn prep_for<'a>(
        class: HypothesisClass,
        pts: &'a [HermitianMatrix],
        alpha: &'a [f64],
        eps: f64,
    ) -> Prepared<'a> {
        Prepared::new(class, pts, alpha, eps).unwrap()
    }

    #[test]
    fn basis_is_orthonormal() {
        for (class, d, expect) in [
            (HypothesisClass::EffectSpace, 3, 9),
            (HypothesisClass::StateSpace, 3, 8),
            (HypothesisClass::RankK { k: 2 }, 4, 15),
        ] {
            let b = hull_basis(class, d);
            assert_eq!(b.len(), expect);
            let dense: Vec<HermitianMatrix> = b
                .iter()
                .map(|e| {
                    let mut data = vec![C64::new(0.0, 0.0); d * d];
                    for &(p, q, v) in e {
                        data[p * d + q] += v;
                    }
                    HermitianMatrix::new(d, data).unwrap()
                })
                .collect();
            for i in 0..dense.len() {
                for j in 0..dense.len() {
                    let ip = hs_inner(&dense[i], &dense[j]).unwrap();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - want).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn barrier_reaches_tight_qubit_margin() {
        // three Pauli eigenstates; the best margin is 1/(2√3) for every sign pattern
        let pts: Vec<HermitianMatrix> = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
            .iter()
            .map(|r| {
                let rho = crate::bloch::bloch_to_state(&crate::BlochVector::new(2, r.to_vec()).unwrap())
                    .unwrap();
                rho.matrix
            })
            .collect();
        let alpha = [0.5; 3];
        let eps = 1.0 / (2.0 * 3f64.sqrt());
        let cfg = FeasibilityConfig {
            method: FeasibilityMethod::InteriorPoint,
            ..FeasibilityConfig::default()
        };
        let p = prep_for(HypothesisClass::EffectSpace, &pts, &alpha, eps - 1e-6);
        let r = solve_subset(&p, &[1.0, -1.0, 1.0], &cfg).unwrap();
        assert!(matches!(r, SubsetResult::Feasible { .. }), "{r:?}");
        let p = prep_for(HypothesisClass::EffectSpace, &pts, &alpha, eps + 1e-6);
        let r = solve_subset(&p, &[1.0, -1.0, 1.0], &cfg).unwrap();
        assert!(matches!(r, SubsetResult::Infeasible { .. }), "{r:?}");
    }

    #[test]
    fn duplicates_are_infeasible_by_either_method() {
        let rho = State::basis(2, 0).into_matrix();
        let pts = vec![rho.clone(), rho];
        let alpha = [0.5, 0.5];
        let p = prep_for(HypothesisClass::EffectSpace, &pts, &alpha, 0.1);
        for method in [
            FeasibilityMethod::AlternatingProjections,
            FeasibilityMethod::InteriorPoint,
        ] {
            let cfg = FeasibilityConfig {
                method,
                ..FeasibilityConfig::default()
            };
            let r = solve_subset(&p, &[1.0, -1.0], &cfg).unwrap();
            match r {
                SubsetResult::Infeasible { dual_bound, .. } => assert!(dual_bound < 0.1),
                other => panic!("{method:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn s1_class_uses_projections() {
        let pts = vec![HermitianMatrix::from_real_diagonal(&[1.0, 0.0])];
        let alpha = [0.0];
        let p = prep_for(HypothesisClass::SymmetrizedS1, &pts, &alpha, 0.9);
        let r = solve_subset(&p, &[-1.0], &FeasibilityConfig::default()).unwrap();
        assert!(matches!(r, SubsetResult::Feasible { .. }));
    }
}
