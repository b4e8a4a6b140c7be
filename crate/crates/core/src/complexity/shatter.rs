//! Fat-shattering: certificates, the Mendelson–Schechtman necessary
//! condition, lower-bound search and the closed-form upper bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::feasibility::{solve_subset, FeasibilityConfig, Prepared, SubsetResult};
use super::HypothesisClass;
use crate::bloch::bloch_to_state;
use crate::ensembles::{dirichlet_ones, haar_pure_state, orthonormal_state_family, RngSeed};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::matrix::hs_inner;
use crate::scalar::tolerance;
use crate::{BlochVector, HermitianMatrix, State};

/// Largest point set handled by exhaustive subset enumeration.
pub const MAX_SHATTER_POINTS: usize = 16;

/// Witness levels `αᵢ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witnesses {
    /// The same level for every point (level fat-shattering).
    Level(f64),
    PerPoint(Vec<f64>),
}

impl Witnesses {
    fn resolve(&self, n: usize) -> Result<Vec<f64>> {
        let v = match self {
            Witnesses::Level(a) => vec![*a; n],
            Witnesses::PerPoint(v) => {
                if v.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: v.len(),
                    });
                }
                v.clone()
            }
        };
        if let Some(a) = v.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter(format!("witness {a}")));
        }
        Ok(v)
    }
}

/// One feasible member of the class for every subset of the points.
///
/// `subset_effects[mask]` realizes the subset whose members are the set
/// bits of `mask`: `⟨E, xᵢ⟩ ≥ αᵢ + ε` when bit `i` is set and
/// `⟨E, xᵢ⟩ ≤ αᵢ − ε` otherwise.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShatteringCertificate {
    pub epsilon: f64,
    pub class: HypothesisClass,
    pub points: Vec<HermitianMatrix>,
    pub witnesses: Vec<f64>,
    pub subset_effects: Vec<HermitianMatrix>,
    /// `margins[mask][i] = sᵢ(⟨E_mask, xᵢ⟩ − αᵢ)`.
    pub margins: Vec<Vec<f64>>,
    pub min_margin: f64,
}

impl ShatteringCertificate {
    /// Recomputes every margin from the stored matrices and checks class
    /// membership within `tol`. Returns the smallest margin found.
    pub fn verify(&self, tol: f64) -> Result<f64> {
        let n = self.points.len();
        if self.subset_effects.len() != 1usize << n {
            return Err(Error::InvalidParameter(format!(
                "{} subset effects for {n} points",
                self.subset_effects.len()
            )));
        }
        let mut worst = f64::INFINITY;
        for (mask, e) in self.subset_effects.iter().enumerate() {
            if !self.class.contains(e, tol)? {
                return Err(Error::InvalidParameter(format!(
                    "subset {mask} effect lies outside class {}",
                    self.class
                )));
            }
            for (i, x) in self.points.iter().enumerate() {
                let s = if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
                worst = worst.min(s * (hs_inner(e, x)? - self.witnesses[i]));
            }
        }
        Ok(worst)
    }

    pub fn to_json(&self) -> Result<String> {
        crate::wire::to_json(self)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ShatteringOutcome {
    Certified(ShatteringCertificate),
    /// Weak duality rules this subset out: no member of the class reaches
    /// a margin above `dual_bound < ε`.
    Infeasible {
        subset: Vec<usize>,
        mask: u64,
        best_margin: f64,
        dual_bound: f64,
        multipliers: Vec<f64>,
    },
    /// Neither a feasible member nor a dual certificate was found.
    Undecided {
        subset: Vec<usize>,
        mask: u64,
        best_margin: f64,
        iterations: usize,
    },
}

impl ShatteringOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, ShatteringOutcome::Certified(_))
    }

    pub fn certificate(&self) -> Option<&ShatteringCertificate> {
        match self {
            ShatteringOutcome::Certified(c) => Some(c),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        crate::wire::to_json(self)
    }
}

fn check_point_set(points: &[HermitianMatrix]) -> Result<usize> {
    let d = points.first().ok_or(Error::EmptyData)?.dim();
    for x in points {
        if x.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: x.dim(),
            });
        }
    }
    Ok(d)
}

fn mask_subset(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// Decides whether `class` ε-shatters `points` with the given witnesses by
/// solving one convex feasibility problem per subset.
pub fn certify_shattering(
    points: &[HermitianMatrix],
    epsilon: f64,
    witnesses: &Witnesses,
    class: HypothesisClass,
    cfg: &FeasibilityConfig,
) -> Result<ShatteringOutcome> {
    let d = check_point_set(points)?;
    class.validate(d)?;
    cfg.validate()?;
    let n = points.len();
    if n > MAX_SHATTER_POINTS {
        return Err(Error::TooManyPoints {
            count: n,
            cap: MAX_SHATTER_POINTS,
        });
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon}")));
    }
    let alpha = witnesses.resolve(n)?;
    let prep = Prepared::new(class, points, &alpha, epsilon)?;
    let results: Vec<SubsetResult> = (0..1u64 << n)
        .into_par_iter()
        .map(|mask| {
            let signs: Vec<f64> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            solve_subset(&prep, &signs, cfg)
        })
        .collect::<Result<_>>()?;

    let mut undecided = None;
    for (mask, r) in results.iter().enumerate() {
        match r {
            SubsetResult::Infeasible {
                best_margin,
                dual_bound,
                multipliers,
            } => {
                return Ok(ShatteringOutcome::Infeasible {
                    subset: mask_subset(mask as u64, n),
                    mask: mask as u64,
                    best_margin: *best_margin,
                    dual_bound: *dual_bound,
                    multipliers: multipliers.clone(),
                })
            }
            SubsetResult::Undecided {
                best_margin,
                iterations,
            } if undecided.is_none() => {
                undecided = Some(ShatteringOutcome::Undecided {
                    subset: mask_subset(mask as u64, n),
                    mask: mask as u64,
                    best_margin: *best_margin,
                    iterations: *iterations,
                });
            }
            _ => {}
        }
    }
    if let Some(u) = undecided {
        return Ok(u);
    }
    let mut subset_effects = Vec::with_capacity(results.len());
    let mut margins = Vec::with_capacity(results.len());
    for r in results {
        if let SubsetResult::Feasible { effect, margins: m } = r {
            subset_effects.push(effect);
            margins.push(m);
        }
    }
    let min_margin = margins
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(ShatteringOutcome::Certified(ShatteringCertificate {
        epsilon,
        class,
        points: points.to_vec(),
        witnesses: alpha,
        subset_effects,
        margins,
        min_margin,
    }))
}

/// Result of [`separability_check`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparabilityReport {
    pub separable: bool,
    /// Full width of the probability strip.
    pub width: f64,
    pub outcome: ShatteringOutcome,
}

/// Whether every subset of the states can be split from its complement by
/// an effect whose outcome probabilities leave a strip of the given width
/// around `1/2`. Runs [`certify_shattering`] at `width / 2` with level `1/2`
/// over all effects.
pub fn separability_check(
    points: &[HermitianMatrix],
    width: f64,
    cfg: &FeasibilityConfig,
) -> Result<SeparabilityReport> {
    for (index, x) in points.iter().enumerate() {
        if State::new(x.clone()).is_err() {
            return Err(Error::InvalidInput {
                index,
                expected: "state",
            });
        }
    }
    let outcome = certify_shattering(
        points,
        width / 2.0,
        &Witnesses::Level(0.5),
        HypothesisClass::EffectSpace,
        cfg,
    )?;
    Ok(SeparabilityReport {
        separable: outcome.is_certified(),
        width,
        outcome,
    })
}

/// Outcome of [`mendelson_criterion`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MendelsonVerdict {
    /// No violation found. This is a necessary condition only.
    ConsistentWithShattering {
        /// Smallest `‖Σ aᵢxᵢ‖₁ / Σ|aᵢ|` seen.
        min_ratio: f64,
        vectors_checked: usize,
    },
    /// `ε Σ|aᵢ| > ‖Σ aᵢxᵢ‖₁` for the returned coefficients.
    Refuted {
        coefficients: Vec<f64>,
        lhs: f64,
        rhs: f64,
    },
}

fn trace_norm_of_combination(points: &[HermitianMatrix], a: &[f64]) -> Result<f64> {
    let mut m = HermitianMatrix::zeros(points[0].dim());
    for (x, &c) in points.iter().zip(a) {
        if c != 0.0 {
            m.axpy(c, x)?;
        }
    }
    Ok(m.eig()?.eigenvalues.iter().map(|l| l.abs()).sum())
}

/// Tests the necessary condition for ε-shattering by the dual unit ball:
/// linear independence and `ε Σ|aᵢ| ≤ ‖Σ aᵢxᵢ‖₁`, over every sign vector
/// (for `n ≤ 16`) and `probes` random Dirichlet-weighted signed vectors.
pub fn mendelson_criterion(
    points: &[HermitianMatrix],
    epsilon: f64,
    probes: usize,
    seed: RngSeed,
) -> Result<MendelsonVerdict> {
    check_point_set(points)?;
    let n = points.len();
    for (index, x) in points.iter().enumerate() {
        let norm: f64 = x.eig()?.eigenvalues.iter().map(|l| l.abs()).sum();
        if norm > 1.0 + tolerance::MARGIN_SLACK {
            return Err(Error::NormViolation { index, norm });
        }
    }
    let refute = |a: Vec<f64>| -> Result<Option<MendelsonVerdict>> {
        let l1: f64 = a.iter().map(|x| x.abs()).sum();
        let rhs = trace_norm_of_combination(points, &a)?;
        let lhs = epsilon * l1;
        Ok((lhs > rhs).then_some(MendelsonVerdict::Refuted {
            coefficients: a,
            lhs,
            rhs,
        }))
    };

    // linear dependence shows up as a null vector of the Gram matrix
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let g = hs_inner(&points[i], &points[j])?;
            gram[i * n + j] = g;
            gram[j * n + i] = g;
        }
    }
    let (vals, vecs) = symmetric_eigen(&gram, n);
    let top = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if vals[0] <= 1e-10 * top.max(1e-300) {
        let a: Vec<f64> = (0..n).map(|r| vecs[r * n]).collect();
        let l1: f64 = a.iter().map(|x| x.abs()).sum();
        let a: Vec<f64> = a.into_iter().map(|x| x / l1).collect();
        if let Some(v) = refute(a)? {
            return Ok(v);
        }
    }

    let mut min_ratio = f64::INFINITY;
    let mut checked = 0usize;
    if n <= MAX_SHATTER_POINTS {
        for mask in 0..1u64 << n {
            let a: Vec<f64> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            let rhs = trace_norm_of_combination(points, &a)?;
            min_ratio = min_ratio.min(rhs / n as f64);
            checked += 1;
            if let Some(v) = refute(a)? {
                return Ok(v);
            }
        }
    }
    let mut rng = seed.rng();
    for _ in 0..probes {
        let w = dirichlet_ones(n, &mut rng);
        let a: Vec<f64> = w
            .into_iter()
            .map(|x| if rand::Rng::gen::<bool>(&mut rng) { x } else { -x })
            .collect();
        let rhs = trace_norm_of_combination(points, &a)?;
        let l1: f64 = a.iter().map(|x| x.abs()).sum();
        min_ratio = min_ratio.min(rhs / l1);
        checked += 1;
        if let Some(v) = refute(a)? {
            return Ok(v);
        }
    }
    Ok(MendelsonVerdict::ConsistentWithShattering {
        min_ratio,
        vectors_checked: checked,
    })
}

/// Candidate point sets tried by [`fat_lower_bound_search`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchStrategy {
    /// The first `n` computational-basis projectors (`n ≤ d`).
    Orthonormal,
    /// Pure qubit states along orthogonal Bloch axes (`d = 2`, `n ≤ 3`).
    Mub2,
    /// Haar-random pure states, several independent draws.
    Random { attempts: usize },
}

impl SearchStrategy {
    pub fn all() -> Vec<SearchStrategy> {
        vec![
            SearchStrategy::Orthonormal,
            SearchStrategy::Mub2,
            SearchStrategy::Random { attempts: 4 },
        ]
    }

    fn candidates(&self, d: usize, n: usize, seed: RngSeed) -> Result<Vec<Vec<HermitianMatrix>>> {
        Ok(match *self {
            SearchStrategy::Orthonormal if n <= d => vec![orthonormal_state_family(d)?
                .into_iter()
                .take(n)
                .map(State::into_matrix)
                .collect()],
            SearchStrategy::Mub2 if d == 2 && n <= 3 => {
                let axes = [[0.0, 0.0, -1.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
                vec![axes[..n]
                    .iter()
                    .map(|r| Ok(bloch_to_state(&BlochVector::new(2, r.to_vec())?)?.matrix))
                    .collect::<Result<_>>()?]
            }
            SearchStrategy::Random { attempts } => (0..attempts)
                .map(|a| {
                    let mut rng = seed.child(a as u64).rng();
                    (0..n)
                        .map(|_| haar_pure_state(d, &mut rng).map(State::into_matrix))
                        .collect()
                })
                .collect::<Result<_>>()?,
            _ => Vec::new(),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FatSearchResult {
    /// Largest size certified (0 when nothing was).
    pub best_n: usize,
    pub strategy: Option<SearchStrategy>,
    pub certificate: Option<ShatteringCertificate>,
}

/// Searches for a large ε-shattered set: for `n = 1, 2, …, n_target` tries
/// each strategy in turn and stops at the first size none certifies.
/// Witnesses are the values of the class's centre at each point.
pub fn fat_lower_bound_search(
    d: usize,
    epsilon: f64,
    class: HypothesisClass,
    n_target: usize,
    strategies: &[SearchStrategy],
    seed: RngSeed,
    cfg: &FeasibilityConfig,
) -> Result<FatSearchResult> {
    class.validate(d)?;
    if n_target > MAX_SHATTER_POINTS {
        return Err(Error::TooManyPoints {
            count: n_target,
            cap: MAX_SHATTER_POINTS,
        });
    }
    let center = class.center(d);
    let mut best = FatSearchResult {
        best_n: 0,
        strategy: None,
        certificate: None,
    };
    for n in 1..=n_target {
        let mut found = None;
        'strategies: for (si, strat) in strategies.iter().enumerate() {
            let s = seed.child(n as u64).child(si as u64);
            for pts in strat.candidates(d, n, s)? {
                let alpha = pts
                    .iter()
                    .map(|x| hs_inner(&center, x))
                    .collect::<Result<Vec<_>>>()?;
                let out =
                    certify_shattering(&pts, epsilon, &Witnesses::PerPoint(alpha), class, cfg)?;
                if let ShatteringOutcome::Certified(c) = out {
                    found = Some((*strat, c));
                    break 'strategies;
                }
            }
        }
        match found {
            Some((strat, cert)) => {
                best = FatSearchResult {
                    best_n: n,
                    strategy: Some(strat),
                    certificate: Some(cert),
                }
            }
            None => break,
        }
    }
    Ok(best)
}

/// Closed-form upper bound on the fat-shattering dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FatUpperBound {
    pub raw: f64,
    /// `⌊raw⌋`, with a little room for rounding.
    pub dimension: usize,
    /// The pseudo-dimension cap that applies.
    pub cap: usize,
    /// The active term carries an unspecified constant, reported as 1.
    pub order_only: bool,
    pub formula: String,
}

/// `min(d/ε², d²)` for effect-like classes, `min(ln d/ε², d² − 1)` for the
/// state class, and `k(d−1)(d−k)/(dε)²` (exact) for rank-`k` mixtures.
pub fn fat_upper_bound(d: usize, epsilon: f64, class: HypothesisClass) -> Result<FatUpperBound> {
    class.validate(d)?;
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} outside (0, 1/2)"
        )));
    }
    let df = d as f64;
    let e2 = epsilon * epsilon;
    let (asym, cap, exact, formula) = match class {
        HypothesisClass::EffectSpace | HypothesisClass::SymmetrizedSInf => {
            (df / e2, d * d, false, "min(d/eps^2, d^2)")
        }
        HypothesisClass::StateSpace => (df.ln() / e2, d * d - 1, false, "min(ln d/eps^2, d^2-1)"),
        HypothesisClass::SymmetrizedS1 => (df.ln() / e2, d * d, false, "min(ln d/eps^2, d^2)"),
        HypothesisClass::RankK { k } => {
            let cap = if k == 0 || k == d { 0 } else { d * d - 1 };
            let kf = k as f64;
            let v = kf * (df - 1.0) * (df - kf) / (df * df * e2);
            (v, cap, true, "k(d-1)(d-k)/(d eps)^2")
        }
    };
    let (raw, order_only) = if asym < cap as f64 {
        (asym, !exact)
    } else {
        (cap as f64, false)
    };
    Ok(FatUpperBound {
        raw,
        dimension: (raw + 1e-9).floor() as usize,
        cap,
        order_only,
        formula: formula.into(),
    })
}
