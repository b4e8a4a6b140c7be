//! Empirical covering numbers under `L_p(μₙ)` on a fixed point set.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::HypothesisClass;
use crate::ensembles::{
    dirichlet_ones, ginibre_mixed_state, haar_pure_state, random_effect, EffectMode, RngSeed,
};
use crate::error::{Error, Result};
use crate::matrix::hs_inner;
use crate::HermitianMatrix;

/// `‖f − g‖_{L_p(μₙ)} = ((1/n) Σ |f(xᵢ) − g(xᵢ)|^p)^{1/p}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpMetric {
    L1,
    L2,
}

impl LpMetric {
    pub fn from_p(p: u32) -> Result<Self> {
        match p {
            1 => Ok(LpMetric::L1),
            2 => Ok(LpMetric::L2),
            _ => Err(Error::InvalidParameter(format!("p = {p}, expected 1 or 2"))),
        }
    }

    pub fn distance(&self, f: &[f64], g: &[f64]) -> f64 {
        let n = f.len() as f64;
        match self {
            LpMetric::L1 => f.iter().zip(g).map(|(a, b)| (a - b).abs()).sum::<f64>() / n,
            LpMetric::L2 => (f.iter().zip(g).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n)
                .sqrt(),
        }
    }
}

/// Where the class members come from.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoveringSource {
    /// `sample_size` random members of a convex class.
    Class {
        class: HypothesisClass,
        sample_size: usize,
    },
    /// An explicit finite class.
    Members { members: Vec<HermitianMatrix> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringEstimate {
    /// Size of a greedy ε-cover of the members.
    pub upper: usize,
    /// Size of a greedy 2ε-packing of the members.
    pub lower: usize,
    pub members: usize,
    pub epsilon: f64,
    pub metric: LpMetric,
}

impl CoveringEstimate {
    pub fn log_upper(&self) -> f64 {
        (self.upper as f64).ln()
    }
}

fn sample_member<R: Rng + ?Sized>(
    class: HypothesisClass,
    d: usize,
    index: usize,
    rng: &mut R,
) -> Result<HermitianMatrix> {
    Ok(match class {
        HypothesisClass::EffectSpace => {
            let mode = match index % 3 {
                0 => EffectMode::EigenClip,
                1 => EffectMode::RankMixture,
                _ => EffectMode::HaarProjector(rng.gen_range(0..=d)),
            };
            random_effect(d, mode, rng)?.into_matrix()
        }
        HypothesisClass::StateSpace => {
            if index % 2 == 0 {
                haar_pure_state(d, rng)?.into_matrix()
            } else {
                ginibre_mixed_state(d, rng.gen_range(1..=d), rng)?.into_matrix()
            }
        }
        HypothesisClass::RankK { k } => {
            let w = dirichlet_ones(3, rng);
            let mut acc = HermitianMatrix::zeros(d);
            for wj in w {
                acc.axpy(wj, random_effect(d, EffectMode::HaarProjector(k), rng)?.matrix())?;
            }
            acc
        }
        HypothesisClass::SymmetrizedSInf => {
            let e = random_effect(d, EffectMode::RankMixture, rng)?.into_matrix();
            e.scale(2.0).add_scaled(-1.0, &HermitianMatrix::identity(d))?
        }
        HypothesisClass::SymmetrizedS1 => {
            let t: f64 = rng.gen();
            let a = haar_pure_state(d, rng)?.into_matrix();
            let b = haar_pure_state(d, rng)?.into_matrix();
            a.scale(t).add_scaled(t - 1.0, &b)?
        }
    })
}

/// Greedy estimates of the ε-covering number of a class restricted to
/// `points`, from a finite set of members.
///
/// `upper` is the size of a greedy cover whose centres are members (plus,
/// for a convex class, the midpoint of the two farthest-apart members); it
/// is an upper bound on the covering number of the members. `lower` is a
/// greedy 2ε-packing, a lower bound on the covering number of the class.
pub fn covering_estimate(
    source: &CoveringSource,
    points: &[HermitianMatrix],
    epsilon: f64,
    metric: LpMetric,
    seed: RngSeed,
) -> Result<CoveringEstimate> {
    let d = points.first().ok_or(Error::EmptyData)?.dim();
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon}")));
    }
    let (members, convex) = match source {
        CoveringSource::Class { class, sample_size } => {
            class.validate(d)?;
            if *sample_size == 0 {
                return Err(Error::InvalidParameter("sample size 0".into()));
            }
            let mut rng = seed.rng();
            let m = (0..*sample_size)
                .map(|i| sample_member(*class, d, i, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            (m, true)
        }
        CoveringSource::Members { members } => {
            if members.is_empty() {
                return Err(Error::EmptyData);
            }
            (members.clone(), false)
        }
    };
    let values: Vec<Vec<f64>> = members
        .iter()
        .map(|e| points.iter().map(|x| hs_inner(e, x)).collect())
        .collect::<Result<_>>()?;
    let m = values.len();
    let mut dist = vec![0.0; m * m];
    for i in 0..m {
        for j in (i + 1)..m {
            let v = metric.distance(&values[i], &values[j]);
            dist[i * m + j] = v;
            dist[j * m + i] = v;
        }
    }

    let mut covered = vec![false; m];
    let mut upper = 0;
    if convex {
        let (mut a, mut b, mut far) = (0, 0, -1.0);
        for i in 0..m {
            for j in (i + 1)..m {
                if dist[i * m + j] > far {
                    (a, b, far) = (i, j, dist[i * m + j]);
                }
            }
        }
        let mid: Vec<f64> = values[a]
            .iter()
            .zip(&values[b])
            .map(|(x, y)| 0.5 * (x + y))
            .collect();
        let mut any = false;
        for (c, f) in covered.iter_mut().zip(&values) {
            if metric.distance(&mid, f) <= epsilon {
                *c = true;
                any = true;
            }
        }
        if any {
            upper += 1;
        }
    }
    loop {
        let mut best = None;
        let mut best_gain = 0;
        for i in 0..m {
            let gain = (0..m)
                .filter(|&j| !covered[j] && dist[i * m + j] <= epsilon)
                .count();
            if gain > best_gain {
                best_gain = gain;
                best = Some(i);
            }
        }
        let Some(c) = best else { break };
        for j in 0..m {
            if dist[c * m + j] <= epsilon {
                covered[j] = true;
            }
        }
        upper += 1;
    }

    let mut packing: Vec<usize> = Vec::new();
    for i in 0..m {
        if packing.iter().all(|&j| dist[i * m + j] > 2.0 * epsilon) {
            packing.push(i);
        }
    }
    Ok(CoveringEstimate {
        upper,
        lower: packing.len(),
        members: m,
        epsilon,
        metric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::State;

    #[test]
    fn two_constant_functions_need_two_balls() {
        let pts: Vec<HermitianMatrix> = (0..3).map(|k| State::basis(3, k).into_matrix()).collect();
        let src = CoveringSource::Members {
            members: vec![HermitianMatrix::zeros(3), HermitianMatrix::identity(3)],
        };
        let c = covering_estimate(&src, &pts, 0.4, LpMetric::L1, RngSeed::new(0)).unwrap();
        assert_eq!((c.upper, c.lower), (2, 2));
    }

    #[test]
    fn half_diameter_gives_one_ball_on_a_single_point() {
        let pts = vec![State::basis(2, 0).into_matrix()];
        let src = CoveringSource::Class {
            class: HypothesisClass::EffectSpace,
            sample_size: 200,
        };
        // one point: functions are scalars in [0, 1]
        let c = covering_estimate(&src, &pts, 0.5, LpMetric::L2, RngSeed::new(4)).unwrap();
        assert_eq!(c.upper, 1);
    }

    #[test]
    fn packing_never_exceeds_cover() {
        let mut rng = RngSeed::new(2).rng();
        let pts: Vec<HermitianMatrix> = (0..6)
            .map(|_| haar_pure_state(2, &mut rng).unwrap().into_matrix())
            .collect();
        let src = CoveringSource::Class {
            class: HypothesisClass::EffectSpace,
            sample_size: 300,
        };
        for eps in [0.05, 0.1, 0.2] {
            let c = covering_estimate(&src, &pts, eps, LpMetric::L1, RngSeed::new(5)).unwrap();
            assert!(c.lower <= c.upper, "{c:?}");
        }
    }
}
