//! Empirical generalization gap `|L − L̂|` as a function of sample size.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{empirical_risk, erm_effect, LearnerConfig};
use crate::ensembles::{make_training_set, LabelRegime, RngSeed, StateEnsemble};
use crate::error::{Error, Result};
use crate::wire::{format_g17, CsvTable};
use crate::HermitianMatrix;

/// What to sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveSpec {
    pub target: HermitianMatrix,
    pub ensemble: StateEnsemble,
    pub regime: LabelRegime,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    /// Size of the fresh sample used to estimate the true risk `L`.
    pub holdout: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n: usize,
    pub gap_mean: f64,
    pub gap_stderr: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralizationCurve {
    pub rows: Vec<CurveRow>,
    /// Per-trial gaps for each grid point, in trial order.
    pub gaps: Vec<Vec<f64>>,
}

impl GeneralizationCurve {
    pub fn to_csv(&self) -> String {
        let mut t = CsvTable::new(&["n", "gap_mean", "gap_stderr", "trials", "seed"]);
        for r in &self.rows {
            t.push_row([
                r.n.to_string(),
                format_g17(r.gap_mean),
                format_g17(r.gap_stderr),
                r.trials.to_string(),
                r.seed.to_string(),
            ]);
        }
        t.into_string()
    }

    /// `gap(n_small) / gap(n_large)`, the decay factor between two grid points.
    pub fn decay_ratio(&self, n_small: usize, n_large: usize) -> Option<f64> {
        let a = self.rows.iter().find(|r| r.n == n_small)?;
        let b = self.rows.iter().find(|r| r.n == n_large)?;
        Some(a.gap_mean / b.gap_mean)
    }

    /// Whether the mean gap never increases along the grid.
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].gap_mean <= w[0].gap_mean)
    }
}

pub(crate) fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// For each `n`, fits [`erm_effect`] on `trials` independent training sets
/// and measures `|L − L̂|`, with `L` estimated on a fresh labelled sample.
pub fn generalization_curve(spec: &CurveSpec, cfg: &LearnerConfig) -> Result<GeneralizationCurve> {
    if spec.trials == 0 || spec.holdout == 0 || spec.n_grid.is_empty() {
        return Err(Error::InvalidParameter(
            "trials, holdout and n grid must be nonempty".into(),
        ));
    }
    let d = spec.target.dim();
    let root = RngSeed::new(spec.seed);
    let mut rows = Vec::with_capacity(spec.n_grid.len());
    let mut all = Vec::with_capacity(spec.n_grid.len());
    for (gi, &n) in spec.n_grid.iter().enumerate() {
        if n == 0 {
            return Err(Error::InvalidParameter("sample size 0".into()));
        }
        let grid_seed = root.child(gi as u64);
        let gaps: Vec<f64> = (0..spec.trials)
            .into_par_iter()
            .map(|t| -> Result<f64> {
                let s = grid_seed.child(t as u64);
                let mut rng = s.child(0).rng();
                let train_in = spec.ensemble.sample(d, n, &mut rng)?;
                let train = make_training_set(
                    &spec.target,
                    train_in.into_iter().map(|x| x.into_matrix()).collect(),
                    spec.regime,
                    s.child(1),
                )?;
                let test_in = spec.ensemble.sample(d, spec.holdout, &mut rng)?;
                let test = make_training_set(
                    &spec.target,
                    test_in.into_iter().map(|x| x.into_matrix()).collect(),
                    spec.regime,
                    s.child(2),
                )?;
                let fit = erm_effect(&train, cfg)?;
                let l = empirical_risk(&fit.estimate, &test, cfg.loss)?;
                Ok((l - fit.empirical_risk).abs())
            })
            .collect::<Result<_>>()?;
        let (mean, se) = mean_stderr(&gaps);
        rows.push(CurveRow {
            n,
            gap_mean: mean,
            gap_stderr: se,
            trials: spec.trials,
            seed: spec.seed,
        });
        all.push(gaps);
    }
    Ok(GeneralizationCurve { rows, gaps: all })
}
