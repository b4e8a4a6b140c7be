//! One function per subcommand. Each returns the result payload, a short
//! summary for the manifest, and the exit code.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qlearn::bloch::bloch_to_state;
use qlearn::complexity::{
    certify_shattering, covering_estimate, khintchine_ratio, rademacher_complexity,
    sample_complexity_quote, CoveringSource, FeasibilityConfig, FeasibilityMethod,
    HypothesisClass, LpMetric, QuoteFormula, ShatteringOutcome, Witnesses,
};
use qlearn::ensembles::{
    haar_pure_state, make_training_set, random_effect, EffectMode, LabelRegime, RngSeed,
    StateEnsemble,
};
use qlearn::learners::{erm_effect, erm_state, LearnerConfig, Loss};
use qlearn::matrix::hs_inner;
use qlearn::qra::{
    build_qra_2_1, build_qra_3_1, qra_impossibility_probe, qra_verify, QraCode,
};
use qlearn::wire::{format_g17, to_json, CsvTable};
use qlearn::{BlochVector, HermitianMatrix, State};

use crate::config::{Checker, ConfigError};
use crate::fixtures;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}', expected csv or json")),
        }
    }
}

/// Settings shared by every command after flags and file are merged.
pub struct RunContext<'a> {
    pub check: Checker<'a>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
}

impl RunContext<'_> {
    fn seed(&self) -> Result<RngSeed, ConfigError> {
        self.seed.map(RngSeed::new).ok_or_else(|| {
            ConfigError("a seed is required: pass --seed or set `seed` in the config file".into())
        })
    }

    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format, ConfigError> {
        let f = self.format.unwrap_or(default);
        if !allowed.contains(&f) {
            return Err(ConfigError(format!(
                "--format {} is not available for this command",
                serde_json::to_value(f).unwrap_or_default().as_str().unwrap_or("?")
            )));
        }
        Ok(f)
    }
}

pub struct Outcome {
    pub payload: String,
    pub summary: Value,
    pub exit: i32,
}

fn na(x: f64) -> String {
    if x.is_nan() {
        "NA".into()
    } else {
        format_g17(x)
    }
}

fn parse_ensemble(check: &Checker, key: &str, s: &str) -> Result<StateEnsemble, ConfigError> {
    let t = s.trim().to_ascii_lowercase();
    Ok(match t.as_str() {
        "haar" | "haar_pure" => StateEnsemble::HaarPure,
        "cycled" | "cycled_basis" => StateEnsemble::CycledBasis,
        "rotated" | "rotated_basis" => StateEnsemble::RotatedBasis,
        "mixed" | "maximally_mixed" => StateEnsemble::MaximallyMixed,
        _ => match t.strip_prefix("ginibre").map(str::parse::<usize>) {
            Some(Ok(rank)) if rank > 0 => StateEnsemble::Ginibre { rank },
            _ => {
                return Err(check.fail(
                    key,
                    format!("unknown ensemble '{s}' (haar, ginibreK, cycled, rotated, mixed)"),
                ))
            }
        },
    })
}

fn sample_points(
    ensemble: StateEnsemble,
    d: usize,
    n: usize,
    seed: RngSeed,
) -> Result<Vec<HermitianMatrix>> {
    Ok(ensemble
        .sample(d, n, &mut seed.rng())?
        .into_iter()
        .map(State::into_matrix)
        .collect())
}

fn read_points(path: &PathBuf) -> Result<Vec<HermitianMatrix>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum PointsFile {
        Bare(Vec<HermitianMatrix>),
        Wrapped { points: Vec<HermitianMatrix> },
    }
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed: PointsFile = serde_json::from_str(&text)
        .with_context(|| format!("{}: expected a JSON list of matrices", path.display()))?;
    Ok(match parsed {
        PointsFile::Bare(p) | PointsFile::Wrapped { points: p } => p,
    })
}

// ---------------------------------------------------------------- sweep

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    /// Hypothesis class: effect, state, rankK, s1, sinf.
    #[arg(long)]
    pub class: Option<String>,
    /// Input ensemble: haar, ginibreK, cycled, rotated, mixed.
    #[arg(long)]
    pub ensemble: Option<String>,
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub d: Option<Vec<usize>>,
    /// Sample sizes, comma separated. Overrides --n-per-d.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Sample size as a multiple of d.
    #[arg(long)]
    pub n_per_d: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
}

pub fn sweep_rademacher(ctx: &RunContext, a: &SweepArgs) -> Result<Outcome> {
    let c = &ctx.check;
    let class: HypothesisClass = c.parse("class", a.class.as_deref().unwrap_or("sinf"))?;
    let ensemble = parse_ensemble(c, "ensemble", a.ensemble.as_deref().unwrap_or("cycled"))?;
    let dims = a.d.clone().unwrap_or_else(|| vec![2, 4, 8, 16]);
    if dims.is_empty() || dims.contains(&0) {
        return Err(c.fail("d", "dimensions must be positive").into());
    }
    for &d in &dims {
        class.validate(d).map_err(|e| c.fail("class", e))?;
    }
    let trials = c.positive("trials", a.trials.unwrap_or(2000))?;
    let per_d = c.positive("n_per_d", a.n_per_d.unwrap_or(4))?;
    if let Some(ns) = &a.n {
        if ns.is_empty() || ns.contains(&0) {
            return Err(c.fail("n", "sample sizes must be positive").into());
        }
    }
    let format = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let base = ctx.seed()?;

    let mut csv = CsvTable::new(&[
        "class", "d", "n", "epsilon", "estimate", "std_error", "bound", "bound_name", "seed",
    ]);
    let mut rows = Vec::new();
    for &d in &dims {
        let ns = a.n.clone().unwrap_or_else(|| vec![per_d * d]);
        for n in ns {
            let cell = base.child(d as u64).child(n as u64);
            let points = sample_points(ensemble, d, n, cell.child(0))?;
            let est = rademacher_complexity(class, &points, trials, cell.child(1))?;
            csv.push_row([
                class.name(),
                d.to_string(),
                n.to_string(),
                "NA".into(),
                format_g17(est.value),
                na(est.std_error),
                format_g17(est.bound_value),
                est.bound_name.clone(),
                base.seed.to_string(),
            ]);
            rows.push(json!({
                "class": class.name(),
                "d": d,
                "n": n,
                "estimate": est.value,
                "std_error": if est.std_error.is_nan() { Value::Null } else { json!(est.std_error) },
                "bound": est.bound_value,
                "bound_name": est.bound_name,
                "order_only": est.order_only,
                "trials": est.trials,
                "seed": base.seed,
            }));
        }
    }
    let summary = json!({ "rows": rows.len(), "class": class.name(), "ensemble": ensemble.name() });
    let payload = match format {
        Format::Csv => csv.into_string(),
        Format::Json => to_json(&rows)?,
    };
    Ok(Outcome {
        payload,
        summary,
        exit: EXIT_OK,
    })
}

// ---------------------------------------------------------------- certify

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyArgs {
    /// Built-in point set: qubit-pair, qubit-triple, c4-rank2, orthonormal.
    #[arg(long)]
    pub example: Option<String>,
    /// JSON file with a list of matrices (or an object with a `points` list).
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Dimension for the `orthonormal` example.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub class: Option<String>,
    /// Common witness level.
    #[arg(long, conflicts_with = "witnesses")]
    pub level: Option<f64>,
    /// Per-point witness levels, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub witnesses: Option<Vec<f64>>,
    /// Feasibility solver: auto, projections, barrier.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub max_iters: Option<usize>,
}

pub fn certify(ctx: &RunContext, a: &CertifyArgs) -> Result<Outcome> {
    let c = &ctx.check;
    ctx.format(Format::Json, &[Format::Json])?;
    let (points, eps0, class0, level0) = match (&a.example, &a.points) {
        (Some(_), Some(_)) => {
            return Err(ConfigError("give either --example or --points, not both".into()).into())
        }
        (Some(name), None) => {
            let d = c.positive("d", a.d.unwrap_or(4))?;
            let f = fixtures::fixture(name, d).ok_or_else(|| {
                c.fail(
                    "example",
                    format!("unknown example '{name}' ({})", fixtures::NAMES.join(", ")),
                )
            })??;
            (f.points, Some(f.epsilon), Some(f.class), Some(f.level))
        }
        (None, Some(path)) => (read_points(path)?, None, None, None),
        (None, None) => {
            return Err(ConfigError("certify needs --example or --points".into()).into())
        }
    };
    let epsilon = match a.epsilon.or(eps0) {
        Some(e) => e,
        None => c.require("epsilon", &a.epsilon)?,
    };
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(c.fail("epsilon", format!("{epsilon} must be positive")).into());
    }
    let class = match &a.class {
        Some(s) => c.parse("class", s)?,
        None => class0.unwrap_or(HypothesisClass::EffectSpace),
    };
    let witnesses = match (&a.witnesses, a.level) {
        (Some(w), _) => {
            if w.len() != points.len() {
                return Err(c
                    .fail("witnesses", format!("{} levels for {} points", w.len(), points.len()))
                    .into());
            }
            Witnesses::PerPoint(w.clone())
        }
        (None, Some(l)) => Witnesses::Level(l),
        (None, None) => {
            let d = points.first().map(|p| p.dim()).unwrap_or(1);
            let center = class.center(d);
            match level0 {
                Some(l) => Witnesses::Level(l),
                None => Witnesses::PerPoint(
                    points
                        .iter()
                        .map(|x| hs_inner(&center, x))
                        .collect::<qlearn::Result<_>>()?,
                ),
            }
        }
    };
    let mut cfg = FeasibilityConfig::default();
    if let Some(m) = &a.method {
        cfg.method = match m.as_str() {
            "auto" => FeasibilityMethod::Auto,
            "projections" | "ap" => FeasibilityMethod::AlternatingProjections,
            "barrier" | "interior" => FeasibilityMethod::InteriorPoint,
            _ => {
                return Err(c
                    .fail("method", format!("unknown method '{m}' (auto, projections, barrier)"))
                    .into())
            }
        };
    }
    if let Some(k) = a.max_iters {
        cfg.max_iters = c.positive("max_iters", k)?;
    }

    let outcome = certify_shattering(&points, epsilon, &witnesses, class, &cfg)?;
    let (exit, summary) = match &outcome {
        ShatteringOutcome::Certified(cert) => {
            let rechecked = cert.verify(1e-9)?;
            (
                EXIT_OK,
                json!({
                    "status": "certified",
                    "points": points.len(),
                    "epsilon": epsilon,
                    "min_margin": cert.min_margin,
                    "rechecked_min_margin": rechecked,
                }),
            )
        }
        ShatteringOutcome::Infeasible {
            mask, dual_bound, ..
        } => (
            EXIT_REFUTED,
            json!({ "status": "infeasible", "mask": mask, "dual_bound": dual_bound }),
        ),
        ShatteringOutcome::Undecided {
            mask, best_margin, ..
        } => (
            EXIT_UNDECIDED,
            json!({ "status": "undecided", "mask": mask, "best_margin": best_margin }),
        ),
    };
    Ok(Outcome {
        payload: outcome.to_json()?,
        summary,
        exit,
    })
}

// ---------------------------------------------------------------- learn

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnArgs {
    /// What is learned: measurement (an effect) or state.
    #[arg(long)]
    pub role: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Input states for the measurement role: haar, ginibreK, cycled, rotated, mixed.
    #[arg(long)]
    pub ensemble: Option<String>,
    /// Input effects for the state role: pauli (d = 2), haar, random.
    #[arg(long)]
    pub effects: Option<String>,
    /// Label regime: exact, bernoulli, noisy:SIGMA.
    #[arg(long)]
    pub regime: Option<String>,
    /// JSON file with the target matrix. Random when absent.
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Rank of the random target (projector rank or state rank).
    #[arg(long)]
    pub target_rank: Option<usize>,
    /// square or absolute.
    #[arg(long)]
    pub loss: Option<String>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Held-out Haar states for the functional deviation.
    #[arg(long)]
    pub holdout: Option<usize>,
}

fn parse_regime(c: &Checker, s: &str) -> Result<LabelRegime, ConfigError> {
    let t = s.trim().to_ascii_lowercase();
    match t.as_str() {
        "exact" => Ok(LabelRegime::Exact),
        "bernoulli" => Ok(LabelRegime::Bernoulli),
        _ => match t.strip_prefix("noisy:").map(str::parse::<f64>) {
            Some(Ok(sigma)) if sigma >= 0.0 && sigma.is_finite() => {
                Ok(LabelRegime::NoisyGaussian { sigma })
            }
            _ => Err(c.fail("regime", format!("unknown regime '{s}' (exact, bernoulli, noisy:SIGMA)"))),
        },
    }
}

fn pauli_projectors() -> Result<Vec<HermitianMatrix>> {
    let mut out = Vec::new();
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            let mut r = vec![0.0; 3];
            r[axis] = sign;
            out.push(bloch_to_state(&BlochVector::new(2, r)?)?.matrix);
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct LearnResult<'a> {
    role: &'a str,
    d: usize,
    n: usize,
    regime: LabelRegime,
    target: &'a HermitianMatrix,
    recovery_error: f64,
    holdout_mean_abs_deviation: f64,
    report: &'a qlearn::learners::FitReport,
}

pub fn learn(ctx: &RunContext, a: &LearnArgs) -> Result<Outcome> {
    let c = &ctx.check;
    let role = a.role.as_deref().unwrap_or("measurement");
    if role != "measurement" && role != "state" {
        return Err(c.fail("role", format!("unknown role '{role}' (measurement, state)")).into());
    }
    let d = c.positive("d", c.require("d", &a.d)?)?;
    let n = c.positive("n", a.n.unwrap_or(2 * d * d))?;
    let regime = parse_regime(c, a.regime.as_deref().unwrap_or("exact"))?;
    let loss = match a.loss.as_deref().unwrap_or("square") {
        "square" => Loss::Square,
        "absolute" => Loss::Absolute,
        other => return Err(c.fail("loss", format!("unknown loss '{other}'")).into()),
    };
    let mut cfg = LearnerConfig {
        loss,
        learning_rate: a.learning_rate,
        ..LearnerConfig::default()
    };
    if let Some(k) = a.max_iters {
        cfg.max_iters = k;
    }
    if let Some(t) = a.tolerance {
        cfg.grad_tolerance = t;
    }
    cfg.validate().map_err(|e| ConfigError(e.to_string()))?;
    let holdout = c.positive("holdout", a.holdout.unwrap_or(100))?;
    let rank = a.target_rank.unwrap_or(1);
    if rank > d || (role == "state" && rank == 0) {
        return Err(c.fail("target_rank", format!("rank {rank} for d = {d}")).into());
    }
    let format = ctx.format(Format::Json, &[Format::Json, Format::Csv])?;
    let seed = ctx.seed()?;
    let mut rng = seed.child(0).rng();

    let target = match &a.target {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let m: HermitianMatrix = serde_json::from_str(&text)
                .with_context(|| format!("{}: expected a JSON matrix", path.display()))?;
            if m.dim() != d {
                return Err(c.fail("target", format!("target has dimension {}, d = {d}", m.dim())).into());
            }
            m
        }
        None if role == "measurement" => {
            random_effect(d, EffectMode::HaarProjector(rank), &mut rng)?.into_matrix()
        }
        None if rank == 1 => haar_pure_state(d, &mut rng)?.into_matrix(),
        None => qlearn::ensembles::ginibre_mixed_state(d, rank, &mut rng)?.into_matrix(),
    };

    let inputs: Vec<HermitianMatrix> = if role == "measurement" {
        let ens = parse_ensemble(c, "ensemble", a.ensemble.as_deref().unwrap_or("haar"))?;
        sample_points(ens, d, n, seed.child(1))?
    } else {
        let kind = a.effects.as_deref().unwrap_or(if d == 2 { "pauli" } else { "haar" });
        let mut erng = seed.child(1).rng();
        match kind {
            "pauli" => {
                if d != 2 {
                    return Err(c.fail("effects", "pauli effects need d = 2").into());
                }
                let p = pauli_projectors()?;
                (0..n).map(|i| p[i % p.len()].clone()).collect()
            }
            "haar" => (0..n)
                .map(|_| Ok(random_effect(d, EffectMode::HaarProjector(1), &mut erng)?.into_matrix()))
                .collect::<Result<_>>()?,
            "random" => (0..n)
                .map(|_| Ok(random_effect(d, EffectMode::EigenClip, &mut erng)?.into_matrix()))
                .collect::<Result<_>>()?,
            other => {
                return Err(c.fail("effects", format!("unknown effects '{other}' (pauli, haar, random)")).into())
            }
        }
    };
    let data = make_training_set(&target, inputs, regime, seed.child(2))?;
    let report = if role == "measurement" {
        erm_effect(&data, &cfg)?
    } else {
        erm_state(&data, &cfg)?
    };
    let recovery_error = report.estimate.distance(&target)?;
    let diff = report.estimate.add_scaled(-1.0, &target)?;
    let mut hrng = seed.child(3).rng();
    let mut mad = 0.0;
    for _ in 0..holdout {
        let x = haar_pure_state(d, &mut hrng)?.into_matrix();
        mad += hs_inner(&diff, &x)?.abs();
    }
    mad /= holdout as f64;

    let result = LearnResult {
        role,
        d,
        n,
        regime,
        target: &target,
        recovery_error,
        holdout_mean_abs_deviation: mad,
        report: &report,
    };
    let payload = match format {
        Format::Json => to_json(&result)?,
        Format::Csv => {
            let mut t = CsvTable::new(&["iteration", "risk"]);
            for (i, r) in report.risk_trace.iter().enumerate() {
                t.push_row([i.to_string(), format_g17(*r)]);
            }
            t.into_string()
        }
    };
    let last_risk = report.risk_trace.last().copied().unwrap_or(report.empirical_risk);
    Ok(Outcome {
        payload,
        summary: json!({
            "converged": report.converged,
            "iterations": report.iterations,
            "empirical_risk": report.empirical_risk,
            "last_risk": last_risk,
            "recovery_error": recovery_error,
            "holdout_mean_abs_deviation": mad,
        }),
        exit: if report.converged { EXIT_OK } else { EXIT_UNDECIDED },
    })
}

// ---------------------------------------------------------------- covering

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringArgs {
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of points the functions are restricted to.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub ensemble: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// 1 or 2.
    #[arg(long)]
    pub p: Option<u32>,
    /// Random class members to cover.
    #[arg(long)]
    pub sample_size: Option<usize>,
}

pub fn covering(ctx: &RunContext, a: &CoveringArgs) -> Result<Outcome> {
    let c = &ctx.check;
    let class: HypothesisClass = c.parse("class", a.class.as_deref().unwrap_or("effect"))?;
    let d = c.positive("d", c.require("d", &a.d)?)?;
    class.validate(d).map_err(|e| c.fail("class", e))?;
    let n = c.positive("n", a.n.unwrap_or(4 * d))?;
    let ensemble = parse_ensemble(c, "ensemble", a.ensemble.as_deref().unwrap_or("haar"))?;
    let epsilon = c.require("epsilon", &a.epsilon)?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(c.fail("epsilon", format!("{epsilon} must be positive")).into());
    }
    let metric = LpMetric::from_p(a.p.unwrap_or(2)).map_err(|e| c.fail("p", e))?;
    let sample_size = c.positive("sample_size", a.sample_size.unwrap_or(500))?;
    ctx.format(Format::Json, &[Format::Json])?;
    let seed = ctx.seed()?;
    let points = sample_points(ensemble, d, n, seed.child(0))?;
    let est = covering_estimate(
        &CoveringSource::Class { class, sample_size },
        &points,
        epsilon,
        metric,
        seed.child(1),
    )?;
    let payload = to_json(&json!({
        "class": class.name(),
        "d": d,
        "n": n,
        "ensemble": ensemble.name(),
        "estimate": est,
        "log_upper": est.log_upper(),
    }))?;
    Ok(Outcome {
        payload,
        summary: json!({ "upper": est.upper, "lower": est.lower, "members": est.members }),
        exit: EXIT_OK,
    })
}

// ---------------------------------------------------------------- quote

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuoteArgs {
    /// vc, fat, cover, rademacher.
    #[arg(long)]
    pub formula: Option<String>,
    /// The complexity value plugged into the formula.
    #[arg(long)]
    pub value: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// The absolute constant C. There is no default.
    #[arg(long)]
    pub constant: Option<f64>,
}

pub fn quote(ctx: &RunContext, a: &QuoteArgs) -> Result<Outcome> {
    let c = &ctx.check;
    let formula: QuoteFormula = c.parse("formula", &c.require("formula", &a.formula)?)?;
    let value = c.require("value", &a.value)?;
    let epsilon = c.open_unit("epsilon", c.require("epsilon", &a.epsilon)?)?;
    let delta = c.open_unit("delta", c.require("delta", &a.delta)?)?;
    let constant = a.constant.ok_or_else(|| {
        ConfigError(
            "the constant C is not known and has no default; set it explicitly with --constant \
             or `constant` in [quote]"
                .into(),
        )
    })?;
    if !(constant > 0.0) || !constant.is_finite() {
        return Err(c.fail("constant", format!("{constant} must be positive")).into());
    }
    if !(value >= 0.0) || !value.is_finite() {
        return Err(c.fail("value", format!("{value} must be non-negative")).into());
    }
    ctx.format(Format::Json, &[Format::Json])?;
    let q = sample_complexity_quote(formula, value, epsilon, delta, constant)?;
    Ok(Outcome {
        payload: q.to_json()?,
        summary: json!({ "bound": q.bound, "dominant_term": q.dominant_term }),
        exit: EXIT_OK,
    })
}

// ---------------------------------------------------------------- qra

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QraArgs {
    /// verify, build-2-1, build-3-1 or probe.
    pub action: Option<String>,
    /// Code file for `verify`.
    #[arg(long)]
    pub code: Option<PathBuf>,
    /// Required success probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// Bits encoded, for `probe`.
    #[arg(long)]
    pub bits: Option<usize>,
    /// Qubits, for `probe`.
    #[arg(long)]
    pub qubits: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
}

pub fn qra(ctx: &RunContext, a: &QraArgs) -> Result<Outcome> {
    let c = &ctx.check;
    let action = c.require("action", &a.action)?;
    ctx.format(Format::Json, &[Format::Json])?;
    let verdict_outcome = |code: QraCode, default_p: f64, include_code: bool| -> Result<Outcome> {
        let p = a.p.unwrap_or(default_p);
        if !(0.0..=1.0).contains(&p) {
            return Err(c.fail("p", format!("{p} is not a probability")).into());
        }
        let v = qra_verify(&code, p)?;
        let payload = if include_code {
            to_json(&json!({ "code": code, "verdict": v }))?
        } else {
            to_json(&v)?
        };
        Ok(Outcome {
            payload,
            summary: json!({ "worst_p": v.worst_p, "required_p": p, "meets": v.meets_requirement() }),
            exit: if v.meets_requirement() { EXIT_OK } else { EXIT_REFUTED },
        })
    };
    match action.as_str() {
        "verify" => {
            let path = c.require("code", &a.code)?;
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            let code = QraCode::from_json(&text)
                .with_context(|| format!("{}: malformed code file", path.display()))?;
            verdict_outcome(code, 0.5, false)
        }
        "build-2-1" => verdict_outcome(build_qra_2_1()?, 0.85, true),
        "build-3-1" => verdict_outcome(build_qra_3_1()?, 0.78, true),
        "probe" => {
            let bits = c.positive("bits", a.bits.unwrap_or(4))?;
            let qubits = c.positive("qubits", a.qubits.unwrap_or(1))?;
            if qubits > 3 {
                return Err(c.fail("qubits", "at most 3 qubits").into());
            }
            let trials = a.trials.unwrap_or(1000);
            let r = qra_impossibility_probe(bits, qubits, trials, ctx.seed()?)?;
            Ok(Outcome {
                payload: r.to_json()?,
                summary: json!({ "best_p": r.best_p, "counterexample": r.counterexample }),
                exit: if r.counterexample { EXIT_REFUTED } else { EXIT_OK },
            })
        }
        other => Err(c
            .fail("action", format!("unknown action '{other}' (verify, build-2-1, build-3-1, probe)"))
            .into()),
    }
}

// ---------------------------------------------------------------- khintchine

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KhintchineArgs {
    #[arg(long)]
    pub ensemble: Option<String>,
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub d: Option<Vec<usize>>,
    /// Sample size as a multiple of d.
    #[arg(long)]
    pub n_per_d: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
}

pub fn khintchine(ctx: &RunContext, a: &KhintchineArgs) -> Result<Outcome> {
    let c = &ctx.check;
    let ensemble = parse_ensemble(c, "ensemble", a.ensemble.as_deref().unwrap_or("cycled"))?;
    let dims = a.d.clone().unwrap_or_else(|| vec![2, 4, 8, 16]);
    if dims.is_empty() || dims.contains(&0) {
        return Err(c.fail("d", "dimensions must be positive").into());
    }
    let per_d = c.positive("n_per_d", a.n_per_d.unwrap_or(1))?;
    let trials = c.positive("trials", a.trials.unwrap_or(1000))?;
    let format = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let base = ctx.seed()?;
    let mut csv = CsvTable::new(&["ensemble", "d", "n", "ratio", "std_error", "trials", "seed"]);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &d in &dims {
        let n = per_d * d;
        let cell = base.child(d as u64).child(n as u64);
        let points = sample_points(ensemble, d, n, cell.child(0))?;
        let k = khintchine_ratio(&points, trials, cell.child(1))?;
        worst = worst.max(k.ratio);
        csv.push_row([
            ensemble.name(),
            d.to_string(),
            n.to_string(),
            format_g17(k.ratio),
            na(k.std_error),
            k.trials.to_string(),
            base.seed.to_string(),
        ]);
        rows.push(json!({ "ensemble": ensemble.name(), "seed": base.seed, "estimate": k }));
    }
    let payload = match format {
        Format::Csv => csv.into_string(),
        Format::Json => to_json(&rows)?,
    };
    Ok(Outcome {
        payload,
        summary: json!({ "rows": rows.len(), "max_ratio": worst }),
        exit: EXIT_OK,
    })
}
