//! Built-in point sets for `certify --example`.

use anyhow::Result;
use qlearn::bloch::bloch_to_state;
use qlearn::complexity::HypothesisClass;
use qlearn::ensembles::orthonormal_state_family;
use qlearn::{BlochVector, HermitianMatrix, State};

pub struct Fixture {
    pub points: Vec<HermitianMatrix>,
    pub epsilon: f64,
    pub class: HypothesisClass,
    pub level: f64,
}

pub const NAMES: [&str; 4] = ["qubit-pair", "qubit-triple", "c4-rank2", "orthonormal"];

fn qubit(r: [f64; 3]) -> Result<HermitianMatrix> {
    Ok(bloch_to_state(&BlochVector::new(2, r.to_vec())?)?.matrix)
}

fn basis(d: usize) -> Result<Vec<HermitianMatrix>> {
    Ok(orthonormal_state_family(d)?
        .into_iter()
        .map(State::into_matrix)
        .collect())
}

/// `d` only matters for `orthonormal`.
pub fn fixture(name: &str, d: usize) -> Option<Result<Fixture>> {
    let build = |points: Result<Vec<HermitianMatrix>>, epsilon, class| {
        points.map(|points| Fixture {
            points,
            epsilon,
            class,
            level: 0.5,
        })
    };
    Some(match name {
        "qubit-pair" => build(
            [[0.0, 0.0, -1.0], [-1.0, 0.0, 0.0]]
                .into_iter()
                .map(qubit)
                .collect(),
            1.0 / (2.0 * 2f64.sqrt()) - 1e-6,
            HypothesisClass::EffectSpace,
        ),
        "qubit-triple" => build(
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
                .into_iter()
                .map(qubit)
                .collect(),
            1.0 / (2.0 * 3f64.sqrt()) - 1e-6,
            HypothesisClass::EffectSpace,
        ),
        "c4-rank2" => build(
            basis(4).map(|b| b[..2].to_vec()),
            0.499,
            HypothesisClass::RankK { k: 2 },
        ),
        "orthonormal" => build(basis(d), 0.45, HypothesisClass::EffectSpace),
        _ => return None,
    })
}
