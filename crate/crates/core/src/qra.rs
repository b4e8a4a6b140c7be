//! Quantum random access codes: construction, exact verification, the
//! entropy bound linking them to level fat-shattering, and a randomized
//! search for codes beyond the pseudo-dimension limit.
//!
//! An `(n, m, p)` code encodes every `x ∈ {0,1}ⁿ` into an `m`-qubit state
//! `ρ_x` such that bit `i` is recovered by the two-outcome measurement
//! `{E₀ⁱ, E₁ⁱ}` with probability `Tr(E^i_{xᵢ} ρ_x) ≥ p`. Bit strings are
//! written with `x₁` first.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::bloch_to_state;
use crate::ensembles::{random_effect, EffectMode, RngSeed};
use crate::error::{Error, Result};
use crate::matrix::hs_inner;
use crate::{BlochVector, Effect, HermitianMatrix, State};

/// Two-outcome measurement `{E₀, E₁}` with `E₀ + E₁ = I`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoOutcomePovm {
    pub e0: HermitianMatrix,
    pub e1: HermitianMatrix,
}

impl TwoOutcomePovm {
    /// Builds `{I − E, E}` from the effect for outcome 1.
    pub fn from_effect(e1: &Effect) -> Self {
        Self {
            e0: e1.complement().into_matrix(),
            e1: e1.matrix().clone(),
        }
    }

    pub fn outcome(&self, bit: u8) -> &HermitianMatrix {
        if bit == 0 {
            &self.e0
        } else {
            &self.e1
        }
    }

    /// `{E₁, E₀}`.
    pub fn swapped(&self) -> Self {
        Self {
            e0: self.e1.clone(),
            e1: self.e0.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QraCode {
    pub n_bits: usize,
    pub m_qubits: usize,
    /// Keyed by bit strings such as `"01"`.
    pub encoder: BTreeMap<String, HermitianMatrix>,
    pub decoders: Vec<TwoOutcomePovm>,
}

impl QraCode {
    pub fn to_json(&self) -> Result<String> {
        crate::wire::to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// All `2ⁿ` bit strings in lexicographic order.
pub fn bit_strings(n: usize) -> Vec<String> {
    (0..1usize << n)
        .map(|v| {
            (0..n)
                .map(|i| if v >> (n - 1 - i) & 1 == 1 { '1' } else { '0' })
                .collect()
        })
        .collect()
}

fn bits_of(s: &str) -> Vec<u8> {
    s.bytes().map(|b| b - b'0').collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QraVerdict {
    /// `min_{x,i} Tr(E^i_{xᵢ} ρ_x)`.
    pub worst_p: f64,
    /// A pair attaining the minimum.
    pub worst_pair: (String, usize),
    /// First pair, in lexicographic order, decoded with probability below
    /// the required level.
    pub failing_pair: Option<(String, usize)>,
    pub required_p: f64,
}

impl QraVerdict {
    pub fn meets_requirement(&self) -> bool {
        self.failing_pair.is_none()
    }
}

fn check_code(code: &QraCode) -> Result<usize> {
    if code.m_qubits == 0 || code.m_qubits > 8 {
        return Err(Error::InvalidParameter(format!("{} qubits", code.m_qubits)));
    }
    if code.n_bits == 0 || code.n_bits > 20 {
        return Err(Error::InvalidParameter(format!("{} bits", code.n_bits)));
    }
    let d = 1usize << code.m_qubits;
    if code.decoders.len() != code.n_bits {
        return Err(Error::DimensionMismatch {
            expected: code.n_bits,
            found: code.decoders.len(),
        });
    }
    for (bit, p) in code.decoders.iter().enumerate() {
        for e in [&p.e0, &p.e1] {
            if e.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: e.dim(),
                });
            }
            Effect::new(e.clone())?;
        }
        let dev = p
            .e0
            .add_scaled(1.0, &p.e1)?
            .max_abs_diff(&HermitianMatrix::identity(d))?;
        if dev > 1e-10 {
            return Err(Error::IncompletePovm {
                bit,
                deviation: dev,
            });
        }
    }
    for x in bit_strings(code.n_bits) {
        let rho = code
            .encoder
            .get(&x)
            .ok_or_else(|| Error::MissingEncoding(x.clone()))?;
        if rho.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.dim(),
            });
        }
        State::new(rho.clone())?;
    }
    Ok(d)
}

/// Exhaustive check of every `(x, i)` pair.
pub fn qra_verify(code: &QraCode, required_p: f64) -> Result<QraVerdict> {
    check_code(code)?;
    let strings = bit_strings(code.n_bits);
    let per_string: Vec<Vec<f64>> = strings
        .par_iter()
        .map(|x| {
            let rho = &code.encoder[x];
            bits_of(x)
                .iter()
                .zip(&code.decoders)
                .map(|(&b, povm)| hs_inner(povm.outcome(b), rho))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut worst = (f64::INFINITY, String::new(), 0);
    let mut failing = None;
    for (x, probs) in strings.iter().zip(&per_string) {
        for (i, &p) in probs.iter().enumerate() {
            if p < worst.0 {
                worst = (p, x.clone(), i);
            }
            if failing.is_none() && p < required_p {
                failing = Some((x.clone(), i));
            }
        }
    }
    Ok(QraVerdict {
        worst_p: worst.0,
        worst_pair: (worst.1, worst.2),
        failing_pair: failing,
        required_p,
    })
}

fn qubit_state(r: [f64; 3]) -> Result<HermitianMatrix> {
    Ok(bloch_to_state(&BlochVector::new(2, r.to_vec())?)?.matrix)
}

/// Projective qubit measurement along a Bloch axis; outcome 0 is `+axis`.
fn axis_povm(axis: [f64; 3]) -> Result<TwoOutcomePovm> {
    let e0 = qubit_state(axis)?;
    Ok(TwoOutcomePovm {
        e1: HermitianMatrix::identity(2).add_scaled(-1.0, &e0)?,
        e0,
    })
}

/// The `(2, 1, cos²(π/8))` code: `|ψ⟩ = cos φ|0⟩ + sin φ|1⟩` with
/// `φ = π/8, 3π/8, 5π/8, 7π/8` for `00, 10, 11, 01`; bit 1 read in the
/// computational basis, bit 2 in the `|±⟩` basis.
pub fn build_qra_2_1() -> Result<QraCode> {
    use std::f64::consts::PI;
    let mut encoder = BTreeMap::new();
    for (x, phi) in [("00", PI / 8.0), ("10", 3.0 * PI / 8.0), ("11", 5.0 * PI / 8.0), ("01", 7.0 * PI / 8.0)] {
        let r = [(2.0 * phi).sin(), 0.0, (2.0 * phi).cos()];
        encoder.insert(x.to_string(), qubit_state(r)?);
    }
    Ok(QraCode {
        n_bits: 2,
        m_qubits: 1,
        encoder,
        decoders: vec![axis_povm([0.0, 0.0, 1.0])?, axis_povm([1.0, 0.0, 0.0])?],
    })
}

/// The `(3, 1, ½(1 + 1/√3))` code: Bloch vectors at the cube corners
/// `((−1)^{x₁}, (−1)^{x₂}, (−1)^{x₃})/√3`, decoded by the three Paulis.
pub fn build_qra_3_1() -> Result<QraCode> {
    let s = 1.0 / 3f64.sqrt();
    let mut encoder = BTreeMap::new();
    for x in bit_strings(3) {
        let b = bits_of(&x);
        let r = [0, 1, 2].map(|i| if b[i] == 0 { s } else { -s });
        encoder.insert(x, qubit_state(r)?);
    }
    Ok(QraCode {
        n_bits: 3,
        m_qubits: 1,
        encoder,
        decoders: vec![
            axis_povm([1.0, 0.0, 0.0])?,
            axis_povm([0.0, 1.0, 0.0])?,
            axis_povm([0.0, 0.0, 1.0])?,
        ],
    })
}

/// Binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "n_max", rename_all = "snake_case")]
pub enum QraBound {
    Finite(usize),
    Unbounded,
}

/// Largest `n` compatible with `m ≥ (1 − H(ε + ½)) n`, the entropy bound an
/// `(n, m, ½ + ε)` code must satisfy.
pub fn fat_to_qra_bound(epsilon: f64, m: usize) -> Result<QraBound> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} outside (0, 1/2)"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let rate = 1.0 - binary_entropy(epsilon + 0.5);
    if !(rate > 1e-15) {
        return Ok(QraBound::Unbounded);
    }
    let n = (m as f64 / rate + 1e-9).floor();
    if n >= usize::MAX as f64 {
        return Ok(QraBound::Unbounded);
    }
    Ok(QraBound::Finite(n as usize))
}

/// Gurvits' pigeonhole bound: a lower bound on the level fat-shattering
/// dimension at scale `ε/2` from the fat-shattering dimension at `2ε`,
/// `fat(2ε) · ε / (2(1 − 2ε))`.
pub fn gurvits_level_lower_bound(fat_at_2eps: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} outside (0, 1/2)"
        )));
    }
    Ok(fat_at_2eps * epsilon / (2.0 * (1.0 - 2.0 * epsilon)))
}

/// Best encoder for fixed decoders: for each `x`, a state approximately
/// maximizing `min_i Tr(F_i ρ)` with `F_i = E^i_{xᵢ}`.
///
/// Solves the dual `min_{μ ∈ Δ} λ_max(Σ μᵢ Fᵢ)` by exponentiated subgradient
/// steps; the primal state is the best of the top eigenvector at each step
/// and the running average of those projectors.
fn best_state(fs: &[&HermitianMatrix], iters: usize) -> Result<(HermitianMatrix, f64)> {
    let n = fs.len();
    let d = fs[0].dim();
    let worst_of = |rho: &HermitianMatrix| -> Result<f64> {
        let mut w = f64::INFINITY;
        for f in fs {
            w = w.min(hs_inner(f, rho)?);
        }
        Ok(w)
    };
    let mut mu = vec![1.0 / n as f64; n];
    let mut avg = HermitianMatrix::zeros(d);
    let mut weight = 0.0;
    let mut best = (State::maximally_mixed(d).into_matrix(), f64::NEG_INFINITY);
    best.1 = worst_of(&best.0)?;
    for k in 0..iters {
        let mut m = HermitianMatrix::zeros(d);
        for (f, &w) in fs.iter().zip(&mu) {
            m.axpy(w, f)?;
        }
        let spec = m.eig()?;
        let rho = HermitianMatrix::outer(&spec.eigenvectors.column(0));
        let v = worst_of(&rho)?;
        if v > best.1 {
            best = (rho.clone(), v);
        }
        let step = 0.5 / ((k + 1) as f64).sqrt();
        avg.axpy(step, &rho)?;
        weight += step;
        // subgradient of λ_max is ⟨Fᵢ, ρ⟩
        let mut z = 0.0;
        for (mi, f) in mu.iter_mut().zip(fs) {
            *mi *= (-step * 4.0 * hs_inner(f, &rho)?).exp();
            z += *mi;
        }
        for mi in &mut mu {
            *mi /= z;
        }
    }
    if weight > 0.0 {
        let a = avg.scale(1.0 / weight);
        let v = worst_of(&a)?;
        if v > best.1 {
            best = (a, v);
        }
    }
    Ok(best)
}

/// Completes decoders into a code with the best encoder found for each
/// bit string, and verifies it exactly.
pub fn optimal_encoder(
    decoders: &[TwoOutcomePovm],
    m_qubits: usize,
    iters: usize,
) -> Result<(QraCode, QraVerdict)> {
    let n = decoders.len();
    let mut encoder = BTreeMap::new();
    for x in bit_strings(n) {
        let b = bits_of(&x);
        let fs: Vec<&HermitianMatrix> = decoders
            .iter()
            .zip(&b)
            .map(|(p, &bit)| p.outcome(bit))
            .collect();
        encoder.insert(x, best_state(&fs, iters)?.0);
    }
    let code = QraCode {
        n_bits: n,
        m_qubits,
        encoder,
        decoders: decoders.to_vec(),
    };
    let verdict = qra_verify(&code, 0.5)?;
    Ok((code, verdict))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QraProbeReport {
    pub n_bits: usize,
    pub m_qubits: usize,
    pub trials: usize,
    /// Best verified worst-case success probability.
    pub best_p: f64,
    pub best_code: QraCode,
    /// Whether a verified code beat `1/2 + threshold`.
    pub counterexample: bool,
    pub threshold: f64,
}

impl QraProbeReport {
    pub fn to_json(&self) -> Result<String> {
        crate::wire::to_json(self)
    }
}

fn random_decoders<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Vec<TwoOutcomePovm>> {
    (0..n)
        .map(|_| {
            let mode = if rng.gen::<f64>() < 0.75 {
                EffectMode::HaarProjector(d / 2)
            } else {
                EffectMode::EigenClip
            };
            Ok(TwoOutcomePovm::from_effect(&random_effect(d, mode, rng)?))
        })
        .collect()
}

fn structured_decoders(n: usize, m: usize) -> Result<Vec<Vec<TwoOutcomePovm>>> {
    if m != 1 {
        return Ok(Vec::new());
    }
    let axes = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0],
    ];
    let s = 1.0 / 3f64.sqrt();
    let tetra = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
    let mut out = Vec::new();
    for family in [&axes[..], &tetra[..]] {
        if n <= family.len() {
            out.push(family[..n].iter().map(|&a| axis_povm(a)).collect::<Result<_>>()?);
        }
    }
    if n == 2 {
        out.push(build_qra_2_1()?.decoders);
    }
    Ok(out)
}

/// Randomized search for an `(n, m, p)` code with large `p`: structured
/// decoder families, random decoders, and hill-climbing from the best
/// random start. Every reported `p` belongs to an exactly verified code.
pub fn qra_impossibility_probe(
    n_bits: usize,
    m_qubits: usize,
    trials: usize,
    seed: RngSeed,
) -> Result<QraProbeReport> {
    if m_qubits == 0 || m_qubits > 3 {
        return Err(Error::InvalidParameter(format!("{m_qubits} qubits")));
    }
    if n_bits == 0 || n_bits > 8 {
        return Err(Error::InvalidParameter(format!("{n_bits} bits")));
    }
    let d = 1usize << m_qubits;
    let iters = 150;
    let threshold = 1e-3;

    let mut candidates = structured_decoders(n_bits, m_qubits)?;
    let random: Vec<Vec<TwoOutcomePovm>> = (0..trials)
        .into_par_iter()
        .map(|t| random_decoders(n_bits, d, &mut seed.child(t as u64).rng()))
        .collect::<Result<_>>()?;
    candidates.extend(random);
    let scored: Vec<(QraCode, QraVerdict)> = candidates
        .par_iter()
        .map(|dec| optimal_encoder(dec, m_qubits, iters))
        .collect::<Result<_>>()?;
    let (mut best_code, mut best_v) = scored
        .into_iter()
        .max_by(|a, b| a.1.worst_p.total_cmp(&b.1.worst_p))
        .expect("at least one candidate");

    // local search around the incumbent
    let mut rng = seed.child(u64::MAX).rng();
    let mut step = 0.2;
    for _ in 0..200 {
        let mut dec = best_code.decoders.clone();
        let i = rng.gen_range(0..n_bits);
        let noise = random_effect(d, EffectMode::EigenClip, &mut rng)?
            .into_matrix()
            .add_scaled(-0.5, &HermitianMatrix::identity(d))?;
        let moved = crate::matrix::project_to_effect(&dec[i].e1.add_scaled(step, &noise)?)?;
        dec[i] = TwoOutcomePovm::from_effect(&moved);
        let (code, v) = optimal_encoder(&dec, m_qubits, iters)?;
        if v.worst_p > best_v.worst_p {
            best_code = code;
            best_v = v;
        } else {
            step = (step * 0.97).max(1e-3);
        }
    }
    Ok(QraProbeReport {
        n_bits,
        m_qubits,
        trials,
        best_p: best_v.worst_p,
        best_code,
        counterexample: best_v.worst_p > 0.5 + threshold && n_bits >= 1 << (2 * m_qubits),
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_one_bit_code() {
        let mut encoder = BTreeMap::new();
        encoder.insert("0".into(), State::basis(2, 0).into_matrix());
        encoder.insert("1".into(), State::basis(2, 1).into_matrix());
        let code = QraCode {
            n_bits: 1,
            m_qubits: 1,
            encoder,
            decoders: vec![axis_povm([0.0, 0.0, 1.0]).unwrap()],
        };
        let v = qra_verify(&code, 1.0 - 1e-12).unwrap();
        assert!((v.worst_p - 1.0).abs() < 1e-12 && v.meets_requirement());
    }

    #[test]
    fn two_one_code_value() {
        let v = qra_verify(&build_qra_2_1().unwrap(), 0.85).unwrap();
        let want = (std::f64::consts::PI / 8.0).cos().powi(2);
        assert!((v.worst_p - want).abs() < 1e-12);
        assert!(v.meets_requirement());
    }

    #[test]
    fn swapped_decoder_fails() {
        let mut code = build_qra_2_1().unwrap();
        code.decoders[1] = code.decoders[1].swapped();
        let v = qra_verify(&code, 0.5).unwrap();
        assert!(v.worst_p <= 0.15);
        assert!(v.failing_pair.is_some());
    }

    #[test]
    fn missing_and_incomplete() {
        let mut code = build_qra_2_1().unwrap();
        code.encoder.remove("01");
        assert!(matches!(qra_verify(&code, 0.5), Err(Error::MissingEncoding(s)) if s == "01"));
        let mut code = build_qra_2_1().unwrap();
        code.decoders[0].e0 = code.decoders[0].e0.scale(0.5);
        assert!(matches!(qra_verify(&code, 0.5), Err(Error::IncompletePovm { bit: 0, .. })));
    }

    #[test]
    fn entropy_bound_arithmetic() {
        assert_eq!(fat_to_qra_bound(0.5 - 1e-12, 3).unwrap(), QraBound::Finite(3));
        assert_eq!(fat_to_qra_bound(1e-300, 1).unwrap(), QraBound::Unbounded);
        assert!(fat_to_qra_bound(0.5, 1).is_err());
        assert_eq!(binary_entropy(0.5), 1.0);
    }

    #[test]
    fn bit_string_order() {
        assert_eq!(bit_strings(2), vec!["00", "01", "10", "11"]);
    }
}
