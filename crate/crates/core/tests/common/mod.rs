#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spinstar_gme::linalg::{c64, ComplexMatrix, ComplexVector};
use spinstar_gme::qubits::{bloch_ket, tensor_states, BlochAngles, DensityOperator, PureState};
use spinstar_gme::witness::{SlotPattern, TrialConfiguration};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let data = (0..n * n).map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    ComplexMatrix::from_row_major(n, n, data).unwrap().hermitian_part()
}

pub fn random_ket(rng: &mut impl Rng, num_qubits: usize) -> PureState {
    let data = (0..1usize << num_qubits).map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    PureState::normalized(ComplexVector::from_vec(data).unwrap()).unwrap()
}

pub fn random_bloch(rng: &mut impl Rng) -> PureState {
    let a = rng.gen_range(0.0..=std::f64::consts::PI);
    let b = rng.gen_range(0.0..std::f64::consts::TAU);
    bloch_ket(BlochAngles::new(a, b).unwrap())
}

/// Random convex weights summing to one.
pub fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// Mixture of `rank` random pure states.
pub fn random_density(rng: &mut impl Rng, num_qubits: usize, rank: usize) -> DensityOperator {
    let kets: Vec<DensityOperator> = (0..rank).map(|_| random_ket(rng, num_qubits).projector()).collect();
    let w = random_weights(rng, rank);
    let parts: Vec<(f64, &DensityOperator)> = w.iter().copied().zip(kets.iter()).collect();
    DensityOperator::mixture(&parts).unwrap()
}

/// Full product of three random single-qubit kets.
pub fn random_product(rng: &mut impl Rng) -> DensityOperator {
    tensor_states(&[random_bloch(rng), random_bloch(rng), random_bloch(rng)]).unwrap().projector()
}

/// A random two-qubit ket on the pair opposite `solo`, times a random ket on `solo`.
pub fn random_pair_times_single(rng: &mut impl Rng, solo: usize) -> DensityOperator {
    let pair = random_ket(rng, 2);
    let single = random_bloch(rng);
    let rho = tensor_states(&[pair, single]).unwrap().projector();
    let order: [usize; 3] = match solo {
        0 => [2, 0, 1],
        1 => [0, 2, 1],
        _ => [0, 1, 2],
    };
    rho.permute_qubits(&order).unwrap()
}

/// Products, pair-entangled states in every placement, and mixtures of these.
pub fn random_biseparable(rng: &mut impl Rng, kind: usize) -> DensityOperator {
    match kind % 5 {
        0 => random_product(rng),
        k @ 1..=3 => random_pair_times_single(rng, k - 1),
        _ => {
            let n = rng.gen_range(2..=4);
            let parts: Vec<DensityOperator> = (0..n)
                .map(|_| match rng.gen_range(0..4) {
                    0 => random_product(rng),
                    k => random_pair_times_single(rng, k - 1),
                })
                .collect();
            let w = random_weights(rng, n);
            let refs: Vec<(f64, &DensityOperator)> = w.iter().copied().zip(parts.iter()).collect();
            DensityOperator::mixture(&refs).unwrap()
        }
    }
}

pub fn random_trial(rng: &mut impl Rng, pattern: SlotPattern) -> TrialConfiguration {
    use std::f64::consts::{PI, TAU};
    TrialConfiguration::new(
        rng.gen_range(0.0..=PI),
        rng.gen_range(0.0..TAU),
        rng.gen_range(0.0..=PI),
        rng.gen_range(0.0..TAU),
        pattern,
    )
    .unwrap()
}

/// `(diag(1, e^{iγ}))^{⊗n}` applied on both sides.
pub fn phase_rotate(rho: &DensityOperator, gamma: f64) -> DensityOperator {
    let n = rho.num_qubits();
    let d = rho.dim();
    let phase = |k: usize| c64(0.0, gamma * k.count_ones() as f64).exp();
    let m = rho.matrix();
    let data = (0..d * d).map(|idx| m[(idx / d, idx % d)] * phase(idx / d) * phase(idx % d).conj()).collect();
    let out = DensityOperator::new(ComplexMatrix::from_row_major(d, d, data).unwrap()).unwrap();
    assert_eq!(out.num_qubits(), n);
    out
}
