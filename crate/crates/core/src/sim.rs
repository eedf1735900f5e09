//! Exact statevector simulation of the QAOA ansatz and shot sampling.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{index_to_string, BitOrder};
use crate::error::{Error, Result};
use crate::hardware::ReadoutNoiseModel;
use crate::ising::IsingHamiltonian;

pub const MAX_QUBITS: usize = 26;

const NORM_TOLERANCE: f64 = 1e-10;

const PAR_MIN_LEN: usize = 1 << 12;

fn check_qubits(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::ResourceCap(format!(
            "statevector on {n} qubits exceeds the {MAX_QUBITS}-qubit limit"
        )));
    }
    Ok(())
}

/// Amplitudes over `2^n` basis states; bit `i` of the index is qubit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `|+>^n`.
    pub fn uniform(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self {
            n,
            amplitudes: vec![a; dim],
        })
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, got: index + 1 });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amplitudes })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() {
            return Err(Error::InvalidParameters(format!(
                "amplitude vector length {dim} is not a power of two"
            )));
        }
        let n = dim.trailing_zeros() as usize;
        check_qubits(n)?;
        let s = Self { n, amplitudes };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multiplies amplitude `m` by `exp(-i gamma diagonal[m])`.
    pub fn apply_phase_diagonal(&mut self, diagonal: &[f64], gamma: f64) -> Result<()> {
        if diagonal.len() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                got: diagonal.len(),
            });
        }
        if gamma == 0.0 {
            return Ok(());
        }
        self.amplitudes
            .par_iter_mut()
            .with_min_len(PAR_MIN_LEN)
            .zip(diagonal.par_iter().with_min_len(PAR_MIN_LEN))
            .for_each(|(a, &e)| *a *= Complex64::from_polar(1.0, -gamma * e));
        Ok(())
    }

    pub fn apply_phase_layer(&mut self, h: &IsingHamiltonian, gamma: f64) -> Result<()> {
        if h.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: h.n() });
        }
        self.apply_phase_diagonal(&h.diagonal(), gamma)
    }

    /// `RX(2 beta)` on every qubit.
    pub fn apply_mixer_layer(&mut self, beta: f64) {
        if beta == 0.0 {
            return;
        }
        let (s, c) = beta.sin_cos();
        let mis = Complex64::new(0.0, -s);
        for k in 0..self.n {
            let stride = 1usize << k;
            self.amplitudes
                .par_chunks_mut(2 * stride)
                .with_min_len((PAR_MIN_LEN / (2 * stride)).max(1))
                .for_each(|block| {
                    let (lo, hi) = block.split_at_mut(stride);
                    for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (x0, x1) = (*a0, *a1);
                        *a0 = x0 * c + mis * x1;
                        *a1 = mis * x0 + x1 * c;
                    }
                });
        }
    }

    /// `RZ(theta) = diag(exp(-i theta/2), exp(i theta/2))` on qubit `k`.
    pub fn apply_rz(&mut self, k: usize, theta: f64) -> Result<()> {
        self.check_qubit(k)?;
        let p0 = Complex64::from_polar(1.0, -theta / 2.0);
        let p1 = p0.conj();
        for (m, a) in self.amplitudes.iter_mut().enumerate() {
            *a *= if (m >> k) & 1 == 0 { p0 } else { p1 };
        }
        Ok(())
    }

    /// `RZZ(theta) = exp(-i theta/2 Z_i Z_j)`.
    pub fn apply_rzz(&mut self, i: usize, j: usize, theta: f64) -> Result<()> {
        self.check_qubit(i)?;
        self.check_qubit(j)?;
        let same = Complex64::from_polar(1.0, -theta / 2.0);
        let differ = same.conj();
        for (m, a) in self.amplitudes.iter_mut().enumerate() {
            *a *= if ((m >> i) ^ (m >> j)) & 1 == 0 { same } else { differ };
        }
        Ok(())
    }

    fn check_qubit(&self, k: usize) -> Result<()> {
        if k >= self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: k + 1 });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParameters {
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl QaoaParameters {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if betas.len() != gammas.len() {
            return Err(Error::InvalidParameters(format!(
                "{} betas but {} gammas",
                betas.len(),
                gammas.len()
            )));
        }
        Ok(Self { betas, gammas })
    }

    /// Splits `[betas..., gammas...]`.
    pub fn from_flat(x: &[f64]) -> Result<Self> {
        if !x.len().is_multiple_of(2) {
            return Err(Error::InvalidParameters(format!(
                "flat parameter vector has odd length {}",
                x.len()
            )));
        }
        let (b, g) = x.split_at(x.len() / 2);
        Self::new(b.to_vec(), g.to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.betas.iter().chain(&self.gammas).copied().collect()
    }

    pub fn layers(&self) -> usize {
        self.betas.len()
    }
}

/// Runs `p` alternating phase and mixer layers on `|+>^n` given precomputed
/// basis energies.
pub fn qaoa_state_from_diagonal(n: usize, diagonal: &[f64], params: &QaoaParameters) -> Result<Statevector> {
    if params.betas.len() != params.gammas.len() {
        return Err(Error::InvalidParameters("betas and gammas differ in length".into()));
    }
    let mut state = Statevector::uniform(n)?;
    for (&beta, &gamma) in params.betas.iter().zip(&params.gammas) {
        state.apply_phase_diagonal(diagonal, gamma)?;
        state.apply_mixer_layer(beta);
    }
    Ok(state)
}

pub fn qaoa_state(h: &IsingHamiltonian, params: &QaoaParameters) -> Result<Statevector> {
    check_qubits(h.n())?;
    qaoa_state_from_diagonal(h.n(), &h.diagonal(), params)
}

/// Measurement outcomes keyed by rendered bitstring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub shots: u64,
    pub bit_order: BitOrder,
    pub counts: BTreeMap<String, u64>,
}

impl Counts {
    pub fn validate(&self) -> Result<()> {
        let total: u64 = self.counts.values().sum();
        if total != self.shots {
            return Err(Error::InvalidRecord(format!(
                "counts sum to {total} but shots is {}",
                self.shots
            )));
        }
        Ok(())
    }
}

/// Draws basis indices by inverse-CDF sampling, then applies readout flips.
pub fn sample_indices(
    probabilities: &[f64],
    shots: u64,
    rng: &mut ChaCha8Rng,
    noise: Option<&ReadoutNoiseModel>,
) -> Vec<usize> {
    let mut cumulative = Vec::with_capacity(probabilities.len());
    let mut acc = 0.0;
    for &p in probabilities {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    let last = probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    (0..shots)
        .map(|_| {
            let u = rng.gen::<f64>() * total;
            let m = cumulative.partition_point(|&c| c <= u).min(last);
            match noise {
                Some(model) => model.flip(m, rng),
                None => m,
            }
        })
        .collect()
}

pub fn sample_counts(
    state: &Statevector,
    shots: u64,
    seed: u64,
    noise: Option<&ReadoutNoiseModel>,
    order: BitOrder,
) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::InvalidParameters("shots must be at least 1".into()));
    }
    if let Some(model) = noise {
        if model.n() < state.n {
            return Err(Error::InvalidNoise(format!(
                "noise model covers {} qubits, state has {}",
                model.n(),
                state.n
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally: BTreeMap<usize, u64> = BTreeMap::new();
    for m in sample_indices(&state.probabilities(), shots, &mut rng, noise) {
        *tally.entry(m).or_insert(0) += 1;
    }
    Ok(Counts {
        shots,
        bit_order: order,
        counts: tally
            .into_iter()
            .map(|(m, c)| (index_to_string(m, state.n, order), c))
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMode {
    Exact,
    Shots { shots: u64, seed: u64 },
}

/// QAOA energy evaluator holding the basis energies of one Hamiltonian.
#[derive(Debug, Clone)]
pub struct QaoaEnergy {
    n: usize,
    diagonal: Vec<f64>,
    offset: f64,
}

impl QaoaEnergy {
    pub fn new(h: &IsingHamiltonian, offset: f64) -> Result<Self> {
        check_qubits(h.n())?;
        Ok(Self {
            n: h.n(),
            diagonal: h.diagonal(),
            offset,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn state(&self, params: &QaoaParameters) -> Result<Statevector> {
        qaoa_state_from_diagonal(self.n, &self.diagonal, params)
    }

    /// Expectation of the Hamiltonian plus offset.
    pub fn energy(&self, params: &QaoaParameters, mode: EnergyMode) -> Result<f64> {
        let state = self.state(params)?;
        let probabilities = state.probabilities();
        let mean = match mode {
            EnergyMode::Exact => probabilities.iter().zip(&self.diagonal).map(|(p, e)| p * e).sum::<f64>(),
            EnergyMode::Shots { shots, seed } => {
                if shots == 0 {
                    return Err(Error::InvalidParameters("shots must be at least 1".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let samples = sample_indices(&probabilities, shots, &mut rng, None);
                samples.iter().map(|&m| self.diagonal[m]).sum::<f64>() / shots as f64
            }
        };
        Ok(mean + self.offset)
    }

    pub fn energy_flat(&self, x: &[f64], mode: EnergyMode) -> Result<f64> {
        self.energy(&QaoaParameters::from_flat(x)?, mode)
    }
}

pub fn energy_evaluation(
    h: &IsingHamiltonian,
    offset: f64,
    params: &QaoaParameters,
    mode: EnergyMode,
) -> Result<f64> {
    QaoaEnergy::new(h, offset)?.energy(params, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use crate::bits::index_to_bits;
    use crate::convert::{build_qubo, EncodingScheme};
    use crate::fixtures;
    use crate::ising::{expectation, qubo_to_ising, StateWeights};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_car_hamiltonian() -> (IsingHamiltonian, f64) {
        let (qubo, _) = build_qubo(&fixtures::single_car().build_qcio(), 3.6, EncodingScheme::BoundedCoefficient)
            .unwrap();
        qubo_to_ising(&qubo)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a.re - b.re).abs() <= tol && (a.im - b.im).abs() <= tol
    }

    /// `U_M(beta) U_P(gamma) |+>` for a single qubit with `H = c Z`, by 2x2 matrices.
    fn one_qubit_oracle(coef: f64, beta: f64, gamma: f64) -> [Complex64; 2] {
        let plus = [c(0.5f64.sqrt(), 0.0); 2];
        let phased = [
            plus[0] * Complex64::from_polar(1.0, -gamma * coef),
            plus[1] * Complex64::from_polar(1.0, gamma * coef),
        ];
        let rx = [[c(beta.cos(), 0.0), c(0.0, -beta.sin())], [c(0.0, -beta.sin()), c(beta.cos(), 0.0)]];
        [
            rx[0][0] * phased[0] + rx[0][1] * phased[1],
            rx[1][0] * phased[0] + rx[1][1] * phased[1],
        ]
    }

    #[test]
    fn phase_layer_examples() {
        let h = IsingHamiltonian::new(1, vec![0.7], []).unwrap();
        let mut s = Statevector::uniform(1).unwrap();
        let before = s.clone();
        s.apply_phase_layer(&h, 0.0).unwrap();
        assert_eq!(s, before);
        let gamma = 0.4;
        s.apply_phase_layer(&h, gamma).unwrap();
        let r = 0.5f64.sqrt();
        assert!(close(s.amplitudes()[0], Complex64::from_polar(r, -gamma * 0.7), 1e-15));
        assert!(close(s.amplitudes()[1], Complex64::from_polar(r, gamma * 0.7), 1e-15));

        let h = IsingHamiltonian::new(2, vec![0.0; 2], [((0, 1), 1.3)]).unwrap();
        let mut s = Statevector::uniform(2).unwrap();
        s.apply_phase_layer(&h, gamma).unwrap();
        for (m, sign) in [(0, -1.0), (1, 1.0), (2, 1.0), (3, -1.0)] {
            assert!(close(s.amplitudes()[m], Complex64::from_polar(0.5, sign * gamma * 1.3), 1e-15));
        }
        assert!(s.apply_phase_layer(&IsingHamiltonian::new(3, vec![0.0; 3], []).unwrap(), 1.0).is_err());
    }

    #[test]
    fn mixer_layer_examples() {
        let mut s = Statevector::basis(1, 0).unwrap();
        s.apply_mixer_layer(0.0);
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        s.apply_mixer_layer(FRAC_PI_2);
        assert!(close(s.amplitudes()[0], c(0.0, 0.0), 1e-15));
        assert!(close(s.amplitudes()[1], c(0.0, -1.0), 1e-15));

        let (h, _) = single_car_hamiltonian();
        let params = QaoaParameters::new(vec![0.3], vec![0.9]).unwrap();
        let s = qaoa_state(&h, &params).unwrap();
        let mut t = s.clone();
        t.apply_mixer_layer(PI);
        for (a, b) in s.amplitudes().iter().zip(t.amplitudes()) {
            // (-1)^8
            assert!(close(*a, *b, 1e-12));
        }
    }

    #[test]
    fn zero_layers_is_uniform() {
        let (h, _) = single_car_hamiltonian();
        let s = qaoa_state(&h, &QaoaParameters::new(vec![], vec![]).unwrap()).unwrap();
        assert!(s.amplitudes().iter().all(|a| close(*a, c(1.0 / 16.0, 0.0), 1e-15)));
    }

    #[test]
    fn one_qubit_state_matches_matrix_oracle() {
        let h = IsingHamiltonian::new(1, vec![1.0], []).unwrap();
        for (beta, gamma) in [(0.3, 0.4), (1.1, -2.0), (2.9, 5.5)] {
            let s = qaoa_state(&h, &QaoaParameters::new(vec![beta], vec![gamma]).unwrap()).unwrap();
            let oracle = one_qubit_oracle(1.0, beta, gamma);
            assert!(close(s.amplitudes()[0], oracle[0], 1e-14));
            assert!(close(s.amplitudes()[1], oracle[1], 1e-14));
        }
    }

    #[test]
    fn reference_statevector() {
        let (h, _) = single_car_hamiltonian();
        let params = QaoaParameters::new(vec![3.99890724, 2.72012026], vec![6.11303759, 1.75840967]).unwrap();
        let s = qaoa_state(&h, &params).unwrap();
        let head = [
            c(-2.19237435e-03, 4.73527294e-05),
            c(9.36596020e-03, 4.63441187e-03),
            c(2.20883527e-06, 5.24193322e-04),
            c(8.90791252e-03, 6.83746374e-03),
            c(9.36596020e-03, 4.63441187e-03),
            c(2.09261296e-02, 1.38949582e-01),
            c(5.14211808e-06, -9.66312497e-04),
            c(-4.59808754e-03, 3.90829328e-02),
            c(2.20883527e-06, 5.24193322e-04),
        ];
        for (m, want) in head.iter().enumerate() {
            assert!(close(s.amplitudes()[m], *want, 1e-7), "index {m}: {}", s.amplitudes()[m]);
        }
        let tail = [
            c(8.24173563e-04, -8.22140766e-04),
            c(-5.44605429e-04, -1.92611140e-03),
            c(3.05595401e-03, -2.21578751e-03),
            c(8.24173563e-04, -8.22140766e-04),
            c(1.98750175e-03, -1.13018901e-04),
        ];
        for (k, want) in tail.iter().enumerate() {
            assert!(close(s.amplitudes()[251 + k], *want, 1e-7), "index {}", 251 + k);
        }
    }

    #[test]
    fn reference_energy_bracket() {
        let (h, offset) = single_car_hamiltonian();
        let params = QaoaParameters::new(vec![1.23, 2.31], vec![3.21, 4.32]).unwrap();
        let exact = energy_evaluation(&h, offset, &params, EnergyMode::Exact).unwrap();
        assert!((38.5..=39.8).contains(&exact), "{exact}");
        let shots = energy_evaluation(&h, offset, &params, EnergyMode::Shots { shots: 8000, seed: 11 }).unwrap();
        assert!((shots - exact).abs() < 1.0);
    }

    #[test]
    fn zero_layer_energy_is_mean_objective() {
        let (qubo, _) = build_qubo(&fixtures::single_car().build_qcio(), 3.6, EncodingScheme::BoundedCoefficient)
            .unwrap();
        let (h, offset) = qubo_to_ising(&qubo);
        let mean = (0..256).map(|m| qubo.objective(&index_to_bits(m, 8)).unwrap()).sum::<f64>() / 256.0;
        let e = energy_evaluation(&h, offset, &QaoaParameters::new(vec![], vec![]).unwrap(), EnergyMode::Exact)
            .unwrap();
        assert!((e - mean).abs() < 1e-9);
    }

    #[test]
    fn exact_energy_equals_expectation_of_state() {
        let (h, offset) = single_car_hamiltonian();
        let params = QaoaParameters::new(vec![0.5, 1.5], vec![2.0, 0.25]).unwrap();
        let s = qaoa_state(&h, &params).unwrap();
        let amps = StateWeights::Amplitudes(s.amplitudes().iter().copied().enumerate().collect());
        let e = energy_evaluation(&h, offset, &params, EnergyMode::Exact).unwrap();
        assert!((expectation(&h, &amps).unwrap() + offset - e).abs() < 1e-10);
    }

    #[test]
    fn sampling_point_mass_and_binomial_bounds() {
        let s = Statevector::basis(3, 0).unwrap();
        let counts = sample_counts(&s, 500, 1, None, BitOrder::Device).unwrap();
        assert_eq!(counts.counts.len(), 1);
        assert_eq!(counts.counts["000"], 500);
        counts.validate().unwrap();

        let u = Statevector::uniform(2).unwrap();
        let counts = sample_counts(&u, 40000, 7, None, BitOrder::Device).unwrap();
        for key in ["00", "01", "10", "11"] {
            let got = counts.counts[key] as f64;
            assert!((got - 10000.0).abs() < 5.0 * 86.6, "{key}: {got}");
        }

        let noise = ReadoutNoiseModel::uniform(1, 0.1, 0.0).unwrap();
        let counts = sample_counts(&Statevector::basis(1, 0).unwrap(), 100000, 3, Some(&noise), BitOrder::Device)
            .unwrap();
        assert!((counts.counts["1"] as f64 - 10000.0).abs() < 5.0 * 94.9);
        assert!(sample_counts(&u, 0, 1, None, BitOrder::Device).is_err());
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let (h, _) = single_car_hamiltonian();
        let s = qaoa_state(&h, &QaoaParameters::new(vec![1.0], vec![2.0]).unwrap()).unwrap();
        let a = sample_counts(&s, 2000, 42, None, BitOrder::Device).unwrap();
        let b = sample_counts(&s, 2000, 42, None, BitOrder::Device).unwrap();
        let other = sample_counts(&s, 2000, 43, None, BitOrder::Device).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, other);
        let var = sample_counts(&s, 2000, 42, None, BitOrder::Variable).unwrap();
        for (k, v) in &a.counts {
            assert_eq!(var.counts[&k.chars().rev().collect::<String>()], *v);
        }
    }

    #[test]
    fn shot_estimates_converge() {
        let (h, offset) = single_car_hamiltonian();
        let energy = QaoaEnergy::new(&h, offset).unwrap();
        let params = QaoaParameters::new(vec![1.23, 2.31], vec![3.21, 4.32]).unwrap();
        let exact = energy.energy(&params, EnergyMode::Exact).unwrap();
        let median_error = |shots: u64| {
            let mut errs: Vec<f64> = (0..20)
                .map(|seed| (energy.energy(&params, EnergyMode::Shots { shots, seed }).unwrap() - exact).abs())
                .collect();
            errs.sort_by(f64::total_cmp);
            (errs[9] + errs[10]) / 2.0
        };
        let e3 = median_error(1_000);
        let e4 = median_error(10_000);
        let e5 = median_error(100_000);
        assert!(e3 >= e4 && e4 >= e5, "{e3} {e4} {e5}");
    }

    #[test]
    fn size_guards() {
        assert!(matches!(Statevector::uniform(MAX_QUBITS + 1), Err(Error::ResourceCap(_))));
        assert!(Statevector::from_amplitudes(vec![c(1.0, 0.0); 3]).is_err());
        assert!(matches!(Statevector::from_amplitudes(vec![c(1.0, 0.0); 2]), Err(Error::NotNormalized(_))));
        assert!(QaoaParameters::new(vec![1.0], vec![]).is_err());
        assert!(QaoaParameters::from_flat(&[1.0, 2.0, 3.0]).is_err());
        assert_eq!(QaoaParameters::from_flat(&[1.0, 2.0]).unwrap().to_flat(), vec![1.0, 2.0]);
    }

    fn random_hamiltonian(n: usize) -> impl Strategy<Value = IsingHamiltonian> {
        (
            proptest::collection::vec(-3.0f64..3.0, n),
            proptest::collection::vec(-3.0f64..3.0, n * (n - 1) / 2),
        )
            .prop_map(move |(z, zz)| {
                let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
                IsingHamiltonian::new(n, z, pairs.into_iter().zip(zz)).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn layers_are_unitary(
            n in 1usize..=12,
            seed in 0u64..1000,
            betas in proptest::collection::vec(-4.0f64..4.0, 3),
            gammas in proptest::collection::vec(-7.0f64..7.0, 3),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let zz: Vec<((usize, usize), f64)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|p| (p, rng.gen_range(-2.0..2.0)))
                .collect();
            let h = IsingHamiltonian::new(n, z, zz).unwrap();
            let s = qaoa_state(&h, &QaoaParameters::new(betas, gammas).unwrap()).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn diagonal_phase_equals_gate_product(h in (1usize..=6).prop_flat_map(random_hamiltonian), gamma in -3.0f64..3.0, beta in 0.0f64..3.0) {
            let n = h.n();
            let mut reference = Statevector::uniform(n).unwrap();
            reference.apply_mixer_layer(beta);
            let mut gates = reference.clone();
            reference.apply_phase_layer(&h, gamma).unwrap();
            for (&(i, j), &c) in h.zz().iter().rev() {
                gates.apply_rzz(i, j, 2.0 * gamma * c).unwrap();
            }
            for (i, &c) in h.z().iter().enumerate() {
                gates.apply_rz(i, 2.0 * gamma * c).unwrap();
            }
            for (a, b) in reference.amplitudes().iter().zip(gates.amplitudes()) {
                prop_assert!(close(*a, *b, 1e-10));
            }
        }
    }
}
