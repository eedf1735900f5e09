//! Pauli-Z cost Hamiltonians and their energies.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{check_binary, BitOrder};
use crate::convert::Qubo;
use crate::error::{Error, Result};
use crate::model::fmt_coef;

/// Coefficients below this magnitude are dropped.
pub const PRUNE_TOLERANCE: f64 = 1e-12;

/// Tolerance on the total weight of a state passed to [`expectation`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliTerm {
    Z(usize),
    ZZ(usize, usize),
}

/// `sum h_ij Z_i Z_j + sum h_i Z_i`, with the identity part kept aside.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingHamiltonian {
    n: usize,
    zz: BTreeMap<(usize, usize), f64>,
    z: Vec<f64>,
    identity_coefficient: f64,
    order: Vec<PauliTerm>,
}

impl IsingHamiltonian {
    /// Builds a Hamiltonian from explicit terms. Pairs may be given in either
    /// orientation; repeated pairs are summed.
    pub fn new(n: usize, z: Vec<f64>, zz: impl IntoIterator<Item = ((usize, usize), f64)>) -> Result<Self> {
        if z.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: z.len() });
        }
        let mut pairs = BTreeMap::new();
        for ((i, j), h) in zz {
            if i == j || i >= n || j >= n {
                return Err(Error::InvalidProgram(format!("invalid coupling ({i}, {j}) on {n} qubits")));
            }
            *pairs.entry((i.min(j), i.max(j))).or_insert(0.0) += h;
        }
        let mut order: Vec<PauliTerm> = (0..n).map(PauliTerm::Z).collect();
        order.extend(pairs.keys().map(|&(i, j)| PauliTerm::ZZ(i, j)));
        let mut h = Self {
            n,
            zz: pairs,
            z,
            identity_coefficient: 0.0,
            order,
        };
        h.prune();
        Ok(h)
    }

    fn prune(&mut self) {
        self.zz.retain(|_, h| h.abs() >= PRUNE_TOLERANCE);
        for h in &mut self.z {
            if h.abs() < PRUNE_TOLERANCE {
                *h = 0.0;
            }
        }
        let (zz, z) = (&self.zz, &self.z);
        self.order.retain(|t| match *t {
            PauliTerm::Z(i) => z[i] != 0.0,
            PauliTerm::ZZ(i, j) => zz.contains_key(&(i, j)),
        });
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn zz(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.zz
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.identity_coefficient
    }

    /// Terms in rendering order.
    pub fn terms(&self) -> &[PauliTerm] {
        &self.order
    }

    pub fn coefficient(&self, term: PauliTerm) -> f64 {
        match term {
            PauliTerm::Z(i) => self.z.get(i).copied().unwrap_or(0.0),
            PauliTerm::ZZ(i, j) => self.zz.get(&(i.min(j), i.max(j))).copied().unwrap_or(0.0),
        }
    }

    pub fn num_z_terms(&self) -> usize {
        self.z.iter().filter(|h| **h != 0.0).count()
    }

    pub fn num_zz_terms(&self) -> usize {
        self.zz.len()
    }

    /// Energy of basis state `m` (bit `i` of `m` is qubit `i`), offset excluded.
    pub fn energy_index(&self, m: usize) -> f64 {
        let sign = |bit: usize| if bit & 1 == 0 { 1.0 } else { -1.0 };
        let mut e = 0.0;
        for (i, &h) in self.z.iter().enumerate() {
            if h != 0.0 {
                e += h * sign(m >> i);
            }
        }
        for (&(i, j), &h) in &self.zz {
            e += h * sign((m >> i) ^ (m >> j));
        }
        e
    }

    /// Energies of all `2^n` basis states, offset excluded.
    pub fn diagonal(&self) -> Vec<f64> {
        let z: Vec<(usize, f64)> = self.z.iter().copied().enumerate().filter(|(_, h)| *h != 0.0).collect();
        let zz: Vec<(usize, usize, f64)> = self.zz.iter().map(|(&(i, j), &h)| (i, j, h)).collect();
        (0..1usize << self.n)
            .into_par_iter()
            .with_min_len(1 << 12)
            .map(|m| {
                let mut e = 0.0;
                for &(i, h) in &z {
                    e += if (m >> i) & 1 == 0 { h } else { -h };
                }
                for &(i, j, h) in &zz {
                    e += if ((m >> i) ^ (m >> j)) & 1 == 0 { h } else { -h };
                }
                e
            })
            .collect()
    }

    /// One line per term, `coefficient * PAULISTRING`, signs split out after
    /// the first line.
    pub fn render(&self, order: BitOrder) -> String {
        let mut out = String::new();
        for (k, &term) in self.order.iter().enumerate() {
            let mut chars = vec!['I'; self.n];
            match term {
                PauliTerm::Z(i) => chars[i] = 'Z',
                PauliTerm::ZZ(i, j) => {
                    chars[i] = 'Z';
                    chars[j] = 'Z';
                }
            }
            if order == BitOrder::Device {
                chars.reverse();
            }
            let label: String = chars.into_iter().collect();
            let c = self.coefficient(term);
            if k == 0 {
                out.push_str(&format!("{} * {label}\n", fmt_coef(c)));
            } else {
                let sign = if c < 0.0 { '-' } else { '+' };
                out.push_str(&format!("{sign} {} * {label}\n", fmt_coef(c.abs())));
            }
        }
        out
    }
}

/// Substitutes `b_i = (1 - z_i) / 2`; returns the Hamiltonian and the scalar offset.
pub fn qubo_to_ising(q: &Qubo) -> (IsingHamiltonian, f64) {
    let n = q.n();
    let a = q.quadratic();
    let mut z = vec![0.0; n];
    let mut zz = BTreeMap::new();
    let mut offset = q.constant();
    let mut order = Vec::new();
    let mut seen = BTreeSet::new();
    let mut note = |t: PauliTerm, order: &mut Vec<PauliTerm>| {
        if seen.insert(t) {
            order.push(t);
        }
    };

    for (i, &l) in q.linear().iter().enumerate() {
        if l != 0.0 {
            z[i] -= l / 2.0;
            offset += l / 2.0;
            note(PauliTerm::Z(i), &mut order);
        }
    }
    for j in 0..n {
        for i in 0..=j {
            let c = a[(i, j)];
            if c == 0.0 {
                continue;
            }
            let w = c / 4.0;
            if i == j {
                // x^2 = x: both halves land on the same Z term
                offset += w;
                z[i] -= w;
                z[i] -= w;
                offset += w;
                note(PauliTerm::Z(i), &mut order);
            } else {
                *zz.entry((i, j)).or_insert(0.0) += w;
                z[i] -= w;
                z[j] -= w;
                offset += w;
                note(PauliTerm::ZZ(i, j), &mut order);
                note(PauliTerm::Z(i), &mut order);
                note(PauliTerm::Z(j), &mut order);
            }
        }
    }
    let mut h = IsingHamiltonian {
        n,
        zz,
        z,
        identity_coefficient: 0.0,
        order,
    };
    h.prune();
    (h, offset)
}

/// `sum h_ij z_i z_j + sum h_i z_i` with `z_i = 1 - 2 b_i`.
pub fn ising_energy(h: &IsingHamiltonian, b: &[u8]) -> Result<f64> {
    if b.len() != h.n {
        return Err(Error::LengthMismatch { expected: h.n, got: b.len() });
    }
    check_binary(b)?;
    Ok(h.energy_index(crate::bits::bits_to_index(b)))
}

/// A state given either as outcome probabilities or as amplitudes, keyed by
/// basis index.
#[derive(Debug, Clone, PartialEq)]
pub enum StateWeights {
    Probabilities(Vec<(usize, f64)>),
    Amplitudes(Vec<(usize, Complex64)>),
}

/// Weighted mean of basis energies, offset excluded.
pub fn expectation(h: &IsingHamiltonian, weights: &StateWeights) -> Result<f64> {
    let pairs: Vec<(usize, f64)> = match weights {
        StateWeights::Probabilities(p) => {
            if let Some(&(_, w)) = p.iter().find(|(_, w)| *w < 0.0 || !w.is_finite()) {
                return Err(Error::InvalidDistribution(format!("weight {w} is not a probability")));
            }
            p.clone()
        }
        StateWeights::Amplitudes(a) => a.iter().map(|&(m, c)| (m, c.norm_sqr())).collect(),
    };
    let limit = 1usize << h.n;
    if let Some(&(m, _)) = pairs.iter().find(|(m, _)| *m >= limit) {
        return Err(Error::DimensionMismatch { expected: limit, got: m + 1 });
    }
    let total: f64 = pairs.iter().map(|(_, w)| w).sum();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized(total));
    }
    Ok(pairs.iter().map(|&(m, w)| w * h.energy_index(m)).sum())
}
