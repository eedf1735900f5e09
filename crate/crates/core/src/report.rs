//! Outcome distributions, fidelity, readout mitigation, solution tables and
//! experiment records.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use chrono::{DateTime, TimeZone};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bits::{convert_order, string_to_bits, string_to_index, BitOrder};
use crate::convert::{Encoding, Qubo};
use crate::error::{Error, Result};
use crate::hardware::{GateBudget, ReadoutNoiseModel};
use crate::model::{QuadraticProgram, FEASIBILITY_TOLERANCE};
use crate::sim::Counts;

const SUM_TOLERANCE: f64 = 1e-9;

/// Probabilities below this are dropped from mitigated output.
pub const TRUNCATION_TOLERANCE: f64 = 1e-12;

/// Largest register mitigated by dense inversion; larger ones are solved on
/// the observed outcomes only.
pub const DENSE_MITIGATION_QUBITS: usize = 20;

/// Most distinct outcomes accepted by the observed-subspace solve.
pub const MAX_SUBSPACE_KEYS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub bit_order: BitOrder,
    pub probabilities: BTreeMap<String, f64>,
}

impl Distribution {
    pub fn new(bit_order: BitOrder, probabilities: BTreeMap<String, f64>) -> Result<Self> {
        let d = Self {
            bit_order,
            probabilities,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let mut width = None;
        for (key, &p) in &self.probabilities {
            string_to_bits(key, self.bit_order)?;
            if *width.get_or_insert(key.len()) != key.len() {
                return Err(Error::InvalidDistribution(format!("bitstring '{key}' has a different width")));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!("probability {p} for '{key}'")));
            }
        }
        let total: f64 = self.probabilities.values().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(())
    }

    /// Width of the bitstrings, or 0 for an empty map.
    pub fn n(&self) -> usize {
        self.probabilities.keys().next().map_or(0, String::len)
    }

    pub fn reorder(&self, order: BitOrder) -> Self {
        Self {
            bit_order: order,
            probabilities: self
                .probabilities
                .iter()
                .map(|(k, &p)| (convert_order(k, self.bit_order, order), p))
                .collect(),
        }
    }

    fn to_dense(&self) -> Result<Vec<f64>> {
        let mut v = vec![0.0; 1usize << self.n()];
        for (k, &p) in &self.probabilities {
            v[string_to_index(k, self.bit_order)?] = p;
        }
        Ok(v)
    }

    /// Builds a distribution from `2^n` dense probabilities, dropping
    /// negligible entries.
    pub fn from_dense(probabilities: &[f64], order: BitOrder) -> Result<Self> {
        let n = probabilities.len().trailing_zeros() as usize;
        if probabilities.len() != 1 << n {
            return Err(Error::InvalidDistribution(format!(
                "{} probabilities is not a power of two",
                probabilities.len()
            )));
        }
        let d = Self::from_pairs(n, order, probabilities.iter().copied().enumerate());
        d.validate()?;
        Ok(d)
    }

    fn from_pairs(n: usize, order: BitOrder, pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        Self {
            bit_order: order,
            probabilities: pairs
                .into_iter()
                .filter(|(_, p)| *p > TRUNCATION_TOLERANCE)
                .map(|(m, p)| (crate::bits::index_to_string(m, n, order), p))
                .collect(),
        }
    }
}

pub fn counts_to_distribution(counts: &Counts) -> Result<Distribution> {
    let total: u64 = counts.counts.values().sum();
    if total == 0 {
        return Err(Error::InvalidDistribution("counts are empty".into()));
    }
    Distribution::new(
        counts.bit_order,
        counts
            .counts
            .iter()
            .map(|(k, &c)| (k.clone(), c as f64 / total as f64))
            .collect(),
    )
}

/// `sum_i sqrt(p_i q_i)` over the union of outcomes.
pub fn fidelity(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.bit_order != q.bit_order {
        return Err(Error::BitOrderMismatch(format!(
            "{} vs {}; reorder one distribution first",
            p.bit_order, q.bit_order
        )));
    }
    Ok(p.probabilities
        .iter()
        .filter_map(|(k, &pi)| q.probabilities.get(k).map(|&qi| (pi * qi).sqrt()))
        .sum::<f64>()
        .min(1.0))
}

/// The squared convention, `(sum_i sqrt(p_i q_i))^2`.
pub fn fidelity_squared(p: &Distribution, q: &Distribution) -> Result<f64> {
    fidelity(p, q).map(|f| f * f)
}

fn check_model(d: &Distribution, model: &ReadoutNoiseModel) -> Result<()> {
    if model.n() < d.n() {
        return Err(Error::InvalidNoise(format!(
            "noise model covers {} qubits, distribution has {}",
            model.n(),
            d.n()
        )));
    }
    Ok(())
}

/// Column `prepared`, row `measured`.
fn confusion(model: &ReadoutNoiseModel, k: usize) -> [[f64; 2]; 2] {
    let e = model.qubit(k);
    [[1.0 - e.p01, e.p10], [e.p01, 1.0 - e.p10]]
}

fn inverse_confusion(model: &ReadoutNoiseModel, k: usize) -> Result<[[f64; 2]; 2]> {
    let c = confusion(model, k);
    let det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
    if det.abs() < 1e-12 {
        return Err(Error::SingularConfusion(k));
    }
    Ok([[c[1][1] / det, -c[0][1] / det], [-c[1][0] / det, c[0][0] / det]])
}

fn apply_per_qubit(v: &mut [f64], k: usize, m: &[[f64; 2]; 2]) {
    let stride = 1usize << k;
    for block in v.chunks_mut(2 * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x0, x1) = (*a, *b);
            *a = m[0][0] * x0 + m[0][1] * x1;
            *b = m[1][0] * x0 + m[1][1] * x1;
        }
    }
}

/// Pushes `d` through the readout confusion matrices exactly.
pub fn apply_readout_noise(d: &Distribution, model: &ReadoutNoiseModel) -> Result<Distribution> {
    check_model(d, model)?;
    let n = d.n();
    let mut current: BTreeMap<usize, f64> = BTreeMap::new();
    for (k, &p) in &d.probabilities {
        current.insert(string_to_index(k, d.bit_order)?, p);
    }
    for k in 0..n {
        let c = confusion(model, k);
        let mut next: BTreeMap<usize, f64> = BTreeMap::new();
        for (&m, &p) in &current {
            let bit = (m >> k) & 1;
            for (out, row) in c.iter().enumerate() {
                let w = row[bit] * p;
                if w != 0.0 {
                    *next.entry((m & !(1 << k)) | (out << k)).or_insert(0.0) += w;
                }
            }
        }
        current = next;
    }
    Ok(Distribution::from_pairs(n, d.bit_order, current))
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Inverts the tensored readout confusion and projects the result back onto
/// the simplex.
pub fn mitigate_distribution(d: &Distribution, model: &ReadoutNoiseModel) -> Result<Distribution> {
    check_model(d, model)?;
    let n = d.n();
    let inverses = (0..n).map(|k| inverse_confusion(model, k)).collect::<Result<Vec<_>>>()?;
    if n <= DENSE_MITIGATION_QUBITS {
        let mut v = d.to_dense()?;
        for (k, inv) in inverses.iter().enumerate() {
            apply_per_qubit(&mut v, k, inv);
        }
        let projected = project_to_simplex(&v);
        return Ok(Distribution::from_pairs(n, d.bit_order, projected.into_iter().enumerate()));
    }
    // restrict the confusion operator to the observed outcomes and solve there
    let keys: Vec<usize> = d
        .probabilities
        .keys()
        .map(|k| string_to_index(k, d.bit_order))
        .collect::<Result<_>>()?;
    if keys.len() > MAX_SUBSPACE_KEYS {
        return Err(Error::ResourceCap(format!(
            "{} distinct outcomes exceed the {MAX_SUBSPACE_KEYS}-outcome mitigation limit",
            keys.len()
        )));
    }
    let confusions: Vec<[[f64; 2]; 2]> = (0..n).map(|k| confusion(model, k)).collect();
    let a = DMatrix::from_fn(keys.len(), keys.len(), |i, j| {
        confusions
            .iter()
            .enumerate()
            .map(|(k, c)| c[(keys[i] >> k) & 1][(keys[j] >> k) & 1])
            .product::<f64>()
    });
    let b = DVector::from_iterator(keys.len(), d.probabilities.values().copied());
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::InvalidDistribution("observed-outcome confusion matrix is singular".into()))?;
    let projected = project_to_simplex(x.as_slice());
    Ok(Distribution::from_pairs(n, d.bit_order, keys.into_iter().zip(projected)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub bitstring: String,
    /// Qubit values in variable order.
    pub bit_vector: Vec<u8>,
    pub integer_vector: Vec<i64>,
    pub probability: f64,
    pub cost: f64,
    pub is_feasible: bool,
}

/// The `k` most probable outcomes, decoded and scored.
pub fn annotate_top_k(
    d: &Distribution,
    k: usize,
    qubo: &Qubo,
    qcio: &QuadraticProgram,
    encoding: &Encoding,
) -> Result<Vec<TableRow>> {
    if k == 0 {
        return Err(Error::InvalidParameters("k must be at least 1".into()));
    }
    let mut entries: Vec<(&String, f64)> = d.probabilities.iter().map(|(s, &p)| (s, p)).collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    entries
        .into_iter()
        .take(k)
        .map(|(s, p)| {
            let bits = string_to_bits(s, d.bit_order)?;
            let integers = encoding.interpret(&bits)?;
            let as_f64: Vec<f64> = integers.iter().map(|&x| x as f64).collect();
            Ok(TableRow {
                bitstring: s.clone(),
                cost: qubo.objective(&bits)?,
                is_feasible: qcio.is_feasible(&as_f64, FEASIBILITY_TOLERANCE)?,
                bit_vector: bits,
                integer_vector: integers,
                probability: p,
            })
        })
        .collect()
}

pub const SCHEMA_VERSION: u32 = 1;

/// Everything needed to reproduce and interpret one sampling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub backend_label: String,
    pub problem_hash: String,
    pub rho: f64,
    pub p: usize,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub shots: u64,
    pub seed: Option<u64>,
    #[serde(default)]
    pub noise: Option<ReadoutNoiseModel>,
    pub counts: Counts,
    #[serde(default)]
    pub budget: Option<GateBudget>,
    #[serde(default)]
    pub notes: String,
}

impl ExperimentRecord {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                found: self.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        if self.betas.len() != self.p || self.gammas.len() != self.p {
            return Err(Error::InvalidRecord(format!(
                "p = {} but {} betas and {} gammas",
                self.p,
                self.betas.len(),
                self.gammas.len()
            )));
        }
        if self.counts.shots != self.shots {
            return Err(Error::InvalidRecord(format!(
                "record shots {} differ from counts shots {}",
                self.shots, self.counts.shots
            )));
        }
        self.counts.validate()
    }
}

/// Writes the record as JSON through a temporary file in the same directory.
pub fn save_record(path: &Path, record: &ExperimentRecord) -> Result<()> {
    record.validate()?;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    serde_json::to_writer_pretty(&mut tmp, record)?;
    tmp.write_all(b"\n")?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn load_record(path: &Path) -> Result<ExperimentRecord> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if let Some(found) = value.get("schema_version").and_then(|v| v.as_u64()) {
        if found != u64::from(SCHEMA_VERSION) {
            return Err(Error::SchemaVersion {
                found: found as u32,
                expected: SCHEMA_VERSION,
            });
        }
    }
    let record: ExperimentRecord =
        serde_json::from_value(value).map_err(|e| Error::InvalidRecord(e.to_string()))?;
    record.validate()?;
    Ok(record)
}

/// [`timestamp_stem`] of the local time now.
pub fn current_timestamp_stem() -> String {
    timestamp_stem(&chrono::Local::now())
}

/// File-stem timestamp such as `2022_09_22-14h47m`.
pub fn timestamp_stem<Tz: TimeZone>(t: &DateTime<Tz>) -> String
where
    Tz::Offset: std::fmt::Display,
{
    t.format("%Y_%m_%d-%Hh%Mm").to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::index_to_string;
    use crate::convert::{build_qubo, EncodingScheme};
    use crate::fixtures;
    use crate::hardware::ReadoutError;
    use crate::ising::{ising_energy, qubo_to_ising};
    use crate::sim::{qaoa_state, sample_counts, QaoaParameters, Statevector};
    use proptest::prelude::*;

    fn dist(pairs: &[(&str, f64)]) -> Distribution {
        Distribution::new(BitOrder::Device, pairs.iter().map(|&(k, p)| (k.to_string(), p)).collect()).unwrap()
    }

    fn counts(pairs: &[(&str, u64)]) -> Counts {
        Counts {
            shots: pairs.iter().map(|p| p.1).sum(),
            bit_order: BitOrder::Device,
            counts: pairs.iter().map(|&(k, c)| (k.to_string(), c)).collect(),
        }
    }

    #[test]
    fn counts_become_probabilities() {
        let d = counts_to_distribution(&counts(&[("00", 30), ("11", 10)])).unwrap();
        assert_eq!(d.probabilities["00"], 0.75);
        assert_eq!(d.probabilities["11"], 0.25);
        let single = counts_to_distribution(&counts(&[("101", 7)])).unwrap();
        assert_eq!(single.probabilities["101"], 1.0);
        let reference = counts_to_distribution(&counts(&[("00000000", 49), ("00010110", 7951)])).unwrap();
        assert_eq!(reference.probabilities["00000000"], 0.006125);
        assert!(counts_to_distribution(&counts(&[])).is_err());
    }

    #[test]
    fn distribution_validation() {
        let bad = |pairs: &[(&str, f64)]| {
            Distribution::new(BitOrder::Device, pairs.iter().map(|&(k, p)| (k.to_string(), p)).collect())
        };
        assert!(bad(&[("0", 0.5)]).is_err());
        assert!(bad(&[("0", 1.5), ("1", -0.5)]).is_err());
        assert!(bad(&[("0", 0.5), ("11", 0.5)]).is_err());
        assert!(bad(&[("0x", 1.0)]).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let p = dist(&[("0", 0.5), ("1", 0.5)]);
        assert!((fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&dist(&[("0", 1.0)]), &dist(&[("1", 1.0)])).unwrap(), 0.0);
        let f = fidelity(&p, &dist(&[("0", 1.0)])).unwrap();
        assert!((f - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((fidelity_squared(&p, &dist(&[("0", 1.0)])).unwrap() - 0.5).abs() < 1e-12);
        let other_order = p.reorder(BitOrder::Variable);
        assert!(matches!(fidelity(&p, &other_order), Err(Error::BitOrderMismatch(_))));
    }

    #[test]
    fn noiseless_mitigation_is_identity() {
        let d = dist(&[("00", 0.1), ("01", 0.2), ("11", 0.7)]);
        let m = mitigate_distribution(&d, &ReadoutNoiseModel::uniform(2, 0.0, 0.0).unwrap()).unwrap();
        for (k, p) in &d.probabilities {
            assert!((m.probabilities[k] - p).abs() < 1e-12);
        }
        assert_eq!(m.probabilities.len(), 3);
    }

    #[test]
    fn singular_and_short_models_are_rejected() {
        let d = dist(&[("00", 1.0)]);
        let singular = ReadoutNoiseModel::new(vec![
            ReadoutError { p01: 0.0, p10: 0.0 },
            ReadoutError { p01: 0.5, p10: 0.5 },
        ])
        .unwrap();
        assert!(matches!(mitigate_distribution(&d, &singular), Err(Error::SingularConfusion(1))));
        assert!(mitigate_distribution(&d, &ReadoutNoiseModel::uniform(1, 0.1, 0.1).unwrap()).is_err());
    }

    #[test]
    fn sampled_mitigation_recovers_point_mass() {
        let model = ReadoutNoiseModel::uniform(1, 0.1, 0.0).unwrap();
        let c = sample_counts(&Statevector::basis(1, 0).unwrap(), 100_000, 5, Some(&model), BitOrder::Device).unwrap();
        let m = mitigate_distribution(&counts_to_distribution(&c).unwrap(), &model).unwrap();
        assert!((m.probabilities["0"] - 1.0).abs() < 0.01);
    }

    #[test]
    fn subspace_mitigation_round_trip() {
        let n = DENSE_MITIGATION_QUBITS + 2;
        let mut errors = vec![ReadoutError { p01: 0.0, p10: 0.0 }; n];
        for k in [0, 1, 21] {
            errors[k] = ReadoutError { p01: 0.02, p10: 0.03 };
        }
        let model = ReadoutNoiseModel::new(errors).unwrap();
        let d = Distribution::new(
            BitOrder::Device,
            [(3usize, 0.6), (1 << 21, 0.4)]
                .into_iter()
                .map(|(m, p)| (index_to_string(m, n, BitOrder::Device), p))
                .collect(),
        )
        .unwrap();
        let noisy = apply_readout_noise(&d, &model).unwrap();
        assert!(noisy.probabilities.len() <= 16);
        let back = mitigate_distribution(&noisy, &model).unwrap();
        assert_eq!(back.probabilities.len(), 2);
        for (k, p) in &d.probabilities {
            assert!((back.probabilities[k] - p).abs() < 1e-9);
        }

        let everywhere = ReadoutNoiseModel::uniform(n, 0.01, 0.01).unwrap();
        let wide = Distribution::from_pairs(
            n,
            BitOrder::Device,
            (0..MAX_SUBSPACE_KEYS + 1).map(|m| (m, 1.0 / (MAX_SUBSPACE_KEYS + 1) as f64)),
        );
        assert!(mitigate_distribution(&wide, &everywhere).unwrap_err().is_resource_cap());
    }

    #[test]
    fn simplex_projection() {
        assert_eq!(project_to_simplex(&[0.5, 0.5]), vec![0.5, 0.5]);
        assert_eq!(project_to_simplex(&[1.2, -0.2]), vec![1.0, 0.0]);
        let p = project_to_simplex(&[0.6, 0.6, -0.1]);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15 && p[2] == 0.0);
    }

    fn single_car_pipeline() -> (Qubo, QuadraticProgram, Encoding) {
        let qcio = fixtures::single_car().build_qcio();
        let (qubo, enc) = build_qubo(&qcio, 3.6, EncodingScheme::BoundedCoefficient).unwrap();
        (qubo, qcio, enc)
    }

    #[test]
    fn reference_table_rows() {
        let (qubo, qcio, enc) = single_car_pipeline();
        let d = dist(&[("00010110", 0.3), ("00111110", 0.3), ("00000000", 0.4)]);
        let rows = annotate_top_k(&d, 20, &qubo, &qcio, &enc).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].bitstring, "00000000");
        // equal probabilities fall back to bitstring order
        assert_eq!(rows[1].bitstring, "00010110");
        assert_eq!(rows[1].bit_vector, vec![0, 1, 1, 0, 1, 0, 0, 0]);
        assert_eq!(rows[1].integer_vector, vec![2, 1, 1, 0]);
        assert!((rows[1].cost - 6.0).abs() < 1e-9);
        assert!(rows[1].is_feasible);
        assert_eq!(rows[2].integer_vector, vec![2, 3, 3, 0]);
        assert!((rows[2].cost - 79.6).abs() < 1e-9);
        assert!(!rows[2].is_feasible);

        let point = annotate_top_k(&dist(&[("00010110", 1.0)]), 5, &qubo, &qcio, &enc).unwrap();
        assert_eq!(point.len(), 1);
        assert_eq!(point[0].probability, 1.0);
    }

    #[test]
    fn table_cost_matches_hamiltonian() {
        let (qubo, qcio, enc) = single_car_pipeline();
        let (h, offset) = qubo_to_ising(&qubo);
        let s = qaoa_state(&h, &QaoaParameters::new(vec![0.4], vec![1.3]).unwrap()).unwrap();
        let c = sample_counts(&s, 4000, 2, None, BitOrder::Device).unwrap();
        let rows = annotate_top_k(&counts_to_distribution(&c).unwrap(), 256, &qubo, &qcio, &enc).unwrap();
        for row in rows {
            assert!((ising_energy(&h, &row.bit_vector).unwrap() + offset - row.cost).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_versus_sampled_fidelity() {
        let (qubo, _, _) = single_car_pipeline();
        let (h, _) = qubo_to_ising(&qubo);
        let params = QaoaParameters::new(vec![3.99890724, 2.72012026], vec![6.11303759, 1.75840967]).unwrap();
        let s = qaoa_state(&h, &params).unwrap();
        let exact = Distribution::from_dense(&s.probabilities(), BitOrder::Device).unwrap();
        let sampled = counts_to_distribution(&sample_counts(&s, 8000, 17, None, BitOrder::Device).unwrap()).unwrap();
        assert!(fidelity(&exact, &sampled).unwrap() >= 0.99);
    }

    fn sample_record() -> ExperimentRecord {
        ExperimentRecord {
            schema_version: SCHEMA_VERSION,
            timestamp: Some("2022_09_22-14h47m".into()),
            backend_label: "statevector".into(),
            problem_hash: "abc".into(),
            rho: 3.6,
            p: 1,
            betas: vec![0.1],
            gammas: vec![0.2],
            shots: 40,
            seed: Some(1),
            noise: Some(ReadoutNoiseModel::uniform(2, 0.01, 0.02).unwrap()),
            counts: counts(&[("00", 30), ("11", 10)]),
            budget: Some(GateBudget {
                cnot: 4,
                ..GateBudget::default()
            }),
            notes: String::new(),
        }
    }

    #[test]
    fn record_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        let record = sample_record();
        save_record(&path, &record).unwrap();
        assert_eq!(load_record(&path).unwrap(), record);

        let mut value: serde_json::Value = serde_json::to_value(&record).unwrap();
        value.as_object_mut().unwrap().remove("noise");
        std::fs::write(&path, value.to_string()).unwrap();
        assert_eq!(load_record(&path).unwrap().noise, None);

        value["counts"]["counts"]["00"] = serde_json::json!(31);
        std::fs::write(&path, value.to_string()).unwrap();
        assert!(matches!(load_record(&path), Err(Error::InvalidRecord(_))));

        value["schema_version"] = serde_json::json!(2);
        std::fs::write(&path, value.to_string()).unwrap();
        assert!(matches!(load_record(&path), Err(Error::SchemaVersion { found: 2, .. })));

        std::fs::write(&path, "{not json").unwrap();
        assert!(load_record(&path).is_err());
    }

    #[test]
    fn stem_format() {
        let t = chrono::Utc.with_ymd_and_hms(2022, 9, 22, 14, 47, 5).unwrap();
        assert_eq!(timestamp_stem(&t), "2022_09_22-14h47m");
    }

    fn random_distribution(n: usize) -> impl Strategy<Value = Distribution> {
        proptest::collection::vec(0.0f64..1.0, 1usize << n).prop_filter_map("nonzero", move |w| {
            let total: f64 = w.iter().sum();
            (total > 1e-6).then(|| {
                Distribution::from_pairs(n, BitOrder::Device, w.into_iter().map(|x| x / total).enumerate())
            })
        })
    }

    proptest! {
        #[test]
        fn fidelity_axioms(p in random_distribution(3), q in random_distribution(3)) {
            let f = fidelity(&p, &q).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!((f - fidelity(&q, &p).unwrap()).abs() < 1e-15);
            prop_assert!((fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-9);
            let dist2: f64 = (0..8)
                .map(|m| {
                    let k = index_to_string(m, 3, BitOrder::Device);
                    let a = p.probabilities.get(&k).copied().unwrap_or(0.0);
                    let b = q.probabilities.get(&k).copied().unwrap_or(0.0);
                    (a.sqrt() - b.sqrt()).powi(2)
                })
                .sum();
            // 1 - F is half the squared Hellinger distance
            prop_assert!((1.0 - f - dist2 / 2.0).abs() < 1e-9);
        }

        #[test]
        fn mitigation_inverts_exact_noise(
            d in random_distribution(3),
            errs in proptest::collection::vec((0.0f64..0.3, 0.0f64..0.3), 3),
        ) {
            let model = ReadoutNoiseModel::new(errs.into_iter().map(|(p01, p10)| ReadoutError { p01, p10 }).collect()).unwrap();
            let noisy = apply_readout_noise(&d, &model).unwrap();
            let back = mitigate_distribution(&noisy, &model).unwrap();
            for m in 0..8 {
                let k = index_to_string(m, 3, BitOrder::Device);
                let a = d.probabilities.get(&k).copied().unwrap_or(0.0);
                let b = back.probabilities.get(&k).copied().unwrap_or(0.0);
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
