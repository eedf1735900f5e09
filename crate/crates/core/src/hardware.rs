//! Gate accounting, coupling-map routing and the readout-noise model.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::IsingHamiltonian;

/// Undirected device connectivity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCouplingMap", into = "RawCouplingMap")]
pub struct CouplingMap {
    n_qubits: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawCouplingMap {
    n_qubits: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawCouplingMap> for CouplingMap {
    type Error = Error;

    fn try_from(raw: RawCouplingMap) -> Result<Self> {
        CouplingMap::new(raw.n_qubits, raw.edges)
    }
}

impl From<CouplingMap> for RawCouplingMap {
    fn from(map: CouplingMap) -> Self {
        RawCouplingMap {
            n_qubits: map.n_qubits,
            edges: map.edges.into_iter().collect(),
        }
    }
}

impl CouplingMap {
    /// Reversed and repeated edges are merged.
    pub fn new(n_qubits: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n_qubits || b >= n_qubits {
                return Err(Error::InvalidCouplingMap(format!(
                    "edge ({a}, {b}) outside {n_qubits} qubits"
                )));
            }
            if a == b {
                return Err(Error::InvalidCouplingMap(format!("self-loop on qubit {a}")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let mut adjacency = vec![Vec::new(); n_qubits];
        for &(a, b) in &set {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for row in &mut adjacency {
            row.sort_unstable();
        }
        Ok(Self {
            n_qubits,
            edges: set,
            adjacency,
        })
    }

    pub fn line(n: usize) -> Self {
        Self::new(n, (1..n).map(|k| (k - 1, k))).expect("valid line")
    }

    pub fn ring(n: usize) -> Self {
        let mut edges: Vec<(usize, usize)> = (1..n).map(|k| (k - 1, k)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        Self::new(n, edges).expect("valid ring")
    }

    pub fn full(n: usize) -> Self {
        Self::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).expect("valid full map")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn is_connected(&self) -> bool {
        if self.n_qubits == 0 {
            return true;
        }
        self.distances_from(0).iter().all(|d| d.is_some())
    }

    fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n_qubits];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(q) = queue.pop_front() {
            let d = dist[q].expect("queued nodes are reached");
            for &r in &self.adjacency[q] {
                if dist[r].is_none() {
                    dist[r] = Some(d + 1);
                    queue.push_back(r);
                }
            }
        }
        dist
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutError {
    /// Probability of reading 1 when 0 was prepared.
    pub p01: f64,
    /// Probability of reading 0 when 1 was prepared.
    pub p10: f64,
}

/// Independent per-qubit bit-flip readout errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNoise", into = "RawNoise")]
pub struct ReadoutNoiseModel {
    qubits: Vec<ReadoutError>,
}

#[derive(Serialize, Deserialize)]
struct RawNoise {
    qubits: Vec<ReadoutError>,
}

impl TryFrom<RawNoise> for ReadoutNoiseModel {
    type Error = Error;

    fn try_from(raw: RawNoise) -> Result<Self> {
        ReadoutNoiseModel::new(raw.qubits)
    }
}

impl From<ReadoutNoiseModel> for RawNoise {
    fn from(model: ReadoutNoiseModel) -> Self {
        RawNoise { qubits: model.qubits }
    }
}

impl ReadoutNoiseModel {
    pub fn new(qubits: Vec<ReadoutError>) -> Result<Self> {
        for (k, e) in qubits.iter().enumerate() {
            for (label, p) in [("p01", e.p01), ("p10", e.p10)] {
                if !(0.0..=0.5).contains(&p) {
                    return Err(Error::InvalidNoise(format!("qubit {k}: {label} = {p} outside [0, 0.5]")));
                }
            }
        }
        Ok(Self { qubits })
    }

    pub fn uniform(n: usize, p01: f64, p10: f64) -> Result<Self> {
        Self::new(vec![ReadoutError { p01, p10 }; n])
    }

    pub fn n(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubit(&self, k: usize) -> ReadoutError {
        self.qubits[k]
    }

    pub fn qubits(&self) -> &[ReadoutError] {
        &self.qubits
    }

    /// Applies one independent readout flip per bit of `m`.
    pub fn flip<R: Rng>(&self, m: usize, rng: &mut R) -> usize {
        let mut out = m;
        for (k, e) in self.qubits.iter().enumerate() {
            let bit = (m >> k) & 1;
            let p = if bit == 0 { e.p01 } else { e.p10 };
            if rng.gen::<f64>() < p {
                out ^= 1 << k;
            }
        }
        out
    }
}

/// Gate counts of the abstract QAOA circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalGateProfile {
    pub rzz: usize,
    pub rz: usize,
    pub rx: usize,
    pub h: usize,
}

pub fn logical_gate_profile(h: &IsingHamiltonian, p: usize) -> LogicalGateProfile {
    LogicalGateProfile {
        rzz: p * h.num_zz_terms(),
        rz: p * h.num_z_terms(),
        rx: p * h.n(),
        h: h.n(),
    }
}

/// Hardware gate counts after decomposition to CNOT, SX and virtual RZ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateBudget {
    pub cnot: usize,
    pub single_qubit_hw: usize,
    pub rz_virtual: usize,
    pub swaps: usize,
    pub depth: usize,
}

/// Native gates on physical qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HwGate {
    Sx(usize),
    Rz(usize),
    Cnot(usize, usize),
}

#[derive(Debug, Default)]
struct Emitter {
    gates: Vec<HwGate>,
    swaps: usize,
}

impl Emitter {
    fn hadamard(&mut self, q: usize) {
        self.gates.extend([HwGate::Rz(q), HwGate::Sx(q), HwGate::Rz(q)]);
    }

    fn rx(&mut self, q: usize) {
        self.gates
            .extend([HwGate::Rz(q), HwGate::Sx(q), HwGate::Rz(q), HwGate::Sx(q), HwGate::Rz(q)]);
    }

    fn rzz(&mut self, a: usize, b: usize) {
        self.gates.extend([HwGate::Cnot(a, b), HwGate::Rz(b), HwGate::Cnot(a, b)]);
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.gates.extend([HwGate::Cnot(a, b), HwGate::Cnot(b, a), HwGate::Cnot(a, b)]);
        self.swaps += 1;
    }

    fn budget(&self, width: usize) -> GateBudget {
        let mut b = GateBudget {
            swaps: self.swaps,
            depth: circuit_depth(&self.gates, width),
            ..GateBudget::default()
        };
        for g in &self.gates {
            match g {
                HwGate::Sx(_) => b.single_qubit_hw += 1,
                HwGate::Rz(_) => b.rz_virtual += 1,
                HwGate::Cnot(..) => b.cnot += 1,
            }
        }
        b
    }
}

/// Critical path length with CNOT and SX costing one step and RZ none.
pub fn circuit_depth(gates: &[HwGate], width: usize) -> usize {
    let mut time = vec![0usize; width];
    for g in gates {
        match *g {
            HwGate::Sx(q) => time[q] += 1,
            HwGate::Rz(_) => {}
            HwGate::Cnot(a, b) => {
                let t = time[a].max(time[b]) + 1;
                time[a] = t;
                time[b] = t;
            }
        }
    }
    time.into_iter().max().unwrap_or(0)
}

fn fully_connected_gates(h: &IsingHamiltonian, p: usize) -> Emitter {
    let mut e = Emitter::default();
    for q in 0..h.n() {
        e.hadamard(q);
    }
    for _ in 0..p {
        for &(i, j) in h.zz().keys() {
            e.rzz(i, j);
        }
        for (i, &c) in h.z().iter().enumerate() {
            if c != 0.0 {
                e.gates.push(HwGate::Rz(i));
            }
        }
        for q in 0..h.n() {
            e.rx(q);
        }
    }
    e
}

/// Native gate list of the circuit on all-to-all hardware.
pub fn fully_connected_circuit(h: &IsingHamiltonian, p: usize) -> Vec<HwGate> {
    fully_connected_gates(h, p).gates
}

pub fn count_fully_connected(h: &IsingHamiltonian, p: usize) -> GateBudget {
    fully_connected_gates(h, p).budget(h.n())
}

/// One step of a routed schedule, on physical qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ScheduleOp {
    Swap { a: usize, b: usize },
    Interaction { layer: usize, i: usize, j: usize, a: usize, b: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutedCircuit {
    pub budget: GateBudget,
    pub schedule: Vec<ScheduleOp>,
    pub final_layout: Vec<usize>,
    pub gates: Vec<HwGate>,
}

impl RoutedCircuit {
    /// Replays the schedule from the identity layout and checks that every
    /// coupling of `h` meets on adjacent qubits exactly once per layer.
    pub fn realizes(&self, h: &IsingHamiltonian, map: &CouplingMap, p: usize) -> bool {
        let mut phys_to_log: Vec<Option<usize>> = (0..map.n_qubits()).map(|q| (q < h.n()).then_some(q)).collect();
        let mut seen: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); p];
        for op in &self.schedule {
            match *op {
                ScheduleOp::Swap { a, b } => {
                    if !map.are_adjacent(a, b) {
                        return false;
                    }
                    phys_to_log.swap(a, b);
                }
                ScheduleOp::Interaction { layer, i, j, a, b } => {
                    let ok = map.are_adjacent(a, b)
                        && layer < p
                        && phys_to_log[a] == Some(i)
                        && phys_to_log[b] == Some(j)
                        && seen[layer].insert((i.min(j), i.max(j)));
                    if !ok {
                        return false;
                    }
                }
            }
        }
        let expected: BTreeSet<(usize, usize)> = h.zz().keys().copied().collect();
        seen.iter().all(|s| *s == expected)
    }
}

/// Greedy stochastic router. The layout starts as the identity; within each
/// layer couplings are visited in a seeded random order, and a non-adjacent
/// pair is joined by swapping a randomly chosen endpoint along a random
/// shortest path. Swaps persist into later layers.
pub fn route(h: &IsingHamiltonian, map: &CouplingMap, p: usize, seed: u64) -> Result<RoutedCircuit> {
    if map.n_qubits() < h.n() {
        return Err(Error::InvalidCouplingMap(format!(
            "map has {} qubits but the Hamiltonian needs {}",
            map.n_qubits(),
            h.n()
        )));
    }
    if !map.is_connected() {
        return Err(Error::Disconnected);
    }
    let width = map.n_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log_to_phys: Vec<usize> = (0..h.n()).collect();
    let mut phys_to_log: Vec<Option<usize>> = (0..width).map(|q| (q < h.n()).then_some(q)).collect();
    let mut e = Emitter::default();
    let mut schedule = Vec::new();
    let couplings: Vec<(usize, usize)> = h.zz().keys().copied().collect();

    for q in 0..h.n() {
        e.hadamard(q);
    }
    for layer in 0..p {
        let mut order = couplings.clone();
        order.shuffle(&mut rng);
        for (i, j) in order {
            let (mover, target) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
            let dist = map.distances_from(log_to_phys[target]);
            let mut at = log_to_phys[mover];
            loop {
                let d = dist[at].expect("connected map");
                if d <= 1 {
                    break;
                }
                let steps: Vec<usize> = map
                    .neighbors(at)
                    .iter()
                    .copied()
                    .filter(|&r| dist[r] == Some(d - 1))
                    .collect();
                let next = *steps.choose(&mut rng).expect("shortest path continues");
                e.swap(at, next);
                schedule.push(ScheduleOp::Swap { a: at, b: next });
                phys_to_log.swap(at, next);
                for (q, l) in [(at, phys_to_log[at]), (next, phys_to_log[next])] {
                    if let Some(l) = l {
                        log_to_phys[l] = q;
                    }
                }
                at = next;
            }
            let (a, b) = (log_to_phys[i], log_to_phys[j]);
            e.rzz(a, b);
            schedule.push(ScheduleOp::Interaction { layer, i, j, a, b });
        }
        for (i, &c) in h.z().iter().enumerate() {
            if c != 0.0 {
                e.gates.push(HwGate::Rz(log_to_phys[i]));
            }
        }
        for &q in &log_to_phys {
            e.rx(q);
        }
    }
    Ok(RoutedCircuit {
        budget: e.budget(width),
        schedule,
        final_layout: log_to_phys,
        gates: e.gates,
    })
}

/// A single layer of [`route`].
pub fn route_layer(h: &IsingHamiltonian, map: &CouplingMap, seed: u64) -> Result<RoutedCircuit> {
    route(h, map, 1, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedBudget {
    pub seed: u64,
    #[serde(flatten)]
    pub budget: GateBudget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestOfSeeds {
    pub best: SeedBudget,
    pub all: Vec<SeedBudget>,
}

/// Routes once per seed and keeps the fewest CNOTs, ties to the lower seed.
pub fn best_of_seeds(h: &IsingHamiltonian, map: &CouplingMap, p: usize, seeds: &[u64]) -> Result<BestOfSeeds> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameters("at least one seed is required".into()));
    }
    let all = seeds
        .par_iter()
        .map(|&seed| route(h, map, p, seed).map(|r| SeedBudget { seed, budget: r.budget }))
        .collect::<Result<Vec<_>>>()?;
    let best = *all
        .iter()
        .min_by_key(|s| (s.budget.cnot, s.seed))
        .expect("nonempty");
    Ok(BestOfSeeds { best, all })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use crate::convert::{build_qubo, EncodingScheme};
    use crate::fixtures;
    use crate::ising::qubo_to_ising;
    use proptest::prelude::*;

    fn single_car_hamiltonian() -> IsingHamiltonian {
        let (qubo, _) = build_qubo(&fixtures::single_car().build_qcio(), 3.6, EncodingScheme::BoundedCoefficient)
            .unwrap();
        qubo_to_ising(&qubo).0
    }

    fn dense_hamiltonian(n: usize) -> IsingHamiltonian {
        let pairs: Vec<((usize, usize), f64)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| ((i, j), 1.0))).collect();
        IsingHamiltonian::new(n, vec![0.5; n], pairs).unwrap()
    }

    #[test]
    fn coupling_map_construction() {
        let map = CouplingMap::new(3, [(1, 0), (0, 1), (2, 1)]).unwrap();
        assert_eq!(map.edges().len(), 2);
        assert!(map.is_connected());
        assert!(CouplingMap::new(2, [(0, 2)]).is_err());
        assert!(CouplingMap::new(2, [(1, 1)]).is_err());
        assert!(!CouplingMap::new(4, [(0, 1), (2, 3)]).unwrap().is_connected());
        assert_eq!(CouplingMap::ring(5).edges().len(), 5);
        assert_eq!(CouplingMap::full(5).edges().len(), 10);
        let json = serde_json::to_string(&CouplingMap::line(3)).unwrap();
        assert_eq!(json, r#"{"n_qubits":3,"edges":[[0,1],[1,2]]}"#);
        let back: CouplingMap = serde_json::from_str(r#"{"n_qubits":3,"edges":[[1,0],[2,1],[0,1]]}"#).unwrap();
        assert_eq!(back, CouplingMap::line(3));
        assert!(serde_json::from_str::<CouplingMap>(r#"{"n_qubits":2,"edges":[[0,5]]}"#).is_err());
    }

    #[test]
    fn noise_model_validation() {
        assert!(ReadoutNoiseModel::uniform(2, 0.6, 0.0).is_err());
        assert!(ReadoutNoiseModel::uniform(2, -0.1, 0.0).is_err());
        let m = ReadoutNoiseModel::uniform(2, 0.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(m.flip(3, &mut rng), 3);
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<ReadoutNoiseModel>(&json).unwrap(), m);
    }

    #[test]
    fn logical_profile() {
        let h = single_car_hamiltonian();
        assert_eq!(logical_gate_profile(&h, 1), LogicalGateProfile { rzz: 16, rz: 8, rx: 8, h: 8 });
        assert_eq!(logical_gate_profile(&h, 0), LogicalGateProfile { rzz: 0, rz: 0, rx: 0, h: 8 });
        let diagonal_only = IsingHamiltonian::new(3, vec![1.0, 2.0, 3.0], []).unwrap();
        assert_eq!(logical_gate_profile(&diagonal_only, 2).rzz, 0);
    }

    #[test]
    fn fully_connected_budget() {
        let h = single_car_hamiltonian();
        let b1 = count_fully_connected(&h, 1);
        assert_eq!(b1.cnot, 32);
        assert_eq!(b1.single_qubit_hw, 8 + 16);
        assert_eq!(b1.rz_virtual, 16 + 16 + 8 + 24);
        assert_eq!(b1.swaps, 0);
        assert_eq!(count_fully_connected(&h, 2).cnot, 64);
        let b0 = count_fully_connected(&h, 0);
        assert_eq!((b0.cnot, b0.single_qubit_hw, b0.depth), (0, 8, 1));
    }

    #[test]
    fn depth_of_small_circuits() {
        // H on two qubits, one RZZ, mixers: 1 + 2 + 2
        let h = IsingHamiltonian::new(2, vec![0.0; 2], [((0, 1), 1.0)]).unwrap();
        assert_eq!(count_fully_connected(&h, 1).depth, 5);
        let gates = [HwGate::Cnot(0, 1), HwGate::Rz(1), HwGate::Cnot(1, 2), HwGate::Sx(0)];
        assert_eq!(circuit_depth(&gates, 3), 2);
    }

    #[test]
    fn line_of_three_needs_one_swap() {
        let h = IsingHamiltonian::new(3, vec![0.0; 3], [((0, 2), 1.0)]).unwrap();
        for seed in 0..10 {
            let r = route_layer(&h, &CouplingMap::line(3), seed).unwrap();
            assert_eq!(r.budget.swaps, 1);
            assert_eq!(r.budget.cnot, 5);
            assert!(r.realizes(&h, &CouplingMap::line(3), 1));
        }
    }

    #[test]
    fn routing_errors() {
        let h = single_car_hamiltonian();
        assert!(matches!(route(&h, &CouplingMap::line(4), 1, 0), Err(Error::InvalidCouplingMap(_))));
        let split = CouplingMap::new(8, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(route(&h, &split, 1, 0), Err(Error::Disconnected)));
        assert!(best_of_seeds(&h, &CouplingMap::full(8), 1, &[]).is_err());
    }

    #[test]
    fn full_map_needs_no_swaps() {
        let h = single_car_hamiltonian();
        let best = best_of_seeds(&h, &CouplingMap::full(8), 2, &(0..10).collect::<Vec<_>>()).unwrap();
        assert!(best.all.iter().all(|s| s.budget.swaps == 0 && s.budget.cnot == 64));
        assert_eq!(best.best.seed, 0);
        assert_eq!(best.best.budget.cnot, count_fully_connected(&h, 2).cnot);
    }

    #[test]
    fn best_of_seeds_is_the_minimum() {
        let h = single_car_hamiltonian();
        let map = CouplingMap::line(27);
        let seeds: Vec<u64> = (0..75).collect();
        let result = best_of_seeds(&h, &map, 1, &seeds).unwrap();
        let min = result.all.iter().map(|s| s.budget.cnot).min().unwrap();
        let max = result.all.iter().map(|s| s.budget.cnot).max().unwrap();
        assert_eq!(result.best.budget.cnot, min);
        assert!(max > min, "routing showed no variance across seeds");
        let first_min = result.all.iter().find(|s| s.budget.cnot == min).unwrap().seed;
        assert_eq!(result.best.seed, first_min);
        assert_eq!(result, best_of_seeds(&h, &map, 1, &seeds).unwrap());
    }

    /// Fewest swaps over every coupling order, endpoint choice and shortest path.
    fn exhaustive_min_swaps(map: &CouplingMap, layout: Vec<usize>, remaining: Vec<(usize, usize)>) -> usize {
        if remaining.is_empty() {
            return 0;
        }
        let mut best = usize::MAX;
        for k in 0..remaining.len() {
            let (i, j) = remaining[k];
            let mut rest = remaining.clone();
            rest.remove(k);
            for (mover, target) in [(i, j), (j, i)] {
                let dist = map.distances_from(layout[target]);
                let mut stack = vec![(layout.clone(), 0usize)];
                while let Some((lay, swaps)) = stack.pop() {
                    let at = lay[mover];
                    let d = dist[at].unwrap();
                    if d <= 1 {
                        best = best.min(swaps + exhaustive_min_swaps(map, lay, rest.clone()));
                        continue;
                    }
                    for &next in map.neighbors(at) {
                        if dist[next] == Some(d - 1) {
                            let mut lay = lay.clone();
                            if let Some(other) = lay.iter().position(|&q| q == next) {
                                lay[other] = at;
                            }
                            lay[mover] = next;
                            stack.push((lay, swaps + 1));
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn router_reaches_exhaustive_optimum_on_small_line() {
        let h = dense_hamiltonian(4);
        let map = CouplingMap::line(4);
        let oracle = exhaustive_min_swaps(&map, (0..4).collect(), h.zz().keys().copied().collect());
        let best = (0..100).map(|seed| route_layer(&h, &map, seed).unwrap().budget.swaps).min().unwrap();
        assert_eq!(best, oracle);
    }

    #[test]
    fn routing_cost_grows_with_coupling_density() {
        let map = CouplingMap::line(8);
        let seeds: Vec<u64> = (0..20).collect();
        let sparse = IsingHamiltonian::new(8, vec![0.0; 8], (1..8).map(|k| ((k - 1, k), 1.0))).unwrap();
        let sparse_best = best_of_seeds(&sparse, &map, 1, &seeds).unwrap().best.budget;
        let dense_best = best_of_seeds(&dense_hamiltonian(8), &map, 1, &seeds).unwrap().best.budget;
        assert_eq!(sparse_best.swaps, 0);
        assert!(dense_best.swaps > 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn routed_schedule_is_complete_and_budget_consistent(
            n in 2usize..=7,
            extra in 0usize..4,
            density in 0.2f64..1.0,
            topology in 0u8..3,
            p in 1usize..=3,
            seed in 0u64..500,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let pairs: Vec<((usize, usize), f64)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|_| rng.gen::<f64>() < density)
                .map(|pair| (pair, 1.0))
                .collect();
            let h = IsingHamiltonian::new(n, vec![1.0; n], pairs).unwrap();
            let width = n + extra;
            let map = match topology {
                0 => CouplingMap::line(width),
                1 => CouplingMap::ring(width),
                _ => CouplingMap::full(width),
            };
            let routed = route(&h, &map, p, seed).unwrap();
            let baseline = count_fully_connected(&h, p);
            prop_assert!(routed.realizes(&h, &map, p));
            prop_assert_eq!(routed.budget.cnot, 2 * p * h.num_zz_terms() + 3 * routed.budget.swaps);
            prop_assert!(routed.budget.cnot >= baseline.cnot);
            prop_assert_eq!(routed.budget.cnot == baseline.cnot, routed.budget.swaps == 0);
            prop_assert_eq!(routed.budget.single_qubit_hw, baseline.single_qubit_hw);
            prop_assert_eq!(&routed, &route(&h, &map, p, seed).unwrap());
        }
    }
}
