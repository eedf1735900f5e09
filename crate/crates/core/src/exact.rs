//! Exhaustive oracles: QUBO and integer-program minimization and the search
//! for the smallest penalty whose minimizers are all feasible.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::index_to_bits;
use crate::convert::{build_qubo, EncodingScheme, Qubo};
use crate::error::{Error, Result};
use crate::model::{QuadraticProgram, FEASIBILITY_TOLERANCE};

/// Largest QUBO enumerated by [`brute_force_qubo`].
pub const MAX_QUBO_VARS: usize = 24;

/// Most complete assignments [`brute_force_integer`] will visit.
pub const MAX_INTEGER_LEAVES: u64 = 10_000_000;

/// Most block assignments plus convolution steps spent tabulating constraint
/// activities for the penalty search.
pub const MAX_TABLE_WORK: u64 = 100_000_000;

/// Most distinct activity vectors kept while tabulating.
pub const MAX_TABLE_ENTRIES: usize = 10_000_000;

pub const DEFAULT_TIE_CAP: usize = 16;

/// Values within this distance of the minimum count as ties.
pub const TIE_TOLERANCE: f64 = 1e-9;

const GRAY_BITS: usize = 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSolution {
    /// Minimizers in lexicographic order, at most the tie cap of them.
    pub argmin: Vec<Vec<i64>>,
    pub min_value: f64,
    pub evaluated_count: u64,
    /// Number of minimizers, including those not listed.
    pub tie_count: u64,
}

fn symmetric_offdiag(a: &nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64> {
    let n = a.nrows();
    nalgebra::DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => a[(i, j)],
        std::cmp::Ordering::Greater => a[(j, i)],
        std::cmp::Ordering::Equal => 0.0,
    })
}

/// Visits every assignment of `q` with its objective value, split into chunks
/// that fix the high bits and walk the low bits in Gray-code order.
fn qubo_scan<A, I, V, M>(q: &Qubo, init: I, visit: V, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, usize, f64) + Sync,
    M: Fn(A, A) -> A + Sync + Send,
{
    let n = q.n();
    let low = n.min(GRAY_BITS);
    let s = symmetric_offdiag(q.quadratic());
    let diag_lin: Vec<f64> = (0..n).map(|k| q.linear()[k] + q.quadratic()[(k, k)]).collect();
    (0..1usize << (n - low))
        .into_par_iter()
        .fold(&init, |mut acc, high| {
            let base = high << low;
            let bits = index_to_bits(base, n);
            let mut value = q.objective_unchecked(&bits);
            // field[k]: change in value when bit k goes 0 -> 1
            let mut field: Vec<f64> = (0..n)
                .map(|k| diag_lin[k] + (0..n).filter(|&j| bits[j] == 1).map(|j| s[(k, j)]).sum::<f64>())
                .collect();
            let mut m = base;
            visit(&mut acc, m, value);
            for t in 1..1usize << low {
                let k = t.trailing_zeros() as usize;
                let on = (m >> k) & 1 == 0;
                m ^= 1 << k;
                let sign = if on { 1.0 } else { -1.0 };
                value += sign * field[k];
                for (j, f) in field.iter_mut().enumerate() {
                    *f += sign * s[(j, k)];
                }
                visit(&mut acc, m, value);
            }
            acc
        })
        .reduce(&init, merge)
}

fn bit_reverse(m: usize, n: usize) -> usize {
    if n == 0 {
        0
    } else {
        m.reverse_bits() >> (usize::BITS as usize - n)
    }
}

/// Indices whose objective is within [`TIE_TOLERANCE`] of the minimum, with
/// the exactly recomputed minimum.
fn qubo_ties(q: &Qubo) -> Result<(f64, Vec<usize>)> {
    if q.n() > MAX_QUBO_VARS {
        return Err(Error::ResourceCap(format!(
            "QUBO with {} variables exceeds the {MAX_QUBO_VARS}-variable brute-force limit",
            q.n()
        )));
    }
    let approx_min = qubo_scan(q, || f64::INFINITY, |acc, _, v| *acc = acc.min(v), f64::min);
    // incremental sums drift slightly; recheck near-minimal candidates exactly
    let slack = 1e-7 * approx_min.abs().max(1.0);
    let candidates = qubo_scan(
        q,
        Vec::new,
        |acc: &mut Vec<usize>, m, v| {
            if v <= approx_min + slack {
                acc.push(m);
            }
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    );
    let exact: Vec<(usize, f64)> = candidates
        .into_iter()
        .map(|m| (m, q.objective_unchecked(&index_to_bits(m, q.n()))))
        .collect();
    let min = exact.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let ties = exact
        .into_iter()
        .filter(|e| e.1 <= min + TIE_TOLERANCE)
        .map(|e| e.0)
        .collect();
    Ok((min, ties))
}

/// Enumerates all `2^n` assignments. Ties are listed in lexicographic order of
/// the bit vectors, truncated at `tie_cap`.
pub fn brute_force_qubo(q: &Qubo, tie_cap: usize) -> Result<ExactSolution> {
    let n = q.n();
    let (min_value, mut ties) = qubo_ties(q)?;
    let tie_count = ties.len() as u64;
    ties.sort_by_key(|&m| bit_reverse(m, n));
    ties.truncate(tie_cap);
    Ok(ExactSolution {
        argmin: ties
            .into_iter()
            .map(|m| index_to_bits(m, n).into_iter().map(i64::from).collect())
            .collect(),
        min_value,
        evaluated_count: 1u64 << n,
        tie_count,
    })
}

/// Search plan for bounded integer programs: variables in constraints (or
/// coupled to another unconstrained variable) are enumerated depth first with
/// constraint pruning; the rest are minimized one at a time at each leaf.
struct Plan {
    enumerated: Vec<usize>,
    free: Vec<usize>,
    diag: Vec<f64>,
    sym: nalgebra::DMatrix<f64>,
    linear: Vec<f64>,
    constant: f64,
    lower: Vec<i64>,
    upper: Vec<i64>,
    constraints: Vec<(Vec<f64>, f64)>,
    /// `reach[k][c]`: (min, max) of constraint `c` over enumerated vars `k..`.
    reach: Vec<Vec<(f64, f64)>>,
}

struct Leaf<'a> {
    x: &'a [i64],
    h: &'a [f64],
    value: f64,
}

/// Per-variable minimizers of the separable part at a leaf.
struct FreeMin {
    value: f64,
    choices: Vec<Vec<i64>>,
    ties: u64,
}

impl Plan {
    fn new(qp: &QuadraticProgram) -> Self {
        let n = qp.num_vars();
        let constrained: Vec<bool> = (0..n)
            .map(|i| qp.constraints().iter().any(|c| c.coefficients[i] != 0.0))
            .collect();
        let sym = symmetric_offdiag(qp.quadratic());
        let free: Vec<usize> = (0..n)
            .filter(|&i| !constrained[i] && (0..n).all(|j| j == i || constrained[j] || sym[(i, j)] == 0.0))
            .collect();
        let enumerated: Vec<usize> = (0..n).filter(|i| !free.contains(i)).collect();
        let lower: Vec<i64> = qp.variables().iter().map(|v| v.lower).collect();
        let upper: Vec<i64> = qp.variables().iter().map(|v| v.upper).collect();
        let constraints: Vec<(Vec<f64>, f64)> =
            qp.constraints().iter().map(|c| (c.coefficients.clone(), c.rhs)).collect();
        let mut reach = vec![vec![(0.0, 0.0); constraints.len()]; enumerated.len() + 1];
        for k in (0..enumerated.len()).rev() {
            let v = enumerated[k];
            for (c, (coeffs, _)) in constraints.iter().enumerate() {
                let (a, b) = (coeffs[v] * lower[v] as f64, coeffs[v] * upper[v] as f64);
                let (lo, hi) = reach[k + 1][c];
                reach[k][c] = (lo + a.min(b), hi + a.max(b));
            }
        }
        Self {
            enumerated,
            free,
            diag: (0..n).map(|i| qp.quadratic()[(i, i)]).collect(),
            sym,
            linear: qp.linear().to_vec(),
            constant: qp.constant(),
            lower,
            upper,
            constraints,
            reach,
        }
    }

    fn free_min(&self, h: &[f64], tie_cap: usize) -> FreeMin {
        let mut value = 0.0;
        let mut choices = vec![Vec::new()];
        let mut ties = 1u64;
        for &f in &self.free {
            let (q, b, lo, hi) = (self.diag[f], h[f], self.lower[f], self.upper[f]);
            let g = |x: i64| q * (x * x) as f64 + b * x as f64;
            let (best, minimizers, count) = if q == 0.0 && b == 0.0 {
                (0.0, (lo..=hi).take(tie_cap.max(1)).collect(), (hi - lo + 1) as u64)
            } else {
                let mut cand = vec![lo, hi];
                if q > 0.0 {
                    let vertex = -b / (2.0 * q);
                    for x in [vertex.floor(), vertex.ceil()] {
                        if x >= lo as f64 && x <= hi as f64 {
                            cand.push(x as i64);
                        }
                    }
                }
                cand.sort_unstable();
                cand.dedup();
                let best = cand.iter().map(|&x| g(x)).fold(f64::INFINITY, f64::min);
                let mins: Vec<i64> = cand.into_iter().filter(|&x| g(x) <= best + TIE_TOLERANCE).collect();
                let count = mins.len() as u64;
                (best, mins, count)
            };
            value += best;
            ties = ties.saturating_mul(count);
            let mut next = Vec::new();
            for prefix in &choices {
                for &x in &minimizers {
                    let mut p = prefix.clone();
                    p.push(x);
                    next.push(p);
                    if next.len() >= tie_cap.max(1) {
                        break;
                    }
                }
                if next.len() >= tie_cap.max(1) {
                    break;
                }
            }
            choices = next;
        }
        FreeMin { value, choices, ties }
    }

    fn full_vector(&self, x: &[i64], free_values: &[i64]) -> Vec<i64> {
        let mut out = x.to_vec();
        for (&f, &v) in self.free.iter().zip(free_values) {
            out[f] = v;
        }
        out
    }

    /// Folds over all leaves in parallel, splitting on the first enumerated
    /// variables. Fails once more than `cap` leaves have been visited.
    fn fold_leaves<A, I, V, M>(&self, cap: u64, init: I, visit: V, merge: M) -> Result<(A, u64)>
    where
        A: Send,
        I: Fn() -> A + Sync,
        V: Fn(&mut A, &Leaf) + Sync,
        M: Fn(A, A) -> A + Sync,
    {
        let split = self.enumerated.len().min(2);
        let mut prefixes: Vec<Vec<i64>> = vec![Vec::new()];
        for &v in &self.enumerated[..split] {
            prefixes = prefixes
                .into_iter()
                .flat_map(|p| {
                    (self.lower[v]..=self.upper[v]).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        let leaves = AtomicU64::new(0);
        let nodes = AtomicU64::new(0);
        let result = prefixes
            .par_iter()
            .map(|prefix| -> Result<A> {
                let mut acc = init();
                let mut x = self.lower.clone();
                let mut h: Vec<f64> = self.linear.clone();
                let mut value = self.constant;
                let mut activity = vec![0.0; self.constraints.len()];
                if !self.reachable(0, &activity) {
                    return Ok(acc);
                }
                for (k, &val) in prefix.iter().enumerate() {
                    let v = self.enumerated[k];
                    self.assign(v, val, &mut x, &mut h, &mut value, &mut activity);
                    if !self.reachable(k + 1, &activity) {
                        return Ok(acc);
                    }
                }
                let mut walker = Walker {
                    plan: self,
                    cap,
                    leaves: &leaves,
                    nodes: &nodes,
                    visit: &visit,
                    acc: &mut acc,
                };
                walker.descend(split, &mut x, &h, value, &activity)?;
                Ok(acc)
            })
            .try_reduce(&init, |a, b| Ok(merge(a, b)))?;
        Ok((result, leaves.load(Ordering::Relaxed)))
    }

    fn assign(&self, v: usize, val: i64, x: &mut [i64], h: &mut [f64], value: &mut f64, activity: &mut [f64]) {
        let xf = val as f64;
        x[v] = val;
        *value += self.diag[v] * xf * xf + h[v] * xf;
        if xf != 0.0 {
            for (j, hj) in h.iter_mut().enumerate() {
                *hj += self.sym[(j, v)] * xf;
            }
            for (c, (coeffs, _)) in self.constraints.iter().enumerate() {
                activity[c] += coeffs[v] * xf;
            }
        }
    }

    fn reachable(&self, k: usize, activity: &[f64]) -> bool {
        self.constraints.iter().enumerate().all(|(c, (_, rhs))| {
            let (lo, hi) = self.reach[k][c];
            activity[c] + lo <= rhs + FEASIBILITY_TOLERANCE && activity[c] + hi >= rhs - FEASIBILITY_TOLERANCE
        })
    }
}

struct Walker<'a, A, V> {
    plan: &'a Plan,
    cap: u64,
    leaves: &'a AtomicU64,
    nodes: &'a AtomicU64,
    visit: &'a V,
    acc: &'a mut A,
}

impl<A, V: Fn(&mut A, &Leaf)> Walker<'_, A, V> {
    fn descend(&mut self, k: usize, x: &mut [i64], h: &[f64], value: f64, activity: &[f64]) -> Result<()> {
        let plan = self.plan;
        if k == plan.enumerated.len() {
            if self.leaves.fetch_add(1, Ordering::Relaxed) >= self.cap {
                return Err(Error::ResourceCap(format!(
                    "exhaustive search exceeds {} assignments",
                    self.cap
                )));
            }
            (self.visit)(
                self.acc,
                &Leaf {
                    x,
                    h,
                    value,
                },
            );
            return Ok(());
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.cap.saturating_mul(16) {
            return Err(Error::ResourceCap(format!(
                "exhaustive search exceeds {} partial assignments",
                self.cap.saturating_mul(16)
            )));
        }
        let v = plan.enumerated[k];
        for val in plan.lower[v]..=plan.upper[v] {
            let mut h2 = h.to_vec();
            let mut value2 = value;
            let mut act2 = activity.to_vec();
            plan.assign(v, val, x, &mut h2, &mut value2, &mut act2);
            if !plan.reachable(k + 1, &act2) {
                continue;
            }
            self.descend(k + 1, x, &h2, value2, &act2)?;
        }
        x[v] = plan.lower[v];
        Ok(())
    }
}

/// Exact minimum over the integer box, restricted to feasible points when the
/// program has constraints.
pub fn brute_force_integer(qp: &QuadraticProgram) -> Result<ExactSolution> {
    brute_force_integer_with(qp, DEFAULT_TIE_CAP, MAX_INTEGER_LEAVES)
}

pub fn brute_force_integer_with(qp: &QuadraticProgram, tie_cap: usize, leaf_cap: u64) -> Result<ExactSolution> {
    let plan = Plan::new(qp);
    let (min, evaluated) = plan.fold_leaves(
        leaf_cap,
        || f64::INFINITY,
        |acc, leaf| *acc = acc.min(leaf.value + plan.free_min(leaf.h, 1).value),
        f64::min,
    )?;
    if evaluated == 0 || !min.is_finite() {
        return Err(Error::Infeasible);
    }
    let ((argmin, tie_count), _) = plan.fold_leaves(
        leaf_cap,
        || (Vec::new(), 0u64),
        |acc: &mut (Vec<Vec<i64>>, u64), leaf| {
            let free = plan.free_min(leaf.h, tie_cap);
            if leaf.value + free.value <= min + TIE_TOLERANCE {
                acc.1 = acc.1.saturating_add(free.ties);
                acc.0.extend(free.choices.iter().map(|c| plan.full_vector(leaf.x, c)));
                if acc.0.len() > 4 * tie_cap.max(1) {
                    acc.0.sort();
                    acc.0.truncate(tie_cap);
                }
            }
        },
        |mut a, b| {
            a.0.extend(b.0);
            (a.0, a.1.saturating_add(b.1))
        },
    )?;
    let mut argmin = argmin;
    argmin.sort();
    argmin.dedup();
    argmin.truncate(tie_cap);
    let as_f64: Vec<f64> = argmin[0].iter().map(|&v| v as f64).collect();
    Ok(ExactSolution {
        min_value: qp.evaluate(&as_f64)?,
        argmin,
        evaluated_count: evaluated,
        tie_count,
    })
}

/// How the penalized problem is solved while searching for a penalty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltySearchForm {
    /// Minimize over the integer box directly.
    Integer,
    /// Minimize the encoded QUBO.
    Qubo(EncodingScheme),
}

/// Minimum objective of a constrained program for every attainable vector of
/// integer constraint activities `s = Cx`.
///
/// Variables split into blocks that share no quadratic term; each block is
/// enumerated on its own and the per-block tables are combined by min-plus
/// convolution over activities.
pub struct ActivityTable {
    rhs: Vec<f64>,
    entries: Vec<(Vec<i64>, f64)>,
}

fn coupling_blocks(qp: &QuadraticProgram) -> Vec<Vec<usize>> {
    let n = qp.num_vars();
    let a = qp.quadratic();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for j in 0..n {
        for i in 0..j {
            if a[(i, j)] != 0.0 {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        blocks.entry(r).or_default().push(i);
    }
    blocks.into_values().collect()
}

impl ActivityTable {
    pub fn new(qcio: &QuadraticProgram) -> Result<Self> {
        let integral = |v: f64| v.fract() == 0.0 && v.abs() < 1e15;
        for c in qcio.constraints() {
            if !c.coefficients.iter().all(|&a| integral(a)) || !integral(c.rhs) {
                return Err(Error::InvalidProgram(format!(
                    "constraint '{}' must have integer coefficients for integer penalty search",
                    c.name
                )));
            }
        }
        let m = qcio.constraints().len();
        let coeff: Vec<Vec<i64>> = qcio
            .constraints()
            .iter()
            .map(|c| c.coefficients.iter().map(|&a| a as i64).collect())
            .collect();
        let a = qcio.quadratic();
        let vars = qcio.variables();
        let cap_error = || Error::ResourceCap(format!("activity tabulation exceeds {MAX_TABLE_WORK} steps"));
        let mut work = 0u64;
        let mut table: HashMap<Vec<i64>, f64> = HashMap::from([(vec![0; m], qcio.constant())]);
        for block in coupling_blocks(qcio) {
            let mut local: HashMap<Vec<i64>, f64> = HashMap::new();
            let mut x: Vec<i64> = block.iter().map(|&v| vars[v].lower).collect();
            loop {
                work += 1;
                if work > MAX_TABLE_WORK {
                    return Err(cap_error());
                }
                let mut value = 0.0;
                for (p, &i) in block.iter().enumerate() {
                    let xi = x[p] as f64;
                    value += qcio.linear()[i] * xi;
                    for (q, &j) in block.iter().enumerate().skip(p) {
                        value += a[(i, j)] * xi * x[q] as f64;
                    }
                }
                let s: Vec<i64> = coeff
                    .iter()
                    .map(|row| block.iter().zip(&x).map(|(&v, &xv)| row[v] * xv).sum())
                    .collect();
                let slot = local.entry(s).or_insert(f64::INFINITY);
                *slot = slot.min(value);
                let mut p = 0;
                while p < block.len() && x[p] == vars[block[p]].upper {
                    x[p] = vars[block[p]].lower;
                    p += 1;
                }
                if p == block.len() {
                    break;
                }
                x[p] += 1;
            }
            work = work.saturating_add((table.len() as u64).saturating_mul(local.len() as u64));
            if work > MAX_TABLE_WORK {
                return Err(cap_error());
            }
            let mut next: HashMap<Vec<i64>, f64> = HashMap::new();
            for (s, &v) in &table {
                for (t, &w) in &local {
                    let key: Vec<i64> = s.iter().zip(t).map(|(a, b)| a + b).collect();
                    let slot = next.entry(key).or_insert(f64::INFINITY);
                    *slot = slot.min(v + w);
                }
            }
            if next.len() > MAX_TABLE_ENTRIES {
                return Err(Error::ResourceCap(format!(
                    "more than {MAX_TABLE_ENTRIES} distinct constraint activities"
                )));
            }
            table = next;
        }
        let mut entries: Vec<(Vec<i64>, f64)> = table.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Self {
            rhs: qcio.constraints().iter().map(|c| c.rhs).collect(),
            entries,
        })
    }

    /// Minimum of the penalized objective and whether every minimizer is feasible.
    pub fn penalized_minimum(&self, rho: f64) -> (f64, bool) {
        let values: Vec<(f64, bool)> = self
            .entries
            .iter()
            .map(|(s, v)| {
                let violation: f64 = s.iter().zip(&self.rhs).map(|(&a, b)| (a as f64 - b).powi(2)).sum();
                (v + rho * violation, violation == 0.0)
            })
            .collect();
        let min = values.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
        let feasible = values
            .iter()
            .filter(|v| v.0 <= min + TIE_TOLERANCE)
            .all(|v| v.1);
        (min, feasible)
    }
}

/// True when every minimizer of the penalized problem satisfies the constraints.
pub fn penalty_is_feasible(qcio: &QuadraticProgram, form: PenaltySearchForm, rho: f64) -> Result<bool> {
    match form {
        PenaltySearchForm::Integer => Ok(ActivityTable::new(qcio)?.penalized_minimum(rho).1),
        PenaltySearchForm::Qubo(scheme) => qubo_penalty_feasible(qcio, scheme, rho),
    }
}

fn qubo_penalty_feasible(qcio: &QuadraticProgram, scheme: EncodingScheme, rho: f64) -> Result<bool> {
    let (qubo, encoding) = build_qubo(qcio, rho, scheme)?;
    let (_, ties) = qubo_ties(&qubo)?;
    for m in ties {
        let p = encoding.interpret_f64(&index_to_bits(m, qubo.n()))?;
        if !qcio.is_feasible(&p, FEASIBILITY_TOLERANCE)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest `rho_start + k * rho_step <= rho_max` at which every minimizer of
/// the penalized problem is feasible.
pub fn min_feasible_penalty(
    qcio: &QuadraticProgram,
    form: PenaltySearchForm,
    rho_start: f64,
    rho_step: f64,
    rho_max: f64,
) -> Result<f64> {
    if rho_start.is_nan() || rho_start < 0.0 || rho_step.is_nan() || rho_step <= 0.0 || rho_max.is_nan() || rho_max < rho_start {
        return Err(Error::InvalidParameters(format!(
            "invalid penalty grid start {rho_start}, step {rho_step}, max {rho_max}"
        )));
    }
    let table = match form {
        PenaltySearchForm::Integer => Some(ActivityTable::new(qcio)?),
        PenaltySearchForm::Qubo(_) => None,
    };
    let mut k = 0u64;
    loop {
        // round away accumulated binary noise so 5.1 prints as 5.1
        let rho = ((rho_start + k as f64 * rho_step) * 1e12).round() / 1e12;
        if rho > rho_max + 1e-12 {
            return Err(Error::NoFeasiblePenalty(rho_max));
        }
        let feasible = match (&table, form) {
            (Some(t), _) => t.penalized_minimum(rho).1,
            (None, PenaltySearchForm::Qubo(scheme)) => qubo_penalty_feasible(qcio, scheme, rho)?,
            (None, PenaltySearchForm::Integer) => unreachable!("table built for integer form"),
        };
        if feasible {
            return Ok(rho);
        }
        k += 1;
    }
}
