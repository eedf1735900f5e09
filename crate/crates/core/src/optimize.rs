//! Nelder–Mead descent, seeded multi-start and landscape grids for the QAOA
//! energy.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{EnergyMode, QaoaEnergy, QaoaParameters};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    pub max_fev: usize,
    /// Stop once every vertex lies within this distance (max norm) of the best.
    pub xtol: f64,
    /// ... and the vertex values differ by less than this.
    pub ftol: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_fev: 1000,
            xtol: 1e-4,
            ftol: 1e-6,
            initial_step: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationRun {
    pub initial: Vec<f64>,
    pub initial_value: f64,
    #[serde(rename = "final")]
    pub final_point: Vec<f64>,
    pub final_value: f64,
    pub nfev: usize,
    pub converged: bool,
    pub seed: Option<u64>,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

struct Budgeted<F> {
    f: F,
    nfev: usize,
    max_fev: usize,
}

impl<F: FnMut(&[f64]) -> Result<f64>> Budgeted<F> {
    /// `Ok(None)` once the evaluation budget is spent.
    fn eval(&mut self, x: &[f64]) -> Result<Option<f64>> {
        if self.nfev >= self.max_fev {
            return Ok(None);
        }
        let v = (self.f)(x)?;
        self.nfev += 1;
        if !v.is_finite() {
            return Err(Error::NonFinite(self.nfev));
        }
        Ok(Some(v))
    }
}

fn affine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b - a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Unconstrained Nelder–Mead simplex descent.
pub fn minimize_local<F>(f: F, x0: &[f64], options: &NelderMeadOptions) -> Result<OptimizationRun>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if options.max_fev == 0 {
        return Err(Error::InvalidParameters("max_fev must be at least 1".into()));
    }
    let d = x0.len();
    let mut fun = Budgeted {
        f,
        nfev: 0,
        max_fev: options.max_fev,
    };
    let f0 = fun.eval(x0)?.expect("budget is at least one evaluation");
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
    let mut converged = d == 0;

    'outer: {
        for k in 0..d {
            let mut x = x0.to_vec();
            x[k] += options.initial_step;
            match fun.eval(&x)? {
                Some(v) => simplex.push((x, v)),
                None => break 'outer,
            }
        }
        if d == 0 {
            break 'outer;
        }
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = &simplex[0];
            let diameter = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            let spread = simplex[d].1 - best.1;
            if diameter < options.xtol && spread < options.ftol {
                converged = true;
                break;
            }
            let mut centroid = vec![0.0; d];
            for (x, _) in &simplex[..d] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / d as f64;
                }
            }
            let worst = simplex[d].clone();
            let xr = affine(&centroid, &worst.0, -REFLECT);
            let Some(fr) = fun.eval(&xr)? else { break };
            if fr < simplex[0].1 {
                let xe = affine(&centroid, &xr, EXPAND);
                let Some(fe) = fun.eval(&xe)? else {
                    simplex[d] = (xr, fr);
                    break;
                };
                simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[d - 1].1 {
                simplex[d] = (xr, fr);
                continue;
            }
            if fr < worst.1 {
                let xc = affine(&centroid, &xr, CONTRACT);
                let Some(fc) = fun.eval(&xc)? else { break };
                if fc <= fr {
                    simplex[d] = (xc, fc);
                    continue;
                }
            } else {
                let xc = affine(&centroid, &worst.0, CONTRACT);
                let Some(fc) = fun.eval(&xc)? else { break };
                if fc < worst.1 {
                    simplex[d] = (xc, fc);
                    continue;
                }
            }
            let anchor = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x = affine(&anchor, &vertex.0, SHRINK);
                let Some(v) = fun.eval(&x)? else { break 'outer };
                *vertex = (x, v);
            }
        }
    }

    let (final_point, final_value) = simplex
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("simplex holds the start point");
    Ok(OptimizationRun {
        initial: x0.to_vec(),
        initial_value: f0,
        final_point,
        final_value,
        nfev: fun.nfev,
        converged,
        seed: None,
    })
}

/// Start `k` of a seeded multi-start: betas in `[0, pi]^p`, gammas in `[0, 2pi]^p`,
/// flattened as `[betas..., gammas...]`.
pub fn start_point(seed: u64, k: u64, p: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    let betas: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..=PI)).collect();
    let gammas: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..=2.0 * PI)).collect();
    betas.into_iter().chain(gammas).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiStart {
    pub runs: Vec<OptimizationRun>,
    pub best_index: usize,
}

impl MultiStart {
    pub fn best(&self) -> &OptimizationRun {
        &self.runs[self.best_index]
    }
}

/// Independent local descents from `n_starts` seeded random points. In shot
/// mode start `k` samples with seed `shot_seed ^ k`.
pub fn multi_start(
    energy: &QaoaEnergy,
    p: usize,
    n_starts: usize,
    seed: u64,
    mode: EnergyMode,
    options: &NelderMeadOptions,
) -> Result<MultiStart> {
    if n_starts == 0 {
        return Err(Error::InvalidParameters("n_starts must be at least 1".into()));
    }
    let runs = (0..n_starts as u64)
        .into_par_iter()
        .map(|k| {
            let mode = match mode {
                EnergyMode::Exact => EnergyMode::Exact,
                EnergyMode::Shots { shots, seed } => EnergyMode::Shots { shots, seed: seed ^ k },
            };
            let x0 = start_point(seed, k, p);
            let mut run = minimize_local(|x| energy.energy_flat(x, mode), &x0, options)?;
            run.seed = Some(seed);
            Ok(run)
        })
        .collect::<Result<Vec<_>>>()?;
    let best_index = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.final_value.total_cmp(&b.1.final_value).then(a.0.cmp(&b.0)))
        .map(|(k, _)| k)
        .expect("at least one run");
    Ok(MultiStart { runs, best_index })
}

/// Exact `p = 1` energies on an inclusive grid over `[0, pi] x [0, 2 pi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    /// `energies[j][k]` is the energy at `(betas[j], gammas[k])`.
    pub energies: Vec<Vec<f64>>,
}

impl Landscape {
    pub fn min(&self) -> f64 {
        self.energies.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }
}

fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    let step = (stop - start) / (points - 1) as f64;
    (0..points).map(|k| start + step * k as f64).collect()
}

pub fn landscape_grid(energy: &QaoaEnergy, beta_points: usize, gamma_points: usize) -> Result<Landscape> {
    if beta_points < 2 || gamma_points < 2 {
        return Err(Error::InvalidParameters("landscape needs at least 2 points per axis".into()));
    }
    let betas = linspace(0.0, PI, beta_points);
    let gammas = linspace(0.0, 2.0 * PI, gamma_points);
    let energies = betas
        .par_iter()
        .map(|&beta| {
            gammas
                .iter()
                .map(|&gamma| energy.energy(&QaoaParameters::new(vec![beta], vec![gamma])?, EnergyMode::Exact))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Landscape {
        betas,
        gammas,
        energies,
    })
}

/// Maps an angle into `[0, 2 pi)`.
pub fn canonicalize_angle(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}
