//! Independent oracles and data builders shared by integration tests.
#![allow(dead_code)]

use num::{BigRational, ToPrimitive, Zero};
use paradoxlens_core::simulate::{generate, Noise, ScenarioConfig};
use paradoxlens_core::{Dataset, Group, Observation};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn dataset(rows: &[(Group, f64, f64)]) -> Dataset {
    let obs = rows
        .iter()
        .enumerate()
        .map(|(i, &(g, wi, wf))| Observation::new(format!("r{i}"), g, wi, wf).unwrap())
        .collect();
    Dataset::new(obs).unwrap()
}

/// The 8-row dataset used throughout: four boys and four girls split into
/// light and heavy subgroups with opposite group weights.
pub fn worked_rows() -> Vec<(Group, f64, f64)> {
    use Group::{One as B, Zero as G};
    vec![
        (B, 10.0, 13.0),
        (G, 11.0, 13.0),
        (G, 12.0, 14.0),
        (G, 13.0, 15.0),
        (B, 20.0, 21.0),
        (B, 21.0, 22.0),
        (B, 22.0, 23.0),
        (G, 23.0, 23.0),
    ]
}

pub fn worked() -> Dataset {
    dataset(&worked_rows())
}

/// Least-squares coefficients from the normal equations solved in exact
/// rational arithmetic. `None` when XᵀX is singular.
pub fn exact_ols(columns: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let p = columns.len();
    let q = |v: f64| BigRational::from_float(v).expect("finite");
    let cols: Vec<Vec<BigRational>> = columns.iter().map(|c| c.iter().map(|&v| q(v)).collect()).collect();
    let yq: Vec<BigRational> = y.iter().map(|&v| q(v)).collect();
    let dot = |a: &[BigRational], b: &[BigRational]| {
        a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
    };
    // Augmented [XᵀX | Xᵀy]
    let mut m: Vec<Vec<BigRational>> = (0..p)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..p).map(|j| dot(&cols[i], &cols[j])).collect();
            row.push(dot(&cols[i], &yq));
            row
        })
        .collect();
    for c in 0..p {
        let pivot = (c..p).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, pivot);
        let inv = BigRational::from_integer(1.into()) / m[c][c].clone();
        for v in m[c].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..p {
            if r != c && !m[r][c].is_zero() {
                let factor = m[r][c].clone();
                for k in c..=p {
                    let sub = &factor * &m[c][k];
                    m[r][k] = &m[r][k] - sub;
                }
            }
        }
    }
    Some(m.iter().map(|row| row[p].to_f64().unwrap()).collect())
}

/// Brute-force A1/A2 enumeration over explicit edges (left-closed bins, last
/// bin closed).
pub struct Enumerated {
    pub a1: f64,
    pub a2: f64,
    pub divergence: f64,
    pub alpha: f64,
    pub f1: Vec<f64>,
    pub f0: Vec<f64>,
    pub f: Vec<f64>,
}

pub fn enumerate(rows: &[(Group, f64, f64)], edges: &[f64]) -> Enumerated {
    let k = edges.len() - 1;
    let bin_of = |w: f64| {
        (0..k)
            .find(|&i| w >= edges[i] && (w < edges[i + 1] || (i == k - 1 && w <= edges[k])))
            .expect("covered")
    };
    let mut count = [vec![0.0; k], vec![0.0; k]];
    let mut total_gain = [vec![0.0; k], vec![0.0; k]];
    for &(g, wi, wf) in rows {
        let b = bin_of(wi);
        count[g.index()][b] += 1.0;
        total_gain[g.index()][b] += wf - wi;
    }
    let n = [count[0].iter().sum::<f64>(), count[1].iter().sum::<f64>()];
    let mean_gain = |g: usize| -> f64 { total_gain[g].iter().sum::<f64>() / n[g] };
    let a1 = mean_gain(1) - mean_gain(0);
    let f0: Vec<f64> = count[0].iter().map(|c| c / n[0]).collect();
    let f1: Vec<f64> = count[1].iter().map(|c| c / n[1]).collect();
    let f: Vec<f64> = (0..k).map(|i| (count[0][i] + count[1][i]) / (n[0] + n[1])).collect();
    let both: Vec<usize> = (0..k).filter(|&i| count[0][i] > 0.0 && count[1][i] > 0.0).collect();
    let retained: f64 = both.iter().map(|&i| f[i]).sum();
    let a2 = both
        .iter()
        .map(|&i| (total_gain[1][i] / count[1][i] - total_gain[0][i] / count[0][i]) * f[i] / retained)
        .sum();
    let divergence = 0.5 * (0..k).map(|i| (f1[i] - f0[i]).abs()).sum::<f64>();
    Enumerated {
        a1,
        a2,
        divergence,
        alpha: n[1] / (n[0] + n[1]),
        f1,
        f0,
        f,
    }
}

/// A dataset from one of several shapes: generator output with random
/// parameters, unstructured uniform values, or heavily tied integers.
pub fn random_dataset(rng: &mut ChaCha8Rng, n_range: (usize, usize)) -> Dataset {
    let n = rng.random_range(n_range.0..=n_range.1);
    match rng.random_range(0..3) {
        0 => {
            let n0 = rng.random_range(2..=n - 2);
            let noise = match rng.random_range(0..3) {
                0 => Noise::Gaussian,
                1 => Noise::Laplace,
                _ => Noise::DEFAULT_MIXTURE,
            };
            let cfg = ScenarioConfig {
                n0,
                n1: n - n0,
                mu0: rng.random_range(-100.0..100.0),
                mu1: rng.random_range(-100.0..100.0),
                sigma: rng.random_range(0.1..20.0),
                rho: rng.random_range(-1.0..=1.0),
                gain0: rng.random_range(-5.0..5.0),
                gain1: rng.random_range(-5.0..5.0),
                noise,
                seed: rng.random(),
            };
            generate(&cfg).unwrap().0
        }
        1 => {
            let scale = 10f64.powi(rng.random_range(-2..4));
            let shift = rng.random_range(-1000.0..1000.0);
            let rows: Vec<(Group, f64, f64)> = (0..n)
                .map(|i| {
                    let g = if i < 2 { Group::Zero } else if i < 4 { Group::One } else { random_group(rng) };
                    (g, shift + scale * rng.random::<f64>(), shift + scale * rng.random::<f64>())
                })
                .collect();
            dataset(&rows)
        }
        _ => {
            let rows: Vec<(Group, f64, f64)> = (0..n)
                .map(|i| {
                    let g = if i < 2 { Group::Zero } else if i < 4 { Group::One } else { random_group(rng) };
                    let wi = rng.random_range(0..12) as f64;
                    (g, wi, wi + rng.random_range(-3..=3) as f64)
                })
                .collect();
            dataset(&rows)
        }
    }
}

fn random_group(rng: &mut ChaCha8Rng) -> Group {
    if rng.random::<bool>() {
        Group::One
    } else {
        Group::Zero
    }
}
