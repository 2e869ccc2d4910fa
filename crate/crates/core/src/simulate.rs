//! Synthetic two-group pre/post data with known targets.
//!
//! Per group `s`:
//!
//! ```text
//! w_initial ~ Normal(mu_s, sigma²)
//! w_final   = mu_s + rho·(w_initial − mu_s) + gain_s + e,   Var(e) = sigma²(1 − rho²)
//! ```
//!
//! so `w_final` has the same spread as `w_initial`, each group's mean moves by
//! exactly `gain_s`, and at a fixed baseline the groups differ by
//! `(mu1 − mu0)(1 − rho) + (gain1 − gain0)`.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binning::BinningSpec;
use crate::data::{Dataset, Group, Observation};
use crate::decomposition::{compute_a1, compute_a2};
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};
use crate::supermodel::upgrade;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum Noise {
    Gaussian,
    Laplace,
    /// Two normal components whose means are `separation` component standard
    /// deviations apart; `weight` is the share of the lower component.
    Mixture { separation: f64, weight: f64 },
}

impl Noise {
    pub const DEFAULT_MIXTURE: Noise = Noise::Mixture {
        separation: 6.0,
        weight: 0.5,
    };

    /// One draw with mean 0 and variance 1.
    fn standardized<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Noise::Gaussian => StandardNormal.sample(rng),
            Noise::Laplace => {
                let magnitude: f64 = Exp1.sample(rng);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                sign * magnitude * std::f64::consts::FRAC_1_SQRT_2
            }
            Noise::Mixture { separation, weight } => {
                let tau = 1.0 / (1.0 + weight * (1.0 - weight) * separation * separation).sqrt();
                let z: f64 = StandardNormal.sample(rng);
                let center = if rng.random::<f64>() < weight {
                    -(1.0 - weight) * separation * tau
                } else {
                    weight * separation * tau
                };
                center + tau * z
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n0: usize,
    pub n1: usize,
    pub mu0: f64,
    pub mu1: f64,
    pub sigma: f64,
    pub rho: f64,
    pub gain0: f64,
    pub gain1: f64,
    pub noise: Noise,
    pub seed: u64,
}

impl ScenarioConfig {
    /// Both groups unchanged on average while their baselines differ.
    pub fn lord_null() -> Self {
        ScenarioConfig {
            n0: 2000,
            n1: 2000,
            mu0: 54.0,
            mu1: 64.0,
            sigma: 5.0,
            rho: 0.7,
            gain0: 0.0,
            gain1: 0.0,
            noise: Noise::Gaussian,
            seed: 7,
        }
    }

    /// A true gain difference of 2 without regression to the mean.
    pub fn gain() -> Self {
        ScenarioConfig {
            rho: 1.0,
            gain1: 2.0,
            ..Self::lord_null()
        }
    }

    /// Group one gains less on average but more at any fixed baseline.
    pub fn confounded() -> Self {
        ScenarioConfig {
            mu0: 50.0,
            mu1: 70.0,
            rho: 0.5,
            gain1: -2.0,
            ..Self::lord_null()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &'static str, message: &str| {
            Err(Error::Config {
                field,
                message: message.to_string(),
            })
        };
        if self.n0 < 2 {
            return bad("n0", "each group needs at least 2 subjects");
        }
        if self.n1 < 2 {
            return bad("n1", "each group needs at least 2 subjects");
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return bad("sigma", "must be finite and > 0");
        }
        if !(self.rho.is_finite() && (-1.0..=1.0).contains(&self.rho)) {
            return bad("rho", "must lie within [-1, 1]");
        }
        for (field, v) in [
            ("mu0", self.mu0),
            ("mu1", self.mu1),
            ("gain0", self.gain0),
            ("gain1", self.gain1),
        ] {
            if !v.is_finite() {
                return bad(field, "must be finite");
            }
        }
        if let Noise::Mixture { separation, weight } = self.noise {
            if !(separation.is_finite() && separation >= 0.0) {
                return bad("noise", "mixture separation must be finite and >= 0");
            }
            if !(weight > 0.0 && weight < 1.0) {
                return bad("noise", "mixture weight must lie in (0, 1)");
            }
        }
        Ok(())
    }

    pub fn noise_sd(&self) -> f64 {
        self.sigma * (1.0 - self.rho * self.rho).max(0.0).sqrt()
    }

    pub fn truth(&self) -> ScenarioTruth {
        let sigma2 = self.sigma * self.sigma;
        ScenarioTruth {
            true_a1: self.gain1 - self.gain0,
            true_ancova_group_coef: (self.mu1 - self.mu0) * (1.0 - self.rho) + (self.gain1 - self.gain0),
            true_b0: self.rho,
            true_residual_variance_submodel: self.rho * self.rho * sigma2 + self.noise_sd().powi(2),
            true_residual_variance_upgraded: self.noise_sd().powi(2),
        }
    }
}

/// Population targets implied by a [`ScenarioConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTruth {
    pub true_a1: f64,
    pub true_ancova_group_coef: f64,
    pub true_b0: f64,
    /// `Var(w_final | s)`
    pub true_residual_variance_submodel: f64,
    /// `Var(e)`
    pub true_residual_variance_upgraded: f64,
}

/// Metadata written next to a generated CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sidecar {
    pub config: ScenarioConfig,
    pub truth: ScenarioTruth,
    pub rng: &'static str,
    pub substreams: &'static str,
}

impl Sidecar {
    pub fn new(config: ScenarioConfig) -> Self {
        Sidecar {
            truth: config.truth(),
            config,
            rng: rng::ALGORITHM,
            substreams: rng::SUBSTREAM_DERIVATION,
        }
    }
}

pub fn generate(cfg: &ScenarioConfig) -> Result<(Dataset, ScenarioTruth)> {
    cfg.validate()?;
    let mut rng = rng::stream(cfg.seed);
    let ds = draw(cfg, &mut rng)?;
    Ok((ds, cfg.truth()))
}

fn draw(cfg: &ScenarioConfig, rng: &mut StreamRng) -> Result<Dataset> {
    let noise_sd = cfg.noise_sd();
    let mut obs = Vec::with_capacity(cfg.n0 + cfg.n1);
    let groups = [
        (Group::Zero, cfg.n0, cfg.mu0, cfg.gain0),
        (Group::One, cfg.n1, cfg.mu1, cfg.gain1),
    ];
    for (group, n, mu, gain) in groups {
        for _ in 0..n {
            let z: f64 = StandardNormal.sample(rng);
            let w_initial = mu + cfg.sigma * z;
            let e = noise_sd * cfg.noise.standardized(rng);
            let w_final = w_initial + (cfg.rho - 1.0) * (w_initial - mu) + gain + e;
            obs.push(Observation::new(format!("s{:05}", obs.len()), group, w_initial, w_final)?);
        }
    }
    Dataset::new(obs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicateStats {
    pub seed: u64,
    pub a1: f64,
    pub a2: f64,
    pub ancova_group_coef: f64,
    pub ancova_group_se: f64,
    pub b0: f64,
    pub b0_se: f64,
    pub composition_delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSd {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single replicate.
    pub sd: f64,
}

impl MeanSd {
    fn of(values: impl Iterator<Item = f64> + Clone) -> Self {
        let n = values.clone().count() as f64;
        let mean = values.clone().sum::<f64>() / n;
        let sd = if n > 1.0 {
            (values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        MeanSd { mean, sd }
    }

    /// Standard error of the mean over `reps` replicates.
    pub fn standard_error(&self, reps: usize) -> f64 {
        self.sd / (reps as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudySummary {
    pub reps: usize,
    pub a1: MeanSd,
    pub a2: MeanSd,
    pub ancova_group_coef: MeanSd,
    pub b0: MeanSd,
    pub composition_delta: MeanSd,
    pub truth: ScenarioTruth,
    pub replicates: Vec<ReplicateStats>,
}

/// Statistics of one generated dataset under default binning.
pub fn replicate_stats(ds: &Dataset, seed: u64) -> Result<ReplicateStats> {
    use crate::ols::Term;
    let report = upgrade(ds)?;
    Ok(ReplicateStats {
        seed,
        a1: compute_a1(ds)?,
        a2: compute_a2(ds, &BinningSpec::default_for(ds))?.a2,
        ancova_group_coef: report.direct.coef(Term::Group).expect("ancova term"),
        ancova_group_se: report.direct.se(Term::Group).expect("ancova term"),
        b0: report.stage.b0,
        b0_se: report.direct.se(Term::W_INITIAL).expect("ancova term"),
        composition_delta: report.relative_composition_delta,
    })
}

/// Replicate `r` draws from `substream_seed(cfg.seed, r)`.
pub fn replicate_study(cfg: &ScenarioConfig, reps: usize) -> Result<StudySummary> {
    cfg.validate()?;
    if reps == 0 {
        return Err(Error::Config {
            field: "reps",
            message: "at least one replicate is required".into(),
        });
    }
    let replicates = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let seed = rng::substream_seed(cfg.seed, r);
            let (ds, _) = generate(&ScenarioConfig { seed, ..*cfg })?;
            replicate_stats(&ds, seed)
        })
        .collect::<Result<Vec<_>>>()?;
    let it = |f: fn(&ReplicateStats) -> f64| MeanSd::of(replicates.iter().map(f));
    Ok(StudySummary {
        reps,
        a1: it(|r| r.a1),
        a2: it(|r| r.a2),
        ancova_group_coef: it(|r| r.ancova_group_coef),
        b0: it(|r| r.b0),
        composition_delta: it(|r| r.composition_delta),
        truth: cfg.truth(),
        replicates,
    })
}
