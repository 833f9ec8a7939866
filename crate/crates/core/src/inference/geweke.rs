use serde::{Deserialize, Serialize};

use super::chain::{sweep, ChainConfig};
use super::likelihood::{Likelihood, PoissonFactorModel};
use super::priors::{GammaPrior, HyperPriors};
use super::state::ChainState;
use crate::error::{domain, Result};
use crate::generative::nbibp_simulate;
use crate::numerics::RngStream;
use crate::structures::Hyperparams;

/// Settings of a joint-distribution test of the posterior sampler for the
/// Poisson factor model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GewekeConfig {
    pub n: usize,
    pub v: usize,
    /// Initial hyperparameters; those with a non-fixed prior are redrawn.
    pub hp: Hyperparams,
    pub priors: HyperPriors,
    pub theta_prior: GammaPrior,
    pub forward_draws: usize,
    pub conditional_iters: usize,
    /// Number of batches for the batch-means standard error of the
    /// successive-conditional chain.
    pub batches: usize,
    pub chain: ChainConfig,
    pub z_threshold: f64,
}

impl GewekeConfig {
    /// The small configuration used by the acceptance suite.
    pub fn small() -> Self {
        Self {
            n: 3,
            v: 2,
            hp: Hyperparams::new(1.0, 3.0, 1.0).expect("valid"),
            priors: HyperPriors {
                mass: super::ScalarPrior::Gamma {
                    shape: 2.0,
                    rate: 2.0,
                },
                c: super::ScalarPrior::Fixed,
                r: super::ScalarPrior::Fixed,
            },
            theta_prior: GammaPrior::new(1.0, 1.0).expect("valid"),
            forward_draws: 100_000,
            conditional_iters: 100_000,
            batches: 50,
            chain: ChainConfig::default(),
            z_threshold: 3.0,
        }
    }
}

/// Comparison of one test statistic between the two samplers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GewekeStat {
    pub name: String,
    pub forward_mean: f64,
    pub forward_se: f64,
    pub conditional_mean: f64,
    pub conditional_se: f64,
    pub z: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GewekeReport {
    pub stats: Vec<GewekeStat>,
    pub passed: bool,
}

/// Mean and standard error from `batches` contiguous batch means.
pub fn batch_means(xs: &[f64], batches: usize) -> (f64, f64) {
    let size = xs.len() / batches;
    assert!(
        size >= 1 && batches >= 2,
        "not enough samples for {batches} batches"
    );
    let means: Vec<f64> = xs
        .chunks_exact(size)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let m = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (m, (var / batches as f64).sqrt())
}

/// Mean and standard error of i.i.d. samples.
pub fn iid_mean(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

struct Draw {
    state: ChainState,
    y: Vec<Vec<u64>>,
}

fn forward(config: &GewekeConfig, rng: &mut RngStream) -> Result<Draw> {
    let mut hp = config.hp.clone();
    hp.set_mass(config.priors.mass.sample(hp.mass(), rng))?;
    hp.set_c(config.priors.c.sample(hp.c(), rng))?;
    hp.set_r(config.priors.r.sample(hp.r(), rng))?;
    let w = nbibp_simulate(config.n, &hp, rng)?;
    let theta: Vec<Vec<f64>> = (0..w.kappa())
        .map(|_| {
            (0..config.v)
                .map(|_| config.theta_prior.sample(rng))
                .collect()
        })
        .collect();
    let columns: Vec<Vec<u64>> = w.columns().iter().map(|h| h.entries().to_vec()).collect();
    let y = PoissonFactorModel::sample_data(&columns, &theta, config.n, config.v, rng);
    let state = ChainState::new(&w, theta, hp, config.priors, rng.substream(u64::MAX))?;
    Ok(Draw { state, y })
}

fn statistics(state: &ChainState, y: &[Vec<u64>], with_mass: bool) -> Vec<f64> {
    let mut s = vec![
        state.kappa() as f64,
        state.total() as f64,
        y.iter().flatten().sum::<u64>() as f64,
    ];
    if with_mass {
        s.push(state.hp().mass());
    }
    s
}

/// Compares means of `κ`, `Σ W`, `Σ y` (and `T` when it is updated) between
/// independent forward draws of `(W, Θ, y)` and a successive-conditional
/// chain that alternates one sampler sweep with a fresh draw of `y`.
pub fn geweke_test(config: &GewekeConfig, rng: &mut RngStream) -> Result<GewekeReport> {
    if config.n == 0 || config.v == 0 {
        return Err(domain("geweke_test", "n and V must be positive"));
    }
    if config.forward_draws < 2 || config.conditional_iters < 2 * config.batches {
        return Err(domain("geweke_test", "too few draws"));
    }
    config.chain.validate()?;
    let with_mass = config.chain.mass && !config.priors.mass.is_fixed();
    let mut names = vec!["kappa", "sum_w", "sum_y"];
    if with_mass {
        names.push("mass");
    }

    let mut fwd = vec![Vec::with_capacity(config.forward_draws); names.len()];
    let mut fwd_rng = rng.substream(rng.stream_id().wrapping_add(1));
    for _ in 0..config.forward_draws {
        let d = forward(config, &mut fwd_rng)?;
        for (k, x) in statistics(&d.state, &d.y, with_mass)
            .into_iter()
            .enumerate()
        {
            fwd[k].push(x);
        }
    }

    let mut sc = vec![Vec::with_capacity(config.conditional_iters); names.len()];
    let Draw { mut state, mut y } = forward(config, rng)?;
    *state.rng_mut() = rng.substream(rng.stream_id().wrapping_add(2));
    let mut model = PoissonFactorModel::new(y.clone(), config.theta_prior)?;
    for _ in 0..config.conditional_iters {
        sweep(&mut state, &model, &config.chain)?;
        y = PoissonFactorModel::sample_data(
            &state.columns,
            &state.theta,
            config.n,
            model.theta_dim(),
            &mut state.rng,
        );
        model = model.with_data(y.clone())?;
        for (k, x) in statistics(&state, &y, with_mass).into_iter().enumerate() {
            sc[k].push(x);
        }
    }

    let stats: Vec<GewekeStat> = names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let (fm, fse) = iid_mean(&fwd[k]);
            let (cm, cse) = batch_means(&sc[k], config.batches);
            let z = (fm - cm) / (fse * fse + cse * cse).sqrt();
            GewekeStat {
                name: name.to_string(),
                forward_mean: fm,
                forward_se: fse,
                conditional_mean: cm,
                conditional_se: cse,
                z,
                passed: z.abs() <= config.z_threshold,
            }
        })
        .collect();
    let passed = stats.iter().all(|s| s.passed);
    Ok(GewekeReport { stats, passed })
}
