use nbibp::inference::{
    log_joint, run_chain_with, update_c_r, update_entry, update_theta, ChainConfig, ChainState,
    GammaPrior, HyperPriors, PoissonFactorModel, ScalarPrior,
};
use nbibp::numerics::quadrature::integrate;
use nbibp::numerics::RngStream;
use nbibp::structures::{log_pmf_array, FeatureArray, History, Hyperparams};

fn h(v: &[u64]) -> History {
    History::new(v.to_vec()).unwrap()
}

#[test]
fn theta_chain_matches_quadrature_posterior() {
    // 1 × 1 × 1: y = 3, W = [[1]], θ ~ Gamma(1, 1)
    let prior = GammaPrior::new(1.0, 1.0).unwrap();
    let model = PoissonFactorModel::new(vec![vec![3]], prior).unwrap();
    let w = FeatureArray::new(1, vec![h(&[1])]).unwrap();
    let hp = Hyperparams::new(1.0, 1.0, 1.0).unwrap();
    let mut state = ChainState::new(
        &w,
        vec![vec![1.0]],
        hp,
        HyperPriors::fixed(),
        RngStream::new(1, 0),
    )
    .unwrap();
    let unnorm = |t: f64, k: i32| t.powi(3 + k) * (-2.0 * t).exp();
    let z = integrate(|t| unnorm(t, 0), 0.0, 60.0, 1e-14, 1e-12)
        .unwrap()
        .value;
    let mean = integrate(|t| unnorm(t, 1), 0.0, 60.0, 1e-14, 1e-12)
        .unwrap()
        .value
        / z;
    let n = 200_000;
    let mut sum = 0.0;
    for _ in 0..n {
        update_theta(&mut state, &model).unwrap();
        sum += state.theta()[0][0];
    }
    assert!(
        (sum / n as f64 - mean).abs() < 1e-2,
        "{} vs {mean}",
        sum / n as f64
    );
}

#[test]
fn concentration_chain_matches_quadrature_posterior() {
    let w = FeatureArray::new(2, vec![h(&[1, 0]), h(&[2, 1]), h(&[0, 1])]).unwrap();
    let hp = Hyperparams::new(1.0, 1.0, 1.0).unwrap();
    let prior = ScalarPrior::Gamma {
        shape: 2.0,
        rate: 1.0,
    };
    let priors = HyperPriors {
        mass: ScalarPrior::Fixed,
        c: prior,
        r: ScalarPrior::Fixed,
    };
    let log_post = |c: f64| {
        let mut h = hp.clone();
        h.set_c(c).unwrap();
        log_pmf_array(&w, &h).unwrap() + prior.log_pdf(c)
    };
    let edges = [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 80.0];
    let probs: Vec<f64> = edges
        .windows(2)
        .map(|e| {
            integrate(|c| log_post(c).exp(), e[0], e[1], 1e-14, 1e-11)
                .unwrap()
                .value
        })
        .collect();
    let z: f64 = probs.iter().sum();
    let probs: Vec<f64> = probs.iter().map(|p| p / z).collect();

    let theta = vec![vec![]; w.kappa()];
    let mut state = ChainState::new(&w, theta, hp.clone(), priors, RngStream::new(2, 0)).unwrap();
    let n = 400_000;
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..n {
        update_c_r(&mut state, 1.0).unwrap();
        let c = state.hp().c();
        let bin = edges
            .windows(2)
            .position(|e| c < e[1])
            .unwrap_or(probs.len() - 1);
        counts[bin] += 1;
    }
    let tv: f64 = 0.5
        * counts
            .iter()
            .zip(&probs)
            .map(|(&k, &p)| (k as f64 / n as f64 - p).abs())
            .sum::<f64>();
    assert!(tv <= 1e-2, "TV = {tv}, counts {counts:?}, probs {probs:?}");
}

#[test]
#[allow(clippy::needless_range_loop)]
fn entry_update_is_reversible() {
    // pair counts of consecutive states are symmetric under detailed balance
    let prior = GammaPrior::new(2.0, 2.0).unwrap();
    let model = PoissonFactorModel::new(vec![vec![2], vec![1]], prior).unwrap();
    let w = FeatureArray::new(2, vec![h(&[1, 1])]).unwrap();
    let hp = Hyperparams::new(1.0, 1.0, 1.0).unwrap();
    let mut state = ChainState::new(
        &w,
        vec![vec![1.3]],
        hp,
        HyperPriors::fixed(),
        RngStream::new(3, 0),
    )
    .unwrap();
    const MAX: usize = 6;
    let mut pairs = [[0u64; MAX + 1]; MAX + 1];
    let mut prev = state.array().get(0, 0) as usize;
    for _ in 0..400_000 {
        update_entry(&mut state, &model, 0, 0).unwrap();
        let next = state.array().get(0, 0) as usize;
        pairs[prev.min(MAX)][next.min(MAX)] += 1;
        prev = next;
    }
    let mut moves = 0;
    for a in 0..=MAX {
        for b in a + 1..=MAX {
            let (x, y) = (pairs[a][b] as f64, pairs[b][a] as f64);
            moves += (x + y) as u64;
            assert!(
                (x - y).abs() <= 4.0 * (x + y).sqrt() + 2.0,
                "{a}->{b}: {x} vs {y}"
            );
        }
    }
    assert!(moves > 10_000);
}

#[test]
fn joint_stays_finite_along_a_chain() {
    let prior = GammaPrior::new(1.0, 1.0).unwrap();
    let y = vec![vec![4, 0, 2], vec![1, 3, 0], vec![0, 0, 5]];
    let model = PoissonFactorModel::new(y, prior).unwrap();
    let hp = Hyperparams::new(1.0, 2.0, 2.0).unwrap();
    let priors = HyperPriors {
        mass: ScalarPrior::Gamma {
            shape: 2.0,
            rate: 1.0,
        },
        c: ScalarPrior::Gamma {
            shape: 4.0,
            rate: 2.0,
        },
        r: ScalarPrior::LogNormal {
            mu: 0.0,
            sigma: 0.5,
        },
    };
    // start from a prior draw that explains every nonzero data row
    let mut state = (0..)
        .map(|seed| {
            ChainState::from_prior(&model, hp.clone(), priors, RngStream::new(4, seed)).unwrap()
        })
        .find(|s| log_joint(s, &model).unwrap().is_finite())
        .unwrap();
    let config = ChainConfig {
        sweeps: 300,
        ..ChainConfig::default()
    };
    run_chain_with(&model, &mut state, &config, |rec| {
        assert!(rec.log_joint.is_finite(), "sweep {}", rec.sweep);
        Ok(())
    })
    .unwrap();
}
