use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use nbibp::inference::{
    sweep, ChainConfig, ChainState, GammaPrior, HyperPriors, PoissonFactorModel, ScalarPrior,
};
use nbibp::numerics::RngStream;
use nbibp::structures::Hyperparams;

fn sweeps(c: &mut Criterion) {
    let hp = Hyperparams::new(1.0, 2.0, 2.0).unwrap();
    let prior = GammaPrior::new(1.0, 1.0).unwrap();
    let mut rng = RngStream::new(1, 0);
    let truth = ChainState::from_prior(
        &PoissonFactorModel::new(vec![vec![0; 10]; 50], prior).unwrap(),
        hp.clone(),
        HyperPriors::fixed(),
        rng.clone(),
    )
    .unwrap();
    let w = truth.array();
    let columns: Vec<Vec<u64>> = w.columns().iter().map(|h| h.entries().to_vec()).collect();
    let y = PoissonFactorModel::sample_data(&columns, truth.theta(), 50, 10, &mut rng);
    let model = PoissonFactorModel::new(y, prior).unwrap();
    let priors = HyperPriors {
        mass: ScalarPrior::Gamma {
            shape: 1.0,
            rate: 1.0,
        },
        c: ScalarPrior::Gamma {
            shape: 2.0,
            rate: 1.0,
        },
        r: ScalarPrior::Fixed,
    };
    let config = ChainConfig::default();
    let mut state = ChainState::from_prior(&model, hp, priors, RngStream::new(2, 0)).unwrap();
    for _ in 0..50 {
        sweep(&mut state, &model, &config).unwrap();
    }
    c.bench_function("sweep/n=50,V=10", |b| {
        b.iter_batched(
            || state.clone(),
            |mut s| sweep(&mut s, &model, &config).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
