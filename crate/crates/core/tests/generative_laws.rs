use nbibp::distributions::{BetaNegativeBinomial, Digamma};
use nbibp::generative::{
    bnbp_sample_finitary, nbibp_simulate, predictive_step, truncated_oracle_simulate,
};
use nbibp::numerics::{harmonic_gap, ln_factorial, RngStream};
use nbibp::structures::{FeatureArray, History, Hyperparams};
use nbibp::validation::stats::chi_square_gof;

const DRAWS: u64 = 20_000;
const ALPHA: f64 = 1e-3;

fn poisson_cells(lambda: f64, max: u64) -> Vec<f64> {
    (0..=max)
        .map(|k| (k as f64 * lambda.ln() - lambda - ln_factorial(k)).exp())
        .collect()
}

fn histogram(xs: impl Iterator<Item = u64>, max: u64) -> Vec<u64> {
    let mut h = vec![0; max as usize + 1];
    for x in xs {
        if x <= max {
            h[x as usize] += 1;
        }
    }
    h
}

fn gof(obs: &[u64], probs: &[f64]) -> f64 {
    let cells: Vec<(u64, f64)> = obs.iter().copied().zip(probs.iter().copied()).collect();
    chi_square_gof(&cells, DRAWS, 5.0).p_value
}

#[test]
fn each_row_uses_a_poisson_number_of_features() {
    let hp = Hyperparams::new(1.5, 2.0, 1.2).unwrap();
    let lambda = hp.c() * hp.mass() * harmonic_gap(hp.r(), hp.c()).unwrap();
    let probs = poisson_cells(lambda, 15);
    let mut rng = RngStream::new(1, 0);
    let arrays: Vec<FeatureArray> = (0..DRAWS)
        .map(|_| nbibp_simulate(3, &hp, &mut rng).unwrap())
        .collect();
    for row in 0..3 {
        let counts = arrays
            .iter()
            .map(|w| w.row(row).iter().filter(|&&x| x > 0).count() as u64);
        let p = gof(&histogram(counts, 15), &probs);
        assert!(p > ALPHA, "row {row}: p = {p}");
    }
}

#[test]
fn new_dish_servings_are_digamma() {
    let hp = Hyperparams::new(0.8, 1.5, 3.0).unwrap();
    let d = Digamma::new(hp.r(), hp.c()).unwrap();
    let probs: Vec<f64> = std::iter::once(0.0)
        .chain((1..=30).map(|z| d.log_pmf(z).unwrap().exp()))
        .collect();
    let mut rng = RngStream::new(2, 0);
    let mut masses = Vec::new();
    while (masses.len() as u64) < DRAWS {
        let w = nbibp_simulate(1, &hp, &mut rng).unwrap();
        masses.extend(w.row(0));
    }
    masses.truncate(DRAWS as usize);
    let p = gof(&histogram(masses.into_iter(), 30), &probs);
    assert!(p > ALPHA, "p = {p}");
}

#[test]
fn existing_dish_servings_are_beta_negative_binomial() {
    let hp = Hyperparams::new(1.2, 0.7, 1.0).unwrap();
    let w = FeatureArray::new(2, vec![History::new(vec![2, 1]).unwrap()]).unwrap();
    let law = BetaNegativeBinomial::new(hp.r(), 3.0, hp.c() + 2.0 * hp.r()).unwrap();
    let probs: Vec<f64> = (0..=40).map(|z| law.log_pmf(z).exp()).collect();
    let mut rng = RngStream::new(3, 0);
    let draws = (0..DRAWS).map(|_| predictive_step(&w, &hp, &mut rng).unwrap().get(2, 0));
    let p = gof(&histogram(draws, 40), &probs);
    assert!(p > ALPHA, "p = {p}");
}

#[test]
fn fixed_atom_counts_are_beta_negative_binomial() {
    let hp = Hyperparams::new(2.0, 3.0, 1.0)
        .unwrap()
        .with_fixed_atoms(vec![0.4])
        .unwrap();
    let law = BetaNegativeBinomial::new(2.0, 3.0 * 0.4, 3.0 * 0.6).unwrap();
    let probs: Vec<f64> = (0..=40).map(|z| law.log_pmf(z).exp()).collect();
    let mut rng = RngStream::new(4, 0);
    let draws = (0..DRAWS).map(|_| bnbp_sample_finitary(&hp, &mut rng).unwrap().fixed[0]);
    let p = gof(&histogram(draws, 40), &probs);
    assert!(p > ALPHA, "p = {p}");
}

#[test]
fn oracle_and_restaurant_share_feature_count_law() {
    let hp = Hyperparams::new(1.0, 2.0, 1.0).unwrap();
    let lambda = hp.expected_features(2);
    let probs = poisson_cells(lambda, 15);
    let mut rng = RngStream::new(5, 0);
    let kappas = (0..DRAWS).map(|_| {
        truncated_oracle_simulate(2, &hp, 1e-6, &mut rng)
            .unwrap()
            .kappa() as u64
    });
    let p = gof(&histogram(kappas, 15), &probs);
    assert!(p > ALPHA, "p = {p}");
}

#[test]
fn seeded_simulation_is_reproducible() {
    let hp = Hyperparams::new(1.0, 1.0, 2.0).unwrap();
    let a = nbibp_simulate(5, &hp, &mut RngStream::new(9, 4)).unwrap();
    let b = nbibp_simulate(5, &hp, &mut RngStream::new(9, 4)).unwrap();
    let c = nbibp_simulate(5, &hp, &mut RngStream::new(9, 5)).unwrap();
    assert_eq!(a, b);
    assert_ne!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&c).unwrap()
    );
}
