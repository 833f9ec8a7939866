use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::report::{Check, SuiteReport, ValidationReport};
use super::stats::{chi_square_gof, chi_square_two_sample, total_variation};
use crate::distributions::{BetaNegativeBinomial, Digamma};
use crate::error::{Error, Result};
use crate::generative::{nbibp_simulate, truncated_oracle_simulate};
use crate::inference::{
    batch_means, geweke_test, iid_mean, mass_conditional, run_chain_with, ChainConfig, ChainState,
    ConstantLikelihood, GammaPrior, GewekeConfig, HyperPriors, ScalarPrior,
};
use crate::numerics::quadrature::integrate;
use crate::numerics::RngStream;
use crate::structures::{
    enumerate, log_pmf_array, log_pmf_struct, CombStruct, FeatureArray, History, Hyperparams,
};

/// The verification suites, in acceptance order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    DigammaIdentity,
    Normalization,
    RejectionSampler,
    SimulatorPmf,
    TwoConstruction,
    Exchangeability,
    Projection,
    ExpectedFeatures,
    PriorRestoration,
    Geweke,
    MassConditional,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::DigammaIdentity,
        Suite::Normalization,
        Suite::RejectionSampler,
        Suite::SimulatorPmf,
        Suite::TwoConstruction,
        Suite::Exchangeability,
        Suite::Projection,
        Suite::ExpectedFeatures,
        Suite::PriorRestoration,
        Suite::Geweke,
        Suite::MassConditional,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::DigammaIdentity => "digamma-identity",
            Suite::Normalization => "normalization",
            Suite::RejectionSampler => "rejection-sampler",
            Suite::SimulatorPmf => "simulator-pmf",
            Suite::TwoConstruction => "two-construction",
            Suite::Exchangeability => "exchangeability",
            Suite::Projection => "projection",
            Suite::ExpectedFeatures => "expected-features",
            Suite::PriorRestoration => "prior-restoration",
            Suite::Geweke => "geweke",
            Suite::MassConditional => "mass-conditional",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Parses `all`, `none`, or a comma-separated list of suite names.
    pub fn parse_selection(selection: &str) -> Result<Vec<Suite>> {
        match selection.trim() {
            "all" => Ok(Suite::ALL.to_vec()),
            "none" | "" => Ok(Vec::new()),
            list => list
                .split(',')
                .map(|s| {
                    Suite::from_name(s.trim()).ok_or_else(|| {
                        Error::Parse(format!(
                            "unknown suite '{s}'; expected one of all, none, {}",
                            Suite::ALL.map(Suite::name).join(", ")
                        ))
                    })
                })
                .collect(),
        }
    }
}

/// Runs `suites` with streams derived from `seed`.
pub fn run_suites(suites: &[Suite], seed: u64) -> ValidationReport {
    let reports: Vec<SuiteReport> = suites.iter().map(|&s| run_suite(s, seed)).collect();
    ValidationReport {
        seed,
        passed: reports.iter().all(|r| r.passed),
        suites: reports,
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    let mut rng = RngStream::new(seed, suite as u64);
    let start = Instant::now();
    let result = match suite {
        Suite::DigammaIdentity => digamma_identity(),
        Suite::Normalization => normalization(),
        Suite::RejectionSampler => rejection_sampler(&mut rng),
        Suite::SimulatorPmf => simulator_pmf(&mut rng),
        Suite::TwoConstruction => two_construction(&mut rng),
        Suite::Exchangeability => exchangeability(&mut rng),
        Suite::Projection => projection(&mut rng),
        Suite::ExpectedFeatures => expected_features(&mut rng),
        Suite::PriorRestoration => prior_restoration(&mut rng),
        Suite::Geweke => geweke(&mut rng),
        Suite::MassConditional => mass_conditional_quadrature(),
    };
    let seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(checks) => SuiteReport {
            suite: suite.name().into(),
            passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
            seconds,
            error: None,
            checks,
        },
        Err(e) => SuiteReport {
            suite: suite.name().into(),
            passed: false,
            seconds,
            error: Some(e.to_string()),
            checks: Vec::new(),
        },
    }
}

const R_GRID: [f64; 5] = [0.3, 0.7, 1.0, 2.5, 6.0];
const THETA_GRID: [f64; 5] = [0.2, 0.9, 1.0, 3.0, 10.0];
const P_MIN: f64 = 1e-3;

fn digamma_identity() -> Result<Vec<Check>> {
    let mut worst: f64 = 0.0;
    for &r in &R_GRID {
        for &theta in &THETA_GRID {
            let d = Digamma::new(r, theta)?;
            let b = BetaNegativeBinomial::new(r, 1.0, theta)?;
            let scale = 1.0 / (theta * d.harmonic_gap());
            for z in 1..=200u64 {
                let zf = z as f64;
                let lhs = d.log_pmf(z)?.exp();
                let rhs = scale * ((zf - 1.0) + r) / zf * b.log_pmf(z - 1).exp();
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    Ok(vec![Check::at_most(
        "max |digamma - scaled bnb|",
        worst,
        1e-10,
    )])
}

fn normalization() -> Result<Vec<Check>> {
    let mut worst_d: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    for &r in &R_GRID {
        for &theta in &THETA_GRID {
            let m = Digamma::new(r, theta)?.total_mass()?.total();
            worst_d = worst_d.max((m - 1.0).abs());
            for &alpha in &[0.5, 2.0] {
                let m = BetaNegativeBinomial::new(r, alpha, theta)?
                    .total_mass()?
                    .total();
                worst_b = worst_b.max((m - 1.0).abs());
            }
        }
    }
    Ok(vec![
        Check::at_most("digamma max |mass - 1|", worst_d, 1e-10),
        Check::at_most("bnb max |mass - 1|", worst_b, 1e-10),
    ])
}

fn rejection_sampler(rng: &mut RngStream) -> Result<Vec<Check>> {
    let draws = 100_000u64;
    let mut checks = Vec::new();
    for &(r, theta) in &[(1.0, 1.0), (2.0, 1.0), (0.5, 3.0)] {
        let d = Digamma::new(r, theta)?;
        let mut counts: HashMap<u64, u64> = HashMap::new();
        let mut rounds = 0u64;
        for _ in 0..draws {
            let (z, k) = d.sample_counted(rng)?;
            *counts.entry(z).or_default() += 1;
            rounds += k;
        }
        let cells: Vec<(u64, f64)> = (1..=5000u64)
            .map(|z| Ok((counts.get(&z).copied().unwrap_or(0), d.log_pmf(z)?.exp())))
            .collect::<Result<_>>()?;
        let gof = chi_square_gof(&cells, draws, 5.0);
        checks.push(Check::at_least(
            format!("({r},{theta}) chi-square p"),
            gof.p_value,
            1e-3,
        ));
        let expect = d.expected_rounds();
        let q = 1.0 / expect;
        let sd = ((1.0 - q) / (q * q) / draws as f64).sqrt();
        let mean = rounds as f64 / draws as f64;
        let z = if sd > 0.0 {
            (mean - expect).abs() / sd
        } else {
            (mean - expect).abs()
        };
        checks.push(Check::at_most(format!("({r},{theta}) rounds |z|"), z, 3.0));
    }
    Ok(checks)
}

fn count_structures(
    reps: usize,
    mut draw: impl FnMut() -> Result<FeatureArray>,
) -> Result<HashMap<CombStruct, u64>> {
    let mut counts = HashMap::new();
    for _ in 0..reps {
        *counts.entry(CombStruct::from_array(&draw()?)).or_default() += 1;
    }
    Ok(counts)
}

/// Enumerated structures with their exact probabilities, most likely first.
fn exact_cells(n: usize, hp: &Hyperparams) -> Result<Vec<(CombStruct, f64)>> {
    let mut cells = enumerate::structures(n, 6, 4)
        .into_iter()
        .map(|m| Ok((log_pmf_struct(&m, hp)?.exp(), m)))
        .collect::<Result<Vec<_>>>()?;
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(cells.into_iter().map(|(p, m)| (m, p)).collect())
}

fn simulator_pmf(rng: &mut RngStream) -> Result<Vec<Check>> {
    let hp = Hyperparams::new(1.0, 1.0, 0.5)?;
    let reps = 100_000;
    let counts = count_structures(reps, || nbibp_simulate(2, &hp, rng))?;
    let exact = exact_cells(2, &hp)?;
    let cells: Vec<(u64, f64)> = exact
        .iter()
        .map(|(m, p)| (counts.get(m).copied().unwrap_or(0), *p))
        .collect();
    let gof = chi_square_gof(&cells, reps as u64, 5.0);
    Ok(vec![
        Check::at_least("chi-square p", gof.p_value, 1e-3),
        Check::at_least("cells", gof.cells as f64, 10.0),
    ])
}

/// Count vectors of two samples over the enumerated structures whose exact
/// probability is at least `P_MIN`, plus one aggregated tail cell.
fn binned(
    exact: &[(CombStruct, f64)],
    samples: [&HashMap<CombStruct, u64>; 2],
) -> (Vec<u64>, Vec<u64>, f64) {
    let head: Vec<&CombStruct> = exact
        .iter()
        .filter(|c| c.1 >= P_MIN)
        .map(|c| &c.0)
        .collect();
    let root_p: f64 = exact
        .iter()
        .filter(|c| c.1 >= P_MIN)
        .map(|c| c.1.sqrt())
        .sum::<f64>()
        + (1.0
            - exact
                .iter()
                .filter(|c| c.1 >= P_MIN)
                .map(|c| c.1)
                .sum::<f64>())
        .max(0.0)
        .sqrt();
    let bins = |s: &HashMap<CombStruct, u64>| {
        let mut v: Vec<u64> = head
            .iter()
            .map(|m| s.get(*m).copied().unwrap_or(0))
            .collect();
        let total: u64 = s.values().sum();
        v.push(total - v.iter().sum::<u64>());
        v
    };
    (bins(samples[0]), bins(samples[1]), root_p)
}

fn two_construction(rng: &mut RngStream) -> Result<Vec<Check>> {
    let hp = Hyperparams::new(1.0, 1.0, 0.5)?;
    let reps = 100_000;
    let eps = 1e-4;
    let mut a_rng = rng.substream(1);
    let mut b_rng = rng.substream(2);
    let seq = count_structures(reps, || nbibp_simulate(2, &hp, &mut a_rng))?;
    let orc = count_structures(reps, || truncated_oracle_simulate(2, &hp, eps, &mut b_rng))?;
    let exact = exact_cells(2, &hp)?;
    let (a, b, root_p) = binned(&exact, [&seq, &orc]);
    let tv = total_variation(&a, &b);
    // mean TV between two independent samples of this size from one law
    let noise = root_p / (std::f64::consts::PI * reps as f64).sqrt();
    let homog = chi_square_two_sample(&a, &b, 10);
    Ok(vec![
        Check::at_most("total variation", tv, 0.02),
        Check::at_most("expected sampling TV", noise, 0.02),
        Check::at_least("two-sample chi-square p", homog.p_value, 1e-3),
    ])
}

fn two_sample_structures(
    a: &HashMap<CombStruct, u64>,
    b: &HashMap<CombStruct, u64>,
) -> super::stats::ChiSquare {
    let mut keys: Vec<(String, &CombStruct)> = a
        .keys()
        .chain(b.keys())
        .map(|m| (serde_json::to_string(m).expect("serializable"), m))
        .collect();
    keys.sort_by(|x, y| x.0.cmp(&y.0));
    keys.dedup_by(|x, y| x.0 == y.0);
    let xs: Vec<u64> = keys
        .iter()
        .map(|(_, m)| a.get(*m).copied().unwrap_or(0))
        .collect();
    let ys: Vec<u64> = keys
        .iter()
        .map(|(_, m)| b.get(*m).copied().unwrap_or(0))
        .collect();
    chi_square_two_sample(&xs, &ys, 10)
}

fn exchangeability(rng: &mut RngStream) -> Result<Vec<Check>> {
    let hp = Hyperparams::new(1.5, 1.0, 1.0)?;
    let reps = 50_000;
    let perm = [2usize, 0, 1];
    let mut a_rng = rng.substream(1);
    let mut b_rng = rng.substream(2);
    let plain = count_structures(reps, || nbibp_simulate(3, &hp, &mut a_rng))?;
    let permuted = count_structures(reps, || {
        nbibp_simulate(3, &hp, &mut b_rng)?.permute_rows(&perm)
    })?;
    let test = two_sample_structures(&plain, &permuted);

    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let hp2 = Hyperparams::new(0.8, 1.7, 2.3)?;
    let mut worst: f64 = 0.0;
    for m in enumerate::structures(3, 3, 2) {
        let base = log_pmf_struct(&m, &hp2)?;
        for p in &perms {
            let v = log_pmf_struct(&m.permute_rows(p)?, &hp2)?;
            worst = worst.max((v - base).abs());
        }
    }
    Ok(vec![
        Check::at_least("two-sample chi-square p", test.p_value, 1e-3),
        Check::at_most("max |log pmf change| under row permutation", worst, 1e-12),
    ])
}

fn projection(rng: &mut RngStream) -> Result<Vec<Check>> {
    let h = |v: &[u64]| History::new(v.to_vec());
    let mut checks = Vec::new();

    let m = CombStruct::from_counts(2, [(h(&[1, 0])?, 1), (h(&[1, 2])?, 1)])?;
    checks.push(Check::holds(
        "{(1,0):1,(1,2):1} -> {(1):2}",
        m.project()? == CombStruct::from_counts(1, [(h(&[1])?, 2)])?,
    ));
    let m = CombStruct::from_counts(2, [(h(&[0, 3])?, 1)])?;
    checks.push(Check::holds("{(0,3):1} -> empty", m.project()?.is_empty()));

    // exact consistency on a truncated support; c = 6 keeps the truncated
    // mass small
    let hp = Hyperparams::new(0.5, 6.0, 0.2)?;
    let stage2 = enumerate::structures(2, 6, 4);
    let mut lifted: HashMap<CombStruct, f64> = HashMap::new();
    let mut covered = 0.0;
    let mut monotone = true;
    for m in &stage2 {
        let p = log_pmf_struct(m, &hp)?.exp();
        covered += p;
        let proj = m.project()?;
        monotone &= proj.kappa() <= m.kappa();
        *lifted.entry(proj).or_default() += p;
    }
    checks.push(Check::holds("kappa non-increasing", monotone));
    let missing = 1.0 - covered;
    let mut worst_excess: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for m in enumerate::structures(1, 6, 4) {
        let target = log_pmf_struct(&m, &hp)?.exp();
        let sum = lifted.get(&m).copied().unwrap_or(0.0);
        worst_excess = worst_excess.max(sum - target);
        worst_gap = worst_gap.max(target - sum);
    }
    checks.push(Check::at_most("truncated mass", missing, 1e-3));
    checks.push(Check::at_most(
        "lifted mass above target",
        worst_excess,
        1e-13,
    ));
    checks.push(Check::at_most(
        "lifted mass deficit minus truncated mass",
        worst_gap - missing,
        1e-13,
    ));

    let reps = 50_000;
    let hp = Hyperparams::new(1.0, 1.0, 1.0)?;
    let mut a_rng = rng.substream(1);
    let mut b_rng = rng.substream(2);
    let projected = count_structures(reps, || {
        let w = nbibp_simulate(3, &hp, &mut a_rng)?;
        let p = CombStruct::from_array(&w).project()?;
        Ok(p.to_array())
    })?;
    let direct = count_structures(reps, || nbibp_simulate(2, &hp, &mut b_rng))?;
    let test = two_sample_structures(&projected, &direct);
    checks.push(Check::at_least(
        "two-sample chi-square p",
        test.p_value,
        1e-3,
    ));
    Ok(checks)
}

fn expected_features(rng: &mut RngStream) -> Result<Vec<Check>> {
    let reps = 100_000;
    let mut checks = Vec::new();
    let harmonic2 = 1.5;
    let hp = Hyperparams::new(1.0, 1.0, 1.7)?;
    checks.push(Check::at_most(
        "|formula - T H_2|",
        (hp.expected_features(2) - 1.7 * harmonic2).abs(),
        1e-12,
    ));
    for &(n, r, c, t) in &[
        (2usize, 1.0, 1.0, 1.7),
        (3, 0.5, 2.0, 1.0),
        (5, 2.5, 0.7, 0.8),
    ] {
        let hp = Hyperparams::new(r, c, t)?;
        let mut sum = 0.0;
        for _ in 0..reps {
            sum += nbibp_simulate(n, &hp, rng)?.kappa() as f64;
        }
        let expect = hp.expected_features(n);
        let sd = (expect / reps as f64).sqrt();
        checks.push(Check::at_most(
            format!("(n={n},r={r},c={c},T={t}) |z|"),
            (sum / reps as f64 - expect).abs() / sd,
            3.0,
        ));
    }
    Ok(checks)
}

/// Test functions of `(κ, Σ W)` compared between forward draws and a chain.
///
/// At `r = c = 1` the feature masses have no finite mean, so `Σ W` is
/// compared through bounded or logarithmic functions.
fn restoration_stats(kappa: usize, total: u64) -> [f64; 6] {
    let k = kappa as f64;
    let s = total as f64;
    [
        k,
        k * k,
        (1.0 + s).ln(),
        (s <= 2.0) as u8 as f64,
        (s <= 5.0) as u8 as f64,
        (s <= 20.0) as u8 as f64,
    ]
}

const RESTORATION_NAMES: [&str; 6] = [
    "kappa",
    "kappa^2",
    "log(1+sum W)",
    "P(sum W<=2)",
    "P(sum W<=5)",
    "P(sum W<=20)",
];

fn compare_forward_chain(
    label: &str,
    names: &[&str],
    forward: &[Vec<f64>],
    chain: &[Vec<f64>],
    batches: usize,
) -> Vec<Check> {
    names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let (fm, fse) = iid_mean(&forward[k]);
            let (cm, cse) = batch_means(&chain[k], batches);
            let se = (fse * fse + cse * cse).sqrt();
            let z = if se > 0.0 {
                (fm - cm).abs() / se
            } else {
                (fm - cm).abs()
            };
            Check::at_most(format!("{label} {name} |z|"), z, 3.0)
        })
        .collect()
}

fn prior_restoration(rng: &mut RngStream) -> Result<Vec<Check>> {
    let n = 3;
    let sweeps = 10_000;
    let forward_reps = 100_000;
    let batches = 50;
    let model = ConstantLikelihood::new(n, 1, GammaPrior::new(1.0, 1.0)?);
    let mut checks = Vec::new();

    // fixed (r, c, T)
    let hp = Hyperparams::new(1.0, 1.0, 1.0)?;
    let mut fwd: Vec<Vec<f64>> = (0..6).map(|_| Vec::with_capacity(forward_reps)).collect();
    let mut f_rng = rng.substream(1);
    for _ in 0..forward_reps {
        let w = nbibp_simulate(n, &hp, &mut f_rng)?;
        for (k, x) in restoration_stats(w.kappa(), w.total())
            .into_iter()
            .enumerate()
        {
            fwd[k].push(x);
        }
    }
    let mut state =
        ChainState::from_prior(&model, hp.clone(), HyperPriors::fixed(), rng.substream(2))?;
    let config = ChainConfig {
        sweeps,
        mass: false,
        c_r: false,
        ..ChainConfig::default()
    };
    let mut chain: Vec<Vec<f64>> = (0..6).map(|_| Vec::with_capacity(sweeps)).collect();
    run_chain_with(&model, &mut state, &config, |rec| {
        if rec.sweep > 0 {
            for (k, x) in restoration_stats(rec.kappa, rec.total)
                .into_iter()
                .enumerate()
            {
                chain[k].push(x);
            }
        }
        Ok(())
    })?;
    checks.extend(compare_forward_chain(
        "fixed",
        &RESTORATION_NAMES,
        &fwd,
        &chain,
        batches,
    ));

    // T, c, r updated under gamma priors
    let priors = HyperPriors {
        mass: ScalarPrior::Gamma {
            shape: 2.0,
            rate: 2.0,
        },
        c: ScalarPrior::Gamma {
            shape: 16.0,
            rate: 8.0,
        },
        r: ScalarPrior::Gamma {
            shape: 2.0,
            rate: 2.0,
        },
    };
    let mut names: Vec<&str> = RESTORATION_NAMES.to_vec();
    names.extend(["T", "c", "r"]);
    let mut fwd = vec![Vec::with_capacity(forward_reps); names.len()];
    let mut f_rng = rng.substream(3);
    for _ in 0..forward_reps {
        let mut h = hp.clone();
        h.set_mass(priors.mass.sample(1.0, &mut f_rng))?;
        h.set_c(priors.c.sample(1.0, &mut f_rng))?;
        h.set_r(priors.r.sample(1.0, &mut f_rng))?;
        let w = nbibp_simulate(n, &h, &mut f_rng)?;
        let mut s = restoration_stats(w.kappa(), w.total()).to_vec();
        s.extend([h.mass(), h.c(), h.r()]);
        for (k, x) in s.into_iter().enumerate() {
            fwd[k].push(x);
        }
    }
    let mut state = ChainState::from_prior(&model, hp, priors, rng.substream(4))?;
    let config = ChainConfig {
        sweeps,
        ..ChainConfig::default()
    };
    let mut chain = vec![Vec::with_capacity(sweeps); names.len()];
    run_chain_with(&model, &mut state, &config, |rec| {
        if rec.sweep > 0 {
            let mut s = restoration_stats(rec.kappa, rec.total).to_vec();
            s.extend([rec.mass, rec.c, rec.r]);
            for (k, x) in s.into_iter().enumerate() {
                chain[k].push(x);
            }
        }
        Ok(())
    })?;
    checks.extend(compare_forward_chain(
        "hyper", &names, &fwd, &chain, batches,
    ));
    Ok(checks)
}

fn geweke(rng: &mut RngStream) -> Result<Vec<Check>> {
    let report = geweke_test(&GewekeConfig::small(), rng)?;
    Ok(report
        .stats
        .iter()
        .map(|s| Check::at_most(format!("{} |z|", s.name), s.z.abs(), 3.0))
        .collect())
}

/// Normalizes `p(W | T) p(T)` over `T` by quadrature and compares it with the
/// closed-form gamma conditional.
fn mass_conditional_quadrature() -> Result<Vec<Check>> {
    let mut worst_density: f64 = 0.0;
    let mut worst_mean: f64 = 0.0;
    for &(shape, rate) in &[(1.0, 1.0), (2.5, 0.5)] {
        let prior = GammaPrior::new(shape, rate)?;
        for &(n, r, c) in &[(1usize, 1.0, 1.0), (3, 0.5, 2.5), (5, 2.0, 0.3)] {
            for &kappa in &[0usize, 3, 10] {
                let columns: Vec<History> = (0..kappa)
                    .map(|j| History::singleton(n, j % n, 1 + (j as u64 % 3)))
                    .collect();
                let w = FeatureArray::new(n, columns)?;
                let post = mass_conditional(prior, kappa as u64, n, r, c)?;
                let hp0 = Hyperparams::new(r, c, post.mean())?;
                let ref_log = log_pmf_array(&w, &hp0)? + prior.log_pdf(post.mean());
                let log_target = |t: f64| -> f64 {
                    if !(t > 0.0) {
                        return f64::NEG_INFINITY;
                    }
                    let mut h = hp0.clone();
                    h.set_mass(t).expect("positive");
                    log_pmf_array(&w, &h).expect("nonatomic") + prior.log_pdf(t) - ref_log
                };
                let sd = (post.shape).sqrt() / post.rate;
                let upper = post.mean() + 60.0 * sd;
                let z = integrate(|t| log_target(t).exp(), 0.0, upper, 1e-14, 1e-12)?.value;
                let m = integrate(|t| t * log_target(t).exp(), 0.0, upper, 1e-14, 1e-12)?.value / z;
                worst_mean = worst_mean.max((m - post.mean()).abs() / post.mean());
                for k in 1..=8 {
                    let t = post.mean() * k as f64 / 4.0;
                    let numeric = log_target(t).exp() / z;
                    let closed = post.log_pdf(t).exp();
                    worst_density = worst_density.max((numeric - closed).abs());
                }
            }
        }
    }
    Ok(vec![
        Check::at_most("max |density difference|", worst_density, 1e-8),
        Check::at_most("max relative mean difference", worst_mean, 1e-8),
    ])
}
