use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    parse_suites, Construction, InferArgs, PmfArgs, SampleArgs, SimulateArgs, ValidateArgs,
};
use nbibp::generative::{
    bnbp_sample_finitary, nbibp_simulate, predictive_step, truncated_oracle_simulate,
};
use nbibp::inference::{
    geweke_test, run_chain_with, ChainConfig, ChainState, GammaPrior, GewekeConfig, HyperPriors,
    Likelihood, PoissonFactorModel, ScalarPrior,
};
use nbibp::numerics::RngStream;
use nbibp::structures::{log_pmf_array, log_pmf_struct, CombStruct, FeatureArray, History};
use nbibp::validation::run_suites;

/// Everything a command produces. Nothing is written until the command has
/// finished, so a failed command leaves no partial output behind.
pub struct Output {
    pub lines: Vec<String>,
    pub path: Option<PathBuf>,
    /// Extra files, written alongside the main output.
    pub extra: Vec<(PathBuf, String)>,
    pub success: bool,
}

impl Output {
    fn new(path: Option<PathBuf>) -> Self {
        Self {
            lines: Vec::new(),
            path,
            extra: Vec::new(),
            success: true,
        }
    }

    fn push(&mut self, record: &impl Serialize) -> Result<()> {
        self.lines.push(serde_json::to_string(record)?);
        Ok(())
    }

    pub fn text(&self) -> String {
        let mut s = self.lines.join("\n");
        if !s.is_empty() {
            s.push('\n');
        }
        s
    }
}

fn mean(sum: f64, count: usize) -> Option<f64> {
    (count > 0).then(|| sum / count as f64)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn simulate(args: &SimulateArgs) -> Result<Output> {
    let hp = args.check()?;
    let mut out = Output::new(args.out.clone());
    let (mut kappa, mut mass, mut entries) = (0.0, 0.0, 0usize);
    for rep in 0..args.reps {
        let mut rng = RngStream::new(args.seed, rep as u64);
        let w = match args.construction {
            Construction::Restaurant => nbibp_simulate(args.n, &hp, &mut rng)?,
            Construction::Oracle => truncated_oracle_simulate(args.n, &hp, args.epsilon, &mut rng)?,
            Construction::Finitary => {
                let draw = bnbp_sample_finitary(&hp, &mut rng)?;
                let columns = draw
                    .ordinary
                    .into_iter()
                    .map(|z| History::new(vec![z]))
                    .collect::<Result<_, _>>()?;
                FeatureArray::new(1, columns)?
            }
        };
        kappa += w.kappa() as f64;
        for h in w.columns() {
            for &x in h.entries().iter().filter(|&&x| x > 0) {
                mass += x as f64;
                entries += 1;
            }
        }
        out.push(&json!({ "rep": rep, "w": w }))?;
    }
    out.push(&json!({
        "summary": {
            "reps": args.reps,
            "n": args.n,
            "mean_kappa": mean(kappa, args.reps),
            "mean_row_features": mean(entries as f64, args.reps * args.n),
            "mean_multiplicity": mean(mass, entries),
        }
    }))?;
    Ok(out)
}

enum Record {
    Array(FeatureArray),
    Structure(CombStruct),
}

fn parse_record(line: &str) -> Result<Record> {
    let value: Value = serde_json::from_str(line)?;
    let has = |k: &str| value.get(k).is_some();
    if has("columns") {
        Ok(Record::Array(serde_json::from_value(value)?))
    } else if has("counts") {
        Ok(Record::Structure(serde_json::from_value(value)?))
    } else {
        bail!("record has neither \"columns\" nor \"counts\"")
    }
}

pub fn pmf(args: &PmfArgs) -> Result<Output> {
    let hp = args.hyper.hyperparams()?;
    let text = read(&args.input)?;
    let mut out = Output::new(args.out.clone());
    let (mut records, mut errors) = (0usize, 0usize);
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = line_no + 1;
        records += 1;
        let evaluated = parse_record(line).and_then(|rec| {
            Ok(match rec {
                Record::Array(w) => {
                    let m = CombStruct::from_array(&w);
                    json!({
                        "line": line_no,
                        "kind": "array",
                        "log_pmf": log_pmf_array(&w, &hp)?,
                        "log_pmf_struct": log_pmf_struct(&m, &hp)?,
                        "log_ordering_count": m.ordering_count(),
                    })
                }
                Record::Structure(m) => json!({
                    "line": line_no,
                    "kind": "structure",
                    "log_pmf": log_pmf_struct(&m, &hp)?,
                }),
            })
        });
        match evaluated {
            Ok(v) => out.push(&v)?,
            Err(e) => {
                errors += 1;
                out.push(&json!({ "line": line_no, "error": format!("{e:#}") }))?;
            }
        }
    }
    out.push(&json!({ "summary": { "records": records, "errors": errors } }))?;
    out.success = errors == 0;
    Ok(out)
}

pub fn sample(args: &SampleArgs) -> Result<Output> {
    let hp = args.hyper.hyperparams()?;
    let w: FeatureArray = serde_json::from_str(&read(&args.input)?)
        .with_context(|| format!("parsing {}", args.input.display()))?;
    let mut out = Output::new(args.out.clone());
    let mut new_features = 0.0;
    for rep in 0..args.reps {
        let mut rng = RngStream::new(args.seed, rep as u64);
        let mut next = w.clone();
        for _ in 0..args.n {
            next = predictive_step(&next, &hp, &mut rng)?;
        }
        new_features += (next.kappa() - w.kappa()) as f64;
        out.push(&json!({ "rep": rep, "w": next }))?;
    }
    out.push(&json!({
        "summary": {
            "reps": args.reps,
            "added_rows": args.n,
            "mean_new_features": mean(new_features, args.reps),
        }
    }))?;
    Ok(out)
}

pub fn infer(args: &InferArgs) -> Result<Output> {
    if args.geweke {
        return geweke(args);
    }
    let hp = args.hyper.hyperparams()?;
    let priors = args.priors_or(HyperPriors {
        mass: ScalarPrior::default(),
        c: ScalarPrior::Fixed,
        r: ScalarPrior::Fixed,
    })?;
    let theta_prior = args.theta_or(GammaPrior::new(1.0, 1.0)?)?;
    let config = ChainConfig {
        sweeps: args.sweeps.unwrap_or(1000),
        thin: args.thin,
        full_state: args.full_state,
        ..ChainConfig::default()
    };
    config.validate()?;
    let mut out = Output::new(args.out.clone());

    let model = if args.synthetic {
        let (Some(n), Some(v)) = (args.n, args.v) else {
            bail!("--synthetic needs --n and --v");
        };
        if n == 0 || v == 0 {
            bail!("--n and --v must be positive");
        }
        let mut rng = RngStream::new(args.seed, 0);
        let w = nbibp_simulate(n, &hp, &mut rng)?;
        let columns: Vec<Vec<u64>> = w.columns().iter().map(|h| h.entries().to_vec()).collect();
        let theta: Vec<Vec<f64>> = (0..w.kappa())
            .map(|_| (0..v).map(|_| theta_prior.sample(&mut rng)).collect())
            .collect();
        let y = PoissonFactorModel::sample_data(&columns, &theta, n, v, &mut rng);
        let truth = json!({ "truth": { "hp": hp, "w": w, "theta": theta, "y": y } });
        match &args.truth {
            Some(path) => out
                .extra
                .push((path.clone(), serde_json::to_string(&truth)? + "\n")),
            None => out.push(&truth)?,
        }
        PoissonFactorModel::new(y, theta_prior)?
    } else if let Some(path) = &args.input {
        let y: Vec<Vec<u64>> = serde_json::from_str(&read(path)?)
            .with_context(|| format!("parsing {} as a count matrix", path.display()))?;
        PoissonFactorModel::new(y, theta_prior)?
    } else {
        bail!("infer needs one of --in, --synthetic or --geweke");
    };

    let mut state = ChainState::from_prior(&model, hp, priors, RngStream::new(args.seed, 1))?;
    let (mut records, mut kappa, mut mass) = (0usize, 0.0, 0.0);
    let mut last = f64::NAN;
    run_chain_with(&model, &mut state, &config, |rec| {
        records += 1;
        kappa += rec.kappa as f64;
        mass += rec.mass;
        last = rec.log_joint;
        out.lines
            .push(serde_json::to_string(&rec).expect("records serialize"));
        Ok(())
    })?;
    out.push(&json!({
        "summary": {
            "rows": model.rows(),
            "columns": model.columns(),
            "sweeps": config.sweeps,
            "records": records,
            "mean_kappa": mean(kappa, records),
            "mean_mass": mean(mass, records),
            "final_log_joint": last,
        }
    }))?;
    Ok(out)
}

fn geweke(args: &InferArgs) -> Result<Output> {
    let base = GewekeConfig::small();
    let mut config = GewekeConfig {
        n: args.n.unwrap_or(base.n),
        v: args.v.unwrap_or(base.v),
        hp: args.hyper.hyperparams_or(&base.hp)?,
        priors: args.priors_or(base.priors)?,
        theta_prior: args.theta_or(base.theta_prior)?,
        forward_draws: args.reps.unwrap_or(base.forward_draws),
        conditional_iters: args.sweeps.unwrap_or(base.conditional_iters),
        ..base
    };
    config.chain.thin = 1;
    if config.n == 0 || config.v == 0 {
        bail!("--n and --v must be positive");
    }
    if config.forward_draws < 2 || config.conditional_iters < config.batches {
        bail!(
            "the joint-distribution test needs --reps ≥ 2 and --sweeps ≥ {}",
            config.batches
        );
    }
    let report = geweke_test(&config, &mut RngStream::new(args.seed, 0))?;
    let mut out = Output::new(args.out.clone());
    for stat in &report.stats {
        out.push(stat)?;
    }
    out.push(&json!({ "summary": { "passed": report.passed } }))?;
    out.success = report.passed;
    Ok(out)
}

pub fn validate(args: &ValidateArgs) -> Result<Output> {
    let suites = parse_suites(&args.suite)?;
    let report = run_suites(&suites, args.seed);
    for s in &report.suites {
        eprintln!("{}", s.summary());
    }
    let mut out = Output::new(args.out.clone());
    out.push(&report)?;
    out.success = report.passed;
    Ok(out)
}
