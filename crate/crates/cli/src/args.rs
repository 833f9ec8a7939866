use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nbibp::inference::{GammaPrior, HyperPriors, ScalarPrior};
use nbibp::structures::Hyperparams;
use nbibp::validation::Suite;

#[derive(Debug, Parser)]
#[command(
    name = "nbibp",
    version,
    about = "Beta negative binomial processes: simulation, exact p.m.f.s and posterior inference"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate replicate feature arrays.
    Simulate(SimulateArgs),
    /// Evaluate log p.m.f.s of arrays or structures read from a file.
    Pmf(PmfArgs),
    /// Extend an observed array by rows drawn from the predictive law.
    Sample(SampleArgs),
    /// Run the posterior sampler on count data.
    Infer(InferArgs),
    /// Run verification suites and print a JSON report.
    Validate(ValidateArgs),
}

/// Hyperparameters `(r, c, T)`; each defaults to 1 unless a command supplies
/// its own defaults.
#[derive(Debug, Clone, Args)]
pub struct HyperArgs {
    /// Negative binomial shape r.
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Beta process concentration c.
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Total mass T of the base measure.
    #[arg(long = "mass-T", allow_negative_numbers = true)]
    pub mass_t: Option<f64>,
}

impl HyperArgs {
    pub fn hyperparams(&self) -> Result<Hyperparams> {
        self.hyperparams_or(&Hyperparams::new(1.0, 1.0, 1.0)?)
    }

    pub fn hyperparams_or(&self, default: &Hyperparams) -> Result<Hyperparams> {
        Ok(Hyperparams::new(
            self.r.unwrap_or(default.r()),
            self.c.unwrap_or(default.c()),
            self.mass_t.unwrap_or(default.mass()),
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    /// Sequential buffet simulator.
    Restaurant,
    /// Truncated beta process followed by negative binomial draws.
    Oracle,
    /// One negative binomial process draw with the beta process integrated out.
    Finitary,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Rows per replicate.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Construction::Restaurant)]
    pub construction: Construction,
    /// Weight truncation of the oracle construction.
    #[arg(long, default_value_t = 1e-4, allow_negative_numbers = true)]
    pub epsilon: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PmfArgs {
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Line-delimited arrays `{"n","columns"}` or structures `{"n","counts"}`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// A feature array `{"n","columns"}`.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Rows to add.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Count matrix as a JSON array of rows.
    #[arg(long = "in", conflicts_with_all = ["synthetic", "geweke"])]
    pub input: Option<PathBuf>,
    /// Draw (W, Θ, y) from the model first and infer from that y.
    #[arg(long, conflicts_with = "geweke")]
    pub synthetic: bool,
    /// Run the joint-distribution test of the sampler instead of a chain.
    #[arg(long)]
    pub geweke: bool,
    /// Rows of synthetic data.
    #[arg(long)]
    pub n: Option<usize>,
    /// Columns of synthetic data.
    #[arg(long)]
    pub v: Option<usize>,
    /// Sweeps of the chain [default: 1000], or successive-conditional
    /// iterations of the joint-distribution test [default: 100000].
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    /// Forward draws of the joint-distribution test [default: 100000].
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: u64,
    /// Prior on T: `fixed`, `gamma:SHAPE,RATE` or `lognormal:MU,SIGMA`
    /// [default: gamma:1,1].
    #[arg(long)]
    pub mass_prior: Option<String>,
    /// Prior on c [default: fixed].
    #[arg(long)]
    pub c_prior: Option<String>,
    /// Prior on r [default: fixed].
    #[arg(long)]
    pub r_prior: Option<String>,
    /// Gamma prior on the factor loadings, `SHAPE,RATE` [default: 1,1].
    #[arg(long)]
    pub theta_prior: Option<String>,
    /// Include W and Θ in every chain record.
    #[arg(long)]
    pub full_state: bool,
    /// Where synthetic ground truth goes; defaults to the first output line.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// `all`, `none` or a comma-separated list of suite names.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SimulateArgs {
    pub fn check(&self) -> Result<Hyperparams> {
        let hp = self.hyper.hyperparams()?;
        if self.n == 0 {
            bail!("--n must be at least 1");
        }
        if self.construction == Construction::Finitary && self.n != 1 {
            bail!("--construction finitary draws a single row; use --n 1");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            bail!("--epsilon must lie in (0, 1), got {}", self.epsilon);
        }
        Ok(hp)
    }
}

impl InferArgs {
    /// Priors on `(T, c, r)`, falling back to `default` for unset flags.
    pub fn priors_or(&self, default: HyperPriors) -> Result<HyperPriors> {
        let pick = |flag: &Option<String>, fallback: ScalarPrior, name: &str| match flag {
            Some(s) => parse_prior(s).with_context(|| format!("--{name}")),
            None => Ok(fallback),
        };
        Ok(HyperPriors {
            mass: pick(&self.mass_prior, default.mass, "mass-prior")?,
            c: pick(&self.c_prior, default.c, "c-prior")?,
            r: pick(&self.r_prior, default.r, "r-prior")?,
        })
    }

    pub fn theta_or(&self, default: GammaPrior) -> Result<GammaPrior> {
        match &self.theta_prior {
            Some(s) => {
                let (a, b) = parse_pair(s).context("--theta-prior")?;
                Ok(GammaPrior::new(a, b).context("--theta-prior")?)
            }
            None => Ok(default),
        }
    }
}

pub fn parse_suites(selection: &str) -> Result<Vec<Suite>> {
    Ok(Suite::parse_selection(selection)?)
}

fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(',')
        .with_context(|| format!("expected two comma-separated numbers, got {s:?}"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

pub fn parse_prior(s: &str) -> Result<ScalarPrior> {
    let prior = match s.split_once(':') {
        None if s == "fixed" => ScalarPrior::Fixed,
        Some(("gamma", rest)) => {
            let (shape, rate) = parse_pair(rest)?;
            ScalarPrior::Gamma { shape, rate }
        }
        Some(("lognormal", rest)) => {
            let (mu, sigma) = parse_pair(rest)?;
            ScalarPrior::LogNormal { mu, sigma }
        }
        _ => bail!("unknown prior {s:?}; expected fixed, gamma:A,B or lognormal:MU,SIGMA"),
    };
    prior.validate()?;
    Ok(prior)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priors_parse() {
        assert_eq!(parse_prior("fixed").unwrap(), ScalarPrior::Fixed);
        assert_eq!(
            parse_prior("gamma:2,0.5").unwrap(),
            ScalarPrior::Gamma {
                shape: 2.0,
                rate: 0.5
            }
        );
        assert!(parse_prior("gamma:-1,1").is_err());
        assert!(parse_prior("lognormal:0").is_err());
        assert!(parse_prior("beta:1,1").is_err());
    }
}
