use serde::{Deserialize, Serialize};

use super::kernels::{
    shuffle_columns, update_c_r, update_entry, update_mass_t, update_singletons, update_theta,
};
use super::likelihood::Likelihood;
use super::state::{log_joint, ChainState, StateSnapshot};
use crate::error::{domain, Result};

/// Which kernels a sweep runs, and how often states are emitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChainConfig {
    pub sweeps: usize,
    /// Emit every `thin`-th sweep (the initial state is always emitted).
    pub thin: usize,
    pub entries: bool,
    pub singletons: bool,
    pub theta: bool,
    pub mass: bool,
    pub c_r: bool,
    pub shuffle: bool,
    pub slice_width: f64,
    /// Include `W` and `Θ` in emitted records.
    pub full_state: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            sweeps: 1000,
            thin: 1,
            entries: true,
            singletons: true,
            theta: true,
            mass: true,
            c_r: true,
            shuffle: true,
            slice_width: 1.0,
            full_state: false,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(domain("ChainConfig", "thin must be at least 1"));
        }
        if !(self.slice_width > 0.0 && self.slice_width.is_finite()) {
            return Err(domain("ChainConfig", "slice width must be positive"));
        }
        Ok(())
    }
}

/// Summary of one emitted state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub sweep: usize,
    pub kappa: usize,
    /// `Σ_{i,j} W_{i,j}`.
    pub total: u64,
    pub mass: f64,
    pub c: f64,
    pub r: f64,
    pub log_joint: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSnapshot>,
}

impl ChainRecord {
    fn of<L: Likelihood>(sweep: usize, state: &ChainState, model: &L, full: bool) -> Result<Self> {
        Ok(Self {
            sweep,
            kappa: state.kappa(),
            total: state.total(),
            mass: state.hp.mass(),
            c: state.hp.c(),
            r: state.hp.r(),
            log_joint: log_joint(state, model)?,
            state: full.then(|| state.snapshot()),
        })
    }
}

/// One sweep: every non-singleton entry, then the singleton move for each
/// row, then `Θ`, `T`, `c` and `r`, then a column shuffle. Kernels disabled
/// in `config` are skipped.
pub fn sweep<L: Likelihood>(state: &mut ChainState, model: &L, config: &ChainConfig) -> Result<()> {
    if config.entries {
        for i in 0..state.n() {
            for j in 0..state.kappa() {
                if state.sum_without(j, i) > 0 {
                    update_entry(state, model, i, j)?;
                }
            }
        }
    }
    if config.singletons {
        for i in 0..state.n() {
            update_singletons(state, model, i)?;
        }
    }
    if config.theta {
        update_theta(state, model)?;
    }
    if config.mass {
        update_mass_t(state, config.slice_width)?;
    }
    if config.c_r {
        update_c_r(state, config.slice_width)?;
    }
    if config.shuffle {
        shuffle_columns(state);
    }
    Ok(())
}

/// Runs `config.sweeps` sweeps from `state`, passing the initial state and
/// every `thin`-th state to `emit`.
pub fn run_chain_with<L: Likelihood>(
    model: &L,
    state: &mut ChainState,
    config: &ChainConfig,
    mut emit: impl FnMut(ChainRecord) -> Result<()>,
) -> Result<()> {
    config.validate()?;
    state.check_model(model)?;
    emit(ChainRecord::of(0, state, model, config.full_state)?)?;
    for s in 1..=config.sweeps {
        sweep(state, model, config)?;
        if s % config.thin == 0 {
            emit(ChainRecord::of(s, state, model, config.full_state)?)?;
        }
    }
    Ok(())
}

/// [`run_chain_with`] collecting the records.
pub fn run_chain<L: Likelihood>(
    model: &L,
    state: &mut ChainState,
    config: &ChainConfig,
) -> Result<Vec<ChainRecord>> {
    let mut out = Vec::with_capacity(config.sweeps / config.thin.max(1) + 1);
    run_chain_with(model, state, config, |rec| {
        out.push(rec);
        Ok(())
    })?;
    Ok(out)
}
