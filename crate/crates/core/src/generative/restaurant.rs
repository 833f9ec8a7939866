use serde::{Deserialize, Serialize};

use super::finitary::{posterior_hyper, AtomSource};
use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::structures::{FeatureArray, History, Hyperparams};

/// A dish of the negative binomial buffet and its servings so far.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DishState {
    pub id: u64,
    /// Cumulative servings `S_{m,k}` over all customers so far.
    pub servings: u64,
    /// Servings taken by each customer so far.
    pub entries: Vec<u64>,
}

/// The negative binomial Indian buffet after `customers` arrivals.
///
/// Dishes are kept in creation order; dishes created by the same customer
/// are ordered as drawn.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Restaurant {
    customers: usize,
    dishes: Vec<DishState>,
}

impl Restaurant {
    /// A restaurant with no customers.
    pub fn new() -> Self {
        Self::default()
    }

    /// Resumes from an observed array, one dish per column.
    pub fn from_array(w: &FeatureArray) -> Self {
        let dishes = w
            .columns()
            .iter()
            .enumerate()
            .map(|(k, h)| DishState {
                id: k as u64,
                servings: h.total(),
                entries: h.entries().to_vec(),
            })
            .collect();
        Self {
            customers: w.n(),
            dishes,
        }
    }

    pub fn customers(&self) -> usize {
        self.customers
    }

    pub fn dishes(&self) -> &[DishState] {
        &self.dishes
    }

    /// Seats one more customer.
    ///
    /// With `m` customers seated, each existing dish `k` receives
    /// `BNB(r, S_{m,k}, c + m r)` servings, and `Poisson(c T [ψ(c + (m+1) r) -
    /// ψ(c + m r)])` new dishes receive `Digamma(r, c + m r)` servings each.
    pub fn step(&mut self, hp: &Hyperparams, rng: &mut RngStream) -> Result<()> {
        hp.require_nonatomic("Restaurant::step")?;
        let seen: Vec<(AtomSource, u64)> = self
            .dishes
            .iter()
            .map(|d| (AtomSource::Ordinary(d.id), d.servings))
            .collect();
        let draw = posterior_hyper(hp, &seen, self.customers)?.draw(hp.r(), rng)?;
        for (dish, z) in self.dishes.iter_mut().zip(draw.fixed) {
            dish.entries.push(z);
            dish.servings = dish.servings.saturating_add(z);
        }
        let m = self.customers;
        let first_id = self.dishes.last().map_or(0, |d| d.id + 1);
        for (id, z) in (first_id..).zip(draw.ordinary) {
            let mut entries = vec![0; m + 1];
            entries[m] = z;
            self.dishes.push(DishState {
                id,
                servings: z,
                entries,
            });
        }
        self.customers += 1;
        Ok(())
    }

    /// The `customers × dishes` array in dish-creation order.
    pub fn to_array(&self) -> Result<FeatureArray> {
        let columns = self
            .dishes
            .iter()
            .map(|d| History::new(d.entries.clone()))
            .collect::<Result<_>>()?;
        FeatureArray::new(self.customers, columns)
    }
}

/// Simulates `n` customers of the negative binomial Indian buffet process.
pub fn nbibp_simulate(n: usize, hp: &Hyperparams, rng: &mut RngStream) -> Result<FeatureArray> {
    if n == 0 {
        return Err(Error::Precondition(
            "simulation needs n ≥ 1 customers".into(),
        ));
    }
    let mut rest = Restaurant::new();
    for _ in 0..n {
        rest.step(hp, rng)?;
    }
    rest.to_array()
}

/// Draws row `n + 1` from its conditional law given the `n` rows of `w`.
pub fn predictive_step(
    w: &FeatureArray,
    hp: &Hyperparams,
    rng: &mut RngStream,
) -> Result<FeatureArray> {
    let mut rest = Restaurant::from_array(w);
    rest.step(hp, rng)?;
    rest.to_array()
}
