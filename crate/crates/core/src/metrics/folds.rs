//! Seeded 5-fold partition with rotating train/validation/test roles.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::MetricError;

pub const N_FOLDS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub seed: u64,
    assignment: BTreeMap<String, usize>,
}

/// Roles in one iteration: three training folds, one validation fold, one
/// test fold. Ids are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldRoles {
    pub test_fold: usize,
    pub validation_fold: usize,
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
}

impl FoldPlan {
    /// Shuffles the sorted, deduplicated ids with `seed` and deals them
    /// round-robin, so fold sizes differ by at most one.
    pub fn new<I, S>(ids: I, seed: u64) -> Result<Self, MetricError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let ids: BTreeSet<String> = ids.into_iter().map(Into::into).collect();
        if ids.len() < N_FOLDS {
            return Err(MetricError::TooFewDomains { need: N_FOLDS, got: ids.len() });
        }
        let mut order: Vec<String> = ids.into_iter().collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let assignment = order.into_iter().enumerate().map(|(i, id)| (id, i % N_FOLDS)).collect();
        Ok(Self { seed, assignment })
    }

    pub fn fold_of(&self, id: &str) -> Option<usize> {
        self.assignment.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn members(&self, fold: usize) -> Vec<String> {
        self.assignment.iter().filter(|(_, &f)| f == fold).map(|(id, _)| id.clone()).collect()
    }

    /// Iteration `i` tests on fold `i` and validates on fold `i + 1`.
    pub fn roles(&self, iteration: usize) -> FoldRoles {
        let test_fold = iteration % N_FOLDS;
        let validation_fold = (iteration + 1) % N_FOLDS;
        let mut roles = FoldRoles {
            test_fold,
            validation_fold,
            train: Vec::new(),
            validation: Vec::new(),
            test: Vec::new(),
        };
        for (id, &f) in &self.assignment {
            let bucket = if f == test_fold {
                &mut roles.test
            } else if f == validation_fold {
                &mut roles.validation
            } else {
                &mut roles.train
            };
            bucket.push(id.clone());
        }
        roles
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("d{i}")).collect()
    }

    #[test]
    fn folds_partition_and_balance() {
        let plan = FoldPlan::new(ids(23), 7).unwrap();
        let sizes: Vec<usize> = (0..N_FOLDS).map(|f| plan.members(f).len()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 23);
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let mut tested = BTreeSet::new();
        for i in 0..N_FOLDS {
            let r = plan.roles(i);
            assert_eq!(r.train.len() + r.validation.len() + r.test.len(), 23);
            assert!(r.test.iter().all(|id| !r.train.contains(id) && !r.validation.contains(id)));
            tested.extend(r.test);
        }
        assert_eq!(tested.len(), 23);
    }

    #[test]
    fn seed_determines_plan() {
        assert_eq!(FoldPlan::new(ids(30), 1).unwrap(), FoldPlan::new(ids(30), 1).unwrap());
        assert_ne!(FoldPlan::new(ids(30), 1).unwrap(), FoldPlan::new(ids(30), 2).unwrap());
        // input order does not matter
        let mut rev = ids(30);
        rev.reverse();
        assert_eq!(FoldPlan::new(rev, 1).unwrap(), FoldPlan::new(ids(30), 1).unwrap());
    }

    #[test]
    fn too_few_ids() {
        assert!(FoldPlan::new(ids(4), 0).is_err());
    }
}
