//! Random forest: bootstrap samples, averaged leaf outputs. Classification
//! trees look at `sqrt(p)` random features per node; regression trees look
//! at all of them, so only the bootstrap decorrelates them. Tree `i` draws from its own ChaCha stream `i` of the seed,
//! so results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::tree::{Tree, TreeParams};
use super::{Dataset, Target};
use crate::error::Result;

pub const DEFAULT_TREES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: DEFAULT_TREES,
            max_depth: super::tree::DEFAULT_MAX_DEPTH,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Forest {
    trees: Vec<Tree>,
    pub importances: Vec<f64>,
}

impl Forest {
    pub fn fit(x: &Dataset, y: &Target, params: &ForestParams, seed: u64) -> Result<Forest> {
        let n = x.n_rows();
        let p = x.n_cols();
        let tree_params = TreeParams {
            max_depth: params.max_depth,
            min_samples_split: 2,
            max_features: match y {
                Target::Classes { .. } => Some(((p as f64).sqrt().floor() as usize).max(1)),
                Target::Values(_) => None,
            },
        };
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                Tree::fit_rows(x, y, &rows, &tree_params, Some(&mut rng))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut importances = vec![0.0; p];
        for t in &trees {
            for (acc, v) in importances.iter_mut().zip(&t.importances) {
                *acc += v;
            }
        }
        let total: f64 = importances.iter().sum();
        if total > 0.0 {
            importances.iter_mut().for_each(|v| *v /= total);
        }
        Ok(Forest { trees, importances })
    }

    /// Mean leaf output across trees, per row.
    pub fn predict_raw(&self, x: &Dataset) -> Vec<Vec<f64>> {
        (0..x.n_rows())
            .map(|r| {
                let mut acc = self.trees[0].leaf_value(x, r).to_vec();
                for t in &self.trees[1..] {
                    for (a, v) in acc.iter_mut().zip(t.leaf_value(x, r)) {
                        *a += v;
                    }
                }
                let k = self.trees.len() as f64;
                acc.iter_mut().for_each(|a| *a /= k);
                acc
            })
            .collect()
    }
}
