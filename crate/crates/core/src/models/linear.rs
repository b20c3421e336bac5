//! Gradient-descent linear models: logistic regression (full batch) and
//! least-squares regression (per-sample SGD).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Dataset, Target};
use crate::error::{Error, Result};

pub const EPOCHS: usize = 500;
pub const LEARNING_RATE: f64 = 0.01;

fn dot(w: &[f64], x: &Dataset, r: usize) -> f64 {
    w.iter().enumerate().map(|(c, wc)| wc * x.get(r, c)).sum()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone)]
pub struct Logistic {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl Logistic {
    pub fn fit(x: &Dataset, y: &Target) -> Result<Logistic> {
        let Target::Classes { labels, n_classes } = y else {
            return Err(Error::Config("logistic regression needs class labels".into()));
        };
        if *n_classes != 2 {
            return Err(Error::Config(format!("logistic regression is binary, got {n_classes} classes")));
        }
        let (n, p) = (x.n_rows(), x.n_cols());
        let mut w = vec![0.0; p];
        let mut b = 0.0;
        let mut grad = vec![0.0; p];
        for _ in 0..EPOCHS {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut gb = 0.0;
            for r in 0..n {
                let err = sigmoid(dot(&w, x, r) + b) - labels[r] as f64;
                for (c, g) in grad.iter_mut().enumerate() {
                    *g += err * x.get(r, c);
                }
                gb += err;
            }
            for (wc, g) in w.iter_mut().zip(&grad) {
                *wc -= LEARNING_RATE * g / n as f64;
            }
            b -= LEARNING_RATE * gb / n as f64;
        }
        Ok(Logistic { weights: w, bias: b })
    }

    pub fn predict_proba(&self, x: &Dataset) -> Vec<Vec<f64>> {
        (0..x.n_rows())
            .map(|r| {
                let p = sigmoid(dot(&self.weights, x, r) + self.bias);
                vec![1.0 - p, p]
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct LinearSgd {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearSgd {
    /// The bias starts at the target mean. The step is capped at
    /// `1 / max ||x||^2` so single-sample updates cannot diverge.
    pub fn fit(x: &Dataset, y: &Target, seed: u64) -> Result<LinearSgd> {
        let Target::Values(v) = y else {
            return Err(Error::Config("linear regression needs numeric targets".into()));
        };
        let (n, p) = (x.n_rows(), x.n_cols());
        let max_norm = (0..n)
            .map(|r| (0..p).map(|c| x.get(r, c).powi(2)).sum::<f64>())
            .fold(0.0, f64::max);
        let lr = if max_norm > 0.0 { LEARNING_RATE.min(1.0 / max_norm) } else { LEARNING_RATE };
        let mut w = vec![0.0; p];
        let mut b = v.iter().sum::<f64>() / n as f64;
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..EPOCHS {
            order.shuffle(&mut rng);
            for &r in &order {
                let err = dot(&w, x, r) + b - v[r];
                for (c, wc) in w.iter_mut().enumerate() {
                    *wc -= lr * err * x.get(r, c);
                }
                b -= lr * err;
            }
        }
        Ok(LinearSgd { weights: w, bias: b })
    }

    pub fn predict(&self, x: &Dataset) -> Vec<f64> {
        (0..x.n_rows()).map(|r| dot(&self.weights, x, r) + self.bias).collect()
    }
}
