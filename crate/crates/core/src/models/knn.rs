//! K-nearest neighbours with Euclidean distance. Equal distances are broken
//! by training-row order.

use super::{Dataset, Target};

pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone)]
pub struct Knn {
    k: usize,
    train: Vec<Vec<f64>>,
    target: Target,
}

impl Knn {
    pub fn fit(x: &Dataset, y: &Target, k: usize) -> Knn {
        Knn {
            k: k.clamp(1, x.n_rows().max(1)),
            train: (0..x.n_rows()).map(|r| x.row(r)).collect(),
            target: y.clone(),
        }
    }

    fn neighbours(&self, q: &[f64]) -> Vec<usize> {
        let mut d: Vec<(f64, usize)> = self
            .train
            .iter()
            .enumerate()
            .map(|(i, t)| (t.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i))
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        d.truncate(self.k);
        d.into_iter().map(|(_, i)| i).collect()
    }

    /// Neighbour class shares, or `[mean]` for regression.
    pub fn predict_raw(&self, x: &Dataset) -> Vec<Vec<f64>> {
        (0..x.n_rows())
            .map(|r| {
                let nb = self.neighbours(&x.row(r));
                let k = nb.len() as f64;
                match &self.target {
                    Target::Classes { labels, n_classes } => {
                        let mut p = vec![0.0; *n_classes];
                        for i in nb {
                            p[labels[i]] += 1.0 / k;
                        }
                        p
                    }
                    Target::Values(v) => vec![nb.iter().map(|&i| v[i]).sum::<f64>() / k],
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regression_mean_of_nearest() {
        let x = Dataset::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![10.0]]).unwrap();
        let y = Target::Values(vec![1.0, 2.0, 3.0, 100.0]);
        let m = Knn::fit(&x, &y, 3);
        let q = Dataset::from_rows(&[vec![1.1]]).unwrap();
        assert_eq!(m.predict_raw(&q), vec![vec![2.0]]);
        // k larger than the training set is clamped
        assert_eq!(Knn::fit(&x, &y, 50).k, 4);
    }
}
