//! Small random instances for unit tests.

use ndarray::{Array1, Array2, Array3, Array4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{MarkovGame, Policy};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn simplex_row(rng: &mut impl Rng, n: usize, floor: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| floor + rng.random::<f64>()).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

pub fn game(rng: &mut impl Rng, ns: usize, na: usize, nb: usize, gamma: f64) -> MarkovGame {
    let mut p = Array4::zeros((ns, na, nb, ns));
    for s in 0..ns {
        for a in 0..na {
            for b in 0..nb {
                let row = simplex_row(rng, ns, 0.0);
                let mut acc = 0.0;
                for t in 0..ns - 1 {
                    p[[s, a, b, t]] = row[t];
                    acc += row[t];
                }
                p[[s, a, b, ns - 1]] = 1.0 - acc;
            }
        }
    }
    let r = Array3::from_shape_fn((ns, na, nb), |_| rng.random::<f64>());
    let rho = Array1::from(vec![1.0 / ns as f64; ns]);
    MarkovGame::new(p, r, rho, gamma).unwrap()
}

/// Random policy with every entry bounded away from zero.
pub fn interior_policy(rng: &mut impl Rng, ns: usize, na: usize) -> Policy {
    let mut m = Array2::zeros((ns, na));
    for s in 0..ns {
        let row = simplex_row(rng, na, 0.2);
        let mut acc = 0.0;
        for a in 0..na - 1 {
            m[[s, a]] = row[a];
            acc += row[a];
        }
        m[[s, na - 1]] = 1.0 - acc;
    }
    Policy::new(m).unwrap()
}
