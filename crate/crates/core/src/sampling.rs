//! Seeded random draws shared by the generator, training and the
//! certification suites.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::game::Policy;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for child `index` of `root`.
pub fn child_seed(root: u64, stream: u64, index: u64) -> u64 {
    // SplitMix64 finaliser over a fixed mixing of the three inputs
    let mut z = root ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One draw from a symmetric Dirichlet via normalised Gamma variates.
pub fn dirichlet(rng: &mut impl Rng, n: usize, concentration: f64) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("concentration must be positive");
    loop {
        let w: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
        let s: f64 = w.iter().sum();
        if s > 0.0 && s.is_finite() {
            return w.into_iter().map(|x| x / s).collect();
        }
    }
}

/// Policy whose rows are independent Dirichlet draws.
pub fn random_policy(rng: &mut impl Rng, n_states: usize, n_actions: usize, concentration: f64) -> Policy {
    let mut m = Array2::zeros((n_states, n_actions));
    for s in 0..n_states {
        for (a, p) in dirichlet(rng, n_actions, concentration).into_iter().enumerate() {
            m[[s, a]] = p;
        }
    }
    Policy::new(m).expect("normalised Dirichlet rows are distributions")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_rows_are_distributions() {
        let mut rng = seeded(1);
        for conc in [0.1, 1.0, 1e6] {
            let p = dirichlet(&mut rng, 5, conc);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn child_seeds_differ() {
        let a = child_seed(0, 1, 0);
        let b = child_seed(0, 1, 1);
        let c = child_seed(0, 2, 0);
        assert!(a != b && a != c && b != c);
        assert_eq!(a, child_seed(0, 1, 0));
    }
}
