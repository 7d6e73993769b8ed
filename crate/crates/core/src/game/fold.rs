use ndarray::{Array3, Array4};

use crate::error::Result;
use crate::game::policy::check_budget;
use crate::game::{MarkovGame, Policy};

/// Absorbs the ε-coupling into the game. In the returned game the attacker
/// chooses the adversarial component directly:
///
/// `r̃(s,a,b) = (1-ε) Σ_{b'} benign(b'|s) r(s,a,b') + ε r(s,a,b)`, and the
/// same mixture for transitions.
pub fn fold_coupling(g: &MarkovGame, benign: &Policy, eps: f64) -> Result<MarkovGame> {
    g.ensure_valid()?;
    g.check_attacker(benign)?;
    check_budget(eps)?;
    let (ns, na, nb) = g.reward().dim();
    let r = g.reward();
    let p = g.transition();
    let mut reward = Array3::zeros((ns, na, nb));
    let mut transition = Array4::zeros((ns, na, nb, ns));
    for s in 0..ns {
        for a in 0..na {
            let mut r_ben = 0.0;
            let mut p_ben = vec![0.0; ns];
            for b in 0..nb {
                let w = benign.get(s, b);
                r_ben += w * r[[s, a, b]];
                for t in 0..ns {
                    p_ben[t] += w * p[[s, a, b, t]];
                }
            }
            for b in 0..nb {
                // convex combination of values in [0, 1]; clamp only absorbs rounding
                reward[[s, a, b]] = ((1.0 - eps) * r_ben + eps * r[[s, a, b]]).clamp(0.0, 1.0);
                for t in 0..ns {
                    transition[[s, a, b, t]] = (1.0 - eps) * p_ben[t] + eps * p[[s, a, b, t]];
                }
            }
        }
    }
    let folded = MarkovGame::from_arrays(transition, reward, g.rho().clone(), g.gamma())?;
    folded.ensure_valid()?;
    Ok(match g.rescale() {
        Some(rs) => folded.with_rescale(rs),
        None => folded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{value, CoupledPolicy};
    use ndarray::{array, Array1};

    fn small_game() -> MarkovGame {
        let p = Array4::from_shape_fn((2, 2, 3, 2), |(s, a, b, t)| {
            let x = 0.1 + 0.2 * ((s + a + b) % 3) as f64;
            if t == 0 {
                x
            } else {
                1.0 - x
            }
        });
        let r = Array3::from_shape_fn((2, 2, 3), |(s, a, b)| ((s * 7 + a * 3 + b * 5) % 11) as f64 / 10.0);
        MarkovGame::new(p, r, Array1::from(vec![0.4, 0.6]), 0.8).unwrap()
    }

    #[test]
    fn full_budget_is_identity() {
        let g = small_game();
        let benign = Policy::new(array![[0.2, 0.3, 0.5], [1.0, 0.0, 0.0]]).unwrap();
        let f = fold_coupling(&g, &benign, 1.0).unwrap();
        assert_eq!(f.reward(), g.reward());
        assert_eq!(f.transition(), g.transition());
    }

    #[test]
    fn zero_budget_ignores_attacker() {
        let g = small_game();
        let benign = Policy::new(array![[0.2, 0.3, 0.5], [0.0, 0.5, 0.5]]).unwrap();
        let f = fold_coupling(&g, &benign, 0.0).unwrap();
        let v = Policy::new(array![[0.6, 0.4], [0.1, 0.9]]).unwrap();
        let base = value(&f, &v, &Policy::uniform(2, 3)).unwrap();
        for b in 0..3 {
            let adv = Policy::deterministic(&[b, 2 - b], 3).unwrap();
            assert!((value(&f, &v, &adv).unwrap() - base).abs() < 1e-12);
        }
    }

    #[test]
    fn folded_value_matches_mixture() {
        let g = small_game();
        let benign = Policy::new(array![[0.2, 0.3, 0.5], [0.0, 0.5, 0.5]]).unwrap();
        let adv = Policy::new(array![[0.7, 0.1, 0.2], [0.3, 0.3, 0.4]]).unwrap();
        let v = Policy::new(array![[0.6, 0.4], [0.1, 0.9]]).unwrap();
        let f = fold_coupling(&g, &benign, 0.3).unwrap();
        let coupled = CoupledPolicy::new(benign, adv.clone(), 0.3).unwrap();
        let direct = value(&g, &v, &coupled.realized()).unwrap();
        assert!((value(&f, &v, &adv).unwrap() - direct).abs() < 1e-10);
    }
}
