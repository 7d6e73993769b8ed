//! Discrepancy measures between policies and between distributions.

use ndarray::ArrayView1;

use crate::error::{Error, Result};
use crate::game::Policy;

/// `max_s ½ Σ_a |p(a|s) - q(a|s)|`.
pub fn tv_max(p: &Policy, q: &Policy) -> Result<f64> {
    if p.probs().dim() != q.probs().dim() {
        return Err(Error::Dimension(format!(
            "policies have shapes {:?} and {:?}",
            p.probs().dim(),
            q.probs().dim()
        )));
    }
    Ok((0..p.n_states()).map(|s| tv(p.row(s), q.row(s))).fold(0.0, f64::max))
}

pub(crate) fn tv(p: ArrayView1<f64>, q: ArrayView1<f64>) -> f64 {
    0.5 * p.iter().zip(q.iter()).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `KL(p ‖ q)` in nats. Errors where `p` puts mass on a zero of `q`.
pub fn kl_divergence(p: ArrayView1<f64>, q: ArrayView1<f64>) -> Result<f64> {
    check_pair(p, q)?;
    let mut sum = 0.0;
    for (i, (&pi, &qi)) in p.iter().zip(q.iter()).enumerate() {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(Error::KlUndefined { index: i, mass: pi });
            }
            sum += pi * (pi / qi).ln();
        }
    }
    // rounding can leave a tiny negative value for equal inputs
    Ok(sum.max(0.0))
}

/// Hellinger distance `sqrt(1 - Σ sqrt(p q))`, evaluated as
/// `sqrt(½ Σ (sqrt p - sqrt q)²)` which is exact at `p = q`.
pub fn hellinger(p: ArrayView1<f64>, q: ArrayView1<f64>) -> Result<f64> {
    check_pair(p, q)?;
    let h2: f64 = p.iter().zip(q.iter()).map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2)).sum();
    Ok((0.5 * h2).sqrt())
}

fn check_pair(p: ArrayView1<f64>, q: ArrayView1<f64>) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::Dimension(format!("distributions of length {} and {}", p.len(), q.len())));
    }
    if p.iter().chain(q.iter()).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("distribution entry".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Divergences {
    pub l1: f64,
    pub tv: f64,
    pub kl: f64,
    pub hellinger: f64,
}

pub fn distribution_divergences(p: ArrayView1<f64>, q: ArrayView1<f64>) -> Result<Divergences> {
    check_pair(p, q)?;
    let l1: f64 = p.iter().zip(q.iter()).map(|(a, b)| (a - b).abs()).sum();
    Ok(Divergences { l1, tv: l1 / 2.0, kl: kl_divergence(p, q)?, hellinger: hellinger(p, q)? })
}

/// The f-divergences used by the marginalised-dynamics check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FDivergence {
    Tv,
    Kl,
    Hellinger,
}

impl FDivergence {
    pub const ALL: [FDivergence; 3] = [FDivergence::Tv, FDivergence::Kl, FDivergence::Hellinger];

    pub fn name(self) -> &'static str {
        match self {
            FDivergence::Tv => "tv",
            FDivergence::Kl => "kl",
            FDivergence::Hellinger => "hellinger",
        }
    }

    pub fn compute(self, p: ArrayView1<f64>, q: ArrayView1<f64>) -> Result<f64> {
        match self {
            FDivergence::Tv => {
                check_pair(p, q)?;
                Ok(tv(p, q))
            }
            FDivergence::Kl => kl_divergence(p, q),
            FDivergence::Hellinger => hellinger(p, q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identical_inputs_give_zero() {
        let p = array![0.2, 0.3, 0.5];
        let d = distribution_divergences(p.view(), p.view()).unwrap();
        assert_eq!(d.l1, 0.0);
        assert_eq!(d.tv, 0.0);
        assert_eq!(d.kl, 0.0);
        assert_eq!(d.hellinger, 0.0);
        let pol = Policy::uniform(2, 3);
        assert_eq!(tv_max(&pol, &pol).unwrap(), 0.0);
    }

    #[test]
    fn hand_computed_values() {
        let d = distribution_divergences(array![1.0, 0.0].view(), array![0.5, 0.5].view()).unwrap();
        assert_eq!(d.l1, 1.0);
        assert_eq!(d.tv, 0.5);
        assert!((d.kl - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((d.hellinger - (1.0 - 0.5f64.sqrt()).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn kl_support_violation_is_an_error() {
        let r = distribution_divergences(array![0.5, 0.5].view(), array![0.0, 1.0].view());
        assert!(matches!(r, Err(Error::KlUndefined { index: 0, .. })));
    }

    #[test]
    fn disjoint_single_state_policies() {
        let p = Policy::deterministic(&[0], 2).unwrap();
        let q = Policy::deterministic(&[1], 2).unwrap();
        assert_eq!(tv_max(&p, &q).unwrap(), 1.0);
        assert!(tv_max(&p, &Policy::uniform(2, 2)).is_err());
    }
}
