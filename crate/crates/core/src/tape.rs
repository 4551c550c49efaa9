//! Shared random tape.
//!
//! Every coin is a pure function of the seed and the coin's identity, so a global
//! simulation and an oracle answering a single query flip exactly the same coins,
//! in any order and any number of times.

use crate::error::{Error, Result};
use crate::setsystem::{ElementId, SetId, SetSystem};

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const TAG_SET_SAMPLE: u64 = 0x5e7_5a3b;
const TAG_ELEM_SAMPLE: u64 = 0xe1e_3a3b;

/// Identity of a random decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoinKind {
    /// Whether set `set` belongs to the candidate family of stage `stage`, iteration `iter`.
    SetSample { stage: u32, iter: u32, set: SetId },
    /// Whether element `elem` belongs to the stage-`stage` sample of set `set`.
    ElemSample { stage: u32, set: SetId, elem: ElementId },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RandomTape {
    seed: u64,
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `min(1, 2^k / t)`, the inclusion probability of iteration `k`.
pub fn set_probability(k: u32, t: usize) -> f64 {
    (2f64.powi(k as i32) / t as f64).min(1.0)
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("probability {p} is outside [0, 1]")))
    }
}

impl RandomTape {
    pub fn new(seed: u64) -> Self {
        RandomTape { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform deviate in `[0, 1)` attached to `kind`.
    pub fn uniform(&self, kind: CoinKind) -> f64 {
        let h = match kind {
            CoinKind::SetSample { stage, iter, set } => {
                let h = mix(self.seed ^ TAG_SET_SAMPLE);
                mix(h ^ ((stage as u64) << 32 | iter as u64)) ^ set as u64
            }
            CoinKind::ElemSample { stage, set, elem } => {
                let h = mix(self.seed ^ TAG_ELEM_SAMPLE);
                mix(h ^ ((stage as u64) << 32 | set as u64)) ^ ((elem as u64) << 1)
            }
        };
        unit(mix(mix(h)))
    }

    pub fn coin(&self, kind: CoinKind, p: f64) -> Result<bool> {
        check_probability(p)?;
        Ok(self.uniform(kind) < p)
    }

    /// Membership of `set` in the stage-`i`, iteration-`k` candidate family.
    pub fn in_s_ik(&self, i: u32, k: u32, set: SetId, t: usize) -> Result<bool> {
        let log_t = crate::global::ceil_log2(t);
        if k < 1 || k > log_t {
            return Err(Error::domain(format!("iteration {k} outside 1..={log_t}")));
        }
        Ok(self.set_sample(i, k, set, set_probability(k, t)))
    }

    /// Membership of `e` in the stage-`i` sample `B_i(S)` at rate `p_i`.
    pub fn in_b_i(&self, sys: &SetSystem, i: u32, set: SetId, e: ElementId, p_i: f64) -> Result<bool> {
        check_probability(p_i)?;
        if set as usize >= sys.num_sets() || !sys.contains(set, e) {
            return Err(Error::domain(format!("element {e} is not in set {set}")));
        }
        Ok(self.elem_sample(i, set, e, p_i))
    }

    #[inline]
    pub(crate) fn set_sample(&self, i: u32, k: u32, set: SetId, p: f64) -> bool {
        p >= 1.0 || self.uniform(CoinKind::SetSample { stage: i, iter: k, set }) < p
    }

    #[inline]
    pub(crate) fn elem_sample(&self, i: u32, set: SetId, e: ElementId, p: f64) -> bool {
        p >= 1.0 || self.uniform(CoinKind::ElemSample { stage: i, set, elem: e }) < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_probabilities() {
        let tape = RandomTape::new(7);
        for set in 0..1000 {
            let kind = CoinKind::SetSample { stage: 1, iter: 3, set };
            assert!(tape.coin(kind, 1.0).unwrap());
            assert!(!tape.coin(kind, 0.0).unwrap());
        }
    }

    #[test]
    fn last_iteration_always_samples() {
        let tape = RandomTape::new(11);
        for t in [2usize, 3, 8, 33, 64] {
            let last = crate::global::ceil_log2(t);
            assert!((0..500).all(|s| tape.in_s_ik(2, last, s, t).unwrap()));
        }
    }

    #[test]
    fn repeated_queries_agree() {
        let tape = RandomTape::new(3);
        let kind = CoinKind::ElemSample { stage: 2, set: 5, elem: 9 };
        let first = tape.coin(kind, 0.5).unwrap();
        assert!((0..1000).all(|_| tape.coin(kind, 0.5).unwrap() == first));
    }

    #[test]
    fn invalid_arguments() {
        let tape = RandomTape::new(0);
        let kind = CoinKind::SetSample { stage: 1, iter: 1, set: 0 };
        assert!(tape.coin(kind, 1.5).is_err());
        assert!(tape.coin(kind, -0.1).is_err());
        assert!(tape.coin(kind, f64::NAN).is_err());
        assert!(tape.in_s_ik(1, 0, 0, 8).is_err());
        assert!(tape.in_s_ik(1, 4, 0, 8).is_err());
        let sys = SetSystem::new(3, vec![vec![0, 1], vec![2]], 2, 1).unwrap();
        assert!(tape.in_b_i(&sys, 1, 0, 2, 0.5).is_err());
        assert!(tape.in_b_i(&sys, 1, 0, 1, 0.5).is_ok());
    }

    #[test]
    fn kinds_do_not_collide() {
        let tape = RandomTape::new(1);
        let a = tape.uniform(CoinKind::SetSample { stage: 1, iter: 2, set: 3 });
        let b = tape.uniform(CoinKind::ElemSample { stage: 1, set: 2, elem: 3 });
        assert_ne!(a, b);
    }
}
