use crate::error::{Error, Result};
use crate::global::ceil_log2;
use crate::setsystem::Incidence;

/// How the "bad set" force-add test at a phase or stage start is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BadSetRule {
    /// `|B_i(S) ∩ E| ≥ λ10` for the current stage only.
    #[default]
    Literal,
    /// `|B_{i2}(S) ∩ E| ≥ λ10 · 2^(i2 - i)` for some later-or-equal stage `i2`.
    StageScaled,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgoParams {
    /// Sampling multiplier: `p_i = min(1, λ5 · 2^i / s)`.
    pub lambda5: f64,
    /// Threshold multiplier for bad sets and bad elements.
    pub lambda10: f64,
    pub bad_set_rule: BadSetRule,
    /// Phase length override for the phase-sparsified algorithm.
    pub phase_len: Option<u32>,
    /// Leaf size override for the recursive-split algorithm.
    pub base_case_r: Option<u32>,
}

impl Default for AlgoParams {
    fn default() -> Self {
        AlgoParams {
            lambda5: 4.0,
            lambda10: 8.0,
            bad_set_rule: BadSetRule::Literal,
            phase_len: None,
            base_case_r: None,
        }
    }
}

impl AlgoParams {
    pub fn with_lambdas(lambda5: f64, lambda10: f64) -> Self {
        AlgoParams {
            lambda5,
            lambda10,
            ..Self::default()
        }
    }

    /// Thresholds that grow with `log s` and `log t`, for sizes where the constant
    /// defaults would trigger force-adds and pretend marks on ordinary randomness.
    pub fn polylog(s: usize, t: usize) -> Self {
        let log_s = ceil_log2(s) as f64;
        let log_t = ceil_log2(t) as f64;
        let lambda5 = log_s.max(1.0);
        Self::with_lambdas(lambda5, (log_s * log_t).max(lambda5))
    }

    /// Every stage samples with probability one, so estimates are exact counts.
    pub fn exact(s: usize) -> Self {
        let lambda5 = s.max(1) as f64;
        Self::with_lambdas(lambda5, 2.0 * lambda5)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda5 >= 1.0 && self.lambda10 >= self.lambda5) || !self.lambda10.is_finite() {
            return Err(Error::domain(format!(
                "need λ10 ≥ λ5 ≥ 1 (got λ5 = {}, λ10 = {})",
                self.lambda5, self.lambda10
            )));
        }
        if self.phase_len == Some(0) || self.base_case_r == Some(0) {
            return Err(Error::domain("phase length and base-case size must be at least 1"));
        }
        Ok(())
    }
}

/// Loop bounds and thresholds for one instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dims {
    pub s: usize,
    pub t: usize,
    pub log_s: u32,
    pub log_t: u32,
    /// Phase length `T`.
    pub phase_len: u32,
    pub base_case_r: u32,
    pub lambda5: f64,
    pub lambda10: f64,
    pub bad_set_rule: BadSetRule,
}

impl Dims {
    pub fn new<I: Incidence + ?Sized>(sys: &I, params: &AlgoParams) -> Result<Self> {
        Self::from_bounds(sys.s(), sys.t(), params)
    }

    pub fn from_bounds(s: usize, t: usize, params: &AlgoParams) -> Result<Self> {
        params.validate()?;
        let log_s = ceil_log2(s);
        let log_t = ceil_log2(t);
        if log_t > 63 {
            return Err(Error::domain("t is too large"));
        }
        let phase_len = params
            .phase_len
            .unwrap_or_else(|| (log_t as f64).sqrt().ceil() as u32)
            .min(log_t);
        let base_case_r = params
            .base_case_r
            .unwrap_or_else(|| ceil_log2(log_t as usize).max(1));
        Ok(Dims {
            s,
            t,
            log_s,
            log_t,
            phase_len,
            base_case_r,
            lambda5: params.lambda5,
            lambda10: params.lambda10,
            bad_set_rule: params.bad_set_rule,
        })
    }

    /// Free-element threshold `s / 2^i`.
    #[inline]
    pub fn threshold(&self, i: u32) -> f64 {
        self.s as f64 / 2f64.powi(i as i32)
    }

    /// Element sampling rate `p_i` of stage `i`.
    #[inline]
    pub fn p(&self, i: u32) -> f64 {
        (self.lambda5 * 2f64.powi(i as i32) / self.s as f64).min(1.0)
    }

    /// Set sampling rate of iteration `k`.
    #[inline]
    pub fn q(&self, k: u32) -> f64 {
        crate::tape::set_probability(k, self.t)
    }

    pub fn num_phases(&self) -> u32 {
        self.log_t.div_ceil(self.phase_len)
    }

    /// Iterations of phase `j` (0-based), as an inclusive range.
    pub fn phase_iters(&self, j: u32) -> std::ops::RangeInclusive<u32> {
        let lo = j * self.phase_len + 1;
        lo..=((j + 1) * self.phase_len).min(self.log_t)
    }

    /// Pretend threshold at a phase start.
    pub fn phase_pretend_threshold(&self) -> f64 {
        self.lambda10 * 2f64.powi(self.phase_len as i32)
    }

    /// Pretend threshold `λ10 · 2^l`.
    pub fn scaled_threshold(&self, l: u32) -> f64 {
        self.lambda10 * 2f64.powi(l as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_for_powers_of_two() {
        let d = Dims::from_bounds(64, 64, &AlgoParams::default()).unwrap();
        assert_eq!((d.log_s, d.log_t, d.phase_len, d.base_case_r), (6, 6, 3, 3));
        assert_eq!(d.num_phases(), 2);
        assert_eq!(d.phase_iters(1), 4..=6);
        assert_eq!(d.p(1), 8.0 / 64.0);
        assert_eq!(d.p(6), 1.0);
        assert_eq!(d.threshold(3), 8.0);
    }

    #[test]
    fn odd_sizes_round_up_and_truncate_last_phase() {
        let d = Dims::from_bounds(5, 33, &AlgoParams::default()).unwrap();
        assert_eq!((d.log_s, d.log_t, d.phase_len), (3, 6, 3));
        let d = Dims::from_bounds(5, 1 << 10, &AlgoParams::default()).unwrap();
        assert_eq!((d.log_t, d.phase_len, d.num_phases()), (10, 4, 3));
        assert_eq!(d.phase_iters(2), 9..=10);
        assert_eq!(d.base_case_r, 4);
    }

    #[test]
    fn degenerate_bounds() {
        let d = Dims::from_bounds(1, 1, &AlgoParams::default()).unwrap();
        assert_eq!((d.log_s, d.log_t, d.phase_len, d.base_case_r), (1, 1, 1, 1));
        assert_eq!(d.q(1), 1.0);
    }

    #[test]
    fn rejects_inconsistent_lambdas() {
        assert!(AlgoParams::with_lambdas(0.5, 2.0).validate().is_err());
        assert!(AlgoParams::with_lambdas(4.0, 2.0).validate().is_err());
        assert!(AlgoParams::with_lambdas(f64::NAN, 2.0).validate().is_err());
        let p = AlgoParams::polylog(64, 64);
        assert_eq!((p.lambda5, p.lambda10), (6.0, 36.0));
    }
}
