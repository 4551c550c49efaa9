//! Oracle for the phase-sparsified algorithm.
//!
//! Everything is phrased in terms of two time-indexed questions: is set `S` in the cover
//! after round `r`, and is element `e` non-free (covered or pretending) after round `r`.
//! Each is answered from the same questions at earlier rounds, memoized for the call.

use std::collections::HashMap;

use super::{min_passing, OracleContext, Tally};
use crate::error::Result;
use crate::global::{estimate_passes, BadSetRule, Round, SqrtSchedule, Step};
use crate::setsystem::{ElementId, SetId};

struct Sqrt<'c, 'a> {
    ctx: &'c mut OracleContext<'a>,
    sched: SqrtSchedule,
    nonfree: HashMap<(u32, ElementId), bool>,
    set_at: HashMap<(u32, SetId), Option<Round>>,
    est: HashMap<(u32, u32, SetId), Tally>,
    hat: HashMap<(u32, u32, SetId), u64>,
}

impl<'c, 'a> Sqrt<'c, 'a> {
    fn new(ctx: &'c mut OracleContext<'a>) -> Self {
        let sched = SqrtSchedule::new(ctx.dims);
        Sqrt {
            ctx,
            sched,
            nonfree: HashMap::new(),
            set_at: HashMap::new(),
            est: HashMap::new(),
            hat: HashMap::new(),
        }
    }

    fn level(&self, r: u32) -> (u32, u32) {
        match self.sched.step(Round(r)) {
            Step::PhaseStart { stage, phase } => (stage, phase),
            Step::Iter { stage, k } => (stage, (k - 1) / self.ctx.dims.phase_len),
        }
    }

    fn free_before(&mut self, r: u32, e: ElementId) -> Result<bool> {
        Ok(r == 0 || !self.nonfree_after(r - 1, e)?)
    }

    /// Whether at least `need` free elements of `S` before round `r` lie in its stage-`i`
    /// sample.
    fn at_least(&mut self, r: u32, i: u32, set: SetId, need: Option<usize>) -> Result<bool> {
        let Some(need) = need else { return Ok(false) };
        let mut tally = self.est.get(&(r, i, set)).copied().unwrap_or_default();
        if tally.count >= need {
            return Ok(true);
        }
        let saved = self.ctx.enter(self.level(r));
        let p = self.ctx.dims.p(i);
        let nbrs = self.ctx.set_nbrs(set)?;
        while tally.pos < nbrs.len() && tally.count < need {
            let e = nbrs[tally.pos];
            tally.pos += 1;
            if self.ctx.tape.elem_sample(i, set, e, p) && self.free_before(r, e)? {
                tally.count += 1;
            }
        }
        self.ctx.enter(saved);
        self.est.insert((r, i, set), tally);
        Ok(tally.count >= need)
    }

    fn est_ok(&mut self, r: u32, i: u32, set: SetId) -> Result<bool> {
        let d = self.ctx.dims;
        let need = min_passing(d.s, |c| estimate_passes(c, d.p(i), d.threshold(i)));
        self.at_least(r, i, set, need)
    }

    fn bad_set(&mut self, r: u32, i: u32, set: SetId) -> Result<bool> {
        let d = self.ctx.dims;
        match d.bad_set_rule {
            BadSetRule::Literal => {
                self.at_least(r, i, set, min_passing(d.s, |c| c as f64 >= d.lambda10))
            }
            BadSetRule::StageScaled => {
                for i2 in i..=d.log_s {
                    let need = min_passing(d.s, |c| c as f64 >= d.scaled_threshold(i2 - i));
                    if self.at_least(r, i2, set, need)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Candidate bits of `S` for phase `j` of stage `i`: bit `k - lo` is set when `S` was
    /// sampled for iteration `k` and its estimate at the phase start passed.
    fn hat(&mut self, i: u32, j: u32, set: SetId) -> Result<u64> {
        if let Some(&h) = self.hat.get(&(i, j, set)) {
            return Ok(h);
        }
        let d = self.ctx.dims;
        let ks = d.phase_iters(j);
        let lo = *ks.start();
        let coins = ks
            .filter(|&k| self.ctx.tape.set_sample(i, k, set, d.q(k)))
            .fold(0u64, |acc, k| acc | 1 << (k - lo));
        let h = if coins != 0 && self.est_ok(self.sched.phase_start(i, j).0, i, set)? {
            coins
        } else {
            0
        };
        self.hat.insert((i, j, set), h);
        Ok(h)
    }

    /// Whether `S` is added in round `r`, given that it was not chosen before.
    fn adds_at(&mut self, r: u32, set: SetId) -> Result<bool> {
        match self.sched.step(Round(r)) {
            Step::PhaseStart { stage, .. } => self.bad_set(r, stage, set),
            Step::Iter { stage, k } => {
                let t = self.ctx.dims.phase_len;
                let j = (k - 1) / t;
                let bit = 1u64 << (k - 1 - j * t);
                Ok(self.hat(stage, j, set)? & bit != 0 && self.est_ok(r, stage, set)?)
            }
        }
    }

    fn set_at(&mut self, r: u32, set: SetId) -> Result<Option<Round>> {
        if let Some(&a) = self.set_at.get(&(r, set)) {
            return Ok(a);
        }
        let prev = if r > 0 { self.set_at(r - 1, set)? } else { None };
        let a = match prev {
            Some(_) => prev,
            None => self.adds_at(r, set)?.then_some(Round(r)),
        };
        self.set_at.insert((r, set), a);
        Ok(a)
    }

    fn nonfree_after(&mut self, r: u32, e: ElementId) -> Result<bool> {
        if let Some(&b) = self.nonfree.get(&(r, e)) {
            return Ok(b);
        }
        let b = if r > 0 && self.nonfree_after(r - 1, e)? {
            true
        } else {
            let saved = self.ctx.enter(self.level(r));
            let b = self.becomes_nonfree(r, e);
            self.ctx.enter(saved);
            b?
        };
        self.nonfree.insert((r, e), b);
        Ok(b)
    }

    /// `e` is free before round `r`; does round `r` cover it or make it pretend?
    fn becomes_nonfree(&mut self, r: u32, e: ElementId) -> Result<bool> {
        let sets = self.ctx.elem_nbrs(e)?;
        // A set containing a free element cannot have been chosen yet.
        for &set in sets {
            if self.adds_at(r, set)? {
                return Ok(true);
            }
        }
        if let Step::PhaseStart { stage, phase } = self.sched.step(Round(r)) {
            let d = self.ctx.dims;
            let mut degree = vec![0usize; d.phase_iters(phase).count()];
            for &set in sets {
                let h = self.hat(stage, phase, set)?;
                for (b, slot) in degree.iter_mut().enumerate() {
                    *slot += (h >> b & 1) as usize;
                }
            }
            let limit = d.phase_pretend_threshold();
            return Ok(degree.iter().any(|&c| c as f64 >= limit));
        }
        Ok(false)
    }

    fn last(&self) -> u32 {
        self.sched.last().0
    }

    fn covered_at_end(&mut self, e: ElementId) -> Result<Option<(Round, SetId)>> {
        let last = self.last();
        if !self.nonfree_after(last, e)? {
            return Ok(None);
        }
        let mut best = None;
        for &set in self.ctx.elem_nbrs(e)? {
            if let Some(r) = self.set_at(last, set)? {
                if best.is_none_or(|b| (r, set) < b) {
                    best = Some((r, set));
                }
            }
        }
        Ok(best)
    }
}

/// Whether `set` belongs to the cover produced by the phase-sparsified simulation,
/// including sets added by the final cleanup.
pub fn oracle_sqrt_set(ctx: &mut OracleContext<'_>, set: SetId) -> Result<bool> {
    ctx.check_set(set)?;
    ctx.call(|ctx| {
        let mut o = Sqrt::new(ctx);
        let last = o.last();
        if o.set_at(last, set)?.is_some() {
            return Ok(true);
        }
        for &e in o.ctx.set_nbrs(set)? {
            if o.ctx.elem_nbrs(e)?[0] == set && o.covered_at_end(e)?.is_none() {
                return Ok(true);
            }
        }
        Ok(false)
    })
}

/// Whether `e` is covered (always, once cleanup has run) and by which set.
pub fn oracle_sqrt_element(ctx: &mut OracleContext<'_>, e: ElementId) -> Result<(bool, Option<SetId>)> {
    ctx.check_element(e)?;
    ctx.call(|ctx| {
        let mut o = Sqrt::new(ctx);
        let by = match o.covered_at_end(e)? {
            Some((_, set)) => set,
            None => o.ctx.elem_nbrs(e)?[0],
        };
        Ok((true, Some(by)))
    })
}
