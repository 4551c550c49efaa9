//! Incremental bookkeeping shared by the sampled simulations.
//!
//! For the current stage `i` the engine keeps, per set, the number of free elements
//! in `B_i(S)`. Sample bits live on the element side of the incidence so that when an
//! element stops being free, exactly the counters of the sets that sampled it drop.

use super::{estimate_passes, CoverState, Dims, Event, Round};
use crate::setsystem::{ElementId, Incidence, SetId};
use crate::tape::RandomTape;

pub(crate) struct Engine<'a, I: Incidence + ?Sized> {
    pub sys: &'a I,
    pub tape: &'a RandomTape,
    pub dims: Dims,
    elem_off: Vec<usize>,
    sampled: Vec<bool>,
    cnt: Vec<u32>,
    pub state: CoverState,
    pub stage: u32,
    p: f64,
    pub stage_adds: Vec<usize>,
    pub bad_set_events: usize,
    pub pretend_events: usize,
}

impl<'a, I: Incidence + ?Sized> Engine<'a, I> {
    pub fn new(sys: &'a I, tape: &'a RandomTape, dims: Dims) -> Self {
        let n = sys.num_elements();
        let mut elem_off = Vec::with_capacity(n + 1);
        elem_off.push(0);
        for e in 0..n as ElementId {
            elem_off.push(elem_off[e as usize] + sys.element(e).len());
        }
        let total = elem_off[n];
        Engine {
            sys,
            tape,
            dims,
            elem_off,
            sampled: vec![false; total],
            cnt: vec![0; sys.num_sets()],
            state: CoverState::new(sys.num_sets(), n),
            stage: 0,
            p: 1.0,
            stage_adds: vec![0; dims.log_s as usize],
            bad_set_events: 0,
            pretend_events: 0,
        }
    }

    pub fn begin_stage(&mut self, i: u32) {
        self.stage = i;
        self.p = self.dims.p(i);
        self.cnt.fill(0);
        for e in 0..self.sys.num_elements() as ElementId {
            let free = self.state.is_free(e);
            let base = self.elem_off[e as usize];
            for (j, &set) in self.sys.element(e).iter().enumerate() {
                let bit = self.tape.elem_sample(i, set, e, self.p);
                self.sampled[base + j] = bit;
                if bit && free {
                    self.cnt[set as usize] += 1;
                }
            }
        }
    }

    /// `|B_i(S) ∩ free|` for the current stage.
    #[inline]
    pub fn count(&self, set: SetId) -> usize {
        self.cnt[set as usize] as usize
    }

    #[inline]
    pub fn est_ok(&self, set: SetId) -> bool {
        estimate_passes(self.count(set), self.p, self.dims.threshold(self.stage))
    }

    pub fn is_bad_set(&self, set: SetId) -> bool {
        let d = &self.dims;
        match d.bad_set_rule {
            super::BadSetRule::Literal => self.count(set) as f64 >= d.lambda10,
            super::BadSetRule::StageScaled => (self.stage..=d.log_s).any(|i2| {
                let c = if i2 == self.stage {
                    self.count(set)
                } else {
                    let p2 = d.p(i2);
                    self.sys
                        .set(set)
                        .iter()
                        .filter(|&&e| self.state.is_free(e) && self.tape.elem_sample(i2, set, e, p2))
                        .count()
                };
                c as f64 >= d.scaled_threshold(i2 - self.stage)
            }),
        }
    }

    fn deactivate(&mut self, e: ElementId) {
        let base = self.elem_off[e as usize];
        for (j, &set) in self.sys.element(e).iter().enumerate() {
            if self.sampled[base + j] {
                self.cnt[set as usize] -= 1;
            }
        }
    }

    /// Adds a batch of sets decided in the same round. `sets` must be ascending.
    pub fn add_sets(&mut self, round: Round, sets: &[SetId], event: fn(SetId) -> Event) {
        for &set in sets {
            debug_assert!(!self.state.chosen[set as usize]);
            self.state.chosen[set as usize] = true;
            self.state.added_at[set as usize] = Some(round);
            let ev = event(set);
            match ev {
                Event::CleanupAdded(_) => {}
                Event::BadSetForced(_) => {
                    self.bad_set_events += 1;
                    self.stage_adds[self.stage as usize - 1] += 1;
                }
                _ => self.stage_adds[self.stage as usize - 1] += 1,
            }
            self.state.events.push((round, ev));
            for &e in self.sys.set(set) {
                let ei = e as usize;
                if self.state.cover_assignment[ei].is_none() {
                    self.state.cover_assignment[ei] = Some(set);
                }
                if self.state.is_free(e) {
                    self.deactivate(e);
                }
                self.state.covered[ei] = true;
            }
        }
    }

    pub fn mark_pretend(&mut self, round: Round, elems: &[ElementId]) {
        for &e in elems {
            if self.state.is_free(e) {
                self.deactivate(e);
                self.state.pretend[e as usize] = true;
                self.state.events.push((round, Event::Pretend(e)));
                self.pretend_events += 1;
            }
        }
    }

    pub fn free_elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.sys.num_elements() as ElementId).filter(|&e| self.state.is_free(e))
    }

    /// Gives every uncovered element its smallest-id set. Returns the number of sets added.
    pub fn cleanup(&mut self) -> usize {
        let mut sets: Vec<SetId> = (0..self.sys.num_elements() as ElementId)
            .filter(|&e| !self.state.covered[e as usize])
            .map(|e| self.sys.element(e)[0])
            .collect();
        sets.sort_unstable();
        sets.dedup();
        self.add_sets(Round::CLEANUP, &sets, Event::CleanupAdded);
        sets.len()
    }
}
