use super::engine::Engine;
use super::{AlgoParams, CoverState, Dims, Event, Round, RunReport};
use crate::error::Result;
use crate::setsystem::{ElementId, Incidence, SetId};
use crate::tape::RandomTape;

/// One step of the phase-sparsified schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// Force-adds and pretend marks at the start of phase `phase` (0-based) of `stage`.
    PhaseStart { stage: u32, phase: u32 },
    Iter { stage: u32, k: u32 },
}

/// Maps schedule steps to round ordinals and back.
#[derive(Clone, Copy, Debug)]
pub struct SqrtSchedule {
    dims: Dims,
    per_stage: u32,
}

impl SqrtSchedule {
    pub fn new(dims: Dims) -> Self {
        SqrtSchedule {
            dims,
            per_stage: dims.num_phases() + dims.log_t,
        }
    }

    pub fn len(&self) -> u32 {
        self.dims.log_s * self.per_stage
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn phase_start(&self, stage: u32, phase: u32) -> Round {
        Round((stage - 1) * self.per_stage + phase * (self.dims.phase_len + 1))
    }

    pub fn iter(&self, stage: u32, k: u32) -> Round {
        let phase = (k - 1) / self.dims.phase_len;
        Round((stage - 1) * self.per_stage + phase + k)
    }

    pub fn step(&self, round: Round) -> Step {
        let stage = round.0 / self.per_stage + 1;
        let mut off = round.0 % self.per_stage;
        let t = self.dims.phase_len;
        let phase = off / (t + 1);
        off -= phase * (t + 1);
        if off == 0 {
            Step::PhaseStart { stage, phase }
        } else {
            Step::Iter {
                stage,
                k: phase * t + off,
            }
        }
    }

    pub fn last(&self) -> Round {
        Round(self.len() - 1)
    }
}

/// Stages are cut into phases of `T` iterations. At each phase start, sets whose sample
/// holds too many free elements are force-added, candidate families are thinned to sets
/// with a large enough estimate, and elements in too many thinned candidates stop
/// counting as free. Whatever stays uncovered gets its smallest-id set at the end.
pub fn run_sqrt<I: Incidence + ?Sized>(
    sys: &I,
    tape: &RandomTape,
    params: &AlgoParams,
) -> Result<(CoverState, RunReport)> {
    let dims = Dims::new(sys, params)?;
    let sched = SqrtSchedule::new(dims);
    let m = sys.num_sets() as SetId;
    let mut eng = Engine::new(sys, tape, dims);
    let mut hat = vec![0u64; m as usize];
    let mut batch = Vec::new();
    for i in 1..=dims.log_s {
        eng.begin_stage(i);
        for j in 0..dims.num_phases() {
            let round = sched.phase_start(i, j);
            let ks = dims.phase_iters(j);
            let lo = *ks.start();
            let bad: Vec<SetId> = (0..m)
                .filter(|&s| !eng.state.chosen[s as usize] && eng.is_bad_set(s))
                .collect();
            for set in 0..m {
                hat[set as usize] = 0;
                if eng.est_ok(set) {
                    for k in ks.clone() {
                        if tape.set_sample(i, k, set, dims.q(k)) {
                            hat[set as usize] |= 1 << (k - lo);
                        }
                    }
                }
            }
            eng.add_sets(round, &bad, Event::BadSetForced);

            let limit = dims.phase_pretend_threshold();
            let pretend: Vec<ElementId> = eng
                .free_elements()
                .filter(|&e| {
                    ks.clone().any(|k| {
                        let bit = 1 << (k - lo);
                        let d = sys.element(e).iter().filter(|&&s| hat[s as usize] & bit != 0).count();
                        d as f64 >= limit
                    })
                })
                .collect();
            eng.mark_pretend(round, &pretend);

            for k in ks.clone() {
                let bit = 1 << (k - lo);
                batch.clear();
                batch.extend((0..m).filter(|&s| {
                    hat[s as usize] & bit != 0 && !eng.state.chosen[s as usize] && eng.est_ok(s)
                }));
                eng.add_sets(sched.iter(i, k), &batch, Event::Added);
            }
        }
    }
    let cleanup_adds = eng.cleanup();
    let report = RunReport {
        algo: "sqrt",
        cover_size: eng.state.cover_size(),
        rounds_executed: sched.len(),
        bad_set_events: eng.bad_set_events,
        pretend_events: eng.pretend_events,
        cleanup_adds,
        per_stage_sizes: eng.stage_adds.clone(),
    };
    Ok((eng.state, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setsystem::SetSystem;

    #[test]
    fn schedule_round_trips() {
        for (s, t, len) in [(64usize, 64usize, None), (8, 1 << 10, None), (4, 8, Some(2)), (2, 2, None)] {
            let params = AlgoParams {
                phase_len: len,
                ..AlgoParams::default()
            };
            let dims = Dims::from_bounds(s, t, &params).unwrap();
            let sched = SqrtSchedule::new(dims);
            let mut expected = Vec::new();
            for i in 1..=dims.log_s {
                for j in 0..dims.num_phases() {
                    expected.push(Step::PhaseStart { stage: i, phase: j });
                    for k in dims.phase_iters(j) {
                        expected.push(Step::Iter { stage: i, k });
                    }
                }
            }
            assert_eq!(expected.len() as u32, sched.len());
            for (r, step) in expected.iter().enumerate() {
                assert_eq!(sched.step(Round(r as u32)), *step);
                let back = match *step {
                    Step::PhaseStart { stage, phase } => sched.phase_start(stage, phase),
                    Step::Iter { stage, k } => sched.iter(stage, k),
                };
                assert_eq!(back, Round(r as u32));
            }
        }
    }

    #[test]
    fn single_set_is_chosen() {
        let sys = SetSystem::new(3, vec![vec![0, 1, 2]], 3, 1).unwrap();
        let (state, report) = run_sqrt(&sys, &RandomTape::new(1), &AlgoParams::default()).unwrap();
        assert_eq!(state.chosen_sets(), vec![0]);
        assert_eq!(report.cover_size, 1);
    }

    #[test]
    fn pretend_elements_are_cleaned_up() {
        // Element 0 sits in eight sets; a tiny pretend threshold makes it pretend at once.
        let sets = (1..=8u32).map(|e| vec![0, e]).collect();
        let sys = SetSystem::new(9, sets, 2, 8).unwrap();
        let params = AlgoParams {
            lambda5: 1.0,
            lambda10: 1.0,
            phase_len: Some(1),
            ..AlgoParams::default()
        };
        let (state, report) = run_sqrt(&sys, &RandomTape::new(3), &params).unwrap();
        assert!(state.is_valid_cover(&sys));
        assert_eq!(report.cover_size, report.per_stage_sizes.iter().sum::<usize>() + report.cleanup_adds);
    }
}
