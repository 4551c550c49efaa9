use super::engine::Engine;
use super::{AlgoParams, CoverState, Dims, Event, Round, RunReport};
use crate::error::Result;
use crate::setsystem::{Incidence, SetId};
use crate::tape::RandomTape;

/// The estimating algorithm: like the base algorithm, but a set's free count is
/// estimated from its stage sample `B_i(S)`, which is reused for the whole stage.
pub fn run_generic<I: Incidence + ?Sized>(
    sys: &I,
    tape: &RandomTape,
    params: &AlgoParams,
) -> Result<(CoverState, RunReport)> {
    let (state, report, _) = generic(sys, tape, params, false)?;
    Ok((state, report))
}

/// Free-element snapshots of a generic run, one per (stage, iteration), taken before
/// the iteration's additions.
#[derive(Clone, Debug)]
pub struct GenericTrace {
    pub tape: RandomTape,
    pub dims: Dims,
    pub free_at: Vec<Vec<bool>>,
    pub complete: bool,
}

impl GenericTrace {
    pub fn free_before(&self, i: u32, k: u32) -> &[bool] {
        &self.free_at[((i - 1) * self.dims.log_t + (k - 1)) as usize]
    }
}

pub fn run_generic_traced<I: Incidence + ?Sized>(
    sys: &I,
    tape: &RandomTape,
    params: &AlgoParams,
) -> Result<(CoverState, RunReport, GenericTrace)> {
    let (state, report, trace) = generic(sys, tape, params, true)?;
    Ok((state, report, trace.unwrap()))
}

fn generic<I: Incidence + ?Sized>(
    sys: &I,
    tape: &RandomTape,
    params: &AlgoParams,
    traced: bool,
) -> Result<(CoverState, RunReport, Option<GenericTrace>)> {
    let dims = Dims::new(sys, params)?;
    let mut eng = Engine::new(sys, tape, dims);
    let mut free_at = Vec::new();
    let mut batch: Vec<SetId> = Vec::new();
    for i in 1..=dims.log_s {
        eng.begin_stage(i);
        for k in 1..=dims.log_t {
            if traced {
                free_at.push((0..sys.num_elements() as u32).map(|e| eng.state.is_free(e)).collect());
            }
            let q = dims.q(k);
            batch.clear();
            batch.extend((0..sys.num_sets() as SetId).filter(|&set| {
                !eng.state.chosen[set as usize] && eng.est_ok(set) && tape.set_sample(i, k, set, q)
            }));
            eng.add_sets(Round((i - 1) * dims.log_t + (k - 1)), &batch, Event::Added);
        }
    }
    let report = RunReport {
        algo: "generic",
        cover_size: eng.state.cover_size(),
        rounds_executed: dims.log_s * dims.log_t,
        bad_set_events: 0,
        pretend_events: 0,
        cleanup_adds: 0,
        per_stage_sizes: eng.stage_adds.clone(),
    };
    let trace = traced.then_some(GenericTrace {
        tape: *tape,
        dims,
        free_at,
        complete: true,
    });
    Ok((eng.state, report, trace))
}
