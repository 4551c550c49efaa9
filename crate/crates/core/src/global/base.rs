use super::{estimate_passes, AlgoParams, CoverState, Dims, Event, Round, RunReport};
use crate::error::Result;
use crate::setsystem::{ElementId, Incidence, SetId};
use crate::tape::RandomTape;

/// The exact-count algorithm: in stage `i`, iteration `k`, each unchosen set with at
/// least `s/2^i` uncovered elements joins the cover with probability `2^k/t`.
pub fn run_base<I: Incidence + ?Sized>(
    sys: &I,
    tape: &RandomTape,
    params: &AlgoParams,
) -> Result<(CoverState, RunReport)> {
    let dims = Dims::new(sys, params)?;
    let (state, per_stage) = base_stages(sys, tape, &dims, dims.log_s);
    let report = RunReport {
        algo: "base",
        cover_size: state.cover_size(),
        rounds_executed: dims.log_s * dims.log_t,
        bad_set_events: 0,
        pretend_events: 0,
        cleanup_adds: 0,
        per_stage_sizes: per_stage,
    };
    Ok((state, report))
}

/// Runs only stages `1..=last_stage`. The result need not be a cover.
pub fn run_base_stages<I: Incidence + ?Sized>(
    sys: &I,
    tape: &RandomTape,
    params: &AlgoParams,
    last_stage: u32,
) -> Result<CoverState> {
    let dims = Dims::new(sys, params)?;
    Ok(base_stages(sys, tape, &dims, last_stage.min(dims.log_s)).0)
}

fn base_stages<I: Incidence + ?Sized>(
    sys: &I,
    tape: &RandomTape,
    dims: &Dims,
    last_stage: u32,
) -> (CoverState, Vec<usize>) {
    let m = sys.num_sets() as SetId;
    let mut state = CoverState::new(sys.num_sets(), sys.num_elements());
    let mut per_stage = vec![0; dims.log_s as usize];
    let mut batch = Vec::new();
    for i in 1..=last_stage {
        let threshold = dims.threshold(i);
        for k in 1..=dims.log_t {
            let round = Round((i - 1) * dims.log_t + (k - 1));
            let q = dims.q(k);
            batch.clear();
            for set in 0..m {
                if state.chosen[set as usize] || !tape.set_sample(i, k, set, q) {
                    continue;
                }
                let free = sys.set(set).iter().filter(|&&e| !state.covered[e as usize]).count();
                if estimate_passes(free, 1.0, threshold) {
                    batch.push(set);
                }
            }
            for &set in &batch {
                state.chosen[set as usize] = true;
                state.added_at[set as usize] = Some(round);
                state.events.push((round, Event::Added(set)));
                for &e in sys.set(set) {
                    if state.cover_assignment[e as usize].is_none() {
                        state.cover_assignment[e as usize] = Some(set);
                    }
                    state.covered[e as usize] = true;
                }
            }
            per_stage[i as usize - 1] += batch.len();
        }
    }
    (state, per_stage)
}

/// Per element: the number of sets containing it that were added in the round where it
/// was first covered, if that round lies in stage one; zero otherwise.
pub fn stage_one_x<I: Incidence + ?Sized>(sys: &I, state: &CoverState, log_t: u32) -> Vec<u32> {
    (0..sys.num_elements() as ElementId)
        .map(|e| {
            let sets = sys.element(e);
            let first = sets.iter().filter_map(|&s| state.added_at[s as usize]).min();
            match first {
                Some(r) if r.0 < log_t => sets
                    .iter()
                    .filter(|&&s| state.added_at[s as usize] == Some(r))
                    .count() as u32,
                _ => 0,
            }
        })
        .collect()
}
