use super::engine::Engine;
use super::{AlgoParams, CoverState, Dims, Event, Round, RunReport};
use crate::error::{Error, Result};
use crate::setsystem::{ElementId, Incidence, SetId};
use crate::tape::RandomTape;

/// Round of the stage-start force-adds of stage `i`; iteration `k` runs in this plus `k`.
pub(crate) fn stage_round(dims: &Dims, i: u32) -> u32 {
    (i - 1) * (dims.log_t + 1)
}

/// Bits `lo..lo+len` of a per-set iteration mask, where bit `k-1` stands for iteration `k`.
#[inline]
pub(crate) fn range_mask(lo: u32, len: u32) -> u64 {
    let ones = if len >= 64 { u64::MAX } else { (1u64 << len) - 1 };
    ones << (lo - 1)
}

/// Stages run as a recursion over iteration ranges: the first half runs on the
/// stage-start candidate families, the second half on families re-thinned by current
/// estimates, with elements in too many surviving candidates marked as pretend.
pub fn run_recsplit<I: Incidence + ?Sized>(
    sys: &I,
    tape: &RandomTape,
    params: &AlgoParams,
) -> Result<(CoverState, RunReport)> {
    let dims = Dims::new(sys, params)?;
    let m = sys.num_sets() as SetId;
    let mut eng = Engine::new(sys, tape, dims);
    for i in 1..=dims.log_s {
        eng.begin_stage(i);
        let base = stage_round(&dims, i);
        let bad: Vec<SetId> = (0..m)
            .filter(|&s| !eng.state.chosen[s as usize] && eng.is_bad_set(s))
            .collect();
        let fam: Vec<u64> = (0..m)
            .map(|set| {
                if !eng.est_ok(set) {
                    return 0;
                }
                (1..=dims.log_t)
                    .filter(|&k| tape.set_sample(i, k, set, dims.q(k)))
                    .fold(0u64, |acc, k| acc | 1 << (k - 1))
            })
            .collect();
        eng.add_sets(Round(base), &bad, Event::BadSetForced);
        let pretend: Vec<ElementId> = eng
            .free_elements()
            .filter(|&e| {
                (1..=dims.log_t).any(|k| degree_in(sys, &fam, e, k) as f64 >= dims.scaled_threshold(k))
            })
            .collect();
        eng.mark_pretend(Round(base), &pretend);
        rec_split(&mut eng, base, 1, dims.log_t, &fam)?;
    }
    let cleanup_adds = eng.cleanup();
    let report = RunReport {
        algo: "recsplit",
        cover_size: eng.state.cover_size(),
        rounds_executed: dims.log_s * (dims.log_t + 1),
        bad_set_events: eng.bad_set_events,
        pretend_events: eng.pretend_events,
        cleanup_adds,
        per_stage_sizes: eng.stage_adds.clone(),
    };
    Ok((eng.state, report))
}

#[inline]
pub(crate) fn degree_in<I: Incidence + ?Sized>(sys: &I, fam: &[u64], e: ElementId, k: u32) -> usize {
    let bit = 1u64 << (k - 1);
    sys.element(e).iter().filter(|&&s| fam[s as usize] & bit != 0).count()
}

fn rec_split<I: Incidence + ?Sized>(
    eng: &mut Engine<'_, I>,
    base: u32,
    k0: u32,
    r: u32,
    fam: &[u64],
) -> Result<()> {
    let dims = eng.dims;
    for e in eng.free_elements() {
        for l in 0..r {
            let d = degree_in(eng.sys, fam, e, k0 + l);
            if d as f64 > dims.scaled_threshold(l + 1) {
                return Err(Error::Invariant(format!(
                    "free element {e} lies in {d} candidate sets of iteration {} in stage {}",
                    k0 + l,
                    eng.stage
                )));
            }
        }
    }
    let m = eng.sys.num_sets() as SetId;
    if r <= dims.base_case_r {
        let mut batch = Vec::new();
        for k in k0..k0 + r {
            let bit = 1u64 << (k - 1);
            batch.clear();
            batch.extend((0..m).filter(|&s| {
                fam[s as usize] & bit != 0 && !eng.state.chosen[s as usize] && eng.est_ok(s)
            }));
            eng.add_sets(Round(base + k), &batch, Event::Added);
        }
        return Ok(());
    }
    let r1 = r / 2;
    let r2 = r - r1;
    rec_split(eng, base, k0, r1, fam)?;
    let mid = k0 + r1;
    let upper = range_mask(mid, r2);
    let next: Vec<u64> = (0..m)
        .map(|s| if eng.est_ok(s) { fam[s as usize] & upper } else { 0 })
        .collect();
    let pretend: Vec<ElementId> = eng
        .free_elements()
        .filter(|&e| {
            (mid..mid + r2).any(|k| degree_in(eng.sys, &next, e, k) as f64 >= dims.scaled_threshold(k - mid))
        })
        .collect();
    eng.mark_pretend(Round(base + mid), &pretend);
    rec_split(eng, base, mid, r2, &next)
}
