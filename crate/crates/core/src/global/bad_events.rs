//! Detectors for the two kinds of unlucky randomness in a generic run.

use super::{estimate_passes, GenericTrace};
use crate::error::{Error, Result};
use crate::setsystem::{ElementId, SetId, SetSystem};

fn check(trace: &GenericTrace) -> Result<()> {
    if !trace.complete {
        return Err(Error::State("bad-event detection needs a completed trace".into()));
    }
    Ok(())
}

/// An element is bad if, in some stage `i` and iterations `k1 ≤ k2`, it is free at the
/// start of `(i, k1)` and lies in more than `λ10 · 2^(k2-k1)` sets of the iteration-`k2`
/// candidate family whose estimate at the start of `(i, k1)` reaches `s/2^i`.
pub fn detect_bad_element(sys: &SetSystem, trace: &GenericTrace, e: ElementId) -> Result<bool> {
    check(trace)?;
    let d = &trace.dims;
    for i in 1..=d.log_s {
        let p = d.p(i);
        let threshold = d.threshold(i);
        for k1 in 1..=d.log_t {
            let free = trace.free_before(i, k1);
            if !free[e as usize] {
                continue;
            }
            let large: Vec<SetId> = sys
                .element(e)
                .iter()
                .copied()
                .filter(|&set| {
                    let c = sys
                        .set(set)
                        .iter()
                        .filter(|&&x| free[x as usize] && trace.tape.elem_sample(i, set, x, p))
                        .count();
                    estimate_passes(c, p, threshold)
                })
                .collect();
            for k2 in k1..=d.log_t {
                let q = d.q(k2);
                let hits = large.iter().filter(|&&set| trace.tape.set_sample(i, k2, set, q)).count();
                if hits as f64 > d.scaled_threshold(k2 - k1) {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// A set is bad if, for some stages `i1 ≤ i2`, the elements of `B_{i2}(S)` that are free
/// at the start of stage `i1` number more than `λ10 · 2^(i2-i1)`.
pub fn detect_bad_set(sys: &SetSystem, trace: &GenericTrace, set: SetId) -> Result<bool> {
    check(trace)?;
    let d = &trace.dims;
    for i1 in 1..=d.log_s {
        let free = trace.free_before(i1, 1);
        for i2 in i1..=d.log_s {
            let p = d.p(i2);
            let c = sys
                .set(set)
                .iter()
                .filter(|&&x| free[x as usize] && trace.tape.elem_sample(i2, set, x, p))
                .count();
            if c as f64 > d.scaled_threshold(i2 - i1) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
