//! Round-by-round global simulations. These define the covers that the oracles in
//! [`crate::lca`] must reproduce.

mod bad_events;
mod base;
mod engine;
mod fseq;
mod generic;
mod params;
mod recsplit;
mod sqrt;
mod state;

pub use bad_events::{detect_bad_element, detect_bad_set};
pub use base::{run_base, run_base_stages, stage_one_x};
pub use fseq::f_seq;
pub use generic::{run_generic, run_generic_traced, GenericTrace};
pub use params::{AlgoParams, BadSetRule, Dims};
pub use recsplit::run_recsplit;
pub(crate) use recsplit::{range_mask, stage_round};
pub use sqrt::{run_sqrt, SqrtSchedule, Step};
pub use state::{CoverState, Event, Round, RunReport};

use crate::error::{Error, Result};
use crate::setsystem::{ElementId, SetId, SetSystem};
use crate::tape::RandomTape;

/// `max(1, ceil(log2 x))`.
pub fn ceil_log2(x: usize) -> u32 {
    if x <= 2 {
        1
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}

/// The one place an estimate is compared against a stage threshold, so that every
/// simulation and oracle rounds identically.
#[inline]
pub(crate) fn estimate_passes(count: usize, p: f64, threshold: f64) -> bool {
    count as f64 / p >= threshold
}

/// `|B_i(S) ∩ free| / p_i`.
pub fn estimate_degree(
    sys: &SetSystem,
    tape: &RandomTape,
    i: u32,
    set: SetId,
    free: impl Fn(ElementId) -> bool,
    p_i: f64,
) -> Result<f64> {
    if !(p_i > 0.0 && p_i <= 1.0) {
        return Err(Error::domain(format!("sampling rate {p_i} must lie in (0, 1]")));
    }
    if set as usize >= sys.num_sets() {
        return Err(Error::domain(format!("set id {set} out of range")));
    }
    let count = sys
        .set(set)
        .iter()
        .filter(|&&e| free(e) && tape.elem_sample(i, set, e, p_i))
        .count();
    Ok(count as f64 / p_i)
}

/// Which global simulation to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algo {
    Base,
    Generic,
    Sqrt,
    RecSplit,
}

impl Algo {
    pub const ALL: [Algo; 4] = [Algo::Base, Algo::Generic, Algo::Sqrt, Algo::RecSplit];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Base => "base",
            Algo::Generic => "generic",
            Algo::Sqrt => "sqrt",
            Algo::RecSplit => "recsplit",
        }
    }

    pub fn run<I: crate::setsystem::Incidence + ?Sized>(
        self,
        sys: &I,
        tape: &RandomTape,
        params: &AlgoParams,
    ) -> Result<(CoverState, RunReport)> {
        match self {
            Algo::Base => run_base(sys, tape, params),
            Algo::Generic => run_generic(sys, tape, params),
            Algo::Sqrt => run_sqrt(sys, tape, params),
            Algo::RecSplit => run_recsplit(sys, tape, params),
        }
    }
}

impl std::str::FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown algorithm `{s}`")))
    }
}
