use crate::setsystem::{ElementId, Incidence, SetId};

/// Position of a decision in an algorithm's schedule. Later rounds compare greater.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Round(pub u32);

impl Round {
    /// The final step that covers whatever is still uncovered.
    pub const CLEANUP: Round = Round(u32::MAX);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    Added(SetId),
    /// A set added because its sampled free elements exceeded the bad-set threshold.
    BadSetForced(SetId),
    Pretend(ElementId),
    CleanupAdded(SetId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverState {
    pub chosen: Vec<bool>,
    /// Round in which each chosen set was added.
    pub added_at: Vec<Option<Round>>,
    pub covered: Vec<bool>,
    pub pretend: Vec<bool>,
    /// The set credited with covering each element: the earliest added set containing
    /// it, smallest id first within a round.
    pub cover_assignment: Vec<Option<SetId>>,
    pub events: Vec<(Round, Event)>,
}

impl CoverState {
    pub fn new(num_sets: usize, num_elements: usize) -> Self {
        CoverState {
            chosen: vec![false; num_sets],
            added_at: vec![None; num_sets],
            covered: vec![false; num_elements],
            pretend: vec![false; num_elements],
            cover_assignment: vec![None; num_elements],
            events: Vec::new(),
        }
    }

    #[inline]
    pub fn is_free(&self, e: ElementId) -> bool {
        !self.covered[e as usize] && !self.pretend[e as usize]
    }

    pub fn chosen_sets(&self) -> Vec<SetId> {
        (0..self.chosen.len() as SetId).filter(|&s| self.chosen[s as usize]).collect()
    }

    pub fn cover_size(&self) -> usize {
        self.chosen.iter().filter(|&&c| c).count()
    }

    /// Every element lies in a chosen set.
    pub fn is_valid_cover<I: Incidence + ?Sized>(&self, sys: &I) -> bool {
        (0..sys.num_elements() as ElementId)
            .all(|e| sys.element(e).iter().any(|&s| self.chosen[s as usize]))
    }

    pub fn count_events(&self, pred: impl Fn(&Event) -> bool) -> usize {
        self.events.iter().filter(|(_, ev)| pred(ev)).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub algo: &'static str,
    pub cover_size: usize,
    pub rounds_executed: u32,
    pub bad_set_events: usize,
    pub pretend_events: usize,
    pub cleanup_adds: usize,
    /// Sets added in each stage, force-adds included. Cleanup adds are counted separately,
    /// so these plus `cleanup_adds` sum to `cover_size`.
    pub per_stage_sizes: Vec<usize>,
}

impl RunReport {
    pub fn csv_header() -> &'static str {
        "algo,n,m,s,t,seed,cover_size,opt_lb,bad_set_events,pretend_events,cleanup_adds,rounds"
    }

    pub fn csv_row<I: Incidence + ?Sized>(&self, sys: &I, seed: u64) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.algo,
            sys.num_elements(),
            sys.num_sets(),
            sys.s(),
            sys.t(),
            seed,
            self.cover_size,
            sys.num_elements().div_ceil(sys.s().max(1)),
            self.bad_set_events,
            self.pretend_events,
            self.cleanup_adds,
            self.rounds_executed
        )
    }
}
