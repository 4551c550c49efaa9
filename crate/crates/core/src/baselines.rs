//! Reference covers: greedy and an exact branch-and-bound solver for small instances.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::global::{CoverState, Event, Round};
use crate::setsystem::{ElementId, SetId, SetSystem};

/// Classic greedy: repeatedly take the set with the most uncovered elements, smallest
/// id on ties.
pub fn greedy_cover(sys: &SetSystem) -> CoverState {
    let mut state = CoverState::new(sys.num_sets(), sys.num_elements());
    let mut heap: BinaryHeap<(usize, Reverse<SetId>)> = (0..sys.num_sets() as SetId)
        .map(|s| (sys.set(s).len(), Reverse(s)))
        .collect();
    let mut step = 0;
    while let Some((stored, Reverse(set))) = heap.pop() {
        let gain = sys.set(set).iter().filter(|&&e| !state.covered[e as usize]).count();
        if gain == 0 {
            continue;
        }
        if gain < stored {
            heap.push((gain, Reverse(set)));
            continue;
        }
        let round = Round(step);
        step += 1;
        state.chosen[set as usize] = true;
        state.added_at[set as usize] = Some(round);
        state.events.push((round, Event::Added(set)));
        for &e in sys.set(set) {
            if !state.covered[e as usize] {
                state.covered[e as usize] = true;
                state.cover_assignment[e as usize] = Some(set);
            }
        }
    }
    state
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptMethod {
    /// The search finished; `exact_opt` is optimal.
    Exhaustive,
    /// The generator planted a cover matching the `ceil(n/s)` bound.
    Planted,
    /// Only bounds are known.
    NsBound,
}

impl OptMethod {
    pub fn name(self) -> &'static str {
        match self {
            OptMethod::Exhaustive => "exhaustive",
            OptMethod::Planted => "planted",
            OptMethod::NsBound => "ns-bound",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptBound {
    pub exact_opt: Option<usize>,
    /// `ceil(n / s)`.
    pub lower_bound: usize,
    /// Best cover found.
    pub upper_bound: usize,
    pub method: OptMethod,
    pub nodes: u64,
}

impl OptBound {
    /// Bound for a generated instance with a known planted optimum.
    pub fn planted(sys: &SetSystem, opt: usize) -> Self {
        OptBound {
            exact_opt: Some(opt),
            lower_bound: sys.opt_lower_bound(),
            upper_bound: opt,
            method: OptMethod::Planted,
            nodes: 0,
        }
    }

    /// The best value to divide by when reporting ratios.
    pub fn reference(&self) -> usize {
        self.exact_opt.unwrap_or(self.lower_bound)
    }
}

type Bits = Vec<u64>;

struct Search<'a> {
    sys: &'a SetSystem,
    masks: Vec<Bits>,
    max_size: usize,
    best: usize,
    nodes: u64,
    budget: Option<u64>,
    exhausted: bool,
}

fn count(bits: &Bits) -> usize {
    bits.iter().map(|w| w.count_ones() as usize).sum()
}

fn overlap(a: &Bits, b: &Bits) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

impl Search<'_> {
    fn go(&mut self, uncovered: &Bits, depth: usize) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.budget.is_some_and(|b| self.nodes > b) {
            self.exhausted = true;
            return;
        }
        let left = count(uncovered);
        if left == 0 {
            self.best = self.best.min(depth);
            return;
        }
        if depth + left.div_ceil(self.max_size) >= self.best {
            return;
        }
        let mut pivot: Option<(usize, ElementId)> = None;
        for (w, &word) in uncovered.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let e = (w * 64 + word.trailing_zeros() as usize) as ElementId;
                word &= word - 1;
                let d = self.sys.element(e).len();
                if pivot.is_none_or(|(best, _)| d < best) {
                    pivot = Some((d, e));
                }
            }
        }
        let (_, e) = pivot.unwrap();
        let mut options: Vec<(usize, SetId)> = self
            .sys
            .element(e)
            .iter()
            .map(|&s| (overlap(&self.masks[s as usize], uncovered), s))
            .collect();
        options.sort_by_key(|&(gain, s)| (Reverse(gain), s));
        for (_, s) in options {
            let next: Bits = uncovered
                .iter()
                .zip(&self.masks[s as usize])
                .map(|(u, m)| u & !m)
                .collect();
            self.go(&next, depth + 1);
        }
    }
}

/// Minimum cover size by branch and bound, seeded with the greedy cover.
///
/// With a node `budget`, the search may stop early; the result is then flagged
/// [`OptMethod::NsBound`] and carries only bounds.
pub fn exact_min_cover(sys: &SetSystem, budget: Option<u64>) -> OptBound {
    let n = sys.num_elements();
    let words = n.div_ceil(64);
    let masks: Vec<Bits> = sys
        .sets()
        .map(|set| {
            let mut b = vec![0u64; words];
            for &e in set {
                b[e as usize / 64] |= 1 << (e % 64);
            }
            b
        })
        .collect();
    let greedy = greedy_cover(sys).cover_size();
    let mut full = vec![u64::MAX; words];
    if !n.is_multiple_of(64) {
        full[words - 1] = (1u64 << (n % 64)) - 1;
    }
    let mut search = Search {
        sys,
        masks,
        max_size: sys.max_set_size().max(1),
        best: greedy,
        nodes: 0,
        budget,
        exhausted: false,
    };
    search.go(&full, 0);
    let lower_bound = sys.opt_lower_bound();
    if search.exhausted {
        OptBound {
            exact_opt: None,
            lower_bound,
            upper_bound: search.best,
            method: OptMethod::NsBound,
            nodes: search.nodes,
        }
    } else {
        OptBound {
            exact_opt: Some(search.best),
            lower_bound,
            upper_bound: search.best,
            method: OptMethod::Exhaustive,
            nodes: search.nodes,
        }
    }
}
