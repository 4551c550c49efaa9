//! Per-query oracles.
//!
//! An oracle answers one question about the cover that the matching global simulation
//! would output, touching the instance only through metered neighbor queries. Each
//! top-level call starts from empty caches, so answers cannot depend on call order.
//! Within a call a neighborhood is fetched at most once; the meter counts distinct
//! probes of the base instance.

mod recsplit;
mod sqrt;

pub use recsplit::{oracle_recsplit_element, oracle_recsplit_set};
pub use sqrt::{oracle_sqrt_element, oracle_sqrt_set};

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::global::{Algo, AlgoParams, CoverState, Dims};
use crate::setsystem::{query_element, query_set, ElementId, QueryMeter, SetId, SetSystem};
use crate::tape::RandomTape;

/// Progress of a scan over a set's sampled free elements. Scans stop as soon as the
/// count reaches what the caller needs and resume from `pos` if a later caller needs more.
#[derive(Clone, Copy, Default)]
pub(crate) struct Tally {
    pub count: usize,
    pub pos: usize,
}

/// Smallest count in `0..=max` that satisfies `pred`, which must be monotone.
pub(crate) fn min_passing(max: usize, pred: impl Fn(usize) -> bool) -> Option<usize> {
    (0..=max).find(|&c| pred(c))
}

pub struct OracleContext<'a> {
    pub sys: &'a SetSystem,
    pub tape: RandomTape,
    pub dims: Dims,
    meter: QueryMeter,
    probed_sets: HashSet<SetId>,
    probed_elems: HashSet<ElementId>,
    /// (stage, level) the current computation belongs to; new probes are charged here.
    level: (u32, u32),
    by_level: BTreeMap<(u32, u32), u64>,
    calls: u64,
    last: u64,
    total: u64,
    max: u64,
}

impl<'a> OracleContext<'a> {
    pub fn new(sys: &'a SetSystem, tape: RandomTape, params: &AlgoParams) -> Result<Self> {
        Ok(OracleContext {
            sys,
            tape,
            dims: Dims::new(sys, params)?,
            meter: QueryMeter::new(),
            probed_sets: HashSet::new(),
            probed_elems: HashSet::new(),
            level: (0, 0),
            by_level: BTreeMap::new(),
            calls: 0,
            last: 0,
            total: 0,
            max: 0,
        })
    }

    /// Caps the queries a single top-level call may spend.
    pub fn with_cap(mut self, cap: u64) -> Self {
        self.meter = QueryMeter::with_cap(cap);
        self
    }

    fn begin_call(&mut self) {
        self.meter.reset();
        self.probed_sets.clear();
        self.probed_elems.clear();
        self.level = (0, 0);
    }

    fn end_call(&mut self) {
        let q = self.meter.count();
        self.calls += 1;
        self.last = q;
        self.total += q;
        self.max = self.max.max(q);
    }

    /// Runs one top-level oracle call with fresh per-call state.
    fn call<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.begin_call();
        let out = f(self);
        self.end_call();
        out
    }

    pub(crate) fn set_nbrs(&mut self, set: SetId) -> Result<&'a [ElementId]> {
        if self.probed_sets.contains(&set) {
            return Ok(self.sys.set(set));
        }
        let out = query_set(self.sys, set, &mut self.meter)?;
        self.probed_sets.insert(set);
        *self.by_level.entry(self.level).or_default() += 1;
        Ok(out)
    }

    pub(crate) fn elem_nbrs(&mut self, e: ElementId) -> Result<&'a [SetId]> {
        if self.probed_elems.contains(&e) {
            return Ok(self.sys.element(e));
        }
        let out = query_element(self.sys, e, &mut self.meter)?;
        self.probed_elems.insert(e);
        *self.by_level.entry(self.level).or_default() += 1;
        Ok(out)
    }

    /// Sets the charging level and returns the previous one.
    pub(crate) fn enter(&mut self, level: (u32, u32)) -> (u32, u32) {
        std::mem::replace(&mut self.level, level)
    }

    pub(crate) fn check_set(&self, set: SetId) -> Result<()> {
        if (set as usize) < self.sys.num_sets() {
            Ok(())
        } else {
            Err(Error::domain(format!("set id {set} out of range (m = {})", self.sys.num_sets())))
        }
    }

    pub(crate) fn check_element(&self, e: ElementId) -> Result<()> {
        if (e as usize) < self.sys.num_elements() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "element id {e} out of range (n = {})",
                self.sys.num_elements()
            )))
        }
    }

    /// Queries spent by the most recent top-level call.
    pub fn last_queries(&self) -> u64 {
        self.last
    }

    pub fn total_queries(&self) -> u64 {
        self.total
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    /// Probes charged per (stage, level) over all calls so far. For the phase oracle the
    /// level is the phase index; for the recursive oracle it is the recursion depth.
    pub fn level_breakdown(&self) -> &BTreeMap<(u32, u32), u64> {
        &self.by_level
    }

    pub fn reset_stats(&mut self) {
        self.by_level.clear();
        self.calls = 0;
        self.last = 0;
        self.total = 0;
        self.max = 0;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OracleKind {
    SqrtSet,
    SqrtElement,
    RecSplitSet,
    RecSplitElement,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::SqrtSet => "sqrt-set",
            OracleKind::SqrtElement => "sqrt-element",
            OracleKind::RecSplitSet => "recsplit-set",
            OracleKind::RecSplitElement => "recsplit-element",
        }
    }

    pub fn is_element(self) -> bool {
        matches!(self, OracleKind::SqrtElement | OracleKind::RecSplitElement)
    }

    /// Answers one query; set oracles report `by` as the queried set when it is chosen.
    pub fn ask(self, ctx: &mut OracleContext<'_>, id: u32) -> Result<(bool, Option<SetId>)> {
        match self {
            OracleKind::SqrtSet => oracle_sqrt_set(ctx, id).map(|b| (b, b.then_some(id))),
            OracleKind::RecSplitSet => oracle_recsplit_set(ctx, id).map(|b| (b, b.then_some(id))),
            OracleKind::SqrtElement => oracle_sqrt_element(ctx, id),
            OracleKind::RecSplitElement => oracle_recsplit_element(ctx, id),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryProfile {
    pub calls: u64,
    pub q_max: u64,
    pub q_mean: f64,
    pub q_total: u64,
    pub by_level: BTreeMap<(u32, u32), u64>,
}

impl QueryProfile {
    pub fn csv_header() -> &'static str {
        "algo,n,m,s,t,seed,calls,q_max,q_mean,q_total"
    }

    pub fn csv_row(&self, algo: &str, sys: &SetSystem, seed: u64) -> String {
        format!(
            "{algo},{},{},{},{},{seed},{},{},{:.3},{}",
            sys.num_elements(),
            sys.num_sets(),
            sys.s(),
            sys.t(),
            self.calls,
            self.q_max,
            self.q_mean,
            self.q_total
        )
    }
}

/// Runs `kind` on every id in `sample`, each with a fresh meter, and aggregates the counts.
pub fn profile(ctx: &mut OracleContext<'_>, kind: OracleKind, sample: &[u32]) -> Result<QueryProfile> {
    if sample.is_empty() {
        return Err(Error::domain("profile needs a non-empty sample"));
    }
    ctx.reset_stats();
    for &id in sample {
        kind.ask(ctx, id)?;
    }
    Ok(QueryProfile {
        calls: ctx.calls,
        q_max: ctx.max,
        q_mean: ctx.total as f64 / ctx.calls as f64,
        q_total: ctx.total,
        by_level: ctx.by_level.clone(),
    })
}

/// The two oracle constructions, each paired with the global simulation it reproduces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OracleFamily {
    Sqrt,
    RecSplit,
}

impl OracleFamily {
    pub const ALL: [OracleFamily; 2] = [OracleFamily::Sqrt, OracleFamily::RecSplit];

    pub fn algo(self) -> Algo {
        match self {
            OracleFamily::Sqrt => Algo::Sqrt,
            OracleFamily::RecSplit => Algo::RecSplit,
        }
    }

    pub fn set_kind(self) -> OracleKind {
        match self {
            OracleFamily::Sqrt => OracleKind::SqrtSet,
            OracleFamily::RecSplit => OracleKind::RecSplitSet,
        }
    }

    pub fn element_kind(self) -> OracleKind {
        match self {
            OracleFamily::Sqrt => OracleKind::SqrtElement,
            OracleFamily::RecSplit => OracleKind::RecSplitElement,
        }
    }
}

impl std::str::FromStr for OracleFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt" => Ok(OracleFamily::Sqrt),
            "recsplit" => Ok(OracleFamily::RecSplit),
            _ => Err(Error::domain(format!("no oracle for algorithm `{s}`"))),
        }
    }
}

/// An oracle answer that disagrees with the global run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mismatch {
    Set { id: SetId, oracle: bool, global: bool },
    Element { id: ElementId, oracle: Option<SetId>, global: Option<SetId> },
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mismatch::Set { id, oracle, global } => {
                write!(f, "set {id}: oracle says {oracle}, global run says {global}")
            }
            Mismatch::Element { id, oracle, global } => {
                write!(f, "element {id}: oracle credits {oracle:?}, global run credits {global:?}")
            }
        }
    }
}

/// Compares one oracle answer with the global cover.
pub fn check_answer(kind: OracleKind, id: u32, answer: (bool, Option<SetId>), global: &CoverState) -> Option<Mismatch> {
    if kind.is_element() {
        let expected = global.cover_assignment[id as usize];
        (!answer.0 || answer.1 != expected).then_some(Mismatch::Element { id, oracle: answer.1, global: expected })
    } else {
        let expected = global.chosen[id as usize];
        (answer.0 != expected).then_some(Mismatch::Set { id, oracle: answer.0, global: expected })
    }
}

/// Asks every set, then every element, and returns the first answer that differs from the
/// global simulation with the same tape.
pub fn first_mismatch(ctx: &mut OracleContext<'_>, family: OracleFamily, params: &AlgoParams) -> Result<Option<Mismatch>> {
    let (global, _) = family.algo().run(ctx.sys, &ctx.tape, params)?;
    let kinds = [(family.set_kind(), ctx.sys.num_sets()), (family.element_kind(), ctx.sys.num_elements())];
    for (kind, count) in kinds {
        for id in 0..count as u32 {
            let answer = kind.ask(ctx, id)?;
            if let Some(m) = check_answer(kind, id, answer, &global) {
                return Ok(Some(m));
            }
        }
    }
    Ok(None)
}
