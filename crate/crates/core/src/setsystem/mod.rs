//! Set-system data model and the neighbor-query access layer.
//!
//! A [`SetSystem`] is the bipartite incidence structure between `m` sets and `n`
//! elements. Both adjacency directions are stored in compressed form and kept
//! sorted by id, so "smallest id" tie-breaks are deterministic everywhere.
//!
//! Algorithms that model a local computation never read the adjacency directly;
//! they go through [`query_set`] / [`query_element`], which charge one unit to a
//! [`QueryMeter`] per call. One query returns the whole neighborhood.

mod generate;
mod io;

pub use generate::{generate, Generated, InstanceKind, InstanceSpec};
pub use io::{read_instance, read_instance_str, write_instance, write_instance_string, InstanceFile};

use crate::error::{Error, Result};

pub type SetId = u32;
pub type ElementId = u32;

/// Immutable set system with bounds `s` (max set size) and `t` (max element degree).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    num_elements: usize,
    s: usize,
    t: usize,
    set_offsets: Vec<usize>,
    set_elems: Vec<ElementId>,
    elem_offsets: Vec<usize>,
    elem_sets: Vec<SetId>,
}

impl SetSystem {
    /// Builds a system from per-set element lists, checking every invariant.
    ///
    /// Element lists may arrive unsorted; duplicates inside one set are rejected.
    pub fn new(num_elements: usize, sets: Vec<Vec<ElementId>>, s: usize, t: usize) -> Result<Self> {
        let mut set_offsets = Vec::with_capacity(sets.len() + 1);
        let mut set_elems = Vec::with_capacity(sets.iter().map(Vec::len).sum());
        let mut degree = vec![0usize; num_elements];
        set_offsets.push(0);
        for (id, mut elems) in sets.into_iter().enumerate() {
            if elems.is_empty() {
                return Err(Error::Construction(format!("set {id} is empty")));
            }
            if elems.len() > s {
                return Err(Error::Construction(format!(
                    "set {id} has {} elements, more than s = {s}",
                    elems.len()
                )));
            }
            elems.sort_unstable();
            for w in elems.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::Construction(format!(
                        "set {id} lists element {} twice",
                        w[0]
                    )));
                }
            }
            for &e in &elems {
                let slot = degree.get_mut(e as usize).ok_or_else(|| {
                    Error::Construction(format!(
                        "set {id} references element {e} but n = {num_elements}"
                    ))
                })?;
                *slot += 1;
            }
            set_elems.extend_from_slice(&elems);
            set_offsets.push(set_elems.len());
        }
        if let Some((e, d)) = degree.iter().enumerate().find(|(_, &d)| d > t) {
            return Err(Error::Construction(format!(
                "element {e} is contained in {d} sets, more than t = {t}"
            )));
        }
        if let Some(e) = degree.iter().position(|&d| d == 0) {
            return Err(Error::Construction(format!(
                "element {e} is not contained in any set"
            )));
        }

        let mut elem_offsets = Vec::with_capacity(num_elements + 1);
        elem_offsets.push(0);
        for d in &degree {
            elem_offsets.push(elem_offsets.last().unwrap() + d);
        }
        let mut cursor = elem_offsets.clone();
        let mut elem_sets = vec![0 as SetId; set_elems.len()];
        // Sets are visited in id order, so every membership list comes out sorted.
        for set in 0..set_offsets.len() - 1 {
            for &e in &set_elems[set_offsets[set]..set_offsets[set + 1]] {
                elem_sets[cursor[e as usize]] = set as SetId;
                cursor[e as usize] += 1;
            }
        }

        Ok(SetSystem {
            num_elements,
            s,
            t,
            set_offsets,
            set_elems,
            elem_offsets,
            elem_sets,
        })
    }

    /// Like [`SetSystem::new`] with `s` and `t` taken as the observed maxima.
    pub fn from_sets(num_elements: usize, sets: Vec<Vec<ElementId>>) -> Result<Self> {
        let s = sets.iter().map(Vec::len).max().unwrap_or(1).max(1);
        let mut degree = vec![0usize; num_elements];
        for set in &sets {
            for &e in set {
                if let Some(d) = degree.get_mut(e as usize) {
                    *d += 1;
                }
            }
        }
        let t = degree.into_iter().max().unwrap_or(1).max(1);
        SetSystem::new(num_elements, sets, s, t)
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn num_sets(&self) -> usize {
        self.set_offsets.len() - 1
    }

    /// Declared maximum set size.
    pub fn s(&self) -> usize {
        self.s
    }

    /// Declared maximum element degree.
    pub fn t(&self) -> usize {
        self.t
    }

    /// Sorted elements of `set`. Direct access, not metered.
    #[inline]
    pub fn set(&self, set: SetId) -> &[ElementId] {
        let s = set as usize;
        &self.set_elems[self.set_offsets[s]..self.set_offsets[s + 1]]
    }

    /// Sorted ids of the sets containing `e`. Direct access, not metered.
    #[inline]
    pub fn element(&self, e: ElementId) -> &[SetId] {
        let e = e as usize;
        &self.elem_sets[self.elem_offsets[e]..self.elem_offsets[e + 1]]
    }

    pub fn sets(&self) -> impl ExactSizeIterator<Item = &[ElementId]> + '_ {
        (0..self.num_sets() as SetId).map(move |s| self.set(s))
    }

    pub fn contains(&self, set: SetId, e: ElementId) -> bool {
        self.set(set).binary_search(&e).is_ok()
    }

    /// Largest actual set size.
    pub fn max_set_size(&self) -> usize {
        self.sets().map(<[_]>::len).max().unwrap_or(0)
    }

    /// Largest actual element degree.
    pub fn max_degree(&self) -> usize {
        (0..self.num_elements as ElementId)
            .map(|e| self.element(e).len())
            .max()
            .unwrap_or(0)
    }

    /// Exhaustive check that both adjacency directions describe the same incidences.
    pub fn check_symmetry(&self) -> bool {
        let forward = (0..self.num_sets() as SetId)
            .all(|s| self.set(s).iter().all(|&e| self.element(e).binary_search(&s).is_ok()));
        let backward = (0..self.num_elements as ElementId)
            .all(|e| self.element(e).iter().all(|&s| self.set(s).binary_search(&e).is_ok()));
        forward && backward
    }

    /// Whether `chosen` (indexed by set id) covers every element.
    pub fn is_cover(&self, chosen: &[bool]) -> bool {
        (0..self.num_elements as ElementId)
            .all(|e| self.element(e).iter().any(|&s| chosen[s as usize]))
    }

    /// `ceil(n / s)`: no cover can use fewer sets.
    pub fn opt_lower_bound(&self) -> usize {
        self.num_elements.div_ceil(self.s.max(1))
    }
}

/// Read access to an incidence structure. Global simulations are written against
/// this trait so a run can be replayed through [`MeteredSystem`] to count its probes.
pub trait Incidence {
    fn num_elements(&self) -> usize;
    fn num_sets(&self) -> usize;
    fn s(&self) -> usize;
    fn t(&self) -> usize;
    fn set(&self, set: SetId) -> &[ElementId];
    fn element(&self, e: ElementId) -> &[SetId];
}

impl Incidence for SetSystem {
    fn num_elements(&self) -> usize {
        self.num_elements
    }
    fn num_sets(&self) -> usize {
        SetSystem::num_sets(self)
    }
    fn s(&self) -> usize {
        self.s
    }
    fn t(&self) -> usize {
        self.t
    }
    #[inline]
    fn set(&self, set: SetId) -> &[ElementId] {
        SetSystem::set(self, set)
    }
    #[inline]
    fn element(&self, e: ElementId) -> &[SetId] {
        SetSystem::element(self, e)
    }
}

/// A [`SetSystem`] view that counts every neighborhood read as one query.
pub struct MeteredSystem<'a> {
    sys: &'a SetSystem,
    count: std::cell::Cell<u64>,
}

impl<'a> MeteredSystem<'a> {
    pub fn new(sys: &'a SetSystem) -> Self {
        MeteredSystem {
            sys,
            count: std::cell::Cell::new(0),
        }
    }

    pub fn queries(&self) -> u64 {
        self.count.get()
    }
}

impl Incidence for MeteredSystem<'_> {
    fn num_elements(&self) -> usize {
        self.sys.num_elements()
    }
    fn num_sets(&self) -> usize {
        self.sys.num_sets()
    }
    fn s(&self) -> usize {
        self.sys.s()
    }
    fn t(&self) -> usize {
        self.sys.t()
    }
    fn set(&self, set: SetId) -> &[ElementId] {
        self.count.set(self.count.get() + 1);
        self.sys.set(set)
    }
    fn element(&self, e: ElementId) -> &[SetId] {
        self.count.set(self.count.get() + 1);
        self.sys.element(e)
    }
}

/// Counter of neighbor queries with an optional hard cap.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryMeter {
    count: u64,
    cap: Option<u64>,
}

impl QueryMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cap(cap: u64) -> Self {
        QueryMeter {
            count: 0,
            cap: Some(cap),
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn cap(&self) -> Option<u64> {
        self.cap
    }

    pub fn reset(&mut self) {
        self.count = 0;
    }

    fn charge(&mut self) -> Result<()> {
        if let Some(cap) = self.cap {
            if self.count >= cap {
                return Err(Error::BudgetExceeded { cap });
            }
        }
        self.count += 1;
        Ok(())
    }
}

/// Neighbor query on a set: all of its elements, at a cost of one query.
pub fn query_set<'a>(sys: &'a SetSystem, set: SetId, meter: &mut QueryMeter) -> Result<&'a [ElementId]> {
    if set as usize >= sys.num_sets() {
        return Err(Error::domain(format!(
            "set id {set} out of range (m = {})",
            sys.num_sets()
        )));
    }
    meter.charge()?;
    Ok(sys.set(set))
}

/// Neighbor query on an element: all sets containing it, at a cost of one query.
pub fn query_element<'a>(sys: &'a SetSystem, e: ElementId, meter: &mut QueryMeter) -> Result<&'a [SetId]> {
    if e as usize >= sys.num_elements() {
        return Err(Error::domain(format!(
            "element id {e} out of range (n = {})",
            sys.num_elements()
        )));
    }
    meter.charge()?;
    Ok(sys.element(e))
}
