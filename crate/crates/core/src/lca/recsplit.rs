//! Oracle for the recursive-split algorithm.
//!
//! Time runs in half-rounds: `2r` is after the pretend marks of round `r`, `2r + 1`
//! after its additions. Round `(i-1)(L+1)` holds stage `i`'s force-adds and pretend
//! marks, round `(i-1)(L+1) + k` its iteration `k`. Rounds inside a leaf of the split
//! tree are resolved by gathering a bounded neighborhood and replaying the leaf locally.

use std::collections::{HashMap, VecDeque};

use super::{min_passing, OracleContext, Tally};
use crate::error::{Error, Result};
use crate::global::{estimate_passes, range_mask, stage_round, BadSetRule, Dims, Round};
use crate::setsystem::{ElementId, SetId};

#[derive(Clone, Debug)]
struct Node {
    k0: u32,
    r: u32,
    depth: u32,
    /// First iteration of the right half, for internal nodes.
    mid: Option<u32>,
    /// Internal ancestors whose right half contains this node.
    gates: Vec<usize>,
}

/// The split tree, identical for every stage.
#[derive(Clone, Debug)]
struct Tree {
    nodes: Vec<Node>,
    leaf_of: Vec<usize>,
    mid_owner: Vec<Option<usize>>,
}

impl Tree {
    fn new(dims: &Dims) -> Self {
        let mut tree = Tree {
            nodes: Vec::new(),
            leaf_of: vec![0; dims.log_t as usize + 1],
            mid_owner: vec![None; dims.log_t as usize + 1],
        };
        tree.build(dims.base_case_r, 1, dims.log_t, 0, Vec::new());
        tree
    }

    fn build(&mut self, base_r: u32, k0: u32, r: u32, depth: u32, gates: Vec<usize>) {
        let idx = self.nodes.len();
        let split = r > base_r;
        let mid = split.then(|| k0 + r / 2);
        self.nodes.push(Node { k0, r, depth, mid, gates: gates.clone() });
        match mid {
            None => {
                for k in k0..k0 + r {
                    self.leaf_of[k as usize] = idx;
                }
            }
            Some(mid) => {
                self.mid_owner[mid as usize] = Some(idx);
                self.build(base_r, k0, r / 2, depth + 1, gates.clone());
                let mut right = gates;
                right.push(idx);
                self.build(base_r, mid, r - r / 2, depth + 1, right);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Obj {
    Set(SetId),
    Elem(ElementId),
}

struct RecSplit<'c, 'a> {
    ctx: &'c mut OracleContext<'a>,
    tree: Tree,
    nonfree: HashMap<(u32, ElementId), bool>,
    set_at: HashMap<(u32, SetId), Option<Round>>,
    est: HashMap<(u32, u32, SetId), Tally>,
    root: HashMap<(u32, SetId), u64>,
    gate: HashMap<(u32, usize, SetId), bool>,
    leaf: HashMap<(u32, usize, Obj), Option<u32>>,
}

impl<'c, 'a> RecSplit<'c, 'a> {
    fn new(ctx: &'c mut OracleContext<'a>) -> Self {
        let tree = Tree::new(&ctx.dims);
        RecSplit {
            ctx,
            tree,
            nonfree: HashMap::new(),
            set_at: HashMap::new(),
            est: HashMap::new(),
            root: HashMap::new(),
            gate: HashMap::new(),
            leaf: HashMap::new(),
        }
    }

    fn dims(&self) -> Dims {
        self.ctx.dims
    }

    /// (stage, iteration) of round `r`; iteration 0 is the stage start.
    fn split_round(&self, r: u32) -> (u32, u32) {
        let per = self.dims().log_t + 1;
        (r / per + 1, r % per)
    }

    fn last_round(&self) -> u32 {
        self.dims().log_s * (self.dims().log_t + 1) - 1
    }

    fn level(&self, r: u32) -> (u32, u32) {
        let (i, k) = self.split_round(r);
        if k == 0 {
            (i, 0)
        } else {
            (i, self.tree.nodes[self.tree.leaf_of[k as usize]].depth + 1)
        }
    }

    fn free_at(&mut self, t: u32, e: ElementId) -> Result<bool> {
        Ok(!self.nonfree(t, e)?)
    }

    /// Whether at least `need` elements of `S` in its stage-`i` sample are free at time `t`.
    fn at_least(&mut self, t: u32, i: u32, set: SetId, need: Option<usize>) -> Result<bool> {
        let Some(need) = need else { return Ok(false) };
        let mut tally = self.est.get(&(t, i, set)).copied().unwrap_or_default();
        if tally.count >= need {
            return Ok(true);
        }
        let p = self.dims().p(i);
        let nbrs = self.ctx.set_nbrs(set)?;
        while tally.pos < nbrs.len() && tally.count < need {
            let e = nbrs[tally.pos];
            tally.pos += 1;
            if self.ctx.tape.elem_sample(i, set, e, p) && self.free_at(t, e)? {
                tally.count += 1;
            }
        }
        self.est.insert((t, i, set), tally);
        Ok(tally.count >= need)
    }

    fn est_ok(&mut self, t: u32, i: u32, set: SetId) -> Result<bool> {
        let d = self.dims();
        let need = min_passing(d.s, |c| estimate_passes(c, d.p(i), d.threshold(i)));
        self.at_least(t, i, set, need)
    }

    fn bad_set(&mut self, i: u32, set: SetId) -> Result<bool> {
        let d = self.dims();
        let t = 2 * stage_round(&d, i);
        match d.bad_set_rule {
            BadSetRule::Literal => {
                self.at_least(t, i, set, min_passing(d.s, |c| c as f64 >= d.lambda10))
            }
            BadSetRule::StageScaled => {
                for i2 in i..=d.log_s {
                    let need = min_passing(d.s, |c| c as f64 >= d.scaled_threshold(i2 - i));
                    if self.at_least(t, i2, set, need)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Stage-start candidate families of `S`: bit `k-1` for iteration `k`.
    fn root_fam(&mut self, i: u32, set: SetId) -> Result<u64> {
        if let Some(&m) = self.root.get(&(i, set)) {
            return Ok(m);
        }
        let d = self.dims();
        let coins = (1..=d.log_t)
            .filter(|&k| self.ctx.tape.set_sample(i, k, set, d.q(k)))
            .fold(0u64, |acc, k| acc | 1 << (k - 1));
        let m = if coins != 0 && self.est_ok(2 * stage_round(&d, i), i, set)? {
            coins
        } else {
            0
        };
        self.root.insert((i, set), m);
        Ok(m)
    }

    /// Whether `S` survives the re-thinning at the midpoint of internal node `node`.
    fn gate(&mut self, i: u32, node: usize, set: SetId) -> Result<bool> {
        if let Some(&g) = self.gate.get(&(i, node, set)) {
            return Ok(g);
        }
        let mid = self.tree.nodes[node].mid.expect("gate on a leaf");
        let t = 2 * (stage_round(&self.dims(), i) + mid) - 1;
        let g = self.est_ok(t, i, set)?;
        self.gate.insert((i, node, set), g);
        Ok(g)
    }

    /// Candidate bits of `S` as seen inside `node`, restricted to its iteration range.
    fn fam(&mut self, i: u32, node: usize, set: SetId) -> Result<u64> {
        let (k0, r) = (self.tree.nodes[node].k0, self.tree.nodes[node].r);
        let m = self.root_fam(i, set)? & range_mask(k0, r);
        if m == 0 {
            return Ok(0);
        }
        for g in 0..self.tree.nodes[node].gates.len() {
            let a = self.tree.nodes[node].gates[g];
            if !self.gate(i, a, set)? {
                return Ok(0);
            }
        }
        Ok(m)
    }

    fn stage_pretend(&mut self, i: u32, e: ElementId) -> Result<bool> {
        let d = self.dims();
        let mut degree = vec![0usize; d.log_t as usize];
        for &set in self.ctx.elem_nbrs(e)? {
            let m = self.root_fam(i, set)?;
            for (b, slot) in degree.iter_mut().enumerate() {
                *slot += (m >> b & 1) as usize;
            }
        }
        Ok(degree
            .iter()
            .enumerate()
            .any(|(b, &c)| c as f64 >= d.scaled_threshold(b as u32 + 1)))
    }

    fn mid_pretend(&mut self, i: u32, node: usize, e: ElementId) -> Result<bool> {
        let d = self.dims();
        let n = &self.tree.nodes[node];
        let (k0, r) = (n.k0, n.r);
        let mid = n.mid.unwrap();
        let upper = range_mask(mid, k0 + r - mid);
        let mut degree = vec![0usize; (k0 + r - mid) as usize];
        for &set in self.ctx.elem_nbrs(e)? {
            let m = self.fam(i, node, set)? & upper;
            if m == 0 || !self.gate(i, node, set)? {
                continue;
            }
            for (b, slot) in degree.iter_mut().enumerate() {
                *slot += (m >> (mid - 1 + b as u32) & 1) as usize;
            }
        }
        Ok(degree
            .iter()
            .enumerate()
            .any(|(b, &c)| c as f64 >= d.scaled_threshold(b as u32)))
    }

    fn nonfree(&mut self, t: u32, e: ElementId) -> Result<bool> {
        if let Some(&b) = self.nonfree.get(&(t, e)) {
            return Ok(b);
        }
        let b = if t > 0 && self.nonfree(t - 1, e)? {
            true
        } else {
            let saved = self.ctx.enter(self.level(t / 2));
            let b = self.becomes_nonfree(t, e);
            self.ctx.enter(saved);
            b?
        };
        self.nonfree.insert((t, e), b);
        Ok(b)
    }

    /// `e` is free at time `t - 1`; is it covered or pretending at `t`?
    fn becomes_nonfree(&mut self, t: u32, e: ElementId) -> Result<bool> {
        let r = t / 2;
        let (i, k) = self.split_round(r);
        let d = self.dims();
        let base = stage_round(&d, i);
        if k == 0 {
            if t.is_multiple_of(2) {
                return Ok(false);
            }
            for &set in self.ctx.elem_nbrs(e)? {
                if self.bad_set(i, set)? {
                    return Ok(true);
                }
            }
            return self.stage_pretend(i, e);
        }
        let leaf = self.tree.leaf_of[k as usize];
        let entry = 2 * (base + self.tree.nodes[leaf].k0);
        if t == entry {
            return match self.tree.mid_owner[k as usize] {
                Some(node) => self.mid_pretend(i, node, e),
                None => Ok(false),
            };
        }
        let bound = if t % 2 == 1 { r } else { r - 1 };
        Ok(self.leaf_replay(i, leaf, Obj::Elem(e))?.is_some_and(|at| at <= bound))
    }

    fn set_at(&mut self, r: u32, set: SetId) -> Result<Option<Round>> {
        if let Some(&a) = self.set_at.get(&(r, set)) {
            return Ok(a);
        }
        let prev = if r > 0 { self.set_at(r - 1, set)? } else { None };
        let a = match prev {
            Some(_) => prev,
            None => {
                let saved = self.ctx.enter(self.level(r));
                let (i, k) = self.split_round(r);
                let added = if k == 0 {
                    self.bad_set(i, set)
                } else {
                    let leaf = self.tree.leaf_of[k as usize];
                    self.leaf_replay(i, leaf, Obj::Set(set)).map(|at| at == Some(r))
                };
                self.ctx.enter(saved);
                added?.then_some(Round(r))
            }
        };
        self.set_at.insert((r, set), a);
        Ok(a)
    }

    /// Round in which `center` is added (set) or first covered (element) during `leaf`,
    /// found by replaying the leaf on the `2R+1`-hop neighborhood of `center` in the
    /// graph of sampled free elements and candidate sets.
    fn leaf_replay(&mut self, i: u32, leaf: usize, center: Obj) -> Result<Option<u32>> {
        if let Some(&v) = self.leaf.get(&(i, leaf, center)) {
            return Ok(v);
        }
        let d = self.dims();
        let (k0, r) = (self.tree.nodes[leaf].k0, self.tree.nodes[leaf].r);
        let base = stage_round(&d, i);
        let entry = 2 * (base + k0);
        let p = d.p(i);
        let radius = 2 * r + 1;

        let mut sets: HashMap<SetId, (u64, Option<Vec<ElementId>>)> = HashMap::new();
        let mut elems: HashMap<ElementId, Option<Vec<SetId>>> = HashMap::new();
        let mut queue = VecDeque::new();
        match center {
            Obj::Set(s) => {
                let m = self.fam(i, leaf, s)?;
                if m == 0 {
                    self.leaf.insert((i, leaf, center), None);
                    return Ok(None);
                }
                sets.insert(s, (m, None));
            }
            Obj::Elem(e) => {
                if !self.free_at(entry, e)? {
                    self.leaf.insert((i, leaf, center), None);
                    return Ok(None);
                }
                elems.insert(e, None);
            }
        }
        queue.push_back((center, 0u32));
        while let Some((obj, dist)) = queue.pop_front() {
            if dist >= radius {
                continue;
            }
            match obj {
                Obj::Set(s) => {
                    let mut out = Vec::new();
                    for &e in self.ctx.set_nbrs(s)? {
                        if self.ctx.tape.elem_sample(i, s, e, p) && self.free_at(entry, e)? {
                            out.push(e);
                            if let std::collections::hash_map::Entry::Vacant(v) = elems.entry(e) {
                                v.insert(None);
                                queue.push_back((Obj::Elem(e), dist + 1));
                            }
                        }
                    }
                    sets.get_mut(&s).unwrap().1 = Some(out);
                }
                Obj::Elem(e) => {
                    let mut out = Vec::new();
                    let mut degree = vec![0usize; r as usize];
                    for &s in self.ctx.elem_nbrs(e)? {
                        let m = self.fam(i, leaf, s)?;
                        if m == 0 {
                            continue;
                        }
                        for (b, slot) in degree.iter_mut().enumerate() {
                            *slot += (m >> (k0 - 1 + b as u32) & 1) as usize;
                        }
                        out.push(s);
                        if let std::collections::hash_map::Entry::Vacant(v) = sets.entry(s) {
                            v.insert((m, None));
                            queue.push_back((Obj::Set(s), dist + 1));
                        }
                    }
                    if let Some(l) = (0..r as usize).find(|&l| degree[l] as f64 > d.scaled_threshold(l as u32 + 1)) {
                        return Err(Error::Invariant(format!(
                            "free element {e} lies in {} candidate sets of iteration {} in stage {i}",
                            degree[l],
                            k0 + l as u32
                        )));
                    }
                    elems.insert(e, Some(out));
                }
            }
        }

        // Replay the leaf's iterations; only the center's outcome is guaranteed exact.
        let mut covered: HashMap<ElementId, u32> = HashMap::new();
        let mut added: HashMap<SetId, u32> = HashMap::new();
        let mut order: Vec<SetId> = sets.keys().copied().collect();
        order.sort_unstable();
        for k in k0..k0 + r {
            let round = base + k;
            let bit = 1u64 << (k - 1);
            let batch: Vec<SetId> = order
                .iter()
                .copied()
                .filter(|s| {
                    let (m, out) = &sets[s];
                    let Some(out) = out else { return false };
                    m & bit != 0
                        && !added.contains_key(s)
                        && estimate_passes(
                            out.iter().filter(|e| !covered.contains_key(e)).count(),
                            p,
                            d.threshold(i),
                        )
                })
                .collect();
            for &s in &batch {
                added.insert(s, round);
            }
            // An added set covers all of its elements, sampled or not.
            for (&e, list) in &elems {
                if let Some(list) = list {
                    if !covered.contains_key(&e) && list.iter().any(|s| added.get(s) == Some(&round)) {
                        covered.insert(e, round);
                    }
                }
            }
        }
        let v = match center {
            Obj::Set(s) => added.get(&s).copied(),
            Obj::Elem(e) => covered.get(&e).copied(),
        };
        self.leaf.insert((i, leaf, center), v);
        Ok(v)
    }

    fn covered_at_end(&mut self, e: ElementId) -> Result<Option<(Round, SetId)>> {
        let last = self.last_round();
        if !self.nonfree(2 * last + 1, e)? {
            return Ok(None);
        }
        let mut best = None;
        for &set in self.ctx.elem_nbrs(e)? {
            if let Some(r) = self.set_at(last, set)? {
                if best.is_none_or(|b| (r, set) < b) {
                    best = Some((r, set));
                }
            }
        }
        Ok(best)
    }
}

/// Whether `set` belongs to the cover produced by the recursive-split simulation.
pub fn oracle_recsplit_set(ctx: &mut OracleContext<'_>, set: SetId) -> Result<bool> {
    ctx.check_set(set)?;
    ctx.call(|ctx| {
        let mut o = RecSplit::new(ctx);
        let last = o.last_round();
        if o.set_at(last, set)?.is_some() {
            return Ok(true);
        }
        for &e in o.ctx.set_nbrs(set)? {
            if o.ctx.elem_nbrs(e)?[0] == set && o.covered_at_end(e)?.is_none() {
                return Ok(true);
            }
        }
        Ok(false)
    })
}

/// Whether `e` is covered and by which set, for the recursive-split simulation.
pub fn oracle_recsplit_element(ctx: &mut OracleContext<'_>, e: ElementId) -> Result<(bool, Option<SetId>)> {
    ctx.check_element(e)?;
    ctx.call(|ctx| {
        let mut o = RecSplit::new(ctx);
        let by = match o.covered_at_end(e)? {
            Some((_, set)) => set,
            None => o.ctx.elem_nbrs(e)?[0],
        };
        Ok((true, Some(by)))
    })
}
