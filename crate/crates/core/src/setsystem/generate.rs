//! Seeded instance generators.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ElementId, SetSystem};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    UniformRandom,
    PlantedCover,
    WorstCaseChain,
}

impl InstanceKind {
    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::UniformRandom => "uniform-random",
            InstanceKind::PlantedCover => "planted-cover",
            InstanceKind::WorstCaseChain => "worst-case-chain",
        }
    }
}

impl std::str::FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-random" | "uniform" => Ok(InstanceKind::UniformRandom),
            "planted-cover" | "planted" => Ok(InstanceKind::PlantedCover),
            "worst-case-chain" | "chain" => Ok(InstanceKind::WorstCaseChain),
            other => Err(Error::domain(format!("unknown instance kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceSpec {
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub t: usize,
    pub kind: InstanceKind,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub system: SetSystem,
    /// Size of the embedded optimal cover, when the generator knows it.
    pub planted_opt: Option<usize>,
}

/// Builds an instance. The same spec always yields the same system.
///
/// `s` and `t` are upper bounds; the realized maxima can be smaller.
pub fn generate(spec: &InstanceSpec) -> Result<Generated> {
    let InstanceSpec { n, m, s, t, kind, seed } = *spec;
    if n == 0 || m == 0 || s == 0 || t == 0 {
        return Err(Error::Construction(format!(
            "n, m, s, t must all be positive (got n={n} m={m} s={s} t={t})"
        )));
    }
    if n.div_ceil(s) > m {
        return Err(Error::Construction(format!(
            "{m} sets of size at most {s} cannot cover {n} elements"
        )));
    }
    if m > n.saturating_mul(t) {
        return Err(Error::Construction(format!(
            "{m} non-empty sets need more than n*t = {} incidences",
            n * t
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ kind_salt(kind));
    let (sets, planted_opt) = match kind {
        InstanceKind::UniformRandom => (uniform(n, m, s, t, &mut rng)?, None),
        InstanceKind::PlantedCover => planted(n, m, s, t, &mut rng)?,
        InstanceKind::WorstCaseChain => (chain(n, m, s, t, &mut rng)?, None),
    };
    let system = SetSystem::new(n, sets, s, t)?;
    Ok(Generated { system, planted_opt })
}

fn kind_salt(kind: InstanceKind) -> u64 {
    match kind {
        InstanceKind::UniformRandom => 0,
        InstanceKind::PlantedCover => 0x9e37_79b9_7f4a_7c15,
        InstanceKind::WorstCaseChain => 0xc2b2_ae3d_27d4_eb4f,
    }
}

/// Tracks per-element degrees and the pool of elements that can still take a set.
struct Pool {
    t: usize,
    degree: Vec<usize>,
    open: Vec<ElementId>,
    slot: Vec<usize>,
    capacity: usize,
}

impl Pool {
    fn new(n: usize, t: usize) -> Self {
        Pool {
            t,
            degree: vec![0; n],
            open: (0..n as ElementId).collect(),
            slot: (0..n).collect(),
            capacity: n * t,
        }
    }

    fn take(&mut self, e: ElementId) {
        let ei = e as usize;
        self.degree[ei] += 1;
        self.capacity -= 1;
        if self.degree[ei] == self.t {
            let at = self.slot[ei];
            let last = *self.open.last().unwrap();
            self.open.swap_remove(at);
            if last != e {
                self.slot[last as usize] = at;
            }
        }
    }

    fn release(&mut self, e: ElementId) {
        let ei = e as usize;
        if self.degree[ei] == self.t {
            self.slot[ei] = self.open.len();
            self.open.push(e);
        }
        self.degree[ei] -= 1;
        self.capacity += 1;
    }

    /// Draws `size` distinct open elements, keeping one incidence in reserve for each of
    /// the `later` sets still to be drawn.
    fn draw(&mut self, size: usize, later: usize, rng: &mut ChaCha8Rng) -> Vec<ElementId> {
        let size = size
            .min(self.open.len())
            .min(self.capacity.saturating_sub(later))
            .max(1);
        let picked: Vec<ElementId> = index::sample(rng, self.open.len(), size)
            .into_iter()
            .map(|i| self.open[i])
            .collect();
        for &e in &picked {
            self.take(e);
        }
        picked
    }
}

fn random_sets(
    count: usize,
    s: usize,
    pool: &mut Pool,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<ElementId>> {
    (0..count)
        .map(|j| {
            let size = rng.gen_range(s.div_ceil(2)..=s);
            pool.draw(size, count - j - 1, rng)
        })
        .collect()
}

/// Makes every element appear in some set, by growing a set with slack or by
/// swapping out an element that is covered elsewhere.
fn patch_uncovered(sets: &mut [Vec<ElementId>], s: usize, pool: &mut Pool, rng: &mut ChaCha8Rng) -> Result<()> {
    let n = pool.degree.len();
    let mut uncovered: Vec<ElementId> = (0..n as ElementId).filter(|&e| pool.degree[e as usize] == 0).collect();
    uncovered.shuffle(rng);
    for e in uncovered {
        let slack: Vec<usize> = (0..sets.len()).filter(|&j| sets[j].len() < s).collect();
        if let Some(&j) = slack.choose(rng) {
            sets[j].push(e);
            pool.take(e);
            continue;
        }
        let start = rng.gen_range(0..sets.len());
        let swap = (0..sets.len()).map(|d| (start + d) % sets.len()).find_map(|j| {
            sets[j]
                .iter()
                .position(|&f| pool.degree[f as usize] >= 2)
                .map(|pos| (j, pos))
        });
        let (j, pos) = swap.ok_or_else(|| {
            Error::Construction(format!("no room to cover element {e}"))
        })?;
        let old = std::mem::replace(&mut sets[j][pos], e);
        pool.release(old);
        pool.take(e);
    }
    Ok(())
}

fn uniform(n: usize, m: usize, s: usize, t: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<ElementId>>> {
    let mut pool = Pool::new(n, t);
    let mut sets = random_sets(m, s, &mut pool, rng);
    patch_uncovered(&mut sets, s, &mut pool, rng)?;
    Ok(sets)
}

fn planted(
    n: usize,
    m: usize,
    s: usize,
    t: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Vec<ElementId>>, Option<usize>)> {
    let blocks = n.div_ceil(s);
    if m > blocks && t < 2 {
        return Err(Error::Construction(format!(
            "t = 1 leaves no room for {} sets beyond the planted partition",
            m - blocks
        )));
    }
    if m - blocks > n * (t - 1) {
        return Err(Error::Construction(format!(
            "{} extra sets need more than n*(t-1) = {} incidences",
            m - blocks,
            n * (t - 1)
        )));
    }
    let mut order: Vec<ElementId> = (0..n as ElementId).collect();
    order.shuffle(rng);
    let mut pool = Pool::new(n, t);
    let mut sets: Vec<Vec<ElementId>> = order.chunks(s).map(<[_]>::to_vec).collect();
    for &e in &order {
        pool.take(e);
    }
    sets.extend(random_sets(m - blocks, s, &mut pool, rng));
    sets.shuffle(rng);
    // n/s is a lower bound on any cover, so the partition is optimal.
    Ok((sets, Some(blocks)))
}

/// Gadgets on which greedy is far from optimal: two row sets cover the gadget, but
/// the column blocks of sizes 4, 8, 16, ... each beat the rows by a little.
fn chain(n: usize, m: usize, s: usize, t: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<ElementId>>> {
    let levels = if s >= 4 && t >= 2 { s.ilog2() as usize - 1 } else { 0 };
    let gadget_n = (1usize << (levels + 2)).saturating_sub(4);
    let gadget_m = levels + 2;
    let mut gadgets = 0;
    if levels > 0 {
        // Gadget elements use two incidences, so each gadget also shrinks the filler budget.
        let fits = |g: usize| {
            let fixed = g * gadget_m + (n - g * gadget_n).div_ceil(s);
            fixed <= m && m - fixed <= n * (t - 1) - g * gadget_n
        };
        while (gadgets + 1) * gadget_n <= n && fits(gadgets + 1) {
            gadgets += 1;
        }
    }

    let mut order: Vec<ElementId> = (0..n as ElementId).collect();
    order.shuffle(rng);
    let mut pool = Pool::new(n, t);
    let mut sets = Vec::with_capacity(m);
    let mut next = 0;
    for _ in 0..gadgets {
        let elems = &order[next..next + gadget_n];
        next += gadget_n;
        let cols = gadget_n / 2;
        let (top, bottom) = elems.split_at(cols);
        sets.push(top.to_vec());
        sets.push(bottom.to_vec());
        let mut c = 0;
        for j in 1..=levels {
            let width = 1usize << j;
            let mut block = top[c..c + width].to_vec();
            block.extend_from_slice(&bottom[c..c + width]);
            sets.push(block);
            c += width;
        }
        // Each gadget element sits in one row and one column block.
        for &e in elems {
            pool.take(e);
            pool.take(e);
        }
    }
    for chunk in order[next..].chunks(s) {
        for &e in chunk {
            pool.take(e);
        }
        sets.push(chunk.to_vec());
    }
    if sets.len() > m {
        return Err(Error::Construction("chain layout exceeds m".into()));
    }
    let filler = m - sets.len();
    if filler > pool.capacity {
        return Err(Error::Construction(format!(
            "{filler} filler sets do not fit in the remaining degree budget"
        )));
    }
    sets.extend(random_sets(filler, s, &mut pool, rng));
    sets.shuffle(rng);
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, m: usize, s: usize, t: usize, kind: InstanceKind, seed: u64) -> InstanceSpec {
        InstanceSpec { n, m, s, t, kind, seed }
    }

    #[test]
    fn planted_partition_of_two() {
        let g = generate(&spec(6, 2, 3, 1, InstanceKind::PlantedCover, 5)).unwrap();
        assert_eq!(g.planted_opt, Some(2));
        assert_eq!(g.system.num_sets(), 2);
        assert_eq!(g.system.set(0).len(), 3);
        assert_eq!(g.system.set(1).len(), 3);
        assert!(g.system.set(0).iter().all(|e| !g.system.set(1).contains(e)));
    }

    #[test]
    fn generation_is_deterministic() {
        for kind in [InstanceKind::UniformRandom, InstanceKind::PlantedCover, InstanceKind::WorstCaseChain] {
            let a = generate(&spec(100, 200, 10, 8, kind, 1)).unwrap();
            let b = generate(&spec(100, 200, 10, 8, kind, 1)).unwrap();
            assert_eq!(a.system, b.system);
            let c = generate(&spec(100, 200, 10, 8, kind, 2)).unwrap();
            assert_ne!(a.system, c.system);
        }
    }

    #[test]
    fn bounds_hold_across_shapes() {
        for kind in [InstanceKind::UniformRandom, InstanceKind::PlantedCover, InstanceKind::WorstCaseChain] {
            for &(n, m, s, t) in &[(50, 20, 4, 4), (300, 80, 16, 8), (64, 600, 8, 64), (10, 3, 4, 2), (500, 500, 32, 32)] {
                let g = generate(&spec(n, m, s, t, kind, 9)).unwrap();
                let sys = &g.system;
                assert_eq!(sys.num_sets(), m);
                assert!(sys.max_set_size() <= s);
                assert!(sys.max_degree() <= t);
                assert!(sys.check_symmetry());
            }
        }
    }

    #[test]
    fn infeasible_specs_are_rejected() {
        assert!(generate(&spec(100, 5, 10, 4, InstanceKind::UniformRandom, 0)).is_err());
        assert!(generate(&spec(4, 20, 4, 2, InstanceKind::UniformRandom, 0)).is_err());
        assert!(generate(&spec(6, 3, 3, 1, InstanceKind::PlantedCover, 0)).is_err());
    }

    #[test]
    fn chain_contains_gadgets() {
        let g = generate(&spec(60, 30, 8, 4, InstanceKind::WorstCaseChain, 3)).unwrap();
        // s = 8 gives two levels: rows of 6 elements and blocks of 4 and 8.
        let sizes: Vec<usize> = g.system.sets().map(<[_]>::len).collect();
        assert!(sizes.iter().filter(|&&l| l == 6).count() >= 2);
        assert!(sizes.iter().filter(|&&l| l == 4).count() >= 1);
    }
}
