//! Embedding search inside a window of m consecutive levels of a Boolean
//! lattice over an unbounded ground set.
//!
//! Images are represented relative to the first embedded set ("base"): a
//! candidate set is (base minus a finite hole mask) union a finite up mask.
//! Inclusion is then (H1, S1) <= (H2, S2) iff H1 >= H2 and S1 <= S2, and a
//! set's level offset is |S| - |H|. Any copy lying in m consecutive levels
//! of any 2^[N] normalizes to this form with at most (m-1)(|P|-1) named
//! atoms (each element of a connected poset enters within m-1 levels of an
//! already-placed comparable element), and conversely every abstract
//! solution lifts into the m middle levels of 2^[N] for N large by padding
//! with a common disjoint block. Atom names are allocated in first-use
//! order, which quotients out ground-set permutations.

use crate::error::{Error, Result};
use crate::poset::Poset;

const MAX_ATOMS: u32 = 63;
const NODE_LIMIT: u64 = 2_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbstractSet {
    pub holes: u64,
    pub ups: u64,
}

impl AbstractSet {
    fn offset(self) -> i32 {
        self.ups.count_ones() as i32 - self.holes.count_ones() as i32
    }

    fn subset_of(self, other: AbstractSet) -> bool {
        self.holes & other.holes == other.holes && self.ups & other.ups == self.ups
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Exists,
    MaxSpan,
}

struct WindowEngine<'a> {
    p: &'a Poset,
    induced: bool,
    window: u32,
    budget: u32,
    /// Element processed at each depth; every element after the first is
    /// comparable to an earlier one.
    order: Vec<usize>,
    lowers: Vec<Vec<usize>>,
    uppers: Vec<Vec<usize>>,
    incomp: Vec<Vec<usize>>,
    /// Element is maximal and all its lower covers appear earlier: its
    /// open up-side may allocate fresh atoms only (reuse never helps).
    fresh_only_up: Vec<bool>,
    fresh_only_hole: Vec<bool>,
    /// Latest earlier position holding an interchangeable element (same
    /// up-set and down-set, incomparable): fresh-free candidates must
    /// exceed its image, which turns sibling permutations into
    /// combinations.
    prev_sibling: Vec<Option<usize>>,
    took_fresh: Vec<bool>,
    images: Vec<AbstractSet>,
    up_count: u32,
    hole_count: u32,
    nodes: u64,
    mode: Mode,
    best_span: Option<u32>,
    witness: Option<Vec<AbstractSet>>,
}

/// Spanning assignment order: start at a maximum-degree element, then
/// repeatedly take the element with the most already-ordered comparables,
/// preferring high-degree hubs so later elements arrive sandwiched.
fn spanning_order(p: &Poset) -> Vec<usize> {
    let k = p.size();
    let deg = |v: usize| (0..k).filter(|&u| u != v && p.comparable(u, v)).count();
    let start = (0..k).max_by_key(|&v| (deg(v), usize::MAX - v)).unwrap();
    let mut order = vec![start];
    let mut placed = vec![false; k];
    placed[start] = true;
    while order.len() < k {
        let next = (0..k)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let anchored = order.iter().filter(|&&u| p.comparable(u, v)).count();
                (anchored, deg(v), usize::MAX - v)
            })
            .unwrap();
        order.push(next);
        placed[next] = true;
    }
    order
}

impl<'a> WindowEngine<'a> {
    fn new(p: &'a Poset, window: u32, induced: bool, mode: Mode) -> Result<Self> {
        let k = p.size();
        let budget = (window - 1) * (k as u32 - 1).max(0);
        if budget > MAX_ATOMS {
            return Err(Error::TooLarge {
                what: "window search atom budget",
                requested: budget as u64,
                limit: MAX_ATOMS as u64,
            });
        }
        let order = spanning_order(p);
        let mut lowers = vec![Vec::new(); k];
        let mut uppers = vec![Vec::new(); k];
        let mut incomp = vec![Vec::new(); k];
        let mut fresh_only_up = vec![false; k];
        let mut fresh_only_hole = vec![false; k];
        let mut prev_sibling = vec![None; k];
        for d in 0..k {
            let elem = order[d];
            for e in 0..d {
                let prev = order[e];
                if p.less(prev, elem) {
                    lowers[d].push(e);
                } else if p.less(elem, prev) {
                    uppers[d].push(e);
                } else {
                    incomp[d].push(e);
                }
                if !p.comparable(prev, elem)
                    && p.above(prev) == p.above(elem)
                    && p.below(prev) == p.below(elem)
                {
                    prev_sibling[d] = Some(e);
                }
            }
            let assigned: u64 = order[..d].iter().fold(0, |acc, &e| acc | 1 << e);
            fresh_only_up[d] = p.above(elem) == 0 && p.below(elem) & !assigned == 0;
            fresh_only_hole[d] = p.below(elem) == 0 && p.above(elem) & !assigned == 0;
        }
        Ok(WindowEngine {
            p,
            induced,
            window,
            budget,
            order,
            lowers,
            uppers,
            incomp,
            fresh_only_up,
            fresh_only_hole,
            prev_sibling,
            took_fresh: vec![false; k],
            images: vec![AbstractSet { holes: 0, ups: 0 }; k],
            up_count: 0,
            hole_count: 0,
            nodes: 0,
            mode,
            best_span: None,
            witness: None,
        })
    }

    fn run(&mut self) -> Result<()> {
        self.recurse(0, 0, 0)?;
        Ok(())
    }

    fn record_leaf(&mut self) {
        let span = self.up_count + self.hole_count;
        if self.best_span.map_or(true, |b| span > b) {
            self.best_span = Some(span);
            let mut by_element = vec![AbstractSet { holes: 0, ups: 0 }; self.p.size()];
            for (d, &e) in self.order.iter().enumerate() {
                by_element[e] = self.images[d];
            }
            self.witness = Some(by_element);
        }
    }

    fn recurse(&mut self, d: usize, min_off: i32, max_off: i32) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > NODE_LIMIT {
            return Err(Error::TooLarge {
                what: "window search nodes",
                requested: self.nodes,
                limit: NODE_LIMIT,
            });
        }
        if d == self.p.size() {
            self.record_leaf();
            return Ok(self.mode == Mode::Exists);
        }
        if self.mode == Mode::MaxSpan {
            // Each remaining element introduces at most window-1 atoms.
            let optimistic = self.up_count
                + self.hole_count
                + (self.p.size() - d) as u32 * (self.window - 1);
            if let Some(best) = self.best_span {
                if optimistic <= best {
                    return Ok(false);
                }
            }
        }
        if d == 0 {
            self.images[0] = AbstractSet { holes: 0, ups: 0 };
            return self.recurse(1.min(self.p.size()), 0, 0);
        }

        // Interval bounds induced by already-assigned comparables.
        let mut s_lo = 0u64;
        let mut h_hi_opt: Option<u64> = None;
        for &e in &self.lowers[d] {
            s_lo |= self.images[e].ups;
            h_hi_opt = Some(h_hi_opt.map_or(self.images[e].holes, |h| h & self.images[e].holes));
        }
        let mut h_lo = 0u64;
        let mut s_hi_opt: Option<u64> = None;
        for &e in &self.uppers[d] {
            h_lo |= self.images[e].holes;
            s_hi_opt = Some(s_hi_opt.map_or(self.images[e].ups, |s| s & self.images[e].ups));
        }
        if let Some(h_hi) = h_hi_opt {
            if h_lo & h_hi != h_lo {
                return Ok(false);
            }
        }
        if let Some(s_hi) = s_hi_opt {
            if s_lo & s_hi != s_lo {
                return Ok(false);
            }
        }

        let used_ups = (1u64 << self.up_count) - 1;
        let used_holes = (1u64 << self.hole_count) - 1;
        let atoms_left = self.budget - self.up_count - self.hole_count;

        // Hole-side options: submasks of a finite interval when a lower is
        // assigned; otherwise reuse across used holes plus fresh ones.
        let mut hole_choices: Vec<(u64, u32)> = Vec::new();
        match h_hi_opt {
            Some(h_hi) => {
                for_submasks(h_hi & !h_lo, |y| hole_choices.push((h_lo | y, 0)));
            }
            None => {
                let reuse = if self.fresh_only_hole[d] { 0 } else { used_holes & !h_lo };
                for_submasks(reuse, |y| {
                    let max_fresh = atoms_left.min(self.window - 1);
                    for j in 0..=max_fresh {
                        let fresh = ((1u64 << j) - 1) << self.hole_count;
                        hole_choices.push((h_lo | y | fresh, j));
                    }
                });
            }
        }

        for (holes, fresh_holes) in hole_choices {
            let atoms_after_holes = atoms_left - fresh_holes;
            let mut result = Ok(false);
            let mut stop = false;
            let s_reuse_pool = match s_hi_opt {
                Some(s_hi) => s_hi & !s_lo,
                None if self.fresh_only_up[d] => 0,
                None => used_ups & !s_lo,
            };
            for_submasks_until(s_reuse_pool, |x| {
                let max_fresh = if s_hi_opt.is_some() {
                    0
                } else {
                    atoms_after_holes.min(self.window - 1)
                };
                for k in 0..=max_fresh {
                    let fresh = ((1u64 << k) - 1) << self.up_count;
                    let cand = AbstractSet {
                        holes,
                        ups: s_lo | x | fresh,
                    };
                    match self.try_candidate(d, cand, k, fresh_holes, min_off, max_off) {
                        Ok(true) => {
                            result = Ok(true);
                            stop = true;
                            return true;
                        }
                        Ok(false) => {}
                        Err(e) => {
                            result = Err(e);
                            stop = true;
                            return true;
                        }
                    }
                }
                false
            });
            if stop {
                return result;
            }
        }
        Ok(false)
    }

    fn try_candidate(
        &mut self,
        d: usize,
        cand: AbstractSet,
        fresh_ups: u32,
        fresh_holes: u32,
        min_off: i32,
        max_off: i32,
    ) -> Result<bool> {
        let off = cand.offset();
        let new_min = min_off.min(off);
        let new_max = max_off.max(off);
        if new_max - new_min > self.window as i32 - 1 {
            return Ok(false);
        }
        for &e in &self.lowers[d] {
            if self.images[e] == cand || off <= self.images[e].offset() {
                return Ok(false);
            }
        }
        for &e in &self.uppers[d] {
            if self.images[e] == cand || off >= self.images[e].offset() {
                return Ok(false);
            }
        }
        for &e in &self.incomp[d] {
            let other = self.images[e];
            if self.induced {
                if cand.subset_of(other) || other.subset_of(cand) {
                    return Ok(false);
                }
            } else if cand == other {
                return Ok(false);
            }
        }
        // Canonical order within interchangeable sibling groups; only
        // naming-independent (fresh-free) candidates are comparable.
        if let Some(e) = self.prev_sibling[d] {
            if fresh_ups == 0 && fresh_holes == 0 && !self.took_fresh[e] {
                let prev = self.images[e];
                if (cand.holes, cand.ups) <= (prev.holes, prev.ups) {
                    return Ok(false);
                }
            }
        }
        self.images[d] = cand;
        self.took_fresh[d] = fresh_ups > 0 || fresh_holes > 0;
        self.up_count += fresh_ups;
        self.hole_count += fresh_holes;
        let out = self.recurse(d + 1, new_min, new_max);
        self.up_count -= fresh_ups;
        self.hole_count -= fresh_holes;
        out
    }
}

fn for_submasks(mask: u64, mut f: impl FnMut(u64)) {
    let mut t = mask;
    loop {
        f(mask & !t);
        if t == 0 {
            break;
        }
        t = (t - 1) & mask;
    }
}

fn for_submasks_until(mask: u64, mut f: impl FnMut(u64) -> bool) {
    let mut t = mask;
    loop {
        if f(mask & !t) {
            return;
        }
        if t == 0 {
            break;
        }
        t = (t - 1) & mask;
    }
}

/// Does a connected poset embed into some window of `window` consecutive
/// levels (of an arbitrarily large ground set)?
pub fn window_embeds(p: &Poset, window: u32, induced: bool) -> Result<bool> {
    debug_assert!(window >= 1);
    let mut engine = WindowEngine::new(p, window, induced, Mode::Exists)?;
    engine.run()?;
    Ok(engine.best_span.is_some())
}

/// One witnessing assignment (element order) if the poset embeds.
pub fn find_window_copy(p: &Poset, window: u32, induced: bool) -> Result<Option<Vec<AbstractSet>>> {
    let mut engine = WindowEngine::new(p, window, induced, Mode::Exists)?;
    engine.run()?;
    Ok(engine.witness)
}

/// Maximum of |union minus intersection| over all copies of a connected
/// poset inside a window of the given height.
pub fn max_span_in_window(p: &Poset, window: u32, induced: bool) -> Result<Option<u32>> {
    let mut engine = WindowEngine::new(p, window, induced, Mode::MaxSpan)?;
    engine.run()?;
    Ok(engine.best_span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::NamedPoset;

    fn poset(text: &str) -> Poset {
        NamedPoset::parse(text).unwrap().build().unwrap()
    }

    #[test]
    fn chains_need_their_height() {
        for k in 2..=5u32 {
            let c = poset(&format!("chain:{k}"));
            assert!(!window_embeds(&c, k - 1, false).unwrap());
            assert!(window_embeds(&c, k, false).unwrap());
        }
    }

    #[test]
    fn single_element_embeds_everywhere() {
        let p = poset("chain:1");
        assert!(window_embeds(&p, 1, false).unwrap());
        assert_eq!(max_span_in_window(&p, 1, true).unwrap(), Some(0));
    }

    #[test]
    fn connected_pair_needs_two_levels() {
        let p = poset("chain:2");
        assert!(!window_embeds(&p, 1, false).unwrap());
        assert!(window_embeds(&p, 2, false).unwrap());
        assert_eq!(max_span_in_window(&p, 2, false).unwrap(), Some(1));
    }

    #[test]
    fn vee_in_two_levels() {
        let v = poset("vee:2");
        assert!(!window_embeds(&v, 1, true).unwrap());
        assert!(window_embeds(&v, 2, true).unwrap());
        // Both tops take a private fresh atom above the shared bottom.
        assert_eq!(max_span_in_window(&v, 2, false).unwrap(), Some(2));
    }

    #[test]
    fn diamond_window_thresholds() {
        let d2 = poset("diamond:2");
        assert!(!window_embeds(&d2, 2, false).unwrap());
        assert!(window_embeds(&d2, 3, false).unwrap());
        assert_eq!(max_span_in_window(&d2, 3, false).unwrap(), Some(2));
    }

    #[test]
    fn butterfly_window() {
        let b = poset("butterfly");
        assert!(!window_embeds(&b, 2, false).unwrap());
        assert!(window_embeds(&b, 3, false).unwrap());
    }

    #[test]
    fn witness_is_a_valid_copy() {
        let p = poset("K:2,1,2");
        let copy = find_window_copy(&p, 3, true).unwrap().unwrap();
        for a in 0..p.size() {
            for b in 0..p.size() {
                if a == b {
                    continue;
                }
                let included = copy[a].subset_of(copy[b]) && copy[a] != copy[b];
                assert_eq!(p.less(a, b), included, "pair ({a},{b})");
            }
        }
        let offs: Vec<i32> = copy.iter().map(|s| s.offset()).collect();
        let span = offs.iter().max().unwrap() - offs.iter().min().unwrap();
        assert!(span <= 2);
    }

    #[test]
    fn budget_guard() {
        let long = poset("chain:12");
        assert!(matches!(
            window_embeds(&long, 12, false),
            Err(Error::TooLarge { .. })
        ));
    }
}
