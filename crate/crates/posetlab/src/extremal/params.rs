//! The level-freeness and span parameters of a poset, and the density
//! exponent over its connected subposets.

use num_rational::BigRational;
use serde::Serialize;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::extremal::window::{max_span_in_window, window_embeds};
use crate::poset::Poset;

/// Largest m such that every m consecutive levels of a large Boolean
/// lattice avoid (induced) copies of `p`. Disconnected posets reduce to
/// the worst component: a window misses the whole poset exactly when it
/// misses some component, since components embed on disjoint fresh
/// coordinates.
pub fn max_free_levels(p: &Poset, induced: bool) -> Result<u32> {
    let mut best = 0u32;
    for mask in p.components() {
        let comp = if mask.count_ones() as usize == p.size() {
            p.clone()
        } else {
            p.restrict(mask)
        };
        let mut m = 1u32;
        let free = loop {
            if window_embeds(&comp, m, induced)? {
                break m - 1;
            }
            m += 1;
            // Down-set images embed any poset within |P| levels.
            debug_assert!(m <= comp.size() as u32 + 1);
        };
        best = best.max(free);
    }
    Ok(best)
}

/// Largest union-minus-intersection size over (induced) copies inside a
/// window one level taller than the free maximum.
pub fn max_span(p: &Poset, induced: bool) -> Result<u32> {
    if !p.is_connected() {
        return Err(Error::DisconnectedPoset);
    }
    if p.size() == 1 {
        // Convention: a single element has span 0.
        return Ok(0);
    }
    let e = max_free_levels(p, induced)?;
    let span = max_span_in_window(p, e + 1, induced)?;
    Ok(span.expect("a poset embeds in e+1 consecutive levels"))
}

#[derive(Debug, Clone, Serialize)]
pub struct PosetParams {
    pub e: u32,
    pub e_star: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_star: Option<u32>,
}

impl PosetParams {
    pub fn compute(p: &Poset) -> Result<PosetParams> {
        let e = max_free_levels(p, false)?;
        let e_star = max_free_levels(p, true)?;
        let (x, x_star) = if p.is_connected() && p.size() >= 2 {
            (Some(max_span(p, false)?), Some(max_span(p, true)?))
        } else {
            (None, None)
        };
        Ok(PosetParams { e, e_star, x, x_star })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubposetMode {
    /// All posets admitting a non-induced copy in P.
    Weak,
    /// Restrictions of P to element subsets.
    Induced,
}

const MAX_DENSITY_SIZE: usize = 8;
const MAX_WEAK_SIZE: usize = 6;

/// min over connected subposets P' with the same level-freeness of
/// span(P') / (|P'| - 1); the conjectured random-threshold exponent.
pub fn density_exponent(p: &Poset, induced: bool, mode: SubposetMode) -> Result<BigRational> {
    let cap = match mode {
        SubposetMode::Weak => MAX_WEAK_SIZE,
        SubposetMode::Induced => MAX_DENSITY_SIZE,
    };
    if p.size() > cap {
        return Err(Error::TooLarge {
            what: "density exponent poset size",
            requested: p.size() as u64,
            limit: cap as u64,
        });
    }
    let target_e = max_free_levels(p, induced)?;
    let mut best: Option<BigRational> = None;
    for q in connected_subposets(p, mode) {
        if q.size() < 2 {
            continue;
        }
        if max_free_levels(&q, induced)? != target_e {
            continue;
        }
        let x = max_span(&q, induced)?;
        let ratio = BigRational::new((x as i64).into(), (q.size() as i64 - 1).into());
        if best.as_ref().map_or(true, |b| &ratio < b) {
            best = Some(ratio);
        }
    }
    best.ok_or_else(|| {
        Error::BadParam("density exponent needs a connected subposet on >= 2 elements with matching level-freeness".into())
    })
}

/// Connected subposets up to isomorphism. Weak mode closes every
/// subrelation of every restriction; induced mode takes restrictions only.
fn connected_subposets(p: &Poset, mode: SubposetMode) -> Vec<Poset> {
    let mut seen: HashSet<(usize, u64)> = HashSet::new();
    let mut out = Vec::new();
    let mut push = |q: Poset| {
        if q.is_connected() {
            let key = (q.size(), canonical_relation_mask(&q));
            if seen.insert(key) {
                out.push(q);
            }
        }
    };
    for subset in 1u64..1 << p.size() {
        let restricted = p.restrict(subset);
        match mode {
            SubposetMode::Induced => push(restricted),
            SubposetMode::Weak => {
                let pairs = restricted.strict_pairs();
                // Every transitively closed subrelation is the closure of
                // some pair subset, and closures stay inside the order.
                for choice in 0u64..1 << pairs.len() {
                    let chosen: Vec<(usize, usize)> = pairs
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| choice >> i & 1 == 1)
                        .map(|(_, &pr)| pr)
                        .collect();
                    let q = Poset::from_relations(restricted.size(), &chosen)
                        .expect("subrelation of a strict order closes to a poset");
                    push(q);
                }
            }
        }
    }
    out
}

/// Minimum relation bitmask over all relabelings; poset sizes here are
/// at most 8, so the permutation sweep is cheap.
fn canonical_relation_mask(p: &Poset) -> u64 {
    let k = p.size();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = u64::MAX;
    permute(&mut perm, 0, &mut |perm| {
        let mut mask = 0u64;
        for a in 0..k {
            for b in 0..k {
                if p.less(a, b) {
                    mask |= 1 << (perm[a] * k + perm[b]);
                }
            }
        }
        best = best.min(mask);
    });
    best
}

fn permute(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}
