//! Exact extremal search at desk scale: largest free families, minimum
//! copy counts over fixed-size families, and exhaustive free-family
//! counting.

use num_bigint::BigUint;

use crate::embed::{count_copies, copies_through, creates_copy_with, is_p_free, max_antichain};
use crate::error::{Error, Result};
use crate::family::{level_family, SetFamily};
use crate::par;
use crate::poset::Poset;

pub const MAX_LA_GENERAL: u32 = 5;
pub const MAX_LA_TWO_CHAIN: u32 = 12;
pub const MAX_MIN_COPIES: u32 = 4;
pub const MAX_COUNT_FAMILIES: u32 = 4;

fn is_two_chain(p: &Poset) -> bool {
    p.size() == 2 && p.strict_pairs().len() == 1
}

/// Largest (induced) P-free family in 2^[n] with one witness. Two-element
/// chains route through the maximum-antichain matching; everything else
/// runs a branch-and-bound over codes in centered order.
pub fn largest_free_family(n: u32, p: &Poset, induced: bool) -> Result<(u64, SetFamily)> {
    if is_two_chain(p) {
        if n > MAX_LA_TWO_CHAIN {
            return Err(Error::TooLarge {
                what: "two-chain largest-family ground size",
                requested: n as u64,
                limit: MAX_LA_TWO_CHAIN as u64,
            });
        }
        let full = SetFamily::full(n)?;
        let width = max_antichain(&full) as u64;
        let witness = level_family(n, &[n / 2])?;
        debug_assert_eq!(width, witness.len() as u64);
        return Ok((width, witness));
    }
    if n > MAX_LA_GENERAL {
        return Err(Error::TooLarge {
            what: "largest-family ground size",
            requested: n as u64,
            limit: MAX_LA_GENERAL as u64,
        });
    }
    // Centered candidate order: middle-most levels first carry the most
    // Lubell mass, which makes the include-first dive hit strong
    // incumbents early.
    let mut candidates: Vec<u32> = (0..1u32 << n).collect();
    candidates.sort_by_key(|&c| {
        let s = c.count_ones();
        ((2 * s as i64 - n as i64).abs(), s, c)
    });
    let mut best = SetFamily::empty(n)?;
    let mut current = SetFamily::empty(n)?;
    dfs_largest(p, induced, &candidates, 0, &mut current, &mut best);
    Ok((best.len() as u64, best))
}

fn dfs_largest(
    p: &Poset,
    induced: bool,
    candidates: &[u32],
    idx: usize,
    current: &mut SetFamily,
    best: &mut SetFamily,
) {
    if current.len() + (candidates.len() - idx) <= best.len() {
        return;
    }
    if idx == candidates.len() {
        if current.len() > best.len() {
            *best = current.clone();
        }
        return;
    }
    let code = candidates[idx];
    current.insert(code);
    if !creates_copy_with(p, current, code, induced) {
        dfs_largest(p, induced, candidates, idx + 1, current, best);
    }
    current.remove(code);
    dfs_largest(p, induced, candidates, idx + 1, current, best);
}

/// k-subset bitmasks of an n-element ground in revolving-door order:
/// consecutive masks differ by exactly one swap.
pub fn revolving_door(n: u32, k: u32) -> Vec<u64> {
    if k == 0 {
        return vec![0];
    }
    if k == n {
        return vec![(1u64 << n) - 1];
    }
    let mut out = revolving_door(n - 1, k);
    let mut tail = revolving_door(n - 1, k - 1);
    tail.reverse();
    out.extend(tail.into_iter().map(|m| m | 1 << (n - 1)));
    out
}

/// Minimum number of (induced) copies of `p` over all families of exactly
/// `size` sets in 2^[n]. Walks the revolving-door order with incremental
/// copy updates; chunked so the walk parallelizes over disjoint ranges.
pub fn min_copies(n: u32, p: &Poset, size: u64, induced: bool) -> Result<BigUint> {
    if n > MAX_MIN_COPIES {
        return Err(Error::TooLarge {
            what: "minimum-copies ground size",
            requested: n as u64,
            limit: MAX_MIN_COPIES as u64,
        });
    }
    if size > 1 << n {
        return Err(Error::BadParam(format!(
            "family size {size} exceeds 2^{n}"
        )));
    }
    let masks = revolving_door(1 << n, size as u32);
    let family_of = |mask: u64| {
        let codes: Vec<u32> = (0..1u32 << n).filter(|&c| mask >> c & 1 == 1).collect();
        SetFamily::from_codes(n, &codes).unwrap()
    };
    let count_full = |f: &SetFamily| -> u128 {
        u128::try_from(count_copies(p, f, induced).copies).unwrap()
    };

    let chunk = masks.len().div_ceil(64).max(1);
    let chunks: Vec<&[u64]> = masks.chunks(chunk).collect();
    let min = par::map_vec(&chunks, |block| {
        let mut family = family_of(block[0]);
        let mut count = count_full(&family);
        let mut best = count;
        for pair in block.windows(2) {
            let gone = pair[0] & !pair[1];
            let added = pair[1] & !pair[0];
            debug_assert_eq!(gone.count_ones(), 1);
            debug_assert_eq!(added.count_ones(), 1);
            let out_code = gone.trailing_zeros();
            let in_code = added.trailing_zeros();
            count -= copies_through(p, &family, out_code, induced);
            family.remove(out_code);
            family.insert(in_code);
            count += copies_through(p, &family, in_code, induced);
            best = best.min(count);
        }
        best
    })
    .into_iter()
    .min()
    .unwrap();
    Ok(BigUint::from(min))
}

/// Number of (induced) P-free subfamilies of 2^[n]. Exhaustive over all
/// 2^(2^n) families for n <= 4; two special shapes extend to n = 5.
pub fn count_free_families(n: u32, p: &Poset, induced: bool) -> Result<BigUint> {
    if n <= MAX_COUNT_FAMILIES {
        let total: u64 = 1 << (1u64 << n);
        let count = par::map_reduce_range(
            0..total,
            || 0u64,
            |mask| {
                let codes: Vec<u32> = (0..1u32 << n).filter(|&c| mask >> c & 1 == 1).collect();
                let f = SetFamily::from_codes(n, &codes).unwrap();
                u64::from(is_p_free(p, &f, induced))
            },
            |a, b| a + b,
        );
        return Ok(BigUint::from(count));
    }
    if n == 5 && is_two_chain(p) {
        return Ok(count_antichain_families(n));
    }
    if n == 5 && !induced {
        if let Some(r) = as_fan(p) {
            return Ok(count_fan_free_families(n, r));
        }
    }
    Err(Error::TooLarge {
        what: "free-family counting ground size",
        requested: n as u64,
        limit: MAX_COUNT_FAMILIES as u64,
    })
}

/// Fan posets: one bottom below r incomparable tops.
fn as_fan(p: &Poset) -> Option<u32> {
    let k = p.size();
    if k < 2 {
        return None;
    }
    let bottoms: Vec<usize> = (0..k).filter(|&v| p.below(v) == 0).collect();
    if bottoms.len() != 1 {
        return None;
    }
    let b = bottoms[0];
    if p.above(b).count_ones() as usize != k - 1 {
        return None;
    }
    let tops_incomparable = (0..k)
        .filter(|&v| v != b)
        .all(|v| p.above(v) == 0 && p.below(v) == 1 << b);
    tops_incomparable.then_some(k as u32 - 1)
}

/// Antichain families counted by a top-down level transfer: the state is
/// the set of current-level codes lying below something already chosen.
fn count_antichain_families(n: u32) -> BigUint {
    use std::collections::HashMap;
    let levels: Vec<Vec<u32>> = (0..=n)
        .map(|s| (0..1u32 << n).filter(|c| c.count_ones() == s).collect())
        .collect();
    let mut states: HashMap<u64, BigUint> = HashMap::new();
    states.insert(0, BigUint::from(1u32));
    for l in (0..=n as usize).rev() {
        let codes = &levels[l];
        // shadow[i] = positions of the level below lying under codes[i].
        let shadow: Vec<u64> = codes
            .iter()
            .map(|&d| {
                if l == 0 {
                    return 0;
                }
                levels[l - 1]
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c & d == c)
                    .fold(0u64, |acc, (j, _)| acc | 1 << j)
            })
            .collect();
        let mut next: HashMap<u64, BigUint> = HashMap::new();
        for (blocked, ways) in states {
            let free_positions: Vec<usize> =
                (0..codes.len()).filter(|&i| blocked >> i & 1 == 0).collect();
            for t in 0..1u64 << free_positions.len() {
                let mut chosen_mask = blocked;
                for (bit, &pos) in free_positions.iter().enumerate() {
                    if t >> bit & 1 == 1 {
                        chosen_mask |= 1 << pos;
                    }
                }
                let mut new_blocked = 0u64;
                let mut bits = chosen_mask;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    new_blocked |= shadow[i];
                    bits &= bits - 1;
                }
                *next.entry(new_blocked).or_default() += &ways;
            }
        }
        states = next;
    }
    states.into_values().sum()
}

/// Non-induced fan-free counting via a depth-first walk over families.
/// Freeness is the degree condition "no member has r strict supersets in
/// the family". Codes are decided in descending order; supersets are
/// numerically larger, so a code's superset degree is final when it is
/// reached.
fn count_fan_free_families(n: u32, r: u32) -> BigUint {
    debug_assert!(r >= 1);
    let mut up_degree = vec![0u32; 1usize << n];
    let mut count = BigUint::from(0u32);
    fn rec(code: i64, r: u32, up_degree: &mut [u32], count: &mut BigUint) {
        if code < 0 {
            *count += BigUint::from(1u32);
            return;
        }
        let c = code as u32;
        rec(code - 1, r, up_degree, count);
        if up_degree[c as usize] < r {
            let mut bumped = Vec::new();
            crate::family::for_each_subset(c, |sub| {
                if sub != c {
                    up_degree[sub as usize] += 1;
                    bumped.push(sub);
                }
            });
            rec(code - 1, r, up_degree, count);
            for sub in bumped {
                up_degree[sub as usize] -= 1;
            }
        }
    }
    rec((1i64 << n) - 1, r, &mut up_degree, &mut count);
    count
}

/// Copies of `p` in the middle e(p)+1 levels of 2^[n].
pub fn middle_copy_count(n: u32, p: &Poset, induced: bool, e: u32) -> Result<BigUint> {
    let window = e + 1;
    if window > n + 1 {
        return Err(Error::TooLarge {
            what: "middle window height",
            requested: window as u64,
            limit: (n + 1) as u64,
        });
    }
    let f = crate::family::middle_levels(n, window)?;
    let work = binom_pow(f.len() as u64, p.size() as u64);
    const WORK_LIMIT: u64 = 200_000_000;
    if work > WORK_LIMIT {
        return Err(Error::TooLarge {
            what: "middle copy-count subfamily enumeration",
            requested: work,
            limit: WORK_LIMIT,
        });
    }
    Ok(count_copies(p, &f, induced).copies)
}

fn binom_pow(n: u64, k: u64) -> u64 {
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n.saturating_sub(i)) / (i + 1).max(1);
    }
    acc
}

/// Exhaustive scan oracle: the exact maximum free size over every
/// subfamily of 2^[n]; exponential in 2^n, used to cross-check the
/// branch-and-bound at n <= 4.
pub fn largest_free_by_scan(n: u32, p: &Poset, induced: bool) -> Result<u64> {
    if n > 4 {
        return Err(Error::TooLarge {
            what: "scan oracle ground size",
            requested: n as u64,
            limit: 4,
        });
    }
    let total: u64 = 1 << (1u64 << n);
    let best = par::map_reduce_range(
        0..total,
        || 0u64,
        |mask| {
            let codes: Vec<u32> = (0..1u32 << n).filter(|&c| mask >> c & 1 == 1).collect();
            let f = SetFamily::from_codes(n, &codes).unwrap();
            if is_p_free(p, &f, induced) {
                f.len() as u64
            } else {
                0
            }
        },
        u64::max,
    );
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::binomial;
    use crate::poset::NamedPoset;

    fn poset(text: &str) -> Poset {
        NamedPoset::parse(text).unwrap().build().unwrap()
    }

    #[test]
    fn revolving_door_is_minimal_change() {
        for (n, k) in [(5u32, 2u32), (6, 3), (16, 3)] {
            let seq = revolving_door(n, k);
            assert_eq!(seq.len() as u64, {
                let b = binomial(n as u64, k as u64);
                u64::try_from(b).unwrap()
            });
            for w in seq.windows(2) {
                assert_eq!((w[0] ^ w[1]).count_ones(), 2, "single swap");
                assert_eq!(w[0].count_ones(), k);
            }
            let mut sorted = seq.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), seq.len(), "all distinct");
        }
    }

    #[test]
    fn sperner_values() {
        for n in 1..=6u32 {
            let (size, witness) = largest_free_family(n, &poset("chain:2"), false).unwrap();
            assert_eq!(BigUint::from(size), binomial(n as u64, n as u64 / 2));
            assert!(is_p_free(&poset("chain:2"), &witness, false));
        }
    }

    #[test]
    fn erdos_two_middle_levels() {
        let (size, witness) = largest_free_family(4, &poset("chain:3"), false).unwrap();
        assert_eq!(size, 10);
        assert!(is_p_free(&poset("chain:3"), &witness, false));
    }

    #[test]
    fn dfs_matches_scan_oracle() {
        for text in ["vee:2", "diamond:2", "butterfly"] {
            let p = poset(text);
            for induced in [false, true] {
                let (size, witness) = largest_free_family(3, &p, induced).unwrap();
                let oracle = largest_free_by_scan(3, &p, induced).unwrap();
                assert_eq!(size, oracle, "{text} induced={induced}");
                assert!(is_p_free(&p, &witness, induced));
            }
        }
    }

    #[test]
    fn min_copies_examples() {
        // Forcing all four sets of 2^[2] leaves exactly its two maximal
        // chains as 3-chains.
        let m = min_copies(2, &poset("chain:3"), 4, false).unwrap();
        assert_eq!(m, BigUint::from(2u32));
        // At or below the extremal size the minimum is zero.
        let z = min_copies(3, &poset("chain:2"), 3, false).unwrap();
        assert_eq!(z, BigUint::from(0u32));
    }

    #[test]
    fn min_copies_matches_recount() {
        // Incremental walk agrees with from-scratch counting on every
        // 5-subset of 2^[2..3].
        let p = poset("chain:2");
        let masks = revolving_door(8, 5);
        let mut global = u128::MAX;
        for &mask in &masks {
            let codes: Vec<u32> = (0..8).filter(|&c| mask >> c & 1 == 1).collect();
            let f = SetFamily::from_codes(3, &codes).unwrap();
            let c = u128::try_from(count_copies(&p, &f, false).copies).unwrap();
            global = global.min(c);
        }
        assert_eq!(
            min_copies(3, &p, 5, false).unwrap(),
            BigUint::from(global)
        );
    }

    #[test]
    fn free_family_counts_small() {
        // Antichain families of 2^[2]: {}, four singletons, {{1},{2}}.
        let c = count_free_families(2, &poset("chain:2"), false).unwrap();
        assert_eq!(c, BigUint::from(6u32));
    }

    #[test]
    fn antichain_transfer_matches_scan() {
        for n in 1..=4u32 {
            let scan = count_free_families(n, &poset("chain:2"), false).unwrap();
            assert_eq!(count_antichain_families(n), scan, "n={n}");
        }
    }

    #[test]
    fn antichain_count_n5() {
        // Number of antichains in the 5-cube (Dedekind count).
        assert_eq!(count_antichain_families(5), BigUint::from(7581u32));
    }

    #[test]
    fn fan_free_counting_matches_scan() {
        for r in 2..=3u32 {
            let fan = NamedPoset::Vee(r as usize).build().unwrap();
            for n in 2..=3u32 {
                let scan = count_free_families(n, &fan, false).unwrap();
                assert_eq!(count_fan_free_families(n, r), scan, "vee:{r} n={n}");
            }
        }
    }

    #[test]
    fn fan_detection() {
        assert_eq!(as_fan(&poset("vee:3")), Some(3));
        assert_eq!(as_fan(&poset("chain:2")), Some(1));
        assert_eq!(as_fan(&poset("wedge:2")), None);
        assert_eq!(as_fan(&poset("diamond:2")), None);
    }

    #[test]
    fn middle_counts() {
        assert_eq!(
            middle_copy_count(2, &poset("chain:2"), false, 1).unwrap(),
            BigUint::from(2u32)
        );
        assert_eq!(
            middle_copy_count(3, &poset("chain:2"), false, 1).unwrap(),
            BigUint::from(6u32)
        );
    }

    #[test]
    fn guards_fire() {
        assert!(largest_free_family(6, &poset("vee:2"), false).is_err());
        assert!(min_copies(5, &poset("chain:2"), 3, false).is_err());
        assert!(count_free_families(5, &poset("diamond:2"), false).is_err());
    }
}
