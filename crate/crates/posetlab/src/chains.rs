//! Maximal-chain statistics: the pair count behind the Lubell identity and
//! the min-max partition of the n! maximal chains by the least and greatest
//! family member they meet.

use num_bigint::BigUint;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::arith::{binomial, factorial_u128};
use crate::embed::{max_antichain, max_antichain_of_codes};
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::par;
use crate::rng::Stream;

pub const MAX_EXHAUSTIVE_WALK: u32 = 10;

/// Number of pairs (G, C) with G a family member lying on the maximal
/// chain C; equals lubell(G) * n! as an exact identity.
pub fn chain_pair_count(g: &SetFamily) -> BigUint {
    let n = g.ground_n();
    let mut total: u128 = 0;
    for code in g.codes() {
        let k = code.count_ones();
        total += factorial_u128(k) * factorial_u128(n - k);
    }
    BigUint::from(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairStat {
    #[serde(rename = "A")]
    pub lower: u32,
    #[serde(rename = "C")]
    pub upper: u32,
    /// Family members strictly between the pair.
    pub b: u32,
    /// Largest antichain of the family inside the closed interval.
    pub a: u32,
    /// Chains whose least family member is `lower` and greatest `upper`
    /// (hit count in sampled mode).
    pub mass: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinMaxStats {
    pub ground_n: u32,
    pub pairs: Vec<PairStat>,
    pub empty_mass: String,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<u64>,
}

impl MinMaxStats {
    pub fn total_mass(&self) -> BigUint {
        let mut acc: BigUint = self.empty_mass.parse().unwrap();
        for p in &self.pairs {
            acc += p.mass.parse::<BigUint>().unwrap();
        }
        acc
    }

    pub fn mass_of(&self, lower: u32, upper: u32) -> BigUint {
        self.pairs
            .iter()
            .find(|p| p.lower == lower && p.upper == upper)
            .map(|p| p.mass.parse().unwrap())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy)]
pub enum WalkMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

/// A permutation-prefix walk over maximal chains: exhaustively for
/// n <= 10, by uniform sampling above that.
pub fn minmax_stats(f: &SetFamily, mode: WalkMode) -> Result<MinMaxStats> {
    let n = f.ground_n();
    match mode {
        WalkMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_WALK {
                return Err(Error::TooLarge {
                    what: "exhaustive chain walk ground size",
                    requested: n as u64,
                    limit: MAX_EXHAUSTIVE_WALK as u64,
                });
            }
            let per_start = par::map_vec(&(0..n).collect::<Vec<_>>(), |&first| {
                let mut masses = BTreeMap::new();
                let mut empty: u128 = 0;
                let root_first = f.contains(0).then_some(0u32);
                let code = 1u32 << first;
                let (fst, lst) = step_hits(f, code, root_first, root_first);
                walk(f, code, 1, fst, lst, &mut masses, &mut empty);
                (masses, empty)
            });
            let mut masses: BTreeMap<(u32, u32), u128> = BTreeMap::new();
            let mut empty: u128 = 0;
            for (m, e) in per_start {
                empty += e;
                for (k, v) in m {
                    *masses.entry(k).or_insert(0) += v;
                }
            }
            Ok(finish(f, masses, empty, true, None))
        }
        WalkMode::Sampled { samples, seed } => {
            let mut masses: BTreeMap<(u32, u32), u128> = BTreeMap::new();
            let mut empty: u128 = 0;
            let mut perm: Vec<u32> = (0..n).collect();
            let mut stream = Stream::new(seed);
            for _ in 0..samples {
                stream.shuffle(&mut perm);
                let mut code = 0u32;
                let (mut fst, mut lst) = step_hits(f, code, None, None);
                for &e in &perm {
                    code |= 1 << e;
                    let upd = step_hits(f, code, fst, lst);
                    fst = upd.0;
                    lst = upd.1;
                }
                match (fst, lst) {
                    (Some(a), Some(c)) => *masses.entry((a, c)).or_insert(0) += 1,
                    _ => empty += 1,
                }
            }
            Ok(finish(f, masses, empty, false, Some(samples)))
        }
    }
}

fn step_hits(
    f: &SetFamily,
    code: u32,
    fst: Option<u32>,
    lst: Option<u32>,
) -> (Option<u32>, Option<u32>) {
    if f.contains(code) {
        (fst.or(Some(code)), Some(code))
    } else {
        (fst, lst)
    }
}

fn walk(
    f: &SetFamily,
    code: u32,
    depth: u32,
    fst: Option<u32>,
    lst: Option<u32>,
    masses: &mut BTreeMap<(u32, u32), u128>,
    empty: &mut u128,
) {
    let n = f.ground_n();
    if depth == n {
        match (fst, lst) {
            (Some(a), Some(c)) => *masses.entry((a, c)).or_insert(0) += 1,
            _ => *empty += 1,
        }
        return;
    }
    for e in 0..n {
        if code >> e & 1 == 0 {
            let next = code | 1 << e;
            let (nf, nl) = step_hits(f, next, fst, lst);
            walk(f, next, depth + 1, nf, nl, masses, empty);
        }
    }
}

fn finish(
    f: &SetFamily,
    masses: BTreeMap<(u32, u32), u128>,
    empty: u128,
    exact: bool,
    sample_size: Option<u64>,
) -> MinMaxStats {
    let pairs = masses
        .into_iter()
        .map(|((lower, upper), mass)| PairStat {
            lower,
            upper,
            b: between_count(f, lower, upper),
            a: interval_antichain(f, lower, upper),
            mass: mass.to_string(),
        })
        .collect();
    MinMaxStats {
        ground_n: f.ground_n(),
        pairs,
        empty_mass: empty.to_string(),
        exact,
        sample_size,
    }
}

/// Family members strictly between `lower` and `upper`.
pub fn between_count(f: &SetFamily, lower: u32, upper: u32) -> u32 {
    debug_assert_eq!(lower & upper, lower);
    let diff = upper & !lower;
    let mut count = 0u32;
    if (1u64 << diff.count_ones()) <= f.len() as u64 {
        let mut t = diff;
        loop {
            let mid = lower | t;
            if mid != lower && mid != upper && f.contains(mid) {
                count += 1;
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & diff;
        }
    } else {
        for code in f.codes() {
            if code != lower && code != upper && code & lower == lower && code & upper == code {
                count += 1;
            }
        }
    }
    count
}

fn interval_antichain(f: &SetFamily, lower: u32, upper: u32) -> u32 {
    let mut codes = Vec::new();
    for code in f.codes() {
        if code & lower == lower && code & upper == code {
            codes.push(code);
        }
    }
    max_antichain_of_codes(&codes) as u32
}

/// Lower bound on generalized diamonds: sum over comparable pairs of
/// binom(between, s). Every diamond copy has a unique least and greatest
/// set, so this is in fact the exact non-induced count.
pub fn diamond_pair_bound(f: &SetFamily, s: u32) -> BigUint {
    debug_assert!(s >= 2);
    let codes = f.codes();
    let mut total = BigUint::from(0u32);
    for &a in &codes {
        for c in f.strict_up_codes(a) {
            let b = between_count(f, a, c);
            if b >= s {
                total += binomial(b as u64, s as u64);
            }
        }
    }
    total
}

/// Passes when the family's largest antichain is within `cap`; reports the
/// chain pair count alongside.
pub fn antichain_cap_check(g: &SetFamily, cap: u32) -> (bool, BigUint) {
    (max_antichain(g) as u32 <= cap, chain_pair_count(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorial;
    use crate::family::middle_levels;

    #[test]
    fn pair_count_examples() {
        let just_empty = SetFamily::from_codes(2, &[0]).unwrap();
        assert_eq!(chain_pair_count(&just_empty), BigUint::from(2u32));
        let full = SetFamily::full(2).unwrap();
        assert_eq!(chain_pair_count(&full), BigUint::from(6u32));
    }

    #[test]
    fn pair_count_is_lubell_times_factorial() {
        for codes in [vec![0u32, 7], vec![1, 3, 7], vec![2, 5, 6]] {
            let f = SetFamily::from_codes(3, &codes).unwrap();
            let lhs = chain_pair_count(&f);
            let lam = f.lubell();
            let expect = lam * num_rational::BigRational::from_integer(factorial(3).into());
            assert!(expect.is_integer());
            assert_eq!(lhs, expect.to_integer().try_into().unwrap());
        }
    }

    #[test]
    fn minmax_trivial_families() {
        let f = SetFamily::from_codes(3, &[0, 0b111]).unwrap();
        let stats = minmax_stats(&f, WalkMode::Exhaustive).unwrap();
        assert_eq!(stats.pairs.len(), 1);
        assert_eq!(stats.pairs[0].b, 0);
        assert_eq!(stats.mass_of(0, 0b111), factorial(3));
        assert_eq!(stats.empty_mass, "0");

        let full = SetFamily::full(2).unwrap();
        let stats = minmax_stats(&full, WalkMode::Exhaustive).unwrap();
        assert_eq!(stats.mass_of(0, 0b11), BigUint::from(2u32));
        let pair = stats.pairs.iter().find(|p| p.lower == 0 && p.upper == 3).unwrap();
        assert_eq!(pair.b, 2);
    }

    #[test]
    fn partition_identity_mid_levels() {
        let f = middle_levels(6, 3).unwrap();
        let stats = minmax_stats(&f, WalkMode::Exhaustive).unwrap();
        assert_eq!(stats.total_mass(), factorial(6));
    }

    #[test]
    fn mass_upper_bound_per_pair() {
        let f = middle_levels(5, 2).unwrap();
        let stats = minmax_stats(&f, WalkMode::Exhaustive).unwrap();
        for p in &stats.pairs {
            let la = p.lower.count_ones() as u64;
            let lc = p.upper.count_ones() as u64;
            let cap = factorial(la) * factorial(lc - la) * factorial(5 - lc);
            assert!(p.mass.parse::<BigUint>().unwrap() <= cap);
        }
    }

    #[test]
    fn sampled_mode_flags_estimates() {
        let f = middle_levels(12, 2).unwrap();
        let stats = minmax_stats(
            &f,
            WalkMode::Sampled {
                samples: 200,
                seed: 9,
            },
        )
        .unwrap();
        assert!(!stats.exact);
        assert_eq!(stats.sample_size, Some(200));
        assert_eq!(stats.total_mass(), BigUint::from(200u32));
        assert!(minmax_stats(&f, WalkMode::Exhaustive).is_err());
    }

    #[test]
    fn diamond_bound_examples() {
        let full2 = SetFamily::full(2).unwrap();
        assert_eq!(diamond_pair_bound(&full2, 2), BigUint::from(1u32));
        let two_level = middle_levels(4, 2).unwrap();
        assert_eq!(diamond_pair_bound(&two_level, 2), BigUint::from(0u32));
    }

    #[test]
    fn cap_check_examples() {
        let chain = SetFamily::from_codes(4, &[0b0001, 0b0011, 0b0111, 0b1111]).unwrap();
        let (ok, pairs) = antichain_cap_check(&chain, 3);
        assert!(ok);
        assert!(pairs <= BigUint::from(4u32) * factorial(4));

        let full3 = SetFamily::full(3).unwrap();
        let (ok, pairs) = antichain_cap_check(&full3, 3);
        assert!(ok);
        assert_eq!(pairs, BigUint::from(24u32));

        let wide = middle_levels(4, 2).unwrap();
        assert!(!antichain_cap_check(&wide, 3).0);
    }

    #[test]
    fn interval_antichain_bounds() {
        let f = SetFamily::full(3).unwrap();
        let stats = minmax_stats(&f, WalkMode::Exhaustive).unwrap();
        for p in &stats.pairs {
            assert!(p.a <= p.b + 2);
            assert!(p.a >= 1);
        }
    }
}
