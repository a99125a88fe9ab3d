//! Families of subsets of [n] stored as a membership bitmap over the 2^n
//! subset codes (bit i of a code = element i+1 present). Ground sets are
//! capped at n = 20 so every exhaustive oracle in the suite stays desk-scale.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::binomial;
use crate::error::{Error, Result};

pub const MAX_GROUND: u32 = 20;

/// Iterates all supersets of `code` within [n], including `code` itself.
pub fn for_each_superset(code: u32, n: u32, mut f: impl FnMut(u32)) {
    let free = !code & ((1u32 << n) - 1);
    let mut t = free;
    loop {
        f(code | t);
        if t == 0 {
            break;
        }
        t = (t - 1) & free;
    }
}

/// Iterates all subsets of `code`, including `code` itself.
pub fn for_each_subset(code: u32, mut f: impl FnMut(u32)) {
    let mut t = code;
    loop {
        f(t);
        if t == 0 {
            break;
        }
        t = (t - 1) & code;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetFamily {
    n: u32,
    blocks: Vec<u64>,
    len: usize,
}

impl SetFamily {
    pub fn empty(n: u32) -> Result<Self> {
        if n == 0 || n > MAX_GROUND {
            return Err(Error::BadParam(format!(
                "ground set size must be in 1..={MAX_GROUND}, got {n}"
            )));
        }
        let words = 1usize.max((1usize << n) / 64);
        Ok(SetFamily {
            n,
            blocks: vec![0; words],
            len: 0,
        })
    }

    pub fn full(n: u32) -> Result<Self> {
        let mut f = SetFamily::empty(n)?;
        if n < 6 {
            f.blocks[0] = (1u64 << (1 << n)) - 1;
        } else {
            f.blocks.iter_mut().for_each(|b| *b = u64::MAX);
        }
        f.len = 1usize << n;
        Ok(f)
    }

    pub fn from_codes(n: u32, codes: &[u32]) -> Result<Self> {
        let mut f = SetFamily::empty(n)?;
        for &c in codes {
            if c >= 1u32 << n {
                return Err(Error::BadParam(format!("code {c} out of range for n={n}")));
            }
            f.insert(c);
        }
        Ok(f)
    }

    pub fn ground_n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn universe(&self) -> u32 {
        (1u32 << self.n) - 1
    }

    pub fn contains(&self, code: u32) -> bool {
        self.blocks[(code / 64) as usize] >> (code % 64) & 1 == 1
    }

    pub fn insert(&mut self, code: u32) -> bool {
        let (w, b) = ((code / 64) as usize, code % 64);
        let fresh = self.blocks[w] >> b & 1 == 0;
        if fresh {
            self.blocks[w] |= 1 << b;
            self.len += 1;
        }
        fresh
    }

    pub fn remove(&mut self, code: u32) -> bool {
        let (w, b) = ((code / 64) as usize, code % 64);
        let present = self.blocks[w] >> b & 1 == 1;
        if present {
            self.blocks[w] &= !(1 << b);
            self.len -= 1;
        }
        present
    }

    /// Member codes in ascending order.
    pub fn codes(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len);
        for (w, &block) in self.blocks.iter().enumerate() {
            let mut bits = block;
            while bits != 0 {
                let b = bits.trailing_zeros();
                out.push(w as u32 * 64 + b);
                bits &= bits - 1;
            }
        }
        out
    }

    /// Complements every member set within the ground set.
    pub fn complement_members(&self) -> SetFamily {
        let mut out = SetFamily::empty(self.n).unwrap();
        for code in self.codes() {
            out.insert(self.universe() ^ code);
        }
        out
    }

    /// Members of this family containing `point` (including `point` itself
    /// when present).
    pub fn up_set(&self, point: u32) -> SetFamily {
        let mut out = SetFamily::empty(self.n).unwrap();
        // Cost of walking the super-cube vs scanning the member list.
        let walk = 1u64 << (self.n - (point.count_ones()).min(self.n));
        if walk <= self.len as u64 * 4 {
            for_each_superset(point, self.n, |sup| {
                if self.contains(sup) {
                    out.insert(sup);
                }
            });
        } else {
            for code in self.codes() {
                if code & point == point {
                    out.insert(code);
                }
            }
        }
        out
    }

    /// Strict supersets of `point` present in the family.
    pub fn strict_up_codes(&self, point: u32) -> Vec<u32> {
        let mut up = self.up_set(point);
        up.remove(point);
        up.codes()
    }

    /// Strict subsets of `point` present in the family.
    pub fn strict_down_codes(&self, point: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let walk = 1u64 << point.count_ones();
        if walk <= self.len as u64 * 4 {
            for_each_subset(point, |sub| {
                if sub != point && self.contains(sub) {
                    out.push(sub);
                }
            });
            out.sort_unstable();
        } else {
            for code in self.codes() {
                if code != point && code & point == code {
                    out.push(code);
                }
            }
        }
        out
    }

    /// All strict-inclusion pairs (a, b) with a strictly inside b, in
    /// ascending (a, b) order.
    pub fn comparability_edges(&self) -> Vec<(u32, u32)> {
        let codes = self.codes();
        let mut edges = Vec::new();
        for &a in &codes {
            for sup in self.strict_up_codes(a) {
                edges.push((a, sup));
            }
        }
        edges.sort_unstable();
        edges
    }

    /// Exact Lubell mass: sum over members of 1/binom(n, |member|).
    pub fn lubell(&self) -> BigRational {
        let mut per_level = vec![0u64; self.n as usize + 1];
        for code in self.codes() {
            per_level[code.count_ones() as usize] += 1;
        }
        let mut acc = BigRational::zero();
        for (size, &count) in per_level.iter().enumerate() {
            if count > 0 {
                acc += BigRational::new(
                    BigUint::from(count).into(),
                    binomial(self.n as u64, size as u64).into(),
                );
            }
        }
        acc
    }

    /// Number of nested k-tuples F_1 strictly inside ... strictly inside F_k.
    pub fn nested_tuples(&self, k: u32) -> BigUint {
        if k == 0 {
            return BigUint::zero();
        }
        let mut codes = self.codes();
        codes.sort_by_key(|c| (c.count_ones(), *c));
        let index: std::collections::HashMap<u32, usize> =
            codes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        // dp[v] = number of j-chains ending at v, rolled over j.
        let mut dp: Vec<u128> = vec![1; codes.len()];
        let mut total: u128 = dp.len() as u128;
        for _ in 2..=k {
            let mut next: Vec<u128> = vec![0; codes.len()];
            for (vi, &v) in codes.iter().enumerate() {
                let mut acc: u128 = 0;
                if (1u64 << v.count_ones()) <= codes.len() as u64 * 4 {
                    for_each_subset(v, |sub| {
                        if sub != v {
                            if let Some(&ui) = index.get(&sub) {
                                acc += dp[ui];
                            }
                        }
                    });
                } else {
                    for (ui, &u) in codes.iter().enumerate() {
                        if u != v && u & v == u {
                            acc += dp[ui];
                        }
                    }
                }
                next[vi] = acc;
            }
            dp = next;
            total = dp.iter().sum();
        }
        if k == 1 {
            total = self.len as u128;
        }
        BigUint::from(total)
    }
}

/// All subsets whose size lies in `levels`.
pub fn level_family(n: u32, levels: &[u32]) -> Result<SetFamily> {
    let mut f = SetFamily::empty(n)?;
    for &l in levels {
        if l > n {
            return Err(Error::BadParam(format!("level {l} out of range for n={n}")));
        }
    }
    let mut wanted = [false; MAX_GROUND as usize + 1];
    for &l in levels {
        wanted[l as usize] = true;
    }
    for code in 0..1u32 << n {
        if wanted[code.count_ones() as usize] {
            f.insert(code);
        }
    }
    Ok(f)
}

/// The m consecutive levels floor((n-m)/2)+1 ..= floor((n-m)/2)+m.
pub fn middle_levels(n: u32, m: u32) -> Result<SetFamily> {
    if m == 0 || m > n + 1 {
        return Err(Error::BadParam(format!(
            "window height {m} out of range for n={n}"
        )));
    }
    let (lo, hi) = middle_window(n, m);
    let levels: Vec<u32> = (lo..=hi).collect();
    level_family(n, &levels)
}

/// Level range of [`middle_levels`], exposed for window bookkeeping.
/// floor((n-m)/2) needs signed arithmetic once m = n + 1.
pub fn middle_window(n: u32, m: u32) -> (u32, u32) {
    let lo = ((n as i64 - m as i64).div_euclid(2) + 1).max(0) as u32;
    (lo, lo + m - 1)
}

/// The m sets closest to size n/2: ordered by |2|F| - n|, ties between the
/// two equidistant levels broken toward the lower one, ties within a level
/// by ascending code.
pub fn centered_family(n: u32, m: u64) -> Result<SetFamily> {
    if m > 1u64 << n {
        return Err(Error::BadParam(format!(
            "requested {m} sets from a lattice of 2^{n}"
        )));
    }
    let mut level_order: Vec<u32> = (0..=n).collect();
    level_order.sort_by_key(|&s| ((2 * s as i64 - n as i64).abs(), s));
    let mut f = SetFamily::empty(n)?;
    let mut left = m;
    'outer: for s in level_order {
        // Gosper's hack walks the level in ascending code order.
        let mut code: u64 = (1u64 << s) - 1;
        let limit = 1u64 << n;
        while code < limit {
            if left == 0 {
                break 'outer;
            }
            f.insert(code as u32);
            left -= 1;
            if code == 0 {
                break;
            }
            let c = code & code.wrapping_neg();
            let r = code + c;
            code = (((r ^ code) >> 2) / c) | r;
        }
        if left == 0 {
            break;
        }
    }
    Ok(f)
}

/// JSON schema: {"n": n, "sets": [[1,3],[2],...]} with 1-based elements,
/// or {"n": n, "codes": [5,2,...]}.
#[derive(Serialize, Deserialize)]
struct FamilyJson {
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    sets: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    codes: Option<Vec<u32>>,
}

impl Serialize for SetFamily {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyJson {
            n: self.n,
            sets: None,
            codes: Some(self.codes()),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SetFamily {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = FamilyJson::deserialize(de)?;
        let build = || -> Result<SetFamily> {
            match (raw.codes, raw.sets) {
                (Some(codes), _) => SetFamily::from_codes(raw.n, &codes),
                (None, Some(sets)) => {
                    let mut codes = Vec::with_capacity(sets.len());
                    for set in sets {
                        let mut code = 0u32;
                        for e in set {
                            if e == 0 || e > raw.n {
                                return Err(Error::BadParam(format!(
                                    "element {e} out of range for n={}",
                                    raw.n
                                )));
                            }
                            code |= 1 << (e - 1);
                        }
                        codes.push(code);
                    }
                    SetFamily::from_codes(raw.n, &codes)
                }
                (None, None) => SetFamily::empty(raw.n),
            }
        };
        build().map_err(serde::de::Error::custom)
    }
}

impl SetFamily {
    /// Binary layout: one byte n, then ceil(2^n/8) bitmap bytes in
    /// little-endian bit order by subset code.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n_codes = 1usize << self.n;
        let mut out = vec![self.n as u8];
        out.resize(1 + n_codes.div_ceil(8), 0);
        for code in self.codes() {
            out[1 + (code / 8) as usize] |= 1 << (code % 8);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let n = *bytes.first().ok_or_else(|| Error::BadParam("empty family blob".into()))? as u32;
        let mut f = SetFamily::empty(n)?;
        let expected = 1 + (1usize << n).div_ceil(8);
        if bytes.len() != expected {
            return Err(Error::BadParam(format!(
                "family blob for n={n} must be {expected} bytes, got {}",
                bytes.len()
            )));
        }
        for code in 0..1u32 << n {
            if bytes[1 + (code / 8) as usize] >> (code % 8) & 1 == 1 {
                f.insert(code);
            }
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn level_family_sizes() {
        assert_eq!(level_family(4, &[2]).unwrap().len(), 6);
        assert_eq!(level_family(3, &[1, 2]).unwrap().len(), 6);
        assert_eq!(level_family(2, &[]).unwrap().len(), 0);
        assert!(level_family(3, &[4]).is_err());
    }

    #[test]
    fn middle_levels_follow_erdos_window() {
        assert_eq!(middle_levels(4, 1).unwrap().len(), 6);
        let f32 = middle_levels(3, 2).unwrap();
        assert_eq!(f32.len(), 6);
        assert!(f32.codes().iter().all(|c| (1..=2).contains(&c.count_ones())));
        assert_eq!(middle_levels(4, 2).unwrap().len(), 10);
        assert_eq!(middle_window(4, 2), (2, 3));
        assert!(middle_levels(4, 6).is_err());
    }

    #[test]
    fn centered_examples() {
        let f = centered_family(4, 6).unwrap();
        assert!(f.codes().iter().all(|c| c.count_ones() == 2));

        let g = centered_family(4, 7).unwrap();
        let extra: Vec<u32> = g.codes().into_iter().filter(|c| c.count_ones() != 2).collect();
        assert_eq!(extra, vec![1], "7th set is the code-smallest singleton");

        assert_eq!(centered_family(2, 4).unwrap(), SetFamily::full(2).unwrap());
        assert!(centered_family(3, 9).is_err());
    }

    #[test]
    fn centered_is_distance_minimal() {
        // No swap of a chosen set for an unchosen one can lower the
        // total distance from the middle.
        for m in 0..=16u64 {
            let f = centered_family(4, m).unwrap();
            let dist = |c: u32| (2 * c.count_ones() as i64 - 4).abs();
            let chosen: Vec<i64> = f.codes().iter().map(|&c| dist(c)).collect();
            let worst_in = chosen.iter().max().copied().unwrap_or(i64::MIN);
            let best_out = (0..16u32)
                .filter(|c| !f.contains(*c))
                .map(dist)
                .min()
                .unwrap_or(i64::MAX);
            assert!(worst_in <= best_out, "m={m}");
        }
    }

    #[test]
    fn lubell_examples() {
        for n in 1..=8 {
            let f = level_family(n, &[n / 2]).unwrap();
            assert!(f.lubell().is_one(), "middle level of n={n}");
        }
        let f = SetFamily::from_codes(3, &[0, 0b111]).unwrap();
        assert_eq!(f.lubell(), BigRational::from_integer(2.into()));
        let g = SetFamily::from_codes(3, &[0b001, 0b011]).unwrap();
        assert_eq!(g.lubell(), BigRational::new(2.into(), 3.into()));
    }

    #[test]
    fn comparability_edges_examples() {
        assert_eq!(SetFamily::full(2).unwrap().comparability_edges().len(), 5);
        assert_eq!(level_family(4, &[2]).unwrap().comparability_edges().len(), 0);
        let f = SetFamily::from_codes(2, &[0, 0b01, 0b11]).unwrap();
        assert_eq!(f.comparability_edges().len(), 3);
    }

    #[test]
    fn comparability_is_transitively_closed() {
        let f = middle_levels(4, 3).unwrap();
        let edges = f.comparability_edges();
        let has = |a: u32, b: u32| edges.binary_search(&(a, b)).is_ok();
        for &(a, b) in &edges {
            for &(b2, c) in &edges {
                if b == b2 {
                    assert!(has(a, c));
                }
            }
        }
    }

    #[test]
    fn nested_tuple_counts() {
        let full2 = SetFamily::full(2).unwrap();
        assert_eq!(full2.nested_tuples(2), BigUint::from(5u32));
        assert_eq!(full2.nested_tuples(3), BigUint::from(2u32));
        let antichain = level_family(6, &[3]).unwrap();
        assert_eq!(antichain.nested_tuples(2), BigUint::zero());
        assert_eq!(antichain.nested_tuples(1), BigUint::from(antichain.len()));
    }

    #[test]
    fn binary_round_trip() {
        let f = middle_levels(5, 2).unwrap();
        let blob = f.to_bytes();
        assert_eq!(SetFamily::from_bytes(&blob).unwrap(), f);
        assert!(SetFamily::from_bytes(&[]).is_err());
        assert!(SetFamily::from_bytes(&[3, 0, 0]).is_err());
    }

    #[test]
    fn json_forms() {
        let f: SetFamily = serde_json::from_str(r#"{"n":3,"sets":[[1,3],[2],[]]}"#).unwrap();
        assert_eq!(f.codes(), vec![0, 0b010, 0b101]);
        let g: SetFamily = serde_json::from_str(r#"{"n":3,"codes":[5,2,0]}"#).unwrap();
        assert_eq!(f, g);
        let text = serde_json::to_string(&f).unwrap();
        let back: SetFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn up_set_walks() {
        let f = SetFamily::full(2).unwrap();
        assert_eq!(f.up_set(0b01).codes(), vec![0b01, 0b11]);
        assert_eq!(middle_levels(4, 1).unwrap().up_set(0).len(), 6);
        let empty = SetFamily::empty(4).unwrap();
        assert!(empty.up_set(0).is_empty());
    }
}
