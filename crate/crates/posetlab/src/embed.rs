//! Copy detection and counting: backtracking embeddings of a poset into a
//! set family, maximum antichains through minimum chain covers, up-set
//! weights, and the bottom/top decomposition used for K_{s,1,t}.

use num_bigint::BigUint;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::poset::Poset;

/// One copy of a poset in a family: the witnessing bijection plus the
/// intersection and union of the subfamily.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyRecord {
    /// assignment[e] = subset code carrying poset element e.
    pub assignment: Vec<u32>,
    pub bottom: u32,
    pub top: u32,
}

impl CopyRecord {
    fn from_assignment(assignment: Vec<u32>, universe: u32) -> Self {
        let bottom = assignment.iter().fold(universe, |acc, &c| acc & c);
        let top = assignment.iter().fold(0, |acc, &c| acc | c);
        CopyRecord {
            assignment,
            bottom,
            top,
        }
    }

    pub fn subfamily(&self) -> Vec<u32> {
        let mut v = self.assignment.clone();
        v.sort_unstable();
        v
    }

    pub fn span(&self) -> u32 {
        (self.top & !self.bottom).count_ones()
    }
}

impl Serialize for CopyRecord {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Json {
            assignment: BTreeMap<String, u32>,
            #[serde(rename = "A")]
            a: u32,
            #[serde(rename = "B")]
            b: u32,
        }
        let assignment = self
            .assignment
            .iter()
            .enumerate()
            .map(|(i, &c)| (i.to_string(), c))
            .collect();
        Json {
            assignment,
            a: self.bottom,
            b: self.top,
        }
        .serialize(ser)
    }
}

struct EmbedSearch<'a> {
    p: &'a Poset,
    f: &'a SetFamily,
    induced: bool,
    order: Vec<usize>,
    /// lowers[d] / uppers[d] / incomp[d]: indices < d in `order` holding
    /// elements below / above / incomparable to order[d].
    lowers: Vec<Vec<usize>>,
    uppers: Vec<Vec<usize>>,
    incomp: Vec<Vec<usize>>,
    images: Vec<u32>,
    /// Forces one element onto a fixed code.
    pin: Option<(usize, u32)>,
}

impl<'a> EmbedSearch<'a> {
    fn new(p: &'a Poset, f: &'a SetFamily, induced: bool) -> Self {
        let order = p.linear_extension();
        let k = p.size();
        let mut lowers = vec![Vec::new(); k];
        let mut uppers = vec![Vec::new(); k];
        let mut incomp = vec![Vec::new(); k];
        for d in 0..k {
            for e in 0..d {
                if p.less(order[e], order[d]) {
                    lowers[d].push(e);
                } else if p.less(order[d], order[e]) {
                    uppers[d].push(e);
                } else {
                    incomp[d].push(e);
                }
            }
        }
        EmbedSearch {
            p,
            f,
            induced,
            order,
            lowers,
            uppers,
            incomp,
            images: vec![0; k],
            pin: None,
        }
    }

    fn candidate_ok(&self, d: usize, c: u32) -> bool {
        for &e in &self.lowers[d] {
            let img = self.images[e];
            if img & c != img || img == c {
                return false;
            }
        }
        for &e in &self.uppers[d] {
            let img = self.images[e];
            if c & img != c || img == c {
                return false;
            }
        }
        for &e in &self.incomp[d] {
            let img = self.images[e];
            if self.induced {
                if img & c == img || c & img == c {
                    return false;
                }
            } else if img == c {
                return false;
            }
        }
        true
    }

    /// Visits every embedding; `stop_first` short-circuits after one.
    fn run(&mut self, stop_first: bool) -> u128 {
        let members = self.f.codes();
        let mut count = 0u128;
        self.recurse(0, &members, stop_first, &mut count);
        count
    }

    fn recurse(&mut self, d: usize, members: &[u32], stop_first: bool, count: &mut u128) -> bool {
        if d == self.p.size() {
            *count += 1;
            return stop_first;
        }
        if let Some((elem, code)) = self.pin {
            if self.order[d] == elem {
                if self.candidate_ok(d, code) {
                    self.images[d] = code;
                    return self.recurse(d + 1, members, stop_first, count);
                }
                return false;
            }
        }
        // With a lower neighbour assigned, only supersets of the union of
        // those images can work; walk that sub-cube when it is smaller
        // than the member list.
        let lb = self.lowers[d]
            .iter()
            .fold(0u32, |acc, &e| acc | self.images[e]);
        if !self.lowers[d].is_empty() {
            let free_bits = self.f.ground_n() - lb.count_ones().min(self.f.ground_n());
            if (1u64 << free_bits) < members.len() as u64 {
                let mut t = !lb & self.f.universe();
                loop {
                    let c = lb | t;
                    if self.f.contains(c) && self.candidate_ok(d, c) {
                        self.images[d] = c;
                        if self.recurse(d + 1, members, stop_first, count) {
                            return true;
                        }
                    }
                    if t == 0 {
                        break;
                    }
                    t = (t - 1) & !lb & self.f.universe();
                }
                return false;
            }
        }
        for &c in members {
            if c & lb == lb && self.candidate_ok(d, c) {
                self.images[d] = c;
                if self.recurse(d + 1, members, stop_first, count) {
                    return true;
                }
            }
        }
        false
    }

    fn found_record(&self) -> CopyRecord {
        let mut assignment = vec![0u32; self.p.size()];
        for (d, &e) in self.order.iter().enumerate() {
            assignment[e] = self.images[d];
        }
        CopyRecord::from_assignment(assignment, self.f.universe())
    }
}

/// Does the subfamily `codes` (distinct sets) admit a witnessing bijection
/// from `p`?
pub fn admits_bijection(p: &Poset, codes: &[u32], induced: bool) -> bool {
    debug_assert_eq!(codes.len(), p.size());
    let order = p.linear_extension();
    let mut images = vec![0u32; p.size()];
    fn rec(
        p: &Poset,
        order: &[usize],
        codes: &[u32],
        used: u32,
        d: usize,
        images: &mut [u32],
        induced: bool,
    ) -> bool {
        if d == order.len() {
            return true;
        }
        let elem = order[d];
        for (i, &c) in codes.iter().enumerate() {
            if used >> i & 1 == 1 {
                continue;
            }
            let mut ok = true;
            for e in 0..d {
                let q = order[e];
                let img = images[q];
                if p.less(q, elem) {
                    ok = img & c == img && img != c;
                } else if p.less(elem, q) {
                    ok = c & img == c && img != c;
                } else if induced {
                    ok = img & c != img && c & img != c;
                } else {
                    ok = img != c;
                }
                if !ok {
                    break;
                }
            }
            if ok {
                images[elem] = c;
                if rec(p, order, codes, used | 1 << i, d + 1, images, induced) {
                    return true;
                }
            }
        }
        false
    }
    rec(p, &order, codes, 0, 0, &mut images, induced)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyCounts {
    pub copies: BigUint,
    pub embeddings: BigUint,
}

/// Counts distinct copy subfamilies and witnessing bijections. Copies are
/// enumerated as increasing code tuples with a bijection check at the
/// leaves; embeddings by direct backtracking.
pub fn count_copies(p: &Poset, f: &SetFamily, induced: bool) -> CopyCounts {
    let embeddings = EmbedSearch::new(p, f, induced).run(false);
    let members = f.codes();
    let k = p.size();
    let mut copies = 0u128;
    let mut chosen = vec![0u32; k];
    fn rec(
        p: &Poset,
        members: &[u32],
        induced: bool,
        start: usize,
        depth: usize,
        chosen: &mut [u32],
        copies: &mut u128,
    ) {
        if depth == chosen.len() {
            if admits_bijection(p, chosen, induced) {
                *copies += 1;
            }
            return;
        }
        let need = chosen.len() - depth;
        for i in start..=members.len().saturating_sub(need) {
            chosen[depth] = members[i];
            rec(p, members, induced, i + 1, depth + 1, chosen, copies);
        }
    }
    if members.len() >= k {
        rec(p, &members, induced, 0, 0, &mut chosen, &mut copies);
    }
    CopyCounts {
        copies: BigUint::from(copies),
        embeddings: BigUint::from(embeddings),
    }
}

/// Copies whose subfamily contains the set `through`.
pub fn copies_through(p: &Poset, f: &SetFamily, through: u32, induced: bool) -> u128 {
    if !f.contains(through) {
        return 0;
    }
    let members: Vec<u32> = f.codes().into_iter().filter(|&c| c != through).collect();
    let k = p.size();
    if k == 0 || members.len() + 1 < k {
        return 0;
    }
    let mut copies = 0u128;
    let mut chosen = vec![0u32; k];
    chosen[0] = through;
    fn rec(
        p: &Poset,
        members: &[u32],
        induced: bool,
        start: usize,
        depth: usize,
        chosen: &mut Vec<u32>,
        copies: &mut u128,
    ) {
        if depth == chosen.len() {
            let mut sub = chosen.clone();
            sub.sort_unstable();
            if admits_bijection(p, &sub, induced) {
                *copies += 1;
            }
            return;
        }
        let need = chosen.len() - depth;
        for i in start..=members.len().saturating_sub(need) {
            chosen[depth] = members[i];
            rec(p, members, induced, i + 1, depth + 1, chosen, copies);
        }
    }
    rec(p, &members, induced, 0, 1, &mut chosen, &mut copies);
    copies
}

pub fn is_p_free(p: &Poset, f: &SetFamily, induced: bool) -> bool {
    find_copy(p, f, induced).is_none()
}

/// Does the family contain a copy whose subfamily includes `through`?
/// Used to keep freeness checks incremental when sets are added one by
/// one: a family known free stays free unless the new set closes a copy.
pub fn creates_copy_with(p: &Poset, f: &SetFamily, through: u32, induced: bool) -> bool {
    if !f.contains(through) || f.len() < p.size() {
        return false;
    }
    for elem in 0..p.size() {
        let mut search = EmbedSearch::new(p, f, induced);
        search.pin = Some((elem, through));
        if search.run(true) > 0 {
            return true;
        }
    }
    false
}

/// First copy found in the fixed search order, if any.
pub fn find_copy(p: &Poset, f: &SetFamily, induced: bool) -> Option<CopyRecord> {
    if f.len() < p.size() {
        return None;
    }
    let mut search = EmbedSearch::new(p, f, induced);
    if search.run(true) > 0 {
        Some(search.found_record())
    } else {
        None
    }
}

const NIL: usize = usize::MAX;

/// Maximum matching in the bipartite strict-inclusion graph via
/// Hopcroft-Karp; adjacency is the full comparability relation, so by
/// Dilworth the largest antichain is |codes| minus the matching size.
fn max_matching(codes: &[u32]) -> (usize, Vec<usize>, Vec<usize>, Vec<Vec<usize>>) {
    let k = codes.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &a) in codes.iter().enumerate() {
        for (j, &b) in codes.iter().enumerate() {
            if a != b && a & b == a {
                adj[i].push(j);
            }
        }
    }
    let mut pair_l = vec![NIL; k];
    let mut pair_r = vec![NIL; k];
    let mut dist = vec![0u32; k];
    let mut matching = 0;
    loop {
        // BFS layers from free left vertices.
        let mut queue = std::collections::VecDeque::new();
        let mut reachable_free_right = false;
        for l in 0..k {
            if pair_l[l] == NIL {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = u32::MAX;
            }
        }
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                match pair_r[r] {
                    NIL => reachable_free_right = true,
                    l2 => {
                        if dist[l2] == u32::MAX {
                            dist[l2] = dist[l] + 1;
                            queue.push_back(l2);
                        }
                    }
                }
            }
        }
        if !reachable_free_right {
            break;
        }
        fn dfs(
            l: usize,
            adj: &[Vec<usize>],
            pair_l: &mut [usize],
            pair_r: &mut [usize],
            dist: &mut [u32],
        ) -> bool {
            for idx in 0..adj[l].len() {
                let r = adj[l][idx];
                let next = pair_r[r];
                if next == usize::MAX
                    || (dist[next] == dist[l] + 1 && dfs(next, adj, pair_l, pair_r, dist))
                {
                    pair_l[l] = r;
                    pair_r[r] = l;
                    return true;
                }
            }
            dist[l] = u32::MAX;
            false
        }
        for l in 0..k {
            if pair_l[l] == NIL && dfs(l, &adj, &mut pair_l, &mut pair_r, &mut dist) {
                matching += 1;
            }
        }
    }
    (matching, pair_l, pair_r, adj)
}

/// Size of the largest pairwise-incomparable subfamily.
pub fn max_antichain(f: &SetFamily) -> usize {
    max_antichain_of_codes(&f.codes())
}

pub fn max_antichain_of_codes(codes: &[u32]) -> usize {
    codes.len() - max_matching(codes).0
}

/// One maximum antichain, via the vertex-cover complement: keep codes
/// whose left copy is alternating-reachable from an unmatched left and
/// whose right copy is not.
pub fn max_antichain_witness(codes: &[u32]) -> Vec<u32> {
    let k = codes.len();
    let (matching, pair_l, pair_r, adj) = max_matching(codes);
    let mut z_left = vec![false; k];
    let mut z_right = vec![false; k];
    let mut queue: std::collections::VecDeque<usize> =
        (0..k).filter(|&l| pair_l[l] == NIL).collect();
    for &l in &queue {
        z_left[l] = true;
    }
    while let Some(l) = queue.pop_front() {
        for &r in &adj[l] {
            if !z_right[r] {
                z_right[r] = true;
                let back = pair_r[r];
                if back != NIL && !z_left[back] {
                    z_left[back] = true;
                    queue.push_back(back);
                }
            }
        }
    }
    let witness: Vec<u32> = (0..k)
        .filter(|&i| z_left[i] && !z_right[i])
        .map(|i| codes[i])
        .collect();
    debug_assert_eq!(witness.len(), k - matching);
    witness
}

/// The family weight of `point`: largest antichain among members
/// containing it (the point itself included when present).
pub fn family_weight(g: &SetFamily, point: u32) -> usize {
    max_antichain(&g.up_set(point))
}

/// Largest antichain strictly above `point` within the family.
pub fn strict_up_weight(f: &SetFamily, point: u32) -> usize {
    max_antichain_of_codes(&f.strict_up_codes(point))
}

/// The member whose strict-superset weight is maximal, i.e. the best
/// bottom of an induced fan; ties go to the smallest code.
pub fn max_up_weight(f: &SetFamily) -> Result<(u32, usize)> {
    if f.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut best: Option<(u32, usize)> = None;
    for code in f.codes() {
        let w = strict_up_weight(f, code);
        if best.map_or(true, |(_, bw)| w > bw) {
            best = Some((code, w));
        }
    }
    Ok(best.map(|(c, w)| (c, w)).unwrap())
}

/// Splits a family by fan roles: `bottoms` are members that do not top an
/// induced wedge of s legs (strict-subset antichain < s), `tops` those
/// that do not root an induced fan of t legs (strict-superset antichain
/// < t). Members may land in both; `rest` is disjoint from either.
pub struct DuDecomposition {
    pub bottoms: SetFamily,
    pub tops: SetFamily,
    pub rest: SetFamily,
}

pub fn du_decomposition(f: &SetFamily, s: usize, t: usize) -> DuDecomposition {
    let n = f.ground_n();
    let mut bottoms = SetFamily::empty(n).unwrap();
    let mut tops = SetFamily::empty(n).unwrap();
    let mut rest = SetFamily::empty(n).unwrap();
    for code in f.codes() {
        let down = max_antichain_of_codes(&f.strict_down_codes(code));
        let up = strict_up_weight(f, code);
        let mut placed = false;
        if down < s {
            bottoms.insert(code);
            placed = true;
        }
        if up < t {
            tops.insert(code);
            placed = true;
        }
        if !placed {
            rest.insert(code);
        }
    }
    DuDecomposition {
        bottoms,
        tops,
        rest,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{level_family, middle_levels};
    use crate::poset::NamedPoset;

    fn poset(text: &str) -> Poset {
        NamedPoset::parse(text).unwrap().build().unwrap()
    }

    fn counts(p: &str, f: &SetFamily, induced: bool) -> (u64, u64) {
        let c = count_copies(&poset(p), f, induced);
        (
            u64::try_from(c.copies).unwrap(),
            u64::try_from(c.embeddings).unwrap(),
        )
    }

    #[test]
    fn vee_copy_vs_embeddings() {
        let f = SetFamily::from_codes(2, &[0, 0b01, 0b10]).unwrap();
        assert_eq!(counts("vee:2", &f, false), (1, 2));
    }

    #[test]
    fn chain_copies_in_full_square() {
        let f = SetFamily::full(2).unwrap();
        assert_eq!(counts("chain:2", &f, false), (5, 5));
    }

    #[test]
    fn diamond_in_full_square() {
        let f = SetFamily::full(2).unwrap();
        assert_eq!(counts("diamond:2", &f, false), (1, 2));
    }

    #[test]
    fn freeness_checks() {
        let antichain = level_family(5, &[2]).unwrap();
        assert!(is_p_free(&poset("chain:2"), &antichain, false));
        let two_mid = middle_levels(4, 2).unwrap();
        assert!(is_p_free(&poset("diamond:2"), &two_mid, false));
        let full3 = SetFamily::full(3).unwrap();
        assert!(!is_p_free(&poset("diamond:2"), &full3, false));
    }

    #[test]
    fn found_copy_is_valid() {
        let full3 = SetFamily::full(3).unwrap();
        let rec = find_copy(&poset("diamond:2"), &full3, false).unwrap();
        assert!(admits_bijection(&poset("diamond:2"), &rec.subfamily(), false));
        assert_eq!(rec.bottom & rec.top, rec.bottom);
    }

    #[test]
    fn antichain_sizes() {
        assert_eq!(max_antichain(&SetFamily::full(4).unwrap()), 6);
        let chain = SetFamily::from_codes(3, &[0, 0b001, 0b011, 0b111]).unwrap();
        assert_eq!(max_antichain(&chain), 1);
        assert_eq!(max_antichain(&level_family(3, &[1, 2]).unwrap()), 3);
        assert_eq!(max_antichain(&SetFamily::empty(3).unwrap()), 0);
    }

    #[test]
    fn weights() {
        let full3 = SetFamily::full(3).unwrap();
        assert_eq!(family_weight(&full3, 0b001), 2);
        let chain = SetFamily::from_codes(3, &[0b001, 0b011, 0b111]).unwrap();
        for code in chain.codes() {
            assert_eq!(family_weight(&chain, code), 1);
        }
        let empty_up = SetFamily::from_codes(3, &[0b001]).unwrap();
        assert_eq!(family_weight(&empty_up, 0b110), 0);
    }

    #[test]
    fn max_up_weight_examples() {
        let full2 = SetFamily::full(2).unwrap();
        assert_eq!(max_up_weight(&full2).unwrap(), (0, 2));
        let level = level_family(4, &[2]).unwrap();
        let (w_code, w) = max_up_weight(&level).unwrap();
        assert_eq!((w_code, w), (level.codes()[0], 0));
        assert!(max_up_weight(&SetFamily::empty(3).unwrap()).is_err());
    }

    #[test]
    fn du_two_levels() {
        let f = middle_levels(4, 2).unwrap();
        let du = du_decomposition(&f, 1, 1);
        // With s = t = 1 the bottom level has no strict subsets in f and
        // the top level no strict supersets.
        for code in f.codes() {
            if code.count_ones() == 2 {
                assert!(du.bottoms.contains(code));
            } else {
                assert!(du.tops.contains(code));
            }
        }
        assert!(du.rest.is_empty());
    }

    #[test]
    fn embeddings_bounded_by_copies_times_factorial() {
        let f = SetFamily::full(3).unwrap();
        for p in ["chain:2", "vee:2", "diamond:2", "butterfly"] {
            for induced in [false, true] {
                let c = count_copies(&poset(p), &f, induced);
                let fact = crate::arith::factorial(poset(p).size() as u64);
                assert!(c.embeddings >= c.copies, "{p} induced={induced}");
                assert!(c.embeddings <= &c.copies * fact, "{p} induced={induced}");
            }
        }
    }

    #[test]
    fn induced_copies_at_most_non_induced() {
        let f = SetFamily::full(3).unwrap();
        for p in ["chain:3", "vee:2", "diamond:2", "butterfly", "K:2,1,2"] {
            let ind = count_copies(&poset(p), &f, true);
            let non = count_copies(&poset(p), &f, false);
            assert!(ind.copies <= non.copies, "{p}");
        }
    }

    #[test]
    fn copies_through_consistency() {
        let f = SetFamily::full(3).unwrap();
        let p = poset("vee:2");
        // Summing copies through each member counts every copy |P| times.
        let total: u128 = f.codes().iter().map(|&c| copies_through(&p, &f, c, false)).sum();
        let direct = count_copies(&p, &f, false).copies;
        assert_eq!(BigUint::from(total), direct * BigUint::from(3u32));
    }

    #[test]
    fn vee_free_weight_characterization() {
        // Induced fan-freeness is equivalent to every member having small
        // strict-superset weight; exhaustive over 2^[3].
        for r in 1usize..=3 {
            let vee = NamedPoset::Vee(r + 1).build().unwrap();
            for mask in 0u32..256 {
                let codes: Vec<u32> = (0..8).filter(|&c| mask >> c & 1 == 1).collect();
                let f = SetFamily::from_codes(3, &codes).unwrap();
                let free = is_p_free(&vee, &f, true);
                let low_weight = f.codes().iter().all(|&c| strict_up_weight(&f, c) <= r);
                assert_eq!(free, low_weight, "mask={mask} r={r}");
            }
        }
    }
}
