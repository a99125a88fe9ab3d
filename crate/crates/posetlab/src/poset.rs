//! Finite strict partial orders on up to 64 elements, with Hasse diagrams,
//! structural classification for tree posets, and the named constructors
//! used by the rest of the library.

use serde::{Deserialize, Serialize};

use crate::arith::binomial_u64;
use crate::error::{Error, Result};

pub const MAX_ELEMENTS: usize = 64;

/// A finite strict partial order. `lt[i]` is the bitmask of elements j with
/// i < j; one machine word per row keeps the closure loops branch-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poset {
    size: usize,
    lt: Vec<u64>,
}

/// Transitive reduction of a poset: `cover_edges` holds (i, j) meaning
/// j covers i.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HasseDiagram {
    pub size: usize,
    pub cover_edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeClass {
    NotTree,
    Tree,
    UpwardMonotoneTree,
    DownwardMonotoneTree,
}

impl Poset {
    /// Builds a poset from arbitrary strict relations; the input is closed
    /// transitively. Rejects indices out of range and closures that force
    /// i < i.
    pub fn from_relations(size: usize, relations: &[(usize, usize)]) -> Result<Self> {
        if size == 0 || size > MAX_ELEMENTS {
            return Err(Error::BadParam(format!(
                "poset size must be in 1..={MAX_ELEMENTS}, got {size}"
            )));
        }
        let mut lt = vec![0u64; size];
        for &(a, b) in relations {
            for idx in [a, b] {
                if idx >= size {
                    return Err(Error::Index { index: idx, size });
                }
            }
            lt[a] |= 1 << b;
        }
        // Bitmask Warshall: row i absorbs every row it can reach.
        for j in 0..size {
            for i in 0..size {
                if lt[i] >> j & 1 == 1 {
                    lt[i] |= lt[j];
                }
            }
        }
        for (i, row) in lt.iter().enumerate() {
            if row >> i & 1 == 1 {
                return Err(Error::Cycle(i));
            }
        }
        Ok(Poset { size, lt })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.lt[a] >> b & 1 == 1
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.less(a, b) || self.less(b, a)
    }

    /// Bitmask of elements strictly above `a`.
    pub fn above(&self, a: usize) -> u64 {
        self.lt[a]
    }

    /// Bitmask of elements strictly below `a`.
    pub fn below(&self, a: usize) -> u64 {
        let mut mask = 0u64;
        for (i, row) in self.lt.iter().enumerate() {
            if row >> a & 1 == 1 {
                mask |= 1 << i;
            }
        }
        mask
    }

    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.size {
            for b in 0..self.size {
                if self.less(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Reverses every relation.
    pub fn dual(&self) -> Poset {
        let pairs: Vec<(usize, usize)> = self.strict_pairs().iter().map(|&(a, b)| (b, a)).collect();
        Poset::from_relations(self.size, &pairs).expect("dual of a poset is a poset")
    }

    /// Restriction to the elements of `mask`, reindexed in ascending order.
    pub fn restrict(&self, mask: u64) -> Poset {
        let elements: Vec<usize> = (0..self.size).filter(|&i| mask >> i & 1 == 1).collect();
        let mut pairs = Vec::new();
        for (ia, &a) in elements.iter().enumerate() {
            for (ib, &b) in elements.iter().enumerate() {
                if self.less(a, b) {
                    pairs.push((ia, ib));
                }
            }
        }
        Poset::from_relations(elements.len().max(1), &pairs).expect("restriction stays a poset")
    }

    pub fn hasse(&self) -> HasseDiagram {
        let mut cover_edges = Vec::new();
        for a in 0..self.size {
            for b in 0..self.size {
                // (a, b) is a cover when nothing sits strictly between.
                if self.less(a, b) && self.lt[a] & self.below(b) == 0 {
                    cover_edges.push((a, b));
                }
            }
        }
        HasseDiagram {
            size: self.size,
            cover_edges,
        }
    }

    /// Connectivity of the undirected Hasse diagram (equivalently of the
    /// comparability graph).
    pub fn is_connected(&self) -> bool {
        let mut reached: u64 = 1;
        loop {
            let mut next = reached;
            for i in 0..self.size {
                if reached >> i & 1 == 1 {
                    next |= self.lt[i] | self.below(i);
                }
            }
            if next == reached {
                break;
            }
            reached = next;
        }
        reached.count_ones() as usize == self.size
    }

    /// Bitmasks of the weakly connected components of the Hasse diagram.
    pub fn components(&self) -> Vec<u64> {
        let mut seen = 0u64;
        let mut comps = Vec::new();
        for start in 0..self.size {
            if seen >> start & 1 == 1 {
                continue;
            }
            let mut comp: u64 = 1 << start;
            loop {
                let mut next = comp;
                for i in 0..self.size {
                    if comp >> i & 1 == 1 {
                        next |= self.lt[i] | self.below(i);
                    }
                }
                if next == comp {
                    break;
                }
                comp = next;
            }
            seen |= comp;
            comps.push(comp);
        }
        comps
    }

    /// Number of elements in a longest chain.
    pub fn height(&self) -> usize {
        let mut depth = vec![0usize; self.size];
        let order = self.linear_extension();
        for &v in &order {
            let mut d = 1;
            for u in 0..self.size {
                if self.less(u, v) {
                    d = d.max(depth[u] + 1);
                }
            }
            depth[v] = d;
        }
        depth.into_iter().max().unwrap_or(0)
    }

    /// A topological order of the elements (minimal elements first).
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.size).collect();
        order.sort_by_key(|&v| (self.below(v).count_ones(), v));
        // Counting sort by down-set size is a valid extension because
        // u < v implies below(u) is a strict subset of below(v).
        order
    }

    pub fn classify_tree(&self) -> TreeClass {
        let hasse = self.hasse();
        let connected = self.is_connected();
        if !connected || hasse.cover_edges.len() != self.size - 1 {
            return TreeClass::NotTree;
        }
        let mut lower_covers = vec![0usize; self.size];
        let mut upper_covers = vec![0usize; self.size];
        for &(a, b) in &hasse.cover_edges {
            lower_covers[b] += 1;
            upper_covers[a] += 1;
        }
        let upward = lower_covers.iter().all(|&c| c <= 1);
        let downward = upper_covers.iter().all(|&c| c <= 1);
        // A single element is monotone both ways; report upward.
        if upward {
            TreeClass::UpwardMonotoneTree
        } else if downward {
            TreeClass::DownwardMonotoneTree
        } else {
            TreeClass::Tree
        }
    }

    /// Leaves of a monotone tree with their ranks (root has rank 1; rank is
    /// Hasse distance from the root plus 1). The root never counts as a
    /// leaf, so a 1-element poset yields an empty list.
    pub fn leaf_ranks(&self) -> Result<Vec<(usize, usize)>> {
        let class = self.classify_tree();
        let p = match class {
            TreeClass::UpwardMonotoneTree => self.clone(),
            TreeClass::DownwardMonotoneTree => self.dual(),
            _ => return Err(Error::NotMonotoneTree),
        };
        let root = (0..p.size)
            .find(|&v| p.below(v) == 0)
            .expect("monotone tree has a unique minimal element");
        let hasse = p.hasse();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); p.size];
        for &(a, b) in &hasse.cover_edges {
            children[a].push(b);
        }
        let mut rank = vec![0usize; p.size];
        rank[root] = 1;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &c in &children[v] {
                rank[c] = rank[v] + 1;
                stack.push(c);
            }
        }
        let mut out: Vec<(usize, usize)> = (0..p.size)
            .filter(|&v| v != root && children[v].is_empty())
            .map(|v| (v, rank[v]))
            .collect();
        out.sort();
        Ok(out)
    }

    /// Closed-form span of a monotone tree: |T| - 1 + sum over leaves of
    /// (height - rank).
    pub fn monotone_tree_span(&self) -> Result<usize> {
        let leaves = self.leaf_ranks()?;
        let h = self.height();
        Ok(self.size - 1 + leaves.iter().map(|&(_, r)| h - r).sum::<usize>())
    }
}

/// Named constructors addressable from the CLI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NamedPoset {
    Chain(usize),
    Vee(usize),
    Wedge(usize),
    CompleteMultipartite(Vec<usize>),
    Diamond(usize),
    Butterfly,
}

impl NamedPoset {
    pub fn build(&self) -> Result<Poset> {
        match self {
            NamedPoset::Chain(k) => {
                require(*k >= 1, "chain length must be >= 1")?;
                let pairs: Vec<(usize, usize)> = (0..k.saturating_sub(1)).map(|i| (i, i + 1)).collect();
                Poset::from_relations(*k, &pairs)
            }
            NamedPoset::Vee(r) => NamedPoset::CompleteMultipartite(vec![1, *r]).build(),
            NamedPoset::Wedge(r) => NamedPoset::CompleteMultipartite(vec![*r, 1]).build(),
            NamedPoset::CompleteMultipartite(parts) => {
                require(!parts.is_empty(), "multipartite poset needs at least one class")?;
                require(parts.iter().all(|&r| r >= 1), "class multiplicities must be >= 1")?;
                let total: usize = parts.iter().sum();
                let mut offsets = vec![0usize];
                for &r in parts {
                    offsets.push(offsets.last().unwrap() + r);
                }
                let mut pairs = Vec::new();
                for i in 0..parts.len() {
                    for j in i + 1..parts.len() {
                        for a in offsets[i]..offsets[i + 1] {
                            for b in offsets[j]..offsets[j + 1] {
                                pairs.push((a, b));
                            }
                        }
                    }
                }
                Poset::from_relations(total, &pairs)
            }
            NamedPoset::Diamond(s) => {
                require(*s >= 2, "diamond needs at least 2 middle elements")?;
                NamedPoset::CompleteMultipartite(vec![1, *s, 1]).build()
            }
            NamedPoset::Butterfly => Poset::from_relations(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]),
        }
    }

    /// Parses CLI strings like "chain:3", "vee:2", "K:2,1,2", "butterfly".
    pub fn parse(text: &str) -> Result<NamedPoset> {
        let (kind, params) = match text.split_once(':') {
            Some((k, p)) => (k, Some(p)),
            None => (text, None),
        };
        let one = |p: Option<&str>| -> Result<usize> {
            p.and_then(|p| p.parse().ok())
                .ok_or_else(|| Error::BadParam(format!("poset '{text}' needs one integer parameter")))
        };
        match kind {
            "chain" => Ok(NamedPoset::Chain(one(params)?)),
            "vee" => Ok(NamedPoset::Vee(one(params)?)),
            "wedge" => Ok(NamedPoset::Wedge(one(params)?)),
            "diamond" => Ok(NamedPoset::Diamond(one(params)?)),
            "butterfly" => Ok(NamedPoset::Butterfly),
            "K" => {
                let parts: Option<Vec<usize>> = params
                    .unwrap_or("")
                    .split(',')
                    .map(|p| p.parse().ok())
                    .collect();
                match parts {
                    Some(v) if !v.is_empty() => Ok(NamedPoset::CompleteMultipartite(v)),
                    _ => Err(Error::BadParam(format!("bad multipartite spec '{text}'"))),
                }
            }
            _ => Err(Error::BadParam(format!("unknown poset kind '{text}'"))),
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::BadParam(msg.to_string()))
    }
}

/// Level parameters of the generalized diamond: the number of levels a
/// non-induced (resp. induced) copy needs, and the window in which the
/// first value governs the stronger supersaturation bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiamondLevelParams {
    pub s: u64,
    pub m_s: u32,
    pub m_star_s: u32,
    pub window_lo: u64,
    pub window_hi: u64,
    pub in_window: bool,
}

/// m_s = ceil(log2(s+2)); m*_s = min { m : s <= binom(m, ceil(m/2)) };
/// the window is [2^(m_s-1) - 1, 2^m_s - binom(m_s, ceil(m_s/2)) - 1].
pub fn diamond_level_params(s: u64) -> Result<DiamondLevelParams> {
    if s < 2 {
        return Err(Error::BadParam(format!("diamond parameter s must be >= 2, got {s}")));
    }
    let m_s = (u64::BITS - (s + 1).leading_zeros()) as u32;
    debug_assert!(1u64 << m_s >= s + 2 && 1u64 << (m_s - 1) < s + 2);
    let mut m_star_s = 1u32;
    while binomial_u64(m_star_s, m_star_s.div_ceil(2)) < s {
        m_star_s += 1;
    }
    let window_lo = (1u64 << (m_s - 1)) - 1;
    let mid = binomial_u64(m_s, m_s.div_ceil(2));
    let window_hi = (1u64 << m_s).saturating_sub(mid + 1);
    Ok(DiamondLevelParams {
        s,
        m_s,
        m_star_s,
        window_lo,
        window_hi,
        in_window: window_lo <= s && s <= window_hi,
    })
}

/// JSON schema: {"size": k, "lt": [[i, j], ...]}; closure applied on load.
#[derive(Serialize, Deserialize)]
struct PosetJson {
    size: usize,
    lt: Vec<(usize, usize)>,
}

impl Serialize for Poset {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        PosetJson {
            size: self.size,
            lt: self.strict_pairs(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Poset {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = PosetJson::deserialize(de)?;
        Poset::from_relations(raw.size, &raw.lt).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(text: &str) -> Poset {
        NamedPoset::parse(text).unwrap().build().unwrap()
    }

    #[test]
    fn closure_is_transitive() {
        let p = Poset::from_relations(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(p.less(0, 2));
        assert_eq!(p.strict_pairs(), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn single_element() {
        let p = Poset::from_relations(1, &[]).unwrap();
        assert_eq!(p.size(), 1);
        assert!(p.is_connected());
        assert_eq!(p.height(), 1);
        assert_eq!(p.classify_tree(), TreeClass::UpwardMonotoneTree);
        assert_eq!(p.leaf_ranks().unwrap(), vec![]);
    }

    #[test]
    fn cycle_rejected() {
        assert_eq!(
            Poset::from_relations(2, &[(0, 1), (1, 0)]),
            Err(Error::Cycle(0))
        );
    }

    #[test]
    fn out_of_range_rejected() {
        assert_eq!(
            Poset::from_relations(2, &[(0, 5)]),
            Err(Error::Index { index: 5, size: 2 })
        );
    }

    #[test]
    fn hasse_removes_transitive_edges() {
        let chain = named("chain:3");
        assert_eq!(chain.hasse().cover_edges, vec![(0, 1), (1, 2)]);

        let d2 = named("diamond:2");
        assert_eq!(d2.hasse().cover_edges.len(), 4);

        let antichain = Poset::from_relations(3, &[]).unwrap();
        assert!(antichain.hasse().cover_edges.is_empty());
    }

    #[test]
    fn connectivity() {
        assert!(named("diamond:3").is_connected());
        let two_chains = Poset::from_relations(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(!two_chains.is_connected());
        assert_eq!(two_chains.components().len(), 2);
    }

    #[test]
    fn heights() {
        assert_eq!(named("chain:4").height(), 4);
        assert_eq!(named("diamond:5").height(), 3);
        assert_eq!(named("K:2,1,2").height(), 3);
    }

    #[test]
    fn tree_classification() {
        assert_eq!(named("vee:3").classify_tree(), TreeClass::UpwardMonotoneTree);
        assert_eq!(named("wedge:3").classify_tree(), TreeClass::DownwardMonotoneTree);
        assert_eq!(named("K:2,1,2").classify_tree(), TreeClass::Tree);
        assert_eq!(named("diamond:2").classify_tree(), TreeClass::NotTree);
    }

    #[test]
    fn dual_swaps_monotone_labels() {
        let vee = named("vee:4");
        assert_eq!(vee.classify_tree(), TreeClass::UpwardMonotoneTree);
        assert_eq!(vee.dual().classify_tree(), TreeClass::DownwardMonotoneTree);
    }

    #[test]
    fn leaf_ranks_examples() {
        assert_eq!(named("vee:2").leaf_ranks().unwrap(), vec![(1, 2), (2, 2)]);
        assert_eq!(named("chain:3").leaf_ranks().unwrap(), vec![(2, 3)]);
        // Broom: root < mid < {l1, l2}.
        let broom = Poset::from_relations(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        assert_eq!(broom.leaf_ranks().unwrap(), vec![(2, 3), (3, 3)]);
        assert_eq!(named("K:2,1,2").leaf_ranks(), Err(Error::NotMonotoneTree));
    }

    #[test]
    fn monotone_span_formula() {
        assert_eq!(named("vee:4").monotone_tree_span().unwrap(), 4);
        assert_eq!(named("chain:5").monotone_tree_span().unwrap(), 4);
        // Spider root < a < b, root < c: 3 + (0 + 1).
        let spider = Poset::from_relations(4, &[(0, 1), (1, 2), (0, 3)]).unwrap();
        assert_eq!(spider.monotone_tree_span().unwrap(), 4);
    }

    #[test]
    fn named_shapes() {
        let d2 = named("diamond:2");
        assert_eq!(d2.size(), 4);
        assert_eq!(d2.strict_pairs().len(), 5);

        let b = named("butterfly");
        assert_eq!(b.size(), 4);
        assert_eq!(b.strict_pairs().len(), 4);

        let k = named("K:2,1,2");
        assert_eq!(k.size(), 5);
        // Bottoms below middle and tops, middle below tops.
        assert!(k.less(0, 2) && k.less(1, 2) && k.less(2, 3) && k.less(2, 4));
        assert!(k.less(0, 3) && k.less(1, 4));
    }

    #[test]
    fn diamond_levels() {
        let p2 = diamond_level_params(2).unwrap();
        assert_eq!((p2.m_s, p2.m_star_s), (2, 2));
        assert_eq!((p2.window_lo, p2.window_hi), (1, 1));
        assert!(!p2.in_window);

        let p3 = diamond_level_params(3).unwrap();
        assert_eq!((p3.m_s, p3.m_star_s), (3, 3));
        assert_eq!((p3.window_lo, p3.window_hi), (3, 4));
        assert!(p3.in_window);

        let p4 = diamond_level_params(4).unwrap();
        assert_eq!((p4.m_s, p4.m_star_s), (3, 4));

        assert!(diamond_level_params(1).is_err());
    }

    #[test]
    fn diamond_levels_monotone() {
        let mut prev = diamond_level_params(2).unwrap();
        for s in 3..=1000 {
            let cur = diamond_level_params(s).unwrap();
            assert!(cur.m_s >= prev.m_s);
            assert!(cur.m_star_s >= prev.m_star_s);
            assert!(cur.m_star_s >= cur.m_s, "m* >= m fails at s={s}");
            prev = cur;
        }
    }

    #[test]
    fn closure_idempotent_on_hasse() {
        for text in ["chain:4", "vee:3", "diamond:3", "butterfly", "K:2,1,2"] {
            let p = named(text);
            let covers = p.hasse().cover_edges;
            let rebuilt = Poset::from_relations(p.size(), &covers).unwrap();
            assert_eq!(rebuilt, p, "hasse closure round-trip fails for {text}");
        }
    }

    #[test]
    fn json_round_trip() {
        let p = named("K:2,1,2");
        let text = serde_json::to_string(&p).unwrap();
        let back: Poset = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }
}
