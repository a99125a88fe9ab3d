//! Constructive tree-copy machinery: a greedy cut plus degree pruning
//! yields a certified product lower bound on copies of a two-layer
//! directed tree in a digraph, and a layered greedy embedding turns an
//! explicit family chain into a certified copy bound for monotone trees.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::{factorial, middle_binomial};
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::poset::{Poset, TreeClass};

const MAX_EXACT_VERTICES: usize = 1 << 12;
const EMBED_NODE_LIMIT: u64 = 200_000_000;

#[derive(Debug, Clone)]
pub struct Digraph {
    pub vertices: usize,
    pub edges: Vec<(u32, u32)>,
}

impl Digraph {
    pub fn new(vertices: usize, mut edges: Vec<(u32, u32)>) -> Result<Self> {
        edges.sort_unstable();
        edges.dedup();
        for &(a, b) in &edges {
            if a as usize >= vertices || b as usize >= vertices {
                return Err(Error::Index {
                    index: a.max(b) as usize,
                    size: vertices,
                });
            }
            if a == b {
                return Err(Error::BadParam(format!("loop at vertex {a}")));
            }
        }
        Ok(Digraph { vertices, edges })
    }

    /// Strict-inclusion digraph of a family: one vertex per member in
    /// ascending code order.
    pub fn from_family(f: &SetFamily) -> Digraph {
        let codes = f.codes();
        let index: std::collections::HashMap<u32, u32> = codes
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u32))
            .collect();
        let mut edges = Vec::new();
        for (i, &a) in codes.iter().enumerate() {
            for sup in f.strict_up_codes(a) {
                edges.push((i as u32, index[&sup]));
            }
        }
        Digraph {
            vertices: codes.len(),
            edges,
        }
    }
}

/// A directed tree with no directed path of length two: every vertex is a
/// pure source or a pure sink.
#[derive(Debug, Clone)]
pub struct DirectedTree {
    pub vertices: usize,
    pub edges: Vec<(u32, u32)>,
}

impl DirectedTree {
    pub fn new(vertices: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        if vertices < 2 || edges.len() + 1 != vertices {
            return Err(Error::BadTree(format!(
                "{vertices} vertices need {} edges, got {}",
                vertices.saturating_sub(1),
                edges.len()
            )));
        }
        let mut out_deg = vec![0usize; vertices];
        let mut in_deg = vec![0usize; vertices];
        let mut parent: Vec<usize> = (0..vertices).collect();
        fn find(parent: &mut Vec<usize>, v: usize) -> usize {
            if parent[v] != v {
                parent[v] = find(parent, parent[v]);
            }
            parent[v]
        }
        for &(a, b) in &edges {
            if a as usize >= vertices || b as usize >= vertices {
                return Err(Error::BadTree(format!("vertex {} out of range", a.max(b))));
            }
            out_deg[a as usize] += 1;
            in_deg[b as usize] += 1;
            let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
            if ra == rb {
                return Err(Error::BadTree("edges close an undirected cycle".into()));
            }
            parent[ra] = rb;
        }
        if (0..vertices).any(|v| out_deg[v] > 0 && in_deg[v] > 0) {
            return Err(Error::BadTree("contains a directed path of length two".into()));
        }
        Ok(DirectedTree { vertices, edges })
    }

    /// Hasse diagram of a height-2 poset as a directed tree.
    pub fn from_height2_poset(p: &Poset) -> Result<Self> {
        let covers = p.hasse().cover_edges;
        DirectedTree::new(
            p.size(),
            covers.iter().map(|&(a, b)| (a as u32, b as u32)).collect(),
        )
    }

    fn automorphisms(&self) -> u64 {
        let k = self.vertices;
        let edge_set: std::collections::HashSet<(u32, u32)> = self.edges.iter().copied().collect();
        let mut perm: Vec<u32> = (0..k as u32).collect();
        let mut count = 0u64;
        fn rec(
            perm: &mut Vec<u32>,
            start: usize,
            edge_set: &std::collections::HashSet<(u32, u32)>,
            edges: &[(u32, u32)],
            count: &mut u64,
        ) {
            if start == perm.len() {
                if edges
                    .iter()
                    .all(|&(a, b)| edge_set.contains(&(perm[a as usize], perm[b as usize])))
                {
                    *count += 1;
                }
                return;
            }
            for i in start..perm.len() {
                perm.swap(start, i);
                rec(perm, start + 1, edge_set, edges, count);
                perm.swap(start, i);
            }
        }
        rec(&mut perm, 0, &edge_set, &self.edges, &mut count);
        count
    }

    /// Edge order in which every prefix stays a tree.
    fn grown_edge_order(&self) -> Vec<(u32, u32)> {
        if self.edges.is_empty() {
            return Vec::new();
        }
        let mut remaining: Vec<(u32, u32)> = self.edges.clone();
        let mut order = vec![remaining.swap_remove(0)];
        let mut touched: std::collections::HashSet<u32> =
            [order[0].0, order[0].1].into_iter().collect();
        while !remaining.is_empty() {
            let pos = remaining
                .iter()
                .position(|&(a, b)| touched.contains(&a) || touched.contains(&b))
                .expect("tree stays connected");
            let e = remaining.swap_remove(pos);
            touched.insert(e.0);
            touched.insert(e.1);
            order.push(e);
        }
        order
    }
}

#[derive(Debug, Clone)]
pub struct TreeCountingRun {
    pub side_a: Vec<u32>,
    pub side_b: Vec<u32>,
    /// (vertices, edges) of the retained graph after each pruning round,
    /// H_0 ..= H_{t-1}.
    pub stage_sizes: Vec<(usize, usize)>,
    pub certified_copies: BigUint,
    pub exact_copies: Option<BigUint>,
    pub automorphisms: u64,
}

/// Greedy cut keeping at least half the edges, orientation chosen so the
/// kept edges point A to B, then t-1 rounds of low-degree pruning and a
/// product bound on greedy embeddings. The exact count backtracks over
/// the original digraph when it is small enough.
pub fn tree_count(g: &Digraph, t: &DirectedTree) -> Result<TreeCountingRun> {
    let m = g.vertices.max(1);
    let t_edges = t.edges.len().max(1);
    if t.vertices > 10 {
        return Err(Error::BadTree("tree too large for exact automorphism sweep".into()));
    }

    // Greedy cut: each vertex joins the side with more placed neighbours
    // across the cut.
    let mut side = vec![false; g.vertices];
    let mut placed = vec![false; g.vertices];
    let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); g.vertices];
    for &(a, b) in &g.edges {
        neighbors[a as usize].push(b);
        neighbors[b as usize].push(a);
    }
    for v in 0..g.vertices {
        let mut towards_a = 0i64;
        for &u in &neighbors[v] {
            if placed[u as usize] {
                if side[u as usize] {
                    towards_a += 1;
                } else {
                    towards_a -= 1;
                }
            }
        }
        // More placed neighbours in B (side=false) pulls v into A.
        side[v] = towards_a <= 0;
        placed[v] = true;
    }
    let a_to_b = g
        .edges
        .iter()
        .filter(|&&(a, b)| side[a as usize] && !side[b as usize])
        .count();
    let b_to_a = g
        .edges
        .iter()
        .filter(|&&(a, b)| !side[a as usize] && side[b as usize])
        .count();
    if b_to_a > a_to_b {
        side.iter_mut().for_each(|s| *s = !*s);
    }
    let kept: Vec<(u32, u32)> = g
        .edges
        .iter()
        .copied()
        .filter(|&(a, b)| side[a as usize] && !side[b as usize])
        .collect();

    // Degree threshold |E|/(8 t m); vertices kept must exceed it, i.e.
    // deg * 8 * t * m > |E| in integers.
    let total_edges = g.edges.len() as u64;
    let keeps = |deg: u64| deg * 8 * t_edges as u64 * m as u64 > total_edges;
    let kappa = total_edges / (8 * t_edges as u64 * m as u64) + 1;

    let mut alive: Vec<bool> = vec![true; g.vertices];
    let mut current = kept.clone();
    let mut stage_sizes = vec![(g.vertices, current.len())];
    for _ in 1..t_edges {
        let mut deg = vec![0u64; g.vertices];
        for &(a, b) in &current {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        for v in 0..g.vertices {
            if alive[v] && !keeps(deg[v]) {
                alive[v] = false;
            }
        }
        current.retain(|&(a, b)| alive[a as usize] && alive[b as usize]);
        stage_sizes.push((alive.iter().filter(|&&x| x).count(), current.len()));
    }

    let mut certified = BigUint::from(current.len() as u64);
    for i in 2..=t_edges as u64 {
        let choices = kappa.saturating_sub(i);
        certified *= BigUint::from(choices);
    }
    let autos = t.automorphisms();
    let certified_copies = certified / BigUint::from(autos);

    let exact_copies = if g.vertices <= MAX_EXACT_VERTICES {
        let embeddings = count_tree_embeddings(g, t)?;
        debug_assert!(embeddings.clone() % BigUint::from(autos) == BigUint::zero());
        Some(embeddings / BigUint::from(autos))
    } else {
        None
    };

    Ok(TreeCountingRun {
        side_a: (0..g.vertices as u32).filter(|&v| side[v as usize]).collect(),
        side_b: (0..g.vertices as u32).filter(|&v| !side[v as usize]).collect(),
        stage_sizes,
        certified_copies,
        exact_copies,
        automorphisms: autos,
    })
}

/// Exact embedding count of the directed tree into the digraph.
fn count_tree_embeddings(g: &Digraph, t: &DirectedTree) -> Result<BigUint> {
    let mut out_adj: Vec<Vec<u32>> = vec![Vec::new(); g.vertices];
    let mut in_adj: Vec<Vec<u32>> = vec![Vec::new(); g.vertices];
    let mut edge_set = std::collections::HashSet::new();
    for &(a, b) in &g.edges {
        out_adj[a as usize].push(b);
        in_adj[b as usize].push(a);
        edge_set.insert((a, b));
    }
    let order = t.grown_edge_order();
    if order.is_empty() {
        // A single vertex embeds anywhere.
        return Ok(BigUint::from(g.vertices as u64));
    }
    let mut images: Vec<Option<u32>> = vec![None; t.vertices];
    let mut used = std::collections::HashSet::new();
    let mut count = 0u64;
    let mut nodes = 0u64;
    rec_embed(
        &order,
        0,
        &mut images,
        &mut used,
        &out_adj,
        &in_adj,
        &edge_set,
        g.vertices,
        &mut count,
        &mut nodes,
    )?;
    Ok(BigUint::from(count))
}

#[allow(clippy::too_many_arguments)]
fn rec_embed(
    order: &[(u32, u32)],
    idx: usize,
    images: &mut Vec<Option<u32>>,
    used: &mut std::collections::HashSet<u32>,
    out_adj: &[Vec<u32>],
    in_adj: &[Vec<u32>],
    edge_set: &std::collections::HashSet<(u32, u32)>,
    vertices: usize,
    count: &mut u64,
    nodes: &mut u64,
) -> Result<()> {
    *nodes += 1;
    if *nodes > EMBED_NODE_LIMIT {
        return Err(Error::TooLarge {
            what: "tree embedding nodes",
            requested: *nodes,
            limit: EMBED_NODE_LIMIT,
        });
    }
    if idx == order.len() {
        *count += 1;
        return Ok(());
    }
    let (s, d) = order[idx];
    match (images[s as usize], images[d as usize]) {
        (Some(is), Some(id)) => {
            if edge_set.contains(&(is, id)) {
                rec_embed(order, idx + 1, images, used, out_adj, in_adj, edge_set, vertices, count, nodes)?;
            }
        }
        (Some(is), None) => {
            for &cand in &out_adj[is as usize] {
                if used.insert(cand) {
                    images[d as usize] = Some(cand);
                    rec_embed(order, idx + 1, images, used, out_adj, in_adj, edge_set, vertices, count, nodes)?;
                    images[d as usize] = None;
                    used.remove(&cand);
                }
            }
        }
        (None, Some(id)) => {
            for &cand in &in_adj[id as usize] {
                if used.insert(cand) {
                    images[s as usize] = Some(cand);
                    rec_embed(order, idx + 1, images, used, out_adj, in_adj, edge_set, vertices, count, nodes)?;
                    images[s as usize] = None;
                    used.remove(&cand);
                }
            }
        }
        (None, None) => {
            let mut all: Vec<(u32, u32)> = edge_set.iter().copied().collect();
            all.sort_unstable();
            for (a, b) in all {
                if a != b && !used.contains(&a) && !used.contains(&b) {
                    images[s as usize] = Some(a);
                    images[d as usize] = Some(b);
                    used.insert(a);
                    used.insert(b);
                    rec_embed(order, idx + 1, images, used, out_adj, in_adj, edge_set, vertices, count, nodes)?;
                    used.remove(&a);
                    used.remove(&b);
                    images[s as usize] = None;
                    images[d as usize] = None;
                }
            }
        }
    }
    Ok(())
}

/// Explicit family chain with the three growth parameters it claims.
#[derive(Debug, Clone)]
pub struct LayeredWitness {
    /// layers[0] is the outermost family F_1; layers[h-1] the innermost.
    pub layers: Vec<SetFamily>,
    pub delta1: BigRational,
    pub delta2: BigRational,
    pub delta3: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredBound {
    pub embeddings: BigUint,
    pub copy_lower_bound: BigUint,
}

/// Verifies the witness conditions exactly, then counts the embeddings the
/// rank-layered greedy generates and divides by |T|! as a certified copy
/// lower bound.
pub fn layered_witness_check(w: &LayeredWitness, tree: &Poset) -> Result<LayeredBound> {
    if tree.classify_tree() != TreeClass::UpwardMonotoneTree {
        return Err(Error::NotMonotoneTree);
    }
    let h = w.layers.len();
    if h == 0 || tree.height() != h {
        return Err(Error::BadParam(format!(
            "witness has {h} layers but the tree has height {}",
            tree.height()
        )));
    }
    let n = w.layers[0].ground_n();
    for win in w.layers.windows(2) {
        for code in win[1].codes() {
            if !win[0].contains(code) {
                return Err(Error::BadParam(format!(
                    "layers are not nested: set {code} missing from the layer above"
                )));
            }
        }
    }

    // i) innermost layer carries delta1 of the middle binomial.
    let mid = BigRational::from_integer(middle_binomial(n as u64).into());
    if BigRational::from_integer((w.layers[h - 1].len() as u64).into()) < &w.delta1 * &mid {
        return Err(Error::ConditionFailed {
            condition: 1,
            witness: 0,
        });
    }
    // ii) every set of layer i has delta2*n strict supersets one layer out.
    let n_rat = BigRational::from_integer((n as u64).into());
    for i in 1..h {
        let need = &w.delta2 * &n_rat;
        for code in w.layers[i].codes() {
            let have = w.layers[i - 1]
                .strict_up_codes(code)
                .len() as u64;
            if BigRational::from_integer(have.into()) < need {
                return Err(Error::ConditionFailed {
                    condition: 2,
                    witness: code,
                });
            }
        }
    }
    // iii) every set of layer i has delta3*n^(i-1) strict supersets in F_1;
    // layer index i here is 1-based like the chain subscript.
    for i in 1..h {
        let need = &w.delta3 * BigRational::from_integer(BigUint::from(n as u64).pow(i as u32).into());
        for code in w.layers[i].codes() {
            let have = w.layers[0].strict_up_codes(code).len() as u64;
            if BigRational::from_integer(have.into()) < need {
                return Err(Error::ConditionFailed {
                    condition: 3,
                    witness: code,
                });
            }
        }
    }

    let embeddings = count_layered_embeddings(w, tree)?;
    let copy_lower_bound = &embeddings / factorial(tree.size() as u64);
    Ok(LayeredBound {
        embeddings,
        copy_lower_bound,
    })
}

/// Rank-layered greedy enumeration: the root ranges over the innermost
/// layer, a non-leaf of rank r over layer h+1-r, and leaves over the
/// outermost layer; every image strictly contains its parent's.
fn count_layered_embeddings(w: &LayeredWitness, tree: &Poset) -> Result<BigUint> {
    let h = w.layers.len();
    let hasse = tree.hasse();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); tree.size()];
    let mut has_parent = vec![false; tree.size()];
    for &(a, b) in &hasse.cover_edges {
        children[a].push(b);
        has_parent[b] = true;
    }
    let root = (0..tree.size()).find(|&v| !has_parent[v]).unwrap();
    let mut rank = vec![0usize; tree.size()];
    rank[root] = 1;
    // Breadth-first ordering embeds parents before children.
    let mut order = vec![root];
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &c in &children[v] {
            rank[c] = rank[v] + 1;
            order.push(c);
        }
    }
    let layer_by_element: Vec<&SetFamily> = (0..tree.size())
        .map(|v| {
            if children[v].is_empty() && v != root {
                &w.layers[0]
            } else {
                &w.layers[h - rank[v]]
            }
        })
        .collect();
    let mut parent_of: Vec<Option<usize>> = vec![None; tree.size()];
    for &(a, b) in &hasse.cover_edges {
        parent_of[b] = Some(a);
    }

    let mut images = vec![0u32; tree.size()];
    let mut count = 0u128;
    let mut nodes = 0u64;
    fn rec(
        order: &[usize],
        idx: usize,
        layer_by_element: &[&SetFamily],
        parent_of: &[Option<usize>],
        images: &mut [u32],
        count: &mut u128,
        nodes: &mut u64,
    ) -> Result<()> {
        *nodes += 1;
        if *nodes > EMBED_NODE_LIMIT {
            return Err(Error::TooLarge {
                what: "layered embedding nodes",
                requested: *nodes,
                limit: EMBED_NODE_LIMIT,
            });
        }
        if idx == order.len() {
            *count += 1;
            return Ok(());
        }
        let v = order[idx];
        let layer = layer_by_element[v];
        let candidates: Vec<u32> = match parent_of[v] {
            None => layer.codes(),
            Some(p) => layer.strict_up_codes(images[p]),
        };
        'cand: for c in candidates {
            for &prev in &order[..idx] {
                if images[prev] == c {
                    continue 'cand;
                }
            }
            images[v] = c;
            rec(order, idx + 1, layer_by_element, parent_of, images, count, nodes)?;
        }
        Ok(())
    }
    rec(
        &order,
        0,
        &layer_by_element,
        &parent_of,
        &mut images,
        &mut count,
        &mut nodes,
    )?;
    Ok(BigUint::from(count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed;
    use crate::family::middle_levels;
    use crate::poset::NamedPoset;

    fn poset(text: &str) -> Poset {
        NamedPoset::parse(text).unwrap().build().unwrap()
    }

    #[test]
    fn single_edge_on_oriented_biclique() {
        // Complete bipartite orientation, 8 + 8 vertices, 64 edges A->B.
        let mut edges = Vec::new();
        for a in 0..8u32 {
            for b in 8..16u32 {
                edges.push((a, b));
            }
        }
        let g = Digraph::new(16, edges).unwrap();
        let t = DirectedTree::new(2, vec![(0, 1)]).unwrap();
        let run = tree_count(&g, &t).unwrap();
        assert!(run.certified_copies >= BigUint::from(32u32));
        assert_eq!(run.exact_copies, Some(BigUint::from(64u32)));
    }

    #[test]
    fn star_on_disjoint_edges() {
        let g = Digraph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let star = DirectedTree::new(3, vec![(0, 1), (0, 2)]).unwrap();
        let run = tree_count(&g, &star).unwrap();
        assert_eq!(run.exact_copies, Some(BigUint::from(0u32)));
        assert!(run.certified_copies <= BigUint::from(0u32));
    }

    #[test]
    fn out_star_count_matches_degree_formula() {
        // Fixed pseudo-random tournament on 20 vertices.
        let mut edges = Vec::new();
        for a in 0..20u32 {
            for b in a + 1..20 {
                if crate::rng::keyed_hash(11, (a as u64) << 8 | b as u64) & 1 == 0 {
                    edges.push((a, b));
                } else {
                    edges.push((b, a));
                }
            }
        }
        let g = Digraph::new(20, edges.clone()).unwrap();
        let star = DirectedTree::new(3, vec![(0, 1), (0, 2)]).unwrap();
        let run = tree_count(&g, &star).unwrap();
        let mut outdeg = vec![0u64; 20];
        for &(a, _) in &edges {
            outdeg[a as usize] += 1;
        }
        let expect: u64 = outdeg.iter().map(|&d| d * d.saturating_sub(1) / 2).sum();
        assert_eq!(run.exact_copies, Some(BigUint::from(expect)));
        assert!(run.certified_copies <= BigUint::from(expect));
        assert_eq!(run.automorphisms, 2);
    }

    #[test]
    fn rejects_directed_two_path() {
        assert!(matches!(
            DirectedTree::new(3, vec![(0, 1), (1, 2)]),
            Err(Error::BadTree(_))
        ));
        assert!(matches!(
            DirectedTree::new(3, vec![(0, 1)]),
            Err(Error::BadTree(_))
        ));
    }

    #[test]
    fn layered_chain_witness() {
        let w = LayeredWitness {
            layers: vec![
                crate::family::level_family(6, &[2, 3, 4]).unwrap(),
                crate::family::level_family(6, &[2, 3]).unwrap(),
                crate::family::level_family(6, &[2]).unwrap(),
            ],
            delta1: BigRational::new(1.into(), 2.into()),
            delta2: BigRational::new(1.into(), 6.into()),
            delta3: BigRational::new(1.into(), 36.into()),
        };
        let chain3 = poset("chain:3");
        let bound = layered_witness_check(&w, &chain3).unwrap();
        let exact = embed::count_copies(&chain3, &w.layers[0], false).copies;
        assert!(bound.copy_lower_bound <= exact);
        assert!(bound.embeddings > BigUint::from(0u32));
    }

    #[test]
    fn layered_condition_failures() {
        let empty_top = LayeredWitness {
            layers: vec![middle_levels(4, 2).unwrap(), SetFamily::empty(4).unwrap()],
            delta1: BigRational::new(1.into(), 2.into()),
            delta2: BigRational::new(1.into(), 4.into()),
            delta3: BigRational::new(1.into(), 4.into()),
        };
        assert_eq!(
            layered_witness_check(&empty_top, &poset("chain:2")),
            Err(Error::ConditionFailed {
                condition: 1,
                witness: 0
            })
        );
    }
}
