//! Network function computation on the two-encoder network `N(C1, C2)`.
//!
//! Nodes are `σ1, σ2, v1, v2, ρ`. Edge bundles: `C1` edges `σ1 → v1`,
//! `C1` edges `σ2 → v1`, `C1` edges `σ2 → v2` (labelled `d1, d2, ...` in that
//! order), then `C1` edges `v1 → ρ` and `C2` edges `v2 → ρ` (labelled
//! `e1, e2, ...`). Every edge carries one bit per use.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bitspace::{self, BitVector, TernaryVector};
use crate::capacity::{self, CapacityQuery};
use crate::codec::{self, Admissibility, ChannelCaps, KShotCode, SwitchPair, MAX_TABLE_K};
use crate::error::{Error, Result};

/// Largest edge count for listing every cut set.
pub const MAX_LIST_EDGES: usize = 20;
/// Largest edge count for the size-ordered cut-set bound search.
pub const MAX_BOUND_EDGES: usize = 26;

pub const SIGMA1: usize = 0;
pub const SIGMA2: usize = 1;
pub const V1: usize = 2;
pub const V2: usize = 3;
pub const RHO: usize = 4;

const NODE_NAMES: [&str; 5] = ["sigma1", "sigma2", "v1", "v2", "rho"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

/// A directed acyclic network with unit-capacity edges, source nodes and a
/// single sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    sources: Vec<usize>,
    sink: usize,
    caps: (u64, u64),
}

impl Network {
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn caps(&self) -> (u64, u64) {
        self.caps
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Edge indices for a list of edge ids.
    pub fn edge_set(&self, ids: &[&str]) -> Result<EdgeSet> {
        ids.iter().try_fold(0, |acc, id| {
            self.edge_index(id)
                .map(|i| acc | 1 << i)
                .ok_or_else(|| Error::Network(format!("no edge named {id}")))
        })
    }

    pub fn edge_names(&self, set: EdgeSet) -> Vec<String> {
        members(set).map(|i| self.edges[i].id.clone()).collect()
    }

    /// Incoming edges of a node, in id order.
    pub fn in_edges(&self, node: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].head == node).collect()
    }

    pub fn out_edges(&self, node: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].tail == node).collect()
    }

    /// Nodes reachable from `from` using only edges outside `removed`.
    fn reach(&self, from: usize, removed: EdgeSet) -> u32 {
        let mut seen = 1u32 << from;
        loop {
            let mut next = seen;
            for (i, e) in self.edges.iter().enumerate() {
                if removed >> i & 1 == 0 && seen >> e.tail & 1 == 1 {
                    next |= 1 << e.head;
                }
            }
            if next == seen {
                return seen;
            }
            seen = next;
        }
    }

    fn validate(&self) -> Result<()> {
        for e in &self.edges {
            if self.sources.contains(&e.head) {
                return Err(Error::Network(format!(
                    "source {} has an incoming edge",
                    self.nodes[e.head]
                )));
            }
            if e.tail == self.sink {
                return Err(Error::Network("sink has an outgoing edge".into()));
            }
        }
        for u in 0..self.nodes.len() {
            if u != self.sink && self.reach(u, 0) >> self.sink & 1 == 0 {
                return Err(Error::Network(format!("{} does not reach the sink", self.nodes[u])));
            }
            // A cycle through u would make u reachable from one of its successors.
            for &i in &self.out_edges(u) {
                if self.reach(self.edges[i].head, 0) >> u & 1 == 1 {
                    return Err(Error::Network("graph has a directed cycle".into()));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "nodes": self.nodes,
            "edges": self.edges.iter().map(|e| json!({
                "id": e.id,
                "tail": self.nodes[e.tail],
                "head": self.nodes[e.head],
            })).collect::<Vec<_>>(),
        })
    }
}

/// Edge subsets as bitmasks over edge indices.
pub type EdgeSet = u32;
/// Source subsets as bitmasks over source positions.
pub type SourceSet = u8;

fn members(set: EdgeSet) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| set >> i & 1 == 1)
}

/// Build `N(C1, C2)` for integer capacities, wider channel first.
pub fn build_network(caps: &ChannelCaps) -> Result<Network> {
    let (c1, c2) = caps
        .as_integers()
        .ok_or_else(|| Error::InvalidCaps("network edge multiplicities need integer capacities".into()))?;
    if 4 * c1 + c2 > 32 {
        return Err(Error::Refused(format!("N({c1},{c2}) has more than 32 edges")));
    }
    let mut edges = Vec::new();
    for (tail, head) in [(SIGMA1, V1), (SIGMA2, V1), (SIGMA2, V2)] {
        for _ in 0..c1 {
            edges.push(Edge {
                id: format!("d{}", edges.len() + 1),
                tail,
                head,
            });
        }
    }
    let d = edges.len();
    for (tail, count) in [(V1, c1), (V2, c2)] {
        for _ in 0..count {
            edges.push(Edge {
                id: format!("e{}", edges.len() - d + 1),
                tail,
                head: RHO,
            });
        }
    }
    let net = Network {
        nodes: NODE_NAMES.iter().map(|s| s.to_string()).collect(),
        edges,
        sources: vec![SIGMA1, SIGMA2],
        sink: RHO,
        caps: (c1, c2),
    };
    net.validate()?;
    Ok(net)
}

/// A target function on one symbol from each binary source, as a table
/// indexed by the bitmask of source values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetFunction {
    sources: usize,
    table: Vec<u8>,
}

impl TargetFunction {
    /// `f(a_1, ..., a_s) = a_1 + ... + a_s` over the integers.
    pub fn binary_sum(sources: usize) -> Self {
        Self {
            sources,
            table: (0..1u32 << sources).map(|m| m.count_ones() as u8).collect(),
        }
    }

    pub fn from_table(sources: usize, table: Vec<u8>) -> Result<Self> {
        if table.len() != 1 << sources {
            return Err(Error::InvalidCode("function table size must be 2^sources".into()));
        }
        Ok(Self { sources, table })
    }

    fn eval(&self, assignment: u32) -> u8 {
        self.table[assignment as usize]
    }
}

/// Every assignment supported on `set` (submasks, in increasing order).
fn assignments(set: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(0u32);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == set {
            None
        } else {
            Some(((cur | !set).wrapping_add(1)) & set)
        };
        Some(cur)
    })
}

/// Signature identifying the `(I, a_J)`-class of `b_I`: the function values
/// over all assignments of the remaining sources.
fn class_signature(f: &TargetFunction, i: u32, j: u32, a_j: u32, b_i: u32) -> Vec<u8> {
    let all = (1u32 << f.sources) - 1;
    assignments(all & !i & !j).map(|d| f.eval(b_i | a_j | d)).collect()
}

fn count_distinct<T: Ord>(mut v: Vec<T>) -> usize {
    v.sort();
    v.dedup();
    v.len()
}

/// Number of `(I_ℓ, a_L, a_J)`-classes for each block, given the `I_ℓ`.
fn block_class_counts(f: &TargetFunction, i: u32, j: u32, blocks: &[u32], a_j: u32, a_l: u32) -> Vec<usize> {
    blocks
        .iter()
        .enumerate()
        .map(|(l, &il)| {
            let others: u32 = blocks
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != l)
                .map(|(_, &b)| b)
                .fold(0, |a, b| a | b);
            let sigs: Vec<Vec<Vec<u8>>> = assignments(il)
                .map(|b| {
                    assignments(others)
                        .map(|c| class_signature(f, i, j, a_j, b | c | a_l))
                        .collect()
                })
                .collect();
            count_distinct(sigs)
        })
        .collect()
}

/// `n_{C,f}` for a strong partition with source sets `I = I_C`, `J = J_C`
/// and block sets `I_ℓ = I_{C_ℓ}`: the largest number, over `a_J` and
/// `a_L`, of tuples of `(I_ℓ, a_L, a_J)`-classes. Each tuple lands in one
/// `(I, a_J)`-class, so this is the sum over those classes of the tuples
/// mapping into each. With one block this is the number of `(I, a_J)`-classes.
pub fn partition_class_count(f: &TargetFunction, i: SourceSet, j: SourceSet, blocks: &[SourceSet]) -> u64 {
    let (i, j) = (i as u32, j as u32);
    let blocks: Vec<u32> = blocks.iter().map(|&b| b as u32).collect();
    let l = i & !blocks.iter().fold(0, |a, b| a | b);
    assignments(j)
        .flat_map(|a_j| assignments(l).map(move |a_l| (a_j, a_l)))
        .map(|(a_j, a_l)| {
            block_class_counts(f, i, j, &blocks, a_j, a_l)
                .into_iter()
                .map(|c| c as u64)
                .product::<u64>()
        })
        .max()
        .unwrap_or(1)
}

/// `K_C`, `I_C` and `J_C` of an edge subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutClassification {
    pub cut: EdgeSet,
    pub k: SourceSet,
    pub i: SourceSet,
    pub j: SourceSet,
}

impl CutClassification {
    pub fn is_cut(&self) -> bool {
        self.i != 0
    }
}

/// Bitmask of nodes from which each source is reachable, precomputed once.
struct Reach {
    from_source: Vec<u32>,
}

impl Reach {
    fn new(net: &Network) -> Self {
        Self {
            from_source: net.sources.iter().map(|&s| net.reach(s, 0)).collect(),
        }
    }
}

fn classify_with(net: &Network, reach: &Reach, cut: EdgeSet) -> CutClassification {
    let tails: u32 = members(cut).fold(0, |a, e| a | 1 << net.edges[e].tail);
    let mut k = 0;
    let mut i = 0;
    for (p, &s) in net.sources.iter().enumerate() {
        if reach.from_source[p] & tails != 0 {
            k |= 1 << p;
        }
        if net.reach(s, cut) >> net.sink & 1 == 0 {
            i |= 1 << p;
        }
    }
    CutClassification { cut, k, i, j: k & !i }
}

pub fn classify(net: &Network, cut: EdgeSet) -> CutClassification {
    classify_with(net, &Reach::new(net), cut)
}

/// Every cut set (`I_C` nonempty), in increasing bitmask order.
pub fn enumerate_cuts(net: &Network) -> Result<Vec<CutClassification>> {
    let m = net.edges.len();
    if m > MAX_LIST_EDGES {
        return Err(Error::Refused(format!(
            "listing cut sets is limited to {MAX_LIST_EDGES} edges, network has {m}"
        )));
    }
    let reach = Reach::new(net);
    Ok((1u32..1 << m)
        .into_par_iter()
        .map(|c| classify_with(net, &reach, c))
        .filter(CutClassification::is_cut)
        .collect())
}

/// A strong partition of a cut set, blocks as edge sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongPartition {
    pub blocks: Vec<CutClassification>,
}

impl StrongPartition {
    pub fn is_trivial(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Direct check of both defining conditions.
    pub fn satisfies_conditions(&self) -> bool {
        self.blocks.iter().all(|b| b.i != 0)
            && self
                .blocks
                .iter()
                .enumerate()
                .all(|(a, ba)| self.blocks.iter().enumerate().all(|(b, bb)| a == b || ba.i & bb.k == 0))
    }
}

fn strong_partitions_with(net: &Network, reach: &Reach, c: &CutClassification) -> Vec<StrongPartition> {
    let edges: Vec<usize> = members(c.cut).collect();
    // Block I-sets are disjoint nonempty subsets of I_C, bounding the block count.
    let max_blocks = c.i.count_ones() as usize;
    let mut out = Vec::new();
    let mut rgs = Vec::with_capacity(edges.len());
    fn rec(
        rgs: &mut Vec<usize>,
        used: usize,
        edges: &[usize],
        max_blocks: usize,
        visit: &mut impl FnMut(&[usize], usize),
    ) {
        if rgs.len() == edges.len() {
            visit(rgs, used);
            return;
        }
        for b in 0..=used.min(max_blocks - 1) {
            rgs.push(b);
            rec(rgs, used.max(b + 1), edges, max_blocks, visit);
            rgs.pop();
        }
    }
    if max_blocks == 0 || edges.is_empty() {
        return out;
    }
    rec(&mut rgs, 0, &edges, max_blocks, &mut |rgs, used| {
        let mut sets = vec![0u32; used];
        for (pos, &b) in rgs.iter().enumerate() {
            sets[b] |= 1 << edges[pos];
        }
        let p = StrongPartition {
            blocks: sets.into_iter().map(|s| classify_with(net, reach, s)).collect(),
        };
        if p.satisfies_conditions() {
            out.push(p);
        }
    });
    out
}

/// All strong partitions of a cut set; the trivial one comes first.
pub fn strong_partitions(net: &Network, c: &CutClassification) -> Result<Vec<StrongPartition>> {
    if !c.is_cut() {
        return Err(Error::Network("edge set is not a cut set".into()));
    }
    if c.cut.count_ones() as usize > MAX_LIST_EDGES {
        return Err(Error::Refused("cut too large to partition".into()));
    }
    Ok(strong_partitions_with(net, &Reach::new(net), c))
}

fn partition_value(f: &TargetFunction, c: &CutClassification, p: &StrongPartition) -> u64 {
    let blocks: Vec<SourceSet> = p.blocks.iter().map(|b| b.i).collect();
    partition_class_count(f, c.i, c.j, &blocks)
}

/// `n_{C,f}`: the best value over all strong partitions of `C`, with the
/// achieving partition.
pub fn n_cf(net: &Network, c: &CutClassification, f: &TargetFunction) -> Result<(u64, StrongPartition)> {
    let parts = strong_partitions(net, c)?;
    Ok(best_partition(f, c, parts))
}

fn best_partition(f: &TargetFunction, c: &CutClassification, parts: Vec<StrongPartition>) -> (u64, StrongPartition) {
    parts
        .into_iter()
        .map(|p| (partition_value(f, c, &p), p))
        .fold(None, |best: Option<(u64, StrongPartition)>, (v, p)| match best {
            Some((bv, _)) if bv >= v => best,
            _ => Some((v, p)),
        })
        .expect("the trivial partition is always strong")
}

/// Outcome of the cut-set bound search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutBound {
    pub value: f64,
    pub witness: Vec<String>,
    pub witness_size: u32,
    pub n_cf: u64,
}

fn next_combination(v: u32) -> u32 {
    let t = v | (v - 1);
    (t + 1) | (((!t & (!t).wrapping_neg()) - 1) >> (v.trailing_zeros() + 1))
}

/// `min |C| / log2 n_{C,f}` over all cut sets.
///
/// Cut sets are searched by increasing size. Since `n_{C,f} <= 2^s` for
/// `s` binary sources, sizes with `|C| / s` at or above the current best
/// cannot improve it and end the search. Ties keep the smaller, then
/// lexicographically first, witness.
pub fn guang_bound(net: &Network, f: &TargetFunction) -> Result<CutBound> {
    let m = net.edges.len();
    if m > MAX_BOUND_EDGES {
        return Err(Error::Refused(format!(
            "cut-set bound search is limited to {MAX_BOUND_EDGES} edges, network has {m}"
        )));
    }
    let reach = Reach::new(net);
    let max_log = net.sources.len() as f64;
    let mut best: Option<(f64, EdgeSet, u64)> = None;
    for size in 1..=m as u32 {
        if let Some((b, _, _)) = best {
            if size as f64 / max_log >= b - 1e-12 {
                break;
            }
        }
        let mut combos = Vec::new();
        let mut c: u32 = (1 << size) - 1;
        while c < 1 << m {
            combos.push(c);
            c = next_combination(c);
        }
        let bound_now = best.map(|b| b.0);
        let found = combos
            .par_iter()
            .filter_map(|&c| {
                let cls = classify_with(net, &reach, c);
                if !cls.is_cut() {
                    return None;
                }
                // Skip partition search when even the largest n cannot beat the bound.
                let cap = 1u64 << cls.i.count_ones();
                let limit = size as f64 / (cap as f64).log2();
                if bound_now.is_some_and(|b| limit >= b - 1e-12) {
                    return None;
                }
                let (n, _) = best_partition(f, &cls, strong_partitions_with(net, &reach, &cls));
                (n > 1).then(|| (size as f64 / (n as f64).log2(), lex_rank(c), c, n))
            })
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if let Some((v, _, c, n)) = found {
            if best.is_none_or(|(b, _, _)| v < b - 1e-12) {
                best = Some((v, c, n));
            }
        }
    }
    let (value, cut, n) = best.ok_or_else(|| Error::Network("network has no cut set".into()))?;
    Ok(CutBound {
        value,
        witness: net.edge_names(cut),
        witness_size: cut.count_ones(),
        n_cf: n,
    })
}

/// Sort key making same-size edge sets compare by their sorted index lists.
fn lex_rank(c: EdgeSet) -> u32 {
    c.reverse_bits()
}

/// Closed form of the cut-set bound on `N(C1, C2)` with `C1 >= C2`.
pub fn guang_closed_form(caps: &ChannelCaps) -> f64 {
    let (c1, c2) = (caps.c1_f64(), caps.c2_f64());
    let l3 = capacity::log2_3();
    if c1 <= c2 / (l3 - 1.0) {
        c1
    } else {
        (c1 + c2) / l3
    }
}

/// Capacity of `N(C1, C2)` against the cut-set bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NontightnessReport {
    pub c1: u64,
    pub c2: u64,
    pub capacity: f64,
    pub capacity_symbolic: String,
    pub bound_enum: f64,
    pub bound_formula: f64,
    pub witness_cut: Vec<String>,
    pub gap: f64,
    /// Enumerated bound equals the closed form.
    pub bound_agrees: bool,
    /// The gap is positive exactly when `C1 > C2`.
    pub gap_matches_caps: bool,
}

pub fn nontightness_report(caps: &ChannelCaps) -> Result<NontightnessReport> {
    let net = build_network(caps)?;
    let (c1, c2) = net.caps();
    let cap = capacity::capacity(&CapacityQuery::sum(SwitchPair::S01, c1, c2))?;
    let bound = guang_bound(&net, &TargetFunction::binary_sum(2))?;
    let formula = guang_closed_form(caps);
    let gap = bound.value - cap.value;
    Ok(NontightnessReport {
        c1,
        c2,
        capacity: cap.value,
        capacity_symbolic: cap.symbolic,
        bound_enum: bound.value,
        bound_formula: formula,
        witness_cut: bound.witness,
        gap,
        bound_agrees: (bound.value - formula).abs() < 1e-9,
        gap_matches_caps: (gap > 1e-9) == (c1 > c2),
    })
}

/// A k-shot network code on `N(C1, C2)`: one local encoding table per edge
/// and a decoder at the sink.
///
/// Local tables are keyed by the tail's input: `[x]` or `[y]` (packed) at a
/// source, otherwise the labels on the tail's incoming edges in id order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KShotNetworkCode {
    k: usize,
    net: Network,
    local: Vec<HashMap<Vec<u32>, u32>>,
    decoder: BTreeMap<Vec<u32>, TernaryVector>,
}

/// Split a label below `size` into `c` mixed-radix digits with radices as
/// equal as possible; the larger radices are the low digits.
pub fn balanced_radices(size: u64, c: usize) -> Vec<u64> {
    let mut r = 1u64;
    while (r as u128).pow(c as u32) < size as u128 {
        r += 1;
    }
    let mut radices = vec![r; c];
    // Shrink high digits while the product still covers the label range.
    for i in (0..c).rev() {
        if r > 1 {
            radices[i] = r - 1;
            if radices.iter().map(|&x| x as u128).product::<u128>() < size as u128 {
                radices[i] = r;
                break;
            }
        }
    }
    radices
}

fn to_digits(mut v: u64, radices: &[u64]) -> Vec<u32> {
    radices
        .iter()
        .map(|&r| {
            let d = v % r;
            v /= r;
            d as u32
        })
        .collect()
}

fn from_digits(digits: &[u32], radices: &[u64]) -> u64 {
    digits
        .iter()
        .zip(radices)
        .rev()
        .fold(0, |acc, (&d, &r)| acc * r + d as u64)
}

fn chunk(v: u32, width: usize, idx: usize) -> u32 {
    (v >> (idx * width)) & ((1u32 << width) - 1)
}

impl KShotNetworkCode {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    /// Labels on every edge for the source pair `(x, y)`, by edge index.
    pub fn global(&self, x: u32, y: u32) -> Vec<u32> {
        let mut labels = vec![0u32; self.net.edges.len()];
        // Edge indices are already in topological order: d-edges, then e-edges.
        for (i, e) in self.net.edges.iter().enumerate() {
            let key = match e.tail {
                SIGMA1 => vec![x],
                SIGMA2 => vec![y],
                t => self.net.in_edges(t).iter().map(|&j| labels[j]).collect(),
            };
            labels[i] = self.local[i].get(&key).copied().unwrap_or(0);
        }
        labels
    }

    pub fn decode(&self, labels: &[u32]) -> TernaryVector {
        let key: Vec<u32> = self.net.in_edges(RHO).iter().map(|&i| labels[i]).collect();
        self.decoder
            .get(&key)
            .copied()
            .unwrap_or_else(|| TernaryVector::new(self.k, 0).expect("valid k"))
    }

    /// Sizes of the images of the global encoding functions, by edge index.
    pub fn global_image_sizes(&self) -> Vec<usize> {
        let size = 1u32 << self.k;
        let mut seen: Vec<std::collections::HashSet<u32>> = vec![Default::default(); self.net.edges.len()];
        for x in 0..size {
            for y in 0..size {
                for (i, l) in self.global(x, y).into_iter().enumerate() {
                    seen[i].insert(l);
                }
            }
        }
        seen.into_iter().map(|s| s.len()).collect()
    }

    /// `n = max_e ⌈log2 |Im θ_e|⌉`.
    pub fn channel_uses(&self) -> u64 {
        self.global_image_sizes()
            .into_iter()
            .map(|m| codec::ceil_log2(&(m as u64).into()))
            .max()
            .unwrap_or(0)
    }

    pub fn check_admissible(&self) -> Admissibility {
        let k = self.k;
        let size = 1u64 << k;
        let eval = |p: u64| {
            let (x, y) = ((p >> k) as u32, (p & (size - 1)) as u32);
            let got = self.decode(&self.global(x, y));
            let want = bitspace::add(
                &BitVector::new(k, x).expect("in range"),
                &BitVector::new(k, y).expect("in range"),
            )
            .expect("same length");
            (x, y, got, want)
        };
        match (0..size * size).into_par_iter().find_first(|&p| {
            let (_, _, got, want) = eval(p);
            got != want
        }) {
            None => Admissibility::Admissible,
            Some(p) => {
                let (x, y, decoded, expected) = eval(p);
                Admissibility::Counterexample {
                    x: BitVector::new(k, x).expect("in range"),
                    y: BitVector::new(k, y).expect("in range"),
                    decoded,
                    expected,
                }
            }
        }
    }
}

/// Turn a code for `(01; C1, C2)` into a network code on `N(C1, C2)`.
///
/// Each bundle of `C1` source edges carries the source word in chunks of
/// `⌈k / C1⌉` bits. Node `v1` forwards `φ1` split across its `C1` outgoing
/// edges as balanced mixed-radix digits, and `v2` does the same for `φ2`.
pub fn transform_code(code: &KShotCode, caps: &ChannelCaps) -> Result<KShotNetworkCode> {
    let code = if code.switches() == SwitchPair::S01 {
        code.clone()
    } else {
        code.lift(SwitchPair::S01)?
    };
    let net = build_network(caps)?;
    let (c1, c2) = net.caps();
    let (c1, c2) = (c1 as usize, c2 as usize);
    let k = code.k();
    let acct = code.rate_account(caps)?;
    let (m1, m2) = code.images();
    for (m, c, n, which) in [(m1, c1, acct.n, 1), (m2, c2, acct.n, 2)] {
        if (m as u128) > 1u128 << (n as usize * c).min(127) {
            return Err(Error::InvalidCode(format!(
                "encoder {which} image {m} exceeds its channel budget"
            )));
        }
    }
    let r1 = balanced_radices(m1 as u64, c1);
    let r2 = balanced_radices(m2 as u64, c2);
    let width = k.div_ceil(c1);
    let size = 1u32 << k;

    let mut local: Vec<HashMap<Vec<u32>, u32>> = vec![HashMap::new(); net.edges.len()];
    for v in 0..size {
        for b in 0..c1 {
            let label = chunk(v, width, b);
            local[b].insert(vec![v], label);
            local[c1 + b].insert(vec![v], label);
            local[2 * c1 + b].insert(vec![v], label);
        }
    }
    let e0 = 3 * c1;
    let mut decoder = BTreeMap::new();
    for x in 0..size {
        for y in 0..size {
            let (l1, l2) = code.encode(&BitVector::new(k, x)?, &BitVector::new(k, y)?);
            let key_v1: Vec<u32> = (0..c1)
                .map(|b| chunk(x, width, b))
                .chain((0..c1).map(|b| chunk(y, width, b)))
                .collect();
            let key_v2: Vec<u32> = (0..c1).map(|b| chunk(y, width, b)).collect();
            let d1 = to_digits(l1 as u64, &r1);
            let d2 = to_digits(l2 as u64, &r2);
            for (j, &d) in d1.iter().enumerate() {
                local[e0 + j].insert(key_v1.clone(), d);
            }
            for (j, &d) in d2.iter().enumerate() {
                local[e0 + c1 + j].insert(key_v2.clone(), d);
            }
            decoder.insert([d1, d2].concat(), code.decode(l1, l2));
        }
    }
    Ok(KShotNetworkCode { k, net, local, decoder })
}

/// Read a network code back as a `(01; C1, C2)` code: `φ1` is the tuple of
/// labels on `v1`'s outgoing edges, `φ2` the tuple on `v2`'s.
pub fn inverse_transform(code: &KShotNetworkCode) -> Result<KShotCode> {
    let k = code.k;
    if k > MAX_TABLE_K {
        return Err(Error::Refused(format!(
            "explicit code tables are limited to k<={MAX_TABLE_K}"
        )));
    }
    let out1 = code.net.out_edges(V1);
    let out2 = code.net.out_edges(V2);
    let pick = |labels: &[u32], edges: &[usize]| edges.iter().map(|&i| labels[i]).collect::<Vec<u32>>();
    KShotCode::tabulate(
        k,
        SwitchPair::S01,
        |x, y| pick(&code.global(x, y), &out1),
        |_, y| pick(&code.global(0, y), &out2),
        |t1: Vec<u32>, t2: Vec<u32>| {
            let mut labels = vec![0u32; code.net.edges.len()];
            for (&i, &l) in out1.iter().zip(&t1).chain(out2.iter().zip(&t2)) {
                labels[i] = l;
            }
            code.decode(&labels)
        },
    )
}

/// Merge digit lists back into a label (exposed for tests of the split).
pub fn join_label(digits: &[u32], radices: &[u64]) -> u64 {
    from_digits(digits, radices)
}
