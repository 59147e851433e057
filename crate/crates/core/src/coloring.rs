//! Conflict-graph quantities for the binary arithmetic sum.
//!
//! The conflict graph `G(M, L)` joins `(x, y)` and `(x', y')` when
//! `x + y != x' + y'`. It is complete multipartite over sum values, so its
//! chromatic number is `|M + L|` and it is never materialized here.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitspace::{self, pow, respread, Alphabet, BitVector, VectorSet};
use crate::error::{Error, Result};

/// Exact `Q_k` enumerates every subset of `A^k`, so `k` stays small.
pub const MAX_EXACT_QK: usize = 4;
/// Largest `k` accepted by the bracketing mode of `Q_k`.
pub const MAX_BRACKET_QK: usize = 20;
/// Exact `χ_m` enumerates set partitions of `A^k`.
pub const MAX_CHI_M_K: usize = 3;
pub const MAX_PAIR_K: usize = 8;
pub const MAX_SAMPLED_K: usize = 12;
pub const MAX_AITCH_LMAX: u64 = 1 << 14;
pub const TOLERANCE: f64 = 1e-9;

/// Exponent of the aitch function, `log2 3 - 1`.
pub fn aitch_exponent() -> f64 {
    3f64.log2() - 1.0
}

/// `h(ℓ) = ℓ^(log2 3 - 1)` with `h(0) = 0`. Powers of two are evaluated as
/// `(3/2)^j`, which is exact in binary floating point for small `j`.
pub fn aitch(l: u64) -> f64 {
    if l == 0 {
        return 0.0;
    }
    if l.is_power_of_two() {
        return 1.5f64.powi(l.trailing_zeros() as i32);
    }
    (l as f64).powf(aitch_exponent())
}

/// `h_τ(ℓ) = ℓ^τ` with `h_τ(0) = 0`.
pub fn aitch_tau(tau: f64, l: u64) -> f64 {
    if l == 0 {
        0.0
    } else {
        (l as f64).powf(tau)
    }
}

/// Integer lower bound `⌈2^k h(ℓ)⌉` on `|A^k + L|` for `|L| = ℓ`.
pub fn sumset_lower_bound(k: usize, l: u64) -> u64 {
    ((1u64 << k) as f64 * aitch(l) - TOLERANCE).ceil().max(0.0) as u64
}

/// The sets defining a conflict graph `G(M, L)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictGraphSpec {
    m: VectorSet,
    l: VectorSet,
}

impl ConflictGraphSpec {
    pub fn new(m: VectorSet, l: VectorSet) -> Result<Self> {
        if m.k() != l.k() {
            return Err(Error::LengthMismatch {
                left: m.k(),
                right: l.k(),
            });
        }
        for s in [&m, &l] {
            if s.alphabet() != Alphabet::Binary {
                return Err(Error::AlphabetMismatch(
                    "conflict graphs are defined on binary vectors".into(),
                ));
            }
        }
        Ok(Self { m, l })
    }

    /// `G(L)`, the case `M = A^k`.
    pub fn full(l: VectorSet) -> Result<Self> {
        Self::new(VectorSet::full_binary(l.k())?, l)
    }

    pub fn m(&self) -> &VectorSet {
        &self.m
    }

    pub fn l(&self) -> &VectorSet {
        &self.l
    }
}

/// Minimum chromatic number of `G(M, L)`, which is `|M + L|`.
pub fn chi(spec: &ConflictGraphSpec) -> Result<u64> {
    Ok(bitspace::sumset(&spec.m, &spec.l)?.len() as u64)
}

/// Packed binary vector whose canonical string has lexicographic rank `r`.
fn binary_at_rank(k: usize, r: u64) -> u64 {
    (0..k).fold(0, |acc, i| acc | ((r >> (k - 1 - i)) & 1) << i)
}

fn ternary_at_rank(k: usize, mut r: u64) -> u64 {
    let mut out = 0;
    let mut place = pow(3, k - 1);
    for _ in 0..k {
        out += (r % 3) * place;
        r /= 3;
        place /= 3;
    }
    out
}

/// Bitmask over `{0,1,2}^k` (k <= 4, so 81 bits) of `A^k + {y}` for each `y`.
fn translate_masks(k: usize) -> Vec<u128> {
    let size = 1u64 << k;
    (0..size)
        .map(|y| {
            let ys = respread(y, 2, 3, k);
            (0..size).fold(0u128, |m, x| m | 1u128 << (respread(x, 2, 3, k) + ys))
        })
        .collect()
}

/// `|A^k + L|` for every subset `L` of `A^k` given as a bitmask over ranks
/// (bit `r` set means the vector of lexicographic rank `r` is in `L`).
fn all_subset_sumsets(k: usize) -> Vec<u8> {
    let size = 1usize << k;
    let masks = translate_masks(k);
    let by_rank: Vec<u128> = (0..size as u64).map(|r| masks[binary_at_rank(k, r) as usize]).collect();
    let mut acc = vec![0u128; 1 << size];
    let mut out = vec![0u8; 1 << size];
    for s in 1usize..1 << size {
        let low = s.trailing_zeros() as usize;
        acc[s] = acc[s & (s - 1)] | by_rank[low];
        out[s] = acc[s].count_ones() as u8;
    }
    out
}

fn rank_mask_to_set(k: usize, mask: u64) -> Result<VectorSet> {
    VectorSet::new(
        k,
        Alphabet::Binary,
        (0..1u64 << k)
            .filter(|r| mask >> r & 1 == 1)
            .map(|r| binary_at_rank(k, r)),
    )
}

/// Rank masks ordered so that comparing them compares the sorted member
/// lists lexicographically.
fn lex_key(mask: u64, size: usize) -> Vec<u32> {
    (0..size as u32).filter(|r| mask >> r & 1 == 1).collect()
}

/// Result of a `Q_k(ℓ)` query.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QkResult {
    pub k: usize,
    pub l: u64,
    pub exact: bool,
    pub lower: u64,
    pub upper: u64,
    /// Minimizing subset in exact mode; `None` in bracket mode, where `upper`
    /// comes from the prefix subset of the first `ℓ` packed vectors.
    pub witness: Option<Vec<String>>,
}

impl QkResult {
    pub fn value(&self) -> Option<u64> {
        self.exact.then_some(self.lower)
    }
}

/// `Q_k(ℓ) = min |A^k + L|` over `L ⊆ A^k` with `|L| = ℓ`, for all `ℓ`.
/// Witnesses are the lexicographically least minimizers.
pub fn q_k_table(k: usize) -> Result<Vec<QkResult>> {
    bitspace::check_k(k)?;
    if k > MAX_EXACT_QK {
        return Err(Error::Refused(format!(
            "exact mode limited to k<={MAX_EXACT_QK}; use --bracket"
        )));
    }
    let size = 1usize << k;
    let sums = all_subset_sumsets(k);
    let mut best: Vec<Option<(u8, u64)>> = vec![None; size + 1];
    for (s, &v) in sums.iter().enumerate() {
        let l = (s as u64).count_ones() as usize;
        let s = s as u64;
        let better = match best[l] {
            None => true,
            Some((bv, bs)) => v < bv || (v == bv && lex_key(s, size) < lex_key(bs, size)),
        };
        if better {
            best[l] = Some((v, s));
        }
    }
    best.into_iter()
        .enumerate()
        .map(|(l, b)| {
            let (v, s) = b.expect("every size occurs");
            Ok(QkResult {
                k,
                l: l as u64,
                exact: true,
                lower: v as u64,
                upper: v as u64,
                witness: Some(rank_mask_to_set(k, s)?.to_strings()),
            })
        })
        .collect()
}

fn check_l(k: usize, l: u64) -> Result<()> {
    if l > 1u64 << k {
        return Err(Error::OutOfRange(format!("l={l} outside 0..=2^{k}")));
    }
    Ok(())
}

/// Exact `Q_k(ℓ)` for `k <= 4`.
pub fn q_k(k: usize, l: u64) -> Result<QkResult> {
    bitspace::check_k(k)?;
    check_l(k, l)?;
    Ok(q_k_table(k)?.swap_remove(l as usize))
}

/// `|A^k + P|` for the prefix subset `P` of the first `ℓ` packed vectors.
pub fn prefix_sumset_size(k: usize, l: u64) -> u64 {
    if k == 0 {
        return l.min(1);
    }
    let half = 1u64 << (k - 1);
    if l <= half {
        2 * prefix_sumset_size(k - 1, l)
    } else {
        2 * pow(3, k - 1) + prefix_sumset_size(k - 1, l - half)
    }
}

/// Bracket `lower <= Q_k(ℓ) <= upper` from the aitch bound and the prefix
/// subset. Marked exact only when the two coincide.
pub fn q_k_bracket(k: usize, l: u64) -> Result<QkResult> {
    if k == 0 || k > MAX_BRACKET_QK {
        return Err(Error::InvalidBlockLength(k));
    }
    check_l(k, l)?;
    let lower = sumset_lower_bound(k, l);
    let upper = prefix_sumset_size(k, l);
    Ok(QkResult {
        k,
        l,
        exact: lower == upper,
        lower,
        upper,
        witness: None,
    })
}

/// One entry of a `χ_m` table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChiEntry {
    pub m: usize,
    pub value: u64,
    /// Achieving partition, blocks as canonical strings.
    pub witness: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChiTable {
    pub k: usize,
    pub entries: Vec<ChiEntry>,
}

/// Calls `visit` with each restricted-growth string of length `n` having
/// exactly `m` distinct values, in lexicographic order.
fn for_each_rgs(n: usize, m: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(a: &mut Vec<usize>, n: usize, m: usize, used: usize, visit: &mut impl FnMut(&[usize])) {
        let i = a.len();
        if i == n {
            if used == m {
                visit(a);
            }
            return;
        }
        // Not enough positions left to open the remaining blocks.
        if m - used > n - i {
            return;
        }
        for b in 0..=used.min(m - 1) {
            a.push(b);
            rec(a, n, m, used.max(b + 1), visit);
            a.pop();
        }
    }
    if m >= 1 && m <= n {
        rec(&mut Vec::with_capacity(n), n, m, 0, visit);
    }
}

/// `χ_m = min over partitions of A^k into m blocks of max |A^k + P_i|`,
/// for every `m` in `1..=2^k`. Elements are taken in lexicographic order of
/// their canonical strings.
pub fn chi_m_table(k: usize) -> Result<ChiTable> {
    bitspace::check_k(k)?;
    if k > MAX_CHI_M_K {
        return Err(Error::Refused(format!("exact chi_m limited to k<={MAX_CHI_M_K}")));
    }
    let size = 1usize << k;
    let sums = all_subset_sumsets(k);
    let entries = (1..=size)
        .into_par_iter()
        .map(|m| {
            let mut best: Option<(u8, Vec<usize>)> = None;
            let mut blocks = vec![0usize; m];
            for_each_rgs(size, m, &mut |rgs| {
                blocks.iter_mut().for_each(|b| *b = 0);
                for (r, &b) in rgs.iter().enumerate() {
                    blocks[b] |= 1 << r;
                }
                let v = blocks.iter().map(|&b| sums[b]).max().unwrap_or(0);
                if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                    best = Some((v, rgs.to_vec()));
                }
            });
            let (v, rgs) = best.expect("m <= 2^k admits a partition");
            let mut witness = vec![0u64; m];
            for (r, &b) in rgs.iter().enumerate() {
                witness[b] |= 1 << r;
            }
            let witness = witness
                .into_iter()
                .map(|mask| rank_mask_to_set(k, mask).map(|s| s.to_strings()))
                .collect::<Result<Vec<_>>>()?;
            Ok(ChiEntry {
                m,
                value: v as u64,
                witness,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChiTable { k, entries })
}

pub fn chi_m(k: usize, m: usize) -> Result<ChiEntry> {
    bitspace::check_k(k)?;
    if m == 0 || m > 1 << k {
        return Err(Error::OutOfRange(format!("m={m} outside 1..=2^{k}")));
    }
    Ok(chi_m_table(k)?.entries.swap_remove(m - 1))
}

/// A failed instance of `2 h(ℓa) + h(ℓb) >= 2 h(ℓa + ℓb)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitViolation {
    pub l: u64,
    pub la: u64,
    pub lb: u64,
    /// Left side minus right side.
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AitchReport {
    pub lmax: u64,
    pub splits_checked: u64,
    /// Splits where the inequality holds with equality (within tolerance).
    pub binding: u64,
    pub violations: Vec<SplitViolation>,
    pub probe_tau: f64,
    /// First violating split for `h_τ` at `probe_tau`, if any.
    pub probe_violation: Option<SplitViolation>,
}

impl AitchReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn first_split_violation(lmax: u64, h: impl Fn(u64) -> f64 + Sync) -> (u64, u64, Vec<SplitViolation>) {
    let per_l: Vec<(u64, u64, Vec<SplitViolation>)> = (1..=lmax)
        .into_par_iter()
        .map(|l| {
            let mut checked = 0;
            let mut binding = 0;
            let mut bad = Vec::new();
            let rhs = 2.0 * h(l);
            for la in l.div_ceil(2)..=l {
                let lb = l - la;
                let slack = 2.0 * h(la) + h(lb) - rhs;
                checked += 1;
                if slack < -TOLERANCE {
                    bad.push(SplitViolation { l, la, lb, slack });
                } else if slack <= TOLERANCE {
                    binding += 1;
                }
            }
            (checked, binding, bad)
        })
        .collect();
    per_l
        .into_iter()
        .fold((0, 0, Vec::new()), |(c, b, mut v), (c2, b2, v2)| {
            v.extend(v2);
            (c + c2, b + b2, v)
        })
}

/// Check the aitch superadditivity inequality for every `ℓ <= lmax` and
/// every split `ℓ = ℓa + ℓb` with `ℓa >= ℓb`, then probe `h_τ` with
/// `τ = log2 3 - 1 + 0.01`, which should fail somewhere.
pub fn verify_aitch_superadditivity(lmax: u64) -> Result<AitchReport> {
    if lmax == 0 || lmax > MAX_AITCH_LMAX {
        return Err(Error::OutOfRange(format!("lmax={lmax} outside 1..={MAX_AITCH_LMAX}")));
    }
    let (splits_checked, binding, violations) = first_split_violation(lmax, aitch);
    let probe_tau = aitch_exponent() + 0.01;
    let (_, _, probe) = first_split_violation(lmax, |l| aitch_tau(probe_tau, l));
    Ok(AitchReport {
        lmax,
        splits_checked,
        binding,
        violations,
        probe_tau,
        probe_violation: probe.into_iter().next(),
    })
}

/// Per-`k` outcome of the sumset lower-bound check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumsetBoundLevel {
    pub k: usize,
    pub exhaustive: bool,
    pub subsets_checked: u64,
    /// Subsets with `|A^k + L| < ⌈2^k h(|L|)⌉`.
    pub violations: Vec<Vec<String>>,
    /// Nonempty subsets meeting the bound with equality. Equality is only
    /// possible when `|L|` is a power of two, where `2^k h(|L|)` is an integer.
    pub equality: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumsetBoundReport {
    pub levels: Vec<SumsetBoundLevel>,
}

impl SumsetBoundReport {
    pub fn holds(&self) -> bool {
        self.levels.iter().all(|l| l.violations.is_empty())
    }
}

fn exact_bound(k: usize, l: u64) -> Option<u64> {
    l.is_power_of_two().then(|| {
        let j = l.trailing_zeros() as usize;
        pow(3, j) << (k - j)
    })
}

/// Confirm `|A^k + L| >= 2^k h(|L|)`: exhaustively for `k <= 4`, and on
/// `samples` seeded random subsets per `k` above that.
pub fn verify_sumset_lower_bound(kmax: usize, samples: u64, seed: u64) -> Result<SumsetBoundReport> {
    if kmax == 0 || kmax > MAX_SAMPLED_K {
        return Err(Error::OutOfRange(format!("kmax={kmax} outside 1..={MAX_SAMPLED_K}")));
    }
    let mut levels = Vec::new();
    for k in 1..=kmax.min(MAX_EXACT_QK) {
        let size = 1usize << k;
        let sums = all_subset_sumsets(k);
        let mut level = SumsetBoundLevel {
            k,
            exhaustive: true,
            subsets_checked: sums.len() as u64,
            violations: Vec::new(),
            equality: Vec::new(),
        };
        for s in 0u64..1 << size {
            let l = s.count_ones() as u64;
            let v = sums[s as usize] as u64;
            if v < sumset_lower_bound(k, l) {
                level.violations.push(rank_mask_to_set(k, s)?.to_strings());
            } else if exact_bound(k, l) == Some(v) {
                level.equality.push(rank_mask_to_set(k, s)?.to_strings());
            }
        }
        level.equality.sort();
        levels.push(level);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in MAX_EXACT_QK + 1..=kmax {
        let size = 1usize << k;
        let full = VectorSet::full_binary(k)?;
        let mut level = SumsetBoundLevel {
            k,
            exhaustive: false,
            subsets_checked: samples,
            violations: Vec::new(),
            equality: Vec::new(),
        };
        for _ in 0..samples {
            let l = rng.gen_range(1..=size);
            let picked = index::sample(&mut rng, size, l);
            let set = VectorSet::new(k, Alphabet::Binary, picked.into_iter().map(|i| i as u64))?;
            let v = bitspace::sumset(&full, &set)?.len() as u64;
            if v < sumset_lower_bound(k, l as u64) {
                level.violations.push(set.to_strings());
            } else if exact_bound(k, l as u64) == Some(v) {
                level.equality.push(set.to_strings());
            }
        }
        level.equality.sort();
        level.equality.dedup();
        levels.push(level);
    }
    Ok(SumsetBoundReport { levels })
}

/// Result of the mixed-alphabet pair search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairSumset {
    pub k: usize,
    pub value: u64,
    pub witness: [String; 2],
}

/// `|A^k + {y1, y2}|` for ternary `y1, y2` given as packed indices.
pub fn pair_sumset_size(k: usize, y1: u64, y2: u64) -> u64 {
    let (mut a, mut b) = (y1, y2);
    let mut overlap = 1u64;
    for _ in 0..k {
        overlap *= match (a % 3).abs_diff(b % 3) {
            0 => 2,
            1 => 1,
            _ => 0,
        };
        a /= 3;
        b /= 3;
    }
    (2u64 << k) - overlap
}

/// Minimum of `|A^k + {y1, y2}|` over distinct ternary `y1, y2`; the witness
/// is the lexicographically first minimizing pair.
pub fn mixed_min_pair_sumset(k: usize) -> Result<PairSumset> {
    bitspace::check_k(k)?;
    if k > MAX_PAIR_K {
        return Err(Error::Refused(format!("pair enumeration limited to k<={MAX_PAIR_K}")));
    }
    let n = pow(3, k);
    let (value, r1, r2) = (0..n)
        .into_par_iter()
        .filter_map(|r1| {
            let y1 = ternary_at_rank(k, r1);
            (r1 + 1..n)
                .map(|r2| (pair_sumset_size(k, y1, ternary_at_rank(k, r2)), r1, r2))
                .min()
        })
        .min()
        .ok_or_else(|| Error::OutOfRange("no distinct pairs".into()))?;
    let word = |r| bitspace::TernaryVector::new(k, ternary_at_rank(k, r)).map(|v| v.to_string());
    Ok(PairSumset {
        k,
        value,
        witness: [word(r1)?, word(r2)?],
    })
}

/// Packed binary vectors in lexicographic order of their canonical strings.
pub fn binary_lex_order(k: usize) -> Result<Vec<BitVector>> {
    bitspace::check_k(k)?;
    (0..1u64 << k)
        .map(|r| BitVector::new(k, binary_at_rank(k, r) as u32))
        .collect()
}
