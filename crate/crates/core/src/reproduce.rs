//! End-to-end self-check behind `zefc reproduce`.

use std::time::Instant;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::One;
use serde::Serialize;

use crate::bitspace::{self, Alphabet, VectorSet};
use crate::capacity::{self, CapacityQuery, FirstCap, Formula, Target};
use crate::codec::{
    build_identity_code, build_packing_code_11, build_split_code_01, check_admissible, packing_block_uses, ChannelCaps,
    SwitchPair,
};
use crate::coloring;
use crate::error::Result;
use crate::nfc::{self, TargetFunction};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u64,
}

fn timed(id: u32, name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let start = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Check {
        id,
        name,
        passed,
        detail,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

fn log3(x: f64) -> f64 {
    x.ln() / 3f64.ln()
}

fn capacity_forms() -> Result<(bool, String)> {
    let pairs = ["2,1", "3,2", "1,1", "3/2,1/2", "5,2", "7/3,4/5", "1,3", "0.75,0.5"];
    let mut ok = true;
    let mut worst = 0f64;
    let start = Instant::now();
    let mut queries = 0u32;
    for pair in pairs {
        let (a, b) = pair.split_once(',').expect("pair");
        let caps = ChannelCaps::parse(a, b)?;
        let (c1, c2) = (caps.c1_f64(), caps.c2_f64());
        for s in SwitchPair::all() {
            let q = CapacityQuery {
                switches: s,
                c1: FirstCap::Finite(crate::codec::parse_rational(a)?),
                c2: crate::codec::parse_rational(b)?,
                target: Target::ArithmeticSum,
            };
            let r = capacity::capacity(&q)?;
            queries += 1;
            let s = if caps.swapped() { s.mirrored() } else { s };
            let (expect, tag) = match (s.s1, s.s2) {
                (_, false) => (c2, Formula::NarrowChannel),
                (true, true) => ((c1 + c2) * log3(2.0), Formula::PooledChannels),
                (false, true) => ((c1 - c2) * log3(2.0) + c2, Formula::SplitSideInformation),
            };
            worst = worst.max((r.value - expect).abs());
            ok &= r.formula == tag;
        }
    }
    let per_query = start.elapsed().as_secs_f64() * 1e3 / queries as f64;
    let headline = capacity::capacity(&CapacityQuery::sum(SwitchPair::S01, 2, 1))?;
    ok &= worst <= 1e-12 && headline.symbolic == "log3(6)" && per_query < 1.0;
    Ok((
        ok,
        format!(
            "max deviation {worst:.1e}, {per_query:.4} ms/query, (01;2,1) = {}",
            headline.symbolic
        ),
    ))
}

fn split_sandwich() -> Result<(bool, String)> {
    let caps = ChannelCaps::integers(2, 1)?;
    let mut ok = true;
    for k in (0..8).map(|j| 1usize << j) {
        let code = build_split_code_01(k, &caps)?;
        if k <= 8 {
            ok &= check_admissible(&code.tabulate()?)?.is_admissible();
        }
        ok &= code.rate_account(&caps)?.rate_f64() <= log3(6.0) + 1e-12;
    }
    let acct = build_split_code_01(100, &caps)?.rate_account(&caps)?;
    let gap = (log3(6.0) - acct.rate_f64()) / log3(6.0);
    ok &= acct.rate == Ratio::new(100, 62) && (0.0..0.02).contains(&gap);
    Ok((
        ok,
        format!("k=100 rate {}/{} ({:.3}% below log3(6))", acct.k, acct.n, gap * 100.0),
    ))
}

fn coloring_converse() -> Result<(bool, String)> {
    let mut ok = true;
    let mut tables = Vec::new();
    for k in 1..=4 {
        let table = coloring::q_k_table(k)?;
        for q in &table {
            ok &= q.lower >= coloring::sumset_lower_bound(k, q.l);
            if k <= 2 && [1, 2, 1 << k].contains(&q.l) {
                ok &= (q.lower as f64 - (1u64 << k) as f64 * coloring::aitch(q.l)).abs() < 1e-9;
            }
        }
        tables.push(table);
    }
    let mut entries = 0;
    for k in 1..=3 {
        for e in coloring::chi_m_table(k)?.entries {
            let l = (1usize << k).div_ceil(e.m);
            ok &= e.value >= tables[k - 1][l].lower && e.value <= bitspace::pow(3, k);
            entries += 1;
        }
    }
    Ok((ok, format!("Q_k for k<=4 and {entries} chi_m entries for k<=3")))
}

fn aitch_lemma() -> Result<(bool, String)> {
    let r = coloring::verify_aitch_superadditivity(1024)?;
    let ok = r.holds() && r.probe_violation.is_some();
    Ok((
        ok,
        format!(
            "{} splits, {} violations; probe tau={:.5} fails at {:?}",
            r.splits_checked,
            r.violations.len(),
            r.probe_tau,
            r.probe_violation.map(|v| (v.la, v.lb))
        ),
    ))
}

fn sumset_bound() -> Result<(bool, String)> {
    let r = coloring::verify_sumset_lower_bound(4, 0, 0)?;
    let k4 = &r.levels[3];
    let ok = r.holds() && k4.subsets_checked == 1 << 16;
    Ok((
        ok,
        format!(
            "{} subsets at k=4, {} violations",
            k4.subsets_checked,
            k4.violations.len()
        ),
    ))
}

fn nontightness() -> Result<(bool, String)> {
    let caps = ChannelCaps::integers(2, 1)?;
    let r = nfc::nontightness_report(&caps)?;
    let net = nfc::build_network(&caps)?;
    let f = TargetFunction::binary_sum(2);
    let mut classes = Vec::new();
    for ids in [&["e1", "e2"][..], &["e1", "e2", "e3"], &["d1", "d2", "d3", "d4", "e3"]] {
        let c = nfc::classify(&net, net.edge_set(ids)?);
        classes.push(nfc::n_cf(&net, &c, &f)?.0);
    }
    let mut ok = (r.capacity - log3(6.0)).abs() < 1e-9
        && (r.bound_enum - log3(8.0)).abs() < 1e-9
        && r.witness_cut == ["e1", "e2", "e3"]
        && classes == [2, 3, 4]
        && r.gap > 0.0;
    for c1 in 1..=6u64 {
        for c2 in 1..=c1.min(7 - c1) {
            let r = nfc::nontightness_report(&ChannelCaps::integers(c1, c2)?)?;
            ok &= r.bound_agrees && r.gap_matches_caps;
        }
    }
    Ok((ok, format!("gap {:.6}, n_cf classes {:?}", r.gap, classes)))
}

fn mixed_pairs() -> Result<(bool, String)> {
    let mut ok = true;
    let mut values = Vec::new();
    for k in 1..=8 {
        let v = coloring::mixed_min_pair_sumset(k)?.value;
        ok &= v == 3 << (k - 1);
        values.push(v);
    }
    Ok((ok, format!("{values:?}")))
}

fn property_suite() -> Result<(bool, String)> {
    let mut ok = true;
    // Sumset size against the number of distinct sum classes of G(M, L).
    for k in 1..=2usize {
        let n = 1u64 << k;
        for mm in 0u64..1 << n {
            for lm in 0u64..1 << n {
                let m = VectorSet::new(k, Alphabet::Binary, (0..n).filter(|i| mm >> i & 1 == 1))?;
                let l = VectorSet::new(k, Alphabet::Binary, (0..n).filter(|i| lm >> i & 1 == 1))?;
                let mut sums: Vec<String> = Vec::new();
                for x in m.to_strings() {
                    for y in l.to_strings() {
                        sums.push(bitspace::add(&x.parse()?, &y.parse()?)?.to_string());
                    }
                }
                sums.sort();
                sums.dedup();
                let g = coloring::ConflictGraphSpec::new(m, l)?;
                ok &= coloring::chi(&g)? == sums.len() as u64;
            }
        }
    }
    // Network transform round trip.
    for (c1, c2) in [(2, 1), (3, 2), (1, 1)] {
        let caps = ChannelCaps::integers(c1, c2)?;
        for k in 1..=6 {
            for code in [
                build_split_code_01(k, &caps)?.tabulate()?,
                build_identity_code(k)?.tabulate()?,
            ] {
                let net_code = nfc::transform_code(&code, &caps)?;
                let back = nfc::inverse_transform(&net_code)?;
                let n = code.lift(SwitchPair::S01)?.rate_account(&caps)?.n;
                ok &= net_code.check_admissible().is_admissible()
                    && check_admissible(&back)?.is_admissible()
                    && net_code.channel_uses() == n
                    && back.images() == code.lift(SwitchPair::S01)?.images();
            }
        }
    }
    // Packing budget.
    for (c1, c2) in [(1, 1), (2, 1), (3, 2), (5, 3)] {
        let caps = ChannelCaps::integers(c1, c2)?;
        for k in 1..=64usize {
            let n = packing_block_uses(k, &caps);
            let budget = BigUint::one() << (n * (c1 + c2)) as usize;
            let code = build_packing_code_11(k, &caps)?;
            ok &= budget >= BigUint::from(3u32).pow(k as u32) && code.rate_account(&caps)?.n == n;
        }
    }
    Ok((ok, "chromatic agreement, transform round trip, packing budget".into()))
}

/// Run every acceptance check in order.
pub fn run_all() -> Vec<Check> {
    vec![
        timed(1, "capacity closed forms", capacity_forms),
        timed(2, "achievability sandwich", split_sandwich),
        timed(3, "coloring converse oracles", coloring_converse),
        timed(4, "aitch superadditivity", aitch_lemma),
        timed(5, "sumset lower bound", sumset_bound),
        timed(6, "cut-set bound non-tightness", nontightness),
        timed(7, "mixed-alphabet pair sumset", mixed_pairs),
        timed(8, "property suite", property_suite),
    ]
}
