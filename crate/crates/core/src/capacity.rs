//! Compression capacities of the four switch cases and finite-k witnesses.
//!
//! All logarithms are base 2.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::codec::{
    build_identity_code, build_packing_code_11, build_split_code_01, channel_uses, rational_to_f64, ChannelCaps,
    ConstructedCode, RateAccount, Rational, SwitchPair,
};
use crate::error::{Error, Result};

/// Largest block length accepted by [`sandwich_report`].
pub const MAX_SANDWICH_K: usize = 200;

pub fn log2_3() -> f64 {
    3f64.log2()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    ArithmeticSum,
    Identity,
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" | "arithmetic-sum" | "arithmetic_sum" => Ok(Target::ArithmeticSum),
            "identity" => Ok(Target::Identity),
            _ => Err(Error::Parse {
                what: "target function",
                input: s.to_string(),
            }),
        }
    }
}

/// Capacity of the first channel, which may be unlimited.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FirstCap {
    Finite(Rational),
    Unbounded,
}

impl FromStr for FirstCap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "unbounded" => Ok(FirstCap::Unbounded),
            _ => Ok(FirstCap::Finite(crate::codec::parse_rational(s)?)),
        }
    }
}

/// A model `(s1 s2; C1, C2; f)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CapacityQuery {
    pub switches: SwitchPair,
    pub c1: FirstCap,
    pub c2: Rational,
    pub target: Target,
}

/// The query after putting the wider channel first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalizedQuery {
    Finite {
        switches: SwitchPair,
        caps: ChannelCaps,
        target: Target,
    },
    UnboundedFirst {
        c2: Rational,
    },
}

impl CapacityQuery {
    pub fn sum(switches: SwitchPair, c1: u64, c2: u64) -> Self {
        Self {
            switches,
            c1: FirstCap::Finite(Ratio::from_integer(c1)),
            c2: Ratio::from_integer(c2),
            target: Target::ArithmeticSum,
        }
    }

    /// Validate and normalize. When `C1 < C2` the two encoders trade places,
    /// which also mirrors the switch pair.
    pub fn normalize(&self) -> Result<NormalizedQuery> {
        match self.c1 {
            FirstCap::Unbounded => {
                if self.switches != SwitchPair::S00 || self.target != Target::Identity {
                    return Err(Error::Unsupported(
                        "an unbounded first channel is only supported for case 00 with the identity target".into(),
                    ));
                }
                // Validates c2 alone.
                ChannelCaps::new(self.c2, self.c2)?;
                Ok(NormalizedQuery::UnboundedFirst { c2: self.c2 })
            }
            FirstCap::Finite(c1) => {
                let caps = ChannelCaps::new(c1, self.c2)?;
                let switches = if caps.swapped() {
                    self.switches.mirrored()
                } else {
                    self.switches
                };
                if self.target == Target::Identity && switches != SwitchPair::S00 {
                    return Err(Error::Unsupported(format!(
                        "identity target is only supported for case 00, got {switches}"
                    )));
                }
                Ok(NormalizedQuery::Finite {
                    switches,
                    caps,
                    target: self.target,
                })
            }
        }
    }
}

/// Which closed form produced a capacity value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// `C2`: no side information, or only the narrow encoder sees both sources.
    NarrowChannel,
    /// `(C1 + C2) / log2 3`: both encoders see both sources.
    PooledChannels,
    /// `(C1 - C2) log3 2 + C2`: only the wide encoder sees both sources.
    SplitSideInformation,
    /// `C2` for forwarding both sources unchanged.
    IdentityNarrowChannel,
    /// `C2` when the first channel is unlimited.
    UnboundedFirstChannel,
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Formula::NarrowChannel => "c2",
            Formula::PooledChannels => "(c1+c2)/log2(3)",
            Formula::SplitSideInformation => "(c1-c2)*log3(2)+c2",
            Formula::IdentityNarrowChannel => "c2",
            Formula::UnboundedFirstChannel => "c2",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityResult {
    /// Normalized model in `(s1s2;C1,C2;f)` form.
    pub model: String,
    pub value: f64,
    /// Exact value, e.g. `log3(6)`.
    pub symbolic: String,
    pub formula: Formula,
    pub formula_text: String,
}

fn fmt_rational(r: Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `2^a · 3^b` if it fits comfortably in a `u128`.
fn power_product(a: u64, b: u64) -> Option<u128> {
    if a > 100 || b > 60 {
        return None;
    }
    2u128.checked_pow(a as u32)?.checked_mul(3u128.checked_pow(b as u32)?)
}

fn model_string(switches: SwitchPair, c1: &str, c2: &str, target: Target) -> String {
    let f = match target {
        Target::ArithmeticSum => "sum",
        Target::Identity => "identity",
    };
    format!("({switches};{c1},{c2};{f})")
}

/// Closed-form capacity of a model.
pub fn capacity(q: &CapacityQuery) -> Result<CapacityResult> {
    match q.normalize()? {
        NormalizedQuery::UnboundedFirst { c2 } => Ok(CapacityResult {
            model: model_string(SwitchPair::S00, "inf", &fmt_rational(c2), Target::Identity),
            value: rational_to_f64(c2),
            symbolic: fmt_rational(c2),
            formula: Formula::UnboundedFirstChannel,
            formula_text: Formula::UnboundedFirstChannel.to_string(),
        }),
        NormalizedQuery::Finite { switches, caps, target } => {
            let (c1, c2) = (caps.c1(), caps.c2());
            let (value, symbolic, formula) = match (target, switches) {
                (Target::Identity, _) => (caps.c2_f64(), fmt_rational(c2), Formula::IdentityNarrowChannel),
                (_, s) if s == SwitchPair::S00 || s == SwitchPair::S10 => {
                    (caps.c2_f64(), fmt_rational(c2), Formula::NarrowChannel)
                }
                (_, s) if s == SwitchPair::S11 => {
                    let sum = c1 + c2;
                    let symbolic = match sum.is_integer().then(|| power_product(sum.to_integer(), 0)).flatten() {
                        Some(p) => format!("log3({p})"),
                        None => format!("({})/log2(3)", fmt_rational(sum)),
                    };
                    (rational_to_f64(sum) / log2_3(), symbolic, Formula::PooledChannels)
                }
                _ => {
                    let diff = c1 - c2;
                    let symbolic = match (diff.is_integer() && c2.is_integer())
                        .then(|| power_product(diff.to_integer(), c2.to_integer()))
                        .flatten()
                    {
                        Some(p) => format!("log3({p})"),
                        None => format!("({})*log3(2)+{}", fmt_rational(diff), fmt_rational(c2)),
                    };
                    (
                        rational_to_f64(diff) / log2_3() + caps.c2_f64(),
                        symbolic,
                        Formula::SplitSideInformation,
                    )
                }
            };
            Ok(CapacityResult {
                model: model_string(switches, &fmt_rational(c1), &fmt_rational(c2), target),
                value,
                symbolic,
                formula,
                formula_text: formula.to_string(),
            })
        }
    }
}

/// `F_k(t) = max{(k log2 3 + (1 - log2 3) t) / C1, t / C2}`.
pub fn f_k(k: u64, caps: &ChannelCaps, t: f64) -> f64 {
    let l3 = log2_3();
    ((k as f64 * l3 + (1.0 - l3) * t) / caps.c1_f64()).max(t / caps.c2_f64())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FkMin {
    pub k: u64,
    pub t_star: f64,
    pub value: f64,
}

/// Minimum of `F_k` over `t in [0, k]`, attained where the two branches meet.
pub fn f_k_min(k: u64, caps: &ChannelCaps) -> Result<FkMin> {
    if k == 0 {
        return Err(Error::InvalidBlockLength(0));
    }
    let l3 = log2_3();
    let denom = caps.c1_f64() - caps.c2_f64() + caps.c2_f64() * l3;
    Ok(FkMin {
        k,
        t_star: k as f64 * caps.c2_f64() * l3 / denom,
        value: k as f64 * l3 / denom,
    })
}

/// One row of an achievability/converse comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichRow {
    pub k: u64,
    pub n1: u64,
    pub n2: u64,
    pub n: u64,
    /// Achieved rate `k/n` as a reduced fraction.
    pub rate: String,
    pub achieved: f64,
    pub ceiling: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub capacity: CapacityResult,
    pub rows: Vec<SandwichRow>,
}

/// The explicit code used to witness achievability for a normalized model.
pub fn witness_code(q: &NormalizedQuery, k: usize) -> Result<ConstructedCode> {
    match q {
        NormalizedQuery::UnboundedFirst { .. } => build_identity_code(k),
        NormalizedQuery::Finite { switches, caps, target } => match (target, *switches) {
            (Target::Identity, _) | (_, SwitchPair::S00) | (_, SwitchPair::S10) => build_identity_code(k),
            (_, SwitchPair::S11) => build_packing_code_11(k, caps),
            _ => build_split_code_01(k, caps),
        },
    }
}

fn witness_account(q: &NormalizedQuery, k: usize) -> Result<RateAccount> {
    let code = witness_code(q, k)?;
    match q {
        NormalizedQuery::Finite { caps, .. } => code.rate_account(caps),
        NormalizedQuery::UnboundedFirst { c2 } => {
            // The first channel carries any image in zero uses.
            let n2 = channel_uses(&code.image2, *c2);
            Ok(RateAccount {
                k: k as u64,
                n1: 0,
                n2,
                n: n2,
                rate: Ratio::new(k as u64, n2),
            })
        }
    }
}

/// For each `k`, build the matching explicit code and compare its rate with
/// the capacity.
pub fn sandwich_report(q: &CapacityQuery, ks: &[usize]) -> Result<SandwichReport> {
    let cap = capacity(q)?;
    let norm = q.normalize()?;
    if let Some(&bad) = ks.iter().find(|&&k| k == 0 || k > MAX_SANDWICH_K) {
        return Err(Error::OutOfRange(format!("k={bad} outside 1..={MAX_SANDWICH_K}")));
    }
    let rows = ks
        .par_iter()
        .map(|&k| {
            let acct = witness_account(&norm, k)?;
            let achieved = acct.rate_f64();
            Ok(SandwichRow {
                k: acct.k,
                n1: acct.n1,
                n2: acct.n2,
                n: acct.n,
                rate: format!("{}/{}", acct.rate.numer(), acct.rate.denom()),
                achieved,
                ceiling: cap.value,
                gap: cap.value - achieved,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SandwichReport { capacity: cap, rows })
}
