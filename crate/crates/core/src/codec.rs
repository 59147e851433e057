//! k-shot function-compression codes.
//!
//! A [`KShotCode`] is an explicit table form: both encoders and the decoder
//! are stored as lookup tables, so it is only built for small `k`. The
//! explicit constructions ([`build_identity_code`], [`build_packing_code_11`],
//! [`build_split_code_01`]) are returned as [`ConstructedCode`], which knows
//! its image sizes in closed form for any `k` and can be tabulated on demand.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bitspace::{self, check_k, BitVector, TernaryVector, VectorSet};
use crate::error::{Error, Result};

/// Exhaustive admissibility checks and tabulation stop here (`4^10` pairs).
pub const MAX_TABLE_K: usize = 10;

/// Largest accepted denominator of a rational channel capacity.
pub const MAX_CAP_DENOMINATOR: u64 = 64;

pub type Rational = Ratio<u64>;

/// Which encoder observes which sources. Encoder 1 always observes `X` and
/// additionally `Y` when `s2 = 1`; encoder 2 always observes `Y` and
/// additionally `X` when `s1 = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SwitchPair {
    pub s1: bool,
    pub s2: bool,
}

impl SwitchPair {
    pub const S00: SwitchPair = SwitchPair { s1: false, s2: false };
    pub const S01: SwitchPair = SwitchPair { s1: false, s2: true };
    pub const S10: SwitchPair = SwitchPair { s1: true, s2: false };
    pub const S11: SwitchPair = SwitchPair { s1: true, s2: true };

    pub fn all() -> [SwitchPair; 4] {
        [Self::S00, Self::S01, Self::S10, Self::S11]
    }

    pub fn encoder1_sees_y(self) -> bool {
        self.s2
    }

    pub fn encoder2_sees_x(self) -> bool {
        self.s1
    }

    /// Roles after exchanging the two sources and the two encoders.
    pub fn mirrored(self) -> SwitchPair {
        SwitchPair {
            s1: self.s2,
            s2: self.s1,
        }
    }

    /// True if every source seen under `self` is also seen under `other`.
    pub fn is_covered_by(self, other: SwitchPair) -> bool {
        (!self.s1 || other.s1) && (!self.s2 || other.s2)
    }
}

impl fmt::Display for SwitchPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.s1 as u8, self.s2 as u8)
    }
}

impl FromStr for SwitchPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "00" => Ok(Self::S00),
            "01" => Ok(Self::S01),
            "10" => Ok(Self::S10),
            "11" => Ok(Self::S11),
            _ => Err(Error::Parse {
                what: "switch pair",
                input: s.to_string(),
            }),
        }
    }
}

impl Serialize for SwitchPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parse a capacity given as `p/q`, an integer, or a terminating decimal.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse {
        what: "rational",
        input: s.to_string(),
    };
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10u64.pow(frac.len() as u32);
        let num: u64 = frac.parse().map_err(|_| bad())?;
        return Ok(Ratio::new(int * den + num, den));
    }
    Ok(Ratio::from_integer(s.parse().map_err(|_| bad())?))
}

pub fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Channel capacities in bits per system use, normalized so that
/// `c1 >= c2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChannelCaps {
    c1: Rational,
    c2: Rational,
    swapped: bool,
}

impl ChannelCaps {
    pub fn new(c1: Rational, c2: Rational) -> Result<Self> {
        for c in [c1, c2] {
            if c.is_zero() {
                return Err(Error::InvalidCaps("capacities must be positive".into()));
            }
            if *c.denom() > MAX_CAP_DENOMINATOR {
                return Err(Error::InvalidCaps(format!(
                    "capacity {c} has denominator above {MAX_CAP_DENOMINATOR}"
                )));
            }
        }
        Ok(if c1 >= c2 {
            Self { c1, c2, swapped: false }
        } else {
            Self {
                c1: c2,
                c2: c1,
                swapped: true,
            }
        })
    }

    pub fn integers(c1: u64, c2: u64) -> Result<Self> {
        Self::new(Ratio::from_integer(c1), Ratio::from_integer(c2))
    }

    pub fn parse(c1: &str, c2: &str) -> Result<Self> {
        Self::new(parse_rational(c1)?, parse_rational(c2)?)
    }

    pub fn c1(&self) -> Rational {
        self.c1
    }

    pub fn c2(&self) -> Rational {
        self.c2
    }

    pub fn c1_f64(&self) -> f64 {
        rational_to_f64(self.c1)
    }

    pub fn c2_f64(&self) -> f64 {
        rational_to_f64(self.c2)
    }

    /// Whether the constructor exchanged the two inputs.
    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// Both capacities as integers, if they are.
    pub fn as_integers(&self) -> Option<(u64, u64)> {
        (self.c1.is_integer() && self.c2.is_integer()).then(|| (self.c1.to_integer(), self.c2.to_integer()))
    }
}

/// Smallest `t` with `2^t >= v`, for `v >= 1`.
pub(crate) fn ceil_log2(v: &BigUint) -> u64 {
    if v.is_zero() {
        return 0;
    }
    (v - 1u32).bits()
}

/// Least `n` with `|Im| <= 2^(n * cap)`, in exact integer arithmetic:
/// with `cap = p/q` this is `|Im|^q <= 2^(n p)`.
pub fn channel_uses(image: &BigUint, cap: Rational) -> u64 {
    let (p, q) = (*cap.numer(), *cap.denom());
    let t = ceil_log2(&image.pow(q as u32));
    t.div_ceil(p)
}

/// Largest message count `M` with `M <= 2^(n * cap)`.
pub(crate) fn channel_budget(n: u64, cap: Rational) -> BigUint {
    let (p, q) = (*cap.numer(), *cap.denom());
    (BigUint::one() << (n * p) as usize).nth_root(q as u32)
}

/// Channel-use accounting of a code under given capacities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RateAccount {
    pub k: u64,
    pub n1: u64,
    pub n2: u64,
    pub n: u64,
    #[serde(serialize_with = "serialize_ratio")]
    pub rate: Rational,
}

fn serialize_ratio<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&format!("{}/{}", r.numer(), r.denom()))
}

impl RateAccount {
    pub fn from_images(k: u64, image1: &BigUint, image2: &BigUint, caps: &ChannelCaps) -> Result<Self> {
        if image1.is_zero() {
            return Err(Error::EmptyImage(1));
        }
        if image2.is_zero() {
            return Err(Error::EmptyImage(2));
        }
        let n1 = channel_uses(image1, caps.c1);
        let n2 = channel_uses(image2, caps.c2);
        let n = n1.max(n2);
        if n == 0 {
            // Both images singletons: the decoder output would be constant.
            return Err(Error::InvalidCode(
                "both encoders have a single label, which cannot convey a nonconstant function".into(),
            ));
        }
        Ok(Self {
            k,
            n1,
            n2,
            n,
            rate: Ratio::new(k, n),
        })
    }

    pub fn rate_f64(&self) -> f64 {
        rational_to_f64(self.rate)
    }
}

/// Explicit k-shot code. Encoder tables are indexed by the packed domain
/// point: `x` or `y` alone, or `x + y * 2^k` when an encoder observes both.
/// Labels are `0..|Im|` in first-seen order over the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KShotCode {
    k: usize,
    switches: SwitchPair,
    phi1: Vec<u32>,
    phi2: Vec<u32>,
    images: (u32, u32),
    /// Decoder on realized label pairs; unrealized pairs decode to the zero word.
    psi: BTreeMap<(u32, u32), TernaryVector>,
}

/// Outcome of an exhaustive admissibility check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Admissibility {
    Admissible,
    Counterexample {
        x: BitVector,
        y: BitVector,
        decoded: TernaryVector,
        expected: TernaryVector,
    },
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible)
    }
}

fn relabel<K: std::hash::Hash + Eq + Clone>(keys: impl Iterator<Item = K>) -> (Vec<u32>, Vec<K>) {
    let mut index: HashMap<K, u32> = HashMap::new();
    let mut order = Vec::new();
    let labels = keys
        .map(|key| {
            if let Some(&l) = index.get(&key) {
                return l;
            }
            let l = order.len() as u32;
            index.insert(key.clone(), l);
            order.push(key);
            l
        })
        .collect();
    (labels, order)
}

impl KShotCode {
    /// Tabulate a code from encoder and decoder functions on packed values.
    ///
    /// An encoder that does not observe a source is evaluated with that
    /// source fixed to zero, so it cannot depend on it. The decoder is
    /// evaluated on the encoder keys of every realized pair.
    pub fn tabulate<K1, K2>(
        k: usize,
        switches: SwitchPair,
        enc1: impl Fn(u32, u32) -> K1,
        enc2: impl Fn(u32, u32) -> K2,
        dec: impl Fn(K1, K2) -> TernaryVector,
    ) -> Result<Self>
    where
        K1: std::hash::Hash + Eq + Clone,
        K2: std::hash::Hash + Eq + Clone,
    {
        check_k(k)?;
        if k > MAX_TABLE_K {
            return Err(Error::Refused(format!(
                "explicit code tables are limited to k<={MAX_TABLE_K}, got k={k}"
            )));
        }
        let size = 1u32 << k;
        let mask = size - 1;
        let dom1 = if switches.encoder1_sees_y() { size * size } else { size };
        let dom2 = if switches.encoder2_sees_x() { size * size } else { size };
        let (phi1, keys1) = relabel((0..dom1).map(|d| enc1(d & mask, d >> k)));
        let (phi2, keys2) = relabel((0..dom2).map(|d| {
            if switches.encoder2_sees_x() {
                enc2(d & mask, d >> k)
            } else {
                enc2(0, d)
            }
        }));
        let mut code = Self {
            k,
            switches,
            phi1,
            phi2,
            images: (keys1.len() as u32, keys2.len() as u32),
            psi: BTreeMap::new(),
        };
        for x in 0..size {
            for y in 0..size {
                let (l1, l2) = code.encode_packed(x, y);
                code.psi
                    .entry((l1, l2))
                    .or_insert_with(|| dec(keys1[l1 as usize].clone(), keys2[l2 as usize].clone()));
            }
        }
        Ok(code)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn switches(&self) -> SwitchPair {
        self.switches
    }

    /// `(|Im φ1|, |Im φ2|)`.
    pub fn images(&self) -> (u32, u32) {
        self.images
    }

    pub fn image_sizes(&self) -> (BigUint, BigUint) {
        (BigUint::from(self.images.0), BigUint::from(self.images.1))
    }

    pub fn phi1_table(&self) -> &[u32] {
        &self.phi1
    }

    pub fn phi2_table(&self) -> &[u32] {
        &self.phi2
    }

    fn encode_packed(&self, x: u32, y: u32) -> (u32, u32) {
        let k = self.k;
        let i1 = if self.switches.encoder1_sees_y() {
            x | (y << k)
        } else {
            x
        };
        let i2 = if self.switches.encoder2_sees_x() {
            x | (y << k)
        } else {
            y
        };
        (self.phi1[i1 as usize], self.phi2[i2 as usize])
    }

    pub fn encode(&self, x: &BitVector, y: &BitVector) -> (u32, u32) {
        self.encode_packed(x.bits(), y.bits())
    }

    pub fn decode(&self, l1: u32, l2: u32) -> TernaryVector {
        self.psi
            .get(&(l1, l2))
            .copied()
            .unwrap_or_else(|| TernaryVector::new(self.k, 0).expect("valid k"))
    }

    /// Replace the decoder table entry for one label pair.
    pub fn set_decoder_entry(&mut self, l1: u32, l2: u32, value: TernaryVector) {
        self.psi.insert((l1, l2), value);
    }

    /// Reuse this code under switches that observe at least as much; the
    /// extra source is ignored by projection.
    pub fn lift(&self, to: SwitchPair) -> Result<KShotCode> {
        if !self.switches.is_covered_by(to) {
            return Err(Error::Unsupported(format!(
                "cannot lift a {} code to {} (it would lose an observed source)",
                self.switches, to
            )));
        }
        let k = self.k;
        KShotCode::tabulate(
            k,
            to,
            |x, y| {
                let i = if self.switches.encoder1_sees_y() {
                    x | (y << k)
                } else {
                    x
                };
                self.phi1[i as usize]
            },
            |x, y| {
                let i = if self.switches.encoder2_sees_x() {
                    x | (y << k)
                } else {
                    y
                };
                self.phi2[i as usize]
            },
            |l1, l2| self.decode(l1, l2),
        )
    }

    pub fn rate_account(&self, caps: &ChannelCaps) -> Result<RateAccount> {
        let (m1, m2) = self.image_sizes();
        RateAccount::from_images(self.k as u64, &m1, &m2, caps)
    }

    /// Canonical JSON document with vectors in digit-string form.
    pub fn to_json(&self) -> Value {
        let k = self.k;
        let size = 1u32 << k;
        let bv = |v: u32| BitVector::new(k, v).expect("in range").to_string();
        let domain_key = |d: u32, both: bool| {
            if both {
                format!("{}|{}", bv(d & (size - 1)), bv(d >> k))
            } else {
                bv(d)
            }
        };
        let table = |t: &[u32], both: bool| {
            let mut m = Map::new();
            for (d, &l) in t.iter().enumerate() {
                m.insert(domain_key(d as u32, both), json!(l));
            }
            Value::Object(m)
        };
        let mut psi = Map::new();
        for (&(l1, l2), v) in &self.psi {
            psi.insert(format!("{l1}|{l2}"), json!(v.to_string()));
        }
        json!({
            "k": k,
            "switches": self.switches.to_string(),
            "phi1": table(&self.phi1, self.switches.encoder1_sees_y()),
            "phi2": table(&self.phi2, self.switches.encoder2_sees_x()),
            "psi": Value::Object(psi),
            "images": [self.images.0, self.images.1],
        })
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidCode(msg.to_string());
        let k = doc["k"].as_u64().ok_or_else(|| bad("missing k"))? as usize;
        check_k(k)?;
        if k > MAX_TABLE_K {
            return Err(Error::Refused(format!(
                "explicit code tables are limited to k<={MAX_TABLE_K}"
            )));
        }
        let switches: SwitchPair = doc["switches"]
            .as_str()
            .ok_or_else(|| bad("missing switches"))?
            .parse()?;
        let size = 1usize << k;
        let parse_key = |key: &str, both: bool| -> Result<usize> {
            if both {
                let (x, y) = key.split_once('|').ok_or_else(|| bad("pair key needs x|y"))?;
                let (x, y): (BitVector, BitVector) = (x.parse()?, y.parse()?);
                if x.k() != k || y.k() != k {
                    return Err(bad("domain key has wrong length"));
                }
                Ok(x.bits() as usize | (y.bits() as usize) << k)
            } else {
                let v: BitVector = key.parse()?;
                if v.k() != k {
                    return Err(bad("domain key has wrong length"));
                }
                Ok(v.bits() as usize)
            }
        };
        let read_table = |name: &str, both: bool| -> Result<Vec<u32>> {
            let obj = doc[name].as_object().ok_or_else(|| bad("missing encoder table"))?;
            let len = if both { size * size } else { size };
            let mut t = vec![u32::MAX; len];
            for (key, l) in obj {
                let i = parse_key(key, both)?;
                t[i] = l.as_u64().ok_or_else(|| bad("label must be an integer"))? as u32;
            }
            if t.contains(&u32::MAX) {
                return Err(bad("encoder table is not total on its domain"));
            }
            Ok(t)
        };
        let phi1 = read_table("phi1", switches.encoder1_sees_y())?;
        let phi2 = read_table("phi2", switches.encoder2_sees_x())?;
        let count = |t: &[u32]| {
            let mut labels = t.to_vec();
            labels.sort_unstable();
            labels.dedup();
            labels.len() as u32
        };
        let images = (count(&phi1), count(&phi2));
        let mut psi = BTreeMap::new();
        for (key, v) in doc["psi"].as_object().ok_or_else(|| bad("missing psi"))? {
            let (a, b) = key.split_once('|').ok_or_else(|| bad("psi key needs l1|l2"))?;
            let a: u32 = a.parse().map_err(|_| bad("psi label"))?;
            let b: u32 = b.parse().map_err(|_| bad("psi label"))?;
            let t: TernaryVector = v.as_str().ok_or_else(|| bad("psi value"))?.parse()?;
            if t.k() != k {
                return Err(bad("psi value has wrong length"));
            }
            psi.insert((a, b), t);
        }
        Ok(Self {
            k,
            switches,
            phi1,
            phi2,
            images,
            psi,
        })
    }
}

/// Exhaustively check `ψ(φ1, φ2) = x + y` on all `4^k` pairs. The reported
/// counterexample is the lexicographically first failing `(x, y)`.
pub fn check_admissible(code: &KShotCode) -> Result<Admissibility> {
    let k = code.k;
    if k > MAX_TABLE_K {
        return Err(Error::Refused(format!(
            "exhaustive admissibility is limited to k<={MAX_TABLE_K}, got k={k}"
        )));
    }
    let size = 1u64 << k;
    let failing = (0..size * size).into_par_iter().find_first(|&p| {
        let (x, y) = ((p >> k) as u32, (p & (size - 1)) as u32);
        let (l1, l2) = code.encode_packed(x, y);
        code.decode(l1, l2).index() != sum_index(k, x, y)
    });
    Ok(match failing {
        None => Admissibility::Admissible,
        Some(p) => {
            let (x, y) = ((p >> k) as u32, (p & (size - 1)) as u32);
            let xv = BitVector::new(k, x)?;
            let yv = BitVector::new(k, y)?;
            let (l1, l2) = code.encode_packed(x, y);
            Admissibility::Counterexample {
                x: xv,
                y: yv,
                decoded: code.decode(l1, l2),
                expected: bitspace::add(&xv, &yv)?,
            }
        }
    })
}

fn spread(k: usize, v: u32) -> u64 {
    bitspace::respread(v as u64, 2, 3, k)
}

fn sum_index(k: usize, x: u32, y: u32) -> u64 {
    spread(k, x) + spread(k, y)
}

fn ternary(k: usize, index: u64) -> TernaryVector {
    TernaryVector::new(k, index).expect("index within 3^k")
}

/// The explicit constructions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeFamily {
    /// Each encoder forwards its own source.
    Identity,
    /// Both encoders see `z = x + y`; the base-3 index of `z` is split into
    /// `z div modulus` (encoder 1) and `z mod modulus` (encoder 2).
    Packing11 { n: u64, modulus: BigUint },
    /// Encoder 1 sends `x_i + y_i` on the first `k1 - 1` components and
    /// `x_j` on the rest; encoder 2 sends `y_j` on the rest.
    Split01 { k1: usize },
}

/// A code from one of the explicit families, with closed-form image sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructedCode {
    pub family: CodeFamily,
    pub k: usize,
    pub switches: SwitchPair,
    pub image1: BigUint,
    pub image2: BigUint,
}

impl ConstructedCode {
    pub fn rate_account(&self, caps: &ChannelCaps) -> Result<RateAccount> {
        RateAccount::from_images(self.k as u64, &self.image1, &self.image2, caps)
    }

    /// Explicit tables; requires `k <= MAX_TABLE_K`.
    pub fn tabulate(&self) -> Result<KShotCode> {
        let k = self.k;
        match &self.family {
            CodeFamily::Identity => KShotCode::tabulate(
                k,
                self.switches,
                |x, _| x,
                |_, y| y,
                |a, b| ternary(k, sum_index(k, a, b)),
            ),
            CodeFamily::Packing11 { modulus, .. } => {
                let m = modulus
                    .to_u64()
                    .ok_or_else(|| Error::Refused("modulus too large".into()))?;
                KShotCode::tabulate(
                    k,
                    self.switches,
                    |x, y| sum_index(k, x, y) / m,
                    |x, y| sum_index(k, x, y) % m,
                    |hi, lo| ternary(k, hi * m + lo),
                )
            }
            CodeFamily::Split01 { k1 } => {
                let low = (1u32 << (k1 - 1)) - 1;
                KShotCode::tabulate(
                    k,
                    self.switches,
                    |x, y| spread(k, x) + spread(k, y & low),
                    |_, y| y & !low,
                    |a, b| ternary(k, a + spread(k, b)),
                )
            }
        }
    }
}

/// Case 00: `φ1 = x`, `φ2 = y`, `ψ = φ1 + φ2`.
pub fn build_identity_code(k: usize) -> Result<ConstructedCode> {
    if k == 0 {
        return Err(Error::InvalidBlockLength(k));
    }
    let side = BigUint::one() << k;
    Ok(ConstructedCode {
        family: CodeFamily::Identity,
        k,
        switches: SwitchPair::S00,
        image1: side.clone(),
        image2: side,
    })
}

/// Least `n` with `2^(n (C1 + C2)) >= 3^k`.
pub fn packing_block_uses(k: usize, caps: &ChannelCaps) -> u64 {
    let total = caps.c1 + caps.c2;
    let (p, q) = (*total.numer(), *total.denom());
    let t = ceil_log2(&BigUint::from(3u32).pow((k as u64 * q) as u32));
    t.div_ceil(p)
}

/// Case 11: send the ternary word `z = x + y` over both channels.
pub fn build_packing_code_11(k: usize, caps: &ChannelCaps) -> Result<ConstructedCode> {
    if k == 0 {
        return Err(Error::InvalidBlockLength(k));
    }
    let n = packing_block_uses(k, caps);
    let words = BigUint::from(3u32).pow(k as u32);
    let modulus = channel_budget(n, caps.c2).min(words.clone());
    let image1 = (&words + &modulus - 1u32) / &modulus;
    Ok(ConstructedCode {
        family: CodeFamily::Packing11 {
            n,
            modulus: modulus.clone(),
        },
        k,
        switches: SwitchPair::S11,
        image1,
        image2: modulus,
    })
}

/// Split index `k1 = max(1, ceil((C1 - C2) k / ((C1 - C2) + C2 log2 3)))`.
pub fn split_index(k: usize, caps: &ChannelCaps) -> usize {
    let diff = caps.c1_f64() - caps.c2_f64();
    let raw = diff * k as f64 / (diff + caps.c2_f64() * 3f64.log2());
    (raw.ceil() as usize).clamp(1, k)
}

/// Case 01: the split construction with `k1` from [`split_index`].
pub fn build_split_code_01(k: usize, caps: &ChannelCaps) -> Result<ConstructedCode> {
    if k == 0 {
        return Err(Error::InvalidBlockLength(k));
    }
    let k1 = split_index(k, caps);
    let tail = BigUint::one() << (k - k1 + 1);
    Ok(ConstructedCode {
        family: CodeFamily::Split01 { k1 },
        k,
        switches: SwitchPair::S01,
        image1: BigUint::from(3u32).pow((k1 - 1) as u32) * &tail,
        image2: tail,
    })
}

/// A coloring of the conflict graph `G(A^k, P)` for one block `P` of `y`
/// values. `labels[row * 2^k + x]` colors the vertex `(x, y)` where `y` is
/// the `row`-th member of the block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockColoring {
    pub block: VectorSet,
    pub labels: Vec<u32>,
}

impl BlockColoring {
    /// Color every vertex by the rank of its sum among the block's sums,
    /// which uses exactly `|A^k + P|` colors.
    pub fn minimum(block: &VectorSet) -> Result<Self> {
        let k = block.k();
        let size = 1u32 << k;
        let (labels, _) = relabel(
            block
                .members()
                .iter()
                .flat_map(|&y| (0..size).map(move |x| sum_index(k, x, y as u32))),
        );
        Ok(Self {
            block: block.clone(),
            labels,
        })
    }

    pub fn color_count(&self) -> usize {
        let mut l = self.labels.clone();
        l.sort_unstable();
        l.dedup();
        l.len()
    }
}

/// Assemble `φ1(x, y) = c_i(x, y)` and `φ2(y) = i` from a partition of
/// `A^k` into blocks `P_i` and a coloring `c_i` of each `G(A^k, P_i)`.
pub fn code_from_partition(blocks: &[VectorSet], colorings: &[BlockColoring]) -> Result<KShotCode> {
    let k = blocks
        .first()
        .map(|b| b.k())
        .ok_or_else(|| Error::NotAPartition("no blocks".into()))?;
    if blocks.len() != colorings.len() {
        return Err(Error::InvalidColoring(format!(
            "{} blocks but {} colorings",
            blocks.len(),
            colorings.len()
        )));
    }
    let size = 1usize << k;
    let mut owner = vec![usize::MAX; size];
    for (i, b) in blocks.iter().enumerate() {
        if b.k() != k || b.alphabet() != bitspace::Alphabet::Binary {
            return Err(Error::NotAPartition(format!("block {i} is not a subset of A^{k}")));
        }
        if b.is_empty() {
            return Err(Error::NotAPartition(format!("block {i} is empty")));
        }
        for &y in b.members() {
            if owner[y as usize] != usize::MAX {
                return Err(Error::NotAPartition(format!("vector {y} appears in two blocks")));
            }
            owner[y as usize] = i;
        }
    }
    if owner.contains(&usize::MAX) {
        return Err(Error::NotAPartition("blocks do not cover A^k".into()));
    }

    // Each label within a block must name a single sum value.
    let mut block_decoders: Vec<HashMap<u32, u64>> = Vec::with_capacity(blocks.len());
    for (i, (b, c)) in blocks.iter().zip(colorings).enumerate() {
        if c.block != *b || c.labels.len() != b.len() * size {
            return Err(Error::InvalidColoring(format!("coloring {i} does not match its block")));
        }
        let mut dec: HashMap<u32, u64> = HashMap::new();
        for (row, &y) in b.members().iter().enumerate() {
            for x in 0..size {
                let s = sum_index(k, x as u32, y as u32);
                let l = c.labels[row * size + x];
                if let Some(&prev) = dec.get(&l) {
                    if prev != s {
                        return Err(Error::InvalidColoring(format!(
                            "block {i}: label {l} is shared by pairs with sums {} and {}",
                            ternary(k, prev),
                            ternary(k, s)
                        )));
                    }
                } else {
                    dec.insert(l, s);
                }
            }
        }
        block_decoders.push(dec);
    }
    let rows: Vec<HashMap<u64, usize>> = blocks
        .iter()
        .map(|b| b.members().iter().enumerate().map(|(r, &y)| (y, r)).collect())
        .collect();
    KShotCode::tabulate(
        k,
        SwitchPair::S01,
        |x, y| {
            let i = owner[y as usize];
            colorings[i].labels[rows[i][&(y as u64)] * size + x as usize]
        },
        |_, y| owner[y as usize],
        |label, i| ternary(k, block_decoders[i][&label]),
    )
}
