//! Source alphabets, packed vectors and the sumset primitive.
//!
//! Component `i` of a vector (1-based, as written left to right in the
//! canonical digit string) lives at position `i - 1` of the packed integer:
//! bit `i - 1` for binary vectors, base-3 digit `i - 1` for ternary ones.
//! So `"011"` packs to the binary integer `0b110`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported block length.
pub const MAX_K: usize = 20;

pub(crate) fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidBlockLength(k));
    }
    Ok(())
}

pub(crate) fn pow(radix: u64, k: usize) -> u64 {
    radix.pow(k as u32)
}

/// Re-encode the digits of `value` (radix `from`) in radix `to`.
pub(crate) fn respread(mut value: u64, from: u64, to: u64, k: usize) -> u64 {
    let mut out = 0;
    let mut place = 1;
    for _ in 0..k {
        out += (value % from) * place;
        value /= from;
        place *= to;
    }
    out
}

fn digits_of(mut value: u64, radix: u64, k: usize) -> Vec<u8> {
    (0..k)
        .map(|_| {
            let d = value % radix;
            value /= radix;
            d as u8
        })
        .collect()
}

fn pack(digits: &[u8], radix: u64) -> Result<u64> {
    let mut out = 0;
    for &d in digits.iter().rev() {
        if d as u64 >= radix {
            return Err(Error::SymbolOutOfRange {
                symbol: d as u64,
                radix: radix as u8,
            });
        }
        out = out * radix + d as u64;
    }
    Ok(out)
}

fn parse_digits(s: &str, what: &'static str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| {
            c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Parse {
                what,
                input: s.to_string(),
            })
        })
        .collect()
}

fn write_digits(f: &mut fmt::Formatter<'_>, value: u64, radix: u64, k: usize) -> fmt::Result {
    for d in digits_of(value, radix, k) {
        write!(f, "{d}")?;
    }
    Ok(())
}

/// A length-`k` word over `{0,1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    k: u8,
    bits: u32,
}

impl BitVector {
    pub fn new(k: usize, bits: u32) -> Result<Self> {
        check_k(k)?;
        if (bits as u64) >= 1u64 << k {
            return Err(Error::SymbolOutOfRange {
                symbol: bits as u64,
                radix: 2,
            });
        }
        Ok(Self { k: k as u8, bits })
    }

    pub fn zero(k: usize) -> Result<Self> {
        Self::new(k, 0)
    }

    pub fn from_components(components: &[u8]) -> Result<Self> {
        check_k(components.len())?;
        let bits = pack(components, 2)? as u32;
        Ok(Self {
            k: components.len() as u8,
            bits,
        })
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    /// Packed representation; component 1 is the least significant bit.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Component at 0-based position `i`.
    pub fn get(&self, i: usize) -> u8 {
        ((self.bits >> i) & 1) as u8
    }

    pub fn components(&self) -> Vec<u8> {
        digits_of(self.bits as u64, 2, self.k())
    }

    /// The same word read as a ternary vector.
    pub fn embed(&self) -> TernaryVector {
        TernaryVector {
            k: self.k,
            index: respread(self.bits as u64, 2, 3, self.k()),
        }
    }

    /// All `2^k` words in increasing packed order.
    pub fn all(k: usize) -> Result<impl Iterator<Item = BitVector>> {
        check_k(k)?;
        Ok((0..1u32 << k).map(move |bits| BitVector { k: k as u8, bits }))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_digits(f, self.bits as u64, 2, self.k())
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_components(&parse_digits(s, "binary vector")?)
    }
}

/// A length-`k` word over `{0,1,2}`, the value set of the componentwise sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TernaryVector {
    k: u8,
    index: u64,
}

impl TernaryVector {
    pub fn new(k: usize, index: u64) -> Result<Self> {
        check_k(k)?;
        if index >= pow(3, k) {
            return Err(Error::SymbolOutOfRange {
                symbol: index,
                radix: 3,
            });
        }
        Ok(Self { k: k as u8, index })
    }

    pub fn from_components(components: &[u8]) -> Result<Self> {
        check_k(components.len())?;
        Ok(Self {
            k: components.len() as u8,
            index: pack(components, 3)?,
        })
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    /// Base-3 index; component 1 is the least significant digit.
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn get(&self, i: usize) -> u8 {
        ((self.index / pow(3, i)) % 3) as u8
    }

    pub fn components(&self) -> Vec<u8> {
        digits_of(self.index, 3, self.k())
    }
}

impl fmt::Display for TernaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_digits(f, self.index, 3, self.k())
    }
}

impl FromStr for TernaryVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_components(&parse_digits(s, "ternary vector")?)
    }
}

/// Componentwise integer sum `x + y`.
pub fn add(x: &BitVector, y: &BitVector) -> Result<TernaryVector> {
    if x.k != y.k {
        return Err(Error::LengthMismatch {
            left: x.k(),
            right: y.k(),
        });
    }
    Ok(TernaryVector {
        k: x.k,
        index: x.embed().index + y.embed().index,
    })
}

/// Symbol alphabet of a [`VectorSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alphabet {
    Binary,
    Ternary,
    /// `{0,1,2,3}`; only produced by binary + ternary sumsets.
    Quaternary,
}

impl Alphabet {
    pub fn radix(self) -> u64 {
        match self {
            Alphabet::Binary => 2,
            Alphabet::Ternary => 3,
            Alphabet::Quaternary => 4,
        }
    }

    fn from_radix(radix: u64) -> Option<Self> {
        match radix {
            2 => Some(Alphabet::Binary),
            3 => Some(Alphabet::Ternary),
            4 => Some(Alphabet::Quaternary),
            _ => None,
        }
    }
}

/// A deduplicated set of same-length vectors over one alphabet, stored as
/// sorted packed integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorSet {
    k: usize,
    alphabet: Alphabet,
    members: Vec<u64>,
}

impl VectorSet {
    pub fn new(k: usize, alphabet: Alphabet, packed: impl IntoIterator<Item = u64>) -> Result<Self> {
        check_k(k)?;
        let limit = pow(alphabet.radix(), k);
        let mut members: Vec<u64> = packed.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&v| v >= limit) {
            return Err(Error::SymbolOutOfRange {
                symbol: bad,
                radix: alphabet.radix() as u8,
            });
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self { k, alphabet, members })
    }

    pub fn empty(k: usize, alphabet: Alphabet) -> Result<Self> {
        Self::new(k, alphabet, std::iter::empty())
    }

    /// `A^k`.
    pub fn full_binary(k: usize) -> Result<Self> {
        check_k(k)?;
        Self::new(k, Alphabet::Binary, 0..1u64 << k)
    }

    pub fn from_bits(k: usize, vectors: impl IntoIterator<Item = BitVector>) -> Result<Self> {
        let mut packed = Vec::new();
        for v in vectors {
            if v.k() != k {
                return Err(Error::LengthMismatch { left: k, right: v.k() });
            }
            packed.push(v.bits() as u64);
        }
        Self::new(k, Alphabet::Binary, packed)
    }

    pub fn from_ternary(k: usize, vectors: impl IntoIterator<Item = TernaryVector>) -> Result<Self> {
        let mut packed = Vec::new();
        for v in vectors {
            if v.k() != k {
                return Err(Error::LengthMismatch { left: k, right: v.k() });
            }
            packed.push(v.index());
        }
        Self::new(k, Alphabet::Ternary, packed)
    }

    /// Parse canonical digit strings, e.g. `["00", "01"]`.
    pub fn parse(k: usize, alphabet: Alphabet, words: &[&str]) -> Result<Self> {
        let radix = alphabet.radix();
        let mut packed = Vec::with_capacity(words.len());
        for w in words {
            let digits = parse_digits(w, "vector")?;
            if digits.len() != k {
                return Err(Error::LengthMismatch {
                    left: k,
                    right: digits.len(),
                });
            }
            packed.push(pack(&digits, radix)?);
        }
        Self::new(k, alphabet, packed)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Sorted packed members.
    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn contains(&self, packed: u64) -> bool {
        self.members.binary_search(&packed).is_ok()
    }

    pub fn is_subset(&self, other: &VectorSet) -> bool {
        self.k == other.k && self.alphabet == other.alphabet && self.members.iter().all(|&v| other.contains(v))
    }

    /// Canonical digit strings of the members, in packed order.
    pub fn to_strings(&self) -> Vec<String> {
        let radix = self.alphabet.radix();
        self.members
            .iter()
            .map(|&v| {
                digits_of(v, radix, self.k)
                    .into_iter()
                    .map(|d| char::from(b'0' + d))
                    .collect()
            })
            .collect()
    }

    /// Apply the same coordinate permutation to every member: component
    /// `i` of the result is component `perm[i]` of the input.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.k {
            return Err(Error::LengthMismatch {
                left: self.k,
                right: perm.len(),
            });
        }
        let radix = self.alphabet.radix();
        let permuted = self.members.iter().map(|&v| {
            let d = digits_of(v, radix, self.k);
            let p: Vec<u8> = perm.iter().map(|&j| d[j]).collect();
            pack(&p, radix).expect("digits stay in range")
        });
        Self::new(self.k, self.alphabet, permuted.collect::<Vec<_>>())
    }
}

const DENSE_LIMIT: u64 = 1 << 26;

/// `M + L`: all componentwise sums, deduplicated.
///
/// The left operand must be binary. The right operand may be binary
/// (giving a ternary result) or ternary (giving a `{0,..,3}` result). If
/// either operand is empty the sumset is empty.
pub fn sumset(m: &VectorSet, l: &VectorSet) -> Result<VectorSet> {
    if m.k != l.k {
        return Err(Error::LengthMismatch { left: m.k, right: l.k });
    }
    if m.alphabet != Alphabet::Binary || l.alphabet == Alphabet::Quaternary {
        return Err(Error::AlphabetMismatch(format!(
            "sumset needs a binary left operand and a binary or ternary right operand, got {:?} + {:?}",
            m.alphabet, l.alphabet
        )));
    }
    let k = m.k;
    let out_radix = 2 + l.alphabet.radix() - 1;
    let out_alphabet = Alphabet::from_radix(out_radix).expect("radix 3 or 4");
    if m.is_empty() || l.is_empty() {
        return VectorSet::empty(k, out_alphabet);
    }
    let left: Vec<u64> = m.members.iter().map(|&v| respread(v, 2, out_radix, k)).collect();
    let right: Vec<u64> = l
        .members
        .iter()
        .map(|&v| respread(v, l.alphabet.radix(), out_radix, k))
        .collect();

    let universe = pow(out_radix, k);
    let members: Vec<u64> = if universe <= DENSE_LIMIT {
        let mut seen = vec![0u64; (universe as usize).div_ceil(64)];
        for &a in &left {
            for &b in &right {
                let s = (a + b) as usize;
                seen[s / 64] |= 1 << (s % 64);
            }
        }
        seen.iter()
            .enumerate()
            .flat_map(|(w, &word)| {
                (0..64)
                    .filter(move |b| word >> b & 1 == 1)
                    .map(move |b| (w * 64 + b) as u64)
            })
            .collect()
    } else {
        let set: HashSet<u64> = left.iter().flat_map(|&a| right.iter().map(move |&b| a + b)).collect();
        set.into_iter().collect()
    };
    VectorSet::new(k, out_alphabet, members)
}

/// Joint distribution of one source letter pair `(X, Y)`, indexed `[x][y]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    pub pxy: [[f64; 2]; 2],
}

impl SourceModel {
    pub fn uniform() -> Self {
        Self { pxy: [[0.25; 2]; 2] }
    }

    /// `H(X + Y)` in bits.
    pub fn sum_entropy(&self) -> f64 {
        let p = [self.pxy[0][0], self.pxy[0][1] + self.pxy[1][0], self.pxy[1][1]];
        p.iter().filter(|&&q| q > 0.0).map(|&q| -q * q.log2()).sum()
    }
}

/// Accepts a table iff every entry is strictly positive and the entries sum
/// to 1 within `1e-12`.
pub fn validate_source_model(model: &SourceModel) -> Result<()> {
    let mut total = 0.0;
    for (x, row) in model.pxy.iter().enumerate() {
        for (y, &p) in row.iter().enumerate() {
            if !p.is_finite() || p <= 0.0 {
                return Err(Error::InvalidSourceModel(format!(
                    "P({x},{y}) = {p} is not strictly positive"
                )));
            }
            total += p;
        }
    }
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidSourceModel(format!("entries sum to {total}, not 1")));
    }
    Ok(())
}
