//! Evaluation of polynomials on all of `{0,1}^m`.
//!
//! Point `t` assigns `x_j = (t >> j) & 1`, so `x_0` is the least significant
//! bit of the point index. Bit `t` of an evaluation vector lives in word
//! `t / 64` at position `t % 64`.

use crate::error::{Error, Result};
use crate::monomial::{Monomial, Poly};

/// Largest `m` for which a full evaluation vector is materialized
/// (`2^30` bits is 128 MiB).
pub const EVAL_M_CAP: usize = 30;

/// A fixed-length bit vector packed into `u64` words.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitRow {
    len: usize,
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % 64 == 0 {
                words.push(0);
            }
            if b {
                words[len / 64] |= 1 << (len % 64);
            }
            len += 1;
        }
        BitRow { len, words }
    }

    /// Parses a string of `0`/`1` characters, first character is bit 0.
    pub fn from_str01(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(Error::Parse(format!("not a bit string: {s:?}"))),
            }
        }
        Ok(Self::from_bits(bits))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len);
        let w = &mut self.words[i / 64];
        if v {
            *w |= 1 << (i % 64);
        } else {
            *w &= !(1 << (i % 64));
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        assert_eq!(self.len, other.len, "bit rows of different length");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and_assign(&mut self, other: &BitRow) {
        assert_eq!(self.len, other.len, "bit rows of different length");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// Lowest set bit at or after `from`.
    pub fn first_one_from(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut wi = from / 64;
        let mut w = self.words[wi] & (!0u64 << (from % 64));
        loop {
            if w != 0 {
                let i = wi * 64 + w.trailing_zeros() as usize;
                return (i < self.len).then_some(i);
            }
            wi += 1;
            if wi >= self.words.len() {
                return None;
            }
            w = self.words[wi];
        }
    }

    /// Hex encoding with bit 0 as the least significant bit of the first
    /// nibble, nibbles in bit order.
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4);
        let mut s = String::with_capacity(nibbles);
        for n in 0..nibbles {
            let v = (self.words[n * 4 / 64] >> (n * 4 % 64)) & 0xf;
            s.push(char::from_digit(v as u32, 16).unwrap());
        }
        s
    }

    pub fn to_str01(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }
}

/// `ev(p)`: the truth table of a polynomial, `2^m` bits.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EvalVector {
    m: usize,
    bits: BitRow,
}

impl EvalVector {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn bits(&self) -> &BitRow {
        &self.bits
    }

    pub fn into_bits(self) -> BitRow {
        self.bits
    }

    pub fn weight(&self) -> u64 {
        self.bits.count_ones()
    }

    pub fn get(&self, point: u64) -> bool {
        self.bits.get(point as usize)
    }
}

fn check_eval_m(m: usize) -> Result<()> {
    if m > EVAL_M_CAP {
        return Err(Error::CapExceeded {
            what: "m",
            value: m as u64,
            cap: EVAL_M_CAP as u64,
            hint: "use the formula-based weight instead of evaluation",
        });
    }
    Ok(())
}

/// Within-word pattern of a monomial over the low six variables.
fn low_pattern(mask: u64) -> u64 {
    const VAR_WORDS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    (0..6).filter(|i| mask >> i & 1 == 1).fold(!0u64, |acc, i| acc & VAR_WORDS[i])
}

/// XORs the subcube pattern of `f` into `words`.
fn xor_monomial(words: &mut [u64], f: Monomial, m: usize) {
    let pat = low_pattern(f.mask() & 0x3f) & valid_mask(m);
    let high = f.mask() >> 6;
    let nwords = words.len() as u64;
    // Words whose index is a superset of `high`.
    let mut w = high;
    while w < nwords {
        words[w as usize] ^= pat;
        w = (w + 1) | high;
    }
}

fn valid_mask(m: usize) -> u64 {
    if m >= 6 {
        !0
    } else {
        (1u64 << (1 << m)) - 1
    }
}

impl Poly {
    /// Truth table of `self`. Refuses `m > 30`.
    pub fn evaluate(&self) -> Result<EvalVector> {
        let m = self.m();
        check_eval_m(m)?;
        let mut bits = BitRow::zeros(1 << m);
        for t in self.terms() {
            xor_monomial(&mut bits.words, t, m);
        }
        Ok(EvalVector { m, bits })
    }

    /// `wt(ev(p))` by popcount of the truth table.
    pub fn weight(&self) -> Result<u64> {
        Ok(self.evaluate()?.weight())
    }
}

impl Monomial {
    /// `2^{m - deg f}`, valid for any `m` up to 63.
    pub fn weight_in(self, m: usize) -> u128 {
        assert!(m < 128 && self.degree() as usize <= m);
        1u128 << (m - self.degree() as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(p: &str, m: usize) -> String {
        Poly::parse(p, m).unwrap().evaluate().unwrap().bits().to_str01()
    }

    #[test]
    fn ordering_convention() {
        assert_eq!(bits("x0", 2), "0101");
        assert_eq!(bits("x0*x1", 2), "0001");
        assert_eq!(bits("x0 + x1", 2), "0110");
        assert_eq!(bits("x1", 2), "0011");
        assert_eq!(bits("1", 2), "1111");
    }

    #[test]
    fn weights() {
        let f = Poly::parse("x0*x2*x4", 5).unwrap();
        assert_eq!(f.weight().unwrap(), 4);
        assert_eq!(Poly::zero(5).weight().unwrap(), 0);
        assert_eq!(Poly::parse("x0*x1 + x2*x3", 4).unwrap().weight().unwrap(), 6);
    }

    #[test]
    fn high_variables_across_words() {
        let m = 9;
        for i in 0..m {
            let p = Poly::monomial(Monomial::var(i), m);
            let ev = p.evaluate().unwrap();
            for t in 0..(1u64 << m) {
                assert_eq!(ev.get(t), t >> i & 1 == 1, "x{i} at {t}");
            }
        }
    }

    #[test]
    fn eval_cap() {
        let p = Poly::one(31);
        assert!(matches!(p.evaluate(), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn hex_export() {
        let r = BitRow::from_str01("10000000").unwrap();
        assert_eq!(r.to_hex(), "10");
        let r = BitRow::from_str01("11110101").unwrap();
        assert_eq!(r.to_hex(), "fa");
    }

    #[test]
    fn first_one() {
        let mut r = BitRow::zeros(200);
        r.set(70, true);
        r.set(199, true);
        assert_eq!(r.first_one_from(0), Some(70));
        assert_eq!(r.first_one_from(71), Some(199));
        assert_eq!(r.first_one_from(200), None);
    }
}
