//! Solution-count bounds and the combinatorial quantities behind them.
//!
//! Every bound has the shape `c * 2^a * M * (e^s + 3) / 4` with `s` in
//! `{0, 2, 4}`; for `s = 0` the last factor is `1` and the bound is an exact
//! rational. `e^2` and `e^4` only ever enter through certified rational
//! enclosures, so floors and inequality checks are exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sparse_system::{rational_to_f64, rational_to_string, MixedStructure};

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// `l! / prod parts!`
pub fn multinomial(l: u64, parts: &[u64]) -> Result<BigInt> {
    let sum: u64 = parts.iter().sum();
    if sum != l {
        return Err(Error::PartSum { sum, l });
    }
    Ok(parts
        .iter()
        .fold(factorial(l), |acc, &p| acc / factorial(p)))
}

/// Every `(j_1, ..., j_k)` with `0 <= j_i <= caps[i]` summing to `total`.
pub fn bounded_compositions(total: u64, caps: &[u64]) -> Vec<Vec<u64>> {
    fn rec(total: u64, caps: &[u64], prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        match caps.split_first() {
            None => {
                if total == 0 {
                    out.push(prefix.clone());
                }
            }
            Some((&cap, rest)) => {
                let rest_cap: u64 = rest.iter().sum();
                let lo = total.saturating_sub(rest_cap);
                for j in lo..=cap.min(total) {
                    prefix.push(j);
                    rec(total - j, rest, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(total, caps, &mut Vec::new(), &mut out);
    out
}

/// Compositions of `l` into `n` positive parts.
pub fn positive_compositions(l: u64, n: usize) -> Vec<Vec<u64>> {
    if n == 0 || l < n as u64 {
        return Vec::new();
    }
    bounded_compositions(l - n as u64, &vec![l; n])
        .into_iter()
        .map(|c| c.into_iter().map(|v| v + 1).collect())
        .collect()
}

/// Rational enclosure `lo < e^s < hi` from the Taylor series truncated
/// after `terms` terms, with the geometric tail bound on the remainder.
pub fn exp_enclosure(s: u32, terms: u64) -> (BigRational, BigRational) {
    let s_big = BigInt::from(s);
    let terms = terms.max(s as u64 + 2);
    let mut lo = BigRational::zero();
    let mut term = BigRational::one();
    for k in 0..terms {
        lo += &term;
        term = term * BigRational::from_integer(s_big.clone()) / BigInt::from(k + 1);
    }
    // `term` is now s^N / N!; the tail is at most term * (N+1) / (N+1-s)
    let n1 = BigInt::from(terms + 1);
    let tail = term * BigRational::new(n1.clone(), n1 - &s_big);
    let hi = &lo + tail;
    (lo, hi)
}

/// `(e^s + 3) / 4` enclosure; exact `1` for `s = 0`.
fn prefactor_enclosure(s: u32, terms: u64) -> (BigRational, BigRational) {
    if s == 0 {
        return (BigRational::one(), BigRational::one());
    }
    let (lo, hi) = exp_enclosure(s, terms);
    let three = BigRational::from_integer(BigInt::from(3));
    let four = BigInt::from(4);
    ((lo + &three) / &four, (hi + three) / four)
}

/// Exact symbolic bound `c * 2^a * M * (e^s + 3) / 4`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundValue {
    pub coefficient: BigRational,
    pub pow2: u64,
    pub multinomial: BigInt,
    pub e_power: u32,
    pub value: f64,
    pub integer_bound: BigInt,
}

impl BoundValue {
    pub fn new(coefficient: BigRational, pow2: u64, multinomial: BigInt, e_power: u32) -> Self {
        assert!(matches!(e_power, 0 | 2 | 4), "e-power must be 0, 2 or 4");
        let base = coefficient.clone()
            * BigRational::from_integer(num_traits::pow(BigInt::from(2), pow2 as usize))
            * BigRational::from_integer(multinomial.clone());
        let mut terms = 40;
        let (integer_bound, value) = loop {
            let (lo, hi) = prefactor_enclosure(e_power, terms);
            let (vlo, vhi) = (&base * lo, &base * hi);
            let (flo, fhi) = (vlo.floor(), vhi.floor());
            if flo == fhi {
                let mid = (vlo + vhi) / BigInt::from(2);
                break (flo.to_integer(), rational_to_f64(&mid));
            }
            terms *= 2;
            assert!(terms < 1 << 16, "floor of a bound did not stabilise");
        };
        BoundValue {
            coefficient,
            pow2,
            multinomial,
            e_power,
            value,
            integer_bound,
        }
    }

    pub fn integer(v: BigInt) -> Self {
        Self::new(BigRational::from_integer(v), 0, BigInt::one(), 0)
    }

    /// Certified enclosure of the exact value, with the given Taylor depth.
    pub fn enclosure(&self, terms: u64) -> (BigRational, BigRational) {
        let base = self.coefficient.clone()
            * BigRational::from_integer(num_traits::pow(BigInt::from(2), self.pow2 as usize))
            * BigRational::from_integer(self.multinomial.clone());
        let (lo, hi) = prefactor_enclosure(self.e_power, terms);
        (&base * lo, base * hi)
    }
}

impl Serialize for BoundValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let big = |v: &BigInt| match v.to_i64() {
            Some(i) => serde_json::Value::from(i),
            None => serde_json::Value::from(v.to_string()),
        };
        serde_json::json!({
            "c": rational_to_string(&self.coefficient),
            "pow2": self.pow2,
            "multinomial": big(&self.multinomial),
            "e_power": self.e_power,
            "value": self.value,
            "integer_bound": big(&self.integer_bound),
        })
        .serialize(s)
    }
}

/// `2^{C(l+n, 2)} (n+1)^{l+n}`
pub fn khovanskii_bound(n: u64, l: u64) -> BoundValue {
    BoundValue::new(
        BigRational::one(),
        choose2(l + n),
        num_traits::pow(BigInt::from(n + 1), (l + n) as usize),
        0,
    )
}

fn unmixed(n: u64, l: u64, s: u32) -> Result<BoundValue> {
    if n == 0 {
        return Err(Error::InvalidStructure("n must be at least 1".into()));
    }
    if l == 0 {
        return Err(Error::EmptyBlock(0));
    }
    Ok(BoundValue::new(
        BigRational::one(),
        choose2(l),
        num_traits::pow(BigInt::from(n), l as usize),
        s,
    ))
}

/// `(e^2+3)/4 * 2^{C(l,2)} * n^l` positive solutions.
pub fn bs07_positive_bound(n: u64, l: u64) -> Result<BoundValue> {
    unmixed(n, l, 2)
}

/// `(e^4+3)/4 * 2^{C(l,2)} * n^l` real solutions.
pub fn bbs_real_bound(n: u64, l: u64) -> Result<BoundValue> {
    unmixed(n, l, 4)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Positive,
    Real,
}

fn check_blocks(blocks: &[u64]) -> Result<()> {
    if blocks.len() < 2 {
        return Err(Error::UseDescartes(blocks.len()));
    }
    if let Some(i) = blocks.iter().position(|&b| b == 0) {
        return Err(Error::EmptyBlock(i));
    }
    Ok(())
}

/// `(e^2+3)/4` resp. `(e^4+3)/4` times `2^{C(l,2)} * multinomial(l; l_1..l_n)`.
pub fn mixed_bound(blocks: &[u64], variant: Variant) -> Result<BoundValue> {
    check_blocks(blocks)?;
    let l: u64 = blocks.iter().sum();
    let s = match variant {
        Variant::Positive => 2,
        Variant::Real => 4,
    };
    Ok(BoundValue::new(
        BigRational::one(),
        choose2(l),
        multinomial(l, blocks)?,
        s,
    ))
}

/// `n + n^2 + ... + n^{m-1}` positive solutions when `n - 1` equations are
/// trinomials and the last has `m` terms.
pub fn lrw_bound(n: u64, m: u64) -> BigInt {
    (1..m).fold(BigInt::zero(), |acc, j| {
        acc + num_traits::pow(BigInt::from(n), j as usize)
    })
}

/// Two trinomials in two variables: `(positive, real)`.
pub const LRW_TRINOMIAL_PAIR: (u64, u64) = (5, 20);

/// `6m - 4` real solutions of a linear equation and an `m`-nomial in two
/// variables.
pub fn avendano_bound(m: u64) -> BigInt {
    BigInt::from(6 * m) - 4
}

/// `a_k = 2^{C(l-k,2)} * sum_j multinomial(l-k; j) * prod_i C(l_i+2, j_i+2)`
/// over `0 <= j_i <= l_i`, `sum j_i = l - k`.
pub fn a_k(blocks: &[u64], k: u64) -> Result<BigInt> {
    let l: u64 = blocks.iter().sum();
    if k > l {
        return Err(Error::IndexRange {
            k: k as usize,
            l: l as usize,
        });
    }
    let r = l - k;
    let sum = bounded_compositions(r, blocks)
        .iter()
        .map(|js| {
            let faces = blocks
                .iter()
                .zip(js)
                .fold(BigInt::one(), |acc, (&li, &ji)| acc * binomial(li + 2, ji + 2));
            multinomial(r, js).expect("composition sums to r") * faces
        })
        .fold(BigInt::zero(), |acc, t| acc + t);
    Ok(num_traits::pow(BigInt::from(2), choose2(r) as usize) * sum)
}

/// `sum_{k=1}^l 2^k a_k`, or `sum_{k=1}^l a_k` for a single chamber.
pub fn bracket_sum(blocks: &[u64], per_chamber: bool) -> Result<BigInt> {
    check_blocks(blocks)?;
    let l: u64 = blocks.iter().sum();
    let mut total = BigInt::zero();
    for k in 1..=l {
        let a = a_k(blocks, k)?;
        total += if per_chamber {
            a
        } else {
            a * num_traits::pow(BigInt::from(2), k as usize)
        };
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntboundCheck {
    pub k: u64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub blocks: Vec<u64>,
    pub l: u64,
    #[serde(serialize_with = "ser_bigints")]
    pub a: Vec<BigInt>,
    /// Per-k checks of `a_k <= 2^{k-1}/k! * a_0`; only run for `l >= 5`.
    pub intbound: Vec<IntboundCheck>,
    pub intbound_ok: bool,
    /// The bracket-sum inequalities are stated for `l >= 3`.
    pub lemma_applicable: bool,
    pub lemma_ok_real: bool,
    pub lemma_ok_chamber: bool,
    /// `multinomial(l; blocks) < n^l`
    pub domination_ok: bool,
}

impl InequalityReport {
    pub fn all_ok(&self) -> bool {
        self.intbound_ok && self.lemma_ok_real && self.lemma_ok_chamber && self.domination_ok
    }
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().serialize(s)
}

/// Decides `lhs < (e^s - 1)/2 * a0` exactly, refining the enclosure of `e^s`
/// until the answer is certain.
fn certified_less(lhs: &BigInt, s: u32, a0: &BigInt) -> bool {
    let two_lhs = BigRational::from_integer(lhs * 2);
    let a0 = BigRational::from_integer(a0.clone());
    let mut terms = 40;
    loop {
        let (lo, hi) = exp_enclosure(s, terms);
        let one = BigRational::one();
        if two_lhs < (lo - &one) * &a0 {
            return true;
        }
        if two_lhs >= (hi - one) * &a0 {
            return false;
        }
        terms *= 2;
        if terms > 1 << 14 {
            // the two sides agree to thousands of digits; e^s is irrational
            // so this is unreachable for integer inputs
            return false;
        }
    }
}

pub fn verify_inequalities(blocks: &[u64]) -> Result<InequalityReport> {
    check_blocks(blocks)?;
    let l: u64 = blocks.iter().sum();
    let a: Vec<BigInt> = (0..=l).map(|k| a_k(blocks, k)).collect::<Result<_>>()?;
    let a0 = &a[0];
    let intbound: Vec<IntboundCheck> = if l >= 5 {
        (1..=l)
            .map(|k| IntboundCheck {
                k,
                // a_k * k! <= 2^{k-1} * a_0
                ok: &a[k as usize] * factorial(k)
                    <= num_traits::pow(BigInt::from(2), (k - 1) as usize) * a0,
            })
            .collect()
    } else {
        Vec::new()
    };
    let intbound_ok = intbound.iter().all(|c| c.ok);
    let lemma_applicable = l >= 3;
    let (lemma_ok_real, lemma_ok_chamber) = if lemma_applicable {
        let full = bracket_sum(blocks, false)?;
        let chamber = bracket_sum(blocks, true)?;
        (certified_less(&full, 4, a0), certified_less(&chamber, 2, a0))
    } else {
        (true, true)
    };
    let n = blocks.len() as u64;
    let domination_ok =
        multinomial(l, blocks)? < num_traits::pow(BigInt::from(n), l as usize);
    Ok(InequalityReport {
        blocks: blocks.to_vec(),
        l,
        a,
        intbound,
        intbound_ok,
        lemma_applicable,
        lemma_ok_real,
        lemma_ok_chamber,
        domination_ok,
    })
}

/// `n^l == sum over compositions of l into n nonnegative parts of the
/// multinomial coefficient`.
pub fn multinomial_identity_check(n: u64, l: u64) -> bool {
    if n == 0 {
        return false;
    }
    let sum = bounded_compositions(l, &vec![l; n as usize])
        .iter()
        .map(|parts| multinomial(l, parts).expect("composition sums to l"))
        .fold(BigInt::zero(), |acc, m| acc + m);
    sum == num_traits::pow(BigInt::from(n), l as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundEntry {
    pub variant: Variant,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub l: usize,
    pub blocks: Vec<usize>,
    #[serde(serialize_with = "ser_bigint")]
    pub lattice_index: BigInt,
    pub odd_index: bool,
    pub bounds: BTreeMap<String, BoundEntry>,
    /// Smallest applicable positive-solution bound.
    #[serde(serialize_with = "ser_bigint")]
    pub positive: BigInt,
    /// Smallest applicable real-solution bound, if any applies.
    #[serde(serialize_with = "ser_opt_bigint")]
    pub real: Option<BigInt>,
}

fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_i64() {
        Some(i) => s.serialize_i64(i),
        None => s.serialize_str(&v.to_string()),
    }
}

fn ser_opt_bigint<S: serde::Serializer>(
    v: &Option<BigInt>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_bigint(v, s),
        None => s.serialize_none(),
    }
}

const TRIVIAL_SIGNS: &str = "not applicable: trivial sign solutions (even lattice index)";

/// Collects every applicable bound for the structure.
///
/// The two-trinomial case `n = 2, l_1 = l_2 = 1` reports the `5` / `20`
/// bounds of Li, Rojas and Wang as the operative ones.
pub fn best_bound(ms: &MixedStructure, lattice_index: &BigInt) -> BoundReport {
    let blocks: Vec<usize> = ms.block_sizes();
    let b64: Vec<u64> = blocks.iter().map(|&b| b as u64).collect();
    let n = ms.n();
    let l = ms.l();
    let odd = lattice_index.is_odd();
    let mut bounds = BTreeMap::new();
    let mut put = |name: &str, variant: Variant, bound: std::result::Result<BoundValue, String>| {
        let entry = match bound {
            Ok(b) => BoundEntry {
                variant,
                applicable: true,
                reason: None,
                bound: Some(b),
            },
            Err(reason) => BoundEntry {
                variant,
                applicable: false,
                reason: Some(reason),
                bound: None,
            },
        };
        bounds.insert(name.to_string(), entry);
    };
    let gate_real = |b: BoundValue| if odd { Ok(b) } else { Err(TRIVIAL_SIGNS.to_string()) };

    put(
        "khovanskii",
        Variant::Positive,
        Ok(khovanskii_bound(n as u64, l as u64)),
    );
    put(
        "bs07_positive",
        Variant::Positive,
        bs07_positive_bound(n as u64, l as u64).map_err(|e| e.to_string()),
    );
    put(
        "bbs_real",
        Variant::Real,
        bbs_real_bound(n as u64, l as u64)
            .map_err(|e| e.to_string())
            .and_then(gate_real),
    );
    put(
        "mixed_positive",
        Variant::Positive,
        mixed_bound(&b64, Variant::Positive).map_err(|e| e.to_string()),
    );
    put(
        "mixed_real",
        Variant::Real,
        mixed_bound(&b64, Variant::Real)
            .map_err(|e| e.to_string())
            .and_then(gate_real),
    );

    if n == 1 {
        // Descartes: l_1 + 2 terms give at most l_1 + 1 positive roots
        let terms = BigInt::from(blocks[0] + 2);
        put(
            "descartes_positive",
            Variant::Positive,
            Ok(BoundValue::integer(&terms - 1)),
        );
        put(
            "descartes_real",
            Variant::Real,
            Ok(BoundValue::integer((terms - 1) * 2)),
        );
    }

    // Li-Rojas-Wang: all but (at most) one equation are trinomials
    let trinomials = blocks.iter().filter(|&&b| b == 1).count();
    if n == 2 && blocks == [1, 1] {
        put(
            "lrw_positive",
            Variant::Positive,
            Ok(BoundValue::integer(BigInt::from(LRW_TRINOMIAL_PAIR.0))),
        );
        put(
            "lrw_real",
            Variant::Real,
            gate_real(BoundValue::integer(BigInt::from(LRW_TRINOMIAL_PAIR.1))),
        );
    } else if n >= 2 && trinomials >= n - 1 {
        let m = *blocks.iter().max().expect("n >= 2") as u64 + 2;
        put(
            "lrw_positive",
            Variant::Positive,
            Ok(BoundValue::integer(lrw_bound(n as u64, m))),
        );
    }

    // Avendano: a linear equation together with an m-nomial in two variables
    if n == 2 {
        let sys = ms.to_system();
        let linear = |i: usize| {
            sys.polys()[i]
                .terms()
                .keys()
                .all(|e| e.entries().iter().all(|&v| v >= 0) && e.degree() <= 1)
        };
        if let Some(i) = (0..2).find(|&i| linear(i)) {
            let m = sys.polys()[1 - i].num_terms() as u64;
            put(
                "avendano_real",
                Variant::Real,
                Ok(BoundValue::integer(avendano_bound(m))),
            );
        }
    }

    let min_of = |variant: Variant| {
        bounds
            .values()
            .filter(|e| e.variant == variant && e.applicable)
            .filter_map(|e| e.bound.as_ref().map(|b| b.integer_bound.clone()))
            .min()
    };
    let positive = min_of(Variant::Positive).expect("Khovanskii always applies");
    let real = min_of(Variant::Real);
    BoundReport {
        n,
        l,
        blocks,
        lattice_index: lattice_index.clone(),
        odd_index: odd,
        bounds,
        positive,
        real,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse_system::{detect_mixed_structure, FewnomialSystem};

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(2, &[1, 1]).unwrap(), int(2));
        assert_eq!(multinomial(4, &[2, 2]).unwrap(), int(6));
        assert_eq!(multinomial(10, &[3, 3, 4]).unwrap(), int(4200));
        assert_eq!(
            multinomial(5, &[1, 1]),
            Err(Error::PartSum { sum: 2, l: 5 })
        );
    }

    #[test]
    fn khovanskii_values() {
        assert_eq!(khovanskii_bound(1, 1).integer_bound, int(8));
        assert_eq!(khovanskii_bound(2, 2).integer_bound, int(5184));
        assert_eq!(khovanskii_bound(1, 0).integer_bound, int(2));
    }

    #[test]
    fn unmixed_values() {
        let b = bs07_positive_bound(2, 2).unwrap();
        assert_eq!(b.integer_bound, int(20));
        assert!((b.value - 20.778_112_197_861_3).abs() < 1e-9);
        let b = bbs_real_bound(2, 2).unwrap();
        assert_eq!(b.integer_bound, int(115));
        assert!((b.value - 115.196_300_066_288_48).abs() < 1e-9);
        // one variable, two terms past the constant: agrees with Descartes (l = 1)
        assert_eq!(bs07_positive_bound(1, 1).unwrap().integer_bound, int(2));
    }

    #[test]
    fn mixed_values() {
        let b = mixed_bound(&[1, 1], Variant::Positive).unwrap();
        assert_eq!(b.integer_bound, int(10));
        assert!((b.value - 10.389_056_098_930_65).abs() < 1e-9);
        assert_eq!(
            mixed_bound(&[1, 1], Variant::Real).unwrap().integer_bound,
            int(57)
        );
        assert_eq!(
            mixed_bound(&[1, 1, 1], Variant::Positive)
                .unwrap()
                .integer_bound,
            int(124)
        );
        assert_eq!(mixed_bound(&[2], Variant::Positive), Err(Error::UseDescartes(1)));
        assert_eq!(
            mixed_bound(&[2, 0], Variant::Positive),
            Err(Error::EmptyBlock(1))
        );
    }

    #[test]
    fn classical_integer_bounds() {
        assert_eq!(lrw_bound(2, 3), int(6));
        assert_eq!(LRW_TRINOMIAL_PAIR, (5, 20));
        assert_eq!(avendano_bound(3), int(14));
    }

    #[test]
    fn a_k_values() {
        assert_eq!(a_k(&[1, 1], 0).unwrap(), int(4));
        assert_eq!(a_k(&[1, 1], 1).unwrap(), int(6));
        assert_eq!(a_k(&[1, 1], 2).unwrap(), int(9));
        assert!(a_k(&[1, 1], 3).is_err());
        // a_0 equals 2^{C(l,2)} multinomial
        for blocks in [vec![2, 1], vec![1, 1, 1], vec![3, 2]] {
            let l: u64 = blocks.iter().sum();
            assert_eq!(
                a_k(&blocks, 0).unwrap(),
                num_traits::pow(int(2), choose2(l) as usize) * multinomial(l, &blocks).unwrap()
            );
        }
    }

    #[test]
    fn bracket_sums() {
        assert_eq!(bracket_sum(&[1, 1], false).unwrap(), int(48));
        assert_eq!(bracket_sum(&[1, 1], true).unwrap(), int(15));
        assert_eq!(bracket_sum(&[1], false), Err(Error::UseDescartes(1)));
    }

    #[test]
    fn inequality_reports() {
        let r = verify_inequalities(&[1, 1, 1]).unwrap();
        assert!(r.lemma_applicable && r.lemma_ok_real && r.lemma_ok_chamber);
        assert!(r.intbound.is_empty());
        let r = verify_inequalities(&[2, 2]).unwrap();
        assert!(r.all_ok());
        let r = verify_inequalities(&[1, 1, 1, 1, 1]).unwrap();
        assert_eq!(r.intbound.len(), 5);
        assert!(r.all_ok());
    }

    #[test]
    fn enclosures_bracket_e() {
        let e2 = std::f64::consts::E.powi(2);
        let (lo, hi) = exp_enclosure(2, 30);
        assert!((rational_to_f64(&lo) - e2).abs() < 1e-12);
        assert!((rational_to_f64(&hi) - e2).abs() < 1e-12);
        assert!(lo < hi);
        let (lo4, hi4) = exp_enclosure(4, 60);
        let w = rational_to_f64(&(hi4 - lo4));
        assert!(w > 0.0 && w < 1e-30);
    }

    #[test]
    fn identity() {
        assert!(multinomial_identity_check(2, 3));
        assert!(multinomial_identity_check(3, 2));
        for l in 0..6 {
            assert!(multinomial_identity_check(1, l));
        }
    }

    #[test]
    fn compositions() {
        assert_eq!(positive_compositions(3, 2), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(bounded_compositions(2, &[1, 1]), vec![vec![1, 1]]);
        assert_eq!(bounded_compositions(3, &[1, 1]), Vec::<Vec<u64>>::new());
    }

    fn structure(text: &str) -> MixedStructure {
        detect_mixed_structure(&FewnomialSystem::from_json(text).unwrap()).unwrap()
    }

    #[test]
    fn best_bound_two_trinomials() {
        let ms = structure(
            r#"{"n":2,"polys":[
            [{"e":[2,0],"c":"1"},{"e":[0,1],"c":"-1"},{"e":[0,0],"c":"-1"}],
            [{"e":[0,2],"c":"1"},{"e":[1,0],"c":"-1"},{"e":[0,0],"c":"-1"}]]}"#,
        );
        let r = best_bound(&ms, &int(1));
        assert_eq!(r.positive, int(5));
        assert_eq!(r.real, Some(int(20)));
        assert_eq!(
            r.bounds["mixed_positive"].bound.as_ref().unwrap().integer_bound,
            int(10)
        );

        let even = best_bound(&ms, &int(4));
        assert_eq!(even.positive, int(5));
        let e = &even.bounds["mixed_real"];
        assert!(!e.applicable);
        assert!(e.reason.as_ref().unwrap().contains("trivial sign solutions"));
        assert_eq!(even.real, None);
    }

    #[test]
    fn best_bound_without_override() {
        let ms = structure(
            r#"{"n":2,"polys":[
            [{"e":[3,0],"c":"1"},{"e":[0,1],"c":"2"},{"e":[1,1],"c":"-3"},{"e":[0,0],"c":"-1"}],
            [{"e":[0,3],"c":"1"},{"e":[1,0],"c":"-1"},{"e":[0,0],"c":"-1"}]]}"#,
        );
        assert_eq!(ms.block_sizes(), vec![2, 1]);
        let r = best_bound(&ms, &int(1));
        let mp = r.bounds["mixed_positive"].bound.as_ref().unwrap();
        assert_eq!(mp.integer_bound, int(62));
        assert_eq!(mp.multinomial, int(3));
        assert_eq!(mp.pow2, 3);
        // general Li-Rojas-Wang with m = 4 terms: 2 + 4 + 8
        assert_eq!(
            r.bounds["lrw_positive"].bound.as_ref().unwrap().integer_bound,
            int(14)
        );
        assert!(!r.bounds.contains_key("lrw_real"));
    }

    #[test]
    fn domination_is_strict() {
        for n in 2..5u64 {
            for l in n..9 {
                for blocks in positive_compositions(l, n as usize) {
                    let mixed = mixed_bound(&blocks, Variant::Positive).unwrap();
                    let unmixed = bs07_positive_bound(n, l).unwrap();
                    assert!(mixed.multinomial < unmixed.multinomial);
                    assert!(mixed.integer_bound <= unmixed.integer_bound);
                    let mr = mixed_bound(&blocks, Variant::Real).unwrap();
                    assert!(mr.integer_bound <= bbs_real_bound(n, l).unwrap().integer_bound);
                }
            }
        }
    }
}
