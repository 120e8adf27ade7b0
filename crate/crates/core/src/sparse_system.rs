//! Laurent polynomial systems and their mixed structure.
//!
//! A system is read from a small JSON dialect:
//!
//! ```json
//! {"n": 2, "polys": [[{"e": [2, 0], "c": "1"}, {"e": [0, 1], "c": "-1"}, {"e": [0, 0], "c": "-1"}], ...]}
//! ```
//!
//! Coefficients are exact rationals written as `"p/q"` or integer strings.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<i64>);

impl ExponentVector {
    pub fn new(entries: Vec<i64>) -> Self {
        ExponentVector(entries)
    }

    pub fn zero(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    /// `sum |w_m|`, the size used by solver budgets.
    pub fn abs_degree(&self) -> i64 {
        self.0.iter().map(|e| e.abs()).sum()
    }

    pub fn sub(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `x^w` for a real point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&e, &v)| v.powi(e as i32))
            .product()
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Canonical string form: `"p"` for integers, `"p/q"` otherwise.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::InvalidRational(s.to_string());
    let (num, den) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// `r^e` for an integer exponent; `r` must be nonzero when `e < 0`.
pub fn rational_pow(r: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { r.recip() } else { r.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPolynomial {
    n: usize,
    terms: BTreeMap<ExponentVector, BigRational>,
}

impl LaurentPolynomial {
    pub fn zero(n: usize) -> Self {
        LaurentPolynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a polynomial, rejecting zero coefficients and repeated
    /// exponents. `poly` is only used in error messages.
    pub fn from_terms(
        n: usize,
        poly: usize,
        terms: impl IntoIterator<Item = (ExponentVector, BigRational)>,
    ) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::ExponentLength {
                    poly,
                    found: e.len(),
                    expected: n,
                });
            }
            if c.is_zero() {
                return Err(Error::ZeroCoefficient { poly });
            }
            if out.contains_key(&e) {
                return Err(Error::DuplicateExponent {
                    poly,
                    exponent: e.0,
                });
            }
            out.insert(e, c);
        }
        Ok(LaurentPolynomial { n, terms: out })
    }

    /// Sums like terms and drops cancellations.
    pub fn from_terms_summing(
        n: usize,
        terms: impl IntoIterator<Item = (ExponentVector, BigRational)>,
    ) -> Self {
        let mut p = LaurentPolynomial::zero(n);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: ExponentVector, c: BigRational) {
        debug_assert_eq!(e.len(), self.n);
        match self.terms.entry(e) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<ExponentVector, BigRational> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant(&self) -> Option<&BigRational> {
        self.terms.get(&ExponentVector::zero(self.n))
    }

    pub fn has_constant(&self) -> bool {
        self.constant().is_some()
    }

    pub fn mul(&self, other: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = ExponentVector(e1.0.iter().zip(&e2.0).map(|(a, b)| a + b).collect());
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn sub(&self, other: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::from_terms_summing(
            self.n,
            [(ExponentVector::zero(self.n), BigRational::one())],
        );
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Multiplies by the monomial `x^shift`.
    pub fn shift(&self, shift: &ExponentVector) -> LaurentPolynomial {
        LaurentPolynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    (
                        ExponentVector(e.0.iter().zip(&shift.0).map(|(a, b)| a + b).collect()),
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| rational_to_f64(c) * e.eval(x))
            .sum()
    }

    /// `sum |c_w x^w|`, the natural scale for relative residuals.
    pub fn eval_abs(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| (rational_to_f64(c) * e.eval(x)).abs())
            .sum()
    }

    pub fn max_abs_degree(&self) -> i64 {
        self.terms.keys().map(ExponentVector::abs_degree).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FewnomialSystem {
    n: usize,
    polys: Vec<LaurentPolynomial>,
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    e: Vec<i64>,
    c: String,
}

#[derive(Serialize, Deserialize)]
struct SystemDoc {
    n: usize,
    polys: Vec<Vec<TermDoc>>,
}

impl FewnomialSystem {
    pub fn new(polys: Vec<LaurentPolynomial>) -> Result<Self> {
        let n = polys.first().map_or(0, LaurentPolynomial::n);
        if n == 0 || polys.len() != n {
            return Err(Error::NonSquare {
                n,
                polys: polys.len(),
            });
        }
        if let Some(p) = polys.iter().find(|p| p.n() != n) {
            return Err(Error::DimensionMismatch(format!(
                "polynomial in {} variables inside a system in {n}",
                p.n()
            )));
        }
        Ok(FewnomialSystem { n, polys })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn polys(&self) -> &[LaurentPolynomial] {
        &self.polys
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SystemDoc = serde_json::from_str(text)?;
        if doc.n == 0 || doc.polys.len() != doc.n {
            return Err(Error::NonSquare {
                n: doc.n,
                polys: doc.polys.len(),
            });
        }
        let mut polys = Vec::with_capacity(doc.n);
        for (i, terms) in doc.polys.into_iter().enumerate() {
            let parsed = terms
                .into_iter()
                .map(|t| Ok((ExponentVector(t.e), parse_rational(&t.c)?)))
                .collect::<Result<Vec<_>>>()?;
            polys.push(LaurentPolynomial::from_terms(doc.n, i, parsed)?);
        }
        Ok(FewnomialSystem { n: doc.n, polys })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = SystemDoc {
            n: self.n,
            polys: self
                .polys
                .iter()
                .map(|p| {
                    p.terms
                        .iter()
                        .map(|(e, c)| TermDoc {
                            e: e.0.clone(),
                            c: rational_to_string(c),
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("system document serializes")
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.polys.iter().map(|p| p.eval(x)).collect()
    }
}

/// One equation rewritten as `x^lead = a_0 + sum_j a_j x^{body_j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedBlock {
    pub lead: ExponentVector,
    pub body: Vec<ExponentVector>,
    /// `a_{i,0}, ..., a_{i,l_i}`
    pub coefficients: Vec<BigRational>,
}

impl MixedBlock {
    pub fn size(&self) -> usize {
        self.body.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedStructure {
    n: usize,
    blocks: Vec<MixedBlock>,
}

impl MixedStructure {
    /// Validates the invariants: `n` blocks, every `l_i > 0`, nonzero
    /// coefficients, and pairwise distinct nonconstant exponents.
    pub fn new(n: usize, blocks: Vec<MixedBlock>) -> Result<Self> {
        if blocks.len() != n || n == 0 {
            return Err(Error::NonSquare {
                n,
                polys: blocks.len(),
            });
        }
        let mut seen: HashMap<&ExponentVector, usize> = HashMap::new();
        for (i, b) in blocks.iter().enumerate() {
            if b.body.is_empty() {
                return Err(Error::Binomial { equation: i });
            }
            if b.coefficients.len() != b.body.len() + 1 {
                return Err(Error::InvalidStructure(format!(
                    "block {i} has {} coefficients for {} body monomials",
                    b.coefficients.len(),
                    b.body.len()
                )));
            }
            if b.coefficients.iter().any(Zero::is_zero) {
                return Err(Error::ZeroCoefficient { poly: i });
            }
            for w in std::iter::once(&b.lead).chain(&b.body) {
                if w.len() != n {
                    return Err(Error::ExponentLength {
                        poly: i,
                        found: w.len(),
                        expected: n,
                    });
                }
                if w.is_zero() {
                    return Err(Error::InvalidStructure(format!(
                        "block {i} uses the constant exponent as a monomial"
                    )));
                }
                if let Some(&first) = seen.get(w) {
                    return Err(Error::SharedMonomial {
                        exponent: w.0.clone(),
                        first,
                        second: i,
                    });
                }
                seen.insert(w, i);
            }
        }
        Ok(MixedStructure { n, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[MixedBlock] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(MixedBlock::size).collect()
    }

    pub fn l(&self) -> usize {
        self.blocks.iter().map(MixedBlock::size).sum()
    }

    /// All nonconstant exponents in block order.
    pub fn nonconstant_exponents(&self) -> Vec<&ExponentVector> {
        self.blocks
            .iter()
            .flat_map(|b| std::iter::once(&b.lead).chain(&b.body))
            .collect()
    }

    /// `g_i = x^{w_{i,0}} - a_{i,0} - sum_j a_{i,j} x^{w_{i,j}}`
    pub fn to_system(&self) -> FewnomialSystem {
        let polys = self
            .blocks
            .iter()
            .map(|b| {
                let mut terms = vec![
                    (b.lead.clone(), BigRational::one()),
                    (ExponentVector::zero(self.n), -b.coefficients[0].clone()),
                ];
                for (w, a) in b.body.iter().zip(&b.coefficients[1..]) {
                    terms.push((w.clone(), -a.clone()));
                }
                LaurentPolynomial::from_terms_summing(self.n, terms)
            })
            .collect();
        FewnomialSystem {
            n: self.n,
            polys,
        }
    }
}

/// Divides every polynomial lacking a constant term by its
/// lexicographically smallest monomial.
pub fn normalize_constant_terms(sys: &FewnomialSystem) -> Result<FewnomialSystem> {
    let polys = sys
        .polys
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if p.has_constant() {
                return Ok(p.clone());
            }
            let smallest = p.terms.keys().next().ok_or(Error::ZeroPolynomial { poly: i })?;
            let neg = ExponentVector(smallest.0.iter().map(|e| -e).collect());
            Ok(p.shift(&neg))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FewnomialSystem { n: sys.n, polys })
}

/// Orders lead candidates: total degree first, then lexicographically.
fn lead_key(e: &ExponentVector) -> (i64, &ExponentVector) {
    (e.degree(), e)
}

/// Rewrites each equation as `x^{w_{i,0}} = p_i(...)`.
///
/// The lead monomial is the largest nonconstant exponent in graded
/// lexicographic order. Fails on missing constants, binomials and shared
/// nonconstant monomials, in that order.
pub fn detect_mixed_structure(sys: &FewnomialSystem) -> Result<MixedStructure> {
    let n = sys.n;
    let zero = ExponentVector::zero(n);
    for (i, p) in sys.polys.iter().enumerate() {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial { poly: i });
        }
        if !p.has_constant() {
            return Err(Error::MissingConstant { equation: i });
        }
        if p.num_terms() < 3 {
            return Err(Error::Binomial { equation: i });
        }
    }
    let mut blocks = Vec::with_capacity(n);
    for p in &sys.polys {
        let lead = p
            .terms
            .keys()
            .filter(|e| **e != zero)
            .max_by(|a, b| lead_key(a).cmp(&lead_key(b)))
            .expect("at least two nonconstant monomials")
            .clone();
        let lead_coeff = &p.terms[&lead];
        let mut coefficients = vec![-(&p.terms[&zero]) / lead_coeff];
        let mut body = Vec::new();
        for (e, c) in &p.terms {
            if *e == zero || *e == lead {
                continue;
            }
            body.push(e.clone());
            coefficients.push(-c / lead_coeff);
        }
        blocks.push(MixedBlock {
            lead,
            body,
            coefficients,
        });
    }
    MixedStructure::new(n, blocks)
}

/// Integer `d`-th root of a nonnegative integer, if exact.
fn exact_root(v: &BigInt, d: u32) -> Option<BigInt> {
    let r = v.nth_root(d);
    (num_traits::pow(r.clone(), d as usize) == *v).then_some(r)
}

/// Removes one binomial equation `c_0 + c_1 x^w` by a unimodular monomial
/// change of coordinates sending `w` to `d e_1`, then fixing that
/// coordinate to the positive root of `s^d = -c_0 / c_1`.
///
/// The result has `n - 1` variables and the same number of positive
/// solutions.
pub fn eliminate_binomials(sys: &FewnomialSystem) -> Result<FewnomialSystem> {
    if sys.n < 2 {
        return Err(Error::LastVariable);
    }
    let normalized = normalize_constant_terms(sys)?;
    let (idx, binomial) = normalized
        .polys
        .iter()
        .enumerate()
        .find(|(_, p)| p.num_terms() == 2)
        .ok_or(Error::NoBinomial)?;
    let zero = ExponentVector::zero(sys.n);
    let c0 = binomial.terms[&zero].clone();
    let (w, c1) = binomial
        .terms
        .iter()
        .find(|(e, _)| **e != zero)
        .map(|(e, c)| (e.clone(), c.clone()))
        .expect("binomial with constant has one other term");
    let target = -c0 / c1;
    if !target.is_positive() {
        return Err(Error::NoPositiveSolutions { equation: idx });
    }
    let (d, m) = lattice::unimodular_to_axis(w.entries()).expect("nonzero exponent");
    let d = d.to_u32().ok_or(Error::IrrationalRoot { equation: idx })?;
    let root = match (exact_root(target.numer(), d), exact_root(target.denom(), d)) {
        (Some(p), Some(q)) => BigRational::new(p, q),
        _ => return Err(Error::IrrationalRoot { equation: idx }),
    };
    let m = m.to_i64_rows()?;
    let n = sys.n;
    let polys = normalized
        .polys
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != idx)
        .map(|(_, p)| {
            let terms = p.terms.iter().map(|(v, c)| {
                let image: Vec<i64> = (0..n)
                    .map(|col| (0..n).map(|row| v.0[row] * m[row][col]).sum())
                    .collect();
                let coeff = c * rational_pow(&root, image[0]);
                (ExponentVector(image[1..].to_vec()), coeff)
            });
            LaurentPolynomial::from_terms_summing(n - 1, terms)
        })
        .collect();
    Ok(FewnomialSystem { n: n - 1, polys })
}
