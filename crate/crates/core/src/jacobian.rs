//! Exact multidegree checks for Jacobians of master functions.
//!
//! Polynomials live in the variables `z_{i,j}` grouped into blocks. With
//! `q_i = 1 + z_{i,1} + ... + z_{i,l_i}`, `Q = prod q_i` and
//! `delta = Q * prod z_{i,j}`, the gradient of `phi_k` has entries
//! `alpha_{i,j}/z_{i,j} + alpha_{i,0}/q_i`. Scaling column `(i,j)` by
//! `z_{i,j}` and every `phi` row by `Q` makes the Jacobian polynomial; the
//! numerator `delta * det Jac` is then recovered by an exact division by a
//! power of `Q`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gale::MasterFunctionSystem;
use crate::lattice::{determinant, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockedPolynomial {
    block_sizes: Vec<usize>,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl BlockedPolynomial {
    pub fn zero(block_sizes: &[usize]) -> Self {
        BlockedPolynomial {
            block_sizes: block_sizes.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(block_sizes: &[usize], c: BigInt) -> Self {
        let l = block_sizes.iter().sum();
        Self::from_terms(block_sizes, [(vec![0; l], c)])
    }

    pub fn one(block_sizes: &[usize]) -> Self {
        Self::constant(block_sizes, BigInt::one())
    }

    /// The variable with flat index `v` (block order).
    pub fn var(block_sizes: &[usize], v: usize) -> Self {
        let mut e = vec![0; block_sizes.iter().sum()];
        e[v] = 1;
        Self::from_terms(block_sizes, [(e, BigInt::one())])
    }

    /// Sums repeated exponents and drops zero coefficients.
    pub fn from_terms(
        block_sizes: &[usize],
        terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>,
    ) -> Self {
        let mut p = Self::zero(block_sizes);
        for (e, c) in terms {
            assert_eq!(e.len(), p.nvars(), "exponent length");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigInt> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero(&self.block_sizes);
        }
        BlockedPolynomial {
            block_sizes: self.block_sizes.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.block_sizes);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(&self.block_sizes), |acc, _| acc.mul(self))
    }

    /// Per-block total degrees; `None` for the zero polynomial, whose degree
    /// is `-infinity`.
    pub fn multidegree(&self) -> Option<Vec<u32>> {
        if self.is_zero() {
            return None;
        }
        let mut deg = vec![0; self.block_sizes.len()];
        for e in self.terms.keys() {
            let mut off = 0;
            for (d, &li) in deg.iter_mut().zip(&self.block_sizes) {
                *d = (*d).max(e[off..off + li].iter().sum());
                off += li;
            }
        }
        Some(deg)
    }

    /// `z_v * d/dz_v`
    pub fn euler(&self, v: usize) -> Self {
        BlockedPolynomial {
            block_sizes: self.block_sizes.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[v] > 0)
                .map(|(e, c)| (e.clone(), c * e[v]))
                .collect(),
        }
    }

    /// Exact quotient `self / d`; fails unless the division leaves no
    /// remainder.
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        let (lead_e, lead_c) = d
            .terms
            .iter()
            .next_back()
            .ok_or_else(|| Error::NonCancellation("division by zero polynomial".into()))?;
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.block_sizes);
        while let Some((e, c)) = rem.terms.iter().next_back() {
            let divisible = e.iter().zip(lead_e).all(|(a, b)| a >= b);
            let (q, r) = c.div_rem(lead_c);
            if !divisible || !r.is_zero() {
                return Err(Error::NonCancellation(format!(
                    "remainder with {} terms",
                    rem.num_terms()
                )));
            }
            let shift: Vec<u32> = e.iter().zip(lead_e).map(|(a, b)| a - b).collect();
            let t = Self::from_terms(&self.block_sizes, [(shift, q)]);
            rem = rem.sub(&t.mul(d));
            quot = quot.add(&t);
        }
        Ok(quot)
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                c.to_f64().unwrap_or(f64::NAN)
                    * e.iter().zip(z).map(|(&k, v)| v.powi(k as i32)).product::<f64>()
            })
            .sum()
    }
}

impl Serialize for BlockedPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(e, c)| serde_json::json!({"e": e, "c": c.to_string()}))
            .collect();
        serde_json::json!({"blocks": self.block_sizes, "terms": terms}).serialize(s)
    }
}

fn offsets(block_sizes: &[usize]) -> Vec<usize> {
    block_sizes
        .iter()
        .scan(0, |acc, &l| {
            let s = *acc;
            *acc += l;
            Some(s)
        })
        .collect()
}

/// `q_i = 1 + z_{i,1} + ... + z_{i,l_i}`
pub fn q_poly(block_sizes: &[usize], i: usize) -> BlockedPolynomial {
    let off = offsets(block_sizes)[i];
    (0..block_sizes[i]).fold(BlockedPolynomial::one(block_sizes), |acc, j| {
        acc.add(&BlockedPolynomial::var(block_sizes, off + j))
    })
}

fn q_product(block_sizes: &[usize], skip: Option<usize>) -> BlockedPolynomial {
    (0..block_sizes.len())
        .filter(|&i| Some(i) != skip)
        .fold(BlockedPolynomial::one(block_sizes), |acc, i| {
            acc.mul(&q_poly(block_sizes, i))
        })
}

/// `delta = prod_i q_i * prod_{i,j} z_{i,j}`
pub fn delta(block_sizes: &[usize]) -> BlockedPolynomial {
    let l: usize = block_sizes.iter().sum();
    let z = BlockedPolynomial::from_terms(block_sizes, [(vec![1; l], BigInt::one())]);
    q_product(block_sizes, None).mul(&z)
}

/// The gradient of `phi_k = log f_k`: entry `(i,j)` is
/// `alpha_{i,j}/z_{i,j} + alpha_{i,0}/q_i`, kept as the pair
/// `(alpha_{i,j}, alpha_{i,0})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialPhi {
    pub block_sizes: Vec<usize>,
    pub entries: Vec<(i64, i64)>,
}

impl PartialPhi {
    pub fn new(mfs: &MasterFunctionSystem, k: usize) -> Self {
        let bs = mfs.block_sizes().to_vec();
        let entries = bs
            .iter()
            .enumerate()
            .flat_map(|(i, &li)| {
                (1..=li).map(move |j| (mfs.alpha_at(k, i, j), mfs.alpha_at(k, i, 0)))
            })
            .collect();
        PartialPhi {
            block_sizes: bs,
            entries,
        }
    }

    pub fn eval(&self, z: &[f64]) -> Vec<f64> {
        let offs = offsets(&self.block_sizes);
        let q: Vec<f64> = self
            .block_sizes
            .iter()
            .zip(&offs)
            .map(|(&li, &off)| 1.0 + z[off..off + li].iter().sum::<f64>())
            .collect();
        let mut out = Vec::with_capacity(z.len());
        for (i, &li) in self.block_sizes.iter().enumerate() {
            for j in 0..li {
                let v = offs[i] + j;
                let (a, a0) = self.entries[v];
                out.push(a as f64 / z[v] + a0 as f64 / q[i]);
            }
        }
        out
    }

    /// `Q * z_v * d phi / d z_v = alpha_v Q + alpha_{i,0} z_v Q / q_i`
    fn scaled_entries(&self, q: &BlockedPolynomial, q_without: &[BlockedPolynomial]) -> Vec<BlockedPolynomial> {
        let bs = &self.block_sizes;
        let mut out = Vec::with_capacity(self.entries.len());
        let mut v = 0;
        for (i, &li) in bs.iter().enumerate() {
            for _ in 0..li {
                let (a, a0) = self.entries[v];
                let term = q.scale(&BigInt::from(a)).add(
                    &BlockedPolynomial::var(bs, v)
                        .mul(&q_without[i])
                        .scale(&BigInt::from(a0)),
                );
                out.push(term);
                v += 1;
            }
        }
        out
    }
}

/// Determinant by cofactor expansion along rows, memoised over column sets.
pub fn det_laplace(m: &[Vec<BlockedPolynomial>], block_sizes: &[usize]) -> BlockedPolynomial {
    let s = m.len();
    let mut memo: HashMap<u32, BlockedPolynomial> = HashMap::new();
    memo.insert(0, BlockedPolynomial::one(block_sizes));
    for mask in 1u32..(1 << s) {
        let r = mask.count_ones() as usize - 1;
        let mut acc = BlockedPolynomial::zero(block_sizes);
        for c in 0..s {
            if mask >> c & 1 == 0 || m[r][c].is_zero() {
                continue;
            }
            let rest = &memo[&(mask & !(1 << c))];
            if rest.is_zero() {
                continue;
            }
            let term = m[r][c].mul(rest);
            let above = (mask >> (c + 1)).count_ones();
            acc = if above % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        memo.insert(mask, acc);
    }
    memo.remove(&((1u32 << s) - 1)).expect("full mask")
}

/// Fraction-free Gaussian elimination over the polynomial ring.
pub fn det_bareiss(m: &[Vec<BlockedPolynomial>], block_sizes: &[usize]) -> Result<BlockedPolynomial> {
    let s = m.len();
    if s == 0 {
        return Ok(BlockedPolynomial::one(block_sizes));
    }
    let mut a = m.to_vec();
    let mut negate = false;
    let mut prev = BlockedPolynomial::one(block_sizes);
    for k in 0..s - 1 {
        if a[k][k].is_zero() {
            match (k + 1..s).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return Ok(BlockedPolynomial::zero(block_sizes)),
            }
        }
        for i in k + 1..s {
            for j in k + 1..s {
                let num = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = num.div_exact(&prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[s - 1][s - 1].clone();
    Ok(if negate { d.neg() } else { d })
}

/// Every square submatrix of `alpha` (restricted to the first `rows` rows)
/// is nonsingular.
pub fn check_generic_alpha(alpha: &[Vec<i64>]) -> Result<()> {
    let rows = alpha.len();
    let cols = alpha.first().map_or(0, Vec::len);
    for s in 1..=rows.min(cols) {
        for rs in subsets(rows, s) {
            for cs in subsets(cols, s) {
                let sub: Vec<Vec<i64>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| alpha[r][c]).collect())
                    .collect();
                if determinant(&IntMatrix::from_i64_rows(&sub, s)).is_zero() {
                    return Err(Error::SingularAlpha(format!(
                        "minor on rows {rs:?} and columns {cs:?} vanishes"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn subsets(len: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, len: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            cur.push(i);
            rec(i + 1, len, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, len, k, &mut Vec::new(), &mut out);
    out
}

struct Scaled {
    q: BlockedPolynomial,
    q_without: Vec<BlockedPolynomial>,
}

impl Scaled {
    fn new(bs: &[usize]) -> Self {
        Scaled {
            q: q_product(bs, None),
            q_without: (0..bs.len()).map(|i| q_product(bs, Some(i))).collect(),
        }
    }

    /// `det / Q^{rows - 1}`, or `det * Q` without rows of `phi`.
    fn finish(&self, det: BlockedPolynomial, phi_rows: usize) -> Result<BlockedPolynomial> {
        if phi_rows == 0 {
            Ok(det.mul(&self.q))
        } else {
            det.div_exact(&self.q.pow(phi_rows as u32 - 1))
        }
    }
}

/// `delta * det Jac(phi_1, ..., phi_k, F_{k+1}, ..., F_l)`, by cofactor
/// expansion.
pub fn jacobian_numerator(
    mfs: &MasterFunctionSystem,
    k: usize,
    fs: &[BlockedPolynomial],
) -> Result<BlockedPolynomial> {
    check_generic_alpha(&mfs.alpha()[..k.min(mfs.alpha().len())])?;
    numerator_with(mfs, k, fs, Path::Laplace)
}

#[derive(Clone, Copy)]
enum Path {
    Laplace,
    Bareiss,
}

fn numerator_with(
    mfs: &MasterFunctionSystem,
    k: usize,
    fs: &[BlockedPolynomial],
    path: Path,
) -> Result<BlockedPolynomial> {
    let bs = mfs.block_sizes();
    let l = mfs.l();
    if k > l || mfs.alpha().len() < k {
        return Err(Error::IndexRange { k, l });
    }
    if fs.len() != l - k {
        return Err(Error::DimensionMismatch(format!(
            "{} polynomials F for k = {k}, l = {l}",
            fs.len()
        )));
    }
    if let Some(f) = fs.iter().find(|f| f.block_sizes() != bs) {
        return Err(Error::DimensionMismatch(format!(
            "F has blocks {:?}, expected {bs:?}",
            f.block_sizes()
        )));
    }
    let sc = Scaled::new(bs);
    let mut m: Vec<Vec<BlockedPolynomial>> = (0..k)
        .map(|r| PartialPhi::new(mfs, r).scaled_entries(&sc.q, &sc.q_without))
        .collect();
    m.extend(fs.iter().map(|f| (0..l).map(|v| f.euler(v)).collect()));
    let det = match path {
        Path::Laplace => det_laplace(&m, bs),
        Path::Bareiss => det_bareiss(&m, bs)?,
    };
    sc.finish(det, k)
}

/// `delta_M * det M` for the minor of `Jac(phi_1, ..., phi_l)` on the given
/// rows and columns, with `delta_M = prod_i q_i * prod_{c in cols} z_c`.
pub fn minor_numerator(
    mfs: &MasterFunctionSystem,
    rows: &[usize],
    cols: &[usize],
) -> Result<BlockedPolynomial> {
    minor_with(mfs, rows, cols, &Scaled::new(mfs.block_sizes()))
}

fn minor_with(
    mfs: &MasterFunctionSystem,
    rows: &[usize],
    cols: &[usize],
    sc: &Scaled,
) -> Result<BlockedPolynomial> {
    if rows.len() != cols.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows and {} columns",
            rows.len(),
            cols.len()
        )));
    }
    let l = mfs.l();
    if let Some(&bad) = rows.iter().find(|&&r| r >= mfs.alpha().len()) {
        return Err(Error::IndexRange { k: bad, l });
    }
    if let Some(&bad) = cols.iter().find(|&&c| c >= l) {
        return Err(Error::IndexRange { k: bad, l });
    }
    let m: Vec<Vec<BlockedPolynomial>> = rows
        .iter()
        .map(|&r| {
            let all = PartialPhi::new(mfs, r).scaled_entries(&sc.q, &sc.q_without);
            cols.iter().map(|&c| all[c].clone()).collect()
        })
        .collect();
    sc.finish(det_laplace(&m, mfs.block_sizes()), rows.len())
}

/// Dense polynomial with integer coefficients in `[-9, 9] \ {0}` and every
/// monomial of block degree at most `degree` in each block.
pub fn random_blocked_polynomial<R: Rng>(
    block_sizes: &[usize],
    degree: u32,
    rng: &mut R,
) -> BlockedPolynomial {
    fn block_monomials(vars: usize, degree: u32) -> Vec<Vec<u32>> {
        if vars == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for first in 0..=degree {
            for mut rest in block_monomials(vars - 1, degree - first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let mut monomials = vec![Vec::new()];
    for &li in block_sizes {
        let block = block_monomials(li, degree);
        monomials = monomials
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                block.iter().map(move |b| {
                    let mut e = prefix.clone();
                    e.extend(b);
                    e
                })
            })
            .collect();
    }
    BlockedPolynomial::from_terms(
        block_sizes,
        monomials.into_iter().map(|e| {
            let c = loop {
                let c = rng.gen_range(-9i64..=9);
                if c != 0 {
                    break c;
                }
            };
            (e, BigInt::from(c))
        }),
    )
}

/// `prod_{m=k+1}^{l} 2^{l-m} == 2^{C(l-k, 2)}`
pub fn degree_ladder_identity(l: u32, k: u32) -> bool {
    let lhs: BigInt = (k + 1..=l).fold(BigInt::one(), |acc, m| acc << (l - m));
    let r = l - k;
    lhs == BigInt::one() << (r * r.saturating_sub(1) / 2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetDegCase {
    pub k: usize,
    pub bound: Vec<u32>,
    pub multidegree: Option<Vec<u32>>,
    pub within: bool,
    pub equal: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetDegTrial {
    pub trial: usize,
    pub alpha: Vec<Vec<i64>>,
    pub cases: Vec<DetDegCase>,
    pub minors: usize,
    pub minor_violations: usize,
    /// Per-block count of minors reaching degree one.
    pub minor_equalities: Vec<usize>,
    pub paths_agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetDegReport {
    pub block_sizes: Vec<usize>,
    pub seed: u64,
    pub trials: Vec<DetDegTrial>,
    pub violations: usize,
    pub minor_violations: usize,
    /// Fraction of `(trial, k)` cases attaining the bound, per block.
    pub equality_rate: Vec<f64>,
    pub minor_equality_rate: Vec<f64>,
    pub ladder_identity: bool,
    pub paths_agree: bool,
    pub passed: bool,
}

pub const MAX_SUITE_L: usize = 6;
pub const EQUALITY_THRESHOLD: f64 = 0.9;

fn random_generic_alpha<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Vec<Vec<i64>> {
    loop {
        let a: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        if check_generic_alpha(&a).is_ok() {
            return a;
        }
    }
}

fn run_trial(bs: &[usize], trial: usize, seed: u64) -> Result<DetDegTrial> {
    let n = bs.len();
    let l: usize = bs.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let alpha = random_generic_alpha(l, n + l, &mut rng);
    let mfs = MasterFunctionSystem::new(
        bs.to_vec(),
        alpha.clone(),
        vec![num_rational::BigRational::one(); n],
    )?;
    // F_m has multidegree d_m = 2^{l-m}, m = 1..l
    let fs: Vec<BlockedPolynomial> = (1..=l)
        .map(|m| random_blocked_polynomial(bs, 1 << (l - m), &mut rng))
        .collect();
    let mut cases = Vec::with_capacity(l + 1);
    let mut paths_agree = true;
    for k in 0..=l {
        let tail = &fs[k..];
        let num = numerator_with(&mfs, k, tail, Path::Laplace)?;
        if k + 1 >= l {
            // cross-check the two determinant paths where cheap
            paths_agree &= num == numerator_with(&mfs, k, tail, Path::Bareiss)?;
        }
        let bound: Vec<u32> = (0..n)
            .map(|b| {
                1 + tail
                    .iter()
                    .map(|f| f.multidegree().map_or(0, |d| d[b]))
                    .sum::<u32>()
            })
            .collect();
        let md = num.multidegree();
        let (within, equal) = match &md {
            Some(d) => (
                d.iter().zip(&bound).all(|(a, b)| a <= b),
                d.iter().zip(&bound).map(|(a, b)| a == b).collect(),
            ),
            None => (true, vec![false; n]),
        };
        cases.push(DetDegCase {
            k,
            bound,
            multidegree: md,
            within,
            equal,
        });
    }
    let sc = Scaled::new(bs);
    let mut minors = 0;
    let mut minor_violations = 0;
    let mut minor_equalities = vec![0; n];
    for s in 0..=l {
        for rows in subsets(l, s) {
            for cols in subsets(l, s) {
                let num = minor_with(&mfs, &rows, &cols, &sc)?;
                minors += 1;
                if let Some(d) = num.multidegree() {
                    if d.iter().any(|&v| v > 1) {
                        minor_violations += 1;
                    }
                    for (e, &v) in minor_equalities.iter_mut().zip(&d) {
                        *e += (v == 1) as usize;
                    }
                }
            }
        }
    }
    Ok(DetDegTrial {
        trial,
        alpha,
        cases,
        minors,
        minor_violations,
        minor_equalities,
        paths_agree,
    })
}

/// Random instances of the determinant multidegree bound and the minor
/// bound: `alpha` with entries in `[-9, 9]` and all square minors nonzero,
/// `F_m` dense of multidegree `2^{l-m}`, every `k = 0..=l`.
pub fn random_detdeg_suite(n: usize, block_sizes: &[usize], trials: usize, seed: u64) -> Result<DetDegReport> {
    if block_sizes.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} blocks for n = {n}",
            block_sizes.len()
        )));
    }
    if let Some(i) = block_sizes.iter().position(|&b| b == 0) {
        return Err(Error::EmptyBlock(i));
    }
    let l: usize = block_sizes.iter().sum();
    if l > MAX_SUITE_L {
        return Err(Error::Budget(format!(
            "l = {l} exceeds the symbolic limit {MAX_SUITE_L}"
        )));
    }
    let trials_out: Vec<DetDegTrial> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(block_sizes, t, seed))
        .collect::<Result<_>>()?;
    let violations = trials_out
        .iter()
        .flat_map(|t| &t.cases)
        .filter(|c| !c.within)
        .count();
    let minor_violations = trials_out.iter().map(|t| t.minor_violations).sum();
    let cases = trials_out.iter().map(|t| t.cases.len()).sum::<usize>().max(1);
    let equality_rate: Vec<f64> = (0..n)
        .map(|b| {
            trials_out
                .iter()
                .flat_map(|t| &t.cases)
                .filter(|c| c.equal[b])
                .count() as f64
                / cases as f64
        })
        .collect();
    let minors = trials_out.iter().map(|t| t.minors).sum::<usize>().max(1);
    let minor_equality_rate = (0..n)
        .map(|b| {
            trials_out.iter().map(|t| t.minor_equalities[b]).sum::<usize>() as f64 / minors as f64
        })
        .collect();
    let ladder_identity = (0..=l as u32).all(|k| degree_ladder_identity(l as u32, k));
    let paths_agree = trials_out.iter().all(|t| t.paths_agree);
    let passed = violations == 0
        && minor_violations == 0
        && ladder_identity
        && paths_agree
        && (trials == 0 || equality_rate.iter().all(|&r| r >= EQUALITY_THRESHOLD));
    Ok(DetDegReport {
        block_sizes: block_sizes.to_vec(),
        seed,
        trials: trials_out,
        violations,
        minor_violations,
        equality_rate,
        minor_equality_rate,
        ladder_identity,
        paths_agree,
        passed,
    })
}
