//! Gale dual systems and master functions.
//!
//! Coordinates are laid out in block order throughout. Relation vectors
//! `alpha` have `n + l` entries indexed by `(i, j)` with `j = 0..=l_i`;
//! `y` and `z` vectors have `l` entries indexed by `(i, j)` with
//! `j = 1..=l_i`.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::lattice::{ExponentMatrix, RelationBasis};
use crate::sparse_system::{
    rational_pow, rational_to_f64, rational_to_string, ExponentVector, FewnomialSystem,
    LaurentPolynomial, MixedStructure,
};

/// Offsets of each block inside relation vectors (`n + l` layout).
fn alpha_offsets(block_sizes: &[usize]) -> Vec<usize> {
    block_sizes
        .iter()
        .scan(0, |acc, &l| {
            let start = *acc;
            *acc += l + 1;
            Some(start)
        })
        .collect()
}

/// Offsets of each block inside `y`/`z` vectors (`l` layout).
fn coord_offsets(block_sizes: &[usize]) -> Vec<usize> {
    block_sizes
        .iter()
        .scan(0, |acc, &l| {
            let start = *acc;
            *acc += l;
            Some(start)
        })
        .collect()
}

fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len => {
            let (a, b) = values.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaleSystem {
    structure: MixedStructure,
    relations: RelationBasis,
    alpha: Vec<Vec<i64>>,
}

pub fn build_gale_system(ms: &MixedStructure, rb: &RelationBasis) -> Result<GaleSystem> {
    let n = ms.n();
    let l = ms.l();
    if rb.is_empty() {
        return Err(Error::EmptyRelations);
    }
    if rb.alphas.cols() != n + l || rb.alphas.rows() != l {
        return Err(Error::DimensionMismatch(format!(
            "relation basis is {}x{}, structure needs {l}x{}",
            rb.alphas.rows(),
            rb.alphas.cols(),
            n + l
        )));
    }
    let w = ExponentMatrix::from_structure(ms);
    if !rb.alphas.mul(&w.matrix).is_zero() {
        return Err(Error::DimensionMismatch(
            "relation basis does not annihilate the exponent matrix".into(),
        ));
    }
    Ok(GaleSystem {
        structure: ms.clone(),
        relations: rb.clone(),
        alpha: rb.alphas.to_i64_rows()?,
    })
}

impl GaleSystem {
    pub fn n(&self) -> usize {
        self.structure.n()
    }

    pub fn l(&self) -> usize {
        self.structure.l()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.structure.block_sizes()
    }

    pub fn structure(&self) -> &MixedStructure {
        &self.structure
    }

    pub fn relations(&self) -> &RelationBasis {
        &self.relations
    }

    pub fn alpha(&self) -> &[Vec<i64>] {
        &self.alpha
    }

    /// `p_i(y_i)` for every block.
    pub fn eval_p(&self, y: &[f64]) -> Vec<f64> {
        let offs = coord_offsets(&self.block_sizes());
        self.structure
            .blocks()
            .iter()
            .zip(offs)
            .map(|(b, off)| {
                let a = &b.coefficients;
                rational_to_f64(&a[0])
                    + a[1..]
                        .iter()
                        .enumerate()
                        .map(|(j, c)| rational_to_f64(c) * y[off + j])
                        .sum::<f64>()
            })
            .collect()
    }

    /// `prod_i p_i^{alpha_{i,0}} prod_j y_{i,j}^{alpha_{i,j}} - 1` for every
    /// relation, with signs kept.
    pub fn residuals(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.l() {
            return Err(Error::DimensionMismatch(format!(
                "y has {} entries, expected {}",
                y.len(),
                self.l()
            )));
        }
        let p = self.eval_p(y);
        if let Some(i) = p.iter().position(|v| *v == 0.0) {
            return Err(Error::OnArrangement(format!("p_{} = 0", i + 1)));
        }
        if let Some(j) = y.iter().position(|v| *v == 0.0) {
            return Err(Error::OnArrangement(format!("y coordinate {j} is zero")));
        }
        let sizes = self.block_sizes();
        let aoff = alpha_offsets(&sizes);
        let yoff = coord_offsets(&sizes);
        Ok(self
            .alpha
            .iter()
            .map(|row| {
                let mut prod = 1.0;
                for (i, &li) in sizes.iter().enumerate() {
                    prod *= p[i].powi(row[aoff[i]] as i32);
                    for j in 0..li {
                        prod *= y[yoff[i] + j].powi(row[aoff[i] + 1 + j] as i32);
                    }
                }
                prod - 1.0
            })
            .collect())
    }

    /// Polynomial form of the Gale system in the `l` variables `y`.
    ///
    /// Relation `k` becomes
    /// `prod_{alpha_{i,0} > 0} p_i^{alpha_{i,0}} * y^{alpha_y} - prod_{alpha_{i,0} < 0} p_i^{-alpha_{i,0}}`,
    /// a Laurent polynomial in `y`. Its zeros off `{p_i = 0}` are exactly the
    /// zeros of the Gale system.
    pub fn to_polynomial_system(&self) -> FewnomialSystem {
        let l = self.l();
        let sizes = self.block_sizes();
        let aoff = alpha_offsets(&sizes);
        let yoff = coord_offsets(&sizes);
        let p_polys: Vec<LaurentPolynomial> = self
            .structure
            .blocks()
            .iter()
            .zip(&yoff)
            .map(|(b, &off)| {
                let mut terms = vec![(ExponentVector::zero(l), b.coefficients[0].clone())];
                for (j, a) in b.coefficients[1..].iter().enumerate() {
                    let mut e = vec![0; l];
                    e[off + j] = 1;
                    terms.push((ExponentVector::new(e), a.clone()));
                }
                LaurentPolynomial::from_terms_summing(l, terms)
            })
            .collect();
        let polys = self
            .alpha
            .iter()
            .map(|row| {
                let one = LaurentPolynomial::from_terms_summing(
                    l,
                    [(ExponentVector::zero(l), BigRational::one())],
                );
                let mut lhs = one.clone();
                let mut rhs = one;
                let mut mono = vec![0i64; l];
                for (i, &li) in sizes.iter().enumerate() {
                    let a0 = row[aoff[i]];
                    if a0 > 0 {
                        lhs = lhs.mul(&p_polys[i].pow(a0 as u32));
                    } else if a0 < 0 {
                        rhs = rhs.mul(&p_polys[i].pow((-a0) as u32));
                    }
                    for j in 0..li {
                        mono[yoff[i] + j] = row[aoff[i] + 1 + j];
                    }
                }
                lhs.shift(&ExponentVector::new(mono)).sub(&rhs)
            })
            .collect();
        FewnomialSystem::new(polys).expect("l polynomials in l variables")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let p: Vec<serde_json::Value> = self
            .structure
            .blocks()
            .iter()
            .map(|b| {
                b.coefficients
                    .iter()
                    .enumerate()
                    .map(|(j, c)| json!({"j": j, "c": rational_to_string(c)}))
                    .collect()
            })
            .collect();
        let exponents: Vec<serde_json::Value> = self
            .structure
            .blocks()
            .iter()
            .map(|b| {
                json!({
                    "lead": b.lead.entries(),
                    "body": b.body.iter().map(|w| w.entries().to_vec()).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "n": self.n(),
            "l": self.l(),
            "blocks": self.block_sizes(),
            "alpha": self.alpha,
            "p": p,
            "exponents": exponents,
            "system": self.to_polynomial_system().to_json_value(),
        })
    }
}

/// `y_{i,j} = x^{w_{i,j}}` for `j >= 1`.
pub fn push_solution(ms: &MixedStructure, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != ms.n() {
        return Err(Error::DimensionMismatch(format!(
            "x has {} entries, expected {}",
            x.len(),
            ms.n()
        )));
    }
    if let Some(m) = x.iter().position(|v| *v == 0.0) {
        return Err(Error::ZeroCoordinate(m + 1));
    }
    Ok(ms
        .blocks()
        .iter()
        .flat_map(|b| b.body.iter().map(|w| w.eval(x)))
        .collect())
}

/// Normalised master functions
/// `f_k(z) = prod_i |q_i(z_i)|^{alpha_{i,0}} prod_j |z_{i,j}|^{alpha_{i,j}}`,
/// `q_i = 1 + z_{i,1} + ... + z_{i,l_i}`, together with the constants `b_i`
/// and `d_k = (prod_i |b_i|^{alpha_{i,0}})^{-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MasterFunctionSystem {
    block_sizes: Vec<usize>,
    alpha: Vec<Vec<i64>>,
    #[serde(serialize_with = "ser_rationals")]
    b: Vec<BigRational>,
    #[serde(serialize_with = "ser_rationals")]
    d: Vec<BigRational>,
}

fn ser_rationals<S: serde::Serializer>(
    v: &[BigRational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    v.iter()
        .map(rational_to_string)
        .collect::<Vec<_>>()
        .serialize(s)
}

impl MasterFunctionSystem {
    pub fn new(block_sizes: Vec<usize>, alpha: Vec<Vec<i64>>, b: Vec<BigRational>) -> Result<Self> {
        let n = block_sizes.len();
        let l: usize = block_sizes.iter().sum();
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} constants for {n} blocks",
                b.len()
            )));
        }
        if b.iter().any(Zero::is_zero) {
            return Err(Error::ZeroCoefficient { poly: 0 });
        }
        if let Some(row) = alpha.iter().find(|r| r.len() != n + l) {
            return Err(Error::DimensionMismatch(format!(
                "relation of length {}, expected {}",
                row.len(),
                n + l
            )));
        }
        let aoff = alpha_offsets(&block_sizes);
        let d = alpha
            .iter()
            .map(|row| {
                let prod = b
                    .iter()
                    .enumerate()
                    .fold(BigRational::one(), |acc, (i, bi)| {
                        acc * rational_pow(&bi.abs(), row[aoff[i]])
                    });
                prod.recip()
            })
            .collect();
        Ok(MasterFunctionSystem {
            block_sizes,
            alpha,
            b,
            d,
        })
    }

    pub fn n(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn l(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn alpha(&self) -> &[Vec<i64>] {
        &self.alpha
    }

    pub fn b(&self) -> &[BigRational] {
        &self.b
    }

    pub fn d(&self) -> &[BigRational] {
        &self.d
    }

    /// `alpha^{(k)}_{i,j}` with `j = 0` the block exponent.
    pub fn alpha_at(&self, k: usize, i: usize, j: usize) -> i64 {
        self.alpha[k][alpha_offsets(&self.block_sizes)[i] + j]
    }

    /// `q_i(z_i)` for every block.
    pub fn eval_q(&self, z: &[f64]) -> Vec<f64> {
        let offs = coord_offsets(&self.block_sizes);
        self.block_sizes
            .iter()
            .zip(offs)
            .map(|(&li, off)| 1.0 + z[off..off + li].iter().sum::<f64>())
            .collect()
    }

    fn check_domain(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.l() {
            return Err(Error::DimensionMismatch(format!(
                "z has {} entries, expected {}",
                z.len(),
                self.l()
            )));
        }
        let offs = coord_offsets(&self.block_sizes);
        for (i, &li) in self.block_sizes.iter().enumerate() {
            for j in 0..li {
                if z[offs[i] + j] == 0.0 {
                    return Err(Error::OnArrangement(format!("z_{{{},{}}} = 0", i + 1, j + 1)));
                }
            }
        }
        let q = self.eval_q(z);
        if let Some(i) = q.iter().position(|v| *v == 0.0) {
            return Err(Error::OnArrangement(format!("q_{}(z) = 0", i + 1)));
        }
        Ok(q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MasterValues {
    pub f: f64,
    pub phi: f64,
    pub g: f64,
}

pub fn evaluate_master(mfs: &MasterFunctionSystem, k: usize, z: &[f64]) -> Result<MasterValues> {
    if k >= mfs.alpha.len() {
        return Err(Error::IndexRange {
            k,
            l: mfs.alpha.len(),
        });
    }
    let q = mfs.check_domain(z)?;
    let row = &mfs.alpha[k];
    let aoff = alpha_offsets(&mfs.block_sizes);
    let zoff = coord_offsets(&mfs.block_sizes);
    let mut terms = Vec::with_capacity(row.len());
    for (i, &li) in mfs.block_sizes.iter().enumerate() {
        terms.push(row[aoff[i]] as f64 * q[i].abs().ln());
        for j in 0..li {
            terms.push(row[aoff[i] + 1 + j] as f64 * z[zoff[i] + j].abs().ln());
        }
    }
    let phi = pairwise_sum(&terms);
    let f = phi.exp();
    Ok(MasterValues {
        f,
        phi,
        g: f - rational_to_f64(&mfs.d[k]),
    })
}

/// `y_{i,j} = scale_{i,j} z_{i,j}` with `scale_{i,j} = a_{i,0} / a_{i,j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMap {
    pub scale: Vec<BigRational>,
}

impl ZMap {
    pub fn z_to_y(&self, z: &[BigRational]) -> Vec<BigRational> {
        z.iter().zip(&self.scale).map(|(v, s)| v * s).collect()
    }

    pub fn y_to_z(&self, y: &[BigRational]) -> Vec<BigRational> {
        y.iter().zip(&self.scale).map(|(v, s)| v / s).collect()
    }

    pub fn z_to_y_f64(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(&self.scale)
            .map(|(v, s)| v * rational_to_f64(s))
            .collect()
    }

    pub fn y_to_z_f64(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(&self.scale)
            .map(|(v, s)| v / rational_to_f64(s))
            .collect()
    }
}

/// Substitutes `y_{i,j} = a_{i,0} z_{i,j} / a_{i,j}` so that
/// `p_i(y_i) = a_{i,0} q_i(z_i)`; the constants become `b_i = a_{i,0}`.
pub fn normalize_to_z(gs: &GaleSystem) -> Result<(MasterFunctionSystem, ZMap)> {
    let mut scale = Vec::with_capacity(gs.l());
    let mut b = Vec::with_capacity(gs.n());
    for (i, block) in gs.structure.blocks().iter().enumerate() {
        let a = &block.coefficients;
        if a.iter().any(Zero::is_zero) {
            return Err(Error::ZeroCoefficient { poly: i });
        }
        b.push(a[0].clone());
        scale.extend(a[1..].iter().map(|aj| &a[0] / aj));
    }
    let mfs = MasterFunctionSystem::new(gs.block_sizes(), gs.alpha.clone(), b)?;
    Ok((mfs, ZMap { scale }))
}

/// Above this many sign choices enumeration is refused.
pub const SIGN_SYSTEM_CAP: usize = 20;

/// All systems `x^{w_{i,0}} = ±a_{i,0} ± a_{i,1} x^{w_{i,1}} ± ...`.
///
/// The lead side is fixed, so no two sign choices give the same system.
pub fn enumerate_sign_systems(ms: &MixedStructure) -> Result<Vec<MixedStructure>> {
    let count: usize = ms.block_sizes().iter().map(|l| l + 1).sum();
    if count > SIGN_SYSTEM_CAP {
        return Err(Error::TooManySignSystems {
            count,
            cap: SIGN_SYSTEM_CAP,
        });
    }
    let mut out = Vec::with_capacity(1 << count);
    for mask in 0u64..(1u64 << count) {
        let mut bit = 0;
        let blocks = ms
            .blocks()
            .iter()
            .map(|b| {
                let mut nb = b.clone();
                for c in nb.coefficients.iter_mut() {
                    if mask >> bit & 1 == 1 {
                        *c = -c.clone();
                    }
                    bit += 1;
                }
                nb
            })
            .collect();
        out.push(MixedStructure::new(ms.n(), blocks)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(v: f64) -> Sign {
        if v > 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Chamber label: signs of every `z_{i,j}` and of every `q_i(z_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SignVector {
    pub coords: Vec<Sign>,
    pub blocks: Vec<Sign>,
}

impl SignVector {
    pub fn all_plus(l: usize, n: usize) -> Self {
        SignVector {
            coords: vec![Sign::Plus; l],
            blocks: vec![Sign::Plus; n],
        }
    }

    pub fn is_all_plus(&self) -> bool {
        self.coords
            .iter()
            .chain(&self.blocks)
            .all(|s| *s == Sign::Plus)
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |s: &Sign| if *s == Sign::Plus { '+' } else { '-' };
        let coords: String = self.coords.iter().map(c).collect();
        let blocks: String = self.blocks.iter().map(c).collect();
        write!(f, "{coords}|{blocks}")
    }
}

pub fn chamber_of(mfs: &MasterFunctionSystem, z: &[f64]) -> Result<SignVector> {
    let q = mfs.check_domain(z)?;
    Ok(SignVector {
        coords: z.iter().map(|&v| Sign::of(v)).collect(),
        blocks: q.iter().map(|&v| Sign::of(v)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{kernel_basis, IntMatrix};
    use crate::sparse_system::{detect_mixed_structure, parse_rational, MixedBlock};

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn worked() -> MixedStructure {
        let sys = FewnomialSystem::from_json(
            r#"{"n":2,"polys":[
            [{"e":[2,0],"c":"1"},{"e":[0,1],"c":"-1"},{"e":[0,0],"c":"-1"}],
            [{"e":[0,2],"c":"1"},{"e":[1,0],"c":"-1"},{"e":[0,0],"c":"-1"}]]}"#,
        )
        .unwrap();
        detect_mixed_structure(&sys).unwrap()
    }

    fn worked_basis() -> RelationBasis {
        RelationBasis {
            alphas: IntMatrix::from_i64_rows(&[vec![1, 0, 0, -2], vec![0, 2, -1, 0]], 4),
            labels: vec![(0, 0), (0, 1), (1, 0), (1, 1)],
        }
    }

    const PHI: f64 = 1.618_033_988_749_895;

    #[test]
    fn worked_example_equations() {
        let gs = build_gale_system(&worked(), &worked_basis()).unwrap();
        // (1 + y11) y21^-2 = 1 and y11^2 (1 + y21)^-1 = 1
        for &(a, b) in &[(0.5, 2.0), (3.0, -0.25)] {
            let r = gs.residuals(&[a, b]).unwrap();
            assert!((r[0] - ((1.0 + a) / (b * b) - 1.0)).abs() < 1e-14);
            assert!((r[1] - (a * a / (1.0 + b) - 1.0)).abs() < 1e-14);
        }
        let poly = gs.to_polynomial_system();
        // (1 + y11) y21^-2 - 1 and y11^2 - (1 + y21)
        assert_eq!(poly.polys()[0].num_terms(), 3);
        assert_eq!(poly.polys()[1].num_terms(), 3);
        let v = poly.eval(&[PHI, PHI]);
        assert!(v.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn pushed_solution_satisfies_gale_system() {
        let ms = worked();
        let gs = build_gale_system(&ms, &kernel_basis(&ExponentMatrix::from_structure(&ms)).unwrap())
            .unwrap();
        let y = push_solution(&ms, &[PHI, PHI]).unwrap();
        assert!((y[0] - PHI).abs() < 1e-15 && (y[1] - PHI).abs() < 1e-15);
        assert!(gs.residuals(&y).unwrap().iter().all(|r| r.abs() < 1e-9));
        let psi = (1.0 - 5f64.sqrt()) / 2.0;
        let y = push_solution(&ms, &[psi, psi]).unwrap();
        assert!(gs.residuals(&y).unwrap().iter().all(|r| r.abs() < 1e-9));
        assert_eq!(push_solution(&ms, &[1.0, 1.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(push_solution(&ms, &[0.0, 1.0]), Err(Error::ZeroCoordinate(1)));
    }

    #[test]
    fn empty_or_mismatched_basis() {
        let ms = worked();
        let empty = RelationBasis {
            alphas: IntMatrix::zeros(0, 4),
            labels: vec![],
        };
        assert_eq!(build_gale_system(&ms, &empty), Err(Error::EmptyRelations));
        let wrong = RelationBasis {
            alphas: IntMatrix::from_i64_rows(&[vec![1, 0, 0, 0], vec![0, 1, 0, 0]], 4),
            labels: vec![],
        };
        assert!(matches!(
            build_gale_system(&ms, &wrong),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn z_normalisation_of_unit_coefficients_is_identity() {
        let gs = build_gale_system(&worked(), &worked_basis()).unwrap();
        let (mfs, map) = normalize_to_z(&gs).unwrap();
        assert_eq!(map.scale, vec![q("1"), q("1")]);
        assert_eq!(mfs.b(), &[q("1"), q("1")]);
        assert_eq!(mfs.d(), &[q("1"), q("1")]);
        for k in 0..2 {
            let v = evaluate_master(&mfs, k, &[PHI, PHI]).unwrap();
            assert!(v.g.abs() < 1e-12);
            assert!((v.phi - v.f.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn z_normalisation_scales_by_coefficient_ratio() {
        // x^(1,0) = 2 - 4 x^(0,1) ; y^(0,1)... second block arbitrary
        let ms = MixedStructure::new(
            2,
            vec![
                MixedBlock {
                    lead: ExponentVector::new(vec![1, 0]),
                    body: vec![ExponentVector::new(vec![0, 1])],
                    coefficients: vec![q("2"), q("-4")],
                },
                MixedBlock {
                    lead: ExponentVector::new(vec![1, 1]),
                    body: vec![ExponentVector::new(vec![2, 1])],
                    coefficients: vec![q("3"), q("1/2")],
                },
            ],
        )
        .unwrap();
        let rb = kernel_basis(&ExponentMatrix::from_structure(&ms)).unwrap();
        let gs = build_gale_system(&ms, &rb).unwrap();
        let (mfs, map) = normalize_to_z(&gs).unwrap();
        // u = (2 / -4) z = -z/2
        assert_eq!(map.scale[0], q("-1/2"));
        assert_eq!(map.scale[1], q("6"));
        assert_eq!(mfs.b(), &[q("2"), q("3")]);
        // round trip is exact
        let z = vec![q("7/3"), q("-5/11")];
        assert_eq!(map.y_to_z(&map.z_to_y(&z)), z);
        // p_i(y) = a_{i,0} q_i(z)
        let zf = [0.3, -0.7];
        let yf = map.z_to_y_f64(&zf);
        let p = gs.eval_p(&yf);
        let qz = mfs.eval_q(&zf);
        assert!((p[0] - 2.0 * qz[0]).abs() < 1e-14);
        assert!((p[1] - 3.0 * qz[1]).abs() < 1e-14);
        // d_k = prod |b_i|^{-alpha_{i,0}}
        for k in 0..2 {
            let expected = 2f64.powi(-mfs.alpha_at(k, 0, 0) as i32)
                * 3f64.powi(-mfs.alpha_at(k, 1, 0) as i32);
            assert!((rational_to_f64(&mfs.d()[k]) - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn positive_coefficients_map_positive_chamber_to_all_plus() {
        let ms = worked();
        let gs = build_gale_system(&ms, &worked_basis()).unwrap();
        let (mfs, map) = normalize_to_z(&gs).unwrap();
        for y in [[0.1, 5.0], [2.0, 0.3], [10.0, 10.0]] {
            let z = map.y_to_z_f64(&y);
            assert!(chamber_of(&mfs, &z).unwrap().is_all_plus());
        }
    }

    #[test]
    fn master_function_edge_cases() {
        let mfs = MasterFunctionSystem::new(vec![1, 1], vec![vec![0; 4]], vec![q("1"), q("1")]).unwrap();
        let v = evaluate_master(&mfs, 0, &[0.4, -3.0]).unwrap();
        assert_eq!(v.f, 1.0);
        assert_eq!(v.phi, 0.0);
        let err = evaluate_master(&mfs, 0, &[-1.0, 2.0]).unwrap_err();
        assert!(err.to_string().contains("q_1"));
        let err = evaluate_master(&mfs, 0, &[1.0, 0.0]).unwrap_err();
        assert!(err.to_string().contains("z_{2,1}"));
    }

    #[test]
    fn chamber_labels_on_a_line() {
        let mfs = MasterFunctionSystem::new(vec![1], vec![vec![1, 1]], vec![q("1")]).unwrap();
        let s = chamber_of(&mfs, &[-2.0]).unwrap();
        assert_eq!((s.coords[0], s.blocks[0]), (Sign::Minus, Sign::Minus));
        let s = chamber_of(&mfs, &[-0.5]).unwrap();
        assert_eq!((s.coords[0], s.blocks[0]), (Sign::Minus, Sign::Plus));
        assert!(chamber_of(&mfs, &[1.0]).unwrap().is_all_plus());
        // z > 0 forces q > 0: only three labels occur
        let mut seen = std::collections::BTreeSet::new();
        for t in -400..400 {
            let z = t as f64 / 37.0 + 0.001;
            if let Ok(s) = chamber_of(&mfs, &[z]) {
                seen.insert(s);
            }
        }
        assert_eq!(seen.len(), 3);
    }

    #[test]
    fn sign_labels_separate_chambers_for_small_blocks() {
        // For l_i = 2 the complement of {z1 = 0, z2 = 0, 1 + z1 + z2 = 0}
        // has 7 chambers: count distinct labels on a fine grid.
        let mfs = MasterFunctionSystem::new(vec![2], vec![vec![1, 1, 1]; 2], vec![q("1")]).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for a in -60..60 {
            for b in -60..60 {
                let z = [a as f64 / 9.0 + 0.0013, b as f64 / 9.0 + 0.0029];
                if let Ok(s) = chamber_of(&mfs, &z) {
                    seen.insert(s);
                }
            }
        }
        assert_eq!(seen.len(), 7);
    }

    #[test]
    fn sign_systems() {
        let ms1 = MixedStructure::new(
            1,
            vec![MixedBlock {
                lead: ExponentVector::new(vec![2]),
                body: vec![ExponentVector::new(vec![1])],
                coefficients: vec![q("1"), q("1")],
            }],
        )
        .unwrap();
        assert_eq!(enumerate_sign_systems(&ms1).unwrap().len(), 4);
        let variants = enumerate_sign_systems(&worked()).unwrap();
        assert_eq!(variants.len(), 16);
        let distinct: std::collections::BTreeSet<_> = variants
            .iter()
            .map(|m| format!("{:?}", m.to_system()))
            .collect();
        assert_eq!(distinct.len(), 16);

        let big = MixedStructure::new(
            2,
            vec![
                MixedBlock {
                    lead: ExponentVector::new(vec![20, 0]),
                    body: (1..=10).map(|k| ExponentVector::new(vec![k, 1])).collect(),
                    coefficients: vec![q("1"); 11],
                },
                MixedBlock {
                    lead: ExponentVector::new(vec![0, 20]),
                    body: (1..=10).map(|k| ExponentVector::new(vec![k, 2])).collect(),
                    coefficients: vec![q("1"); 11],
                },
            ],
        )
        .unwrap();
        assert_eq!(
            enumerate_sign_systems(&big),
            Err(Error::TooManySignSystems { count: 22, cap: 20 })
        );
    }
}
