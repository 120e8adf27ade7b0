//! Seeded random mixed systems.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{lattice_index, ExponentMatrix};
use crate::sparse_system::{ExponentVector, MixedBlock, MixedStructure};

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSpec {
    pub n: usize,
    pub blocks: Vec<usize>,
    /// Exponent entries are drawn from `[-r, r]`.
    pub exponent_range: i64,
    /// Allow negative exponents.
    pub laurent: bool,
    /// Coefficient numerators from `[-c, c] \ {0}`, denominators from `1..=c`.
    pub coefficient_range: i64,
    /// Keep only systems whose exponents span a sublattice of odd index.
    pub odd_index: bool,
}

impl SampleSpec {
    pub fn new(blocks: &[usize]) -> Self {
        SampleSpec {
            n: blocks.len(),
            blocks: blocks.to_vec(),
            exponent_range: 3,
            laurent: false,
            coefficient_range: 9,
            odd_index: false,
        }
    }
}

fn random_exponent<R: Rng>(rng: &mut R, spec: &SampleSpec) -> ExponentVector {
    let lo = if spec.laurent { -spec.exponent_range } else { 0 };
    loop {
        let e: Vec<i64> = (0..spec.n)
            .map(|_| rng.gen_range(lo..=spec.exponent_range))
            .collect();
        if e.iter().any(|&v| v != 0) {
            return ExponentVector::new(e);
        }
    }
}

fn random_coefficient<R: Rng>(rng: &mut R, c: i64) -> BigRational {
    let num = loop {
        let v = rng.gen_range(-c..=c);
        if v != 0 {
            break v;
        }
    };
    BigRational::new(BigInt::from(num), BigInt::from(rng.gen_range(1..=c)))
}

/// One attempt at a mixed system; `None` if the exponents coincide or fail
/// to span a full-rank lattice (of odd index, when requested).
pub fn try_sample<R: Rng>(rng: &mut R, spec: &SampleSpec) -> Option<MixedStructure> {
    let total: usize = spec.blocks.iter().map(|l| l + 1).sum();
    let mut exps: Vec<ExponentVector> = Vec::with_capacity(total);
    while exps.len() < total {
        let e = random_exponent(rng, spec);
        if !exps.contains(&e) {
            exps.push(e);
        }
    }
    exps.shuffle(rng);
    let mut it = exps.into_iter();
    let blocks: Vec<MixedBlock> = spec
        .blocks
        .iter()
        .map(|&l| {
            let lead = it.next().expect("enough exponents");
            let mut body: Vec<ExponentVector> = it.by_ref().take(l).collect();
            body.sort();
            MixedBlock {
                lead,
                body,
                coefficients: (0..=l)
                    .map(|_| random_coefficient(rng, spec.coefficient_range))
                    .collect(),
            }
        })
        .collect();
    let ms = MixedStructure::new(spec.n, blocks).ok()?;
    let index = lattice_index(&ExponentMatrix::from_structure(&ms)).ok()?;
    if spec.odd_index && index.is_even() {
        return None;
    }
    Some(ms)
}

/// `count` systems drawn deterministically from `seed`.
pub fn sample_systems(spec: &SampleSpec, count: usize, seed: u64) -> Result<Vec<MixedStructure>> {
    if spec.blocks.len() != spec.n {
        return Err(Error::InvalidStructure(format!(
            "{} blocks for {} variables",
            spec.blocks.len(),
            spec.n
        )));
    }
    if let Some(i) = spec.blocks.iter().position(|&l| l == 0) {
        return Err(Error::EmptyBlock(i));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * (count + 1) {
            return Err(Error::Budget(format!(
                "only {} of {count} samples after {attempts} attempts",
                out.len()
            )));
        }
        if let Some(ms) = try_sample(&mut rng, spec) {
            out.push(ms);
        }
    }
    Ok(out)
}
