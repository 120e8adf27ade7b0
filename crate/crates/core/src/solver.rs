//! Real solutions of small fewnomial systems in the torus.
//!
//! Each orthant `x = sigma * exp(u)` is searched separately over the box
//! `u in [-B, B]^n`. Boxes are discarded by interval exclusion tests,
//! certified to hold a unique root by the Krawczyk test, or bisected.
//! Completeness holds inside the box only; roots beyond it are not seen.

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gale::{build_gale_system, push_solution, GaleSystem};
use crate::interval::Interval;
use crate::lattice::{kernel_basis, lattice_index, ExponentMatrix};
use crate::sparse_system::{rational_to_f64, FewnomialSystem, MixedStructure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orthants {
    Positive,
    All,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    /// Half-width `B` of the search box in log-absolute coordinates.
    pub box_radius: f64,
    /// Largest allowed `|w|_1` over all exponent vectors.
    pub degree_cap: i64,
    /// Box budget per orthant.
    pub max_boxes: usize,
    pub min_width: f64,
    pub residual_tol: f64,
    pub det_tol: f64,
    pub cluster_radius: f64,
    pub orthants: Orthants,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            box_radius: 10.0,
            degree_cap: 8,
            max_boxes: 400_000,
            min_width: 1e-9,
            residual_tol: 1e-9,
            det_tol: 1e-8,
            cluster_radius: 1e-6,
            orthants: Orthants::All,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealSolution {
    pub x: Vec<f64>,
    /// `log |x|`
    pub u: Vec<f64>,
    pub signs: Vec<i8>,
    pub positive: bool,
    /// Largest relative residual `|g_i(x)| / sum_m |c_m x^{w_m}|`.
    pub residual: f64,
    /// Determinant of the row-normalised Jacobian in log coordinates.
    pub jacobian_det: f64,
    pub nondegenerate: bool,
    /// Isolated in a box by the Krawczyk test.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionSet {
    pub points: Vec<RealSolution>,
    /// Unresolved minimum-width boxes; possibly degenerate roots.
    pub suspects: Vec<RealSolution>,
    pub boxes_processed: usize,
}

impl SolutionSet {
    pub fn counted(&self) -> impl Iterator<Item = &RealSolution> {
        self.points.iter().filter(|p| p.nondegenerate)
    }

    pub fn count_positive(&self) -> usize {
        self.counted().filter(|p| p.positive).count()
    }

    pub fn count_real(&self) -> usize {
        self.counted().count()
    }
}

/// A square system restricted to one orthant, in log coordinates `u`.
///
/// Evaluation is split in two so that the function enclosed on a box and at
/// its midpoint carry the same positive scaling factors.
trait OrthantFn: Send + Sync {
    fn n(&self) -> usize;
    /// Scaling constants for the box `x`.
    fn scaling(&self, x: &[Interval]) -> Vec<f64>;
    /// Enclosures of the scaled functions and their `u`-Jacobian over `at`.
    fn eval(&self, scaling: &[f64], at: &[Interval], jac: bool)
        -> (Vec<Interval>, Vec<Vec<Interval>>);
    /// Point values and Jacobian under point scaling, with the magnitudes
    /// the residuals are measured against.
    fn eval_point(&self, u: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>);
    /// Boxes outside the region of interest.
    fn excluded(&self, _x: &[Interval]) -> bool {
        false
    }
}

/// `f_i(u) = sum_m c_m sigma^{w_m} exp(w_m . u)` for one orthant.
struct Compiled {
    n: usize,
    polys: Vec<Vec<(Vec<f64>, f64)>>,
}

impl Compiled {
    fn new(sys: &FewnomialSystem, sigma: &[i8]) -> Self {
        let polys = sys
            .polys()
            .iter()
            .map(|p| {
                p.terms()
                    .iter()
                    .map(|(e, c)| {
                        let odd = e
                            .entries()
                            .iter()
                            .zip(sigma)
                            .filter(|(w, s)| **s < 0 && w.is_odd())
                            .count();
                        let sign = if odd % 2 == 1 { -1.0 } else { 1.0 };
                        let w = e.entries().iter().map(|&v| v as f64).collect();
                        (w, sign * rational_to_f64(c))
                    })
                    .collect()
            })
            .collect();
        Compiled { n: sys.n(), polys }
    }
}

fn lin(w: &[f64], u: &[Interval]) -> Interval {
    w.iter()
        .zip(u)
        .fold(Interval::point(0.0), |acc, (&wj, uj)| {
            if wj == 0.0 {
                acc
            } else {
                acc + uj.scale(wj)
            }
        })
}

impl OrthantFn for Compiled {
    fn n(&self) -> usize {
        self.n
    }

    /// Per-equation shifts `s_i = max_m sup(w_m . X)`; every term of the
    /// shifted function is at most about one on `X`.
    fn scaling(&self, x: &[Interval]) -> Vec<f64> {
        self.polys
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|(w, _)| lin(w, x).hi)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }

    fn eval(
        &self,
        shifts: &[f64],
        at: &[Interval],
        jac: bool,
    ) -> (Vec<Interval>, Vec<Vec<Interval>>) {
        let mut f = Vec::with_capacity(self.n);
        let mut j = Vec::new();
        for (terms, &s) in self.polys.iter().zip(shifts) {
            let mut fi = Interval::point(0.0);
            let mut row = vec![Interval::point(0.0); if jac { self.n } else { 0 }];
            for (w, c) in terms {
                let t = (lin(w, at) - Interval::point(s)).exp().scale(*c);
                fi = fi + t;
                for (r, &wj) in row.iter_mut().zip(w) {
                    if wj != 0.0 {
                        *r = *r + t.scale(wj);
                    }
                }
            }
            f.push(fi);
            j.push(row);
        }
        (f, j)
    }

    fn eval_point(&self, u: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
        let mut f = Vec::with_capacity(self.n);
        let mut j = Vec::with_capacity(self.n);
        let mut mag = Vec::with_capacity(self.n);
        for terms in &self.polys {
            let exps: Vec<f64> = terms
                .iter()
                .map(|(w, _)| w.iter().zip(u).map(|(a, b)| a * b).sum())
                .collect();
            let s = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut fi = 0.0;
            let mut mi = 0.0;
            let mut row = vec![0.0; self.n];
            for ((w, c), e) in terms.iter().zip(&exps) {
                let t = c * (e - s).exp();
                fi += t;
                mi += t.abs();
                for (r, wj) in row.iter_mut().zip(w) {
                    *r += t * wj;
                }
            }
            f.push(fi);
            j.push(row);
            mag.push(mi);
        }
        (f, j, mag)
    }
}

/// The Gale system in factored form on one orthant of `y = sigma * exp(v)`:
/// relation `k` is `prod p_i^{a_i} * y^{alpha_y} - prod p_i^{b_i}`, the same
/// polynomial as `GaleSystem::to_polynomial_system` without expanding the
/// powers of `p_i`.
struct GaleFn {
    l: usize,
    /// `p_i = c_i + sum (coef * sigma_j) exp(v_j)`
    blocks: Vec<(f64, Vec<(usize, f64)>)>,
    rels: Vec<GaleRelation>,
    /// `log` lower bounds on `|p_i|` for solutions pulling back into the box.
    log_floor: Vec<f64>,
    box_radius: f64,
    /// Invertible `n x n` choices among the rows `w_{i,j}` of the exponent
    /// matrix, with their inverses; `log |x|` is recovered from any of them.
    pullbacks: Vec<(Vec<LogRow>, Vec<Vec<f64>>)>,
}

#[derive(Clone, Copy)]
enum LogRow {
    /// `log |p_i|`
    P(usize),
    /// `v_j`
    V(usize),
}

fn row_subsets(len: usize, k: usize) -> Vec<Vec<usize>> {
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

struct GaleRelation {
    lhs: Vec<(usize, u32)>,
    rhs: Vec<(usize, u32)>,
    mono: Vec<f64>,
    sign: f64,
}

impl GaleFn {
    fn new(gs: &GaleSystem, sigma: &[i8], box_radius: f64, window: f64) -> Self {
        let ms = gs.structure();
        let mut var = 0;
        let blocks = ms
            .blocks()
            .iter()
            .map(|b| {
                let terms = b.coefficients[1..]
                    .iter()
                    .map(|c| {
                        let t = (var, sigma[var] as f64 * rational_to_f64(c));
                        var += 1;
                        t
                    })
                    .collect();
                (rational_to_f64(&b.coefficients[0]), terms)
            })
            .collect();
        let sizes = gs.block_sizes();
        let rels = gs
            .alpha()
            .iter()
            .map(|row| {
                let mut lhs = Vec::new();
                let mut rhs = Vec::new();
                let mut mono = Vec::with_capacity(var);
                let mut off = 0;
                for (i, &li) in sizes.iter().enumerate() {
                    let a0 = row[off];
                    if a0 > 0 {
                        lhs.push((i, a0 as u32));
                    } else if a0 < 0 {
                        rhs.push((i, (-a0) as u32));
                    }
                    mono.extend(row[off + 1..=off + li].iter().map(|&a| a as f64));
                    off += li + 1;
                }
                let odd = mono
                    .iter()
                    .zip(sigma)
                    .filter(|(a, s)| **s < 0 && (**a as i64).is_odd())
                    .count();
                GaleRelation {
                    lhs,
                    rhs,
                    mono,
                    sign: if odd % 2 == 1 { -1.0 } else { 1.0 },
                }
            })
            .collect();
        let log_floor = vec![-window - 1.0; ms.n()];
        let mut rows = Vec::new();
        let mut kinds = Vec::new();
        let mut v = 0;
        for (i, b) in ms.blocks().iter().enumerate() {
            rows.push(b.lead.entries().iter().map(|&e| e as f64).collect::<Vec<_>>());
            kinds.push(LogRow::P(i));
            for w in &b.body {
                rows.push(w.entries().iter().map(|&e| e as f64).collect());
                kinds.push(LogRow::V(v));
                v += 1;
            }
        }
        let pullbacks = row_subsets(rows.len(), ms.n())
            .into_iter()
            .filter_map(|sub| {
                let a: Vec<Vec<f64>> = sub.iter().map(|&r| rows[r].clone()).collect();
                if det(&a).abs() < 0.5 {
                    return None;
                }
                Some((sub.iter().map(|&r| kinds[r]).collect(), inverse(&a)?))
            })
            .collect();
        GaleFn {
            l: var,
            blocks,
            rels,
            log_floor,
            box_radius,
            pullbacks,
        }
    }

    /// Scaled `p_i exp(-t_i)` and its derivatives over `at`.
    fn scaled_p(&self, t: &[f64], at: &[Interval]) -> Vec<(Interval, Vec<(usize, Interval)>)> {
        self.blocks
            .iter()
            .zip(t)
            .map(|((c0, terms), &ti)| {
                let shift = Interval::point(-ti);
                let mut p = Interval::point(*c0) * shift.exp();
                let mut d = Vec::with_capacity(terms.len());
                for &(v, c) in terms {
                    let e = (at[v] + shift).exp().scale(c);
                    p = p + e;
                    d.push((v, e));
                }
                (p, d)
            })
            .collect()
    }

    /// `log sum |terms of p_i|` bounded above over the box.
    fn log_mags(&self, x: &[Interval]) -> Vec<f64> {
        self.blocks
            .iter()
            .map(|(c0, terms)| {
                let m = terms
                    .iter()
                    .fold(Interval::point(c0.abs()), |acc, &(v, c)| {
                        acc + x[v].exp().scale(c.abs())
                    });
                m.hi.ln()
            })
            .collect()
    }

    fn side_log(side: &[(usize, u32)], t: &[f64]) -> Interval {
        side.iter().fold(Interval::point(0.0), |acc, &(i, a)| {
            acc + Interval::point(t[i]).scale(a as f64)
        })
    }
}

impl OrthantFn for GaleFn {
    fn n(&self) -> usize {
        self.l
    }

    fn scaling(&self, x: &[Interval]) -> Vec<f64> {
        let t = self.log_mags(x);
        let s: Vec<f64> = self
            .rels
            .iter()
            .map(|r| {
                let left = (Self::side_log(&r.lhs, &t) + lin(&r.mono, x)).hi;
                let right = Self::side_log(&r.rhs, &t).hi;
                left.max(right)
            })
            .collect();
        t.into_iter().chain(s).collect()
    }

    fn eval(
        &self,
        scaling: &[f64],
        at: &[Interval],
        jac: bool,
    ) -> (Vec<Interval>, Vec<Vec<Interval>>) {
        let nb = self.blocks.len();
        let (t, s) = scaling.split_at(nb);
        let p = self.scaled_p(t, at);
        let mut f = Vec::with_capacity(self.l);
        let mut j = Vec::with_capacity(self.l);
        for (r, &sk) in self.rels.iter().zip(s) {
            let side = |factors: &[(usize, u32)], mono: Option<&[f64]>| {
                let mut expo = Self::side_log(factors, t) - Interval::point(sk);
                if let Some(m) = mono {
                    expo = expo + lin(m, at);
                }
                let e = expo.exp();
                let prod = factors
                    .iter()
                    .fold(Interval::point(1.0), |acc, &(i, a)| acc * p[i].0.powi(a));
                let mut grad = vec![Interval::point(0.0); if jac { self.l } else { 0 }];
                if jac {
                    if let Some(m) = mono {
                        for (g, &mv) in grad.iter_mut().zip(m) {
                            if mv != 0.0 {
                                *g = (e * prod).scale(mv);
                            }
                        }
                    }
                    for (idx, &(i, a)) in factors.iter().enumerate() {
                        let others = factors
                            .iter()
                            .enumerate()
                            .filter(|(o, _)| *o != idx)
                            .fold(Interval::point(1.0), |acc, (_, &(i2, a2))| {
                                acc * p[i2].0.powi(a2)
                            });
                        let outer = e * others * p[i].0.powi(a - 1).scale(a as f64);
                        for &(v, dv) in &p[i].1 {
                            grad[v] = grad[v] + outer * dv;
                        }
                    }
                }
                (e * prod, grad)
            };
            let (lv, lg) = side(&r.lhs, Some(&r.mono));
            let (rv, rg) = side(&r.rhs, None);
            f.push(lv.scale(r.sign) - rv);
            j.push(
                lg.iter()
                    .zip(&rg)
                    .map(|(a, b)| a.scale(r.sign) - *b)
                    .collect(),
            );
        }
        (f, j)
    }

    fn eval_point(&self, u: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
        let at: Vec<Interval> = u.iter().map(|&v| Interval::point(v)).collect();
        let scaling = self.scaling(&at);
        let (f, j) = self.eval(&scaling, &at, true);
        let nb = self.blocks.len();
        let (t, s) = scaling.split_at(nb);
        let p = self.scaled_p(t, &at);
        let mag = self
            .rels
            .iter()
            .zip(s)
            .map(|(r, &sk)| {
                let side = |factors: &[(usize, u32)], mono: bool| {
                    let mut expo = Self::side_log(factors, t).mid() - sk;
                    if mono {
                        expo += r.mono.iter().zip(u).map(|(a, b)| a * b).sum::<f64>();
                    }
                    factors
                        .iter()
                        .fold(expo.exp(), |acc, &(i, a)| acc * p[i].0.mid().abs().powi(a as i32))
                };
                side(&r.lhs, true) + side(&r.rhs, false)
            })
            .collect();
        (
            f.iter().map(Interval::mid).collect(),
            j.iter().map(|r| r.iter().map(Interval::mid).collect()).collect(),
            mag,
        )
    }

    fn excluded(&self, x: &[Interval]) -> bool {
        let t = self.log_mags(x);
        let p = self.scaled_p(&t, x);
        if p
            .iter()
            .zip(&t)
            .zip(&self.log_floor)
            .any(|(((pi, _), ti), floor)| pi.mag().ln() + ti < *floor)
        {
            return true;
        }
        let log_p: Vec<Option<Interval>> = p
            .iter()
            .zip(&t)
            .map(|((pi, _), &ti)| {
                (!pi.contains_zero()).then(|| {
                    Interval::new(pi.mig().ln(), pi.mag().ln()) + Interval::around(ti, 1e-9)
                })
            })
            .collect();
        let limit = self.box_radius + 1e-6;
        self.pullbacks.iter().any(|(kinds, inv)| {
            let logs: Option<Vec<Interval>> = kinds
                .iter()
                .map(|k| match *k {
                    LogRow::P(i) => log_p[i],
                    LogRow::V(v) => Some(x[v]),
                })
                .collect();
            let Some(logs) = logs else { return false };
            inv.iter().any(|row| {
                let u = row
                    .iter()
                    .zip(&logs)
                    .fold(Interval::point(0.0), |acc, (&c, li)| acc + li.scale(c));
                u.lo > limit || u.hi < -limit
            })
        })
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn lu_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| m[r][col].abs().total_cmp(&m[s][col].abs()))?;
        if m[piv][col] == 0.0 || !m[piv][col].is_finite() {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let factor = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= factor * m[col][c];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (rhs[r] - s) / m[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn inverse(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let cols: Option<Vec<Vec<f64>>> = (0..n)
        .map(|c| {
            let e: Vec<f64> = (0..n).map(|r| if r == c { 1.0 } else { 0.0 }).collect();
            lu_solve(a, &e)
        })
        .collect();
    let cols = cols?;
    Some((0..n).map(|r| (0..n).map(|c| cols[c][r]).collect()).collect())
}

fn det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r, &s| m[r][col].abs().total_cmp(&m[s][col].abs()))
            .expect("nonempty");
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(col, piv);
            d = -d;
        }
        d *= m[col][col];
        for r in col + 1..n {
            let factor = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= factor * m[col][c];
            }
        }
    }
    d
}

fn normalised_det(j: &[Vec<f64>]) -> f64 {
    let rows: Vec<Vec<f64>> = j
        .iter()
        .map(|row| {
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                row.clone()
            } else {
                row.iter().map(|v| v / norm).collect()
            }
        })
        .collect();
    det(&rows)
}

enum BoxVerdict {
    Empty,
    Root(Vec<f64>),
    /// Bisect along this coordinate.
    Split(usize),
}

/// The coordinate with the largest `max_i |J_ij| * width_j`.
fn smear_dim(jx: &[Vec<Interval>], x: &[Interval]) -> usize {
    let smear = |j: usize| {
        jx.iter().map(|r| r[j].mag()).fold(0.0, f64::max) * x[j].width()
    };
    (0..x.len())
        .max_by(|&a, &b| smear(a).total_cmp(&smear(b)))
        .filter(|&d| smear(d) > 0.0 && smear(d).is_finite())
        .unwrap_or_else(|| {
            (0..x.len())
                .max_by(|&a, &b| x[a].width().total_cmp(&x[b].width()))
                .expect("nonempty box")
        })
}

struct OrthantSearch<'a> {
    f: Box<dyn OrthantFn + 'a>,
    sigma: Vec<i8>,
    opts: &'a SolveOptions,
}

impl OrthantSearch<'_> {
    fn krawczyk(&self, x: &[Interval]) -> BoxVerdict {
        let n = self.f.n();
        if self.f.excluded(x) {
            return BoxVerdict::Empty;
        }
        let shifts = self.f.scaling(x);
        let (fx, jx) = self.f.eval(&shifts, x, true);
        if fx.iter().any(|v| !v.contains_zero()) {
            return BoxVerdict::Empty;
        }
        let m: Vec<f64> = x.iter().map(Interval::mid).collect();
        let mi: Vec<Interval> = m.iter().map(|&v| Interval::point(v)).collect();
        let (fm, _) = self.f.eval(&shifts, &mi, false);
        let dx: Vec<Interval> = x.iter().zip(&m).map(|(xi, &c)| *xi - Interval::point(c)).collect();

        // mean-value form
        for i in 0..n {
            let mv = (0..n).fold(fm[i], |acc, j| acc + jx[i][j] * dx[j]);
            if !mv.contains_zero() {
                return BoxVerdict::Empty;
            }
        }

        let jmid: Vec<Vec<f64>> = jx.iter().map(|r| r.iter().map(Interval::mid).collect()).collect();
        let split = BoxVerdict::Split(smear_dim(&jx, x));
        let Some(y) = inverse(&jmid) else {
            return split;
        };
        let mut k = Vec::with_capacity(n);
        for i in 0..n {
            let mut ki = Interval::point(m[i]);
            for (j, fmj) in fm.iter().enumerate() {
                ki = ki - fmj.scale(y[i][j]);
            }
            for j in 0..n {
                // (I - Y J(X))_{ij}
                let mut c = Interval::point(if i == j { 1.0 } else { 0.0 });
                for (l, jrow) in jx.iter().enumerate() {
                    c = c - jrow[j].scale(y[i][l]);
                }
                ki = ki + c * dx[j];
            }
            if !ki.is_finite() {
                return split;
            }
            k.push(ki);
        }
        if k.iter().zip(x).any(|(ki, xi)| ki.intersect(xi).is_none()) {
            return BoxVerdict::Empty;
        }
        if k.iter().zip(x).all(|(ki, xi)| ki.interior_of(xi)) {
            return BoxVerdict::Root(self.polish(k));
        }
        split
    }

    /// Contracts a certified box with further Krawczyk steps, then runs
    /// Newton from its midpoint, keeping the iterate inside the box.
    fn polish(&self, mut b: Vec<Interval>) -> Vec<f64> {
        for _ in 0..30 {
            let w = b.iter().map(Interval::width).fold(0.0, f64::max);
            if w < 1e-13 {
                break;
            }
            let shifts = self.f.scaling(&b);
            let (_, jx) = self.f.eval(&shifts, &b, true);
            let m: Vec<f64> = b.iter().map(Interval::mid).collect();
            let mi: Vec<Interval> = m.iter().map(|&v| Interval::point(v)).collect();
            let (fm, _) = self.f.eval(&shifts, &mi, false);
            let jmid: Vec<Vec<f64>> =
                jx.iter().map(|r| r.iter().map(Interval::mid).collect()).collect();
            let Some(y) = inverse(&jmid) else { break };
            let n = b.len();
            let mut next = Vec::with_capacity(n);
            for i in 0..n {
                let mut ki = Interval::point(m[i]);
                for (j, fmj) in fm.iter().enumerate() {
                    ki = ki - fmj.scale(y[i][j]);
                }
                for j in 0..n {
                    let mut c = Interval::point(if i == j { 1.0 } else { 0.0 });
                    for (l, jrow) in jx.iter().enumerate() {
                        c = c - jrow[j].scale(y[i][l]);
                    }
                    ki = ki + c * (b[j] - Interval::point(m[j]));
                }
                next.push(ki.intersect(&b[i]).unwrap_or(b[i]));
            }
            let shrunk = next
                .iter()
                .zip(&b)
                .any(|(a, o)| a.width() < 0.9 * o.width());
            b = next;
            if !shrunk {
                break;
            }
        }
        let start: Vec<f64> = b.iter().map(Interval::mid).collect();
        let u = self.newton(start.clone());
        if u.iter().zip(&b).all(|(v, bi)| bi.contains(*v)) {
            u
        } else {
            start
        }
    }

    fn newton(&self, mut u: Vec<f64>) -> Vec<f64> {
        for _ in 0..60 {
            let (f, j, _) = self.f.eval_point(&u);
            let Some(step) = lu_solve(&j, &f) else { break };
            let size = step.iter().map(|v| v.abs()).fold(0.0, f64::max);
            for (ui, si) in u.iter_mut().zip(&step) {
                *ui -= si;
            }
            if !(size > 1e-15 * (1.0 + u.iter().map(|v| v.abs()).fold(0.0, f64::max))) {
                break;
            }
        }
        u
    }

    fn describe(&self, u: Vec<f64>, certified: bool) -> RealSolution {
        let (f, j, mag) = self.f.eval_point(&u);
        let residual = f
            .iter()
            .zip(&mag)
            .map(|(fi, mi)| if *mi > 0.0 { fi.abs() / mi } else { fi.abs() })
            .fold(0.0, f64::max);
        let jacobian_det = normalised_det(&j);
        let nondegenerate = certified
            && jacobian_det.abs() > self.opts.det_tol
            && residual < self.opts.residual_tol;
        let x = u
            .iter()
            .zip(&self.sigma)
            .map(|(ui, s)| *s as f64 * ui.exp())
            .collect();
        RealSolution {
            x,
            u,
            signs: self.sigma.clone(),
            positive: self.sigma.iter().all(|&s| s > 0),
            residual,
            jacobian_det,
            nondegenerate,
            certified,
        }
    }

    fn run(&self) -> Result<(Vec<RealSolution>, Vec<RealSolution>, usize)> {
        let n = self.f.n();
        let b = self.opts.box_radius;
        let mut stack = vec![vec![Interval::new(-b, b); n]];
        let mut roots = Vec::new();
        let mut suspects = Vec::new();
        let mut processed = 0;
        while let Some(x) = stack.pop() {
            processed += 1;
            if processed > self.opts.max_boxes {
                return Err(Error::Budget(format!(
                    "more than {} boxes in orthant {:?}",
                    self.opts.max_boxes, self.sigma
                )));
            }
            match self.krawczyk(&x) {
                BoxVerdict::Empty => {}
                BoxVerdict::Root(u) => roots.push(self.describe(u, true)),
                BoxVerdict::Split(d) => {
                    let w = x.iter().map(Interval::width).fold(0.0, f64::max);
                    let unsplittable = x[d].width() <= 1e-15 * (1.0 + x[d].mag());
                    if w < self.opts.min_width || unsplittable {
                        let start = x.iter().map(Interval::mid).collect();
                        let u = self.newton(start);
                        let s = self.describe(u, false);
                        if s.residual < self.opts.residual_tol.sqrt() {
                            suspects.push(s);
                        }
                        continue;
                    }
                    // off-centre split keeps rational roots off the cut planes
                    let (lo, hi) = x[d].split_at(0.4937);
                    let mut left = x.clone();
                    left[d] = lo;
                    let mut right = x;
                    right[d] = hi;
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        Ok((roots, suspects, processed))
    }
}

fn dedup(mut pts: Vec<RealSolution>, radius: f64) -> Vec<RealSolution> {
    pts.sort_by(|a, b| {
        b.certified
            .cmp(&a.certified)
            .then(a.residual.total_cmp(&b.residual))
    });
    let mut out: Vec<RealSolution> = Vec::new();
    for p in pts {
        let close = out.iter().any(|q| {
            q.signs == p.signs
                && q.u
                    .iter()
                    .zip(&p.u)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
                    < radius
        });
        if !close {
            out.push(p);
        }
    }
    out
}

fn sort_points(pts: &mut [RealSolution]) {
    pts.sort_by(|a, b| {
        a.x.iter()
            .zip(&b.x)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

fn orthant_signs(n: usize, orthants: Orthants) -> Vec<Vec<i8>> {
    match orthants {
        Orthants::Positive => vec![vec![1; n]],
        Orthants::All => (0..1u32 << n)
            .map(|mask| {
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                    .collect()
            })
            .collect(),
    }
}

/// Every nondegenerate real solution of `sys` in the searched orthants with
/// `|log |x_i|| <= B`.
pub fn solve_real(sys: &FewnomialSystem, opts: &SolveOptions) -> Result<SolutionSet> {
    let n = sys.n();
    if n == 0 || n > 3 {
        return Err(Error::Budget(format!("{n} variables; the solver handles 1 to 3")));
    }
    let deg = sys.polys().iter().map(|p| p.max_abs_degree()).max().unwrap_or(0);
    if deg > opts.degree_cap {
        return Err(Error::Budget(format!(
            "degree {deg} exceeds the cap {}",
            opts.degree_cap
        )));
    }
    search(n, opts, |sigma| Box::new(Compiled::new(sys, sigma)))
}

fn search<'a, F>(n: usize, opts: &SolveOptions, make: F) -> Result<SolutionSet>
where
    F: Fn(&[i8]) -> Box<dyn OrthantFn + 'a> + Sync,
{
    let results: Vec<_> = orthant_signs(n, opts.orthants)
        .into_par_iter()
        .map(|sigma| {
            OrthantSearch {
                f: make(&sigma),
                sigma,
                opts,
            }
            .run()
        })
        .collect::<Result<_>>()?;
    let mut roots = Vec::new();
    let mut suspects = Vec::new();
    let mut boxes_processed = 0;
    for (r, s, p) in results {
        roots.extend(r);
        suspects.extend(s);
        boxes_processed += p;
    }
    let mut points = dedup(roots, opts.cluster_radius);
    let mut suspects: Vec<RealSolution> = dedup(suspects, opts.cluster_radius)
        .into_iter()
        .filter(|s| {
            !points.iter().any(|p| {
                p.signs == s.signs
                    && p.u
                        .iter()
                        .zip(&s.u)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                        < opts.cluster_radius
            })
        })
        .collect();
    sort_points(&mut points);
    sort_points(&mut suspects);
    Ok(SolutionSet {
        points,
        suspects,
        boxes_processed,
    })
}

pub fn count_positive(sys: &FewnomialSystem, opts: &SolveOptions) -> Result<usize> {
    let opts = SolveOptions {
        orthants: Orthants::Positive,
        ..opts.clone()
    };
    Ok(solve_real(sys, &opts)?.count_positive())
}

pub fn count_real_torus(sys: &FewnomialSystem, opts: &SolveOptions) -> Result<usize> {
    let opts = SolveOptions {
        orthants: Orthants::All,
        ..opts.clone()
    };
    Ok(solve_real(sys, &opts)?.count_real())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchedPair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaleBijectionReport {
    pub lattice_index: String,
    pub odd_index: bool,
    pub positive: usize,
    pub positive_chamber: usize,
    pub positive_ok: bool,
    pub real: Option<usize>,
    pub gale_real: Option<usize>,
    pub real_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub real_skipped: Option<String>,
    pub matched: Vec<MatchedPair>,
    pub unmatched: usize,
    pub suspects: usize,
    /// `log` lower bound on `|p_i|` for counted solutions.
    pub window: f64,
    pub passed: bool,
}

impl GaleBijectionReport {
    pub fn check(&self) -> Result<()> {
        if self.passed {
            return Ok(());
        }
        let mut parts = Vec::new();
        if !self.positive_ok {
            parts.push(format!(
                "positive {} vs positive chamber {}",
                self.positive, self.positive_chamber
            ));
        }
        if self.real_ok == Some(false) {
            parts.push(format!(
                "real {} vs chamber total {}",
                self.real.unwrap_or(0),
                self.gale_real.unwrap_or(0)
            ));
        }
        if self.unmatched > 0 {
            parts.push(format!("{} unmatched solutions", self.unmatched));
        }
        Err(Error::CountMismatch(parts.join("; ")))
    }
}

/// A Gale solution pulled back to the torus.
struct Pulled {
    y: Vec<f64>,
    positive_chamber: bool,
}

/// Pulls a Gale solution `y` back to `x` with `x^{w_{i,0}} = p_i(y)` and
/// `x^{w_{i,j}} = y_{i,j}`: `log |x|` by least squares and the sign pattern
/// by search. `None` if no sign pattern fits or `x` leaves the box.
fn pull_back(ms: &MixedStructure, p: &[f64], y: &[f64], box_radius: f64) -> Option<Vec<f64>> {
    let n = ms.n();
    let mut rows: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    let mut k = 0;
    for (i, b) in ms.blocks().iter().enumerate() {
        let w0: Vec<f64> = b.lead.entries().iter().map(|&v| v as f64).collect();
        rows.push((w0, p[i].abs().ln(), p[i]));
        for w in &b.body {
            rows.push((w.entries().iter().map(|&v| v as f64).collect(), y[k].abs().ln(), y[k]));
            k += 1;
        }
    }
    // normal equations
    let mut ata = vec![vec![0.0; n]; n];
    let mut atb = vec![0.0; n];
    for (w, b, _) in &rows {
        for r in 0..n {
            atb[r] += w[r] * b;
            for c in 0..n {
                ata[r][c] += w[r] * w[c];
            }
        }
    }
    let u = lu_solve(&ata, &atb)?;
    if u.iter().any(|v| v.abs() > box_radius) {
        return None;
    }
    let lead_and_body: Vec<Vec<i64>> = ms
        .blocks()
        .iter()
        .flat_map(|b| std::iter::once(&b.lead).chain(&b.body))
        .map(|e| e.entries().to_vec())
        .collect();
    let fits = orthant_signs(n, Orthants::All).into_iter().find(|sigma| {
        lead_and_body.iter().zip(&rows).all(|(w, (_, _, target))| {
            let odd = w
                .iter()
                .zip(sigma)
                .filter(|(e, s)| **s < 0 && e.is_odd())
                .count();
            (odd % 2 == 1) == (*target < 0.0)
        })
    })?;
    Some(
        u.iter()
            .zip(&fits)
            .map(|(ui, s)| *s as f64 * ui.exp())
            .collect(),
    )
}

fn gale_side(
    gs: &GaleSystem,
    opts: &SolveOptions,
    orthants: Orthants,
) -> Result<(Vec<Pulled>, usize)> {
    let ms = gs.structure();
    let wmax = ms
        .blocks()
        .iter()
        .flat_map(|b| &b.body)
        .map(|w| w.abs_degree())
        .max()
        .unwrap_or(1)
        .max(1);
    let gopts = SolveOptions {
        box_radius: opts.box_radius * wmax as f64,
        orthants,
        ..opts.clone()
    };
    let set = search(gs.l(), &gopts, |sigma| {
        Box::new(GaleFn::new(gs, sigma, opts.box_radius, GALE_WINDOW))
    })?;
    let off_arrangement = |y: &[f64]| {
        let p = gs.eval_p(y);
        let scale: Vec<f64> = ms
            .blocks()
            .iter()
            .scan(0, |k, b| {
                let mut s = rational_to_f64(&b.coefficients[0]).abs();
                for c in &b.coefficients[1..] {
                    s += (rational_to_f64(c) * y[*k]).abs();
                    *k += 1;
                }
                Some(s)
            })
            .collect();
        let ok = p.iter().zip(&scale).all(|(pi, si)| pi.abs() > 1e-8 * si);
        (ok, p)
    };
    let mut pulled = Vec::new();
    for s in set.counted() {
        let (ok, p) = off_arrangement(&s.x);
        if !ok || p.iter().any(|v| v.abs().ln() < -GALE_WINDOW) {
            continue;
        }
        if pull_back(ms, &p, &s.x, opts.box_radius).is_some() {
            pulled.push(Pulled {
                positive_chamber: s.positive && p.iter().all(|v| *v > 0.0),
                y: s.x.clone(),
            });
        }
    }
    let suspects = set
        .suspects
        .iter()
        .filter(|s| off_arrangement(&s.x).0)
        .count();
    Ok((pulled, suspects))
}

/// Both sides of the bijection check only count solutions with
/// `|x^{w_{i,0}}| = |p_i| >= exp(-GALE_WINDOW)`. Smaller `p_i` cancel below
/// double precision when evaluated from the `y` coordinates.
pub const GALE_WINDOW: f64 = 12.0;

/// Solves a mixed system and its Gale dual independently and compares the
/// solution counts: positive solutions against the positive chamber, and,
/// for odd lattice index, all torus solutions against all chambers.
pub fn verify_gale_bijection(ms: &MixedStructure, opts: &SolveOptions) -> Result<GaleBijectionReport> {
    let w = ExponentMatrix::from_structure(ms);
    let index: BigInt = lattice_index(&w)?;
    let odd = index.is_odd();
    let rb = kernel_basis(&w)?;
    let gs = build_gale_system(ms, &rb)?;

    let orthants = if odd { Orthants::All } else { Orthants::Positive };
    let xset = solve_real(
        &ms.to_system(),
        &SolveOptions {
            orthants,
            ..opts.clone()
        },
    )?;
    let (pulled, gale_suspects) = gale_side(&gs, opts, orthants)?;

    let in_window = |s: &&RealSolution| {
        ms.blocks().iter().all(|b| {
            let log_p: f64 = b.lead.entries().iter().zip(&s.u).map(|(&w, u)| w as f64 * u).sum();
            log_p >= -GALE_WINDOW
        })
    };
    let counted: Vec<&RealSolution> = xset.counted().filter(in_window).collect();
    let positive = counted.iter().filter(|s| s.positive).count();
    let positive_chamber = pulled.iter().filter(|p| p.positive_chamber).count();
    let positive_ok = positive == positive_chamber;
    let (real, gale_real, real_ok, real_skipped) = if odd {
        let r = counted.len();
        let g = pulled.len();
        (Some(r), Some(g), Some(r == g), None)
    } else {
        (None, None, None, Some("trivial sign solutions".to_string()))
    };

    let mut matched = Vec::new();
    let mut unmatched = 0;
    for s in counted {
        if !odd && !s.positive {
            continue;
        }
        let y = push_solution(ms, &s.x)?;
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        let best = pulled
            .iter()
            .map(|p| {
                let d = p
                    .y
                    .iter()
                    .zip(&y)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                (d / norm, &p.y)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match best {
            Some((d, gy)) if d < 1e-6 => matched.push(MatchedPair {
                x: s.x.clone(),
                y: gy.clone(),
                distance: d,
            }),
            _ => unmatched += 1,
        }
    }
    let passed = positive_ok && real_ok.unwrap_or(true) && unmatched == 0;
    Ok(GaleBijectionReport {
        lattice_index: index.to_string(),
        odd_index: odd,
        positive,
        positive_chamber,
        positive_ok,
        real,
        gale_real,
        real_ok,
        real_skipped,
        matched,
        unmatched,
        suspects: xset.suspects.len() + gale_suspects,
        window: -GALE_WINDOW,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse_system::detect_mixed_structure;

    fn sys(text: &str) -> FewnomialSystem {
        FewnomialSystem::from_json(text).unwrap()
    }

    const WORKED: &str = r#"{"n":2,"polys":[
        [{"e":[2,0],"c":"1"},{"e":[0,1],"c":"-1"},{"e":[0,0],"c":"-1"}],
        [{"e":[0,2],"c":"1"},{"e":[1,0],"c":"-1"},{"e":[0,0],"c":"-1"}]]}"#;

    #[test]
    fn worked_example_counts() {
        let s = sys(WORKED);
        let set = solve_real(&s, &SolveOptions::default()).unwrap();
        assert_eq!(set.count_positive(), 1);
        assert_eq!(set.count_real(), 2);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let psi = (1.0 - 5f64.sqrt()) / 2.0;
        let xs: Vec<&Vec<f64>> = set.counted().map(|p| &p.x).collect();
        assert!((xs[0][0] - psi).abs() < 1e-12 && (xs[0][1] - psi).abs() < 1e-12);
        assert!((xs[1][0] - phi).abs() < 1e-12 && (xs[1][1] - phi).abs() < 1e-12);
        for p in set.counted() {
            assert!(p.residual < 1e-9 && p.certified);
        }
    }

    #[test]
    fn univariate() {
        let s = sys(r#"{"n":1,"polys":[[{"e":[1],"c":"1"},{"e":[0],"c":"-2"}]]}"#);
        let set = solve_real(&s, &SolveOptions::default()).unwrap();
        assert_eq!(set.count_positive(), 1);
        assert!((set.points[0].x[0] - 2.0).abs() < 1e-14);
        let s = sys(r#"{"n":1,"polys":[[{"e":[2],"c":"1"},{"e":[0],"c":"1"}]]}"#);
        assert_eq!(count_real_torus(&s, &SolveOptions::default()).unwrap(), 0);
        // (x - 1)(x + 3)(x - 1/2) = x^3 + 3/2 x^2 - 4 x + 3/2
        let s = sys(
            r#"{"n":1,"polys":[[{"e":[3],"c":"1"},{"e":[2],"c":"3/2"},{"e":[1],"c":"-4"},{"e":[0],"c":"3/2"}]]}"#,
        );
        let set = solve_real(&s, &SolveOptions::default()).unwrap();
        assert_eq!(set.count_positive(), 2);
        assert_eq!(set.count_real(), 3);
    }

    #[test]
    fn double_root_is_not_counted() {
        // (x - 1)^2
        let s = sys(r#"{"n":1,"polys":[[{"e":[2],"c":"1"},{"e":[1],"c":"-2"},{"e":[0],"c":"1"}]]}"#);
        let set = solve_real(&s, &SolveOptions::default()).unwrap();
        assert_eq!(set.count_real(), 0);
        assert!(!set.suspects.is_empty());
    }

    #[test]
    fn options_are_enforced() {
        let s = sys(r#"{"n":1,"polys":[[{"e":[9],"c":"1"},{"e":[0],"c":"-2"}]]}"#);
        assert!(matches!(
            solve_real(&s, &SolveOptions::default()),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn gale_bijection_on_worked_example() {
        let ms = detect_mixed_structure(&sys(WORKED)).unwrap();
        let r = verify_gale_bijection(&ms, &SolveOptions::default()).unwrap();
        assert_eq!((r.positive, r.positive_chamber), (1, 1));
        assert_eq!((r.real, r.gale_real), (Some(2), Some(2)));
        assert_eq!(r.matched.len(), 2);
        assert!(r.passed);
        r.check().unwrap();
    }

    #[test]
    fn gale_bijection_even_index_skips_real() {
        // the worked example in x^2, y^2: index 4
        let s = sys(
            r#"{"n":2,"polys":[
            [{"e":[4,0],"c":"1"},{"e":[0,2],"c":"-1"},{"e":[0,0],"c":"-1"}],
            [{"e":[0,4],"c":"1"},{"e":[2,0],"c":"-1"},{"e":[0,0],"c":"-1"}]]}"#,
        );
        let ms = detect_mixed_structure(&s).unwrap();
        let r = verify_gale_bijection(&ms, &SolveOptions::default()).unwrap();
        assert!(!r.odd_index);
        assert_eq!(r.real_skipped.as_deref(), Some("trivial sign solutions"));
        assert_eq!(r.lattice_index, "4");
        assert_eq!((r.positive, r.positive_chamber), (1, 1));
        assert!(r.passed);
    }
}
