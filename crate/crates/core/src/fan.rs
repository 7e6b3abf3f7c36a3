//! The fan of `KGL_n`: the cones `σ_ℓ` of the positive part and their
//! `S_n`-translates, cone location and double-description checks.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};
use crate::root_datum::rat;
use crate::{Q, Rat};

pub const MAX_FAN_RANK: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeLabel {
    pub ell: usize,
    /// The cone is `σ_ℓ` with `e_i` sent to `e_{perm[i]}`.
    pub perm: Vec<usize>,
}

impl ConeLabel {
    pub fn name(&self) -> String {
        let ident = self.perm.iter().enumerate().all(|(i, &p)| i == p);
        if ident {
            format!("sigma_{}", self.ell)
        } else {
            let p: Vec<String> = self.perm.iter().map(|x| (x + 1).to_string()).collect();
            format!("sigma_{}.[{}]", self.ell, p.join(","))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeRecord {
    pub label: ConeLabel,
    pub generators: Vec<Vec<i64>>,
    /// The cone is where all of these pair nonnegatively.
    pub inequalities: Vec<Vec<i64>>,
}

impl ConeRecord {
    pub fn key(&self) -> BTreeSet<Vec<i64>> {
        self.generators.iter().cloned().collect()
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.inequalities.iter().all(|a| !pair(a, v).is_negative())
    }

    /// Coefficients of `v` along the (linearly independent) generators.
    pub fn coefficients(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        let n = v.len();
        let k = self.generators.len();
        let m = Matrix::from_vec(
            n,
            k,
            (0..n)
                .flat_map(|i| self.generators.iter().map(move |g| rat(g[i])))
                .collect(),
        )
        .ok()?;
        matrix::solve(&Q::new(), &m, v).ok()?
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FanData {
    pub n: usize,
    pub cones: Vec<ConeRecord>,
    pub weyl_closure: bool,
}

fn pair(a: &[i64], v: &[Rat]) -> Rat {
    a.iter().zip(v).map(|(&x, y)| rat(x) * y).sum()
}

fn permute(v: &[i64], perm: &[usize]) -> Vec<i64> {
    let mut out = vec![0; v.len()];
    for (i, &p) in perm.iter().enumerate() {
        out[p] = v[i];
    }
    out
}

/// `σ_ℓ = {a_1 ≤ … ≤ a_ℓ ≤ 0 ≤ a_{ℓ+1} ≤ … ≤ a_n}`.
pub fn sigma_cone(n: usize, ell: usize) -> ConeRecord {
    assert!(ell <= n);
    let mut generators = Vec::with_capacity(n);
    for i in 1..=n {
        let g: Vec<i64> = if i <= ell {
            (1..=n).map(|j| if j <= i { -1 } else { 0 }).collect()
        } else {
            (1..=n).map(|j| if j >= i { 1 } else { 0 }).collect()
        };
        generators.push(g);
    }
    let mut inequalities = Vec::with_capacity(n);
    let unit = |i: usize, s: i64| -> Vec<i64> { (1..=n).map(|j| if j == i { s } else { 0 }).collect() };
    for i in 1..n {
        if i != ell {
            let mut a = vec![0; n];
            a[i] = 1;
            a[i - 1] = -1;
            inequalities.push(a);
        }
    }
    if ell >= 1 {
        inequalities.push(unit(ell, -1));
    }
    if ell < n {
        inequalities.push(unit(ell + 1, 1));
    }
    ConeRecord {
        label: ConeLabel {
            ell,
            perm: (0..n).collect(),
        },
        generators,
        inequalities,
    }
}

pub fn translate(c: &ConeRecord, perm: &[usize]) -> ConeRecord {
    let compose: Vec<usize> = c.label.perm.iter().map(|&i| perm[i]).collect();
    ConeRecord {
        label: ConeLabel {
            ell: c.label.ell,
            perm: compose,
        },
        generators: c.generators.iter().map(|g| permute(g, perm)).collect(),
        inequalities: c.inequalities.iter().map(|a| permute(a, perm)).collect(),
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// The cones `σ_0, …, σ_n` spanning the positive part.
pub fn positive_part(n: usize) -> Result<FanData> {
    check_rank(n)?;
    Ok(FanData {
        n,
        cones: (0..=n).map(|l| sigma_cone(n, l)).collect(),
        weyl_closure: false,
    })
}

/// The complete fan: all `S_n`-translates of the `σ_ℓ`, without repeats.
pub fn kgl_fan(n: usize) -> Result<FanData> {
    check_rank(n)?;
    let mut seen = BTreeSet::new();
    let mut cones = Vec::new();
    for l in 0..=n {
        let base = sigma_cone(n, l);
        for p in permutations(n) {
            let c = translate(&base, &p);
            if seen.insert(c.key()) {
                cones.push(c);
            }
        }
    }
    Ok(FanData {
        n,
        cones,
        weyl_closure: true,
    })
}

fn check_rank(n: usize) -> Result<()> {
    if n == 0 || n > MAX_FAN_RANK {
        return Err(Error::size("fan rank", n, MAX_FAN_RANK));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocatedCone {
    /// A maximal cone containing the vector.
    pub maximal: String,
    /// Generators of the minimal cone, sorted.
    pub face: Vec<Vec<i64>>,
    /// Indices of the maximal cone's inequalities that hold with equality.
    pub equalities: Vec<usize>,
    pub label: String,
}

fn face_label(face: &[Vec<i64>]) -> String {
    if face.is_empty() {
        return "origin".into();
    }
    let parts: Vec<String> = face
        .iter()
        .map(|g| format!("({})", g.iter().map(i64::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    format!("cone[{}]", parts.join(","))
}

fn locate_in(c: &ConeRecord, v: &[Rat]) -> Option<LocatedCone> {
    if !c.contains(v) {
        return None;
    }
    let coeff = c.coefficients(v)?;
    let mut face: Vec<Vec<i64>> = c
        .generators
        .iter()
        .zip(&coeff)
        .filter(|(_, x)| x.is_positive())
        .map(|(g, _)| g.clone())
        .collect();
    face.sort();
    let equalities = c
        .inequalities
        .iter()
        .enumerate()
        .filter(|(_, a)| pair(a, v).is_zero())
        .map(|(i, _)| i)
        .collect();
    let label = face_label(&face);
    Some(LocatedCone {
        maximal: c.label.name(),
        face,
        equalities,
        label,
    })
}

/// The minimal cone of `fan` containing `v`.
pub fn locate(fan: &FanData, v: &[Rat]) -> Result<LocatedCone> {
    if v.len() != fan.n {
        return Err(Error::Dimension {
            expected: fan.n,
            got: v.len(),
        });
    }
    fan.cones
        .iter()
        .find_map(|c| locate_in(c, v))
        .ok_or_else(|| Error::Coverage(format!("{v:?}")))
}

/// Every maximal cone containing `v` yields the same minimal cone.
pub fn located_uniquely(fan: &FanData, v: &[Rat]) -> Result<bool> {
    let faces: BTreeSet<Vec<Vec<i64>>> = fan.cones.iter().filter_map(|c| locate_in(c, v)).map(|l| l.face).collect();
    if faces.is_empty() {
        return Err(Error::Coverage(format!("{v:?}")));
    }
    Ok(faces.len() == 1)
}

fn primitive(v: Vec<Rat>) -> Vec<i64> {
    let l = v.iter().fold(num_bigint::BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<num_bigint::BigInt> = v.iter().map(|x| (x * Rat::from(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |acc, x| acc.gcd(x));
    ints.iter()
        .map(|x| if g.is_zero() { 0 } else { (x / &g).to_i64().unwrap() })
        .collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Extreme rays of the pointed cone `{x : a·x ≥ 0 for all a in rows}`,
/// by brute force over rank-`n-1` subsystems.
pub fn rays_of(rows: &[Vec<i64>], n: usize) -> BTreeSet<Vec<i64>> {
    let q = Q::new();
    let mut out = BTreeSet::new();
    if n == 1 {
        for cand in [vec![1i64], vec![-1]] {
            if rows.iter().all(|a| a[0] * cand[0] >= 0) {
                out.insert(cand);
            }
        }
        return out;
    }
    for s in subsets(rows.len(), n - 1) {
        let m = Matrix::from_rows(s.iter().map(|&i| rows[i].iter().map(|&x| rat(x)).collect()).collect()).unwrap();
        let ker = matrix::kernel(&q, &m);
        if ker.len() != 1 {
            continue;
        }
        let r = primitive(ker[0].clone());
        for cand in [r.clone(), r.iter().map(|x| -x).collect()] {
            let cr: Vec<Rat> = cand.iter().map(|&x| rat(x)).collect();
            if rows.iter().all(|a| !pair(a, &cr).is_negative()) {
                out.insert(cand);
            }
        }
    }
    out
}

/// Facet normals of `cone(generators)` for full-dimensional cones.
pub fn facets_of(generators: &[Vec<i64>], n: usize) -> BTreeSet<Vec<i64>> {
    // the dual cone's rays are the facet normals
    rays_of(generators, n)
}

pub fn double_description_ok(c: &ConeRecord, n: usize) -> bool {
    let gens: BTreeSet<Vec<i64>> = c.generators.iter().cloned().collect();
    let ineqs: BTreeSet<Vec<i64>> = c.inequalities.iter().cloned().collect();
    let gens_ok = c.generators.iter().all(|g| {
        let gr: Vec<Rat> = g.iter().map(|&x| rat(x)).collect();
        c.contains(&gr)
    });
    gens_ok && rays_of(&c.inequalities, n) == gens && facets_of(&c.generators, n) == ineqs
}

pub fn is_weyl_stable(fan: &FanData) -> bool {
    let keys: BTreeSet<BTreeSet<Vec<i64>>> = fan.cones.iter().map(ConeRecord::key).collect();
    permutations(fan.n)
        .iter()
        .all(|p| fan.cones.iter().all(|c| keys.contains(&translate(c, p).key())))
}

/// For every pair of cones, the intersection is the cone on their common
/// generators, which is a face of both.
pub fn intersections_are_faces(fan: &FanData) -> bool {
    let n = fan.n;
    for (i, a) in fan.cones.iter().enumerate() {
        for b in &fan.cones[i + 1..] {
            let mut rows = a.inequalities.clone();
            rows.extend(b.inequalities.iter().cloned());
            let rays = rays_of(&rows, n);
            let common: BTreeSet<Vec<i64>> = a.key().intersection(&b.key()).cloned().collect();
            if rays != common {
                return false;
            }
        }
    }
    true
}

/// Document form: cones with integer generators and inequalities.
pub fn export(fan: &FanData) -> serde_json::Value {
    let cones: Vec<serde_json::Value> = fan
        .cones
        .iter()
        .map(|c| {
            serde_json::json!({
                "label": c.label.name(),
                "ell": c.label.ell,
                "generators": c.generators,
                "inequalities": c.inequalities,
            })
        })
        .collect();
    let mut doc = BTreeMap::new();
    doc.insert("n", serde_json::json!(fan.n));
    doc.insert("weyl_closure", serde_json::json!(fan.weyl_closure));
    doc.insert("cone_count", serde_json::json!(fan.cones.len()));
    doc.insert("cones", serde_json::Value::Array(cones));
    serde_json::to_value(doc).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn n2_generators() {
        let f = positive_part(2).unwrap();
        assert_eq!(f.cones[0].generators, vec![vec![1, 1], vec![0, 1]]);
        assert_eq!(f.cones[1].generators, vec![vec![-1, 0], vec![0, 1]]);
        assert_eq!(f.cones[2].generators, vec![vec![-1, 0], vec![-1, -1]]);
    }

    #[test]
    fn n1_rays() {
        let f = kgl_fan(1).unwrap();
        let gens: BTreeSet<Vec<i64>> = f.cones.iter().flat_map(|c| c.generators.clone()).collect();
        assert_eq!(gens, [vec![1], vec![-1]].into_iter().collect());
    }

    #[test]
    fn locate_examples() {
        let f = kgl_fan(2).unwrap();
        assert_eq!(locate(&f, &rv(&[0, 0])).unwrap().label, "origin");
        let l = locate(&f, &rv(&[1, 2])).unwrap();
        assert_eq!(l.maximal, "sigma_0");
        assert_eq!(l.face.len(), 2);
    }

    #[test]
    fn counts_and_checks() {
        for n in 1..=3 {
            let f = kgl_fan(n).unwrap();
            let fact: usize = (1..=n).product();
            assert_eq!(f.cones.len(), (n + 1) * fact);
            assert!(f.cones.iter().all(|c| double_description_ok(c, n)));
            assert!(is_weyl_stable(&f));
            assert!(intersections_are_faces(&f));
        }
    }
}
