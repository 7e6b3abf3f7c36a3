use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use depthzero::alcove::facet_is_minimal;
use depthzero::cartan::{cartan_decompose, check_decomposition};
use depthzero::dl_variety::{
    check_phi_w, enumerate_yw, enumerate_yw_by_fibers, inertia_torus_element, m_wsigma_points, rational_group,
    DlContext, YwEnumeration, YwPoint,
};
use depthzero::fan::{double_description_ok, is_weyl_stable, kgl_fan, locate, located_uniquely, sigma_cone};
use depthzero::finite_field::{Fq, GaloisField};
use depthzero::finite_linear::{gl_order, moore_det, FqMatrix};
use depthzero::lambda::{component_group, compute_lambda, weil_d, LambdaData, ShimuraDatum};
use depthzero::lt_specialize::{random_gl_fq, random_level_vector, specialize};
use depthzero::matrix::{self, Matrix};
use depthzero::puiseux::{
    frobenius_matrix, inverse, mat_mul, matrices_agree, residue_matrix, solve_sigma_lift, Puiseux,
    PuiseuxMatrix, PuiseuxRing,
};
use depthzero::root_datum::{gl_datum, pairing, pairing_int, rat};
use depthzero::{Field, Int, Rat, Ring};

struct Outcome {
    pass: bool,
    note: String,
}

fn outcome(pass: bool, note: impl Into<String>) -> Outcome {
    Outcome { pass, note: note.into() }
}

fn lt_mu(n: usize) -> Vec<i64> {
    let mut mu = vec![0; n];
    mu[0] = -1;
    mu
}

fn lt(n: usize, q: u64) -> (ShimuraDatum, LambdaData) {
    let sd = ShimuraDatum::new(gl_datum(n).unwrap(), q, lt_mu(n)).unwrap();
    let ld = compute_lambda(&sd).unwrap();
    (sd, ld)
}

fn lt_ctx(n: usize, q: u64, m: u32) -> DlContext {
    let (sd, ld) = lt(n, q);
    DlContext::new(&sd, &ld, m).unwrap()
}

fn swap_instance() -> ShimuraDatum {
    let sq = gl_datum(2).unwrap().swap_square().unwrap();
    ShimuraDatum::new(sq, 2, vec![-1, 0, -1, 0]).unwrap()
}

fn c1_slope_values() -> Outcome {
    for p in [2u64, 3] {
        for n in 2..=4usize {
            let (sd, ld) = lt(n, p);
            let e = p.pow(n as u32) - 1;
            let expect: Vec<i64> = (0..n as u32).map(|i| p.pow(i) as i64).collect();
            let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
            if ld.e != Int::from(e) || ld.e_lambda_i64() != expect || sd.w.aut.as_permutation() != Some(cycle) {
                return outcome(false, format!("n={n} p={p}: e={} eλ={:?}", ld.e, ld.e_lambda_i64()));
            }
        }
    }
    outcome(true, "p ∈ {2,3}, n ∈ {2,3,4}")
}

fn suite() -> Vec<ShimuraDatum> {
    let mut out = Vec::new();
    for n in 1..=5usize {
        for q in [2u64, 3, 4, 5] {
            for k in 0..=n {
                // nondecreasing with one step: (-1)^k 0^{n-k} and 0^k 1^{n-k}
                let low: Vec<i64> = (0..n).map(|i| if i < k { -1 } else { 0 }).collect();
                let high: Vec<i64> = (0..n).map(|i| if i < k { 0 } else { 1 }).collect();
                for mu in [low, high] {
                    out.push(ShimuraDatum::new(gl_datum(n).unwrap(), q, mu).unwrap());
                }
            }
        }
    }
    for q in [2u64, 3] {
        out.push(ShimuraDatum::new(gl_datum(2).unwrap().swap_square().unwrap(), q, vec![-1, 0, -1, 0]).unwrap());
        out.push(ShimuraDatum::new(gl_datum(2).unwrap().swap_square().unwrap(), q, vec![-1, 0, 0, 0]).unwrap());
    }
    out
}

fn divides(a: &Int, b: &Int) -> bool {
    (b % a).is_zero()
}

fn c2_lambda_suite() -> Outcome {
    let mut count = 0;
    for sd in suite() {
        let d = &sd.datum;
        let ld = compute_lambda(&sd).unwrap();
        let ws = sd.wsigma();
        let q = Rat::from_integer(Int::from(sd.q.q));
        let img = ws.apply_rat(&ld.lambda);
        let identity = ld.lambda.iter().zip(&img).zip(&sd.mu).all(|((l, x), &m)| l - x * &q == rat(m));
        let dominant = d.simple_roots().iter().all(|&s| !pairing(d.root(s), &ld.lambda).unwrap().is_negative());
        // least common denominator of λ
        let mut e = Int::one();
        for x in &ld.lambda {
            let den = x.denom().clone();
            e = num_integer::lcm(e, den);
        }
        let qn = num_traits::pow(Int::from(sd.q.q), ld.n as usize) - Int::one();
        let r_ok = (0..d.num_roots())
            .filter(|&i| pairing_int(d.root(i), &sd.mu) < 0)
            .all(|i| {
                let r = pairing(d.root(i), &img).unwrap() * &q;
                let er = r * Rat::from_integer(e.clone());
                er.is_integer() && er.is_positive()
            });
        let ok = identity
            && dominant
            && e == ld.e
            && divides(&e, &qn)
            && !divides(&Int::from(sd.q.p), &e)
            && r_ok;
        if !ok {
            return outcome(false, format!("q={} μ={:?}", sd.q.q, sd.mu));
        }
        count += 1;
    }
    outcome(true, format!("{count} data"))
}

fn c3_root_sets() -> Outcome {
    let mut count = 0;
    for sd in suite() {
        let d = &sd.datum;
        let ld = compute_lambda(&sd).unwrap();
        let ws = sd.wsigma();
        let sign = |i: usize| pairing(d.root(i), &ld.lambda).unwrap();
        let all: Vec<usize> = (0..d.num_roots()).collect();
        let m: BTreeSet<usize> = all.iter().copied().filter(|&i| sign(i).is_zero()).collect();
        let n_set: BTreeSet<usize> = all.iter().copied().filter(|&i| sign(i).is_positive()).collect();
        let nbar: BTreeSet<usize> = all.iter().copied().filter(|&i| sign(i).is_negative()).collect();
        let pos: BTreeSet<usize> = all.iter().copied().filter(|&i| pairing_int(d.root(i), &sd.mu) > 0).collect();
        let neg = all.iter().filter(|&&i| pairing_int(d.root(i), &sd.mu) < 0).count();
        // α ↦ α ∘ (wσ)^{-1}
        let act = |set: &BTreeSet<usize>| -> BTreeSet<usize> {
            let inv = ws.inverse();
            set.iter()
                .map(|&i| {
                    let a = d.root(i);
                    let img: Vec<i64> = (0..d.rank())
                        .map(|j| (0..d.rank()).map(|k| a[k] * inv.mat[(k, j)]).sum())
                        .collect();
                    d.root_index(&img).expect("roots map to roots")
                })
                .collect()
        };
        let lhs: BTreeSet<usize> = n_set.intersection(&act(&nbar)).copied().collect();
        let two_rho: i64 = d
            .positive_roots()
            .iter()
            .map(|&i| pairing_int(d.root(i), &sd.mu))
            .sum();
        let ok = lhs == pos && act(&m) == m && neg as i64 == two_rho && neg == ld.dim_r;
        if !ok {
            return outcome(false, format!("q={} μ={:?}", sd.q.q, sd.mu));
        }
        count += 1;
    }
    outcome(true, format!("{count} data"))
}

fn rational_shortcut(ctx: &DlContext, en: &YwEnumeration) -> bool {
    let expected = if ctx.in_k(&ctx.w_inv) { en.group_order } else { 0 };
    en.points.len() as u128 == expected
}

fn c4_lang_torsor() -> Outcome {
    let mut notes = Vec::new();
    for (n, q, m) in [(2usize, 2u64, 1u32), (2, 2, 2), (2, 3, 1), (2, 3, 2), (3, 2, 1), (3, 2, 2)] {
        let ctx = lt_ctx(n, q, m);
        let en = enumerate_yw(&ctx, 100_000_000).unwrap();
        let expect = gl_order(n, q);
        if en.fibers.values().any(|&c| c as u128 != expect) {
            return outcome(false, format!("GL_{n} q={q} m={m}: fibers {:?}", en.fibers.values()));
        }
        if m == 1 && !rational_shortcut(&ctx, &en) {
            return outcome(false, format!("GL_{n} q={q}: rational count {}", en.points.len()));
        }
        notes.push(format!("GL{n}/q{q}/m{m}: {} pts", en.points.len()));
    }
    // the GL_3 levels above are empty; m = 3 exercises the 168-element fibers
    let ctx = lt_ctx(3, 2, 3);
    let en = enumerate_yw_by_fibers(&ctx, 10_000_000).unwrap();
    let ok = !en.points.is_empty() && en.all_fibers_are_torsors() && en.group_order == 168;
    notes.push(format!("GL3/q2/m3: {} pts", en.points.len()));
    outcome(ok, notes.join(", "))
}

fn c5_phi_w() -> Outcome {
    let mut sizes = Vec::new();
    for m in 1..=2 {
        let ctx = lt_ctx(3, 2, m);
        let (nil, bij) = check_phi_w(&ctx).unwrap();
        if !(nil && bij) {
            return outcome(false, format!("m={m}: nilpotent={nil} bijective={bij}"));
        }
        sizes.push(ctx.unipotent_elements(&ctx.phi0).len());
    }
    outcome(true, format!("|N ∩ Ad(wσ)N| = {sizes:?}"))
}

fn c6_actions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for (n, q, m) in [(2usize, 2u64, 2u32), (2, 3, 2), (3, 2, 3)] {
        let ctx = lt_ctx(n, q, m);
        let pts = enumerate_yw_by_fibers(&ctx, 10_000_000).unwrap().points;
        let grp = rational_group(&ctx, 10_000_000).unwrap();
        let mw = m_wsigma_points(&ctx, 10_000_000).unwrap();
        let id = ctx.identity();
        for g in &pts {
            let pt = YwPoint { rep: g.clone(), level: m };
            for g0 in &grp {
                if g0 == &id {
                    continue;
                }
                if ctx.act(&pt, g0, &id, 0).unwrap() == pt {
                    return outcome(false, format!("GL_{n} q={q}: G^σ fixes a point"));
                }
            }
        }
        let trials = if n == 3 { 2000 } else { pts.len() * 8 };
        for _ in 0..trials {
            let pt = YwPoint { rep: pts[rng.gen_range(0..pts.len())].clone(), level: m };
            let g0 = &grp[rng.gen_range(0..grp.len())];
            let mm = &mw.elements[rng.gen_range(0..mw.elements.len())];
            let tau = rng.gen_range(-3..4);
            let both = ctx.act(&pt, g0, mm, tau).unwrap();
            let a = ctx.act(&ctx.act(&pt, g0, &id, 0).unwrap(), &id, mm, tau).unwrap();
            let b = ctx.act(&ctx.act(&pt, &id, mm, tau).unwrap(), g0, &id, 0).unwrap();
            if both != a || both != b {
                return outcome(false, format!("GL_{n} q={q}: actions do not commute"));
            }
        }
        let ld = &ctx.ld;
        let e = ld.e_u64();
        let zeta = ctx.field.root_of_unity(e).unwrap();
        for tau in 0..e as i64 {
            let z = inertia_torus_element(&ctx.field, ld, tau).unwrap();
            let zm = depthzero::finite_linear::diagonal(&ctx.field, &z);
            let ok_mu = ctx.sd.mu.iter().all(|&mu_i| {
                let k = (tau as i128 * e as i128 * mu_i as i128).rem_euclid(e as i128) as u64;
                ctx.field.pow(zeta, k) == Fq(1)
            });
            let central = mw.elements.iter().all(|x| ctx.mul(&zm, x) == ctx.mul(x, &zm));
            if !(ok_mu && central) {
                return outcome(false, format!("GL_{n} q={q}: inertia element τ={tau}"));
            }
        }
    }
    let mut orders = Vec::new();
    for q in [2u64, 3] {
        for n in [2usize, 3] {
            let ctx = lt_ctx(n, q, n as u32);
            let t = m_wsigma_points(&ctx, 10_000_000).unwrap().order as u64;
            if t != q.pow(n as u32) - 1 {
                return outcome(false, format!("|T^wσ| = {t} for n={n} q={q}"));
            }
            orders.push(t);
        }
    }
    outcome(true, format!("|T^wσ| = {orders:?}"))
}

/// `F_p`-rank of field elements through their coordinate vectors.
fn fp_rank(f: &GaloisField, a: &[Fq]) -> usize {
    let p = f.p() as i64;
    let mut rows: Vec<Vec<i64>> = a.iter().map(|&x| f.coords(x).into_iter().map(i64::from).collect()).collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] % p != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = (1..p).find(|k| rows[rank][c] * k % p == 1).unwrap();
        for r in 0..rows.len() {
            if r != rank && rows[r][c] % p != 0 {
                let fac = rows[r][c] * inv % p;
                for k in 0..cols {
                    rows[r][k] = (rows[r][k] - fac * rows[rank][k]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn c7_moore() -> Outcome {
    let mut checked = 0;
    for (k, nmax) in [(2u32, 2usize), (3, 3)] {
        let f = GaloisField::new(2, 1, k).unwrap();
        let elems: Vec<Fq> = f.elements().collect();
        for n in 1..=nmax {
            let total = elems.len().pow(n as u32);
            for mut idx in 0..total {
                let a: Vec<Fq> = (0..n)
                    .map(|_| {
                        let x = elems[idx % elems.len()];
                        idx /= elems.len();
                        x
                    })
                    .collect();
                let nonzero = moore_det(&f, &a).unwrap() != Fq(0);
                if nonzero != (fp_rank(&f, &a) == n) {
                    return outcome(false, format!("F_{} {:?}", f.size(), a));
                }
                checked += 1;
            }
        }
    }
    outcome(true, format!("{checked} tuples"))
}

fn c8_specialization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut total = 0;
    for (n, q) in [(2usize, 2u32), (3, 2), (2, 3)] {
        let r = PuiseuxRing::new(GaloisField::new(q, 1, n as u32).unwrap());
        for i in 0..200 {
            let t = random_level_vector(&r, n, &mut rng).unwrap();
            match specialize(&r, &t) {
                Ok(rep) if rep.agrees() => total += 1,
                Ok(_) => return outcome(false, format!("(n,q)=({n},{q}) #{i}: disagreement")),
                Err(e) => return outcome(false, format!("(n,q)=({n},{q}) #{i}: {e}")),
            }
        }
    }
    outcome(true, format!("{total} agreements"))
}

fn random_series(r: &PuiseuxRing, rng: &mut ChaCha8Rng, ram: u64, lo: i64, tnum: i64) -> Puiseux {
    let size = r.field.size();
    let terms: Vec<(i64, Fq)> = (0..rng.gen_range(0..4))
        .map(|_| (rng.gen_range(lo..tnum), Fq(rng.gen_range(0..size))))
        .collect();
    Puiseux::from_terms(ram, Some(tnum), terms)
}

fn random_unit_matrix(r: &PuiseuxRing, rng: &mut ChaCha8Rng, n: usize, ram: u64, tnum: i64) -> (PuiseuxMatrix, FqMatrix) {
    let c = loop {
        let data: Vec<Fq> = (0..n * n).map(|_| Fq(rng.gen_range(0..r.field.size()))).collect();
        let c = Matrix::from_vec(n, n, data).unwrap();
        if matrix::det(&r.field, &c).unwrap() != Fq(0) {
            break c;
        }
    };
    let mut m = Matrix::filled(n, n, Puiseux::zero());
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = r.add(&Puiseux::constant(c[(i, j)]), &random_series(r, rng, ram, 1, tnum));
        }
    }
    (m, c)
}

fn c9_sigma_lift() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let t = rat(6);
    for i in 0..100 {
        let n = rng.gen_range(1..=3usize);
        let q = [2u32, 3][rng.gen_range(0..2)];
        let m = rng.gen_range(1..=2u32);
        let ram = rng.gen_range(1..=3u64);
        let tnum = 6 * ram as i64;
        let r = PuiseuxRing::new(GaloisField::new(q, 1, m).unwrap());
        let h0 = random_gl_fq(&GaloisField::new(q, 1, m).unwrap(), n, &mut rng);
        let h0 = {
            // any invertible residue, not just rational ones
            let (_, c) = random_unit_matrix(&r, &mut rng, n, ram, tnum);
            if i % 2 == 0 { c } else { h0 }
        };
        let (x, _) = random_unit_matrix(&r, &mut rng, n, ram, tnum);
        let x_res = residue_matrix(&x).unwrap();
        let x1 = mat_mul(&r, &inverse(&r, &depthzero::puiseux::constant_matrix(&x_res)).unwrap(), &x);
        let base = mat_mul(
            &r,
            &depthzero::puiseux::constant_matrix(&h0),
            &inverse(&r, &depthzero::puiseux::constant_matrix(&depthzero::finite_linear::frobenius(&r.field, &h0))).unwrap(),
        );
        let g = depthzero::puiseux::truncate_matrix(&mat_mul(&r, &base, &x1), &t);
        let lift = match solve_sigma_lift(&r, &g, &h0, &t) {
            Ok(l) => l,
            Err(e) => return outcome(false, format!("instance {i}: {e}")),
        };
        let back = mat_mul(&r, &lift.h, &inverse(&r, &frobenius_matrix(&r, &lift.h, 1)).unwrap());
        let ok = matrices_agree(&r, &back, &g)
            && residue_matrix(&lift.h).unwrap() == h0
            && lift.defects.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return outcome(false, format!("instance {i} (n={n}, q={q}, m={m})"));
        }
    }
    // GL_1: h = h0 Π_k σ^k(G/c) with c = h0^{1-q}
    for i in 0..20 {
        let q = [2u32, 3][i % 2];
        let f = GaloisField::new(q, 1, 2).unwrap();
        let r = PuiseuxRing::new(f.clone());
        let h0 = Fq(rng.gen_range(1..f.size()));
        let c = f.mul(&h0, &f.inv(&f.frobenius(h0)).unwrap());
        let ram = rng.gen_range(1..=2u64);
        let tnum = 6 * ram as i64;
        let y = r.add(&r.one(), &random_series(&r, &mut rng, ram, 1, tnum));
        let g = Matrix::from_vec(1, 1, vec![r.scalar_mul(c, &y)]).unwrap();
        let h0m = Matrix::from_vec(1, 1, vec![h0]).unwrap();
        let lift = solve_sigma_lift(&r, &g, &h0m, &t).unwrap();
        let mut expect = Puiseux::constant(h0);
        let mut k = 0;
        while (q as u64).pow(k) < 6 * ram + 1 {
            expect = r.mul(&expect, &r.qpower(&y, k));
            k += 1;
        }
        if !r.eq_to_precision(&lift.h[(0, 0)], &expect.truncate(&t)) {
            return outcome(false, format!("GL_1 case {i}"));
        }
    }
    outcome(true, "100 instances + 20 GL_1 closed forms")
}

fn c10_fans() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for n in 1..=4usize {
        let fan = kgl_fan(n).unwrap();
        if !is_weyl_stable(&fan) || !fan.cones.iter().all(|c| double_description_ok(c, n)) {
            return outcome(false, format!("n={n}: structure"));
        }
        for _ in 0..1000 {
            let v: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(-3..=3))).collect();
            if locate(&fan, &v).is_err() || !located_uniquely(&fan, &v).unwrap() {
                return outcome(false, format!("n={n}: {v:?} not located"));
            }
        }
    }
    // 0 ≤ a1 ≤ a2, a1 ≤ 0 ≤ a2, a1 ≤ a2 ≤ 0
    let explicit = |l: usize, a: &[Rat]| match l {
        0 => !a[0].is_negative() && a[0] <= a[1],
        1 => !a[0].is_positive() && !a[1].is_negative(),
        _ => a[0] <= a[1] && !a[1].is_positive(),
    };
    for l in 0..=2 {
        let c = sigma_cone(2, l);
        for a in -3..=3 {
            for b in -3..=3 {
                let v = [rat(a), rat(b)];
                if c.contains(&v) != explicit(l, &v) {
                    return outcome(false, format!("sigma_{l} at {v:?}"));
                }
            }
        }
    }
    for i in 0..500 {
        let n = rng.gen_range(2..=3usize);
        let ram = rng.gen_range(1..=3u64);
        let tnum = 10 * ram as i64;
        let r = PuiseuxRing::new(GaloisField::new([2u32, 3][i % 2], 1, 2).unwrap());
        let (a, _) = random_unit_matrix(&r, &mut rng, n, ram, tnum);
        let (b, _) = random_unit_matrix(&r, &mut rng, n, ram, tnum);
        let mut ks: Vec<i64> = (0..n).map(|_| rng.gen_range(0..2 * ram as i64)).collect();
        let mut d = Matrix::filled(n, n, Puiseux::zero());
        for (j, &k) in ks.iter().enumerate() {
            d[(j, j)] = Puiseux::monomial(Fq(1), k, ram);
        }
        let g = mat_mul(&r, &mat_mul(&r, &a, &d), &b);
        let dec = match cartan_decompose(&r, &g) {
            Ok(x) => x,
            Err(e) => return outcome(false, format!("matrix {i}: {e}")),
        };
        ks.sort();
        let expect: Vec<Rat> = ks.iter().map(|&k| Rat::new(k.into(), (ram as i64).into())).collect();
        if !check_decomposition(&r, &g, &dec).unwrap() || dec.exponents != expect {
            return outcome(false, format!("matrix {i}: exponents {:?}", dec.exponents));
        }
    }
    outcome(true, "n ≤ 4 fans, 500 Cartan decompositions")
}

fn c11_arithmetic() -> Outcome {
    for n in 2..=5usize {
        let (sd, ld) = lt(n, 2);
        let mut expect = vec![Int::one(); n - 1];
        expect.push(Int::zero());
        if component_group(&sd.w.aut.mat).unwrap() != expect {
            return outcome(false, format!("Smith form n={n}"));
        }
        let wd = weil_d(&sd).unwrap();
        if wd.d != n as u64 || wd.mu_d != vec![-1; n] {
            return outcome(false, format!("weil_d n={n}: {wd:?}"));
        }
        if !facet_is_minimal(&sd.datum, &sd.w, &ld.lambda) {
            return outcome(false, format!("facet LT n={n}"));
        }
        let z = ShimuraDatum::new(gl_datum(n).unwrap(), 2, vec![0; n]).unwrap();
        let zl = compute_lambda(&z).unwrap();
        if !facet_is_minimal(&z.datum, &z.w, &zl.lambda) {
            return outcome(false, format!("facet μ=0 n={n}"));
        }
    }
    let sw = swap_instance();
    let sl = compute_lambda(&sw).unwrap();
    if facet_is_minimal(&sw.datum, &sw.w, &sl.lambda) {
        return outcome(false, "swap instance reported minimal");
    }
    outcome(true, "n = 2..5 and the swap instance")
}

fn main() {
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        ("slope values", Some(Duration::from_secs(1)), c1_slope_values),
        ("lambda identities", Some(Duration::from_secs(5)), c2_lambda_suite),
        ("root-set identities", None, c3_root_sets),
        ("Lang torsor", Some(Duration::from_secs(120)), c4_lang_torsor),
        ("phi_w nilpotence", None, c5_phi_w),
        ("actions", None, c6_actions),
        ("Moore criterion", None, c7_moore),
        ("specialization oracle", Some(Duration::from_secs(60)), c8_specialization),
        ("sigma-lift", None, c9_sigma_lift),
        ("fan suite", None, c10_fans),
        ("arithmetic invariants", None, c11_arithmetic),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = limit.map_or(true, |l| took <= l);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = limit.map_or(String::new(), |l| format!(" / {}s", l.as_secs()));
        println!(
            "{} [{:>2}] {name}: {} ({:.2}s{budget})",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            out.note,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
