use num_traits::Zero;

use depthzero::alcove::{
    b_sigma_orbit, base_alcove_contains, facet_is_minimal, facet_of_lambda, length_zero_w, ApartmentPoint,
};
use depthzero::cartan::{cartan_decompose, check_decomposition, specialize_point};
use depthzero::dl_variety::{
    enumerate_yw, inertia_torus_element, m_wsigma_points, DlContext,
};
use depthzero::fan::{kgl_fan, locate, positive_part, sigma_cone};
use depthzero::finite_field::{Fq, GaloisField};
use depthzero::finite_linear::{enumerate_group, frobenius_k, gl_order, moore_det, root_group_element};
use depthzero::lambda::{
    component_group, compute_lambda, lambdapst_check, weil_d, ShimuraDatum,
};
use depthzero::lt_specialize::{breaks, flag_from_breaks, normalize_breaks, specialize, wedge_oracle, LevelVector};
use depthzero::matrix::{self, Matrix};
use depthzero::puiseux::{matrices_agree, solve_sigma_lift, Puiseux, PuiseuxRing};
use depthzero::root_datum::{gl_datum, pairing, rat, BasedRootDatum};
use depthzero::{Int, Rat, Ring};

fn r(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

fn lt(n: usize, q: u64) -> ShimuraDatum {
    let mut mu = vec![0; n];
    mu[0] = -1;
    ShimuraDatum::new(gl_datum(n).unwrap(), q, mu).unwrap()
}

#[test]
fn pairings_and_classification() {
    assert_eq!(pairing(&[-1, 1], &[r(1, 3), r(2, 3)]).unwrap(), r(1, 3));
    assert!(pairing(&[-1, 1], &[r(0, 1), r(0, 1)]).unwrap().is_zero());
    let g2 = gl_datum(2).unwrap();
    let pos = g2.positive_roots();
    assert_eq!(pos.len(), 1);
    assert_eq!(g2.root(pos[0]), &[-1, 1]);
    let c = g2.classify_cocharacter(&[-1, 0]);
    assert!(c.dominant && c.minuscule);
    let c = g2.classify_cocharacter(&[-2, 0]);
    assert!(c.dominant && !c.minuscule);
    assert!(g2.classify_cocharacter(&[0, 0]).minuscule);
}

#[test]
fn weyl_groups_and_two_rho() {
    for (n, fact) in [(2, 2), (3, 6), (4, 24)] {
        assert_eq!(gl_datum(n).unwrap().weyl_group().unwrap().len(), fact);
    }
    assert_eq!(gl_datum(2).unwrap().two_rho(), vec![-1, 1]);
    assert_eq!(gl_datum(3).unwrap().two_rho(), vec![-2, 0, 2]);
    assert_eq!(gl_datum(1).unwrap().two_rho(), vec![0]);
    assert_eq!(gl_datum(1).unwrap().num_roots(), 0);
    assert_eq!(gl_datum(3).unwrap().num_roots(), 6);
}

#[test]
fn torus_without_roots() {
    let t = BasedRootDatum::new(1, vec![], vec![], vec![], None).unwrap();
    assert_eq!(t.two_rho(), vec![0]);
    assert_eq!(t.weyl_group().unwrap().len(), 1);
}

#[test]
fn base_alcove_membership() {
    let g2 = gl_datum(2).unwrap();
    let pt = |a: Rat, b: Rat| ApartmentPoint::new(vec![a, b]);
    assert!(base_alcove_contains(&g2, &pt(r(1, 4), r(-1, 4)), false));
    assert!(!base_alcove_contains(&g2, &pt(r(0, 1), r(0, 1)), false));
    assert!(!base_alcove_contains(&g2, &pt(r(-1, 4), r(1, 4)), false));
}

#[test]
fn length_zero_elements() {
    for n in 2..=4 {
        let w = length_zero_w(&gl_datum(n).unwrap(), &lt(n, 2).mu).unwrap();
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        assert_eq!(w.aut.as_permutation(), Some(cycle));
    }
    let g2 = gl_datum(2).unwrap();
    assert!(length_zero_w(&g2, &[0, 0]).unwrap().aut.is_identity());
    assert!(length_zero_w(&g2, &[-1, -1]).unwrap().aut.is_identity());
}

#[test]
fn frobenius_orbit_points() {
    let sd = lt(2, 2);
    let pts = b_sigma_orbit(&sd.datum, &sd.mu, &sd.w, 2);
    let ints: Vec<Vec<Rat>> = pts.into_iter().map(|p| p.coords).collect();
    assert_eq!(ints, vec![vec![rat(0), rat(0)], vec![rat(1), rat(0)], vec![rat(1), rat(1)]]);
    let sd = lt(3, 2);
    let pts = b_sigma_orbit(&sd.datum, &sd.mu, &sd.w, 3);
    assert!(sd.datum.is_central(&pts[3].coords));
}

#[test]
fn facets() {
    let sd = lt(2, 2);
    let ld = compute_lambda(&sd).unwrap();
    assert!(facet_of_lambda(&sd.datum, &ld.lambda).unwrap().zero_roots.is_empty());
    let g3 = gl_datum(3).unwrap();
    let z = facet_of_lambda(&g3, &[rat(0), rat(0), rat(0)]).unwrap();
    assert_eq!(z.zero_roots.len(), 6);
    let sd = ShimuraDatum::new(g3.clone(), 2, vec![-1, -1, 0]).unwrap();
    let ld = compute_lambda(&sd).unwrap();
    let f = facet_of_lambda(&g3, &ld.lambda).unwrap();
    let expect: Vec<usize> = (0..6).filter(|&i| pairing(g3.root(i), &ld.lambda).unwrap().is_zero()).collect();
    assert_eq!(f.zero_roots, expect);
    assert!(facet_is_minimal(&sd.datum, &sd.w, &ld.lambda) || !expect.is_empty());
}

#[test]
fn slope_examples() {
    for p in [2u64, 3, 5] {
        for n in 2..=4usize {
            let ld = compute_lambda(&lt(n, p)).unwrap();
            assert_eq!(ld.e, Int::from(p.pow(n as u32) - 1));
            let expect: Vec<i64> = (0..n as u32).map(|i| p.pow(i) as i64).collect();
            assert_eq!(ld.e_lambda_i64(), expect);
        }
    }
    let sd = ShimuraDatum::new(gl_datum(3).unwrap(), 4, vec![0, 0, 0]).unwrap();
    let ld = compute_lambda(&sd).unwrap();
    assert_eq!(ld.e, Int::from(1));
    assert_eq!(ld.dim_r, 0);
    assert!(ld.phi_mu_neg.is_empty());
}

#[test]
fn sign_scan_gl3() {
    let sd = lt(3, 2);
    let ld = compute_lambda(&sd).unwrap();
    let rep = lambdapst_check(&sd, &ld);
    assert_eq!(rep.verdicts.len(), 6);
    assert!(rep.pass);
}

#[test]
fn component_groups() {
    let cycle3 = Matrix::from_rows(vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
    assert_eq!(component_group(&cycle3).unwrap(), vec![Int::from(1), Int::from(1), Int::from(0)]);
}

#[test]
fn weil_integers() {
    let z = ShimuraDatum::new(gl_datum(2).unwrap(), 2, vec![0, 0]).unwrap();
    let w = weil_d(&z).unwrap();
    assert_eq!((w.d, w.mu_d), (1, vec![0, 0]));
    for n in 2..=5 {
        let w = weil_d(&lt(n, 3)).unwrap();
        assert_eq!((w.d, w.mu_d), (n as u64, vec![-1; n]));
    }
}

#[test]
fn finite_field_examples() {
    let f4 = GaloisField::new(2, 1, 2).unwrap();
    let w = f4.generator();
    assert_eq!(f4.frobenius(w), f4.mul(&w, &w));
    assert!(f4.base_elements().iter().all(|&x| f4.frobenius(x) == x));
    // ω² + ω + 1 = 0
    assert_eq!(f4.add(&f4.add(&f4.mul(&w, &w), &w), &f4.one()), Fq(0));
    assert_ne!(moore_det(&f4, &[Fq(1), w]).unwrap(), Fq(0));
    assert_eq!(moore_det(&f4, &[Fq(1), w]).unwrap(), Fq(1));
    assert_eq!(moore_det(&f4, &[Fq(1), Fq(1)]).unwrap(), Fq(0));

    let f9 = GaloisField::new(3, 1, 2).unwrap();
    for x in f9.elements() {
        assert_eq!(f9.frobenius(f9.frobenius(x)), x);
    }
    let m = Matrix::from_vec(2, 2, vec![f9.generator(), Fq(2), Fq(5), Fq(7)]).unwrap();
    assert_eq!(frobenius_k(&f9, &m, 2), m);
}

#[test]
fn root_group_elements() {
    let f4 = GaloisField::new(2, 1, 2).unwrap();
    for c in f4.elements() {
        let x = root_group_element(&f4, 2, &[1, -1], c).unwrap();
        assert_eq!(x, Matrix::from_rows(vec![vec![Fq(1), c], vec![Fq(0), Fq(1)]]).unwrap());
        for d in f4.elements() {
            let y = root_group_element(&f4, 2, &[1, -1], d).unwrap();
            let s = root_group_element(&f4, 2, &[1, -1], f4.add(&c, &d)).unwrap();
            assert_eq!(matrix::mul(&f4, &x, &y).unwrap(), s);
        }
    }
    assert!(root_group_element(&f4, 2, &[1, 1], Fq(1)).is_err());
}

#[test]
fn group_orders() {
    for (n, q, m, expect) in [(2usize, 2u32, 1u32, 6u128), (3, 2, 1, 168), (1, 5, 1, 4), (1, 3, 2, 8), (2, 3, 1, 48)] {
        let f = GaloisField::new(q, 1, m).unwrap();
        let count = enumerate_group(&f, n, 10_000_000).unwrap().count() as u128;
        assert_eq!(count, expect);
        assert_eq!(count, gl_order(n, f.size() as u64));
    }
    let f = GaloisField::new(2, 1, 2).unwrap();
    assert!(enumerate_group(&f, 3, 1000).is_err());
}

fn ctx(n: usize, q: u64, m: u32) -> DlContext {
    let sd = lt(n, q);
    let ld = compute_lambda(&sd).unwrap();
    DlContext::new(&sd, &ld, m).unwrap()
}

#[test]
fn point_counts() {
    assert!(enumerate_yw(&ctx(2, 2, 1), 1_000_000).unwrap().points.is_empty());
    let e = enumerate_yw(&ctx(2, 2, 2), 1_000_000).unwrap();
    assert_eq!(e.searched, 180);
    assert_eq!(e.points.len() % 6, 0);
    let e = enumerate_yw(&ctx(2, 3, 2), 1_000_000).unwrap();
    assert!(!e.fibers.is_empty());
    assert!(e.fibers.values().all(|&c| c == 48));
}

#[test]
fn torus_orders_and_inertia() {
    assert_eq!(m_wsigma_points(&ctx(2, 2, 2), 1_000_000).unwrap().order, 3);
    assert_eq!(m_wsigma_points(&ctx(3, 2, 3), 1_000_000).unwrap().order, 7);
    let c = ctx(2, 2, 2);
    let f = &c.field;
    let zeta = f.root_of_unity(3).unwrap();
    let t = inertia_torus_element(f, &c.ld, 1).unwrap();
    assert_eq!(t, vec![zeta, f.mul(&zeta, &zeta)]);
    assert_eq!(inertia_torus_element(f, &c.ld, 0).unwrap(), vec![Fq(1), Fq(1)]);
    assert_eq!(inertia_torus_element(f, &c.ld, 3).unwrap(), vec![Fq(1), Fq(1)]);
}

#[test]
fn split_torus_at_level_one() {
    let sd = ShimuraDatum::new(gl_datum(2).unwrap(), 3, vec![0, 0]).unwrap();
    let ld = compute_lambda(&sd).unwrap();
    let c = DlContext::new(&sd, &ld, 1).unwrap();
    // M = G here; the torus part alone has (q - 1)^2 elements
    let pts = m_wsigma_points(&c, 1_000_000).unwrap();
    assert_eq!(pts.order, 48);
    let diag = pts.elements.iter().filter(|g| g[(0, 1)] == Fq(0) && g[(1, 0)] == Fq(0)).count();
    assert_eq!(diag, 4);
}

#[test]
fn fan_examples() {
    let f = positive_part(2).unwrap();
    assert_eq!(f.cones.len(), 3);
    assert_eq!(sigma_cone(2, 1).generators, vec![vec![-1, 0], vec![0, 1]]);
    assert_eq!(positive_part(3).unwrap().cones.len(), 4);
    let full = kgl_fan(2).unwrap();
    assert_eq!(locate(&full, &[rat(0), rat(0)]).unwrap().label, "origin");
    let l = locate(&full, &[rat(1), rat(2)]).unwrap();
    assert_eq!(l.maximal, "sigma_0");
    let ld = compute_lambda(&lt(2, 2)).unwrap();
    let el: Vec<Rat> = ld.e_lambda().into_iter().map(Rat::from_integer).collect();
    assert_eq!(locate(&full, &el).unwrap().maximal, "sigma_0");
}

#[test]
fn cartan_examples() {
    let ring = PuiseuxRing::new(GaloisField::new(2, 1, 2).unwrap());
    let id = matrix::identity(&ring, 3);
    let d = cartan_decompose(&ring, &id).unwrap();
    assert!(d.exponents.iter().all(Zero::is_zero));
    let g = Matrix::from_rows(vec![
        vec![ring.parse("1 + u^(1/3) + O(u^(5))").unwrap(), ring.parse("[0,1]*u^(2/3) + O(u^(5))").unwrap()],
        vec![ring.parse("u + O(u^(5))").unwrap(), ring.parse("1 + O(u^(5))").unwrap()],
    ])
    .unwrap();
    let d = cartan_decompose(&ring, &g).unwrap();
    assert_eq!(d.exponents, vec![rat(0), rat(0)]);
    assert!(check_decomposition(&ring, &g, &d).unwrap());
    let s = specialize_point(&ring, &g, &kgl_fan(2).unwrap()).unwrap();
    assert_eq!(s.orbit.label, "origin");
}

#[test]
fn puiseux_examples() {
    let ring = PuiseuxRing::new(GaloisField::new(2, 1, 2).unwrap());
    assert_eq!(ring.u().val(), Some(rat(1)));
    let a = Puiseux::monomial(Fq(1), 1, 3);
    assert_eq!(ring.mul(&a, &Puiseux::monomial(Fq(1), 2, 3)), ring.u());
    assert_eq!(ring.qpower(&a, 1), Puiseux::monomial(Fq(1), 2, 3));
    let w = ring.field.generator();
    assert_eq!(ring.qpower(&Puiseux::constant(w), 1), Puiseux::constant(ring.field.mul(&w, &w)));

    let f3 = PuiseuxRing::new(GaloisField::new(3, 1, 1).unwrap());
    let x = f3.parse("1 + u + O(u^(5))").unwrap();
    let expect = f3.parse("1 + 2*u + u^(2) + 2*u^(3) + u^(4) + O(u^(5))").unwrap();
    assert_eq!(f3.inv(&x).unwrap(), expect);
}

#[test]
fn sigma_lift_identity() {
    let ring = PuiseuxRing::new(GaloisField::new(2, 1, 2).unwrap());
    let id = matrix::identity(&ring, 2);
    let one = matrix::identity(&ring.field, 2);
    let lift = solve_sigma_lift(&ring, &id, &one, &rat(4)).unwrap();
    assert!(lift.defects.is_empty());
    assert!(matrices_agree(&ring, &lift.h, &id));
}

#[test]
fn level_vector_strata() {
    let ring = PuiseuxRing::new(GaloisField::new(2, 1, 2).unwrap());
    let w = ring.field.generator();
    let a = ring.parse("u^(1/3) + O(u^(3))").unwrap();
    let t = LevelVector::new(vec![a.clone(), ring.scalar_mul(w, &a)]).unwrap();
    let rep = specialize(&ring, &t).unwrap();
    assert_eq!(rep.breaks.lengths, vec![2]);
    assert!(rep.agrees());
    assert_eq!(rep.flag.spaces.last().map(|s| s.rows()), Some(2));

    let b = ring.parse("u^(1/3) + u + O(u^(3))").unwrap();
    let t = LevelVector::new(vec![a.clone(), b]).unwrap();
    let nm = normalize_breaks(&ring, &t).unwrap();
    assert_eq!(nm.t.valuations(), vec![r(1, 3), rat(1)]);
    let twice = normalize_breaks(&ring, &nm.t).unwrap();
    assert!(matrix::is_identity(&ring.field, &twice.gamma));
    // exactly dependent coordinates cannot be separated
    let dup = LevelVector::new(vec![a.clone(), a.clone()]).unwrap();
    assert!(normalize_breaks(&ring, &dup).is_err());

    let ring8 = PuiseuxRing::new(GaloisField::new(2, 1, 3).unwrap());
    let inc = LevelVector::new(vec![
        ring8.parse("u^(1/7) + O(u^(4))").unwrap(),
        ring8.parse("u^(2/7) + O(u^(4))").unwrap(),
        ring8.parse("u^(4/7) + O(u^(4))").unwrap(),
    ])
    .unwrap();
    let bd = breaks(&ring8, &inc).unwrap();
    assert_eq!(bd.lengths, vec![1, 1, 1]);
    assert_eq!(flag_from_breaks(&ring8, &bd).unwrap(), wedge_oracle(&ring8, &inc).unwrap());

    let one = LevelVector::new(vec![ring.u()]).unwrap();
    let rep = specialize(&ring, &one).unwrap();
    assert_eq!(rep.breaks.lengths, vec![1]);
    assert!(rep.agrees());
}
