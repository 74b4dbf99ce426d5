//! Library results checked against independent oracles on randomized input.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use valvol_core::algebra::{int, rat, ExtRat, Poly, Rat};
use valvol_core::branch::{implicitize, newton_puiseux, normalize_branch, puiseux_characteristic, BranchParam, PLANE_VARS};
use valvol_core::degeneration::{initial_form, kss_degeneration, rees_family};
use valvol_core::families::{family_report, FamilySpec};
use valvol_core::invariants::{lct_newton_bound, lct_unibranch, local_volume_closed, minimize_nvol, nvol_at, nvol_of_pair};
use valvol_core::valuation::{MonomialValuation, Weight};

fn small_rat(rng: &mut ChaCha8Rng) -> Rat {
    let mut n = rng.random_range(-4i64..=4);
    if n == 0 {
        n = 1;
    }
    rat(n, rng.random_range(1i64..=3))
}

/// Random primitive singular branch with `a ≤ max_a` and first
/// characteristic exponent `b ≤ max_b`.
fn random_branch(rng: &mut ChaCha8Rng, max_a: u32, max_b: u32) -> BranchParam {
    loop {
        let a = rng.random_range(2..=max_a);
        let b = rng.random_range(a + 1..=max_b);
        if b % a == 0 {
            continue;
        }
        let mut phi = vec![(b, Rat::one())];
        for e in b + 1..=b + 4 {
            if rng.random_bool(0.35) {
                phi.push((e, small_rat(rng)));
            }
        }
        if let Ok(br) = normalize_branch(a, phi) {
            return br;
        }
    }
}

/// `∏_j (y − φ(ζ^j x^{1/a}))` from power sums of the roots and Newton's
/// identities. Uses no elimination.
fn product_oracle(br: &BranchParam) -> Poly {
    let a = br.a();
    let xv = ["x"];
    let phi = br.phi_poly("x");
    let mut power = Poly::constant(&xv, Rat::one());
    let mut p: Vec<Poly> = vec![Poly::zero(&xv)];
    for _ in 1..=a {
        power = &power * &phi;
        // keep exponents divisible by a, then s^a = x
        let terms = power.terms().filter(|(e, _)| e[0] % a == 0).map(|(e, c)| (vec![e[0] / a], c * Rat::from_integer(a.into())));
        p.push(Poly::from_terms(&xv, terms));
    }
    let mut e: Vec<Poly> = vec![Poly::constant(&xv, Rat::one())];
    for k in 1..=a as usize {
        let mut acc = Poly::zero(&xv);
        for i in 1..=k {
            let term = &e[k - i] * &p[i];
            acc = if i % 2 == 1 { &acc + &term } else { &acc - &term };
        }
        e.push(acc.scale(&Rat::new(BigInt::one(), BigInt::from(k))));
    }
    let mut f = Poly::zero(&PLANE_VARS);
    for (k, ek) in e.iter().enumerate() {
        let ek = ek.embed(&PLANE_VARS).unwrap();
        let yk = Poly::var(&PLANE_VARS, "y").unwrap().pow(a - k as u32);
        let term = &ek * &yk;
        f = if k % 2 == 0 { &f + &term } else { &f - &term };
    }
    f
}

#[test]
fn implicitization_matches_product_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let br = random_branch(&mut rng, 4, 11);
        let f = implicitize(&br);
        assert_eq!(f, product_oracle(&br), "branch {br}");
        // and the parametrization lies on it
        for t in [int(2), rat(-1, 3), rat(5, 7)] {
            let (x, y) = br.point_at(&t);
            assert!(f.eval(&[x, y]).is_zero());
        }
    }
}

#[test]
fn newton_puiseux_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let br = random_branch(&mut rng, 5, 11);
        let f = implicitize(&br);
        let back = newton_puiseux(&f, 20).unwrap();
        // t ↦ ζt with ζ^a = 1 may flip signs of φ without changing the curve
        assert!(valvol_core::branch::equisingular(&back, &br).unwrap());
        assert_eq!(implicitize(&back), f);
    }
}

#[test]
fn newton_bound_agrees_with_closed_lct() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let br = random_branch(&mut rng, 5, 15);
        let ch = puiseux_characteristic(&br).unwrap();
        let nb = lct_newton_bound(&implicitize(&br)).unwrap();
        assert_eq!(nb.value, lct_unibranch(&ch), "branch {br}");
    }
}

#[test]
fn initial_form_is_power_of_binomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut extra = vec![normalize_branch(4, vec![(6, int(1)), (7, int(1))]).unwrap(), normalize_branch(4, vec![(6, int(1)), (9, rat(-2, 3))]).unwrap()];
    for _ in 0..25 {
        extra.push(random_branch(&mut rng, 4, 11));
    }
    for br in extra {
        let ch = puiseux_characteristic(&br).unwrap();
        let (a0, b0) = (ch.a0(), ch.b0().unwrap());
        let xi = Weight::from_ints(&[a0 as i64, b0 as i64]).unwrap();
        let y = Poly::var(&PLANE_VARS, "y").unwrap();
        let x = Poly::var(&PLANE_VARS, "x").unwrap();
        let expected = (&y.pow(a0) - &x.pow(b0)).pow(ch.d());
        assert_eq!(initial_form(&implicitize(&br), &xi).unwrap(), expected, "branch {br}");
    }
}

#[test]
fn rees_endpoints() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let xys = ["x", "y", "s"];
    for _ in 0..50 {
        let terms: Vec<(Vec<u32>, Rat)> = (0..rng.random_range(1..6)).map(|_| (vec![rng.random_range(0..5), rng.random_range(0..5)], small_rat(&mut rng))).collect();
        let f = Poly::from_terms(&PLANE_VARS, terms);
        if f.is_zero() {
            continue;
        }
        let xi = Weight::from_ints(&[rng.random_range(1..5), rng.random_range(1..5)]).unwrap();
        let fam = rees_family(&f, &xi).unwrap();
        assert_eq!(fam.restrict_zero(2), initial_form(&f, &xi).unwrap());
        assert_eq!(fam.substitute(2, &Poly::constant(&xys, Rat::one())).drop_var(2), f);
    }
}

/// Brute-force minimum of `nvol_at` over weights `(p, q)` with `p, q ≤ n`.
fn grid_min(ch: &valvol_core::branch::PuiseuxChar, lambda: &Rat, n: i64) -> Rat {
    let mut best: Option<Rat> = None;
    for p in 1..=n {
        for q in 1..=n {
            if let ExtRat::Finite(v) = nvol_at(ch, lambda, &Weight::from_ints(&[p, q]).unwrap()).unwrap() {
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
        }
    }
    best.unwrap()
}

#[test]
fn minimizer_beats_lattice_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..40 {
        let br = random_branch(&mut rng, 4, 11);
        let ch = puiseux_characteristic(&br).unwrap();
        let lct = lct_unibranch(&ch);
        let lambda = &lct * rat(rng.random_range(0..20), 20);
        let m = minimize_nvol(&ch, &lambda).unwrap();
        let grid = grid_min(&ch, &lambda, 24);
        assert!(m.value <= grid, "{ch} at {lambda}: {} > grid {grid}", m.value);
        // the returned ray attains the value
        let w = Weight::new(vec![Rat::from_integer(m.ray.0.clone()), Rat::from_integer(m.ray.1.clone())]).unwrap();
        assert_eq!(nvol_at(&ch, &lambda, &w).unwrap(), ExtRat::Finite(m.value.clone()));
        // and the value is the closed form
        assert_eq!(m.value, local_volume_closed(&ch, &lambda).unwrap().value);
    }
}

#[test]
fn branch_value_formula_matches_implicit_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..30 {
        let br = random_branch(&mut rng, 4, 11);
        let ch = puiseux_characteristic(&br).unwrap();
        let f = implicitize(&br);
        let (mu, nu) = (rng.random_range(1..9), rng.random_range(1..9));
        let v = MonomialValuation::plane(int(mu), int(nu)).unwrap();
        let formula = valvol_core::valuation::eval_on_branch(&ch, v.weight()).unwrap();
        assert_eq!(v.eval(&f).unwrap(), ExtRat::Finite(formula));
    }
}

#[test]
fn degeneration_preserves_normalized_volume() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..20 {
        let br = random_branch(&mut rng, 4, 11);
        let ch = puiseux_characteristic(&br).unwrap();
        let lambda = lct_unibranch(&ch) * rat(rng.random_range(0..30), 30);
        let d = kss_degeneration(&br, &lambda).unwrap();
        assert!(d.kss);
        let xi = d.xi_weight();
        // λ·f₀ as a pair, compared with the original branch at ξ
        let f0_pair = valvol_core::invariants::PairA2::empty().with(d.initial_form.clone(), lambda.clone(), None).unwrap();
        assert_eq!(nvol_of_pair(&f0_pair, &xi).unwrap(), nvol_at(&ch, &lambda, &xi).unwrap());
        assert_eq!(nvol_of_pair(&d.central_pair(), &xi).unwrap(), ExtRat::Finite(d.nvol.clone()));
    }
}

#[test]
fn degeneration_is_semistable_on_grid() {
    for (a, b) in [(2u32, 3u32), (2, 5), (3, 4), (3, 5), (4, 7)] {
        let br = normalize_branch(a, vec![(b, int(1))]).unwrap();
        let lct = lct_unibranch(&puiseux_characteristic(&br).unwrap());
        for k in 0..40 {
            let d = kss_degeneration(&br, &(&lct * rat(k, 40))).unwrap();
            assert!(d.kss);
        }
    }
    for k in 0..20 {
        let d = kss_degeneration(&normalize_branch(1, vec![(2, int(1)), (5, int(3))]).unwrap(), &rat(k, 20)).unwrap();
        assert!(d.kss);
        assert!(d.initial_form == Poly::var(&PLANE_VARS, "y").unwrap());
    }
}

fn family_json(a: u32, phi: &[(u32, String)], samples: &[Rat], lambda: &Rat) -> String {
    let phi: Vec<serde_json::Value> = phi.iter().map(|(e, c)| serde_json::json!([e, c])).collect();
    let samples: Vec<String> = samples.iter().map(|s| s.to_string()).collect();
    serde_json::json!({"param": "s", "samples": samples, "a": a, "phi": phi, "lambda": lambda.to_string()}).to_string()
}

#[test]
fn equisingular_families_are_constant() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..20 {
        let a = rng.random_range(2..=4u32);
        let b = loop {
            let b = rng.random_range(a + 1..=11);
            if b % a != 0 && b.gcd(&a) == 1 {
                break b;
            }
        };
        // s only enters above b, so every fiber has characteristic (a; b)
        let phi = vec![(b, "1".to_string()), (b + 1, "s".to_string()), (b + 2, "s^2 - 1/2".to_string())];
        let samples: Vec<Rat> = (0..5).map(|_| small_rat(&mut rng)).collect();
        let lambda = (Rat::new(1.into(), a.into()) + Rat::new(1.into(), b.into())) * rat(rng.random_range(0..10), 10);
        let spec = FamilySpec::parse(&family_json(a, &phi, &samples, &lambda)).unwrap();
        let r = family_report(&spec, &int(12)).unwrap();
        assert!(r.constancy.all(), "a={a} b={b} λ={lambda}");
        assert!(r.flat.holds);
        let common = r.common.expect("common degeneration");
        for fiber in &r.fibers {
            let d = kss_degeneration(&fiber.branch, &lambda).unwrap();
            assert_eq!(valvol_core::families::DegenerationDescriptor::from(&d), common);
        }
    }
}

#[test]
fn one_mutated_fiber_breaks_constancy() {
    for (a, b, b2) in [(2u32, 3u32, 5u32), (2, 5, 7), (3, 4, 5), (3, 5, 7), (2, 3, 7), (3, 7, 8), (4, 5, 7), (2, 7, 9), (3, 4, 7), (4, 7, 9)] {
        // the coefficient of t^b vanishes at s = 0 only, leaving t^{b2} leading
        let phi = vec![(b, "s".to_string()), (b2, "1".to_string())];
        let samples = vec![int(1), int(2), int(0), int(3)];
        let lambda = rat(1, 20);
        let spec = FamilySpec::parse(&family_json(a, &phi, &samples, &lambda)).unwrap();
        let r = family_report(&spec, &int(12)).unwrap();
        assert!(!r.constancy.characteristic);
        assert!(!r.constancy.lct);
        assert!(r.common.is_none());
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;
    use valvol_core::algebra::resultant_in;
    use valvol_core::degeneration::{kss_test, P1ConePair};
    use valvol_core::ideals::{colength, volume_estimate};
    use valvol_core::valuation::{degeneration_chain, stabilization_bound};

    fn poly_strategy(vars: &'static [&'static str], max_deg: u32) -> impl Strategy<Value = Poly> {
        let n = vars.len();
        prop::collection::vec((prop::collection::vec(0..=max_deg, n), -5i64..=5, 1i64..=3), 0..5)
            .prop_map(move |terms| Poly::from_terms(vars, terms.into_iter().map(|(e, p, q)| (e, rat(p, q)))))
    }

    const XYT: &[&str] = &["x", "y", "t"];

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(p in poly_strategy(XYT, 3), q in poly_strategy(XYT, 3), r in poly_strategy(XYT, 3)) {
            prop_assert_eq!(&p + &q, &q + &p);
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert!((&p - &p).is_zero());
        }

        #[test]
        fn print_parse_round_trip(p in poly_strategy(XYT, 4)) {
            let back = valvol_core::algebra::poly_parse(&p.to_string(), XYT).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn resultant_swap_and_multiplicativity(p in poly_strategy(XYT, 2), q in poly_strategy(XYT, 2), r in poly_strategy(XYT, 2)) {
            let deg = |f: &Poly| f.degree_in(2).unwrap_or(0);
            prop_assume!(deg(&p) > 0 && deg(&q) > 0 && deg(&r) > 0);
            let pq = resultant_in(&p, &q, "t").unwrap();
            let qp = resultant_in(&q, &p, "t").unwrap();
            let sign = if (deg(&p) * deg(&q)) % 2 == 1 { -&qp } else { qp };
            prop_assert_eq!(&pq, &sign);
            let prq = resultant_in(&(&p * &r), &q, "t").unwrap();
            prop_assert_eq!(prq, &pq * &resultant_in(&r, &q, "t").unwrap());
        }

        #[test]
        fn chain_is_monotone(f in poly_strategy(&["t1", "t2", "x1"], 3), al in prop::collection::vec(1i64..6, 2), be in 1i64..6) {
            prop_assume!(!f.is_zero());
            let alpha = Weight::from_ints(&al).unwrap();
            let beta = Weight::from_ints(&[be]).unwrap();
            let c = degeneration_chain(&alpha, &beta, &f).unwrap();
            prop_assert!(c.low <= c.mid && c.mid <= c.high);
            if let Some(bound) = stabilization_bound(&alpha, &f) {
                let big = Weight::new(vec![bound + Rat::one()]).unwrap();
                let c = degeneration_chain(&alpha, &big, &f).unwrap();
                prop_assert_eq!(c.mid, c.high);
            }
        }

        #[test]
        fn colength_bound(mu in 1i64..8, nu in 1i64..8, lam in 1i64..300) {
            let v = MonomialValuation::plane(int(mu), int(nu)).unwrap();
            let l = int(lam);
            let est = volume_estimate(&v, &l).unwrap();
            let exact = Rat::new(BigInt::one(), BigInt::from(mu * nu));
            // unit squares at the counted points cover the triangle and fit
            // inside the one enlarged by μ + ν
            let slack = (Rat::new(BigInt::one(), mu.into()) + Rat::new(BigInt::one(), nu.into())) * int(2) / &l
                + Rat::new(BigInt::from((mu + nu) * (mu + nu)), BigInt::from(mu * nu)) / (&l * &l);
            prop_assert!(est >= exact);
            let diff = if est > exact { &est - &exact } else { &exact - &est };
            prop_assert!(diff <= slack);
            // colength is monotone in the cutoff
            prop_assert!(colength(&v, &l).unwrap() <= colength(&v, &(l + Rat::one())).unwrap());
        }

        #[test]
        fn kss_threshold(a0 in 2u32..7, b0 in 3u32..12, k in -50i64..50) {
            prop_assume!(a0 < b0 && a0.gcd(&b0) == 1);
            let t = Rat::new(BigInt::one(), a0.into()) - Rat::new(BigInt::one(), b0.into());
            let c = &t + rat(k, 1_000_000);
            prop_assume!(c >= Rat::zero());
            let verdict = kss_test(&P1ConePair::cone(a0, b0, c.clone()).unwrap());
            prop_assert_eq!(verdict, c >= t);
        }
    }
}
