use std::f64::consts::{E, LN_2};

use proptest::prelude::*;
use twistlab::asymptotics::{
    derivation_gap, kp_index_capped_family, leibniz_defect, ribe_family, truncation_family, truncation_norm,
    DerivationKind,
};
use twistlab::distance::{
    basis_sum_certificate, dist_lb_symmetric, symmetrize_linear, witness_certificate, SymmetricOptions,
};
use twistlab::estimation::{estimate_q, k0_lower_bound};
use twistlab::group::{enumerate_signed_permutations, group_average, SignedPermutation};
use twistlab::maps::{
    homogenize, kalton_peck, kalton_peck_nonhom, omega, omega_theta, quasilinearity_defect, ribe, ribe_direct,
};
use twistlab::sampling::{derive_seed, stream, Purpose};
use twistlab::spaces::hom_map_norm_estimate;
use twistlab::twisted::{TwistedSumElement, TwistedSumSpace};
use twistlab::{HomogeneousMap, LipschitzProfile, Matrix, PExponent, PNormedSpace, Vector};

fn exponent() -> impl Strategy<Value = PExponent<f64>> {
    prop_oneof![Just(1.0), Just(2.0), Just(0.5), 0.2f64..4.0].prop_map(|p| PExponent::new(p).unwrap())
}

fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(0.0), 6 => -50.0f64..50.0, 2 => -1e-3f64..1e-3]
}

fn vector(n: usize) -> impl Strategy<Value = Vector<f64>> {
    prop::collection::vec(coord(), n).prop_map(|v| Vector::new(v).unwrap())
}

fn nonzero_vector(n: usize) -> impl Strategy<Value = Vector<f64>> {
    vector(n).prop_filter("nonzero", |v| !v.is_zero())
}

fn pair(max_n: usize) -> impl Strategy<Value = (Vector<f64>, Vector<f64>)> {
    (1..=max_n).prop_flat_map(|n| (vector(n), vector(n)))
}

fn profile() -> impl Strategy<Value = LipschitzProfile<f64>> {
    prop_oneof![
        Just(LipschitzProfile::identity()),
        (0.0f64..6.0).prop_map(|c| LipschitzProfile::clamped(c).unwrap()),
        (0.1f64..3.0).prop_map(|a| LipschitzProfile::custom(
            move |t| a * t.atan(),
            a,
            Some(a * std::f64::consts::FRAC_PI_2),
            true
        )
        .unwrap()),
    ]
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix<f64> {
    use rand::Rng;
    let mut rng = stream(seed, Purpose::Verify, 0);
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-3.0..3.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn p_triangle((x, y) in pair(8), p in exponent()) {
        let q = p.value().min(1.0);
        let lhs = (&x + &y).norm(p).powf(q);
        let rhs = x.norm(p).powf(q) + y.norm(p).powf(q);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + f64::MIN_POSITIVE);
    }

    #[test]
    fn quasinorm_homogeneity(x in vector(6), t in -100.0f64..100.0, p in exponent()) {
        prop_assert!(rel_close(x.scaled(t).norm(p), t.abs() * x.norm(p), 1e-12));
    }

    #[test]
    fn concavity_modulus((x, y) in pair(8), p in exponent()) {
        let denom = x.norm(p) + y.norm(p);
        prop_assume!(denom > 0.0);
        let delta = if p.value() < 1.0 { 2f64.powf(p.value().recip() - 1.0) } else { 1.0 };
        prop_assert!((&x + &y).norm(p) / denom <= delta * (1.0 + 1e-12));
    }

    #[test]
    fn ribe_omega_identity(x in vector(10)) {
        let s = x.sum();
        let direct: f64 = x.iter().filter(|v| **v != 0.0).map(|v| v * (s.abs() / v.abs()).ln()).sum();
        match ribe_direct(&x) {
            Some(d) => {
                prop_assert!(s != 0.0);
                let scale = x.norm(PExponent::one()) * (1.0 + x.max_abs().ln().abs() + s.abs().ln().abs());
                prop_assert!((ribe(&x) - d).abs() <= 1e-9 * scale.max(1.0));
                prop_assert!((d - direct).abs() <= 1e-9 * scale.max(1.0));
            }
            None => prop_assert!(s == 0.0),
        }
        let omega_form = x.iter().fold(omega(s), |a, v| a - omega(*v));
        prop_assert_eq!(ribe(&x), omega_form);
    }

    #[test]
    fn lemma_w_bound(s in -1e3f64..1e3, t in -1e3f64..1e3) {
        let lhs = (omega(s + t) - omega(s) - omega(t)).abs();
        prop_assert!(lhs <= LN_2 * (s.abs() + t.abs()) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn omega_theta_bound(s in -50.0f64..50.0, t in -50.0f64..50.0, theta in profile()) {
        let lhs = (omega_theta(t + s, &theta) - omega_theta(t, &theta) - omega_theta(s, &theta)).abs();
        let bound = 2.0 * theta.lip_const() / E * (t.abs() + s.abs());
        prop_assert!(lhs <= bound * (1.0 + 1e-12) + 1e-12, "{lhs} > {bound}");
    }

    #[test]
    fn phi0_pointwise_bound((x, y) in pair(6), theta in profile()) {
        let lhs = &(&kalton_peck_nonhom(&(&x + &y), &theta) - &kalton_peck_nonhom(&x, &theta)) - &kalton_peck_nonhom(&y, &theta);
        for k in 0..x.dim() {
            let bound = 2.0 * theta.lip_const() / E * (x[k].abs() + y[k].abs());
            prop_assert!(lhs[k].abs() <= bound * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn phi_vs_phi0(x in vector(8), theta in profile(), p in exponent()) {
        let nx = x.norm(p);
        let gap = (&kalton_peck(&x, &theta, p) - &kalton_peck_nonhom(&x, &theta)).norm(p);
        let bound = theta.lip_const() * nx * nx.ln().abs();
        prop_assert!(gap <= bound * (1.0 + 1e-9) + 1e-12);
        if nx <= 1.0 {
            prop_assert!(gap <= theta.lip_const() / E * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn maps_are_homogeneous(x in vector(6), t in -10.0f64..10.0, theta in profile(), p in exponent()) {
        let n = x.dim();
        let r = HomogeneousMap::ribe(n).unwrap();
        let kp = HomogeneousMap::kalton_peck(n, theta.clone(), p).unwrap();
        let dom = PNormedSpace::new(n, p).unwrap();
        let h = homogenize(|v: &Vector<f64>| v.map(|c| c * c + c.sin()), dom, dom);
        for f in [&r, &kp, &h] {
            let lhs = f.apply(&x.scaled(t));
            let rhs = f.apply(&x).scaled(t);
            let scale = rhs.max_abs().max(lhs.max_abs()).max(1e-300);
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-9 * scale, "{}", f.label());
        }
    }

    #[test]
    fn kp_commutes_with_signed_permutations(x in vector(7), theta in profile(), p in exponent(), seed in any::<u64>()) {
        let u = SignedPermutation::random(7, &mut stream(seed, Purpose::Group, 0));
        let f = HomogeneousMap::kalton_peck(7, theta, p).unwrap();
        let lhs = f.apply(&u.apply(&x));
        let rhs = u.apply(&f.apply(&x));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn ribe_defect_bounded((x, y) in pair(10)) {
        let f = HomogeneousMap::ribe(x.dim()).unwrap();
        if let Ok(d) = quasilinearity_defect(&f, &x, &y) {
            prop_assert!(d <= 2.0 * LN_2 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn kp_defect_bounded((x, y) in pair(8), theta in profile(), p in exponent()) {
        let f = HomogeneousMap::kalton_peck(x.dim(), theta.clone(), p).unwrap();
        if let Ok(d) = quasilinearity_defect(&f, &x, &y) {
            let bound = 10f64.powf(p.value().recip()) / E * theta.lip_const();
            prop_assert!(d <= bound * (1.0 + 1e-12), "{d} > {bound}");
        }
    }

    #[test]
    fn twisted_sum_invariants(x in vector(6), y in vector(1), yz in vector(1), seed in any::<u64>()) {
        let space = TwistedSumSpace::new(HomogeneousMap::ribe(6).unwrap());
        let one = PExponent::one();
        prop_assert_eq!(space.twisted_norm(&space.inclusion(&y).unwrap()).unwrap(), y.norm(one));
        let b = space.section(&x).unwrap();
        prop_assert_eq!(space.twisted_norm(&b).unwrap(), x.norm(one));
        prop_assert_eq!(space.quotient(&b).unwrap(), x.clone());
        prop_assert!(space.quotient(&space.inclusion(&y).unwrap()).unwrap().is_zero());
        let z = TwistedSumElement::new(yz, x.clone());
        let q = space.quotient(&z).unwrap();
        prop_assert!(q.norm(one) <= space.twisted_norm(&z).unwrap());
        prop_assert_eq!(q.is_zero(), z.x.is_zero());
        let (z1, z2) = space.random_elements(seed, 0);
        let denom = space.twisted_norm(&z1).unwrap() + space.twisted_norm(&z2).unwrap();
        prop_assume!(denom > 0.0);
        prop_assert!(space.twisted_norm(&z1.add(&z2)).unwrap() / denom <= 1.0 + 2.0 * LN_2 + 1e-12);
    }

    #[test]
    fn derivation_oracle_and_gap(seed in any::<u64>(), n in 2usize..64) {
        let (x, y) = twistlab::asymptotics::random_dense_pair::<f64>(n, seed, 0);
        let one = PExponent::one();
        let d = leibniz_defect(DerivationKind::Homogeneous, &x, &y, n, one).unwrap();
        prop_assert!(d.agrees(1e-9, 1e-15 * x.hadamard(&y).norm(one)), "{d:?}");
        let nx = x.norm(one);
        prop_assert!(derivation_gap(&x, n, one).unwrap() <= nx * nx.ln().abs() / (n as f64).ln() * (1.0 + 1e-12) + 1e-13 * nx);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimate_monotone_in_budget(seed in any::<u64>(), b1 in 1usize..60, extra in 0usize..60) {
        let f = HomogeneousMap::<f64>::ribe(6).unwrap();
        let a = estimate_q(&f, b1, seed).unwrap();
        let b = estimate_q(&f, b1 + extra, seed).unwrap();
        prop_assert!(b.sampled_lower >= a.sampled_lower);
    }

    #[test]
    fn estimate_is_sound(seed in any::<u64>(), n in 2usize..12, theta in profile(), p in exponent()) {
        let r = estimate_q(&HomogeneousMap::<f64>::ribe(n).unwrap(), 40, seed).unwrap();
        prop_assert!(r.is_consistent());
        let kp = HomogeneousMap::kalton_peck(n, theta, p).unwrap();
        prop_assert!(estimate_q(&kp, 40, seed).unwrap().is_consistent());
    }

    #[test]
    fn certificate_soundness(seed in any::<u64>(), n in 2usize..8) {
        // for every linear l: max over the certificate points of |f - l|(x)/|x| >= value
        let f = HomogeneousMap::<f64>::ribe(n).unwrap();
        let cert = basis_sum_certificate(&f).unwrap();
        let mut pts = cert.points.clone();
        pts.push(cert.target.clone());
        for i in 0..100u64 {
            let l = random_matrix(1, n, derive_seed(seed, Purpose::Verify, i));
            let g = f.minus_linear(&l).unwrap();
            let sampled = pts.iter().map(|x| g.apply(x).norm(PExponent::one()) / x.norm(PExponent::one())).fold(0.0, f64::max);
            prop_assert!(sampled >= cert.value * (1.0 - 1e-12));
        }
    }

    #[test]
    fn general_certificate_soundness(seed in any::<u64>(), c in prop::collection::vec(-3.0f64..3.0, 3)) {
        let n = 4;
        let p = PExponent::new(1.5).unwrap();
        let f = HomogeneousMap::kalton_peck(n, LipschitzProfile::clamped(2.0).unwrap(), p).unwrap();
        let points: Vec<Vector<f64>> = (0..3).map(|j| Vector::from_fn(n, |k| ((j * n + k) as f64).cos())).collect();
        let target = points.iter().zip(&c).fold(Vector::zeros(n), |acc, (x, cj)| acc.axpy(*cj, x));
        prop_assume!(!target.is_zero());
        let cert = witness_certificate(&f, points.clone(), c.clone(), target.clone()).unwrap();
        let mut all = points;
        all.push(target);
        for i in 0..100u64 {
            let l = random_matrix(n, n, derive_seed(seed, Purpose::Verify, i));
            let g = f.minus_linear(&l).unwrap();
            let sampled = all.iter().filter(|x| !x.is_zero()).map(|x| g.apply(x).norm(p) / x.norm(p)).fold(0.0, f64::max);
            prop_assert!(sampled >= cert.value * (1.0 - 1e-12));
        }
    }

    #[test]
    fn group_average_oracle(seed in any::<u64>(), n in 1usize..=4) {
        let l = random_matrix(n, n, seed);
        let alpha = symmetrize_linear(&l).unwrap();
        prop_assert!(group_average(&l).max_abs_diff(&Matrix::identity(n).scaled(alpha)) <= 1e-12);
    }

    #[test]
    fn averaging_contraction(seed in any::<u64>(), n in 2usize..=4, x in nonzero_vector(4), theta in profile(), q in prop_oneof![Just(1.0), Just(2.0), 1.0f64..3.0]) {
        let x = x.leading(n);
        prop_assume!(!x.is_zero());
        let p = PExponent::new(q).unwrap();
        let f = HomogeneousMap::kalton_peck(n, theta, p).unwrap();
        let l = random_matrix(n, n, seed);
        let alpha = symmetrize_linear(&l).unwrap();
        let lhs = (&f.apply(&x) - &x.scaled(alpha)).norm(p) / x.norm(p);
        let rhs = enumerate_signed_permutations(n)
            .iter()
            .map(|u| {
                let ux = u.apply(&x);
                (&f.apply(&ux) - &l.apply(&ux)).norm(p) / ux.norm(p)
            })
            .fold(0.0, f64::max);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12, "{lhs} > {rhs}");
    }

    #[test]
    fn symmetric_bound_monotone_in_witnesses(extra in prop::collection::vec(nonzero_vector(16), 1..4), theta in profile()) {
        let n = 16;
        let f = HomogeneousMap::kalton_peck(n, theta, PExponent::one()).unwrap();
        let mut w = vec![Vector::basis(n, 0), Vector::ones(n)];
        let opts = SymmetricOptions::default();
        let mut prev = dist_lb_symmetric(&f, &w, &opts).unwrap().value;
        for x in extra {
            w.push(x);
            let next = dist_lb_symmetric(&f, &w, &opts).unwrap().value;
            prop_assert!(next >= prev - opts.tol, "{next} < {prev}");
            prev = next;
        }
    }
}

#[test]
fn k0_strictly_increasing() {
    let vals: Vec<f64> = [10usize, 100, 1000, 10_000]
        .iter()
        .map(|&n| {
            let f = HomogeneousMap::<f64>::ribe(n).unwrap();
            k0_lower_bound(&f, twistlab::distance::ribe_dist_lower_bound(n)).unwrap()
        })
        .collect();
    assert!(vals.windows(2).all(|w| w[1] > w[0]), "{vals:?}");
}

#[test]
fn family_invariants() {
    let grid = vec![4, 16, 64, 256];
    let fam = ribe_family::<f64>(grid.clone()).unwrap();
    let rows: Vec<(f64, f64)> = grid
        .iter()
        .map(|&n| {
            let f = fam.build(n).unwrap();
            (f.q_certified_upper().unwrap(), basis_sum_certificate(&f).unwrap().value)
        })
        .collect();
    assert!(rows.windows(2).all(|w| w[1].0 < w[0].0));
    assert!(rows.iter().all(|r| r.1 >= 0.5 - 1e-12));

    for q in [0.5, 1.0, 2.0] {
        let p = PExponent::new(q).unwrap();
        let fam = kp_index_capped_family::<f64>(grid.clone(), p).unwrap();
        let mut prev = f64::INFINITY;
        for &n in &grid {
            let f = fam.build(n).unwrap();
            let ub = f.q_certified_upper().unwrap();
            assert!((ub - 10f64.powf(1.0 / q) / E / n as f64).abs() < 1e-12);
            assert!(ub < prev);
            prev = ub;
            let sampler = twistlab::sampling::UnitSphereSampler::new(3);
            let norm = hom_map_norm_estimate(&f, &sampler, 2000, &[Vector::ones(n), Vector::basis(n, 0)]);
            assert!(norm <= 1.0 + 1e-12, "n={n} p={q} norm {norm}");
        }
    }
}

#[test]
fn truncation_invariants() {
    let phi = HomogeneousMap::<f64>::ribe(128).unwrap();
    let fam = truncation_family(&phi, vec![4, 16, 64, 128], 400, 2).unwrap();
    let mut prev: Option<f64> = None;
    for &n in fam.grid() {
        let f = fam.build(n).unwrap();
        let norm = truncation_norm(&f, 400, derive_seed(2, Purpose::Row, n as u64));
        assert!((norm - 1.0).abs() <= 1e-6);
        let d = f.q_certified_upper().unwrap().recip();
        if let Some(pd) = prev {
            if d > pd {
                assert!(1.0 / d < 1.0 / pd);
            }
        }
        assert!(d >= 0.25 * (n as f64).ln() / (2.0 * LN_2));
        prev = Some(d);
    }
}
