//! Worked examples with frozen constants. Expected values were computed by
//! hand from closed forms and are kept as literals.

#![allow(clippy::approx_constant, clippy::excessive_precision)]

use std::f64::consts::E;

use twistlab::asymptotics::{
    idempotent_decay, kp_derivation, kp_index_capped_family, leibniz_defect, ribe_family, DerivationKind,
};
use twistlab::distance::{
    basis_sum_certificate, best_linear_heuristic, dist_lb_symmetric, symmetrize_linear, SymmetricOptions,
};
use twistlab::estimation::{certified_q_upper, estimate_q, k0_lower_bound, MapKind};
use twistlab::maps::{homogenize, kalton_peck, kalton_peck_nonhom, omega, omega_theta, quasilinearity_defect, ribe};
use twistlab::sampling::UnitSphereSampler;
use twistlab::spaces::{aoki_rolewicz_exponent, hom_map_norm_estimate, p_quasinorm};
use twistlab::twisted::{TwistedSumElement, TwistedSumSpace};
use twistlab::{HomogeneousMap, LipschitzProfile, Matrix, PExponent, PNormedSpace, Vector};

fn v(c: &[f64]) -> Vector<f64> {
    Vector::new(c.to_vec()).unwrap()
}

fn exp(p: f64) -> PExponent<f64> {
    PExponent::new(p).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn quasinorm_values() {
    assert_eq!(p_quasinorm(&[0.0, 1.0, 0.0], exp(0.3)).unwrap(), 1.0);
    assert!(close(Vector::<f64>::ones(8).norm(exp(0.5)), 64.0, 1e-12));
    assert!(close(Vector::<f64>::ones(27).norm(exp(3.0)), 3.0, 1e-12));
    assert_eq!(p_quasinorm(&[3.0, 4.0], exp(2.0)).unwrap(), 5.0);
}

#[test]
fn aoki_rolewicz_values() {
    assert!(close(aoki_rolewicz_exponent(1.0).unwrap().value(), 1.0, 1e-15));
    assert!(close(aoki_rolewicz_exponent(2f64.sqrt()).unwrap().value(), 0.6666666666666666, 1e-12));
    assert!(close(aoki_rolewicz_exponent(2.0).unwrap().value(), 0.5, 1e-12));
}

#[test]
fn map_norm_values() {
    let sp = PNormedSpace::new(5, exp(1.5)).unwrap();
    let sampler = UnitSphereSampler::new(7);
    assert!(close(hom_map_norm_estimate(&HomogeneousMap::identity(sp), &sampler, 50, &[]), 1.0, 1e-12));
    assert_eq!(hom_map_norm_estimate(&HomogeneousMap::zero(sp, sp), &sampler, 50, &[]), 0.0);
    let f = HomogeneousMap::kalton_peck(64, LipschitzProfile::identity(), exp(2.0)).unwrap();
    let norm = hom_map_norm_estimate(&f, &sampler, 10, &[Vector::ones(64)]);
    assert!(close(norm, 2.0794415416798357, 1e-12));
}

#[test]
fn omega_values() {
    assert_eq!(omega(0.0), 0.0);
    assert!(close(omega(1.0 / E), -0.36787944117144233, 1e-15));
    assert!(close(omega(2.0), 1.3862943611198906, 1e-15));
    let clamp1 = LipschitzProfile::clamped(1.0).unwrap();
    assert_eq!(omega_theta(1.0, &clamp1), 0.0);
    assert!(close(omega_theta(1.0 / E, &clamp1), 0.36787944117144233, 1e-15));
    assert_eq!(omega_theta(2.0, &LipschitzProfile::identity()), 0.0);
}

#[test]
fn ribe_values() {
    assert_eq!(ribe(&Vector::<f64>::basis(5, 3)), 0.0);
    assert!(close(ribe(&Vector::<f64>::ones(10)), 23.025850929940457, 1e-12));
    assert!(close(ribe(&v(&[2.0, -1.0])), -1.3862943611198906, 1e-15));
    assert_eq!(ribe(&v(&[1.0, -1.0])), 0.0);
}

#[test]
fn kalton_peck_values() {
    let id = LipschitzProfile::identity();
    let one = PExponent::one();
    assert!(kalton_peck(&Vector::<f64>::basis(4, 1), &id, exp(0.7)).is_zero());
    let s = kalton_peck(&Vector::<f64>::ones(16), &id, exp(2.0));
    assert!(s.iter().all(|c| close(*c, 1.3862943611198906, 1e-12)));
    assert!(kalton_peck(&Vector::<f64>::basis(3, 0).scaled(-4.5), &id, one).is_zero());
    assert!(kalton_peck_nonhom(&v(&[1.5, -2.0, 1.0]), &id).is_zero());
    let x = Vector::<f64>::basis(3, 0).scaled(1.0 / E);
    assert!(kalton_peck_nonhom(&x, &id).max_abs_diff(&x) <= 1e-15);
    assert!(kalton_peck_nonhom(&Vector::<f64>::zeros(3), &id).is_zero());
}

#[test]
fn homogenize_values() {
    let sp = PNormedSpace::new(3, exp(1.0)).unwrap();
    let x = v(&[0.5, -2.0, 1.25]);
    let hom = homogenize(|y: &Vector<f64>| y.scaled(3.0), sp, sp);
    assert!(hom.apply(&x).max_abs_diff(&x.scaled(3.0)) <= 1e-12);
    let constant = homogenize(|_: &Vector<f64>| v(&[1.0, 2.0, 3.0]), sp, sp);
    assert!(constant.apply(&x).is_zero());
    let affine = homogenize(|y: &Vector<f64>| y + &v(&[7.0, -1.0, 0.5]), sp, sp);
    assert!(affine.apply(&x).max_abs_diff(&x) <= 1e-12);
}

#[test]
fn defect_values() {
    let l = HomogeneousMap::linear(Matrix::from_fn(2, 3, |i, j| (i + 2 * j) as f64 - 1.5), exp(1.0), exp(2.0)).unwrap();
    assert!(quasilinearity_defect(&l, &v(&[1.0, -2.0, 0.5]), &v(&[0.25, 3.0, -1.0])).unwrap() < 1e-15);
    let r = HomogeneousMap::ribe(6).unwrap();
    let d = quasilinearity_defect(&r, &Vector::basis(6, 0), &Vector::basis(6, 1)).unwrap();
    assert!(close(d, 0.6931471805599453, 1e-15));
    assert!(close((omega(1.0f64) - 2.0 * omega(0.5)).abs(), 0.6931471805599453, 1e-15));
}

#[test]
fn estimate_values() {
    let l = HomogeneousMap::<f64>::identity(PNormedSpace::new(4, exp(1.0)).unwrap());
    assert!(estimate_q(&l, 200, 0).unwrap().sampled_lower < 1e-15);
    let q = estimate_q(&HomogeneousMap::<f64>::ribe(8).unwrap(), 500, 0).unwrap().sampled_lower;
    assert!((0.6931471805599453..=1.3862943611198906).contains(&q));
    let kp = HomogeneousMap::kalton_peck(8, LipschitzProfile::clamped(1.0).unwrap(), exp(1.0)).unwrap();
    assert!(estimate_q(&kp, 500, 0).unwrap().sampled_lower <= 3.678794411714423);
}

#[test]
fn certificate_constants() {
    assert!(close(certified_q_upper::<f64>(MapKind::Ribe).unwrap(), 1.3862943611198906, 1e-15));
    let kp1 = certified_q_upper(MapKind::KaltonPeck { p: exp(1.0), lip: 1.0 }).unwrap();
    assert!(close(kp1, 3.678794411714423, 1e-12));
    let kp_half = certified_q_upper(MapKind::KaltonPeck { p: exp(0.5), lip: 1.0 }).unwrap();
    assert!(close(kp_half, 36.78794411714423, 1e-11));
}

#[test]
fn k0_values() {
    let r100 = HomogeneousMap::<f64>::ribe(100).unwrap();
    assert!(close(k0_lower_bound(&r100, 2.302585092994046).unwrap(), 1.6609640474436813, 1e-12));
    let l = HomogeneousMap::<f64>::identity(PNormedSpace::new(3, exp(1.0)).unwrap());
    assert_eq!(k0_lower_bound(&l, 0.0).unwrap(), 0.0);
    let big = HomogeneousMap::<f64>::ribe(1_000_000).unwrap();
    assert!(close(k0_lower_bound(&big, 6.907755278982137).unwrap(), 4.982892142331044, 1e-12));
}

#[test]
fn basis_certificate_values() {
    for (n, expected) in [(10, 1.151292546497023), (100, 2.302585092994046), (1000, 3.453877639491069)] {
        let cert = basis_sum_certificate(&HomogeneousMap::<f64>::ribe(n).unwrap()).unwrap();
        assert!(close(cert.value, expected, 1e-9), "n={n}: {}", cert.value);
    }
    let l = HomogeneousMap::<f64>::identity(PNormedSpace::new(5, exp(1.0)).unwrap());
    assert!(basis_sum_certificate(&l).unwrap().value < 1e-15);
}

#[test]
fn symmetrize_values() {
    assert_eq!(symmetrize_linear(&Matrix::<f64>::identity(3)).unwrap(), 1.0);
    let off = Matrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { (i * 3 + j) as f64 });
    assert_eq!(symmetrize_linear(&off).unwrap(), 0.0);
    let d = Matrix::from_fn(2, 2, |i, j| if i == 0 && j == 0 { 1.0 } else { 0.0 });
    assert_eq!(symmetrize_linear(&d).unwrap(), 0.5);
}

#[test]
fn symmetric_bound_values() {
    let opts = SymmetricOptions::default();
    let n = 55;
    let f = HomogeneousMap::kalton_peck(n, LipschitzProfile::identity(), exp(1.0)).unwrap();
    let b = dist_lb_symmetric(&f, &[Vector::basis(n, 0), Vector::ones(n)], &opts).unwrap();
    assert!(b.value >= 2.0036665926162356 - opts.tol, "{}", b.value);
    let g = HomogeneousMap::scalar_identity(PNormedSpace::new(4, exp(2.0)).unwrap(), -1.75);
    let b = dist_lb_symmetric(&g, &[Vector::basis(4, 0), Vector::ones(4)], &opts).unwrap();
    assert!(b.value <= opts.tol);
}

#[test]
fn heuristic_values() {
    let n = 6;
    let m = Matrix::from_fn(2, n, |i, j| (i as f64 - j as f64) * 0.5);
    let l = HomogeneousMap::linear(m, exp(1.0), exp(1.0)).unwrap();
    let samples: Vec<Vector<f64>> = (0..n).map(|i| Vector::basis(n, i)).chain([Vector::ones(n)]).collect();
    assert!(best_linear_heuristic(&l, &samples, 200, 0).unwrap().est <= 1e-6);
    let r = HomogeneousMap::ribe(n).unwrap();
    let samples: Vec<Vector<f64>> =
        (0..n).map(|i| Vector::basis(n, i)).chain((2..=n).map(|k| Vector::partial_sum(n, k))).collect();
    let fit = best_linear_heuristic(&r, &samples, 300, 0).unwrap();
    assert!(fit.est >= 0.8958797346140275 - 1e-9, "{}", fit.est);
}

#[test]
fn twisted_values() {
    let space = TwistedSumSpace::new(HomogeneousMap::<f64>::ribe(4).unwrap());
    let z = TwistedSumElement::new(Vector::zeros(1), Vector::partial_sum(4, 2));
    assert!(close(space.twisted_norm(&z).unwrap(), 3.386294361119891, 1e-12));
    let y = v(&[-2.5]);
    assert_eq!(space.twisted_norm(&space.inclusion(&y).unwrap()).unwrap(), 2.5);
    let x = v(&[1.0, -3.0, 0.5, 2.0]);
    assert!(close(space.twisted_norm(&space.section(&x).unwrap()).unwrap(), 6.5, 1e-12));
    assert_eq!(space.quotient(&TwistedSumElement::new(y.clone(), x.clone())).unwrap(), x);
    assert!(space.inclusion(&Vector::zeros(1)).unwrap().is_zero());

    let sp = PNormedSpace::new(3, exp(1.0)).unwrap();
    let zero = TwistedSumSpace::new(HomogeneousMap::zero(sp, sp));
    assert!(zero.quasinorm_modulus_report(500, 0).unwrap().empirical <= 1.0 + 1e-12);
    let lin = TwistedSumSpace::new(HomogeneousMap::scalar_identity(sp, 2.0));
    assert!(lin.quasinorm_modulus_report(500, 0).unwrap().empirical <= 1.0 + 1e-12);
    let ribe32 = TwistedSumSpace::new(HomogeneousMap::<f64>::ribe(32).unwrap());
    assert!(ribe32.quasinorm_modulus_report(2000, 0).unwrap().empirical <= 2.386294361119891);
}

#[test]
fn splitting_values() {
    let sp = PNormedSpace::new(64, exp(1.0)).unwrap();
    let lin = TwistedSumSpace::new(HomogeneousMap::scalar_identity(sp, 0.5));
    assert!(lin.splitting_gap(&[4, 16, 64], 1e-9, 0).unwrap().iter().all(|r| r.dist_lb <= 1e-9));
    let rib = TwistedSumSpace::new(HomogeneousMap::<f64>::ribe(64).unwrap());
    for row in rib.splitting_gap(&[4, 16, 64], 1e-9, 0).unwrap() {
        assert!(row.dist_lb >= 0.5 * (row.n as f64).ln() - 1e-9);
    }
    let kp = TwistedSumSpace::new(
        HomogeneousMap::kalton_peck(64, LipschitzProfile::clamped(2.0).unwrap(), exp(1.0)).unwrap(),
    );
    let rows = kp.splitting_gap(&[2, 4, 64], 1e-9, 0).unwrap();
    assert!(rows[0].dist_lb >= 0.34657359027997264 - 1e-9);
    assert!(rows[1].dist_lb >= 0.6931471805599453 - 1e-9);
    assert!(rows[2].dist_lb >= 1.0 - 1e-9);
}

#[test]
fn family_values() {
    let fam = ribe_family::<f64>(vec![7, 50]).unwrap();
    let f = fam.build(50).unwrap();
    assert!(close(f.apply(&Vector::ones(50))[0], 50.0, 1e-12));
    assert_eq!(f.apply(&Vector::basis(50, 9))[0], 0.0);
    assert!(close(fam.build(7).unwrap().q_certified_upper().unwrap(), 0.7124143742160444, 1e-12));

    let fam = kp_index_capped_family::<f64>(vec![3, 20], exp(1.0)).unwrap();
    let g = fam.build(20).unwrap();
    assert!(g.apply(&Vector::basis(20, 4)).is_zero());
    let out = g.apply(&Vector::partial_sum(20, 8));
    assert!((0..8).all(|k| close(out[k], 0.10397207708399179, 1e-12)));
    assert!((8..20).all(|k| out[k] == 0.0));
}

#[test]
fn derivation_values() {
    let one = PExponent::one();
    let n = 64;
    let x = Vector::<f64>::ones(n).scaled(1.0 / n as f64);
    assert!(close(kp_derivation(&x, n, one).unwrap().norm(one), 1.0, 1e-12));
    let half = exp(0.5);
    let xh = Vector::<f64>::ones(n).scaled((n as f64).powi(-2));
    assert!(close(kp_derivation(&xh, n, half).unwrap().norm(half), 2.0, 1e-12));
    assert!(kp_derivation(&Vector::<f64>::basis(n, 5), n, one).unwrap().is_zero());
    assert!(close(idempotent_decay::<f64>(4, 16, one).unwrap(), 0.5, 1e-15));
    assert!(close(idempotent_decay::<f64>(8, 256, exp(2.0)).unwrap(), 0.1875, 1e-15));

    let s2 = Vector::<f64>::partial_sum(n, 2);
    let d = leibniz_defect(DerivationKind::Homogeneous, &s2, &s2, n, one).unwrap();
    assert!(close(d.measured, 0.3333333333333333, 1e-12));
    let y = v(&[0.3, -2.0, 5.0, 0.01]);
    let z = v(&[-1.5, 0.2, 4.0, 7.0]);
    assert!(leibniz_defect(DerivationKind::Variant, &y, &z, 4, one).unwrap().measured <= 1e-12);
    assert_eq!(leibniz_defect(DerivationKind::Homogeneous, &y, &Vector::zeros(4), 4, one).unwrap().measured, 0.0);
}
