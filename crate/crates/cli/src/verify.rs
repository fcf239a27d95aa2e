//! The `verify` command: every library invariant as a named pass/fail check.

use std::f64::consts::LN_2;

use twistlab::asymptotics::{
    accessibility_report, derivation_gap, idempotent_decay, kp_family, kp_unscaled_family, leibniz_defect,
    linear_family, random_dense_pair, ribe_family, truncation_family, truncation_norm, Classification, DerivationKind,
};
use twistlab::distance::{basis_sum_certificate, dist_lb_symmetric, symmetrize_linear, SymmetricOptions};
use twistlab::estimation::{estimate_q, k0_from_bounds, random_pair};
use twistlab::group::{group_average, SignedPermutation};
use twistlab::maps::{kalton_peck_nonhom, lemma_w_scan, ribe, ribe_direct};
use twistlab::sampling::{derive_seed, gaussian, stream, Purpose, UnitSphereSampler};
use twistlab::spaces::{aoki_rolewicz_exponent, hom_map_norm_estimate};
use twistlab::twisted::TwistedSumSpace;
use twistlab::{HomogeneousMap, LipschitzProfile, Matrix, PExponent, PNormedSpace, Vector};

use crate::config::{ConfigError, RunConfig};
use crate::format::fmt_num;
use crate::Outcome;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

struct Suite<'a> {
    cfg: &'a RunConfig,
    checks: Vec<Check>,
}

type Checked = Result<(bool, String), twistlab::Error>;

impl Suite<'_> {
    fn tol(&self, key: &str) -> f64 {
        self.cfg.tolerances.get(key)
    }

    fn run(&mut self, module: &'static str, name: &'static str, body: impl FnOnce(&Self) -> Checked) {
        let (passed, detail) = match body(self) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        self.checks.push(Check { module, name, passed, detail });
    }
}

fn exp(p: f64) -> PExponent<f64> {
    PExponent::new(p).expect("valid built-in exponent")
}

fn rng_vector(n: usize, seed: u64, purpose: Purpose, i: u64) -> Vector<f64> {
    let mut rng = stream(seed, purpose, i);
    Vector::from_fn(n, |_| gaussian::<f64, _>(&mut rng))
}

pub fn run_checks(cfg: &RunConfig) -> Vec<Check> {
    let mut s = Suite { cfg, checks: Vec::new() };
    let seed = cfg.seed;
    let budget = cfg.budget;

    s.run("spaces", "p-triangle", |s| {
        let tol = s.tol("triangle");
        let mut worst: f64 = 0.0;
        for p in [0.25f64, 0.5, 1.0, 2.0] {
            let q = p.min(1.0);
            for i in 0..budget as u64 {
                let (x, y) = random_pair::<f64>(8, seed, i);
                let lhs = (&x + &y).norm(exp(p)).powf(q);
                let rhs = x.norm(exp(p)).powf(q) + y.norm(exp(p)).powf(q);
                worst = worst.max(lhs / rhs - 1.0);
            }
        }
        Ok((worst <= tol, format!("max excess {}", fmt_num(worst))))
    });

    s.run("spaces", "homogeneity", |s| {
        let tol = s.tol("homogeneity");
        let mut worst: f64 = 0.0;
        for i in 0..budget as u64 {
            let x = rng_vector(6, seed, Purpose::Verify, i);
            let lambda = -3.7 + (i % 11) as f64;
            for p in [0.5, 1.0, 2.0] {
                let lhs = x.scaled(lambda).norm(exp(p));
                let rhs = lambda.abs() * x.norm(exp(p));
                worst = worst.max((lhs - rhs).abs() / rhs.max(f64::MIN_POSITIVE));
            }
        }
        Ok((worst <= tol, format!("max relative error {}", fmt_num(worst))))
    });

    s.run("spaces", "aoki-rolewicz", |_| {
        let a: f64 = aoki_rolewicz_exponent(2f64.sqrt())?.value();
        let b: f64 = aoki_rolewicz_exponent(2.0)?.value();
        let c = aoki_rolewicz_exponent(1.0)?.value();
        let ok = (a - 2.0 / 3.0).abs() < 1e-12 && (b - 0.5).abs() < 1e-12 && c == 1.0;
        Ok((ok, format!("p(sqrt2)={} p(2)={} p(1)={}", fmt_num(a), fmt_num(b), fmt_num(c))))
    });

    s.run("maps", "lemma-w", |s| {
        let scan = lemma_w_scan(-2.0, 2.0, 0.01)?;
        let ok = scan.max <= LN_2 + s.tol("lemma_w_sound") && (scan.max - LN_2).abs() <= s.tol("lemma_w");
        Ok((ok, format!("grid max {} at ({}, {})", fmt_num(scan.max), fmt_num(scan.argmax.0), fmt_num(scan.argmax.1))))
    });

    s.run("maps", "ribe-identity", |s| {
        let tol = s.tol("ribe_identity");
        let mut worst: f64 = 0.0;
        for i in 0..budget as u64 {
            let x = rng_vector(12, seed, Purpose::Verify, i);
            if let Some(direct) = ribe_direct(&x) {
                let scale = x.norm(PExponent::one()) * (1.0 + x.norm(PExponent::one()).ln().abs());
                worst = worst.max((ribe(&x) - direct).abs() / scale);
            }
        }
        Ok((worst <= tol, format!("max scaled difference {}", fmt_num(worst))))
    });

    s.run("maps", "kp-commutes", |s| {
        let tol = s.tol("commutation");
        let n = 10;
        let f = HomogeneousMap::kalton_peck(n, LipschitzProfile::clamped(2.0)?, exp(1.5))?;
        let mut worst: f64 = 0.0;
        for i in 0..budget.min(500) as u64 {
            let mut rng = stream(seed, Purpose::Group, i);
            let u = SignedPermutation::random(n, &mut rng);
            let x = rng_vector(n, seed, Purpose::Verify, i);
            let diff = f.apply(&u.apply(&x)).max_abs_diff(&u.apply(&f.apply(&x)));
            worst = worst.max(diff / (1.0 + x.max_abs()));
        }
        Ok((worst <= tol, format!("max |f(ux) - u f(x)| {}", fmt_num(worst))))
    });

    s.run("maps", "kp-vs-phi0", |s| {
        let tol = s.tol("phi0");
        let theta = LipschitzProfile::clamped(3.0)?;
        let mut worst: f64 = f64::NEG_INFINITY;
        for p in [0.5, 1.0, 2.0] {
            for i in 0..budget as u64 {
                let (x, _) = random_pair::<f64>(8, seed, i);
                let nx = x.norm(exp(p));
                let phi = twistlab::maps::kalton_peck(&x, &theta, exp(p));
                let gap = (&phi - &kalton_peck_nonhom(&x, &theta)).norm(exp(p));
                let bound = theta.lip_const() * nx * nx.ln().abs();
                worst = worst.max(gap - bound * (1.0 + tol) - tol * nx);
            }
        }
        Ok((worst <= 0.0, format!("max excess over L|x||log|x|| {}", fmt_num(worst.max(0.0)))))
    });

    s.run("estimation", "ribe-q-range", |s| {
        let tol = s.tol("q_range");
        let est = estimate_q(&HomogeneousMap::<f64>::ribe(64)?, budget, seed)?;
        let q = est.sampled_lower;
        let ok = q >= LN_2 - tol && q <= 2.0 * LN_2 + tol;
        Ok((ok, format!("sampled Q {} in [log2, 2log2]", fmt_num(q))))
    });

    s.run("estimation", "kp-certificate-consistent", |_| {
        let mut detail = Vec::new();
        let mut ok = true;
        for p in [1.0, 2.0] {
            let f = HomogeneousMap::kalton_peck(32, LipschitzProfile::identity(), exp(p))?;
            let est = estimate_q(&f, budget, seed)?;
            ok &= est.is_consistent();
            detail.push(format!(
                "p={} lb={} ub={}",
                p,
                fmt_num(est.sampled_lower),
                fmt_num(est.certified_upper.unwrap_or(f64::NAN))
            ));
        }
        Ok((ok, detail.join(" ")))
    });

    s.run("estimation", "k0-growth", |_| {
        let k0 = |n: usize| k0_from_bounds(0.5 * (n as f64).ln(), 2.0 * LN_2);
        let vals: Vec<f64> = [10usize, 100, 1000, 10_000].iter().map(|&n| k0(n)).collect::<Result<_, _>>()?;
        let big = k0(1_000_000)?;
        let ok = vals.windows(2).all(|w| w[1] > w[0]) && big > 4.9;
        Ok((ok, format!("K0(10^6) >= {}", fmt_num(big))))
    });

    s.run("distance", "ribe-certificate", |s| {
        let tol = s.tol("ribe_certificate");
        let mut ok = true;
        let mut vals = Vec::new();
        for n in [10usize, 100, 1000] {
            let v = basis_sum_certificate(&HomogeneousMap::<f64>::ribe(n)?)?.value;
            ok &= (v - 0.5 * (n as f64).ln()).abs() <= tol;
            vals.push(fmt_num(v));
        }
        Ok((ok, format!("values {}", vals.join(" "))))
    });

    s.run("distance", "symmetric-bound", |s| {
        let tol = s.tol("symmetric");
        let n = 256;
        let mut worst = f64::INFINITY;
        for m in [1.0, 2.0, 4.0] {
            for p in [1.0, 2.0] {
                let theta = LipschitzProfile::clamped(m)?;
                let f = HomogeneousMap::kalton_peck(n, theta.clone(), exp(p))?;
                let opts = SymmetricOptions { seed, ..SymmetricOptions::default() };
                let b = dist_lb_symmetric(&f, &[Vector::basis(n, 0), Vector::ones(n)], &opts)?;
                let target = 0.5 * theta.eval((n as f64).ln() / p);
                worst = worst.min(b.value - target);
            }
        }
        Ok((worst >= -tol, format!("min(bound - theta/2) {}", fmt_num(worst))))
    });

    s.run("distance", "group-average", |s| {
        let tol = s.tol("group_average");
        let mut worst: f64 = 0.0;
        for n in 2..=4 {
            for i in 0..5u64 {
                let mut rng = stream(seed, Purpose::Verify, (n as u64) << 32 | i);
                let l = Matrix::from_fn(n, n, |_, _| gaussian::<f64, _>(&mut rng));
                let alpha = symmetrize_linear(&l)?;
                worst = worst.max(group_average(&l).max_abs_diff(&Matrix::identity(n).scaled(alpha)));
            }
        }
        Ok((worst <= tol, format!("max entry error {}", fmt_num(worst))))
    });

    s.run("twisted", "isometries", |s| {
        let tol = s.tol("twisted_isometry");
        let space = TwistedSumSpace::new(HomogeneousMap::<f64>::ribe(32)?);
        let mut worst: f64 = 0.0;
        let mut exact = true;
        for i in 0..budget.min(1000) as u64 {
            let (x, y) = random_pair::<f64>(32, seed, i);
            let yv = Vector::new(vec![y.sum()])?;
            worst = worst.max((space.twisted_norm(&space.inclusion(&yv)?)? - yv.norm(PExponent::one())).abs());
            let b = space.section(&x)?;
            worst = worst.max((space.twisted_norm(&b)? - x.norm(PExponent::one())).abs());
            exact &= space.quotient(&b)? == x && space.quotient(&space.inclusion(&yv)?)?.is_zero();
        }
        Ok((worst <= tol && exact, format!("max isometry error {}, exactness {}", fmt_num(worst), exact)))
    });

    s.run("twisted", "modulus-ceiling", |s| {
        let tol = s.tol("twisted_modulus");
        let space = TwistedSumSpace::new(HomogeneousMap::<f64>::ribe(32)?);
        let r = space.quasinorm_modulus_report(budget, seed)?;
        let ceiling = r.ceiling.unwrap_or(f64::NAN);
        Ok((r.empirical <= ceiling + tol, format!("empirical {} ceiling {}", fmt_num(r.empirical), fmt_num(ceiling))))
    });

    s.run("asymptotics", "classification", |_| {
        let grid = vec![16, 64, 256];
        let one = PExponent::<f64>::one();
        let cases = [
            (ribe_family(grid.clone())?, Classification::AccessibleNonUltraproductCandidate),
            (kp_family(grid.clone(), one)?, Classification::AccessibleNonUltraproductCandidate),
            (linear_family(grid.clone(), one)?, Classification::UltraproductOfOperators),
            (kp_unscaled_family(grid.clone(), one)?, Classification::NotAccessible),
        ];
        let mut ok = true;
        let mut detail = Vec::new();
        for (fam, expected) in cases {
            let got = accessibility_report(&fam, budget.min(1000), seed)?.classification;
            ok &= got == expected;
            detail.push(format!("{}={}", fam.label(), got));
        }
        Ok((ok, detail.join(" ")))
    });

    s.run("asymptotics", "kp-norm", |s| {
        let tol = s.tol("kp_norm");
        let n = 64;
        let mut ok = true;
        let mut detail = Vec::new();
        for p in [0.5, 1.0, 2.0] {
            let f = HomogeneousMap::kalton_peck(n, LipschitzProfile::identity(), exp(p))?;
            let target = (n as f64).ln() / p;
            let space = PNormedSpace::new(n, exp(p))?;
            let at_uniform = space.norm(&f.apply(&space.uniform_unit()));
            let sampler = UnitSphereSampler::new(derive_seed(seed, Purpose::UnitSphere, 1));
            let sampled = hom_map_norm_estimate(&f, &sampler, budget, &[]);
            ok &= (at_uniform - target).abs() <= tol && sampled <= target * (1.0 + tol);
            detail.push(format!("p={p}: {} sampled {}", fmt_num(at_uniform), fmt_num(sampled)));
        }
        Ok((ok, detail.join("; ")))
    });

    s.run("asymptotics", "leibniz", |s| {
        let (tol, tol_var) = (s.tol("leibniz"), s.tol("leibniz_variant"));
        let mut worst_rel: f64 = 0.0;
        let mut worst_var: f64 = 0.0;
        for n in [16usize, 256] {
            for i in 0..budget as u64 {
                let (x, y) = random_dense_pair::<f64>(n, seed, i);
                let h = leibniz_defect(DerivationKind::Homogeneous, &x, &y, n, PExponent::one())?;
                let c = h.closed_form.unwrap_or(f64::NAN);
                worst_rel = worst_rel.max(if c == 0.0 { h.measured } else { (h.measured - c).abs() / c });
                let v = leibniz_defect(DerivationKind::Variant, &x, &y, n, PExponent::one())?;
                worst_var = worst_var.max(v.measured);
            }
        }
        Ok((
            worst_rel <= tol && worst_var <= tol_var,
            format!("max relative disagreement {}, variant max {}", fmt_num(worst_rel), fmt_num(worst_var)),
        ))
    });

    s.run("asymptotics", "derivation-gap", |_| {
        let mut worst: f64 = f64::NEG_INFINITY;
        for n in [16usize, 256] {
            for i in 0..budget.min(1000) as u64 {
                let (x, _) = random_dense_pair::<f64>(n, seed, i);
                let nx = x.norm(PExponent::one());
                let bound = nx * nx.ln().abs() / (n as f64).ln();
                worst = worst.max(derivation_gap(&x, n, PExponent::one())? - bound * (1.0 + 1e-12) - 1e-12 * nx);
            }
        }
        Ok((worst <= 0.0, format!("max excess {}", fmt_num(worst.max(0.0)))))
    });

    s.run("asymptotics", "idempotent-decay", |s| {
        let tol = s.tol("idempotent");
        let mut worst: f64 = 0.0;
        for p in [1.0, 2.0] {
            for n in [16usize, 256] {
                for m in [1usize, 2, 4, 16] {
                    let d = idempotent_decay(m, n, exp(p))?;
                    worst = worst.max((d - (m as f64).ln() / (p * (n as f64).ln())).abs());
                }
            }
        }
        Ok((worst <= tol, format!("max error {}", fmt_num(worst))))
    });

    s.run("asymptotics", "truncation-norm", |s| {
        let tol = s.tol("truncation_norm");
        let fam = truncation_family(&HomogeneousMap::<f64>::ribe(64)?, vec![8, 32, 64], budget.min(1000), seed)?;
        let mut worst: f64 = 0.0;
        for &n in fam.grid() {
            let f = fam.build(n)?;
            let norm = truncation_norm(&f, budget.min(1000), derive_seed(seed, Purpose::Row, n as u64));
            worst = worst.max((norm - 1.0).abs());
        }
        Ok((worst <= tol, format!("max |norm - 1| {}", fmt_num(worst))))
    });

    s.checks
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    cfg.exponent()?;
    let checks = run_checks(cfg);
    let failed = checks.iter().filter(|c| !c.passed).count();
    let mut summary: Vec<String> = checks
        .iter()
        .map(|c| format!("{} {}/{}: {}", if c.passed { "PASS" } else { "FAIL" }, c.module, c.name, c.detail))
        .collect();
    summary.push(format!(
        "verify: {}/{} passed, {failed} failed (seed={}, budget={})",
        checks.len() - failed,
        checks.len(),
        cfg.seed,
        cfg.budget
    ));
    Ok(Outcome { csv: None, summary, passed: failed == 0 })
}
