//! The `report`, `lemma-w` and `derivation` commands.

use std::f64::consts::LN_2;

use twistlab::asymptotics::{
    accessibility_report, idempotent_decay, kp_family, kp_index_capped_family, kp_unscaled_family, leibniz_defect,
    linear_family, random_dense_pair, ribe_family, truncation_family, DerivationKind, MapFamily,
};
use twistlab::maps::lemma_w_scan;
use twistlab::{HomogeneousMap, LipschitzProfile, Vector};

use crate::config::{ConfigError, RunConfig};
use crate::format::{csv_string, fmt_num};
use crate::Outcome;

fn core_err(e: twistlab::Error) -> ConfigError {
    ConfigError(e.to_string())
}

/// Resolves a family name. `truncation:<base>` truncates `ribe` or `kp`
/// (identity profile) on the largest grid dimension.
pub fn family_by_name(name: &str, cfg: &RunConfig) -> Result<MapFamily<f64>, ConfigError> {
    let p = cfg.exponent()?;
    let grid = cfg.n_grid.clone();
    let fam = match name {
        "ribe" => ribe_family(grid),
        "kp" => kp_family(grid, p),
        "kp-index" => kp_index_capped_family(grid, p),
        "kp-unscaled" => kp_unscaled_family(grid, p),
        "linear" => linear_family(grid, p),
        _ => {
            let Some(base) = name.strip_prefix("truncation:") else {
                return Err(ConfigError(format!(
                    "unknown family '{name}' (expected ribe, kp, kp-index, kp-unscaled, linear, truncation:<ribe|kp>)"
                )));
            };
            let big = *grid.last().expect("validated grid");
            let phi = match base {
                "ribe" => HomogeneousMap::ribe(big),
                "kp" => HomogeneousMap::kalton_peck(big, LipschitzProfile::identity(), p),
                _ => return Err(ConfigError(format!("unknown truncation base '{base}' (expected ribe or kp)"))),
            }
            .map_err(core_err)?;
            truncation_family(&phi, grid, cfg.budget, cfg.seed)
        }
    };
    fam.map_err(core_err)
}

pub fn report(cfg: &RunConfig, family: &str) -> Result<Outcome, ConfigError> {
    let fam = family_by_name(family, cfg)?;
    let rep = accessibility_report(&fam, cfg.budget, cfg.seed).map_err(core_err)?;
    let class = rep.classification.as_str();
    let rows: Vec<Vec<String>> = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt_num(r.norm_est),
                fmt_num(r.q_sampled_lb),
                r.q_certified_ub.map(fmt_num).unwrap_or_default(),
                fmt_num(r.dist_lb),
                class.to_string(),
                r.notes(),
                rep.seed.to_string(),
            ]
        })
        .collect();
    let csv = csv_string(&["n", "norm_est", "q_lb", "q_ub", "dist_lb", "classification", "notes", "seed"], &rows);
    Ok(Outcome {
        csv: Some(csv),
        summary: vec![format!("family={} classification={class} seed={}", rep.label, rep.seed)],
        passed: true,
    })
}

pub fn lemma_w(cfg: &RunConfig, step: f64, range: f64) -> Result<Outcome, ConfigError> {
    let scan = lemma_w_scan(-range, range, step).map_err(core_err)?;
    let rows: Vec<Vec<String>> =
        scan.rows.iter().map(|r| vec![fmt_num(r.s), fmt_num(r.t), fmt_num(r.max_ratio)]).collect();
    let csv = csv_string(&["s", "t", "max_ratio"], &rows);
    let tol_close = cfg.tolerances.get("lemma_w");
    let tol_sound = cfg.tolerances.get("lemma_w_sound");
    let close = (scan.max - LN_2).abs() <= tol_close;
    let sound = scan.max <= LN_2 + tol_sound;
    Ok(Outcome {
        csv: Some(csv),
        summary: vec![format!(
            "max={} argmax=({},{}) log2={} |max-log2|<={}:{} max<=log2+{}:{} seed={}",
            fmt_num(scan.max),
            fmt_num(scan.argmax.0),
            fmt_num(scan.argmax.1),
            fmt_num(LN_2),
            fmt_num(tol_close),
            verdict(close),
            fmt_num(tol_sound),
            verdict(sound),
            cfg.seed
        )],
        passed: close && sound,
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Per-`n` Leibniz statistics. The defect columns use `x = y = s_2`; the
/// variant column is the largest defect over `budget` random pairs, which
/// also feed the measured-vs-closed-form agreement in the summary.
pub fn derivation(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let p = cfg.exponent()?;
    if let Some(n) = cfg.n_grid.iter().find(|&&n| n < 2) {
        return Err(ConfigError(format!("derivation needs n >= 2, got {n}")));
    }
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut passed = true;
    let (tol_rel, tol_var, tol_idem) =
        (cfg.tolerances.get("leibniz"), cfg.tolerances.get("leibniz_variant"), cfg.tolerances.get("idempotent"));
    for &n in &cfg.n_grid {
        let s2 = Vector::partial_sum(n, 2);
        let d = leibniz_defect(DerivationKind::Homogeneous, &s2, &s2, n, p).map_err(core_err)?;
        let mut worst_rel: f64 = 0.0;
        let mut variant: f64 = 0.0;
        for i in 0..cfg.budget as u64 {
            let (x, y) = random_dense_pair::<f64>(n, cfg.seed, i);
            let h = leibniz_defect(DerivationKind::Homogeneous, &x, &y, n, p).map_err(core_err)?;
            let c = h.closed_form.expect("homogeneous kind has a closed form");
            let rel = if c == 0.0 { h.measured } else { (h.measured - c).abs() / c };
            worst_rel = worst_rel.max(rel);
            let v = leibniz_defect(DerivationKind::Variant, &x, &y, n, p).map_err(core_err)?;
            variant = variant.max(v.measured);
        }
        let m = n.min(4);
        let decay = idempotent_decay(m, n, p).map_err(core_err)?;
        let expected = (m as f64).ln() / (p.value() * (n as f64).ln());
        let ok = worst_rel <= tol_rel && variant <= tol_var && (decay - expected).abs() <= tol_idem;
        passed &= ok;
        summary.push(format!(
            "n={n} max_rel_disagreement={} variant_max={} idempotent_m={m} expected_decay={} {}",
            fmt_num(worst_rel),
            fmt_num(variant),
            fmt_num(expected),
            verdict(ok)
        ));
        rows.push(vec![
            n.to_string(),
            fmt_num(d.measured),
            fmt_num(d.closed_form.unwrap_or(f64::NAN)),
            fmt_num(variant),
            fmt_num(decay),
        ]);
    }
    summary.push(format!("pairs={} p={} seed={}", cfg.budget, fmt_num(p.value()), cfg.seed));
    let csv = csv_string(&["n", "defect_measured", "defect_closed_form", "variant_defect", "idempotent_decay"], &rows);
    Ok(Outcome { csv: Some(csv), summary, passed })
}
