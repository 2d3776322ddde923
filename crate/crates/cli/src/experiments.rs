//! The named experiments and the certificate envelope around them.

use std::path::Path;
use std::time::Instant;

use hypstruct::actions::{
    self, bs_conjugate_family, bs_power_family, coarsely_isospectral, coset_ball, dominates, phi_xi_incomparability,
    translation_number, zwreath_embedding_check, ActionModel, GroupElement, NamedSequence, TranslationReport,
};
use hypstruct::groups::{random_bs, random_wreath, BsElement, GroupOps};
use hypstruct::hypmetric::{four_point_delta_with, PointCloud};
use hypstruct::kapovich::{separation_certificate_with, SeedSet};
use hypstruct::pseudochar::antichain_certificate;
use hypstruct::real::{json_real, ser_f64};
use hypstruct::smallcancel::{f_table, find_k0, verify_cstar, AperiodicFamily};
use hypstruct::words::Alphabet;
use hypstruct::Exec;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::models::parse_model;
use crate::plot::{emit_plot, PlotKind, PlotSpec, Table};

/// Description of the random source, recorded in every envelope.
pub const RNG_DESCRIPTION: &str = "ChaCha8Rng::seed_from_u64(seed); cell i uses stream i";

#[derive(Clone, Debug, Serialize)]
pub struct CertificateEnvelope {
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub result: Value,
    #[serde(serialize_with = "ser_f64")]
    pub wall_time_s: f64,
    pub version: &'static str,
    pub rng: &'static str,
}

pub struct Outcome {
    pub result: Value,
    pub plot: Option<(Table, PlotSpec)>,
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<(CertificateEnvelope, Option<String>)> {
    let start = Instant::now();
    let outcome = match cfg.experiment {
        Experiment::FamilyVerify => family_verify(cfg),
        Experiment::KapovichSeparate => kapovich_separate(cfg),
        Experiment::BsCompare => bs_compare(cfg),
        Experiment::WreathEmbed => wreath_embed(cfg),
        Experiment::PhiXi => phi_xi(cfg),
        Experiment::LinealAntichain => lineal_antichain(cfg),
        Experiment::DeltaScan => delta_scan(cfg),
        Experiment::IsospecBs => isospec_bs(cfg),
    }?;
    let plot = match (&cfg.plot, &outcome.plot) {
        (Some(_), Some((table, spec))) => Some(emit_plot(table, spec)?),
        (Some(_), None) => return Err(CliError::validation(format!("{} has no plot", cfg.experiment))),
        _ => None,
    };
    let envelope = CertificateEnvelope {
        experiment: cfg.experiment,
        config: cfg.clone(),
        result: outcome.result,
        wall_time_s: start.elapsed().as_secs_f64(),
        version: hypstruct::VERSION,
        rng: RNG_DESCRIPTION,
    };
    Ok((envelope, plot))
}

/// Runs the experiment and writes the envelope and plot to the configured
/// paths (stdout when `out` is absent).
pub fn run_and_write(cfg: &ExperimentConfig) -> CliResult<()> {
    let (envelope, plot) = run(cfg)?;
    crate::write_json(&envelope, cfg.out.as_deref())?;
    if let (Some(path), Some(svg)) = (&cfg.plot, plot) {
        write_file(path, &svg)?;
    }
    Ok(())
}

pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))
}

fn to_value<T: Serialize>(x: &T) -> CliResult<Value> {
    Ok(serde_json::to_value(x)?)
}

fn family_verify(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let p = &cfg.params;
    let (k_min, k_max, lambda, f_max) = (p.usize("k_min")?, p.usize("k_max")?, p.rational("lambda")?, p.usize("f_max")?);
    if f_max == 0 || f_max > 24 {
        return Err(CliError::validation("f_max must lie in 1..=24"));
    }
    let family = AperiodicFamily::build(k_min, k_max)?;
    let words: Vec<_> = family.members.values().cloned().collect();
    let cstar = verify_cstar(&words, lambda)?;
    let table = f_table(f_max)?;
    let k0 = find_k0(k_max.max(12))?;
    let ab = Alphabet::ab();
    let members: Vec<Value> = family
        .members
        .iter()
        .map(|(k, v)| json!({ "k": k, "length": v.len(), "word": ab.format(v) }))
        .collect();
    let mut plot = Table::new(&["k", "f"]);
    for &(k, f) in &table {
        plot.push(vec![k as f64, f as f64]);
    }
    Ok(Outcome {
        result: json!({
            "f_table": table,
            "k0": to_value(&k0)?,
            "family": members,
            "checks": to_value(&family.checks)?,
            "all_checks_pass": family.all_checks_pass(),
            "cstar": to_value(&cstar)?,
            "cstar_holds": cstar.holds(),
        }),
        plot: Some((plot, PlotSpec::new("f(k) = |X(k)|", "k", &["f"], PlotKind::Line))),
    })
}

fn kapovich_separate(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let p = &cfg.params;
    let s = SeedSet::build(p.usize_list("s")?)?;
    let t = SeedSet::build(p.usize_list("t")?)?;
    let cert = separation_certificate_with(&s, &t, p.usize("probes")?, p.real("ratio")?, Exec::default())?;
    let mut plot = Table::new(&["seed", "length_in_s", "length_in_t"]);
    for probe in cert.s_minus_t.iter().chain(&cert.t_minus_s) {
        plot.push(vec![probe.seed as f64, probe.length_in_s as f64, probe.length_in_t as f64]);
    }
    Ok(Outcome {
        result: to_value(&cert)?,
        plot: Some((plot, PlotSpec::new("Z-lengths of probe words", "seed", &["length_in_s", "length_in_t"], PlotKind::Scatter))),
    })
}

#[derive(Serialize)]
struct BsRow {
    element: GroupElement,
    epsilon: i64,
    tree: TranslationReport,
    half_plane: TranslationReport,
    tree_exact_law: bool,
    #[serde(serialize_with = "ser_f64")]
    half_plane_error: f64,
}

fn bs_compare(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let p = &cfg.params;
    let (samples, max_len, witnesses) = (p.usize("samples")?, p.usize("max_len")?, p.usize("witnesses")?);
    let n_max = u32::try_from(p.u64("n_max")?).map_err(|_| CliError::validation("n_max too large"))?;
    let mut rng = hypstruct::rng::seeded(cfg.seed);
    let elements: Vec<BsElement> = (0..samples).map(|_| random_bs(&mut rng, max_len)).collect();
    let (tree, h2) = (ActionModel::BsTree, ActionModel::BsHalfPlane);
    let rows: Vec<BsRow> = Exec::default()
        .map(&elements, |g| -> CliResult<BsRow> {
            let e = GroupElement::Bs(g.clone());
            let rt = translation_number(&tree, &e, n_max)?;
            let rh = translation_number(&h2, &e, n_max)?;
            let eps = g.epsilon();
            Ok(BsRow {
                tree_exact_law: rt.exact() == Some(eps.unsigned_abs() as f64),
                half_plane_error: (rh.lower - std::f64::consts::LN_2 * eps.unsigned_abs() as f64).abs(),
                element: e,
                epsilon: eps,
                tree: rt,
                half_plane: rh,
            })
        })
        .into_iter()
        .collect::<CliResult<_>>()?;
    let brackets_contain = rows.iter().all(|r| {
        r.tree.fekete.lower - actions::TAU_TOLERANCE <= r.tree.lower
            && r.tree.lower <= r.tree.fekete.upper + actions::TAU_TOLERANCE
            && r.half_plane.fekete.lower - actions::TAU_TOLERANCE <= r.half_plane.lower
            && r.half_plane.lower <= r.half_plane.fekete.upper + actions::TAU_TOLERANCE
    });
    let max_h2_error = rows.iter().map(|r| r.half_plane_error).fold(0.0, f64::max);
    let count = i64::try_from(witnesses).map_err(|_| CliError::validation("witnesses too large"))?;
    let conj = bs_conjugate_family(count);
    let pows = bs_power_family(witnesses as u32);
    let probes: Vec<GroupElement> = conj.iter().chain(&pows).cloned().collect();
    let tree_over_h2 = dominates(&h2, &tree, &probes)?;
    let h2_over_tree = dominates(&tree, &h2, &probes)?;
    let iso = coarsely_isospectral(&h2, &tree, &bs_sequences(witnesses))?;
    let mut plot = Table::new(&["tau_tree", "tau_half_plane"]);
    for r in &rows {
        plot.push(vec![r.tree.lower, r.half_plane.lower]);
    }
    Ok(Outcome {
        result: json!({
            "samples": samples,
            "max_len": max_len,
            "n_max": n_max,
            "tree_law_holds": rows.iter().all(|r| r.tree_exact_law),
            "max_half_plane_error": json_real(max_h2_error),
            "half_plane_law_holds": max_h2_error <= actions::TAU_TOLERANCE,
            "fekete_brackets_contain": brackets_contain,
            "isospectral": to_value(&iso)?,
            "domination": {
                "tree_dominated_by_half_plane": to_value(&tree_over_h2)?,
                "half_plane_dominated_by_tree": to_value(&h2_over_tree)?,
                "refuted_both_ways": tree_over_h2.refuted() && h2_over_tree.refuted(),
            },
            "rows": to_value(&rows)?,
        }),
        plot: Some((plot, PlotSpec::new("translation numbers in BS(1,2)", "tau_tree", &["tau_half_plane"], PlotKind::Scatter))),
    })
}

/// Sequences read by the isospectrality test: `bⁿ`, `(ab)ⁿ`, `b⁻ⁿabⁿ`, `a^{2ⁿ}`.
pub fn bs_sequences(length: usize) -> Vec<NamedSequence> {
    let n = length as i64;
    let ab = BsElement::a().op(&BsElement::b()).expect("small");
    vec![
        NamedSequence {
            name: "b^n".into(),
            elements: (1..=n).map(|k| GroupElement::Bs(BsElement::b_pow(k))).collect(),
        },
        NamedSequence {
            name: "(a b)^n".into(),
            elements: (1..=n).map(|k| GroupElement::Bs(ab.pow(k).expect("small"))).collect(),
        },
        NamedSequence {
            name: "b^-n a b^n".into(),
            elements: bs_conjugate_family(n),
        },
        NamedSequence {
            name: "a^(2^n)".into(),
            elements: bs_power_family(length as u32),
        },
    ]
}

fn wreath_embed(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let p = &cfg.params;
    let (m, n, radius) = (p.u64("m")?, p.u64("n")?, p.usize("radius")?);
    let report = zwreath_embedding_check(m, n, p.usize("samples")?, cfg.seed, p.i64("witnesses")?)?;
    let models = [ActionModel::BsTree, ActionModel::wreath_tree(n)?, ActionModel::wreath_tree(m)?];
    let mut validation = Vec::new();
    for model in &models {
        let ball = coset_ball(model, radius)?;
        let mut mismatches = Vec::new();
        for (g, d) in &ball {
            let britton = model.displacement(g)?;
            if britton != *d as f64 {
                mismatches.push(json!({ "element": g, "bfs": d, "normal_form": json_real(britton) }));
            }
        }
        validation.push(json!({
            "model": model.name(),
            "radius": radius,
            "vertices": ball.len(),
            "mismatches": mismatches,
            "agree": mismatches.is_empty(),
        }));
    }
    let mut plot = Table::new(&["j", "distance"]);
    for w in &report.witnesses {
        plot.push(vec![w.j as f64, w.distance_in_source as f64]);
    }
    Ok(Outcome {
        result: json!({ "embedding": to_value(&report)?, "tree_validation": validation }),
        plot: Some((plot, PlotSpec::new("separation witnesses", "j", &["distance"], PlotKind::Line))),
    })
}

fn phi_xi(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let p = &cfg.params;
    let (xi, eta, n_max) = (p.real("xi")?, p.real("eta")?, p.i64("n_max")?);
    let probe_n = p.i64("probe_n")?;
    let cert = phi_xi_incomparability(xi, eta, n_max)?;
    let summary = |d: &actions::PhiDirection| {
        json!({
            "max_bounded": json_real(d.max_bounded),
            "bound": json_real(d.bound),
            "within_bound": d.max_bounded <= d.bound + actions::TAU_TOLERANCE,
            "probe_n": probe_n,
            "diverging_at_probe": d.row(probe_n).map(|r| json_real(r.diverging)),
        })
    };
    let stride = (n_max as usize).div_ceil(1000).max(1);
    let mut plot = Table::new(&["n", "bounded", "diverging"]);
    for r in cert.forward.rows.iter().step_by(stride) {
        plot.push(vec![r.n as f64, r.bounded, r.diverging]);
    }
    Ok(Outcome {
        result: json!({
            "forward": summary(&cert.forward),
            "backward": summary(&cert.backward),
            "certificate": to_value(&cert)?,
        }),
        plot: Some((plot, PlotSpec::new("displacement of g_n at i", "n", &["bounded", "diverging"], PlotKind::Line))),
    })
}

fn lineal_antichain(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let p = &cfg.params;
    let cert = antichain_certificate(p.rational("lambda")?, p.rational("mu")?, p.rational("c")?, p.i64("i_max")?)?;
    let all_one = |d: &hypstruct::pseudochar::AntichainDirection| d.rows.iter().all(|r| r.null_length.exact == Some(1));
    let last_lower = |d: &hypstruct::pseudochar::AntichainDirection| d.rows.last().map(|r| r.other_length.lower);
    let mut plot = Table::new(&["i", "mu_lower", "lambda_lower"]);
    for (a, b) in cert.lambda_null.rows.iter().zip(&cert.mu_null.rows) {
        plot.push(vec![a.i as f64, a.other_length.lower as f64, b.other_length.lower as f64]);
    }
    Ok(Outcome {
        result: json!({
            "lambda_null_lengths_one": all_one(&cert.lambda_null),
            "mu_null_lengths_one": all_one(&cert.mu_null),
            "mu_lower_bound_at_i_max": last_lower(&cert.lambda_null),
            "lambda_lower_bound_at_i_max": last_lower(&cert.mu_null),
            "certificate": to_value(&cert)?,
        }),
        plot: Some((plot, PlotSpec::new("length lower bounds of null witnesses", "i", &["mu_lower", "lambda_lower"], PlotKind::Line))),
    })
}

fn random_cloud(source: &str, seed: u64, cell: usize, points: usize) -> CliResult<PointCloud> {
    let mut rng = hypstruct::rng::substream(seed, cell as u64);
    match source {
        "random-trees" => {
            let n = rng.gen_range(2..=points.max(2));
            let parents: Vec<usize> = (0..n).map(|v| if v == 0 { 0 } else { rng.gen_range(0..v) }).collect();
            Ok(PointCloud::tree_metric(&parents)?)
        }
        "half-plane" => {
            let pts: Vec<(f64, f64)> = (0..points)
                .map(|_| (rng.gen_range(-4.0..4.0), rng.gen_range(-3.0f64..3.0).exp()))
                .collect();
            Ok(PointCloud::from_half_plane(&pts)?)
        }
        other => {
            let name = other
                .strip_prefix("orbit:")
                .ok_or_else(|| CliError::validation(format!("unknown delta source {other:?}")))?;
            let model = parse_model(name, None, None)?;
            let elements: Vec<GroupElement> = (0..points)
                .map(|_| match &model {
                    ActionModel::BsHalfPlane | ActionModel::BsTree => GroupElement::Bs(random_bs(&mut rng, 12)),
                    ActionModel::WreathTree { n } => GroupElement::Wreath(random_wreath(&mut rng, Some(*n), 12)),
                    _ => GroupElement::Wreath(random_wreath(&mut rng, None, 12)),
                })
                .collect();
            Ok(PointCloud::from_orbit(&model, &elements, Exec::Sequential)?)
        }
    }
}

fn delta_scan(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let p = &cfg.params;
    let (source, cells, points) = (p.string("source"), p.usize("cells")?, p.usize("points")?);
    if points < 1 || cells < 1 {
        return Err(CliError::validation("cells and points must be positive"));
    }
    let rows: Vec<Value> = Exec::default()
        .map_range(cells, |cell| -> CliResult<Value> {
            let cloud = random_cloud(&source, cfg.seed, cell, points)?;
            let est = four_point_delta_with(&cloud, cfg.seed.wrapping_add(cell as u64), Exec::Sequential);
            Ok(json!({ "cell": cell, "points": cloud.len(), "estimate": to_value(&est)? }))
        })
        .into_iter()
        .collect::<CliResult<_>>()?;
    let mut plot = Table::new(&["cell", "delta"]);
    let mut max_delta: f64 = 0.0;
    for r in &rows {
        let d: f64 = serde_json::from_value(r["estimate"]["delta"].clone()).unwrap_or(f64::NAN);
        max_delta = max_delta.max(d);
        plot.push(vec![r["cell"].as_f64().unwrap_or_default(), d]);
    }
    Ok(Outcome {
        result: json!({ "source": source, "max_delta": json_real(max_delta), "cells": rows }),
        plot: Some((plot, PlotSpec::new("four-point delta per cell", "cell", &["delta"], PlotKind::Scatter))),
    })
}

fn isospec_bs(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let p = &cfg.params;
    let length = p.usize("length")?;
    let n_max = u32::try_from(p.u64("n_max")?).map_err(|_| CliError::validation("n_max too large"))?;
    if length == 0 {
        return Err(CliError::validation("length must be positive"));
    }
    let (tree, h2) = (ActionModel::BsTree, ActionModel::BsHalfPlane);
    let sequences = bs_sequences(length);
    let report = coarsely_isospectral(&h2, &tree, &sequences)?;
    let mut tables = Vec::new();
    let mut plot = Table::new(&["n", "ratio"]);
    for seq in &sequences {
        let mut rows = Vec::new();
        for (i, g) in seq.elements.iter().enumerate() {
            let t = translation_number(&tree, g, n_max)?;
            let h = translation_number(&h2, g, n_max)?;
            let ratio = (t.lower > 0.0).then(|| h.lower / t.lower);
            if seq.name == "b^n" {
                plot.push(vec![(i + 1) as f64, ratio.unwrap_or(f64::NAN)]);
            }
            rows.push(json!({
                "n": i + 1,
                "element": g,
                "tau_tree": json_real(t.lower),
                "tau_half_plane": json_real(h.lower),
                "ratio": ratio.map(json_real),
            }));
        }
        tables.push(json!({ "sequence": seq.name, "rows": rows }));
    }
    Ok(Outcome {
        result: json!({
            "ln_2": json_real(std::f64::consts::LN_2),
            "ratio_tables": tables,
            "report": to_value(&report)?,
        }),
        plot: Some((plot, PlotSpec::new("tau_half_plane / tau_tree along b^n", "n", &["ratio"], PlotKind::Line))),
    })
}
