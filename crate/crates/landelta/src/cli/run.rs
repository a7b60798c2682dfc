//! Experiment runners: each subcommand maps a validated configuration to
//! deterministic CSV/SVG artifacts in the output directory.

use super::cache::{fnv64, MatrixCache};
use super::config::{AlphaConfig, Experiment, GeometrySpec, RunConfig};
use super::csvout::{format_float, CsvDoc};
use super::svg::{write_plot, PlotStyle, Series};
use crate::geometry::{build_circle, build_fourier_curve, build_segment, sub_arc, Arc, Curve, TubularMap};
use crate::selftest::Rng;
use crate::spectral::{Side, StrengthFunction};
use crate::{bie, capacity, landau, oracle, spectral, squeeze, toeplitz};
use num_complex::Complex64;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn numerical<E: std::fmt::Display>(context: &str) -> impl Fn(E) -> RunError + '_ {
    move |e| RunError::Numerical(format!("{context}: {e}"))
}

struct Workspace {
    curve: Curve,
    arc: Option<Arc>,
    segment: Option<Arc>,
}

fn build_geometry(spec: &GeometrySpec) -> Result<Workspace, RunError> {
    match spec {
        GeometrySpec::Circle {
            center,
            radius,
            n_panels,
            arc,
        } => {
            let curve =
                build_circle(*center, *radius, *n_panels).map_err(numerical("geometry"))?;
            let arc = match arc {
                Some([a, b]) => Some(sub_arc(&curve, *a, *b).map_err(numerical("sub_arc"))?),
                None => None,
            };
            Ok(Workspace {
                curve,
                arc,
                segment: None,
            })
        }
        GeometrySpec::Fourier {
            center,
            base_radius,
            cos_coef,
            sin_coef,
            n_panels,
            arc,
        } => {
            let curve = build_fourier_curve(*center, *base_radius, cos_coef, sin_coef, *n_panels)
                .map_err(numerical("geometry"))?;
            let arc = match arc {
                Some([a, b]) => Some(sub_arc(&curve, *a, *b).map_err(numerical("sub_arc"))?),
                None => None,
            };
            Ok(Workspace {
                curve,
                arc,
                segment: None,
            })
        }
        GeometrySpec::Segment { a, b, n_panels } => {
            let seg = build_segment(*a, *b, *n_panels).map_err(numerical("geometry"))?;
            let curve = seg.parent.clone();
            Ok(Workspace {
                curve,
                arc: None,
                segment: Some(seg),
            })
        }
    }
}

fn build_alpha(curve: &Curve, cfg: &AlphaConfig) -> StrengthFunction {
    match cfg {
        AlphaConfig::Constant { value } => StrengthFunction::constant(curve, *value),
        AlphaConfig::Window { s_a, s_b, value } => {
            StrengthFunction::windowed_constant(curve, *s_a, *s_b, *value)
        }
        AlphaConfig::Piecewise { windows } => {
            let windows = windows.clone();
            StrengthFunction::from_fn(curve, move |s| {
                for &(a, b, v) in &windows {
                    if s >= a && s <= b {
                        return v;
                    }
                }
                0.0
            })
        }
    }
}

fn side_of(cfg: &RunConfig) -> Side {
    if cfg.numerics.side == "below" {
        Side::Below
    } else {
        Side::Above
    }
}

fn capacity_of_support(ws: &Workspace) -> Result<f64, RunError> {
    let set = if let Some(seg) = &ws.segment {
        capacity::CapacitySet::from_arc(seg)
    } else if let Some(arc) = &ws.arc {
        capacity::CapacitySet::from_arc(arc)
    } else {
        capacity::CapacitySet::from_curve(&ws.curve)
    };
    capacity::capacity_of(&set).map_err(numerical("capacity"))
}

pub fn run(
    experiment: Experiment,
    cfg: &RunConfig,
    out_dir: &Path,
    use_cache: bool,
    seed: u64,
) -> Result<(), RunError> {
    if let Some(declared) = &cfg.experiment {
        if *declared != experiment {
            return Err(RunError::Config(format!(
                "config declares experiment '{declared}' but the subcommand is '{experiment}'"
            )));
        }
    }
    std::fs::create_dir_all(out_dir)?;
    match experiment {
        Experiment::Greens => run_greens(cfg, out_dir, seed),
        Experiment::Weyl => run_weyl(cfg, out_dir, use_cache),
        Experiment::Spectrum => run_spectrum(cfg, out_dir),
        Experiment::Toeplitz => run_toeplitz(cfg, out_dir),
        Experiment::Capacity => run_capacity(cfg, out_dir),
        Experiment::Approx => run_approx(cfg, out_dir),
        Experiment::Selftest => run_selftest(out_dir, seed),
    }
}

fn run_greens(cfg: &RunConfig, out: &Path, seed: u64) -> Result<(), RunError> {
    let b = cfg.physics.b;
    let lambda = Complex64::new(-b, 0.0);
    let mut rng = Rng::new(seed);
    let mut doc = CsvDoc::new(&[
        "x1", "x2", "y1", "y2", "dist", "g_re", "g_im", "eigen_re", "eigen_im", "rel_err",
    ]);
    doc.comment("green function vs resummed projection-kernel eigen-expansion");
    doc.comment(format!("b = {b}, lambda = {lambda}"));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for _ in 0..cfg.numerics.samples {
        let x = [rng.in_range(-1.5, 1.5), rng.in_range(-1.5, 1.5)];
        let phi = rng.in_range(0.0, std::f64::consts::TAU);
        let d = rng.in_range(0.5, 2.0);
        let y = [x[0] + d * phi.cos(), x[1] + d * phi.sin()];
        let g = landau::green_function(x, y, lambda, b).map_err(numerical("green"))?;
        let e = oracle::green_eigen_expansion(x, y, lambda, b);
        let rel = (g - e).norm() / g.norm().max(1e-300);
        doc.row(vec![
            format_float(x[0]),
            format_float(x[1]),
            format_float(y[0]),
            format_float(y[1]),
            format_float(d),
            format_float(g.re),
            format_float(g.im),
            format_float(e.re),
            format_float(e.im),
            format_float(rel),
        ]);
        xs.push(d);
        ys.push(rel.max(1e-18));
    }
    doc.write(&out.join("greens.csv"))?;
    write_plot(
        &out.join("greens.svg"),
        &[Series {
            label: "relative error".into(),
            xs,
            ys,
            scatter: true,
        }],
        &PlotStyle {
            title: "Green function vs eigen-expansion".into(),
            x_label: "|x - y|".into(),
            y_label: "relative error".into(),
            log_x: false,
            log_y: true,
            h_line: None,
            annotation: None,
        },
    )
    .map_err(|e| RunError::Numerical(e.to_string()))?;
    Ok(())
}

fn run_weyl(cfg: &RunConfig, out: &Path, use_cache: bool) -> Result<(), RunError> {
    let ws = build_geometry(&cfg.geometry)?;
    let b = cfg.physics.b;
    let cache = MatrixCache::new(out, use_cache);
    let curve_json = ws.curve.to_json();
    let curve_hash = fnv64(curve_json.as_bytes());
    let grid = bie::BieGrid::from_curve(&ws.curve);
    let mut doc = CsvDoc::new(&["lambda", "norm"]);
    doc.comment("operator norm of the symmetrized Weyl matrix");
    let mut norms = Vec::new();
    for &l in &cfg.numerics.lambdas {
        let lambda = Complex64::new(l, 0.0);
        let key = MatrixCache::key(bie::BoundaryKind::Weyl, Some(lambda), Some(b), &curve_json);
        let m = match cache.load(key, bie::BoundaryKind::Weyl, Some(lambda), Some(b), &grid) {
            Some(m) => m,
            None => {
                let m = bie::assemble_weyl_on_grid(grid.clone(), lambda, b)
                    .map_err(numerical("weyl assembly"))?;
                cache.store(key, &m, curve_hash)?;
                m
            }
        };
        let norm = m.operator_norm();
        norms.push((l, norm));
        doc.row(vec![format_float(l), format_float(norm)]);
    }
    for w in norms.windows(2) {
        let (l0, n0) = w[0];
        let (l1, n1) = w[1];
        if l1 < l0 && n0 > 0.0 && n1 > 0.0 {
            let expo = (n0 / n1).ln() / ((l1 - cfg.physics.b).abs() / (l0 - cfg.physics.b).abs()).ln();
            doc.footer(format!(
                "decay exponent between lambda = {l0} and {l1}: {}",
                format_float(expo)
            ));
        }
    }
    doc.write(&out.join("weyl.csv"))?;
    write_plot(
        &out.join("weyl.svg"),
        &[Series {
            label: "|M(lambda)|".into(),
            xs: norms.iter().map(|p| (p.0 - cfg.physics.b).abs()).collect(),
            ys: norms.iter().map(|p| p.1).collect(),
            scatter: false,
        }],
        &PlotStyle {
            title: "Weyl function norm decay".into(),
            x_label: "|lambda - B|".into(),
            y_label: "norm".into(),
            log_x: true,
            log_y: true,
            h_line: None,
            annotation: None,
        },
    )
    .map_err(|e| RunError::Numerical(e.to_string()))?;
    Ok(())
}

fn run_spectrum(cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    let ws = build_geometry(&cfg.geometry)?;
    if ws.segment.is_some() {
        return Err(RunError::Config(
            "the spectrum experiment needs a closed curve".into(),
        ));
    }
    let b = cfg.physics.b;
    let alpha = match &ws.arc {
        Some(arc) => {
            // constant alpha restricted to the configured arc
            let value = match &cfg.physics.alpha {
                AlphaConfig::Constant { value } => *value,
                AlphaConfig::Window { value, .. } => *value,
                AlphaConfig::Piecewise { .. } => 1.0,
            };
            StrengthFunction::on_arc(&ws.curve, arc, move |_| value)
        }
        None => build_alpha(&ws.curve, &cfg.physics.alpha),
    };
    let side = side_of(cfg);
    let q = cfg.numerics.q;
    let report =
        spectral::find_cluster_eigenvalues(&ws.curve, &alpha, q, side, cfg.numerics.k_max, b)
            .map_err(numerical("cluster solve"))?;
    let a_seq = report.a_sequence();
    let cap = capacity_of_support(&ws)?;
    let target = 0.5 * b * cap * cap;
    let mut doc = CsvDoc::new(&["q", "side", "k", "lambda", "gap", "a_k", "reliable_flag"]);
    doc.comment("perturbed eigenvalue cluster; gap = |lambda - Lambda_q|");
    doc.comment(format!(
        "capacity of the strength support = {}, target (B/2) Cap^2 = {}",
        format_float(cap),
        format_float(target)
    ));
    let side_name = if side == Side::Above { "above" } else { "below" };
    let mut ai = 0usize;
    for ev in &report.eigenvalues {
        for copy in 0..ev.multiplicity {
            let (k, a_k) = a_seq[ai];
            ai += 1;
            let _ = copy;
            doc.row(vec![
                q.to_string(),
                side_name.into(),
                k.to_string(),
                format_float(ev.lambda),
                format_float(ev.gap),
                format_float(a_k),
                if ev.reliable { "1".into() } else { "0".into() },
            ]);
        }
    }
    if let Ok(asym) = spectral::cluster_asymptotics(&report) {
        doc.footer(format!(
            "tail estimate (median of last 3 a_k) = {}",
            format_float(asym.tail_estimate)
        ));
    }
    doc.write(&out.join("spectrum.csv"))?;
    write_plot(
        &out.join("spectrum.svg"),
        &[Series {
            label: "a_k".into(),
            xs: a_seq.iter().map(|p| p.0 as f64).collect(),
            ys: a_seq.iter().map(|p| p.1).collect(),
            scatter: true,
        }],
        &PlotStyle {
            title: format!("cluster asymptotics, q = {q}, side {side_name}"),
            x_label: "k".into(),
            y_label: "a_k = (k! gap)^(1/k)".into(),
            log_x: false,
            log_y: false,
            h_line: Some((target, "(B/2) Cap^2".into())),
            annotation: None,
        },
    )
    .map_err(|e| RunError::Numerical(e.to_string()))?;
    Ok(())
}

fn run_toeplitz(cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    let ws = build_geometry(&cfg.geometry)?;
    if ws.segment.is_some() {
        return Err(RunError::Config(
            "the toeplitz experiment needs a closed curve or sub-arc".into(),
        ));
    }
    let b = cfg.physics.b;
    let q = cfg.numerics.q;
    let gamma = match &ws.arc {
        Some(arc) => toeplitz::Gamma::Arc(arc),
        None => toeplitz::Gamma::Curve(&ws.curve),
    };
    let recenter = ws.arc.is_some();
    let t = toeplitz::assemble_toeplitz(q, &gamma, b, cfg.numerics.m_max, recenter);
    let svals = t.singular_values();
    let cap = capacity_of_support(&ws)?;
    let asym = toeplitz::toeplitz_asymptotics(&svals, b, cap).map_err(numerical("toeplitz"))?;
    let mut doc = CsvDoc::new(&["q", "k", "s_k", "b_k", "target"]);
    doc.comment("Toeplitz-type operator singular values and asymptotics");
    for (i, &s) in svals.iter().enumerate() {
        let bk = asym
            .b_k
            .iter()
            .find(|(k, _)| *k == i + 1)
            .map(|(_, v)| format_float(*v))
            .unwrap_or_default();
        doc.row(vec![
            q.to_string(),
            (i + 1).to_string(),
            format_float(s),
            bk,
            format_float(asym.target),
        ]);
    }
    doc.footer(format!("tail estimate = {}", format_float(asym.tail_estimate)));
    doc.write(&out.join("toeplitz.csv"))?;
    write_plot(
        &out.join("toeplitz.svg"),
        &[Series {
            label: "b_k".into(),
            xs: asym.b_k.iter().map(|p| p.0 as f64).collect(),
            ys: asym.b_k.iter().map(|p| p.1).collect(),
            scatter: false,
        }],
        &PlotStyle {
            title: format!("Toeplitz asymptotics, q = {q}"),
            x_label: "k".into(),
            y_label: "b_k = (k! s_k)^(1/k)".into(),
            log_x: false,
            log_y: false,
            h_line: Some((asym.target, "(B/2) Cap^2".into())),
            annotation: None,
        },
    )
    .map_err(|e| RunError::Numerical(e.to_string()))?;
    Ok(())
}

fn run_capacity(cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    let ws = build_geometry(&cfg.geometry)?;
    let set = if let Some(seg) = &ws.segment {
        capacity::CapacitySet::from_arc(seg)
    } else if let Some(arc) = &ws.arc {
        capacity::CapacitySet::from_arc(arc)
    } else {
        capacity::CapacitySet::from_curve(&ws.curve)
    };
    let eq = capacity::equilibrium(&set).map_err(numerical("equilibrium"))?;
    let mut doc = CsvDoc::new(&["node_x", "node_y", "weight"]);
    doc.comment("equilibrium measure (panel masses)");
    for (node, w) in eq.nodes.iter().zip(&eq.weights) {
        doc.row(vec![
            format_float(node[0]),
            format_float(node[1]),
            format_float(*w),
        ]);
    }
    doc.footer(format!(
        "robin = {}, capacity = {}",
        format_float(eq.robin),
        format_float(eq.capacity)
    ));
    doc.write(&out.join("capacity.csv"))?;
    write_plot(
        &out.join("capacity.svg"),
        &[Series {
            label: "panel mass".into(),
            xs: (0..eq.weights.len()).map(|i| i as f64).collect(),
            ys: eq.weights.clone(),
            scatter: false,
        }],
        &PlotStyle {
            title: format!("equilibrium measure (capacity = {:.6})", eq.capacity),
            x_label: "panel index".into(),
            y_label: "mass".into(),
            log_x: false,
            log_y: false,
            h_line: None,
            annotation: None,
        },
    )
    .map_err(|e| RunError::Numerical(e.to_string()))?;
    Ok(())
}

fn run_approx(cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    let ws = build_geometry(&cfg.geometry)?;
    if ws.segment.is_some() {
        return Err(RunError::Config(
            "the approx experiment needs a closed curve".into(),
        ));
    }
    let b = cfg.physics.b;
    let map = TubularMap::new(&ws.curve);
    let beta = map.beta;
    let alpha_value = match &cfg.physics.alpha {
        AlphaConfig::Constant { value } => *value,
        _ => 1.0,
    };
    let profile = squeeze::TransversalProfile::from_alpha(map, move |_| alpha_value);
    let eps_list: Vec<f64> = (1..=cfg.numerics.eps_levels)
        .map(|j| beta * 0.5f64.powi(j as i32))
        .collect();
    let q_max = if cfg.numerics.q_max == 0 { 3 } else { cfg.numerics.q_max };
    let m_max = cfg.numerics.m_max.unwrap_or(24);
    let report = squeeze::resolvent_gap(
        &ws.curve,
        &profile,
        b,
        q_max,
        m_max,
        Complex64::new(0.0, b),
        &eps_list,
    )
    .map_err(numerical("resolvent gap"))?;
    let mut doc = CsvDoc::new(&["epsilon", "gap"]);
    doc.comment("Galerkin resolvent gap between squeezed and delta operators");
    for &(e, g) in &report.gaps {
        doc.row(vec![format_float(e), format_float(g)]);
    }
    doc.footer(format!(
        "fitted exponent p = {} (stderr {})",
        format_float(report.fitted_p),
        format_float(report.stderr)
    ));
    doc.write(&out.join("approx.csv"))?;
    write_plot(
        &out.join("approx.svg"),
        &[Series {
            label: "gap".into(),
            xs: report.gaps.iter().map(|p| p.0).collect(),
            ys: report.gaps.iter().map(|p| p.1).collect(),
            scatter: false,
        }],
        &PlotStyle {
            title: "norm-resolvent approximation".into(),
            x_label: "epsilon".into(),
            y_label: "resolvent gap".into(),
            log_x: true,
            log_y: true,
            h_line: None,
            annotation: Some(format!("fitted slope p = {:.3}", report.fitted_p)),
        },
    )
    .map_err(|e| RunError::Numerical(e.to_string()))?;
    Ok(())
}

fn run_selftest(out: &Path, seed: u64) -> Result<(), RunError> {
    let results = crate::selftest::run_all(seed);
    let mut doc = CsvDoc::new(&["module", "check", "passed", "detail"]);
    doc.comment(format!("selftest battery, seed {seed}"));
    let mut failures = 0usize;
    for r in &results {
        println!(
            "[{}] {}::{} {}",
            if r.passed { "pass" } else { "FAIL" },
            r.module,
            r.name,
            r.detail
        );
        if !r.passed {
            failures += 1;
        }
        doc.row(vec![
            r.module.into(),
            r.name.into(),
            if r.passed { "1".into() } else { "0".into() },
            r.detail.replace(',', ";"),
        ]);
    }
    doc.write(&out.join("selftest.csv"))?;
    if failures > 0 {
        return Err(RunError::Numerical(format!(
            "{failures} selftest checks failed"
        )));
    }
    println!("selftest: all {} checks passed", results.len());
    Ok(())
}

/// Resolve the output directory: CLI flag, then config, then the environment
/// default, then ./out.
pub fn resolve_out_dir(flag: Option<PathBuf>, cfg: Option<&RunConfig>) -> PathBuf {
    if let Some(dir) = flag {
        return dir;
    }
    if let Some(cfg) = cfg {
        if let Some(dir) = &cfg.output.dir {
            return PathBuf::from(dir);
        }
    }
    if let Ok(dir) = std::env::var("LANDELTA_OUT") {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    PathBuf::from("out")
}
