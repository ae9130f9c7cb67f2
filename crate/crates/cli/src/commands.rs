use crate::config::Config;
use crate::{AbelArgs, ClassifyArgs, CliError, DumpArgs, GridArgs, OrbitArgs, SaddleArgs, SweepArgs};
use num_complex::Complex64;
use orbitlens::abel::{AbelProblem, Rhs, SectorialSolution, Side};
use orbitlens::classify::{
    classify_germ, classify_holonomy, classify_order, classify_real, classify_report, cyclicity_set,
    hyperbola_family_dimension, hyperbola_raster_dimension, saddle_loop_dimension, ClassificationResult,
};
use orbitlens::fit::fractal_report;
use orbitlens::neighborhood::{sweep as run_sweep, valid_window, EpsSweep, GridSpec, SweepKind};
use orbitlens::orbit::{attracting_directions, orbit, OrbitSample, StopCriteria};
use orbitlens::scales::{real_orbit, ChebyshevScale, RealMap};
use orbitlens::{parse_complex, Germ};
use serde_json::json;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

const DEFAULT_POINTS: usize = 1_000_000;
const DEFAULT_X0: f64 = 0.3;
const DEFAULT_Z0_RADIUS: f64 = 0.1;
/// Upper end and density of the wide sweep used for zero-dimensional real orbits.
const WIDE_EPS_MAX: f64 = 1e-4;
const WIDE_PPD: usize = 10;

enum Source {
    Complex { germ: Germ, z0: Complex64 },
    Real { map: RealMap, x0: f64 },
}

struct Resolved {
    source: Source,
    points: usize,
}

fn resolve_germ(text: Option<String>) -> Result<Germ, CliError> {
    let text = text.ok_or_else(|| CliError::Usage("--germ is required".into()))?;
    Ok(text.parse()?)
}

fn default_z0(g: &Germ) -> Complex64 {
    attracting_directions(g)
        .ok()
        .and_then(|d| d.first().map(|d| d.unit * DEFAULT_Z0_RADIUS))
        .unwrap_or(Complex64::new(DEFAULT_Z0_RADIUS, 0.0))
}

fn resolve_orbit(a: &OrbitArgs, cfg: &Config) -> Result<Resolved, CliError> {
    let germ = cfg.pick(a.germ.clone(), "germ")?;
    let germ_real = cfg.pick(a.germ_real.clone(), "germ-real")?;
    let points = cfg.pick(a.points, "points")?.unwrap_or(DEFAULT_POINTS);
    let source = match (germ, germ_real) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give only one of --germ and --germ-real".into())),
        (Some(g), None) => {
            let germ: Germ = g.parse()?;
            let z0 = match cfg.pick(a.z0.clone(), "z0")? {
                Some(t) => parse_complex(&t)?,
                None => default_z0(&germ),
            };
            Source::Complex { germ, z0 }
        }
        (None, Some(m)) => {
            let map: RealMap = m.parse()?;
            let x0 = cfg.pick(a.x0, "x0")?.unwrap_or(DEFAULT_X0);
            Source::Real { map, x0 }
        }
        (None, None) => return Err(CliError::Usage("one of --germ or --germ-real is required".into())),
    };
    Ok(Resolved { source, points })
}

fn build_orbit(r: &Resolved) -> Result<OrbitSample, CliError> {
    Ok(match &r.source {
        Source::Complex { germ, z0 } => orbit(germ, *z0, StopCriteria::with_max_points(r.points))?,
        Source::Real { map, x0 } => real_orbit(map, *x0, r.points)?,
    })
}

pub fn grid_spec(a: &GridArgs, cfg: &Config) -> Result<GridSpec, CliError> {
    let ppd = cfg.pick(a.ppd, "ppd")?;
    if ppd == Some(0) {
        return Err(CliError::Usage("--ppd must be positive".into()));
    }
    if let Some(list) = cfg.pick(a.eps.clone(), "eps")? {
        let values = list
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::Usage(format!("invalid --eps list '{list}'")))?;
        if values.is_empty() || values.iter().any(|e| !(*e > 0.0)) {
            return Err(CliError::Usage("--eps values must be positive".into()));
        }
        return Ok(GridSpec::Explicit(values));
    }
    let eps_min = cfg.pick(a.eps_min, "eps-min")?;
    let eps_max = cfg.pick(a.eps_max, "eps-max")?;
    let default = GridSpec::default();
    let GridSpec::Decades { decades: default_decades, points_per_decade: default_ppd } = default else {
        unreachable!("default grid is given in decades")
    };
    let points_per_decade = ppd.unwrap_or(default_ppd);
    match (eps_min, eps_max) {
        (Some(eps_min), Some(eps_max)) => Ok(GridSpec::Range { eps_min, eps_max, points_per_decade }),
        (None, None) => {
            let decades = cfg.pick(a.decades, "decades")?.unwrap_or(default_decades);
            Ok(GridSpec::Decades { decades, points_per_decade })
        }
        _ => Err(CliError::Usage("--eps-min and --eps-max go together".into())),
    }
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn emit_json(value: &impl serde::Serialize, path: Option<&Path>) -> Result<(), CliError> {
    let mut out = writer(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Internal(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn write_plots(s: &EpsSweep, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let mut columns: Vec<(&str, Box<dyn Fn(usize) -> f64>)> = Vec::new();
    let r = &s.records;
    match s.kind {
        SweepKind::Planar => {
            columns.push(("area", Box::new(|i| r[i].area)));
            columns.push(("cm_re", Box::new(|i| r[i].complex_measure.re)));
            columns.push(("cm_im", Box::new(|i| r[i].complex_measure.im)));
            columns.push(("da_re", Box::new(|i| r[i].directed_area.re)));
            columns.push(("da_im", Box::new(|i| r[i].directed_area.im)));
        }
        SweepKind::Line => columns.push(("length", Box::new(|i| r[i].area))),
    }
    for (name, value) in columns {
        let mut out = BufWriter::new(File::create(dir.join(format!("{name}.dat")))?);
        writeln!(out, "# eps {name}")?;
        for i in 0..r.len() {
            writeln!(out, "{:.16e} {:.16e}", r[i].eps, value(i))?;
        }
        out.flush()?;
    }
    Ok(())
}

pub fn sweep(a: &SweepArgs, cfg: &Config) -> Result<(), CliError> {
    let resolved = resolve_orbit(&a.orbit, cfg)?;
    let grid = grid_spec(&a.grid, cfg)?;
    let kind = match cfg.pick(a.kind.clone(), "kind")?.as_deref() {
        Some("planar") => SweepKind::Planar,
        Some("line") => SweepKind::Line,
        Some(other) => return Err(CliError::Usage(format!("--kind must be planar or line, got '{other}'"))),
        None if matches!(resolved.source, Source::Real { .. }) => SweepKind::Line,
        None => SweepKind::Planar,
    };
    let o = build_orbit(&resolved)?;
    let s = run_sweep(&o, &grid, kind)?;
    let out_path = cfg.pick(a.out.clone(), "out")?;
    let mut out = writer(out_path.as_deref())?;
    s.write_csv(&mut out)?;
    out.flush()?;
    if let Some(dir) = cfg.pick(a.plot_dir.clone(), "plot-dir")? {
        write_plots(&s, &dir)?;
    }
    Ok(())
}

fn read_sweep(path: &Path) -> Result<EpsSweep, CliError> {
    let file = File::open(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(EpsSweep::read_csv(BufReader::new(file))?)
}

/// Wide line sweep for the zero-dimensional gauges, when the window allows it.
fn wide_sweep(o: &OrbitSample) -> Option<EpsSweep> {
    let (lo, hi) = valid_window(o).ok()?;
    let top = hi.min(WIDE_EPS_MAX);
    if lo * 10.0 > top {
        return None;
    }
    run_sweep(o, &GridSpec::Range { eps_min: lo, eps_max: top, points_per_decade: WIDE_PPD }, SweepKind::Line).ok()
}

fn classify_result(a: &ClassifyArgs, cfg: &Config, forced: Option<&str>) -> Result<ClassificationResult, CliError> {
    let sweep_in = cfg.pick(a.sweep_in.clone(), "sweep-in")?;
    let scale_text = cfg.pick(a.scale.clone(), "scale")?;
    let q = cfg.pick(a.q, "q")?;
    let has_real = cfg.pick(a.orbit.germ_real.clone(), "germ-real")?.is_some();
    let route = match forced {
        Some(r) => r.to_string(),
        None => match cfg.pick(a.route.clone(), "route")? {
            Some(r) => r,
            None if q.is_some() => "holonomy".into(),
            None if scale_text.is_some() => "order".into(),
            None if has_real => "real".into(),
            None => "parabolic".into(),
        },
    };
    let grid = grid_spec(&a.grid, cfg)?;
    let scale = || -> Result<ChebyshevScale, CliError> {
        Ok(scale_text.as_deref().unwrap_or("saddle_loop:8").parse::<ChebyshevScale>()?)
    };
    let result = match route.as_str() {
        "parabolic" => match &sweep_in {
            Some(path) => {
                let s = read_sweep(path)?;
                let germ = cfg.pick(a.orbit.germ.clone(), "germ")?.map(|g| g.parse::<Germ>()).transpose()?;
                classify_report(fractal_report(&s, None)?, germ.as_ref())?
            }
            None => {
                let resolved = resolve_orbit(&a.orbit, cfg)?;
                let Source::Complex { germ, z0 } = &resolved.source else {
                    return Err(CliError::Usage("the parabolic route needs --germ".into()));
                };
                classify_germ(germ, *z0, resolved.points, &grid)?
            }
        },
        "real" => match &sweep_in {
            Some(path) => classify_real(&read_sweep(path)?, None)?,
            None => {
                let o = build_orbit(&resolve_orbit(&a.orbit, cfg)?)?;
                let s = run_sweep(&o, &grid, SweepKind::Line)?;
                classify_real(&s, wide_sweep(&o).as_ref())?
            }
        },
        "order" => {
            let s = match &sweep_in {
                Some(path) => read_sweep(path)?,
                None => {
                    let o = build_orbit(&resolve_orbit(&a.orbit, cfg)?)?;
                    run_sweep(&o, &grid, SweepKind::Line)?
                }
            };
            classify_order(&s, &scale()?)?
        }
        "holonomy" => {
            let p = cfg.pick(a.p, "p")?.ok_or_else(|| CliError::Usage("the holonomy route needs --p".into()))?;
            let q = q.ok_or_else(|| CliError::Usage("the holonomy route needs --q".into()))?;
            let h = resolve_germ(cfg.pick(a.orbit.germ.clone(), "germ")?)?;
            let points = cfg.pick(a.orbit.points, "points")?.unwrap_or(DEFAULT_POINTS);
            let iterate = orbitlens::classify::holonomy_iterate(&h, q, orbitlens::classify::HOLONOMY_ORDER)?;
            let z0 = match cfg.pick(a.orbit.z0.clone(), "z0")? {
                Some(t) => parse_complex(&t)?,
                None => default_z0(&iterate),
            };
            classify_holonomy(&h, p, q, z0, points, &grid)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "--route must be parabolic, real, order or holonomy, got '{other}'"
            )))
        }
    };
    Ok(result)
}

pub fn classify(a: &ClassifyArgs, cfg: &Config, forced: Option<&str>) -> Result<(), CliError> {
    let mut result = classify_result(a, cfg, forced)?;
    if !cfg.flag(a.diagnostics, "diagnostics")? {
        result.report = None;
    }
    emit_json(&result, cfg.pick(a.out.clone(), "out")?.as_deref())
}

pub fn abel(a: &AbelArgs, cfg: &Config) -> Result<(), CliError> {
    let germ = resolve_germ(cfg.pick(a.germ.clone(), "germ")?)?;
    let rhs: Rhs = cfg
        .pick(a.rhs.clone(), "rhs")?
        .ok_or_else(|| CliError::Usage("--rhs is required".into()))?
        .parse()?;
    let z = parse_complex(
        &cfg.pick(a.eval.clone(), "eval")?.ok_or_else(|| CliError::Usage("--eval is required".into()))?,
    )?;
    let side: Side = cfg.pick(a.side.clone(), "side")?.as_deref().unwrap_or("plus").parse()?;
    let mut solver = SectorialSolution::new(AbelProblem::new(germ, rhs)?, side)?;
    if let Some(tol) = cfg.pick(a.tol, "tol")? {
        solver = solver.with_tolerance(tol);
    }
    let value = solver.eval(z)?;
    let residual = if cfg.flag(a.check_residual, "check-residual")? { Some(solver.residual(z)?) } else { None };
    emit_json(&json!({ "value_re": value.re, "value_im": value.im, "residual": residual, "side": side }), None)
}

pub fn saddle(a: &SaddleArgs, cfg: &Config) -> Result<(), CliError> {
    let mut out = serde_json::Map::new();
    if let Some(codim) = cfg.pick(a.codim, "codim")? {
        out.insert("codim".into(), json!(codim));
        out.insert("dim".into(), json!(saddle_loop_dimension(codim)?));
    }
    if let Some(d) = cfg.pick(a.dim, "dim")? {
        out.insert("input_dim".into(), json!(d));
        out.insert("cyclicity_set".into(), json!(cyclicity_set(d)?));
        out.insert("qualifier".into(), json!(orbitlens::classify::CYCLICITY_QUALIFIER));
    }
    if cfg.flag(a.hyperbolas, "hyperbolas")? {
        let s = cfg.pick(a.s, "s")?.ok_or_else(|| CliError::Usage("--hyperbolas needs --s".into()))?;
        let r = cfg.pick(a.r, "r")?.ok_or_else(|| CliError::Usage("--hyperbolas needs --r".into()))?;
        out.insert("dim".into(), json!(hyperbola_family_dimension(s, r)?));
        if cfg.flag(a.raster, "raster")? {
            out.insert("raster_dim".into(), json!(hyperbola_raster_dimension(s, r, 7..=12)?));
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("give --codim, --dim or --hyperbolas".into()));
    }
    emit_json(&out, None)
}

pub fn orbit_dump(a: &DumpArgs, cfg: &Config) -> Result<(), CliError> {
    let o = build_orbit(&resolve_orbit(&a.orbit, cfg)?)?;
    let stride = cfg.pick(a.stride, "stride")?.unwrap_or(1);
    if stride == 0 {
        return Err(CliError::Usage("--stride must be positive".into()));
    }
    let mut out = writer(cfg.pick(a.out.clone(), "out")?.as_deref())?;
    if stride == 1 {
        o.write_csv(&mut out)?;
    } else {
        writeln!(out, "n,re,im,d")?;
        let d = o.distances();
        for (n, z) in o.points().iter().enumerate().step_by(stride) {
            let dn = d.get(n).map(|v| format!("{v:.17e}")).unwrap_or_default();
            writeln!(out, "{n},{:.17e},{:.17e},{dn}", z.re, z.im)?;
        }
    }
    out.flush()?;
    Ok(())
}
