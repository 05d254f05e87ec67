use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use shepard_core::geometry::{lens_ii, lens_lower_bound, lens_monte_carlo, lens_quadrature, LensConfig};
use shepard_core::pointset::{
    default_fill_resolution, gen_grid, gen_hexagonal, gen_poisson_disk, hexagonal_domain, poisson_radius_for,
    read_csv_path, uniformity_report, verify_counting_bounds, write_csv, BoundKind, DomainSpec, PointFamily,
    PointSet,
};
use shepard_core::shepard::{
    constant_c_alpha_d, constant_c_star, constant_k_d, convergence_study, error_budget, kernel_gaussian,
    kernel_inverse_multiquadric, model_modulus, scaled_sum_extremes, sup_error, Dilation, KernelSpec,
    ShepardModel, StudyOptions,
};

use crate::config::Config;
use crate::output::{join_point, resolve_path, Format, Sink};
use crate::{parse, Cli, Command, Failure, FamilyName, KernelName, ModelArgs, PointsInput};

const LENS_REL_TOL: f64 = 1e-8;
const LENS_MAX_Z: f64 = 4.0;

pub fn run(cli: &Cli, cfg: &Config) -> Result<(), Failure> {
    let format = cfg.pick_or(cli.format, "format", Format::Csv)?;
    let output: Option<String> = cfg.pick(cli.output.clone(), "output")?;
    let seed = cfg.pick_or(cli.seed, "seed", 0u64)?;
    let name = match &cli.command {
        Command::Gen(_) => "gen",
        Command::Metrics(_) => "metrics",
        Command::Annuli(_) => "annuli",
        Command::LensCheck(_) => "lens-check",
        Command::Approximate(_) => "approximate",
        Command::Converge(_) => "converge",
        Command::Constants(_) => "constants",
    };
    let sink = Sink {
        path: resolve_path(output.as_deref(), name, format),
        format,
    };
    let ctx = Ctx { cfg, sink, seed };
    match &cli.command {
        Command::Gen(a) => gen(&ctx, a),
        Command::Metrics(a) => metrics(&ctx, &a.input),
        Command::Annuli(a) => annuli(&ctx, a),
        Command::LensCheck(a) => lens_check(&ctx, a),
        Command::Approximate(a) => approximate(&ctx, a),
        Command::Converge(a) => converge(&ctx, a),
        Command::Constants(a) => constants(&ctx, a),
    }
}

struct Ctx<'a> {
    cfg: &'a Config,
    sink: Sink,
    seed: u64,
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn violations(count: usize) -> Result<(), Failure> {
    if count == 0 {
        Ok(())
    } else {
        Err(Failure::Violation(count))
    }
}

fn sidecar(points: &Path) -> std::path::PathBuf {
    let mut s = points.as_os_str().to_owned();
    s.push(".domain.json");
    s.into()
}

fn gen(ctx: &Ctx, a: &crate::GenArgs) -> Result<(), Failure> {
    let cfg = ctx.cfg;
    let family = cfg.pick_or(a.family, "family", FamilyName::Grid)?;
    let n = cfg.pick_or(a.n, "n", 1024usize)?;
    let d = match family {
        FamilyName::Hex => 2,
        _ => cfg.pick_or(a.d, "d", 2usize)?,
    };
    if n == 0 || d == 0 {
        return usage("n and d must be positive");
    }
    let domain = match cfg.pick(a.domain.clone(), "domain")? {
        Some(text) => parse::domain(&text)?,
        None if family == FamilyName::Hex => hexagonal_domain(),
        None => DomainSpec::unit_box(d),
    };
    if domain.dim() != d {
        return usage(format!("domain has dimension {}, family needs {d}", domain.dim()));
    }
    let ps = match family {
        FamilyName::Grid => {
            let per_axis = (n as f64).powf(1.0 / d as f64).round().max(1.0) as usize;
            gen_grid(d, per_axis, &domain)?
        }
        FamilyName::Hex => gen_hexagonal(n, &domain)?,
        FamilyName::Poisson => {
            let (lo, hi) = domain.bounds();
            let side = lo
                .iter()
                .zip(&hi)
                .map(|(l, h)| h - l)
                .product::<f64>()
                .powf(1.0 / d as f64);
            let r = cfg.pick_or(a.min_dist, "min_dist", poisson_radius_for(d, n) * side)?;
            gen_poisson_disk(d, r, &domain, ctx.seed)?
        }
    };
    match ctx.sink.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&ps, &mut buf)?;
            ctx.sink.bytes(&buf)?;
        }
        Format::Json => {
            let points: Vec<&[f64]> = ps.iter().collect();
            let doc = json!({ "command": "gen", "n": ps.len(), "d": d, "domain": domain, "points": points });
            let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Usage(e.to_string()))?;
            text.push('\n');
            ctx.sink.bytes(text.as_bytes())?;
        }
    }
    if let Some(path) = &ctx.sink.path {
        let text = serde_json::to_string_pretty(&domain).map_err(|e| Failure::Usage(e.to_string()))?;
        std::fs::write(sidecar(path), text)?;
    }
    Ok(())
}

fn load_points(ctx: &Ctx, input: &PointsInput) -> Result<(PointSet, DomainSpec, String), Failure> {
    let Some(path) = ctx.cfg.pick(input.points.clone(), "points")? else {
        return usage("--points is required");
    };
    let ps = read_csv_path(&path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
    let domain = match ctx.cfg.pick(input.domain.clone(), "domain")? {
        Some(text) => parse::domain(&text)?,
        None => {
            let side = sidecar(Path::new(&path));
            if side.exists() {
                let text = std::fs::read_to_string(&side)?;
                let dom: DomainSpec = serde_json::from_str(&text)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", side.display())))?;
                dom.validate()?;
                dom
            } else {
                let (lo, hi) = ps.bounding_box();
                DomainSpec::new_box(lo, hi)
                    .map_err(|e| Failure::Usage(format!("bounding box is degenerate ({e}); pass --domain")))?
            }
        }
    };
    if domain.dim() != ps.dim() {
        return usage(format!(
            "domain dimension {} differs from point dimension {}",
            domain.dim(),
            ps.dim()
        ));
    }
    Ok((ps, domain, path))
}

fn resolution(ctx: &Ctx, input: &PointsInput, ps: &PointSet, domain: &DomainSpec) -> Result<f64, Failure> {
    let r = ctx
        .cfg
        .pick(input.probe_resolution, "probe_resolution")?
        .unwrap_or_else(|| default_fill_resolution(ps, domain));
    if !(r > 0.0) {
        return usage("probe resolution must be positive");
    }
    Ok(r)
}

fn metrics(ctx: &Ctx, input: &PointsInput) -> Result<(), Failure> {
    let (ps, domain, _) = load_points(ctx, input)?;
    let res = resolution(ctx, input, &ps, &domain)?;
    let report = uniformity_report(&ps, &domain, res)?;
    ctx.sink.rows("metrics", json!({ "domain": domain }), &[report])
}

#[derive(Serialize)]
struct ShellRow {
    kind: &'static str,
    center: String,
    thickness: f64,
    j: u32,
    count: u32,
    bound: Option<f64>,
    ok: bool,
}

fn sample_centers(domain: &DomainSpec, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = domain.bounds();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| rng.random_range(*a..=*b))
            .collect();
        if domain.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn annuli(ctx: &Ctx, a: &crate::AnnuliArgs) -> Result<(), Failure> {
    let (ps, domain, _) = load_points(ctx, &a.input)?;
    let res = resolution(ctx, &a.input, &ps, &domain)?;
    let report = uniformity_report(&ps, &domain, res)?;
    let centers = if a.center.is_empty() {
        let count = ctx.cfg.pick_or(a.centers, "centers", 20usize)?;
        sample_centers(&domain, count, ctx.seed)
    } else {
        a.center
            .iter()
            .map(|c| parse::numbers(c))
            .collect::<Result<_, _>>()?
    };
    let v = verify_counting_bounds(&ps, &domain, &report, &centers)?;
    let mut rows = Vec::new();
    for rec in &v.records {
        let kind = match rec.kind {
            BoundKind::FillShells => "fill_shells",
            BoundKind::SeparationShells => "separation_shells",
        };
        let center = join_point(&rec.center);
        for (k, (&count, bound)) in rec.counts.iter().zip(&rec.bounds).enumerate() {
            rows.push(ShellRow {
                kind,
                center: center.clone(),
                thickness: rec.thickness,
                j: rec.index_base + k as u32,
                count,
                bound: *bound,
                ok: bound.is_none_or(|b| count as f64 <= b),
            });
        }
    }
    let summary = json!({
        "n": v.n, "d": v.d, "c_est": v.c_est, "C_est": v.c_fill,
        "centers": centers.len(), "violations": v.violation_count(),
    });
    ctx.sink.rows("annuli", summary, &rows)?;
    violations(v.violation_count())
}

#[derive(Serialize)]
struct LensRow {
    d: u32,
    #[serde(rename = "r_over_R")]
    ratio: f64,
    closed_ii: f64,
    quadrature_ii: f64,
    rel_err: f64,
    quadrature_total: f64,
    lower_bound: f64,
    mc_estimate: f64,
    mc_std_error: f64,
    z: f64,
    pass: bool,
}

fn lens_check(ctx: &Ctx, a: &crate::LensArgs) -> Result<(), Failure> {
    let d = ctx.cfg.pick_or(a.d, "d", 2u32)?;
    let grid = ctx.cfg.pick_or(a.grid, "grid", 10usize)?;
    let mc = ctx.cfg.pick_or(a.mc, "mc", 100_000u64)?;
    if d == 0 || grid == 0 || mc == 0 {
        return usage("d, grid and mc must be positive");
    }
    let mut rows = Vec::with_capacity(grid);
    for k in 1..=grid {
        let ratio = k as f64 / grid as f64;
        let cfg = LensConfig::new(d, ratio, 1.0)?;
        let closed = lens_ii(&cfg);
        let quad = lens_quadrature(&cfg);
        let total = quad.i + closed;
        let est = lens_monte_carlo(&cfg, mc, ctx.seed.wrapping_add(k as u64));
        let rel_err = (closed - quad.ii).abs() / quad.ii.abs().max(f64::MIN_POSITIVE);
        let z = est.z_score(total);
        let lower = lens_lower_bound(&cfg);
        rows.push(LensRow {
            d,
            ratio,
            closed_ii: closed,
            quadrature_ii: quad.ii,
            rel_err,
            quadrature_total: quad.total(),
            lower_bound: lower,
            mc_estimate: est.estimate,
            mc_std_error: est.std_error,
            z,
            pass: rel_err <= LENS_REL_TOL && z <= LENS_MAX_Z && lower < quad.total(),
        });
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    let summary =
        json!({ "d": d, "samples": mc, "rel_tol": LENS_REL_TOL, "max_z": LENS_MAX_Z, "failed": failed });
    ctx.sink.rows("lens-check", summary, &rows)?;
    violations(failed)
}

fn build_kernel(ctx: &Ctx, m: &ModelArgs, d: usize) -> Result<KernelSpec, Failure> {
    let name = ctx.cfg.pick_or(m.kernel, "kernel", KernelName::Imq)?;
    let alpha = ctx.cfg.pick_or(m.alpha, "alpha", 0.5 * (d as f64 + 2.0) + 0.5)?;
    Ok(match name {
        KernelName::Imq => kernel_inverse_multiquadric(alpha)?,
        KernelName::Gaussian => kernel_gaussian(alpha)?,
    })
}

fn dilation(ctx: &Ctx, m: &ModelArgs) -> Result<Dilation, Failure> {
    Ok(match ctx.cfg.pick(m.big_c, "C")? {
        Some(c) => Dilation::Constant { c },
        None => Dilation::MeasuredFill,
    })
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    x: String,
    value: f64,
    bound: f64,
    ok: bool,
}

fn approximate(ctx: &Ctx, a: &crate::ApproxArgs) -> Result<(), Failure> {
    let (ps, domain, path) = load_points(ctx, &a.input)?;
    let d = ps.dim();
    let f_text: Option<String> = ctx.cfg.pick(a.model.function.clone(), "function")?;
    let f = parse::function(f_text.as_deref(), d, &domain)?;
    let kernel = build_kernel(ctx, &a.model, d)?;
    let probes = ctx.cfg.pick_or(a.model.probes, "probes", 10_000usize)?;
    let res = resolution(ctx, &a.input, &ps, &domain)?;
    let report = uniformity_report(&ps, &domain, res)?;
    let model = ShepardModel::fit_function(ps, &f, kernel.clone(), domain, dilation(ctx, &a.model)?)?;

    let mut rows = Vec::new();
    let ext = scaled_sum_extremes(&model, probes)?;
    rows.push(CheckRow {
        check: "normalizer_lower",
        x: join_point(&ext.min_at),
        value: ext.min,
        bound: kernel.m1(),
        ok: ext.min >= kernel.m1(),
    });
    let mut notes = Vec::new();
    match constant_c_alpha_d(kernel.alpha(), d as u32) {
        Ok(c) => {
            let upper = kernel.kappa() * constant_k_d(d as u32, report.c_sep, model.c_used()) * c.max();
            rows.push(CheckRow {
                check: "normalizer_upper",
                x: join_point(&ext.max_at),
                value: ext.max,
                bound: upper,
                ok: ext.max <= upper,
            });
        }
        Err(e) => notes.push(format!("normalizer upper bound skipped: {e}")),
    }
    let mut budget_json = serde_json::Value::Null;
    let mut modulus_json = serde_json::Value::Null;
    let err = sup_error(&model, &f, probes)?;
    match error_budget(&model, &report) {
        Ok(budget) => {
            let omega = model_modulus(&model, &f)?;
            let bound = budget.bound(omega.value);
            rows.push(CheckRow {
                check: "error_estimate",
                x: join_point(&err.witness),
                value: err.value,
                bound,
                ok: err.value <= bound,
            });
            budget_json = serde_json::to_value(&budget).unwrap_or_default();
            modulus_json = serde_json::to_value(omega).unwrap_or_default();
        }
        Err(e) => notes.push(format!("error estimate skipped: {e}")),
    }
    for note in &notes {
        eprintln!("shepard: {note}");
    }
    if let Some(export) = ctx.cfg.pick(a.export.clone(), "export")? {
        model.export(path.clone())?.write_path(&export)?;
    }
    let failed = rows.iter().filter(|r| !r.ok).count();
    let summary = json!({
        "n": model.len(), "d": d, "kernel": kernel.name(), "function": f,
        "beta_n": model.beta_n(), "C_used": model.c_used(), "sup_error": err.value,
        "uniformity": report, "budget": budget_json, "modulus": modulus_json, "notes": notes,
    });
    ctx.sink.rows("approximate", summary, &rows)?;
    violations(failed)
}

fn converge(ctx: &Ctx, a: &crate::ConvergeArgs) -> Result<(), Failure> {
    let cfg = ctx.cfg;
    let name = cfg.pick_or(a.family, "family", FamilyName::Grid)?;
    let d = match name {
        FamilyName::Hex => 2,
        _ => cfg.pick_or(a.d, "d", 2usize)?,
    };
    let family = match name {
        FamilyName::Grid => PointFamily::Grid { d },
        FamilyName::Hex => PointFamily::Hexagonal,
        FamilyName::Poisson => PointFamily::PoissonDisk { d, seed: ctx.seed },
    };
    let n_list = parse::sizes(&cfg.pick_or(a.n_list.clone(), "n_list", "64,256,1024,4096".to_string())?)?;
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return usage("n_list must be strictly increasing");
    }
    let f_text: Option<String> = cfg.pick(a.model.function.clone(), "function")?;
    let f = parse::function(f_text.as_deref(), d, &family.domain())?;
    let kernel = build_kernel(ctx, &a.model, d)?;
    let options = StudyOptions {
        probes: cfg.pick_or(a.model.probes, "probes", 10_000usize)?,
        dilation: dilation(ctx, &a.model)?,
    };
    let rec = convergence_study(&family, &f, &kernel, &n_list, &options)?;
    let failed = rec.rows.iter().filter(|r| r.ratio > 1.0).count();
    let summary = json!({
        "family": rec.family, "function": rec.function, "kernel": rec.kernel,
        "modulus_kind": rec.modulus_kind, "slope": rec.slope, "slope_defined": rec.slope.is_some(),
    });
    ctx.sink.rows("converge", summary, &rec.rows)?;
    violations(failed)
}

#[derive(Serialize)]
struct ConstantRow {
    constant: &'static str,
    variant: &'static str,
    value: f64,
}

fn constants(ctx: &Ctx, a: &crate::ConstantsArgs) -> Result<(), Failure> {
    let cfg = ctx.cfg;
    let d = cfg.pick_or(a.d, "d", 2u32)?;
    let alpha = cfg.pick_or(a.alpha, "alpha", 3.0)?;
    let c = cfg.pick_or(a.c, "c", 1.0)?;
    let big_c = cfg.pick_or(a.big_c, "C", 1.0)?;
    if d == 0 || !(c > 0.0 && big_c > 0.0) {
        return usage("need d >= 1 and c, C > 0");
    }
    let mut rows = vec![ConstantRow {
        constant: "K_d",
        variant: "closed_form",
        value: constant_k_d(d, c, big_c),
    }];
    let mut notes = Vec::new();
    match constant_c_alpha_d(alpha, d) {
        Ok(p) => {
            rows.push(ConstantRow {
                constant: "C_alpha_d",
                variant: "closed_form",
                value: p.closed,
            });
            rows.push(ConstantRow {
                constant: "C_alpha_d",
                variant: "tight",
                value: p.tight,
            });
        }
        Err(e) => notes.push(e.to_string()),
    }
    match constant_c_star(alpha, d) {
        Ok(p) => {
            rows.push(ConstantRow {
                constant: "C_star_alpha_d",
                variant: "closed_form",
                value: p.closed,
            });
            rows.push(ConstantRow {
                constant: "C_star_alpha_d",
                variant: "tight",
                value: p.tight,
            });
        }
        Err(e) => notes.push(e.to_string()),
    }
    for note in &notes {
        eprintln!("shepard: {note}");
    }
    let summary = json!({ "d": d, "alpha": alpha, "c": c, "C": big_c, "notes": notes });
    ctx.sink.rows("constants", summary, &rows)
}
