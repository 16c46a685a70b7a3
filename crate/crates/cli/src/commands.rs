//! Subcommand implementations. Each returns whether all of its checks passed.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rdlab::entire::EntireSolutionApprox;
use rdlab::evolve::{evolve, Boundary, EvolveOptions, GridField};
use rdlab::experiments::constant::check_pattern;
use rdlab::experiments::{
    constant_convergence, diverging_pair, front_stability, lower_bound_l1, lower_bound_l2, onset_above, pattern_data,
    run_jobs, sandwich_stability, Check, ConvergencePattern, DivergingPairSpec, FrontOrientation, LowerBoundInputs,
    LowerBoundInputs2, PairKind, Perturbation, RunGrid, SandwichSetup, StabilityReport,
};
use rdlab::front::{eigenvalues, fit_tail_constants, solve_front_bistable, solve_front_monostable, FrontProfile};
use rdlab::manifest::{fmt_f64, Manifest};
use rdlab::reaction::{AssumptionClass, CaseTag};
use rdlab::{Error, Result};

use crate::cache::{cache_key, ConstantCache};
use crate::cases::{parse_variant, run_entire, EntireRun};
use crate::config::{case_name, resolve, Purpose, Resolved, RunConfig};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "RDLAB_OUT";

pub fn out_root() -> PathBuf {
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("rdlab-out"))
}

/// `explicit`, or `<root>/<name>`.
pub fn run_dir(explicit: Option<&Path>, name: &str) -> PathBuf {
    explicit.map(Path::to_path_buf).unwrap_or_else(|| out_root().join(name))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_manifest(dir: &Path, command: &str, cfg: &RunConfig) -> Result<()> {
    let mut w = create(dir, "manifest.toml")?;
    writeln!(w, "# rdlab {command}")?;
    w.write_all(cfg.to_toml()?.as_bytes())?;
    Ok(())
}

fn write_checks(dir: &Path, rows: &[(String, &Check)]) -> Result<()> {
    let mut w = create(dir, "checks.csv")?;
    writeln!(w, "scope,check,value,threshold,pass")?;
    for (scope, c) in rows {
        writeln!(w, "{scope},{},{},{},{}", c.name, fmt_f64(c.value), fmt_f64(c.threshold), c.pass)?;
    }
    Ok(())
}

fn write_reports(dir: &Path, reports: &[StabilityReport]) -> Result<()> {
    let mut w = create(dir, "report.csv")?;
    writeln!(w, "{}", StabilityReport::CSV_HEADER)?;
    for r in reports {
        writeln!(w, "{}", r.csv_row())?;
    }
    w.flush()?;
    for (k, r) in reports.iter().enumerate() {
        if !r.series.is_empty() {
            let name = format!("series_{k:03}_{}.csv", sanitize(&r.label));
            r.write_series_csv(create(dir, &name)?)?;
        }
    }
    let rows: Vec<_> = reports.iter().flat_map(|r| r.checks.iter().map(move |c| (format!("{}:{}", r.experiment.id(), r.label), c))).collect();
    write_checks(dir, &rows)
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

fn print_check(scope: &str, c: &Check) {
    println!(
        "{} {scope} {}: {} (threshold {})",
        if c.pass { "PASS" } else { "FAIL" },
        c.name,
        fmt_f64(c.value),
        fmt_f64(c.threshold)
    );
}

fn print_report(r: &StabilityReport) {
    println!(
        "{} {} {}: delta {} fitted rate {} predicted {} final deviation {}",
        if r.pass { "PASS" } else { "FAIL" },
        r.experiment.id(),
        r.label,
        fmt_f64(r.perturbation_size),
        fmt_f64(r.fitted_rate),
        fmt_f64(r.predicted_rate),
        fmt_f64(r.final_deviation)
    );
}

fn increasing_front(r: &Resolved) -> Result<FrontProfile> {
    if r.f.assumption_class() != AssumptionClass::BistableA {
        return Err(Error::Config(format!("this experiment needs a bistable reaction, got {}", r.f.spec())));
    }
    solve_front_bistable(&r.f, 1e-12)
}

fn run_grid(r: &Resolved) -> RunGrid {
    let mut g = RunGrid::new(r.halfwidth, r.dx, r.t_end);
    g.dt = r.dt;
    g.scheme = r.scheme;
    g
}

pub fn cmd_front(cfg: &RunConfig, out: Option<&Path>) -> Result<bool> {
    let r = resolve(cfg, Purpose::Front)?;
    let mut config = r.config.clone();
    let p = match r.f.assumption_class() {
        AssumptionClass::BistableA => {
            if cfg.experiment.speed.is_some() {
                return Err(Error::Config("the speed of a bistable front is determined by f; drop --speed".into()));
            }
            solve_front_bistable(&r.f, 1e-12)?
        }
        AssumptionClass::MonostableAPrime => {
            let c = cfg.experiment.speed.or(r.f.c_min()).unwrap_or(0.0);
            config.experiment.speed = Some(c);
            solve_front_monostable(&r.f, c)?
        }
    };
    let dir = run_dir(out, "front");
    p.write_csv(create(&dir, "profile.csv")?)?;
    let mut m = Manifest::new();
    m.set("reaction", r.f.spec());
    m.set("case", case_name(r.case));
    m.set_f64("integral", r.f.integral());
    m.set_f64("c", p.c());
    if let Some(cm) = r.f.c_min() {
        m.set_f64("c_min", cm);
    }
    let e = eigenvalues(&r.f, p.c())?;
    m.set_f64("lambda1", e.lambda1);
    m.set_f64("lambda2", e.lambda2);
    m.set_f64("mu1", e.mu1);
    m.set_f64("mu2", e.mu2);
    if let Ok(t) = fit_tail_constants(&p, &e) {
        m.set_f64("m3", t.m3);
        m.set_f64("m3_tilde", t.m3_tilde);
        m.set_f64("m4", t.m4);
        m.set_f64("m4_tilde", t.m4_tilde);
    }
    m.set_f64("ode_residual", p.ode_residual(&r.f));
    m.write(&dir.join("report.txt"))?;
    write_manifest(&dir, "front", &config)?;
    println!("c = {}", fmt_f64(p.c()));
    println!("wrote {}", dir.display());
    Ok(true)
}

enum Init {
    Front,
    Bump(f64, f64),
    Constant(f64),
}

fn parse_init(s: &str) -> Result<Init> {
    let bad = || Error::Config(format!("unknown init '{s}' (front | bump:h,L | constant:v)"));
    if s == "front" {
        return Ok(Init::Front);
    }
    let (name, body) = s.split_once(':').ok_or_else(bad)?;
    let nums: Vec<f64> = body.split(',').map(|t| t.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
    match (name, nums.as_slice()) {
        ("bump", [h, l]) if (0.0..=1.0).contains(h) && *l > 0.0 => Ok(Init::Bump(*h, *l)),
        ("constant", [v]) if (0.0..=1.0).contains(v) => Ok(Init::Constant(*v)),
        _ => Err(bad()),
    }
}

pub fn cmd_evolve(cfg: &RunConfig, out: Option<&Path>) -> Result<bool> {
    let mut cfg = cfg.clone();
    let default_init = if cfg.reaction.as_deref().map(|s| s.starts_with("fisher")).unwrap_or(false) { "bump:1,2" } else { "front" };
    let init_spec = cfg.experiment.init.clone().unwrap_or_else(|| default_init.to_string());
    let init = parse_init(&init_spec)?;
    if cfg.grid.boundary.is_none() {
        cfg.grid.boundary = Some(if matches!(init, Init::Front) { "dirichlet_envelope" } else { "neumann" }.into());
    }
    cfg.experiment.init = Some(init_spec);
    let r = resolve(&cfg, Purpose::Evolve)?;
    let dirichlet = r.config.grid.boundary.as_deref() == Some("dirichlet_envelope");
    let (u0, boundary) = match init {
        Init::Front => {
            let p = Arc::new(increasing_front(&r)?);
            let u0 = GridField::symmetric(r.halfwidth, r.dx, 0.0, |x| p.eval(x))?;
            let b = if dirichlet { Boundary::Dirichlet(Arc::new(move |x, t| p.wave(x, t))) } else { Boundary::Neumann };
            (u0, b)
        }
        Init::Bump(h, l) => {
            if dirichlet {
                return Err(Error::Config("dirichlet_envelope needs init = front; use neumann".into()));
            }
            (GridField::symmetric(r.halfwidth, r.dx, 0.0, |x| if x.abs() <= l { h } else { 0.0 })?, Boundary::Neumann)
        }
        Init::Constant(v) => {
            if dirichlet {
                return Err(Error::Config("dirichlet_envelope needs init = front; use neumann".into()));
            }
            (GridField::symmetric(r.halfwidth, r.dx, 0.0, |_| v)?, Boundary::Neumann)
        }
    };
    let mut opts = EvolveOptions::every(0.0, r.t_end, 0.5).with_scheme(r.scheme).with_boundary(boundary);
    opts.dt = r.dt;
    let tr = evolve(&u0, &r.f, r.t_end, &opts)?;
    let dir = run_dir(out, "evolve");
    let snaps = dir.join("snapshots");
    fs::create_dir_all(&snaps)?;
    let mut norms = create(&dir, "norms.csv")?;
    writeln!(norms, "t,min,max")?;
    for (k, s) in tr.snapshots.iter().enumerate() {
        s.write_binary(BufWriter::new(File::create(snaps.join(format!("snap_{k:05}.bin")))?))?;
        let (lo, hi) = s.u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        writeln!(norms, "{},{},{}", fmt_f64(s.t), fmt_f64(lo), fmt_f64(hi))?;
    }
    norms.flush()?;
    tr.last().write_csv(create(&dir, "final.csv")?)?;
    write_manifest(&dir, "evolve", &r.config)?;
    println!("{} snapshots to t = {}", tr.snapshots.len(), fmt_f64(tr.last().t));
    println!("wrote {}", dir.display());
    Ok(true)
}

/// Entire solution of the resolved case, with constants from the config,
/// then the cache, then calibration.
fn entire_for(r: &Resolved, cfg: &RunConfig, root: &Path) -> Result<(EntireRun, RunConfig)> {
    let cache = ConstantCache::new(root);
    let key = cache_key(r);
    let mut given = cfg.constants.clone();
    if let Some(cached) = cache.load(&key)? {
        given.fill_from(&cached);
    }
    let variant = parse_variant(cfg.experiment.variant.as_deref())?;
    let run = run_entire(r, &given, variant)?;
    cache.store(&key, &run.constants)?;
    let mut config = r.config.clone();
    config.constants = run.constants.clone();
    Ok((run, config))
}

fn save_entire(dir: &Path, a: &EntireSolutionApprox, run: &EntireRun) -> Result<()> {
    let mut extra = run.diagnostics.clone();
    for c in &run.checks {
        extra.set_f64(&format!("check.{}", c.name), c.value);
        extra.set_bool(&format!("check.{}.pass", c.name), c.pass);
    }
    extra.set_bool("pass", run.pass());
    a.save(&dir.join("solution"), &extra)
}

pub fn cmd_entire(cfg: &RunConfig, out: Option<&Path>) -> Result<bool> {
    let r = resolve(cfg, Purpose::Entire)?;
    let dir = run_dir(out, "entire");
    let (run, config) = entire_for(&r, cfg, &out_root())?;
    save_entire(&dir, &run.approx, &run)?;
    let scope = format!("entire:{}", case_name(r.case));
    write_checks(&dir, &run.checks.iter().map(|c| (scope.clone(), c)).collect::<Vec<_>>())?;
    write_manifest(&dir, "entire", &config)?;
    for c in &run.checks {
        print_check(&scope, c);
    }
    println!("wrote {}", dir.display());
    Ok(run.pass())
}

fn orientations(s: Option<&str>) -> Result<Vec<FrontOrientation>> {
    match s.unwrap_or("both") {
        "forward" => Ok(vec![FrontOrientation::Forward]),
        "reflected" => Ok(vec![FrontOrientation::Reflected]),
        "both" => Ok(vec![FrontOrientation::Forward, FrontOrientation::Reflected]),
        other => Err(Error::Config(format!("unknown orientation '{other}' (forward | reflected | both)"))),
    }
}

fn patterns(s: Option<&str>) -> Result<Option<Vec<ConvergencePattern>>> {
    match s.unwrap_or("all") {
        "all" => Ok(None),
        name => ConvergencePattern::ALL
            .iter()
            .find(|p| p.id() == name)
            .map(|p| Some(vec![*p]))
            .ok_or_else(|| Error::Config(format!("unknown pattern '{name}'"))),
    }
}

fn pair_kind(p: &FrontProfile) -> PairKind {
    if p.c() > 0.0 {
        PairKind::Bump
    } else {
        PairKind::Dip
    }
}

pub fn cmd_stability(cfg: &RunConfig, out: Option<&Path>) -> Result<bool> {
    let mut cfg = cfg.clone();
    let kind = cfg.experiment.kind.clone().unwrap_or_else(|| "front".into());
    cfg.experiment.kind = Some(kind.clone());
    let r = resolve(&cfg, Purpose::Stability)?;
    let mut config = r.config.clone();
    let dir = run_dir(out, &format!("stability-{kind}"));
    let grid = run_grid(&r);
    let mut reports = Vec::new();
    match kind.as_str() {
        "front" => {
            let p = increasing_front(&r)?;
            let delta = cfg.experiment.delta.unwrap_or(0.05);
            config.experiment.delta = Some(delta);
            let pert = Perturbation::seeded(delta, r.seed);
            for o in orientations(cfg.experiment.orientation.as_deref())? {
                reports.push(front_stability(&r.f, &p, o, pert, &grid)?);
            }
        }
        "constant" => {
            let chosen = patterns(cfg.experiment.pattern.as_deref())?;
            let explicit = chosen.is_some();
            for which in chosen.unwrap_or_else(|| ConvergencePattern::ALL.to_vec()) {
                let u0 = pattern_data(&r.f, which, &grid)?;
                if !explicit && check_pattern(&r.f, &u0, which).is_err() {
                    println!("skip {}: hypotheses do not hold for {}", which.id(), r.f.spec());
                    continue;
                }
                reports.push(constant_convergence(&r.f, &u0, which, &grid)?);
            }
        }
        "diverging" => {
            let p = increasing_front(&r)?;
            let margin = cfg.experiment.margin.unwrap_or(0.1);
            let half_width = cfg.experiment.half_width.unwrap_or(30.0);
            config.experiment.margin = Some(margin);
            config.experiment.half_width = Some(half_width);
            let kind = pair_kind(&p);
            for (l, expect) in [(half_width, true), (0.5, false)] {
                let spec = DivergingPairSpec { kind, margin, half_width: l };
                let rep = diverging_pair(&r.f, &p, &spec, &grid, expect)?;
                let mut s = rep.stability;
                s.label = format!("{:?}-L{}-{:?}", kind, l, rep.outcome);
                s.pass = rep.pass;
                reports.push(s);
            }
        }
        "sandwich" => {
            let (run, with_constants) = entire_for(&r, &cfg, &out_root())?;
            config.constants = with_constants.constants;
            let delta = cfg.experiment.delta.unwrap_or(0.02);
            let mut setup = SandwichSetup::new(delta, run.direction);
            setup.seed = r.seed;
            setup.start = match (cfg.experiment.start, r.case) {
                (Some(s), _) => s,
                (None, Some(CaseTag::Monostable)) => onset_above(&run.approx, run.sc.theta)
                    .ok_or_else(|| Error::Precondition("the entire solution never exceeds θ everywhere".into()))?,
                (None, _) => 0.0,
            };
            setup.horizon = cfg.experiment.span.unwrap_or(if r.case == Some(CaseTag::Monostable) { 10.0 } else { 30.0 });
            config.experiment.delta = Some(delta);
            config.experiment.start = Some(setup.start);
            config.experiment.span = Some(setup.horizon);
            let rep = sandwich_stability(&r.f, &run.approx, &run.sc, &setup, run.bound)?;
            println!(
                "sandwich: violation {} onset {} bound excess {}",
                fmt_f64(rep.sandwich_violation),
                fmt_f64(rep.bound_onset),
                fmt_f64(rep.bound_excess)
            );
            reports.push(rep.stability);
        }
        "lower-bound" => return lower_bound(&r, &cfg, &dir, config),
        other => {
            return Err(Error::Config(format!(
                "unknown experiment '{other}' (front | constant | diverging | sandwich | lower-bound)"
            )))
        }
    }
    write_reports(&dir, &reports)?;
    write_manifest(&dir, "stability", &config)?;
    for rep in &reports {
        print_report(rep);
    }
    println!("wrote {}", dir.display());
    Ok(!reports.is_empty() && reports.iter().all(|x| x.pass))
}

fn lower_bound(r: &Resolved, cfg: &RunConfig, dir: &Path, mut config: RunConfig) -> Result<bool> {
    let p = increasing_front(r)?;
    let e = eigenvalues(&r.f, p.c())?;
    let tails = fit_tail_constants(&p, &e)?;
    let margin = cfg.experiment.margin.unwrap_or(0.1);
    config.experiment.margin = Some(margin);
    let b = if p.c() > 0.0 {
        lower_bound_l1(&LowerBoundInputs::with_defaults(&r.f, &r.sc, p.c(), &e, &tails, margin)?)?
    } else {
        lower_bound_l2(&LowerBoundInputs2::with_defaults(&r.f, &r.sc, p.c(), &e, &tails, margin)?)?
    };
    let mut w = create(dir, "lower_bound.csv")?;
    writeln!(w, "margin,mu_tilde_2,m_bar,phi0,bound")?;
    writeln!(w, "{},{},{},{},{}", fmt_f64(margin), fmt_f64(b.mu_tilde_2), fmt_f64(b.m_bar), fmt_f64(b.phi0), fmt_f64(b.bound))?;
    w.flush()?;
    write_manifest(dir, "stability", &config)?;
    println!("half-width lower bound {} (margin {})", fmt_f64(b.bound), fmt_f64(margin));
    println!("wrote {}", dir.display());
    Ok(true)
}

pub fn cmd_sweep(cfg: &RunConfig, out: Option<&Path>) -> Result<bool> {
    let mut cfg = cfg.clone();
    let kind = cfg.experiment.kind.clone().unwrap_or_else(|| "front".into());
    cfg.experiment.kind = Some(kind.clone());
    let r = resolve(&cfg, Purpose::Stability)?;
    let mut config = r.config.clone();
    let dir = run_dir(out, &format!("sweep-{kind}"));
    let grid = run_grid(&r);
    let p = Arc::new(increasing_front(&r)?);
    let f = Arc::new(r.f.clone());
    type Job = Box<dyn FnOnce() -> Result<StabilityReport> + Send>;
    let mut jobs: Vec<Job> = Vec::new();
    match kind.as_str() {
        "front" => {
            let deltas = cfg.experiment.deltas.clone().unwrap_or_else(|| vec![0.01, 0.02, 0.05]);
            let seeds = cfg.experiment.seeds.unwrap_or(3);
            config.experiment.deltas = Some(deltas.clone());
            config.experiment.seeds = Some(seeds);
            let orient = orientations(cfg.experiment.orientation.as_deref())?;
            for &d in &deltas {
                for s in 0..seeds {
                    for &o in &orient {
                        let (f, p, g) = (Arc::clone(&f), Arc::clone(&p), grid.clone());
                        let seed = r.seed + s;
                        jobs.push(Box::new(move || {
                            let mut rep = front_stability(&f, &p, o, Perturbation::seeded(d, seed), &g)?;
                            rep.label = format!("{}-seed{seed}", rep.label);
                            Ok(rep)
                        }));
                    }
                }
            }
        }
        "diverging" => {
            let widths = cfg.experiment.half_widths.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0, 4.0, 8.0]);
            let margin = cfg.experiment.margin.unwrap_or(0.1);
            config.experiment.half_widths = Some(widths.clone());
            config.experiment.margin = Some(margin);
            let kind = pair_kind(&p);
            for &l in &widths {
                let (f, p, g) = (Arc::clone(&f), Arc::clone(&p), grid.clone());
                jobs.push(Box::new(move || {
                    let spec = DivergingPairSpec { kind, margin, half_width: l };
                    let rep = diverging_pair(&f, &p, &spec, &g, true)?;
                    let mut s = rep.stability;
                    s.label = format!("{:?}-L{}-{:?}", kind, l, rep.outcome);
                    // a sweep only asks that each width reach a verdict
                    s.pass = rep.outcome != rdlab::experiments::PairOutcome::Undecided;
                    Ok(s)
                }));
            }
        }
        other => return Err(Error::Config(format!("unknown sweep experiment '{other}' (front | diverging)"))),
    }
    let reports = run_jobs(jobs).into_iter().collect::<Result<Vec<_>>>()?;
    write_reports(&dir, &reports)?;
    write_manifest(&dir, "sweep", &config)?;
    for rep in &reports {
        print_report(rep);
    }
    println!("wrote {}", dir.display());
    Ok(!reports.is_empty() && reports.iter().all(|x| x.pass))
}

fn collect_csv(dir: &Path, acc: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<_> = fs::read_dir(dir)?.collect::<std::io::Result<Vec<_>>>()?;
    entries.sort_by_key(|e| e.path());
    for e in entries {
        let p = e.path();
        if p.is_dir() {
            collect_csv(&p, acc)?;
        } else if matches!(p.file_name().and_then(|n| n.to_str()), Some("report.csv" | "checks.csv")) {
            acc.push(p);
        }
    }
    Ok(())
}

/// Summarizes every `report.csv` and `checks.csv` under `dir`.
pub fn cmd_report(dir: &Path) -> Result<bool> {
    if !dir.is_dir() {
        return Err(Error::Config(format!("{} is not a directory", dir.display())));
    }
    let mut files = Vec::new();
    collect_csv(dir, &mut files)?;
    if files.is_empty() {
        return Err(Error::InsufficientData(format!("no report.csv or checks.csv under {}", dir.display())));
    }
    let mut all = true;
    for file in &files {
        let text = fs::read_to_string(file)?;
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        let col = header
            .split(',')
            .position(|h| h == "pass")
            .ok_or_else(|| Error::Parse(format!("{}: no pass column", file.display())))?;
        let (mut n, mut failing) = (0, Vec::new());
        for line in lines.filter(|l| !l.trim().is_empty()) {
            n += 1;
            let cells: Vec<&str> = line.split(',').collect();
            if cells.get(col).map(|c| c.trim()) != Some("true") {
                failing.push(line.to_string());
            }
        }
        all &= failing.is_empty() && n > 0;
        println!("{}: {n} rows, {} failing", file.display(), failing.len());
        for l in failing {
            println!("  FAIL {l}");
        }
    }
    Ok(all)
}
