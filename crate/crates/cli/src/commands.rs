use crate::{require_file, Failure, FamilyArg, Outcome, PhantomArgs, ProjectArgs, ReconstructArgs};
use anyhow::Context;
use serde_json::json;
use spect_mb::io::{self, RunManifest};
use spect_mb::raytrace::{uniform_angles, uniform_offsets};
use spect_mb::solver::{joint_reconstruct, objective, SolverConfig, Termination, Xi};
use spect_mb::{
    add_gaussian_noise, multibang_project, project_continuum, project_discrete, radial_family, rasterize,
    square_family, AdmissibleSet, Image, PhantomSpec,
};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Collects outputs and writes the run manifest once the command is done.
pub struct Run {
    manifest: RunManifest,
    started: Instant,
}

impl Run {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Run { manifest: RunManifest::new(command, config), started: Instant::now() }
    }

    pub fn input(&mut self, p: &Path) {
        self.manifest.inputs.push(p.to_path_buf());
    }

    pub fn output(&mut self, p: &Path) {
        self.manifest.outputs.push(p.to_path_buf());
    }

    pub fn seed(&mut self, seed: u64) {
        self.manifest.seed = Some(seed);
    }

    pub fn set(&mut self, key: &str, value: serde_json::Value) {
        if let Some(obj) = self.manifest.config.as_object_mut() {
            obj.insert(key.to_string(), value);
        }
    }

    pub fn finish(mut self, path: &Path) -> anyhow::Result<()> {
        self.manifest.wall_clock_s = self.started.elapsed().as_secs_f64();
        self.manifest.write(path).with_context(|| format!("writing {}", path.display()))
    }
}

/// `<file>.manifest.json` next to a single output file.
pub fn manifest_for(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn usage_on_invalid(e: spect_mb::Error) -> Failure {
    match e {
        spect_mb::Error::InvalidArgument(msg) => Failure::Usage(msg),
        other => Failure::Runtime(other.into()),
    }
}

pub fn read_phantom(path: &Path) -> Result<PhantomSpec, Failure> {
    require_file(path)?;
    let spec = io::read_json(path).with_context(|| format!("reading phantom {}", path.display()))?;
    Ok(spec)
}

fn grid_dx(m: usize, width: f64) -> Result<f64, Failure> {
    if m == 0 || !(width > 0.0) {
        return Err(Failure::Usage(format!("need m > 0 and width > 0, got m = {m}, width = {width}")));
    }
    Ok(width / m as f64)
}

pub fn phantom(args: &PhantomArgs) -> Outcome {
    let (name, spec) = match args.family {
        FamilyArg::Radial => ("radial", radial_family(args.c, args.f1, args.f2)),
        FamilyArg::Square => ("square", square_family(args.c, args.f1, args.f2)),
    };
    let mut spec = spec.map_err(usage_on_invalid)?;
    spec.family = Some(format!("{name} c={} f1={} f2={}", args.c, args.f1, args.f2));
    let dx = grid_dx(args.m, args.width)?;
    let raster = rasterize(&spec, args.m, dx)?;
    if let Some(w) = &raster.warning {
        eprintln!("warning: {w}");
    }
    fs::create_dir_all(&args.out)?;
    let mut run = Run::new(
        "phantom",
        json!({ "family": name, "c": args.c, "f1": args.f1, "f2": args.f2, "m": args.m, "width": args.width }),
    );
    let spec_path = args.out.join(format!("{name}.json"));
    io::write_json(&spec_path, &spec)?;
    run.output(&spec_path);
    let mut windows = serde_json::Map::new();
    for (tag, img) in [("a", &raster.a), ("f", &raster.f)] {
        let bin = args.out.join(format!("{name}_{tag}.bin"));
        let pgm = args.out.join(format!("{name}_{tag}.pgm"));
        io::write_image(&bin, img)?;
        let w = io::write_pgm(&pgm, img, args.window)?;
        windows.insert(tag.into(), json!([w.0, w.1]));
        run.output(&bin);
        run.output(&pgm);
    }
    run.set("pgm_window", windows.into());
    run.finish(&args.out.join(format!("{name}.manifest.json")))?;
    println!("wrote {} and {name}_{{a,f}}.{{bin,pgm}} in {}", spec_path.display(), args.out.display());
    Ok(())
}

pub fn project(args: &ProjectArgs) -> Outcome {
    let half_width = args.half_width.unwrap_or(args.width / std::f64::consts::SQRT_2);
    if args.angles == 0 || args.offsets == 0 || !(half_width > 0.0) {
        return Err(Failure::Usage("need at least one angle and offset and a positive half width".into()));
    }
    if !(args.noise >= 0.0) {
        return Err(Failure::Usage(format!("noise level must be >= 0, got {}", args.noise)));
    }
    let angles = uniform_angles(args.angles);
    let offsets = uniform_offsets(args.offsets, half_width);
    let mut run = Run::new(
        "project",
        json!({
            "angles": args.angles, "offsets": args.offsets, "half_width": half_width,
            "noise": args.noise, "m": args.m, "width": args.width,
        }),
    );
    let (clean, backend) = match (&args.phantom, &args.a, &args.f) {
        (Some(p), None, None) => {
            let spec = read_phantom(p)?;
            run.input(p);
            if args.grid {
                let dx = grid_dx(args.m, args.width)?;
                let r = rasterize(&spec, args.m, dx)?;
                (project_discrete(&r.a, &r.f, &angles, &offsets)?, "grid")
            } else {
                (project_continuum(&spec, &angles, &offsets)?, "exact")
            }
        }
        (None, Some(pa), Some(pf)) => {
            if args.exact {
                return Err(Failure::Usage("--exact needs an analytic phantom, not images".into()));
            }
            require_file(pa)?;
            require_file(pf)?;
            let a = io::read_image(pa)?;
            let f = io::read_image(pf)?;
            run.input(pa);
            run.input(pf);
            (project_discrete(&a, &f, &angles, &offsets)?, "grid")
        }
        _ => return Err(Failure::Usage("give either --phantom or both --a and --f".into())),
    };
    run.set("backend", json!(backend));
    let sino = if args.noise > 0.0 {
        run.seed(args.seed);
        add_gaussian_noise(&clean, args.noise, args.seed)?
    } else {
        clean
    };
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    io::write_sinogram(&args.out, &sino)?;
    run.output(&args.out);
    run.finish(&manifest_for(&args.out))?;
    println!("wrote {} ({} x {}, {backend})", args.out.display(), sino.n_angles(), sino.n_offsets());
    Ok(())
}

fn solver_config(args: &ReconstructArgs) -> Result<SolverConfig, Failure> {
    let mut cfg: SolverConfig = match &args.config {
        Some(p) => {
            require_file(p)?;
            io::read_json(p).with_context(|| format!("reading config {}", p.display()))?
        }
        None => SolverConfig::default(),
    };
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = args.eta {
        cfg.eta = v;
    }
    if let Some(v) = args.xi {
        cfg.xi = Xi::Constant(v);
    }
    if let Some(v) = args.max_outer {
        cfg.max_outer = v;
    }
    if let Some(v) = &args.admissible {
        cfg.admissible = AdmissibleSet::new(v.clone()).map_err(usage_on_invalid)?;
    }
    cfg.validate().map_err(usage_on_invalid)?;
    Ok(cfg)
}

pub fn reconstruct(args: &ReconstructArgs) -> Outcome {
    require_file(&args.data)?;
    let cfg = solver_config(args)?;
    let d = io::read_sinogram(&args.data)?;
    let dx = grid_dx(args.m, args.width)?;
    let a0 = match &args.a0 {
        Some(p) => {
            require_file(p)?;
            io::read_image(p)?
        }
        None => Image::new(args.m, dx, 0.0)?,
    };
    let mut run = Run::new("reconstruct", json!({ "m": args.m, "width": args.width, "solver": cfg }));
    run.input(&args.data);
    if let Some(p) = &args.a0 {
        run.input(p);
    }
    if let Some(p) = &args.config {
        run.input(p);
    }
    run.seed(cfg.seed);
    let (a, f, report) = joint_reconstruct(&d, &cfg, &a0)?;
    fs::create_dir_all(&args.out)?;
    let a_mb = multibang_project(&a, &cfg.admissible);
    let mut windows = serde_json::Map::new();
    for (tag, img) in [("a", &a), ("f", &f), ("a_multibang", &a_mb)] {
        let bin = args.out.join(format!("{tag}.bin"));
        let pgm = args.out.join(format!("{tag}.pgm"));
        io::write_image(&bin, img)?;
        let w = io::write_pgm(&pgm, img, args.window)?;
        windows.insert(tag.into(), json!([w.0, w.1]));
        run.output(&bin);
        run.output(&pgm);
    }
    run.set("pgm_window", windows.into());

    let report_path = args.out.join("report.json");
    io::write_json(&report_path, &report)?;
    run.output(&report_path);

    let trace: Vec<Vec<f64>> =
        report.objective_trace.iter().enumerate().map(|(k, v)| vec![k as f64, *v]).collect();
    let trace_path = args.out.join("objective_trace.csv");
    io::write_csv(&trace_path, &["iteration", "objective"], &trace)?;
    run.output(&trace_path);

    let terms = objective(&a, &f, &d, &cfg)?;
    let mut parts = json!({ "total": terms.total, "data": terms.data, "tv_a": terms.tv_a, "tv_f": terms.tv_f });
    if cfg.alpha > 0.0 {
        parts["multibang"] = json!(terms.multibang);
    }
    let terms_path = args.out.join("objective.json");
    io::write_json(&terms_path, &parts)?;
    run.output(&terms_path);
    run.finish(&args.out.join("manifest.json"))?;

    println!(
        "{:?} after {} outer iterations, objective {:.6e}; results in {}",
        report.termination,
        report.outer_iterations,
        report.objective_trace.last().copied().unwrap_or(f64::NAN),
        args.out.display()
    );
    match report.termination {
        Termination::Diverged => Err(Failure::Runtime(anyhow::anyhow!("solver diverged; report written"))),
        _ => Ok(()),
    }
}
