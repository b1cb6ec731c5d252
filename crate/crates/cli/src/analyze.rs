use crate::commands::{manifest_for, read_phantom, Run};
use crate::{parse_pair, Failure, Outcome};
use clap::{Args, Subcommand, ValueEnum};
use serde_json::json;
use spect_mb::io;
use spect_mb::singularity::{
    analytic_tangent_j, check_cancellation, edge_jump_profile, numeric_j, recover_delta_a_tangent,
    scan_edge_jumps_along_line, solve_cancellation, sweep_transform, Family, FixedParams, LimitOptions,
    ScanOptions,
};
use spect_mb::{boundary_atlas, tangent_info, DirectedLine, Point};
use std::path::{Path, PathBuf};

#[derive(Subcommand)]
pub enum AnalyzeCommand {
    /// Transform values and angular derivatives about a fixed point (CSV).
    Sweep(SweepArgs),
    /// Leading singular coefficient at the two tangencies from a point to a circle.
    TangentJ(TangentArgs),
    /// Jump of the data across the direction of a segment, along the segment (CSV).
    EdgeProfile(EdgeProfileArgs),
    /// Locates the jumps of the attenuation along a line containing flat edges.
    EdgeScan(EdgeScanArgs),
    /// Parameter value at which the leading singularity cancels.
    CancelSolve(CancelArgs),
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub phantom: PathBuf,
    /// Fixed point `x,y`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub x: (f64, f64),
    /// Angle range `lo,hi` in radians.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub range: (f64, f64),
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, short, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct TangentArgs {
    #[arg(long)]
    pub phantom: PathBuf,
    /// Probe point `x,y`, strictly outside the circle.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub x: (f64, f64),
    /// Index of the circle in the boundary atlas.
    #[arg(long, default_value_t = 0)]
    pub arc: usize,
    #[arg(long, short, default_value = "tangent_j.json")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct EdgeProfileArgs {
    #[arg(long)]
    pub phantom: PathBuf,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub from: (f64, f64),
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub to: (f64, f64),
    #[arg(long, default_value_t = 71)]
    pub n: usize,
    #[arg(long, short, default_value = "edge_profile.csv")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct EdgeScanArgs {
    #[arg(long)]
    pub phantom: PathBuf,
    /// A point on the line, `x,y`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub point: (f64, f64),
    /// Direction of the line in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub omega: f64,
    /// Scan grid spacing along the line.
    #[arg(long, default_value_t = 0.01)]
    pub spacing: f64,
    #[arg(long, short, default_value = "edge_scan.json")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Radial,
    Edge,
}

#[derive(Args)]
pub struct CancelArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Give exactly two of c, f1, f2; the third is solved for.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub f1: Option<f64>,
    #[arg(long)]
    pub f2: Option<f64>,
    /// Search interval `lo,hi` for the free parameter.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub bracket: Option<(f64, f64)>,
    #[arg(long, short, default_value = "cancel.json")]
    pub out: PathBuf,
}

pub fn run(cmd: &AnalyzeCommand) -> Outcome {
    match cmd {
        AnalyzeCommand::Sweep(a) => sweep(a),
        AnalyzeCommand::TangentJ(a) => tangent(a),
        AnalyzeCommand::EdgeProfile(a) => edge_profile(a),
        AnalyzeCommand::EdgeScan(a) => edge_scan(a),
        AnalyzeCommand::CancelSolve(a) => cancel(a),
    }
}

fn point((x, y): (f64, f64)) -> Point {
    Point::new(x, y)
}

fn finish(run: Run, out: &Path) -> Outcome {
    run.finish(&manifest_for(out))?;
    println!("wrote {}", out.display());
    Ok(())
}

fn sweep(args: &SweepArgs) -> Outcome {
    let spec = read_phantom(&args.phantom)?;
    let curve = sweep_transform(&spec, point(args.x), args.range, args.n)?;
    let rows: Vec<Vec<f64>> =
        (0..curve.omegas.len()).map(|i| vec![curve.omegas[i], curve.values[i], curve.d1[i]]).collect();
    io::write_csv(&args.out, &["omega", "value", "d_omega"], &rows)?;
    let mut run = Run::new("analyze sweep", json!({ "x": args.x, "range": args.range, "n": args.n }));
    run.input(&args.phantom);
    run.output(&args.out);
    finish(run, &args.out)
}

fn tangent(args: &TangentArgs) -> Outcome {
    let spec = read_phantom(&args.phantom)?;
    let atlas = boundary_atlas(&spec)?;
    let x = point(args.x);
    let opts = LimitOptions::default();
    let mut entries = Vec::new();
    for info in tangent_info(&atlas, x, args.arc)? {
        let analytic = analytic_tangent_j(&info, &spec)?;
        let singular = numeric_j(&spec, x, info.omega_star, info.s, &opts)?;
        let regular = numeric_j(&spec, x, info.omega_star, -info.s, &opts)?;
        let check = check_cancellation(&spec, info.x_star, info.omega_star)?;
        let jump = match recover_delta_a_tangent(&spec, x, info.omega_star, info.s, &info, &opts) {
            Ok(e) => json!({ "delta_plus_a": e.delta_plus_a, "second_limit": e.second_limit }),
            Err(e) => json!({ "error": e.to_string() }),
        };
        println!(
            "omega* = {:.6}: J numeric {:.6e} (residual {:.1e}), analytic {:.6e}, cancelling: {}",
            info.omega_star, singular.value, singular.residual, analytic, check.is_cancelling
        );
        entries.push(json!({
            "tangency": info,
            "j_numeric": singular.value,
            "j_residual": singular.residual,
            "j_analytic": analytic,
            "j_opposite_side": regular.value,
            "cancellation": check,
            "jump_recovery": jump,
        }));
    }
    io::write_json(&args.out, &entries)?;
    let mut run = Run::new("analyze tangent-j", json!({ "x": args.x, "arc": args.arc, "limits": opts }));
    run.input(&args.phantom);
    run.output(&args.out);
    finish(run, &args.out)
}

fn edge_profile(args: &EdgeProfileArgs) -> Outcome {
    let spec = read_phantom(&args.phantom)?;
    let opts = LimitOptions::default();
    let prof = edge_jump_profile(&spec, point(args.from), point(args.to), args.n, &opts)?;
    let rows: Vec<Vec<f64>> = prof.iter().map(|&(l, j)| vec![l, j]).collect();
    io::write_csv(&args.out, &["l", "jump"], &rows)?;
    let mut run = Run::new("analyze edge-profile", json!({ "from": args.from, "to": args.to, "n": args.n, "limits": opts }));
    run.input(&args.phantom);
    run.output(&args.out);
    finish(run, &args.out)
}

fn edge_scan(args: &EdgeScanArgs) -> Outcome {
    let spec = read_phantom(&args.phantom)?;
    let line = DirectedLine::new(point(args.point), args.omega);
    let opts = ScanOptions { spacing: args.spacing, ..ScanOptions::default() };
    let state = scan_edge_jumps_along_line(&spec, &line, &opts)?;
    for &(lo, hi, v) in &state.delta_a_current.pieces {
        println!("jump of a across the line on l in [{lo:.4}, {hi:.4}]: {:.4}", -v);
    }
    io::write_json(&args.out, &state)?;
    let mut run = Run::new("analyze edge-scan", json!({ "point": args.point, "omega": args.omega, "scan": opts }));
    run.input(&args.phantom);
    run.output(&args.out);
    finish(run, &args.out)
}

fn cancel(args: &CancelArgs) -> Outcome {
    let fixed = FixedParams { c: args.c, f1: args.f1, f2: args.f2 };
    let free = [("c", args.c), ("f1", args.f1), ("f2", args.f2)];
    let free: Vec<&str> = free.iter().filter(|(_, v)| v.is_none()).map(|(n, _)| *n).collect();
    if free.len() != 1 {
        return Err(Failure::Usage("give exactly two of --c, --f1, --f2".into()));
    }
    let family = match args.family {
        FamilyArg::Radial => Family::Radial,
        FamilyArg::Edge => Family::Edge,
    };
    let bracket = args.bracket.unwrap_or((1e-3, 10.0));
    let root = solve_cancellation(family, fixed, bracket)?;
    println!("{} = {root:.10}", free[0]);
    io::write_json(&args.out, &json!({ "family": family, "fixed": fixed, "free": free[0], "root": root }))?;
    let mut run = Run::new("analyze cancel-solve", json!({ "family": family, "fixed": fixed, "bracket": bracket }));
    run.output(&args.out);
    finish(run, &args.out)
}
