//! `transversal` — plan routes across implicit hypersurfaces, certify
//! semi-transversality, run randomized verification sweeps, and render
//! planar scenes to SVG.
//!
//! Exit codes: 0 success/pass, 1 failing verdict or failing sweep,
//! 2 usage, parse, or configuration errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};

use transversal::harness::{run_campaign, CampaignConfig};
use transversal::planners::Query;
use transversal::scene::{PathDocument, Scene};
use transversal::transversality::{certify_semi_transversal, DetectionConfig, Verdict};
use transversal::Point;

mod render;

#[derive(Parser)]
#[command(
    name = "transversal",
    version,
    about = "Transversal motion planning: plan, certify, sweep, render"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a query in a scene, certify the route, and optionally save it.
    Plan {
        /// Scene description (JSON).
        #[arg(long)]
        scene: PathBuf,
        /// Start configuration, e.g. "-4,-1".
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        /// Goal configuration, e.g. "3,0".
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        /// Write the planned route as a path document (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Render the scene and route to SVG (planar scenes only).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Certify a saved route against a scene's surface.
    Verify {
        #[arg(long)]
        scene: PathBuf,
        /// Path document (JSON) to certify.
        #[arg(long)]
        path: PathBuf,
    },
    /// Run a seeded randomized verification campaign.
    Sweep {
        #[arg(long)]
        scene: PathBuf,
        /// Number of queries (pinned fixtures first, then random).
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Per-axis sampling range "lo,hi".
        #[arg(long = "box", default_value = "-10,10", allow_hyphen_values = true)]
        bounds: String,
        /// Write the campaign report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a saved route: SVG for planar scenes, CSV polyline otherwise.
    Render {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Sample count for CSV polylines.
        #[arg(long, default_value_t = 129)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Plan {
            scene,
            from,
            to,
            out,
            svg,
        } => cmd_plan(&scene, &from, &to, out.as_deref(), svg.as_deref()),
        Command::Verify { scene, path } => cmd_verify(&scene, &path),
        Command::Sweep {
            scene,
            n,
            seed,
            bounds,
            out,
        } => cmd_sweep(&scene, n, seed, &bounds, out.as_deref()),
        Command::Render {
            scene,
            path,
            out,
            samples,
        } => cmd_render(&scene, &path, &out, samples),
    }
}

fn load_scene(path: &Path) -> Result<Scene> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading scene file {}", path.display()))?;
    Scene::from_json(&text).with_context(|| format!("parsing scene file {}", path.display()))
}

fn parse_point(text: &str, what: &str) -> Result<Point> {
    let coords = text
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<f64>, _>>()
        .with_context(|| format!("parsing {what} coordinates {text:?}"))?;
    Point::new(coords).map_err(|e| anyhow!("{what}: {e}"))
}

fn print_verdict(verdict: &Verdict) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(verdict)?);
    Ok(())
}

fn verdict_exit(verdict: &Verdict) -> ExitCode {
    if verdict.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_plan(
    scene_path: &Path,
    from: &str,
    to: &str,
    out: Option<&Path>,
    svg: Option<&Path>,
) -> Result<ExitCode> {
    let scene = load_scene(scene_path)?;
    let (planner, surface) = scene.build()?;
    let query = Query::new(parse_point(from, "--from")?, parse_point(to, "--to")?)
        .map_err(|e| anyhow!("{e}"))?;
    let (domain, path) = planner.plan_with_domain(&query).map_err(|e| anyhow!("{e}"))?;
    let verdict = certify_semi_transversal(&path, &surface, &DetectionConfig::default())?;

    if let Some(out) = out {
        fs::write(out, PathDocument::from_path(&path).to_json())
            .with_context(|| format!("writing path to {}", out.display()))?;
    }
    if let Some(svg_path) = svg {
        if scene.dimension != 2 {
            return Err(anyhow!(
                "SVG rendering requires a 2-dimensional scene (got dimension {})",
                scene.dimension
            ));
        }
        fs::write(svg_path, render::render_svg(&surface, &path, &verdict.events))
            .with_context(|| format!("writing SVG to {}", svg_path.display()))?;
    }

    eprintln!(
        "planner {} dispatched domain {domain}; {} event(s)",
        planner.name(),
        verdict.events.len()
    );
    print_verdict(&verdict)?;
    Ok(verdict_exit(&verdict))
}

fn cmd_verify(scene_path: &Path, path_file: &Path) -> Result<ExitCode> {
    let scene = load_scene(scene_path)?;
    let (_, surface) = scene.build()?;
    let text = fs::read_to_string(path_file)
        .with_context(|| format!("reading path file {}", path_file.display()))?;
    let path = PathDocument::from_json(&text)
        .and_then(|doc| doc.to_path())
        .with_context(|| format!("parsing path file {}", path_file.display()))?;
    let verdict = certify_semi_transversal(&path, &surface, &DetectionConfig::default())
        .map_err(|e| anyhow!("{e}"))?;
    print_verdict(&verdict)?;
    Ok(verdict_exit(&verdict))
}

fn cmd_sweep(
    scene_path: &Path,
    n: usize,
    seed: u64,
    bounds: &str,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let scene = load_scene(scene_path)?;
    let (planner, surface) = scene.build()?;
    let range = parse_point(bounds, "--box")?;
    if range.dim() != 2 {
        return Err(anyhow!("--box expects \"lo,hi\", got {bounds:?}"));
    }
    let cfg = CampaignConfig::cube(n, seed, scene.dimension, range[0], range[1]);
    let report = run_campaign(&planner, &surface, &cfg).map_err(|e| anyhow!("{e}"))?;
    let text = serde_json::to_string_pretty(&report)?;
    match out {
        Some(out) => {
            fs::write(out, &text).with_context(|| format!("writing report to {}", out.display()))?;
            eprintln!(
                "{}: {} pass, {} fail, {} oracle mismatch(es); report at {}",
                report.planner,
                report.n_pass,
                report.n_fail,
                report.oracle_mismatches.len(),
                out.display()
            );
        }
        None => println!("{text}"),
    }
    if report.n_fail > 0 || !report.oracle_mismatches.is_empty() {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_render(scene_path: &Path, path_file: &Path, out: &Path, samples: usize) -> Result<ExitCode> {
    let scene = load_scene(scene_path)?;
    let (_, surface) = scene.build()?;
    let text = fs::read_to_string(path_file)
        .with_context(|| format!("reading path file {}", path_file.display()))?;
    let path = PathDocument::from_json(&text)
        .and_then(|doc| doc.to_path())
        .with_context(|| format!("parsing path file {}", path_file.display()))?;
    if path.dimension() != scene.dimension {
        return Err(anyhow!(
            "path dimension {} does not match scene dimension {}",
            path.dimension(),
            scene.dimension
        ));
    }
    let rendered = if scene.dimension == 2 {
        let verdict = certify_semi_transversal(&path, &surface, &DetectionConfig::default())?;
        render::render_svg(&surface, &path, &verdict.events)
    } else {
        render::polyline_csv(&path, samples)
    };
    fs::write(out, rendered).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}
