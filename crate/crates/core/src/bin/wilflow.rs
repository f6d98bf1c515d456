use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use wilflow::analysis::{convergence_study, StudyKind};
use wilflow::io::{export_surface_obj, read_curve_csv, write_run_outputs};
use wilflow::{run_simulation, Error, RunConfig};

#[derive(Parser)]
#[command(name = "wilflow", version, about = "Axisymmetric Willmore flow with spontaneous curvature")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the simulation described by a JSON config.
    Run { config: PathBuf },
    /// Convergence study: sphere-linear, sphere-nonlinear or torus.
    Converge {
        kind: String,
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Revolve a curve CSV into a surface mesh.
    ExportObj {
        curve: PathBuf,
        out: PathBuf,
        #[arg(long, default_value_t = 64)]
        segments: usize,
    },
}

fn error_json(e: &Error) -> serde_json::Value {
    let mut v = json!({ "error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() });
    if let Error::Config { field, .. } = e {
        v["field"] = json!(field);
    }
    v
}

fn cmd_run(path: &Path) -> Result<i32, Error> {
    let cfg = RunConfig::from_path(path)?;
    let out_dir = cfg.output_dir.clone().unwrap_or_else(|| {
        let stem = path.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
        PathBuf::from("out").join(stem)
    });
    let out = run_simulation(&cfg)?;
    write_run_outputs(&out_dir, &out)?;
    let summary = json!({
        "output_dir": out_dir,
        "termination": out.termination,
        "final_energy": out.final_energy(),
        "final_stats": out.final_stats,
    });
    if out.termination.is_failure() {
        eprintln!("{summary}");
        return Ok(3);
    }
    println!("{summary}");
    Ok(0)
}

fn cmd_converge(kind: &str, levels: usize, out: Option<PathBuf>) -> Result<i32, Error> {
    let kind: StudyKind = kind.parse()?;
    let table = convergence_study(kind, levels)?;
    let dir = out.unwrap_or_else(|| PathBuf::from(format!("converge_{}", kind.name())));
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("table.csv"), table.to_csv())?;
    std::fs::write(dir.join("table.txt"), table.to_text())?;
    std::fs::write(dir.join("rows.json"), serde_json::to_string_pretty(&table)?)?;
    print!("{}", table.to_text());
    Ok(0)
}

fn cmd_export(curve: &Path, out: &Path, segments: usize) -> Result<i32, Error> {
    let c = read_curve_csv(curve)?;
    export_surface_obj(&c, segments, out)?;
    println!("{}", json!({ "written": out, "nodes": c.num_nodes(), "segments": segments }));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => cmd_run(&config),
        Command::Converge { kind, levels, out } => cmd_converge(&kind, levels, out),
        Command::ExportObj {
            curve,
            out,
            segments,
        } => cmd_export(&curve, &out, segments),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
