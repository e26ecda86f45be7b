use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use trefftz_fem::bench::{run_benchmark, BenchOptions, CASES, TAPERED_BEAM};
use trefftz_fem::membrane_element::MembraneMaterial;
use trefftz_fem::meshgen::{MembraneSetup, MeshSpec, PlateLoad, PlateSetup, Support};
use trefftz_fem::model::{prepare, Model, Storage};
use trefftz_fem::output::{
    displacements_csv, eigenvalues_csv, element_forces, field_csv, forces_csv, sample_plate_field, ForceFrame,
};
use trefftz_fem::plate_elements::{PlateMaterial, PlateVariant};
use trefftz_fem::solver::{solve_eigen, solve_static};
use trefftz_fem::{FemError, Result};

#[derive(Parser)]
#[command(name = "trefftz-fem", version, about = "Trefftz-type plate, membrane and frame finite elements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark case and compare it with the reference values.
    Bench {
        /// Case id; omit to list the catalog.
        case: Option<String>,
        #[arg(long, value_parser = parse_variant)]
        variant: Option<PlateVariant>,
        /// Single mesh, `N` or `NxN`; for circular cases the ring count.
        #[arg(long, value_parser = parse_mesh)]
        mesh: Option<usize>,
        /// Gauss points per direction.
        #[arg(long)]
        quad: Option<usize>,
        /// Directory for the CSV and JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a model file and write displacement, force and eigenvalue tables.
    Solve {
        model: PathBuf,
        #[arg(long, value_parser = parse_variant)]
        variant: Option<PlateVariant>,
        /// Number of eigenpairs to compute.
        #[arg(long)]
        eigs: Option<usize>,
        /// Frame of the element forces; both when omitted.
        #[arg(long, value_enum)]
        frame: Option<FrameArg>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Generate a model file from a mesh preset.
    Mesh {
        #[arg(value_enum)]
        preset: Preset,
        /// Overrides of the preset parameters as `key=value`; nested keys use
        /// dots, e.g. `setup.variant=tfeq`.
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a plate model and sample deflection and moments on each element.
    ExportField {
        model: PathBuf,
        #[arg(long, value_parser = parse_variant)]
        variant: Option<PlateVariant>,
        #[arg(long, default_value_t = 11)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Global,
    Local,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Square,
    Rect,
    Rhombic,
    Circular,
    Trapezoid,
    Strip,
    MembraneBeam,
    Cook,
}

fn parse_variant(s: &str) -> std::result::Result<PlateVariant, String> {
    serde_json::from_value(Value::String(s.to_ascii_lowercase()))
        .map_err(|_| format!("unknown variant '{s}', expected zdeq, tfeq or jfeq"))
}

fn parse_mesh(s: &str) -> std::result::Result<usize, String> {
    let bad = || format!("mesh must be N or NxN, got '{s}'");
    let mut parts = s.split(['x', 'X']);
    let n: usize = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    match parts.next() {
        None => Ok(n),
        Some(m) if m.trim().parse::<usize>().ok() == Some(n) && parts.next().is_none() => Ok(n),
        Some(_) => Err(format!("only square meshes can be selected, got '{s}'")),
    }
}

fn default_spec(preset: Preset) -> Result<MeshSpec> {
    let uniform = PlateSetup::unit(PlateVariant::Zdeq, PlateLoad::Uniform { q0: 1.0 });
    let membrane = |e: f64, nu: f64| MembraneSetup {
        material: MembraneMaterial { e, nu, t: 1.0, rho: 1.0 },
        quadrature: 3,
    };
    Ok(match preset {
        Preset::Square => MeshSpec::Square {
            a: 1.0,
            n: 4,
            distorted: false,
            supports: [Support::SimpleHard; 4],
            setup: uniform,
        },
        Preset::Rect => MeshSpec::Rect {
            a: 4.0,
            b: 6.0,
            nx: 4,
            ny: 4,
            supports: [Support::SimpleHard; 4],
            setup: uniform,
        },
        Preset::Rhombic => MeshSpec::Rhombic {
            a: 1.0,
            n: 4,
            skew_deg: 60.0,
            support: Support::Simple,
            setup: uniform,
        },
        Preset::Circular => MeshSpec::Circular {
            r: 1.0,
            rings: 5,
            sectors: 24,
            setup: uniform,
        },
        Preset::Trapezoid => MeshSpec::Trapezoid {
            shape: TAPERED_BEAM,
            n: 4,
            setup: PlateSetup {
                material: PlateMaterial::new(2.1e8, 0.3, 0.01, 1.0)?,
                ..uniform
            },
        },
        Preset::Strip => MeshSpec::Strip {
            l: 0.9,
            h: 0.2,
            n_l: 6,
            n_h: 1,
            ratio: 1.0,
            p: 1.0,
            setup: PlateSetup {
                material: PlateMaterial::new(20000.0, 0.0, 0.036, 1.0)?,
                load: PlateLoad::None,
                ..uniform
            },
        },
        Preset::MembraneBeam => MeshSpec::MembraneBeam {
            l: 48.0,
            h: 12.0,
            n_l: 16,
            n_h: 4,
            p: 40.0,
            setup: membrane(30000.0, 0.25),
        },
        Preset::Cook => MeshSpec::Cook {
            n: 4,
            p: 1.0,
            setup: membrane(1.0, 1.0 / 3.0),
        },
    })
}

/// Applies `key=value` overrides to the serialized spec.
fn apply_params(spec: MeshSpec, params: &[String]) -> Result<MeshSpec> {
    let mut doc = serde_json::to_value(&spec).map_err(|e| FemError::Parse(e.to_string()))?;
    for p in params {
        let (key, raw) = p
            .split_once('=')
            .ok_or_else(|| FemError::InvalidArgument(format!("parameter '{p}' is not key=value")))?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut slot = &mut doc;
        for part in key.split('.') {
            slot = slot
                .get_mut(part)
                .ok_or_else(|| FemError::InvalidArgument(format!("unknown parameter '{key}'")))?;
        }
        *slot = value;
    }
    serde_json::from_value(doc).map_err(|e| FemError::InvalidArgument(format!("invalid mesh parameters: {e}")))
}

fn load_model(path: &Path, variant: Option<PlateVariant>) -> Result<Model> {
    let mut model = Model::read(path)?;
    if let Some(v) = variant {
        model.set_plate_variant(v);
    }
    Ok(model)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Bench {
            case,
            variant,
            mesh,
            quad,
            out,
        } => {
            let Some(case) = case else {
                for c in CASES {
                    println!("{:<24} {}", c.id, c.description);
                }
                return Ok(true);
            };
            let opts = BenchOptions {
                variant,
                mesh,
                quadrature: quad,
            };
            let report = run_benchmark(&case, &opts)?;
            print!("{}", report.summary());
            if let Some(dir) = out {
                let (csv, json) = report.write(&dir)?;
                println!("wrote {} and {}", csv.display(), json.display());
            }
            Ok(report.pass)
        }
        Command::Solve {
            model,
            variant,
            eigs,
            frame,
            out,
        } => {
            let model = load_model(&model, variant)?;
            let (map, elements, system) = prepare(&model, Storage::Auto)?;
            let sol = solve_static(&system)?;
            std::fs::create_dir_all(&out)?;
            write_file(&out.join("displacements.csv"), &displacements_csv(&model, &map, &sol.u)?)?;
            let frames = match frame {
                Some(FrameArg::Global) => vec![ForceFrame::Global],
                Some(FrameArg::Local) => vec![ForceFrame::Local],
                None => vec![ForceFrame::Global, ForceFrame::Local],
            };
            let rows: Vec<_> = frames
                .into_iter()
                .flat_map(|f| element_forces(&model, &elements, &sol.u, f))
                .collect();
            write_file(&out.join("element_forces.csv"), &forces_csv(&rows)?)?;
            if let Some(p) = eigs {
                let eig = solve_eigen(&system, p)?;
                write_file(&out.join("eigenvalues.csv"), &eigenvalues_csv(&eig)?)?;
                for (k, om) in eig.omegas().iter().enumerate() {
                    println!("omega {:>3}: {om:.9e}", k + 1);
                }
            }
            println!("static residual {:.3e}; results in {}", sol.residual, out.display());
            Ok(true)
        }
        Command::Mesh { preset, params, out } => {
            let spec = apply_params(default_spec(preset)?, &params)?;
            let model = spec.build()?;
            match out {
                Some(path) => {
                    model.write(&path)?;
                    println!(
                        "{}: {} nodes, {} elements -> {}",
                        model.name,
                        model.nodes.len(),
                        model.elements.len(),
                        path.display()
                    );
                }
                None => print!("{}", model.to_json()),
            }
            Ok(true)
        }
        Command::ExportField {
            model,
            variant,
            resolution,
            out,
        } => {
            let model = load_model(&model, variant)?;
            let (_, elements, system) = prepare(&model, Storage::Auto)?;
            let sol = solve_static(&system)?;
            let text = field_csv(&sample_plate_field(&model, &elements, &sol.u, resolution)?)?;
            match out {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
