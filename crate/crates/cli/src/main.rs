use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use carleson_cli::config::{ConfigError, Overrides, RunConfig};
use carleson_cli::harness;
use carleson_cli::render;
use carleson_cli::report::{Report, EXIT_CONFIG};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "carleson",
    version,
    about = "Fuchsian groups, fundamental domains and Carleson-measure checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Maximal word length of the orbit table.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Directory for reports and figures.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Enumerate the group and summarize its table and domain.
    GroupBuild,
    /// Box integrals over a grid of boundary points and radii.
    Carleson,
    /// Check the ingredients of the domain-to-disk Carleson mechanism.
    VerifyThm13,
    /// Check the dyadic puncture construction.
    VerifySec4,
    /// Write SVG figures.
    Render,
    /// Homogeneity constants of real sets.
    DenjoyHomogeneity,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::GroupBuild => "group-build",
            Command::Carleson => "carleson",
            Command::VerifyThm13 => "verify-thm13",
            Command::VerifySec4 => "verify-sec4",
            Command::Render => "render",
            Command::DenjoyHomogeneity => "denjoy-homogeneity",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), ConfigError> {
    std::fs::create_dir_all(dir).map_err(|e| ConfigError(format!("{}: {e}", dir.display())))?;
    let p = dir.join(name);
    std::fs::write(&p, contents).map_err(|e| ConfigError(format!("{}: {e}", p.display())))
}

fn execute(cli: &Cli) -> Result<Report, ConfigError> {
    let (mut cfg, base_dir) = match &cli.config {
        Some(p) => (
            RunConfig::load(p)?,
            p.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        None => (RunConfig::default(), PathBuf::from(".")),
    };
    cfg.apply(&Overrides {
        depth: cli.depth,
        tol: cli.tol,
        out: cli.out.clone(),
        seed: cli.seed,
    });
    cfg.validate()?;
    let out_dir = cfg.output.dir.clone();
    let name = cli.command.name();
    let report = match cli.command {
        Command::GroupBuild => {
            let (report, svg) = harness::group_build(&cfg)?;
            if let (Some(svg), Some(dir)) = (svg, &out_dir) {
                write_file(dir, "tiling.svg", &svg)?;
            }
            report
        }
        Command::Render => {
            let (report, files) = render::render(&cfg, &base_dir)?;
            let dir = out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            for (file, contents) in &files {
                write_file(&dir, file, contents)?;
            }
            report
        }
        _ => harness::run(name, &cfg, &base_dir)?,
    };
    if let Some(dir) = &out_dir {
        write_file(dir, &format!("{name}.json"), &report.to_json())?;
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(report) => {
            match cli.format {
                Format::Json => print!("{}", report.to_json()),
                Format::Text => {
                    print!("{}", report.to_text());
                    println!("wall clock {:.3} s", start.elapsed().as_secs_f64());
                }
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
