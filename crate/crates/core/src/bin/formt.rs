use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use formt::layout::{scene_from_report, GroupingMode, LayoutConfig};
use formt::mutation::Variant;
use formt::project::{Project, ProjectFile, Settings};
use formt::service::{self, AppState};
use formt::testbase::parse_tests;
use formt::{render_svg, Error, KillReport};

#[derive(Debug, Parser)]
#[command(
    name = "formt",
    version,
    about = "Form-based mutation testing of logical specifications"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the form translation of a specification and its simplification.
    Translate {
        spec: PathBuf,
        /// Print only the raw translation.
        #[arg(long)]
        no_simplify: bool,
        /// Print forms in compact notation, one letter per atom, e.g. `(qs)pr`.
        #[arg(long)]
        single_letter_atoms: bool,
    },
    /// List the mutants of a specification with their classification.
    Mutate {
        spec: PathBuf,
        /// Mutate the unsimplified translation.
        #[arg(long)]
        raw: bool,
        /// Mutation operators: delete, wrap or both.
        #[arg(long, default_value = "both")]
        variant: Variant,
    },
    /// Run a test base against the mutants and report the mutation score.
    Test {
        spec: PathBuf,
        tests: PathBuf,
        /// Write the kill report as JSON.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        raw: bool,
        #[arg(long, default_value = "delete")]
        variant: Variant,
        /// Variable cap for exhaustive equivalence checks.
        #[arg(long)]
        var_cap: Option<usize>,
    },
    /// Render a kill report as an SVG map.
    Render {
        report: PathBuf,
        #[arg(long, default_value = "document")]
        grouping: GroupingMode,
        /// SVG output file; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the scene graph as JSON.
        #[arg(long)]
        scene_json: Option<PathBuf>,
        /// Layout configuration (palette, padding) as JSON.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Serve the HTTP API on localhost.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Project file to load at startup.
        #[arg(long)]
        project: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn compact(form: &formt::Form, single_letter: bool) -> Result<String, Error> {
    if !single_letter {
        return Ok(form.to_string());
    }
    form.to_compact_string().ok_or_else(|| {
        Error::Io(std::io::Error::other(
            "--single-letter-atoms needs single-letter atoms",
        ))
    })
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Translate {
            spec,
            no_simplify,
            single_letter_atoms,
        } => {
            let project = Project::new(&read(&spec)?, Settings::default())?;
            println!("{}", compact(project.translated(), single_letter_atoms)?);
            if !no_simplify {
                println!("{}", compact(project.simplified(), single_letter_atoms)?);
            }
        }
        Command::Mutate { spec, raw, variant } => {
            let settings = Settings {
                raw,
                variant,
                ..Settings::default()
            };
            let project = Project::new(&read(&spec)?, settings)?;
            println!("origin: {}", project.base_form());
            let rows: Vec<[String; 5]> = project
                .mutants()
                .iter()
                .map(|m| {
                    [
                        m.id.clone(),
                        m.operator.to_string(),
                        m.target.to_string(),
                        m.classification.map(|c| c.to_string()).unwrap_or_default(),
                        m.mutated.to_string(),
                    ]
                })
                .collect();
            print_table(["ID", "OPERATOR", "PATH", "CLASS", "FORM"], &rows);
        }
        Command::Test {
            spec,
            tests,
            output,
            raw,
            variant,
            var_cap,
        } => {
            let mut settings = Settings {
                raw,
                variant,
                ..Settings::default()
            };
            if let Some(cap) = var_cap {
                settings.var_cap = cap;
            }
            let mut project = Project::new(&read(&spec)?, settings)?;
            let tests = parse_tests(&read(&tests)?, project.settings().atom_syntax)?;
            project.set_tests(tests)?;
            let report = project.evaluate().clone();
            print_report(&report);
            if let Some(path) = output {
                fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
            }
        }
        Command::Render {
            report,
            grouping,
            output,
            scene_json,
            config,
        } => {
            let report: KillReport = serde_json::from_str(&read(&report)?)?;
            let config = match config {
                Some(path) => LayoutConfig::from_json(&read(&path)?)?,
                None => LayoutConfig::default(),
            };
            let scene = scene_from_report(&report, grouping, &config)?;
            let svg = render_svg(&scene, &config.palette);
            if let Some(path) = scene_json {
                fs::write(path, serde_json::to_string_pretty(&scene)? + "\n")?;
            }
            match output {
                Some(path) => fs::write(path, svg)?,
                None => print!("{svg}"),
            }
        }
        Command::Serve { port, project } => {
            let project = match project {
                Some(path) => {
                    let file: ProjectFile = serde_json::from_str(&read(&path)?)?;
                    Some(Project::from_file(file)?)
                }
                None => None,
            };
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(service::serve(
                port,
                AppState::new(Settings::default(), project),
            ))?;
        }
    }
    Ok(())
}

fn print_table<const N: usize>(header: [&str; N], rows: &[[String; N]]) {
    let mut widths = header.map(str::len);
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut out = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i + 1 == N {
                out.push_str(cell);
            } else {
                out.push_str(&format!("{cell:<width$}  ", width = widths[i]));
            }
        }
        println!("{out}");
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
}

fn print_report(report: &KillReport) {
    println!("origin: {}", report.origin);
    print!("tests: {}", report.tests_total);
    if !report.invalid_tests.is_empty() {
        print!(
            " ({} disagree with the origin: {})",
            report.invalid_tests.len(),
            report.invalid_tests.join(", ")
        );
    }
    println!();
    println!(
        "mutants: {} (true {}, equivalent {}, unknown {})",
        report.mutants.len(),
        report.true_mutant_count,
        report.equivalent_count,
        report.unknown_count
    );
    let rows: Vec<[String; 5]> = report
        .mutants
        .iter()
        .map(|m| {
            let (status, failing) = match &m.info {
                Some(info) => (
                    if info.killed { "killed" } else { "survived" },
                    format!("{}/{}", info.tests_failing, info.tests_total),
                ),
                None => ("-", String::new()),
            };
            [
                m.id.clone(),
                m.classification.map(|c| c.to_string()).unwrap_or_default(),
                status.to_string(),
                failing,
                m.mutated.to_string(),
            ]
        })
        .collect();
    print_table(["ID", "CLASS", "STATUS", "FAILING", "FORM"], &rows);
    println!(
        "score: {}/{} ({:.1}%)",
        report.killed_count,
        report.true_mutant_count,
        report.mutation_score * 100.0
    );
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err @ Error::Invariant(_)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
