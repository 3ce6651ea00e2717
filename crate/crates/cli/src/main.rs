use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use cprsnp::bench::{bench, to_csv, to_table, BenchOptions};
use cprsnp::engine::{solve, EngineOptions, Formulation, SolveStatus};
use cprsnp::generate::{generate, Capacities, GenParams};
use cprsnp::io::{parse_design, parse_instance, write_design, write_instance};
use cprsnp::verify::is_survivable;
use cprsnp::{augment, Instance};

const EXIT_OK: u8 = 0;
const EXIT_TIMEOUT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "cprsnp", version, about = "Exact solvers for protected survivable network design")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with one formulation.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        formulation: FormulationArg,
        /// Seconds.
        #[arg(long, default_value_t = 2000.0)]
        time_limit: f64,
        #[arg(long, value_enum, default_value_t = Switch::On)]
        strengthen: Switch,
        #[arg(long)]
        design_out: Option<PathBuf>,
        /// Flip every arc on reading (flow from the terminals to the root).
        #[arg(long)]
        reverse_arcs: bool,
        /// Leave wall-clock times out of the log.
        #[arg(long)]
        no_times: bool,
    },
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        terminals: usize,
        #[arg(long)]
        arcs: usize,
        #[arg(long, value_enum)]
        capacities: CapacityArg,
        /// Capacity in uniform mode; defaults to ceil(terminals / 2).
        #[arg(long)]
        uniform_capacity: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        kp: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a design against every admissible failure scenario.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        reverse_arcs: bool,
    },
    /// Run every formulation on every instance of a directory.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        #[arg(long, default_value_t = 3)]
        k_max: usize,
        #[arg(long, default_value_t = 0)]
        kp_min: usize,
        #[arg(long, default_value_t = 0)]
        kp_max: usize,
        /// Seconds per cell.
        #[arg(long, default_value_t = 2000.0)]
        time_limit: f64,
        #[arg(long, value_enum, default_value_t = Switch::On)]
        strengthen: Switch,
        #[arg(long)]
        out: PathBuf,
        /// Also write the aligned table here.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        reverse_arcs: bool,
        /// Print `-` instead of times, for byte-identical reports.
        #[arg(long)]
        no_times: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulationArg {
    Cutset,
    Flow,
    Bilevel,
}

impl From<FormulationArg> for Formulation {
    fn from(f: FormulationArg) -> Self {
        match f {
            FormulationArg::Cutset => Formulation::Cutset,
            FormulationArg::Flow => Formulation::Flow,
            FormulationArg::Bilevel => Formulation::Bilevel,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum CapacityArg {
    Uniform,
    Random,
}

/// Failure carrying the exit code to report.
struct Exit(u8, anyhow::Error);

fn input<T>(r: Result<T>) -> Result<T, Exit> {
    r.map_err(|e| Exit(EXIT_INPUT, e))
}

fn seconds(s: f64) -> Result<Duration, Exit> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Exit(EXIT_INPUT, anyhow::anyhow!("time limit must be positive, got {s}")));
    }
    Ok(Duration::from_secs_f64(s))
}

fn read_instance(path: &Path, reverse: bool) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let inst = parse_instance(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(if reverse { inst.reversed() } else { inst })
}

fn write(path: &Path, text: &str) -> Result<(), Exit> {
    input(fs::write(path, text).with_context(|| format!("writing {}", path.display())))
}

fn run(cli: Cli) -> Result<u8, Exit> {
    match cli.command {
        Command::Solve { instance, formulation, time_limit, strengthen, design_out, reverse_arcs, no_times } => {
            let inst = input(read_instance(&instance, reverse_arcs))?;
            let aug = input(augment(&inst).context("augmenting instance"))?;
            let opts = EngineOptions {
                time_limit: Some(seconds(time_limit)?),
                strengthen: strengthen == Switch::On,
                record_times: !no_times,
                ..Default::default()
            };
            let sol = solve(&aug, formulation.into(), &opts);
            print!("{}", sol.log_text());
            if let (Some(path), Some(design)) = (design_out, &sol.design) {
                write(&path, &write_design(&aug, design))?;
            }
            Ok(match sol.status {
                SolveStatus::Optimal => EXIT_OK,
                SolveStatus::Feasible | SolveStatus::TimeLimit => EXIT_TIMEOUT,
                SolveStatus::Infeasible => EXIT_INFEASIBLE,
            })
        }
        Command::Gen { nodes, terminals, arcs, capacities, uniform_capacity, seed, k, kp, out } => {
            let capacities = match capacities {
                CapacityArg::Uniform => Capacities::Uniform(uniform_capacity),
                CapacityArg::Random if uniform_capacity.is_some() => {
                    return Err(Exit(EXIT_INPUT, anyhow::anyhow!("--uniform-capacity needs --capacities uniform")))
                }
                CapacityArg::Random => Capacities::Random,
            };
            let params = GenParams { nodes, terminals, arcs, capacities, seed, k, k_protect: kp };
            let inst = input(generate(&params).context("generating instance"))?;
            let mode = match capacities {
                Capacities::Uniform(_) => "uniform",
                Capacities::Random => "random",
            };
            let comment = format!("generated {} capacities={mode} seed={seed}", inst.size_label());
            write(&out, &write_instance(&inst, &[&comment]))?;
            println!("{comment}");
            Ok(EXIT_OK)
        }
        Command::Verify { instance, design, reverse_arcs } => {
            let inst = input(read_instance(&instance, reverse_arcs))?;
            let aug = input(augment(&inst).context("augmenting instance"))?;
            let text = input(fs::read_to_string(&design).with_context(|| format!("reading {}", design.display())))?;
            let d = input(parse_design(&aug, &text).with_context(|| format!("parsing {}", design.display())))?;
            let s = input(is_survivable(&aug, &d).context("verifying"))?;
            println!("cost={} worst_flow={} demand={}", d.cost(&aug), s.worst_flow, aug.demand());
            if s.survivable {
                println!("survivable");
                Ok(EXIT_OK)
            } else {
                let names: Vec<String> = s.witness.iter().map(|&a| aug.arc_name(a)).collect();
                println!("not survivable: failing {} leaves {} < {}", names.join(" "), s.worst_flow, aug.demand());
                Ok(EXIT_INFEASIBLE)
            }
        }
        Command::Bench {
            dir,
            k_min,
            k_max,
            kp_min,
            kp_max,
            time_limit,
            strengthen,
            out,
            table,
            reverse_arcs,
            no_times,
        } => {
            let instances = input(read_dir(&dir, reverse_arcs))?;
            if instances.is_empty() {
                return Err(Exit(EXIT_INPUT, anyhow::anyhow!("no instance files in {}", dir.display())));
            }
            if k_min > k_max || kp_min > kp_max {
                return Err(Exit(EXIT_INPUT, anyhow::anyhow!("empty budget range")));
            }
            let opts = BenchOptions {
                time_limit: seconds(time_limit)?,
                strengthen: strengthen == Switch::On,
                times: !no_times,
                ..Default::default()
            };
            let rows = bench(&instances, k_min..=k_max, kp_min..=kp_max, &opts);
            write(&out, &to_csv(&rows))?;
            let text = to_table(&rows);
            if let Some(path) = table {
                write(&path, &text)?;
            }
            print!("{text}");
            for r in rows.iter().filter(|r| !r.consistent()) {
                eprintln!("warning: costs disagree on {} k={} k'={}", r.name, r.k, r.k_protect);
            }
            Ok(EXIT_OK)
        }
    }
}

/// Every regular file of `dir`, by name.
fn read_dir(dir: &Path, reverse: bool) -> Result<Vec<(String, Instance)>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.is_file());
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let name = p.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
            read_instance(p, reverse).map(|i| (name, i))
        })
        .collect()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
