use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use harvest_cli::commands::{
    self, cmd_compare, cmd_gen, cmd_solve, parse_cost_model, CompareOptions, GenOptions,
    SolveOptions,
};
use harvest_cli::report::render_compare_text;
use harvest_logistics::Error;

#[derive(Parser)]
#[command(
    name = "harvest",
    about = "Harvest logistics planning: scenario generation, solves and case comparisons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random scenario file
    Gen(GenArgs),
    /// Solve one scenario under one case setup
    Solve(SolveArgs),
    /// Replicated comparison of cases over an epsilon grid
    Compare(CompareArgs),
}

#[derive(Args)]
struct ScenarioFlags {
    /// Use the built-in large-scale preset (1200 fields, 20 plants, 80 km)
    #[arg(long, value_parser = ["paper"])]
    preset: Option<String>,
    #[arg(long)]
    fields: Option<usize>,
    #[arg(long)]
    plants: Option<usize>,
    /// Side length of the square coverage area, km
    #[arg(long)]
    area: Option<f64>,
    #[arg(long)]
    field_size_min: Option<f64>,
    #[arg(long)]
    field_size_span: Option<f64>,
    /// Minimum demand per plant, in the configured supply unit
    #[arg(long)]
    demand: Option<f64>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    scenario: ScenarioFlags,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output scenario file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Scenario file produced by `gen`
    #[arg(long)]
    scenario: PathBuf,
    /// Machinery park file; defaults to the built-in 7 HU / 14+28 SU park
    #[arg(long)]
    park: Option<PathBuf>,
    /// Case setup: 1 construction only, 2 routing only, 3 +fleet, 4 +fields
    #[arg(long)]
    case: u8,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 5000)]
    iters: usize,
    #[arg(long, default_value_t = 64)]
    workers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for summary.json, summary.txt, trace.csv and plan.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// Apply the remove-reinsert move twice per candidate
    #[arg(long)]
    double_perturb: bool,
    #[arg(long, default_value = "skeleton", value_parser = ["skeleton", "accompany"])]
    cost_model: String,
    /// Evaluate workers on the calling thread instead of the thread pool
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    scenario: ScenarioFlags,
    #[arg(long)]
    park: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    replicates: usize,
    /// Comma-separated grid; defaults to 0,0.25,0.5,0.75,1
    #[arg(long, value_delimiter = ',')]
    epsilon_grid: Option<Vec<f64>>,
    /// Comma-separated subset of 1,2,3,4
    #[arg(long, value_delimiter = ',', default_values_t = [1u8, 2, 3, 4])]
    cases: Vec<u8>,
    #[arg(long, default_value_t = 5000)]
    iters: usize,
    #[arg(long, default_value_t = 64)]
    workers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for compare.json and compare.txt
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    double_perturb: bool,
    #[arg(long, default_value = "skeleton", value_parser = ["skeleton", "accompany"])]
    cost_model: String,
}

fn gen_options(args: &GenArgs) -> GenOptions {
    GenOptions {
        preset_paper: args.scenario.preset.as_deref() == Some("paper"),
        seed: args.seed,
        fields: args.scenario.fields,
        plants: args.scenario.plants,
        area: args.scenario.area,
        field_size_min: args.scenario.field_size_min,
        field_size_span: args.scenario.field_size_span,
        demand: args.scenario.demand,
        out: args.out.clone(),
    }
}

fn run(cli: Cli) -> harvest_logistics::Result<()> {
    match cli.command {
        Command::Gen(args) => cmd_gen(&gen_options(&args)),
        Command::Solve(args) => {
            let opts = SolveOptions {
                scenario: args.scenario,
                park: args.park,
                case: args.case,
                epsilon: args.epsilon,
                iters: args.iters,
                workers: args.workers,
                seed: args.seed,
                out: args.out,
                double_perturb: args.double_perturb,
                cost_model: parse_cost_model(&args.cost_model)?,
                sequential: args.sequential,
            };
            cmd_solve(&opts)?;
            Ok(())
        }
        Command::Compare(args) => {
            let opts = CompareOptions {
                preset_paper: args.scenario.preset.as_deref() == Some("paper"),
                gen: GenOptions {
                    preset_paper: args.scenario.preset.as_deref() == Some("paper"),
                    seed: args.seed,
                    fields: args.scenario.fields,
                    plants: args.scenario.plants,
                    area: args.scenario.area,
                    field_size_min: args.scenario.field_size_min,
                    field_size_span: args.scenario.field_size_span,
                    demand: args.scenario.demand,
                    out: PathBuf::new(),
                },
                park: args.park,
                replicates: args.replicates,
                epsilon_grid: args
                    .epsilon_grid
                    .unwrap_or_else(|| commands::DEFAULT_EPSILON_GRID.to_vec()),
                cases: args.cases,
                iters: args.iters,
                workers: args.workers,
                seed: args.seed,
                out: args.out,
                double_perturb: args.double_perturb,
                cost_model: parse_cost_model(&args.cost_model)?,
            };
            let report = cmd_compare(&opts)?;
            print!("{}", render_compare_text(&report));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Infeasible(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
