//! The three harness commands: scenario generation, single solves and the
//! replicated multi-case epsilon-grid comparison.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use harvest_logistics::model::generate_scenario;
use harvest_logistics::rng::derive_sub_seed;
use harvest_logistics::search::{run_search, CaseMode, ExecutionMode, SearchConfig};
use harvest_logistics::{
    io, CostModel, Error, MachineryPark, Result, Scenario, ScenarioSpec, SearchResult,
};

use crate::report::{
    self, plan_file, render_compare_text, render_solve_text, render_trace_csv, summarize,
    CaseAggregate, CompareCell, CompareReport, SolveSummary,
};

/// Default epsilon grid of the experiment protocol.
pub const DEFAULT_EPSILON_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Clone, Debug)]
pub struct GenOptions {
    pub preset_paper: bool,
    pub seed: u64,
    pub fields: Option<usize>,
    pub plants: Option<usize>,
    pub area: Option<f64>,
    pub field_size_min: Option<f64>,
    pub field_size_span: Option<f64>,
    pub demand: Option<f64>,
    pub out: PathBuf,
}

pub fn scenario_spec_from(opts_preset: bool, o: &GenOptions) -> ScenarioSpec {
    let mut spec = if opts_preset {
        ScenarioSpec::paper()
    } else {
        ScenarioSpec {
            n_fields: 100,
            n_plants: 5,
            area_km: 30.0,
            field_size_min: 3.0,
            field_size_span: 4.0,
            min_demand: 0.0,
            params: harvest_logistics::PhysicalParams::paper(),
        }
    };
    if let Some(v) = o.fields {
        spec.n_fields = v;
    }
    if let Some(v) = o.plants {
        spec.n_plants = v;
    }
    if let Some(v) = o.area {
        spec.area_km = v;
    }
    if let Some(v) = o.field_size_min {
        spec.field_size_min = v;
    }
    if let Some(v) = o.field_size_span {
        spec.field_size_span = v;
    }
    if let Some(v) = o.demand {
        spec.min_demand = v;
    }
    spec
}

pub fn cmd_gen(opts: &GenOptions) -> Result<()> {
    let spec = scenario_spec_from(opts.preset_paper, opts);
    let scenario = generate_scenario(opts.seed, &spec)?;
    io::save_scenario(&scenario, &opts.out)?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub scenario: PathBuf,
    pub park: Option<PathBuf>,
    pub case: u8,
    pub epsilon: f64,
    pub iters: usize,
    pub workers: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub double_perturb: bool,
    pub cost_model: CostModel,
    pub sequential: bool,
}

pub fn parse_cost_model(text: &str) -> Result<CostModel> {
    match text {
        "skeleton" => Ok(CostModel::Skeleton),
        "accompany" => Ok(CostModel::Accompany),
        other => Err(Error::invalid(format!(
            "cost model must be skeleton or accompany, got {other}"
        ))),
    }
}

fn load_park_or_default(path: &Option<PathBuf>) -> Result<MachineryPark> {
    match path {
        Some(p) => crate::park::load_park(p),
        None => Ok(MachineryPark::paper()),
    }
}

pub fn run_one_solve(
    scenario: &Scenario,
    park: &MachineryPark,
    case: u8,
    epsilon: f64,
    iters: usize,
    workers: usize,
    seed: u64,
    double_perturb: bool,
    cost_model: CostModel,
    execution: ExecutionMode,
) -> Result<(SearchResult, SolveSummary)> {
    let mut cfg = SearchConfig::new(CaseMode::from_number(case)?, epsilon, iters, seed);
    cfg.n_workers = workers;
    cfg.double_perturb = double_perturb;
    cfg.cost_model = cost_model;
    cfg.execution = execution;
    let result = run_search(scenario, park, &cfg)?;
    let eps = if case == 1 { None } else { Some(epsilon) };
    let summary = summarize(case, eps, iters, workers, seed, cost_model, &result);
    Ok((result, summary))
}

pub fn cmd_solve(opts: &SolveOptions) -> Result<SolveSummary> {
    let scenario = io::load_scenario(&opts.scenario)?;
    let park = load_park_or_default(&opts.park)?;
    let execution = if opts.sequential {
        ExecutionMode::Sequential
    } else {
        ExecutionMode::Parallel
    };
    let (result, summary) = run_one_solve(
        &scenario,
        &park,
        opts.case,
        opts.epsilon,
        opts.iters,
        opts.workers,
        opts.seed,
        opts.double_perturb,
        opts.cost_model,
        execution,
    )?;
    if let Some(dir) = &opts.out {
        emit_solve(dir, &scenario, &result, &summary)?;
    }
    print!("{}", render_solve_text(&summary));
    Ok(summary)
}

pub fn emit_solve(
    dir: &Path,
    scenario: &Scenario,
    result: &SearchResult,
    summary: &SolveSummary,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    report::write_json(summary, &dir.join("summary.json"))?;
    std::fs::write(dir.join("summary.txt"), render_solve_text(summary))?;
    std::fs::write(dir.join("trace.csv"), render_trace_csv(result))?;
    report::write_json(&plan_file(scenario, &result.best_plan), &dir.join("plan.json"))?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct CompareOptions {
    pub preset_paper: bool,
    pub gen: GenOptions,
    pub park: Option<PathBuf>,
    pub replicates: usize,
    pub epsilon_grid: Vec<f64>,
    pub cases: Vec<u8>,
    pub iters: usize,
    pub workers: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub double_perturb: bool,
    pub cost_model: CostModel,
}

/// Runs the full protocol: for every replicate scenario and case, sweep the
/// epsilon grid, keep the lowest-cost cell per (replicate, case), then
/// aggregate per case over replicates. Cells run concurrently; each solve is
/// deterministic, so the report does not depend on scheduling.
pub fn cmd_compare(opts: &CompareOptions) -> Result<CompareReport> {
    if opts.replicates == 0 {
        return Err(Error::invalid("replicates must be at least 1"));
    }
    if opts.cases.is_empty() || opts.cases.iter().any(|&c| !(1..=4).contains(&c)) {
        return Err(Error::invalid("cases must be a nonempty subset of 1..=4"));
    }
    let spec = scenario_spec_from(opts.preset_paper, &opts.gen);
    let park = load_park_or_default(&opts.park)?;

    let scenarios: Vec<(u64, Scenario)> = (0..opts.replicates)
        .map(|r| {
            let seed = derive_sub_seed(opts.seed, r as u64, 0);
            generate_scenario(seed, &spec).map(|s| (seed, s))
        })
        .collect::<Result<_>>()?;

    // One work item per (replicate, case, epsilon) cell; case 1 has no grid.
    let mut items: Vec<(usize, u8, usize, f64)> = Vec::new();
    for r in 0..opts.replicates {
        for &case in &opts.cases {
            if case == 1 {
                items.push((r, case, 0, 0.0));
            } else {
                for (k, &eps) in opts.epsilon_grid.iter().enumerate() {
                    items.push((r, case, k, eps));
                }
            }
        }
    }

    let cells: Vec<CompareCell> = items
        .par_iter()
        .map(|&(r, case, eps_idx, eps)| {
            let (scenario_seed, scenario) = &scenarios[r];
            let search_seed =
                derive_sub_seed(opts.seed, r as u64, ((case as u64) << 16) | eps_idx as u64);
            let (_, summary) = run_one_solve(
                scenario,
                &park,
                case,
                eps,
                opts.iters,
                opts.workers,
                search_seed,
                opts.double_perturb,
                opts.cost_model,
                // Cells already saturate the cores.
                ExecutionMode::Sequential,
            )?;
            Ok(CompareCell {
                replicate: r,
                scenario_seed: *scenario_seed,
                selected: false,
                summary,
            })
        })
        .collect::<Result<_>>()?;

    let mut report = CompareReport {
        replicates: opts.replicates,
        epsilon_grid: opts.epsilon_grid.clone(),
        solves: cells,
        aggregates: Vec::new(),
    };
    select_and_aggregate(&mut report, &opts.cases);

    if let Some(dir) = &opts.out {
        std::fs::create_dir_all(dir)?;
        report::write_json(&report, &dir.join("compare.json"))?;
        std::fs::write(dir.join("compare.txt"), render_compare_text(&report))?;
    }
    Ok(report)
}

fn select_and_aggregate(report: &mut CompareReport, cases: &[u8]) {
    // Per (replicate, case): mark the lowest-cost epsilon cell (first grid
    // index on ties).
    for r in 0..report.replicates {
        for &case in cases {
            let mut best: Option<usize> = None;
            for (i, cell) in report.solves.iter().enumerate() {
                if cell.replicate != r || cell.summary.case != case {
                    continue;
                }
                match best {
                    None => best = Some(i),
                    Some(b) if cell.summary.total_cost_km < report.solves[b].summary.total_cost_km => {
                        best = Some(i)
                    }
                    _ => {}
                }
            }
            if let Some(b) = best {
                report.solves[b].selected = true;
            }
        }
    }

    let mut sorted_cases: Vec<u8> = cases.to_vec();
    sorted_cases.sort_unstable();
    let case1_mean_cost = mean_of(report, 1, |s| s.total_cost_km);
    for &case in &sorted_cases {
        let selected = report.selected(case);
        if selected.is_empty() {
            continue;
        }
        let n = selected.len() as f64;
        let mean_cost = selected.iter().map(|c| c.summary.total_cost_km).sum::<f64>() / n;
        let eps_values: Vec<f64> = selected
            .iter()
            .filter_map(|c| c.summary.epsilon)
            .collect();
        let mean_eps = if eps_values.is_empty() {
            None
        } else {
            Some(eps_values.iter().sum::<f64>() / eps_values.len() as f64)
        };
        let (delta_km, delta_pct) = match case1_mean_cost {
            Some(base) if case != 1 => {
                let d = mean_cost - base;
                (d, 100.0 * d / base)
            }
            Some(_) => (0.0, 0.0),
            None => (f64::NAN, f64::NAN),
        };
        report.aggregates.push(CaseAggregate {
            case,
            mean_best_epsilon: mean_eps,
            mean_n_tours: selected
                .iter()
                .map(|c| c.summary.n_tours_active as f64)
                .sum::<f64>()
                / n,
            mean_avg_completion_h: selected
                .iter()
                .map(|c| c.summary.mean_completion_h)
                .sum::<f64>()
                / n,
            mean_worst_completion_h: selected
                .iter()
                .map(|c| c.summary.max_completion_h)
                .sum::<f64>()
                / n,
            mean_avg_wait_h: selected.iter().map(|c| c.summary.mean_wait_h).sum::<f64>() / n,
            mean_worst_wait_h: selected.iter().map(|c| c.summary.worst_wait_h).sum::<f64>() / n,
            mean_solve_time_s: selected
                .iter()
                .map(|c| c.summary.solve_time_s)
                .sum::<f64>()
                / n,
            mean_best_cost_km: mean_cost,
            delta_km,
            delta_pct,
        });
    }
}

fn mean_of(report: &CompareReport, case: u8, f: impl Fn(&SolveSummary) -> f64) -> Option<f64> {
    let selected = report.selected(case);
    if selected.is_empty() {
        return None;
    }
    Some(selected.iter().map(|c| f(&c.summary)).sum::<f64>() / selected.len() as f64)
}
