//! Solve and comparison records, text tables and file emission.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use harvest_logistics::{CostModel, Plan, Result, Scenario, SearchResult};

/// One active tour in a solve record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TourRecord {
    pub slot: usize,
    pub plants: Vec<usize>,
    pub hu_counts: Vec<usize>,
    pub su_counts: Vec<usize>,
    pub cost_km: f64,
    pub completion_h: f64,
    pub avg_wait_h: f64,
}

/// Flat summary of one solve, mirroring the per-case result tables.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveSummary {
    pub case: u8,
    /// Absent for the construction-only case.
    pub epsilon: Option<f64>,
    pub iters: usize,
    pub workers: usize,
    pub seed: u64,
    pub cost_model: String,
    pub n_tours_active: usize,
    pub tours: Vec<TourRecord>,
    pub total_cost_km: f64,
    pub baseline_cost_km: f64,
    pub delta_km: f64,
    pub delta_pct: f64,
    pub max_completion_h: f64,
    pub mean_completion_h: f64,
    pub mean_wait_h: f64,
    pub worst_wait_h: f64,
    pub solve_time_s: f64,
}

pub fn summarize(
    case: u8,
    epsilon: Option<f64>,
    iters: usize,
    workers: usize,
    seed: u64,
    cost_model: CostModel,
    result: &SearchResult,
) -> SolveSummary {
    let plan = &result.best_plan;
    let eval = &result.best_eval;
    let mut tours = Vec::new();
    for (slot, tour) in plan.tours.iter().enumerate() {
        if !tour.is_active() {
            continue;
        }
        tours.push(TourRecord {
            slot,
            plants: tour.plant_sequence.clone(),
            hu_counts: tour.hu_counts.clone(),
            su_counts: tour.su_counts.clone(),
            cost_km: eval.per_tour_cost[slot],
            completion_h: eval.completion_times[slot],
            avg_wait_h: eval.avg_waiting_times[slot],
        });
    }
    let n_active = tours.len();
    let mean_completion = tours.iter().map(|t| t.completion_h).sum::<f64>() / n_active as f64;
    let mean_wait = tours.iter().map(|t| t.avg_wait_h).sum::<f64>() / n_active as f64;
    let worst_wait = tours
        .iter()
        .map(|t| t.avg_wait_h)
        .fold(f64::NEG_INFINITY, f64::max);
    let delta_km = eval.total_cost - result.baseline_cost;
    SolveSummary {
        case,
        epsilon,
        iters,
        workers,
        seed,
        cost_model: match cost_model {
            CostModel::Skeleton => "skeleton".into(),
            CostModel::Accompany => "accompany".into(),
        },
        n_tours_active: n_active,
        tours,
        total_cost_km: eval.total_cost,
        baseline_cost_km: result.baseline_cost,
        delta_km,
        delta_pct: 100.0 * delta_km / result.baseline_cost,
        max_completion_h: eval.max_completion,
        mean_completion_h: mean_completion,
        mean_wait_h: mean_wait,
        worst_wait_h: worst_wait,
        solve_time_s: result.solve_time,
    }
}

pub fn render_solve_text(s: &SolveSummary) -> String {
    let mut out = String::new();
    let eps = s
        .epsilon
        .map(|e| format!("{e:.2}"))
        .unwrap_or_else(|| "-".into());
    let _ = writeln!(out, "case {}  epsilon {}  seed {}", s.case, eps, s.seed);
    let _ = writeln!(
        out,
        "iters {}  workers {}  cost model {}",
        s.iters, s.workers, s.cost_model
    );
    let _ = writeln!(out, "active tours: {}", s.n_tours_active);
    let _ = writeln!(
        out,
        "{:>4} {:>12} {:>12} {:>12} {:>12}  {:<12} {:<12}",
        "tour", "C (km)", "T_compl (h)", "T_wait (h)", "plants", "HUs", "SUs"
    );
    for t in &s.tours {
        let _ = writeln!(
            out,
            "{:>4} {:>12.1} {:>12.1} {:>12.3} {:>12}  {:<12} {:<12}",
            t.slot,
            t.cost_km,
            t.completion_h,
            t.avg_wait_h,
            t.plants.len(),
            format!("{:?}", t.hu_counts),
            format!("{:?}", t.su_counts),
        );
    }
    let _ = writeln!(out, "C*        {:>14.1} km", s.total_cost_km);
    let _ = writeln!(
        out,
        "dC*       {:>14.1} km  ({:+.2} %)",
        s.delta_km, s.delta_pct
    );
    let _ = writeln!(out, "T_solve   {:>14.4} s", s.solve_time_s);
    out
}

/// Per-tour ordered coordinates for plotting, plus the structural plan so
/// the cost can be recomputed from the emitted files alone.
#[derive(Serialize, Deserialize)]
pub struct PlanFile {
    pub plan: Plan,
    pub tours_xy: Vec<TourXy>,
}

#[derive(Serialize, Deserialize)]
pub struct TourXy {
    pub slot: usize,
    /// HQ, fields in harvest order, HQ.
    pub hu_path: Vec<[f64; 2]>,
    /// Plant locations in visit order.
    pub plants: Vec<[f64; 2]>,
}

pub fn plan_file(scenario: &Scenario, plan: &Plan) -> PlanFile {
    let mut tours_xy = Vec::new();
    for (slot, tour) in plan.tours.iter().enumerate() {
        if !tour.is_active() {
            continue;
        }
        let mut hu_path = vec![[scenario.hq().x, scenario.hq().y]];
        for f in tour.fields_in_order() {
            let loc = scenario.field(f).location;
            hu_path.push([loc.x, loc.y]);
        }
        hu_path.push([scenario.hq().x, scenario.hq().y]);
        let plants = tour
            .plant_sequence
            .iter()
            .map(|&b| {
                let loc = scenario.plant(b).location;
                [loc.x, loc.y]
            })
            .collect();
        tours_xy.push(TourXy {
            slot,
            hu_path,
            plants,
        });
    }
    PlanFile {
        plan: plan.clone(),
        tours_xy,
    }
}

pub fn render_trace_csv(result: &SearchResult) -> String {
    let mut out = String::from("iter,best_cost_km,indicator\n");
    for (i, (c, a)) in result
        .cost_trace
        .iter()
        .zip(&result.accept_trace)
        .enumerate()
    {
        let _ = writeln!(out, "{i},{c},{a}");
    }
    out
}

/// One cell of a comparison sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompareCell {
    pub replicate: usize,
    pub scenario_seed: u64,
    /// Chosen as the per-case best epsilon for its replicate.
    pub selected: bool,
    pub summary: SolveSummary,
}

/// Aggregate over replicates for one case, averaging the selected cells.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseAggregate {
    pub case: u8,
    pub mean_best_epsilon: Option<f64>,
    pub mean_n_tours: f64,
    pub mean_avg_completion_h: f64,
    pub mean_worst_completion_h: f64,
    pub mean_avg_wait_h: f64,
    pub mean_worst_wait_h: f64,
    pub mean_solve_time_s: f64,
    pub mean_best_cost_km: f64,
    /// Difference of `mean_best_cost_km` against the case-1 aggregate.
    pub delta_km: f64,
    pub delta_pct: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompareReport {
    pub replicates: usize,
    pub epsilon_grid: Vec<f64>,
    pub solves: Vec<CompareCell>,
    pub aggregates: Vec<CaseAggregate>,
}

impl CompareReport {
    /// Selected (per-replicate best-epsilon) cells of one case, in replicate
    /// order.
    pub fn selected(&self, case: u8) -> Vec<&CompareCell> {
        let mut cells: Vec<&CompareCell> = self
            .solves
            .iter()
            .filter(|c| c.selected && c.summary.case == case)
            .collect();
        cells.sort_by_key(|c| c.replicate);
        cells
    }

    pub fn aggregate(&self, case: u8) -> Option<&CaseAggregate> {
        self.aggregates.iter().find(|a| a.case == case)
    }
}

pub fn render_compare_text(r: &CompareReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} replicates, epsilon grid {:?}",
        r.replicates, r.epsilon_grid
    );
    let cases: Vec<u8> = r.aggregates.iter().map(|a| a.case).collect();
    let mut header = format!("{:<28}", "metric");
    for c in &cases {
        let _ = write!(header, "{:>14}", format!("case {c}"));
    }
    let _ = writeln!(out, "{header}");
    let row = |label: &str, f: &dyn Fn(&CaseAggregate) -> String| {
        let mut line = format!("{label:<28}");
        for a in &r.aggregates {
            let _ = write!(line, "{:>14}", f(a));
        }
        line
    };
    let _ = writeln!(
        out,
        "{}",
        row("eps*", &|a| a
            .mean_best_epsilon
            .map(|e| format!("{e:.2}"))
            .unwrap_or_else(|| "-".into()))
    );
    let _ = writeln!(out, "{}", row("N_T", &|a| format!("{:.1}", a.mean_n_tours)));
    let _ = writeln!(
        out,
        "{}",
        row("T_compl avg (h)", &|a| format!(
            "{:.1}",
            a.mean_avg_completion_h
        ))
    );
    let _ = writeln!(
        out,
        "{}",
        row("T_compl worst (h)", &|a| format!(
            "{:.1}",
            a.mean_worst_completion_h
        ))
    );
    let _ = writeln!(
        out,
        "{}",
        row("T_wait avg (h)", &|a| format!("{:.3}", a.mean_avg_wait_h))
    );
    let _ = writeln!(
        out,
        "{}",
        row("T_wait worst (h)", &|a| format!("{:.3}", a.mean_worst_wait_h))
    );
    let _ = writeln!(
        out,
        "{}",
        row("T_solve (s)", &|a| format!("{:.2}", a.mean_solve_time_s))
    );
    let _ = writeln!(
        out,
        "{}",
        row("C* (km)", &|a| format!("{:.1}", a.mean_best_cost_km))
    );
    let _ = writeln!(out, "{}", row("dC* (km)", &|a| format!("{:.1}", a.delta_km)));
    let _ = writeln!(out, "{}", row("dC* (%)", &|a| format!("{:+.2}", a.delta_pct)));
    out
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| harvest_logistics::Error::Format(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}
