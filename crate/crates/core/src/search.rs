//! Iterative remove-reinsert search with an exploration heuristic,
//! case-mode constraints, parallel candidate generation and seed replay.
//!
//! Every iteration broadcasts the current basis plan to `n_workers`
//! independent workers. Each worker derives its own seed from
//! `(master_seed, iteration, worker)`, perturbs a private copy and reports
//! only its candidate's cost. The host picks the argmin, replays the winning
//! worker's seed to reconstruct the candidate, and advances. The end-to-end
//! result is a pure function of `(scenario, park, config)` regardless of how
//! the workers are scheduled.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::assign;
use crate::cost::{self, CostModel, Evaluation};
use crate::error::{Error, Result};
use crate::init;
use crate::model::{MachineryPark, Scenario};
use crate::plan::Plan;
use crate::rng::{self, derive_worker_seed};

/// Constraint regime of a solve.
///
/// The four standard setups differ in whether the field-to-plant assignment
/// and the fleet assignment are frozen at their baseline values and whether
/// candidates must strictly decrease the best-so-far maximum completion
/// time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseMode {
    /// Baseline construction only; no search iterations.
    Case1,
    /// Field assignment and fleet frozen; no completion-time filter.
    Case2,
    /// Field assignment frozen, fleet free, completion-time filter active.
    Case3,
    /// Everything free, completion-time filter active.
    Case4,
    /// Free combination of the three switches, for experiments.
    Custom {
        field_assignment_locked: bool,
        machinery_locked: bool,
        completion_filter_active: bool,
    },
}

impl CaseMode {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(CaseMode::Case1),
            2 => Ok(CaseMode::Case2),
            3 => Ok(CaseMode::Case3),
            4 => Ok(CaseMode::Case4),
            _ => Err(Error::invalid(format!("case must be 1..=4, got {n}"))),
        }
    }

    pub fn number(&self) -> Option<u8> {
        match self {
            CaseMode::Case1 => Some(1),
            CaseMode::Case2 => Some(2),
            CaseMode::Case3 => Some(3),
            CaseMode::Case4 => Some(4),
            CaseMode::Custom { .. } => None,
        }
    }

    pub fn init_only(&self) -> bool {
        matches!(self, CaseMode::Case1)
    }

    pub fn field_assignment_locked(&self) -> bool {
        match self {
            CaseMode::Case1 | CaseMode::Case2 | CaseMode::Case3 => true,
            CaseMode::Case4 => false,
            CaseMode::Custom {
                field_assignment_locked,
                ..
            } => *field_assignment_locked,
        }
    }

    pub fn machinery_locked(&self) -> bool {
        match self {
            CaseMode::Case1 | CaseMode::Case2 => true,
            CaseMode::Case3 | CaseMode::Case4 => false,
            CaseMode::Custom {
                machinery_locked, ..
            } => *machinery_locked,
        }
    }

    pub fn completion_filter_active(&self) -> bool {
        match self {
            CaseMode::Case1 | CaseMode::Case2 => false,
            CaseMode::Case3 | CaseMode::Case4 => true,
            CaseMode::Custom {
                completion_filter_active,
                ..
            } => *completion_filter_active,
        }
    }
}

/// Whether worker evaluations run on a thread pool or on the calling
/// thread. Results are identical; only wall-clock time differs. Without the
/// `parallel` feature both modes run sequentially.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExecutionMode {
    Parallel,
    Sequential,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub case: CaseMode,
    /// Exploration probability: each iteration restarts from the incumbent
    /// best with probability `epsilon`, from the last accepted candidate
    /// otherwise.
    pub epsilon: f64,
    pub n_iters: usize,
    pub n_workers: usize,
    pub master_seed: u64,
    /// Apply the remove-reinsert move twice per candidate.
    pub double_perturb: bool,
    pub cost_model: CostModel,
    pub execution: ExecutionMode,
}

impl SearchConfig {
    pub fn new(case: CaseMode, epsilon: f64, n_iters: usize, master_seed: u64) -> Self {
        SearchConfig {
            case,
            epsilon,
            n_iters,
            n_workers: 64,
            master_seed,
            double_perturb: false,
            cost_model: CostModel::Skeleton,
            execution: ExecutionMode::Parallel,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::invalid(format!(
                "epsilon must lie in [0, 1], got {}",
                self.epsilon
            )));
        }
        if self.n_workers == 0 {
            return Err(Error::invalid("n_workers must be at least 1"));
        }
        Ok(())
    }
}

/// Which kind of vertex an accepted improvement moved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveKind {
    Field,
    Plant,
}

/// Outcome of a search run. Traces have one entry per iteration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_plan: Plan,
    pub best_eval: Evaluation,
    /// Best-so-far cost after each iteration; nonincreasing.
    pub cost_trace: Vec<f64>,
    /// 0: no improvement, 1: a field move improved, 2: a plant move improved.
    pub accept_trace: Vec<u8>,
    /// Cost reported by the winning worker of each iteration, as reproduced
    /// by the host-side replay.
    pub winner_costs: Vec<f64>,
    /// Cost of the deterministic baseline the search started from.
    pub baseline_cost: f64,
    pub baseline_eval: Evaluation,
    /// Wall-clock seconds spent constructing and iterating (no file I/O).
    pub solve_time: f64,
}

/// The exploration heuristic: with probability `epsilon` restart from the
/// incumbent best, otherwise continue from the last accepted candidate. One
/// uniform draw per call.
pub fn explore_update<'a, R: Rng>(
    x_old: &'a Plan,
    x_star: &'a Plan,
    epsilon: f64,
    rng: &mut R,
) -> &'a Plan {
    let u: f64 = rng.gen_range(0.0..1.0);
    if u < epsilon {
        x_star
    } else {
        x_old
    }
}

/// Removes one vertex (field or plant, drawn uniformly over their union) and
/// reinserts it at a random position.
///
/// Field moves reinsert into any plant's sequence, or only within the same
/// plant when the case locks the field assignment. Plant moves carry all of
/// the plant's fields to a random position in a random tour slot, possibly
/// deactivating or reactivating slots. Fleet counts are left untouched.
///
/// Draw order is part of the replay contract: vertex, target, position.
pub fn perturb<R: Rng>(
    plan: &mut Plan,
    rng: &mut R,
    case: &CaseMode,
    n_fields: usize,
    n_plants: usize,
) -> MoveKind {
    let v = rng.gen_range(0..n_fields + n_plants);
    if v < n_fields {
        let field = v;
        let (ti, pi, fi) = plan.locate_field(field).expect("field present in plan");
        if case.field_assignment_locked() {
            let fs = &mut plan.tours[ti].fields_per_plant[pi];
            fs.remove(fi);
            let pos = rng.gen_range(0..=fs.len());
            fs.insert(pos, field);
        } else {
            let target_plant = rng.gen_range(0..n_plants);
            plan.tours[ti].fields_per_plant[pi].remove(fi);
            let (tj, pj) = plan.locate_plant(target_plant).expect("plant present");
            let fs = &mut plan.tours[tj].fields_per_plant[pj];
            let pos = rng.gen_range(0..=fs.len());
            fs.insert(pos, field);
        }
        MoveKind::Field
    } else {
        let plant = v - n_fields;
        let (ti, pi) = plan.locate_plant(plant).expect("plant present in plan");
        let target_tour = rng.gen_range(0..plan.tours.len());
        let b = plan.tours[ti].plant_sequence.remove(pi);
        let fs = plan.tours[ti].fields_per_plant.remove(pi);
        let seq_len = plan.tours[target_tour].plant_sequence.len();
        let pos = rng.gen_range(0..=seq_len);
        plan.tours[target_tour].plant_sequence.insert(pos, b);
        plan.tours[target_tour].fields_per_plant.insert(pos, fs);
        MoveKind::Plant
    }
}

/// Case pipeline for one candidate: discard on demand violation, rebalance
/// the fleet when it is not locked, evaluate, then apply the completion-time
/// filter. Infeasibility and filtering are encoded as infinite cost, never
/// as errors. The plan is left in its evaluated state (rebalanced counts
/// included).
///
/// `max_completion_bar` is the reference maximum completion time (the
/// broadcast plan's value during search); candidates exceeding it are
/// discarded when the filter is active. Keeping insertions capped at the
/// current level steadily levels the tours without starving the cost
/// descent.
pub fn evaluate_candidate(
    scenario: &Scenario,
    park: &MachineryPark,
    plan: &mut Plan,
    case: &CaseMode,
    cost_model: CostModel,
    max_completion_bar: f64,
) -> (f64, Evaluation) {
    if !cost::check_demand(scenario, plan) {
        let eval = cost::evaluate(scenario, plan, park, cost_model);
        return (f64::INFINITY, eval);
    }
    if !case.machinery_locked() {
        // Fleet reassignment starts from scratch for every candidate: even
        // SU split, then the two greedy optimisers.
        let active = plan.active_tours();
        if park.hu_total() < active.len() || park.su_total() < active.len() {
            let eval = cost::evaluate(scenario, plan, park, cost_model);
            return (f64::INFINITY, eval);
        }
        reset_su_split(plan, park, &active);
        assign::balance_hus_in_place(scenario, plan, park).expect("fleet covers active tours");
        assign::assign_sus_in_place(scenario, plan, park).expect("fleet covers active tours");
    }
    let eval = cost::evaluate(scenario, plan, park, cost_model);
    if !eval.feasible {
        return (f64::INFINITY, eval);
    }
    if case.completion_filter_active() && eval.max_completion > max_completion_bar {
        return (f64::INFINITY, eval);
    }
    (eval.total_cost, eval)
}

fn reset_su_split(plan: &mut Plan, park: &MachineryPark, active: &[usize]) {
    for tour in &mut plan.tours {
        for c in &mut tour.su_counts {
            *c = 0;
        }
    }
    for (l, class) in park.su_classes.iter().enumerate() {
        let base = class.count_total / active.len();
        let rem = class.count_total % active.len();
        for (k, &t) in active.iter().enumerate() {
            plan.tours[t].su_counts[l] = base + usize::from(k < rem);
        }
    }
    loop {
        let Some(&starved) = active.iter().find(|&&t| plan.tours[t].su_total() == 0) else {
            break;
        };
        let donor = *active
            .iter()
            .max_by_key(|&&t| plan.tours[t].su_total())
            .unwrap();
        let class = (0..park.su_classes.len())
            .max_by_key(|&l| plan.tours[donor].su_counts[l])
            .unwrap();
        plan.tours[donor].su_counts[class] -= 1;
        plan.tours[starved].su_counts[class] += 1;
    }
}

/// Reconstructs the candidate a worker built from the broadcast plan and the
/// worker's derived seed. Structurally equal to the worker's candidate by
/// construction.
pub fn replay_worker(
    x: &Plan,
    worker_seed: u64,
    case: &CaseMode,
    double_perturb: bool,
    n_fields: usize,
    n_plants: usize,
) -> (Plan, MoveKind) {
    let mut rng = rng::rng_from_seed(worker_seed);
    let mut candidate = x.clone();
    let kind = perturb(&mut candidate, &mut rng, case, n_fields, n_plants);
    if double_perturb {
        perturb(&mut candidate, &mut rng, case, n_fields, n_plants);
    }
    (candidate, kind)
}

/// Lower cost wins; equal costs go to the lower worker index.
fn better(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

fn worker_argmin(
    scenario: &Scenario,
    park: &MachineryPark,
    basis: &Plan,
    config: &SearchConfig,
    iteration: u64,
    max_completion_bar: f64,
) -> (f64, usize) {
    let run_one = |i: usize| -> (f64, usize) {
        let seed = derive_worker_seed(config.master_seed, iteration, i as u64);
        let (mut candidate, _) = replay_worker(
            basis,
            seed,
            &config.case,
            config.double_perturb,
            scenario.n_fields(),
            scenario.n_plants(),
        );
        let (c, _) = evaluate_candidate(
            scenario,
            park,
            &mut candidate,
            &config.case,
            config.cost_model,
            max_completion_bar,
        );
        debug_assert!(!c.is_nan());
        (c, i)
    };
    #[cfg(feature = "parallel")]
    if config.execution == ExecutionMode::Parallel {
        return (0..config.n_workers)
            .into_par_iter()
            .map(run_one)
            .reduce_with(better)
            .expect("at least one worker");
    }
    (0..config.n_workers)
        .map(run_one)
        .reduce(better)
        .expect("at least one worker")
}

/// Runs the full search: deterministic construction, then `n_iters` rounds
/// of broadcast / perturb / evaluate / argmin / replay. `Case1` performs the
/// construction only. Errors if the baseline plan is infeasible.
pub fn run_search(
    scenario: &Scenario,
    park: &MachineryPark,
    config: &SearchConfig,
) -> Result<SearchResult> {
    config.validate()?;
    let t0 = Instant::now();
    let (baseline_plan, baseline_eval) = init::build_initial(scenario, park, config.cost_model)?;
    if !baseline_eval.feasible {
        return Err(Error::infeasible(
            "baseline plan violates minimum demand constraints",
        ));
    }
    let n_iters = if config.case.init_only() {
        0
    } else {
        config.n_iters
    };

    let mut x_star = baseline_plan.clone();
    let mut best_eval = baseline_eval.clone();
    let mut c_star = baseline_eval.total_cost;
    let mut x_old = baseline_plan;
    let mut x_old_eval = baseline_eval.clone();

    let mut cost_trace = Vec::with_capacity(n_iters);
    let mut accept_trace = Vec::with_capacity(n_iters);
    let mut winner_costs = Vec::with_capacity(n_iters);
    let mut host_rng = rng::host_rng(config.master_seed);

    for it in 0..n_iters as u64 {
        let basis = explore_update(&x_old, &x_star, config.epsilon, &mut host_rng);
        // The completion bar is the broadcast plan's own maximum completion
        // time. The chain re-syncs with the incumbent on every accepted
        // improvement, so the incumbent's bar never increases over accepts.
        let bar = if std::ptr::eq(basis, &x_star) {
            best_eval.max_completion
        } else {
            x_old_eval.max_completion
        };
        let (reported_cost, i_star) = worker_argmin(scenario, park, basis, config, it, bar);

        // Reconstruct the winner from its seed and re-run the evaluation
        // pipeline; the cost must come out bit-identical.
        let seed = derive_worker_seed(config.master_seed, it, i_star as u64);
        let (mut winner, kind) = replay_worker(
            basis,
            seed,
            &config.case,
            config.double_perturb,
            scenario.n_fields(),
            scenario.n_plants(),
        );
        let (replayed_cost, winner_eval) = evaluate_candidate(
            scenario,
            park,
            &mut winner,
            &config.case,
            config.cost_model,
            bar,
        );
        assert!(
            replayed_cost.to_bits() == reported_cost.to_bits(),
            "seed replay diverged from worker report at iteration {it}"
        );
        winner_costs.push(reported_cost);

        // When every worker was discarded the chain follows an infinite-cost
        // candidate whose completion may sit above the bar; the explicit max
        // guard keeps the incumbent's maximum completion nonincreasing even
        // after such excursions.
        let improves = replayed_cost < c_star
            && (!config.case.completion_filter_active()
                || winner_eval.max_completion <= best_eval.max_completion);
        if improves {
            assert!(winner_eval.feasible, "accepted an infeasible candidate");
            x_star = winner.clone();
            c_star = replayed_cost;
            best_eval = winner_eval.clone();
            accept_trace.push(match kind {
                MoveKind::Field => 1,
                MoveKind::Plant => 2,
            });
        } else {
            accept_trace.push(0);
        }
        x_old = winner;
        x_old_eval = winner_eval;
        cost_trace.push(c_star);
    }

    Ok(SearchResult {
        best_plan: x_star,
        best_eval,
        cost_trace,
        accept_trace,
        winner_costs,
        baseline_cost: baseline_eval.total_cost,
        baseline_eval,
        solve_time: t0.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_scenario, PhysicalParams, ScenarioSpec};
    use crate::model::MachineryPark;

    fn small_spec() -> ScenarioSpec {
        ScenarioSpec {
            n_fields: 30,
            n_plants: 4,
            area_km: 20.0,
            field_size_min: 3.0,
            field_size_span: 4.0,
            min_demand: 20.0,
            params: PhysicalParams::paper(),
        }
    }

    fn small_park() -> MachineryPark {
        use crate::model::{HuClass, SuClass};
        MachineryPark::new(
            vec![HuClass {
                work_rate_area: 2.5,
                count_total: 2,
            }],
            vec![
                SuClass {
                    load_capacity: 12.5,
                    fill_time: 0.1,
                    count_total: 3,
                },
                SuClass {
                    load_capacity: 16.5,
                    fill_time: 8.0 / 60.0,
                    count_total: 4,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn epsilon_extremes_pick_deterministically() {
        let s = generate_scenario(1, &small_spec()).unwrap();
        let park = small_park();
        let (a, _) = init::build_initial(&s, &park, CostModel::Skeleton).unwrap();
        let mut b = a.clone();
        b.tours[0].plant_sequence.reverse();
        b.tours[0].fields_per_plant.reverse();
        let mut rng = rng::rng_from_seed(1);
        for _ in 0..32 {
            assert!(std::ptr::eq(explore_update(&a, &b, 1.0, &mut rng), &b));
            assert!(std::ptr::eq(explore_update(&a, &b, 0.0, &mut rng), &a));
        }
    }

    #[test]
    fn perturb_preserves_partition() {
        let s = generate_scenario(2, &small_spec()).unwrap();
        let park = small_park();
        let (plan, _) = init::build_initial(&s, &park, CostModel::Skeleton).unwrap();
        for seed in 0..200u64 {
            for case in [CaseMode::Case2, CaseMode::Case4] {
                let (cand, _) = replay_worker(&plan, seed, &case, false, s.n_fields(), s.n_plants());
                cand.validate_partition(&s).unwrap();
            }
        }
    }

    #[test]
    fn locked_single_field_reinsertion_is_identity() {
        use crate::plan::{Plan, Tour};
        let plan = Plan {
            tours: vec![Tour {
                plant_sequence: vec![0],
                fields_per_plant: vec![vec![0]],
                hu_counts: vec![1],
                su_counts: vec![1],
            }],
        };
        for seed in 0..20u64 {
            let (cand, kind) = replay_worker(&plan, seed, &CaseMode::Case2, false, 1, 1);
            assert_eq!(cand, plan);
            let _ = kind;
        }
    }

    #[test]
    fn plant_move_preserves_field_pairing() {
        let s = generate_scenario(3, &small_spec()).unwrap();
        let park = small_park();
        let (plan, _) = init::build_initial(&s, &park, CostModel::Skeleton).unwrap();
        let before = plan.plant_of_fields(s.n_fields());
        // Force plant moves by drawing until one occurs.
        let mut seen_plant_move = false;
        for seed in 0..400u64 {
            let mut cand = plan.clone();
            let mut rng = rng::rng_from_seed(seed);
            let kind = perturb(&mut cand, &mut rng, &CaseMode::Case4, s.n_fields(), s.n_plants());
            if kind == MoveKind::Plant {
                seen_plant_move = true;
                assert_eq!(cand.plant_of_fields(s.n_fields()), before);
            }
        }
        assert!(seen_plant_move);
    }

    #[test]
    fn field_move_frequency_matches_pool_share() {
        // Vertices are drawn uniformly over fields and plants, so field
        // moves occur with probability n_f / (n_f + n_b).
        let s = generate_scenario(4, &small_spec()).unwrap();
        let park = small_park();
        let (plan, _) = init::build_initial(&s, &park, CostModel::Skeleton).unwrap();
        let n = 10_000;
        let mut fields = 0usize;
        for seed in 0..n as u64 {
            let (_, kind) = replay_worker(&plan, seed, &CaseMode::Case4, false, s.n_fields(), s.n_plants());
            if kind == MoveKind::Field {
                fields += 1;
            }
        }
        let p = s.n_fields() as f64 / (s.n_fields() + s.n_plants()) as f64;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        let expected = n as f64 * p;
        assert!(
            (fields as f64 - expected).abs() < 4.0 * sigma,
            "{fields} field moves vs expected {expected:.0} +/- {sigma:.0}"
        );
    }

    #[test]
    fn zero_iterations_returns_baseline() {
        let s = generate_scenario(5, &small_spec()).unwrap();
        let park = small_park();
        let mut cfg = SearchConfig::new(CaseMode::Case2, 0.5, 0, 7);
        cfg.n_workers = 4;
        let res = run_search(&s, &park, &cfg).unwrap();
        let (baseline, baseline_eval) = init::build_initial(&s, &park, CostModel::Skeleton).unwrap();
        assert_eq!(res.best_plan, baseline);
        assert_eq!(res.best_eval, baseline_eval);
        assert!(res.cost_trace.is_empty());
    }

    #[test]
    fn case1_ignores_iterations() {
        let s = generate_scenario(5, &small_spec()).unwrap();
        let park = small_park();
        let mut cfg = SearchConfig::new(CaseMode::Case1, 0.5, 500, 7);
        cfg.n_workers = 4;
        let res = run_search(&s, &park, &cfg).unwrap();
        assert!(res.cost_trace.is_empty());
        assert_eq!(res.best_eval.total_cost, res.baseline_cost);
    }

    #[test]
    fn same_config_reproduces_bitwise() {
        let s = generate_scenario(6, &small_spec()).unwrap();
        let park = small_park();
        let mut cfg = SearchConfig::new(CaseMode::Case4, 0.5, 60, 11);
        cfg.n_workers = 8;
        let a = run_search(&s, &park, &cfg).unwrap();
        let b = run_search(&s, &park, &cfg).unwrap();
        assert_eq!(a.best_plan, b.best_plan);
        assert_eq!(a.cost_trace, b.cost_trace);
        assert_eq!(a.accept_trace, b.accept_trace);
        assert_eq!(a.winner_costs, b.winner_costs);
        assert_eq!(a.best_eval, b.best_eval);
    }

    #[test]
    fn replay_differs_across_seeds() {
        let s = generate_scenario(7, &small_spec()).unwrap();
        let park = small_park();
        let (plan, _) = init::build_initial(&s, &park, CostModel::Skeleton).unwrap();
        let (reference, _) = replay_worker(&plan, 0, &CaseMode::Case4, false, s.n_fields(), s.n_plants());
        let mut distinct = 0;
        for seed in 1..=1000u64 {
            let (cand, _) = replay_worker(&plan, seed, &CaseMode::Case4, false, s.n_fields(), s.n_plants());
            if cand != reference {
                distinct += 1;
            }
        }
        assert!(distinct > 950, "only {distinct}/1000 replays differed");
    }

    #[test]
    fn monotone_trace_and_feasible_best() {
        let s = generate_scenario(8, &small_spec()).unwrap();
        let park = small_park();
        for case in [CaseMode::Case2, CaseMode::Case3, CaseMode::Case4] {
            let mut cfg = SearchConfig::new(case, 0.5, 150, 3);
            cfg.n_workers = 8;
            let res = run_search(&s, &park, &cfg).unwrap();
            for w in res.cost_trace.windows(2) {
                assert!(w[1] <= w[0]);
            }
            assert!(res.best_eval.feasible);
            res.best_plan.validate(&s, &park).unwrap();
        }
    }

    #[test]
    fn completion_filter_boundary() {
        // Candidates at the bar pass; candidates above it are discarded.
        let s = generate_scenario(9, &small_spec()).unwrap();
        let park = small_park();
        let (plan, eval) = init::build_initial(&s, &park, CostModel::Skeleton).unwrap();
        let case = CaseMode::Custom {
            field_assignment_locked: false,
            machinery_locked: true,
            completion_filter_active: true,
        };
        let mut cand = plan.clone();
        let (at_bar, _) =
            evaluate_candidate(&s, &park, &mut cand, &case, CostModel::Skeleton, eval.max_completion);
        assert!(at_bar.is_finite());
        let mut cand = plan.clone();
        let (above_bar, _) = evaluate_candidate(
            &s,
            &park,
            &mut cand,
            &case,
            CostModel::Skeleton,
            eval.max_completion * 0.999,
        );
        assert!(above_bar.is_infinite());
    }

    #[test]
    fn case2_lock_preserves_field_plant_pairing() {
        let s = generate_scenario(10, &small_spec()).unwrap();
        let park = small_park();
        let mut cfg = SearchConfig::new(CaseMode::Case2, 0.25, 200, 5);
        cfg.n_workers = 8;
        let res = run_search(&s, &park, &cfg).unwrap();
        let (baseline, _) = init::build_initial(&s, &park, CostModel::Skeleton).unwrap();
        assert_eq!(
            res.best_plan.plant_of_fields(s.n_fields()),
            baseline.plant_of_fields(s.n_fields())
        );
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn execution_modes_agree_bitwise() {
        let s = generate_scenario(11, &small_spec()).unwrap();
        let park = small_park();
        let mut cfg = SearchConfig::new(CaseMode::Case4, 0.5, 80, 13);
        cfg.n_workers = 8;
        cfg.execution = ExecutionMode::Parallel;
        let a = run_search(&s, &park, &cfg).unwrap();
        cfg.execution = ExecutionMode::Sequential;
        let b = run_search(&s, &park, &cfg).unwrap();
        assert_eq!(a.best_plan, b.best_plan);
        assert_eq!(a.cost_trace, b.cost_trace);
        assert_eq!(a.winner_costs, b.winner_costs);
    }
}
