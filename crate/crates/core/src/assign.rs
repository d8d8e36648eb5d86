//! Embedded fleet assignment: HU balancing against the maximum completion
//! time, and the greedy SU redistribution against the worst average waiting
//! time.

use crate::cost::{self, CostModel, TourGeometry};
use crate::error::{Error, Result};
use crate::model::{MachineryPark, Scenario};
use crate::plan::Plan;

/// Absolute tolerance on "cannot be further reduced" for the max waiting
/// time, hours.
const WAIT_REDUCTION_TOL: f64 = 1e-9;

fn active_indices(plan: &Plan) -> Vec<usize> {
    plan.active_tours()
}

/// Even per-class split over the given tours, remainder to the lowest
/// indices, then repair so that no listed tour is left without any unit.
fn even_split(counts_per_class: &[usize], tours: &[usize], n_tours: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0usize; counts_per_class.len()]; n_tours];
    for (l, &total) in counts_per_class.iter().enumerate() {
        let base = total / tours.len();
        let rem = total % tours.len();
        for (k, &t) in tours.iter().enumerate() {
            out[t][l] = base + usize::from(k < rem);
        }
    }
    // Starvation can occur with several classes: each class's remainder goes
    // to the lowest indices, so late tours may end up with zero units even
    // though the totals would cover them.
    loop {
        let Some(&starved) = tours
            .iter()
            .find(|&&t| out[t].iter().sum::<usize>() == 0)
        else {
            break;
        };
        let donor = *tours
            .iter()
            .max_by_key(|&&t| out[t].iter().sum::<usize>())
            .expect("nonempty tour list");
        if out[donor].iter().sum::<usize>() <= 1 {
            break; // not enough units to cover every tour; caller validates
        }
        let class = (0..counts_per_class.len())
            .max_by_key(|&l| out[donor][l])
            .expect("nonempty class list");
        out[donor][class] -= 1;
        out[starved][class] += 1;
    }
    out
}

struct TourLoad {
    road_h: f64,
    area_ha: f64,
}

fn completion(load: &TourLoad, hu_counts: &[usize], park: &MachineryPark) -> f64 {
    if load.area_ha == 0.0 && load.road_h == 0.0 {
        return 0.0;
    }
    let rate: f64 = hu_counts
        .iter()
        .zip(&park.hu_classes)
        .map(|(&n, c)| n as f64 * c.work_rate_area)
        .sum();
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    load.road_h + load.area_ha / rate
}

/// HU classes sorted by rising work rate (ties by class index).
fn classes_by_rising_rate(park: &MachineryPark) -> Vec<usize> {
    let mut order: Vec<usize> = (0..park.hu_classes.len()).collect();
    order.sort_by(|&a, &b| {
        park.hu_classes[a]
            .work_rate_area
            .partial_cmp(&park.hu_classes[b].work_rate_area)
            .unwrap()
            .then(a.cmp(&b))
    });
    order
}

/// SU classes sorted by rising fill time (ties by class index).
fn classes_by_rising_fill(park: &MachineryPark) -> Vec<usize> {
    let mut order: Vec<usize> = (0..park.su_classes.len()).collect();
    order.sort_by(|&a, &b| {
        park.su_classes[a]
            .fill_time
            .partial_cmp(&park.su_classes[b].fill_time)
            .unwrap()
            .then(a.cmp(&b))
    });
    order
}

pub(crate) fn balance_hus_in_place(
    scenario: &Scenario,
    plan: &mut Plan,
    park: &MachineryPark,
) -> Result<()> {
    let active = active_indices(plan);
    if active.is_empty() {
        return Err(Error::invalid("plan has no active tours"));
    }
    if park.hu_total() < active.len() {
        return Err(Error::infeasible(format!(
            "{} active tours but only {} HUs",
            active.len(),
            park.hu_total()
        )));
    }

    // Start from the even split; inactive slots carry nothing.
    let totals: Vec<usize> = park.hu_classes.iter().map(|c| c.count_total).collect();
    let split = even_split(&totals, &active, plan.tours.len());
    for (t, counts) in split.into_iter().enumerate() {
        plan.tours[t].hu_counts = counts;
    }

    let loads: Vec<TourLoad> = plan
        .tours
        .iter()
        .map(|t| {
            let geom = cost::tour_geometry(scenario, t, CostModel::Skeleton);
            TourLoad {
                road_h: geom.hu_km / scenario.params().v_hu_edge,
                area_ha: geom.area_ha,
            }
        })
        .collect();
    let class_order = classes_by_rising_rate(park);

    loop {
        let times: Vec<f64> = active
            .iter()
            .map(|&t| completion(&loads[t], &plan.tours[t].hu_counts, park))
            .collect();
        let (max_pos, &current_max) = times
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
            .expect("active tours present");
        let g_max = active[max_pos];

        // Donors in order of rising completion time (the minimum-completion
        // tour first), then candidate classes in order of rising work rate;
        // accept the first move that strictly reduces the maximum.
        let mut donor_order: Vec<usize> = (0..active.len()).filter(|&k| k != max_pos).collect();
        donor_order.sort_by(|&a, &b| times[a].partial_cmp(&times[b]).unwrap().then(a.cmp(&b)));

        let mut applied = false;
        'outer: for &dk in &donor_order {
            let donor = active[dk];
            if plan.tours[donor].hu_total() <= 1 {
                continue;
            }
            for &l in &class_order {
                if plan.tours[donor].hu_counts[l] == 0 {
                    continue;
                }
                plan.tours[donor].hu_counts[l] -= 1;
                plan.tours[g_max].hu_counts[l] += 1;
                let new_max = active
                    .iter()
                    .map(|&t| completion(&loads[t], &plan.tours[t].hu_counts, park))
                    .fold(f64::NEG_INFINITY, f64::max);
                if new_max < current_max {
                    applied = true;
                    break 'outer;
                }
                plan.tours[donor].hu_counts[l] += 1;
                plan.tours[g_max].hu_counts[l] -= 1;
            }
        }
        if !applied {
            return Ok(());
        }
    }
}

fn wait_of(geom: &TourGeometry, counts: &[usize], hu_total: usize, park: &MachineryPark) -> f64 {
    if geom.n_fields == 0 || hu_total == 0 {
        return 0.0;
    }
    let mut case: Option<usize> = None;
    for (l, class) in park.su_classes.iter().enumerate() {
        if counts[l] == 0 {
            continue;
        }
        match case {
            None => case = Some(l),
            Some(c) if class.fill_time > park.su_classes[c].fill_time => case = Some(l),
            _ => {}
        }
    }
    let Some(case) = case else { return 0.0 };
    let mut cover = 0.0;
    for (l, class) in park.su_classes.iter().enumerate() {
        let n = counts[l] as f64;
        cover += if l == case {
            (n - 1.0) * class.fill_time
        } else {
            n * class.fill_time
        };
    }
    geom.mean_edge_h - cover / hu_total as f64
}

pub(crate) fn assign_sus_in_place(
    scenario: &Scenario,
    plan: &mut Plan,
    park: &MachineryPark,
) -> Result<()> {
    let active = active_indices(plan);
    if active.is_empty() {
        return Err(Error::invalid("plan has no active tours"));
    }
    if park.su_total() < active.len() {
        return Err(Error::infeasible(format!(
            "{} active tours but only {} SUs",
            active.len(),
            park.su_total()
        )));
    }
    if active.len() == 1 {
        return Ok(());
    }

    let geoms: Vec<TourGeometry> = plan
        .tours
        .iter()
        .map(|t| cost::tour_geometry(scenario, t, CostModel::Skeleton))
        .collect();
    let fill_order = classes_by_rising_fill(park);

    let tour_wait = |plan: &Plan, t: usize| -> f64 {
        wait_of(
            &geoms[t],
            &plan.tours[t].su_counts,
            plan.tours[t].hu_total(),
            park,
        )
    };

    loop {
        let waits: Vec<f64> = active.iter().map(|&t| tour_wait(plan, t)).collect();
        let max_pos = argmax(&waits);
        let current_max = waits[max_pos];
        let (max2_pos, min_pos) = if active.len() == 2 {
            // Degenerate case: the other tour plays both roles.
            let other = 1 - max_pos;
            (other, other)
        } else {
            let max2_pos = argmax_excluding(&waits, &[max_pos]);
            let min_pos = argmin_excluding(&waits, &[max_pos, max2_pos]);
            (max2_pos, min_pos)
        };
        let g_max = active[max_pos];
        let g_min = active[min_pos];
        let wait_max2 = waits[max2_pos];

        if plan.tours[g_min].su_total() <= 1 {
            return Ok(());
        }
        let available: Vec<usize> = fill_order
            .iter()
            .copied()
            .filter(|&l| plan.tours[g_min].su_counts[l] > 0)
            .collect();
        let Some(&largest) = available.last() else {
            return Ok(());
        };

        // Try classes in rising fill-time order; accept the first transfer
        // that pushes the worst tour below the second worst, or fall back to
        // the largest available class.
        let mut moved = None;
        for &l in &available {
            plan.tours[g_min].su_counts[l] -= 1;
            plan.tours[g_max].su_counts[l] += 1;
            let new_wait_max = tour_wait(plan, g_max);
            if new_wait_max < wait_max2 || l == largest {
                moved = Some(l);
                break;
            }
            plan.tours[g_min].su_counts[l] += 1;
            plan.tours[g_max].su_counts[l] -= 1;
        }
        let moved = moved.expect("largest class always accepted");

        let new_max = active
            .iter()
            .map(|&t| tour_wait(plan, t))
            .fold(f64::NEG_INFINITY, f64::max);
        if new_max < current_max - WAIT_REDUCTION_TOL {
            continue;
        }
        // The accepted transfer did not reduce the worst waiting time: undo
        // and stop.
        plan.tours[g_min].su_counts[moved] += 1;
        plan.tours[g_max].su_counts[moved] -= 1;
        return Ok(());
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn argmax_excluding(values: &[f64], excluded: &[usize]) -> usize {
    let mut best = None;
    for (i, &v) in values.iter().enumerate() {
        if excluded.contains(&i) {
            continue;
        }
        match best {
            None => best = Some(i),
            Some(b) if v > values[b] => best = Some(i),
            _ => {}
        }
    }
    best.expect("nonempty after exclusion")
}

fn argmin_excluding(values: &[f64], excluded: &[usize]) -> usize {
    let mut best = None;
    for (i, &v) in values.iter().enumerate() {
        if excluded.contains(&i) {
            continue;
        }
        match best {
            None => best = Some(i),
            Some(b) if v < values[b] => best = Some(i),
            _ => {}
        }
    }
    best.expect("nonempty after exclusion")
}

/// Rebalances HU counts over the active tours to minimise the maximum
/// completion time: start from an even split, then repeatedly move one HU
/// onto the worst tour while that strictly reduces the maximum. Donors are
/// tried from the least-loaded tour upward and classes in order of rising
/// work rate; active tours never drop below one HU.
pub fn balance_hus(scenario: &Scenario, plan: &Plan, park: &MachineryPark) -> Result<Plan> {
    let mut out = plan.clone();
    balance_hus_in_place(scenario, &mut out, park)?;
    Ok(out)
}

/// Redistributes SUs between tours to reduce the worst average waiting time:
/// repeatedly move one SU from the best tour onto the worst, choosing the
/// class by rising fill time, until the worst waiting time cannot be reduced
/// further. Refines the plan's current SU counts; active tours never drop
/// below one SU.
pub fn assign_sus(scenario: &Scenario, plan: &Plan, park: &MachineryPark) -> Result<Plan> {
    let mut out = plan.clone();
    assign_sus_in_place(scenario, &mut out, park)?;
    Ok(out)
}
