//! Deterministic construction heuristic: the baseline plan built from
//! chained nearest-neighbour searches, replicating the sequential decisions
//! of a human scheduler. No randomness is involved anywhere.

use crate::cost::{self, CostModel, Evaluation};
use crate::error::{Error, Result};
use crate::model::{MachineryPark, Scenario};
use crate::plan::{Plan, Tour};

/// Distributes the plants over `n_tours` ordered sequences. Each tour in
/// index order grows a nearest-neighbour chain anchored at HQ until it
/// reaches its quota `ceil(remaining / tours_left)`; distance ties break on
/// the lowest plant id.
pub fn order_plants(scenario: &Scenario, n_tours: usize) -> Result<Vec<Vec<usize>>> {
    let n_plants = scenario.n_plants();
    if n_tours < 1 || n_tours > n_plants {
        return Err(Error::invalid(format!(
            "n_tours must be in 1..={n_plants}, got {n_tours}"
        )));
    }
    let mut unassigned: Vec<bool> = vec![true; n_plants];
    let mut remaining = n_plants;
    let mut tours = Vec::with_capacity(n_tours);
    for t in 0..n_tours {
        let quota = remaining.div_ceil(n_tours - t);
        let mut seq = Vec::with_capacity(quota);
        let mut anchor = Scenario::HQ_VERTEX;
        for _ in 0..quota {
            let next = (0..n_plants)
                .filter(|&b| unassigned[b])
                .min_by(|&a, &b| {
                    scenario
                        .dist(anchor, scenario.plant_vertex(a))
                        .partial_cmp(&scenario.dist(anchor, scenario.plant_vertex(b)))
                        .unwrap()
                        .then(a.cmp(&b))
                })
                .expect("quota never exceeds remaining plants");
            unassigned[next] = false;
            seq.push(next);
            anchor = scenario.plant_vertex(next);
        }
        remaining -= quota;
        tours.push(seq);
    }
    Ok(tours)
}

/// Assigns every field to a plant. Phase 1 walks the fields in ascending id
/// order, sending each to its nearest plant still short of its minimum
/// demand; once every plant is covered, phase 2 sends the remaining fields
/// to their nearest plant unconditionally.
pub fn assign_fields(scenario: &Scenario) -> Result<Vec<usize>> {
    let n_plants = scenario.n_plants();
    let mut acc = vec![0.0f64; n_plants];
    let mut under: Vec<usize> = (0..n_plants)
        .filter(|&b| scenario.plant(b).min_demand > 0.0)
        .collect();
    let mut assignment = vec![usize::MAX; scenario.n_fields()];
    for f in 0..scenario.n_fields() {
        let target = if under.is_empty() {
            nearest_plant(scenario, f, (0..n_plants).collect::<Vec<_>>().as_slice())
        } else {
            nearest_plant(scenario, f, &under)
        };
        assignment[f] = target;
        acc[target] += scenario.field_supply(f);
        if acc[target] >= scenario.plant(target).min_demand {
            under.retain(|&b| b != target);
        }
    }
    if !under.is_empty() {
        return Err(Error::infeasible(format!(
            "fields exhausted with {} plants below minimum demand",
            under.len()
        )));
    }
    Ok(assignment)
}

fn nearest_plant(scenario: &Scenario, field: usize, candidates: &[usize]) -> usize {
    *candidates
        .iter()
        .min_by(|&&a, &&b| {
            scenario
                .field_plant_km(field, a)
                .partial_cmp(&scenario.field_plant_km(field, b))
                .unwrap()
                .then(a.cmp(&b))
        })
        .expect("candidate list nonempty")
}

/// Orders the fields of every plant by nearest-neighbour chaining. The chain
/// of a tour's first plant anchors at HQ; each subsequent plant's chain
/// anchors at the previous plant's last field. Returns a routing-only plan
/// (fleet counts zeroed).
pub fn order_fields(
    scenario: &Scenario,
    assignment: &[usize],
    plant_tours: &[Vec<usize>],
    park: &MachineryPark,
) -> Plan {
    let mut per_plant: Vec<Vec<usize>> = vec![Vec::new(); scenario.n_plants()];
    for (f, &b) in assignment.iter().enumerate() {
        per_plant[b].push(f);
    }
    let mut tours = Vec::with_capacity(plant_tours.len());
    for seq in plant_tours {
        let mut fields_per_plant = Vec::with_capacity(seq.len());
        let mut anchor = Scenario::HQ_VERTEX;
        for &b in seq {
            let mut pool = per_plant[b].clone();
            let mut ordered = Vec::with_capacity(pool.len());
            while !pool.is_empty() {
                let (k, _) = pool
                    .iter()
                    .enumerate()
                    .min_by(|(_, &a), (_, &b)| {
                        scenario
                            .dist(anchor, scenario.field_vertex(a))
                            .partial_cmp(&scenario.dist(anchor, scenario.field_vertex(b)))
                            .unwrap()
                            .then(a.cmp(&b))
                    })
                    .unwrap();
                let f = pool.swap_remove(k);
                anchor = scenario.field_vertex(f);
                ordered.push(f);
            }
            fields_per_plant.push(ordered);
        }
        tours.push(Tour {
            plant_sequence: seq.clone(),
            fields_per_plant,
            hu_counts: vec![0; park.hu_classes.len()],
            su_counts: vec![0; park.su_classes.len()],
        });
    }
    Plan { tours }
}

/// Builds and evaluates the deterministic baseline plan: one tour slot per
/// available HU, plants partitioned over `min(N_HU, N_B)` active tours, HU
/// units dealt one per active tour and SU classes split evenly.
pub fn build_initial(
    scenario: &Scenario,
    park: &MachineryPark,
    model: CostModel,
) -> Result<(Plan, Evaluation)> {
    let n_slots = park.hu_total();
    let n_active = n_slots.min(scenario.n_plants());
    if park.su_total() < n_active {
        return Err(Error::infeasible(format!(
            "{n_active} tours cannot be crewed with {} SUs",
            park.su_total()
        )));
    }
    let plant_tours = order_plants(scenario, n_active)?;
    let assignment = assign_fields(scenario)?;
    let mut plan = order_fields(scenario, &assignment, &plant_tours, park);
    for _ in n_active..n_slots {
        plan.tours
            .push(Tour::empty(park.hu_classes.len(), park.su_classes.len()));
    }

    // HUs: deal units one at a time over the active tours, class by class.
    let mut slot = 0usize;
    for (l, class) in park.hu_classes.iter().enumerate() {
        for _ in 0..class.count_total {
            plan.tours[slot % n_active].hu_counts[l] += 1;
            slot += 1;
        }
    }
    // SUs: per-class even split, remainder to the lowest tour indices.
    for (l, class) in park.su_classes.iter().enumerate() {
        let base = class.count_total / n_active;
        let rem = class.count_total % n_active;
        for t in 0..n_active {
            plan.tours[t].su_counts[l] = base + usize::from(t < rem);
        }
    }
    // Multi-class remainders can leave a tour without any SU even though the
    // totals cover all tours; hand it a unit from the best-stocked tour.
    loop {
        let Some(starved) = (0..n_active).find(|&t| plan.tours[t].su_total() == 0) else {
            break;
        };
        let donor = (0..n_active)
            .max_by_key(|&t| plan.tours[t].su_total())
            .unwrap();
        let class = (0..park.su_classes.len())
            .max_by_key(|&l| plan.tours[donor].su_counts[l])
            .unwrap();
        plan.tours[donor].su_counts[class] -= 1;
        plan.tours[starved].su_counts[class] += 1;
    }

    let eval = cost::evaluate(scenario, &plan, park, model);
    Ok((plan, eval))
}
