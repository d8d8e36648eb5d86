//! Plan evaluation: demand feasibility, path-length cost, completion times
//! and harvester waiting times.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{shuttle_count, MachineryPark, Scenario};
use crate::plan::{Plan, Tour};

/// How support-unit travel outside shuttling is accounted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostModel {
    /// SUs drive one leg from HQ to the tour's first field and one leg from
    /// the last served plant back to HQ; empty repositioning between fields
    /// is absorbed in the doubled shuttle drives.
    Skeleton,
    /// SUs additionally accompany the harvesters on every inter-field leg.
    Accompany,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::Skeleton
    }
}

/// Result of evaluating a plan.
///
/// `total_cost` is the search objective: the sum of per-tour costs for
/// feasible plans and `+inf` for plans violating demand or fleet invariants,
/// matching the discard rule of the search. Per-tour entries always hold the
/// raw geometric values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub per_tour_cost: Vec<f64>,
    pub total_cost: f64,
    /// Hours until each tour finishes harvesting (road travel plus in-field
    /// work); zero for inactive slots.
    pub completion_times: Vec<f64>,
    /// Average harvester waiting time per tour, hours; may be negative when
    /// the SU fleet over-covers the shuttle round trips.
    pub avg_waiting_times: Vec<f64>,
    /// Maximum completion time over active tours.
    pub max_completion: f64,
    pub feasible: bool,
}

/// True iff every plant receives at least its minimum demand (in the
/// configured supply unit) from the fields assigned to it.
pub fn check_demand(scenario: &Scenario, plan: &Plan) -> bool {
    let mut acc = vec![0.0f64; scenario.n_plants()];
    for tour in &plan.tours {
        for (b, f) in tour.plant_field_pairs() {
            acc[b] += scenario.field_supply(f);
        }
    }
    scenario
        .plants()
        .iter()
        .enumerate()
        .all(|(b, p)| acc[b] >= p.min_demand)
}

/// Per-tour quantities that depend only on the routing, not on the fleet.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct TourGeometry {
    /// HU path: HQ -> fields in harvest order -> HQ.
    pub hu_km: f64,
    /// Fixed per-SU legs under the active cost model.
    pub su_skeleton_km: f64,
    /// Total field area on the tour, ha.
    pub area_ha: f64,
    /// Mean over served plants of the mean field<->plant round-trip travel
    /// time, hours. This is the routing-dependent half of the waiting time.
    pub mean_edge_h: f64,
    pub n_fields: usize,
}

pub(crate) fn tour_geometry(scenario: &Scenario, tour: &Tour, model: CostModel) -> TourGeometry {
    let mut geom = TourGeometry::default();
    let mut inter_km = 0.0;
    let mut first_field = None;
    let mut prev_field: Option<usize> = None;
    let mut last_served_plant = None;
    let mut edge_mean_sum = 0.0;
    let mut plants_with_fields = 0usize;
    for (pi, &b) in tour.plant_sequence.iter().enumerate() {
        let fs = &tour.fields_per_plant[pi];
        if fs.is_empty() {
            continue;
        }
        plants_with_fields += 1;
        last_served_plant = Some(b);
        let mut dist_sum = 0.0;
        for &f in fs {
            geom.area_ha += scenario.field(f).size_ha;
            dist_sum += scenario.field_plant_km(f, b);
            match prev_field {
                None => first_field = Some(f),
                Some(p) => {
                    inter_km += scenario.dist(scenario.field_vertex(p), scenario.field_vertex(f));
                }
            }
            prev_field = Some(f);
        }
        edge_mean_sum += dist_sum / fs.len() as f64;
        geom.n_fields += fs.len();
    }
    if let (Some(ff), Some(lf), Some(lb)) = (first_field, prev_field, last_served_plant) {
        let first_km = scenario.dist(Scenario::HQ_VERTEX, scenario.field_vertex(ff));
        let last_km = scenario.dist(scenario.field_vertex(lf), Scenario::HQ_VERTEX);
        geom.hu_km = first_km + inter_km + last_km;
        geom.su_skeleton_km =
            first_km + scenario.dist(scenario.plant_vertex(lb), Scenario::HQ_VERTEX);
        if model == CostModel::Accompany {
            geom.su_skeleton_km += inter_km;
        }
        geom.mean_edge_h =
            (2.0 / scenario.params().v_su_edge) * (edge_mean_sum / plants_with_fields as f64);
    }
    geom
}

/// Shuttle kilometres for a tour: each field's tonnage is split across the
/// tour's SU classes proportionally to their aggregate capacity share, and
/// every shuttle drive is a field-to-plant round trip. Reduces to the plain
/// ceiling rule when a single class is present.
pub(crate) fn tour_shuttle_km(scenario: &Scenario, tour: &Tour, park: &MachineryPark) -> f64 {
    let cap_total: f64 = tour
        .su_counts
        .iter()
        .zip(&park.su_classes)
        .map(|(&n, c)| n as f64 * c.load_capacity)
        .sum();
    if cap_total <= 0.0 {
        return 0.0;
    }
    let mut km = 0.0;
    for (b, f) in tour.plant_field_pairs() {
        let supply_t = scenario.field_supply_t(f);
        let mut drives = 0u64;
        for (l, class) in park.su_classes.iter().enumerate() {
            let n = tour.su_counts[l];
            if n == 0 {
                continue;
            }
            let share = (n as f64 * class.load_capacity) / cap_total;
            drives +=
                shuttle_count(share * supply_t, class.load_capacity).expect("validated capacity");
        }
        km += 2.0 * drives as f64 * scenario.field_plant_km(f, b);
    }
    km
}

pub(crate) fn tour_cost_from(geom: &TourGeometry, tour: &Tour, shuttle_km: f64) -> f64 {
    tour.hu_total() as f64 * geom.hu_km + tour.su_total() as f64 * geom.su_skeleton_km + shuttle_km
}

pub(crate) fn completion_from(
    geom: &TourGeometry,
    tour: &Tour,
    scenario: &Scenario,
    park: &MachineryPark,
) -> f64 {
    if geom.n_fields == 0 {
        return 0.0;
    }
    let rate: f64 = tour
        .hu_counts
        .iter()
        .zip(&park.hu_classes)
        .map(|(&n, c)| n as f64 * c.work_rate_area)
        .sum();
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    geom.hu_km / scenario.params().v_hu_edge + geom.area_ha / rate
}

/// SU class with the largest fill time among classes present on the tour
/// (ties broken by lowest class index).
pub(crate) fn largest_fill_class(tour: &Tour, park: &MachineryPark) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (l, class) in park.su_classes.iter().enumerate() {
        if tour.su_counts[l] == 0 {
            continue;
        }
        match best {
            None => best = Some(l),
            Some(b) if class.fill_time > park.su_classes[b].fill_time => best = Some(l),
            _ => {}
        }
    }
    best
}

/// The fleet-dependent half of the waiting time: staggered fill capacity of
/// the tour's SUs under the given case class, hours.
pub(crate) fn fill_cover_h(tour: &Tour, park: &MachineryPark, case_class: usize) -> f64 {
    let n_hu = tour.hu_total() as f64;
    let mut sum = 0.0;
    for (l, class) in park.su_classes.iter().enumerate() {
        let n = tour.su_counts[l] as f64;
        if l == case_class {
            sum += (n - 1.0) * class.fill_time;
        } else {
            sum += n * class.fill_time;
        }
    }
    sum / n_hu
}

pub(crate) fn avg_wait_from(geom: &TourGeometry, tour: &Tour, park: &MachineryPark) -> f64 {
    if geom.n_fields == 0 || tour.hu_total() == 0 {
        return 0.0;
    }
    match largest_fill_class(tour, park) {
        Some(case) => geom.mean_edge_h - fill_cover_h(tour, park, case),
        None => 0.0,
    }
}

/// Accumulated path length of one tour in kilometres: HU path times the HU
/// count, SU skeleton legs times the SU count, plus shuttle round trips.
/// Inactive tours cost zero.
pub fn tour_cost(scenario: &Scenario, tour: &Tour, park: &MachineryPark, model: CostModel) -> f64 {
    if !tour.is_active() {
        return 0.0;
    }
    let geom = tour_geometry(scenario, tour, model);
    tour_cost_from(&geom, tour, tour_shuttle_km(scenario, tour, park))
}

/// Completion time of one tour in hours: HU road travel plus total field
/// area over the aggregated HU work rate. Waiting times are not included;
/// they are controlled separately by the SU assignment.
pub fn completion_time(scenario: &Scenario, tour: &Tour, park: &MachineryPark) -> f64 {
    if !tour.is_active() {
        return 0.0;
    }
    let geom = tour_geometry(scenario, tour, CostModel::Skeleton);
    completion_from(&geom, tour, scenario, park)
}

/// Harvester waiting time for one (field, plant) service on a tour under
/// the given SU case class: the field<->plant round-trip travel time minus
/// the staggered fill cover of the tour's SU fleet. Positive values mean
/// the harvester idles between transfers.
pub fn waiting_time(
    scenario: &Scenario,
    tour: &Tour,
    park: &MachineryPark,
    field: usize,
    plant: usize,
    case_class: usize,
) -> Result<f64> {
    let served = tour
        .plant_sequence
        .iter()
        .zip(&tour.fields_per_plant)
        .any(|(&b, fs)| b == plant && fs.contains(&field));
    if !served {
        return Err(Error::invalid(format!(
            "field {field} is not served at plant {plant} on this tour"
        )));
    }
    if case_class >= park.su_classes.len() || tour.su_counts[case_class] == 0 {
        return Err(Error::invalid(format!(
            "case class {case_class} is not present on this tour"
        )));
    }
    if tour.hu_total() == 0 {
        return Err(Error::invalid("tour has no harvesting units"));
    }
    let t_edge = 2.0 * scenario.field_plant_km(field, plant) / scenario.params().v_su_edge;
    Ok(t_edge - fill_cover_h(tour, park, case_class))
}

/// Average waiting time of a tour: mean over served plants of the mean over
/// their fields of [`waiting_time`] with the largest-fill-time class present
/// on the tour. Plants without fields are skipped; tours without fields
/// average to zero.
pub fn avg_waiting_time(scenario: &Scenario, tour: &Tour, park: &MachineryPark) -> f64 {
    if !tour.is_active() || tour.hu_total() == 0 {
        return 0.0;
    }
    let case = match largest_fill_class(tour, park) {
        Some(c) => c,
        None => return 0.0,
    };
    let mut outer = 0.0;
    let mut plants = 0usize;
    for (pi, &b) in tour.plant_sequence.iter().enumerate() {
        let fs = &tour.fields_per_plant[pi];
        if fs.is_empty() {
            continue;
        }
        let inner: f64 = fs
            .iter()
            .map(|&f| waiting_time(scenario, tour, park, f, b, case).expect("field on tour"))
            .sum();
        outer += inner / fs.len() as f64;
        plants += 1;
    }
    if plants == 0 {
        0.0
    } else {
        outer / plants as f64
    }
}

/// Evaluates a full plan. Demand violations and active tours without fleet
/// mark the plan infeasible and set `total_cost` to the `+inf` sentinel.
pub fn evaluate(
    scenario: &Scenario,
    plan: &Plan,
    park: &MachineryPark,
    model: CostModel,
) -> Evaluation {
    let n = plan.tours.len();
    let mut per_tour_cost = Vec::with_capacity(n);
    let mut completion_times = Vec::with_capacity(n);
    let mut avg_waiting_times = Vec::with_capacity(n);
    let mut max_completion = 0.0f64;
    let mut total = 0.0;
    let mut fleet_ok = true;
    for tour in &plan.tours {
        if !tour.is_active() {
            per_tour_cost.push(0.0);
            completion_times.push(0.0);
            avg_waiting_times.push(0.0);
            continue;
        }
        if tour.hu_total() == 0 || tour.su_total() == 0 {
            fleet_ok = false;
        }
        let geom = tour_geometry(scenario, tour, model);
        let cost = tour_cost_from(&geom, tour, tour_shuttle_km(scenario, tour, park));
        let compl = completion_from(&geom, tour, scenario, park);
        per_tour_cost.push(cost);
        completion_times.push(compl);
        avg_waiting_times.push(avg_wait_from(&geom, tour, park));
        max_completion = max_completion.max(compl);
        total += cost;
    }
    let feasible = fleet_ok && check_demand(scenario, plan);
    Evaluation {
        per_tour_cost,
        total_cost: if feasible { total } else { f64::INFINITY },
        completion_times,
        avg_waiting_times,
        max_completion,
        feasible,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BiogasPlant, Field, HuClass, Location, PhysicalParams, SuClass, SupplyUnit};

    fn park(n_hu: usize, su: &[(f64, f64, usize)]) -> MachineryPark {
        MachineryPark::new(
            vec![HuClass {
                work_rate_area: 2.5,
                count_total: n_hu,
            }],
            su.iter()
                .map(|&(cap, fill, n)| SuClass {
                    load_capacity: cap,
                    fill_time: fill,
                    count_total: n,
                })
                .collect(),
        )
        .unwrap()
    }

    fn scenario_plant_at_10() -> Scenario {
        // Plant at (10, 0), one field colocated with the plant, HQ at origin.
        Scenario::new(
            Location::new(0.0, 0.0),
            vec![Field {
                id: 0,
                location: Location::new(10.0, 0.0),
                size_ha: 0.3, // 12 t at 40 t/ha: a single 12.5 t shuttle
            }],
            vec![BiogasPlant {
                id: 0,
                location: Location::new(10.0, 0.0),
                min_demand: 0.0,
            }],
            None,
            PhysicalParams {
                v_hu_edge: 40.0,
                v_su_edge: 40.0,
                c_biom_conv: 40.0,
                supply_unit: SupplyUnit::Tonnes,
            },
        )
        .unwrap()
    }

    fn tour(plants: &[usize], fields: &[&[usize]], hu: usize, su: &[usize]) -> Tour {
        Tour {
            plant_sequence: plants.to_vec(),
            fields_per_plant: fields.iter().map(|f| f.to_vec()).collect(),
            hu_counts: vec![hu],
            su_counts: su.to_vec(),
        }
    }

    #[test]
    fn hand_traced_single_field_tour() {
        let s = scenario_plant_at_10();
        let p = park(1, &[(12.5, 0.1, 1)]);
        let t = tour(&[0], &[&[0]], 1, &[1]);
        // HU: 10 out + 10 back; SU skeleton: 10 out + 10 back; one shuttle
        // over zero distance.
        assert_eq!(tour_cost(&s, &t, &p, CostModel::Skeleton), 40.0);
    }

    #[test]
    fn inactive_tour_costs_zero() {
        let s = scenario_plant_at_10();
        let p = park(1, &[(12.5, 0.1, 1)]);
        let t = Tour::empty(1, 1);
        assert_eq!(tour_cost(&s, &t, &p, CostModel::Skeleton), 0.0);
        assert_eq!(completion_time(&s, &t, &p), 0.0);
        assert_eq!(avg_waiting_time(&s, &t, &p), 0.0);
    }

    #[test]
    fn doubling_hus_doubles_hu_term_only() {
        let s = scenario_plant_at_10();
        let p1 = park(2, &[(12.5, 0.1, 1)]);
        let t1 = tour(&[0], &[&[0]], 1, &[1]);
        let t2 = tour(&[0], &[&[0]], 2, &[1]);
        let c1 = tour_cost(&s, &t1, &p1, CostModel::Skeleton);
        let c2 = tour_cost(&s, &t2, &p1, CostModel::Skeleton);
        // L_HU = 20 km; everything else unchanged.
        assert_eq!(c2 - c1, 20.0);
    }

    #[test]
    fn completion_time_formula() {
        // L_HU = 80 km at 40 km/h -> 2 h road; 100 ha at 2.5 ha/h -> 40 h.
        let s = Scenario::new(
            Location::new(0.0, 0.0),
            vec![Field {
                id: 0,
                location: Location::new(40.0, 0.0),
                size_ha: 100.0,
            }],
            vec![BiogasPlant {
                id: 0,
                location: Location::new(40.0, 0.0),
                min_demand: 0.0,
            }],
            None,
            PhysicalParams {
                v_hu_edge: 40.0,
                v_su_edge: 40.0,
                c_biom_conv: 40.0,
                supply_unit: SupplyUnit::Tonnes,
            },
        )
        .unwrap();
        let p = park(1, &[(12.5, 0.1, 1)]);
        let t = tour(&[0], &[&[0]], 1, &[1]);
        assert_eq!(completion_time(&s, &t, &p), 42.0);
        // Doubling identical HUs halves the work term only.
        let t2 = tour(&[0], &[&[0]], 2, &[1]);
        let p2 = park(2, &[(12.5, 0.1, 1)]);
        assert_eq!(completion_time(&s, &t2, &p2), 22.0);
    }

    fn wait_scenario(d: f64) -> Scenario {
        Scenario::new(
            Location::new(0.0, 0.0),
            vec![Field {
                id: 0,
                location: Location::new(d, 0.0),
                size_ha: 5.0,
            }],
            vec![BiogasPlant {
                id: 0,
                location: Location::new(0.0, 0.0),
                min_demand: 0.0,
            }],
            None,
            PhysicalParams {
                v_hu_edge: 40.0,
                v_su_edge: 40.0,
                c_biom_conv: 40.0,
                supply_unit: SupplyUnit::Tonnes,
            },
        )
        .unwrap()
    }

    #[test]
    fn waiting_time_direct_substitution() {
        // d(f,b) = 20 km at 40 km/h -> 1 h round trip; 5 SUs with 8 min fill,
        // one HU: 1.0 - 4 * (8/60) = 0.4667 h.
        let s = wait_scenario(20.0);
        let p = park(1, &[(16.5, 8.0 / 60.0, 5)]);
        let t = tour(&[0], &[&[0]], 1, &[5]);
        let w = waiting_time(&s, &t, &p, 0, 0, 0).unwrap();
        approx::assert_relative_eq!(w, 1.0 - 4.0 * (8.0 / 60.0), max_relative = 1e-12);
    }

    #[test]
    fn waiting_time_single_su_is_edge_time() {
        let s = wait_scenario(20.0);
        let p = park(1, &[(16.5, 8.0 / 60.0, 1)]);
        let t = tour(&[0], &[&[0]], 1, &[1]);
        let w = waiting_time(&s, &t, &p, 0, 0, 0).unwrap();
        approx::assert_relative_eq!(w, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn equal_fill_times_make_cases_coincide() {
        let s = wait_scenario(20.0);
        let p = park(1, &[(12.5, 0.1, 2), (16.5, 0.1, 3)]);
        let t = tour(&[0], &[&[0]], 1, &[2, 3]);
        let w0 = waiting_time(&s, &t, &p, 0, 0, 0).unwrap();
        let w1 = waiting_time(&s, &t, &p, 0, 0, 1).unwrap();
        approx::assert_relative_eq!(w0, w1, max_relative = 1e-12);
    }

    #[test]
    fn colocated_fields_give_negative_wait() {
        let s = wait_scenario(0.0);
        let p = park(1, &[(16.5, 8.0 / 60.0, 2)]);
        let t = tour(&[0], &[&[0]], 1, &[2]);
        assert!(avg_waiting_time(&s, &t, &p) < 0.0);
    }

    #[test]
    fn waiting_time_rejects_absent_case_class() {
        let s = wait_scenario(20.0);
        let p = park(1, &[(12.5, 0.1, 3), (16.5, 8.0 / 60.0, 2)]);
        let t = tour(&[0], &[&[0]], 1, &[3, 0]);
        assert!(waiting_time(&s, &t, &p, 0, 0, 1).is_err());
        assert!(waiting_time(&s, &t, &p, 0, 0, 0).is_ok());
    }

    #[test]
    fn largest_case_dominates_smallest_for_equal_counts() {
        let s = wait_scenario(13.0);
        let p = park(2, &[(12.5, 0.1, 3), (16.5, 8.0 / 60.0, 3)]);
        let t = tour(&[0], &[&[0]], 2, &[3, 3]);
        let w_small = waiting_time(&s, &t, &p, 0, 0, 0).unwrap();
        let w_large = waiting_time(&s, &t, &p, 0, 0, 1).unwrap();
        assert!(w_large >= w_small);
    }

    /// Two plants; plant 0 carries the given minimum demand, plant 1 none.
    fn demand_scenario(demand: f64, sizes: &[f64]) -> Scenario {
        let fields = sizes
            .iter()
            .enumerate()
            .map(|(id, &sz)| Field {
                id,
                location: Location::new(id as f64, 0.0),
                size_ha: sz,
            })
            .collect();
        Scenario::new(
            Location::new(0.0, 0.0),
            fields,
            vec![
                BiogasPlant {
                    id: 0,
                    location: Location::new(1.0, 1.0),
                    min_demand: demand,
                },
                BiogasPlant {
                    id: 1,
                    location: Location::new(-1.0, 1.0),
                    min_demand: 0.0,
                },
            ],
            None,
            PhysicalParams {
                v_hu_edge: 40.0,
                v_su_edge: 40.0,
                c_biom_conv: 40.0,
                supply_unit: SupplyUnit::HectareEquivalent,
            },
        )
        .unwrap()
    }

    /// One tour serving both plants with the given field split.
    fn split_plan(fields_p0: &[usize], fields_p1: &[usize], n_su: usize) -> Plan {
        Plan {
            tours: vec![Tour {
                plant_sequence: vec![0, 1],
                fields_per_plant: vec![fields_p0.to_vec(), fields_p1.to_vec()],
                hu_counts: vec![1],
                su_counts: vec![n_su],
            }],
        }
    }

    #[test]
    fn demand_check_cases() {
        let s = demand_scenario(10.0, &[6.0, 5.0]);
        assert!(check_demand(&s, &split_plan(&[0, 1], &[], 1)));

        // Supply {6, 3} routed to the demanding plant, 5 elsewhere: short.
        let s2 = demand_scenario(10.0, &[6.0, 3.0, 5.0]);
        assert!(!check_demand(&s2, &split_plan(&[0, 1], &[2], 1)));

        let s3 = demand_scenario(0.0, &[6.0, 5.0]);
        assert!(check_demand(&s3, &split_plan(&[], &[0, 1], 1)));
    }

    #[test]
    fn evaluation_totals_and_sentinel() {
        let s = demand_scenario(10.0, &[6.0, 5.0]);
        let p = park(1, &[(12.5, 0.1, 1)]);
        let plan = split_plan(&[0, 1], &[], 1);
        let eval = evaluate(&s, &plan, &p, CostModel::Skeleton);
        assert!(eval.feasible);
        assert_eq!(eval.total_cost, eval.per_tour_cost.iter().sum::<f64>());

        // Same scenario, but the demanding plant only receives 5 ha.
        let bad = split_plan(&[1], &[0], 1);
        let eval2 = evaluate(&s, &bad, &p, CostModel::Skeleton);
        assert!(!eval2.feasible);
        assert!(eval2.total_cost.is_infinite());
    }

    #[test]
    fn accompany_model_adds_interfield_su_legs() {
        let s = demand_scenario(0.0, &[6.0, 5.0]);
        let p = park(1, &[(12.5, 0.1, 2)]);
        let plan = split_plan(&[0, 1], &[], 2);
        let skel = evaluate(&s, &plan, &p, CostModel::Skeleton).total_cost;
        let acc = evaluate(&s, &plan, &p, CostModel::Accompany).total_cost;
        // Fields at (0,0) and (1,0): 1 km inter-field leg, 2 SUs.
        approx::assert_relative_eq!(acc - skel, 2.0, max_relative = 1e-12);
    }
}
