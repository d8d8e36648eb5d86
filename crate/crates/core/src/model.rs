//! Domain types, scenario validation and the random scenario generator.
//!
//! Vertex indexing convention used throughout the crate: vertex `0` is the
//! headquarter, vertices `1..=n_plants` are the plants in index order, and
//! vertices `n_plants+1..` are the fields in index order.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Planar position in kilometres.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub x: f64,
    pub y: f64,
}

impl Location {
    pub fn new(x: f64, y: f64) -> Self {
        Location { x, y }
    }

    pub fn dist(&self, other: &Location) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// A field with its centroid location and size in hectares.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub id: usize,
    pub location: Location,
    pub size_ha: f64,
}

/// A biogas plant with a minimum biomass demand in supply units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiogasPlant {
    pub id: usize,
    pub location: Location,
    pub min_demand: f64,
}

/// Bookkeeping unit for field supply and plant demand.
///
/// Demand checks run in the configured unit; shuttle counts always convert
/// to tonnes through `c_biom_conv` first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupplyUnit {
    Tonnes,
    HectareEquivalent,
}

/// Uniform physical parameters of the machinery and the crop.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Road travel speed of harvesting units, km/h.
    pub v_hu_edge: f64,
    /// Road travel speed of support units, km/h.
    pub v_su_edge: f64,
    /// Lumped field-size-to-biomass conversion, t/ha.
    pub c_biom_conv: f64,
    pub supply_unit: SupplyUnit,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_hu_edge > 0.0) || !(self.v_su_edge > 0.0) {
            return Err(Error::invalid("edge speeds must be positive"));
        }
        if !(self.c_biom_conv > 0.0) {
            return Err(Error::invalid("c_biom_conv must be positive"));
        }
        Ok(())
    }

    /// Parameter table of the reference operations data set.
    pub fn paper() -> Self {
        PhysicalParams {
            v_hu_edge: 40.0,
            v_su_edge: 40.0,
            c_biom_conv: 40.0,
            supply_unit: SupplyUnit::HectareEquivalent,
        }
    }
}

/// A class of harvesting units: in-field work rate and how many exist.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HuClass {
    /// In-field working rate, ha/h.
    pub work_rate_area: f64,
    pub count_total: usize,
}

/// A class of support units: load capacity, in-field fill time and count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuClass {
    /// Load capacity, tonnes.
    pub load_capacity: f64,
    /// In-field fill time, hours.
    pub fill_time: f64,
    pub count_total: usize,
}

/// The machinery available for one season: HU and SU class definitions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MachineryPark {
    pub hu_classes: Vec<HuClass>,
    pub su_classes: Vec<SuClass>,
}

impl MachineryPark {
    pub fn new(hu_classes: Vec<HuClass>, su_classes: Vec<SuClass>) -> Result<Self> {
        let park = MachineryPark {
            hu_classes,
            su_classes,
        };
        park.validate()?;
        Ok(park)
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.hu_classes {
            if !(c.work_rate_area > 0.0) {
                return Err(Error::invalid("HU work rate must be positive"));
            }
        }
        for c in &self.su_classes {
            if !(c.load_capacity > 0.0) {
                return Err(Error::invalid("SU load capacity must be positive"));
            }
            if !(c.fill_time > 0.0) {
                return Err(Error::invalid("SU fill time must be positive"));
            }
        }
        if self.hu_total() == 0 {
            return Err(Error::invalid("at least one HU is required"));
        }
        if self.su_total() == 0 {
            return Err(Error::invalid("at least one SU is required"));
        }
        Ok(())
    }

    pub fn hu_total(&self) -> usize {
        self.hu_classes.iter().map(|c| c.count_total).sum()
    }

    pub fn su_total(&self) -> usize {
        self.su_classes.iter().map(|c| c.count_total).sum()
    }

    /// Machinery of the reference operations data set: 7 uniform harvesters,
    /// 14 small and 28 large support units.
    pub fn paper() -> Self {
        MachineryPark {
            hu_classes: vec![HuClass {
                work_rate_area: 2.5,
                count_total: 7,
            }],
            su_classes: vec![
                SuClass {
                    load_capacity: 12.5,
                    fill_time: 6.0 / 60.0,
                    count_total: 14,
                },
                SuClass {
                    load_capacity: 16.5,
                    fill_time: 8.0 / 60.0,
                    count_total: 28,
                },
            ],
        }
    }
}

/// Expected biomass supply of a field in the configured supply unit.
pub fn expected_supply(field: &Field, params: &PhysicalParams) -> f64 {
    match params.supply_unit {
        SupplyUnit::Tonnes => params.c_biom_conv * field.size_ha,
        SupplyUnit::HectareEquivalent => field.size_ha,
    }
}

/// Number of shuttle drives needed to move `supply_t` tonnes with vehicles
/// of the given capacity: the least integer `k` with `k * capacity >= supply`.
pub fn shuttle_count(supply_t: f64, load_capacity: f64) -> Result<u64> {
    if !(load_capacity > 0.0) {
        return Err(Error::invalid("load capacity must be positive"));
    }
    if supply_t < 0.0 || !supply_t.is_finite() {
        return Err(Error::invalid("supply must be finite and nonnegative"));
    }
    if supply_t == 0.0 {
        return Ok(0);
    }
    let mut k = (supply_t / load_capacity).ceil();
    // Guard the ceiling against rounding in the division.
    if (k - 1.0) * load_capacity >= supply_t {
        k -= 1.0;
    } else if k * load_capacity < supply_t {
        k += 1.0;
    }
    Ok(k as u64)
}

/// Immutable world description: headquarter, fields, plants, distances and
/// physical parameters. Construction validates all invariants; afterwards a
/// scenario is safe to share across any number of worker threads.
#[derive(Clone, Debug)]
pub struct Scenario {
    hq: Location,
    fields: Vec<Field>,
    plants: Vec<BiogasPlant>,
    /// Full row-major matrix over vertices, if distances are supplied
    /// externally instead of being derived from coordinates.
    distance_matrix: Option<Vec<f64>>,
    params: PhysicalParams,
    /// Vertex id -> location, in the crate-wide vertex order.
    coords: Vec<Location>,
    /// Per-field supply in the configured unit.
    field_supply: Vec<f64>,
    /// Per-field supply in tonnes.
    field_supply_t: Vec<f64>,
    /// Cached field-to-plant distances, `[field * n_plants + plant]`.
    field_plant_km: Vec<f64>,
}

impl Scenario {
    pub fn new(
        hq: Location,
        fields: Vec<Field>,
        plants: Vec<BiogasPlant>,
        distance_matrix: Option<Vec<f64>>,
        params: PhysicalParams,
    ) -> Result<Self> {
        params.validate()?;
        if plants.is_empty() {
            return Err(Error::invalid("scenario needs at least one plant"));
        }
        if fields.is_empty() {
            return Err(Error::invalid("scenario needs at least one field"));
        }
        for (i, f) in fields.iter().enumerate() {
            if f.id != i {
                return Err(Error::invalid(format!(
                    "field ids must be contiguous from 0; got {} at position {i}",
                    f.id
                )));
            }
            if !(f.size_ha > 0.0) {
                return Err(Error::invalid(format!("field {i} has nonpositive size")));
            }
            if !f.location.x.is_finite() || !f.location.y.is_finite() {
                return Err(Error::invalid(format!("field {i} has nonfinite location")));
            }
        }
        for (i, p) in plants.iter().enumerate() {
            if p.id != i {
                return Err(Error::invalid(format!(
                    "plant ids must be contiguous from 0; got {} at position {i}",
                    p.id
                )));
            }
            if p.min_demand < 0.0 || !p.min_demand.is_finite() {
                return Err(Error::invalid(format!("plant {i} has invalid demand")));
            }
            if !p.location.x.is_finite() || !p.location.y.is_finite() {
                return Err(Error::invalid(format!("plant {i} has nonfinite location")));
            }
        }
        if !hq.x.is_finite() || !hq.y.is_finite() {
            return Err(Error::invalid("hq location must be finite"));
        }

        let n_vertices = 1 + plants.len() + fields.len();
        if let Some(m) = &distance_matrix {
            if m.len() != n_vertices * n_vertices {
                return Err(Error::invalid(format!(
                    "distance matrix must be {n_vertices}x{n_vertices} row-major"
                )));
            }
            for i in 0..n_vertices {
                if m[i * n_vertices + i] != 0.0 {
                    return Err(Error::invalid("distance matrix diagonal must be zero"));
                }
                for j in 0..i {
                    let a = m[i * n_vertices + j];
                    let b = m[j * n_vertices + i];
                    if a != b {
                        return Err(Error::invalid("distance matrix must be symmetric"));
                    }
                    if !(a >= 0.0) || !a.is_finite() {
                        return Err(Error::invalid(
                            "distance matrix entries must be finite and nonnegative",
                        ));
                    }
                }
            }
        }

        let mut coords = Vec::with_capacity(n_vertices);
        coords.push(hq);
        coords.extend(plants.iter().map(|p| p.location));
        coords.extend(fields.iter().map(|f| f.location));

        let field_supply: Vec<f64> = fields.iter().map(|f| expected_supply(f, &params)).collect();
        let field_supply_t: Vec<f64> = fields
            .iter()
            .map(|f| params.c_biom_conv * f.size_ha)
            .collect();

        let total_supply: f64 = field_supply.iter().sum();
        let total_demand: f64 = plants.iter().map(|p| p.min_demand).sum();
        if total_supply < total_demand {
            return Err(Error::infeasible(format!(
                "total expected supply {total_supply:.3} below total minimum demand {total_demand:.3}"
            )));
        }

        let mut scenario = Scenario {
            hq,
            fields,
            plants,
            distance_matrix,
            params,
            coords,
            field_supply,
            field_supply_t,
            field_plant_km: Vec::new(),
        };
        let mut table = Vec::with_capacity(scenario.fields.len() * scenario.plants.len());
        for f in 0..scenario.fields.len() {
            for b in 0..scenario.plants.len() {
                table.push(scenario.dist(scenario.field_vertex(f), scenario.plant_vertex(b)));
            }
        }
        scenario.field_plant_km = table;
        Ok(scenario)
    }

    pub fn hq(&self) -> &Location {
        &self.hq
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn plants(&self) -> &[BiogasPlant] {
        &self.plants
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn distance_matrix(&self) -> Option<&[f64]> {
        self.distance_matrix.as_deref()
    }

    pub fn n_fields(&self) -> usize {
        self.fields.len()
    }

    pub fn n_plants(&self) -> usize {
        self.plants.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn field(&self, f: usize) -> &Field {
        &self.fields[f]
    }

    pub fn plant(&self, b: usize) -> &BiogasPlant {
        &self.plants[b]
    }

    /// Vertex id of the headquarter.
    pub const HQ_VERTEX: usize = 0;

    pub fn plant_vertex(&self, plant: usize) -> usize {
        1 + plant
    }

    pub fn field_vertex(&self, field: usize) -> usize {
        1 + self.plants.len() + field
    }

    /// Distance between two vertices in kilometres; matrix entry when a
    /// matrix is present, Euclidean otherwise.
    pub fn distance(&self, a: usize, b: usize) -> Result<f64> {
        if a >= self.n_vertices() || b >= self.n_vertices() {
            return Err(Error::invalid(format!(
                "unknown vertex id ({a}, {b}); scenario has {} vertices",
                self.n_vertices()
            )));
        }
        Ok(self.dist(a, b))
    }

    /// Unchecked fast path for internal use.
    pub(crate) fn dist(&self, a: usize, b: usize) -> f64 {
        debug_assert!(a < self.n_vertices() && b < self.n_vertices());
        match &self.distance_matrix {
            Some(m) => m[a * self.coords.len() + b],
            None => self.coords[a].dist(&self.coords[b]),
        }
    }

    /// Cached field-to-plant distance in kilometres.
    pub(crate) fn field_plant_km(&self, field: usize, plant: usize) -> f64 {
        self.field_plant_km[field * self.plants.len() + plant]
    }

    /// Per-field supply in the configured unit.
    pub fn field_supply(&self, field: usize) -> f64 {
        self.field_supply[field]
    }

    /// Per-field supply in tonnes.
    pub fn field_supply_t(&self, field: usize) -> f64 {
        self.field_supply_t[field]
    }

    pub fn total_supply(&self) -> f64 {
        self.field_supply.iter().sum()
    }

    pub fn total_demand(&self) -> f64 {
        self.plants.iter().map(|p| p.min_demand).sum()
    }
}

/// Parameters for the random scenario generator.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub n_fields: usize,
    pub n_plants: usize,
    /// Side length of the square coverage area, km.
    pub area_km: f64,
    /// Smallest field size, ha.
    pub field_size_min: f64,
    /// Width of the uniform field-size range, ha.
    pub field_size_span: f64,
    /// Minimum demand per plant, in `params.supply_unit`.
    pub min_demand: f64,
    pub params: PhysicalParams,
}

impl ScenarioSpec {
    /// The reference experimental setup: 1200 fields of 3-7 ha and 20 plants
    /// demanding 250 ha-equivalents each, on an 80x80 km area.
    pub fn paper() -> Self {
        ScenarioSpec {
            n_fields: 1200,
            n_plants: 20,
            area_km: 80.0,
            field_size_min: 3.0,
            field_size_span: 4.0,
            min_demand: 250.0,
            params: PhysicalParams::paper(),
        }
    }
}

/// Redraw cap for the generator; infeasible draws essentially never occur at
/// sensible parameters, so a failure here means the spec itself is starved.
pub const GENERATOR_RETRY_CAP: usize = 100;

/// Draws a random scenario: HQ at the origin, field and plant locations
/// uniform over the square, field sizes uniform in
/// `[field_size_min, field_size_min + field_size_span]`. Deterministic in
/// `seed`. The whole scenario is redrawn (same stream) while total supply
/// falls short of total demand, up to [`GENERATOR_RETRY_CAP`] attempts.
pub fn generate_scenario(seed: u64, spec: &ScenarioSpec) -> Result<Scenario> {
    if spec.n_plants < 1 || spec.n_fields < spec.n_plants {
        return Err(Error::invalid(
            "generator requires n_fields >= n_plants >= 1",
        ));
    }
    if !(spec.area_km > 0.0) || !(spec.field_size_min > 0.0) || spec.field_size_span < 0.0 {
        return Err(Error::invalid("generator geometry parameters out of range"));
    }
    spec.params.validate()?;

    let mut rng = rng::scenario_rng(seed);
    let half = spec.area_km / 2.0;
    for _ in 0..GENERATOR_RETRY_CAP {
        let mut fields = Vec::with_capacity(spec.n_fields);
        for id in 0..spec.n_fields {
            let x = rng.gen_range(-half..=half);
            let y = rng.gen_range(-half..=half);
            let size = spec.field_size_min + spec.field_size_span * rng.gen_range(0.0..=1.0);
            fields.push(Field {
                id,
                location: Location::new(x, y),
                size_ha: size,
            });
        }
        let mut plants = Vec::with_capacity(spec.n_plants);
        for id in 0..spec.n_plants {
            let x = rng.gen_range(-half..=half);
            let y = rng.gen_range(-half..=half);
            plants.push(BiogasPlant {
                id,
                location: Location::new(x, y),
                min_demand: spec.min_demand,
            });
        }
        let supply: f64 = fields
            .iter()
            .map(|f| expected_supply(f, &spec.params))
            .sum();
        let demand = spec.min_demand * spec.n_plants as f64;
        if supply < demand {
            continue;
        }
        return Scenario::new(Location::new(0.0, 0.0), fields, plants, None, spec.params);
    }
    Err(Error::infeasible(format!(
        "generator exhausted {GENERATOR_RETRY_CAP} redraws without covering total demand"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_t() -> PhysicalParams {
        PhysicalParams {
            v_hu_edge: 40.0,
            v_su_edge: 40.0,
            c_biom_conv: 40.0,
            supply_unit: SupplyUnit::Tonnes,
        }
    }

    fn two_vertex_scenario(matrix: Option<Vec<f64>>) -> Scenario {
        // One plant at (3,4), one field at the origin next to HQ.
        Scenario::new(
            Location::new(0.0, 0.0),
            vec![Field {
                id: 0,
                location: Location::new(0.0, 0.0),
                size_ha: 5.0,
            }],
            vec![BiogasPlant {
                id: 0,
                location: Location::new(3.0, 4.0),
                min_demand: 0.0,
            }],
            matrix,
            params_t(),
        )
        .unwrap()
    }

    #[test]
    fn euclidean_distance_and_zero_diagonal() {
        let s = two_vertex_scenario(None);
        // HQ at (0,0), plant at (3,4): the 3-4-5 triangle.
        assert_eq!(s.distance(0, 1).unwrap(), 5.0);
        assert_eq!(s.distance(1, 0).unwrap(), 5.0);
        assert_eq!(s.distance(1, 1).unwrap(), 0.0);
        assert!(s.distance(0, 99).is_err());
    }

    #[test]
    fn matrix_passthrough() {
        let m = vec![
            0.0, 7.2, 1.0, //
            7.2, 0.0, 2.0, //
            1.0, 2.0, 0.0,
        ];
        let s = two_vertex_scenario(Some(m));
        assert_eq!(s.distance(0, 1).unwrap(), 7.2);
        assert_eq!(s.distance(2, 1).unwrap(), 2.0);
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let m = vec![
            0.0, 7.2, 1.0, //
            7.0, 0.0, 2.0, //
            1.0, 2.0, 0.0,
        ];
        let err = Scenario::new(
            Location::new(0.0, 0.0),
            vec![Field {
                id: 0,
                location: Location::new(0.0, 0.0),
                size_ha: 5.0,
            }],
            vec![BiogasPlant {
                id: 0,
                location: Location::new(3.0, 4.0),
                min_demand: 0.0,
            }],
            Some(m),
            params_t(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn supply_by_unit() {
        let f = Field {
            id: 0,
            location: Location::new(0.0, 0.0),
            size_ha: 5.0,
        };
        assert_eq!(expected_supply(&f, &params_t()), 200.0);
        let mut ha = params_t();
        ha.supply_unit = SupplyUnit::HectareEquivalent;
        assert_eq!(expected_supply(&f, &ha), 5.0);
    }

    #[test]
    fn shuttle_counts() {
        assert_eq!(shuttle_count(200.0, 16.5).unwrap(), 13);
        assert_eq!(shuttle_count(0.0, 16.5).unwrap(), 0);
        assert_eq!(shuttle_count(12.5, 12.5).unwrap(), 1);
        assert!(shuttle_count(1.0, 0.0).is_err());
        assert!(shuttle_count(-1.0, 2.0).is_err());
    }

    #[test]
    fn generator_is_deterministic() {
        let spec = ScenarioSpec {
            n_fields: 30,
            n_plants: 3,
            area_km: 20.0,
            field_size_min: 3.0,
            field_size_span: 4.0,
            min_demand: 10.0,
            params: PhysicalParams::paper(),
        };
        let a = generate_scenario(7, &spec).unwrap();
        let b = generate_scenario(7, &spec).unwrap();
        assert_eq!(a.fields(), b.fields());
        assert_eq!(a.plants(), b.plants());
        let c = generate_scenario(8, &spec).unwrap();
        assert_ne!(a.fields(), c.fields());
    }

    #[test]
    fn generator_paper_preset_field_sizes() {
        let s = generate_scenario(1, &ScenarioSpec::paper()).unwrap();
        assert_eq!(s.n_fields(), 1200);
        assert_eq!(s.n_plants(), 20);
        let mean: f64 =
            s.fields().iter().map(|f| f.size_ha).sum::<f64>() / s.n_fields() as f64;
        for f in s.fields() {
            assert!(f.size_ha >= 3.0 && f.size_ha <= 7.0);
        }
        assert!(mean > 4.8 && mean < 5.2, "mean field size {mean}");
        assert_eq!(s.hq(), &Location::new(0.0, 0.0));
    }

    #[test]
    fn generator_rejects_starved_spec() {
        // Demand far beyond any possible draw: sizes at most 7 ha per field.
        let spec = ScenarioSpec {
            n_fields: 4,
            n_plants: 2,
            area_km: 10.0,
            field_size_min: 3.0,
            field_size_span: 4.0,
            min_demand: 1000.0,
            params: PhysicalParams::paper(),
        };
        match generate_scenario(0, &spec) {
            Err(Error::Infeasible(_)) => {}
            other => panic!("expected infeasible error, got {other:?}"),
        }
    }

    #[test]
    fn trivially_feasible_small_scenario() {
        let spec = ScenarioSpec {
            n_fields: 1,
            n_plants: 1,
            area_km: 10.0,
            field_size_min: 3.0,
            field_size_span: 4.0,
            min_demand: 0.0,
            params: PhysicalParams::paper(),
        };
        let s = generate_scenario(0, &spec).unwrap();
        assert_eq!(s.n_fields(), 1);
        assert!(s.total_supply() >= s.total_demand());
    }
}
