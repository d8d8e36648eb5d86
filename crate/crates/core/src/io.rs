//! Scenario file schema (version 1): a JSON tree with the headquarter,
//! fields, plants, physical parameters and an optional distance matrix.
//! The matrix may be given as the full row-major square or as the row-major
//! lower triangle (including the diagonal).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BiogasPlant, Field, Location, PhysicalParams, Scenario, SupplyUnit};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ScenarioFile {
    schema_version: u32,
    hq: PointDto,
    fields: Vec<FieldDto>,
    plants: Vec<PlantDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    distance_matrix: Option<Vec<f64>>,
    params: ParamsDto,
}

#[derive(Serialize, Deserialize)]
struct PointDto {
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
struct FieldDto {
    id: usize,
    x: f64,
    y: f64,
    size_ha: f64,
}

#[derive(Serialize, Deserialize)]
struct PlantDto {
    id: usize,
    x: f64,
    y: f64,
    min_demand: f64,
}

#[derive(Serialize, Deserialize)]
struct ParamsDto {
    v_hu_edge: f64,
    v_su_edge: f64,
    c_biom_conv: f64,
    supply_unit: SupplyUnit,
}

pub fn scenario_to_json(scenario: &Scenario) -> String {
    let file = ScenarioFile {
        schema_version: SCHEMA_VERSION,
        hq: PointDto {
            x: scenario.hq().x,
            y: scenario.hq().y,
        },
        fields: scenario
            .fields()
            .iter()
            .map(|f| FieldDto {
                id: f.id,
                x: f.location.x,
                y: f.location.y,
                size_ha: f.size_ha,
            })
            .collect(),
        plants: scenario
            .plants()
            .iter()
            .map(|p| PlantDto {
                id: p.id,
                x: p.location.x,
                y: p.location.y,
                min_demand: p.min_demand,
            })
            .collect(),
        distance_matrix: scenario.distance_matrix().map(|m| m.to_vec()),
        params: ParamsDto {
            v_hu_edge: scenario.params().v_hu_edge,
            v_su_edge: scenario.params().v_su_edge,
            c_biom_conv: scenario.params().c_biom_conv,
            supply_unit: scenario.params().supply_unit,
        },
    };
    serde_json::to_string_pretty(&file).expect("scenario serialization cannot fail")
}

pub fn scenario_from_json(text: &str) -> Result<Scenario> {
    let file: ScenarioFile =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("scenario file: {e}")))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::Format(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    let fields: Vec<Field> = file
        .fields
        .iter()
        .map(|f| Field {
            id: f.id,
            location: Location::new(f.x, f.y),
            size_ha: f.size_ha,
        })
        .collect();
    let plants: Vec<BiogasPlant> = file
        .plants
        .iter()
        .map(|p| BiogasPlant {
            id: p.id,
            location: Location::new(p.x, p.y),
            min_demand: p.min_demand,
        })
        .collect();
    let n_vertices = 1 + plants.len() + fields.len();
    let matrix = match file.distance_matrix {
        None => None,
        Some(m) => Some(expand_matrix(m, n_vertices)?),
    };
    Scenario::new(
        Location::new(file.hq.x, file.hq.y),
        fields,
        plants,
        matrix,
        PhysicalParams {
            v_hu_edge: file.params.v_hu_edge,
            v_su_edge: file.params.v_su_edge,
            c_biom_conv: file.params.c_biom_conv,
            supply_unit: file.params.supply_unit,
        },
    )
}

/// Accepts the full `n*n` row-major matrix, or the lower triangle
/// (`n*(n+1)/2` entries, row-major) which is mirrored into the full square.
fn expand_matrix(m: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    if m.len() == n * n {
        return Ok(m);
    }
    if m.len() == n * (n + 1) / 2 {
        let mut full = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in 0..=i {
                full[i * n + j] = m[k];
                full[j * n + i] = m[k];
                k += 1;
            }
        }
        return Ok(full);
    }
    Err(Error::Format(format!(
        "distance_matrix has {} entries; expected {} (full) or {} (lower triangle)",
        m.len(),
        n * n,
        n * (n + 1) / 2
    )))
}

pub fn save_scenario(scenario: &Scenario, path: &Path) -> Result<()> {
    std::fs::write(path, scenario_to_json(scenario))?;
    Ok(())
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    scenario_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_scenario, ScenarioSpec, PhysicalParams};

    fn small() -> Scenario {
        let spec = ScenarioSpec {
            n_fields: 12,
            n_plants: 3,
            area_km: 15.0,
            field_size_min: 3.0,
            field_size_span: 4.0,
            min_demand: 5.0,
            params: PhysicalParams::paper(),
        };
        generate_scenario(21, &spec).unwrap()
    }

    #[test]
    fn json_round_trip() {
        let s = small();
        let text = scenario_to_json(&s);
        let back = scenario_from_json(&text).unwrap();
        assert_eq!(s.fields(), back.fields());
        assert_eq!(s.plants(), back.plants());
        assert_eq!(s.params(), back.params());
        // Serialization is deterministic byte for byte.
        assert_eq!(text, scenario_to_json(&back));
    }

    #[test]
    fn lower_triangle_matrix_expands() {
        // 3 vertices (1 plant + 1 field + HQ): triangle has 6 entries.
        let text = r#"{
            "schema_version": 1,
            "hq": {"x": 0.0, "y": 0.0},
            "fields": [{"id": 0, "x": 1.0, "y": 0.0, "size_ha": 5.0}],
            "plants": [{"id": 0, "x": 2.0, "y": 0.0, "min_demand": 0.0}],
            "distance_matrix": [0.0, 2.5, 0.0, 1.25, 7.25, 0.0],
            "params": {"v_hu_edge": 40.0, "v_su_edge": 40.0, "c_biom_conv": 40.0,
                       "supply_unit": "hectare_equivalent"}
        }"#;
        let s = scenario_from_json(text).unwrap();
        assert_eq!(s.distance(0, 1).unwrap(), 2.5);
        assert_eq!(s.distance(1, 0).unwrap(), 2.5);
        assert_eq!(s.distance(2, 1).unwrap(), 7.25);
    }

    #[test]
    fn wrong_schema_version_rejected() {
        let s = small();
        let text = scenario_to_json(&s).replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(scenario_from_json(&text), Err(Error::Format(_))));
    }
}
