//! Machinery park files: a small JSON format with fill times in minutes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use harvest_logistics::{Error, HuClass, MachineryPark, Result, SuClass};

#[derive(Serialize, Deserialize)]
struct ParkFile {
    hu_classes: Vec<HuClassDto>,
    su_classes: Vec<SuClassDto>,
}

#[derive(Serialize, Deserialize)]
struct HuClassDto {
    work_rate_area: f64,
    count: usize,
}

#[derive(Serialize, Deserialize)]
struct SuClassDto {
    load_capacity_t: f64,
    fill_time_min: f64,
    count: usize,
}

pub fn load_park(path: &Path) -> Result<MachineryPark> {
    let text = std::fs::read_to_string(path)?;
    let file: ParkFile =
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("park file: {e}")))?;
    MachineryPark::new(
        file.hu_classes
            .iter()
            .map(|c| HuClass {
                work_rate_area: c.work_rate_area,
                count_total: c.count,
            })
            .collect(),
        file.su_classes
            .iter()
            .map(|c| SuClass {
                load_capacity: c.load_capacity_t,
                fill_time: c.fill_time_min / 60.0,
                count_total: c.count,
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn park_file_parses_and_converts_minutes() {
        let text = r#"{
            "hu_classes": [{"work_rate_area": 2.5, "count": 7}],
            "su_classes": [
                {"load_capacity_t": 12.5, "fill_time_min": 6.0, "count": 14},
                {"load_capacity_t": 16.5, "fill_time_min": 8.0, "count": 28}
            ]
        }"#;
        let dir = std::env::temp_dir().join("park_file_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("park.json");
        std::fs::write(&path, text).unwrap();
        let park = load_park(&path).unwrap();
        assert_eq!(park, MachineryPark::paper());
    }
}
