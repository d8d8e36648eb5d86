//! Candidate solutions: tours with plant orderings, per-plant field
//! orderings and per-class fleet counts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MachineryPark, Scenario};

/// One harvester tour: an ordered list of plants, the ordered fields served
/// per plant, and the fleet assigned to the tour.
///
/// A tour is *active* iff its plant sequence is nonempty. A plan keeps one
/// tour slot per available HU, so plant moves can deactivate a slot and
/// later reactivate it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tour {
    pub plant_sequence: Vec<usize>,
    /// Parallel to `plant_sequence`: ordered field ids served per plant.
    pub fields_per_plant: Vec<Vec<usize>>,
    /// Per-HU-class unit counts.
    pub hu_counts: Vec<usize>,
    /// Per-SU-class unit counts.
    pub su_counts: Vec<usize>,
}

impl Tour {
    pub fn empty(n_hu_classes: usize, n_su_classes: usize) -> Self {
        Tour {
            plant_sequence: Vec::new(),
            fields_per_plant: Vec::new(),
            hu_counts: vec![0; n_hu_classes],
            su_counts: vec![0; n_su_classes],
        }
    }

    pub fn is_active(&self) -> bool {
        !self.plant_sequence.is_empty()
    }

    pub fn hu_total(&self) -> usize {
        self.hu_counts.iter().sum()
    }

    pub fn su_total(&self) -> usize {
        self.su_counts.iter().sum()
    }

    pub fn field_count(&self) -> usize {
        self.fields_per_plant.iter().map(|f| f.len()).sum()
    }

    /// Fields in harvest order: all fields of the first plant, then of the
    /// second, and so on.
    pub fn fields_in_order(&self) -> impl Iterator<Item = usize> + '_ {
        self.fields_per_plant.iter().flatten().copied()
    }

    /// (plant, field) pairs in harvest order.
    pub fn plant_field_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.plant_sequence
            .iter()
            .zip(&self.fields_per_plant)
            .flat_map(|(&b, fs)| fs.iter().map(move |&f| (b, f)))
    }
}

/// A full candidate solution over all tour slots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub tours: Vec<Tour>,
}

impl Plan {
    pub fn n_active(&self) -> usize {
        self.tours.iter().filter(|t| t.is_active()).count()
    }

    /// Indices of active tour slots.
    pub fn active_tours(&self) -> Vec<usize> {
        self.tours
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_active())
            .map(|(i, _)| i)
            .collect()
    }

    /// The plant each field is assigned to, or `None` if missing.
    pub fn plant_of_fields(&self, n_fields: usize) -> Vec<Option<usize>> {
        let mut map = vec![None; n_fields];
        for tour in &self.tours {
            for (b, f) in tour.plant_field_pairs() {
                if f < n_fields {
                    map[f] = Some(b);
                }
            }
        }
        map
    }

    /// Locates a plant: (tour index, position in the tour's sequence).
    pub fn locate_plant(&self, plant: usize) -> Option<(usize, usize)> {
        for (ti, tour) in self.tours.iter().enumerate() {
            if let Some(pos) = tour.plant_sequence.iter().position(|&b| b == plant) {
                return Some((ti, pos));
            }
        }
        None
    }

    /// Locates a field: (tour index, plant position, field position).
    pub fn locate_field(&self, field: usize) -> Option<(usize, usize, usize)> {
        for (ti, tour) in self.tours.iter().enumerate() {
            for (pi, fs) in tour.fields_per_plant.iter().enumerate() {
                if let Some(fi) = fs.iter().position(|&f| f == field) {
                    return Some((ti, pi, fi));
                }
            }
        }
        None
    }

    /// Structural and conservation invariants: every field exactly once,
    /// every plant exactly once, per-class fleet totals conserved, and at
    /// least one HU and one SU on every active tour.
    pub fn validate(&self, scenario: &Scenario, park: &MachineryPark) -> Result<()> {
        let mut field_seen = vec![0usize; scenario.n_fields()];
        let mut plant_seen = vec![0usize; scenario.n_plants()];
        for tour in &self.tours {
            if tour.plant_sequence.len() != tour.fields_per_plant.len() {
                return Err(Error::invalid("tour plant/field list length mismatch"));
            }
            if tour.hu_counts.len() != park.hu_classes.len()
                || tour.su_counts.len() != park.su_classes.len()
            {
                return Err(Error::invalid("tour fleet vector length mismatch"));
            }
            for &b in &tour.plant_sequence {
                if b >= scenario.n_plants() {
                    return Err(Error::invalid(format!("unknown plant id {b}")));
                }
                plant_seen[b] += 1;
            }
            for fs in &tour.fields_per_plant {
                for &f in fs {
                    if f >= scenario.n_fields() {
                        return Err(Error::invalid(format!("unknown field id {f}")));
                    }
                    field_seen[f] += 1;
                }
            }
            if tour.is_active() && (tour.hu_total() == 0 || tour.su_total() == 0) {
                return Err(Error::invalid(
                    "active tour must carry at least one HU and one SU",
                ));
            }
        }
        if let Some(f) = field_seen.iter().position(|&c| c != 1) {
            return Err(Error::invalid(format!(
                "field {f} assigned {} times",
                field_seen[f]
            )));
        }
        if let Some(b) = plant_seen.iter().position(|&c| c != 1) {
            return Err(Error::invalid(format!(
                "plant {b} assigned {} times",
                plant_seen[b]
            )));
        }
        for (l, class) in park.hu_classes.iter().enumerate() {
            let total: usize = self.tours.iter().map(|t| t.hu_counts[l]).sum();
            if total != class.count_total {
                return Err(Error::invalid(format!(
                    "HU class {l} count {total} != park total {}",
                    class.count_total
                )));
            }
        }
        for (l, class) in park.su_classes.iter().enumerate() {
            let total: usize = self.tours.iter().map(|t| t.su_counts[l]).sum();
            if total != class.count_total {
                return Err(Error::invalid(format!(
                    "SU class {l} count {total} != park total {}",
                    class.count_total
                )));
            }
        }
        Ok(())
    }

    /// Partition invariants only (field/plant uniqueness), ignoring fleet
    /// counts. Useful for candidates between perturbation and rebalancing.
    pub fn validate_partition(&self, scenario: &Scenario) -> Result<()> {
        let mut field_seen = vec![0usize; scenario.n_fields()];
        let mut plant_seen = vec![0usize; scenario.n_plants()];
        for tour in &self.tours {
            for &b in &tour.plant_sequence {
                plant_seen[b] += 1;
            }
            for fs in &tour.fields_per_plant {
                for &f in fs {
                    field_seen[f] += 1;
                }
            }
        }
        if field_seen.iter().any(|&c| c != 1) || plant_seen.iter().any(|&c| c != 1) {
            return Err(Error::invalid("plan is not a partition"));
        }
        Ok(())
    }
}
