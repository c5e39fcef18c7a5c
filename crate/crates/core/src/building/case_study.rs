//! The bundled three-zone case study: a 6 m concrete cube on a ground slab,
//! split into a ground floor and two upstairs rooms (east and west).
//!
//! Decomposition into 16 interzones: four façades and the slab of the ground
//! floor, three façades and a roof for each upstairs room, the two
//! intermediate floors, and the upstairs partition. The 22 components are the
//! 16 walls, four 4 m² windows (east and west, both levels), a door in the
//! partition and the air conditioner of the west room.

use super::Building;

const CASE_STUDY_JSON: &str = include_str!("../../data/case_study.json");

pub fn case_study_building() -> Building {
    serde_json::from_str(CASE_STUDY_JSON).expect("bundled case study is valid JSON")
}

/// The raw bundled document.
pub fn case_study_document() -> &'static str {
    CASE_STUDY_JSON
}
