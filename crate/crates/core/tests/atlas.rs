mod common;

use common::*;
use lensgrid::atlas::{Atlas, AtlasRecord, PutOutcome};
use lensgrid::report::{compute_report, ReportOptions};

#[test]
fn records_are_keyed_by_canonical_form() {
    let dir = tempfile::tempdir().unwrap();
    let atlas = Atlas::open(dir.path()).unwrap();
    let grid = example_grid();
    let (first, hit) = atlas.fetch_or_compute(&grid.translate(1, 1), &ReportOptions::default()).unwrap();
    assert!(!hit);
    let (second, hit) = atlas.fetch_or_compute(&grid, &ReportOptions::default()).unwrap();
    assert!(hit);
    assert_eq!(first, second);
    assert_eq!(first.record.key, grid.canonical_key());
    assert!(first.version_mismatch.is_none());
}

#[test]
fn records_are_immutable() {
    let dir = tempfile::tempdir().unwrap();
    let atlas = Atlas::open(dir.path()).unwrap();
    let grid = example_grid().canonical_form();
    let record = AtlasRecord::new(&grid, compute_report(&grid, &ReportOptions::default()).unwrap());
    assert_eq!(atlas.put(&record).unwrap(), PutOutcome::Written);
    assert_eq!(atlas.put(&record).unwrap(), PutOutcome::AlreadyPresent);
    assert_eq!(atlas.get(&record.key).unwrap().unwrap().record, record);
}

#[test]
fn unknown_and_foreign_records() {
    let dir = tempfile::tempdir().unwrap();
    let atlas = Atlas::open(dir.path()).unwrap();
    assert!(atlas.get_grid(&unknot_grid()).unwrap().is_none());
    let grid = unknot_grid().canonical_form();
    let mut record = AtlasRecord::new(&grid, compute_report(&grid, &ReportOptions::default()).unwrap());
    record.engine_version = "0.0.0-old".into();
    atlas.put(&record).unwrap();
    let lookup = atlas.get_grid(&grid).unwrap().unwrap();
    assert!(lookup.version_mismatch.unwrap().contains("0.0.0-old"));
    std::fs::write(dir.path().join("broken.json"), "{").unwrap();
    assert!(atlas.get("broken").is_err());
}
