use std::fs;

use super::*;
use crate::mutagen::MutantId;

fn matrix(rows: &[(i64, &[u8])]) -> KillingMatrix {
    let mut m = KillingMatrix::new(vec!["test_a".into(), "test_b".into()]);
    for (id, codes) in rows {
        m.rows.push((
            MutantId(*id),
            codes.iter().map(|c| Status::from_code(*c)).collect(),
        ));
    }
    m
}

#[test]
fn identical_matrices_do_not_diverge() {
    let a = matrix(&[(-1, &[0, 0]), (0, &[1, 0]), (1, &[0, 0])]);
    let d = diff_strategies(&a, &a.clone()).unwrap();
    assert_eq!((d.difference, d.divergences), (0, 0));
}

#[test]
fn one_flipped_cell() {
    let a = matrix(&[(-1, &[0, 0]), (0, &[1, 0]), (1, &[0, 0])]);
    for (row, col) in [(1, 0), (1, 1), (2, 0)] {
        let mut b = a.clone();
        let cell = &mut b.rows[row].1[col];
        *cell = Some(if *cell == Some(Status::Pass) {
            Status::AssertionFailure
        } else {
            Status::Pass
        });
        let d = diff_strategies(&a, &b).unwrap();
        assert_eq!(d.divergences, 1);
        assert!(d.difference <= 1);
        assert_eq!(d.divergent_cells[0].muid, a.rows[row].0 .0);
    }
}

#[test]
fn shape_mismatch() {
    let a = matrix(&[(-1, &[0, 0])]);
    let b = matrix(&[(-1, &[0, 0]), (0, &[0, 0])]);
    assert!(diff_strategies(&a, &b).is_err());
}

#[test]
fn saving_arithmetic() {
    let s = saving_percent(2048.0, 1_342_228.0).unwrap();
    assert_eq!(format!("{s:.2}"), "99.85");
    assert_eq!(saving_percent(5.0, 5.0), Some(0.0));
    assert_eq!(saving_percent(5.0, 0.0), None);
}

#[test]
fn disk_usage_counts_source_files_only() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = tmp.path().join("schemata");
    let tr = tmp.path().join("traditional/0");
    fs::create_dir_all(&sc).unwrap();
    fs::create_dir_all(&tr).unwrap();
    fs::write(sc.join("a.mini"), "x".repeat(10)).unwrap();
    fs::write(sc.join("MutationInfo.json"), "x".repeat(1000)).unwrap();
    fs::write(tr.join("a.mini"), "x".repeat(30)).unwrap();
    fs::write(tr.join("b.mini"), "x".repeat(10)).unwrap();
    let d = disk_usage(tmp.path()).unwrap();
    assert_eq!(d.schemata, Some(10));
    assert_eq!(d.traditional, Some(40));
    assert_eq!(d.saving_space_percent, Some(75.0));
}

#[test]
fn missing_values_serialize_as_na() {
    let d = DiskUsage {
        schemata: Some(3),
        traditional: None,
        saving_space_percent: None,
    };
    assert_eq!(
        serde_json::to_string(&d).unwrap(),
        r#"{"schemata":3,"traditional":"n/a","savingSpacePercent":"n/a"}"#
    );
}

#[test]
fn cost_report_key_order() {
    let c = CostReport::new(
        &GenerationTimes::default(),
        &DiskUsage {
            schemata: None,
            traditional: None,
            saving_space_percent: None,
        },
        [Some(1.0), Some(2.0)],
    );
    assert_eq!(c.run_saving_percent, Some(50.0));
    let text = serde_json::to_string(&c).unwrap();
    let keys = [
        "genTimeSchemata",
        "genTimeTraditional",
        "diskSchemata",
        "diskTraditional",
        "savingTimePercent",
        "savingSpacePercent",
        "runTimeSchemata",
        "runTimeTraditional",
        "runSavingPercent",
    ];
    let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
}

#[test]
fn carbon_difference_tracks_runtime_difference() {
    let s = CarbonSection::new(
        [Some(2.18 * 86400.0), Some(2.35 * 86400.0)],
        &HwConfig::default(),
    );
    let rt = s.runtime_difference_percent.unwrap();
    let co2 = s.carbon_difference_percent.unwrap();
    assert!((rt - co2).abs() < 0.01);
    let single = CarbonSection::new([Some(10.0), None], &HwConfig::default());
    assert!(single.schemata.is_some() && single.carbon_difference_percent.is_none());
}
