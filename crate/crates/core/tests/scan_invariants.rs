use orient_core::scan::{line_scan, scan_max_orientation, Axis, LineScanSpec, ScanSpec};
use orient_core::{kick_ground_state, orientation_trace, revival_stats, Execution, KickAreas, KickCache};

#[test]
fn zero_laser_column_matches_hcp_only_computation() {
    let spec = ScanSpec::new(Axis::new(0.0, 2.0, 3).unwrap(), Axis::new(0.0, 10.0, 21).unwrap()).unwrap();
    let rows = scan_max_orientation(&spec, Execution::Parallel, KickCache::shared());
    for row in rows.iter().filter(|r| r.a_l == 0.0) {
        let state = kick_ground_state(KickAreas::new(row.a_hcp, 0.0).unwrap()).unwrap().state;
        let stats = revival_stats(&orientation_trace(&state, spec.resolution).unwrap(), 0.5).unwrap();
        assert!((stats.max_abs - row.max_abs).abs() < 1e-12, "A_HCP = {}", row.a_hcp);
    }
}

#[test]
fn thermal_grid_never_exceeds_cold_grid() {
    let cold = ScanSpec::new(Axis::new(0.0, 6.0, 7).unwrap(), Axis::new(0.0, 10.0, 11).unwrap()).unwrap();
    let warm = cold.with_temperature(Some(5.0));
    let c = scan_max_orientation(&cold, Execution::Parallel, KickCache::shared());
    let w = scan_max_orientation(&warm, Execution::Parallel, KickCache::shared());
    for (c, w) in c.iter().zip(&w) {
        assert!(w.max_abs <= c.max_abs + 1e-9, "({}, {}): thermal {} > cold {}", c.a_l, c.a_hcp, w.max_abs, c.max_abs);
    }
}

#[test]
fn line_scan_is_robust_to_ratio() {
    let axis = Axis::new(2.0, 5.0, 13).unwrap();
    let base = line_scan(&LineScanSpec::new(axis, 2.5).unwrap(), Execution::Parallel, KickCache::shared());
    for ratio in [2.3, 2.7] {
        let other = line_scan(&LineScanSpec::new(axis, ratio).unwrap(), Execution::Parallel, KickCache::shared());
        for (a, b) in base.iter().zip(&other) {
            assert!((a.max_abs - b.max_abs).abs() < 0.03, "ratio {ratio}, A_HCP {}: {} vs {}", a.a_hcp, a.max_abs, b.max_abs);
        }
    }
}

#[test]
fn best_target_at_reference_point_is_five_minus() {
    let spec = LineScanSpec::new(Axis::new(3.0, 3.5, 2).unwrap(), 2.5).unwrap();
    let row = &line_scan(&spec, Execution::Sequential, &KickCache::new())[0];
    assert_eq!(row.best_n, Some(5));
    assert!(row.signed_value < 0.0);
}

#[test]
fn thermal_line_rows_leave_target_columns_empty() {
    let spec = LineScanSpec::new(Axis::new(1.0, 2.0, 2).unwrap(), 2.5).unwrap().with_temperature(Some(2.0));
    for row in line_scan(&spec, Execution::Sequential, &KickCache::new()) {
        assert!(row.best_n.is_none() && row.p_n.is_nan());
        assert!(row.error.is_none());
    }
}
