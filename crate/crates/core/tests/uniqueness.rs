mod common;

use pqkt::catalog;
use pqkt::connections::pqkt_connection;
use pqkt::suite::sample_points;

fn compare(m: &pqkt::structures::ParaHermitianStructure, points: usize) -> (f64, f64) {
    let mut worst = 0.0f64;
    let mut smin = f64::INFINITY;
    for p in sample_points(m.dim(), points, catalog::DEFAULT_SEED, 0.5) {
        let (s, pd) = common::point_data(m, &p);
        let o = common::oracle(&pd);
        assert!(o.residual < 1e-10, "system is inconsistent: {:e}", o.residual);
        let pq = pqkt_connection(&s).unwrap();
        let t = pq.torsion.values();
        let t = t.as_slice();
        for (a, b) in o.torsion.iter().zip(t) {
            worst = worst.max((a - b).abs());
        }
        for a in 0..3 {
            let w = pq.omega[a].values();
            for (x, y) in o.omega[a].iter().zip(w.as_slice()) {
                worst = worst.max((x - y).abs());
            }
        }
        smin = smin.min(o.sigma_min);
    }
    (worst, smin)
}

#[test]
fn linear_solve_matches_on_conformal_model() {
    let (worst, smin) = compare(&catalog::default_conformal(2), 5);
    assert!(worst < 1e-8, "{worst:e}");
    assert!(smin > 1e-6, "{smin:e}");
}

#[test]
fn linear_solve_matches_on_quadratic_and_pushforward_models() {
    for m in [catalog::quadratic_conformal(2), catalog::pushforward_model(2, catalog::DEFAULT_SEED)] {
        let (worst, smin) = compare(&m, 2);
        assert!(worst < 1e-8, "{worst:e}");
        assert!(smin > 1e-6, "{smin:e}");
    }
}

#[test]
fn deformed_frame_system_is_inconsistent() {
    let m = catalog::frame_deformed_model(2, catalog::DEFAULT_SEED);
    let (_, pd) = common::point_data(&m, &[0.1; 8]);
    assert!(common::oracle(&pd).residual > 1e-3);
}
