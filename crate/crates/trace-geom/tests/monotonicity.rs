//! The multiplicity bound only improves as the window moves away from the
//! tempered line, for a fixed trace region.

use proptest::prelude::*;
use std::sync::Mutex;
use trace_geom::trace_geometry::{catalog_setting, BoundEngine, BoundOptions, QuaternionSetting, SpectralWindow};

fn engine() -> &'static Mutex<BoundEngine> {
    static ENGINE: std::sync::OnceLock<Mutex<BoundEngine>> = std::sync::OnceLock::new();
    ENGINE.get_or_init(|| {
        let setting = QuaternionSetting::new(catalog_setting("Q-2-5").unwrap()).unwrap();
        Mutex::new(BoundEngine::new(setting, BoundOptions::default()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn bound_decreases_in_sigma(a in 0.0f64..0.5, b in 0.0f64..0.5) {
        let (s1, s2) = if a <= b { (a, b) } else { (b, a) };
        let mut engine = engine().lock().unwrap();
        let lo = engine.bound(&SpectralWindow::uniform_sigma(1, s1)).unwrap();
        let hi = engine.bound(&SpectralWindow::uniform_sigma(1, s2)).unwrap();
        prop_assert_eq!(&lo.r, &hi.r, "R depends only on the setting for a uniform window");
        prop_assert!(hi.final_bound.hi <= lo.final_bound.hi, "{} > {}", hi.final_bound, lo.final_bound);
        prop_assert!(hi.final_bound.lo <= lo.final_bound.lo);
        prop_assert!(hi.savings <= lo.savings);
        prop_assert!(hi.checks.self_normalization && hi.checks.rows_nonnegative);
    }
}

#[test]
fn trace_region_grows_with_covolume() {
    let options = BoundOptions::default();
    let window = SpectralWindow::uniform_sigma(1, 0.25);
    let radius = |name: &str| {
        let setting = QuaternionSetting::new(catalog_setting(name).unwrap()).unwrap();
        let report = BoundEngine::new(setting, options.clone()).unwrap().bound(&window).unwrap();
        (report.volume.lattice_volume.mid(), report.region_radii[0])
    };
    let (v3, r3) = radius("Q-2-3");
    let (v7, r7) = radius("Q-2-7");
    assert!(v3 < v7);
    assert!(r3 <= r7);
}
