use super::*;
use crate::arch_spherical::cosh_height;
use proptest::prelude::*;

const CATALAN: f64 = 0.915_965_594_177_219;

fn setting(name: &str) -> QuaternionSetting {
    QuaternionSetting::new(catalog_setting(name).unwrap()).unwrap()
}

fn with_level(name: &str, p: u64, r: u32, kappa: u8) -> QuaternionSetting {
    let mut input = catalog_setting(name).unwrap();
    input.level.push(LevelEntry { p, index: 0, r, kappa });
    QuaternionSetting::new(input).unwrap()
}

fn sigma(s: f64) -> WindowPlace {
    WindowPlace::Sigma(SigmaPlace { sigma: s })
}

fn tempered(t: f64) -> WindowPlace {
    WindowPlace::Tempered(TemperedPlace { t })
}

#[test]
fn borel_examples() {
    let v = borel_volume(&setting("Q-2-3"), 100_000).unwrap();
    assert!(v.contains(PI / 3.0), "{v}");
    assert!(v.width() < 1e-6);
    let v = borel_volume(&setting("Qi-13"), 100_000).unwrap();
    assert!(v.contains(24.0 * CATALAN), "{v}");
    assert!(v.width() < 1e-3);
    for (name, input) in catalog_settings() {
        let v = borel_volume(&QuaternionSetting::new(input).unwrap(), 10_000).unwrap();
        assert!(v.lo > (-7f64).exp(), "{name}: {v}");
    }
}

#[test]
fn lattice_volume_multiplies_the_index() {
    let s = with_level("Q-2-3", 5, 1, 0);
    let vd = lattice_volume(&s, 10_000).unwrap();
    assert_eq!(vd.congruence_index, 6);
    assert!(vd.lattice_volume.contains(2.0 * PI));
}

#[test]
fn setting_validation() {
    let base = catalog_setting("Q-2-3").unwrap();
    let bad = |f: &dyn Fn(&mut SettingInput)| {
        let mut s = base.clone();
        f(&mut s);
        QuaternionSetting::new(s).unwrap_err()
    };
    assert!(matches!(bad(&|s| s.ram_f.pop().map(|_| ()).unwrap()), GeomError::InvalidSetting(_)));
    assert!(matches!(bad(&|s| s.ram_f.clear()), GeomError::InvalidSetting(_)));
    assert!(matches!(bad(&|s| s.signature = [0, 1, 0]), GeomError::InvalidSetting(_)));
    assert!(matches!(bad(&|s| s.level.push(LevelEntry { p: 3, index: 0, r: 1, kappa: 0 })), GeomError::InvalidSetting(_)));
    assert!(matches!(bad(&|s| s.level.push(LevelEntry { p: 5, index: 0, r: 1, kappa: 2 })), GeomError::InvalidSetting(_)));
    assert!(matches!(bad(&|s| s.ram_f.push(PrimeRef::Rational(4))), GeomError::InvalidSetting(_)));
    // 3 is inert in Q(i), so it cannot carry a level.
    let mut gi = catalog_setting("Qi-13").unwrap();
    gi.level.push(LevelEntry { p: 3, index: 0, r: 1, kappa: 0 });
    assert!(QuaternionSetting::new(gi).is_err());
    // Ramified real place bookkeeping.
    let s = setting("Qsqrt5-2");
    assert_eq!(s.ramified_real, vec![1]);
    assert_eq!(s.split_places, vec![SplitPlace { field_place: 0, kind: ArchPlace::Real }]);
}

#[test]
fn settings_parse_from_toml() {
    let text = r#"
        field = "Q(i)"
        signature = [0, 1, 0]
        ram_f = [{ p = 13, index = 0 }, { p = 13, index = 1 }]
        level = [{ p = 5, index = 1, r = 2, kappa = 1 }]
    "#;
    let s = QuaternionSetting::from_toml(text).unwrap();
    assert_eq!(s.ram_count(), 2);
    assert_eq!(s.level[0].kind, SubgroupKind::K1);
    let inline = r#"
        field = { poly = [-1, -1, 1] }
        signature = [1, 0, 1]
        ram_f = [2]
    "#;
    assert!(QuaternionSetting::from_toml(inline).is_ok());
    assert!(QuaternionSetting::from_toml("field = \"Q\"\nsignature = [1,0,0]\nram_f = [2, 3]\nextra = 1").is_err());
    let w = SpectralWindow::from_toml("places = [{ sigma = 0.25 }, { t = 3.0 }]").unwrap();
    assert_eq!(w.places, vec![sigma(0.25), tempered(3.0)]);
    assert!(SpectralWindow::from_toml("places = [{ sigma = 0.25, t = 1 }]").is_err());
}

#[test]
fn conductor_examples() {
    let s = setting("Q-2-3");
    let vol = Interval::pi() / Interval::point(3.0);
    let c = conductor_and_exponent(&s, &SpectralWindow { places: vec![sigma(0.5)] }, vol).unwrap();
    assert_eq!((c.p_sigma, c.two_over_p), (None, 0.0));
    let c = conductor_and_exponent(&s, &SpectralWindow { places: vec![tempered(3.0)] }, vol).unwrap();
    assert_eq!((c.p_sigma, c.two_over_p), (Some(2.0), 1.0));
    assert!(c.value.contains(4.0 * PI / 3.0));
    let c = conductor_and_exponent(&s, &SpectralWindow { places: vec![sigma(0.25)] }, vol).unwrap();
    assert_eq!(c.p_sigma, Some(4.0));
    let err = conductor_and_exponent(&s, &SpectralWindow { places: vec![] }, vol).unwrap_err();
    assert!(matches!(err, GeomError::WindowMismatch(_)));
    let err = conductor_and_exponent(&s, &SpectralWindow { places: vec![sigma(0.7)] }, vol).unwrap_err();
    assert!(matches!(err, GeomError::WindowMismatch(_)));
}

#[test]
fn p_of_parameter_tuples() {
    use SpectralParam::*;
    assert_eq!(p_of_parameters(&[Tempered(3.0)]), Some(2.0));
    assert_eq!(p_of_parameters(&[Complementary(0.25), Tempered(1.0)]), Some(4.0));
    assert_eq!(p_of_parameters(&[Complementary(0.1), Complementary(0.25)]), Some(4.0));
    assert_eq!(p_of_parameters(&[Complementary(0.5)]), None);
}

#[test]
fn r_choice_and_region() {
    let s = setting("Q-2-3");
    let vol = Interval::pi() / Interval::point(3.0);
    let w = SpectralWindow { places: vec![sigma(0.25)] };
    let c = conductor_and_exponent(&s, &w, vol).unwrap();
    let r = choose_r(&s, &w, &c);
    assert!((r[0] - (7.0 + (PI / 3.0).ln())).abs() < 1e-12);
    assert!((r[0] - 7.0461).abs() < 1e-4);
    let region = trace_region(&s, &w, &r).unwrap();
    assert!((region.radii[0] - (r[0] + 2.0).exp()).abs() < 1e-9 * region.radii[0]);
    // vol(region) = 2 e^{R+2} = 2 e^2 e^7 C exactly.
    let ratio = region.volume(&s.field) / (7f64.exp() * c.value.mid());
    assert!((ratio - 2.0 * 2f64.exp()).abs() < 1e-9);

    let tw = SpectralWindow { places: vec![tempered(3.0)] };
    let c = conductor_and_exponent(&s, &tw, vol).unwrap();
    assert_eq!(choose_r(&s, &tw, &c), vec![0.0]);
    let region = trace_region(&s, &tw, &[0.0]).unwrap();
    assert_eq!(region.radii, vec![2f64.exp()]);

    // All mass at the place of largest sigma.
    let z = setting("Qzeta5-11");
    let w = SpectralWindow { places: vec![sigma(0.3), sigma(0.4)] };
    let vd = lattice_volume(&z, 10_000).unwrap();
    let c = conductor_and_exponent(&z, &w, vd.lattice_volume).unwrap();
    let r = choose_r(&z, &w, &c);
    assert_eq!(r[0], 0.0);
    assert!((2.0 * r[1] - (7.0 + c.value.lo.ln())).abs() < 1e-12);
    let region = trace_region(&z, &w, &r).unwrap();
    assert!((region.radii[0] - 4f64.exp()).abs() < 1e-9);
    assert!((region.radii[1] - (2.0 * (r[1] + 2.0)).exp()).abs() < 1e-6 * region.radii[1]);
    // Ties go to the lowest index.
    let w = SpectralWindow { places: vec![sigma(0.4), sigma(0.4)] };
    let r = choose_r(&z, &w, &c);
    assert!(r[0] > 0.0 && r[1] == 0.0);
}

#[test]
fn class_count_at_four() {
    let s = setting("Q-2-3");
    let ctx = RowContext::new(&s, &BoundOptions::default()).unwrap();
    let row = ctx.per_class_bound(&FieldElement(vec![4])).unwrap();
    assert_eq!((row.disc_norm, row.omega, row.class_count), (12, 2, 32));
    assert_eq!(row.rel_disc_norm, 12);
    assert_eq!(row.weight, 1);
    let e_r = Interval::point(7.0).exp();
    assert!(row.normalization.telescopes(e_r));
    assert!(matches!(ctx.per_class_bound(&FieldElement(vec![2])), Err(GeomError::CentralTrace)));
}

#[test]
fn level_weights_over_q_and_gaussian_agree_with_local_weights() {
    use crate::padic_local::{weight_w, TraceResidue, WeightArg};
    let s = with_level("Q-2-3", 5, 2, 0);
    let ctx = RowContext::new(&s, &BoundOptions::default()).unwrap();
    for x in -30i128..30 {
        let want = weight_w(5, 5, 2, SubgroupKind::K0, WeightArg::Trace(TraceResidue::exact(x))).unwrap();
        assert_eq!(ctx.weight(&FieldElement(vec![x])).unwrap(), want, "x = {x}");
    }
    // Over Q(i), a rational trace has the same weight at either prime above 5.
    for index in [0, 1] {
        let mut input = catalog_setting("Qi-13").unwrap();
        input.level.push(LevelEntry { p: 5, index, r: 1, kappa: 1 });
        let s = QuaternionSetting::new(input).unwrap();
        let ctx = RowContext::new(&s, &BoundOptions::default()).unwrap();
        for x in -12i128..12 {
            let want = weight_w(5, 5, 1, SubgroupKind::K1, WeightArg::Trace(TraceResidue::exact(x))).unwrap();
            assert_eq!(ctx.weight(&FieldElement(vec![x, 0])).unwrap(), want, "x = {x}");
        }
    }
}

#[test]
fn weyl_regime_report() {
    let s = setting("Q-2-3");
    let w = SpectralWindow { places: vec![tempered(2.0)] };
    let rep = geometric_and_multiplicity_bound(&s, &w, &BoundOptions::default()).unwrap();
    assert_eq!(rep.regime, Regime::WeylLaw);
    assert_eq!(rep.r, vec![0.0]);
    assert_eq!(rep.savings, 1.0);
    // |x| <= e^2: 15 integers, of which +-2 are central.
    assert_eq!((rep.rows.count, rep.rows.skipped_central), (13, 2));
    assert!(rep.checks.self_normalization && rep.checks.rows_nonnegative);
    let total = (rep.central + rep.regular) / Interval::point(rep.spectral_min);
    assert_eq!(total, rep.final_bound);
    assert!(rep.final_bound.hi.is_finite() && rep.final_bound.lo > 0.0);
    assert!(rep.checks.weight_integral_bound <= rep.checks.weight_integral_cap);
    let json = serde_json::to_string(&rep).unwrap();
    let back: GeometricBoundReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back.final_bound, rep.final_bound);
    let csv = ledger_csv(&rep.ledger, rep.e_r());
    assert_eq!(csv.lines().count(), 14);
}

#[test]
fn window_minimum_sits_at_the_left_endpoint() {
    let f = build_testfn(ArchPlace::Real, Variant::Nontempered { r: 3.0 }).unwrap();
    for s0 in [0.0, 0.1, 0.25, 0.4] {
        let m = window_minimum(&f, &sigma(s0));
        let left = f.transform(Complex64::new(s0, 0.0)).re;
        assert_eq!(m, left);
    }
}

fn rotation(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[Complex64::new(c, 0.0), Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]]
}

fn su2(alpha: Complex64, beta: Complex64) -> [[Complex64; 2]; 2] {
    let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    let (a, b) = (alpha / n, beta / n);
    [[a, b], [-b.conj(), a.conj()]]
}

fn matmul(x: [[Complex64; 2]; 2], y: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

fn diag(t: f64) -> [[Complex64; 2]; 2] {
    let z = Complex64::new(0.0, 0.0);
    [[Complex64::new((t / 2.0).exp(), 0.0), z], [z, Complex64::new((-t / 2.0).exp(), 0.0)]]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Elements in the support of the test function have traces inside the
    /// trace region.
    #[test]
    fn trace_region_is_sound(r in 0.0f64..9.0, frac in 0.0f64..1.0, th1 in 0.0f64..6.3, th2 in 0.0f64..6.3,
                             a in (-1.0f64..1.0, -1.0f64..1.0), b in (-1.0f64..1.0, -1.0f64..1.0),
                             c in (-1.0f64..1.0, -1.0f64..1.0), d in (-1.0f64..1.0, -1.0f64..1.0)) {
        let h = frac * (2.0 * r + 2.0);
        let g = matmul(matmul(rotation(th1), diag(h)), rotation(th2));
        let tr = g[0][0] + g[1][1];
        prop_assert!(tr.norm_sqr() <= 4.0 * cosh_height(g) * (1.0 + 1e-12));
        prop_assert!(tr.re.abs() <= (r + 2.0).exp());
        let k1 = su2(Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let k2 = su2(Complex64::new(c.0, c.1), Complex64::new(d.0, d.1));
        let g = matmul(matmul(k1, diag(h)), k2);
        let tr = g[0][0] + g[1][1];
        prop_assert!(tr.norm_sqr() <= 4.0 * cosh_height(g) * (1.0 + 1e-12));
        prop_assert!(tr.norm_sqr() <= (2.0 * (r + 2.0)).exp());
    }
}

