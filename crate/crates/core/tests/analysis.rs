use approx::assert_relative_eq;
use hulthen::analysis::report::{consistency_report, Sample};
use hulthen::analysis::scan::{evaluate, linear_grid, log_grid};
use hulthen::analysis::{
    alpha_scan, alpha_scan_levels, all_figures, dimension_scan, find_intersections, imaginary_onset, near_degeneracies,
    parse_grid, threshold_map, Axis, CurveLabel, Formula, Level,
};
use hulthen::spectra::PrincipalNumber;
use hulthen::{Alignment, Branch, Error, ThresholdKind};
use proptest::prelude::*;

// 50-digit references for the closed-form Dirac energy at Z = mu0 = 1,
// (n_r, ell, D, alpha, minus root, plus root).
const DIRAC_TABLE: [(u32, u32, u32, f64, f64, f64); 4] = [
    (0, 0, 3, 0.1, -1.09522452071284401438062, 0.5752245207128440143806203),
    (1, 1, 4, 0.2, -1.103513960464995583634242, 0.7999845487002897012813006),
    (2, 0, 5, 0.4, -0.8542841654169960253844026, 0.3619764731093037176920949),
    (0, 2, 2, 0.05, -1.046257855218307027845317, 0.8415408740862315561472033),
];

#[test]
fn dirac_energies_match_references() {
    for (n_r, ell, d, a, minus, plus) in DIRAC_TABLE {
        let lvl = Level::state(n_r, ell, f64::from(d), Alignment::Unaligned);
        let em = evaluate(Formula::Dirac, &lvl, a, Branch::Minus, 1.0, 1.0).unwrap();
        let ep = evaluate(Formula::Dirac, &lvl, a, Branch::Plus, 1.0, 1.0).unwrap();
        assert_relative_eq!(em.value().unwrap(), minus, max_relative = 1e-14);
        assert_relative_eq!(ep.value().unwrap(), plus, max_relative = 1e-14);
    }
}

#[test]
fn onset_matches_radicand_root() {
    let onset = |n_r, ell, d| {
        let l = CurveLabel::new(Formula::Dirac, Level::state(n_r, ell, d, Alignment::Unaligned));
        imaginary_onset(&l, 1e-6, 10.0).unwrap()
    };
    // Roots of the radicand in alpha, 30 digits.
    assert_relative_eq!(onset(0, 0, 3.0), 1.61803398874989484820458683437, max_relative = 1e-12);
    assert_relative_eq!(onset(1, 1, 4.0), 0.554051578137920360987766631198, max_relative = 1e-12);
}

#[test]
fn onset_of_simplified_kg_is_its_threshold() {
    for n in 1..=4 {
        for d in 2..=6 {
            let l = CurveLabel::new(Formula::KleinGordonSimplified, Level::principal(n, f64::from(d)));
            let t = 4.0 / f64::from(2 * n + d - 3);
            assert_relative_eq!(imaginary_onset(&l, 1e-6, 20.0).unwrap(), t, max_relative = 1e-12);
        }
    }
}

#[test]
fn threshold_map_entries() {
    let kg = threshold_map(ThresholdKind::Kg, 1..=3, 1..=4);
    assert_eq!(kg.entries.len(), 12);
    assert_eq!(kg.get(1, 1), None);
    assert_eq!(kg.get(1, 3), Some(2.0));
    assert_eq!(kg.get(3, 4), Some(4.0 / 7.0));
    let dirac = threshold_map(ThresholdKind::Dirac, 1..=1, 3..=3);
    assert_relative_eq!(dirac.get(1, 3).unwrap(), (1.0 + 5f64.sqrt()) / 2.0, max_relative = 1e-15);
}

#[test]
fn identical_curves_are_rejected() {
    let grid = log_grid(1e-3, 1.0, 64).unwrap();
    let c = alpha_scan_levels(Formula::KleinGordonSimplified, &[Level::principal(1, 3.0)], &grid).unwrap();
    assert!(matches!(find_intersections(&c[0], &c[0]), Err(Error::DegenerateInput(_))));
}

#[test]
fn mixed_axes_are_rejected() {
    let a = alpha_scan_levels(Formula::KleinGordonSimplified, &[Level::principal(1, 3.0)], &log_grid(1e-3, 1.0, 16).unwrap()).unwrap();
    let d = dimension_scan(Formula::KleinGordonSimplified, &[1], 0.1, &linear_grid(2.0, 6.0, 16).unwrap()).unwrap();
    assert!(find_intersections(&a[0], &d[0]).is_err());
}

#[test]
fn adjacent_kg_curves_do_not_cross() {
    for n in 1..=4 {
        for d in 2..=5u32 {
            let top = 4.0 / f64::from(2 * n + d - 3 + 1) * (1.0 - 1e-12);
            let grid = log_grid(1e-6, top, 512).unwrap();
            let c = alpha_scan_levels(
                Formula::KleinGordonSimplified,
                &[Level::principal(n, f64::from(d)), Level::principal(n, f64::from(d + 1))],
                &grid,
            )
            .unwrap();
            assert!(find_intersections(&c[0], &c[1]).unwrap().is_empty(), "n={n} D={d}");
        }
    }
}

#[test]
fn crossings_of_distinct_levels_are_verified() {
    let grid = log_grid(1e-3, 1.2, 400).unwrap();
    let c = alpha_scan_levels(
        Formula::DiracSimplified,
        &[Level::principal(1, 2.0), Level::principal(2, 2.0), Level::principal(1, 5.0)],
        &grid,
    )
    .unwrap();
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            for r in find_intersections(&c[i], &c[j]).unwrap() {
                assert!(r.verified, "{r:?}");
                assert!(r.gap < 1e-8);
            }
        }
    }
}

#[test]
fn near_degeneracies_flag_equal_rho() {
    // n + (D - 1)/2 is shared, so the simplified Dirac curves coincide.
    let grid = log_grid(1e-3, 0.5, 64).unwrap();
    let c = alpha_scan_levels(
        Formula::DiracSimplified,
        &[Level::principal(1, 4.0), Level::principal(2, 2.0), Level::principal(1, 2.0)],
        &grid,
    )
    .unwrap();
    let nd = near_degeneracies(&c, 1e-3);
    assert!(nd.iter().any(|d| d.gap == 0.0));
}

#[test]
fn dimension_scan_tends_to_minus_four() {
    let dims = linear_grid(2.0, 50.0, 97).unwrap();
    for c in dimension_scan(Formula::KleinGordonSimplified, &[3, 4, 5], 1e-6, &dims).unwrap() {
        assert_eq!(c.axis, Axis::Dimension);
        for (_, e) in c.real_points() {
            assert!((e + 4.0).abs() < 1e-5, "{e}");
        }
    }
}

#[test]
fn parse_grid_forms() {
    assert_eq!(parse_grid("1,2,3,4").unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
    let lin = parse_grid("0:1:5:lin").unwrap();
    assert_eq!(lin, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    let lg = parse_grid("1e-3:1:4:log").unwrap();
    assert_relative_eq!(lg[1], 1e-2, max_relative = 1e-12);
    assert!(parse_grid("3,2,1,0").is_err());
    assert!(parse_grid("0:1:0").is_err());
    assert!(parse_grid("0:1").is_err());
}

#[test]
fn figures_have_the_documented_curves() {
    let f = all_figures().unwrap();
    let counts: Vec<usize> = f.iter().map(|x| x.curves.len()).collect();
    assert_eq!(counts, [12, 12, 3, 4]);
    assert_eq!(f[2].curves[0].axis, Axis::Dimension);
    for fig in &f {
        for c in &fig.curves {
            assert!(c.status_is_prefix(), "{} {}", fig.name, c.label.describe());
        }
    }
}

#[test]
fn consistency_report_is_deterministic_and_finds_factor_four() {
    let s = Sample::default();
    let a = consistency_report(&s);
    let b = consistency_report(&s);
    assert_eq!(a, b);
    let orbital = a.kg.iter().find(|f| f.interpretation == PrincipalNumber::RadialPlusOrbital).unwrap();
    assert!(orbital.fit.constant_relation);
    assert_relative_eq!(orbital.fit.constant.unwrap(), 4.0, max_relative = 1e-12);
    // Mass and potential slopes cancel in the sum, not the difference.
    assert_eq!(a.mass_relation.max_sum_of_slopes, 0.0);
    assert!(a.mass_relation.max_difference_of_slopes > 1.0);
}

proptest! {
    #[test]
    fn scans_increase_and_keep_status(a_lo in 1e-4f64..0.1, span in 1.5f64..50.0, n in 1u32..5, d in 2u32..8, pts in 4usize..64) {
        let grid = log_grid(a_lo, a_lo * span, pts).unwrap();
        let labels = [
            CurveLabel::new(Formula::KleinGordonSimplified, Level::principal(n, f64::from(d))),
            CurveLabel::new(Formula::DiracSimplified, Level::principal(n, f64::from(d))),
        ];
        for c in alpha_scan(&labels, &grid).unwrap() {
            prop_assert_eq!(c.points.len(), pts);
            prop_assert!(c.points.windows(2).all(|w| w[0].x < w[1].x));
            prop_assert!(c.status_is_prefix());
        }
    }

    #[test]
    fn crossings_re_verify(n1 in 1u32..4, d1 in 2u32..6, n2 in 1u32..4, d2 in 2u32..6) {
        prop_assume!((n1, d1) != (n2, d2));
        let grid = log_grid(1e-3, 1.5, 256).unwrap();
        let c = alpha_scan_levels(
            Formula::DiracSimplified,
            &[Level::principal(n1, f64::from(d1)), Level::principal(n2, f64::from(d2))],
            &grid,
        ).unwrap();
        match find_intersections(&c[0], &c[1]) {
            Ok(v) => for r in v {
                prop_assert!(r.verified);
                prop_assert!(r.x_star > 0.0 && r.x_star <= 1.5);
            },
            Err(Error::DegenerateInput(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
