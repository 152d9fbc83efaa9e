use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use openphase::holonomy::{
    geometric_phase, label_paths_closed_limit, phase_sweep, phases_at_point, track_eigenpaths, EigenPath, FieldPath,
    HolonomyError, Representation, ThetaGrid, TrackOptions, ALL_LABELS,
};
use openphase::lindblad::{coherence_to_column_stacking, DecayRates};
use openphase::matops::C64;
use openphase::oracle::{closed_liouvillian_spectrum, multiset_distance};
use openphase::stirap::PulseParams;
use proptest::prelude::*;

/// γ₁₃τ = 0.5, γ₂₃τ = 1: the emission schedule point with γ₂₃ = 2γ₁₃.
fn emission_rates() -> DecayRates {
    DecayRates::new(0.5, 1.0, 0.0, 0.0).unwrap()
}

fn reference_grid(points: usize) -> ThetaGrid {
    let p = PulseParams::reference();
    ThetaGrid::uniform_in_time(&p, -6.0, 8.0, points).unwrap()
}

fn beta(rates: &DecayRates, grid: &ThetaGrid, label: u8, opts: &TrackOptions) -> C64 {
    let p = PulseParams::reference();
    phases_at_point(grid, &p, rates, &[label], opts).unwrap().remove(0).unwrap().beta
}

/// Labeled paths for a collisional point on a small grid, shared by the gauge properties.
fn collisional_paths() -> &'static Vec<EigenPath> {
    static PATHS: OnceLock<Vec<EigenPath>> = OnceLock::new();
    PATHS.get_or_init(|| {
        let p = PulseParams::reference();
        let rates = DecayRates::new(0.3, 0.6, 1.2, 0.7).unwrap();
        let grid = ThetaGrid::uniform_in_time(&p, -3.06, 4.39, 300).unwrap();
        let opts = TrackOptions::default();
        let mut paths = track_eigenpaths(&grid, &p, &rates, &opts).unwrap();
        label_paths_closed_limit(&mut paths, &p, &rates, &opts).unwrap();
        paths
    })
}

#[test]
fn regression_values_on_the_production_grid() {
    // Frozen from a 20000-point run of the same pipeline.
    let reference = [
        (1u8, C64::new(-1.248814559858611e-2, 1.895599944099817e-4)),
        (9u8, C64::new(1.248814559858596e-2, 1.895599944134789e-4)),
    ];
    let grid = reference_grid(2000);
    for (label, expected) in reference {
        let got = beta(&emission_rates(), &grid, label, &TrackOptions::default());
        assert!((got - expected).norm() < 1e-4 * TAU, "label {label}: {got} vs {expected}");
    }
}

#[test]
fn grid_refinement_converges_at_least_linearly() {
    let opts = TrackOptions::default();
    let values: Vec<C64> =
        [500, 1000, 2000].iter().map(|&n| beta(&emission_rates(), &reference_grid(n), 1, &opts)).collect();
    let first = (values[0] - values[1]).norm();
    let second = (values[1] - values[2]).norm();
    assert!(second <= first / 1.9, "differences {first:e} then {second:e}");
}

#[test]
fn near_closed_eigenvalues_follow_the_closed_spectrum() {
    let p = PulseParams::reference();
    let rates = DecayRates::new(0.5e-6, 1e-6, 0.0, 0.0).unwrap();
    let grid = ThetaGrid::uniform_in_time(&p, -6.0, 8.0, 200).unwrap();
    let opts = TrackOptions { lenient: true, ..TrackOptions::default() };
    let paths = track_eigenpaths(&grid, &p, &rates, &opts).unwrap();
    let g = p.reference_norm();
    for k in 0..paths[0].len() {
        let theta = paths[0].thetas[k];
        let values: Vec<C64> = paths.iter().map(|path| path.eigenvalues[k]).collect();
        let closed = closed_liouvillian_spectrum(g * theta.sin(), g * theta.cos());
        assert!(multiset_distance(&values, &closed) < 1e-4 * g);
    }
}

#[test]
fn equal_emission_without_collisions_is_degenerate() {
    let p = PulseParams::reference();
    let rates = DecayRates::new(1.0, 1.0, 0.0, 0.0).unwrap();
    let grid = ThetaGrid::uniform_in_time(&p, -6.0, 8.0, 100).unwrap();
    let err = track_eigenpaths(&grid, &p, &rates, &TrackOptions::default()).unwrap_err();
    assert!(matches!(err, HolonomyError::DegenerateRegime { .. }), "{err}");
}

#[test]
fn unequal_emission_paths_stay_continuous() {
    let p = PulseParams::reference();
    let rates = DecayRates::new(1.0, 2.0, 0.0, 0.0).unwrap();
    let opts = TrackOptions { lenient: true, ..TrackOptions::default() };
    let mut paths = track_eigenpaths(&reference_grid(2000), &p, &rates, &opts).unwrap();
    label_paths_closed_limit(&mut paths, &p, &rates, &opts).unwrap();
    for path in &paths {
        // Labels 2/3 and 7/8 are exactly degenerate without collisions; their
        // individual vectors are not defined, only the pair subspace.
        if path.min_gap >= opts.degeneracy_rel {
            assert!(path.min_overlap > 0.9, "label {:?}: {}", path.label, path.min_overlap);
        }
    }
    let nondegenerate = paths.iter().filter(|path| path.min_gap >= opts.degeneracy_rel).count();
    assert!(nondegenerate >= 5);
}

#[test]
fn pair_labels_on_spontaneous_schedules_are_degenerate() {
    let p = PulseParams::reference();
    let grid = ThetaGrid::uniform_in_time(&p, -3.06, 4.39, 400).unwrap();
    let results = phases_at_point(&grid, &p, &emission_rates(), &[2, 3, 7, 8], &TrackOptions::default()).unwrap();
    for r in results {
        assert!(
            matches!(r, Err(HolonomyError::DegenerateRegime { .. }) | Err(HolonomyError::AmbiguousLabel { .. })),
            "{r:?}"
        );
    }
}

#[test]
fn basis_choice_does_not_change_the_phase() {
    let p = PulseParams::reference();
    let rates = DecayRates::new(0.3, 0.6, 1.2, 0.7).unwrap();
    let grid = ThetaGrid::uniform_in_time(&p, -3.06, 4.39, 400).unwrap();
    let coherence = TrackOptions::default();
    let stacked = TrackOptions { representation: Representation::column_stacking(), ..TrackOptions::default() };
    let a = phases_at_point(&grid, &p, &rates, &ALL_LABELS, &coherence).unwrap();
    let b = phases_at_point(&grid, &p, &rates, &ALL_LABELS, &stacked).unwrap();
    let mut compared = 0;
    for (x, y) in a.iter().zip(&b) {
        let (x, y) = (x.as_ref().unwrap(), y.as_ref().unwrap());
        assert_eq!(x.label, y.label);
        // Pairs split by ~1e-10 relative have eigenvectors resolved only to
        // roundoff/gap ~ 1e-6, in any basis.
        if x.min_gap < 1e-6 {
            continue;
        }
        compared += 1;
        let diff = (x.beta - y.beta).norm().min((x.beta - y.beta + TAU).norm()).min((x.beta - y.beta - TAU).norm());
        assert!(diff < 1e-10, "label {}: {} vs {}", x.label, x.beta, y.beta);
    }
    assert_eq!(compared, 5);
    assert!(Representation::from_transform(coherence_to_column_stacking()).is_some());
}

#[test]
fn pulsed_field_path_runs() {
    let p = PulseParams::reference();
    let grid = ThetaGrid::uniform_in_time(&p, -3.06, 4.39, 1000).unwrap();
    let opts = TrackOptions { field_path: FieldPath::Pulsed, ..TrackOptions::default() };
    let results = phases_at_point(&grid, &p, &emission_rates(), &[1, 9], &opts).unwrap();
    for r in results {
        let phase = r.unwrap();
        assert!(phase.beta.re.is_finite() && phase.beta.im.is_finite());
    }
}

#[test]
fn sweep_shapes_and_error_annotation() {
    let p = PulseParams::reference();
    let grid = ThetaGrid::uniform_in_time(&p, -3.06, 4.39, 200).unwrap();
    let opts = TrackOptions::default();
    assert!(phase_sweep(&[], &p, &[1, 9], &grid, &opts).is_empty());

    let rows = phase_sweep(&[emission_rates()], &p, &[1, 9], &grid, &opts);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].phases.len(), 2);
    assert!(rows[0].phases.iter().all(|r| r.is_ok()));

    let degenerate = DecayRates::new(1.0, 1.0, 0.0, 0.0).unwrap();
    let rows = phase_sweep(&[emission_rates(), degenerate], &p, &[2], &grid, &opts);
    match &rows[1].phases[0] {
        Err(HolonomyError::Sweep { index, .. }) => assert_eq!(*index, 1),
        other => panic!("expected an annotated error, got {other:?}"),
    }
    assert!(matches!(phases_at_point(&grid, &p, &degenerate, &[10], &opts), Err(HolonomyError::InvalidLabel(10))));
}

#[test]
fn unlabeled_paths_are_rejected() {
    let mut path = collisional_paths()[0].clone();
    path.label = None;
    assert_eq!(geometric_phase(&path, PI / 4.0, &Representation::coherence()), Err(HolonomyError::Unlabeled));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn interior_gauge_does_not_change_the_phase(
        factors in proptest::collection::vec((0.1f64..10.0, -PI..PI), 298),
        which in 0usize..9,
    ) {
        let rep = Representation::coherence();
        let path = &collisional_paths()[which];
        let reference = geometric_phase(path, PI / 4.0, &rep).unwrap();
        let mut scrambled = path.clone();
        for (k, &(modulus, angle)) in factors.iter().enumerate() {
            let c = C64::from_polar(modulus, angle);
            scrambled.rights[k + 1] *= c;
            scrambled.lefts[k + 1] /= c;
        }
        let again = geometric_phase(&scrambled, PI / 4.0, &rep).unwrap();
        prop_assert!((again.beta - reference.beta).norm() < 1e-12, "{} vs {}", again.beta, reference.beta);
    }
}
