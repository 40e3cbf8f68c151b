mod support;

use floydkit_core::quasiconvex::{
    default_depth, grid_sweep, subgroup_hull_orbit_count, FreeGroupModel, GridDiagonalModel,
    OrbitModel, ShadowMode, DEFAULT_WINDOW,
};
use floydkit_core::{Basis, Subgroup, Verdict};
use support::oracles;

#[test]
fn free_group_classes_match_membership_oracle() {
    let b = Basis::standard(2);
    for (gens, radii) in [
        (vec!["a"], 4..=7),
        (vec!["a b"], 4..=7),
        (vec!["a", "b"], 3..=4),
        (vec!["a b A"], 4..=6),
    ] {
        let h = Subgroup::parse(&b, &gens).unwrap();
        for r in radii {
            let model = FreeGroupModel::new(&b, r, h.clone()).unwrap();
            let (rec, hull) =
                subgroup_hull_orbit_count(&model, default_depth(r), &ShadowMode::OrbitTrace)
                    .unwrap();
            let expected = oracles::free_edge_classes(model.graph(), &h, &hull.edges);
            assert_eq!(rec.orbit_classes, expected, "{gens:?} radius {r}");
        }
    }
}

#[test]
fn grid_classes_match_coordinate_oracle() {
    for n in 3..=6 {
        let model = GridDiagonalModel::new(n).unwrap();
        let (rec, hull) = subgroup_hull_orbit_count(
            &model,
            default_depth(model.radius()),
            &ShadowMode::OrbitTrace,
        )
        .unwrap();
        assert_eq!(
            rec.orbit_classes,
            oracles::grid_edge_classes(model.graph(), n, &hull.edges)
        );
    }
    assert_eq!(
        grid_sweep(&[3, 4, 5, 6], DEFAULT_WINDOW).unwrap().verdict,
        Verdict::Growing
    );
}

#[test]
fn off_shadow_degrees_stay_bounded() {
    let b = Basis::standard(2);
    let h = Subgroup::parse(&b, &["a"]).unwrap();
    for r in 4..=8 {
        let model = FreeGroupModel::new(&b, r, h.clone()).unwrap();
        let (rec, _) =
            subgroup_hull_orbit_count(&model, default_depth(r), &ShadowMode::OrbitTrace).unwrap();
        assert_eq!(rec.max_inner_degree, 2);
    }
}
