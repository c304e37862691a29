//! Property tests for the model invariants.

use mmwprop::geometry::{canopy_path_length, CanopySpan, LinkGeometry, RayPath};
use mmwprop::pdp::{
    omni_received_power, Polarization, PowerDelayProfile, Scenario, SweepRecord, SweepSet,
};
use mmwprop::propagation::{
    fit_attenuation_from_excess, fit_foliage_attenuation, foliage_path_loss_db,
    free_space_path_loss_db, friis_received_power, ground_reflected_power, FoliageObservation,
    LinkBudgetParams,
};
use mmwprop::reflection::{
    fresnel_parallel, predicted_foliage_power_dbm, recover_reflection_coefficient, FresnelForm,
    GroundMaterial,
};
use proptest::prelude::*;

fn geometry_strategy() -> impl Strategy<Value = LinkGeometry> {
    (0.5f64..20.0, 0.5f64..20.0, 1.0f64..200.0)
        .prop_map(|(ht, hr, d)| LinkGeometry::new(ht, hr, d).unwrap())
}

proptest! {
    #[test]
    fn reflected_path_exceeds_separation_and_increases(geom in geometry_strategy()) {
        let gb = geom.ground_bounce();
        prop_assert!(gb.d_tot_m >= geom.separation_m);
        let farther = LinkGeometry::new(
            geom.tx_height_m,
            geom.rx_height_m,
            geom.separation_m * 1.5,
        ).unwrap().ground_bounce();
        prop_assert!(farther.d_tot_m > gb.d_tot_m);
        prop_assert!(farther.incident_deg > gb.incident_deg);
    }

    #[test]
    fn reflected_path_approaches_separation_at_long_range(
        ht in 0.5f64..5.0,
        hr in 0.5f64..5.0,
    ) {
        let geom = LinkGeometry::new(ht, hr, 1.0e6).unwrap();
        let gb = geom.ground_bounce();
        prop_assert!((gb.d_tot_m / geom.separation_m - 1.0).abs() < 1e-9);
    }

    #[test]
    fn specular_point_balances_the_two_angles(geom in geometry_strategy()) {
        let xs = geom.ground_bounce().specular_x_m;
        prop_assert!(xs > 0.0 && xs < geom.separation_m);
        let tx_angle = (geom.tx_height_m / xs).atan();
        let rx_angle = (geom.rx_height_m / (geom.separation_m - xs)).atan();
        prop_assert!((tx_angle - rx_angle).abs() < 1e-9);
    }

    #[test]
    fn canopy_length_is_additive(
        geom in geometry_strategy(),
        cuts in proptest::collection::vec(0.0f64..1.0, 4),
        ray in prop_oneof![Just(RayPath::Direct), Just(RayPath::GroundBounce)],
    ) {
        // Sort fractional cuts into two disjoint spans of the ground track.
        let mut f = cuts.clone();
        f.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let d = geom.separation_m;
        prop_assume!(f[0] < f[1] && f[1] < f[2] && f[2] < f[3]);
        let a = CanopySpan::new(f[0] * d, f[1] * d).unwrap();
        let b = CanopySpan::new(f[2] * d, f[3] * d).unwrap();
        let together = canopy_path_length(&[a, b], &geom, ray).unwrap();
        let separate = canopy_path_length(&[a], &geom, ray).unwrap()
            + canopy_path_length(&[b], &geom, ray).unwrap();
        prop_assert!((together - separate).abs() <= 1e-9 * separate.max(1.0));
    }

    #[test]
    fn attenuation_fit_round_trips(
        alpha in 0.0f64..3.0,
        distances in proptest::collection::vec(1.0f64..100.0, 1..8),
    ) {
        let obs: Vec<FoliageObservation> = distances.iter().map(|&d| {
            let pl_fs = 60.0 + 20.0 * d.log10();
            FoliageObservation::new(d, pl_fs, foliage_path_loss_db(pl_fs, alpha, d)).unwrap()
        }).collect();
        let fit = fit_foliage_attenuation(&obs).unwrap();
        prop_assert!((fit.alpha_db_per_m - alpha).abs() <= 1e-12 * alpha.max(1.0));
    }

    #[test]
    fn attenuation_fit_is_scale_consistent(
        scale in 0.01f64..100.0,
        samples in proptest::collection::vec((1.0f64..50.0, -5.0f64..30.0), 1..8),
    ) {
        let alpha = fit_attenuation_from_excess(&samples).unwrap().alpha_db_per_m;
        let scaled: Vec<(f64, f64)> = samples.iter()
            .map(|&(d, e)| (scale * d, scale * e))
            .collect();
        let alpha_scaled = fit_attenuation_from_excess(&scaled).unwrap().alpha_db_per_m;
        prop_assert!((alpha - alpha_scaled).abs() <= 1e-9 * alpha.abs().max(1.0));
    }

    #[test]
    fn friis_power_and_path_loss_agree(
        pt in -30.0f64..30.0,
        gain in 0.0f64..40.0,
        freq in 1.0e9f64..100.0e9,
        d in 0.1f64..1000.0,
    ) {
        let params = LinkBudgetParams::new(pt, gain, gain, freq).unwrap();
        let pr = friis_received_power(&params, d).unwrap();
        let pl = free_space_path_loss_db(freq, d).unwrap();
        prop_assert!((pt - pl + 2.0 * gain - pr).abs() < 1e-9);
    }

    #[test]
    fn bounce_power_is_monotone(
        gammas in proptest::collection::vec(0.001f64..1.0, 2),
        d_fols in proptest::collection::vec(0.0f64..30.0, 2),
    ) {
        let params = LinkBudgetParams::new(-7.9, 27.0, 27.0, 73.5e9).unwrap();
        let (g_lo, g_hi) = (gammas[0].min(gammas[1]), gammas[0].max(gammas[1]));
        prop_assume!(g_lo < g_hi);
        let p_lo = ground_reflected_power(&params, 20.9, 13.7, 0.4, g_lo).unwrap();
        let p_hi = ground_reflected_power(&params, 20.9, 13.7, 0.4, g_hi).unwrap();
        prop_assert!(p_lo < p_hi);

        let (f_lo, f_hi) = (d_fols[0].min(d_fols[1]), d_fols[0].max(d_fols[1]));
        prop_assume!(f_lo < f_hi);
        let p_shallow = ground_reflected_power(&params, 20.9, f_lo, 0.4, 0.5).unwrap();
        let p_deep = ground_reflected_power(&params, 20.9, f_hi, 0.4, 0.5).unwrap();
        prop_assert!(p_deep < p_shallow);
    }

    #[test]
    fn fresnel_magnitude_stays_bounded(
        eps in 1.0f64..30.0,
        theta in 0.0f64..89.999,
    ) {
        let material = GroundMaterial::new(eps).unwrap();
        for form in [FresnelForm::Standard, FresnelForm::Simplified] {
            let g = fresnel_parallel(&material, theta, form).unwrap();
            prop_assert!(g.abs() <= 1.0);
        }
    }

    #[test]
    fn forms_agree_at_normal_incidence(eps in 1.0f64..30.0) {
        let material = GroundMaterial::new(eps).unwrap();
        let a = fresnel_parallel(&material, 0.0, FresnelForm::Standard).unwrap();
        let b = fresnel_parallel(&material, 0.0, FresnelForm::Simplified).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn gamma_recovery_round_trips(
        gamma in 0.001f64..1.0,
        d_i in 1.0f64..100.0,
        extra in 0.01f64..2.0,
        d_fol in 0.0f64..30.0,
        alpha in 0.0f64..2.0,
        pr_fs in -90.0f64..-30.0,
    ) {
        let d_tot = d_i * (1.0 + extra);
        let pr_fol =
            predicted_foliage_power_dbm(d_i, d_tot, d_fol, alpha, pr_fs, gamma).unwrap();
        let est = recover_reflection_coefficient(
            d_i, d_tot, d_fol, alpha, pr_fs, pr_fol, 0.0, Polarization::Vv,
        ).unwrap();
        prop_assert!((est.gamma_mag - gamma).abs() <= 1e-9 * gamma);
    }

    #[test]
    fn omni_power_is_permutation_invariant(
        powers in proptest::collection::vec(1e-12f64..1e-3, 1..12),
    ) {
        let records: Vec<SweepRecord> = powers.iter().enumerate().map(|(i, &p)| {
            SweepRecord {
                tx_az_deg: 0.0,
                tx_el_deg: 0.0,
                rx_az_deg: (i as f64) * 10.0,
                rx_el_deg: 0.0,
                polarization: Polarization::Vv,
                distance_m: 10.0,
                pdp: PowerDelayProfile::new(vec![0.0], vec![p], -200.0, 2.5).unwrap(),
            }
        }).collect();
        let forward =
            SweepSet::new(records.clone(), 27.0, 27.0, -7.9, Scenario::FreeSpace).unwrap();
        let mut rev = records;
        rev.reverse();
        let backward = SweepSet::new(rev, 27.0, 27.0, -7.9, Scenario::FreeSpace).unwrap();
        let a = omni_received_power(&forward, 5.0).unwrap();
        let b = omni_received_power(&backward, 5.0).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }
}
