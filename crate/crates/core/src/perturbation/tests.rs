use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::*;
use crate::instances::{self, block_example, BlockExampleSpec, DEFAULT_THETA0};
use crate::numerics::{c64, diagonal, identity};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn line_in_plane(phi: f64) -> Subspace {
    let mut b = Matrix::zeros(3, 1);
    b[(1, 0)] = c64(phi.cos(), 0.0);
    b[(2, 0)] = c64(phi.sin(), 0.0);
    Subspace::from_orthonormal(b).unwrap()
}

fn coordinate_planes(n: usize) -> WeightedFamily {
    let mut f = WeightedFamily::new(n);
    for i in 0..n {
        let mut b = Matrix::zeros(n, 1);
        b[(i, 0)] = c64(1.0, 0.0);
        f.push(Subspace::from_orthonormal(b).unwrap(), 1.0).unwrap();
    }
    f
}

#[test]
fn unitary_operator_is_neutral() {
    let mut rng = instances::rng(4);
    let u = instances::random_unitary(4, &mut rng);
    let fam = instances::random_family(
        &instances::FamilySpec {
            ambient_dim: 4,
            dims: vec![1, 2, 3],
            weights_range: (0.5, 1.5),
            orthonormal: false,
        },
        2,
    )
    .unwrap();
    let q = local_quantities(&u, &fam, &tol()).unwrap();
    for e in &q.entries {
        assert!((e.gamma - 1.0).abs() < 1e-12 && (e.norm - 1.0).abs() < 1e-12);
    }
    let c = condition_c(&q);
    assert!((c.c - 1.0).abs() < 1e-12);

    let ww = construct_weights(&q, &fam.weights(), 1.0, 1.0, WeightStrategy::GeometricMid).unwrap();
    for (w, old) in ww.windows.iter().zip(fam.weights()) {
        assert!((w.lo - old).abs() < 1e-12 && (w.hi - old).abs() < 1e-12);
        assert!((w.chosen - old).abs() < 1e-12);
    }
    let before = fam.frame_bounds(&tol()).unwrap();
    let after = perturb(&u, &fam, &ww, &tol())
        .unwrap()
        .frame_bounds(&tol())
        .unwrap();
    assert!((before.lower - after.lower).abs() < 1e-10);
    assert!((before.upper - after.upper).abs() < 1e-10);
}

#[test]
fn example_even_index_quantities() {
    let ex = block_example(&BlockExampleSpec::geometric(2, DEFAULT_THETA0).unwrap());
    let q = local_quantities(&ex.operator, &ex.family, &tol()).unwrap();
    for (i, e) in q.entries.iter().enumerate() {
        assert!((e.norm - 1.0).abs() < 1e-12);
        if i % 2 == 1 {
            assert!((e.gamma - FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }
}

#[test]
fn projector_on_its_own_subspace() {
    let w = line_in_plane(0.3);
    let fam = WeightedFamily::from_items(3, [(w.clone(), 1.0)]).unwrap();
    let q = local_quantities(&w.projector(), &fam, &tol()).unwrap();
    assert!((q.entries[0].gamma - 1.0).abs() < 1e-12);
    assert!((q.entries[0].norm - 1.0).abs() < 1e-12);
}

#[test]
fn condition_constant_of_truncated_example() {
    for k in [1, 2, 3, 5] {
        let spec = BlockExampleSpec::geometric(k, DEFAULT_THETA0).unwrap();
        let ex = block_example(&spec);
        let q = local_quantities(&ex.operator, &ex.family, &tol()).unwrap();
        // direct minimum over the computed ratios
        let direct = q
            .entries
            .iter()
            .map(|e| e.ratio.unwrap())
            .fold(f64::INFINITY, f64::min);
        let c = condition_c(&q);
        assert_eq!(c.c, direct);
        let last = spec.thetas()[k - 1];
        assert!((c.c - last.sin().powi(2)).abs() < 1e-12);
        assert_eq!(c.argmin, Some(2 * (k - 1)));
    }
}

#[test]
fn degenerate_index_forces_zero() {
    // second subspace lies in N(T)
    let t = diagonal(&[1.0, 1.0, 0.0]);
    let mut e3 = Matrix::zeros(3, 1);
    e3[(2, 0)] = c64(1.0, 0.0);
    let fam = WeightedFamily::from_items(
        3,
        [
            (line_in_plane(0.2), 1.0),
            (Subspace::from_orthonormal(e3).unwrap(), 1.0),
        ],
    )
    .unwrap();
    let q = local_quantities(&t, &fam, &tol()).unwrap();
    assert!(q.entries[1].is_degenerate());
    let c = condition_c(&q);
    assert_eq!(c.c, 0.0);
    assert_eq!(c.degenerate_indices, vec![1]);
    assert!((c.c_nondegenerate.unwrap() - 1.0).abs() < 1e-12);
    assert!(matches!(
        construct_weights(&q, &[1.0, 1.0], 0.5, 1.0, WeightStrategy::GeometricMid),
        Err(Error::HypothesisViolation { index: 1, .. })
    ));
    assert!(run_pipeline(&t, &fam, None, WeightStrategy::GeometricMid, &tol()).is_err());
}

#[test]
fn weight_window_from_local_quantities() {
    let spec = BlockExampleSpec::geometric(3, DEFAULT_THETA0).unwrap();
    let ex = block_example(&spec);
    let q = local_quantities(&ex.operator, &ex.family, &tol()).unwrap();
    let c = condition_c(&q).c;
    let b = 2.0;
    let ww = construct_weights(
        &q,
        &ex.family.weights(),
        c * b,
        b,
        WeightStrategy::GeometricMid,
    )
    .unwrap();
    for (i, (w, e)) in ww.windows.iter().zip(&q.entries).enumerate() {
        let lo = e.norm / b.sqrt();
        let hi = e.gamma / (c * b).sqrt();
        assert!((w.lo - lo).abs() < 1e-12, "index {i}");
        assert!((w.hi - hi.max(lo)).abs() < 1e-12, "index {i}");
        assert!(w.lo <= w.chosen && w.chosen <= w.hi);
        assert!((w.chosen - (w.lo * w.hi).sqrt()).abs() < 1e-12);
    }
    // the minimizing index has a single-point window
    let last = 2 * (spec.num_blocks() - 1);
    assert!((ww.windows[last].hi - ww.windows[last].lo).abs() < 1e-9);
}

#[test]
fn ratio_above_c_is_rejected() {
    let ex = block_example(&BlockExampleSpec::geometric(2, DEFAULT_THETA0).unwrap());
    let q = local_quantities(&ex.operator, &ex.family, &tol()).unwrap();
    let err = construct_weights(
        &q,
        &ex.family.weights(),
        1.0,
        1.0,
        WeightStrategy::LowerEdge,
    )
    .unwrap_err();
    assert!(
        matches!(err, Error::HypothesisViolation { index: 0, .. }),
        "{err:?}"
    );
    assert!(construct_weights(
        &q,
        &ex.family.weights(),
        2.0,
        1.0,
        WeightStrategy::LowerEdge
    )
    .is_err());
    assert!(construct_weights(&q, &[1.0], 0.1, 1.0, WeightStrategy::LowerEdge).is_err());
}

#[test]
fn perturb_identity_keeps_subspaces() {
    let fam = coordinate_planes(3);
    let q = local_quantities(&identity(3), &fam, &tol()).unwrap();
    let ww = construct_weights(&q, &fam.weights(), 0.5, 1.0, WeightStrategy::UpperEdge).unwrap();
    let p = perturb(&identity(3), &fam, &ww, &tol()).unwrap();
    for (a, b) in fam.items().iter().zip(p.items()) {
        assert!(a.subspace.same_span(&b.subspace, &tol()).unwrap());
    }
    assert_eq!(p.weights(), ww.chosen());
}

#[test]
fn perturbed_example_images() {
    let ex = block_example(&BlockExampleSpec::geometric(2, DEFAULT_THETA0).unwrap());
    let q = local_quantities(&ex.operator, &ex.family, &tol()).unwrap();
    let c = condition_c(&q).c;
    let ww = construct_weights(
        &q,
        &ex.family.weights(),
        c,
        1.0,
        WeightStrategy::GeometricMid,
    )
    .unwrap();
    let p = perturb(&ex.operator, &ex.family, &ww, &tol()).unwrap();
    for k in 0..2 {
        let a = &p.items()[2 * k].subspace;
        let b = &p.items()[2 * k + 1].subspace;
        assert_eq!(a.dim(), 2);
        assert!(a.same_span(b, &tol()).unwrap());
        assert!(a.basis().row(3 * k + 2).iter().all(|z| z.norm() < 1e-15));
    }
}

#[test]
fn invertible_operator_gives_fusion_frame() {
    let mut rng = instances::rng(10);
    let t = instances::random_operator_with_rank(5, 5, 5, (0.5, 2.0), &mut rng).unwrap();
    let fam = instances::random_family(
        &instances::FamilySpec {
            ambient_dim: 5,
            dims: vec![2, 2, 3],
            weights_range: (1.0, 1.0),
            orthonormal: false,
        },
        11,
    )
    .unwrap();
    let mut images = WeightedFamily::new(5);
    for it in fam.items() {
        images
            .push(
                subspaces::image(&t, &it.subspace, &tol()).unwrap(),
                it.weight,
            )
            .unwrap();
    }
    let fa = images.frame_bounds(&tol()).unwrap();
    assert_eq!(fa.classification, crate::Classification::FusionFrame);
}

#[test]
fn prediction_degenerate_cases() {
    // unitary T and an orthonormal basis of subspaces: both intervals are {1}
    let mut rng = instances::rng(3);
    let u = instances::random_unitary(4, &mut rng);
    let p = predict_bounds(&u, &coordinate_planes(4), 1.0, 1.0, &tol()).unwrap();
    for iv in [p.lower, p.upper] {
        assert!((iv.lo - 1.0).abs() < 1e-12 && (iv.hi - 1.0).abs() < 1e-12);
    }
    // orthogonal projector T, single full-space item
    let t = line_in_plane(0.4).projector();
    let fam = WeightedFamily::from_items(3, [(Subspace::full(3), 1.0)]).unwrap();
    let p = predict_bounds(&t, &fam, 1.0, 1.0, &tol()).unwrap();
    assert!((p.lower.lo - 1.0).abs() < 1e-12 && (p.upper.hi - 1.0).abs() < 1e-12);
    assert!(predict_bounds(&t, &fam, 2.0, 1.0, &tol()).is_err());
}

#[test]
fn pipeline_on_example() {
    let ex = block_example(&BlockExampleSpec::geometric(4, DEFAULT_THETA0).unwrap());
    let r = run_pipeline(
        &ex.operator,
        &ex.family,
        None,
        WeightStrategy::GeometricMid,
        &tol(),
    )
    .unwrap();
    assert!(r.passed(), "{r:?}");
    assert!(r.achieved.lower > 0.0);
    assert_eq!(r.achieved.span_dim, 8);
}

#[test]
fn prop_gammas_closed_form() {
    let r = verify_prop_gammas(&identity(3), &line_in_plane(0.5), &tol()).unwrap();
    assert!(r.hypothesis_met && r.holds);
    assert!((r.lower - 1.0).abs() < 1e-12 && (r.upper - 1.0).abs() < 1e-12);

    let phi = PI / 5.0;
    let r = verify_prop_gammas(&diagonal(&[1.0, 1.0, 0.0]), &line_in_plane(phi), &tol()).unwrap();
    assert!(r.hypothesis_met && r.holds);
    assert!((r.cos_kernel - phi.sin()).abs() < 1e-12);
    for v in [r.lower, r.gamma_tpw, r.upper] {
        assert!((v - phi.cos()).abs() < 1e-12);
    }
    // W inside N(T)
    let r = verify_prop_gammas(
        &diagonal(&[1.0, 1.0, 0.0]),
        &line_in_plane(PI / 2.0),
        &tol(),
    )
    .unwrap();
    assert!(!r.hypothesis_met);
}

#[test]
fn angle_bounds_closed_form() {
    let r = verify_thm_angle_bounds(&identity(3), &line_in_plane(0.3), &tol()).unwrap();
    assert!(r.hypothesis_met && r.holds);
    assert!(r.cos_kernel.abs() < 1e-12 && r.cos_preimage.abs() < 1e-12 && r.bound.abs() < 1e-7);

    let phi = PI / 5.0;
    let r =
        verify_thm_angle_bounds(&diagonal(&[1.0, 1.0, 0.0]), &line_in_plane(phi), &tol()).unwrap();
    assert!(r.hypothesis_met && r.holds && r.intersection_identity);
    for v in [r.cos_kernel, r.cos_preimage, r.bound] {
        assert!((v - phi.sin()).abs() < 1e-9, "{v}");
    }
    assert!(matches!(
        verify_thm_angle_bounds(&diagonal(&[1.0, -1.0, 0.0]), &line_in_plane(phi), &tol()),
        Err(Error::NotPositiveSemidefinite(_))
    ));
}

#[test]
fn cor_equivalence_closed_form() {
    let ws: Vec<Subspace> = [PI / 8.0, PI / 6.0, PI / 4.0]
        .iter()
        .map(|&p| line_in_plane(p))
        .collect();
    let r = verify_cor_equivalence(&identity(3), &ws, &tol()).unwrap();
    assert!(r.passed());
    assert!(r
        .indices
        .iter()
        .all(|i| (i.gamma - 1.0).abs() < 1e-12 && i.cos_kernel < 1e-12 && i.gap < 1e-12));

    let r = verify_cor_equivalence(&diagonal(&[1.0, 1.0, 0.0]), &ws, &tol()).unwrap();
    assert!(r.passed() && r.gamma_positive && r.cos_below_one && r.gap_below_one);
    let s = (PI / 4.0).sin();
    assert!((r.inf_gamma - (PI / 4.0).cos()).abs() < 1e-12);
    assert!((r.sup_cos_kernel - s).abs() < 1e-12);
    assert!((r.sup_gap - s).abs() < 1e-12);
    for (i, p) in r.indices.iter().zip([PI / 8.0, PI / 6.0, PI / 4.0]) {
        assert!((i.gap - p.sin()).abs() < 1e-12 && (i.cos_preimage - p.sin()).abs() < 1e-12);
    }

    let mut with_kernel = ws.clone();
    with_kernel.push(line_in_plane(PI / 2.0));
    let r = verify_cor_equivalence(&diagonal(&[1.0, 1.0, 0.0]), &with_kernel, &tol()).unwrap();
    assert!(r.passed());
    assert!(!r.gamma_positive && !r.cos_below_one && !r.gap_below_one);
    assert_eq!((r.inf_gamma, r.sup_cos_kernel, r.sup_gap), (0.0, 1.0, 1.0));
}

#[test]
fn strategy_names() {
    assert_eq!(
        "lower_edge".parse::<WeightStrategy>().unwrap(),
        WeightStrategy::LowerEdge
    );
    assert!("middle".parse::<WeightStrategy>().is_err());
}
