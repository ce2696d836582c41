use gkdeform_core::biherm::{self, constant_beta};
use gkdeform_core::brackets::{d_l, random_multivector};
use gkdeform_core::fields::{section_from_json, section_to_json, LbarSection, TorusKahlerData};
use gkdeform_core::gk::{derealify, realify};
use gkdeform_core::mc;
use gkdeform_core::surfaces::{self, Position, PointConfiguration};
use gkdeform_core::Scalar;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn mc_series_realifies_and_round_trips() {
    let eta = random_multivector(&mut ChaCha8Rng::seed_from_u64(41), 2, 1, 2, 1);
    let (eps, obs) = mc::mc_solve(&d_l(&eta), 3).unwrap();
    assert!(obs.stopped_at.is_none());
    assert!((1..=3).all(|k| mc::mc_residual(&eps).at(k).is_zero()));
    let a = realify(&eps).unwrap();
    assert_eq!(derealify(&a).unwrap(), eps);
}

#[test]
fn sections_survive_json() {
    let s = random_multivector(&mut ChaCha8Rng::seed_from_u64(3), 2, 2, 4, 2);
    let j = section_to_json(&s);
    let text = serde_json::to_string(&j).unwrap();
    let back: LbarSection = section_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, s);
}

#[test]
fn constant_beta_pipeline_on_n1_and_n2() {
    for n in [1, 2] {
        let torus = TorusKahlerData::standard(n);
        let beta = constant_beta(n, if n == 1 { Scalar::zero() } else { Scalar::frac(-1, 3) });
        let state = biherm::construction_loop(&beta, &torus, 2).unwrap();
        assert!(biherm::check_conditions(&state).iter().all(|r| r.passed()));
        let r = biherm::extract_bihermitian(&state).unwrap();
        assert!(biherm::check_bihermitian(&state, &r).unwrap().all());
    }
}

#[test]
fn degenerate_surfaces_from_public_api() {
    let mut c = PointConfiguration::new(7);
    c.lines.push(vec![0, 1, 2]);
    c.conics.push(vec![0, 3, 4, 5, 6, 1]);
    let r = surfaces::degenerate_report(&c).unwrap();
    assert_eq!(r.position, Position::AlmostGeneral);
    assert_eq!(r.minus_two_curves.len(), 2);
    assert!(r.distinct_argument_applies);
    assert_eq!(r.anticanonical_square, 2);
}
