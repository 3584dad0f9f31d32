use boxdim_core::chains::{CosetSpace, Lattice};
use boxdim_core::covers::{
    staggered_brick_cover_u3, synth_scaled_cover_ud, synth_simplicial_cover_zm, verify_cover, ColoredCover,
};
use boxdim_core::group::{word_ball, GroupSpec, DEFAULT_CAP};
use num_bigint::BigInt;
use std::time::Instant;

fn u3_k(k: u32) -> ColoredCover {
    synth_scaled_cover_ud(3, k, &staggered_brick_cover_u3(8).unwrap()).unwrap()
}

#[test]
fn scaled_u3_k2_passes_at_two() {
    let c = u3_k(2);
    let w = word_ball(&c.group, &c.group.identity(), 10, DEFAULT_CAP).unwrap();
    let t = Instant::now();
    let rep = verify_cover(&c, &w, 2).unwrap();
    assert!(rep.pass(), "{:?}", rep.lebesgue_failures.first());
    assert!(rep.max_multiplicity <= 4);
    eprintln!("k=2: {} points in {:?}", rep.window_points, t.elapsed());
}

#[test]
fn scaled_u3_k6_passes_at_six() {
    let c = u3_k(6);
    let w = word_ball(&c.group, &c.group.identity(), 8, DEFAULT_CAP).unwrap();
    let rep = verify_cover(&c, &w, 6).unwrap();
    assert!(rep.pass(), "{:?}", rep.lebesgue_failures.first());
}

#[test]
fn base_u3_cover_does_not_reach_two() {
    // the unscaled cover is only good at R = 1
    let c = staggered_brick_cover_u3(8).unwrap();
    let w = word_ball(&c.group, &c.group.identity(), 10, DEFAULT_CAP).unwrap();
    assert!(verify_cover(&c, &w, 1).unwrap().pass());
    assert!(!verify_cover(&c, &w, 2).unwrap().pass());
}

#[test]
fn alpha_two_has_index_sixteen() {
    let g = GroupSpec::unitriangular(3).unwrap();
    let a2 = Lattice::scaled(&g, &BigInt::from(2)).unwrap();
    assert_eq!(a2.index(), BigInt::from(16));
    let cs = CosetSpace::new(&g, &a2, 1000).unwrap();
    assert_eq!(cs.index(), 16);
    assert_eq!(u3_k(2).period.lattice.index(), BigInt::from(16u32.pow(4)));
}

#[test]
fn cover_json_round_trip() {
    for c in [u3_k(2), synth_simplicial_cover_zm(2, 8).unwrap()] {
        let v = c.to_json();
        let back = ColoredCover::from_json(&v).unwrap();
        assert_eq!(back, c);
    }
}

#[test]
fn cover_json_errors_name_the_field() {
    let mut v = synth_simplicial_cover_zm(1, 8).unwrap().to_json();
    v["colors"][1][0] = serde_json::json!([[1, 2]]);
    let err = ColoredCover::from_json(&v).unwrap_err().to_string();
    assert!(err.contains("colors[1][0]"), "{err}");
    let mut v = synth_simplicial_cover_zm(1, 8).unwrap().to_json();
    v.as_object_mut().unwrap().remove("scale_R");
    assert!(ColoredCover::from_json(&v).unwrap_err().to_string().contains("scale_R"));
}

#[test]
fn passing_at_r_passes_below() {
    let c = synth_simplicial_cover_zm(1, 16).unwrap();
    let w = word_ball(&c.group, &c.group.identity(), 80, DEFAULT_CAP).unwrap();
    for r in 0..=2 {
        assert!(verify_cover(&c, &w, r).unwrap().pass());
    }
}
