use pretzel_pi1::derivation::run_pipeline;
use pretzel_pi1::freegroup::{palindrome_rotation, CyclicWord, Generator};
use pretzel_pi1::knot::{LONGITUDE, R_INF};
use pretzel_pi1::presentation::{replay_trace, DerivationTrace};

#[test]
fn final_relator_shape() {
    let (c, l) = (Generator::named("c"), Generator::named("l"));
    for s in 3..=12 {
        let res = run_pipeline(s).unwrap();
        let r = res.presentation.relator(R_INF).unwrap();
        assert!(r.is_cyclically_reduced(), "s={s}");
        assert_eq!(r.len() as i64, 2 * s + 9, "s={s}");
        assert_eq!((r.exponent_sum(&c), r.exponent_sum(&l)), (2, -1), "s={s}");
        assert!(palindrome_rotation(&CyclicWord::new(r)).is_some(), "s={s}");
    }
}

#[test]
fn longitude_only_uses_live_generators() {
    for s in [3, 6, 12] {
        let res = run_pipeline(s).unwrap();
        assert!(!res.checkpoints.is_empty());
        for (name, p) in &res.checkpoints {
            let lon = p.tracked_word(LONGITUDE).unwrap_or_else(|| panic!("{name} lost the longitude"));
            for g in lon.generators() {
                assert!(p.has_generator(&g), "s={s} {name}: {g} is dead");
            }
            assert!(p.abel_image(lon).unwrap().is_zero(), "s={s} {name}");
        }
    }
}

#[test]
fn raw_and_simplified_longitudes_agree_in_homology() {
    for s in 3..=12 {
        let res = run_pipeline(s).unwrap();
        let a = res.presentation.abel_image(&res.longitude_raw).unwrap();
        let b = res.presentation.abel_image(&res.longitude).unwrap();
        assert_eq!(a.coords, b.coords, "s={s}");
    }
}

#[test]
fn trace_json_round_trips_and_replays() {
    let res = run_pipeline(5).unwrap();
    let back = DerivationTrace::from_json(&res.trace.to_json()).unwrap();
    assert_eq!(back, res.trace);
    let report = replay_trace(&back);
    assert!(report.pass);
    assert!(report.steps.iter().all(|st| st.ok));
}
