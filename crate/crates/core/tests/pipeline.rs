use fareylab_core::limit_analysis::{
    endpoint_convergence_report, proj_distance, sample_at, simplex_ends, sweep_report,
};
use fareylab_core::numeric::rat;
use fareylab_core::pairing::{default_family, laminations_of, simplex_point};
use fareylab_core::ray_model::{active_index, ModelParams};
use fareylab_core::schedule::{GrowthSchedule, ScheduleParams};

fn schedule() -> GrowthSchedule {
    GrowthSchedule::generate(ScheduleParams::default()).unwrap()
}

#[test]
fn endpoints_converge_for_both_parities() {
    let s = schedule();
    let family = default_family();
    for parity in 0..2u8 {
        let rep = endpoint_convergence_report(&s, &family, &ModelParams::default(), parity).unwrap();
        assert!(rep.rows.iter().all(|r| r.k % 2 == parity as usize));
        assert!(rep.strictly_decreasing_from(4), "parity {parity}");
        assert!(rep.last().unwrap().distance.hi() < &rat(1, 1000));
        assert!(rep.max_ratio_deviation_from(10) <= rat(1, 100));
    }
}

#[test]
fn sweep_limits_lie_on_the_segment_and_separate() {
    let s = schedule();
    let family = default_family();
    let thetas = [rat(1, 4), rat(1, 2), rat(3, 4)];
    let rep = sweep_report(&s, &family, &ModelParams::default(), &thetas, &rat(1, 1_000_000)).unwrap();
    assert_eq!(rep.series.len(), 3);
    let mut ts = Vec::new();
    for series in &rep.series {
        let lim = series.limit().unwrap();
        assert!(lim.fit.distance.hi() <= &rat(1, 100));
        ts.push(lim.fit.t.clone());
    }
    // Later θ moves the limit toward the opposite endpoint.
    assert!(ts[0] < ts[1] && ts[1] < ts[2], "{ts:?}");
    for (_, _, d) in rep.pairwise().unwrap() {
        assert!(d >= rat(1, 100));
    }
}

#[test]
fn sampled_point_matches_simplex_point_at_its_fit() {
    let s = schedule();
    let family = default_family();
    let ends = simplex_ends(&s, &family).unwrap();
    let t = s.nominal_midtime(12) + rat(1, 4);
    let sample = sample_at(&t, &s, &family, &ModelParams::default()).unwrap();
    assert_eq!(active_index(&t, &s).unwrap(), 12);
    let fit = fareylab_core::limit_analysis::distance_to_ends(&sample.point, &ends, &rat(1, 1_000_000)).unwrap();
    let [l0, l1] = laminations_of(&s).unwrap();
    let p = simplex_point(&fit.t, &l0, &l1, &family, &rat(1, 1_000_000_000)).unwrap();
    assert!(proj_distance(&sample.point, &p.mid).unwrap() <= rat(1, 100));
}

#[test]
fn longer_schedule_keeps_endpoint_verdicts() {
    let s = GrowthSchedule::generate(ScheduleParams { kmax: 14, ..Default::default() }).unwrap();
    let family = default_family();
    for parity in 0..2u8 {
        let rep = endpoint_convergence_report(&s, &family, &ModelParams::default(), parity).unwrap();
        assert!(rep.strictly_decreasing_from(4));
    }
}
