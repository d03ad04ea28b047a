//! Simulation-backed integration checks of the individual pipeline stages:
//! growing quality on clean data, the subset-homogeneity ordering of the
//! incongruence index on two-cluster data, baseline behavior on clean and
//! heavily contaminated samples, and the baseline's known failure mode on
//! the slump case study.

mod common;

use fastrcs::lts::{fastlts, LtsConfig};
use fastrcs::metrics::{bias, percentile_lower};
use fastrcs::rcs::{fastrcs, grow_subset, i_index, subset_size_h, RcsConfig};
use fastrcs::rng::Rng;
use fastrcs::simgen::{generate, Contamination, ContaminationConfig};
use fastrcs::{Dataset, OlsFit};

fn clean_gaussian(n: usize, cols: usize, seed: u64) -> Dataset {
    let sample = generate(&ContaminationConfig {
        p: cols + 1,
        n: Some(n),
        epsilon: 0.0,
        configuration: Contamination::Shift,
        d_x: 2.0,
        nu: 0.0,
        alpha: 0.5,
        seed,
    });
    sample.data
}

fn ols_on_subset(data: &Dataset, subset: &[usize]) -> OlsFit {
    let mut mask = vec![false; data.n()];
    for &i in subset {
        mask[i] = true;
    }
    fastrcs::numkit::ols_fit(data.predictors(), data.response(), Some(&mask)).unwrap()
}

#[test]
fn grown_subsets_track_the_truth_on_clean_data() {
    // a single grown candidate (no I-index selection over many starts), so
    // the sample must be large enough to damp per-start selection noise
    let n = 400;
    let mut ok = 0;
    for seed in 0..100u64 {
        let data = clean_gaussian(n, 1, 7000 + seed);
        let h = subset_size_h(n, 2, 0.5);
        let mut rng = Rng::seed_from_u64(seed);
        let start = rng.sample_distinct(3, n);
        let grown = grow_subset(&start, &data, h, 25, 3, &mut rng, 1e-12).unwrap();
        assert!(!grown.exact_fit);
        assert_eq!(grown.indices.len(), h);
        let fit = ols_on_subset(&data, &grown.indices);
        if bias(&fit.theta) <= 1.0 {
            ok += 1;
        }
    }
    assert!(ok >= 95, "only {ok}/100 grown subsets gave bias <= 1");
}

#[test]
fn i_index_prefers_homogeneous_subsets() {
    // two clusters, 70/30: a subset inside the main cluster must score
    // below one mixing both clusters, for essentially every seed
    let mut ok = 0;
    let trials = 200;
    for seed in 0..trials {
        let sample = generate(&ContaminationConfig {
            p: 2,
            n: Some(100),
            epsilon: 0.3,
            configuration: Contamination::PointMass,
            d_x: 8.0,
            nu: 4.0,
            alpha: 0.5,
            seed: 40_000 + seed,
        });
        let h = subset_size_h(100, 2, 0.5);
        let homogeneous: Vec<usize> = (0..h).collect();
        let mixed: Vec<usize> = (0..h - 30).chain(70..100).collect();
        let mut rng = Rng::seed_from_u64(seed);
        let i_hom = i_index(&homogeneous, &sample.data, 25, &mut rng, 1e-12).unwrap();
        let i_mix = i_index(&mixed, &sample.data, 25, &mut rng, 1e-12).unwrap();
        if i_hom < i_mix {
            ok += 1;
        }
    }
    assert!(ok >= 198, "homogeneous subset won only {ok}/{trials} times");
}

#[test]
fn both_estimators_are_nearly_unbiased_on_clean_data() {
    let mut rcs_ok = 0;
    let mut lts_ok = 0;
    for seed in 0..100u64 {
        let data = clean_gaussian(100, 3, 52_000 + seed);
        let rcs = fastrcs(
            &data,
            &RcsConfig {
                seed: seed + 1,
                ..RcsConfig::default()
            },
        )
        .unwrap();
        let lts = fastlts(
            &data,
            &LtsConfig {
                seed: seed + 1,
                ..LtsConfig::default()
            },
        )
        .unwrap();
        if bias(&rcs.refined.theta) <= 1.0 {
            rcs_ok += 1;
        }
        if bias(&lts.refined.theta) <= 1.0 {
            lts_ok += 1;
        }
    }
    assert!(rcs_ok >= 95, "rcs clean-data bias exceeded 1 too often: {rcs_ok}/100");
    assert!(lts_ok >= 95, "lts clean-data bias exceeded 1 too often: {lts_ok}/100");
}

#[test]
fn trimmed_squares_breaks_on_concentrated_leverage_points() {
    // p = 8 point-mass contamination at d_x = 8: concentrated far-out
    // leverage clusters capture the concentration steps, so the selected
    // h-subsets stay heavily contaminated at mid nu
    let reps = 21;
    let mut rates = Vec::with_capacity(reps as usize);
    for rep in 0..reps {
        let sample = generate(&ContaminationConfig {
            p: 8,
            n: None,
            epsilon: 0.3,
            configuration: Contamination::PointMass,
            d_x: 8.0,
            nu: 5.0,
            alpha: 0.5,
            seed: 60_000 + rep,
        });
        let res = fastlts(
            &sample.data,
            &LtsConfig {
                seed: rep + 1,
                ..LtsConfig::default()
            },
        )
        .unwrap();
        rates.push(fastrcs::metrics::mis_rate(
            &sample.outlier_indices,
            &res.report.h_plus,
        ));
    }
    let median = percentile_lower(&rates, 0.5);
    assert!(
        median >= 0.5,
        "expected a heavily contaminated baseline subset, median mis-rate {median}"
    );
}

#[test]
fn baseline_mixes_the_slump_batches() {
    // the slump case study: the trimmed-squares h-subset blends rows from
    // both measurement campaigns instead of isolating the first one
    let data = common::load_slump();
    let cfg = LtsConfig {
        num_starts: Some(500),
        seed: 1,
        ..LtsConfig::default()
    };
    let res = fastlts(&data, &cfg).unwrap();
    let old_members = res.report.h_plus.iter().filter(|&&i| i < 35).count();
    let new_members = res.report.h_plus.len() - old_members;
    assert!(
        old_members > 0 && new_members > 0,
        "expected a mixed subset, got {old_members} old / {new_members} new"
    );
}
