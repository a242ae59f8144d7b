//! Acceptance gate: oracle equivalences, metric laws, the two-stage
//! contract, the frozen synthetic benchmark, and throughput bounds.
//!
//! Run with `--nocapture` to see one `[acceptance] ...: PASS` line per
//! criterion.

mod support;

use edgeprint::edges::{Kernel3, LAPLACIAN, LOG_3X3, SOBEL_X, SOBEL_Y};
use edgeprint::{
    city_block, class_distance, default_sweep_grids, evaluate, extract, format_sweep_table,
    generate_synthetic, identify, label8, load_pgm, save_pgm, sweep, EdgeOperator,
    ExtractionConfig, FeatureVector, Gallery, RegionGrid, SplitSpec, SynthSpec,
};
use rand::Rng;
use std::time::{Duration, Instant};
use support::*;

fn pass(name: &str) {
    println!("[acceptance] {name}: PASS");
}

fn within(budget: Duration, elapsed: Duration, what: &str) {
    assert!(
        elapsed <= budget,
        "{what} took {elapsed:?}, budget {budget:?}"
    );
}

#[test]
fn c1_convolution_matches_nested_loop_oracle() {
    let start = Instant::now();
    let mut rng = seeded(101);
    let kernels: [(&str, &Kernel3); 4] = [
        ("sobel_x", &SOBEL_X),
        ("sobel_y", &SOBEL_Y),
        ("laplacian", &LAPLACIAN),
        ("log", &LOG_3X3),
    ];
    for case in 0..1000 {
        let w = rng.gen_range(8..=32);
        let h = rng.gen_range(8..=32);
        let image = random_image(&mut rng, w, h);
        for (name, kernel) in kernels {
            let got = edgeprint::edges::convolve3(&image, kernel).unwrap();
            let want = correlate_oracle(&image, kernel);
            let got_int: Vec<i64> = got.values().iter().map(|&v| v as i64).collect();
            assert_eq!(got_int, want, "case {case} kernel {name}");
            // Responses are integer-valued floats; conversion is exact.
            assert!(got.values().iter().all(|v| v.fract() == 0.0));
        }
    }
    within(Duration::from_secs(10), start.elapsed(), "convolution oracle");
    pass("c1 convolution equals nested-loop correlation on 1000 images");
}

#[test]
fn c2_labeling_matches_flood_fill_oracle() {
    let start = Instant::now();
    let mut rng = seeded(202);
    let densities = [0.1, 0.3, 0.5, 0.7];
    for case in 0..1000 {
        let w = rng.gen_range(1..=64);
        let h = rng.gen_range(1..=64);
        let density = densities[case % densities.len()];
        let map = random_edge_map(&mut rng, w, h, density);
        let got = label8(&map);
        let want = flood_fill_oracle(&map);
        assert_eq!(got.component_count(), want.sizes.len(), "case {case}");
        // Both sides label scan-order-densely, so the whole partition and
        // the per-component sizes must agree exactly.
        assert_eq!(got.labels(), want.labels.as_slice(), "case {case}");
        assert_eq!(got.sizes(), want.sizes.as_slice(), "case {case}");
    }
    within(Duration::from_secs(10), start.elapsed(), "labeling oracle");
    pass("c2 label8 equals flood fill on 1000 maps at densities 0.1/0.3/0.5/0.7");
}

#[test]
fn c3_city_block_is_a_metric_at_all_arities() {
    let mut rng = seeded(303);
    let fp = ExtractionConfig::default().fingerprint();
    let vector = |rng: &mut rand_chacha::ChaCha8Rng, len: usize| {
        FeatureVector::new((0..len).map(|_| rng.gen_range(0..1000)).collect(), fp.clone())
    };
    for len in [4usize, 8, 16] {
        for _ in 0..10_000 {
            let a = vector(&mut rng, len);
            let b = vector(&mut rng, len);
            let c = vector(&mut rng, len);
            let dab = city_block(&a, &b).unwrap();
            let dba = city_block(&b, &a).unwrap();
            let dac = city_block(&a, &c).unwrap();
            let dcb = city_block(&c, &b).unwrap();
            assert_eq!(dab, dba);
            assert_eq!(city_block(&a, &a).unwrap(), 0);
            assert_eq!(dab == 0, a.values() == b.values());
            assert!(dab <= dac + dcb);
        }
    }
    pass("c3 metric laws hold on 10000 triples at lengths 4/8/16");
}

#[test]
fn c4_four_term_expansion_and_mean() {
    let mut rng = seeded(404);
    let fp = ExtractionConfig::default().fingerprint();
    for _ in 0..10_000 {
        let u: [u32; 4] = rng.gen::<[u8; 4]>().map(u32::from);
        let t: [u32; 4] = rng.gen::<[u8; 4]>().map(u32::from);
        let got = city_block(
            &FeatureVector::new(u.to_vec(), fp.clone()),
            &FeatureVector::new(t.to_vec(), fp.clone()),
        )
        .unwrap();
        assert_eq!(got, four_term_city_block(&u, &t));
    }
    // class_distance mean against the naive oracle.
    for _ in 0..1000 {
        let n = rng.gen_range(1..=8);
        let probe_values: Vec<u32> = (0..4).map(|_| rng.gen_range(0..500)).collect();
        let samples_raw: Vec<Vec<u32>> = (0..n)
            .map(|_| (0..4).map(|_| rng.gen_range(0..500)).collect())
            .collect();
        let probe = FeatureVector::new(probe_values.clone(), fp.clone());
        let samples: Vec<FeatureVector> = samples_raw
            .iter()
            .map(|v| FeatureVector::new(v.clone(), fp.clone()))
            .collect();
        let got = class_distance(&probe, "x", &samples).unwrap().mean_distance;
        let want = naive_mean_distance(&probe_values, &samples_raw);
        let tolerance = 1e-12 * want.max(1.0);
        assert!((got - want).abs() <= tolerance, "{got} vs {want}");
    }
    pass("c4 four-term expansion exact; class mean within 1e-12 relative");
}

#[test]
fn c5_two_stage_matches_brute_force_on_100_galleries() {
    let mut rng = seeded(505);
    let grid = RegionGrid::new(2, 2).unwrap();
    for case in 0..100 {
        let (gallery, raw) = random_gallery(&mut rng, 10, 6, grid);
        let probe_values: Vec<u32> = (0..4).map(|_| rng.gen_range(0..40)).collect();
        let probe = FeatureVector::new(probe_values.clone(), gallery.fingerprint().to_string());
        let report = identify(&probe, &gallery).unwrap();
        assert!(
            report.stage2_candidates.contains(&report.stage2_class),
            "case {case}: stage-2 pick outside the two leaders"
        );
        assert_eq!(report.stage2_candidates.len(), 2);
        let (want1, want2) = brute_force_two_stage(&probe_values, &raw);
        assert_eq!(report.stage1_class, want1, "case {case} stage 1");
        assert_eq!(report.stage2_class, want2, "case {case} stage 2");
    }
    pass("c5 two-stage decision equals brute force on 100 galleries (M=10, N=6)");
}

#[test]
fn c6_frozen_benchmark_rates() {
    let start = Instant::now();
    let spec = SynthSpec::benchmark();
    let corpus = generate_synthetic(&spec).unwrap();
    assert_eq!(corpus.class_count(), 10);
    assert_eq!(corpus.total_samples(), 120);
    let split = SplitSpec {
        n_train: 6,
        n_test: 6,
        seed: 1,
    };
    let result = evaluate(&corpus, &split, &ExtractionConfig::default()).unwrap();
    assert!(
        result.r_stage1 >= 0.90,
        "r_stage1 = {} below 0.90",
        result.r_stage1
    );
    assert!(
        result.r_stage2 >= result.r_stage1,
        "r_stage2 = {} below r_stage1 = {}",
        result.r_stage2,
        result.r_stage1
    );
    within(Duration::from_secs(60), start.elapsed(), "benchmark evaluation");
    pass("c6 frozen benchmark: r_stage1 >= 0.90 and r_stage2 >= r_stage1");
}

#[test]
fn c7_sweep_emits_nine_stable_cells() {
    let spec = SynthSpec::benchmark();
    let corpus = generate_synthetic(&spec).unwrap();
    let split = SplitSpec {
        n_train: 6,
        n_test: 6,
        seed: 1,
    };
    let base = ExtractionConfig::default();
    let run = || {
        let cells = sweep(
            &corpus,
            &split,
            &base,
            &default_sweep_grids(),
            &EdgeOperator::ALL,
        )
        .unwrap();
        format_sweep_table(&cells)
    };
    let first = run();
    let cells = sweep(
        &corpus,
        &split,
        &base,
        &default_sweep_grids(),
        &EdgeOperator::ALL,
    )
    .unwrap();
    assert_eq!(cells.len(), 9);
    for cell in &cells {
        assert!((0.0..=1.0).contains(&cell.r_stage1), "{:?}", cell.config);
        assert!((0.0..=1.0).contains(&cell.r_stage2), "{:?}", cell.config);
    }
    // Regenerating the corpus must not change a byte of the report either.
    let again = generate_synthetic(&spec).unwrap();
    let second = format_sweep_table(
        &sweep(
            &again,
            &split,
            &base,
            &default_sweep_grids(),
            &EdgeOperator::ALL,
        )
        .unwrap(),
    );
    assert_eq!(first, run());
    assert_eq!(first, second);
    pass("c7 sweep emits 9 cells in [0,1], byte-identical across reruns");
}

#[test]
fn c8_format_round_trips() {
    let mut rng = seeded(808);
    for _ in 0..100 {
        let w = rng.gen_range(1..=48);
        let h = rng.gen_range(1..=48);
        let image = random_image(&mut rng, w, h);
        let loaded = load_pgm(&save_pgm(&image)).unwrap();
        assert_eq!(image, loaded);
    }
    let grids = [
        RegionGrid::new(2, 2).unwrap(),
        RegionGrid::new(2, 4).unwrap(),
        RegionGrid::new(4, 4).unwrap(),
    ];
    for case in 0..20 {
        let grid = grids[case % grids.len()];
        let classes = rng.gen_range(1..=6);
        let samples = rng.gen_range(1..=5);
        let (gallery, _) = random_gallery(&mut rng, classes, samples, grid);
        let bytes = gallery.to_bytes().unwrap();
        let reloaded = Gallery::from_bytes(&bytes).unwrap();
        assert_eq!(bytes, reloaded.to_bytes().unwrap(), "case {case}");
        assert_eq!(gallery.classes(), reloaded.classes(), "case {case}");
    }
    pass("c8 PGM round-trip x100; gallery save/load/save byte-identity x20");
}

#[test]
fn c9_single_extraction_under_50ms() {
    let spec = SynthSpec::benchmark();
    let image = edgeprint::synth::generate_sample(&spec, 0, 0).unwrap();
    assert_eq!((image.width(), image.height()), (384, 284));
    let config = ExtractionConfig::default();
    // Warm up once so the measurement excludes first-touch page faults.
    let _ = extract(&image, &config).unwrap();
    let start = Instant::now();
    let vector = extract(&image, &config).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(vector.len(), 4);
    within(Duration::from_millis(50), elapsed, "single extraction");
    pass("c9 one 384x284 Sobel 2x2 extraction under 50 ms");
}
