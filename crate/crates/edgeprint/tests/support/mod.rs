//! Independent oracles and generators for the acceptance suite.
//!
//! Everything here is deliberately naive: nested loops, breadth-first flood
//! fill, exhaustive candidate scans. None of it shares code with the crate
//! beyond public data types, so agreement is evidence rather than tautology.

use edgeprint::edges::Kernel3;
use edgeprint::{EdgeMap, FeatureVector, Gallery, GrayImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

/// Direct correlation with replicate padding, no shared helpers.
pub fn correlate_oracle(image: &GrayImage, kernel: &Kernel3) -> Vec<i64> {
    let (w, h) = (image.width() as i64, image.height() as i64);
    let mut out = Vec::with_capacity((w * h) as usize);
    for y in 0..h {
        for x in 0..w {
            let mut acc: i64 = 0;
            for ky in -1..=1i64 {
                for kx in -1..=1i64 {
                    let sx = (x + kx).max(0).min(w - 1) as usize;
                    let sy = (y + ky).max(0).min(h - 1) as usize;
                    let weight = kernel.weights[(ky + 1) as usize][(kx + 1) as usize];
                    acc += i64::from(weight) * i64::from(image.get(sx, sy));
                }
            }
            out.push(acc);
        }
    }
    out
}

/// Flood-fill labeling oracle: 8-connected components in scan order.
/// Returns per-pixel component labels (dense, first appearance) and sizes.
pub struct FloodFill {
    pub labels: Vec<u32>,
    pub sizes: Vec<usize>,
}

pub fn flood_fill_oracle(map: &EdgeMap) -> FloodFill {
    let (w, h) = (map.width(), map.height());
    let mut labels = vec![0u32; w * h];
    let mut sizes = Vec::new();
    let mut next = 1u32;
    for start_y in 0..h {
        for start_x in 0..w {
            if !map.get(start_x, start_y) || labels[start_y * w + start_x] != 0 {
                continue;
            }
            let mut size = 0usize;
            let mut queue = VecDeque::new();
            labels[start_y * w + start_x] = next;
            queue.push_back((start_x, start_y));
            while let Some((x, y)) = queue.pop_front() {
                size += 1;
                for dy in -1..=1i64 {
                    for dx in -1..=1i64 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if map.get(nx, ny) && labels[ny * w + nx] == 0 {
                            labels[ny * w + nx] = next;
                            queue.push_back((nx, ny));
                        }
                    }
                }
            }
            sizes.push(size);
            next += 1;
        }
    }
    FloodFill { labels, sizes }
}

/// Spelled-out four-term city block distance for length-4 vectors.
pub fn four_term_city_block(u: &[u32; 4], t: &[u32; 4]) -> u64 {
    let term = |a: u32, b: u32| u64::from(a.max(b) - a.min(b));
    term(u[0], t[0]) + term(u[1], t[1]) + term(u[2], t[2]) + term(u[3], t[3])
}

/// Naive mean distance from a probe to a class: sum the sample distances,
/// divide by the sample count.
pub fn naive_mean_distance(probe: &[u32], samples: &[Vec<u32>]) -> f64 {
    let mut total: u64 = 0;
    for s in samples {
        assert_eq!(probe.len(), s.len());
        total += probe
            .iter()
            .zip(s)
            .map(|(&a, &b)| u64::from(a.abs_diff(b)))
            .sum::<u64>();
    }
    total as f64 / samples.len() as f64
}

/// Independent two-stage decision over raw value vectors. Classes are given
/// in ranking-tie-break order (lexicographic by id); stage 1 picks the
/// smallest mean (first on ties), stage 2 re-decides between the top two by
/// smallest single-sample distance (stage-1 order kept on ties).
pub fn brute_force_two_stage(probe: &[u32], classes: &[(String, Vec<Vec<u32>>)]) -> (String, String) {
    assert!(!classes.is_empty());
    let mut ranked: Vec<(String, f64, u64)> = classes
        .iter()
        .map(|(id, samples)| {
            let mean = naive_mean_distance(probe, samples);
            let best = samples
                .iter()
                .map(|s| {
                    probe
                        .iter()
                        .zip(s)
                        .map(|(&a, &b)| u64::from(a.abs_diff(b)))
                        .sum::<u64>()
                })
                .min()
                .unwrap();
            (id.clone(), mean, best)
        })
        .collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let stage1 = ranked[0].0.clone();
    let stage2 = if ranked.len() > 1 && ranked[1].2 < ranked[0].2 {
        ranked[1].0.clone()
    } else {
        stage1.clone()
    };
    (stage1, stage2)
}

pub fn random_image(rng: &mut impl Rng, width: usize, height: usize) -> GrayImage {
    let pixels = (0..width * height).map(|_| rng.gen()).collect();
    GrayImage::new(width, height, pixels).unwrap()
}

pub fn random_edge_map(rng: &mut impl Rng, width: usize, height: usize, density: f64) -> EdgeMap {
    EdgeMap::from_fn(width, height, |_, _| rng.gen_bool(density))
}

/// Per-class raw feature values, in the id order ranking uses.
pub type RawClasses = Vec<(String, Vec<Vec<u32>>)>;

/// Random gallery of `classes` classes x `samples` vectors, one count per
/// grid region, together with the raw values for oracle-side computation.
pub fn random_gallery(
    rng: &mut impl Rng,
    classes: usize,
    samples: usize,
    grid: edgeprint::RegionGrid,
) -> (Gallery, RawClasses) {
    let len = grid.region_count();
    let config = edgeprint::ExtractionConfig {
        grid,
        ..edgeprint::ExtractionConfig::default()
    };
    let fingerprint = config.fingerprint();
    let mut gallery = Gallery::new(config).unwrap();
    let mut raw = Vec::with_capacity(classes);
    for c in 0..classes {
        let id = format!("s{c:03}");
        let mut class_samples = Vec::with_capacity(samples);
        for _ in 0..samples {
            let values: Vec<u32> = (0..len).map(|_| rng.gen_range(0..40)).collect();
            gallery
                .push_sample(&id, FeatureVector::new(values.clone(), fingerprint.clone()))
                .unwrap();
            class_samples.push(values);
        }
        raw.push((id, class_samples));
    }
    (gallery, raw)
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
