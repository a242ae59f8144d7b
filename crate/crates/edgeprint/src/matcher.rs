//! City-block matching and two-stage identification.
//!
//! The distance between two feature vectors is the city-block (L1) sum of
//! per-region differences, an exact integer. A probe is scored against every
//! class by averaging its distances to the class's enrolled samples
//! (arithmetic mean, recorded in reports as the `sum/N` rule). Stage 1 picks
//! the class with the smallest mean; stage 2 re-decides between the two
//! leading classes by the single closest enrolled sample, which recovers
//! matches where one impostor-heavy outlier drags an otherwise-close class
//! down the ranking.
//!
//! All orderings are total and deterministic: ties in mean distance break
//! lexicographically by class id, and ties in best-sample distance keep the
//! earlier-ranked class.

use crate::features::{FeatureVector, Gallery};
use serde::Serialize;
use thiserror::Error;

/// Class-average rule used by [`class_distance`]; recorded in match reports.
pub const AVERAGING_RULE: &str = "sum/N";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchError {
    #[error("feature vectors are incomparable: fingerprint {left:?} vs {right:?}")]
    Incomparable { left: String, right: String },
    #[error("feature vectors have different lengths: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("class {0:?} has no samples")]
    EmptyClass(String),
    #[error("gallery has no classes")]
    EmptyGallery,
}

/// One class's distances to a probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassDistance {
    pub class_id: String,
    /// Arithmetic mean of the per-sample distances.
    pub mean_distance: f64,
    /// `(sample_index, distance)` per enrolled sample, in index order.
    pub per_sample: Vec<(usize, u64)>,
}

/// Outcome of [`identify`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchReport {
    /// Class-average convention behind `mean_distance`.
    pub averaging: &'static str,
    /// Every gallery class, best first.
    pub ranked: Vec<ClassDistance>,
    /// Stage 1 decision: class with the smallest mean distance.
    pub stage1_class: String,
    /// The classes stage 2 chose between (the top two, or one if the
    /// gallery has a single class).
    pub stage2_candidates: Vec<String>,
    /// Stage 2 decision: candidate class holding the single closest sample.
    pub stage2_class: String,
}

/// City-block distance `sum_i |u_i - t_i|`, exact in integers.
pub fn city_block(u: &FeatureVector, t: &FeatureVector) -> Result<u64, MatchError> {
    if u.fingerprint() != t.fingerprint() {
        return Err(MatchError::Incomparable {
            left: u.fingerprint().to_string(),
            right: t.fingerprint().to_string(),
        });
    }
    if u.len() != t.len() {
        return Err(MatchError::LengthMismatch {
            left: u.len(),
            right: t.len(),
        });
    }
    Ok(u.values()
        .iter()
        .zip(t.values())
        .map(|(&a, &b)| u64::from(a.abs_diff(b)))
        .sum())
}

/// Distances from `probe` to every sample of one class, plus their mean.
pub fn class_distance(
    probe: &FeatureVector,
    class_id: &str,
    samples: &[FeatureVector],
) -> Result<ClassDistance, MatchError> {
    if samples.is_empty() {
        return Err(MatchError::EmptyClass(class_id.to_string()));
    }
    let mut per_sample = Vec::with_capacity(samples.len());
    let mut total: u64 = 0;
    for (index, sample) in samples.iter().enumerate() {
        let d = city_block(probe, sample)?;
        total += d;
        per_sample.push((index, d));
    }
    Ok(ClassDistance {
        class_id: class_id.to_string(),
        mean_distance: total as f64 / samples.len() as f64,
        per_sample,
    })
}

/// Scores every gallery class against `probe`, sorted by mean distance with
/// lexicographic class id as the tie-break.
pub fn rank_classes(probe: &FeatureVector, gallery: &Gallery) -> Result<Vec<ClassDistance>, MatchError> {
    if gallery.classes().is_empty() {
        return Err(MatchError::EmptyGallery);
    }
    if probe.fingerprint() != gallery.fingerprint() {
        return Err(MatchError::Incomparable {
            left: probe.fingerprint().to_string(),
            right: gallery.fingerprint().to_string(),
        });
    }
    let mut ranked = Vec::with_capacity(gallery.class_count());
    for (class_id, samples) in gallery.classes() {
        ranked.push(class_distance(probe, class_id, samples)?);
    }
    ranked.sort_by(|a, b| {
        a.mean_distance
            .total_cmp(&b.mean_distance)
            .then_with(|| a.class_id.cmp(&b.class_id))
    });
    Ok(ranked)
}

/// Two-stage identification: rank classes by mean distance, then between the
/// two leading classes pick the one holding the single closest sample. Ties
/// on the closest sample keep the earlier-ranked class.
pub fn identify(probe: &FeatureVector, gallery: &Gallery) -> Result<MatchReport, MatchError> {
    let ranked = rank_classes(probe, gallery)?;
    let stage1_class = ranked[0].class_id.clone();
    let candidates = &ranked[..ranked.len().min(2)];
    let stage2_candidates: Vec<String> = candidates.iter().map(|c| c.class_id.clone()).collect();

    let mut best_class = &candidates[0].class_id;
    let mut best_distance = u64::MAX;
    for candidate in candidates {
        for &(_, d) in &candidate.per_sample {
            // Strictly smaller, so the earlier-ranked class keeps ties.
            if d < best_distance {
                best_distance = d;
                best_class = &candidate.class_id;
            }
        }
    }
    let stage2_class = best_class.clone();

    Ok(MatchReport {
        averaging: AVERAGING_RULE,
        ranked,
        stage1_class,
        stage2_candidates,
        stage2_class,
    })
}
