//! Browser bindings for the demo page: generate a synthetic palm sample,
//! view its per-region edge components, and identify it against a gallery
//! built from the remaining samples.
//!
//! The demo corpus is a fixed six-class layout; jitter, noise, and seed stay
//! adjustable so the page can show how they move the feature vectors. All
//! functions are stateless and re-derive images from the parameters, which
//! keeps the interface at plain numbers and strings.
//!
//! Logic lives in [`demo`] with string errors so it runs and tests on any
//! target; the `#[wasm_bindgen]` exports only translate errors to JS.

use wasm_bindgen::prelude::*;

pub mod demo {
    use edgeprint::components::{filter_small, label8};
    use edgeprint::synth::{class_id, generate_sample};
    use edgeprint::{
        detect_edges, extract, identify, partition, ExtractionConfig, Gallery, GrayImage,
        MatchReport, RegionGrid, SynthSpec,
    };
    use serde::Serialize;

    pub const WIDTH: usize = 256;
    pub const HEIGHT: usize = 192;
    pub const CLASSES: usize = 6;
    pub const SAMPLES: usize = 8;

    pub fn spec(jitter: f64, noise: u8, seed: u64) -> SynthSpec {
        SynthSpec {
            class_count: CLASSES,
            samples_per_class: SAMPLES,
            width: WIDTH,
            height: HEIGHT,
            lines_min: 2,
            lines_max: 7,
            thickness: 3.0,
            jitter,
            noise,
            seed,
        }
    }

    fn image(
        class_index: usize,
        sample_index: usize,
        jitter: f64,
        noise: u8,
        seed: u64,
    ) -> Result<GrayImage, String> {
        generate_sample(&spec(jitter, noise, seed), class_index, sample_index)
            .map_err(|e| e.to_string())
    }

    fn config(
        operator: &str,
        grid: &str,
        threshold_k: f64,
        min_component: usize,
    ) -> Result<ExtractionConfig, String> {
        let config = ExtractionConfig {
            operator: operator.parse()?,
            threshold: None,
            threshold_k,
            min_component,
            grid: grid.parse::<RegionGrid>()?,
        };
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }

    pub fn sample_pixels(
        class_index: usize,
        sample_index: usize,
        jitter: f64,
        noise: u8,
        seed: u64,
    ) -> Result<Vec<u8>, String> {
        Ok(image(class_index, sample_index, jitter, noise, seed)?
            .pixels()
            .to_vec())
    }

    /// Mask of the edge components that survive filtering, detected per
    /// region exactly as extraction does: 1 where a counted component
    /// covers the pixel, 0 elsewhere.
    #[allow(clippy::too_many_arguments)]
    pub fn edge_mask(
        class_index: usize,
        sample_index: usize,
        jitter: f64,
        noise: u8,
        seed: u64,
        operator: &str,
        grid: &str,
        threshold_k: f64,
        min_component: usize,
    ) -> Result<Vec<u8>, String> {
        let image = image(class_index, sample_index, jitter, noise, seed)?;
        let config = config(operator, grid, threshold_k, min_component)?;
        let regions = partition(&image, config.grid).map_err(|e| e.to_string())?;
        let mut mask = vec![0u8; image.width() * image.height()];
        for view in &regions {
            let crop = image.crop(view);
            let edges =
                detect_edges(&crop, config.operator, config.threshold, config.threshold_k)
                    .map_err(|e| e.to_string())?;
            let kept = filter_small(&label8(&edges), config.min_component);
            for y in 0..kept.height() {
                for x in 0..kept.width() {
                    if kept.get(x, y) {
                        mask[(view.row + y) * image.width() + (view.col + x)] = 1;
                    }
                }
            }
        }
        Ok(mask)
    }

    #[derive(Serialize)]
    struct FeatureSummary {
        values: Vec<u32>,
        fingerprint: String,
        grid_rows: usize,
        grid_cols: usize,
    }

    #[allow(clippy::too_many_arguments)]
    pub fn features_json(
        class_index: usize,
        sample_index: usize,
        jitter: f64,
        noise: u8,
        seed: u64,
        operator: &str,
        grid: &str,
        threshold_k: f64,
        min_component: usize,
    ) -> Result<String, String> {
        let image = image(class_index, sample_index, jitter, noise, seed)?;
        let config = config(operator, grid, threshold_k, min_component)?;
        let vector = extract(&image, &config).map_err(|e| e.to_string())?;
        let summary = FeatureSummary {
            values: vector.values().to_vec(),
            fingerprint: vector.fingerprint().to_string(),
            grid_rows: config.grid.rows(),
            grid_cols: config.grid.cols(),
        };
        Ok(serde_json::to_string(&summary).expect("summary serializes"))
    }

    #[derive(Serialize)]
    struct IdentifyOutcome {
        truth: String,
        report: MatchReport,
    }

    /// Identifies one sample against a gallery of every other demo sample.
    /// Returns `{truth, report}` as JSON.
    #[allow(clippy::too_many_arguments)]
    pub fn identify_json(
        class_index: usize,
        sample_index: usize,
        jitter: f64,
        noise: u8,
        seed: u64,
        operator: &str,
        grid: &str,
        threshold_k: f64,
        min_component: usize,
    ) -> Result<String, String> {
        let spec = spec(jitter, noise, seed);
        let config = config(operator, grid, threshold_k, min_component)?;
        if class_index >= spec.class_count || sample_index >= spec.samples_per_class {
            return Err(format!(
                "probe {class_index}/{sample_index} outside the demo corpus"
            ));
        }
        let mut gallery = Gallery::new(config.clone()).map_err(|e| e.to_string())?;
        for c in 0..spec.class_count {
            let id = class_id(spec.class_count, c);
            for s in 0..spec.samples_per_class {
                if c == class_index && s == sample_index {
                    continue;
                }
                let image = generate_sample(&spec, c, s).map_err(|e| e.to_string())?;
                gallery.enroll(&id, &image).map_err(|e| e.to_string())?;
            }
        }
        let probe_image = image(class_index, sample_index, jitter, noise, seed)?;
        let probe = extract(&probe_image, &config).map_err(|e| e.to_string())?;
        let report = identify(&probe, &gallery).map_err(|e| e.to_string())?;
        let outcome = IdentifyOutcome {
            truth: class_id(spec.class_count, class_index),
            report,
        };
        Ok(serde_json::to_string(&outcome).expect("outcome serializes"))
    }
}

#[wasm_bindgen]
pub fn demo_width() -> usize {
    demo::WIDTH
}

#[wasm_bindgen]
pub fn demo_height() -> usize {
    demo::HEIGHT
}

#[wasm_bindgen]
pub fn demo_class_count() -> usize {
    demo::CLASSES
}

#[wasm_bindgen]
pub fn demo_sample_count() -> usize {
    demo::SAMPLES
}

/// Grayscale pixels of one demo sample, row-major, `demo_width()` x
/// `demo_height()`.
#[wasm_bindgen]
pub fn sample_pixels(
    class_index: usize,
    sample_index: usize,
    jitter: f64,
    noise: u8,
    seed: u64,
) -> Result<Vec<u8>, JsError> {
    demo::sample_pixels(class_index, sample_index, jitter, noise, seed)
        .map_err(|e| JsError::new(&e))
}

/// Mask of counted edge components; see [`demo::edge_mask`].
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn edge_mask(
    class_index: usize,
    sample_index: usize,
    jitter: f64,
    noise: u8,
    seed: u64,
    operator: &str,
    grid: &str,
    threshold_k: f64,
    min_component: usize,
) -> Result<Vec<u8>, JsError> {
    demo::edge_mask(
        class_index,
        sample_index,
        jitter,
        noise,
        seed,
        operator,
        grid,
        threshold_k,
        min_component,
    )
    .map_err(|e| JsError::new(&e))
}

/// Feature vector of one sample as JSON:
/// `{values, fingerprint, grid_rows, grid_cols}`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn features_json(
    class_index: usize,
    sample_index: usize,
    jitter: f64,
    noise: u8,
    seed: u64,
    operator: &str,
    grid: &str,
    threshold_k: f64,
    min_component: usize,
) -> Result<String, JsError> {
    demo::features_json(
        class_index,
        sample_index,
        jitter,
        noise,
        seed,
        operator,
        grid,
        threshold_k,
        min_component,
    )
    .map_err(|e| JsError::new(&e))
}

/// Identifies one sample against the rest of the demo corpus; see
/// [`demo::identify_json`].
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn identify_json(
    class_index: usize,
    sample_index: usize,
    jitter: f64,
    noise: u8,
    seed: u64,
    operator: &str,
    grid: &str,
    threshold_k: f64,
    min_component: usize,
) -> Result<String, JsError> {
    demo::identify_json(
        class_index,
        sample_index,
        jitter,
        noise,
        seed,
        operator,
        grid,
        threshold_k,
        min_component,
    )
    .map_err(|e| JsError::new(&e))
}
