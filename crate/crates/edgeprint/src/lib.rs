//! Texture-based palmprint identification.
//!
//! The pipeline turns a grayscale palm image into a short feature vector by
//! counting connected edge structures ("edginess") inside each cell of a
//! region grid, then identifies an unknown palm against a gallery of labeled
//! vectors using city-block distance: classes are ranked by their mean
//! distance to the probe, and a second stage re-decides between the two
//! leading classes by the single closest training sample.
//!
//! Modules follow the pipeline order:
//!
//! 1. [`imaging`]: grayscale images, PGM I/O, region partitioning
//! 2. [`edges`]: 3x3 edge operators and thresholding into binary edge maps
//! 3. [`components`]: 8-connectivity labeling and small-component filtering
//! 4. [`features`]: per-region edginess vectors and the gallery store
//! 5. [`matcher`]: city-block ranking and two-stage identification
//! 6. [`eval`]: seeded train/test splits, identification rates, sweeps
//! 7. [`synth`]: deterministic synthetic palm-like corpus generator

pub mod components;
pub mod edges;
pub mod eval;
pub mod features;
pub mod imaging;
pub mod matcher;
pub mod synth;

pub use components::{edginess, label8, LabeledMap};
pub use edges::{detect_edges, EdgeMap, EdgeOperator, ResponseMap};
pub use eval::{
    default_sweep_grids, evaluate, format_eval_report, format_sweep_table, sweep, Corpus,
    EvalResult, SplitSpec,
};
pub use features::{extract, ExtractionConfig, FeatureVector, Gallery};
pub use imaging::{load_pgm, partition, save_pgm, GrayImage, RegionGrid, RegionView};
pub use matcher::{city_block, class_distance, identify, rank_classes, ClassDistance, MatchReport};
pub use synth::{generate_synthetic, SynthSpec};
