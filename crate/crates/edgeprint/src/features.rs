//! Per-region edginess feature vectors and the gallery store.
//!
//! A feature vector is one edginess count per region, ordered by region
//! index. Detection runs independently per region: each region is cropped
//! and gets its own operator pass and automatic threshold, so bright texture
//! in one region cannot mask faint texture in another.
//!
//! Every vector carries the fingerprint of the [`ExtractionConfig`] that
//! produced it; vectors with different fingerprints never compare. A
//! [`Gallery`] maps class ids to enrolled vectors, all sharing one config.
//!
//! Galleries serialize to a line-oriented UTF-8 format:
//!
//! ```text
//! edgeprint-gallery v1
//! config operator=sobel threshold=auto threshold_k=4 min_component=5 grid=2x2
//! <class_id>,<sample_index>,<v0>,<v1>,...
//! ```
//!
//! Sample rows are sorted by class id, then by sample index; sample indices
//! are contiguous from 0 within each class; line endings are LF. The format
//! is canonical: galleries with the same content always produce the same
//! bytes, and load/save round-trips are byte-identical.

use crate::components::edginess;
use crate::edges::{detect_edges, EdgeOperator, DEFAULT_THRESHOLD_K};
use crate::imaging::{partition, GrayImage, ImageError, RegionGrid};
use std::collections::BTreeMap;
use thiserror::Error;

pub const GALLERY_HEADER: &str = "edgeprint-gallery v1";

/// Default minimum surviving component size.
pub const DEFAULT_MIN_COMPONENT: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("invalid extraction config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("region {index} is {width}x{height}; 3x3 operators need at least 3x3 per region")]
    RegionTooSmall {
        index: usize,
        width: usize,
        height: usize,
    },
    #[error("invalid class id {0:?}: must be non-empty, comma-free, control-free, and trimmed")]
    InvalidClassId(String),
    #[error("feature fingerprint mismatch: vector has {found:?}, gallery expects {expected:?}")]
    FingerprintMismatch { expected: String, found: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GalleryError {
    #[error("gallery data is not valid UTF-8")]
    NotUtf8,
    #[error("line 1: expected header {GALLERY_HEADER:?}, found {found:?}")]
    VersionMismatch { found: String },
    #[error("line {line}: bad config line: {reason}")]
    BadConfig { line: usize, reason: String },
    #[error("line {line}: malformed sample row: {reason}")]
    BadRow { line: usize, reason: String },
    #[error("line {line}: row has {found} feature values, {grid} grid needs {expected}")]
    WrongArity {
        line: usize,
        grid: String,
        expected: usize,
        found: usize,
    },
    #[error("class {class:?}: sample indices must cover 0..{count} without gaps or duplicates")]
    BadSampleIndices { class: String, count: usize },
    #[error("gallery has no sample rows")]
    Empty,
}

/// Settings that define one feature space. Vectors are only comparable when
/// extracted under identical settings, compared via [`ExtractionConfig::fingerprint`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionConfig {
    pub operator: EdgeOperator,
    /// Explicit edge threshold; `None` selects `threshold_k * mean(|response|)`
    /// per region.
    pub threshold: Option<f64>,
    pub threshold_k: f64,
    /// Components smaller than this many pixels are dropped before counting.
    pub min_component: usize,
    pub grid: RegionGrid,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            operator: EdgeOperator::Sobel,
            threshold: None,
            threshold_k: DEFAULT_THRESHOLD_K,
            min_component: DEFAULT_MIN_COMPONENT,
            grid: RegionGrid::new(2, 2).expect("static grid"),
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<(), FeatureError> {
        if let Some(t) = self.threshold {
            if !t.is_finite() || t < 0.0 {
                return Err(FeatureError::InvalidConfig(format!(
                    "threshold must be finite and non-negative, got {t}"
                )));
            }
        }
        if !self.threshold_k.is_finite() || self.threshold_k <= 0.0 {
            return Err(FeatureError::InvalidConfig(format!(
                "threshold_k must be finite and positive, got {}",
                self.threshold_k
            )));
        }
        if self.min_component < 1 {
            return Err(FeatureError::InvalidConfig(
                "min_component must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Canonical one-line encoding of the settings; doubles as the
    /// compatibility fingerprint carried by every vector.
    pub fn fingerprint(&self) -> String {
        let threshold = match self.threshold {
            Some(t) => fmt_f64(t),
            None => "auto".to_string(),
        };
        format!(
            "operator={} threshold={} threshold_k={} min_component={} grid={}",
            self.operator,
            threshold,
            fmt_f64(self.threshold_k),
            self.min_component,
            self.grid
        )
    }

    /// Parses the [`fingerprint`](Self::fingerprint) encoding.
    pub fn parse_fingerprint(s: &str) -> Result<Self, String> {
        let mut fields = s.split(' ');
        let operator = take_field(&mut fields, "operator")?
            .parse::<EdgeOperator>()?;
        let threshold = match take_field(&mut fields, "threshold")? {
            "auto" => None,
            raw => Some(parse_f64(raw, "threshold")?),
        };
        let threshold_k = parse_f64(take_field(&mut fields, "threshold_k")?, "threshold_k")?;
        let min_component = take_field(&mut fields, "min_component")?
            .parse::<usize>()
            .map_err(|_| "min_component must be an unsigned integer".to_string())?;
        let grid = take_field(&mut fields, "grid")?.parse::<RegionGrid>()?;
        if fields.next().is_some() {
            return Err("unexpected trailing fields".into());
        }
        let config = ExtractionConfig {
            operator,
            threshold,
            threshold_k,
            min_component,
            grid,
        };
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}

/// Shortest decimal form that round-trips through `f64` parsing.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn parse_f64(raw: &str, name: &str) -> Result<f64, String> {
    let v: f64 = raw
        .parse()
        .map_err(|_| format!("{name} must be a number, got {raw:?}"))?;
    if !v.is_finite() {
        return Err(format!("{name} must be finite, got {raw:?}"));
    }
    Ok(v)
}

fn take_field<'a>(
    fields: &mut std::str::Split<'a, char>,
    key: &str,
) -> Result<&'a str, String> {
    let field = fields.next().ok_or_else(|| format!("missing {key}="))?;
    field
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| format!("expected {key}=..., got {field:?}"))
}

/// Edginess counts per region, in region-index order, tagged with the
/// fingerprint of the settings that produced them.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct FeatureVector {
    values: Vec<u32>,
    fingerprint: String,
}

impl FeatureVector {
    pub fn new(values: Vec<u32>, fingerprint: impl Into<String>) -> Self {
        FeatureVector {
            values,
            fingerprint: fingerprint.into(),
        }
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }
}

/// Computes the feature vector of `image` under `config`: partition into
/// regions, detect edges independently per region, count surviving
/// components.
pub fn extract(image: &GrayImage, config: &ExtractionConfig) -> Result<FeatureVector, FeatureError> {
    config.validate()?;
    let regions = partition(image, config.grid)?;
    let mut values = Vec::with_capacity(regions.len());
    for view in &regions {
        if view.width < 3 || view.height < 3 {
            return Err(FeatureError::RegionTooSmall {
                index: view.index,
                width: view.width,
                height: view.height,
            });
        }
        let sub = image.crop(view);
        let edges = detect_edges(&sub, config.operator, config.threshold, config.threshold_k)
            .expect("region dimensions were checked");
        values.push(edginess(&edges, config.min_component) as u32);
    }
    Ok(FeatureVector {
        values,
        fingerprint: config.fingerprint(),
    })
}

/// Enrolled feature vectors grouped by class id, all extracted under one
/// config.
#[derive(Debug, Clone, PartialEq)]
pub struct Gallery {
    config: ExtractionConfig,
    fingerprint: String,
    classes: BTreeMap<String, Vec<FeatureVector>>,
}

impl Gallery {
    pub fn new(config: ExtractionConfig) -> Result<Self, FeatureError> {
        config.validate()?;
        let fingerprint = config.fingerprint();
        Ok(Gallery {
            config,
            fingerprint,
            classes: BTreeMap::new(),
        })
    }

    pub fn config(&self) -> &ExtractionConfig {
        &self.config
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Classes in lexicographic order with their samples in index order.
    pub fn classes(&self) -> &BTreeMap<String, Vec<FeatureVector>> {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn sample_count(&self) -> usize {
        self.classes.values().map(Vec::len).sum()
    }

    /// Extracts `image` under the gallery config and appends it to `class_id`.
    /// The new sample's index is the class's previous sample count.
    pub fn enroll(
        &mut self,
        class_id: &str,
        image: &GrayImage,
    ) -> Result<&FeatureVector, FeatureError> {
        validate_class_id(class_id)?;
        let vector = extract(image, &self.config)?;
        let samples = self.classes.entry(class_id.to_string()).or_default();
        samples.push(vector);
        Ok(samples.last().expect("just pushed"))
    }

    /// Appends an already-extracted vector; its fingerprint must match the
    /// gallery's.
    pub fn push_sample(&mut self, class_id: &str, vector: FeatureVector) -> Result<(), FeatureError> {
        validate_class_id(class_id)?;
        if vector.fingerprint != self.fingerprint {
            return Err(FeatureError::FingerprintMismatch {
                expected: self.fingerprint.clone(),
                found: vector.fingerprint,
            });
        }
        self.classes.entry(class_id.to_string()).or_default().push(vector);
        Ok(())
    }

    /// Canonical serialization. Rejects galleries with no samples.
    pub fn to_bytes(&self) -> Result<Vec<u8>, GalleryError> {
        if self.classes.is_empty() {
            return Err(GalleryError::Empty);
        }
        let mut out = String::new();
        out.push_str(GALLERY_HEADER);
        out.push('\n');
        out.push_str("config ");
        out.push_str(&self.fingerprint);
        out.push('\n');
        for (class_id, samples) in &self.classes {
            for (index, vector) in samples.iter().enumerate() {
                out.push_str(class_id);
                out.push(',');
                out.push_str(&index.to_string());
                for v in &vector.values {
                    out.push(',');
                    out.push_str(&v.to_string());
                }
                out.push('\n');
            }
        }
        Ok(out.into_bytes())
    }

    /// Parses a serialized gallery. Rows may arrive in any order; each
    /// class's sample indices must form `0..n` exactly.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, GalleryError> {
        let text = std::str::from_utf8(bytes).map_err(|_| GalleryError::NotUtf8)?;
        let mut lines = text.split('\n').enumerate();

        let (_, header) = lines.next().unwrap_or((0, ""));
        if header != GALLERY_HEADER {
            return Err(GalleryError::VersionMismatch {
                found: header.to_string(),
            });
        }

        let (_, config_line) = lines
            .next()
            .ok_or(GalleryError::BadConfig {
                line: 2,
                reason: "missing".into(),
            })?;
        let body = config_line
            .strip_prefix("config ")
            .ok_or_else(|| GalleryError::BadConfig {
                line: 2,
                reason: format!("expected \"config ...\", got {config_line:?}"),
            })?;
        let config = ExtractionConfig::parse_fingerprint(body)
            .map_err(|reason| GalleryError::BadConfig { line: 2, reason })?;
        let expected_len = config.grid.region_count();
        let fingerprint = config.fingerprint();

        let rest: Vec<(usize, &str)> = lines.collect();
        let mut pending: BTreeMap<String, Vec<(usize, Vec<u32>)>> = BTreeMap::new();
        let mut row_count = 0usize;
        for (pos, &(i, raw)) in rest.iter().enumerate() {
            let line = i + 1;
            if raw.is_empty() {
                // Only a final trailing LF may leave an empty segment.
                if pos + 1 == rest.len() {
                    continue;
                }
                return Err(GalleryError::BadRow {
                    line,
                    reason: "empty line".into(),
                });
            }
            let (class_id, index, values) = parse_row(raw, line)?;
            if values.len() != expected_len {
                return Err(GalleryError::WrongArity {
                    line,
                    grid: config.grid.to_string(),
                    expected: expected_len,
                    found: values.len(),
                });
            }
            pending.entry(class_id).or_default().push((index, values));
            row_count += 1;
        }
        if row_count == 0 {
            return Err(GalleryError::Empty);
        }

        let mut classes = BTreeMap::new();
        for (class_id, mut rows) in pending {
            rows.sort_by_key(|(index, _)| *index);
            let count = rows.len();
            let contiguous = rows.iter().enumerate().all(|(k, (index, _))| *index == k);
            if !contiguous {
                return Err(GalleryError::BadSampleIndices {
                    class: class_id,
                    count,
                });
            }
            let samples = rows
                .into_iter()
                .map(|(_, values)| FeatureVector::new(values, fingerprint.clone()))
                .collect();
            classes.insert(class_id, samples);
        }

        Ok(Gallery {
            config,
            fingerprint,
            classes,
        })
    }
}

fn parse_row(raw: &str, line: usize) -> Result<(String, usize, Vec<u32>), GalleryError> {
    if raw.contains('\r') {
        return Err(GalleryError::BadRow {
            line,
            reason: "carriage return (line endings must be LF)".into(),
        });
    }
    let mut fields = raw.split(',');
    let class_id = fields.next().unwrap_or("");
    validate_class_id(class_id).map_err(|_| GalleryError::BadRow {
        line,
        reason: format!("bad class id {class_id:?}"),
    })?;
    let index_raw = fields.next().ok_or_else(|| GalleryError::BadRow {
        line,
        reason: "missing sample index".into(),
    })?;
    let index: usize = index_raw.parse().map_err(|_| GalleryError::BadRow {
        line,
        reason: format!("bad sample index {index_raw:?}"),
    })?;
    let mut values = Vec::new();
    for field in fields {
        let v: u32 = field.parse().map_err(|_| GalleryError::BadRow {
            line,
            reason: format!("bad feature value {field:?}"),
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(GalleryError::BadRow {
            line,
            reason: "row has no feature values".into(),
        });
    }
    Ok((class_id.to_string(), index, values))
}

fn validate_class_id(id: &str) -> Result<(), FeatureError> {
    let ok = !id.is_empty()
        && !id.contains(',')
        && !id.chars().any(|c| c.is_control())
        && id.trim() == id;
    if ok {
        Ok(())
    } else {
        Err(FeatureError::InvalidClassId(id.to_string()))
    }
}
