//! Deterministic synthetic palm-like corpus generator.
//!
//! Real palm image corpora cannot ship with the crate, so evaluation and
//! benchmarks run on generated images with a controllable class structure:
//! dark strokes on a light background, where class `i` draws
//! `lines_min + i * (lines_max - lines_min) / (class_count - 1)` strokes in
//! each image quadrant. Samples of one class re-draw the same strokes with
//! bounded orientation and position jitter, plus uniform pixel noise.
//!
//! Stroke counts must survive jitter, thresholding, and component filtering,
//! so placement is defensive: each quadrant interior is tiled with a lattice
//! of disjoint slots sized for `lines_max`, a class places at most one
//! stroke per slot, and jitter is confined to the slot's interior. Strokes
//! from different slots can never touch or share an edge response, each
//! stroke yields exactly one connected edge structure, and the per-quadrant
//! edginess of a sample equals its stroke count by construction.
//!
//! All randomness flows from `seed` through independent ChaCha8 streams per
//! class (stroke layout) and per sample (jitter, noise), so any single
//! sample can be regenerated without generating the rest of the corpus.

use crate::eval::Corpus;
use crate::imaging::{region_rects, GrayImage, RegionGrid};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthError {
    #[error("invalid synthesis spec: {0}")]
    InvalidSpec(String),
}

/// Background and stroke intensities; far enough apart that modest noise
/// cannot blur the boundary response below an automatic threshold.
const BG: u8 = 205;
const INK: u8 = 45;

/// Shortest allowed stroke half-length, in pixels.
const MIN_HALF_LEN: f64 = 2.5;

/// Center jitter per axis is `jitter * CENTER_JITTER_SCALE` pixels.
const CENTER_JITTER_SCALE: f64 = 12.0;

/// Parameters of a generated corpus. See [`SynthSpec::validate`] for the
/// accepted ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub class_count: usize,
    pub samples_per_class: usize,
    pub width: usize,
    pub height: usize,
    /// Strokes per quadrant for the first class.
    pub lines_min: usize,
    /// Strokes per quadrant for the last class.
    pub lines_max: usize,
    /// Stroke thickness in pixels.
    pub thickness: f64,
    /// Orientation jitter bound in radians; also scales center jitter.
    pub jitter: f64,
    /// Uniform pixel noise amplitude (0 disables noise).
    pub noise: u8,
    pub seed: u64,
}

impl SynthSpec {
    /// Frozen reference corpus used by the benchmark tests: 10 classes of 12
    /// samples at 384x284, quadrant stroke counts 2..=11.
    pub fn benchmark() -> Self {
        SynthSpec {
            class_count: 10,
            samples_per_class: 12,
            width: 384,
            height: 284,
            lines_min: 2,
            lines_max: 11,
            thickness: 3.0,
            jitter: 0.1,
            noise: 8,
            seed: 17,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let fail = |msg: String| Err(SynthError::InvalidSpec(msg));
        if self.class_count < 2 || self.class_count > 10_000 {
            return fail(format!("class_count must be in 2..=10000, got {}", self.class_count));
        }
        if self.samples_per_class < 1 || self.samples_per_class > 100_000 {
            return fail(format!(
                "samples_per_class must be in 1..=100000, got {}",
                self.samples_per_class
            ));
        }
        if self.width < 32 || self.height < 32 || self.width > 4096 || self.height > 4096 {
            return fail(format!(
                "image must be between 32x32 and 4096x4096, got {}x{}",
                self.width, self.height
            ));
        }
        if self.lines_min < 1 {
            return fail("lines_min must be at least 1".into());
        }
        if self.lines_max < self.lines_min {
            return fail(format!(
                "lines_max {} is below lines_min {}",
                self.lines_max, self.lines_min
            ));
        }
        if self.lines_max - self.lines_min < self.class_count - 1 {
            return fail(format!(
                "stroke range {}..={} cannot give {} classes distinct counts",
                self.lines_min, self.lines_max, self.class_count
            ));
        }
        if !self.thickness.is_finite() || !(1.0..=16.0).contains(&self.thickness) {
            return fail(format!("thickness must be in 1..=16, got {}", self.thickness));
        }
        if !self.jitter.is_finite() || !(0.0..=0.5).contains(&self.jitter) {
            return fail(format!("jitter must be in 0..=0.5, got {}", self.jitter));
        }
        // Geometry: even in the smallest quadrant's slots, a stroke along
        // the slot's long axis must keep MIN_HALF_LEN after reserving room
        // for jitter.
        let geom = Geometry::for_spec(self);
        if geom.worst_fallback_budget < MIN_HALF_LEN {
            return fail(format!(
                "strokes do not fit: {} per quadrant at thickness {} in {}x{} images leaves \
                 stroke budget {:.2}px (need {MIN_HALF_LEN})",
                self.lines_max, self.thickness, self.width, self.height,
                geom.worst_fallback_budget
            ));
        }
        Ok(())
    }
}

/// Stroke count per quadrant for one class: linear from `lines_min` to
/// `lines_max` across class indices.
pub fn class_line_count(spec: &SynthSpec, class_index: usize) -> usize {
    spec.lines_min + class_index * (spec.lines_max - spec.lines_min) / (spec.class_count - 1)
}

/// Canonical id of a class index: zero-padded, lexicographic order matches
/// numeric order (`c00`, `c01`, ...).
pub fn class_id(class_count: usize, class_index: usize) -> String {
    let pad = class_count
        .saturating_sub(1)
        .to_string()
        .len()
        .max(2);
    format!("c{class_index:0pad$}")
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl Rect {
    fn shrink(&self, m: f64) -> Rect {
        Rect {
            x0: self.x0 + m,
            y0: self.y0 + m,
            x1: self.x1 - m,
            y1: self.y1 - m,
        }
    }

    fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    fn center(&self) -> (f64, f64) {
        ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

#[derive(Debug, Clone, Copy)]
struct Stroke {
    cx: f64,
    cy: f64,
    angle: f64,
    half_len: f64,
}

impl Stroke {
    fn endpoints(&self) -> (f64, f64, f64, f64) {
        let (dx, dy) = (self.angle.cos(), self.angle.sin());
        (
            self.cx - self.half_len * dx,
            self.cy - self.half_len * dy,
            self.cx + self.half_len * dx,
            self.cy + self.half_len * dy,
        )
    }
}

/// Longest half-length a segment through `(cx, cy)` at `angle` can have with
/// both endpoints inside `b`. Zero if the center lies outside.
fn max_half_extent(cx: f64, cy: f64, angle: f64, b: &Rect) -> f64 {
    let (dx, dy) = (angle.cos(), angle.sin());
    let mut h = f64::INFINITY;
    if dx.abs() > 1e-12 {
        h = h.min((b.x1 - cx).min(cx - b.x0) / dx.abs());
    }
    if dy.abs() > 1e-12 {
        h = h.min((b.y1 - cy).min(cy - b.y0) / dy.abs());
    }
    h.max(0.0)
}

/// Slot lattice shared by every class of a spec.
struct Geometry {
    /// Inner slot boxes, grouped by quadrant. Segment endpoints stay inside
    /// these boxes, so stroke bodies from different slots are separated by
    /// at least twice the slot margin.
    slots_per_quadrant: Vec<Vec<Rect>>,
    center_jitter: f64,
    /// Half-length budget of the along-the-long-axis fallback stroke in the
    /// tightest slot; validation requires it to be at least MIN_HALF_LEN.
    worst_fallback_budget: f64,
    jitter: f64,
}

impl Geometry {
    fn for_spec(spec: &SynthSpec) -> Geometry {
        let radius = spec.thickness / 2.0;
        let center_jitter = spec.jitter * CENTER_JITTER_SCALE;
        let quads = region_rects(
            spec.width,
            spec.height,
            RegionGrid::new(2, 2).expect("static grid"),
        );

        // Slot grid shape from the smallest quadrant so all quadrants share
        // the same rows x cols.
        let min_qw = quads.iter().map(|q| q.width).min().unwrap() as f64;
        let min_qh = quads.iter().map(|q| q.height).min().unwrap() as f64;
        let quad_margin = (min_qw.min(min_qh) * 0.03).clamp(1.0, 4.0);
        let (slot_rows, slot_cols) = slot_grid_shape(
            spec.lines_max,
            min_qw - 2.0 * quad_margin,
            min_qh - 2.0 * quad_margin,
        );

        let mut slots_per_quadrant = Vec::with_capacity(4);
        let mut worst_fallback_budget = f64::INFINITY;
        for q in &quads {
            let quad = Rect {
                x0: q.col as f64,
                y0: q.row as f64,
                x1: (q.col + q.width) as f64,
                y1: (q.row + q.height) as f64,
            };
            let interior = quad.shrink(quad_margin);
            let slot_w = interior.width() / slot_cols as f64;
            let slot_h = interior.height() / slot_rows as f64;
            let slot_margin = (slot_w.min(slot_h) * 0.10).clamp(1.5, 4.0);
            let mut slots = Vec::with_capacity(slot_rows * slot_cols);
            for sr in 0..slot_rows {
                for sc in 0..slot_cols {
                    let slot = Rect {
                        x0: interior.x0 + sc as f64 * slot_w,
                        y0: interior.y0 + sr as f64 * slot_h,
                        x1: interior.x0 + (sc + 1) as f64 * slot_w,
                        y1: interior.y0 + (sr + 1) as f64 * slot_h,
                    };
                    let inner = slot.shrink(slot_margin + radius);
                    let (cx, cy) = inner.center();
                    let fallback_angle = if inner.width() >= inner.height() {
                        0.0
                    } else {
                        FRAC_PI_2
                    };
                    let ext = max_half_extent(cx, cy, fallback_angle, &inner);
                    let budget = stroke_budget(ext, center_jitter, spec.jitter);
                    let degenerate = inner.width() < 1.0 || inner.height() < 1.0;
                    worst_fallback_budget = worst_fallback_budget
                        .min(if degenerate { 0.0 } else { budget });
                    slots.push(inner);
                }
            }
            slots_per_quadrant.push(slots);
        }

        Geometry {
            slots_per_quadrant,
            center_jitter,
            worst_fallback_budget,
            jitter: spec.jitter,
        }
    }
}

/// Rows x cols with `rows * cols >= n`, shaped to the box aspect ratio.
fn slot_grid_shape(n: usize, w: f64, h: f64) -> (usize, usize) {
    let aspect = if h > 0.0 { (w / h).max(0.01) } else { 1.0 };
    let cols = (((n as f64) * aspect).sqrt().ceil() as usize).clamp(1, n);
    let rows = n.div_ceil(cols);
    (rows, cols)
}

/// Usable half-length once jitter headroom is reserved: after moving the
/// center by up to `center_jitter` per axis and rotating by up to `jitter`,
/// endpoints stay within the original extent.
fn stroke_budget(extent: f64, center_jitter: f64, jitter: f64) -> f64 {
    (extent - center_jitter * SQRT_2) / (1.0 + jitter)
}

fn class_stream(class_index: usize) -> u64 {
    (class_index as u64) << 1
}

fn sample_stream(class_index: usize, sample_index: usize) -> u64 {
    ((class_index as u64) << 21 | (sample_index as u64 + 1) << 1) | 1
}

/// Canonical strokes of one class, flattened over quadrants, each paired
/// with the slot box that confines its jitter.
fn class_strokes(spec: &SynthSpec, geom: &Geometry, class_index: usize) -> Vec<(Rect, Stroke)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(class_stream(class_index));
    let count = class_line_count(spec, class_index);
    let mut strokes = Vec::with_capacity(count * 4);
    for slots in &geom.slots_per_quadrant {
        let mut order: Vec<usize> = (0..slots.len()).collect();
        order.shuffle(&mut rng);
        for &slot_index in order.iter().take(count) {
            let inner = slots[slot_index];
            let (ccx, ccy) = inner.center();
            let mut placed = None;
            for _ in 0..64 {
                let cx = ccx + rng.gen_range(-0.25..=0.25) * inner.width();
                let cy = ccy + rng.gen_range(-0.25..=0.25) * inner.height();
                let angle = rng.gen_range(0.0..PI);
                let budget = stroke_budget(
                    max_half_extent(cx, cy, angle, &inner),
                    geom.center_jitter,
                    geom.jitter,
                );
                if budget >= MIN_HALF_LEN {
                    let half_len = budget * rng.gen_range(0.6..=0.95);
                    placed = Some(Stroke {
                        cx,
                        cy,
                        angle,
                        half_len: half_len.max(MIN_HALF_LEN),
                    });
                    break;
                }
            }
            let stroke = placed.unwrap_or_else(|| {
                // Centered along the long axis; validation guarantees this
                // configuration has budget.
                let angle = if inner.width() >= inner.height() {
                    0.0
                } else {
                    FRAC_PI_2
                };
                let budget = stroke_budget(
                    max_half_extent(ccx, ccy, angle, &inner),
                    geom.center_jitter,
                    geom.jitter,
                );
                Stroke {
                    cx: ccx,
                    cy: ccy,
                    angle,
                    half_len: (budget * 0.8).max(MIN_HALF_LEN * 0.8),
                }
            });
            strokes.push((inner, stroke));
        }
    }
    strokes
}

/// Generates one sample image. Equivalent to the corresponding image of
/// [`generate_synthetic`] but without generating the rest of the corpus.
pub fn generate_sample(
    spec: &SynthSpec,
    class_index: usize,
    sample_index: usize,
) -> Result<GrayImage, SynthError> {
    spec.validate()?;
    if class_index >= spec.class_count {
        return Err(SynthError::InvalidSpec(format!(
            "class index {class_index} out of range for {} classes",
            spec.class_count
        )));
    }
    if sample_index >= spec.samples_per_class {
        return Err(SynthError::InvalidSpec(format!(
            "sample index {sample_index} out of range for {} samples per class",
            spec.samples_per_class
        )));
    }

    let geom = Geometry::for_spec(spec);
    let canonical = class_strokes(spec, &geom, class_index);
    let radius = spec.thickness / 2.0;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(sample_stream(class_index, sample_index));

    let mut pixels = vec![BG; spec.width * spec.height];
    for (inner, base) in &canonical {
        let dtheta = rng.gen_range(-spec.jitter..=spec.jitter);
        let dx = rng.gen_range(-geom.center_jitter..=geom.center_jitter);
        let dy = rng.gen_range(-geom.center_jitter..=geom.center_jitter);
        let mut stroke = Stroke {
            cx: base.cx + dx,
            cy: base.cy + dy,
            angle: base.angle + dtheta,
            half_len: base.half_len,
        };
        // The budget reserved at layout time makes the jittered stroke fit
        // in almost every case; clamp to the slot as a hard guarantee.
        if inner.contains(stroke.cx, stroke.cy) {
            let ext = max_half_extent(stroke.cx, stroke.cy, stroke.angle, inner);
            if ext >= MIN_HALF_LEN * 0.8 {
                stroke.half_len = stroke.half_len.min(ext);
            } else {
                stroke = *base;
            }
        } else {
            stroke = *base;
        }
        draw_stroke(&mut pixels, spec.width, spec.height, &stroke, radius);
    }

    if spec.noise > 0 {
        let amp = i32::from(spec.noise);
        for p in &mut pixels {
            let d = rng.gen_range(-amp..=amp);
            *p = (i32::from(*p) + d).clamp(0, 255) as u8;
        }
    }

    Ok(GrayImage::new(spec.width, spec.height, pixels).expect("validated dimensions"))
}

/// Generates the full corpus: `class_count` classes ([`class_id`] names) of
/// `samples_per_class` images each.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<Corpus, SynthError> {
    spec.validate()?;
    let mut corpus = Corpus::new();
    for c in 0..spec.class_count {
        let id = class_id(spec.class_count, c);
        for s in 0..spec.samples_per_class {
            corpus.add(&id, generate_sample(spec, c, s)?);
        }
    }
    Ok(corpus)
}

/// Paints every pixel whose center lies within `radius` of the stroke's
/// centerline segment.
fn draw_stroke(pixels: &mut [u8], width: usize, height: usize, stroke: &Stroke, radius: f64) {
    let (x0, y0, x1, y1) = stroke.endpoints();
    let pad = radius + 1.0;
    let min_x = (x0.min(x1) - pad).floor().max(0.0) as usize;
    let max_x = ((x0.max(x1) + pad).ceil() as usize).min(width - 1);
    let min_y = (y0.min(y1) - pad).floor().max(0.0) as usize;
    let max_y = ((y0.max(y1) + pad).ceil() as usize).min(height - 1);
    let r_sq = radius * radius;
    for y in min_y..=max_y {
        for x in min_x..=max_x {
            if segment_dist_sq(x as f64, y as f64, x0, y0, x1, y1) <= r_sq {
                pixels[y * width + x] = INK;
            }
        }
    }
}

fn segment_dist_sq(px: f64, py: f64, x0: f64, y0: f64, x1: f64, y1: f64) -> f64 {
    let (vx, vy) = (x1 - x0, y1 - y0);
    let len_sq = vx * vx + vy * vy;
    let t = if len_sq > 0.0 {
        (((px - x0) * vx + (py - y0) * vy) / len_sq).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (nx, ny) = (x0 + t * vx - px, y0 + t * vy - py);
    nx * nx + ny * ny
}
