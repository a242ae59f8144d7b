//! 3x3 edge operators and thresholding into binary edge maps.
//!
//! Three operators are supported, all built from fixed 3x3 kernels applied
//! as correlations with replicate padding at the borders (the nearest edge
//! pixel is reused outside the image):
//!
//! * Sobel: gradient magnitude `sqrt(gx^2 + gy^2)` from the kernel pair
//!   `gx = [[-1,0,1],[-2,0,2],[-1,0,1]]` and `gy` its transpose.
//! * Laplacian: the 4-neighbor kernel `[[0,1,0],[1,-4,1],[0,1,0]]`, kept
//!   signed; thresholding compares `|response|`.
//! * LoG: a 3x3 center-surround approximation (`[[0,-1,0],[-1,4,-1],[0,-1,0]]`),
//!   reported as `|response|`.
//!
//! A threshold turns a response map into an [`EdgeMap`]: a pixel is an edge
//! when `|response| > threshold` (strictly). When no explicit threshold is
//! given, [`auto_threshold`] derives one as `k * mean(|response|)` over the
//! map, with `k` defaulting to [`DEFAULT_THRESHOLD_K`].

use crate::imaging::GrayImage;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EdgeError {
    #[error("image is {width}x{height}; 3x3 operators need at least 3x3")]
    TooSmall { width: usize, height: usize },
}

/// 3x3 integer kernel, `weights[row][col]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Kernel3 {
    pub weights: [[i32; 3]; 3],
}

pub const SOBEL_X: Kernel3 = Kernel3 {
    weights: [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]],
};

pub const SOBEL_Y: Kernel3 = Kernel3 {
    weights: [[-1, -2, -1], [0, 0, 0], [1, 2, 1]],
};

pub const LAPLACIAN: Kernel3 = Kernel3 {
    weights: [[0, 1, 0], [1, -4, 1], [0, 1, 0]],
};

/// Sign-flipped 3x3 Laplacian; the conventional small-kernel stand-in for a
/// Laplacian-of-Gaussian at minimal scale.
pub const LOG_3X3: Kernel3 = Kernel3 {
    weights: [[0, -1, 0], [-1, 4, -1], [0, -1, 0]],
};

/// Multiplier for the automatic threshold `k * mean(|response|)`.
pub const DEFAULT_THRESHOLD_K: f64 = 4.0;

/// Per-pixel operator response, same shape as the source image. Values come
/// from integer arithmetic and are exact in `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ResponseMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height);
        self.values[y * self.width + x]
    }
}

/// Binary edge map, row-major booleans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl EdgeMap {
    /// Wraps a row-major boolean buffer. Panics if the length is wrong or a
    /// dimension is zero.
    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Self {
        assert!(width > 0 && height > 0, "edge map dimensions must be positive");
        assert_eq!(bits.len(), width * height, "edge map buffer length mismatch");
        EdgeMap {
            width,
            height,
            bits,
        }
    }

    /// Builds a map by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        EdgeMap::from_bits(width, height, bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        debug_assert!(x < self.width && y < self.height);
        self.bits[y * self.width + x]
    }

    /// Number of edge pixels.
    pub fn edge_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Edge operator selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeOperator {
    Sobel,
    Laplacian,
    Log,
}

impl EdgeOperator {
    pub const ALL: [EdgeOperator; 3] = [
        EdgeOperator::Sobel,
        EdgeOperator::Laplacian,
        EdgeOperator::Log,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EdgeOperator::Sobel => "sobel",
            EdgeOperator::Laplacian => "laplacian",
            EdgeOperator::Log => "log",
        }
    }
}

impl std::fmt::Display for EdgeOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EdgeOperator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sobel" => Ok(EdgeOperator::Sobel),
            "laplacian" => Ok(EdgeOperator::Laplacian),
            "log" => Ok(EdgeOperator::Log),
            other => Err(format!(
                "unknown operator {other:?} (expected sobel, laplacian, or log)"
            )),
        }
    }
}

/// Correlates `image` with a 3x3 kernel. Border pixels replicate the nearest
/// image pixel. All arithmetic is integer; results are exact.
pub fn convolve3(image: &GrayImage, kernel: &Kernel3) -> Result<ResponseMap, EdgeError> {
    let (w, h) = (image.width(), image.height());
    if w < 3 || h < 3 {
        return Err(EdgeError::TooSmall {
            width: w,
            height: h,
        });
    }
    let mut values = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let mut acc: i64 = 0;
            for (ky, row) in kernel.weights.iter().enumerate() {
                let sy = clamp_index(y as isize + ky as isize - 1, h);
                for (kx, &wgt) in row.iter().enumerate() {
                    let sx = clamp_index(x as isize + kx as isize - 1, w);
                    acc += i64::from(wgt) * i64::from(image.get(sx, sy));
                }
            }
            values.push(acc as f64);
        }
    }
    Ok(ResponseMap {
        width: w,
        height: h,
        values,
    })
}

#[inline]
fn clamp_index(i: isize, len: usize) -> usize {
    i.clamp(0, len as isize - 1) as usize
}

/// Sobel gradient magnitude `sqrt(gx^2 + gy^2)` per pixel.
pub fn sobel_magnitude(image: &GrayImage) -> Result<ResponseMap, EdgeError> {
    let gx = convolve3(image, &SOBEL_X)?;
    let gy = convolve3(image, &SOBEL_Y)?;
    let values = gx
        .values
        .iter()
        .zip(&gy.values)
        .map(|(a, b)| (a * a + b * b).sqrt())
        .collect();
    Ok(ResponseMap {
        width: gx.width,
        height: gx.height,
        values,
    })
}

/// Signed 4-neighbor Laplacian response.
pub fn laplacian_response(image: &GrayImage) -> Result<ResponseMap, EdgeError> {
    convolve3(image, &LAPLACIAN)
}

/// LoG approximation: absolute response of the [`LOG_3X3`] kernel.
pub fn log_response(image: &GrayImage) -> Result<ResponseMap, EdgeError> {
    let mut resp = convolve3(image, &LOG_3X3)?;
    for v in &mut resp.values {
        *v = v.abs();
    }
    Ok(resp)
}

/// Data-derived threshold `k * mean(|response|)`.
pub fn auto_threshold(resp: &ResponseMap, k: f64) -> f64 {
    let sum: f64 = resp.values.iter().map(|v| v.abs()).sum();
    k * sum / resp.values.len() as f64
}

/// Marks pixels with `|response| > threshold` (strictly greater).
pub fn threshold_edges(resp: &ResponseMap, threshold: f64) -> EdgeMap {
    EdgeMap {
        width: resp.width,
        height: resp.height,
        bits: resp.values.iter().map(|v| v.abs() > threshold).collect(),
    }
}

/// Full detection step: operator response, then threshold. `threshold` of
/// `None` selects the automatic rule with multiplier `threshold_k`.
pub fn detect_edges(
    image: &GrayImage,
    operator: EdgeOperator,
    threshold: Option<f64>,
    threshold_k: f64,
) -> Result<EdgeMap, EdgeError> {
    let resp = match operator {
        EdgeOperator::Sobel => sobel_magnitude(image)?,
        EdgeOperator::Laplacian => laplacian_response(image)?,
        EdgeOperator::Log => log_response(image)?,
    };
    let t = threshold.unwrap_or_else(|| auto_threshold(&resp, threshold_k));
    Ok(threshold_edges(&resp, t))
}
