//! Grayscale images, PGM I/O, and region-grid partitioning.
//!
//! Images are 8-bit, row-major, immutable after construction. A
//! [`RegionGrid`] splits an image into `rows x cols` rectangular regions
//! covering every pixel exactly once; when a dimension does not divide
//! evenly, the remainder pixels widen the trailing regions (a length of 5
//! split two ways gives spans of 2 and 3).

mod pgm;

pub use pgm::{load_pgm, save_pgm, PgmError};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("image dimensions must be positive, got {width}x{height}")]
    BadDimensions { width: usize, height: usize },
    #[error("pixel buffer holds {actual} bytes, expected {expected} for {width}x{height}")]
    PixelCountMismatch {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },
    #[error("region grid must have at least one row and one column")]
    EmptyGrid,
    #[error("cannot partition a {width}x{height} image into a {rows}x{cols} grid")]
    GridTooLarge {
        width: usize,
        height: usize,
        rows: usize,
        cols: usize,
    },
}

/// 8-bit grayscale image, pixels stored row-major (index `y * width + x`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// Wraps a row-major pixel buffer. The buffer length must equal
    /// `width * height` and both dimensions must be positive.
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::BadDimensions { width, height });
        }
        let expected = width
            .checked_mul(height)
            .ok_or(ImageError::BadDimensions { width, height })?;
        if pixels.len() != expected {
            return Err(ImageError::PixelCountMismatch {
                width,
                height,
                expected,
                actual: pixels.len(),
            });
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    /// Constant image of the given value.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::BadDimensions { width, height });
        }
        let len = width
            .checked_mul(height)
            .ok_or(ImageError::BadDimensions { width, height })?;
        Ok(GrayImage {
            width,
            height,
            pixels: vec![value; len],
        })
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::BadDimensions { width, height });
        }
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        GrayImage::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Pixel at column `x`, row `y`. Panics out of bounds.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[y * self.width + x]
    }

    /// Copies out the rectangle described by `view` as a standalone image.
    /// Panics if the view does not lie within the image.
    pub fn crop(&self, view: &RegionView) -> GrayImage {
        assert!(
            view.col + view.width <= self.width && view.row + view.height <= self.height,
            "region {}+{}x{}+{} outside {}x{} image",
            view.col,
            view.width,
            view.row,
            view.height,
            self.width,
            self.height
        );
        let mut pixels = Vec::with_capacity(view.width * view.height);
        for y in view.row..view.row + view.height {
            let start = y * self.width + view.col;
            pixels.extend_from_slice(&self.pixels[start..start + view.width]);
        }
        GrayImage {
            width: view.width,
            height: view.height,
            pixels,
        }
    }
}

/// Rectangular partition layout, `rows x cols` regions in row-major order.
///
/// The common grids are 2x2 (4 regions, quadrants ordered LT, RT, LB, RB),
/// 2x4 (8 regions), and 4x4 (16 regions).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionGrid {
    rows: usize,
    cols: usize,
}

impl RegionGrid {
    pub fn new(rows: usize, cols: usize) -> Result<Self, ImageError> {
        if rows == 0 || cols == 0 {
            return Err(ImageError::EmptyGrid);
        }
        Ok(RegionGrid { rows, cols })
    }

    /// Default layout for a region count: 4 -> 2x2, 8 -> 2x4, 16 -> 4x4.
    pub fn for_region_count(count: usize) -> Option<Self> {
        match count {
            4 => Some(RegionGrid { rows: 2, cols: 2 }),
            8 => Some(RegionGrid { rows: 2, cols: 4 }),
            16 => Some(RegionGrid { rows: 4, cols: 4 }),
            _ => None,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn region_count(&self) -> usize {
        self.rows * self.cols
    }
}

impl std::fmt::Display for RegionGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

impl std::str::FromStr for RegionGrid {
    type Err = String;

    /// Parses `ROWSxCOLS`, e.g. `2x2` or `2x4`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (rows, cols) = s
            .split_once('x')
            .ok_or_else(|| format!("expected ROWSxCOLS, got {s:?}"))?;
        let rows: usize = rows
            .parse()
            .map_err(|_| format!("bad row count in grid {s:?}"))?;
        let cols: usize = cols
            .parse()
            .map_err(|_| format!("bad column count in grid {s:?}"))?;
        RegionGrid::new(rows, cols).map_err(|e| e.to_string())
    }
}

/// One region of a partition: `index` is the row-major ordinal, `row`/`col`
/// the top-left pixel of the region within the source image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionView {
    pub index: usize,
    pub row: usize,
    pub col: usize,
    pub width: usize,
    pub height: usize,
}

/// Splits `image` into `grid` regions. Every pixel lands in exactly one
/// region; remainder pixels go to the trailing rows/columns. Fails if the
/// image has fewer pixels per axis than the grid has cells.
pub fn partition(image: &GrayImage, grid: RegionGrid) -> Result<Vec<RegionView>, ImageError> {
    if image.width() < grid.cols || image.height() < grid.rows {
        return Err(ImageError::GridTooLarge {
            width: image.width(),
            height: image.height(),
            rows: grid.rows,
            cols: grid.cols,
        });
    }
    Ok(region_rects(image.width(), image.height(), grid))
}

/// Partition geometry without an image. Callers must ensure `width >= cols`
/// and `height >= rows`.
pub(crate) fn region_rects(width: usize, height: usize, grid: RegionGrid) -> Vec<RegionView> {
    let col_spans = axis_spans(width, grid.cols);
    let row_spans = axis_spans(height, grid.rows);
    let mut regions = Vec::with_capacity(grid.region_count());
    for (r, &(row, h)) in row_spans.iter().enumerate() {
        for (c, &(col, w)) in col_spans.iter().enumerate() {
            regions.push(RegionView {
                index: r * grid.cols + c,
                row,
                col,
                width: w,
                height: h,
            });
        }
    }
    regions
}

/// Splits `len` into `parts` contiguous spans of `(start, size)`. The first
/// `parts - len % parts` spans get `len / parts` units, the rest one extra.
fn axis_spans(len: usize, parts: usize) -> Vec<(usize, usize)> {
    let base = len / parts;
    let rem = len % parts;
    let mut spans = Vec::with_capacity(parts);
    let mut start = 0;
    for i in 0..parts {
        let size = if i < parts - rem { base } else { base + 1 };
        spans.push((start, size));
        start += size;
    }
    spans
}
