//! Sliding-matrix fill and external border following.
//!
//! A `core x core` window walks the binarized image with stride `step`.
//! Whenever the mean of the original pixels under the window exceeds
//! `fill_threshold`, every pixel under the window becomes white. The porous
//! honeycomb turns into a solid blob whose outer boundary is traced with
//! Moore-neighbor border following. The largest traced contour is the
//! workpiece; small ones are noise.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imgio::BinaryImage;
use crate::scanline::{Contour, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlideError {
    #[error("core must be at least 1")]
    InvalidCore,
    #[error("step must be at least 1")]
    InvalidStep,
    #[error("no contours found")]
    NoContours,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlidingParams {
    core: usize,
    step: usize,
    fill_threshold: u8,
}

pub const DEFAULT_FILL_THRESHOLD: u8 = 40;

impl SlidingParams {
    pub fn new(core: usize, step: usize, fill_threshold: u8) -> Result<Self, SlideError> {
        if core == 0 {
            return Err(SlideError::InvalidCore);
        }
        if step == 0 {
            return Err(SlideError::InvalidStep);
        }
        Ok(Self {
            core,
            step,
            fill_threshold,
        })
    }

    pub fn core(&self) -> usize {
        self.core
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn fill_threshold(&self) -> u8 {
        self.fill_threshold
    }

    /// The stride should not exceed twice the window size; beyond that,
    /// bands between windows are never filled. Not an error.
    pub fn step_exceeds_advice(&self) -> bool {
        self.step > 2 * self.core
    }
}

impl Default for SlidingParams {
    fn default() -> Self {
        Self {
            core: 8,
            step: 8,
            fill_threshold: DEFAULT_FILL_THRESHOLD,
        }
    }
}

/// Summed-area table with a zero row and column in front.
struct IntegralImage {
    stride: usize,
    sums: Vec<u64>,
}

impl IntegralImage {
    fn new(image: &BinaryImage) -> Self {
        let (w, h) = (image.width(), image.height());
        let stride = w + 1;
        let mut sums = vec![0u64; stride * (h + 1)];
        for y in 0..h {
            let mut row_sum = 0u64;
            for (x, &v) in image.row(y).iter().enumerate() {
                row_sum += u64::from(v);
                sums[(y + 1) * stride + x + 1] = sums[y * stride + x + 1] + row_sum;
            }
        }
        Self { stride, sums }
    }

    /// Sum over `[x0, x1) x [y0, y1)`.
    fn sum(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> u64 {
        let s = self.stride;
        self.sums[y1 * s + x1] + self.sums[y0 * s + x0]
            - self.sums[y0 * s + x1]
            - self.sums[y1 * s + x0]
    }
}

/// Top-left corners of all windows, row by row: `(i * step, j * step)` for
/// every position that still overlaps the image.
pub fn window_origins(width: usize, height: usize, params: &SlidingParams) -> Vec<(usize, usize)> {
    let xs: Vec<usize> = (0..width).step_by(params.step).collect();
    (0..height)
        .step_by(params.step)
        .flat_map(|y| xs.iter().map(move |&x| (x, y)))
        .collect()
}

/// Applies the windows at `origins` in the given order.
///
/// Window means always come from `image`, never from pixels already filled
/// by earlier windows, so the result does not depend on the order. Windows
/// are clipped at the border and averaged over the clipped area.
pub fn apply_windows(
    image: &BinaryImage,
    params: &SlidingParams,
    origins: impl IntoIterator<Item = (usize, usize)>,
) -> BinaryImage {
    let (w, h) = (image.width(), image.height());
    let integral = IntegralImage::new(image);
    let mut out = image.clone();
    let threshold = u64::from(params.fill_threshold);
    for (x0, y0) in origins {
        if x0 >= w || y0 >= h {
            continue;
        }
        let x1 = (x0 + params.core).min(w);
        let y1 = (y0 + params.core).min(h);
        let count = ((x1 - x0) * (y1 - y0)) as u64;
        // mean > threshold, compared exactly as sum > threshold * count
        if integral.sum(x0, y0, x1, y1) > threshold * count {
            for y in y0..y1 {
                for x in x0..x1 {
                    out.set_white(x, y);
                }
            }
        }
    }
    out
}

/// Sliding-matrix fill over the whole image.
pub fn sliding_fill(image: &BinaryImage, params: &SlidingParams) -> BinaryImage {
    let origins = window_origins(image.width(), image.height(), params);
    apply_windows(image, params, origins)
}

/// External boundaries of the white 8-connected components, in the order
/// the components are met by a row-major scan.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ContourSet {
    pub contours: Vec<Contour>,
}

impl ContourSet {
    pub fn len(&self) -> usize {
        self.contours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contours.is_empty()
    }
}

/// Clockwise around a pixel when y points down, starting west.
const RING: [(i64, i64); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

fn ring_index(center: Point, neighbor: Point) -> usize {
    let d = (neighbor.x - center.x, neighbor.y - center.y);
    RING.iter()
        .position(|&r| r == d)
        .expect("backtrack pixel must be an 8-neighbor")
}

/// One Moore step: rotate clockwise from the backtrack pixel until a white
/// pixel is found. Returns the new pixel and its backtrack (the last
/// non-white pixel examined).
fn moore_step(image: &BinaryImage, p: Point, backtrack: Point) -> Option<(Point, Point)> {
    let start = ring_index(p, backtrack);
    for k in 1..8 {
        let d = (start + k) % 8;
        let q = Point::new(p.x + RING[d].0, p.y + RING[d].1);
        if image.is_white_at(q.x, q.y) {
            let prev = RING[(d + 7) % 8];
            return Some((q, Point::new(p.x + prev.0, p.y + prev.1)));
        }
    }
    None
}

/// Traces the outer boundary of the component whose first pixel in
/// row-major order is `start`. Its west neighbor is necessarily background.
fn trace_from(image: &BinaryImage, start: Point) -> Contour {
    let entry = Point::new(start.x - 1, start.y);
    let Some(first) = moore_step(image, start, entry) else {
        return Contour::new(vec![start]);
    };
    let mut points = vec![start, first.0];
    let (mut p, mut backtrack) = first;
    // Every state (pixel, backtrack) has one successor, so the walk is
    // periodic; it closes when leaving `start` the same way as the first move.
    let max_steps = 8 * image.width() * image.height() + 8;
    for _ in 0..max_steps {
        let next = moore_step(image, p, backtrack).expect("traced pixel has a white neighbor");
        if p == start && next == first {
            break;
        }
        points.push(next.0);
        (p, backtrack) = next;
    }
    if points.len() > 1 && points.last() == Some(&start) {
        points.pop();
    }
    Contour::new(points)
}

/// Moore-neighbor border following of every white component's outer
/// boundary. Holes are not traced.
///
/// Components are 8-connected; each point of a returned contour is a white
/// pixel with a black or out-of-image 4-neighbor, and contours run
/// clockwise on screen.
pub fn trace_external_contours(image: &BinaryImage) -> ContourSet {
    let (w, h) = (image.width(), image.height());
    let mut labeled = vec![false; w * h];
    let mut stack = Vec::new();
    let mut contours = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if labeled[y * w + x] || !image.is_white(x, y) {
                continue;
            }
            labeled[y * w + x] = true;
            stack.push((x, y));
            while let Some((cx, cy)) = stack.pop() {
                for (dx, dy) in RING {
                    let nx = cx as i64 + dx;
                    let ny = cy as i64 + dy;
                    if image.is_white_at(nx, ny) {
                        let idx = ny as usize * w + nx as usize;
                        if !labeled[idx] {
                            labeled[idx] = true;
                            stack.push((nx as usize, ny as usize));
                        }
                    }
                }
            }
            contours.push(trace_from(image, Point::new(x as i64, y as i64)));
        }
    }
    ContourSet { contours }
}

/// Twice the signed shoelace area. Positive for clockwise contours under
/// y-down axes.
pub(crate) fn doubled_signed_area(points: &[Point]) -> i128 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let a = points[i];
            let b = points[(i + 1) % n];
            i128::from(a.x) * i128::from(b.y) - i128::from(b.x) * i128::from(a.y)
        })
        .sum()
}

fn doubled_area(contour: &Contour) -> u128 {
    let mut distinct = contour.points.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return 0;
    }
    doubled_signed_area(&contour.points).unsigned_abs()
}

/// Absolute shoelace area of the closed polygon; zero for fewer than three
/// distinct points.
pub fn contour_area(contour: &Contour) -> f64 {
    doubled_area(contour) as f64 / 2.0
}

/// Largest contour by area, then by point count, then earliest.
pub fn largest_contour(set: &ContourSet) -> Result<&Contour, SlideError> {
    let mut best: Option<(&Contour, u128)> = None;
    for c in &set.contours {
        let area = doubled_area(c);
        let better = match best {
            None => true,
            Some((b, b_area)) => area > b_area || (area == b_area && c.len() > b.len()),
        };
        if better {
            best = Some((c, area));
        }
    }
    best.map(|(c, _)| c).ok_or(SlideError::NoContours)
}

/// Result of the full sliding pipeline, kept with the intermediate counts.
#[derive(Debug, Clone)]
pub struct SlidingDetection {
    pub contour: Contour,
    pub contours_found: usize,
}

/// Fill, trace, keep the largest contour.
pub fn detect_sliding(image: &BinaryImage, params: &SlidingParams) -> Result<Contour, SlideError> {
    detect_sliding_detailed(image, params).map(|d| d.contour)
}

pub fn detect_sliding_detailed(
    image: &BinaryImage,
    params: &SlidingParams,
) -> Result<SlidingDetection, SlideError> {
    let filled = sliding_fill(image, params);
    let set = trace_external_contours(&filled);
    let contour = largest_contour(&set)?.clone();
    Ok(SlidingDetection {
        contour,
        contours_found: set.len(),
    })
}

/// True if `(x, y)` is white with at least one black or out-of-image
/// 4-neighbor.
pub fn is_boundary_pixel(image: &BinaryImage, x: i64, y: i64) -> bool {
    image.is_white_at(x, y)
        && [(1, 0), (-1, 0), (0, 1), (0, -1)]
            .iter()
            .any(|(dx, dy)| !image.is_white_at(x + dx, y + dy))
}
