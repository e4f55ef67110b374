//! Synthetic honeycomb blanks with ground truth, mask metrics and the
//! side-by-side comparison of both detectors.
//!
//! The generator draws a pointy-top hexagonal lattice clipped to a polygonal
//! blank. Each cell is rendered as its own bright hexagonal band of width
//! `wall_thickness`, separated from its neighbours by a dark seam, so the
//! raw binarized lattice falls apart into one component per cell. Speck
//! noise is placed outside the blank with a 64-bit LCG:
//!
//! ```text
//! state = state * 6364136223846793005 + 1442695040888963407   (mod 2^64)
//! x = (state >> 32) % width, then the same for y
//! ```
//!
//! The lattice uses only IEEE-754 basic operations (add, mul, div, sqrt,
//! floor), so images are bit-identical across platforms.

use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::imgio::{binarize, BinaryImage, GrayImage, ImageError};
use crate::scanline::{assemble_contour, direct_scan, Contour, Point, ScanParams};
use crate::slidefill::{largest_contour, sliding_fill, trace_external_contours, SlidingParams};

const LCG_MUL: u64 = 6364136223846793005;
const LCG_INC: u64 = 1442695040888963407;

/// Distance from the cell boundary where a cell's bright band starts. Two
/// pixels of different cells that touch (even diagonally) are at least
/// `2 * SEAM_HALF > sqrt(2)` apart in band terms, so they cannot both be lit.
const SEAM_HALF: f64 = 0.75;

pub const DEFAULT_WALL_LUMINANCE: u8 = 220;
pub const DEFAULT_BACKGROUND_LUMINANCE: u8 = 30;

/// Number of timed repetitions per pipeline; the median is reported.
pub const TIMING_RUNS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon vertex ({x}, {y}) lies outside the {width}x{height} image")]
    OutOfBounds {
        x: i64,
        y: i64,
        width: usize,
        height: usize,
    },
    #[error("polygon is not simple: edges {0} and {1} intersect")]
    SelfIntersecting(usize, usize),
    #[error("polygon has a zero-length edge at vertex {0}")]
    DegenerateEdge(usize),
    #[error("wall luminance {wall} must exceed background luminance {background}")]
    Luminance { wall: u8, background: u8 },
    #[error("cell pitch must be at least 1")]
    InvalidPitch,
    #[error("wall thickness must be at least 1")]
    InvalidWall,
    #[error("could not place {requested} isolated specks outside the blank (placed {placed})")]
    SpeckPlacement { requested: usize, placed: usize },
    #[error(transparent)]
    Image(#[from] ImageError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("mask dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
}

/// Built-in blank outlines, scaled to the image size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapePreset {
    /// Axis-aligned rectangle with a 1/8 margin on every side.
    Rect,
    /// The rectangle with a notch cut from the top edge, so the upper rows
    /// cross two separate arms.
    CShape,
}

impl ShapePreset {
    pub const ALL: [ShapePreset; 2] = [ShapePreset::Rect, ShapePreset::CShape];

    pub fn name(self) -> &'static str {
        match self {
            ShapePreset::Rect => "rect",
            ShapePreset::CShape => "c-shape",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn polygon(self, width: usize, height: usize) -> Vec<Point> {
        let (w, h) = (width as i64, height as i64);
        let x0 = w / 8;
        let x1 = w - 1 - w / 8;
        let y0 = h / 8;
        let y1 = h - 1 - h / 8;
        match self {
            ShapePreset::Rect => vec![
                Point::new(x0, y0),
                Point::new(x1, y0),
                Point::new(x1, y1),
                Point::new(x0, y1),
            ],
            ShapePreset::CShape => {
                let xa = x0 + (x1 - x0) * 2 / 5;
                let xb = x0 + (x1 - x0) * 2 / 3;
                let yn = y0 + (y1 - y0) * 3 / 5;
                vec![
                    Point::new(x0, y0),
                    Point::new(xa, y0),
                    Point::new(xa, yn),
                    Point::new(xb, yn),
                    Point::new(xb, y0),
                    Point::new(x1, y0),
                    Point::new(x1, y1),
                    Point::new(x0, y1),
                ]
            }
        }
    }
}

/// Parametric synthetic blank.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpec {
    pub polygon: Vec<Point>,
    pub cell_pitch: f64,
    pub wall_thickness: f64,
    pub image_size: (usize, usize),
    pub speck_count: usize,
    pub speck_seed: u64,
    pub wall_luminance: u8,
    pub background_luminance: u8,
}

impl ShapeSpec {
    /// A preset outline with the default luminances.
    pub fn preset(
        preset: ShapePreset,
        image_size: (usize, usize),
        cell_pitch: f64,
        wall_thickness: f64,
        speck_count: usize,
        speck_seed: u64,
    ) -> Self {
        Self {
            polygon: preset.polygon(image_size.0, image_size.1),
            cell_pitch,
            wall_thickness,
            image_size,
            speck_count,
            speck_seed,
            wall_luminance: DEFAULT_WALL_LUMINANCE,
            background_luminance: DEFAULT_BACKGROUND_LUMINANCE,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let (w, h) = self.image_size;
        if w == 0 || h == 0 {
            return Err(ImageError::ZeroDimension {
                width: w,
                height: h,
            }
            .into());
        }
        if self.cell_pitch.is_nan() || self.cell_pitch < 1.0 {
            return Err(SynthError::InvalidPitch);
        }
        if self.wall_thickness.is_nan() || self.wall_thickness < 1.0 {
            return Err(SynthError::InvalidWall);
        }
        if self.wall_luminance <= self.background_luminance {
            return Err(SynthError::Luminance {
                wall: self.wall_luminance,
                background: self.background_luminance,
            });
        }
        validate_polygon(&self.polygon, self.image_size)
    }
}

/// Checks that `polygon` has at least three vertices, lies inside the image
/// and does not touch or cross itself.
pub fn validate_polygon(polygon: &[Point], (w, h): (usize, usize)) -> Result<(), SynthError> {
    let n = polygon.len();
    if n < 3 {
        return Err(SynthError::TooFewVertices(n));
    }
    for p in polygon {
        if p.x < 0 || p.y < 0 || p.x >= w as i64 || p.y >= h as i64 {
            return Err(SynthError::OutOfBounds {
                x: p.x,
                y: p.y,
                width: w,
                height: h,
            });
        }
    }
    let edge = |i: usize| (polygon[i], polygon[(i + 1) % n]);
    for i in 0..n {
        let (a, b) = edge(i);
        if a == b {
            return Err(SynthError::DegenerateEdge(i));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = edge(i);
            let (c, d) = edge(j);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Adjacent edges share one vertex; they must not fold back
                // onto each other.
                let (shared, other_i, other_j) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                if cross(shared, other_i, other_j) == 0 && dot(shared, other_i, other_j) > 0 {
                    return Err(SynthError::SelfIntersecting(i, j));
                }
            } else if segments_touch(a, b, c, d) {
                return Err(SynthError::SelfIntersecting(i, j));
            }
        }
    }
    Ok(())
}

fn cross(o: Point, a: Point, b: Point) -> i128 {
    i128::from(a.x - o.x) * i128::from(b.y - o.y) - i128::from(a.y - o.y) * i128::from(b.x - o.x)
}

fn dot(o: Point, a: Point, b: Point) -> i128 {
    i128::from(a.x - o.x) * i128::from(b.x - o.x) + i128::from(a.y - o.y) * i128::from(b.y - o.y)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    cross(a, b, p) == 0
        && p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
}

fn segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(a, b, c).signum();
    let d2 = cross(a, b, d).signum();
    let d3 = cross(c, d, a).signum();
    let d4 = cross(c, d, b).signum();
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

/// Ground-truth mask of a synthetic blank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub mask: BinaryImage,
}

/// Deterministic 64-bit linear congruential generator.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(LCG_MUL).wrapping_add(LCG_INC);
        self.state
    }

    /// High 32 bits of the next state, reduced modulo `bound`.
    pub fn below(&mut self, bound: usize) -> usize {
        ((self.next_u64() >> 32) % bound as u64) as usize
    }
}

/// Pointy-top hexagonal lattice with a cell centre at `origin`.
struct HexLattice {
    origin: (f64, f64),
    pitch: f64,
    row_height: f64,
    half_sqrt3: f64,
}

impl HexLattice {
    fn new(origin: (f64, f64), pitch: f64) -> Self {
        let half_sqrt3 = 3f64.sqrt() / 2.0;
        Self {
            origin,
            pitch,
            row_height: pitch * half_sqrt3,
            half_sqrt3,
        }
    }

    /// Signed distance from `(x, y)` to the boundary of the cell containing
    /// it, measured inward.
    fn depth(&self, x: f64, y: f64) -> f64 {
        let dy = y - self.origin.1;
        let dx = x - self.origin.0;
        let j0 = (dy / self.row_height).floor() as i64;
        let apothem = self.pitch / 2.0;
        let mut best = f64::NEG_INFINITY;
        for j in j0 - 1..=j0 + 2 {
            let offset = if j.rem_euclid(2) == 1 {
                self.pitch / 2.0
            } else {
                0.0
            };
            let cy = j as f64 * self.row_height;
            let i0 = ((dx - offset) / self.pitch).floor() as i64;
            for i in i0 - 1..=i0 + 2 {
                let cx = i as f64 * self.pitch + offset;
                let u = dx - cx;
                let v = dy - cy;
                let r = u
                    .abs()
                    .max((u / 2.0 + v * self.half_sqrt3).abs())
                    .max((u / 2.0 - v * self.half_sqrt3).abs());
                best = best.max(apothem - r);
            }
        }
        best
    }
}

/// Renders a synthetic blank and its ground-truth mask.
pub fn generate(spec: &ShapeSpec) -> Result<(GrayImage, GroundTruth), SynthError> {
    spec.validate()?;
    let (w, h) = spec.image_size;
    let mask = rasterize_polygon(&spec.polygon, (w, h));

    let min_x = spec.polygon.iter().map(|p| p.x).min().unwrap_or(0);
    let min_y = spec.polygon.iter().map(|p| p.y).min().unwrap_or(0);
    // The top corner of one cell sits on the bounding-box origin.
    let circumradius = spec.cell_pitch / 3f64.sqrt();
    let lattice = HexLattice::new((min_x as f64, min_y as f64 + circumradius), spec.cell_pitch);
    let band = SEAM_HALF..SEAM_HALF + spec.wall_thickness;

    let mut image = GrayImage::filled(w, h, spec.background_luminance)?;
    for y in 0..h {
        for x in 0..w {
            if mask.is_white(x, y) && band.contains(&lattice.depth(x as f64, y as f64)) {
                image.set(x, y, spec.wall_luminance);
            }
        }
    }

    if spec.speck_count > 0 {
        place_specks(spec, &mask, &mut image)?;
    }
    Ok((image, GroundTruth { mask }))
}

fn place_specks(
    spec: &ShapeSpec,
    mask: &BinaryImage,
    image: &mut GrayImage,
) -> Result<(), SynthError> {
    let (w, h) = spec.image_size;
    let mut rng = Lcg::new(spec.speck_seed);
    let mut placed: Vec<(i64, i64)> = Vec::with_capacity(spec.speck_count);
    let max_attempts = 1000 * spec.speck_count + 10_000;
    let near_mask =
        |x: i64, y: i64| (-1..=1).any(|dy| (-1..=1).any(|dx| mask.is_white_at(x + dx, y + dy)));
    for _ in 0..max_attempts {
        if placed.len() == spec.speck_count {
            break;
        }
        let x = rng.below(w) as i64;
        let y = rng.below(h) as i64;
        if near_mask(x, y)
            || placed
                .iter()
                .any(|&(px, py)| (px - x).abs() <= 1 && (py - y).abs() <= 1)
        {
            continue;
        }
        placed.push((x, y));
    }
    if placed.len() < spec.speck_count {
        return Err(SynthError::SpeckPlacement {
            requested: spec.speck_count,
            placed: placed.len(),
        });
    }
    for (x, y) in placed {
        image.set(x as usize, y as usize, spec.wall_luminance);
    }
    Ok(())
}

/// Pixel-centre even-odd fill of a closed polygon whose vertices are pixel
/// coordinates. Pixels lying exactly on an edge count as inside. A polygon
/// with fewer than three distinct vertices has no interior and yields only
/// the pixels on its segments.
pub fn rasterize_polygon(points: &[Point], (w, h): (usize, usize)) -> BinaryImage {
    let mut out = BinaryImage::black(w.max(1), h.max(1)).expect("nonzero size");
    let n = points.len();
    if n == 0 {
        return out;
    }
    let mut distinct = points.to_vec();
    distinct.sort_unstable();
    distinct.dedup();

    if distinct.len() >= 3 {
        let mut toggles = vec![false; w];
        for y in 0..h as i64 {
            toggles.iter_mut().for_each(|t| *t = false);
            let mut any = false;
            for i in 0..n {
                let a = points[i];
                let b = points[(i + 1) % n];
                if (a.y > y) == (b.y > y) {
                    continue;
                }
                // Crossing at x = num / den; pixels with x < num / den lie left of it.
                let mut num = i128::from(a.x) * i128::from(b.y - a.y)
                    + i128::from(y - a.y) * i128::from(b.x - a.x);
                let mut den = i128::from(b.y - a.y);
                if den < 0 {
                    num = -num;
                    den = -den;
                }
                let last_left = (num - 1).div_euclid(den);
                if last_left >= 0 {
                    let idx = (last_left as usize).min(w - 1);
                    toggles[idx] = !toggles[idx];
                    any = true;
                }
            }
            if !any {
                continue;
            }
            let mut inside = false;
            for x in (0..w).rev() {
                inside ^= toggles[x];
                if inside {
                    out.set_white(x, y as usize);
                }
            }
        }
    }

    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let g = gcd(dx.unsigned_abs(), dy.unsigned_abs()).max(1) as i64;
        let (sx, sy) = (dx / g, dy / g);
        for k in 0..=g {
            let (x, y) = (a.x + k * sx, a.y + k * sy);
            if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
                out.set_white(x as usize, y as usize);
            }
        }
    }
    out
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Filled mask of a detected contour, comparable with [`GroundTruth::mask`].
pub fn rasterize_contour(contour: &Contour, size: (usize, usize)) -> BinaryImage {
    rasterize_polygon(&contour.points, size)
}

/// Intersection over union of the white sets; 1 when both are empty.
pub fn iou(a: &BinaryImage, b: &BinaryImage) -> Result<f64, MetricError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(MetricError::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&pa, &pb) in a.data().iter().zip(b.data()) {
        let (wa, wb) = (pa != 0, pb != 0);
        inter += usize::from(wa && wb);
        union += usize::from(wa || wb);
    }
    Ok(if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    })
}

fn fixed4<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    fixed(*v, 4, s)
}

fn fixed3<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    fixed(*v, 3, s)
}

fn fixed<S: Serializer>(v: f64, digits: usize, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::Error;
    let v = if v.is_finite() { v } else { 0.0 };
    let raw = serde_json::value::RawValue::from_string(format!("{v:.digits$}"))
        .map_err(S::Error::custom)?;
    raw.serialize(s)
}

/// Outcome of the direct-scan pipeline on one image.
#[derive(Debug, Clone, Serialize)]
pub struct DirectReport {
    #[serde(serialize_with = "fixed4")]
    pub iou: f64,
    #[serde(serialize_with = "fixed3")]
    pub ms: f64,
    pub rows: usize,
    pub points: usize,
    pub error: Option<String>,
    #[serde(skip)]
    pub contour: Option<Contour>,
}

/// Outcome of the sliding-matrix pipeline on one image.
#[derive(Debug, Clone, Serialize)]
pub struct SlidingReport {
    #[serde(serialize_with = "fixed4")]
    pub iou: f64,
    #[serde(serialize_with = "fixed3")]
    pub ms: f64,
    pub contours_found: usize,
    pub points: usize,
    pub error: Option<String>,
    #[serde(skip)]
    pub contour: Option<Contour>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReportParams {
    pub bin_threshold: u8,
    pub run_limit: usize,
    pub min_width: usize,
    pub core: usize,
    pub step: usize,
    pub fill_threshold: u8,
}

/// Side-by-side record of both detectors on the same image. No verdict.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub direct: DirectReport,
    pub sliding: SlidingReport,
    pub params: ReportParams,
}

impl ComparisonReport {
    /// Compact JSON with fixed key order and fixed float precision.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn median_time<T>(mut run: impl FnMut() -> T) -> (T, Duration) {
    let mut times = Vec::with_capacity(TIMING_RUNS);
    let mut last = None;
    for _ in 0..TIMING_RUNS {
        let start = Instant::now();
        let out = run();
        times.push(start.elapsed());
        last = Some(out);
    }
    times.sort_unstable();
    (last.expect("at least one run"), times[TIMING_RUNS / 2])
}

fn mask_iou(contour: &Contour, truth: &GroundTruth) -> f64 {
    let m = &truth.mask;
    let raster = rasterize_contour(contour, (m.width(), m.height()));
    iou(&raster, m).unwrap_or(0.0)
}

/// Runs both pipelines on `image`, timing each as the median of
/// [`TIMING_RUNS`] runs. A failing pipeline records its error and an IoU of
/// zero; the other one still runs.
pub fn compare(
    image: &GrayImage,
    truth: &GroundTruth,
    scan: &ScanParams,
    slide: &SlidingParams,
    bin_threshold: u8,
) -> ComparisonReport {
    let (direct_out, direct_time) = median_time(|| {
        let bin = binarize(image, bin_threshold);
        let edges = direct_scan(&bin, scan);
        let rows = edges.len();
        (rows, assemble_contour(&edges))
    });
    let (rows, direct_result) = direct_out;
    let direct = match direct_result {
        Ok(c) => DirectReport {
            iou: mask_iou(&c, truth),
            ms: millis(direct_time),
            rows,
            points: c.len(),
            error: None,
            contour: Some(c),
        },
        Err(e) => DirectReport {
            iou: 0.0,
            ms: millis(direct_time),
            rows,
            points: 0,
            error: Some(e.to_string()),
            contour: None,
        },
    };

    let (sliding_out, sliding_time) = median_time(|| {
        let bin = binarize(image, bin_threshold);
        let set = trace_external_contours(&sliding_fill(&bin, slide));
        let found = set.len();
        (found, largest_contour(&set).cloned())
    });
    let (contours_found, sliding_result) = sliding_out;
    let sliding = match sliding_result {
        Ok(c) => SlidingReport {
            iou: mask_iou(&c, truth),
            ms: millis(sliding_time),
            contours_found,
            points: c.len(),
            error: None,
            contour: Some(c),
        },
        Err(e) => SlidingReport {
            iou: 0.0,
            ms: millis(sliding_time),
            contours_found,
            points: 0,
            error: Some(e.to_string()),
            contour: None,
        },
    };

    ComparisonReport {
        direct,
        sliding,
        params: ReportParams {
            bin_threshold,
            run_limit: scan.run_limit(),
            min_width: scan.min_width(),
            core: slide.core(),
            step: slide.step(),
            fill_threshold: slide.fill_threshold(),
        },
    }
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}
