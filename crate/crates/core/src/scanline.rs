//! Direct row scanning.
//!
//! Each row of a binarized image is walked left to right. A white pixel
//! opens a block segment; the segment stays open across black gaps as long
//! as no gap is longer than `run_limit`. The widest segment of the row gives
//! the row's left and right block edge, provided it is at least `min_width`
//! wide. Stacking the left edges top to bottom and the right edges bottom to
//! top gives the contour.
//!
//! Works well on convex blanks. Rows that cross two separate slices of a
//! concave blank keep only one of them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imgio::{BinaryImage, WHITE};

/// Integer pixel coordinate, origin top-left, y downward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

impl From<(i64, i64)> for Point {
    fn from((x, y): (i64, i64)) -> Self {
        Self { x, y }
    }
}

/// Closed polyline of pixel coordinates. The last point connects back to the
/// first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Contour {
    pub points: Vec<Point>,
}

impl Contour {
    pub fn new(points: Vec<Point>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Consecutive vertex pairs including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScanError {
    #[error("run_limit must be at least 1")]
    InvalidRunLimit,
    #[error("no contour points")]
    NoContourPoints,
    #[error("row edges must have strictly increasing y (row {prev} followed by {next})")]
    UnorderedRows { prev: usize, next: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanParams {
    run_limit: usize,
    min_width: usize,
}

impl ScanParams {
    /// `run_limit` is the longest black run tolerated inside the block;
    /// `min_width` is the narrowest accepted `right_x - left_x`.
    pub fn new(run_limit: usize, min_width: usize) -> Result<Self, ScanError> {
        if run_limit == 0 {
            return Err(ScanError::InvalidRunLimit);
        }
        Ok(Self {
            run_limit,
            min_width,
        })
    }

    /// Defaults: run limit twice the cell pitch when known, else 20; min width 10.
    pub fn default_for_pitch(pitch: Option<usize>) -> Self {
        let run_limit = pitch.map_or(20, |p| (2 * p).max(1));
        Self {
            run_limit,
            min_width: 10,
        }
    }

    pub fn run_limit(&self) -> usize {
        self.run_limit
    }

    pub fn min_width(&self) -> usize {
        self.min_width
    }
}

impl Default for ScanParams {
    fn default() -> Self {
        Self::default_for_pitch(None)
    }
}

/// Detected block boundary on one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowEdge {
    pub y: usize,
    pub left_x: usize,
    pub right_x: usize,
}

/// Returns `(left_x, right_x)` of the widest white segment of `row`, or
/// `None` when the row is empty of white or its widest segment is narrower
/// than `min_width`. Equal widths resolve to the leftmost segment.
pub fn scan_row(row: &[u8], params: &ScanParams) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut current: Option<(usize, usize)> = None;
    let mut black_run = 0usize;

    let close = |seg: (usize, usize), best: &mut Option<(usize, usize)>| {
        if best.is_none_or(|(l, r)| seg.1 - seg.0 > r - l) {
            *best = Some(seg);
        }
    };

    for (x, &px) in row.iter().enumerate() {
        if px == WHITE {
            current = match current {
                Some((left, _)) if black_run <= params.run_limit => Some((left, x)),
                Some(seg) => {
                    close(seg, &mut best);
                    Some((x, x))
                }
                None => Some((x, x)),
            };
            black_run = 0;
        } else {
            black_run += 1;
        }
    }
    if let Some(seg) = current {
        close(seg, &mut best);
    }
    best.filter(|(l, r)| r - l >= params.min_width)
}

/// Runs [`scan_row`] over every row, keeping accepted rows in increasing `y`.
pub fn direct_scan(image: &BinaryImage, params: &ScanParams) -> Vec<RowEdge> {
    (0..image.height())
        .filter_map(|y| {
            scan_row(image.row(y), params).map(|(left_x, right_x)| RowEdge { y, left_x, right_x })
        })
        .collect()
}

/// Left edges downward, then right edges upward. Repeated consecutive
/// points (including across the closing edge) are collapsed.
pub fn assemble_contour(edges: &[RowEdge]) -> Result<Contour, ScanError> {
    if edges.is_empty() {
        return Err(ScanError::NoContourPoints);
    }
    for pair in edges.windows(2) {
        if pair[1].y <= pair[0].y {
            return Err(ScanError::UnorderedRows {
                prev: pair[0].y,
                next: pair[1].y,
            });
        }
    }
    let lefts = edges
        .iter()
        .map(|e| Point::new(e.left_x as i64, e.y as i64));
    let rights = edges
        .iter()
        .rev()
        .map(|e| Point::new(e.right_x as i64, e.y as i64));
    let mut points: Vec<Point> = Vec::with_capacity(edges.len() * 2);
    for p in lefts.chain(rights) {
        if points.last() != Some(&p) {
            points.push(p);
        }
    }
    while points.len() > 1 && points.first() == points.last() {
        points.pop();
    }
    Ok(Contour::new(points))
}
