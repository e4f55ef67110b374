//! Outer-contour extraction for honeycomb-block workpieces.
//!
//! A honeycomb block photographs as a lattice of bright cell walls on a dark
//! background, with no solid silhouette. Two detectors are provided:
//!
//! - [`scanline`]: per-row left/right edge search on the binarized image.
//!   Fast, single main parameter, convex blanks only.
//! - [`slidefill`]: a sliding window floods dense regions white, then the
//!   largest external border is traced. Handles concave blanks.
//!
//! [`imgio`] holds the raster types, PGM I/O and thresholding;
//! [`synthbench`] generates synthetic blanks with ground truth and compares
//! the detectors.

pub mod imgio;
pub mod scanline;
pub mod slidefill;
pub mod synthbench;

pub use imgio::{
    binarize, otsu_threshold, read_pgm, write_pgm, BinaryImage, GrayImage, ImageError,
};
pub use scanline::{
    assemble_contour, direct_scan, scan_row, Contour, Point, RowEdge, ScanError, ScanParams,
};
pub use slidefill::{
    contour_area, detect_sliding, largest_contour, sliding_fill, trace_external_contours,
    ContourSet, SlideError, SlidingParams,
};
pub use synthbench::{
    compare, generate, iou, rasterize_contour, ComparisonReport, GroundTruth, ShapePreset,
    ShapeSpec, SynthError,
};
