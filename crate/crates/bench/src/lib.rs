//! Fixed workloads shared by the criterion benches.

use hcontour_core::{binarize, generate, otsu_threshold, BinaryImage, ShapePreset, ShapeSpec};

/// Binarized synthetic blank at the given size, pitch 24, wall 2.
pub fn binarized_blank(preset: ShapePreset, size: (usize, usize)) -> BinaryImage {
    let spec = ShapeSpec::preset(preset, size, 24.0, 2.0, 50, 7);
    let (image, _) = generate(&spec).expect("preset spec is valid");
    binarize(&image, otsu_threshold(&image))
}
