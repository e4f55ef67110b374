#![allow(dead_code)]

use hcontour_core::BinaryImage;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Overlapping discs and boxes with salt-and-pepper noise, at most 64x64.
pub fn random_blob_image(rng: &mut ChaCha8Rng) -> BinaryImage {
    let w = rng.gen_range(1..=64);
    let h = rng.gen_range(1..=64);
    let mut white = vec![false; w * h];
    for _ in 0..rng.gen_range(1..=6) {
        let cx = rng.gen_range(0..w) as i64;
        let cy = rng.gen_range(0..h) as i64;
        let r = rng.gen_range(0..=12) as i64;
        let rect = rng.gen_bool(0.3);
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let inside = if rect {
                    (x - cx).abs() <= r && (y - cy).abs() <= r / 2
                } else {
                    (x - cx).pow(2) + (y - cy).pow(2) <= r * r
                };
                if inside {
                    white[y as usize * w + x as usize] = true;
                }
            }
        }
    }
    let noise = rng.gen_range(0.0..0.15);
    for px in white.iter_mut() {
        if rng.gen_bool(noise) {
            *px = !*px;
        }
    }
    BinaryImage::from_fn(w, h, |x, y| white[y * w + x]).unwrap()
}
