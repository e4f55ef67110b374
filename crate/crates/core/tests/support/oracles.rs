//! Brute-force reference implementations used only by tests.
//!
//! Each oracle is written from the definition, without sharing code paths
//! with the library.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

/// Every maximal segment `(l, r)` of white pixels whose internal black gaps
/// are at most `run_limit`, enumerated from pairs of white columns. Picks the
/// widest (leftmost on ties) and applies the width filter.
pub fn scan_row_oracle(row: &[bool], run_limit: usize, min_width: usize) -> Option<(usize, usize)> {
    let whites: Vec<usize> = (0..row.len()).filter(|&x| row[x]).collect();
    let mut candidates = Vec::new();
    for &l in &whites {
        for &r in &whites {
            if r < l {
                continue;
            }
            let inside: Vec<usize> = whites
                .iter()
                .copied()
                .filter(|&x| x >= l && x <= r)
                .collect();
            let gaps_ok = inside.windows(2).all(|w| w[1] - w[0] - 1 <= run_limit);
            let left_closed = whites
                .iter()
                .filter(|&&x| x < l)
                .all(|&x| l - x - 1 > run_limit);
            let right_closed = whites
                .iter()
                .filter(|&&x| x > r)
                .all(|&x| x - r - 1 > run_limit);
            if gaps_ok && left_closed && right_closed {
                candidates.push((l, r));
            }
        }
    }
    let mut best: Option<(usize, usize)> = None;
    for (l, r) in candidates {
        match best {
            Some((bl, br)) if (r - l) < (br - bl) || ((r - l) == (br - bl) && l >= bl) => {}
            _ => best = Some((l, r)),
        }
    }
    best.filter(|(l, r)| r - l >= min_width)
}

/// Exact Otsu sweep: class split `<= t` vs `> t`, between-class variance
/// compared as exact fractions `(S0*n1 - S1*n0)^2 / (n0*n1)`.
pub fn otsu_oracle(pixels: &[u8]) -> u8 {
    let distinct: BTreeSet<u8> = pixels.iter().copied().collect();
    if distinct.len() == 1 {
        return *distinct.iter().next().unwrap();
    }
    // (numerator, denominator) of the variance score; empty class scores 0/1.
    let mut best: Option<(u8, u128, u128)> = None;
    for t in 0..=255u8 {
        let (mut n0, mut n1, mut s0, mut s1) = (0i128, 0i128, 0i128, 0i128);
        for &p in pixels {
            if p <= t {
                n0 += 1;
                s0 += i128::from(p);
            } else {
                n1 += 1;
                s1 += i128::from(p);
            }
        }
        let (num, den) = if n0 == 0 || n1 == 0 {
            (0u128, 1u128)
        } else {
            let d = s0 * n1 - s1 * n0;
            ((d * d) as u128, (n0 * n1) as u128)
        };
        let better = match best {
            None => true,
            Some((_, bn, bd)) => num * bd > bn * den,
        };
        if better {
            best = Some((t, num, den));
        }
    }
    best.unwrap().0
}

/// 8-connected white components, each as a sorted pixel list, in the order
/// a row-major scan meets them.
pub fn components_8(white: &[bool], w: usize, h: usize) -> Vec<Vec<(usize, usize)>> {
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !white[y * w + x] || seen[y * w + x] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([(x, y)]);
            seen[y * w + x] = true;
            while let Some((cx, cy)) = queue.pop_front() {
                comp.push((cx, cy));
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let nx = cx as i64 + dx;
                        let ny = cy as i64 + dy;
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let i = ny as usize * w + nx as usize;
                        if white[i] && !seen[i] {
                            seen[i] = true;
                            queue.push_back((nx as usize, ny as usize));
                        }
                    }
                }
            }
            comp.sort_by_key(|&(x, y)| (y, x));
            out.push(comp);
        }
    }
    out
}

/// True when every pixel outside `component` can reach the image exterior
/// through 4-connected non-component pixels.
pub fn is_hole_free(component: &[(usize, usize)], w: usize, h: usize) -> bool {
    // Pad by one pixel so the exterior is a single connected frame.
    let (pw, ph) = (w + 2, h + 2);
    let mut blocked = vec![false; pw * ph];
    for &(x, y) in component {
        blocked[(y + 1) * pw + x + 1] = true;
    }
    let mut reached = vec![false; pw * ph];
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    reached[0] = true;
    while let Some((x, y)) = queue.pop_front() {
        let nbrs = [
            (x.wrapping_sub(1), y),
            (x + 1, y),
            (x, y.wrapping_sub(1)),
            (x, y + 1),
        ];
        for (nx, ny) in nbrs {
            if nx >= pw || ny >= ph {
                continue;
            }
            let i = ny * pw + nx;
            if !blocked[i] && !reached[i] {
                reached[i] = true;
                queue.push_back((nx, ny));
            }
        }
    }
    (0..pw * ph).all(|i| blocked[i] || reached[i])
}

/// Count of white pixels in the intersection and union of two masks.
pub fn overlap_counts(a: &[bool], b: &[bool]) -> (usize, usize) {
    let inter = a.iter().zip(b).filter(|(x, y)| **x && **y).count();
    let union = a.iter().zip(b).filter(|(x, y)| **x || **y).count();
    (inter, union)
}
