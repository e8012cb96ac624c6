//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use seamcarve::{DpTables, EnergyMap, Frame};

/// Minimum cost over every monotone 8-connected vertical seam, by exhaustive
/// enumeration. Sums are accumulated top to bottom.
pub fn brute_min_seam_cost(map: &EnergyMap) -> f64 {
    fn walk(map: &EnergyMap, x: usize, y: usize, acc: f64, best: &mut f64) {
        let acc = if y == 0 {
            map.get(x, 0)
        } else {
            acc + map.get(x, y)
        };
        if y + 1 == map.height() {
            if acc < *best {
                *best = acc;
            }
            return;
        }
        let lo = x.saturating_sub(1);
        let hi = (x + 1).min(map.width() - 1);
        for nx in lo..=hi {
            walk(map, nx, y + 1, acc, best);
        }
    }
    let mut best = f64::INFINITY;
    for x in 0..map.width() {
        walk(map, x, 0, 0.0, &mut best);
    }
    best
}

/// Count of monotone seams, for sanity checks on the enumeration.
pub fn seam_count(width: usize, height: usize) -> usize {
    let mut ways = vec![1usize; width];
    for _ in 1..height {
        ways = (0..width)
            .map(|x| {
                (x.saturating_sub(1)..=(x + 1).min(width - 1))
                    .map(|p| ways[p])
                    .sum()
            })
            .collect();
    }
    ways.iter().sum()
}

/// Sobel |Gx| + |Gy| by explicit 3x3 convolution with clamped coordinates.
pub fn direct_sobel(luma: &Frame) -> Vec<f64> {
    const KX: [[i32; 3]; 3] = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]];
    const KY: [[i32; 3]; 3] = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]];
    let (w, h) = luma.dimensions();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let (mut gx, mut gy) = (0i32, 0i32);
            for dy in -1..=1isize {
                for dx in -1..=1isize {
                    let sx = (x + dx).clamp(0, w as isize - 1) as usize;
                    let sy = (y + dy).clamp(0, h as isize - 1) as usize;
                    let v = i32::from(luma.pixel(sx, sy)[0]);
                    gx += KX[(dy + 1) as usize][(dx + 1) as usize] * v;
                    gy += KY[(dy + 1) as usize][(dx + 1) as usize] * v;
                }
            }
            out.push(f64::from((gx.abs() + gy.abs()).min(255)));
        }
    }
    out
}

/// Population std of one pixel across maps: mean first, then squared deviations.
pub fn two_pass_std(maps: &[EnergyMap], x: usize, y: usize) -> f64 {
    let t = maps.len() as f64;
    let mean = maps.iter().map(|m| m.get(x, y)).sum::<f64>() / t;
    (maps
        .iter()
        .map(|m| (m.get(x, y) - mean).powi(2))
        .sum::<f64>()
        / t)
        .sqrt()
}

/// Parent of every last-row column by walking the indicators one row at a time.
pub fn walk_labels(tables: &DpTables) -> Vec<usize> {
    (0..tables.width())
        .map(|end| {
            let mut x = end as isize;
            for y in (1..tables.height()).rev() {
                x += isize::from(tables.back(x as usize, y));
            }
            x as usize
        })
        .collect()
}

/// Random map: small integers (plenty of ties) or continuous values.
pub fn random_map(rng: &mut StdRng, width: usize, height: usize) -> EnergyMap {
    let ties = rng.gen_bool(0.5);
    let values = (0..width * height)
        .map(|_| {
            if ties {
                f64::from(rng.gen_range(0u8..10))
            } else {
                rng.gen_range(0.0..255.0)
            }
        })
        .collect();
    EnergyMap::new(width, height, values).unwrap()
}

pub fn random_frame(rng: &mut StdRng, width: usize, height: usize, channels: usize) -> Frame {
    let data = (0..width * height * channels).map(|_| rng.gen()).collect();
    Frame::new(width, height, channels, data).unwrap()
}
