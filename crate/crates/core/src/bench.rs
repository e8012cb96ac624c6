//! Synthetic corpora, mode comparisons and the temporal jitter metric.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::energy::to_luma;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::pipeline::{retarget_video, RetargetConfig, RunMetrics};

pub const DEFAULT_JITTER_WINDOW: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JitterReport {
    pub window: usize,
    pub value: f64,
}

/// Mean absolute per-pixel luma difference of two equally sized frames.
pub fn mean_abs_luma_diff(a: &Frame, b: &Frame) -> f64 {
    assert_eq!(
        a.dimensions(),
        b.dimensions(),
        "jitter needs equally sized frames"
    );
    let la = to_luma(a).expect("frames have 1 or 3 channels");
    let lb = to_luma(b).expect("frames have 1 or 3 channels");
    let total: u64 = la
        .data()
        .iter()
        .zip(lb.data())
        .map(|(&p, &q)| u64::from(p.abs_diff(q)))
        .sum();
    total as f64 / la.data().len() as f64
}

/// Windowed mean of consecutive-pair differences.
///
/// `diffs[k]` is the difference between frames `k` and `k + 1`. Each window
/// of `window` frames covers `window - 1` pairs; a stream shorter than one
/// window is a single window.
pub fn jitter_from_pair_diffs(diffs: &[f64], window: usize) -> f64 {
    if diffs.is_empty() {
        return 0.0;
    }
    let pairs = window.saturating_sub(1).clamp(1, diffs.len());
    let windows: Vec<f64> = diffs
        .windows(pairs)
        .map(|w| w.iter().sum::<f64>() / pairs as f64)
        .collect();
    windows.iter().sum::<f64>() / windows.len() as f64
}

pub fn jitter(frames: &[Frame], window: usize) -> Result<JitterReport> {
    if frames.len() < 2 {
        return Err(Error::TooFewFrames {
            needed: 2,
            got: frames.len(),
        });
    }
    let expected = frames[0].dimensions();
    if let Some(f) = frames.iter().find(|f| f.dimensions() != expected) {
        return Err(Error::DimensionMismatch {
            expected,
            actual: f.dimensions(),
        });
    }
    let diffs: Vec<f64> = frames
        .windows(2)
        .map(|p| mean_abs_luma_diff(&p[0], &p[1]))
        .collect();
    Ok(JitterReport {
        window,
        value: jitter_from_pair_diffs(&diffs, window),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyntheticKind {
    /// One noise frame repeated.
    Static,
    /// A bright box moving right by one pixel per frame over a fixed background.
    MovingBox,
    /// Global luma rising linearly and wrapping around, which forces buffer flushes.
    BrightnessRamp,
}

impl FromStr for SyntheticKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "static" => Ok(SyntheticKind::Static),
            "moving-box" => Ok(SyntheticKind::MovingBox),
            "brightness-ramp" => Ok(SyntheticKind::BrightnessRamp),
            other => Err(format!(
                "unknown corpus '{other}' (static, moving-box, brightness-ramp)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub seed: u64,
}

const RAMP_STEP: usize = 8;
const RAMP_PERIOD: usize = 128;

/// Smooth random color field with fine grain, a stand-in for natural images.
pub fn photo_like(width: usize, height: usize, seed: u64) -> Frame {
    const CELL: usize = 16;
    let mut rng = StdRng::seed_from_u64(seed);
    let gw = width / CELL + 2;
    let gh = height / CELL + 2;
    let grid: Vec<[f64; 3]> = (0..gw * gh)
        .map(|_| {
            [
                rng.gen_range(0.0..255.0),
                rng.gen_range(0.0..255.0),
                rng.gen_range(0.0..255.0),
            ]
        })
        .collect();
    let mut data = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        let gy = y / CELL;
        let ty = (y % CELL) as f64 / CELL as f64;
        for x in 0..width {
            let gx = x / CELL;
            let tx = (x % CELL) as f64 / CELL as f64;
            let at = |i: usize, j: usize| grid[j * gw + i];
            let (a, b, c, d) = (
                at(gx, gy),
                at(gx + 1, gy),
                at(gx, gy + 1),
                at(gx + 1, gy + 1),
            );
            for ch in 0..3 {
                let top = a[ch] + (b[ch] - a[ch]) * tx;
                let bottom = c[ch] + (d[ch] - c[ch]) * tx;
                let grain = rng.gen_range(-12.0..12.0);
                data.push(
                    (top + (bottom - top) * ty + grain)
                        .round()
                        .clamp(0.0, 255.0) as u8,
                );
            }
        }
    }
    Frame::rgb(width, height, data).expect("generated buffer has frame size")
}

fn box_size(spec: &SyntheticSpec) -> usize {
    (spec.width.min(spec.height) / 5).max(2)
}

/// Left column of the moving box in frame `t`.
pub fn box_column(spec: &SyntheticSpec, t: usize) -> usize {
    let span = spec.width.saturating_sub(box_size(spec)).max(1);
    t % span
}

pub fn generate(spec: &SyntheticSpec) -> Vec<Frame> {
    let base = photo_like(spec.width, spec.height, spec.seed);
    (0..spec.frames)
        .map(|t| match spec.kind {
            SyntheticKind::Static => base.clone(),
            SyntheticKind::MovingBox => {
                let size = box_size(spec);
                let x0 = box_column(spec, t);
                let y0 = (spec.height - size.min(spec.height)) / 2;
                let mut data = base.data().to_vec();
                for y in y0..(y0 + size).min(spec.height) {
                    for x in x0..(x0 + size).min(spec.width) {
                        let i = (y * spec.width + x) * 3;
                        data[i..i + 3].fill(255);
                    }
                }
                Frame::rgb(spec.width, spec.height, data).expect("same size as base")
            }
            SyntheticKind::BrightnessRamp => {
                let offset = (t * RAMP_STEP % RAMP_PERIOD) as u8;
                let data = base.data().iter().map(|&v| v / 2 + offset).collect();
                Frame::rgb(spec.width, spec.height, data).expect("same size as base")
            }
        })
        .collect()
}

/// Runs every variant over the same corpus.
pub fn compare(
    corpus: &[Frame],
    variants: &[(String, RetargetConfig)],
) -> Result<Vec<(String, RunMetrics)>> {
    variants
        .iter()
        .map(|(name, config)| {
            let (_, metrics) = retarget_video(corpus.iter().cloned(), config)?;
            Ok((name.clone(), metrics))
        })
        .collect()
}

/// One metrics block per variant, separated by blank lines.
pub fn format_comparison(rows: &[(String, RunMetrics)]) -> String {
    let mut out = String::new();
    for (i, (name, metrics)) in rows.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "variant={name}");
        out.push_str(&metrics.to_report());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(v: u8) -> Frame {
        Frame::filled(4, 3, 1, v).unwrap()
    }

    #[test]
    fn identical_frames_no_jitter() {
        let frames = vec![constant(9); 6];
        assert_eq!(jitter(&frames, 4).unwrap().value, 0.0);
    }

    #[test]
    fn alternating_frames() {
        let frames: Vec<Frame> = (0..7)
            .map(|i| constant(if i % 2 == 0 { 10 } else { 20 }))
            .collect();
        assert_eq!(jitter(&frames, 4).unwrap().value, 10.0);
    }

    #[test]
    fn single_window_by_hand() {
        let frames = vec![constant(0), constant(3), constant(3), constant(12)];
        // pairs: 3, 0, 9 -> one window, mean 4
        assert_eq!(jitter(&frames, 4).unwrap().value, 4.0);
    }

    #[test]
    fn sliding_windows_by_hand() {
        let frames = vec![
            constant(0),
            constant(4),
            constant(4),
            constant(4),
            constant(10),
        ];
        // pairs 4,0,0,6; windows (4,0,0) and (0,0,6) -> 4/3 and 2 -> 5/3
        let v = jitter(&frames, 4).unwrap().value;
        assert!((v - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_frames() {
        assert!(matches!(
            jitter(&[constant(1)], 4),
            Err(Error::TooFewFrames { .. })
        ));
    }

    fn spec(kind: SyntheticKind) -> SyntheticSpec {
        SyntheticSpec {
            kind,
            width: 40,
            height: 30,
            frames: 6,
            seed: 11,
        }
    }

    #[test]
    fn static_corpus_repeats() {
        let frames = generate(&spec(SyntheticKind::Static));
        assert!(frames.windows(2).all(|p| p[0] == p[1]));
    }

    #[test]
    fn box_moves_one_pixel() {
        let s = spec(SyntheticKind::MovingBox);
        let frames = generate(&s);
        for t in 0..5 {
            assert_eq!(box_column(&s, t + 1), box_column(&s, t) + 1);
        }
        let y = 15;
        let c = box_column(&s, 2);
        assert_eq!(frames[2].pixel(c, y), &[255, 255, 255]);
        assert_eq!(frames[3].pixel(c + 1, y), &[255, 255, 255]);
    }

    #[test]
    fn generation_is_deterministic() {
        for kind in [
            SyntheticKind::Static,
            SyntheticKind::MovingBox,
            SyntheticKind::BrightnessRamp,
        ] {
            assert_eq!(generate(&spec(kind)), generate(&spec(kind)));
        }
        let mut other = spec(SyntheticKind::Static);
        other.seed = 12;
        assert_ne!(generate(&other), generate(&spec(SyntheticKind::Static)));
    }
}
