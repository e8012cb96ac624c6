//! Luma conversion and per-pixel saliency maps.
//!
//! Gradient energy is the L1 Sobel magnitude with edge-replicated borders.
//! Motion energy blends the absolute luma difference to the previous frame
//! with the gradient term. Every map is clamped to `[0, MAXVAL]`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::Frame;

/// Ceiling of every energy map.
pub const MAXVAL: f64 = 255.0;

const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Per-pixel non-negative energies, row-major, same dimensions as the source frame.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl EnergyMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::DataLength {
                width,
                height,
                channels: 1,
                actual: values.len(),
            });
        }
        Ok(EnergyMap {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        EnergyMap {
            width,
            height,
            values: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.values[y * self.width..(y + 1) * self.width]
    }

    pub fn maxval(&self) -> f64 {
        MAXVAL
    }

    pub fn transposed(&self) -> EnergyMap {
        let (w, h) = (self.width, self.height);
        let mut values = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                values[x * h + y] = self.values[y * w + x];
            }
        }
        EnergyMap {
            width: h,
            height: w,
            values,
        }
    }
}

/// Converts RGB to luma with BT.601 weights; luma frames pass through unchanged.
pub fn to_luma(frame: &Frame) -> Result<Frame> {
    match frame.channels() {
        1 => Ok(frame.clone()),
        3 => {
            let data = frame
                .data()
                .chunks_exact(3)
                .map(|p| {
                    let y = LUMA_WEIGHTS[0] * f64::from(p[0])
                        + LUMA_WEIGHTS[1] * f64::from(p[1])
                        + LUMA_WEIGHTS[2] * f64::from(p[2]);
                    y.round().clamp(0.0, 255.0) as u8
                })
                .collect();
            Frame::luma(frame.width(), frame.height(), data)
        }
        c => Err(Error::UnsupportedChannels(c)),
    }
}

/// `(|Gx| + |Gy|)` of the 3x3 Sobel operator, clamped to `MAXVAL`.
///
/// RGB input is converted to luma first.
pub fn gradient_energy(frame: &Frame) -> Result<EnergyMap> {
    frame.ensure_carvable()?;
    sobel_energy(frame)
}

/// Same as [`gradient_energy`] without the size check; edge replication
/// keeps it defined for frames narrower than the kernel, which happens
/// when carving down to a target below 3.
pub(crate) fn sobel_energy(frame: &Frame) -> Result<EnergyMap> {
    let luma = to_luma(frame)?;
    let (w, h) = luma.dimensions();
    let px = luma.data();
    let mut values = vec![0.0; w * h];

    values.par_chunks_mut(w).enumerate().for_each(|(y, out)| {
        let up = &px[y.saturating_sub(1) * w..][..w];
        let mid = &px[y * w..][..w];
        let down = &px[(y + 1).min(h - 1) * w..][..w];
        for (x, e) in out.iter_mut().enumerate() {
            let l = x.saturating_sub(1);
            let r = (x + 1).min(w - 1);
            let at = |row: &[u8], i: usize| i32::from(row[i]);
            let gx = (at(up, r) + 2 * at(mid, r) + at(down, r))
                - (at(up, l) + 2 * at(mid, l) + at(down, l));
            let gy = (at(down, l) + 2 * at(down, x) + at(down, r))
                - (at(up, l) + 2 * at(up, x) + at(up, r));
            *e = f64::from((gx.abs() + gy.abs()).min(255));
        }
    });

    EnergyMap::new(w, h, values)
}

/// Relative importance of the temporal difference and the spatial gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlendWeights {
    pub motion: f64,
    pub gradient: f64,
}

impl BlendWeights {
    pub fn new(motion: f64, gradient: f64) -> Result<Self> {
        let ok = motion >= 0.0 && gradient >= 0.0 && ((motion + gradient) - 1.0).abs() <= 1e-9;
        if !ok {
            return Err(Error::InvalidWeights { motion, gradient });
        }
        Ok(BlendWeights { motion, gradient })
    }

    /// Motion weight `m` with gradient weight `1 - m`.
    pub fn from_motion(motion: f64) -> Result<Self> {
        BlendWeights::new(motion, 1.0 - motion)
    }
}

impl Default for BlendWeights {
    fn default() -> Self {
        BlendWeights {
            motion: 0.6,
            gradient: 0.4,
        }
    }
}

/// Motion-aware saliency: `w_motion * |luma(curr) - luma(prev)| + w_grad * gradient(curr)`.
///
/// Without a predecessor the result is the plain gradient map.
pub fn motion_energy(
    curr: &Frame,
    prev: Option<&Frame>,
    weights: BlendWeights,
) -> Result<EnergyMap> {
    BlendWeights::new(weights.motion, weights.gradient)?;
    let gradient = gradient_energy(curr)?;
    let Some(prev) = prev else {
        return Ok(gradient);
    };
    if prev.dimensions() != curr.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: curr.dimensions(),
            actual: prev.dimensions(),
        });
    }
    let a = to_luma(curr)?;
    let b = to_luma(prev)?;
    let values = a
        .data()
        .iter()
        .zip(b.data())
        .zip(gradient.values())
        .map(|((&p, &q), &g)| {
            let diff = f64::from(p.abs_diff(q));
            (weights.motion * diff + weights.gradient * g).clamp(0.0, MAXVAL)
        })
        .collect();
    EnergyMap::new(curr.width(), curr.height(), values)
}
