//! Spatiotemporal energy buffer.
//!
//! Consecutive frames accumulate in a buffer while the average per-pixel
//! temporal standard deviation of their energy maps (ASDE) stays within a
//! size-dependent threshold. A breach fixes the buffer as a run that is
//! carved with one shared set of seams.

use crate::energy::{EnergyMap, MAXVAL};
use crate::error::{Error, Result};
use crate::frame::Frame;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BufferPolicy {
    /// Fraction of the worst-case deviation tolerated; useful range is 0.15..=0.25.
    pub alpha: f64,
    pub maxval: f64,
    /// Hard cap on buffered frames.
    pub max_len: usize,
}

impl BufferPolicy {
    pub fn new(alpha: f64, max_len: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidPolicy("alpha must be positive"));
        }
        if max_len < 1 {
            return Err(Error::InvalidPolicy("max_len must be at least 1"));
        }
        Ok(BufferPolicy {
            alpha,
            maxval: MAXVAL,
            max_len,
        })
    }
}

impl Default for BufferPolicy {
    fn default() -> Self {
        BufferPolicy {
            alpha: 0.2,
            maxval: MAXVAL,
            max_len: 64,
        }
    }
}

/// ASDE threshold for a buffer of `n` frames.
///
/// `alpha` times the population std of a pixel that sits at zero for `n - 1`
/// frames and jumps to `maxval` once.
pub fn threshold(n: usize, policy: &BufferPolicy) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroBufferSize);
    }
    let n = n as f64;
    let mean = policy.maxval / n;
    let spread = (policy.maxval - mean).powi(2) + (n - 1.0) * mean.powi(2);
    Ok(policy.alpha * (spread / n).sqrt())
}

#[derive(Debug)]
pub enum PushOutcome {
    Accepted,
    /// The buffer's previous contents, fixed as one run. The buffer now
    /// holds only the pushed frame.
    Flushed(SpatioTemporalBuffer),
}

/// Frames and their energy maps with running per-pixel moments.
///
/// Moments are kept relative to the first map (`shift`) so that identical
/// maps give exactly zero deviation.
#[derive(Clone, Debug, Default)]
pub struct SpatioTemporalBuffer {
    frames: Vec<Frame>,
    maps: Vec<EnergyMap>,
    shift: Vec<f64>,
    dsum: Vec<f64>,
    dsum_sq: Vec<f64>,
}

impl SpatioTemporalBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn energy_maps(&self) -> &[EnergyMap] {
        &self.maps
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }

    pub fn dimensions(&self) -> Option<(usize, usize)> {
        self.maps.first().map(EnergyMap::dimensions)
    }

    /// Per-pixel sum of the buffered maps.
    pub fn sum(&self) -> Vec<f64> {
        let t = self.len() as f64;
        self.shift
            .iter()
            .zip(&self.dsum)
            .map(|(k, d)| t * k + d)
            .collect()
    }

    /// Per-pixel sum of squares of the buffered maps.
    pub fn sum_sq(&self) -> Vec<f64> {
        let t = self.len() as f64;
        self.shift
            .iter()
            .zip(&self.dsum)
            .zip(&self.dsum_sq)
            .map(|((k, d), q)| t * k * k + 2.0 * k * d + q)
            .collect()
    }

    fn check(&self, frame: &Frame, energy: &EnergyMap) -> Result<()> {
        if frame.dimensions() != energy.dimensions() {
            return Err(Error::DimensionMismatch {
                expected: frame.dimensions(),
                actual: energy.dimensions(),
            });
        }
        if let Some(expected) = self.dimensions() {
            if expected != energy.dimensions() {
                return Err(Error::DimensionMismatch {
                    expected,
                    actual: energy.dimensions(),
                });
            }
        }
        Ok(())
    }

    /// Appends unconditionally.
    pub fn insert(&mut self, frame: Frame, energy: EnergyMap) -> Result<()> {
        self.check(&frame, &energy)?;
        if self.is_empty() {
            let n = energy.values().len();
            self.shift = energy.values().to_vec();
            self.dsum = vec![0.0; n];
            self.dsum_sq = vec![0.0; n];
        } else {
            for ((v, k), (d, q)) in energy
                .values()
                .iter()
                .zip(&self.shift)
                .zip(self.dsum.iter_mut().zip(self.dsum_sq.iter_mut()))
            {
                let dev = v - k;
                *d += dev;
                *q += dev * dev;
            }
        }
        self.frames.push(frame);
        self.maps.push(energy);
        Ok(())
    }

    /// Population standard deviation of pixel `(x, y)` over the buffered maps.
    pub fn pixel_std(&self, x: usize, y: usize) -> Result<f64> {
        let (w, _) = self.dimensions().ok_or(Error::EmptyBuffer)?;
        let i = y * w + x;
        Ok(std_from_moments(
            self.dsum[i],
            self.dsum_sq[i],
            self.len() as f64,
        ))
    }

    /// Mean of [`pixel_std`](Self::pixel_std) over all pixels.
    pub fn asde(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyBuffer);
        }
        let t = self.len() as f64;
        let total: f64 = self
            .dsum
            .iter()
            .zip(&self.dsum_sq)
            .map(|(&d, &q)| std_from_moments(d, q, t))
            .sum();
        Ok(total / self.dsum.len() as f64)
    }

    /// ASDE of the buffer as if `energy` had been appended.
    fn asde_with(&self, energy: &EnergyMap) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let t = self.len() as f64 + 1.0;
        let total: f64 = energy
            .values()
            .iter()
            .zip(&self.shift)
            .zip(self.dsum.iter().zip(&self.dsum_sq))
            .map(|((v, k), (d, q))| {
                let dev = v - k;
                std_from_moments(d + dev, q + dev * dev, t)
            })
            .sum();
        total / self.shift.len() as f64
    }

    /// Offers a frame to the buffer.
    ///
    /// The frame is kept if the grown buffer's ASDE is within
    /// `threshold(n)` and `n <= max_len`. Otherwise the current contents are
    /// returned as a fixed run and the buffer restarts with this frame.
    pub fn push(
        &mut self,
        frame: Frame,
        energy: EnergyMap,
        policy: &BufferPolicy,
    ) -> Result<PushOutcome> {
        self.check(&frame, &energy)?;
        let n = self.len() + 1;
        let accept = n <= policy.max_len && self.asde_with(&energy) <= threshold(n, policy)?;
        if accept {
            self.insert(frame, energy)?;
            return Ok(PushOutcome::Accepted);
        }
        let run = std::mem::take(self);
        self.insert(frame, energy)?;
        Ok(PushOutcome::Flushed(run))
    }

    /// Empties the buffer, returning its contents if there were any.
    pub fn take(&mut self) -> Option<SpatioTemporalBuffer> {
        if self.is_empty() {
            None
        } else {
            Some(std::mem::take(self))
        }
    }

    /// Per-pixel mean of the buffered energy maps.
    pub fn uniform_energy(&self) -> Result<EnergyMap> {
        let (w, h) = self.dimensions().ok_or(Error::EmptyBuffer)?;
        let t = self.len() as f64;
        let values = self
            .shift
            .iter()
            .zip(&self.dsum)
            .map(|(k, d)| k + d / t)
            .collect();
        EnergyMap::new(w, h, values)
    }
}

fn std_from_moments(dsum: f64, dsum_sq: f64, t: f64) -> f64 {
    ((dsum_sq - dsum * dsum / t) / t).max(0.0).sqrt()
}
