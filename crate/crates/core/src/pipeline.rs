//! Image and video retargeting.
//!
//! Three modes: `Raw` removes one seam per DP pass, `Scpl` removes one
//! parent-labeled batch per pass, and `Buffered` groups video frames into
//! temporally stable runs that share one carve.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::bench::{jitter_from_pair_diffs, mean_abs_luma_diff, DEFAULT_JITTER_WINDOW};
use crate::energy::{
    gradient_energy, motion_energy, sobel_energy, to_luma, BlendWeights, EnergyMap,
};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::scpl::{
    carve_axis, remove_batch, BatchPolicy, EnergyTracker, GradientRefresh, SeamBatch,
};
use crate::seam_dp::Orientation;
use crate::temporal::{BufferPolicy, PushOutcome, SpatioTemporalBuffer};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Raw,
    Scpl,
    Buffered,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Raw => "raw",
            Mode::Scpl => "scpl",
            Mode::Buffered => "buffered",
        }
    }

    fn batch_policy(self) -> BatchPolicy {
        match self {
            Mode::Raw => BatchPolicy::Single,
            Mode::Scpl | Mode::Buffered => BatchPolicy::PerParent,
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "raw" => Ok(Mode::Raw),
            "scpl" => Ok(Mode::Scpl),
            "buffered" => Ok(Mode::Buffered),
            other => Err(format!(
                "unknown mode '{other}' (expected raw, scpl or buffered)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AxisOrder {
    #[default]
    WidthFirst,
    HeightFirst,
}

/// Energy used for the second and later batches of a buffered run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RunEnergy {
    /// Gradient energy of the run's carved first frame.
    #[default]
    Representative,
    /// Mean gradient energy over every carved frame of the run.
    Reaverage,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RetargetConfig {
    pub target_width: usize,
    pub target_height: usize,
    pub mode: Mode,
    pub policy: BufferPolicy,
    pub weights: BlendWeights,
    pub axis_order: AxisOrder,
    pub run_energy: RunEnergy,
}

impl RetargetConfig {
    pub fn new(target_width: usize, target_height: usize, mode: Mode) -> Self {
        RetargetConfig {
            target_width,
            target_height,
            mode,
            policy: BufferPolicy::default(),
            weights: BlendWeights::default(),
            axis_order: AxisOrder::default(),
            run_energy: RunEnergy::default(),
        }
    }

    pub fn with_policy(mut self, policy: BufferPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_weights(mut self, weights: BlendWeights) -> Self {
        self.weights = weights;
        self
    }

    /// Checks the targets against source dimensions; only reduction is supported.
    pub fn validate(&self, source: (usize, usize)) -> Result<()> {
        BlendWeights::new(self.weights.motion, self.weights.gradient)?;
        BufferPolicy::new(self.policy.alpha, self.policy.max_len)?;
        for (target, source_len) in [
            (self.target_width, source.0),
            (self.target_height, source.1),
        ] {
            if target < 1 || target > source_len {
                return Err(Error::InvalidTarget { target, source_len });
            }
        }
        Ok(())
    }

    fn axes(&self) -> [(Orientation, usize); 2] {
        let w = (Orientation::Vertical, self.target_width);
        let h = (Orientation::Horizontal, self.target_height);
        match self.axis_order {
            AxisOrder::WidthFirst => [w, h],
            AxisOrder::HeightFirst => [h, w],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunMetrics {
    /// Number of cumulative-energy computations.
    pub dp_passes: usize,
    /// Seconds spent carving.
    pub wall_time: f64,
    pub frames_out: usize,
    pub jitter: f64,
}

impl RunMetrics {
    /// Flat `key=value` report, one metric per line.
    pub fn to_report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "dp_passes={}", self.dp_passes);
        let _ = writeln!(s, "wall_time_s={:.6}", self.wall_time);
        let _ = writeln!(s, "frames_out={}", self.frames_out);
        let _ = writeln!(s, "jitter={:.6}", self.jitter);
        s
    }

    pub fn from_report(text: &str) -> Option<Self> {
        let mut m = RunMetrics::default();
        let mut seen = 0;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (key, value) = line.split_once('=')?;
            match key {
                "dp_passes" => m.dp_passes = value.parse().ok()?,
                "wall_time_s" => m.wall_time = value.parse().ok()?,
                "frames_out" => m.frames_out = value.parse().ok()?,
                "jitter" => m.jitter = value.parse().ok()?,
                _ => continue,
            }
            seen += 1;
        }
        (seen == 4).then_some(m)
    }
}

fn extent(frame: &Frame, orientation: Orientation) -> usize {
    match orientation {
        Orientation::Vertical => frame.width(),
        Orientation::Horizontal => frame.height(),
    }
}

/// Carves both axes; `initial` drives the first pass that removes anything.
fn carve_frame(
    frame: &Frame,
    initial: EnergyMap,
    config: &RetargetConfig,
    tracker: &mut dyn EnergyTracker,
) -> Result<(Frame, Vec<SeamBatch>)> {
    let mut current = frame.clone();
    let mut energy = Some(initial);
    let mut batches = Vec::new();
    for (orientation, target) in config.axes() {
        if extent(&current, orientation) == target {
            continue;
        }
        let (carved, applied) = carve_axis(
            &current,
            energy.take(),
            orientation,
            target,
            config.mode.batch_policy(),
            tracker,
        )?;
        current = carved;
        batches.extend(applied);
    }
    Ok((current, batches))
}

pub fn retarget_image(frame: &Frame, config: &RetargetConfig) -> Result<(Frame, RunMetrics)> {
    frame.ensure_carvable()?;
    config.validate(frame.dimensions())?;
    let start = Instant::now();
    let energy = gradient_energy(frame)?;
    let (out, batches) = carve_frame(frame, energy, config, &mut GradientRefresh)?;
    Ok((
        out,
        RunMetrics {
            dp_passes: batches.len(),
            wall_time: start.elapsed().as_secs_f64(),
            frames_out: 1,
            jitter: 0.0,
        },
    ))
}

/// Applies `batches` in order to every frame of a run.
pub fn replay_batches(run: &[Frame], batches: &[SeamBatch]) -> Result<Vec<Frame>> {
    run.par_iter()
        .map(|frame| {
            batches
                .iter()
                .try_fold(frame.clone(), |f, batch| remove_batch(&f, batch))
        })
        .collect()
}

/// Tracks every frame of a run and averages their gradient energy.
struct RunAverage {
    frames: Vec<Frame>,
}

impl EnergyTracker for RunAverage {
    fn removed(&mut self, batch: &SeamBatch) -> Result<()> {
        for frame in &mut self.frames {
            *frame = remove_batch(frame, batch)?;
        }
        Ok(())
    }

    fn energy(&mut self, _reference: &Frame) -> Result<EnergyMap> {
        let maps = self
            .frames
            .par_iter()
            .map(sobel_energy)
            .collect::<Result<Vec<_>>>()?;
        let (w, h) = maps[0].dimensions();
        let n = maps.len() as f64;
        let mut sum = vec![0.0; w * h];
        for m in &maps {
            sum.iter_mut().zip(m.values()).for_each(|(s, v)| *s += v);
        }
        EnergyMap::new(w, h, sum.into_iter().map(|s| s / n).collect())
    }
}

/// Incremental video retargeting; frames go in one at a time and come out
/// in order, possibly delayed until their run is fixed.
pub struct VideoRetargeter {
    config: RetargetConfig,
    dims: Option<(usize, usize)>,
    prev_luma: Option<Frame>,
    buffer: SpatioTemporalBuffer,
    dp_passes: usize,
    busy: Duration,
    frames_out: usize,
    last_out: Option<Frame>,
    pair_diffs: Vec<f64>,
}

impl VideoRetargeter {
    pub fn new(config: RetargetConfig) -> Self {
        VideoRetargeter {
            config,
            dims: None,
            prev_luma: None,
            buffer: SpatioTemporalBuffer::new(),
            dp_passes: 0,
            busy: Duration::ZERO,
            frames_out: 0,
            last_out: None,
            pair_diffs: Vec::new(),
        }
    }

    pub fn push(&mut self, frame: Frame) -> Result<Vec<Frame>> {
        match self.dims {
            None => {
                frame.ensure_carvable()?;
                self.config.validate(frame.dimensions())?;
                self.dims = Some(frame.dimensions());
            }
            Some(expected) if expected != frame.dimensions() => {
                return Err(Error::DimensionMismatch {
                    expected,
                    actual: frame.dimensions(),
                });
            }
            Some(_) => {}
        }

        let start = Instant::now();
        let luma = to_luma(&frame)?;
        // The first frame is its own predecessor: a zero motion term keeps
        // its energy on the same scale as the frames after it.
        let prev = self.prev_luma.as_ref().unwrap_or(&luma);
        let energy = motion_energy(&luma, Some(prev), self.config.weights)?;
        self.prev_luma = Some(luma);

        let out = match self.config.mode {
            Mode::Raw | Mode::Scpl => {
                let (carved, batches) =
                    carve_frame(&frame, energy, &self.config, &mut GradientRefresh)?;
                self.dp_passes += batches.len();
                vec![carved]
            }
            Mode::Buffered => match self.buffer.push(frame, energy, &self.config.policy)? {
                PushOutcome::Accepted => Vec::new(),
                PushOutcome::Flushed(run) => self.carve_run(run)?,
            },
        };
        self.busy += start.elapsed();
        self.record(&out);
        Ok(out)
    }

    /// Flushes the open buffer and returns the remaining frames with the run's metrics.
    pub fn finish(mut self) -> Result<(Vec<Frame>, RunMetrics)> {
        let start = Instant::now();
        let out = match self.buffer.take() {
            Some(run) => self.carve_run(run)?,
            None => Vec::new(),
        };
        self.busy += start.elapsed();
        self.record(&out);
        let metrics = RunMetrics {
            dp_passes: self.dp_passes,
            wall_time: self.busy.as_secs_f64(),
            frames_out: self.frames_out,
            jitter: jitter_from_pair_diffs(&self.pair_diffs, DEFAULT_JITTER_WINDOW),
        };
        Ok((out, metrics))
    }

    fn carve_run(&mut self, run: SpatioTemporalBuffer) -> Result<Vec<Frame>> {
        let uniform = run.uniform_energy()?;
        let reference = &run.frames()[0];
        let batches = match self.config.run_energy {
            RunEnergy::Representative => {
                carve_frame(reference, uniform, &self.config, &mut GradientRefresh)?.1
            }
            RunEnergy::Reaverage => {
                let mut tracker = RunAverage {
                    frames: run.frames().to_vec(),
                };
                carve_frame(reference, uniform, &self.config, &mut tracker)?.1
            }
        };
        self.dp_passes += batches.len();
        replay_batches(run.frames(), &batches)
    }

    fn record(&mut self, frames: &[Frame]) {
        for f in frames {
            if let Some(last) = &self.last_out {
                self.pair_diffs.push(mean_abs_luma_diff(last, f));
            }
            self.last_out = Some(f.clone());
        }
        self.frames_out += frames.len();
    }
}

/// Retargets a whole stream; output has one frame per input frame.
pub fn retarget_video<I>(frames: I, config: &RetargetConfig) -> Result<(Vec<Frame>, RunMetrics)>
where
    I: IntoIterator<Item = Frame>,
{
    let mut retargeter = VideoRetargeter::new(config.clone());
    let mut out = Vec::new();
    for frame in frames {
        out.extend(retargeter.push(frame)?);
    }
    let (tail, metrics) = retargeter.finish()?;
    out.extend(tail);
    Ok((out, metrics))
}
