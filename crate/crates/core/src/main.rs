use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};

use seamcarve::bench::{compare, format_comparison, generate, SyntheticKind, SyntheticSpec};
use seamcarve::media_io::{
    open_source, read_frames, write_frames, FrameSink, FrameSource, FrameWriter,
};
use seamcarve::pipeline::VideoRetargeter;
use seamcarve::{
    retarget_image, AxisOrder, BlendWeights, BufferPolicy, Error, Frame, Mode, RetargetConfig,
    RunEnergy,
};

/// Content-aware image and video retargeting by batched seam carving.
#[derive(Parser)]
#[command(name = "seamcarve", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Retarget a single PPM or PNG image.
    Image {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        carve: CarveArgs,
    },
    /// Retarget a frame directory, a concatenated PPM file, or `-` (stdin).
    Video {
        input: String,
        output: String,
        #[command(flatten)]
        carve: CarveArgs,
    },
    /// Compare raw, scpl and buffered modes on frames or a synthetic corpus
    /// (`synthetic:static`, `synthetic:moving-box`, `synthetic:brightness-ramp`).
    Bench {
        input: String,
        #[command(flatten)]
        carve: CarveArgs,
        /// Seed for synthetic corpora.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Frame count for synthetic corpora.
        #[arg(long, default_value_t = 64)]
        frames: usize,
        /// Frame size for synthetic corpora, WIDTHxHEIGHT.
        #[arg(long, default_value = "320x240")]
        size: String,
    },
}

#[derive(Args)]
struct CarveArgs {
    /// Target width in pixels.
    #[arg(long, conflicts_with = "scale")]
    width: Option<usize>,
    /// Target width as a fraction of the source width.
    #[arg(long)]
    scale: Option<f64>,
    /// Target height in pixels (default: unchanged).
    #[arg(long)]
    height: Option<usize>,
    /// raw, scpl or buffered.
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long = "motion-weight", default_value_t = 0.6)]
    motion_weight: f64,
    #[arg(long = "max-buffer", default_value_t = 64)]
    max_buffer: usize,
    /// Carve height before width.
    #[arg(long = "height-first")]
    height_first: bool,
    /// Recompute run energy from every carved frame instead of the first.
    #[arg(long)]
    reaverage: bool,
    /// Write a key=value metrics report here.
    #[arg(long)]
    metrics: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_io() {
            Failure::Run(e)
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl CarveArgs {
    fn config(
        &self,
        source: (usize, usize),
        default_mode: Mode,
    ) -> Result<RetargetConfig, Failure> {
        let target_width = match (self.width, self.scale) {
            (Some(w), _) => w,
            (None, Some(s)) if s > 0.0 && s.is_finite() => {
                ((source.0 as f64 * s).round() as usize).max(1)
            }
            (None, Some(s)) => return Err(Failure::Usage(format!("invalid --scale {s}"))),
            (None, None) => {
                return Err(Failure::Usage(
                    "one of --width or --scale is required".into(),
                ))
            }
        };
        let mut config = RetargetConfig::new(
            target_width,
            self.height.unwrap_or(source.1),
            self.mode.unwrap_or(default_mode),
        )
        .with_policy(BufferPolicy::new(self.alpha, self.max_buffer)?)
        .with_weights(BlendWeights::from_motion(self.motion_weight)?);
        if self.height_first {
            config.axis_order = AxisOrder::HeightFirst;
        }
        if self.reaverage {
            config.run_energy = RunEnergy::Reaverage;
        }
        config.validate(source)?;
        Ok(config)
    }

    fn require_target(&self) -> Result<(), Failure> {
        if self.width.is_none() && self.scale.is_none() {
            return Err(Failure::Usage(
                "one of --width or --scale is required".into(),
            ));
        }
        Ok(())
    }

    fn write_metrics(&self, report: &str) -> Result<(), Failure> {
        if let Some(path) = &self.metrics {
            fs::write(path, report).map_err(|e| {
                Failure::Run(Error::Path {
                    path: path.clone(),
                    message: e.to_string(),
                })
            })?;
        }
        Ok(())
    }
}

fn run_image(input: PathBuf, output: PathBuf, carve: &CarveArgs) -> Result<(), Failure> {
    carve.require_target()?;
    let frame = read_frames(&FrameSource::File(input.clone()))?
        .into_iter()
        .next()
        .ok_or_else(|| {
            Failure::Run(Error::Path {
                path: input,
                message: "no image data".into(),
            })
        })?;
    let config = carve.config(frame.dimensions(), Mode::Scpl)?;
    let (out, metrics) = retarget_image(&frame, &config)?;
    write_frames(&FrameSink::File(output), &[out])?;
    carve.write_metrics(&metrics.to_report())
}

fn run_video(input: &str, output: &str, carve: &CarveArgs) -> Result<(), Failure> {
    carve.require_target()?;
    let mut frames = open_source(&FrameSource::from_arg(input))?;
    let mut writer = FrameWriter::create(&FrameSink::from_arg(output))?;
    let Some(first) = frames.next().transpose()? else {
        return carve.write_metrics(&seamcarve::RunMetrics::default().to_report());
    };
    let config = carve.config(first.dimensions(), Mode::Buffered)?;
    let mut retargeter = VideoRetargeter::new(config);
    for frame in std::iter::once(Ok(first)).chain(frames) {
        for out in retargeter.push(frame?)? {
            writer.write(&out)?;
        }
    }
    let (tail, metrics) = retargeter.finish()?;
    for out in &tail {
        writer.write(out)?;
    }
    carve.write_metrics(&metrics.to_report())
}

fn parse_size(size: &str) -> Option<(usize, usize)> {
    let (w, h) = size.split_once('x')?;
    Some((w.parse().ok()?, h.parse().ok()?))
}

fn run_bench(
    input: &str,
    carve: &CarveArgs,
    seed: u64,
    count: usize,
    size: &str,
) -> Result<(), Failure> {
    carve.require_target()?;
    let corpus: Vec<Frame> = match input.strip_prefix("synthetic:") {
        Some(kind) => {
            let kind: SyntheticKind = kind.parse().map_err(Failure::Usage)?;
            let (width, height) = parse_size(size)
                .ok_or_else(|| Failure::Usage(format!("invalid --size '{size}'")))?;
            generate(&SyntheticSpec {
                kind,
                width,
                height,
                frames: count,
                seed,
            })
        }
        None => read_frames(&FrameSource::from_arg(input))?,
    };
    let Some(first) = corpus.first() else {
        return Err(Failure::Usage("bench corpus is empty".into()));
    };
    let base = carve.config(first.dimensions(), Mode::Buffered)?;
    let variants: Vec<(String, RetargetConfig)> = [Mode::Raw, Mode::Scpl, Mode::Buffered]
        .into_iter()
        .map(|mode| {
            let mut config = base.clone();
            config.mode = mode;
            (mode.as_str().to_string(), config)
        })
        .collect();
    let report = format_comparison(&compare(&corpus, &variants)?);
    print!("{report}");
    carve.write_metrics(&report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };

    let result = match cli.command {
        Command::Image {
            input,
            output,
            carve,
        } => run_image(input, output, &carve),
        Command::Video {
            input,
            output,
            carve,
        } => run_video(&input, &output, &carve),
        Command::Bench {
            input,
            carve,
            seed,
            frames,
            size,
        } => run_bench(&input, &carve, seed, frames, &size),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("{}", Cli::command().render_usage());
            ExitCode::from(1)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
