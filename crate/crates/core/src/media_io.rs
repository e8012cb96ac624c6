//! Frame sources and sinks: PPM/PGM files, PNG files, numbered image
//! directories and concatenated binary PPM streams.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageFormat};

use crate::error::{Error, Result};
use crate::frame::Frame;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameSource {
    /// A single PNG, or a PPM file holding one or more back-to-back records.
    File(PathBuf),
    /// Image files ordered by the numeric index in their names.
    Directory(PathBuf),
    /// Concatenated PPM records on standard input.
    Stdin,
}

impl FrameSource {
    /// `-` is standard input; an existing directory is a directory source.
    pub fn from_arg(arg: &str) -> Self {
        if arg == "-" {
            FrameSource::Stdin
        } else if Path::new(arg).is_dir() {
            FrameSource::Directory(arg.into())
        } else {
            FrameSource::File(arg.into())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameSink {
    /// PNG (single frame) or PPM (records concatenated), chosen by extension.
    File(PathBuf),
    /// Numbered `frame_NNNNNN.ppm` files.
    Directory(PathBuf),
    Stdout,
}

impl FrameSink {
    /// `-` is standard output; an existing directory or a path without an
    /// extension is a directory sink.
    pub fn from_arg(arg: &str) -> Self {
        let path = Path::new(arg);
        if arg == "-" {
            FrameSink::Stdout
        } else if path.is_dir() || path.extension().is_none() {
            FrameSink::Directory(arg.into())
        } else {
            FrameSink::File(arg.into())
        }
    }
}

fn is_png(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

fn path_error(path: &Path, err: impl std::fmt::Display) -> Error {
    Error::Path {
        path: path.to_path_buf(),
        message: err.to_string(),
    }
}

/// Reads whitespace-separated header tokens, skipping `#` comments.
fn header_token<R: BufRead>(reader: &mut R, index: usize) -> Result<usize> {
    let mut token = Vec::new();
    loop {
        let mut byte = [0u8];
        if reader.read(&mut byte)? == 0 {
            return Err(Error::format(index, "truncated header"));
        }
        match byte[0] {
            b'#' if token.is_empty() => {
                let mut skip = Vec::new();
                reader.read_until(b'\n', &mut skip)?;
            }
            b if b.is_ascii_whitespace() => {
                if !token.is_empty() {
                    break;
                }
            }
            b if b.is_ascii_digit() => token.push(b),
            b => {
                return Err(Error::format(
                    index,
                    format!("unexpected byte 0x{b:02x} in header"),
                ))
            }
        }
    }
    std::str::from_utf8(&token)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::format(index, "header value out of range"))
}

/// Iterator over back-to-back binary PPM (P6) or PGM (P5) records.
///
/// All records must share dimensions.
pub struct PpmReader<R> {
    reader: R,
    index: usize,
    dims: Option<(usize, usize)>,
    done: bool,
}

impl<R: BufRead> PpmReader<R> {
    pub fn new(reader: R) -> Self {
        PpmReader {
            reader,
            index: 0,
            dims: None,
            done: false,
        }
    }

    fn next_record(&mut self) -> Result<Option<Frame>> {
        // Skip inter-record whitespace; end of input here is a clean end.
        loop {
            let buf = self.reader.fill_buf()?;
            match buf.first() {
                None => return Ok(None),
                Some(b) if b.is_ascii_whitespace() => self.reader.consume(1),
                Some(_) => break,
            }
        }
        let index = self.index;
        let mut magic = [0u8; 2];
        self.reader
            .read_exact(&mut magic)
            .map_err(|_| Error::format(index, "truncated magic number"))?;
        let channels = match &magic {
            b"P6" => 3,
            b"P5" => 1,
            _ => return Err(Error::format(index, "not a binary PPM/PGM record")),
        };
        let mut byte = [0u8];
        if self.reader.read(&mut byte)? == 0 || !byte[0].is_ascii_whitespace() {
            return Err(Error::format(
                index,
                "missing whitespace after magic number",
            ));
        }
        let width = header_token(&mut self.reader, index)?;
        let height = header_token(&mut self.reader, index)?;
        let maxval = header_token(&mut self.reader, index)?;
        if maxval != 255 {
            return Err(Error::format(index, format!("unsupported maxval {maxval}")));
        }
        if width == 0 || height == 0 {
            return Err(Error::format(index, "zero-sized frame"));
        }
        if let Some(expected) = self.dims {
            if expected != (width, height) {
                return Err(Error::format(
                    index,
                    format!(
                        "dimension change from {}x{} to {width}x{height}",
                        expected.0, expected.1
                    ),
                ));
            }
        }
        let mut data = vec![0u8; width * height * channels];
        self.reader
            .read_exact(&mut data)
            .map_err(|_| Error::format(index, "truncated pixel data"))?;
        self.dims = Some((width, height));
        self.index += 1;
        Frame::new(width, height, channels, data).map(Some)
    }
}

impl<R: BufRead> Iterator for PpmReader<R> {
    type Item = Result<Frame>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self.next_record().transpose();
        if !matches!(item, Some(Ok(_))) {
            self.done = true;
        }
        item
    }
}

/// Writes one binary record: P6 for RGB, P5 for luma.
pub fn write_ppm<W: Write>(writer: &mut W, frame: &Frame) -> io::Result<()> {
    let magic = if frame.channels() == 3 { "P6" } else { "P5" };
    write!(
        writer,
        "{magic}\n{} {}\n255\n",
        frame.width(),
        frame.height()
    )?;
    writer.write_all(frame.data())
}

pub fn decode_png(bytes: &[u8], index: usize) -> Result<Frame> {
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)
        .map_err(|e| Error::format(index, e.to_string()))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        DynamicImage::ImageLuma8(g) => Frame::luma(w, h, g.into_raw()),
        other => Frame::rgb(w, h, other.to_rgb8().into_raw()),
    }
}

pub fn write_png(path: &Path, frame: &Frame) -> Result<()> {
    let (w, h) = (frame.width() as u32, frame.height() as u32);
    let img = if frame.channels() == 1 {
        DynamicImage::ImageLuma8(
            image::GrayImage::from_raw(w, h, frame.data().to_vec()).expect("frame size"),
        )
    } else {
        DynamicImage::ImageRgb8(
            image::RgbImage::from_raw(w, h, frame.data().to_vec()).expect("frame size"),
        )
    };
    img.save_with_format(path, ImageFormat::Png)
        .map_err(|e| path_error(path, e))
}

/// Error indices are relative to the file; [`open_source`] rebases them.
fn read_file(path: &Path) -> Result<Vec<Frame>> {
    if is_png(path) {
        let bytes = fs::read(path).map_err(|e| path_error(path, e))?;
        return Ok(vec![decode_png(&bytes, 0)?]);
    }
    let file = File::open(path).map_err(|e| path_error(path, e))?;
    PpmReader::new(BufReader::new(file)).collect()
}

/// Numeric index embedded in a file name: the last run of digits in the stem.
fn frame_index(path: &Path) -> Option<u64> {
    let stem = path.file_stem()?.to_str()?;
    let end = stem.rfind(|c: char| c.is_ascii_digit())? + 1;
    let start = stem[..end]
        .rfind(|c: char| !c.is_ascii_digit())
        .map_or(0, |i| i + 1);
    stem[start..end].parse().ok()
}

fn directory_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| path_error(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension().and_then(|e| e.to_str()).is_some_and(|e| {
                    matches!(
                        e.to_ascii_lowercase().as_str(),
                        "ppm" | "pgm" | "pnm" | "png"
                    )
                })
        })
        .collect();
    entries.sort_by(|a, b| frame_index(a).cmp(&frame_index(b)).then_with(|| a.cmp(b)));
    Ok(entries)
}

pub type FrameStream = Box<dyn Iterator<Item = Result<Frame>>>;

/// Lazily decodes frames in index order, checking that dimensions never change.
pub fn open_source(source: &FrameSource) -> Result<FrameStream> {
    let raw: FrameStream = match source {
        FrameSource::File(path) if is_png(path) => Box::new(read_file(path)?.into_iter().map(Ok)),
        FrameSource::File(path) => {
            let file = File::open(path).map_err(|e| path_error(path, e))?;
            Box::new(PpmReader::new(BufReader::new(file)))
        }
        FrameSource::Stdin => Box::new(PpmReader::new(BufReader::new(io::stdin()))),
        FrameSource::Directory(dir) => {
            let paths = directory_entries(dir)?;
            Box::new(paths.into_iter().flat_map(|path| match read_file(&path) {
                Ok(frames) => frames.into_iter().map(Ok).collect::<Vec<_>>(),
                Err(e) => vec![Err(e)],
            }))
        }
    };
    let mut dims = None;
    let mut failed = false;
    Ok(Box::new(raw.enumerate().map_while(move |(index, item)| {
        if failed {
            return None;
        }
        let checked = item
            .map_err(|e| match e {
                Error::Format { message, .. } => Error::format(index, message),
                other => other,
            })
            .and_then(|frame| match dims {
                Some((w, h)) if (w, h) != frame.dimensions() => Err(Error::format(
                    index,
                    format!(
                        "dimension change from {w}x{h} to {}x{}",
                        frame.width(),
                        frame.height()
                    ),
                )),
                _ => {
                    dims = Some(frame.dimensions());
                    Ok(frame)
                }
            });
        failed = checked.is_err();
        Some(checked)
    })))
}

pub fn read_frames(source: &FrameSource) -> Result<Vec<Frame>> {
    open_source(source)?.collect()
}

/// Streaming frame output; stream sinks are flushed after every frame.
pub struct FrameWriter {
    target: WriterTarget,
    count: usize,
}

enum WriterTarget {
    Stream(Box<dyn Write>),
    Png(PathBuf),
    Directory(PathBuf),
}

impl FrameWriter {
    pub fn create(sink: &FrameSink) -> Result<Self> {
        let target = match sink {
            FrameSink::Stdout => WriterTarget::Stream(Box::new(BufWriter::new(io::stdout()))),
            FrameSink::File(path) if is_png(path) => WriterTarget::Png(path.clone()),
            FrameSink::File(path) => {
                let file = File::create(path).map_err(|e| path_error(path, e))?;
                WriterTarget::Stream(Box::new(BufWriter::new(file)))
            }
            FrameSink::Directory(dir) => {
                fs::create_dir_all(dir).map_err(|e| path_error(dir, e))?;
                WriterTarget::Directory(dir.clone())
            }
        };
        Ok(FrameWriter { target, count: 0 })
    }

    /// Wraps an arbitrary writer as a concatenated-record stream.
    pub fn from_writer(writer: impl Write + 'static) -> Self {
        FrameWriter {
            target: WriterTarget::Stream(Box::new(writer)),
            count: 0,
        }
    }

    pub fn write(&mut self, frame: &Frame) -> Result<()> {
        match &mut self.target {
            WriterTarget::Stream(w) => {
                write_ppm(w, frame)?;
                w.flush()?;
            }
            WriterTarget::Png(path) => {
                if self.count > 0 {
                    return Err(path_error(path, "a PNG file holds a single frame"));
                }
                write_png(path, frame)?;
            }
            WriterTarget::Directory(dir) => {
                let path = dir.join(format!("frame_{:06}.ppm", self.count));
                let mut file =
                    BufWriter::new(File::create(&path).map_err(|e| path_error(&path, e))?);
                write_ppm(&mut file, frame)?;
                file.flush()?;
            }
        }
        self.count += 1;
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

pub fn write_frames(sink: &FrameSink, frames: &[Frame]) -> Result<()> {
    let mut writer = FrameWriter::create(sink)?;
    for frame in frames {
        writer.write(frame)?;
    }
    Ok(())
}
