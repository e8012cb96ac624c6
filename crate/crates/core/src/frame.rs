use crate::error::{Error, Result};

/// A row-major grid of 8-bit pixels, either luma (1 channel) or RGB (3 channels).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl Frame {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::UnsupportedChannels(channels));
        }
        if data.len() != width * height * channels {
            return Err(Error::DataLength {
                width,
                height,
                channels,
                actual: data.len(),
            });
        }
        Ok(Frame {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Result<Self> {
        Frame::new(
            width,
            height,
            channels,
            vec![value; width * height * channels],
        )
    }

    pub fn luma(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        Frame::new(width, height, 1, data)
    }

    pub fn rgb(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        Frame::new(width, height, 3, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn row(&self, y: usize) -> &[u8] {
        let stride = self.width * self.channels;
        &self.data[y * stride..(y + 1) * stride]
    }

    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let start = (y * self.width + x) * self.channels;
        &self.data[start..start + self.channels]
    }

    /// Carving needs a full 3x3 Sobel neighborhood.
    pub fn ensure_carvable(&self) -> Result<()> {
        if self.width < 3 || self.height < 3 {
            return Err(Error::FrameTooSmall {
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }
}
