use std::fmt;
use std::io::Write;
use std::path::Path;

pub const FRAME_WIDTH: usize = 84;
pub const FRAME_HEIGHT: usize = 84;
pub const FRAME_CHANNELS: usize = 3;
pub const FRAME_BYTES: usize = FRAME_WIDTH * FRAME_HEIGHT * FRAME_CHANNELS;

pub type Rgb = [u8; 3];

/// 84x84 RGB image, row-major, 8 bits per channel.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    data: Box<[u8]>,
}

impl Frame {
    pub fn filled(color: Rgb) -> Self {
        let mut data = vec![0u8; FRAME_BYTES].into_boxed_slice();
        for px in data.chunks_exact_mut(3) {
            px.copy_from_slice(&color);
        }
        Self { data }
    }

    pub fn black() -> Self {
        Self { data: vec![0u8; FRAME_BYTES].into_boxed_slice() }
    }

    pub fn from_bytes(bytes: &[u8]) -> Option<Self> {
        (bytes.len() == FRAME_BYTES).then(|| Self { data: bytes.into() })
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Rgb {
        let i = (y * FRAME_WIDTH + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, color: Rgb) {
        let i = (y * FRAME_WIDTH + x) * 3;
        self.data[i..i + 3].copy_from_slice(&color);
    }

    /// Writes a pixel given signed coordinates; out-of-frame writes are dropped.
    #[inline]
    pub fn put(&mut self, x: i32, y: i32, color: Rgb) {
        if x >= 0 && y >= 0 && (x as usize) < FRAME_WIDTH && (y as usize) < FRAME_HEIGHT {
            self.set(x as usize, y as usize, color);
        }
    }

    pub fn pixels(&self) -> impl Iterator<Item = (usize, usize, Rgb)> + '_ {
        self.data.chunks_exact(3).enumerate().map(|(i, px)| {
            (i % FRAME_WIDTH, i / FRAME_WIDTH, [px[0], px[1], px[2]])
        })
    }

    /// 64-bit FNV-1a hash of the raw bytes.
    pub fn checksum(&self) -> u64 {
        fnv1a64(&self.data)
    }

    pub fn write_png(&self, path: impl AsRef<Path>) -> image::ImageResult<()> {
        image::save_buffer(
            path,
            &self.data,
            FRAME_WIDTH as u32,
            FRAME_HEIGHT as u32,
            image::ColorType::Rgb8,
        )
    }

    pub fn write_raw(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(&self.data)
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame({:016x})", self.checksum())
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn put_clips() {
        let mut f = Frame::black();
        f.put(-1, 0, [255; 3]);
        f.put(84, 83, [255; 3]);
        f.put(0, 84, [255; 3]);
        assert_eq!(f, Frame::black());
        f.put(83, 83, [1, 2, 3]);
        assert_eq!(f.get(83, 83), [1, 2, 3]);
        assert_eq!(&f.as_bytes()[FRAME_BYTES - 3..], &[1, 2, 3]);
    }

    #[test]
    fn png_export_roundtrips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.png");
        let mut f = Frame::filled([10, 20, 30]);
        f.set(5, 7, [200, 100, 0]);
        f.write_png(&path).unwrap();
        let img = image::open(&path).unwrap().to_rgb8();
        assert_eq!(img.as_raw().as_slice(), f.as_bytes());
    }
}
