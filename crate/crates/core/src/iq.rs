//! Binary IQ container and CSV interchange.
//!
//! Layout: the 8 bytes `CYCLOIQ1`, then `L`, `P`, `N`, `M` and a sample
//! format tag as little-endian `u32`, then `L·M·N·P` complex samples. Samples
//! are time-major with antennas interleaved inside each time step, and each
//! complex value is stored as real part followed by imaginary part.

use std::io::{BufRead, Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::transform::MultiChannel;

pub const MAGIC: &[u8; 8] = b"CYCLOIQ1";
pub const HEADER_LEN: usize = 8 + 5 * 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleFormat {
    /// Two `f32` per sample.
    Complex64,
    /// Two `f64` per sample.
    Complex128,
}

impl SampleFormat {
    fn tag(self) -> u32 {
        match self {
            SampleFormat::Complex64 => 0,
            SampleFormat::Complex128 => 1,
        }
    }

    fn from_tag(tag: u32) -> Result<Self> {
        match tag {
            0 => Ok(SampleFormat::Complex64),
            1 => Ok(SampleFormat::Complex128),
            other => Err(Error::Parse(format!("unknown sample format tag {other}"))),
        }
    }

    /// Bytes per complex sample.
    pub fn width(self) -> usize {
        match self {
            SampleFormat::Complex64 => 8,
            SampleFormat::Complex128 => 16,
        }
    }
}

impl std::str::FromStr for SampleFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex64" | "c64" => Ok(SampleFormat::Complex64),
            "complex128" | "c128" => Ok(SampleFormat::Complex128),
            other => Err(Error::InvalidSpec(format!("unknown sample format `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IqFileHeader {
    pub l: u32,
    pub p: u32,
    pub n: u32,
    pub m: u32,
    pub format: SampleFormat,
}

impl IqFileHeader {
    pub fn n_samples(&self) -> usize {
        self.m as usize * self.n as usize * self.p as usize
    }

    pub fn payload_len(&self) -> usize {
        self.l as usize * self.n_samples() * self.format.width()
    }

    fn encode(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..8].copy_from_slice(MAGIC);
        for (i, v) in [self.l, self.p, self.n, self.m, self.format.tag()].iter().enumerate() {
            out[8 + 4 * i..12 + 4 * i].copy_from_slice(&v.to_le_bytes());
        }
        out
    }

    fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Parse(format!("header needs {HEADER_LEN} bytes, file has {}", bytes.len())));
        }
        if &bytes[..8] != MAGIC {
            return Err(Error::Parse("bad magic, expected CYCLOIQ1".into()));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[8 + 4 * i..12 + 4 * i].try_into().expect("4 bytes"));
        let header = IqFileHeader { l: word(0), p: word(1), n: word(2), m: word(3), format: SampleFormat::from_tag(word(4))? };
        if [header.l, header.p, header.n, header.m].contains(&0) {
            return Err(Error::Parse("L, P, N and M must all be positive".into()));
        }
        Ok(header)
    }
}

/// Writes header and samples. `x` must hold exactly `M·N·P` samples per antenna.
pub fn write_iq<W: Write>(mut out: W, header: &IqFileHeader, x: &MultiChannel) -> Result<()> {
    if x.n_channels() != header.l as usize {
        return Err(Error::LengthMismatch { expected: header.l as usize, actual: x.n_channels() });
    }
    if x.len() != header.n_samples() {
        return Err(Error::LengthMismatch { expected: header.n_samples(), actual: x.len() });
    }
    let mut buf = Vec::with_capacity(HEADER_LEN + header.payload_len());
    buf.extend_from_slice(&header.encode());
    for z in x.to_interleaved() {
        match header.format {
            SampleFormat::Complex64 => {
                buf.extend_from_slice(&(z.re as f32).to_le_bytes());
                buf.extend_from_slice(&(z.im as f32).to_le_bytes());
            }
            SampleFormat::Complex128 => {
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
        }
    }
    out.write_all(&buf)?;
    Ok(())
}

/// Parses a complete IQ file. Short or over-long payloads are errors.
pub fn read_iq<R: Read>(mut input: R) -> Result<(IqFileHeader, MultiChannel)> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let header = IqFileHeader::decode(&bytes)?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != header.payload_len() {
        return Err(Error::Parse(format!("payload is {} bytes, header implies {}", payload.len(), header.payload_len())));
    }
    let w = header.format.width();
    let samples: Vec<Complex64> = payload
        .chunks_exact(w)
        .map(|c| match header.format {
            SampleFormat::Complex64 => Complex64::new(
                f32::from_le_bytes(c[..4].try_into().expect("4 bytes")) as f64,
                f32::from_le_bytes(c[4..].try_into().expect("4 bytes")) as f64,
            ),
            SampleFormat::Complex128 => Complex64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            ),
        })
        .collect();
    if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Parse("payload contains non-finite samples".into()));
    }
    Ok((header, MultiChannel::from_interleaved(header.l as usize, &samples)?))
}

/// Reads CSV with one time sample per row and columns `re_0,im_0,…,re_{L−1},im_{L−1}`.
/// A header row is skipped if its first field is not a number.
pub fn read_csv_samples<R: BufRead>(input: R) -> Result<MultiChannel> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
    let mut data = Vec::new();
    let mut width = None;
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("csv: {e}")))?;
        if row == 0 && rec.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if rec.len() % 2 != 0 || rec.is_empty() {
            return Err(Error::Parse(format!("row {}: expected an even number of columns, got {}", row + 1, rec.len())));
        }
        match width {
            None => width = Some(rec.len()),
            Some(w) if w != rec.len() => {
                return Err(Error::Parse(format!("row {}: expected {w} columns, got {}", row + 1, rec.len())))
            }
            _ => {}
        }
        let vals: Vec<f64> = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::Parse(format!("row {}: `{f}`: {e}", row + 1))))
            .collect::<Result<_>>()?;
        data.extend(vals.chunks(2).map(|p| Complex64::new(p[0], p[1])));
    }
    let w = width.ok_or(Error::EmptyInput("csv has no sample rows"))?;
    MultiChannel::from_interleaved(w / 2, &data)
}

pub fn write_csv_samples<W: Write>(out: W, x: &MultiChannel) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = (0..x.n_channels()).flat_map(|c| [format!("re_{c}"), format!("im_{c}")]).collect();
    w.write_record(&header).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    for t in 0..x.len() {
        let row: Vec<String> = (0..x.n_channels())
            .flat_map(|c| {
                let z = x.channel(c)[t];
                [z.re.to_string(), z.im.to_string()]
            })
            .collect();
        w.write_record(&row).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}
