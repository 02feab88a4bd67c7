//! Sample stream formats.
//!
//! Two on-disk encodings share the logical record `label[,camera],f1,...,fd`:
//!
//! * text CSV, with an optional header that is auto-detected by a non-numeric
//!   first token; a camera column is present when the header's second column
//!   is literally `camera` (headerless files carry no camera column);
//! * a binary format: magic `SODF`, `u32` record count, `u32` feature count,
//!   `u8` camera flag, then per record a little-endian `i32` label, an
//!   optional `i32` camera, and `d` little-endian `f64` features.
//!
//! The reader sniffs the magic bytes, so both formats can be consumed through
//! the same iterator without a format flag.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use soda_core::{Error, LabeledSample, Result};

pub const SODF_MAGIC: [u8; 4] = *b"SODF";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Sodf,
}

impl FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "sodf" => Ok(Self::Sodf),
            other => Err(Error::Config(format!(
                "unknown data format {other:?}; expected csv or sodf"
            ))),
        }
    }
}

enum Inner<R: BufRead> {
    Text {
        reader: R,
        line: usize,
        header_checked: bool,
        has_camera: bool,
    },
    Binary {
        reader: R,
        n_records: u32,
        dim: usize,
        has_camera: bool,
        index: u32,
        finished: bool,
    },
}

/// Streaming sample reader over either format; yields one record at a time so
/// callers never have to materialize the input.
pub struct SampleReader<R: BufRead> {
    inner: Inner<R>,
    dim: Option<usize>,
}

impl SampleReader<BufReader<File>> {
    pub fn from_path(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| {
            Error::Input(format!("cannot open {}: {e}", path.display()))
        })?;
        Self::new(BufReader::new(file))
    }
}

impl<R: BufRead> SampleReader<R> {
    pub fn new(mut reader: R) -> Result<Self> {
        let head = reader.fill_buf()?;
        if head.starts_with(&SODF_MAGIC) {
            reader.consume(SODF_MAGIC.len());
            let n_records = read_u32(&mut reader, "record count")?;
            let dim = read_u32(&mut reader, "feature count")? as usize;
            let camera_flag = read_u8(&mut reader, "camera flag")?;
            if dim == 0 {
                return Err(Error::StreamFormat(
                    "binary header declares zero features per record".into(),
                ));
            }
            let has_camera = match camera_flag {
                0 => false,
                1 => true,
                other => {
                    return Err(Error::StreamFormat(format!(
                        "binary header has invalid camera flag {other}"
                    )));
                }
            };
            Ok(Self {
                inner: Inner::Binary {
                    reader,
                    n_records,
                    dim,
                    has_camera,
                    index: 0,
                    finished: false,
                },
                dim: Some(dim),
            })
        } else {
            Ok(Self {
                inner: Inner::Text {
                    reader,
                    line: 0,
                    header_checked: false,
                    has_camera: false,
                },
                dim: None,
            })
        }
    }

    /// Feature dimension, known after the header (binary) or first record (text).
    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    fn next_text(&mut self) -> Result<Option<LabeledSample>> {
        let Inner::Text { reader, line, header_checked, has_camera } = &mut self.inner else {
            unreachable!()
        };
        let mut buf = String::new();
        loop {
            buf.clear();
            if reader.read_line(&mut buf)? == 0 {
                return Ok(None);
            }
            *line += 1;
            let row = buf.trim();
            if row.is_empty() {
                continue;
            }
            if !*header_checked {
                *header_checked = true;
                let first = row.split(',').next().unwrap_or("").trim();
                if first.parse::<f64>().is_err() {
                    let second = row
                        .split(',')
                        .nth(1)
                        .map(|c| c.trim().to_ascii_lowercase());
                    *has_camera = second.as_deref() == Some("camera");
                    continue;
                }
            }
            let lineno = *line;
            let tokens: Vec<&str> = row.split(',').map(str::trim).collect();
            let meta = 1 + usize::from(*has_camera);
            if tokens.len() <= meta {
                return Err(Error::StreamFormat(format!(
                    "line {lineno}: expected at least one feature value"
                )));
            }
            let label: i32 = tokens[0].parse().map_err(|_| {
                Error::StreamFormat(format!("line {lineno}: invalid label {:?}", tokens[0]))
            })?;
            let camera = if *has_camera {
                Some(tokens[1].parse::<i32>().map_err(|_| {
                    Error::StreamFormat(format!(
                        "line {lineno}: invalid camera id {:?}",
                        tokens[1]
                    ))
                })?)
            } else {
                None
            };
            let mut features = Vec::with_capacity(tokens.len() - meta);
            for tok in &tokens[meta..] {
                features.push(tok.parse::<f64>().map_err(|_| {
                    Error::StreamFormat(format!("line {lineno}: invalid feature value {tok:?}"))
                })?);
            }
            if let Some(d) = self.dim {
                if features.len() != d {
                    return Err(Error::StreamFormat(format!(
                        "line {lineno}: expected {d} features, found {}",
                        features.len()
                    )));
                }
            } else {
                self.dim = Some(features.len());
            }
            let sample = LabeledSample::new(label, camera, features).map_err(|e| match e {
                Error::StreamFormat(msg) => {
                    Error::StreamFormat(format!("line {lineno}: {msg}"))
                }
                other => other,
            })?;
            return Ok(Some(sample));
        }
    }

    fn next_binary(&mut self) -> Result<Option<LabeledSample>> {
        let Inner::Binary { reader, n_records, dim, has_camera, index, finished } =
            &mut self.inner
        else {
            unreachable!()
        };
        if *finished {
            return Ok(None);
        }
        if *index == *n_records {
            *finished = true;
            let mut probe = [0u8; 1];
            match reader.read(&mut probe)? {
                0 => return Ok(None),
                _ => {
                    return Err(Error::StreamFormat(format!(
                        "trailing bytes after {n_records} records"
                    )));
                }
            }
        }
        let record = *index + 1;
        let label = read_i32(reader, record)?;
        let camera = if *has_camera {
            Some(read_i32(reader, record)?)
        } else {
            None
        };
        let mut features = Vec::with_capacity(*dim);
        for _ in 0..*dim {
            features.push(read_f64(reader, record)?);
        }
        *index += 1;
        let sample = LabeledSample::new(label, camera, features).map_err(|e| match e {
            Error::StreamFormat(msg) => Error::StreamFormat(format!("record {record}: {msg}")),
            other => other,
        })?;
        Ok(Some(sample))
    }
}

impl<R: BufRead> Iterator for SampleReader<R> {
    type Item = Result<LabeledSample>;

    fn next(&mut self) -> Option<Self::Item> {
        let res = match &self.inner {
            Inner::Text { .. } => self.next_text(),
            Inner::Binary { .. } => self.next_binary(),
        };
        res.transpose()
    }
}

fn read_exact_or(reader: &mut impl Read, buf: &mut [u8], what: impl Fn() -> String) -> Result<()> {
    reader
        .read_exact(buf)
        .map_err(|_| Error::StreamFormat(format!("unexpected end of file while reading {}", what())))
}

fn read_u32(reader: &mut impl Read, what: &str) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_exact_or(reader, &mut buf, || format!("the {what}"))?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u8(reader: &mut impl Read, what: &str) -> Result<u8> {
    let mut buf = [0u8; 1];
    read_exact_or(reader, &mut buf, || format!("the {what}"))?;
    Ok(buf[0])
}

fn read_i32(reader: &mut impl Read, record: u32) -> Result<i32> {
    let mut buf = [0u8; 4];
    read_exact_or(reader, &mut buf, || format!("record {record}"))?;
    Ok(i32::from_le_bytes(buf))
}

fn read_f64(reader: &mut impl Read, record: u32) -> Result<f64> {
    let mut buf = [0u8; 8];
    read_exact_or(reader, &mut buf, || format!("record {record}"))?;
    Ok(f64::from_le_bytes(buf))
}

/// Reads a whole file into memory; convenience for eval and verify inputs.
pub fn read_all(path: &Path) -> Result<Vec<LabeledSample>> {
    SampleReader::from_path(path)?.collect()
}

fn check_record(sample: &LabeledSample, i: usize, dim: usize, has_camera: bool) -> Result<()> {
    if sample.dim() != dim {
        return Err(Error::Input(format!(
            "sample {i} has {} features, expected {dim}",
            sample.dim()
        )));
    }
    if sample.camera.is_some() != has_camera {
        return Err(Error::Input(format!(
            "sample {i} camera presence is inconsistent with the stream layout"
        )));
    }
    Ok(())
}

pub fn write_csv(
    out: &mut impl Write,
    samples: &[LabeledSample],
    dim: usize,
    has_camera: bool,
    header: bool,
) -> Result<()> {
    if header {
        let mut cols = vec!["label".to_string()];
        if has_camera {
            cols.push("camera".to_string());
        }
        cols.extend((1..=dim).map(|i| format!("f{i}")));
        writeln!(out, "{}", cols.join(","))?;
    }
    for (i, sample) in samples.iter().enumerate() {
        check_record(sample, i, dim, has_camera)?;
        let mut row = sample.label.to_string();
        if let Some(cam) = sample.camera {
            row.push(',');
            row.push_str(&cam.to_string());
        }
        for v in sample.features.iter() {
            row.push(',');
            row.push_str(&v.to_string());
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

pub fn write_sodf(
    out: &mut impl Write,
    samples: &[LabeledSample],
    dim: usize,
    has_camera: bool,
) -> Result<()> {
    let n = u32::try_from(samples.len())
        .map_err(|_| Error::Input("too many records for the binary format".into()))?;
    let d = u32::try_from(dim)
        .map_err(|_| Error::Input("feature dimension too large for the binary format".into()))?;
    out.write_all(&SODF_MAGIC)?;
    out.write_all(&n.to_le_bytes())?;
    out.write_all(&d.to_le_bytes())?;
    out.write_all(&[u8::from(has_camera)])?;
    for (i, sample) in samples.iter().enumerate() {
        check_record(sample, i, dim, has_camera)?;
        out.write_all(&sample.label.to_le_bytes())?;
        if let Some(cam) = sample.camera {
            out.write_all(&cam.to_le_bytes())?;
        }
        for v in sample.features.iter() {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Writes samples to `path` in the requested format, creating parent
/// directories as needed.
pub fn write_file(
    path: &Path,
    format: DataFormat,
    samples: &[LabeledSample],
    dim: usize,
    has_camera: bool,
) -> Result<()> {
    if let Some(parent) = path.parent()
        && !parent.as_os_str().is_empty()
    {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = std::io::BufWriter::new(File::create(path)?);
    match format {
        DataFormat::Csv => write_csv(&mut out, samples, dim, has_camera, true)?,
        DataFormat::Sodf => write_sodf(&mut out, samples, dim, has_camera)?,
    }
    out.flush()?;
    Ok(())
}
