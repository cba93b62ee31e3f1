//! Binary trace dump of step records.
//!
//! Layout (all integers little-endian):
//!   bytes 0..8   magic "RWTRACE\0"
//!   bytes 8..12  format version, u32 (currently 1)
//!   bytes 12..20 record count, u64
//!   then per record:
//!     u64 index, u8 tag (0 = fresh, 1 = repeat),
//!     fresh:  f64 value (IEEE 754 bits)
//!     repeat: u64 repeat index
//!
//! Records are written in index order, so a trace replays the realization
//! exactly.

use crate::engine::walk::{StepChoice, StepRecord};
use crate::error::{Error, Result};
use std::io::{Read, Write};

pub const TRACE_MAGIC: [u8; 8] = *b"RWTRACE\0";
pub const TRACE_VERSION: u32 = 1;

pub fn write_trace<W: Write>(records: &[StepRecord], mut out: W) -> Result<()> {
    out.write_all(&TRACE_MAGIC)?;
    out.write_all(&TRACE_VERSION.to_le_bytes())?;
    out.write_all(&(records.len() as u64).to_le_bytes())?;
    for rec in records {
        out.write_all(&rec.index.to_le_bytes())?;
        match rec.choice {
            StepChoice::Fresh { x } => {
                out.write_all(&[0u8])?;
                out.write_all(&x.to_bits().to_le_bytes())?;
            }
            StepChoice::Repeat { u } => {
                out.write_all(&[1u8])?;
                out.write_all(&u.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

pub fn read_trace<R: Read>(mut input: R) -> Result<Vec<StepRecord>> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if magic != TRACE_MAGIC {
        return Err(Error::Trace("bad magic".into()));
    }
    let mut buf4 = [0u8; 4];
    input.read_exact(&mut buf4)?;
    let version = u32::from_le_bytes(buf4);
    if version != TRACE_VERSION {
        return Err(Error::Trace(format!("unsupported trace version {version}")));
    }
    let mut buf8 = [0u8; 8];
    input.read_exact(&mut buf8)?;
    let count = u64::from_le_bytes(buf8);
    let mut records = Vec::with_capacity(count.min(1 << 24) as usize);
    for _ in 0..count {
        input.read_exact(&mut buf8)?;
        let index = u64::from_le_bytes(buf8);
        let mut tag = [0u8; 1];
        input.read_exact(&mut tag)?;
        input.read_exact(&mut buf8)?;
        let choice = match tag[0] {
            0 => StepChoice::Fresh {
                x: f64::from_bits(u64::from_le_bytes(buf8)),
            },
            1 => StepChoice::Repeat {
                u: u64::from_le_bytes(buf8),
            },
            t => return Err(Error::Trace(format!("unknown record tag {t}"))),
        };
        records.push(StepRecord { index, choice });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_preserves_bits() {
        let records = vec![
            StepRecord {
                index: 1,
                choice: StepChoice::Fresh {
                    x: -0.1234567891234,
                },
            },
            StepRecord {
                index: 2,
                choice: StepChoice::Repeat { u: 1 },
            },
            StepRecord {
                index: 3,
                choice: StepChoice::Fresh {
                    x: f64::MIN_POSITIVE,
                },
            },
        ];
        let mut buf = Vec::new();
        write_trace(&records, &mut buf).unwrap();
        assert_eq!(&buf[0..8], b"RWTRACE\0");
        let back = read_trace(buf.as_slice()).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn rejects_corrupt_header() {
        let mut buf = Vec::new();
        write_trace(&[], &mut buf).unwrap();
        buf[0] = b'X';
        assert!(read_trace(buf.as_slice()).is_err());

        let mut buf = Vec::new();
        write_trace(&[], &mut buf).unwrap();
        buf[8] = 9; // version
        assert!(read_trace(buf.as_slice()).is_err());
    }

    #[test]
    fn truncated_stream_errors() {
        let records = vec![StepRecord {
            index: 1,
            choice: StepChoice::Fresh { x: 1.0 },
        }];
        let mut buf = Vec::new();
        write_trace(&records, &mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_trace(buf.as_slice()).is_err());
    }
}
