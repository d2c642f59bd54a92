//! Context serialization: a JSON container holding the vocabulary, object
//! labels, and incidence rows as hex strings.
//!
//! Row encoding is bit-exact: each row packs into `ceil(|M| / 8)` bytes,
//! byte `k` covering attribute indices `8k .. 8k+7` with the lowest index
//! in the least-significant bit; bytes are written as lowercase hex.

use crate::context::{AttrSet, FormalContext};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ContextIoError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed context file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Context(#[from] crate::context::ContextError),
}

#[derive(Serialize, Deserialize)]
struct ContextFile {
    vocabulary: Vec<String>,
    objects: Vec<String>,
    rows: Vec<String>,
}

fn row_to_hex(row: &AttrSet) -> String {
    let n_bytes = row.width().div_ceil(8);
    let mut bytes = vec![0u8; n_bytes];
    for i in row.iter() {
        bytes[i / 8] |= 1 << (i % 8);
    }
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn hex_to_row(hex: &str, width: usize) -> Result<AttrSet, ContextIoError> {
    let expected = width.div_ceil(8);
    if hex.len() != expected * 2 {
        return Err(ContextIoError::Malformed(format!(
            "row hex has {} chars, expected {}",
            hex.len(),
            expected * 2
        )));
    }
    let mut set = AttrSet::empty(width);
    for (k, chunk) in hex.as_bytes().chunks(2).enumerate() {
        let text = std::str::from_utf8(chunk).map_err(|_| {
            ContextIoError::Malformed("row hex is not ascii".into())
        })?;
        let byte = u8::from_str_radix(text, 16)
            .map_err(|e| ContextIoError::Malformed(format!("bad hex byte {text:?}: {e}")))?;
        for b in 0..8 {
            if byte & (1 << b) != 0 {
                let idx = k * 8 + b;
                if idx >= width {
                    return Err(ContextIoError::Malformed(format!(
                        "bit {idx} set beyond vocabulary width {width}"
                    )));
                }
                set.insert(idx);
            }
        }
    }
    Ok(set)
}

/// Writes the context as deterministic pretty JSON.
pub fn write_context(ctx: &FormalContext, mut w: impl Write) -> Result<(), ContextIoError> {
    let file = ContextFile {
        vocabulary: ctx.attribute_names(),
        objects: ctx.objects().iter().map(|o| o.label().to_string()).collect(),
        rows: (0..ctx.object_count()).map(|i| row_to_hex(ctx.row(i))).collect(),
    };
    let text = serde_json::to_string_pretty(&file)
        .map_err(|e| ContextIoError::Malformed(e.to_string()))?;
    w.write_all(text.as_bytes())?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Reads a context container back into a [`FormalContext`].
pub fn read_context(mut r: impl Read) -> Result<FormalContext, ContextIoError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let file: ContextFile = serde_json::from_str(&text)
        .map_err(|e| ContextIoError::Malformed(e.to_string()))?;
    if file.rows.len() != file.objects.len() {
        return Err(ContextIoError::Malformed(format!(
            "{} rows for {} objects",
            file.rows.len(),
            file.objects.len()
        )));
    }
    let width = file.vocabulary.len();
    let rows = file
        .rows
        .iter()
        .map(|h| hex_to_row(h, width))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FormalContext::new(file.objects, file.vocabulary, rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::test_support::c3;
    use proptest::prelude::*;

    #[test]
    fn round_trip_c3() {
        let ctx = c3();
        let mut buf = Vec::new();
        write_context(&ctx, &mut buf).unwrap();
        let back = read_context(buf.as_slice()).unwrap();
        assert_eq!(back.attribute_names(), ctx.attribute_names());
        assert_eq!(back.object_count(), 3);
        for i in 0..3 {
            assert_eq!(back.row(i), ctx.row(i));
        }
    }

    #[test]
    fn hex_layout_is_lsb_first() {
        // bits {0, 9} over width 25 -> bytes [0b0000_0001, 0b0000_0010, 0, 0]
        let row = AttrSet::from_indices(25, [0, 9]);
        assert_eq!(row_to_hex(&row), "01020000");
        assert_eq!(hex_to_row("01020000", 25).unwrap(), row);
    }

    #[test]
    fn rejects_malformed() {
        assert!(hex_to_row("zz", 8).is_err());
        assert!(hex_to_row("0102", 8).is_err()); // too long
        assert!(hex_to_row("80", 7).is_err()); // bit beyond width
        assert!(read_context("{}".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn hex_round_trip(width in 1usize..70, picks in proptest::collection::vec(0usize..70, 0..20)) {
            let set = AttrSet::from_indices(width, picks.into_iter().filter(|&i| i < width));
            let hex = row_to_hex(&set);
            prop_assert_eq!(hex_to_row(&hex, width).unwrap(), set);
        }
    }
}
