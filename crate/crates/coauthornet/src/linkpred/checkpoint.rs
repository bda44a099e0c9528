//! Versioned binary checkpoint for [`LinkModelParams`].
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic            8 bytes  "COAUNET1"
//! version          u32      currently 1
//! operator tag     u32
//! aggregator tag   u32
//! activation tag   u32
//! normalize        u32      0 or 1
//! layer count      u32      L
//! dims             u32 × (L+1)
//! classifier dim   u32      hidden width, 0 = plain affine head
//! split seed       u64      seed of the edge split this model was trained on
//! blocks           per parameter block: u32 rows, u32 cols, f64 × rows·cols
//! ```
//!
//! Blocks follow the flat parameter order (encoder layers, then classifier).
//! A text manifest alongside the binary lists shapes and the config used.
//! Read errors report the byte offset of the failure.

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::embeddings::sage::{Aggregator, SageConfig};
use crate::error::{Error, Result};

use super::{LinkModelParams, LinkOperator};

const MAGIC: &[u8; 8] = b"COAUNET1";
const VERSION: u32 = 1;

/// Metadata carried alongside the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointMeta {
    pub split_seed: u64,
}

struct CountingReader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> Read for CountingReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.offset += n as u64;
        Ok(n)
    }
}

fn format_err(path: &Path, offset: u64, msg: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        offset,
        msg: msg.into(),
    }
}

/// Write the checkpoint and a human-readable `<path>.manifest.txt`.
pub fn save_checkpoint(path: &Path, params: &LinkModelParams, meta: &CheckpointMeta) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::io(path, e);

    w.write_all(MAGIC).map_err(io_err)?;
    w.write_u32::<LittleEndian>(VERSION).map_err(io_err)?;
    w.write_u32::<LittleEndian>(params.operator.tag()).map_err(io_err)?;
    w.write_u32::<LittleEndian>(params.sage.cfg.aggregator.tag())
        .map_err(io_err)?;
    w.write_u32::<LittleEndian>(params.sage.cfg.activation.tag())
        .map_err(io_err)?;
    w.write_u32::<LittleEndian>(params.sage.cfg.normalize as u32)
        .map_err(io_err)?;
    let layers = params.sage.cfg.layer_count() as u32;
    w.write_u32::<LittleEndian>(layers).map_err(io_err)?;
    for &d in &params.sage.cfg.dims {
        w.write_u32::<LittleEndian>(d as u32).map_err(io_err)?;
    }
    let hidden = params
        .classifier
        .hidden
        .as_ref()
        .map_or(0, |(w1, _)| w1.rows() as u32);
    w.write_u32::<LittleEndian>(hidden).map_err(io_err)?;
    w.write_u64::<LittleEndian>(meta.split_seed).map_err(io_err)?;

    let mut write_block = |rows: usize, cols: usize, data: &[f64]| -> Result<()> {
        w.write_u32::<LittleEndian>(rows as u32).map_err(io_err)?;
        w.write_u32::<LittleEndian>(cols as u32).map_err(io_err)?;
        for &v in data {
            w.write_f64::<LittleEndian>(v).map_err(io_err)?;
        }
        Ok(())
    };
    for l in 0..params.sage.cfg.layer_count() {
        if params.sage.cfg.aggregator == Aggregator::MaxPool {
            let pw = &params.sage.pool_w[l];
            write_block(pw.rows(), pw.cols(), pw.as_slice())?;
            write_block(1, params.sage.pool_b[l].len(), &params.sage.pool_b[l])?;
        }
        let wl = &params.sage.weights[l];
        write_block(wl.rows(), wl.cols(), wl.as_slice())?;
    }
    if let Some((w1, b1)) = &params.classifier.hidden {
        write_block(w1.rows(), w1.cols(), w1.as_slice())?;
        write_block(1, b1.len(), b1)?;
    }
    write_block(1, params.classifier.w.len(), &params.classifier.w)?;
    write_block(1, 1, &[params.classifier.b])?;

    write_manifest(path, params, meta)
}

fn write_manifest(path: &Path, params: &LinkModelParams, meta: &CheckpointMeta) -> Result<()> {
    let manifest_path = path.with_extension("manifest.txt");
    let mut text = String::new();
    text.push_str(&format!("format_version = {VERSION}\n"));
    text.push_str(&format!("operator = {}\n", params.operator));
    text.push_str(&format!("aggregator = {}\n", params.sage.cfg.aggregator));
    text.push_str(&format!("activation = {}\n", params.sage.cfg.activation));
    text.push_str(&format!("normalize = {}\n", params.sage.cfg.normalize));
    text.push_str(&format!(
        "dims = {}\n",
        params
            .sage
            .cfg
            .dims
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("x")
    ));
    text.push_str(&format!(
        "classifier_hidden = {}\n",
        params
            .classifier
            .hidden
            .as_ref()
            .map_or(0, |(w1, _)| w1.rows())
    ));
    text.push_str(&format!("split_seed = {}\n", meta.split_seed));
    for (name, range) in params.blocks() {
        text.push_str(&format!("block {name} = {} values\n", range.len()));
    }
    std::fs::write(&manifest_path, text).map_err(|e| Error::io(&manifest_path, e))
}

/// Load a checkpoint written by [`save_checkpoint`].
pub fn load_checkpoint(path: &Path) -> Result<(LinkModelParams, CheckpointMeta)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = CountingReader {
        inner: std::io::BufReader::new(file),
        offset: 0,
    };

    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|e| format_err(path, r.offset, format!("magic: {e}")))?;
    if &magic != MAGIC {
        return Err(format_err(path, 0, "bad magic, not a checkpoint file"));
    }
    let version = r
        .read_u32::<LittleEndian>()
        .map_err(|e| format_err(path, r.offset, format!("version: {e}")))?;
    if version != VERSION {
        return Err(format_err(
            path,
            8,
            format!("unsupported format version {version}"),
        ));
    }
    let read_u32 = |r: &mut CountingReader<_>, what: &str| -> Result<u32> {
        let at = r.offset;
        r.read_u32::<LittleEndian>()
            .map_err(|e| format_err(path, at, format!("{what}: {e}")))
    };
    let operator_tag = read_u32(&mut r, "operator tag")?;
    let operator = LinkOperator::from_tag(operator_tag)
        .ok_or_else(|| format_err(path, r.offset - 4, format!("unknown operator tag {operator_tag}")))?;
    let agg_tag = read_u32(&mut r, "aggregator tag")?;
    let aggregator = Aggregator::from_tag(agg_tag)
        .ok_or_else(|| format_err(path, r.offset - 4, format!("unknown aggregator tag {agg_tag}")))?;
    let act_tag = read_u32(&mut r, "activation tag")?;
    let activation = crate::nn::Activation::from_tag(act_tag)
        .ok_or_else(|| format_err(path, r.offset - 4, format!("unknown activation tag {act_tag}")))?;
    let normalize = read_u32(&mut r, "normalize flag")? != 0;
    let layers = read_u32(&mut r, "layer count")? as usize;
    if layers == 0 || layers > 64 {
        return Err(format_err(path, r.offset - 4, format!("implausible layer count {layers}")));
    }
    let mut dims = Vec::with_capacity(layers + 1);
    for _ in 0..=layers {
        dims.push(read_u32(&mut r, "layer dimension")? as usize);
    }
    let classifier_hidden = match read_u32(&mut r, "classifier hidden width")? {
        0 => None,
        h => Some(h as usize),
    };
    let split_seed = {
        let at = r.offset;
        r.read_u64::<LittleEndian>()
            .map_err(|e| format_err(path, at, format!("split seed: {e}")))?
    };

    let sage_cfg = SageConfig {
        dims,
        aggregator,
        normalize,
        activation,
    };
    let template = LinkModelParams::init(sage_cfg.clone(), operator, classifier_hidden, 0)
        .map_err(|e| format_err(path, r.offset, format!("invalid header config: {e}")))?;
    let mut flat = Vec::with_capacity(template.flat_len());
    for (name, range) in template.blocks() {
        let rows = read_u32(&mut r, "block rows")? as usize;
        let cols = read_u32(&mut r, "block cols")? as usize;
        if rows * cols != range.len() {
            return Err(format_err(
                path,
                r.offset - 8,
                format!(
                    "block {name}: stored shape {rows}x{cols} does not match expected {} values",
                    range.len()
                ),
            ));
        }
        for _ in 0..rows * cols {
            let at = r.offset;
            let v = r
                .read_f64::<LittleEndian>()
                .map_err(|e| format_err(path, at, format!("block {name}: {e}")))?;
            flat.push(v);
        }
    }
    let mut trailing = [0u8; 1];
    match r.read(&mut trailing) {
        Ok(0) => {}
        Ok(_) => {
            return Err(format_err(path, r.offset - 1, "trailing bytes after parameters"))
        }
        Err(e) => return Err(format_err(path, r.offset, e.to_string())),
    }
    let params = LinkModelParams::from_flat(sage_cfg, operator, classifier_hidden, &flat)
        .map_err(|e| format_err(path, r.offset, format!("parameter reconstruction: {e}")))?;
    Ok((params, CheckpointMeta { split_seed }))
}
