//! Embedding-matrix transfer between tokenizer vocabularies: rows for
//! pieces present in both vocabularies are copied directly; a missing piece
//! is decomposed by the source tokenizer and its row is the arithmetic mean
//! of the sub-piece rows; pieces the source cannot segment at all fall back
//! to a copy of the source `<unk>` row.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::tokenizer::{PieceKind, Vocab, BOUNDARY_MARKER};

pub const MATRIX_MAGIC: &[u8; 4] = b"EMB1";

#[derive(Debug, Error)]
pub enum TransferError {
    #[error("matrix has {rows} rows but the vocabulary has {vocab} pieces")]
    ShapeError { rows: usize, vocab: usize },
    #[error("source vocabulary is empty")]
    EmptyVocab,
    #[error("bad magic bytes (expected \"EMB1\")")]
    FormatError,
    #[error("file truncated: expected {expected} bytes after the header, got {actual}")]
    TruncatedError { expected: usize, actual: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("matrix dimensions {rows}x{cols} do not fit {len} values")]
    DimensionMismatch { rows: usize, cols: usize, len: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Dense |V| x d matrix of f32 embeddings; row index = token id.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f32>) -> Result<Self, TransferError> {
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(TransferError::DimensionMismatch {
                rows,
                cols,
                len: data.len(),
            });
        }
        for (i, v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(TransferError::NonFinite {
                    row: i / cols.max(1),
                    col: i % cols.max(1),
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn row_mut(&mut self, i: usize) -> &mut [f32] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Serialize as magic "EMB1", rows and cols as u32 little-endian, then
    /// rows*cols IEEE-754 f32 little-endian values, row-major.
    pub fn write_to(&self, mut w: impl Write) -> Result<(), TransferError> {
        w.write_all(MATRIX_MAGIC)?;
        w.write_all(&(self.rows as u32).to_le_bytes())?;
        w.write_all(&(self.cols as u32).to_le_bytes())?;
        for v in &self.data {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self, TransferError> {
        let mut header = [0u8; 12];
        let got = read_up_to(&mut r, &mut header)?;
        if got < 4 || &header[..4] != MATRIX_MAGIC {
            return Err(TransferError::FormatError);
        }
        if got < 12 {
            return Err(TransferError::TruncatedError {
                expected: 8,
                actual: got - 4,
            });
        }
        let rows = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let expected = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(4))
            .ok_or(TransferError::FormatError)?;
        let mut payload = Vec::new();
        r.read_to_end(&mut payload)?;
        if payload.len() != expected {
            return Err(TransferError::TruncatedError {
                expected,
                actual: payload.len(),
            });
        }
        let data = payload
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        Self::new(rows, cols, data)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<(), TransferError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self, TransferError> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

fn read_up_to(r: &mut impl Read, buf: &mut [u8]) -> Result<usize, TransferError> {
    let mut filled = 0;
    while filled < buf.len() {
        let n = r.read(&mut buf[filled..])?;
        if n == 0 {
            break;
        }
        filled += n;
    }
    Ok(filled)
}

/// How one target row was produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Provenance {
    /// Piece exists in the source vocabulary; row copied verbatim.
    Copied { src_id: u32 },
    /// Mean of the source rows for these sub-piece ids.
    Averaged { src_ids: Vec<u32> },
    /// Source segmentation produced only `<unk>`; row is the source
    /// `<unk>` row.
    Fallback,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferReport {
    pub copied: usize,
    pub averaged: usize,
    pub fallback: usize,
    /// Per-target-id provenance, index = target token id.
    pub provenance: Vec<Provenance>,
}

/// Transfer `src_emb` onto `tgt_vocab`. Shared-piece matching compares raw
/// piece strings, marker included. Output has |tgt_vocab| rows and the
/// source column count.
pub fn transfer_embeddings(
    src_vocab: &Vocab,
    src_emb: &EmbeddingMatrix,
    tgt_vocab: &Vocab,
) -> Result<(EmbeddingMatrix, TransferReport), TransferError> {
    if src_vocab.is_empty() {
        return Err(TransferError::EmptyVocab);
    }
    if src_emb.rows() != src_vocab.len() {
        return Err(TransferError::ShapeError {
            rows: src_emb.rows(),
            vocab: src_vocab.len(),
        });
    }

    let cols = src_emb.cols();
    let mut out = EmbeddingMatrix::zeros(tgt_vocab.len(), cols);
    let mut provenance = Vec::with_capacity(tgt_vocab.len());
    let (mut copied, mut averaged, mut fallback) = (0usize, 0usize, 0usize);

    for tgt_id in 0..tgt_vocab.len() {
        let piece = tgt_vocab.piece(tgt_id as u32).expect("id in range");
        if let Some(src_id) = src_vocab.piece_id(&piece.text) {
            out.row_mut(tgt_id)
                .copy_from_slice(src_emb.row(src_id as usize));
            provenance.push(Provenance::Copied { src_id });
            copied += 1;
            continue;
        }

        let sub_ids = src_vocab.segment_raw(&piece.text);
        // A marker-only sub-piece dilutes content pieces, so it is dropped
        // when it is one of several; it stands alone when it is the whole
        // segmentation.
        let contentful: Vec<u32> = if sub_ids.len() > 1 {
            let kept: Vec<u32> = sub_ids
                .iter()
                .copied()
                .filter(|&id| {
                    let p = src_vocab.piece(id).expect("id in range");
                    !p.text.chars().all(|c| c == BOUNDARY_MARKER)
                })
                .collect();
            if kept.is_empty() {
                sub_ids
            } else {
                kept
            }
        } else {
            sub_ids
        };

        let all_unk = contentful.iter().all(|&id| {
            src_vocab
                .piece(id)
                .map(|p| p.kind == PieceKind::Unk)
                .unwrap_or(false)
        });
        if contentful.is_empty() || all_unk {
            out.row_mut(tgt_id)
                .copy_from_slice(src_emb.row(src_vocab.unk_id() as usize));
            provenance.push(Provenance::Fallback);
            fallback += 1;
            continue;
        }

        let mut acc = vec![0.0f64; cols];
        for &id in &contentful {
            for (a, &v) in acc.iter_mut().zip(src_emb.row(id as usize)) {
                *a += v as f64;
            }
        }
        let inv = 1.0 / contentful.len() as f64;
        for (dst, a) in out.row_mut(tgt_id).iter_mut().zip(&acc) {
            *dst = (a * inv) as f32;
        }
        provenance.push(Provenance::Averaged {
            src_ids: contentful,
        });
        averaged += 1;
    }

    Ok((
        out,
        TransferReport {
            copied,
            averaged,
            fallback,
            provenance,
        },
    ))
}
