//! Unigram subword tokenization plus the word- and sentence-level splitters
//! used by the evaluation metrics.
//!
//! A [`Vocab`] is an ordered list of scored pieces loaded from a TSV file
//! (`piece<TAB>score`, line index = token id). [`Vocab::encode`] finds the
//! maximum-score decomposition of the input with a Viterbi pass over the
//! segmentation lattice. Special pieces are recognized by their reserved
//! spellings: `<pad>`, `</s>`, `<unk>` and the `<extra_id_K>` sentinel
//! family, which must occupy the highest ids in descending order
//! (`<extra_id_0>` = id |V|-1).

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

/// Word-boundary marker prepended to each whitespace-separated chunk
/// before lattice search (U+2581, the convention of unigram vocabularies).
pub const BOUNDARY_MARKER: char = '\u{2581}';

/// Score penalty below the worst regular piece for unknown-character edges.
const UNK_PENALTY: f64 = 10.0;

#[derive(Debug, Error)]
pub enum TokenizerError {
    #[error("duplicate piece {piece:?} at line {line}")]
    DuplicatePiece { piece: String, line: usize },
    #[error("line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("missing special piece {0:?}")]
    MissingSpecial(&'static str),
    #[error("sentinel pieces must occupy the highest ids with <extra_id_0> last")]
    SentinelLayout,
    #[error("token id {id} out of range for vocabulary of size {size}")]
    InvalidId { id: u32, size: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Role of a vocabulary entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceKind {
    Regular,
    Pad,
    Eos,
    Unk,
    /// `<extra_id_K>`; the payload is K.
    Sentinel(u32),
    /// Reserved control token, e.g. the translation direction markers.
    Control,
}

#[derive(Debug, Clone)]
pub struct Piece {
    pub text: String,
    pub score: f64,
    pub kind: PieceKind,
}

/// A sequence of token ids produced by [`Vocab::encode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub ids: Vec<u32>,
}

impl TokenSequence {
    pub fn new(ids: Vec<u32>) -> Self {
        Self { ids }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// One decomposition of a text into pieces together with its total
/// log-probability. Concatenating `pieces` (marker handling aside)
/// reproduces the normalized input exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub pieces: Vec<String>,
    pub total_score: f64,
}

/// An immutable unigram vocabulary. All operations are pure and safe to
/// call concurrently.
#[derive(Debug, Clone)]
pub struct Vocab {
    pieces: Vec<Piece>,
    /// Every piece string -> id.
    index: HashMap<String, u32>,
    /// Regular pieces only; the lattice never matches specials in raw text.
    lattice: HashMap<String, u32>,
    pad_id: u32,
    eos_id: u32,
    unk_id: u32,
    num_sentinels: u32,
    min_score: f64,
    max_piece_chars: usize,
    uses_marker: bool,
}

fn classify(piece: &str) -> PieceKind {
    match piece {
        "<pad>" => PieceKind::Pad,
        "</s>" => PieceKind::Eos,
        "<unk>" => PieceKind::Unk,
        "<2en>" | "<2pl>" => PieceKind::Control,
        _ => {
            if let Some(rest) = piece.strip_prefix("<extra_id_") {
                if let Some(num) = rest.strip_suffix('>') {
                    if !num.is_empty() && num.bytes().all(|b| b.is_ascii_digit()) {
                        if let Ok(k) = num.parse::<u32>() {
                            return PieceKind::Sentinel(k);
                        }
                    }
                }
            }
            PieceKind::Regular
        }
    }
}

impl Vocab {
    /// Build a vocabulary from `(piece, score)` entries; entry index = token id.
    pub fn from_entries(entries: Vec<(String, f64)>) -> Result<Self, TokenizerError> {
        let mut pieces = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        let mut lattice = HashMap::new();
        let mut pad = None;
        let mut eos = None;
        let mut unk = None;
        let mut sentinels: Vec<(u32, u32)> = Vec::new(); // (k, id)
        let mut min_score = 0.0f64;
        let mut max_piece_chars = 1;
        let mut uses_marker = false;

        for (line0, (text, score)) in entries.into_iter().enumerate() {
            let line = line0 + 1;
            let id = line0 as u32;
            if text.is_empty() {
                return Err(TokenizerError::ParseError {
                    line,
                    msg: "empty piece".into(),
                });
            }
            if index.contains_key(&text) {
                return Err(TokenizerError::DuplicatePiece { piece: text, line });
            }
            let kind = classify(&text);
            match kind {
                PieceKind::Pad => pad = Some(id),
                PieceKind::Eos => eos = Some(id),
                PieceKind::Unk => unk = Some(id),
                PieceKind::Sentinel(k) => sentinels.push((k, id)),
                PieceKind::Control => {}
                PieceKind::Regular => {
                    if score > 0.0 {
                        return Err(TokenizerError::ParseError {
                            line,
                            msg: format!("piece {text:?} has positive score {score}"),
                        });
                    }
                    min_score = min_score.min(score);
                    lattice.insert(text.clone(), id);
                }
            }
            max_piece_chars = max_piece_chars.max(text.chars().count());
            if text.chars().any(|c| c == BOUNDARY_MARKER) {
                uses_marker = true;
            }
            index.insert(text.clone(), id);
            pieces.push(Piece { text, score, kind });
        }

        let pad_id = pad.ok_or(TokenizerError::MissingSpecial("<pad>"))?;
        let eos_id = eos.ok_or(TokenizerError::MissingSpecial("</s>"))?;
        let unk_id = unk.ok_or(TokenizerError::MissingSpecial("<unk>"))?;

        // Sentinel k must sit at id |V|-1-k, i.e. the sentinels fill the top
        // of the id space in descending order.
        let size = pieces.len() as u32;
        let num_sentinels = sentinels.len() as u32;
        for &(k, id) in &sentinels {
            if k >= num_sentinels || id != size - 1 - k {
                return Err(TokenizerError::SentinelLayout);
            }
        }

        Ok(Self {
            pieces,
            index,
            lattice,
            pad_id,
            eos_id,
            unk_id,
            num_sentinels,
            min_score,
            max_piece_chars,
            uses_marker,
        })
    }

    /// Load a vocabulary from a UTF-8 TSV file, one `piece<TAB>score` per
    /// line; the line index is the token id.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, TokenizerError> {
        let contents = fs::read_to_string(path)?;
        let mut entries = Vec::new();
        for (line0, raw) in contents.lines().enumerate() {
            let line = line0 + 1;
            let (piece, score) = raw.split_once('\t').ok_or(TokenizerError::ParseError {
                line,
                msg: "expected piece<TAB>score".into(),
            })?;
            let score: f64 = score.trim().parse().map_err(|e| TokenizerError::ParseError {
                line,
                msg: format!("bad score: {e}"),
            })?;
            if !score.is_finite() {
                return Err(TokenizerError::ParseError {
                    line,
                    msg: format!("non-finite score {score}"),
                });
            }
            entries.push((piece.to_string(), score));
        }
        Self::from_entries(entries)
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn pad_id(&self) -> u32 {
        self.pad_id
    }

    pub fn eos_id(&self) -> u32 {
        self.eos_id
    }

    pub fn unk_id(&self) -> u32 {
        self.unk_id
    }

    pub fn num_sentinels(&self) -> u32 {
        self.num_sentinels
    }

    /// Id of `<extra_id_k>`, i.e. |V|-1-k, when it exists.
    pub fn sentinel_id(&self, k: u32) -> Option<u32> {
        if k < self.num_sentinels {
            Some(self.pieces.len() as u32 - 1 - k)
        } else {
            None
        }
    }

    pub fn piece(&self, id: u32) -> Option<&Piece> {
        self.pieces.get(id as usize)
    }

    /// Exact piece-string lookup over the whole vocabulary, specials included.
    pub fn piece_id(&self, text: &str) -> Option<u32> {
        self.index.get(text).copied()
    }

    pub fn is_special(&self, id: u32) -> bool {
        self.pieces
            .get(id as usize)
            .map(|p| p.kind != PieceKind::Regular)
            .unwrap_or(false)
    }

    /// Whether the vocabulary was trained with the U+2581 word-boundary
    /// marker. Markerless (toy) vocabularies are segmented without the
    /// dummy prefix so that their pieces can actually match.
    pub fn uses_marker(&self) -> bool {
        self.uses_marker
    }

    /// Encode normalized text into token ids: the maximum total
    /// log-probability decomposition per whitespace-separated chunk.
    /// Characters coverable by no piece map to `<unk>`.
    pub fn encode(&self, text: &str) -> TokenSequence {
        self.encode_scored(text).0
    }

    fn encode_scored(&self, text: &str) -> (TokenSequence, f64) {
        let mut ids = Vec::new();
        let mut total = 0.0;
        for chunk in normalize(text).split(' ') {
            if chunk.is_empty() {
                continue;
            }
            if self.uses_marker {
                let mut marked = String::with_capacity(chunk.len() + 3);
                marked.push(BOUNDARY_MARKER);
                marked.push_str(chunk);
                total += self.viterbi(&marked, &mut ids);
            } else {
                total += self.viterbi(chunk, &mut ids);
            }
        }
        (TokenSequence::new(ids), total)
    }

    /// Like [`Vocab::encode`] but also reports pieces and the total score.
    pub fn segment(&self, text: &str) -> Segmentation {
        let (seq, total_score) = self.encode_scored(text);
        let pieces = seq
            .ids
            .iter()
            .map(|&id| self.pieces[id as usize].text.clone())
            .collect();
        Segmentation {
            pieces,
            total_score,
        }
    }

    /// Lattice search over a raw string: no normalization, no whitespace
    /// marking. This is how a source tokenizer decomposes a foreign
    /// vocabulary entry during embedding transfer.
    pub fn segment_raw(&self, raw: &str) -> Vec<u32> {
        let mut ids = Vec::new();
        self.viterbi(raw, &mut ids);
        ids
    }

    /// Score assigned to a single-character unknown edge.
    pub fn unk_edge_score(&self) -> f64 {
        self.min_score - UNK_PENALTY
    }

    fn viterbi(&self, chunk: &str, out: &mut Vec<u32>) -> f64 {
        let chars: Vec<char> = chunk.chars().collect();
        let m = chars.len();
        if m == 0 {
            return 0.0;
        }
        // best[i] = (score, predecessor position, token id of incoming edge)
        let mut best: Vec<Option<(f64, usize, u32)>> = vec![None; m + 1];
        best[0] = Some((0.0, 0, 0));
        let mut buf = String::new();
        for i in 0..m {
            let (score_i, _, _) = best[i].expect("every position is reachable");
            buf.clear();
            let mut single_covered = false;
            let end = m.min(i + self.max_piece_chars);
            for j in i..end {
                buf.push(chars[j]);
                if let Some(&id) = self.lattice.get(buf.as_str()) {
                    if j == i {
                        single_covered = true;
                    }
                    let cand = score_i + self.pieces[id as usize].score;
                    relax(&mut best[j + 1], cand, i, id);
                }
            }
            if !single_covered {
                // Unknown-character fallback: a one-char edge labelled <unk>.
                let cand = score_i + self.unk_edge_score();
                relax(&mut best[i + 1], cand, i, self.unk_id);
            }
        }
        let mut path = Vec::new();
        let mut pos = m;
        while pos > 0 {
            let (_, prev, id) = best[pos].expect("reachable");
            path.push(id);
            pos = prev;
        }
        path.reverse();
        out.extend(path);
        best[m].expect("reachable").0
    }

    /// Inverse of [`Vocab::encode`] up to normalization. Special tokens other
    /// than sentinels are dropped; sentinels render as their spelling.
    pub fn decode(&self, seq: &TokenSequence) -> Result<String, TokenizerError> {
        let mut text = String::new();
        for &id in &seq.ids {
            let piece = self.pieces.get(id as usize).ok_or(TokenizerError::InvalidId {
                id,
                size: self.pieces.len(),
            })?;
            match piece.kind {
                PieceKind::Pad | PieceKind::Eos | PieceKind::Unk | PieceKind::Control => {}
                PieceKind::Sentinel(_) | PieceKind::Regular => text.push_str(&piece.text),
            }
        }
        let replaced: String = text
            .chars()
            .map(|c| if c == BOUNDARY_MARKER { ' ' } else { c })
            .collect();
        Ok(replaced.trim_start_matches(' ').to_string())
    }
}

fn relax(slot: &mut Option<(f64, usize, u32)>, score: f64, prev: usize, id: u32) {
    match slot {
        Some((cur, _, _)) if *cur >= score => {}
        _ => *slot = Some((score, prev, id)),
    }
}

/// NFKC normalization plus whitespace collapse (runs of Unicode whitespace
/// become a single space; leading and trailing whitespace is removed).
pub fn normalize(text: &str) -> String {
    let nfkc: String = text.nfkc().collect();
    let mut out = String::with_capacity(nfkc.len());
    for part in nfkc.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(part);
    }
    out
}

/// Deterministic rule-based word tokenizer used by every ROUGE and BLEU
/// computation: split on Unicode whitespace, detach leading/trailing
/// punctuation as separate tokens, lowercase-fold.
pub fn word_tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        match chars.iter().position(|c| c.is_alphanumeric()) {
            None => {
                for c in &chars {
                    tokens.push(lower_char(*c));
                }
            }
            Some(first) => {
                let last = chars
                    .iter()
                    .rposition(|c| c.is_alphanumeric())
                    .expect("position found above");
                for c in &chars[..first] {
                    tokens.push(lower_char(*c));
                }
                tokens.push(chars[first..=last].iter().flat_map(|c| c.to_lowercase()).collect());
                for c in &chars[last + 1..] {
                    tokens.push(lower_char(*c));
                }
            }
        }
    }
    tokens
}

fn lower_char(c: char) -> String {
    c.to_lowercase().collect()
}

/// Polish abbreviations that must not end a sentence even when followed by
/// whitespace and an uppercase letter. Lowercase, trailing dot included.
pub const ABBREVIATIONS: &[&str] = &[
    "prof.", "dr.", "hab.", "mgr.", "inż.", "np.", "itd.", "itp.", "m.in.", "tzn.", "tj.",
    "ul.", "al.", "św.", "ks.", "nr.", "godz.", "tys.", "mln.", "mld.", "zł.", "ok.", "im.",
    "wg.", "płk.", "gen.", "por.", "art.", "ust.", "pkt.", "woj.", "os.", "str.",
];

fn is_guarded_abbreviation(chars: &[char], dot: usize) -> bool {
    let mut start = dot;
    while start > 0 && !chars[start - 1].is_whitespace() {
        start -= 1;
    }
    // Drop opening punctuation like parentheses or quotes.
    while start < dot && !chars[start].is_alphanumeric() && chars[start] != '.' {
        start += 1;
    }
    let token: String = chars[start..dot].iter().collect();
    if token.is_empty() {
        return false;
    }
    // Single-letter initials ("A. Mickiewicz") never end a sentence.
    if token.chars().count() == 1 && token.chars().next().unwrap().is_alphabetic() {
        return true;
    }
    let mut lowered = token.to_lowercase();
    lowered.push('.');
    ABBREVIATIONS.contains(&lowered.as_str())
}

/// Split text into sentences on `.`, `!`, `?` or `…` followed by whitespace
/// and an uppercase letter or digit, guarded by [`ABBREVIATIONS`]. Each
/// returned sentence is trimmed; every non-boundary character of the input
/// belongs to exactly one sentence.
pub fn sentence_split(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        if matches!(c, '.' | '!' | '?' | '…') {
            let end = i + 1;
            let mut j = end;
            while j < chars.len() && chars[j].is_whitespace() {
                j += 1;
            }
            let boundary = j > end
                && j < chars.len()
                && (chars[j].is_uppercase() || chars[j].is_numeric())
                && !(c == '.' && is_guarded_abbreviation(&chars, i));
            if boundary {
                push_trimmed(&mut sentences, &chars[start..end]);
                start = j;
                i = j;
                continue;
            }
        }
        i += 1;
    }
    if start < chars.len() {
        push_trimmed(&mut sentences, &chars[start..]);
    }
    sentences
}

fn push_trimmed(out: &mut Vec<String>, chars: &[char]) {
    let s: String = chars.iter().collect();
    let t = s.trim();
    if !t.is_empty() {
        out.push(t.to_string());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(entries: &[(&str, f64)]) -> Vocab {
        let mut all = vec![
            ("<pad>".to_string(), 0.0),
            ("</s>".to_string(), 0.0),
            ("<unk>".to_string(), 0.0),
        ];
        all.extend(entries.iter().map(|(p, s)| (p.to_string(), *s)));
        Vocab::from_entries(all).unwrap()
    }

    #[test]
    fn minimal_vocab_loads() {
        let v = Vocab::from_entries(vec![
            ("<pad>".into(), 0.0),
            ("</s>".into(), 0.0),
            ("<unk>".into(), 0.0),
        ])
        .unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v.pad_id(), 0);
        assert_eq!(v.eos_id(), 1);
        assert_eq!(v.unk_id(), 2);
    }

    #[test]
    fn load_minimal_tsv_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.tsv");
        std::fs::write(&path, "<pad>\t0\n</s>\t0\n<unk>\t0\n").unwrap();
        let v = Vocab::load(&path).unwrap();
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn load_reports_malformed_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.tsv");
        std::fs::write(&path, "<pad>\t0\n</s>\t0\n<unk> 0\n").unwrap();
        let err = Vocab::load(&path).unwrap_err();
        assert!(matches!(err, TokenizerError::ParseError { line: 3, .. }));

        std::fs::write(&path, "<pad>\t0\n</s>\tabc\n<unk>\t0\n").unwrap();
        let err = Vocab::load(&path).unwrap_err();
        assert!(matches!(err, TokenizerError::ParseError { line: 2, .. }));
    }

    #[test]
    fn load_50k_line_vocab() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("big.tsv");
        let mut contents = String::from("<pad>\t0\n</s>\t0\n<unk>\t0\n");
        for i in 0..49_997 {
            contents.push_str(&format!("piece{i}\t-{}\n", 1.0 + (i % 7) as f64));
        }
        std::fs::write(&path, contents).unwrap();
        let v = Vocab::load(&path).unwrap();
        assert_eq!(v.len(), 50_000);
    }

    #[test]
    fn duplicate_piece_rejected() {
        let err = Vocab::from_entries(vec![
            ("<pad>".into(), 0.0),
            ("</s>".into(), 0.0),
            ("<unk>".into(), 0.0),
            ("<pad>".into(), 0.0),
        ])
        .unwrap_err();
        assert!(matches!(err, TokenizerError::DuplicatePiece { line: 4, .. }));
    }

    #[test]
    fn missing_specials_rejected() {
        let err = Vocab::from_entries(vec![("<pad>".into(), 0.0), ("</s>".into(), 0.0)])
            .unwrap_err();
        assert!(matches!(err, TokenizerError::MissingSpecial("<unk>")));
    }

    #[test]
    fn sentinels_must_fill_top_ids() {
        // <extra_id_0> not at the top id.
        let err = Vocab::from_entries(vec![
            ("<pad>".into(), 0.0),
            ("</s>".into(), 0.0),
            ("<extra_id_0>".into(), 0.0),
            ("<unk>".into(), 0.0),
        ])
        .unwrap_err();
        assert!(matches!(err, TokenizerError::SentinelLayout));

        let v = Vocab::from_entries(vec![
            ("<pad>".into(), 0.0),
            ("</s>".into(), 0.0),
            ("<unk>".into(), 0.0),
            ("<extra_id_1>".into(), 0.0),
            ("<extra_id_0>".into(), 0.0),
        ])
        .unwrap();
        assert_eq!(v.sentinel_id(0), Some(4));
        assert_eq!(v.sentinel_id(1), Some(3));
        assert_eq!(v.sentinel_id(2), None);
    }

    #[test]
    fn positive_regular_score_rejected() {
        let err = Vocab::from_entries(vec![
            ("<pad>".into(), 0.0),
            ("</s>".into(), 0.0),
            ("<unk>".into(), 0.0),
            ("a".into(), 0.5),
        ])
        .unwrap_err();
        assert!(matches!(err, TokenizerError::ParseError { line: 4, .. }));
    }

    #[test]
    fn viterbi_prefers_high_score_piece() {
        // score("ab") = -1.0 beats score("a") + score("b") = -4.0
        let v = toy(&[("ab", -1.0), ("a", -2.0), ("b", -2.0)]);
        let seg = v.segment("ab");
        assert_eq!(seg.pieces, vec!["ab"]);
        assert!((seg.total_score - -1.0).abs() < 1e-12);
    }

    #[test]
    fn viterbi_combines_when_cheaper() {
        let v = toy(&[("ab", -5.0), ("a", -1.0), ("b", -1.0)]);
        let seg = v.segment("ab");
        assert_eq!(seg.pieces, vec!["a", "b"]);
        assert!((seg.total_score - -2.0).abs() < 1e-12);
    }

    #[test]
    fn empty_input_encodes_to_empty() {
        let v = toy(&[("a", -1.0)]);
        assert!(v.encode("").is_empty());
        assert!(v.encode("   ").is_empty());
    }

    #[test]
    fn unknown_character_maps_to_unk() {
        let v = toy(&[("a", -1.0)]);
        let seq = v.encode("q");
        assert_eq!(seq.ids, vec![v.unk_id()]);
    }

    #[test]
    fn marker_vocab_round_trips_spaces() {
        let v = toy(&[("\u{2581}kot", -1.0), ("\u{2581}ma", -1.5), ("\u{2581}", -3.0)]);
        let seq = v.encode("kot ma");
        let text = v.decode(&seq).unwrap();
        assert_eq!(text, "kot ma");
    }

    #[test]
    fn decode_round_trip_single_chunk() {
        let v = toy(&[("k", -1.0), ("o", -1.0), ("t", -1.0), ("kot", -2.0)]);
        let seq = v.encode("kot");
        assert_eq!(v.decode(&seq).unwrap(), "kot");
    }

    #[test]
    fn decode_drops_pad_and_eos() {
        let v = toy(&[("a", -1.0)]);
        let seq = TokenSequence::new(vec![v.pad_id(), v.eos_id()]);
        assert_eq!(v.decode(&seq).unwrap(), "");
    }

    #[test]
    fn decode_renders_sentinel_spelling() {
        let v = Vocab::from_entries(vec![
            ("<pad>".into(), 0.0),
            ("</s>".into(), 0.0),
            ("<unk>".into(), 0.0),
            ("a".into(), -1.0),
            ("<extra_id_0>".into(), 0.0),
        ])
        .unwrap();
        let seq = TokenSequence::new(vec![3, 4, 3]);
        assert_eq!(v.decode(&seq).unwrap(), "a<extra_id_0>a");
    }

    #[test]
    fn decode_rejects_out_of_range_id() {
        let v = toy(&[("a", -1.0)]);
        let err = v.decode(&TokenSequence::new(vec![99])).unwrap_err();
        assert!(matches!(err, TokenizerError::InvalidId { id: 99, .. }));
    }

    #[test]
    fn normalize_collapses_whitespace_and_applies_nfkc() {
        assert_eq!(normalize("a  b"), "a b");
        assert_eq!(normalize("  a\tb\n"), "a b");
        // NFKC: fullwidth A -> A, no-break space -> space
        assert_eq!(normalize("Ａ\u{a0}b"), "A b");
    }

    #[test]
    fn word_tokenize_detaches_punctuation_and_lowercases() {
        assert_eq!(word_tokenize("Ala ma kota."), vec!["ala", "ma", "kota", "."]);
        assert_eq!(word_tokenize(""), Vec::<String>::new());
        assert_eq!(word_tokenize("a  b"), vec!["a", "b"]);
        assert_eq!(word_tokenize("«Kot», pies!"), vec!["«", "kot", "»", ",", "pies", "!"]);
        // Interior punctuation stays attached.
        assert_eq!(word_tokenize("m.in. e-mail"), vec!["m.in", ".", "e-mail"]);
    }

    #[test]
    fn sentence_split_basic() {
        let s = sentence_split("A kot spał. Pies biegł.");
        assert_eq!(s, vec!["A kot spał.", "Pies biegł."]);
    }

    #[test]
    fn sentence_split_no_terminator_is_one_sentence() {
        let s = sentence_split("bez kropki na końcu");
        assert_eq!(s, vec!["bez kropki na końcu"]);
    }

    #[test]
    fn sentence_split_abbreviation_guard() {
        let s = sentence_split("Prof. Nowak wstał.");
        assert_eq!(s, vec!["Prof. Nowak wstał."]);
        let s = sentence_split("Spotkanie odbyło się np. W czwartek.");
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn sentence_split_initial_guard() {
        let s = sentence_split("A. Mickiewicz pisał. Długo pisał.");
        assert_eq!(s, vec!["A. Mickiewicz pisał.", "Długo pisał."]);
    }

    #[test]
    fn sentence_split_requires_uppercase_or_digit() {
        let s = sentence_split("wersja 2. wyszła wczoraj");
        assert_eq!(s.len(), 1);
        let s = sentence_split("Koniec. 3 dni później wrócił.");
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn sentence_split_empty() {
        assert!(sentence_split("").is_empty());
        assert!(sentence_split("   ").is_empty());
    }

    #[test]
    fn sentence_lengths_account_for_all_non_boundary_chars() {
        let text = "  Ala ma kota. Pies ją widział!  Nic się nie stało.";
        let sentences = sentence_split(text);
        let sum: usize = sentences.iter().map(|s| s.chars().count()).sum();
        // Boundary whitespace: 2 leading, 1 + 2 between sentences.
        let boundary = 2 + 1 + 2;
        assert_eq!(sum + boundary, text.chars().count());
    }
}
