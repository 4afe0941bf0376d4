//! Prompted task formatting and exact-match label decoding.
//!
//! The built-in registry reproduces the benchmark's classification task
//! inventory verbatim (prefixes and label strings); `dump_registry_json`
//! serializes it for bit-exact auditing. Formatting follows the template
//! `<prefix1>: text1 <prefix2>: text2`, decoder-only models append
//! ` [SEP]`, and translation tasks prepend a direction token instead of
//! prefixes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tokenizer::Vocab;

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("label {label:?} is not in the label set of task {task}")]
    InvalidLabel { task: String, label: String },
    #[error("task {task} takes {expected} text field(s), got {got}")]
    ArityError {
        task: String,
        expected: usize,
        got: usize,
    },
    #[error("task {0} is not a classification task")]
    NotClassification(String),
    #[error("unknown task {0:?}")]
    UnknownTask(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchitectureStyle {
    EncoderDecoder,
    DecoderOnly,
}

/// Static description of one benchmark task: its prompt prefixes, label
/// inventory (classification only) and optional translation direction
/// token.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub name: String,
    pub prefix1: String,
    pub prefix2: Option<String>,
    pub labels: Option<Vec<String>>,
    pub style: ArchitectureStyle,
    pub direction_token: Option<String>,
}

impl TaskSpec {
    pub fn classification(
        name: &str,
        prefix1: &str,
        prefix2: Option<&str>,
        labels: &[&str],
    ) -> Self {
        Self {
            name: name.to_string(),
            prefix1: prefix1.to_string(),
            prefix2: prefix2.map(str::to_string),
            labels: Some(labels.iter().map(|l| l.to_string()).collect()),
            style: ArchitectureStyle::EncoderDecoder,
            direction_token: None,
        }
    }

    pub fn generation(name: &str, prefix1: &str, prefix2: Option<&str>) -> Self {
        Self {
            name: name.to_string(),
            prefix1: prefix1.to_string(),
            prefix2: prefix2.map(str::to_string),
            labels: None,
            style: ArchitectureStyle::EncoderDecoder,
            direction_token: None,
        }
    }

    /// Translation task: the direction token is prepended to the raw
    /// source sentence and no prefixes are used.
    pub fn translation(name: &str, direction_token: &str) -> Self {
        Self {
            name: name.to_string(),
            prefix1: String::new(),
            prefix2: None,
            labels: None,
            style: ArchitectureStyle::EncoderDecoder,
            direction_token: Some(direction_token.to_string()),
        }
    }

    pub fn with_style(mut self, style: ArchitectureStyle) -> Self {
        self.style = style;
        self
    }

    pub fn is_classification(&self) -> bool {
        self.labels.as_ref().map(|l| !l.is_empty()).unwrap_or(false)
    }
}

/// A prompted (source, target) text pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormattedExample {
    pub source: String,
    pub target: String,
}

/// Raw benchmark record as read from JSONL task files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task: String,
    pub text1: String,
    #[serde(default)]
    pub text2: Option<String>,
    pub target: String,
}

/// Format one record. Classification targets must be in the label set.
pub fn format_example(
    spec: &TaskSpec,
    text1: &str,
    text2: Option<&str>,
    target: &str,
) -> Result<FormattedExample, TaskError> {
    if let Some(labels) = &spec.labels {
        if !labels.iter().any(|l| l == target) {
            return Err(TaskError::InvalidLabel {
                task: spec.name.clone(),
                label: target.to_string(),
            });
        }
    }
    let expected = if spec.prefix2.is_some() { 2 } else { 1 };
    let got = if text2.is_some() { 2 } else { 1 };
    if spec.direction_token.is_none() && expected != got {
        return Err(TaskError::ArityError {
            task: spec.name.clone(),
            expected,
            got,
        });
    }

    let mut source = if let Some(direction) = &spec.direction_token {
        if text2.is_some() {
            return Err(TaskError::ArityError {
                task: spec.name.clone(),
                expected: 1,
                got,
            });
        }
        format!("{direction} {text1}")
    } else {
        match (&spec.prefix2, text2) {
            (Some(p2), Some(t2)) => format!("{}: {} {}: {}", spec.prefix1, text1, p2, t2),
            _ => format!("{}: {}", spec.prefix1, text1),
        }
    };
    if spec.style == ArchitectureStyle::DecoderOnly {
        source.push_str(" [SEP]");
    }
    Ok(FormattedExample {
        source,
        target: target.to_string(),
    })
}

/// Maximum target length in tokens for a classification task: the longest
/// label under the given vocabulary, plus one for EOS.
pub fn max_target_length(spec: &TaskSpec, vocab: &Vocab) -> Result<usize, TaskError> {
    let labels = spec
        .labels
        .as_ref()
        .filter(|l| !l.is_empty())
        .ok_or_else(|| TaskError::NotClassification(spec.name.clone()))?;
    let longest = labels
        .iter()
        .map(|l| vocab.encode(l).len())
        .max()
        .expect("nonempty label set");
    Ok(longest + 1)
}

/// Strip surrounding whitespace and any `<pad>`/`</s>` renderings from
/// generated text.
fn clean_generated(generated: &str) -> &str {
    let mut t = generated.trim();
    loop {
        let before = t;
        t = t.trim();
        for marker in ["<pad>", "</s>"] {
            if let Some(rest) = t.strip_prefix(marker) {
                t = rest;
            }
            if let Some(rest) = t.strip_suffix(marker) {
                t = rest;
            }
        }
        if t == before {
            return t;
        }
    }
}

/// Exact-match decoding: the label byte-equal to the cleaned generated
/// text, if any. Near-misses are misses; no case folding, no fuzzy match.
pub fn decode_label<'a>(spec: &'a TaskSpec, generated: &str) -> Option<&'a str> {
    let cleaned = clean_generated(generated);
    spec.labels
        .as_ref()?
        .iter()
        .find(|l| l.as_str() == cleaned)
        .map(|l| l.as_str())
}

/// The classification task inventory: names, prefixes and every label
/// string, in benchmark table order.
pub fn registry() -> Vec<TaskSpec> {
    vec![
        TaskSpec::classification(
            "NKJP-NER",
            "zdanie",
            None,
            &["geograficzna", "brak", "organizacja", "osoba", "miejsce", "czas"],
        ),
        TaskSpec::classification("CBD", "zdanie", None, &["neutralna", "przemoc"]),
        TaskSpec::classification(
            "Czy wiesz?",
            "pytanie",
            Some("odpowiedź"),
            &["fałsz", "prawda"],
        ),
        TaskSpec::classification(
            "PolEmo2.0",
            "zdanie",
            None,
            &["niejednoznaczny", "negatywny", "pozytywny", "neutralny"],
        ),
        TaskSpec::classification("AR", "zdanie", None, &["1.0", "2.0", "3.0", "4.0", "5.0"]),
        TaskSpec::classification(
            "PSC",
            "streszczenie 1",
            Some("streszczenie 2"),
            &["nie_parafraza", "parafraza"],
        ),
        TaskSpec::classification(
            "CDSC-E",
            "zdanie 1",
            Some("zdanie 2"),
            &["neutralny", "wynikanie", "sprzeczność"],
        ),
    ]
}

/// Question answering over retrieved passages: question plus context,
/// free-form answer.
pub fn qa_spec() -> TaskSpec {
    TaskSpec::generation("QA", "pytanie", Some("kontekst"))
}

/// Format a QA example: `pytanie: <q> kontekst: <p1> ... <pN>`, passages
/// joined by single spaces.
pub fn format_qa(
    question: &str,
    passages: &[impl AsRef<str>],
    answer: &str,
) -> Result<FormattedExample, TaskError> {
    let context = passages
        .iter()
        .map(|p| p.as_ref())
        .collect::<Vec<_>>()
        .join(" ");
    format_example(&qa_spec(), question, Some(&context), answer)
}

/// Polish -> English translation.
pub fn mt_to_english() -> TaskSpec {
    TaskSpec::translation("MT pl-en", "<2en>")
}

/// English -> Polish translation.
pub fn mt_to_polish() -> TaskSpec {
    TaskSpec::translation("MT en-pl", "<2pl>")
}

/// Look up a spec by name across the registry and the QA/MT extras.
pub fn find(name: &str) -> Result<TaskSpec, TaskError> {
    registry()
        .into_iter()
        .chain([qa_spec(), mt_to_english(), mt_to_polish()])
        .find(|s| s.name == name)
        .ok_or_else(|| TaskError::UnknownTask(name.to_string()))
}

#[derive(Serialize)]
struct SpecDump<'a> {
    task: &'a str,
    prefix1: &'a str,
    prefix2: Option<&'a str>,
    labels: &'a [String],
}

/// Pretty JSON rendering of the classification registry for auditing.
/// Stable field and row order; ends with a newline.
pub fn dump_registry_json() -> String {
    let specs = registry();
    let rows: Vec<SpecDump> = specs
        .iter()
        .map(|s| SpecDump {
            task: &s.name,
            prefix1: &s.prefix1,
            prefix2: s.prefix2.as_deref(),
            labels: s.labels.as_deref().unwrap_or(&[]),
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&rows).expect("static data serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn by_name(name: &str) -> TaskSpec {
        find(name).unwrap()
    }

    #[test]
    fn nkjp_ner_formatting() {
        let spec = by_name("NKJP-NER");
        let ex = format_example(&spec, "Jan mieszka w Polsce", None, "osoba").unwrap();
        assert_eq!(ex.source, "zdanie: Jan mieszka w Polsce");
        assert_eq!(ex.target, "osoba");
    }

    #[test]
    fn two_input_formatting() {
        let spec = by_name("Czy wiesz?");
        let ex = format_example(&spec, "Czy kot ma ogon?", Some("Ma."), "prawda").unwrap();
        assert_eq!(ex.source, "pytanie: Czy kot ma ogon? odpowiedź: Ma.");
        assert_eq!(ex.target, "prawda");
    }

    #[test]
    fn decoder_only_appends_sep() {
        let spec = by_name("CBD").with_style(ArchitectureStyle::DecoderOnly);
        let ex = format_example(&spec, "tekst", None, "neutralna").unwrap();
        assert_eq!(ex.source, "zdanie: tekst [SEP]");
    }

    #[test]
    fn translation_prepends_direction_token() {
        let ex = format_example(&mt_to_english(), "kot", None, "cat").unwrap();
        assert_eq!(ex.source, "<2en> kot");
        assert_eq!(ex.target, "cat");
        let ex = format_example(&mt_to_polish(), "cat", None, "kot").unwrap();
        assert_eq!(ex.source, "<2pl> cat");
    }

    #[test]
    fn qa_formatting_joins_passages() {
        let ex = format_qa(
            "Kto napisał Pana Tadeusza?",
            &["Adam Mickiewicz napisał epopeję.", "Wydano ją w Paryżu."],
            "Adam Mickiewicz",
        )
        .unwrap();
        assert_eq!(
            ex.source,
            "pytanie: Kto napisał Pana Tadeusza? kontekst: Adam Mickiewicz napisał epopeję. Wydano ją w Paryżu."
        );
        assert_eq!(ex.target, "Adam Mickiewicz");
    }

    #[test]
    fn unknown_label_rejected() {
        let spec = by_name("PolEmo2.0");
        let err = format_example(&spec, "tekst", None, "pozytywne").unwrap_err();
        assert!(matches!(err, TaskError::InvalidLabel { .. }));
    }

    #[test]
    fn arity_mismatch_rejected() {
        let spec = by_name("CDSC-E");
        let err = format_example(&spec, "jeden", None, "neutralny").unwrap_err();
        assert!(matches!(err, TaskError::ArityError { expected: 2, got: 1, .. }));
        let spec = by_name("AR");
        let err = format_example(&spec, "jeden", Some("dwa"), "1.0").unwrap_err();
        assert!(matches!(err, TaskError::ArityError { expected: 1, got: 2, .. }));
    }

    #[test]
    fn decode_label_exact_match_only() {
        let spec = by_name("PolEmo2.0");
        assert_eq!(decode_label(&spec, "pozytywny"), Some("pozytywny"));
        assert_eq!(decode_label(&spec, "pozytywne"), None);
        assert_eq!(decode_label(&spec, " prawda "), None); // not in this task
        let spec = by_name("Czy wiesz?");
        assert_eq!(decode_label(&spec, " prawda "), Some("prawda"));
        assert_eq!(decode_label(&spec, "prawda</s>"), Some("prawda"));
        assert_eq!(decode_label(&spec, "<pad> fałsz </s>"), Some("fałsz"));
    }

    #[test]
    fn decode_label_never_invents() {
        let spec = by_name("CBD");
        assert_eq!(decode_label(&spec, "coś zupełnie innego"), None);
        assert_eq!(decode_label(&spec, ""), None);
    }

    #[test]
    fn max_target_length_counts_pieces_plus_eos() {
        let vocab = Vocab::from_entries(vec![
            ("<pad>".into(), 0.0),
            ("</s>".into(), 0.0),
            ("<unk>".into(), 0.0),
            ("a".into(), -1.0),
            ("ab".into(), -1.0),
        ])
        .unwrap();
        let spec = TaskSpec::classification("toy", "p", None, &["a", "ab"]);
        assert_eq!(max_target_length(&spec, &vocab).unwrap(), 2);
    }

    #[test]
    fn max_target_length_tracks_longest_label() {
        // "nie_parafraza" -> nie,_,para,fraza (4 pieces);
        // "parafraza" -> para,fraza (2 pieces)
        let vocab = Vocab::from_entries(vec![
            ("<pad>".into(), 0.0),
            ("</s>".into(), 0.0),
            ("<unk>".into(), 0.0),
            ("nie".into(), -1.0),
            ("_".into(), -1.0),
            ("para".into(), -1.0),
            ("fraza".into(), -1.0),
        ])
        .unwrap();
        assert_eq!(vocab.encode("nie_parafraza").len(), 4);
        assert_eq!(vocab.encode("parafraza").len(), 2);
        let spec = find("PSC").unwrap();
        assert_eq!(max_target_length(&spec, &vocab).unwrap(), 5);
    }

    #[test]
    fn max_target_length_rejects_generation() {
        let vocab = Vocab::from_entries(vec![
            ("<pad>".into(), 0.0),
            ("</s>".into(), 0.0),
            ("<unk>".into(), 0.0),
        ])
        .unwrap();
        let err = max_target_length(&qa_spec(), &vocab).unwrap_err();
        assert!(matches!(err, TaskError::NotClassification(_)));
        let empty = TaskSpec {
            labels: Some(vec![]),
            ..TaskSpec::generation("empty", "p", None)
        };
        assert!(matches!(
            max_target_length(&empty, &vocab),
            Err(TaskError::NotClassification(_))
        ));
    }

    #[test]
    fn registry_has_24_labels() {
        let total: usize = registry()
            .iter()
            .map(|s| s.labels.as_ref().map(|l| l.len()).unwrap_or(0))
            .sum();
        assert_eq!(total, 24);
    }

    #[test]
    fn closed_loop_over_full_label_inventory() {
        for spec in registry() {
            let labels = spec.labels.clone().unwrap();
            for label in &labels {
                let text2 = spec.prefix2.as_ref().map(|_| "drugi tekst");
                let ex = format_example(&spec, "pierwszy tekst", text2, label).unwrap();
                assert_eq!(
                    decode_label(&spec, &ex.target),
                    Some(label.as_str()),
                    "task {} label {label}",
                    spec.name
                );
            }
        }
    }

    #[test]
    fn formatting_is_injective_given_distinct_prefixes() {
        let spec = by_name("CDSC-E");
        let a = format_example(&spec, "x", Some("y z"), "neutralny").unwrap();
        let b = format_example(&spec, "x y", Some("z"), "neutralny").unwrap();
        assert_ne!(a.source, b.source);
    }

    #[test]
    fn unknown_task_lookup_fails() {
        assert!(matches!(find("nope"), Err(TaskError::UnknownTask(_))));
    }
}
