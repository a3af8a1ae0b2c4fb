//! Conversation corpora: JSON-lines ingestion, dialogue grouping, and
//! rendering of model inputs from dialogue context windows.

use std::collections::HashMap;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::inventory::EmotionInventory;

/// The classification marker that starts every rendered input.
pub const CLS_TOKEN: &str = "<cls>";

/// Marker for the speaker holding first-appearance ordinal `slot` within a
/// dialogue.
pub fn speaker_token(slot: usize) -> String {
    format!("<spk:{slot}>")
}

/// Whether a token is one of the rendering markers rather than text.
pub fn is_marker_token(token: &str) -> bool {
    token == CLS_TOKEN || (token.starts_with("<spk:") && token.ends_with('>'))
}

/// One utterance: who spoke, the (whitespace-normalized) text, and the gold
/// emotion index into the corpus's inventory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Utterance {
    pub speaker_id: String,
    pub text: String,
    pub gold: usize,
}

/// An ordered list of utterances sharing a dialogue id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dialogue {
    pub dialogue_id: String,
    pub turns: Vec<Utterance>,
}

/// One model input: a rendered context window ending at (and labeled by) a
/// target turn, optionally extended with future turns for teacher training.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSample {
    /// `"{dialogue_id}:{turn_index}"`.
    pub sample_id: String,
    pub dialogue_id: String,
    pub turn_index: usize,
    pub rendered: String,
    pub gold: usize,
    /// How many future turns were actually appended (0, 1, or 2 — fewer
    /// than requested at dialogue ends).
    pub future_turns_used: usize,
}

#[derive(Deserialize)]
struct UtteranceRecord {
    dialogue_id: String,
    speaker: String,
    text: String,
    emotion: String,
}

/// Collapses all whitespace runs (including newlines) to single spaces.
fn normalize_text(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses a JSON-lines corpus file. Each line holds
/// `{"dialogue_id":...,"speaker":...,"text":...,"emotion":...}`.
/// Utterances are grouped by dialogue id, dialogues ordered by first
/// appearance, turns kept in file order. Unknown emotions and empty texts
/// are schema errors naming the offending line.
pub fn parse_corpus(path: &Path, inventory: &EmotionInventory) -> Result<Vec<Dialogue>> {
    let file = std::fs::File::open(path)?;
    parse_corpus_reader(
        BufReader::new(file),
        &path.display().to_string(),
        inventory,
    )
}

/// Like [`parse_corpus`] but from any buffered reader; `path_label` is used
/// in error messages. An empty input yields an empty corpus.
pub fn parse_corpus_reader(
    reader: impl BufRead,
    path_label: &str,
    inventory: &EmotionInventory,
) -> Result<Vec<Dialogue>> {
    let schema_err = |line: usize, message: String| Error::Schema {
        path: path_label.to_string(),
        line,
        message,
    };
    let mut dialogues: Vec<Dialogue> = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: UtteranceRecord = serde_json::from_str(&line)
            .map_err(|e| schema_err(line_no, e.to_string()))?;
        let text = normalize_text(&record.text);
        if text.is_empty() {
            return Err(schema_err(
                line_no,
                format!("empty text in dialogue {:?}", record.dialogue_id),
            ));
        }
        let gold = inventory.index_of(&record.emotion).ok_or_else(|| {
            schema_err(
                line_no,
                format!(
                    "unknown emotion {:?} (inventory: {})",
                    record.emotion,
                    inventory.names().join(", ")
                ),
            )
        })?;
        let utterance = Utterance {
            speaker_id: record.speaker,
            text,
            gold,
        };
        match by_id.get(&record.dialogue_id) {
            Some(&i) => dialogues[i].turns.push(utterance),
            None => {
                by_id.insert(record.dialogue_id.clone(), dialogues.len());
                dialogues.push(Dialogue {
                    dialogue_id: record.dialogue_id,
                    turns: vec![utterance],
                });
            }
        }
    }
    Ok(dialogues)
}

fn check_future_turns(future_turns: usize) -> Result<()> {
    if future_turns != 0 && future_turns != 2 {
        return Err(Error::InvalidInput(format!(
            "future_turns must be 0 or 2, got {future_turns}"
        )));
    }
    Ok(())
}

/// First-appearance speaker slot for every turn of a dialogue.
fn speaker_slots(dialogue: &Dialogue) -> Vec<usize> {
    let mut slot_of: HashMap<&str, usize> = HashMap::new();
    dialogue
        .turns
        .iter()
        .map(|t| {
            let next = slot_of.len();
            *slot_of.entry(t.speaker_id.as_str()).or_insert(next)
        })
        .collect()
}

/// Renders the model input for turn `turn_index`: the classification marker
/// followed by up to `window` turns of context ending at the target turn,
/// each turn prefixed with its speaker marker, then up to `future_turns`
/// following turns (truncated at the dialogue end) in the same format.
pub fn render_input(
    dialogue: &Dialogue,
    turn_index: usize,
    future_turns: usize,
    window: usize,
) -> Result<TrainingSample> {
    check_future_turns(future_turns)?;
    if window < 1 {
        return Err(Error::InvalidInput("window must be at least 1".into()));
    }
    let n = dialogue.turns.len();
    if turn_index >= n {
        return Err(Error::InvalidInput(format!(
            "turn index {turn_index} out of range for dialogue {:?} with {n} turns",
            dialogue.dialogue_id
        )));
    }
    let slots = speaker_slots(dialogue);
    let start = (turn_index + 1).saturating_sub(window);
    let end = (turn_index + future_turns).min(n - 1);
    let mut rendered = String::from(CLS_TOKEN);
    for (slot, turn) in slots[start..=end].iter().zip(&dialogue.turns[start..=end]) {
        rendered.push(' ');
        rendered.push_str(&speaker_token(*slot));
        rendered.push(' ');
        rendered.push_str(&turn.text);
    }
    Ok(TrainingSample {
        sample_id: format!("{}:{}", dialogue.dialogue_id, turn_index),
        dialogue_id: dialogue.dialogue_id.clone(),
        turn_index,
        rendered,
        gold: dialogue.turns[turn_index].gold,
        future_turns_used: end - turn_index,
    })
}

/// Renders one sample per utterance, dialogues in corpus order, turns in
/// dialogue order.
pub fn enumerate_samples(
    corpus: &[Dialogue],
    future_turns: usize,
    window: usize,
) -> Result<Vec<TrainingSample>> {
    check_future_turns(future_turns)?;
    let mut samples = Vec::with_capacity(corpus.iter().map(|d| d.turns.len()).sum());
    for dialogue in corpus {
        for turn_index in 0..dialogue.turns.len() {
            samples.push(render_input(dialogue, turn_index, future_turns, window)?);
        }
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn toy_inventory() -> EmotionInventory {
        use crate::inventory::Sentiment::*;
        EmotionInventory::new(&[
            ("happy", Positive),
            ("sad", Negative),
            ("angry", Negative),
            ("neutral", Neutral),
        ])
        .unwrap()
    }

    fn two_turn_dialogue() -> Dialogue {
        Dialogue {
            dialogue_id: "d1".into(),
            turns: vec![
                Utterance {
                    speaker_id: "a".into(),
                    text: "hi".into(),
                    gold: 0,
                },
                Utterance {
                    speaker_id: "b".into(),
                    text: "hello".into(),
                    gold: 3,
                },
            ],
        }
    }

    #[test]
    fn parses_and_groups_by_dialogue() {
        let text = concat!(
            "{\"dialogue_id\":\"d1\",\"speaker\":\"a\",\"text\":\"hi there\",\"emotion\":\"happy\"}\n",
            "{\"dialogue_id\":\"d2\",\"speaker\":\"x\",\"text\":\"report due\",\"emotion\":\"neutral\"}\n",
            "{\"dialogue_id\":\"d1\",\"speaker\":\"b\",\"text\":\"hello\",\"emotion\":\"sad\"}\n",
        );
        let corpus = parse_corpus_reader(Cursor::new(text), "<test>", &toy_inventory()).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus[0].dialogue_id, "d1");
        assert_eq!(corpus[0].turns.len(), 2);
        assert_eq!(corpus[0].turns[1].speaker_id, "b");
        assert_eq!(corpus[0].turns[1].gold, 1);
        assert_eq!(corpus[1].dialogue_id, "d2");
    }

    #[test]
    fn unknown_emotion_is_schema_error_with_line() {
        let text = concat!(
            "{\"dialogue_id\":\"d1\",\"speaker\":\"a\",\"text\":\"hi\",\"emotion\":\"happy\"}\n",
            "{\"dialogue_id\":\"d1\",\"speaker\":\"b\",\"text\":\"hm\",\"emotion\":\"bliss\"}\n",
        );
        let err =
            parse_corpus_reader(Cursor::new(text), "<test>", &toy_inventory()).unwrap_err();
        match err {
            Error::Schema { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("bliss"));
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn emotion_lookup_is_case_insensitive() {
        let text = "{\"dialogue_id\":\"d1\",\"speaker\":\"a\",\"text\":\"hi\",\"emotion\":\"Happy\"}\n";
        let corpus = parse_corpus_reader(Cursor::new(text), "<test>", &toy_inventory()).unwrap();
        assert_eq!(corpus[0].turns[0].gold, 0);
    }

    #[test]
    fn empty_text_is_schema_error() {
        let text = "{\"dialogue_id\":\"d1\",\"speaker\":\"a\",\"text\":\"  \\n \",\"emotion\":\"happy\"}\n";
        assert!(parse_corpus_reader(Cursor::new(text), "<test>", &toy_inventory()).is_err());
    }

    #[test]
    fn malformed_json_is_schema_error() {
        let err = parse_corpus_reader(Cursor::new("{oops"), "<test>", &toy_inventory())
            .unwrap_err();
        assert!(matches!(err, Error::Schema { line: 1, .. }));
    }

    #[test]
    fn empty_file_yields_empty_corpus() {
        let corpus = parse_corpus_reader(Cursor::new(""), "<test>", &toy_inventory()).unwrap();
        assert!(corpus.is_empty());
    }

    #[test]
    fn text_newlines_are_normalized_away() {
        let text =
            "{\"dialogue_id\":\"d1\",\"speaker\":\"a\",\"text\":\"hi\\nthere  friend\",\"emotion\":\"happy\"}\n";
        let corpus = parse_corpus_reader(Cursor::new(text), "<test>", &toy_inventory()).unwrap();
        assert_eq!(corpus[0].turns[0].text, "hi there friend");
    }

    #[test]
    fn render_basic_window() {
        let d = two_turn_dialogue();
        let s = render_input(&d, 1, 0, 8).unwrap();
        assert_eq!(s.rendered, "<cls> <spk:0> hi <spk:1> hello");
        assert_eq!(s.sample_id, "d1:1");
        assert_eq!(s.gold, 3);
        assert_eq!(s.future_turns_used, 0);
    }

    #[test]
    fn render_with_future_truncates_at_dialogue_end() {
        let d = two_turn_dialogue();
        let s = render_input(&d, 0, 2, 8).unwrap();
        assert_eq!(s.rendered, "<cls> <spk:0> hi <spk:1> hello");
        assert_eq!(s.future_turns_used, 1);
        let last = render_input(&d, 1, 2, 8).unwrap();
        assert_eq!(last.future_turns_used, 0);
        assert_eq!(last.rendered, "<cls> <spk:0> hi <spk:1> hello");
    }

    #[test]
    fn render_window_limits_context() {
        let d = Dialogue {
            dialogue_id: "d1".into(),
            turns: (0..5)
                .map(|i| Utterance {
                    speaker_id: if i % 2 == 0 { "a".into() } else { "b".into() },
                    text: format!("t{i}"),
                    gold: 0,
                })
                .collect(),
        };
        let s = render_input(&d, 4, 0, 2).unwrap();
        assert_eq!(s.rendered, "<cls> <spk:1> t3 <spk:0> t4");
        let s = render_input(&d, 4, 0, 1).unwrap();
        assert_eq!(s.rendered, "<cls> <spk:0> t4");
    }

    #[test]
    fn speaker_slots_follow_first_appearance() {
        let d = Dialogue {
            dialogue_id: "d1".into(),
            turns: vec![
                Utterance {
                    speaker_id: "zoe".into(),
                    text: "one".into(),
                    gold: 0,
                },
                Utterance {
                    speaker_id: "abe".into(),
                    text: "two".into(),
                    gold: 0,
                },
                Utterance {
                    speaker_id: "zoe".into(),
                    text: "three".into(),
                    gold: 0,
                },
            ],
        };
        let s = render_input(&d, 2, 0, 8).unwrap();
        assert_eq!(s.rendered, "<cls> <spk:0> one <spk:1> two <spk:0> three");
    }

    #[test]
    fn render_rejects_bad_arguments() {
        let d = two_turn_dialogue();
        assert!(render_input(&d, 2, 0, 8).is_err());
        assert!(render_input(&d, 0, 1, 8).is_err());
        assert!(render_input(&d, 0, 3, 8).is_err());
        assert!(render_input(&d, 0, 0, 0).is_err());
    }

    #[test]
    fn enumerate_yields_one_sample_per_utterance_in_order() {
        let corpus = vec![
            two_turn_dialogue(),
            Dialogue {
                dialogue_id: "d2".into(),
                turns: vec![Utterance {
                    speaker_id: "c".into(),
                    text: "solo".into(),
                    gold: 2,
                }],
            },
        ];
        let samples = enumerate_samples(&corpus, 0, 12).unwrap();
        assert_eq!(samples.len(), 3);
        let ids: Vec<&str> = samples.iter().map(|s| s.sample_id.as_str()).collect();
        assert_eq!(ids, ["d1:0", "d1:1", "d2:0"]);
    }

    #[test]
    fn enumerate_empty_corpus() {
        assert!(enumerate_samples(&[], 0, 12).unwrap().is_empty());
    }

    #[test]
    fn past_only_rendering_ignores_future_edits() {
        let mut d = two_turn_dialogue();
        let before = render_input(&d, 0, 0, 8).unwrap();
        d.turns[1].text = "completely different".into();
        let after = render_input(&d, 0, 0, 8).unwrap();
        assert_eq!(before.rendered, after.rendered);
    }

    #[test]
    fn marker_tokens_are_recognized() {
        assert!(is_marker_token("<cls>"));
        assert!(is_marker_token("<spk:0>"));
        assert!(is_marker_token("<spk:12>"));
        assert!(!is_marker_token("hello"));
        assert!(!is_marker_token("<clsx"));
    }
}
