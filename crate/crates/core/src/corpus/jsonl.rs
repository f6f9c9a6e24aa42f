//! One JSON object per line: `{"text": ..., "label": ..., "domain": ...}`.
//! Labels are a class name or a probability array over the class list.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use super::dataset::{Example, LabelValue, TextDataset};
use super::tokenize;
use crate::error::{Error, Result};

enum RawLabel {
    Class(String),
    Soft(Vec<f64>),
}

struct RawRecord {
    tokens: Vec<String>,
    label: RawLabel,
    domain: String,
    line: usize,
}

pub fn load_jsonl(path: impl AsRef<Path>) -> Result<TextDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_jsonl(BufReader::new(file), path, None)
}

/// Like [`load_jsonl`] but maps class names onto a fixed class list, which is
/// required when a file carries only soft labels.
pub fn load_jsonl_with_classes(path: impl AsRef<Path>, classes: &[String]) -> Result<TextDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_jsonl(BufReader::new(file), path, Some(classes))
}

/// Parses JSONL from any reader; `origin` names the source in error messages.
pub fn read_jsonl<R: BufRead>(reader: R, origin: &Path, classes: Option<&[String]>) -> Result<TextDataset> {
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(parse_record(&line, line_no).map_err(|m| Error::parse(origin, line_no, m))?);
    }

    let classes: Vec<String> = match classes {
        Some(c) => c.to_vec(),
        None => {
            let names: BTreeSet<&str> = records
                .iter()
                .filter_map(|r| match &r.label {
                    RawLabel::Class(c) => Some(c.as_str()),
                    RawLabel::Soft(_) => None,
                })
                .collect();
            if names.is_empty() {
                // soft labels only: fall back to positional class names
                let width = records
                    .iter()
                    .find_map(|r| match &r.label {
                        RawLabel::Soft(p) => Some(p.len()),
                        RawLabel::Class(_) => None,
                    })
                    .unwrap_or(0);
                (0..width).map(|i| i.to_string()).collect()
            } else {
                names.into_iter().map(str::to_string).collect()
            }
        }
    };
    let domains: Vec<String> = records
        .iter()
        .map(|r| r.domain.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(str::to_string)
        .collect();

    let mut examples = Vec::with_capacity(records.len());
    for record in records {
        let label = match record.label {
            RawLabel::Class(name) => match classes.iter().position(|c| *c == name) {
                Some(i) => LabelValue::Hard(i),
                None => return Err(Error::parse(origin, record.line, format!("unknown class {name:?}"))),
            },
            RawLabel::Soft(p) => {
                if p.len() != classes.len() {
                    return Err(Error::parse(
                        origin,
                        record.line,
                        format!(
                            "soft label has {} entries but there are {} classes",
                            p.len(),
                            classes.len()
                        ),
                    ));
                }
                LabelValue::soft(p).map_err(|e| Error::parse(origin, record.line, e.to_string()))?
            }
        };
        examples.push(Example::original(record.tokens, label, record.domain));
    }
    if classes.is_empty() {
        return Err(Error::parse(origin, 0, "no labels found"));
    }
    TextDataset::new(examples, classes, domains)
}

fn parse_record(line: &str, line_no: usize) -> std::result::Result<RawRecord, String> {
    let value: Value = serde_json::from_str(line).map_err(|e| format!("malformed JSON: {e}"))?;
    let obj = value.as_object().ok_or("record is not a JSON object")?;
    let text = obj
        .get("text")
        .and_then(Value::as_str)
        .ok_or("missing string field \"text\"")?;
    let domain = obj
        .get("domain")
        .and_then(Value::as_str)
        .ok_or("missing string field \"domain\"")?;
    let label = match obj.get("label") {
        Some(Value::String(s)) => RawLabel::Class(s.clone()),
        Some(Value::Array(items)) => RawLabel::Soft(
            items
                .iter()
                .map(|v| v.as_f64().ok_or("soft label entries must be numbers"))
                .collect::<std::result::Result<_, _>>()?,
        ),
        Some(other) => return Err(format!("unknown label type: {other}")),
        None => return Err("missing field \"label\"".into()),
    };
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return Err("empty text".into());
    }
    Ok(RawRecord {
        tokens,
        label,
        domain: domain.to_string(),
        line: line_no,
    })
}

#[derive(Serialize)]
#[serde(untagged)]
enum LabelOut<'a> {
    Class(&'a str),
    Soft(&'a [f64]),
}

#[derive(Serialize)]
struct RecordOut<'a> {
    text: String,
    label: LabelOut<'a>,
    domain: &'a str,
}

pub fn write_jsonl(dataset: &TextDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    write_jsonl_to(dataset, &mut writer).map_err(|e| Error::io(path, e))?;
    writer.flush().map_err(|e| Error::io(path, e))
}

pub fn write_jsonl_to<W: Write>(dataset: &TextDataset, writer: &mut W) -> std::io::Result<()> {
    for example in &dataset.examples {
        let label = match &example.label {
            LabelValue::Hard(c) => LabelOut::Class(&dataset.classes[*c]),
            LabelValue::Soft(p) => LabelOut::Soft(p),
        };
        let record = RecordOut {
            text: example.tokens.join(" "),
            label,
            domain: &example.domain,
        };
        serde_json::to_writer(&mut *writer, &record)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
