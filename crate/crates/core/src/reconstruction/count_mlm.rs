//! Count-based masked-token model.
//!
//! For every training position the model counts the centre token under each
//! context shape `(left, right)` with `0 <= left, right <= order`. Contexts
//! are truncated at sentence boundaries, so the boundary itself is part of
//! the context. Prediction walks shapes from widest to narrowest, takes the
//! first shape whose context is free of reserved tokens and has been seen,
//! and returns add-k smoothed relative frequencies over the non-reserved
//! vocabulary. The empty (unigram) context always matches.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::ReconstructionBackend;
use crate::corpus::{Dataset, TokenId, Vocabulary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContextShape {
    pub left: usize,
    pub right: usize,
}

impl ContextShape {
    pub const UNIGRAM: ContextShape = ContextShape { left: 0, right: 0 };

    /// Shapes for `order`, widest first: total width descending, then left
    /// width descending. The unigram shape is last.
    pub fn ladder(order: usize) -> Vec<ContextShape> {
        let mut shapes: Vec<ContextShape> = (0..=order)
            .flat_map(|left| (0..=order).map(move |right| ContextShape { left, right }))
            .collect();
        shapes.sort_by(|a, b| (b.left + b.right).cmp(&(a.left + a.right)).then(b.left.cmp(&a.left)));
        shapes
    }

    /// Context key at `pos`: left length followed by the left then right
    /// tokens. `None` if the context holds a reserved token.
    fn key(&self, tokens: &[TokenId], pos: usize) -> Option<Vec<TokenId>> {
        let start = pos.saturating_sub(self.left);
        let end = (pos + 1 + self.right).min(tokens.len());
        let left = &tokens[start..pos];
        let right = &tokens[pos + 1..end];
        if left.iter().chain(right).any(|&t| Vocabulary::is_reserved(t)) {
            return None;
        }
        let mut key = Vec::with_capacity(1 + left.len() + right.len());
        key.push(left.len() as TokenId);
        key.extend_from_slice(left);
        key.extend_from_slice(right);
        Some(key)
    }
}

/// One stored count: `token` seen `count` times between `left` and `right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountEntry {
    pub shape: ContextShape,
    pub left: Vec<TokenId>,
    pub right: Vec<TokenId>,
    pub token: TokenId,
    pub count: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct ContextCounts {
    total: u64,
    counts: BTreeMap<TokenId, u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountMlmModel {
    order: usize,
    smoothing_k: f64,
    vocab: Vocabulary,
    shapes: Vec<ContextShape>,
    tables: Vec<HashMap<Vec<TokenId>, ContextCounts>>,
}

/// Counts every non-reserved training token under every context shape up to
/// half-width `order`.
pub fn train_count_mlm(
    dataset: &Dataset<TokenId>,
    vocab: &Vocabulary,
    order: usize,
    smoothing_k: f64,
) -> Result<CountMlmModel> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    dataset.check_vocabulary(vocab)?;
    let mut model = CountMlmModel::empty(vocab.clone(), order, smoothing_k)?;
    for example in &dataset.examples {
        model.observe(&example.tokens);
    }
    if model.tables.last().is_none_or(|t| t.is_empty()) {
        return Err(Error::EmptyCorpus);
    }
    Ok(model)
}

impl CountMlmModel {
    fn empty(vocab: Vocabulary, order: usize, smoothing_k: f64) -> Result<Self> {
        if !(smoothing_k.is_finite() && smoothing_k >= 0.0) {
            return Err(Error::param(
                "smoothing_k",
                format!("{smoothing_k} must be finite and >= 0"),
            ));
        }
        if vocab.num_regular() == 0 {
            return Err(Error::EmptyCorpus);
        }
        let shapes = ContextShape::ladder(order);
        let tables = vec![HashMap::new(); shapes.len()];
        Ok(CountMlmModel {
            order,
            smoothing_k,
            vocab,
            shapes,
            tables,
        })
    }

    fn observe(&mut self, tokens: &[TokenId]) {
        for (pos, &target) in tokens.iter().enumerate() {
            if Vocabulary::is_reserved(target) {
                continue;
            }
            for (shape, table) in self.shapes.iter().zip(&mut self.tables) {
                if let Some(key) = shape.key(tokens, pos) {
                    let entry = table.entry(key).or_default();
                    entry.total += 1;
                    *entry.counts.entry(target).or_default() += 1;
                }
            }
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn smoothing_k(&self) -> f64 {
        self.smoothing_k
    }

    pub fn shapes(&self) -> &[ContextShape] {
        &self.shapes
    }

    /// Count of `target` after a context given as explicit left/right token lists.
    pub fn count(&self, shape: ContextShape, left: &[TokenId], right: &[TokenId], target: TokenId) -> u64 {
        self.context(shape, left, right)
            .and_then(|c| c.counts.get(&target).copied())
            .unwrap_or(0)
    }

    /// Total count of a context.
    pub fn context_total(&self, shape: ContextShape, left: &[TokenId], right: &[TokenId]) -> u64 {
        self.context(shape, left, right).map_or(0, |c| c.total)
    }

    fn context(&self, shape: ContextShape, left: &[TokenId], right: &[TokenId]) -> Option<&ContextCounts> {
        let idx = self.shapes.iter().position(|s| *s == shape)?;
        let mut key = vec![left.len() as TokenId];
        key.extend_from_slice(left);
        key.extend_from_slice(right);
        self.tables[idx].get(&key)
    }

    /// Number of stored (shape, context, token) entries.
    pub fn num_entries(&self) -> usize {
        self.tables
            .iter()
            .flat_map(|t| t.values())
            .map(|c| c.counts.len())
            .sum()
    }

    /// Shape used to predict `pos` of `tokens`.
    pub fn selected_shape(&self, tokens: &[TokenId], pos: usize) -> ContextShape {
        self.select(tokens, pos).0
    }

    fn select(&self, tokens: &[TokenId], pos: usize) -> (ContextShape, &ContextCounts) {
        for (shape, table) in self.shapes.iter().zip(&self.tables) {
            if let Some(found) = shape.key(tokens, pos).and_then(|key| table.get(&key)) {
                if found.total > 0 {
                    return (*shape, found);
                }
            }
        }
        unreachable!("the unigram context is always populated")
    }

    /// Smoothed distribution over the full vocabulary; reserved ids get zero.
    pub fn distribution_at(&self, tokens: &[TokenId], pos: usize) -> Vec<f64> {
        let (_, context) = self.select(tokens, pos);
        let regular = self.vocab.num_regular() as f64;
        let denom = context.total as f64 + self.smoothing_k * regular;
        let mut dist = vec![0.0; self.vocab.len()];
        let base = self.smoothing_k / denom;
        for slot in &mut dist[Vocabulary::NUM_RESERVED..] {
            *slot = base;
        }
        for (&token, &count) in &context.counts {
            dist[token as usize] = (count as f64 + self.smoothing_k) / denom;
        }
        dist
    }

    /// Every stored count, by shape (ladder order), then context, then token.
    pub fn entries(&self) -> Vec<CountEntry> {
        let mut out = Vec::with_capacity(self.num_entries());
        for (shape, table) in self.shapes.iter().zip(&self.tables) {
            let mut keys: Vec<&Vec<TokenId>> = table.keys().collect();
            keys.sort();
            for key in keys {
                let (left, right) = key[1..].split_at(key[0] as usize);
                for (&token, &count) in &table[key].counts {
                    out.push(CountEntry {
                        shape: *shape,
                        left: left.to_vec(),
                        right: right.to_vec(),
                        token,
                        count,
                    });
                }
            }
        }
        out
    }

    /// Writes the versioned text format: header, vocabulary, then one line
    /// per (shape, context, token, count).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "countmlm v1 order={} k={}", self.order, self.smoothing_k).unwrap();
        writeln!(out, "vocab {}", self.vocab.len()).unwrap();
        for surface in self.vocab.surfaces() {
            writeln!(out, "{surface}").unwrap();
        }
        let surfaces =
            |ids: &[TokenId]| -> String { ids.iter().map(|&t| self.vocab.decode(t)).collect::<Vec<_>>().join(" ") };
        for e in self.entries() {
            writeln!(
                out,
                "{},{}\t{}\t{}\t{}\t{}",
                e.shape.left,
                e.shape.right,
                surfaces(&e.left),
                surfaces(&e.right),
                self.vocab.decode(e.token),
                e.count
            )
            .unwrap();
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, path)
    }

    pub fn from_text(text: &str, origin: &Path) -> Result<Self> {
        let err = |line: usize, m: String| Error::parse(origin, line, m);
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

        let (_, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (order, k) = match fields.as_slice() {
            ["countmlm", "v1", order, k] => {
                let order = order
                    .strip_prefix("order=")
                    .and_then(|v| v.parse::<usize>().ok())
                    .ok_or_else(|| err(1, format!("bad order field {order:?}")))?;
                let k = k
                    .strip_prefix("k=")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| err(1, format!("bad k field {k:?}")))?;
                (order, k)
            }
            _ => {
                return Err(err(
                    1,
                    format!("expected `countmlm v1 order=<n> k=<float>`, got {header:?}"),
                ))
            }
        };

        let (vocab_line, vocab_header) = lines.next().ok_or_else(|| err(2, "missing vocab section".into()))?;
        let size: usize = vocab_header
            .strip_prefix("vocab ")
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| err(vocab_line, "expected `vocab <size>`".into()))?;
        let mut surfaces = Vec::with_capacity(size);
        for _ in 0..size {
            let (_, s) = lines
                .next()
                .ok_or_else(|| err(vocab_line, "truncated vocabulary".into()))?;
            surfaces.push(s.to_string());
        }
        let reserved = Vocabulary::from_surfaces(std::iter::empty::<String>())?;
        if surfaces.len() < Vocabulary::NUM_RESERVED || surfaces[..Vocabulary::NUM_RESERVED] != *reserved.surfaces() {
            return Err(err(vocab_line, "vocabulary must start with the reserved tokens".into()));
        }
        let vocab = Vocabulary::from_surfaces(surfaces.into_iter().skip(Vocabulary::NUM_RESERVED))
            .map_err(|e| err(vocab_line, e.to_string()))?;

        let mut model = CountMlmModel::empty(vocab, order, k).map_err(|e| err(1, e.to_string()))?;
        let lookup = |line: usize, s: &str, model: &CountMlmModel| -> Result<Vec<TokenId>> {
            s.split(' ')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    model
                        .vocab
                        .get(t)
                        .ok_or_else(|| err(line, format!("unknown token {t:?}")))
                })
                .collect()
        };
        for (line, row) in lines {
            if row.is_empty() {
                continue;
            }
            let cols: Vec<&str> = row.split('\t').collect();
            if cols.len() != 5 {
                return Err(err(
                    line,
                    format!("expected 5 tab-separated fields, got {}", cols.len()),
                ));
            }
            let shape = cols[0]
                .split_once(',')
                .and_then(|(l, r)| {
                    Some(ContextShape {
                        left: l.parse().ok()?,
                        right: r.parse().ok()?,
                    })
                })
                .ok_or_else(|| err(line, format!("bad shape {:?}", cols[0])))?;
            let idx = model
                .shapes
                .iter()
                .position(|s| *s == shape)
                .ok_or_else(|| err(line, format!("shape {:?} exceeds order {order}", cols[0])))?;
            let left = lookup(line, cols[1], &model)?;
            let right = lookup(line, cols[2], &model)?;
            if left.len() > shape.left || right.len() > shape.right {
                return Err(err(line, "context longer than its shape".into()));
            }
            let target = model
                .vocab
                .get(cols[3])
                .ok_or_else(|| err(line, format!("unknown token {:?}", cols[3])))?;
            let count: u64 = cols[4]
                .parse()
                .map_err(|_| err(line, format!("bad count {:?}", cols[4])))?;
            let mut key = vec![left.len() as TokenId];
            key.extend(left);
            key.extend(right);
            let entry = model.tables[idx].entry(key).or_default();
            entry.total += count;
            *entry.counts.entry(target).or_default() += count;
        }
        if model.tables.last().is_none_or(|t| t.is_empty()) {
            return Err(err(1, "model has no unigram counts".into()));
        }
        Ok(model)
    }
}

impl ReconstructionBackend for CountMlmModel {
    fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    fn predict(&self, tokens: &[TokenId], positions: &[usize]) -> Result<Vec<Vec<f64>>> {
        positions
            .iter()
            .map(|&pos| {
                if pos >= tokens.len() {
                    return Err(Error::Invalid(format!(
                        "position {pos} out of range for {} tokens",
                        tokens.len()
                    )));
                }
                Ok(self.distribution_at(tokens, pos))
            })
            .collect()
    }
}
