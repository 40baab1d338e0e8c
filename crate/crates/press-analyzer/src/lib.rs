//! Word-frequency comparison of two text corpora.
//!
//! Each corpus is a directory of UTF-8 text files. Words are tokenized with
//! the engine's tokenizer and lowercased; numbers and punctuation are
//! ignored. A word is kept when it occurs more than `threshold` times
//! across both corpora, and is classified by which side of the
//! `freq_a == freq_b` diagonal it falls on.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use equivalence_core::lang::{tokenize, TokenKind, WordList};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_THRESHOLD: u64 = 8;

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("corpus {0} contains no text files")]
    EmptyCorpus(PathBuf),
    #[error("cannot read {path}: {source}")]
    UnreadableFile {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("no records to write")]
    NoRecords,
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// More frequent in corpus B.
    GenerativeLeaning,
    /// More frequent in corpus A.
    ConceptualLeaning,
    OnDiagonal,
}

impl Classification {
    pub fn of(freq_a: u64, freq_b: u64) -> Self {
        match freq_b.cmp(&freq_a) {
            std::cmp::Ordering::Greater => Classification::GenerativeLeaning,
            std::cmp::Ordering::Less => Classification::ConceptualLeaning,
            std::cmp::Ordering::Equal => Classification::OnDiagonal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordFreqRecord {
    pub word: String,
    pub freq_a: u64,
    pub freq_b: u64,
    pub classification: Classification,
}

impl WordFreqRecord {
    pub fn new(word: impl Into<String>, freq_a: u64, freq_b: u64) -> Self {
        WordFreqRecord {
            word: word.into(),
            freq_a,
            freq_b,
            classification: Classification::of(freq_a, freq_b),
        }
    }

    pub fn total(&self) -> u64 {
        self.freq_a + self.freq_b
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub threshold: u64,
    pub stopwords: Option<PathBuf>,
    /// Keep a word when either corpus alone exceeds the threshold, instead
    /// of the combined count.
    pub per_corpus_threshold: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            threshold: DEFAULT_THRESHOLD,
            stopwords: None,
            per_corpus_threshold: false,
        }
    }
}

/// Unfiltered word counts for one corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub counts: BTreeMap<String, u64>,
    pub files: usize,
}

impl Corpus {
    pub fn total_words(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn add_text(&mut self, text: &str) {
        // Blank files simply contribute nothing.
        for token in tokenize(text).unwrap_or_default() {
            if token.kind == TokenKind::Word {
                *self.counts.entry(token.lower).or_insert(0) += 1;
            }
        }
    }

    /// Count every regular, non-hidden file directly inside `dir`, in name
    /// order.
    pub fn load(dir: &Path) -> Result<Self, AnalyzeError> {
        let unreadable = |path: &Path, source| AnalyzeError::UnreadableFile {
            path: path.to_path_buf(),
            source,
        };
        let mut paths = Vec::new();
        for entry in fs::read_dir(dir).map_err(|e| unreadable(dir, e))? {
            let entry = entry.map_err(|e| unreadable(dir, e))?;
            let path = entry.path();
            let hidden = entry.file_name().to_string_lossy().starts_with('.');
            if !hidden && path.is_file() {
                paths.push(path);
            }
        }
        if paths.is_empty() {
            return Err(AnalyzeError::EmptyCorpus(dir.to_path_buf()));
        }
        paths.sort();
        let mut corpus = Corpus::default();
        for path in &paths {
            let text = fs::read_to_string(path).map_err(|e| unreadable(path, e))?;
            corpus.add_text(&text);
            corpus.files += 1;
        }
        Ok(corpus)
    }
}

/// Join two sets of counts, drop stopwords, apply the threshold and sort
/// by combined count (descending), then word.
pub fn compare(a: &Corpus, b: &Corpus, threshold: u64, per_corpus: bool, stopwords: Option<&WordList>) -> Vec<WordFreqRecord> {
    let mut words: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for (w, n) in &a.counts {
        words.entry(w).or_default().0 = *n;
    }
    for (w, n) in &b.counts {
        words.entry(w).or_default().1 = *n;
    }
    let mut records: Vec<WordFreqRecord> = words
        .into_iter()
        .filter(|(w, _)| !stopwords.is_some_and(|s| s.contains(w)))
        .filter(|(_, (fa, fb))| {
            if per_corpus {
                *fa.max(fb) > threshold
            } else {
                fa + fb > threshold
            }
        })
        .map(|(w, (fa, fb))| WordFreqRecord::new(w, fa, fb))
        .collect();
    records.sort_by(|x, y| y.total().cmp(&x.total()).then_with(|| x.word.cmp(&y.word)));
    records
}

pub fn analyze_corpora(dir_a: &Path, dir_b: &Path, options: &AnalyzeOptions) -> Result<Vec<WordFreqRecord>, AnalyzeError> {
    let stopwords = match &options.stopwords {
        Some(path) => Some(WordList::load(path).map_err(|e| AnalyzeError::UnreadableFile {
            path: path.clone(),
            source: io::Error::other(e.to_string()),
        })?),
        None => None,
    };
    let a = Corpus::load(dir_a)?;
    let b = Corpus::load(dir_b)?;
    Ok(compare(&a, &b, options.threshold, options.per_corpus_threshold, stopwords.as_ref()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Svg,
}

pub fn write_csv<W: io::Write>(records: &[WordFreqRecord], out: W) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<WordFreqRecord>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Plot geometry shared by the renderer and anyone checking its output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotFrame {
    pub margin: f64,
    pub side: f64,
    /// Frequency mapped to the far edge of both axes.
    pub max_freq: u64,
}

impl PlotFrame {
    pub fn for_records(records: &[WordFreqRecord]) -> Self {
        let max_freq = records.iter().map(|r| r.freq_a.max(r.freq_b)).max().unwrap_or(1).max(1);
        PlotFrame {
            margin: 60.0,
            side: 600.0,
            max_freq,
        }
    }

    fn scale(&self, freq: u64) -> f64 {
        freq as f64 / self.max_freq as f64 * self.side
    }

    /// SVG coordinates of `(freq_a, freq_b)`; y grows downwards.
    pub fn point(&self, freq_a: u64, freq_b: u64) -> (f64, f64) {
        (self.margin + self.scale(freq_a), self.margin + self.side - self.scale(freq_b))
    }

    /// Distance of an SVG point from the diagonal, in pixels.
    pub fn distance_to_diagonal(&self, x: f64, y: f64) -> f64 {
        let u = x - self.margin;
        let v = self.margin + self.side - y;
        (u - v).abs() / std::f64::consts::SQRT_2
    }
}

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn color(c: Classification) -> &'static str {
    match c {
        Classification::GenerativeLeaning => "#2b6cb0",
        Classification::ConceptualLeaning => "#c05621",
        Classification::OnDiagonal => "#4a5568",
    }
}

/// Scatter plot with corpus A on x and corpus B on y. Each word is a dot
/// with its label anchored on the dot; the red line is `freq_a == freq_b`.
pub fn render_svg(records: &[WordFreqRecord]) -> String {
    let frame = PlotFrame::for_records(records);
    let size = frame.side + 2.0 * frame.margin;
    let (x0, y0) = frame.point(0, 0);
    let (x1, y1) = frame.point(frame.max_freq, frame.max_freq);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.2} {y0:.2} H{x1:.2} M{x0:.2} {y0:.2} V{y1:.2}" stroke="black" fill="none"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line id="diagonal" x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="red" stroke-width="1.5"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">frequency in corpus A (max {})</text>"#,
        frame.margin + frame.side / 2.0,
        y0 + 36.0,
        frame.max_freq
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">frequency in corpus B</text>"#,
        x0 - 36.0,
        frame.margin + frame.side / 2.0,
        x0 - 36.0,
        frame.margin + frame.side / 2.0
    );
    for r in records {
        let (x, y) = frame.point(r.freq_a, r.freq_b);
        let fill = color(r.classification);
        let _ = writeln!(
            svg,
            r#"<g class="word {cls}"><circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{fill}"/><text x="{x:.2}" y="{y:.2}" dx="4" dy="-4" fill="{fill}">{word}</text></g>"#,
            cls = serde_plain_name(r.classification),
            word = escape_xml(&r.word)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn serde_plain_name(c: Classification) -> &'static str {
    match c {
        Classification::GenerativeLeaning => "generative_leaning",
        Classification::ConceptualLeaning => "conceptual_leaning",
        Classification::OnDiagonal => "on_diagonal",
    }
}

pub fn emit_scatter(records: &[WordFreqRecord], format: Format, out: &Path) -> Result<(), EmitError> {
    if records.is_empty() {
        return Err(EmitError::NoRecords);
    }
    let io_err = |source| EmitError::Io {
        path: out.to_path_buf(),
        source,
    };
    match format {
        Format::Csv => {
            let file = fs::File::create(out).map_err(io_err)?;
            write_csv(records, io::BufWriter::new(file))?;
        }
        Format::Svg => fs::write(out, render_svg(records)).map_err(io_err)?,
    }
    Ok(())
}
