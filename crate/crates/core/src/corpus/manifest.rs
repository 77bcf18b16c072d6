use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Label, Result};

pub const MANIFEST_HEADER: [&str; 5] = ["path", "label", "dataset", "excluded", "note"];

/// Which recording collection a manifest row comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusKind {
    Virufy,
    Nococoda,
    Synthetic,
}

impl CorpusKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CorpusKind::Virufy => "virufy",
            CorpusKind::Nococoda => "nococoda",
            CorpusKind::Synthetic => "synthetic",
        }
    }
}

impl fmt::Display for CorpusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorpusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "virufy" => Ok(CorpusKind::Virufy),
            "nococoda" => Ok(CorpusKind::Nococoda),
            "synthetic" => Ok(CorpusKind::Synthetic),
            other => Err(Error::Validation(format!("unknown dataset token {other:?}"))),
        }
    }
}

/// One row of the corpus manifest. Excluded rows stay in the list but are
/// never loaded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: String,
    pub label: Label,
    pub dataset: CorpusKind,
    pub excluded: bool,
    pub note: String,
}

pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(file, path)
}

/// Parses manifest CSV from any reader. `origin` is only used in error messages.
pub fn parse_manifest<R: Read>(reader: R, origin: &Path) -> Result<Vec<ManifestEntry>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);

    let parse_err = |line: u64, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };

    let headers = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if headers.iter().map(str::trim).ne(MANIFEST_HEADER) {
        return Err(parse_err(
            1,
            format!("expected header {:?}, found {:?}", MANIFEST_HEADER.join(","), headers),
        ));
    }

    let mut entries = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let label = record[1]
            .parse::<Label>()
            .map_err(|_| Error::Validation(format!("{}: line {line}: unknown label {:?}", origin.display(), &record[1])))?;
        let dataset = record[2]
            .parse::<CorpusKind>()
            .map_err(|_| Error::Validation(format!("{}: line {line}: unknown dataset {:?}", origin.display(), &record[2])))?;
        let excluded = match record[3].trim() {
            "0" => false,
            "1" => true,
            other => return Err(parse_err(line, format!("excluded must be 0 or 1, found {other:?}"))),
        };
        entries.push(ManifestEntry {
            path: record[0].to_string(),
            label,
            dataset,
            excluded,
            note: record[4].to_string(),
        });
    }
    Ok(entries)
}

pub fn write_manifest<W: Write>(writer: W, entries: &[ManifestEntry]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(MANIFEST_HEADER)?;
    for e in entries {
        wtr.write_record([
            e.path.as_str(),
            e.label.as_str(),
            e.dataset.as_str(),
            if e.excluded { "1" } else { "0" },
            e.note.as_str(),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<manifest>", e))?;
    Ok(())
}
