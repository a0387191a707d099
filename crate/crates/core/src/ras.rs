//! The `.ras` text format for atom structures.
//!
//! ```text
//! # comment
//! [atoms]
//! 1' a b
//! [identity]
//! 1'
//! [converse]
//! a b
//! [forbidden]
//! 1' a b
//! ```
//!
//! Atom order in `[atoms]` is index order. Unlisted atoms are self-converse.
//! `[forbidden]` may hold generators or the full forbidden set: the loader
//! closes it under the Peircean transforms before validating.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::atom_structure::{AtomStructure, StructureBuilder, StructureError, Triple};

#[derive(Debug, Error)]
pub enum RasError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Structure { line: usize, source: StructureError },
    #[error("invalid atom structure: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Atoms,
    Identity,
    Converse,
    Forbidden,
}

pub fn parse_ras(text: &str) -> Result<AtomStructure, RasError> {
    let mut b = StructureBuilder::new();
    let mut section = Section::None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| RasError::Syntax { line, message };
        let structure = |source| RasError::Structure { line, source };
        if content.starts_with('[') {
            section = match content {
                "[atoms]" => Section::Atoms,
                "[identity]" => Section::Identity,
                "[converse]" => Section::Converse,
                "[forbidden]" => Section::Forbidden,
                other => return Err(syntax(format!("unknown section {other}"))),
            };
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        match section {
            Section::None => return Err(syntax("content before the first section".into())),
            Section::Atoms => {
                for w in words {
                    b.atom(w).map_err(structure)?;
                }
            }
            Section::Identity => {
                for w in words {
                    let a = b.lookup(w).map_err(structure)?;
                    b.identity(a).map_err(structure)?;
                }
            }
            Section::Converse => {
                let [x, y] = words[..] else {
                    return Err(syntax(format!("expected two atoms, found {}", words.len())));
                };
                let (x, y) = (b.lookup(x).map_err(structure)?, b.lookup(y).map_err(structure)?);
                b.converse_pair(x, y).map_err(structure)?;
            }
            Section::Forbidden => {
                let [x, y, z] = words[..] else {
                    return Err(syntax(format!("expected three atoms, found {}", words.len())));
                };
                let t = Triple(
                    b.lookup(x).map_err(structure)?,
                    b.lookup(y).map_err(structure)?,
                    b.lookup(z).map_err(structure)?,
                );
                b.forbid(t).map_err(structure)?;
            }
        }
    }
    let s = b.build().map_err(|source| RasError::Structure { line: 0, source })?;
    if let Err(vs) = s.validate() {
        let shown: Vec<String> = vs.iter().take(3).map(|v| s.describe(v)).collect();
        let more = if vs.len() > 3 { format!(" (and {} more)", vs.len() - 3) } else { String::new() };
        return Err(RasError::Invalid(format!("{}{more}", shown.join("; "))));
    }
    Ok(s)
}

pub fn load_ras(path: &Path) -> Result<AtomStructure, RasError> {
    let text = fs::read_to_string(path).map_err(|source| RasError::Io { path: path.display().to_string(), source })?;
    parse_ras(&text)
}

/// Writes `s` with its forbidden generators only.
pub fn write_ras(s: &AtomStructure) -> String {
    let mut out = String::from("[atoms]\n");
    out.push_str(&s.names().join(" "));
    out.push_str("\n\n[identity]\n");
    let ids: Vec<&str> = s.identity().atoms().map(|a| s.name(a)).collect();
    out.push_str(&ids.join(" "));
    out.push_str("\n\n[converse]\n");
    for a in s.atoms() {
        let c = s.conv(a);
        if a < c {
            out.push_str(&format!("{} {}\n", s.name(a), s.name(c)));
        }
    }
    out.push_str("\n[forbidden]\n");
    for Triple(x, y, z) in s.forbidden_generators() {
        out.push_str(&format!("{} {} {}\n", s.name(x), s.name(y), s.name(z)));
    }
    out
}
