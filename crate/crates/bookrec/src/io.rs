//! File ingestion and artifact writing. Parse failures surface the file
//! path; the core parsers already embed the line number in their messages.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bookrec_core::ratings::{parse_ratings, parse_tags, ParsedRatings};
use bookrec_core::{BookId, TagCatalog, UserId};

pub fn load_ratings(path: &Path) -> Result<ParsedRatings> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read ratings file {}", path.display()))?;
    parse_ratings(&text).with_context(|| format!("ratings file {}", path.display()))
}

pub fn load_tags(path: &Path) -> Result<TagCatalog> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read tag file {}", path.display()))?;
    parse_tags(&text).with_context(|| format!("tag file {}", path.display()))
}

/// (user, book) pairs, one per TSV line, keeping the source line number for
/// later error context. Blank lines and `#` comments are skipped.
pub fn load_pairs(path: &Path) -> Result<Vec<(usize, UserId, BookId)>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read pairs file {}", path.display()))?;
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split('\t');
        let parsed = (|| {
            let user = fields.next()?.trim().parse().ok()?;
            let book = fields.next()?.trim().parse().ok()?;
            fields.next().is_none().then_some((user, book))
        })();
        match parsed {
            Some((user, book)) => pairs.push((line_no, user, book)),
            None => bail!(
                "pairs file {}: line {}: expected user<TAB>book",
                path.display(),
                line_no
            ),
        }
    }
    Ok(pairs)
}

/// Write one artifact under the output directory, creating it if needed.
pub fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, content)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}
