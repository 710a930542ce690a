//! Writes run outputs as JSON or CSV, to a file or a writer.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::config::Format;
use crate::run::RunOutput;
use crate::CliError;

pub fn render(out: &RunOutput, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(out)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in out.csv_rows() {
                w.serialize(row)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Numeric(e.to_string()))
        }
    }
}

/// Writes `text` to `path`, or to `fallback` when no path is given.
pub fn emit(text: &str, path: Option<&Path>, fallback: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)?;
        }
        None => fallback.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Picks the format from an explicit flag, then the config, then the extension.
pub fn resolve_format(flag: Option<Format>, config: Option<Format>, path: Option<&Path>) -> Format {
    flag.or(config)
        .or_else(|| match path?.extension()?.to_str()? {
            "csv" => Some(Format::Csv),
            _ => None,
        })
        .unwrap_or(Format::Json)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    #[test]
    fn format_precedence() {
        let csv = PathBuf::from("a/b.csv");
        assert_eq!(resolve_format(None, None, Some(&csv)), Format::Csv);
        assert_eq!(resolve_format(Some(Format::Json), None, Some(&csv)), Format::Json);
        assert_eq!(resolve_format(None, Some(Format::Csv), None), Format::Csv);
        assert_eq!(resolve_format(None, None, None), Format::Json);
    }

    #[test]
    fn emit_creates_parent_dirs() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x/y/out.json");
        emit("{}", Some(&p), &mut std::io::sink()).unwrap();
        assert_eq!(fs::read_to_string(p).unwrap(), "{}");
    }
}
