//! `--config` files: `key = value` lines merged into the command line so
//! that explicit flags win over file values.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::CommandFactory;

use crate::args::Cli;
use crate::error::CliError;

/// Keys whose values are paths (comma-separated lists allowed).
const PATH_KEYS: &[&str] = &[
    "input", "output", "out-dir", "teacher", "synonyms", "report", "train", "test", "summary", "a", "b",
];

/// Expands `--config FILE` into flags placed right after the subcommand name.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let command = Cli::command();
    let subcommands: Vec<String> = command.get_subcommands().map(|c| c.get_name().to_string()).collect();
    let Some(at) = argv
        .iter()
        .position(|a| a.to_str().is_some_and(|s| subcommands.iter().any(|n| n == s)))
    else {
        return Ok(argv);
    };
    let name = argv[at].to_str().unwrap_or_default();
    let sub = command.find_subcommand(name).expect("known subcommand");
    let mut allowed: Vec<String> = sub
        .get_arguments()
        .filter_map(|a| a.get_long())
        .map(String::from)
        .collect();
    allowed.push("workers".into());

    let text = fs::read_to_string(&path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut flags = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let at_line = || format!("{}:{}", path.display(), idx + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}: expected `key = value`", at_line())))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if !allowed.contains(&key) {
            return Err(CliError::Usage(format!(
                "{}: unknown key {key:?} for `{name}`",
                at_line()
            )));
        }
        let value = resolve(&key, value, &base);
        flags.push(OsString::from(format!("--{key}={value}")));
    }
    let mut out = argv[..=at].to_vec();
    out.extend(flags);
    out.extend_from_slice(&argv[at + 1..]);
    Ok(out)
}

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut iter = argv.iter().skip(1);
    while let Some(arg) = iter.next() {
        let s = arg.to_str()?;
        if s == "--config" {
            return iter.next().map(PathBuf::from);
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

/// `#` starts a comment at the beginning of a line or after whitespace.
fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'#' && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return &line[..i];
        }
    }
    line
}

fn resolve(key: &str, value: &str, base: &Path) -> String {
    let join = |p: &str| -> String {
        if p.is_empty() || Path::new(p).is_absolute() {
            p.to_string()
        } else {
            base.join(p).display().to_string()
        }
    };
    if key == "backend" {
        return match value.strip_prefix("builtin:") {
            Some(p) => format!("builtin:{}", join(p)),
            None => value.to_string(),
        };
    }
    if PATH_KEYS.contains(&key) {
        return value.split(',').map(|p| join(p.trim())).collect::<Vec<_>>().join(",");
    }
    value.to_string()
}
