//! Short-link expansion and domain canonicalization.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};

use url::{Host, Url};

use crate::error::{Error, Result};

/// A canonical host name: lower-case, no scheme, port, path or leading "www.".
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Domain(String);

impl Domain {
    /// Validate an already-canonical host string.
    pub fn new(value: impl Into<String>) -> Option<Self> {
        let value = value.into();
        let ok = !value.is_empty()
            && value.contains('.')
            && !value.chars().any(char::is_whitespace)
            && value.to_lowercase() == value;
        ok.then_some(Domain(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Offline table of resolved short links, plus links known to be dead.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UrlExpansionMap {
    entries: BTreeMap<String, String>,
    misses: BTreeSet<String>,
}

fn check_absolute(url: &str, line: usize) -> Result<()> {
    Url::parse(url)
        .map(|_| ())
        .map_err(|e| Error::format(format!("line {line}: invalid URL {url:?}: {e}")))
}

impl UrlExpansionMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, short: &str, expanded: &str) -> Result<()> {
        check_absolute(short, 0)?;
        check_absolute(expanded, 0)?;
        if self.misses.contains(short) {
            return Err(Error::format(format!("{short} is already recorded as dead")));
        }
        self.entries.insert(short.to_string(), expanded.to_string());
        Ok(())
    }

    pub fn insert_miss(&mut self, short: &str) -> Result<()> {
        check_absolute(short, 0)?;
        if self.entries.contains_key(short) {
            return Err(Error::format(format!("{short} already has an expansion")));
        }
        self.misses.insert(short.to_string());
        Ok(())
    }

    pub fn expand<'a>(&'a self, url: &'a str) -> &'a str {
        self.entries.get(url).map(String::as_str).unwrap_or(url)
    }

    pub fn is_dead(&self, url: &str) -> bool {
        self.misses.contains(url)
    }

    pub fn len(&self) -> usize {
        self.entries.len() + self.misses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Read the two-column TSV form. An empty second column marks a dead link.
    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut map = Self::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (short, expanded) = line.split_once('\t').unwrap_or((line.as_str(), ""));
            let (short, expanded) = (short.trim(), expanded.trim());
            check_absolute(short, lineno)?;
            let conflict = if expanded.is_empty() {
                map.entries.contains_key(short)
            } else {
                check_absolute(expanded, lineno)?;
                map.misses.contains(short)
            };
            if conflict {
                return Err(Error::format(format!(
                    "line {lineno}: {short} is listed both as dead and as expanded"
                )));
            }
            if expanded.is_empty() {
                map.misses.insert(short.to_string());
            } else {
                map.entries.insert(short.to_string(), expanded.to_string());
            }
        }
        Ok(map)
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for (short, expanded) in &self.entries {
            writeln!(out, "{short}\t{expanded}")?;
        }
        for short in &self.misses {
            writeln!(out, "{short}\t")?;
        }
        Ok(())
    }
}

fn canonical_host(host: &str) -> Option<Domain> {
    let mut host = host.trim_end_matches('.').to_lowercase();
    while let Some(rest) = host.strip_prefix("www.") {
        if !rest.contains('.') {
            break;
        }
        host = rest.to_string();
    }
    Domain::new(host)
}

/// Resolve a (possibly shortened) URL to its canonical domain.
///
/// Returns `None` for dead links and for anything that does not parse as an
/// absolute URL or bare host.
pub fn extract_domain(url: &str, expansion: &UrlExpansionMap) -> Option<Domain> {
    let url = url.trim();
    let resolved = expansion.expand(url);
    if expansion.is_dead(resolved) {
        return None;
    }
    let parsed = if resolved.contains("://") {
        Url::parse(resolved).ok()?
    } else {
        Url::parse(&format!("http://{resolved}")).ok()?
    };
    match parsed.host()? {
        Host::Domain(host) => canonical_host(host),
        Host::Ipv4(_) | Host::Ipv6(_) => None,
    }
}
