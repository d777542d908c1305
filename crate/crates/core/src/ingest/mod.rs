//! Tweet ingestion: newline-delimited JSON records, text normalization and
//! URL-to-domain resolution.

mod domain;
mod text;

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use domain::{extract_domain, Domain, UrlExpansionMap};
pub use text::preprocess_text;

/// One tweet or retweet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub user_id: String,
    pub text: String,
    pub hashtags: Vec<String>,
    pub retweeted_user_id: Option<String>,
    pub urls: Vec<String>,
}

impl TweetRecord {
    pub fn is_retweet(&self) -> bool {
        self.retweeted_user_id.is_some()
    }

    fn validate(mut self) -> std::result::Result<Self, String> {
        if self.tweet_id.is_empty() {
            return Err("empty tweet_id".into());
        }
        if self.user_id.is_empty() {
            return Err("empty user_id".into());
        }
        if matches!(self.retweeted_user_id.as_deref(), Some("")) {
            return Err("empty retweeted_user_id".into());
        }
        for tag in &mut self.hashtags {
            if let Some(stripped) = tag.strip_prefix('#') {
                *tag = stripped.to_string();
            }
        }
        Ok(self)
    }
}

/// Records parsed from a stream plus the number of lines that were rejected.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedTweets {
    pub records: Vec<TweetRecord>,
    pub skipped: usize,
}

fn parse_line(line: &str) -> Option<TweetRecord> {
    let record: TweetRecord = serde_json::from_str(line).ok()?;
    record.validate().ok()
}

/// Parse newline-delimited JSON tweet records.
///
/// Malformed lines (bad JSON, missing fields, empty ids) are skipped and
/// counted. If more than half the lines are malformed the input is assumed to
/// be the wrong file and a format error is returned.
pub fn parse_tweets<R: BufRead>(source: R) -> Result<ParsedTweets> {
    let lines = source.lines().collect::<std::io::Result<Vec<String>>>()?;
    let parsed: Vec<Option<TweetRecord>> = lines.par_iter().map(|l| parse_line(l)).collect();
    let total = parsed.len();
    let records: Vec<TweetRecord> = parsed.into_iter().flatten().collect();
    let skipped = total - records.len();
    if skipped * 2 > total {
        return Err(Error::format(format!(
            "{skipped} of {total} lines are not valid tweet records"
        )));
    }
    if skipped > 0 {
        log::warn!("skipped {skipped} malformed tweet lines");
    }
    Ok(ParsedTweets { records, skipped })
}

/// Write records back out in the same newline-delimited JSON schema.
pub fn write_tweets<W: Write>(records: &[TweetRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(|e| Error::format(e.to_string()))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = r#"{"tweet_id":"1","user_id":"u1","text":"RT hello","hashtags":[],"retweeted_user_id":"u2","urls":[]}"#;

    #[test]
    fn parses_one_record() {
        let parsed = parse_tweets(LINE.as_bytes()).unwrap();
        assert_eq!(parsed.skipped, 0);
        assert_eq!(parsed.records.len(), 1);
        let r = &parsed.records[0];
        assert_eq!(r.retweeted_user_id.as_deref(), Some("u2"));
        assert_eq!(r.user_id, "u1");
        assert_eq!(r.text, "RT hello");
    }

    #[test]
    fn empty_stream() {
        let parsed = parse_tweets(&b""[..]).unwrap();
        assert!(parsed.records.is_empty());
        assert_eq!(parsed.skipped, 0);
    }

    #[test]
    fn skips_garbage() {
        let input = format!("{LINE}\n{LINE}\nnot json at all\n{LINE}\n");
        let parsed = parse_tweets(input.as_bytes()).unwrap();
        assert_eq!(parsed.records.len(), 3);
        assert_eq!(parsed.skipped, 1);
    }

    #[test]
    fn mostly_garbage_is_a_format_error() {
        let input = format!("{LINE}\nx\ny\n");
        assert!(matches!(
            parse_tweets(input.as_bytes()),
            Err(Error::Format(_))
        ));
        // exactly half is tolerated
        let input = format!("{LINE}\nx\n");
        assert_eq!(parse_tweets(input.as_bytes()).unwrap().skipped, 1);
    }

    #[test]
    fn rejects_empty_ids_and_strips_hash() {
        let bad = r#"{"tweet_id":"","user_id":"u1","text":"","hashtags":[],"retweeted_user_id":null,"urls":[]}"#;
        let empty_rt = r#"{"tweet_id":"2","user_id":"u1","text":"","hashtags":[],"retweeted_user_id":"","urls":[]}"#;
        let tagged = r##"{"tweet_id":"3","user_id":"u1","text":"","hashtags":["#QAnon","Biden"],"retweeted_user_id":null,"urls":[],"lang":"en"}"##;
        let input = format!("{bad}\n{empty_rt}\n{tagged}\n{tagged}\n");
        let parsed = parse_tweets(input.as_bytes()).unwrap();
        assert_eq!(parsed.skipped, 2);
        assert_eq!(parsed.records[0].hashtags, vec!["QAnon", "Biden"]);
        assert!(!parsed.records[0].is_retweet());
    }

    #[test]
    fn write_then_parse() {
        let parsed = parse_tweets(LINE.as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_tweets(&parsed.records, &mut buf).unwrap();
        assert_eq!(parse_tweets(&buf[..]).unwrap(), parsed);
    }

    proptest::proptest! {
        #[test]
        fn never_invents_records(lines in proptest::collection::vec(proptest::prop_oneof![
            proptest::strategy::Just(LINE.to_string()),
            "[a-z{}\":,]{0,20}",
        ], 0..30)) {
            let input = lines.join("\n");
            let n_lines = input.lines().count();
            if let Ok(parsed) = parse_tweets(input.as_bytes()) {
                proptest::prop_assert_eq!(parsed.records.len() + parsed.skipped, n_lines);
            }
        }
    }
}
