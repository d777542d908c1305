//! Tweet text normalization.

use std::sync::OnceLock;

use regex::Regex;
use unicode_general_category::{get_general_category, GeneralCategory as Gc};

fn email_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[\w.+-]+@[\w-]+(?:\.[\w-]+)+").unwrap())
}

fn hashtag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"#\w+").unwrap())
}

/// Punctuation (P*), symbols (S*, which covers currency Sc) and decimal digits.
fn is_removed(c: char) -> bool {
    matches!(
        get_general_category(c),
        Gc::ConnectorPunctuation
            | Gc::DashPunctuation
            | Gc::OpenPunctuation
            | Gc::ClosePunctuation
            | Gc::InitialPunctuation
            | Gc::FinalPunctuation
            | Gc::OtherPunctuation
            | Gc::MathSymbol
            | Gc::CurrencySymbol
            | Gc::ModifierSymbol
            | Gc::OtherSymbol
            | Gc::DecimalNumber
    )
}

/// Strip a retweet marker ("rt"/"re" followed by whitespace or ':') at the
/// start of already lower-cased text, together with the "@handle:"
/// attribution that follows it in retweet objects.
fn strip_retweet_marker(s: &str) -> &str {
    let t = s.trim_start();
    let Some(rest) = t.strip_prefix("rt").or_else(|| t.strip_prefix("re")) else {
        return s;
    };
    match rest.chars().next() {
        Some(c) if c == ':' || c.is_whitespace() => {}
        _ => return s,
    }
    let rest = rest.trim_start_matches(|c: char| c == ':' || c.is_whitespace());
    match rest.strip_prefix('@') {
        Some(handle) => {
            let after = handle.trim_start_matches(|c: char| c.is_alphanumeric() || c == '_');
            after.strip_prefix(':').unwrap_or(after)
        }
        None => rest,
    }
}

/// Normalize tweet text: lower-case it and remove email addresses, hashtag
/// tokens, punctuation and symbols, digit runs and the leading retweet marker.
/// Whitespace is collapsed to single spaces and trimmed.
pub fn preprocess_text(text: &str) -> String {
    let lower = text.to_lowercase();
    let body = strip_retweet_marker(&lower);
    let body = email_re().replace_all(body, " ");
    let body = hashtag_re().replace_all(&body, " ");
    let cleaned: String = body
        .chars()
        .map(|c| if is_removed(c) { ' ' } else { c })
        .collect();
    let mut words: &[&str] = &cleaned.split_whitespace().collect::<Vec<_>>();
    // Removal can expose another marker ("RT 5 rt ..."); drop those too so
    // the output is a fixed point.
    while let [first, rest @ ..] = words {
        if (*first == "rt" || *first == "re") && !rest.is_empty() {
            words = rest;
        } else {
            break;
        }
    }
    words.join(" ")
}
