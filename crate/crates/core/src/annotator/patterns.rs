//! Fixed regular expressions for the pattern-style labels.
//!
//! | label    | rule |
//! |----------|------|
//! | EMAIL    | `[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}` |
//! | PHONE    | a run of digits, `+`, `(`, `)`, `-` and spaces containing at least 7 digits |
//! | DATE     | `dd/mm/yyyy` style numerics, ISO dates, and day/month-name/year forms |
//! | CURRENCY | currency symbol or ISO code followed by an amount (or amount then code) |
//! | CARDINAL | a whitespace token that is a bare integer, ignoring surrounding punctuation |
//! | POSTCODE | `[A-Z]{1,2}` + hyphen or en-dash + 3-5 digits (one optional space on each side of the dash), or a bare 5-digit token |

use regex::Regex;

const MONTHS: &str = "January|February|March|April|May|June|July|August|September|October|November|December|Jan|Feb|Mar|Apr|Jun|Jul|Aug|Sep|Sept|Oct|Nov|Dec";
const ISO_CODES: &str = "USD|EUR|GBP|CHF|JPY|HKD|SGD|CAD|AUD|CNY|SEK|NOK|DKK";

pub(crate) struct Patterns {
    pub email: Regex,
    pub phone: Regex,
    pub date: Regex,
    pub currency: Regex,
    pub postcode: Regex,
}

impl Patterns {
    pub fn new() -> Self {
        let date = format!(
            r"(?i)\b\d{{1,2}}[./-]\d{{1,2}}[./-]\d{{2,4}}\b|\b\d{{4}}-\d{{2}}-\d{{2}}\b|\b\d{{1,2}}(?:st|nd|rd|th)?\s+(?:{m})\.?,?\s+\d{{4}}\b|\b(?:{m})\.?\s+\d{{1,2}}(?:st|nd|rd|th)?,?\s+\d{{4}}\b",
            m = MONTHS
        );
        let currency = format!(
            r"(?:[$€£¥]\s?|\b(?:{c})\s?)\d[\d,]*(?:\.\d+)?|\b\d[\d,]*(?:\.\d+)?\s?(?:{c})\b",
            c = ISO_CODES
        );
        Self {
            email: Regex::new(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}").unwrap(),
            phone: Regex::new(r"\+?\(?\d[\d ()\-]{5,}\d").unwrap(),
            date: Regex::new(&date).unwrap(),
            currency: Regex::new(&currency).unwrap(),
            postcode: Regex::new(r"\b[A-Z]{1,2} ?[-–] ?\d{3,5}\b").unwrap(),
        }
    }

    pub fn phones(&self, text: &str) -> Vec<(usize, usize)> {
        self.phone
            .find_iter(text)
            .filter(|m| m.as_str().chars().filter(|c| c.is_ascii_digit()).count() >= 7)
            .map(|m| (m.start(), m.end()))
            .collect()
    }
}

/// Whitespace tokens with surrounding punctuation stripped, as byte ranges.
pub(crate) fn core_tokens(text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut push = |s: usize, e: usize| {
        let tok = &text[s..e];
        let lead = tok.len() - tok.trim_start_matches(['(', '"', '\'', '[']).len();
        let trimmed = tok.trim_end_matches([',', '.', ';', ':', ')', '"', '\'', ']']);
        if lead < trimmed.len() {
            out.push((s + lead, s + trimmed.len()));
        }
    };
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                push(s, i);
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        push(s, text.len());
    }
    out
}

pub(crate) fn is_integer(tok: &str) -> bool {
    !tok.is_empty() && tok.bytes().all(|b| b.is_ascii_digit())
}
