//! Entity and pattern annotation over group text.
//!
//! [`Annotator`] is the pluggable interface; [`RuleAnnotator`] is the
//! deterministic default built from a [`Gazetteer`] and fixed regexes.

mod gazetteer;
mod patterns;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use regex::Regex;
use serde::{Deserialize, Serialize};

pub use gazetteer::{Gazetteer, GazetteerError};

use crate::scalar::Scalar;
use crate::visual::{group_text, VisualPage};
use patterns::{core_tokens, is_integer, Patterns};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AnnotationLabel {
    Org,
    Person,
    Role,
    AddressType,
    Gpe,
    Postcode,
    Cardinal,
    Fac,
    Currency,
    Date,
    Email,
    Phone,
}

impl AnnotationLabel {
    pub const ALL: [AnnotationLabel; 12] = [
        Self::Org,
        Self::Person,
        Self::Role,
        Self::AddressType,
        Self::Gpe,
        Self::Postcode,
        Self::Cardinal,
        Self::Fac,
        Self::Currency,
        Self::Date,
        Self::Email,
        Self::Phone,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Org => "ORG",
            Self::Person => "PERSON",
            Self::Role => "ROLE",
            Self::AddressType => "ADDRESS_TYPE",
            Self::Gpe => "GPE",
            Self::Postcode => "POSTCODE",
            Self::Cardinal => "CARDINAL",
            Self::Fac => "FAC",
            Self::Currency => "CURRENCY",
            Self::Date => "DATE",
            Self::Email => "EMAIL",
            Self::Phone => "PHONE",
        }
    }
}

impl fmt::Display for AnnotationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AnnotationLabel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|l| l.as_str() == s).ok_or_else(|| format!("unknown annotation label `{s}`"))
    }
}

/// A labelled half-open character range of a group's text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub label: AnnotationLabel,
    pub start: usize,
    pub end: usize,
    pub surface: String,
}

/// Annotations keyed by `(page index, group index)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotationSet {
    groups: BTreeMap<(usize, usize), Vec<Annotation>>,
}

impl AnnotationSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, page: usize, group: usize, anns: Vec<Annotation>) {
        self.groups.insert((page, group), anns);
    }

    /// Annotations of one group; empty when the group was never annotated.
    pub fn group(&self, page: usize, group: usize) -> &[Annotation] {
        self.groups.get(&(page, group)).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<Annotation>)> {
        self.groups.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.values().all(Vec::is_empty)
    }

    pub fn len(&self) -> usize {
        self.groups.values().map(Vec::len).sum()
    }

    pub fn extend(&mut self, other: AnnotationSet) {
        self.groups.extend(other.groups);
    }
}

/// Something that can label entity and pattern spans in a piece of text.
pub trait Annotator: Sync {
    /// Annotations over `text`, ordered by `(start, label)`.
    fn annotate_text(&self, text: &str) -> Vec<Annotation>;
}

/// Gazetteer phrase matching plus fixed regexes.
pub struct RuleAnnotator {
    phrases: Vec<(AnnotationLabel, Regex)>,
    orgs: Option<Regex>,
    org_suffixes: Option<Regex>,
    patterns: Patterns,
}

const NAME_CONNECTORS: &[&str] = &["de", "du", "des", "la", "le", "of", "and", "&", "et", "von", "van", "der", "di"];

fn phrase_regex(phrases: &[String]) -> Option<Regex> {
    if phrases.is_empty() {
        return None;
    }
    let mut sorted: Vec<&String> = phrases.iter().collect();
    sorted.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then_with(|| a.cmp(b)));
    let alts: Vec<String> = sorted
        .iter()
        .map(|p| {
            let body = p.split_whitespace().map(regex::escape).collect::<Vec<_>>().join(r"\s+");
            let first_word = p.chars().next().is_some_and(|c| c.is_alphanumeric() || c == '_');
            let last_word = p.chars().last().is_some_and(|c| c.is_alphanumeric() || c == '_');
            format!(
                "{}{}{}",
                if first_word { r"\b" } else { "" },
                body,
                if last_word { r"\b" } else { "" }
            )
        })
        .collect();
    Some(Regex::new(&format!("(?i)(?:{})", alts.join("|"))).expect("escaped phrases form a valid regex"))
}

impl RuleAnnotator {
    pub fn new(gaz: &Gazetteer) -> Self {
        let mut phrases = Vec::new();
        for (label, list) in [
            (AnnotationLabel::Role, &gaz.roles),
            (AnnotationLabel::AddressType, &gaz.address_types),
            (AnnotationLabel::Gpe, &gaz.gpe),
            (AnnotationLabel::Person, &gaz.persons),
            (AnnotationLabel::Fac, &gaz.facilities),
        ] {
            if let Some(re) = phrase_regex(list) {
                phrases.push((label, re));
            }
        }
        Self {
            phrases,
            orgs: phrase_regex(&gaz.orgs),
            org_suffixes: phrase_regex(&gaz.org_suffixes),
            patterns: Patterns::new(),
        }
    }

    /// Capitalised name ending in a legal-form suffix, e.g.
    /// "Oddo Asset Management SA".
    fn org_by_suffix(&self, text: &str) -> Vec<(usize, usize)> {
        let Some(re) = &self.org_suffixes else { return Vec::new() };
        let raw_tokens = raw_tokens(text);
        let mut out = Vec::new();
        for m in re.find_iter(text) {
            // Walk left over the raw tokens that end before the suffix.
            let mut start = None;
            for &(ts, te) in raw_tokens.iter().rev().filter(|(_, te)| *te <= m.start()) {
                let tok = &text[ts..te];
                if tok.ends_with([',', ';', ':']) {
                    break;
                }
                let core = tok.trim_matches(|c: char| matches!(c, '(' | ')' | '"' | '\'' | '[' | ']'));
                // Connectors are skipped but never start a name.
                if NAME_CONNECTORS.contains(&core.to_lowercase().as_str()) && start.is_some() {
                    continue;
                }
                let capitalised = core.chars().find(|c| c.is_alphabetic()).is_some_and(char::is_uppercase)
                    && !is_integer(core);
                if !capitalised {
                    break;
                }
                start = Some(ts);
            }
            if let Some(s) = start {
                out.push((s, m.end()));
            }
        }
        out
    }
}

fn raw_tokens(text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, i));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, text.len()));
    }
    out
}

/// Longest-first greedy choice of non-overlapping byte ranges; ties go to the
/// earlier range. Output is sorted by start.
fn select_longest(mut cands: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    cands.sort_by(|a, b| (b.1 - b.0).cmp(&(a.1 - a.0)).then(a.0.cmp(&b.0)));
    cands.dedup();
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    for c in cands {
        if chosen.iter().all(|k| c.1 <= k.0 || c.0 >= k.1) {
            chosen.push(c);
        }
    }
    chosen.sort();
    chosen
}

impl Annotator for RuleAnnotator {
    fn annotate_text(&self, text: &str) -> Vec<Annotation> {
        let tokens = core_tokens(text);
        let mut by_label: Vec<(AnnotationLabel, Vec<(usize, usize)>)> = Vec::new();

        for (label, re) in &self.phrases {
            by_label.push((*label, re.find_iter(text).map(|m| (m.start(), m.end())).collect()));
        }

        let mut orgs = self.org_by_suffix(text);
        if let Some(re) = &self.orgs {
            orgs.extend(re.find_iter(text).map(|m| (m.start(), m.end())));
        }
        by_label.push((AnnotationLabel::Org, orgs));

        let p = &self.patterns;
        by_label.push((AnnotationLabel::Email, p.email.find_iter(text).map(|m| (m.start(), m.end())).collect()));
        by_label.push((AnnotationLabel::Phone, p.phones(text)));
        by_label.push((AnnotationLabel::Date, p.date.find_iter(text).map(|m| (m.start(), m.end())).collect()));
        by_label.push((AnnotationLabel::Currency, p.currency.find_iter(text).map(|m| (m.start(), m.end())).collect()));

        let int_tokens: Vec<(usize, usize)> = tokens.iter().copied().filter(|&(s, e)| is_integer(&text[s..e])).collect();
        by_label.push((AnnotationLabel::Cardinal, int_tokens.clone()));
        let mut postcodes: Vec<(usize, usize)> = p.postcode.find_iter(text).map(|m| (m.start(), m.end())).collect();
        postcodes.extend(int_tokens.into_iter().filter(|&(s, e)| e - s == 5));
        by_label.push((AnnotationLabel::Postcode, postcodes));

        let offsets = CharOffsets::new(text);
        let mut out = Vec::new();
        for (label, cands) in by_label {
            for (bs, be) in select_longest(cands) {
                out.push(Annotation {
                    label,
                    start: offsets.char_at(bs),
                    end: offsets.char_at(be),
                    surface: text[bs..be].to_string(),
                });
            }
        }
        out.sort_by_key(|a| (a.start, a.label, a.end));
        out
    }
}

/// Byte offset → character offset lookup.
struct CharOffsets {
    starts: Vec<usize>,
}

impl CharOffsets {
    fn new(text: &str) -> Self {
        let mut starts: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        starts.push(text.len());
        Self { starts }
    }

    fn char_at(&self, byte: usize) -> usize {
        self.starts.binary_search(&byte).unwrap_or_else(|i| i)
    }
}

/// Annotates every group of one page.
pub fn annotate<T: Scalar, A: Annotator + ?Sized>(page_index: usize, page: &VisualPage<T>, annotator: &A) -> AnnotationSet {
    let mut set = AnnotationSet::new();
    for (gi, g) in page.groups.iter().enumerate() {
        set.insert(page_index, gi, annotator.annotate_text(&group_text(g)));
    }
    set
}

/// Labels whose joint presence signals an address.
pub const ADDRESS_INDICATORS: [AnnotationLabel; 3] = [AnnotationLabel::Gpe, AnnotationLabel::Postcode, AnnotationLabel::Cardinal];

/// A group is an address candidate when at least two distinct indicator
/// labels (GPE, POSTCODE, CARDINAL) occur in it.
pub fn is_address_candidate(anns: &[Annotation]) -> bool {
    ADDRESS_INDICATORS
        .iter()
        .filter(|l| anns.iter().any(|a| a.label == **l))
        .count()
        >= 2
}

pub fn count_label(anns: &[Annotation], label: AnnotationLabel) -> usize {
    anns.iter().filter(|a| a.label == label).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::visual::char_slice;

    fn builtin() -> RuleAnnotator {
        RuleAnnotator::new(&Gazetteer::builtin())
    }

    fn labels(anns: &[Annotation], label: AnnotationLabel) -> Vec<&str> {
        anns.iter().filter(|a| a.label == label).map(|a| a.surface.as_str()).collect()
    }

    #[test]
    fn phone_after_tel() {
        let anns = builtin().annotate_text("Tel: +352 26 26 26 1");
        assert_eq!(labels(&anns, AnnotationLabel::Phone), vec!["+352 26 26 26 1"]);
    }

    #[test]
    fn registered_office_is_address_type_not_org() {
        let anns = builtin().annotate_text("Registered Office of the Fund");
        assert_eq!(labels(&anns, AnnotationLabel::AddressType), vec!["Registered Office"]);
        assert!(labels(&anns, AnnotationLabel::Org).is_empty());
    }

    #[test]
    fn empty_gazetteer_no_hits() {
        let a = RuleAnnotator::new(&Gazetteer::default());
        assert!(a.annotate_text("Legal Counsel to the Fund").is_empty());
    }

    #[test]
    fn address_candidate_from_indicators() {
        let anns = builtin().annotate_text("14, boulevard Royal L-2449 LUXEMBOURG");
        assert_eq!(labels(&anns, AnnotationLabel::Cardinal), vec!["14"]);
        assert_eq!(labels(&anns, AnnotationLabel::Postcode), vec!["L-2449"]);
        assert_eq!(labels(&anns, AnnotationLabel::Gpe), vec!["LUXEMBOURG"]);
        assert!(is_address_candidate(&anns));
    }

    #[test]
    fn lone_indicators_are_not_addresses() {
        let a = builtin();
        assert!(!is_address_candidate(&a.annotate_text("DIRECTORY")));
        assert!(!is_address_candidate(&a.annotate_text("LUXEMBOURG")));
    }

    #[test]
    fn en_dash_postcodes() {
        let a = builtin();
        assert_eq!(labels(&a.annotate_text("L–1855 Luxembourg"), AnnotationLabel::Postcode), vec!["L–1855"]);
        assert_eq!(labels(&a.annotate_text("L – 1115 Luxemburg"), AnnotationLabel::Postcode), vec!["L – 1115"]);
        assert_eq!(labels(&a.annotate_text("CH-8023 Zurich"), AnnotationLabel::Postcode), vec!["CH-8023"]);
        assert_eq!(labels(&a.annotate_text("75440 Paris"), AnnotationLabel::Postcode), vec!["75440"]);
    }

    #[test]
    fn orgs_by_suffix() {
        let a = builtin();
        let anns = a.annotate_text("Deutsche Bank (Suisse) S.A. 2 Boulevard Konrad Adenauer");
        assert_eq!(labels(&anns, AnnotationLabel::Org), vec!["Deutsche Bank (Suisse) S.A."]);
        let anns = a.annotate_text("KPMG Luxembourg Société Coopérative 39, Avenue John F. Kennedy");
        assert_eq!(labels(&anns, AnnotationLabel::Org), vec!["KPMG Luxembourg Société Coopérative"]);
        let anns = a.annotate_text("Oddo Asset Management SA 12, boulevard de la Madeleine");
        assert_eq!(labels(&anns, AnnotationLabel::Org), vec!["Oddo Asset Management SA"]);
        assert!(labels(&a.annotate_text("Legal Counsel to the Fund and Master Fund"), AnnotationLabel::Org).is_empty());
    }

    #[test]
    fn roles_do_not_match_inside_words() {
        let a = builtin();
        assert!(labels(&a.annotate_text("DIRECTORY"), AnnotationLabel::Role).is_empty());
        assert_eq!(labels(&a.annotate_text("Board of Directors"), AnnotationLabel::Role), vec!["Board of Directors"]);
    }

    #[test]
    fn patterns() {
        let a = builtin();
        assert_eq!(labels(&a.annotate_text("Email: info@fund.lu"), AnnotationLabel::Email), vec!["info@fund.lu"]);
        assert_eq!(labels(&a.annotate_text("dated 12 March 2019"), AnnotationLabel::Date), vec!["12 March 2019"]);
        assert_eq!(labels(&a.annotate_text("on 01/02/2020"), AnnotationLabel::Date), vec!["01/02/2020"]);
        assert_eq!(labels(&a.annotate_text("fee of EUR 1,000.50"), AnnotationLabel::Currency), vec!["EUR 1,000.50"]);
        assert_eq!(labels(&a.annotate_text("fee of $250"), AnnotationLabel::Currency), vec!["$250"]);
        assert!(labels(&a.annotate_text("Bahnhofquai 9/11"), AnnotationLabel::Cardinal).is_empty());
        assert!(labels(&a.annotate_text("4th Floor"), AnnotationLabel::Cardinal).is_empty());
    }

    #[test]
    fn surfaces_match_char_slices() {
        let text = "KPMG Luxembourg Société Coopérative 39, Avenue John F. Kennedy, L–1855 Luxembourg";
        for a in builtin().annotate_text(text) {
            assert_eq!(char_slice(text, a.start, a.end), a.surface);
        }
    }

    #[test]
    fn address_candidate_is_monotone() {
        let anns = builtin().annotate_text("14, boulevard Royal L-2449 LUXEMBOURG");
        let mut more = anns.clone();
        more.push(Annotation { label: AnnotationLabel::Org, start: 0, end: 1, surface: "1".into() });
        assert!(is_address_candidate(&more));
    }
}
