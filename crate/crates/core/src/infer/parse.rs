//! Extraction of a choice label from free-form model output.
//!
//! Two tiers. Explicit forms (`answer is X`, `answer: X`, `(X)`, `**X**`) are
//! matched case-insensitively and the last one wins. Without any explicit
//! form, bare label tokens are accepted only if exactly one distinct label
//! occurs; single letters must then be uppercase so the article "a" does not
//! count as a vote for choice A.

use regex::Regex;

fn alternation(labels: &[String]) -> String {
    let mut sorted: Vec<&String> = labels.iter().collect();
    sorted.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    sorted.iter().map(|l| regex::escape(l)).collect::<Vec<_>>().join("|")
}

fn canonical<'a>(labels: &'a [String], found: &str) -> Option<&'a String> {
    labels.iter().find(|l| l.eq_ignore_ascii_case(found))
}

/// The label `raw` commits to, or `None` for Unparsed.
pub fn parse_answer(raw: &str, labels: &[String]) -> Option<String> {
    let labels: Vec<String> = labels.iter().filter(|l| !l.is_empty()).cloned().collect();
    if labels.is_empty() {
        return None;
    }
    let alt = alternation(&labels);
    let explicit = Regex::new(&format!(
        r"(?i)(?:answer\s*(?:is|:)\s*[\(\[]?\**\s*(?P<a>{alt})\b|\((?P<b>{alt})\)|\*\*(?P<c>{alt})\*\*)"
    ))
    .expect("escaped labels form a valid pattern");
    let mut last: Option<(usize, &str)> = None;
    for caps in explicit.captures_iter(raw) {
        let m = caps.name("a").or_else(|| caps.name("b")).or_else(|| caps.name("c")).expect("one group matches");
        if last.is_none_or(|(pos, _)| m.start() >= pos) {
            last = Some((m.start(), m.as_str()));
        }
    }
    if let Some((_, found)) = last {
        return canonical(&labels, found).cloned();
    }

    let token = Regex::new(&format!(r"(?i)\b(?:{alt})\b")).expect("escaped labels form a valid pattern");
    let mut distinct: Vec<&String> = Vec::new();
    for m in token.find_iter(raw) {
        let text = m.as_str();
        let single_letter = text.len() == 1 && text.chars().all(|c| c.is_ascii_alphabetic());
        if single_letter && !text.chars().all(|c| c.is_ascii_uppercase()) {
            continue;
        }
        if let Some(l) = canonical(&labels, text) {
            if !distinct.contains(&l) {
                distinct.push(l);
            }
        }
    }
    match distinct.as_slice() {
        [one] => Some((*one).clone()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab() -> Vec<String> {
        vec!["A".into(), "B".into()]
    }

    #[test]
    fn documented_examples() {
        assert_eq!(parse_answer("The answer is (A).", &ab()).as_deref(), Some("A"));
        assert_eq!(parse_answer("B", &ab()).as_deref(), Some("B"));
        assert_eq!(parse_answer("Both look equally close.", &ab()), None);
    }

    #[test]
    fn explicit_forms() {
        assert_eq!(parse_answer("answer: b", &ab()).as_deref(), Some("B"));
        assert_eq!(parse_answer("I pick **B**", &ab()).as_deref(), Some("B"));
        assert_eq!(parse_answer("Answer is [A]", &ab()).as_deref(), Some("A"));
        assert_eq!(parse_answer("(A) looks near, but the answer is (B).", &ab()).as_deref(), Some("B"));
    }

    #[test]
    fn standalone_conflicts_are_unparsed() {
        assert_eq!(parse_answer("A or B", &ab()), None);
        assert_eq!(parse_answer("It is a point near B", &ab()).as_deref(), Some("B"));
        assert_eq!(parse_answer("", &ab()), None);
    }

    #[test]
    fn numeric_labels() {
        let labels: Vec<String> = (1..=8).map(|k| k.to_string()).collect();
        assert_eq!(parse_answer("The answer is (7).", &labels).as_deref(), Some("7"));
        assert_eq!(parse_answer("Point 12 maybe", &labels), None);
        assert_eq!(parse_answer("3", &labels).as_deref(), Some("3"));
    }

    proptest! {
        #[test]
        fn never_outside_labels(raw in ".{0,80}", n in 2usize..8) {
            let labels: Vec<String> = (0..n).map(|k| ((b'A' + k as u8) as char).to_string()).collect();
            if let Some(l) = parse_answer(&raw, &labels) {
                prop_assert!(labels.contains(&l));
            }
        }

        #[test]
        fn canonical_reply_roundtrips(k in 0usize..8) {
            let labels: Vec<String> = (0..8).map(|k| ((b'A' + k as u8) as char).to_string()).collect();
            let raw = format!("The answer is ({}).", labels[k]);
            prop_assert_eq!(parse_answer(&raw, &labels), Some(labels[k].clone()));
        }
    }
}
