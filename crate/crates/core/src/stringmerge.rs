//! StringMerge: a symbolic baseline that learns textual rewrite rules from
//! upstream before/after pairs and replays them on the downstream line.

use crate::editseq::{diff_chars, EditOp};
use crate::model::{ConflictDescription, UpstreamChange};
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RewriteRule {
    pub old: String,
    pub new: String,
}

impl RewriteRule {
    /// `None` when `old` is empty or the rule would be a no-op.
    pub fn new(old: impl Into<String>, new: impl Into<String>) -> Option<Self> {
        let (old, new) = (old.into(), new.into());
        (!old.is_empty() && old != new).then_some(Self { old, new })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment {
    Same(String),
    Changed { old: String, new: String },
}

fn segments(ops: &[EditOp]) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    for &op in ops {
        match (op, out.last_mut()) {
            (EditOp::Equal(c), Some(Segment::Same(s))) => s.push(c),
            (EditOp::Equal(c), _) => out.push(Segment::Same(c.to_string())),
            (EditOp::Delete(c), Some(Segment::Changed { old, .. })) => old.push(c),
            (EditOp::Insert(c), Some(Segment::Changed { new, .. })) => new.push(c),
            (EditOp::Delete(c), _) => out.push(Segment::Changed {
                old: c.to_string(),
                new: String::new(),
            }),
            (EditOp::Insert(c), _) => out.push(Segment::Changed {
                old: String::new(),
                new: c.to_string(),
            }),
        }
    }
    out
}

fn edit_weight(old: &str, new: &str) -> usize {
    old.chars().count().max(new.chars().count())
}

/// Absorbs an unchanged run into its neighbouring changes when it is no longer
/// than the edits on either side, so `IsBrowserTypeNormal -> GetIsNormalType`
/// becomes one rewrite instead of several fragments like `wse -> ""`.
fn merge_short_equalities(mut segs: Vec<Segment>) -> Vec<Segment> {
    'scan: loop {
        for k in 1..segs.len().saturating_sub(1) {
            let (Segment::Changed { old: o1, new: n1 }, Segment::Same(eq), Segment::Changed { old: o2, new: n2 }) =
                (&segs[k - 1], &segs[k], &segs[k + 1])
            else {
                continue;
            };
            let len = eq.chars().count();
            if len <= edit_weight(o1, n1) && len <= edit_weight(o2, n2) {
                let merged = Segment::Changed {
                    old: format!("{o1}{eq}{o2}"),
                    new: format!("{n1}{eq}{n2}"),
                };
                segs.splice(k - 1..=k + 1, [merged]);
                continue 'scan;
            }
        }
        return segs;
    }
}

/// Rewrite rules for one pair, left to right.
pub fn rules_for_pair(before: &str, after: &str) -> Vec<RewriteRule> {
    let a: Vec<char> = before.chars().collect();
    let b: Vec<char> = after.chars().collect();
    merge_short_equalities(segments(&diff_chars(&a, &b)))
        .into_iter()
        .filter_map(|seg| match seg {
            Segment::Changed { old, new } => RewriteRule::new(old, new),
            Segment::Same(_) => None,
        })
        .collect()
}

/// Learns rules from every pair (against the first line of `after`),
/// deduplicated, longest `old` first with ties in first-seen order.
pub fn learn_rules(pairs: &[UpstreamChange]) -> Vec<RewriteRule> {
    let mut seen = HashSet::new();
    let mut rules: Vec<RewriteRule> = pairs
        .iter()
        .flat_map(|p| rules_for_pair(&p.before, p.after_first_line()))
        .filter(|r| seen.insert(r.clone()))
        .collect();
    rules.sort_by_key(|r| std::cmp::Reverse(r.old.chars().count()));
    rules
}

/// Applies rules in order. Text produced by a rule is frozen and never
/// rewritten by a later rule.
pub fn apply_rules(line: &str, rules: &[RewriteRule]) -> String {
    // (text, frozen)
    let mut parts: Vec<(String, bool)> = vec![(line.to_string(), false)];
    for rule in rules {
        let mut next = Vec::with_capacity(parts.len());
        for (text, frozen) in parts {
            if frozen || !text.contains(rule.old.as_str()) {
                next.push((text, frozen));
                continue;
            }
            let mut last = 0;
            for (at, _) in text.match_indices(rule.old.as_str()) {
                if at > last {
                    next.push((text[last..at].to_string(), false));
                }
                next.push((rule.new.clone(), true));
                last = at + rule.old.len();
            }
            if last < text.len() {
                next.push((text[last..].to_string(), false));
            }
        }
        parts = next;
    }
    parts.into_iter().map(|(text, _)| text).collect()
}

/// Baseline candidate fix for one description.
pub fn string_merge(description: &ConflictDescription) -> String {
    apply_rules(
        &description.downstream_conflict,
        &learn_rules(&description.upstream_changes),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(old: &str, new: &str) -> RewriteRule {
        RewriteRule::new(old, new).unwrap()
    }

    #[test]
    fn rename_rule() {
        let pairs = [UpstreamChange::new("bool IsIncognito() const;", "bool GetIncognito() const;").unwrap()];
        assert_eq!(learn_rules(&pairs), vec![rule("Is", "Get")]);
    }

    #[test]
    fn identical_pair_has_no_rule() {
        let pairs = [UpstreamChange::new("same", "same").unwrap()];
        assert!(learn_rules(&pairs).is_empty());
    }

    #[test]
    fn rename_applies_downstream() {
        let fixed = apply_rules(
            "BrowserView::GetBrowserViewForBrowser(browser)->IsIncognito())",
            &[rule("Is", "Get")],
        );
        assert_eq!(fixed, "BrowserView::GetBrowserViewForBrowser(browser)->GetIncognito())");
    }

    #[test]
    fn unmatched_and_empty_rules_are_identity() {
        assert_eq!(apply_rules("foo();", &[rule("bar", "baz")]), "foo();");
        assert_eq!(apply_rules("foo();", &[]), "foo();");
    }

    #[test]
    fn replaced_text_is_frozen() {
        // Without freezing, "b" produced by the first rule would become "c".
        let rules = [rule("aa", "b"), rule("b", "c")];
        assert_eq!(apply_rules("aab", &rules), "bc");
        // Deletions leave a barrier: "xy" must not match across the removed "z".
        assert_eq!(apply_rules("xzy", &[rule("z", ""), rule("xy", "Q")]), "xy");
    }

    #[test]
    fn ordering_is_longest_first_then_first_seen() {
        let pairs = [
            UpstreamChange::new("int a;", "int b;").unwrap(),
            UpstreamChange::new("kOldName", "kNewName").unwrap(),
            UpstreamChange::new("int c;", "int d;").unwrap(),
        ];
        let rules = learn_rules(&pairs);
        assert_eq!(rules, vec![rule("Old", "New"), rule("a", "b"), rule("c", "d")]);
    }

    #[test]
    fn short_equalities_merge_into_one_rewrite() {
        let rules = rules_for_pair(
            "if (browser_view_->IsIncognito()||!browser_view_->IsBrowserTypeNormal())",
            "if (browser_view_->GetIncognito()||!browser_view_->GetIsNormalType())",
        );
        assert_eq!(rules, vec![rule("Is", "Get"), rule("IsBrowserTypeNormal", "GetIsNormalType")]);
    }
}
