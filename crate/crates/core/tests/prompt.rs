mod common;

use common::*;
use mergeprompt_core::editseq::change_pattern;
use mergeprompt_core::model::{ConflictDescription, TextualConflict, UpstreamChange};
use mergeprompt_core::prompt::*;
use proptest::prelude::*;
use std::collections::HashSet;

#[test]
fn semantic_one_shot_matches_golden() {
    let shot = render_shot(PromptFormat::SemanticDiff, &Example::Semantic(&app_url_shot())).unwrap();
    let prompt = assemble(
        &[shot],
        &incognito_query(),
        PromptFormat::SemanticDiff,
        SelectionStrategy::MaximalPlain,
        DEFAULT_BUDGET,
        &TokenEstimator::default(),
    )
    .unwrap();
    assert_eq!(prompt.text, golden("semantic_one_shot.txt"));
    assert_eq!((prompt.shots_used, prompt.pairs_used), (1, 2));
}

#[test]
fn conflict_markers_match_golden() {
    let shots: Vec<Shot> = representative_shots()
        .iter()
        .map(|c| render_shot(PromptFormat::ConflictMarkers, &Example::Textual(c)).unwrap())
        .collect();
    let prompt = assemble(
        &shots,
        &build_config_conflict(),
        PromptFormat::ConflictMarkers,
        SelectionStrategy::FirstPair,
        DEFAULT_BUDGET,
        &TokenEstimator::default(),
    )
    .unwrap();
    assert_eq!(prompt.text, golden("markers_include.txt"));
    assert_eq!(prompt.pairs_used, 0);
}

#[test]
fn three_way_shots_match_goldens() {
    let c = floor_conflict();
    for (format, file) in [
        (PromptFormat::ConflictMarkers, "markers_floor_shot.txt"),
        (PromptFormat::MergeTuple, "tuple_floor_shot.txt"),
    ] {
        let shot = render_shot(format, &Example::Textual(&c)).unwrap();
        assert_eq!(shot.text(), golden(file), "{format}");
        assert!(shot.question.ends_with(format.answer_cue()));
    }
}

#[test]
fn goldens_parse_back() {
    let blocks = parse_semantic(&golden("semantic_one_shot.txt")).unwrap();
    assert_eq!(blocks.len(), 2);
    assert_eq!(blocks[1].pairs, incognito_query().upstream_changes);
    assert_eq!(blocks[1].fix, None);
    let blocks = parse_textual(PromptFormat::MergeTuple, &golden("tuple_floor_shot.txt")).unwrap();
    assert_eq!(blocks[0].base, floor_conflict().base);
    assert_eq!(blocks[0].resolution.as_deref(), Some(&floor_conflict().resolution[..]));
}

// Lines that cannot contain a newline; the textual grammar also needs lines
// that are not blank and are not one of its own structural markers.
fn line() -> impl Strategy<Value = String> {
    "[ -~]{0,12}"
}

fn text_line() -> impl Strategy<Value = String> {
    "[a-z;(){} +=.-]{1,12}".prop_filter("structural", |l| {
        !matches!(l.as_str(), "=======" | "|||||||" | ">>>>>>>" | "a.js:" | "base.js:" | "b.js:" | "Answers:")
    })
}

fn pair() -> impl Strategy<Value = UpstreamChange> {
    (line(), prop::collection::vec(line(), 1..3)).prop_map(|(before, after)| UpstreamChange {
        before,
        after: after.join("\n"),
    })
}

fn description() -> impl Strategy<Value = ConflictDescription> {
    (prop::collection::vec(pair(), 0..4), line(), line()).prop_map(|(pairs, conflict, fix)| ConflictDescription {
        id: "p".into(),
        upstream_changes: pairs,
        downstream_conflict: conflict,
        downstream_fix: Some(fix),
        diagnostic: None,
    })
}

fn textual(need_base: bool) -> impl Strategy<Value = TextualConflict> {
    let lines = |min| prop::collection::vec(text_line(), min..4);
    (lines(1), lines(if need_base { 1 } else { 0 }), lines(0), lines(1)).prop_map(|(a, base, b, r)| {
        TextualConflict {
            id: "t".into(),
            variant_a: a,
            base,
            variant_b: b,
            resolution: r,
        }
    })
}

proptest! {
    #[test]
    fn semantic_rendering_round_trips(shots in prop::collection::vec(description(), 0..3), query in description()) {
        let mut text: String = shots
            .iter()
            .map(|d| render_shot(PromptFormat::SemanticDiff, &Example::Semantic(d)).unwrap().text())
            .collect();
        text.push_str(&build_query(PromptFormat::SemanticDiff, &Example::Semantic(&query)).unwrap());
        let blocks = parse_semantic(&text).unwrap();
        prop_assert_eq!(blocks.len(), shots.len() + 1);
        for (block, d) in blocks.iter().zip(shots.iter().chain([&query])) {
            prop_assert_eq!(&block.pairs, &d.upstream_changes);
            prop_assert_eq!(&block.conflict, &d.downstream_conflict);
        }
        for (block, d) in blocks.iter().zip(&shots) {
            prop_assert_eq!(&block.fix, &d.downstream_fix);
        }
        prop_assert!(blocks.last().unwrap().fix.is_none());
    }

    #[test]
    fn markers_rendering_round_trips(shots in prop::collection::vec(textual(false), 0..3), query in textual(false)) {
        textual_round_trip(PromptFormat::ConflictMarkers, &shots, &query)?;
    }

    #[test]
    fn tuple_rendering_round_trips(shots in prop::collection::vec(textual(true), 0..3), query in textual(true)) {
        textual_round_trip(PromptFormat::MergeTuple, &shots, &query)?;
    }

    #[test]
    fn assembled_prompts_fit_and_stay_distinct(
        pairs in prop::collection::vec(("[a-z]{1,60}", "[a-z]{1,60}"), 1..200),
        strategy in prop_oneof![
            Just(SelectionStrategy::FirstPair),
            Just(SelectionStrategy::MaximalPlain),
            Just(SelectionStrategy::MaximalDistinct),
        ],
        budget in 60usize..600,
    ) {
        let d = ConflictDescription {
            id: "x".into(),
            upstream_changes: pairs.into_iter().map(|(b, a)| UpstreamChange { before: b, after: a }).collect(),
            downstream_conflict: "conflict();".into(),
            downstream_fix: None,
            diagnostic: None,
        };
        let est = TokenEstimator::default();
        let p = assemble(&[], &d, PromptFormat::SemanticDiff, strategy, budget, &est).unwrap();
        prop_assert!(p.token_estimate <= budget);
        prop_assert_eq!(p.token_estimate, est.estimate(&p.text));
        prop_assert!(p.text.ends_with("Answer:\n"));
        let included = &parse_semantic(&p.text).unwrap()[0].pairs;
        prop_assert_eq!(included.len(), p.pairs_used);
        match strategy {
            SelectionStrategy::FirstPair => prop_assert!(p.pairs_used <= 1),
            SelectionStrategy::MaximalPlain => {
                prop_assert_eq!(&included[..], &d.upstream_changes[..p.pairs_used]);
                let first = assemble(&[], &d, PromptFormat::SemanticDiff, SelectionStrategy::FirstPair, budget, &est).unwrap();
                prop_assert!(p.pairs_used >= first.pairs_used);
            }
            SelectionStrategy::MaximalDistinct => {
                let patterns: HashSet<_> = included.iter().map(change_pattern).collect();
                prop_assert_eq!(patterns.len(), included.len());
            }
        }
    }
}

fn textual_round_trip(format: PromptFormat, shots: &[TextualConflict], query: &TextualConflict) -> Result<(), TestCaseError> {
    let mut text: String = shots
        .iter()
        .map(|c| render_shot(format, &Example::Textual(c)).unwrap().text())
        .collect();
    text.push_str(&build_query(format, &Example::Textual(query)).unwrap());
    let blocks = parse_textual(format, &text).unwrap();
    prop_assert_eq!(blocks.len(), shots.len() + 1);
    for (block, c) in blocks.iter().zip(shots.iter().chain([query])) {
        prop_assert_eq!(&block.variant_a, &c.variant_a);
        prop_assert_eq!(&block.base, &c.base);
        prop_assert_eq!(&block.variant_b, &c.variant_b);
    }
    for (block, c) in blocks.iter().zip(shots) {
        prop_assert_eq!(block.resolution.as_ref(), Some(&c.resolution));
    }
    Ok(())
}
