use super::render::{build_query, render_pair, semantic_query};
use super::{Example, Prompt, PromptError, PromptFormat, SelectionStrategy, Shot, TokenEstimator};
use crate::editseq::distinct_pairs;
use crate::model::{ConflictDescription, UpstreamChange};

/// The completion model's context size.
pub const DEFAULT_BUDGET: usize = 2048;

/// Chooses the upstream pairs to show in the query.
///
/// `fixed_overhead` is the raw (unscaled) token count of the shots plus the
/// pair-less query; each pair adds the raw count of its rendered block and the
/// total is scaled by the estimator's safety factor before being compared to
/// `budget`. Pairs are taken lazily, so a huge pair list costs no more than
/// the prefix that fits.
pub fn select_pairs(
    description: &ConflictDescription,
    strategy: SelectionStrategy,
    budget: usize,
    estimator: &TokenEstimator,
    fixed_overhead: usize,
) -> Result<Vec<UpstreamChange>, PromptError> {
    let pairs = &description.upstream_changes;
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    let candidates: Box<dyn Iterator<Item = &UpstreamChange>> = match strategy {
        SelectionStrategy::FirstPair => Box::new(pairs.iter().take(1)),
        SelectionStrategy::MaximalPlain => Box::new(pairs.iter()),
        SelectionStrategy::MaximalDistinct => Box::new(distinct_pairs(pairs)),
    };
    let mut used = fixed_overhead;
    let mut chosen = Vec::new();
    for pair in candidates {
        let next = used + estimator.raw(&render_pair(pair));
        if estimator.scale(next) > budget {
            if chosen.is_empty() {
                let needed = estimator.scale(next);
                return Err(PromptError::Overflow {
                    needed,
                    budget,
                    overflow: needed - budget,
                });
            }
            break;
        }
        used = next;
        chosen.push(pair.clone());
    }
    Ok(chosen)
}

/// Concatenates `shots` and the query for `target` into one prompt whose
/// estimate fits `budget`.
///
/// Only the query's pair list is ever shrunk; if even the first pair does not
/// fit, the query is sent with no pairs. Shots are never truncated.
pub fn assemble<'a>(
    shots: &[Shot],
    target: impl Into<Example<'a>>,
    format: PromptFormat,
    strategy: SelectionStrategy,
    budget: usize,
    estimator: &TokenEstimator,
) -> Result<Prompt, PromptError> {
    let target = target.into();
    let mut text: String = shots.iter().map(Shot::text).collect();
    let shots_raw = estimator.raw(&text);

    let (query, pairs_used) = match target {
        Example::Semantic(d) if format == PromptFormat::SemanticDiff => {
            let skeleton = semantic_query(d, &[]);
            let overhead = shots_raw + estimator.raw(&skeleton);
            check_shots(estimator.scale(overhead), budget)?;
            let mut pairs = match select_pairs(d, strategy, budget, estimator, overhead) {
                Ok(pairs) => pairs,
                Err(PromptError::Overflow { overflow, .. }) => {
                    log::warn!("{}: first upstream pair is {overflow} tokens over budget; sending no pairs", d.id);
                    Vec::new()
                }
                Err(e) => return Err(e),
            };
            // Counters need not be additive across block boundaries, so
            // re-check the real text and drop trailing pairs if needed.
            loop {
                let query = semantic_query(d, &pairs);
                let total = estimator.estimate(&format!("{text}{query}"));
                if total <= budget || pairs.is_empty() {
                    break (query, pairs.len());
                }
                pairs.pop();
            }
        }
        other => (build_query(format, &other)?, 0),
    };
    text.push_str(&query);
    let token_estimate = estimator.estimate(&text);
    check_shots(token_estimate, budget)?;
    Ok(Prompt {
        text,
        token_estimate,
        shots_used: shots.len(),
        pairs_used,
    })
}

fn check_shots(needed: usize, budget: usize) -> Result<(), PromptError> {
    if needed > budget {
        Err(PromptError::ShotsOverflow { needed, budget })
    } else {
        Ok(())
    }
}
