use super::PromptError;
use crate::model::{ConflictDescription, TextualConflict, UpstreamChange};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The fixed semantic shot: a field rename `app_url` -> `start_url`.
pub fn app_url_shot() -> ConflictDescription {
    ConflictDescription {
        id: "app_url".into(),
        upstream_changes: vec![UpstreamChange {
            before: "web_app_info->app_url = url;".into(),
            after: "web_app_info->start_url = url;".into(),
        }],
        downstream_conflict: "web_app_info->app_url = url;".into(),
        downstream_fix: Some("web_app_info->start_url = url;".into()),
        diagnostic: None,
    }
}

/// Hand-picked textual shots: two conflicting includes resolved by keeping both.
pub fn representative_shots() -> Vec<TextualConflict> {
    let a = "#include \"chrome/browser/ui/views/accessibility/caption_bubble_controller_views.h\"";
    let b = "#include \"chrome/browser/ui/views/accessibility/hc_with_theme_bubble_view.h\"";
    vec![TextualConflict {
        id: "caption_bubble".into(),
        base: vec![],
        variant_a: vec![a.into()],
        variant_b: vec![b.into()],
        resolution: vec![a.into(), b.into()],
    }]
}

/// How shot examples are drawn from a textual dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShotSplit {
    /// `count` examples chosen uniformly with a seeded generator.
    Random { count: usize, seed: u64 },
    /// Examples with these ids, in this order.
    Named(Vec<String>),
}

/// Removes the shot examples from `pool`, returning `(shots, remaining)`.
/// The remaining examples keep their original order and form the evaluation set.
pub fn split_shots(
    pool: Vec<TextualConflict>,
    split: &ShotSplit,
) -> Result<(Vec<TextualConflict>, Vec<TextualConflict>), PromptError> {
    let picked: Vec<usize> = match split {
        ShotSplit::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut idx = sample(&mut rng, pool.len(), (*count).min(pool.len())).into_vec();
            idx.sort_unstable();
            idx
        }
        ShotSplit::Named(ids) => ids
            .iter()
            .map(|id| {
                pool.iter()
                    .position(|c| &c.id == id)
                    .ok_or_else(|| PromptError::UnknownShot(id.clone()))
            })
            .collect::<Result<_, _>>()?,
    };
    let mut slots: Vec<Option<TextualConflict>> = pool.into_iter().map(Some).collect();
    let shots = picked.iter().filter_map(|&i| slots[i].take()).collect();
    Ok((shots, slots.into_iter().flatten().collect()))
}

/// Convenience wrapper: `count` seeded random shots from `pool`.
pub fn random_shots(pool: &[TextualConflict], count: usize, seed: u64) -> Vec<TextualConflict> {
    split_shots(pool.to_vec(), &ShotSplit::Random { count, seed })
        .map(|(shots, _)| shots)
        .unwrap_or_default()
}
