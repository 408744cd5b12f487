use std::collections::BTreeSet;
use std::sync::OnceLock;

use rand::Rng;

use super::translate::{translate_state, TextObs};
use crate::world::{generate_task, TaskType};

const DISTRACTORS: usize = 64;

/// Replacement vocabulary: every token appearing in the textual
/// observations of a fixed panel of generated worlds, plus 64 distractors.
pub fn noise_vocabulary() -> &'static [String] {
    static VOCAB: OnceLock<Vec<String>> = OnceLock::new();
    VOCAB.get_or_init(|| {
        let mut tokens = BTreeSet::new();
        for t in TaskType::ALL {
            for seed in 0..4u64 {
                for ood in [false, true] {
                    if let Ok((world, _)) = generate_task(seed, t, ood) {
                        let obs = translate_state(&world);
                        for field in fields(&obs) {
                            tokens.extend(field.split_whitespace().map(str::to_string));
                        }
                        tokens.extend(obs.render().split_whitespace().map(str::to_string));
                    }
                }
            }
        }
        for i in 0..DISTRACTORS {
            tokens.insert(format!("thing{i}"));
        }
        tokens.into_iter().collect()
    })
}

fn fields(obs: &TextObs) -> Vec<&String> {
    let mut out = vec![&obs.room_description, &obs.location];
    out.extend(&obs.observed_objects);
    out.extend(&obs.observed_relations);
    out.extend(&obs.inventory);
    out
}

fn noise_field(text: &str, rate: f64, rng: &mut impl Rng, vocab: &[String]) -> String {
    text.split_whitespace()
        .map(|tok| {
            if rng.random_bool(rate) {
                loop {
                    let cand = &vocab[rng.random_range(0..vocab.len())];
                    if cand != tok {
                        return cand.clone();
                    }
                }
            } else {
                tok.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Replaces each whitespace-delimited token with probability `rate` by a
/// different vocabulary token. Fields are processed in declaration order.
pub fn apply_text_noise(obs: &TextObs, rate: f64, seed: u64) -> TextObs {
    assert!((0.0..=1.0).contains(&rate), "noise rate must lie in [0, 1]");
    if rate == 0.0 {
        return obs.clone();
    }
    let vocab = noise_vocabulary();
    let mut rng = crate::seed::rng(seed);
    let mut one = |s: &String| noise_field(s, rate, &mut rng, vocab);
    TextObs {
        room_description: one(&obs.room_description),
        observed_objects: obs.observed_objects.iter().map(&mut one).collect(),
        observed_relations: obs.observed_relations.iter().map(&mut one).collect(),
        inventory: obs.inventory.iter().map(&mut one).collect(),
        location: one(&obs.location),
    }
}

/// Number of token positions whose value changed.
pub fn token_changes(a: &TextObs, b: &TextObs) -> (usize, usize) {
    let mut changed = 0;
    let mut total = 0;
    for (x, y) in fields(a).into_iter().zip(fields(b)) {
        for (p, q) in x.split_whitespace().zip(y.split_whitespace()) {
            total += 1;
            changed += usize::from(p != q);
        }
    }
    (changed, total)
}
