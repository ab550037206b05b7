//! Draw tails proportionally to their uncovered area and compare the
//! empirical frequencies with the exact law, over all label sets and over
//! the probable-clique space.
//!
//! cargo run --release --example tail_sampling

use std::collections::HashMap;

use corset::label_space::{build_label_space, ContainmentIndex, Side};
use corset::objective::{Rule, RuleSet};
use corset::synth::{generate, GeneratorConfig};
use corset::tail_sampler::{exact_tail_distribution, TailSampler};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> corset::Result<()> {
    let (data, truth) = generate(&GeneratorConfig {
        n_records: 60,
        n_features: 12,
        n_labels: 8,
        n_rules: Some(3),
        labels_per_rule: 2,
        seed: 5,
        ..GeneratorConfig::default()
    })?;
    // pretend the first planted rule was already learned
    let first = &truth.rules[0];
    let ruleset = RuleSet::with_rules(&data, [Rule::new(&data, first.head.clone(), first.tail.clone())?]);
    println!("covered by {:?} -> {:?}", first.head, first.tail);

    let space = build_label_space(&data, 0.3, 4)?;
    let index = ContainmentIndex::build(&data, &space, Side::Labels);
    println!("{} probable label cliques", space.len());

    let draws = 50_000;
    for (name, sampler, exact) in [
        ("all label sets", TailSampler::full(&data, &ruleset), exact_tail_distribution(&data, &ruleset, None)?),
        (
            "probable cliques",
            TailSampler::reduced(&data, &space, &index, &ruleset),
            exact_tail_distribution(&data, &ruleset, Some(&space))?,
        ),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut counts: HashMap<Vec<u32>, usize> = HashMap::new();
        for _ in 0..draws {
            *counts.entry(sampler.sample(&mut rng)?).or_default() += 1;
        }
        let tv: f64 = exact
            .iter()
            .map(|(t, p)| (p - *counts.get(t).unwrap_or(&0) as f64 / draws as f64).abs())
            .sum::<f64>()
            / 2.0;
        println!("\n{name}: {} tails with positive weight, total variation {tv:.4}", exact.len());
        let mut top: Vec<_> = exact.iter().collect();
        top.sort_by(|a, b| b.1.total_cmp(a.1));
        println!("{:<16}{:>10}{:>10}", "tail", "exact", "sampled");
        for (t, p) in top.into_iter().take(6) {
            let q = *counts.get(t).unwrap_or(&0) as f64 / draws as f64;
            println!("{:<16}{p:>10.4}{q:>10.4}", format!("{t:?}"));
        }
    }
    Ok(())
}
