//! Plant 33 rules in a 1000 x 100 x 100 dataset, learn on 60% of it and
//! score the rest.
//!
//! cargo run --release --example synthetic_recovery -- [seed] [tau]

use corset::data::Dataset;
use corset::eval::evaluate;
use corset::learner::{fit, LearnerConfig};
use corset::synth::{generate, recovery_score, GeneratorConfig};

fn main() -> corset::Result<()> {
    env_logger::init();
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed"));
    let tau: f64 = args.next().map_or(0.008, |s| s.parse().expect("tau"));

    let (data, truth) = generate(&GeneratorConfig { seed, ..GeneratorConfig::default() })?;
    let [train_ids, _, test_ids] = data.split_ids([0.6, 0.1, 0.3], seed)?;
    let train: Dataset = data.subset(&train_ids);
    let test: Dataset = data.subset(&test_ids);

    let config = LearnerConfig { tau: Some(tau), seed, ..LearnerConfig::default() };
    let start = std::time::Instant::now();
    let model = fit(&train, &config)?;
    let report = evaluate(&model, &test, false)?;

    println!("trained in {:.1?}", start.elapsed());
    print!("{}", report.to_table());
    println!("recovery              {:>12.3}", recovery_score(&truth, &model.rules, &data)?);
    for r in &model.rules {
        println!("{:?} -> {:?}", r.head, r.tail);
    }
    Ok(())
}
