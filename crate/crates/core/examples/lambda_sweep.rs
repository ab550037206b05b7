//! Average coverage overlap between rules as the diversity weight grows.
//!
//! cargo run --release --example lambda_sweep -- [seeds] [max_rules]

use corset::eval::{avg_pairwise_overlap, micro_f1};
use corset::learner::{fit, LearnerConfig};
use corset::synth::{generate, GeneratorConfig};

fn main() -> corset::Result<()> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map_or(3, |s| s.parse().expect("seeds"));
    let max_rules: usize = args.next().map_or(40, |s| s.parse().expect("max_rules"));

    let (data, _) = generate(&GeneratorConfig { n_records: 500, seed: 1, ..GeneratorConfig::default() })?;
    println!("lambda\tseed\tavg_overlap\tmicro_f1\trules");
    for lambda in [0.01, 0.1, 1.0, 10.0, 100.0] {
        for seed in 0..seeds {
            let cfg = LearnerConfig { lambda, max_rules, pool_size: 200, seed, ..LearnerConfig::default() };
            let model = fit(&data, &cfg)?;
            let rules = model.bind(&data)?;
            let f1 = micro_f1(&data.label_sets(), &model.predict_dataset(&data))?;
            println!(
                "{lambda}\t{seed}\t{:.2}\t{f1:.4}\t{}",
                avg_pairwise_overlap(&rules),
                rules.len()
            );
        }
    }
    Ok(())
}
