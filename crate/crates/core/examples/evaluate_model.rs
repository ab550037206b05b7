//! Train, save the model as JSON, load it back and score it on held-out
//! data. Also compares the two head samplers.
//!
//! cargo run --release --example evaluate_model

use corset::eval::evaluate;
use corset::learner::{fit, LearnerConfig, RuleSetModel, SamplerVariant};
use corset::synth::{generate, GeneratorConfig};

fn main() -> corset::Result<()> {
    let (data, _) = generate(&GeneratorConfig {
        n_records: 600,
        n_features: 60,
        n_labels: 60,
        seed: 11,
        ..GeneratorConfig::default()
    })?;
    let (train, _, test) = data.split([0.6, 0.1, 0.3], 11)?;
    let path = std::env::temp_dir().join("corset-example-model.json");

    for variant in [SamplerVariant::Surs, SamplerVariant::Gh] {
        let config = LearnerConfig {
            variant,
            tau: Some(0.01),
            pool_size: 200,
            ..LearnerConfig::default()
        };
        let model = fit(&train, &config)?;
        model.save(&path)?;
        let loaded = RuleSetModel::load(&path)?;
        assert_eq!(loaded.predict_dataset(&test), model.predict_dataset(&test));
        println!("{variant:?}");
        print!("{}", evaluate(&loaded, &test, true)?.to_table());
        println!();
    }
    Ok(())
}
