//! Learn rules from a handful of records written inline, then predict.
//!
//! cargo run --example quickstart

use corset::data::{Dataset, Record};
use corset::learner::{fit, LearnerConfig};

fn main() -> corset::Result<()> {
    // features: 0 sunny, 1 warm, 2 windy, 3 weekend
    // labels:   0 beach, 1 ice cream, 2 kite
    let rows: &[(&[u32], &[u32])] = &[
        (&[0, 1, 3], &[0, 1]),
        (&[0, 1], &[0, 1]),
        (&[0, 1, 2], &[0, 1, 2]),
        (&[2, 3], &[2]),
        (&[0, 2, 3], &[2]),
        (&[1], &[]),
        (&[0, 1, 3], &[0, 1]),
        (&[2], &[2]),
        (&[3], &[]),
        (&[0, 1, 2, 3], &[0, 1, 2]),
    ];
    let records = rows.iter().map(|(f, l)| Record::new(f.to_vec(), l.to_vec())).collect();
    let data = Dataset::new(records, 4, 3)?;

    let config = LearnerConfig {
        max_rules: 3,
        pool_size: 50,
        threads: 1,
        ..LearnerConfig::default()
    };
    let model = fit(&data, &config)?;
    for (t, r) in model.trace.iter().zip(&model.rules) {
        println!("{:?} -> {:?}   gain {:.3}", r.head, r.tail, t.gain);
    }
    println!("objective {:.3}", model.objective);
    println!("sunny and warm: {:?}", model.predict(&[0, 1]));
    println!("windy:          {:?}", model.predict(&[2]));
    Ok(())
}
