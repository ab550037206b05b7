//! Turn a dense numeric table into binary features by per-column
//! percentile thresholds fitted on the training rows only.
//!
//! cargo run --example binarize_csv

use corset::data::{dataset_from_dense, read_dense_csv};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> corset::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let dir = std::env::temp_dir();
    let csv = dir.join("corset-example.csv");
    let mut text = String::new();
    let mut labels = Vec::new();
    for _ in 0..20 {
        let row: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..10.0)).collect();
        // label 0 when the first column is high, 1 when the last is
        let mut l = Vec::new();
        if row[0] > 6.0 {
            l.push(0);
        }
        if row[3] > 6.0 {
            l.push(1);
        }
        labels.push(l);
        text.push_str(&row.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>().join(","));
        text.push('\n');
    }
    std::fs::write(&csv, text)?;

    let rows = read_dense_csv(&csv)?;
    let (data, binarizer) = dataset_from_dense(&rows, labels, Some(2), 70.0, Some(15))?;
    println!("thresholds {:?}", binarizer.thresholds.iter().map(|t| format!("{t:.2}")).collect::<Vec<_>>());
    print!("{}", data.to_sparse_string());
    Ok(())
}
