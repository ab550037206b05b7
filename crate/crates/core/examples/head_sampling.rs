//! Sample heads for one tail three ways: exactly by coupling from the past
//! with the tight proposal, the same with the looser proposal, and greedily.
//! The tight proposal coalesces at much shorter horizons.
//!
//! cargo run --release --example head_sampling

use corset::data::{Dataset, Record};
use corset::head_sampler::{
    cftp_sample_pair, discriminativity, Bipartition, GreedyParams, HeadSampler, HeadSpace, PairProposal,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> corset::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // sparse records over 24 features; label 0 follows features 1 and 2
    let records = (0..80)
        .map(|_| {
            let f: Vec<u32> = (0..24).filter(|_| rng.gen_bool(0.2)).collect();
            let hit = f.contains(&1) && f.contains(&2);
            let l = if hit || rng.gen_bool(0.05) { vec![0] } else { vec![] };
            Record::new(f, l)
        })
        .collect();
    let data = Dataset::new(records, 24, 1)?;
    let tail = [0];
    let bip = Bipartition::new(&data, &tail);
    println!("{} positive and {} negative records", bip.positives().len(), bip.negatives().len());

    let runs = 2000;
    for proposal in [PairProposal::tight(&data, &bip, HeadSpace::Full)?, PairProposal::boley(&data, &bip)?] {
        let mut total = 0usize;
        let mut worst = 0usize;
        for _ in 0..runs {
            let out = cftp_sample_pair(&proposal, &mut rng, 1 << 24)?;
            total += out.horizon;
            worst = worst.max(out.horizon);
        }
        println!(
            "{:?} proposal: mean horizon {:.1}, max {worst}",
            proposal.kind(),
            total as f64 / runs as f64
        );
    }

    let sampler = HeadSampler::new(&data, &tail, HeadSpace::Full)?;
    println!("\nexact draws");
    for _ in 0..5 {
        let h = sampler.sample(&mut rng)?;
        println!("  {h:?}  discriminativity {}", discriminativity(&data, &h, &tail));
    }
    println!("greedy draws");
    for _ in 0..5 {
        let h = sampler.greedy(&GreedyParams::default(), &mut rng)?;
        println!("  {h:?}  discriminativity {}", discriminativity(&data, &h, &tail));
    }
    Ok(())
}
