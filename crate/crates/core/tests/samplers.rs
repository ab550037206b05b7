mod common;

use common::{random_dataset, random_nonempty, subset, subsets};
use corset::data::Dataset;
use corset::error::Error;
use corset::head_sampler::{
    cftp_sample_pair, greedy_head, Bipartition, GreedyParams, HeadSpace, PairProposal,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn heads_separating(d: &Dataset, p: u32, n: u32) -> usize {
    let fp = &d.record(p).features;
    let fneg = &d.record(n).features;
    subsets(fp, 2).iter().filter(|h| !subset(h, fneg)).count()
}

#[test]
fn tight_proposal_bounds_target_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut pairs = 0;
    for _ in 0..200 {
        let d = random_dataset(&mut rng, 10, 8, 3, 0.5, 0.5);
        let tail = random_nonempty(&mut rng, 3, 0.5);
        let bip = Bipartition::new(&d, &tail);
        let prop = match PairProposal::tight(&d, &bip, HeadSpace::Full) {
            Ok(p) => p,
            Err(Error::Unlearnable(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        for &p in bip.positives() {
            for &n in bip.negatives() {
                let w = prop.target_weight(p, n);
                assert_eq!(w, heads_separating(&d, p, n) as f64);
                let r = prop.ratio(p, n);
                assert!((0.0..=1.0).contains(&r), "ratio {r}");
                pairs += 1;
            }
        }
    }
    assert!(pairs > 1000);
}

#[test]
fn looser_proposal_ratios_stay_in_unit_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let d = random_dataset(&mut rng, 10, 8, 3, 0.5, 0.5);
        let bip = Bipartition::new(&d, &[0]);
        let Ok(prop) = PairProposal::boley(&d, &bip) else { continue };
        for &p in bip.positives() {
            for &n in bip.negatives() {
                assert!((0.0..=1.0).contains(&prop.ratio(p, n)));
            }
        }
    }
}

#[test]
fn tight_proposal_coalesces_no_later_on_sparse_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let (mut tight, mut loose, mut toys) = (0usize, 0usize, 0);
    while toys < 10 {
        let d = random_dataset(&mut rng, 40, 14, 2, 0.2, 0.3);
        let bip = Bipartition::new(&d, &[0]);
        let (Ok(a), Ok(b)) = (PairProposal::tight(&d, &bip, HeadSpace::Full), PairProposal::boley(&d, &bip)) else {
            continue;
        };
        toys += 1;
        for _ in 0..1000 {
            tight += cftp_sample_pair(&a, &mut rng, 1 << 24).unwrap().horizon;
            loose += cftp_sample_pair(&b, &mut rng, 1 << 24).unwrap().horizon;
        }
    }
    assert!(tight <= loose, "tight {tight} vs loose {loose}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn greedy_head_separates_the_pair(seed in any::<u64>(), gamma in 0.0f64..3.0, epsilon in 0.0f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_dataset(&mut rng, 12, 8, 2, 0.5, 0.5);
        let bip = Bipartition::new(&d, &[0]);
        prop_assume!(!bip.positives().is_empty());
        let dp = bip.positives()[rng.gen_range(0..bip.positives().len())];
        let dn = (!bip.negatives().is_empty()).then(|| bip.negatives()[rng.gen_range(0..bip.negatives().len())]);
        let params = GreedyParams { gamma, epsilon };
        let fp = d.record(dp).features.clone();
        match greedy_head(&d, &bip, dp, dn, &params) {
            Ok(h) => {
                prop_assert!(!h.is_empty());
                prop_assert!(h.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(subset(&h, &fp));
                if let Some(n) = dn {
                    prop_assert!(!subset(&h, &d.record(n).features));
                }
            }
            Err(_) => {
                // nothing to grow from
                let pool_empty = match dn {
                    Some(n) => subset(&fp, &d.record(n).features),
                    None => fp.is_empty(),
                };
                prop_assert!(pool_empty);
            }
        }
    }
}
