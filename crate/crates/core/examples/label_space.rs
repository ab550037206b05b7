//! Build the label co-occurrence graph, enumerate probable cliques at a few
//! thresholds and show which cliques each record contains.
//!
//! cargo run --example label_space

use corset::label_space::{build_label_graph, enumerate_probable_cliques, ContainmentIndex, Side, DEFAULT_NODE_BUDGET};
use corset::synth::{generate, GeneratorConfig};

fn main() -> corset::Result<()> {
    let (data, truth) = generate(&GeneratorConfig {
        n_records: 300,
        n_features: 30,
        n_labels: 30,
        seed: 2,
        ..GeneratorConfig::default()
    })?;
    let graph = build_label_graph(&data);
    println!("{} labels, {} directed edges", graph.n_nodes(), graph.n_edges());
    let t = &truth.rules[0].tail;
    println!("planted tail {t:?}: p({} -> {}) = {:.3}", t[0], t[1], graph.weight(t[0], t[1]).unwrap_or(0.0));

    for theta in [0.9, 0.5, 0.3, 0.1] {
        let space = enumerate_probable_cliques(&graph, theta, 5, DEFAULT_NODE_BUDGET)?;
        let multi = space.members().iter().filter(|m| m.len() > 1).count();
        let planted = truth.rules.iter().filter(|r| space.position(&r.tail).is_some()).count();
        println!(
            "theta {theta:<4} {:>5} cliques, {multi:>4} with two or more labels, {planted}/{} planted tails",
            space.len(),
            truth.rules.len()
        );
    }

    let space = enumerate_probable_cliques(&graph, 0.3, 5, DEFAULT_NODE_BUDGET)?;
    let index = ContainmentIndex::build(&data, &space, Side::Labels);
    for i in 0..3 {
        let members: Vec<&[u32]> = index.members_of(i).iter().map(|&m| space.member(m)).collect();
        println!("record {i} labels {:?} contains {members:?}", data.record(i).labels);
    }
    Ok(())
}
