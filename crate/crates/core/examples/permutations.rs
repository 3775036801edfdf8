// Hypercube permutations of two dimensions with two points each, and the
// circular classes they fall into.

use hypercube_ia::combinatorics::{
    circular_count, enumerate_circular_hcb, enumerate_hypercube_permutations, is_hypercube_permutation, linear_count,
};

pub fn run_example() -> Result<(), hypercube_ia::Error> {
    let (d, t) = (2, 2);
    let linear = enumerate_hypercube_permutations(d, t)?;
    println!("{} linear (formula {})", linear.len(), linear_count(d, t));
    for p in &linear {
        println!("  {:?}", p.seq);
    }
    let circular = enumerate_circular_hcb(d, t)?;
    println!("{} circular (formula {})", circular.len(), circular_count(d, t));
    for c in &circular {
        println!("  ({:?})", c.seq);
    }
    println!(
        "[0, 1, 2, 3] is one: {}",
        is_hypercube_permutation(&[0, 1, 2, 3], d, t, false)?
    );

    for (d, t) in [(2, 3), (3, 2), (4, 2)] {
        println!(
            "D={d} t={t}: {} linear, {} circular",
            linear_count(d, t),
            circular_count(d, t)
        );
    }
    Ok(())
}

fn main() {
    run_example().expect("permutation example");
}
