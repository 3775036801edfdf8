// Cofactor zero-forcing vectors on a random channel.

use hypercube_ia::model::NetworkConfig;
use hypercube_ia::phy::{sample_channel, zf_vector, Complex64};

pub fn run_example() -> Result<(), hypercube_ia::Error> {
    let cfg = NetworkConfig::from_dimensions(2, 3, 4, 3)?;
    let h = sample_channel(&cfg, 5);
    let (tx, zf) = ([0, 3, 4], [2, 7]);
    let alpha = zf_vector(&h, &tx, &zf)?;
    println!("alpha = {alpha:.4?}");

    for j in 0..cfg.k_r() {
        let seen: Complex64 = tx.iter().zip(&alpha).map(|(&i, a)| h.get(j, i) * a).sum();
        let tag = if zf.contains(&j) { "nulled" } else { "" };
        println!("Rx_{j}: |gain| = {:.3e} {tag}", seen.norm());
    }
    Ok(())
}

fn main() {
    run_example().expect("zero-forcing example");
}
