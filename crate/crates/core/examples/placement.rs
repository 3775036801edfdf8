// Hypercube placement for four transmitters and four receivers that each
// store half of a four-file library.

use hypercube_ia::model::{derive_config, partition_dimensions};
use hypercube_ia::placement::{place_hypercube, verify_memory};

pub fn run_example() -> Result<(), hypercube_ia::Error> {
    let cfg = derive_config(4, 4, 4, 2, 2)?;
    let dims = partition_dimensions(&cfg);
    println!("tx dimensions {:?}, rx dimensions {:?}", dims.tx_dims, dims.rx_dims);

    let pm = place_hypercube(&cfg, &dims);
    println!("{} subfiles per file", pm.subfiles_per_file());
    for s in pm.file_subfiles(0).iter().take(4) {
        let (tx, rx) = pm.holders(s);
        println!("  {s} held by Tx {tx:?} and Rx {rx:?}");
    }

    let report = verify_memory(&cfg, &pm)?;
    let show = |loads: &[num_rational::Ratio<u64>]| loads.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ");
    println!("tx loads (files): {}", show(&report.tx_loads));
    println!("rx loads (files): {}", show(&report.rx_loads));
    Ok(())
}

fn main() {
    run_example().expect("placement example");
}
