// Build the delivery schedule for one demand, validate it and write it out
// in the text format the simulator reads back.

use hypercube_ia::model::{partition_dimensions, validate_demand, NetworkConfig};
use hypercube_ia::placement::place_hypercube;
use hypercube_ia::scheduler::{build_schedule, parse_schedule, schedule_stats, validate_schedule, write_schedule};

pub fn run_example() -> Result<(), hypercube_ia::Error> {
    // two transmitter dimensions of 2, two receiver dimensions of 3
    let cfg = NetworkConfig::from_dimensions(2, 2, 3, 2)?;
    let dims = partition_dimensions(&cfg);
    let pm = place_hypercube(&cfg, &dims);
    let demand = validate_demand(&cfg, &[5, 4, 3, 2, 1, 0])?;

    let schedule = build_schedule(&cfg, &dims, &pm, &demand)?;
    let stats = schedule_stats(&schedule);
    let dof = stats.dof.map(|d| d.to_string()).unwrap_or_default();
    println!("{cfg}: H = {}, {} packets, DoF {dof}", stats.h, stats.total_packets);

    let report = validate_schedule(&cfg, &pm, &demand, &schedule);
    println!(
        "validation: {:?} over {} blocks",
        report.violation, report.blocks_checked
    );

    let first = &schedule.blocks[0];
    for e in &first.entries {
        println!(
            "  Rx_{} <- {} (zero-forced at {:?})",
            e.receiver, e.packet, e.zf_targets
        );
    }

    let mut doc = Vec::new();
    write_schedule(&schedule, &mut doc)?;
    let back = parse_schedule(doc.as_slice())?;
    assert_eq!(back, schedule);
    println!("document: {} bytes, round trip ok", doc.len());
    Ok(())
}

fn main() {
    run_example().expect("delivery example");
}
