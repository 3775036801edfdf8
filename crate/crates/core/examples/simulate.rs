// Send every block over a random channel, first noiselessly, then with
// noise, then with cache cancellation switched off.

use hypercube_ia::model::{derive_config, partition_dimensions, validate_demand};
use hypercube_ia::phy::{sample_channel, simulate_schedule, SimOptions};
use hypercube_ia::placement::place_hypercube;
use hypercube_ia::scheduler::build_schedule;

pub fn run_example() -> Result<(), hypercube_ia::Error> {
    let cfg = derive_config(4, 4, 4, 2, 2)?;
    let dims = partition_dimensions(&cfg);
    let pm = place_hypercube(&cfg, &dims);
    let demand = validate_demand(&cfg, &[0, 1, 2, 3])?;
    let schedule = build_schedule(&cfg, &dims, &pm, &demand)?;
    let h = sample_channel(&cfg, 42);

    let clean = simulate_schedule(&cfg, &schedule, &h, &SimOptions::default())?;
    println!("noiseless: {}", clean.verdict_line());

    for noise_power in [0.01, 0.1, 1.0] {
        let opts = SimOptions {
            noise_power,
            trials: 200,
            seed: 7,
            ..SimOptions::default()
        };
        let r = simulate_schedule(&cfg, &schedule, &h, &opts)?;
        println!("noise {noise_power}: mean decode error {:.4}", r.mean_error);
    }

    let payload = SimOptions {
        payload_bytes: Some(16),
        ..SimOptions::default()
    };
    let r = simulate_schedule(&cfg, &schedule, &h, &payload)?;
    println!("payload bits (errors, sent): {:?}", r.bit_errors);

    let ablation = SimOptions {
        cancel_cached: false,
        strict: false,
        ..SimOptions::default()
    };
    let r = simulate_schedule(&cfg, &schedule, &h, &ablation)?;
    println!(
        "without cache cancellation: {} failures, max residual {:.3}",
        r.failures.len(),
        r.max_residual
    );
    Ok(())
}

fn main() {
    run_example().expect("simulation example");
}
