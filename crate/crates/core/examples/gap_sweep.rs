// How the hypercube scheme's packet count compares with the baseline as the
// network grows.

use hypercube_ia::analytics::{gap_asymptotics, subpacketization_report, sum_dof, sweep_gap, SweepMode, SweepSpec};
use hypercube_ia::model::derive_config;

pub fn run_example() -> Result<(), hypercube_ia::Error> {
    let cfg = derive_config(4, 4, 4, 2, 2)?;
    let r = subpacketization_report(&cfg)?;
    println!(
        "{cfg}: F_hcb = {}, F_nma = {}, G = {}, sum-DoF {}",
        r.f_hcb,
        r.f_nma,
        r.g,
        sum_dof(&cfg)
    );

    let by_t = sweep_gap(&SweepSpec {
        mode: SweepMode::VaryT,
        delta: 1,
        fixed: 2,
        from: 1,
        to: 8,
    });
    for row in &by_t.rows {
        println!("d=2 t={}: log10 G = {:.3}", row.t, row.log10_g.unwrap_or(f64::NAN));
    }

    let by_d = sweep_gap(&SweepSpec {
        mode: SweepMode::VaryD,
        delta: 1,
        fixed: 2,
        from: 2,
        to: 256,
    });
    let last = by_d.rows.last().and_then(|r| r.g).unwrap_or(f64::NAN);
    println!(
        "t=2, d=256: G = {last:.5}, limit {}",
        gap_asymptotics(256, 2, 1).limit_d
    );

    let bounded = sweep_gap(&SweepSpec {
        mode: SweepMode::VaryT,
        delta: 2,
        fixed: 6,
        from: 1,
        to: 5,
    });
    println!("delta=2, d=6: bound first holds at t = {:?}", bounded.bound_threshold());

    let mut csv = Vec::new();
    bounded.write_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}

fn main() {
    run_example().expect("gap example");
}
