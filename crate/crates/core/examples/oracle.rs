// Exact-cover search for the shortest schedule, checked against the
// structured one.

use hypercube_ia::model::{partition_dimensions, DemandVector, NetworkConfig};
use hypercube_ia::placement::place_hypercube;
use hypercube_ia::scheduler::{build_schedule, build_schedule_oracle, ScheduleValidator};

pub fn run_example() -> Result<(), hypercube_ia::Error> {
    for (d_t, t_t, d_r, t_r) in [(2, 2, 2, 2), (2, 1, 3, 1), (1, 2, 3, 1)] {
        let cfg = NetworkConfig::from_dimensions(d_t, t_t, d_r, t_r)?;
        let dims = partition_dimensions(&cfg);
        let pm = place_hypercube(&cfg, &dims);
        let demand = DemandVector::cyclic(&cfg);
        let structured = build_schedule(&cfg, &dims, &pm, &demand)?;
        let oracle = build_schedule_oracle(&cfg, &pm, &demand)?;
        let valid = ScheduleValidator::new(&cfg, &pm, &demand)
            .require_arrangement(false)
            .validate(&oracle)
            .is_pass();
        println!(
            "{cfg}: structured H = {}, exact cover H = {}, oracle schedule valid: {valid}",
            structured.h(),
            oracle.h()
        );
    }
    Ok(())
}

fn main() {
    run_example().expect("oracle example");
}
