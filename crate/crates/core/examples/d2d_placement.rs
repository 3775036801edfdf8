// Device-to-device variant: nine users, nine files, three files of cache
// each.

use hypercube_ia::placement::place_d2d;

pub fn run_example() -> Result<(), hypercube_ia::Error> {
    let p = place_d2d(9, 9, 3)?;
    println!("{} packets per file on a {}^{} lattice", p.packets_per_file(), p.q, p.t);
    for u in [0, 4, 8] {
        println!(
            "user {u} caches {} packets, hyperplanes {:?}",
            p.user_cache(u).count(),
            p.user_coords(u).len()
        );
    }
    println!(
        "lattice point [0, 1, 2] is cached by users {:?}",
        p.caching_users(&[0, 1, 2])
    );
    Ok(())
}

fn main() {
    run_example().expect("d2d example");
}
