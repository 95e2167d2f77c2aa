//! Bounded check that normalizing the Taylor expansion yields the expansion
//! of the Ohana tree.

use ohana::lambda::parse_term;
use ohana::taylor::commutation_check;

fn main() {
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    for src in ["@I", "@D @I", "@Y", "@Ex"] {
        let r = commutation_check(&parse_term(src).unwrap(), 5, 30, 10_000, jobs).unwrap();
        println!(
            "{src:>6}: {} candidates, {} in both, {} in neither, {} undecided, {} mismatches",
            r.checked,
            r.yes,
            r.no,
            r.unknown,
            r.mismatches.len()
        );
    }
}
