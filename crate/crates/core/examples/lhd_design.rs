//! Plain versus improved Latin hypercube designs of `50 * d` points.

use ela_select::sampling::{improved_lhd, min_pairwise_distance, plain_lhs, write_design_csv, BoxDomain};

fn main() -> ela_select::Result<()> {
    for d in [2, 5, 10] {
        let domain = BoxDomain::bbob(d);
        let plain = plain_lhs(50 * d, &domain, 7)?;
        let improved = improved_lhd(50 * d, &domain, 7)?;
        println!(
            "d = {d:2}: min distance {:.4} (plain) -> {:.4} (improved)",
            min_pairwise_distance(&plain.points),
            min_pairwise_distance(&improved.points)
        );
    }
    let small = improved_lhd(6, &BoxDomain::bbob(2), 1)?;
    write_design_csv(&small, std::io::stdout())
}
