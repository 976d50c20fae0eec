//! Prints SCV, the Erlang ratio and the variance split for a few indices.

use pfcme::{decompose, PfCme64};

fn main() {
    println!("{:>6} {:>3} {:>6} {:>12} {:>8} {:>8} {:>8} {:>10}", "m", "r", "n", "scv", "scv*n", "diag1", "diag2", "geo share");
    for m in [10usize, 50, 200, 400, 519, 520, 1000, 2000] {
        let d = PfCme64::new(m).expect("valid index");
        let g = d.diagnostics();
        let dec = decompose(&d);
        let p = d.params();
        println!(
            "{m:>6} {:>3} {:>6} {:>12.4e} {:>8.4} {:>8.3} {:>8.3} {:>10.3}",
            p.r,
            p.order,
            d.scv(),
            g.scv_times_n,
            g.m2_over_logm_scv,
            g.n2_over_log3n_scv,
            dec.geometric_variance() / dec.variance()
        );
    }
}
