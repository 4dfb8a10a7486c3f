//! Finite-difference gradient checks for the built-in oracles, with a
//! deliberately broken oracle as a negative control.

use retro_opt::gradcheck::{random_gradient_check, NegatedGradient};
use retro_opt::oracle::{make_least_squares, make_logistic, make_nonconvex_test, StochasticOracle};

fn main() {
    let oracles: Vec<(&str, Box<dyn StochasticOracle>)> = vec![
        ("least squares", Box::new(make_least_squares(20, 1_000, 1))),
        ("logistic", Box::new(make_logistic(10, 1_000, 2))),
        ("nonconvex", Box::new(make_nonconvex_test(5, 3))),
        ("negated least squares", Box::new(NegatedGradient::new(make_least_squares(20, 1_000, 1)))),
    ];
    for (name, o) in &oracles {
        let r = random_gradient_check(o.as_ref(), 100, 1.0, 0, 1e-5);
        println!(
            "{name:>22}: {} ({} failures of {}, max relative error {:.2e})",
            if r.passed() { "ok" } else { "FAILED" },
            r.failures.len(),
            r.checks,
            r.max_rel_error
        );
    }
}
