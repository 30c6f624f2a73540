//! Left-ordered exponential: closed form against the power series.

use hypergauss::explog::{character, exp_l_closed, exp_l_series, ExpDecomposition};
use hypergauss::CCDNumber;

fn main() {
    let z = &(&CCDNumber::scalar(2, -0.5) + &CCDNumber::basis(2, 1).scale(1.2))
        + &CCDNumber::i_basis(2, 3).scale(0.7);
    let d = ExpDecomposition::of(&z);
    println!("z = {z}");
    println!("u0 = {}, v0 = {}, nu = {}", d.u0, d.v0, d.nu);

    let closed = exp_l_closed(&z);
    let series = exp_l_series(&z, 60);
    println!("closed form: {closed}");
    println!(
        "series ({} terms, tail <= {:e}): difference {:e}",
        series.terms_used,
        series.tail_bound,
        (&closed - &series.value).norm()
    );

    let (t, s) = (0.3, 1.1);
    let gap = &(&character(&z, t) * &character(&z, s)) - &character(&z, t + s);
    println!("character law gap at t = {t}, s = {s}: {:e}", gap.norm());
}
