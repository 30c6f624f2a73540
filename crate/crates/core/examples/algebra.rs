//! Cayley-Dickson products from complex numbers up to sedenions.

use hypergauss::algebra::{zero_divisor_pair, MAX_LEVEL};
use hypergauss::{CCDNumber, CDNumber};

fn main() {
    let i1 = CDNumber::basis(2, 1);
    let i2 = CDNumber::basis(2, 2);
    println!("quaternions: i1 i2 = {}, i2 i1 = {}", &i1 * &i2, &i2 * &i1);

    let x = CDNumber::from_coeffs(3, vec![1.0, 2.0, 0.0, -1.0, 0.5, 0.0, 3.0, 1.0]).unwrap();
    let y = CDNumber::from_coeffs(3, vec![0.0, 1.0, 1.0, 0.0, -2.0, 1.0, 0.0, 0.5]).unwrap();
    let xy = &x * &y;
    println!("octonions: |xy| = {:.12}, |x||y| = {:.12}", xy.abs(), x.abs() * y.abs());

    match zero_divisor_pair(4) {
        Some((a, b)) => println!("sedenions: ({a}) ({b}) = {}", &a * &b),
        None => println!("sedenions: no zero divisor found"),
    }

    // the central unit I commutes with everything and squares to -1
    let i = CCDNumber::unit_i(MAX_LEVEL.min(3));
    println!("I^2 = {}", &i * &i);
    let z = &CCDNumber::scalar(3, 3.0) + &CCDNumber::unit_i(3).scale(4.0);
    println!("|3 + 4I| = {}, ||3 + 4I|| = {}", z.abs(), z.norm());
}
