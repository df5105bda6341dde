// Mann-Whitney U test: statistic, exact p-value and normal approximation.

use std::error::Error;

use penair::{approx_p, exact_p, mann_whitney_u, midranks};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let control = [212.0, 180.0, 260.0, 199.0, 240.0, 180.0, 225.0];
    let patient = [310.0, 260.0, 420.0, 298.0, 355.0, 276.0];

    let pooled: Vec<f64> = control.iter().chain(&patient).copied().collect();
    println!("midranks: {:?}", midranks(&pooled));

    let u = mann_whitney_u(&control, &patient)?;
    println!("U_control = {}, U_patient = {}, ties {:?}", u.u_a, u.u_b, u.tie_profile);

    let exact = exact_p(&control, &patient, 20)?;
    println!("exact p  = {}/{} = {:.5}", exact.extreme, exact.total, exact.value());
    println!("normal p = {:.5}", approx_p(&u));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("mann_whitney example");
}
