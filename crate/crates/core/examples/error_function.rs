// Tail probabilities far below the smallest positive double, and their
// inversion.

use sqprobe::gaussmath::{erf, erfc, erfc_log, inverse_erfc, log_half_erfc};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for x in [0.5, 3.0, 10.0, 27.0, 40.0, 150.0] {
        println!(
            "x = {x:>5}: erf = {:.17}, erfc = {:.6e}, ln erfc = {:.12e}",
            erf(x)?,
            erfc(x)?,
            erfc_log(x)?
        );
    }

    // ½erfc(40) ≈ 10^-697 underflows a double; its logarithm does not.
    let p = log_half_erfc(40.0)?;
    println!("log10 ½erfc(40) = {:.6}", p.log10());

    for q in [1.0, 1e-3, 1e-12, 1e-300] {
        let x = inverse_erfc(q)?;
        println!("erfc⁻¹({q:e}) = {x:.15}  (erfc back: {:.15e})", erfc(x)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
