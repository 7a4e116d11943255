//! Parameter regions where the sequential attack stays interesting:
//! the sharpness window in which Eve and Bob violate their respective
//! inequalities simultaneously, and the window keeping the forwarded
//! state's optimal CHSH inside the benchmark band.

use diqkd::attack::{
    band_gamma_lower, band_gamma_upper, nonlocality_q_cap, nonlocality_q_closure,
    q_cap_for_target_chsh, sequential_optimal_chsh, simultaneous_nonlocality_window,
    CHSH_BAND_LOWER, CHSH_BAND_UPPER,
};

fn main() -> diqkd::Result<()> {
    let theta = 0.2;
    println!("simultaneous-nonlocality window at theta = {theta}");
    println!("q       gamma_lower  gamma_upper  width");
    for q in [0.50, 0.55, 0.60, 0.65, 0.70] {
        let w = simultaneous_nonlocality_window(theta, q)?;
        let width = (w.upper - w.lower).max(0.0);
        println!(
            "{q:<6.2}  {:<11.6}  {:<11.6}  {}",
            w.lower,
            w.upper,
            if w.is_empty() { "empty".into() } else { format!("{width:.6}") }
        );
    }
    // The necessary bias cap only keeps the upper bound positive; the
    // window actually closes earlier, where the two bounds cross.
    println!(
        "necessary cap 1 - tan(theta/2) = {:.6}; true closure {:.6}",
        nonlocality_q_cap(theta),
        nonlocality_q_closure(theta)?
    );

    println!();
    println!("benchmark band [{CHSH_BAND_LOWER}, {CHSH_BAND_UPPER}]");
    println!("q       gamma(upper target)  gamma(lower target)  check S~*(q, gamma)");
    for q in [0.52, 0.55, 0.60, 0.6464] {
        let g_hi = band_gamma_lower(q);
        let g_lo = band_gamma_upper(q);
        let check = match g_hi {
            Some(g) => format!("{:.6}", sequential_optimal_chsh(q, g)?),
            None => "-".into(),
        };
        println!(
            "{q:<6.4}  {:<19}  {:<19}  {check}",
            g_hi.map_or("unreachable".into(), |g| format!("{g:.6}")),
            g_lo.map_or("unreachable".into(), |g| format!("{g:.6}")),
        );
    }
    println!(
        "bias caps: upper target {:.6}, lower target {:.6}",
        q_cap_for_target_chsh(CHSH_BAND_UPPER)?,
        q_cap_for_target_chsh(CHSH_BAND_LOWER)?
    );
    Ok(())
}
