//! Multi-precision evaluation of the d = 24 quantities, where a term of size
//! `2^23` meets logarithms of size one.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

type F = FBig<HalfEven, 2>;

/// Working precision in bits (about 60 decimal digits).
pub const PRECISION_BITS: usize = 200;

fn ratio(num: u64, den: u64) -> F {
    F::from(num).with_precision(PRECISION_BITS).value()
        / F::from(den).with_precision(PRECISION_BITS).value()
}

fn exact(x: f64) -> F {
    F::try_from(x)
        .expect("finite input")
        .with_precision(PRECISION_BITS)
        .value()
}

/// `(rho/2)(2t)^24 - 1 + 24 ln(1-t) + ln rho` with `rho = rho_num/rho_den`.
/// `t` is taken as its exact binary value.
pub fn leech_gap_precise(t: f64, rho_num: u64, rho_den: u64) -> f64 {
    let rho = ratio(rho_num, rho_den);
    let t = exact(t);
    let one = F::from(1u8).with_precision(PRECISION_BITS).value();
    let two = F::from(2u8).with_precision(PRECISION_BITS).value();
    let birthday = &rho / &two * (&two * &t).powi(24.into());
    let cell = &one - F::from(24u8) * (&one - &t).ln() - rho.ln();
    (birthday - cell).to_f64().value()
}

/// `2^(d-1) alpha - (1 - d ln(1 - (alpha/rho)^(1/d)) - ln rho)` at
/// `alpha = t^d rho`.
pub fn cell_gap_precise(t: f64, d: u32, rho_num: u64, rho_den: u64) -> f64 {
    let rho = ratio(rho_num, rho_den);
    let t = exact(t);
    let one = F::from(1u8).with_precision(PRECISION_BITS).value();
    let alpha = t.powi(d.into()) * &rho;
    let birthday = F::from(2u8).powi((d - 1).into()) * alpha;
    let cell = &one - F::from(d) * (&one - &t).ln() - rho.ln();
    (birthday - cell).to_f64().value()
}
