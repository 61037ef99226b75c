use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The universal scalar of the crate. `BigRational` keeps itself in lowest
/// terms with a positive denominator, which is exactly the invariant the
/// rest of the code relies on.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_i64(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Canonical "p/q" rendering: lowest terms, no "/1" suffix for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses "p", "p/q" or a plain decimal like "-1.25" into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational".into());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let digits = frac_part.trim();
        if !digits.chars().all(|c| c.is_ascii_digit()) || digits.is_empty() {
            return Err(format!("bad decimal in {s:?}"));
        }
        let negative = int_part.trim_start().starts_with('-');
        let whole: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part
                .parse()
                .map_err(|_| format!("bad integer part in {s:?}"))?
        };
        let scale = BigInt::from(10u32).pow(digits.len() as u32);
        let frac: BigInt = digits.parse().unwrap();
        let frac = if negative { -frac } else { frac };
        return Ok(Rational::new(whole * &scale + frac, scale));
    }
    let n: BigInt = s.parse().map_err(|_| format!("bad rational {s:?}"))?;
    Ok(Rational::from(n))
}

/// Renders an exact rational as a plain decimal with `sig` significant
/// digits, rounding half to even at the cut. The string is an approximation
/// and is always labeled as such by callers; the exact value travels in its
/// own "p/q" field.
pub fn decimal_string(r: &Rational, sig: usize) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let a = r.abs();
    // exponent e with 10^e <= a < 10^(e+1)
    let mut e: i64 = 0;
    let ten = Rational::from(BigInt::from(10));
    let one = Rational::one();
    let mut scaled = a.clone();
    if scaled >= one {
        while scaled >= ten {
            scaled /= &ten;
            e += 1;
        }
    } else {
        while scaled < one {
            scaled *= &ten;
            e -= 1;
        }
    }
    // round a * 10^(sig-1-e) half-to-even to an integer with `sig` digits
    let shift = sig as i64 - 1 - e;
    let scaled = scale_by_pow10(&a, shift);
    let mut digits = round_half_even(&scaled);
    let mut e = e;
    let bound = BigUint::from(10u32).pow(sig as u32);
    if digits >= bound {
        // rounding carried into one extra digit (e.g. 999.96 -> 1000)
        digits /= BigUint::from(10u32);
        e += 1;
    }
    let ds = digits.to_string();
    debug_assert_eq!(ds.len(), sig);
    let ds = ds.trim_end_matches('0');
    let ds = if ds.is_empty() { "0" } else { ds };
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if e >= 0 && (e as usize) < 21 {
        let int_len = e as usize + 1;
        if ds.len() > int_len {
            out.push_str(&ds[..int_len]);
            out.push('.');
            out.push_str(&ds[int_len..]);
        } else {
            out.push_str(ds);
            out.push_str(&"0".repeat(int_len - ds.len()));
        }
    } else if e < 0 && e >= -6 {
        out.push_str("0.");
        out.push_str(&"0".repeat((-e - 1) as usize));
        out.push_str(ds);
    } else {
        // scientific notation for extreme magnitudes
        out.push_str(&ds[..1]);
        if ds.len() > 1 {
            out.push('.');
            out.push_str(&ds[1..]);
        }
        out.push('e');
        out.push_str(&e.to_string());
    }
    out
}

fn scale_by_pow10(a: &Rational, shift: i64) -> Rational {
    let pow = BigInt::from(10u32).pow(shift.unsigned_abs() as u32);
    if shift >= 0 {
        a * Rational::from(pow)
    } else {
        a / Rational::from(pow)
    }
}

/// Nearest integer, ties to even. Input must be nonnegative.
fn round_half_even(a: &Rational) -> BigUint {
    let num = a.numer().magnitude();
    let den = a.denom().magnitude();
    let (q, r) = num_integer::Integer::div_rem(num, den);
    let twice_r = &r * 2u32;
    use std::cmp::Ordering;
    match twice_r.cmp(den) {
        Ordering::Less => q,
        Ordering::Greater => q + 1u32,
        Ordering::Equal => {
            if num_integer::Integer::is_even(&q) {
                q
            } else {
                q + 1u32
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_round_trip() {
        for s in ["0", "1", "-3", "1/648", "-7/3", "22/7"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }

    #[test]
    fn parse_normalizes() {
        assert_eq!(format_rational(&parse_rational("2/4").unwrap()), "1/2");
        assert_eq!(format_rational(&parse_rational("-2/-4").unwrap()), "1/2");
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
        assert_eq!(format_rational(&parse_rational("0.25").unwrap()), "1/4");
        assert_eq!(format_rational(&parse_rational("-1.5").unwrap()), "-3/2");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_string(&rat(1, 2), 20), "0.5");
        assert_eq!(decimal_string(&rat(1, 3), 5), "0.33333");
        assert_eq!(decimal_string(&rat(2, 3), 5), "0.66667");
        assert_eq!(decimal_string(&rat(1, 648), 20), "0.0015432098765432098765");
        assert_eq!(decimal_string(&rat_i64(1), 20), "1");
        assert_eq!(decimal_string(&rat_i64(0), 20), "0");
        assert_eq!(decimal_string(&rat(-9, 10), 3), "-0.9");
    }

    #[test]
    fn decimal_half_even() {
        // 0.125 with 2 significant digits: tie, round to even -> 0.12
        assert_eq!(decimal_string(&rat(1, 8), 2), "0.12");
        // 0.375 -> 0.38
        assert_eq!(decimal_string(&rat(3, 8), 2), "0.38");
        // carry across the digit boundary: 0.9995 with 3 digits -> 1.00
        assert_eq!(decimal_string(&rat(9995, 10000), 3), "1");
    }
}
