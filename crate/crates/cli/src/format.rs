//! Number formatting for listings and summaries.

/// Energy in MeV: 4 decimals, or 17 significant digits in full-precision mode.
pub fn energy(v: f64, full: bool) -> String {
    if full {
        format!("{v:.16e}")
    } else {
        fix_negative_zero(format!("{v:.4}"))
    }
}

/// Listing coefficient rounded to 3 decimals, ties to even.
pub fn coeff3(v: f64) -> String {
    fix_negative_zero(format!("{v:.3}"))
}

fn fix_negative_zero(s: String) -> String {
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

/// Comma-joined list.
pub fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_round_to_even() {
        assert_eq!(coeff3(0.0625), "0.062");
        assert_eq!(coeff3(0.1875), "0.188");
        assert_eq!(coeff3(-0.3125), "-0.312");
        assert_eq!(coeff3(2.5e-4), "0.000");
    }

    #[test]
    fn no_negative_zero() {
        assert_eq!(coeff3(-1e-5), "0.000");
        assert_eq!(energy(-1e-6, false), "0.0000");
        assert_eq!(energy(-6.53641, false), "-6.5364");
    }

    #[test]
    fn full_precision_has_17_digits() {
        let s = energy(-6.536412345678901, true);
        let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
        assert_eq!(mantissa.len(), 17);
        assert_eq!(s.parse::<f64>().unwrap(), -6.536412345678901);
    }
}
