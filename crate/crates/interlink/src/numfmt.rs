//! Number formatting for report files: shortest round-trip decimal,
//! capped at 9 significant digits so diffs stay byte-stable.

/// Format a float as the shortest decimal that round-trips, truncated to
/// 9 significant digits when the exact value needs more. Magnitudes outside
/// [1e-4, 1e15) use scientific notation to keep cells short.
pub fn fmt_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let abs = v.abs();
    if !(1e-4..1e15).contains(&abs) {
        let sci = format!("{v:.8e}");
        let (mantissa, exponent) = sci.split_once('e').expect("{:e} always has an exponent");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exponent}");
    }
    let shortest = format!("{v}");
    if sig_digits(&shortest) <= 9 {
        return shortest;
    }
    let rounded: f64 = format!("{v:.8e}").parse().expect("9-digit reformat parses");
    format!("{rounded}")
}

fn sig_digits(s: &str) -> usize {
    let mantissa = s.split(['e', 'E']).next().unwrap_or(s);
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let trimmed = digits.trim_start_matches('0');
    trimmed.len()
}
