//! CSV and JSON rendering.

use std::fmt::Write as _;

/// `%.15g`-style formatting: 15 significant digits, trailing zeros trimmed,
/// exponent form outside `1e-5 ..= 1e15`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.14e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim(mantissa.to_string()), exp)
    }
}

fn trim(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".into() } else { t.to_string() }
}

pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut out = header.join(",");
        out.push('\n');
        Self { out }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.out, "{}", cells.join(","));
    }

    pub fn finish(self) -> String {
        self.out
    }
}

/// Pretty JSON with a trailing newline.
pub fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(num(std::f64::consts::PI), "3.14159265358979");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(-2.5), "-2.5");
        assert_eq!(num(628.318530717959), "628.318530717959");
        assert_eq!(num(1.5e-12), "1.5e-12");
        assert_eq!(num(2e20), "2e20");
        assert_eq!(num(1e-16 - 1e-16), "0");
        assert_eq!(num(0.000123), "0.000123");
    }
}
