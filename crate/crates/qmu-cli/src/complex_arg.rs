//! Parser for complex literals in `a+bi` form.

use num_complex::Complex64;

/// Parses `a+bi` with optional exponents on either part. Plain reals are
/// accepted with zero imaginary part; a bare `i`, `+i`, or `-i` means a
/// unit imaginary part.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(t)?, 0.0));
    };
    // Split at the last sign that is neither leading nor part of an
    // exponent, so "-1.5e2+0.3e-1i" cuts between the two numbers.
    let bytes = body.as_bytes();
    let mut split = None;
    for j in 1..bytes.len() {
        if (bytes[j] == b'+' || bytes[j] == b'-') && bytes[j - 1] != b'e' && bytes[j - 1] != b'E' {
            split = Some(j);
        }
    }
    let (re_str, im_str) = match split {
        Some(j) => (&body[..j], &body[j..]),
        None => ("", body),
    };
    let re = if re_str.is_empty() { 0.0 } else { parse_real(re_str)? };
    let im = match im_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => parse_real(im_str)?,
    };
    Ok(Complex64::new(re, im))
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("bad number {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("number {s:?} is not finite"));
    }
    Ok(v)
}

/// Parses a comma-separated list of complex literals; an empty or
/// whitespace-only string is the empty list.
pub fn parse_complex_list(s: &str) -> Result<Vec<Complex64>, String> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',').map(parse_complex).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(s: &str) -> Complex64 {
        parse_complex(s).unwrap()
    }

    #[test]
    fn plain_reals() {
        assert_eq!(ok("0.3"), Complex64::new(0.3, 0.0));
        assert_eq!(ok("-2e-3"), Complex64::new(-2e-3, 0.0));
        assert_eq!(ok(" 7 "), Complex64::new(7.0, 0.0));
        assert_eq!(ok("0.3001e0"), Complex64::new(0.3001, 0.0));
    }

    #[test]
    fn full_complex() {
        assert_eq!(ok("1+2i"), Complex64::new(1.0, 2.0));
        assert_eq!(ok("1-2i"), Complex64::new(1.0, -2.0));
        assert_eq!(ok("-1.5e2+0.3e-1i"), Complex64::new(-150.0, 0.03));
        assert_eq!(ok("3+i"), Complex64::new(3.0, 1.0));
        assert_eq!(ok("3-i"), Complex64::new(3.0, -1.0));
    }

    #[test]
    fn pure_imaginary() {
        assert_eq!(ok("2i"), Complex64::new(0.0, 2.0));
        assert_eq!(ok("i"), Complex64::new(0.0, 1.0));
        assert_eq!(ok("-i"), Complex64::new(0.0, -1.0));
        assert_eq!(ok("1e+3i"), Complex64::new(0.0, 1000.0));
        assert_eq!(ok("-2.5e-1i"), Complex64::new(0.0, -0.25));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_complex("").is_err());
        assert!(parse_complex("1+2j").is_err());
        assert!(parse_complex("1+2+3i").is_err());
        assert!(parse_complex("inf").is_err());
        assert!(parse_complex("nan").is_err());
        assert!(parse_complex("1 + 2i").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_complex_list("").unwrap(), vec![]);
        assert_eq!(
            parse_complex_list("0.4, 1.1").unwrap(),
            vec![Complex64::new(0.4, 0.0), Complex64::new(1.1, 0.0)]
        );
        assert!(parse_complex_list("0.4,,1.1").is_err());
    }
}
