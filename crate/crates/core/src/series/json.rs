//! JSON serialization of series.
//!
//! Univariate: `{"variable":"s","truncation":N,"terms":[[exp,"p/q"],...]}`
//! with exponents ascending and coefficients as `"p/q"` decimal strings.
//! Bivariate: `{"variables":["x","s"],"truncation":[Nx,Ns],"terms":[[xe,se,"p/q"],...]}`
//! sorted by `(xe, se)`.
//!
//! The writers emit a canonical byte sequence: no whitespace, fixed key
//! order. Golden files and the CLI compare output byte-for-byte.

use crate::coeff::Coeff;

use super::{BiSeries, GradedSeries};

fn push_coeff<T: Coeff>(out: &mut String, c: &T) {
    out.push('"');
    out.push_str(&format_coeff(c));
    out.push('"');
}

/// Coefficients print as `p/q` with the denominator always present.
pub fn format_coeff<T: Coeff>(c: &T) -> String {
    let s = format!("{c}");
    if s.contains('/') {
        s
    } else {
        format!("{s}/1")
    }
}

impl<T: Coeff> GradedSeries<T> {
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\"variable\":\"s\",\"truncation\":");
        out.push_str(&self.trunc().to_string());
        out.push_str(",\"terms\":[");
        for (i, (e, c)) in self.terms().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('[');
            out.push_str(&e.to_string());
            out.push(',');
            push_coeff(&mut out, c);
            out.push(']');
        }
        out.push_str("]}");
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("exp,coeff\n");
        for (e, c) in self.terms() {
            out.push_str(&format!("{e},{}\n", format_coeff(c)));
        }
        out
    }
}

impl<T: Coeff> BiSeries<T> {
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\"variables\":[\"x\",\"s\"],\"truncation\":[");
        out.push_str(&self.nx().to_string());
        out.push(',');
        out.push_str(&self.ns().to_string());
        out.push_str("],\"terms\":[");
        let mut first = true;
        for (xe, f) in self.x_slices() {
            for (se, c) in f.terms() {
                if !first {
                    out.push(',');
                }
                first = false;
                out.push('[');
                out.push_str(&xe.to_string());
                out.push(',');
                out.push_str(&se.to_string());
                out.push(',');
                push_coeff(&mut out, c);
                out.push(']');
            }
        }
        out.push_str("]}");
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_exp,s_exp,coeff\n");
        for (xe, f) in self.x_slices() {
            for (se, c) in f.terms() {
                out.push_str(&format!("{xe},{se},{}\n", format_coeff(c)));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use crate::coeff::{rat, ratio, Rational};
    use crate::series::{BiSeries, GradedSeries};

    #[test]
    fn univariate_json() {
        let f = GradedSeries::<Rational>::from_terms([(0, rat(1)), (4, ratio(-1, 4))], 8);
        assert_eq!(f.to_json(), r#"{"variable":"s","truncation":8,"terms":[[0,"1/1"],[4,"-1/4"]]}"#);
    }

    #[test]
    fn bivariate_json() {
        let f = BiSeries::<Rational>::monomial(1, -2, ratio(3, 7), 4, 6);
        assert_eq!(
            f.to_json(),
            r#"{"variables":["x","s"],"truncation":[4,6],"terms":[[1,-2,"3/7"]]}"#
        );
    }
}
