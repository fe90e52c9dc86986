//! Integer polynomials in one variable `q`.

use std::fmt;

use serde::{Serialize, Serializer};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly(Vec<i64>);

impl Poly {
    pub fn new(mut coeffs: Vec<i64>) -> Poly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn constant(c: i64) -> Poly {
        Poly::new(vec![c])
    }

    pub fn monomial(deg: usize) -> Poly {
        let mut v = vec![0; deg + 1];
        v[deg] = 1;
        Poly(v)
    }

    /// `q + 1`.
    pub fn q_plus_one() -> Poly {
        Poly::new(vec![1, 1])
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.0.get(i).unwrap_or(&0) + o.0.get(i).unwrap_or(&0)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::default();
        }
        let mut v = vec![0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }

    /// Exact quotient, if `o` divides `self` over the integers.
    pub fn div_exact(&self, o: &Poly) -> Option<Poly> {
        let d = o.degree()?;
        let lead = o.0[d];
        let mut rem = self.0.clone();
        if rem.len() < d + 1 {
            return self.is_zero().then(Poly::default);
        }
        let mut quot = vec![0; rem.len() - d];
        for k in (0..quot.len()).rev() {
            let c = rem[k + d];
            if c % lead != 0 {
                return None;
            }
            let f = c / lead;
            quot[k] = f;
            for j in 0..=d {
                rem[k + j] -= f * o.0[j];
            }
        }
        rem.iter().all(|&c| c == 0).then(|| Poly::new(quot))
    }

    pub fn eval(&self, q: i64) -> i64 {
        self.0.iter().rev().fold(0, |acc, &c| acc * q + c)
    }

    /// `p(q^d)`.
    pub fn substitute_power(&self, d: usize) -> Poly {
        let mut v = vec![0; (self.0.len().max(1) - 1) * d + 1];
        for (i, &c) in self.0.iter().enumerate() {
            v[i * d] = c;
        }
        Poly::new(v)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (i, &c) in self.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let var = match i {
                0 => String::new(),
                1 => "q".into(),
                _ => format!("q^{i}"),
            };
            let mag = c.unsigned_abs();
            let coeff = if mag == 1 && i > 0 { String::new() } else { mag.to_string() };
            if out.is_empty() {
                out.push_str(if c < 0 { "-" } else { "" });
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
            }
            out.push_str(&coeff);
            out.push_str(&var);
        }
        write!(f, "{out}")
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = Poly::q_plus_one();
        let sq = a.mul(&a);
        assert_eq!(sq.to_string(), "q^2 + 2q + 1");
        assert_eq!(sq.div_exact(&a), Some(a.clone()));
        assert_eq!(Poly::new(vec![1, 0, 0, 1]).div_exact(&a).unwrap().to_string(), "q^2 - q + 1");
        assert_eq!(Poly::new(vec![1, 0, 1]).div_exact(&a), None);
        assert_eq!(a.substitute_power(2).to_string(), "q^2 + 1");
        assert_eq!(sq.eval(3), 16);
        assert_eq!(Poly::constant(2).mul(&a).to_string(), "2q + 2");
    }
}
