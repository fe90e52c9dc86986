//! Brute-force finite geometry: projective lines over `F_q` and isotropic
//! points of hermitian spaces over `F_{q²}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fibers::flag_poly;
use crate::weyl::{AffineWeyl, Family};

/// `F_{p^k}` with elements encoded as base-`p` digit strings of the
/// coefficients modulo a fixed irreducible polynomial.
#[derive(Clone, Debug)]
pub struct Field {
    pub p: u32,
    pub k: u32,
    order: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
}

fn factor_prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut x = q;
    let mut k = 0;
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    (x == 1).then_some((p, k))
}

fn digits(x: u32, p: u32, k: u32) -> Vec<u32> {
    (0..k).scan(x, |r, _| {
        let d = *r % p;
        *r /= p;
        Some(d)
    })
    .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Remainder of `a` modulo the monic `m`, coefficients mod `p`.
fn poly_rem(mut a: Vec<u32>, m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    while a.len() > dm {
        let c = a.pop().unwrap();
        let shift = a.len() - dm;
        for i in 0..dm {
            a[shift + i] = (a[shift + i] + (p - c) * m[i]) % p;
        }
    }
    a
}

/// Smallest monic irreducible polynomial of degree `k` over `F_p`, low
/// coefficient first.
fn irreducible(p: u32, k: u32) -> Vec<u32> {
    if k == 1 {
        return vec![0, 1];
    }
    for tail in 0..p.pow(k) {
        let mut f = digits(tail, p, k);
        f.push(1);
        let reducible = (1..=k / 2).any(|d| {
            (0..p.pow(d)).any(|t| {
                let mut g = digits(t, p, d);
                g.push(1);
                poly_rem(f.clone(), &g, p).iter().all(|&c| c == 0)
            })
        });
        if !reducible {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    pub fn new(q: u32) -> Result<Field> {
        let (p, k) =
            factor_prime_power(q).ok_or_else(|| Error::Precondition(format!("{q} is not a prime power")))?;
        let m = irreducible(p, k);
        let n = q as usize;
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for a in 0..q {
            let da = digits(a, p, k);
            for b in 0..q {
                let db = digits(b, p, k);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = undigits(&s, p);
                let mut prod = vec![0; 2 * k as usize - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = poly_rem(prod, &m, p);
                r.resize(k as usize, 0);
                mul[(a * q + b) as usize] = undigits(&r, p);
            }
        }
        Ok(Field { p, k, order: q, add, mul })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.order + b) as usize]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.order + b) as usize]
    }

    pub fn neg(&self, a: u32) -> u32 {
        (0..self.order).find(|&b| self.add(a, b) == 0).expect("additive inverse")
    }

    pub fn pow(&self, a: u32, e: u32) -> u32 {
        (0..e).fold(1, |acc, _| self.mul(acc, a))
    }
}

/// Representatives of the points of `P^{n-1}(F)`: first nonzero entry 1.
fn projective_points(f: &Field, n: usize) -> Vec<Vec<u32>> {
    let q = f.order();
    let mut out = Vec::new();
    for lead in 0..n {
        let free = n - lead - 1;
        for t in 0..q.pow(free as u32) {
            let mut v = vec![0; n];
            v[lead] = 1;
            let mut r = t;
            for x in v.iter_mut().skip(lead + 1) {
                *x = r % q;
                r /= q;
            }
            out.push(v);
        }
    }
    out
}

/// Points of the projective line over `F_q`.
pub fn projective_line_points(q: u32) -> Result<u64> {
    if q > 16 {
        return Err(Error::Budget(format!("q = {q} is above the oracle cap of 16")));
    }
    Ok(projective_points(&Field::new(q)?, 2).len() as u64)
}

/// A hermitian form on `F_{q²}^n` relative to `x ↦ x^q`.
#[derive(Clone, Debug)]
pub struct HermitianSpace {
    pub q: u32,
    pub n: usize,
    field: Field,
    gram: Vec<u32>,
}

impl HermitianSpace {
    /// The standard form `Σ x_i y_i^q`.
    pub fn standard(q: u32, n: usize) -> Result<HermitianSpace> {
        let mut gram = vec![0; n * n];
        for i in 0..n {
            gram[i * n + i] = 1;
        }
        HermitianSpace::with_gram(q, n, gram)
    }

    pub fn with_gram(q: u32, n: usize, gram: Vec<u32>) -> Result<HermitianSpace> {
        if !(2..=3).contains(&n) {
            return Err(Error::Precondition("dimension must be 2 or 3".into()));
        }
        if q > 9 {
            return Err(Error::Budget(format!("q = {q} is above the oracle cap of 9")));
        }
        let field = Field::new(q * q)?;
        let space = HermitianSpace { q, n, field, gram };
        let f = &space.field;
        let hermitian = (0..n).all(|i| (0..n).all(|j| space.gram[j * n + i] == space.conj(space.gram[i * n + j])));
        if !hermitian {
            return Err(Error::Precondition("Gram matrix is not hermitian".into()));
        }
        let nondegenerate = projective_points(f, n).iter().all(|v| {
            (0..n).any(|j| {
                let col: Vec<u32> = (0..n).map(|i| if i == j { 1 } else { 0 }).collect();
                space.pairing(v, &col) != 0
            })
        });
        if !nondegenerate {
            return Err(Error::Precondition("form is degenerate".into()));
        }
        Ok(space)
    }

    fn conj(&self, a: u32) -> u32 {
        self.field.pow(a, self.q)
    }

    /// `h(x, y) = x^T G ȳ`.
    pub fn pairing(&self, x: &[u32], y: &[u32]) -> u32 {
        let f = &self.field;
        let n = self.n;
        let mut acc = 0;
        for i in 0..n {
            for j in 0..n {
                let t = f.mul(f.mul(x[i], self.gram[i * n + j]), self.conj(y[j]));
                acc = f.add(acc, t);
            }
        }
        acc
    }

    pub fn isotropic_points(&self) -> Vec<Vec<u32>> {
        projective_points(&self.field, self.n).into_iter().filter(|v| self.pairing(v, v) == 0).collect()
    }

    /// Flags `L ⊂ L^⊥` with `L` an isotropic line, enumerated as pairs of a
    /// point and the plane it spans with an orthogonal point.
    pub fn isotropic_flags(&self) -> u64 {
        let f = &self.field;
        let pts = projective_points(f, self.n);
        let mut count = 0;
        for l in self.isotropic_points() {
            let mut planes: Vec<Vec<Vec<u32>>> = Vec::new();
            for m in pts.iter().filter(|m| **m != l && self.pairing(&l, m) == 0) {
                let mut span: Vec<Vec<u32>> = (0..f.order())
                    .filter_map(|a| {
                        let w: Vec<u32> = (0..self.n).map(|i| f.add(m[i], f.mul(a, l[i]))).collect();
                        normalize(f, &w)
                    })
                    .chain(std::iter::once(l.clone()))
                    .collect();
                span.sort();
                if !planes.contains(&span) {
                    planes.push(span);
                }
            }
            count += planes.len() as u64;
        }
        count
    }
}

fn normalize(f: &Field, v: &[u32]) -> Option<Vec<u32>> {
    let lead = *v.iter().find(|&&x| x != 0)?;
    let inv = (1..f.order()).find(|&b| f.mul(lead, b) == 1)?;
    Some(v.iter().map(|&x| f.mul(x, inv)).collect())
}

pub fn isotropic_lines(q: u32, n: usize) -> Result<u64> {
    Ok(HermitianSpace::standard(q, n)?.isotropic_points().len() as u64)
}

/// The two pairs `(W_J, F)` the oracle can realize geometrically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagPair {
    /// `A1` with trivial `F`: points of `P^1(F_q)`.
    SplitA1,
    /// `A1` with trivial `F`: isotropic lines in hermitian 2-space.
    UnitaryA1,
    /// `A2` with the diagram flip: isotropic flags in hermitian 3-space.
    UnitaryA2,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCheck {
    pub pair: FlagPair,
    pub q: u32,
    pub polynomial: String,
    pub predicted: i64,
    pub counted: u64,
    pub agree: bool,
}

pub fn verify_flag_polynomial(pair: FlagPair, q: u32) -> Result<OracleCheck> {
    let (poly, counted) = match pair {
        FlagPair::SplitA1 => {
            let g = AffineWeyl::single(Family::A, 1)?;
            (flag_poly(&g, 0b10, &[0, 1])?, projective_line_points(q)?)
        }
        FlagPair::UnitaryA1 => {
            let g = AffineWeyl::single(Family::A, 1)?;
            (flag_poly(&g, 0b10, &[0, 1])?, isotropic_lines(q, 2)?)
        }
        FlagPair::UnitaryA2 => {
            let g = AffineWeyl::single(Family::A, 2)?;
            (flag_poly(&g, 0b110, &[0, 2, 1])?, HermitianSpace::standard(q, 3)?.isotropic_flags())
        }
    };
    let predicted = poly.eval(q as i64);
    Ok(OracleCheck { pair, q, polynomial: poly.to_string(), predicted, counted, agree: predicted == counted as i64 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields() {
        for q in [2, 3, 4, 8, 9, 16, 25] {
            let f = Field::new(q).unwrap();
            // every nonzero element is invertible
            for a in 1..q {
                assert!((1..q).any(|b| f.mul(a, b) == 1), "q={q} a={a}");
            }
            assert_eq!((0..q).map(|a| f.pow(a, q)).collect::<Vec<_>>(), (0..q).collect::<Vec<_>>());
        }
        assert!(Field::new(6).is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(isotropic_lines(2, 2).unwrap(), 3);
        assert_eq!(isotropic_lines(3, 2).unwrap(), 4);
        assert_eq!(isotropic_lines(2, 3).unwrap(), 9);
        for (q, n) in [(2, 3), (5, 6), (9, 10)] {
            assert_eq!(projective_line_points(q).unwrap(), n);
        }
        assert!(HermitianSpace::with_gram(2, 2, vec![0, 0, 0, 1]).is_err());
    }

    #[test]
    fn flag_polynomials_match() {
        let c = verify_flag_polynomial(FlagPair::SplitA1, 4).unwrap();
        assert_eq!((c.predicted, c.counted), (5, 5));
        let c = verify_flag_polynomial(FlagPair::UnitaryA1, 7).unwrap();
        assert_eq!((c.predicted, c.counted), (8, 8));
        for (q, n) in [(2, 9), (3, 28)] {
            let c = verify_flag_polynomial(FlagPair::UnitaryA2, q).unwrap();
            assert_eq!((c.predicted, c.counted), (n, n as u64));
        }
    }
}
