//! Exact feasibility of small rational linear systems by Gaussian elimination
//! followed by Fourier-Motzkin.

use num_rational::Ratio;

pub type Q = Ratio<i128>;

/// A row `a . x (= or <=) b`.
#[derive(Clone, Debug)]
pub struct Row {
    pub a: Vec<Q>,
    pub b: Q,
}

impl Row {
    pub fn new(a: Vec<Q>, b: Q) -> Row {
        Row { a, b }
    }
}

fn zero() -> Q {
    Q::from_integer(0)
}

/// Is there a rational `x` with every equality and inequality satisfied?
pub fn feasible(mut eqs: Vec<Row>, mut ineqs: Vec<Row>, nvars: usize) -> bool {
    // eliminate with equalities
    while let Some(e) = eqs.pop() {
        let Some(p) = (0..nvars).find(|&j| e.a[j] != zero()) else {
            if e.b != zero() {
                return false;
            }
            continue;
        };
        let sub = |r: &mut Row| {
            let f = r.a[p] / e.a[p];
            if f != zero() {
                for j in 0..nvars {
                    r.a[j] -= f * e.a[j];
                }
                r.b -= f * e.b;
            }
        };
        eqs.iter_mut().for_each(sub);
        ineqs.iter_mut().for_each(sub);
    }
    for j in 0..nvars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in ineqs {
            if r.a[j] > zero() {
                pos.push(r);
            } else if r.a[j] < zero() {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        for p in &pos {
            for n in &neg {
                let (fp, fn_) = (p.a[j], -n.a[j]);
                let a = (0..nvars).map(|k| p.a[k] * fn_ + n.a[k] * fp).collect();
                let b = p.b * fn_ + n.b * fp;
                rest.push(normalize(Row::new(a, b)));
            }
        }
        rest.sort_by(|x, y| x.a.cmp(&y.a).then(x.b.cmp(&y.b)));
        rest.dedup_by(|x, y| x.a == y.a && x.b == y.b);
        ineqs = rest;
    }
    ineqs.iter().all(|r| r.b >= zero())
}

fn normalize(mut r: Row) -> Row {
    let m = r
        .a
        .iter()
        .chain(std::iter::once(&r.b))
        .map(|x| if *x < zero() { -*x } else { *x })
        .filter(|x| *x != zero())
        .max();
    if let Some(m) = m {
        for x in r.a.iter_mut() {
            *x /= m;
        }
        r.b /= m;
    }
    r
}
