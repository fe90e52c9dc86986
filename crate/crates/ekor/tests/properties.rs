use ekor::weyl::iwahori_matsumoto_length;
use ekor::{AffineWeyl, Elem, Family};
use proptest::prelude::*;

const TYPES: [(Family, usize); 6] =
    [(Family::A, 2), (Family::A, 3), (Family::B, 3), (Family::C, 2), (Family::C, 3), (Family::D, 4)];

fn group(t: usize) -> AffineWeyl {
    let (f, r) = TYPES[t];
    AffineWeyl::single(f, r).unwrap()
}

/// A type index, a random word in its simple reflections, and an Omega label.
fn word(max_len: usize) -> impl Strategy<Value = (usize, Vec<u8>, usize)> {
    (0..TYPES.len()).prop_flat_map(move |t| {
        let g = group(t);
        let n = g.node_count() as u8;
        let omegas = g.omega_group().len();
        (Just(t), prop::collection::vec(0..n, 0..=max_len), 0..omegas)
    })
}

fn elem(g: &AffineWeyl, w: &[u8], o: usize) -> Elem {
    g.mul(&g.word_product(w), &g.omega_group()[o])
}

/// Every subword of a reduced word of `b`, multiplied out.
fn subword_products(g: &AffineWeyl, b: &Elem) -> Vec<Elem> {
    let (word, tail) = g.reduced_word(b);
    (0..1u32 << word.len())
        .map(|mask| {
            let sub: Vec<u8> = word.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &s)| s).collect();
            g.mul(&g.word_product(&sub), &tail)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn length_is_subadditive((t, a, o) in word(10), b in prop::collection::vec(0u8..5, 0..10)) {
        let g = group(t);
        let b: Vec<u8> = b.into_iter().filter(|&s| (s as usize) < g.node_count()).collect();
        let x = elem(&g, &a, o);
        let y = g.word_product(&b);
        prop_assert!(g.length(&x) <= a.len() as u32);
        prop_assert!(g.length(&g.mul(&x, &y)) <= g.length(&x) + g.length(&y));
        prop_assert_eq!(g.length(&x), iwahori_matsumoto_length(&g, &x));
    }

    #[test]
    fn inverse_and_words((t, a, o) in word(12)) {
        let g = group(t);
        let x = elem(&g, &a, o);
        let inv = g.inv(&x);
        prop_assert_eq!(g.mul(&x, &inv), g.identity());
        prop_assert_eq!(g.length(&inv), g.length(&x));
        let (w, tail) = g.reduced_word(&x);
        prop_assert_eq!(w.len() as u32, g.length(&x));
        prop_assert_eq!(g.mul(&g.word_product(&w), &tail), x.clone());
        prop_assert_eq!(g.parse(&g.format(&x)).unwrap(), x);
    }

    #[test]
    fn bruhat_is_a_partial_order((t, a, o) in word(6), c in prop::collection::vec(0u8..5, 0..4)) {
        let g = group(t);
        let b = elem(&g, &a, o);
        let c: Vec<u8> = c.into_iter().filter(|&s| (s as usize) < g.node_count()).collect();
        let above = g.mul(&b, &g.word_product(&c));
        let below = subword_products(&g, &b);
        prop_assert!(g.bruhat_leq(&b, &b));
        for x in &below {
            prop_assert!(g.bruhat_leq(x, &b));
            prop_assert!(g.length(x) <= g.length(&b));
            if g.bruhat_leq(&b, x) {
                prop_assert_eq!(x, &b);
            }
            if g.bruhat_leq(&b, &above) {
                prop_assert!(g.bruhat_leq(x, &above));
            }
        }
    }

    #[test]
    fn bruhat_matches_subwords((t, a, o) in word(7), (_, c, _) in word(7)) {
        let g = group(t);
        let b = elem(&g, &a, o);
        let c: Vec<u8> = c.into_iter().filter(|&s| (s as usize) < g.node_count()).collect();
        let x = elem(&g, &c, o);
        let by_subword = subword_products(&g, &b).contains(&x);
        prop_assert_eq!(g.bruhat_leq(&x, &b), by_subword);
    }
}
