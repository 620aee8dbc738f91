use num_bigint::BigInt;
use num_integer::Integer;
use pretzel_pi1::freegroup::{palindrome_rotation, CyclicWord, Generator, Letter, Word};
use pretzel_pi1::presentation::smith_normal_form;
use proptest::prelude::*;

fn word_strategy(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0usize..3, any::<bool>()), 0..max).prop_map(|ls| {
        let gens = ["c", "l", "k"].map(Generator::named);
        Word::from_letters(ls.into_iter().map(|(g, pos)| Letter::new(gens[g].clone(), if pos { 1 } else { -1 })))
    })
}

proptest! {
    #[test]
    fn words_are_reduced(w in word_strategy(30)) {
        for pair in w.letters().windows(2) {
            prop_assert!(!(pair[0].gen == pair[1].gen && pair[0].sign() == -pair[1].sign()));
        }
    }

    #[test]
    fn group_laws(u in word_strategy(12), v in word_strategy(12), x in word_strategy(12)) {
        prop_assert!((&u * &u.inverse()).is_empty());
        prop_assert_eq!(u.inverse().inverse(), u.clone());
        prop_assert_eq!((&u * &v).inverse(), &v.inverse() * &u.inverse());
        prop_assert_eq!(&(&u * &v) * &x, &u * &(&v * &x));
    }

    #[test]
    fn exponent_sums_are_additive(u in word_strategy(15), v in word_strategy(15)) {
        for g in ["c", "l", "k"].map(Generator::named) {
            prop_assert_eq!((&u * &v).exponent_sum(&g), u.exponent_sum(&g) + v.exponent_sum(&g));
        }
    }

    #[test]
    fn display_round_trips(w in word_strategy(25)) {
        prop_assert_eq!(Word::parse(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn cyclic_reduction_splits_the_word(w in word_strategy(25)) {
        let (cyc, conj) = w.cyclic_reduce();
        prop_assert!(cyc.representative().is_cyclically_reduced());
        prop_assert_eq!(cyc.representative().conjugate_by(&conj), w);
    }

    #[test]
    fn rotations_are_equal_cyclic_words(w in word_strategy(20), k in 0usize..40) {
        let cyc = CyclicWord::new(&w);
        let rot = cyc.rotate_left(k);
        prop_assert_eq!(CyclicWord::new(&rot), cyc.clone());
        prop_assert_eq!(CyclicWord::new(&rot).canonical(), cyc.canonical());
    }

    #[test]
    fn conjugates_share_a_cyclic_word(w in word_strategy(15), g in word_strategy(6)) {
        prop_assert_eq!(CyclicWord::new(&w.conjugate_by(&g)), CyclicWord::new(&w));
    }

    #[test]
    fn reversal_is_an_involution(w in word_strategy(20)) {
        prop_assert_eq!(w.reversed().reversed(), w.clone());
        prop_assert_eq!(w.reversed().len(), w.len());
    }

    #[test]
    fn rotated_palindromes_are_found(w in word_strategy(10), k in 0usize..30) {
        // u · reverse(u) is a palindrome whenever it is cyclically reduced
        let p = &w * &w.reversed();
        prop_assume!(p.is_cyclically_reduced() && !p.is_empty());
        let cyc = CyclicWord::new(&p.rotate_left(k));
        prop_assert!(palindrome_rotation(&cyc).is_some());
    }
}

/// Fraction-free elimination; exact for the small matrices used here.
fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut prev = 1i128;
    let mut sign = 1;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// `D_k`: gcd of all `k × k` minors.
fn determinantal_divisor(m: &[Vec<i128>], k: usize) -> i128 {
    let mut g = 0i128;
    for rows in subsets(m.len(), k) {
        for cols in subsets(m[0].len(), k) {
            let sub: Vec<Vec<i128>> = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j]).collect()).collect();
            g = g.gcd(&det(&sub));
        }
    }
    g
}

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i128>>> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i128..=9, c), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn smith_form_matches_determinantal_divisors(m in matrix_strategy()) {
        let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let snf = smith_normal_form(&big, m[0].len());
        let d = &snf.diagonal;
        for w in d.windows(2) {
            prop_assert!((&w[1] % &w[0]) == BigInt::from(0));
        }
        let mut prod = BigInt::from(1);
        for k in 1..=m.len().min(m[0].len()) {
            let dk = determinantal_divisor(&m, k);
            if k <= d.len() {
                prod *= &d[k - 1];
                prop_assert_eq!(BigInt::from(dk), prod.clone(), "D_{} of {:?}", k, m);
            } else {
                prop_assert_eq!(dk, 0, "rank of {:?}", m);
            }
        }
    }
}

#[test]
fn divisor_oracle_on_a_known_matrix() {
    let m = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
    assert_eq!(determinantal_divisor(&m, 1), 2);
    assert_eq!(determinantal_divisor(&m, 2), 12);
    assert_eq!(determinantal_divisor(&m, 3).abs(), 144);
}
