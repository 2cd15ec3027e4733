//! Structural checks for the shuffle product: associativity, closure of the
//! symmetric subspace, pole discipline, and agreement of the closed-form
//! product of single-slot matrices with the iterated product.

use qshuffle::ring::{zslot, Mono, Rat};
use qshuffle::rmatrix::Sign;
use qshuffle::shuffle::{elementary_product, is_symmetric, shuffle_product, symmetrize};
use qshuffle::tensor::MatRat;

/// Small corpus of single-entry one-slot matrices at n = 2: matrix units,
/// one z-dressed and one with a negative z-power.
fn corpus(n: usize) -> Vec<MatRat> {
    let z = Rat::z(1);
    vec![
        MatRat::unit(n, 1, 1),
        MatRat::unit(n, 1, 2).scale(&z),
        MatRat::unit(n, 2, 1).scale(&z.recip()),
        MatRat::unit(n, 2, 2),
    ]
}

#[test]
fn shuffle_product_is_associative_on_the_corpus() {
    let n = 2;
    let items = corpus(n);
    for sign in [Sign::Plus, Sign::Minus] {
        for a in &items {
            for b in &items {
                let ab = shuffle_product(a, b, sign);
                for c in &items {
                    let bc = shuffle_product(b, c, sign);
                    assert_eq!(
                        shuffle_product(&ab, c, sign),
                        shuffle_product(a, &bc, sign),
                        "associativity fails on corpus entries"
                    );
                }
            }
        }
    }
}

#[test]
fn products_of_symmetric_inputs_are_symmetric() {
    let n = 2;
    let a = MatRat::unit(n, 1, 1);
    let b = MatRat::unit(n, 1, 2);
    let c = MatRat::unit(n, 2, 1).scale(&Rat::z(1));
    for sign in [Sign::Plus, Sign::Minus] {
        let ab = shuffle_product(&a, &b, sign);
        assert!(is_symmetric(&ab));
        let abc = shuffle_product(&ab, &c, sign);
        assert!(is_symmetric(&abc));
    }
}

#[test]
fn products_have_no_pole_on_the_diagonal() {
    // Both crossing factors have denominators proportional to z_j - z_i, but
    // the residues on z_i = z_j cancel between the two splits, so the reduced
    // entries may only retain the deformed factors z_i - z_j qbar^2.
    let n = 2;
    let z2 = Mono::var(zslot(2), 1);
    for sign in [Sign::Plus, Sign::Minus] {
        let x = shuffle_product(&MatRat::unit(n, 1, 2), &MatRat::unit(n, 2, 1), sign);
        for ((_, _), v) in x.iter() {
            for (f, _) in v.den_factors() {
                assert!(
                    !f.subst_var(zslot(1), 1, &z2).is_zero(),
                    "entry denominator vanishes on z_1 = z_2: {}",
                    f
                );
            }
            assert_eq!(v.residue_at(zslot(1), 1, &z2).unwrap(), Rat::zero());
        }
    }
}

#[test]
fn elementary_product_matches_iterated_shuffles() {
    let n = 2;
    let i1 = MatRat::unit(n, 1, 1);
    let i2 = MatRat::unit(n, 1, 2).scale(&Rat::z(1));
    let i3 = MatRat::unit(n, 2, 1);
    for sign in [Sign::Plus, Sign::Minus] {
        assert_eq!(elementary_product(&[i1.clone()], sign), i1);
        assert_eq!(
            elementary_product(&[i1.clone(), i2.clone()], sign),
            shuffle_product(&i1, &i2, sign)
        );
        assert_eq!(
            elementary_product(&[i1.clone(), i2.clone(), i3.clone()], sign),
            shuffle_product(&shuffle_product(&i1, &i2, sign), &i3, sign)
        );
    }
}

#[test]
fn symmetrization_lands_in_the_symmetric_subspace() {
    let n = 2;
    let x = MatRat::unit(n, 1, 1).tensor_product(&MatRat::unit(n, 2, 2));
    let sym = symmetrize(&x);
    assert!(is_symmetric(&sym));
    // On an already symmetric tensor every summand coincides, so Sym
    // multiplies by the group order.
    let y = shuffle_product(&MatRat::unit(n, 1, 1), &MatRat::unit(n, 2, 2), Sign::Plus);
    assert_eq!(symmetrize(&y), y.scale(&Rat::from_int(2)));
}

#[test]
fn degrees_add_under_the_product() {
    let n = 2;
    let a = MatRat::unit(n, 1, 2).scale(&Rat::z(1));
    let b = MatRat::unit(n, 2, 1);
    let da = a.horizontal_degree().unwrap();
    let db = b.horizontal_degree().unwrap();
    for sign in [Sign::Plus, Sign::Minus] {
        let ab = shuffle_product(&a, &b, sign);
        let dab = ab.horizontal_degree().unwrap();
        let expect: Vec<i64> = da.iter().zip(&db).map(|(x, y)| x + y).collect();
        assert_eq!(dab, expect);
        assert_eq!(ab.vertical_degree(), 2);
    }
}
