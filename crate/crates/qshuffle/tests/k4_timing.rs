// Temporary phase-timing probe for arity-4 membership cost. Not part of the
// permanent suite; run with --ignored.

use std::time::Instant;

use qshuffle::pbw::f_gen;
use qshuffle::rmatrix::{r_mat, r_tilde, Sign};
use qshuffle::tensor::MatRat;

fn stats(m: &MatRat) -> (usize, usize, usize) {
    let mut maxnum = 0;
    let mut maxden = 0;
    for (_, v) in m.iter() {
        maxnum = maxnum.max(v.numerator().num_terms());
        maxden = maxden.max(v.den_factors().iter().map(|(_, p)| *p as usize).sum());
    }
    (m.num_entries(), maxnum, maxden)
}

#[test]
#[ignore]
fn k4_single_term_timing() {
    let n = 2;
    let f2 = f_gen(n, Sign::Plus, 1, 3, 2);
    eprintln!("[t] f2 stats: {:?}", stats(&f2));
    let total = 4;
    let r = r_mat(n);
    let rt = r_tilde(n, Sign::Plus);
    let asel = vec![1usize, 2];
    let bsel = vec![3usize, 4];
    let t0 = Instant::now();
    let mut term = MatRat::identity(n, total);
    for i in (0..2).rev() {
        for j in 0..2 {
            if asel[i] < bsel[j] {
                let t = Instant::now();
                term = term.compose(&r.embed(&[asel[i], bsel[j]], total));
                eprintln!("[t] R({},{}) {:?} stats={:?}", asel[i], bsel[j], t.elapsed(), stats(&term));
            }
        }
    }
    let t = Instant::now();
    term = term.compose(&f2.embed(&asel, total));
    eprintln!("[t] A embed {:?} stats={:?}", t.elapsed(), stats(&term));
    for i in 0..2 {
        for j in (0..2).rev() {
            let t = Instant::now();
            term = term.compose(&rt.embed(&[asel[i], bsel[j]], total));
            eprintln!("[t] Rt({},{}) {:?} stats={:?}", asel[i], bsel[j], t.elapsed(), stats(&term));
        }
    }
    let t = Instant::now();
    term = term.compose(&f2.embed(&bsel, total));
    eprintln!("[t] B embed {:?} stats={:?}", t.elapsed(), stats(&term));
    eprintln!("[t] one shuffle term total: {:?}", t0.elapsed());
}

#[test]
#[ignore]
fn k4_full_pipeline_timing() {
    use qshuffle::shuffle::shuffle_product;
    use qshuffle::wheel::{iterated_residue, wheel_extract};
    let n = 2;
    let f2 = f_gen(n, Sign::Plus, 1, 3, 2);
    let t = Instant::now();
    let x = shuffle_product(&f2, &f2, Sign::Plus);
    eprintln!("[t] product k=4: {:?} stats={:?}", t.elapsed(), stats(&x));
    for lambda in [vec![2, 1, 1], vec![2, 2], vec![3, 1], vec![4]] {
        let t = Instant::now();
        let r = iterated_residue(&x, &lambda, Sign::Plus);
        eprintln!(
            "[t] residue {:?}: {:?} stats={:?}",
            lambda,
            t.elapsed(),
            r.as_ref().map(stats).ok()
        );
        let t = Instant::now();
        let e = wheel_extract(&x, &lambda, Sign::Plus);
        eprintln!(
            "[t] extract {:?}: {:?} some={:?}",
            lambda,
            t.elapsed(),
            e.as_ref().map(|o| o.is_some())
        );
    }
}
