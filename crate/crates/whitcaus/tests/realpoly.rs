use num_traits::{One, Zero};
use proptest::prelude::*;
use whitcaus::realpoly::*;

/// Principal subresultant coefficient straight from the Sylvester submatrix
/// (rows: deg q - l shifted copies of p, then deg p - l copies of q).
fn sylvester_psc(p: &RatPoly, q: &RatPoly, l: usize) -> Rat {
    let (pd, qd) = (p.degree().unwrap(), q.degree().unwrap());
    let n = pd + qd - 2 * l;
    if n == 0 {
        return Rat::one();
    }
    let mut m = Vec::new();
    for (poly, copies) in [(p, qd - l), (q, pd - l)] {
        let d = poly.degree().unwrap();
        for shift in 0..copies {
            let mut row = vec![Rat::zero(); pd + qd - l];
            for k in 0..=d {
                row[shift + d - k] = poly.coeff(k);
            }
            row.truncate(n);
            m.push(row);
        }
    }
    // cofactor expansion oracle, fine for n <= 8
    fn cof(m: &[Vec<Rat>], cols: &[usize]) -> Rat {
        if m.is_empty() {
            return Rat::one();
        }
        let mut acc = Rat::zero();
        for (i, &c) in cols.iter().enumerate() {
            if m[0][c].is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = &m[0][c] * cof(&m[1..], &rest);
            if i % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }
    let cols: Vec<usize> = (0..n).collect();
    cof(&m, &cols)
}

/// Sylvester determinant with formal degrees (leading zero coefficients kept).
fn sylvester_formal(p: &RatPoly, q: &RatPoly, dp: usize, dq: usize) -> Rat {
    let n = dp + dq;
    let mut m = Vec::new();
    for (poly, d, copies) in [(p, dp, dq), (q, dq, dp)] {
        for shift in 0..copies {
            let mut row = vec![Rat::zero(); n];
            for k in 0..=d {
                row[shift + d - k] = poly.coeff(k);
            }
            m.push(row);
        }
    }
    let mut d = Rat::one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !m[r][c].is_zero()) else { return Rat::zero() };
        if piv != c {
            m.swap(piv, c);
            d = -d;
        }
        let pv = m[c][c].clone();
        d *= &pv;
        for r in c + 1..n {
            let f = &m[r][c] / &pv;
            for k in c..n {
                let v = &f * &m[c][k];
                m[r][k] -= v;
            }
        }
    }
    d
}

fn poly_strategy(max_deg: usize) -> impl Strategy<Value = RatPoly> {
    proptest::collection::vec(-6i64..=6, 2..=max_deg + 1).prop_filter_map("nonconstant", |mut c| {
        if *c.last().unwrap() == 0 {
            *c.last_mut().unwrap() = 1;
        }
        let p = RatPoly::from_ints(&c);
        (p.degree().unwrap() >= 1).then_some(p)
    })
}

#[test]
fn sturm_on_spec_polys() {
    let e = RatPoly::from_ints(&[1, 12, -21, -56, -3, 30, 10]);
    assert_eq!(sturm_count(&e, &Bound::NegInf, &Bound::PosInf).unwrap(), 6);
    let cube = RatPoly::from_ints(&[-1, 2, 2]).pow(3);
    assert_eq!(sturm_count(&cube, &Bound::NegInf, &Bound::PosInf).unwrap(), 2);
}

#[test]
fn roots_with_multiplicity() {
    let p = RatPoly::from_ints(&[-1, 1]).pow(2) * RatPoly::from_ints(&[3, 1]);
    let r = real_roots(&p).unwrap();
    assert_eq!(r.len(), 2);
    assert!((r[0].value + 3.0).abs() < 1e-12 && r[0].multiplicity == 1);
    assert!((r[1].value - 1.0).abs() < 1e-12 && r[1].multiplicity == 2);

    let cube = RatPoly::from_ints(&[-1, 2, 2]).pow(3);
    let r = real_roots(&cube).unwrap();
    let s3 = 3f64.sqrt();
    assert_eq!(r.len(), 2);
    assert!((r[0].value - (-1.0 - s3) / 2.0).abs() < 1e-12);
    assert!((r[1].value - (-1.0 + s3) / 2.0).abs() < 1e-12);
    assert!(r.iter().all(|x| x.multiplicity == 3));

    let two = RatPoly::from_ints(&[-1, 2, 2]) * RatPoly::from_ints(&[5, -2, 9, 22, 11]);
    let r = real_roots(&two).unwrap();
    assert_eq!(r.len(), 2);
    assert!(r.iter().all(|x| x.multiplicity == 1));
}

#[test]
fn resultant_zero_iff_common_root() {
    let a = RatPoly::from_ints(&[-1, 1]) * RatPoly::from_ints(&[1, 0, 1]);
    let b = RatPoly::from_ints(&[1, 0, 1]) * RatPoly::from_ints(&[5, 1]);
    assert!(resultant(&a, &b).unwrap().is_zero());
    assert_eq!(RatPoly::gcd(&a, &b), RatPoly::from_ints(&[1, 0, 1]));
}

#[test]
fn pspc_of_cubed_quadratic() {
    // (t^2+1)^3 has exactly two distinct complex roots
    let p = RatPoly::from_ints(&[1, 0, 1]).pow(3);
    let dp = p.derivative();
    for l in 0..=3 {
        assert!(subresultant_pspc(&p, &dp, l).unwrap().is_zero(), "l = {l}");
    }
    assert!(!subresultant_pspc(&p, &dp, 4).unwrap().is_zero());
}

proptest! {
    #[test]
    fn resultant_matches_sylvester(p in poly_strategy(5), q in poly_strategy(4)) {
        prop_assert_eq!(resultant(&p, &q).unwrap(), sylvester_psc(&p, &q, 0));
    }

    #[test]
    fn pspc_matches_sylvester(p in poly_strategy(6), q in poly_strategy(5)) {
        let m = p.degree().unwrap().min(q.degree().unwrap());
        for l in 0..=m {
            prop_assert_eq!(subresultant_pspc(&p, &q, l).unwrap(), sylvester_psc(&p, &q, l), "l = {}", l);
        }
    }

    #[test]
    fn formal_degree_resultant(p in poly_strategy(4), q in poly_strategy(3), extra in 0usize..3) {
        let (dp, dq) = (p.degree().unwrap(), q.degree().unwrap() + extra);
        let padded = sylvester_formal(&p, &q, dp, dq);
        prop_assert_eq!(resultant_with_degrees(&p, &q, dp, dq).unwrap(), padded.clone());
        // swapped roles
        let swapped = resultant_with_degrees(&q, &p, dq, dp).unwrap();
        let sg = if (dp * dq) % 2 == 1 { -padded } else { padded };
        prop_assert_eq!(swapped, sg);
    }

    #[test]
    fn pspc0_is_resultant(p in poly_strategy(5), q in poly_strategy(5)) {
        prop_assert_eq!(subresultant_pspc(&p, &q, 0).unwrap(), resultant(&p, &q).unwrap());
    }

    #[test]
    fn multiplicities_match_squarefree_degrees(roots in proptest::collection::vec((-5i64..=5, 1usize..=3), 1..4)) {
        let mut p = RatPoly::one();
        let mut expect = std::collections::BTreeMap::new();
        for &(r, m) in &roots {
            p = &p * &RatPoly::from_ints(&[-r, 1]).pow(m as u32);
            *expect.entry(r).or_insert(0) += m;
        }
        // an irreducible quadratic factor contributes no real roots
        p = &p * &RatPoly::from_ints(&[2, 1, 1]);
        let got = real_roots(&p).unwrap();
        prop_assert_eq!(got.len(), expect.len());
        for (g, (r, m)) in got.iter().zip(expect.iter()) {
            prop_assert!((g.value - *r as f64).abs() < 1e-12);
            prop_assert_eq!(g.multiplicity, *m);
        }
        let total: usize = got.iter().map(|g| g.multiplicity).sum();
        prop_assert_eq!(total, p.degree().unwrap() - 2);
    }

    #[test]
    fn sturm_counts_partition(p in poly_strategy(6), cut in -4i64..=4) {
        let c = Bound::At(rat_int(cut));
        let left = sturm_count(&p, &Bound::NegInf, &c).unwrap();
        let right = sturm_count(&p, &c, &Bound::PosInf).unwrap();
        prop_assert_eq!(left + right, sturm_count(&p, &Bound::NegInf, &Bound::PosInf).unwrap());
        prop_assert_eq!(left + right, real_roots(&p).unwrap().len());
    }
}
