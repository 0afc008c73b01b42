//! The scalar-invariance polynomial and its real roots.
//!
//! For a connection split `F(tD) = t dD + t^2 (1/2)D[^]D`, the scalars `t`
//! under which the action transforms linearly are the real roots of
//! `p(t) = a (t^2 - t) + b (2 t^3 - t) + c (t^4 - t)` with
//! `a = <<dD, dD>>`, `b = <<dD, (1/2)D[^]D>>`, `c = <<(1/2)D[^]D, (1/2)D[^]D>>`.
//!
//! Roots are found by factoring out `t` exactly and isolating the roots of
//! the residual polynomial by bisection with exact rational sign evaluation.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Result, YmtError};
use crate::fields::{self, AlgebraCochain1, ConnectionRep};
use crate::theory::{integrated_pairing, YMTTheory};

/// Coefficients of the scalar-invariance polynomial for a fixed connection.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScalarPolynomial {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Real-root result: either every real (identically zero polynomial) or a
/// finite ascending list.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum RootSet {
    AllReals,
    Finite(Vec<f64>),
}

/// Compute the polynomial coefficients of a theory at an algebra-valued
/// connection. Link fields are rejected: the `d`/`[^]` split is only exact in
/// the algebra representation.
pub fn scalar_poly(t: &YMTTheory, d: &ConnectionRep) -> Result<ScalarPolynomial> {
    let d = match d {
        ConnectionRep::Cochain(d) => d,
        ConnectionRep::Links(_) => {
            return Err(YmtError::input(
                "scalar polynomial requires the algebra-valued representation",
            ))
        }
    };
    scalar_poly_cochain(t, d)
}

pub fn scalar_poly_cochain(t: &YMTTheory, d: &AlgebraCochain1) -> Result<ScalarPolynomial> {
    let dd = fields::coboundary(d);
    let cup = fields::cup_bracket(d);
    Ok(ScalarPolynomial {
        a: integrated_pairing(t, &dd, &dd)?,
        b: integrated_pairing(t, &dd, &cup)?,
        c: integrated_pairing(t, &cup, &cup)?,
    })
}

fn big(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coefficient")
}

/// Evaluate `sum coeffs[i] t^i` exactly.
fn eval_exact(coeffs: &[BigRational], t: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

/// Bisect a sign change of `poly` in `[lo, hi]` down to width `width`.
fn bisect(coeffs: &[BigRational], mut lo: BigRational, mut hi: BigRational, width: &BigRational) -> BigRational {
    let mut flo = eval_exact(coeffs, &lo);
    if flo.is_zero() {
        return lo;
    }
    let two = BigRational::from_integer(BigInt::from(2));
    while (&hi - &lo) > *width {
        let mid = (&lo + &hi) / &two;
        let fmid = eval_exact(coeffs, &mid);
        if fmid.is_zero() {
            return mid;
        }
        if (flo.is_negative()) == (fmid.is_negative()) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    (&lo + &hi) / two
}

/// All real roots of the polynomial with the given (ascending-degree)
/// coefficients, via monotone-interval decomposition with exact signs.
fn real_roots_exact(coeffs_f: &[f64], tol: f64) -> Vec<f64> {
    // Trim leading (highest-degree) zeros.
    let mut cf: Vec<f64> = coeffs_f.to_vec();
    while cf.len() > 1 && cf.last() == Some(&0.0) {
        cf.pop();
    }
    let degree = cf.len() - 1;
    if degree == 0 {
        return vec![]; // nonzero constant
    }
    if degree == 1 {
        return vec![-cf[0] / cf[1]];
    }
    let coeffs: Vec<BigRational> = cf.iter().map(|&x| big(x)).collect();

    // Cauchy bound on root magnitude.
    let lead = cf[degree].abs();
    let maxc = cf[..degree].iter().map(|x| x.abs()).fold(0.0, f64::max);
    let bound = 1.0 + maxc / lead;

    // Critical points from the derivative (degree <= 2 here: the residual
    // polynomial after factoring t is at most cubic).
    let mut breakpoints = vec![-bound, bound];
    let dcf: Vec<f64> = (1..=degree).map(|i| cf[i] * i as f64).collect();
    match dcf.len() - 1 {
        0 => {}
        1 => {
            let r = -dcf[0] / dcf[1];
            if r.abs() < bound {
                breakpoints.push(r);
            }
        }
        2 => {
            let (c0, c1, c2) = (dcf[0], dcf[1], dcf[2]);
            let disc = c1 * c1 - 4.0 * c2 * c0;
            if disc >= 0.0 {
                let s = disc.sqrt();
                for r in [(-c1 - s) / (2.0 * c2), (-c1 + s) / (2.0 * c2)] {
                    if r.abs() < bound {
                        breakpoints.push(r);
                    }
                }
            }
        }
        _ => unreachable!("residual polynomial has degree <= 3"),
    }
    breakpoints.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let width = big(tol);
    let mut roots = Vec::new();
    for w in breakpoints.windows(2) {
        let lo = big(w[0]);
        let hi = big(w[1]);
        let flo = eval_exact(&coeffs, &lo);
        let fhi = eval_exact(&coeffs, &hi);
        if flo.is_zero() {
            roots.push(w[0]);
            continue;
        }
        if fhi.is_zero() {
            // right endpoint handled by the next window or appended at the end
            if w[1] == *breakpoints.last().unwrap() {
                roots.push(w[1]);
            }
            continue;
        }
        if flo.is_negative() != fhi.is_negative() {
            let r = bisect(&coeffs, lo, hi, &width);
            roots.push(r.to_f64().unwrap());
        }
    }
    roots
}

/// Real roots of the scalar-invariance polynomial.
///
/// `t` is factored out exactly; the residual `c t^3 + 2b t^2 + a t - (a+b+c)`
/// is isolated by bisection to width 1e-12 with exact sign evaluation. The
/// result is ascending and deduplicated at 1e-10 separation. The identically
/// zero polynomial returns the all-reals sentinel.
pub fn invariance_roots(p: &ScalarPolynomial) -> RootSet {
    if p.a == 0.0 && p.b == 0.0 && p.c == 0.0 {
        return RootSet::AllReals;
    }
    // p(t) = t * r(t), r(t) = c t^3 + 2b t^2 + a t - (a + b + c).
    let residual = [-(p.a + p.b + p.c), p.a, 2.0 * p.b, p.c];
    let mut roots = vec![0.0];
    roots.extend(real_roots_exact(&residual, 1e-12));
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut dedup: Vec<f64> = Vec::new();
    for r in roots {
        if dedup.last().is_none_or(|&last| (r - last).abs() > 1e-10) {
            dedup.push(r);
        }
    }
    RootSet::Finite(dedup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Lattice;
    use crate::lie;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pure_quadratic_gives_zero_and_one() {
        let roots = invariance_roots(&ScalarPolynomial { a: 2.5, b: 0.0, c: 0.0 });
        match roots {
            RootSet::Finite(r) => {
                assert_eq!(r.len(), 2);
                assert!((r[0] - 0.0).abs() < 1e-12 && (r[1] - 1.0).abs() < 1e-12);
            }
            _ => panic!("expected finite roots"),
        }
    }

    #[test]
    fn quartic_only_gives_zero_and_one() {
        // a = 0 = b: p(t) = c(t^4 - t) = c t (t^3 - 1), real roots 0 and 1.
        match invariance_roots(&ScalarPolynomial { a: 0.0, b: 0.0, c: -3.0 }) {
            RootSet::Finite(r) => {
                assert_eq!(r.len(), 2);
                assert!((r[0]).abs() < 1e-12 && (r[1] - 1.0).abs() < 1e-12);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn pure_cubic_gives_reflection_pair() {
        match invariance_roots(&ScalarPolynomial { a: 0.0, b: 1.7, c: 0.0 }) {
            RootSet::Finite(r) => {
                let half_sqrt2 = std::f64::consts::SQRT_2 / 2.0;
                assert_eq!(r.len(), 3);
                assert!((r[0] + half_sqrt2).abs() < 1e-12);
                assert!(r[1].abs() < 1e-12);
                assert!((r[2] - half_sqrt2).abs() < 1e-12);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn unit_coefficients_have_isolated_root() {
        // residual: t^3 + 2 t^2 + t - 3, sign change in (0.8, 0.9).
        match invariance_roots(&ScalarPolynomial { a: 1.0, b: 1.0, c: 1.0 }) {
            RootSet::Finite(r) => {
                assert_eq!(r.len(), 2);
                assert!(r[0].abs() < 1e-12);
                assert!(r[1] > 0.8 && r[1] < 0.9, "root {}", r[1]);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn zero_polynomial_is_all_reals() {
        assert_eq!(
            invariance_roots(&ScalarPolynomial { a: 0.0, b: 0.0, c: 0.0 }),
            RootSet::AllReals
        );
    }

    #[test]
    fn never_more_than_four_roots_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for _ in 0..1000 {
            let p = ScalarPolynomial {
                a: rng.gen_range(-5.0..5.0),
                b: rng.gen_range(-5.0..5.0),
                c: rng.gen_range(-5.0..5.0),
            };
            match invariance_roots(&p) {
                RootSet::Finite(r) => {
                    assert!(r.len() <= 4, "got {} roots for {p:?}", r.len());
                    // Every reported root satisfies p to high accuracy,
                    // relative to the local polynomial scale.
                    for t in &r {
                        let v = p.a * (t * t - t)
                            + p.b * (2.0 * t * t * t - t)
                            + p.c * (t * t * t * t - t);
                        let scale = 1.0 + t.abs().powi(4);
                        assert!(v.abs() < 1e-7 * scale, "residual {v} at {t}");
                    }
                }
                RootSet::AllReals => panic!("random coefficients cannot vanish"),
            }
        }
    }

    #[test]
    fn coefficients_reproduce_scaled_action() {
        let lat = Lattice::new(vec![4, 4]).unwrap();
        let alg = lie::su2();
        let t = YMTTheory::killing(lat.clone(), alg.clone(), "scale");
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = AlgebraCochain1::random(lat.clone(), alg.clone(), &mut rng, 0.8);
        let p = scalar_poly_cochain(&t, &d).unwrap();
        for _ in 0..5 {
            let s: f64 = rng.gen_range(-1.5..1.5);
            let direct = crate::theory::ymt_action(&t, &ConnectionRep::Cochain(d.scale(s))).unwrap();
            let poly = p.a * s * s + 2.0 * p.b * s.powi(3) + p.c * s.powi(4);
            assert!(
                (direct - poly).abs() <= 1e-9 * direct.abs().max(1.0),
                "t={s}: {direct} vs {poly}"
            );
        }
    }

    #[test]
    fn abelian_has_vanishing_cubic_and_quartic() {
        let lat = Lattice::new(vec![4, 4]).unwrap();
        let alg = lie::u1();
        let t = YMTTheory::euclidean(lat.clone(), alg.clone(), "ab");
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = AlgebraCochain1::random(lat.clone(), alg.clone(), &mut rng, 1.0);
        let p = scalar_poly_cochain(&t, &d).unwrap();
        assert_eq!(p.b, 0.0);
        assert_eq!(p.c, 0.0);
        assert!(p.a > 0.0);

        let zero = AlgebraCochain1::zeros(lat.clone(), alg.clone());
        let pz = scalar_poly_cochain(&t, &zero).unwrap();
        assert_eq!((pz.a, pz.b, pz.c), (0.0, 0.0, 0.0));
    }

    #[test]
    fn link_field_input_rejected() {
        let lat = Lattice::new(vec![4, 4]).unwrap();
        let alg = lie::su2();
        let t = YMTTheory::killing(lat.clone(), alg.clone(), "x");
        let u = crate::fields::LinkField::identity(lat, crate::groups::GaugeGroup::su2());
        assert!(scalar_poly(&t, &ConnectionRep::Links(u)).is_err());
    }

    #[test]
    fn killing_semi_nondegeneracy_probe() {
        // <<dD, dD>> with the negative-definite Killing form is nonzero for
        // random nonzero D.
        let lat = Lattice::new(vec![4, 4]).unwrap();
        let alg = lie::su2();
        let t = YMTTheory::killing(lat.clone(), alg.clone(), "probe");
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..10 {
            let d = AlgebraCochain1::random(lat.clone(), alg.clone(), &mut rng, 1.0);
            let p = scalar_poly_cochain(&t, &d).unwrap();
            assert!(p.a < 0.0, "Killing <<dD,dD>> must be negative for dD != 0");
        }
    }
}
