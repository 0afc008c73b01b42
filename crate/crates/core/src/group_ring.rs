//! Finite cyclic groups, their additive actions on the reals, and the group
//! ring over exact rationals.

use std::sync::Arc;

use num::rational::BigRational;
use num::traits::{One, Zero};

use crate::error::{Result, YmtError};

/// The finite cyclic group Z/n, elements `0..n` under addition mod n.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CyclicGroup {
    pub order: usize,
}

impl CyclicGroup {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(YmtError::input("group order must be positive"));
        }
        Ok(CyclicGroup { order })
    }

    pub fn compose(&self, a: usize, b: usize) -> usize {
        (a + b) % self.order
    }

    pub fn inverse(&self, a: usize) -> usize {
        (self.order - a % self.order) % self.order
    }

    pub fn identity(&self) -> usize {
        0
    }
}

/// An action of Z/n on the reals.
///
/// The shipped actions are additive by construction: each element acts by
/// multiplication with a rational unit (+1 or -1, the only finite-order
/// rational multipliers). A custom variant exists so that non-additive data
/// can be fed to the precondition checks.
#[derive(Clone)]
pub enum RealAction {
    /// Element `a` acts by `x -> m[a] * x`, with `m` a homomorphism into
    /// `{+1, -1}`.
    Multiplier { group: CyclicGroup, signs: Vec<i8> },
    /// Arbitrary recorded action, validated on samples before use.
    Custom {
        group: CyclicGroup,
        f: Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>,
    },
}

impl std::fmt::Debug for RealAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RealAction::Multiplier { group, signs } => f
                .debug_struct("Multiplier")
                .field("order", &group.order)
                .field("signs", signs)
                .finish(),
            RealAction::Custom { group, .. } => {
                f.debug_struct("Custom").field("order", &group.order).finish()
            }
        }
    }
}

impl RealAction {
    /// The trivial action of Z/n.
    pub fn trivial(order: usize) -> Result<Self> {
        let group = CyclicGroup::new(order)?;
        Ok(RealAction::Multiplier { group, signs: vec![1; order] })
    }

    /// The sign action of Z/2: the generator acts by `x -> -x`.
    pub fn sign_z2() -> Self {
        RealAction::Multiplier { group: CyclicGroup { order: 2 }, signs: vec![1, -1] }
    }

    /// Z/n acting through multiplication by a rational unit `r` with
    /// `r^n = 1`; that forces `r = +1` or (for even n) `r = -1`.
    pub fn sign_zn(order: usize) -> Result<Self> {
        let group = CyclicGroup::new(order)?;
        if !order.is_multiple_of(2) {
            return Err(YmtError::input(
                "nontrivial rational-unit action needs even order",
            ));
        }
        let signs = (0..order).map(|a| if a % 2 == 0 { 1 } else { -1 }).collect();
        Ok(RealAction::Multiplier { group, signs })
    }

    pub fn group(&self) -> CyclicGroup {
        match self {
            RealAction::Multiplier { group, .. } => *group,
            RealAction::Custom { group, .. } => *group,
        }
    }

    pub fn apply(&self, a: usize, x: f64) -> f64 {
        match self {
            RealAction::Multiplier { group, signs } => f64::from(signs[a % group.order]) * x,
            RealAction::Custom { group, f } => f(a % group.order, x),
        }
    }

    /// Exact rational multiplier for element `a`, when the action is of
    /// multiplier type.
    pub fn multiplier(&self, a: usize) -> Option<BigRational> {
        match self {
            RealAction::Multiplier { group, signs } => {
                Some(BigRational::from_integer(signs[a % group.order].into()))
            }
            RealAction::Custom { .. } => None,
        }
    }

    /// Verify additivity `a * (x + y) = a * x + a * y` on sample values, and
    /// the action laws (identity, composition).
    pub fn verify_additive(&self, samples: &[(f64, f64)]) -> Result<()> {
        let g = self.group();
        for a in 0..g.order {
            for (x, y) in samples {
                let lhs = self.apply(a, x + y);
                let rhs = self.apply(a, *x) + self.apply(a, *y);
                if (lhs - rhs).abs() > 1e-12 * lhs.abs().max(1.0) {
                    return Err(YmtError::precondition(format!(
                        "action of element {a} is not additive: {lhs} vs {rhs}"
                    )));
                }
            }
            for b in 0..g.order {
                for (x, _) in samples {
                    let lhs = self.apply(a, self.apply(b, *x));
                    let rhs = self.apply(g.compose(a, b), *x);
                    if (lhs - rhs).abs() > 1e-12 * lhs.abs().max(1.0) {
                        return Err(YmtError::precondition(format!(
                            "composition law fails at ({a},{b})"
                        )));
                    }
                }
            }
        }
        for (x, _) in samples {
            if (self.apply(g.identity(), *x) - x).abs() > 0.0 {
                return Err(YmtError::precondition("identity element must act trivially"));
            }
        }
        Ok(())
    }
}

/// An element of the group ring R[Z/n] with exact rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupRingElement {
    pub group: CyclicGroup,
    pub coeffs: Vec<BigRational>,
}

impl GroupRingElement {
    pub fn zero(group: CyclicGroup) -> Self {
        GroupRingElement { group, coeffs: vec![BigRational::zero(); group.order] }
    }

    /// The multiplicative unit: the delta at the group identity.
    pub fn unit(group: CyclicGroup) -> Self {
        let mut e = Self::zero(group);
        e.coeffs[0] = BigRational::one();
        e
    }

    /// Delta at a group element with a rational coefficient.
    pub fn delta(group: CyclicGroup, element: usize, coeff: BigRational) -> Self {
        let mut e = Self::zero(group);
        e.coeffs[element % group.order] = coeff;
        e
    }

    pub fn from_i64(group: CyclicGroup, coeffs: &[(usize, i64, i64)]) -> Result<Self> {
        let mut e = Self::zero(group);
        for (g, num, den) in coeffs {
            if *den == 0 {
                return Err(YmtError::input("zero denominator"));
            }
            e.coeffs[g % group.order] += BigRational::new((*num).into(), (*den).into());
        }
        Ok(e)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(YmtError::input("group ring addition across different groups"));
        }
        Ok(GroupRingElement {
            group: self.group,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn neg(&self) -> Self {
        GroupRingElement {
            group: self.group,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        GroupRingElement {
            group: self.group,
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    /// Convolution product over the group.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(YmtError::input("group ring product across different groups"));
        }
        let n = self.group.order;
        let mut out = Self::zero(self.group);
        for a in 0..n {
            if self.coeffs[a].is_zero() {
                continue;
            }
            for b in 0..n {
                if other.coeffs[b].is_zero() {
                    continue;
                }
                let g = self.group.compose(a, b);
                let prod = &self.coeffs[a] * &other.coeffs[b];
                out.coeffs[g] += prod;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sign_action_is_additive_involution() {
        let act = RealAction::sign_z2();
        act.verify_additive(&[(1.5, -2.25), (0.0, 3.0), (1e-9, 7.0)]).unwrap();
        assert_eq!(act.apply(1, act.apply(1, 4.2)), 4.2);
    }

    #[test]
    fn odd_order_sign_action_rejected() {
        assert!(RealAction::sign_zn(3).is_err());
        assert!(RealAction::sign_zn(4).is_ok());
    }

    #[test]
    fn non_additive_custom_action_detected() {
        let act = RealAction::Custom {
            group: CyclicGroup { order: 2 },
            f: Arc::new(|a, x| if a == 0 { x } else { x * x }),
        };
        assert!(act.verify_additive(&[(1.0, 2.0)]).is_err());
    }

    #[test]
    fn ring_axioms_on_z4() {
        let g = CyclicGroup::new(4).unwrap();
        let x = GroupRingElement::from_i64(g, &[(0, 1, 2), (1, -3, 1)]).unwrap();
        let y = GroupRingElement::from_i64(g, &[(2, 2, 3), (3, 1, 5)]).unwrap();
        let z = GroupRingElement::from_i64(g, &[(1, 7, 4)]).unwrap();

        let unit = GroupRingElement::unit(g);
        assert_eq!(x.mul(&unit).unwrap(), x);
        assert_eq!(unit.mul(&x).unwrap(), x);

        // Associativity and distributivity, exactly.
        let lhs = x.mul(&y).unwrap().mul(&z).unwrap();
        let rhs = x.mul(&y.mul(&z).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        let lhs = x.mul(&y.add(&z).unwrap()).unwrap();
        let rhs = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
        assert_eq!(lhs, rhs);

        // Convolution wraps around the cyclic order.
        let a = GroupRingElement::delta(g, 3, q(1, 1));
        let b = GroupRingElement::delta(g, 2, q(1, 1));
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.coeffs[1], q(1, 1));
    }
}
