use rug::Float;

use crate::ComplexValue;

/// √5, ε = (1+√5)/2 and its conjugate ε' = (1−√5)/2 at a given precision.
#[derive(Clone, Debug)]
pub struct QuadraticConstants {
    pub sqrt5: ComplexValue,
    pub eps: ComplexValue,
    pub eps_conj: ComplexValue,
}

impl QuadraticConstants {
    pub fn new(prec: u32) -> Self {
        let s = Float::with_val(prec, 5).sqrt();
        let eps = Float::with_val(prec, 1 + &s) / 2u32;
        let eps_conj = Float::with_val(prec, 1 - &s) / 2u32;
        QuadraticConstants {
            sqrt5: ComplexValue::from_real(s),
            eps: ComplexValue::from_real(eps),
            eps_conj: ComplexValue::from_real(eps_conj),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_relations() {
        for prec in [53, 128, 256] {
            let q = QuadraticConstants::new(prec);
            let tol = (4.0 - prec as f64).exp2();
            let prod = &q.eps * &q.eps_conj;
            assert!(prod.dist(&ComplexValue::from_i64(prec, -1)) < tol);
            let sum = &q.eps + &q.eps_conj;
            assert!(sum.dist(&ComplexValue::one(prec)) < tol);
            let sq = q.sqrt5.square();
            assert!(sq.dist(&ComplexValue::from_i64(prec, 5)) < 8.0 * tol);
        }
    }
}
