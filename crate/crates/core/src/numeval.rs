//! Floating evaluation of exact polynomials.

use hilbk3_exact::SparsePoly;
use hilbk3_numkernel::ComplexValue;

/// Evaluates `p` at a complex point, caching the powers of each coordinate.
pub fn eval_complex(p: &SparsePoly, point: &[ComplexValue]) -> ComplexValue {
    assert_eq!(point.len(), p.nvars(), "point has the wrong dimension");
    let prec = point.first().map_or(128, |x| x.prec());
    let mut powers: Vec<Vec<ComplexValue>> = point.iter().map(|x| vec![ComplexValue::one(prec), x.clone()]).collect();
    let mut acc = ComplexValue::zero(prec);
    for (m, c) in p.terms() {
        let mut t = ComplexValue::from_rational(prec, c);
        for (i, &e) in m.0.iter().enumerate() {
            let e = e as usize;
            while powers[i].len() <= e {
                let next = powers[i].last().unwrap() * &point[i];
                powers[i].push(next);
            }
            if e > 0 {
                t *= &powers[i][e];
            }
        }
        acc += t;
    }
    acc
}
