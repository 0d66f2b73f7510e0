use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::netmodel::Generator;
use crate::numerics::dense::Dense;

/// Sum of `a_A(w)` over all walks of a given length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkSum {
    pub from: usize,
    pub to: usize,
    pub length: usize,
    #[serde(serialize_with = "ser_rational")]
    pub value: BigRational,
    /// Number of walks with a nonzero weight.
    pub walks: u64,
}

fn ser_rational<S: serde::Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

const MAX_LENGTH: usize = 8;
const MAX_SEQUENCES: f64 = 1e7;

/// Enumerates every walk `from = v_0, v_1, …, v_n = to` whose steps all have
/// a nonzero generator entry (diagonal steps included) and sums the products
/// of those entries. Test oracle for `⟨e_to, Aⁿ e_from⟩`.
pub fn walk_sum_oracle(gen: &Generator, from: usize, to: usize, n: usize) -> Result<WalkSum> {
    gen.check_index(from)?;
    gen.check_index(to)?;
    let dim = gen.dim();
    if n > MAX_LENGTH || (dim as f64).powi(n as i32) > MAX_SEQUENCES {
        return Err(Error::GuardExceeded(format!(
            "length {n} on {dim} states (limits: length {MAX_LENGTH}, {MAX_SEQUENCES:e} sequences)"
        )));
    }
    let a = match gen.exact() {
        Some(a) => a.clone(),
        None => gen.matrix().to_rational(),
    };
    let mut value = BigRational::zero();
    let mut walks = 0;
    extend(&a, from, to, n, BigRational::from_integer(1.into()), &mut value, &mut walks);
    Ok(WalkSum {
        from,
        to,
        length: n,
        value,
        walks,
    })
}

fn extend(
    a: &Dense<BigRational>,
    at: usize,
    to: usize,
    remaining: usize,
    weight: BigRational,
    total: &mut BigRational,
    walks: &mut u64,
) {
    if remaining == 0 {
        if at == to {
            *total += weight;
            *walks += 1;
        }
        return;
    }
    for next in 0..a.dim() {
        let step = &a[(next, at)];
        if !step.is_zero() {
            extend(a, next, to, remaining - 1, &weight * step, total, walks);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::dense::rat;

    #[test]
    fn two_state_length_two() {
        let gen = Generator::from_matrix(Dense::from_rows(&[vec![-1.0, 2.0], vec![1.0, -2.0]]))
            .unwrap();
        let w = walk_sum_oracle(&gen, 0, 1, 2).unwrap();
        assert_eq!(w.value, rat(-3, 1));
        assert_eq!(w.walks, 2);
        let one = walk_sum_oracle(&gen, 0, 1, 1).unwrap();
        assert_eq!(one.value, rat(1, 1));
    }

    #[test]
    fn guard() {
        let gen = Generator::from_matrix(Dense::from_rows(&[vec![-1.0, 2.0], vec![1.0, -2.0]]))
            .unwrap();
        assert!(walk_sum_oracle(&gen, 0, 1, 9).is_err());
    }
}
