use serde::Serialize;

use super::{CompartmentSpec, Network, Pair};
use crate::balance::db_residual;
use crate::error::{Error, Result};
use crate::numerics::SteadyState;
use crate::tol::TAU_DB;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum MembershipViolation {
    /// A forbidden pair carries a positive rate in at least one direction.
    ForbiddenRate { pair: Pair, forward: f64, backward: f64 },
    /// A balanced pair misses `A_ij N_j = A_ji N_i` by this relative residual.
    Unbalanced { pair: Pair, residual: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    pub member: bool,
    pub violations: Vec<MembershipViolation>,
}

/// Tests whether `net` belongs to the class given by its annotation.
pub fn check_class_membership(net: &Network, n: &SteadyState) -> Result<MembershipReport> {
    let class = net.class().ok_or(Error::MissingAnnotation)?;
    let gen = net.generator();
    let a = gen.matrix();
    let mut violations = Vec::new();
    for &pair in &class.forbidden {
        let (i, j) = (pair.lo(), pair.hi());
        let (forward, backward) = (a[(j, i)], a[(i, j)]);
        if forward != 0.0 || backward != 0.0 {
            violations.push(MembershipViolation::ForbiddenRate {
                pair,
                forward,
                backward,
            });
        }
    }
    for &pair in &class.balanced {
        let residual = db_residual(a, &n.values, pair.lo(), pair.hi());
        if residual > TAU_DB {
            violations.push(MembershipViolation::Unbalanced { pair, residual });
        }
    }
    Ok(MembershipReport {
        member: violations.is_empty(),
        violations,
    })
}

/// One block condition of the source/sink structure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompartmentCondition {
    pub name: &'static str,
    pub passed: bool,
    /// A rate `(from, to)` breaking a zero-block condition.
    pub witness: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompartmentReport {
    pub passed: bool,
    pub conditions: Vec<CompartmentCondition>,
}

impl CompartmentReport {
    pub fn failed(&self) -> impl Iterator<Item = &CompartmentCondition> {
        self.conditions.iter().filter(|c| !c.passed)
    }
}

/// Checks the six block conditions on rates between interior, sources and
/// sinks, and that each diagonal block is conservative once its outflow is
/// moved into the loss matrix.
pub fn check_compartments(net: &Network) -> Result<CompartmentReport> {
    let spec: &CompartmentSpec = net.compartments().ok_or(Error::MissingCompartments)?;
    let first_rate = |from: &[usize], to: &[usize]| {
        net.rates()
            .keys()
            .find(|(f, t)| from.contains(f) && to.contains(t))
            .copied()
    };
    let (int, src, snk) = (&spec.interior, &spec.sources, &spec.sinks);
    let nonzero = |name, from: &[usize], to: &[usize]| {
        let hit = first_rate(from, to);
        CompartmentCondition {
            name,
            passed: hit.is_some(),
            witness: None,
        }
    };
    let zero = |name, from: &[usize], to: &[usize]| {
        let hit = first_rate(from, to);
        CompartmentCondition {
            name,
            passed: hit.is_none(),
            witness: hit,
        }
    };
    let mut conditions = vec![
        nonzero("A[interior,sources] != 0", src, int),
        zero("A[sources,interior] = 0", int, src),
        nonzero("A[sinks,interior] != 0", int, snk),
        zero("A[interior,sinks] = 0", snk, int),
        zero("A[sinks,sources] = 0", src, snk),
        zero("A[sources,sinks] = 0", snk, src),
    ];
    let gen = net.generator();
    for (name, block) in [
        ("interior block conservative", int),
        ("source block conservative", src),
        ("sink block conservative", snk),
    ] {
        let e = crate::balance::compartment_block(&gen, block);
        let worst = (0..e.dim())
            .map(|c| e.column(c).iter().sum::<f64>().abs())
            .fold(0.0, f64::max);
        conditions.push(CompartmentCondition {
            name,
            passed: worst <= crate::tol::TAU_MARKOV,
            witness: None,
        });
    }
    Ok(CompartmentReport {
        passed: conditions.iter().all(|c| c.passed),
        conditions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::Rate;

    fn chain() -> Network {
        // interior {0,1}, source 2, sink 3
        let mut net = Network::numbered(4).unwrap();
        for (f, t) in [(2, 0), (0, 1), (1, 0), (1, 3)] {
            net.set_rate(f, t, Rate::integer(1)).unwrap();
        }
        net.set_compartments(CompartmentSpec::new(vec![0, 1], vec![2], vec![3]))
            .unwrap();
        net
    }

    #[test]
    fn minimal_chain_passes() {
        let report = check_compartments(&chain()).unwrap();
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn sink_feeding_interior_fails() {
        let net = chain().with_rate(3, 0, Rate::integer(1)).unwrap();
        let report = check_compartments(&net).unwrap();
        let failed: Vec<_> = report.failed().map(|c| c.name).collect();
        assert_eq!(failed, ["A[interior,sinks] = 0"]);
        assert_eq!(report.conditions[3].witness, Some((3, 0)));
    }

    #[test]
    fn source_to_sink_fails() {
        let net = chain().with_rate(2, 3, Rate::integer(1)).unwrap();
        let report = check_compartments(&net).unwrap();
        assert!(!report.passed);
        assert_eq!(report.failed().next().unwrap().name, "A[sinks,sources] = 0");
    }

    #[test]
    fn missing_spec() {
        let net = Network::numbered(2).unwrap();
        assert!(matches!(
            check_compartments(&net),
            Err(Error::MissingCompartments)
        ));
    }
}
