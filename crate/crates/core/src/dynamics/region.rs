use serde::Serialize;

use super::{DynamicalSystem, StatePoint};
use crate::error::{Error, Result};

/// `T^shift x` lies in the open ball `B(center, radius)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallConstraint {
    pub shift: u64,
    pub center: StatePoint,
    pub radius: f64,
}

/// Finite union of conjunctions of ball constraints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpenRegion {
    clauses: Vec<Vec<BallConstraint>>,
}

impl OpenRegion {
    pub fn whole() -> Self {
        OpenRegion { clauses: vec![Vec::new()] }
    }

    pub fn empty() -> Self {
        OpenRegion { clauses: Vec::new() }
    }

    pub fn ball(center: StatePoint, radius: f64) -> Result<Self> {
        Self::constraint(0, center, radius)
    }

    pub fn constraint(shift: u64, center: StatePoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::invalid("ball radii must be positive"));
        }
        Ok(OpenRegion { clauses: vec![vec![BallConstraint { shift, center, radius }]] })
    }

    pub fn clauses(&self) -> &[Vec<BallConstraint>] {
        &self.clauses
    }

    pub fn constraint_count(&self) -> usize {
        self.clauses.iter().map(Vec::len).sum()
    }

    pub fn is_whole(&self) -> bool {
        self.clauses.iter().any(Vec::is_empty)
    }

    /// `T^{-b} U = {x : T^b x in U}`.
    pub fn preimage(&self, b: u64) -> Self {
        let clauses = self
            .clauses
            .iter()
            .map(|c| c.iter().map(|k| BallConstraint { shift: k.shift + b, ..k.clone() }).collect())
            .collect();
        OpenRegion { clauses }
    }

    pub fn intersect(&self, other: &OpenRegion) -> Self {
        let mut clauses = Vec::with_capacity(self.clauses.len() * other.clauses.len());
        for a in &self.clauses {
            for b in &other.clauses {
                clauses.push(a.iter().chain(b).cloned().collect());
            }
        }
        OpenRegion { clauses }
    }

    pub fn union(&self, other: &OpenRegion) -> Self {
        OpenRegion { clauses: self.clauses.iter().chain(&other.clauses).cloned().collect() }
    }

    pub fn contains(&self, sys: &DynamicalSystem, x: &StatePoint) -> Result<bool> {
        'clause: for clause in &self.clauses {
            for k in clause {
                let y = if k.shift == 0 { x.clone() } else { sys.apply(x, k.shift as i64)? };
                if !sys.within(&y, &k.center, k.radius)? {
                    continue 'clause;
                }
            }
            return Ok(true);
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_examples() {
        let sys = DynamicalSystem::circle_rotation(0.4).unwrap();
        let b = OpenRegion::ball(StatePoint::torus(&[0.0]), 0.25).unwrap();
        assert!(b.contains(&sys, &StatePoint::torus(&[0.1])).unwrap());
        let c = OpenRegion::constraint(1, StatePoint::torus(&[0.5]), 0.01).unwrap();
        assert!(c.contains(&sys, &StatePoint::torus(&[0.1])).unwrap());
        let fail = OpenRegion::ball(StatePoint::torus(&[0.7]), 0.1).unwrap();
        assert!(!c.intersect(&fail).contains(&sys, &StatePoint::torus(&[0.1])).unwrap());
        assert!(c.union(&fail).contains(&sys, &StatePoint::torus(&[0.1])).unwrap());
        assert!(OpenRegion::whole().contains(&sys, &StatePoint::torus(&[0.3])).unwrap());
        assert!(!OpenRegion::empty().contains(&sys, &StatePoint::torus(&[0.3])).unwrap());
        assert!(OpenRegion::ball(StatePoint::torus(&[0.0]), 0.0).is_err());
    }

    #[test]
    fn preimage_shifts_every_constraint() {
        let sys = DynamicalSystem::circle_rotation(0.1).unwrap();
        let u = OpenRegion::ball(StatePoint::torus(&[0.5]), 0.01).unwrap();
        let pre = u.preimage(3);
        assert!(pre.contains(&sys, &StatePoint::torus(&[0.2])).unwrap());
        assert!(!pre.contains(&sys, &StatePoint::torus(&[0.5])).unwrap());
        assert_eq!(pre.clauses()[0][0].shift, 3);
    }
}
