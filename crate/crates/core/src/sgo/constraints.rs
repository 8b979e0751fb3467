use crate::error::{Error, Result};

/// Groups of dimensions that must share one cut array.
///
/// Every dimension belongs to exactly one group; unconstrained dimensions
/// form singleton groups. All members of a group share the group's part
/// count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSpec {
    groups: Vec<Vec<usize>>,
    parts: Vec<usize>,
}

impl ConstraintSpec {
    /// Validates `groups` against the per-dimension part counts `k`.
    pub fn new(groups: Vec<Vec<usize>>, k: &[usize]) -> Result<Self> {
        let d = k.len();
        let mut seen = vec![false; d];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::Constraint("empty group".into()));
            }
            for &i in g {
                if i >= d {
                    return Err(Error::Constraint(format!("dimension {i} out of range")));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::Constraint(format!("dimension {i} in two groups")));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Constraint(format!("dimension {i} not covered")));
        }
        let mut parts = Vec::with_capacity(groups.len());
        for g in &groups {
            let kk = k[g[0]];
            if kk == 0 {
                return Err(Error::Constraint("part counts must be >= 1".into()));
            }
            if g.iter().any(|&i| k[i] != kk) {
                return Err(Error::Constraint(format!(
                    "grouped dimensions {g:?} have different part counts"
                )));
            }
            parts.push(kk);
        }
        Ok(ConstraintSpec { groups, parts })
    }

    /// One singleton group per dimension.
    pub fn unconstrained(k: &[usize]) -> Result<Self> {
        Self::new((0..k.len()).map(|i| vec![i]).collect(), k)
    }

    /// All dimensions in a single group.
    pub fn all_equal(k: &[usize]) -> Result<Self> {
        Self::new(vec![(0..k.len()).collect()], k)
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Part count of each group.
    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn ndims(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Group containing dimension `dim`.
    pub fn group_of(&self, dim: usize) -> usize {
        self.groups
            .iter()
            .position(|g| g.contains(&dim))
            .expect("dimension covered by construction")
    }

    pub fn is_constrained(&self) -> bool {
        self.groups.iter().any(|g| g.len() > 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ConstraintSpec::new(vec![vec![0, 1]], &[3, 3]).is_ok());
        assert!(ConstraintSpec::new(vec![vec![0, 1]], &[3, 4]).is_err());
        assert!(ConstraintSpec::new(vec![vec![0]], &[3, 3]).is_err());
        assert!(ConstraintSpec::new(vec![vec![0, 1], vec![1]], &[3, 3]).is_err());
        assert!(ConstraintSpec::new(vec![vec![0], vec![2]], &[3, 3]).is_err());
        let c = ConstraintSpec::new(vec![vec![2], vec![0, 1]], &[2, 2, 5]).unwrap();
        assert_eq!(c.parts(), &[5, 2]);
        assert_eq!(c.group_of(1), 1);
        assert!(c.is_constrained());
        assert!(!ConstraintSpec::unconstrained(&[2, 3])
            .unwrap()
            .is_constrained());
    }
}
