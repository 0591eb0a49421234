use super::rep::{reduce_angle, GroupElement, SymmetryRep};
use crate::error::{Error, Result};

/// Tolerance on the total mass of an atomic measure.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub element: GroupElement,
    pub weight: f64,
}

/// Finitely many weighted group elements with total mass one.
///
/// Zero-weight atoms are dropped and angles are kept in `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atoms(Vec<Atom>);

impl Atoms {
    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Atom] {
        &self.0
    }
}

/// Probability measure on the symmetry group.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupMeasure {
    Atoms(Atoms),
    /// The normalized Haar measure, averaged exactly.
    Haar,
}

impl GroupMeasure {
    /// Atomic measure from `(element, weight)` pairs.
    pub fn from_atoms(atoms: impl IntoIterator<Item = (GroupElement, f64)>) -> Result<Self> {
        let mut out = Vec::new();
        let mut total = 0.0;
        let mut kind: Option<bool> = None;
        for (element, weight) in atoms {
            if !(weight >= 0.0) || !weight.is_finite() {
                return Err(Error::invalid(
                    "measure weight",
                    format!("{weight} is not a non-negative number"),
                ));
            }
            let is_angle = matches!(element, GroupElement::Angle(_));
            if *kind.get_or_insert(is_angle) != is_angle {
                return Err(Error::invalid("measure atoms", "mixes angles and group indices"));
            }
            let element = match element {
                GroupElement::Angle(t) if !t.is_finite() => {
                    return Err(Error::invalid("measure atoms", "non-finite angle"));
                }
                GroupElement::Angle(t) => GroupElement::Angle(reduce_angle(t)),
                idx => idx,
            };
            total += weight;
            if weight > 0.0 {
                out.push(Atom { element, weight });
            }
        }
        if !((total - 1.0).abs() <= WEIGHT_SUM_TOL) {
            return Err(Error::invalid("measure weights", format!("sum to {total}, expected 1")));
        }
        if out.is_empty() {
            return Err(Error::invalid("measure atoms", "no atom with positive weight"));
        }
        Ok(GroupMeasure::Atoms(Atoms(out)))
    }

    /// Atomic measure on U(1) from angles and weights.
    pub fn u1_atoms(angles: &[f64], weights: &[f64]) -> Result<Self> {
        if angles.len() != weights.len() {
            return Err(Error::invalid(
                "measure atoms",
                format!("{} angles but {} weights", angles.len(), weights.len()),
            ));
        }
        Self::from_atoms(angles.iter().zip(weights).map(|(&t, &w)| (GroupElement::Angle(t), w)))
    }

    /// Uniform mixture of the given elements.
    pub fn uniform(elements: &[GroupElement]) -> Result<Self> {
        let w = 1.0 / elements.len() as f64;
        let mut atoms: Vec<(GroupElement, f64)> = elements.iter().map(|&g| (g, w)).collect();
        // absorb rounding of 1/n into the last atom so the mass is exact to WEIGHT_SUM_TOL
        if let Some(last) = atoms.last_mut() {
            last.1 = 1.0 - w * (elements.len() - 1) as f64;
        }
        Self::from_atoms(atoms)
    }

    pub fn dirac(element: GroupElement) -> Self {
        let element = match element {
            GroupElement::Angle(t) => GroupElement::Angle(reduce_angle(t)),
            idx => idx,
        };
        GroupMeasure::Atoms(Atoms(vec![Atom { element, weight: 1.0 }]))
    }

    /// Dirac measure at the identity of `rep`.
    pub fn identity(rep: &SymmetryRep) -> Self {
        Self::dirac(rep.identity_element())
    }

    /// `(delta_0 + delta_s) / 2` on U(1).
    pub fn two_point(s: f64) -> Self {
        GroupMeasure::Atoms(Atoms(vec![
            Atom {
                element: GroupElement::Angle(0.0),
                weight: 0.5,
            },
            Atom {
                element: GroupElement::Angle(reduce_angle(s)),
                weight: 0.5,
            },
        ]))
    }

    pub fn is_haar(&self) -> bool {
        matches!(self, GroupMeasure::Haar)
    }

    pub fn atoms(&self) -> Option<&Atoms> {
        match self {
            GroupMeasure::Atoms(a) => Some(a),
            GroupMeasure::Haar => None,
        }
    }

    /// Whether all mass sits on the identity of `rep`.
    pub fn is_identity_dirac(&self, rep: &SymmetryRep) -> bool {
        match self {
            GroupMeasure::Haar => false,
            GroupMeasure::Atoms(a) => {
                let mass: f64 = a.iter().filter(|x| rep.is_identity(&x.element)).map(|x| x.weight).sum();
                (mass - 1.0).abs() <= WEIGHT_SUM_TOL
            }
        }
    }

    /// Checks every atom against `rep`.
    pub fn check_for(&self, rep: &SymmetryRep) -> Result<()> {
        if let GroupMeasure::Atoms(a) = self {
            for atom in a.iter() {
                rep.check_element(&atom.element)?;
            }
        }
        Ok(())
    }

    /// Merges atoms that are the same group element, keeping first-seen order.
    pub(crate) fn merged(rep: &SymmetryRep, atoms: Vec<Atom>) -> Self {
        let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            match out.iter_mut().find(|a| rep.same_element(&a.element, &atom.element)) {
                Some(existing) => existing.weight += atom.weight,
                None => out.push(atom),
            }
        }
        GroupMeasure::Atoms(Atoms(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn validates_weights() {
        assert!(GroupMeasure::u1_atoms(&[0.0, PI], &[0.5, 0.4]).is_err());
        assert!(GroupMeasure::u1_atoms(&[0.0, PI], &[1.5, -0.5]).is_err());
        assert!(GroupMeasure::u1_atoms(&[0.0], &[0.5, 0.5]).is_err());
        assert!(
            GroupMeasure::from_atoms(vec![(GroupElement::Angle(0.0), 0.5), (GroupElement::Index(1), 0.5)]).is_err()
        );
        let m = GroupMeasure::u1_atoms(&[0.0, PI, 1.0], &[0.5, 0.5, 0.0]).unwrap();
        assert_eq!(m.atoms().unwrap().len(), 2);
    }

    #[test]
    fn reduces_angles() {
        let m = GroupMeasure::u1_atoms(&[-PI / 2.0, 5.0 * PI], &[0.5, 0.5]).unwrap();
        let a = m.atoms().unwrap().as_slice();
        assert!((a[0].element == GroupElement::Angle(1.5 * PI)));
        match a[1].element {
            GroupElement::Angle(t) => assert!((t - PI).abs() < 1e-12),
            _ => panic!(),
        }
    }

    #[test]
    fn uniform_mass_is_exact() {
        let els: Vec<GroupElement> = (0..7).map(|k| GroupElement::Angle(k as f64)).collect();
        let m = GroupMeasure::uniform(&els).unwrap();
        let total: f64 = m.atoms().unwrap().iter().map(|a| a.weight).sum();
        assert!((total - 1.0).abs() <= WEIGHT_SUM_TOL);
    }

    #[test]
    fn identity_dirac_detection() {
        let rep = SymmetryRep::u1(vec![0, 1]).unwrap();
        assert!(GroupMeasure::identity(&rep).is_identity_dirac(&rep));
        assert!(GroupMeasure::dirac(GroupElement::Angle(2.0 * PI)).is_identity_dirac(&rep));
        assert!(!GroupMeasure::two_point(PI).is_identity_dirac(&rep));
        assert!(!GroupMeasure::Haar.is_identity_dirac(&rep));
    }
}
