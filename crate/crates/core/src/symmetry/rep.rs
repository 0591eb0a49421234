use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::linalg::{self, c64, CMatrix};

/// Unitarity tolerance for representation matrices.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance on `[U_g, H]` and on products matching the multiplication table.
pub const COMMUTATION_TOL: f64 = 1e-9;
/// Two angles closer than this on the circle are the same group element.
pub const ANGLE_TOL: f64 = 1e-12;

/// Element of the symmetry group: an index into a finite group, or an angle on U(1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupElement {
    Index(usize),
    Angle(f64),
}

/// Reduces an angle to `[0, 2pi)`.
pub fn reduce_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Distance between two angles on the circle.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (reduce_angle(a) - reduce_angle(b)).abs();
    d.min(TAU - d)
}

#[derive(Debug, Clone)]
enum RepKind {
    Finite {
        unitaries: Vec<CMatrix>,
        /// `table[h][g]` is the index of `U_h U_g`.
        table: Vec<Vec<usize>>,
        identity: usize,
    },
    U1 {
        weights: Vec<i64>,
        /// Columns are the basis in which `U_t` is diagonal.
        basis: CMatrix,
        computational: bool,
    },
}

/// Unitary representation of a symmetry group on a finite-dimensional space.
///
/// Either a finite group given by its matrices and multiplication table, or
/// the circle group acting as `U_t = B diag(e^{-i t n_k}) B^dagger` with
/// integer weights `n_k`, which makes the action `2pi`-periodic.
#[derive(Debug, Clone)]
pub struct SymmetryRep {
    kind: RepKind,
}

impl SymmetryRep {
    /// U(1) with integer weights in the computational basis.
    pub fn u1(weights: Vec<i64>) -> Result<Self> {
        let d = weights.len();
        Self::u1_with_basis(weights, linalg::identity(d))
    }

    /// U(1) with integer weights in the basis given by the columns of `basis`.
    pub fn u1_with_basis(weights: Vec<i64>, basis: CMatrix) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("rep weights", "at least one weight required"));
        }
        if basis.nrows() != weights.len() || basis.ncols() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                found: basis.nrows(),
            });
        }
        let res = linalg::unitarity_residual(&basis);
        if !(res <= UNITARY_TOL) {
            return Err(Error::invalid("rep basis", format!("not unitary (residual {res:.3e})")));
        }
        let computational = basis == linalg::identity(weights.len());
        Ok(Self {
            kind: RepKind::U1 {
                weights,
                basis,
                computational,
            },
        })
    }

    /// Finite group from its matrices, multiplication table and identity index.
    ///
    /// The table must satisfy `U_h U_g = U_{table[h][g]}` and describe a group.
    pub fn finite(unitaries: Vec<CMatrix>, table: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let order = unitaries.len();
        if order == 0 {
            return Err(Error::invalid("rep unitaries", "at least one element required"));
        }
        let d = unitaries[0].nrows();
        for (k, u) in unitaries.iter().enumerate() {
            if u.nrows() != d || u.ncols() != d {
                return Err(Error::invalid(
                    "rep unitaries",
                    format!("element {k} is {}x{}, expected {d}x{d}", u.nrows(), u.ncols()),
                ));
            }
            let res = linalg::unitarity_residual(u);
            if !(res <= UNITARY_TOL) {
                return Err(Error::invalid(
                    "rep unitaries",
                    format!("element {k} not unitary (residual {res:.3e})"),
                ));
            }
        }
        validate_table(&table, identity, order)?;
        let id_res = linalg::max_abs(&(&unitaries[identity] - linalg::identity(d)));
        if !(id_res <= UNITARY_TOL) {
            return Err(Error::invalid(
                "rep identity",
                format!("U_identity differs from I by {id_res:.3e}"),
            ));
        }
        for h in 0..order {
            for g in 0..order {
                let prod = &unitaries[h] * &unitaries[g];
                let res = linalg::max_abs(&(prod - &unitaries[table[h][g]]));
                if !(res <= COMMUTATION_TOL) {
                    return Err(Error::invalid(
                        "rep table",
                        format!("U_{h} U_{g} differs from U_{} by {res:.3e}", table[h][g]),
                    ));
                }
            }
        }
        Ok(Self {
            kind: RepKind::Finite {
                unitaries,
                table,
                identity,
            },
        })
    }

    /// Finite group whose table is recovered by matching matrix products.
    pub fn finite_from_unitaries(unitaries: Vec<CMatrix>) -> Result<Self> {
        let order = unitaries.len();
        if order == 0 {
            return Err(Error::invalid("rep unitaries", "at least one element required"));
        }
        let d = unitaries[0].nrows();
        let find = |m: &CMatrix| {
            unitaries
                .iter()
                .position(|u| u.shape() == m.shape() && linalg::max_abs(&(u - m)) <= COMMUTATION_TOL)
        };
        let identity = find(&linalg::identity(d))
            .ok_or_else(|| Error::invalid("rep unitaries", "identity matrix not among the elements"))?;
        let mut table = vec![vec![0; order]; order];
        for h in 0..order {
            for g in 0..order {
                if unitaries[h].ncols() != unitaries[g].nrows() {
                    return Err(Error::invalid("rep unitaries", "elements have different dimensions"));
                }
                table[h][g] = find(&(&unitaries[h] * &unitaries[g]))
                    .ok_or_else(|| Error::invalid("rep unitaries", format!("product of {h} and {g} not closed")))?;
            }
        }
        Self::finite(unitaries, table, identity)
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            RepKind::Finite { unitaries, .. } => unitaries[0].nrows(),
            RepKind::U1 { weights, .. } => weights.len(),
        }
    }

    pub fn is_u1(&self) -> bool {
        matches!(self.kind, RepKind::U1 { .. })
    }

    /// Integer weights of a U(1) representation.
    pub fn weights(&self) -> Option<&[i64]> {
        match &self.kind {
            RepKind::U1 { weights, .. } => Some(weights),
            RepKind::Finite { .. } => None,
        }
    }

    /// Diagonalizing basis of a U(1) representation.
    pub fn basis(&self) -> Option<&CMatrix> {
        match &self.kind {
            RepKind::U1 { basis, .. } => Some(basis),
            RepKind::Finite { .. } => None,
        }
    }

    pub(crate) fn computational_basis(&self) -> bool {
        matches!(
            self.kind,
            RepKind::U1 {
                computational: true,
                ..
            }
        )
    }

    /// Group order of a finite representation.
    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            RepKind::Finite { unitaries, .. } => Some(unitaries.len()),
            RepKind::U1 { .. } => None,
        }
    }

    pub fn unitaries(&self) -> Option<&[CMatrix]> {
        match &self.kind {
            RepKind::Finite { unitaries, .. } => Some(unitaries),
            RepKind::U1 { .. } => None,
        }
    }

    pub fn table(&self) -> Option<&[Vec<usize>]> {
        match &self.kind {
            RepKind::Finite { table, .. } => Some(table),
            RepKind::U1 { .. } => None,
        }
    }

    pub fn identity_element(&self) -> GroupElement {
        match &self.kind {
            RepKind::Finite { identity, .. } => GroupElement::Index(*identity),
            RepKind::U1 { .. } => GroupElement::Angle(0.0),
        }
    }

    /// Checks that `g` is an element of this group and returns it in canonical form.
    pub fn check_element(&self, g: &GroupElement) -> Result<GroupElement> {
        match (&self.kind, g) {
            (RepKind::Finite { unitaries, .. }, GroupElement::Index(k)) => {
                if *k < unitaries.len() {
                    Ok(*g)
                } else {
                    Err(Error::invalid(
                        "group element",
                        format!("index {k} out of range for group of order {}", unitaries.len()),
                    ))
                }
            }
            (RepKind::U1 { .. }, GroupElement::Angle(t)) => {
                if t.is_finite() {
                    Ok(GroupElement::Angle(reduce_angle(*t)))
                } else {
                    Err(Error::invalid("group element", "non-finite angle"))
                }
            }
            (RepKind::Finite { .. }, GroupElement::Angle(_)) => {
                Err(Error::invalid("group element", "angle given for a finite group"))
            }
            (RepKind::U1 { .. }, GroupElement::Index(_)) => {
                Err(Error::invalid("group element", "index given for a U(1) representation"))
            }
        }
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        match (&self.kind, g) {
            (RepKind::Finite { identity, .. }, GroupElement::Index(k)) => k == identity,
            (RepKind::U1 { .. }, GroupElement::Angle(t)) => circle_distance(*t, 0.0) <= ANGLE_TOL,
            _ => false,
        }
    }

    /// Whether two elements are equal (angles within [`ANGLE_TOL`]).
    pub fn same_element(&self, a: &GroupElement, b: &GroupElement) -> bool {
        match (a, b) {
            (GroupElement::Index(x), GroupElement::Index(y)) => x == y,
            (GroupElement::Angle(x), GroupElement::Angle(y)) => circle_distance(*x, *y) <= ANGLE_TOL,
            _ => false,
        }
    }

    /// The product `h ∘ g`, i.e. `U_h U_g`.
    pub fn compose(&self, h: &GroupElement, g: &GroupElement) -> Result<GroupElement> {
        let h = self.check_element(h)?;
        let g = self.check_element(g)?;
        match (&self.kind, h, g) {
            (RepKind::Finite { table, .. }, GroupElement::Index(a), GroupElement::Index(b)) => {
                Ok(GroupElement::Index(table[a][b]))
            }
            (RepKind::U1 { .. }, GroupElement::Angle(a), GroupElement::Angle(b)) => {
                Ok(GroupElement::Angle(reduce_angle(a + b)))
            }
            _ => unreachable!("elements checked above"),
        }
    }

    /// `U_g`.
    pub fn unitary_at(&self, g: &GroupElement) -> Result<CMatrix> {
        let g = self.check_element(g)?;
        match (&self.kind, g) {
            (RepKind::Finite { unitaries, .. }, GroupElement::Index(k)) => Ok(unitaries[k].clone()),
            (
                RepKind::U1 {
                    weights,
                    basis,
                    computational,
                },
                GroupElement::Angle(t),
            ) => {
                let phases: Vec<Complex64> = weights.iter().map(|&n| phase(t, n)).collect();
                let d = weights.len();
                let diag = CMatrix::from_fn(d, d, |i, j| if i == j { phases[i] } else { c64(0.0, 0.0) });
                if *computational {
                    Ok(diag)
                } else {
                    Ok(basis * diag * basis.adjoint())
                }
            }
            _ => unreachable!("elements checked above"),
        }
    }

    /// Hermitian generator `G` with `U_t = exp(-i t G)`, for U(1).
    pub fn generator(&self) -> Option<CMatrix> {
        match &self.kind {
            RepKind::U1 { weights, basis, .. } => {
                let w: Vec<f64> = weights.iter().map(|&n| n as f64).collect();
                Some(basis * linalg::diag_real(&w) * basis.adjoint())
            }
            RepKind::Finite { .. } => None,
        }
    }

    /// Distinct weights with their spectral projections, ascending by weight.
    pub fn weight_projections(&self) -> Option<Vec<(i64, CMatrix)>> {
        let (weights, basis) = match &self.kind {
            RepKind::U1 { weights, basis, .. } => (weights, basis),
            RepKind::Finite { .. } => return None,
        };
        let mut levels: Vec<i64> = weights.clone();
        levels.sort_unstable();
        levels.dedup();
        let d = weights.len();
        Some(
            levels
                .into_iter()
                .map(|w| {
                    let mut p = CMatrix::zeros(d, d);
                    for (k, &n) in weights.iter().enumerate() {
                        if n == w {
                            let v = basis.column(k);
                            p += v * v.adjoint();
                        }
                    }
                    (w, p)
                })
                .collect(),
        )
    }

    /// Elements used to spot-check identities: every element of a finite
    /// group, or the angles `2 pi k / 8` for U(1).
    pub fn sample_elements(&self) -> Vec<GroupElement> {
        match &self.kind {
            RepKind::Finite { unitaries, .. } => (0..unitaries.len()).map(GroupElement::Index).collect(),
            RepKind::U1 { .. } => (0..8).map(|k| GroupElement::Angle(TAU * k as f64 / 8.0)).collect(),
        }
    }

    /// A finite set of elements whose uniform average equals the Haar average
    /// on this representation.
    ///
    /// For U(1) the `N` equally spaced angles with `N` one more than the
    /// largest weight difference suffice, since `sum_k e^{2 pi i k D / N}`
    /// vanishes for `0 < |D| < N`.
    pub fn haar_design(&self) -> Vec<GroupElement> {
        match &self.kind {
            RepKind::Finite { unitaries, .. } => (0..unitaries.len()).map(GroupElement::Index).collect(),
            RepKind::U1 { weights, .. } => {
                let max = weights.iter().max().unwrap();
                let min = weights.iter().min().unwrap();
                let n = (max - min) as usize + 1;
                (0..n).map(|k| GroupElement::Angle(TAU * k as f64 / n as f64)).collect()
            }
        }
    }

    /// Largest `|[U_g, H]|` over the checked elements; for U(1) the generator
    /// is tested directly together with the sample angles.
    pub fn commutation_residual(&self, h: &CMatrix) -> Result<f64> {
        if h.nrows() != self.dim() || h.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: h.nrows(),
            });
        }
        let mut worst = 0.0f64;
        if let Some(gen) = self.generator() {
            worst = worst.max(linalg::max_abs(&linalg::commutator(&gen, h)));
        }
        for g in self.sample_elements() {
            let u = self.unitary_at(&g)?;
            worst = worst.max(linalg::max_abs(&linalg::commutator(&u, h)));
        }
        Ok(worst)
    }

    /// Fails unless every `U_g` commutes with `h` within [`COMMUTATION_TOL`].
    pub fn check_commutes(&self, h: &CMatrix) -> Result<()> {
        let res = self.commutation_residual(h)?;
        if !(res <= COMMUTATION_TOL) {
            return Err(Error::invalid(
                "rep",
                format!("does not commute with the Hamiltonian (residual {res:.3e})"),
            ));
        }
        Ok(())
    }

    /// `I_m ⊗ U_g`: the same group acting trivially on an `m`-level ancilla.
    pub fn extend_trivially(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("ancilla dimension", "must be positive"));
        }
        let im = linalg::identity(m);
        match &self.kind {
            RepKind::Finite {
                unitaries,
                table,
                identity,
            } => Self::finite(
                unitaries.iter().map(|u| linalg::kron(&im, u)).collect(),
                table.clone(),
                *identity,
            ),
            RepKind::U1 { weights, basis, .. } => {
                let w: Vec<i64> = (0..m).flat_map(|_| weights.iter().copied()).collect();
                Self::u1_with_basis(w, linalg::kron(&im, basis))
            }
        }
    }

    /// Diagonal action `U_g ⊗ V_g` of the same group on a product space.
    ///
    /// For U(1) the joint weights are `n_i + m_j`; finite groups must share
    /// the multiplication table.
    pub fn joint(&self, other: &SymmetryRep) -> Result<Self> {
        match (&self.kind, &other.kind) {
            (
                RepKind::U1 {
                    weights: a, basis: ba, ..
                },
                RepKind::U1 {
                    weights: b, basis: bb, ..
                },
            ) => {
                let w: Vec<i64> = a.iter().flat_map(|&x| b.iter().map(move |&y| x + y)).collect();
                Self::u1_with_basis(w, linalg::kron(ba, bb))
            }
            (
                RepKind::Finite {
                    unitaries: ua,
                    table: ta,
                    identity: ia,
                },
                RepKind::Finite {
                    unitaries: ub,
                    table: tb,
                    identity: ib,
                },
            ) => {
                if ta != tb || ia != ib {
                    return Err(Error::invalid("joint rep", "finite groups have different tables"));
                }
                Self::finite(
                    ua.iter().zip(ub).map(|(x, y)| linalg::kron(x, y)).collect(),
                    ta.clone(),
                    *ia,
                )
            }
            _ => Err(Error::invalid("joint rep", "cannot combine a finite group with U(1)")),
        }
    }
}

#[inline]
fn phase(t: f64, n: i64) -> Complex64 {
    // e^{-i t n}; reduce the argument so large weights stay accurate
    let arg = reduce_angle(-t * n as f64);
    Complex64::from_polar(1.0, arg)
}

#[allow(clippy::needless_range_loop)]
fn validate_table(table: &[Vec<usize>], identity: usize, order: usize) -> Result<()> {
    if table.len() != order || table.iter().any(|row| row.len() != order) {
        return Err(Error::invalid("rep table", format!("expected {order}x{order} table")));
    }
    if identity >= order {
        return Err(Error::invalid("rep identity", format!("index {identity} out of range")));
    }
    for (h, row) in table.iter().enumerate() {
        if let Some(&bad) = row.iter().find(|&&x| x >= order) {
            return Err(Error::invalid(
                "rep table",
                format!("entry {bad} in row {h} out of range"),
            ));
        }
    }
    for g in 0..order {
        if table[identity][g] != g || table[g][identity] != g {
            return Err(Error::invalid(
                "rep table",
                format!("identity does not act trivially on {g}"),
            ));
        }
        if !(0..order).any(|h| table[h][g] == identity) {
            return Err(Error::invalid("rep table", format!("element {g} has no inverse")));
        }
    }
    for a in 0..order {
        for b in 0..order {
            for c in 0..order {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(Error::invalid(
                        "rep table",
                        format!("not associative at ({a}, {b}, {c})"),
                    ));
                }
            }
        }
    }
    Ok(())
}
