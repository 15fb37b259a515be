//! The restriction engine: computes, degree by degree, the space of
//! algebraic restrictions of 2-forms to a curve germ, and maps any 2-form
//! to its coordinates in the computed basis.
//!
//! At each quasi-degree the engine spans the graded piece of
//! `A^2_0(N) = { alpha + d beta }` (alpha a 2-form with coefficients in the
//! vanishing ideal, beta likewise a 1-form) inside the full graded piece of
//! 2-forms, and takes the quotient. Representatives are the reduced-echelon
//! complement under the deterministic monomial order; for catalog germs the
//! quotient is re-expressed in the basis the classification tables use.

use crate::forms::{exterior_d, DiffForm};
use crate::germ::CurveGerm;
use crate::linalg::{solve_linear, Mat, Solve};
use crate::poly::{monomials_of_quasi_degree, Monomial, Polynomial};
use crate::{EngineError, Q, Result};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Default truncation quasi-degree. The largest basis degree in the catalog
/// is 19 and the stabilization window needs two weight-spans above it.
pub const DEFAULT_DEGREE_BOUND: i64 = 40;

/// One element of the reported basis of the restriction space.
#[derive(Debug, Clone)]
pub struct BasisElement {
    pub name: String,
    pub form: DiffForm,
    pub delta: i64,
    pub closed: bool,
}

/// A named basis to expose (verified against the computed quotient), as the
/// classification tables list it.
#[derive(Debug, Clone)]
pub struct BasisSpec {
    pub name: String,
    pub form: DiffForm,
    pub closed: bool,
}

/// Coordinates of a 2-form class in the space basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgRestriction {
    pub coords: Vec<Q>,
}

impl AlgRestriction {
    pub fn zero(dim: usize) -> Self {
        AlgRestriction {
            coords: vec![Q::zero(); dim],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &AlgRestriction) -> AlgRestriction {
        AlgRestriction {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> AlgRestriction {
        AlgRestriction {
            coords: self.coords.iter().map(|a| a * c).collect(),
        }
    }
}

/// Per-degree elimination data.
#[derive(Debug)]
struct Piece {
    /// Coordinates of the graded piece: (blade mask, coefficient monomial).
    monos: Vec<(u8, Monomial)>,
    /// Reduced echelon of the A^2_0 generators.
    echelon: Mat,
    pivots: Vec<usize>,
    non_pivots: Vec<usize>,
    /// Indices into the space basis of the elements living at this degree.
    basis_cols: Vec<usize>,
    /// Square matrix whose columns are the reduced basis elements, in
    /// residual (non-pivot) coordinates.
    transform: Mat,
}

/// The computed space of algebraic restrictions of 2-forms to a germ.
#[derive(Debug)]
pub struct RestrictionSpace {
    pub germ: CurveGerm,
    pub bound: i64,
    pub basis: Vec<BasisElement>,
    pieces: BTreeMap<i64, Piece>,
}

fn two_form_masks(nvars: usize) -> Vec<u8> {
    let mut masks = Vec::new();
    for i in 0..nvars {
        for j in i + 1..nvars {
            masks.push((1u8 << i) | (1u8 << j));
        }
    }
    masks.sort();
    masks
}

fn blade_weight(mask: u8, germ: &CurveGerm) -> i64 {
    (0..germ.nvars())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| germ.weights.0[i])
        .sum()
}

fn vectorize(form: &DiffForm, monos: &[(u8, Monomial)]) -> Vec<Q> {
    monos
        .iter()
        .map(|(mask, m)| form.coeff(*mask).coeff(m))
        .collect()
}

/// Reduce a coordinate vector against an echelon; afterwards it is supported
/// on the non-pivot columns.
fn reduce_vector(v: &mut [Q], echelon: &Mat, pivots: &[usize]) {
    for (r, &p) in pivots.iter().enumerate() {
        if !v[p].is_zero() {
            let f = v[p].clone();
            for j in 0..echelon.cols {
                let e = echelon.at(r, j);
                if !e.is_zero() {
                    v[j] = &v[j] - &(e * &f);
                }
            }
        }
    }
}

impl RestrictionSpace {
    pub fn full_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn closed_dim(&self) -> usize {
        self.basis.iter().filter(|b| b.closed).count()
    }

    pub fn closed_indices(&self) -> Vec<usize> {
        self.basis
            .iter()
            .enumerate()
            .filter(|(_, b)| b.closed)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.basis.iter().map(|b| b.delta).collect()
    }

    pub fn closed_degrees(&self) -> Vec<i64> {
        self.basis
            .iter()
            .filter(|b| b.closed)
            .map(|b| b.delta)
            .collect()
    }

    /// Coordinates of the class of a 2-form. Errors if some homogeneous
    /// component lies above the truncation bound.
    pub fn restrict(&self, omega: &DiffForm) -> Result<AlgRestriction> {
        if omega.degree() != 2 {
            return Err(EngineError::DegreeOverflow(format!(
                "restrict expects a 2-form, got degree {}",
                omega.degree()
            )));
        }
        if omega.nvars() != self.germ.nvars() {
            return Err(EngineError::Other(
                "form arity does not match the germ; rewrite to the effective variables first"
                    .into(),
            ));
        }
        let mut out = AlgRestriction::zero(self.basis.len());
        for (delta, comp) in omega.graded_components(&self.germ.weights) {
            if delta > self.bound {
                return Err(EngineError::PieceAboveBound {
                    delta,
                    bound: self.bound,
                });
            }
            let Some(piece) = self.pieces.get(&delta) else {
                continue; // empty graded piece: nothing of this degree exists
            };
            let mut v = vectorize(&comp, &piece.monos);
            reduce_vector(&mut v, &piece.echelon, &piece.pivots);
            if piece.basis_cols.is_empty() {
                debug_assert!(v.iter().all(|c| c.is_zero()));
                continue;
            }
            let residual: Vec<Q> = piece.non_pivots.iter().map(|&j| v[j].clone()).collect();
            match solve_linear(&piece.transform, &residual) {
                Solve::Solution { particular, .. } => {
                    for (k, &col) in piece.basis_cols.iter().enumerate() {
                        out.coords[col] = particular[k].clone();
                    }
                }
                Solve::Infeasible => {
                    return Err(EngineError::Other(format!(
                        "internal: residual at quasi-degree {} not in the reported basis span",
                        delta
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero_restriction(&self, a: &AlgRestriction) -> bool {
        a.is_zero()
    }

    /// Extract coordinates over the closed basis elements; errors when the
    /// class has a component on a non-closed basis element.
    pub fn closed_coords(&self, a: &AlgRestriction) -> Result<Vec<Q>> {
        let mut out = Vec::new();
        for (i, b) in self.basis.iter().enumerate() {
            if b.closed {
                out.push(a.coords[i].clone());
            } else if !a.coords[i].is_zero() {
                return Err(EngineError::NotClosed);
            }
        }
        Ok(out)
    }

    /// Embed closed coordinates into a full coordinate vector.
    pub fn from_closed_coords(&self, closed: &[Q]) -> Result<AlgRestriction> {
        let idx = self.closed_indices();
        if closed.len() != idx.len() {
            return Err(EngineError::CoefficientCount {
                expected: idx.len(),
                got: closed.len(),
            });
        }
        let mut a = AlgRestriction::zero(self.basis.len());
        for (k, &i) in idx.iter().enumerate() {
            a.coords[i] = closed[k].clone();
        }
        Ok(a)
    }

    /// A 2-form representing the given class (the basis combination).
    pub fn representative(&self, a: &AlgRestriction) -> DiffForm {
        let mut f = DiffForm::zero(self.germ.nvars(), 2);
        for (i, b) in self.basis.iter().enumerate() {
            if !a.coords[i].is_zero() {
                f = f.add(&b.form.scale(&a.coords[i]));
            }
        }
        f
    }

    /// Dimension of the graded quotient piece at a quasi-degree.
    pub fn piece_dim(&self, delta: i64) -> usize {
        self.pieces
            .get(&delta)
            .map(|p| p.non_pivots.len())
            .unwrap_or(0)
    }
}

/// Build the space with an automatically chosen basis (reduced-echelon
/// complement representatives, reported in increasing quasi-degree).
pub fn build_space(germ: &CurveGerm, bound: i64) -> Result<RestrictionSpace> {
    build_inner(germ, bound, None)
}

/// Build the space and express it in a stated basis, verifying that the
/// stated elements exactly span the computed quotient degree by degree and
/// that the stated closed flags match the image of closed 2-forms.
pub fn build_space_with_basis(
    germ: &CurveGerm,
    bound: i64,
    spec: Vec<BasisSpec>,
) -> Result<RestrictionSpace> {
    build_inner(germ, bound, Some(spec))
}

fn build_inner(
    germ: &CurveGerm,
    bound: i64,
    spec: Option<Vec<BasisSpec>>,
) -> Result<RestrictionSpace> {
    let m = germ.nvars();
    let masks = two_form_masks(m);
    let window = 2 * germ.weights.max();

    // group the stated basis by quasi-degree
    let mut spec_by_delta: BTreeMap<i64, Vec<(usize, BasisSpec)>> = BTreeMap::new();
    let auto = spec.is_none();
    let mut basis: Vec<BasisElement> = Vec::new();
    if let Some(spec) = spec {
        for (i, s) in spec.into_iter().enumerate() {
            let delta = s
                .form
                .graded_components(&germ.weights)
                .keys()
                .next()
                .copied()
                .ok_or_else(|| EngineError::LoadCheck {
                    identity: s.name.clone(),
                    reason: "zero basis form".into(),
                })?;
            if s.form.graded_components(&germ.weights).len() != 1 {
                return Err(EngineError::LoadCheck {
                    identity: s.name.clone(),
                    reason: "basis form is not quasi-homogeneous".into(),
                });
            }
            basis.push(BasisElement {
                name: s.name.clone(),
                form: s.form.clone(),
                delta,
                closed: s.closed,
            });
            spec_by_delta.entry(delta).or_default().push((i, s));
        }
    }

    let mut pieces = BTreeMap::new();
    for delta in 0..=bound {
        let mut monos: Vec<(u8, Monomial)> = Vec::new();
        for &mask in &masks {
            let bw = blade_weight(mask, germ);
            for mono in monomials_of_quasi_degree(&germ.weights, delta - bw) {
                monos.push((mask, mono));
            }
        }
        if monos.is_empty() {
            if spec_by_delta.contains_key(&delta) {
                return Err(EngineError::LoadCheck {
                    identity: format!("basis at quasi-degree {}", delta),
                    reason: "stated basis at a degree with no 2-forms".into(),
                });
            }
            continue;
        }

        // generators of the graded piece of A^2_0
        let mut rows: Vec<Vec<Q>> = Vec::new();
        for &mask in &masks {
            let bw = blade_weight(mask, germ);
            for h in germ.ideal_piece(delta - bw) {
                let mut f = DiffForm::zero(m, 2);
                f.add_term(mask, h);
                rows.push(vectorize(&f, &monos));
            }
        }
        for i in 0..m {
            for h in germ.ideal_piece(delta - germ.weights.0[i]) {
                let mut beta = DiffForm::zero(m, 1);
                beta.add_term(1 << i, h);
                let dbeta = exterior_d(&beta)?;
                rows.push(vectorize(&dbeta, &monos));
            }
        }
        let (echelon, pivots) = if rows.is_empty() {
            (Mat::zero(0, monos.len()), Vec::new())
        } else {
            let mut mmat = Mat::from_rows(rows);
            let piv = mmat.rref();
            (mmat, piv)
        };
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let non_pivots: Vec<usize> = (0..monos.len()).filter(|j| !pivot_set.contains(j)).collect();
        let qdim = non_pivots.len();

        if qdim > 0 && delta > bound - window {
            return Err(EngineError::StabilizationFailed { bound, delta });
        }

        let (basis_cols, transform) = if auto {
            // representatives: the non-pivot monomial forms themselves
            let mut cols = Vec::new();
            for &j in &non_pivots {
                let (mask, mono) = &monos[j];
                let mut f = DiffForm::zero(m, 2);
                f.add_term(*mask, Polynomial::monomial(m, mono.clone(), Q::one()));
                // closed flag resolved below
                cols.push(basis.len());
                basis.push(BasisElement {
                    name: format!("e{}", basis.len() + 1),
                    form: f,
                    delta,
                    closed: false,
                });
            }
            // transform is the identity: residual coordinates are exactly
            // the non-pivot monomial coefficients
            let mut t = Mat::zero(qdim, qdim);
            for k in 0..qdim {
                t.set(k, k, Q::one());
            }
            (cols, t)
        } else {
            let stated = spec_by_delta.remove(&delta).unwrap_or_default();
            if stated.len() != qdim {
                return Err(EngineError::LoadCheck {
                    identity: format!("basis at quasi-degree {}", delta),
                    reason: format!(
                        "stated {} element(s), computed quotient dimension {}",
                        stated.len(),
                        qdim
                    ),
                });
            }
            let mut t = Mat::zero(qdim, stated.len());
            let mut cols = Vec::new();
            for (k, (i, s)) in stated.iter().enumerate() {
                let mut v = vectorize(&s.form, &monos);
                reduce_vector(&mut v, &echelon, &pivots);
                for (r, &j) in non_pivots.iter().enumerate() {
                    t.set(r, k, v[j].clone());
                }
                cols.push(*i);
            }
            let mut chk = t.clone();
            if chk.rref().len() != qdim {
                return Err(EngineError::LoadCheck {
                    identity: format!("basis at quasi-degree {}", delta),
                    reason: "stated basis elements are dependent in the quotient".into(),
                });
            }
            (cols, t)
        };

        pieces.insert(
            delta,
            Piece {
                monos,
                echelon,
                pivots,
                non_pivots,
                basis_cols,
                transform,
            },
        );
    }

    if !spec_by_delta.is_empty() {
        let delta = *spec_by_delta.keys().next().unwrap();
        return Err(EngineError::LoadCheck {
            identity: format!("basis at quasi-degree {}", delta),
            reason: "stated basis element at a degree where the quotient is zero".into(),
        });
    }

    let mut space = RestrictionSpace {
        germ: germ.clone(),
        bound,
        basis,
        pieces,
    };

    // Closed-subspace bookkeeping: the image of closed graded 2-forms in each
    // quotient piece must match the closed-flagged basis elements (for a
    // stated basis), or fixes the closed flags (for an automatic one).
    resolve_closed_flags(&mut space, auto)?;
    Ok(space)
}

fn resolve_closed_flags(space: &mut RestrictionSpace, auto: bool) -> Result<()> {
    let m = space.germ.nvars();
    let deltas: Vec<i64> = space.pieces.keys().copied().collect();
    for delta in deltas {
        let piece = &space.pieces[&delta];
        if piece.non_pivots.is_empty() {
            continue;
        }
        let monos = piece.monos.clone();
        let basis_cols = piece.basis_cols.clone();
        // closed graded 2-forms at this degree: kernel of d on the piece
        let three_masks: Vec<u8> = {
            let mut v = Vec::new();
            for i in 0..m {
                for j in i + 1..m {
                    for k in j + 1..m {
                        v.push((1u8 << i) | (1 << j) | (1 << k));
                    }
                }
            }
            v.sort();
            v
        };
        let mut d_cols: Vec<Vec<(u8, Monomial, Q)>> = Vec::new();
        for (mask, mono) in &monos {
            let f = DiffForm::monomial_like(m, *mask, mono.clone());
            let df = exterior_d(&f)?;
            let mut entries = Vec::new();
            for (bm, p) in df.terms() {
                for (mm, c) in p.terms() {
                    entries.push((*bm, mm.clone(), c.clone()));
                }
            }
            d_cols.push(entries);
        }
        // coordinates of the 3-form target
        let mut target_index: BTreeMap<(u8, Monomial), usize> = BTreeMap::new();
        for col in &d_cols {
            for (bm, mm, _) in col {
                let key = (*bm, mm.clone());
                let next = target_index.len();
                target_index.entry(key).or_insert(next);
            }
        }
        let _ = three_masks;
        let mut dmat = Mat::zero(target_index.len().max(1), monos.len());
        for (j, col) in d_cols.iter().enumerate() {
            for (bm, mm, c) in col {
                let r = target_index[&(*bm, mm.clone())];
                dmat.set(r, j, c.clone());
            }
        }
        let closed_vectors = crate::linalg::kernel_basis(&dmat);
        // image of the closed piece in quotient coordinates
        let mut image_rows: Vec<Vec<Q>> = Vec::new();
        for v in &closed_vectors {
            let mut w = v.clone();
            reduce_vector(&mut w, &piece.echelon, &piece.pivots);
            let res: Vec<Q> = piece.non_pivots.iter().map(|&j| w[j].clone()).collect();
            if res.iter().any(|c| !c.is_zero()) {
                image_rows.push(res);
            }
        }
        let image_dim = crate::linalg::span_dim(&image_rows);

        if auto {
            // a basis element (a single monomial form here) is marked closed
            // when its residual lies in the image span; for the engine's own
            // use the flags only matter in aggregate, so mark the first
            // `image_dim` elements whose classes lie in the image.
            let mut marked = 0usize;
            for (k, &col) in basis_cols.iter().enumerate() {
                if marked == image_dim {
                    break;
                }
                let mut rows = image_rows.clone();
                let unit: Vec<Q> = (0..basis_cols.len())
                    .map(|j| if j == k { Q::one() } else { Q::zero() })
                    .collect();
                // residual of this basis element is the unit vector in
                // non-pivot coordinates (transform is the identity)
                let before = crate::linalg::span_dim(&rows);
                rows.push(unit);
                if crate::linalg::span_dim(&rows) == before {
                    space.basis[col].closed = true;
                    marked += 1;
                }
            }
        } else {
            // verify: image span == span of closed-flagged stated elements
            let closed_cols: Vec<usize> = basis_cols
                .iter()
                .enumerate()
                .filter(|(_, &col)| space.basis[col].closed)
                .map(|(k, _)| k)
                .collect();
            let piece = &space.pieces[&delta];
            let mut stated_rows: Vec<Vec<Q>> = Vec::new();
            for &k in &closed_cols {
                let col: Vec<Q> = (0..piece.non_pivots.len())
                    .map(|r| piece.transform.at(r, k).clone())
                    .collect();
                stated_rows.push(col);
            }
            let stated_dim = crate::linalg::span_dim(&stated_rows);
            let mut both = image_rows.clone();
            both.extend(stated_rows.clone());
            let joint = crate::linalg::span_dim(&both);
            if !(stated_dim == closed_cols.len()
                && image_dim == stated_dim
                && joint == image_dim)
            {
                return Err(EngineError::LoadCheck {
                    identity: format!("closed subspace at quasi-degree {}", delta),
                    reason: format!(
                        "closed image dimension {} vs stated closed basis dimension {}",
                        image_dim, stated_dim
                    ),
                });
            }
            // non-closed stated elements must lie outside the closed image
            for (k, &col) in basis_cols.iter().enumerate() {
                if space.basis[col].closed {
                    continue;
                }
                let piece = &space.pieces[&delta];
                let colv: Vec<Q> = (0..piece.non_pivots.len())
                    .map(|r| piece.transform.at(r, k).clone())
                    .collect();
                let mut rows = image_rows.clone();
                let before = crate::linalg::span_dim(&rows);
                rows.push(colv);
                if crate::linalg::span_dim(&rows) == before {
                    return Err(EngineError::LoadCheck {
                        identity: space.basis[col].name.clone(),
                        reason: "stated non-closed basis element lies in the closed image".into(),
                    });
                }
            }
        }
    }
    Ok(())
}

impl DiffForm {
    /// Helper used by the engine: a bare monomial times a blade.
    fn monomial_like(nvars: usize, mask: u8, mono: Monomial) -> DiffForm {
        let mut f = DiffForm::zero(nvars, mask.count_ones() as u8);
        f.add_term(mask, Polynomial::monomial(nvars, mono, Q::one()));
        f
    }
}

/// Rewrite a form on a larger coordinate space to the first `keep` variables,
/// preserving its algebraic restriction to any germ on which the dropped
/// coordinates vanish identically: blades touching a dropped differential and
/// coefficient terms divisible by a dropped variable all lie in `A^2_0`.
pub fn rewrite_to_effective(form: &DiffForm, keep: usize) -> DiffForm {
    let mut out = DiffForm::zero(keep, form.degree());
    for (mask, p) in form.terms() {
        if *mask >> keep != 0 {
            continue;
        }
        let mut coeff = Polynomial::zero(keep);
        for (mono, c) in p.terms() {
            if mono.0[keep..].iter().all(|&e| e == 0) {
                coeff.add_term(Monomial(mono.0[..keep].to_vec()), c.clone());
            }
        }
        out.add_term(*mask, coeff);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::forms::{lie_derivative, wedge, DiffForm};
    use crate::poly::{q, qi};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn u7_dimensions_and_degrees() {
        let s = catalog::u7_space().unwrap();
        assert_eq!(s.full_dim(), 8);
        assert_eq!(s.closed_dim(), 7);
        assert_eq!(s.closed_degrees(), vec![7, 8, 9, 10, 11, 13, 14]);
    }

    #[test]
    fn u8_dimensions_and_degrees() {
        let s = catalog::u8_space().unwrap();
        assert_eq!(s.full_dim(), 9);
        assert_eq!(s.closed_dim(), 8);
        assert_eq!(s.closed_degrees(), vec![5, 6, 7, 7, 8, 9, 10, 11]);
    }

    #[test]
    fn u9_dimensions_and_degrees() {
        let s = catalog::u9_space().unwrap();
        assert_eq!(s.full_dim(), 10);
        assert_eq!(s.closed_dim(), 9);
        assert_eq!(s.closed_degrees(), vec![8, 10, 12, 11, 13, 14, 16, 17, 19]);
    }

    #[test]
    fn x3_dx2_dx3_restricts_to_minus_two_theta5() {
        // wedge of the first defining relation with dx3 forces
        // x3 dx2^dx3 = -2 x1 dx1^dx3 in the quotient
        let s = catalog::u7_space().unwrap();
        let x3 = Polynomial::var(3, 2);
        let f = wedge(&DiffForm::dx(3, 1), &DiffForm::dx(3, 2))
            .unwrap()
            .mul_polynomial(&x3);
        let a = s.restrict(&f).unwrap();
        let mut expected = AlgRestriction::zero(8);
        // theta5 is the fifth basis element (index 4)
        expected.coords[4] = qi(-2);
        assert_eq!(a, expected);
    }

    #[test]
    fn coefficient_in_ideal_restricts_to_zero() {
        let s = catalog::u7_space().unwrap();
        let x1 = Polynomial::var(3, 0);
        let x2 = Polynomial::var(3, 1);
        let x3 = Polynomial::var(3, 2);
        let h = &(&x1 * &x1) + &(&x2 * &x3);
        let f = wedge(&DiffForm::dx(3, 0), &DiffForm::dx(3, 1))
            .unwrap()
            .mul_polynomial(&h);
        assert!(s.restrict(&f).unwrap().is_zero());
    }

    #[test]
    fn lie_action_entry_from_the_table() {
        // the X1 = x3 E action on theta2 restricts to -22 theta5
        let s = catalog::u7_space().unwrap();
        let e = s.germ.euler_field();
        let x3 = Polynomial::var(3, 2);
        let x1e = e.mul_polynomial(&x3);
        let theta2 = wedge(&DiffForm::dx(3, 1), &DiffForm::dx(3, 2)).unwrap();
        let l = lie_derivative(&x1e, &theta2).unwrap();
        let a = s.restrict(&l).unwrap();
        let mut expected = AlgRestriction::zero(8);
        expected.coords[4] = qi(-22);
        assert_eq!(a, expected);
    }

    #[test]
    fn exact_form_with_vanishing_primitive_restricts_to_zero() {
        let s = catalog::u7_space().unwrap();
        let x1 = Polynomial::var(3, 0);
        let x2 = Polynomial::var(3, 1);
        let x3 = Polynomial::var(3, 2);
        let g = &(&x1 * &x2) + &x3.pow(3);
        let beta = DiffForm::dx(3, 0).mul_polynomial(&g);
        let dbeta = exterior_d(&beta).unwrap();
        assert!(s.restrict(&dbeta).unwrap().is_zero());
    }

    #[test]
    fn theta1_is_not_zero() {
        let s = catalog::u7_space().unwrap();
        let theta1 = wedge(&DiffForm::dx(3, 0), &DiffForm::dx(3, 2)).unwrap();
        assert!(!s.restrict(&theta1).unwrap().is_zero());
    }

    #[test]
    fn restriction_is_well_defined_and_linear() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        let s = catalog::u7_space().unwrap();
        let germ = &s.germ;
        let masks = [0b011u8, 0b101, 0b110];
        for _ in 0..25 {
            // random 2-form
            let mut omega = DiffForm::zero(3, 2);
            for &mask in &masks {
                let mut p = Polynomial::zero(3);
                for _ in 0..3 {
                    let e: Vec<u32> = (0..3).map(|_| rng.gen_range(0..3)).collect();
                    p.add_term(Monomial(e), q(rng.gen_range(-4..=4), rng.gen_range(1..=3)));
                }
                omega.add_term(mask, p);
            }
            let base = s.restrict(&omega).unwrap();

            // add ideal-coefficient 2-form and d of ideal-coefficient 1-form
            let mut extra = omega.clone();
            for delta in [8i64, 9, 11, 12, 13] {
                for h in germ.ideal_piece(delta) {
                    let mask = masks[rng.gen_range(0..3)];
                    let mut f = DiffForm::zero(3, 2);
                    f.add_term(mask, h.scale(&q(rng.gen_range(-3..=3), 1)));
                    extra = extra.add(&f);
                }
            }
            for delta in [8i64, 9, 10] {
                for h in germ.ideal_piece(delta) {
                    let i = rng.gen_range(0..3);
                    let mut beta = DiffForm::zero(3, 1);
                    beta.add_term(1 << i, h.scale(&q(rng.gen_range(-3..=3), 1)));
                    extra = extra.add(&exterior_d(&beta).unwrap());
                }
            }
            assert_eq!(s.restrict(&extra).unwrap(), base);

            // linearity
            let a = q(rng.gen_range(-5..=5), rng.gen_range(1..=3));
            let b = q(rng.gen_range(-5..=5), rng.gen_range(1..=3));
            let mut omega2 = DiffForm::zero(3, 2);
            omega2.add_term(0b101, Polynomial::var(3, 2));
            let combo = omega.scale(&a).add(&omega2.scale(&b));
            let lhs = s.restrict(&combo).unwrap();
            let rhs = base
                .scale(&a)
                .add(&s.restrict(&omega2).unwrap().scale(&b));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn stabilization_window_is_zero() {
        let s = catalog::u7_space().unwrap();
        let w = 2 * s.germ.weights.max();
        for delta in (s.bound - w)..=s.bound {
            assert_eq!(s.piece_dim(delta), 0, "piece at {} nonzero", delta);
        }
    }

    #[test]
    fn too_small_bound_fails_loudly() {
        let germ = catalog::u7_germ().unwrap();
        match build_space(&germ, 12) {
            Err(EngineError::StabilizationFailed { .. }) => {}
            other => panic!("expected stabilization failure, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn rewrite_preserves_restriction_against_padded_space() {
        // embed U7 in four variables with x4 = 0 and compare restriction of
        // random forms against the three-variable rewrite
        let mut rng = ChaCha20Rng::seed_from_u64(37);
        let g3 = catalog::u7_germ().unwrap();
        let s3 = catalog::u7_space().unwrap();
        let t = Polynomial::var(1, 0);
        let z = Polynomial::zero(1);
        let b1 = crate::germ::Branch::new("B1", vec![z.clone(), t.clone(), z.clone(), z.clone()]);
        let b2 = crate::germ::Branch::new(
            "B2",
            vec![t.pow(4), -&t.pow(5), t.pow(3), Polynomial::zero(1)],
        );
        let eqs4: Vec<Polynomial> = g3.equations.iter().map(|e| e.remap(4, &[0, 1, 2])).collect();
        let mut eqs4 = eqs4;
        eqs4.push(Polynomial::var(4, 3)); // x4 itself vanishes on the germ
        let g4 = CurveGerm::new(
            "U7in4",
            crate::poly::Weights::new(vec![4, 5, 3, 1]).unwrap(),
            eqs4,
            vec![b1, b2],
        )
        .unwrap();
        let s4 = build_space(&g4, 40).unwrap();
        assert_eq!(s4.full_dim(), s3.full_dim());
        for _ in 0..10 {
            let mut omega = DiffForm::zero(4, 2);
            for i in 0..4usize {
                for j in (i + 1)..4usize {
                    let mut p = Polynomial::zero(4);
                    for _ in 0..2 {
                        let e: Vec<u32> = (0..4).map(|_| rng.gen_range(0..3)).collect();
                        p.add_term(Monomial(e), q(rng.gen_range(-4..=4), rng.gen_range(1..=3)));
                    }
                    omega.add_term((1 << i) | (1 << j), p);
                }
            }
            let rewritten = rewrite_to_effective(&omega, 3);
            let a3 = s3.restrict(&rewritten).unwrap();
            // check in the 4-variable space: omega minus the (embedded)
            // basis combination must restrict to zero
            let mut back = DiffForm::zero(4, 2);
            for (i, b) in s3.basis.iter().enumerate() {
                if a3.coords[i].is_zero() {
                    continue;
                }
                for (mask, p) in b.form.terms() {
                    back.add_term(*mask, p.remap(4, &[0, 1, 2]).scale(&a3.coords[i]));
                }
            }
            let diff = omega.sub(&back);
            assert!(s4.restrict(&diff).unwrap().is_zero());
        }
    }
}
