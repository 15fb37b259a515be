//! Curve germs: defining equations, weights, parametrized branches, the
//! graded vanishing ideal, tangency tests and Euler-multiple tangent fields.
//!
//! Membership in the vanishing ideal is decided by branch pullback: a
//! function vanishes on the germ exactly when it composes to zero along
//! every branch. For the real curves handled here that test is exact and
//! reduces every graded question to linear algebra over the rationals.

use crate::forms::{PolyMap, VectorField};
use crate::linalg::{kernel_basis, Mat};
use crate::poly::{monomials_of_quasi_degree, Monomial, Polynomial, Weights};
use crate::{EngineError, Q, Result};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::sync::Mutex;

/// Default cutoff for branch component degrees in user-supplied germs.
pub const DEFAULT_BRANCH_JET_CUTOFF: u32 = 64;

/// One parametrized branch `t -> (x_1(t), ..., x_m(t))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub label: String,
    pub map: PolyMap,
}

impl Branch {
    pub fn new(label: impl Into<String>, comps: Vec<Polynomial>) -> Self {
        Branch {
            label: label.into(),
            map: PolyMap::new(1, comps),
        }
    }

    pub fn nvars(&self) -> usize {
        self.map.target_nvars()
    }

    /// Pull a function back along the branch.
    pub fn pull(&self, f: &Polynomial) -> Polynomial {
        f.substitute(&self.map.comps)
    }

    fn passes_through_origin(&self) -> bool {
        self.map
            .comps
            .iter()
            .all(|c| c.constant_term().is_zero())
    }

    fn is_nonzero(&self) -> bool {
        self.map.comps.iter().any(|c| !c.is_zero())
    }
}

/// A quasi-homogeneous curve germ given by equations, weights and branches.
#[derive(Debug)]
pub struct CurveGerm {
    pub name: String,
    pub weights: Weights,
    pub equations: Vec<Polynomial>,
    pub branches: Vec<Branch>,
    ideal_cache: Mutex<BTreeMap<i64, Vec<Polynomial>>>,
}

impl Clone for CurveGerm {
    fn clone(&self) -> Self {
        CurveGerm {
            name: self.name.clone(),
            weights: self.weights.clone(),
            equations: self.equations.clone(),
            branches: self.branches.clone(),
            ideal_cache: Mutex::new(BTreeMap::new()),
        }
    }
}

impl CurveGerm {
    /// Build a germ and run the load-time checks: equations quasi-homogeneous,
    /// branches distinct, through the origin, nonzero, within the jet cutoff,
    /// and annihilating every equation.
    pub fn new(
        name: impl Into<String>,
        weights: Weights,
        equations: Vec<Polynomial>,
        branches: Vec<Branch>,
    ) -> Result<Self> {
        let name = name.into();
        let m = weights.nvars();
        for (k, eq) in equations.iter().enumerate() {
            if eq.nvars() != m {
                return Err(EngineError::LoadCheck {
                    identity: format!("{} equation {}", name, k + 1),
                    reason: "arity mismatch".into(),
                });
            }
            if !eq.is_quasi_homogeneous(&weights) {
                return Err(EngineError::LoadCheck {
                    identity: format!("{} equation {}", name, k + 1),
                    reason: "not quasi-homogeneous for the stated weights".into(),
                });
            }
        }
        for b in &branches {
            if b.nvars() != m {
                return Err(EngineError::LoadCheck {
                    identity: format!("{} branch {}", name, b.label),
                    reason: "arity mismatch".into(),
                });
            }
            if !b.is_nonzero() {
                return Err(EngineError::LoadCheck {
                    identity: format!("{} branch {}", name, b.label),
                    reason: "identically zero".into(),
                });
            }
            if !b.passes_through_origin() {
                return Err(EngineError::LoadCheck {
                    identity: format!("{} branch {}", name, b.label),
                    reason: "does not pass through the origin".into(),
                });
            }
            let deg = b
                .map
                .comps
                .iter()
                .filter_map(|c| c.t_degree())
                .max()
                .unwrap_or(0);
            if deg > DEFAULT_BRANCH_JET_CUTOFF {
                return Err(EngineError::LoadCheck {
                    identity: format!("{} branch {}", name, b.label),
                    reason: format!(
                        "component degree {} exceeds the jet cutoff {}",
                        deg, DEFAULT_BRANCH_JET_CUTOFF
                    ),
                });
            }
        }
        for i in 0..branches.len() {
            for j in i + 1..branches.len() {
                if branches[i].map == branches[j].map {
                    return Err(EngineError::LoadCheck {
                        identity: format!("{} branches", name),
                        reason: format!(
                            "branches {} and {} coincide",
                            branches[i].label, branches[j].label
                        ),
                    });
                }
            }
        }
        let germ = CurveGerm {
            name,
            weights,
            equations,
            branches,
            ideal_cache: Mutex::new(BTreeMap::new()),
        };
        for b in &germ.branches {
            if !germ.verify_branch(b) {
                return Err(EngineError::LoadCheck {
                    identity: format!("{} branch {}", germ.name, b.label),
                    reason: "defining equations do not vanish along the branch".into(),
                });
            }
        }
        Ok(germ)
    }

    pub fn nvars(&self) -> usize {
        self.weights.nvars()
    }

    /// True iff every defining equation composed with the branch is zero.
    pub fn verify_branch(&self, b: &Branch) -> bool {
        self.equations.iter().all(|eq| b.pull(eq).is_zero())
    }

    /// Membership oracle for the vanishing ideal of the real curve.
    pub fn vanishes_on_germ(&self, h: &Polynomial) -> bool {
        self.branches.iter().all(|b| b.pull(h).is_zero())
    }

    /// Basis of quasi-degree-`delta` polynomials vanishing on the germ,
    /// computed by zeroing all `t`-coefficients of the branch pullbacks.
    pub fn ideal_piece(&self, delta: i64) -> Vec<Polynomial> {
        if let Some(hit) = self.ideal_cache.lock().unwrap().get(&delta) {
            return hit.clone();
        }
        let out = self.ideal_piece_uncached(delta);
        self.ideal_cache
            .lock()
            .unwrap()
            .insert(delta, out.clone());
        out
    }

    fn ideal_piece_uncached(&self, delta: i64) -> Vec<Polynomial> {
        let monos = monomials_of_quasi_degree(&self.weights, delta);
        if monos.is_empty() {
            return Vec::new();
        }
        let m = self.nvars();
        // pullbacks of each candidate monomial along each branch
        let pulled: Vec<Vec<Polynomial>> = self
            .branches
            .iter()
            .map(|b| {
                monos
                    .iter()
                    .map(|mono| b.pull(&Polynomial::monomial(m, mono.clone(), Q::new(1.into(), 1.into()))))
                    .collect()
            })
            .collect();
        let mut rows: Vec<Vec<Q>> = Vec::new();
        for (bi, per_branch) in pulled.iter().enumerate() {
            let max_deg = per_branch
                .iter()
                .filter_map(|p| p.t_degree())
                .max()
                .unwrap_or(0);
            for k in 0..=max_deg {
                let row: Vec<Q> = per_branch.iter().map(|p| p.t_coeff(k)).collect();
                if row.iter().any(|c| !c.is_zero()) {
                    rows.push(row);
                }
            }
            let _ = bi;
        }
        if rows.is_empty() {
            // every candidate already vanishes on all branches
            return monos
                .iter()
                .map(|mono| Polynomial::monomial(m, mono.clone(), Q::new(1.into(), 1.into())))
                .collect();
        }
        let mat = Mat::from_rows(rows);
        kernel_basis(&mat)
            .into_iter()
            .map(|coeffs| {
                let mut p = Polynomial::zero(m);
                for (mono, c) in monos.iter().zip(coeffs) {
                    p.add_term(mono.clone(), c);
                }
                p
            })
            .collect()
    }

    /// True iff `X(F)` vanishes on the germ for every defining equation.
    pub fn is_tangent(&self, x: &VectorField) -> bool {
        self.equations
            .iter()
            .all(|eq| self.vanishes_on_germ(&x.apply(eq)))
    }

    pub fn euler_field(&self) -> VectorField {
        VectorField::euler(&self.weights)
    }
}

/// A tangent field of the form `g * E` with `g` a monomial.
#[derive(Debug, Clone)]
pub struct TangentField {
    /// The monomial factor `g`; the Euler field itself has `g = 1`.
    pub generator: Monomial,
    pub field: VectorField,
    /// Quasi-degree of `g` (the amount the field raises degrees by).
    pub raise: i64,
}

impl TangentField {
    pub fn name(&self, vars: &[&str]) -> String {
        if self.generator.is_one() {
            "E".into()
        } else {
            let g = Polynomial::monomial(
                self.generator.nvars(),
                self.generator.clone(),
                Q::new(1.into(), 1.into()),
            );
            format!("{}*E", g.to_string_with(vars))
        }
    }
}

/// All monomial multiples `g * E` with `qdeg(g) <= max_delta`, each verified
/// tangent. Hamiltonian fields are excluded: they act trivially on algebraic
/// restrictions of closed 2-forms to a 1-dimensional complete intersection.
pub fn euler_tangent_fields(germ: &CurveGerm, max_delta: i64) -> Result<Vec<TangentField>> {
    let e = germ.euler_field();
    let m = germ.nvars();
    let mut out = Vec::new();
    for delta in 0..=max_delta {
        for g in monomials_of_quasi_degree(&germ.weights, delta) {
            let gp = Polynomial::monomial(m, g.clone(), Q::new(1.into(), 1.into()));
            let field = e.mul_polynomial(&gp);
            if !germ.is_tangent(&field) {
                return Err(EngineError::NotTangent);
            }
            out.push(TangentField {
                generator: g,
                field,
                raise: delta,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::poly::qi;

    fn u7() -> CurveGerm {
        catalog::u7_germ().unwrap()
    }

    #[test]
    fn u7_branches_verify() {
        let g = u7();
        for b in &g.branches {
            assert!(g.verify_branch(b), "branch {} fails", b.label);
        }
    }

    #[test]
    fn smooth_axis_is_a_branch_and_line_is_not() {
        let g = u7();
        let t = Polynomial::var(1, 0);
        let axis = Branch::new("B", vec![Polynomial::zero(1), t.clone(), Polynomial::zero(1)]);
        assert!(g.verify_branch(&axis));
        let line = Branch::new("L", vec![t, Polynomial::zero(1), Polynomial::zero(1)]);
        assert!(!g.verify_branch(&line));
    }

    #[test]
    fn vanishing_oracle() {
        let g = u7();
        let x1 = Polynomial::var(3, 0);
        let x2 = Polynomial::var(3, 1);
        let x3 = Polynomial::var(3, 2);
        let eq1 = &(&x1 * &x1) + &(&x2 * &x3);
        assert!(g.vanishes_on_germ(&eq1));
        assert!(!g.vanishes_on_germ(&x1));
        let u8g = catalog::u8_germ().unwrap();
        // x1*x2 + x1*x3^2
        let f = &(&x1 * &x2) + &(&x1 * &x3.pow(2));
        assert!(u8g.vanishes_on_germ(&f));
    }

    #[test]
    fn ideal_piece_degree_eight_is_the_first_equation() {
        let g = u7();
        let piece = g.ideal_piece(8);
        assert_eq!(piece.len(), 1);
        let x1 = Polynomial::var(3, 0);
        let x2 = Polynomial::var(3, 1);
        let x3 = Polynomial::var(3, 2);
        let eq1 = &(&x1 * &x1) + &(&x2 * &x3);
        // same line up to scale
        let ratio_ok = {
            let p = &piece[0];
            let c = p.coeff(&Monomial(vec![2, 0, 0]));
            !c.is_zero() && p.scale(&(qi(1) / c)) == eq1
        };
        assert!(ratio_ok);
    }

    #[test]
    fn ideal_piece_low_degrees_are_empty() {
        let g = u7();
        assert!(g.ideal_piece(1).is_empty());
        assert!(g.ideal_piece(7).is_empty());
    }

    #[test]
    fn u9_ideal_contains_second_equation() {
        let g = catalog::u9_germ().unwrap();
        let x1 = Polynomial::var(3, 0);
        let x2 = Polynomial::var(3, 1);
        let x3 = Polynomial::var(3, 2);
        let f = &(&x1 * &x2) + &x3.pow(4);
        let piece = g.ideal_piece(12);
        // f must lie in the span of the degree-12 piece
        let mut rows: Vec<Vec<Q>> = piece
            .iter()
            .map(|p| vectorize(p, 12, &g.weights))
            .collect();
        let rank_before = crate::linalg::span_dim(&rows);
        rows.push(vectorize(&f, 12, &g.weights));
        assert_eq!(crate::linalg::span_dim(&rows), rank_before);
    }

    fn vectorize(p: &Polynomial, delta: i64, w: &Weights) -> Vec<Q> {
        let monos = monomials_of_quasi_degree(w, delta);
        monos.iter().map(|m| p.coeff(m)).collect()
    }

    #[test]
    fn euler_field_is_tangent_and_satisfies_euler_identity() {
        let g = u7();
        let e = g.euler_field();
        assert!(g.is_tangent(&e));
        for eq in &g.equations {
            let deg = eq.quasi_degree(&g.weights).unwrap();
            let lhs = e.apply(eq);
            assert_eq!(lhs, eq.scale(&qi(deg)));
        }
        // d/dx1 is not tangent
        let mut comps = vec![Polynomial::zero(3); 3];
        comps[0] = Polynomial::one(3);
        assert!(!g.is_tangent(&VectorField::new(comps)));
    }

    #[test]
    fn x2_times_euler_is_tangent_for_u8() {
        let g = catalog::u8_germ().unwrap();
        let x2 = Polynomial::var(3, 1);
        let f = g.euler_field().mul_polynomial(&x2);
        assert!(g.is_tangent(&f));
    }

    #[test]
    fn tangent_field_list_matches_degree_bound() {
        let g = u7();
        let fields = euler_tangent_fields(&g, 8).unwrap();
        let names: Vec<String> = fields
            .iter()
            .map(|f| f.name(&["x1", "x2", "x3"]))
            .collect();
        for expected in ["E", "x3*E", "x1*E", "x2*E", "x3^2*E", "x1*x3*E"] {
            assert!(names.iter().any(|n| n == expected), "missing {}", expected);
        }
        let only_e = euler_tangent_fields(&g, 0).unwrap();
        assert_eq!(only_e.len(), 1);
        assert!(only_e[0].generator.is_one());
        let u9 = catalog::u9_germ().unwrap();
        let f9 = euler_tangent_fields(&u9, 11).unwrap();
        let names9: Vec<String> = f9.iter().map(|f| f.name(&["x1", "x2", "x3"])).collect();
        assert!(names9.iter().any(|n| n == "x1*x3^2*E"));
    }

    #[test]
    fn tangent_field_derivatives_vanish_on_germ() {
        let g = u7();
        for tf in euler_tangent_fields(&g, 7).unwrap() {
            for eq in &g.equations {
                assert!(g.vanishes_on_germ(&tf.field.apply(eq)));
            }
        }
    }

    #[test]
    fn ideal_piece_is_monotone_compatible() {
        let g = u7();
        for delta in [8i64, 9, 11, 12] {
            let piece = g.ideal_piece(delta);
            for p in &piece {
                for (i, wi) in g.weights.0.iter().enumerate() {
                    let shifted = p * &Polynomial::var(3, i);
                    let target = g.ideal_piece(delta + wi);
                    let mut rows: Vec<Vec<Q>> = target
                        .iter()
                        .map(|q| vectorize(q, delta + wi, &g.weights))
                        .collect();
                    let rank = crate::linalg::span_dim(&rows);
                    rows.push(vectorize(&shifted, delta + wi, &g.weights));
                    assert_eq!(crate::linalg::span_dim(&rows), rank);
                }
            }
        }
    }
}
