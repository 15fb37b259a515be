//! Discrete symplectic invariants: index of isotropy, symplectic
//! multiplicity, Lagrangian tangency orders of branches and multi-germs,
//! and the geometric conditions evaluated on tangent frames.
//!
//! Tangency orders are computed two independent ways: directly from the
//! definition, as a search over generating-function jets of Lagrangian
//! charts in all mixed polarizations (a family of exact linear feasibility
//! problems), and — for single quasi-homogeneous branches whose class has a
//! representative vanishing at the origin — as the maximal order of
//! vanishing of primitive 1-forms. Infinities are only ever certified by a
//! zero-restriction witness; search exhaustion is an error.

use crate::classify::{orbit_dim, ActionTable};
use crate::forms::{exterior_d, DiffForm};
use crate::germ::{Branch, CurveGerm};
use crate::linalg::{solve_linear, IncrementalSolver, Mat, Solve};
use crate::poly::{monomials_of_quasi_degree, Monomial, Polynomial};
use crate::restriction::{build_space, AlgRestriction, RestrictionSpace};
use crate::{EngineError, Q, Result};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Default ceiling of the tangency-order search.
pub const DEFAULT_LT_CEILING: usize = 24;

/// A finite value or a certified infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrInf {
    Finite(i64),
    Infinite,
}

impl OrInf {
    pub fn is_infinite(&self) -> bool {
        matches!(self, OrInf::Infinite)
    }
}

impl std::fmt::Display for OrInf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrInf::Finite(n) => write!(f, "{}", n),
            OrInf::Infinite => write!(f, "inf"),
        }
    }
}

// ---------------------------------------------------------------------------
// Lagrangian charts and tangency orders
// ---------------------------------------------------------------------------

/// Half-dimension of the symplectic scenes.
pub const SCENE_N: usize = 3;

/// Ambient index of `p_i` / `q_i` in `(p1,q1,p2,q2,p3,q3)`.
pub fn p_index(i: usize) -> usize {
    2 * i
}

pub fn q_index(i: usize) -> usize {
    2 * i + 1
}

/// A Lagrangian chart in a mixed polarization: for `i` outside the
/// polarization set the free variable of pair `i` is `q_i` and the chart
/// imposes `p_i = dS/dq_i`; for `j` inside it the free variable is `p_j`
/// and the chart imposes `q_j = -dS/dp_j`.
#[derive(Debug, Clone)]
pub struct LagrangianChart {
    /// Bitmask over the `SCENE_N` pairs.
    pub polarization: u8,
    /// Generating function in the free variables (no constant or linear
    /// part, so the chart passes through the origin).
    pub gen_fn: Polynomial,
}

impl LagrangianChart {
    pub fn new(polarization: u8, gen_fn: Polynomial) -> Result<Self> {
        assert_eq!(gen_fn.nvars(), SCENE_N);
        for (m, _) in gen_fn.terms() {
            if m.total_degree() < 2 {
                return Err(EngineError::Other(
                    "generating function must have no constant or linear terms".into(),
                ));
            }
        }
        Ok(LagrangianChart {
            polarization,
            gen_fn,
        })
    }

    /// Ambient index of the free variable of pair `i`.
    pub fn free_index(&self, i: usize) -> usize {
        if self.polarization >> i & 1 == 1 {
            p_index(i)
        } else {
            q_index(i)
        }
    }

    /// The chart's defining functions `H_1..H_n` on the ambient space.
    pub fn defining_functions(&self) -> Vec<Polynomial> {
        let subst: Vec<Polynomial> = (0..SCENE_N)
            .map(|i| Polynomial::var(6, self.free_index(i)))
            .collect();
        (0..SCENE_N)
            .map(|i| {
                let ds = self.gen_fn.partial(i).substitute(&subst);
                if self.polarization >> i & 1 == 1 {
                    // q_i + dS/dp_i
                    &Polynomial::var(6, q_index(i)) + &ds
                } else {
                    // p_i - dS/dq_i
                    &Polynomial::var(6, p_index(i)) - &ds
                }
            })
            .collect()
    }

    /// Parametrization of the chart by its free variables.
    pub fn parametrization(&self) -> crate::forms::PolyMap {
        let mut comps = vec![Polynomial::zero(SCENE_N); 6];
        for i in 0..SCENE_N {
            let ds = self.gen_fn.partial(i);
            if self.polarization >> i & 1 == 1 {
                comps[p_index(i)] = Polynomial::var(SCENE_N, i);
                comps[q_index(i)] = -&ds;
            } else {
                comps[q_index(i)] = Polynomial::var(SCENE_N, i);
                comps[p_index(i)] = ds;
            }
        }
        crate::forms::PolyMap::new(SCENE_N, comps)
    }
}

/// Tangency order of a branch to a fixed chart: the minimum over the
/// defining functions of the vanishing order along the branch, infinite
/// exactly when the branch lies inside the chart.
pub fn tangency_order(b: &Branch, chart: &LagrangianChart) -> OrInf {
    let mut best: Option<u32> = None;
    for h in chart.defining_functions() {
        let pulled = b.pull(&h);
        match pulled.t_order() {
            None => continue, // identically zero: no finite constraint
            Some(k) => {
                best = Some(match best {
                    None => k,
                    Some(b0) => b0.min(k),
                })
            }
        }
    }
    match best {
        None => OrInf::Infinite,
        Some(k) => OrInf::Finite(k as i64),
    }
}

/// Generating-function search: the largest `k` such that some Lagrangian
/// chart meets every listed branch with order at least `k`. The certificate
/// for infinity must come from elsewhere; this search errors out at the
/// ceiling.
pub fn lt_search(branches: &[&Branch], ceiling: usize) -> Result<usize> {
    let mut best = 1usize;
    for polarization in 0u8..(1 << SCENE_N) {
        let k = lt_search_chart(branches, polarization, ceiling)?;
        best = best.max(k);
        if best >= ceiling {
            return Err(EngineError::CeilingExhausted { ceiling });
        }
    }
    Ok(best)
}

fn lt_search_chart(branches: &[&Branch], polarization: u8, ceiling: usize) -> Result<usize> {
    // free coordinates of each branch
    let free_idx: Vec<usize> = (0..SCENE_N)
        .map(|i| {
            if polarization >> i & 1 == 1 {
                p_index(i)
            } else {
                q_index(i)
            }
        })
        .collect();

    // candidate generating-function monomials, degree 2 and up
    let mut columns: Vec<Monomial> = Vec::new();
    let max_deg = (ceiling + 1) as u32;
    for d in 2..=max_deg {
        for m in monomials_of_total_degree(SCENE_N, d) {
            columns.push(m);
        }
    }

    // per (branch, pair): base component and per-column pullback of the
    // partial derivative
    struct Row {
        base: Polynomial,
        cols: Vec<Polynomial>,
    }
    let mut rows_data: Vec<Row> = Vec::new();
    for b in branches {
        let free_comps: Vec<Polynomial> =
            free_idx.iter().map(|&ci| b.map.comps[ci].clone()).collect();
        for i in 0..SCENE_N {
            let (base_idx, sign) = if polarization >> i & 1 == 1 {
                (q_index(i), Q::one())
            } else {
                (p_index(i), -Q::one())
            };
            let base = b.map.comps[base_idx].clone();
            let cols: Vec<Polynomial> = columns
                .iter()
                .map(|m| {
                    let dm = Polynomial::monomial(SCENE_N, m.clone(), Q::one()).partial(i);
                    dm.substitute(&free_comps).scale(&sign)
                })
                .collect();
            rows_data.push(Row { base, cols });
        }
    }

    // keep only columns that can influence orders below the ceiling
    let keep: Vec<usize> = (0..columns.len())
        .filter(|&c| {
            rows_data.iter().any(|r| {
                r.cols[c]
                    .t_order()
                    .map(|o| (o as usize) < ceiling)
                    .unwrap_or(false)
            })
        })
        .collect();

    let mut solver = IncrementalSolver::new(keep.len());
    for j in 0..ceiling as u32 {
        for r in &rows_data {
            let rhs = -r.base.t_coeff(j);
            let coeffs: Vec<Q> = keep.iter().map(|&c| r.cols[c].t_coeff(j)).collect();
            if coeffs.iter().all(|v| v.is_zero()) && rhs.is_zero() {
                continue;
            }
            if !solver.push(&coeffs, rhs) {
                // orders < j are achievable, order j is not
                return Ok(j as usize);
            }
        }
    }
    Ok(ceiling)
}

fn monomials_of_total_degree(nvars: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; nvars];
    fn rec(nvars: usize, idx: usize, rem: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if idx == nvars {
            if rem == 0 {
                out.push(Monomial(exps.clone()));
            }
            return;
        }
        for e in 0..=rem {
            exps[idx] = e;
            rec(nvars, idx + 1, rem - e, exps, out);
        }
        exps[idx] = 0;
    }
    rec(nvars, 0, d, &mut exps, &mut out);
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// sub-germ restriction spaces and certificates
// ---------------------------------------------------------------------------

/// Restriction space of a sub-multi-germ (a subset of the branches), graded
/// by the same weights. Used for the zero-restriction certificates and the
/// single-branch invariants.
pub fn subgerm_space(germ: &CurveGerm, branch_indices: &[usize]) -> Result<RestrictionSpace> {
    let branches: Vec<Branch> = branch_indices
        .iter()
        .map(|&i| germ.branches[i].clone())
        .collect();
    let sub = CurveGerm::new(
        format!(
            "{}[{}]",
            germ.name,
            branch_indices
                .iter()
                .map(|i| (i + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
        germ.weights.clone(),
        vec![],
        branches,
    )?;
    build_space(&sub, crate::restriction::DEFAULT_DEGREE_BOUND)
}

// ---------------------------------------------------------------------------
// index of isotropy
// ---------------------------------------------------------------------------

/// Maximal order of vanishing at the origin among closed 2-forms
/// representing the class; infinite exactly for the zero class. Feasibility
/// per order is an exact linear solve over graded representatives.
pub fn index_of_isotropy(space: &RestrictionSpace, a: &AlgRestriction) -> Result<OrInf> {
    if a.is_zero() {
        return Ok(OrInf::Infinite);
    }
    // candidate monomial 2-forms at the basis quasi-degrees
    let m = space.germ.nvars();
    let mut deltas: Vec<i64> = space.degrees();
    deltas.sort();
    deltas.dedup();
    let mut columns: Vec<(u8, Monomial)> = Vec::new();
    for &delta in &deltas {
        for i in 0..m {
            for j in i + 1..m {
                let bw = space.germ.weights.0[i] + space.germ.weights.0[j];
                for mono in monomials_of_quasi_degree(&space.germ.weights, delta - bw) {
                    columns.push(((1 << i) | (1 << j), mono));
                }
            }
        }
    }
    // restriction of each column and its exterior derivative
    let col_restr: Vec<AlgRestriction> = columns
        .iter()
        .map(|(mask, mono)| {
            let mut f = DiffForm::zero(m, 2);
            f.add_term(*mask, Polynomial::monomial(m, mono.clone(), Q::one()));
            space.restrict(&f)
        })
        .collect::<Result<Vec<_>>>()?;
    let col_d: Vec<DiffForm> = columns
        .iter()
        .map(|(mask, mono)| {
            let mut f = DiffForm::zero(m, 2);
            f.add_term(*mask, Polynomial::monomial(m, mono.clone(), Q::one()));
            exterior_d(&f)
        })
        .collect::<Result<Vec<_>>>()?;

    // base equality rows: restriction coordinates and closedness
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rhs: Vec<Q> = Vec::new();
    for bi in 0..space.full_dim() {
        rows.push(col_restr.iter().map(|r| r.coords[bi].clone()).collect());
        rhs.push(a.coords[bi].clone());
    }
    // closedness: coordinates of d on the 3-form monomial support
    let mut d_support: BTreeMap<(u8, Monomial), usize> = BTreeMap::new();
    for df in &col_d {
        for (mask, p) in df.terms() {
            for (mono, _) in p.terms() {
                let key = (*mask, mono.clone());
                let next = d_support.len();
                d_support.entry(key).or_insert(next);
            }
        }
    }
    let mut d_rows: Vec<Vec<Q>> = vec![vec![Q::zero(); columns.len()]; d_support.len()];
    for (c, df) in col_d.iter().enumerate() {
        for (mask, p) in df.terms() {
            for (mono, v) in p.terms() {
                let r = d_support[&(*mask, mono.clone())];
                d_rows[r][c] = v.clone();
            }
        }
    }
    for r in d_rows {
        rows.push(r);
        rhs.push(Q::zero());
    }

    // order feasibility, increasing r
    let max_total: u32 = columns
        .iter()
        .map(|(_, mono)| mono.total_degree())
        .max()
        .unwrap_or(0);
    let mut best = 0i64;
    'outer: for r in 1..=(max_total as i64 + 1) {
        let mut all_rows = rows.clone();
        let mut all_rhs = rhs.clone();
        for (c, (_, mono)) in columns.iter().enumerate() {
            if (mono.total_degree() as i64) < r {
                let mut row = vec![Q::zero(); columns.len()];
                row[c] = Q::one();
                all_rows.push(row);
                all_rhs.push(Q::zero());
            }
        }
        let mat = Mat::from_rows(all_rows);
        match solve_linear(&mat, &all_rhs) {
            Solve::Solution { .. } => best = r,
            Solve::Infeasible => break 'outer,
        }
    }
    Ok(OrInf::Finite(best))
}

// ---------------------------------------------------------------------------
// symplectic multiplicity
// ---------------------------------------------------------------------------

/// Codimension of the tangent-field orbit of the class in the closed space.
pub fn symplectic_multiplicity(table: &ActionTable, closed_coords: &[Q]) -> usize {
    table.degrees.len() - orbit_dim(table, closed_coords)
}

// ---------------------------------------------------------------------------
// the 1-form (primitive) route for single branches
// ---------------------------------------------------------------------------

/// Maximal vanishing order along a quasi-homogeneous branch of 1-forms
/// whose differential represents the class. Requires a representative
/// vanishing at the origin; the search is an exact incremental feasibility
/// problem over 1-form jets.
pub fn lt_single_via_restriction(
    branch_space: &RestrictionSpace,
    branch: &Branch,
    a: &AlgRestriction,
    ceiling: usize,
) -> Result<OrInf> {
    if a.is_zero() {
        return Ok(OrInf::Infinite);
    }
    match index_of_isotropy(branch_space, a)? {
        OrInf::Finite(r) if r < 1 => return Err(EngineError::NoVanishingRepresentative),
        _ => {}
    }
    let m = branch_space.germ.nvars();
    let w = &branch_space.germ.weights;
    let qbound = ceiling as i64 + 2 * w.max();

    // columns: 1-form jets m * dx_i
    let mut columns: Vec<(usize, Monomial)> = Vec::new();
    for i in 0..m {
        for delta in 0..=(qbound - w.0[i]) {
            for mono in monomials_of_quasi_degree(w, delta) {
                columns.push((i, mono));
            }
        }
    }
    // restriction rows: restrict(d(column)) = a
    let col_restr: Vec<AlgRestriction> = columns
        .iter()
        .map(|(i, mono)| {
            let mut f = DiffForm::zero(m, 1);
            f.add_term(1 << i, Polynomial::monomial(m, mono.clone(), Q::one()));
            branch_space.restrict(&exterior_d(&f)?)
        })
        .collect::<Result<Vec<_>>>()?;
    // pullback coefficient polynomials f*(m dx_i) = (m o f) * f_i'
    let col_pull: Vec<Polynomial> = columns
        .iter()
        .map(|(i, mono)| {
            let mf = branch.pull(&Polynomial::monomial(m, mono.clone(), Q::one()));
            let fi_prime = branch.map.comps[*i].partial(0);
            &mf * &fi_prime
        })
        .collect();

    let mut solver = IncrementalSolver::new(columns.len());
    for bi in 0..branch_space.full_dim() {
        let coeffs: Vec<Q> = col_restr.iter().map(|r| r.coords[bi].clone()).collect();
        if !solver.push(&coeffs, a.coords[bi].clone()) {
            return Err(EngineError::Other(
                "class is not represented by the differential of a polynomial 1-form".into(),
            ));
        }
    }
    // order rows: coefficient of t^j of the pulled-back 1-form vanishes;
    // the vanishing order of the form is (coefficient order) + 1
    for j in 0..(ceiling as u32) {
        let coeffs: Vec<Q> = col_pull.iter().map(|p| p.t_coeff(j)).collect();
        if coeffs.iter().all(|c| c.is_zero()) {
            continue;
        }
        if !solver.push(&coeffs, Q::zero()) {
            return Ok(OrInf::Finite(j as i64 + 1));
        }
    }
    Err(EngineError::CeilingExhausted { ceiling })
}

// ---------------------------------------------------------------------------
// geometric conditions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeometryFlags {
    pub v_nonzero: bool,
    pub l1l2_nonzero: bool,
    pub ker_eq_l2: bool,
    pub w_zero: bool,
}

/// Ordered jet directions of a branch: coefficient vectors by increasing
/// t-order.
fn jet_directions(b: &Branch) -> Vec<(u32, Vec<Q>)> {
    let n = b.nvars();
    let mut by_order: BTreeMap<u32, Vec<Q>> = BTreeMap::new();
    for (ci, comp) in b.map.comps.iter().enumerate() {
        for (mono, c) in comp.terms() {
            let k = mono.0[0];
            by_order
                .entry(k)
                .or_insert_with(|| vec![Q::zero(); n])[ci] = c.clone();
        }
    }
    by_order.into_iter().collect()
}

fn first_direction(b: &Branch) -> Result<Vec<Q>> {
    jet_directions(b)
        .into_iter()
        .next()
        .map(|(_, v)| v)
        .ok_or_else(|| EngineError::DegenerateFrame(format!("branch {} is zero", b.label)))
}

/// Evaluate a constant 2-form (given as an antisymmetric matrix) on two
/// vectors.
fn pair(matrix: &[Vec<Q>], u: &[Q], v: &[Q]) -> Q {
    let mut s = Q::zero();
    for i in 0..u.len() {
        if u[i].is_zero() {
            continue;
        }
        for j in 0..v.len() {
            if !matrix[i][j].is_zero() && !v[j].is_zero() {
                s += &u[i] * &matrix[i][j] * &v[j];
            }
        }
    }
    s
}

/// Evaluate the geometric conditions of a scene: the frame is derived from
/// branch jets (tangent lines, the 2-space of the singular branch, the
/// 3-space spanned by all branch jets) and paired against the constant part
/// of the symplectic form.
pub fn geometric_conditions(
    branches: &[Branch],
    singular: usize,
    omega_at_origin: &[Vec<Q>],
) -> Result<GeometryFlags> {
    let smooth_first = branches
        .iter()
        .enumerate()
        .find(|(i, _)| *i != singular)
        .map(|(_, b)| b)
        .ok_or_else(|| EngineError::DegenerateFrame("no nonsingular branch".into()))?;
    let l1 = first_direction(smooth_first)?;
    let l2 = first_direction(&branches[singular])?;

    // V: first two independent jet directions of the singular branch
    let mut v_dirs: Vec<Vec<Q>> = Vec::new();
    for (_, d) in jet_directions(&branches[singular]) {
        let mut test = v_dirs.clone();
        test.push(d.clone());
        if crate::linalg::span_dim(&test) > v_dirs.len() {
            v_dirs.push(d);
        }
        if v_dirs.len() == 2 {
            break;
        }
    }
    if v_dirs.len() < 2 {
        return Err(EngineError::DegenerateFrame(
            "singular branch spans less than a 2-space".into(),
        ));
    }

    // W: first three independent directions across all branches, ordered by
    // t-order then branch order
    let mut all: Vec<(u32, usize, Vec<Q>)> = Vec::new();
    for (bi, b) in branches.iter().enumerate() {
        for (k, d) in jet_directions(b) {
            all.push((k, bi, d));
        }
    }
    all.sort_by_key(|(k, bi, _)| (*k, *bi));
    let mut w_dirs: Vec<Vec<Q>> = Vec::new();
    for (_, _, d) in all {
        let mut test = w_dirs.clone();
        test.push(d.clone());
        if crate::linalg::span_dim(&test) > w_dirs.len() {
            w_dirs.push(d);
        }
        if w_dirs.len() == 3 {
            break;
        }
    }
    if w_dirs.len() < 3 {
        return Err(EngineError::DegenerateFrame(
            "branch jets span less than a 3-space".into(),
        ));
    }

    let v_nonzero = !pair(omega_at_origin, &v_dirs[0], &v_dirs[1]).is_zero();
    let l1l2_nonzero = !pair(omega_at_origin, &l1, &l2).is_zero();

    // restriction of the form to W in the chosen basis
    let mut w_mat = vec![vec![Q::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            w_mat[i][j] = pair(omega_at_origin, &w_dirs[i], &w_dirs[j]);
        }
    }
    let w_zero = w_mat.iter().all(|r| r.iter().all(|v| v.is_zero()));

    // kernel of omega|_W and comparison with the line l2
    let ker_eq_l2 = if w_zero {
        false
    } else {
        let mat = Mat::from_rows(w_mat.clone());
        let ker = crate::linalg::kernel_basis(&mat);
        if ker.len() != 1 {
            false
        } else {
            // kernel vector in ambient coordinates
            let mut kv = vec![Q::zero(); 6];
            for (ci, coef) in ker[0].iter().enumerate() {
                for a in 0..6 {
                    kv[a] = &kv[a] + &(coef * &w_dirs[ci][a]);
                }
            }
            crate::linalg::span_dim(&[kv.clone(), l2.clone()]) == 1
        }
    };

    Ok(GeometryFlags {
        v_nonzero,
        l1l2_nonzero,
        ker_eq_l2,
        w_zero,
    })
}

/// Constant part of the standard symplectic form on R^6 as a matrix.
pub fn omega0_matrix() -> Vec<Vec<Q>> {
    let mut m = vec![vec![Q::zero(); 6]; 6];
    for i in 0..3 {
        m[2 * i][2 * i + 1] = Q::one();
        m[2 * i + 1][2 * i] = -Q::one();
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::forms::{pullback, wedge};
    use crate::poly::{q, qi};
    use rand::Rng;

    #[test]
    fn charts_are_lagrangian_for_every_polarization() {
        let mut rng = crate::seeded_rng(41);
        let omega0 = catalog::omega0_six();
        for polarization in 0u8..8 {
            for _ in 0..3 {
                let mut s = Polynomial::zero(3);
                for _ in 0..8 {
                    let e: Vec<u32> = (0..3).map(|_| rng.gen_range(0..3)).collect();
                    if e.iter().sum::<u32>() < 2 {
                        continue;
                    }
                    s.add_term(Monomial(e), q(rng.gen_range(-4..=4), rng.gen_range(1..=3)));
                }
                let chart = LagrangianChart::new(polarization, s).unwrap();
                let par = chart.parametrization();
                let back = pullback(&par, &omega0).unwrap();
                assert!(back.is_zero(), "polarization {:b} not Lagrangian", polarization);
            }
        }
    }

    #[test]
    fn tangency_order_examples() {
        // a line inside the chart {p = 0} has infinite order
        let t = Polynomial::var(1, 0);
        let z = Polynomial::zero(1);
        let line = Branch::new(
            "L",
            vec![z.clone(), t.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
        );
        let chart = LagrangianChart::new(0, Polynomial::zero(3)).unwrap();
        assert_eq!(tangency_order(&line, &chart), OrInf::Infinite);

        // the singular class-0 branch against {p = 0}: min order of
        // (p1, p2, p3) pulled back = 4
        let b2 = Branch::new(
            "B2",
            vec![
                t.pow(4),
                -&t.pow(3),
                t.pow(5),
                -&t.pow(3) - &t.pow(4),
                z.clone(),
                z.clone(),
            ],
        );
        assert_eq!(tangency_order(&b2, &chart), OrInf::Finite(4));

        // transverse line against a chart with nonzero linear part of H
        let line_p = Branch::new(
            "P",
            vec![t.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z],
        );
        assert_eq!(tangency_order(&line_p, &chart), OrInf::Finite(1));
    }

    #[test]
    fn index_of_isotropy_on_u7_classes() {
        let s = catalog::u7_space().unwrap();
        // theta4 + c theta5 has index 1
        let mut a = AlgRestriction::zero(8);
        a.coords[3] = qi(1);
        a.coords[4] = q(5, 7);
        assert_eq!(index_of_isotropy(&s, &a).unwrap(), OrInf::Finite(1));
        // the zero class is infinitely isotropic
        assert_eq!(
            index_of_isotropy(&s, &AlgRestriction::zero(8)).unwrap(),
            OrInf::Infinite
        );
        // theta1 + ... has index 0
        let mut a = AlgRestriction::zero(8);
        a.coords[0] = qi(1);
        a.coords[1] = q(2, 3);
        assert_eq!(index_of_isotropy(&s, &a).unwrap(), OrInf::Finite(0));
        // theta6 + c theta7 has index 2
        let mut a = AlgRestriction::zero(8);
        a.coords[6] = qi(1);
        a.coords[7] = q(-3, 2);
        assert_eq!(index_of_isotropy(&s, &a).unwrap(), OrInf::Finite(2));
    }

    #[test]
    fn u9_theta8_class_has_index_three() {
        let s = catalog::u9_space().unwrap();
        let mut a = AlgRestriction::zero(10);
        a.coords[8] = qi(1); // theta8 sits after sigma in the full basis
        a.coords[9] = q(4, 3); // theta9
        assert_eq!(index_of_isotropy(&s, &a).unwrap(), OrInf::Finite(3));
    }

    #[test]
    fn multiplicity_matches_table_for_u7_class0() {
        let s = catalog::u7_space().unwrap();
        let t = crate::classify::build_action_table(&s).unwrap();
        let mut c = vec![qi(0); 7];
        c[0] = qi(1);
        c[1] = q(3, 4);
        c[2] = q(-1, 2);
        assert_eq!(symplectic_multiplicity(&t, &c), 2);
        assert_eq!(symplectic_multiplicity(&t, &vec![qi(0); 7]), 7);
    }

    #[test]
    fn smooth_branch_restriction_space_is_trivial() {
        let g = catalog::u7_germ().unwrap();
        let s = subgerm_space(&g, &[0]).unwrap();
        assert_eq!(s.full_dim(), 0);
    }

    #[test]
    fn singular_branch_space_has_multiplicity_dimensions() {
        let g = catalog::u7_germ().unwrap();
        let s = subgerm_space(&g, &[1]).unwrap();
        // the singular branch is a multiplicity-3 curve
        assert!(s.full_dim() >= 3);
    }

    #[test]
    fn geometry_flags_for_u7_class0() {
        let cat_rec = catalog::load_family(crate::classify::Family::U7).unwrap();
        let class = &cat_rec.classes[0];
        let moduli = vec![qi(2), q(1, 3)]; // c1 != 0
        let branches: Vec<Branch> = class
            .scene
            .branches
            .iter()
            .map(|b| b.instantiate(&moduli))
            .collect();
        let flags =
            geometric_conditions(&branches, class.scene.singular, &omega0_matrix()).unwrap();
        assert!(flags.v_nonzero);
        assert!(flags.l1l2_nonzero);
        assert!(!flags.ker_eq_l2);
        assert!(!flags.w_zero);
        // with c1 = 0 the pairing of the tangent lines vanishes
        let moduli0 = vec![qi(0), q(1, 3)];
        let branches0: Vec<Branch> = class
            .scene
            .branches
            .iter()
            .map(|b| b.instantiate(&moduli0))
            .collect();
        let flags0 =
            geometric_conditions(&branches0, class.scene.singular, &omega0_matrix()).unwrap();
        assert!(flags0.v_nonzero);
        assert!(!flags0.l1l2_nonzero);
    }

    #[test]
    fn lt_search_on_u7_class3_scene_gives_seven() {
        let rec = catalog::load_family(crate::classify::Family::U7).unwrap();
        let class = rec.classes.iter().find(|c| c.label == "3").unwrap();
        let moduli = vec![q(2, 3)];
        let branches: Vec<Branch> = class
            .scene
            .branches
            .iter()
            .map(|b| b.instantiate(&moduli))
            .collect();
        let refs: Vec<&Branch> = branches.iter().collect();
        assert_eq!(lt_search(&refs, DEFAULT_LT_CEILING).unwrap(), 7);
        // the singular branch alone also realizes 7
        let single = [&branches[1]];
        assert_eq!(lt_search(&single, DEFAULT_LT_CEILING).unwrap(), 7);
    }

    #[test]
    fn wedge_products_do_not_break_charts() {
        // smoke test that chart defining functions have independent linear
        // parts: H_i(0) = 0 and dH_i are the coordinate differentials
        let chart = LagrangianChart::new(0b101, Polynomial::zero(3)).unwrap();
        let hs = chart.defining_functions();
        assert_eq!(hs.len(), 3);
        let d0 = exterior_d(&DiffForm::from_polynomial(hs[0].clone())).unwrap();
        let d1 = exterior_d(&DiffForm::from_polynomial(hs[1].clone())).unwrap();
        let w = wedge(&d0, &d1).unwrap();
        assert!(!w.is_zero());
    }
}
