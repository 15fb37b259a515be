//! Infinitesimal Lie actions of tangent fields on restriction coordinates,
//! normal-form reduction by graded elimination, and the class decision
//! trees for the three catalog families.
//!
//! The group elements the reducer applies are exactly computable on the
//! coordinate space: flows of the degree-raising fields `g*E` act as
//! exponentials of nilpotent matrices, and the quasi-homogeneous scalings
//! act diagonally by `c_j -> t^(d_j) c_j` (a negative `t` realizes the
//! discrete sign symmetry of the germ).

use crate::germ::{euler_tangent_fields, TangentField};
use crate::linalg::{solve_linear, Mat, Solve};
use crate::restriction::RestrictionSpace;
use crate::{EngineError, Q, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// The three built-in families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    U7,
    U8,
    U9,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::U7 => "U7",
            Family::U8 => "U8",
            Family::U9 => "U9",
        }
    }

    /// Label of the class with zero restriction.
    pub fn top_class(&self) -> &'static str {
        match self {
            Family::U7 => "7",
            Family::U8 => "8",
            Family::U9 => "9",
        }
    }
}

/// Lie-action matrices of a list of tangent fields on the closed basis.
#[derive(Debug)]
pub struct ActionTable {
    pub fields: Vec<TangentField>,
    /// `mats[i]` acts on closed coordinate columns; column `j` holds the
    /// closed coordinates of the restriction of `L_{X_i} theta_j`.
    pub mats: Vec<Mat>,
    /// Quasi-degrees of the closed basis elements, in basis order.
    pub degrees: Vec<i64>,
}

/// Closed coordinates of `restrict(L_X theta_j)` for every closed basis
/// element. Errors when the field is not tangent to the germ.
pub fn action_matrix(space: &RestrictionSpace, x: &TangentField) -> Result<Mat> {
    if !space.germ.is_tangent(&x.field) {
        return Err(EngineError::NotTangent);
    }
    let closed: Vec<usize> = space.closed_indices();
    let k = closed.len();
    let mut m = Mat::zero(k, k);
    for (j, &bj) in closed.iter().enumerate() {
        let theta = &space.basis[bj].form;
        let l = crate::forms::lie_derivative(&x.field, theta)?;
        let a = space.restrict(&l)?;
        let cc = space.closed_coords(&a)?;
        for (i, v) in cc.into_iter().enumerate() {
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// Build the full action table over the Euler-multiple tangent fields up to
/// the degree spread of the closed basis.
pub fn build_action_table(space: &RestrictionSpace) -> Result<ActionTable> {
    let degrees = space.closed_degrees();
    let spread = degrees.iter().max().unwrap() - degrees.iter().min().unwrap();
    let fields = euler_tangent_fields(&space.germ, spread)?;
    let mats = fields
        .iter()
        .map(|x| action_matrix(space, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(ActionTable {
        fields,
        mats,
        degrees,
    })
}

impl ActionTable {
    /// Fields whose action matrix is nonzero (the list the proofs work with).
    pub fn nontrivial_fields(&self) -> Vec<usize> {
        self.mats
            .iter()
            .enumerate()
            .filter(|(_, m)| (0..m.rows).any(|i| (0..m.cols).any(|j| !m.at(i, j).is_zero())))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Span of the images of a closed class under all table fields: the tangent
/// space to the orbit at that class.
pub fn orbit_tangent_span(table: &ActionTable, c: &[Q]) -> Vec<Vec<Q>> {
    let mut rows = Vec::new();
    for m in &table.mats {
        let v = m.mul_vec(c);
        if v.iter().any(|x| !x.is_zero()) {
            rows.push(v);
        }
    }
    rows
}

pub fn orbit_dim(table: &ActionTable, c: &[Q]) -> usize {
    crate::linalg::span_dim(&orbit_tangent_span(table, c))
}

/// Outcome of the family decision tree on a closed coordinate vector.
#[derive(Debug, Clone)]
pub struct Decision {
    pub label: String,
    /// Index of the pattern head (normalized toward +-1), if any.
    pub head: Option<usize>,
    /// Pattern entries fixed as a ratio to the head coefficient.
    pub fixed: Vec<(usize, Q)>,
    /// Coordinate indices of the moduli, in the order the tables list them.
    pub moduli_pos: Vec<usize>,
}

fn dec(label: &str, head: usize, fixed: Vec<(usize, Q)>, moduli: Vec<usize>) -> Decision {
    Decision {
        label: label.into(),
        head: Some(head),
        fixed,
        moduli_pos: moduli,
    }
}

/// The class decision tree; branch conditions are exact rational tests on
/// the input coordinates.
pub fn decide(family: Family, c: &[Q]) -> Result<Decision> {
    let k = c.len();
    let expected = match family {
        Family::U7 => 7,
        Family::U8 => 8,
        Family::U9 => 9,
    };
    if k != expected {
        return Err(EngineError::CoefficientCount {
            expected,
            got: k,
        });
    }
    if c.iter().all(|x| x.is_zero()) {
        return Ok(Decision {
            label: family.top_class().into(),
            head: None,
            fixed: vec![],
            moduli_pos: vec![],
        });
    }
    let nz = |i: usize| !c[i].is_zero();
    let d = match family {
        Family::U7 => {
            if nz(0) {
                dec("0", 0, vec![], vec![1, 2])
            } else if nz(1) {
                dec("1", 1, vec![], vec![2, 3])
            } else if nz(2) {
                dec("2", 2, vec![], vec![3, 4])
            } else if nz(3) {
                dec("3", 3, vec![], vec![4])
            } else if nz(4) {
                dec("4", 4, vec![], vec![5])
            } else if nz(5) {
                dec("5", 5, vec![], vec![6])
            } else {
                dec("6", 6, vec![], vec![])
            }
        }
        Family::U8 => {
            if nz(0) {
                dec("0", 0, vec![], vec![1, 2])
            } else if nz(1) {
                dec("1", 1, vec![], vec![2, 3])
            } else if nz(2) {
                let rho = &c[3] / &c[2];
                if rho == Q::new((-1).into(), 3.into()) {
                    dec("3,0_5", 2, vec![(3, rho)], vec![4, 5])
                } else if rho == Q::from_integer(2.into()) {
                    dec("3,0_inf", 2, vec![(3, rho)], vec![4, 6])
                } else {
                    dec("2", 2, vec![], vec![3, 4])
                }
            } else if nz(3) {
                dec("3,1", 3, vec![], vec![4])
            } else if nz(4) {
                dec("4", 4, vec![], vec![5])
            } else if nz(5) {
                dec("5", 5, vec![], vec![6])
            } else if nz(6) {
                dec("6", 6, vec![], vec![7])
            } else {
                dec("7", 7, vec![], vec![])
            }
        }
        Family::U9 => {
            if nz(0) {
                dec("0", 0, vec![], vec![1, 2])
            } else if nz(1) {
                dec("1", 1, vec![], vec![2, 3, 5])
            } else if nz(2) {
                if nz(3) {
                    dec("2", 2, vec![], vec![3, 4])
                } else if nz(4) {
                    dec("3,0", 2, vec![], vec![4, 5])
                } else {
                    dec("4,0", 2, vec![], vec![5, 6])
                }
            } else if nz(3) {
                dec("3,1", 3, vec![], vec![4])
            } else if nz(4) {
                dec("4,1", 4, vec![], vec![5, 7])
            } else if nz(5) {
                dec("5", 5, vec![], vec![6])
            } else if nz(6) {
                dec("6", 6, vec![], vec![7])
            } else if nz(7) {
                dec("7", 7, vec![], vec![8])
            } else {
                dec("8", 8, vec![], vec![])
            }
        }
    };
    Ok(d)
}

/// Canonical reduced form of a closed class: the paper label, the surviving
/// coordinates, and a replayable trace of the group elements applied.
#[derive(Debug, Clone)]
pub struct ClassLabel {
    pub family: Family,
    pub label: String,
    /// Sign of the head coefficient after normalization (0 for the zero class).
    pub sign: i8,
    /// Values of the moduli, in table order.
    pub moduli: Vec<Q>,
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    pub description: String,
    pub matrix: Mat,
}

#[derive(Debug, Clone, Default)]
pub struct ReductionTrace {
    pub steps: Vec<TraceStep>,
}

impl ReductionTrace {
    /// Replay the recorded group elements on a coordinate vector.
    pub fn replay(&self, c: &[Q]) -> Vec<Q> {
        let mut v = c.to_vec();
        for s in &self.steps {
            v = s.matrix.mul_vec(&v);
        }
        v
    }
}

/// Exponential of a nilpotent matrix, exact.
pub fn exp_nilpotent(n: &Mat) -> Mat {
    let k = n.rows;
    let mut acc = Mat::zero(k, k);
    for i in 0..k {
        acc.set(i, i, Q::one());
    }
    let mut term = acc.clone();
    let mut fact = Q::one();
    for step in 1..=(k + 1) {
        term = mat_mul(&term, n);
        fact = &fact * &Q::from_integer(BigInt::from(step));
        let scaled = mat_scale(&term, &(Q::one() / &fact));
        if mat_is_zero(&scaled) {
            break;
        }
        acc = mat_add(&acc, &scaled);
    }
    acc
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(a.cols, b.rows);
    let mut out = Mat::zero(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.at(i, k);
            if aik.is_zero() {
                continue;
            }
            for j in 0..b.cols {
                let bkj = b.at(k, j);
                if !bkj.is_zero() {
                    let v = out.at(i, j) + &(aik * bkj);
                    out.set(i, j, v);
                }
            }
        }
    }
    out
}

fn mat_add(a: &Mat, b: &Mat) -> Mat {
    let mut out = Mat::zero(a.rows, a.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            out.set(i, j, a.at(i, j) + b.at(i, j));
        }
    }
    out
}

fn mat_scale(a: &Mat, c: &Q) -> Mat {
    let mut out = Mat::zero(a.rows, a.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            out.set(i, j, a.at(i, j) * c);
        }
    }
    out
}

fn mat_is_zero(a: &Mat) -> bool {
    (0..a.rows).all(|i| (0..a.cols).all(|j| a.at(i, j).is_zero()))
}

/// Diagonal matrix of the scaling action `c_j -> t^(d_j) c_j`.
pub fn scaling_matrix(degrees: &[i64], t: &Q) -> Mat {
    let k = degrees.len();
    let mut m = Mat::zero(k, k);
    for (j, &d) in degrees.iter().enumerate() {
        let mut p = Q::one();
        for _ in 0..d {
            p = &p * t;
        }
        m.set(j, j, p);
    }
    m
}

/// Exact rational `n`-th root of a positive rational, when one exists.
fn exact_root(x: &Q, n: i64) -> Option<Q> {
    assert!(x.is_positive());
    let num = x.numer().clone();
    let den = x.denom().clone();
    let rn = num.nth_root(n as u32);
    let rd = den.nth_root(n as u32);
    if num == pow_bigint(&rn, n) && den == pow_bigint(&rd, n) {
        Some(Q::new(rn, rd))
    } else {
        None
    }
}

fn pow_bigint(b: &BigInt, n: i64) -> BigInt {
    let mut acc = BigInt::one();
    for _ in 0..n {
        acc = acc * b;
    }
    acc
}

/// Reduce a closed class to its normal form by graded elimination, then
/// canonicalize by the scaling action. Returns the label, the normal-form
/// closed coordinates and the trace of applied group elements.
pub fn reduce(table: &ActionTable, family: Family, coords: &[Q]) -> Result<(ClassLabel, Vec<Q>, ReductionTrace)> {
    let decision = decide(family, coords)?;
    let mut c = coords.to_vec();
    let mut trace = ReductionTrace::default();
    let k = c.len();
    let degrees = &table.degrees;

    let Some(head) = decision.head else {
        return Ok((
            ClassLabel {
                family,
                label: decision.label,
                sign: 0,
                moduli: vec![],
            },
            c,
            trace,
        ));
    };

    let keep: std::collections::BTreeSet<usize> = std::iter::once(head)
        .chain(decision.fixed.iter().map(|(i, _)| *i))
        .chain(decision.moduli_pos.iter().copied())
        .collect();

    // levels to clean, ascending by quasi-degree
    let mut levels: Vec<i64> = degrees.iter().copied().collect();
    levels.sort();
    levels.dedup();

    for &delta in &levels {
        let targets: Vec<usize> = (0..k)
            .filter(|&j| degrees[j] == delta && !keep.contains(&j) && !c[j].is_zero())
            .collect();
        if targets.is_empty() {
            continue;
        }
        // fields safe at this level: every nonzero coordinate they act on
        // lands at or above `delta`
        let mut candidates = Vec::new();
        for (i, m) in table.mats.iter().enumerate() {
            if table.fields[i].raise == 0 {
                continue;
            }
            let safe = (0..k).all(|src| {
                if c[src].is_zero() || degrees[src] + table.fields[i].raise >= delta {
                    return true;
                }
                (0..k).all(|r| m.at(r, src).is_zero())
            });
            if safe {
                candidates.push(i);
            }
        }
        // solve for the move killing the target coordinates at first order
        let mut a = Mat::zero(targets.len(), candidates.len());
        for (col, &i) in candidates.iter().enumerate() {
            let img = table.mats[i].mul_vec(&c);
            for (row, &j) in targets.iter().enumerate() {
                a.set(row, col, img[j].clone());
            }
        }
        let b: Vec<Q> = targets.iter().map(|&j| -c[j].clone()).collect();
        let lambdas = match solve_linear(&a, &b) {
            Solve::Solution { particular, .. } => particular,
            Solve::Infeasible => {
                return Err(EngineError::Other(format!(
                    "graded elimination stuck at quasi-degree {} for class {}",
                    delta, decision.label
                )))
            }
        };
        let mut n = Mat::zero(k, k);
        let mut used = Vec::new();
        for (col, &i) in candidates.iter().enumerate() {
            if lambdas[col].is_zero() {
                continue;
            }
            n = mat_add(&n, &mat_scale(&table.mats[i], &lambdas[col]));
            used.push(format!(
                "{} * {}",
                lambdas[col],
                table.fields[i].name(&["x1", "x2", "x3"])
            ));
        }
        if used.is_empty() {
            continue;
        }
        let g = exp_nilpotent(&n);
        c = g.mul_vec(&c);
        trace.steps.push(TraceStep {
            description: format!("flow at quasi-degree {}: exp({})", delta, used.join(" + ")),
            matrix: g,
        });
        debug_assert!(targets.iter().all(|&j| c[j].is_zero()));
    }

    // residual coordinates outside the pattern must now vanish
    for j in 0..k {
        if !keep.contains(&j) && !c[j].is_zero() {
            return Err(EngineError::Other(format!(
                "residual coordinate {} outside the normal-form pattern",
                j + 1
            )));
        }
    }

    // scaling normalization: bring the head coefficient to +-1 when an exact
    // rational root exists, then take the lexicographically minimal vector
    // over the +-t ambiguity (negative t realizes the sign symmetry)
    let head_deg = degrees[head];
    let t0 = exact_root(&(Q::one() / c[head].abs()), head_deg).unwrap_or_else(Q::one);
    let cand1 = scaling_matrix(degrees, &t0);
    let cand2 = scaling_matrix(degrees, &(-t0.clone()));
    let v1 = cand1.mul_vec(&c);
    let v2 = cand2.mul_vec(&c);
    let (vmin, gmin, tmin) = if vec_lex_le(&v1, &v2) {
        (v1, cand1, t0.clone())
    } else {
        (v2, cand2, -t0.clone())
    };
    trace.steps.push(TraceStep {
        description: format!("scaling t = {}", tmin),
        matrix: gmin,
    });
    c = vmin;

    let sign = if c[head].is_positive() { 1 } else { -1 };
    let moduli: Vec<Q> = decision.moduli_pos.iter().map(|&j| c[j].clone()).collect();
    Ok((
        ClassLabel {
            family,
            label: decision.label,
            sign,
            moduli,
        },
        c,
        trace,
    ))
}

fn vec_lex_le(a: &[Q], b: &[Q]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    true
}

/// Codimension of the class stratum: closed dimension minus orbit dimension
/// at the normal form minus the number of moduli.
pub fn class_codimension(table: &ActionTable, normal_form: &[Q], moduli_count: usize) -> usize {
    let dim = table.degrees.len();
    dim - orbit_dim(table, normal_form) - moduli_count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::poly::{q, qi};

    fn u7_table() -> ActionTable {
        let s = catalog::u7_space().unwrap();
        build_action_table(&s).unwrap()
    }

    #[test]
    fn euler_acts_diagonally_by_degrees() {
        let t = u7_table();
        let e = &t.mats[0];
        for j in 0..7 {
            for i in 0..7 {
                let expect = if i == j {
                    qi(t.degrees[j])
                } else {
                    qi(0)
                };
                assert_eq!(*e.at(i, j), expect);
            }
        }
    }

    #[test]
    fn u7_x1_row_matches_table() {
        let t = u7_table();
        // field x3*E is the one with generator x3
        let idx = t
            .fields
            .iter()
            .position(|f| f.name(&["x1", "x2", "x3"]) == "x3*E")
            .unwrap();
        let m = &t.mats[idx];
        // theta1 -> 10 theta4, theta2 -> -22 theta5,
        // theta4 -> 13 theta6, theta5 -> 14 theta7
        assert_eq!(*m.at(3, 0), qi(10));
        assert_eq!(*m.at(4, 1), qi(-22));
        assert_eq!(*m.at(5, 3), qi(13));
        assert_eq!(*m.at(6, 4), qi(14));
        assert_eq!(*m.at(2, 2), qi(0));
    }

    #[test]
    fn u8_fractional_entry() {
        let s = catalog::u8_space().unwrap();
        let t = build_action_table(&s).unwrap();
        let idx = t
            .fields
            .iter()
            .position(|f| f.name(&["x1", "x2", "x3"]) == "x1*E")
            .unwrap();
        // theta5 -> 11/3 theta8
        assert_eq!(*t.mats[idx].at(7, 4), q(11, 3));
    }

    #[test]
    fn u9_large_integer_entries() {
        let s = catalog::u9_space().unwrap();
        let t = build_action_table(&s).unwrap();
        let idx = t
            .fields
            .iter()
            .position(|f| f.name(&["x1", "x2", "x3"]) == "x2*E")
            .unwrap();
        assert_eq!(*t.mats[idx].at(7, 1), qi(-136));
        assert_eq!(*t.mats[idx].at(8, 2), qi(-38));
    }

    #[test]
    fn reduce_example_from_the_elimination_replay() {
        // theta1 + 3 theta2 + theta4 reduces to class 0 with moduli (3, 0)
        let t = u7_table();
        let mut c = vec![qi(0); 7];
        c[0] = qi(1);
        c[1] = qi(3);
        c[3] = qi(1);
        let (label, nf, trace) = reduce(&t, Family::U7, &c).unwrap();
        assert_eq!(label.label, "0");
        assert_eq!(label.moduli, vec![qi(3), qi(0)]);
        assert_eq!(trace.replay(&c), nf);
        assert_eq!(nf[0], qi(1));
        assert!(nf[3].is_zero() && nf[4].is_zero() && nf[5].is_zero() && nf[6].is_zero());
    }

    #[test]
    fn reduce_zero_is_top_class() {
        let t = u7_table();
        let (label, _, _) = reduce(&t, Family::U7, &vec![qi(0); 7]).unwrap();
        assert_eq!(label.label, "7");
        assert_eq!(label.sign, 0);
    }

    #[test]
    fn u8_special_ratio_classes() {
        let s = catalog::u8_space().unwrap();
        let t = build_action_table(&s).unwrap();
        // theta3 + 2 theta4 lies in the ratio-2 stratum
        let mut c = vec![qi(0); 8];
        c[2] = qi(1);
        c[3] = qi(2);
        let (label, _, _) = reduce(&t, Family::U8, &c).unwrap();
        assert_eq!(label.label, "3,0_inf");
        // ratio -1/3
        let mut c = vec![qi(0); 8];
        c[2] = qi(3);
        c[3] = qi(-1);
        c[6] = qi(5);
        let (label, nf, _) = reduce(&t, Family::U8, &c).unwrap();
        assert_eq!(label.label, "3,0_5");
        assert_eq!(&nf[3] / &nf[2], q(-1, 3));
        // generic ratio
        let mut c = vec![qi(0); 8];
        c[2] = qi(1);
        c[3] = qi(1);
        let (label, _, _) = reduce(&t, Family::U8, &c).unwrap();
        assert_eq!(label.label, "2");
    }

    #[test]
    fn reduce_is_idempotent_on_its_output() {
        let t = u7_table();
        let mut c = vec![qi(0); 7];
        c[0] = q(5, 3);
        c[1] = q(-2, 7);
        c[2] = qi(4);
        c[4] = qi(1);
        let (l1, nf1, _) = reduce(&t, Family::U7, &c).unwrap();
        let (l2, nf2, _) = reduce(&t, Family::U7, &nf1).unwrap();
        assert_eq!(l1.label, l2.label);
        assert_eq!(nf1, nf2);
        assert_eq!(l1.moduli, l2.moduli);
    }

    #[test]
    fn scaling_changes_moduli_but_not_label() {
        let t = u7_table();
        let mut c = vec![qi(0); 7];
        c[1] = qi(2);
        c[2] = qi(3);
        c[3] = q(1, 2);
        c[5] = qi(-4);
        let (l1, _, _) = reduce(&t, Family::U7, &c).unwrap();
        let s = scaling_matrix(&t.degrees, &q(2, 3));
        let scaled = s.mul_vec(&c);
        let (l2, _, _) = reduce(&t, Family::U7, &scaled).unwrap();
        assert_eq!(l1.label, l2.label);
    }

    #[test]
    fn orbit_span_for_class0_has_dimension_five() {
        let t = u7_table();
        let mut c = vec![qi(0); 7];
        c[0] = qi(1);
        c[1] = q(7, 2);
        c[2] = q(-3, 5);
        assert_eq!(orbit_dim(&t, &c), 5);
        assert_eq!(orbit_dim(&t, &vec![qi(0); 7]), 0);
        // theta4 + c theta5: dimension 3
        let mut c = vec![qi(0); 7];
        c[3] = qi(1);
        c[4] = q(9, 4);
        assert_eq!(orbit_dim(&t, &c), 3);
    }

    #[test]
    fn codimension_of_u7_classes() {
        let t = u7_table();
        let mut c = vec![qi(0); 7];
        c[3] = qi(1);
        c[4] = q(2, 3);
        assert_eq!(class_codimension(&t, &c, 1), 3);
    }

    #[test]
    fn moduli_directions_stay_outside_the_orbit_span() {
        // for the class-0 normal form, theta2 and theta3 are not tangent
        // directions of the orbit
        let t = u7_table();
        let mut c = vec![qi(0); 7];
        c[0] = qi(1);
        c[1] = q(7, 2);
        c[2] = q(-3, 5);
        let span = orbit_tangent_span(&t, &c);
        let base = crate::linalg::span_dim(&span);
        for dir in [1usize, 2] {
            let mut rows = span.clone();
            let mut unit = vec![qi(0); 7];
            unit[dir] = qi(1);
            rows.push(unit);
            assert_eq!(crate::linalg::span_dim(&rows), base + 1);
        }
    }
}
