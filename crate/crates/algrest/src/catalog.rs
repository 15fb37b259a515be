//! Built-in, load-checked records for the U7, U8 and U9 curve
//! singularities: defining equations, weights, branches, the bases of the
//! restriction spaces, tangent-field lists, discrete symmetries, class
//! normal forms with realizing symplectic forms, and the symplectic-scene
//! branch parametrizations used by the tangency-order computations.
//!
//! Golden regression data for the classification tables ships as JSON next
//! to this module and mirrors the CLI report format.

use crate::classify::{build_action_table, ActionTable, Family};
use crate::forms::{exterior_d, pullback, DiffForm, PolyMap};
use crate::germ::{Branch, CurveGerm};
use crate::linalg::{solve_linear, Mat, Solve};
use crate::poly::{monomials_of_quasi_degree, q, qi, Monomial, Polynomial, Weights};
use crate::restriction::{
    build_space_with_basis, rewrite_to_effective, BasisSpec, RestrictionSpace,
    DEFAULT_DEGREE_BOUND,
};
use crate::{EngineError, Q, Result};
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------------------
// germs and restriction-space bases
// ---------------------------------------------------------------------------

fn x(i: usize) -> Polynomial {
    Polynomial::var(3, i)
}

fn tpow(k: u32) -> Polynomial {
    Polynomial::var(1, 0).pow(k)
}

fn tzero() -> Polynomial {
    Polynomial::zero(1)
}

pub fn u7_germ() -> Result<CurveGerm> {
    CurveGerm::new(
        "U7",
        Weights::new(vec![4, 5, 3])?,
        vec![
            &(&x(0) * &x(0)) + &(&x(1) * &x(2)),
            &(&x(0) * &x(1)) + &x(2).pow(3),
        ],
        vec![
            Branch::new("B1", vec![tzero(), tpow(1), tzero()]),
            Branch::new("B2", vec![tpow(4), -&tpow(5), tpow(3)]),
        ],
    )
}

pub fn u8_germ() -> Result<CurveGerm> {
    CurveGerm::new(
        "U8",
        Weights::new(vec![3, 4, 2])?,
        vec![
            &(&x(0) * &x(0)) + &(&x(1) * &x(2)),
            &(&x(0) * &x(1)) + &(&x(0) * &x(2).pow(2)),
        ],
        vec![
            Branch::new("B1", vec![tzero(), tpow(1), tzero()]),
            Branch::new("B2", vec![tzero(), tzero(), tpow(1)]),
            Branch::new("B3", vec![tpow(3), -&tpow(4), tpow(2)]),
        ],
    )
}

pub fn u9_germ() -> Result<CurveGerm> {
    CurveGerm::new(
        "U9",
        Weights::new(vec![5, 7, 3])?,
        vec![
            &(&x(0) * &x(0)) + &(&x(1) * &x(2)),
            &(&x(0) * &x(1)) + &x(2).pow(4),
        ],
        vec![
            Branch::new("B1", vec![tzero(), tpow(1), tzero()]),
            Branch::new("B2", vec![tpow(5), -&tpow(7), tpow(3)]),
        ],
    )
}

/// `m * dx_{i+1} /\ dx_{j+1}` on three variables.
fn tf(exps: [u32; 3], i: usize, j: usize) -> DiffForm {
    DiffForm::monomial_two_form(3, Monomial(exps.to_vec()), Q::one(), i, j)
}

fn theta_ladder() -> Vec<DiffForm> {
    vec![
        tf([0, 0, 0], 0, 2), // theta1 = dx1 ^ dx3
        tf([0, 0, 0], 1, 2), // theta2 = dx2 ^ dx3
        tf([0, 0, 0], 0, 1), // theta3 = dx1 ^ dx2
        tf([0, 0, 1], 0, 2), // theta4 = x3 dx1 ^ dx3
        tf([1, 0, 0], 0, 2), // theta5 = x1 dx1 ^ dx3
        tf([0, 0, 2], 0, 2), // theta6 = x3^2 dx1 ^ dx3
        tf([1, 0, 1], 0, 2), // theta7 = x1 x3 dx1 ^ dx3
        tf([0, 0, 3], 0, 2), // theta8 = x3^3 dx1 ^ dx3
        tf([1, 0, 2], 0, 2), // theta9 = x1 x3^2 dx1 ^ dx3
    ]
}

fn spec(name: &str, form: DiffForm, closed: bool) -> BasisSpec {
    BasisSpec {
        name: name.into(),
        form,
        closed,
    }
}

/// Basis of the full space for U7: theta1..theta5, sigma, theta6, theta7.
pub fn u7_basis() -> Vec<BasisSpec> {
    let th = theta_ladder();
    vec![
        spec("theta1", th[0].clone(), true),
        spec("theta2", th[1].clone(), true),
        spec("theta3", th[2].clone(), true),
        spec("theta4", th[3].clone(), true),
        spec("theta5", th[4].clone(), true),
        spec("sigma", tf([1, 0, 0], 1, 2), false), // x1 dx2 ^ dx3
        spec("theta6", th[5].clone(), true),
        spec("theta7", th[6].clone(), true),
    ]
}

pub fn u8_basis() -> Vec<BasisSpec> {
    let th = theta_ladder();
    vec![
        spec("theta1", th[0].clone(), true),
        spec("theta2", th[1].clone(), true),
        spec("theta3", th[2].clone(), true),
        spec("theta4", th[3].clone(), true),
        spec("theta5", th[4].clone(), true),
        spec("theta6", th[5].clone(), true),
        spec("sigma", tf([1, 0, 0], 1, 2), false), // x1 dx2 ^ dx3
        spec("theta7", th[6].clone(), true),
        spec("theta8", th[7].clone(), true),
    ]
}

pub fn u9_basis() -> Vec<BasisSpec> {
    let th = theta_ladder();
    vec![
        spec("theta1", th[0].clone(), true),
        spec("theta2", th[1].clone(), true),
        spec("theta3", th[2].clone(), true),
        spec("theta4", th[3].clone(), true),
        spec("theta5", th[4].clone(), true),
        spec("theta6", th[5].clone(), true),
        spec("sigma", tf([0, 0, 1], 0, 1), false), // x3 dx1 ^ dx2
        spec("theta7", th[6].clone(), true),
        spec("theta8", th[7].clone(), true),
        spec("theta9", th[8].clone(), true),
    ]
}

pub fn u7_space() -> Result<RestrictionSpace> {
    build_space_with_basis(&u7_germ()?, DEFAULT_DEGREE_BOUND, u7_basis())
}

pub fn u8_space() -> Result<RestrictionSpace> {
    build_space_with_basis(&u8_germ()?, DEFAULT_DEGREE_BOUND, u8_basis())
}

pub fn u9_space() -> Result<RestrictionSpace> {
    build_space_with_basis(&u9_germ()?, DEFAULT_DEGREE_BOUND, u9_basis())
}

// ---------------------------------------------------------------------------
// class records
// ---------------------------------------------------------------------------

/// One entry of a normal-form coordinate pattern over the closed basis.
#[derive(Debug, Clone)]
pub enum PatternEntry {
    /// Fixed multiple of the head coefficient (the head itself is `1`).
    Fixed(Q),
    /// The k-th modulus.
    Modulus(usize),
}

/// A coefficient of a scene branch component: affine in the moduli.
#[derive(Debug, Clone)]
pub struct CoefExpr {
    pub constant: Q,
    pub modulus_terms: Vec<(usize, Q)>,
}

impl CoefExpr {
    pub fn eval(&self, moduli: &[Q]) -> Q {
        let mut v = self.constant.clone();
        for (i, f) in &self.modulus_terms {
            v += &moduli[*i] * f;
        }
        v
    }
}

fn cc(num: i64, den: i64) -> CoefExpr {
    CoefExpr {
        constant: q(num, den),
        modulus_terms: vec![],
    }
}

fn cm(idx: usize, num: i64, den: i64) -> CoefExpr {
    CoefExpr {
        constant: Q::zero(),
        modulus_terms: vec![(idx, q(num, den))],
    }
}

fn cm2(i0: usize, n0: i64, d0: i64, i1: usize, n1: i64, d1: i64) -> CoefExpr {
    CoefExpr {
        constant: Q::zero(),
        modulus_terms: vec![(i0, q(n0, d0)), (i1, q(n1, d1))],
    }
}

/// Scene branch component: a polynomial in `t` with moduli-affine
/// coefficients.
pub type TComp = Vec<(u32, CoefExpr)>;

#[derive(Debug, Clone)]
pub struct SceneBranch {
    pub label: String,
    pub comps: [TComp; 6],
}

impl SceneBranch {
    pub fn instantiate(&self, moduli: &[Q]) -> Branch {
        let comps: Vec<Polynomial> = self
            .comps
            .iter()
            .map(|c| {
                let mut p = Polynomial::zero(1);
                for (k, e) in c {
                    p.add_term(Monomial(vec![*k]), e.eval(moduli));
                }
                p
            })
            .collect();
        Branch::new(self.label.clone(), comps)
    }
}

/// Branch parametrizations of a class in canonical `(p1,q1,...,p3,q3)`
/// coordinates, together with the embedding of the germ's own coordinates.
#[derive(Debug, Clone)]
pub struct SceneRecord {
    pub branches: Vec<SceneBranch>,
    /// Index of the singular branch.
    pub singular: usize,
    /// Scene coordinate index realizing x1, x2, x3.
    pub base_map: [usize; 3],
    /// Scene branch index -> germ branch index.
    pub germ_branch: Vec<usize>,
}

/// Conditions carving sub-variants of a class (conditioned table rows).
#[derive(Debug, Clone, PartialEq)]
pub enum VariantCond {
    Always,
    ModulusNonZero(usize),
    ModulusZero(usize),
    /// moduli[b] != 2 * moduli[a]
    NotTwice { a: usize, b: usize },
    /// moduli[b] == 2 * moduli[a]
    Twice { a: usize, b: usize },
}

#[derive(Debug, Clone)]
pub struct Variant {
    pub name: String,
    pub cond: VariantCond,
}

/// Lemma-level constraint on a modulus of a class.
#[derive(Debug, Clone)]
pub struct ModulusConstraint {
    pub idx: usize,
    pub nonzero: bool,
    pub forbidden: Vec<Q>,
}

#[derive(Debug, Clone)]
pub struct ClassRecord {
    pub label: String,
    pub display: String,
    pub min_two_n: usize,
    /// Whether the table writes a +- on the head coefficient.
    pub has_sign: bool,
    /// Sparse closed-coordinate pattern; the head is the first entry.
    pub head: Option<usize>,
    pub pattern: Vec<(usize, PatternEntry)>,
    pub moduli_count: usize,
    pub constraints: Vec<ModulusConstraint>,
    /// Standard-part wedge pairs of the realizing symplectic form (pairs of
    /// zero-based ambient coordinates on R^6).
    pub tail: Vec<(usize, usize)>,
    pub scene: SceneRecord,
    pub variants: Vec<Variant>,
}

impl ClassRecord {
    /// Closed coordinates of the normal form at given moduli and head sign.
    pub fn normal_form_coords(&self, closed_dim: usize, moduli: &[Q], sign: i8) -> Vec<Q> {
        assert_eq!(moduli.len(), self.moduli_count);
        let mut c = vec![Q::zero(); closed_dim];
        let head_val = if sign < 0 { -Q::one() } else { Q::one() };
        if let Some(h) = self.head {
            c[h] = head_val.clone();
        }
        for (i, e) in &self.pattern {
            match e {
                PatternEntry::Fixed(r) => c[*i] = r * &head_val,
                PatternEntry::Modulus(k) => c[*i] = moduli[*k].clone(),
            }
        }
        c
    }

    /// Realizing symplectic 2-form on R^6 for the class at given moduli.
    pub fn realizing_form(&self, space: &RestrictionSpace, moduli: &[Q], sign: i8) -> DiffForm {
        let closed = space.closed_indices();
        let coords = self.normal_form_coords(closed.len(), moduli, sign);
        let mut f = DiffForm::zero(6, 2);
        for (k, &bi) in closed.iter().enumerate() {
            if coords[k].is_zero() {
                continue;
            }
            for (mask, p) in space.basis[bi].form.terms() {
                f.add_term(*mask, p.remap(6, &[0, 1, 2]).scale(&coords[k]));
            }
        }
        for &(i, j) in &self.tail {
            let mut t = DiffForm::zero(6, 2);
            t.add_term((1 << i) | (1 << j), Polynomial::one(6));
            f = f.add(&t);
        }
        f
    }

    /// Draw generic rational moduli respecting the class constraints and a
    /// variant condition.
    pub fn draw_moduli<R: Rng>(&self, rng: &mut R, variant: &VariantCond) -> Vec<Q> {
        let mut m: Vec<Q>;
        'outer: loop {
            m = (0..self.moduli_count)
                .map(|_| q(rng.gen_range(-6..=6), rng.gen_range(1..=3)))
                .collect();
            for c in &self.constraints {
                if c.nonzero && m[c.idx].is_zero() {
                    continue 'outer;
                }
                if c.forbidden.contains(&m[c.idx]) {
                    continue 'outer;
                }
            }
            match variant {
                VariantCond::Always => {}
                VariantCond::ModulusNonZero(i) => {
                    if m[*i].is_zero() {
                        continue 'outer;
                    }
                }
                VariantCond::ModulusZero(i) => m[*i] = Q::zero(),
                VariantCond::NotTwice { a, b } => {
                    if m[*b] == &m[*a] * &qi(2) {
                        continue 'outer;
                    }
                }
                VariantCond::Twice { a, b } => {
                    let v = &m[*a] * &qi(2);
                    m[*b] = v;
                }
            }
            return m;
        }
    }
}

fn var_always() -> Vec<Variant> {
    vec![Variant {
        name: String::new(),
        cond: VariantCond::Always,
    }]
}

fn var_c1_split() -> Vec<Variant> {
    vec![
        Variant {
            name: "c1 != 0".into(),
            cond: VariantCond::ModulusNonZero(0),
        },
        Variant {
            name: "c1 = 0".into(),
            cond: VariantCond::ModulusZero(0),
        },
    ]
}

// ---------------------------------------------------------------------------
// the three families
// ---------------------------------------------------------------------------

fn pe_mod(i: usize, k: usize) -> (usize, PatternEntry) {
    (i, PatternEntry::Modulus(k))
}

fn pe_fix(i: usize, num: i64, den: i64) -> (usize, PatternEntry) {
    (i, PatternEntry::Fixed(q(num, den)))
}

#[rustfmt::skip]
fn u7_classes() -> Vec<ClassRecord> {
    let b1_axis_p2: [TComp; 6] = [vec![], vec![], vec![(1, cc(1, 1))], vec![], vec![], vec![]];
    let tail_a = vec![(1, 3), (4, 5)];
    let tail_b = vec![(0, 3), (4, 5)];
    let tail_c = vec![(2, 3), (4, 5)];
    let tail_d = vec![(0, 3), (1, 4), (2, 5)];
    vec![
        ClassRecord {
            label: "0".into(), display: "(U7)^0".into(), min_two_n: 4, has_sign: false,
            head: Some(0), pattern: vec![pe_mod(1, 0), pe_mod(2, 1)], moduli_count: 2,
            constraints: vec![], tail: tail_a,
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_axis_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: [
                        vec![(4, cc(1, 1))],
                        vec![(3, cc(-1, 1))],
                        vec![(5, cc(1, 1))],
                        vec![(3, cm(0, -1, 1)), (4, cm(1, -1, 1))],
                        vec![], vec![],
                    ]},
                ],
                singular: 1, base_map: [0, 2, 1], germ_branch: vec![0, 1],
            },
            variants: var_c1_split(),
        },
        ClassRecord {
            label: "1".into(), display: "(U7)^1".into(), min_two_n: 4, has_sign: true,
            head: Some(1), pattern: vec![pe_mod(2, 0), pe_mod(3, 1)], moduli_count: 2,
            constraints: vec![], tail: tail_b,
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: [
                        vec![(1, cc(1, 1))], vec![], vec![], vec![(1, cm(0, 1, 1))], vec![], vec![],
                    ]},
                    SceneBranch { label: "B2".into(), comps: [
                        vec![(5, cc(1, 1))],
                        vec![(3, cc(-1, 1))],
                        vec![(4, cc(1, 1))],
                        vec![(5, cm(0, 1, 1)), (6, cm(1, 1, 2))],
                        vec![], vec![],
                    ]},
                ],
                singular: 1, base_map: [2, 0, 1], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "2".into(), display: "(U7)^2".into(), min_two_n: 4, has_sign: false,
            head: Some(2), pattern: vec![pe_mod(3, 0), pe_mod(4, 1)], moduli_count: 2,
            constraints: vec![], tail: tail_c,
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: [
                        vec![], vec![(1, cc(1, 1))], vec![], vec![], vec![], vec![],
                    ]},
                    SceneBranch { label: "B2".into(), comps: [
                        vec![(4, cc(1, 1))],
                        vec![(5, cc(1, 1))],
                        vec![(7, cm(0, -1, 1)), (8, cm(1, 1, 2))],
                        vec![(3, cc(-1, 1))],
                        vec![], vec![],
                    ]},
                ],
                singular: 1, base_map: [0, 1, 3], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "3".into(), display: "(U7)^3".into(), min_two_n: 6, has_sign: true,
            head: Some(3), pattern: vec![pe_mod(4, 0)], moduli_count: 1,
            constraints: vec![], tail: tail_d.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_axis_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: [
                        vec![(4, cc(1, 1))],
                        vec![(7, cm(0, -1, 1))],
                        vec![(5, cc(1, 1))],
                        vec![],
                        vec![(3, cc(-1, 1))],
                        vec![(7, cc(1, 1))],
                    ]},
                ],
                singular: 1, base_map: [0, 2, 4], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "4".into(), display: "(U7)^4".into(), min_two_n: 6, has_sign: false,
            head: Some(4), pattern: vec![pe_mod(5, 0)], moduli_count: 1,
            constraints: vec![], tail: tail_d.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_axis_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: [
                        vec![(4, cc(1, 1))],
                        vec![(9, cm(0, -1, 3))],
                        vec![(5, cc(1, 1))],
                        vec![],
                        vec![(3, cc(-1, 1))],
                        vec![(8, cc(-1, 2))],
                    ]},
                ],
                singular: 1, base_map: [0, 2, 4], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "5".into(), display: "(U7)^5".into(), min_two_n: 6, has_sign: false,
            head: Some(5), pattern: vec![pe_mod(6, 0)], moduli_count: 1,
            constraints: vec![], tail: tail_d.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_axis_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: [
                        vec![(4, cc(1, 1))],
                        vec![(10, cm(0, -1, 2))],
                        vec![(5, cc(1, 1))],
                        vec![],
                        vec![(3, cc(-1, 1))],
                        vec![(10, cc(-1, 1))],
                    ]},
                ],
                singular: 1, base_map: [0, 2, 4], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "6".into(), display: "(U7)^6".into(), min_two_n: 6, has_sign: true,
            head: Some(6), pattern: vec![], moduli_count: 0,
            constraints: vec![], tail: tail_d.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_axis_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: [
                        vec![(4, cc(1, 1))],
                        vec![],
                        vec![(5, cc(1, 1))],
                        vec![],
                        vec![(3, cc(-1, 1))],
                        vec![(11, cc(1, 2))],
                    ]},
                ],
                singular: 1, base_map: [0, 2, 4], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "7".into(), display: "(U7)^7".into(), min_two_n: 6, has_sign: false,
            head: None, pattern: vec![], moduli_count: 0,
            constraints: vec![], tail: tail_d,
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_axis_p2 },
                    SceneBranch { label: "B2".into(), comps: [
                        vec![(4, cc(1, 1))],
                        vec![],
                        vec![(5, cc(1, 1))],
                        vec![],
                        vec![(3, cc(-1, 1))],
                        vec![],
                    ]},
                ],
                singular: 1, base_map: [0, 2, 4], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
    ]
}

#[rustfmt::skip]
fn u8_classes() -> Vec<ClassRecord> {
    let tail_a = vec![(1, 3), (4, 5)];
    let tail_b = vec![(0, 3), (4, 5)];
    let tail_c = vec![(2, 3), (4, 5)];
    let tail_d = vec![(0, 3), (1, 4), (2, 5)];
    let b1_p2: [TComp; 6] = [vec![], vec![], vec![(1, cc(1, 1))], vec![], vec![], vec![]];
    let b2_p3: [TComp; 6] = [vec![], vec![], vec![], vec![], vec![(1, cc(1, 1))], vec![]];
    let b3_sing = |q3: TComp, q1: TComp| -> [TComp; 6] {
        [
            vec![(3, cc(1, 1))],
            q1,
            vec![(4, cc(-1, 1))],
            vec![],
            vec![(2, cc(1, 1))],
            q3,
        ]
    };
    vec![
        ClassRecord {
            label: "0".into(), display: "(U8)^0".into(), min_two_n: 4, has_sign: false,
            head: Some(0), pattern: vec![pe_mod(1, 0), pe_mod(2, 1)], moduli_count: 2,
            constraints: vec![], tail: tail_a,
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: [
                        vec![], vec![(1, cc(1, 1))], vec![], vec![(1, cm(0, 1, 1))], vec![], vec![],
                    ]},
                    SceneBranch { label: "B3".into(), comps: [
                        vec![(3, cc(1, 1))],
                        vec![(2, cc(1, 1))],
                        vec![(4, cc(-1, 1))],
                        vec![(2, cm(0, 1, 1)), (3, cm(1, -1, 1))],
                        vec![], vec![],
                    ]},
                ],
                singular: 2, base_map: [0, 2, 1], germ_branch: vec![0, 1, 2],
            },
            variants: var_c1_split(),
        },
        ClassRecord {
            label: "1".into(), display: "(U8)^1".into(), min_two_n: 4, has_sign: true,
            head: Some(1), pattern: vec![pe_mod(2, 0), pe_mod(3, 1)], moduli_count: 2,
            constraints: vec![], tail: tail_b,
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: [
                        vec![], vec![(1, cm(0, 1, 1))], vec![(1, cc(1, 1))], vec![], vec![], vec![],
                    ]},
                    SceneBranch { label: "B2".into(), comps: [
                        vec![], vec![(2, cm(1, 1, 2))], vec![], vec![(1, cc(1, 1))], vec![], vec![],
                    ]},
                    SceneBranch { label: "B3".into(), comps: [
                        vec![(3, cc(1, 1))],
                        vec![(4, cm2(1, 1, 2, 0, -1, 1))],
                        vec![(4, cc(-1, 1))],
                        vec![(2, cc(1, 1))],
                        vec![], vec![],
                    ]},
                ],
                singular: 2, base_map: [0, 2, 3], germ_branch: vec![0, 1, 2],
            },
            variants: vec![
                Variant { name: "c2 != 2c1".into(), cond: VariantCond::NotTwice { a: 0, b: 1 } },
                Variant { name: "c2 = 2c1".into(), cond: VariantCond::Twice { a: 0, b: 1 } },
            ],
        },
        ClassRecord {
            label: "2".into(), display: "(U8)^2".into(), min_two_n: 4, has_sign: false,
            head: Some(2), pattern: vec![pe_mod(3, 0), pe_mod(4, 1)], moduli_count: 2,
            constraints: vec![ModulusConstraint { idx: 0, nonzero: false, forbidden: vec![qi(2), q(-1, 3)] }],
            tail: tail_c.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: [
                        vec![], vec![(1, cc(1, 1))], vec![], vec![], vec![], vec![],
                    ]},
                    SceneBranch { label: "B2".into(), comps: [
                        vec![], vec![], vec![], vec![(1, cc(1, 1))], vec![], vec![],
                    ]},
                    SceneBranch { label: "B3".into(), comps: [
                        vec![(3, cc(1, 1))],
                        vec![(4, cc(-1, 1))],
                        vec![(5, cm(0, 1, 1)), (6, cm(1, 1, 2))],
                        vec![(2, cc(1, 1))],
                        vec![], vec![],
                    ]},
                ],
                singular: 2, base_map: [0, 1, 3], germ_branch: vec![0, 1, 2],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "3,0_5".into(), display: "(U8)^{3,0}_5".into(), min_two_n: 4, has_sign: false,
            head: Some(2), pattern: vec![pe_fix(3, -1, 3), pe_mod(4, 0), pe_mod(5, 1)], moduli_count: 2,
            constraints: vec![], tail: tail_c.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: [
                        vec![], vec![(1, cc(1, 1))], vec![], vec![], vec![], vec![],
                    ]},
                    SceneBranch { label: "B2".into(), comps: [
                        vec![], vec![], vec![], vec![(1, cc(1, 1))], vec![], vec![],
                    ]},
                    SceneBranch { label: "B3".into(), comps: [
                        vec![(3, cc(1, 1))],
                        vec![(4, cc(-1, 1))],
                        vec![(5, cc(-1, 3)), (6, cm(0, 1, 2)), (7, cm(1, 1, 1))],
                        vec![(2, cc(1, 1))],
                        vec![], vec![],
                    ]},
                ],
                singular: 2, base_map: [0, 1, 3], germ_branch: vec![0, 1, 2],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "3,0_inf".into(), display: "(U8)^{3,0}_inf".into(), min_two_n: 4, has_sign: false,
            head: Some(2), pattern: vec![pe_fix(3, 2, 1), pe_mod(4, 0), pe_mod(6, 1)], moduli_count: 2,
            constraints: vec![], tail: tail_c,
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: [
                        vec![], vec![(1, cc(1, 1))], vec![], vec![], vec![], vec![],
                    ]},
                    SceneBranch { label: "B2".into(), comps: [
                        vec![], vec![], vec![], vec![(1, cc(1, 1))], vec![], vec![],
                    ]},
                    SceneBranch { label: "B3".into(), comps: [
                        vec![(3, cc(1, 1))],
                        vec![(4, cc(-1, 1))],
                        vec![(5, cc(2, 1)), (6, cm(0, 1, 2)), (8, cm(1, 1, 2))],
                        vec![(2, cc(1, 1))],
                        vec![], vec![],
                    ]},
                ],
                singular: 2, base_map: [0, 1, 3], germ_branch: vec![0, 1, 2],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "3,1".into(), display: "(U8)^{3,1}".into(), min_two_n: 6, has_sign: false,
            head: Some(3), pattern: vec![pe_mod(4, 0)], moduli_count: 1,
            constraints: vec![], tail: tail_d.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: b2_p3.clone() },
                    SceneBranch { label: "B3".into(), comps: b3_sing(
                        vec![(5, cc(-1, 1)), (6, cm(0, -1, 2))], vec![],
                    )},
                ],
                singular: 2, base_map: [0, 2, 4], germ_branch: vec![0, 1, 2],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "4".into(), display: "(U8)^4".into(), min_two_n: 6, has_sign: true,
            head: Some(4), pattern: vec![pe_mod(5, 0)], moduli_count: 1,
            constraints: vec![], tail: tail_d.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: b2_p3.clone() },
                    SceneBranch { label: "B3".into(), comps: b3_sing(
                        vec![(7, cm(0, -1, 1))], vec![(5, cc(1, 1))],
                    )},
                ],
                singular: 2, base_map: [0, 2, 4], germ_branch: vec![0, 1, 2],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "5".into(), display: "(U8)^5".into(), min_two_n: 6, has_sign: false,
            head: Some(5), pattern: vec![pe_mod(6, 0)], moduli_count: 1,
            constraints: vec![], tail: tail_d.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: b2_p3.clone() },
                    SceneBranch { label: "B3".into(), comps: b3_sing(
                        vec![(7, cc(-1, 1)), (8, cm(0, -1, 2))], vec![],
                    )},
                ],
                singular: 2, base_map: [0, 2, 4], germ_branch: vec![0, 1, 2],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "6".into(), display: "(U8)^6".into(), min_two_n: 6, has_sign: true,
            head: Some(6), pattern: vec![pe_mod(7, 0)], moduli_count: 1,
            constraints: vec![], tail: tail_d.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: b2_p3.clone() },
                    SceneBranch { label: "B3".into(), comps: b3_sing(
                        vec![(8, cc(-1, 2)), (9, cm(0, 1, 1))], vec![],
                    )},
                ],
                singular: 2, base_map: [0, 2, 4], germ_branch: vec![0, 1, 2],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "7".into(), display: "(U8)^7".into(), min_two_n: 6, has_sign: false,
            head: Some(7), pattern: vec![], moduli_count: 0,
            constraints: vec![], tail: tail_d.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: b2_p3.clone() },
                    SceneBranch { label: "B3".into(), comps: b3_sing(vec![(9, cc(-1, 1))], vec![]) },
                ],
                singular: 2, base_map: [0, 2, 4], germ_branch: vec![0, 1, 2],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "8".into(), display: "(U8)^8".into(), min_two_n: 6, has_sign: false,
            head: None, pattern: vec![], moduli_count: 0,
            constraints: vec![], tail: tail_d,
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_p2 },
                    SceneBranch { label: "B2".into(), comps: b2_p3 },
                    SceneBranch { label: "B3".into(), comps: b3_sing(vec![], vec![]) },
                ],
                singular: 2, base_map: [0, 2, 4], germ_branch: vec![0, 1, 2],
            },
            variants: var_always(),
        },
    ]
}

#[rustfmt::skip]
fn u9_classes() -> Vec<ClassRecord> {
    let tail_a = vec![(1, 3), (4, 5)];
    let tail_b = vec![(0, 3), (4, 5)];
    let tail_c = vec![(2, 3), (4, 5)];
    let tail_d = vec![(0, 3), (1, 4), (2, 5)];
    let b1_p2: [TComp; 6] = [vec![], vec![], vec![(1, cc(1, 1))], vec![], vec![], vec![]];
    let b2_sing = |q3: TComp| -> [TComp; 6] {
        [
            vec![(5, cc(1, 1))],
            vec![],
            vec![(7, cc(-1, 1))],
            vec![],
            vec![(3, cc(1, 1))],
            q3,
        ]
    };
    vec![
        ClassRecord {
            label: "0".into(), display: "(U9)^0".into(), min_two_n: 4, has_sign: true,
            head: Some(0), pattern: vec![pe_mod(1, 0), pe_mod(2, 1)], moduli_count: 2,
            constraints: vec![], tail: tail_a,
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: [
                        vec![(5, cc(1, 1))],
                        vec![(3, cc(1, 1))],
                        vec![(7, cc(-1, 1))],
                        vec![(3, cm(0, 1, 1)), (5, cm(1, -1, 1))],
                        vec![], vec![],
                    ]},
                ],
                singular: 1, base_map: [0, 2, 1], germ_branch: vec![0, 1],
            },
            variants: var_c1_split(),
        },
        ClassRecord {
            label: "1".into(), display: "(U9)^1".into(), min_two_n: 4, has_sign: true,
            head: Some(1), pattern: vec![pe_mod(2, 0), pe_mod(3, 1), pe_mod(5, 2)], moduli_count: 3,
            constraints: vec![], tail: tail_b,
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: [
                        vec![(1, cc(1, 1))], vec![], vec![], vec![(1, cm(0, 1, 1))], vec![], vec![],
                    ]},
                    SceneBranch { label: "B2".into(), comps: [
                        vec![(7, cc(-1, 1))],
                        vec![(3, cc(1, 1))],
                        vec![(5, cc(1, 1))],
                        vec![(7, cm(0, -1, 1)), (6, cm(1, 1, 2)), (9, cm(2, 1, 3))],
                        vec![], vec![],
                    ]},
                ],
                singular: 1, base_map: [2, 0, 1], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "2".into(), display: "(U9)^2".into(), min_two_n: 4, has_sign: true,
            head: Some(2), pattern: vec![pe_mod(3, 0), pe_mod(4, 1)], moduli_count: 2,
            constraints: vec![ModulusConstraint { idx: 0, nonzero: true, forbidden: vec![] }],
            tail: tail_c.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: [
                        vec![], vec![(1, cc(1, 1))], vec![], vec![], vec![], vec![],
                    ]},
                    SceneBranch { label: "B2".into(), comps: [
                        vec![(5, cc(1, 1))],
                        vec![(7, cc(-1, 1))],
                        vec![(8, cm(0, 1, 1)), (10, cm(1, 1, 2))],
                        vec![(3, cc(1, 1))],
                        vec![], vec![],
                    ]},
                ],
                singular: 1, base_map: [0, 1, 3], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "3,0".into(), display: "(U9)^{3,0}".into(), min_two_n: 4, has_sign: true,
            head: Some(2), pattern: vec![pe_mod(4, 0), pe_mod(5, 1)], moduli_count: 2,
            constraints: vec![ModulusConstraint { idx: 0, nonzero: true, forbidden: vec![] }],
            tail: tail_c.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: [
                        vec![], vec![(1, cc(1, 1))], vec![], vec![], vec![], vec![],
                    ]},
                    SceneBranch { label: "B2".into(), comps: [
                        vec![(5, cc(1, 1))],
                        vec![(7, cc(-1, 1))],
                        vec![(10, cm(0, 1, 2)), (11, cm(1, 1, 1))],
                        vec![(3, cc(1, 1))],
                        vec![], vec![],
                    ]},
                ],
                singular: 1, base_map: [0, 1, 3], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "4,0".into(), display: "(U9)^{4,0}".into(), min_two_n: 4, has_sign: true,
            head: Some(2), pattern: vec![pe_mod(5, 0), pe_mod(6, 1)], moduli_count: 2,
            constraints: vec![], tail: tail_c,
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: [
                        vec![], vec![(1, cc(1, 1))], vec![], vec![], vec![], vec![],
                    ]},
                    SceneBranch { label: "B2".into(), comps: [
                        vec![(5, cc(1, 1))],
                        vec![(7, cc(-1, 1))],
                        vec![(11, cm(0, 1, 1)), (13, cm(1, 1, 2))],
                        vec![(3, cc(1, 1))],
                        vec![], vec![],
                    ]},
                ],
                singular: 1, base_map: [0, 1, 3], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "3,1".into(), display: "(U9)^{3,1}".into(), min_two_n: 6, has_sign: false,
            head: Some(3), pattern: vec![pe_mod(4, 0)], moduli_count: 1,
            constraints: vec![], tail: tail_d.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: b2_sing(
                        vec![(8, cc(-1, 1)), (10, cm(0, -1, 2))],
                    )},
                ],
                singular: 1, base_map: [0, 2, 4], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "4,1".into(), display: "(U9)^{4,1}".into(), min_two_n: 6, has_sign: false,
            head: Some(4), pattern: vec![pe_mod(5, 0), pe_mod(7, 1)], moduli_count: 2,
            constraints: vec![], tail: tail_d.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: b2_sing(
                        vec![(10, cc(-1, 2)), (11, cm(0, -1, 1)), (14, cm(1, -1, 1))],
                    )},
                ],
                singular: 1, base_map: [0, 2, 4], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "5".into(), display: "(U9)^5".into(), min_two_n: 6, has_sign: true,
            head: Some(5), pattern: vec![pe_mod(6, 0)], moduli_count: 1,
            constraints: vec![], tail: tail_d.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: b2_sing(
                        vec![(11, cc(-1, 1)), (13, cm(0, -1, 2))],
                    )},
                ],
                singular: 1, base_map: [0, 2, 4], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "6".into(), display: "(U9)^6".into(), min_two_n: 6, has_sign: true,
            head: Some(6), pattern: vec![pe_mod(7, 0)], moduli_count: 1,
            constraints: vec![], tail: tail_d.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: b2_sing(
                        vec![(13, cc(-1, 2)), (14, cm(0, -1, 1))],
                    )},
                ],
                singular: 1, base_map: [0, 2, 4], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "7".into(), display: "(U9)^7".into(), min_two_n: 6, has_sign: false,
            head: Some(7), pattern: vec![pe_mod(8, 0)], moduli_count: 1,
            constraints: vec![], tail: tail_d.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: b2_sing(
                        vec![(14, cc(-1, 1)), (16, cm(0, -1, 2))],
                    )},
                ],
                singular: 1, base_map: [0, 2, 4], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "8".into(), display: "(U9)^8".into(), min_two_n: 6, has_sign: false,
            head: Some(8), pattern: vec![], moduli_count: 0,
            constraints: vec![], tail: tail_d.clone(),
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_p2.clone() },
                    SceneBranch { label: "B2".into(), comps: b2_sing(vec![(16, cc(-1, 2))]) },
                ],
                singular: 1, base_map: [0, 2, 4], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
        ClassRecord {
            label: "9".into(), display: "(U9)^9".into(), min_two_n: 6, has_sign: false,
            head: None, pattern: vec![], moduli_count: 0,
            constraints: vec![], tail: tail_d,
            scene: SceneRecord {
                branches: vec![
                    SceneBranch { label: "B1".into(), comps: b1_p2 },
                    SceneBranch { label: "B2".into(), comps: b2_sing(vec![]) },
                ],
                singular: 1, base_map: [0, 2, 4], germ_branch: vec![0, 1],
            },
            variants: var_always(),
        },
    ]
}

// ---------------------------------------------------------------------------
// family records and load checks
// ---------------------------------------------------------------------------

pub struct FamilyRecord {
    pub family: Family,
    pub germ: CurveGerm,
    pub space: RestrictionSpace,
    pub action: ActionTable,
    pub classes: Vec<ClassRecord>,
    /// Names of the fields with nonzero action, as the proofs list them.
    pub nontrivial_field_names: Vec<&'static str>,
}

pub struct Catalog {
    pub u7: FamilyRecord,
    pub u8: FamilyRecord,
    pub u9: FamilyRecord,
}

impl Catalog {
    pub fn family(&self, f: Family) -> &FamilyRecord {
        match f {
            Family::U7 => &self.u7,
            Family::U8 => &self.u8,
            Family::U9 => &self.u9,
        }
    }
}

pub fn parse_family(s: &str) -> Option<Family> {
    match s.to_ascii_uppercase().as_str() {
        "U7" => Some(Family::U7),
        "U8" => Some(Family::U8),
        "U9" => Some(Family::U9),
        _ => None,
    }
}

/// Load one family with all its load-time checks.
pub fn load_family(family: Family) -> Result<FamilyRecord> {
    let (germ, basis, classes, nontrivial) = match family {
        Family::U7 => (
            u7_germ()?,
            u7_basis(),
            u7_classes(),
            vec!["E", "x3*E", "x1*E", "x2*E", "x3^2*E", "x1*x3*E"],
        ),
        Family::U8 => (
            u8_germ()?,
            u8_basis(),
            u8_classes(),
            vec![
                "E", "x3*E", "x1*E", "x3^2*E", "x2*E", "x1*x3*E", "x3^3*E", "x2*x3*E", "x1^2*E",
            ],
        ),
        Family::U9 => (
            u9_germ()?,
            u9_basis(),
            u9_classes(),
            vec![
                "E", "x3*E", "x1*E", "x3^2*E", "x2*E", "x1*x3*E", "x3^3*E", "x1*x3^2*E",
            ],
        ),
    };
    let space = build_space_with_basis(&germ, DEFAULT_DEGREE_BOUND, basis)?;
    let action = build_action_table(&space)?;

    // the fields with nonzero action must be exactly the stated list
    let vars = ["x1", "x2", "x3"];
    let nontrivial_computed: Vec<String> = action
        .nontrivial_fields()
        .into_iter()
        .map(|i| action.fields[i].name(&vars))
        .collect();
    let mut want: Vec<String> = nontrivial.iter().map(|s| s.to_string()).collect();
    let mut got = nontrivial_computed.clone();
    want.sort();
    got.sort();
    if want != got {
        return Err(EngineError::LoadCheck {
            identity: format!("{} tangent-field list", family.name()),
            reason: format!("nontrivial actions {:?}, expected {:?}", got, want),
        });
    }

    // discrete symmetry: the weight scaling at t = -1 must preserve the
    // equations and act on the closed basis by (-1)^degree
    check_sign_symmetry(&germ, &space)?;

    let record = FamilyRecord {
        family,
        germ,
        space,
        action,
        classes,
        nontrivial_field_names: nontrivial,
    };

    // per-class checks at deterministic moduli
    let mut rng = crate::seeded_rng(0xCA7A106);
    for class in &record.classes {
        check_class(&record, class, &mut rng)?;
    }
    Ok(record)
}

/// Load the whole catalog.
pub fn load_catalog() -> Result<Catalog> {
    Ok(Catalog {
        u7: load_family(Family::U7)?,
        u8: load_family(Family::U8)?,
        u9: load_family(Family::U9)?,
    })
}

fn check_sign_symmetry(germ: &CurveGerm, space: &RestrictionSpace) -> Result<()> {
    let m = germ.nvars();
    // x_i -> (-1)^(w_i) x_i
    let sign_map = PolyMap::new(
        m,
        (0..m)
            .map(|i| {
                let s = if germ.weights.0[i] % 2 == 0 {
                    Q::one()
                } else {
                    -Q::one()
                };
                Polynomial::var(m, i).scale(&s)
            })
            .collect(),
    );
    for eq in &germ.equations {
        let mapped = eq.substitute(&sign_map.comps);
        if !germ.vanishes_on_germ(&mapped) {
            return Err(EngineError::LoadCheck {
                identity: format!("{} sign symmetry", germ.name),
                reason: "symmetry does not preserve the defining ideal".into(),
            });
        }
    }
    for b in &space.basis {
        let pulled = pullback(&sign_map, &b.form)?;
        let expect = if b.delta % 2 == 0 {
            b.form.clone()
        } else {
            b.form.scale(&-Q::one())
        };
        if pulled != expect {
            return Err(EngineError::LoadCheck {
                identity: format!("{} sign symmetry on {}", germ.name, b.name),
                reason: "action is not (-1)^degree".into(),
            });
        }
    }
    Ok(())
}

fn check_class<R: Rng>(rec: &FamilyRecord, class: &ClassRecord, rng: &mut R) -> Result<()> {
    let k = rec.space.closed_dim();
    let moduli = class.draw_moduli(rng, &VariantCond::Always);
    let nf = class.normal_form_coords(k, &moduli, 1);

    // the decision tree maps the normal form back to its own label
    let (label, _, _) = crate::classify::reduce(&rec.action, rec.family, &nf)?;
    if label.label != class.label {
        return Err(EngineError::LoadCheck {
            identity: format!("{} class {}", rec.family.name(), class.label),
            reason: format!("normal form classifies as {}", label.label),
        });
    }

    // realizing form: closed, nondegenerate at 0, restricts to the pattern
    let omega = class.realizing_form(&rec.space, &moduli, 1);
    if !exterior_d(&omega)?.is_zero() {
        return Err(EngineError::LoadCheck {
            identity: format!("{} realizing form {}", rec.family.name(), class.label),
            reason: "not closed".into(),
        });
    }
    let m0 = omega.matrix_at_origin();
    let rows: Vec<Vec<Q>> = m0.clone();
    if crate::linalg::span_dim(&rows) != 6 {
        return Err(EngineError::LoadCheck {
            identity: format!("{} realizing form {}", rec.family.name(), class.label),
            reason: "degenerate at the origin".into(),
        });
    }
    let a = rec.space.restrict(&rewrite_to_effective(&omega, 3))?;
    let cc = rec.space.closed_coords(&a)?;
    if cc != nf {
        return Err(EngineError::LoadCheck {
            identity: format!("{} realizing form {}", rec.family.name(), class.label),
            reason: "restriction differs from the stored normal form".into(),
        });
    }

    // scene: branches must embed the germ branches through the base map
    let branches: Vec<Branch> = class
        .scene
        .branches
        .iter()
        .map(|b| b.instantiate(&moduli))
        .collect();
    for (si, b) in branches.iter().enumerate() {
        let base: Vec<Polynomial> = class
            .scene
            .base_map
            .iter()
            .map(|&ci| b.map.comps[ci].clone())
            .collect();
        let base_branch = Branch::new(b.label.clone(), base);
        if !rec.germ.verify_branch(&base_branch) {
            return Err(EngineError::LoadCheck {
                identity: format!(
                    "{} class {} scene branch {}",
                    rec.family.name(),
                    class.label,
                    b.label
                ),
                reason: "base part does not satisfy the defining equations".into(),
            });
        }
        let _ = si;
    }
    // graph coordinates must be expressible in the base coordinates
    // consistently across all branches
    scene_graphs(rec, class, &branches)?;
    Ok(())
}

/// Solve for the graph polynomials expressing every non-base scene
/// coordinate as a polynomial in the base coordinates along all branches.
/// Returns pairs `(scene coordinate, graph polynomial in x1..x3)`.
pub fn scene_graphs(
    rec: &FamilyRecord,
    class: &ClassRecord,
    branches: &[Branch],
) -> Result<Vec<(usize, Polynomial)>> {
    let base = &class.scene.base_map;
    let mut out = Vec::new();
    for coord in 0..6usize {
        if base.contains(&coord) {
            continue;
        }
        let targets: Vec<Polynomial> =
            branches.iter().map(|b| b.map.comps[coord].clone()).collect();
        let max_deg = targets
            .iter()
            .filter_map(|p| p.t_degree())
            .max()
            .unwrap_or(0) as i64;
        // candidate monomials in the base variables, by germ quasi-degree
        let mut cand: Vec<Monomial> = Vec::new();
        for delta in 1..=max_deg {
            cand.extend(monomials_of_quasi_degree(&rec.germ.weights, delta));
        }
        if cand.is_empty() {
            if targets.iter().any(|p| !p.is_zero()) {
                return Err(EngineError::LoadCheck {
                    identity: format!(
                        "{} class {} scene coordinate {}",
                        rec.family.name(),
                        class.label,
                        coord + 1
                    ),
                    reason: "no candidate graph monomials".into(),
                });
            }
            out.push((coord, Polynomial::zero(3)));
            continue;
        }
        // rows: t-coefficients across branches
        let mut rows: Vec<Vec<Q>> = Vec::new();
        let mut rhs: Vec<Q> = Vec::new();
        for (bi, b) in branches.iter().enumerate() {
            let base_comps: Vec<Polynomial> =
                base.iter().map(|&ci| b.map.comps[ci].clone()).collect();
            let pulled: Vec<Polynomial> = cand
                .iter()
                .map(|m| {
                    Polynomial::monomial(3, m.clone(), Q::one()).substitute(&base_comps)
                })
                .collect();
            let tmax = pulled
                .iter()
                .chain(std::iter::once(&targets[bi]))
                .filter_map(|p| p.t_degree())
                .max()
                .unwrap_or(0);
            for kpow in 0..=tmax {
                let row: Vec<Q> = pulled.iter().map(|p| p.t_coeff(kpow)).collect();
                let r = targets[bi].t_coeff(kpow);
                if row.iter().any(|v| !v.is_zero()) || !r.is_zero() {
                    rows.push(row);
                    rhs.push(r);
                }
            }
        }
        if rows.is_empty() {
            out.push((coord, Polynomial::zero(3)));
            continue;
        }
        let mat = Mat::from_rows(rows);
        match solve_linear(&mat, &rhs) {
            Solve::Solution { particular, .. } => {
                let mut g = Polynomial::zero(3);
                for (m, c) in cand.iter().zip(particular) {
                    g.add_term(m.clone(), c);
                }
                out.push((coord, g));
            }
            Solve::Infeasible => {
                return Err(EngineError::LoadCheck {
                    identity: format!(
                        "{} class {} scene coordinate {}",
                        rec.family.name(),
                        class.label,
                        coord + 1
                    ),
                    reason: "graph polynomial does not exist".into(),
                })
            }
        }
    }
    Ok(out)
}

/// The shear moving the scene onto the standard germ, as the inverse map
/// suitable for pulling the canonical symplectic form back to the germ's
/// own coordinates: `(x1,x2,x3,u4,u5,u6) -> scene point`.
pub fn scene_straightening_inverse(
    class: &ClassRecord,
    graphs: &[(usize, Polynomial)],
) -> PolyMap {
    let base = &class.scene.base_map;
    let mut comps = vec![Polynomial::zero(6); 6];
    for (xi, &ci) in base.iter().enumerate() {
        comps[ci] = Polynomial::var(6, xi);
    }
    for (slot, (coord, g)) in graphs.iter().enumerate() {
        let u = Polynomial::var(6, 3 + slot);
        comps[*coord] = &u + &g.remap(6, &[0, 1, 2]);
    }
    PolyMap::new(6, comps)
}

/// Standard symplectic form `sum dp_i ^ dq_i` on R^6 with coordinates
/// `(p1,q1,p2,q2,p3,q3)`.
pub fn omega0_six() -> DiffForm {
    let mut f = DiffForm::zero(6, 2);
    for i in 0..3 {
        f.add_term((1 << (2 * i)) | (1 << (2 * i + 1)), Polynomial::one(6));
    }
    f
}

// ---------------------------------------------------------------------------
// golden data
// ---------------------------------------------------------------------------

/// `inf`-or-value cells of the golden tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(i64),
    Text(String),
}

impl Cell {
    pub fn infinity() -> Self {
        Cell::Text("inf".into())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Cell::Text(s) if s == "inf")
    }

    pub fn as_finite(&self) -> Option<i64> {
        match self {
            Cell::Num(n) => Some(*n),
            Cell::Text(_) => None,
        }
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Num(n) => write!(f, "{}", n),
            Cell::Text(s) => write!(f, "{}", s),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoldenBasis {
    pub full_dim: usize,
    pub closed_dim: usize,
    pub full_degrees: Vec<i64>,
    pub closed_degrees: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoldenAction {
    /// field name -> per-basis-column coordinate vectors (rational strings)
    pub images: std::collections::BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoldenClassRow {
    pub class: String,
    pub cod: usize,
    pub musym: usize,
    pub ind: Cell,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoldenTangencyRow {
    pub class: String,
    #[serde(default)]
    pub variant: String,
    pub ind: Cell,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ind2: Option<Cell>,
    pub lt: Cell,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2: Option<Cell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l12: Option<Cell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l3: Option<Cell>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoldenGeometryRow {
    pub class: String,
    #[serde(default)]
    pub variant: String,
    pub omega_v_nonzero: bool,
    pub omega_l1l2_nonzero: bool,
    pub ker_eq_l2: bool,
    pub omega_w_zero: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoldenFamily {
    pub family: String,
    pub basis: GoldenBasis,
    pub action: GoldenAction,
    pub classification: Vec<GoldenClassRow>,
    pub tangency: Vec<GoldenTangencyRow>,
    pub geometry: Vec<GoldenGeometryRow>,
}

pub fn golden_json(family: Family) -> &'static str {
    match family {
        Family::U7 => include_str!("../golden/u7.json"),
        Family::U8 => include_str!("../golden/u8.json"),
        Family::U9 => include_str!("../golden/u9.json"),
    }
}

/// Parse the shipped golden data for a family.
pub fn expected_tables(family: Family) -> Result<GoldenFamily> {
    parse_golden(golden_json(family))
}

/// Parse golden data from a string (the negative-control path).
pub fn parse_golden(text: &str) -> Result<GoldenFamily> {
    serde_json::from_str(text).map_err(|e| EngineError::Parse(format!("golden data: {}", e)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_loads() {
        let cat = load_catalog().unwrap();
        assert_eq!(cat.u7.classes.len(), 8);
        assert_eq!(cat.u8.classes.len(), 11);
        assert_eq!(cat.u9.classes.len(), 12);
        assert_eq!(cat.u7.space.closed_dim(), 7);
        assert_eq!(cat.u8.space.closed_dim(), 8);
        assert_eq!(cat.u9.space.closed_dim(), 9);
    }

    #[test]
    fn u7_record_weights_and_branches() {
        let g = u7_germ().unwrap();
        assert_eq!(g.weights.0, vec![4, 5, 3]);
        assert_eq!(g.branches.len(), 2);
    }

    #[test]
    fn u8_scene_branches_match_stored_germ_branches() {
        let rec = load_family(Family::U8).unwrap();
        // derived branch triple of the germ
        let want: Vec<Vec<Polynomial>> = vec![
            vec![tzero(), tpow(1), tzero()],
            vec![tzero(), tzero(), tpow(1)],
            vec![tpow(3), -&tpow(4), tpow(2)],
        ];
        for (b, w) in rec.germ.branches.iter().zip(want) {
            assert_eq!(b.map.comps, w);
        }
    }

    #[test]
    fn golden_files_parse() {
        for f in [Family::U7, Family::U8, Family::U9] {
            let g = expected_tables(f).unwrap();
            assert_eq!(g.family, f.name());
            assert!(!g.classification.is_empty());
            assert!(!g.tangency.is_empty());
            assert!(!g.geometry.is_empty());
        }
    }

    #[test]
    fn corrupted_golden_cell_is_detected_by_parse_plus_compare() {
        let text = golden_json(Family::U7);
        let mut g: GoldenFamily = parse_golden(text).unwrap();
        g.classification[0].cod += 1;
        let orig = expected_tables(Family::U7).unwrap();
        assert_ne!(orig.classification[0].cod, g.classification[0].cod);
    }
}
