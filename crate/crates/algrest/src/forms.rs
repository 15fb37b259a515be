//! Differential forms with polynomial coefficients on a low-dimensional
//! ambient germ: wedge, exterior derivative, interior product, Lie
//! derivative (Cartan formula) and pullback along polynomial maps.
//!
//! Basis blades are bitmasks: bit `i` stands for `dx_{i+1}`. Forms of
//! degree > 3 are outside the engine's scope and are rejected.

use crate::poly::{Monomial, Polynomial, Weights};
use crate::{EngineError, Q, Result};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub const MAX_FORM_DEGREE: u8 = 3;

/// Polynomial-coefficient differential form of a fixed degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffForm {
    nvars: usize,
    degree: u8,
    /// blade mask -> coefficient; zero coefficients are not stored.
    terms: BTreeMap<u8, Polynomial>,
}

fn blade_bits(mask: u8) -> Vec<usize> {
    (0..8).filter(|i| mask >> i & 1 == 1).collect()
}

/// Sign of merging blade `b` into blade `a` (disjoint), i.e. the permutation
/// sign bringing `a|b` into increasing order. Zero overlap is the caller's
/// responsibility.
fn merge_sign(a: u8, b: u8) -> i32 {
    let mut sign = 1;
    let mut rem = b;
    while rem != 0 {
        let i = rem.trailing_zeros() as u8;
        // count bits of `a` above position i
        let higher = (a >> (i + 1)).count_ones();
        if higher % 2 == 1 {
            sign = -sign;
        }
        rem &= rem - 1;
    }
    sign
}

impl DiffForm {
    pub fn zero(nvars: usize, degree: u8) -> Self {
        assert!(nvars <= 8);
        DiffForm {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        let mut f = DiffForm::zero(p.nvars(), 0);
        f.add_term(0, p);
        f
    }

    /// `dx_{i+1}` as a 1-form.
    pub fn dx(nvars: usize, i: usize) -> Self {
        let mut f = DiffForm::zero(nvars, 1);
        f.add_term(1 << i, Polynomial::one(nvars));
        f
    }

    /// `c * m * dx_{i+1} /\ dx_{j+1}` with `i < j`.
    pub fn monomial_two_form(nvars: usize, m: Monomial, c: Q, i: usize, j: usize) -> Self {
        assert!(i < j && j < nvars);
        let mut f = DiffForm::zero(nvars, 2);
        f.add_term((1 << i) | (1 << j), Polynomial::monomial(nvars, m, c));
        f
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u8, &Polynomial)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mask: u8) -> Polynomial {
        self.terms
            .get(&mask)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.nvars))
    }

    pub fn add_term(&mut self, mask: u8, p: Polynomial) {
        assert_eq!(mask.count_ones() as u8, self.degree, "blade/degree mismatch");
        assert_eq!(p.nvars(), self.nvars);
        if p.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mask) {
            Entry::Vacant(v) => {
                v.insert(p);
            }
            Entry::Occupied(mut o) => {
                let s = &*o.get() + &p;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &DiffForm) -> DiffForm {
        assert_eq!(self.degree, other.degree);
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, p) in &other.terms {
            out.add_term(*m, p.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffForm) -> DiffForm {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> DiffForm {
        if c.is_zero() {
            return DiffForm::zero(self.nvars, self.degree);
        }
        DiffForm {
            nvars: self.nvars,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(m, p)| (*m, p.scale(c)))
                .collect(),
        }
    }

    pub fn mul_polynomial(&self, p: &Polynomial) -> DiffForm {
        let mut out = DiffForm::zero(self.nvars, self.degree);
        for (m, c) in &self.terms {
            out.add_term(*m, c * p);
        }
        out
    }

    /// Decompose into quasi-homogeneous components; a blade contributes the
    /// sum of its variables' weights on top of the coefficient degree.
    pub fn graded_components(&self, w: &Weights) -> BTreeMap<i64, DiffForm> {
        let mut out: BTreeMap<i64, DiffForm> = BTreeMap::new();
        for (mask, p) in &self.terms {
            let blade_w: i64 = blade_bits(*mask).iter().map(|&i| w.0[i]).sum();
            for (mono, c) in p.terms() {
                let delta = mono.quasi_degree(w) + blade_w;
                out.entry(delta)
                    .or_insert_with(|| DiffForm::zero(self.nvars, self.degree))
                    .add_term(*mask, Polynomial::monomial(self.nvars, mono.clone(), c.clone()));
            }
        }
        out
    }

    /// Constant part of a 2-form as an antisymmetric matrix at the origin.
    pub fn matrix_at_origin(&self) -> Vec<Vec<Q>> {
        assert_eq!(self.degree, 2);
        let n = self.nvars;
        let mut m = vec![vec![Q::zero(); n]; n];
        for (mask, p) in &self.terms {
            let bits = blade_bits(*mask);
            let (i, j) = (bits[0], bits[1]);
            let c = p.constant_term();
            m[i][j] = c.clone();
            m[j][i] = -c;
        }
        m
    }

    /// Smallest total degree among coefficient terms; `None` if zero.
    pub fn order_at_origin(&self) -> Option<u32> {
        self.terms.values().filter_map(|p| p.order_at_origin()).min()
    }

    pub fn to_string_with(&self, vars: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (mask, p) in &self.terms {
            let blade = blade_bits(*mask)
                .iter()
                .map(|&i| format!("d{}", vars[i]))
                .collect::<Vec<_>>()
                .join("^");
            if blade.is_empty() {
                parts.push(p.to_string_with(vars));
            } else if p.num_terms() == 1 {
                let s = p.to_string_with(vars);
                if s == "1" {
                    parts.push(blade.clone());
                } else if s == "-1" {
                    parts.push(format!("-{}", blade));
                } else {
                    parts.push(format!("{}*{}", s, blade));
                }
            } else {
                parts.push(format!("({})*{}", p.to_string_with(vars), blade));
            }
        }
        parts.join(" + ")
    }
}

impl fmt::Display for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{}", i)).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        write!(f, "{}", self.to_string_with(&refs))
    }
}

/// Graded-antisymmetric wedge product.
pub fn wedge(a: &DiffForm, b: &DiffForm) -> Result<DiffForm> {
    assert_eq!(a.nvars, b.nvars);
    let deg = a.degree + b.degree;
    if deg > MAX_FORM_DEGREE {
        return Err(EngineError::DegreeOverflow(format!(
            "wedge of degrees {} and {} exceeds {}",
            a.degree, b.degree, MAX_FORM_DEGREE
        )));
    }
    let mut out = DiffForm::zero(a.nvars, deg);
    for (ma, pa) in &a.terms {
        for (mb, pb) in &b.terms {
            if ma & mb != 0 {
                continue;
            }
            let sign = merge_sign(*ma, *mb);
            let mut c = pa * pb;
            if sign < 0 {
                c = -&c;
            }
            out.add_term(ma | mb, c);
        }
    }
    Ok(out)
}

/// Exterior derivative; defined here for forms of degree at most 2.
pub fn exterior_d(a: &DiffForm) -> Result<DiffForm> {
    if a.degree > 2 {
        return Err(EngineError::DegreeOverflow(
            "exterior derivative of a form of degree > 2".into(),
        ));
    }
    let mut out = DiffForm::zero(a.nvars, a.degree + 1);
    for (mask, p) in &a.terms {
        for i in 0..a.nvars {
            if mask >> i & 1 == 1 {
                continue;
            }
            let dp = p.partial(i);
            if dp.is_zero() {
                continue;
            }
            let bit = 1u8 << i;
            let sign = merge_sign(bit, *mask); // dx_i first, then blade
            let c = if sign < 0 { -&dp } else { dp };
            out.add_term(bit | mask, c);
        }
    }
    Ok(out)
}

/// Interior product (contraction) with a vector field.
pub fn interior(x: &VectorField, a: &DiffForm) -> DiffForm {
    assert_eq!(x.nvars(), a.nvars);
    if a.degree == 0 {
        return DiffForm::zero(a.nvars, 0);
    }
    let mut out = DiffForm::zero(a.nvars, a.degree - 1);
    for (mask, p) in &a.terms {
        let bits = blade_bits(*mask);
        for (pos, &i) in bits.iter().enumerate() {
            let xi = &x.comps[i];
            if xi.is_zero() {
                continue;
            }
            let mut c = p * xi;
            if pos % 2 == 1 {
                c = -&c;
            }
            out.add_term(mask & !(1 << i), c);
        }
    }
    out
}

/// Lie derivative by the Cartan formula `L_X = d o i_X + i_X o d`.
pub fn lie_derivative(x: &VectorField, a: &DiffForm) -> Result<DiffForm> {
    let d_ix = exterior_d(&interior(x, a))?;
    if a.degree > 2 {
        return Err(EngineError::DegreeOverflow(
            "Lie derivative of a form of degree > 2".into(),
        ));
    }
    let ix_d = interior(x, &exterior_d(a)?);
    Ok(d_ix.add(&ix_d))
}

/// Pullback along a polynomial map; functorial and commutes with `d`.
pub fn pullback(f: &PolyMap, a: &DiffForm) -> Result<DiffForm> {
    assert_eq!(f.target_nvars(), a.nvars);
    let src = f.src_nvars;
    let mut out = DiffForm::zero(src, a.degree);
    for (mask, p) in &a.terms {
        let coeff = p.substitute(&f.comps);
        if coeff.is_zero() {
            continue;
        }
        let mut acc = DiffForm::from_polynomial(coeff);
        let mut dead = false;
        for i in blade_bits(*mask) {
            let dfi = f.differential(i);
            acc = wedge(&acc, &dfi)?;
            if acc.is_zero() {
                dead = true;
                break;
            }
        }
        if !dead {
            out = out.add(&acc);
        }
    }
    Ok(out)
}

/// Vector field with polynomial components, one per ambient variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    pub comps: Vec<Polynomial>,
}

impl VectorField {
    pub fn new(comps: Vec<Polynomial>) -> Self {
        let n = comps.len();
        assert!(comps.iter().all(|p| p.nvars() == n));
        VectorField { comps }
    }

    pub fn nvars(&self) -> usize {
        self.comps.len()
    }

    /// Euler field of a weight system: `sum w_i x_i d/dx_i`.
    pub fn euler(w: &Weights) -> Self {
        let n = w.nvars();
        VectorField::new(
            (0..n)
                .map(|i| Polynomial::var(n, i).scale(&Q::from_integer(w.0[i].into())))
                .collect(),
        )
    }

    /// Multiply every component by a polynomial (e.g. a monomial `g` to form
    /// `g*E`).
    pub fn mul_polynomial(&self, g: &Polynomial) -> Self {
        VectorField::new(self.comps.iter().map(|c| c * g).collect())
    }

    /// Directional derivative of a function.
    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(f.nvars());
        for (i, c) in self.comps.iter().enumerate() {
            out = &out + &(c * &f.partial(i));
        }
        out
    }
}

/// Polynomial map between coordinate spaces; `comps[i]` is the i-th target
/// coordinate as a polynomial in the source variables. Branch
/// parametrizations use a single source variable `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    pub src_nvars: usize,
    pub comps: Vec<Polynomial>,
}

impl PolyMap {
    pub fn new(src_nvars: usize, comps: Vec<Polynomial>) -> Self {
        assert!(comps.iter().all(|p| p.nvars() == src_nvars));
        PolyMap { src_nvars, comps }
    }

    pub fn target_nvars(&self) -> usize {
        self.comps.len()
    }

    /// `d(f_i)` as a 1-form on the source.
    fn differential(&self, i: usize) -> DiffForm {
        let mut out = DiffForm::zero(self.src_nvars, 1);
        for j in 0..self.src_nvars {
            let d = self.comps[i].partial(j);
            out.add_term(1 << j, d);
        }
        out
    }

    /// Composition `self o g` (apply `g` first).
    pub fn compose(&self, g: &PolyMap) -> PolyMap {
        assert_eq!(self.src_nvars, g.target_nvars());
        PolyMap::new(
            g.src_nvars,
            self.comps.iter().map(|c| c.substitute(&g.comps)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q, qi};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn x(i: usize) -> Polynomial {
        Polynomial::var(3, i)
    }

    fn dx(i: usize) -> DiffForm {
        DiffForm::dx(3, i)
    }

    #[test]
    fn wedge_of_coordinate_differentials() {
        let w = wedge(&dx(0), &dx(2)).unwrap();
        assert_eq!(w.coeff(0b101), Polynomial::one(3));
        assert!(wedge(&dx(0), &dx(0)).unwrap().is_zero());
        let a = DiffForm::dx(3, 1).mul_polynomial(&x(2)); // x3 dx2
        let w2 = wedge(&a, &dx(2)).unwrap();
        assert_eq!(w2.coeff(0b110), x(2));
    }

    #[test]
    fn wedge_degree_overflow_is_an_error() {
        let two = wedge(&dx(0), &dx(1)).unwrap();
        assert!(wedge(&two, &two).is_err());
    }

    #[test]
    fn exterior_d_of_defining_equations() {
        // d(x1^2 + x2 x3) = 2 x1 dx1 + x2 dx3 + x3 dx2
        let f = &(&x(0) * &x(0)) + &(&x(1) * &x(2));
        let df = exterior_d(&DiffForm::from_polynomial(f)).unwrap();
        assert_eq!(df.coeff(0b001), x(0).scale(&qi(2)));
        assert_eq!(df.coeff(0b010), x(2));
        assert_eq!(df.coeff(0b100), x(1));

        // d(x1 x2 + x3^3) = x1 dx2 + x2 dx1 + 3 x3^2 dx3
        let g = &(&x(0) * &x(1)) + &x(2).pow(3);
        let dg = exterior_d(&DiffForm::from_polynomial(g)).unwrap();
        assert_eq!(dg.coeff(0b001), x(1));
        assert_eq!(dg.coeff(0b010), x(0));
        assert_eq!(dg.coeff(0b100), (&x(2) * &x(2)).scale(&qi(3)));

        // d of a constant
        let c = DiffForm::from_polynomial(Polynomial::constant(3, q(7, 3)));
        assert!(exterior_d(&c).unwrap().is_zero());
    }

    fn euler_u7() -> VectorField {
        VectorField::euler(&Weights::new(vec![4, 5, 3]).unwrap())
    }

    #[test]
    fn lie_derivative_of_theta1_along_euler() {
        // L_E(dx1 ^ dx3) = 7 dx1 ^ dx3 for weights (4,5,3)
        let theta1 = wedge(&dx(0), &dx(2)).unwrap();
        let l = lie_derivative(&euler_u7(), &theta1).unwrap();
        assert_eq!(l, theta1.scale(&qi(7)));
    }

    #[test]
    fn lie_derivative_of_zero_is_zero() {
        let z = DiffForm::zero(3, 2);
        assert!(lie_derivative(&euler_u7(), &z).unwrap().is_zero());
    }

    #[test]
    fn lie_derivative_x3e_on_theta2() {
        // L_{x3 E}(dx2 ^ dx3) = 11 x3 dx2 ^ dx3 for weights (4,5,3)
        let x3e = euler_u7().mul_polynomial(&x(2));
        let theta2 = wedge(&dx(1), &dx(2)).unwrap();
        let l = lie_derivative(&x3e, &theta2).unwrap();
        assert_eq!(l.coeff(0b110), x(2).scale(&qi(11)));
        assert_eq!(l.terms().count(), 1);
    }

    fn u7_branch() -> PolyMap {
        let t = Polynomial::var(1, 0);
        PolyMap::new(1, vec![t.pow(4), -&t.pow(5), t.pow(3)])
    }

    #[test]
    fn pullback_of_one_form_along_branch() {
        // x3 dx1 along t -> (t^4, -t^5, t^3) gives 4 t^6 dt
        let a = DiffForm::dx(3, 0).mul_polynomial(&x(2));
        let p = pullback(&u7_branch(), &a).unwrap();
        let t = Polynomial::var(1, 0);
        assert_eq!(p.coeff(0b1), t.pow(6).scale(&qi(4)));
    }

    #[test]
    fn pullback_of_two_form_along_curve_vanishes() {
        let a = wedge(&dx(0), &dx(1)).unwrap();
        assert!(pullback(&u7_branch(), &a).unwrap().is_zero());
    }

    #[test]
    fn pullback_of_vanishing_function() {
        let f = &(&x(0) * &x(0)) + &(&x(1) * &x(2));
        let p = pullback(&u7_branch(), &DiffForm::from_polynomial(f)).unwrap();
        assert!(p.is_zero());
    }

    fn random_poly(rng: &mut ChaCha20Rng, nvars: usize, max_deg: u32) -> Polynomial {
        let mut p = Polynomial::zero(nvars);
        for _ in 0..6 {
            let e: Vec<u32> = (0..nvars).map(|_| rng.gen_range(0..=max_deg)).collect();
            p.add_term(
                crate::poly::Monomial(e),
                q(rng.gen_range(-5..=5), rng.gen_range(1..=3)),
            );
        }
        p
    }

    fn random_one_form(rng: &mut ChaCha20Rng, nvars: usize) -> DiffForm {
        let mut f = DiffForm::zero(nvars, 1);
        for i in 0..nvars {
            f.add_term(1 << i, random_poly(rng, nvars, 2));
        }
        f
    }

    #[test]
    fn d_squared_is_zero_on_random_forms() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        for _ in 0..20 {
            let f = DiffForm::from_polynomial(random_poly(&mut rng, 3, 3));
            assert!(exterior_d(&exterior_d(&f).unwrap()).unwrap().is_zero());
            let a = random_one_form(&mut rng, 3);
            assert!(exterior_d(&exterior_d(&a).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn lie_derivative_commutes_with_d() {
        let mut rng = ChaCha20Rng::seed_from_u64(22);
        for _ in 0..10 {
            let xf = VectorField::new(vec![
                random_poly(&mut rng, 3, 2),
                random_poly(&mut rng, 3, 2),
                random_poly(&mut rng, 3, 2),
            ]);
            let a = random_one_form(&mut rng, 3);
            let lhs = lie_derivative(&xf, &exterior_d(&a).unwrap()).unwrap();
            let rhs = exterior_d(&lie_derivative(&xf, &a).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn double_contraction_vanishes() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        for _ in 0..10 {
            let xf = VectorField::new(vec![
                random_poly(&mut rng, 3, 2),
                random_poly(&mut rng, 3, 2),
                random_poly(&mut rng, 3, 2),
            ]);
            let a = wedge(
                &random_one_form(&mut rng, 3),
                &random_one_form(&mut rng, 3),
            )
            .unwrap();
            let once = interior(&xf, &a);
            assert!(interior(&xf, &once).is_zero());
        }
    }

    #[test]
    fn pullback_commutes_with_d() {
        let mut rng = ChaCha20Rng::seed_from_u64(24);
        for _ in 0..10 {
            let f = PolyMap::new(
                2,
                vec![
                    random_poly(&mut rng, 2, 2),
                    random_poly(&mut rng, 2, 2),
                    random_poly(&mut rng, 2, 2),
                ],
            );
            let a = random_one_form(&mut rng, 3);
            let lhs = pullback(&f, &exterior_d(&a).unwrap()).unwrap();
            let rhs = exterior_d(&pullback(&f, &a).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
