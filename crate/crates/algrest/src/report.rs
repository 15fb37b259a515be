//! Report assembly: full invariant reports for a class, golden-table
//! verification with per-cell outcomes, and JSON/markdown rendering.
//!
//! Verification fans table rows out across worker threads; every row
//! computation is pure and the results are merged in row order, so reports
//! are byte-deterministic for a fixed seed.

use crate::catalog::{
    expected_tables, Cell, ClassRecord, FamilyRecord, GoldenFamily, VariantCond,
};
use crate::classify::{orbit_dim, reduce, Family};
use crate::germ::Branch;
use crate::invariants::{
    geometric_conditions, index_of_isotropy, lt_search, omega0_matrix, subgerm_space,
    symplectic_multiplicity, GeometryFlags, OrInf, DEFAULT_LT_CEILING,
};
use crate::restriction::{rewrite_to_effective, RestrictionSpace};
use crate::{EngineError, Q, Result};
use serde::Serialize;
use std::collections::BTreeMap;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Top-level CLI report envelope.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub engine_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub degree_bound: i64,
    pub results: serde_json::Value,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, results: serde_json::Value) -> Self {
        Report {
            command: command.into(),
            engine_version: ENGINE_VERSION.into(),
            seed: None,
            degree_bound: crate::restriction::DEFAULT_DEGREE_BOUND,
            results,
            notes: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

pub fn q_str(v: &Q) -> String {
    v.to_string()
}

fn orinf_json(v: &OrInf) -> serde_json::Value {
    match v {
        OrInf::Finite(n) => serde_json::json!(n),
        OrInf::Infinite => serde_json::json!("inf"),
    }
}

fn orinf_matches(v: &OrInf, cell: &Cell) -> bool {
    match (v, cell) {
        (OrInf::Infinite, c) => c.is_infinite(),
        (OrInf::Finite(n), c) => c.as_finite() == Some(*n),
    }
}

// ---------------------------------------------------------------------------
// per-class invariant reports
// ---------------------------------------------------------------------------

/// Family context with the sub-germ restriction spaces the tangency
/// computations need (built once, shared read-only).
pub struct FamilyContext<'a> {
    pub rec: &'a FamilyRecord,
    pub subspaces: BTreeMap<Vec<usize>, RestrictionSpace>,
}

impl<'a> FamilyContext<'a> {
    pub fn new(rec: &'a FamilyRecord) -> Result<Self> {
        let subsets: Vec<Vec<usize>> = match rec.family {
            Family::U7 | Family::U9 => vec![vec![0, 1], vec![1]],
            Family::U8 => vec![vec![0, 1, 2], vec![0, 1], vec![2]],
        };
        let mut subspaces = BTreeMap::new();
        for s in subsets {
            let space = subgerm_space(&rec.germ, &s)?;
            subspaces.insert(s, space);
        }
        Ok(FamilyContext { rec, subspaces })
    }

    fn singular_index(&self) -> usize {
        match self.rec.family {
            Family::U7 | Family::U9 => 1,
            Family::U8 => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub class: String,
    pub moduli: Vec<String>,
    pub cod: usize,
    pub musym: usize,
    pub ind: String,
    /// Index of isotropy of the singular branch. The classification tables
    /// list it only for two of the three families; it is computed for all
    /// of them and marked accordingly.
    pub ind2: String,
    pub lt: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l12: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l3: Option<String>,
    pub geometry: GeometryReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometryReport {
    pub omega_v_nonzero: bool,
    pub omega_l1l2_nonzero: bool,
    pub ker_eq_l2: bool,
    pub omega_w_zero: bool,
}

impl From<GeometryFlags> for GeometryReport {
    fn from(f: GeometryFlags) -> Self {
        GeometryReport {
            omega_v_nonzero: f.v_nonzero,
            omega_l1l2_nonzero: f.l1l2_nonzero,
            ker_eq_l2: f.ker_eq_l2,
            omega_w_zero: f.w_zero,
        }
    }
}

/// Components of the invariant computation, exposed individually so the
/// verifier can compare cells one at a time.
pub struct ClassComputation {
    pub ind: OrInf,
    pub ind2: OrInf,
    pub musym: usize,
    pub cod: usize,
    pub lt: OrInf,
    pub l2: Option<OrInf>,
    pub l12: Option<OrInf>,
    pub l3: Option<OrInf>,
    pub geometry: GeometryFlags,
}

/// Lagrangian tangency order of a sub-multi-germ of a class scene: the
/// infinity certificate is the zero restriction of the class to the
/// corresponding sub-germ, otherwise the chart search runs with a ceiling.
pub fn lt_multigerm(
    ctx: &FamilyContext,
    class: &ClassRecord,
    scene_branches: &[Branch],
    omega_x: &crate::forms::DiffForm,
    scene_subset: &[usize],
    ceiling: usize,
) -> Result<OrInf> {
    let germ_subset: Vec<usize> = scene_subset
        .iter()
        .map(|&i| class.scene.germ_branch[i])
        .collect();
    let sub = ctx.subspaces.get(&germ_subset).ok_or_else(|| {
        EngineError::Other(format!("no cached sub-germ space for {:?}", germ_subset))
    })?;
    let restricted = sub.restrict(&rewrite_to_effective(omega_x, 3))?;
    if restricted.is_zero() {
        return Ok(OrInf::Infinite);
    }
    let refs: Vec<&Branch> = scene_subset.iter().map(|&i| &scene_branches[i]).collect();
    Ok(OrInf::Finite(lt_search(&refs, ceiling)? as i64))
}

/// Compute every invariant of one class at fixed moduli.
pub fn class_invariants(
    ctx: &FamilyContext,
    class: &ClassRecord,
    moduli: &[Q],
    ceiling: usize,
) -> Result<ClassComputation> {
    let rec = ctx.rec;
    let k = rec.space.closed_dim();
    let nf = class.normal_form_coords(k, moduli, 1);
    let a = rec.space.from_closed_coords(&nf)?;

    let ind = index_of_isotropy(&rec.space, &a)?;
    let musym = symplectic_multiplicity(&rec.action, &nf);
    let cod = k - orbit_dim(&rec.action, &nf) - class.moduli_count;

    let omega_x = class.realizing_form(&rec.space, moduli, 1);
    let branches: Vec<Branch> = class
        .scene
        .branches
        .iter()
        .map(|b| b.instantiate(moduli))
        .collect();

    let singular_scene = class.scene.singular;
    let sing_germ = vec![class.scene.germ_branch[singular_scene]];
    let sing_space = ctx
        .subspaces
        .get(&sing_germ)
        .ok_or_else(|| EngineError::Other("missing singular-branch space".into()))?;
    let a2 = sing_space.restrict(&rewrite_to_effective(&omega_x, 3))?;
    let ind2 = index_of_isotropy(sing_space, &a2)?;

    let all: Vec<usize> = (0..branches.len()).collect();
    let lt = lt_multigerm(ctx, class, &branches, &omega_x, &all, ceiling)?;
    let (l2, l12, l3) = match rec.family {
        Family::U7 | Family::U9 => {
            let l2 = lt_multigerm(ctx, class, &branches, &omega_x, &[1], ceiling)?;
            (Some(l2), None, None)
        }
        Family::U8 => {
            let l12 = lt_multigerm(ctx, class, &branches, &omega_x, &[0, 1], ceiling)?;
            let l3 = lt_multigerm(ctx, class, &branches, &omega_x, &[2], ceiling)?;
            (None, Some(l12), Some(l3))
        }
    };

    let geometry = geometric_conditions(&branches, singular_scene, &omega0_matrix())?;

    Ok(ClassComputation {
        ind,
        ind2,
        musym,
        cod,
        lt,
        l2,
        l12,
        l3,
        geometry,
    })
}

pub fn invariant_report(
    ctx: &FamilyContext,
    class: &ClassRecord,
    moduli: &[Q],
    ceiling: usize,
) -> Result<InvariantReport> {
    let c = class_invariants(ctx, class, moduli, ceiling)?;
    Ok(InvariantReport {
        class: class.display.clone(),
        moduli: moduli.iter().map(q_str).collect(),
        cod: c.cod,
        musym: c.musym,
        ind: c.ind.to_string(),
        ind2: c.ind2.to_string(),
        lt: c.lt.to_string(),
        l2: c.l2.map(|v| v.to_string()),
        l12: c.l12.map(|v| v.to_string()),
        l3: c.l3.map(|v| v.to_string()),
        geometry: GeometryReport::from(c.geometry),
    })
}

// ---------------------------------------------------------------------------
// verification against the golden tables
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub cell: String,
    pub ok: bool,
    pub expected: String,
    pub got: String,
}

fn cell(id: String, expected: impl ToString, got: impl ToString) -> CellResult {
    let expected = expected.to_string();
    let got = got.to_string();
    CellResult {
        ok: expected == got,
        cell: id,
        expected,
        got,
    }
}

fn find_class<'a>(rec: &'a FamilyRecord, label: &str) -> Result<&'a ClassRecord> {
    rec.classes
        .iter()
        .find(|c| c.label == label)
        .ok_or_else(|| EngineError::Other(format!("unknown class label {}", label)))
}

fn variant_cond(class: &ClassRecord, name: &str) -> Result<VariantCond> {
    class
        .variants
        .iter()
        .find(|v| v.name == name)
        .map(|v| v.cond.clone())
        .ok_or_else(|| {
            EngineError::Other(format!(
                "class {} has no variant '{}'",
                class.label, name
            ))
        })
}

fn row_seed(seed: u64, tag: &str) -> u64 {
    // small deterministic per-row mix so rows are independent of the order
    // in which workers pick them up
    let mut h: u64 = 0xcbf29ce484222325 ^ seed;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Verify one family against golden data. Returns per-cell outcomes in a
/// deterministic order.
pub fn verify_family(
    ctx: &FamilyContext,
    golden: &GoldenFamily,
    seed: u64,
    ceiling: usize,
) -> Result<Vec<CellResult>> {
    let rec = ctx.rec;
    let mut cells: Vec<CellResult> = Vec::new();
    let fam = rec.family.name();

    // 1. basis dimensions and degree lists
    cells.push(cell(
        format!("{}/basis/full_dim", fam),
        golden.basis.full_dim,
        rec.space.full_dim(),
    ));
    cells.push(cell(
        format!("{}/basis/closed_dim", fam),
        golden.basis.closed_dim,
        rec.space.closed_dim(),
    ));
    cells.push(cell(
        format!("{}/basis/full_degrees", fam),
        format!("{:?}", golden.basis.full_degrees),
        format!("{:?}", rec.space.degrees()),
    ));
    cells.push(cell(
        format!("{}/basis/closed_degrees", fam),
        format!("{:?}", golden.basis.closed_degrees),
        format!("{:?}", rec.space.closed_degrees()),
    ));

    // 2. action-table entries
    let vars = ["x1", "x2", "x3"];
    let mut computed: BTreeMap<String, &crate::linalg::Mat> = BTreeMap::new();
    for (i, f) in rec.action.fields.iter().enumerate() {
        computed.insert(f.name(&vars), &rec.action.mats[i]);
    }
    let closed_names: Vec<String> = {
        let idx = rec.space.closed_indices();
        idx.iter()
            .map(|&i| rec.space.basis[i].name.clone())
            .collect()
    };
    cells.push(cell(
        format!("{}/action/fields", fam),
        format!("{:?}", golden.action.images.keys().collect::<Vec<_>>()),
        format!("{:?}", computed.keys().collect::<Vec<_>>()),
    ));
    for (name, cols) in &golden.action.images {
        let Some(mat) = computed.get(name) else {
            continue;
        };
        for (j, col) in cols.iter().enumerate() {
            let got: Vec<String> = (0..mat.rows).map(|i| mat.at(i, j).to_string()).collect();
            cells.push(cell(
                format!(
                    "{}/action/{}/{}",
                    fam,
                    name,
                    closed_names.get(j).cloned().unwrap_or_else(|| j.to_string())
                ),
                format!("{:?}", col),
                format!("{:?}", got),
            ));
        }
    }

    // 3/4/5. table rows, fanned out over worker threads
    enum Job<'g> {
        Class(&'g crate::catalog::GoldenClassRow),
        Tangency(&'g crate::catalog::GoldenTangencyRow),
        Geometry(&'g crate::catalog::GoldenGeometryRow),
    }
    let mut jobs: Vec<Job> = Vec::new();
    jobs.extend(golden.classification.iter().map(Job::Class));
    jobs.extend(golden.tangency.iter().map(Job::Tangency));
    jobs.extend(golden.geometry.iter().map(Job::Geometry));

    let run_job = |job: &Job| -> Result<Vec<CellResult>> {
        let mut out = Vec::new();
        match job {
            Job::Class(row) => {
                let class = find_class(rec, &row.class)?;
                let mut rng =
                    crate::seeded_rng(row_seed(seed, &format!("{}/cls/{}", fam, row.class)));
                let moduli = class.draw_moduli(&mut rng, &VariantCond::Always);
                let k = rec.space.closed_dim();
                let nf = class.normal_form_coords(k, &moduli, 1);
                let a = rec.space.from_closed_coords(&nf)?;
                let id = format!("{}/classification/{}", fam, row.class);
                out.push(cell(
                    format!("{}/cod", id),
                    row.cod,
                    k - orbit_dim(&rec.action, &nf) - class.moduli_count,
                ));
                out.push(cell(
                    format!("{}/musym", id),
                    row.musym,
                    symplectic_multiplicity(&rec.action, &nf),
                ));
                let ind = index_of_isotropy(&rec.space, &a)?;
                out.push(cell(
                    format!("{}/ind", id),
                    row.ind.to_string(),
                    ind.to_string(),
                ));
                // the reduction of the normal form must be idempotent and
                // name the class itself
                let (label, nf2, _) = reduce(&rec.action, rec.family, &nf)?;
                out.push(cell(format!("{}/label", id), &row.class, &label.label));
                let (label2, nf3, _) = reduce(&rec.action, rec.family, &nf2)?;
                out.push(cell(
                    format!("{}/idempotent", id),
                    "true",
                    (label2.label == label.label && nf3 == nf2).to_string(),
                ));
            }
            Job::Tangency(row) => {
                let class = find_class(rec, &row.class)?;
                let cond = variant_cond(class, &row.variant)?;
                let mut rng = crate::seeded_rng(row_seed(
                    seed,
                    &format!("{}/lt/{}/{}", fam, row.class, row.variant),
                ));
                let moduli = class.draw_moduli(&mut rng, &cond);
                let c = class_invariants(ctx, class, &moduli, ceiling)?;
                let id = format!("{}/tangency/{}{}", fam, row.class, suffix(&row.variant));
                out.push(cell(
                    format!("{}/ind", id),
                    row.ind.to_string(),
                    c.ind.to_string(),
                ));
                if let Some(expect) = &row.ind2 {
                    out.push(cell(
                        format!("{}/ind2", id),
                        expect.to_string(),
                        c.ind2.to_string(),
                    ));
                }
                out.push(check_orinf(format!("{}/lt", id), &row.lt, &c.lt));
                if let (Some(expect), Some(got)) = (&row.l2, &c.l2) {
                    out.push(check_orinf(format!("{}/l2", id), expect, got));
                }
                if let (Some(expect), Some(got)) = (&row.l12, &c.l12) {
                    out.push(check_orinf(format!("{}/l12", id), expect, got));
                }
                if let (Some(expect), Some(got)) = (&row.l3, &c.l3) {
                    out.push(check_orinf(format!("{}/l3", id), expect, got));
                }
            }
            Job::Geometry(row) => {
                let class = find_class(rec, &row.class)?;
                let cond = variant_cond(class, &row.variant)?;
                let mut rng = crate::seeded_rng(row_seed(
                    seed,
                    &format!("{}/geom/{}/{}", fam, row.class, row.variant),
                ));
                let moduli = class.draw_moduli(&mut rng, &cond);
                let branches: Vec<Branch> = class
                    .scene
                    .branches
                    .iter()
                    .map(|b| b.instantiate(&moduli))
                    .collect();
                let flags =
                    geometric_conditions(&branches, class.scene.singular, &omega0_matrix())?;
                let id = format!("{}/geometry/{}{}", fam, row.class, suffix(&row.variant));
                out.push(cell(
                    format!("{}/omega_v_nonzero", id),
                    row.omega_v_nonzero,
                    flags.v_nonzero,
                ));
                out.push(cell(
                    format!("{}/omega_l1l2_nonzero", id),
                    row.omega_l1l2_nonzero,
                    flags.l1l2_nonzero,
                ));
                out.push(cell(
                    format!("{}/ker_eq_l2", id),
                    row.ker_eq_l2,
                    flags.ker_eq_l2,
                ));
                out.push(cell(
                    format!("{}/omega_w_zero", id),
                    row.omega_w_zero,
                    flags.w_zero,
                ));
            }
        }
        Ok(out)
    };

    // fan out rows over a small scoped pool; merge by job index
    let workers = std::thread::available_parallelism()
        .map(|n| n.get().min(8))
        .unwrap_or(4);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results: Vec<std::sync::Mutex<Option<Result<Vec<CellResult>>>>> =
        (0..jobs.len()).map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= jobs.len() {
                    break;
                }
                let r = run_job(&jobs[i]);
                *results[i].lock().unwrap() = Some(r);
            });
        }
    });
    for slot in results {
        let r = slot.into_inner().unwrap().expect("worker completed");
        cells.extend(r?);
    }
    Ok(cells)
}

fn suffix(variant: &str) -> String {
    if variant.is_empty() {
        String::new()
    } else {
        format!("[{}]", variant)
    }
}

fn check_orinf(id: String, expected: &Cell, got: &OrInf) -> CellResult {
    CellResult {
        ok: orinf_matches(got, expected),
        cell: id,
        expected: expected.to_string(),
        got: got.to_string(),
    }
}

/// Verify a family against its shipped golden data.
pub fn verify_family_shipped(ctx: &FamilyContext, seed: u64) -> Result<Vec<CellResult>> {
    let golden = expected_tables(ctx.rec.family)?;
    verify_family(ctx, &golden, seed, DEFAULT_LT_CEILING)
}

// ---------------------------------------------------------------------------
// markdown rendering
// ---------------------------------------------------------------------------

pub fn markdown_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str("| ");
    out.push_str(&headers.join(" | "));
    out.push_str(" |\n|");
    for _ in headers {
        out.push_str(" --- |");
    }
    out.push('\n');
    for row in rows {
        out.push_str("| ");
        out.push_str(&row.join(" | "));
        out.push_str(" |\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_family;
    use crate::poly::q;

    #[test]
    fn report_json_is_deterministic() {
        let r1 = Report::new("basis", serde_json::json!({"full_dim": 8}));
        let r2 = Report::new("basis", serde_json::json!({"full_dim": 8}));
        assert_eq!(r1.to_json(), r2.to_json());
    }

    #[test]
    fn class_invariants_for_u7_class5() {
        // ind 2, Lt 10, L2 infinite
        let rec = load_family(Family::U7).unwrap();
        let ctx = FamilyContext::new(&rec).unwrap();
        let class = rec.classes.iter().find(|c| c.label == "5").unwrap();
        let c = class_invariants(&ctx, class, &[q(3, 2)], DEFAULT_LT_CEILING).unwrap();
        assert_eq!(c.ind, OrInf::Finite(2));
        assert_eq!(c.lt, OrInf::Finite(10));
        assert_eq!(c.l2, Some(OrInf::Infinite));
        assert_eq!(c.cod, 5);
        assert_eq!(c.musym, 6);
    }
}
