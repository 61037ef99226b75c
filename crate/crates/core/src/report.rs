//! Machine-readable documents behind the command-line surface: vertex-set
//! and solve reports as JSON, figure grids as CSV, hull meshes as OFF.
//! Every rational travels as a lowest-terms "p/q" string; decimal fields
//! are 20-significant-digit renderings and clearly labeled approximate.

use serde::Serialize;

use crate::exact::{decimal_string, format_rational, Rational};
use crate::measures::{StateSpace, TwoPlan};
use crate::monge::{self, to_quasi_monge};
use crate::polytopes::{
    build_system, enumerate_vertices, exposing_cost, CoeffVector, HullMesh, VertexSet,
};
use crate::transport::{
    self, diamond_mesh, mean_field_bound, reduced_monge_vertices, reduced_vertices, solve_reduced,
    volume_report, PairCost,
};
use crate::{Budget, Error, Result};

pub const DECIMAL_DIGITS: usize = 20;

fn fmt(r: &Rational) -> String {
    format_rational(r)
}

/// Exact value plus its labeled decimal approximation.
#[derive(Clone, Debug, Serialize)]
pub struct ValuePair {
    pub exact: String,
    pub approx_decimal: String,
}

impl ValuePair {
    pub fn new(r: &Rational) -> Self {
        ValuePair {
            exact: fmt(r),
            approx_decimal: decimal_string(r, DECIMAL_DIGITS),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportEntry {
    pub multi_index: Vec<u32>,
    pub value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiMongeDoc {
    pub weights: Vec<String>,
    pub maps: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoeffVertexDoc {
    pub index: usize,
    pub dense: Vec<String>,
    pub support: Vec<SupportEntry>,
    pub is_monge: bool,
    pub quasi_monge: QuasiMongeDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exposing_cost: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoeffVertexSetDoc {
    pub kind: String,
    pub marginals: u32,
    pub states: usize,
    pub count: usize,
    pub column_order: Vec<Vec<u32>>,
    pub vertices: Vec<CoeffVertexDoc>,
}

/// Vertex-set document for coefficient-space polytopes. When `certify` is
/// set, every vertex carries a strictly separating cost vector, verified
/// exactly against all other vertices.
pub fn coeff_vertex_set_doc(
    kind: &str,
    n: u32,
    space: StateSpace,
    set: &VertexSet<CoeffVector>,
    certify: bool,
) -> Result<CoeffVertexSetDoc> {
    let order = crate::measures::canonical_multi_indices(n, space);
    let dense: Vec<Vec<Rational>> = set.iter().map(|v| v.point.to_dense(&order)).collect();
    let mut vertices = Vec::with_capacity(set.len());
    for (i, info) in set.iter().enumerate() {
        let exposing = if certify {
            let others: Vec<Vec<Rational>> = dense
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, d)| d.clone())
                .collect();
            match exposing_cost(&dense[i], &others)? {
                Ok(cost) => Some(cost.iter().map(fmt).collect()),
                Err(_) => {
                    return Err(Error::Defect(format!(
                        "enumerated vertex {i} failed its exposedness certificate"
                    )))
                }
            }
        } else {
            None
        };
        let quasi = to_quasi_monge(&info.point)?;
        vertices.push(CoeffVertexDoc {
            index: i,
            dense: dense[i].iter().map(fmt).collect(),
            support: info
                .point
                .coeffs()
                .map(|(idx, v)| SupportEntry {
                    multi_index: idx.indices().to_vec(),
                    value: fmt(v),
                })
                .collect(),
            is_monge: info.is_monge,
            quasi_monge: QuasiMongeDoc {
                weights: quasi.weights.iter().map(fmt).collect(),
                maps: quasi.maps.clone(),
            },
            exposing_cost: exposing,
        });
    }
    Ok(CoeffVertexSetDoc {
        kind: kind.to_string(),
        marginals: n,
        states: space.ell(),
        count: set.len(),
        column_order: order.iter().map(|m| m.indices().to_vec()).collect(),
        vertices,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PlanDoc {
    pub index: usize,
    pub matrix: Vec<Vec<String>>,
    pub off_diagonal: Vec<String>,
    pub is_monge: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exposing_cost: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlanSetDoc {
    pub kind: String,
    pub marginals: u32,
    pub states: usize,
    pub count: usize,
    pub monge_type_count: usize,
    pub monge_flag_mismatches: Vec<usize>,
    pub vertices: Vec<PlanDoc>,
}

fn plan_matrix(plan: &TwoPlan) -> Vec<Vec<String>> {
    let ell = plan.ell();
    (0..ell)
        .map(|i| (0..ell).map(|j| fmt(plan.get(i, j))).collect())
        .collect()
}

/// Document for the reduced Kantorovich polytope vertex set.
pub fn reduced_doc(n: u32, space: StateSpace, budget: Budget, certify: bool) -> Result<PlanSetDoc> {
    let rv = reduced_vertices(n, space, budget)?;
    let coords: Vec<Vec<Rational>> = rv.plans().map(|p| p.off_diagonal()).collect();
    let mut vertices = Vec::with_capacity(rv.len());
    for (i, v) in rv.vertices.iter().enumerate() {
        let exposing = if certify {
            let others: Vec<Vec<Rational>> = coords
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, c)| c.clone())
                .collect();
            match exposing_cost(&coords[i], &others)? {
                Ok(cost) => Some(cost.iter().map(fmt).collect()),
                Err(_) => {
                    return Err(Error::Defect(format!(
                        "reduced vertex {i} failed its exposedness certificate"
                    )))
                }
            }
        } else {
            None
        };
        vertices.push(PlanDoc {
            index: i,
            matrix: plan_matrix(&v.plan),
            off_diagonal: v.plan.off_diagonal().iter().map(fmt).collect(),
            is_monge: v.is_monge,
            exposing_cost: exposing,
        });
    }
    Ok(PlanSetDoc {
        kind: "reduced".into(),
        marginals: n,
        states: space.ell(),
        count: rv.len(),
        monge_type_count: rv.vertices.iter().filter(|v| v.is_monge).count(),
        monge_flag_mismatches: rv.monge_flag_mismatches.clone(),
        vertices,
    })
}

/// Document for the reduced Monge polytope vertex set.
pub fn reduced_monge_doc(n: u32, space: StateSpace, budget: Budget) -> Result<PlanSetDoc> {
    let plans = reduced_monge_vertices(n, space, budget)?;
    let vertices = plans
        .iter()
        .enumerate()
        .map(|(i, p)| PlanDoc {
            index: i,
            matrix: plan_matrix(p),
            off_diagonal: p.off_diagonal().iter().map(fmt).collect(),
            is_monge: true,
            exposing_cost: None,
        })
        .collect();
    Ok(PlanSetDoc {
        kind: "reduced-monge".into(),
        marginals: n,
        states: space.ell(),
        count: plans.len(),
        monge_type_count: plans.len(),
        monge_flag_mismatches: Vec::new(),
        vertices,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyDoc {
    pub marginals: u32,
    pub states: usize,
    pub kantorovich_vertices: usize,
    pub kantorovich_vertices_monge_type: usize,
    pub monge_states: usize,
    pub monge_polytope_vertices: usize,
    pub reduced_vertices: usize,
    pub reduced_vertices_monge_type: usize,
    pub reduced_monge_vertices: usize,
    /// reduced vertices where the preimage heuristic and the exact Monge
    /// test disagree (none observed on the paper's instances)
    pub monge_flag_mismatches: Vec<usize>,
}

pub fn classify_doc(n: u32, space: StateSpace, budget: Budget) -> Result<ClassifyDoc> {
    let sys = build_system(n, space, budget)?;
    let kan = enumerate_vertices(&sys, budget)?;
    let monge_states = monge::enumerate_monge(n, space, budget)?;
    let monge_poly = monge::monge_polytope_vertices(n, space, budget)?;
    let rv = reduced_vertices(n, space, budget)?;
    let rm = reduced_monge_vertices(n, space, budget)?;
    Ok(ClassifyDoc {
        marginals: n,
        states: space.ell(),
        kantorovich_vertices: kan.len(),
        kantorovich_vertices_monge_type: kan.iter().filter(|v| v.is_monge).count(),
        monge_states: monge_states.len(),
        monge_polytope_vertices: monge_poly.len(),
        reduced_vertices: rv.len(),
        reduced_vertices_monge_type: rv.vertices.iter().filter(|v| v.is_monge).count(),
        reduced_monge_vertices: rm.len(),
        monge_flag_mismatches: rv.monge_flag_mismatches,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeDoc {
    pub marginals: u32,
    pub states: usize,
    pub volume_kantorovich: ValuePair,
    pub volume_monge: ValuePair,
    pub ratio: ValuePair,
}

pub fn volume_doc(n: u32, budget: Budget) -> Result<(VolumeDoc, transport::VolumeReport)> {
    let report = volume_report(n, budget)?;
    let doc = VolumeDoc {
        marginals: n,
        states: 3,
        volume_kantorovich: ValuePair::new(&report.vol_kantorovich),
        volume_monge: ValuePair::new(&report.vol_monge),
        ratio: ValuePair::new(&report.ratio),
    };
    Ok((doc, report))
}

#[derive(Clone, Debug, Serialize)]
pub struct MeanFieldDoc {
    pub bound: ValuePair,
    pub attained_at: String,
    pub gap: ValuePair,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveDoc {
    pub marginals: u32,
    pub states: usize,
    pub cost: Vec<Vec<String>>,
    pub optimal_value: ValuePair,
    pub full_value: ValuePair,
    pub unique: bool,
    pub monge_attained: bool,
    pub minimizers: Vec<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_field: Option<MeanFieldDoc>,
}

pub fn solve_doc(n: u32, space: StateSpace, cost: &PairCost, budget: Budget) -> Result<SolveDoc> {
    let report = solve_reduced(n, space, cost, budget)?;
    let mean_field = if space.ell() == 3 {
        let (bound, name) = mean_field_bound(cost)?;
        let gap = &bound - &report.optimal_value;
        Some(MeanFieldDoc {
            bound: ValuePair::new(&bound),
            attained_at: name.to_string(),
            gap: ValuePair::new(&gap),
        })
    } else {
        None
    };
    let ell = space.ell();
    let cost_matrix = (0..ell)
        .map(|i| (0..ell).map(|j| fmt(cost.get(i, j))).collect())
        .collect();
    Ok(SolveDoc {
        marginals: n,
        states: ell,
        cost: cost_matrix,
        optimal_value: ValuePair::new(&report.optimal_value),
        full_value: ValuePair::new(&report.full_value),
        unique: report.unique,
        monge_attained: report.monge_attained,
        minimizers: report.minimizers.iter().map(plan_matrix).collect(),
        mean_field,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiamondDoc {
    pub points: Vec<DiamondPoint>,
    pub volume: ValuePair,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiamondPoint {
    pub name: String,
    pub matrix: Vec<Vec<String>>,
    pub off_diagonal: Vec<String>,
}

pub fn diamond_doc() -> Result<(DiamondDoc, HullMesh)> {
    let mesh = diamond_mesh()?;
    let limits = transport::limit_points();
    let points = limits
        .named()
        .iter()
        .map(|(name, plan)| DiamondPoint {
            name: name.to_string(),
            matrix: plan_matrix(plan),
            off_diagonal: plan.off_diagonal().iter().map(fmt).collect(),
        })
        .collect();
    let doc = DiamondDoc {
        points,
        volume: ValuePair::new(&mesh.volume),
    };
    Ok((doc, mesh))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureKind {
    Kantorovich,
    Reduced,
}

impl FigureKind {
    fn label(self) -> &'static str {
        match self {
            FigureKind::Kantorovich => "kantorovich",
            FigureKind::Reduced => "reduced",
        }
    }
}

/// One CSV per grid: vertex counts of the polytope family, its Monge
/// sub-polytope, and the Monge-type vertex count. Per-cell budget failures
/// become rows with empty counts and the reason in the last column.
pub fn figure_data_csv(
    n_range: (u32, u32),
    ell_range: (usize, usize),
    kind: FigureKind,
    budget: Budget,
) -> Result<String> {
    let mut out = String::from(
        "n,ell,kind,vertices,monge_polytope_vertices,vertices_monge_type,error\n",
    );
    for n in n_range.0..=n_range.1 {
        for ell in ell_range.0..=ell_range.1 {
            let space = StateSpace::new(ell)?;
            let row = figure_cell(n, space, kind, budget);
            match row {
                Ok((a, b, c)) => {
                    out.push_str(&format!("{n},{ell},{},{a},{b},{c},\n", kind.label()))
                }
                Err(Error::Budget {
                    what,
                    candidates,
                    cap,
                }) => out.push_str(&format!(
                    "{n},{ell},{},,,,budget exceeded: {candidates} {what} over cap {cap}\n",
                    kind.label()
                )),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

fn figure_cell(
    n: u32,
    space: StateSpace,
    kind: FigureKind,
    budget: Budget,
) -> Result<(usize, usize, usize)> {
    match kind {
        FigureKind::Kantorovich => {
            let sys = build_system(n, space, budget)?;
            let kan = enumerate_vertices(&sys, budget)?;
            let monge_poly = monge::monge_polytope_vertices(n, space, budget)?;
            let monge_type = kan.iter().filter(|v| v.is_monge).count();
            Ok((kan.len(), monge_poly.len(), monge_type))
        }
        FigureKind::Reduced => {
            let rv = reduced_vertices(n, space, budget)?;
            let rm = reduced_monge_vertices(n, space, budget)?;
            let monge_type = rv.vertices.iter().filter(|v| v.is_monge).count();
            Ok((rv.len(), rm.len(), monge_type))
        }
    }
}

/// ASCII OFF mesh with coplanar triangles merged into polygon faces and the
/// exact rational coordinates carried in comment lines.
pub fn mesh_to_off(mesh: &HullMesh) -> String {
    let faces = merged_faces(mesh);
    let edge_count: usize = {
        let mut edges = std::collections::BTreeSet::new();
        for f in &faces {
            for k in 0..f.len() {
                let a = f[k];
                let b = f[(k + 1) % f.len()];
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    };
    let mut out = String::from("OFF\n");
    out.push_str(&format!(
        "{} {} {}\n",
        mesh.vertices.len(),
        faces.len(),
        edge_count
    ));
    for (i, v) in mesh.vertices.iter().enumerate() {
        out.push_str(&format!(
            "# vertex {i} exact: {} {} {}\n",
            fmt(&v[0]),
            fmt(&v[1]),
            fmt(&v[2])
        ));
        out.push_str(&format!(
            "{} {} {}\n",
            decimal_string(&v[0], DECIMAL_DIGITS),
            decimal_string(&v[1], DECIMAL_DIGITS),
            decimal_string(&v[2], DECIMAL_DIGITS)
        ));
    }
    for f in &faces {
        out.push_str(&f.len().to_string());
        for idx in f {
            out.push_str(&format!(" {idx}"));
        }
        out.push('\n');
    }
    out
}

fn sub3(a: &[Rational; 3], b: &[Rational; 3]) -> [Rational; 3] {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn cross3(u: &[Rational; 3], v: &[Rational; 3]) -> [Rational; 3] {
    [
        &u[1] * &v[2] - &u[2] * &v[1],
        &u[2] * &v[0] - &u[0] * &v[2],
        &u[0] * &v[1] - &u[1] * &v[0],
    ]
}

fn dot3(u: &[Rational; 3], v: &[Rational; 3]) -> Rational {
    &u[0] * &v[0] + &u[1] * &v[1] + &u[2] * &v[2]
}

/// Groups the triangles by supporting plane and walks each group's boundary
/// into a convex polygon, ordered consistently with the outward normal.
fn merged_faces(mesh: &HullMesh) -> Vec<Vec<usize>> {
    use num_traits::Signed;
    use std::collections::BTreeMap;

    if mesh.facets.is_empty() {
        return Vec::new();
    }
    let verts = &mesh.vertices;
    // plane key: primitive integer normal with canonical sign plus offset
    let mut groups: BTreeMap<String, (usize, Vec<usize>)> = BTreeMap::new();
    for (fi, f) in mesh.facets.iter().enumerate() {
        let n = cross3(
            &sub3(&verts[f[1]], &verts[f[0]]),
            &sub3(&verts[f[2]], &verts[f[0]]),
        );
        let offset = dot3(&n, &verts[f[0]]);
        // normals of coplanar outward facets are positive multiples of each
        // other; normalize by the largest absolute component
        let scale = n.iter().map(|c| c.abs()).max().expect("nonzero normal");
        let nn: Vec<String> = n.iter().map(|c| fmt(&(c / &scale))).collect();
        let key = format!(
            "{}|{}|{}|{}",
            nn[0],
            nn[1],
            nn[2],
            fmt(&(&offset / &scale))
        );
        groups.entry(key).or_insert_with(|| (fi, Vec::new())).1.push(fi);
    }
    let mut faces = Vec::new();
    for (_, (first, members)) in groups {
        let rep = mesh.facets[first];
        let normal = cross3(
            &sub3(&verts[rep[1]], &verts[rep[0]]),
            &sub3(&verts[rep[2]], &verts[rep[0]]),
        );
        let mut ids: Vec<usize> = members
            .iter()
            .flat_map(|&fi| mesh.facets[fi].iter().copied())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        faces.push(order_polygon(&ids, verts, &normal));
    }
    faces.sort();
    faces
}

/// Orders coplanar hull vertices around their centroid, counterclockwise
/// when viewed from the outward normal side.
fn order_polygon(ids: &[usize], verts: &[[Rational; 3]], normal: &[Rational; 3]) -> Vec<usize> {
    use num_traits::{Signed, Zero};
    let k = ids.len() as i64;
    let centroid: [Rational; 3] = std::array::from_fn(|c| {
        ids.iter()
            .map(|&i| verts[i][c].clone())
            .fold(Rational::zero(), |a, b| a + b)
            / crate::exact::rat(k, 1)
    });
    let reference = sub3(&verts[ids[0]], &centroid);
    let half_and_key = |i: usize| -> (u8, [Rational; 3]) {
        let d = sub3(&verts[i], &centroid);
        let s = dot3(normal, &cross3(&reference, &d));
        let half = if s.is_positive() {
            0
        } else if s.is_negative() {
            1
        } else if dot3(&reference, &d).is_positive() {
            0 // same direction as the reference
        } else {
            1 // opposite direction
        };
        (half, d)
    };
    let mut order: Vec<usize> = ids.to_vec();
    order.sort_by(|&a, &b| {
        let (ha, da) = half_and_key(a);
        let (hb, db) = half_and_key(b);
        ha.cmp(&hb).then_with(|| {
            let s = dot3(normal, &cross3(&da, &db));
            if s.is_positive() {
                std::cmp::Ordering::Less
            } else if s.is_negative() {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        })
    });
    // canonical start at the smallest vertex index, orientation preserved
    let start = order
        .iter()
        .enumerate()
        .min_by_key(|(_, &v)| v)
        .map(|(i, _)| i)
        .unwrap_or(0);
    order.rotate_left(start);
    order
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("serializable document");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_i64;

    #[test]
    fn figure_csv_contains_anchored_cells() {
        let csv = figure_data_csv((3, 3), (3, 3), FigureKind::Reduced, Budget::default())
            .unwrap();
        assert!(csv.contains("3,3,reduced,8,"));
        assert!(csv.lines().count() == 2);
    }

    #[test]
    fn figure_csv_budget_cell_keeps_going() {
        let csv = figure_data_csv(
            (2, 3),
            (3, 3),
            FigureKind::Reduced,
            Budget::uniform(30),
        )
        .unwrap();
        assert!(csv.contains("budget exceeded"));
        assert!(csv.contains("2,3,reduced,"));
    }

    #[test]
    fn off_mesh_for_cube() {
        let mut pts = Vec::new();
        for x in 0..=1 {
            for y in 0..=1 {
                for z in 0..=1 {
                    pts.push([rat_i64(x), rat_i64(y), rat_i64(z)]);
                }
            }
        }
        let mesh = crate::polytopes::hull3(&pts).unwrap();
        let off = mesh_to_off(&mesh);
        let mut lines = off.lines();
        assert_eq!(lines.next(), Some("OFF"));
        // 8 vertices, 6 merged quad faces, 12 edges
        assert_eq!(lines.next(), Some("8 6 12"));
        assert!(off.contains("# vertex 0 exact: 0 0 0"));
        for line in off.lines().skip(2 + 16) {
            assert!(line.starts_with('4'));
        }
    }

    #[test]
    fn diamond_doc_volume() {
        let (doc, mesh) = diamond_doc().unwrap();
        assert_eq!(doc.volume.exact, "1/648");
        assert_eq!(mesh.vertices.len(), 5);
        assert_eq!(doc.points.len(), 5);
    }

    #[test]
    fn solve_doc_discrete() {
        let doc = solve_doc(
            3,
            StateSpace::new(3).unwrap(),
            &PairCost::discrete(3),
            Budget::default(),
        )
        .unwrap();
        assert_eq!(doc.optimal_value.exact, "0");
        assert!(doc.unique);
        assert!(doc.monge_attained);
        let mf = doc.mean_field.unwrap();
        assert_eq!(mf.bound.exact, "0");
        assert_eq!(mf.gap.exact, "0");
    }
}
