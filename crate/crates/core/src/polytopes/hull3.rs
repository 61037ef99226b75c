//! Exact incremental convex hull in three dimensions. Orientation tests are
//! exact rational determinants, so there is no epsilon tuning anywhere; the
//! facet list is a triangulation (coplanar facets are merged only when
//! writing meshes out).

use std::collections::{BTreeSet, HashSet};

use num_traits::{Signed, Zero};

use crate::exact::{rat, RatMatrix, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct HullMesh {
    /// Hull vertices, sorted lexicographically; every input point that is an
    /// extreme point appears exactly once.
    pub vertices: Vec<[Rational; 3]>,
    /// Outward-oriented triangles indexing `vertices`.
    pub facets: Vec<[usize; 3]>,
    pub affine_dimension: usize,
    /// Exact volume; zero iff the hull is lower-dimensional.
    pub volume: Rational,
}

fn sub(a: &[Rational; 3], b: &[Rational; 3]) -> [Rational; 3] {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn det3(r0: &[Rational; 3], r1: &[Rational; 3], r2: &[Rational; 3]) -> Rational {
    &r0[0] * (&r1[1] * &r2[2] - &r1[2] * &r2[1])
        - &r0[1] * (&r1[0] * &r2[2] - &r1[2] * &r2[0])
        + &r0[2] * (&r1[0] * &r2[1] - &r1[1] * &r2[0])
}

/// Sign of det(b-a, c-a, d-a): positive when `d` lies on the positive side
/// of the oriented plane through a, b, c.
fn orient(a: &[Rational; 3], b: &[Rational; 3], c: &[Rational; 3], d: &[Rational; 3]) -> i8 {
    let det = det3(&sub(b, a), &sub(c, a), &sub(d, a));
    if det.is_positive() {
        1
    } else if det.is_negative() {
        -1
    } else {
        0
    }
}

fn cross_is_zero(u: &[Rational; 3], v: &[Rational; 3]) -> bool {
    (&u[1] * &v[2] - &u[2] * &v[1]).is_zero()
        && (&u[2] * &v[0] - &u[0] * &v[2]).is_zero()
        && (&u[0] * &v[1] - &u[1] * &v[0]).is_zero()
}

/// Exact convex hull of rational 3-D points. Lower-dimensional inputs yield
/// an empty facet list, zero volume and the reported affine dimension.
pub fn hull3(points: &[[Rational; 3]]) -> Result<HullMesh> {
    if points.is_empty() {
        return Err(Error::InvalidInput("hull needs at least one point".into()));
    }
    let dedup: BTreeSet<[Rational; 3]> = points.iter().cloned().collect();
    let pts: Vec<[Rational; 3]> = dedup.into_iter().collect();

    let diffs: Vec<Vec<Rational>> = pts[1..]
        .iter()
        .map(|p| sub(p, &pts[0]).to_vec())
        .collect();
    let affine_dimension = if diffs.is_empty() {
        0
    } else {
        crate::exact::rank(&RatMatrix::from_rows(&diffs))
    };

    let dense: Vec<Vec<Rational>> = pts.iter().map(|p| p.to_vec()).collect();
    let flags = super::extreme_flags(&dense)?;
    let verts: Vec<[Rational; 3]> = pts
        .into_iter()
        .zip(&flags)
        .filter(|(_, f)| **f)
        .map(|(p, _)| p)
        .collect();

    if affine_dimension < 3 {
        return Ok(HullMesh {
            vertices: verts,
            facets: Vec::new(),
            affine_dimension,
            volume: Rational::zero(),
        });
    }
    let (facets, volume) = incremental(&verts)?;
    Ok(HullMesh {
        vertices: verts,
        facets,
        affine_dimension: 3,
        volume,
    })
}

fn incremental(verts: &[[Rational; 3]]) -> Result<(Vec<[usize; 3]>, Rational)> {
    let n = verts.len();
    let i0 = 0;
    let i1 = 1;
    let i2 = (2..n)
        .find(|&i| !cross_is_zero(&sub(&verts[i1], &verts[i0]), &sub(&verts[i], &verts[i0])))
        .ok_or_else(|| Error::Defect("3-D hull input is collinear".into()))?;
    let i3 = (2..n)
        .find(|&i| orient(&verts[i0], &verts[i1], &verts[i2], &verts[i]) != 0)
        .ok_or_else(|| Error::Defect("3-D hull input is coplanar".into()))?;

    let four = rat(4, 1);
    let reference: [Rational; 3] = std::array::from_fn(|k| {
        (&verts[i0][k] + &verts[i1][k] + &verts[i2][k] + &verts[i3][k]) / &four
    });

    let orient_out = |f: [usize; 3]| -> Result<[usize; 3]> {
        match orient(&verts[f[0]], &verts[f[1]], &verts[f[2]], &reference) {
            -1 => Ok(f),
            1 => Ok([f[0], f[2], f[1]]),
            _ => Err(Error::Defect("hull reference point lies on a facet".into())),
        }
    };

    let mut facets: Vec<[usize; 3]> = Vec::new();
    for f in [
        [i0, i1, i2],
        [i0, i1, i3],
        [i0, i2, i3],
        [i1, i2, i3],
    ] {
        facets.push(orient_out(f)?);
    }

    let seeded: HashSet<usize> = [i0, i1, i2, i3].into_iter().collect();
    for p in 0..n {
        if seeded.contains(&p) {
            continue;
        }
        let visible: Vec<usize> = (0..facets.len())
            .filter(|&f| {
                let [a, b, c] = facets[f];
                orient(&verts[a], &verts[b], &verts[c], &verts[p]) > 0
            })
            .collect();
        if visible.is_empty() {
            // every remaining point is an extreme point, so it must see at
            // least one facet of the partial hull
            return Err(Error::Defect(
                "extreme point not strictly outside the partial hull".into(),
            ));
        }
        let visible_set: HashSet<usize> = visible.iter().copied().collect();
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for &f in &visible {
            let [a, b, c] = facets[f];
            for (u, v) in [(a, b), (b, c), (c, a)] {
                edges.insert((u, v));
            }
        }
        let horizon: Vec<(usize, usize)> = edges
            .iter()
            .filter(|(u, v)| !edges.contains(&(*v, *u)))
            .copied()
            .collect();
        let mut keep: Vec<[usize; 3]> = (0..facets.len())
            .filter(|f| !visible_set.contains(f))
            .map(|f| facets[f])
            .collect();
        for (u, v) in horizon {
            keep.push(orient_out([u, v, p])?);
        }
        facets = keep;
    }

    let referenced: HashSet<usize> = facets.iter().flatten().copied().collect();
    if referenced.len() != n {
        return Err(Error::Defect(
            "hull facets do not reference every extreme point".into(),
        ));
    }

    let mut volume = Rational::zero();
    for [a, b, c] in &facets {
        volume += det3(
            &sub(&verts[*a], &reference),
            &sub(&verts[*b], &reference),
            &sub(&verts[*c], &reference),
        );
    }
    volume /= rat(6, 1);
    if !volume.is_positive() {
        return Err(Error::Defect("3-D hull volume is not positive".into()));
    }

    for f in facets.iter_mut() {
        let min = (0..3).min_by_key(|&k| f[k]).unwrap();
        f.rotate_left(min);
    }
    facets.sort_unstable();
    Ok((facets, volume))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_i64;

    fn p(x: i64, y: i64, z: i64) -> [Rational; 3] {
        [rat_i64(x), rat_i64(y), rat_i64(z)]
    }

    fn pr(x: (i64, i64), y: (i64, i64), z: (i64, i64)) -> [Rational; 3] {
        [rat(x.0, x.1), rat(y.0, y.1), rat(z.0, z.1)]
    }

    #[test]
    fn unit_tetrahedron() {
        let mesh = hull3(&[p(0, 0, 0), p(1, 0, 0), p(0, 1, 0), p(0, 0, 1)]).unwrap();
        assert_eq!(mesh.affine_dimension, 3);
        assert_eq!(mesh.vertices.len(), 4);
        assert_eq!(mesh.facets.len(), 4);
        assert_eq!(mesh.volume, rat(1, 6));
    }

    #[test]
    fn diamond_volume() {
        // two tetrahedra glued along the plane x+y+z = 1/6
        let mesh = hull3(&[
            p(0, 0, 0),
            pr((1, 6), (0, 1), (0, 1)),
            pr((0, 1), (1, 6), (0, 1)),
            pr((0, 1), (0, 1), (1, 6)),
            pr((1, 9), (1, 9), (1, 9)),
        ])
        .unwrap();
        assert_eq!(mesh.vertices.len(), 5);
        assert_eq!(mesh.volume, rat(1, 648));
    }

    #[test]
    fn coplanar_points() {
        let mesh = hull3(&[p(0, 0, 0), p(1, 0, 0), p(0, 1, 0), p(1, 1, 0)]).unwrap();
        assert_eq!(mesh.affine_dimension, 2);
        assert_eq!(mesh.volume, rat_i64(0));
        assert!(mesh.facets.is_empty());
        assert_eq!(mesh.vertices.len(), 4);
    }

    #[test]
    fn cube_with_noise_points() {
        let mut pts = Vec::new();
        for x in 0..=1 {
            for y in 0..=1 {
                for z in 0..=1 {
                    pts.push(p(x, y, z));
                }
            }
        }
        // face center, edge midpoint, interior point
        pts.push(pr((1, 2), (1, 2), (0, 1)));
        pts.push(pr((1, 2), (0, 1), (0, 1)));
        pts.push(pr((1, 2), (1, 2), (1, 2)));
        let mesh = hull3(&pts).unwrap();
        assert_eq!(mesh.vertices.len(), 8);
        assert_eq!(mesh.volume, rat_i64(1));
        // triangulated boundary of a cube: 12 triangles
        assert_eq!(mesh.facets.len(), 12);
    }

    #[test]
    fn volume_invariant_under_coordinate_permutation() {
        let pts = vec![
            p(0, 0, 0),
            p(2, 0, 0),
            p(0, 3, 0),
            p(0, 0, 4),
            p(1, 1, 2),
        ];
        let permuted: Vec<[Rational; 3]> = pts
            .iter()
            .map(|q| [q[2].clone(), q[0].clone(), q[1].clone()])
            .collect();
        let a = hull3(&pts).unwrap();
        let b = hull3(&permuted).unwrap();
        assert_eq!(a.volume, b.volume);
    }

    #[test]
    fn single_point_and_segment() {
        let mesh = hull3(&[p(1, 2, 3)]).unwrap();
        assert_eq!(mesh.affine_dimension, 0);
        assert_eq!(mesh.vertices.len(), 1);
        let mesh = hull3(&[p(0, 0, 0), p(1, 1, 1), p(2, 2, 2)]).unwrap();
        assert_eq!(mesh.affine_dimension, 1);
        assert_eq!(mesh.vertices.len(), 2);
    }
}
