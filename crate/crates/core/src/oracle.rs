//! Ground-truth congruence checks for small clouds.
//!
//! [`align_exhaustive`] tries every relabeling and solves the orthogonal
//! Procrustes problem for each (any `d`, `n ≤ 8`). [`align_frames`] anchors a
//! frame on one well-conditioned point pair of `X`, tries every matching
//! pair of `Y`, and matches the remaining points greedily (`d = 3`, any `n`).
//! The two are independent and are cross-checked in the tests.

use nalgebra::{DMatrix, DVector};

use crate::cloud::{dist, dot, PointCloud};
use crate::error::{GeoError, Result};
use crate::geo2::cross3;
use crate::group::{GroupElement, GroupKind};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const MAX_EXHAUSTIVE_N: usize = 8;

#[derive(Debug, Clone)]
pub struct AlignmentResult {
    pub equivalent: bool,
    /// Maps `X` onto `Y` when `equivalent`.
    pub witness: Option<GroupElement>,
    /// Largest point distance after the best alignment found (for an early
    /// exit, after the accepted witness).
    pub residual: f64,
}

fn check_shapes(x: &PointCloud, y: &PointCloud) -> Result<()> {
    if x.dim() != y.dim() || x.len() != y.len() {
        return Err(GeoError::Shape(format!(
            "cannot align {}×{} with {}×{}",
            x.dim(),
            x.len(),
            y.dim(),
            y.len()
        )));
    }
    Ok(())
}

/// Absolute threshold `tol · max(1, diam X, diam Y)`.
fn threshold(x: &PointCloud, y: &PointCloud, tol: f64) -> f64 {
    tol * x.diameter().max(y.diameter()).max(1.0)
}

/// Best `R` (in `SO(d)` when `proper`) minimizing `‖R·a_k − b_k‖` summed over
/// matched columns, where `b_k = y_{perm[k]}`.
pub fn procrustes(xc: &PointCloud, yc: &PointCloud, perm: &[usize], proper: bool) -> DMatrix<f64> {
    let d = xc.dim();
    let mut h = DMatrix::<f64>::zeros(d, d);
    for (k, &p) in perm.iter().enumerate() {
        let a = xc.point(k);
        let b = yc.point(p);
        for r in 0..d {
            for c in 0..d {
                h[(r, c)] += b[r] * a[c];
            }
        }
    }
    let svd = h.svd(true, true);
    let u = svd.u.unwrap();
    let v_t = svd.v_t.unwrap();
    let mut diag = DVector::from_element(d, 1.0);
    if proper && (&u * &v_t).determinant() < 0.0 {
        // flip the direction of the smallest singular value (nalgebra sorts descending)
        diag[d - 1] = -1.0;
    }
    u * DMatrix::from_diagonal(&diag) * v_t
}

fn max_residual(xc: &PointCloud, yc: &PointCloud, r: &DMatrix<f64>, perm: &[usize]) -> f64 {
    let moved = r * xc.matrix();
    let d = xc.dim();
    perm.iter()
        .enumerate()
        .map(|(k, &p)| dist(&moved.as_slice()[k * d..(k + 1) * d], yc.point(p)))
        .fold(0.0, f64::max)
}

fn witness(
    x: &PointCloud,
    y: &PointCloud,
    r: DMatrix<f64>,
    perm: Vec<usize>,
    proper: bool,
) -> GroupElement {
    let mx = DVector::from_vec(x.centroid());
    let my = DVector::from_vec(y.centroid());
    let t = my - &r * mx;
    let is_proper = proper || r.determinant() > 0.0;
    GroupElement::new(r.clone(), t.as_slice().to_vec(), perm.clone(), is_proper).unwrap_or_else(
        |_| {
            // Orthogonality within 1e-12 can fail by a few ulps for large d; re-orthonormalize.
            let svd = r.svd(true, true);
            let q = svd.u.unwrap() * svd.v_t.unwrap();
            GroupElement::new(q, t.as_slice().to_vec(), perm, is_proper)
                .expect("orthonormalized witness")
        },
    )
}

/// Visits every permutation of `0..n` (Heap's algorithm); stops when `f` returns true.
fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize]) -> bool) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    if f(&perm) {
        return;
    }
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if f(&perm) {
                return;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Exhaustive search over all `n!` relabelings.
pub fn align_exhaustive(
    x: &PointCloud,
    y: &PointCloud,
    group: GroupKind,
    tol: f64,
) -> Result<AlignmentResult> {
    check_shapes(x, y)?;
    if x.len() > MAX_EXHAUSTIVE_N {
        return Err(GeoError::TooLarge {
            what: "exhaustive alignment",
            max: MAX_EXHAUSTIVE_N,
            got: x.len(),
            hint: "use align_frames for larger clouds",
        });
    }
    let proper = group.is_proper();
    let thr = threshold(x, y, tol);
    let (xc, yc) = (x.center(), y.center());
    let mut best: Option<(f64, DMatrix<f64>, Vec<usize>)> = None;
    for_each_permutation(x.len(), |perm| {
        let r = procrustes(&xc, &yc, perm, proper);
        let res = max_residual(&xc, &yc, &r, perm);
        if best.as_ref().is_none_or(|b| res < b.0) {
            best = Some((res, r, perm.to_vec()));
        }
        res <= thr
    });
    let (residual, r, perm) = best.expect("at least one permutation");
    let equivalent = residual <= thr;
    Ok(AlignmentResult {
        equivalent,
        witness: equivalent.then(|| witness(x, y, r, perm, proper)),
        residual,
    })
}

/// One-to-one matching of `moved` points to `yc` points, closest pairs first.
fn greedy_match(moved: &DMatrix<f64>, yc: &PointCloud) -> Vec<usize> {
    let n = yc.len();
    let d = yc.dim();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for k in 0..n {
        let p = &moved.as_slice()[k * d..(k + 1) * d];
        for l in 0..n {
            pairs.push((dist(p, yc.point(l)), k, l));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut perm = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    let mut left = n;
    for (_, k, l) in pairs {
        if perm[k] == usize::MAX && !taken[l] {
            perm[k] = l;
            taken[l] = true;
            left -= 1;
            if left == 0 {
                break;
            }
        }
    }
    perm
}

fn frame_matrix(a: &[f64], b: &[f64], flip: bool) -> DMatrix<f64> {
    let mut c = cross3(a, b);
    if flip {
        c.iter_mut().for_each(|v| *v = -*v);
    }
    DMatrix::from_column_slice(
        3,
        3,
        &[a[0], a[1], a[2], b[0], b[1], b[2], c[0], c[1], c[2]],
    )
}

/// Frame-candidate search for clouds in `R^3`.
pub fn align_frames(
    x: &PointCloud,
    y: &PointCloud,
    group: GroupKind,
    tol: f64,
) -> Result<AlignmentResult> {
    check_shapes(x, y)?;
    if x.dim() != 3 {
        return Err(GeoError::Shape(format!(
            "frame alignment needs d = 3 (got d = {})",
            x.dim()
        )));
    }
    let proper = group.is_proper();
    let n = x.len();
    let thr = threshold(x, y, tol);
    let scale = x.diameter().max(y.diameter()).max(1.0);
    let (xc, yc) = (x.center(), y.center());

    let mut anchor = (0, 0, 0.0_f64);
    for i in 0..n {
        for j in 0..n {
            let c = cross3(xc.point(i), xc.point(j));
            let norm = dot(&c, &c).sqrt();
            if norm > anchor.2 {
                anchor = (i, j, norm);
            }
        }
    }
    if anchor.2 <= thr * scale {
        return align_collinear(x, y, &xc, &yc, proper, thr);
    }

    let (i, j, _) = anchor;
    let fx = frame_matrix(xc.point(i), xc.point(j), false);
    let fx_inv = fx
        .clone()
        .try_inverse()
        .ok_or_else(|| GeoError::Invalid("singular anchor frame".into()))?;
    let gram_tol = 4.0 * thr * scale;
    let (gii, gjj, gij) = (
        dot(xc.point(i), xc.point(i)),
        dot(xc.point(j), xc.point(j)),
        dot(xc.point(i), xc.point(j)),
    );
    let flips: &[bool] = if proper { &[false] } else { &[false, true] };

    let mut best: Option<(f64, DMatrix<f64>, Vec<usize>)> = None;
    'search: for s in 0..n {
        let ys = yc.point(s);
        if (dot(ys, ys) - gii).abs() > gram_tol {
            continue;
        }
        for t in 0..n {
            if t == s {
                continue;
            }
            let yt = yc.point(t);
            if (dot(yt, yt) - gjj).abs() > gram_tol || (dot(ys, yt) - gij).abs() > gram_tol {
                continue;
            }
            for &flip in flips {
                let candidate = frame_matrix(ys, yt, flip) * &fx_inv;
                let perm = greedy_match(&(&candidate * xc.matrix()), &yc);
                let r = procrustes(&xc, &yc, &perm, proper);
                let res = max_residual(&xc, &yc, &r, &perm);
                if best.as_ref().is_none_or(|b| res < b.0) {
                    best = Some((res, r, perm));
                }
                if res <= thr {
                    break 'search;
                }
            }
        }
    }
    Ok(match best {
        Some((residual, r, perm)) if residual <= thr => AlignmentResult {
            equivalent: true,
            witness: Some(witness(x, y, r, perm, proper)),
            residual,
        },
        Some((residual, ..)) => AlignmentResult {
            equivalent: false,
            witness: None,
            residual,
        },
        None => AlignmentResult {
            equivalent: false,
            witness: None,
            residual: f64::INFINITY,
        },
    })
}

/// Clouds of rank ≤ 1: compare sorted coordinates along the two lines.
fn align_collinear(
    x: &PointCloud,
    y: &PointCloud,
    xc: &PointCloud,
    yc: &PointCloud,
    proper: bool,
    thr: f64,
) -> Result<AlignmentResult> {
    let n = x.len();
    let direction = |c: &PointCloud| -> Vec<f64> {
        let far = (0..n)
            .max_by(|&a, &b| dot(c.point(a), c.point(a)).total_cmp(&dot(c.point(b), c.point(b))))
            .unwrap();
        let p = c.point(far);
        let norm = dot(p, p).sqrt();
        if norm == 0.0 {
            vec![1.0, 0.0, 0.0]
        } else {
            p.iter().map(|v| v / norm).collect()
        }
    };
    let (u, v) = (direction(xc), direction(yc));
    let mut best: Option<(f64, DMatrix<f64>, Vec<usize>)> = None;
    for sign in [1.0, -1.0] {
        let target: Vec<f64> = v.iter().map(|c| c * sign).collect();
        let r = rotation_between(&u, &target);
        let moved = &r * xc.matrix();
        // Sorted matching along the target line.
        let key_x: Vec<f64> = (0..n)
            .map(|k| dot(&moved.as_slice()[k * 3..k * 3 + 3], &v))
            .collect();
        let key_y: Vec<f64> = (0..n).map(|l| dot(yc.point(l), &v)).collect();
        let mut ox: Vec<usize> = (0..n).collect();
        let mut oy: Vec<usize> = (0..n).collect();
        ox.sort_by(|&a, &b| key_x[a].total_cmp(&key_x[b]));
        oy.sort_by(|&a, &b| key_y[a].total_cmp(&key_y[b]));
        let mut perm = vec![0; n];
        for (a, b) in ox.iter().zip(&oy) {
            perm[*a] = *b;
        }
        let res = max_residual(xc, yc, &r, &perm);
        if best.as_ref().is_none_or(|b| res < b.0) {
            best = Some((res, r, perm));
        }
    }
    let (residual, r, perm) = best.unwrap();
    let equivalent = residual <= thr;
    // A line is fixed by a reflection through any plane containing it, so
    // the proper and improper problems coincide.
    let _ = proper;
    Ok(AlignmentResult {
        equivalent,
        witness: equivalent.then(|| witness(x, y, r, perm, true)),
        residual,
    })
}

/// Proper rotation taking unit vector `u` to unit vector `v`: a Householder
/// reflection swapping them, followed by a reflection fixing `v`.
fn rotation_between(u: &[f64], v: &[f64]) -> DMatrix<f64> {
    let id = DMatrix::<f64>::identity(3, 3);
    let w: Vec<f64> = u.iter().zip(v).map(|(a, b)| a - b).collect();
    let wn = dot(&w, &w).sqrt();
    let h1 = if wn < 1e-12 {
        id.clone()
    } else {
        let w = DVector::from_vec(w) / wn;
        &id - 2.0 * &w * w.transpose()
    };
    // any unit vector orthogonal to v
    let pick = if v[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let o = cross3(v, &pick);
    let on = dot(&o, &o).sqrt();
    let o = DVector::from_column_slice(&o) / on;
    let h2 = &id - 2.0 * &o * o.transpose();
    let r = if wn < 1e-12 { id } else { h2 * h1 };
    debug_assert!(r.determinant() > 0.0);
    r
}
