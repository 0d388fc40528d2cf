//! Dense nonsymmetric complex eigenvalues at arbitrary precision.
//!
//! The matrix is first split into the connected components of its nonzero
//! pattern, each ordered breadth-first (a path graph becomes tridiagonal).
//! Every component is balanced, reduced to Hessenberg form by Householder
//! reflections, and deflated by single-shift QR with Wilkinson shifts. Only
//! eigenvalues are wanted, so rotations touch the active window alone.

use std::collections::VecDeque;

use rug::{Assign, Float};

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{PrecisionConfig, Scalar};

/// QR sweeps allowed per unit of dimension.
pub const SWEEPS_PER_DIMENSION: usize = 50;

/// Upper bound `dim 2^(10 - bits) ||M||` on the backward error of each
/// eigenvalue.
pub fn backward_error_bound(m: &DenseMatrix, bits: u32) -> Float {
    let norm = m.norm();
    let scale = Float::with_val(norm.prec(), 1) >> (bits as i32 - 10);
    Float::with_val(norm.prec(), &norm * &scale) * m.rows() as u32
}

/// All eigenvalues, with algebraic multiplicity, sorted by (re, im).
pub fn eigenvalues_all(m: &DenseMatrix, cfg: &PrecisionConfig) -> Result<Vec<Scalar>> {
    if !m.is_square() {
        return Err(Error::InvalidArgument(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let prec = cfg.precision_bits();
    let mut out = Vec::with_capacity(m.rows());
    for comp in components(m) {
        if comp.len() == 1 {
            out.push(m.get(comp[0], comp[0]).with_prec(prec));
            continue;
        }
        let mut h = m.submatrix(&comp);
        to_prec(&mut h, prec);
        balance(&mut h);
        hessenberg(&mut h);
        out.extend(hessenberg_qr(h, prec)?);
    }
    out.sort_by(|a, b| a.lex_cmp(b));
    Ok(out)
}

fn to_prec(h: &mut DenseMatrix, prec: u32) {
    if h.prec() == prec {
        return;
    }
    for i in 0..h.rows() {
        for j in 0..h.cols() {
            let x = h.get(i, j).with_prec(prec);
            h.set(i, j, x);
        }
    }
}

/// Connected components of the symmetrized nonzero pattern, each in BFS
/// order from a vertex of least degree.
fn components(m: &DenseMatrix) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if !m.get(i, j).is_zero() || !m.get(j, i).is_zero() {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut members = vec![s];
        label[s] = id;
        let mut k = 0;
        while k < members.len() {
            for &t in &adj[members[k]] {
                if label[t] == usize::MAX {
                    label[t] = id;
                    members.push(t);
                }
            }
            k += 1;
        }
        groups.push(members);
    }
    groups
        .into_iter()
        .map(|members| {
            let root = *members
                .iter()
                .min_by_key(|&&v| (adj[v].len(), v))
                .expect("nonempty component");
            let mut seen = vec![false; n];
            let mut order = Vec::with_capacity(members.len());
            let mut queue = VecDeque::from([root]);
            seen[root] = true;
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &t in &adj[v] {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
            order
        })
        .collect()
}

fn abs1(x: &Scalar) -> f64 {
    x.re().to_f64().abs() + x.im().to_f64().abs()
}

/// Diagonal similarity by powers of two that equalizes row and column norms.
fn balance(h: &mut DenseMatrix) {
    let n = h.rows();
    const RADIX: f64 = 2.0;
    let mut done = false;
    let mut rounds = 0;
    while !done && rounds < 100 {
        done = true;
        rounds += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(h.get(j, i));
                    r += abs1(h.get(i, j));
                }
            }
            if c == 0.0 || r == 0.0 || !c.is_finite() || !r.is_finite() {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    let x = h.get_mut(i, j);
                    let (re, im) = x.parts_mut();
                    *re /= f;
                    *im /= f;
                    let y = h.get_mut(j, i);
                    let (re, im) = y.parts_mut();
                    *re *= f;
                    *im *= f;
                }
            }
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form. Columns that
/// are already zero below the subdiagonal are skipped.
fn hessenberg(h: &mut DenseMatrix) {
    let n = h.rows();
    let prec = h.prec();
    for k in 0..n.saturating_sub(2) {
        if ((k + 2)..n).all(|i| h.get(i, k).is_zero()) {
            continue;
        }
        let x: Vec<Scalar> = ((k + 1)..n).map(|i| h.get(i, k).clone()).collect();
        let mut norm = Float::new(prec);
        for xi in &x {
            norm += xi.norm_sqr();
        }
        let norm = norm.sqrt();
        let x0_abs = x[0].abs();
        let phase = if x0_abs.is_zero() {
            Scalar::one(prec)
        } else {
            x[0].scale(&x0_abs.recip())
        };
        // v = x + phase ||x|| e1, reflector I - 2 v v^H / (v^H v)
        let mut v = x;
        v[0] = &v[0] + &phase.scale(&norm);
        let mut vnorm = Float::new(prec);
        for vi in &v {
            vnorm += vi.norm_sqr();
        }
        let two_over = Float::with_val(prec, 2) / vnorm;
        // left: rows k+1.., all columns
        for j in 0..n {
            let mut dot = Scalar::zero(prec);
            for (t, vi) in v.iter().enumerate() {
                dot = &dot + &(&vi.conj() * h.get(k + 1 + t, j));
            }
            let dot = dot.scale(&two_over);
            for (t, vi) in v.iter().enumerate() {
                let upd = h.get(k + 1 + t, j) - &(vi * &dot);
                h.set(k + 1 + t, j, upd);
            }
        }
        // right: all rows, columns k+1..
        for i in 0..n {
            let mut dot = Scalar::zero(prec);
            for (t, vi) in v.iter().enumerate() {
                dot = &dot + &(h.get(i, k + 1 + t) * vi);
            }
            let dot = dot.scale(&two_over);
            for (t, vi) in v.iter().enumerate() {
                let upd = h.get(i, k + 1 + t) - &(&dot * &vi.conj());
                h.set(i, k + 1 + t, upd);
            }
        }
        for i in (k + 2)..n {
            h.get_mut(i, k).set_zero();
        }
    }
}

/// Scratch registers for the in-place rotation.
struct Rot {
    c: Float,
    sr: Float,
    si: Float,
    t: Float,
    u: Float,
    w: Float,
}

impl Rot {
    fn new(prec: u32) -> Self {
        let f = || Float::new(prec);
        Self {
            c: f(),
            sr: f(),
            si: f(),
            t: f(),
            u: f(),
            w: f(),
        }
    }

    /// Plane rotation zeroing `g` against `f`: `c` real, `s = sgn(f) conj(g) / r`.
    fn compute(&mut self, f: &Scalar, g: &Scalar) {
        let prec = self.c.prec();
        let fa = f.abs();
        let ga = g.abs();
        if ga.is_zero() {
            self.c.assign(1);
            self.sr.assign(0);
            self.si.assign(0);
            return;
        }
        if fa.is_zero() {
            // s = conj(g) / |g|
            self.c.assign(0);
            self.sr.assign(g.re() / &ga);
            self.si.assign(-Float::with_val(prec, g.im() / &ga));
            return;
        }
        let r = Float::with_val(prec, fa.hypot_ref(&ga));
        self.c.assign(&fa / &r);
        // (f / |f|) conj(g) / r
        let ur = Float::with_val(prec, f.re() / &fa);
        let ui = Float::with_val(prec, f.im() / &fa);
        let den = Float::with_val(prec, &r);
        self.t.assign(&ur * g.re());
        self.u.assign(&ui * g.im());
        self.t += &self.u;
        self.sr.assign(&self.t / &den);
        self.t.assign(&ui * g.re());
        self.u.assign(&ur * g.im());
        self.t -= &self.u;
        self.si.assign(&self.t / &den);
    }

    /// `(x, y) <- (c x + s y, c y - conj(s) x)`; with `conj_s` the rotation
    /// uses `conj(s)` in place of `s`.
    fn apply(&mut self, x: &mut Scalar, y: &mut Scalar, conj_s: bool) {
        let sign_si = if conj_s { -1 } else { 1 };
        let (xr, xi) = x.parts_mut();
        let (yr, yi) = y.parts_mut();
        // x'r = c xr + sr yr - si yi
        self.t.assign(&self.c * &*xr);
        self.u.assign(&self.sr * &*yr);
        self.t += &self.u;
        self.u.assign(&self.si * &*yi);
        if sign_si > 0 {
            self.t -= &self.u;
        } else {
            self.t += &self.u;
        }
        // x'i = c xi + sr yi + si yr
        self.w.assign(&self.c * &*xi);
        self.u.assign(&self.sr * &*yi);
        self.w += &self.u;
        self.u.assign(&self.si * &*yr);
        if sign_si > 0 {
            self.w += &self.u;
        } else {
            self.w -= &self.u;
        }
        // y'r = c yr - sr xr - si xi
        *yr *= &self.c;
        self.u.assign(&self.sr * &*xr);
        *yr -= &self.u;
        self.u.assign(&self.si * &*xi);
        if sign_si > 0 {
            *yr -= &self.u;
        } else {
            *yr += &self.u;
        }
        // y'i = c yi - sr xi + si xr
        *yi *= &self.c;
        self.u.assign(&self.sr * &*xi);
        *yi -= &self.u;
        self.u.assign(&self.si * &*xr);
        if sign_si > 0 {
            *yi += &self.u;
        } else {
            *yi -= &self.u;
        }
        std::mem::swap(xr, &mut self.t);
        std::mem::swap(xi, &mut self.w);
    }
}

/// Eigenvalues of the 2x2 block `[[a, b], [c, d]]`.
fn eig2(a: &Scalar, b: &Scalar, c: &Scalar, d: &Scalar) -> (Scalar, Scalar) {
    let prec = a.prec();
    let half = Float::with_val(prec, 0.5);
    let mean = (a + d).scale(&half);
    let diff = (a - d).scale(&half);
    let disc = (&(&diff * &diff) + &(b * c)).sqrt();
    (&mean + &disc, &mean - &disc)
}

/// Wilkinson shift: the eigenvalue of the trailing 2x2 block nearer to `d`.
fn wilkinson(a: &Scalar, b: &Scalar, c: &Scalar, d: &Scalar) -> Scalar {
    let (l1, l2) = eig2(a, b, c, d);
    if (&l1 - d).abs() <= (&l2 - d).abs() {
        l1
    } else {
        l2
    }
}

/// Single-shift QR on an upper Hessenberg matrix.
fn hessenberg_qr(mut h: DenseMatrix, prec: u32) -> Result<Vec<Scalar>> {
    let n = h.rows();
    let ulp = Float::with_val(64, Float::with_val(64, 1) >> prec as i32);
    let ulp = ulp.to_f64().max(f64::MIN_POSITIVE);
    let small = |x: &Scalar, scale: f64| -> bool {
        let a = x.abs();
        Float::with_val(64, &a) <= Float::with_val(64, scale) * ulp
    };
    let norm_scale = h.norm().to_f64().max(f64::MIN_POSITIVE);
    let budget = SWEEPS_PER_DIMENSION * n;
    let mut sweeps = 0usize;
    let mut out = Vec::with_capacity(n);
    let mut rot = Rot::new(prec);
    let mut rots: Vec<(Float, Float, Float)> = Vec::with_capacity(n);
    let mut hi = n as isize - 1;
    let mut its = 0usize;
    while hi >= 0 {
        let i = hi as usize;
        // find the lowest negligible subdiagonal at or below i
        let mut l = i;
        while l > 0 {
            let scale = {
                let s = abs1(h.get(l, l)) + abs1(h.get(l - 1, l - 1));
                if s == 0.0 {
                    norm_scale
                } else {
                    s
                }
            };
            if small(h.get(l, l - 1), scale) {
                h.get_mut(l, l - 1).set_zero();
                break;
            }
            l -= 1;
        }
        if l == i {
            out.push(h.get(i, i).clone());
            hi -= 1;
            its = 0;
            continue;
        }
        if l + 1 == i {
            let (e1, e2) = eig2(h.get(l, l), h.get(l, i), h.get(i, l), h.get(i, i));
            out.push(e1);
            out.push(e2);
            hi -= 2;
            its = 0;
            continue;
        }
        sweeps += 1;
        if sweeps > budget {
            return Err(Error::NumericalFailure(format!(
                "QR did not converge after {budget} sweeps (dimension {n})"
            )));
        }
        its += 1;
        let mu = if its % 11 == 10 {
            // exceptional shift
            let bump = Float::with_val(prec, 0.75) * h.get(i, i - 1).abs();
            h.get(i, i) + &Scalar::from_real(bump)
        } else {
            wilkinson(h.get(i - 1, i - 1), h.get(i - 1, i), h.get(i, i - 1), h.get(i, i))
        };
        for k in l..=i {
            let d = h.get(k, k) - &mu;
            h.set(k, k, d);
        }
        rots.clear();
        for k in l..i {
            rot.compute(h.get(k, k), h.get(k + 1, k));
            for j in k..=i {
                let (x, y) = h.pair_mut((k, j), (k + 1, j));
                rot.apply(x, y, false);
            }
            h.get_mut(k + 1, k).set_zero();
            rots.push((rot.c.clone(), rot.sr.clone(), rot.si.clone()));
        }
        for (t, (c, sr, si)) in rots.iter().enumerate() {
            let k = l + t;
            rot.c.assign(c);
            rot.sr.assign(sr);
            rot.si.assign(si);
            for r in l..=(k + 1).min(i) {
                let (x, y) = h.pair_mut((r, k), (r, k + 1));
                rot.apply(x, y, true);
            }
        }
        for k in l..=i {
            let d = h.get(k, k) + &mu;
            h.set(k, k, d);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 192;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::new(P, 1e-40).unwrap()
    }

    fn c(re: f64, im: f64) -> Scalar {
        Scalar::from_f64(P, re, im)
    }

    fn close(a: &Scalar, b: &Scalar, tol: f64) -> bool {
        (a - b).abs_f64() <= tol
    }

    #[test]
    fn diagonal_is_exact() {
        let z = || c(0.0, 0.0);
        let m = DenseMatrix::from_rows(vec![
            vec![c(1.0, 0.0), z(), z()],
            vec![z(), c(2.0, 1.0), z()],
            vec![z(), z(), c(-3.0, 0.0)],
        ])
        .unwrap();
        let ev = eigenvalues_all(&m, &cfg()).unwrap();
        let got: Vec<_> = ev.iter().map(Scalar::to_c64).collect();
        assert_eq!(got, vec![(-3.0, 0.0), (1.0, 0.0), (2.0, 1.0)]);
    }

    #[test]
    fn swap_matrix() {
        let m = DenseMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let ev = eigenvalues_all(&m, &cfg()).unwrap();
        assert!(close(&ev[0], &c(-1.0, 0.0), 1e-50));
        assert!(close(&ev[1], &c(1.0, 0.0), 1e-50));
    }

    #[test]
    fn companion_matrix_roots() {
        // companion of (x-1)(x-2)(x-3)(x-4)(x-5i) with a nontrivial Hessenberg step
        let roots = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0), c(0.0, 5.0)];
        let mut coeffs = vec![c(1.0, 0.0)];
        for r in &roots {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (k, a) in coeffs.iter().enumerate() {
                next[k] = &next[k] + a;
                next[k + 1] = &next[k + 1] - &(a * r);
            }
            coeffs = next;
        }
        let n = roots.len();
        let mut rows = vec![vec![c(0.0, 0.0); n]; n];
        for j in 0..n {
            rows[0][j] = -&coeffs[j + 1];
        }
        for i in 1..n {
            rows[i][i - 1] = c(1.0, 0.0);
        }
        // similarity by S = I + t e_3 e_0^T leaves the roots and breaks the
        // Hessenberg form, so the Householder stage has work to do
        let t = c(0.5, 0.25);
        let row0 = rows[0].clone();
        for j in 0..n {
            rows[3][j] = &rows[3][j] + &(&t * &row0[j]);
        }
        for row in rows.iter_mut() {
            row[0] = &row[0] - &(&t * &row[3]);
        }
        let m = DenseMatrix::from_rows(rows).unwrap();
        let ev = eigenvalues_all(&m, &cfg()).unwrap();
        assert_eq!(ev.len(), n);
        let mut want = roots.to_vec();
        want.sort_by(|a, b| a.lex_cmp(b));
        for (got, want) in ev.iter().zip(&want) {
            assert!(close(got, want, 1e-40), "{got} vs {want}");
        }
    }

    #[test]
    fn random_matrix_invariants() {
        // deterministic pseudo-random complex matrix; check trace and
        // determinant against the eigenvalues
        let n = 7;
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let rows: Vec<Vec<Scalar>> = (0..n).map(|_| (0..n).map(|_| c(next(), next())).collect()).collect();
        let m = DenseMatrix::from_rows(rows).unwrap();
        let ev = eigenvalues_all(&m, &cfg()).unwrap();
        let trace = (0..n).fold(c(0.0, 0.0), |acc, i| &acc + m.get(i, i));
        let sum = ev.iter().fold(c(0.0, 0.0), |acc, e| &acc + e);
        assert!(close(&trace, &sum, 1e-50));
        // det(M - lambda I) vanishes at each eigenvalue
        for e in &ev {
            let mut a: Vec<Vec<Scalar>> = (0..n)
                .map(|i| (0..n).map(|j| if i == j { m.get(i, j) - e } else { m.get(i, j).clone() }).collect())
                .collect();
            let mut det = c(1.0, 0.0);
            for k in 0..n {
                let p = (k..n)
                    .max_by(|&x, &y| a[x][k].abs().partial_cmp(&a[y][k].abs()).unwrap())
                    .unwrap();
                a.swap(k, p);
                det = &det * &a[k][k];
                for i in (k + 1)..n {
                    let f = &a[i][k] / &a[k][k];
                    for j in k..n {
                        a[i][j] = &a[i][j] - &(&f * &a[k][j]);
                    }
                }
            }
            assert!(det.abs_f64() < 1e-45, "{det}");
        }
    }

    #[test]
    fn backward_bound_scales_with_precision() {
        let m = DenseMatrix::from_rows(vec![vec![c(3.0, 4.0)]]).unwrap();
        let b = backward_error_bound(&m, 20).to_f64();
        assert!((b - 5.0 / 1024.0).abs() < 1e-12);
    }
}
