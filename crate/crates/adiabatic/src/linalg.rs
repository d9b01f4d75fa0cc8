//! Dense complex Hermitian linear algebra and spectral-curve utilities.
//!
//! This module provides the eigendecomposition and gauge-transport machinery
//! that everything else builds on: a deterministic Hermitian eigensolver
//! (Householder tridiagonalisation followed by implicit-shift QL), spectral
//! norms, parallel transport of eigenframes along s, minimum ground gaps, and
//! sup-norms of Hamiltonian derivatives.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{cumulative_integral, golden_min};

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITICITY_REL_TOL: f64 = 1e-12;

/// Relative tolerance below which two eigenvalues are treated as degenerate.
pub const GAP_REL_TOL: f64 = 1e-10;

/// Relative tolerance for grouping eigenvalues into clusters during transport.
pub(crate) const CLUSTER_REL_TOL: f64 = 1e-8;

/// Maximum QL iterations per eigenvalue before reporting non-convergence.
const MAX_QL_ITERATIONS: usize = 50;

// ---------------------------------------------------------------------------
// Complex vectors
// ---------------------------------------------------------------------------

/// Inner product conj(a) . b with the physics convention (antilinear in a).
pub fn vdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm of a complex vector.
pub fn vnorm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// CMatrix
// ---------------------------------------------------------------------------

/// Dense square complex matrix in row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Zero matrix of dimension n.
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    /// Identity matrix of dimension n.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build a matrix from an entry function (i, j) -> M_ij.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        CMatrix { n, data }
    }

    /// Real diagonal matrix.
    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = Complex64::new(e, 0.0);
        }
        m
    }

    /// Rank-one matrix |u><v|.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        let n = u.len();
        debug_assert_eq!(n, v.len());
        Self::from_fn(n, |i, j| u[i] * v[j].conj())
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Matrix-vector product M v.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.n);
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, x) in row.iter().zip(v) {
                acc += m * x;
            }
            out[i] = acc;
        }
        out
    }

    /// Matrix product self * rhs.
    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    /// Entrywise sum self + rhs.
    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Entrywise difference self - rhs.
    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Entrywise scaling by a real factor.
    pub fn scaled(&self, factor: f64) -> CMatrix {
        CMatrix { n: self.n, data: self.data.iter().map(|a| a * factor).collect() }
    }

    /// Real linear combination of matrices of equal dimension.
    pub fn linear_combination(terms: &[(f64, &CMatrix)]) -> CMatrix {
        assert!(!terms.is_empty());
        let n = terms[0].1.n;
        let mut out = CMatrix::zeros(n);
        for (c, m) in terms {
            debug_assert_eq!(m.n, n);
            for (o, x) in out.data.iter_mut().zip(&m.data) {
                *o += x * *c;
            }
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation from Hermiticity, max_ij |M_ij - conj(M_ji)|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Hermitian part (M + M^dagger) / 2.
    fn hermitian_part(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |i, j| 0.5 * (self[(i, j)] + self[(j, i)].conj()))
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver
// ---------------------------------------------------------------------------

/// Core symmetric eigensolver: Householder tridiagonalisation, subdiagonal
/// phase normalisation, then implicit-shift QL. The input is assumed exactly
/// Hermitian. Returns eigenvalues in ascending order; eigenvectors (when
/// requested) are orthonormal columns in the matching order, without any
/// phase canonicalisation.
pub(crate) fn eigh_core(
    matrix: &CMatrix,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<Vec<Complex64>>>)> {
    let n = matrix.dim();
    if n == 0 {
        return Ok((Vec::new(), if want_vectors { Some(Vec::new()) } else { None }));
    }
    if n == 1 {
        let vecs = want_vectors.then(|| vec![vec![Complex64::new(1.0, 0.0)]]);
        return Ok((vec![matrix[(0, 0)].re], vecs));
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut a = matrix.clone();
    let mut q = CMatrix::identity(n);

    // Householder reduction to Hermitian tridiagonal form.
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    let mut w = vec![zero; n];
    for k in 0..n.saturating_sub(2) {
        let mut tail2 = 0.0;
        for i in k + 2..n {
            tail2 += a[(i, k)].norm_sqr();
        }
        if tail2 == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let x0n = x0.norm();
        let xnorm = (x0.norm_sqr() + tail2).sqrt();
        let phase = if x0n > 0.0 { x0 / x0n } else { Complex64::new(1.0, 0.0) };
        let beta = -phase * xnorm;
        for item in v.iter_mut().take(k + 1) {
            *item = zero;
        }
        v[k + 1] = x0 - beta;
        for i in k + 2..n {
            v[i] = a[(i, k)];
        }
        let vnorm2 = (x0n + xnorm) * (x0n + xnorm) + tail2;
        let tau = 2.0 / vnorm2;
        // p = tau * A v restricted to the trailing block.
        for i in k + 1..n {
            let mut acc = zero;
            for j in k + 1..n {
                acc += a[(i, j)] * v[j];
            }
            p[i] = acc * tau;
        }
        // kappa = (tau / 2) v^dagger p; real for Hermitian A.
        let mut kappa = 0.0;
        for i in k + 1..n {
            kappa += (v[i].conj() * p[i]).re;
        }
        kappa *= 0.5 * tau;
        for i in k + 1..n {
            w[i] = p[i] - v[i] * kappa;
        }
        // A <- A - v w^dagger - w v^dagger on the trailing block.
        for i in k + 1..n {
            for j in k + 1..n {
                let delta = v[i] * w[j].conj() + w[i] * v[j].conj();
                a[(i, j)] -= delta;
            }
        }
        a[(k + 1, k)] = beta;
        a[(k, k + 1)] = beta.conj();
        for i in k + 2..n {
            a[(i, k)] = zero;
            a[(k, i)] = zero;
        }
        // Q <- Q (1 - tau v v^dagger).
        for r in 0..n {
            let mut t = zero;
            for c in k + 1..n {
                t += q[(r, c)] * v[c];
            }
            let t = t * tau;
            for c in k + 1..n {
                let delta = t * v[c].conj();
                q[(r, c)] -= delta;
            }
        }
    }

    // Extract the tridiagonal data and rotate away subdiagonal phases so the
    // QL sweep can work with a real symmetric tridiagonal matrix. Column j of
    // Q absorbs the accumulated unit phase u_j.
    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e = vec![0.0; n];
    let mut u = vec![Complex64::new(1.0, 0.0); n];
    for i in 0..n - 1 {
        let sub = a[(i + 1, i)];
        let ab = sub.norm();
        u[i + 1] = if ab > 0.0 { u[i] * (sub / ab) } else { u[i] };
        e[i] = ab;
    }
    for (j, uj) in u.iter().enumerate() {
        for r in 0..n {
            q[(r, j)] *= uj;
        }
    }

    // Implicit-shift QL with deflation.
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence { iterations: MAX_QL_ITERATIONS });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut pp) = (1.0, 1.0, 0.0);
            let mut restarted = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= pp;
                    e[m] = 0.0;
                    restarted = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - pp;
                r = (d[i] - g) * s + 2.0 * c * b;
                pp = s * r;
                d[i + 1] = g + pp;
                g = c * r - b;
                for row in 0..n {
                    let t = q[(row, i + 1)];
                    q[(row, i + 1)] = q[(row, i)] * s + t * c;
                    q[(row, i)] = q[(row, i)] * c - t * s;
                }
            }
            if restarted {
                continue;
            }
            d[l] -= pp;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // Ascending sort.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("eigenvalues are finite"));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| {
        order
            .iter()
            .map(|&j| (0..n).map(|r| q[(r, j)]).collect::<Vec<Complex64>>())
            .collect::<Vec<_>>()
    });
    Ok((eigenvalues, vectors))
}

/// Multiply a vector by the unit phase that makes its first significant
/// component (magnitude >= 1e-8 of the largest) real and positive.
fn canonicalize_phase(v: &mut [Complex64]) {
    let vmax = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if vmax == 0.0 {
        return;
    }
    let lead = v.iter().find(|x| x.norm() >= 1e-8 * vmax);
    if let Some(&x) = lead {
        let phase = x.conj() / x.norm();
        for c in v.iter_mut() {
            *c *= phase;
        }
    }
}

/// Total lexicographic order on complex vectors by (re, im) per component.
fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.re.partial_cmp(&y.re).expect("finite") {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
        match x.im.partial_cmp(&y.im).expect("finite") {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Group ascending eigenvalues into clusters of near-degenerate levels.
/// Returns half-open index ranges; `rel_tol` is taken relative to
/// max(max |E|, 1).
fn cluster_ranges(eigenvalues: &[f64], rel_tol: f64) -> Vec<std::ops::Range<usize>> {
    let n = eigenvalues.len();
    let scale = eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1.0);
    let tol = rel_tol * scale;
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..n {
        if (eigenvalues[i] - eigenvalues[i - 1]).abs() > tol {
            out.push(start..i);
            start = i;
        }
    }
    if n > 0 {
        out.push(start..n);
    }
    out
}

/// Instantaneous spectral data of H at a fixed s.
///
/// `eigenvectors[k]` is the unit eigenvector for `eigenvalues[k]`. Fresh
/// decompositions are in ascending eigenvalue order with canonical phases;
/// transported spectra keep the level ordering of their transport anchor, so
/// index 0 always follows the tracked ground state.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// The s value this spectrum belongs to.
    pub s: f64,
    /// Eigenvalues, one per level.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, one per level.
    pub eigenvectors: Vec<Vec<Complex64>>,
    /// The s value of the transport chain origin, if this spectrum was
    /// produced by gauge transport.
    pub gauge_anchor: Option<f64>,
}

impl Spectrum {
    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Tracked ground-state eigenvector.
    pub fn ground(&self) -> &[Complex64] {
        &self.eigenvectors[0]
    }

    /// Energy distance of level `nu` above the tracked ground state.
    pub fn ground_gap(&self, nu: usize) -> f64 {
        self.eigenvalues[nu] - self.eigenvalues[0]
    }

    /// Smallest |E_nu - E_ground| over all excited levels.
    pub fn min_ground_gap(&self) -> f64 {
        (1..self.dim())
            .map(|nu| (self.eigenvalues[nu] - self.eigenvalues[0]).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Reassemble sum_k E_k |k><k| (used to test the decomposition).
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n);
        for (e, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += v[i] * v[j].conj() * *e;
                }
            }
        }
        m
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// The matrix must be Hermitian to within `HERMITICITY_REL_TOL` relative to
/// its largest entry. Output levels are sorted by ascending eigenvalue; each
/// eigenvector carries the canonical phase (first significant component real
/// positive), and within a degenerate cluster (eigenvalues closer than
/// `GAP_REL_TOL` relative to the spectral scale) vectors are ordered
/// lexicographically, which makes the output deterministic down to the bit
/// pattern.
///
/// The `s` and `gauge_anchor` fields of the result are 0 and `None`; callers
/// tracking a spectral curve overwrite `s` (see [`spectrum_at`]).
pub fn hermitian_eigs(matrix: &CMatrix) -> Result<Spectrum> {
    let scale = matrix.max_abs();
    let deviation = matrix.hermiticity_deviation();
    let tolerance = HERMITICITY_REL_TOL * scale;
    if deviation > tolerance {
        return Err(Error::NonHermitian { deviation, tolerance });
    }
    let sym = matrix.hermitian_part();
    let (eigenvalues, vectors) = eigh_core(&sym, true)?;
    let mut eigenvectors = vectors.expect("vectors requested");
    for v in eigenvectors.iter_mut() {
        canonicalize_phase(v);
    }
    for range in cluster_ranges(&eigenvalues, GAP_REL_TOL) {
        if range.len() > 1 {
            eigenvectors[range].sort_by(|a, b| lex_cmp(a, b));
        }
    }
    Ok(Spectrum { s: 0.0, eigenvalues, eigenvectors, gauge_anchor: None })
}

/// Eigenvalues only (ascending) of a matrix assumed Hermitian; skips the
/// Hermiticity check and all canonicalisation. Used in inner loops.
pub(crate) fn eigenvalues_only(matrix: &CMatrix) -> Result<Vec<f64>> {
    let (vals, _) = eigh_core(&matrix.hermitian_part(), false)?;
    Ok(vals)
}

/// Spectral norm (largest singular value).
///
/// Hermitian inputs (to within the usual tolerance) take the direct route of
/// max |eigenvalue|; general matrices go through the Gram matrix.
pub fn spectral_norm(matrix: &CMatrix) -> Result<f64> {
    let n = matrix.dim();
    if n == 0 {
        return Ok(0.0);
    }
    let scale = matrix.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    if matrix.hermiticity_deviation() <= HERMITICITY_REL_TOL * scale {
        let vals = eigenvalues_only(matrix)?;
        Ok(vals.iter().fold(0.0f64, |m, &x| m.max(x.abs())))
    } else {
        let gram = matrix.adjoint().matmul(matrix);
        let vals = eigenvalues_only(&gram)?;
        Ok(vals.iter().fold(0.0f64, |m, &x| m.max(x)).max(0.0).sqrt())
    }
}

// ---------------------------------------------------------------------------
// Gauge transport
// ---------------------------------------------------------------------------

/// Parallel-transport the eigenframe of `prev` onto the spectrum `cur`.
///
/// `cur` must be a fresh decomposition (ascending levels) at a nearby s.
/// Levels of `prev` are matched to near-degenerate clusters of `cur` by
/// projection mass, largest mass first, respecting cluster capacities; a best
/// mass below 0.5 means the step was too large to identify levels and raises
/// `AmbiguousMatching`. Within a cluster the matched vectors are aligned by
/// symmetric (Loewdin) orthogonalisation, which maximises continuity with the
/// previous frame and leaves every diagonal overlap <prev_k | new_k> real and
/// positive — the discrete version of the parallel-transport gauge
/// <nu_dot | nu> = 0.
///
/// The output keeps the level indexing of `prev` (index 0 remains the tracked
/// ground state) and records the chain origin in `gauge_anchor`.
pub fn gauge_transport(prev: &Spectrum, cur: &Spectrum) -> Result<Spectrum> {
    let n = prev.dim();
    if cur.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: cur.dim() });
    }
    if n == 0 {
        return Ok(cur.clone());
    }

    // Cluster the current levels. Fresh spectra are ascending already; sort
    // indices defensively so the adjacency grouping is valid regardless.
    let mut cur_order: Vec<usize> = (0..n).collect();
    cur_order.sort_by(|&i, &j| {
        cur.eigenvalues[i].partial_cmp(&cur.eigenvalues[j]).expect("finite")
    });
    let sorted_vals: Vec<f64> = cur_order.iter().map(|&i| cur.eigenvalues[i]).collect();
    let ranges = cluster_ranges(&sorted_vals, CLUSTER_REL_TOL);
    let clusters: Vec<Vec<usize>> =
        ranges.iter().map(|r| cur_order[r.clone()].to_vec()).collect();

    // Projection mass of every previous level on every cluster.
    let mut mass = vec![vec![0.0f64; clusters.len()]; n];
    for p in 0..n {
        for (ci, members) in clusters.iter().enumerate() {
            let m2: f64 = members
                .iter()
                .map(|&c| vdot(&cur.eigenvectors[c], &prev.eigenvectors[p]).norm_sqr())
                .sum();
            mass[p][ci] = m2.sqrt();
        }
    }

    // Greedy capacity-respecting assignment, most confident level first.
    let mut level_order: Vec<usize> = (0..n).collect();
    level_order.sort_by(|&a, &b| {
        let ma = mass[a].iter().cloned().fold(0.0f64, f64::max);
        let mb = mass[b].iter().cloned().fold(0.0f64, f64::max);
        mb.partial_cmp(&ma).expect("finite").then(a.cmp(&b))
    });
    let mut capacity: Vec<usize> = clusters.iter().map(|c| c.len()).collect();
    let mut assigned_cluster = vec![usize::MAX; n];
    for &p in &level_order {
        let mut best = usize::MAX;
        let mut best_mass = -1.0;
        for (ci, &cap) in capacity.iter().enumerate() {
            if cap > 0 && mass[p][ci] > best_mass {
                best = ci;
                best_mass = mass[p][ci];
            }
        }
        if best == usize::MAX || best_mass < 0.5 {
            return Err(Error::AmbiguousMatching {
                s: cur.s,
                level: p,
                overlap: best_mass.max(0.0),
            });
        }
        assigned_cluster[p] = best;
        capacity[best] -= 1;
    }

    // Align each cluster with its assigned previous levels.
    let zero = Complex64::new(0.0, 0.0);
    let mut out_vecs: Vec<Vec<Complex64>> = vec![Vec::new(); n];
    let mut out_vals = vec![0.0f64; n];
    for (ci, members) in clusters.iter().enumerate() {
        let mut assigned: Vec<usize> =
            (0..n).filter(|&p| assigned_cluster[p] == ci).collect();
        assigned.sort_unstable();
        let k = members.len();
        debug_assert_eq!(assigned.len(), k);
        if k == 1 {
            let c = members[0];
            let p = assigned[0];
            let mut v = cur.eigenvectors[c].clone();
            let o = vdot(&prev.eigenvectors[p], &v);
            let on = o.norm();
            if on < 0.5 {
                return Err(Error::AmbiguousMatching { s: cur.s, level: p, overlap: on });
            }
            let phase = o.conj() / on;
            for x in v.iter_mut() {
                *x *= phase;
            }
            out_vecs[p] = v;
            out_vals[p] = cur.eigenvalues[c];
            continue;
        }
        // Overlap block M[c][i] = <cur_c | prev_i> and its Gram matrix.
        let mut m = CMatrix::zeros(k);
        for (a, &c) in members.iter().enumerate() {
            for (b, &p) in assigned.iter().enumerate() {
                m[(a, b)] = vdot(&cur.eigenvectors[c], &prev.eigenvectors[p]);
            }
        }
        let gram = m.adjoint().matmul(&m);
        let (gvals, gvecs) = eigh_core(&gram, true)?;
        let gvecs = gvecs.expect("vectors requested");
        let gmax = gvals.iter().fold(0.0f64, |mx, &x| mx.max(x)).max(1.0);
        if gvals[0] <= 1e-12 * gmax {
            return Err(Error::AmbiguousMatching {
                s: cur.s,
                level: assigned[0],
                overlap: gvals[0].max(0.0).sqrt(),
            });
        }
        // B = M G^{-1/2}; column i of B expresses the transported vector for
        // assigned[i] in the cluster basis.
        let mut ginvsqrt = CMatrix::zeros(k);
        for a in 0..k {
            for b in 0..k {
                let mut acc = zero;
                for (t, gv) in gvals.iter().enumerate() {
                    acc += gvecs[t][a] * gvecs[t][b].conj() / gv.sqrt();
                }
                ginvsqrt[(a, b)] = acc;
            }
        }
        let bmat = m.matmul(&ginvsqrt);
        for (i, &p) in assigned.iter().enumerate() {
            let mut v = vec![zero; n];
            for (a, &c) in members.iter().enumerate() {
                let coeff = bmat[(a, i)];
                for (x, y) in v.iter_mut().zip(&cur.eigenvectors[c]) {
                    *x += coeff * y;
                }
            }
            // Polish the parallel-transport phase exactly.
            let o = vdot(&prev.eigenvectors[p], &v);
            let on = o.norm();
            if on < 1e-12 {
                return Err(Error::AmbiguousMatching { s: cur.s, level: p, overlap: on });
            }
            let phase = o.conj() / on;
            for x in v.iter_mut() {
                *x *= phase;
            }
            out_vecs[p] = v;
            // Pair ascending assigned indices with ascending cluster energies.
            out_vals[p] = cur.eigenvalues[members[i]];
        }
    }

    Ok(Spectrum {
        s: cur.s,
        eigenvalues: out_vals,
        eigenvectors: out_vecs,
        gauge_anchor: prev.gauge_anchor.or(Some(prev.s)),
    })
}

// ---------------------------------------------------------------------------
// Hamiltonian abstraction
// ---------------------------------------------------------------------------

/// A time-dependent Hamiltonian curve H(s), s in [0, 1].
///
/// Models are assumed entire in s, so derivative stencils may evaluate
/// slightly outside [0, 1].
pub trait Hamiltonian {
    /// Hilbert-space dimension.
    fn dim(&self) -> usize;

    /// H(s).
    fn evaluate(&self, s: f64) -> CMatrix;

    /// k-th derivative of H with respect to s, k in {1, 2, 3}.
    fn derivative(&self, s: f64, k: usize) -> CMatrix;

    /// Whether the family depends on the total time T (so norms and bounds
    /// must be recomputed per T).
    fn t_dependent(&self) -> bool {
        false
    }

    /// Characteristic s-scale of variation, used to size difference stencils.
    fn time_scale(&self) -> f64 {
        1.0
    }

    /// Recommended uniform sample count for sup-norm and gap scans.
    fn suggested_samples(&self) -> usize {
        1025
    }

    /// Whether `derivative` is analytic (true) or a difference quotient.
    fn analytic_derivatives(&self) -> bool {
        true
    }

    /// Short family name for diagnostics.
    fn name(&self) -> &'static str {
        "custom"
    }

    /// Estimate of max_s ||H(s)|| used to size propagation steps.
    fn norm_estimate(&self) -> Result<f64> {
        let mut hmax = 0.0f64;
        for j in 0..129 {
            let s = j as f64 / 128.0;
            hmax = hmax.max(spectral_norm(&self.evaluate(s))?);
        }
        Ok(hmax)
    }
}

/// Eigendecomposition of H(s) with the `s` coordinate recorded.
pub fn spectrum_at<H: Hamiltonian + ?Sized>(model: &H, s: f64) -> Result<Spectrum> {
    let mut sp = hermitian_eigs(&model.evaluate(s))?;
    sp.s = s;
    Ok(sp)
}

/// Finite-difference derivative of H, used to cross-check analytic
/// derivatives and to serve models without them. Fourth-order central
/// stencils; the step is sized as eps^(1/(k+2)) times the model time scale.
pub fn fd_derivative<H: Hamiltonian + ?Sized>(model: &H, s: f64, k: usize) -> Result<CMatrix> {
    let h = f64::EPSILON.powf(1.0 / (k as f64 + 2.0)) * model.time_scale();
    if h < 1e-14 {
        return Err(Error::DifferentiationFailure { step: h });
    }
    let at = |offset: f64| model.evaluate(s + offset * h);
    let stencil: &[(f64, f64)] = match k {
        1 => &[(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)],
        2 => &[(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)],
        3 => &[
            (-3.0, 1.0),
            (-2.0, -8.0),
            (-1.0, 13.0),
            (1.0, -13.0),
            (2.0, 8.0),
            (3.0, -1.0),
        ],
        _ => {
            return Err(Error::InvalidParameter(format!(
                "derivative order {k} not supported (1..=3)"
            )))
        }
    };
    let denom = match k {
        1 => 12.0 * h,
        2 => 12.0 * h * h,
        _ => 8.0 * h * h * h,
    };
    let mats: Vec<(f64, CMatrix)> =
        stencil.iter().map(|&(o, c)| (c / denom, at(o))).collect();
    let refs: Vec<(f64, &CMatrix)> = mats.iter().map(|(c, m)| (*c, m)).collect();
    Ok(CMatrix::linear_combination(&refs))
}

// ---------------------------------------------------------------------------
// Gauge field: transported frame along the whole curve
// ---------------------------------------------------------------------------

/// Eigenframe of H(s) parallel-transported along a uniform grid, together
/// with cumulative energy integrals per level.
///
/// The chain is anchored at s = 0. Within any degenerate cluster at the
/// anchor the eigenbasis is fixed by first-order perturbation theory in
/// H'(0): the cluster block of H'(0) is diagonalised and branches are ordered
/// by ascending block eigenvalue, so the anchor labels the levels the way
/// they split for s slightly above 0. That keeps level indices meaningful
/// (and deterministic) even when the spectrum is degenerate at the endpoint.
#[derive(Clone, Debug)]
pub struct GaugeField {
    s: Vec<f64>,
    spectra: Vec<Spectrum>,
    cum_energy: Vec<Vec<f64>>,
}

impl GaugeField {
    /// Transport the eigenframe along `steps` uniform intervals of [0, 1].
    pub fn build<H: Hamiltonian + ?Sized>(model: &H, steps: usize) -> Result<Self> {
        if steps < 4 {
            return Err(Error::InvalidParameter(format!(
                "gauge field needs at least 4 steps, got {steps}"
            )));
        }
        let ds = 1.0 / steps as f64;
        let grid: Vec<f64> = (0..=steps).map(|j| j as f64 * ds).collect();
        let anchor = canonicalize_anchor(model, spectrum_at(model, 0.0)?)?;
        let mut spectra = Vec::with_capacity(steps + 1);
        spectra.push(anchor);
        for j in 1..=steps {
            let fresh = spectrum_at(model, grid[j])?;
            let moved = gauge_transport(&spectra[j - 1], &fresh)?;
            spectra.push(moved);
        }
        let n = model.dim();
        let mut cum_energy = Vec::with_capacity(n);
        for level in 0..n {
            let vals: Vec<f64> = spectra.iter().map(|sp| sp.eigenvalues[level]).collect();
            cum_energy.push(cumulative_integral(&vals, ds));
        }
        Ok(GaugeField { s: grid, spectra, cum_energy })
    }

    /// Number of grid intervals.
    pub fn steps(&self) -> usize {
        self.s.len() - 1
    }

    /// Grid nodes s_j.
    pub fn grid(&self) -> &[f64] {
        &self.s
    }

    /// Transported spectrum at grid node j.
    pub fn spectrum(&self, j: usize) -> &Spectrum {
        &self.spectra[j]
    }

    /// All transported spectra.
    pub fn spectra(&self) -> &[Spectrum] {
        &self.spectra
    }

    /// Integral of E_level from 0 to s_j (fourth-order accurate).
    pub fn cumulative_energy(&self, level: usize, j: usize) -> f64 {
        self.cum_energy[level][j]
    }

    /// Integral of the gap E_level - E_ground from 0 to s_j.
    pub fn cumulative_gap(&self, level: usize, j: usize) -> f64 {
        self.cum_energy[level][j] - self.cum_energy[0][j]
    }
}

/// Resolve degenerate clusters of an endpoint spectrum by first-order
/// perturbation theory in H'(s), ordering branches by ascending block
/// eigenvalue; see [`GaugeField`].
pub(crate) fn canonicalize_anchor<H: Hamiltonian + ?Sized>(
    model: &H,
    sp: Spectrum,
) -> Result<Spectrum> {
    let mut sp = sp;
    let ranges = cluster_ranges(&sp.eigenvalues, CLUSTER_REL_TOL);
    if ranges.iter().all(|r| r.len() == 1) {
        return Ok(sp);
    }
    let zero = Complex64::new(0.0, 0.0);
    let hdot = model.derivative(sp.s, 1);
    for range in ranges {
        let k = range.len();
        if k == 1 {
            continue;
        }
        let members: Vec<usize> = range.clone().collect();
        let mut block = CMatrix::zeros(k);
        for (a, &i) in members.iter().enumerate() {
            let hv = hdot.matvec(&sp.eigenvectors[i]);
            for (b, &j) in members.iter().enumerate() {
                if b < a {
                    block[(a, b)] = block[(b, a)].conj();
                } else {
                    let _ = j;
                    block[(a, b)] = vdot(&sp.eigenvectors[members[b]], &hv).conj();
                }
            }
        }
        // block[(a, b)] = <v_a | H' | v_b> (Hermitian).
        let (_bvals, bvecs) = eigh_core(&block.hermitian_part(), true)?;
        let bvecs = bvecs.expect("vectors requested");
        let mut new_vecs = Vec::with_capacity(k);
        for coeffs in bvecs.iter() {
            let mut v = vec![zero; sp.dim()];
            for (a, &i) in members.iter().enumerate() {
                for (x, y) in v.iter_mut().zip(&sp.eigenvectors[i]) {
                    *x += coeffs[a] * y;
                }
            }
            canonicalize_phase(&mut v);
            new_vecs.push(v);
        }
        // Branches with equal splitting rates stay in lexicographic order.
        let scale = _bvals.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1.0);
        let mut idx = 0;
        while idx < k {
            let mut end = idx + 1;
            while end < k && (_bvals[end] - _bvals[idx]).abs() <= 1e-10 * scale {
                end += 1;
            }
            new_vecs[idx..end].sort_by(|a, b| lex_cmp(a, b));
            idx = end;
        }
        for (a, v) in new_vecs.into_iter().enumerate() {
            sp.eigenvectors[members[a]] = v;
        }
    }
    Ok(sp)
}

// ---------------------------------------------------------------------------
// Gap and derivative-norm scans
// ---------------------------------------------------------------------------

/// Uniform grid of `n >= 2` points covering [0, 1] inclusively.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|j| j as f64 / (n - 1) as f64).collect()
}

/// Ground gap E_1(s) - E_0(s), failing if the ground state is degenerate at
/// s (gap below `GAP_REL_TOL` relative to max(||H(s)||, 1)).
fn ground_gap_at<H: Hamiltonian + ?Sized>(model: &H, s: f64) -> Result<f64> {
    let vals = eigenvalues_only(&model.evaluate(s))?;
    if vals.len() < 2 {
        return Err(Error::InvalidParameter(
            "gap scan needs dimension >= 2".to_string(),
        ));
    }
    let gap = vals[1] - vals[0];
    let scale = vals.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1.0);
    if gap <= GAP_REL_TOL * scale {
        return Err(Error::DegenerateGroundState { s, gap });
    }
    Ok(gap)
}

/// Minimum spectral gap between the ground state and the rest of the
/// spectrum over s in [0, 1].
///
/// The gap is sampled on the supplied grid (ascending, covering [0, 1]) and
/// the best sample is refined by a golden-section search on its bracketing
/// interval. A gap below the degeneracy tolerance anywhere along the way is
/// reported as `DegenerateGroundState`.
pub fn min_gap<H: Hamiltonian + ?Sized>(model: &H, grid: &[f64]) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::InvalidParameter("gap grid needs at least 2 points".into()));
    }
    let mut best = f64::INFINITY;
    let mut best_j = 0;
    for (j, &s) in grid.iter().enumerate() {
        let gap = ground_gap_at(model, s)?;
        if gap < best {
            best = gap;
            best_j = j;
        }
    }
    let lo = if best_j == 0 { grid[0] } else { grid[best_j - 1] };
    let hi = if best_j + 1 == grid.len() { grid[grid.len() - 1] } else { grid[best_j + 1] };
    let mut f = |s: f64| ground_gap_at(model, s);
    let (_, refined) = golden_min(&mut f, lo, hi, 1e-12)?;
    Ok(best.min(refined))
}

/// Sup-norms of the first three derivatives of H plus the minimum ground gap.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DerivativeNorms {
    /// sup_s ||H'(s)||.
    pub h1: f64,
    /// sup_s ||H''(s)||.
    pub h2: f64,
    /// sup_s ||H'''(s)||.
    pub h3: f64,
    /// min_s gap between ground state and the rest of the spectrum.
    pub gamma_min: f64,
    /// Number of grid samples used for the scans.
    pub samples: usize,
    /// Whether analytic derivatives were available.
    pub analytic: bool,
}

impl DerivativeNorms {
    /// Norms for explicitly given constants (used for unit tests of bounds).
    pub fn explicit(h1: f64, h2: f64, h3: f64, gamma_min: f64) -> Self {
        DerivativeNorms { h1, h2, h3, gamma_min, samples: 0, analytic: true }
    }
}

/// Scan sup-norms of H', H'', H''' and the minimum ground gap over [0, 1].
///
/// Each sup is a grid maximum refined by a golden-section search around the
/// best sample.
pub fn derivative_norms<H: Hamiltonian + ?Sized>(
    model: &H,
    grid: &[f64],
) -> Result<DerivativeNorms> {
    if grid.len() < 2 {
        return Err(Error::InvalidParameter("norm grid needs at least 2 points".into()));
    }
    let mut sup = [0.0f64; 3];
    for (k, item) in sup.iter_mut().enumerate() {
        let order = k + 1;
        let mut best = -f64::INFINITY;
        let mut best_j = 0;
        for (j, &s) in grid.iter().enumerate() {
            let v = spectral_norm(&model.derivative(s, order))?;
            if v > best {
                best = v;
                best_j = j;
            }
        }
        let lo = if best_j == 0 { grid[0] } else { grid[best_j - 1] };
        let hi = if best_j + 1 == grid.len() { grid[grid.len() - 1] } else { grid[best_j + 1] };
        let mut f = |s: f64| spectral_norm(&model.derivative(s, order)).map(|v| -v);
        let (_, neg) = golden_min(&mut f, lo, hi, 1e-12)?;
        *item = best.max(-neg);
    }
    let gamma_min = min_gap(model, grid)?;
    Ok(DerivativeNorms {
        h1: sup[0],
        h2: sup[1],
        h3: sup[2],
        gamma_min,
        samples: grid.len(),
        analytic: model.analytic_derivatives(),
    })
}

/// Grid sized by the model's own sampling hint.
pub fn default_grid<H: Hamiltonian + ?Sized>(model: &H) -> Vec<f64> {
    uniform_grid(model.suggested_samples())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Model;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic pseudo-random Hermitian test matrix.
    fn scrambled_hermitian(n: usize) -> CMatrix {
        CMatrix::from_fn(n, |i, j| {
            let (a, b) = (i.min(j) as f64, i.max(j) as f64);
            let re = (3.1 * a + 1.7 * b + 0.4).sin();
            let im = if i == j { 0.0 } else { (2.3 * a - 0.9 * b).cos() * 0.7 };
            if i <= j {
                c(re, im)
            } else {
                c(re, -im)
            }
        })
    }

    #[test]
    fn identity_has_flat_spectrum_and_orthonormal_frame() {
        let sp = hermitian_eigs(&CMatrix::identity(2)).unwrap();
        assert_eq!(sp.eigenvalues, vec![1.0, 1.0]);
        for i in 0..2 {
            for j in 0..2 {
                let o = vdot(&sp.eigenvectors[i], &sp.eigenvectors[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((o - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn diagonal_matrix_recovers_basis_vectors() {
        let sp = hermitian_eigs(&CMatrix::diag(&[0.0, 3.0])).unwrap();
        assert_eq!(sp.eigenvalues, vec![0.0, 3.0]);
        assert!((sp.eigenvectors[0][0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(sp.eigenvectors[0][1].norm() < 1e-15);
        assert!((sp.eigenvectors[1][1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn search_midpoint_gap_is_half() {
        let model = Model::search(4).unwrap();
        let sp = spectrum_at(&model, 0.5).unwrap();
        assert!((sp.eigenvalues[1] - sp.eigenvalues[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut m = CMatrix::identity(2);
        m[(0, 1)] = c(0.1, 0.0);
        match hermitian_eigs(&m) {
            Err(Error::NonHermitian { .. }) => {}
            other => panic!("expected NonHermitian, got {other:?}"),
        }
    }

    #[test]
    fn reconstruction_matches_input() {
        let m = scrambled_hermitian(6);
        let sp = hermitian_eigs(&m).unwrap();
        let diff = sp.reconstruct().sub(&m).max_abs();
        assert!(diff < 1e-10 * m.max_abs().max(1.0), "residual {diff}");
    }

    #[test]
    fn decomposition_is_bitwise_deterministic() {
        let m = scrambled_hermitian(5);
        let a = hermitian_eigs(&m).unwrap();
        let b = hermitian_eigs(&m).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        for (x, y) in a.eigenvectors.iter().zip(&b.eigenvectors) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn transport_of_identical_spectra_is_identity() {
        let sp = hermitian_eigs(&scrambled_hermitian(4)).unwrap();
        let moved = gauge_transport(&sp, &sp).unwrap();
        assert_eq!(moved.eigenvalues, sp.eigenvalues);
        for (x, y) in moved.eigenvectors.iter().zip(&sp.eigenvectors) {
            for (a, b) in x.iter().zip(y) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn transport_removes_pure_phase() {
        let sp = hermitian_eigs(&CMatrix::diag(&[0.0, 2.0])).unwrap();
        let mut rotated = sp.clone();
        let phase = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        for v in rotated.eigenvectors.iter_mut() {
            for x in v.iter_mut() {
                *x *= phase;
            }
        }
        let moved = gauge_transport(&sp, &rotated).unwrap();
        for (x, y) in moved.eigenvectors.iter().zip(&sp.eigenvectors) {
            for (a, b) in x.iter().zip(y) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn transport_keeps_ground_overlap_nearly_real() {
        let model = Model::search(4).unwrap();
        let sp0 = spectrum_at(&model, 0.0).unwrap();
        let sp0 = canonicalize_anchor(&model, sp0).unwrap();
        let sp1 = spectrum_at(&model, 1e-3).unwrap();
        let moved = gauge_transport(&sp0, &sp1).unwrap();
        let o = vdot(sp0.ground(), moved.ground());
        assert!(o.im.abs() <= 1e-6, "imag part {}", o.im);
        assert!(o.re > 0.999);
    }

    #[test]
    fn transport_detects_ambiguity_for_spread_frames() {
        // A 5x5 frame whose first previous vector has mass 1/sqrt(5) < 0.5 on
        // every new level.
        let n = 5;
        let w = 1.0 / (n as f64).sqrt();
        let mut u: Vec<f64> = vec![-w; n];
        u[0] = 1.0 - w;
        let un: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let u: Vec<f64> = u.iter().map(|x| x / un).collect();
        // Householder reflection columns are orthonormal and each carries
        // |<e_0|col_j>| = 1/sqrt(5).
        let refl = CMatrix::from_fn(n, |i, j| {
            let d = if i == j { 1.0 } else { 0.0 };
            c(d - 2.0 * u[i] * u[j], 0.0)
        });
        let spread = CMatrix::from_fn(n, |i, j| {
            let mut acc = c(0.0, 0.0);
            for k in 0..n {
                acc += refl[(i, k)] * (k as f64) * refl[(j, k)].conj();
            }
            acc
        });
        let prev = hermitian_eigs(&CMatrix::diag(&[0.0, 1.0, 2.0, 3.0, 4.0])).unwrap();
        let cur = hermitian_eigs(&spread).unwrap();
        match gauge_transport(&prev, &cur) {
            Err(Error::AmbiguousMatching { overlap, .. }) => {
                assert!(overlap < 0.5);
            }
            other => panic!("expected AmbiguousMatching, got {other:?}"),
        }
    }

    #[test]
    fn min_gap_matches_search_closed_form() {
        let model = Model::search(4).unwrap();
        let gap = min_gap(&model, &uniform_grid(1025)).unwrap();
        assert!((gap - 0.5).abs() < 1e-12, "gap {gap}");
    }

    #[test]
    fn min_gap_of_constant_diagonal_is_level_distance() {
        let h = CMatrix::diag(&[0.0, 1.0]);
        let model = Model::linear(h.clone(), h).unwrap();
        let gap = min_gap(&model, &uniform_grid(101)).unwrap();
        assert!((gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn min_gap_detects_level_crossing() {
        let model =
            Model::linear(CMatrix::diag(&[0.0, 1.0]), CMatrix::diag(&[1.0, 0.0])).unwrap();
        match min_gap(&model, &uniform_grid(101)) {
            Err(Error::DegenerateGroundState { s, .. }) => {
                assert!((s - 0.5).abs() < 1e-6);
            }
            other => panic!("expected DegenerateGroundState, got {other:?}"),
        }
    }

    #[test]
    fn derivative_norms_of_search_are_constant() {
        let model = Model::search(4).unwrap();
        let norms = derivative_norms(&model, &uniform_grid(257)).unwrap();
        assert!((norms.h1 - 0.75f64.sqrt()).abs() < 1e-12);
        assert!(norms.h2.abs() < 1e-12);
        assert!(norms.h3.abs() < 1e-12);
        assert!((norms.gamma_min - 0.5).abs() < 1e-12);
    }

    #[test]
    fn derivative_norms_vanish_for_constant_hamiltonian() {
        let h = CMatrix::diag(&[0.0, 1.0]);
        let model = Model::linear(h.clone(), h).unwrap();
        let norms = derivative_norms(&model, &uniform_grid(65)).unwrap();
        assert!(norms.h1.abs() < 1e-14);
        assert!(norms.h2.abs() < 1e-14);
        assert!(norms.h3.abs() < 1e-14);
    }

    #[test]
    fn fd_derivative_matches_analytic_for_search() {
        let model = Model::search(4).unwrap();
        for &s in &[0.1, 0.5, 0.9] {
            let fd = fd_derivative(&model, s, 1).unwrap();
            let an = model.derivative(s, 1);
            assert!(fd.sub(&an).max_abs() < 1e-9);
        }
    }

    #[test]
    fn gauge_field_vectors_vary_continuously() {
        let model = Model::search(4).unwrap();
        // Halving the step should roughly halve the per-step frame motion.
        let mut drift = Vec::new();
        for steps in [64usize, 128] {
            let field = GaugeField::build(&model, steps).unwrap();
            let a = &field.spectrum(steps / 2).eigenvectors[0];
            let b = &field.spectrum(steps / 2 + 1).eigenvectors[0];
            let diff: f64 = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            drift.push(diff);
        }
        let ratio = drift[0] / drift[1];
        assert!((1.5..=2.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn spectral_norm_handles_non_hermitian_inputs() {
        // Nilpotent 2x2: spectral norm 1 although both eigenvalues vanish.
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!((spectral_norm(&m).unwrap() - 1.0).abs() < 1e-12);
    }
}
