//! Conjugate gradients preconditioned by an aggregation multigrid V-cycle.
//!
//! The operator is the five-point finite-volume discretization of
//! `div(eps grad phi)` on the active (non-conductor) cells. Coarse levels are
//! Galerkin products over 2x2 cell aggregates, which keeps every level a
//! five-point operator with the Dirichlet couplings folded into the diagonal.
//! Smoothing is red-black Gauss-Seidel, applied red-then-black before the
//! coarse correction and black-then-red after it, so the V-cycle is a
//! symmetric preconditioner.

use crate::scalar::Real;

/// Plain aggregation under-estimates the coarse correction by about 2x in 2D;
/// the V-cycle over-corrects by this factor to compensate.
const COARSE_SCALE: f64 = 1.8;
const PRE_SWEEPS: usize = 2;
const POST_SWEEPS: usize = 2;
const COARSEST_CELLS: usize = 1024;

#[derive(Clone, Debug)]
pub(crate) struct Level<T> {
    pub nx: usize,
    pub ny: usize,
    pub active: Vec<bool>,
    /// Coupling between `(i, j)` and `(i + 1, j)`, stored at `j * (nx - 1) + i`.
    pub cx: Vec<T>,
    /// Coupling between `(i, j)` and `(i, j + 1)`, stored at `j * nx + i`.
    pub cy: Vec<T>,
    pub diag: Vec<T>,
}

impl<T: Real> Level<T> {
    #[inline]
    fn cx_at(&self, i: usize, j: usize) -> T {
        self.cx[j * (self.nx - 1) + i]
    }

    #[inline]
    fn cy_at(&self, i: usize, j: usize) -> T {
        self.cy[j * self.nx + i]
    }

    /// Sum of off-diagonal couplings times neighbour values.
    #[inline]
    fn neighbour_sum(&self, x: &[T], i: usize, j: usize) -> T {
        let nx = self.nx;
        let k = j * nx + i;
        let mut s = T::zero();
        if i > 0 {
            s += self.cx_at(i - 1, j) * x[k - 1];
        }
        if i + 1 < nx {
            s += self.cx_at(i, j) * x[k + 1];
        }
        if j > 0 {
            s += self.cy_at(i, j - 1) * x[k - nx];
        }
        if j + 1 < self.ny {
            s += self.cy_at(i, j) * x[k + nx];
        }
        s
    }

    pub fn apply(&self, x: &[T], y: &mut [T]) {
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k = j * self.nx + i;
                y[k] = if self.active[k] { self.diag[k] * x[k] - self.neighbour_sum(x, i, j) } else { T::zero() };
            }
        }
    }

    fn residual(&self, b: &[T], x: &[T], r: &mut [T]) {
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k = j * self.nx + i;
                r[k] =
                    if self.active[k] { b[k] - self.diag[k] * x[k] + self.neighbour_sum(x, i, j) } else { T::zero() };
            }
        }
    }

    fn sweep_color(&self, b: &[T], x: &mut [T], color: usize) {
        for j in 0..self.ny {
            let start = (color + j) % 2;
            for i in (start..self.nx).step_by(2) {
                let k = j * self.nx + i;
                if self.active[k] && self.diag[k] > T::zero() {
                    x[k] = (b[k] + self.neighbour_sum(x, i, j)) / self.diag[k];
                }
            }
        }
    }

    /// Galerkin coarsening over 2x2 aggregates with piecewise-constant transfer.
    fn coarsen(&self) -> Level<T> {
        let (nx, ny) = (self.nx, self.ny);
        let ncx = nx.div_ceil(2);
        let ncy = ny.div_ceil(2);
        let mut active = vec![false; ncx * ncy];
        let mut diag = vec![T::zero(); ncx * ncy];
        let mut cx = vec![T::zero(); ncx.saturating_sub(1) * ncy];
        let mut cy = vec![T::zero(); ncx * ncy.saturating_sub(1)];
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                if !self.active[k] {
                    continue;
                }
                let kc = (j / 2) * ncx + i / 2;
                active[kc] = true;
                diag[kc] += self.diag[k];
            }
        }
        let two = T::two();
        for j in 0..ny {
            for i in 0..nx.saturating_sub(1) {
                let c = self.cx_at(i, j);
                if c == T::zero() {
                    continue;
                }
                let (ic, jc) = (i / 2, j / 2);
                if i % 2 == 0 {
                    diag[jc * ncx + ic] -= two * c;
                } else {
                    cx[jc * (ncx - 1) + ic] += c;
                }
            }
        }
        for j in 0..ny.saturating_sub(1) {
            for i in 0..nx {
                let c = self.cy_at(i, j);
                if c == T::zero() {
                    continue;
                }
                let (ic, jc) = (i / 2, j / 2);
                if j % 2 == 0 {
                    diag[jc * ncx + ic] -= two * c;
                } else {
                    cy[jc * ncx + ic] += c;
                }
            }
        }
        Level { nx: ncx, ny: ncy, active, cx, cy, diag }
    }
}

/// Dense Cholesky factor of the coarsest level.
#[derive(Clone, Debug)]
struct CoarseSolver<T> {
    unknowns: Vec<usize>,
    factor: Vec<T>,
}

impl<T: Real> CoarseSolver<T> {
    fn new(level: &Level<T>) -> Self {
        let unknowns: Vec<usize> = (0..level.active.len()).filter(|&k| level.active[k]).collect();
        let n = unknowns.len();
        let mut a = vec![T::zero(); n * n];
        let mut unit = vec![T::zero(); level.active.len()];
        let mut col = vec![T::zero(); level.active.len()];
        for (p, &k) in unknowns.iter().enumerate() {
            unit[k] = T::one();
            level.apply(&unit, &mut col);
            unit[k] = T::zero();
            for (q, &kk) in unknowns.iter().enumerate() {
                a[q * n + p] = col[kk];
            }
        }
        // In-place lower Cholesky. A tiny floor on the pivots keeps floating
        // (Neumann-only) components usable as a preconditioner.
        let floor = T::epsilon() * a.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
        for c in 0..n {
            let mut d = a[c * n + c];
            for m in 0..c {
                d -= a[c * n + m] * a[c * n + m];
            }
            let d = d.max(floor).sqrt();
            a[c * n + c] = d;
            for r in c + 1..n {
                let mut v = a[r * n + c];
                for m in 0..c {
                    v -= a[r * n + m] * a[c * n + m];
                }
                a[r * n + c] = v / d;
            }
        }
        Self { unknowns, factor: a }
    }

    fn solve(&self, b: &[T], x: &mut [T]) {
        let n = self.unknowns.len();
        let l = &self.factor;
        let mut y: Vec<T> = self.unknowns.iter().map(|&k| b[k]).collect();
        for r in 0..n {
            let mut v = y[r];
            for m in 0..r {
                v -= l[r * n + m] * y[m];
            }
            y[r] = v / l[r * n + r];
        }
        for r in (0..n).rev() {
            let mut v = y[r];
            for m in r + 1..n {
                v -= l[m * n + r] * y[m];
            }
            y[r] = v / l[r * n + r];
        }
        x.iter_mut().for_each(|v| *v = T::zero());
        for (p, &k) in self.unknowns.iter().enumerate() {
            x[k] = y[p];
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Hierarchy<T> {
    levels: Vec<Level<T>>,
    coarse: CoarseSolver<T>,
    work: Vec<(Vec<T>, Vec<T>, Vec<T>)>,
    /// Fine-grid smoothing sweeps performed per preconditioner application.
    pub fine_sweeps_per_cycle: usize,
}

impl<T: Real> Hierarchy<T> {
    pub fn new(fine: Level<T>) -> Self {
        let mut levels = vec![fine];
        loop {
            let last = levels.last().expect("at least one level");
            if last.nx * last.ny <= COARSEST_CELLS || last.nx < 3 || last.ny < 3 {
                break;
            }
            let next = last.coarsen();
            levels.push(next);
        }
        let coarse = CoarseSolver::new(levels.last().expect("at least one level"));
        let work = levels
            .iter()
            .map(|l| {
                let n = l.nx * l.ny;
                (vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n])
            })
            .collect();
        let fine_sweeps_per_cycle = if levels.len() > 1 { PRE_SWEEPS + POST_SWEEPS } else { 0 };
        Self { levels, coarse, work, fine_sweeps_per_cycle }
    }

    pub fn fine(&self) -> &Level<T> {
        &self.levels[0]
    }

    /// z = M^-1 r, one V-cycle from a zero initial guess.
    pub fn precondition(&mut self, r: &[T], z: &mut [T]) {
        let nl = self.levels.len();
        self.work[0].0.copy_from_slice(r);
        for l in 0..nl - 1 {
            let level = &self.levels[l];
            let ncx = self.levels[l + 1].nx;
            let (head, tail) = self.work.split_at_mut(l + 1);
            let (b, x, res) = &mut head[l];
            x.fill(T::zero());
            for _ in 0..PRE_SWEEPS {
                level.sweep_color(b, x, 0);
                level.sweep_color(b, x, 1);
            }
            level.residual(b, x, res);
            let bc = &mut tail[0].0;
            bc.fill(T::zero());
            for j in 0..level.ny {
                for i in 0..level.nx {
                    bc[(j / 2) * ncx + i / 2] += res[j * level.nx + i];
                }
            }
        }
        {
            let (b, x, _) = &mut self.work[nl - 1];
            self.coarse.solve(b, x);
        }
        let scale = T::lit(COARSE_SCALE);
        for l in (0..nl - 1).rev() {
            let (head, tail) = self.work.split_at_mut(l + 1);
            let (b, x, _) = &mut head[l];
            let xc = &tail[0].1;
            let level = &self.levels[l];
            let ncx = self.levels[l + 1].nx;
            for j in 0..level.ny {
                for i in 0..level.nx {
                    let k = j * level.nx + i;
                    if level.active[k] {
                        x[k] += scale * xc[(j / 2) * ncx + i / 2];
                    }
                }
            }
            for _ in 0..POST_SWEEPS {
                level.sweep_color(b, x, 1);
                level.sweep_color(b, x, 0);
            }
        }
        z.copy_from_slice(&self.work[0].1);
    }
}

pub(crate) struct CgOutcome<T> {
    pub relative_residual: T,
    pub iterations: usize,
    pub fine_sweeps: usize,
    pub converged: bool,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    // Fixed-order accumulation in f64 keeps results identical between runs.
    let s: f64 = a.iter().zip(b).map(|(&x, &y)| x.to_f64_lossy() * y.to_f64_lossy()).sum();
    T::lit(s)
}

/// Solves `A x = b` in place. `x` holds the initial guess on entry.
pub(crate) fn pcg<T: Real>(h: &mut Hierarchy<T>, b: &[T], x: &mut [T], tol: T, max_fine_sweeps: usize) -> CgOutcome<T> {
    let n = b.len();
    let mut r = vec![T::zero(); n];
    let mut z = vec![T::zero(); n];
    let mut ap = vec![T::zero(); n];
    h.fine().apply(x, &mut ap);
    for k in 0..n {
        r[k] = if h.fine().active[k] { b[k] - ap[k] } else { T::zero() };
    }
    let b_norm = dot(b, b).sqrt();
    let b_norm = if b_norm > T::zero() { b_norm } else { T::one() };
    let mut rel = dot(&r, &r).sqrt() / b_norm;
    let mut iterations = 0;
    let mut sweeps = 0;
    if rel < tol {
        return CgOutcome { relative_residual: rel, iterations, fine_sweeps: sweeps, converged: true };
    }
    h.precondition(&r, &mut z);
    sweeps += h.fine_sweeps_per_cycle;
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    while sweeps <= max_fine_sweeps {
        h.fine().apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > T::zero()) {
            break;
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        iterations += 1;
        rel = dot(&r, &r).sqrt() / b_norm;
        if rel < tol {
            return CgOutcome { relative_residual: rel, iterations, fine_sweeps: sweeps, converged: true };
        }
        h.precondition(&r, &mut z);
        sweeps += h.fine_sweeps_per_cycle.max(1);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    CgOutcome { relative_residual: rel, iterations, fine_sweeps: sweeps, converged: false }
}
