//! Linear algebra over `Z/c_1 + ... + Z/c_l` with all `c_j | m`.
//!
//! Vectors are rows; everything is kept reduced, so entries stay below `m`.

use crate::zmod::gcd;

pub type IntMat = Vec<Vec<i128>>;

fn reduce_vec(v: &mut [i128], moduli: &[i128]) {
    for (x, &c) in v.iter_mut().zip(moduli) {
        *x = x.rem_euclid(c);
    }
}

fn axpy(dst: &mut [i128], t: i128, src: &[i128], moduli: &[i128]) {
    for ((d, &s), &c) in dst.iter_mut().zip(src).zip(moduli) {
        *d = (*d + t * s).rem_euclid(c);
    }
}

fn scale_vec(v: &mut [i128], t: i128, moduli: &[i128]) {
    for (x, &c) in v.iter_mut().zip(moduli) {
        *x = (*x * t).rem_euclid(c);
    }
}

/// A unit `u` of `Z/m` with `u w = 1 (mod n)`, for `n | m` and `w` a unit mod `n`.
fn lift_inverse(w: i128, n: i128, m: i128) -> i128 {
    let base = crate::zmod::mod_inverse(w.rem_euclid(n) as u64, n as u64).expect("unit mod n") as i128;
    let mut u = base;
    while gcd(u as u64, m as u64) != 1 {
        u += n;
    }
    u
}

#[derive(Debug, Clone)]
struct Row {
    vec: Vec<i128>,
    coef: Vec<i128>,
}

/// Echelon form of the submodule generated by a list of rows, with each
/// pivot remembering its combination of the input rows.
#[derive(Debug, Clone)]
pub struct ModSolver {
    moduli: Vec<i128>,
    coef_moduli: Vec<i128>,
    pivots: Vec<Option<(Row, i128)>>,
    relations: Vec<Vec<i128>>,
}

impl ModSolver {
    /// `rows` live in `Z/c_1 + ... + Z/c_l`; combinations are taken mod `m`.
    pub fn new(rows: &[Vec<i128>], moduli: &[u64], m: u64) -> Self {
        let moduli: Vec<i128> = moduli.iter().map(|&c| c as i128).collect();
        let mm = m as i128;
        let k = rows.len();
        let coef_moduli = vec![mm; k];
        let mut active: Vec<Row> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut vec = r.clone();
                reduce_vec(&mut vec, &moduli);
                let mut coef = vec![0; k];
                coef[i] = 1;
                Row { vec, coef }
            })
            .collect();
        let mut pivots = Vec::with_capacity(moduli.len());
        for j in 0..moduli.len() {
            let c = moduli[j];
            let (mut with, rest): (Vec<Row>, Vec<Row>) = active.into_iter().partition(|r| r.vec[j] != 0);
            active = rest;
            if with.is_empty() {
                pivots.push(None);
                continue;
            }
            let mut p = with.swap_remove(0);
            for mut q in with {
                // euclid on column j, keeping both rows
                while q.vec[j] != 0 {
                    let t = p.vec[j] / q.vec[j];
                    axpy(&mut p.vec, -t, &q.vec, &moduli);
                    axpy(&mut p.coef, -t, &q.coef, &coef_moduli);
                    std::mem::swap(&mut p, &mut q);
                }
                active.push(q);
            }
            let x = p.vec[j];
            let g = gcd(x as u64, c as u64) as i128;
            let u = lift_inverse(x / g, c / g, mm);
            scale_vec(&mut p.vec, u, &moduli);
            scale_vec(&mut p.coef, u, &coef_moduli);
            debug_assert_eq!(p.vec[j], g % c);
            let mut closure = p.clone();
            scale_vec(&mut closure.vec, c / g, &moduli);
            scale_vec(&mut closure.coef, c / g, &coef_moduli);
            active.push(closure);
            pivots.push(Some((p, g)));
        }
        let relations = active
            .into_iter()
            .filter(|r| r.coef.iter().any(|&x| x != 0))
            .map(|r| r.coef)
            .collect();
        ModSolver { moduli, coef_moduli, pivots, relations }
    }

    /// Coefficients `z` (mod `m`) with `sum z_i row_i = x`, if `x` is in the span.
    pub fn solve(&self, x: &[i128]) -> Option<Vec<i128>> {
        let mut x = x.to_vec();
        reduce_vec(&mut x, &self.moduli);
        let mut z = vec![0i128; self.coef_moduli.len()];
        for (j, piv) in self.pivots.iter().enumerate() {
            if x[j] == 0 {
                continue;
            }
            let (p, g) = piv.as_ref()?;
            if x[j] % g != 0 {
                return None;
            }
            let t = x[j] / g;
            axpy(&mut x, -t, &p.vec, &self.moduli);
            axpy(&mut z, t, &p.coef, &self.coef_moduli);
        }
        Some(z)
    }

    /// Generators (mod `m`) of all relations `sum z_i row_i = 0`.
    pub fn relations(&self) -> &[Vec<i128>] {
        &self.relations
    }
}

/// Diagonalization over `Z/m`: `U A V = diag(s)` with `V` invertible mod `m`.
#[derive(Debug, Clone)]
pub struct SmithMod {
    pub v: IntMat,
    pub v_inv: IntMat,
    /// Diagonal entries, one per column; zero where the column is free.
    pub diag: Vec<i128>,
}

impl SmithMod {
    pub fn compute(a: &IntMat, cols: usize, m: u64) -> SmithMod {
        let m = m as i128;
        let mut a: IntMat = a.iter().map(|r| r.iter().map(|x| x.rem_euclid(m)).collect()).collect();
        let rows = a.len();
        let mut v = identity(cols);
        let mut v_inv = identity(cols);
        let mut diag = vec![0i128; cols];
        for t in 0..cols.min(rows) {
            let Some((pi, pj)) = best_pivot(&a, t, cols, m) else {
                break;
            };
            a.swap(t, pi);
            swap_cols(&mut a, &mut v, &mut v_inv, t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..rows {
                    while a[i][t] != 0 {
                        let q = a[i][t] / a[t][t];
                        for k in 0..cols {
                            a[i][k] = (a[i][k] - q * a[t][k]).rem_euclid(m);
                        }
                        if a[i][t] != 0 {
                            a.swap(t, i);
                            dirty = true;
                        }
                    }
                }
                for j in t + 1..cols {
                    while a[t][j] != 0 {
                        let q = a[t][j] / a[t][t];
                        add_col(&mut a, &mut v, &mut v_inv, j, t, -q, m);
                        if a[t][j] != 0 {
                            swap_cols(&mut a, &mut v, &mut v_inv, t, j);
                            dirty = true;
                        }
                    }
                }
                if !dirty {
                    break;
                }
            }
            diag[t] = a[t][t];
        }
        SmithMod { v, v_inv, diag }
    }
}

fn identity(n: usize) -> IntMat {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

/// Entry of the trailing block generating the largest ideal, smallest value first.
fn best_pivot(a: &IntMat, t: usize, cols: usize, m: i128) -> Option<(usize, usize)> {
    let mut best: Option<(u64, i128, usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, &x) in row.iter().enumerate().take(cols).skip(t) {
            if x != 0 {
                let key = (gcd(x as u64, m as u64), x);
                if best.map_or(true, |(g, y, _, _)| key < (g, y)) {
                    best = Some((key.0, key.1, i, j));
                }
            }
        }
    }
    best.map(|(_, _, i, j)| (i, j))
}

fn swap_cols(a: &mut IntMat, v: &mut IntMat, v_inv: &mut IntMat, x: usize, y: usize) {
    if x == y {
        return;
    }
    for row in a.iter_mut().chain(v.iter_mut()) {
        row.swap(x, y);
    }
    v_inv.swap(x, y);
}

/// col[dst] += c col[src]; the inverse receives row[src] -= c row[dst].
fn add_col(a: &mut IntMat, v: &mut IntMat, v_inv: &mut IntMat, dst: usize, src: usize, c: i128, m: i128) {
    for row in a.iter_mut().chain(v.iter_mut()) {
        row[dst] = (row[dst] + c * row[src]).rem_euclid(m);
    }
    for k in 0..v_inv[src].len() {
        v_inv[src][k] = (v_inv[src][k] - c * v_inv[dst][k]).rem_euclid(m);
    }
}
