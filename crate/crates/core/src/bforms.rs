//! `Z/m`-valued bilinear forms stored as Gram matrices on the internal
//! basis of their domain submodule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finmod::{Element, FinModule, ModuleHom, Side, Submodule};
use crate::intmat::{IntMat, ModSolver};
use crate::zmod::{gcd, mod_inverse, prime_factors, valuation, Ring};

#[derive(Debug, Clone)]
pub struct BilinearForm {
    domain: Submodule,
    gram: Vec<Vec<i64>>,
}

/// Serialized form: domain divisors plus a row-major Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormSpec {
    pub m: u64,
    pub divisors: Vec<u64>,
    pub gram: Vec<Vec<i64>>,
}

impl BilinearForm {
    pub fn new(domain: Submodule, gram: Vec<Vec<i64>>) -> Result<Self> {
        let r = domain.rank();
        if gram.len() != r || gram.iter().any(|row| row.len() != r) {
            return Err(Error::ShapeMismatch(format!("gram matrix is not {r}x{r}")));
        }
        let ring = domain.ambient().ring();
        let m = ring.modulus() as i128;
        let gram: Vec<Vec<i64>> = gram
            .iter()
            .map(|row| row.iter().map(|&x| ring.reduce(x as i128)).collect())
            .collect();
        let e = domain.orders();
        for i in 0..r {
            for j in 0..r {
                let x = gram[i][j] as i128;
                if (e[i] as i128 * x) % m != 0 || (e[j] as i128 * x) % m != 0 {
                    return Err(Error::IllDefined(format!(
                        "gram entry ({i},{j}) = {x} is incompatible with orders {} and {}",
                        e[i], e[j]
                    )));
                }
            }
        }
        Ok(BilinearForm { domain, gram })
    }

    /// A form on a whole module, in the module's own coordinates.
    pub fn on_module(module: &FinModule, gram: Vec<Vec<i64>>) -> Result<Self> {
        BilinearForm::new(Submodule::full(module), gram)
    }

    pub fn from_spec(spec: &FormSpec) -> Result<Self> {
        let module = FinModule::new(Ring::new(spec.m)?, spec.divisors.clone())?;
        BilinearForm::on_module(&module, spec.gram.clone())
    }

    pub fn spec(&self) -> FormSpec {
        FormSpec {
            m: self.ring().modulus(),
            divisors: self.domain.orders().to_vec(),
            gram: self.gram.clone(),
        }
    }

    /// The zero-dimensional form on `{0}`.
    pub fn empty(ambient: &FinModule) -> Self {
        BilinearForm { domain: Submodule::zero(ambient), gram: Vec::new() }
    }

    pub fn ring(&self) -> Ring {
        self.domain.ambient().ring()
    }

    pub fn domain(&self) -> &Submodule {
        &self.domain
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    /// `B(x, y)` for domain coordinates `x`, `y`.
    pub fn eval_coords(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut acc = 0i128;
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let mut row = 0i128;
            for (j, &b) in y.iter().enumerate() {
                row += self.gram[i][j] as i128 * b as i128;
            }
            acc += a as i128 * row;
        }
        self.ring().reduce(acc)
    }

    /// `B(x, y)` for elements of the ambient module lying in the domain.
    pub fn eval(&self, x: &[i64], y: &[i64]) -> Result<i64> {
        let a = self.domain.coords(x).map_err(out_of_domain)?;
        let b = self.domain.coords(y).map_err(out_of_domain)?;
        Ok(self.eval_coords(&a, &b))
    }

    pub fn is_symmetric(&self) -> bool {
        let r = self.rank();
        (0..r).all(|i| (0..r).all(|j| self.gram[i][j] == self.gram[j][i]))
    }

    pub fn is_alternating(&self) -> bool {
        let ring = self.ring();
        let r = self.rank();
        (0..r).all(|i| {
            self.gram[i][i] == 0 && (0..r).all(|j| self.gram[i][j] == ring.neg(self.gram[j][i]))
        })
    }

    fn map_gram(&self, f: impl Fn(usize, usize) -> i64) -> BilinearForm {
        let r = self.rank();
        let ring = self.ring();
        let gram = (0..r)
            .map(|i| (0..r).map(|j| ring.reduce(f(i, j) as i128)).collect())
            .collect();
        BilinearForm { domain: self.domain.clone(), gram }
    }

    pub fn transpose(&self) -> BilinearForm {
        self.map_gram(|i, j| self.gram[j][i])
    }

    pub fn neg(&self) -> BilinearForm {
        self.scale(-1)
    }

    pub fn scale(&self, s: i64) -> BilinearForm {
        let ring = self.ring();
        self.map_gram(|i, j| ring.mul(self.gram[i][j], s))
    }

    /// `(B(x,y) + B(y,x)) / 2`.
    pub fn symmetric_part(&self) -> BilinearForm {
        let ring = self.ring();
        let h = ring.half() as i64;
        self.map_gram(|i, j| ring.mul(h, ring.add(self.gram[i][j], self.gram[j][i])))
    }

    /// `(x, y) -> B(x alpha, y)` for an endomorphism `alpha` of the domain.
    pub fn precompose(&self, alpha: &ModuleHom) -> Result<BilinearForm> {
        if alpha.dom() != &self.domain.abstract_module() || !alpha.is_endomorphism() {
            return Err(Error::ShapeMismatch("map is not an endomorphism of the domain".into()));
        }
        let r = self.rank();
        let rows: Vec<Vec<i64>> = alpha.matrix().to_vec();
        let gram = (0..r)
            .map(|i| (0..r).map(|j| self.eval_coords(&rows[i], &unit(r, j))).collect())
            .collect();
        BilinearForm::new(self.domain.clone(), gram)
    }

    /// `(x, y) -> B(x sigma, y sigma)`.
    pub fn congruent(&self, sigma: &ModuleHom) -> Result<BilinearForm> {
        let r = self.rank();
        let rows: Vec<Vec<i64>> = sigma.matrix().to_vec();
        let gram = (0..r)
            .map(|i| (0..r).map(|j| self.eval_coords(&rows[i], &rows[j])).collect())
            .collect();
        BilinearForm::new(self.domain.clone(), gram)
    }

    /// Elements of `within` annihilated by all of `elems`:
    /// right: `{y : B(x, y) = 0}`, left: `{y : B(y, x) = 0}`.
    pub fn annihilator_within(
        &self,
        within: &Submodule,
        elems: &[Element],
        side: Side,
    ) -> Result<Submodule> {
        let ambient = self.domain.ambient();
        if within.ambient() != ambient {
            return Err(Error::ShapeMismatch("submodule of a different module".into()));
        }
        let xs = elems
            .iter()
            .map(|x| self.domain.coords(x).map_err(out_of_domain))
            .collect::<Result<Vec<_>>>()?;
        let ws = within
            .basis()
            .iter()
            .map(|b| self.domain.coords(b).map_err(out_of_domain))
            .collect::<Result<Vec<_>>>()?;
        let matrix = ws
            .iter()
            .map(|w| {
                xs.iter()
                    .map(|x| match side {
                        Side::Right => self.eval_coords(x, w),
                        Side::Left => self.eval_coords(w, x),
                    })
                    .collect()
            })
            .collect();
        let cod = FinModule::free(self.ring(), xs.len());
        let phi = ModuleHom::new(within.abstract_module(), cod, matrix)?;
        let gens = phi.kernel().basis().iter().map(|c| within.embed(c)).collect();
        Ok(Submodule::from_generators(ambient, gens))
    }

    /// Annihilator of `x` inside the domain; no cardinality check.
    pub fn annihilator(&self, x: &Submodule, side: Side) -> Result<Submodule> {
        self.annihilator_within(&self.domain, x.basis(), side)
    }

    /// `X^B` or `^B X`, checked against `|X| |perp| = |domain|`.
    pub fn perp(&self, x: &Submodule, side: Side) -> Result<Submodule> {
        if !x.is_subset_of(&self.domain) {
            return Err(Error::OutOfRange("submodule is not inside the form's domain".into()));
        }
        let p = self.annihilator(x, side)?;
        if x.order() * p.order() != self.domain.order() {
            return Err(Error::Degenerate(format!(
                "|X| |X^B| = {} * {} differs from |U| = {}",
                x.order(),
                p.order(),
                self.domain.order()
            )));
        }
        Ok(p)
    }

    /// Radical on the given side: `U^B` (right) or `^B U` (left).
    pub fn radical(&self, side: Side) -> Submodule {
        self.annihilator(&self.domain, side).expect("domain is inside itself")
    }

    pub fn is_nondegenerate(&self) -> bool {
        let right = self.radical(Side::Right).order() == 1;
        let left = self.radical(Side::Left).order() == 1;
        debug_assert!(!(right && left) || self.perp(&self.domain, Side::Right).is_ok());
        right && left
    }

    /// The restriction to a submodule of the domain.
    pub fn restrict(&self, sub: &Submodule) -> Result<BilinearForm> {
        let coords = sub
            .basis()
            .iter()
            .map(|b| self.domain.coords(b).map_err(out_of_domain))
            .collect::<Result<Vec<_>>>()?;
        let gram = coords
            .iter()
            .map(|a| coords.iter().map(|b| self.eval_coords(a, b)).collect())
            .collect();
        BilinearForm::new(sub.clone(), gram)
    }

    /// Same form re-expressed on another basis of the same domain.
    pub fn rebased(&self, domain: &Submodule) -> Result<BilinearForm> {
        if !domain.same_as(&self.domain) {
            return Err(Error::ShapeMismatch("domains differ".into()));
        }
        self.restrict(domain)
    }

    /// Block-diagonal form on the external direct sum of the two abstract domains.
    pub fn external_sum(&self, other: &BilinearForm) -> Result<BilinearForm> {
        let module = self.domain.abstract_module().direct_sum(&other.domain.abstract_module())?;
        let (r, s) = (self.rank(), other.rank());
        let mut gram = vec![vec![0i64; r + s]; r + s];
        for i in 0..r {
            gram[i][..r].copy_from_slice(&self.gram[i]);
        }
        for i in 0..s {
            gram[r + i][r..].copy_from_slice(&other.gram[i]);
        }
        BilinearForm::on_module(&module, gram)
    }

    /// The form transported to the abstract module of its domain.
    pub fn abstracted(&self) -> BilinearForm {
        BilinearForm::on_module(&self.domain.abstract_module(), self.gram.clone())
            .expect("gram is already compatible with the orders")
    }
}

fn unit(r: usize, j: usize) -> Vec<i64> {
    let mut v = vec![0; r];
    v[j] = 1;
    v
}

fn out_of_domain(_: Error) -> Error {
    Error::OutOfRange("element is not in the form's domain".into())
}

/// `(Q_X + Q_Y)(x1 + y1, x2 + y2) = Q_X(x1, x2) + Q_Y(y1, y2)` on `X + Y`
/// for submodules with `X ∩ Y = 0` of one ambient module.
pub fn form_direct_sum(bx: &BilinearForm, by: &BilinearForm) -> Result<BilinearForm> {
    let (x, y) = (bx.domain(), by.domain());
    if x.ambient() != y.ambient() {
        return Err(Error::ShapeMismatch("forms live on different modules".into()));
    }
    if x.intersect(y)?.order() != 1 {
        return Err(Error::Precondition("domains overlap".into()));
    }
    let mut basis = x.basis().to_vec();
    basis.extend(y.basis().iter().cloned());
    let mut orders = x.orders().to_vec();
    orders.extend_from_slice(y.orders());
    let domain = Submodule::with_basis(x.ambient(), basis, orders);
    let (r, s) = (bx.rank(), by.rank());
    let mut gram = vec![vec![0i64; r + s]; r + s];
    for i in 0..r {
        gram[i][..r].copy_from_slice(&bx.gram[i]);
    }
    for i in 0..s {
        gram[r + i][r..].copy_from_slice(&by.gram[i]);
    }
    BilinearForm::new(domain, gram)
}

/// `V = sum Z/d_i e_i + sum Z/d_i f_i` with `omega(e_i, f_i) = m / d_i`.
pub fn omega_hyperbolic(ring: Ring, ds: &[u64]) -> Result<(FinModule, BilinearForm)> {
    let mut divisors = ds.to_vec();
    divisors.extend_from_slice(ds);
    let module = FinModule::new(ring, divisors)?;
    let k = ds.len();
    let m = ring.modulus() as i64;
    let mut gram = vec![vec![0i64; 2 * k]; 2 * k];
    for (i, &d) in ds.iter().enumerate() {
        gram[i][k + i] = m / d as i64;
        gram[k + i][i] = -(m / d as i64);
    }
    let omega = BilinearForm::on_module(&module, gram)?;
    Ok((module, omega))
}

/// Solves `B(y, b_j) = t_j` (or `B(b_j, y) = t_j`) for `y` in the domain.
pub(crate) struct FormSolver {
    solver: ModSolver,
    domain: FinModule,
    rank: usize,
}

impl FormSolver {
    pub fn new(form: &BilinearForm, side: Side) -> Self {
        let r = form.rank();
        let m = form.ring().modulus() as i128;
        let g = match side {
            Side::Left => form.gram.clone(),
            Side::Right => form.transpose().gram,
        };
        let a: IntMat = g.iter().map(|row| row.iter().map(|&x| x as i128).collect()).collect();
        let solver = ModSolver::new(&a, &vec![m as u64; r], m as u64);
        FormSolver { solver, domain: form.domain.abstract_module(), rank: r }
    }

    pub fn solve(&self, targets: &[i64]) -> Option<Element> {
        let t: Vec<i128> = targets.iter().map(|&x| x as i128).collect();
        let z = self.solver.solve(&t)?;
        Some(self.domain.reduce(&z[..self.rank]))
    }
}

/// `B_g(v(1-g), w(1-g)) = omega(v, w(1-g))` on `X = V(1-g)`.
pub fn bg_form(g: &ModuleHom, omega: &BilinearForm) -> Result<BilinearForm> {
    crate::spgroup::require_symplectic(g, omega)?;
    let one_minus = g.one_minus()?;
    let x = one_minus.image();
    let sections = x
        .basis()
        .iter()
        .map(|b| one_minus.section(b))
        .collect::<Result<Vec<_>>>()?;
    let gram = sections
        .iter()
        .map(|v| x.basis().iter().map(|b| omega.eval(v, b)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    BilinearForm::new(x, gram)
}

/// The symmetric part `Q_g` of `B_g`.
pub fn qg_form(g: &ModuleHom, omega: &BilinearForm) -> Result<BilinearForm> {
    Ok(bg_form(g, omega)?.symmetric_part())
}

/// The diagonal form `q(b_i, b_j) = delta_ij m / e_i` on the Smith basis of `X`.
pub fn symmetric_q(x: &Submodule) -> BilinearForm {
    let m = x.ambient().ring().modulus();
    let r = x.rank();
    let gram = (0..r)
        .map(|i| (0..r).map(|j| if i == j { (m / x.orders()[i]) as i64 } else { 0 }).collect())
        .collect();
    BilinearForm::new(x.clone(), gram).expect("m / e_i is compatible with order e_i")
}

/// The unique `alpha` with `q(x, y) = b(x alpha, y)`.
pub fn relating_automorphism(q: &BilinearForm, b: &BilinearForm) -> Result<ModuleHom> {
    if !q.domain().same_as(b.domain()) {
        return Err(Error::ShapeMismatch("forms have different domains".into()));
    }
    let b = b.rebased(q.domain())?;
    let solver = FormSolver::new(&b, Side::Left);
    let rows = q
        .gram
        .iter()
        .map(|row| {
            solver
                .solve(row)
                .ok_or_else(|| Error::Degenerate("no solution relating the two forms".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let x = q.domain().abstract_module();
    let alpha = ModuleHom::new(x.clone(), x, rows)?;
    if !alpha.is_invertible() {
        return Err(Error::Degenerate("relating map is not invertible".into()));
    }
    Ok(alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitKind {
    /// Hyperbolic pairs `(e_i, f_i)` with `B(e_i, f_j) = delta_ij d_i` and
    /// `B(e_i, e_j) = B(f_i, f_j) = 0`.
    Alternating,
    /// Orthogonal basis, `u_i = w_i`.
    Symmetric,
    /// Dual bases `u_i` of the left and `w_i` of the right side.
    General,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPair {
    pub u: Element,
    pub w: Element,
    pub d: i64,
}

#[derive(Debug, Clone)]
pub struct Split {
    pub kind: SplitKind,
    pub pairs: Vec<DualPair>,
}

impl Split {
    /// Orders of the paired elements (each pair generates cyclic factors of this order).
    pub fn pair_orders(&self, module: &FinModule) -> Vec<u64> {
        self.pairs.iter().map(|p| module.element_order(&p.u)).collect()
    }

    /// Rebuild `B(x, y)` from the pairs alone.
    pub fn eval(&self, module: &FinModule, x: &[i64], y: &[i64]) -> Result<i64> {
        let ring = module.ring();
        let orders = self.pair_orders(module);
        let left: Vec<Element>;
        let right: Vec<Element>;
        let mut lo = orders.clone();
        match self.kind {
            SplitKind::Alternating => {
                left = self
                    .pairs
                    .iter()
                    .map(|p| p.u.clone())
                    .chain(self.pairs.iter().map(|p| p.w.clone()))
                    .collect();
                right = left.clone();
                lo.extend_from_slice(&orders);
            }
            _ => {
                left = self.pairs.iter().map(|p| p.u.clone()).collect();
                right = self.pairs.iter().map(|p| p.w.clone()).collect();
            }
        }
        let lsub = Submodule::with_basis(module, left, lo.clone());
        let rsub = Submodule::with_basis(module, right, lo);
        let a = lsub.coords(x)?;
        let b = rsub.coords(y)?;
        let k = self.pairs.len();
        let mut acc = 0i128;
        for (i, p) in self.pairs.iter().enumerate() {
            let d = p.d as i128;
            match self.kind {
                SplitKind::Alternating => {
                    acc += d * (a[i] as i128 * b[k + i] as i128 - a[k + i] as i128 * b[i] as i128);
                }
                _ => acc += d * a[i] as i128 * b[i] as i128,
            }
        }
        Ok(ring.reduce(acc))
    }
}

/// Idempotent of `Z/m` that is 1 modulo `p^a` and 0 modulo `m / p^a`.
fn idempotent(m: u64, pa: u64) -> i64 {
    let rest = m / pa;
    let inv = mod_inverse(rest % pa, pa).expect("coprime parts");
    ((rest as u128 * inv as u128) % m as u128) as i64
}

/// Per-prime pivot: for each `p^a || m`, the first candidate of minimal
/// `p`-valuation, combined through the CRT idempotents.
fn pivot<C: Clone>(
    ring: Ring,
    candidates: &[(C, i64)],
    combine: impl Fn(&[(i64, C)]) -> (Element, Element),
) -> Option<(Element, Element)> {
    let m = ring.modulus();
    let mut parts = Vec::new();
    for (p, a) in prime_factors(m) {
        let pa = p.pow(a);
        let best = candidates
            .iter()
            .map(|(c, v)| (valuation((*v).rem_euclid(pa as i64), p, a), c))
            .min_by_key(|(v, _)| *v);
        if let Some((v, c)) = best {
            if v < a {
                parts.push((idempotent(m, pa), c.clone()));
            }
        }
    }
    if parts.is_empty() {
        None
    } else {
        Some(combine(&parts))
    }
}

fn crt_sum(module: &FinModule, parts: &[(i64, Element)]) -> Element {
    parts
        .iter()
        .fold(module.zero(), |acc, (e, x)| module.add(&acc, &module.scale(x, *e)))
}

/// Orthogonal splitting of a non-degenerate form into dual pairs with an
/// ideal chain `(d_1) ⊇ (d_2) ⊇ ...`.
pub fn orth_split(b: &BilinearForm) -> Result<Split> {
    if !b.is_nondegenerate() {
        return Err(Error::Degenerate("orthogonal splitting needs a non-degenerate form".into()));
    }
    let module = b.domain().ambient().clone();
    let ring = b.ring();
    let kind = if b.rank() > 0 && b.is_alternating() {
        SplitKind::Alternating
    } else if b.is_symmetric() {
        SplitKind::Symmetric
    } else {
        SplitKind::General
    };
    let mut left = b.domain().clone();
    let mut right = b.domain().clone();
    let mut pairs = Vec::new();
    while left.order() > 1 {
        let (u, w) = match kind {
            SplitKind::General => {
                let mut cands = Vec::new();
                for (i, x) in left.basis().iter().enumerate() {
                    for (j, y) in right.basis().iter().enumerate() {
                        cands.push(((i, j, x.clone(), y.clone()), b.eval(x, y)?));
                    }
                }
                pivot(ring, &cands, |parts| {
                    let us: Vec<_> = parts.iter().map(|(e, c)| (*e, c.2.clone())).collect();
                    let ws: Vec<_> = parts.iter().map(|(e, c)| (*e, c.3.clone())).collect();
                    (crt_sum(&module, &us), crt_sum(&module, &ws))
                })
            }
            SplitKind::Symmetric => {
                let basis = left.basis();
                let mut cands = Vec::new();
                for i in 0..basis.len() {
                    for j in i..basis.len() {
                        let x = if i == j { basis[i].clone() } else { module.add(&basis[i], &basis[j]) };
                        let v = b.eval(&x, &x)?;
                        cands.push((x, v));
                    }
                }
                pivot(ring, &cands, |parts| {
                    let u = crt_sum(&module, parts);
                    (u.clone(), u)
                })
            }
            SplitKind::Alternating => {
                let basis = left.basis();
                let mut cands = Vec::new();
                for i in 0..basis.len() {
                    for j in i + 1..basis.len() {
                        cands.push(((basis[i].clone(), basis[j].clone()), b.eval(&basis[i], &basis[j])?));
                    }
                }
                pivot(ring, &cands, |parts| {
                    let es: Vec<_> = parts.iter().map(|(e, c)| (*e, c.0.clone())).collect();
                    let fs: Vec<_> = parts.iter().map(|(e, c)| (*e, c.1.clone())).collect();
                    (crt_sum(&module, &es), crt_sum(&module, &fs))
                })
            }
        }
        .ok_or_else(|| Error::Degenerate("form vanishes on a nonzero submodule".into()))?;
        let d = b.eval(&u, &w)?;
        match kind {
            SplitKind::General => {
                left = b.annihilator_within(&left, &[w.clone()], Side::Left)?;
                right = b.annihilator_within(&right, &[u.clone()], Side::Right)?;
            }
            SplitKind::Symmetric => {
                left = b.annihilator_within(&left, &[u.clone()], Side::Left)?;
                right = left.clone();
            }
            SplitKind::Alternating => {
                left = b.annihilator_within(&left, &[u.clone(), w.clone()], Side::Right)?;
                right = left.clone();
            }
        }
        pairs.push(DualPair { u, w, d });
    }
    Ok(Split { kind, pairs })
}

/// Hyperbolic basis of a non-degenerate alternating form.
pub fn hyperbolic_basis(omega: &BilinearForm) -> Result<Split> {
    if !omega.is_alternating() {
        return Err(Error::NotSymplectic("form is not alternating".into()));
    }
    let split = orth_split(omega)?;
    debug_assert!(split.kind == SplitKind::Alternating || split.pairs.is_empty());
    Ok(Split { kind: SplitKind::Alternating, pairs: split.pairs })
}

/// A splitting `domain = X + Y` with `B(Y, X) = 0`, from an element `u`
/// whose self-pairing generates the ideal `B(U, U)`: `X = R u`, `Y = ^B u`.
pub fn self_pivot_split(b: &BilinearForm) -> Result<Option<(Submodule, Submodule)>> {
    let module = b.domain().ambient().clone();
    let ring = b.ring();
    let basis = b.domain().basis();
    let mut cands = Vec::new();
    for i in 0..basis.len() {
        for j in i..basis.len() {
            let x = if i == j { basis[i].clone() } else { module.add(&basis[i], &basis[j]) };
            cands.push((x.clone(), b.eval(&x, &x)?));
        }
    }
    let Some((u, _)) = pivot(ring, &cands, |parts| {
        let u = crt_sum(&module, parts);
        (u.clone(), u)
    }) else {
        return Ok(None);
    };
    // u must generate B(U, U), not merely the self-pairings
    let m = ring.modulus();
    let ideal = b.gram().iter().flatten().fold(m, |g, &x| gcd(g, x as u64));
    if gcd(b.eval(&u, &u)? as u64, m) != ideal {
        return Ok(None);
    }
    let x = Submodule::from_generators(&module, vec![u.clone()]);
    let y = b.annihilator_within(b.domain(), &[u], Side::Left)?;
    if x.order() * y.order() != b.domain().order() || x.intersect(&y)?.order() != 1 {
        return Ok(None);
    }
    Ok(Some((x, y)))
}
