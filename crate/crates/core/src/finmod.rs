//! Finite `Z/m`-modules presented as `Z/d_1 + ... + Z/d_k`, their
//! homomorphisms, and exact kernels, images and sections.
//!
//! Elements are coordinate row vectors; a homomorphism with matrix `M`
//! sends `v` to `v M`. Composition `f.then(g)` is the matrix product `F G`.

use serde::{Deserialize, Serialize};
use std::sync::{Arc, OnceLock};

use crate::bforms::BilinearForm;
use crate::error::{Error, Result};
use crate::intmat::{IntMat, ModSolver, SmithMod};
use crate::zmod::{gcd, Ring};

pub type Element = Vec<i64>;

/// Largest submodule that may be enumerated element by element.
pub const ENUMERATION_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinModule {
    ring: Ring,
    divisors: Vec<u64>,
}

/// JSON form `{"m": .., "divisors": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub m: u64,
    pub divisors: Vec<u64>,
}

impl FinModule {
    pub fn new(ring: Ring, divisors: Vec<u64>) -> Result<Self> {
        for &d in &divisors {
            if d < 2 || ring.modulus() % d != 0 {
                return Err(Error::IllDefined(format!(
                    "divisor {d} does not divide modulus {}",
                    ring.modulus()
                )));
            }
        }
        Ok(FinModule { ring, divisors })
    }

    /// `(Z/m)^rank`.
    pub fn free(ring: Ring, rank: usize) -> Self {
        FinModule { ring, divisors: vec![ring.modulus(); rank] }
    }

    pub fn from_spec(spec: &ModuleSpec) -> Result<Self> {
        FinModule::new(Ring::new(spec.m)?, spec.divisors.clone())
    }

    pub fn spec(&self) -> ModuleSpec {
        ModuleSpec { m: self.ring.modulus(), divisors: self.divisors.clone() }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    pub fn order(&self) -> u64 {
        self.divisors.iter().product()
    }

    pub fn zero(&self) -> Element {
        vec![0; self.rank()]
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut v = self.zero();
        v[i] = 1;
        v
    }

    pub fn reduce(&self, v: &[i128]) -> Element {
        v.iter()
            .zip(&self.divisors)
            .map(|(&x, &d)| x.rem_euclid(d as i128) as i64)
            .collect()
    }

    pub fn check(&self, v: &[i64]) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::ShapeMismatch(format!(
                "element of length {} in module of rank {}",
                v.len(),
                self.rank()
            )));
        }
        for (&x, &d) in v.iter().zip(&self.divisors) {
            if x < 0 || x as u64 >= d {
                return Err(Error::OutOfRange(format!("coordinate {x} not in [0, {d})")));
            }
        }
        Ok(())
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Element {
        a.iter()
            .zip(b)
            .zip(&self.divisors)
            .map(|((&x, &y), &d)| (x + y).rem_euclid(d as i64))
            .collect()
    }

    pub fn sub(&self, a: &[i64], b: &[i64]) -> Element {
        a.iter()
            .zip(b)
            .zip(&self.divisors)
            .map(|((&x, &y), &d)| (x - y).rem_euclid(d as i64))
            .collect()
    }

    pub fn neg(&self, a: &[i64]) -> Element {
        self.scale(a, -1)
    }

    pub fn scale(&self, a: &[i64], s: i64) -> Element {
        a.iter()
            .zip(&self.divisors)
            .map(|(&x, &d)| ((x as i128 * s as i128).rem_euclid(d as i128)) as i64)
            .collect()
    }

    /// Additive order of `v`.
    pub fn element_order(&self, v: &[i64]) -> u64 {
        v.iter()
            .zip(&self.divisors)
            .map(|(&x, &d)| d / crate::zmod::gcd(x as u64, d))
            .fold(1, lcm)
    }

    /// Mixed-radix index, first coordinate varying fastest.
    pub fn index(&self, v: &[i64]) -> usize {
        let mut idx = 0usize;
        for (&x, &d) in v.iter().zip(&self.divisors).rev() {
            idx = idx * d as usize + x as usize;
        }
        idx
    }

    pub fn element(&self, mut idx: usize) -> Element {
        self.divisors
            .iter()
            .map(|&d| {
                let x = idx % d as usize;
                idx /= d as usize;
                x as i64
            })
            .collect()
    }

    pub fn elements(&self) -> Result<Vec<Element>> {
        let n = self.order();
        if n > ENUMERATION_LIMIT {
            return Err(Error::TooLarge(format!("module of order {n}")));
        }
        Ok((0..n as usize).map(|i| self.element(i)).collect())
    }

    /// Exponent of the module (lcm of the divisors).
    pub fn exponent(&self) -> u64 {
        self.divisors.iter().copied().fold(1, lcm)
    }

    /// External direct sum.
    pub fn direct_sum(&self, other: &FinModule) -> Result<FinModule> {
        if self.ring != other.ring {
            return Err(Error::ShapeMismatch("different rings".into()));
        }
        let mut d = self.divisors.clone();
        d.extend_from_slice(&other.divisors);
        Ok(FinModule { ring: self.ring, divisors: d })
    }
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / crate::zmod::gcd(a, b) * b
}

fn to_wide(v: &[i64]) -> Vec<i128> {
    v.iter().map(|&x| x as i128).collect()
}

/// Solver expressing elements of `module` as combinations of `rows`.
fn combination_solver(rows: &[Element], module: &FinModule) -> ModSolver {
    let a: IntMat = rows.iter().map(|r| to_wide(r)).collect();
    ModSolver::new(&a, module.divisors(), module.ring().modulus())
}

/// Homomorphism `dom -> cod`, `v -> v M`.
#[derive(Debug, Clone)]
pub struct ModuleHom {
    dom: FinModule,
    cod: FinModule,
    matrix: Vec<Vec<i64>>,
    solver: OnceLock<Arc<ModSolver>>,
}

impl PartialEq for ModuleHom {
    fn eq(&self, other: &Self) -> bool {
        self.dom == other.dom && self.cod == other.cod && self.matrix == other.matrix
    }
}

impl Eq for ModuleHom {}

impl ModuleHom {
    pub fn new(dom: FinModule, cod: FinModule, matrix: Vec<Vec<i64>>) -> Result<Self> {
        if matrix.len() != dom.rank() || matrix.iter().any(|r| r.len() != cod.rank()) {
            return Err(Error::ShapeMismatch(format!(
                "matrix does not have shape {}x{}",
                dom.rank(),
                cod.rank()
            )));
        }
        let matrix: Vec<Vec<i64>> = matrix.iter().map(|r| cod.reduce(&to_wide(r))).collect();
        for (i, row) in matrix.iter().enumerate() {
            let d = dom.divisors()[i] as i128;
            for (j, &x) in row.iter().enumerate() {
                if (d * x as i128) % cod.divisors()[j] as i128 != 0 {
                    return Err(Error::IllDefined(format!(
                        "generator {i} of order {d} cannot map with coefficient {x} into Z/{}",
                        cod.divisors()[j]
                    )));
                }
            }
        }
        Ok(ModuleHom { dom, cod, matrix, solver: OnceLock::new() })
    }

    pub fn identity(module: &FinModule) -> Self {
        ModuleHom::scalar(module, 1)
    }

    pub fn zero(dom: &FinModule, cod: &FinModule) -> Self {
        ModuleHom::new(dom.clone(), cod.clone(), vec![vec![0; cod.rank()]; dom.rank()])
            .expect("zero map is well defined")
    }

    pub fn scalar(module: &FinModule, s: i64) -> Self {
        let n = module.rank();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| if i == j { s } else { 0 }).collect())
            .collect();
        ModuleHom::new(module.clone(), module.clone(), matrix).expect("scalars are well defined")
    }

    pub fn dom(&self) -> &FinModule {
        &self.dom
    }

    pub fn cod(&self) -> &FinModule {
        &self.cod
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn is_endomorphism(&self) -> bool {
        self.dom == self.cod
    }

    pub fn apply(&self, v: &[i64]) -> Result<Element> {
        self.dom.check(v)?;
        Ok(self.apply_unchecked(v))
    }

    pub(crate) fn apply_unchecked(&self, v: &[i64]) -> Element {
        let mut out = vec![0i128; self.cod.rank()];
        for (&x, row) in v.iter().zip(&self.matrix) {
            if x != 0 {
                for (o, &y) in out.iter_mut().zip(row) {
                    *o += x as i128 * y as i128;
                }
            }
        }
        self.cod.reduce(&out)
    }

    /// `self` followed by `next`: `v -> (v self) next`.
    pub fn then(&self, next: &ModuleHom) -> Result<ModuleHom> {
        if self.cod != next.dom {
            return Err(Error::ShapeMismatch("codomain does not match domain".into()));
        }
        let matrix = self.matrix.iter().map(|row| next.apply_unchecked(row)).collect();
        ModuleHom::new(self.dom.clone(), next.cod.clone(), matrix)
    }

    fn zip_with(&self, other: &ModuleHom, f: impl Fn(i64, i64) -> i64) -> Result<ModuleHom> {
        if self.dom != other.dom || self.cod != other.cod {
            return Err(Error::ShapeMismatch("maps have different shapes".into()));
        }
        let matrix = self
            .matrix
            .iter()
            .zip(&other.matrix)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
            .collect();
        ModuleHom::new(self.dom.clone(), self.cod.clone(), matrix)
    }

    pub fn add(&self, other: &ModuleHom) -> Result<ModuleHom> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &ModuleHom) -> Result<ModuleHom> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn neg(&self) -> ModuleHom {
        self.scale(-1)
    }

    pub fn scale(&self, s: i64) -> ModuleHom {
        let matrix = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|&x| x * s).collect())
            .collect();
        ModuleHom::new(self.dom.clone(), self.cod.clone(), matrix).expect("multiples stay well defined")
    }

    /// `1 - self` for an endomorphism.
    pub fn one_minus(&self) -> Result<ModuleHom> {
        ModuleHom::identity(&self.dom).sub(self)
    }

    /// `1 + self` for an endomorphism.
    pub fn one_plus(&self) -> Result<ModuleHom> {
        ModuleHom::identity(&self.dom).add(self)
    }

    pub fn pow(&self, k: u64) -> Result<ModuleHom> {
        if !self.is_endomorphism() {
            return Err(Error::ShapeMismatch("power of a non-endomorphism".into()));
        }
        let mut result = ModuleHom::identity(&self.dom);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.then(&base)?;
            }
            base = base.then(&base)?;
            k >>= 1;
        }
        Ok(result)
    }

    pub fn is_identity(&self) -> bool {
        self.is_endomorphism() && *self == ModuleHom::identity(&self.dom)
    }

    pub fn kernel(&self) -> Submodule {
        let gens: Vec<Element> = combination_solver(&self.matrix, &self.cod)
            .relations()
            .iter()
            .map(|z| self.dom.reduce(z))
            .collect();
        Submodule::from_generators(&self.dom, gens)
    }

    pub fn image(&self) -> Submodule {
        Submodule::from_generators(&self.cod, self.matrix.clone())
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().order() == 1
    }

    pub fn is_invertible(&self) -> bool {
        self.dom.order() == self.cod.order() && self.is_injective()
    }

    pub fn inverse(&self) -> Result<ModuleHom> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let matrix = (0..self.cod.rank())
            .map(|j| self.section(&self.cod.generator(j)))
            .collect::<Result<Vec<_>>>()?;
        ModuleHom::new(self.cod.clone(), self.dom.clone(), matrix)
    }

    /// Some `v` with `v self = x`. Deterministic for a fixed map.
    pub fn section(&self, x: &[i64]) -> Result<Element> {
        self.cod.check(x)?;
        let solver = self
            .solver
            .get_or_init(|| Arc::new(combination_solver(&self.matrix, &self.cod)));
        let z = solver.solve(&to_wide(x)).ok_or(Error::NoPreimage)?;
        Ok(self.dom.reduce(&z[..self.dom.rank()]))
    }

    /// Multiplicative order of an automorphism.
    pub fn order(&self) -> Result<u64> {
        if !self.is_invertible() || !self.is_endomorphism() {
            return Err(Error::NotInvertible);
        }
        let bound = 1u64 << 24;
        let mut power = self.clone();
        let mut k = 1u64;
        while !power.is_identity() {
            power = power.then(self)?;
            k += 1;
            if k > bound {
                return Err(Error::TooLarge("element order exceeds search bound".into()));
            }
        }
        Ok(k)
    }
}

/// A submodule of `ambient` with an internal basis `b_i` of exact orders
/// `e_i`, so that it is isomorphic to `Z/e_1 + ... + Z/e_r`.
#[derive(Debug, Clone)]
pub struct Submodule {
    ambient: FinModule,
    basis: Vec<Element>,
    orders: Vec<u64>,
    solver: Arc<ModSolver>,
}

impl Submodule {
    pub(crate) fn with_basis(ambient: &FinModule, basis: Vec<Element>, orders: Vec<u64>) -> Self {
        let solver = Arc::new(combination_solver(&basis, ambient));
        Submodule { ambient: ambient.clone(), basis, orders, solver }
    }

    /// The submodule generated by `gens`, with a Smith basis.
    pub fn from_generators(ambient: &FinModule, gens: Vec<Element>) -> Self {
        let gens: Vec<Element> = gens
            .into_iter()
            .map(|g| ambient.reduce(&to_wide(&g)))
            .filter(|g| g.iter().any(|&x| x != 0))
            .collect();
        let r = gens.len();
        if r == 0 {
            return Submodule::with_basis(ambient, Vec::new(), Vec::new());
        }
        let m = ambient.ring().modulus();
        let rel: IntMat = combination_solver(&gens, ambient).relations().to_vec();
        let smith = SmithMod::compute(&rel, r, m);
        let mut cyclic: Vec<(u64, Element)> = Vec::new();
        for (i, &s) in smith.diag.iter().enumerate() {
            let order = gcd(s as u64, m);
            if order == 1 {
                continue;
            }
            let mut b = vec![0i128; ambient.rank()];
            for (coef, g) in smith.v_inv[i].iter().zip(&gens) {
                for (bj, &gj) in b.iter_mut().zip(g) {
                    *bj += coef * gj as i128;
                }
            }
            cyclic.push((order, ambient.reduce(&b)));
        }
        cyclic.sort_by_key(|(o, _)| *o);
        let (orders, basis) = cyclic.into_iter().unzip();
        Submodule::with_basis(ambient, basis, orders)
    }

    /// The whole module with its own coordinate generators as basis.
    pub fn full(ambient: &FinModule) -> Self {
        let basis = (0..ambient.rank()).map(|i| ambient.generator(i)).collect();
        Submodule::with_basis(ambient, basis, ambient.divisors().to_vec())
    }

    pub fn zero(ambient: &FinModule) -> Self {
        Submodule::with_basis(ambient, Vec::new(), Vec::new())
    }

    pub fn ambient(&self) -> &FinModule {
        &self.ambient
    }

    pub fn basis(&self) -> &[Element] {
        &self.basis
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Internal basis and cyclic orders, `X = Z/e_1 + ... + Z/e_r`.
    pub fn smith_structure(&self) -> (Vec<Element>, Vec<u64>) {
        (self.basis.clone(), self.orders.clone())
    }

    /// `X` as a module in its own right, coordinates in the internal basis.
    pub fn abstract_module(&self) -> FinModule {
        FinModule { ring: self.ambient.ring, divisors: self.orders.clone() }
    }

    /// Coordinates of `x` in the internal basis.
    pub fn coords(&self, x: &[i64]) -> Result<Element> {
        self.ambient.check(x)?;
        let z = self.solver.solve(&to_wide(x)).ok_or(Error::NoPreimage)?;
        Ok(self.abstract_module().reduce(&z[..self.rank()]))
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.coords(x).is_ok()
    }

    pub fn embed(&self, coords: &[i64]) -> Element {
        let mut out = vec![0i128; self.ambient.rank()];
        for (&c, b) in coords.iter().zip(&self.basis) {
            for (o, &y) in out.iter_mut().zip(b) {
                *o += c as i128 * y as i128;
            }
        }
        self.ambient.reduce(&out)
    }

    /// The inclusion map from the abstract module.
    pub fn inclusion(&self) -> ModuleHom {
        ModuleHom::new(self.abstract_module(), self.ambient.clone(), self.basis.clone())
            .expect("basis elements have the listed orders")
    }

    pub fn elements(&self) -> Result<Vec<Element>> {
        Ok(self
            .abstract_module()
            .elements()?
            .iter()
            .map(|c| self.embed(c))
            .collect())
    }

    pub fn is_subset_of(&self, other: &Submodule) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    pub fn same_as(&self, other: &Submodule) -> bool {
        self.order() == other.order() && self.is_subset_of(other)
    }

    pub fn sum(&self, other: &Submodule) -> Submodule {
        let mut gens = self.basis.clone();
        gens.extend(other.basis.iter().cloned());
        Submodule::from_generators(&self.ambient, gens)
    }

    pub fn intersect(&self, other: &Submodule) -> Result<Submodule> {
        if self.ambient != other.ambient {
            return Err(Error::ShapeMismatch("submodules of different modules".into()));
        }
        // kernel of (a, b) -> a X - b Y on the external direct sum
        let dom = self.abstract_module().direct_sum(&other.abstract_module())?;
        let mut matrix = self.basis.clone();
        matrix.extend(other.basis.iter().map(|b| self.ambient.neg(b)));
        let phi = ModuleHom::new(dom, self.ambient.clone(), matrix)?;
        let gens = phi
            .kernel()
            .basis()
            .iter()
            .map(|z| self.embed(&z[..self.rank()]))
            .collect();
        Ok(Submodule::from_generators(&self.ambient, gens))
    }

    /// Restriction of an endomorphism of the ambient module that maps `X`
    /// into itself, as an endomorphism of the abstract module.
    pub fn restrict_endo(&self, h: &ModuleHom) -> Result<ModuleHom> {
        if h.dom() != &self.ambient || h.cod() != &self.ambient {
            return Err(Error::ShapeMismatch("map is not an endomorphism of the ambient".into()));
        }
        let rows = self
            .basis
            .iter()
            .map(|b| {
                self.coords(&h.apply_unchecked(b))
                    .map_err(|_| Error::Precondition("submodule is not invariant".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let x = self.abstract_module();
        ModuleHom::new(x.clone(), x, rows)
    }

    /// `X^B` (right) or `^B X` (left) inside the domain of `form`.
    pub fn perp(&self, form: &BilinearForm, side: Side) -> Result<Submodule> {
        form.perp(self, side)
    }

    /// `p^k`-torsion-free reduction helper: the submodule `s X`.
    pub fn scaled(&self, s: i64) -> Submodule {
        let gens = self.basis.iter().map(|b| self.ambient.scale(b, s)).collect();
        Submodule::from_generators(&self.ambient, gens)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn module(m: u64, d: &[u64]) -> FinModule {
        FinModule::new(Ring::new(m).unwrap(), d.to_vec()).unwrap()
    }

    fn hom(v: &FinModule, m: Vec<Vec<i64>>) -> ModuleHom {
        ModuleHom::new(v.clone(), v.clone(), m).unwrap()
    }

    /// Kernel by enumeration, as an independent check.
    fn brute_kernel(h: &ModuleHom) -> Vec<Element> {
        h.dom()
            .elements()
            .unwrap()
            .into_iter()
            .filter(|v| h.apply(v).unwrap().iter().all(|&x| x == 0))
            .collect()
    }

    #[test]
    fn module_validation() {
        assert!(FinModule::new(Ring::new(9).unwrap(), vec![2]).is_err());
        assert!(FinModule::new(Ring::new(9).unwrap(), vec![1]).is_err());
        let v = module(9, &[3, 9]);
        assert_eq!(v.order(), 27);
        assert!(v.check(&[3, 0]).is_err());
        for i in 0..27 {
            assert_eq!(v.index(&v.element(i)), i);
        }
    }

    #[test]
    fn hom_apply_examples() {
        let v = module(3, &[3, 3]);
        assert_eq!(ModuleHom::identity(&v).apply(&[1, 2]).unwrap(), vec![1, 2]);
        let g = hom(&v, vec![vec![1, 1], vec![0, 1]]);
        assert_eq!(g.apply(&[1, 0]).unwrap(), vec![1, 1]);
        assert_eq!(ModuleHom::zero(&v, &v).apply(&[2, 1]).unwrap(), vec![0, 0]);
        assert!(g.apply(&[3, 0]).is_err());
    }

    #[test]
    fn hom_ill_defined_rejected() {
        let a = module(9, &[3]);
        let b = module(9, &[9]);
        // generator of order 3 cannot map to 1 in Z/9
        assert!(ModuleHom::new(a.clone(), b.clone(), vec![vec![1]]).is_err());
        assert!(ModuleHom::new(a, b, vec![vec![3]]).is_ok());
    }

    #[test]
    fn hom_ring_laws() {
        let v = module(3, &[3, 3]);
        let minus = ModuleHom::scalar(&v, -1);
        assert_eq!(minus.one_minus().unwrap(), ModuleHom::scalar(&v, 2));
        let j = hom(&v, vec![vec![0, 1], vec![-1, 0]]);
        assert_eq!(j.then(&j).unwrap(), minus);
        let f = hom(&v, vec![vec![1, 2], vec![0, 1]]);
        assert_eq!(f.add(&f.neg()).unwrap(), ModuleHom::zero(&v, &v));
        assert!(f.then(&ModuleHom::identity(&module(3, &[3]))).is_err());
    }

    #[test]
    fn kernel_examples() {
        let v = module(3, &[3, 3]);
        let id = ModuleHom::identity(&v);
        assert_eq!(id.one_minus().unwrap().kernel().order(), 9);
        let g = hom(&v, vec![vec![1, 1], vec![0, 1]]);
        let k = g.one_minus().unwrap().kernel();
        assert_eq!(k.order(), 3);
        assert_eq!(brute_kernel(&g.one_minus().unwrap()).len(), 3);
        assert!(k.contains(&[0, 1]) && !k.contains(&[1, 0]));
        let z9 = module(9, &[9]);
        let k = ModuleHom::scalar(&z9, 3).kernel();
        assert_eq!(k.order(), 3);
        for x in [0, 3, 6] {
            assert!(k.contains(&[x]));
        }
    }

    #[test]
    fn image_examples() {
        let v = module(3, &[3, 3]);
        assert_eq!(ModuleHom::identity(&v).one_minus().unwrap().image().order(), 1);
        let g = hom(&v, vec![vec![1, 1], vec![0, 1]]);
        let im = g.one_minus().unwrap().image();
        assert_eq!(im.order(), 3);
        assert!(im.contains(&[0, 1]));
        let w = module(9, &[9, 9]);
        assert_eq!(ModuleHom::scalar(&w, 2).image().order(), 81);
    }

    #[test]
    fn section_examples() {
        let v = module(3, &[3, 3]);
        let id = ModuleHom::identity(&v);
        assert_eq!(id.section(&[2, 1]).unwrap(), vec![2, 1]);
        let g = hom(&v, vec![vec![1, 1], vec![0, 1]]);
        let h = g.one_minus().unwrap();
        let s = h.section(&[0, 2]).unwrap();
        assert_eq!(h.apply(&s).unwrap(), vec![0, 2]);
        assert_eq!(s[0], 1);
        assert_eq!(h.section(&[1, 0]), Err(Error::NoPreimage));
    }

    #[test]
    fn smith_structure_examples() {
        let v = module(3, &[3, 3]);
        assert_eq!(Submodule::full(&v).smith_structure().1, vec![3, 3]);
        let z9 = module(9, &[9]);
        assert_eq!(ModuleHom::scalar(&z9, 3).image().smith_structure().1, vec![3]);
        assert!(Submodule::zero(&v).smith_structure().1.is_empty());
        let g = Submodule::from_generators(&module(9, &[9, 9]), vec![vec![3, 0], vec![0, 3], vec![3, 3]]);
        assert_eq!(g.orders(), &[3, 3]);
    }

    fn random_hom(rng: &mut ChaCha8Rng, dom: &FinModule, cod: &FinModule) -> ModuleHom {
        let matrix = dom
            .divisors()
            .iter()
            .map(|&d| {
                cod.divisors()
                    .iter()
                    .map(|&c| {
                        // coefficient must be a multiple of c / gcd(c, d)
                        let step = (c / crate::zmod::gcd(c, d)) as i64;
                        step * rng.gen_range(0..c as i64)
                    })
                    .collect()
            })
            .collect();
        ModuleHom::new(dom.clone(), cod.clone(), matrix).unwrap()
    }

    #[test]
    fn rank_nullity_and_sections_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let shapes: Vec<(u64, Vec<u64>, Vec<u64>)> = vec![
            (3, vec![3, 3], vec![3, 3, 3]),
            (9, vec![9, 3], vec![9, 9]),
            (9, vec![3, 9, 9], vec![3, 9]),
            (15, vec![15, 5], vec![3, 15]),
            (15, vec![15, 15], vec![15, 15]),
        ];
        for (m, d, c) in shapes {
            let dom = module(m, &d);
            let cod = module(m, &c);
            for _ in 0..25 {
                let h = random_hom(&mut rng, &dom, &cod);
                let k = h.kernel();
                let im = h.image();
                assert_eq!(k.order() * im.order(), dom.order());
                assert_eq!(k.order() as usize, brute_kernel(&h).len());
                for x in im.elements().unwrap() {
                    let s = h.section(&x).unwrap();
                    assert_eq!(h.apply(&s).unwrap(), x);
                }
                for (b, &e) in im.basis().iter().zip(im.orders()) {
                    assert_eq!(cod.element_order(b), e);
                }
            }
        }
    }

    #[test]
    fn intersection_and_sum_by_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = module(9, &[9, 3, 9]);
        for _ in 0..30 {
            let gx: Vec<Element> = (0..2).map(|_| v.element(rng.gen_range(0..v.order() as usize))).collect();
            let gy: Vec<Element> = (0..2).map(|_| v.element(rng.gen_range(0..v.order() as usize))).collect();
            let x = Submodule::from_generators(&v, gx);
            let y = Submodule::from_generators(&v, gy);
            let both = x.intersect(&y).unwrap();
            let count = v.elements().unwrap().iter().filter(|e| x.contains(e) && y.contains(e)).count();
            assert_eq!(both.order() as usize, count);
            let s = x.sum(&y);
            assert_eq!(s.order() * both.order(), x.order() * y.order());
        }
    }

    #[test]
    fn inverse_and_order() {
        let v = module(3, &[3, 3]);
        let g = hom(&v, vec![vec![1, 1], vec![0, 1]]);
        assert_eq!(g.order().unwrap(), 3);
        assert_eq!(g.then(&g.inverse().unwrap()).unwrap(), ModuleHom::identity(&v));
        assert_eq!(ModuleHom::scalar(&v, -1).order().unwrap(), 2);
        assert!(ModuleHom::zero(&v, &v).inverse().is_err());
    }
}
