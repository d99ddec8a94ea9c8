//! Symplectic modules and their automorphism groups: membership, the
//! parametrization of elements by displacement forms, factorization and
//! seeded random generation.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bforms::{bg_form, hyperbolic_basis, omega_hyperbolic, BilinearForm, FormSolver};
use crate::error::{Error, Result};
use crate::finmod::{Element, FinModule, ModuleHom, Side, Submodule};
use crate::zmod::{gcd, Ring};

/// Largest `|V|` for which `Sp(V)` is enumerated exhaustively.
pub const ENUMERATION_LIMIT: u64 = 81;

const RANDOM_RETRIES: usize = 64;

/// A finite module with a non-degenerate alternating form.
#[derive(Debug, Clone)]
pub struct SymplecticSpace {
    module: FinModule,
    omega: BilinearForm,
}

impl SymplecticSpace {
    pub fn new(module: FinModule, omega_gram: Vec<Vec<i64>>) -> Result<Self> {
        let omega = BilinearForm::on_module(&module, omega_gram)?;
        if !omega.is_alternating() {
            return Err(Error::NotSymplectic("form is not alternating".into()));
        }
        if !omega.is_nondegenerate() {
            return Err(Error::Degenerate("symplectic form has a radical".into()));
        }
        Ok(SymplecticSpace { module, omega })
    }

    /// `sum Z/d_i e_i + sum Z/d_i f_i` with the standard hyperbolic form.
    pub fn hyperbolic(m: u64, ds: &[u64]) -> Result<Self> {
        let (module, omega) = omega_hyperbolic(Ring::new(m)?, ds)?;
        Ok(SymplecticSpace { module, omega })
    }

    pub fn module(&self) -> &FinModule {
        &self.module
    }

    pub fn omega(&self) -> &BilinearForm {
        &self.omega
    }

    pub fn ring(&self) -> Ring {
        self.module.ring()
    }

    pub fn order(&self) -> u64 {
        self.module.order()
    }

    /// `sqrt |V|`, the degree of the Weil representation.
    pub fn degree(&self) -> u64 {
        let n = self.order();
        let r = (n as f64).sqrt().round() as u64;
        debug_assert_eq!(r * r, n);
        r
    }

    pub fn omega_eval(&self, x: &[i64], y: &[i64]) -> i64 {
        self.omega.eval_coords(x, y)
    }
}

pub fn sp_check(hom: &ModuleHom, omega: &BilinearForm) -> bool {
    require_symplectic(hom, omega).is_ok()
}

pub(crate) fn require_symplectic(hom: &ModuleHom, omega: &BilinearForm) -> Result<()> {
    let module = omega.domain().ambient();
    if hom.dom() != module || hom.cod() != module {
        return Err(Error::ShapeMismatch("map is not an endomorphism of V".into()));
    }
    let rows = hom.matrix();
    let k = module.rank();
    for i in 0..k {
        for j in 0..k {
            if omega.eval_coords(&rows[i], &rows[j]) != omega.gram()[i][j] {
                return Err(Error::NotSymplectic(format!("omega(e{i} g, e{j} g) differs")));
            }
        }
    }
    if !hom.is_invertible() {
        return Err(Error::NotInvertible);
    }
    Ok(())
}

/// An element of `Sp(V, omega)`.
#[derive(Debug, Clone)]
pub struct SpElement {
    hom: ModuleHom,
    space: Arc<SymplecticSpace>,
}

impl PartialEq for SpElement {
    fn eq(&self, other: &Self) -> bool {
        self.hom == other.hom
    }
}

impl Eq for SpElement {}

impl SpElement {
    pub fn new(space: &Arc<SymplecticSpace>, hom: ModuleHom) -> Result<Self> {
        require_symplectic(&hom, &space.omega)?;
        Ok(SpElement { hom, space: space.clone() })
    }

    pub fn from_matrix(space: &Arc<SymplecticSpace>, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let hom = ModuleHom::new(space.module.clone(), space.module.clone(), matrix)?;
        SpElement::new(space, hom)
    }

    pub fn identity(space: &Arc<SymplecticSpace>) -> Self {
        SpElement { hom: ModuleHom::identity(&space.module), space: space.clone() }
    }

    pub fn minus_one(space: &Arc<SymplecticSpace>) -> Self {
        SpElement { hom: ModuleHom::scalar(&space.module, -1), space: space.clone() }
    }

    pub fn hom(&self) -> &ModuleHom {
        &self.hom
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        self.hom.matrix()
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        &self.space
    }

    pub fn apply(&self, v: &[i64]) -> Element {
        self.hom.apply_unchecked(v)
    }

    /// `self` then `other`, i.e. the product `self * other` for the right action.
    pub fn then(&self, other: &SpElement) -> SpElement {
        SpElement {
            hom: self.hom.then(&other.hom).expect("same module"),
            space: self.space.clone(),
        }
    }

    pub fn inverse(&self) -> SpElement {
        SpElement { hom: self.hom.inverse().expect("symplectic maps are invertible"), space: self.space.clone() }
    }

    /// `-g`.
    pub fn neg(&self) -> SpElement {
        SpElement { hom: self.hom.neg(), space: self.space.clone() }
    }

    pub fn pow(&self, k: u64) -> SpElement {
        SpElement { hom: self.hom.pow(k).expect("endomorphism"), space: self.space.clone() }
    }

    pub fn is_identity(&self) -> bool {
        self.hom.is_identity()
    }

    /// Multiplicative order.
    pub fn order(&self) -> u64 {
        element_order(self)
    }

    /// The displacement submodule `V(1 - g)`.
    pub fn displacement(&self) -> Submodule {
        self.hom.one_minus().expect("endomorphism").image()
    }

    /// The fixed submodule `C_V(g) = Ker(1 - g)`.
    pub fn fixed(&self) -> Submodule {
        self.hom.one_minus().expect("endomorphism").kernel()
    }

    pub fn bg_form(&self) -> BilinearForm {
        bg_form(&self.hom, &self.space.omega).expect("element is symplectic")
    }
}

/// Multiplicative order.
pub fn element_order(g: &SpElement) -> u64 {
    let mut power = g.hom.clone();
    let mut k = 1u64;
    while !power.is_identity() {
        power = power.then(&g.hom).expect("endomorphism");
        k += 1;
    }
    k
}

/// The unique `g` with `V(1-g) = X` and `B_g = B`.
pub fn cayley_param(space: &Arc<SymplecticSpace>, b: &BilinearForm) -> Result<SpElement> {
    let x = b.domain();
    let module = &space.module;
    if x.ambient() != module {
        return Err(Error::ShapeMismatch("form does not live on V".into()));
    }
    let omega_x = space.omega.restrict(x)?;
    let r = b.rank();
    let ring = space.ring();
    for i in 0..r {
        for j in 0..r {
            if ring.add(b.gram()[i][j], -b.gram()[j][i]) != omega_x.gram()[i][j] {
                return Err(Error::Precondition("B(x,y) - B(y,x) differs from omega(x,y) on X".into()));
            }
        }
    }
    if !b.is_nondegenerate() {
        return Err(Error::Degenerate("form on X is degenerate".into()));
    }
    let solver = FormSolver::new(b, Side::Left);
    let mut rows = Vec::with_capacity(module.rank());
    for i in 0..module.rank() {
        let e = module.generator(i);
        let targets: Vec<i64> = x.basis().iter().map(|xb| space.omega_eval(&e, xb)).collect();
        let y = solver
            .solve(&targets)
            .ok_or_else(|| Error::Degenerate("omega(v, .) is not represented by B".into()))?;
        let v_alpha = x.embed(&y);
        rows.push(module.sub(&e, &v_alpha));
    }
    let g = SpElement::from_matrix(space, rows)?;
    debug_assert!(g.displacement().same_as(x));
    Ok(g)
}

/// `g = h k` with `V(1-h) = X`, `V(1-k) = Y`, given `V(1-g) = X + Y`
/// (direct) and `B_g(Y, X) = 0`.
pub fn factorize(g: &SpElement, x: &Submodule, y: &Submodule) -> Result<(SpElement, SpElement)> {
    let d = g.displacement();
    if !x.is_subset_of(&d) || !y.is_subset_of(&d) {
        return Err(Error::Precondition("X and Y must lie in V(1-g)".into()));
    }
    if x.order() * y.order() != d.order() || x.intersect(y)?.order() != 1 {
        return Err(Error::Precondition("V(1-g) is not the direct sum of X and Y".into()));
    }
    let bg = g.bg_form();
    for yb in y.basis() {
        for xb in x.basis() {
            if bg.eval(yb, xb)? != 0 {
                return Err(Error::Precondition("B_g(Y, X) does not vanish".into()));
            }
        }
    }
    let h = cayley_param(&g.space, &bg.restrict(x)?)?;
    let k = cayley_param(&g.space, &bg.restrict(y)?)?;
    if h.then(&k) != *g {
        return Err(Error::Numeric("factors do not reassemble g".into()));
    }
    Ok((h, k))
}

/// A product of `steps` elements `cayley(V, omega/2 + S)`, `S` random symmetric.
pub fn sp_random(space: &Arc<SymplecticSpace>, seed: u64, steps: usize) -> Result<SpElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sp_random_with(space, &mut rng, steps)
}

pub fn sp_random_with<R: Rng>(space: &Arc<SymplecticSpace>, rng: &mut R, steps: usize) -> Result<SpElement> {
    if steps == 0 {
        return Err(Error::Precondition("steps must be at least 1".into()));
    }
    let mut g = SpElement::identity(space);
    for _ in 0..steps {
        let mut found = None;
        for _ in 0..RANDOM_RETRIES {
            let s = random_symmetric(space, rng);
            let b = half_omega_plus(space, &s)?;
            if b.is_nondegenerate() {
                found = Some(cayley_param(space, &b)?);
                break;
            }
        }
        let h = found.ok_or_else(|| Error::RetryExhausted("no non-degenerate perturbation".into()))?;
        g = g.then(&h);
    }
    Ok(g)
}

fn random_symmetric<R: Rng>(space: &SymplecticSpace, rng: &mut R) -> Vec<Vec<i64>> {
    let d = space.module.divisors();
    let m = space.ring().modulus();
    let k = d.len();
    let mut s = vec![vec![0i64; k]; k];
    for i in 0..k {
        for j in i..k {
            let g = gcd(d[i], d[j]);
            let x = rng.gen_range(0..g) * (m / g);
            s[i][j] = x as i64;
            s[j][i] = x as i64;
        }
    }
    s
}

/// `omega/2 + S` on the whole of `V`.
pub fn half_omega_plus(space: &SymplecticSpace, s: &[Vec<i64>]) -> Result<BilinearForm> {
    let ring = space.ring();
    let h = ring.half() as i64;
    let gram = space
        .omega
        .gram()
        .iter()
        .zip(s)
        .map(|(wr, sr)| wr.iter().zip(sr).map(|(&w, &x)| ring.add(ring.mul(h, w), x)).collect())
        .collect();
    BilinearForm::on_module(&space.module, gram)
}

/// All elements of `Sp(V)`, for `|V| <= ENUMERATION_LIMIT`, in lexicographic
/// order of their matrices.
pub fn enumerate_sp(space: &Arc<SymplecticSpace>) -> Result<Vec<SpElement>> {
    let module = &space.module;
    if module.order() > ENUMERATION_LIMIT {
        return Err(Error::TooLarge(format!("|V| = {} exceeds {}", module.order(), ENUMERATION_LIMIT)));
    }
    let all = module.elements()?;
    let k = module.rank();
    let candidates: Vec<Vec<Element>> = (0..k)
        .map(|i| {
            let d = module.divisors()[i] as i64;
            all.iter().filter(|v| module.scale(v, d) == module.zero()).cloned().collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut rows: Vec<Element> = Vec::with_capacity(k);
    extend_rows(space, &candidates, &mut rows, &mut out)?;
    Ok(out)
}

/// The endomorphism sending `basis[i]` to `images[i]`, for a basis of `V`
/// in which `V` is the direct sum of the cyclic spans.
pub fn from_basis_images(space: &Arc<SymplecticSpace>, basis: &[Element], images: &[Element]) -> Result<SpElement> {
    let module = &space.module;
    if basis.len() != images.len() {
        return Err(Error::ShapeMismatch("basis and images differ in length".into()));
    }
    let orders: Vec<u64> = basis.iter().map(|b| module.element_order(b)).collect();
    if orders.iter().product::<u64>() != module.order() {
        return Err(Error::Precondition("elements do not form a basis of V".into()));
    }
    let sub = Submodule::with_basis(module, basis.to_vec(), orders);
    let mut rows = Vec::with_capacity(module.rank());
    for i in 0..module.rank() {
        let c = sub.coords(&module.generator(i))?;
        let mut row = module.zero();
        for (&a, y) in c.iter().zip(images) {
            row = module.add(&row, &module.scale(y, a));
        }
        rows.push(row);
    }
    SpElement::from_matrix(space, rows)
}

/// `e_i -> f_i`, `f_i -> -e_i` on a hyperbolic basis; squares to `-1`.
pub fn dft_element(space: &Arc<SymplecticSpace>) -> Result<SpElement> {
    let split = hyperbolic_basis(&space.omega)?;
    let module = &space.module;
    let mut basis = Vec::new();
    let mut images = Vec::new();
    for p in &split.pairs {
        basis.push(p.u.clone());
        images.push(p.w.clone());
        basis.push(p.w.clone());
        images.push(module.neg(&p.u));
    }
    from_basis_images(space, &basis, &images)
}

fn extend_rows(
    space: &Arc<SymplecticSpace>,
    candidates: &[Vec<Element>],
    rows: &mut Vec<Element>,
    out: &mut Vec<SpElement>,
) -> Result<()> {
    let i = rows.len();
    if i == candidates.len() {
        let hom = ModuleHom::new(space.module.clone(), space.module.clone(), rows.clone())?;
        if hom.is_invertible() {
            out.push(SpElement { hom, space: space.clone() });
        }
        return Ok(());
    }
    let gram = space.omega.gram();
    for c in &candidates[i] {
        let ok = space.omega_eval(c, c) == gram[i][i]
            && (0..i).all(|j| space.omega_eval(&rows[j], c) == gram[j][i]);
        if ok {
            rows.push(c.clone());
            extend_rows(space, candidates, rows, out)?;
            rows.pop();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3() -> Arc<SymplecticSpace> {
        Arc::new(SymplecticSpace::hyperbolic(3, &[3]).unwrap())
    }

    #[test]
    fn sp_check_examples() {
        let s = z3();
        let id = ModuleHom::identity(s.module());
        assert!(sp_check(&id, s.omega()));
        let t = ModuleHom::new(s.module().clone(), s.module().clone(), vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert!(sp_check(&t, s.omega()));
        let d = ModuleHom::new(s.module().clone(), s.module().clone(), vec![vec![2, 0], vec![0, 1]]).unwrap();
        assert!(!sp_check(&d, s.omega()));
    }

    #[test]
    fn cayley_examples() {
        let s = z3();
        let empty = BilinearForm::empty(s.module());
        assert!(cayley_param(&s, &empty).unwrap().is_identity());

        let half = half_omega_plus(&s, &[vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(cayley_param(&s, &half).unwrap(), SpElement::minus_one(&s));

        let x = Submodule::from_generators(s.module(), vec![vec![0, 1]]);
        let b = BilinearForm::new(x, vec![vec![2]]).unwrap();
        let g = cayley_param(&s, &b).unwrap();
        assert_eq!(g.matrix(), &[vec![1, 1], vec![0, 1]]);
    }

    #[test]
    fn cayley_rejects_bad_forms() {
        let s = z3();
        let x = Submodule::full(s.module());
        let sym = BilinearForm::new(x, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert!(cayley_param(&s, &sym).is_err());
    }

    #[test]
    fn order_examples() {
        let s = z3();
        assert_eq!(SpElement::identity(&s).order(), 1);
        assert_eq!(SpElement::minus_one(&s).order(), 2);
        let t = SpElement::from_matrix(&s, vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(t.order(), 3);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_sp(&z3()).unwrap().len(), 24);
        let s5 = Arc::new(SymplecticSpace::hyperbolic(5, &[5]).unwrap());
        assert_eq!(enumerate_sp(&s5).unwrap().len(), 120);
        let s9 = Arc::new(SymplecticSpace::hyperbolic(9, &[9]).unwrap());
        assert_eq!(enumerate_sp(&s9).unwrap().len(), 648);
        let h = Arc::new(SymplecticSpace::hyperbolic(9, &[3, 9]).unwrap());
        assert!(enumerate_sp(&h).is_err());
    }

    #[test]
    fn cayley_roundtrip_exhaustive_on_z3() {
        let s = z3();
        for g in enumerate_sp(&s).unwrap() {
            let back = cayley_param(&s, &g.bg_form()).unwrap();
            assert_eq!(back, g);
        }
    }

    #[test]
    fn random_elements_are_symplectic_and_reproducible() {
        let h = Arc::new(SymplecticSpace::hyperbolic(9, &[3, 9]).unwrap());
        for seed in 0..20 {
            let g = sp_random(&h, seed, 3).unwrap();
            assert!(sp_check(g.hom(), h.omega()));
            assert_eq!(g, sp_random(&h, seed, 3).unwrap());
        }
        assert!(sp_random(&h, 0, 0).is_err());
    }

    #[test]
    fn factorize_minus_one_blockwise() {
        let h = Arc::new(SymplecticSpace::hyperbolic(9, &[3, 9]).unwrap());
        let v = h.module();
        let minus = SpElement::minus_one(&h);
        let x = Submodule::from_generators(v, vec![v.generator(0), v.generator(2)]);
        let y = Submodule::from_generators(v, vec![v.generator(1), v.generator(3)]);
        let (a, b) = factorize(&minus, &x, &y).unwrap();
        assert!(a.displacement().same_as(&x));
        assert!(b.displacement().same_as(&y));
        assert_eq!(a.then(&b), minus);
        assert_eq!(a.matrix()[0], vec![2, 0, 0, 0]);
        assert_eq!(a.matrix()[1], vec![0, 1, 0, 0]);
        let (g1, one) = factorize(&minus, &Submodule::full(v), &Submodule::zero(v)).unwrap();
        assert_eq!(g1, minus);
        assert!(one.is_identity());
    }
}
