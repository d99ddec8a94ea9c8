use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bforms::{hyperbolic_basis, symmetric_q};
use crate::error::Result;
use crate::finmod::{FinModule, ModuleHom, Submodule};
use crate::gauss::FourthRoot;
use crate::modsign::{perm_sign_fast, scalar_sign, sign_fast};
use crate::spgroup::{dft_element, from_basis_images, sp_random_with, SpElement, SymplecticSpace};
use crate::zmod::{jacobi, prime_factors, AdditiveCharacter, Ring};

use super::formula::{closed_value, closed_value_with_q, conv_coeff, psi_pm, value_involution, value_invertible, value_odd};
use super::oracle::{Oracle, ORACLE_LIMIT};
use super::{is_square, CharacterValue};

const TOLERANCE: f64 = 1e-6;
const RANDOM_STEPS: usize = 3;

/// One line of the verification report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub params: Value,
    pub expected: String,
    pub got: String,
    pub residual: f64,
    pub pass: bool,
}

impl CheckResult {
    fn exact(check: &str, params: Value, expected: CharacterValue, got: CharacterValue) -> Self {
        CheckResult {
            check: check.into(),
            params,
            expected: expected.to_string(),
            got: got.to_string(),
            residual: (expected.to_complex() - got.to_complex()).norm(),
            pass: expected == got,
        }
    }

    fn numeric(check: &str, params: Value, expected: Complex64, got: Complex64) -> Self {
        let residual = (expected - got).norm() / (1.0 + expected.norm());
        CheckResult {
            check: check.into(),
            params,
            expected: super::format_complex(expected),
            got: super::format_complex(got),
            residual,
            pass: residual < TOLERANCE,
        }
    }

    fn boolean(check: &str, params: Value, expected: bool, got: bool) -> Self {
        CheckResult {
            check: check.into(),
            params,
            expected: expected.to_string(),
            got: got.to_string(),
            residual: if expected == got { 0.0 } else { 1.0 },
            pass: expected == got,
        }
    }

    fn failure(check: &str, params: Value, err: &crate::Error) -> Self {
        CheckResult {
            check: check.into(),
            params,
            expected: "ok".into(),
            got: err.to_string(),
            residual: f64::INFINITY,
            pass: false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    pub samples: usize,
    /// Cross-check against the matrix oracle when `|V|` allows it.
    pub oracle: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 0, samples: 20, oracle: true }
    }
}

fn g_param(g: &SpElement) -> Value {
    json!(g.matrix())
}

struct Suite<'a> {
    space: &'a Arc<SymplecticSpace>,
    lambda: AdditiveCharacter,
    out: Vec<CheckResult>,
}

impl Suite<'_> {
    fn push(&mut self, check: &str, params: Value, r: Result<CheckResult>) {
        match r {
            Ok(c) => self.out.push(c),
            Err(e) => self.out.push(CheckResult::failure(check, params, &e)),
        }
    }

    fn psi(&self, g: &SpElement) -> Result<CharacterValue> {
        closed_value(g, &self.lambda)
    }
}

/// Runs the identity battery on `1`, `-1`, the DFT element and `samples`
/// random elements; pairs are consecutive samples.
pub fn verify_identities(
    space: &Arc<SymplecticSpace>,
    lambda: AdditiveCharacter,
    opts: &VerifyOptions,
) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = space.degree();
    let mut elems = vec![SpElement::identity(space), SpElement::minus_one(space)];
    let dft = dft_element(space)?;
    elems.push(dft.clone());
    let mut randoms = Vec::with_capacity(opts.samples);
    for _ in 0..opts.samples {
        randoms.push(sp_random_with(space, &mut rng, RANDOM_STEPS)?);
    }
    elems.extend(randoms.iter().cloned());
    let mut suite = Suite { space, lambda, out: Vec::new() };

    known_values(&mut suite, &dft, n);
    let oracle = if opts.oracle && space.order() <= ORACLE_LIMIT { Some(Oracle::new(space, lambda)?) } else { None };
    for g in &elems {
        per_element(&mut suite, g, oracle.as_ref(), n);
    }
    let pairs: Vec<(SpElement, SpElement)> = if randoms.len() >= 2 {
        randoms.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
    } else {
        vec![(dft.clone(), dft.clone())]
    };
    for (g, h) in &pairs {
        let params = json!({"g": g.matrix(), "h": h.matrix()});
        let r = convolution(&suite, g, h, n);
        suite.push("convolution", params.clone(), r);
        if let Some(o) = &oracle {
            let r = (|| {
                let lhs = o.weil_matrix(g)? * o.weil_matrix(h)?;
                let rhs = o.weil_matrix(&g.then(h))?;
                let residual = (&lhs - &rhs).norm() / (1.0 + rhs.norm());
                Ok(CheckResult {
                    check: "homomorphism".into(),
                    params: params.clone(),
                    expected: "W(g) W(h) = W(gh)".into(),
                    got: format!("{residual:.3e}"),
                    residual,
                    pass: residual < TOLERANCE,
                })
            })();
            suite.push("homomorphism", params, r);
        }
    }
    lambda_laws(&mut suite, &elems)?;
    orthogonal_sums(&mut suite, &mut rng)?;
    Ok(suite.out)
}

fn known_values(suite: &mut Suite, dft: &SpElement, n: u64) {
    let space = suite.space;
    let params = json!({});
    let r = suite.psi(&SpElement::identity(space)).map(|got| {
        CheckResult::exact("psi_identity", params.clone(), CharacterValue::new(space.order(), FourthRoot::ONE), got)
    });
    suite.push("psi_identity", params.clone(), r);
    let sign = if (n - 1) / 2 % 2 == 0 { 1 } else { -1 };
    let r = suite.psi(&SpElement::minus_one(space)).map(|got| {
        CheckResult::exact("psi_minus_one", params.clone(), CharacterValue::new(1, FourthRoot::from_sign(sign)), got)
    });
    suite.push("psi_minus_one", params, r);
    let params = json!({"g": dft.matrix()});
    let expected = CharacterValue::new(1, FourthRoot::from_sign(jacobi(-2, n)));
    let r = suite.psi(dft).map(|got| CheckResult::exact("dft", params.clone(), expected, got));
    suite.push("dft", params, r);
}

fn per_element(suite: &mut Suite, g: &SpElement, oracle: Option<&Oracle>, n: u64) {
    let params = g_param(g);
    let lambda = suite.lambda;
    let psi = match suite.psi(g) {
        Ok(v) => v,
        Err(e) => {
            suite.out.push(CheckResult::failure("closed_value", params, &e));
            return;
        }
    };
    let order = g.order();
    let x = g.displacement();
    let fixed = g.fixed();

    if let Some(o) = oracle {
        let r = o.value(g).map(|got| {
            let mut c = CheckResult::numeric("oracle_agreement", params.clone(), psi.to_complex(), got);
            c.residual = (psi.to_complex() - got).norm() / (1.0 + (psi.c as f64).sqrt());
            c.pass = c.residual < TOLERANCE;
            c
        });
        suite.push("oracle_agreement", params.clone(), r);
        let r = o.value(g).map(|got| {
            CheckResult::numeric("absvalue", params.clone(), Complex64::new(fixed.order() as f64, 0.0), Complex64::new(got.norm_sqr(), 0.0))
        });
        suite.push("absvalue", params.clone(), r);
        let m = suite.space.ring().modulus() as i32;
        let r = o.weil_matrix(g).map(|w| {
            CheckResult::numeric("det_order", params.clone(), Complex64::new(1.0, 0.0), w.determinant().powi(m))
        });
        suite.push("det_order", params.clone(), r);
    }

    let rational_expected = is_square(x.order());
    suite.out.push(CheckResult::boolean("rationality", params.clone(), rational_expected, psi.is_rational()));

    let r = q_independence(g, &lambda, psi);
    suite.push("q_independence", params.clone(), r);

    if order % 2 == 1 {
        let r = value_odd(g, &lambda).map(|got| CheckResult::exact("odd_value", params.clone(), psi, got));
        suite.push("odd_value", params.clone(), r);
        let r = (|| {
            let minus = suite.psi(&SpElement::minus_one(suite.space))?;
            Ok(CheckResult::exact("odd_minus", params.clone(), minus, suite.psi(&g.neg())?))
        })();
        suite.push("odd_minus", params.clone(), r);
        let r = g.hom().one_plus().and_then(|a| sign_fast(&a)).map(|s| {
            CheckResult::exact("odd_sign", params.clone(), CharacterValue::new(1, FourthRoot::ONE), CharacterValue::new(1, FourthRoot::from_sign(s)))
        });
        suite.push("odd_sign", params.clone(), r);
        let r = psi_pm(g, &lambda)
            .map(|(p, m)| CheckResult::numeric("odd_pm", params.clone(), Complex64::new(1.0, 0.0), p - m));
        suite.push("odd_pm", params.clone(), r);
    } else {
        let t = g.pow(order / 2);
        let tp = g_param(&t);
        let r = (|| Ok(CheckResult::exact("involution", tp.clone(), suite.psi(&t)?, value_involution(&t)?)))();
        suite.push("involution", tp, r);
    }
    if order.is_power_of_two() {
        let r = two_power(suite, g, psi);
        suite.push("two_power", params.clone(), r);
    }
    if x.intersect(&fixed).map(|s| s.order() == 1).unwrap_or(false) {
        let r = value_invertible(g).map(|got| CheckResult::exact("invertible", params.clone(), psi, got));
        suite.push("invertible", params.clone(), r);
    }
    let r = (|| {
        let lhs = psi.mul(suite.psi(&g.neg())?);
        let sq = closed_value(&g.pow(2), &lambda.scaled(2)?)?;
        let sign = if (n - 1) / 2 % 2 == 0 { 1 } else { -1 };
        let rhs = sq.mul(CharacterValue::new(1, FourthRoot::from_sign(sign)));
        Ok(CheckResult::exact("gmt18", params.clone(), rhs, lhs))
    })();
    suite.push("gmt18", params.clone(), r);
    let r = change_omega(suite, g, psi);
    suite.push("change_omega", params, r);
}

fn convolution(suite: &Suite, g: &SpElement, h: &SpElement, n: u64) -> Result<CheckResult> {
    let lhs = suite.psi(&g.then(h))?.to_complex() * n as f64;
    let rhs = suite.psi(g)?.to_complex() * suite.psi(h)?.to_complex() * conv_coeff(g, h, &suite.lambda)?;
    Ok(CheckResult::numeric("convolution", json!({"g": g.matrix(), "h": h.matrix()}), rhs, lhs))
}

/// A second admissible `q`: the diagonal form pulled back along a random-ish
/// automorphism of `X`.
fn q_independence(g: &SpElement, lambda: &AdditiveCharacter, psi: CharacterValue) -> Result<CheckResult> {
    let x = g.displacement();
    let q = symmetric_q(&x);
    let xm = x.abstract_module();
    let r = xm.rank();
    // unipotent upper-triangular map, well defined for any orders
    let mut rows: Vec<Vec<i64>> = (0..r).map(|i| xm.generator(i)).collect();
    for i in 0..r {
        for j in i + 1..r {
            let (di, dj) = (xm.divisors()[i], xm.divisors()[j]);
            rows[i][j] = ((dj / crate::zmod::gcd(di, dj)) % dj) as i64;
        }
    }
    let sigma = match ModuleHom::new(xm.clone(), xm.clone(), rows) {
        Ok(s) if s.is_invertible() => s,
        _ => ModuleHom::scalar(&xm, -1),
    };
    let q2 = q.abstracted().congruent(&sigma)?;
    let q2 = crate::bforms::BilinearForm::new(x.clone(), q2.gram().to_vec())?;
    let got = closed_value_with_q(g, lambda, &q2)?;
    Ok(CheckResult::exact("q_independence", g_param(g), psi, got))
}

/// `psi(g) = (psi restricted to <g^2>, 1) mod 4`.
fn two_power(suite: &Suite, g: &SpElement, psi: CharacterValue) -> Result<CheckResult> {
    let g2 = g.pow(2);
    let k = g2.order();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut h = SpElement::identity(suite.space);
    for _ in 0..k {
        sum += suite.psi(&h)?.to_complex();
        h = h.then(&g2);
    }
    let mult = sum / k as f64;
    let v = psi.to_complex();
    let integral = (mult - mult.re.round()).norm() < TOLERANCE && (v - v.re.round()).norm() < TOLERANCE;
    let a = (v.re.round() as i64).rem_euclid(4);
    let b = (mult.re.round() as i64).rem_euclid(4);
    Ok(CheckResult {
        check: "two_power".into(),
        params: g_param(g),
        expected: b.to_string(),
        got: a.to_string(),
        residual: if integral && a == b { 0.0 } else { 1.0 },
        pass: integral && a == b,
    })
}

/// `omega'(v, w) = omega(v a, w)` with `a = 1 + t (g + g^{-1})`.
fn change_omega(suite: &Suite, g: &SpElement, psi: CharacterValue) -> Result<CheckResult> {
    let space = suite.space;
    let module = space.module();
    let sym = g.hom().add(g.inverse().hom())?;
    let m = space.ring().modulus() as i64;
    let Some(a) = (1..m)
        .map(|t| ModuleHom::identity(module).add(&sym.scale(t)).expect("endomorphisms"))
        .find(|a| a.is_invertible())
    else {
        return Ok(CheckResult::boolean("change_omega", g_param(g), true, true));
    };
    let gram: Vec<Vec<i64>> = (0..module.rank())
        .map(|i| {
            let ea = a.apply_unchecked(&module.generator(i));
            (0..module.rank()).map(|j| space.omega_eval(&ea, &module.generator(j))).collect()
        })
        .collect();
    let twisted = Arc::new(SymplecticSpace::new(module.clone(), gram)?);
    let g2 = SpElement::from_matrix(&twisted, g.matrix().to_vec())?;
    let got = closed_value(&g2, &suite.lambda)?;
    let sign = perm_sign_fast(&a, &g.displacement())?;
    let expected = psi.mul(CharacterValue::new(1, FourthRoot::from_sign(sign)));
    Ok(CheckResult::exact("change_omega", json!({"g": g.matrix(), "a": a.matrix()}), expected, got))
}

/// Primes `p` with `v_p |X|` odd; empty iff every composition factor has
/// even multiplicity.
fn odd_multiplicity_primes(x: &Submodule) -> Vec<u64> {
    prime_factors(x.order()).into_iter().filter(|&(_, e)| e % 2 == 1).map(|(p, _)| p).collect()
}

/// Elements with `V(1-g) = R u` for `u` of prime order `p`, one per prime
/// dividing the exponent of `V`.
fn witnesses(space: &Arc<SymplecticSpace>) -> Result<Vec<SpElement>> {
    let module = space.module();
    let m = space.ring().modulus();
    let mut out = Vec::new();
    for (p, _) in prime_factors(module.exponent()) {
        let Some(i) = (0..module.rank()).find(|&i| module.divisors()[i] % p == 0) else { continue };
        let u = module.scale(&module.generator(i), (module.divisors()[i] / p) as i64);
        let line = Submodule::from_generators(module, vec![u]);
        let b = crate::bforms::BilinearForm::new(line, vec![vec![(m / p) as i64]])?;
        out.push(crate::spgroup::cayley_param(space, &b)?);
    }
    Ok(out)
}

fn lambda_laws(suite: &mut Suite, elems: &[SpElement]) -> Result<()> {
    let space = suite.space;
    let ring = space.ring();
    let exponent = space.module().exponent();
    let mut tested: Vec<SpElement> = elems.to_vec();
    tested.extend(witnesses(space)?);
    let units = ring.units();
    let mut base = Vec::with_capacity(tested.len());
    for g in &tested {
        base.push(suite.psi(g)?);
    }
    let mut global_equal = vec![true; units.len()];
    let mut per_g_equal = vec![true; tested.len()];
    for (ui, &s) in units.iter().enumerate() {
        let twisted = suite.lambda.scaled(s)?;
        for (gi, g) in tested.iter().enumerate() {
            let params = json!({"g": g.matrix(), "s": s});
            let r = (|| {
                let got = closed_value(g, &twisted)?;
                if got != base[gi] {
                    global_equal[ui] = false;
                    per_g_equal[gi] = false;
                }
                let sign = scalar_sign(&g.displacement(), s)?;
                let expected = base[gi].mul(CharacterValue::new(1, FourthRoot::from_sign(sign)));
                Ok(CheckResult::exact("change_lambda", params.clone(), expected, got))
            })();
            suite.push("change_lambda", params.clone(), r);
            let r = (|| {
                let h = g.pow(2).neg();
                Ok(CheckResult::exact("minus_g_square", params.clone(), suite.psi(&h)?, closed_value(&h, &twisted)?))
            })();
            suite.push("minus_g_square", params, r);
        }
    }
    for (ui, &s) in units.iter().enumerate() {
        let square = Ring::is_square_mod(s, exponent);
        suite.out.push(CheckResult::boolean("lambda_independence", json!({"s": s, "exponent": exponent}), square, global_equal[ui]));
    }
    for (gi, g) in tested.iter().enumerate() {
        let even = odd_multiplicity_primes(&g.displacement()).is_empty();
        suite.out.push(CheckResult::boolean("lambda_independence_g", g_param(g), even, per_g_equal[gi]));
    }
    Ok(())
}

/// A decomposition of `V` into mutually orthogonal blocks: the primary parts
/// when `m` has several primes, otherwise the hyperbolic planes.
pub(crate) fn orthogonal_blocks(space: &SymplecticSpace) -> Result<(Vec<Submodule>, bool)> {
    let module = space.module();
    let m = space.ring().modulus();
    let primes = prime_factors(m);
    if primes.len() > 1 {
        let blocks = primes
            .iter()
            .map(|&(p, e)| Submodule::full(module).scaled((m / p.pow(e)) as i64))
            .filter(|b| b.order() > 1)
            .collect::<Vec<_>>();
        return Ok((blocks, true));
    }
    let split = hyperbolic_basis(space.omega())?;
    let blocks = split
        .pairs
        .iter()
        .map(|p| Submodule::from_generators(module, vec![p.u.clone(), p.w.clone()]))
        .collect();
    Ok((blocks, false))
}

/// The block as a symplectic module of its own.
pub(crate) fn block_space(space: &SymplecticSpace, block: &Submodule) -> Result<Arc<SymplecticSpace>> {
    let gram = block
        .basis()
        .iter()
        .map(|x| block.basis().iter().map(|y| space.omega_eval(x, y)).collect())
        .collect();
    let abs: FinModule = block.abstract_module();
    Ok(Arc::new(SymplecticSpace::new(abs, gram)?))
}

/// `g = (g_1, ..., g_k)` acting blockwise.
pub(crate) fn assemble(space: &Arc<SymplecticSpace>, blocks: &[Submodule], parts: &[SpElement]) -> Result<SpElement> {
    let mut basis = Vec::new();
    let mut images = Vec::new();
    for (block, part) in blocks.iter().zip(parts) {
        for (i, b) in block.basis().iter().enumerate() {
            basis.push(b.clone());
            images.push(block.embed(&part.apply(&part.space().module().generator(i))));
        }
    }
    from_basis_images(space, &basis, &images)
}

fn orthogonal_sums(suite: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    let space = suite.space;
    let (blocks, primary) = orthogonal_blocks(space)?;
    if blocks.len() < 2 {
        return Ok(());
    }
    let spaces = blocks.iter().map(|b| block_space(space, b)).collect::<Result<Vec<_>>>()?;
    let rounds = 4;
    for _ in 0..rounds {
        let parts = spaces
            .iter()
            .map(|s| sp_random_with(s, rng, RANDOM_STEPS))
            .collect::<Result<Vec<_>>>()?;
        let g = assemble(space, &blocks, &parts)?;
        let params = json!({"g": g.matrix(), "blocks": parts.iter().map(|p| p.matrix().to_vec()).collect::<Vec<_>>()});
        let r = (|| {
            let mut prod = CharacterValue::new(1, FourthRoot::ONE);
            for p in &parts {
                prod = prod.mul(closed_value(p, &suite.lambda)?);
            }
            Ok(CheckResult::exact("orthogonal_sum", params.clone(), prod, suite.psi(&g)?))
        })();
        suite.push("orthogonal_sum", params, r);
    }
    if primary {
        for _ in 0..rounds {
            let g = sp_random_with(space, rng, RANDOM_STEPS)?;
            let params = g_param(&g);
            let r = (|| {
                let mut prod = CharacterValue::new(1, FourthRoot::ONE);
                for (block, bs) in blocks.iter().zip(&spaces) {
                    let part = SpElement::new(bs, block.restrict_endo(g.hom())?)?;
                    prod = prod.mul(closed_value(&part, &suite.lambda)?);
                }
                Ok(CheckResult::exact("primary_product", params.clone(), prod, suite.psi(&g)?))
            })();
            suite.push("primary_product", params, r);
        }
    }
    Ok(())
}
