//! Multivariate polynomial GCD over Q by recursive primitive PRS.
//!
//! Polynomials are viewed as univariate in one variable with coefficients in
//! the remaining ones; contents are computed recursively so the coefficient
//! ring shrinks by one variable per level.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::poly::{Poly, Rational};

/// Monic greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mono = ma.gcd(&mb);
    if a.is_monomial() || b.is_monomial() {
        return Poly::term(Rational::one(), mono);
    }
    let a = strip_monomial(a, &ma);
    let b = strip_monomial(b, &mb);
    g_stripped(&a, &b).mul_monomial(&mono, &Rational::one()).monic()
}

fn g_stripped(a: &Poly, b: &Poly) -> Poly {
    if let Some(g) = divisor_of_other(a, b) {
        return g;
    }
    let bounds = degree_bounds(a, b);
    if let Some(bd) = &bounds {
        if bd.iter().all(|&(_, d)| d == 0) {
            return Poly::one();
        }
        // Any common divisor attaining every degree bound is the gcd.
        if let Some(g) = heuristic_gcd(a, b) {
            if bd.iter().all(|&(v, d)| g.degree_in(v) as usize == d) {
                return g.monic();
            }
        }
    }
    gcd_rec(a, b)
}

/// `Some(monic smaller)` when one argument divides the other.
fn divisor_of_other(a: &Poly, b: &Poly) -> Option<Poly> {
    let (small, big) = if a.n_terms() <= b.n_terms() { (a, b) } else { (b, a) };
    let width = small.width();
    if (0..width).any(|v| small.degree_in(v) > big.degree_in(v)) {
        return None;
    }
    big.div_exact(small).map(|_| small.monic())
}

/// Upper bounds on the degree of `gcd(a, b)` in each shared variable, read
/// off univariate images.
///
/// Fixing every variable but `v` at a point where both leading coefficients
/// in `v` survive maps the true gcd onto a divisor of the image gcd with its
/// `v`-degree intact. Variables present in only one argument cannot occur in
/// the gcd at all.
fn degree_bounds(a: &Poly, b: &Poly) -> Option<Vec<(usize, usize)>> {
    let width = a.width().max(b.width());
    let mut out = Vec::new();
    'vars: for v in (0..width).filter(|&v| a.contains_var(v) && b.contains_var(v)) {
        for attempt in 0..4i64 {
            let point: Vec<Rational> = (0..width)
                .map(|i| Rational::from_integer(((3 + 2 * i as i64) * (attempt + 1) + attempt).into()))
                .collect();
            let ia = image(a, v, &point);
            let ib = image(b, v, &point);
            if ia.len() == a.degree_in(v) as usize + 1 && ib.len() == b.degree_in(v) as usize + 1 {
                out.push((v, univariate_gcd_degree(ia, ib)));
                continue 'vars;
            }
        }
        return None;
    }
    Some(out)
}

fn image(p: &Poly, v: usize, point: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); p.degree_in(v) as usize + 1];
    for (m, c) in p.terms() {
        let (e, rest) = m.split_var(v);
        let mut val = c.clone();
        for (i, k) in rest.vars() {
            val *= num_traits::pow(point[i].clone(), k as usize);
        }
        out[e as usize] += val;
    }
    while out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    out
}

fn univariate_gcd_degree(mut f: Vec<Rational>, mut g: Vec<Rational>) -> usize {
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    while !g.is_empty() {
        let lg = g.last().expect("nonempty").clone();
        while f.len() >= g.len() {
            let q = f.last().expect("nonempty") / &lg;
            let shift = f.len() - g.len();
            for (i, gc) in g.iter().enumerate() {
                let t = &q * gc;
                f[i + shift] -= t;
            }
            f.pop();
            while f.last().is_some_and(Zero::is_zero) {
                f.pop();
            }
        }
        std::mem::swap(&mut f, &mut g);
    }
    f.len().saturating_sub(1)
}

fn strip_monomial(p: &Poly, m: &Monomial) -> Poly {
    if m.is_one() {
        return p.clone();
    }
    Poly::from_terms(
        p.terms()
            .map(|(k, c)| (k.checked_div(m).expect("monomial content divides"), c.clone())),
    )
}

fn gcd_rec(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.monic() == b.monic() {
        return a.monic();
    }
    let width = a.width().max(b.width());
    let in_a = |v: usize| a.contains_var(v);
    let in_b = |v: usize| b.contains_var(v);
    // A variable present in only one argument is eliminated by taking that
    // argument's content with respect to it.
    if let Some(v) = (0..width).find(|&v| in_a(v) != in_b(v)) {
        return if in_a(v) {
            gcd_rec(&content(&a.to_univariate(v)), b)
        } else {
            gcd_rec(a, &content(&b.to_univariate(v)))
        };
    }
    let v = (0..width)
        .filter(|&v| in_a(v))
        .min_by_key(|&v| a.degree_in(v).max(b.degree_in(v)))
        .expect("non-constant polynomial has a variable");

    let ua = a.to_univariate(v);
    let ub = b.to_univariate(v);
    let ca = content(&ua);
    let cb = content(&ub);
    let c = gcd_rec(&ca, &cb);
    let pa = divide_coeffs(&ua, &ca);
    let pb = divide_coeffs(&ub, &cb);
    let g = primitive_prs(pa, pb);
    (&c * &Poly::from_univariate(&g, v)).monic()
}

fn content(coeffs: &[Poly]) -> Poly {
    let mut nz = coeffs.iter().filter(|c| !c.is_zero());
    let Some(first) = nz.next() else {
        return Poly::zero();
    };
    let mut g = first.monic();
    for c in nz {
        if g.is_one() {
            break;
        }
        g = gcd_rec(&g, c);
    }
    g
}

fn divide_coeffs(coeffs: &[Poly], by: &Poly) -> Vec<Poly> {
    let out: Vec<Poly> = coeffs
        .iter()
        .map(|c| c.div_exact(by).expect("content divides every coefficient"))
        .collect();
    normalize_lc(out)
}

fn normalize_lc(mut u: Vec<Poly>) -> Vec<Poly> {
    trim(&mut u);
    if let Some(lc) = u.last().and_then(|p| p.leading().map(|(_, c)| c.clone())) {
        if !lc.is_one() {
            let inv = lc.recip();
            for c in u.iter_mut() {
                *c = c.scale(&inv);
            }
        }
    }
    u
}

fn trim(u: &mut Vec<Poly>) {
    while u.last().is_some_and(Poly::is_zero) {
        u.pop();
    }
}

fn primitive_prs(a: Vec<Poly>, b: Vec<Poly>) -> Vec<Poly> {
    let (mut f, mut g) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    loop {
        if g.len() <= 1 {
            return vec![Poly::one()];
        }
        let r = pseudo_remainder(&f, &g);
        if r.is_empty() {
            return g;
        }
        if r.len() == 1 {
            return vec![Poly::one()];
        }
        let c = content(&r);
        let r = divide_coeffs(&r, &c);
        f = g;
        g = r;
    }
}

fn pseudo_remainder(f: &[Poly], g: &[Poly]) -> Vec<Poly> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    let lcg = &g[dg];
    trim(&mut r);
    while r.len() > dg && !r.is_empty() {
        let dr = r.len() - 1;
        let lcr = r[dr].clone();
        let shift = dr - dg;
        for c in r.iter_mut() {
            *c = &*c * lcg;
        }
        for (i, gc) in g.iter().enumerate() {
            let t = gc * &lcr;
            r[i + shift] = &r[i + shift] - &t;
        }
        debug_assert!(r[dr].is_zero());
        trim(&mut r);
    }
    r
}

/// Heuristic integer gcd: evaluate one variable at a large integer, recurse,
/// and rebuild from the balanced base-ξ digits. Returns a verified common
/// divisor or `None`.
fn heuristic_gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    heu(&integer_primitive(a), &integer_primitive(b), 0)
}

const HEU_MAX_DEPTH: usize = 12;
const HEU_MAX_BITS: u64 = 20_000;

fn heu(a: &Poly, b: &Poly, depth: usize) -> Option<Poly> {
    if depth > HEU_MAX_DEPTH {
        return None;
    }
    if a.is_zero() {
        return Some(b.clone());
    }
    if b.is_zero() {
        return Some(a.clone());
    }
    let ca = int_content(a);
    let cb = int_content(b);
    let c = Rational::from_integer(ca.gcd(&cb));
    if a.is_constant() || b.is_constant() {
        return Some(Poly::constant(c));
    }
    let a = a.scale(&Rational::from_integer(ca).recip());
    let b = b.scale(&Rational::from_integer(cb).recip());
    let v = (0..a.width().max(b.width()))
        .rev()
        .find(|&v| a.contains_var(v) || b.contains_var(v))
        .expect("non-constant");
    let mut xi: BigInt = norm(&a).min(norm(&b)) * 2 + 29;
    for _ in 0..6 {
        if xi.bits() > HEU_MAX_BITS {
            return None;
        }
        let ia = substitute(&a, v, &xi);
        let ib = substitute(&b, v, &xi);
        if let Some(gamma) = heu(&ia, &ib, depth + 1) {
            let g = reconstruct(gamma, v, &xi);
            if !g.is_zero() {
                let g = g.scale(&Rational::from_integer(int_content(&g)).recip());
                if a.div_exact(&g).is_some() && b.div_exact(&g).is_some() {
                    return Some(g.scale(&c));
                }
            }
        }
        xi = xi * 73794 / 27011;
    }
    None
}

fn integer_primitive(p: &Poly) -> Poly {
    let l = p.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let scaled = p.scale(&Rational::from_integer(l));
    let g = int_content(&scaled);
    scaled.scale(&Rational::from_integer(g).recip())
}

fn int_content(p: &Poly) -> BigInt {
    p.terms().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()))
}

fn norm(p: &Poly) -> BigInt {
    p.terms().map(|(_, c)| c.numer().abs()).max().unwrap_or_default()
}

fn substitute(p: &Poly, v: usize, xi: &BigInt) -> Poly {
    let deg = p.degree_in(v) as usize;
    let mut powers = Vec::with_capacity(deg + 1);
    powers.push(BigInt::one());
    for i in 0..deg {
        let next = &powers[i] * xi;
        powers.push(next);
    }
    Poly::from_terms(p.terms().map(|(m, c)| {
        let (e, rest) = m.split_var(v);
        (rest, c * Rational::from_integer(powers[e as usize].clone()))
    }))
}

fn reconstruct(mut gamma: Poly, v: usize, xi: &BigInt) -> Poly {
    let half = xi / 2;
    let xi_r = Rational::from_integer(xi.clone());
    let mut out = Poly::zero();
    let mut e = 0u32;
    while !gamma.is_zero() {
        let digit = Poly::from_terms(gamma.terms().map(|(m, c)| {
            let mut r = c.numer().mod_floor(xi);
            if r > half {
                r -= xi;
            }
            (m.clone(), Rational::from_integer(r))
        }));
        out = &out + &digit.mul_monomial(&Monomial::var_pow(v, e), &Rational::one());
        gamma = (&gamma - &digit).scale(&xi_r.recip());
        e += 1;
    }
    out
}
