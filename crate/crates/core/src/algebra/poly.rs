//! Sparse multivariate polynomials over `Rat`.
//!
//! A `Poly` carries its own ordered variable list; exponent vectors always
//! have the length of that list. Arithmetic between polynomials over
//! different variable lists is a programming error and panics; entry points
//! that accept user input check with [`Poly::check_same_vars`] first.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::rat::Rat;
use crate::error::{Error, Result};

pub type Exponent = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    vars: Vec<String>,
    terms: BTreeMap<Exponent, Rat>,
}

/// Monomial order used for sign normalization and printing: lexicographic
/// with the *last* declared variable most significant (for `[x, y]`, `y`
/// before `x`).
pub fn cmp_rev_lex(a: &[u32], b: &[u32]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

impl Poly {
    pub fn zero<S: AsRef<str>>(vars: &[S]) -> Poly {
        Poly { vars: vars.iter().map(|v| v.as_ref().to_string()).collect(), terms: BTreeMap::new() }
    }

    pub fn constant<S: AsRef<str>>(vars: &[S], c: Rat) -> Poly {
        let mut p = Poly::zero(vars);
        let n = p.vars.len();
        p.add_term(vec![0; n], c);
        p
    }

    pub fn monomial<S: AsRef<str>>(vars: &[S], exp: Exponent, c: Rat) -> Poly {
        let mut p = Poly::zero(vars);
        assert_eq!(exp.len(), p.vars.len(), "exponent length");
        p.add_term(exp, c);
        p
    }

    pub fn var<S: AsRef<str>>(vars: &[S], name: &str) -> Result<Poly> {
        let mut p = Poly::zero(vars);
        let idx = p.var_index(name).ok_or_else(|| Error::UnknownVariable { name: name.into(), pos: 0 })?;
        let mut e = vec![0; p.vars.len()];
        e[idx] = 1;
        p.add_term(e, Rat::one());
        Ok(p)
    }

    pub fn from_terms<S: AsRef<str>, I>(vars: &[S], terms: I) -> Poly
    where
        I: IntoIterator<Item = (Exponent, Rat)>,
    {
        let mut p = Poly::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent length");
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Same as [`Poly::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[u32]) -> Rat {
        self.terms.get(exp).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn check_same_vars(&self, other: &Poly) -> Result<()> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(Error::VarMismatch { left: self.vars.clone(), right: other.vars.clone() })
        }
    }

    fn add_term(&mut self, exp: Exponent, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.vars);
        }
        Poly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::constant(&self.vars, Rat::one());
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.vars.len(), "evaluation point length");
        let mut sum = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            sum += t;
        }
        sum
    }

    /// Degree in one variable; `None` for the zero polynomial.
    pub fn degree_in(&self, idx: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[idx]).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Coefficients of `var^k` for `k = 0..=deg`, each a polynomial over the
    /// same variable list with that variable's exponent zeroed.
    pub fn coeffs_in(&self, idx: usize) -> Vec<Poly> {
        let deg = self.degree_in(idx).unwrap_or(0) as usize;
        let mut out = vec![Poly::zero(&self.vars); deg + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[idx] as usize;
            e2[idx] = 0;
            out[k].add_term(e2, c.clone());
        }
        out
    }

    /// Replaces variable `idx` by `value` (a polynomial over the same list).
    pub fn substitute(&self, idx: usize, value: &Poly) -> Poly {
        assert_eq!(self.vars, value.vars, "substitute: variable lists differ");
        let coeffs = self.coeffs_in(idx);
        // Horner in the substituted variable.
        let mut acc = Poly::zero(&self.vars);
        for c in coeffs.into_iter().rev() {
            acc = &(&acc * value) + &c;
        }
        acc
    }

    /// Sets variable `idx` to zero and removes it from the variable list.
    pub fn restrict_zero(&self, idx: usize) -> Poly {
        let mut vars = self.vars.clone();
        vars.remove(idx);
        let mut p = Poly::zero(&vars);
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                let mut e2 = e.clone();
                e2.remove(idx);
                p.add_term(e2, c.clone());
            }
        }
        p
    }

    /// Removes variable `idx`, which must not occur.
    pub fn drop_var(&self, idx: usize) -> Poly {
        assert!(self.terms.keys().all(|e| e[idx] == 0), "drop_var: variable occurs");
        self.restrict_zero(idx)
    }

    /// Re-expresses the polynomial over a larger variable list containing
    /// all current variables.
    pub fn embed<S: AsRef<str>>(&self, vars: &[S]) -> Result<Poly> {
        let mut target = Poly::zero(vars);
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| target.var_index(v).ok_or_else(|| Error::UnknownVariable { name: v.clone(), pos: 0 }))
            .collect::<Result<_>>()?;
        let n = target.vars.len();
        for (e, c) in &self.terms {
            let mut e2 = vec![0; n];
            for (i, &k) in e.iter().enumerate() {
                e2[map[i]] = k;
            }
            target.add_term(e2, c.clone());
        }
        Ok(target)
    }

    /// Largest term in [`cmp_rev_lex`] order.
    pub fn leading_term(&self) -> Option<(&Exponent, &Rat)> {
        self.terms.iter().max_by(|a, b| cmp_rev_lex(a.0, b.0))
    }

    /// Multiplies by `±1` so the leading term has positive coefficient.
    pub fn normalize_sign(&self) -> Poly {
        match self.leading_term() {
            Some((_, c)) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert_eq!(self.vars, d.vars, "div_exact: variable lists differ");
        let (dl_exp, dl_c) = d.terms.iter().next_back()?;
        let mut rem = self.clone();
        let mut q = Poly::zero(&self.vars);
        while let Some((re, rc)) = rem.terms.iter().next_back() {
            if re.iter().zip(dl_exp).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Exponent = re.iter().zip(dl_exp).map(|(a, b)| a - b).collect();
            let qc = rc / dl_c;
            let step = Poly::monomial(&self.vars, qe, qc);
            rem = &rem - &(&step * d);
            q = &q + &step;
        }
        Some(q)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.vars, rhs.vars, "add: variable lists differ");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.vars, rhs.vars, "sub: variable lists differ");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.vars, rhs.vars, "mul: variable lists differ");
        let mut out = Poly::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }
}

impl fmt::Display for Poly {
    /// Canonical form: terms in decreasing [`cmp_rev_lex`] order, `*`
    /// between factors, `^` for exponents above one.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| cmp_rev_lex(b.0, a.0));
        for (i, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| if k == 1 { self.vars[j].clone() } else { format!("{}^{}", self.vars[j], k) })
                .collect();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.vars.join(","), self)
    }
}
