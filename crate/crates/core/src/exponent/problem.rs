//! Linear exponent forms in `(x_P, x_L, θ)` and min-max bound problems.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn ser_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(q)
}

/// A point `(x_P, x_L, θ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Point {
    #[serde(serialize_with = "ser_rational")]
    pub x_p: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub x_l: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub theta: Rational,
}

impl Point {
    pub fn new(x_p: Rational, x_l: Rational, theta: Rational) -> Self {
        Point { x_p, x_l, theta }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(xP, xL, th) = ({}, {}, {})", self.x_p, self.x_l, self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    XP,
    XL,
    Theta,
}

/// `constant + coeff_xp·x_P + coeff_xl·x_L + coeff_theta·θ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentForm {
    #[serde(serialize_with = "ser_rational")]
    pub constant: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub coeff_xp: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub coeff_xl: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub coeff_theta: Rational,
}

impl ExponentForm {
    pub fn new(constant: Rational, coeff_xp: Rational, coeff_xl: Rational, coeff_theta: Rational) -> Self {
        ExponentForm {
            constant,
            coeff_xp,
            coeff_xl,
            coeff_theta,
        }
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn coeff(&self, v: Var) -> &Rational {
        match v {
            Var::XP => &self.coeff_xp,
            Var::XL => &self.coeff_xl,
            Var::Theta => &self.coeff_theta,
        }
    }

    pub fn coeff_mut(&mut self, v: Var) -> &mut Rational {
        match v {
            Var::XP => &mut self.coeff_xp,
            Var::XL => &mut self.coeff_xl,
            Var::Theta => &mut self.coeff_theta,
        }
    }

    /// Replaces `v` by `expr`, which must not involve `v`.
    pub fn substitute(&self, v: Var, expr: &Self) -> Self {
        let k = self.coeff(v).clone();
        let mut out = self.add(&expr.scale(&k));
        *out.coeff_mut(v) -= k;
        out
    }

    pub fn eval(&self, pt: &Point) -> Rational {
        &self.constant + &self.coeff_xp * &pt.x_p + &self.coeff_xl * &pt.x_l + &self.coeff_theta * &pt.theta
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(
            &self.constant + &o.constant,
            &self.coeff_xp + &o.coeff_xp,
            &self.coeff_xl + &o.coeff_xl,
            &self.coeff_theta + &o.coeff_theta,
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(
            &self.constant * k,
            &self.coeff_xp * k,
            &self.coeff_xl * k,
            &self.coeff_theta * k,
        )
    }
}

fn write_linear(f: &mut fmt::Formatter<'_>, constant: Option<&Rational>, terms: [(&Rational, &str); 3]) -> fmt::Result {
    let mut first = true;
    if let Some(c) = constant {
        write!(f, "{c}")?;
        first = false;
    }
    for (coeff, var) in terms {
        if coeff.is_zero() {
            continue;
        }
        if first {
            write!(f, "{coeff}*{var}")?;
            first = false;
        } else if coeff.is_negative() {
            write!(f, " - {}*{var}", -coeff)?;
        } else {
            write!(f, " + {coeff}*{var}")?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for ExponentForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_linear(
            f,
            Some(&self.constant),
            [(&self.coeff_xp, "xP"), (&self.coeff_xl, "xL"), (&self.coeff_theta, "th")],
        )
    }
}

/// `coeff · (x_P, x_L, θ) ≤ rhs`, or `<` when `strict`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constraint {
    #[serde(serialize_with = "ser_rational")]
    pub coeff_xp: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub coeff_xl: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub coeff_theta: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub rhs: Rational,
    pub strict: bool,
}

impl Constraint {
    pub fn new(coeffs: [Rational; 3], rhs: Rational, strict: bool) -> Self {
        let [coeff_xp, coeff_xl, coeff_theta] = coeffs;
        Constraint {
            coeff_xp,
            coeff_xl,
            coeff_theta,
            rhs,
            strict,
        }
    }

    pub fn lhs(&self, pt: &Point) -> Rational {
        &self.coeff_xp * &pt.x_p + &self.coeff_xl * &pt.x_l + &self.coeff_theta * &pt.theta
    }

    /// Non-strict version of the inequality.
    pub fn holds_closure(&self, pt: &Point) -> bool {
        self.lhs(pt) <= self.rhs
    }

    pub fn holds(&self, pt: &Point) -> bool {
        let l = self.lhs(pt);
        if self.strict {
            l < self.rhs
        } else {
            l <= self.rhs
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_linear(
            f,
            None,
            [(&self.coeff_xp, "xP"), (&self.coeff_xl, "xL"), (&self.coeff_theta, "th")],
        )?;
        write!(f, " {} {}", if self.strict { "<" } else { "<=" }, self.rhs)
    }
}

/// Minimize the maximum of `forms` subject to `constraints`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundProblem {
    pub forms: Vec<ExponentForm>,
    pub constraints: Vec<Constraint>,
}

/// Index of the constraint `4θ + x_L ≤ x_P` in [`paper_bound_problem`].
pub const POST_HOC_CONSTRAINT: usize = 4;

/// Six exponent forms with `N = M^{3/2}` and the five side conditions.
pub fn paper_bound_problem() -> BoundProblem {
    let z = || Rational::zero();
    let r = rat;
    let forms = vec![
        ExponentForm::new(r(1, 2), r(1, 2), z(), r(9, 1)),
        ExponentForm::new(r(5, 8), r(1, 4), r(1, 4), r(17, 4)),
        ExponentForm::new(r(1, 2), r(1, 1), r(-1, 2), r(7, 1)),
        ExponentForm::new(r(3, 4), r(-1, 1), r(1, 1), r(3, 2)),
        ExponentForm::new(r(1, 1), r(-1, 1), z(), r(1, 1)),
        ExponentForm::new(r(3, 4), z(), z(), r(-1, 2)),
    ];
    let constraints = vec![
        // x_L < x_P
        Constraint::new([r(-1, 1), r(1, 1), z()], z(), true),
        // θ < 1/2
        Constraint::new([z(), z(), r(1, 1)], r(1, 2), true),
        // 2θ ≤ x_L
        Constraint::new([z(), r(-1, 1), r(2, 1)], z(), false),
        // x_L < 1/2
        Constraint::new([z(), r(1, 1), z()], r(1, 2), true),
        // 4θ + x_L ≤ x_P
        Constraint::new([r(-1, 1), r(1, 1), r(4, 1)], z(), false),
    ];
    BoundProblem { forms, constraints }
}

impl BoundProblem {
    pub fn without_constraint(&self, index: usize) -> Self {
        let mut out = self.clone();
        out.constraints.remove(index);
        out
    }

    pub fn check_point(&self, pt: &Point) -> Result<()> {
        match self.constraints.iter().position(|c| !c.holds_closure(pt)) {
            Some(i) => Err(Error::InfeasiblePoint(i)),
            None => Ok(()),
        }
    }

    /// Indices of forms attaining `value` at `pt`.
    pub fn active_terms(&self, pt: &Point, value: &Rational) -> Vec<usize> {
        (0..self.forms.len()).filter(|&i| &self.forms[i].eval(pt) == value).collect()
    }

    /// Renders in the problem-file grammar accepted by [`parse_problem`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.forms {
            out.push_str(&format!("form: {f}\n"));
        }
        for c in &self.constraints {
            out.push_str(&format!("st: {c}\n"));
        }
        out
    }
}

/// The maximum of all forms at a point satisfying the (closed) constraints.
pub fn evaluate_bound(prob: &BoundProblem, pt: &Point) -> Result<Rational> {
    prob.check_point(pt)?;
    prob.forms
        .iter()
        .map(|f| f.eval(pt))
        .max()
        .ok_or_else(|| Error::ParameterInconsistency("problem has no forms".into()))
}

fn parse_rational(s: &str) -> Option<Rational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    if let Some((int, frac)) = num.split_once('.') {
        if den != "1" || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits: BigInt = format!("{int}{frac}").parse().ok()?;
        return Some(Rational::new(digits, BigInt::from(10u32).pow(frac.len() as u32)));
    }
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Parses `a + b*xP - c*xL + d/e*th` (whitespace already removed).
fn parse_linear(s: &str) -> std::result::Result<ExponentForm, String> {
    if s.is_empty() {
        return Err("empty expression".into());
    }
    let mut out = ExponentForm::zero();
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if (ch == '+' || ch == '-') && i > start {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    for raw in terms {
        let (neg, body) = match raw.as_bytes().first() {
            Some(b'+') => (false, &raw[1..]),
            Some(b'-') => (true, &raw[1..]),
            _ => (false, raw),
        };
        let (coeff, var) = match body.split_once('*') {
            Some((c, v)) => (parse_rational(c).ok_or(format!("bad coefficient '{c}'"))?, Some(v)),
            None => match parse_rational(body) {
                Some(c) => (c, None),
                None => (Rational::one(), Some(body)),
            },
        };
        let coeff = if neg { -coeff } else { coeff };
        let slot = match var {
            None => &mut out.constant,
            Some("xP") => &mut out.coeff_xp,
            Some("xL") => &mut out.coeff_xl,
            Some("th") | Some("theta") => &mut out.coeff_theta,
            Some(v) => return Err(format!("unknown variable '{v}'")),
        };
        *slot += coeff;
    }
    Ok(out)
}

fn parse_constraint(s: &str) -> std::result::Result<Constraint, String> {
    let ops = [("<=", false, false), (">=", false, true), ("<", true, false), (">", true, true)];
    for (op, strict, flip) in ops {
        if let Some((l, r)) = s.split_once(op) {
            let diff = parse_linear(l)?.sub(&parse_linear(r)?);
            let diff = if flip { diff.scale(&-Rational::one()) } else { diff };
            return Ok(Constraint::new(
                [diff.coeff_xp, diff.coeff_xl, diff.coeff_theta],
                -diff.constant,
                strict,
            ));
        }
    }
    Err("constraint needs one of <=, <, >=, >".into())
}

/// Parses the line-oriented problem grammar:
/// `form: c + p*xP + l*xL + t*th` and `st: a*xP + b*xL + c*th <= d`.
/// `#` starts a comment; whitespace is ignored.
pub fn parse_problem(text: &str) -> Result<BoundProblem> {
    let mut prob = BoundProblem {
        forms: Vec::new(),
        constraints: Vec::new(),
    };
    for (idx, line) in text.lines().enumerate() {
        let err = |msg: String| Error::Parse { line: idx + 1, msg };
        let body: String = line
            .split('#')
            .next()
            .unwrap_or("")
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("form:") {
            prob.forms.push(parse_linear(rest).map_err(err)?);
        } else if let Some(rest) = body.strip_prefix("st:") {
            prob.constraints.push(parse_constraint(rest).map_err(err)?);
        } else {
            return Err(err("expected 'form:' or 'st:'".into()));
        }
    }
    if prob.forms.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no forms given".into(),
        });
    }
    Ok(prob)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimum() -> Point {
        Point::new(rat(20, 77), rat(9, 77), rat(1, 154))
    }

    #[test]
    fn last_form_depends_on_theta_only() {
        let p = paper_bound_problem();
        let pt = Point::new(rat(1, 3), rat(1, 5), rat(1, 10));
        assert_eq!(p.forms[5].eval(&pt), rat(3, 4) - rat(1, 20));
    }

    #[test]
    fn fifth_form_at_optimum() {
        let p = paper_bound_problem();
        assert_eq!(p.forms[4].eval(&optimum()), rat(115, 154));
    }

    #[test]
    fn optimum_is_feasible() {
        let p = paper_bound_problem();
        assert!(p.constraints.iter().all(|c| c.holds(&optimum())));
        assert_eq!(evaluate_bound(&p, &optimum()).unwrap(), rat(115, 154));
    }

    #[test]
    fn evaluate_at_simple_point() {
        let p = paper_bound_problem();
        let pt = Point::new(rat(1, 4), rat(1, 8), Rational::zero());
        // forms: 5/8, 23/32, 11/16, 5/8, 3/4, 3/4
        assert_eq!(evaluate_bound(&p, &pt).unwrap(), rat(3, 4));
        let bad = Point::new(rat(1, 8), rat(1, 4), Rational::zero());
        assert_eq!(evaluate_bound(&p, &bad), Err(Error::InfeasiblePoint(0)));
    }

    #[test]
    fn text_round_trip() {
        let p = paper_bound_problem();
        let text = p.to_text();
        assert!(text.contains("form: 5/8 + 1/4*xP + 1/4*xL + 17/4*th"));
        assert_eq!(parse_problem(&text).unwrap(), p);
    }

    #[test]
    fn parser_accepts_variants() {
        let p = parse_problem(
            "# comment\nform: 1 - xP + th  # trailing\n\nst: 2*th >= xL - 0.25\nst: xP<1/2\n",
        )
        .unwrap();
        assert_eq!(p.forms[0], ExponentForm::new(rat(1, 1), rat(-1, 1), rat(0, 1), rat(1, 1)));
        assert_eq!(
            p.constraints[0],
            Constraint::new([rat(0, 1), rat(1, 1), rat(-2, 1)], rat(1, 4), false)
        );
        assert!(p.constraints[1].strict);
        assert!(matches!(parse_problem("form: 1 + y"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_problem("st: xP <= 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_problem("foo"), Err(Error::Parse { line: 1, .. })));
    }
}
