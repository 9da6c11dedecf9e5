//! Exact min-max optimization by vertex enumeration, and the sequential
//! pairing of forms that leads to the same optimum by hand.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::problem::{evaluate_bound, ser_rational, BoundProblem, ExponentForm, Point, Rational, Var};
use crate::error::{Error, Result};

/// Box half-width used to detect unbounded problems.
const BOX: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// Convex weights on the forms (sum to 1).
    #[serde(serialize_with = "ser_vec")]
    pub form_weights: Vec<Rational>,
    /// Nonnegative weights on the constraints.
    #[serde(serialize_with = "ser_vec")]
    pub constraint_weights: Vec<Rational>,
}

fn ser_vec<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for q in v {
        seq.serialize_element(&q.to_string())?;
    }
    seq.end()
}

impl Certificate {
    /// The lower bound `Σ λ_i c_i − Σ μ_j d_j` valid at every feasible point,
    /// or `None` if the weights do not cancel all three variables.
    pub fn lower_bound(&self, prob: &BoundProblem) -> Option<Rational> {
        if self.form_weights.iter().chain(&self.constraint_weights).any(|w| w.is_negative()) {
            return None;
        }
        if self.form_weights.iter().sum::<Rational>() != Rational::one() {
            return None;
        }
        let mut combo = ExponentForm::zero();
        for (w, f) in self.form_weights.iter().zip(&prob.forms) {
            combo = combo.add(&f.scale(w));
        }
        for (w, c) in self.constraint_weights.iter().zip(&prob.constraints) {
            let as_form = ExponentForm::new(-&c.rhs, c.coeff_xp.clone(), c.coeff_xl.clone(), c.coeff_theta.clone());
            combo = combo.add(&as_form.scale(w));
        }
        let cancels = combo.coeff_xp.is_zero() && combo.coeff_xl.is_zero() && combo.coeff_theta.is_zero();
        cancels.then_some(combo.constant)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OptimizationResult {
    pub point: Point,
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    pub active_terms: Vec<usize>,
    pub certificate: Certificate,
    /// Whether the optimum also satisfies the strict inequalities.
    pub strict_satisfied: bool,
}

/// Rows `a·z ≤ b` over `z = (x_P, x_L, θ, t)`.
fn epigraph_rows(prob: &BoundProblem) -> Vec<([Rational; 4], Rational)> {
    let mut rows = Vec::new();
    for f in &prob.forms {
        rows.push((
            [f.coeff_xp.clone(), f.coeff_xl.clone(), f.coeff_theta.clone(), -Rational::one()],
            -f.constant.clone(),
        ));
    }
    for c in &prob.constraints {
        rows.push((
            [c.coeff_xp.clone(), c.coeff_xl.clone(), c.coeff_theta.clone(), Rational::zero()],
            c.rhs.clone(),
        ));
    }
    let b = Rational::from_integer(BigInt::from(BOX));
    for i in 0..4 {
        for sign in [1, -1] {
            if i == 3 && sign == 1 {
                continue;
            }
            let mut a: [Rational; 4] = Default::default();
            a[i] = Rational::from_integer(BigInt::from(sign));
            rows.push((a, b.clone()));
        }
    }
    rows
}

/// Solves the square system `m·x = rhs`, or `None` if singular.
fn solve4(mut m: [[Rational; 4]; 4], mut rhs: [Rational; 4]) -> Option<[Rational; 4]> {
    for col in 0..4 {
        let pivot = (col..4).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..4 {
            if r != col && !m[r][col].is_zero() {
                let k = &m[r][col] / &m[col][col];
                for c in col..4 {
                    let delta = &k * &m[col][c];
                    m[r][c] -= delta;
                }
                let delta = &k * &rhs[col];
                rhs[r] -= delta;
            }
        }
    }
    let mut out: [Rational; 4] = Default::default();
    for i in 0..4 {
        out[i] = &rhs[i] / &m[i][i];
    }
    Some(out)
}

fn transpose(rows: &[&[Rational; 4]; 4]) -> [[Rational; 4]; 4] {
    let mut t: [[Rational; 4]; 4] = Default::default();
    for i in 0..4 {
        for j in 0..4 {
            t[j][i] = rows[i][j].clone();
        }
    }
    t
}

/// `min t` subject to `form_i ≤ t` and the closed constraints, over all
/// vertices of the boxed epigraph. Returns the first basis, in
/// lexicographic order, whose duals are nonnegative.
pub fn minimize_max(prob: &BoundProblem) -> Result<OptimizationResult> {
    let rows = epigraph_rows(prob);
    let n = rows.len();
    let n_real = prob.forms.len() + prob.constraints.len();
    let mut best: Option<(Rational, [Rational; 4], [usize; 4], [Rational; 4])> = None;
    let mut feasible = false;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let basis = [i, j, k, l];
                    let m = basis.map(|r| rows[r].0.clone());
                    let rhs = basis.map(|r| rows[r].1.clone());
                    let Some(z) = solve4(m, rhs) else { continue };
                    let ok = rows.iter().all(|(a, b)| {
                        a.iter().zip(&z).map(|(x, y)| x * y).sum::<Rational>() <= *b
                    });
                    if !ok {
                        continue;
                    }
                    feasible = true;
                    let t = z[3].clone();
                    if best.as_ref().is_some_and(|(bt, ..)| t >= *bt) {
                        continue;
                    }
                    // duals: A_Bᵀ y = −e_t
                    let at = transpose(&basis.map(|r| &rows[r].0));
                    let e = [Rational::zero(), Rational::zero(), Rational::zero(), -Rational::one()];
                    let y = solve4(at, e)
                        .expect("basis of a vertex is nonsingular");
                    if y.iter().all(|v| !v.is_negative()) {
                        best = Some((t, z, basis, y));
                    }
                }
            }
        }
    }
    let (value, z, basis, y) = match best {
        Some(b) => b,
        None if feasible => return Err(Error::Unbounded),
        None => return Err(Error::Infeasible),
    };
    if basis.iter().zip(&y).any(|(&r, w)| r >= n_real && !w.is_zero()) {
        return Err(Error::Unbounded);
    }
    let [x_p, x_l, theta, _] = z;
    let point = Point::new(x_p, x_l, theta);
    let mut form_weights = vec![Rational::zero(); prob.forms.len()];
    let mut constraint_weights = vec![Rational::zero(); prob.constraints.len()];
    for (&r, w) in basis.iter().zip(y) {
        if r < prob.forms.len() {
            form_weights[r] = w;
        } else if r < n_real {
            constraint_weights[r - prob.forms.len()] = w;
        }
    }
    let certificate = Certificate {
        form_weights,
        constraint_weights,
    };
    debug_assert_eq!(certificate.lower_bound(prob).as_ref(), Some(&value));
    Ok(OptimizationResult {
        active_terms: prob.active_terms(&point, &value),
        strict_satisfied: prob.constraints.iter().all(|c| c.holds(&point)),
        point,
        value,
        certificate,
    })
}

/// The sequence of equalities used by [`staged_elimination`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EliminationTrace {
    /// Forms equated to eliminate `x_L`, then `x_P`, then `θ` (zero-based).
    pub x_l_pair: (usize, usize),
    pub x_p_partner: usize,
    pub theta_partner: usize,
    /// `x_L` as a form in `(x_P, θ)`.
    pub x_l_in_terms: ExponentForm,
    /// First form after eliminating `x_L`.
    pub after_x_l: ExponentForm,
    /// `x_P` as a form in `θ`.
    pub x_p_in_terms: ExponentForm,
    /// Bound after eliminating `x_P`, a form in `θ`.
    pub after_x_p: ExponentForm,
    #[serde(serialize_with = "ser_rational")]
    pub theta: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StagedResult {
    pub result: OptimizationResult,
    pub trace: EliminationTrace,
}

/// Solves `a = b` for `v`, returning `v` as a form in the other variables;
/// `None` when the slopes coincide.
fn solve_for(a: &ExponentForm, b: &ExponentForm, v: Var) -> Option<ExponentForm> {
    let d = a.sub(b);
    let k = d.coeff(v).clone();
    if k.is_zero() {
        return None;
    }
    let mut expr = d.scale(&(-Rational::one() / &k));
    *expr.coeff_mut(v) = Rational::zero();
    Some(expr)
}

/// Convex weights on four forms whose gradients cancel, if they exist.
fn balance_weights(forms: [&ExponentForm; 4]) -> Option<[Rational; 4]> {
    let mut m: [[Rational; 4]; 4] = Default::default();
    for (col, f) in forms.iter().enumerate() {
        m[0][col] = f.coeff_xp.clone();
        m[1][col] = f.coeff_xl.clone();
        m[2][col] = f.coeff_theta.clone();
        m[3][col] = Rational::one();
    }
    let rhs = [Rational::zero(), Rational::zero(), Rational::zero(), Rational::one()];
    solve4(m, rhs).filter(|w| w.iter().all(|x| !x.is_negative()))
}

fn opposite(a: &Rational, b: &Rational) -> bool {
    (a.is_positive() && b.is_negative()) || (a.is_negative() && b.is_positive())
}

/// Equates two forms with opposite `x_L` slopes, substitutes, equates the
/// result with a form of opposite `x_P` slope, substitutes again, and
/// solves against a form of opposite `θ` slope. A plan is accepted when the
/// point is feasible, the four forms attain the maximum there, and convex
/// weights on them cancel every variable. The first accepted plan in
/// lexicographic order is returned.
pub fn staged_elimination(prob: &BoundProblem) -> Result<StagedResult> {
    let forms = &prob.forms;
    let nf = forms.len();
    for i in 0..nf {
        for j in i + 1..nf {
            if !opposite(&forms[i].coeff_xl, &forms[j].coeff_xl) {
                continue;
            }
            let Some(x_l_expr) = solve_for(&forms[i], &forms[j], Var::XL) else { continue };
            let after_x_l = forms[i].substitute(Var::XL, &x_l_expr);
            for k in (0..nf).filter(|k| ![i, j].contains(k)) {
                let partner = forms[k].substitute(Var::XL, &x_l_expr);
                if !opposite(&after_x_l.coeff_xp, &partner.coeff_xp) {
                    continue;
                }
                let Some(x_p_expr) = solve_for(&after_x_l, &partner, Var::XP) else { continue };
                let after_x_p = after_x_l.substitute(Var::XP, &x_p_expr);
                for h in (0..nf).filter(|h| ![i, j, k].contains(h)) {
                    let last = forms[h].substitute(Var::XL, &x_l_expr).substitute(Var::XP, &x_p_expr);
                    if !opposite(&after_x_p.coeff_theta, &last.coeff_theta) {
                        continue;
                    }
                    let Some(theta_expr) = solve_for(&after_x_p, &last, Var::Theta) else { continue };
                    let theta = theta_expr.constant;
                    let x_p = &x_p_expr.constant + &x_p_expr.coeff_theta * &theta;
                    let x_l = &x_l_expr.constant + &x_l_expr.coeff_xp * &x_p + &x_l_expr.coeff_theta * &theta;
                    let point = Point::new(x_p, x_l, theta.clone());
                    if prob.check_point(&point).is_err() {
                        continue;
                    }
                    let value = evaluate_bound(prob, &point)?;
                    if [i, j, k, h].iter().any(|&f| forms[f].eval(&point) != value) {
                        continue;
                    }
                    let Some(w) = balance_weights([&forms[i], &forms[j], &forms[k], &forms[h]]) else {
                        continue;
                    };
                    let mut form_weights = vec![Rational::zero(); nf];
                    for (&f, x) in [i, j, k, h].iter().zip(w) {
                        form_weights[f] = x;
                    }
                    return Ok(StagedResult {
                        result: OptimizationResult {
                            active_terms: prob.active_terms(&point, &value),
                            strict_satisfied: prob.constraints.iter().all(|c| c.holds(&point)),
                            point,
                            value,
                            certificate: Certificate {
                                form_weights,
                                constraint_weights: vec![Rational::zero(); prob.constraints.len()],
                            },
                        },
                        trace: EliminationTrace {
                            x_l_pair: (i, j),
                            x_p_partner: k,
                            theta_partner: h,
                            x_l_in_terms: x_l_expr,
                            after_x_l,
                            x_p_in_terms: x_p_expr,
                            after_x_p,
                            theta,
                        },
                    });
                }
            }
        }
    }
    Err(Error::ShapeMismatch("no pairing of forms yields a feasible balanced point".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::{paper_bound_problem, rat, POST_HOC_CONSTRAINT};
    use crate::exponent::{parse_problem, Constraint};

    #[test]
    fn builtin_optimum() {
        let prob = paper_bound_problem();
        let r = minimize_max(&prob).unwrap();
        assert_eq!(r.value, rat(115, 154));
        assert_eq!(r.value, rat(3, 4) - rat(1, 308));
        assert_eq!(r.point, Point::new(rat(20, 77), rat(9, 77), rat(1, 154)));
        assert_eq!(r.active_terms, vec![1, 2, 4, 5]);
        assert_eq!(r.certificate.lower_bound(&prob), Some(rat(115, 154)));
        assert!(r.strict_satisfied);
    }

    #[test]
    fn closed_form_point_from_theta() {
        let theta = rat(1, 154);
        let x_p = rat(5, 18) - rat(25, 9) * &theta;
        let x_l = &x_p - rat(1, 6) + rat(11, 3) * &theta;
        assert_eq!((x_p, x_l), (rat(20, 77), rat(9, 77)));
    }

    #[test]
    fn staged_matches_lp() {
        let prob = paper_bound_problem();
        let s = staged_elimination(&prob).unwrap();
        let lp = minimize_max(&prob).unwrap();
        assert_eq!(s.result.point, lp.point);
        assert_eq!(s.result.value, lp.value);
        let t = &s.trace;
        assert_eq!((t.x_l_pair, t.x_p_partner, t.theta_partner), ((1, 2), 4, 5));
        assert_eq!(t.x_l_in_terms, ExponentForm::new(rat(-1, 6), rat(1, 1), rat(0, 1), rat(11, 3)));
        assert_eq!(t.after_x_l, ExponentForm::new(rat(7, 12), rat(1, 2), rat(0, 1), rat(31, 6)));
        assert_eq!(t.x_p_in_terms, ExponentForm::new(rat(5, 18), rat(0, 1), rat(0, 1), rat(-25, 9)));
        assert_eq!(t.after_x_p, ExponentForm::new(rat(13, 18), rat(0, 1), rat(0, 1), rat(34, 9)));
        assert_eq!(t.theta, rat(1, 154));
        assert_eq!(s.result.certificate.lower_bound(&prob), Some(rat(115, 154)));
    }

    #[test]
    fn unconstrained_optimum_satisfies_post_hoc_condition() {
        let full = paper_bound_problem();
        let relaxed = full.without_constraint(POST_HOC_CONSTRAINT);
        let r = minimize_max(&relaxed).unwrap();
        assert_eq!(r.value, rat(115, 154));
        assert!(full.constraints[POST_HOC_CONSTRAINT].holds(&r.point));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let inf = parse_problem("form: xP\nst: xP <= 0\nst: xP >= 1\n").unwrap();
        assert_eq!(minimize_max(&inf), Err(Error::Infeasible));
        let unb = parse_problem("form: xP\n").unwrap();
        assert_eq!(minimize_max(&unb), Err(Error::Unbounded));
        let bounded = parse_problem("form: xP\nform: -xP\n").unwrap();
        assert_eq!(minimize_max(&bounded).unwrap().value, rat(0, 1));
    }

    #[test]
    fn staged_shape_mismatch() {
        let prob = parse_problem("form: xP\nform: -xP\n").unwrap();
        assert!(matches!(staged_elimination(&prob), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn certificate_rejects_bad_weights() {
        let prob = paper_bound_problem();
        let mut c = minimize_max(&prob).unwrap().certificate;
        c.form_weights[0] = rat(1, 2);
        assert_eq!(c.lower_bound(&prob), None);
        let _ = Constraint::new([rat(1, 1), rat(0, 1), rat(0, 1)], rat(0, 1), false);
    }
}
