//! Ordinary least squares.
//!
//! Non-intercept columns are centred (when an intercept is present) and scaled
//! to unit RMS before solving; coefficients and their covariance are mapped
//! back to the original scale. The normal equations are solved by Cholesky
//! unless the condition estimate exceeds [`CONDITION_LIMIT`], in which case a
//! column-pivoted QR factorisation of the scaled design is used instead.
//! The condition estimate is the eigenvalue ratio of the scaled Gram matrix.
//! Either path finishes with two steps of residual-based refinement.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Group, Variable};
use crate::error::{Error, Result};

pub const CONDITION_LIMIT: f64 = 1e8;
/// Relative pivot magnitude below which a column is declared collinear.
pub const RANK_TOLERANCE: f64 = 1e-10;
const REFINEMENT_STEPS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Intercept,
    /// 1 for group one, 0 otherwise.
    Group,
    /// Indicator of group zero.
    Group0,
    /// Indicator of group one. Spans the same column as [`Term::Group`].
    Group1,
    Covariate(Variable),
}

impl Term {
    pub const W_INITIAL: Term = Term::Covariate(Variable::WInitial);

    pub fn name(&self) -> &'static str {
        match self {
            Term::Intercept => "intercept",
            Term::Group => "group",
            Term::Group0 => "group0",
            Term::Group1 => "group1",
            Term::Covariate(v) => v.name(),
        }
    }

    pub fn column(&self, ds: &Dataset) -> Vec<f64> {
        ds.observations()
            .iter()
            .map(|o| match self {
                Term::Intercept => 1.0,
                Term::Group | Term::Group1 => o.group.indicator(),
                Term::Group0 => 1.0 - o.group.indicator(),
                Term::Covariate(v) => o.value(*v),
            })
            .collect()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub response: Variable,
    pub terms: Vec<Term>,
}

impl DesignSpec {
    pub fn new(response: Variable, terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Validation("a design needs at least one term".into()));
        }
        for (i, t) in terms.iter().enumerate() {
            if terms[..i].contains(t) {
                return Err(Error::Validation(format!("duplicate term `{t}`")));
            }
        }
        if [Term::Intercept, Term::Group0, Term::Group1]
            .iter()
            .all(|t| terms.contains(t))
        {
            return Err(Error::Validation(
                "intercept, group0 and group1 together are rank deficient by construction".into(),
            ));
        }
        if terms.contains(&Term::Covariate(response)) {
            return Err(Error::Validation(format!(
                "response `{response}` cannot also be a predictor"
            )));
        }
        Ok(DesignSpec { response, terms })
    }

    /// `response ~ intercept + group`
    pub fn group_means(response: Variable) -> Self {
        DesignSpec {
            response,
            terms: vec![Term::Intercept, Term::Group],
        }
    }

    /// `response ~ intercept + group + w_initial`
    pub fn ancova(response: Variable) -> Self {
        DesignSpec {
            response,
            terms: vec![Term::Intercept, Term::Group, Term::W_INITIAL],
        }
    }

    /// Whether the constant vector lies in the column span.
    pub fn has_constant(&self) -> bool {
        self.terms.contains(&Term::Intercept)
            || (self.terms.contains(&Term::Group0)
                && (self.terms.contains(&Term::Group1) || self.terms.contains(&Term::Group)))
    }

    pub fn columns(&self, ds: &Dataset) -> Vec<Vec<f64>> {
        self.terms.iter().map(|t| t.column(ds)).collect()
    }

    pub fn term_names(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.name().to_string()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Cholesky,
    PivotedQr,
}

/// Least-squares solution over raw columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OlsSolution {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub sse: f64,
    /// `sse / (n - p)`; NaN when `n == p`.
    pub residual_variance: f64,
    pub standard_errors: Vec<f64>,
    pub t_statistics: Vec<f64>,
    pub r_squared: f64,
    pub n: usize,
    pub solver: Solver,
}

impl OlsSolution {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.coefficients[i])
    }
}

/// Fits `y` on the given columns.
///
/// `has_constant` only affects how `r_squared` is centred. Any column made
/// entirely of ones is treated as the intercept for internal centring.
pub fn least_squares(
    names: &[String],
    columns: &[Vec<f64>],
    y: &[f64],
    has_constant: bool,
) -> Result<OlsSolution> {
    let n = y.len();
    let p = columns.len();
    assert_eq!(names.len(), p, "one name per column");
    assert!(columns.iter().all(|c| c.len() == n), "columns must match the response length");
    if p == 0 {
        return Err(Error::Validation("a design needs at least one term".into()));
    }
    if n < p {
        return Err(Error::DegreesOfFreedom { n, p });
    }

    let intercept = columns.iter().position(|c| c.iter().all(|&v| v == 1.0));
    let mut centers = vec![0.0; p];
    let mut scales = vec![1.0; p];
    for j in 0..p {
        if Some(j) == intercept {
            continue;
        }
        if intercept.is_some() {
            centers[j] = columns[j].iter().sum::<f64>() / n as f64;
        }
        let ss: f64 = columns[j].iter().map(|&v| (v - centers[j]).powi(2)).sum();
        scales[j] = (ss / n as f64).sqrt();
        if scales[j] == 0.0 {
            let mut terms = vec![names[j].clone()];
            if let Some(i) = intercept {
                terms.push(names[i].clone());
            }
            return Err(Error::Singular { terms });
        }
    }
    let z = DMatrix::from_fn(n, p, |i, j| (columns[j][i] - centers[j]) / scales[j]);
    let yv = DVector::from_column_slice(y);

    let (gamma, gram_inv, solver) = match solve_cholesky(&z, &yv) {
        Some((g, inv)) => (g, inv, Solver::Cholesky),
        None => {
            let (g, inv) = solve_pivoted_qr(&z, &yv, names)?;
            (g, inv, Solver::PivotedQr)
        }
    };

    // beta = A^{-1} gamma where X = Z A.
    let mut a_inv = DMatrix::<f64>::identity(p, p);
    for j in 0..p {
        if Some(j) == intercept {
            continue;
        }
        a_inv[(j, j)] = 1.0 / scales[j];
        if let Some(i) = intercept {
            a_inv[(i, j)] = -centers[j] / scales[j];
        }
    }
    let beta = &a_inv * &gamma;
    let coefficients: Vec<f64> = beta.iter().copied().collect();

    let residuals: Vec<f64> = (0..n)
        .map(|i| y[i] - (0..p).map(|j| coefficients[j] * columns[j][i]).sum::<f64>())
        .collect();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    // Undefined for an exactly determined system.
    let residual_variance = if n > p { sse / (n - p) as f64 } else { f64::NAN };
    let cov = &a_inv * gram_inv * a_inv.transpose() * residual_variance;
    let standard_errors: Vec<f64> = (0..p).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    let t_statistics = coefficients
        .iter()
        .zip(&standard_errors)
        .map(|(b, se)| b / se)
        .collect();

    let sst = if has_constant {
        let mean = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    let r_squared = if sst > 0.0 {
        (1.0 - sse / sst).clamp(0.0, 1.0)
    } else {
        1.0
    };

    Ok(OlsSolution {
        names: names.to_vec(),
        coefficients,
        residuals,
        sse,
        residual_variance,
        standard_errors,
        t_statistics,
        r_squared,
        n,
        solver,
    })
}

fn solve_cholesky(z: &DMatrix<f64>, y: &DVector<f64>) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let gram = z.transpose() * z;
    let eig = gram.clone().symmetric_eigen().eigenvalues;
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    if lo <= 0.0 || hi / lo > CONDITION_LIMIT {
        return None;
    }
    let chol = gram.cholesky()?;
    let mut gamma = chol.solve(&(z.transpose() * y));
    for _ in 0..REFINEMENT_STEPS {
        let r = y - z * &gamma;
        gamma += chol.solve(&(z.transpose() * r));
    }
    Some((gamma, chol.inverse()))
}

fn solve_pivoted_qr(
    z: &DMatrix<f64>,
    y: &DVector<f64>,
    names: &[String],
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let p = z.ncols();
    let qr = z.clone().col_piv_qr();
    let r = qr.r();
    // order[k] = original column held at pivot position k.
    let mut order = DMatrix::from_fn(1, p, |_, j| j as f64);
    qr.p().permute_columns(&mut order);
    let order: Vec<usize> = order.iter().map(|&v| v as usize).collect();

    let largest = (0..p).map(|k| r[(k, k)].abs()).fold(0.0, f64::max);
    let rank = (0..p)
        .take_while(|&k| r[(k, k)].abs() > RANK_TOLERANCE * largest)
        .count();
    if rank < p {
        return Err(Error::Singular {
            terms: collinear_terms(&r, rank, &order, names),
        });
    }

    let solve = |rhs: &DVector<f64>| {
        let mut qty = rhs.clone();
        qr.q_tr_mul(&mut qty);
        r.solve_upper_triangular(&qty.rows(0, p).into_owned())
            .ok_or_else(|| Error::Singular { terms: names.to_vec() })
    };
    let mut gamma_perm = solve(y)?;
    for _ in 0..REFINEMENT_STEPS {
        let mut unpermuted = DVector::zeros(p);
        for (k, &j) in order.iter().enumerate() {
            unpermuted[j] = gamma_perm[k];
        }
        gamma_perm += solve(&(y - z * unpermuted))?;
    }
    let r_inv = r
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular { terms: names.to_vec() })?;
    let inv_perm = &r_inv * r_inv.transpose();

    let mut gamma = DVector::zeros(p);
    let mut gram_inv = DMatrix::zeros(p, p);
    for a in 0..p {
        gamma[order[a]] = gamma_perm[a];
        for b in 0..p {
            gram_inv[(order[a], order[b])] = inv_perm[(a, b)];
        }
    }
    Ok((gamma, gram_inv))
}

/// Columns taking part in the linear dependencies exposed by the deficient
/// pivots.
fn collinear_terms(r: &DMatrix<f64>, rank: usize, order: &[usize], names: &[String]) -> Vec<String> {
    let p = order.len();
    let mut involved = vec![false; p];
    let r11 = r.view((0, 0), (rank, rank)).into_owned();
    for k in rank..p {
        involved[order[k]] = true;
        if rank == 0 {
            continue;
        }
        let rhs = r.view((0, k), (rank, 1)).into_owned();
        if let Some(coef) = r11.solve_upper_triangular(&rhs) {
            for (a, c) in coef.iter().enumerate() {
                if c.abs() > 1e-8 {
                    involved[order[a]] = true;
                }
            }
        }
    }
    (0..p)
        .filter(|&j| involved[j])
        .map(|j| names[j].clone())
        .collect()
}

/// An OLS fit of a [`DesignSpec`] on a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub spec: DesignSpec,
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub sse: f64,
    pub residual_variance: f64,
    pub standard_errors: Vec<f64>,
    pub t_statistics: Vec<f64>,
    pub r_squared: f64,
    pub n: usize,
    pub solver: Solver,
    /// Fingerprint of the dataset the model was fitted on.
    pub fingerprint: String,
}

impl FitResult {
    fn term_index(&self, term: Term) -> Option<usize> {
        self.spec.terms.iter().position(|&t| t == term)
    }

    pub fn coef(&self, term: Term) -> Option<f64> {
        self.term_index(term).map(|i| self.coefficients[i])
    }

    pub fn se(&self, term: Term) -> Option<f64> {
        self.term_index(term).map(|i| self.standard_errors[i])
    }

    pub fn t(&self, term: Term) -> Option<f64> {
        self.term_index(term).map(|i| self.t_statistics[i])
    }
}

impl Serialize for FitResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            response: Variable,
            terms: Vec<&'static str>,
            coef: &'a [f64],
            se: &'a [f64],
            t: &'a [f64],
            r2: f64,
            resid_var: f64,
            n: usize,
        }
        View {
            response: self.spec.response,
            terms: self.spec.terms.iter().map(|t| t.name()).collect(),
            coef: &self.coefficients,
            se: &self.standard_errors,
            t: &self.t_statistics,
            r2: self.r_squared,
            resid_var: self.residual_variance,
            n: self.n,
        }
        .serialize(serializer)
    }
}

pub fn fit(ds: &Dataset, spec: &DesignSpec) -> Result<FitResult> {
    let spec = DesignSpec::new(spec.response, spec.terms.clone())?;
    let y = ds.values(spec.response);
    let sol = least_squares(&spec.term_names(), &spec.columns(ds), &y, spec.has_constant())?;
    Ok(FitResult {
        coefficients: sol.coefficients,
        residuals: sol.residuals,
        sse: sol.sse,
        residual_variance: sol.residual_variance,
        standard_errors: sol.standard_errors,
        t_statistics: sol.t_statistics,
        r_squared: sol.r_squared,
        n: sol.n,
        solver: sol.solver,
        fingerprint: ds.fingerprint().to_string(),
        spec,
    })
}

/// `X beta` for the rows of `ds`.
pub fn predict(fit: &FitResult, ds: &Dataset) -> Vec<f64> {
    let columns = fit.spec.columns(ds);
    (0..ds.len())
        .map(|i| {
            columns
                .iter()
                .zip(&fit.coefficients)
                .map(|(c, b)| b * c[i])
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReverseFit {
    /// `y ~ intercept + x`
    pub forward: FitResult,
    /// `x ~ intercept + y`
    pub reverse: FitResult,
    pub slope_product: f64,
    /// R² of the forward regression; equals `slope_product` for any pair.
    pub r_squared: f64,
}

pub fn reverse_fit(ds: &Dataset, x: Variable, y: Variable) -> Result<ReverseFit> {
    if x == y {
        return Err(Error::Validation("x and y must be different variables".into()));
    }
    for v in [x, y] {
        let vals = ds.values(v);
        if vals.windows(2).all(|w| w[0] == w[1]) {
            return Err(Error::Degenerate(format!("`{v}` has zero sample variance")));
        }
    }
    let forward = fit(ds, &DesignSpec::new(y, vec![Term::Intercept, Term::Covariate(x)])?)?;
    let reverse = fit(ds, &DesignSpec::new(x, vec![Term::Intercept, Term::Covariate(y)])?)?;
    let slope_product = forward.coefficients[1] * reverse.coefficients[1];
    let r_squared = forward.r_squared;
    Ok(ReverseFit {
        forward,
        reverse,
        slope_product,
        r_squared,
    })
}

/// Per-group simple regression slopes of `y` on `x` (a separate-slopes model).
pub(crate) fn per_group_slopes(ds: &Dataset, x: &[f64], y: &[f64]) -> Result<[f64; 2]> {
    let mut slopes = [0.0; 2];
    for g in Group::BOTH {
        let (xs, ys): (Vec<f64>, Vec<f64>) = ds
            .observations()
            .iter()
            .enumerate()
            .filter(|(_, o)| o.group == g)
            .map(|(i, _)| (x[i], y[i]))
            .unzip();
        let ones = vec![1.0; xs.len()];
        let sol = least_squares(
            &["intercept".to_string(), "w_initial".to_string()],
            &[ones, xs],
            &ys,
            true,
        )?;
        slopes[g.index()] = sol.coefficients[1];
    }
    Ok(slopes)
}
