//! Coefficient systems for progressions modulo `m`.
//!
//! For a modulus `m` with ascending divisors `d_1 < ... < d_D` this module
//! builds the power-sum matrix `A` whose kernel holds the filter vectors `a`,
//! the moment matrix `B` acting on `m`-periodic weights, and the map
//! `b_k = sum_{d_j | k} a_j` between the two.

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_linalg::{
    is_primitive, kernel_vector_from_rref, primitive_normalize, rat, ExactMatrix, Rational,
};

/// Filter vectors published for the worked examples, stored so the default
/// kernel selection reproduces them.
pub(crate) const REFERENCE_FILTERS: &[(u64, &[i64])] = &[
    (6, &[1, -5, 5, -1]),
    (24, &[56, -407, 792, -517, 77, 0, -1, 0]),
    (
        60,
        &[
            61768, -567996, 1595836, -2051621, 1292980, -334789, 4415, -593, 0, 0, 0, 0,
        ],
    ),
];

/// A modulus together with its ascending divisor list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressionModulus {
    m: u64,
    divisors: Vec<u64>,
}

impl ProgressionModulus {
    /// Trial division up to `sqrt(m)`.
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroModulus);
        }
        let mut small = Vec::new();
        let mut large = Vec::new();
        let mut i = 1;
        while i * i <= m {
            if m % i == 0 {
                small.push(i);
                if i * i != m {
                    large.push(m / i);
                }
            }
            i += 1;
        }
        small.extend(large.into_iter().rev());
        Ok(Self { m, divisors: small })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    /// `d(m)`.
    pub fn divisor_count(&self) -> usize {
        self.divisors.len()
    }

    fn require_applicable(&self) -> Result<()> {
        if self.divisor_count() < 4 {
            return Err(Error::MethodNotApplicable {
                m: self.m,
                divisor_count: self.divisor_count(),
            });
        }
        Ok(())
    }
}

/// Shorthand for [`ProgressionModulus::new`].
pub fn divisors(m: u64) -> Result<ProgressionModulus> {
    ProgressionModulus::new(m)
}

/// `A_{ij} = sum_{n=1}^{m/d_j} (d_j n)^(i-1)` for `1 <= i, j <= d(m)`.
pub fn build_a(pm: &ProgressionModulus) -> ExactMatrix {
    let dim = pm.divisor_count();
    let mut a = ExactMatrix::zeros(dim, dim);
    for (j, &d) in pm.divisors().iter().enumerate() {
        let mut sums = vec![BigInt::zero(); dim];
        for n in 1..=pm.m() / d {
            let x = BigInt::from(d * n);
            let mut p = BigInt::one();
            for s in sums.iter_mut() {
                *s += &p;
                p *= &x;
            }
        }
        for (i, s) in sums.into_iter().enumerate() {
            a[(i, j)] = Rational::from_integer(s);
        }
    }
    a
}

/// Moment matrix with entry `(r, k-1) = k^r`, `r < d(m)`, `k <= m`.
pub fn build_b(pm: &ProgressionModulus) -> ExactMatrix {
    let rows = pm.divisor_count();
    let cols = pm.m() as usize;
    let mut b = ExactMatrix::zeros(rows, cols);
    for k in 1..=cols {
        let x = BigInt::from(k);
        let mut p = BigInt::one();
        for r in 0..rows {
            b[(r, k - 1)] = Rational::from_integer(p.clone());
            p *= &x;
        }
    }
    b
}

/// The vector `c = [0, m^2, -3m, 2, 0, ..., 0]` with `c^T A = 0`.
///
/// The returned vector is checked against `build_a(pm)` before it is handed out.
pub fn left_kernel_witness(pm: &ProgressionModulus) -> Result<Vec<Rational>> {
    pm.require_applicable()?;
    let m = BigInt::from(pm.m());
    let mut c = vec![Rational::zero(); pm.divisor_count()];
    c[1] = Rational::from_integer(&m * &m);
    c[2] = Rational::from_integer(-BigInt::from(3) * &m);
    c[3] = rat(2);
    let product = build_a(pm).vec_mat(&c)?;
    debug_assert!(product.iter().all(Zero::is_zero));
    if !product.iter().all(Zero::is_zero) {
        return Err(Error::NotInKernel { m: pm.m() });
    }
    Ok(c)
}

/// `A` in row-reduced form together with its pivot and free columns.
#[derive(Debug, Clone)]
pub struct CoefficientSystem {
    modulus: ProgressionModulus,
    a: ExactMatrix,
    rref: ExactMatrix,
    pivots: Vec<usize>,
    free: Vec<usize>,
}

impl CoefficientSystem {
    pub fn new(pm: &ProgressionModulus) -> Self {
        let a = build_a(pm);
        let (rref, pivots) = a.rref();
        let free = (0..a.cols()).filter(|c| !pivots.contains(c)).collect();
        Self {
            modulus: pm.clone(),
            a,
            rref,
            pivots,
            free,
        }
    }

    pub fn modulus(&self) -> &ProgressionModulus {
        &self.modulus
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.a
    }

    pub fn rref(&self) -> &ExactMatrix {
        &self.rref
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn free_columns(&self) -> &[usize] {
        &self.free
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.free.len()
    }

    /// Kernel vector for a given assignment of the free variables, primitive-normalized.
    pub fn kernel_vector(&self, assignment: &[Rational]) -> Result<Vec<Rational>> {
        if assignment.len() != self.free.len() {
            return Err(Error::DimensionMismatch {
                expected: self.free.len(),
                actual: assignment.len(),
            });
        }
        if assignment.iter().all(Zero::is_zero) {
            return Err(Error::ZeroAssignment);
        }
        let v = kernel_vector_from_rref(&self.rref, &self.pivots, &self.free, assignment);
        Ok(primitive_normalize(&v))
    }

    /// The free-variable assignment used when the caller supplies none.
    pub fn default_assignment(&self) -> Vec<Rational> {
        if let Some((_, a)) = REFERENCE_FILTERS
            .iter()
            .find(|(m, _)| *m == self.modulus.m())
        {
            return self.free.iter().map(|&c| rat(a[c])).collect();
        }
        let mut v = vec![Rational::zero(); self.free.len()];
        if let Some(first) = v.first_mut() {
            *first = -Rational::one();
        }
        v
    }
}

/// How a filter vector relates to the matrix `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    /// `A a = 0`, checked at construction.
    Kernel,
    /// Not in the kernel of `A`; only the `m = 2` eta baseline is built this way.
    Unconstrained,
}

/// Filter coefficients `a_j`, paired with the divisors `d_j` of the modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterCoefficients {
    modulus: ProgressionModulus,
    a: Vec<Rational>,
    kind: FilterKind,
}

impl FilterCoefficients {
    /// Validates `A a = 0` and normalizes `a` to a primitive integer vector.
    pub fn new(modulus: ProgressionModulus, a: Vec<Rational>) -> Result<Self> {
        if a.len() != modulus.divisor_count() {
            return Err(Error::DimensionMismatch {
                expected: modulus.divisor_count(),
                actual: a.len(),
            });
        }
        if a.iter().all(Zero::is_zero) {
            return Err(Error::ZeroAssignment);
        }
        let product = build_a(&modulus).mat_vec(&a)?;
        if !product.iter().all(Zero::is_zero) {
            return Err(Error::NotInKernel { m: modulus.m() });
        }
        let a = primitive_normalize(&a);
        Ok(Self {
            modulus,
            a,
            kind: FilterKind::Kernel,
        })
    }

    /// The classical alternating series: `a = [1, -2]` for `m = 2`.
    pub fn eta_baseline() -> Self {
        Self {
            modulus: ProgressionModulus::new(2).expect("2 is a valid modulus"),
            a: vec![rat(1), rat(-2)],
            kind: FilterKind::Unconstrained,
        }
    }

    pub fn modulus(&self) -> &ProgressionModulus {
        &self.modulus
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.a
    }

    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    /// `(d_j, a_j)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.modulus.divisors().iter().copied().zip(self.a.iter())
    }
}

/// Solves `A a = 0` for a primitive nonzero `a`.
///
/// Without an assignment the stored published vector is reproduced for the
/// moduli that have one; otherwise the first free column is set to -1.
pub fn solve_filter(
    pm: &ProgressionModulus,
    free_assignment: Option<&[Rational]>,
) -> Result<FilterCoefficients> {
    pm.require_applicable()?;
    let system = CoefficientSystem::new(pm);
    let assignment = match free_assignment {
        Some(a) => a.to_vec(),
        None => system.default_assignment(),
    };
    let a = system.kernel_vector(&assignment)?;
    debug_assert!(is_primitive(&a));
    FilterCoefficients::new(pm.clone(), a)
}

/// Series weights `b_1 ... b_m` and the number of leading power moments that vanish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesWeights {
    modulus: ProgressionModulus,
    b: Vec<Rational>,
    vanishing_order: usize,
}

impl SeriesWeights {
    /// Wraps an arbitrary `m`-periodic weight vector, computing its vanishing order.
    pub fn new(modulus: ProgressionModulus, b: Vec<Rational>) -> Result<Self> {
        if b.len() != modulus.m() as usize {
            return Err(Error::DimensionMismatch {
                expected: modulus.m() as usize,
                actual: b.len(),
            });
        }
        if b.iter().all(Zero::is_zero) {
            return Err(Error::InvalidArgument("series weights are all zero".into()));
        }
        let vanishing_order = (0..b.len())
            .take_while(|&r| power_moment(&b, r as u32).is_zero())
            .count();
        Ok(Self {
            modulus,
            b,
            vanishing_order,
        })
    }

    pub fn modulus(&self) -> &ProgressionModulus {
        &self.modulus
    }

    pub fn weights(&self) -> &[Rational] {
        &self.b
    }

    pub fn vanishing_order(&self) -> usize {
        self.vanishing_order
    }

    /// `sum_k b_k k^r`.
    pub fn moment(&self, r: u32) -> Rational {
        power_moment(&self.b, r)
    }

    pub fn abs_sum(&self) -> Rational {
        self.b.iter().fold(Rational::zero(), |acc, x| acc + x.abs())
    }
}

fn power_moment(b: &[Rational], r: u32) -> Rational {
    b.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .fold(Rational::zero(), |acc, (i, x)| {
            acc + x * Rational::from_integer(BigInt::from(i + 1).pow(r))
        })
}

/// `b_k = sum_{d_j | k} a_j`.
pub fn derive_weights(fc: &FilterCoefficients) -> SeriesWeights {
    let m = fc.modulus().m();
    let b = (1..=m)
        .map(|k| {
            fc.terms()
                .filter(|(d, _)| k % d == 0)
                .fold(Rational::zero(), |acc, (_, a)| acc + a)
        })
        .collect();
    SeriesWeights::new(fc.modulus().clone(), b).expect("a nonzero filter yields nonzero weights")
}

/// Exact power moments `sum_k b_k k^r` for `r < order`.
#[derive(Debug, Clone)]
pub struct VanishingReport {
    pub moments: Vec<(u32, Rational)>,
}

impl VanishingReport {
    pub fn passed(&self) -> bool {
        self.moments.iter().all(|(_, v)| v.is_zero())
    }

    pub fn first_nonzero(&self) -> Option<u32> {
        self.moments
            .iter()
            .find(|(_, v)| !v.is_zero())
            .map(|(r, _)| *r)
    }
}

pub fn verify_vanishing(sw: &SeriesWeights, order: usize) -> VanishingReport {
    VanishingReport {
        moments: (0..order as u32).map(|r| (r, sw.moment(r))).collect(),
    }
}

/// Recovers `a` from `b` when `b` has the divisor-sum form, `None` otherwise.
///
/// The rows `k in D` form a unit lower-triangular system in `a`; the rest of
/// the weights are then checked against the solution.
pub fn divisor_form_decomposition(
    pm: &ProgressionModulus,
    b: &[Rational],
) -> Result<Option<FilterCoefficients>> {
    if b.len() != pm.m() as usize {
        return Err(Error::DimensionMismatch {
            expected: pm.m() as usize,
            actual: b.len(),
        });
    }
    let divs = pm.divisors();
    let mut a: Vec<Rational> = Vec::with_capacity(divs.len());
    for (j, &dj) in divs.iter().enumerate() {
        let lower = divs[..j]
            .iter()
            .zip(&a)
            .filter(|(di, _)| dj % *di == 0)
            .fold(Rational::zero(), |acc, (_, ai)| acc + ai);
        a.push(&b[dj as usize - 1] - lower);
    }
    for k in 1..=pm.m() {
        let sum = divs
            .iter()
            .zip(&a)
            .filter(|(d, _)| k % *d == 0)
            .fold(Rational::zero(), |acc, (_, ai)| acc + ai);
        if sum != b[k as usize - 1] {
            return Ok(None);
        }
    }
    if a.iter().all(Zero::is_zero) {
        return Ok(None);
    }
    let fc = match FilterCoefficients::new(pm.clone(), a.clone()) {
        Ok(fc) if fc.coefficients() == a.as_slice() => fc,
        _ => FilterCoefficients {
            modulus: pm.clone(),
            a,
            kind: FilterKind::Unconstrained,
        },
    };
    Ok(Some(fc))
}

/// The eta-series weights `b = [1, -1]`, paired with `a = [1, -2]`.
pub fn eta_baseline() -> (FilterCoefficients, SeriesWeights) {
    let fc = FilterCoefficients::eta_baseline();
    let sw = derive_weights(&fc);
    (fc, sw)
}

/// Default coefficients for `m`: the eta baseline for `m = 2`, otherwise [`solve_filter`].
pub fn default_coefficients(m: u64) -> Result<(FilterCoefficients, SeriesWeights)> {
    if m == 2 {
        return Ok(eta_baseline());
    }
    let fc = solve_filter(&ProgressionModulus::new(m)?, None)?;
    let sw = derive_weights(&fc);
    Ok((fc, sw))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    fn pm(m: u64) -> ProgressionModulus {
        ProgressionModulus::new(m).unwrap()
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(pm(24).divisors(), &[1, 2, 3, 4, 6, 8, 12, 24]);
        assert_eq!(pm(1).divisors(), &[1]);
        assert_eq!(pm(60).divisor_count(), 12);
        assert_eq!(pm(49).divisors(), &[1, 7, 49]);
        assert!(matches!(
            ProgressionModulus::new(0),
            Err(Error::ZeroModulus)
        ));
    }

    #[test]
    fn divisors_match_brute_force() {
        for m in 1..=500u64 {
            let brute: Vec<u64> = (1..=m).filter(|d| m % d == 0).collect();
            assert_eq!(pm(m).divisors(), brute.as_slice(), "m = {m}");
        }
    }

    #[test]
    fn a_matrix_small_cases() {
        let a2 = build_a(&pm(2));
        assert_eq!(a2, ExactMatrix::from_i64_rows(&[&[2, 1], &[3, 2]]).unwrap());

        let a24 = build_a(&pm(24));
        assert_eq!(a24.row(0), ints(&[24, 12, 8, 6, 4, 3, 2, 1]).as_slice());
        assert_eq!(&a24.row(1)[..3], ints(&[300, 156, 108]).as_slice());
        assert_eq!(&a24.row(2)[..3], ints(&[4900, 2600, 1836]).as_slice());
        assert_eq!(a24[(1, 7)], rat(24));
        assert_eq!(a24[(2, 7)], rat(576));
    }

    #[test]
    fn b_matrix_first_row_is_ones() {
        let b = build_b(&pm(10));
        assert_eq!(b.rows(), 4);
        assert!(b.row(0).iter().all(|x| *x == rat(1)));
        assert_eq!(b[(3, 9)], rat(1000));
    }

    #[test]
    fn witness_rejects_small_divisor_counts() {
        assert!(matches!(
            left_kernel_witness(&pm(4)),
            Err(Error::MethodNotApplicable {
                m: 4,
                divisor_count: 3
            })
        ));
        assert_eq!(left_kernel_witness(&pm(6)).unwrap(), ints(&[0, 36, -18, 2]));
        assert_eq!(
            left_kernel_witness(&pm(24)).unwrap(),
            ints(&[0, 576, -72, 2, 0, 0, 0, 0])
        );
    }

    #[test]
    fn solve_filter_rejects_bad_assignments() {
        let p = pm(24);
        assert!(matches!(
            solve_filter(&p, Some(&ints(&[0, 0, 0]))),
            Err(Error::ZeroAssignment)
        ));
        assert!(matches!(
            solve_filter(&p, Some(&ints(&[1]))),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            solve_filter(&pm(9), None),
            Err(Error::MethodNotApplicable { .. })
        ));
    }

    #[test]
    fn weights_for_eta() {
        let (fc, sw) = eta_baseline();
        assert_eq!(fc.kind(), FilterKind::Unconstrained);
        assert_eq!(sw.weights(), ints(&[1, -1]).as_slice());
        assert_eq!(sw.vanishing_order(), 1);
    }

    #[test]
    fn single_moment_failure() {
        let mut b = vec![rat(0); 6];
        b[0] = rat(1);
        let sw = SeriesWeights::new(pm(6), b).unwrap();
        let report = verify_vanishing(&sw, 4);
        assert!(!report.passed());
        assert_eq!(report.moments[0].1, rat(1));
        assert_eq!(report.first_nonzero(), Some(0));
    }

    #[test]
    fn decomposition_of_non_divisor_form() {
        assert!(
            divisor_form_decomposition(&pm(6), &ints(&[4, -15, 20, -10, 0, 1]))
                .unwrap()
                .is_none()
        );
        let a = divisor_form_decomposition(&pm(2), &ints(&[1, -1]))
            .unwrap()
            .unwrap();
        assert_eq!(a.coefficients(), ints(&[1, -2]).as_slice());
        assert_eq!(a.kind(), FilterKind::Unconstrained);
        assert!(divisor_form_decomposition(&pm(2), &ints(&[1])).is_err());
    }

    #[test]
    fn zero_weights_rejected() {
        assert!(SeriesWeights::new(pm(3), vec![rat(0); 3]).is_err());
        assert!(SeriesWeights::new(pm(3), vec![rat(1); 2]).is_err());
    }
}
