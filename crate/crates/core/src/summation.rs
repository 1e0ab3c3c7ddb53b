//! Compensated complex summation.

use num_complex::Complex64;

/// Neumaier-compensated accumulator, one lane per component.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

#[inline]
fn neumaier(acc: &mut (f64, f64), x: f64) {
    let (s, c) = *acc;
    let t = s + x;
    let err = if s.abs() >= x.abs() {
        (s - t) + x
    } else {
        (x - t) + s
    };
    *acc = (t, c + err);
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    /// Folds another accumulator in, keeping both compensation terms.
    pub fn merge(&mut self, other: &CompensatedSum) {
        neumaier(&mut self.re, other.re.0);
        neumaier(&mut self.re, other.re.1);
        neumaier(&mut self.im, other.im.0);
        neumaier(&mut self.im, other.im.1);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Deterministic pairwise reduction of partial sums, independent of thread count.
pub fn tree_reduce(mut parts: Vec<CompensatedSum>) -> CompensatedSum {
    if parts.is_empty() {
        return CompensatedSum::new();
    }
    while parts.len() > 1 {
        let next = parts
            .chunks(2)
            .map(|pair| {
                let mut a = pair[0];
                if let Some(b) = pair.get(1) {
                    a.merge(b);
                }
                a
            })
            .collect();
        parts = next;
    }
    parts[0]
}
