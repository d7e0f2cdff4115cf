use serde::{Deserialize, Serialize};

/// 2x2 presence-by-label counts for one gram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ContingencyTable {
    /// present, TRUE
    pub a: usize,
    /// present, FALSE
    pub b: usize,
    /// absent, TRUE
    pub c: usize,
    /// absent, FALSE
    pub d: usize,
}

impl ContingencyTable {
    pub fn new(a: usize, b: usize, c: usize, d: usize) -> Self {
        ContingencyTable { a, b, c, d }
    }

    pub fn total(&self) -> usize {
        self.a + self.b + self.c + self.d
    }

    /// Sessions containing the gram.
    pub fn support(&self) -> usize {
        self.a + self.b
    }

    /// Share of TRUE sessions containing the gram.
    pub fn freq_true(&self) -> f64 {
        frac(self.a, self.a + self.c)
    }

    /// Share of FALSE sessions containing the gram.
    pub fn freq_false(&self) -> f64 {
        frac(self.b, self.b + self.d)
    }

    fn degenerate(&self) -> bool {
        let Self { a, b, c, d } = *self;
        a + b == 0 || c + d == 0 || a + c == 0 || b + d == 0
    }
}

fn frac(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Pearson statistic without continuity correction. Any empty margin gives 0.
pub fn chi_squared(t: &ContingencyTable) -> f64 {
    if t.degenerate() {
        return 0.0;
    }
    let [a, b, c, d] = [t.a, t.b, t.c, t.d].map(|v| v as f64);
    let n = a + b + c + d;
    let diff = a * d - b * c;
    n * diff * diff / ((a + b) * (c + d) * (a + c) * (b + d))
}

/// `sqrt(chi2 / N)`, clamped to [0, 1] against rounding.
pub fn cramers_v(t: &ContingencyTable) -> f64 {
    let n = t.total();
    if n == 0 {
        return 0.0;
    }
    (chi_squared(t) / n as f64).sqrt().min(1.0)
}
