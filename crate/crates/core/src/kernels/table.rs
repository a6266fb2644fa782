use std::f64::consts::PI;

/// Piecewise Chebyshev interpolant on `[lo, hi]` with equal-width pieces.
#[derive(Debug)]
pub(crate) struct ChebTable {
    lo: f64,
    width: f64,
    pieces: Vec<Vec<f64>>,
}

impl ChebTable {
    pub fn build(lo: f64, hi: f64, max_width: f64, degree: usize, f: impl Fn(f64) -> f64) -> Self {
        let count = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        let width = (hi - lo) / count as f64;
        let n = degree + 1;
        let nodes: Vec<f64> = (0..n)
            .map(|j| (PI * (j as f64 + 0.5) / n as f64).cos())
            .collect();
        let pieces = (0..count)
            .map(|p| {
                let a = lo + p as f64 * width;
                let vals: Vec<f64> = nodes
                    .iter()
                    .map(|&t| f(a + 0.5 * width * (t + 1.0)))
                    .collect();
                (0..n)
                    .map(|k| {
                        let s: f64 = vals
                            .iter()
                            .enumerate()
                            .map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
                            .sum();
                        let scale = if k == 0 { 1.0 } else { 2.0 };
                        scale * s / n as f64
                    })
                    .collect()
            })
            .collect();
        ChebTable { lo, width, pieces }
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        let pos = (u - self.lo) / self.width;
        let p = (pos.floor().max(0.0) as usize).min(self.pieces.len() - 1);
        let t = 2.0 * (pos - p as f64) - 1.0;
        let c = &self.pieces[p];
        // Clenshaw
        let (mut b1, mut b2) = (0.0, 0.0);
        for &ck in c[1..].iter().rev() {
            let b0 = 2.0 * t * b1 - b2 + ck;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + c[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_smooth_functions() {
        let t = ChebTable::build(-3.0, 4.0, 0.5, 14, f64::sin);
        for i in 0..=700 {
            let u = -3.0 + 0.01 * i as f64;
            assert!((t.eval(u) - u.sin()).abs() < 1e-13, "{u}");
        }
    }
}
