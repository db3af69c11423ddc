//! Directed weighted tie network: contagion and affective homophily.

/// Dense `n × n` weight matrix; `weight(i, j)` is the influence of `j` on `i`.
/// The diagonal is always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TieMatrix {
    n: usize,
    weights: Vec<f64>,
}

impl TieMatrix {
    /// Uniform `1/(n−1)` off-diagonal weights.
    pub fn uniform(n: usize) -> Self {
        let w = if n > 1 { 1.0 / (n - 1) as f64 } else { 0.0 };
        let mut weights = vec![w; n * n];
        for i in 0..n {
            weights[i * n + i] = 0.0;
        }
        Self { n, weights }
    }

    /// Build from a row-major matrix. Panics on a nonzero diagonal, a
    /// negative entry, or a size mismatch.
    pub fn from_rows(n: usize, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), n * n);
        for i in 0..n {
            assert_eq!(weights[i * n + i], 0.0, "diagonal must be zero");
        }
        assert!(
            weights.iter().all(|&w| w >= 0.0),
            "weights must be nonnegative"
        );
        Self { n, weights }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `C_i = Σ_{j≠i} w_ij · s_j`.
    pub fn contagion_input(&self, i: usize, solo: &[f64]) -> f64 {
        debug_assert_eq!(solo.len(), self.n);
        self.row(i)
            .iter()
            .zip(solo)
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, (w, s))| w * s)
            .sum()
    }

    /// Raw homophily increment `w_ij += alpha·(1 − |A_i − A_j|)` on every
    /// off-diagonal entry, then each row rescaled to sum to one.
    pub fn homophily_update(&mut self, affects: &[f64], alpha_hom: f64) {
        let n = self.n;
        debug_assert_eq!(affects.len(), n);
        if n < 2 {
            return;
        }
        for i in 0..n {
            let row = &mut self.weights[i * n..(i + 1) * n];
            let mut sum = 0.0;
            for (j, w) in row.iter_mut().enumerate() {
                if j != i {
                    *w += alpha_hom * (1.0 - (affects[i] - affects[j]).abs());
                    sum += *w;
                }
            }
            if sum > 0.0 {
                for w in row.iter_mut() {
                    *w /= sum;
                }
            }
        }
    }

    /// Mean off-diagonal weight; `None` when there are fewer than two agents.
    pub fn average_tie_strength(&self) -> Option<f64> {
        if self.n < 2 {
            return None;
        }
        let off = (self.n * (self.n - 1)) as f64;
        Some(self.weights.iter().sum::<f64>() / off)
    }

    /// Mean over agents of the population standard deviation of their
    /// outgoing (off-diagonal) row.
    pub fn tie_strength_dispersion(&self) -> Option<f64> {
        let n = self.n;
        if n < 2 {
            return None;
        }
        let k = (n - 1) as f64;
        let mut total = 0.0;
        for i in 0..n {
            let off = || {
                self.row(i)
                    .iter()
                    .enumerate()
                    .filter(move |&(j, _)| j != i)
                    .map(|(_, &w)| w)
            };
            let mean = off().sum::<f64>() / k;
            let var = off().map(|w| (w - mean) * (w - mean)).sum::<f64>() / k;
            total += var.sqrt();
        }
        Some(total / n as f64)
    }

    /// For each agent, the weight on its most affect-similar peer (lowest
    /// id wins ties). `None` for fewer than two agents.
    pub fn weight_to_most_similar(&self, affects: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        if n < 2 {
            return None;
        }
        Some(
            (0..n)
                .map(|i| {
                    let mut best = None::<(f64, usize)>;
                    for j in (0..n).filter(|&j| j != i) {
                        let d = (affects[i] - affects[j]).abs();
                        if best.is_none_or(|(bd, _)| d < bd) {
                            best = Some((d, j));
                        }
                    }
                    self.weight(i, best.map(|(_, j)| j).unwrap_or(i))
                })
                .collect(),
        )
    }
}
