use crate::{RandlaError, Result};

/// Knobs of the randomized factorizations.
///
/// `rank` is the target rank R, `oversampling` the extra sketch columns P,
/// `power_q` the number of stabilized power iterations. When `pass_budget`
/// is set it overrides `power_q` and the pass-efficient schedule is used
/// instead. The sketch width R+P is clamped to the smaller matrix dimension
/// at use sites; clamping is flagged in the result, not an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SketchConfig {
    pub rank: usize,
    pub oversampling: usize,
    pub power_q: usize,
    pub pass_budget: Option<usize>,
    pub seed: u64,
}

impl SketchConfig {
    pub fn new(rank: usize) -> Self {
        Self {
            rank,
            oversampling: 5,
            power_q: 1,
            pass_budget: None,
            seed: 0,
        }
    }

    pub fn with_oversampling(mut self, p: usize) -> Self {
        self.oversampling = p;
        self
    }

    pub fn with_power(mut self, q: usize) -> Self {
        self.power_q = q;
        self
    }

    pub fn with_pass_budget(mut self, v: usize) -> Self {
        self.pass_budget = Some(v);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(RandlaError::ZeroRank);
        }
        if self.oversampling < 2 {
            return Err(RandlaError::BadOversampling {
                got: self.oversampling,
            });
        }
        if let Some(v) = self.pass_budget {
            if v == 0 {
                return Err(RandlaError::BadPassBudget { got: 0 });
            }
        }
        Ok(())
    }

    /// Sketch width after clamping to the matrix; second value reports
    /// whether clamping happened.
    pub fn sketch_width(&self, rows: usize, cols: usize) -> (usize, bool) {
        let want = self.rank + self.oversampling;
        let cap = rows.min(cols);
        (want.min(cap), want > cap)
    }
}
