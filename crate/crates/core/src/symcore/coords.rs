use super::poly::{Var, MAX_M};
use super::SymError;

/// Distinguished coordinates `(x^1..x^m, x̃_1..x̃_m)` of the double manifold.
///
/// Labels are fixed: `x1..xm` for the base and `xt1..xtm` for the tilde
/// coordinates. Frame index `c < m` is `∂/∂x^{c+1}`, `c >= m` is
/// `∂/∂x̃_{c-m+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CoordSystem {
    m: usize,
}

impl CoordSystem {
    pub fn new(m: usize) -> Result<CoordSystem, SymError> {
        if m == 0 || m > MAX_M {
            return Err(SymError::Dimension(format!("half-dimension m = {m} must lie in 1..={MAX_M}")));
        }
        Ok(CoordSystem { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Total dimension `2m`.
    pub fn dim(&self) -> usize {
        2 * self.m
    }

    /// Variable behind frame index `c` (`0..2m`).
    pub fn var(&self, c: usize) -> Var {
        assert!(c < self.dim(), "frame index {c} out of range for m = {}", self.m);
        if c < self.m {
            Var::base(c)
        } else {
            Var::tilde(c - self.m)
        }
    }

    /// Frame index of a variable, if it belongs to this system.
    pub fn frame_index(&self, v: Var) -> Option<usize> {
        let i = v.index();
        if i < self.m {
            Some(i)
        } else if i >= MAX_M && i - MAX_M < self.m {
            Some(self.m + i - MAX_M)
        } else {
            None
        }
    }

    pub fn is_tilde_index(&self, c: usize) -> bool {
        c >= self.m
    }

    /// Index paired with `c` by `γ` (`x^i ↔ x̃_i`).
    pub fn partner(&self, c: usize) -> usize {
        if c < self.m {
            c + self.m
        } else {
            c - self.m
        }
    }

    pub fn label(&self, c: usize) -> String {
        self.var(c).name()
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.dim()).map(|c| self.label(c)).collect()
    }

    /// Resolves a coordinate label such as `x2` or `xt1`.
    pub fn lookup(&self, label: &str) -> Option<Var> {
        let (tilde, digits) = if let Some(rest) = label.strip_prefix("xt") {
            (true, rest)
        } else if let Some(rest) = label.strip_prefix('x') {
            (false, rest)
        } else {
            return None;
        };
        if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let i: usize = digits.parse().ok()?;
        if i == 0 || i > self.m {
            return None;
        }
        Some(if tilde { Var::tilde(i - 1) } else { Var::base(i - 1) })
    }

    pub fn base_vars(&self) -> impl Iterator<Item = Var> {
        (0..self.m).map(Var::base)
    }

    pub fn tilde_vars(&self) -> impl Iterator<Item = Var> {
        (0..self.m).map(Var::tilde)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_and_lookup() {
        let cs = CoordSystem::new(2).unwrap();
        assert_eq!(cs.labels(), vec!["x1", "x2", "xt1", "xt2"]);
        assert_eq!(cs.lookup("xt2"), Some(Var::tilde(1)));
        assert_eq!(cs.lookup("x3"), None);
        assert_eq!(cs.lookup("x01"), None);
        assert_eq!(cs.frame_index(Var::tilde(0)), Some(2));
        assert_eq!(cs.partner(1), 3);
        assert!(CoordSystem::new(0).is_err());
    }
}
