//! Permutations of `{0, …, n-1}` written in cycle notation with 1-based labels.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for s in 0..self.0.len() {
            if seen[s] {
                continue;
            }
            let mut c = Vec::new();
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                c.push(x);
                x = self.0[x];
            }
            out.push(c);
        }
        out
    }

    /// Parses `(1 2)(3 4 5)`; points not mentioned are fixed. `n` is the
    /// degree, or the largest label when `None`.
    pub fn parse_cycles(s: &str, n: Option<usize>) -> Result<Perm, String> {
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let open = rest.strip_prefix('(').ok_or_else(|| format!("expected `(` in `{s}`"))?;
            let close = open.find(')').ok_or_else(|| format!("unclosed cycle in `{s}`"))?;
            let body = &open[..close];
            let mut c = Vec::new();
            for tok in body.split(|ch: char| ch.is_whitespace() || ch == ',').filter(|t| !t.is_empty()) {
                let k: usize = tok.parse().map_err(|_| format!("bad label `{tok}`"))?;
                if k == 0 {
                    return Err("labels start at 1".into());
                }
                c.push(k - 1);
            }
            cycles.push(c);
            rest = open[close + 1..].trim_start();
        }
        let max = cycles.iter().flatten().map(|&k| k + 1).max().unwrap_or(0);
        let n = n.unwrap_or(max);
        if max > n {
            return Err(format!("label {max} exceeds degree {n}"));
        }
        let mut p: Vec<usize> = (0..n).collect();
        let mut seen = vec![false; n];
        for c in &cycles {
            for (i, &a) in c.iter().enumerate() {
                if seen[a] {
                    return Err(format!("label {} repeated", a + 1));
                }
                seen[a] = true;
                p[a] = c[(i + 1) % c.len()];
            }
        }
        Ok(Perm(p))
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let labels: Vec<String> = c.iter().map(|k| (k + 1).to_string()).collect();
            write!(f, "({})", labels.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let p = Perm::parse_cycles("(1 2)(3 4 5)", None).unwrap();
        assert_eq!(p.0, vec![1, 0, 3, 4, 2]);
        assert_eq!(p.to_string(), "(1 2)(3 4 5)");
        assert_eq!(Perm::parse_cycles("(1 3)", Some(3)).unwrap().0, vec![2, 1, 0]);
        assert_eq!(Perm::parse_cycles("()", Some(2)).unwrap(), Perm::identity(2));
        assert!(Perm::parse_cycles("(1 1)", None).is_err());
        assert!(Perm::parse_cycles("(4)", Some(3)).is_err());
    }

    #[test]
    fn inverse_and_compose() {
        let p = Perm::parse_cycles("(1 2 3)", None).unwrap();
        assert_eq!(p.compose(&p.inverse()), Perm::identity(3));
        let q = Perm::parse_cycles("(1 2)", Some(3)).unwrap();
        assert_eq!(p.compose(&q).apply(0), p.apply(1));
    }
}
