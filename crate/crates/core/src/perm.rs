//! Permutations on `{0, ..., n-1}` with image-list and cycle notation.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("degree 0 is not allowed")]
    DegreeZero,
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("image list is not a bijection: {0}")]
    NotABijection(String),
    #[error("cannot parse permutation literal {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
}

/// A permutation stored as its image list: `images[x]` is the image of `x`.
///
/// Ordering is lexicographic on the image list, which is the canonical order
/// used everywhere (coset representatives, element tables).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    /// The identity on `degree` points.
    pub fn identity(degree: usize) -> Result<Self, PermError> {
        if degree == 0 {
            return Err(PermError::DegreeZero);
        }
        Ok(Self { images: (0..degree as u32).collect() })
    }

    /// Builds from an image list, validating that it is a bijection.
    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        if images.is_empty() {
            return Err(PermError::DegreeZero);
        }
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if (x as usize) >= n || seen[x as usize] {
                return Err(PermError::NotABijection(format!("{images:?}")));
            }
            seen[x as usize] = true;
        }
        Ok(Self { images })
    }

    /// Parses either notation: image list `[1,0,2,3]` or cycles `(0 1)(2 3)`.
    ///
    /// Whitespace-insensitive; cycles must be disjoint; fixed points may be
    /// omitted; `()` is the identity.
    pub fn parse(degree: usize, literal: &str) -> Result<Self, PermError> {
        if degree == 0 {
            return Err(PermError::DegreeZero);
        }
        let text = literal.trim();
        let err = |reason: &str| PermError::Parse {
            literal: literal.to_string(),
            reason: reason.to_string(),
        };
        if text.starts_with('[') {
            if !text.ends_with(']') {
                return Err(err("missing closing bracket"));
            }
            let body = &text[1..text.len() - 1];
            let mut images = Vec::new();
            for tok in body.split(',') {
                let tok = tok.trim();
                if tok.is_empty() {
                    continue;
                }
                let x: u32 = tok.parse().map_err(|_| err("invalid integer"))?;
                images.push(x);
            }
            if images.len() != degree {
                return Err(err(&format!(
                    "image list has length {}, expected {degree}",
                    images.len()
                )));
            }
            return Self::from_images(images);
        }
        if text.is_empty() || !text.starts_with('(') {
            return Err(err("expected '[' or '('"));
        }
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut used = vec![false; degree];
        let mut rest = text;
        while !rest.is_empty() {
            let rest_trim = rest.trim_start();
            if !rest_trim.starts_with('(') {
                return Err(err("expected '('"));
            }
            let close = rest_trim.find(')').ok_or_else(|| err("unbalanced parentheses"))?;
            let body = &rest_trim[1..close];
            rest = &rest_trim[close + 1..];
            let mut points = Vec::new();
            for tok in body.split(|c: char| c == ',' || c.is_whitespace()) {
                let tok = tok.trim();
                if tok.is_empty() {
                    continue;
                }
                let p: usize = tok.parse().map_err(|_| err("invalid point"))?;
                if p >= degree {
                    return Err(err(&format!("point {p} out of range for degree {degree}")));
                }
                if used[p] {
                    return Err(err(&format!("point {p} repeated; cycles must be disjoint")));
                }
                used[p] = true;
                points.push(p as u32);
            }
            for k in 0..points.len() {
                let from = points[k] as usize;
                images[from] = points[(k + 1) % points.len()];
            }
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// Image of a single point.
    pub fn apply(&self, point: u32) -> u32 {
        self.images[point as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self` followed by `other`: `x ↦ other(self(x))`.
    pub fn compose(&self, other: &Self) -> Result<Self, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Self) -> Self {
        debug_assert_eq!(self.degree(), other.degree());
        Self {
            images: self.images.iter().map(|&x| other.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x as usize] = i as u32;
        }
        Self { images }
    }

    /// Least `k >= 1` with `self^k = identity`.
    pub fn order(&self) -> usize {
        let mut order = 1;
        let mut seen = vec![false; self.degree()];
        for start in 0..self.degree() as u32 {
            if seen[start as usize] {
                continue;
            }
            let mut len = 0usize;
            let mut x = start;
            loop {
                seen[x as usize] = true;
                len += 1;
                x = self.apply(x);
                if x == start {
                    break;
                }
            }
            order = lcm(order, len);
        }
        order
    }

    /// Disjoint-cycle decomposition, cycles sorted by least point, each
    /// rotated to start at its least point. Fixed points omitted.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() as u32 {
            if seen[start as usize] || self.apply(start) == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x as usize] {
                seen[x as usize] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle-notation string, `()` for the identity.
    pub fn cycle_string(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        let mut s = String::new();
        for cycle in cycles {
            s.push('(');
            for (k, p) in cycle.iter().enumerate() {
                if k > 0 {
                    s.push(' ');
                }
                s.push_str(&p.to_string());
            }
            s.push(')');
        }
        s
    }

    /// Image-notation string, e.g. `[1,0,2,3]`.
    pub fn image_string(&self) -> String {
        let body: Vec<String> = self.images.iter().map(|x| x.to_string()).collect();
        format!("[{}]", body.join(","))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycle_string())
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(degree: usize, lit: &str) -> Permutation {
        Permutation::parse(degree, lit).unwrap()
    }

    #[test]
    fn parse_image_notation() {
        assert_eq!(p(4, "[1,0,2,3]").images(), &[1, 0, 2, 3]);
        assert_eq!(p(4, " [ 1 , 0 , 2 , 3 ] ").images(), &[1, 0, 2, 3]);
    }

    #[test]
    fn parse_cycle_notation() {
        assert_eq!(p(4, "(0 1)(2 3)").images(), &[1, 0, 3, 2]);
        assert_eq!(p(4, "(0,1)"), p(4, "(0 1)"));
        assert_eq!(p(4, "()"), Permutation::identity(4).unwrap());
        assert_eq!(p(5, "(1 2 4 3)").images(), &[0, 2, 4, 1, 3]);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Permutation::parse(4, "(0 1").is_err());
        assert!(Permutation::parse(4, "(0 4)").is_err());
        assert!(Permutation::parse(4, "(0 1)(1 2)").is_err());
        assert!(Permutation::parse(4, "[1,0,2]").is_err());
        assert!(Permutation::parse(4, "[1,1,2,3]").is_err());
        assert!(Permutation::parse(4, "").is_err());
        assert!(Permutation::parse(0, "()").is_err());
    }

    #[test]
    fn compose_applies_left_then_right() {
        let a = p(4, "(0 1 2)");
        let b = p(4, "(1 2 3)");
        // 0 -> a -> 1 -> b -> 2
        assert_eq!(a.compose(&b).unwrap().apply(0), 2);
        assert!(a.compose(&p(3, "(0 1)")).is_err());
    }

    #[test]
    fn inverse_and_order() {
        let a = p(4, "(0 1 2)");
        assert!(a.compose(&a.inverse()).unwrap().is_identity());
        assert_eq!(a.order(), 3);
        assert_eq!(p(4, "(0 1)(2 3)").order(), 2);
        assert_eq!(p(4, "()").order(), 1);
        assert_eq!(p(5, "(1 2 4 3)").order(), 4);
        assert_eq!(p(6, "(0 1)(2 3 4)").order(), 6);
    }

    #[test]
    fn cycle_string_is_canonical() {
        assert_eq!(p(4, "(2 3)(0 1)").cycle_string(), "(0 1)(2 3)");
        assert_eq!(p(4, "(1 2 0)").cycle_string(), "(0 1 2)");
        assert_eq!(Permutation::identity(3).unwrap().cycle_string(), "()");
        assert_eq!(p(4, "[1,0,2,3]").image_string(), "[1,0,2,3]");
    }

    fn arb_perm(degree: usize) -> impl Strategy<Value = Permutation> {
        Just(()).prop_perturb(move |_, mut rng| {
            let mut images: Vec<u32> = (0..degree as u32).collect();
            for i in (1..degree).rev() {
                let j = (rng.next_u64() % (i as u64 + 1)) as usize;
                images.swap(i, j);
            }
            Permutation::from_images(images).unwrap()
        })
    }

    proptest! {
        #[test]
        fn round_trip_both_notations(perm in arb_perm(7)) {
            let via_cycles = Permutation::parse(7, &perm.cycle_string()).unwrap();
            let via_images = Permutation::parse(7, &perm.image_string()).unwrap();
            prop_assert_eq!(&via_cycles, &perm);
            prop_assert_eq!(&via_images, &perm);
        }

        #[test]
        fn compose_is_associative(a in arb_perm(6), b in arb_perm(6), c in arb_perm(6)) {
            let left = a.compose(&b).unwrap().compose(&c).unwrap();
            let right = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn inverse_is_two_sided(a in arb_perm(6)) {
            prop_assert!(a.compose(&a.inverse()).unwrap().is_identity());
            prop_assert!(a.inverse().compose(&a).unwrap().is_identity());
        }

        #[test]
        fn order_divides_into_identity(a in arb_perm(6)) {
            let mut acc = Permutation::identity(6).unwrap();
            for _ in 0..a.order() {
                acc = acc.compose(&a).unwrap();
            }
            prop_assert!(acc.is_identity());
        }
    }
}
