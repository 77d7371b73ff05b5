//! Built-in group constructors.
//!
//! Cyclic, dihedral, symmetric and alternating groups are permutation groups;
//! quaternion, unitriangular and direct products are Cayley tables. A catalog
//! spec string such as `dihedral(4)` or `product(quaternion(8),symmetric(3))`
//! names any of them.

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, DEFAULT_ORDER_CAP};

fn cycle(n: usize) -> Vec<usize> {
    (0..n).map(|i| (i + 1) % n).collect()
}

/// Cyclic group of order `n`, acting regularly on `n` points.
pub fn cyclic(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::Malformed("cyclic group order must be positive".into()));
    }
    FiniteGroup::from_permutations(n, &[cycle(n)], DEFAULT_ORDER_CAP)
}

/// Dihedral group of order `2n`, the symmetries of an `n`-gon (`n ≥ 3`).
/// Generators: the rotation `i ↦ i+1`, then the reflection `i ↦ -i`.
pub fn dihedral(n: usize) -> Result<FiniteGroup> {
    if n < 3 {
        return Err(Error::Malformed("dihedral(n) needs n ≥ 3".into()));
    }
    let reflection = (0..n).map(|i| (n - i) % n).collect();
    FiniteGroup::from_permutations(n, &[cycle(n), reflection], DEFAULT_ORDER_CAP)
}

/// Symmetric group on `n` points, generated by `(1 2)` then `(1 2 … n)`.
pub fn symmetric(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::Malformed("symmetric(n) needs n ≥ 1".into()));
    }
    if n == 1 {
        return FiniteGroup::from_permutations(1, &[vec![0]], DEFAULT_ORDER_CAP);
    }
    let mut t: Vec<usize> = (0..n).collect();
    t.swap(0, 1);
    FiniteGroup::from_permutations(n, &[t, cycle(n)], DEFAULT_ORDER_CAP)
}

/// Alternating group on `n ≥ 3` points, generated by `(1 2 3)` and an
/// even long cycle.
pub fn alternating(n: usize) -> Result<FiniteGroup> {
    if n < 3 {
        return Err(Error::Malformed("alternating(n) needs n ≥ 3".into()));
    }
    let mut three: Vec<usize> = (0..n).collect();
    three[0] = 1;
    three[1] = 2;
    three[2] = 0;
    let long: Vec<usize> = if n % 2 == 1 {
        cycle(n)
    } else {
        // (2 3 … n)
        (0..n).map(|i| if i == 0 { 0 } else if i == n - 1 { 1 } else { i + 1 }).collect()
    };
    FiniteGroup::from_permutations(n, &[three, long], DEFAULT_ORDER_CAP)
}

/// Dicyclic group of the given order `4m` (`m ≥ 2`):
/// `⟨a, b | a^{2m} = 1, b² = a^m, b⁻¹ab = a⁻¹⟩`. For `order` a power of two
/// this is the generalized quaternion group; `quaternion(8)` is `Q₈`.
pub fn quaternion(order: usize) -> Result<FiniteGroup> {
    if order < 8 || !order.is_multiple_of(4) {
        return Err(Error::Malformed("quaternion(order) needs order = 4m with m ≥ 2".into()));
    }
    let m = order / 4;
    let n2 = 2 * m;
    // element a^i b^j  ↦  index j·2m + i
    let idx = |i: usize, j: usize| j * n2 + (i % n2);
    let mut table = vec![vec![0; order]; order];
    for j1 in 0..2 {
        for i1 in 0..n2 {
            for j2 in 0..2 {
                for i2 in 0..n2 {
                    // b^j1 a^i2 = a^{±i2} b^j1
                    let i2s = if j1 == 1 { n2 - i2 } else { i2 };
                    let (i, j) = if j1 + j2 == 2 { (i1 + i2s + m, 0) } else { (i1 + i2s, j1 + j2) };
                    table[idx(i1, j1)][idx(i2, j2)] = idx(i, j);
                }
            }
        }
    }
    FiniteGroup::from_cayley_table(&table)
}

/// Upper unitriangular 3×3 matrices over `F_p` (`p` prime, `p ≤ 7`), order
/// `p³`, class 2. Element `(a, b, c)` is `[[1,a,c],[0,1,b],[0,0,1]]`.
pub fn unitriangular(p: usize) -> Result<FiniteGroup> {
    if ![2, 3, 5, 7].contains(&p) {
        return Err(Error::Malformed("unitriangular(p) needs a prime p ≤ 7".into()));
    }
    let n = p * p * p;
    let split = |x: usize| (x / (p * p), (x / p) % p, x % p);
    let mut table = vec![vec![0; n]; n];
    for x in 0..n {
        let (a, b, c) = split(x);
        for y in 0..n {
            let (a2, b2, c2) = split(y);
            let (a3, b3, c3) = ((a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p);
            table[x][y] = a3 * p * p + b3 * p + c3;
        }
    }
    FiniteGroup::from_cayley_table(&table)
}

/// External direct product as a Cayley table; `(a, b)` has index
/// `a·|B| + b`.
pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<FiniteGroup> {
    let (na, nb) = (a.order(), b.order());
    let n = na * nb;
    if n > 4096 {
        return Err(Error::Malformed(format!("direct product of order {n} is too large for a table")));
    }
    let mut table = vec![vec![0; n]; n];
    for x in 0..n {
        for y in 0..n {
            table[x][y] = a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb);
        }
    }
    FiniteGroup::from_cayley_table(&table)
}

/// Builds a catalog group from a name and its integer parameters.
pub fn by_name(name: &str, params: &[usize]) -> Result<FiniteGroup> {
    let one = || -> Result<usize> {
        match params {
            [p] => Ok(*p),
            _ => Err(Error::Malformed(format!("{name} takes exactly one parameter"))),
        }
    };
    match name {
        "cyclic" => cyclic(one()?),
        "dihedral" => dihedral(one()?),
        "symmetric" => symmetric(one()?),
        "alternating" => alternating(one()?),
        "quaternion" => quaternion(one()?),
        "unitriangular" => unitriangular(one()?),
        _ => Err(Error::UnknownCatalog(name.to_string())),
    }
}

/// Parses a spec like `dihedral(4)` or `product(cyclic(2),symmetric(3))`.
pub fn parse_spec(spec: &str) -> Result<FiniteGroup> {
    let spec: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    let open = spec
        .find('(')
        .ok_or_else(|| Error::Malformed(format!("catalog spec `{spec}` needs arguments in parentheses")))?;
    if !spec.ends_with(')') {
        return Err(Error::Malformed(format!("catalog spec `{spec}` is missing `)`")));
    }
    let name = &spec[..open];
    let args = &spec[open + 1..spec.len() - 1];
    if name == "product" {
        let mut depth = 0usize;
        let split = args.char_indices().find(|&(_, c)| {
            match c {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                ',' if depth == 0 => return true,
                _ => {}
            }
            false
        });
        let (i, _) = split.ok_or_else(|| Error::Malformed("product needs two factors".into()))?;
        return direct_product(&parse_spec(&args[..i])?, &parse_spec(&args[i + 1..])?);
    }
    let params = args
        .split(',')
        .map(|a| a.parse::<usize>().map_err(|_| Error::Malformed(format!("bad parameter `{a}`"))))
        .collect::<Result<Vec<_>>>()?;
    by_name(name, &params)
}

/// The standard catalog: named groups spanning abelian, nilpotent of class
/// 1–4, and non-nilpotent ambients, plus a few larger groups that the
/// property suites sample rather than enumerate.
pub fn standard_specs() -> Vec<&'static str> {
    vec![
        "cyclic(1)",
        "cyclic(2)",
        "cyclic(4)",
        "cyclic(6)",
        "cyclic(12)",
        "product(cyclic(2),cyclic(2))",
        "product(cyclic(2),cyclic(4))",
        "dihedral(3)",
        "dihedral(4)",
        "dihedral(5)",
        "dihedral(6)",
        "dihedral(8)",
        "dihedral(12)",
        "dihedral(16)",
        "symmetric(3)",
        "symmetric(4)",
        "symmetric(5)",
        "alternating(4)",
        "alternating(5)",
        "quaternion(8)",
        "quaternion(12)",
        "quaternion(16)",
        "unitriangular(2)",
        "unitriangular(3)",
        "unitriangular(5)",
        "product(dihedral(4),symmetric(3))",
        "product(symmetric(3),symmetric(3))",
        "product(quaternion(8),cyclic(3))",
        "product(cyclic(2),dihedral(4))",
        "product(alternating(4),cyclic(2))",
        "product(quaternion(8),symmetric(3))",
        "product(dihedral(4),cyclic(3))",
        // sampled, not enumerated
        "unitriangular(7)",
        "symmetric(6)",
        "product(dihedral(4),alternating(5))",
    ]
}

/// Instantiates [`standard_specs`].
pub fn standard() -> Vec<(String, FiniteGroup)> {
    standard_specs()
        .into_iter()
        .map(|s| (s.to_string(), parse_spec(s).expect("catalog spec is valid")))
        .collect()
}
