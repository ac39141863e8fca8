//! Confluent Newton divided differences.
//!
//! Nodes are given as clusters `(value, multiplicity)`. Within a cluster the
//! table is seeded with Taylor coefficients `g^(k)(x) / k!`, which are the
//! exact limits of the ordinary recurrence as the nodes coalesce.

use crate::precision::Arithmetic;

/// `[z_0, ..., z_{n-1}] g` where `taylor(c, x, k)` returns `g^(k)(x) / k!` for
/// the node `x` of cluster index `c`.
///
/// Clusters must be listed with distinct values; their order is the order of
/// the expanded node list (descending is used throughout this crate).
pub fn divided_difference<A, G>(arith: &A, clusters: &[(f64, usize)], taylor: G) -> A::Num
where
    A: Arithmetic,
    G: Fn(usize, &A::Num, usize) -> A::Num,
{
    let mut values = Vec::new();
    let mut owner = Vec::new();
    for (id, &(x, m)) in clusters.iter().enumerate() {
        if m == 0 {
            continue;
        }
        let v = arith.num(x);
        for _ in 0..m {
            values.push(v.clone());
            owner.push(id);
        }
    }
    let n = values.len();
    if n == 0 {
        return arith.zero();
    }

    let mut table: Vec<A::Num> = values.iter().zip(&owner).map(|(x, &c)| taylor(c, x, 0)).collect();
    for k in 1..n {
        for i in 0..n - k {
            table[i] = if owner[i] == owner[i + k] {
                taylor(owner[i], &values[i], k)
            } else {
                (table[i + 1].clone() - table[i].clone()) / (values[i + k].clone() - values[i].clone())
            };
        }
    }
    table.swap_remove(0)
}
