//! Signed Gauss codes, Reidemeister-I reduction, and the knot determinant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One incidence of a crossing in traversal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussEntry {
    pub id: usize,
    pub over: bool,
    /// Crossing sign (+1/−1); carried through reductions, unused by the
    /// determinant.
    pub sign: i8,
}

pub type GaussCode = Vec<GaussEntry>;

/// Each id must occur exactly twice, once over and once under.
pub fn validate_code(code: &GaussCode) -> Result<()> {
    let mut seen: std::collections::HashMap<usize, Vec<bool>> = Default::default();
    for e in code {
        seen.entry(e.id).or_default().push(e.over);
    }
    for (id, occ) in &seen {
        if occ.len() != 2 || occ[0] == occ[1] {
            return Err(Error::MalformedCode(format!(
                "crossing {id} has incidences {occ:?} (want one over, one under)"
            )));
        }
    }
    Ok(())
}

/// Repeatedly delete crossings whose two incidences are cyclically adjacent
/// (Reidemeister-I kinks) until none remain.
pub fn reduce_rm1(code: &GaussCode) -> GaussCode {
    let mut code = code.clone();
    loop {
        let n = code.len();
        if n < 2 {
            return code;
        }
        let mut removed = false;
        for i in 0..n {
            let j = (i + 1) % n;
            if code[i].id == code[j].id {
                let (lo, hi) = (i.min(j), i.max(j));
                code.remove(hi);
                code.remove(lo);
                removed = true;
                break;
            }
        }
        if !removed {
            return code;
        }
    }
}

/// Arc label (maximal over-strand segment) for every code position.
///
/// An arc ends at each under-incidence; the segment after the last under
/// wraps around to join the first.
fn arc_labels(code: &GaussCode) -> Vec<usize> {
    let c = code.len() / 2;
    let mut labels = Vec::with_capacity(code.len());
    let mut label = 0usize;
    for e in code {
        labels.push(label);
        if !e.over {
            label += 1;
        }
    }
    // cyclic merge of the trailing segment into arc 0
    for l in &mut labels {
        if *l == c {
            *l = 0;
        }
    }
    labels
}

/// |Δ(−1)| from the Fox-coloring matrix of the code; 1 for the empty code.
pub fn knot_determinant(code: &GaussCode) -> Result<u64> {
    validate_code(code)?;
    let c = code.len() / 2;
    if c == 0 {
        return Ok(1);
    }
    let labels = arc_labels(code);
    // row per crossing: +2 at the over arc, −1 at the incoming and outgoing
    // under arcs
    let mut ids: Vec<usize> = code.iter().map(|e| e.id).collect();
    ids.sort_unstable();
    ids.dedup();
    let row_of = |id: usize| ids.binary_search(&id).unwrap();
    let mut m = vec![vec![0i128; c]; c];
    for (pos, e) in code.iter().enumerate() {
        let r = row_of(e.id);
        if e.over {
            m[r][labels[pos]] += 2;
        } else {
            let incoming = labels[pos];
            let outgoing = labels[(pos + 1) % code.len()];
            m[r][incoming] -= 1;
            m[r][outgoing] -= 1;
        }
    }
    // delete one row and one column, take |det| of the rest
    let n = c - 1;
    if n == 0 {
        return Ok(1);
    }
    let mut a = vec![vec![0i128; n]; n];
    for i in 0..n {
        a[i][..n].copy_from_slice(&m[i][..n]);
    }
    match bareiss_det(&mut a) {
        Some(d) => Ok(d.unsigned_abs().min(u64::MAX as u128) as u64),
        None => Ok(float_det(&m, n)),
    }
}

/// Fraction-free integer determinant; None on overflow.
fn bareiss_det(a: &mut [Vec<i128>]) -> Option<i128> {
    let n = a.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let p = (k + 1..n).find(|&i| a[i][k] != 0)?;
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k][k].checked_mul(a[i][j])?.checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = num / prev;
            }
        }
        prev = a[k][k];
        if prev == 0 {
            return Some(0);
        }
    }
    Some(sign * a[n - 1][n - 1])
}

/// Fallback LU determinant, rounded; only reached on i128 overflow.
fn float_det(m: &[Vec<i128>], n: usize) -> u64 {
    let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = m[i][j] as f64;
        }
    }
    a.lu().determinant().abs().round() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(id: usize, over: bool) -> GaussEntry {
        GaussEntry { id, over, sign: 1 }
    }

    fn code_from(spec: &[(usize, bool)]) -> GaussCode {
        spec.iter().map(|&(id, over)| entry(id, over)).collect()
    }

    /// Standard trefoil: O1 U2 O3 U1 O2 U3.
    fn trefoil() -> GaussCode {
        code_from(&[(1, true), (2, false), (3, true), (1, false), (2, true), (3, false)])
    }

    /// Standard alternating figure-eight: O1 U2 O3 U4 O2 U1 O4 U3.
    fn figure_eight() -> GaussCode {
        code_from(&[
            (1, true),
            (2, false),
            (3, true),
            (4, false),
            (2, true),
            (1, false),
            (4, true),
            (3, false),
        ])
    }

    /// Brute-force Fox p-coloring oracle: true iff a non-trivial coloring
    /// exists, which holds iff p divides the determinant.
    fn has_nontrivial_coloring(code: &GaussCode, p: u64) -> bool {
        let c = code.len() / 2;
        let labels = arc_labels(code);
        let arcs = c.max(1);
        let mut colors = vec![0u64; arcs];
        loop {
            let ok = {
                let mut all = true;
                for (pos, e) in code.iter().enumerate() {
                    if e.over {
                        continue;
                    }
                    // find the over arc of this crossing
                    let over_pos = code
                        .iter()
                        .position(|f| f.id == e.id && f.over)
                        .unwrap();
                    let lhs = 2 * colors[labels[over_pos]] + 2 * p
                        - colors[labels[pos]]
                        - colors[labels[(pos + 1) % code.len()]];
                    if lhs % p != 0 {
                        all = false;
                        break;
                    }
                }
                all
            };
            if ok && colors.iter().any(|&x| x != colors[0]) {
                return true;
            }
            // increment base-p counter
            let mut i = 0;
            loop {
                if i == arcs {
                    return false;
                }
                colors[i] += 1;
                if colors[i] < p {
                    break;
                }
                colors[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn determinant_unknot_and_kink() {
        assert_eq!(knot_determinant(&vec![]).unwrap(), 1);
        let kink = code_from(&[(1, true), (1, false)]);
        assert_eq!(knot_determinant(&kink).unwrap(), 1);
        assert!(reduce_rm1(&kink).is_empty());
    }

    #[test]
    fn determinant_trefoil_is_3() {
        assert_eq!(knot_determinant(&trefoil()).unwrap(), 3);
        assert!(has_nontrivial_coloring(&trefoil(), 3));
        assert!(!has_nontrivial_coloring(&trefoil(), 5));
    }

    #[test]
    fn determinant_figure_eight_is_5() {
        assert_eq!(knot_determinant(&figure_eight()).unwrap(), 5);
        assert!(has_nontrivial_coloring(&figure_eight(), 5));
        assert!(!has_nontrivial_coloring(&figure_eight(), 3));
        assert!(!has_nontrivial_coloring(&figure_eight(), 7));
    }

    #[test]
    fn coloring_oracle_matches_determinant_divisibility() {
        for code in [trefoil(), figure_eight()] {
            let det = knot_determinant(&code).unwrap();
            for p in [3u64, 5, 7] {
                assert_eq!(has_nontrivial_coloring(&code, p), det % p == 0);
            }
        }
    }

    #[test]
    fn rm1_reduction_invariance() {
        // trefoil with extra kinks spliced in
        let mut code = trefoil();
        code.insert(2, entry(10, true));
        code.insert(3, entry(10, false));
        code.push(entry(11, false));
        code.push(entry(11, true));
        let reduced = reduce_rm1(&code);
        assert_eq!(reduced.len(), 6);
        assert_eq!(knot_determinant(&code).unwrap(), 3);
        assert_eq!(knot_determinant(&reduced).unwrap(), 3);
    }

    #[test]
    fn rm1_nested_kinks_telescope() {
        // nested kinks: a b b a — inner removal exposes the outer
        let code = code_from(&[(1, true), (2, true), (2, false), (1, false)]);
        assert!(reduce_rm1(&code).is_empty());
        assert_eq!(knot_determinant(&code).unwrap(), 1);
        // wrap-around adjacency
        let code = code_from(&[(1, false), (2, true), (2, false), (1, true)]);
        assert!(reduce_rm1(&code).is_empty());
    }

    #[test]
    fn malformed_codes_rejected() {
        assert!(knot_determinant(&code_from(&[(1, true)])).is_err());
        assert!(knot_determinant(&code_from(&[(1, true), (1, true)])).is_err());
        assert!(knot_determinant(&code_from(&[
            (1, true),
            (1, false),
            (1, false)
        ]))
        .is_err());
    }
}
