//! Smith normal form over the integers, used to decide whether a set of
//! cycle indices generates the full period lattice.

/// Nonzero diagonal entries of the Smith normal form of `matrix`
/// (rows × columns), ascending, each dividing the next.
#[allow(clippy::needless_range_loop)]
pub fn elementary_divisors(matrix: &[Vec<i64>]) -> Vec<i64> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<i128>> = matrix
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut divisors = Vec::new();

    for t in 0..rows.min(cols) {
        // Pivot: smallest nonzero magnitude in the trailing block.
        let Some((pi, pj)) = smallest_nonzero(&a, t) else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    for j in t..cols {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if a[t][j] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // Pivot must divide the whole trailing block.
                let offender = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| a[i][j] % a[t][t] != 0);
                match offender {
                    None => break,
                    Some((i, _)) => {
                        for j in t..cols {
                            a[t][j] += a[i][j];
                        }
                    }
                }
            }
            let (pi, pj) = smallest_nonzero(&a, t).expect("pivot row is nonzero");
            if (pi, pj) != (t, t) && a[pi][pj].abs() < a[t][t].abs() {
                a.swap(t, pi);
                for row in a.iter_mut() {
                    row.swap(t, pj);
                }
            }
        }
        divisors.push(a[t][t].unsigned_abs() as i64);
    }
    divisors
}

fn smallest_nonzero(a: &[Vec<i128>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, i128)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, &x) in row.iter().enumerate().skip(t) {
            if x != 0 && best.is_none_or(|(_, _, b)| x.abs() < b) {
                best = Some((i, j, x.abs()));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}
