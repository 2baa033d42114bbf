/// Partial sums `λ1, λ1+λ2, ..., λ1+...+λk` of the RSK shape of `word`.
///
/// Rows are kept weakly increasing, so by Greene's theorem the `j`-th sum is
/// the largest total size of `j` disjoint weakly increasing subsequences.
/// Only the first `k` rows are tracked; entries bumped out of row `k` are dropped,
/// which does not change the first `k` row lengths.
pub fn greene_partial_sums<T: PartialOrd + Copy>(word: &[T], k: usize) -> Vec<usize> {
    let mut rows: Vec<Vec<T>> = vec![Vec::new(); k];
    for &w in word {
        let mut x = w;
        for row in rows.iter_mut() {
            let pos = row.partition_point(|y| *y <= x);
            if pos == row.len() {
                row.push(x);
                break;
            }
            std::mem::swap(&mut row[pos], &mut x);
        }
    }
    let mut acc = 0;
    rows.iter()
        .map(|r| {
            acc += r.len();
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_rsk() {
        assert_eq!(greene_partial_sums(&[3, 1, 2], 2), vec![2, 3]);
        assert_eq!(greene_partial_sums(&[3, 1, 2], 5), vec![2, 3, 3, 3, 3]);
        assert_eq!(greene_partial_sums(&[4, 3, 2, 1], 3), vec![1, 2, 3]);
        assert_eq!(greene_partial_sums(&[1, 1, 1], 1), vec![3]);
        assert_eq!(greene_partial_sums::<i32>(&[], 2), vec![0, 0]);
    }

    #[test]
    fn two_rows_of_a_shuffle() {
        // 2 5 1 3 4 6: λ1 = 4 (2 3 4 6 or 1 3 4 6), two chains cover everything.
        assert_eq!(greene_partial_sums(&[2, 5, 1, 3, 4, 6], 2), vec![4, 6]);
    }
}
