//! Packed GF(2) vectors and elimination.

pub type Word = u64;

#[inline]
pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

#[inline]
pub fn get(v: &[Word], i: usize) -> bool {
    (v[i / 64] >> (i % 64)) & 1 == 1
}

#[inline]
pub fn set(v: &mut [Word], i: usize, b: bool) {
    let m = 1 << (i % 64);
    if b {
        v[i / 64] |= m;
    } else {
        v[i / 64] &= !m;
    }
}

#[inline]
pub fn xor_into(dst: &mut [Word], src: &[Word]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

#[inline]
pub fn is_zero(v: &[Word]) -> bool {
    v.iter().all(|&w| w == 0)
}

/// Rank over GF(2) of `rows`, each `nbits` long. Consumes the rows.
pub fn rank(mut rows: Vec<Vec<Word>>, nbits: usize) -> usize {
    let mut r = 0;
    for col in 0..nbits {
        let Some(p) = (r..rows.len()).find(|&i| get(&rows[i], col)) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && get(row, col) {
                xor_into(row, &pivot);
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Row-reduce `rows` using pivots only in columns `0..pivot_bits`. Returns
/// `(rank, rows)` where the first `rank` rows hold the pivots and the
/// remaining rows are zero on the pivot columns.
pub fn eliminate_prefix(mut rows: Vec<Vec<Word>>, pivot_bits: usize) -> (usize, Vec<Vec<Word>>) {
    let mut r = 0;
    for col in 0..pivot_bits {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| get(&rows[i], col)) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && get(row, col) {
                xor_into(row, &pivot);
            }
        }
        r += 1;
    }
    (r, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(bits: &[u8]) -> Vec<Word> {
        let mut v = vec![0; words_for(bits.len())];
        for (i, &b) in bits.iter().enumerate() {
            set(&mut v, i, b == 1);
        }
        v
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank(vec![row(&[1, 1, 0]), row(&[0, 1, 1]), row(&[1, 0, 1])], 3), 2);
        assert_eq!(rank(vec![row(&[1, 0]), row(&[0, 1])], 2), 2);
        assert_eq!(rank(vec![row(&[0, 0])], 2), 0);
    }

    #[test]
    fn wide_rows_cross_word_boundaries() {
        let n = 130;
        let rows: Vec<Vec<Word>> = (0..n)
            .map(|i| {
                let mut v = vec![0; words_for(n)];
                set(&mut v, i, true);
                set(&mut v, (i + 1) % n, true);
                v
            })
            .collect();
        // cycle graph incidence: rank n - 1
        assert_eq!(rank(rows, n), n - 1);
    }
}
