//! Lexicographic permutation enumeration over index slices. The fixed order
//! makes repeated enumerations bitwise reproducible, which the sketch relies
//! on for insert/delete cancellation.

/// Advances `a` to the next permutation in lexicographic order; returns
/// `false` once `a` is the last (descending) permutation.
pub(crate) fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Calls `f` with every permutation of `0..n` in lexicographic order.
pub(crate) fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        f(&perm);
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_all_permutations_in_order() {
        let mut seen = Vec::new();
        for_each_permutation(3, |p| seen.push(p.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0],
            ]
        );
    }

    #[test]
    fn factorial_counts() {
        for n in 0..=6 {
            let mut count = 0u64;
            for_each_permutation(n, |_| count += 1);
            let fact: u64 = (1..=n as u64).product::<u64>().max(1);
            assert_eq!(count, fact);
        }
    }
}
