//! Integer and set partitions of small sets.

use alloc::vec;
use alloc::vec::Vec;

/// One integer partition of `m` (block sizes, non-increasing) together with
/// the number of set partitions of `{1..m}` having exactly these block sizes,
/// `m! / ∏ (size! · mult!)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeProfile {
    pub sizes: Vec<usize>,
    pub count: u64,
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// All integer partitions of `m`, largest parts first.
pub fn integer_partitions(m: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m, &mut Vec::new(), &mut out);
    out
}

/// Size profiles of the set partitions of an `m`-set. Counts are exact for
/// `m ≤ 20`.
pub fn size_profiles(m: usize) -> Vec<SizeProfile> {
    integer_partitions(m)
        .into_iter()
        .map(|sizes| {
            let mut denom = 1u64;
            let mut i = 0;
            while i < sizes.len() {
                let mut j = i;
                while j < sizes.len() && sizes[j] == sizes[i] {
                    denom *= factorial(sizes[j]);
                    j += 1;
                }
                denom *= factorial(j - i);
                i = j;
            }
            SizeProfile { count: factorial(m) / denom, sizes }
        })
        .collect()
}

/// Visits every set partition of `{0..k}` as a restricted growth string
/// `a` (element `i` lies in block `a[i]`, `a[0] = 0`, `a[i] ≤ 1 + max a[..i]`).
pub fn for_each_set_partition<F: FnMut(&[usize])>(k: usize, mut visit: F) {
    if k == 0 {
        visit(&[]);
        return;
    }
    let mut a = vec![0usize; k];
    let mut max = vec![0usize; k];
    loop {
        visit(&a);
        // Rightmost position that can still be incremented.
        let mut i = k - 1;
        loop {
            if i == 0 {
                return;
            }
            if a[i] <= max[i - 1] {
                break;
            }
            i -= 1;
        }
        a[i] += 1;
        max[i] = max[i - 1].max(a[i]);
        for j in i + 1..k {
            a[j] = 0;
            max[j] = max[i];
        }
    }
}

/// Block sizes of a restricted growth string.
pub fn block_sizes(rgs: &[usize]) -> Vec<usize> {
    let blocks = rgs.iter().max().map_or(0, |&m| m + 1);
    let mut sizes = vec![0usize; blocks];
    for &b in rgs {
        sizes[b] += 1;
    }
    sizes
}

/// Bell number `B_k` via the Bell triangle.
pub fn bell_number(k: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..k {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}
