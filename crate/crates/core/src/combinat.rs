//! Small enumeration helpers shared across modules.

/// All multisets (as nondecreasing index sequences) drawn from `weights`
/// whose weights sum to exactly `total`. Items of weight zero are ignored.
pub fn weighted_multisets(weights: &[u32], total: u32) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut acc = Vec::new();
    rec(weights, 0, total, &mut acc, &mut out);
    out
}

fn rec(weights: &[u32], start: usize, remaining: u32, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if remaining == 0 {
        out.push(acc.clone());
        return;
    }
    for idx in start..weights.len() {
        let w = weights[idx];
        if w == 0 || w > remaining {
            continue;
        }
        acc.push(idx);
        rec(weights, idx, remaining - w, acc, out);
        acc.pop();
    }
}

/// Exponent vectors of length `len` with entry sum at most `max_total`.
pub fn exponent_vectors(len: usize, max_total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut acc = vec![0; len];
    fill(0, max_total, &mut acc, &mut out);
    out
}

fn fill(pos: usize, budget: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if pos == acc.len() {
        out.push(acc.clone());
        return;
    }
    for e in 0..=budget {
        acc[pos] = e;
        fill(pos + 1, budget - e, acc, out);
    }
    acc[pos] = 0;
}

/// Run lengths of equal adjacent elements in a sorted slice.
pub fn runs<T: PartialEq>(items: &[T]) -> Vec<(&T, u32)> {
    let mut out: Vec<(&T, u32)> = Vec::new();
    for item in items {
        match out.last_mut() {
            Some((last, count)) if *last == item => *count += 1,
            _ => out.push((item, 1)),
        }
    }
    out
}
