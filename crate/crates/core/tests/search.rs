use mdms_core::search::{canonical_class_count, exhaustive_search, randomized_search};

/// Minimum of |2A| over subtractive bases of Z/pZ, by plain enumeration of
/// every subset.
fn naive_min_2a(p: usize) -> usize {
    let mut best = p;
    for mask in 1u32..(1 << p) {
        let a: Vec<usize> = (0..p).filter(|i| mask >> i & 1 == 1).collect();
        let mut diff = vec![false; p];
        let mut sum = vec![false; p];
        for &x in &a {
            for &y in &a {
                diff[(x + p - y) % p] = true;
                sum[(x + y) % p] = true;
            }
        }
        if diff.iter().all(|&d| d) {
            best = best.min(sum.iter().filter(|&&s| s).count());
        }
    }
    best
}

#[test]
fn p13_matches_golden_file() {
    let report = exhaustive_search(13, 2).unwrap();
    let golden = include_str!("golden/search_p13_h2.json");
    assert_eq!(serde_json::to_string(&report).unwrap(), golden.trim());
}

#[test]
fn exhaustive_minimum_matches_plain_enumeration() {
    for p in [3usize, 5, 7, 11, 13] {
        let report = exhaustive_search(p as u64, 2).unwrap();
        assert_eq!(report.best_sumset_size as usize, naive_min_2a(p), "p = {p}");
    }
}

#[test]
fn class_counts() {
    assert_eq!(canonical_class_count(17).unwrap(), ((1 << 17) - 2) / 17 + 1);
}

#[test]
fn random_search_reaches_the_optimum_on_small_p() {
    for p in [7u64, 11] {
        let best = exhaustive_search(p, 2).unwrap().best_sumset_size;
        let found = (0..4)
            .map(|seed| {
                randomized_search(p, 2, None, seed, 2000)
                    .unwrap()
                    .best_sumset_size
            })
            .min()
            .unwrap();
        assert_eq!(found, best, "p = {p}");
    }
}
