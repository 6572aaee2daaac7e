//! Brute-force cross-checks that share no code with the library paths they test.

use syntomic_core::bigraded::Window;
use syntomic_core::gfp::{binom_in, Fp, FpMatrix};
use syntomic_core::hochschild::ThhFp;
use syntomic_core::syntomic::{can_phi_assemble, syntomic_closed_form_total};

/// Every vector of F_p^n, in lexicographic order.
fn all_vectors(p: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..p).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

#[test]
fn kernel_size_matches_exhaustive_search() {
    for p in [2u32, 3] {
        let field = Fp::new(p).unwrap();
        // A deterministic family of small matrices.
        for seed in 0..40u32 {
            let (rows, cols) = (1 + (seed % 3) as usize, 2 + (seed % 4) as usize);
            let data: Vec<Vec<u32>> = (0..rows)
                .map(|i| (0..cols).map(|j| (seed * 7 + (i as u32) * 13 + (j as u32) * 5 + i as u32 * j as u32) % p).collect())
                .collect();
            let m = FpMatrix::from_rows(field, cols, &data).unwrap();
            let zeros = all_vectors(p, cols)
                .into_iter()
                .filter(|v| data.iter().all(|row| row.iter().zip(v).map(|(a, b)| a * b).sum::<u32>() % p == 0))
                .count();
            assert_eq!(zeros, (p as usize).pow(m.kernel().dim() as u32), "p={p} seed={seed}");
        }
    }
}

#[test]
fn binomials_match_pascal_triangle() {
    for p in [2u32, 3, 5, 7] {
        let field = Fp::new(p).unwrap();
        let mut row = vec![1u32];
        for j in 0..=80u64 {
            for (k, &c) in row.iter().enumerate() {
                assert_eq!(binom_in(field, j, k as u64), c, "C({j},{k}) mod {p}");
            }
            let mut next = vec![1u32; row.len() + 1];
            for k in 1..row.len() {
                next[k] = (row[k - 1] + row[k]) % p;
            }
            row = next;
        }
    }
}

#[test]
fn thh_basis_counts_by_direct_enumeration() {
    for (p, top) in [(2u32, 2usize), (3, 1), (5, 1)] {
        let thh = ThhFp::new(p, top).unwrap();
        let eps_stems: Vec<i64> = (0..=top).map(|i| 2 * (p as i64).pow(i as u32) - 1).collect();
        for stem in -2..60i64 {
            for weight in -(top as i64) - 2..=1 {
                let mut count = 0;
                for mask in 0u32..(1 << eps_stems.len()) {
                    let chosen: Vec<i64> = (0..eps_stems.len()).filter(|&i| mask >> i & 1 == 1).map(|i| eps_stems[i]).collect();
                    let rest = stem - chosen.iter().sum::<i64>();
                    if -(chosen.len() as i64) == weight && rest >= 0 && rest % 2 == 0 {
                        count += 1;
                    }
                }
                let got = thh.basis(&Window::point(stem, weight)).unwrap().len();
                assert_eq!(got, count, "p={p} ({stem},{weight})");
            }
        }
    }
}

#[test]
fn syntomic_totals_follow_the_count_formula() {
    // Λ(∂, ε̄_1, ..., ε̄_n, λ_{n+1}), plus p^{n+1} - p^n torsion classes
    // for each subset S.
    for (p, n) in [(2u32, 1usize), (2, 2), (3, 1), (5, 1), (7, 1), (3, 2)] {
        let width = (p as usize).pow(n as u32 + 1) - (p as usize).pow(n as u32);
        let expected = (1usize << (n + 2)) + (1usize << n) * width;
        assert_eq!(can_phi_assemble(p, n).unwrap().table().len(), expected, "({p},{n})");
        assert_eq!(syntomic_closed_form_total(p, n), expected, "({p},{n})");
    }
}
