use chemeval_core::chem::{
    canonical_key, fingerprint, isomorphic, key_of, normalize, tanimoto, DEFAULT_NBITS, DEFAULT_RADIUS,
};
use chemeval_core::corpus::random::{mutate, random_molecule};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[test]
fn key_is_invariant_under_atom_permutation() {
    let mismatches: usize = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mol = random_molecule(&mut rng, 30);
            let key = key_of(&mol).unwrap();
            let mut perm: Vec<usize> = (0..mol.atom_count()).collect();
            let mut bad = 0;
            for _ in 0..1000 {
                perm.shuffle(&mut rng);
                if key_of(&mol.permuted(&perm)).unwrap() != key {
                    bad += 1;
                }
            }
            bad
        })
        .sum();
    assert_eq!(mismatches, 0);
}

#[test]
fn key_equality_agrees_with_isomorphism() {
    let outcomes: Vec<(bool, bool)> = (0..600u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
            let a = random_molecule(&mut rng, 30);
            let b = match seed % 3 {
                0 => {
                    let mut perm: Vec<usize> = (0..a.atom_count()).collect();
                    perm.shuffle(&mut rng);
                    a.permuted(&perm)
                }
                1 => mutate(&mut rng, &a),
                _ => {
                    // same size, independent draw
                    random_molecule(&mut rng, a.atom_count())
                }
            };
            let (na, nb) = (normalize(&a).unwrap(), normalize(&b).unwrap());
            let same_key = canonical_key(&na) == canonical_key(&nb);
            (same_key, isomorphic(&na, &nb).unwrap())
        })
        .collect();
    let disagreements = outcomes.iter().filter(|(k, i)| k != i).count();
    let positives = outcomes.iter().filter(|(_, i)| *i).count();
    assert_eq!(disagreements, 0);
    assert!(positives >= 200 && outcomes.len() - positives >= 200);
}

#[test]
fn fingerprint_ignores_atom_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let mol = random_molecule(&mut rng, 30);
        let mut perm: Vec<usize> = (0..mol.atom_count()).collect();
        perm.shuffle(&mut rng);
        let a = fingerprint(&normalize(&mol).unwrap(), DEFAULT_RADIUS, DEFAULT_NBITS);
        let b = fingerprint(&normalize(&mol.permuted(&perm)).unwrap(), DEFAULT_RADIUS, DEFAULT_NBITS);
        assert_eq!(a, b);
        assert_eq!(tanimoto(&a, &b).unwrap(), 1.0);
    }
}

#[test]
fn tanimoto_is_symmetric_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let a = normalize(&random_molecule(&mut rng, 25)).unwrap();
        let b = normalize(&random_molecule(&mut rng, 25)).unwrap();
        let radius = rng.random_range(0..=3);
        let fa = fingerprint(&a, radius, 1024);
        let fb = fingerprint(&b, radius, 1024);
        let ab = tanimoto(&fa, &fb).unwrap();
        assert_eq!(ab, tanimoto(&fb, &fa).unwrap());
        assert!((0.0..=1.0).contains(&ab));
    }
}

#[test]
fn normalization_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..500 {
        let once = normalize(&random_molecule(&mut rng, 30)).unwrap();
        let twice = normalize(once.molecule()).unwrap();
        assert_eq!(once.molecule(), twice.molecule());
        assert_eq!(canonical_key(&once), canonical_key(&twice));
    }
}
