use chemeval_core::combined::{combined_prf, conversion_accuracy};
use chemeval_core::corpus::{
    align, corpus_stats, generate_fixture, parse_ground_truth, parse_predictions, CorpusError, Fixture, FixtureParams,
    Perturbation,
};
use chemeval_core::evaluate::{combined_pages, conversion_pairs, detection_pages, reaction_pages};
use chemeval_core::reaction::{reaction_prf, MatchMode, Reaction};
use chemeval_core::detection::{coco_ap, coco_ar};

fn params(pages: usize, perturbation: Perturbation) -> FixtureParams {
    FixtureParams {
        pages,
        perturbation,
        ..FixtureParams::default()
    }
}

struct Scores {
    combined: chemeval_core::combined::CombinedReport,
    conversion: chemeval_core::combined::ConversionAccuracy,
    soft: chemeval_core::reaction::ReactionReport,
    hard: chemeval_core::reaction::ReactionReport,
}

fn evaluate(fx: &Fixture) -> Scores {
    let gt = parse_ground_truth(&fx.ground_truth_json()).unwrap();
    let pred = parse_predictions(&fx.predictions_json()).unwrap();
    let pages = align(&gt, &pred).unwrap();
    let rxn = reaction_pages(&pages);
    let rxn_refs: Vec<(&[Reaction], &[Reaction])> = rxn.iter().map(|(g, p)| (g.as_slice(), p.as_slice())).collect();
    Scores {
        combined: combined_prf(&combined_pages(&pages), fx.expected.tau).unwrap(),
        conversion: conversion_accuracy(&conversion_pairs(&pages).unwrap()).unwrap(),
        soft: reaction_prf(&rxn_refs, MatchMode::Soft).unwrap(),
        hard: reaction_prf(&rxn_refs, MatchMode::Hard).unwrap(),
    }
}

fn check_against_bookkeeping(fx: &Fixture) -> Scores {
    let s = evaluate(fx);
    let e = &fx.expected;
    assert_eq!(s.combined.counts, e.combined, "seed {}", e.seed);
    assert_eq!(s.conversion.pairs, e.conversion.pairs);
    assert_eq!(s.conversion.matched, e.conversion.matched);
    assert!((s.conversion.mean_tanimoto - e.conversion.mean_tanimoto).abs() < 1e-12);
    assert_eq!(s.soft.counts.n_gt, e.reactions.n_gt);
    assert_eq!(s.soft.counts.n_pred, e.reactions.n_pred);
    assert_eq!(s.soft.counts.matched, e.reactions.soft_matched);
    assert_eq!(s.hard.counts.matched, e.reactions.hard_matched);
    s
}

#[test]
fn perturbed_fixtures_reproduce_their_bookkeeping() {
    for seed in 0..12 {
        let pert = Perturbation {
            box_jitter: 0.3,
            structure_corruption_rate: 0.3,
            drop_rate: 0.1,
            spurious_rate: 0.05,
            role_error_rate: 0.4,
        };
        let fx = generate_fixture(seed, &params(8, pert)).unwrap();
        let s = check_against_bookkeeping(&fx);
        assert!(s.combined.counts.tp > 0 && s.combined.counts.fp > 0);
    }
}

#[test]
fn perfect_fixture_scores_one() {
    let fx = generate_fixture(3, &params(10, Perturbation::none())).unwrap();
    let s = check_against_bookkeeping(&fx);
    let p = s.combined.prf;
    assert_eq!((p.precision, p.recall, p.f1), (1.0, 1.0, 1.0));
    assert_eq!((s.conversion.smiles_match_rate, s.conversion.mean_tanimoto), (1.0, 1.0));
    assert_eq!(s.soft.prf.f1, 1.0);
    assert_eq!(s.hard.prf.f1, 1.0);

    let gt = parse_ground_truth(&fx.ground_truth_json()).unwrap();
    let pred = parse_predictions(&fx.predictions_json()).unwrap();
    let det = detection_pages(&align(&gt, &pred).unwrap());
    assert_eq!(coco_ap(&det).unwrap(), 1.0);
    assert_eq!(coco_ar(&det).unwrap(), 1.0);
}

#[test]
fn fully_corrupted_fixture_scores_zero() {
    let pert = Perturbation {
        structure_corruption_rate: 1.0,
        ..Perturbation::none()
    };
    let fx = generate_fixture(4, &params(10, pert)).unwrap();
    let s = check_against_bookkeeping(&fx);
    assert_eq!(s.combined.counts.tp, 0);
    assert_eq!((s.combined.prf.precision, s.combined.prf.recall), (0.0, 0.0));
    assert_eq!(s.conversion.smiles_match_rate, 0.0);
    assert!(s.conversion.mean_tanimoto < 1.0);
}

#[test]
fn role_swaps_split_soft_and_hard() {
    let pert = Perturbation {
        role_error_rate: 1.0,
        ..Perturbation::none()
    };
    let fx = generate_fixture(5, &FixtureParams {
        pages: 20,
        reactions_per_page: [1, 3],
        molecules_per_page: [6, 10],
        perturbation: pert,
        ..FixtureParams::default()
    })
    .unwrap();
    let s = check_against_bookkeeping(&fx);
    assert!(s.soft.counts.n_gt > 10);
    assert_eq!(s.soft.prf.f1, 1.0);
    assert_eq!(s.hard.prf.f1, 0.0);
}

#[test]
fn half_corrupted_conversion_rate() {
    let pert = Perturbation {
        structure_corruption_rate: 0.5,
        ..Perturbation::none()
    };
    let fx = generate_fixture(6, &params(60, pert)).unwrap();
    let s = check_against_bookkeeping(&fx);
    let rate = s.conversion.smiles_match_rate;
    assert!((rate - 0.5).abs() < 0.06, "{rate}");
}

#[test]
fn written_corpora_load_back_identically() {
    let pert = Perturbation {
        box_jitter: 0.2,
        structure_corruption_rate: 0.2,
        drop_rate: 0.1,
        spurious_rate: 0.05,
        role_error_rate: 0.2,
    };
    let fx = generate_fixture(7, &params(5, pert)).unwrap();
    let gt = parse_ground_truth(&fx.ground_truth_json()).unwrap();
    let pred = parse_predictions(&fx.predictions_json()).unwrap();
    assert_eq!(parse_ground_truth(&gt.to_json()).unwrap(), gt);
    assert_eq!(parse_predictions(&pred.to_json()).unwrap(), pred);
    assert_eq!(parse_ground_truth(&gt.to_json()).unwrap().to_json(), gt.to_json());
    let stats = corpus_stats(&gt);
    assert_eq!(stats.n_pages, 5);
    assert_eq!(stats.n_molecules, fx.expected.conversion.pairs);
    assert_eq!(stats.n_reactions, fx.expected.reactions.n_gt);
}

#[test]
fn fixtures_are_deterministic_per_seed() {
    let p = params(4, Perturbation { box_jitter: 0.2, ..Perturbation::none() });
    let a = generate_fixture(11, &p).unwrap();
    let b = generate_fixture(11, &p).unwrap();
    let c = generate_fixture(12, &p).unwrap();
    assert_eq!(a.ground_truth_json(), b.ground_truth_json());
    assert_eq!(a.predictions_json(), b.predictions_json());
    assert_eq!(a.expected_json(), b.expected_json());
    assert_ne!(a.ground_truth_json(), c.ground_truth_json());
}

const ETHANOL: &str = "\n  test\n\n  3  2  0  0  0  0  0  0  0  0999 V2000\n    0.0000    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0\n    1.3000    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0\n    2.0000    1.0000    0.0000 O   0  0  0  0  0  0  0  0  0  0  0  0\n  1  2  1  0\n  2  3  1  0\nM  END\n";

fn gt_file(pages: &str) -> String {
    format!(r#"{{"dataset": "Patents", "pages": [{pages}]}}"#)
}

fn gt_page(id: &str, bbox: &str) -> String {
    format!(
        r#"{{"page_id": "{id}", "width": 100, "height": 100, "molecules": [{{"id": "m1", "bbox": {bbox}, "molfile": {}}}]}}"#,
        serde_json::to_string(ETHANOL).unwrap()
    )
}

fn pred_file(structure: &str, score: f64) -> String {
    format!(
        r#"{{"dataset": "Patents", "pages": [{{"page_id": "p1", "width": 100, "height": 100,
            "molecules": [{{"id": "m1", "bbox": [10, 10, 50, 50], "score": {score},
            "structure": {{"format": "smiles", "value": "{structure}"}}}}]}}]}}"#
    )
}

#[test]
fn loader_accepts_a_minimal_page() {
    let gt = parse_ground_truth(&gt_file(&gt_page("p1", "[10, 10, 50, 50]"))).unwrap();
    assert_eq!(gt.pages[0].molecules[0].key.as_str(), "CCO");
    assert!(gt.pages[0].reactions.is_empty());
}

#[test]
fn loader_rejects_bad_ground_truth() {
    let dup = gt_file(&format!("{}, {}", gt_page("p1", "[10, 10, 50, 50]"), gt_page("p1", "[10, 10, 50, 50]")));
    assert!(matches!(parse_ground_truth(&dup), Err(CorpusError::DuplicatePage(p)) if p == "p1"));
    let outside = gt_file(&gt_page("p1", "[10, 10, 150, 50]"));
    assert!(matches!(parse_ground_truth(&outside), Err(CorpusError::OutOfBounds { .. })));
    let inverted = gt_file(&gt_page("p1", "[50, 10, 10, 50]"));
    assert!(matches!(parse_ground_truth(&inverted), Err(CorpusError::InvalidBox { .. })));
    let extra = r#"{"dataset": "x", "pages": [], "colour": 1}"#;
    assert!(matches!(parse_ground_truth(extra), Err(CorpusError::Schema(_))));
    let bad_ref = gt_file(&gt_page("p1", "[10, 10, 50, 50]").replace(
        r#""molecules""#,
        r#""reactions": [{"reactants": [{"ref": "m1"}], "products": [{"ref": "m9"}]}], "molecules""#,
    ));
    assert!(matches!(parse_ground_truth(&bad_ref), Err(CorpusError::UnknownReference { .. })));
}

#[test]
fn unreadable_predicted_structure_is_kept_as_invalid() {
    let pred = parse_predictions(&pred_file("C1CC", 0.5)).unwrap();
    let entry = &pred.pages[0].molecules[0];
    assert!(entry.structure.is_err());
    assert_eq!(entry.key(), None);
}

#[test]
fn score_outside_unit_interval_is_rejected() {
    assert!(matches!(
        parse_predictions(&pred_file("CCO", 1.5)),
        Err(CorpusError::ScoreOutOfRange { .. })
    ));
}

#[test]
fn pages_must_align() {
    let gt = parse_ground_truth(&gt_file(&gt_page("p2", "[10, 10, 50, 50]"))).unwrap();
    let pred = parse_predictions(&pred_file("CCO", 0.5)).unwrap();
    match align(&gt, &pred) {
        Err(CorpusError::PageMismatch { missing, unexpected }) => {
            assert_eq!(missing, vec!["p2".to_string()]);
            assert_eq!(unexpected, vec!["p1".to_string()]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn conversion_needs_known_ids() {
    let gt = parse_ground_truth(&gt_file(&gt_page("p1", "[10, 10, 50, 50]"))).unwrap();
    let pred = parse_predictions(&pred_file("CCO", 0.5).replace(r#""id": "m1""#, r#""id": "m7""#)).unwrap();
    let pages = align(&gt, &pred).unwrap();
    assert!(matches!(conversion_pairs(&pages), Err(CorpusError::UnknownMolecule { id, .. }) if id == "m7"));
}

#[test]
fn zero_page_fixture_is_an_empty_corpus() {
    let fx = generate_fixture(1, &params(0, Perturbation::none())).unwrap();
    let gt = parse_ground_truth(&fx.ground_truth_json()).unwrap();
    assert!(gt.pages.is_empty());
    assert_eq!(corpus_stats(&gt).n_molecules, 0);
}
