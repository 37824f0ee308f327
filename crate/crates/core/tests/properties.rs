use chemeval_core::detection::{f1, iou, BBox};
use chemeval_core::io::{parse_molfile, parse_smiles, write_molfile};
use proptest::prelude::*;

fn bbox() -> impl Strategy<Value = BBox> {
    (0.0..100.0f64, 0.0..100.0f64, 0.5..50.0f64, 0.5..50.0f64).prop_map(|(x, y, w, h)| BBox::new(x, y, x + w, y + h).unwrap())
}

proptest! {
    #[test]
    fn iou_is_symmetric_and_bounded(a in bbox(), b in bbox()) {
        let ab = iou(&a, &b);
        prop_assert_eq!(ab, iou(&b, &a));
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(iou(&a, &a), 1.0);
    }

    #[test]
    fn f1_lies_between_min_and_max(p in 0.0..=1.0f64, r in 0.0..=1.0f64) {
        let v = f1(p, r);
        prop_assert!(v <= p.max(r) + 1e-15);
        prop_assert!(v >= p.min(r) - 1e-15 || p.min(r) == 0.0);
        prop_assert_eq!(v, f1(r, p));
    }

    #[test]
    fn smiles_parser_never_panics(s in "[CNOcn0-9()=#@+\\-\\[\\]%.Hl:/\\\\]{0,24}") {
        let _ = parse_smiles(&s);
    }

    #[test]
    fn molfile_parser_never_panics(lines in proptest::collection::vec("[ 0-9A-Za-z.\\-]{0,70}", 0..12)) {
        let _ = parse_molfile(&lines.join("\n"));
    }

    #[test]
    fn molfile_parser_survives_single_byte_damage(pos in 0usize..400, byte in 32u8..127) {
        let mol = parse_smiles("c1ccccc1C(=O)[O-]").unwrap();
        let layout: Vec<[f64; 2]> = (0..mol.atom_count()).map(|i| [i as f64, (i % 2) as f64]).collect();
        let mut text = write_molfile(&mol, &layout).unwrap().into_bytes();
        let pos = pos % text.len();
        text[pos] = byte;
        let _ = parse_molfile(&String::from_utf8(text).unwrap());
    }
}
