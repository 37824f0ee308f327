//! End-to-end acceptance checks. Runs without the libtest harness so that
//! each criterion prints one PASS/FAIL line; exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use chemeval_core::chem::{canonical_key, isomorphic, key_of, normalize};
use chemeval_core::combined::combined_counts;
use chemeval_core::corpus::random::{mutate, random_layout, random_molecule};
use chemeval_core::detection::{coco_ap, coco_ar, f1, BBox, PageDetections, ScoredBox};
use chemeval_core::io::{parse_molfile, parse_smiles, write_molfile, write_smiles};
use chemeval_core::reaction::{hard_match, soft_match, MatchMode};
use chemeval_oracle::cases::{entity_pool, keys, perturb, random_corpus, random_page, random_reaction};
use chemeval_oracle::{oracle_ap, oracle_combined, oracle_reaction_match};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn chemeval(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_chemeval"))
        .args(args)
        .env_remove("CHEMEVAL_LOG")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("chemeval {args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn report(args: &[&str]) -> Result<Value, String> {
    serde_json::from_slice(&chemeval(args)?).map_err(|e| e.to_string())
}

fn s(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

/// Runs gen-fixture into `dir/name`; returns (gt, pred, expected).
fn fixture(dir: &Path, name: &str, seed: u64, extra: &[&str]) -> Result<(PathBuf, PathBuf, Value), String> {
    let out = dir.join(name);
    let seed = seed.to_string();
    let mut args = vec!["gen-fixture", "--seed", &seed, "--out", s(&out)];
    args.extend_from_slice(extra);
    chemeval(&args)?;
    let expected = std::fs::read_to_string(out.join("expected.json")).map_err(|e| e.to_string())?;
    let expected = serde_json::from_str(&expected).map_err(|e| e.to_string())?;
    Ok((out.join("gt.json"), out.join("pred.json"), expected))
}

fn f1_arithmetic() -> Outcome {
    // (precision or AP, recall or AR, reported F1)
    let rows = [(0.914, 0.938, 0.926), (0.891, 0.930, 0.910), (0.895, 0.887, 0.891)];
    let mut shown = Vec::new();
    for (p, r, want) in rows {
        let got = f1(p, r);
        ensure((got - want).abs() <= 0.0005, || format!("f1({p}, {r}) = {got:.6}, expected {want}"))?;
        shown.push(format!("f1({p}, {r}) = {got:.4}"));
    }
    Ok(shown.join("; "))
}

fn canonicalization() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0usize;
    for _ in 0..200 {
        let mol = random_molecule(&mut rng, 30);
        let key = key_of(&mol).map_err(|e| e.to_string())?;
        let mut perm: Vec<usize> = (0..mol.atom_count()).collect();
        for _ in 0..1000 {
            perm.shuffle(&mut rng);
            let other = key_of(&mol.permuted(&perm)).map_err(|e| e.to_string())?;
            ensure(other == key, || format!("permutation changed key {key:?} to {other:?}"))?;
            checked += 1;
        }
    }
    let (mut same, mut differ) = (0, 0);
    for i in 0..600 {
        let a = random_molecule(&mut rng, 30);
        let b = match i % 3 {
            0 => {
                let mut perm: Vec<usize> = (0..a.atom_count()).collect();
                perm.shuffle(&mut rng);
                a.permuted(&perm)
            }
            1 => mutate(&mut rng, &a),
            _ => random_molecule(&mut rng, a.atom_count()),
        };
        let (na, nb) = (normalize(&a).map_err(|e| e.to_string())?, normalize(&b).map_err(|e| e.to_string())?);
        let iso = isomorphic(&na, &nb).map_err(|e| e.to_string())?;
        let eq = canonical_key(&na) == canonical_key(&nb);
        ensure(iso == eq, || format!("key equality {eq} but isomorphism {iso} for {:?} / {:?}", canonical_key(&na), canonical_key(&nb)))?;
        if iso {
            same += 1;
        } else {
            differ += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1}s, target is 30s"))?;
    Ok(format!("{checked} permutations, 600 pairs ({same} isomorphic, {differ} not), {secs:.1}s"))
}

fn round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mol = random_molecule(&mut rng, 30);
        let key = key_of(&mol).map_err(|e| e.to_string())?;
        let layout = random_layout(&mut rng, mol.atom_count());
        let text = write_molfile(&mol, &layout).map_err(|e| e.to_string())?;
        let doc = parse_molfile(&text).map_err(|e| e.to_string())?;
        ensure(key_of(&doc.body).ok() == Some(key.clone()), || format!("MOLfile changed {key:?}"))?;
        for (got, want) in doc.layout().iter().zip(&layout) {
            worst = worst.max((got[0] - want[0]).abs()).max((got[1] - want[1]).abs());
        }
        let smiles = write_smiles(&normalize(&mol).map_err(|e| e.to_string())?);
        let back = parse_smiles(&smiles).map_err(|e| format!("{smiles}: {e}"))?;
        ensure(key_of(&back).ok() == Some(key.clone()), || format!("SMILES changed {key:?}"))?;
    }
    ensure(worst <= 1e-3, || format!("coordinate drift {worst}"))?;
    Ok(format!("1000 molecules through both formats, max coordinate drift {worst:.1e}"))
}

fn combined_metric(dir: &Path) -> Outcome {
    let pool = keys();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..500 {
        let page = random_page(&mut rng, &pool);
        let tau = [0.3, 0.5, 0.75][case % 3];
        let got = combined_counts(&page.gt, &page.pred, tau).map_err(|e| e.to_string())?;
        let want = oracle_combined(&page.gt, &page.pred, tau).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("page {case}: {got:?} vs oracle {want:?}"))?;
    }
    let poles: [(&str, &[&str]); 3] = [
        ("perfect", &["--pages", "20"]),
        ("corrupted", &["--pages", "20", "--corruption", "1"]),
        (
            "noisy",
            &["--pages", "20", "--jitter", "0.3", "--corruption", "0.3", "--drop", "0.1", "--spurious", "0.05"],
        ),
    ];
    let mut prfs = Vec::new();
    for (name, flags) in poles {
        let (gt, pred, expected) = fixture(dir, name, 41, flags)?;
        let r = report(&["combined", "--gt", s(&gt), "--pred", s(&pred)])?;
        let o = &r["overall"];
        for k in ["tp", "fp", "fn"] {
            ensure(o[k] == expected["combined"][k], || format!("{name}: {k} {} vs generator {}", o[k], expected["combined"][k]))?;
        }
        let (p, rc, f) = (o["precision"].as_f64(), o["recall"].as_f64(), o["f1"].as_f64());
        match name {
            "perfect" => ensure((p, rc, f) == (Some(1.0), Some(1.0), Some(1.0)), || format!("perfect: {o}"))?,
            "corrupted" => ensure((p, rc) == (Some(0.0), Some(0.0)), || format!("corrupted: {o}"))?,
            _ => {}
        }
        prfs.push(format!("{name} F1={:.3}", f.unwrap_or(f64::NAN)));
    }
    Ok(format!("500 random pages equal the oracle; fixtures exact ({})", prfs.join(", ")))
}

fn coco() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut compared = 0;
    let mut worst = 0.0f64;
    while compared < 500 {
        let corpus = random_corpus(&mut rng);
        let Some(want) = oracle_ap(&corpus).map_err(|e| e.to_string())? else {
            continue;
        };
        let got = coco_ap(&corpus).map_err(|e| e.to_string())?;
        worst = worst.max((got - want).abs());
        ensure((got - want).abs() <= 1e-12, || format!("AP {got} vs oracle {want}"))?;
        compared += 1;
    }
    let gt = BBox::new(0.0, 0.0, 10.0, 10.0).map_err(|e| e.to_string())?;
    let pred = ScoredBox::new(BBox::new(0.0, 0.0, 10.0, 6.0).map_err(|e| e.to_string())?, 0.9).ok_or("score")?;
    let single = [PageDetections {
        preds: vec![pred],
        gts: vec![gt],
    }];
    let (ap, ar) = (coco_ap(&single).map_err(|e| e.to_string())?, coco_ar(&single).map_err(|e| e.to_string())?);
    ensure(ap == 0.3 && ar == 0.3, || format!("IoU-0.60 case gave AP={ap}, AR={ar}"))?;
    Ok(format!("{compared} corpora, max |AP - oracle| = {worst:.1e}; IoU-0.60 case AP=AR=0.3"))
}

fn reactions(dir: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    let mut disagreements = 0;
    let cases = 2000;
    for _ in 0..cases {
        let pool = entity_pool(&mut rng);
        let g = random_reaction(&mut rng, &pool);
        let p = if rng.random_bool(0.2) { random_reaction(&mut rng, &pool) } else { perturb(&mut rng, &g, &pool) };
        if hard_match(&g, &p) && !soft_match(&g, &p) {
            violations += 1;
        }
        for mode in [MatchMode::Soft, MatchMode::Hard] {
            if oracle_reaction_match(&g, &p, mode).map_err(|e| e.to_string())? != mode.matches(&g, &p) {
                disagreements += 1;
            }
        }
    }
    ensure(violations == 0, || format!("{violations} hard-but-not-soft cases"))?;
    ensure(disagreements == 0, || format!("{disagreements} disagreements with permutation search"))?;

    let (gt, pred, _) = fixture(dir, "roles", 61, &["--pages", "30", "--reactions-min", "1", "--role-errors", "1"])?;
    let r = report(&["reactions", "--gt", s(&gt), "--pred", s(&pred), "--mode", "both"])?;
    let (soft, hard) = (r["overall"]["soft"]["f1"].as_f64(), r["overall"]["hard"]["f1"].as_f64());
    ensure(soft == Some(1.0) && hard == Some(0.0), || format!("role-swap corpus: soft {soft:?}, hard {hard:?}"))?;
    Ok(format!(
        "{cases} pairs: 0 violations, matcher equals permutation search; role-swap corpus ({} reactions) soft F1=1, hard F1=0",
        r["overall"]["soft"]["n_gt"]
    ))
}

fn determinism(dir: &Path) -> Outcome {
    let flags = ["--pages", "15", "--jitter", "0.2", "--corruption", "0.2", "--spurious", "0.05", "--role-errors", "0.3"];
    let (gt, pred, _) = fixture(dir, "det-a", 71, &flags)?;
    fixture(dir, "det-b", 71, &flags)?;
    for name in ["gt.json", "pred.json", "expected.json"] {
        let a = std::fs::read(dir.join("det-a").join(name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(dir.join("det-b").join(name)).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("gen-fixture wrote different {name} for the same seed"))?;
    }
    let (gt, pred) = (s(&gt), s(&pred));
    let mut runs = 0;
    let commands: [&[&str]; 6] = [
        &["detect", "--gt", gt, "--pred", pred],
        &["convert", "--gt", gt, "--pred", pred],
        &["combined", "--gt", gt, "--pred", pred],
        &["reactions", "--gt", gt, "--pred", pred],
        &["stats", "--gt", gt],
        &["stats", "--gt", gt, "--format", "table"],
    ];
    for cmd in commands {
        for format in [None, Some("csv")] {
            if format.is_some() && cmd.contains(&"--format") {
                continue;
            }
            let mut args = cmd.to_vec();
            if let Some(f) = format {
                args.extend(["--format", f]);
            }
            let first = chemeval(&args)?;
            let second = chemeval(&args)?;
            ensure(first == second, || format!("{args:?} differs between runs"))?;
            runs += 1;
        }
    }
    Ok(format!("gen-fixture and {runs} report variants byte-identical across runs"))
}

fn throughput(dir: &Path) -> Outcome {
    let common = [
        "--molecules-min", "4", "--molecules-max", "10", "--reactions-min", "2", "--reactions-max", "4",
        "--max-atoms", "30", "--jitter", "0.15", "--corruption", "0.1", "--drop", "0.05", "--spurious", "0.02",
        "--role-errors", "0.15",
    ];
    let mut patents = vec!["--pages", "300", "--dataset", "Patents"];
    patents.extend(common);
    let mut articles = vec!["--pages", "250", "--dataset", "Articles"];
    articles.extend(common);
    let (g1, p1, _) = fixture(dir, "patents", 81, &patents)?;
    let (g2, p2, _) = fixture(dir, "articles", 82, &articles)?;
    let stats = report(&["stats", "--gt", s(&g1), "--gt", s(&g2)])?;
    let total = |k: &str| -> u64 { stats["datasets"].as_array().map_or(0, |a| a.iter().filter_map(|d| d[k].as_u64()).sum()) };
    let (pages, mols, rxns) = (total("n_pages"), total("n_molecules"), total("n_reactions"));
    ensure(pages == 550, || format!("{pages} pages"))?;
    ensure((3500..=4300).contains(&mols), || format!("{mols} molecules, want about 3,900"))?;
    ensure((800..=1200).contains(&rxns), || format!("{rxns} reactions, want about 1,000"))?;

    let inputs = ["--gt", s(&g1), "--pred", s(&p1), "--gt", s(&g2), "--pred", s(&p2)];
    let start = Instant::now();
    for cmd in ["detect", "combined", "reactions"] {
        let mut args = vec![cmd];
        args.extend(inputs);
        chemeval(&args)?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("detect + combined + reactions took {secs:.2}s"))?;
    Ok(format!("{pages} pages, {mols} molecules, {rxns} reactions: detect + combined + reactions in {secs:.2}s"))
}

fn main() {
    let dir = TempDir::new().expect("temp dir");
    let d = dir.path();
    let criteria: Vec<Criterion> = vec![
        ("F1 arithmetic", Box::new(f1_arithmetic)),
        ("canonicalization soundness", Box::new(canonicalization)),
        ("format round trips", Box::new(round_trips)),
        ("combined metric", Box::new(|| combined_metric(d))),
        ("COCO AP/AR", Box::new(coco)),
        ("reaction metrics", Box::new(|| reactions(d))),
        ("determinism", Box::new(|| determinism(d))),
        ("throughput", Box::new(|| throughput(d))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS [{secs:.1}s] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL [{secs:.1}s] {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
