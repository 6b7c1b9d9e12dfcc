//! File-to-shard pipeline through the public API.

use std::collections::HashSet;
use std::io::Write;

use fsp_core::ingest::{interleave, read_article_corpus, read_flat_corpus, Article, IngestConfig, Source};
use fsp_core::par::Workers;
use fsp_core::sampler::{generate, Objective, SamplerConfig, Split, PAD};
use fsp_core::shard::{read_shard, write_shards, GenerateStats};

fn article_corpus(n: usize) -> Vec<Article> {
    (0..n)
        .map(|a| Article {
            article_id: format!("w{a}"),
            source: Source::ArticleCorpus,
            category: None,
            paragraphs: (0..5)
                .map(|p| format!("Item {a} part {p} begins here. Its body sentence {p} follows. A closing remark {a} ends it."))
                .collect(),
        })
        .collect()
}

#[test]
fn files_to_shards_and_back() {
    let dir = tempfile::tempdir().unwrap();
    let art_path = dir.path().join("articles.jsonl");
    let flat_path = dir.path().join("reviews.jsonl");
    let mut f = std::fs::File::create(&art_path).unwrap();
    for a in article_corpus(30) {
        let mut paras = a.paragraphs.clone();
        paras.push("An extra sixth paragraph. It is beyond the cap.".into());
        writeln!(f, "{}", serde_json::json!({"id": a.article_id, "title": "t", "paragraphs": paras})).unwrap();
    }
    writeln!(f, "{{broken").unwrap();
    let mut f = std::fs::File::create(&flat_path).unwrap();
    for i in 0..40 {
        let cat = if i % 2 == 0 { "Books" } else { "Toys" };
        writeln!(f, "{}", serde_json::json!({"category": cat, "text": format!("Review {i} is positive. It says more {i}.")})).unwrap();
    }

    let cfg = IngestConfig { max_samples_per_category: 15, ..Default::default() };
    let arts: Vec<_> = read_article_corpus(&art_path, &cfg).unwrap().collect();
    assert_eq!(arts.iter().filter(|r| r.is_err()).count(), 1);
    let arts: Vec<Article> = arts.into_iter().filter_map(Result::ok).collect();
    assert!(arts.iter().all(|a| a.paragraphs.len() == 5));
    let flat: Vec<Article> = read_flat_corpus(&flat_path, &cfg).unwrap().map(Result::unwrap).collect();
    assert_eq!(flat.len(), 30);

    let mixed = interleave(vec![arts, flat], &[30, 20], 4).unwrap();
    assert_eq!(mixed.articles.len(), 50);

    let scfg = SamplerConfig { seed: 4, validation_fraction: 0.2, ..Default::default() };
    let out = generate(&mixed.articles, &scfg, Workers(2)).unwrap();
    assert_eq!(out.filter.kept, 30 * 5 + 20);
    assert_eq!(out.tuning.len() + out.validation.len(), 170);

    for s in out.samples() {
        if s.positive_source.article_id.starts_with("reviews.jsonl") {
            assert!(s.is_hard.iter().all(|h| !h), "flat corpus samples never get hard negatives");
        }
    }

    let shard_dir = dir.path().join("out");
    std::fs::create_dir(&shard_dir).unwrap();
    let paths = write_shards(&shard_dir, Split::Tuning, &out.tuning, 50).unwrap();
    let back: Vec<_> = paths.iter().flat_map(|p| read_shard(p).unwrap()).collect();
    assert_eq!(back, out.tuning);

    let stats = GenerateStats::from_generated(&out, &scfg, mixed.articles.len(), 1);
    assert_eq!(stats.filter.total(), stats.paragraphs_seen);
    assert_eq!(stats.label_histogram.iter().sum::<usize>(), 170);
    assert_eq!(stats.j_histogram[0], 0);
}

#[test]
fn hard_negative_budget_sweep() {
    // Hard-negative counts 0, 1, 3, 5, 7, 9 with articles rich enough to fill them.
    let arts: Vec<Article> = (0..60)
        .map(|a| Article {
            article_id: format!("a{a}"),
            source: Source::ArticleCorpus,
            category: None,
            paragraphs: (0..12).map(|p| format!("Para {p} of article {a} starts. Then {p} continues.")).collect(),
        })
        .collect();
    for budget in [0usize, 1, 3, 5, 7, 9] {
        let cfg = SamplerConfig { hard_negatives: budget, seed: 1, ..Default::default() };
        let out = generate(&arts, &cfg, Workers::default()).unwrap();
        for s in out.samples() {
            assert_eq!(s.hard_count(), budget.min(s.j()), "budget {budget}, J {}", s.j());
            for (src, hard) in s.negative_sources.iter().zip(&s.is_hard) {
                assert_eq!(*hard, src.article_id == s.positive_source.article_id);
            }
        }
    }
}

#[test]
fn every_objective_yields_valid_samples() {
    let arts = article_corpus(50);
    for objective in Objective::ALL {
        let cfg = SamplerConfig { objective, seed: 3, ..Default::default() };
        let out = generate(&arts, &cfg, Workers::default()).unwrap();
        assert_eq!(out.tuning.len(), 250);
        for s in out.samples() {
            let pos = s.positive();
            assert_ne!(pos, PAD);
            assert!(!s.text.is_empty());
            assert!(!s.text.contains(pos), "{objective}: option leaked into text");
            let opts: Vec<_> = s.options.iter().filter(|o| o.as_str() != PAD).collect();
            assert_eq!(opts.len(), s.j() + 1);
            assert_eq!(opts.iter().filter(|o| o.as_str() == pos).count(), 1);
        }
        if objective == Objective::Lsp {
            assert!(out.tuning.iter().all(|s| s.positive().starts_with("A closing remark")));
        }
    }
}

#[test]
fn seed_changes_output_but_reruns_do_not() {
    let arts = article_corpus(40);
    let run = |seed| generate(&arts, &SamplerConfig { seed, ..Default::default() }, Workers::default()).unwrap().tuning;
    assert_eq!(run(1), run(1));
    assert_ne!(run(1), run(2));
}

#[test]
fn validation_uses_whole_articles() {
    let arts = article_corpus(200);
    let cfg = SamplerConfig { validation_fraction: 0.25, seed: 9, ..Default::default() };
    let out = generate(&arts, &cfg, Workers::default()).unwrap();
    let val: HashSet<_> = out.validation.iter().map(|s| s.positive_source.article_id.clone()).collect();
    let tun: HashSet<_> = out.tuning.iter().map(|s| s.positive_source.article_id.clone()).collect();
    assert!(val.is_disjoint(&tun));
    assert_eq!(out.validation.len() % 5, 0);
    let share = out.validation.len() as f64 / 1000.0;
    assert!((0.15..0.35).contains(&share), "{share}");
}
