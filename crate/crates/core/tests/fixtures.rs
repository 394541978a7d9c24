//! Committed fixtures stay in sync with the code that reads or generates them.
//! Set `STORYNET_BLESS=1` to rewrite generated fixtures.

use std::path::{Path, PathBuf};

use storynet::conllu::load_parsed_story;
use storynet::corpus::{class_histogram, load_corpus, rating_histograms, AuthorKind, CorpusFormat, RatingScheme};
use storynet::emotions::{emotion_profile, Emotion, EmotionLexicon, NullModelConfig};
use storynet::ml::synthetic;
use storynet::netfeat::{featurize, format_float, NetFeatConfig};
use storynet::tfmn::{AntonymLexicon, NetworkBuilder, StopList, TfmnConfig};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn blobs_csv() -> String {
    let (x, y) = synthetic::blobs(300, 7);
    let mut s = String::from("x0,x1,label\n");
    for (r, k) in x.iter().zip(&y) {
        s.push_str(&format!("{},{},{k}\n", format_float(r[0]), format_float(r[1])));
    }
    s
}

#[test]
fn blobs_fixture_matches_generator() {
    let path = fixtures().join("ml/blobs.csv");
    let want = blobs_csv();
    if std::env::var_os("STORYNET_BLESS").is_some() {
        std::fs::write(&path, &want).unwrap();
    }
    let got = std::fs::read_to_string(&path).expect("fixtures/ml/blobs.csv (bless with STORYNET_BLESS=1)");
    assert_eq!(got, want);
}

#[test]
fn story_corpus_has_known_ratings() {
    let corpus = load_corpus(fixtures().join("corpus/stories.csv"), CorpusFormat::Csv).unwrap();
    assert_eq!(corpus.len(), 40);
    assert_eq!(corpus.iter().filter(|s| s.author_kind == AuthorKind::Human).count(), 20);
    let mut totals = [0usize; 5];
    for (_, h) in rating_histograms(&corpus) {
        for (t, c) in totals.iter_mut().zip(h) {
            *t += c;
        }
    }
    assert_eq!(totals, [11, 22, 65, 37, 25]);
    assert_eq!(class_histogram(&corpus, RatingScheme::HumanScale).unwrap(), [33, 65, 62]);
    assert!(corpus.iter().filter(|s| s.author_kind == AuthorKind::Llm).all(|s| s.ratings.iter().all(|r| r.score >= 3)));
}

#[test]
fn toy_lexicon_priors_are_one_eighth() {
    let lex = EmotionLexicon::load(&fixtures().join("lexicon/toy_emotions.tsv")).unwrap();
    assert_eq!(lex.len(), 40);
    for e in Emotion::ALL {
        assert!((lex.prior(e) - 0.125).abs() < 1e-15, "{e:?}");
    }
}

#[test]
fn every_fixture_story_featurizes() {
    let corpus = load_corpus(fixtures().join("corpus/stories.csv"), CorpusFormat::Csv).unwrap();
    let lex = EmotionLexicon::load(&fixtures().join("lexicon/toy_emotions.tsv")).unwrap();
    let valence = lex.valence_map();
    let stop = StopList::english();
    let ant = AntonymLexicon::english();
    let builder = NetworkBuilder { stoplist: &stop, antonyms: &ant, valence: &valence, config: TfmnConfig::default() };
    let mut negations = 0;
    for s in &corpus {
        let parsed = load_parsed_story(&fixtures().join("corpus/conllu"), &s.id).unwrap();
        let net = builder.build(&parsed);
        assert!(net.tfmn.node_count() > 3, "{}", s.id);
        negations += net.diagnostics.negations_resolved;
        let profile = emotion_profile(&net.lemmas, &lex, &NullModelConfig::default().for_story(&s.id));
        let v = featurize(&s.id, &net.tfmn, &profile, &NetFeatConfig::default()).unwrap();
        assert!(v.values.iter().all(|x| x.is_finite()), "{}", s.id);
    }
    assert!(negations > 0);
}
