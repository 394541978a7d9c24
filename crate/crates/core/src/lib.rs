//! Cognitive-network and emotion features for short stories, with the
//! statistics, classifiers, TreeSHAP explanations and LLM rating used to
//! study them.

pub mod conllu;
pub mod corpus;
pub mod emotions;
pub mod explain;
pub mod ml;
pub mod netfeat;
pub mod stats;
pub mod tfmn;

#[cfg(any(test, feature = "oracles"))]
pub mod oracles;
pub mod rater;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/corpus.md")]
mod book_corpus {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/networks.md")]
mod book_networks {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/emotions.md")]
mod book_emotions {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/features.md")]
mod book_features {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/statistics.md")]
mod book_statistics {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/models.md")]
mod book_models {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/explanations.md")]
mod book_explanations {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/rating.md")]
mod book_rating {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
