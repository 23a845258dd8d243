//! Learning graphs for subgraph containment.
//!
//! See the guide in `book/` for a walkthrough; its code blocks run as
//! doctests of this crate.

pub mod graph;
pub mod scalar;
pub mod learning;
pub mod lemmas;
pub mod rng;
pub mod optimizer;
pub mod constructions;
pub mod cli;

macro_rules! book_chapter {
    ($name:ident, $file:literal) => {
        #[cfg(doctest)]
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        pub mod $name {}
    };
}

book_chapter!(book_introduction, "introduction.md");
book_chapter!(book_learning_graphs, "learning-graphs.md");
book_chapter!(book_lemmas, "lemmas.md");
book_chapter!(book_constructions, "constructions.md");
book_chapter!(book_optimizer, "optimizer.md");
book_chapter!(book_cli, "cli.md");
