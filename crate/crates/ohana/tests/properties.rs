//! Seeded property suites for reduction, substitution and approximants.

mod common;

use common::props;

#[test]
fn strong_confluence() {
    props::strong_confluence().unwrap();
}

#[test]
fn sum_size_decreases() {
    props::sum_size_decreases().unwrap();
}

#[test]
fn resource_substitution_matches_permutations() {
    props::resource_substitution_matches_permutations().unwrap();
}

#[test]
fn substitution_lemma() {
    props::substitution_lemma().unwrap();
}

#[test]
fn beta_preserves_lambda_i_and_free_variables() {
    props::beta_preserves_lambda_i_and_free_variables().unwrap();
}

#[test]
fn direct_approximants_are_monotone() {
    props::direct_approximants_are_monotone().unwrap();
}

#[test]
fn approximants_form_an_ideal() {
    props::approximants_form_an_ideal().unwrap();
}

#[test]
fn approximants_are_beta_invariant() {
    props::approximants_are_beta_invariant().unwrap();
}
