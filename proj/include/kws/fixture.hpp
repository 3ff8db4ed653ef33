#ifndef KWS_FIXTURE_HPP
#define KWS_FIXTURE_HPP

#include <cstdint>
#include <string>

namespace kws::fixture {

// Deterministic synthetic corpus bundle: a suffixing toy morphology, a
// rule-based orthography->phonology map, sampled transcripts, LM texts
// and inflection training pairs. Same seed => byte-identical files.
struct FixtureParams {
    std::uint64_t seed = 7;
    std::size_t keyword_stems = 30;
    std::size_t filler_stems = 250;
    std::size_t filler_forms_per_stem = 5;
    std::size_t utterances = 500;
    std::size_t min_words = 4;
    std::size_t max_words = 8;
    std::size_t lm_sentences = 2500;
    std::size_t bible_sentences = 2500;
    std::size_t heldout_sentences = 200;
    std::size_t decoys_per_bundle = 120;
    std::size_t g2p_heldout_words = 120;
};

// Writes unimorph.tsv, lexicon.tsv, transcript.ctm, lm_train.txt,
// lm_bible.txt, lm_heldout.txt, pairs_clean.tsv, pairs_noisy.tsv,
// g2p_heldout.tsv and paper_shape.cfg under dir.
void make_fixture(const std::string& dir, const FixtureParams& params = {});

}  // namespace kws::fixture

#endif
