#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kws/g2p.hpp"

using namespace kws;

namespace {

std::vector<g2p::LexiconPair> identity_pairs() {
    return {{"ab", {"a", "b"}}, {"ba", {"b", "a"}}, {"a", {"a"}},
            {"b", {"b"}},       {"aba", {"a", "b", "a"}}};
}

}  // namespace

TEST_CASE("identity alignment concatenates back to the original pair") {
    auto aligned = g2p::align({{"ab", {"a", "b"}}});
    CHECK(aligned.skipped.empty());
    REQUIRE(aligned.sequences.size() == 1);
    std::string graphemes;
    PhonemeSeq phonemes;
    for (const auto& g : aligned.sequences[0]) {
        graphemes += g.graphemes;
        phonemes.insert(phonemes.end(), g.phonemes.begin(), g.phonemes.end());
    }
    CHECK(graphemes == "ab");
    CHECK(phonemes == PhonemeSeq{"a", "b"});
}

TEST_CASE("digraphs align to a single graphone") {
    auto aligned = g2p::align({{"sh", {"S"}}});
    REQUIRE(aligned.sequences.size() == 1);
    REQUIRE(aligned.sequences[0].size() == 1);
    CHECK(aligned.sequences[0][0].graphemes == "sh");
    CHECK(aligned.sequences[0][0].phonemes == PhonemeSeq{"S"});
}

TEST_CASE("unsegmentable pairs are skipped with a warning entry") {
    // One grapheme cannot carry three phonemes when p_max = 2.
    auto aligned = g2p::align({{"a", {"x", "y", "z"}}, {"ab", {"a", "b"}}});
    REQUIRE(aligned.skipped.size() == 1);
    CHECK(aligned.skipped[0] == "a");
    CHECK(aligned.sequences.size() == 1);
}

TEST_CASE("empty training set is rejected") {
    CHECK_THROWS_AS(g2p::align({}), Error);
}

TEST_CASE("EM log-likelihood is nondecreasing") {
    auto aligned = g2p::align(identity_pairs());
    REQUIRE(!aligned.iteration_loglik.empty());
    for (size_t i = 1; i < aligned.iteration_loglik.size(); ++i)
        CHECK(aligned.iteration_loglik[i] >= aligned.iteration_loglik[i - 1] - 1e-9);
}

TEST_CASE("trained model conditionals are normalized") {
    auto model = g2p::train(g2p::align(identity_pairs()), 3);
    std::vector<std::vector<int>> histories = {{}, {model.bos_id()}, {0}, {model.bos_id(), 0}};
    for (const auto& h : histories) {
        double sum = model.prob(model.eos_id(), h);
        for (size_t g = 0; g < model.inventory().size(); ++g)
            sum += model.prob(static_cast<int>(g), h);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("identity-trained model transcribes identically") {
    auto model = g2p::train(g2p::align(identity_pairs()), 3);
    CHECK(g2p::transcribe(model, "ab", 32).phonemes == PhonemeSeq{"a", "b"});
    CHECK(g2p::transcribe(model, "bab", 32).phonemes == PhonemeSeq{"b", "a", "b"});
}

TEST_CASE("context decides between competing graphones") {
    auto model =
        g2p::train(g2p::align({{"ti", {"tS", "i"}}, {"ta", {"t", "a"}}}), 2);
    CHECK(g2p::transcribe(model, "ti", 32).phonemes == PhonemeSeq{"tS", "i"});
    CHECK(g2p::transcribe(model, "ta", 32).phonemes == PhonemeSeq{"t", "a"});
}

TEST_CASE("unseen graphemes produce an untranscribable error") {
    auto model = g2p::train(g2p::align(identity_pairs()), 3);
    CHECK_THROWS_WITH_AS(g2p::transcribe(model, "ab9", 32),
                         doctest::Contains("untranscribable"), Error);
}

TEST_CASE("transcription log-probabilities are finite and nonpositive") {
    auto model = g2p::train(g2p::align(identity_pairs()), 3);
    auto t = g2p::transcribe(model, "ab", 32);
    CHECK(std::isfinite(t.logprob));
    CHECK(t.logprob <= 0.0);
}

TEST_CASE("augment_lexicon keeps existing entries and adds new ones") {
    auto model = g2p::train(g2p::align(identity_pairs()), 3);
    PronLexicon lex;
    lex.add("ab", {"x", "y"});  // deliberately different from the G2P output

    auto [aug, dropped] = g2p::augment_lexicon(lex, {"ab", "ba"}, model);
    CHECK(dropped.empty());
    CHECK(*aug.find("ab") == std::vector<PhonemeSeq>{{"x", "y"}});
    REQUIRE(aug.contains("ba"));
    CHECK(*aug.find("ba") == std::vector<PhonemeSeq>{{"b", "a"}});

    auto [same, dropped2] = g2p::augment_lexicon(lex, {"ab"}, model);
    CHECK(dropped2.empty());
    CHECK(same.entries == lex.entries);
}

TEST_CASE("untranscribable forms are dropped and logged during augmentation") {
    auto model = g2p::train(g2p::align(identity_pairs()), 3);
    PronLexicon lex;
    auto [aug, dropped] = g2p::augment_lexicon(lex, {"ab", "q9"}, model);
    CHECK(aug.contains("ab"));
    CHECK(!aug.contains("q9"));
    REQUIRE(dropped.size() == 1);
    CHECK(dropped[0].first == "q9");
}

TEST_CASE("g2p models round-trip through serialization") {
    auto model = g2p::train(g2p::align(identity_pairs()), 3);
    std::ostringstream os;
    g2p::save_model(model, os);
    std::istringstream in(os.str());
    auto loaded = g2p::load_model(in);
    CHECK(loaded.order() == model.order());
    for (const std::string w : {"ab", "ba", "aba"}) {
        auto a = g2p::transcribe(model, w, 32);
        auto b = g2p::transcribe(loaded, w, 32);
        CHECK(a.phonemes == b.phonemes);
        CHECK(a.logprob == doctest::Approx(b.logprob));
    }
}
