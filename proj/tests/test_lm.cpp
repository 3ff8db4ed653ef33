#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kws/lm.hpp"

using namespace kws;

namespace {

double p(const lm::NGramLM& m, const std::string& w, const std::vector<std::string>& h) {
    return std::pow(10.0, m.logprob(w, h));
}

double vocab_sum(const lm::NGramLM& m, const std::vector<std::string>& h) {
    double s = 0.0;
    for (const auto& w : m.vocab())
        if (w != lm::kBos) s += p(m, w, h);
    for (const auto& w : m.unseen_pool()) s += p(m, w, h);
    return s;
}

}  // namespace

TEST_CASE("bigram Kneser-Ney matches the hand-computed toy corpus") {
    // Corpus "a b" / "a c", order 2, no reserved unknown mass.
    auto m = lm::NGramLM::train({{"a", "b"}, {"a", "c"}}, 2, 0.0);
    // p(b|a) = (2 - D)/4 ... with the count-of-count discounts this corpus
    // induces: 1/6 + gamma(a) * p_cont(b) = 1/6 + (2/3) * 0.22.
    CHECK(p(m, "b", {"a"}) == doctest::Approx(1.0 / 6.0 + (2.0 / 3.0) * 0.22).epsilon(1e-9));
    CHECK(p(m, "c", {"a"}) == doctest::Approx(p(m, "b", {"a"})).epsilon(1e-12));
    CHECK(p(m, "b", {}) == doctest::Approx(0.22).epsilon(1e-9));
    CHECK(p(m, lm::kEos, {}) == doctest::Approx(0.34).epsilon(1e-9));
    CHECK(vocab_sum(m, {"a"}) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(vocab_sum(m, {}) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("unigrams use continuation counts, not raw frequencies") {
    auto m = lm::NGramLM::train({{"a", "a"}, {"a", "b"}}, 1, 0.0);
    // Raw relative frequency of "a" would be 0.5; continuation-count KN
    // gives 0.2 + 0.44/3.
    CHECK(p(m, "a", {}) == doctest::Approx(0.2 + 0.44 / 3.0).epsilon(1e-9));
    CHECK(p(m, "a", {}) != doctest::Approx(0.5).epsilon(1e-3));
    CHECK(vocab_sum(m, {}) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a uniform unigram model has perplexity equal to vocabulary size") {
    std::string arpa =
        "\\data\\\n"
        "ngram 1=5\n"
        "\n"
        "\\1-grams:\n"
        "-99\t<s>\n"
        "-0.6020599913279624\t</s>\n"
        "-0.6020599913279624\ta\n"
        "-0.6020599913279624\tb\n"
        "-0.6020599913279624\tc\n"
        "\n"
        "\\end\\\n";
    std::istringstream in(arpa);
    auto m = lm::NGramLM::load_arpa(in);
    CHECK(m.perplexity({{"a", "b", "c"}}) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("training text scores better than vocabulary-reversed text") {
    std::vector<std::vector<std::string>> corpus;
    for (int i = 0; i < 20; ++i) corpus.push_back({"a", "b", "c"});
    corpus.push_back({"c", "a", "b"});
    auto m = lm::NGramLM::train(corpus, 2, 0.0);
    CHECK(m.perplexity({{"a", "b", "c"}}) < m.perplexity({{"c", "b", "a"}}));
}

TEST_CASE("empty corpus and undersized corpora are rejected") {
    CHECK_THROWS_AS(lm::NGramLM::train({}, 2, 0.0), Error);
    std::istringstream empty("");
    CHECK_THROWS_AS(lm::NGramLM::train_text(empty, 2, 0.0), Error);
    // Fewer distinct tokens than the order.
    CHECK_THROWS_AS(lm::NGramLM::train({{"a", "a", "a"}}, 4, 0.0), Error);
}

TEST_CASE("reserved sentence-boundary tokens cannot appear in training text") {
    CHECK_THROWS_AS(lm::NGramLM::train({{"a", "<s>", "b"}}, 2, 0.0), Error);
    CHECK_THROWS_AS(lm::NGramLM::train({{"a", "</s>"}}, 2, 0.0), Error);
}

TEST_CASE("registered unseen words share the reserved mass equally") {
    auto m = lm::NGramLM::train({{"a", "b"}, {"a", "c"}}, 2, 0.01);
    m.register_unseen({"u1", "u2"});
    m.register_unseen({"u1"});  // idempotent
    m.freeze();
    CHECK(m.unseen_pool() == std::set<std::string>{"u1", "u2"});
    CHECK(p(m, "u1", {}) == doctest::Approx(0.005).epsilon(1e-9));
    CHECK(p(m, "u2", {}) == doctest::Approx(p(m, "u1", {})).epsilon(1e-12));
    // Scorable in any context via backoff.
    CHECK(p(m, "u1", {"a"}) > 0.0);
    CHECK(vocab_sum(m, {}) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(vocab_sum(m, {"a"}) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("registering an in-vocabulary word is a no-op") {
    auto m = lm::NGramLM::train({{"a", "b"}}, 2, 0.01);
    double before = m.logprob("a", {});
    m.register_unseen({"a"});
    CHECK(m.unseen_pool().empty());
    CHECK(m.logprob("a", {}) == before);
}

TEST_CASE("unregistered unknown words are an error") {
    auto m = lm::NGramLM::train({{"a", "b"}}, 2, 0.01);
    CHECK_THROWS_AS(m.logprob("never-seen", {}), Error);
}

TEST_CASE("histories longer than order-1 are truncated from the left") {
    auto m = lm::NGramLM::train({{"a", "b", "c"}, {"b", "c", "a"}}, 2, 0.0);
    CHECK(m.logprob("c", {"a", "a", "b"}) == m.logprob("c", {"b"}));
}

TEST_CASE("ARPA serialization round-trips bit-exactly") {
    std::istringstream text("a b c\nb c a\nc a b\na b\n");
    auto m = lm::NGramLM::train_text(text, 3, 0.001);
    std::ostringstream first;
    m.save_arpa(first);
    std::istringstream in(first.str());
    auto loaded = lm::NGramLM::load_arpa(in);
    std::ostringstream second;
    loaded.save_arpa(second);
    CHECK(first.str() == second.str());
    CHECK(loaded.logprob("b", {"a"}) == doctest::Approx(m.logprob("b", {"a"})).epsilon(1e-12));
}

TEST_CASE("perplexity of empty text is an error") {
    auto m = lm::NGramLM::train({{"a", "b"}}, 2, 0.0);
    CHECK_THROWS_AS(m.perplexity({}), Error);
}

TEST_CASE("normalization holds at sampled histories of every length") {
    std::istringstream text("a b c d\nb c d a\nc d a b\nd a b c\na c b d\n");
    auto m = lm::NGramLM::train_text(text, 4, 0.001);
    m.register_unseen({"zz1", "zz2", "zz3"});
    m.freeze();
    std::vector<std::string> words(m.vocab().begin(), m.vocab().end());
    std::vector<std::vector<std::string>> histories = {{}};
    for (const auto& w1 : {"a", "b", "<s>"}) {
        histories.push_back({w1});
        for (const auto& w2 : {"c", "d"}) {
            histories.push_back({w1, w2});
            histories.push_back({w1, w2, "a"});
        }
    }
    for (const auto& h : histories)
        CHECK(vocab_sum(m, h) == doctest::Approx(1.0).epsilon(1e-6));
}
