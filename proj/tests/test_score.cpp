#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "kws/score.hpp"

using namespace kws;

namespace {

evalset::EvalSet one_lexeme_refs(const std::vector<double>& starts, double total_seconds) {
    evalset::EvalSet es;
    es.total_speech_seconds = total_seconds;
    evalset::EvalLexeme lex;
    lex.lexeme_id = "L";
    lex.lemma = "l";
    lex.surviving_forms = {"l"};
    for (double s : starts) lex.references.push_back({"u1", s, 0.4, "l"});
    es.lexemes.push_back(lex);
    return es;
}

std::map<std::string, kwsindex::KeywordResultSet> hits_for(
    const std::string& id, const std::vector<std::pair<double, double>>& start_score) {
    kwsindex::KeywordResultSet rs;
    rs.lexeme_id = id;
    for (auto [start, score] : start_score) rs.hits.push_back({"u1", start, 0.4, score, "l"});
    std::map<std::string, kwsindex::KeywordResultSet> out;
    out[id] = rs;
    return out;
}

}  // namespace

TEST_CASE("a hit exactly at the reference time is correct") {
    auto es = one_lexeme_refs({10.0}, 1000.0);
    auto scores = score::align_hits(hits_for("L", {{10.0, 0.9}}), es, 0.5);
    REQUIRE(scores.size() == 1);
    REQUIRE(scores[0].hits.size() == 1);
    CHECK(scores[0].hits[0].is_correct);
}

TEST_CASE("greedy matching gives the reference to the higher-scoring hit") {
    auto es = one_lexeme_refs({10.0}, 1000.0);
    auto scores = score::align_hits(hits_for("L", {{10.0, 0.6}, {10.1, 0.9}}), es, 0.5);
    REQUIRE(scores[0].hits.size() == 2);
    // Hits are stored score-descending after alignment.
    CHECK(scores[0].hits[0].score == doctest::Approx(0.9));
    CHECK(scores[0].hits[0].is_correct);
    CHECK(!scores[0].hits[1].is_correct);
}

TEST_CASE("a hit far from any reference is a false alarm") {
    auto es = one_lexeme_refs({10.0}, 1000.0);
    auto scores = score::align_hits(hits_for("L", {{20.0, 0.9}}), es, 0.5);
    CHECK(!scores[0].hits[0].is_correct);
}

TEST_CASE("the plug-in hand case evaluates to -0.50190") {
    // n_true = 2, one correct hit and one false alarm accepted,
    // T = 1000 s, beta = 999.9:
    // 1 - [0.5 + 999.9 * (1 / 998)] = -0.5019038...
    auto es = one_lexeme_refs({10.0, 20.0}, 1000.0);
    auto scores = score::align_hits(hits_for("L", {{10.0, 0.9}, {500.0, 0.8}}), es, 0.5);
    double v = score::twv_at(scores, 0.5, 999.9, 1000.0);
    CHECK(v == doctest::Approx(1.0 - 0.5 - 999.9 / 998.0).epsilon(1e-12));
    CHECK(v == doctest::Approx(-0.5019038077).epsilon(1e-9));
}

TEST_CASE("a perfect system scores 1 and reject-all scores 0") {
    auto es = one_lexeme_refs({10.0, 20.0}, 1000.0);
    auto perfect = score::align_hits(hits_for("L", {{10.0, 0.9}, {20.0, 0.8}}), es, 0.5);
    CHECK(score::twv_at(perfect, 0.0, 999.9, 1000.0) == doctest::Approx(1.0));
    // Threshold above every hit score accepts nothing.
    CHECK(score::twv_at(perfect, 1.0, 999.9, 1000.0) == doctest::Approx(0.0));
}

TEST_CASE("the automatic threshold dominates any fixed threshold") {
    auto es = one_lexeme_refs({10.0, 20.0}, 1000.0);
    auto scores =
        score::align_hits(hits_for("L", {{10.0, 0.9}, {500.0, 0.8}, {20.0, 0.7}}), es, 0.5);
    auto [best, theta] = score::atwv(scores, std::nullopt, 999.9, 1000.0);
    for (double t : {0.0, 0.5, 0.7, 0.8, 0.9, 1.0})
        CHECK(best >= score::twv_at(scores, t, 999.9, 1000.0) - 1e-12);
    CHECK(best == doctest::Approx(score::twv_at(scores, theta, 999.9, 1000.0)));
}

TEST_CASE("single-lexeme OTWV equals the automatic-threshold ATWV") {
    auto es = one_lexeme_refs({10.0, 20.0}, 1000.0);
    auto scores =
        score::align_hits(hits_for("L", {{10.0, 0.9}, {500.0, 0.8}, {20.0, 0.7}}), es, 0.5);
    auto [a, theta] = score::atwv(scores, std::nullopt, 999.9, 1000.0);
    CHECK(score::otwv(scores, 999.9, 1000.0) == doctest::Approx(a));
}

TEST_CASE("STWV counts lattice recall only") {
    auto es = one_lexeme_refs({10.0, 20.0}, 1000.0);
    // One of two references covered, plus a false alarm STWV must ignore.
    auto scores = score::align_hits(hits_for("L", {{10.0, 0.2}, {500.0, 0.9}}), es, 0.5);
    CHECK(score::stwv(scores) == doctest::Approx(0.5));
    auto none = score::align_hits({}, es, 0.5);
    CHECK(score::stwv(none) == doctest::Approx(0.0));
}

TEST_CASE("metrics are ordered STWV >= OTWV >= ATWV on random instances") {
    std::mt19937 rng(2026);
    std::uniform_real_distribution<double> unit(0.01, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        size_t n_refs = 1 + rng() % 4;
        std::vector<double> starts;
        for (size_t i = 0; i < n_refs; ++i) starts.push_back(10.0 * double(i + 1));
        auto es = one_lexeme_refs(starts, 500.0);
        std::vector<std::pair<double, double>> hs;
        size_t n_hits = rng() % 8;
        for (size_t i = 0; i < n_hits; ++i) {
            double start = (rng() % 2) ? starts[rng() % n_refs] : 200.0 + 7.0 * double(i);
            hs.push_back({start, unit(rng)});
        }
        auto scores = score::align_hits(hits_for("L", hs), es, 0.5);
        auto [a, theta] = score::atwv(scores, std::nullopt, 999.9, 500.0);
        double o = score::otwv(scores, 999.9, 500.0);
        double s = score::stwv(scores);
        CHECK(s >= o - 1e-12);
        CHECK(o >= a - 1e-12);
    }
}

TEST_CASE("decisions are invariant under monotone score transforms") {
    auto es = one_lexeme_refs({10.0, 20.0}, 1000.0);
    auto scores =
        score::align_hits(hits_for("L", {{10.0, 0.9}, {500.0, 0.4}, {20.0, 0.6}}), es, 0.5);
    auto squared = scores;
    for (auto& ls : squared)
        for (auto& h : ls.hits) h.score = h.score * h.score;
    CHECK(score::otwv(squared, 999.9, 1000.0) ==
          doctest::Approx(score::otwv(scores, 999.9, 1000.0)));
    CHECK(score::stwv(squared) == doctest::Approx(score::stwv(scores)));
    auto [a1, t1] = score::atwv(scores, std::nullopt, 999.9, 1000.0);
    auto [a2, t2] = score::atwv(squared, std::nullopt, 999.9, 1000.0);
    CHECK(a1 == doctest::Approx(a2));
    CHECK(t2 == doctest::Approx(t1 * t1));
}

TEST_CASE("removing a false alarm never hurts; removing a correct hit never helps STWV") {
    auto es = one_lexeme_refs({10.0, 20.0}, 1000.0);
    auto with_fa =
        score::align_hits(hits_for("L", {{10.0, 0.9}, {20.0, 0.8}, {500.0, 0.85}}), es, 0.5);
    auto without_fa = score::align_hits(hits_for("L", {{10.0, 0.9}, {20.0, 0.8}}), es, 0.5);
    auto [a1, t1] = score::atwv(with_fa, std::nullopt, 999.9, 1000.0);
    auto [a2, t2] = score::atwv(without_fa, std::nullopt, 999.9, 1000.0);
    CHECK(a2 >= a1 - 1e-12);
    CHECK(score::otwv(without_fa, 999.9, 1000.0) >= score::otwv(with_fa, 999.9, 1000.0) - 1e-12);
    CHECK(score::stwv(without_fa) >= score::stwv(with_fa) - 1e-12);

    auto fewer_correct = score::align_hits(hits_for("L", {{10.0, 0.9}}), es, 0.5);
    CHECK(score::stwv(fewer_correct) <= score::stwv(without_fa) + 1e-12);
}

TEST_CASE("out-of-range thresholds are rejected") {
    auto es = one_lexeme_refs({10.0}, 1000.0);
    auto scores = score::align_hits(hits_for("L", {{10.0, 0.9}}), es, 0.5);
    CHECK_THROWS_AS(score::twv_at(scores, -0.1, 999.9, 1000.0), Error);
    CHECK_THROWS_AS(score::twv_at(scores, 1.1, 999.9, 1000.0), Error);
}

TEST_CASE("evaluate emits a complete report with CSV and JSON") {
    auto es = one_lexeme_refs({10.0, 20.0}, 1000.0);
    auto results = hits_for("L", {{10.0, 0.9}, {500.0, 0.3}});
    score::ScoringConfig cfg;
    auto report = score::evaluate(results, es, cfg);
    CHECK(report.stwv >= report.otwv - 1e-12);
    CHECK(report.otwv >= report.atwv - 1e-12);
    REQUIRE(report.lexemes.size() == 1);
    CHECK(report.lexemes[0].n_true == 2);

    std::ostringstream csv, json;
    score::save_report_csv(report, csv);
    score::save_report_json(report, json);
    CHECK(csv.str().find("lexeme_id,n_true,n_correct,n_fa,best_theta,twv") == 0);
    CHECK(csv.str().find("L,2,") != std::string::npos);
    CHECK(json.str().find("\"atwv\"") != std::string::npos);
    CHECK(json.str().find("\"total_speech_seconds\"") != std::string::npos);
}

TEST_CASE("scoring configuration is validated") {
    score::ScoringConfig cfg;
    cfg.beta = -1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.time_tolerance = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.theta = 1.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    CHECK_NOTHROW(cfg.validate());
}
