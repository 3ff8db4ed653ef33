#include <doctest.h>

#include <sstream>

#include "kws/corpus.hpp"
#include "kws/evalset.hpp"

using namespace kws;

namespace {

Paradigm make_paradigm(const std::string& id, const std::string& lemma,
                       const std::set<std::string>& forms) {
    Paradigm p;
    p.lexeme_id = id;
    p.lemma = lemma;
    p.entries[MorphBundle::parse("X")] = forms;
    return p;
}

Transcript make_transcript(const std::vector<std::string>& words) {
    std::ostringstream os;
    double t = 0.0;
    for (const auto& w : words) {
        os << "u1 1 " << t << " 0.4 " << w << "\n";
        t += 0.5;
    }
    std::istringstream in(os.str());
    return corpus::load_transcript(in);
}

PronLexicon make_lexicon(const std::vector<std::string>& words) {
    PronLexicon lex;
    for (const auto& w : words) lex.add(w, {w});
    return lex;
}

}  // namespace

TEST_CASE("ambiguous forms are excluded before the lexicon filter") {
    // Paradigm A has {x,y}, paradigm B has {y}; both x and y are spoken and
    // in the lexicon. y is shared, so it is dropped and B disappears.
    std::vector<Paradigm> ps = {make_paradigm("A", "x", {"x", "y"}),
                                make_paradigm("B", "y", {"y"})};
    auto es = evalset::build_eval_set(ps, make_transcript({"x", "y"}), make_lexicon({"x", "y"}));
    REQUIRE(es.lexemes.size() == 1);
    CHECK(es.lexemes[0].lexeme_id == "A");
    CHECK(es.lexemes[0].surviving_forms == std::set<std::string>{"x"});
    REQUIRE(es.exclusion_log.size() == 1);
    CHECK(es.exclusion_log[0] == evalset::Exclusion{"y", "ambiguous"});
}

TEST_CASE("forms missing from the lexicon are excluded as oov-lexicon") {
    std::vector<Paradigm> ps = {make_paradigm("A", "x", {"x", "z"})};
    auto es = evalset::build_eval_set(ps, make_transcript({"x", "z"}), make_lexicon({"x"}));
    REQUIRE(es.lexemes.size() == 1);
    CHECK(es.lexemes[0].surviving_forms == std::set<std::string>{"x"});
    REQUIRE(es.exclusion_log.size() == 1);
    CHECK(es.exclusion_log[0] == evalset::Exclusion{"z", "oov-lexicon"});
}

TEST_CASE("empty transcript yields an empty eval set") {
    std::vector<Paradigm> ps = {make_paradigm("A", "x", {"x"})};
    Transcript t;
    auto es = evalset::build_eval_set(ps, t, make_lexicon({"x"}));
    CHECK(es.lexemes.empty());
}

TEST_CASE("references carry times and forms from the transcript") {
    std::vector<Paradigm> ps = {make_paradigm("A", "x", {"x", "w"})};
    auto es =
        evalset::build_eval_set(ps, make_transcript({"x", "q", "x"}), make_lexicon({"x", "q"}));
    REQUIRE(es.lexemes.size() == 1);
    const auto& refs = es.lexemes[0].references;
    REQUIRE(refs.size() == 2);
    CHECK(refs[0].start == doctest::Approx(0.0));
    CHECK(refs[1].start == doctest::Approx(1.0));
    CHECK(refs[0].form == "x");
    CHECK(es.total_speech_seconds == doctest::Approx(1.4));
}

TEST_CASE("candidate forms are conserved between survivors and exclusions") {
    std::vector<Paradigm> ps = {make_paradigm("A", "x", {"x", "y", "z"}),
                                make_paradigm("B", "y", {"y"})};
    auto transcript = make_transcript({"x", "y", "z"});
    auto es = evalset::build_eval_set(ps, transcript, make_lexicon({"x", "y"}));
    size_t survivors = 0;
    for (const auto& l : es.lexemes) survivors += l.surviving_forms.size();
    // Candidates: x, y, z (all spoken paradigm forms). y ambiguous, z oov.
    CHECK(survivors + es.exclusion_log.size() == 3);
}

TEST_CASE("oracle_forms returns exactly the referenced forms") {
    evalset::EvalLexeme lex;
    lex.lexeme_id = "A";
    lex.lemma = "x";
    lex.surviving_forms = {"x", "z"};
    lex.references = {{"u1", 0.0, 0.4, "x"}, {"u1", 1.0, 0.4, "x"}};
    CHECK(evalset::oracle_forms(lex) == std::set<std::string>{"x"});
    // All surviving forms referenced: identity.
    lex.references.push_back({"u2", 0.0, 0.4, "z"});
    CHECK(evalset::oracle_forms(lex) == lex.surviving_forms);
}

TEST_CASE("unimorph_forms applies only the ambiguity filter") {
    std::vector<Paradigm> ps = {make_paradigm("A", "x", {"x", "y", "z"}),
                                make_paradigm("B", "y", {"y"})};
    CHECK(evalset::unimorph_forms(ps[0], ps) == std::set<std::string>{"x", "z"});
    // No-ambiguity case: all forms.
    std::vector<Paradigm> solo = {make_paradigm("A", "x", {"x", "y"})};
    CHECK(evalset::unimorph_forms(solo[0], solo) == std::set<std::string>{"x", "y"});
}

TEST_CASE("unimorph_forms reports fully ambiguous paradigms") {
    std::vector<Paradigm> ps = {make_paradigm("A", "x", {"y"}), make_paradigm("B", "y", {"y"})};
    CHECK_THROWS_WITH_AS(evalset::unimorph_forms(ps[0], ps), doctest::Contains("empty keyword"),
                         Error);
}

TEST_CASE("eval set round-trips through manifest and references files") {
    std::vector<Paradigm> ps = {make_paradigm("A", "x", {"x", "y"}),
                                make_paradigm("B", "y", {"y"})};
    auto es =
        evalset::build_eval_set(ps, make_transcript({"x", "x", "q"}), make_lexicon({"x", "q"}));
    std::ostringstream manifest, refs;
    evalset::save_manifest(es, manifest);
    evalset::save_references(es, refs);

    std::istringstream m2(manifest.str()), r2(refs.str());
    auto loaded = evalset::load(m2, r2);
    REQUIRE(loaded.lexemes.size() == es.lexemes.size());
    CHECK(loaded.total_speech_seconds == doctest::Approx(es.total_speech_seconds));
    CHECK(loaded.exclusion_log.size() == es.exclusion_log.size());
    for (size_t i = 0; i < loaded.lexemes.size(); ++i) {
        CHECK(loaded.lexemes[i].lexeme_id == es.lexemes[i].lexeme_id);
        CHECK(loaded.lexemes[i].surviving_forms == es.lexemes[i].surviving_forms);
        REQUIRE(loaded.lexemes[i].references.size() == es.lexemes[i].references.size());
        for (size_t r = 0; r < loaded.lexemes[i].references.size(); ++r)
            CHECK(loaded.lexemes[i].references[r].form == es.lexemes[i].references[r].form);
    }
}

TEST_CASE("building from shuffled inputs yields an identical eval set") {
    std::vector<Paradigm> ps = {make_paradigm("B", "y", {"y"}),
                                make_paradigm("A", "x", {"x", "y"})};
    std::vector<Paradigm> ps_sorted = {ps[1], ps[0]};
    auto t = make_transcript({"x", "y"});
    auto lex = make_lexicon({"x", "y"});
    auto a = evalset::build_eval_set(ps, t, lex);
    auto b = evalset::build_eval_set(ps_sorted, t, lex);
    REQUIRE(a.lexemes.size() == b.lexemes.size());
    for (size_t i = 0; i < a.lexemes.size(); ++i) {
        CHECK(a.lexemes[i].lexeme_id == b.lexemes[i].lexeme_id);
        CHECK(a.lexemes[i].surviving_forms == b.lexemes[i].surviving_forms);
    }
}
