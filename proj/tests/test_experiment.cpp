#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kws/corpus.hpp"
#include "kws/experiment.hpp"
#include "kws/fixture.hpp"

using namespace kws;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const fs::path& dir, const std::string& name,
                       const std::string& content) {
    auto path = dir / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("config files parse key = value lines with comments") {
    auto dir = temp_dir("kws_test_cfg");
    auto path = write_file(dir, "a.cfg",
                           "# comment\n"
                           "lambda = 0.25\n"
                           "\n"
                           "k = 12\n"
                           "theta = auto\n"
                           "conditions = oracle, lemmas\n");
    auto kv = experiment::load_config_file(path);
    auto cfg = experiment::make_config(kv);
    CHECK(cfg.lambda == doctest::Approx(0.25));
    CHECK(cfg.k == 12);
    CHECK(!cfg.scoring.theta.has_value());
    CHECK(cfg.conditions == std::vector<std::string>{"oracle", "lemmas"});
}

TEST_CASE("later configuration layers override earlier ones") {
    auto cfg = experiment::make_config_layers(
        {{{"lambda", "0.2"}, {"k", "10"}}, {{"lambda", "0.8"}}});
    CHECK(cfg.lambda == doctest::Approx(0.8));
    CHECK(cfg.k == 10);
}

TEST_CASE("unknown configuration keys are rejected") {
    CHECK_THROWS_WITH_AS(experiment::make_config({{"no_such_key", "1"}}),
                         doctest::Contains("unknown key"), Error);
}

TEST_CASE("bad values are rejected with the offending key named") {
    CHECK_THROWS_WITH_AS(experiment::make_config({{"lambda", "abc"}}),
                         doctest::Contains("lambda"), Error);
    CHECK_THROWS_WITH_AS(experiment::make_config({{"k", "-3"}}), doctest::Contains("k"), Error);
}

TEST_CASE("validation requires strictly increasing k values") {
    experiment::ExperimentConfig cfg;
    cfg.k_values = {1, 5, 5};
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("strictly increasing"), Error);
    cfg.k_values = {5, 1};
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.k_values = {1, 5};
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("validation requires readable corpus paths") {
    experiment::ExperimentConfig cfg;
    cfg.unimorph = "/nonexistent/path/unimorph.tsv";
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("cannot read"), Error);
}

TEST_CASE("malformed config lines name their location") {
    auto dir = temp_dir("kws_test_cfg_bad");
    auto path = write_file(dir, "bad.cfg", "lambda 0.25\n");
    CHECK_THROWS_WITH_AS(experiment::load_config_file(path), doctest::Contains("key = value"),
                         Error);
}

TEST_CASE("fixture generation is byte-identical for a fixed seed") {
    fixture::FixtureParams params;
    params.keyword_stems = 4;
    params.filler_stems = 15;
    params.utterances = 15;
    params.lm_sentences = 40;
    params.bible_sentences = 40;
    params.heldout_sentences = 8;
    params.decoys_per_bundle = 20;
    params.g2p_heldout_words = 8;

    auto d1 = temp_dir("kws_test_fx1");
    auto d2 = temp_dir("kws_test_fx2");
    fixture::make_fixture(d1.string(), params);
    fixture::make_fixture(d2.string(), params);
    size_t files = 0;
    for (const auto& entry : fs::directory_iterator(d1)) {
        ++files;
        auto name = entry.path().filename();
        auto a = slurp(entry.path());
        auto b = slurp(d2 / name);
        // Config files embed the output directory; compare the rest byte-wise.
        if (name != "paper_shape.cfg") CHECK(a == b);
    }
    CHECK(files == 10);

    params.seed = 8;
    auto d3 = temp_dir("kws_test_fx3");
    fixture::make_fixture(d3.string(), params);
    CHECK(slurp(d1 / "transcript.ctm") != slurp(d3 / "transcript.ctm"));
}

TEST_CASE("fixture outputs load back through the corpus loaders") {
    fixture::FixtureParams params;
    params.keyword_stems = 4;
    params.filler_stems = 15;
    params.utterances = 15;
    params.lm_sentences = 40;
    params.bible_sentences = 40;
    params.heldout_sentences = 8;
    params.decoys_per_bundle = 20;
    params.g2p_heldout_words = 8;
    auto dir = temp_dir("kws_test_fx_load");
    fixture::make_fixture(dir.string(), params);

    auto paradigms = corpus::load_unimorph_file((dir / "unimorph.tsv").string());
    CHECK(paradigms.size() >= params.keyword_stems);
    auto lexicon = corpus::load_lexicon_file((dir / "lexicon.tsv").string());
    CHECK(!lexicon.entries.empty());
    auto transcript = corpus::load_transcript_file((dir / "transcript.ctm").string());
    CHECK(!transcript.tokens.empty());
    // Every transcript word must be pronounceable.
    for (const auto& tok : transcript.tokens) CHECK(lexicon.contains(tok.word));
    auto pairs = corpus::load_training_pairs_file((dir / "pairs_clean.tsv").string());
    CHECK(!pairs.empty());
    auto noisy = corpus::load_training_pairs_file((dir / "pairs_noisy.tsv").string());
    CHECK(!noisy.empty());
    auto kv = experiment::load_config_file((dir / "paper_shape.cfg").string());
    auto cfg = experiment::make_config(kv);
    CHECK(cfg.k == 40);
    CHECK_NOTHROW(cfg.validate());
}
