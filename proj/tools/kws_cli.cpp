// Command-line front end: corpus preparation, model training, lattice
// simulation, indexing, search, scoring, and the two experiment runners
// (sweep-k, conditions).
//
// Exit codes: 0 success, 2 usage/configuration error, 3 stage failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "kws/corpus.hpp"
#include "kws/evalset.hpp"
#include "kws/experiment.hpp"
#include "kws/fixture.hpp"
#include "kws/g2p.hpp"
#include "kws/inflect.hpp"
#include "kws/kwsindex.hpp"
#include "kws/latticesim.hpp"
#include "kws/lm.hpp"
#include "kws/score.hpp"

namespace {

using kws::Error;
using kws::experiment::ExperimentConfig;
using kws::experiment::KeyValues;

// Raised during config assembly/validation; maps to exit code 2 (any
// other error during a run maps to 3).
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigArgs {
    std::string config_path;
    KeyValues overrides;

    ExperimentConfig build() const {
        try {
            std::vector<KeyValues> layers;
            if (!config_path.empty())
                layers.push_back(kws::experiment::load_config_file(config_path));
            layers.push_back(overrides);
            auto cfg = kws::experiment::make_config_layers(layers);
            cfg.validate();
            return cfg;
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
};

// Every ExperimentConfig field is also a flag; flags override the file.
std::shared_ptr<ConfigArgs> add_config_options(CLI::App* sub) {
    auto args = std::make_shared<ConfigArgs>();
    sub->add_option("--config", args->config_path, "flat 'key = value' configuration file");
    static const std::vector<std::string> keys = {
        "unimorph", "lexicon",  "transcript", "lm_text", "lm_text_ood",
        "pairs",    "conditions", "k_values", "k",       "lambda",
        "lm_order", "unk_mass", "g2p_order",  "beam_width", "alpha",
        "radius",   "p_del",    "gamma",      "max_alts", "seed",
        "beta",     "tolerance", "theta",     "weight_by_confidence", "threads"};
    for (const auto& key : keys)
        sub->add_option_function<std::string>(
            "--" + key, [args, key](const std::string& v) { args->overrides[key] = v; },
            "override config key '" + key + "'");
    return args;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    return out;
}

// Writes to the path, or stdout when the path is empty.
void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
    } else {
        auto out = open_out(path);
        out << content;
    }
}

void setup_make_fixture(CLI::App& app) {
    auto sub = app.add_subcommand("make-fixture", "generate the deterministic synthetic corpus");
    auto dir = std::make_shared<std::string>();
    auto params = std::make_shared<kws::fixture::FixtureParams>();
    sub->add_option("--out", *dir, "output directory")->required();
    sub->add_option("--seed", params->seed, "master seed");
    sub->add_option("--keyword-stems", params->keyword_stems, "number of keyword lexemes");
    sub->add_option("--filler-stems", params->filler_stems, "number of filler lexemes");
    sub->add_option("--utterances", params->utterances, "number of transcript utterances");
    sub->add_option("--lm-sentences", params->lm_sentences, "in-domain LM sentences");
    sub->callback([dir, params] {
        std::filesystem::create_directories(*dir);
        kws::fixture::make_fixture(*dir, *params);
        std::cout << "fixture written to " << *dir << "\n";
    });
}

void setup_build_evalset(CLI::App& app) {
    auto sub = app.add_subcommand("build-evalset",
                                  "select evaluable lexemes and reference occurrences");
    auto args = add_config_options(sub);
    auto manifest = std::make_shared<std::string>();
    auto references = std::make_shared<std::string>();
    sub->add_option("--manifest", *manifest, "output manifest TSV")->required();
    sub->add_option("--references", *references, "output references TSV")->required();
    sub->callback([args, manifest, references] {
        auto cfg = args->build();
        if (cfg.unimorph.empty() || cfg.lexicon.empty() || cfg.transcript.empty())
            throw UsageError("build-evalset needs unimorph, lexicon and transcript");
        auto paradigms = kws::corpus::load_unimorph_file(cfg.unimorph);
        auto lexicon = kws::corpus::load_lexicon_file(cfg.lexicon);
        auto transcript = kws::corpus::load_transcript_file(cfg.transcript);
        auto es = kws::evalset::build_eval_set(paradigms, transcript, lexicon);
        {
            auto out = open_out(*manifest);
            kws::evalset::save_manifest(es, out);
        }
        {
            auto out = open_out(*references);
            kws::evalset::save_references(es, out);
        }
        std::cout << es.lexemes.size() << " lexemes, " << es.exclusion_log.size()
                  << " excluded forms\n";
    });
}

void setup_train_inflector(CLI::App& app) {
    auto sub = app.add_subcommand("train-inflector", "train the inflection generator");
    auto args = add_config_options(sub);
    auto out_path = std::make_shared<std::string>();
    sub->add_option("--out", *out_path, "output model file")->required();
    sub->callback([args, out_path] {
        auto cfg = args->build();
        if (cfg.pairs.empty()) throw UsageError("train-inflector needs pairs");
        auto pairs = kws::corpus::load_training_pairs_file(cfg.pairs);
        auto model = kws::inflect::train(pairs, cfg.lambda);
        auto out = open_out(*out_path);
        kws::inflect::save_model(model, out);
    });
}

void setup_train_g2p(CLI::App& app) {
    auto sub = app.add_subcommand("train-g2p", "train the grapheme-to-phoneme model");
    auto args = add_config_options(sub);
    auto out_path = std::make_shared<std::string>();
    sub->add_option("--out", *out_path, "output model file")->required();
    sub->callback([args, out_path] {
        auto cfg = args->build();
        if (cfg.lexicon.empty()) throw UsageError("train-g2p needs lexicon");
        auto lexicon = kws::corpus::load_lexicon_file(cfg.lexicon);
        std::vector<kws::g2p::LexiconPair> pairs;
        for (const auto& [word, prons] : lexicon.entries)
            for (const auto& pron : prons) pairs.push_back({word, pron});
        auto aligned = kws::g2p::align(pairs);
        for (const auto& w : aligned.skipped)
            std::cerr << "warning: unsegmentable word dropped: " << w << "\n";
        auto model = kws::g2p::train(aligned, cfg.g2p_order);
        auto out = open_out(*out_path);
        kws::g2p::save_model(model, out);
    });
}

void setup_train_lm(CLI::App& app) {
    auto sub = app.add_subcommand("train-lm", "train the Kneser-Ney n-gram language model");
    auto args = add_config_options(sub);
    auto out_path = std::make_shared<std::string>();
    sub->add_option("--out", *out_path, "output ARPA file")->required();
    sub->callback([args, out_path] {
        auto cfg = args->build();
        if (cfg.lm_text.empty()) throw UsageError("train-lm needs lm_text");
        auto in = open_in(cfg.lm_text);
        auto model = kws::lm::NGramLM::train_text(in, cfg.lm_order, cfg.unk_mass);
        auto out = open_out(*out_path);
        model.save_arpa(out);
    });
}

void setup_simulate(CLI::App& app) {
    auto sub = app.add_subcommand("simulate",
                                  "decode the transcript into confusion networks");
    auto args = add_config_options(sub);
    auto lm_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    sub->add_option("--lm", *lm_path, "ARPA language model (must cover the lexicon)");
    sub->add_option("--out", *out_path, "output networks TSV")->required();
    sub->callback([args, lm_path, out_path] {
        auto cfg = args->build();
        if (cfg.transcript.empty() || cfg.lexicon.empty())
            throw UsageError("simulate needs transcript and lexicon");
        auto transcript = kws::corpus::load_transcript_file(cfg.transcript);
        auto lexicon = kws::corpus::load_lexicon_file(cfg.lexicon);
        std::optional<kws::lm::NGramLM> lm;
        if (!lm_path->empty()) {
            auto in = open_in(*lm_path);
            lm = kws::lm::NGramLM::load_arpa(in);
        }
        auto networks = kws::latticesim::simulate(transcript, lexicon, lm ? &*lm : nullptr,
                                                  cfg.sim, cfg.threads);
        auto out = open_out(*out_path);
        kws::latticesim::save_networks(networks, out);
    });
}

void setup_index(CLI::App& app) {
    auto sub = app.add_subcommand("index", "build the inverted word index from networks");
    auto networks_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    sub->add_option("--networks", *networks_path, "confusion networks TSV")->required();
    sub->add_option("--out", *out_path, "output postings TSV (word utt start dur posterior)");
    sub->callback([networks_path, out_path] {
        auto in = open_in(*networks_path);
        auto networks = kws::latticesim::load_networks(in);
        auto index = kws::kwsindex::build_index(networks, 0.0);
        std::ostringstream os;
        os.precision(12);
        for (const auto& [word, hits] : index.postings)
            for (const auto& h : hits)
                os << word << "\t" << h.utterance_id << "\t" << h.start << "\t" << h.duration
                   << "\t" << h.score << "\n";
        emit(*out_path, os.str());
    });
}

void setup_search(CLI::App& app) {
    auto sub = app.add_subcommand("search", "search all evaluation lexemes in the index");
    auto networks_path = std::make_shared<std::string>();
    auto manifest_path = std::make_shared<std::string>();
    auto references_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    sub->add_option("--networks", *networks_path, "confusion networks TSV")->required();
    sub->add_option("--manifest", *manifest_path, "evaluation set manifest")->required();
    sub->add_option("--references", *references_path, "evaluation set references")->required();
    sub->add_option("--out", *out_path, "output hits TSV");
    sub->callback([networks_path, manifest_path, references_path, out_path] {
        auto nin = open_in(*networks_path);
        auto min = open_in(*manifest_path);
        auto rin = open_in(*references_path);
        auto networks = kws::latticesim::load_networks(nin);
        auto es = kws::evalset::load(min, rin);
        auto index = kws::kwsindex::build_index(networks, es.total_speech_seconds);
        std::map<std::string, kws::kwsindex::KeywordResultSet> results;
        for (const auto& lex : es.lexemes) {
            std::map<std::string, double> forms;
            for (const auto& f : lex.surviving_forms) forms[f] = 1.0;
            results[lex.lexeme_id] = kws::kwsindex::search(index, lex.lexeme_id, forms);
        }
        std::ostringstream os;
        kws::kwsindex::save_hits(results, os);
        emit(*out_path, os.str());
    });
}

void setup_score(CLI::App& app) {
    auto sub = app.add_subcommand("score", "compute ATWV/OTWV/STWV from hits and references");
    auto args = add_config_options(sub);
    auto hits_path = std::make_shared<std::string>();
    auto manifest_path = std::make_shared<std::string>();
    auto references_path = std::make_shared<std::string>();
    auto csv_path = std::make_shared<std::string>();
    auto json_path = std::make_shared<std::string>();
    sub->add_option("--hits", *hits_path, "hits TSV")->required();
    sub->add_option("--manifest", *manifest_path, "evaluation set manifest")->required();
    sub->add_option("--references", *references_path, "evaluation set references")->required();
    sub->add_option("--csv", *csv_path, "per-lexeme report CSV");
    sub->add_option("--json", *json_path, "summary JSON (default: stdout)");
    sub->callback([args, hits_path, manifest_path, references_path, csv_path, json_path] {
        auto cfg = args->build();
        auto hin = open_in(*hits_path);
        auto min = open_in(*manifest_path);
        auto rin = open_in(*references_path);
        auto hits = kws::kwsindex::load_hits(hin);
        auto es = kws::evalset::load(min, rin);
        auto report = kws::score::evaluate(hits, es, cfg.scoring);
        if (!csv_path->empty()) {
            auto out = open_out(*csv_path);
            kws::score::save_report_csv(report, out);
        }
        std::ostringstream os;
        kws::score::save_report_json(report, os);
        emit(*json_path, os.str());
    });
}

void setup_sweep_k(CLI::App& app) {
    auto sub = app.add_subcommand("sweep-k",
                                  "run condition 'generated' across k values, emit CSV");
    auto args = add_config_options(sub);
    auto out_path = std::make_shared<std::string>();
    sub->add_option("--out", *out_path, "output CSV (default: stdout)");
    sub->callback([args, out_path] {
        auto cfg = args->build();
        auto prep = kws::experiment::prepare(cfg);
        auto rows = kws::experiment::run_sweep(prep, cfg);
        std::ostringstream os;
        kws::experiment::write_sweep_csv(rows, os);
        emit(*out_path, os.str());
    });
}

void setup_conditions(CLI::App& app) {
    auto sub = app.add_subcommand("conditions", "run the condition grid, emit CSV");
    auto args = add_config_options(sub);
    auto out_path = std::make_shared<std::string>();
    sub->add_option("--out", *out_path, "output CSV (default: stdout)");
    sub->callback([args, out_path] {
        auto cfg = args->build();
        auto prep = kws::experiment::prepare(cfg);
        auto rows = kws::experiment::run_conditions(prep, cfg);
        std::ostringstream os;
        kws::experiment::write_conditions_csv(rows, os);
        emit(*out_path, os.str());
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lexeme-set keyword search toolkit"};
    app.require_subcommand(1);
    setup_make_fixture(app);
    setup_build_evalset(app);
    setup_train_inflector(app);
    setup_train_g2p(app);
    setup_train_lm(app);
    setup_simulate(app);
    setup_index(app);
    setup_search(app);
    setup_score(app);
    setup_sweep_k(app);
    setup_conditions(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
