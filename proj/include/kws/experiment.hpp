#ifndef KWS_EXPERIMENT_HPP
#define KWS_EXPERIMENT_HPP

#include <iosfwd>
#include <map>
#include <optional>

#include "kws/evalset.hpp"
#include "kws/g2p.hpp"
#include "kws/inflect.hpp"
#include "kws/kwsindex.hpp"
#include "kws/lm.hpp"
#include "kws/score.hpp"

namespace kws::experiment {

// Flat "key = value" configuration driving the end-to-end pipeline runs
// (k-sweep and condition grid). All randomness flows from `seed`.
struct ExperimentConfig {
    // corpus paths
    std::string unimorph;
    std::string lexicon;
    std::string transcript;
    std::string lm_text;      // in-domain LM training text (optional)
    std::string lm_text_ood;  // out-of-domain LM training text (optional)
    std::string pairs;        // inflection training pairs (optional)

    std::vector<std::string> conditions = {"oracle", "unimorph", "generated", "generated-ns",
                                           "lemmas"};
    std::vector<size_t> k_values = {1, 5, 10, 20, 40, 80, 160};
    size_t k = 40;

    double lambda = 0.5;
    size_t lm_order = 4;
    double unk_mass = 1e-3;
    size_t g2p_order = 3;
    size_t beam_width = 32;
    latticesim::SimParams sim;
    score::ScoringConfig scoring;
    bool weight_by_confidence = false;
    size_t threads = 1;

    void validate() const;  // k_values strictly increasing; set paths readable
};

using KeyValues = std::map<std::string, std::string>;

// Parses "key = value" lines ('#' comments, blank lines skipped).
KeyValues load_config_file(const std::string& path);

// Builds a config from key/value pairs; unknown keys or unparsable
// values throw. Later maps override earlier ones in make_config_layers.
ExperimentConfig make_config(const KeyValues& kv);
ExperimentConfig make_config_layers(const std::vector<KeyValues>& layers);

// Everything loaded/trained once, reused across cells.
struct PreparedExperiment {
    std::vector<Paradigm> paradigms;
    PronLexicon lexicon;
    Transcript transcript;
    evalset::EvalSet eval_set;
    std::optional<inflect::GeneratorModel> generator;
    std::optional<g2p::G2PModel> g2p_model;
    std::optional<lm::NGramLM> lm_in;
    std::optional<lm::NGramLM> lm_ood;
};

PreparedExperiment prepare(const ExperimentConfig& config);

struct Metrics {
    double atwv = 0.0;
    double otwv = 0.0;
    double stwv = 0.0;
    double theta = 0.0;
};

// One pipeline run: condition at k, with the in-domain or out-of-domain
// language model.
Metrics run_cell(const PreparedExperiment& prep, const ExperimentConfig& config,
                 const std::string& condition, size_t k, bool out_of_domain_lm);

struct SweepRow {
    size_t k = 0;
    Metrics metrics;
};

// Condition "generated" across config.k_values (in-domain LM).
std::vector<SweepRow> run_sweep(const PreparedExperiment& prep, const ExperimentConfig& config);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

struct ConditionRow {
    std::string condition;
    std::string lm_source;  // "in-domain" or "out-of-domain"
    Metrics metrics;
};

// config.conditions at config.k with the in-domain LM, plus
// out-of-domain rows when lm_text_ood is configured.
std::vector<ConditionRow> run_conditions(const PreparedExperiment& prep,
                                         const ExperimentConfig& config);
void write_conditions_csv(const std::vector<ConditionRow>& rows, std::ostream& out);

}  // namespace kws::experiment

#endif
