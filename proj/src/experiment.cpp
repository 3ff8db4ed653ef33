#include "kws/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "kws/corpus.hpp"

namespace kws::experiment {

void ExperimentConfig::validate() const {
    for (size_t i = 1; i < k_values.size(); ++i)
        if (k_values[i] <= k_values[i - 1])
            throw Error("config: k_values must be strictly increasing");
    if (k_values.empty()) throw Error("config: k_values must not be empty");
    if (k == 0) throw Error("config: k must be positive");
    if (lambda < 0 || lambda > 1) throw Error("config: lambda must be in [0,1]");
    if (lm_order == 0) throw Error("config: lm_order must be positive");
    if (unk_mass < 0 || unk_mass >= 1) throw Error("config: unk_mass must be in [0,1)");
    if (threads == 0) throw Error("config: threads must be positive");
    sim.validate();
    scoring.validate();
    for (const std::string& c : conditions) kwsindex::parse_condition(c);
    for (const std::string& path :
         {unimorph, lexicon, transcript, lm_text, lm_text_ood, pairs}) {
        if (path.empty()) continue;
        std::ifstream in(path);
        if (!in) throw Error("config: cannot read " + path);
    }
}

KeyValues load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("config: cannot open " + path);
    KeyValues kv;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = text::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error("config: expected 'key = value' at " + path + ":" +
                        std::to_string(lineno));
        std::string key = text::trim(t.substr(0, eq));
        std::string value = text::trim(t.substr(eq + 1));
        if (key.empty()) throw Error("config: empty key at " + path + ":" + std::to_string(lineno));
        kv[key] = value;
    }
    return kv;
}

namespace {

double to_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw Error("config: bad number for '" + key + "': " + value);
    }
}

size_t to_size(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        long long v = std::stoll(value, &pos);
        if (pos != value.size() || v < 0) throw std::invalid_argument(value);
        return size_t(v);
    } catch (const std::exception&) {
        throw Error("config: bad integer for '" + key + "': " + value);
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw Error("config: bad boolean for '" + key + "': " + value);
}

}  // namespace

ExperimentConfig make_config(const KeyValues& kv) { return make_config_layers({kv}); }

ExperimentConfig make_config_layers(const std::vector<KeyValues>& layers) {
    KeyValues kv;
    for (const auto& layer : layers)
        for (const auto& [k, v] : layer) kv[k] = v;

    ExperimentConfig c;
    for (const auto& [key, value] : kv) {
        if (key == "unimorph") c.unimorph = value;
        else if (key == "lexicon") c.lexicon = value;
        else if (key == "transcript") c.transcript = value;
        else if (key == "lm_text") c.lm_text = value;
        else if (key == "lm_text_ood") c.lm_text_ood = value;
        else if (key == "pairs") c.pairs = value;
        else if (key == "conditions") {
            c.conditions.clear();
            for (const auto& part : text::split(value, ','))
                if (!text::trim(part).empty()) c.conditions.push_back(text::trim(part));
        } else if (key == "k_values") {
            c.k_values.clear();
            for (const auto& part : text::split(value, ','))
                c.k_values.push_back(to_size(key, text::trim(part)));
        } else if (key == "k") c.k = to_size(key, value);
        else if (key == "lambda") c.lambda = to_double(key, value);
        else if (key == "lm_order") c.lm_order = to_size(key, value);
        else if (key == "unk_mass") c.unk_mass = to_double(key, value);
        else if (key == "g2p_order") c.g2p_order = to_size(key, value);
        else if (key == "beam_width") c.beam_width = to_size(key, value);
        else if (key == "alpha") c.sim.alpha = to_double(key, value);
        else if (key == "radius") c.sim.radius = to_double(key, value);
        else if (key == "p_del") c.sim.p_del = to_double(key, value);
        else if (key == "gamma") c.sim.gamma = to_double(key, value);
        else if (key == "max_alts") c.sim.max_alts = to_size(key, value);
        else if (key == "seed") c.sim.seed = std::uint64_t(to_size(key, value));
        else if (key == "beta") c.scoring.beta = to_double(key, value);
        else if (key == "tolerance") c.scoring.time_tolerance = to_double(key, value);
        else if (key == "theta") {
            if (value == "auto") c.scoring.theta.reset();
            else c.scoring.theta = to_double(key, value);
        } else if (key == "weight_by_confidence") c.weight_by_confidence = to_bool(key, value);
        else if (key == "threads") c.threads = to_size(key, value);
        else throw Error("config: unknown key '" + key + "'");
    }
    return c;
}

PreparedExperiment prepare(const ExperimentConfig& config) {
    config.validate();
    PreparedExperiment prep;
    if (config.unimorph.empty() || config.lexicon.empty() || config.transcript.empty())
        throw Error("config: unimorph, lexicon and transcript paths are required");
    prep.paradigms = corpus::load_unimorph_file(config.unimorph);
    prep.lexicon = corpus::load_lexicon_file(config.lexicon);
    prep.transcript = corpus::load_transcript_file(config.transcript);
    prep.eval_set = evalset::build_eval_set(prep.paradigms, prep.transcript, prep.lexicon);

    if (!config.pairs.empty()) {
        auto pairs = corpus::load_training_pairs_file(config.pairs);
        prep.generator = inflect::train(pairs, config.lambda);
    }

    std::vector<g2p::LexiconPair> g2p_pairs;
    for (const auto& [word, prons] : prep.lexicon.entries)
        for (const auto& pron : prons) g2p_pairs.push_back({word, pron});
    auto aligned = g2p::align(g2p_pairs);
    prep.g2p_model = g2p::train(aligned, config.g2p_order);

    if (!config.lm_text.empty()) {
        std::ifstream in(config.lm_text);
        prep.lm_in = lm::NGramLM::train_text(in, config.lm_order, config.unk_mass);
    }
    if (!config.lm_text_ood.empty()) {
        std::ifstream in(config.lm_text_ood);
        prep.lm_ood = lm::NGramLM::train_text(in, config.lm_order, config.unk_mass);
    }
    return prep;
}

Metrics run_cell(const PreparedExperiment& prep, const ExperimentConfig& config,
                 const std::string& condition, size_t k, bool out_of_domain_lm) {
    kwsindex::ConditionInputs in;
    in.eval_set = &prep.eval_set;
    in.paradigms = &prep.paradigms;
    in.generator = prep.generator ? &*prep.generator : nullptr;
    in.k = k;
    in.lexicon = &prep.lexicon;
    in.g2p_model = prep.g2p_model ? &*prep.g2p_model : nullptr;
    in.transcript = &prep.transcript;
    if (out_of_domain_lm) {
        if (!prep.lm_ood) throw Error("run_cell: no out-of-domain language model configured");
        in.language_model = &*prep.lm_ood;
    } else {
        in.language_model = prep.lm_in ? &*prep.lm_in : nullptr;
    }
    in.sim_params = config.sim;
    in.weight_by_confidence = config.weight_by_confidence;
    in.threads = config.threads;

    auto results = kwsindex::run_condition(kwsindex::parse_condition(condition), in);
    auto report = score::evaluate(results, prep.eval_set, config.scoring);
    return {report.atwv, report.otwv, report.stwv, report.theta};
}

std::vector<SweepRow> run_sweep(const PreparedExperiment& prep, const ExperimentConfig& config) {
    std::vector<SweepRow> rows;
    for (size_t k : config.k_values) {
        SweepRow row;
        row.k = k;
        try {
            row.metrics = run_cell(prep, config, "generated", k, false);
        } catch (const Error& e) {
            throw Error("sweep-k: stage 'generated,k=" + std::to_string(k) +
                        "' failed: " + e.what());
        }
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(6);
    os << "k,atwv,otwv,stwv\n";
    for (const auto& r : rows)
        os << r.k << "," << r.metrics.atwv << "," << r.metrics.otwv << "," << r.metrics.stwv
           << "\n";
    out << os.str();
}

std::vector<ConditionRow> run_conditions(const PreparedExperiment& prep,
                                         const ExperimentConfig& config) {
    std::vector<ConditionRow> rows;
    std::vector<bool> lm_sources = {false};
    if (prep.lm_ood) lm_sources.push_back(true);
    for (bool ood : lm_sources)
        for (const auto& condition : config.conditions) {
            ConditionRow row;
            row.condition = condition;
            row.lm_source = ood ? "out-of-domain" : "in-domain";
            try {
                row.metrics = run_cell(prep, config, condition, config.k, ood);
            } catch (const Error& e) {
                throw Error("conditions: stage '" + condition + "," + row.lm_source +
                            "' failed: " + e.what());
            }
            rows.push_back(row);
        }
    return rows;
}

void write_conditions_csv(const std::vector<ConditionRow>& rows, std::ostream& out) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(6);
    os << "condition,lm_source,atwv,otwv,stwv\n";
    for (const auto& r : rows)
        os << r.condition << "," << r.lm_source << "," << r.metrics.atwv << ","
           << r.metrics.otwv << "," << r.metrics.stwv << "\n";
    out << os.str();
}

}  // namespace kws::experiment
