#include "kws/kwsindex.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace kws::kwsindex {

InvertedIndex build_index(const std::vector<latticesim::ConfusionNetwork>& networks,
                          double total_speech_seconds) {
    InvertedIndex index;
    index.total_speech_seconds = total_speech_seconds;
    for (const auto& net : networks)
        for (const auto& slot : net.slots)
            for (const auto& [word, post] : slot.alternatives) {
                if (word == latticesim::kEpsilon) continue;
                index.postings[word].push_back(
                    {net.utterance_id, slot.start, slot.duration, post, word});
            }
    for (auto& [word, hits] : index.postings)
        std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
            if (a.utterance_id != b.utterance_id) return a.utterance_id < b.utterance_id;
            return a.start < b.start;
        });
    return index;
}

namespace {

bool overlapping(const Hit& a, const Hit& b) {
    if (a.utterance_id != b.utterance_id) return false;
    auto inside = [](double mid, const Hit& h) {
        return mid >= h.start && mid <= h.start + h.duration;
    };
    return inside(a.midpoint(), b) || inside(b.midpoint(), a);
}

}  // namespace

KeywordResultSet search(const InvertedIndex& index, const std::string& lexeme_id,
                        const std::map<std::string, double>& forms_with_confidences,
                        bool weight_by_confidence) {
    if (forms_with_confidences.empty()) throw Error("search: empty form set");
    KeywordResultSet result;
    result.lexeme_id = lexeme_id;
    std::vector<Hit> pool;
    for (const auto& [form, confidence] : forms_with_confidences) {
        auto it = index.postings.find(form);
        if (it == index.postings.end()) continue;
        for (Hit h : it->second) {
            if (weight_by_confidence) h.score *= confidence;
            pool.push_back(std::move(h));
        }
    }
    std::sort(pool.begin(), pool.end(), [](const Hit& a, const Hit& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.utterance_id != b.utterance_id) return a.utterance_id < b.utterance_id;
        if (a.start != b.start) return a.start < b.start;
        return a.matched_form < b.matched_form;
    });
    // Greedy merge: the highest-scored hit of an overlapping group wins.
    for (const auto& h : pool) {
        bool merged = false;
        for (const auto& kept : result.hits)
            if (overlapping(h, kept)) {
                merged = true;
                break;
            }
        if (!merged) result.hits.push_back(h);
    }
    return result;
}

Condition parse_condition(const std::string& name) {
    if (name == "oracle") return Condition::kOracle;
    if (name == "unimorph") return Condition::kUnimorph;
    if (name == "generated") return Condition::kGenerated;
    if (name == "generated-ns") return Condition::kGeneratedNs;
    if (name == "lemmas") return Condition::kLemmas;
    throw Error("unknown condition '" + name + "'");
}

std::string condition_name(Condition c) {
    switch (c) {
        case Condition::kOracle: return "oracle";
        case Condition::kUnimorph: return "unimorph";
        case Condition::kGenerated: return "generated";
        case Condition::kGeneratedNs: return "generated-ns";
        case Condition::kLemmas: return "lemmas";
    }
    throw Error("bad condition");
}

std::map<std::string, std::map<std::string, double>> condition_forms(Condition condition,
                                                                     const ConditionInputs& in) {
    if (!in.eval_set || !in.paradigms) throw Error("run_condition: missing eval set or paradigms");
    std::map<std::string, std::map<std::string, double>> out;
    for (const auto& lex : in.eval_set->lexemes) {
        const Paradigm* paradigm = nullptr;
        for (const auto& p : *in.paradigms)
            if (p.lexeme_id == lex.lexeme_id) {
                paradigm = &p;
                break;
            }
        std::map<std::string, double> forms;
        switch (condition) {
            case Condition::kOracle:
                for (const auto& f : evalset::oracle_forms(lex)) forms[f] = 1.0;
                break;
            case Condition::kUnimorph: {
                if (!paradigm) throw Error("run_condition: no paradigm for " + lex.lexeme_id);
                for (const auto& f : evalset::unimorph_forms(*paradigm, *in.paradigms))
                    forms[f] = 1.0;
                break;
            }
            case Condition::kGenerated:
            case Condition::kGeneratedNs: {
                if (!paradigm) throw Error("run_condition: no paradigm for " + lex.lexeme_id);
                if (!in.generator) throw Error("run_condition: no generator model");
                std::vector<MorphBundle> bundles;
                for (const auto& [b, fs] : paradigm->entries) bundles.push_back(b);
                auto expanded = inflect::expand_lexeme(*in.generator, lex.lemma, bundles, in.k);
                if (condition == Condition::kGeneratedNs) {
                    auto oracle = evalset::oracle_forms(lex);
                    for (const auto& [f, c] : expanded)
                        if (oracle.count(f)) forms[f] = c;
                    if (forms.empty()) forms[lex.lemma] = 1.0;  // degenerate fallback
                } else {
                    for (const auto& [f, c] : expanded) forms[f] = c;
                }
                break;
            }
            case Condition::kLemmas:
                forms[lex.lemma] = 1.0;
                break;
        }
        out[lex.lexeme_id] = std::move(forms);
    }
    return out;
}

std::map<std::string, KeywordResultSet> run_condition(Condition condition,
                                                      const ConditionInputs& in) {
    if (!in.lexicon || !in.transcript) throw Error("run_condition: missing lexicon or transcript");
    auto forms_by_lexeme = condition_forms(condition, in);

    std::set<std::string> all_forms;
    for (const auto& [id, forms] : forms_by_lexeme)
        for (const auto& [f, c] : forms) all_forms.insert(f);

    // Hypothesized forms enter the decoding lexicon via G2P before
    // simulation; untranscribable ones simply never hit.
    PronLexicon lexicon = *in.lexicon;
    if (in.g2p_model) {
        auto [augmented, dropped] = g2p::augment_lexicon(*in.lexicon, all_forms, *in.g2p_model);
        lexicon = std::move(augmented);
    } else {
        for (const auto& f : all_forms)
            if (!lexicon.contains(f))
                throw Error("run_condition: form '" + f + "' not in lexicon and no g2p model");
    }

    lm::NGramLM lm_copy;
    const lm::NGramLM* lm_ptr = nullptr;
    if (in.language_model) {
        lm_copy = *in.language_model;
        std::vector<std::string> unseen;
        for (const auto& [word, prons] : lexicon.entries)
            if (!lm_copy.known(word)) unseen.push_back(word);
        if (!unseen.empty()) lm_copy.register_unseen(unseen);
        lm_copy.freeze();
        lm_ptr = &lm_copy;
    }

    auto networks = latticesim::simulate(*in.transcript, lexicon, lm_ptr, in.sim_params,
                                         in.threads);
    auto index = build_index(networks, in.eval_set->total_speech_seconds);

    std::map<std::string, KeywordResultSet> results;
    for (const auto& [id, forms] : forms_by_lexeme)
        results[id] = search(index, id, forms, in.weight_by_confidence);
    return results;
}

void save_hits(const std::map<std::string, KeywordResultSet>& results, std::ostream& out) {
    std::ostringstream os;
    os.precision(12);
    for (const auto& [id, rs] : results)
        for (const auto& h : rs.hits)
            os << id << "\t" << h.utterance_id << "\t" << h.start << "\t" << h.duration << "\t"
               << h.score << "\t" << h.matched_form << "\n";
    out << os.str();
}

std::map<std::string, KeywordResultSet> load_hits(std::istream& in) {
    std::map<std::string, KeywordResultSet> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty() || line[0] == '#') continue;
        auto f = text::split(line, '\t');
        if (f.size() != 6)
            throw Error("hits: expected 6 fields at line " + std::to_string(lineno));
        auto& rs = out[f[0]];
        rs.lexeme_id = f[0];
        rs.hits.push_back({f[1], std::stod(f[2]), std::stod(f[3]), std::stod(f[4]), f[5]});
    }
    for (auto& [id, rs] : out)
        std::sort(rs.hits.begin(), rs.hits.end(),
                  [](const Hit& a, const Hit& b) { return a.score > b.score; });
    return out;
}

}  // namespace kws::kwsindex
