#ifndef KWS_KWSINDEX_HPP
#define KWS_KWSINDEX_HPP

#include <iosfwd>
#include <map>

#include "kws/evalset.hpp"
#include "kws/g2p.hpp"
#include "kws/inflect.hpp"
#include "kws/latticesim.hpp"
#include "kws/lm.hpp"
#include "kws/types.hpp"

namespace kws::kwsindex {

struct Hit {
    std::string utterance_id;
    double start = 0.0;
    double duration = 0.0;
    double score = 0.0;  // lattice posterior, in (0,1]
    std::string matched_form;

    double midpoint() const { return start + duration / 2.0; }
};

struct InvertedIndex {
    // surface form -> hits sorted by (utterance_id, start)
    std::map<std::string, std::vector<Hit>> postings;
    double total_speech_seconds = 0.0;
};

struct KeywordResultSet {
    std::string lexeme_id;
    std::vector<Hit> hits;  // score-descending
};

InvertedIndex build_index(const std::vector<latticesim::ConfusionNetwork>& networks,
                          double total_speech_seconds);

// Union of the posting lists of all query forms; overlapping hits within
// an utterance (midpoint containment) merge keeping the max-score hit.
// With weight_by_confidence, hit scores are posterior * form confidence.
KeywordResultSet search(const InvertedIndex& index, const std::string& lexeme_id,
                        const std::map<std::string, double>& forms_with_confidences,
                        bool weight_by_confidence = false);

enum class Condition { kOracle, kUnimorph, kGenerated, kGeneratedNs, kLemmas };

Condition parse_condition(const std::string& name);
std::string condition_name(Condition c);

struct ConditionInputs {
    const evalset::EvalSet* eval_set = nullptr;
    const std::vector<Paradigm>* paradigms = nullptr;
    const inflect::GeneratorModel* generator = nullptr;  // for generated conditions
    size_t k = 40;
    const PronLexicon* lexicon = nullptr;
    const g2p::G2PModel* g2p_model = nullptr;
    const Transcript* transcript = nullptr;
    const lm::NGramLM* language_model = nullptr;  // copied; unseen forms registered in the copy
    latticesim::SimParams sim_params;
    bool weight_by_confidence = false;
    size_t threads = 1;
};

// Full pipeline for one condition: choose forms per lexeme, augment the
// lexicon via G2P, register unseen forms in the LM, simulate, index,
// search.
std::map<std::string, KeywordResultSet> run_condition(Condition condition,
                                                      const ConditionInputs& in);

// Query form sets per lexeme for a condition (exposed for tests/CLI).
std::map<std::string, std::map<std::string, double>> condition_forms(Condition condition,
                                                                     const ConditionInputs& in);

// KWS-list TSV: "lexeme_id utt start dur score matched_form".
void save_hits(const std::map<std::string, KeywordResultSet>& results, std::ostream& out);
std::map<std::string, KeywordResultSet> load_hits(std::istream& in);

}  // namespace kws::kwsindex

#endif
