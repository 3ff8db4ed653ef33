#ifndef KWS_INFLECT_HPP
#define KWS_INFLECT_HPP

#include <iosfwd>
#include <map>
#include <utility>

#include "kws/types.hpp"

namespace kws::inflect {

struct InflectionHypothesis {
    std::string form;
    MorphBundle bundle;
    double confidence = 0.0;  // in (0, 1]
    std::string source;       // "rule", "char", "ensemble", "import"
};

// (strip, append) -> aggregated weighted count, per bundle.
using RuleKey = std::pair<std::string, std::string>;
using RuleTable = std::map<std::string, std::map<RuleKey, double>>;

// Per-bundle character trigram model over the appended suffix, with a
// strip-length distribution. Contexts are the two preceding characters
// (stem-final characters seed the context).
struct CharNgramModel {
    std::map<size_t, double> strip_len_counts;
    std::map<std::pair<std::u32string, char32_t>, double> trigram_counts;
    std::map<std::u32string, double> context_totals;
    std::set<char32_t> alphabet;  // append characters seen for this bundle
};

struct GeneratorModel {
    RuleTable rules;
    std::map<std::string, CharNgramModel> char_models;  // by bundle canonical
    double lambda = 0.5;  // ensemble weight on the rule generator
};

// Longest-common-prefix rule extraction; strips extended into the common
// prefix by up to kStripContext extra characters are counted as well.
RuleTable train_rules(const std::vector<TrainingPair>& pairs);

GeneratorModel train(const std::vector<TrainingPair>& pairs, double lambda = 0.5);

// k-best hypotheses, confidence-descending, deduplicated by form, ties
// broken lexicographically. Unknown bundle falls back to the identity
// hypothesis. The underlying ranking does not depend on k, so the form
// set of generate(k) is a prefix of generate(k+1)'s.
std::vector<InflectionHypothesis> generate(const GeneratorModel& model,
                                           const std::string& lemma, const MorphBundle& bundle,
                                           size_t k);

// Union of generate() over bundles; duplicate forms keep max confidence;
// the lemma itself is always included. Sorted confidence-descending.
std::vector<std::pair<std::string, double>> expand_lexeme(const GeneratorModel& model,
                                                          const std::string& lemma,
                                                          const std::vector<MorphBundle>& bundles,
                                                          size_t k);

// "lemma<TAB>bundle<TAB>form<TAB>score"; scores replaced by rank scaling
// r_i = (k - i) / (k (k + 1) / 2) within each (lemma, bundle) group.
std::vector<InflectionHypothesis> import_kbest(std::istream& in);
void export_kbest(const std::string& lemma, const std::vector<InflectionHypothesis>& hyps,
                  std::ostream& out);

void save_model(const GeneratorModel& model, std::ostream& out);
GeneratorModel load_model(std::istream& in);

}  // namespace kws::inflect

#endif
