#ifndef KWS_LATTICESIM_HPP
#define KWS_LATTICESIM_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "kws/lm.hpp"
#include "kws/types.hpp"

namespace kws::latticesim {

inline constexpr const char* kEpsilon = "<eps>";

struct ConfusionSlot {
    double start = 0.0;
    double duration = 0.0;
    // posterior-descending, ties lexicographic; posteriors sum to 1
    std::vector<std::pair<std::string, double>> alternatives;
};

struct ConfusionNetwork {
    std::string utterance_id;
    std::vector<ConfusionSlot> slots;
};

struct SimParams {
    double alpha = 4.0;      // phonetic sharpness, posterior ~ exp(-alpha*d)
    double radius = 0.34;    // max normalized phonetic distance for candidacy
    double p_del = 0.05;     // probability of suppressing the correct word
    double gamma = 0.2;      // LM interpolation weight
    size_t max_alts = 6;
    std::uint64_t seed = 1;

    void validate() const;
};

// Levenshtein over phoneme symbols, unit costs, normalized by the longer
// length; 0 for two empty sequences.
double phonetic_distance(const PhonemeSeq& a, const PhonemeSeq& b);

// Min over pronunciation pairs.
double word_distance(const std::vector<PhonemeSeq>& a, const std::vector<PhonemeSeq>& b);

// One confusion network per utterance, one slot per reference token.
// Fully deterministic given inputs and params.seed; `threads` > 1 runs
// utterances in parallel with identical output.
std::vector<ConfusionNetwork> simulate(const Transcript& transcript, const PronLexicon& lexicon,
                                       const lm::NGramLM* language_model, const SimParams& params,
                                       size_t threads = 1);

// TSV interchange: "utt slot start dur word|<eps> posterior".
void save_networks(const std::vector<ConfusionNetwork>& networks, std::ostream& out);
std::vector<ConfusionNetwork> load_networks(std::istream& in);

}  // namespace kws::latticesim

#endif
