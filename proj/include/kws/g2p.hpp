#ifndef KWS_G2P_HPP
#define KWS_G2P_HPP

#include <iosfwd>
#include <map>

#include "kws/types.hpp"

namespace kws::g2p {

// Joint grapheme/phoneme alignment unit. The grapheme side is never
// empty; the phoneme side may be (silent letters).
struct Graphone {
    std::string graphemes;
    PhonemeSeq phonemes;

    auto operator<=>(const Graphone&) const = default;
};

struct AlignConfig {
    size_t g_max = 2;
    size_t p_max = 2;
    size_t em_iters = 10;
};

struct AlignedCorpus {
    std::vector<std::vector<Graphone>> sequences;
    std::vector<std::string> skipped;        // unsegmentable words, warned
    std::vector<double> iteration_loglik;    // one entry per EM iteration
};

using LexiconPair = std::pair<std::string, PhonemeSeq>;

// Many-to-many EM alignment over all segmentations, then per-pair
// Viterbi segmentation under the converged unigram graphone model.
AlignedCorpus align(const std::vector<LexiconPair>& pairs, const AlignConfig& config = {});

class G2PModel {
public:
    G2PModel() = default;
    G2PModel(std::vector<Graphone> inventory, size_t order);

    size_t order() const { return order_; }
    const std::vector<Graphone>& inventory() const { return inventory_; }

    void add_sequence(const std::vector<Graphone>& seq, double weight = 1.0);

    // Witten-Bell smoothed conditional; event is a graphone id or eos_id().
    double prob(int event, const std::vector<int>& history) const;
    int eos_id() const { return static_cast<int>(inventory_.size()); }
    int bos_id() const { return static_cast<int>(inventory_.size()) + 1; }
    int graphone_id(const Graphone& g) const;

    const std::map<std::vector<int>, std::map<int, double>>& counts() const { return counts_; }

private:
    std::vector<Graphone> inventory_;
    std::map<Graphone, int> ids_;
    size_t order_ = 3;
    // history (most recent last) -> event -> count
    std::map<std::vector<int>, std::map<int, double>> counts_;
    std::map<std::vector<int>, double> totals_;
    std::map<std::vector<int>, double> distinct_;

    friend G2PModel load_model(std::istream&);
};

G2PModel train(const AlignedCorpus& aligned, size_t order = 3);

struct Transcription {
    PhonemeSeq phonemes;
    double logprob = 0.0;
};

Transcription transcribe(const G2PModel& model, const std::string& word, size_t beam_width);

// Forms already present keep their pronunciations; missing forms get
// their 1-best pronunciation; untranscribable forms are dropped and
// logged.
std::pair<PronLexicon, std::vector<std::pair<std::string, std::string>>> augment_lexicon(
    const PronLexicon& lexicon, const std::set<std::string>& forms, const G2PModel& model,
    size_t beam_width = 32);

void save_model(const G2PModel& model, std::ostream& out);
G2PModel load_model(std::istream& in);

}  // namespace kws::g2p

#endif
