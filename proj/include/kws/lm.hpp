#ifndef KWS_LM_HPP
#define KWS_LM_HPP

#include <iosfwd>
#include <map>

#include "kws/types.hpp"

namespace kws::lm {

inline constexpr const char* kBos = "<s>";
inline constexpr const char* kEos = "</s>";

// Backoff n-gram model with modified Kneser-Ney discounting, stored in
// ARPA form (log10 probabilities + backoff weights). A reserved unigram
// mass `unk_mass` is split uniformly over words registered as unseen.
class NGramLM {
public:
    static NGramLM train(const std::vector<std::vector<std::string>>& sentences, size_t order = 4,
                         double unk_mass = 1e-3);
    static NGramLM train_text(std::istream& text, size_t order = 4, double unk_mass = 1e-3);

    size_t order() const { return order_; }
    const std::set<std::string>& vocab() const { return vocab_; }
    const std::set<std::string>& unseen_pool() const { return pool_; }
    double unk_mass() const { return unk_mass_; }

    bool known(const std::string& word) const;

    // Adds out-of-vocabulary words to the unseen pool; in-vocabulary
    // words are a no-op, re-registering is idempotent. Must happen
    // before freeze().
    void register_unseen(const std::vector<std::string>& words);
    void freeze() { frozen_ = true; }
    bool frozen() const { return frozen_; }

    // log10 p(word | history); history older-to-newer, truncated from
    // the left to order-1. Throws for unregistered unknown words.
    double logprob(const std::string& word, const std::vector<std::string>& history) const;

    double perplexity(const std::vector<std::vector<std::string>>& sentences) const;
    double perplexity_text(std::istream& text) const;

    void save_arpa(std::ostream& out) const;
    static NGramLM load_arpa(std::istream& in);

private:
    size_t order_ = 4;
    double unk_mass_ = 0.0;
    bool frozen_ = false;
    std::set<std::string> vocab_;  // includes <s> and </s>
    std::set<std::string> pool_;
    // probs_[n-1]: space-joined n-gram -> log10 prob; bows_[n-1]: history -> log10 bow
    std::vector<std::map<std::string, double>> probs_;
    std::vector<std::map<std::string, double>> bows_;

    double pool_logprob() const;
};

std::vector<std::vector<std::string>> read_sentences(std::istream& text);

}  // namespace kws::lm

#endif
