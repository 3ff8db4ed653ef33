#ifndef KWS_TYPES_HPP
#define KWS_TYPES_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "kws/text.hpp"

namespace kws {

using Phoneme = std::string;
using PhonemeSeq = std::vector<Phoneme>;

// Ordered set of morphosyntactic feature tags; canonical form is the
// semicolon-joined uppercase sequence, e.g. "V;PRS;3;SG".
class MorphBundle {
public:
    MorphBundle() = default;
    explicit MorphBundle(std::vector<std::string> tags);
    static MorphBundle parse(std::string_view canonical);

    const std::vector<std::string>& tags() const { return tags_; }
    const std::string& str() const { return canonical_; }
    bool empty() const { return tags_.empty(); }

    bool operator==(const MorphBundle& o) const { return canonical_ == o.canonical_; }
    bool operator<(const MorphBundle& o) const { return canonical_ < o.canonical_; }

private:
    std::vector<std::string> tags_;
    std::string canonical_;
};

struct Paradigm {
    std::string lexeme_id;
    std::string lemma;
    std::map<MorphBundle, std::set<std::string>> entries;

    std::set<std::string> all_forms() const;
};

struct PronLexicon {
    // surface form (folded) -> pronunciations
    std::map<std::string, std::vector<PhonemeSeq>> entries;

    bool contains(const std::string& form) const { return entries.count(form) != 0; }
    const std::vector<PhonemeSeq>* find(const std::string& form) const;
    // Appends a pronunciation, deduplicating identical ones.
    void add(const std::string& form, PhonemeSeq pron);
};

struct TranscriptToken {
    std::string utterance_id;
    int channel = 1;
    double start = 0.0;
    double duration = 0.0;
    std::string word;

    double end() const { return start + duration; }
};

struct Transcript {
    std::vector<TranscriptToken> tokens;  // sorted by (utterance_id, start)
    std::map<std::string, double> utterance_seconds;

    double total_seconds() const;
};

struct TrainingPair {
    std::string lemma;
    MorphBundle bundle;
    std::string form;
    double weight = 1.0;
};

}  // namespace kws

#endif
