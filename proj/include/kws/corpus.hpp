#ifndef KWS_CORPUS_HPP
#define KWS_CORPUS_HPP

#include <iosfwd>
#include <vector>

#include "kws/types.hpp"

namespace kws::corpus {

// UniMorph 3-column convention: lemma<TAB>form<TAB>features.
// One Paradigm per distinct (lemma, POS); output sorted by lexeme_id.
std::vector<Paradigm> load_unimorph(std::istream& in);

// "word<TAB>phoneme phoneme ...", one pronunciation per line; repeated
// words accumulate, identical pronunciations deduplicate.
PronLexicon load_lexicon(std::istream& in);

// CTM-like: "utt chan start dur word". Optional "#utt <id> <dur>" header
// sets utterance duration; otherwise last token end is used.
Transcript load_transcript(std::istream& in);

// "lemma<TAB>form<TAB>features[<TAB>weight]"; missing weight = 1.0.
std::vector<TrainingPair> load_training_pairs(std::istream& in);

std::vector<Paradigm> load_unimorph_file(const std::string& path);
PronLexicon load_lexicon_file(const std::string& path);
Transcript load_transcript_file(const std::string& path);
std::vector<TrainingPair> load_training_pairs_file(const std::string& path);

}  // namespace kws::corpus

#endif
