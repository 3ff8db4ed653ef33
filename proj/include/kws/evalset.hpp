#ifndef KWS_EVALSET_HPP
#define KWS_EVALSET_HPP

#include <iosfwd>

#include "kws/types.hpp"

namespace kws::evalset {

struct Reference {
    std::string utterance_id;
    double start = 0.0;
    double duration = 0.0;
    std::string form;

    bool operator==(const Reference&) const = default;
};

struct EvalLexeme {
    std::string lexeme_id;
    std::string lemma;
    std::set<std::string> surviving_forms;
    std::vector<Reference> references;  // sorted by (utterance_id, start)
};

struct Exclusion {
    std::string form;
    std::string reason;  // "ambiguous" or "oov-lexicon"

    bool operator==(const Exclusion&) const = default;
};

struct EvalSet {
    std::vector<EvalLexeme> lexemes;  // sorted by lexeme_id
    double total_speech_seconds = 0.0;
    std::vector<Exclusion> exclusion_log;

    const EvalLexeme* find(const std::string& lexeme_id) const;
};

// Candidate forms are transcript-vocabulary inflections; forms occurring
// in more than one paradigm are dropped first ("ambiguous"), then forms
// absent from the lexicon ("oov-lexicon"). A lexeme survives if at least
// one surviving form occurs in the transcript.
EvalSet build_eval_set(const std::vector<Paradigm>& paradigms, const Transcript& transcript,
                       const PronLexicon& lexicon);

// Forms of the lexeme with at least one reference occurrence.
std::set<std::string> oracle_forms(const EvalLexeme& lexeme);

// All paradigm forms passing the ambiguity filter (lexicon filter not
// applied); throws on an empty result.
std::set<std::string> unimorph_forms(const Paradigm& paradigm,
                                     const std::vector<Paradigm>& all_paradigms);

void save_manifest(const EvalSet& es, std::ostream& out);
void save_references(const EvalSet& es, std::ostream& out);
EvalSet load(std::istream& manifest, std::istream& references);

}  // namespace kws::evalset

#endif
