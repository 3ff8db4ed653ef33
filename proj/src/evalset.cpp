#include "kws/evalset.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace kws::evalset {

namespace {

// form -> number of paradigms containing it
std::map<std::string, int> paradigm_multiplicity(const std::vector<Paradigm>& paradigms) {
    std::map<std::string, int> mult;
    for (const auto& p : paradigms)
        for (const auto& f : p.all_forms()) ++mult[f];
    return mult;
}

}  // namespace

const EvalLexeme* EvalSet::find(const std::string& lexeme_id) const {
    for (const auto& l : lexemes)
        if (l.lexeme_id == lexeme_id) return &l;
    return nullptr;
}

EvalSet build_eval_set(const std::vector<Paradigm>& paradigms, const Transcript& transcript,
                       const PronLexicon& lexicon) {
    EvalSet es;
    es.total_speech_seconds = transcript.total_seconds();

    std::set<std::string> transcript_vocab;
    for (const auto& tok : transcript.tokens) transcript_vocab.insert(tok.word);

    auto mult = paradigm_multiplicity(paradigms);

    // Candidates: transcript vocabulary that is some paradigm's inflection.
    std::set<std::string> surviving;
    for (const auto& [form, count] : mult) {
        if (!transcript_vocab.count(form)) continue;
        if (count > 1) {
            es.exclusion_log.push_back({form, "ambiguous"});
        } else if (!lexicon.contains(form)) {
            es.exclusion_log.push_back({form, "oov-lexicon"});
        } else {
            surviving.insert(form);
        }
    }

    for (const auto& p : paradigms) {
        EvalLexeme lex;
        lex.lexeme_id = p.lexeme_id;
        lex.lemma = p.lemma;
        for (const auto& f : p.all_forms())
            if (surviving.count(f)) lex.surviving_forms.insert(f);
        if (lex.surviving_forms.empty()) continue;
        for (const auto& tok : transcript.tokens)
            if (lex.surviving_forms.count(tok.word))
                lex.references.push_back({tok.utterance_id, tok.start, tok.duration, tok.word});
        if (lex.references.empty()) continue;
        es.lexemes.push_back(std::move(lex));
    }
    std::sort(es.lexemes.begin(), es.lexemes.end(),
              [](const EvalLexeme& a, const EvalLexeme& b) { return a.lexeme_id < b.lexeme_id; });
    return es;
}

std::set<std::string> oracle_forms(const EvalLexeme& lexeme) {
    std::set<std::string> out;
    for (const auto& r : lexeme.references) out.insert(r.form);
    return out;
}

std::set<std::string> unimorph_forms(const Paradigm& paradigm,
                                     const std::vector<Paradigm>& all_paradigms) {
    auto mult = paradigm_multiplicity(all_paradigms);
    std::set<std::string> out;
    for (const auto& f : paradigm.all_forms())
        if (mult[f] == 1) out.insert(f);
    if (out.empty())
        throw Error("empty keyword: every form of paradigm '" + paradigm.lexeme_id +
                    "' is ambiguous");
    return out;
}

void save_manifest(const EvalSet& es, std::ostream& out) {
    out << "#total_seconds\t" << es.total_speech_seconds << "\n";
    for (const auto& e : es.exclusion_log)
        out << "#excluded\t" << e.form << "\t" << e.reason << "\n";
    for (const auto& l : es.lexemes) {
        out << l.lexeme_id << "\t" << l.lemma << "\t";
        bool first = true;
        for (const auto& f : l.surviving_forms) {
            if (!first) out << "|";
            out << f;
            first = false;
        }
        out << "\n";
    }
}

void save_references(const EvalSet& es, std::ostream& out) {
    for (const auto& l : es.lexemes)
        for (const auto& r : l.references)
            out << l.lexeme_id << "\t" << r.utterance_id << "\t" << r.start << "\t"
                << r.duration << "\t" << r.form << "\n";
}

EvalSet load(std::istream& manifest, std::istream& references) {
    EvalSet es;
    std::map<std::string, size_t> index;
    std::string line;
    size_t lineno = 0;
    while (std::getline(manifest, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        auto fields = text::split(line, '\t');
        if (line[0] == '#') {
            if (fields[0] == "#total_seconds" && fields.size() == 2)
                es.total_speech_seconds = std::stod(fields[1]);
            else if (fields[0] == "#excluded" && fields.size() == 3)
                es.exclusion_log.push_back({fields[1], fields[2]});
            continue;
        }
        if (fields.size() != 3)
            throw Error("manifest: expected 3 fields at line " + std::to_string(lineno));
        EvalLexeme lex;
        lex.lexeme_id = fields[0];
        lex.lemma = fields[1];
        for (const auto& f : text::split(fields[2], '|'))
            if (!f.empty()) lex.surviving_forms.insert(f);
        index[lex.lexeme_id] = es.lexemes.size();
        es.lexemes.push_back(std::move(lex));
    }
    lineno = 0;
    while (std::getline(references, line)) {
        ++lineno;
        if (text::trim(line).empty() || line[0] == '#') continue;
        auto fields = text::split(line, '\t');
        if (fields.size() != 5)
            throw Error("references: expected 5 fields at line " + std::to_string(lineno));
        auto it = index.find(fields[0]);
        if (it == index.end())
            throw Error("references: unknown lexeme '" + fields[0] + "' at line " +
                        std::to_string(lineno));
        es.lexemes[it->second].references.push_back(
            {fields[1], std::stod(fields[2]), std::stod(fields[3]), fields[4]});
    }
    return es;
}

}  // namespace kws::evalset
