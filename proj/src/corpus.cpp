#include "kws/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace kws::corpus {

namespace {

bool is_comment(const std::string& line) {
    return !line.empty() && line[0] == '#';
}

[[noreturn]] void line_error(const std::string& what, size_t lineno) {
    throw Error(what + " at line " + std::to_string(lineno));
}

double parse_number(const std::string& s, const char* what, size_t lineno) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        line_error(std::string("malformed ") + what + " '" + s + "'", lineno);
    }
}

template <typename Fn>
void for_each_line(std::istream& in, bool keep_comments, Fn fn) {
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        if (!keep_comments && is_comment(line)) continue;
        fn(line, lineno);
    }
}

}  // namespace

std::vector<Paradigm> load_unimorph(std::istream& in) {
    std::map<std::string, Paradigm> by_id;
    for_each_line(in, false, [&](const std::string& line, size_t lineno) {
        auto fields = text::split(line, '\t');
        if (fields.size() != 3) line_error("expected 3 tab-separated fields", lineno);
        std::string lemma = text::fold(text::trim(fields[0]));
        std::string form = text::fold(text::trim(fields[1]));
        if (lemma.empty() || form.empty()) line_error("empty lemma or form", lineno);
        MorphBundle bundle;
        try {
            bundle = MorphBundle::parse(fields[2]);
        } catch (const Error& e) {
            line_error(e.what(), lineno);
        }
        std::string lexeme_id = lemma + "#" + bundle.tags().front();
        auto& p = by_id[lexeme_id];
        p.lexeme_id = lexeme_id;
        p.lemma = lemma;
        p.entries[bundle].insert(form);
    });
    std::vector<Paradigm> out;
    out.reserve(by_id.size());
    for (auto& [id, p] : by_id) out.push_back(std::move(p));
    return out;
}

PronLexicon load_lexicon(std::istream& in) {
    PronLexicon lex;
    for_each_line(in, false, [&](const std::string& line, size_t lineno) {
        auto fields = text::split(line, '\t');
        if (fields.size() < 2) line_error("expected 'word<TAB>phonemes'", lineno);
        std::string word = text::fold(text::trim(fields[0]));
        if (word.empty()) line_error("empty word", lineno);
        // Phonemes may be tab- or space-separated after the word field.
        PhonemeSeq pron;
        for (size_t i = 1; i < fields.size(); ++i)
            for (auto& ph : text::split_ws(fields[i])) pron.push_back(ph);
        if (pron.empty()) line_error("empty pronunciation", lineno);
        lex.add(word, std::move(pron));
    });
    return lex;
}

Transcript load_transcript(std::istream& in) {
    Transcript t;
    std::set<std::string> has_header;
    for_each_line(in, true, [&](const std::string& line, size_t lineno) {
        auto fields = text::split_ws(line);
        if (is_comment(line)) {
            if (fields.size() == 3 && fields[0] == "#utt") {
                double dur = parse_number(fields[2], "utterance duration", lineno);
                if (dur <= 0) line_error("non-positive utterance duration", lineno);
                t.utterance_seconds[fields[1]] = dur;
                has_header.insert(fields[1]);
            }
            return;  // other comments ignored
        }
        if (fields.size() != 5) line_error("expected 'utt chan start dur word'", lineno);
        TranscriptToken tok;
        tok.utterance_id = fields[0];
        tok.channel = static_cast<int>(parse_number(fields[1], "channel", lineno));
        tok.start = parse_number(fields[2], "start time", lineno);
        tok.duration = parse_number(fields[3], "duration", lineno);
        tok.word = text::fold(fields[4]);
        if (tok.start < 0) line_error("negative start time", lineno);
        if (tok.duration <= 0) line_error("non-positive token duration", lineno);
        t.tokens.push_back(std::move(tok));
    });
    std::stable_sort(t.tokens.begin(), t.tokens.end(),
                     [](const TranscriptToken& a, const TranscriptToken& b) {
                         if (a.utterance_id != b.utterance_id)
                             return a.utterance_id < b.utterance_id;
                         return a.start < b.start;
                     });
    constexpr double kOverlapEps = 1e-9;
    for (size_t i = 1; i < t.tokens.size(); ++i) {
        const auto& prev = t.tokens[i - 1];
        const auto& cur = t.tokens[i];
        if (prev.utterance_id == cur.utterance_id && cur.start < prev.end() - kOverlapEps) {
            std::ostringstream msg;
            msg << "overlapping tokens in utterance " << cur.utterance_id << ": '"
                << prev.word << "' at " << prev.start << "+" << prev.duration << " and '"
                << cur.word << "' at " << cur.start;
            throw Error(msg.str());
        }
    }
    // Duration falls back to the last token end when no header was given.
    for (const auto& tok : t.tokens) {
        if (has_header.count(tok.utterance_id)) continue;
        double& dur = t.utterance_seconds[tok.utterance_id];
        dur = std::max(dur, tok.end());
    }
    return t;
}

std::vector<TrainingPair> load_training_pairs(std::istream& in) {
    std::vector<TrainingPair> out;
    for_each_line(in, false, [&](const std::string& line, size_t lineno) {
        auto fields = text::split(line, '\t');
        if (fields.size() != 3 && fields.size() != 4)
            line_error("expected 'lemma<TAB>form<TAB>features[<TAB>weight]'", lineno);
        TrainingPair p;
        p.lemma = text::fold(text::trim(fields[0]));
        p.form = text::fold(text::trim(fields[1]));
        if (p.lemma.empty() || p.form.empty()) line_error("empty lemma or form", lineno);
        try {
            p.bundle = MorphBundle::parse(fields[2]);
        } catch (const Error& e) {
            line_error(e.what(), lineno);
        }
        if (fields.size() == 4) {
            p.weight = parse_number(fields[3], "weight", lineno);
            if (p.weight < 0) line_error("negative weight", lineno);
        }
        out.push_back(std::move(p));
    });
    return out;
}

namespace {
template <typename Fn>
auto from_file(const std::string& path, Fn fn) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        return fn(in);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}
}  // namespace

std::vector<Paradigm> load_unimorph_file(const std::string& path) {
    return from_file(path, [](std::istream& in) { return load_unimorph(in); });
}
PronLexicon load_lexicon_file(const std::string& path) {
    return from_file(path, [](std::istream& in) { return load_lexicon(in); });
}
Transcript load_transcript_file(const std::string& path) {
    return from_file(path, [](std::istream& in) { return load_transcript(in); });
}
std::vector<TrainingPair> load_training_pairs_file(const std::string& path) {
    return from_file(path, [](std::istream& in) { return load_training_pairs(in); });
}

}  // namespace kws::corpus
