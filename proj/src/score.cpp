#include "kws/score.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace kws::score {

void ScoringConfig::validate() const {
    if (beta < 0) throw Error("score: beta must be >= 0");
    if (time_tolerance <= 0) throw Error("score: tolerance must be > 0");
    if (theta && (*theta < 0 || *theta > 1)) throw Error("score: theta must be in [0,1]");
}

size_t LexemeScore::correct_at(double theta) const {
    size_t n = 0;
    for (const auto& h : hits)
        if (h.is_correct && h.score >= theta) ++n;
    return n;
}

size_t LexemeScore::false_alarms_at(double theta) const {
    size_t n = 0;
    for (const auto& h : hits)
        if (!h.is_correct && h.score >= theta) ++n;
    return n;
}

double LexemeScore::p_miss(double theta) const {
    return 1.0 - double(correct_at(theta)) / double(n_true);
}

double LexemeScore::p_fa(double theta, double total_speech_seconds) const {
    return double(false_alarms_at(theta)) / (total_speech_seconds - double(n_true));
}

std::vector<LexemeScore> align_hits(
    const std::map<std::string, kwsindex::KeywordResultSet>& results,
    const evalset::EvalSet& references, double tolerance) {
    std::vector<LexemeScore> out;
    for (const auto& lex : references.lexemes) {
        LexemeScore ls;
        ls.lexeme_id = lex.lexeme_id;
        ls.n_true = lex.references.size();
        if (ls.n_true == 0) throw Error("align_hits: lexeme with zero references");

        std::vector<kwsindex::Hit> hits;
        auto rit = results.find(lex.lexeme_id);
        if (rit != results.end()) hits = rit->second.hits;
        std::sort(hits.begin(), hits.end(),
                  [](const kwsindex::Hit& a, const kwsindex::Hit& b) {
                      if (a.score != b.score) return a.score > b.score;
                      if (a.utterance_id != b.utterance_id) return a.utterance_id < b.utterance_id;
                      return a.start < b.start;
                  });
        std::vector<bool> matched(lex.references.size(), false);
        for (const auto& h : hits) {
            double mid = h.midpoint();
            bool correct = false;
            for (size_t r = 0; r < lex.references.size(); ++r) {
                if (matched[r]) continue;
                const auto& ref = lex.references[r];
                if (ref.utterance_id != h.utterance_id) continue;
                if (mid >= ref.start - tolerance && mid <= ref.start + ref.duration + tolerance) {
                    matched[r] = true;
                    correct = true;
                    break;
                }
            }
            ls.hits.push_back({h.score, correct});
        }
        out.push_back(std::move(ls));
    }
    return out;
}

double twv_at(const std::vector<LexemeScore>& scores, double theta, double beta,
              double total_speech_seconds) {
    if (theta < 0 || theta > 1) throw Error("twv_at: theta must be in [0,1]");
    if (scores.empty()) throw Error("twv_at: no lexemes");
    double acc = 0.0;
    for (const auto& ls : scores) {
        if (total_speech_seconds <= double(ls.n_true))
            throw Error("twv_at: total speech time must exceed reference count");
        acc += ls.p_miss(theta) + beta * ls.p_fa(theta, total_speech_seconds);
    }
    return 1.0 - acc / double(scores.size());
}

std::pair<double, double> atwv(const std::vector<LexemeScore>& scores,
                               std::optional<double> theta, double beta,
                               double total_speech_seconds) {
    if (theta) return {twv_at(scores, *theta, beta, total_speech_seconds), *theta};
    std::set<double> candidates;
    for (const auto& ls : scores)
        for (const auto& h : ls.hits) candidates.insert(h.score);
    // reject-all baseline: TWV = 0
    double best = 0.0, best_theta = 1.0;
    for (double t : candidates) {
        double v = twv_at(scores, t, beta, total_speech_seconds);
        if (v > best || (v == best && t > best_theta)) {
            best = v;
            best_theta = t;
        }
    }
    return {best, best_theta};
}

double otwv(const std::vector<LexemeScore>& scores, double beta, double total_speech_seconds) {
    if (scores.empty()) throw Error("otwv: no lexemes");
    double acc = 0.0;
    for (const auto& ls : scores) {
        double best = 0.0;  // reject-all term
        for (const auto& h : ls.hits) {
            double t = h.score;
            double v = 1.0 - ls.p_miss(t) - beta * ls.p_fa(t, total_speech_seconds);
            best = std::max(best, v);
        }
        acc += best;
    }
    return acc / double(scores.size());
}

double stwv(const std::vector<LexemeScore>& scores) {
    if (scores.empty()) throw Error("stwv: no lexemes");
    double acc = 0.0;
    for (const auto& ls : scores) acc += double(ls.correct_at(0.0)) / double(ls.n_true);
    return acc / double(scores.size());
}

TwvReport evaluate(const std::map<std::string, kwsindex::KeywordResultSet>& results,
                   const evalset::EvalSet& references, const ScoringConfig& config) {
    config.validate();
    auto scores = align_hits(results, references, config.time_tolerance);
    TwvReport report;
    report.beta = config.beta;
    report.time_tolerance = config.time_tolerance;
    report.total_speech_seconds = references.total_speech_seconds;
    auto [a, t] = atwv(scores, config.theta, config.beta, references.total_speech_seconds);
    report.atwv = a;
    report.theta = t;
    report.otwv = otwv(scores, config.beta, references.total_speech_seconds);
    report.stwv = stwv(scores);
    for (const auto& ls : scores) {
        LexemeReport lr;
        lr.lexeme_id = ls.lexeme_id;
        lr.n_true = ls.n_true;
        lr.n_correct = ls.correct_at(report.theta);
        lr.n_fa = ls.false_alarms_at(report.theta);
        double best_v = 0.0, best_t = 1.0;
        for (const auto& h : ls.hits) {
            double v = 1.0 - ls.p_miss(h.score) -
                       config.beta * ls.p_fa(h.score, references.total_speech_seconds);
            if (v > best_v || (v == best_v && h.score > best_t)) {
                best_v = v;
                best_t = h.score;
            }
        }
        lr.best_theta = best_t;
        lr.twv = 1.0 - ls.p_miss(report.theta) -
                 config.beta * ls.p_fa(report.theta, references.total_speech_seconds);
        report.lexemes.push_back(std::move(lr));
    }
    return report;
}

void save_report_csv(const TwvReport& report, std::ostream& out) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(6);
    os << "lexeme_id,n_true,n_correct,n_fa,best_theta,twv\n";
    for (const auto& lr : report.lexemes)
        os << lr.lexeme_id << "," << lr.n_true << "," << lr.n_correct << "," << lr.n_fa << ","
           << lr.best_theta << "," << lr.twv << "\n";
    out << os.str();
}

void save_report_json(const TwvReport& report, std::ostream& out) {
    nlohmann::ordered_json j;
    j["atwv"] = report.atwv;
    j["otwv"] = report.otwv;
    j["stwv"] = report.stwv;
    j["theta"] = report.theta;
    j["beta"] = report.beta;
    j["tolerance"] = report.time_tolerance;
    j["total_speech_seconds"] = report.total_speech_seconds;
    out << j.dump(2) << "\n";
}

}  // namespace kws::score
