#ifndef KWS_SCORE_HPP
#define KWS_SCORE_HPP

#include <iosfwd>
#include <map>
#include <optional>

#include "kws/evalset.hpp"
#include "kws/kwsindex.hpp"

namespace kws::score {

struct ScoringConfig {
    double beta = 999.9;            // false-alarm weight (NIST STD 2006)
    double time_tolerance = 0.5;    // seconds
    std::optional<double> theta;    // global threshold; nullopt = "auto"

    void validate() const;
};

struct LabeledHit {
    double score = 0.0;
    bool is_correct = false;
};

struct LexemeScore {
    std::string lexeme_id;
    size_t n_true = 0;                // reference occurrences (>= 1)
    std::vector<LabeledHit> hits;     // score-descending

    size_t correct_at(double theta) const;
    size_t false_alarms_at(double theta) const;
    double p_miss(double theta) const;
    double p_fa(double theta, double total_speech_seconds) const;
};

struct LexemeReport {
    std::string lexeme_id;
    size_t n_true = 0;
    size_t n_correct = 0;  // at the report threshold (ATWV theta)
    size_t n_fa = 0;
    double best_theta = 0.0;  // per-lexeme optimum (OTWV)
    double twv = 0.0;         // per-lexeme TWV at the report threshold
};

struct TwvReport {
    double atwv = 0.0;
    double otwv = 0.0;
    double stwv = 0.0;
    double theta = 0.0;  // global threshold actually used
    double beta = 999.9;
    double time_tolerance = 0.5;
    double total_speech_seconds = 0.0;
    std::vector<LexemeReport> lexemes;
};

// NIST-style time congruence: a hit matches a reference when its
// midpoint lies within [ref.start - tol, ref.end + tol]; greedy
// one-to-one matching in descending hit-score order.
std::vector<LexemeScore> align_hits(const std::map<std::string, kwsindex::KeywordResultSet>& results,
                                    const evalset::EvalSet& references, double tolerance);

// TWV(theta) = 1 - mean over lexemes of [P_miss + beta * P_fa], with one
// trial per second of speech.
double twv_at(const std::vector<LexemeScore>& scores, double theta, double beta,
              double total_speech_seconds);

// Shared global threshold; nullopt sweeps all distinct hit scores (plus
// reject-all) and keeps the maximizer. Returns (twv, theta used).
std::pair<double, double> atwv(const std::vector<LexemeScore>& scores,
                               std::optional<double> theta, double beta,
                               double total_speech_seconds);

// Mean over lexemes of the per-lexeme optimal TWV term.
double otwv(const std::vector<LexemeScore>& scores, double beta, double total_speech_seconds);

// 1 - mean P_miss with every hit accepted and beta = 0.
double stwv(const std::vector<LexemeScore>& scores);

TwvReport evaluate(const std::map<std::string, kwsindex::KeywordResultSet>& results,
                   const evalset::EvalSet& references, const ScoringConfig& config);

void save_report_csv(const TwvReport& report, std::ostream& out);
void save_report_json(const TwvReport& report, std::ostream& out);

}  // namespace kws::score

#endif
