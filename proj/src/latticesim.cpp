#include "kws/latticesim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace kws::latticesim {

void SimParams::validate() const {
    if (alpha <= 0) throw Error("sim: alpha must be > 0");
    if (radius <= 0 || radius > 1) throw Error("sim: radius must be in (0,1]");
    if (p_del < 0 || p_del >= 1) throw Error("sim: p_del must be in [0,1)");
    if (gamma < 0 || gamma > 1) throw Error("sim: gamma must be in [0,1]");
    if (max_alts < 1) throw Error("sim: max_alts must be >= 1");
}

double phonetic_distance(const PhonemeSeq& a, const PhonemeSeq& b) {
    size_t m = a.size(), n = b.size();
    if (m == 0 && n == 0) return 0.0;
    std::vector<size_t> prev(n + 1), cur(n + 1);
    for (size_t j = 0; j <= n; ++j) prev[j] = j;
    for (size_t i = 1; i <= m; ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= n; ++j) {
            size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return double(prev[n]) / double(std::max(m, n));
}

double word_distance(const std::vector<PhonemeSeq>& a, const std::vector<PhonemeSeq>& b) {
    double best = 1.0;
    for (const auto& pa : a)
        for (const auto& pb : b) best = std::min(best, phonetic_distance(pa, pb));
    return best;
}

namespace {

struct Candidate {
    const std::string* word;
    double dist;
};

// Candidates within radius of a reference word, reference included.
using CandidateMap = std::unordered_map<std::string, std::vector<Candidate>>;

CandidateMap build_candidates(const Transcript& transcript, const PronLexicon& lexicon,
                              const SimParams& params) {
    CandidateMap out;
    for (const auto& tok : transcript.tokens) {
        if (out.count(tok.word)) continue;
        const auto* ref_prons = lexicon.find(tok.word);
        if (!ref_prons)
            throw Error("sim: transcript word '" + tok.word +
                        "' missing from lexicon (augment the lexicon first)");
        size_t ref_min = SIZE_MAX, ref_max = 0;
        for (const auto& p : *ref_prons) {
            ref_min = std::min(ref_min, p.size());
            ref_max = std::max(ref_max, p.size());
        }
        std::vector<Candidate> cands;
        for (const auto& [word, prons] : lexicon.entries) {
            // cheap length-difference lower bound on the distance
            size_t lo = SIZE_MAX, hi = 0;
            for (const auto& p : prons) {
                lo = std::min(lo, p.size());
                hi = std::max(hi, p.size());
            }
            size_t max_len = std::max(hi, ref_max);
            size_t diff = lo > ref_max ? lo - ref_max : (ref_min > hi ? ref_min - hi : 0);
            if (max_len > 0 && double(diff) / double(max_len) > params.radius &&
                word != tok.word)
                continue;
            double d = word_distance(*ref_prons, prons);
            if (d <= params.radius || word == tok.word) cands.push_back({&word, d});
        }
        out.emplace(tok.word, std::move(cands));
    }
    return out;
}

ConfusionNetwork simulate_utterance(const std::string& utt,
                                    const std::vector<const TranscriptToken*>& tokens,
                                    const CandidateMap& candidates,
                                    const lm::NGramLM* language_model, const SimParams& params) {
    ConfusionNetwork net;
    net.utterance_id = utt;
    std::mt19937_64 rng(text::fnv1a(utt, params.seed ^ 0x9e3779b97f4a7c15ULL));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::string> history;

    for (const auto* tok : tokens) {
        double del_draw = unif(rng);
        const auto& cands = candidates.at(tok->word);
        std::vector<std::pair<std::string, double>> alts;
        alts.reserve(cands.size() + 1);
        for (const auto& c : cands) {
            double raw = std::exp(-params.alpha * c.dist);
            if (language_model && params.gamma > 0)
                raw *= std::pow(10.0, params.gamma * language_model->logprob(*c.word, history));
            if (*c.word == tok->word && del_draw < params.p_del) {
                alts.push_back({kEpsilon, raw});  // acoustic miss absorbs the mass
            } else {
                alts.push_back({*c.word, raw});
            }
        }
        std::sort(alts.begin(), alts.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (alts.size() > params.max_alts) alts.resize(params.max_alts);
        double total = 0.0;
        for (const auto& [w, s] : alts) total += s;
        for (auto& [w, s] : alts) s /= total;

        if (!alts.empty() && alts.front().first != kEpsilon) history.push_back(alts.front().first);

        ConfusionSlot slot;
        slot.start = tok->start;
        slot.duration = tok->duration;
        slot.alternatives = std::move(alts);
        net.slots.push_back(std::move(slot));
    }
    return net;
}

}  // namespace

std::vector<ConfusionNetwork> simulate(const Transcript& transcript, const PronLexicon& lexicon,
                                       const lm::NGramLM* language_model, const SimParams& params,
                                       size_t threads) {
    params.validate();
    CandidateMap candidates = build_candidates(transcript, lexicon, params);

    // utterances in transcript order (sorted by id)
    std::vector<std::string> utt_order;
    std::unordered_map<std::string, std::vector<const TranscriptToken*>> by_utt;
    for (const auto& tok : transcript.tokens) {
        auto [it, inserted] = by_utt.try_emplace(tok.utterance_id);
        if (inserted) utt_order.push_back(tok.utterance_id);
        it->second.push_back(&tok);
    }

    std::vector<ConfusionNetwork> out(utt_order.size());
    auto work = [&](size_t begin, size_t step) {
        for (size_t i = begin; i < utt_order.size(); i += step)
            out[i] = simulate_utterance(utt_order[i], by_utt.at(utt_order[i]), candidates,
                                        language_model, params);
    };
    if (threads <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
        for (auto& th : pool) th.join();
    }
    return out;
}

void save_networks(const std::vector<ConfusionNetwork>& networks, std::ostream& out) {
    std::ostringstream os;
    os.precision(12);
    for (const auto& net : networks)
        for (size_t s = 0; s < net.slots.size(); ++s) {
            const auto& slot = net.slots[s];
            for (const auto& [word, post] : slot.alternatives)
                os << net.utterance_id << "\t" << s << "\t" << slot.start << "\t"
                   << slot.duration << "\t" << word << "\t" << post << "\n";
        }
    out << os.str();
}

std::vector<ConfusionNetwork> load_networks(std::istream& in) {
    std::vector<ConfusionNetwork> out;
    std::unordered_map<std::string, size_t> index;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty() || line[0] == '#') continue;
        auto f = text::split(line, '\t');
        if (f.size() != 6)
            throw Error("networks: expected 6 fields at line " + std::to_string(lineno));
        auto [it, inserted] = index.try_emplace(f[0], out.size());
        if (inserted) {
            out.emplace_back();
            out.back().utterance_id = f[0];
        }
        auto& net = out[it->second];
        size_t slot_idx = std::stoul(f[1]);
        if (slot_idx >= net.slots.size()) net.slots.resize(slot_idx + 1);
        auto& slot = net.slots[slot_idx];
        slot.start = std::stod(f[2]);
        slot.duration = std::stod(f[3]);
        slot.alternatives.push_back({f[4], std::stod(f[5])});
    }
    return out;
}

}  // namespace kws::latticesim
