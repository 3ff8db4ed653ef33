#include "kws/g2p.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace kws::g2p {

namespace {

struct Pair32 {
    std::u32string graphemes;
    PhonemeSeq phonemes;
    std::string orig;
};

Graphone make_graphone(const std::u32string& g, const PhonemeSeq& p, size_t gi, size_t gn,
                       size_t pi, size_t pn) {
    Graphone gr;
    gr.graphemes = text::utf8_encode(g.substr(gi, gn));
    gr.phonemes.assign(p.begin() + pi, p.begin() + pi + pn);
    return gr;
}

}  // namespace

AlignedCorpus align(const std::vector<LexiconPair>& pairs, const AlignConfig& config) {
    if (pairs.empty()) throw Error("g2p align: empty training set");
    if (config.em_iters < 1) throw Error("g2p align: em_iters must be >= 1");

    AlignedCorpus out;
    std::vector<Pair32> data;
    for (const auto& [word, pron] : pairs) {
        Pair32 p;
        p.graphemes = text::utf8_decode(text::fold(word));
        p.phonemes = pron;
        p.orig = word;
        if (p.graphemes.empty() || p.phonemes.size() > config.p_max * p.graphemes.size()) {
            out.skipped.push_back(word);
            continue;
        }
        data.push_back(std::move(p));
    }
    if (data.empty()) throw Error("g2p align: no segmentable pairs");

    // Collect the graphone candidate inventory from every cell of every
    // pair's segmentation lattice.
    std::map<Graphone, double> theta;
    for (const auto& p : data) {
        size_t m = p.graphemes.size(), n = p.phonemes.size();
        for (size_t i = 0; i < m; ++i)
            for (size_t gn = 1; gn <= config.g_max && i + gn <= m; ++gn)
                for (size_t j = 0; j <= n; ++j)
                    for (size_t pn = 0; pn <= config.p_max && j + pn <= n; ++pn)
                        theta[make_graphone(p.graphemes, p.phonemes, i, gn, j, pn)] = 1.0;
    }
    double uniform = 1.0 / double(theta.size());
    for (auto& [g, v] : theta) v = uniform;

    auto theta_of = [&](const Graphone& g) {
        auto it = theta.find(g);
        return it == theta.end() ? 0.0 : it->second;
    };

    std::vector<size_t> usable;  // indices into data with nonzero lattice mass
    for (size_t idx = 0; idx < data.size(); ++idx) usable.push_back(idx);

    for (size_t iter = 0; iter < config.em_iters; ++iter) {
        std::map<Graphone, double> expected;
        double loglik = 0.0;
        std::vector<size_t> still_usable;
        for (size_t idx : usable) {
            const auto& p = data[idx];
            size_t m = p.graphemes.size(), n = p.phonemes.size();
            auto cell = [n](size_t i, size_t j) { return i * (n + 1) + j; };
            std::vector<double> fwd((m + 1) * (n + 1), 0.0), bwd((m + 1) * (n + 1), 0.0);
            fwd[cell(0, 0)] = 1.0;
            for (size_t i = 0; i <= m; ++i)
                for (size_t j = 0; j <= n; ++j) {
                    double f = fwd[cell(i, j)];
                    if (f == 0.0) continue;
                    for (size_t gn = 1; gn <= config.g_max && i + gn <= m; ++gn)
                        for (size_t pn = 0; pn <= config.p_max && j + pn <= n; ++pn)
                            fwd[cell(i + gn, j + pn)] +=
                                f * theta_of(make_graphone(p.graphemes, p.phonemes, i, gn, j, pn));
                }
            double z = fwd[cell(m, n)];
            if (z <= 0.0) {
                out.skipped.push_back(p.orig);
                continue;
            }
            still_usable.push_back(idx);
            loglik += std::log(z);
            bwd[cell(m, n)] = 1.0;
            for (size_t i = m + 1; i-- > 0;)
                for (size_t j = n + 1; j-- > 0;) {
                    if (i == m && j == n) continue;
                    double acc = 0.0;
                    for (size_t gn = 1; gn <= config.g_max && i + gn <= m; ++gn)
                        for (size_t pn = 0; pn <= config.p_max && j + pn <= n; ++pn)
                            acc += theta_of(make_graphone(p.graphemes, p.phonemes, i, gn, j, pn)) *
                                   bwd[cell(i + gn, j + pn)];
                    bwd[cell(i, j)] = acc;
                }
            for (size_t i = 0; i <= m; ++i)
                for (size_t j = 0; j <= n; ++j) {
                    double f = fwd[cell(i, j)];
                    if (f == 0.0) continue;
                    for (size_t gn = 1; gn <= config.g_max && i + gn <= m; ++gn)
                        for (size_t pn = 0; pn <= config.p_max && j + pn <= n; ++pn) {
                            Graphone g = make_graphone(p.graphemes, p.phonemes, i, gn, j, pn);
                            double th = theta_of(g);
                            if (th == 0.0) continue;
                            expected[g] += f * th * bwd[cell(i + gn, j + pn)] / z;
                        }
                }
        }
        usable = std::move(still_usable);
        if (usable.empty()) throw Error("g2p align: no segmentable pairs");
        out.iteration_loglik.push_back(loglik);
        double total = 0.0;
        for (const auto& [g, c] : expected) total += c;
        theta.clear();
        for (const auto& [g, c] : expected)
            if (c > 0.0) theta[g] = c / total;
    }

    // Viterbi segmentation under the converged model.
    for (size_t idx : usable) {
        const auto& p = data[idx];
        size_t m = p.graphemes.size(), n = p.phonemes.size();
        auto cell = [n](size_t i, size_t j) { return i * (n + 1) + j; };
        std::vector<double> best((m + 1) * (n + 1), -1.0);
        std::vector<std::pair<size_t, size_t>> back((m + 1) * (n + 1), {0, 0});
        best[cell(0, 0)] = 1.0;
        for (size_t i = 0; i <= m; ++i)
            for (size_t j = 0; j <= n; ++j) {
                double b = best[cell(i, j)];
                if (b < 0.0) continue;
                for (size_t gn = 1; gn <= config.g_max && i + gn <= m; ++gn)
                    for (size_t pn = 0; pn <= config.p_max && j + pn <= n; ++pn) {
                        double th = theta_of(make_graphone(p.graphemes, p.phonemes, i, gn, j, pn));
                        if (th == 0.0) continue;
                        double score = b * th;
                        size_t c = cell(i + gn, j + pn);
                        if (score > best[c]) {
                            best[c] = score;
                            back[c] = {gn, pn};
                        }
                    }
            }
        if (best[cell(m, n)] <= 0.0) {
            out.skipped.push_back(p.orig);
            continue;
        }
        std::vector<Graphone> seq;
        size_t i = m, j = n;
        while (i > 0 || j > 0) {
            auto [gn, pn] = back[cell(i, j)];
            i -= gn;
            j -= pn;
            seq.push_back(make_graphone(p.graphemes, p.phonemes, i, gn, j, pn));
        }
        std::reverse(seq.begin(), seq.end());
        out.sequences.push_back(std::move(seq));
    }
    return out;
}

G2PModel::G2PModel(std::vector<Graphone> inventory, size_t order)
    : inventory_(std::move(inventory)), order_(order) {
    if (order_ < 1) throw Error("g2p model: order must be >= 1");
    for (size_t i = 0; i < inventory_.size(); ++i) ids_[inventory_[i]] = static_cast<int>(i);
}

int G2PModel::graphone_id(const Graphone& g) const {
    auto it = ids_.find(g);
    return it == ids_.end() ? -1 : it->second;
}

void G2PModel::add_sequence(const std::vector<Graphone>& seq, double weight) {
    std::vector<int> ids;
    ids.reserve(seq.size() + order_);
    for (size_t i = 0; i + 1 < order_; ++i) ids.push_back(bos_id());
    for (const auto& g : seq) {
        int id = graphone_id(g);
        if (id < 0) throw Error("g2p model: graphone not in inventory");
        ids.push_back(id);
    }
    ids.push_back(eos_id());
    size_t ctx = order_ - 1;
    for (size_t t = ctx; t < ids.size(); ++t) {
        // count every history length 0..order-1 ending at t
        for (size_t h = 0; h <= ctx; ++h) {
            std::vector<int> hist(ids.begin() + (t - h), ids.begin() + t);
            auto& ev = counts_[hist][ids[t]];
            if (ev == 0.0) distinct_[hist] += 1.0;
            ev += weight;
            totals_[hist] += weight;
        }
    }
}

double G2PModel::prob(int event, const std::vector<int>& history) const {
    std::vector<int> hist = history;
    if (hist.size() > order_ - 1) hist.erase(hist.begin(), hist.end() - (order_ - 1));
    // Uniform base over inventory + eos.
    double p = 1.0 / double(inventory_.size() + 1);
    // Build up from the empty history to the longest.
    for (size_t len = 0; len <= hist.size(); ++len) {
        std::vector<int> h(hist.end() - len, hist.end());
        auto tit = totals_.find(h);
        if (tit == totals_.end() || tit->second <= 0.0) continue;  // back off: keep p
        double total = tit->second;
        double t = distinct_.at(h);
        double c = 0.0;
        auto cit = counts_.find(h);
        if (cit != counts_.end()) {
            auto eit = cit->second.find(event);
            if (eit != cit->second.end()) c = eit->second;
        }
        p = (c + t * p) / (total + t);
    }
    return p;
}

G2PModel train(const AlignedCorpus& aligned, size_t order) {
    if (aligned.sequences.empty()) throw Error("g2p train: empty aligned corpus");
    std::set<Graphone> inv;
    for (const auto& seq : aligned.sequences)
        for (const auto& g : seq) inv.insert(g);
    G2PModel model(std::vector<Graphone>(inv.begin(), inv.end()), order);
    for (const auto& seq : aligned.sequences) model.add_sequence(seq);
    return model;
}

Transcription transcribe(const G2PModel& model, const std::string& word, size_t beam_width) {
    if (word.empty()) throw Error("g2p transcribe: empty word");
    if (beam_width < 1) throw Error("g2p transcribe: beam_width must be >= 1");
    std::u32string w = text::utf8_decode(text::fold(word));

    // Character-level coverage check for a useful error message.
    std::set<char32_t> covered;
    for (const auto& g : model.inventory())
        for (char32_t c : text::utf8_decode(g.graphemes)) covered.insert(c);
    std::u32string missing;
    for (char32_t c : w)
        if (!covered.count(c) && missing.find(c) == std::u32string::npos) missing += c;
    if (!missing.empty())
        throw Error("untranscribable word '" + word + "': unseen graphemes '" +
                    text::utf8_encode(missing) + "'");

    struct State {
        std::vector<int> hist;
        PhonemeSeq phonemes;
        double logp = 0.0;
    };
    auto state_less = [](const State& a, const State& b) {
        if (a.logp != b.logp) return a.logp > b.logp;
        return a.phonemes < b.phonemes;
    };

    size_t m = w.size();
    std::vector<std::vector<State>> beams(m + 1);
    std::vector<int> hist0;
    for (size_t i = 0; i + 1 < model.order(); ++i) hist0.push_back(model.bos_id());
    beams[0].push_back({hist0, {}, 0.0});

    // Graphones indexed by grapheme string for matching.
    std::map<std::u32string, std::vector<int>> by_graphemes;
    for (size_t i = 0; i < model.inventory().size(); ++i)
        by_graphemes[text::utf8_decode(model.inventory()[i].graphemes)].push_back(
            static_cast<int>(i));

    for (size_t i = 0; i < m; ++i) {
        auto& cur = beams[i];
        if (cur.empty()) continue;
        if (cur.size() > beam_width) {
            std::sort(cur.begin(), cur.end(), state_less);
            cur.resize(beam_width);
        }
        for (const auto& [gstr, ids] : by_graphemes) {
            if (i + gstr.size() > m) continue;
            if (w.compare(i, gstr.size(), gstr) != 0) continue;
            for (const auto& st : beams[i])
                for (int id : ids) {
                    State ns;
                    ns.hist = st.hist;
                    ns.hist.push_back(id);
                    if (ns.hist.size() > model.order() - 1)
                        ns.hist.erase(ns.hist.begin());
                    ns.phonemes = st.phonemes;
                    const auto& ph = model.inventory()[id].phonemes;
                    ns.phonemes.insert(ns.phonemes.end(), ph.begin(), ph.end());
                    ns.logp = st.logp + std::log(model.prob(id, st.hist));
                    beams[i + gstr.size()].push_back(std::move(ns));
                }
        }
    }

    const State* best = nullptr;
    double best_score = -std::numeric_limits<double>::infinity();
    std::vector<State> finals;
    for (const auto& st : beams[m]) {
        State fs = st;
        fs.logp += std::log(model.prob(model.eos_id(), st.hist));
        finals.push_back(std::move(fs));
    }
    for (const auto& st : finals) {
        if (best == nullptr || st.logp > best_score ||
            (st.logp == best_score && st.phonemes < best->phonemes)) {
            best = &st;
            best_score = st.logp;
        }
    }
    if (best == nullptr)
        throw Error("untranscribable word '" + word + "': no graphone segmentation");
    return {best->phonemes, best_score};
}

std::pair<PronLexicon, std::vector<std::pair<std::string, std::string>>> augment_lexicon(
    const PronLexicon& lexicon, const std::set<std::string>& forms, const G2PModel& model,
    size_t beam_width) {
    PronLexicon out = lexicon;
    std::vector<std::pair<std::string, std::string>> dropped;
    for (const auto& form : forms) {
        std::string folded = text::fold(form);
        if (out.contains(folded)) continue;
        try {
            auto tr = transcribe(model, folded, beam_width);
            out.add(folded, std::move(tr.phonemes));
        } catch (const Error& e) {
            dropped.push_back({folded, e.what()});
        }
    }
    return {std::move(out), std::move(dropped)};
}

void save_model(const G2PModel& model, std::ostream& out) {
    std::ostringstream os;
    os.precision(17);
    os << "order\t" << model.order() << "\n";
    const auto& inv = model.inventory();
    for (size_t i = 0; i < inv.size(); ++i) {
        os << "graphone\t" << i << "\t" << inv[i].graphemes << "\t";
        for (size_t j = 0; j < inv[i].phonemes.size(); ++j)
            os << (j ? " " : "") << inv[i].phonemes[j];
        os << "\n";
    }
    for (const auto& [hist, events] : model.counts())
        for (const auto& [event, count] : events) {
            os << "ngram\t";
            if (hist.empty()) {
                os << "-";
            } else {
                for (size_t i = 0; i < hist.size(); ++i) os << (i ? " " : "") << hist[i];
            }
            os << "\t" << event << "\t" << count << "\t" << std::log10(model.prob(event, hist))
               << "\n";
        }
    out << os.str();
}

G2PModel load_model(std::istream& in) {
    G2PModel model;
    std::string line;
    size_t lineno = 0;
    std::vector<std::pair<std::vector<int>, std::pair<int, double>>> ngrams;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty() || line[0] == '#') continue;
        auto f = text::split(line, '\t');
        try {
            if (f[0] == "order" && f.size() == 2) {
                model.order_ = std::stoul(f[1]);
            } else if (f[0] == "graphone" && f.size() == 4) {
                Graphone g;
                g.graphemes = f[2];
                for (auto& ph : text::split_ws(f[3])) g.phonemes.push_back(ph);
                size_t id = std::stoul(f[1]);
                if (model.inventory_.size() != id) throw Error("graphone ids out of order");
                model.inventory_.push_back(g);
                model.ids_[g] = static_cast<int>(id);
            } else if (f[0] == "ngram" && f.size() >= 4) {
                std::vector<int> hist;
                if (f[1] != "-")
                    for (auto& t : text::split_ws(f[1])) hist.push_back(std::stoi(t));
                ngrams.push_back({hist, {std::stoi(f[2]), std::stod(f[3])}});
            } else {
                throw Error("unrecognized record '" + f[0] + "'");
            }
        } catch (const std::exception& e) {
            throw Error("g2p model load: " + std::string(e.what()) + " at line " +
                        std::to_string(lineno));
        }
    }
    for (const auto& [hist, ev] : ngrams) {
        auto& c = model.counts_[hist][ev.first];
        if (c == 0.0) model.distinct_[hist] += 1.0;
        c += ev.second;
        model.totals_[hist] += ev.second;
    }
    return model;
}

}  // namespace kws::g2p
