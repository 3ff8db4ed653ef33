#include "kws/inflect.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace kws::inflect {

namespace {

constexpr size_t kStripContext = 3;   // extra context characters counted per rule
constexpr double kGroupDelta = 0.2;   // per-level weight decay for shorter strips
constexpr size_t kCharBeam = 256;     // beam width of the character generator
constexpr size_t kCharKeep = 256;     // candidates retained from the character generator
constexpr size_t kMaxAppend = 10;     // maximum generated suffix length
constexpr double kAddK = 0.1;         // add-k smoothing for character trigrams
constexpr char32_t kBos = 0x02;
constexpr char32_t kEnd = 0x03;

size_t cp_len(const std::string& s) { return text::utf8_decode(s).size(); }

std::u32string last_n(const std::u32string& s, size_t n) {
    return s.size() <= n ? s : s.substr(s.size() - n);
}

struct Candidate {
    std::string form;
    double score;
};

void normalize(std::vector<Candidate>& cands) {
    double total = 0.0;
    for (const auto& c : cands) total += c.score;
    if (total > 0)
        for (auto& c : cands) c.score /= total;
}

std::vector<Candidate> rule_candidates(const GeneratorModel& model, const std::string& lemma,
                                       const std::string& bundle_key) {
    auto it = model.rules.find(bundle_key);
    if (it == model.rules.end()) return {};
    // Applicable rules grouped by strip length; the longest applicable
    // strip dominates via normalized specificity weights.
    std::map<size_t, std::vector<std::pair<const RuleKey*, double>>> groups;
    for (const auto& [key, count] : it->second) {
        const auto& strip = key.first;
        if (strip.size() > lemma.size()) continue;
        if (lemma.compare(lemma.size() - strip.size(), strip.size(), strip) != 0) continue;
        std::string form = lemma.substr(0, lemma.size() - strip.size()) + key.second;
        if (form.empty()) continue;
        groups[cp_len(strip)].push_back({&key, count});
    }
    if (groups.empty()) return {};
    size_t max_len = groups.rbegin()->first;
    double weight_total = 0.0;
    std::map<size_t, double> group_weight;
    for (const auto& [len, rules] : groups) {
        double w = std::pow(kGroupDelta, double(max_len - len));
        group_weight[len] = w;
        weight_total += w;
    }
    std::map<std::string, double> scores;
    for (const auto& [len, rules] : groups) {
        double group_total = 0.0;
        for (const auto& [key, count] : rules) group_total += count;
        double mu = group_weight[len] / weight_total;
        for (const auto& [key, count] : rules) {
            std::string form = lemma.substr(0, lemma.size() - key->first.size()) + key->second;
            scores[form] += mu * count / group_total;
        }
    }
    std::vector<Candidate> out;
    out.reserve(scores.size());
    for (const auto& [form, score] : scores) out.push_back({form, score});
    return out;
}

std::vector<Candidate> char_candidates(const GeneratorModel& model, const std::string& lemma,
                                       const std::string& bundle_key) {
    auto it = model.char_models.find(bundle_key);
    if (it == model.char_models.end()) return {};
    const CharNgramModel& cm = it->second;
    if (cm.alphabet.empty() || cm.strip_len_counts.empty()) return {};

    std::u32string lemma32 = text::utf8_decode(lemma);
    double strip_total = 0.0;
    for (const auto& [len, cnt] : cm.strip_len_counts) strip_total += cnt;

    auto logprob = [&](const std::u32string& ctx, char32_t c) {
        double num = kAddK, denom = kAddK * double(cm.alphabet.size() + 1);
        auto tit = cm.trigram_counts.find({ctx, c});
        if (tit != cm.trigram_counts.end()) num += tit->second;
        auto cit = cm.context_totals.find(ctx);
        if (cit != cm.context_totals.end()) denom += cit->second;
        return std::log(num / denom);
    };

    struct State {
        std::u32string ctx;
        std::u32string append;
        double logp;
    };
    std::map<std::string, double> scores;
    for (const auto& [strip_len, cnt] : cm.strip_len_counts) {
        if (strip_len > lemma32.size()) continue;
        double base = std::log(cnt / strip_total);
        std::u32string stem = lemma32.substr(0, lemma32.size() - strip_len);
        std::u32string ctx0 = last_n(std::u32string(2, kBos) + stem, 2);
        std::vector<State> beam{{ctx0, {}, 0.0}};
        for (size_t step = 0; step <= kMaxAppend && !beam.empty(); ++step) {
            std::vector<State> next;
            for (const auto& st : beam) {
                // completion
                double done = base + st.logp + logprob(st.ctx, kEnd);
                std::string form = text::utf8_encode(stem + st.append);
                if (!form.empty()) {
                    double p = std::exp(done);
                    auto [mit, inserted] = scores.try_emplace(form, p);
                    if (!inserted) mit->second += p;
                }
                if (step == kMaxAppend) continue;
                for (char32_t c : cm.alphabet) {
                    State ns;
                    ns.append = st.append + c;
                    ns.ctx = last_n(st.ctx + c, 2);
                    ns.logp = st.logp + logprob(st.ctx, c);
                    next.push_back(std::move(ns));
                }
            }
            std::sort(next.begin(), next.end(), [](const State& a, const State& b) {
                if (a.logp != b.logp) return a.logp > b.logp;
                return a.append < b.append;
            });
            if (next.size() > kCharBeam) next.resize(kCharBeam);
            beam = std::move(next);
        }
    }
    std::vector<Candidate> out;
    out.reserve(scores.size());
    for (const auto& [form, score] : scores) out.push_back({form, score});
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.form < b.form;
    });
    if (out.size() > kCharKeep) out.resize(kCharKeep);
    return out;
}

}  // namespace

RuleTable train_rules(const std::vector<TrainingPair>& pairs) {
    RuleTable table;
    for (const auto& p : pairs) {
        std::u32string lemma = text::utf8_decode(p.lemma);
        std::u32string form = text::utf8_decode(p.form);
        size_t lcp = 0;
        while (lcp < lemma.size() && lcp < form.size() && lemma[lcp] == form[lcp]) ++lcp;
        auto& bundle_rules = table[p.bundle.str()];
        for (size_t e = 0; e <= kStripContext && e <= lcp; ++e) {
            std::string strip = text::utf8_encode(lemma.substr(lcp - e));
            std::string append = text::utf8_encode(form.substr(lcp - e));
            bundle_rules[{strip, append}] += p.weight;
        }
    }
    // Drop zero-weight rules (all pairs for the key had weight 0).
    for (auto& [bundle, rules] : table)
        std::erase_if(rules, [](const auto& kv) { return kv.second <= 0.0; });
    std::erase_if(table, [](const auto& kv) { return kv.second.empty(); });
    return table;
}

GeneratorModel train(const std::vector<TrainingPair>& pairs, double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw Error("lambda must be in [0,1]");
    GeneratorModel model;
    model.lambda = lambda;
    model.rules = train_rules(pairs);
    for (const auto& p : pairs) {
        if (p.weight <= 0.0) continue;
        std::u32string lemma = text::utf8_decode(p.lemma);
        std::u32string form = text::utf8_decode(p.form);
        size_t lcp = 0;
        while (lcp < lemma.size() && lcp < form.size() && lemma[lcp] == form[lcp]) ++lcp;
        CharNgramModel& cm = model.char_models[p.bundle.str()];
        cm.strip_len_counts[lemma.size() - lcp] += p.weight;
        std::u32string stem = lemma.substr(0, lcp);
        std::u32string append = form.substr(lcp);
        std::u32string ctx = last_n(std::u32string(2, kBos) + stem, 2);
        for (char32_t c : append) {
            cm.trigram_counts[{ctx, c}] += p.weight;
            cm.context_totals[ctx] += p.weight;
            cm.alphabet.insert(c);
            ctx = last_n(ctx + c, 2);
        }
        cm.trigram_counts[{ctx, kEnd}] += p.weight;
        cm.context_totals[ctx] += p.weight;
    }
    return model;
}

std::vector<InflectionHypothesis> generate(const GeneratorModel& model, const std::string& lemma,
                                           const MorphBundle& bundle, size_t k) {
    if (lemma.empty()) throw Error("generate: empty lemma");
    if (k < 1) throw Error("generate: k must be >= 1");

    auto rule_list = rule_candidates(model, lemma, bundle.str());
    auto char_list = char_candidates(model, lemma, bundle.str());
    if (rule_list.empty() && char_list.empty()) {
        InflectionHypothesis h;
        h.form = lemma;
        h.bundle = bundle;
        h.confidence = std::numeric_limits<double>::min();
        h.source = "identity";
        return {h};
    }
    normalize(rule_list);
    normalize(char_list);
    std::map<std::string, double> combined;
    for (const auto& c : rule_list) combined[c.form] += model.lambda * c.score;
    for (const auto& c : char_list) combined[c.form] += (1.0 - model.lambda) * c.score;
    std::vector<Candidate> merged;
    merged.reserve(combined.size());
    for (const auto& [form, score] : combined)
        if (score > 0.0) merged.push_back({form, score});
    std::sort(merged.begin(), merged.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.form < b.form;
    });
    if (merged.size() > k) merged.resize(k);
    std::vector<InflectionHypothesis> out;
    out.reserve(merged.size());
    for (const auto& c : merged) {
        InflectionHypothesis h;
        h.form = c.form;
        h.bundle = bundle;
        h.confidence = std::min(1.0, c.score);
        h.source = "ensemble";
        out.push_back(std::move(h));
    }
    return out;
}

std::vector<std::pair<std::string, double>> expand_lexeme(const GeneratorModel& model,
                                                          const std::string& lemma,
                                                          const std::vector<MorphBundle>& bundles,
                                                          size_t k) {
    if (bundles.empty()) throw Error("expand_lexeme: empty bundle list");
    std::map<std::string, double> best;
    for (const auto& b : bundles)
        for (const auto& h : generate(model, lemma, b, k)) {
            auto [it, inserted] = best.try_emplace(h.form, h.confidence);
            if (!inserted) it->second = std::max(it->second, h.confidence);
        }
    best.try_emplace(lemma, std::numeric_limits<double>::min());
    std::vector<std::pair<std::string, double>> out(best.begin(), best.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

std::vector<InflectionHypothesis> import_kbest(std::istream& in) {
    struct Row {
        std::string lemma;
        MorphBundle bundle;
        std::string form;
        double score;
        size_t order;
    };
    std::vector<Row> rows;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty() || line[0] == '#') continue;
        auto fields = text::split(line, '\t');
        if (fields.size() != 4)
            throw Error("k-best import: expected 4 fields at line " + std::to_string(lineno));
        Row r;
        r.lemma = text::fold(fields[0]);
        try {
            r.bundle = MorphBundle::parse(fields[1]);
        } catch (const Error& e) {
            throw Error(std::string("k-best import: ") + e.what() + " at line " +
                        std::to_string(lineno));
        }
        r.form = text::fold(fields[2]);
        if (r.form.empty())
            throw Error("k-best import: empty form at line " + std::to_string(lineno));
        try {
            r.score = std::stod(fields[3]);
        } catch (const std::exception&) {
            throw Error("k-best import: malformed score at line " + std::to_string(lineno));
        }
        r.order = rows.size();
        rows.push_back(std::move(r));
    }
    // Rank scaling within each (lemma, bundle) group.
    std::map<std::pair<std::string, std::string>, std::vector<size_t>> groups;
    for (size_t i = 0; i < rows.size(); ++i)
        groups[{rows[i].lemma, rows[i].bundle.str()}].push_back(i);
    std::vector<InflectionHypothesis> out(rows.size());
    for (auto& [key, idxs] : groups) {
        std::sort(idxs.begin(), idxs.end(), [&](size_t a, size_t b) {
            if (rows[a].score != rows[b].score) return rows[a].score > rows[b].score;
            return rows[a].order < rows[b].order;
        });
        size_t k = idxs.size();
        double denom = double(k) * double(k + 1) / 2.0;
        for (size_t i = 0; i < k; ++i) {
            const Row& r = rows[idxs[i]];
            InflectionHypothesis h;
            h.form = r.form;
            h.bundle = r.bundle;
            h.confidence = double(k - i) / denom;
            h.source = "import";
            out[idxs[i]] = std::move(h);
        }
    }
    return out;
}

void export_kbest(const std::string& lemma, const std::vector<InflectionHypothesis>& hyps,
                  std::ostream& out) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& h : hyps)
        os << lemma << "\t" << h.bundle.str() << "\t" << h.form << "\t" << h.confidence << "\n";
    out << os.str();
}

namespace {

std::string encode_char(char32_t c) {
    if (c == kBos) return "<B>";
    if (c == kEnd) return "<E>";
    return text::utf8_encode(std::u32string(1, c));
}

char32_t decode_char(const std::string& s) {
    if (s == "<B>") return kBos;
    if (s == "<E>") return kEnd;
    auto cps = text::utf8_decode(s);
    if (cps.size() != 1) throw Error("model: bad character field '" + s + "'");
    return cps[0];
}

}  // namespace

void save_model(const GeneratorModel& model, std::ostream& out) {
    std::ostringstream os;
    os.precision(17);
    os << "lambda\t" << model.lambda << "\n";
    for (const auto& [bundle, rules] : model.rules)
        for (const auto& [key, count] : rules)
            os << "rule\t" << bundle << "\t" << key.first << "\t" << key.second << "\t" << count
               << "\n";
    for (const auto& [bundle, cm] : model.char_models) {
        for (const auto& [len, count] : cm.strip_len_counts)
            os << "striplen\t" << bundle << "\t" << len << "\t" << count << "\n";
        for (const auto& [key, count] : cm.trigram_counts) {
            os << "trigram\t" << bundle << "\t" << encode_char(key.first[0]) << "\t"
               << encode_char(key.first[1]) << "\t" << encode_char(key.second) << "\t" << count
               << "\n";
        }
    }
    out << os.str();
}

GeneratorModel load_model(std::istream& in) {
    GeneratorModel model;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty() || line[0] == '#') continue;
        auto f = text::split(line, '\t');
        try {
            if (f[0] == "lambda" && f.size() == 2) {
                model.lambda = std::stod(f[1]);
            } else if (f[0] == "rule" && f.size() == 5) {
                model.rules[f[1]][{f[2], f[3]}] = std::stod(f[4]);
            } else if (f[0] == "striplen" && f.size() == 4) {
                model.char_models[f[1]].strip_len_counts[std::stoul(f[2])] = std::stod(f[3]);
            } else if (f[0] == "trigram" && f.size() == 6) {
                CharNgramModel& cm = model.char_models[f[1]];
                std::u32string ctx;
                ctx += decode_char(f[2]);
                ctx += decode_char(f[3]);
                char32_t c = decode_char(f[4]);
                double count = std::stod(f[5]);
                cm.trigram_counts[{ctx, c}] = count;
                cm.context_totals[ctx] += count;
                if (c != kEnd) cm.alphabet.insert(c);
            } else {
                throw Error("unrecognized record '" + f[0] + "'");
            }
        } catch (const std::exception& e) {
            throw Error("model load: " + std::string(e.what()) + " at line " +
                        std::to_string(lineno));
        }
    }
    return model;
}

}  // namespace kws::inflect
