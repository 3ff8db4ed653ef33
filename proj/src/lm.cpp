#include "kws/lm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace kws::lm {

namespace {

std::string join(const std::vector<std::string>& toks, size_t begin, size_t end) {
    std::string out;
    for (size_t i = begin; i < end; ++i) {
        if (i > begin) out += ' ';
        out += toks[i];
    }
    return out;
}

struct Discounts {
    double d1 = 0.5, d2 = 1.0, d3 = 1.5;

    double of(double count) const {
        if (count <= 0) return 0.0;
        if (count < 1.5) return d1;
        if (count < 2.5) return d2;
        return d3;
    }
};

Discounts estimate_discounts(const std::unordered_map<std::string, double>& counts) {
    double n1 = 0, n2 = 0, n3 = 0, n4 = 0;
    for (const auto& [key, c] : counts) {
        if (c == 1) ++n1;
        else if (c == 2) ++n2;
        else if (c == 3) ++n3;
        else if (c == 4) ++n4;
    }
    Discounts d;
    if (n1 > 0 && n2 > 0) {
        double y = n1 / (n1 + 2 * n2);
        d.d1 = 1 - 2 * y * n2 / n1;
        if (n3 > 0) d.d2 = 2 - 3 * y * n3 / n2;
        if (n3 > 0 && n4 > 0) d.d3 = 3 - 4 * y * n4 / n3;
    }
    // Keep every discount strictly inside (0, count-class) so seen events
    // retain positive mass and backoff mass is never zero.
    d.d1 = std::clamp(d.d1, 0.05, 0.99);
    d.d2 = std::clamp(d.d2, 0.05, 1.99);
    d.d3 = std::clamp(d.d3, 0.05, 2.99);
    return d;
}

struct SuccessorStats {
    std::vector<std::pair<std::string, double>> events;  // word -> adjusted count
    double total = 0.0;
    double gamma_num = 0.0;  // D1*N1 + D2*N2 + D3*N3+
};

}  // namespace

std::vector<std::vector<std::string>> read_sentences(std::istream& text) {
    std::vector<std::vector<std::string>> out;
    std::string line;
    while (std::getline(text, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty() || line[0] == '#') continue;
        std::vector<std::string> sent;
        for (auto& w : text::split_ws(line)) sent.push_back(text::fold(w));
        if (!sent.empty()) out.push_back(std::move(sent));
    }
    return out;
}

NGramLM NGramLM::train(const std::vector<std::vector<std::string>>& sentences, size_t order,
                       double unk_mass) {
    if (order < 1) throw Error("lm train: order must be >= 1");
    if (unk_mass < 0 || unk_mass >= 1) throw Error("lm train: unk_mass must be in [0,1)");
    if (sentences.empty()) throw Error("lm train: empty corpus");

    NGramLM lm;
    lm.order_ = order;
    lm.unk_mass_ = unk_mass;

    // Raw counts up to max(order, 2); order 2 is always needed for
    // unigram continuation counts.
    size_t max_raw = std::max<size_t>(order, 2);
    std::vector<std::unordered_map<std::string, double>> raw(max_raw + 1);
    for (const auto& sent : sentences) {
        std::vector<std::string> toks;
        toks.reserve(sent.size() + 2);
        toks.push_back(kBos);
        for (const auto& w : sent) {
            if (w == kBos || w == kEos) throw Error("lm train: reserved token in corpus");
            toks.push_back(w);
            lm.vocab_.insert(w);
        }
        toks.push_back(kEos);
        for (size_t n = 1; n <= max_raw; ++n)
            for (size_t i = 0; i + n <= toks.size(); ++i) raw[n][join(toks, i, i + n)] += 1.0;
    }
    if (lm.vocab_.size() < order)
        throw Error("lm train: corpus has fewer distinct tokens (" +
                    std::to_string(lm.vocab_.size()) + ") than order " + std::to_string(order));
    lm.vocab_.insert(kBos);
    lm.vocab_.insert(kEos);

    // Adjusted counts: continuation counts below the top order (and for
    // unigrams always); n-grams starting with <s> keep raw counts.
    std::vector<std::unordered_map<std::string, double>> used(order + 1);
    for (size_t n = 1; n <= order; ++n) {
        bool continuation = (n < order) || (n == 1);
        if (!continuation) {
            used[n] = raw[n];
            continue;
        }
        for (const auto& [key, c] : raw[n + 1]) {
            size_t sp = key.find(' ');
            used[n][key.substr(sp + 1)] += 1.0;  // one distinct left context
        }
        std::string bos_prefix = std::string(kBos) + " ";
        for (const auto& [key, c] : raw[n]) {
            if (n == 1 ? key == kBos : key.compare(0, bos_prefix.size(), bos_prefix) == 0)
                used[n][key] = c;
        }
        used[n].erase(kBos);  // <s> is context only, never predicted
    }
    // Drop n-grams predicting <s>.
    for (size_t n = 1; n <= order; ++n) {
        std::string bos_suffix = " " + std::string(kBos);
        std::erase_if(used[n], [&](const auto& kv) {
            const std::string& k = kv.first;
            return n == 1 ? k == kBos
                          : k.size() > bos_suffix.size() &&
                                k.compare(k.size() - bos_suffix.size(), bos_suffix.size(),
                                          bos_suffix) == 0;
        });
    }

    std::vector<Discounts> disc(order + 1);
    for (size_t n = 1; n <= order; ++n) disc[n] = estimate_discounts(used[n]);

    // Successor statistics per history.
    std::vector<std::unordered_map<std::string, SuccessorStats>> succ(order + 1);
    for (size_t n = 1; n <= order; ++n) {
        for (const auto& [key, c] : used[n]) {
            std::string hist = n == 1 ? std::string() : key.substr(0, key.rfind(' '));
            std::string word = n == 1 ? key : key.substr(key.rfind(' ') + 1);
            auto& s = succ[n][hist];
            s.events.push_back({word, c});
            s.total += c;
            s.gamma_num += disc[n].of(c);
        }
    }

    size_t n_events = lm.vocab_.size() - 1;  // vocab + </s> - <s> - </s> + ... = words + </s>
    double p0 = 1.0 / double(n_events);

    // Interpolated probability of the n-gram given by tokens[b..e), with
    // the unigram level scaled by (1 - unk_mass).
    std::function<double(const std::vector<std::string>&, size_t)> eval =
        [&](const std::vector<std::string>& toks, size_t b) -> double {
        size_t n = toks.size() - b;
        if (n == 0) return p0;
        std::string hist = join(toks, b, toks.size() - 1);
        const std::string& word = toks.back();
        auto hit = succ[n].find(hist);
        double lower = eval(toks, b + 1);
        double p;
        if (hit == succ[n].end() || hit->second.total <= 0) {
            p = lower;
        } else {
            const auto& s = hit->second;
            double c = 0.0;
            auto uit = used[n].find(n == 1 ? word : hist + " " + word);
            if (uit != used[n].end()) c = uit->second;
            double gamma = s.gamma_num / s.total;
            p = std::max(c - disc[n].of(c), 0.0) / s.total + gamma * lower;
        }
        if (n == 1) p *= (1.0 - unk_mass);
        return p;
    };

    lm.probs_.assign(order, {});
    lm.bows_.assign(order, {});
    for (size_t n = 1; n <= order; ++n) {
        for (const auto& [key, c] : used[n]) {
            std::vector<std::string> toks = text::split_ws(key);
            lm.probs_[n - 1][key] = std::log10(eval(toks, 0));
        }
    }
    lm.probs_[0][kBos] = -99.0;  // context-only token, conventional placeholder

    // Backoff weight of a history equals its interpolation weight gamma.
    for (size_t n = 2; n <= order; ++n)
        for (const auto& [hist, s] : succ[n]) {
            if (s.total <= 0) continue;
            lm.bows_[n - 2][hist] = std::log10(s.gamma_num / s.total);
        }
    return lm;
}

NGramLM NGramLM::train_text(std::istream& text, size_t order, double unk_mass) {
    return train(read_sentences(text), order, unk_mass);
}

bool NGramLM::known(const std::string& word) const {
    return vocab_.count(word) != 0 || pool_.count(word) != 0;
}

void NGramLM::register_unseen(const std::vector<std::string>& words) {
    if (frozen_) throw Error("lm: register_unseen after freeze");
    for (const auto& w : words) {
        std::string f = text::fold(w);
        if (vocab_.count(f)) continue;
        pool_.insert(f);
    }
}

double NGramLM::pool_logprob() const {
    if (pool_.empty() || unk_mass_ <= 0) throw Error("lm: empty unseen pool");
    return std::log10(unk_mass_ / double(pool_.size()));
}

double NGramLM::logprob(const std::string& word, const std::vector<std::string>& history) const {
    std::string w = text::fold(word);
    bool in_vocab = vocab_.count(w) != 0;
    if (!in_vocab && !pool_.count(w))
        throw Error("lm: unknown word '" + w + "' (register it first)");

    std::vector<std::string> h;
    size_t keep = std::min(history.size(), order_ - 1);
    for (size_t i = history.size() - keep; i < history.size(); ++i)
        h.push_back(text::fold(history[i]));

    double bow_acc = 0.0;
    while (true) {
        size_t n = h.size() + 1;
        if (n <= order_ && in_vocab) {
            std::string key = h.empty() ? w : join(h, 0, h.size()) + " " + w;
            auto it = probs_[n - 1].find(key);
            if (it != probs_[n - 1].end()) return bow_acc + it->second;
        }
        if (h.empty()) break;
        if (h.size() <= order_ - 1) {
            auto bit = bows_[h.size() - 1].find(join(h, 0, h.size()));
            if (bit != bows_[h.size() - 1].end()) bow_acc += bit->second;
        }
        h.erase(h.begin());
    }
    // Unigram level: only pool words can reach this point.
    return bow_acc + pool_logprob();
}

double NGramLM::perplexity(const std::vector<std::vector<std::string>>& sentences) const {
    double log_sum = 0.0;
    size_t tokens = 0;
    for (const auto& sent : sentences) {
        std::vector<std::string> ctx{kBos};
        for (const auto& w : sent) {
            log_sum += logprob(w, ctx);
            ctx.push_back(text::fold(w));
            ++tokens;
        }
        log_sum += logprob(kEos, ctx);
        ++tokens;
    }
    if (tokens == 0) throw Error("lm perplexity: empty text");
    return std::pow(10.0, -log_sum / double(tokens));
}

double NGramLM::perplexity_text(std::istream& text) const {
    return perplexity(read_sentences(text));
}

void NGramLM::save_arpa(std::ostream& out) const {
    std::ostringstream os;
    os.precision(17);
    std::map<std::string, double> unigrams = probs_[0];
    if (!pool_.empty() && unk_mass_ > 0) {
        double lp = pool_logprob();
        for (const auto& w : pool_) unigrams.emplace(w, lp);
    }
    os << "\\data\\\n";
    for (size_t n = 1; n <= order_; ++n)
        os << "ngram " << n << "=" << (n == 1 ? unigrams.size() : probs_[n - 1].size()) << "\n";
    os << "\n";
    for (size_t n = 1; n <= order_; ++n) {
        os << "\\" << n << "-grams:\n";
        const auto& table = n == 1 ? unigrams : probs_[n - 1];
        for (const auto& [key, lp] : table) {
            os << lp << "\t" << key;
            if (n < order_) {
                auto bit = bows_[n - 1].find(key);
                if (bit != bows_[n - 1].end()) os << "\t" << bit->second;
            }
            os << "\n";
        }
        os << "\n";
    }
    os << "\\end\\\n";
    out << os.str();
}

NGramLM NGramLM::load_arpa(std::istream& in) {
    NGramLM lm;
    lm.unk_mass_ = 0.0;
    lm.frozen_ = true;
    std::string line;
    size_t order = 0;
    std::vector<size_t> declared;
    // header
    while (std::getline(in, line)) {
        line = text::trim(line);
        if (line == "\\data\\") break;
    }
    while (std::getline(in, line)) {
        line = text::trim(line);
        if (line.empty()) break;
        if (line.rfind("ngram ", 0) == 0) {
            auto eq = line.find('=');
            if (eq == std::string::npos) throw Error("arpa: malformed ngram line");
            size_t n = std::stoul(line.substr(6, eq - 6));
            declared.push_back(std::stoul(line.substr(eq + 1)));
            order = std::max(order, n);
        }
    }
    if (order == 0) throw Error("arpa: missing \\data\\ header");
    lm.order_ = order;
    lm.probs_.assign(order, {});
    lm.bows_.assign(order, {});
    size_t current = 0;
    while (std::getline(in, line)) {
        std::string t = text::trim(line);
        if (t.empty()) continue;
        if (t == "\\end\\") break;
        if (t.size() > 2 && t[0] == '\\' && t.back() == ':') {
            current = std::stoul(t.substr(1, t.find('-') - 1));
            if (current < 1 || current > order) throw Error("arpa: bad section header");
            continue;
        }
        if (current == 0) throw Error("arpa: n-gram outside section");
        auto fields = text::split(t, '\t');
        if (fields.size() < 2 || fields.size() > 3) throw Error("arpa: malformed entry: " + t);
        double lp = std::stod(fields[0]);
        std::string key = fields[1];
        auto toks = text::split_ws(key);
        if (toks.size() != current) throw Error("arpa: order mismatch in entry: " + t);
        lm.probs_[current - 1][key] = lp;
        if (fields.size() == 3) lm.bows_[current - 1][key] = std::stod(fields[2]);
        if (current == 1) lm.vocab_.insert(key);
    }
    for (size_t n = 1; n <= order && n <= declared.size(); ++n)
        if (declared[n - 1] != lm.probs_[n - 1].size())
            throw Error("arpa: declared count mismatch at order " + std::to_string(n));
    return lm;
}

}  // namespace kws::lm
