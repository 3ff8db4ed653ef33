#include "kws/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "kws/text.hpp"

namespace kws::fixture {

namespace {

const std::vector<std::string> kOnsets = {"b", "d", "g", "k",  "l",  "m", "n", "p",
                                          "r", "s", "t", "v",  "y",  "z"};
const std::vector<std::string> kDigraphs = {"sh", "ch"};
const std::vector<std::string> kCodas = {"n", "r", "s", "l"};
const std::vector<std::string> kVowels = {"a", "e", "i", "o", "u"};
const std::set<char> kBackVowels = {'a', 'o', 'u'};

struct Bundle {
    std::string tags;
    std::string back;   // suffix after a back-harmony stem
    std::string front;  // suffix after a front-harmony stem
    size_t correct_rank;  // rank of the true suffix in the noisy pair counts
};

// NOM is the bare stem; the other suffixes follow two-way vowel harmony
// keyed on the stem-final vowel. correct_rank controls how many decoy
// suffixes outrank the true one in pairs_noisy.tsv.
const std::vector<Bundle> kBundles = {
    {"N;NOM;SG", "", "", 1},  {"N;PL", "lar", "ler", 1},   {"N;LOC", "da", "de", 2},
    {"N;ACC", "yu", "yi", 3}, {"N;DAT", "ga", "ge", 5},    {"N;INS", "la", "le", 8},
    {"N;ABL", "dan", "den", 12}, {"N;GEN", "nun", "nin", 20},
};

bool is_back(const std::string& stem) {
    for (auto it = stem.rbegin(); it != stem.rend(); ++it)
        if (*it == 'a' || *it == 'e' || *it == 'i' || *it == 'o' || *it == 'u')
            return kBackVowels.count(*it) != 0;
    return true;
}

std::string suffix_for(const Bundle& b, const std::string& stem) {
    return is_back(stem) ? b.back : b.front;
}

std::string inflected(const std::string& stem, const Bundle& b) {
    return stem + suffix_for(b, stem);
}

// Orthography -> phoneme sequence: "sh" -> S, "ch" -> C, everything else
// letter-by-letter.
std::vector<std::string> true_pron(const std::string& word) {
    std::vector<std::string> out;
    for (size_t i = 0; i < word.size(); ++i) {
        if (i + 1 < word.size() && word[i + 1] == 'h' && (word[i] == 's' || word[i] == 'c')) {
            out.push_back(word[i] == 's' ? "S" : "C");
            ++i;
        } else {
            out.push_back(std::string(1, word[i]));
        }
    }
    return out;
}

class Rng {
public:
    Rng(std::uint64_t seed, const std::string& stage)
        : gen_(text::fnv1a(stage, seed ^ 0x9e3779b97f4a7c15ULL)) {}

    size_t index(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(gen_); }
    double real() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[index(v.size())];
    }
    std::mt19937_64& gen() { return gen_; }

private:
    std::mt19937_64 gen_;
};

std::string gen_stem(Rng& rng) {
    size_t syllables = 2 + (rng.real() < 0.4 ? 1 : 0);
    std::string s;
    for (size_t i = 0; i < syllables; ++i) {
        if (rng.real() < 0.12)
            s += rng.pick(kDigraphs);
        else
            s += rng.pick(kOnsets);
        s += rng.pick(kVowels);
        // inner syllables may take a coda; the stem always ends in a vowel
        if (i + 1 < syllables && rng.real() < 0.3) s += rng.pick(kCodas);
    }
    return s;
}

std::string gen_unique_stem(Rng& rng, std::set<std::string>& used) {
    for (int tries = 0; tries < 10000; ++tries) {
        std::string s = gen_stem(rng);
        if (used.insert(s).second) return s;
    }
    throw Error("fixture: stem space exhausted");
}

// Junk suffixes for the noisy training pairs: 2-3 letters, never equal to
// a true suffix.
std::vector<std::string> gen_decoys(Rng& rng, size_t count) {
    std::set<std::string> truth;
    for (const auto& b : kBundles) {
        truth.insert(b.back);
        truth.insert(b.front);
    }
    static const std::vector<std::string> cons = {"r", "t", "s", "n", "k", "m", "p", "z", "v"};
    std::set<std::string> seen;
    std::vector<std::string> out;
    while (out.size() < count) {
        std::string d = cons[rng.index(cons.size())] + kVowels[rng.index(kVowels.size())];
        if (rng.real() < 0.5) d += cons[rng.index(cons.size())];
        if (truth.count(d) || !seen.insert(d).second) continue;
        out.push_back(d);
    }
    return out;
}

// Weighted categorical sampling with a stable, platform-independent
// implementation (std::discrete_distribution is not mandated bit-exact).
class Sampler {
public:
    void add(const std::string& word, double weight) {
        words_.push_back(word);
        total_ += weight;
        cumulative_.push_back(total_);
    }
    const std::string& draw(Rng& rng) const {
        double x = rng.real() * total_;
        auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), x);
        size_t i = size_t(it - cumulative_.begin());
        if (i >= words_.size()) i = words_.size() - 1;
        return words_[i];
    }
    bool empty() const { return words_.empty(); }

private:
    std::vector<std::string> words_;
    std::vector<double> cumulative_;
    double total_ = 0.0;
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("fixture: cannot write " + path);
    return out;
}

}  // namespace

void make_fixture(const std::string& dir, const FixtureParams& params) {
    std::set<std::string> used_stems;

    Rng stem_rng(params.seed, "stems");
    std::vector<std::string> keyword_stems, filler_stems;
    for (size_t i = 0; i < params.keyword_stems; ++i)
        keyword_stems.push_back(gen_unique_stem(stem_rng, used_stems));
    for (size_t i = 0; i < params.filler_stems; ++i)
        filler_stems.push_back(gen_unique_stem(stem_rng, used_stems));

    // One decoy suffix ordering shared by every bundle and harmony class:
    // a decoy's count rank is then the same in each bundle's rule table,
    // so its first appearance across the union of bundles is controlled
    // by that single rank.
    Rng drng(params.seed, "decoys");
    std::vector<std::string> decoys = gen_decoys(drng, params.decoys_per_bundle);

    // ----- unimorph.tsv: full paradigms for the keyword stems, plus one
    // engineered ambiguous pair (a form shared by two paradigms).
    std::set<std::string> keyword_forms;
    {
        auto out = open_out(dir + "/unimorph.tsv");
        for (const auto& stem : keyword_stems)
            for (const auto& b : kBundles) {
                std::string form = inflected(stem, b);
                keyword_forms.insert(form);
                out << stem << "\t" << form << "\t" << b.tags << "\n";
            }
        // the LOC form of keyword stem 0 is also listed under stem 1
        if (keyword_stems.size() >= 2) {
            std::string shared = inflected(keyword_stems[0], kBundles[2]);
            out << keyword_stems[1] << "\t" << shared << "\t" << kBundles[2].tags << "\n";
        }
    }

    // ----- vocabulary: keyword forms + filler forms + planted collision
    // words (keyword stem + a deep-ranked decoy suffix) + function words.
    std::vector<std::string> filler_forms;
    {
        Rng frng(params.seed, "filler-forms");
        std::set<std::string> seen;
        for (const auto& stem : filler_stems) {
            std::vector<size_t> bundle_ids;
            for (size_t b = 1; b < kBundles.size(); ++b) bundle_ids.push_back(b);
            std::shuffle(bundle_ids.begin(), bundle_ids.end(), frng.gen());
            std::vector<std::string> forms = {stem};
            for (size_t j = 0; j + 1 < params.filler_forms_per_stem && j < bundle_ids.size(); ++j)
                forms.push_back(inflected(stem, kBundles[bundle_ids[j]]));
            for (const auto& f : forms)
                if (!keyword_forms.count(f) && seen.insert(f).second) filler_forms.push_back(f);
        }
    }

    std::vector<std::string> planted;
    {
        Rng prng(params.seed, "planted");
        std::set<std::string> seen;
        for (const auto& stem : keyword_stems) {
            // one suffix from the mid decoy ranks, one from the deep ranks
            for (auto [lo, hi] : {std::pair<size_t, size_t>{55, 75}, {85, 110}}) {
                size_t idx = lo + prng.index(hi - lo);
                if (idx >= decoys.size()) idx = decoys.size() - 1;
                std::string w = stem + decoys[idx];
                if (!keyword_forms.count(w) && seen.insert(w).second) planted.push_back(w);
            }
        }
    }

    const std::vector<std::string> function_words = {"na", "po", "ki", "du", "me", "so",
                                                     "ta", "ve", "nu", "se", "lo", "ba"};

    {
        auto out = open_out(dir + "/lexicon.tsv");
        std::set<std::string> vocab;
        for (const auto& f : keyword_forms) vocab.insert(f);
        for (const auto& f : filler_forms) vocab.insert(f);
        for (const auto& f : planted) vocab.insert(f);
        for (const auto& f : function_words) vocab.insert(f);
        for (const auto& w : vocab) {
            out << w << "\t";
            auto pron = true_pron(w);
            for (size_t i = 0; i < pron.size(); ++i) out << (i ? " " : "") << pron[i];
            out << "\n";
        }
    }

    // ----- shared word sampler for transcripts and in-domain LM text
    auto build_sampler = [&](bool bible) {
        Sampler s;
        for (const auto& w : function_words) s.add(bible ? w + "m" : w, 28.0);
        for (size_t i = 0; i < filler_forms.size(); ++i) {
            size_t rank = bible ? (filler_forms.size() - 1 - i) : i;
            s.add(filler_forms[i], 12.0 / std::pow(double(rank + 1), 0.75));
        }
        if (!bible) {
            for (const auto& w : keyword_forms) s.add(w, 0.4);
            for (const auto& w : planted) s.add(w, 2.5);
        }
        return s;
    };
    Sampler in_domain = build_sampler(false);
    Sampler bible = build_sampler(true);

    auto sample_sentence = [&](Sampler& s, Rng& rng) {
        size_t n = params.min_words + rng.index(params.max_words - params.min_words + 1);
        std::vector<std::string> words;
        for (size_t i = 0; i < n; ++i) words.push_back(s.draw(rng));
        return words;
    };

    // ----- transcript.ctm: sampled utterances with injected keyword
    // occurrences (every keyword lexeme gets 2-4 spoken references).
    {
        Rng trng(params.seed, "transcript");
        std::vector<std::vector<std::string>> utts;
        for (size_t u = 0; u < params.utterances; ++u)
            utts.push_back(sample_sentence(in_domain, trng));
        for (const auto& stem : keyword_stems) {
            size_t occurrences = 2 + trng.index(3);
            for (size_t i = 0; i < occurrences; ++i) {
                const Bundle& b = kBundles[trng.index(kBundles.size())];
                auto& utt = utts[trng.index(utts.size())];
                utt.insert(utt.begin() + long(trng.index(utt.size() + 1)), inflected(stem, b));
            }
        }
        auto out = open_out(dir + "/transcript.ctm");
        out << std::fixed << std::setprecision(2);
        for (size_t u = 0; u < utts.size(); ++u) {
            std::ostringstream id;
            id << "utt" << std::setw(4) << std::setfill('0') << u;
            double t = 0.0;
            std::ostringstream body;
            body << std::fixed << std::setprecision(2);
            for (const auto& w : utts[u]) {
                double dur = 0.22 + 0.06 * double(true_pron(w).size());
                body << id.str() << " 1 " << t << " " << dur << " " << w << "\n";
                t += dur + 0.08;
            }
            out << "#utt " << id.str() << " " << (t + 0.22) << "\n" << body.str();
        }
    }

    // ----- LM texts
    auto write_text = [&](const std::string& path, Sampler& s, const std::string& stage,
                          size_t sentences) {
        Rng rng(params.seed, stage);
        auto out = open_out(dir + "/" + path);
        for (size_t i = 0; i < sentences; ++i) {
            auto words = sample_sentence(s, rng);
            for (size_t j = 0; j < words.size(); ++j) out << (j ? " " : "") << words[j];
            out << "\n";
        }
    };
    write_text("lm_train.txt", in_domain, "lm-train", params.lm_sentences);
    write_text("lm_bible.txt", bible, "lm-bible", params.bible_sentences);
    write_text("lm_heldout.txt", in_domain, "lm-heldout", params.heldout_sentences);

    // ----- inflection training pairs (filler stems only; keyword stems
    // are held out).
    {
        auto out = open_out(dir + "/pairs_clean.tsv");
        for (const auto& stem : filler_stems)
            for (const auto& b : kBundles)
                out << stem << "\t" << inflected(stem, b) << "\t" << b.tags << "\n";
    }
    {
        // Per final vowel, three lemmas carry the graded decoy counts, so
        // every strip context learns the same decoy ranking. The true
        // suffix weight (100) lands at rank correct_rank: decoy i has
        // weight 100 * (correct_rank - 0.5) / i.
        std::map<char, std::vector<std::string>> by_vowel;
        for (const auto& stem : filler_stems) {
            char v = stem.back();
            if (by_vowel[v].size() < 3) by_vowel[v].push_back(stem);
        }
        auto out = open_out(dir + "/pairs_noisy.tsv");
        out << std::fixed << std::setprecision(4);
        for (const auto& [v, stems] : by_vowel)
            for (const auto& stem : stems)
                for (size_t b = 0; b < kBundles.size(); ++b) {
                    out << stem << "\t" << inflected(stem, kBundles[b]) << "\t"
                        << kBundles[b].tags << "\t" << 100.0 << "\n";
                    double r = double(kBundles[b].correct_rank);
                    for (size_t i = 0; i < decoys.size(); ++i)
                        out << stem << "\t" << stem + decoys[i] << "\t" << kBundles[b].tags
                            << "\t" << 100.0 * (r - 0.5) / double(i + 1) << "\n";
                }
    }

    // ----- held-out words for G2P evaluation (fresh stems, never in the
    // lexicon).
    {
        Rng grng(params.seed, "g2p-heldout");
        auto out = open_out(dir + "/g2p_heldout.tsv");
        for (size_t i = 0; i < params.g2p_heldout_words; ++i) {
            std::string stem = gen_unique_stem(grng, used_stems);
            std::string w = inflected(stem, kBundles[grng.index(kBundles.size())]);
            out << w << "\t";
            auto pron = true_pron(w);
            for (size_t j = 0; j < pron.size(); ++j) out << (j ? " " : "") << pron[j];
            out << "\n";
        }
    }

    // ----- pipeline profile
    {
        auto out = open_out(dir + "/paper_shape.cfg");
        out << "unimorph = " << dir << "/unimorph.tsv\n"
            << "lexicon = " << dir << "/lexicon.tsv\n"
            << "transcript = " << dir << "/transcript.ctm\n"
            << "lm_text = " << dir << "/lm_train.txt\n"
            << "lm_text_ood = " << dir << "/lm_bible.txt\n"
            << "pairs = " << dir << "/pairs_noisy.tsv\n"
            << "conditions = oracle,unimorph,generated,generated-ns,lemmas\n"
            << "k = 40\n"
            << "k_values = 1,5,10,20,40,80,160\n"
            << "lambda = 0.9\n"
            << "lm_order = 4\n"
            << "unk_mass = 0.0001\n"
            << "alpha = 4.0\n"
            << "radius = 0.34\n"
            << "p_del = 0.0\n"
            << "gamma = 0.2\n"
            << "max_alts = 6\n"
            << "beta = 999.9\n"
            << "tolerance = 0.5\n"
            << "theta = 0.35\n"
            << "seed = " << params.seed << "\n"
            << "threads = 4\n";
    }
}

}  // namespace kws::fixture
