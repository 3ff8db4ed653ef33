#include "kws/types.hpp"

#include <algorithm>

namespace kws {

MorphBundle::MorphBundle(std::vector<std::string> tags) {
    if (tags.empty()) throw Error("MorphBundle: empty tag list");
    for (auto& t : tags) {
        t = text::trim(t);
        if (t.empty()) throw Error("MorphBundle: empty tag");
        std::transform(t.begin(), t.end(), t.begin(),
                       [](unsigned char c) { return std::toupper(c); });
    }
    for (size_t i = 0; i < tags.size(); ++i)
        for (size_t j = i + 1; j < tags.size(); ++j)
            if (tags[i] == tags[j]) throw Error("MorphBundle: duplicate tag '" + tags[i] + "'");
    tags_ = std::move(tags);
    canonical_ = tags_[0];
    for (size_t i = 1; i < tags_.size(); ++i) canonical_ += ";" + tags_[i];
}

MorphBundle MorphBundle::parse(std::string_view canonical) {
    return MorphBundle(text::split(canonical, ';'));
}

std::set<std::string> Paradigm::all_forms() const {
    std::set<std::string> out;
    for (const auto& [bundle, forms] : entries) out.insert(forms.begin(), forms.end());
    return out;
}

const std::vector<PhonemeSeq>* PronLexicon::find(const std::string& form) const {
    auto it = entries.find(form);
    return it == entries.end() ? nullptr : &it->second;
}

void PronLexicon::add(const std::string& form, PhonemeSeq pron) {
    auto& prons = entries[form];
    if (std::find(prons.begin(), prons.end(), pron) == prons.end())
        prons.push_back(std::move(pron));
}

double Transcript::total_seconds() const {
    double total = 0.0;
    for (const auto& [utt, dur] : utterance_seconds) total += dur;
    return total;
}

}  // namespace kws
