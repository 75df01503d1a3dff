#include "a11y/text_match.hpp"

#include <algorithm>
#include <vector>

namespace a11y {

std::string normalize_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (const char ch : s) {
        const auto c = static_cast<unsigned char>(ch);
        if (c == ' ') {
            pending_space = !out.empty();
            continue;
        }
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
        if (!keep) continue;
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    }
    return out;
}

std::size_t indel_distance(std::string_view a, std::string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    return a.size() + b.size() - 2 * prev[b.size()];
}

double indel_ratio(std::string_view a, std::string_view b) {
    const std::size_t total = a.size() + b.size();
    if (total == 0) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    return 1.0 - static_cast<double>(indel_distance(a, b)) / static_cast<double>(total);
}

double text_similarity(std::string_view a, std::string_view b) {
    return indel_ratio(normalize_text(a), normalize_text(b));
}

}  // namespace a11y
