#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace a11y {

/// Lowercases, drops everything but ASCII alphanumerics and spaces (bytes of
/// multi-byte UTF-8 sequences are kept), collapses space runs, trims.
std::string normalize_text(std::string_view s);

/// Insert/delete-only edit distance: |a| + |b| - 2 * LCS(a, b).
std::size_t indel_distance(std::string_view a, std::string_view b);

/// Normalized indel ratio of the normalized strings, in [0, 1].
/// Both empty gives 1, exactly one empty gives 0.
double text_similarity(std::string_view a, std::string_view b);

/// Ratio of already-normalized strings.
double indel_ratio(std::string_view a, std::string_view b);

}  // namespace a11y
