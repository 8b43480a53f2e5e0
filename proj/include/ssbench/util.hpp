#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace ssbench {

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
// Lowercase, collapse internal whitespace runs to one space, trim.
std::string normalize_key(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix);
std::vector<std::string> split_lines(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Number of bytes of the whitespace character starting at s[pos], 0 if the
// code point there is not whitespace. Covers ASCII and the Unicode space
// separators encoded in UTF-8.
std::size_t whitespace_width(std::string_view s, std::size_t pos);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Root holding templates/ and lexicons/. SSBENCH_DATA_DIR wins over the
// compiled-in default.
std::filesystem::path data_dir();

// mt19937_64 output is fixed by the standard; the distributions are not, so
// the helpers below keep sampling reproducible across standard libraries.
using Rng = std::mt19937_64;

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

template <typename T>
void shuffle_in_place(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_below(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

// k indices from [0, n) without replacement, in draw order. k > n is clamped.
std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n, std::size_t k);

// Independent stream for a named sub-task so that stages can be resumed
// without replaying earlier draws.
Rng derive_rng(std::uint64_t seed, std::string_view stream);

std::string utc_timestamp();

}  // namespace ssbench
