#include "ctmlab/baselines.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <map>

#include "ctmlab/errors.hpp"
#include "text_util.hpp"

namespace ctmlab {

namespace {

std::uint64_t ceil_log2(std::uint64_t x) {
  return x <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(x - 1));
}

}  // namespace

double entropy_of_counts(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (const auto c : counts) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (const auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h + 0.0;
}

double shannon_entropy(std::string_view s) {
  if (s.empty()) throw ValidationError("entropy of an empty string is undefined");
  std::array<std::uint64_t, 256> counts{};
  for (const auto c : s) ++counts[static_cast<unsigned char>(c)];
  return entropy_of_counts(counts);
}

double block_entropy(std::string_view s, std::size_t block_len) {
  if (block_len == 0) throw ValidationError("block length must be at least 1");
  if (!detail::is_binary(s)) throw ValidationError("block entropy needs a binary string");
  if (s.size() < block_len) throw ValidationError("string is shorter than one block");
  std::map<std::string_view, std::uint64_t> blocks;
  for (std::size_t i = 0; i + block_len <= s.size(); i += block_len) ++blocks[s.substr(i, block_len)];
  std::vector<std::uint64_t> counts;
  counts.reserve(blocks.size());
  for (const auto& [b, c] : blocks) counts.push_back(c);
  return entropy_of_counts(counts);
}

std::vector<RleToken> rle_tokens(std::string_view s) {
  if (s.empty()) throw ValidationError("cannot run-length encode an empty string");
  std::vector<RleToken> tokens;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    for (auto run = j - i; run > 0;) {
      const auto take = std::min<std::size_t>(run, 9);
      tokens.push_back({static_cast<int>(take), s[i]});
      run -= take;
    }
    i = j;
  }
  return tokens;
}

std::string rle_encode(std::string_view s) {
  std::string out;
  for (const auto& t : rle_tokens(s)) {
    out.push_back(static_cast<char>('0' + t.run_length));
    out.push_back(t.symbol);
  }
  return out;
}

std::string rle_decode(std::string_view encoded) {
  if (encoded.empty()) throw ParseError("empty run-length encoding", 0);
  if (encoded.size() % 2 != 0) throw ParseError("run-length encoding has odd length", 0);
  std::string out;
  for (std::size_t i = 0; i < encoded.size(); i += 2) {
    const char n = encoded[i];
    if (n < '1' || n > '9')
      throw ParseError("run count at offset " + std::to_string(i) + " is not a digit 1-9", 0);
    out.append(static_cast<std::size_t>(n - '0'), encoded[i + 1]);
  }
  return out;
}

Lz78Parse lz78_parse(std::string_view s) {
  if (s.empty()) throw ValidationError("cannot compress an empty string");
  if (!detail::is_binary(s)) throw ValidationError("LZ78 cost model needs a binary string");
  // Trie keyed by (parent phrase id, next symbol); id 0 is the empty phrase.
  std::map<std::pair<std::uint64_t, char>, std::uint64_t> trie;
  Lz78Parse parse;
  std::uint64_t node = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto it = trie.find({node, s[i]});
    if (it != trie.end()) {
      node = it->second;
      continue;
    }
    const auto id = parse.phrases.size() + 1;
    trie.emplace(std::pair{node, s[i]}, id);
    parse.phrases.emplace_back(s.substr(start, i - start + 1));
    parse.bits += ceil_log2(id) + 1;
    node = 0;
    start = i + 1;
  }
  if (start < s.size()) {
    parse.tail = std::string(s.substr(start));
    parse.bits += ceil_log2(parse.phrases.size() + 1);
  }
  return parse;
}

std::uint64_t lz78_bit_length(std::string_view s) { return lz78_parse(s).bits; }

}  // namespace ctmlab
