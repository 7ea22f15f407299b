#pragma once

// Statistical reference measures: Shannon entropy, block entropy, the NX
// run-length scheme and an LZ78 bit-cost model.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctmlab {

/// Bits per symbol of the empirical symbol distribution of `s`, over
/// whatever characters occur. Throws ValidationError on empty input.
double shannon_entropy(std::string_view s);

/// Entropy in bits of a distribution given by occurrence counts. Zero
/// counts contribute nothing.
double entropy_of_counts(std::span<const std::uint64_t> counts);

/// Entropy (bits per block) of the non-overlapping `block_len` blocks of a
/// binary string; a trailing partial block is dropped.
double block_entropy(std::string_view s, std::size_t block_len);

struct RleToken {
  int run_length = 1;  // 1..9
  char symbol = '0';

  friend bool operator==(const RleToken&, const RleToken&) = default;
};

std::vector<RleToken> rle_tokens(std::string_view s);
/// "1112334" -> "31122314". Runs longer than 9 are split.
std::string rle_encode(std::string_view s);
/// Throws ParseError for odd length or a count that is not a digit 1..9.
std::string rle_decode(std::string_view encoded);

struct Lz78Parse {
  std::vector<std::string> phrases;  // complete phrases, in order
  std::string tail;                  // trailing phrase already in the dictionary, may be empty
  std::uint64_t bits = 0;
};

/// Greedy LZ78 parse of a binary string. Phrase i (1-based) costs
/// ceil(log2 i) + 1 bits; a trailing incomplete phrase after p phrases costs
/// ceil(log2(p+1)) bits.
Lz78Parse lz78_parse(std::string_view s);
std::uint64_t lz78_bit_length(std::string_view s);

}  // namespace ctmlab
