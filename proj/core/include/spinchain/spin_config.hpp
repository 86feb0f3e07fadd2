#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spinchain/graph.hpp"

namespace spinchain {

// Bit-packed configuration: bit v set means v occupied (hardcore) or spin +1.
class SpinConfig {
 public:
  SpinConfig() = default;
  explicit SpinConfig(std::size_t n, bool value = false);

  std::size_t size() const { return n_; }

  bool test(Vertex v) const { return (words_[v >> 6] >> (v & 63)) & 1U; }
  bool operator[](Vertex v) const { return test(v); }

  void set(Vertex v, bool value) {
    const std::uint64_t bit = std::uint64_t{1} << (v & 63);
    if (value) {
      words_[v >> 6] |= bit;
    } else {
      words_[v >> 6] &= ~bit;
    }
  }
  void flip(Vertex v) { words_[v >> 6] ^= std::uint64_t{1} << (v & 63); }

  void fill(bool value);
  void flip_all();

  std::size_t count() const;
  std::uint64_t hash() const;

  // Hex digit i holds vertices 4i..4i+3, vertex 4i+j in bit j.
  std::string to_hex() const;
  static SpinConfig from_hex(std::string_view hex, std::size_t n);

  // Only for n <= 64: bit v of the mask is vertex v.
  std::uint64_t to_mask() const;
  static SpinConfig from_mask(std::uint64_t mask, std::size_t n);

  const std::vector<std::uint64_t>& words() const { return words_; }

  bool operator==(const SpinConfig& other) const = default;

 private:
  void clear_tail();

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

// True if no edge has both endpoints set.
bool is_independent_set(const Graph& g, const SpinConfig& config);

}  // namespace spinchain
