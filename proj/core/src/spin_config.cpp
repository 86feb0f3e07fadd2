#include "spinchain/spin_config.hpp"

#include <bit>

#include "spinchain/errors.hpp"
#include "spinchain/rng.hpp"

namespace spinchain {

SpinConfig::SpinConfig(std::size_t n, bool value) : n_(n), words_((n + 63) / 64, 0) { fill(value); }

void SpinConfig::fill(bool value) {
  for (auto& w : words_) w = value ? ~std::uint64_t{0} : 0;
  clear_tail();
}

void SpinConfig::flip_all() {
  for (auto& w : words_) w = ~w;
  clear_tail();
}

void SpinConfig::clear_tail() {
  if (n_ % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
}

std::size_t SpinConfig::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::uint64_t SpinConfig::hash() const {
  std::uint64_t h = splitmix64(n_);
  for (auto w : words_) h = splitmix64(h ^ w);
  return h;
}

std::string SpinConfig::to_hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out((n_ + 3) / 4, '0');
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t v = 4 * i;
    out[i] = digits[(words_[v >> 6] >> (v & 63)) & 0xF];
  }
  return out;
}

SpinConfig SpinConfig::from_hex(std::string_view hex, std::size_t n) {
  if (hex.size() != (n + 3) / 4) {
    throw ParseError("config hex has " + std::to_string(hex.size()) + " digits, expected " +
                     std::to_string((n + 3) / 4));
  }
  SpinConfig c(n);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const char ch = hex[i];
    std::uint64_t nib = 0;
    if (ch >= '0' && ch <= '9') {
      nib = static_cast<std::uint64_t>(ch - '0');
    } else if (ch >= 'a' && ch <= 'f') {
      nib = static_cast<std::uint64_t>(ch - 'a' + 10);
    } else if (ch >= 'A' && ch <= 'F') {
      nib = static_cast<std::uint64_t>(ch - 'A' + 10);
    } else {
      throw ParseError("config hex: invalid digit at position " + std::to_string(i));
    }
    const std::size_t v = 4 * i;
    c.words_[v >> 6] |= nib << (v & 63);
  }
  const auto before = c.words_;
  c.clear_tail();
  if (before != c.words_) throw ParseError("config hex sets bits beyond n");
  return c;
}

std::uint64_t SpinConfig::to_mask() const {
  if (n_ > 64) throw DomainError("to_mask needs n <= 64");
  return words_.empty() ? 0 : words_[0];
}

SpinConfig SpinConfig::from_mask(std::uint64_t mask, std::size_t n) {
  if (n > 64) throw DomainError("from_mask needs n <= 64");
  SpinConfig c(n);
  if (n > 0) c.words_[0] = mask;
  c.clear_tail();
  return c;
}

bool is_independent_set(const Graph& g, const SpinConfig& config) {
  for (auto [u, v] : g.edges()) {
    if (config.test(u) && config.test(v)) return false;
  }
  return true;
}

}  // namespace spinchain
