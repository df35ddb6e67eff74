#pragma once

#include <string>
#include <vector>

namespace qsflat {

/// Per-channel derivative orders (a^1, ..., a^m). Entries are
/// nonnegative; component-wise algebra and ordering.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> orders);
  MultiIndex(std::initializer_list<int> orders);

  static MultiIndex constant(int channels, int value);

  int size() const { return static_cast<int>(orders_.size()); }
  int operator[](int j) const { return orders_[static_cast<std::size_t>(j)]; }
  const std::vector<int>& orders() const { return orders_; }

  /// Sum of all entries.
  int weight() const;
  int max_order() const;

  /// Every entry shifted by c; throws if a result would be negative.
  MultiIndex shifted(int c) const;

  std::string str() const;  // "(4,2)"

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) = default;

 private:
  std::vector<int> orders_;
};

/// Component-wise a <= b; throws on length mismatch.
bool mi_leq(const MultiIndex& a, const MultiIndex& b);

/// Sum of entries.
int mi_weight(const MultiIndex& a);

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);
MultiIndex operator-(const MultiIndex& a, const MultiIndex& b);

/// Lexicographic order (used for deterministic candidate listings).
bool lex_less(const MultiIndex& a, const MultiIndex& b);

MultiIndex componentwise_max(const MultiIndex& a, const MultiIndex& b);

}  // namespace qsflat
