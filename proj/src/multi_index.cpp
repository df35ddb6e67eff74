#include "qsflat/multi_index.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace qsflat {

namespace {
void check_same_length(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("multi-index length mismatch: " + a.str() + " vs " + b.str());
}
}  // namespace

MultiIndex::MultiIndex(std::vector<int> orders) : orders_(std::move(orders)) {
  for (int a : orders_)
    if (a < 0) throw std::invalid_argument("multi-index entries must be nonnegative");
}

MultiIndex::MultiIndex(std::initializer_list<int> orders)
    : MultiIndex(std::vector<int>(orders)) {}

MultiIndex MultiIndex::constant(int channels, int value) {
  if (channels < 0) throw std::invalid_argument("negative channel count");
  return MultiIndex(std::vector<int>(static_cast<std::size_t>(channels), value));
}

int MultiIndex::weight() const {
  return std::accumulate(orders_.begin(), orders_.end(), 0);
}

int MultiIndex::max_order() const {
  if (orders_.empty()) return 0;
  return *std::max_element(orders_.begin(), orders_.end());
}

MultiIndex MultiIndex::shifted(int c) const {
  std::vector<int> out(orders_);
  for (int& a : out) {
    a += c;
    if (a < 0) throw std::invalid_argument("multi-index shift below zero");
  }
  return MultiIndex(std::move(out));
}

std::string MultiIndex::str() const {
  std::string s = "(";
  for (std::size_t j = 0; j < orders_.size(); ++j) {
    if (j) s += ",";
    s += std::to_string(orders_[j]);
  }
  return s + ")";
}

bool mi_leq(const MultiIndex& a, const MultiIndex& b) {
  check_same_length(a, b);
  for (int j = 0; j < a.size(); ++j)
    if (a[j] > b[j]) return false;
  return true;
}

int mi_weight(const MultiIndex& a) { return a.weight(); }

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  check_same_length(a, b);
  std::vector<int> out(static_cast<std::size_t>(a.size()));
  for (int j = 0; j < a.size(); ++j) out[static_cast<std::size_t>(j)] = a[j] + b[j];
  return MultiIndex(std::move(out));
}

MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
  check_same_length(a, b);
  std::vector<int> out(static_cast<std::size_t>(a.size()));
  for (int j = 0; j < a.size(); ++j) {
    int d = a[j] - b[j];
    if (d < 0) throw std::invalid_argument("multi-index difference below zero");
    out[static_cast<std::size_t>(j)] = d;
  }
  return MultiIndex(std::move(out));
}

bool lex_less(const MultiIndex& a, const MultiIndex& b) {
  return std::lexicographical_compare(a.orders().begin(), a.orders().end(),
                                      b.orders().begin(), b.orders().end());
}

MultiIndex componentwise_max(const MultiIndex& a, const MultiIndex& b) {
  check_same_length(a, b);
  std::vector<int> out(static_cast<std::size_t>(a.size()));
  for (int j = 0; j < a.size(); ++j) out[static_cast<std::size_t>(j)] = std::max(a[j], b[j]);
  return MultiIndex(std::move(out));
}

}  // namespace qsflat
