// Transaction database model, ingestion, synthesis, and the exact
// brute-force support oracle that serves as ground truth everywhere else.
#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qarm {

using ItemSet = std::vector<std::size_t>;  // strictly increasing item indices

inline void validate_itemset(const ItemSet& s, std::size_t num_items) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] >= num_items)
      throw std::out_of_range("itemset index out of range");
    if (k > 0 && s[k] <= s[k - 1])
      throw std::invalid_argument("itemset must be strictly increasing");
  }
}

struct DatabaseStats {
  std::size_t total_ones = 0;           // W
  double avg_items_per_transaction = 0; // a = W/N
};

// N x M binary matrix; D(i,j) = 1 iff transaction i contains item j.
class TransactionDatabase {
 public:
  TransactionDatabase(std::size_t n, std::size_t m)
      : n_(n), m_(m), bits_(n * m, 0) {
    if (n == 0 || m == 0)
      throw std::invalid_argument("database dimensions must be positive");
    item_names_.resize(m);
    for (std::size_t j = 0; j < m; ++j) item_names_[j] = std::to_string(j);
  }

  std::size_t num_transactions() const { return n_; }
  std::size_t num_items() const { return m_; }

  std::uint8_t at(std::size_t i, std::size_t j) const {
    check_bounds(i, j);
    return bits_[i * m_ + j];
  }
  void set(std::size_t i, std::size_t j, bool v) {
    check_bounds(i, j);
    bits_[i * m_ + j] = v ? 1 : 0;
  }

  const std::vector<std::string>& item_names() const { return item_names_; }
  void set_item_names(std::vector<std::string> names) {
    if (names.size() != m_)
      throw std::invalid_argument("item name count mismatch");
    item_names_ = std::move(names);
  }

  // Index map back to the original item ids after project_columns.
  const std::vector<std::size_t>& original_items() const { return origin_; }
  void set_original_items(std::vector<std::size_t> o) { origin_ = std::move(o); }

  bool operator==(const TransactionDatabase& other) const {
    return n_ == other.n_ && m_ == other.m_ && bits_ == other.bits_;
  }

 private:
  void check_bounds(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= m_) throw std::out_of_range("database index out of range");
  }
  std::size_t n_, m_;
  std::vector<std::uint8_t> bits_;
  std::vector<std::string> item_names_;
  std::vector<std::size_t> origin_;
};

// M x M support matrix kept as exact co-occurrence counts over N.
class SupportMatrix {
 public:
  SupportMatrix(std::size_t m, std::size_t n)
      : m_(m), n_(n), counts_(m * m, 0) {}

  std::size_t dim() const { return m_; }
  std::size_t num_transactions() const { return n_; }

  long long count(std::size_t i, std::size_t j) const { return counts_[i * m_ + j]; }
  void set_count(std::size_t i, std::size_t j, long long c) { counts_[i * m_ + j] = c; }

  double value(std::size_t i, std::size_t j) const {
    return static_cast<double>(count(i, j)) / static_cast<double>(n_);
  }

 private:
  std::size_t m_, n_;
  std::vector<long long> counts_;
};

enum class DbFormat { ItemList, Dense };

inline DatabaseStats db_stats(const TransactionDatabase& db) {
  std::size_t w = 0;
  for (std::size_t i = 0; i < db.num_transactions(); ++i)
    for (std::size_t j = 0; j < db.num_items(); ++j) w += db.at(i, j);
  DatabaseStats s;
  s.total_ones = w;
  s.avg_items_per_transaction =
      static_cast<double>(w) / static_cast<double>(db.num_transactions());
  return s;
}

// S(i,j) = (column i . column j) / N, exact integer counts.
inline SupportMatrix support_matrix_bruteforce(const TransactionDatabase& db) {
  const std::size_t n = db.num_transactions(), m = db.num_items();
  SupportMatrix s(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      long long c = 0;
      for (std::size_t r = 0; r < n; ++r)
        if (db.at(r, i) && db.at(r, j)) ++c;
      s.set_count(i, j, c);
      s.set_count(j, i, c);
    }
  }
  return s;
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline TransactionDatabase generate_synthetic(std::size_t n, std::size_t m,
                                              double target_a,
                                              std::uint64_t seed) {
  if (target_a < 0 || target_a > static_cast<double>(m))
    throw std::invalid_argument("target_a must lie in [0, M]");
  TransactionDatabase db(n, m);
  std::mt19937_64 rng(seed);
  const double p = target_a / static_cast<double>(m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      db.set(i, j, uniform01(rng) < p);
  return db;
}

inline TransactionDatabase project_columns(const TransactionDatabase& db,
                                           const ItemSet& keep) {
  if (keep.empty()) throw std::invalid_argument("keep set must be nonempty");
  validate_itemset(keep, db.num_items());
  TransactionDatabase out(db.num_transactions(), keep.size());
  std::vector<std::string> names(keep.size());
  std::vector<std::size_t> origin(keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    origin[c] = keep[c];
    names[c] = db.item_names()[keep[c]];
    for (std::size_t r = 0; r < db.num_transactions(); ++r)
      out.set(r, c, db.at(r, keep[c]));
  }
  out.set_item_names(std::move(names));
  out.set_original_items(std::move(origin));
  return out;
}

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream iss(line);
  std::vector<std::string> toks;
  std::string t;
  while (iss >> t) toks.push_back(t);
  return toks;
}

inline bool parse_size(const std::string& tok, std::size_t& out) {
  if (tok.empty()) return false;
  for (char c : tok)
    if (c < '0' || c > '9') return false;
  out = std::stoull(tok);
  return true;
}

}  // namespace detail

// item-list: one transaction per line, whitespace-separated tokens, optional
// "#items M" header.  With a header the tokens must be numeric indices; a
// fully 1-based file (some token equals M, none equals 0) is shifted down.
// Without a header tokens are arbitrary and mapped in first-seen order.
inline TransactionDatabase load_transactions(std::istream& in, DbFormat format) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);

  if (format == DbFormat::Dense) {
    std::vector<std::vector<std::uint8_t>> rows;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
      auto toks = detail::tokenize(lines[ln]);
      if (toks.empty()) continue;
      std::vector<std::uint8_t> row;
      for (const auto& t : toks) {
        if (t != "0" && t != "1")
          throw std::runtime_error("parse error at line " +
                                   std::to_string(ln + 1) +
                                   ": expected 0/1, got '" + t + "'");
        row.push_back(t == "1");
      }
      if (!rows.empty() && row.size() != rows.front().size())
        throw std::runtime_error("parse error at line " + std::to_string(ln + 1) +
                                 ": ragged row");
      rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("empty stream");
    TransactionDatabase db(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < rows[i].size(); ++j)
        db.set(i, j, rows[i][j]);
    return db;
  }

  // item-list
  bool has_header = false;
  std::size_t declared_m = 0;
  std::size_t first_row = 0;
  if (!lines.empty()) {
    auto toks = detail::tokenize(lines[0]);
    if (toks.size() == 2 && toks[0] == "#items") {
      if (!detail::parse_size(toks[1], declared_m) || declared_m == 0)
        throw std::runtime_error("parse error at line 1: bad #items header");
      has_header = true;
      first_row = 1;
    }
  }

  // Empty lines are legal empty transactions.
  std::vector<std::vector<std::string>> rows;
  for (std::size_t ln = first_row; ln < lines.size(); ++ln)
    rows.push_back(detail::tokenize(lines[ln]));
  if (rows.empty()) throw std::runtime_error("empty stream");

  if (has_header) {
    // Numeric mode.  Decide 0- vs 1-based from the token range.
    bool saw_zero = false, saw_m = false;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (const auto& t : rows[r]) {
        std::size_t v;
        if (!detail::parse_size(t, v))
          throw std::runtime_error("parse error at line " +
                                   std::to_string(first_row + r + 1) +
                                   ": non-numeric item '" + t + "'");
        if (v == 0) saw_zero = true;
        if (v == declared_m) saw_m = true;
      }
    }
    const std::size_t shift = (saw_m && !saw_zero) ? 1 : 0;
    TransactionDatabase db(rows.size(), declared_m);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (const auto& t : rows[r]) {
        std::size_t v;
        detail::parse_size(t, v);
        if (v < shift || v - shift >= declared_m)
          throw std::runtime_error("bounds error at line " +
                                   std::to_string(first_row + r + 1) +
                                   ": item " + t + " outside declared range");
        db.set(r, v - shift, true);
      }
    }
    return db;
  }

  // Arbitrary tokens, first-seen-order id map.
  std::vector<std::string> order;
  auto index_of = [&](const std::string& t) {
    for (std::size_t k = 0; k < order.size(); ++k)
      if (order[k] == t) return k;
    order.push_back(t);
    return order.size() - 1;
  };
  std::vector<std::vector<std::size_t>> idx_rows(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& t : rows[r]) idx_rows[r].push_back(index_of(t));
  if (order.empty()) throw std::runtime_error("empty stream: no items");
  TransactionDatabase db(rows.size(), order.size());
  db.set_item_names(order);
  for (std::size_t r = 0; r < idx_rows.size(); ++r)
    for (std::size_t j : idx_rows[r]) db.set(r, j, true);
  return db;
}

inline TransactionDatabase load_transactions(const std::string& text,
                                             DbFormat format) {
  std::istringstream iss(text);
  return load_transactions(iss, format);
}

inline void save_transactions(const TransactionDatabase& db, std::ostream& out,
                              DbFormat format) {
  if (format == DbFormat::Dense) {
    for (std::size_t i = 0; i < db.num_transactions(); ++i) {
      for (std::size_t j = 0; j < db.num_items(); ++j) {
        if (j) out << ' ';
        out << static_cast<int>(db.at(i, j));
      }
      out << '\n';
    }
    return;
  }
  out << "#items " << db.num_items() << '\n';
  for (std::size_t i = 0; i < db.num_transactions(); ++i) {
    bool first = true;
    for (std::size_t j = 0; j < db.num_items(); ++j) {
      if (!db.at(i, j)) continue;
      if (!first) out << ' ';
      out << j;
      first = false;
    }
    out << '\n';
  }
}

}  // namespace qarm
