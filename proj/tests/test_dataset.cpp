#include <doctest.h>

#include <sstream>

#include "qarm/dataset.hpp"
#include "test_helpers.hpp"

using namespace qarm;
using qarm::testing::reference_db;
using qarm::testing::random_nonempty_db;

TEST_CASE("item-list load matches the reference transcription") {
  const auto db = load_transactions("#items 3\n1 2\n1 3\n1 2 3\n2\n",
                                    DbFormat::ItemList);
  const auto ref = reference_db();
  REQUIRE(db.num_transactions() == 4);
  REQUIRE(db.num_items() == 3);
  CHECK(db == ref);
}

TEST_CASE("dense load handles an all-zero database") {
  const auto db = load_transactions("0 0\n0 0\n", DbFormat::Dense);
  CHECK(db.num_transactions() == 2);
  CHECK(db.num_items() == 2);
  CHECK(db_stats(db).total_ones == 0);
}

TEST_CASE("out-of-range item is a bounds error") {
  CHECK_THROWS_WITH_AS(load_transactions("#items 3\n1 5\n", DbFormat::ItemList),
                       doctest::Contains("bounds error"), std::runtime_error);
}

TEST_CASE("malformed dense line reports the line number") {
  CHECK_THROWS_WITH_AS(load_transactions("0 1\n0 x\n", DbFormat::Dense),
                       doctest::Contains("line 2"), std::runtime_error);
}

TEST_CASE("empty stream is rejected") {
  CHECK_THROWS(load_transactions("", DbFormat::Dense));
  CHECK_THROWS(load_transactions("", DbFormat::ItemList));
}

TEST_CASE("arbitrary tokens map in first-seen order") {
  const auto db = load_transactions("milk bread\nbread eggs\n", DbFormat::ItemList);
  REQUIRE(db.num_items() == 3);
  CHECK(db.item_names()[0] == "milk");
  CHECK(db.item_names()[1] == "bread");
  CHECK(db.item_names()[2] == "eggs");
  CHECK(db.at(0, 0) == 1);
  CHECK(db.at(1, 1) == 1);
  CHECK(db.at(1, 2) == 1);
  CHECK(db.at(1, 0) == 0);
}

TEST_CASE("db_stats on the reference database") {
  const auto s = db_stats(reference_db());
  CHECK(s.total_ones == 8);
  CHECK(s.avg_items_per_transaction == doctest::Approx(2.0));
}

TEST_CASE("db_stats extremes") {
  TransactionDatabase ones(3, 5);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 5; ++j) ones.set(i, j, true);
  const auto s = db_stats(ones);
  CHECK(s.total_ones == 15);
  CHECK(s.avg_items_per_transaction == doctest::Approx(5.0));
  CHECK(db_stats(TransactionDatabase(2, 2)).total_ones == 0);
}

TEST_CASE("brute-force supports on the reference database") {
  const auto s = support_matrix_bruteforce(reference_db());
  CHECK(s.value(0, 0) == doctest::Approx(0.75));
  CHECK(s.value(0, 1) == doctest::Approx(0.5));
  CHECK(s.value(0, 2) == doctest::Approx(0.5));
  CHECK(s.value(1, 1) == doctest::Approx(0.75));
  CHECK(s.value(1, 2) == doctest::Approx(0.25));
  CHECK(s.value(2, 2) == doctest::Approx(0.5));
}

TEST_CASE("support matrix identity-like cases") {
  auto two = load_transactions("1 0\n0 1\n", DbFormat::Dense);
  const auto s = support_matrix_bruteforce(two);
  CHECK(s.value(0, 0) == doctest::Approx(0.5));
  CHECK(s.value(1, 1) == doctest::Approx(0.5));
  CHECK(s.value(0, 1) == 0.0);
}

TEST_CASE("support matrix invariants on random databases") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto db = random_nonempty_db(12, 6, 0.4, seed);
    const auto s = support_matrix_bruteforce(db);
    long long trace = 0;
    for (std::size_t i = 0; i < 6; ++i) {
      trace += s.count(i, i);
      for (std::size_t j = 0; j < 6; ++j) {
        CHECK(s.count(i, j) == s.count(j, i));
        CHECK(s.value(i, j) >= 0.0);
        CHECK(s.value(i, j) <= 1.0);
        CHECK(s.count(i, j) <= std::min(s.count(i, i), s.count(j, j)));
      }
    }
    CHECK(trace == static_cast<long long>(db_stats(db).total_ones));
  }
}

TEST_CASE("generate_synthetic endpoints and determinism") {
  const auto zero = generate_synthetic(5, 4, 0.0, 1);
  CHECK(db_stats(zero).total_ones == 0);
  const auto full = generate_synthetic(5, 4, 4.0, 1);
  CHECK(db_stats(full).total_ones == 20);
  CHECK(generate_synthetic(20, 6, 2.0, 42) == generate_synthetic(20, 6, 2.0, 42));
  CHECK_THROWS(generate_synthetic(5, 4, -0.1, 1));
  CHECK_THROWS(generate_synthetic(5, 4, 4.5, 1));
}

TEST_CASE("synthetic realized density concentrates near the target") {
  // 3-sigma binomial band around a=3 for N=1000, M=10
  const auto db = generate_synthetic(1000, 10, 3.0, 7);
  const double a = db_stats(db).avg_items_per_transaction;
  CHECK(a > 2.5);
  CHECK(a < 3.5);
}

TEST_CASE("project_columns basics") {
  const auto db = reference_db();
  const auto p01 = project_columns(db, {0, 1});
  CHECK(p01.num_items() == 2);
  CHECK(p01.at(0, 0) == 1);
  CHECK(p01.at(1, 1) == 0);
  CHECK(p01.at(3, 1) == 1);
  CHECK(p01.original_items() == std::vector<std::size_t>{0, 1});

  CHECK(project_columns(db, {0, 1, 2}) == db);

  const auto p2 = project_columns(db, {2});
  CHECK(p2.at(0, 0) == 0);
  CHECK(p2.at(1, 0) == 1);
  CHECK(p2.at(2, 0) == 1);
  CHECK(p2.at(3, 0) == 0);

  CHECK_THROWS(project_columns(db, {}));
  CHECK_THROWS(project_columns(db, {0, 7}));
}

TEST_CASE("projection commutes with the support oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto db = random_nonempty_db(10, 5, 0.4, seed);
    const ItemSet keep{1, 3, 4};
    const auto sub = project_columns(db, keep);
    const auto s_full = support_matrix_bruteforce(db);
    const auto s_sub = support_matrix_bruteforce(sub);
    for (std::size_t a = 0; a < keep.size(); ++a)
      for (std::size_t b = 0; b < keep.size(); ++b)
        CHECK(s_sub.count(a, b) == s_full.count(keep[a], keep[b]));
  }
}

TEST_CASE("save/load round-trips bits exactly in both formats") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto db = random_nonempty_db(9, 5, 0.35, seed);
    for (auto fmt : {DbFormat::Dense, DbFormat::ItemList}) {
      std::ostringstream oss;
      save_transactions(db, oss, fmt);
      const auto back = load_transactions(oss.str(), fmt);
      CHECK(back == db);
    }
  }
}
