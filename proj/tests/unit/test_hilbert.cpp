#include <doctest.h>

#include <set>

#include "tcdark/hilbert.hpp"

using namespace tcdark;

namespace {

long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

long power(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Sector N, per-cavity cap c: Σ_p #(photon vectors with total p, entries <= c) × C(n, N-p) × positions^n.
long sector_dim(int k, int n, bool mobile, int N, int c) {
  long total = 0;
  for (int p = 0; p <= N; ++p) {
    long configs = 0;
    std::vector<int> v(static_cast<std::size_t>(k), 0);
    for (long code = 0; code < power(c + 1, k); ++code) {
      long x = code;
      int sum = 0;
      for (int i = 0; i < k; ++i) {
        sum += static_cast<int>(x % (c + 1));
        x /= (c + 1);
      }
      if (sum == p) ++configs;
    }
    total += configs * binom(n, N - p) * (mobile ? power(k, n) : 1);
  }
  return total;
}

}  // namespace

TEST_CASE("sector dimensions of the paper models") {
  CHECK(HilbertSpace::enumerate(1, {2, false, {}}, 1)->dim() == 3);
  CHECK(HilbertSpace::enumerate(1, {4, false, {}}, 2)->dim() == 11);
  CHECK(HilbertSpace::enumerate(2, {2, true, {}}, 1)->dim() == 16);
  CHECK(HilbertSpace::enumerate(2, {4, true, {}}, 2)->dim() == 272);
  CHECK(HilbertSpace::enumerate(1, {1, false, {}}, 1)->dim() == 2);
}

TEST_CASE("dimension matches combinatorial count") {
  for (int k = 1; k <= 2; ++k)
    for (int n = 1; n <= 4; ++n)
      for (bool mobile : {false, true})
        for (int N = 0; N <= 3; ++N) {
          CAPTURE(k);
          CAPTURE(n);
          CAPTURE(mobile);
          CAPTURE(N);
          const auto space = HilbertSpace::enumerate(k, {n, mobile, {}}, N);
          CHECK(static_cast<long>(space->dim()) == sector_dim(k, n, mobile, N, N));
        }
}

TEST_CASE("unrestricted mobile dimension is photon configs times (2k)^n") {
  for (int k = 1; k <= 2; ++k)
    for (int n = 1; n <= 4; ++n)
      for (int c = 0; c <= 2; ++c) {
        const auto space = HilbertSpace::enumerate(k, {n, true, {}}, std::nullopt, c);
        CHECK(static_cast<long>(space->dim()) == power(c + 1, k) * power(2 * k, n));
      }
}

TEST_CASE("sector dimensions sum to the unrestricted dimension") {
  for (int k = 1; k <= 2; ++k)
    for (int c = 0; c <= 2; ++c) {
      const int n = 3;
      const auto full = HilbertSpace::enumerate(k, {n, true, {}}, std::nullopt, c);
      std::size_t sum = 0;
      for (int N = 0; N <= k * c + n; ++N) {
        sum += HilbertSpace::enumerate(k, {n, true, {}}, N, c)->dim();
      }
      CHECK(sum == full->dim());
    }
}

TEST_CASE("basis order is deterministic and indices round-trip") {
  const auto a = HilbertSpace::enumerate(2, {2, true, {}}, 1);
  const auto b = HilbertSpace::enumerate(2, {2, true, {}}, 1);
  REQUIRE(a->dim() == b->dim());
  for (std::size_t i = 0; i < a->dim(); ++i) {
    CHECK(a->state(i) == b->state(i));
    CHECK(a->index_of(a->state(i)) == i);
  }
  CHECK(a->index_of(a->state(0)) == 0);
  for (std::size_t i = 1; i < a->dim(); ++i) CHECK(a->state(i - 1) < a->state(i));
}

TEST_CASE("states outside the sector are rejected") {
  const auto s = HilbertSpace::enumerate(1, {2, false, {}}, 1);
  BasisState two{{1}, {{1, 0}, {0, 0}}};
  CHECK_THROWS_AS(s->index_of(two), std::out_of_range);
  CHECK_FALSE(s->find(two).has_value());
}

TEST_CASE("enumeration preconditions") {
  CHECK_THROWS_AS(HilbertSpace::enumerate(0, {2, false, {}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(HilbertSpace::enumerate(1, {2, false, {}}, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(HilbertSpace::enumerate(1, {2, false, {}}, std::nullopt), std::invalid_argument);
}

TEST_CASE("fixed atoms stay home and labels are readable") {
  const auto s = HilbertSpace::enumerate(2, {2, false, {0, 1}}, 1);
  CHECK(s->dim() == 4);
  for (const auto& st : s->basis()) {
    CHECK(st.atoms[0].position == 0);
    CHECK(st.atoms[1].position == 1);
  }
  const auto one = HilbertSpace::enumerate(1, {2, false, {}}, 1);
  std::set<std::string> labels;
  for (std::size_t i = 0; i < one->dim(); ++i) labels.insert(one->label(i));
  CHECK(labels.count("|1|0@0 0@0⟩") == 1);
  CHECK(labels.count("|0|1@0 0@0⟩") == 1);
  CHECK(format_photons({0, 1}) == "0 1");
  CHECK(one->photon_configurations().size() == 2);
}
