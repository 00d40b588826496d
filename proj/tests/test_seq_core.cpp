#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rnnlab/alphabet.hpp"
#include "rnnlab/stream.hpp"

using namespace rnnlab;

TEST_CASE("one-hot encoding over a plain alphabet") {
  Alphabet a = Alphabet::chars("ab$");
  CHECK(a.size() == 3);
  CHECK(a.encoding_dim() == 3);

  Eigen::VectorXd va = a.encode("a");
  CHECK(va[0] == 1.0);
  CHECK(va[1] == 0.0);
  CHECK(va[2] == 0.0);
  Eigen::VectorXd vd = a.encode("$");
  CHECK(vd[0] == 0.0);
  CHECK(vd[2] == 1.0);

  CHECK_THROWS(a.encode("x"));
}

TEST_CASE("digit-pair encoding concatenates per-operand one-hots") {
  Alphabet p = Alphabet::digit_pairs(10);
  CHECK(p.size() == 101);
  CHECK(p.encoding_dim() == 22);
  Eigen::VectorXd v = p.encode("37");
  CHECK(v.sum() == 2.0);
  CHECK(v[3] == 1.0);        // first operand digit 3 of {0..9,$}
  CHECK(v[11 + 7] == 1.0);   // second operand digit 7
  Eigen::VectorXd sep = p.encode("$$");
  CHECK(sep[10] == 1.0);
  CHECK(sep[11 + 10] == 1.0);
}

TEST_CASE("decode_argmax with tie to the lowest index") {
  Alphabet a = Alphabet::chars("ab$");
  Eigen::VectorXd v(3);
  v << 0.1, 0.8, 0.1;
  CHECK(a.decode_argmax(v) == "b");
  v << 0.5, 0.5, 0.0;
  CHECK(a.decode_argmax(v) == "a");
  Eigen::VectorXd bad(4);
  CHECK_THROWS(a.decode_argmax(bad));
}

TEST_CASE("one-hot round trip over every symbol") {
  for (const Alphabet& a :
       {Alphabet::chars("ab$"), Alphabet::digits(10), Alphabet::digit_pairs(2),
        Alphabet::digit_pairs(10)}) {
    for (int i = 0; i < a.size(); ++i) {
      Eigen::VectorXd v(a.encoding_dim());
      a.encode_into(i, v);
      CHECK(a.decode_argmax(v) == a.token(i));
    }
  }
}

TEST_CASE("alphabet invariants") {
  CHECK_THROWS(Alphabet::plain({"a", "a"}));  // duplicates
  CHECK_THROWS(Alphabet::plain({"a"}));       // size >= 2
  Alphabet a = Alphabet::chars("ab");
  for (int i = 0; i < a.size(); ++i) CHECK(a.index(a.token(i)) == i);
}

TEST_CASE("plan_batches splits a stream into lanes and windows") {
  BatchPlan p = plan_batches(100, 2, 25);
  CHECK(p.batch_size == 2);
  CHECK(p.lane_len == 50);
  CHECK(p.n_windows == 2);
  CHECK(p.covered() == 100);

  // final symbol dropped
  BatchPlan q = plan_batches(101, 2, 25);
  CHECK(q.lane_len == 50);
  CHECK(q.covered() == 100);

  CHECK_THROWS(plan_batches(49, 2, 25));
}

TEST_CASE("batch plan reassembly covers the prefix contiguously") {
  BatchPlan p = plan_batches(103, 2, 10);
  std::vector<int> positions;
  for (int lane = 0; lane < p.batch_size; ++lane)
    for (int w = 0; w < p.n_windows; ++w)
      for (int t = 0; t < p.unfold_len; ++t)
        positions.push_back(p.pos(lane, w, t));
  std::sort(positions.begin(), positions.end());
  REQUIRE(static_cast<int>(positions.size()) == p.covered());
  for (int i = 0; i < p.covered(); ++i) CHECK(positions[i] == i);
}
