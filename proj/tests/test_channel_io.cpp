#include <filesystem>

#include "chanres/channel_io.hpp"
#include "chanres/error.hpp"
#include "chanres/free_sets.hpp"
#include "doctest.h"

using namespace chanres;

namespace {

void require_parse_error(const std::string& text) {
  try {
    channel_from_json(parse_json_text(text));
    FAIL("accepted: " << text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
}

}  // namespace

TEST_CASE("matrices round-trip bit-exactly through text") {
  Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    CMatrix m = ginibre(rng, 3, 5);
    m(0, 0) = Complex(1e-300, -0.1);
    m(1, 2) = Complex(1.0 / 3.0, 2.0 / 7.0);
    const auto text = matrix_to_json(m).dump();
    const CMatrix back = matrix_from_json(parse_json_text(text));
    REQUIRE(back.rows() == 3);
    REQUIRE(back.cols() == 5);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 5; ++j) CHECK(back(i, j) == m(i, j));
  }
}

TEST_CASE("channels round-trip in both representations") {
  Rng rng(11);
  const auto dir = std::filesystem::temp_directory_path() / "chanres_io_test";
  std::filesystem::create_directories(dir);
  for (int t = 0; t < 5; ++t) {
    const ChannelSpec n = random_channel(rng, 2, 3, 2);
    write_channel(dir / "k.json", n);
    const ChannelSpec k = read_channel(dir / "k.json");
    REQUIRE(k.kraus());
    REQUIRE(k.kraus()->size() == 2);
    for (std::size_t i = 0; i < 2; ++i) CHECK(((*k.kraus())[i] - (*n.kraus())[i]).norm() == 0.0);
    CHECK((k.choi().matrix() - n.choi().matrix()).norm() == 0.0);

    write_channel(dir / "c.json", n, true);
    const ChannelSpec c = read_channel(dir / "c.json");
    CHECK_FALSE(c.kraus());
    CHECK(c.dim_in() == 2);
    CHECK(c.dim_out() == 3);
    CHECK((c.choi().matrix() - n.choi().matrix()).norm() == 0.0);
    CHECK(channel_to_json(c) == channel_to_json(n, true));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("registered targets serialize") {
  for (const char* name : {"I2", "Had", "CNOT", "G2", "G+", "GPhi+"}) {
    const ChannelSpec t = target_channel(name);
    const ChannelSpec back = channel_from_json(parse_json_text(channel_to_json(t).dump()));
    CHECK((back.choi().matrix() - t.choi().matrix()).norm() == 0.0);
  }
}

TEST_CASE("malformed channel documents") {
  require_parse_error("{");
  require_parse_error("[1, 2]");
  require_parse_error(R"({"dim_in": 2, "dim_out": 2, "repr": "stinespring", "data": []})");
  require_parse_error(R"({"dim_out": 2, "repr": "choi", "data": [[[1, 0]]]})");
  require_parse_error(R"({"dim_in": 1, "dim_out": 2, "repr": "choi", "data": [[[0.5, 0], [0, 0]], [[0, 0]]]})");
  require_parse_error(R"({"dim_in": 1, "dim_out": 2, "repr": "choi", "data": [[[1, 0]]]})");
  require_parse_error(R"({"dim_in": 1, "dim_out": 1, "repr": "kraus", "data": [[[1]]]})");
  require_parse_error(R"({"dim_in": 1, "dim_out": 1, "repr": "kraus", "data": [[["1", 0]]]})");
  CHECK_THROWS_AS(read_channel("/nonexistent/chan.json"), Error);

  // well-formed but not a channel
  try {
    channel_from_json(parse_json_text(R"({"dim_in": 1, "dim_out": 1, "repr": "kraus", "data": [[[[2, 0]]]]})"));
    FAIL("non-TP Kraus accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CompletenessViolation);
  }
}
