#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "chancoh/generators.hpp"
#include "chancoh/io.hpp"

using namespace chancoh;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/chancoh_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("channel round-trip through JSON") {
  const Channel c = random_channel(2, 3, 2, 9);
  const Channel back = channel_from_json(channel_to_json(c));
  CHECK(back.dimA() == 2);
  CHECK(back.dimB() == 3);
  CHECK(distance_frobenius(back.choi(), c.choi()) < 1e-12);
}

TEST_CASE("channel from a Kraus document") {
  Json doc;
  doc["dimA"] = std::size_t{2};
  doc["dimB"] = std::size_t{2};
  doc["kraus"] = Json::array({matrix_to_json(ComplexMatrix::identity(2))});
  const Channel c = channel_from_json(doc);
  ComplexMatrix expect(4, 4);
  expect(0, 0) = expect(0, 3) = expect(3, 0) = expect(3, 3) = 1.0;
  CHECK(distance_frobenius(c.choi(), expect) < 1e-12);
}

TEST_CASE("channel document validation") {
  const Json good = channel_to_json(random_channel(2, 2, 2, 1));

  Json both = good;
  both["kraus"] = Json::array({matrix_to_json(ComplexMatrix::identity(2))});
  CHECK_THROWS_AS(channel_from_json(both), ValidationError);

  Json neither = good;
  neither.erase("choi");
  CHECK_THROWS_AS(channel_from_json(neither), ValidationError);

  Json no_dims = good;
  no_dims.erase("dimA");
  CHECK_THROWS_AS(channel_from_json(no_dims), ValidationError);

  Json zero_dim = good;
  zero_dim["dimB"] = 0;
  CHECK_THROWS_AS(channel_from_json(zero_dim), ValidationError);

  CHECK_THROWS_AS(channel_from_json(Json::array()), ValidationError);
}

TEST_CASE("matrix parsing errors") {
  // Entry that is not a [re, im] pair.
  CHECK_THROWS_AS(matrix_from_json(Json::parse(R"([[1.0]])")), ValidationError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse(R"([[[1.0]]])")), ValidationError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse(R"([[["a", 0.0]]])")), ValidationError);
  // Ragged rows.
  CHECK_THROWS_AS(matrix_from_json(Json::parse(R"([[[1,0],[0,0]],[[1,0]]])")), ValidationError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[]")), ValidationError);

  const ComplexMatrix m = matrix_from_json(Json::parse(R"([[[1,2],[3,-4]]])"));
  CHECK(m(0, 0) == Complex(1.0, 2.0));
  CHECK(m(0, 1) == Complex(3.0, -4.0));
}

TEST_CASE("superchannel and instrument round-trip") {
  const Superchannel t = random_isc_superchannel(2, 2, 14);
  const Superchannel back = superchannel_from_json(superchannel_to_json(t));
  REQUIRE(back.kraus.size() == t.kraus.size());
  for (std::size_t i = 0; i < t.kraus.size(); ++i)
    CHECK(distance_frobenius(back.kraus[i], t.kraus[i]) < 1e-12);

  Instrument inst;
  const std::size_t half = t.kraus.size() / 2;
  inst.parts.push_back(SubSuperchannel{
      2, 2, 2, 2, {t.kraus.begin(), t.kraus.begin() + static_cast<long>(half)}});
  inst.parts.push_back(SubSuperchannel{
      2, 2, 2, 2, {t.kraus.begin() + static_cast<long>(half), t.kraus.end()}});
  const Instrument inst_back = instrument_from_json(instrument_to_json(inst));
  REQUIRE(inst_back.parts.size() == 2);
  CHECK(inst_back.parts[0].kraus.size() == half);

  Json bad = instrument_to_json(inst);
  bad["dims"] = Json::array({2, 2, 2});
  CHECK_THROWS_AS(instrument_from_json(bad), ValidationError);
  Json no_parts = instrument_to_json(inst);
  no_parts.erase("parts");
  CHECK_THROWS_AS(instrument_from_json(no_parts), ValidationError);
}

TEST_CASE("report serialization carries all fields") {
  const CoherenceReport rep = c_max(random_channel(2, 2, 2, 15));
  const Json j = report_to_json(rep);
  CHECK(j["c_max_bits"].get<double>() == Catch::Approx(rep.c_max));
  CHECK(j["c_r"].get<double>() == Catch::Approx(rep.c_r));
  CHECK(j["relation_residual"].get<double>() == Catch::Approx(rep.relation_residual));
  CHECK(j["certificate"]["primal_value"].get<double>() ==
        Catch::Approx(rep.certificate.primal_value));
  CHECK(j["certificate"]["d"].size() == 4);
  CHECK(j["certificate"]["dual_matrix"].size() == 4);
}

TEST_CASE("file load and save") {
  TempFile f("roundtrip.json");
  const Json doc = channel_to_json(random_channel(2, 2, 2, 16));
  save_json(f.path, doc);
  const Json loaded = load_json(f.path);
  CHECK(loaded == doc);

  CHECK_THROWS_AS(load_json("/tmp/chancoh_test_does_not_exist.json"), ValidationError);

  TempFile malformed("malformed.json");
  std::ofstream(malformed.path) << "{not json";
  CHECK_THROWS_AS(load_json(malformed.path), ValidationError);
}
