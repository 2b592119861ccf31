#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "test_support.hpp"

using namespace momprob;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

namespace {

json base_instance() {
  return json::parse(R"({
    "sites": ["a", "b"],
    "distances": [["0", "1"], ["1", "0"]],
    "kspec": {"variant": "hard_core", "Q": 2, "D": "2"},
    "L": {"ell0": "1",
          "ell1": ["1/2", "1/2"],
          "ell2": [["1/2", "1/4"], ["1/4", "1/2"]]},
    "gamma": ["1", "2/3"],
    "r_max": "7/2"
  })");
}

}  // namespace

TEST_CASE("rational parsing accepts strings and integers, never floats") {
  CHECK(rat_from_json(json(5), "$") == 5);
  CHECK(rat_from_json(json(-7), "$") == -7);
  CHECK(rat_from_json(json("3/4"), "$") == Rat(3, 4));
  CHECK(rat_from_json(json("-2/8"), "$") == Rat(-1, 4));
  CHECK(rat_from_json(json("6"), "$") == 6);

  CHECK_THROWS_MATCHES(rat_from_json(json(0.5), "$.w"), FormatError,
                       MessageMatches(ContainsSubstring("$.w") &&
                                      ContainsSubstring("floating-point numbers are not accepted")));
  CHECK_THROWS_AS(rat_from_json(json("abc"), "$"), FormatError);
  CHECK_THROWS_AS(rat_from_json(json("1/0"), "$"), FormatError);
  CHECK_THROWS_AS(rat_from_json(json("1/2/3"), "$"), FormatError);
  CHECK_THROWS_AS(rat_from_json(json::parse("null"), "$"), FormatError);
  CHECK_THROWS_AS(rat_from_json(json(18446744073709551615ULL), "$"), FormatError);

  CHECK(rat_to_json(Rat(-1, 4)) == json("-1/4"));
  CHECK(rat_to_json(Rat(3)) == json("3"));
  CHECK(rat_from_json(rat_to_json(Rat(22, 7)), "$") == Rat(22, 7));
}

TEST_CASE("instance documents round trip") {
  const RealizabilityInstance inst = instance_from_json(base_instance());
  CHECK(inst.space.labels() == std::vector<std::string>{"a", "b"});
  CHECK(inst.space.distance(0, 1) == 1);
  CHECK(inst.kspec.kind == KSpec::Kind::kHardCore);
  CHECK(inst.kspec.q == 2);
  CHECK(*inst.kspec.d == 2);
  CHECK(inst.L.moment(0).value() == 1);
  CHECK(inst.L.moment(2).at({0, 1}) == Rat(1, 4));
  CHECK(*inst.r_max == Rat(7, 2));

  const RealizabilityInstance again = instance_from_json(instance_to_json(inst));
  CHECK(again.space.labels() == inst.space.labels());
  CHECK(again.space.distances() == inst.space.distances());
  CHECK(again.kspec.kind == inst.kspec.kind);
  CHECK(again.kspec.q == inst.kspec.q);
  CHECK(again.kspec.d == inst.kspec.d);
  CHECK(again.L == inst.L);
  CHECK(again.gamma == inst.gamma);
  CHECK(again.r_max == inst.r_max);
}

TEST_CASE("ell0 defaults to one and null fields read as absent") {
  json doc = base_instance();
  doc["L"].erase("ell0");
  doc["gamma"] = nullptr;
  doc.erase("r_max");
  const RealizabilityInstance inst = instance_from_json(doc);
  CHECK(inst.L.moment(0).value() == 1);
  CHECK_FALSE(inst.gamma.has_value());
  CHECK_FALSE(inst.r_max.has_value());
}

TEST_CASE("unknown keys are ignored") {
  json doc = base_instance();
  doc["meta"] = {{"generator", "test"}, {"note", 17}};
  doc["extra"] = json::array({1, 2, 3});
  CHECK(instance_from_json(doc).kspec.q == 2);
}

TEST_CASE("third-order moment data parses from nested arrays") {
  json doc = json::parse(R"({
    "sites": ["a"],
    "kspec": {"variant": "at_most_q", "Q": 2},
    "L": {"ell1": ["1"], "ell2": [["2"]], "ell3": [[["5"]]]}
  })");
  const RealizabilityInstance inst = instance_from_json(doc);
  CHECK(inst.L.max_order() == 3);
  CHECK(inst.L.moment(3).at({0, 0, 0}) == 5);

  const json out = instance_to_json(inst);
  CHECK(out["L"]["ell3"][0][0][0] == json("5"));

  doc["L"]["ell3"] = json::parse(R"([[["5"], ["6"]]])");
  CHECK_THROWS_MATCHES(instance_from_json(doc), FormatError,
                       MessageMatches(ContainsSubstring("$.L.ell3")));
}

TEST_CASE("format errors carry the offending path") {
  json doc = base_instance();
  doc["L"]["ell1"][0] = 0.5;
  CHECK_THROWS_MATCHES(instance_from_json(doc), FormatError,
                       MessageMatches(ContainsSubstring("$.L.ell1[0]")));

  doc = base_instance();
  doc["L"].erase("ell1");
  CHECK_THROWS_MATCHES(instance_from_json(doc), FormatError,
                       MessageMatches(ContainsSubstring("$.L.ell1") &&
                                      ContainsSubstring("missing required field")));

  doc = base_instance();
  doc["L"]["ell1"] = json::array({"1/2", "1/2", "1/2"});
  CHECK_THROWS_MATCHES(instance_from_json(doc), FormatError,
                       MessageMatches(ContainsSubstring("expected 2 entries, found 3")));

  doc = base_instance();
  doc["L"]["ell2"][0][1] = "1/3";  // breaks symmetry
  CHECK_THROWS_MATCHES(instance_from_json(doc), FormatError,
                       MessageMatches(ContainsSubstring("$.L") &&
                                      ContainsSubstring("not symmetric")));

  doc = base_instance();
  doc["kspec"]["variant"] = "between_q";
  CHECK_THROWS_MATCHES(instance_from_json(doc), FormatError,
                       MessageMatches(ContainsSubstring("$.kspec.variant") &&
                                      ContainsSubstring("between_q")));

  doc = base_instance();
  doc["kspec"].erase("D");
  CHECK_THROWS_MATCHES(instance_from_json(doc), FormatError,
                       MessageMatches(ContainsSubstring("$.kspec.D")));

  doc = base_instance();
  doc["kspec"]["Q"] = -1;
  CHECK_THROWS_AS(instance_from_json(doc), FormatError);

  doc = base_instance();
  doc["distances"][0][1] = "1/2";  // asymmetric metric
  CHECK_THROWS_AS(instance_from_json(doc), FormatError);

  doc = base_instance();
  doc.erase("sites");
  CHECK_THROWS_MATCHES(instance_from_json(doc), FormatError,
                       MessageMatches(ContainsSubstring("$.sites")));

  doc = base_instance();
  doc["gamma"][0] = "0";
  CHECK_THROWS_AS(instance_from_json(doc), FormatError);
}

TEST_CASE("measure documents round trip") {
  const json doc = json::parse(R"({
    "sites": ["a", "b"],
    "atoms": [{"counts": [0, 0], "weight": "1/4"},
              {"counts": [1, 2], "weight": "3/4"}]
  })");
  const MeasureFile file = measure_from_json(doc);
  CHECK(file.space.labels() == std::vector<std::string>{"a", "b"});
  REQUIRE(file.measure.atoms().size() == 2);
  CHECK(file.measure.atoms()[1].first.counts == std::vector<int>{1, 2});
  CHECK(file.measure.atoms()[1].second == Rat(3, 4));

  const MeasureFile again = measure_from_json(measure_to_json(file.space, file.measure));
  CHECK(again.measure.atoms() == file.measure.atoms());
}

TEST_CASE("measure documents validate") {
  json doc = json::parse(R"({
    "sites": ["a"],
    "atoms": [{"counts": [1], "weight": "0"}]
  })");
  CHECK_THROWS_MATCHES(measure_from_json(doc), FormatError,
                       MessageMatches(ContainsSubstring("$.atoms[0].weight") &&
                                      ContainsSubstring("positive")));

  doc["atoms"][0]["weight"] = "1/2";
  doc["atoms"].push_back(json::parse(R"({"counts": [1], "weight": "1/2"})"));
  CHECK_THROWS_MATCHES(measure_from_json(doc), FormatError,
                       MessageMatches(ContainsSubstring("$.atoms")));

  doc = json::parse(R"({"sites": ["a"], "atoms": [{"counts": [1, 2], "weight": "1"}]})");
  CHECK_THROWS_MATCHES(measure_from_json(doc), FormatError,
                       MessageMatches(ContainsSubstring("expected 1 counts")));

  doc = json::parse(R"({"sites": ["a"], "atoms": [{"counts": [-1], "weight": "1"}]})");
  CHECK_THROWS_MATCHES(measure_from_json(doc), FormatError,
                       MessageMatches(ContainsSubstring("$.atoms[0].counts[0]")));
}

TEST_CASE("certificate documents round trip") {
  PositivityCertificate cert;
  cert.f0 = Rat(1, 3);
  cert.f1 = {Rat(-1), Rat(0)};
  cert.f2 = {{Rat(1), Rat(1, 2)}, {Rat(1, 2), Rat(0)}};
  cert.f3 = Rat(2, 5);
  cert.gamma = RatVec{Rat(1), Rat(1)};
  const PositivityCertificate again = certificate_from_json(certificate_to_json(cert), "$", 2);
  CHECK(again.f0 == cert.f0);
  CHECK(again.f1 == cert.f1);
  CHECK(again.f2 == cert.f2);
  CHECK(again.f3 == cert.f3);
  CHECK(again.gamma == cert.gamma);

  json doc = certificate_to_json(cert);
  doc.erase("gamma");
  CHECK_THROWS_MATCHES(certificate_from_json(doc, "$", 2), FormatError,
                       MessageMatches(ContainsSubstring("f3 needs gamma")));

  doc = certificate_to_json(cert);
  doc.erase("f3");
  doc.erase("gamma");
  const PositivityCertificate quadratic = certificate_from_json(doc, "$", 2);
  CHECK_FALSE(quadratic.f3.has_value());
  CHECK_FALSE(quadratic.gamma.has_value());
}

TEST_CASE("verdict documents round trip") {
  const RealizabilityInstance inst = instance_from_json(base_instance());

  RepresentingMeasure rep{FiniteMeasure(2, {{Configuration{{0, 0}}, Rat(1, 2)},
                                            {Configuration{{0, 1}}, Rat(1, 2)}}),
                          Rat(1, 3)};
  const json mdoc = verdict_to_json(Verdict{rep}, inst.kspec, 1000);
  CHECK(mdoc["verdict"] == "measure");
  CHECK(mdoc["caps"]["Q"] == 2);
  CHECK(mdoc["caps"]["enumeration"] == 1000);
  CHECK(mdoc["realized_R"] == json("1/3"));
  const Verdict mback = verdict_from_json(mdoc, "$", 2);
  REQUIRE(std::holds_alternative<RepresentingMeasure>(mback));
  CHECK(std::get<RepresentingMeasure>(mback).measure.atoms() == rep.measure.atoms());
  CHECK(*std::get<RepresentingMeasure>(mback).realized_r == Rat(1, 3));

  PositivityCertificate cert;
  cert.f0 = Rat(0);
  cert.f1 = {Rat(-1), Rat(0)};
  cert.f2 = {{Rat(1), Rat(0)}, {Rat(0), Rat(0)}};
  const json cdoc = verdict_to_json(Verdict{cert}, inst.kspec, 500);
  CHECK(cdoc["verdict"] == "certificate");
  const Verdict cback = verdict_from_json(cdoc, "$", 2);
  REQUIRE(std::holds_alternative<PositivityCertificate>(cback));
  CHECK(std::get<PositivityCertificate>(cback).f1 == cert.f1);

  json bad = mdoc;
  bad["verdict"] = "proof";
  CHECK_THROWS_MATCHES(verdict_from_json(bad, "$", 2), FormatError,
                       MessageMatches(ContainsSubstring("unknown verdict \"proof\"")));

  bad = mdoc;
  bad["support"][0]["weight"] = "-1";
  CHECK_THROWS_MATCHES(verdict_from_json(bad, "$", 2), FormatError,
                       MessageMatches(ContainsSubstring("$.support")));
}

TEST_CASE("json loading reports the source on parse errors") {
  std::istringstream broken("{\"sites\": [");
  CHECK_THROWS_MATCHES(load_json(broken, "input.json"), FormatError,
                       MessageMatches(ContainsSubstring("input.json")));
  CHECK_THROWS_MATCHES(load_json_file("/nonexistent/path.json"), FormatError,
                       MessageMatches(ContainsSubstring("cannot open file")));
}
