#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "momprob/config_space.hpp"
#include "momprob/errors.hpp"
#include "momprob/moment_algebra.hpp"
#include "momprob/rational.hpp"
#include "momprob/realizability.hpp"

// JSON formats. Rationals travel as strings "p/q" (or "p" for integers);
// plain JSON integers are accepted as shorthand, floating-point numbers are
// rejected. Emitted rationals are always canonical: lowest terms, positive
// denominator. Format errors name the offending location as a JSON path
// like "$.L.ell2[0][1]".

namespace momprob {

using json = nlohmann::json;

namespace io_detail {

inline std::string at(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

inline std::string at(const std::string& path, const char* key) {
  return path + "." + key;
}

}  // namespace io_detail

inline Rat rat_from_json(const json& j, const std::string& path) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(
                                      std::numeric_limits<std::int64_t>::max()))
      throw FormatError(path, "integer literal is too large; pass it as a string");
    return Rat(static_cast<long>(j.get<std::int64_t>()));
  }
  if (j.is_number_float())
    throw FormatError(path, "floating-point numbers are not accepted; write a rational string like \"1/3\"");
  if (j.is_string()) {
    try {
      return parse_rat(j.get<std::string>());
    } catch (const std::exception& e) {
      throw FormatError(path, e.what());
    }
  }
  throw FormatError(path, "expected a rational: a string \"p/q\" or an integer");
}

inline json rat_to_json(const Rat& r) { return format_rat(r); }

inline int int_from_json(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.is_number_float())
    throw FormatError(path, "expected an integer");
  const std::int64_t v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw FormatError(path, "integer out of range");
  return static_cast<int>(v);
}

inline const json& require_field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw FormatError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw FormatError(io_detail::at(path, key), "missing required field");
  return *it;
}

inline const json* optional_field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw FormatError(path, "expected an object");
  const auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

inline RatVec ratvec_from_json(const json& j, const std::string& path, std::size_t size) {
  if (!j.is_array()) throw FormatError(path, "expected an array");
  if (j.size() != size)
    throw FormatError(path, "expected " + std::to_string(size) + " entries, found " +
                                std::to_string(j.size()));
  RatVec out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) out.push_back(rat_from_json(j[i], io_detail::at(path, i)));
  return out;
}

inline RatMat ratmat_from_json(const json& j, const std::string& path, std::size_t size) {
  if (!j.is_array()) throw FormatError(path, "expected an array of arrays");
  if (j.size() != size)
    throw FormatError(path, "expected " + std::to_string(size) + " rows, found " +
                                std::to_string(j.size()));
  RatMat out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i)
    out.push_back(ratvec_from_json(j[i], io_detail::at(path, i), size));
  return out;
}

// Order-3 tensor as triply nested arrays, flattened row-major.
inline RatVec cube_from_json(const json& j, const std::string& path, std::size_t size) {
  if (!j.is_array() || j.size() != size)
    throw FormatError(path, "expected " + std::to_string(size) + " matrices");
  RatVec out;
  out.reserve(size * size * size);
  for (std::size_t i = 0; i < size; ++i) {
    const RatMat slice = ratmat_from_json(j[i], io_detail::at(path, i), size);
    for (const auto& row : slice)
      for (const Rat& v : row) out.push_back(v);
  }
  return out;
}

inline json ratvec_to_json(const RatVec& v) {
  json out = json::array();
  for (const Rat& r : v) out.push_back(rat_to_json(r));
  return out;
}

inline json ratmat_to_json(const RatMat& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back(ratvec_to_json(row));
  return out;
}

inline json tensor_to_json(const MomentTensor& t) {
  const std::size_t n = t.sites();
  const RatVec& e = t.entries();
  switch (t.order()) {
    case 0:
      return rat_to_json(t.value());
    case 1:
      return ratvec_to_json(e);
    case 2: {
      json out = json::array();
      for (std::size_t x = 0; x < n; ++x) {
        json row = json::array();
        for (std::size_t y = 0; y < n; ++y) row.push_back(rat_to_json(e[x * n + y]));
        out.push_back(std::move(row));
      }
      return out;
    }
    default: {
      json out = json::array();
      for (std::size_t x = 0; x < n; ++x) {
        json slice = json::array();
        for (std::size_t y = 0; y < n; ++y) {
          json row = json::array();
          for (std::size_t z = 0; z < n; ++z) row.push_back(rat_to_json(e[(x * n + y) * n + z]));
          slice.push_back(std::move(row));
        }
        out.push_back(std::move(slice));
      }
      return out;
    }
  }
}

inline KSpec kspec_from_json(const json& j, const std::string& path) {
  const json& vj = require_field(j, "variant", path);
  if (!vj.is_string()) throw FormatError(io_detail::at(path, "variant"), "expected a string");
  const std::string variant = vj.get<std::string>();
  const int q = int_from_json(require_field(j, "Q", path), io_detail::at(path, "Q"));
  if (variant == "at_most_q") return KSpec::at_most(q);
  if (variant == "exactly_q") return KSpec::exactly(q);
  if (variant == "simple") return KSpec::simple(q);
  if (variant == "hard_core") {
    const json& dj = require_field(j, "D", path);
    return KSpec::hard_core(rat_from_json(dj, io_detail::at(path, "D")), q);
  }
  throw FormatError(io_detail::at(path, "variant"),
                    "unknown variant \"" + variant +
                        "\"; expected at_most_q, exactly_q, simple or hard_core");
}

inline json kspec_to_json(const KSpec& kspec) {
  json out;
  switch (kspec.kind) {
    case KSpec::Kind::kAtMostQ:
      out["variant"] = "at_most_q";
      break;
    case KSpec::Kind::kExactlyQ:
      out["variant"] = "exactly_q";
      break;
    case KSpec::Kind::kSimple:
      out["variant"] = "simple";
      break;
    case KSpec::Kind::kHardCore:
      out["variant"] = "hard_core";
      break;
  }
  out["Q"] = kspec.q;
  if (kspec.d) out["D"] = rat_to_json(*kspec.d);
  return out;
}

inline SiteSpace sites_from_json(const json& j, const std::string& path) {
  const json& sj = require_field(j, "sites", path);
  if (!sj.is_array() || sj.empty())
    throw FormatError(io_detail::at(path, "sites"), "expected a nonempty array of site labels");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < sj.size(); ++i) {
    if (!sj[i].is_string())
      throw FormatError(io_detail::at(io_detail::at(path, "sites"), i), "expected a string label");
    labels.push_back(sj[i].get<std::string>());
  }
  std::optional<RatMat> distances;
  if (const json* dj = optional_field(j, "distances", path))
    distances = ratmat_from_json(*dj, io_detail::at(path, "distances"), labels.size());
  try {
    if (distances) return SiteSpace(std::move(labels), std::move(*distances));
    return SiteSpace(std::move(labels));
  } catch (const std::exception& e) {
    throw FormatError(path, e.what());
  }
}

inline json sites_to_json(const SiteSpace& space) {
  json out;
  out["sites"] = space.labels();
  if (space.has_distances()) out["distances"] = ratmat_to_json(space.distances());
  return out;
}

inline MomentFunctional functional_from_json(const json& j, const std::string& path,
                                             std::size_t sites) {
  // Point processes carry total mass 1, so a missing ell0 defaults to 1.
  Rat ell0(1);
  if (const json* e0 = optional_field(j, "ell0", path))
    ell0 = rat_from_json(*e0, io_detail::at(path, "ell0"));
  RatVec ell1 = ratvec_from_json(require_field(j, "ell1", path), io_detail::at(path, "ell1"), sites);
  RatMat ell2 = ratmat_from_json(require_field(j, "ell2", path), io_detail::at(path, "ell2"), sites);
  std::optional<RatVec> ell3;
  if (const json* e3 = optional_field(j, "ell3", path))
    ell3 = cube_from_json(*e3, io_detail::at(path, "ell3"), sites);
  try {
    return MomentFunctional::from_parts(sites, ell0, std::move(ell1), std::move(ell2),
                                        std::move(ell3));
  } catch (const std::exception& e) {
    throw FormatError(path, e.what());
  }
}

inline json functional_to_json(const MomentFunctional& L) {
  json out;
  out["ell0"] = tensor_to_json(L.moment(0));
  out["ell1"] = tensor_to_json(L.moment(1));
  out["ell2"] = tensor_to_json(L.moment(2));
  if (L.max_order() >= 3) out["ell3"] = tensor_to_json(L.moment(3));
  return out;
}

// Instance document:
//   { "sites": [...], "distances"?: [[...]], "kspec": {...},
//     "L": {"ell0": .., "ell1": [..], "ell2": [[..]], "ell3"?: [[[..]]]},
//     "gamma"?: [..], "r_max"?: .., "meta"?: anything }
// Unknown keys are ignored.
inline RealizabilityInstance instance_from_json(const json& j, const std::string& path = "$") {
  SiteSpace space = sites_from_json(j, path);
  const std::size_t n = space.size();
  KSpec kspec = kspec_from_json(require_field(j, "kspec", path), io_detail::at(path, "kspec"));
  MomentFunctional L = functional_from_json(require_field(j, "L", path), io_detail::at(path, "L"), n);
  std::optional<RatVec> gamma;
  if (const json* gj = optional_field(j, "gamma", path))
    gamma = ratvec_from_json(*gj, io_detail::at(path, "gamma"), n);
  std::optional<Rat> r_max;
  if (const json* rj = optional_field(j, "r_max", path))
    r_max = rat_from_json(*rj, io_detail::at(path, "r_max"));
  RealizabilityInstance inst{std::move(space), kspec, std::move(L), std::move(gamma),
                             std::move(r_max)};
  try {
    inst.validate();
  } catch (const std::exception& e) {
    throw FormatError(path, e.what());
  }
  return inst;
}

inline json instance_to_json(const RealizabilityInstance& inst) {
  json out = sites_to_json(inst.space);
  out["kspec"] = kspec_to_json(inst.kspec);
  out["L"] = functional_to_json(inst.L);
  if (inst.gamma) out["gamma"] = ratvec_to_json(*inst.gamma);
  if (inst.r_max) out["r_max"] = rat_to_json(*inst.r_max);
  return out;
}

inline Configuration config_from_json(const json& j, const std::string& path, std::size_t sites) {
  if (!j.is_array() || j.size() != sites)
    throw FormatError(path, "expected " + std::to_string(sites) + " counts");
  Configuration eta;
  for (std::size_t i = 0; i < sites; ++i) {
    const int c = int_from_json(j[i], io_detail::at(path, i));
    if (c < 0) throw FormatError(io_detail::at(path, i), "counts must be nonnegative");
    eta.counts.push_back(c);
  }
  return eta;
}

// Measure document: { "sites": [...], "atoms": [{"counts": [..], "weight": ..}, ...] }
struct MeasureFile {
  SiteSpace space;
  FiniteMeasure measure;
};

inline MeasureFile measure_from_json(const json& j, const std::string& path = "$") {
  SiteSpace space = sites_from_json(j, path);
  const json& aj = require_field(j, "atoms", path);
  if (!aj.is_array()) throw FormatError(io_detail::at(path, "atoms"), "expected an array");
  std::vector<std::pair<Configuration, Rat>> atoms;
  for (std::size_t i = 0; i < aj.size(); ++i) {
    const std::string apath = io_detail::at(io_detail::at(path, "atoms"), i);
    Configuration eta =
        config_from_json(require_field(aj[i], "counts", apath), io_detail::at(apath, "counts"),
                         space.size());
    Rat w = rat_from_json(require_field(aj[i], "weight", apath), io_detail::at(apath, "weight"));
    if (w <= 0) throw FormatError(io_detail::at(apath, "weight"), "weights must be positive");
    atoms.emplace_back(std::move(eta), std::move(w));
  }
  try {
    FiniteMeasure mu(space.size(), std::move(atoms));
    return {std::move(space), std::move(mu)};
  } catch (const std::exception& e) {
    throw FormatError(io_detail::at(path, "atoms"), e.what());
  }
}

inline json measure_to_json(const SiteSpace& space, const FiniteMeasure& mu) {
  json out = sites_to_json(space);
  json atoms = json::array();
  for (const auto& [config, weight] : mu.atoms()) {
    json a;
    a["counts"] = config.counts;
    a["weight"] = rat_to_json(weight);
    atoms.push_back(std::move(a));
  }
  out["atoms"] = std::move(atoms);
  return out;
}

// Certificate document mirrors PositivityCertificate:
//   {"f0": .., "f1": [..], "f2": [[..]], "f3"?: .., "gamma"?: [..]}
inline PositivityCertificate certificate_from_json(const json& j, const std::string& path,
                                                   std::size_t sites) {
  PositivityCertificate cert;
  cert.f0 = rat_from_json(require_field(j, "f0", path), io_detail::at(path, "f0"));
  cert.f1 = ratvec_from_json(require_field(j, "f1", path), io_detail::at(path, "f1"), sites);
  cert.f2 = ratmat_from_json(require_field(j, "f2", path), io_detail::at(path, "f2"), sites);
  if (const json* f3 = optional_field(j, "f3", path))
    cert.f3 = rat_from_json(*f3, io_detail::at(path, "f3"));
  if (const json* gj = optional_field(j, "gamma", path))
    cert.gamma = ratvec_from_json(*gj, io_detail::at(path, "gamma"), sites);
  if (cert.f3 && !cert.gamma)
    throw FormatError(path, "a cubic term f3 needs gamma weights");
  return cert;
}

inline json certificate_to_json(const PositivityCertificate& cert) {
  json out;
  out["f0"] = rat_to_json(cert.f0);
  out["f1"] = ratvec_to_json(cert.f1);
  out["f2"] = ratmat_to_json(cert.f2);
  if (cert.f3) out["f3"] = rat_to_json(*cert.f3);
  if (cert.gamma) out["gamma"] = ratvec_to_json(*cert.gamma);
  return out;
}

// Verdict document:
//   measure:     {"verdict": "measure", "support": [...], "realized_R"?: ..,
//                 "caps": {"Q": .., "enumeration": ..}}
//   certificate: {"verdict": "certificate", "certificate": {...}, "caps": {...}}
inline json verdict_to_json(const Verdict& verdict, const KSpec& kspec,
                            std::size_t enumeration_cap) {
  json out;
  out["caps"] = {{"Q", kspec.q}, {"enumeration", enumeration_cap}};
  if (const auto* rep = std::get_if<RepresentingMeasure>(&verdict)) {
    out["verdict"] = "measure";
    json support = json::array();
    for (const auto& [config, weight] : rep->measure.atoms()) {
      json a;
      a["counts"] = config.counts;
      a["weight"] = rat_to_json(weight);
      support.push_back(std::move(a));
    }
    out["support"] = std::move(support);
    if (rep->realized_r) out["realized_R"] = rat_to_json(*rep->realized_r);
  } else {
    out["verdict"] = "certificate";
    out["certificate"] = certificate_to_json(std::get<PositivityCertificate>(verdict));
  }
  return out;
}

inline Verdict verdict_from_json(const json& j, const std::string& path, std::size_t sites) {
  const json& vj = require_field(j, "verdict", path);
  if (!vj.is_string()) throw FormatError(io_detail::at(path, "verdict"), "expected a string");
  const std::string kind = vj.get<std::string>();
  if (kind == "measure") {
    const json& sj = require_field(j, "support", path);
    if (!sj.is_array()) throw FormatError(io_detail::at(path, "support"), "expected an array");
    std::vector<std::pair<Configuration, Rat>> atoms;
    for (std::size_t i = 0; i < sj.size(); ++i) {
      const std::string apath = io_detail::at(io_detail::at(path, "support"), i);
      Configuration eta = config_from_json(require_field(sj[i], "counts", apath),
                                           io_detail::at(apath, "counts"), sites);
      Rat w = rat_from_json(require_field(sj[i], "weight", apath), io_detail::at(apath, "weight"));
      atoms.emplace_back(std::move(eta), std::move(w));
    }
    try {
      RepresentingMeasure rep{FiniteMeasure(sites, std::move(atoms)), std::nullopt};
      if (const json* rj = optional_field(j, "realized_R", path))
        rep.realized_r = rat_from_json(*rj, io_detail::at(path, "realized_R"));
      return rep;
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw FormatError(io_detail::at(path, "support"), e.what());
    }
  }
  if (kind == "certificate")
    return certificate_from_json(require_field(j, "certificate", path),
                                 io_detail::at(path, "certificate"), sites);
  throw FormatError(io_detail::at(path, "verdict"),
                    "unknown verdict \"" + kind + "\"; expected measure or certificate");
}

inline json load_json(std::istream& in, const std::string& source) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(source, e.what());
  }
}

inline json load_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw FormatError(file, "cannot open file");
  return load_json(in, file);
}

}  // namespace momprob
