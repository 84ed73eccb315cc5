#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chancoh/channels.hpp"
#include "chancoh/measures.hpp"
#include "chancoh/superchannels.hpp"

namespace chancoh {

using Json = nlohmann::json;

inline Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError("matrix entry must be a [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("matrix must be a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ValidationError("matrix rows must be non-empty arrays");
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw ValidationError("matrix rows have inconsistent lengths");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[i][k]);
  }
  return m;
}

/// { "dimA": int, "dimB": int, "choi": matrix } — emitted form.
inline Json channel_to_json(const Channel& c) {
  return Json{{"dimA", c.dimA()}, {"dimB", c.dimB()}, {"choi", matrix_to_json(c.choi())}};
}

/// Accepts exactly one of "kraus" or "choi"; validates all Channel invariants
/// and names the failed one in the diagnostic.
inline Channel channel_from_json(const Json& j,
                                 const Tolerances& tol = default_tolerances()) {
  if (!j.is_object()) throw ValidationError("channel document must be a JSON object");
  if (!j.contains("dimA") || !j.contains("dimB") || !j["dimA"].is_number_unsigned() ||
      !j["dimB"].is_number_unsigned())
    throw ValidationError("channel document requires positive integer dimA and dimB");
  const std::size_t dimA = j["dimA"].get<std::size_t>();
  const std::size_t dimB = j["dimB"].get<std::size_t>();
  if (dimA == 0 || dimB == 0) throw ValidationError("channel dimensions must be >= 1");
  const bool has_kraus = j.contains("kraus"), has_choi = j.contains("choi");
  if (has_kraus == has_choi)
    throw ValidationError("channel document requires exactly one of \"kraus\" or \"choi\"");
  if (has_choi) return Channel::from_choi(dimA, dimB, matrix_from_json(j["choi"]), tol);
  if (!j["kraus"].is_array() || j["kraus"].empty())
    throw ValidationError("\"kraus\" must be a non-empty array of matrices");
  std::vector<ComplexMatrix> kraus;
  for (const Json& k : j["kraus"]) kraus.push_back(matrix_from_json(k));
  return channel_from_kraus(dimA, dimB, kraus, tol);
}

/// { "dims": [A,B,A',B'], "parts": [ { "kraus": [matrix,…] }, … ] };
/// a single-part document denotes a plain superchannel.
inline Json instrument_to_json(const Instrument& inst) {
  const SubSuperchannel& first = inst.parts.front();
  Json parts = Json::array();
  for (const SubSuperchannel& p : inst.parts) {
    Json kraus = Json::array();
    for (const ComplexMatrix& m : p.kraus) kraus.push_back(matrix_to_json(m));
    parts.push_back(Json{{"kraus", std::move(kraus)}});
  }
  return Json{{"dims", {first.dimA, first.dimB, first.dimA2, first.dimB2}},
              {"parts", std::move(parts)}};
}

inline Json superchannel_to_json(const Superchannel& t) {
  return instrument_to_json(
      Instrument{{SubSuperchannel{t.dimA, t.dimB, t.dimA2, t.dimB2, t.kraus}}});
}

inline Instrument instrument_from_json(const Json& j,
                                       const Tolerances& tol = default_tolerances()) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("parts"))
    throw ValidationError("instrument document requires \"dims\" and \"parts\"");
  const Json& dims = j["dims"];
  if (!dims.is_array() || dims.size() != 4)
    throw ValidationError("\"dims\" must be [A, B, A', B']");
  Instrument inst;
  for (const Json& part : j["parts"]) {
    if (!part.is_object() || !part.contains("kraus") || !part["kraus"].is_array())
      throw ValidationError("each part requires a \"kraus\" array");
    SubSuperchannel sub{dims[0].get<std::size_t>(), dims[1].get<std::size_t>(),
                        dims[2].get<std::size_t>(), dims[3].get<std::size_t>(), {}};
    for (const Json& m : part["kraus"]) sub.kraus.push_back(matrix_from_json(m));
    inst.parts.push_back(std::move(sub));
  }
  inst.validate(tol);
  return inst;
}

inline Superchannel superchannel_from_json(const Json& j,
                                           const Tolerances& tol = default_tolerances()) {
  return instrument_from_json(j, tol).as_superchannel();
}

inline Json report_to_json(const CoherenceReport& r) {
  return Json{{"c_max_bits", r.c_max},
              {"c_r", r.c_r},
              {"relation_residual", r.relation_residual},
              {"solver_gap", r.solver_gap},
              {"certificate",
               Json{{"primal_value", r.certificate.primal_value},
                    {"d", r.certificate.d},
                    {"dual_matrix", matrix_to_json(r.certificate.dual_matrix)},
                    {"gap", r.certificate.gap},
                    {"iterations", r.certificate.iterations}}}};
}

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

inline void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open file for writing: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace chancoh
