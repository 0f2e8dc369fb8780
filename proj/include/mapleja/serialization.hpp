#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mapleja/distributions.hpp"
#include "mapleja/errors.hpp"
#include "mapleja/gpc.hpp"
#include "mapleja/maps.hpp"
#include "mapleja/surrogate.hpp"

namespace mapleja {

inline constexpr int kFormatVersion = 1;

using Json = nlohmann::json;

inline Json to_json(const Distribution& d) {
  return {{"kind", std::string(to_string(d.kind()))}, {"lower", d.lower()}, {"upper", d.upper()}};
}

inline Json to_json(const ConformalMap& g) {
  Json j{{"map", std::string(to_string(g.kind()))}};
  if (g.kind() == MapKind::Sausage) j["order"] = g.order();
  if (g.kind() == MapKind::Kte) j["alpha"] = g.alpha();
  return j;
}

namespace detail {

// Typed field access that reports JSON-pointer locations.
template <class T>
T field(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + "/" + key, "missing field");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + "/" + key, e.what());
  }
}

inline const Json& array_field(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + "/" + key, "missing field");
  if (!it->is_array()) throw ParseError(where + "/" + key, "expected an array");
  return *it;
}

}  // namespace detail

inline Distribution distribution_from_json(const Json& j, const std::string& where) {
  const auto kind = detail::field<std::string>(j, "kind", where);
  const auto lo = detail::field<double>(j, "lower", where);
  const auto hi = detail::field<double>(j, "upper", where);
  if (!(hi > lo)) throw ParseError(where + "/upper", "upper must exceed lower");
  if (kind == "beta33") return Distribution::beta33(lo, hi);
  if (kind == "uniform") return Distribution::uniform(lo, hi);
  throw ParseError(where + "/kind", "unknown distribution kind '" + kind + "'");
}

inline ConformalMap map_from_json(const Json& j, const std::string& where) {
  const auto kind = detail::field<std::string>(j, "map", where);
  if (kind == "identity") return ConformalMap::identity();
  if (kind == "sausage") {
    const int order = j.contains("order") ? detail::field<int>(j, "order", where) : 9;
    if (order < 1 || order % 2 == 0) throw ParseError(where + "/order", "order must be odd and positive");
    return ConformalMap::sausage(order);
  }
  if (kind == "kte") {
    const double a = detail::field<double>(j, "alpha", where);
    if (!(a > 0.0 && a < 1.0)) throw ParseError(where + "/alpha", "alpha must lie in (0, 1)");
    return ConformalMap::kte(a);
  }
  throw ParseError(where + "/map", "unknown map kind '" + kind + "'");
}

inline Json to_json(const Surrogate& s) {
  Json j;
  j["version"] = kFormatVersion;
  j["N"] = s.dimension();
  j["width"] = s.width();
  j["distributions"] = Json::array();
  j["maps"] = Json::array();
  for (const auto& d : s.distributions()) j["distributions"].push_back(to_json(d));
  for (const auto& g : s.maps()) j["maps"].push_back(to_json(g));
  j["nodes1d"] = s.nodes1d();
  j["indices"] = Json::array();
  for (const auto& idx : s.indices())
    j["indices"].push_back(std::vector<unsigned>(idx.levels().begin(), idx.levels().end()));
  std::vector<double> re, im;
  for (const auto& c : s.surpluses()) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  j["surpluses_re"] = re;
  j["surpluses_im"] = im;
  return j;
}

inline Surrogate surrogate_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("/", "expected a JSON object");
  if (j.contains("gpc")) throw ParseError("/gpc", "file holds a gPC expansion, not a surrogate");
  const int version = detail::field<int>(j, "version", "");
  if (version != kFormatVersion) throw VersionError(version, kFormatVersion);
  const auto dim = detail::field<std::size_t>(j, "N", "");
  const auto width = j.contains("width") ? detail::field<std::size_t>(j, "width", "") : 1;
  if (dim == 0) throw ParseError("/N", "dimension must be positive");
  if (width == 0) throw ParseError("/width", "width must be positive");
  const auto& jd = detail::array_field(j, "distributions", "");
  const auto& jm = detail::array_field(j, "maps", "");
  if (jd.size() != dim) throw ParseError("/distributions", "length differs from N");
  if (jm.size() != dim) throw ParseError("/maps", "length differs from N");
  std::vector<Distribution> dists;
  std::vector<ConformalMap> maps;
  for (std::size_t n = 0; n < dim; ++n) {
    dists.push_back(distribution_from_json(jd[n], "/distributions/" + std::to_string(n)));
    maps.push_back(map_from_json(jm[n], "/maps/" + std::to_string(n)));
  }
  const auto nodes1d = detail::field<std::vector<std::vector<double>>>(j, "nodes1d", "");
  if (nodes1d.size() != dim) throw ParseError("/nodes1d", "length differs from N");
  const auto indices = detail::field<std::vector<std::vector<unsigned>>>(j, "indices", "");
  const auto re = detail::field<std::vector<double>>(j, "surpluses_re", "");
  const auto im = detail::field<std::vector<double>>(j, "surpluses_im", "");
  if (re.empty()) throw ParseError("/surpluses_re", "no surpluses");
  if (re.size() != im.size()) throw ParseError("/surpluses_im", "length differs from surpluses_re");
  if (re.size() != indices.size() * width)
    throw ParseError("/surpluses_re", "length differs from |indices| * width");

  try {
    Surrogate s(dists, maps, nodes1d, width);
    std::vector<Complex> buf(width);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (indices[i].size() != dim)
        throw ParseError("/indices/" + std::to_string(i), "length differs from N");
      for (std::size_t k = 0; k < width; ++k) buf[k] = {re[i * width + k], im[i * width + k]};
      s.add_surplus(MultiIndex(indices[i]), buf);
    }
    return s;
  } catch (const ContractError& e) {
    throw ParseError("/indices", e.what());
  }
}

inline std::string serialize(const Surrogate& s) { return to_json(s).dump(); }

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
}

inline Surrogate deserialize(const std::string& text) { return surrogate_from_json(parse_json(text)); }

inline Json to_json(const GpcExpansion& e) {
  Json j;
  j["version"] = kFormatVersion;
  j["gpc"] = true;
  j["N"] = e.dimension();
  j["p_max"] = e.max_degree();
  j["distributions"] = Json::array();
  for (const auto& d : e.distributions()) j["distributions"].push_back(to_json(d));
  j["indices"] = Json::array();
  std::vector<double> re, im;
  for (const auto& [p, s] : e.coefficients()) {
    j["indices"].push_back(std::vector<unsigned>(p.levels().begin(), p.levels().end()));
    re.push_back(s.real());
    im.push_back(s.imag());
  }
  j["coefficients_re"] = re;
  j["coefficients_im"] = im;
  return j;
}

inline GpcExpansion gpc_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("gpc")) throw ParseError("/gpc", "missing gPC marker");
  const int version = detail::field<int>(j, "version", "");
  if (version != kFormatVersion) throw VersionError(version, kFormatVersion);
  const auto dim = detail::field<std::size_t>(j, "N", "");
  const auto p_max = detail::field<unsigned>(j, "p_max", "");
  const auto& jd = detail::array_field(j, "distributions", "");
  if (jd.size() != dim) throw ParseError("/distributions", "length differs from N");
  std::vector<Distribution> dists;
  for (std::size_t n = 0; n < dim; ++n)
    dists.push_back(distribution_from_json(jd[n], "/distributions/" + std::to_string(n)));
  const auto indices = detail::field<std::vector<std::vector<unsigned>>>(j, "indices", "");
  const auto re = detail::field<std::vector<double>>(j, "coefficients_re", "");
  const auto im = detail::field<std::vector<double>>(j, "coefficients_im", "");
  if (re.empty()) throw ParseError("/coefficients_re", "no coefficients");
  if (re.size() != indices.size() || im.size() != indices.size())
    throw ParseError("/coefficients_re", "length differs from indices");
  GpcExpansion e(dists, p_max);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    try {
      e.coefficient(MultiIndex(indices[i])) = {re[i], im[i]};
    } catch (const ContractError& err) {
      throw ParseError("/indices/" + std::to_string(i), err.what());
    }
  }
  return e;
}

}  // namespace mapleja
