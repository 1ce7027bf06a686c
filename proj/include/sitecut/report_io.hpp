#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "sitecut/certifier.hpp"
#include "sitecut/cutset.hpp"
#include "sitecut/errors.hpp"
#include "sitecut/exact.hpp"
#include "sitecut/monte_carlo.hpp"

namespace sitecut {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kEngineVersion = "0.1.0";

inline double require_finite(double x, const char* what = "value") {
  if (!std::isfinite(x)) {
    throw ContractError(std::string(what) + " is not finite");
  }
  return x;
}

/// Shortest round-trip decimal form; rejects NaN and infinities.
inline std::string format_number(double x) {
  require_finite(x);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  if (res.ec != std::errc{}) {
    throw ContractError("number formatting failed");
  }
  return std::string(buf, res.ptr);
}

inline Json members_json(const VertexSet& s) {
  Json out = Json::array();
  for (Vertex v : s) {
    out.push_back(v);
  }
  return out;
}

inline Json to_json(const PhiReport& r) {
  Json terms = Json::array();
  for (const auto& [y, value] : r.contributions) {
    terms.push_back(Json{{"y", y}, {"value", require_finite(value)}});
  }
  return Json{{"p", require_finite(r.p)},
              {"center", r.center},
              {"set_members", members_json(r.set)},
              {"value", require_finite(r.value)},
              {"degenerate", r.degenerate},
              {"contributions", terms}};
}

inline Json to_json(const Certificate& c) {
  Json j{{"p", require_finite(c.p)},
         {"epsilon0", require_finite(c.epsilon0)},
         {"center", c.center},
         {"set_members", members_json(c.set)},
         {"phi_value", require_finite(c.phi_value)},
         {"method", to_string(c.method)},
         {"engine_version", kEngineVersion}};
  if (c.method == CertMethod::monte_carlo) {
    j["phi_std_error"] = require_finite(c.phi_std_error);
    j["mc_samples"] = c.mc_samples;
    j["mc_seed"] = c.mc_seed;
    j["sigma_margin"] = require_finite(c.sigma_margin);
  }
  return j;
}

inline Json to_json(const MCEstimate& e) {
  return Json{{"mean", require_finite(e.mean)},
              {"stderr", require_finite(e.std_error)},
              {"samples", e.samples},
              {"seed", e.seed}};
}

inline Json to_json(const CutSumReport& r) {
  Json terms = Json::array();
  for (double t : r.terms) {
    terms.push_back(require_finite(t));
  }
  return Json{{"kind", to_string(r.kind)},
              {"p", require_finite(r.p)},
              {"cut_members", members_string(r.cut)},
              {"terms", terms},
              {"total", require_finite(r.total)},
              {"exact", r.exact},
              {"std_error", require_finite(r.std_error)}};
}

inline Json to_json(const RussoReport& r) {
  return Json{{"lhs_fd", require_finite(r.lhs_fd)},
              {"rhs_pivotal", require_finite(r.rhs_pivotal)},
              {"gap", require_finite(r.gap)}};
}

inline constexpr const char* kMcCsvHeader = "event,p,samples,seed,mean,stderr";
inline constexpr const char* kCutCsvHeader = "kind,p,cut_members,total";

inline void write_mc_row(std::ostream& os, const std::string& event, double p, const MCEstimate& e) {
  os << event << ',' << format_number(p) << ',' << e.samples << ',' << e.seed << ','
     << format_number(e.mean) << ',' << format_number(e.std_error) << '\n';
}

inline void write_cut_row(std::ostream& os, const CutSumReport& r) {
  os << to_string(r.kind) << ',' << format_number(r.p) << ',' << members_string(r.cut) << ','
     << format_number(r.total) << '\n';
}

} // namespace sitecut
