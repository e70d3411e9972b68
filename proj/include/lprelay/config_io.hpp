#pragma once

// Config file schema:
//
//   {
//     "topology":  "single_relay" | "two_relay_diamond",
//     "csi":       "synchronous" | "phase_fading",
//     "noise_psd": 1.0,                       (optional, default 1)
//     "powers":    {"P1": 1.0, "P2": 1.0, ...},
//     "gains":     {"c21": [[re, im], [re, im]], "c32": [[re, im]], ...}
//   }
//
// Unknown keys anywhere are rejected.

#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "lprelay/channel.hpp"
#include "lprelay/error.hpp"

namespace lprelay {

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing key '") + key + "'");
  return *it;
}

inline double as_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

inline std::string as_string(const nlohmann::json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected a string");
  return j.get<std::string>();
}

inline Complex as_complex(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ParseError(where + ": expected [re, im]");
  return {as_number(j[0], where + ".re"), as_number(j[1], where + ".im")};
}

inline nlohmann::json complex_to_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

}  // namespace detail

inline std::string to_string(Topology t) { return t == Topology::SingleRelay ? "single_relay" : "two_relay_diamond"; }
inline std::string to_string(CsiMode m) { return m == CsiMode::Synchronous ? "synchronous" : "phase_fading"; }

inline Topology topology_from_string(const std::string& s) {
  if (s == "single_relay") return Topology::SingleRelay;
  if (s == "two_relay_diamond") return Topology::TwoRelayDiamond;
  throw ValidationError("topology", "unknown topology '" + s + "'");
}

inline CsiMode csi_from_string(const std::string& s) {
  if (s == "synchronous") return CsiMode::Synchronous;
  if (s == "phase_fading") return CsiMode::PhaseFading;
  throw ValidationError("csi", "unknown CSI mode '" + s + "'");
}

inline ChannelVector parse_gain_vector(const nlohmann::json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) throw ParseError("gains." + name + ": expected a nonempty array of [re, im]");
  std::vector<Complex> entries;
  for (std::size_t i = 0; i < j.size(); ++i)
    entries.push_back(detail::as_complex(j[i], "gains." + name + "[" + std::to_string(i) + "]"));
  for (auto z : entries)
    if (!is_finite(z)) throw ValidationError(name, "gain entry is not finite");
  return ChannelVector(std::move(entries));
}

inline ChannelConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("config: top level must be an object");
  static const std::set<std::string> allowed{"topology", "csi", "noise_psd", "powers", "gains"};
  for (const auto& [key, _] : doc.items())
    if (!allowed.count(key)) throw ValidationError(key, "unknown key");

  const Topology topology = topology_from_string(detail::as_string(detail::field(doc, "topology"), "topology"));
  const CsiMode csi = csi_from_string(detail::as_string(detail::field(doc, "csi"), "csi"));
  const double noise_psd = doc.contains("noise_psd") ? detail::as_number(doc["noise_psd"], "noise_psd") : 1.0;

  const auto& pj = detail::field(doc, "powers");
  if (!pj.is_object()) throw ParseError("powers: expected an object");
  std::map<std::string, double> powers;
  for (const auto& [name, val] : pj.items()) powers[name] = detail::as_number(val, "powers." + name);

  const auto& gj = detail::field(doc, "gains");
  if (!gj.is_object()) throw ParseError("gains: expected an object");
  std::map<std::string, ChannelVector> gains;
  for (const auto& [name, val] : gj.items()) gains.emplace(name, parse_gain_vector(val, name));

  return ChannelConfig(topology, csi, noise_psd, std::move(powers), std::move(gains));
}

/// Parse and validate a config document.
inline ChannelConfig load_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return config_from_json(doc);
}

inline nlohmann::json config_to_json(const ChannelConfig& cfg) {
  nlohmann::json doc;
  doc["topology"] = to_string(cfg.topology());
  doc["csi"] = to_string(cfg.csi());
  doc["noise_psd"] = cfg.noise_psd();
  doc["powers"] = nlohmann::json::object();
  for (const auto& [name, w] : cfg.raw_powers()) doc["powers"][name] = w;
  doc["gains"] = nlohmann::json::object();
  for (const auto& [name, v] : cfg.gains()) {
    auto arr = nlohmann::json::array();
    for (auto z : v.entries()) arr.push_back(detail::complex_to_json(z));
    doc["gains"][name] = arr;
  }
  return doc;
}

inline std::string serialize_config(const ChannelConfig& cfg) { return config_to_json(cfg).dump(2); }

}  // namespace lprelay
