#include "wmp/result.hpp"

#include <sstream>

#include <json.hpp>

namespace wmp {

std::string to_json(const ResultDocument& doc) {
  nlohmann::ordered_json j;
  j["schema"] = doc.schema;
  j["command"] = doc.command;
  j["model_hash"] = doc.model_hash;
  j["model_kind"] = doc.model_kind;
  if (!doc.objective.empty()) j["objective"] = doc.objective;
  if (!doc.flavor.empty()) j["flavor"] = doc.flavor;
  if (doc.lmax) j["lmax"] = *doc.lmax;
  if (!doc.algorithm.empty()) j["algorithm"] = doc.algorithm;
  if (!doc.value_exact.empty()) {
    j["value"] = doc.value_exact;
    j["value_decimal"] = doc.value_decimal;
  }
  if (!doc.distribution.empty()) {
    nlohmann::ordered_json d = nlohmann::ordered_json::array();
    for (const auto& [value, prob] : doc.distribution)
      d.push_back({{"value", value}, {"probability", prob}});
    j["distribution"] = std::move(d);
  }
  if (!doc.components.empty()) {
    nlohmann::ordered_json c = nlohmann::ordered_json::array();
    for (const auto& comp : doc.components)
      c.push_back({{"component", comp.component},
                   {"value", comp.value_exact},
                   {"value_decimal", comp.value_decimal}});
    j["components"] = std::move(c);
  }
  if (!doc.transform_scale.empty()) {
    j["transform"] = {{"scale", doc.transform_scale}, {"shift", doc.transform_shift}};
  }
  if (doc.note) j["note"] = *doc.note;
  for (const auto& [key, value] : doc.extra) j[key] = value;
  j["decimal_note"] = "decimal fields are display-only; exact strings are authoritative";
  j["timing_seconds"] = doc.seconds;
  return j.dump(2) + "\n";
}

std::string to_text(const ResultDocument& doc) {
  std::ostringstream out;
  out << "schema: " << doc.schema << "\n";
  out << "command: " << doc.command << "\n";
  out << "model: " << doc.model_kind << " " << doc.model_hash << "\n";
  if (!doc.objective.empty()) {
    out << "objective: " << doc.objective;
    if (doc.lmax) out << " lmax=" << *doc.lmax;
    if (!doc.flavor.empty()) out << " flavor=" << doc.flavor;
    out << "\n";
  }
  if (!doc.algorithm.empty()) out << "algorithm: " << doc.algorithm << "\n";
  if (!doc.value_exact.empty())
    out << "value: " << doc.value_exact << " (~ " << doc.value_decimal << ")\n";
  if (!doc.distribution.empty()) {
    out << "distribution:\n";
    for (const auto& [value, prob] : doc.distribution)
      out << "  " << value << " : " << prob << "\n";
  }
  if (!doc.components.empty()) {
    out << "components:\n";
    for (const auto& comp : doc.components)
      out << "  " << comp.component << " : " << comp.value_exact << " (~ " << comp.value_decimal
          << ")\n";
  }
  if (!doc.transform_scale.empty())
    out << "transform: scale=" << doc.transform_scale << " shift=" << doc.transform_shift << "\n";
  if (doc.note) out << "note: " << *doc.note << "\n";
  for (const auto& [key, value] : doc.extra) out << key << ": " << value << "\n";
  out << "timing: " << doc.seconds << "s\n";
  return out.str();
}

}  // namespace wmp
