#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wmp {

// Machine-readable analysis output. Exact "p/q" strings are authoritative;
// decimal renderings are display only. Everything except `seconds` is
// deterministic for fixed input and flags.
struct ResultDocument {
  int schema = 1;
  std::string command;
  std::string model_hash;
  std::string model_kind;
  std::string objective;
  std::string flavor;
  std::optional<int> lmax;
  std::string algorithm;
  std::string value_exact;
  std::string value_decimal;
  std::vector<std::pair<std::string, std::string>> distribution;  // value -> probability, exact
  struct Component {
    std::string component;
    std::string value_exact;
    std::string value_decimal;
  };
  std::vector<Component> components;
  std::string transform_scale;
  std::string transform_shift;
  std::optional<std::string> note;
  std::vector<std::pair<std::string, std::string>> extra;  // command-specific fields
  double seconds = 0.0;
};

std::string to_json(const ResultDocument& doc);
std::string to_text(const ResultDocument& doc);

}  // namespace wmp
