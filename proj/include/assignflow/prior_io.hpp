#pragma once

// Prior set files.
//
// CSV: one feature vector per line, comma separated, values on the [0, 1]
// scale of the image features. Blank lines and lines starting with '#' are
// skipped.
//
// JSON patch dictionary:
//   {
//     "radius": 1, "channels": 1,
//     "adaptation": "none" | "two-value" | "fingerprint",
//     "f_dark": 0.2, "f_bright": 0.8,          // fingerprint only
//     "classes": ["0deg", ...],                 // optional names
//     "patches": [ {"values": [...], "class": 0}, ... ]
//   }
// "values" lists (2r+1)^2 * channels numbers, row-major over offsets.
// "class" is optional; when every patch omits it, each patch is its own label.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "assignflow/errors.hpp"
#include "assignflow/features.hpp"

namespace assignflow::io {

inline PriorSet read_prior_csv(std::istream& in) {
  PriorSet p;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> item;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        item.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw FormatError("prior csv line " + std::to_string(lineno) + ": not a number: '" + cell + "'");
      }
    }
    if (!p.items.empty() && item.size() != p.items.front().size())
      throw FormatError("prior csv line " + std::to_string(lineno) + ": inconsistent dimension");
    p.items.push_back(std::move(item));
  }
  if (p.items.empty()) throw FormatError("prior csv: no prior vectors");
  return p;
}

inline PriorSet read_prior_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return read_prior_csv(in);
}

inline void write_prior_csv(std::ostream& out, const PriorSet& p) {
  out.precision(17);
  for (const auto& item : p.items) {
    for (std::size_t k = 0; k < item.size(); ++k) out << (k ? "," : "") << item[k];
    out << '\n';
  }
}

struct PatchDictionary {
  PriorSet priors;
  PatchDistanceOptions options;
  std::vector<std::string> class_names;
};

inline PatchDictionary parse_patch_dictionary(const nlohmann::json& j) {
  PatchDictionary d;
  try {
    d.priors.patch_radius = j.at("radius").get<int>();
    d.priors.channels = j.value("channels", std::size_t{1});
    const std::string mode = j.value("adaptation", std::string("none"));
    if (mode == "none") d.options.adaptation = PatchAdaptation::none;
    else if (mode == "two-value") d.options.adaptation = PatchAdaptation::two_value;
    else if (mode == "fingerprint") d.options.adaptation = PatchAdaptation::fingerprint;
    else throw FormatError("patch dictionary: unknown adaptation '" + mode + "'");
    d.options.f_dark = j.value("f_dark", 0.0);
    d.options.f_bright = j.value("f_bright", 1.0);
    if (j.contains("classes")) d.class_names = j.at("classes").get<std::vector<std::string>>();
    bool any_class = false;
    for (const auto& p : j.at("patches")) {
      d.priors.items.push_back(p.at("values").get<std::vector<double>>());
      if (p.contains("class")) {
        any_class = true;
        d.priors.class_of.push_back(p.at("class").get<std::size_t>());
      }
    }
    if (any_class && d.priors.class_of.size() != d.priors.items.size())
      throw FormatError("patch dictionary: either all patches or none carry a class");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("patch dictionary: ") + e.what());
  }
  if (d.priors.patch_radius < 0) throw FormatError("patch dictionary: negative radius");
  try {
    d.priors.validate();
  } catch (const Error& e) {
    throw FormatError(std::string("patch dictionary: ") + e.what());
  }
  return d;
}

inline PatchDictionary read_patch_dictionary_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return parse_patch_dictionary(j);
}

inline nlohmann::json patch_dictionary_json(const PatchDictionary& d) {
  nlohmann::json j;
  j["radius"] = d.priors.patch_radius;
  j["channels"] = d.priors.channels;
  switch (d.options.adaptation) {
    case PatchAdaptation::none: j["adaptation"] = "none"; break;
    case PatchAdaptation::two_value: j["adaptation"] = "two-value"; break;
    case PatchAdaptation::fingerprint:
      j["adaptation"] = "fingerprint";
      j["f_dark"] = d.options.f_dark;
      j["f_bright"] = d.options.f_bright;
      break;
  }
  if (!d.class_names.empty()) j["classes"] = d.class_names;
  j["patches"] = nlohmann::json::array();
  for (std::size_t k = 0; k < d.priors.items.size(); ++k) {
    nlohmann::json p;
    p["values"] = d.priors.items[k];
    if (!d.priors.class_of.empty()) p["class"] = d.priors.class_of[k];
    j["patches"].push_back(std::move(p));
  }
  return j;
}

}  // namespace assignflow::io
