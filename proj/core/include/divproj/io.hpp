#pragma once

// File formats:
//   distribution  {"alphabet": ["a","b"], "probs": [0.5, 0.5]}
//   sample        {"alphabet": [...], "observations": [...]}  or CSV, one label per line
//   family        {"kind": "alpha_power_law", "alpha": 2.0, "q": [...], "f": [[...]], "alphabet": [...]}
//   linear family {"f": [[...]], "a": [...]}
// Malformed input raises Error with code InputError.

#include "divproj/families.hpp"
#include "divproj/projection.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace divproj::io {

struct LabeledDistribution {
  Alphabet alphabet;
  Distribution dist;
};

struct LabeledSample {
  Alphabet alphabet;
  SampleData sample;
};

struct LabeledFamily {
  Alphabet alphabet;
  FamilySpec spec;
};

std::string read_file(const std::filesystem::path& path);

LabeledDistribution parse_distribution(const std::string& text);
LabeledDistribution load_distribution(const std::filesystem::path& path);

/// JSON if the text starts with '{', otherwise CSV. CSV needs `alphabet`;
/// a first line that is not a label is taken as a header.
LabeledSample parse_sample(const std::string& text, const std::optional<Alphabet>& alphabet);
LabeledSample load_sample(const std::filesystem::path& path, const std::optional<Alphabet>& alphabet);

LabeledFamily parse_family(const std::string& text);
LabeledFamily load_family(const std::filesystem::path& path);

LinearFamilySpec parse_linear(const std::string& text);
LinearFamilySpec load_linear(const std::filesystem::path& path);

std::string sample_to_json(const Alphabet& alphabet, const SampleData& sample);
std::string distribution_to_json(const Alphabet& alphabet, const Distribution& p);

}  // namespace divproj::io
