#include "divproj/io.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace divproj::io {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InputError, what); }

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

Vector to_vector(const json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) bad(std::string(what) + " must be an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix to_matrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) bad(std::string(what) + " must be a nonempty array of rows");
  // A flat array is a single statistic.
  if (j[0].is_number()) {
    Vector row = to_vector(j, what);
    return row.transpose();
  }
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) bad(std::string(what) + " rows differ in length");
    m.row(static_cast<Eigen::Index>(r)) = to_vector(j[r], what).transpose();
  }
  return m;
}

Alphabet to_alphabet(const json& j) {
  if (!j.is_array()) bad("alphabet must be an array of labels");
  std::vector<std::string> labels;
  for (const auto& e : j) {
    if (e.is_string()) {
      labels.push_back(e.get<std::string>());
    } else if (e.is_number_integer()) {
      labels.push_back(std::to_string(e.get<long long>()));
    } else {
      bad("alphabet labels must be strings");
    }
  }
  return Alphabet(std::move(labels));
}

std::string label_of(const json& e) {
  if (e.is_string()) return e.get<std::string>();
  if (e.is_number_integer()) return std::to_string(e.get<long long>());
  bad("observations must be labels");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\"");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

LabeledDistribution parse_distribution(const std::string& text) {
  const json j = parse_json(text);
  Vector p = to_vector(field(j, "probs"), "probs");
  Alphabet alphabet = j.contains("alphabet") ? to_alphabet(j.at("alphabet"))
                                             : Alphabet::indexed(static_cast<std::size_t>(p.size()));
  if (alphabet.size() != static_cast<std::size_t>(p.size())) {
    bad("alphabet has " + std::to_string(alphabet.size()) + " labels but probs has " +
        std::to_string(p.size()) + " entries");
  }
  const bool strict = (p.array() > 0.0).all();
  return {std::move(alphabet), Distribution::from_probs(std::move(p), strict)};
}

LabeledDistribution load_distribution(const std::filesystem::path& path) {
  return parse_distribution(read_file(path));
}

LabeledSample parse_sample(const std::string& text, const std::optional<Alphabet>& alphabet) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const json j = parse_json(text);
    Alphabet a = j.contains("alphabet") ? to_alphabet(j.at("alphabet"))
                                        : (alphabet ? *alphabet : (bad("sample has no alphabet"), *alphabet));
    if (alphabet && !(a == *alphabet)) bad("sample alphabet differs from the model alphabet");
    const json& obs = field(j, "observations");
    if (!obs.is_array()) bad("observations must be an array");
    std::vector<std::string> labels;
    for (const auto& e : obs) labels.push_back(label_of(e));
    SampleData s = empirical(labels, a);
    return {std::move(a), std::move(s)};
  }
  if (!alphabet) bad("CSV samples need an alphabet from the model file");
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> labels;
  bool first_line = true;
  while (std::getline(in, line)) {
    const std::string label = trim(line.substr(0, line.find(',')));
    if (label.empty()) continue;
    if (first_line) {
      first_line = false;
      if (!alphabet->index_of(label)) continue;  // header
    }
    labels.push_back(label);
  }
  SampleData s = empirical(labels, *alphabet);
  return {*alphabet, std::move(s)};
}

LabeledSample load_sample(const std::filesystem::path& path, const std::optional<Alphabet>& alphabet) {
  return parse_sample(read_file(path), alphabet);
}

LabeledFamily parse_family(const std::string& text) {
  const json j = parse_json(text);
  const json& kind = field(j, "kind");
  if (!kind.is_string()) bad("kind must be a string");
  const FamilyKind fk = parse_family_kind(kind.get<std::string>());
  Vector q = to_vector(field(j, "q"), "q");
  Matrix f = to_matrix(field(j, "f"), "f");
  double alpha = 1.0;
  if (j.contains("alpha")) {
    if (!j.at("alpha").is_number()) bad("alpha must be a number");
    alpha = j.at("alpha").get<double>();
  } else if (fk != FamilyKind::Exponential) {
    bad("power-law families need alpha");
  }
  Alphabet a = j.contains("alphabet") ? to_alphabet(j.at("alphabet"))
                                      : Alphabet::indexed(static_cast<std::size_t>(q.size()));
  if (a.size() != static_cast<std::size_t>(q.size())) bad("alphabet and q sizes differ");
  return {std::move(a), FamilySpec(fk, Distribution::from_probs(std::move(q), true), std::move(f),
                                   Alpha(alpha))};
}

LabeledFamily load_family(const std::filesystem::path& path) {
  return parse_family(read_file(path));
}

LinearFamilySpec parse_linear(const std::string& text) {
  const json j = parse_json(text);
  return LinearFamilySpec(to_matrix(field(j, "f"), "f"), to_vector(field(j, "a"), "a"));
}

LinearFamilySpec load_linear(const std::filesystem::path& path) {
  return parse_linear(read_file(path));
}

std::string sample_to_json(const Alphabet& alphabet, const SampleData& sample) {
  json j;
  j["alphabet"] = alphabet.symbols();
  json obs = json::array();
  for (auto o : sample.observations()) obs.push_back(alphabet.label(o));
  j["observations"] = std::move(obs);
  return j.dump();
}

std::string distribution_to_json(const Alphabet& alphabet, const Distribution& p) {
  json j;
  j["alphabet"] = alphabet.symbols();
  std::vector<double> probs(p.probs().data(), p.probs().data() + p.probs().size());
  j["probs"] = probs;
  return j.dump();
}

}  // namespace divproj::io
