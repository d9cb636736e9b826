#include "svpg/serialize.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "svpg/errors.hpp"

namespace svpg {

namespace {

constexpr const char* kFormatName = "svpg-param-checkpoint";

const char* activation_name(Activation a) { return a == Activation::tanh ? "tanh" : "linear"; }

Activation parse_activation(const std::string& s) {
  if (s == "tanh") return Activation::tanh;
  if (s == "linear") return Activation::linear;
  throw Error("checkpoint: unknown activation '" + s + "'");
}

}  // namespace

std::string to_json(const ParamCheckpoint& checkpoint) {
  checkpoint.spec.validate();
  require_size(static_cast<std::size_t>(checkpoint.params.size()),
               checkpoint.spec.param_count() + checkpoint.extra_size, "checkpoint parameters");
  nlohmann::json doc;
  doc["format"] = kFormatName;
  doc["version"] = kCheckpointFormatVersion;
  doc["layer_sizes"] = checkpoint.spec.layer_sizes;
  auto& acts = doc["activations"] = nlohmann::json::array();
  for (auto a : checkpoint.spec.activations) acts.push_back(activation_name(a));
  doc["extra_size"] = checkpoint.extra_size;
  doc["params"] = std::vector<double>(checkpoint.params.data(), checkpoint.params.data() + checkpoint.params.size());
  return doc.dump();
}

ParamCheckpoint from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("checkpoint: malformed JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormatName) throw Error("checkpoint: unexpected format tag");
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw Error("checkpoint: unsupported version " + std::to_string(version));
    }
    ParamCheckpoint cp;
    cp.spec.layer_sizes = doc.at("layer_sizes").get<std::vector<std::size_t>>();
    for (const auto& a : doc.at("activations")) cp.spec.activations.push_back(parse_activation(a.get<std::string>()));
    cp.spec.validate();
    cp.extra_size = doc.at("extra_size").get<std::size_t>();
    const auto values = doc.at("params").get<std::vector<double>>();
    require_size(values.size(), cp.spec.param_count() + cp.extra_size, "checkpoint parameters");
    cp.params = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    return cp;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const ParamCheckpoint& checkpoint) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out << to_json(checkpoint) << '\n';
}

ParamCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read checkpoint " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace svpg
