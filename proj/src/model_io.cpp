#include "mufor/model_io.h"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mufor/error.h"

namespace mufor {
namespace {

using Json = nlohmann::ordered_json;

const char* node_tag(NodeType t) {
  switch (t) {
    case NodeType::kLeaf:
      return "leaf";
    case NodeType::kBinary:
      return "binary";
    case NodeType::kMultiway:
      return "multiway";
  }
  return "leaf";
}

NodeType parse_node_tag(const std::string& s) {
  if (s == "leaf") return NodeType::kLeaf;
  if (s == "binary") return NodeType::kBinary;
  if (s == "multiway") return NodeType::kMultiway;
  fail(ErrorKind::kParse, "unknown node type '" + s + "'");
}

Json config_json(const MufConfig& c) {
  Json j;
  j["ntree"] = c.ntree;
  j["mtry"] = c.mtry;
  j["npervar"] = c.npervar;
  j["nmin"] = c.nmin;
  j["prop"] = c.prop;
  j["multiway_probability"] = c.multiway_probability;
  j["variant"] = variant_name(c);
  j["seed"] = c.seed;
  j["prediction_rule"] = to_string(c.prediction_rule);
  return j;
}

MufConfig config_from(const Json& j) {
  MufConfig c;
  c.ntree = j.at("ntree").get<std::size_t>();
  c.mtry = j.at("mtry").get<std::size_t>();
  c.npervar = j.at("npervar").get<std::size_t>();
  c.nmin = j.at("nmin").get<std::size_t>();
  c.prop = j.at("prop").get<double>();
  c.multiway_probability = j.at("multiway_probability").get<double>();
  apply_variant(c, j.at("variant").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  c.prediction_rule = parse_prediction_rule(j.at("prediction_rule").get<std::string>());
  return c;
}

Json node_json(const TreeNode& node) {
  Json j;
  j["type"] = node_tag(node.type);
  j["n"] = node.n_in_bag;
  if (node.is_leaf()) {
    j["counts"] = node.class_counts;
    return j;
  }
  j["covariate"] = node.covariate;
  j["points"] = node.points;
  j["children"] = node.children;
  j["assignment"] = node.assignment;
  return j;
}

TreeNode node_from(const Json& j, std::size_t n_nodes, std::size_t p, std::size_t n_classes) {
  TreeNode node;
  node.type = parse_node_tag(j.at("type").get<std::string>());
  node.n_in_bag = j.at("n").get<std::size_t>();
  if (node.is_leaf()) {
    node.class_counts = j.at("counts").get<std::vector<std::uint32_t>>();
    if (node.class_counts.size() != n_classes) fail(ErrorKind::kParse, "leaf class count size mismatch");
    if (node.n_in_bag == 0) fail(ErrorKind::kParse, "empty leaf");
    return node;
  }
  node.covariate = j.at("covariate").get<std::size_t>();
  node.points = j.at("points").get<std::vector<double>>();
  node.children = j.at("children").get<std::vector<std::size_t>>();
  node.assignment = j.at("assignment").get<std::vector<int>>();
  if (node.covariate >= p) fail(ErrorKind::kParse, "node covariate out of range");
  if (node.points.empty() || node.children.size() != node.points.size() + 1) {
    fail(ErrorKind::kParse, "node children do not match its split points");
  }
  if (node.type == NodeType::kBinary && node.points.size() != 1) {
    fail(ErrorKind::kParse, "binary node with several split points");
  }
  for (std::size_t i = 1; i < node.points.size(); ++i) {
    if (!(node.points[i - 1] < node.points[i])) fail(ErrorKind::kParse, "split points not increasing");
  }
  for (std::size_t c : node.children) {
    if (c >= n_nodes) fail(ErrorKind::kParse, "child id out of range");
  }
  if (!node.assignment.empty() && node.assignment.size() != n_classes) {
    fail(ErrorKind::kParse, "assignment size mismatch");
  }
  return node;
}

}  // namespace

std::string serialize_model(const MultiForestModel& model) {
  Json doc;
  doc["format"] = "mufor-model";
  doc["format_version"] = MultiForestModel::kFormatVersion;
  doc["config"] = config_json(model.config);
  doc["class_names"] = model.schema.class_names;
  Json covs = Json::array();
  for (const auto& c : model.schema.covariates) {
    Json jc;
    jc["name"] = c.name;
    jc["kind"] = to_string(c.kind);
    jc["n_categories"] = c.n_categories;
    jc["levels"] = c.levels;
    covs.push_back(std::move(jc));
  }
  doc["covariates"] = std::move(covs);
  Json encs = Json::array();
  for (const auto& e : model.schema.encodings) {
    Json je;
    je["covariate"] = e.covariate;
    je["rank_of_code"] = e.rank_of_code;
    encs.push_back(std::move(je));
  }
  doc["encodings"] = std::move(encs);
  doc["n_observations"] = model.n_observations;
  doc["training_fingerprint"] = model.training_fingerprint;
  Json trees = Json::array();
  for (const Tree& t : model.trees) {
    Json jt;
    jt["in_bag"] = t.in_bag;
    Json nodes = Json::array();
    for (const TreeNode& node : t.nodes) nodes.push_back(node_json(node));
    jt["nodes"] = std::move(nodes);
    trees.push_back(std::move(jt));
  }
  doc["trees"] = std::move(trees);
  return doc.dump();
}

MultiForestModel deserialize_model(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorKind::kParse, std::string("model is not valid JSON: ") + e.what());
  }
  try {
    if (doc.value("format", std::string()) != "mufor-model") fail(ErrorKind::kParse, "not a model file");
    const int version = doc.at("format_version").get<int>();
    if (version != MultiForestModel::kFormatVersion) {
      fail(ErrorKind::kParse, "unsupported model format version " + std::to_string(version));
    }
    MultiForestModel model;
    try {
      model.config = config_from(doc.at("config"));
      model.config.validate();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kInvalidArgument) throw;
      fail(ErrorKind::kParse, std::string("invalid model config: ") + e.what());
    }
    model.schema.class_names = doc.at("class_names").get<std::vector<std::string>>();
    for (const auto& jc : doc.at("covariates")) {
      CovariateInfo c;
      c.name = jc.at("name").get<std::string>();
      c.kind = parse_covariate_kind(jc.at("kind").get<std::string>());
      c.n_categories = jc.at("n_categories").get<int>();
      c.levels = jc.at("levels").get<std::vector<std::string>>();
      model.schema.covariates.push_back(std::move(c));
    }
    for (const auto& je : doc.at("encodings")) {
      CategoryEncoding e;
      e.covariate = je.at("covariate").get<std::size_t>();
      e.rank_of_code = je.at("rank_of_code").get<std::vector<int>>();
      if (!e.is_bijection()) fail(ErrorKind::kParse, "stored encoding is not a permutation");
      model.schema.encodings.push_back(std::move(e));
    }
    model.n_observations = doc.at("n_observations").get<std::size_t>();
    model.training_fingerprint = doc.at("training_fingerprint").get<std::string>();
    const std::size_t p = model.schema.covariates.size();
    const std::size_t n_classes = model.schema.class_names.size();
    for (const auto& jt : doc.at("trees")) {
      Tree t;
      t.in_bag = jt.at("in_bag").get<std::vector<std::size_t>>();
      const auto& nodes = jt.at("nodes");
      for (const auto& jn : nodes) t.nodes.push_back(node_from(jn, nodes.size(), p, n_classes));
      for (std::size_t id = 0; id < t.nodes.size(); ++id) {
        for (std::size_t c : t.nodes[id].children) {
          if (c <= id) fail(ErrorKind::kParse, "child id does not follow its parent");
        }
      }
      if (t.nodes.empty()) fail(ErrorKind::kParse, "tree without nodes");
      model.trees.push_back(std::move(t));
    }
    if (model.trees.empty()) fail(ErrorKind::kParse, "model without trees");
    return model;
  } catch (const Json::exception& e) {
    fail(ErrorKind::kParse, std::string("malformed model: ") + e.what());
  }
}

void save_model(const MultiForestModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write '" + path + "'");
  out << serialize_model(model) << '\n';
  if (!out) fail(ErrorKind::kIo, "write failed for '" + path + "'");
}

MultiForestModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open model '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace mufor
