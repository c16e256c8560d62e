#include "gapdim/io.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gapdim/error.h"

namespace gapdim {

namespace {

[[noreturn]] void Fail(std::string_view field, const std::string& what) {
  throw Error(ErrorCode::kParse, std::string(field) + ": " + what);
}

const Json& Member(const Json& j, const char* key, std::string_view where) {
  if (!j.is_object() || !j.contains(key)) {
    Fail(std::string(where) + "." + key, "missing");
  }
  return j.at(key);
}

std::string Sub(std::string_view field, size_t i) {
  return std::string(field) + "[" + std::to_string(i) + "]";
}

std::vector<Rational> RationalList(const Json& j, std::string_view field) {
  if (!j.is_array()) Fail(field, "expected an array");
  std::vector<Rational> out;
  for (size_t i = 0; i < j.size(); ++i) out.push_back(RationalFromJson(j[i], Sub(field, i)));
  return out;
}

Json RationalList(std::span<const Rational> values) {
  Json out = Json::array();
  for (const auto& v : values) out.push_back(ToJson(v));
  return out;
}

IntervalUnion SetFromJson(const Json& j, std::string_view field) {
  if (!j.is_string()) Fail(field, "expected an interval-union string");
  try {
    return IntervalUnion::Parse(j.get<std::string>());
  } catch (const Error& e) {
    Fail(field, e.what());
  }
}

}  // namespace

Json ToJson(const Rational& r) { return r.ToString(); }

Rational RationalFromJson(const Json& j, std::string_view field) {
  if (j.is_number_integer()) return Rational(j.get<int64_t>());
  if (!j.is_string()) Fail(field, "expected a \"num/den\" string");
  try {
    return Rational::Parse(j.get<std::string>());
  } catch (const Error& e) {
    Fail(field, e.what());
  }
}

Json ToJson(const FunctionClass& cls) {
  Json out;
  out["name"] = cls.name();
  Json fns = Json::array();
  if (cls.kind() == FunctionKind::kTabular) {
    out["kind"] = "tabular";
    out["domain"] = RationalList(cls.domain());
    for (const auto& f : cls.functions()) fns.push_back({{"values", RationalList(f.values())}});
  } else {
    out["kind"] = "step";
    for (const auto& f : cls.functions()) {
      Json pieces = Json::array();
      for (const auto& p : f.pieces()) {
        pieces.push_back({{"set", p.set.ToString()}, {"value", ToJson(p.value)}});
      }
      fns.push_back({{"pieces", pieces}});
    }
  }
  out["functions"] = fns;
  return out;
}

FunctionClass ClassFromJson(const Json& j) {
  const Json& kind = Member(j, "kind", "class");
  if (!kind.is_string()) Fail("class.kind", "expected \"step\" or \"tabular\"");
  const std::string name = j.contains("name") && j["name"].is_string()
                               ? j["name"].get<std::string>()
                               : std::string("class");
  const Json& fns = Member(j, "functions", "class");
  if (!fns.is_array()) Fail("class.functions", "expected an array");
  std::vector<Function> functions;
  try {
    if (kind == "tabular") {
      const auto domain = RationalList(Member(j, "domain", "class"), "class.domain");
      for (size_t i = 0; i < fns.size(); ++i) {
        const std::string where = Sub("class.functions", i);
        functions.push_back(Function::Tabular(
            domain, RationalList(Member(fns[i], "values", where), where + ".values")));
      }
    } else if (kind == "step") {
      for (size_t i = 0; i < fns.size(); ++i) {
        const std::string where = Sub("class.functions", i);
        const Json& pieces = Member(fns[i], "pieces", where);
        if (!pieces.is_array()) Fail(where + ".pieces", "expected an array");
        std::vector<StepPiece> parsed;
        for (size_t p = 0; p < pieces.size(); ++p) {
          const std::string pw = Sub(where + ".pieces", p);
          parsed.push_back({SetFromJson(Member(pieces[p], "set", pw), pw + ".set"),
                            RationalFromJson(Member(pieces[p], "value", pw), pw + ".value")});
        }
        functions.push_back(Function::Step(std::move(parsed)));
      }
    } else {
      Fail("class.kind", "expected \"step\" or \"tabular\"");
    }
    return FunctionClass(name, std::move(functions));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    Fail("class", e.what());
  }
}

Json ToJson(const ShatterCertificate& cert) {
  Json selector = Json::object();
  for (size_t mask = 0; mask < cert.selector.size(); ++mask) {
    selector[std::to_string(mask)] = cert.selector[mask];
  }
  return {{"points", RationalList(cert.points)},
          {"alpha", ToJson(cert.alpha)},
          {"selector", selector}};
}

ShatterCertificate CertificateFromJson(const Json& j) {
  ShatterCertificate cert;
  cert.points = RationalList(Member(j, "points", "certificate"), "certificate.points");
  cert.alpha = RationalFromJson(Member(j, "alpha", "certificate"), "certificate.alpha");
  const Json& selector = Member(j, "selector", "certificate");
  if (!selector.is_object()) Fail("certificate.selector", "expected a mask -> index map");
  if (cert.points.size() > 30) Fail("certificate.points", "too many points");
  const size_t masks = size_t{1} << cert.points.size();
  cert.selector.assign(masks, 0);
  std::vector<char> seen(masks, 0);
  for (const auto& [key, value] : selector.items()) {
    size_t mask = 0;
    try {
      size_t used = 0;
      mask = std::stoul(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      Fail("certificate.selector", "bad mask '" + key + "'");
    }
    if (mask >= masks) Fail("certificate.selector", "mask " + key + " out of range");
    if (!value.is_number_unsigned()) {
      Fail("certificate.selector." + key, "expected a function index");
    }
    cert.selector[mask] = value.get<size_t>();
    seen[mask] = 1;
  }
  for (size_t mask = 0; mask < masks; ++mask) {
    if (!seen[mask]) Fail("certificate.selector", "mask " + std::to_string(mask) + " missing");
  }
  return cert;
}

Json ToJson(const CompleteTree& tree) {
  Json nodes = Json::array();
  for (size_t t = 1; t <= tree.node_count(); ++t) {
    Json node;
    if (const auto& label = tree.label(t)) {
      node["label"] = {label->k, label->k2};
    } else {
      node["label"] = nullptr;
    }
    if (const auto& set = tree.set(t)) {
      node["set"] = set->ToString();
    } else {
      node["set"] = nullptr;
    }
    nodes.push_back(node);
  }
  return {{"depth", tree.depth()}, {"nodes", nodes}, {"functions", tree.functions()}};
}

CompleteTree TreeFromJson(const Json& j) {
  const Json& depth = Member(j, "depth", "tree");
  if (!depth.is_number_integer() || depth.get<int>() < 0 || depth.get<int>() > 24) {
    Fail("tree.depth", "expected an integer in [0, 24]");
  }
  CompleteTree tree(depth.get<int>());
  const Json& nodes = Member(j, "nodes", "tree");
  if (!nodes.is_array() || nodes.size() != tree.node_count()) {
    Fail("tree.nodes", "expected " + std::to_string(tree.node_count()) + " nodes");
  }
  for (size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = Sub("tree.nodes", i);
    const size_t t = i + 1;
    if (nodes[i].contains("label") && !nodes[i]["label"].is_null()) {
      const Json& label = nodes[i]["label"];
      if (!label.is_array() || label.size() != 2 || !label[0].is_number_integer() ||
          !label[1].is_number_integer()) {
        Fail(where + ".label", "expected [k, k2]");
      }
      tree.set_label(t, {label[0].get<int>(), label[1].get<int>()});
    }
    if (nodes[i].contains("set") && !nodes[i]["set"].is_null()) {
      tree.set_set(t, SetFromJson(nodes[i]["set"], where + ".set"));
    }
  }
  if (j.contains("functions")) {
    const Json& g = j["functions"];
    if (!g.is_array()) Fail("tree.functions", "expected an array");
    std::vector<size_t> functions;
    for (size_t i = 0; i < g.size(); ++i) {
      if (!g[i].is_number_unsigned()) Fail(Sub("tree.functions", i), "expected an index");
      functions.push_back(g[i].get<size_t>());
    }
    tree.set_functions(std::move(functions));
  }
  return tree;
}

Json ToJson(const ProcessSpec& spec) {
  switch (spec.variant) {
    case ProcessSpec::Variant::kIidUniform:
      return {{"variant", "iid"}};
    case ProcessSpec::Variant::kRotation:
      return {{"variant", "rotation"}, {"theta", ToJson(spec.theta)}};
    case ProcessSpec::Variant::kMarkov: {
      Json rows = Json::array();
      for (const auto& row : spec.chain.transition) rows.push_back(RationalList(row));
      Json emissions = Json::array();
      for (const auto& e : spec.chain.emissions) {
        if (e.kind == Emission::Kind::kPoint) {
          emissions.push_back({{"point", ToJson(e.a)}});
        } else {
          emissions.push_back({{"uniform", {ToJson(e.a), ToJson(e.b)}}});
        }
      }
      return {{"variant", "markov"}, {"transition", rows}, {"emissions", emissions}};
    }
  }
  return {};
}

ProcessSpec ProcessFromJson(const Json& j) {
  const Json& variant = Member(j, "variant", "process");
  try {
    if (variant == "iid") return ProcessSpec::IidUniform();
    if (variant == "rotation") {
      if (!j.contains("theta")) return ProcessSpec::GoldenRotation();
      return ProcessSpec::Rotation(RationalFromJson(j["theta"], "process.theta"));
    }
    if (variant == "markov") {
      MarkovChain chain;
      const Json& rows = Member(j, "transition", "process");
      if (!rows.is_array()) Fail("process.transition", "expected a matrix");
      for (size_t i = 0; i < rows.size(); ++i) {
        chain.transition.push_back(RationalList(rows[i], Sub("process.transition", i)));
      }
      const Json& emissions = Member(j, "emissions", "process");
      if (!emissions.is_array()) Fail("process.emissions", "expected an array");
      for (size_t i = 0; i < emissions.size(); ++i) {
        const std::string where = Sub("process.emissions", i);
        const Json& e = emissions[i];
        if (e.is_object() && e.contains("point")) {
          chain.emissions.push_back(
              Emission::Point(RationalFromJson(e["point"], where + ".point")));
        } else if (e.is_object() && e.contains("uniform") && e["uniform"].is_array() &&
                   e["uniform"].size() == 2) {
          chain.emissions.push_back(
              Emission::Uniform(RationalFromJson(e["uniform"][0], where + ".uniform"),
                                RationalFromJson(e["uniform"][1], where + ".uniform")));
        } else {
          Fail(where, "expected {\"point\": x} or {\"uniform\": [a, b]}");
        }
      }
      return ProcessSpec::Markov(std::move(chain));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    Fail("process", e.what());
  }
  Fail("process.variant", "expected iid, rotation or markov");
}

ProcessSpec ParseProcess(std::string_view text) {
  if (text == "iid") return ProcessSpec::IidUniform();
  if (text == "rotation") return ProcessSpec::GoldenRotation();
  if (text.starts_with("rotation(") && text.ends_with(")")) {
    const auto inner = text.substr(9, text.size() - 10);
    try {
      return ProcessSpec::Rotation(Rational::Parse(inner));
    } catch (const Error& e) {
      Fail("process", e.what());
    }
  }
  if (text.starts_with("{")) {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::exception& e) {
      Fail("process", e.what());
    }
    return ProcessFromJson(j);
  }
  if (std::filesystem::is_regular_file(std::string(text))) {
    return ProcessFromJson(ReadJsonFile(std::string(text)));
  }
  Fail("process", "unrecognized process '" + std::string(text) + "'");
}

FunctionClass LoadClass(std::string_view text) {
  if (text.find('(') == std::string_view::npos &&
      std::filesystem::is_regular_file(std::string(text))) {
    return ClassFromJson(ReadJsonFile(std::string(text)));
  }
  return Generate(text);
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(path, "cannot open");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::exception& e) {
    Fail(path, e.what());
  }
}

}  // namespace gapdim
