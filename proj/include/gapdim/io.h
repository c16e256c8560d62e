#ifndef GAPDIM_IO_H_
#define GAPDIM_IO_H_

#include <string>
#include <string_view>

#include <json.hpp>

#include "gapdim/function_class.h"
#include "gapdim/process.h"
#include "gapdim/rational.h"
#include "gapdim/shatter.h"
#include "gapdim/tree.h"

namespace gapdim {

using Json = nlohmann::json;

// Rationals travel as "num/den" strings (plain integers are accepted on
// input). Parse failures throw kParse with the offending field in the message.
Json ToJson(const Rational& r);
Rational RationalFromJson(const Json& j, std::string_view field);

// {"name", "kind": "step"|"tabular", "domain": [...] (tabular only),
//  "functions": [{"values": [...]}] or [{"pieces": [{"set", "value"}]}]}
Json ToJson(const FunctionClass& cls);
FunctionClass ClassFromJson(const Json& j);

// {"points": [...], "alpha": "a/b", "selector": {"<mask>": index}}
Json ToJson(const ShatterCertificate& cert);
ShatterCertificate CertificateFromJson(const Json& j);

// {"depth": L, "nodes": [{"label": [k, k2] | null, "set": "..." | null}],
//  "functions": [...]} with nodes in heap order starting at the root.
Json ToJson(const CompleteTree& tree);
CompleteTree TreeFromJson(const Json& j);

// {"variant": "iid"} | {"variant": "rotation", "theta"} |
// {"variant": "markov", "transition": [[...]],
//  "emissions": [{"point": x} | {"uniform": [a, b]}]}
Json ToJson(const ProcessSpec& spec);
ProcessSpec ProcessFromJson(const Json& j);

// Textual process forms: iid | rotation | rotation(theta) | a JSON object |
// a path to a JSON file.
ProcessSpec ParseProcess(std::string_view text);

// A generator spec, or a path to a class JSON file.
FunctionClass LoadClass(std::string_view text);

Json ReadJsonFile(const std::string& path);

}  // namespace gapdim

#endif  // GAPDIM_IO_H_
